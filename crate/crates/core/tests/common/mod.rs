#![allow(dead_code)]
pub mod perturbative;
