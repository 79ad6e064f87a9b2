//! Two-photon polarisation density matrices and entanglement measures.
//!
//! The product basis is ordered |++⟩, |+−⟩, |−+⟩, |−−⟩ (photon 1 first).

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volkov::{HelicityAmplitudeBlock, C64};

pub type CMat4 = Matrix4<C64>;

/// Polarisation basis of a density matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Helicity,
    Linear,
}

/// Tolerance used for the Hermiticity and trace contracts.
pub const CONTRACT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct TwoPhotonDensityMatrix {
    pub matrix: CMat4,
    pub basis: Basis,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub concurrence: f64,
    pub negativity: f64,
    pub entanglement_of_formation: f64,
    /// Eigenvalues ζ of ρ(σ²⊗σ²)ρ*(σ²⊗σ²), descending.
    pub eigenvalues: [f64; 4],
    pub basis: Basis,
}

/// Unnormalised ½Σ_{r_i,r_f} S S† for one amplitude block.
pub fn unnormalized_density(block: &HelicityAmplitudeBlock) -> CMat4 {
    let mut rho = CMat4::zeros();
    for ri in 0..2 {
        for rf in 0..2 {
            let s = block.spin_slice(ri, rf);
            let v = [s[0][0], s[0][1], s[1][0], s[1][1]];
            for a in 0..4 {
                for b in 0..4 {
                    rho[(a, b)] += v[a] * v[b].conj() * 0.5;
                }
            }
        }
    }
    rho
}

/// ρ = ½ Σ_{r_i,r_f} N S S†, with N fixing Tr ρ = 1.
pub fn density_matrix(block: &HelicityAmplitudeBlock) -> Result<TwoPhotonDensityMatrix> {
    TwoPhotonDensityMatrix::from_unnormalized(unnormalized_density(block), Basis::Helicity)
}

impl TwoPhotonDensityMatrix {
    /// Normalises a positive semidefinite accumulation to unit trace.
    pub fn from_unnormalized(m: CMat4, basis: Basis) -> Result<Self> {
        let tr = m.trace().re;
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::UndefinedState(format!(
                "density matrix has trace {tr}; all amplitudes vanish"
            )));
        }
        let mut matrix = m / C64::new(tr, 0.0);
        // remove rounding-level anti-Hermitian parts
        matrix = (matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        Ok(TwoPhotonDensityMatrix { matrix, basis })
    }

    /// Checks the Hermiticity and unit-trace contracts.
    pub fn new(matrix: CMat4, basis: Basis) -> Result<Self> {
        let herm = (matrix - matrix.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if herm > CONTRACT_TOLERANCE {
            return Err(Error::Contract(format!(
                "matrix is not Hermitian (defect {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > CONTRACT_TOLERANCE {
            return Err(Error::Contract(format!("trace is {tr}, expected 1")));
        }
        Ok(TwoPhotonDensityMatrix { matrix, basis })
    }

    /// Pure state |ψ⟩⟨ψ| of a (not necessarily normalised) vector.
    pub fn pure(psi: [C64; 4], basis: Basis) -> Result<Self> {
        let mut m = CMat4::zeros();
        for a in 0..4 {
            for b in 0..4 {
                m[(a, b)] = psi[a] * psi[b].conj();
            }
        }
        Self::from_unnormalized(m, basis)
    }

    pub fn max_imaginary(&self) -> f64 {
        self.matrix.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let e = self.matrix.symmetric_eigenvalues();
        let mut v = [e[0], e[1], e[2], e[3]];
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn report(&self) -> EntanglementReport {
        let (c, zeta) = concurrence_with_eigenvalues(self);
        EntanglementReport {
            concurrence: c,
            negativity: negativity(self),
            entanglement_of_formation: eof_from_concurrence(c),
            eigenvalues: zeta,
            basis: self.basis,
        }
    }
}

fn sigma_y_sigma_y() -> CMat4 {
    // σ² ⊗ σ² is real: anti-diagonal (−1, 1, 1, −1)
    let mut m = CMat4::zeros();
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}

/// √ζᵢ as the singular values of τ = Vᵀ(σ²⊗σ²)V, where the columns of V are
/// the eigenvectors of ρ scaled by √pᵢ. This equals the eigenvalue route
/// through √ρ ρ̃ √ρ but keeps full absolute accuracy for nearly pure states.
fn wootters_lambdas(rho: &TwoPhotonDensityMatrix) -> [f64; 4] {
    let eig = rho.matrix.symmetric_eigen();
    let mut v = CMat4::zeros();
    for j in 0..4 {
        let w = C64::new(eig.eigenvalues[j].max(0.0).sqrt(), 0.0);
        for i in 0..4 {
            v[(i, j)] = eig.eigenvectors[(i, j)] * w;
        }
    }
    let tau = v.transpose() * sigma_y_sigma_y() * v;
    let s = tau.singular_values();
    let mut l = [s[0], s[1], s[2], s[3]];
    l.sort_by(|a, b| b.total_cmp(a));
    l
}

fn concurrence_with_eigenvalues(rho: &TwoPhotonDensityMatrix) -> (f64, [f64; 4]) {
    let l = wootters_lambdas(rho);
    let c = (l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0);
    (c, l.map(|x| x * x))
}

/// Wootters concurrence C = max(0, √ζ₁ − √ζ₂ − √ζ₃ − √ζ₄).
pub fn concurrence(rho: &TwoPhotonDensityMatrix) -> f64 {
    concurrence_with_eigenvalues(rho).0
}

/// Partial transpose on photon 2.
pub fn partial_transpose(m: &CMat4) -> CMat4 {
    let mut out = CMat4::zeros();
    for a1 in 0..2 {
        for a2 in 0..2 {
            for b1 in 0..2 {
                for b2 in 0..2 {
                    out[(2 * a1 + a2, 2 * b1 + b2)] = m[(2 * a1 + b2, 2 * b1 + a2)];
                }
            }
        }
    }
    out
}

/// Sum of the magnitudes of the negative eigenvalues of the partial transpose.
pub fn negativity(rho: &TwoPhotonDensityMatrix) -> f64 {
    let pt = partial_transpose(&rho.matrix);
    pt.symmetric_eigenvalues()
        .iter()
        .filter(|&&x| x < 0.0)
        .map(|x| -x)
        .sum()
}

fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    h(p) + h(1.0 - p)
}

/// E_F = h((1 + √(1 − C²))/2).
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt()))
}

pub fn entanglement_of_formation(rho: &TwoPhotonDensityMatrix) -> f64 {
    eof_from_concurrence(concurrence(rho))
}

/// Single-photon helicity → linear unitary; rows are ⟨H|, ⟨V| in the
/// |+⟩, |−⟩ basis, with |H⟩ = (|+⟩ + |−⟩)/√2 and |V⟩ = (|+⟩ − |−⟩)/(i√2).
pub fn helicity_to_linear() -> Matrix2<C64> {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let is = C64::new(0.0, FRAC_1_SQRT_2);
    // ⟨V| = (⟨+| − ⟨−|)/(−i√2)
    Matrix2::new(s, s, is, -is)
}

pub fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> CMat4 {
    CMat4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// ρ' = (U ⊗ U) ρ (U ⊗ U)† with U = [`helicity_to_linear`].
pub fn to_linear_basis(rho: &TwoPhotonDensityMatrix) -> Result<TwoPhotonDensityMatrix> {
    if rho.basis != Basis::Helicity {
        return Err(Error::Contract(
            "density matrix is already in the linear basis".into(),
        ));
    }
    let u = helicity_to_linear();
    let uu = kron(&u, &u);
    let m = uu * rho.matrix * uu.adjoint();
    let m = (m + m.adjoint()) * C64::new(0.5, 0.0);
    Ok(TwoPhotonDensityMatrix {
        matrix: m,
        basis: Basis::Linear,
    })
}

/// JSON form: real and imaginary parts as row-major 4×4 arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixJson {
    pub basis: Basis,
    pub real: [[f64; 4]; 4],
    pub imag: [[f64; 4]; 4],
}

impl From<&TwoPhotonDensityMatrix> for DensityMatrixJson {
    fn from(rho: &TwoPhotonDensityMatrix) -> Self {
        let m = &rho.matrix;
        DensityMatrixJson {
            basis: rho.basis,
            real: std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)].re)),
            imag: std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)].im)),
        }
    }
}
