//! Bessel functions of the first kind for integer order.

use crate::precision::{lit, Real};

/// J_ν(x) for ν = 0..=n_max, computed together by Miller's backward
/// recurrence normalised with J₀ + 2ΣJ₂ₖ = 1.
pub fn bessel_j_sequence(n_max: usize, x: f64) -> Vec<f64> {
    bessel_j_sequence_in(n_max, x)
}

/// [`bessel_j_sequence`] in any [`Real`] arithmetic. The recurrence start
/// is pushed further out when the arithmetic is more precise than f64.
pub fn bessel_j_sequence_in<T: Real>(n_max: usize, x: T) -> Vec<T> {
    let zero = T::zero();
    let mut out = vec![zero; n_max + 1];
    if x == zero {
        out[0] = T::one();
        return out;
    }
    let ax = x.abs();
    let extra = if std::mem::size_of::<T>() > 8 {
        2.0
    } else {
        1.0
    };
    let top = (n_max as f64).max(ax.to_f64());
    let mut start = (top + 20.0 * extra + (40.0 * extra * top).sqrt()) as usize;
    start += start % 2;
    let two = lit::<T>(2.0);
    let inv_x = ax.inv();
    let big = lit::<T>(1e100);
    let shrink = lit::<T>(1e-100);
    let mut j_next = zero;
    // seeds far above the f64 underflow keep the low word of double-double normal
    let mut j_cur = T::one();
    let mut norm = zero;
    for k in (1..=start).rev() {
        // J_{k−1} = (2k/x) J_k − J_{k+1}
        let j_prev = two * lit::<T>(k as f64) * inv_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        let idx = k - 1;
        if idx <= n_max {
            out[idx] = j_cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += two * j_cur;
        }
        if j_cur.abs() > big {
            j_cur *= shrink;
            j_next *= shrink;
            norm *= shrink;
            for v in out.iter_mut() {
                *v *= shrink;
            }
        }
    }
    norm += j_cur;
    let inv_norm = norm.inv();
    for v in out.iter_mut() {
        *v *= inv_norm;
    }
    if x < zero {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// J_n(x) for any integer order.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let m = n.unsigned_abs() as usize;
    let v = bessel_j_sequence(m, x)[m];
    if n < 0 && m % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Integer-order Bessel values J_ν(x) for ν in [−n_max, n_max].
#[derive(Clone, Debug)]
pub struct BesselTable<T: Real = f64> {
    n_max: i32,
    values: Vec<T>,
}

impl<T: Real> BesselTable<T> {
    pub fn new(n_max: i32, x: T) -> Self {
        BesselTable {
            n_max,
            values: bessel_j_sequence_in(n_max.max(0) as usize, x),
        }
    }

    /// J_n(x); zero outside the tabulated range.
    pub fn get(&self, n: i32) -> T {
        let m = n.abs();
        if m > self.n_max {
            return T::zero();
        }
        let v = self.values[m as usize];
        if n < 0 && m % 2 == 1 {
            -v
        } else {
            v
        }
    }
}
