//! Leading-order perturbative double Compton amplitude e(p) + γ_L(k) →
//! e(p') + γ(k₁) + γ(k₂), written independently of the library: chiral
//! gamma matrices, spinors built as (p̸ + m)u₀, plain free propagators and
//! all six vertex orderings.

use num_complex::Complex64 as C;

pub type M4 = [[C; 4]; 4];
pub type V4 = [C; 4];

const G: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

fn z() -> C {
    C::new(0.0, 0.0)
}

fn mul(a: &M4, b: &M4) -> M4 {
    let mut o = [[z(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                o[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    o
}

fn apply(a: &M4, v: &V4) -> V4 {
    let mut o = [z(); 4];
    for i in 0..4 {
        for k in 0..4 {
            o[i] += a[i][k] * v[k];
        }
    }
    o
}

/// Chiral (Weyl) representation: γ⁰ = [[0, 1], [1, 0]], γⁱ = [[0, σⁱ], [−σⁱ, 0]].
pub fn gammas() -> [M4; 4] {
    let one = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    let sig: [[[C; 2]; 2]; 4] = [
        [[one, z()], [z(), one]],
        [[z(), one], [one, z()]],
        [[z(), -i], [i, z()]],
        [[one, z()], [z(), -one]],
    ];
    let mut g = [[[z(); 4]; 4]; 4];
    for mu in 0..4 {
        let lower_sign = if mu == 0 { 1.0 } else { -1.0 };
        for r in 0..2 {
            for c in 0..2 {
                g[mu][r][c + 2] = sig[mu][r][c];
                g[mu][r + 2][c] = sig[mu][r][c] * lower_sign;
            }
        }
    }
    g
}

pub fn slash(g: &[M4; 4], v: &[C; 4]) -> M4 {
    let mut o = [[z(); 4]; 4];
    for mu in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                o[i][j] += g[mu][i][j] * v[mu] * G[mu];
            }
        }
    }
    o
}

fn real(v: [f64; 4]) -> [C; 4] {
    v.map(|x| C::new(x, 0.0))
}

fn dot(a: [f64; 4], b: [f64; 4]) -> f64 {
    (0..4).map(|m| G[m] * a[m] * b[m]).sum()
}

/// u(p) = (p̸ + m)u₀/√(2m(E + m)), ū u = 2m; u₀ = √m(ξ, ξ) at rest.
pub fn spinor(g: &[M4; 4], p: [f64; 4], m: f64, s: usize) -> V4 {
    let xi = if s == 0 { [1.0, 0.0] } else { [0.0, 1.0] };
    let sm = m.sqrt();
    let u0 = [xi[0] * sm, xi[1] * sm, xi[0] * sm, xi[1] * sm].map(|x| C::new(x, 0.0));
    let mut pm = slash(g, &real(p));
    for d in 0..4 {
        pm[d][d] += C::new(m, 0.0);
    }
    let n = (2.0 * m * (p[0] + m)).sqrt();
    apply(&pm, &u0).map(|c| c / n)
}

pub fn bar(g: &[M4; 4], u: &V4) -> V4 {
    let uc = u.map(|c| c.conj());
    let mut o = [z(); 4];
    for j in 0..4 {
        for k in 0..4 {
            o[j] += uc[k] * g[0][k][j];
        }
    }
    o
}

/// Helicity vector ε(λ) = (θ̂ + iλφ̂)/√2 for a photon along (θ, φ).
pub fn helicity_vector(theta: f64, phi: f64, lambda: f64) -> [C; 4] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let th = [ct * cp, ct * sp, -st];
    let ph = [-sp, cp, 0.0];
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        z(),
        C::new(th[0] * r, lambda * ph[0] * r),
        C::new(th[1] * r, lambda * ph[1] * r),
        C::new(th[2] * r, lambda * ph[2] * r),
    ]
}

/// One vertex: momentum added to the electron line and the vector slashed.
pub struct Vertex {
    pub momentum: [f64; 4],
    pub vector: [C; 4],
}

fn propagator(g: &[M4; 4], p: [f64; 4], m: f64) -> M4 {
    let mut s = slash(g, &real(p));
    for d in 0..4 {
        s[d][d] += C::new(m, 0.0);
    }
    let den = dot(p, p) - m * m;
    s.map(|r| r.map(|c| c / den))
}

/// −i Σ over orderings of ū_f V S V S V u_i.
pub fn amplitude(g: &[M4; 4], m: f64, p_i: [f64; 4], verts: &[Vertex; 3], ubar: &V4, u: &V4) -> C {
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut total = z();
    for p in perms {
        let mut mom = p_i;
        let mut chain = slash(g, &verts[p[0]].vector);
        for &idx in &p[1..] {
            let prev = if idx == p[1] { p[0] } else { p[1] };
            for mu in 0..4 {
                mom[mu] += verts[prev].momentum[mu];
            }
            chain = mul(&propagator(g, mom, m), &chain);
            chain = mul(&slash(g, &verts[idx].vector), &chain);
        }
        let cu = apply(&chain, u);
        total += (0..4).map(|k| ubar[k] * cu[k]).sum::<C>();
    }
    total * C::new(0.0, -1.0)
}

/// Spin-summed |A|² per helicity channel for e(m at rest) + wave (κ along −x³,
/// circular amplitude ea) → e + γ(w1 along a1) + γ(along a2); angles are
/// (zenith, azimuth).
pub fn oracle_channels(
    m: f64,
    kappa: f64,
    ea: f64,
    w1: f64,
    a1: (f64, f64),
    a2: (f64, f64),
) -> [[f64; 2]; 2] {
    let g = gammas();
    let p_i = [m, 0.0, 0.0, 0.0];
    let k = [kappa, 0.0, 0.0, -kappa];
    let dir = |a: (f64, f64)| {
        let (st, ct) = a.0.sin_cos();
        let (sp, cp) = a.1.sin_cos();
        [1.0, st * cp, st * sp, ct]
    };
    let dot = |a: [f64; 4], b: [f64; 4]| a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
    let n1 = dir(a1);
    let n2 = dir(a2);
    let k1 = n1.map(|x| x * w1);
    let p = [0, 1, 2, 3].map(|i| p_i[i] + k[i] - k1[i]);
    let e2 = (dot(p_i, k) - dot(p_i, k1) - dot(k, k1)) / dot(p, n2);
    let k2 = n2.map(|x| x * e2);
    let p_f = [0, 1, 2, 3].map(|i| p[i] - k2[i]);
    let absorbed = [
        C::new(0.0, 0.0),
        C::new(0.5 * ea, 0.0),
        C::new(0.0, 0.5 * ea),
        C::new(0.0, 0.0),
    ];
    let mut out = [[0.0; 2]; 2];
    for (i1, l1) in [1.0, -1.0].into_iter().enumerate() {
        for (i2, l2) in [1.0, -1.0].into_iter().enumerate() {
            let e1 = helicity_vector(a1.0, a1.1, l1).map(|c| c.conj());
            let e2v = helicity_vector(a2.0, a2.1, l2).map(|c| c.conj());
            let verts = [
                Vertex {
                    momentum: k,
                    vector: absorbed,
                },
                Vertex {
                    momentum: k1.map(|x| -x),
                    vector: e1,
                },
                Vertex {
                    momentum: k2.map(|x| -x),
                    vector: e2v,
                },
            ];
            for si in 0..2 {
                for sf in 0..2 {
                    let u = spinor(&g, p_i, m, si);
                    let ub = bar(&g, &spinor(&g, p_f, m, sf));
                    out[i1][i2] += amplitude(&g, m, p_i, &verts, &ub, &u).norm_sqr();
                }
            }
        }
    }
    out
}
