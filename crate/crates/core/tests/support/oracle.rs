//! Independent reference implementations: gates written out entry by entry
//! and every kernel as an explicit element sum over plain 4x4 arrays.

#![allow(dead_code)]

use coherdiag_core::{ComplexMatrix, PureState, RngStream, C64};

pub type M4 = [[C64; 4]; 4];

/// Local energies of σz⊗I + I⊗σz in basis order 00, 01, 10, 11.
pub const ENERGIES: [f64; 4] = [2.0, 0.0, 0.0, -2.0];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn zero() -> M4 {
    [[c(0.0, 0.0); 4]; 4]
}

/// Control |1> on the left factor is mapped to |0> unchanged; control |0>
/// goes to |1> with `block` applied to the target.
fn controlled(block: [[C64; 2]; 2]) -> M4 {
    let mut m = zero();
    m[0][2] = c(1.0, 0.0);
    m[1][3] = c(1.0, 0.0);
    for r in 0..2 {
        for col in 0..2 {
            m[2 + r][col] = block[r][col];
        }
    }
    m
}

pub fn gate_g(theta: f64) -> M4 {
    let (s, co) = (2.0 * theta).sin_cos();
    controlled([[c(co, 0.0), c(s, 0.0)], [c(s, 0.0), c(-co, 0.0)]])
}

pub fn gate_v_axis(theta: f64, phi: f64) -> M4 {
    let (s, co) = (2.0 * theta).sin_cos();
    let (nx, ny, nz) = (s * phi.cos(), phi.sin(), co * phi.cos());
    controlled([[c(nz, 0.0), c(nx, -ny)], [c(nx, ny), c(-nz, 0.0)]])
}

pub fn gate_v_angle(theta: f64, phi: f64) -> M4 {
    let (s, co) = (2.0 * theta).sin_cos();
    let alpha = (phi + std::f64::consts::PI) / 2.0;
    let (sa, ca) = alpha.sin_cos();
    controlled([
        [c(sa * co, ca), c(sa * s, 0.0)],
        [c(sa * s, 0.0), c(-sa * co, ca)],
    ])
}

pub fn from_lib(m: &ComplexMatrix) -> M4 {
    let mut out = zero();
    for r in 0..4 {
        for col in 0..4 {
            out[r][col] = m[(r, col)];
        }
    }
    out
}

pub fn max_diff(a: &M4, b: &M4) -> f64 {
    let mut d = 0.0f64;
    for r in 0..4 {
        for col in 0..4 {
            d = d.max((a[r][col] - b[r][col]).norm());
        }
    }
    d
}

pub fn density(a: &[C64]) -> M4 {
    let mut rho = zero();
    for i in 0..4 {
        for j in 0..4 {
            rho[i][j] = a[i] * a[j].conj();
        }
    }
    rho
}

/// (W ρ W†)_{nk} = Σ_{m1,m2} W_{n m1} ρ_{m1 m2} conj(W_{k m2}).
pub fn evolve(w: &M4, rho: &M4) -> M4 {
    let mut out = zero();
    for n in 0..4 {
        for k in 0..4 {
            let mut s = c(0.0, 0.0);
            for m1 in 0..4 {
                for m2 in 0..4 {
                    s += w[n][m1] * rho[m1][m2] * w[k][m2].conj();
                }
            }
            out[n][k] = s;
        }
    }
    out
}

pub fn fidelity(a: &[C64], u: &M4, v: &M4) -> f64 {
    let rho = density(a);
    let (rv, ru) = (evolve(v, &rho), evolve(u, &rho));
    let mut s = c(0.0, 0.0);
    for n in 0..4 {
        for k in 0..4 {
            s += rv[n][k] * ru[k][n];
        }
    }
    s.re
}

pub fn coherence(a: &[C64], u: &M4, v: &M4) -> f64 {
    let rho = density(a);
    let (rv, ru) = (evolve(v, &rho), evolve(u, &rho));
    let mut s = 0.0;
    for n in 0..4 {
        for k in 0..4 {
            if n != k {
                s += rv[n][k].norm() - ru[n][k].norm();
            }
        }
    }
    s.abs()
}

fn energy_moment(a: &[C64]) -> f64 {
    (0..4).map(|m| ENERGIES[m].exp() * a[m].norm_sqr()).sum()
}

fn final_weighted_difference(u: &M4, v: &M4, part: &M4) -> f64 {
    let (rv, ru) = (evolve(v, part), evolve(u, part));
    let mut s = c(0.0, 0.0);
    for n in 0..4 {
        s += (rv[n][n] - ru[n][n]) * (-ENERGIES[n]).exp();
    }
    s.norm()
}

fn diagonal_part(rho: &M4) -> M4 {
    let mut p = zero();
    for i in 0..4 {
        p[i][i] = rho[i][i];
    }
    p
}

fn off_diagonal_part(rho: &M4) -> M4 {
    let mut chi = *rho;
    for i in 0..4 {
        chi[i][i] = c(0.0, 0.0);
    }
    chi
}

pub fn eta_epm(a: &[C64], u: &M4, v: &M4) -> f64 {
    energy_moment(a) * final_weighted_difference(u, v, &density(a))
}

pub fn eta_p(a: &[C64], u: &M4, v: &M4) -> f64 {
    energy_moment(a) * final_weighted_difference(u, v, &diagonal_part(&density(a)))
}

pub fn eta_chi(a: &[C64], u: &M4, v: &M4) -> f64 {
    energy_moment(a) * final_weighted_difference(u, v, &off_diagonal_part(&density(a)))
}

pub fn eta_tpm(a: &[C64], u: &M4, v: &M4) -> f64 {
    let mut weighted = diagonal_part(&density(a));
    for m in 0..4 {
        weighted[m][m] *= ENERGIES[m].exp();
    }
    final_weighted_difference(u, v, &weighted)
}

/// ⟨j|V†Π_αV|i⟩ as Σ over the single nonzero projector entry.
pub fn transition(v: &M4, alpha: usize, j: usize, i: usize) -> C64 {
    v[alpha][j].conj() * v[alpha][i]
}

/// Haar-random unitary by Gram-Schmidt on complex Gaussian columns.
pub fn random_unitary(rng: &mut RngStream) -> M4 {
    let mut cols: Vec<[C64; 4]> = Vec::new();
    while cols.len() < 4 {
        let mut v: [C64; 4] = std::array::from_fn(|_| c(rng.standard_normal(), rng.standard_normal()));
        for q in &cols {
            let proj: C64 = (0..4).map(|k| q[k].conj() * v[k]).sum();
            for k in 0..4 {
                v[k] -= proj * q[k];
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= n);
        cols.push(v);
    }
    let mut m = zero();
    for (col, q) in cols.iter().enumerate() {
        for r in 0..4 {
            m[r][col] = q[r];
        }
    }
    m
}

pub fn to_lib(m: &M4) -> ComplexMatrix {
    let flat: Vec<C64> = m.iter().flatten().copied().collect();
    ComplexMatrix::from_entries(4, &flat).unwrap()
}

pub fn amplitudes(psi: &PureState) -> Vec<C64> {
    psi.amplitudes().to_vec()
}
