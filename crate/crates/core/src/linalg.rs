//! Dense complex linear algebra for qubits (dimension 2) and qubit pairs
//! (dimension 4).
//!
//! Two-qubit basis order is |00⟩, |01⟩, |10⟩, |11⟩ with the left tensor factor
//! being the control qubit.

use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use alloc::format;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::rng::RngStream;
#[allow(unused_imports)]
use num_traits::Float;

pub type C64 = Complex<f64>;

/// Tolerance for exact algebraic identities in double precision.
pub const EXACT_TOL: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Supported Hilbert-space dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dim {
    Two,
    Four,
}

impl Dim {
    pub const fn size(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Four => 4,
        }
    }
}

impl TryFrom<usize> for Dim {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Dim::Two),
            4 => Ok(Dim::Four),
            other => Err(Error::InvalidDimension(other)),
        }
    }
}

/// Square complex matrix of dimension 2 or 4, stored row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: Dim,
    data: [C64; 16],
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        let mut list = f.debug_list();
        for r in 0..n {
            list.entry(&&self.data[r * n..(r + 1) * n]);
        }
        list.finish()
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: Dim) -> Self {
        Self {
            dim,
            data: [ZERO; 16],
        }
    }

    pub fn identity(dim: Dim) -> Self {
        Self::from_diag(dim, &[ONE; 4][..dim.size()])
    }

    /// Builds a matrix from `dim²` row-major entries.
    pub fn from_entries(dim: usize, entries: &[C64]) -> Result<Self> {
        let dim = Dim::try_from(dim)?;
        let n = dim.size();
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(entries.len(), n * n));
        }
        let mut m = Self::zeros(dim);
        m.data[..n * n].copy_from_slice(entries);
        Ok(m)
    }

    pub fn from_rows2(rows: [[C64; 2]; 2]) -> Self {
        let mut m = Self::zeros(Dim::Two);
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                m[(r, c)] = v;
            }
        }
        m
    }

    pub fn from_rows4(rows: [[C64; 4]; 4]) -> Self {
        let mut m = Self::zeros(Dim::Four);
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Diagonal matrix; `diag.len()` must equal the dimension.
    pub fn from_diag(dim: Dim, diag: &[C64]) -> Self {
        debug_assert_eq!(diag.len(), dim.size());
        let mut m = Self::zeros(dim);
        for (k, &v) in diag.iter().enumerate() {
            m[(k, k)] = v;
        }
        m
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &PureState, b: &PureState) -> Result<Self> {
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch(a.dim.size(), b.dim.size()));
        }
        let n = a.dim.size();
        let mut m = Self::zeros(a.dim);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] = a.amps[r] * b.amps[c].conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.dim.size()
    }

    /// Row-major view of the `dim²` entries.
    pub fn entries(&self) -> &[C64] {
        let n = self.n();
        &self.data[..n * n]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n();
        let mut out = Self::zeros(self.dim);
        for r in 0..n {
            for c in 0..n {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.n()).map(|k| self[(k, k)]).sum()
    }

    pub fn diagonal(&self) -> [C64; 4] {
        let mut d = [ZERO; 4];
        for (k, slot) in d.iter_mut().enumerate().take(self.n()) {
            *slot = self[(k, k)];
        }
        d
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z *= s);
        out
    }

    /// Matrix product, checking dimensions. `&a * &b` panics instead.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch(self.n(), rhs.n()));
        }
        let n = self.n();
        let mut out = Self::zeros(self.dim);
        for r in 0..n {
            for c in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += self[(r, k)] * rhs[(k, c)];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(out)
    }

    /// `self · ρ · self†`.
    pub fn conjugate(&self, rho: &Self) -> Self {
        &(self * rho) * &self.adjoint()
    }

    pub fn apply(&self, psi: &PureState) -> PureState {
        assert_eq!(self.dim, psi.dim, "dimension mismatch");
        let n = self.n();
        let mut amps = [ZERO; 4];
        for (r, slot) in amps.iter_mut().enumerate().take(n) {
            *slot = (0..n).map(|c| self[(r, c)] * psi.amps[c]).sum();
        }
        PureState {
            dim: self.dim,
            amps,
        }
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    /// Compares two matrices modulo a global phase. Diagnostic only; gate
    /// identities are checked entrywise.
    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let overlap: C64 = self
            .entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| a.conj() * b)
            .sum();
        if overlap.norm() == 0.0 {
            return self.max_abs_diff(other) <= tol;
        }
        let phase = overlap / overlap.norm();
        self.scale(phase).max_abs_diff(other) <= tol
    }

    /// `max |(V V†) − I|` over entries.
    pub fn unitarity_deviation(&self) -> f64 {
        (self * &self.adjoint()).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Only the Hermitian part of `self` is used.
    pub fn hermitian_eigenvalues(&self) -> [f64; 4] {
        // Real symmetric embedding [[A, -B], [B, A]] of A + iB doubles every
        // eigenvalue; cyclic Jacobi on the (at most 8x8) real matrix.
        let n = self.n();
        let m = 2 * n;
        let mut a = [[0.0f64; 8]; 8];
        for r in 0..n {
            for c in 0..n {
                let z = (self[(r, c)] + self[(c, r)].conj()) * 0.5;
                a[r][c] = z.re;
                a[r + n][c + n] = z.re;
                a[r][c + n] = -z.im;
                a[r + n][c] = z.im;
            }
        }
        for _sweep in 0..64 {
            let off: f64 = (0..m)
                .flat_map(|p| (0..m).filter(move |&q| q != p).map(move |q| (p, q)))
                .map(|(p, q)| a[p][q] * a[p][q])
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..m {
                for q in (p + 1)..m {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..m {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..m {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut eig = [0.0f64; 8];
        for (k, e) in eig.iter_mut().enumerate().take(m) {
            *e = a[k][k];
        }
        eig[..m].sort_by(f64::total_cmp);
        let mut out = [0.0; 4];
        for k in 0..n {
            out[k] = 0.5 * (eig[2 * k] + eig[2 * k + 1]);
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.n() + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        let n = self.n();
        &mut self.data[r * n + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("dimension mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = *self;
        out.data.iter_mut().zip(rhs.data.iter()).for_each(|(a, b)| *a += b);
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = *self;
        out.data.iter_mut().zip(rhs.data.iter()).for_each(|(a, b)| *a -= b);
        out
    }
}

/// Kronecker product of two single-qubit operators, `a` being the left
/// (control) factor.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != Dim::Two {
        return Err(Error::InvalidDimension(a.n()));
    }
    if b.dim != Dim::Two {
        return Err(Error::InvalidDimension(b.n()));
    }
    let mut out = ComplexMatrix::zeros(Dim::Four);
    for ar in 0..2 {
        for ac in 0..2 {
            for br in 0..2 {
                for bc in 0..2 {
                    out[(2 * ar + br, 2 * ac + bc)] = a[(ar, ac)] * b[(br, bc)];
                }
            }
        }
    }
    Ok(out)
}

pub fn identity2() -> ComplexMatrix {
    ComplexMatrix::identity(Dim::Two)
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_rows2([[ZERO, ONE], [ONE, ZERO]])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_rows2([[ZERO, -I], [I, ZERO]])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_rows2([[ONE, ZERO], [ZERO, -ONE]])
}

/// σ₊ = (σx + iσy)/2 = |0⟩⟨1|.
pub fn sigma_plus() -> ComplexMatrix {
    (&sigma_x() + &sigma_y().scale(I)).scale(C64::new(0.5, 0.0))
}

/// σ₋ = (σx − iσy)/2 = |1⟩⟨0|.
pub fn sigma_minus() -> ComplexMatrix {
    (&sigma_x() - &sigma_y().scale(I)).scale(C64::new(0.5, 0.0))
}

/// Normalized pure state vector.
#[derive(Clone, Copy, PartialEq)]
pub struct PureState {
    dim: Dim,
    amps: [C64; 4],
}

impl fmt::Debug for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("PureState").field(&self.amplitudes()).finish()
    }
}

impl PureState {
    /// Accepts amplitudes whose squared norm is 1 within 1e-12.
    pub fn new(amps: &[C64]) -> Result<Self> {
        let dim = Dim::try_from(amps.len())?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > EXACT_TOL {
            return Err(Error::InvalidState(format!(
                "squared norm {norm_sqr} differs from 1"
            )));
        }
        let mut buf = [ZERO; 4];
        buf[..amps.len()].copy_from_slice(amps);
        Ok(Self { dim, amps: buf })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: &[C64]) -> Result<Self> {
        let dim = Dim::try_from(amps.len())?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize, norm {norm}")));
        }
        let mut buf = [ZERO; 4];
        for (slot, a) in buf.iter_mut().zip(amps) {
            *slot = a / norm;
        }
        Ok(Self { dim, amps: buf })
    }

    pub fn basis(dim: Dim, index: usize) -> Self {
        assert!(index < dim.size(), "basis index out of range");
        let mut amps = [ZERO; 4];
        amps[index] = ONE;
        Self { dim, amps }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps[..self.dim.size()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes().iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.amplitudes()
            .iter()
            .zip(other.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Computational-basis populations |a_i|².
    pub fn populations(&self) -> [f64; 4] {
        let mut p = [0.0; 4];
        for (slot, a) in p.iter_mut().zip(self.amplitudes()) {
            *slot = a.norm_sqr();
        }
        p
    }

    /// Haar-random pure state drawn from the given stream.
    pub fn haar(rng: &mut RngStream, dim: Dim) -> Self {
        let mut amps = [ZERO; 4];
        loop {
            for a in amps.iter_mut().take(dim.size()) {
                *a = C64::new(rng.standard_normal(), rng.standard_normal());
            }
            let norm = amps[..dim.size()]
                .iter()
                .map(|a| a.norm_sqr())
                .sum::<f64>()
                .sqrt();
            if norm > 0.0 {
                amps.iter_mut().for_each(|a| *a /= norm);
                return Self { dim, amps };
            }
        }
    }
}

/// Haar-random pure state of dimension 2 or 4: a normalized vector of i.i.d.
/// standard complex Gaussians.
pub fn haar_pure_state(rng: &mut RngStream, dim: usize) -> Result<PureState> {
    Ok(PureState::haar(rng, Dim::try_from(dim)?))
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates Hermiticity and unit trace within 1e-12 and eigenvalues ≥ −1e-10.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let herm = m.hermiticity_deviation();
        if herm > EXACT_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > EXACT_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let min_eig = m.hermitian_eigenvalues()[0];
        if min_eig < -1e-10 {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self(m))
    }

    /// |ψ⟩⟨ψ|.
    pub fn from_pure(psi: &PureState) -> Self {
        Self(ComplexMatrix::outer(psi, psi).expect("same state"))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> Dim {
        self.0.dim()
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }
}

/// Rank-1 projector onto a pure state.
pub fn dm_from_pure(psi: &PureState) -> DensityMatrix {
    DensityMatrix::from_pure(psi)
}
