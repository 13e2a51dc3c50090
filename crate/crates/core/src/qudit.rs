//! Complex linear algebra on the spin-1 level space.
//!
//! Everything here works over the ordered basis `(m0, m-1, m+1)`, i.e.
//! `|0> = [1,0,0]^T`, `|-1> = [0,1,0]^T`, `|+1> = [0,0,1]^T`. Two-dimensional
//! objects live on the `(m0, m-1)` prefix and are promoted to three dimensions
//! only through [`StateVector::embed`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for values constructed directly from closed forms.
pub const STATE_TOL: f64 = 1e-12;
/// Tolerance for results of accumulated matrix arithmetic.
pub const MATRIX_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A level `m_I` of the spin-1 system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    M0,
    MMinus1,
    MPlus1,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::M0, Level::MMinus1, Level::MPlus1];

    /// Position in the `(m0, m-1, m+1)` ordering.
    pub const fn index(self) -> usize {
        match self {
            Level::M0 => 0,
            Level::MMinus1 => 1,
            Level::MPlus1 => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Level> {
        Level::ALL.get(i).copied()
    }

    /// Magnetic quantum number.
    pub const fn m(self) -> i8 {
        match self {
            Level::M0 => 0,
            Level::MMinus1 => -1,
            Level::MPlus1 => 1,
        }
    }

    /// `|Δm| = 1`. The outer levels are not adjacent to each other.
    pub fn is_adjacent(self, other: Level) -> bool {
        (self.m() - other.m()).abs() == 1
    }

    pub fn neighbors(self) -> &'static [Level] {
        match self {
            Level::M0 => &[Level::MMinus1, Level::MPlus1],
            Level::MMinus1 | Level::MPlus1 => &[Level::M0],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::M0 => "m0",
            Level::MMinus1 => "m-1",
            Level::MPlus1 => "m+1",
        }
    }

    /// Accepts `m0`/`0`, `m-1`/`-1`, `m+1`/`+1`/`1`.
    pub fn parse(s: &str) -> Option<Level> {
        match s.trim() {
            "m0" | "0" => Some(Level::M0),
            "m-1" | "-1" => Some(Level::MMinus1),
            "m+1" | "+1" | "1" => Some(Level::MPlus1),
            _ => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Hilbert-space dimension. `Two` spans `{m0, m-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub const fn size(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    pub fn from_size(n: usize) -> Result<Dim> {
        match n {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            n => Err(Error::UnsupportedDimension(n)),
        }
    }

    pub fn levels(self) -> &'static [Level] {
        &Level::ALL[..self.size()]
    }
}

/// Measurement outcome labels.
///
/// `Unused` marks a measured level that carries no meaning for the protocol
/// (for example `m0` after the final relabeling pulse of the two-dimensional
/// schemes).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    A,
    B,
    Inconclusive,
    Unused,
}

impl Outcome {
    pub const ALL: [Outcome; 4] = [Outcome::A, Outcome::B, Outcome::Inconclusive, Outcome::Unused];

    const fn slot(self) -> usize {
        match self {
            Outcome::A => 0,
            Outcome::B => 1,
            Outcome::Inconclusive => 2,
            Outcome::Unused => 3,
        }
    }

    pub fn is_conclusive(self) -> bool {
        matches!(self, Outcome::A | Outcome::B)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Outcome::A => "A",
            Outcome::B => "B",
            Outcome::Inconclusive => "?",
            Outcome::Unused => "unused",
        };
        f.write_str(s)
    }
}

/// A pure state with unit norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector {
    dim: Dim,
    amps: [Complex64; 3],
}

impl StateVector {
    /// Builds a state from 2 or 3 amplitudes; the squared norm must be 1
    /// within [`STATE_TOL`].
    pub fn new(amplitudes: &[Complex64]) -> Result<Self> {
        let dim = Dim::from_size(amplitudes.len())?;
        let mut amps = [ZERO; 3];
        amps[..amplitudes.len()].copy_from_slice(amplitudes);
        let state = StateVector { dim, amps };
        let n = state.norm_sqr();
        if (n - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(state)
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(&c)
    }

    /// Normalizes `amplitudes` first. Fails on a zero vector.
    pub fn normalized(amplitudes: &[Complex64]) -> Result<Self> {
        let n: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        let scaled: Vec<Complex64> = amplitudes.iter().map(|z| z / n).collect();
        Self::new(&scaled)
    }

    pub fn basis(level: Level, dim: Dim) -> Result<Self> {
        if level.index() >= dim.size() {
            return Err(Error::DimensionMismatch(level.index() + 1, dim.size()));
        }
        let mut amps = [ZERO; 3];
        amps[level.index()] = ONE;
        Ok(StateVector { dim, amps })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps[..self.dim.size()]
    }

    pub fn amplitude(&self, level: Level) -> Complex64 {
        if level.index() < self.dim.size() {
            self.amps[level.index()]
        } else {
            ZERO
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Zero-pads the `m+1` amplitude. Identity on three-dimensional states.
    pub fn embed(&self) -> StateVector {
        StateVector {
            dim: Dim::Three,
            amps: self.amps,
        }
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim.size(), other.dim.size()));
        }
        Ok(self
            .amplitudes()
            .iter()
            .zip(other.amplitudes())
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    /// Population of each basis level, `|<level|psi>|^2`.
    pub fn populations(&self) -> [f64; 3] {
        [
            self.amps[0].norm_sqr(),
            self.amps[1].norm_sqr(),
            self.amps[2].norm_sqr(),
        ]
    }
}

/// `<x|y>`.
pub fn inner_product(x: &StateVector, y: &StateVector) -> Result<Complex64> {
    x.inner(y)
}

/// A square complex matrix over the ordered level basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Operator {
    dim: Dim,
    m: [[Complex64; 3]; 3],
}

impl Operator {
    pub fn zeros(dim: Dim) -> Self {
        Operator { dim, m: [[ZERO; 3]; 3] }
    }

    pub fn identity(dim: Dim) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim.size() {
            op.m[i][i] = ONE;
        }
        op
    }

    /// Row-major construction; the row count fixes the dimension.
    pub fn from_rows(rows: &[&[Complex64]]) -> Result<Self> {
        let dim = Dim::from_size(rows.len())?;
        let mut op = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != rows.len() {
                return Err(Error::DimensionMismatch(row.len(), rows.len()));
            }
            op.m[i][..row.len()].copy_from_slice(row);
        }
        Ok(op)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let owned: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        let refs: Vec<&[Complex64]> = owned.iter().map(Vec::as_slice).collect();
        Self::from_rows(&refs)
    }

    /// `sum_k |row_k><bras_k|`: maps each bra state onto basis level `k`.
    pub fn from_bras(bras: &[StateVector]) -> Result<Self> {
        let dim = Dim::from_size(bras.len())?;
        let mut op = Self::zeros(dim);
        for (i, bra) in bras.iter().enumerate() {
            if bra.dim != dim {
                return Err(Error::DimensionMismatch(bra.dim.size(), dim.size()));
            }
            for j in 0..dim.size() {
                op.m[i][j] = bra.amps[j].conj();
            }
        }
        Ok(op)
    }

    /// Rank-one projector `|psi><psi|`.
    pub fn projector(psi: &StateVector) -> Self {
        let mut op = Self::zeros(psi.dim);
        let n = psi.dim.size();
        for i in 0..n {
            for j in 0..n {
                op.m[i][j] = psi.amps[i] * psi.amps[j].conj();
            }
        }
        op
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        assert!(row < self.dim.size() && col < self.dim.size(), "index out of range");
        self.m[row][col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(row < self.dim.size() && col < self.dim.size(), "index out of range");
        self.m[row][col] = value;
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        let n = self.dim.size();
        for i in 0..n {
            for j in 0..n {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for z in row.iter_mut() {
                *z *= k;
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim.size()).map(|i| self.m[i][i]).sum()
    }

    /// Matrix-vector product without any unitarity check.
    pub fn apply(&self, psi: &StateVector) -> Result<[Complex64; 3]> {
        if self.dim != psi.dim {
            return Err(Error::DimensionMismatch(self.dim.size(), psi.dim.size()));
        }
        let n = self.dim.size();
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate().take(n) {
            *o = (0..n).map(|j| self.m[i][j] * psi.amps[j]).sum();
        }
        Ok(out)
    }

    /// `<x|self|x>`.
    pub fn expectation(&self, psi: &StateVector) -> Result<Complex64> {
        let v = self.apply(psi)?;
        Ok(psi.amplitudes().iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum())
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        let n = self.dim.size();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.m[i][j].norm())
            .fold(0.0, f64::max)
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        (self.dagger() * *self - Self::identity(self.dim)).max_abs()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    /// `max |E - E^dagger|`.
    pub fn hermiticity_residual(&self) -> f64 {
        (*self - self.dagger()).max_abs()
    }

    /// Eigenvalues of the Hermitian part `(E + E^dagger)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (*self + self.dagger()).scale(Complex64::new(0.5, 0.0));
        let mut eig = match self.dim {
            Dim::Two => hermitian_eigenvalues_2(&h),
            Dim::Three => hermitian_eigenvalues_3(&h),
        };
        eig.sort_by(f64::total_cmp);
        eig
    }

    /// Entrywise distance to `other` after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &Operator) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        // The phase aligning the two matrices maximizes Re(e^{-i phi} tr(A^dagger B)).
        let overlap = (self.dagger() * *other).trace();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        (*self - other.scale(phase.conj())).max_abs()
    }
}

impl Mul for Operator {
    type Output = Operator;

    fn mul(self, rhs: Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        let n = self.dim.size();
        let mut out = Operator::zeros(self.dim);
        for i in 0..n {
            for j in 0..n {
                out.m[i][j] = (0..n).map(|k| self.m[i][k] * rhs.m[k][j]).sum();
            }
        }
        out
    }
}

impl Add for Operator {
    type Output = Operator;

    fn add(self, rhs: Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] += rhs.m[i][j];
            }
        }
        out
    }
}

impl Sub for Operator {
    type Output = Operator;

    fn sub(self, rhs: Operator) -> Operator {
        self + (-rhs)
    }
}

impl Neg for Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

fn hermitian_eigenvalues_2(h: &Operator) -> Vec<f64> {
    let a = h.m[0][0].re;
    let d = h.m[1][1].re;
    let b = h.m[0][1].norm();
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    vec![mean - r, mean + r]
}

// Cyclic Jacobi on the real 6x6 embedding [[Re, -Im], [Im, Re]], whose
// spectrum is that of `h` with every eigenvalue doubled.
#[allow(clippy::needless_range_loop)]
fn hermitian_eigenvalues_3(h: &Operator) -> Vec<f64> {
    let mut a = [[0.0f64; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            let z = h.m[i][j];
            a[i][j] = z.re;
            a[i + 3][j + 3] = z.re;
            a[i + 3][j] = z.im;
            a[i][j + 3] = -z.im;
        }
    }
    for _ in 0..64 {
        let off: f64 = (0..6)
            .flat_map(|i| (0..6).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-36 {
            break;
        }
        for p in 0..5 {
            for q in p + 1..6 {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..6 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..6 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..6).map(|i| a[i][i]).collect();
    d.sort_by(f64::total_cmp);
    vec![0.5 * (d[0] + d[1]), 0.5 * (d[2] + d[3]), 0.5 * (d[4] + d[5])]
}

/// `U|s>`; rejects non-unitary `u` (tolerance [`MATRIX_TOL`]) and mismatched
/// dimensions.
pub fn apply_unitary(u: &Operator, s: &StateVector) -> Result<StateVector> {
    let residual = u.unitarity_residual();
    if residual > MATRIX_TOL {
        return Err(Error::NotUnitary(residual));
    }
    let amps = u.apply(s)?;
    Ok(StateVector { dim: s.dim, amps })
}

/// An ordered set of labelled measurement operators.
///
/// Construction does not validate; use [`validate_povm`] or rely on
/// [`born_probabilities`] to reject invalid sets.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<(Outcome, Operator)>,
}

impl Povm {
    pub fn new(elements: Vec<(Outcome, Operator)>) -> Self {
        Povm { elements }
    }

    /// Projective measurement onto the computational levels.
    pub fn levels(labels: &[Outcome]) -> Result<Self> {
        let dim = Dim::from_size(labels.len())?;
        let elements = labels
            .iter()
            .zip(dim.levels())
            .map(|(&label, &level)| {
                let ket = StateVector::basis(level, dim)?;
                Ok((label, Operator::projector(&ket)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Povm { elements })
    }

    /// Rank-one projectors onto the given (assumed orthonormal) basis.
    pub fn projective(basis: &[(Outcome, StateVector)]) -> Self {
        Povm {
            elements: basis.iter().map(|(l, v)| (*l, Operator::projector(v))).collect(),
        }
    }

    pub fn elements(&self) -> &[(Outcome, Operator)] {
        &self.elements
    }

    pub fn dim(&self) -> Option<Dim> {
        self.elements.first().map(|(_, op)| op.dim())
    }

    /// Pulls the measurement back through `u`: `E -> U^dagger E U`.
    pub fn conjugated_by(&self, u: &Operator) -> Povm {
        let ud = u.dagger();
        Povm {
            elements: self.elements.iter().map(|(l, e)| (*l, ud * *e * *u)).collect(),
        }
    }
}

/// Residuals of the three POVM conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PovmReport {
    pub consistent_dimensions: bool,
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
    pub completeness_residual: f64,
}

impl PovmReport {
    pub const HERMITICITY_TOL: f64 = STATE_TOL;
    pub const PSD_TOL: f64 = MATRIX_TOL;
    pub const COMPLETENESS_TOL: f64 = MATRIX_TOL;

    pub fn passes(&self) -> bool {
        self.consistent_dimensions
            && self.hermiticity_residual <= Self::HERMITICITY_TOL
            && self.min_eigenvalue >= -Self::PSD_TOL
            && self.completeness_residual <= Self::COMPLETENESS_TOL
    }
}

impl fmt::Display for PovmReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "dims consistent: {}, hermiticity {:.3e}, min eigenvalue {:.3e}, completeness {:.3e}",
            self.consistent_dimensions, self.hermiticity_residual, self.min_eigenvalue, self.completeness_residual
        )
    }
}

pub fn validate_povm(povm: &Povm) -> PovmReport {
    let Some(dim) = povm.dim() else {
        return PovmReport {
            consistent_dimensions: false,
            hermiticity_residual: 0.0,
            min_eigenvalue: 0.0,
            completeness_residual: f64::INFINITY,
        };
    };
    let consistent_dimensions = povm.elements.iter().all(|(_, e)| e.dim() == dim);
    if !consistent_dimensions {
        return PovmReport {
            consistent_dimensions,
            hermiticity_residual: f64::INFINITY,
            min_eigenvalue: f64::NEG_INFINITY,
            completeness_residual: f64::INFINITY,
        };
    }
    let hermiticity_residual = povm
        .elements
        .iter()
        .map(|(_, e)| e.hermiticity_residual())
        .fold(0.0, f64::max);
    let min_eigenvalue = povm
        .elements
        .iter()
        .map(|(_, e)| e.hermitian_eigenvalues()[0])
        .fold(f64::INFINITY, f64::min);
    let sum = povm.elements.iter().fold(Operator::zeros(dim), |acc, (_, e)| acc + *e);
    let completeness_residual = (sum - Operator::identity(dim)).max_abs();
    PovmReport {
        consistent_dimensions,
        hermiticity_residual,
        min_eigenvalue,
        completeness_residual,
    }
}

/// Outcome probabilities keyed by [`Outcome`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OutcomeDistribution {
    probs: [f64; 4],
}

impl OutcomeDistribution {
    pub fn get(&self, outcome: Outcome) -> f64 {
        self.probs[outcome.slot()]
    }

    pub fn add(&mut self, outcome: Outcome, p: f64) {
        self.probs[outcome.slot()] += p;
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Outcome, f64)> + '_ {
        Outcome::ALL.iter().map(move |&o| (o, self.get(o)))
    }
}

/// Born-rule probabilities `p(label) = sum <s|E|s>` over elements with that label.
pub fn born_probabilities(s: &StateVector, povm: &Povm) -> Result<OutcomeDistribution> {
    let report = validate_povm(povm);
    if !report.passes() {
        return Err(Error::InvalidPovm(report.to_string()));
    }
    let n = s.norm_sqr();
    if (n - 1.0).abs() > MATRIX_TOL {
        return Err(Error::NotNormalized(n));
    }
    let mut dist = OutcomeDistribution::default();
    for (label, e) in povm.elements() {
        let p = e.expectation(s)?.re;
        dist.add(*label, p);
    }
    for p in dist.probs.iter_mut() {
        *p = p.clamp(0.0, 1.0);
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

    fn pair(theta: f64) -> (StateVector, StateVector) {
        let (s, c) = theta.sin_cos();
        (
            StateVector::from_real(&[c, -s]).unwrap(),
            StateVector::from_real(&[c, s]).unwrap(),
        )
    }

    fn idp_basis(theta: f64) -> [StateVector; 3] {
        let t = theta.tan();
        let r = (1.0 - t * t).max(0.0).sqrt();
        [
            StateVector::from_real(&[t * FRAC_1_SQRT_2, -FRAC_1_SQRT_2, -r * FRAC_1_SQRT_2]).unwrap(),
            StateVector::from_real(&[t * FRAC_1_SQRT_2, FRAC_1_SQRT_2, -r * FRAC_1_SQRT_2]).unwrap(),
            StateVector::from_real(&[r, 0.0, t]).unwrap(),
        ]
    }

    fn idp_povm(theta: f64) -> Povm {
        let [ta, tb, q] = idp_basis(theta);
        Povm::projective(&[(Outcome::A, ta), (Outcome::B, tb), (Outcome::Inconclusive, q)])
    }

    #[test]
    fn overlap_examples() {
        let (a, b) = pair(FRAC_PI_4);
        assert!(inner_product(&a, &b).unwrap().norm() < STATE_TOL);
        let (a, b) = pair(0.0);
        assert!((inner_product(&a, &b).unwrap() - 1.0).norm() < STATE_TOL);
        let (a, b) = pair(FRAC_PI_8);
        // direct amplitude sum: cos^2 - sin^2
        let direct = FRAC_PI_8.cos().powi(2) - FRAC_PI_8.sin().powi(2);
        let ip = inner_product(&a, &b).unwrap();
        assert!((ip.re - direct).abs() < STATE_TOL);
        assert!((ip.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(ip.im.abs() < STATE_TOL);
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_argument() {
        let i = Complex64::new(0.0, 1.0);
        let x = StateVector::new(&[i, ZERO]).unwrap();
        let y = StateVector::basis(Level::M0, Dim::Two).unwrap();
        assert_eq!(inner_product(&x, &y).unwrap(), -i);
    }

    #[test]
    fn inner_product_rejects_dimension_mismatch() {
        let x = StateVector::basis(Level::M0, Dim::Two).unwrap();
        let y = StateVector::basis(Level::M0, Dim::Three).unwrap();
        assert!(matches!(inner_product(&x, &y), Err(Error::DimensionMismatch(2, 3))));
    }

    #[test]
    fn state_construction_checks() {
        assert!(matches!(
            StateVector::from_real(&[1.0, 1.0]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            StateVector::from_real(&[1.0]),
            Err(Error::UnsupportedDimension(1))
        ));
        assert!(StateVector::basis(Level::MPlus1, Dim::Two).is_err());
        let e = StateVector::basis(Level::MMinus1, Dim::Two).unwrap().embed();
        assert_eq!(e.dim(), Dim::Three);
        assert_eq!(e.amplitude(Level::MPlus1), ZERO);
    }

    #[test]
    fn apply_unitary_examples() {
        let (a, _) = pair(FRAC_PI_8);
        let a3 = a.embed();
        let out = apply_unitary(&Operator::identity(Dim::Three), &a3).unwrap();
        assert_eq!(out, a3);

        let s = FRAC_1_SQRT_2;
        let t01 = Operator::from_real_rows(&[&[s, -s, 0.0], &[s, s, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
        let zero = StateVector::basis(Level::M0, Dim::Three).unwrap();
        let out = apply_unitary(&t01, &zero).unwrap();
        assert!((out.amplitude(Level::M0).re - s).abs() < STATE_TOL);
        assert!((out.amplitude(Level::MMinus1).re - s).abs() < STATE_TOL);
        assert!(out.amplitude(Level::MPlus1).norm() < STATE_TOL);
    }

    #[test]
    fn apply_unitary_rejects_bad_input() {
        let zero3 = StateVector::basis(Level::M0, Dim::Three).unwrap();
        let not_unitary = Operator::identity(Dim::Three).scale(Complex64::new(2.0, 0.0));
        assert!(matches!(apply_unitary(&not_unitary, &zero3), Err(Error::NotUnitary(_))));
        let zero2 = StateVector::basis(Level::M0, Dim::Two).unwrap();
        assert!(matches!(
            apply_unitary(&Operator::identity(Dim::Three), &zero2),
            Err(Error::DimensionMismatch(3, 2))
        ));
    }

    #[test]
    fn born_probabilities_idp_examples() {
        let (a, _) = pair(FRAC_PI_4);
        let p = born_probabilities(&a.embed(), &idp_povm(FRAC_PI_4)).unwrap();
        assert!((p.get(Outcome::A) - 1.0).abs() < 1e-12);
        assert!(p.get(Outcome::B) < 1e-12);
        assert!(p.get(Outcome::Inconclusive) < 1e-12);

        let (a, _) = pair(0.0);
        let p = born_probabilities(&a.embed(), &idp_povm(0.0)).unwrap();
        assert!(p.get(Outcome::A) < 1e-12);
        assert!(p.get(Outcome::B) < 1e-12);
        assert!((p.get(Outcome::Inconclusive) - 1.0).abs() < 1e-12);

        let (a, _) = pair(FRAC_PI_8);
        let p = born_probabilities(&a.embed(), &idp_povm(FRAC_PI_8)).unwrap();
        assert!((p.get(Outcome::A) - (1.0 - std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-12);
        assert!(p.get(Outcome::B) < 1e-12);
        assert!((p.get(Outcome::Inconclusive) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((p.total() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn born_probabilities_rejects_invalid_povm() {
        let zero = StateVector::basis(Level::M0, Dim::Two).unwrap();
        let half = Povm::new(vec![(
            Outcome::A,
            Operator::identity(Dim::Two).scale(Complex64::new(0.5, 0.0)),
        )]);
        assert!(matches!(born_probabilities(&zero, &half), Err(Error::InvalidPovm(_))));
    }

    #[test]
    fn validate_povm_examples() {
        assert!(validate_povm(&idp_povm(FRAC_PI_8)).passes());

        let single = Povm::new(vec![(Outcome::Inconclusive, Operator::identity(Dim::Three))]);
        assert!(validate_povm(&single).passes());

        let mut elements = idp_povm(FRAC_PI_8).elements().to_vec();
        elements[0].1 = -elements[0].1;
        let report = validate_povm(&Povm::new(elements));
        assert!(!report.passes());
        assert!(report.min_eigenvalue < -0.5);
        assert!(report.hermiticity_residual <= PovmReport::HERMITICITY_TOL);

        let mixed = Povm::new(vec![
            (Outcome::A, Operator::identity(Dim::Two)),
            (Outcome::B, Operator::zeros(Dim::Three)),
        ]);
        assert!(!validate_povm(&mixed).consistent_dimensions);
        assert!(!validate_povm(&Povm::new(vec![])).passes());
    }

    #[test]
    fn non_hermitian_element_is_reported() {
        let mut e = Operator::zeros(Dim::Two);
        e.set(0, 1, ONE);
        let povm = Povm::new(vec![(Outcome::A, Operator::identity(Dim::Two)), (Outcome::B, e)]);
        let report = validate_povm(&povm);
        assert!(report.hermiticity_residual > 0.5);
        assert!(!report.passes());
    }

    #[test]
    fn eigenvalues_of_known_matrices() {
        let d = Operator::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, 2.0]]).unwrap();
        assert_eq!(d.hermitian_eigenvalues(), vec![-1.0, 2.0, 3.0]);
        // Pauli-y embedded: eigenvalues -1, 0, 1.
        let i = Complex64::new(0.0, 1.0);
        let y = Operator::from_rows(&[&[ZERO, -i, ZERO], &[i, ZERO, ZERO], &[ZERO, ZERO, ZERO]]).unwrap();
        let eig = y.hermitian_eigenvalues();
        for (got, want) in eig.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{eig:?}");
        }
        let x2 = Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(x2.hermitian_eigenvalues(), vec![-1.0, 1.0]);
    }

    #[test]
    fn distance_up_to_phase_ignores_global_phase() {
        let u = Operator::from_real_rows(&[&[0.6, -0.8], &[0.8, 0.6]]).unwrap();
        let phased = u.scale(Complex64::from_polar(1.0, 1.234));
        assert!(u.distance_up_to_phase(&phased) < 1e-15);
        assert!(u.distance_up_to_phase(&Operator::identity(Dim::Two)) > 0.1);
    }
}
