//! Brute-force grid searches over measurement bases, used to check the
//! closed-form optima independently of the protocol constructions.
//!
//! Grids are nested: resolution `r` evaluates a subset of the points of
//! resolution `k * r`, so refining never increases the reported minimum.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::StatePair;
use crate::error::{Error, Result};

pub const MIN_RESOLUTION: usize = 64;

type Ket = [Complex64; 3];

fn dot(x: &Ket, y: &Ket) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm_sqr(x: &Ket) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

fn amplitudes(pair: &StatePair) -> (Ket, Ket) {
    let (s, c) = pair.theta().sin_cos();
    let r = |x: f64| Complex64::new(x, 0.0);
    ([r(c), r(-s), r(0.0)], [r(c), r(s), r(0.0)])
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Config(format!(
            "grid resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    Ok(())
}

/// Minimum average error over all two-outcome projective measurements in
/// the `{|0>, |-1>}` plane.
///
/// The first basis vector is `cos(phi)|0> + e^{i chi} sin(phi)|-1>` with
/// `phi` in `[0, pi)` and `chi` in `[0, 2 pi)`, both sampled at
/// `grid_resolution` points; both label assignments are tried.
pub fn oracle_min_error_search(pair: &StatePair, grid_resolution: usize) -> Result<f64> {
    check_resolution(grid_resolution)?;
    let (a, b) = amplitudes(pair);
    let (pa, pb) = (pair.prior_a(), pair.prior_b());
    let best = (0..grid_resolution)
        .into_par_iter()
        .map(|i| {
            let phi = PI * i as f64 / grid_resolution as f64;
            let (sp, cp) = phi.sin_cos();
            let mut row_best = f64::INFINITY;
            for j in 0..grid_resolution {
                let chi = 2.0 * PI * j as f64 / grid_resolution as f64;
                let e = Complex64::from_polar(1.0, chi);
                let first = [Complex64::new(cp, 0.0), e * sp];
                let second = [-e.conj() * sp, Complex64::new(cp, 0.0)];
                let amp = |v: &[Complex64; 2], psi: &Ket| (v[0].conj() * psi[0] + v[1].conj() * psi[1]).norm_sqr();
                // first -> A, second -> B, and the swapped assignment
                let err_1 = pa * amp(&second, &a) + pb * amp(&first, &b);
                let err_2 = pa * amp(&first, &a) + pb * amp(&second, &b);
                row_best = row_best.min(err_1).min(err_2);
            }
            row_best
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

/// Orthonormal basis of the complement of a unit vector.
fn complement(v: &Ket) -> [Ket; 2] {
    let mut out: Vec<Ket> = Vec::with_capacity(2);
    for k in 0..3 {
        let mut e = [Complex64::new(0.0, 0.0); 3];
        e[k] = Complex64::new(1.0, 0.0);
        let mut w = e;
        for prev in std::iter::once(v).chain(out.iter()) {
            let c = dot(prev, &w);
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= c * pi;
            }
        }
        let n = norm_sqr(&w).sqrt();
        if n > 1e-6 {
            out.push(w.map(|z| z / n));
        }
        if out.len() == 2 {
            break;
        }
    }
    [out[0], out[1]]
}

/// Inconclusive probability of the best unambiguous measurement whose
/// `A` outcome projects onto `conclusive_a` (which must be orthogonal to `|b>`).
///
/// The `B` direction is the normalized part of `|b>` orthogonal to both
/// `|a>` and `conclusive_a`; the inconclusive direction completes the basis.
fn failure_for_direction(a: &Ket, b: &Ket, conclusive_a: &Ket) -> f64 {
    let p_a = dot(conclusive_a, a).norm_sqr();
    // Orthonormalize {a, conclusive_a}, then strip them from b.
    let mut span: Vec<Ket> = vec![*a];
    let c = dot(a, conclusive_a);
    let mut w = *conclusive_a;
    for (wi, ai) in w.iter_mut().zip(a) {
        *wi -= c * ai;
    }
    let n = norm_sqr(&w).sqrt();
    if n > 1e-12 {
        span.push(w.map(|z| z / n));
    }
    let mut rest = *b;
    for v in &span {
        let c = dot(v, &rest);
        for (ri, vi) in rest.iter_mut().zip(v) {
            *ri -= c * vi;
        }
    }
    let p_b = norm_sqr(&rest);
    1.0 - 0.5 * (p_a + p_b)
}

/// Public hook for checking a specific conclusive direction, e.g. `|a~>`.
pub fn usd_failure_with_conclusive_a(pair: &StatePair, conclusive_a: &crate::qudit::StateVector) -> Result<f64> {
    if !pair.has_equal_priors() {
        return Err(Error::Unsupported("unambiguous search assumes equal priors".into()));
    }
    let (a, b) = amplitudes(pair);
    let v = conclusive_a.embed();
    let amps = v.amplitudes();
    let ket = [amps[0], amps[1], amps[2]];
    if dot(&ket, &b).norm() > 1e-9 {
        return Err(Error::Config("conclusive A direction must be orthogonal to |b>".into()));
    }
    Ok(failure_for_direction(&a, &b, &ket))
}

/// Minimum inconclusive probability over unambiguous three-outcome
/// projective measurements of the three-level space.
///
/// Every feasible measurement has its `A` projector inside the plane
/// orthogonal to `|b>`; that direction is swept as
/// `cos(alpha) u1 + e^{i gamma} sin(alpha) u2` over `alpha` in `[0, pi)`,
/// `gamma` in `[0, 2 pi)`, and the `B` and inconclusive projectors are derived.
/// Every grid point is an exactly unambiguous measurement.
pub fn oracle_usd_failure_search(pair: &StatePair, grid_resolution: usize) -> Result<f64> {
    check_resolution(grid_resolution)?;
    if !pair.has_equal_priors() {
        return Err(Error::Unsupported("unambiguous search assumes equal priors".into()));
    }
    let (a, b) = amplitudes(pair);
    let [u1, u2] = complement(&b);
    let best = (0..grid_resolution)
        .into_par_iter()
        .map(|i| {
            let alpha = PI * i as f64 / grid_resolution as f64;
            let (sa, ca) = alpha.sin_cos();
            let mut row_best = f64::INFINITY;
            for j in 0..grid_resolution {
                let gamma = 2.0 * PI * j as f64 / grid_resolution as f64;
                let e = Complex64::from_polar(sa, gamma);
                let dir = [0, 1, 2].map(|k| u1[k] * ca + u2[k] * e);
                row_best = row_best.min(failure_for_direction(&a, &b, &dir));
            }
            row_best
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}
