//! Closed-form Fisher information for the separation `s`.
//!
//! All expressions are evaluated in the dimensionless separation `u = s/σ`
//! and scaled by `1/σ²` on output. Differences such as `c·e^{u²/8} − k` are
//! rewritten as `c·expm1(u²/8) + (sum of squares)` so that no subtraction of
//! nearly equal quantities happens near `s = 0`.

use std::f64::consts::E;

use crate::error::Result;
use crate::model::{AnalyzerBasis, SourceModel};
use crate::numerics::{find_root_bracketed, lambert_w0, minimize_scalar, ToleranceConfig};

/// Squared-bracket values at or below this are treated as exactly zero when
/// deciding which `s → 0` limit applies.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Gate below which the first denominator switches to its second-order series.
const SERIES_GATE: f64 = 1e-10;

/// Which expression produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceTag {
    /// Entangled field, general `(r, α, φ)`.
    Entangled,
    /// Unentangled pure superposition of the two sources.
    Unentangled,
    /// Entangled field with balanced sources.
    Balanced,
    /// Entangled field at `α = π/4`, parameterized by `η = atan r`.
    UnbalanceAngle,
    /// First-principles grid evaluation.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiSample {
    pub s: f64,
    pub f: f64,
    pub source_tag: SourceTag,
}

/// Pieces of the entangled-field expression at `u = 0`.
struct EntangledTerms {
    k: f64,
    c1: f64,
    c2: f64,
    /// `c1 − k` as a sum of squares.
    g1: f64,
    /// `c2 + k` as a sum of squares.
    g2: f64,
}

impl EntangledTerms {
    fn new(model: &SourceModel, basis: &AnalyzerBasis) -> Self {
        let r = model.r();
        let (sa, ca) = basis.alpha.sin_cos();
        let (sp, cp) = model.phi().sin_cos();
        let k = r * (2.0 * basis.alpha).sin() * cp;
        Self {
            k,
            c1: ca * ca + r * r * sa * sa,
            c2: r * r * ca * ca + sa * sa,
            g1: (ca - r * sa * cp).powi(2) + (r * sa * sp).powi(2),
            g2: (r * ca + sa * cp).powi(2) + (sa * sp).powi(2),
        }
    }

    /// Dimensionless limit of the subtracted term at `u → 0`.
    fn limit0(&self) -> f64 {
        let k2 = self.k * self.k;
        if self.g1 <= DEGENERATE_TOL {
            k2 / (2.0 * self.c1 * self.g2)
        } else if self.g2 <= DEGENERATE_TOL {
            k2 / (2.0 * self.c2 * self.g1)
        } else {
            0.0
        }
    }
}

/// Fisher information of the entangled field, weighted over both partner
/// outcomes.
pub fn f_tot(model: &SourceModel, basis: &AnalyzerBasis, s: f64) -> f64 {
    let scale = 1.0 / (model.sigma() * model.sigma());
    let terms = EntangledTerms::new(model, basis);
    if terms.k == 0.0 {
        return 0.25 * scale;
    }
    let u = s / model.sigma();
    let t = u * u / 8.0;
    if t == 0.0 {
        return (0.25 - terms.limit0()) * scale;
    }
    let em = t.exp_m1();
    let mut d1 = terms.c1 * em + terms.g1;
    if d1 < SERIES_GATE {
        d1 = terms.c1 * t * (1.0 + 0.5 * t) + terms.g1;
    }
    let d2 = terms.c2 * em + terms.g2;
    let subtracted = terms.k * terms.k * t / (2.0 * d1 * d2);
    ((0.25 - subtracted) * scale).max(0.0)
}

/// `lim_{s→0} f_tot`.
///
/// Generic parameters give `1/(4σ²)`. When one branch is fully destructive
/// at coincidence (`tan α = 1/r` with `φ ∈ {0, π}`) the limit drops to
/// `cos²(2η)/(4σ²)`, which vanishes only for balanced sources.
pub fn f_tot_limit0(model: &SourceModel, basis: &AnalyzerBasis) -> f64 {
    let terms = EntangledTerms::new(model, basis);
    (0.25 - terms.limit0()) / (model.sigma() * model.sigma())
}

/// Fisher information of the unentangled superposition `a|h₊⟩ + b e^{iφ}|h₋⟩`.
pub fn f_unentangled(model: &SourceModel, s: f64) -> f64 {
    f_unentangled_sample(model, s).0
}

/// As [`f_unentangled`], also reporting whether the `0/0` limit at
/// `s = 0, r = 1, φ = π` was substituted.
pub fn f_unentangled_sample(model: &SourceModel, s: f64) -> (f64, bool) {
    let scale = 1.0 / (model.sigma() * model.sigma());
    let (a, b) = (model.a(), model.b());
    let (sp, cp) = model.phi().sin_cos();
    let p = -2.0 * a * b * cp;
    if p == 0.0 {
        return (0.25 * scale, false);
    }
    // q = 1 + 2ab cos φ
    let mut q = (a + b * cp).powi(2) + (b * sp).powi(2);
    if q <= 1e-14 {
        q = 0.0;
    }
    let u = s / model.sigma();
    let t = u * u / 8.0;
    let delta = (-t).exp();
    let m = -(-t).exp_m1();
    let denom = q + p * m;
    if denom == 0.0 {
        // numerator ~ t³/3 against denominator ~ 4t²
        return (0.0, true);
    }
    let sinh_minus = if t < 1e-2 {
        let t2 = t * t;
        t * t2 * (1.0 / 6.0 + t2 * (1.0 / 120.0 + t2 / 5040.0))
    } else {
        t.sinh() - t
    };
    let g = 2.0 * delta * sinh_minus;
    // 1 + p = 1 − 2ab cos φ
    let one_plus_p = (a - b * cp).powi(2) + (b * sp).powi(2);
    let numer = g + q * delta * delta * one_plus_p + 2.0 * q * delta * t;
    (numer / (4.0 * denom * denom) * scale, false)
}

/// Shared form of the balanced-source and `α = π/4` reductions.
fn reduced_form(angle: f64, phi: f64, sigma: f64, s: f64) -> f64 {
    let scale = 1.0 / (sigma * sigma);
    let (s2, c2) = (2.0 * angle).sin_cos();
    let (sp, cp) = phi.sin_cos();
    let coupling = s2 * s2 * cp * cp;
    if coupling == 0.0 {
        return 0.25 * scale;
    }
    // 1 − sin²2θ cos²φ
    let gap = c2 * c2 + s2 * s2 * sp * sp;
    let u = s / sigma;
    let t = u * u / 8.0;
    let subtracted = if t == 0.0 {
        if gap <= DEGENERATE_TOL {
            0.25 * coupling
        } else {
            0.0
        }
    } else {
        let mut den = (2.0 * t).exp_m1() + gap;
        if den < SERIES_GATE {
            den = 2.0 * t * (1.0 + t) + gap;
        }
        coupling * t / (2.0 * den)
    };
    ((0.25 - subtracted) * scale).max(0.0)
}

/// Entangled-field information for balanced sources (`r = 1`).
pub fn f_balanced(alpha: f64, phi: f64, sigma: f64, s: f64) -> f64 {
    reduced_form(alpha, phi, sigma, s)
}

/// Entangled-field information at `α = π/4` in terms of `η = atan r`.
/// Same function of `η` as [`f_balanced`] is of `α`.
pub fn f_eta(eta: f64, phi: f64, sigma: f64, s: f64) -> f64 {
    reduced_form(eta, phi, sigma, s)
}

/// Residual `Λ e^{u²/4} + Π e^{u²/8} + Ω` whose nontrivial root is the
/// stationary point of `f_tot`.
pub fn characteristic_residual(model: &SourceModel, basis: &AnalyzerBasis, s: f64) -> f64 {
    let (a, b) = (model.a(), model.b());
    let (sa, ca) = basis.alpha.sin_cos();
    let u2 = (s / model.sigma()).powi(2);
    let w1 = a * a * ca * ca + b * b * sa * sa;
    let w2 = b * b * ca * ca + a * a * sa * sa;
    let coupling = a * b * (2.0 * basis.alpha).sin() * model.phi().cos();
    let lambda = w1 * w2 * (1.0 - 2.0 * u2 / 8.0);
    let pi = (2.0 * w1 - 1.0) * (1.0 - u2 / 8.0) * coupling;
    let omega = -coupling * coupling;
    lambda * (u2 / 4.0).exp() + pi * (u2 / 8.0).exp() + omega
}

/// Least resolvable separation for balanced sources via Lambert W.
pub fn s_least_analytic(alpha: f64, phi: f64, sigma: f64) -> f64 {
    let coupling = ((2.0 * alpha).sin() * phi.cos()).powi(2);
    let arg = (-coupling / E).max(-1.0 / E);
    let w = lambert_w0(arg).expect("argument lies in [-1/e, 0]");
    sigma * (4.0 + 4.0 * w).max(0.0).sqrt()
}

/// Result of the numerical search for the dip of `f_tot`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SLeast {
    pub s: f64,
    pub f_min: f64,
    /// `false` when the curve has no dip inside the search interval.
    pub interior: bool,
}

const SCAN_POINTS: usize = 600;

/// Locates the interior minimum of `f_tot` on `(1e-6σ, search_hi]`.
///
/// A coarse scan picks the bracket, Brent's minimizer refines it, and the
/// result is polished on the characteristic residual when that brackets a
/// root. A flat or nondecreasing curve yields `(0, f_tot_limit0)`.
pub fn s_least_numeric(model: &SourceModel, basis: &AnalyzerBasis, search_hi: Option<f64>) -> Result<SLeast> {
    let sigma = model.sigma();
    let lo = 1e-6 * sigma;
    let hi = search_hi.unwrap_or(6.0 * sigma);
    let f = |s: f64| f_tot(model, basis, s);

    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&s| f(s)).collect();
    let (imin, &fmin) = values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("scan is nonempty");

    let flat_tol = 1e-14 / (sigma * sigma);
    if imin == 0 || values[0] - fmin <= flat_tol {
        return Ok(SLeast {
            s: 0.0,
            f_min: f_tot_limit0(model, basis),
            interior: false,
        });
    }
    if imin == SCAN_POINTS - 1 {
        return Ok(SLeast {
            s: hi,
            f_min: fmin,
            interior: false,
        });
    }

    let cfg = ToleranceConfig::new(1e-12 * sigma, 1e-10, 500)?;
    let (mut s, mut fs) = minimize_scalar(f, grid[imin - 1], grid[imin + 1], &cfg)?;

    let width = 1e-5 * sigma;
    let resid = |x: f64| characteristic_residual(model, basis, x);
    let (rl, rh) = (resid(s - width), resid(s + width));
    if rl.signum() != rh.signum() {
        let tight = ToleranceConfig::new(1e-15 * sigma, 1e-15, 200)?;
        let polished = find_root_bracketed(resid, s - width, s + width, &tight)?;
        let fp = f(polished);
        if fp <= fs + 1e-15 {
            s = polished;
            fs = fp;
        }
    }
    Ok(SLeast {
        s,
        f_min: fs,
        interior: true,
    })
}
