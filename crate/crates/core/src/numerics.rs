//! Scalar numerics used throughout the crate: the principal branch of the
//! Lambert W function, bracketed root finding, bounded minimization, central
//! differences and trapezoid quadrature.
//!
//! Everything here is a pure function of its inputs.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// Tolerances shared by the iterative routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_iter: 200,
        }
    }
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::Domain {
                what: "abs_tol",
                value: abs_tol,
                domain: "(0, inf)",
            });
        }
        if !(rel_tol > 0.0) {
            return Err(Error::Domain {
                what: "rel_tol",
                value: rel_tol,
                domain: "(0, inf)",
            });
        }
        if max_iter == 0 {
            return Err(Error::Domain {
                what: "max_iter",
                value: 0.0,
                domain: "[1, inf)",
            });
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_iter,
        })
    }
}

const INV_E: f64 = 1.0 / E;

/// Principal branch W₀ of the Lambert W function restricted to `[-1/e, 0]`.
///
/// Seeds with the branch-point series in `p = sqrt(2(1 + e·y))` and polishes
/// with Halley steps. Inputs within `1e-12` outside the interval are clamped.
pub fn lambert_w0(y: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !(-INV_E - SLACK..=SLACK).contains(&y) {
        return Err(Error::Domain {
            what: "lambert_w0 argument",
            value: y,
            domain: "[-1/e, 0]",
        });
    }
    let y = y.clamp(-INV_E, 0.0);
    if y == 0.0 {
        return Ok(0.0);
    }

    let p = (2.0 * (1.0 + E * y)).max(0.0).sqrt();
    // W near -1/e: -1 + p - p²/3 + 11p³/72 - 43p⁴/540
    let series = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 - p * 43.0 / 540.0)));
    if p < 1e-3 {
        return Ok(series.clamp(-1.0, 0.0));
    }

    let mut w = if p < 0.5 {
        series
    } else {
        // away from the branch point log1p(y) is close enough for Halley
        (y * (1.0 - y)).max(-0.9)
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - y;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w.clamp(-1.0, 0.0))
}

/// Brent's method: inverse quadratic interpolation with a bisection guard.
///
/// The iterate never leaves `[lo, hi]`.
pub fn find_root_bracketed<F>(f: F, lo: f64, hi: f64, cfg: &ToleranceConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..cfg.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 0.5 * (cfg.rel_tol * b.abs() + cfg.abs_tol);
        let half = 0.5 * (c - b);
        if fb.abs() <= cfg.abs_tol * 1e-3 || half.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * half * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * half * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * half * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(half) };
        fb = f(b);
    }
    Err(Error::NonConvergence {
        method: "find_root_bracketed",
        iterations: cfg.max_iter,
    })
}

/// Brent's bounded minimizer (golden section with parabolic steps).
///
/// Assumes `f` is unimodal on `[lo, hi]`; otherwise a local minimum is
/// returned. A minimum at an endpoint is approached to within the tolerance.
pub fn minimize_scalar<F>(f: F, lo: f64, hi: f64, cfg: &ToleranceConfig) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::Domain {
            what: "minimize_scalar interval width",
            value: hi - lo,
            domain: "(0, inf)",
        });
    }
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..cfg.max_iter {
        let mid = 0.5 * (a + b);
        let tol1 = cfg.rel_tol * x.abs() + cfg.abs_tol;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (b - a) {
            return Ok((x, fx));
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(mid - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= mid { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Err(Error::NonConvergence {
        method: "minimize_scalar",
        iterations: cfg.max_iter,
    })
}

/// Symmetric difference quotient. Truncation error is O(h²·f‴).
pub fn central_diff<F>(f: F, x: f64, h: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Step used when the caller has no better choice.
pub fn default_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

/// Composite trapezoid rule on uniformly spaced samples.
pub fn trapezoid_integrate(samples: &[f64], dx: f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    if !(dx > 0.0) {
        return Err(Error::Domain {
            what: "dx",
            value: dx,
            domain: "(0, inf)",
        });
    }
    let n = samples.len();
    let inner: f64 = samples[1..n - 1].iter().sum();
    Ok(dx * (inner + 0.5 * (samples[0] + samples[n - 1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain Newton on w·e^w = y, independent of the seeded Halley path.
    fn newton_w(y: f64, mut w: f64) -> f64 {
        for _ in 0..100 {
            let ew = w.exp();
            w -= (w * ew - y) / (ew * (w + 1.0));
        }
        w
    }

    #[test]
    fn lambert_fixed_points() {
        assert_eq!(lambert_w0(-INV_E).unwrap(), -1.0);
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        let y = -0.75 / E;
        let w = lambert_w0(y).unwrap();
        let oracle = newton_w(y, -0.5);
        assert!((oracle * oracle.exp() - y).abs() < 1e-15);
        assert!((w - oracle).abs() < 1e-13, "{w} vs {oracle}");
        // frozen from the Newton oracle above
        assert!((w - (-0.419_868_600_974_023)).abs() < 1e-12);
    }

    #[test]
    fn lambert_rejects_out_of_domain() {
        assert!(matches!(lambert_w0(-0.5), Err(Error::Domain { .. })));
        assert!(matches!(lambert_w0(0.1), Err(Error::Domain { .. })));
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn lambert_near_branch_point() {
        for k in 1..200 {
            let y = -INV_E + 1e-16 * (k as f64).powi(4);
            let w = lambert_w0(y).unwrap();
            assert!((w * w.exp() - y).abs() <= 1e-12);
            assert!((-1.0..=0.0).contains(&w));
        }
    }

    #[test]
    fn brent_root_examples() {
        let cfg = ToleranceConfig::default();
        let r = find_root_bracketed(|x| x * x - 2.0, 1.0, 2.0, &cfg).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
        let r = find_root_bracketed(|x| x, -1.0, 1.0, &cfg).unwrap();
        assert!(r.abs() < 1e-12);
        assert!(matches!(
            find_root_bracketed(|x| x * x + 1.0, -1.0, 1.0, &cfg),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn brent_reports_non_convergence() {
        let cfg = ToleranceConfig::new(1e-300, 1e-300, 2).unwrap();
        assert!(matches!(
            find_root_bracketed(|x| x.powi(3) - 0.3, 0.0, 1.0, &cfg),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn minimize_quadratic() {
        let cfg = ToleranceConfig::default();
        let (x, fx) = minimize_scalar(|x| (x - 1.0) * (x - 1.0), 0.0, 3.0, &cfg).unwrap();
        assert!((x - 1.0).abs() < 1e-8);
        assert!(fx < 1e-15);
        assert!(minimize_scalar(|x| x, 1.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn minimize_monotone_goes_to_edge() {
        let cfg = ToleranceConfig::default();
        let (x, _) = minimize_scalar(|x| x.exp(), -2.0, 4.0, &cfg).unwrap();
        assert!((x + 2.0).abs() < 1e-8);
    }

    #[test]
    fn central_diff_examples() {
        assert!((central_diff(|x| x * x, 3.0, 1e-4) - 6.0).abs() < 1e-8);
        assert_eq!(central_diff(|_| 4.2, 1.0, 1e-3), 0.0);
        assert!((central_diff(f64::exp, 0.0, 1e-5) - 1.0).abs() < 1e-9);
        assert_eq!(default_step(0.1), 1e-5);
        assert_eq!(default_step(-10.0), 1e-4);
    }

    #[test]
    fn trapezoid_examples() {
        let ones = vec![1.0; 1001];
        assert!((trapezoid_integrate(&ones, 1e-3).unwrap() - 1.0).abs() < 1e-13);
        assert_eq!(trapezoid_integrate(&[0.0, 1.0], 1.0).unwrap(), 0.5);
        let n = 4001;
        let dx = 20.0 / (n - 1) as f64;
        let gauss: Vec<f64> = (0..n)
            .map(|i| {
                let x = -10.0 + i as f64 * dx;
                (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
            })
            .collect();
        assert!((trapezoid_integrate(&gauss, dx).unwrap() - 1.0).abs() < 1e-10);
        assert!(matches!(
            trapezoid_integrate(&[1.0], 1.0),
            Err(Error::TooFewSamples(1))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn lambert_monotone(y1 in -INV_E..0.0f64, y2 in -INV_E..0.0f64) {
                let (lo, hi) = if y1 <= y2 { (y1, y2) } else { (y2, y1) };
                prop_assert!(lambert_w0(lo).unwrap() <= lambert_w0(hi).unwrap());
            }

            #[test]
            fn root_stays_in_bracket(c in -0.99..0.99f64, lo in -3.0..-1.0f64, hi in 1.0..3.0f64) {
                let cfg = ToleranceConfig::default();
                let x = find_root_bracketed(|x| (x - c).powi(3) + 0.1 * (x - c), lo, hi, &cfg).unwrap();
                prop_assert!(x >= lo && x <= hi);
                prop_assert!((x - c).abs() < 1e-9);
            }

            #[test]
            fn trapezoid_exact_on_linear(slope in -5.0..5.0f64, icpt in -5.0..5.0f64, n in 2usize..300) {
                let dx = 1.0 / (n - 1) as f64;
                let ys: Vec<f64> = (0..n).map(|i| slope * i as f64 * dx + icpt).collect();
                let exact = 0.5 * slope + icpt;
                prop_assert!((trapezoid_integrate(&ys, dx).unwrap() - exact).abs() < 1e-12);
            }
        }
    }
}
