//! Monte-Carlo Cramér–Rao experiment.
//!
//! Each repetition measures the partner in the rotated basis (branch 1 or 2)
//! and the photon position `x`. The joint density of the outcome is
//! `pᵢ(x; s) = |hᵢ(x; s)|²`, which integrates to the branch weight `nᵢ`.
//!
//! Positions are drawn by rejection from the two-Gaussian envelope
//! `(|c₊| + |c₋|)(|c₊| ψ₊² + |c₋| ψ₋²) ≥ |c₊ψ₊ + c₋ψ₋|²`, whose acceptance
//! rate is `nᵢ / (|c₊| + |c₋|)²`. That is 1 for a single source and about
//! 0.13 for the destructive branch at `r = 1, α = π/6, s = σ`; it tends to 0
//! only for a fully destructive branch, which is then almost never selected.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fisher::f_tot;
use crate::model::{
    branch_coefficients, branch_decomposition, AnalyzerBasis, BranchCoefficients, SourceModel,
};
use crate::numerics::{minimize_scalar, ToleranceConfig};
use crate::oracle::{classical_fi_position, psi_amplitude, Grid, DEFAULT_STEP};

const PRESCAN_POINTS: usize = 64;
const DENSITY_FLOOR: f64 = 1e-300;
const STALL_ACCEPTANCE: f64 = 1e-3;
const STALL_MIN_ATTEMPTS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    B1,
    B2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub branch: Branch,
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrbReport {
    pub s_true: f64,
    pub trials: usize,
    pub samples_per_trial: usize,
    pub mean_estimate: f64,
    pub variance: f64,
    /// Information of the simulated (branch, position) measurement.
    pub f_classical: f64,
    /// Weighted branch information from the closed form.
    pub f_tot: f64,
    /// `1/(M·F_cl)`.
    pub crb_classical: f64,
    /// `1/(M·F_tot)`.
    pub crb_paper: f64,
    /// `crb_classical / variance`.
    pub efficiency: f64,
}

/// Joint outcome density for one branch, as a function of `(x, s)`.
#[derive(Debug, Clone, Copy)]
struct BranchDensity {
    coeffs: BranchCoefficients,
    sigma: f64,
}

impl BranchDensity {
    fn eval(&self, x: f64, s: f64) -> f64 {
        (self.coeffs.plus * psi_amplitude(x, 0.5 * s, self.sigma)
            + self.coeffs.minus * psi_amplitude(x, -0.5 * s, self.sigma))
        .norm_sqr()
    }
}

fn densities(model: &SourceModel, basis: &AnalyzerBasis) -> [BranchDensity; 2] {
    let (b1, b2) = branch_coefficients(model, basis);
    [b1, b2].map(|coeffs| BranchDensity {
        coeffs,
        sigma: model.sigma(),
    })
}

struct Sampler {
    attempts: u64,
    accepted: u64,
}

impl Sampler {
    fn draw_position<R: Rng>(&mut self, rng: &mut R, density: &BranchDensity, s: f64) -> Result<f64> {
        let wp = density.coeffs.plus.norm();
        let wm = density.coeffs.minus.norm();
        let total = wp + wm;
        let sigma = density.sigma;
        loop {
            self.attempts += 1;
            let center = if rng.gen::<f64>() * total < wp {
                0.5 * s
            } else {
                -0.5 * s
            };
            let z: f64 = rng.sample(StandardNormal);
            let x = center + sigma * z;
            let envelope = total
                * (wp * psi_amplitude(x, 0.5 * s, sigma).powi(2)
                    + wm * psi_amplitude(x, -0.5 * s, sigma).powi(2));
            if rng.gen::<f64>() * envelope <= density.eval(x, s) {
                self.accepted += 1;
                return Ok(x);
            }
            if self.attempts >= STALL_MIN_ATTEMPTS {
                let acceptance = self.accepted as f64 / self.attempts as f64;
                if acceptance < STALL_ACCEPTANCE {
                    return Err(Error::RejectionStall {
                        acceptance,
                        attempts: self.attempts,
                    });
                }
            }
        }
    }
}

/// Draws `m` independent outcomes at separation `s_true`; deterministic in
/// `seed`.
pub fn sample_outcomes(
    model: &SourceModel,
    basis: &AnalyzerBasis,
    s_true: f64,
    m: usize,
    seed: u64,
) -> Result<Vec<Outcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = branch_decomposition(model, basis, s_true);
    let dens = densities(model, basis);
    let mut sampler = Sampler {
        attempts: 0,
        accepted: 0,
    };
    (0..m)
        .map(|_| {
            let branch = if rng.gen::<f64>() * (weights.n1 + weights.n2) < weights.n1 {
                Branch::B1
            } else {
                Branch::B2
            };
            let d = &dens[branch as usize];
            let x = sampler.draw_position(&mut rng, d, s_true)?;
            Ok(Outcome { branch, x })
        })
        .collect()
}

/// `Σ log pᵢ(x; s)` over the outcomes, densities floored at 1e-300.
pub fn log_likelihood(outcomes: &[Outcome], model: &SourceModel, basis: &AnalyzerBasis, s: f64) -> f64 {
    let dens = densities(model, basis);
    outcomes
        .iter()
        .map(|o| dens[o.branch as usize].eval(o.x, s).max(DENSITY_FLOOR).ln())
        .sum()
}

/// Maximum-likelihood separation inside `window`: a 64-point scan picks the
/// bracket, Brent's minimizer on `−log L` refines it.
pub fn mle_estimate(
    outcomes: &[Outcome],
    model: &SourceModel,
    basis: &AnalyzerBasis,
    window: (f64, f64),
) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::Domain {
            what: "MLE window width",
            value: hi - lo,
            domain: "(0, inf)",
        });
    }
    let neg = |s: f64| -log_likelihood(outcomes, model, basis, s);
    let step = (hi - lo) / (PRESCAN_POINTS - 1) as f64;
    let best = (0..PRESCAN_POINTS)
        .map(|j| (j, neg(lo + j as f64 * step)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(j, _)| j)
        .expect("prescan is nonempty");
    let a = lo + best.saturating_sub(1) as f64 * step;
    let b = (lo + (best + 1) as f64 * step).min(hi);
    let cfg = ToleranceConfig::new(1e-10 * model.sigma(), 1e-10, 500)?;
    let (s, _) = minimize_scalar(neg, a, b, &cfg)?;
    let edge_tol = 1e-6 * model.sigma();
    if s - lo < edge_tol || hi - s < edge_tol {
        log::warn!("MLE {s} sits on the edge of the window [{lo}, {hi}]");
    }
    Ok(s)
}

/// Runs `trials` independent experiments of `m` repetitions each. Trial `t`
/// uses seed `seed + t`.
pub fn crb_experiment(
    model: &SourceModel,
    basis: &AnalyzerBasis,
    s_true: f64,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<CrbReport> {
    if trials < 2 {
        return Err(Error::Domain {
            what: "trials",
            value: trials as f64,
            domain: "[2, inf)",
        });
    }
    if m == 0 {
        return Err(Error::Domain {
            what: "samples per trial",
            value: 0.0,
            domain: "[1, inf)",
        });
    }
    let window = (0.0, 6.0 * model.sigma());
    let estimates: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let outcomes = sample_outcomes(model, basis, s_true, m, seed.wrapping_add(t))?;
            mle_estimate(&outcomes, model, basis, window)
        })
        .collect::<Result<_>>()?;

    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let variance = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);

    let grid = Grid::default_for(model.sigma(), s_true);
    let f_classical = classical_fi_position(model, basis, s_true, &grid, DEFAULT_STEP * model.sigma())?;
    let f_paper = f_tot(model, basis, s_true);
    let crb_classical = 1.0 / (m as f64 * f_classical);
    Ok(CrbReport {
        s_true,
        trials,
        samples_per_trial: m,
        mean_estimate: mean,
        variance,
        f_classical,
        f_tot: f_paper,
        crb_classical,
        crb_paper: 1.0 / (m as f64 * f_paper),
        efficiency: crb_classical / variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::central_diff;
    use crate::oracle::branch_wavefunction;
    use std::f64::consts::FRAC_PI_6;

    fn model(r: f64) -> SourceModel {
        SourceModel::new(1.0, r, 0.0).unwrap()
    }

    #[test]
    fn single_source_outcomes() {
        let m = 20_000;
        let out = sample_outcomes(&model(0.0), &AnalyzerBasis::new(0.0), 1.0, m, 7).unwrap();
        assert!(out.iter().all(|o| o.branch == Branch::B1));
        let mean = out.iter().map(|o| o.x).sum::<f64>() / m as f64;
        assert!((mean - 0.5).abs() < 3.0 / (m as f64).sqrt());
    }

    #[test]
    fn sampling_is_deterministic() {
        let (md, b) = (model(1.0), AnalyzerBasis::new(FRAC_PI_6));
        let a = sample_outcomes(&md, &b, 1.0, 500, 99).unwrap();
        let c = sample_outcomes(&md, &b, 1.0, 500, 99).unwrap();
        assert_eq!(a, c);
        assert_ne!(a, sample_outcomes(&md, &b, 1.0, 500, 100).unwrap());
    }

    #[test]
    fn branch_frequencies_follow_weights() {
        let (md, b) = (model(1.0), AnalyzerBasis::new(FRAC_PI_6));
        let m = 100_000;
        let out = sample_outcomes(&md, &b, 1.0, m, 3).unwrap();
        let k1 = out.iter().filter(|o| o.branch == Branch::B1).count() as f64;
        let d = branch_decomposition(&md, &b, 1.0);
        let (e1, e2) = (d.n1 * m as f64, d.n2 * m as f64);
        let chi2 = (k1 - e1).powi(2) / e1 + ((m as f64 - k1) - e2).powi(2) / e2;
        // 1 degree of freedom, p = 0.001
        assert!(chi2 < 10.83, "chi2 = {chi2}");
    }

    #[test]
    fn positions_follow_branch_density() {
        let (md, b) = (model(1.0), AnalyzerBasis::new(FRAC_PI_6));
        let s = 1.0;
        let out = sample_outcomes(&md, &b, s, 100_000, 11).unwrap();
        let grid = Grid::default_for(1.0, s);
        let (c1, c2) = branch_coefficients(&md, &b);
        for (branch, coeffs) in [(Branch::B1, c1), (Branch::B2, c2)] {
            let dens: Vec<f64> = branch_wavefunction(&coeffs, 1.0, s, &grid)
                .iter()
                .map(|z| z.norm_sqr())
                .collect();
            let dx = grid.dx();
            let mut cdf = vec![0.0; dens.len()];
            for j in 1..dens.len() {
                cdf[j] = cdf[j - 1] + 0.5 * dx * (dens[j] + dens[j - 1]);
            }
            let total = cdf[cdf.len() - 1];
            let mut xs: Vec<f64> = out.iter().filter(|o| o.branch == branch).map(|o| o.x).collect();
            xs.sort_by(f64::total_cmp);
            let n = xs.len() as f64;
            let ks = xs
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let pos = ((x - grid.x_lo) / dx).clamp(0.0, (dens.len() - 1) as f64);
                    let j = (pos.floor() as usize).min(dens.len() - 2);
                    let frac = pos - j as f64;
                    let f = (cdf[j] + frac * (cdf[j + 1] - cdf[j])) / total;
                    (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
                })
                .fold(0.0, f64::max);
            assert!(ks < 0.01, "KS distance {ks} for {branch:?}");
        }
    }

    #[test]
    fn stall_is_reported() {
        let mut sampler = Sampler {
            attempts: STALL_MIN_ATTEMPTS,
            accepted: 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // a zero density never accepts
        let dead = BranchDensity {
            coeffs: BranchCoefficients {
                plus: 1.0.into(),
                minus: (-1.0).into(),
            },
            sigma: 1.0,
        };
        assert!(matches!(
            sampler.draw_position(&mut rng, &dead, 0.0),
            Err(Error::RejectionStall { .. })
        ));
    }

    #[test]
    fn single_outcome_mle_is_twice_position() {
        let (md, b) = (model(0.0), AnalyzerBasis::new(0.0));
        let out = [Outcome {
            branch: Branch::B1,
            x: 0.8,
        }];
        let s = mle_estimate(&out, &md, &b, (0.0, 6.0)).unwrap();
        assert!((s - 1.6).abs() < 1e-6);
    }

    #[test]
    fn likelihood_ignores_order() {
        let (md, b) = (model(1.0), AnalyzerBasis::new(FRAC_PI_6));
        let mut out = sample_outcomes(&md, &b, 1.0, 200, 5).unwrap();
        let l1 = log_likelihood(&out, &md, &b, 0.9);
        out.reverse();
        let l2 = log_likelihood(&out, &md, &b, 0.9);
        assert!((l1 - l2).abs() < 1e-9 * l1.abs());
        assert!(log_likelihood(&out, &md, &b, 40.0).is_finite());
    }

    #[test]
    fn score_has_zero_mean() {
        let (md, b) = (model(1.0), AnalyzerBasis::new(FRAC_PI_6));
        let m = 10_000;
        let out = sample_outcomes(&md, &b, 1.0, m, 17).unwrap();
        let score = central_diff(|s| log_likelihood(&out, &md, &b, s), 1.0, 1e-5);
        let grid = Grid::default_for(1.0, 1.0);
        let fcl = classical_fi_position(&md, &b, 1.0, &grid, 1e-4).unwrap();
        assert!(score.abs() < 3.0 * (m as f64 * fcl).sqrt(), "score {score}");
    }

    #[test]
    fn mle_examples() {
        let (md, b) = (model(1.0), AnalyzerBasis::new(FRAC_PI_6));
        let m = 1000;
        let out = sample_outcomes(&md, &b, 1.0, m, 2024).unwrap();
        let grid = Grid::default_for(1.0, 1.0);
        let fcl = classical_fi_position(&md, &b, 1.0, &grid, 1e-4).unwrap();
        let s = mle_estimate(&out, &md, &b, (0.0, 6.0)).unwrap();
        assert!((s - 1.0).abs() < 5.0 / (m as f64 * fcl).sqrt());

        let doubled: Vec<Outcome> = out.iter().chain(&out).copied().collect();
        let s2 = mle_estimate(&doubled, &md, &b, (0.0, 6.0)).unwrap();
        // the optimum is resolved to ~sqrt(eps·|log L| / (M·F))
        assert!((s - s2).abs() < 1e-6);

        let (m0, b0) = (model(0.0), AnalyzerBasis::new(0.0));
        let out = sample_outcomes(&m0, &b0, 1.0, m, 8).unwrap();
        let mean = out.iter().map(|o| o.x).sum::<f64>() / m as f64;
        let s = mle_estimate(&out, &m0, &b0, (0.0, 6.0)).unwrap();
        assert!((s - 2.0 * mean).abs() < 1e-7);
    }

    #[test]
    fn single_source_variance() {
        let m = 200;
        let rep = crb_experiment(&model(0.0), &AnalyzerBasis::new(0.0), 1.0, m, 2000, 1).unwrap();
        let expected = 4.0 / m as f64;
        assert!(
            (rep.variance / expected - 1.0).abs() < 0.1,
            "{}",
            rep.variance / expected
        );
        assert!((rep.f_classical - 0.25).abs() < 1e-6);
    }

    #[test]
    fn experiment_is_deterministic() {
        let (md, b) = (model(1.0), AnalyzerBasis::new(FRAC_PI_6));
        let a = crb_experiment(&md, &b, 1.0, 100, 20, 9).unwrap();
        let c = crb_experiment(&md, &b, 1.0, 100, 20, 9).unwrap();
        assert_eq!(a, c);
        assert!(crb_experiment(&md, &b, 1.0, 100, 1, 9).is_err());
    }
}
