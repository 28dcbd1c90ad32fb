//! First-principles Fisher information on a spatial grid.
//!
//! Each conditional branch is sampled as a complex wavefunction, normalized
//! independently at `s ± h`, and `F = 2 Tr[(∂ₛρ)²]` is evaluated from inner
//! products of the sampled vectors. Nothing here uses the closed forms in
//! [`crate::fisher`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{branch_coefficients, weight_derivative, AnalyzerBasis, BranchCoefficients, SourceModel};
use crate::numerics::trapezoid_integrate;

/// Weights below this are treated as an unpopulated branch.
pub const MIN_BRANCH_WEIGHT: f64 = 1e-10;

/// Default finite-difference step in units of σ.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Default number of grid points.
pub const DEFAULT_POINTS: usize = 4001;

const RICHARDSON_WARN: f64 = 1e-5;

/// Uniform symmetric sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x_lo: f64, x_hi: f64, n: usize) -> Result<Self> {
        if n < 101 || n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be odd and at least 101"
            )));
        }
        if !(x_hi > x_lo) {
            return Err(Error::InvalidGrid(format!("empty interval [{x_lo}, {x_hi}]")));
        }
        Ok(Self { x_lo, x_hi, n })
    }

    /// `[-(8σ + s), 8σ + s]` with `n` points.
    pub fn with_points(sigma: f64, s: f64, n: usize) -> Result<Self> {
        let half = 8.0 * sigma + s.abs();
        Self::new(-half, half, n)
    }

    pub fn default_for(sigma: f64, s: f64) -> Self {
        Self::with_points(sigma, s, DEFAULT_POINTS).expect("default grid is valid")
    }

    pub fn dx(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.n - 1) as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let dx = self.dx();
        (0..self.n).map(move |i| self.x_lo + i as f64 * dx)
    }

    /// Checks width `≥ 16σ + 2s` and spacing `≤ σ/20`.
    pub fn check_resolution(&self, sigma: f64, s: f64) -> Result<()> {
        let need = 16.0 * sigma + 2.0 * s.abs();
        if self.x_hi - self.x_lo < need * (1.0 - 1e-12) {
            return Err(Error::InvalidGrid(format!(
                "width {} is below 16σ + 2s = {need}",
                self.x_hi - self.x_lo
            )));
        }
        if self.dx() > sigma / 20.0 * (1.0 + 1e-12) {
            return Err(Error::InvalidGrid(format!(
                "spacing {} exceeds σ/20 = {}; grid convergence is not guaranteed",
                self.dx(),
                sigma / 20.0
            )));
        }
        Ok(())
    }
}

/// Sampled branch wavefunctions and their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub psi1: Vec<Complex64>,
    pub psi2: Vec<Complex64>,
    pub n1: f64,
    pub n2: f64,
}

/// Unit-norm Gaussian amplitude centred at `center`.
pub fn psi_amplitude(x: f64, center: f64, sigma: f64) -> f64 {
    let z = x - center;
    (2.0 * PI * sigma * sigma).powf(-0.25) * (-z * z / (4.0 * sigma * sigma)).exp()
}

/// `c₊ ψ(x − s/2) + c₋ ψ(x + s/2)` on the grid.
pub fn branch_wavefunction(coeffs: &BranchCoefficients, sigma: f64, s: f64, grid: &Grid) -> Vec<Complex64> {
    let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
    let inv = 1.0 / (4.0 * sigma * sigma);
    let (cp, cm) = (coeffs.plus * norm, coeffs.minus * norm);
    grid.points()
        .map(|x| {
            let (zp, zm) = (x - 0.5 * s, x + 0.5 * s);
            cp * (-zp * zp * inv).exp() + cm * (-zm * zm * inv).exp()
        })
        .collect()
}

/// Trapezoid `⟨f|g⟩`.
pub fn inner(f: &[Complex64], g: &[Complex64], dx: f64) -> Complex64 {
    debug_assert_eq!(f.len(), g.len());
    let n = f.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, (a, b)) in f.iter().zip(g).enumerate() {
        let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        acc += a.conj() * b * w;
    }
    acc * dx
}

fn norm_sqr(f: &[Complex64], dx: f64) -> f64 {
    let dens: Vec<f64> = f.iter().map(|z| z.norm_sqr()).collect();
    trapezoid_integrate(&dens, dx).expect("grid has at least 101 points")
}

pub fn grid_state(model: &SourceModel, basis: &AnalyzerBasis, s: f64, grid: &Grid) -> Result<GridState> {
    let sigma = model.sigma();
    grid.check_resolution(sigma, s)?;
    let (b1, b2) = branch_coefficients(model, basis);
    let psi1 = branch_wavefunction(&b1, sigma, s, grid);
    let psi2 = branch_wavefunction(&b2, sigma, s, grid);

    let peak = psi1.iter().chain(&psi2).map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if peak > 0.0 {
        let edge = [psi1[0], psi1[grid.n - 1], psi2[0], psi2[grid.n - 1]]
            .iter()
            .map(|z| z.norm_sqr())
            .fold(0.0, f64::max);
        if edge > 1e-12 * peak {
            return Err(Error::GridTooNarrow { ratio: edge / peak });
        }
    }
    let dx = grid.dx();
    Ok(GridState {
        n1: norm_sqr(&psi1, dx),
        n2: norm_sqr(&psi2, dx),
        psi1,
        psi2,
    })
}

/// Weight and normalized-state information of one branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchInfo {
    pub weight: f64,
    /// `None` when the branch weight is below [`MIN_BRANCH_WEIGHT`].
    pub fi: Option<f64>,
}

fn normalized(coeffs: &BranchCoefficients, sigma: f64, s: f64, grid: &Grid) -> Vec<Complex64> {
    let mut v = branch_wavefunction(coeffs, sigma, s, grid);
    let n = norm_sqr(&v, grid.dx()).sqrt();
    v.iter_mut().for_each(|z| *z /= n);
    v
}

/// `2 Tr[Δρ²]` with `Δρ = (ρ(s+h) − ρ(s−h))/2h`.
///
/// With `m = (u₊ + u₋)/2`, `d = (u₊ − u₋)/2` the difference is
/// `(|m⟩⟨d| + |d⟩⟨m|)/h`, so `Tr[Δρ²] = 2(⟨m|m⟩⟨d|d⟩ + Re⟨d|m⟩²)/h²`.
fn fd_information(coeffs: &BranchCoefficients, sigma: f64, s: f64, grid: &Grid, h: f64) -> f64 {
    let up = normalized(coeffs, sigma, s + h, grid);
    let um = normalized(coeffs, sigma, s - h, grid);
    let m: Vec<Complex64> = up.iter().zip(&um).map(|(p, q)| 0.5 * (p + q)).collect();
    let d: Vec<Complex64> = up.iter().zip(&um).map(|(p, q)| 0.5 * (p - q)).collect();
    let dx = grid.dx();
    let mm = inner(&m, &m, dx).re;
    let dd = inner(&d, &d, dx).re;
    let dm = inner(&d, &m, dx);
    let trace = 2.0 * (mm * dd + (dm * dm).re) / (h * h);
    2.0 * trace
}

fn richardson<F: Fn(f64) -> f64>(f: F, h: f64, what: &str) -> f64 {
    let coarse = f(h);
    let fine = f(0.5 * h);
    let scale = fine.abs().max(1e-12);
    if (fine - coarse).abs() > RICHARDSON_WARN * scale {
        log::warn!(
            "{what}: step {h} disagrees with {} by {:e} relative",
            0.5 * h,
            (fine - coarse).abs() / scale
        );
    }
    (4.0 * fine - coarse) / 3.0
}

/// Information of the normalized pure state built from `coeffs`.
pub fn branch_information(
    coeffs: &BranchCoefficients,
    sigma: f64,
    s: f64,
    grid: &Grid,
    h: f64,
) -> Result<BranchInfo> {
    if !(h > 0.0) {
        return Err(Error::Domain {
            what: "finite-difference step",
            value: h,
            domain: "(0, inf)",
        });
    }
    let weight = norm_sqr(&branch_wavefunction(coeffs, sigma, s, grid), grid.dx());
    if weight < MIN_BRANCH_WEIGHT {
        return Ok(BranchInfo { weight, fi: None });
    }
    let fi = richardson(
        |step| fd_information(coeffs, sigma, s, grid, step),
        h,
        "branch information",
    );
    Ok(BranchInfo { weight, fi: Some(fi) })
}

/// Per-branch information `(F₁, F₂)`; an unpopulated branch reports 0.
pub fn fi_branch_numeric(
    model: &SourceModel,
    basis: &AnalyzerBasis,
    s: f64,
    grid: &Grid,
    h: f64,
) -> Result<(f64, f64)> {
    let (i1, i2) = branches(model, basis, s, grid, h)?;
    Ok((i1.fi.unwrap_or(0.0), i2.fi.unwrap_or(0.0)))
}

fn branches(
    model: &SourceModel,
    basis: &AnalyzerBasis,
    s: f64,
    grid: &Grid,
    h: f64,
) -> Result<(BranchInfo, BranchInfo)> {
    grid.check_resolution(model.sigma(), s)?;
    let (b1, b2) = branch_coefficients(model, basis);
    Ok((
        branch_information(&b1, model.sigma(), s, grid, h)?,
        branch_information(&b2, model.sigma(), s, grid, h)?,
    ))
}

/// Weighted total `N₁F₁ + N₂F₂`.
pub fn f_tot_numeric(model: &SourceModel, basis: &AnalyzerBasis, s: f64, grid: &Grid, h: f64) -> Result<f64> {
    let (i1, i2) = branches(model, basis, s, grid, h)?;
    Ok([i1, i2].iter().map(|b| b.fi.map_or(0.0, |f| b.weight * f)).sum())
}

/// Information of the unentangled pure state `a|h₊⟩ + b e^{iφ}|h₋⟩`.
pub fn f_unentangled_numeric(model: &SourceModel, s: f64, grid: &Grid, h: f64) -> Result<f64> {
    grid.check_resolution(model.sigma(), s)?;
    let coeffs = BranchCoefficients {
        plus: Complex64::new(model.a(), 0.0),
        minus: Complex64::from_polar(model.b(), model.phi()),
    };
    let info = branch_information(&coeffs, model.sigma(), s, grid, h)?;
    Ok(info.fi.unwrap_or(0.0))
}

/// Classical information carried by the branch weights, `Σ (∂ₛnᵢ)²/nᵢ`.
/// Not part of the weighted total.
pub fn f_weights(model: &SourceModel, basis: &AnalyzerBasis, s: f64, h: f64) -> f64 {
    let d = crate::model::branch_decomposition(model, basis, s);
    let (dn1, dn2) = weight_derivative(model, basis, s, h);
    [(d.n1, dn1), (d.n2, dn2)]
        .iter()
        .filter(|(n, _)| *n > MIN_BRANCH_WEIGHT)
        .map(|(n, dn)| dn * dn / n)
        .sum()
}

fn position_information(coeffs: &BranchCoefficients, sigma: f64, s: f64, grid: &Grid, h: f64) -> f64 {
    let h0 = branch_wavefunction(coeffs, sigma, s, grid);
    let hp = branch_wavefunction(coeffs, sigma, s + h, grid);
    let hm = branch_wavefunction(coeffs, sigma, s - h, grid);
    let peak = h0.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let floor = 1e-14 * peak;
    let integrand: Vec<f64> = h0
        .iter()
        .zip(hp.iter().zip(&hm))
        .map(|(z, (p, m))| {
            let dens = z.norm_sqr();
            if dens <= floor {
                return 0.0;
            }
            let dz = (p - m) / (2.0 * h);
            let ddens = 2.0 * (z.conj() * dz).re;
            ddens * ddens / dens
        })
        .collect();
    trapezoid_integrate(&integrand, grid.dx()).expect("grid has at least 101 points")
}

/// Classical information of the joint outcome (partner branch, position),
/// `Σᵢ ∫ (∂ₛpᵢ)²/pᵢ dx` with `pᵢ = |hᵢ(x)|²`.
pub fn classical_fi_position(
    model: &SourceModel,
    basis: &AnalyzerBasis,
    s: f64,
    grid: &Grid,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain {
            what: "finite-difference step",
            value: h,
            domain: "(0, inf)",
        });
    }
    grid.check_resolution(model.sigma(), s)?;
    let (b1, b2) = branch_coefficients(model, basis);
    let sigma = model.sigma();
    Ok([b1, b2]
        .iter()
        .map(|c| {
            richardson(
                |step| position_information(c, sigma, s, grid, step),
                h,
                "position information",
            )
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::{f_tot, f_unentangled};
    use crate::model::branch_decomposition;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};

    fn model(r: f64, phi: f64) -> SourceModel {
        SourceModel::new(1.0, r, phi).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(-1.0, 1.0, 100).is_err());
        assert!(Grid::new(-1.0, 1.0, 102).is_err());
        assert!(Grid::new(1.0, -1.0, 101).is_err());
        let coarse = Grid::with_points(1.0, 1.0, 201).unwrap();
        assert!(matches!(
            coarse.check_resolution(1.0, 1.0),
            Err(Error::InvalidGrid(_))
        ));
        let narrow = Grid::new(-4.0, 4.0, 4001).unwrap();
        assert!(narrow.check_resolution(1.0, 0.0).is_err());
        Grid::default_for(1.0, 3.0).check_resolution(1.0, 3.0).unwrap();
    }

    #[test]
    fn single_source_state() {
        let g = Grid::default_for(1.0, 1.0);
        let st = grid_state(&model(0.0, 0.0), &AnalyzerBasis::new(0.0), 1.0, &g).unwrap();
        for (x, z) in g.points().zip(&st.psi1) {
            assert_eq!(z.re, psi_amplitude(x, 0.5, 1.0));
        }
        assert!((st.n1 - 1.0).abs() < 1e-12);
        assert_eq!(st.n2, 0.0);
    }

    #[test]
    fn grid_overlap_matches_delta() {
        let g = Grid::default_for(1.0, 1.0);
        let plus: Vec<Complex64> = g.points().map(|x| psi_amplitude(x, 0.5, 1.0).into()).collect();
        let minus: Vec<Complex64> = g.points().map(|x| psi_amplitude(x, -0.5, 1.0).into()).collect();
        let ov = inner(&plus, &minus, g.dx());
        assert!((ov.re - (-0.125f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn destructive_branch_vanishes() {
        let g = Grid::default_for(1.0, 0.0);
        let st = grid_state(&model(1.0, 0.0), &AnalyzerBasis::new(FRAC_PI_4), 0.0, &g).unwrap();
        assert!(st.psi1.iter().all(|z| z.norm() < 1e-15));
        assert!(st.n1 < 1e-20);
        let (f1, f2) =
            fi_branch_numeric(&model(1.0, 0.0), &AnalyzerBasis::new(FRAC_PI_4), 0.0, &g, 1e-4).unwrap();
        assert_eq!(f1, 0.0);
        assert!(f2.is_finite());
    }

    #[test]
    fn grid_weights_match_decomposition() {
        let m = model(0.5, 0.7);
        let b = AnalyzerBasis::new(FRAC_PI_6);
        let g = Grid::default_for(1.0, 1.2);
        let st = grid_state(&m, &b, 1.2, &g).unwrap();
        let d = branch_decomposition(&m, &b, 1.2);
        assert!((st.n1 - d.n1).abs() < 1e-8 && (st.n2 - d.n2).abs() < 1e-8);
        assert!((st.n1 + st.n2 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn single_gaussian_information() {
        for s in [0.3, 1.0, 2.5] {
            let g = Grid::default_for(1.0, s);
            let (f1, _) = fi_branch_numeric(&model(0.0, 0.0), &AnalyzerBasis::new(0.0), s, &g, 1e-4).unwrap();
            assert!((f1 - 0.25).abs() < 1e-6, "{f1}");
        }
    }

    #[test]
    fn oracle_matches_closed_form_example() {
        let (m, b) = (model(0.5, 0.0), AnalyzerBasis::new(FRAC_PI_6));
        let g = Grid::default_for(1.0, 1.0);
        let v = f_tot_numeric(&m, &b, 1.0, &g, 1e-4).unwrap();
        assert!((v - f_tot(&m, &b, 1.0)).abs() < 1e-6 * 0.224);
        let u = f_unentangled_numeric(&m, 1.0, &g, 1e-4).unwrap();
        assert!((u - f_unentangled(&m, 1.0)).abs() < 1e-7);
    }

    #[test]
    fn weight_information() {
        let b = AnalyzerBasis::new(FRAC_PI_6);
        assert_eq!(f_weights(&model(0.0, 0.0), &b, 1.0, 1e-5), 0.0);
        assert!(f_weights(&model(1.0, FRAC_PI_2), &b, 1.0, 1e-5) < 1e-18);
        let m = model(1.0, 0.0);
        let d = branch_decomposition(&m, &b, 1.0);
        let dn = 0.5 * (3f64.sqrt() / 2.0) * 0.25 * (-0.125f64).exp();
        let expected = dn * dn * (1.0 / d.n1 + 1.0 / d.n2);
        assert!((f_weights(&m, &b, 1.0, 1e-5) - expected).abs() < 1e-9);
    }

    #[test]
    fn classical_information() {
        let g = Grid::default_for(1.0, 1.0);
        let v = classical_fi_position(&model(0.0, 0.0), &AnalyzerBasis::new(0.0), 1.0, &g, 1e-4).unwrap();
        assert!((v - 0.25).abs() < 1e-6);
        let far = Grid::default_for(1.0, 12.0);
        let v = classical_fi_position(&model(0.7, 0.4), &AnalyzerBasis::new(0.9), 12.0, &far, 1e-4).unwrap();
        assert!((v - 0.25).abs() < 1e-6, "{v}");
    }

    #[test]
    fn classical_splits_into_branch_and_weight_parts() {
        for &(r, alpha, s) in &[(1.0, FRAC_PI_6, 1.0), (0.5, 0.3, 0.4), (2.0, 1.1, 2.2)] {
            let (m, b) = (model(r, 0.0), AnalyzerBasis::new(alpha));
            let g = Grid::default_for(1.0, s);
            let cl = classical_fi_position(&m, &b, s, &g, 1e-4).unwrap();
            let q = f_tot_numeric(&m, &b, s, &g, 1e-4).unwrap();
            let w = f_weights(&m, &b, s, 1e-5);
            assert!((cl - q - w).abs() < 1e-6, "{cl} {q} {w}");
            assert!(cl >= q - 1e-6);
        }
    }

    #[test]
    fn grid_convergence() {
        let (m, b) = (model(0.5, 0.9), AnalyzerBasis::new(0.4));
        let s = 1.3;
        let g = Grid::default_for(1.0, s);
        let fine = Grid::with_points(1.0, s, 2 * DEFAULT_POINTS - 1).unwrap();
        let a = f_tot_numeric(&m, &b, s, &g, 1e-4).unwrap();
        let c = f_tot_numeric(&m, &b, s, &fine, 1e-4).unwrap();
        assert!((a - c).abs() < 1e-8);
    }
}
