//! The five subcommands. Each builds its output in memory first and writes
//! it once at the end.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{FigureId, RunConfig};
use super::output::{fmt_num, write_text, Csv};
use super::svg::{line_plot, Series};
use crate::error::{Error, Result};
use crate::estimator::{crb_experiment, CrbReport};
use crate::fisher::{
    characteristic_residual, f_balanced, f_eta, f_tot, f_unentangled, s_least_analytic, s_least_numeric,
};
use crate::model::{AnalyzerBasis, SourceModel};
use crate::oracle::{f_tot_numeric, f_weights, Grid, DEFAULT_STEP};

pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (points - 1) as f64
            }
        })
        .collect()
}

fn single_model(cfg: &RunConfig) -> Result<(SourceModel, AnalyzerBasis)> {
    Ok((
        SourceModel::new(cfg.sigma, cfg.r[0], cfg.phi[0])?,
        AnalyzerBasis::new(cfg.alpha[0]),
    ))
}

/// `s,f_tot,f_unentangled[,f_oracle]` over a uniform grid of separations.
pub fn sweep_csv(cfg: &RunConfig) -> Result<Csv> {
    let (model, basis) = single_model(cfg)?;
    let mut header = vec!["s", "f_tot", "f_unentangled"];
    if cfg.with_oracle {
        header.push("f_oracle");
    }
    let rows: Vec<Vec<f64>> = linspace(cfg.s_min, cfg.s_max, cfg.points)
        .into_par_iter()
        .map(|s| {
            let mut row = vec![s, f_tot(&model, &basis, s), f_unentangled(&model, s)];
            if cfg.with_oracle {
                let grid = Grid::default_for(model.sigma(), s);
                row.push(f_tot_numeric(
                    &model,
                    &basis,
                    s,
                    &grid,
                    DEFAULT_STEP * model.sigma(),
                )?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut csv = Csv::new(&cfg.canonical(), &header);
    rows.iter().for_each(|r| csv.numbers(r));
    Ok(csv)
}

/// One plotted curve of a reproduced figure.
#[derive(Debug, Clone)]
pub struct Curve {
    pub file_stem: String,
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub csv: Csv,
}

pub const FIGURE_S_MAX: f64 = 5.0;
pub const FIGURE_POINTS: usize = 501;
const FIG2_R: [(f64, &str); 4] = [(0.0, "0"), (0.25, "0.25"), (0.5, "0.5"), (1.0, "1")];
const FIG3_ANGLES: [(f64, &str); 4] = [
    (PI / 12.0, "pi12"),
    (PI / 8.0, "pi8"),
    (PI / 6.0, "pi6"),
    (PI / 4.0, "pi4"),
];
const FIG3_NOTE: &str = "angle preset pi/12,pi/8,pi/6,pi/4 chosen for display";

fn curve(
    file_stem: String,
    label: String,
    config: String,
    note: Option<&str>,
    f: impl Fn(f64) -> f64,
) -> Curve {
    let points: Vec<(f64, f64)> = linspace(0.0, FIGURE_S_MAX, FIGURE_POINTS)
        .into_iter()
        .map(|s| (s, f(s)))
        .collect();
    let mut csv = Csv::new(&config, &["s", "f"]);
    if let Some(n) = note {
        csv.comment(n);
    }
    points.iter().for_each(|&(s, v)| csv.numbers(&[s, v]));
    Curve {
        file_stem,
        label,
        points,
        csv,
    }
}

fn range_suffix() -> String {
    format!(
        "phi=0 sigma=1 s_min=0 s_max={} points={FIGURE_POINTS}",
        fmt_num(FIGURE_S_MAX)
    )
}

/// Curves of one figure at `σ = 1`, `φ = 0`.
pub fn figure_curves(fig: FigureId) -> Result<Vec<Curve>> {
    let name = fig.name();
    let alpha = PI / 6.0;
    let mut curves = Vec::new();
    match fig {
        FigureId::Fig2a | FigureId::Fig2b => {
            for (r, tag) in FIG2_R {
                let model = SourceModel::new(1.0, r, 0.0)?;
                let basis = AnalyzerBasis::new(alpha);
                let kind = if fig == FigureId::Fig2a {
                    "entangled"
                } else {
                    "unentangled"
                };
                let config = format!(
                    "curve={kind} r={} alpha={} {}",
                    fmt_num(r),
                    fmt_num(alpha),
                    range_suffix()
                );
                let label = format!("r = {tag}");
                curves.push(if fig == FigureId::Fig2a {
                    curve(format!("{name}_r{tag}"), label, config, None, |s| {
                        f_tot(&model, &basis, s)
                    })
                } else {
                    curve(format!("{name}_r{tag}"), label, config, None, |s| {
                        f_unentangled(&model, s)
                    })
                });
            }
        }
        FigureId::Fig3a => {
            for (a, tag) in FIG3_ANGLES {
                let config = format!("curve=reduced angle={} {}", fmt_num(a), range_suffix());
                curves.push(curve(
                    format!("{name}_{tag}"),
                    format!("alpha = {}", tag.replace("pi", "pi/")),
                    config,
                    Some(FIG3_NOTE),
                    |s| f_balanced(a, 0.0, 1.0, s),
                ));
            }
        }
        FigureId::Fig3b => {
            for (a, tag) in FIG3_ANGLES {
                let r = a.tan();
                let eta = SourceModel::new(1.0, r, 0.0)?.eta();
                let config = format!("curve=reduced angle={} {}", fmt_num(eta), range_suffix());
                curves.push(curve(
                    format!("{name}_{tag}"),
                    format!("r = {}", fmt_num((r * 1e4).round() / 1e4)),
                    config,
                    Some(FIG3_NOTE),
                    |s| f_eta(eta, 0.0, 1.0, s),
                ));
            }
        }
    }
    Ok(curves)
}

/// Writes one CSV per curve (and optionally an SVG) into `dir`.
pub fn write_figure(fig: FigureId, dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let curves = figure_curves(fig)?;
    let mut written = Vec::new();
    for c in &curves {
        let path = dir.join(format!("{}.csv", c.file_stem));
        c.csv.write_to(Some(&path))?;
        written.push(path);
    }
    if svg {
        let series: Vec<Series> = curves
            .iter()
            .map(|c| Series {
                label: c.label.clone(),
                points: c.points.clone(),
            })
            .collect();
        let path = dir.join(format!("{}.svg", fig.name()));
        write_text(Some(&path), &line_plot(fig.name(), "s / sigma", "F", &series))?;
        written.push(path);
    }
    Ok(written)
}

/// `alpha,r,phi,s_least_analytic,s_least_numeric,f_min,residual_eq9`.
pub fn sleast_csv(cfg: &RunConfig) -> Result<Csv> {
    let mut csv = Csv::new(
        &cfg.canonical(),
        &[
            "alpha",
            "r",
            "phi",
            "s_least_analytic",
            "s_least_numeric",
            "f_min",
            "residual_eq9",
        ],
    );
    for &alpha in &cfg.alpha {
        for &r in &cfg.r {
            for &phi in &cfg.phi {
                let model = SourceModel::new(cfg.sigma, r, phi)?;
                let basis = AnalyzerBasis::new(alpha);
                let analytic = if r == 1.0 {
                    Some(s_least_analytic(alpha, phi, cfg.sigma))
                } else if (alpha - PI / 4.0).abs() < 1e-12 {
                    Some(s_least_analytic(model.eta(), phi, cfg.sigma))
                } else {
                    None
                };
                let numeric = s_least_numeric(&model, &basis, None)?;
                let residual = characteristic_residual(&model, &basis, numeric.s);
                csv.row(&[
                    fmt_num(alpha),
                    fmt_num(r),
                    fmt_num(phi),
                    analytic.map(fmt_num).unwrap_or_default(),
                    fmt_num(numeric.s),
                    fmt_num(numeric.f_min),
                    fmt_num(residual),
                ]);
            }
        }
    }
    Ok(csv)
}

/// Outcome of the oracle cross-check.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub tuples: usize,
    pub worst_deviation: f64,
    /// `(s, alpha, r, phi)` of the worst row.
    pub worst_at: (f64, f64, f64, f64),
    pub grid_change: f64,
    pub max_quadrature_weight_info: f64,
    pub failures: Vec<String>,
    pub csv: Option<Csv>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        let (s, a, r, p) = self.worst_at;
        let mut text = format!(
            "oracle-check: {} tuples, worst relative deviation {:.3e} at s={} alpha={} r={} phi={}\n\
             grid doubling changes results by at most {:.3e}\n\
             max weight information at phi=pi/2: {:.3e}\n",
            self.tuples,
            self.worst_deviation,
            fmt_num(s),
            fmt_num(a),
            fmt_num(r),
            fmt_num(p),
            self.grid_change,
            self.max_quadrature_weight_info,
        );
        if self.passed() {
            text.push_str("PASS\n");
        } else {
            for f in &self.failures {
                text.push_str(&format!("FAIL: {f}\n"));
            }
        }
        text
    }
}

pub const ORACLE_TOLERANCE: f64 = 1e-6;
pub const GRID_TOLERANCE: f64 = 1e-8;

/// Standard sweep: `s ∈ {0.1, …, 4}σ`, five basis angles, five `r`, four `φ`.
pub fn standard_sweep() -> Vec<(f64, f64, f64, f64)> {
    let s_values: Vec<f64> = (1..=40).map(|i| i as f64 / 10.0).collect();
    let alphas = [0.0, PI / 8.0, PI / 6.0, PI / 4.0, 3.0 * PI / 8.0];
    let rs = [0.0, 0.25, 0.5, 1.0, 2.0];
    let phis = [0.0, PI / 4.0, PI / 2.0, PI];
    let mut out = Vec::with_capacity(4000);
    for &s in &s_values {
        for &a in &alphas {
            for &r in &rs {
                for &p in &phis {
                    out.push((s, a, r, p));
                }
            }
        }
    }
    out
}

pub fn oracle_check(cfg: &RunConfig) -> Result<OracleReport> {
    let sigma = cfg.sigma;
    let mut report = OracleReport {
        tuples: 0,
        worst_deviation: 0.0,
        worst_at: (0.0, 0.0, 0.0, 0.0),
        grid_change: 0.0,
        max_quadrature_weight_info: 0.0,
        failures: Vec::new(),
        csv: None,
    };
    let probe = Grid::with_points(sigma, 4.0 * sigma, cfg.grid_points)?;
    if let Err(e) = probe.check_resolution(sigma, 4.0 * sigma) {
        report.failures.push(format!(
            "grid convergence not guaranteed with {} points: {e}",
            cfg.grid_points
        ));
        return Ok(report);
    }

    let tuples = standard_sweep();
    let h = DEFAULT_STEP * sigma;
    let rows: Vec<[f64; 8]> = tuples
        .par_iter()
        .map(|&(s, a, r, p)| {
            let s = s * sigma;
            let model = SourceModel::new(sigma, r, p)?;
            let basis = AnalyzerBasis::new(a);
            let grid = Grid::with_points(sigma, s, cfg.grid_points)?;
            let exact = f_tot(&model, &basis, s);
            let numeric = f_tot_numeric(&model, &basis, s, &grid, h)?;
            let dev = (exact - numeric).abs() / exact.max(1e-3 / (sigma * sigma));
            let fw = f_weights(&model, &basis, s, crate::numerics::default_step(s));
            Ok([s, a, r, p, exact, numeric, dev, fw])
        })
        .collect::<Result<_>>()?;

    let mut csv = Csv::new(
        &cfg.canonical(),
        &[
            "s",
            "alpha",
            "r",
            "phi",
            "f_tot",
            "f_oracle",
            "rel_dev",
            "f_weights",
        ],
    );
    for row in &rows {
        csv.numbers(row);
        if row[6] > report.worst_deviation || row[6].is_nan() {
            report.worst_deviation = row[6];
            report.worst_at = (row[0], row[1], row[2], row[3]);
        }
        if (row[3] - PI / 2.0).abs() < 1e-12 {
            report.max_quadrature_weight_info = report.max_quadrature_weight_info.max(row[7]);
        }
    }
    report.tuples = rows.len();
    report.csv = Some(csv);

    if !(report.worst_deviation <= ORACLE_TOLERANCE) {
        report.failures.push(format!(
            "worst relative deviation {:.3e} exceeds {ORACLE_TOLERANCE:e}",
            report.worst_deviation
        ));
    }

    let finer = 2 * cfg.grid_points - 1;
    for &(s, a, r, p) in &[
        (0.5, PI / 6.0, 0.5, 0.0),
        (2.0, PI / 8.0, 2.0, PI / 4.0),
        (4.0, 3.0 * PI / 8.0, 1.0, PI),
    ] {
        let s = s * sigma;
        let model = SourceModel::new(sigma, r, p)?;
        let basis = AnalyzerBasis::new(a);
        let coarse = f_tot_numeric(
            &model,
            &basis,
            s,
            &Grid::with_points(sigma, s, cfg.grid_points)?,
            h,
        )?;
        let fine = f_tot_numeric(&model, &basis, s, &Grid::with_points(sigma, s, finer)?, h)?;
        report.grid_change = report.grid_change.max((coarse - fine).abs() * sigma * sigma);
    }
    if !(report.grid_change < GRID_TOLERANCE) {
        report.failures.push(format!(
            "grid convergence: doubling the grid changes results by {:.3e}",
            report.grid_change
        ));
    }
    if report.max_quadrature_weight_info > 1e-20 {
        report
            .failures
            .push("weight information is nonzero at phi = pi/2".into());
    }
    Ok(report)
}

pub fn crb_report(cfg: &RunConfig) -> Result<CrbReport> {
    let (model, basis) = single_model(cfg)?;
    crb_experiment(&model, &basis, cfg.s_true, cfg.samples, cfg.trials, cfg.seed)
}

pub fn crb_csv(cfg: &RunConfig, rep: &CrbReport) -> Csv {
    let mut csv = Csv::new(
        &cfg.canonical(),
        &[
            "s_true",
            "trials",
            "samples_per_trial",
            "mean_estimate",
            "variance",
            "crb_classical",
            "crb_paper",
            "efficiency",
            "f_classical",
            "f_tot",
        ],
    );
    csv.numbers(&[
        rep.s_true,
        rep.trials as f64,
        rep.samples_per_trial as f64,
        rep.mean_estimate,
        rep.variance,
        rep.crb_classical,
        rep.crb_paper,
        rep.efficiency,
        rep.f_classical,
        rep.f_tot,
    ]);
    csv
}

pub fn crb_summary(rep: &CrbReport) -> String {
    let m = rep.samples_per_trial as f64;
    format!(
        "crb: s_true={} M={} trials={}\n  mean estimate     {}\n  variance          {:.6e}\n  1/(M F_cl)        {:.6e}  (F_cl = {})\n  1/(M F_tot)       {:.6e}  (F_tot = {})\n  M Var F_cl        {:.4}\n  efficiency        {:.4}\n",
        fmt_num(rep.s_true),
        rep.samples_per_trial,
        rep.trials,
        fmt_num(rep.mean_estimate),
        rep.variance,
        rep.crb_classical,
        fmt_num(rep.f_classical),
        rep.crb_paper,
        fmt_num(rep.f_tot),
        m * rep.variance * rep.f_classical,
        rep.efficiency,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_endpoints() {
        let v = linspace(0.0, 5.0, 501);
        assert_eq!(v.len(), 501);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[500], 5.0);
        assert_eq!(v[100], 1.0);
    }

    #[test]
    fn standard_sweep_size() {
        let t = standard_sweep();
        assert_eq!(t.len(), 4000);
        assert_eq!(t[0], (0.1, 0.0, 0.0, 0.0));
    }
}
