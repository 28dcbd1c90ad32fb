//! WebAssembly bindings for the browser demo in `www/`.

use fisherlens::fisher::{f_tot, f_unentangled, s_least_analytic, s_least_numeric};
use fisherlens::oracle::{f_tot_numeric, Grid, DEFAULT_STEP};
use fisherlens::{AnalyzerBasis, SourceModel};
use wasm_bindgen::prelude::*;

fn model(sigma: f64, r: f64, phi: f64) -> Result<SourceModel, String> {
    SourceModel::new(sigma, r, phi).map_err(|e| e.to_string())
}

/// Flat `[s0, f_tot0, f_unent0, s1, ...]` over `points` separations in `[0, s_max]`.
pub fn curve(
    sigma: f64,
    r: f64,
    alpha: f64,
    phi: f64,
    s_max: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    if points < 2 || s_max.is_nan() || s_max <= 0.0 {
        return Err("need at least two points and a positive range".into());
    }
    let m = model(sigma, r, phi)?;
    let basis = AnalyzerBasis::new(alpha);
    let mut out = Vec::with_capacity(3 * points);
    for i in 0..points {
        let s = s_max * i as f64 / (points - 1) as f64;
        out.extend([s, f_tot(&m, &basis, s), f_unentangled(&m, s)]);
    }
    Ok(out)
}

/// `[s_numeric, f_min, s_analytic]`; the analytic entry is NaN unless a closed form applies.
pub fn least(sigma: f64, r: f64, alpha: f64, phi: f64) -> Result<Vec<f64>, String> {
    let m = model(sigma, r, phi)?;
    let found = s_least_numeric(&m, &AnalyzerBasis::new(alpha), None).map_err(|e| e.to_string())?;
    let analytic = if r == 1.0 {
        s_least_analytic(alpha, phi, sigma)
    } else if (alpha - std::f64::consts::FRAC_PI_4).abs() < 1e-12 {
        s_least_analytic(m.eta(), phi, sigma)
    } else {
        f64::NAN
    };
    Ok(vec![found.s, found.f_min, analytic])
}

/// `[closed form, grid oracle]` at one separation.
pub fn oracle(sigma: f64, r: f64, alpha: f64, phi: f64, s: f64) -> Result<Vec<f64>, String> {
    let m = model(sigma, r, phi)?;
    let basis = AnalyzerBasis::new(alpha);
    let grid = Grid::with_points(sigma, s, 2001).map_err(|e| e.to_string())?;
    let numeric = f_tot_numeric(&m, &basis, s, &grid, DEFAULT_STEP * sigma).map_err(|e| e.to_string())?;
    Ok(vec![f_tot(&m, &basis, s), numeric])
}

#[wasm_bindgen(js_name = fiCurve)]
pub fn fi_curve(
    sigma: f64,
    r: f64,
    alpha: f64,
    phi: f64,
    s_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    curve(sigma, r, alpha, phi, s_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = leastSeparation)]
pub fn least_separation(sigma: f64, r: f64, alpha: f64, phi: f64) -> Result<Vec<f64>, JsError> {
    least(sigma, r, alpha, phi).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = oraclePoint)]
pub fn oracle_point(sigma: f64, r: f64, alpha: f64, phi: f64, s: f64) -> Result<Vec<f64>, JsError> {
    oracle(sigma, r, alpha, phi, s).map_err(|e| JsError::new(&e))
}
