//! Two-source field and the entangled partner's measurement basis.
//!
//! The spatial amplitudes are unit-norm Gaussians
//! `ψ(x) = (2πσ²)^(-1/4) exp(-x²/4σ²)`, so the overlap of the two shifted
//! copies is `δ(s) = exp(-s²/8σ²)`. `|h₊⟩` is centred at `+s/2` and `|h₋⟩` at
//! `-s/2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::central_diff;

/// Source pair with unbalanceness `r = b/a` and relative phase `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    sigma: f64,
    r: f64,
    phi: f64,
}

impl SourceModel {
    pub fn new(sigma: f64, r: f64, phi: f64) -> Result<Self> {
        check_sigma(sigma)?;
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain {
                what: "r",
                value: r,
                domain: "[0, inf)",
            });
        }
        if !phi.is_finite() {
            return Err(Error::Domain {
                what: "phi",
                value: phi,
                domain: "finite",
            });
        }
        Ok(Self { sigma, r, phi })
    }

    /// Builds the model from the unbalanceness angle `η = atan(r)`.
    pub fn from_eta(sigma: f64, eta: f64, phi: f64) -> Result<Self> {
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&eta) {
            return Err(Error::Domain {
                what: "eta",
                value: eta,
                domain: "[0, pi/2)",
            });
        }
        Self::new(sigma, eta.tan(), phi)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Amplitude of the source at `+s/2`.
    pub fn a(&self) -> f64 {
        1.0 / self.r.hypot(1.0)
    }

    /// Amplitude of the source at `-s/2`.
    pub fn b(&self) -> f64 {
        self.r / self.r.hypot(1.0)
    }

    pub fn eta(&self) -> f64 {
        self.r.atan()
    }
}

/// Rotation angle α of the partner's measurement basis. Only `sin 2α`,
/// `cos²α`, `sin²α` enter the results, so `[0, π/2]` covers every case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerBasis {
    pub alpha: f64,
}

impl AnalyzerBasis {
    pub fn new(alpha: f64) -> Self {
        Self { alpha }
    }
}

/// Coefficients of one conditional branch on the `{|h₊⟩, |h₋⟩}` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCoefficients {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl BranchCoefficients {
    /// `⟨h|h⟩` given the overlap `δ = ⟨h₊|h₋⟩` (real for Gaussians).
    pub fn weight(&self, delta: f64) -> f64 {
        let cross = (self.plus.conj() * self.minus).re;
        (self.plus.norm_sqr() + self.minus.norm_sqr() + 2.0 * cross * delta).max(0.0)
    }
}

/// The two branches `|h₁⟩`, `|h₂⟩` and their weights at a given separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchDecomposition {
    pub c1_plus: Complex64,
    pub c1_minus: Complex64,
    pub c2_plus: Complex64,
    pub c2_minus: Complex64,
    pub n1: f64,
    pub n2: f64,
}

impl BranchDecomposition {
    pub fn branch1(&self) -> BranchCoefficients {
        BranchCoefficients {
            plus: self.c1_plus,
            minus: self.c1_minus,
        }
    }

    pub fn branch2(&self) -> BranchCoefficients {
        BranchCoefficients {
            plus: self.c2_plus,
            minus: self.c2_minus,
        }
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain {
            what: "sigma",
            value: sigma,
            domain: "(0, inf)",
        });
    }
    Ok(())
}

/// `δ(s) = exp(-s²/8σ²)`.
pub fn overlap_delta(s: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok((-s * s / (8.0 * sigma * sigma)).exp())
}

/// Coefficients of the two branches selected by the rotated partner basis.
pub fn branch_coefficients(
    model: &SourceModel,
    basis: &AnalyzerBasis,
) -> (BranchCoefficients, BranchCoefficients) {
    let (a, b) = (model.a(), model.b());
    let (sa, ca) = basis.alpha.sin_cos();
    let phase = Complex64::from_polar(1.0, model.phi);
    (
        BranchCoefficients {
            plus: Complex64::new(a * ca, 0.0),
            minus: -phase * (b * sa),
        },
        BranchCoefficients {
            plus: Complex64::new(a * sa, 0.0),
            minus: phase * (b * ca),
        },
    )
}

pub fn branch_decomposition(model: &SourceModel, basis: &AnalyzerBasis, s: f64) -> BranchDecomposition {
    let (h1, h2) = branch_coefficients(model, basis);
    // sigma is validated by SourceModel
    let delta = (-s * s / (8.0 * model.sigma * model.sigma)).exp();
    BranchDecomposition {
        c1_plus: h1.plus,
        c1_minus: h1.minus,
        c2_plus: h2.plus,
        c2_minus: h2.minus,
        n1: h1.weight(delta),
        n2: h2.weight(delta),
    }
}

/// Central-difference `(∂n₁/∂s, ∂n₂/∂s)`.
pub fn weight_derivative(model: &SourceModel, basis: &AnalyzerBasis, s: f64, h: f64) -> (f64, f64) {
    let dn1 = central_diff(|t| branch_decomposition(model, basis, t).n1, s, h);
    let dn2 = central_diff(|t| branch_decomposition(model, basis, t).n2, s, h);
    (dn1, dn2)
}
