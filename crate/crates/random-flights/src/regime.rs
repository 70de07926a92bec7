//! Growth regimes of the switching-moment transformation `f`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A super-exponential growth function, supplied as `log f` together with its
/// derivative so that monotonicity and `(log f)' → ∞` can be checked on a
/// grid. All flight arithmetic happens in log space, so `f` itself (e.g.
/// `e^{t²}`) never has to be evaluated.
pub trait GrowthFunction {
    fn label(&self) -> &str;
    /// `log f(t)` for `t >= 0`.
    fn log_f(&self, t: f64) -> f64;
    /// `(log f)'(t) = f'(t)/f(t)`.
    fn dlog_f(&self, t: f64) -> f64;
}

/// The default super-exponential preset `f(t) = e^{t²}`, i.e.
/// `log f(t) = t²` with `f'/f = 2t → ∞`.
pub struct ExpSquare;

impl GrowthFunction for ExpSquare {
    fn label(&self) -> &str {
        "exp-square"
    }

    fn log_f(&self, t: f64) -> f64 {
        t * t
    }

    fn dlog_f(&self, t: f64) -> f64 {
        2.0 * t
    }
}

/// Looks up a named super-exponential preset.
pub fn growth_preset(name: &str) -> Option<&'static dyn GrowthFunction> {
    match name {
        "exp-square" => Some(&ExpSquare),
        _ => None,
    }
}

/// The three growth regimes of the switching moments `T_k = f(Γ_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum RegimeConfig {
    /// `f(t) = t^α` with `α > 1/2`.
    Polynomial { alpha: f64 },
    /// `f(t) = e^{βt}` with `β > 0`.
    Exponential { beta: f64 },
    /// Increasing `f` with `f'/f → ∞`, selected from named presets so the
    /// growth condition stays checkable.
    #[serde(rename = "superexp")]
    SuperExponential { preset: String },
}

impl RegimeConfig {
    pub fn polynomial(alpha: f64) -> Self {
        RegimeConfig::Polynomial { alpha }
    }

    pub fn exponential(beta: f64) -> Self {
        RegimeConfig::Exponential { beta }
    }

    pub fn superexp() -> Self {
        RegimeConfig::SuperExponential {
            preset: "exp-square".into(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RegimeConfig::Polynomial { .. } => "polynomial",
            RegimeConfig::Exponential { .. } => "exponential",
            RegimeConfig::SuperExponential { .. } => "superexp",
        }
    }

    /// Whether every realization of the regime lies in the unit ball of
    /// `C[0,1]` by construction (the exponential and super-exponential
    /// normalizations telescope to total weight at most one).
    pub fn is_unit_ball(&self) -> bool {
        !matches!(self, RegimeConfig::Polynomial { .. })
    }

    /// The growth preset backing a super-exponential regime.
    pub fn growth(&self) -> Result<&'static dyn GrowthFunction> {
        match self {
            RegimeConfig::SuperExponential { preset } => growth_preset(preset).ok_or_else(|| {
                Error::InvalidParameter(format!("unknown super-exponential preset '{preset}'"))
            }),
            _ => Err(Error::InvalidParameter(format!(
                "regime '{}' has no growth function",
                self.label()
            ))),
        }
    }

    /// Validates the regime parameters against their preconditions.
    ///
    /// Super-exponential presets are checked on a sample grid: `log f` must be
    /// strictly increasing and `(log f)'` must grow, which is the checkable
    /// form of `f'/f → ∞`.
    pub fn validate(&self) -> Result<()> {
        match self {
            RegimeConfig::Polynomial { alpha } => {
                if !alpha.is_finite() || *alpha <= 0.5 {
                    return Err(Error::InvalidParameter(format!(
                        "polynomial regime requires alpha > 1/2 (got {alpha})"
                    )));
                }
            }
            RegimeConfig::Exponential { beta } => {
                if !beta.is_finite() || *beta <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "exponential regime requires beta > 0 (got {beta})"
                    )));
                }
            }
            RegimeConfig::SuperExponential { .. } => {
                let growth = self.growth()?;
                let grid = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
                for w in grid.windows(2) {
                    if growth.log_f(w[1]) <= growth.log_f(w[0]) {
                        return Err(Error::NonMonotoneGrowth(w[0]));
                    }
                    if growth.dlog_f(w[1]) < growth.dlog_f(w[0]) {
                        return Err(Error::InvalidParameter(format!(
                            "super-exponential preset '{}' has non-increasing f'/f near t = {}",
                            growth.label(),
                            w[0]
                        )));
                    }
                }
                if growth.dlog_f(32.0) < 2.0 * growth.dlog_f(1.0).max(1e-6) {
                    return Err(Error::InvalidParameter(format!(
                        "super-exponential preset '{}' does not exhibit f'/f → ∞ on the check grid",
                        growth.label()
                    )));
                }
            }
        }
        Ok(())
    }
}
