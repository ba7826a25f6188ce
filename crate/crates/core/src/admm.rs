//! ADMM for `min h(X) s.t. P_Ω(X) = Y` with a pluggable spectral
//! regularizer `h`.
//!
//! Each iteration:
//!
//! ```text
//! X <- Y on Ω, Z - B elsewhere
//! Z <- prox_{h/ρ}(X + B)          (spectral_shrink with μ = λ/ρ)
//! B <- B + (X - Z)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regularizer::{spectral_shrink, Regularizer};
use crate::sampling::{impose, observed_distance, project, TubalMask};
use crate::tensor::Tensor3;

/// Which X iterate the multiplier update uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BUpdate {
    /// `B + (X^{l+1} - Z^{l+1})`, the usual scaled-form ADMM.
    #[default]
    Standard,
    /// `B + (X^{l} - Z^{l+1})`, using the previous X.
    Literal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Largest change of `X`, `Z` and `B` in one iteration, relative to
    /// `max(1, ||X^l||_F)`, below `tol`. The `B` change is the residual
    /// `X - Z`, so a stall with the iterates still apart does not count.
    #[default]
    RelativeChange,
    /// `||P_Ω(Z) - Y||_F / ||Y||_F < tol`: relative error of the low-rank
    /// iterate on the observed portion.
    ObservedResidual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdmmConfig {
    pub rho: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub regularizer: Regularizer,
    /// Weight on `h`; the prox threshold is `lambda_weight / rho`.
    pub lambda_weight: f64,
    /// When set, `rho <- min(rho * 1.05, 1e2)` after every iteration.
    pub rho_growth: bool,
    pub b_update: BUpdate,
    pub stop: StopRule,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        AdmmConfig {
            rho: 1e-2,
            max_iters: 500,
            tol: 1e-6,
            regularizer: Regularizer::Tnn,
            lambda_weight: 1.0,
            rho_growth: false,
            b_update: BUpdate::Standard,
            stop: StopRule::RelativeChange,
        }
    }
}

pub const RHO_GROWTH_FACTOR: f64 = 1.05;
pub const RHO_MAX: f64 = 1e2;

impl AdmmConfig {
    pub fn with_regularizer(regularizer: Regularizer) -> Self {
        AdmmConfig {
            regularizer,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho", self.rho),
            ("tol", self.tol),
            ("lambda", self.lambda_weight),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        Ok(())
    }

    /// Prox threshold for a given weighting parameter.
    pub fn mu(&self, rho: f64) -> f64 {
        self.lambda_weight / rho
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistoryEntry {
    pub iter: usize,
    /// Value of the configured stopping metric.
    pub rel_change: f64,
    /// Relative error against ground truth, when one was supplied.
    pub re: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct AdmmState {
    pub x: Tensor3,
    pub z: Tensor3,
    pub b: Tensor3,
    pub iter: usize,
    pub history: Vec<HistoryEntry>,
    pub converged: bool,
}

impl AdmmState {
    /// History as CSV with header `iter,rel_change,re`.
    pub fn history_csv(&self) -> String {
        let mut s = String::from("iter,rel_change,re\n");
        for h in &self.history {
            let re = h.re.map(|r| format!("{r:e}")).unwrap_or_default();
            s.push_str(&format!("{},{:e},{}\n", h.iter, h.rel_change, re));
        }
        s
    }
}

/// Runs ADMM from `X = Z = Y`, `B = 0`.
///
/// Returns the last X iterate, which matches `y` exactly on every sampled
/// tube. Hitting `max_iters` is not an error; check `state.converged`.
///
/// The relative-change test is skipped on the first iteration, where
/// `X^1 = X^0 = Y` by construction. Two cases finish after one iteration
/// regardless: a full mask (the constraint fixes every entry) and an exact
/// fixed point such as all-zero observations.
pub fn solve_admm(
    y: &Tensor3,
    mask: &TubalMask,
    cfg: &AdmmConfig,
    truth: Option<&Tensor3>,
) -> Result<(Tensor3, AdmmState)> {
    cfg.validate()?;
    if project(y, mask)? != *y {
        return Err(Error::invalid(
            "observations must be zero outside the sampled tubes",
        ));
    }
    if let Some(t) = truth {
        y.check_same_dims(t)?;
    }
    let truth_norm = truth.map(Tensor3::frobenius_norm);
    let y_norm = y.frobenius_norm();
    let full = mask.count() == mask.dims().0 * mask.dims().1;

    let mut x = y.clone();
    let mut z = y.clone();
    let mut b = Tensor3::zeros(y.dims());
    let mut rho = cfg.rho;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iter = 0;

    while iter < cfg.max_iters {
        iter += 1;
        let x_next = impose(&(&z - &b), y, mask)?;
        let z_next = spectral_shrink(&(&x_next + &b), cfg.mu(rho), cfg.regularizer)?;
        let b_next = match cfg.b_update {
            BUpdate::Standard => &b + &(&x_next - &z_next),
            BUpdate::Literal => &b + &(&x - &z_next),
        };

        let metric = match cfg.stop {
            StopRule::RelativeChange => {
                let change = x_next
                    .distance(&x)?
                    .max(z_next.distance(&z)?)
                    .max(b_next.distance(&b)?);
                change / x.frobenius_norm().max(1.0)
            }
            StopRule::ObservedResidual => {
                if y_norm > 0.0 {
                    observed_distance(&z_next, y, mask)? / y_norm
                } else {
                    observed_distance(&z_next, y, mask)?
                }
            }
        };
        let fixed_point = x_next == x && z_next == z && b_next == b;
        let re = match (truth, truth_norm) {
            (Some(t), Some(n)) if n > 0.0 => Some(x_next.distance(t)? / n),
            _ => None,
        };
        history.push(HistoryEntry {
            iter,
            rel_change: metric,
            re,
        });

        x = x_next;
        z = z_next;
        b = b_next;

        if full
            || fixed_point
            || (metric < cfg.tol && (iter > 1 || cfg.stop == StopRule::ObservedResidual))
        {
            converged = true;
            break;
        }
        if cfg.rho_growth {
            rho = (rho * RHO_GROWTH_FACTOR).min(RHO_MAX);
        }
    }

    Ok((
        x.clone(),
        AdmmState {
            x,
            z,
            b,
            iter,
            history,
            converged,
        },
    ))
}
