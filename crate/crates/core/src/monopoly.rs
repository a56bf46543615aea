//! Single-SP bandwidth allocation: revenue and social-welfare objectives.
//!
//! The optimum always lies in the separate-service regime and uses the whole
//! licensed band, so each problem reduces to one scalar `b_small ∈ [0, B]`.
//! The objective is concave there; its first-order condition is solved by
//! bisection once the closed-form threshold has ruled out the boundary case.

use serde::{Deserialize, Serialize};

use crate::association::{solve_association, AllocationProfile, AssociationOutcome, Regime};
use crate::error::{MarketError, Result};
use crate::market::{Bandwidth, MarketParams, Rate, Welfare};
use crate::numeric::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Revenue,
    SocialWelfare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonopolySolution {
    pub objective: Objective,
    pub b_macro: Bandwidth,
    pub b_small: Bandwidth,
    pub outcome: AssociationOutcome,
    /// Set when the unlicensed capacity is at or above the objective's
    /// threshold and the SP leaves small-cells empty.
    pub boundary: bool,
}

impl MonopolySolution {
    pub fn profile(&self, b_unlicensed: Bandwidth) -> AllocationProfile {
        AllocationProfile {
            per_sp: vec![crate::association::SpAllocation::new(
                self.b_macro,
                self.b_small,
            )],
            b_unlicensed,
        }
    }

    pub fn revenue(&self) -> Welfare {
        self.outcome.total_revenue()
    }

    pub fn welfare(&self) -> Welfare {
        self.outcome.social_welfare
    }
}

/// Unlicensed capacity at or above which a revenue-maximizing monopolist
/// with licensed band `b` puts nothing into small-cells.
pub fn threshold_rev(b: Bandwidth, params: &MarketParams) -> Rate {
    let a = params.alpha();
    params.kappa() * params.n_fixed() * b * params.r0() / params.n_mobile()
        * (params.lambda_s() / (1.0 - a)).powf(1.0 / a)
}

/// As [`threshold_rev`] for a welfare-maximizing monopolist.
pub fn threshold_sw(b: Bandwidth, params: &MarketParams) -> Rate {
    let a = params.alpha();
    params.kappa() * params.n_fixed() * b * params.r0() / params.n_mobile()
        * ((1.0 + a) * params.lambda_s()).powf(1.0 / a)
}

/// Objective threshold on unlicensed capacity.
pub fn threshold(objective: Objective, b: Bandwidth, params: &MarketParams) -> Rate {
    match objective {
        Objective::Revenue => threshold_rev(b, params),
        Objective::SocialWelfare => threshold_sw(b, params),
    }
}

/// Small-cell share of the band chosen without unlicensed access,
/// `N_f / (N_f + N_m λ_S^(1-1/α))`.
pub fn beta_tilde(params: &MarketParams) -> f64 {
    let a = params.alpha();
    let n_f = params.n_fixed();
    n_f / (n_f + params.n_mobile() * params.lambda_s().powf(1.0 - 1.0 / a))
}

/// Unique positive root of `(1-α)(1+β)^(1+α) - β = 1-α`.
///
/// The left side minus the right is convex, zero at `β = 0` with slope
/// `-α²`, so it is negative on `(0, β*)` and positive beyond.
pub fn crossover_root(alpha: f64) -> f64 {
    let f = |beta: f64| (1.0 - alpha) * (1.0 + beta).powf(1.0 + alpha) - beta - (1.0 - alpha);
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        assert!(
            hi.is_finite(),
            "crossover root bracket overflowed for alpha={alpha}"
        );
    }
    // f(0) = 0 is the excluded root; bisection keeps `lo` on the negative side.
    let mut lo = 0.0_f64;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Unlicensed capacity separating "more small-cell bandwidth than without
/// unlicensed access" from "less".
pub fn threshold_crossover(b: Bandwidth, params: &MarketParams) -> Rate {
    let beta_star = crossover_root(params.alpha());
    let b_small_tilde = beta_tilde(params) * b;
    beta_star * params.kappa() * params.lambda_s() * b_small_tilde * params.r0()
}

/// Marginal objective gains per unit bandwidth `(small, macro)` at a
/// separate-service split, scaled by `1/R_0`. They balance at an interior
/// optimum.
pub fn marginal_gains(
    objective: Objective,
    b_small: Bandwidth,
    b: Bandwidth,
    c_u: Rate,
    params: &MarketParams,
) -> (f64, f64) {
    let a = params.alpha();
    let kappa = params.kappa();
    let n_f = params.n_fixed();
    let ks = kappa * params.small_capacity(b_small);
    let x_total = ks + c_u;
    let r_s = x_total / (kappa * n_f);
    let r_m = params.macro_capacity(b - b_small) / params.n_mobile();
    let ls = params.lambda_s();
    match objective {
        Objective::Revenue => {
            let share = if x_total > 0.0 { ks / x_total } else { 1.0 };
            (
                ls * r_s.powf(-a) * (1.0 - a * share),
                (1.0 - a) * r_m.powf(-a),
            )
        }
        Objective::SocialWelfare => {
            let shadow = c_u / (kappa * n_f * r_s);
            (ls * r_s.powf(-a) * (1.0 + a * shadow), r_m.powf(-a))
        }
    }
}

fn residual(
    objective: Objective,
    b_small: Bandwidth,
    b: Bandwidth,
    c_u: Rate,
    params: &MarketParams,
) -> f64 {
    let (small, macro_) = marginal_gains(objective, b_small, b, c_u, params);
    small - macro_
}

fn validate_band(b: Bandwidth, b_unlicensed: Bandwidth) -> Result<()> {
    if !(b.is_finite() && b > 0.0) {
        return Err(MarketError::invalid(
            "b",
            format!("licensed band must be > 0, got {b}"),
        ));
    }
    if !(b_unlicensed.is_finite() && b_unlicensed >= 0.0) {
        return Err(MarketError::invalid(
            "b_unlicensed",
            format!("must be finite and >= 0, got {b_unlicensed}"),
        ));
    }
    Ok(())
}

/// Optimal single-SP split for the given objective.
pub fn optimize(
    objective: Objective,
    b: Bandwidth,
    b_unlicensed: Bandwidth,
    params: &MarketParams,
) -> Result<MonopolySolution> {
    validate_band(b, b_unlicensed)?;
    let c_u = params.unlicensed_capacity(b_unlicensed);
    let limit = threshold(objective, b, params);

    let b_small = if c_u >= limit {
        0.0
    } else {
        let eps = 1e-12 * b;
        let g = |x: f64| residual(objective, x, b, c_u, params);
        let g_lo = g(eps);
        if g_lo <= 0.0 {
            // only reachable a hair below the threshold
            if c_u >= limit * (1.0 - 1e-9) {
                0.0
            } else {
                return Err(MarketError::Internal(format!(
                    "{objective:?} first-order condition not bracketed: residual {g_lo:e} at b_small={eps:e}"
                )));
            }
        } else if g(b - eps) >= 0.0 {
            // optimum closer to the full band than the bracket resolves
            b - eps
        } else {
            bisect(g, eps, b - eps).ok_or_else(|| {
                MarketError::Internal(format!(
                    "{objective:?} first-order condition not bracketed on (0, {b})"
                ))
            })?
        }
    };
    let boundary = b_small == 0.0;
    let b_macro = b - b_small;
    let profile = AllocationProfile::monopoly(b_macro, b_small, b_unlicensed)?;
    let outcome = solve_association(&profile, params)?;
    debug_assert_eq!(outcome.regime, Regime::SeparateService);
    Ok(MonopolySolution {
        objective,
        b_macro,
        b_small,
        outcome,
        boundary,
    })
}

/// Revenue-maximizing split of licensed band `b`.
pub fn optimize_revenue(
    b: Bandwidth,
    b_unlicensed: Bandwidth,
    params: &MarketParams,
) -> Result<MonopolySolution> {
    optimize(Objective::Revenue, b, b_unlicensed, params)
}

/// Welfare-maximizing split of licensed band `b`.
pub fn optimize_welfare(
    b: Bandwidth,
    b_unlicensed: Bandwidth,
    params: &MarketParams,
) -> Result<MonopolySolution> {
    optimize(Objective::SocialWelfare, b, b_unlicensed, params)
}
