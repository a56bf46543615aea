//! Brute-force verifiers. Slow on purpose; used by tests to check the
//! closed-form solvers by routes that share none of their algebra.

use serde::{Deserialize, Serialize};

use crate::association::{AllocationProfile, AssociationOutcome, Regime, TierPrice};
use crate::error::{MarketError, Result};
use crate::market::{utility, Bandwidth, MarketParams, UserMass};
use crate::oligopoly::best_response;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(MarketError::invalid(
                "grid",
                format!("need lo < hi, got [{lo}, {hi}]"),
            ));
        }
        if steps < 2 {
            return Err(MarketError::invalid(
                "grid",
                format!("need at least 2 steps, got {steps}"),
            ));
        }
        Ok(GridSpec { lo, hi, steps })
    }

    /// Grid with spacing at most `step` covering `[lo, hi]`.
    pub fn with_step(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let steps = ((hi - lo) / step).ceil() as usize + 1;
        Self::new(lo, hi, steps.max(2))
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.steps - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        if k + 1 == self.steps {
            self.hi
        } else {
            self.lo + self.spacing() * k as f64
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(|k| self.point(k))
    }
}

/// Grid maximizer; ties go to the smallest argument.
pub fn grid_argmax<F: FnMut(f64) -> f64>(mut objective: F, spec: GridSpec) -> (f64, f64) {
    let mut best = (spec.lo, f64::NEG_INFINITY);
    for x in spec.points() {
        let v = objective(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn finite_difference<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

pub const FIXED_POINT_MAX_ITER: usize = 100_000;
const FIXED_POINT_DAMPING: f64 = 0.5;
const FIXED_POINT_TOL: f64 = 1e-15;

/// Market clearing by iterating fixed-user masses until every tier they use
/// pays the same net payoff.
///
/// A licensed tier at per-user rate `r` pays `α u(r)` net of its price; the
/// free tier pays `u(r)`. Fixed users move towards the better tiers with
/// damped multiplicative updates. Mobile users always sit on macro-cells.
pub fn payoff_equalization_fixed_point(
    profile: &AllocationProfile,
    params: &MarketParams,
) -> Result<AssociationOutcome> {
    profile.validate()?;
    let a = params.alpha();
    let n_f = params.n_fixed();
    let n_m = params.n_mobile();
    let cap = [
        profile.macro_capacity(params),
        profile.small_capacity(params),
        profile.unlicensed_capacity(params),
    ];
    if cap[0] <= 0.0 {
        return Err(if cap.iter().all(|&c| c <= 0.0) {
            MarketError::DegenerateScenario
        } else {
            MarketError::MobileUnservable
        });
    }

    let payoff = |j: usize, fixed: UserMass| -> f64 {
        let k = if j == 0 { n_m + fixed } else { fixed };
        let r = cap[j] / k;
        if j == 2 {
            utility(r, a)
        } else {
            a * utility(r, a)
        }
    };

    let active = cap.iter().filter(|&&c| c > 0.0).count() as f64;
    let mut m: [UserMass; 3] = cap.map(|c| if c > 0.0 { n_f / active } else { 0.0 });
    let mut step = f64::INFINITY;
    let mut converged = false;
    for _ in 0..FIXED_POINT_MAX_ITER {
        let mut proposal = [0.0; 3];
        for j in 0..3 {
            if m[j] > 0.0 {
                proposal[j] = m[j] * payoff(j, m[j]).powf(1.0 / (1.0 - a));
            }
        }
        let scale = n_f / proposal.iter().sum::<f64>();
        step = 0.0;
        for j in 0..3 {
            let next =
                (1.0 - FIXED_POINT_DAMPING) * m[j] + FIXED_POINT_DAMPING * proposal[j] * scale;
            step = step.max((next - m[j]).abs());
            m[j] = next;
        }
        if step <= FIXED_POINT_TOL * params.n_total() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(MarketError::OracleDiverged {
            iterations: FIXED_POINT_MAX_ITER,
            last_step: step,
        });
    }

    let k_macro = n_m + m[0];
    let rate = |j: usize, k: f64| if k > 0.0 { cap[j] / k } else { 0.0 };
    let r_macro = rate(0, k_macro);
    let r_small = rate(1, m[1]);
    let r_unlicensed = rate(2, m[2]);
    let price = |r: f64, k: f64| {
        if k > 0.0 {
            TierPrice::Active(r.powf(-a))
        } else {
            TierPrice::Inactive
        }
    };
    let p_macro = price(r_macro, k_macro);
    let p_small = price(r_small, m[1]);
    let pm = p_macro.value().unwrap_or(0.0);
    let ps = p_small.value().unwrap_or(0.0);
    let revenue_per_sp = profile
        .per_sp
        .iter()
        .map(|sp| params.macro_capacity(sp.b_macro) * pm + params.small_capacity(sp.b_small) * ps)
        .collect();
    let regime = if m[0] > 1e-9 * n_f {
        Regime::MixedService
    } else {
        Regime::SeparateService
    };
    let social_welfare = k_macro * utility(r_macro, a)
        + m[1] * utility(r_small, a)
        + m[2] * utility(r_unlicensed, a);
    Ok(AssociationOutcome {
        regime,
        k_macro,
        k_small: m[1],
        k_unlicensed: m[2],
        r_macro,
        r_small,
        r_unlicensed,
        p_macro,
        p_small,
        revenue_per_sp,
        social_welfare,
    })
}

/// Round-robin best responses from a starting small-cell split. Returns the
/// final small-cell bandwidths.
pub fn best_response_dynamics(
    bandwidths: &[Bandwidth],
    start_small: &[Bandwidth],
    b_unlicensed: Bandwidth,
    params: &MarketParams,
    max_rounds: usize,
    tol: f64,
) -> Result<Vec<Bandwidth>> {
    if bandwidths.len() != start_small.len() {
        return Err(MarketError::invalid(
            "start_small",
            "length must match bandwidths",
        ));
    }
    let per_sp = bandwidths
        .iter()
        .zip(start_small)
        .map(|(&b, &s)| crate::association::SpAllocation::new(b - s, s))
        .collect();
    let mut profile = AllocationProfile::new(per_sp, b_unlicensed)?;
    let mut step = f64::INFINITY;
    for _ in 0..max_rounds {
        step = 0.0;
        for (i, &b) in bandwidths.iter().enumerate() {
            let s = best_response(i, &profile, params);
            step = step.max((s - profile.per_sp[i].b_small).abs());
            profile.per_sp[i] = crate::association::SpAllocation::new(b - s, s);
        }
        if step <= tol {
            return Ok(profile.per_sp.iter().map(|sp| sp.b_small).collect());
        }
    }
    Err(MarketError::OracleDiverged {
        iterations: max_rounds,
        last_step: step,
    })
}
