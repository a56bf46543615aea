//! Bandwidth-allocation game among competing SPs.
//!
//! Prices follow in closed form from [`crate::association`], so the game is
//! played over each SP's split of its own band. Every SP uses its full band
//! and the equilibrium is in the separate-service regime. An SP is either
//! active (positive small-cell bandwidth, first-order condition holds with
//! equality) or pinned to macro-only (marginal gain of small-cell bandwidth
//! non-positive at zero).
//!
//! For a given active set the first-order conditions collapse to one scalar
//! equation in the total small-cell bandwidth `T`, after which each active
//! SP's share is affine in its band `B_i`. Since the slope is positive, the
//! active set consists of the SPs with the largest bands.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::association::{
    shadow_small_rate, solve_association, AllocationProfile, AssociationOutcome, Regime,
    SpAllocation,
};
use crate::error::{MarketError, Result};
use crate::market::{Bandwidth, MarketParams, Rate};
use crate::numeric::{bisect, bracketed_max};

/// Equilibrium type by which SPs deploy small-cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    /// Every SP deploys both macro- and small-cells.
    #[serde(rename = "MSNE")]
    MacroSmall,
    /// Some SPs are macro-only, the rest deploy both.
    #[serde(rename = "MPNE")]
    MacroPreferred,
    /// Every SP is macro-only.
    #[serde(rename = "MNE")]
    MacroOnly,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::MacroSmall => "MSNE",
            Classification::MacroPreferred => "MPNE",
            Classification::MacroOnly => "MNE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub classification: Classification,
    pub profile: AllocationProfile,
    /// Indices of SPs with no small-cell bandwidth.
    pub macro_only_set: Vec<usize>,
    pub outcome: AssociationOutcome,
    /// Per-SP marginal revenue of shifting bandwidth from macro- to
    /// small-cells. Zero for active SPs, non-positive for pinned ones.
    pub kkt_residuals: Vec<f64>,
}

/// SPs with no small-cell bandwidth below this fraction of their band count
/// as pinned to zero.
pub const PIN_TOLERANCE: f64 = 1e-10;

/// Largest market for which the exhaustive active-set fallback runs.
pub const MAX_EXHAUSTIVE_SPS: usize = 12;

fn validate_bands(bandwidths: &[Bandwidth], b_unlicensed: Bandwidth) -> Result<()> {
    if bandwidths.is_empty() {
        return Err(MarketError::invalid(
            "bandwidths",
            "at least one SP is required",
        ));
    }
    if let Some(b) = bandwidths.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
        return Err(MarketError::invalid(
            "bandwidths",
            format!("every band must be > 0, got {b}"),
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

/// Unlicensed capacity at or above which every SP is macro-only.
pub fn mne_bound(bandwidths: &[Bandwidth], params: &MarketParams) -> Rate {
    let a = params.alpha();
    let total: f64 = bandwidths.iter().sum();
    let b_max = bandwidths.iter().copied().fold(0.0, f64::max);
    params.r0() * total / (1.0 - a * b_max / total).powf(1.0 / a)
        * params.kappa()
        * params.n_fixed()
        * params.lambda_s().powf(1.0 / a)
        / params.n_mobile()
}

/// Whether the equilibrium for these bands is macro-only.
pub fn mne_condition(
    bandwidths: &[Bandwidth],
    b_unlicensed: Bandwidth,
    params: &MarketParams,
) -> bool {
    params.unlicensed_capacity(b_unlicensed) >= mne_bound(bandwidths, params)
}

/// Marginal revenue of SP `sp` for moving bandwidth from macro- to
/// small-cells, in the separate-service regime. With no small-cell
/// bandwidth in the market the small-cell rate is its one-sided limit
/// `C_U/(κ N_f)`.
pub fn marginal_revenue(profile: &AllocationProfile, sp: usize, params: &MarketParams) -> f64 {
    let r0 = params.r0();
    let ls = params.lambda_s();
    let total_small = profile.total_small();
    let r_s = if total_small > 0.0 {
        (params.kappa() * params.small_capacity(total_small) + profile.unlicensed_capacity(params))
            / (params.kappa() * params.n_fixed())
    } else {
        shadow_small_rate(profile.b_unlicensed, params)
    };
    let r_m = profile.macro_capacity(params) / params.n_mobile();
    let own = profile.per_sp[sp];
    let small = ls
        * r0
        * (params.marginal_utility(r_s)
            + ls * own.b_small * r0 / params.n_fixed() * params.utility_second_derivative(r_s));
    let macro_ = r0
        * (params.marginal_utility(r_m)
            + own.b_macro * r0 / params.n_mobile() * params.utility_second_derivative(r_m));
    small - macro_
}

/// Candidate small-cell bandwidths when the SPs flagged in `active` satisfy
/// their first-order conditions with equality and the rest hold none.
///
/// Returns the unconstrained affine candidate for every SP (pinned SPs
/// included, whose sign is their KKT test), or `None` when the aggregate
/// equation has no root with positive total small-cell bandwidth.
fn active_set_candidates(
    bandwidths: &[Bandwidth],
    active: &[bool],
    c_u: Rate,
    params: &MarketParams,
) -> Option<Vec<Bandwidth>> {
    let a = params.alpha();
    let r0 = params.r0();
    let ls = params.lambda_s();
    let n_f = params.n_fixed();
    let n_m = params.n_mobile();
    let kappa = params.kappa();
    let total: f64 = bandwidths.iter().sum();
    let l = active.iter().filter(|&&x| x).count() as f64;
    if l == 0.0 {
        return None;
    }
    let b_active: f64 = bandwidths
        .iter()
        .zip(active)
        .filter(|(_, &x)| x)
        .map(|(b, _)| b)
        .sum();

    let r_small = |t: f64| (kappa * ls * t * r0 + c_u) / (kappa * n_f);
    let r_macro = |t: f64| (total - t) * r0 / n_m;
    let aggregate = |t: f64| {
        let rs = r_small(t);
        let rm = r_macro(t);
        ls * (l * rs.powf(-a) - a * ls * t * r0 / n_f * rs.powf(-a - 1.0))
            - (l * rm.powf(-a) - a * (b_active - t) * r0 / n_m * rm.powf(-a - 1.0))
    };
    let lo = 1e-12 * b_active;
    let hi = b_active * (1.0 - 1e-12);
    let (g_lo, g_hi) = (aggregate(lo), aggregate(hi));
    if g_lo.is_nan() || g_hi.is_nan() || g_lo <= 0.0 || g_hi >= 0.0 {
        return None;
    }
    let t = bisect(aggregate, lo, hi)?;
    let rs = r_small(t);
    let rm = r_macro(t);
    let u1_s = params.marginal_utility(rs);
    let u2_s = params.utility_second_derivative(rs);
    let u1_m = params.marginal_utility(rm);
    let u2_m = params.utility_second_derivative(rm);
    let denom = ls * ls * r0 * u2_s / n_f + r0 * u2_m / n_m;
    Some(
        bandwidths
            .iter()
            .map(|&b| (u1_m + r0 * u2_m * b / n_m - ls * u1_s) / denom)
            .collect(),
    )
}

fn consistent_assignment(
    bandwidths: &[Bandwidth],
    active: &[bool],
    candidates: &[Bandwidth],
    tol: f64,
) -> bool {
    bandwidths
        .iter()
        .zip(active)
        .zip(candidates)
        .all(|((&b, &is_active), &c)| {
            if is_active {
                c > tol.min(PIN_TOLERANCE) * b && c < b
            } else {
                c <= tol * b
            }
        })
}

fn finish(
    bandwidths: &[Bandwidth],
    small: Vec<Bandwidth>,
    b_unlicensed: Bandwidth,
    params: &MarketParams,
) -> Result<EquilibriumResult> {
    let per_sp = bandwidths
        .iter()
        .zip(&small)
        .map(|(&b, &s)| SpAllocation::new(b - s, s))
        .collect();
    let profile = AllocationProfile::new(per_sp, b_unlicensed)?;
    let outcome = solve_association(&profile, params)?;
    if outcome.regime != Regime::SeparateService {
        return Err(MarketError::Internal(
            "equilibrium candidate landed in the mixed-service regime".into(),
        ));
    }
    let macro_only_set: Vec<usize> = small
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == 0.0)
        .map(|(i, _)| i)
        .collect();
    let classification = if macro_only_set.is_empty() {
        Classification::MacroSmall
    } else if macro_only_set.len() == bandwidths.len() {
        Classification::MacroOnly
    } else {
        Classification::MacroPreferred
    };
    let kkt_residuals = (0..bandwidths.len())
        .map(|i| marginal_revenue(&profile, i, params))
        .collect();
    Ok(EquilibriumResult {
        classification,
        profile,
        macro_only_set,
        outcome,
        kkt_residuals,
    })
}

fn assignment_result(
    bandwidths: &[Bandwidth],
    active: &[bool],
    c_u: Rate,
    tol: f64,
    params: &MarketParams,
) -> Option<Vec<Bandwidth>> {
    let candidates = active_set_candidates(bandwidths, active, c_u, params)?;
    if !consistent_assignment(bandwidths, active, &candidates, tol) {
        return None;
    }
    Some(
        candidates
            .into_iter()
            .zip(active)
            .map(|(c, &is_active)| if is_active { c } else { 0.0 })
            .collect(),
    )
}

/// Pinned-SP tolerance for the second pass, used when candidates sit right
/// on a region boundary.
const LOOSE_PIN_TOLERANCE: f64 = 1e-6;

fn search_active_sets(
    bandwidths: &[Bandwidth],
    c_u: Rate,
    tol: f64,
    params: &MarketParams,
) -> Option<Vec<Bandwidth>> {
    let n = bandwidths.len();
    // Pin SPs in increasing order of band; equal bands move together.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| bandwidths[j].total_cmp(&bandwidths[i]));
    for k in (1..=n).rev() {
        if k < n && bandwidths[order[k - 1]] == bandwidths[order[k]] {
            continue;
        }
        let mut active = vec![false; n];
        for &i in &order[..k] {
            active[i] = true;
        }
        if let Some(small) = assignment_result(bandwidths, &active, c_u, tol, params) {
            return Some(small);
        }
    }
    if n > MAX_EXHAUSTIVE_SPS {
        return None;
    }
    (1u32..(1u32 << n)).find_map(|mask| {
        let active: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
        assignment_result(bandwidths, &active, c_u, tol, params)
    })
}

/// Unique sub-game perfect equilibrium of the bandwidth game.
pub fn solve_nash(
    bandwidths: &[Bandwidth],
    b_unlicensed: Bandwidth,
    params: &MarketParams,
) -> Result<EquilibriumResult> {
    validate_bands(bandwidths, b_unlicensed)?;
    let n = bandwidths.len();
    if mne_condition(bandwidths, b_unlicensed, params) {
        return finish(bandwidths, vec![0.0; n], b_unlicensed, params);
    }
    let c_u = params.unlicensed_capacity(b_unlicensed);
    for tol in [PIN_TOLERANCE, LOOSE_PIN_TOLERANCE] {
        if let Some(small) = search_active_sets(bandwidths, c_u, tol, params) {
            return finish(bandwidths, small, b_unlicensed, params);
        }
    }
    // a hair below the macro-only bound every active set degenerates
    if c_u >= mne_bound(bandwidths, params) * (1.0 - 1e-9) {
        return finish(bandwidths, vec![0.0; n], b_unlicensed, params);
    }
    if n > MAX_EXHAUSTIVE_SPS {
        Err(MarketError::Internal(format!(
            "ordered pinning found no equilibrium and exhaustive search is limited to {MAX_EXHAUSTIVE_SPS} SPs (got {n})"
        )))
    } else {
        Err(MarketError::Internal(format!(
            "no consistent active set among {} candidates",
            (1u32 << n) - 1
        )))
    }
}

/// Revenue-maximizing small-cell bandwidth for SP `sp` with every other SP's
/// split held fixed. SP `sp`'s band is its current total in `profile`.
pub fn best_response(sp: usize, profile: &AllocationProfile, params: &MarketParams) -> Bandwidth {
    let b_i = profile.per_sp[sp].total();
    let mut trial = profile.clone();
    let revenue = |x: f64| {
        trial.per_sp[sp] = SpAllocation::new(b_i - x, x);
        match solve_association(&trial, params) {
            Ok(o) => o.revenue_per_sp[sp],
            Err(_) => f64::NEG_INFINITY,
        }
    };
    bracketed_max(revenue, 0.0, b_i, 64, 1e-12 * b_i.max(1.0)).0
}

/// Equilibrium when all `n` SPs hold the same band `b`.
pub fn symmetric_equilibrium(
    n: usize,
    b: Bandwidth,
    b_unlicensed: Bandwidth,
    params: &MarketParams,
) -> Result<EquilibriumResult> {
    if n == 0 {
        return Err(MarketError::invalid("n", "at least one SP is required"));
    }
    let bands = vec![b; n];
    validate_bands(&bands, b_unlicensed)?;
    if mne_condition(&bands, b_unlicensed, params) {
        return finish(&bands, vec![0.0; n], b_unlicensed, params);
    }
    let a = params.alpha();
    let r0 = params.r0();
    let ls = params.lambda_s();
    let kappa = params.kappa();
    let nf = n as f64;
    let c_u = params.unlicensed_capacity(b_unlicensed);
    let g = |b_s: f64| {
        let x = kappa * nf * b_s * ls * r0 + c_u;
        let small =
            (kappa * params.n_fixed() / x).powf(a) * ls * (1.0 - a * kappa * ls * b_s * r0 / x);
        let macro_ = (1.0 - a / nf) * (params.n_mobile() / (nf * (b - b_s) * r0)).powf(a);
        small - macro_
    };
    let eps = 1e-12 * b;
    let b_s = if g(eps) <= 0.0 {
        0.0
    } else if g(b - eps) >= 0.0 {
        b - eps
    } else {
        bisect(g, eps, b - eps).ok_or_else(|| {
            MarketError::Internal("symmetric first-order condition not bracketed".into())
        })?
    };
    finish(&bands, vec![b_s; n], b_unlicensed, params)
}

/// Aggregate allocation in the limit of many identical SPs sharing `b_total`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticLimit {
    pub classification: Classification,
    pub b_macro: Bandwidth,
    pub b_small: Bandwidth,
    pub outcome: AssociationOutcome,
}

/// Unlicensed capacity above which the many-SP limit is macro-only.
pub fn asymptotic_bound(b_total: Bandwidth, params: &MarketParams) -> Rate {
    let a = params.alpha();
    params.r0() * b_total * params.kappa() * params.n_fixed() * params.lambda_s().powf(1.0 / a)
        / params.n_mobile()
}

/// Limit of `(N B_{i,M}, N B_{i,S})` as the number of SPs grows with the
/// total licensed band held at `b_total`.
pub fn asymptotic_limit(
    b_total: Bandwidth,
    b_unlicensed: Bandwidth,
    params: &MarketParams,
) -> Result<AsymptoticLimit> {
    validate_bands(&[b_total], b_unlicensed)?;
    let a = params.alpha();
    let ls = params.lambda_s();
    let ls_root = ls.powf(1.0 / a);
    let n_f = params.n_fixed();
    let n_m = params.n_mobile();
    let kappa = params.kappa();
    let bu_lu = b_unlicensed * params.lambda_u();

    let (b_macro, b_small, classification) = if params.unlicensed_capacity(b_unlicensed)
        > asymptotic_bound(b_total, params)
    {
        (b_total, 0.0, Classification::MacroOnly)
    } else {
        let ratio = ls * n_m / (ls_root * n_f);
        let b_small = ((b_total - bu_lu * n_m / (kappa * n_f * ls_root)) / (1.0 + ratio)).max(0.0);
        let b_macro = b_total - b_small;
        let class = if b_small > 0.0 {
            Classification::MacroSmall
        } else {
            Classification::MacroOnly
        };
        (b_macro, b_small, class)
    };
    let profile = AllocationProfile::monopoly(b_macro, b_small, b_unlicensed)?;
    let outcome = solve_association(&profile, params)?;
    Ok(AsymptoticLimit {
        classification,
        b_macro,
        b_small,
        outcome,
    })
}
