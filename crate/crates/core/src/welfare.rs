//! Planner benchmark and the licensed/unlicensed split of a new band.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{MarketError, Result};
use crate::market::{Bandwidth, MarketParams, Welfare};
use crate::monopoly::{self, Objective};
use crate::numeric::{bisect, golden_max};
use crate::oligopoly;

/// Which fixed-user tier has the higher rate multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerCase {
    SmallDominates,
    Tie,
    UnlicensedDominates,
}

/// A three-way split of the band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSplit {
    pub b_macro: Bandwidth,
    pub b_small: Bandwidth,
    pub b_unlicensed: Bandwidth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerSolution {
    pub b_macro: Bandwidth,
    pub b_small: Bandwidth,
    pub b_unlicensed: Bandwidth,
    pub welfare: Welfare,
    pub case_label: PlannerCase,
    /// In a tie the fixed-user bandwidth may equally go unlicensed; this is
    /// that representative.
    pub alternative: Option<BandSplit>,
    /// Whether the unlicensed representative is also reached by the market
    /// (per SP count), when it exists.
    pub alternative_reachable_by_monopoly: Option<bool>,
}

impl PlannerSolution {
    /// Bandwidth serving fixed users, small-cell plus unlicensed.
    pub fn fixed_tier(&self) -> Bandwidth {
        self.b_small + self.b_unlicensed
    }
}

/// Welfare of the planner's split given macro bandwidth and fixed-tier
/// bandwidth at multiplier `lambda`.
fn planner_welfare(
    b_macro: Bandwidth,
    b_fixed: Bandwidth,
    lambda: f64,
    params: &MarketParams,
) -> Welfare {
    let r_m = params.macro_capacity(b_macro) / params.n_mobile();
    let r_f = lambda * params.macro_capacity(b_fixed) / params.n_fixed();
    params.n_mobile() * params.utility(r_m) + params.n_fixed() * params.utility(r_f)
}

/// Welfare-maximizing split of `b` across macro, small and unlicensed with
/// no pricing.
pub fn planner_optimal(b: Bandwidth, params: &MarketParams) -> Result<PlannerSolution> {
    if !(b.is_finite() && b > 0.0) {
        return Err(MarketError::invalid(
            "b",
            format!("band must be > 0, got {b}"),
        ));
    }
    let a = params.alpha();
    let (ls, lu) = (params.lambda_s(), params.lambda_u());
    let case_label = if ls > lu {
        PlannerCase::SmallDominates
    } else if ls < lu {
        PlannerCase::UnlicensedDominates
    } else {
        PlannerCase::Tie
    };
    let lambda = ls.max(lu);
    let mu = lambda.powf(1.0 / a - 1.0);
    let n_m = params.n_mobile();
    let n_f = params.n_fixed();
    let b_macro = n_m * b / (n_m + mu * n_f);
    let b_fixed = mu * n_f * b / (n_m + mu * n_f);
    let welfare = planner_welfare(b_macro, b_fixed, lambda, params);
    let (b_small, b_unlicensed) = match case_label {
        PlannerCase::UnlicensedDominates => (0.0, b_fixed),
        _ => (b_fixed, 0.0),
    };
    let (alternative, alternative_reachable_by_monopoly) = if case_label == PlannerCase::Tie {
        (
            Some(BandSplit {
                b_macro,
                b_small: 0.0,
                b_unlicensed: b_fixed,
            }),
            Some(efficiency_condition(params, 1.0)),
        )
    } else {
        (None, None)
    };
    Ok(PlannerSolution {
        b_macro,
        b_small,
        b_unlicensed,
        welfare,
        case_label,
        alternative,
        alternative_reachable_by_monopoly,
    })
}

/// Whether `n_sps` revenue-maximizing SPs are macro-only when given the
/// planner's macro bandwidth and the rest goes unlicensed:
/// `κ^α λ_S/λ_U + α/N ≤ 1`. `n_sps` may be infinite.
pub fn efficiency_condition(params: &MarketParams, n_sps: f64) -> bool {
    let a = params.alpha();
    params.kappa().powf(a) * params.lambda_s() / params.lambda_u() + a / n_sps <= 1.0
}

/// Curvature below which a monopolist reaches the planner optimum when
/// unlicensed access is the better fixed-user tier: root of
/// `κ(α)^α ρ + α = 1` with `ρ = λ_S/λ_U < 1`.
pub fn alpha0(ratio: f64) -> Option<f64> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return None;
    }
    let f = |a: f64| crate::market::kappa(a).powf(a) * ratio + a - 1.0;
    bisect(f, 1e-9, 1.0 - 1e-9)
}

/// A market structure whose welfare is tracked against unlicensed bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarketScenario {
    /// One revenue-maximizing SP.
    MonopolyRevenue,
    /// One welfare-maximizing SP.
    MonopolyWelfare,
    /// `n` identical competing SPs splitting the licensed band equally.
    Oligopoly(usize),
    /// The many-SP limit.
    Asymptotic,
}

impl MarketScenario {
    pub fn label(&self) -> String {
        match self {
            MarketScenario::MonopolyRevenue => "n1_rev".into(),
            MarketScenario::MonopolyWelfare => "n1_sw".into(),
            MarketScenario::Oligopoly(n) => format!("n{n}"),
            MarketScenario::Asymptotic => "ninf".into(),
        }
    }

    /// Market welfare when `b_unlicensed` of `b` is unlicensed.
    pub fn welfare(
        &self,
        b: Bandwidth,
        b_unlicensed: Bandwidth,
        params: &MarketParams,
    ) -> Result<Welfare> {
        let b_l = b - b_unlicensed;
        Ok(match *self {
            MarketScenario::MonopolyRevenue => {
                monopoly::optimize_revenue(b_l, b_unlicensed, params)?.welfare()
            }
            MarketScenario::MonopolyWelfare => {
                monopoly::optimize_welfare(b_l, b_unlicensed, params)?.welfare()
            }
            MarketScenario::Oligopoly(n) => {
                oligopoly::symmetric_equilibrium(n, b_l / n as f64, b_unlicensed, params)?
                    .outcome
                    .social_welfare
            }
            MarketScenario::Asymptotic => {
                oligopoly::asymptotic_limit(b_l, b_unlicensed, params)?
                    .outcome
                    .social_welfare
            }
        })
    }

    /// Unlicensed capacity at or above which the market is macro-only when
    /// the licensed band is `b_l`.
    pub fn mne_bound(&self, b_l: Bandwidth, params: &MarketParams) -> f64 {
        match *self {
            MarketScenario::MonopolyRevenue => monopoly::threshold(Objective::Revenue, b_l, params),
            MarketScenario::MonopolyWelfare => {
                monopoly::threshold(Objective::SocialWelfare, b_l, params)
            }
            MarketScenario::Oligopoly(n) => oligopoly::mne_bound(&vec![b_l / n as f64; n], params),
            MarketScenario::Asymptotic => oligopoly::asymptotic_bound(b_l, params),
        }
    }

    /// Whether the market is macro-only at this split.
    pub fn is_macro_only(
        &self,
        b: Bandwidth,
        b_unlicensed: Bandwidth,
        params: &MarketParams,
    ) -> bool {
        let c_u = params.unlicensed_capacity(b_unlicensed);
        let bound = self.mne_bound(b - b_unlicensed, params);
        match self {
            MarketScenario::Asymptotic => c_u > bound,
            _ => c_u >= bound,
        }
    }

    /// SP count for the closed-form efficiency condition, if one applies.
    fn sp_count(&self) -> Option<f64> {
        match *self {
            MarketScenario::MonopolyRevenue => Some(1.0),
            MarketScenario::MonopolyWelfare => None,
            MarketScenario::Oligopoly(n) => Some(n as f64),
            MarketScenario::Asymptotic => Some(f64::INFINITY),
        }
    }
}

impl fmt::Display for MarketScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for MarketScenario {
    type Err = MarketError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n1_rev" | "n1" => Ok(MarketScenario::MonopolyRevenue),
            "n1_sw" => Ok(MarketScenario::MonopolyWelfare),
            "ninf" => Ok(MarketScenario::Asymptotic),
            _ => s
                .strip_prefix('n')
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= 2)
                .map(MarketScenario::Oligopoly)
                .ok_or_else(|| MarketError::invalid("series", format!("unknown series {s:?}"))),
        }
    }
}

impl Serialize for MarketScenario {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for MarketScenario {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Best licensed/unlicensed split of `b` for a market structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalSplit {
    pub b_licensed: Bandwidth,
    pub b_unlicensed: Bandwidth,
    pub welfare: Welfare,
    pub planner_welfare: Welfare,
    /// Achieved welfare within 1e-6 (relative) of the planner benchmark.
    pub efficient: bool,
    /// Efficiency predicted by the closed-form condition, where one exists.
    pub efficient_predicted: Option<bool>,
}

/// Relative gap to the planner under which a split counts as efficient.
pub const EFFICIENCY_TOLERANCE: f64 = 1e-6;

/// Unlicensed bandwidth never exceeds `b` minus this margin.
pub const UNLICENSED_MARGIN: f64 = 1e-6;

/// Maximizes market welfare over the unlicensed share of `b`.
pub fn optimal_split(
    b: Bandwidth,
    market: MarketScenario,
    params: &MarketParams,
) -> Result<OptimalSplit> {
    let planner = planner_optimal(b, params)?;
    let hi = b - UNLICENSED_MARGIN;
    let eval = |x: f64| market.welfare(b, x, params);

    // Welfare can dip and recover along B_U, so scan before refining.
    const SCAN: usize = 400;
    let step = hi / SCAN as f64;
    let mut values = Vec::with_capacity(SCAN + 1);
    for k in 0..=SCAN {
        let x = if k == SCAN { hi } else { step * k as f64 };
        values.push((x, eval(x)?));
    }
    let mut best = values[0];
    let mut best_k = 0;
    for (k, v) in values.iter().enumerate() {
        if v.1 > best.1 {
            best = *v;
            best_k = k;
        }
    }
    let lo_b = values[best_k.saturating_sub(1)].0;
    let hi_b = values[(best_k + 1).min(SCAN)].0;
    let mut failure = None;
    let refined = golden_max(
        |x| match eval(x) {
            Ok(w) => w,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        lo_b,
        hi_b,
        1e-10 * b,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if refined.1 > best.1 {
        best = refined;
    }

    let efficient =
        (planner.welfare - best.1).abs() <= EFFICIENCY_TOLERANCE * planner.welfare.abs();
    let efficient_predicted = match planner.case_label {
        PlannerCase::SmallDominates | PlannerCase::Tie => match market {
            MarketScenario::MonopolyWelfare => None,
            _ => Some(true),
        },
        PlannerCase::UnlicensedDominates => {
            market.sp_count().map(|n| efficiency_condition(params, n))
        }
    };
    Ok(OptimalSplit {
        b_licensed: b - best.0,
        b_unlicensed: best.0,
        welfare: best.1,
        planner_welfare: planner.welfare,
        efficient,
        efficient_predicted,
    })
}

/// Uniform grid of `points` unlicensed bandwidths on `[0, b - 1e-6]`.
pub fn uniform_grid(b: Bandwidth, points: usize) -> Vec<Bandwidth> {
    let points = points.max(2);
    let hi = b - UNLICENSED_MARGIN;
    (0..points)
        .map(|k| {
            if k == points - 1 {
                hi
            } else {
                hi * k as f64 / (points - 1) as f64
            }
        })
        .collect()
}

/// Tolerance on refined kink locations.
pub const KINK_TOLERANCE: f64 = 1e-8;

/// Smallest unlicensed bandwidth at which `market` turns macro-only: the
/// first grid point meeting the macro-only condition, refined by bisection
/// against its predecessor.
pub fn detect_kink(
    market: MarketScenario,
    b: Bandwidth,
    grid: &[Bandwidth],
    params: &MarketParams,
) -> Option<Bandwidth> {
    let first = grid
        .iter()
        .position(|&x| market.is_macro_only(b, x, params))?;
    if first == 0 {
        return Some(grid[0]);
    }
    let (mut lo, mut hi) = (grid[first - 1], grid[first]);
    while hi - lo > KINK_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if market.is_macro_only(b, mid, params) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Sorted union of a grid and kink points, duplicates removed.
pub fn merge_kinks(
    grid: &[Bandwidth],
    kinks: impl IntoIterator<Item = Bandwidth>,
) -> Vec<Bandwidth> {
    let mut all: Vec<Bandwidth> = grid.iter().copied().chain(kinks).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelfareSeries {
    pub market: MarketScenario,
    pub values: Vec<Welfare>,
    pub kink: Option<Bandwidth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelfareCurve {
    pub b: Bandwidth,
    pub grid: Vec<Bandwidth>,
    pub planner: Vec<Welfare>,
    pub series: Vec<WelfareSeries>,
}

impl WelfareCurve {
    pub fn series(&self, market: MarketScenario) -> Option<&WelfareSeries> {
        self.series.iter().find(|s| s.market == market)
    }
}

/// Welfare against unlicensed bandwidth for each market, on `grid` plus the
/// refined kink points.
pub fn welfare_sweep(
    b: Bandwidth,
    grid: &[Bandwidth],
    markets: &[MarketScenario],
    params: &MarketParams,
) -> Result<WelfareCurve> {
    if let Some(x) = grid.iter().find(|&&x| !(0.0..b).contains(&x)) {
        return Err(MarketError::invalid(
            "grid",
            format!("points must lie in [0, {b}), got {x}"),
        ));
    }
    let planner = planner_optimal(b, params)?;
    let kinks: Vec<Option<Bandwidth>> = markets
        .iter()
        .map(|m| detect_kink(*m, b, grid, params))
        .collect();
    let full_grid = merge_kinks(grid, kinks.iter().flatten().copied());
    let series = markets
        .iter()
        .zip(kinks)
        .map(|(m, kink)| {
            let values = full_grid
                .iter()
                .map(|&x| m.welfare(b, x, params))
                .collect::<Result<Vec<_>>>()?;
            Ok(WelfareSeries {
                market: *m,
                values,
                kink,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WelfareCurve {
        b,
        planner: vec![planner.welfare; full_grid.len()],
        grid: full_grid,
        series,
    })
}
