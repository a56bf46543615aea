//! Shared scenario generators and checks for the integration suites.
#![allow(dead_code)]

use hetnet_market::association::{
    regime_threshold, solve_association, AllocationProfile, Regime, SpAllocation,
};
use hetnet_market::market::{demand, kappa, net_payoff, utility, MarketParams};
use hetnet_market::monopoly::{self, Objective};
use hetnet_market::oligopoly::{
    self, best_response, marginal_revenue, Classification, EquilibriumResult,
};
use hetnet_market::oracle::{grid_argmax, payoff_equalization_fixed_point, GridSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        // NaN comparisons fail the check
        if $cond {
        } else {
            return Err(format!($($fmt)+));
        }
    };
}

/// A randomized market: parameters, per-SP bands and unlicensed band.
#[derive(Debug, Clone)]
pub struct Draw {
    pub params: MarketParams,
    pub bands: Vec<f64>,
    pub b_unlicensed: f64,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_params(rng: &mut impl Rng) -> MarketParams {
    MarketParams::new(
        rng.gen_range(0.1..=0.9),
        rng.gen_range(10.0..=100.0),
        rng.gen_range(10.0..=100.0),
        rng.gen_range(10.0..=100.0),
        1.0 + rng.gen_range(1e-3..=7.0),
        rng.gen_range(1e-3..=12.0),
    )
    .unwrap()
}

/// Random market with 1 to `max_sps` SPs. Unlicensed capacity is drawn
/// relative to the macro-only bound so all equilibrium types occur.
pub fn random_draw(rng: &mut impl Rng, max_sps: usize) -> Draw {
    let params = random_params(rng);
    let n = rng.gen_range(1..=max_sps);
    let mut bands: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..=4.0)).collect();
    if n > 1 && rng.gen_bool(0.3) {
        bands[1] = bands[0];
    }
    let bound = oligopoly::mne_bound(&bands, &params);
    let c_u = match rng.gen_range(0..4) {
        0 => 0.0,
        1 => rng.gen_range(0.0..=1.5) * bound,
        _ => params.unlicensed_capacity(rng.gen_range(0.0..=4.0)),
    };
    Draw {
        b_unlicensed: params.unlicensed_bandwidth_for(c_u),
        params,
        bands,
    }
}

/// Random fixed allocation, including empty tiers.
pub fn random_profile(rng: &mut impl Rng, max_sps: usize) -> AllocationProfile {
    let n = rng.gen_range(1..=max_sps);
    let mut part = |zero_p: f64| {
        if rng.gen_bool(zero_p) {
            0.0
        } else {
            rng.gen_range(0.01..=4.0)
        }
    };
    let per_sp = (0..n)
        .map(|_| SpAllocation::new(part(0.0), part(0.2)))
        .collect();
    let b_u = part(0.25);
    AllocationProfile::new(per_sp, b_u).unwrap()
}

// ---------------------------------------------------------------- association

pub fn check_association(profile: &AllocationProfile, p: &MarketParams) -> Check {
    let o = solve_association(profile, p).map_err(|e| e.to_string())?;
    let a = p.alpha();
    let k = kappa(a);
    ensure!(
        rel_close(o.total_mass(), p.n_total(), 1e-9),
        "mass {} != {}",
        o.total_mass(),
        p.n_total()
    );
    let c_m = profile.macro_capacity(p);
    let c_s = profile.small_capacity(p);
    let c_u = profile.unlicensed_capacity(p);
    if o.k_macro > 0.0 {
        let pm = o.p_macro.value().ok_or("macro price missing")?;
        let cleared = o.k_macro * demand(pm, a).unwrap();
        ensure!(
            rel_close(cleared, c_m, 1e-9),
            "macro demand {cleared} != capacity {c_m}"
        );
    }
    if o.k_small > 0.0 {
        let ps = o.p_small.value().ok_or("small price missing")?;
        let cleared = o.k_small * demand(ps, a).unwrap();
        ensure!(
            rel_close(cleared, c_s, 1e-9),
            "small demand {cleared} != capacity {c_s}"
        );
    }
    if o.k_unlicensed > 0.0 {
        ensure!(
            rel_close(o.k_unlicensed * o.r_unlicensed, c_u, 1e-9),
            "unlicensed rate does not use capacity"
        );
    }
    match o.regime {
        Regime::MixedService => {
            if let (Some(pm), Some(ps)) = (o.p_macro.value(), o.p_small.value()) {
                ensure!(
                    rel_close(pm, ps, 1e-9),
                    "mixed regime prices differ: {pm} vs {ps}"
                );
            }
            if o.k_unlicensed > 0.0 {
                ensure!(
                    rel_close(o.r_unlicensed, k * o.r_macro, 1e-9),
                    "mixed unlicensed rate != kappa * macro rate"
                );
            }
        }
        Regime::SeparateService => {
            let at_boundary = rel_close(profile.total_small(), regime_threshold(profile, p), 1e-9);
            if o.k_small > 0.0 && !at_boundary {
                ensure!(
                    o.p_macro.value().unwrap() > o.p_small.value().unwrap(),
                    "separate regime needs p_macro > p_small, got {:?} {:?}",
                    o.p_macro,
                    o.p_small
                );
            }
        }
    }
    if o.k_small > 0.0 && o.k_unlicensed > 0.0 {
        ensure!(
            rel_close(o.r_unlicensed, k * o.r_small, 1e-9),
            "r_u {} != kappa * r_s {}",
            o.r_unlicensed,
            k * o.r_small
        );
        let lhs = net_payoff(o.p_small.value().unwrap(), a).unwrap();
        let rhs = utility(o.r_unlicensed, a);
        ensure!(
            (lhs - rhs).abs() <= 1e-9 * rhs,
            "payoffs not equalized: {lhs} vs {rhs}"
        );
    }
    // single common price per tier across SPs
    let pm = o.p_macro.value().unwrap_or(0.0);
    let ps = o.p_small.value().unwrap_or(0.0);
    for (i, sp) in profile.per_sp.iter().enumerate() {
        let s = p.macro_capacity(sp.b_macro) * pm + p.small_capacity(sp.b_small) * ps;
        ensure!(
            rel_close(o.revenue_per_sp[i], s, 1e-12),
            "SP {i} revenue not at common prices"
        );
    }
    Ok(())
}

/// Scaling small-cell bandwidth from 0 upward flips the regime at most once.
pub fn check_regime_monotone(profile: &AllocationProfile, p: &MarketParams) -> Check {
    let threshold = regime_threshold(profile, p);
    let reach = (2.0 * threshold).max(1.0);
    let base = profile.total_small().max(1e-9);
    let mut flips = 0;
    let mut last = None;
    for k in 0..=200 {
        let target = reach * k as f64 / 200.0;
        let mut scaled = profile.clone();
        for sp in &mut scaled.per_sp {
            sp.b_small = if profile.total_small() > 0.0 {
                sp.b_small * target / base
            } else {
                target / profile.n_sps() as f64
            };
        }
        let regime = hetnet_market::association::classify_regime(&scaled, p);
        if let Some(prev) = last {
            if prev != regime {
                flips += 1;
            }
        }
        last = Some(regime);
    }
    ensure!(flips <= 1, "regime flipped {flips} times");
    Ok(())
}

// ---------------------------------------------------------------- monopoly

pub fn check_monopoly(b: f64, b_u: f64, p: &MarketParams) -> Check {
    let c_u = p.unlicensed_capacity(b_u);
    let beta = monopoly::beta_tilde(p);
    let rev0 = monopoly::optimize_revenue(b, 0.0, p).map_err(|e| e.to_string())?;
    let sw0 = monopoly::optimize_welfare(b, 0.0, p).map_err(|e| e.to_string())?;
    ensure!(
        rel_close(rev0.b_small, beta * b, 1e-9),
        "no-unlicensed split {} != beta*B",
        rev0.b_small
    );
    ensure!(
        rel_close(sw0.b_small, rev0.b_small, 1e-9),
        "no-unlicensed objectives disagree"
    );
    for obj in [Objective::Revenue, Objective::SocialWelfare] {
        let s = monopoly::optimize(obj, b, b_u, p).map_err(|e| e.to_string())?;
        ensure!(
            rel_close(s.b_macro + s.b_small, b, 1e-12),
            "{obj:?} leaves band unused"
        );
        ensure!(s.b_macro > 0.0, "{obj:?} macro band is zero");
        ensure!(
            s.outcome.regime == Regime::SeparateService,
            "{obj:?} optimum not separate service"
        );
        let limit = monopoly::threshold(obj, b, p);
        ensure!(
            s.boundary == (c_u >= limit),
            "{obj:?} boundary flag wrong at C_U={c_u}, threshold {limit}"
        );
    }
    if b_u > 1e-6 {
        let rev = monopoly::optimize_revenue(b, b_u, p).unwrap();
        ensure!(
            rev.revenue() < rev0.revenue(),
            "revenue with unlicensed access not lower"
        );
        let sw = monopoly::optimize_welfare(b, b_u, p).unwrap();
        ensure!(
            sw.b_small < sw0.b_small,
            "welfare optimum did not shrink small-cells"
        );
        let c_th = monopoly::threshold_crossover(b, p);
        let gap = (c_u - c_th) / c_th;
        if gap < -1e-6 {
            ensure!(
                rev.b_small > beta * b,
                "below crossover: {} <= {}",
                rev.b_small,
                beta * b
            );
        } else if gap > 1e-6 {
            ensure!(
                rev.b_small < beta * b,
                "above crossover: {} >= {}",
                rev.b_small,
                beta * b
            );
        }
    }
    Ok(())
}

/// Grid search over the small-cell band using the association solver.
pub fn monopoly_grid_oracle(obj: Objective, b: f64, b_u: f64, p: &MarketParams) -> f64 {
    let spec = GridSpec::with_step(0.0, b, 1e-4).unwrap();
    grid_argmax(
        |x| match solve_association(&AllocationProfile::monopoly(b - x, x, b_u).unwrap(), p) {
            Ok(o) => match obj {
                Objective::Revenue => o.total_revenue(),
                Objective::SocialWelfare => o.social_welfare,
            },
            Err(_) => f64::NEG_INFINITY,
        },
        spec,
    )
    .0
}

pub fn check_monopoly_oracle(b: f64, b_u: f64, p: &MarketParams) -> Check {
    for obj in [Objective::Revenue, Objective::SocialWelfare] {
        let s = monopoly::optimize(obj, b, b_u, p).map_err(|e| e.to_string())?;
        let g = monopoly_grid_oracle(obj, b, b_u, p);
        ensure!(
            (s.b_small - g).abs() <= 1e-3,
            "{obj:?}: solver {} vs grid {g}",
            s.b_small
        );
    }
    Ok(())
}

// ---------------------------------------------------------------- oligopoly

fn revenue_at(profile: &AllocationProfile, sp: usize, x: f64, p: &MarketParams) -> f64 {
    let mut t = profile.clone();
    let b = t.per_sp[sp].total();
    t.per_sp[sp] = SpAllocation::new(b - x, x);
    solve_association(&t, p)
        .map(|o| o.revenue_per_sp[sp])
        .unwrap_or(f64::NEG_INFINITY)
}

pub fn check_equilibrium(d: &Draw) -> Check {
    let p = &d.params;
    let eq = oligopoly::solve_nash(&d.bands, d.b_unlicensed, p).map_err(|e| e.to_string())?;
    check_equilibrium_structure(&eq, d)?;
    check_kkt(&eq, p)?;
    check_props(&eq, d)?;
    Ok(())
}

pub fn check_equilibrium_structure(eq: &EquilibriumResult, d: &Draw) -> Check {
    ensure!(
        eq.outcome.regime == Regime::SeparateService,
        "equilibrium not separate service"
    );
    for (i, (sp, &b)) in eq.profile.per_sp.iter().zip(&d.bands).enumerate() {
        ensure!(rel_close(sp.total(), b, 1e-12), "SP {i} leaves band unused");
        ensure!(sp.b_macro > 0.0, "SP {i} is small-only");
    }
    if eq.outcome.k_small > 0.0 {
        ensure!(
            eq.outcome.r_small > eq.outcome.r_macro,
            "r_small <= r_macro with active small-cells"
        );
    }
    Ok(())
}

/// Re-derives the classification from raw first-order signs.
pub fn check_kkt(eq: &EquilibriumResult, p: &MarketParams) -> Check {
    let n = eq.profile.n_sps();
    let mut active = 0;
    for i in 0..n {
        let mr = marginal_revenue(&eq.profile, i, p);
        let scale = p.r0() * p.lambda_s() * p.marginal_utility(eq.outcome.r_macro.max(1e-300));
        if eq.profile.per_sp[i].b_small > 0.0 {
            active += 1;
            ensure!(
                mr.abs() <= 1e-6 * scale,
                "active SP {i} first-order residual {mr:e}"
            );
        } else {
            ensure!(
                mr <= 1e-9 * scale,
                "pinned SP {i} wants small-cells: {mr:e}"
            );
        }
    }
    let expected = match active {
        0 => Classification::MacroOnly,
        k if k == n => Classification::MacroSmall,
        _ => Classification::MacroPreferred,
    };
    ensure!(
        eq.classification == expected,
        "classified {:?}, KKT says {expected:?}",
        eq.classification
    );
    ensure!(
        eq.macro_only_set.len() == n - active,
        "macro-only set size {} != {}",
        eq.macro_only_set.len(),
        n - active
    );
    Ok(())
}

pub fn check_props(eq: &EquilibriumResult, d: &Draw) -> Check {
    let sps = &eq.profile.per_sp;
    for i in 0..sps.len() {
        for j in 0..sps.len() {
            let (bi, bj) = (d.bands[i], d.bands[j]);
            if bi == bj {
                ensure!(
                    (sps[i].b_small - sps[j].b_small).abs() < 1e-9,
                    "equal bands {i},{j} split differently"
                );
            } else if bi > bj {
                let tol = 1e-9 * bi;
                ensure!(
                    sps[i].b_small >= sps[j].b_small - tol,
                    "small-cell order violated for {i}>{j}"
                );
                ensure!(
                    sps[i].b_macro >= sps[j].b_macro - tol,
                    "macro order violated for {i}>{j}"
                );
                if sps[j].b_small > 0.0 {
                    ensure!(
                        sps[i].b_small > sps[j].b_small && sps[i].b_macro > sps[j].b_macro,
                        "interior order not strict for {i}>{j}"
                    );
                }
            }
        }
    }
    // a lone SP can raise small-cell bandwidth when unlicensed capacity is low
    if eq.classification == Classification::MacroSmall && d.b_unlicensed > 0.0 && d.bands.len() >= 2
    {
        let base = oligopoly::solve_nash(&d.bands, 0.0, &d.params).unwrap();
        ensure!(
            eq.profile.total_small() < base.profile.total_small(),
            "competition with unlicensed access did not shrink small-cells"
        );
    }
    Ok(())
}

/// 200 unilateral deviations per SP never beat the equilibrium revenue.
pub fn check_deviations(eq: &EquilibriumResult, p: &MarketParams) -> Check {
    for i in 0..eq.profile.n_sps() {
        let b = eq.profile.per_sp[i].total();
        let own = eq.outcome.revenue_per_sp[i];
        for k in 0..200 {
            let x = b * k as f64 / 200.0;
            let dev = revenue_at(&eq.profile, i, x, p);
            ensure!(
                dev <= own * (1.0 + 1e-8),
                "SP {i} gains by deviating to {x}: {dev} > {own}"
            );
        }
    }
    Ok(())
}

pub fn check_best_responses(eq: &EquilibriumResult, p: &MarketParams) -> Check {
    for i in 0..eq.profile.n_sps() {
        let br = best_response(i, &eq.profile, p);
        let s = eq.profile.per_sp[i].b_small;
        ensure!(
            (br - s).abs() <= 1e-4,
            "SP {i} best response {br} vs equilibrium {s}"
        );
    }
    Ok(())
}

pub fn check_fixed_point(profile: &AllocationProfile, p: &MarketParams) -> Check {
    let c = solve_association(profile, p).map_err(|e| e.to_string())?;
    let o = payoff_equalization_fixed_point(profile, p).map_err(|e| e.to_string())?;
    let tol = 1e-8 * p.n_total();
    ensure!(
        (c.k_macro - o.k_macro).abs() <= tol,
        "k_macro {} vs {}",
        c.k_macro,
        o.k_macro
    );
    ensure!(
        (c.k_small - o.k_small).abs() <= tol,
        "k_small {} vs {}",
        c.k_small,
        o.k_small
    );
    ensure!(
        (c.k_unlicensed - o.k_unlicensed).abs() <= tol,
        "k_unlicensed {} vs {}",
        c.k_unlicensed,
        o.k_unlicensed
    );
    Ok(())
}

/// Everything the oracle suite checks for one randomized scenario.
pub fn check_oracle_scenario(d: &Draw) -> Check {
    let p = &d.params;
    let total: f64 = d.bands.iter().sum();
    check_monopoly_oracle(total, d.b_unlicensed, p).map_err(|e| format!("monopoly: {e}"))?;
    let eq = oligopoly::solve_nash(&d.bands, d.b_unlicensed, p).map_err(|e| e.to_string())?;
    check_best_responses(&eq, p).map_err(|e| format!("nash: {e}"))?;
    check_deviations(&eq, p).map_err(|e| format!("nash: {e}"))?;
    check_fixed_point(&eq.profile, p).map_err(|e| format!("fixed point: {e}"))?;
    Ok(())
}

/// Everything the invariant suite checks for one randomized draw.
pub fn check_invariant_draw(rng: &mut impl Rng) -> Check {
    let p = random_params(rng);
    let profile = random_profile(rng, 4);
    if profile.total_macro() > 0.0 {
        check_association(&profile, &p).map_err(|e| format!("association {profile:?}: {e}"))?;
    }
    check_regime_monotone(&profile, &p)?;
    let d = random_draw(rng, 4);
    let total: f64 = d.bands.iter().sum();
    check_monopoly(total, d.b_unlicensed, &d.params).map_err(|e| format!("monopoly {d:?}: {e}"))?;
    check_equilibrium(&d).map_err(|e| format!("nash {d:?}: {e}"))?;
    Ok(())
}

// ---------------------------------------------------------------- reference scenarios

pub fn ref_params(alpha: f64, lambda_u: f64) -> MarketParams {
    MarketParams::new(alpha, 50.0, 50.0, 50.0, 4.0, lambda_u).unwrap()
}

/// Revenue-maximizing small-cell band rises then falls with
/// unlicensed capacity, the welfare-maximizing one never rises, and each
/// reaches zero at its closed-form threshold.
pub fn check_monopoly_split_shape() -> Check {
    let p = ref_params(0.5, 3.0);
    let b = 2.0;
    let c_rev = monopoly::threshold_rev(b, &p);
    let c_sw = monopoly::threshold_sw(b, &p);
    let steps = 4000;
    let c_max = 1.2 * c_rev;
    let mut rev = Vec::with_capacity(steps + 1);
    let mut sw = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let c_u = c_max * k as f64 / steps as f64;
        let b_u = p.unlicensed_bandwidth_for(c_u);
        rev.push((
            c_u,
            monopoly::optimize_revenue(b, b_u, &p)
                .map_err(|e| e.to_string())?
                .b_small,
        ));
        sw.push((
            c_u,
            monopoly::optimize_welfare(b, b_u, &p)
                .map_err(|e| e.to_string())?
                .b_small,
        ));
    }
    let diffs: Vec<f64> = rev
        .windows(2)
        .map(|w| w[1].1 - w[0].1)
        .filter(|d| *d != 0.0)
        .collect();
    ensure!(
        diffs.first().is_some_and(|d| *d > 0.0),
        "revenue split does not rise first"
    );
    let changes = diffs
        .windows(2)
        .filter(|w| (w[0] > 0.0) != (w[1] > 0.0))
        .count();
    ensure!(
        changes <= 1,
        "revenue split changes direction {changes} times"
    );
    ensure!(
        sw.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12),
        "welfare split increases somewhere"
    );
    for (name, series, threshold) in [("revenue", &rev, c_rev), ("welfare", &sw, c_sw)] {
        let first_zero = series
            .iter()
            .find(|(_, s)| *s == 0.0)
            .ok_or(format!("{name} split never reaches zero"))?
            .0;
        ensure!(
            (first_zero - threshold).abs() <= 0.005 * threshold,
            "{name} split hits zero at C_U={first_zero}, threshold {threshold}"
        );
        ensure!(
            series.iter().all(|(c, s)| (*c < threshold) == (*s > 0.0)),
            "{name} split positive on the wrong side of its threshold"
        );
    }
    Ok(())
}

pub fn map_params() -> MarketParams {
    ref_params(0.5, 3.0)
}

fn map_solve(b1: f64, b2: f64) -> Result<EquilibriumResult, String> {
    oligopoly::solve_nash(&[b1, b2], 1.0, &map_params()).map_err(|e| format!("({b1}, {b2}): {e}"))
}

/// Two-SP equilibrium map over `[0.05, 3]²`: all three equilibrium types, macro-only at
/// small bands, both active at large bands, each SP's activity a step
/// function of its own band, a down-closed macro-only region and a
/// non-decreasing MPNE/MSNE boundary.
pub fn check_equilibrium_map(points: usize) -> Check {
    let axis: Vec<f64> = (0..points)
        .map(|k| 0.05 + 2.95 * k as f64 / (points - 1) as f64)
        .collect();
    let mut map = vec![vec![(Classification::MacroOnly, [false; 2]); points]; points];
    for (i, &b1) in axis.iter().enumerate() {
        for (j, &b2) in axis.iter().enumerate() {
            let eq = map_solve(b1, b2)?;
            let act = [
                eq.profile.per_sp[0].b_small > 0.0,
                eq.profile.per_sp[1].b_small > 0.0,
            ];
            map[i][j] = (eq.classification, act);
        }
    }
    for class in [
        Classification::MacroSmall,
        Classification::MacroPreferred,
        Classification::MacroOnly,
    ] {
        ensure!(
            map.iter().flatten().any(|(c, _)| *c == class),
            "no {class} region"
        );
    }
    ensure!(
        map[0][0].0 == Classification::MacroOnly,
        "smallest bands not macro-only"
    );
    ensure!(
        map[points - 1][points - 1].0 == Classification::MacroSmall,
        "largest bands not macro-small"
    );
    for i in 0..points {
        for j in 0..points {
            // own-band step functions
            if j + 1 < points && map[i][j].1[1] && !map[i][j + 1].1[1] {
                return Err(format!(
                    "SP 2 drops small-cells as its band grows at ({}, {})",
                    axis[i], axis[j]
                ));
            }
            if i + 1 < points && map[i][j].1[0] && !map[i + 1][j].1[0] {
                return Err(format!(
                    "SP 1 drops small-cells as its band grows at ({}, {})",
                    axis[i], axis[j]
                ));
            }
            if map[i][j].0 == Classification::MacroOnly {
                let below_ok = (i == 0 || map[i - 1][j].0 == Classification::MacroOnly)
                    && (j == 0 || map[i][j - 1].0 == Classification::MacroOnly);
                ensure!(
                    below_ok,
                    "macro-only region not down-closed at ({}, {})",
                    axis[i],
                    axis[j]
                );
            }
        }
    }
    // SP-2 activation boundary while SP 1 stays active
    let mut last = f64::NEG_INFINITY;
    let mut located = 0;
    for &b1 in &axis {
        let lo_eq = map_solve(b1, 0.05)?;
        let hi_eq = map_solve(b1, 3.0)?;
        let sp1_active =
            lo_eq.profile.per_sp[0].b_small > 0.0 && hi_eq.profile.per_sp[0].b_small > 0.0;
        if !sp1_active
            || lo_eq.profile.per_sp[1].b_small > 0.0
            || hi_eq.profile.per_sp[1].b_small == 0.0
        {
            continue;
        }
        let (mut lo, mut hi) = (0.05, 3.0);
        while hi - lo > 1e-9 {
            let mid = 0.5 * (lo + hi);
            if map_solve(b1, mid)?.profile.per_sp[1].b_small > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        ensure!(
            hi >= last - 1e-8,
            "MPNE/MSNE boundary decreases at B_1={b1}: {hi} < {last}"
        );
        last = hi;
        located += 1;
    }
    ensure!(
        located >= points / 2,
        "MPNE/MSNE boundary located on only {located} rows"
    );
    Ok(())
}
