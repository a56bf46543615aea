use hetnet_market::association::{
    solve_association, AllocationProfile, AssociationOutcome, SpAllocation, TierPrice,
};
use hetnet_market::monopoly::{self, MonopolySolution, Objective};
use hetnet_market::oligopoly::{self, EquilibriumResult};
use hetnet_market::welfare::{
    self, MarketScenario, OptimalSplit, PlannerSolution, UNLICENSED_MARGIN,
};
use hetnet_market::MarketParams;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::output::{fmt_num, fmt_opt, to_json_string, Csv};
use crate::scenario::{ScenarioFile, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub const DEFAULT_SWEEP_POINTS: usize = 201;
pub const DEFAULT_MAP_POINTS: usize = 40;
pub const DEFAULT_SERIES: [MarketScenario; 3] = [
    MarketScenario::MonopolyRevenue,
    MarketScenario::Oligopoly(2),
    MarketScenario::Asymptotic,
];

/// Copy of the scenario carrying `report`, so it can be fed back in.
fn with_report<T: Serialize>(
    scenario: &ScenarioFile,
    allocation: Option<AllocationProfile>,
    report: &T,
) -> String {
    let mut out = scenario.clone();
    if allocation.is_some() {
        out.allocation = allocation;
    }
    out.out = None;
    out.report = Some(serde_json::to_value(report).expect("report serializes"));
    to_json_string(&out)
}

fn price(p: TierPrice) -> String {
    match p {
        TierPrice::Active(x) => fmt_num(x),
        TierPrice::Inactive => "inactive".into(),
    }
}

fn grid_points(
    spec: Option<&SweepSpec>,
    grid: Option<usize>,
    default: usize,
) -> Result<usize, CliError> {
    let n = grid.or(spec.and_then(|s| s.points)).unwrap_or(default);
    if n < 2 {
        return Err(CliError::Validation(format!(
            "grid needs at least 2 points, got {n}"
        )));
    }
    Ok(n)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn range(spec: &SweepSpec, lo: f64, hi: f64) -> Result<(f64, f64), CliError> {
    let (lo, hi) = (spec.lo.unwrap_or(lo), spec.hi.unwrap_or(hi));
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
        return Err(CliError::Validation(format!(
            "sweep range must satisfy 0 <= lo < hi, got [{lo}, {hi}]"
        )));
    }
    Ok((lo, hi))
}

// ---------------------------------------------------------------- associate

pub fn associate(s: &ScenarioFile, format: Format) -> Result<String, CliError> {
    let profile = s.allocation()?;
    let o = solve_association(profile, &s.params)?;
    Ok(match format {
        Format::Json => with_report(s, None, &o),
        Format::Csv => {
            let mut header: Vec<String> = [
                "regime",
                "k_macro",
                "k_small",
                "k_unlicensed",
                "r_macro",
                "r_small",
                "r_unlicensed",
                "p_macro",
                "p_small",
                "social_welfare",
            ]
            .iter()
            .map(|h| h.to_string())
            .collect();
            header.extend((1..=o.revenue_per_sp.len()).map(|i| format!("revenue_sp{i}")));
            let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
            csv.row(outcome_cells(&o));
            csv.finish()
        }
    })
}

fn outcome_cells(o: &AssociationOutcome) -> Vec<String> {
    let mut cells = vec![
        o.regime.to_string(),
        fmt_num(o.k_macro),
        fmt_num(o.k_small),
        fmt_num(o.k_unlicensed),
        fmt_num(o.r_macro),
        fmt_num(o.r_small),
        fmt_num(o.r_unlicensed),
        price(o.p_macro),
        price(o.p_small),
        fmt_num(o.social_welfare),
    ];
    cells.extend(o.revenue_per_sp.iter().map(|&r| fmt_num(r)));
    cells
}

// ---------------------------------------------------------------- monopoly

#[derive(Serialize)]
struct MonopolyReport {
    solution: MonopolySolution,
    threshold_rev: f64,
    threshold_sw: f64,
    threshold_crossover: f64,
}

#[derive(Serialize)]
struct MonopolyRow {
    b_u: f64,
    c_u: f64,
    b_small_rev: f64,
    b_small_sw: f64,
}

fn single_band(s: &ScenarioFile, command: &str) -> Result<f64, CliError> {
    let bands = s.bands(command)?;
    if bands.len() != 1 {
        return Err(CliError::Validation(format!(
            "`{command}` needs exactly one SP, got {}",
            bands.len()
        )));
    }
    Ok(bands[0])
}

pub fn monopoly_cmd(
    s: &ScenarioFile,
    format: Format,
    grid: Option<usize>,
) -> Result<String, CliError> {
    let b = single_band(s, "monopoly")?;
    let p = &s.params;
    if let Some(spec) = &s.sweep {
        return monopoly_sweep(s, spec, b, format, grid);
    }
    let b_u = s.b_unlicensed("monopoly")?;
    let solution = monopoly::optimize(s.objective.unwrap_or(Objective::Revenue), b, b_u, p)?;
    let profile = solution.profile(b_u);
    let report = MonopolyReport {
        threshold_rev: monopoly::threshold_rev(b, p),
        threshold_sw: monopoly::threshold_sw(b, p),
        threshold_crossover: monopoly::threshold_crossover(b, p),
        solution,
    };
    Ok(match format {
        Format::Json => with_report(s, Some(profile), &report),
        Format::Csv => {
            let mut csv = Csv::new(&[
                "b_macro",
                "b_small",
                "boundary",
                "revenue",
                "social_welfare",
                "threshold_rev",
                "threshold_sw",
                "threshold_crossover",
            ]);
            let sol = &report.solution;
            csv.row([
                fmt_num(sol.b_macro),
                fmt_num(sol.b_small),
                (sol.boundary as u8).to_string(),
                fmt_num(sol.revenue()),
                fmt_num(sol.welfare()),
                fmt_num(report.threshold_rev),
                fmt_num(report.threshold_sw),
                fmt_num(report.threshold_crossover),
            ]);
            csv.finish()
        }
    })
}

fn monopoly_sweep(
    s: &ScenarioFile,
    spec: &SweepSpec,
    b: f64,
    format: Format,
    grid: Option<usize>,
) -> Result<String, CliError> {
    let p = &s.params;
    let default_hi = 1.2 * p.unlicensed_bandwidth_for(monopoly::threshold_rev(b, p));
    let (lo, hi) = range(spec, 0.0, default_hi)?;
    let n = grid_points(Some(spec), grid, DEFAULT_SWEEP_POINTS)?;
    let rows = linspace(lo, hi, n)
        .into_par_iter()
        .map(|b_u| {
            Ok(MonopolyRow {
                b_u,
                c_u: p.unlicensed_capacity(b_u),
                b_small_rev: monopoly::optimize_revenue(b, b_u, p)?.b_small,
                b_small_sw: monopoly::optimize_welfare(b, b_u, p)?.b_small,
            })
        })
        .collect::<Result<Vec<_>, hetnet_market::MarketError>>()?;
    Ok(match format {
        Format::Json => with_report(s, None, &rows),
        Format::Csv => {
            let mut csv = Csv::new(&["b_u", "c_u", "b_small_rev", "b_small_sw"]);
            for r in &rows {
                csv.row([
                    fmt_num(r.b_u),
                    fmt_num(r.c_u),
                    fmt_num(r.b_small_rev),
                    fmt_num(r.b_small_sw),
                ]);
            }
            csv.finish()
        }
    })
}

// ---------------------------------------------------------------- nash

#[derive(Serialize)]
struct MapCell {
    b1: f64,
    b2: f64,
    classification: oligopoly::Classification,
    b_small_1: f64,
    b_small_2: f64,
}

pub fn nash(s: &ScenarioFile, format: Format, grid: Option<usize>) -> Result<String, CliError> {
    let b_u = s.b_unlicensed("nash")?;
    if let Some(spec) = &s.sweep {
        return nash_map(s, spec, b_u, format, grid);
    }
    let bands = s.bands("nash")?;
    let eq: EquilibriumResult = oligopoly::solve_nash(&bands, b_u, &s.params)?;
    Ok(match format {
        Format::Json => with_report(s, Some(eq.profile.clone()), &eq),
        Format::Csv => {
            let mut csv = Csv::new(&[
                "sp",
                "classification",
                "b_macro",
                "b_small",
                "revenue",
                "kkt_residual",
            ]);
            for (i, sp) in eq.profile.per_sp.iter().enumerate() {
                csv.row([
                    (i + 1).to_string(),
                    eq.classification.to_string(),
                    fmt_num(sp.b_macro),
                    fmt_num(sp.b_small),
                    fmt_num(eq.outcome.revenue_per_sp[i]),
                    fmt_num(eq.kkt_residuals[i]),
                ]);
            }
            csv.finish()
        }
    })
}

/// Equilibrium type over a square of two-SP band pairs.
fn nash_map(
    s: &ScenarioFile,
    spec: &SweepSpec,
    b_u: f64,
    format: Format,
    grid: Option<usize>,
) -> Result<String, CliError> {
    if let Some(n) = s.n_sps.or(s.bandwidths.as_ref().map(Vec::len)) {
        if n != 2 {
            return Err(CliError::Validation(format!(
                "a `nash` sweep maps two SPs, got {n}"
            )));
        }
    }
    let (lo, hi) = range(spec, 0.05, 3.0)?;
    if lo <= 0.0 {
        return Err(CliError::Validation("a `nash` sweep needs lo > 0".into()));
    }
    let n = grid_points(Some(spec), grid, DEFAULT_MAP_POINTS)?;
    let axis = linspace(lo, hi, n);
    let pairs: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&b1| axis.iter().map(move |&b2| (b1, b2)))
        .collect();
    let cells = pairs
        .into_par_iter()
        .map(|(b1, b2)| {
            let eq = oligopoly::solve_nash(&[b1, b2], b_u, &s.params)?;
            Ok(MapCell {
                b1,
                b2,
                classification: eq.classification,
                b_small_1: eq.profile.per_sp[0].b_small,
                b_small_2: eq.profile.per_sp[1].b_small,
            })
        })
        .collect::<Result<Vec<_>, hetnet_market::MarketError>>()?;
    Ok(match format {
        Format::Json => with_report(s, None, &cells),
        Format::Csv => {
            let mut csv = Csv::new(&["b1", "b2", "classification", "b_small_1", "b_small_2"]);
            for c in &cells {
                csv.row([
                    fmt_num(c.b1),
                    fmt_num(c.b2),
                    c.classification.to_string(),
                    fmt_num(c.b_small_1),
                    fmt_num(c.b_small_2),
                ]);
            }
            csv.finish()
        }
    })
}

// ---------------------------------------------------------------- planner

#[derive(Serialize)]
struct PlannerReport {
    planner: PlannerSolution,
    alpha0: Option<f64>,
    markets: Vec<MarketSplit>,
}

#[derive(Serialize)]
struct MarketSplit {
    market: MarketScenario,
    #[serde(flatten)]
    split: OptimalSplit,
}

fn series(s: &ScenarioFile) -> Vec<MarketScenario> {
    s.sweep
        .as_ref()
        .and_then(|w| w.series.clone())
        .unwrap_or_else(|| DEFAULT_SERIES.to_vec())
}

pub fn planner(s: &ScenarioFile, format: Format) -> Result<String, CliError> {
    let b = s.total_bandwidth("planner")?;
    let p = &s.params;
    let plan = welfare::planner_optimal(b, p)?;
    let markets = series(s)
        .into_par_iter()
        .map(|market| {
            Ok(MarketSplit {
                market,
                split: welfare::optimal_split(b, market, p)?,
            })
        })
        .collect::<Result<Vec<_>, hetnet_market::MarketError>>()?;
    let report = PlannerReport {
        alpha0: welfare::alpha0(p.lambda_s() / p.lambda_u()),
        planner: plan,
        markets,
    };
    let allocation = AllocationProfile::new(
        vec![SpAllocation::new(
            report.planner.b_macro,
            report.planner.b_small,
        )],
        report.planner.b_unlicensed,
    )?;
    Ok(match format {
        Format::Json => with_report(s, Some(allocation), &report),
        Format::Csv => {
            let mut csv = Csv::new(&[
                "market",
                "b_licensed",
                "b_unlicensed",
                "welfare",
                "efficient",
            ]);
            let pl = &report.planner;
            csv.row([
                "planner".into(),
                fmt_num(pl.b_macro + pl.b_small),
                fmt_num(pl.b_unlicensed),
                fmt_num(pl.welfare),
                "1".into(),
            ]);
            for MarketSplit { market: m, split } in &report.markets {
                csv.row([
                    m.label(),
                    fmt_num(split.b_licensed),
                    fmt_num(split.b_unlicensed),
                    fmt_num(split.welfare),
                    (split.efficient as u8).to_string(),
                ]);
            }
            csv.finish()
        }
    })
}

// ---------------------------------------------------------------- sweep

#[derive(Serialize)]
struct SweepReport {
    grid: Vec<f64>,
    planner: f64,
    series: Vec<SeriesReport>,
}

#[derive(Serialize)]
struct SeriesReport {
    market: MarketScenario,
    kink: Option<f64>,
    values: Vec<f64>,
}

fn sweep_rows(
    b: f64,
    grid: &[f64],
    markets: &[MarketScenario],
    p: &MarketParams,
) -> Result<Vec<Vec<f64>>, CliError> {
    Ok(grid
        .par_iter()
        .map(|&x| {
            markets
                .iter()
                .map(|m| m.welfare(b, x, p))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?)
}

pub fn sweep(s: &ScenarioFile, format: Format, grid: Option<usize>) -> Result<String, CliError> {
    let b = s.total_bandwidth("sweep")?;
    let p = &s.params;
    let markets = series(s);
    if markets.is_empty() {
        return Err(CliError::Validation(
            "scenario field `sweep.series` is empty".into(),
        ));
    }
    let default = SweepSpec {
        lo: None,
        hi: None,
        points: None,
        series: None,
    };
    let spec = s.sweep.as_ref().unwrap_or(&default);
    let (lo, hi) = range(spec, 0.0, b - UNLICENSED_MARGIN)?;
    if hi >= b {
        return Err(CliError::Validation(format!(
            "sweep range must stay below total_bandwidth {b}"
        )));
    }
    let base = linspace(lo, hi, grid_points(Some(spec), grid, DEFAULT_SWEEP_POINTS)?);
    let kinks: Vec<Option<f64>> = markets
        .iter()
        .map(|m| welfare::detect_kink(*m, b, &base, p))
        .collect();
    let full = welfare::merge_kinks(&base, kinks.iter().flatten().copied());
    let planner = welfare::planner_optimal(b, p)?.welfare;
    let rows = sweep_rows(b, &full, &markets, p)?;
    Ok(match format {
        Format::Json => {
            let report = SweepReport {
                series: markets
                    .iter()
                    .zip(&kinks)
                    .enumerate()
                    .map(|(j, (m, k))| SeriesReport {
                        market: *m,
                        kink: *k,
                        values: rows.iter().map(|r| r[j]).collect(),
                    })
                    .collect(),
                grid: full,
                planner,
            };
            with_report(s, None, &report)
        }
        Format::Csv => {
            let mut header = vec!["b_u".to_string(), "planner".to_string()];
            header.extend(markets.iter().map(|m| m.label()));
            header.extend(markets.iter().map(|m| format!("kink_{}", m.label())));
            let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
            let kink_cells: Vec<String> = kinks.iter().map(|k| fmt_opt(*k)).collect();
            for (x, row) in full.iter().zip(&rows) {
                let mut cells = vec![fmt_num(*x), fmt_num(planner)];
                cells.extend(row.iter().map(|&w| fmt_num(w)));
                cells.extend(kink_cells.iter().cloned());
                csv.row(cells);
            }
            csv.finish()
        }
    })
}

// ---------------------------------------------------------------- seeds

fn fig_params(alpha: f64, lambda_u: f64) -> MarketParams {
    MarketParams::new(alpha, 50.0, 50.0, 50.0, 4.0, lambda_u)
        .expect("reference parameters are valid")
}

fn welfare_curve_seed(alpha: f64, lambda_u: f64) -> ScenarioFile {
    let mut s = ScenarioFile::new(fig_params(alpha, lambda_u));
    s.total_bandwidth = Some(2.0);
    s.sweep = Some(SweepSpec {
        lo: None,
        hi: None,
        points: Some(DEFAULT_SWEEP_POINTS),
        series: Some(vec![
            MarketScenario::MonopolyRevenue,
            MarketScenario::MonopolyWelfare,
            MarketScenario::Oligopoly(2),
            MarketScenario::Asymptotic,
        ]),
    });
    s
}

/// Reference scenario files, by file name.
pub fn figure_seeds() -> Vec<(&'static str, ScenarioFile)> {
    let mut fig1 = ScenarioFile::new(fig_params(0.5, 3.0));
    fig1.licensed_bandwidth = Some(2.0);
    fig1.sweep = Some(SweepSpec {
        lo: Some(0.0),
        hi: Some(12.0),
        points: Some(DEFAULT_SWEEP_POINTS),
        series: None,
    });

    let mut fig2 = ScenarioFile::new(fig_params(0.5, 3.0));
    fig2.n_sps = Some(2);
    fig2.b_unlicensed = Some(1.0);
    fig2.sweep = Some(SweepSpec {
        lo: Some(0.05),
        hi: Some(3.0),
        points: Some(DEFAULT_MAP_POINTS),
        series: None,
    });

    vec![
        ("fig1_monopoly.json", fig1),
        ("fig2_nash_regions.json", fig2),
        (
            "fig3_welfare_equal_rates.json",
            welfare_curve_seed(0.5, 4.0),
        ),
        (
            "fig4_welfare_efficient_monopoly.json",
            welfare_curve_seed(0.8, 10.0),
        ),
        (
            "fig5_welfare_inefficient_monopoly.json",
            welfare_curve_seed(0.8, 4.5),
        ),
    ]
}
