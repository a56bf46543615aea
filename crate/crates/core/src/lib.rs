//! Equilibrium engine for a two-tier cellular market (macro-cells and
//! small-cells) that competes with free unlicensed access.
//!
//! Users have α-fair utility. Given a bandwidth split, [`association`]
//! clears the market in closed form; [`monopoly`] and [`oligopoly`] solve the
//! bandwidth-allocation stage for one and many SPs; [`welfare`] compares the
//! results with a social planner across licensed/unlicensed splits.

pub mod association;
pub mod error;
pub mod market;
pub mod monopoly;
pub mod numeric;
pub mod oligopoly;
pub mod oracle;
pub mod welfare;

pub use association::{
    solve_association, AllocationProfile, AssociationOutcome, Regime, SpAllocation, TierPrice,
};
pub use error::{MarketError, Result};
pub use market::{Bandwidth, MarketParams, Price, Rate, UserMass, Welfare};
pub use monopoly::{optimize_revenue, optimize_welfare, MonopolySolution, Objective};
pub use oligopoly::{solve_nash, symmetric_equilibrium, Classification, EquilibriumResult};
pub use welfare::{planner_optimal, welfare_sweep, MarketScenario, PlannerSolution, WelfareCurve};
