//! Scenario parameters and the α-fair utility primitives.

use serde::{Deserialize, Serialize};

use crate::error::{MarketError, Result};

/// Bandwidth in spectrum units (normalized, e.g. MHz).
pub type Bandwidth = f64;
/// Data rate, per user or aggregate.
pub type Rate = f64;
/// Price per unit rate.
pub type Price = f64;
/// Mass of (non-atomic) users.
pub type UserMass = f64;
/// Utility, payoff, revenue or welfare.
pub type Welfare = f64;

/// Smallest accepted utility curvature; the open interval (0, 1) is
/// narrowed by this margin on both ends.
pub const ALPHA_MARGIN: f64 = 1e-6;

/// Immutable market scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct MarketParams {
    alpha: f64,
    n_fixed: UserMass,
    n_mobile: UserMass,
    r0: f64,
    lambda_s: f64,
    lambda_u: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    alpha: f64,
    n_fixed: f64,
    n_mobile: f64,
    r0: f64,
    lambda_s: f64,
    lambda_u: f64,
}

impl TryFrom<RawParams> for MarketParams {
    type Error = MarketError;

    fn try_from(raw: RawParams) -> Result<Self> {
        MarketParams::new(
            raw.alpha,
            raw.n_fixed,
            raw.n_mobile,
            raw.r0,
            raw.lambda_s,
            raw.lambda_u,
        )
    }
}

impl From<MarketParams> for RawParams {
    fn from(p: MarketParams) -> Self {
        RawParams {
            alpha: p.alpha,
            n_fixed: p.n_fixed,
            n_mobile: p.n_mobile,
            r0: p.r0,
            lambda_s: p.lambda_s,
            lambda_u: p.lambda_u,
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(MarketError::invalid(
            field,
            format!("must be finite and > 0, got {v}"),
        ))
    }
}

impl MarketParams {
    pub fn new(
        alpha: f64,
        n_fixed: UserMass,
        n_mobile: UserMass,
        r0: f64,
        lambda_s: f64,
        lambda_u: f64,
    ) -> Result<Self> {
        if !(ALPHA_MARGIN..=1.0 - ALPHA_MARGIN).contains(&alpha) {
            return Err(MarketError::invalid(
                "alpha",
                format!(
                    "must lie in [{ALPHA_MARGIN}, {}], got {alpha}",
                    1.0 - ALPHA_MARGIN
                ),
            ));
        }
        positive("n_fixed", n_fixed)?;
        positive("n_mobile", n_mobile)?;
        positive("r0", r0)?;
        positive("lambda_u", lambda_u)?;
        if !(lambda_s.is_finite() && lambda_s > 1.0) {
            return Err(MarketError::invalid(
                "lambda_s",
                format!("must be finite and > 1, got {lambda_s}"),
            ));
        }
        Ok(MarketParams {
            alpha,
            n_fixed,
            n_mobile,
            r0,
            lambda_s,
            lambda_u,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn n_fixed(&self) -> UserMass {
        self.n_fixed
    }
    pub fn n_mobile(&self) -> UserMass {
        self.n_mobile
    }
    pub fn r0(&self) -> f64 {
        self.r0
    }
    pub fn lambda_s(&self) -> f64 {
        self.lambda_s
    }
    pub fn lambda_u(&self) -> f64 {
        self.lambda_u
    }

    /// Total user mass, fixed plus mobile.
    pub fn n_total(&self) -> UserMass {
        self.n_fixed + self.n_mobile
    }

    /// Copy with a different unlicensed rate multiplier.
    pub fn with_lambda_u(&self, lambda_u: f64) -> Result<Self> {
        Self::new(
            self.alpha,
            self.n_fixed,
            self.n_mobile,
            self.r0,
            self.lambda_s,
            lambda_u,
        )
    }

    /// Copy with a different utility curvature.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(
            alpha,
            self.n_fixed,
            self.n_mobile,
            self.r0,
            self.lambda_s,
            self.lambda_u,
        )
    }

    pub fn kappa(&self) -> f64 {
        kappa(self.alpha)
    }

    /// Macro-cell capacity of `b` bandwidth.
    pub fn macro_capacity(&self, b: Bandwidth) -> Rate {
        b * self.r0
    }

    /// Small-cell capacity of `b` bandwidth.
    pub fn small_capacity(&self, b: Bandwidth) -> Rate {
        self.lambda_s * b * self.r0
    }

    /// Unlicensed capacity of `b` bandwidth.
    pub fn unlicensed_capacity(&self, b: Bandwidth) -> Rate {
        self.lambda_u * b * self.r0
    }

    /// Unlicensed bandwidth that yields capacity `c`.
    pub fn unlicensed_bandwidth_for(&self, c: Rate) -> Bandwidth {
        c / (self.lambda_u * self.r0)
    }

    pub fn utility(&self, r: Rate) -> Welfare {
        utility(r, self.alpha)
    }
    pub fn marginal_utility(&self, r: Rate) -> Price {
        marginal_utility(r, self.alpha)
    }
    pub fn utility_second_derivative(&self, r: Rate) -> f64 {
        utility_second_derivative(r, self.alpha)
    }
}

/// α-fair utility `r^(1-α)/(1-α)`; zero at `r = 0`.
pub fn utility(r: Rate, alpha: f64) -> Welfare {
    debug_assert!(r >= 0.0);
    if r <= 0.0 {
        return 0.0;
    }
    r.powf(1.0 - alpha) / (1.0 - alpha)
}

/// `u'(r) = r^-α`, which is also the market-clearing price at per-user rate `r`.
pub fn marginal_utility(r: Rate, alpha: f64) -> Price {
    r.powf(-alpha)
}

/// `u''(r) = -α r^(-α-1)`.
pub fn utility_second_derivative(r: Rate, alpha: f64) -> f64 {
    -alpha * r.powf(-alpha - 1.0)
}

/// Rate a price-taking user requests at price `p`: `(1/p)^(1/α)`.
pub fn demand(p: Price, alpha: f64) -> Result<Rate> {
    if p.is_nan() || p <= 0.0 {
        return Err(MarketError::NonPositivePrice(p));
    }
    Ok(p.recip().powf(1.0 / alpha))
}

/// Best net payoff `u(D(p)) - p D(p)` at price `p`.
pub fn net_payoff(p: Price, alpha: f64) -> Result<Welfare> {
    if p.is_nan() || p <= 0.0 {
        return Err(MarketError::NonPositivePrice(p));
    }
    Ok(alpha / (1.0 - alpha) * p.powf(1.0 - 1.0 / alpha))
}

/// Ratio of unlicensed to licensed per-user rate in equilibrium, `α^(1/(1-α))`.
pub fn kappa(alpha: f64) -> f64 {
    alpha.powf(1.0 / (1.0 - alpha))
}
