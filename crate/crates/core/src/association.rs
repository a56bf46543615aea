//! Price and user-association equilibrium for fixed bandwidth allocations.
//!
//! Given every SP's macro/small split and the unlicensed bandwidth, prices
//! clear each licensed tier and fixed users spread over the services until
//! their net payoffs are equal. Two regimes are possible: macro-cells also
//! absorb fixed users (mixed service) or serve mobile users only (separate
//! service). Both are closed-form.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{MarketError, Result};
use crate::market::{Bandwidth, MarketParams, Price, Rate, UserMass, Welfare};

/// One SP's licensed split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpAllocation {
    pub b_macro: Bandwidth,
    pub b_small: Bandwidth,
}

impl SpAllocation {
    pub fn new(b_macro: Bandwidth, b_small: Bandwidth) -> Self {
        SpAllocation { b_macro, b_small }
    }

    pub fn total(&self) -> Bandwidth {
        self.b_macro + self.b_small
    }
}

/// Licensed splits for all SPs plus the unlicensed bandwidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationProfile {
    pub per_sp: Vec<SpAllocation>,
    pub b_unlicensed: Bandwidth,
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(MarketError::invalid(
            field,
            format!("must be finite and >= 0, got {v}"),
        ))
    }
}

impl AllocationProfile {
    pub fn new(per_sp: Vec<SpAllocation>, b_unlicensed: Bandwidth) -> Result<Self> {
        let profile = AllocationProfile {
            per_sp,
            b_unlicensed,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Single-SP profile.
    pub fn monopoly(
        b_macro: Bandwidth,
        b_small: Bandwidth,
        b_unlicensed: Bandwidth,
    ) -> Result<Self> {
        Self::new(vec![SpAllocation::new(b_macro, b_small)], b_unlicensed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.per_sp.is_empty() {
            return Err(MarketError::invalid(
                "per_sp",
                "at least one SP is required",
            ));
        }
        for sp in &self.per_sp {
            non_negative("b_macro", sp.b_macro)?;
            non_negative("b_small", sp.b_small)?;
        }
        non_negative("b_unlicensed", self.b_unlicensed)
    }

    pub fn n_sps(&self) -> usize {
        self.per_sp.len()
    }

    pub fn total_macro(&self) -> Bandwidth {
        self.per_sp.iter().map(|s| s.b_macro).sum()
    }

    pub fn total_small(&self) -> Bandwidth {
        self.per_sp.iter().map(|s| s.b_small).sum()
    }

    pub fn macro_capacity(&self, params: &MarketParams) -> Rate {
        params.macro_capacity(self.total_macro())
    }

    pub fn small_capacity(&self, params: &MarketParams) -> Rate {
        params.small_capacity(self.total_small())
    }

    pub fn unlicensed_capacity(&self, params: &MarketParams) -> Rate {
        params.unlicensed_capacity(self.b_unlicensed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Macro-cells serve mobile users and some fixed users; one price.
    MixedService,
    /// Macro-cells serve mobile users only; small-cell price is lower.
    SeparateService,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::MixedService => f.write_str("mixed_service"),
            Regime::SeparateService => f.write_str("separate_service"),
        }
    }
}

/// Price of a licensed tier. A tier that attracts no users has no price.
///
/// Serialized as a number, or the string `"inactive"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TierPrice {
    Active(Price),
    Inactive,
}

impl TierPrice {
    pub fn value(&self) -> Option<Price> {
        match *self {
            TierPrice::Active(p) => Some(p),
            TierPrice::Inactive => None,
        }
    }

    pub fn is_active(&self) -> bool {
        matches!(self, TierPrice::Active(_))
    }
}

impl Serialize for TierPrice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TierPrice::Active(p) => s.serialize_f64(*p),
            TierPrice::Inactive => s.serialize_str("inactive"),
        }
    }
}

impl<'de> Deserialize<'de> for TierPrice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Tag(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(p) => Ok(TierPrice::Active(p)),
            Repr::Tag(t) if t == "inactive" => Ok(TierPrice::Inactive),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!(
                "expected a price or \"inactive\", got {t:?}"
            ))),
        }
    }
}

/// Market-clearing outcome for a fixed allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationOutcome {
    pub regime: Regime,
    pub k_macro: UserMass,
    pub k_small: UserMass,
    pub k_unlicensed: UserMass,
    pub r_macro: Rate,
    pub r_small: Rate,
    pub r_unlicensed: Rate,
    pub p_macro: TierPrice,
    pub p_small: TierPrice,
    pub revenue_per_sp: Vec<Welfare>,
    pub social_welfare: Welfare,
}

impl AssociationOutcome {
    pub fn total_revenue(&self) -> Welfare {
        self.revenue_per_sp.iter().sum()
    }

    pub fn total_mass(&self) -> UserMass {
        self.k_macro + self.k_small + self.k_unlicensed
    }

    /// Per-SP `(macro, small)` user masses. Users of a tier are spread over
    /// SPs in proportion to capacity.
    pub fn per_sp_masses(&self, profile: &AllocationProfile) -> Vec<(UserMass, UserMass)> {
        let total_m = profile.total_macro();
        let total_s = profile.total_small();
        profile
            .per_sp
            .iter()
            .map(|sp| {
                let km = if total_m > 0.0 {
                    self.k_macro * sp.b_macro / total_m
                } else {
                    0.0
                };
                let ks = if total_s > 0.0 {
                    self.k_small * sp.b_small / total_s
                } else {
                    0.0
                };
                (km, ks)
            })
            .collect()
    }
}

/// Total small-cell bandwidth below which macro-cells also serve fixed users.
pub fn regime_threshold(profile: &AllocationProfile, params: &MarketParams) -> Bandwidth {
    let kappa = params.kappa();
    let c_u = profile.unlicensed_capacity(params);
    let numerator =
        kappa * params.n_fixed() * profile.macro_capacity(params) - params.n_mobile() * c_u;
    numerator.max(0.0) / (kappa * params.n_mobile() * params.lambda_s() * params.r0())
}

/// Regime for a profile; ties go to separate service.
pub fn classify_regime(profile: &AllocationProfile, params: &MarketParams) -> Regime {
    if profile.total_small() < regime_threshold(profile, params) {
        Regime::MixedService
    } else {
        Regime::SeparateService
    }
}

/// Small-cell rate fixed users would see as small-cell bandwidth shrinks to
/// zero with unlicensed capacity present, `C_U/(κ N_f)`.
pub fn shadow_small_rate(b_unlicensed: Bandwidth, params: &MarketParams) -> Rate {
    params.unlicensed_capacity(b_unlicensed) / (params.kappa() * params.n_fixed())
}

/// Solves the price/association equilibrium for a fixed allocation.
pub fn solve_association(
    profile: &AllocationProfile,
    params: &MarketParams,
) -> Result<AssociationOutcome> {
    profile.validate()?;
    let kappa = params.kappa();
    let n_f = params.n_fixed();
    let n_m = params.n_mobile();
    let c_m = profile.macro_capacity(params);
    let c_s = profile.small_capacity(params);
    let c_u = profile.unlicensed_capacity(params);

    if c_m == 0.0 && c_s == 0.0 && c_u == 0.0 {
        return Err(MarketError::DegenerateScenario);
    }
    if c_m == 0.0 {
        return Err(MarketError::MobileUnservable);
    }

    let regime = classify_regime(profile, params);
    let (k_macro, k_small, k_unlicensed, r_macro, r_small, r_unlicensed) = match regime {
        Regime::MixedService => {
            let n_t = params.n_total();
            let denom = c_u + kappa * (c_m + c_s);
            let k_u = n_t * c_u / denom;
            let k_m = n_t * kappa * c_m / denom;
            let k_s = n_t * kappa * c_s / denom;
            let r_licensed = denom / (kappa * n_t);
            let r_u = if c_u > 0.0 { denom / n_t } else { 0.0 };
            let r_s = if c_s > 0.0 { r_licensed } else { 0.0 };
            (k_m, k_s, k_u, r_licensed, r_s, r_u)
        }
        Regime::SeparateService => {
            let r_m = c_m / n_m;
            if c_s > 0.0 {
                let denom = kappa * c_s + c_u;
                let k_s = n_f * kappa * c_s / denom;
                let k_u = n_f * c_u / denom;
                let r_s = denom / (kappa * n_f);
                let r_u = if c_u > 0.0 { kappa * r_s } else { 0.0 };
                (n_m, k_s, k_u, r_m, r_s, r_u)
            } else {
                // c_u > 0 here: with no small-cell or unlicensed capacity the
                // threshold is positive and the regime is mixed.
                (n_m, 0.0, n_f, r_m, 0.0, c_u / n_f)
            }
        }
    };

    let p_macro = TierPrice::Active(params.marginal_utility(r_macro));
    let p_small = if k_small > 0.0 {
        TierPrice::Active(params.marginal_utility(r_small))
    } else {
        TierPrice::Inactive
    };
    let price_m = p_macro.value().unwrap_or(0.0);
    let price_s = p_small.value().unwrap_or(0.0);
    let revenue_per_sp = profile
        .per_sp
        .iter()
        .map(|sp| {
            let macro_rev = params.macro_capacity(sp.b_macro) * price_m;
            let small_rev = if sp.b_small > 0.0 {
                params.small_capacity(sp.b_small) * price_s
            } else {
                0.0
            };
            macro_rev + small_rev
        })
        .collect();

    let mut outcome = AssociationOutcome {
        regime,
        k_macro,
        k_small,
        k_unlicensed,
        r_macro,
        r_small,
        r_unlicensed,
        p_macro,
        p_small,
        revenue_per_sp,
        social_welfare: 0.0,
    };
    outcome.social_welfare = social_welfare(&outcome, params);
    Ok(outcome)
}

/// Sum of utility over all users of an outcome.
pub fn social_welfare(outcome: &AssociationOutcome, params: &MarketParams) -> Welfare {
    [
        (outcome.k_macro, outcome.r_macro),
        (outcome.k_small, outcome.r_small),
        (outcome.k_unlicensed, outcome.r_unlicensed),
    ]
    .into_iter()
    .filter(|&(k, _)| k > 0.0)
    .map(|(k, r)| k * params.utility(r))
    .sum()
}
