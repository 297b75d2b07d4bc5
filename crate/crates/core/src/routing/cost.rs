use std::fmt;
use std::str::FromStr;

use super::RoutingError;
use crate::snapshot::ChannelPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    Lnd,
    Ecl,
    Cln,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Lnd, ModelKind::Ecl, ModelKind::Cln];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Lnd => "lnd",
            ModelKind::Ecl => "ecl",
            ModelKind::Cln => "cln",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "lnd" => Ok(ModelKind::Lnd),
            "ecl" | "eclair" => Ok(ModelKind::Ecl),
            "cln" => Ok(ModelKind::Cln),
            _ => Err(format!("unknown cost model `{s}`")),
        }
    }
}

/// Static approximation of a client's path-finding weight. Every model
/// starts from the advertised fee `base + amount·ppm/10⁶` and adds
/// [`epsilon`](Self::epsilon) so arc weights are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub kind: ModelKind,
    /// LND time-lock risk factor per msat per block.
    pub lnd_risk_factor: f64,
    /// CLN risk factor (percent per year).
    pub cln_risk_factor: f64,
    pub cln_blocks_per_year: f64,
    /// ECL fee offset added before weighting.
    pub ecl_hop_base: f64,
    pub ecl_w_base: f64,
    pub ecl_w_cltv: f64,
    /// CLTV delta that maps to a normalised value of 1.
    pub ecl_cltv_max: f64,
    pub epsilon: f64,
}

impl CostModel {
    pub fn new(kind: ModelKind) -> Self {
        CostModel {
            kind,
            lnd_risk_factor: 15e-9,
            cln_risk_factor: 10.0,
            cln_blocks_per_year: 52_596.0,
            ecl_hop_base: 0.0,
            ecl_w_base: 1.0,
            ecl_w_cltv: 0.15,
            ecl_cltv_max: 2016.0,
            epsilon: 1e-6,
        }
    }

    /// Rejects negative or non-finite constants and a non-positive epsilon.
    pub fn validate(&self) -> Result<(), String> {
        let named = [
            ("lnd_risk_factor", self.lnd_risk_factor),
            ("cln_risk_factor", self.cln_risk_factor),
            ("cln_blocks_per_year", self.cln_blocks_per_year),
            ("ecl_hop_base", self.ecl_hop_base),
            ("ecl_w_base", self.ecl_w_base),
            ("ecl_w_cltv", self.ecl_w_cltv),
            ("ecl_cltv_max", self.ecl_cltv_max),
            ("epsilon", self.epsilon),
        ];
        for (name, v) in named {
            if !v.is_finite() || v < 0.0 {
                return Err(format!("{name} must be a non-negative number, got {v}"));
            }
        }
        if self.epsilon <= 0.0 || self.cln_blocks_per_year <= 0.0 || self.ecl_cltv_max <= 0.0 {
            return Err("epsilon, cln_blocks_per_year and ecl_cltv_max must be positive".into());
        }
        Ok(())
    }
}

/// Cost of forwarding `amount_msat` through a channel direction with
/// `policy`.
pub fn edge_cost(model: &CostModel, policy: &ChannelPolicy, amount_msat: u64) -> Result<f64, RoutingError> {
    if policy.disabled {
        return Err(RoutingError::PolicyUnusable("direction disabled".into()));
    }
    if amount_msat < policy.htlc_minimum_msat {
        return Err(RoutingError::PolicyUnusable(format!(
            "amount {amount_msat} below htlc_minimum_msat {}",
            policy.htlc_minimum_msat
        )));
    }
    if let Some(max) = policy.htlc_maximum_msat {
        if amount_msat > max {
            return Err(RoutingError::PolicyUnusable(format!(
                "amount {amount_msat} above htlc_maximum_msat {max}"
            )));
        }
    }
    let amount = amount_msat as f64;
    let cltv = f64::from(policy.cltv_expiry_delta);
    let fee = f64::from(policy.fee_base_msat) + amount * f64::from(policy.fee_proportional_millionths) / 1e6;
    let weighted = match model.kind {
        ModelKind::Lnd => fee + amount * cltv * model.lnd_risk_factor,
        ModelKind::Cln => fee + amount * cltv * model.cln_risk_factor / (model.cln_blocks_per_year * 100.0),
        ModelKind::Ecl => {
            let cltv_norm = cltv / model.ecl_cltv_max;
            (fee + model.ecl_hop_base) * (model.ecl_w_base + model.ecl_w_cltv * cltv_norm)
        }
    };
    Ok(weighted + model.epsilon)
}
