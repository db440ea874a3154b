//! Normalised optimal-DoF surface `d*/M3` over the ratios `M1/M3`, `M2/M3`.

use serde::Serialize;

use crate::allocation::{optimal_broadcast, optimal_unicast_closed_form};
use crate::channel::{AntennaConfig, MessageConfig};
use crate::error::{Error, Result};
use crate::rational::{self, frac, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepSpec {
    pub m3: u32,
    /// Inclusive range of `M1/M3`.
    #[serde(with = "rational::pq_seq")]
    pub m1_ratio: [Rational; 2],
    /// Inclusive range of `M2/M3`.
    #[serde(with = "rational::pq_seq")]
    pub m2_ratio: [Rational; 2],
    pub messages: MessageConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// `M1/M3 ≤ M2/M3 + 1`.
    Balanced,
    /// `M1/M3 > M2/M3 + 1`.
    Dominant,
    /// Unicast plus broadcast: `M2/M3 + 1` everywhere.
    Broadcast,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepPoint {
    pub config: AntennaConfig,
    #[serde(with = "rational::pq")]
    pub m1_over_m3: Rational,
    #[serde(with = "rational::pq")]
    pub m2_over_m3: Rational,
    /// Optimiser output divided by `M3`.
    #[serde(with = "rational::pq")]
    pub dof_over_m3: Rational,
    pub region: Region,
    /// The region's closed-form expression in the ratios.
    #[serde(with = "rational::pq")]
    pub region_value: Rational,
    /// On `M1/M3 = M2/M3 + 1`, where both unicast expressions meet.
    pub on_boundary: bool,
}

impl SweepPoint {
    pub fn agrees(&self) -> bool {
        self.dof_over_m3 == self.region_value
    }
}

/// Closed-form normalised optimum in terms of `a = M1/M3`, `b = M2/M3`.
pub fn region_value(a: Rational, b: Rational, messages: MessageConfig) -> (Region, Rational) {
    match messages {
        MessageConfig::UnicastAndBroadcast => (Region::Broadcast, b + int(1)),
        MessageConfig::UnicastOnly if a <= b + int(1) => (Region::Balanced, (int(2) * a + b + int(1)) / int(3)),
        MessageConfig::UnicastOnly => (Region::Dominant, b + int(1)),
    }
}

/// Every ordered integer configuration `(M1, M2, m3)` whose ratios fall in
/// the requested ranges, in increasing `M1`, then `M2`.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    if spec.m3 == 0 {
        return Err(Error::InvalidInput("m3 must be at least 1".into()));
    }
    for (name, [lo, hi]) in [("M1/M3", spec.m1_ratio), ("M2/M3", spec.m2_ratio)] {
        if lo > hi {
            return Err(Error::InvalidInput(format!("{name} range is empty: {lo} > {hi}")));
        }
    }
    let m3 = i64::from(spec.m3);
    let count = |r: Rational| (r * int(m3)).floor().to_integer();
    let ceil = |r: Rational| (r * int(m3)).ceil().to_integer();
    let m1_hi = count(spec.m1_ratio[1]);
    if m1_hi > i64::from(u32::MAX / 3) {
        return Err(Error::InvalidInput("sweep range is too large".into()));
    }

    let mut out = Vec::new();
    for m1 in ceil(spec.m1_ratio[0]).max(m3)..=m1_hi {
        for m2 in ceil(spec.m2_ratio[0]).max(m3)..=count(spec.m2_ratio[1]).min(m1) {
            let cfg = AntennaConfig::new(m1 as u32, m2 as u32, spec.m3)?;
            let dof = match spec.messages {
                MessageConfig::UnicastOnly => optimal_unicast_closed_form(&cfg).optimal_dof,
                MessageConfig::UnicastAndBroadcast => optimal_broadcast(&cfg)?.optimal_dof,
            };
            let (a, b) = (frac(m1, m3), frac(m2, m3));
            let (region, value) = region_value(a, b, spec.messages);
            out.push(SweepPoint {
                config: cfg,
                m1_over_m3: a,
                m2_over_m3: b,
                dof_over_m3: dof / int(m3),
                region,
                region_value: value,
                on_boundary: a == b + int(1),
            });
        }
    }
    Ok(out)
}
