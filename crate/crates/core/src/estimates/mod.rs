//! Verification harness: runs solves on instance families and certifies
//! each estimate's inequality, fitting the existential constants empirically
//! and measuring how much they move across `R` and data variations.

mod bharnack;
mod blowup;
mod carleson;
pub mod family;
mod holder;
mod interior;
pub mod suite;

pub use bharnack::{match_at_corkscrew, verify_boundary_harnack, BharnackGeometry, BharnackReport, MatchedPair, MuBranch};
pub use blowup::{blowup_profile, Alternative, BlowupReport, BLOWUP_BOUNDED_GAMMA};
pub use carleson::{
    carleson_instance, px_corollary_check, verify_carleson, CarlesonInstance, CarlesonTrial, PxReport, C_TRIALS,
};
pub use family::{FamilyConfig, FamilyDomain, FamilyInstance, FamilyNonlinearity, SeededData, SolvedInstance};
pub use holder::{verify_boundary_holder, HolderFit, HolderRung, ALPHA_WINDOW};
pub use interior::{verify_interior_harnack, verify_osc_decay, OscDecayFit, OscRung, OSC_RUNG_FLOOR};

use crate::error::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Schema version embedded in serialized reports.
pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    InteriorHarnack,
    Carleson,
    InteriorHolder,
    OscDecay,
    BoundaryHolder,
    Blowup,
    BoundaryHarnack,
    PxCarleson,
    PxBharnack,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub domain: String,
    pub nl: String,
    #[serde(rename = "R")]
    pub scale: f64,
    pub seed: Option<u64>,
}

impl From<&FamilyInstance> for InstanceDescriptor {
    fn from(i: &FamilyInstance) -> Self {
        InstanceDescriptor {
            domain: i.domain.name().into(),
            nl: i.nl.name().into(),
            scale: i.scale,
            seed: Some(i.seed),
        }
    }
}

/// Spread of one (domain, nonlinearity, seed) group across `R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpread {
    pub domain: String,
    pub nl: String,
    pub seed: Option<u64>,
    pub values: Vec<f64>,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub schema: u32,
    pub theorem: Theorem,
    pub instances: Vec<InstanceDescriptor>,
    /// At least every per-instance value.
    pub fitted_constant: f64,
    pub per_instance_values: Vec<f64>,
    /// Largest group spread; `0` for single-instance reports.
    pub independence_spread: f64,
    pub groups: Vec<GroupSpread>,
    /// The underlying certificate integrals, when the per-instance value is a constant derived from them.
    pub raw_values: Option<Vec<f64>>,
    /// Largest group spread of `raw_values`.
    pub raw_spread: Option<f64>,
    pub flags: Vec<String>,
}

/// `(max − min)/max` of positive values; `0` for fewer than two values or all zero.
pub fn relative_spread(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if !hi.is_finite() || !lo.is_finite() {
        return f64::INFINITY;
    }
    if hi <= 0.0 {
        return 0.0;
    }
    (hi - lo) / hi
}

impl EstimateReport {
    /// Aggregates per-instance values; groups share domain, nonlinearity and seed.
    pub fn from_values(theorem: Theorem, instances: Vec<InstanceDescriptor>, values: Vec<f64>, flags: Vec<String>) -> Self {
        let mut grouped: BTreeMap<(String, String, Option<u64>), Vec<f64>> = BTreeMap::new();
        for (d, &v) in instances.iter().zip(&values) {
            grouped.entry((d.domain.clone(), d.nl.clone(), d.seed)).or_default().push(v);
        }
        let groups: Vec<GroupSpread> = grouped
            .into_iter()
            .map(|((domain, nl, seed), values)| {
                let spread = relative_spread(&values);
                GroupSpread { domain, nl, seed, values, spread }
            })
            .collect();
        let independence_spread = groups.iter().map(|g| g.spread).fold(0.0, f64::max);
        let fitted_constant = values.iter().cloned().fold(0.0, f64::max);
        EstimateReport {
            schema: REPORT_SCHEMA,
            theorem,
            instances,
            fitted_constant,
            per_instance_values: values,
            independence_spread,
            groups,
            raw_values: None,
            raw_spread: None,
            flags,
        }
    }

    /// Attaches the raw integrals behind the per-instance constants.
    pub fn with_raw(mut self, raw: Vec<f64>) -> Self {
        let spread = EstimateReport::from_values(self.theorem, self.instances.clone(), raw.clone(), Vec::new()).independence_spread;
        self.raw_values = Some(raw);
        self.raw_spread = Some(spread);
        self
    }
}

/// Per-instance Harnack constant: the least `C ≥ C_TRIALS[0]` bounding the certificate value.
pub fn harnack_constant(value: f64) -> f64 {
    value.max(C_TRIALS[0])
}

/// Carleson and interior Harnack reports over the instance family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReports {
    pub carleson: EstimateReport,
    pub harnack: EstimateReport,
    pub carleson_details: Vec<CarlesonInstance>,
}

/// Solves every family member and certifies the Carleson and interior Harnack
/// estimates on each. Instances are solved in parallel and folded in sorted order.
pub fn run_family(cfg: &FamilyConfig) -> Result<FamilyReports> {
    cfg.validate()?;
    let instances = cfg.instances();
    let solved: Vec<(CarlesonInstance, f64)> = instances
        .par_iter()
        .map(|inst| {
            let s = family::solve_instance(inst, cfg)?;
            let c = carleson_instance(&s.field, &s.setup.domain, s.setup.w, inst.scale, &s.nl)?;
            let cert = verify_interior_harnack(
                &s.field,
                s.setup.harnack_center,
                s.setup.harnack_radius,
                inst.scale,
                &s.nl,
                0.0,
            )?;
            Ok((c, cert.value.finite().unwrap_or(f64::INFINITY)))
        })
        .collect::<Result<_>>()?;
    let descriptors: Vec<InstanceDescriptor> = instances.iter().map(InstanceDescriptor::from).collect();
    let mut flags = Vec::new();
    for (d, (c, _)) in descriptors.iter().zip(&solved) {
        for f in &c.flags {
            flags.push(format!("{}/{}/R={}/seed={:?}: {f}", d.domain, d.nl, d.scale, d.seed));
        }
    }
    let carleson = EstimateReport::from_values(
        Theorem::Carleson,
        descriptors.clone(),
        solved.iter().map(|(c, _)| c.constant.unwrap_or(f64::INFINITY)).collect(),
        flags,
    )
    .with_raw(solved.iter().map(|(c, _)| c.trials[0].integral.finite().unwrap_or(f64::INFINITY)).collect());
    let harnack = EstimateReport::from_values(
        Theorem::InteriorHarnack,
        descriptors,
        solved.iter().map(|(_, h)| harnack_constant(*h)).collect(),
        Vec::new(),
    )
    .with_raw(solved.iter().map(|(_, h)| *h).collect());
    Ok(FamilyReports { carleson, harnack, carleson_details: solved.into_iter().map(|(c, _)| c).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spread_of_equal_values_is_zero() {
        assert_eq!(relative_spread(&[2.0, 2.0, 2.0]), 0.0);
        assert!((relative_spread(&[1.0, 0.75]) - 0.25).abs() < 1e-15);
        assert_eq!(relative_spread(&[3.0]), 0.0);
    }

    #[test]
    fn report_groups_by_domain_nl_and_seed() {
        let d = |s: f64, seed| InstanceDescriptor { domain: "d".into(), nl: "n".into(), scale: s, seed: Some(seed) };
        let r = EstimateReport::from_values(
            Theorem::Carleson,
            vec![d(1.0, 1), d(0.5, 1), d(1.0, 2), d(0.5, 2)],
            vec![2.0, 1.0, 3.0, 3.0],
            vec![],
        );
        assert_eq!(r.groups.len(), 2);
        assert_eq!(r.independence_spread, 0.5);
        assert_eq!(r.fitted_constant, 3.0);
    }
}
