//! The committed instance family: canonical domains, seeded boundary data
//! and one Dirichlet solve per (domain, nonlinearity, R, seed).

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::nonlinearity::{Nonlinearity, RescaledNonlinearity};
use crate::solver::{solve_dirichlet, Drift, EllipticityPair, GridField, Problem, SolveReport, SolverOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyDomain {
    HalfSpace,
    Graph,
    Cube,
}

impl FamilyDomain {
    pub const ALL: [FamilyDomain; 3] = [FamilyDomain::HalfSpace, FamilyDomain::Graph, FamilyDomain::Cube];

    pub fn name(self) -> &'static str {
        match self {
            FamilyDomain::HalfSpace => "half_space",
            FamilyDomain::Graph => "graph",
            FamilyDomain::Cube => "cube",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyNonlinearity {
    Homogeneous,
    Linear,
    LogModel,
}

impl FamilyNonlinearity {
    pub const ALL: [FamilyNonlinearity; 3] =
        [FamilyNonlinearity::Homogeneous, FamilyNonlinearity::Linear, FamilyNonlinearity::LogModel];

    pub fn build(self, c: f64) -> Result<Nonlinearity> {
        match self {
            FamilyNonlinearity::Homogeneous => Ok(Nonlinearity::homogeneous()),
            FamilyNonlinearity::Linear => Nonlinearity::linear(c),
            FamilyNonlinearity::LogModel => Nonlinearity::log_model(c),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyNonlinearity::Homogeneous => "homogeneous",
            FamilyNonlinearity::Linear => "linear",
            FamilyNonlinearity::LogModel => "log_model",
        }
    }
}

/// Geometry of one canonical domain: the solve box, the boundary point `w`
/// where the data vanish, and the interior ball used for Harnack certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSetup {
    pub domain: DomainSpec,
    pub lo: Point,
    pub hi: Point,
    pub w: Point,
    pub harnack_center: Point,
    pub harnack_radius: f64,
}

pub const GRAPH_SLOPE: f64 = 0.1;

impl FamilyDomain {
    pub fn setup(self) -> Result<DomainSetup> {
        Ok(match self {
            FamilyDomain::HalfSpace => DomainSetup {
                domain: DomainSpec::half_space(),
                lo: [-1.0, 0.0],
                hi: [1.0, 1.25],
                w: [0.0, 0.0],
                harnack_center: [0.0, 0.5],
                harnack_radius: 0.25,
            },
            FamilyDomain::Graph => DomainSetup {
                domain: DomainSpec::v_graph(GRAPH_SLOPE, 1.0)?,
                lo: [-1.0, 0.0],
                hi: [1.0, 1.25],
                w: [0.0, 0.0],
                harnack_center: [0.0, 0.5],
                harnack_radius: 0.25,
            },
            // The corner of a square of side 2, seen through the box [0, 1.25]².
            FamilyDomain::Cube => DomainSetup {
                domain: DomainSpec::cube(2.0)?,
                lo: [0.0, 0.0],
                hi: [1.25, 1.25],
                w: [0.0, 0.0],
                harnack_center: [0.5, 0.5],
                harnack_radius: 0.25,
            },
        })
    }
}

/// `1 + Σ_k a_k sin(πk x + b_k) sin(πk y + c_k)` with `|a_k| ≤ 0.2/k`; always in `[0.6, 1.4]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeededData {
    pub seed: u64,
    pub terms: Vec<[f64; 3]>,
}

impl SeededData {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (1..=3)
            .map(|k| {
                let a = rng.gen_range(-0.2..0.2) / k as f64;
                [a, rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)]
            })
            .collect();
        SeededData { seed, terms }
    }

    pub fn eval(&self, p: Point) -> f64 {
        1.0 + self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let k = PI * (i + 1) as f64;
                t[0] * (k * p[0] + t[1]).sin() * (k * p[1] + t[2]).sin()
            })
            .sum::<f64>()
    }
}

/// One member of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyInstance {
    pub domain: FamilyDomain,
    pub nl: FamilyNonlinearity,
    #[serde(rename = "R")]
    pub scale: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    pub h: f64,
    pub scales: Vec<f64>,
    pub seeds: Vec<u64>,
    pub lambda: f64,
    pub big_lambda: f64,
    /// Multiplier `c` of the linear and log-model nonlinearities.
    pub c: f64,
    pub tol_solve: f64,
    pub max_iters: usize,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig {
            h: 1.0 / 64.0,
            scales: vec![1.0, 0.5, 0.25],
            seeds: vec![11, 23, 37],
            lambda: 1.0,
            big_lambda: 2.0,
            c: 1.0,
            tol_solve: 1e-8,
            max_iters: 200,
        }
    }
}

impl FamilyConfig {
    pub fn ellipticity(&self) -> Result<EllipticityPair> {
        EllipticityPair::new(self.lambda, self.big_lambda)
    }

    pub fn options(&self) -> SolverOptions {
        SolverOptions { tol_solve: self.tol_solve, max_iters: self.max_iters, ..Default::default() }
    }

    /// All instances, sorted by (domain, nonlinearity, seed, decreasing R).
    pub fn instances(&self) -> Vec<FamilyInstance> {
        let mut scales = self.scales.clone();
        scales.sort_by(|a, b| b.total_cmp(a));
        let mut out = Vec::new();
        for domain in FamilyDomain::ALL {
            for nl in FamilyNonlinearity::ALL {
                for &seed in &self.seeds {
                    for &scale in &scales {
                        out.push(FamilyInstance { domain, nl, scale, seed });
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h <= 0.125) {
            return Err(Error::Config(format!("family grid spacing must lie in (0, 1/8], got {}", self.h)));
        }
        if self.scales.is_empty() || self.scales.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return Err(Error::Config("family scales must be a non-empty list in (0, 1]".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("family needs at least one data seed".into()));
        }
        self.ellipticity()?;
        Ok(())
    }
}

/// Boundary data: zero outside the domain (the vanishing patch), seeded data on the box edges inside it.
pub fn boundary_data(dom: &DomainSpec, data: &SeededData, p: Point) -> f64 {
    if dom.contains(p) {
        data.eval(p)
    } else {
        0.0
    }
}

/// A solved family member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedInstance {
    pub instance: FamilyInstance,
    pub setup: DomainSetup,
    pub nl: Nonlinearity,
    pub field: GridField,
    pub report: SolveReport,
}

/// Solves `P⁻(D²u) = Φ_R(|Du|)` for one instance.
pub fn solve_instance(inst: &FamilyInstance, cfg: &FamilyConfig) -> Result<SolvedInstance> {
    let setup = inst.domain.setup()?;
    let nl = inst.nl.build(cfg.c)?;
    let rnl = RescaledNonlinearity::new(nl.clone(), inst.scale)?;
    let data = SeededData::new(inst.seed);
    let grid = GridField::over_box(&setup.domain, setup.lo, setup.hi, cfg.h, |p| boundary_data(&setup.domain, &data, p))?;
    let prob = Problem::pucci_minus(cfg.ellipticity()?, Drift::Rescaled(rnl));
    let sol = solve_dirichlet(&prob, &grid, &cfg.options())?;
    Ok(SolvedInstance { instance: *inst, setup, nl, field: sol.field, report: sol.report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_data_is_reproducible_and_positive() {
        let a = SeededData::new(7);
        assert_eq!(a, SeededData::new(7));
        assert_ne!(a, SeededData::new(8));
        for i in 0..50 {
            let p = [i as f64 * 0.07 - 1.0, i as f64 * 0.03];
            let v = a.eval(p);
            assert!((0.6..=1.4).contains(&v));
        }
    }

    #[test]
    fn instances_are_sorted_and_complete() {
        let cfg = FamilyConfig::default();
        let all = cfg.instances();
        assert_eq!(all.len(), 81);
        assert_eq!(all[0].scale, 1.0);
        assert_eq!(all[2].scale, 0.25);
    }
}
