//! The experiment configuration file (TOML).

use crate::error::{CliError, CliResult};
use carleson_core::estimates::suite::SuiteConfig;
use carleson_core::geometry::{DomainSpec, GraphTable, Point};
use carleson_core::nonlinearity::{Nonlinearity, PhiTable, RescaledNonlinearity};
use carleson_core::solver::{Drift, EllipticityPair, PField, Problem, SolverOptions};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    HalfSpace,
    /// `x₂ > l|x₁|` for `|x₁| ≤ half_width`, flat beyond.
    Graph,
    /// A Lipschitz graph read from a two-column CSV table.
    TableGraph,
    Cube,
    Disc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainBlock {
    pub kind: DomainKind,
    pub l: f64,
    pub half_width: f64,
    pub table: Option<PathBuf>,
    /// Scale up to which a table graph is trusted.
    pub r0: f64,
    pub side: f64,
    pub center: Point,
    pub radius: f64,
}

impl Default for DomainBlock {
    fn default() -> Self {
        DomainBlock {
            kind: DomainKind::HalfSpace,
            l: 0.1,
            half_width: 1.0,
            table: None,
            r0: 1.0,
            side: 2.0,
            center: [0.0, 0.0],
            radius: 1.0,
        }
    }
}

impl DomainBlock {
    pub fn build(&self) -> CliResult<DomainSpec> {
        Ok(match self.kind {
            DomainKind::HalfSpace => DomainSpec::half_space(),
            DomainKind::Graph => DomainSpec::v_graph(self.l, self.half_width)?,
            DomainKind::TableGraph => {
                let path = self.table.as_ref().ok_or_else(|| CliError::Config("domain.table is required for table_graph".into()))?;
                DomainSpec::lipschitz_graph(GraphTable::from_csv(path)?, self.l, self.r0)?
            }
            DomainKind::Cube => DomainSpec::cube(self.side)?,
            DomainKind::Disc => DomainSpec::disc(self.center, self.radius)?,
        })
    }

    /// Default computational box for the domain kind.
    fn default_box(&self) -> (Point, Point) {
        match self.kind {
            DomainKind::HalfSpace | DomainKind::Graph | DomainKind::TableGraph => ([-1.0, 0.0], [1.0, 1.25]),
            DomainKind::Cube => ([0.0, 0.0], [self.side, self.side]),
            DomainKind::Disc => {
                let r = 1.1 * self.radius;
                ([self.center[0] - r, self.center[1] - r], [self.center[0] + r, self.center[1] + r])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityKind {
    Homogeneous,
    Linear,
    LogModel,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonlinearityBlock {
    pub kind: NonlinearityKind,
    pub c: f64,
    pub table: Option<PathBuf>,
}

impl Default for NonlinearityBlock {
    fn default() -> Self {
        NonlinearityBlock { kind: NonlinearityKind::LogModel, c: 1.0, table: None }
    }
}

impl NonlinearityBlock {
    pub fn build(&self) -> CliResult<Nonlinearity> {
        Ok(match self.kind {
            NonlinearityKind::Homogeneous => Nonlinearity::homogeneous(),
            NonlinearityKind::Linear => Nonlinearity::linear(self.c)?,
            NonlinearityKind::LogModel => Nonlinearity::log_model(self.c)?,
            NonlinearityKind::Tabulated => {
                let path = self.table.as_ref().ok_or_else(|| CliError::Config("nonlinearity.table is required for tabulated".into()))?;
                Nonlinearity::tabulated(PhiTable::from_csv(path)?, self.c)?
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    PucciMinus,
    PucciPlus,
    PxLaplace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverBlock {
    pub operator: OperatorKind,
    pub lambda: f64,
    pub big_lambda: f64,
    pub h: f64,
    /// Lower-left corner of the grid box; defaults depend on the domain kind.
    pub lo: Option<Point>,
    /// Upper-right corner; ignored along an axis whose node count is given.
    pub hi: Option<Point>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub tol_solve: f64,
    pub max_iters: usize,
    /// `p(x) = p_base + p_gradient·x` for the `px_laplace` operator.
    pub p_base: f64,
    pub p_gradient: Point,
}

impl Default for SolverBlock {
    fn default() -> Self {
        SolverBlock {
            operator: OperatorKind::PucciMinus,
            lambda: 1.0,
            big_lambda: 2.0,
            h: 1.0 / 64.0,
            lo: None,
            hi: None,
            nx: None,
            ny: None,
            tol_solve: 1e-8,
            max_iters: 200,
            p_base: 2.0,
            p_gradient: [0.0, 0.0],
        }
    }
}

impl SolverBlock {
    pub fn ellipticity(&self) -> CliResult<EllipticityPair> {
        Ok(EllipticityPair::new(self.lambda, self.big_lambda)?)
    }

    pub fn options(&self) -> SolverOptions {
        SolverOptions { tol_solve: self.tol_solve, max_iters: self.max_iters, ..Default::default() }
    }

    pub fn p_field(&self) -> PField {
        PField::affine(self.p_base, self.p_gradient)
    }

    /// The problem at scale `R`; drift operators use the rescaled drift `Φ_R`.
    pub fn problem(&self, nl: &Nonlinearity, scale: f64) -> CliResult<Problem> {
        Ok(match self.operator {
            OperatorKind::PxLaplace => Problem::px_laplace(self.p_field()),
            op => {
                let drift = Drift::Rescaled(RescaledNonlinearity::new(nl.clone(), scale)?);
                if op == OperatorKind::PucciPlus {
                    Problem::pucci_plus(self.ellipticity()?, drift)
                } else {
                    Problem::pucci_minus(self.ellipticity()?, drift)
                }
            }
        })
    }

    pub fn grid_box(&self, domain: &DomainBlock) -> (Point, Point) {
        let (dlo, dhi) = domain.default_box();
        let lo = self.lo.unwrap_or(dlo);
        let mut hi = self.hi.unwrap_or(dhi);
        if let Some(nx) = self.nx {
            hi[0] = lo[0] + (nx.max(1) - 1) as f64 * self.h;
        }
        if let Some(ny) = self.ny {
            hi[1] = lo[1] + (ny.max(1) - 1) as f64 * self.h;
        }
        (lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    /// Seeded smooth data inside the domain, zero outside (vanishing boundary patch).
    Vanishing,
    /// Seeded smooth data on every boundary node.
    Seeded,
    /// `max(x₂, 0)`.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioBlock {
    pub scales: Vec<f64>,
    pub seeds: Vec<u64>,
    pub data: DataKind,
    /// Boundary point for flatness, corkscrew, Carleson, Hölder and boundary Harnack runs.
    pub w: Point,
    /// Radius of the boundary runs.
    pub radius: f64,
    /// Interior point for Harnack and oscillation-decay runs.
    pub center: Point,
    pub interior_radius: f64,
    /// Exponent of the radius weight in the interior Harnack functional.
    pub alpha: f64,
    /// Exponent of the blow-up criterion `s^α η_R(M_s)`.
    pub blowup_alpha: f64,
    /// `H` values of the sharpness example.
    pub big_h: Vec<f64>,
    pub eps: f64,
}

impl Default for ScenarioBlock {
    fn default() -> Self {
        ScenarioBlock {
            scales: vec![1.0, 0.5, 0.25],
            seeds: vec![11, 23, 37],
            data: DataKind::Vanishing,
            w: [0.0, 0.0],
            radius: 0.5,
            center: [0.0, 0.5],
            interior_radius: 0.25,
            alpha: 0.0,
            blowup_alpha: 0.5,
            big_h: vec![1e4, 1e6],
            eps: 0.03,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { dir: PathBuf::from("out"), format: Format::Both }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainBlock,
    pub nonlinearity: NonlinearityBlock,
    pub solver: SolverBlock,
    pub scenario: ScenarioBlock,
    pub output: OutputBlock,
    pub suite: SuiteConfig,
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    /// Parses the file and resolves relative table paths against its directory.
    pub fn load(path: &Path) -> CliResult<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes).map_err(|_| CliError::Config("config is not valid UTF-8".into()))?;
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for t in [&mut cfg.domain.table, &mut cfg.nonlinearity.table].into_iter().flatten() {
            if t.is_relative() {
                *t = base.join(&*t);
            }
        }
        cfg.validate()?;
        Ok((cfg, bytes))
    }

    /// Range checks run before any computation.
    pub fn validate(&self) -> CliResult<()> {
        for p in [&self.domain.table, &self.nonlinearity.table].into_iter().flatten() {
            if !p.exists() {
                return Err(CliError::Config(format!("referenced file {} does not exist", p.display())));
            }
        }
        positive("solver.h", self.solver.h)?;
        positive("solver.tol_solve", self.solver.tol_solve)?;
        if self.solver.max_iters == 0 {
            return Err(CliError::Config("solver.max_iters must be at least 1".into()));
        }
        self.solver.ellipticity()?;
        if self.scenario.scales.is_empty() || self.scenario.scales.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return Err(CliError::Config("scenario.scales must be a non-empty list in (0, 1]".into()));
        }
        if self.scenario.seeds.is_empty() {
            return Err(CliError::Config("scenario.seeds must not be empty".into()));
        }
        positive("scenario.radius", self.scenario.radius)?;
        positive("scenario.interior_radius", self.scenario.interior_radius)?;
        positive("scenario.eps", self.scenario.eps)?;
        let (lo, hi) = self.solver.grid_box(&self.domain);
        if !(hi[0] > lo[0] && hi[1] > lo[1]) {
            return Err(CliError::Config(format!("grid box {lo:?}..{hi:?} is empty")));
        }
        self.suite.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn committed_default_matches_builtin_defaults() {
        let cfg: ExperimentConfig = toml::from_str(include_str!("../../../configs/default.toml")).unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn range_checks_run_before_compute() {
        let mut cfg = ExperimentConfig::default();
        cfg.scenario.scales = vec![1.5];
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
        let mut cfg = ExperimentConfig::default();
        cfg.nonlinearity.table = Some(PathBuf::from("/nonexistent/phi.csv"));
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn node_counts_override_the_box() {
        let s = SolverBlock { nx: Some(33), h: 1.0 / 16.0, ..Default::default() };
        let (lo, hi) = s.grid_box(&DomainBlock::default());
        assert_eq!(hi[0] - lo[0], 2.0);
        assert_eq!(hi[1], 1.25);
    }
}
