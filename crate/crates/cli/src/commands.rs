use crate::config::{DataKind, DomainKind, ExperimentConfig, OperatorKind};
use crate::error::{CliError, CliResult};
use crate::output::{Output, Table};
use carleson_core::barriers::sharpness_example;
use carleson_core::estimates::family::boundary_data;
use carleson_core::estimates::suite::{run_criterion, CriterionResult};
use carleson_core::estimates::*;
use carleson_core::geometry::{corkscrew, exterior_corkscrew_check, lipschitz_to_delta, reifenberg_delta, DomainSpec, Point};
use carleson_core::nonlinearity::{check_structure, osgood_classify, Nonlinearity, OsgoodVerdict};
use carleson_core::numeric::log_grid;
use carleson_core::solver::{solve_dirichlet, GridField, SolveReport};
use carleson_core::Extended;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Structural checks and Osgood classification of the nonlinearity.
    Structure,
    /// Flatness and corkscrew audit at the configured boundary point.
    Geometry,
    /// One Dirichlet solve (first scale, first seed) with a field dump.
    Solve,
    /// Interior Harnack certificates over scales and seeds.
    Harnack,
    /// Carleson estimate (or the p(x) variant for the px_laplace operator).
    Carleson,
    /// Oscillation-decay and boundary Hölder fits.
    Holder,
    /// Blow-up profile on the retracted cap.
    Blowup,
    /// Boundary Harnack comparison with a matched second solution.
    Bharnack,
    /// The double-exponential sharpness example.
    Sharpness,
    /// The acceptance suite.
    Suite {
        /// Run only these criteria (comma separated, 1-based).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Structure => "structure",
            Command::Geometry => "geometry",
            Command::Solve => "solve",
            Command::Harnack => "harnack",
            Command::Carleson => "carleson",
            Command::Holder => "holder",
            Command::Blowup => "blowup",
            Command::Bharnack => "bharnack",
            Command::Sharpness => "sharpness",
            Command::Suite { .. } => "suite",
        }
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn ext(v: Extended) -> String {
    match v {
        Extended::Finite(x) => num(x),
        Extended::Infinite => "inf".into(),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

fn verdict(v: &OsgoodVerdict) -> &'static str {
    match v {
        OsgoodVerdict::Diverges => "diverges",
        OsgoodVerdict::Converges { .. } => "converges",
        OsgoodVerdict::Indeterminate { .. } => "indeterminate",
    }
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    dom: DomainSpec,
    nl: Nonlinearity,
}

#[derive(Serialize)]
struct Solved {
    #[serde(rename = "R")]
    scale: f64,
    seed: u64,
    #[serde(skip)]
    field: GridField,
    report: SolveReport,
}

impl Ctx<'_> {
    fn data(&self, seed: u64) -> impl Fn(Point) -> f64 + '_ {
        let data = SeededData::new(seed);
        let kind = self.cfg.scenario.data;
        move |p| match kind {
            DataKind::Vanishing => boundary_data(&self.dom, &data, p),
            DataKind::Seeded => data.eval(p),
            DataKind::Linear => p[1].max(0.0),
        }
    }

    fn grid(&self, seed: u64) -> CliResult<GridField> {
        let (lo, hi) = self.cfg.solver.grid_box(&self.cfg.domain);
        Ok(GridField::over_box(&self.dom, lo, hi, self.cfg.solver.h, self.data(seed))?)
    }

    fn solve(&self, scale: f64, seed: u64) -> CliResult<Solved> {
        let prob = self.cfg.solver.problem(&self.nl, scale)?;
        let sol = solve_dirichlet(&prob, &self.grid(seed)?, &self.cfg.solver.options())?;
        Ok(Solved { scale, seed, field: sol.field, report: sol.report })
    }

    /// Every (seed, scale) pair, solved in parallel and returned in sorted order.
    fn solve_all(&self) -> CliResult<Vec<Solved>> {
        let mut scales = self.cfg.scenario.scales.clone();
        scales.sort_by(|a, b| b.total_cmp(a));
        let pairs: Vec<(u64, f64)> =
            self.cfg.scenario.seeds.iter().flat_map(|&s| scales.iter().map(move |&r| (s, r))).collect();
        pairs.par_iter().map(|&(seed, scale)| self.solve(scale, seed)).collect()
    }

    fn descriptor(&self, s: &Solved) -> InstanceDescriptor {
        InstanceDescriptor {
            domain: self.dom.kind_name().into(),
            nl: self.nl.kind_name().into(),
            scale: s.scale,
            seed: Some(s.seed),
        }
    }
}

/// Runs one subcommand; returns the paths written and, for the suite, the criterion lines.
pub fn run(cmd: &Command, cfg: &ExperimentConfig, out: &Output) -> CliResult<Vec<PathBuf>> {
    let ctx = Ctx { cfg, dom: cfg.domain.build()?, nl: cfg.nonlinearity.build()? };
    let name = cmd.name();
    match cmd {
        Command::Structure => structure(&ctx, out, name),
        Command::Geometry => geometry(&ctx, out, name),
        Command::Solve => solve(&ctx, out, name),
        Command::Harnack => harnack(&ctx, out, name),
        Command::Carleson => carleson(&ctx, out, name),
        Command::Holder => holder(&ctx, out, name),
        Command::Blowup => blowup(&ctx, out, name),
        Command::Bharnack => bharnack(&ctx, out, name),
        Command::Sharpness => sharpness(&ctx, out, name),
        Command::Suite { criteria } => suite(&ctx, out, name, criteria),
    }
}

fn structure(ctx: &Ctx, out: &Output, name: &str) -> CliResult<Vec<PathBuf>> {
    let s = check_structure(&ctx.nl, &log_grid(1e-8, 1e8, 321))?;
    let o = osgood_classify(&ctx.nl)?;
    let mut t = Table::new(&["kind", "all_pass", "phi_dominates_identity", "eta_monotone", "lambda0", "lambda0_holds", "osgood_at_zero", "osgood_at_infinity"]);
    let flag = |b: Option<bool>| b.map_or_else(String::new, |b| b.to_string());
    t.push(vec![
        s.kind.clone(),
        s.all_pass().to_string(),
        flag(s.phi_dominates_identity),
        flag(s.eta_monotone),
        num(s.reported_lambda0),
        s.lambda0_holds.to_string(),
        verdict(&o.at_zero.verdict).into(),
        verdict(&o.at_infinity.verdict).into(),
    ]);
    out.write(name, &json!({ "structure": s, "osgood": o }), &t)
}

fn geometry(ctx: &Ctx, out: &Output, name: &str) -> CliResult<Vec<PathBuf>> {
    let sc = &ctx.cfg.scenario;
    let delta_bound = match ctx.cfg.domain.kind {
        DomainKind::Graph | DomainKind::TableGraph => Some(lipschitz_to_delta(ctx.cfg.domain.l)?),
        _ => None,
    };
    let flat = reifenberg_delta(&ctx.dom, sc.w, sc.radius)?;
    let cork = corkscrew(&ctx.dom, sc.w, sc.radius)?;
    let exterior = exterior_corkscrew_check(&ctx.dom, sc.w, sc.radius);
    let within = delta_bound.map(|d| flat.delta <= d + 2.0 * flat.resolution);
    let mut t = Table::new(&["w_x", "w_y", "r", "delta", "delta_bound", "resolution", "separated", "corkscrew_x", "corkscrew_y", "clearance", "exterior_ok"]);
    t.push(vec![
        num(sc.w[0]),
        num(sc.w[1]),
        num(sc.radius),
        num(flat.delta),
        opt(delta_bound),
        num(flat.resolution),
        flat.separated.to_string(),
        num(cork.point[0]),
        num(cork.point[1]),
        num(cork.clearance),
        exterior.is_some().to_string(),
    ]);
    let report = json!({
        "flatness": flat,
        "lipschitz_delta_bound": delta_bound,
        "within_bound": within,
        "corkscrew": cork,
        "exterior_corkscrew": exterior,
    });
    out.write(name, &report, &t)
}

fn solve(ctx: &Ctx, out: &Output, name: &str) -> CliResult<Vec<PathBuf>> {
    let sc = &ctx.cfg.scenario;
    let s = ctx.solve(sc.scales[0], sc.seeds[0])?;
    let mut written = Vec::new();
    std::fs::create_dir_all(&out.dir)?;
    let dump = out.dir.join("solve_field.txt");
    s.field.write_text(BufWriter::new(File::create(&dump)?))?;
    written.push(dump);
    if out.format.csv() {
        let p = out.dir.join("solve_field.csv");
        s.field.write_csv(BufWriter::new(File::create(&p)?))?;
        written.push(p);
    }
    let mut t = Table::new(&["R", "seed", "nx", "ny", "h", "iterations", "residual", "tolerance", "negative_data_warning"]);
    t.push(vec![
        num(s.scale),
        s.seed.to_string(),
        s.field.nx.to_string(),
        s.field.ny.to_string(),
        num(s.field.h),
        s.report.iterations.to_string(),
        num(s.report.residual),
        num(s.report.tolerance),
        s.report.negative_data_warning.to_string(),
    ]);
    let report = json!({ "R": s.scale, "seed": s.seed, "nx": s.field.nx, "ny": s.field.ny, "h": s.field.h, "origin": s.field.origin, "solve": s.report });
    written.extend(out.write(name, &report, &t)?);
    Ok(written)
}

fn harnack(ctx: &Ctx, out: &Output, name: &str) -> CliResult<Vec<PathBuf>> {
    let sc = &ctx.cfg.scenario;
    let solved = ctx.solve_all()?;
    let mut certs = Vec::new();
    for s in &solved {
        certs.push(verify_interior_harnack(&s.field, sc.center, sc.interior_radius, s.scale, &ctx.nl, sc.alpha)?);
    }
    let values: Vec<f64> = certs.iter().map(|c| c.value.finite().unwrap_or(f64::INFINITY)).collect();
    let desc = solved.iter().map(|s| ctx.descriptor(s)).collect();
    let report = EstimateReport::from_values(Theorem::InteriorHarnack, desc, values.iter().map(|&v| harnack_constant(v)).collect(), vec![])
        .with_raw(values);
    let mut t = Table::new(&["domain", "nl", "R", "seed", "m", "M", "integral", "constant"]);
    for ((s, c), k) in solved.iter().zip(&certs).zip(&report.per_instance_values) {
        t.push(vec![ctx.dom.kind_name().into(), ctx.nl.kind_name().into(), num(s.scale), s.seed.to_string(), num(c.m), ext(c.big_m), ext(c.value), num(*k)]);
    }
    out.write(name, &json!({ "report": report, "certificates": certs }), &t)
}

fn carleson(ctx: &Ctx, out: &Output, name: &str) -> CliResult<Vec<PathBuf>> {
    let sc = &ctx.cfg.scenario;
    let solved = ctx.solve_all()?;
    if ctx.cfg.solver.operator == OperatorKind::PxLaplace {
        let p = ctx.cfg.solver.p_field();
        let mut reps = Vec::new();
        let mut t = Table::new(&["R", "seed", "p_min", "p_max", "u_a", "fitted_c", "passed", "margin"]);
        for s in &solved {
            let r = px_corollary_check(&s.field, None, &p, &ctx.dom, sc.w, s.scale)?;
            t.push(vec![num(s.scale), s.seed.to_string(), num(r.p_range.0), num(r.p_range.1), num(r.u_a), opt(r.fitted_c), r.passed.to_string(), opt(r.margin)]);
            reps.push(r);
        }
        return out.write(name, &json!({ "px_reports": reps }), &t);
    }
    let mut insts = Vec::new();
    for s in &solved {
        insts.push(carleson_instance(&s.field, &ctx.dom, sc.w, s.scale, &ctx.nl)?);
    }
    let desc = solved.iter().map(|s| ctx.descriptor(s)).collect();
    let flags = insts.iter().flat_map(|i| i.flags.clone()).collect();
    let report = EstimateReport::from_values(
        Theorem::Carleson,
        desc,
        insts.iter().map(|i| i.constant.unwrap_or(f64::INFINITY)).collect(),
        flags,
    )
    .with_raw(insts.iter().map(|i| i.trials[0].integral.finite().unwrap_or(f64::INFINITY)).collect());
    let mut t = Table::new(&["domain", "nl", "R", "seed", "u_a", "smallest_trial", "constant"]);
    for (s, i) in solved.iter().zip(&insts) {
        t.push(vec![ctx.dom.kind_name().into(), ctx.nl.kind_name().into(), num(s.scale), s.seed.to_string(), num(i.u_a), opt(i.smallest_trial), opt(i.constant)]);
    }
    out.write(name, &json!({ "report": report, "instances": insts }), &t)
}

fn holder(ctx: &Ctx, out: &Output, name: &str) -> CliResult<Vec<PathBuf>> {
    let sc = &ctx.cfg.scenario;
    let solved = ctx.solve_all()?;
    let mut osc = Vec::new();
    let mut bdry = Vec::new();
    let mut t = Table::new(&["R", "seed", "tau", "osc_c", "osc_fallback", "c1", "alpha", "alpha_at_window_edge", "delta"]);
    for s in &solved {
        let o = verify_osc_decay(&s.field, sc.center, sc.interior_radius, s.scale, &ctx.nl)?;
        let b = verify_boundary_holder(&s.field, &ctx.dom, sc.w, sc.radius, s.scale, &ctx.nl)?;
        t.push(vec![num(s.scale), s.seed.to_string(), num(o.tau), num(o.c), o.fallback.to_string(), num(b.c1), num(b.alpha), b.at_window_edge.to_string(), num(b.delta)]);
        osc.push(o);
        bdry.push(b);
    }
    out.write(name, &json!({ "osc_decay": osc, "boundary_holder": bdry }), &t)
}

fn blowup(ctx: &Ctx, out: &Output, name: &str) -> CliResult<Vec<PathBuf>> {
    let sc = &ctx.cfg.scenario;
    let ell = ctx.cfg.solver.ellipticity()?;
    let solved = ctx.solve_all()?;
    let mut reps = Vec::new();
    let mut t = Table::new(&["R", "seed", "s", "m_s", "criterion", "delta_trial", "gamma", "alternative", "monotone"]);
    for s in &solved {
        let r = blowup_profile(&s.field, &ctx.dom, &ell, s.scale, &ctx.nl, sc.blowup_alpha)?;
        let alt = match r.alternative {
            Alternative::S0 => "S0",
            Alternative::S1ToS3 => "S1-S3",
        };
        for rung in &r.ladder {
            t.push(vec![num(s.scale), s.seed.to_string(), num(rung.s), num(rung.m_s), num(rung.criterion), num(r.delta_trial), opt(r.gamma), alt.into(), r.monotone.to_string()]);
        }
        reps.push(json!({ "R": s.scale, "seed": s.seed, "profile": r }));
    }
    out.write(name, &json!({ "profiles": reps }), &t)
}

fn bharnack(ctx: &Ctx, out: &Output, name: &str) -> CliResult<Vec<PathBuf>> {
    let cfg = ctx.cfg;
    let sc = &cfg.scenario;
    let ell = cfg.solver.ellipticity()?;
    let geo = BharnackGeometry { w: sc.w, ..Default::default() };
    let seed_u = sc.seeds[0];
    let seed_v = sc.seeds.get(1).copied().unwrap_or(seed_u + 1);
    let mut scales = sc.scales.clone();
    scales.sort_by(|a, b| b.total_cmp(a));
    let runs: Vec<_> = scales
        .par_iter()
        .map(|&scale| -> CliResult<_> {
            let u = ctx.solve(scale, seed_u)?;
            let a = corkscrew(&ctx.dom, sc.w, scale)?.point;
            let u_a = u.field.interpolate(a)?;
            let prob = cfg.solver.problem(&ctx.nl, scale)?;
            let v = match_at_corkscrew(&prob, &ctx.grid(seed_v)?, a, u_a, &cfg.solver.options())?;
            let rep = verify_boundary_harnack(&u.field, &v.field, &ctx.dom, &ell, scale, &ctx.nl, &geo, cfg.solver.tol_solve)?;
            Ok((scale, a, v, rep))
        })
        .collect::<CliResult<_>>()?;
    let mut t = Table::new(&["R", "seed_u", "seed_v", "mu0", "mu1", "branch", "ctilde", "sup_ratio", "integral", "match_method", "match_solves", "excluded_nodes"]);
    let mut reps = Vec::new();
    for (scale, a, v, rep) in runs {
        t.push(vec![
            num(scale),
            seed_u.to_string(),
            seed_v.to_string(),
            ext(rep.mu0),
            ext(rep.mu1),
            format!("{:?}", rep.branch),
            num(rep.ctilde),
            num(rep.sup_ratio),
            ext(rep.integral),
            v.method.clone(),
            v.solves.to_string(),
            rep.excluded_nodes.to_string(),
        ]);
        reps.push(json!({
            "R": scale,
            "corkscrew": a,
            "matching": { "method": v.method, "amplitude": v.amplitude, "solves": v.solves, "mismatch": v.mismatch },
            "report": rep,
        }));
    }
    out.write(name, &json!({ "seed_u": seed_u, "seed_v": seed_v, "runs": reps }), &t)
}

fn sharpness(ctx: &Ctx, out: &Output, name: &str) -> CliResult<Vec<PathBuf>> {
    let sc = &ctx.cfg.scenario;
    let reps = sc.big_h.iter().map(|&h| sharpness_example(h, sc.eps)).collect::<carleson_core::Result<Vec<_>>>()?;
    let mut t = Table::new(&["H", "eps", "K", "gamma", "ln_ratio_lower_bound", "k_bracket_ok", "barrier_admissible", "chain_holds"]);
    for (h, r) in sc.big_h.iter().zip(&reps) {
        t.push(vec![
            num(*h),
            num(sc.eps),
            num(r.k),
            num(r.gamma),
            opt(r.ratio_lower_bound.ln()),
            r.k_bracket_ok.to_string(),
            r.barrier_admissible.to_string(),
            r.chain.iter().all(|l| l.holds).to_string(),
        ]);
    }
    out.write(name, &json!({ "examples": reps }), &t)
}

#[derive(Serialize)]
struct CriterionView<'a> {
    id: usize,
    name: &'a str,
    passed: bool,
    detail: &'a str,
    limit_s: f64,
}

fn suite(ctx: &Ctx, out: &Output, name: &str, only: &[usize]) -> CliResult<Vec<PathBuf>> {
    let ids: Vec<usize> = if only.is_empty() { (1..=suite::CRITERIA).collect() } else { only.to_vec() };
    let mut results: Vec<CriterionResult> = Vec::new();
    for id in ids {
        let r = run_criterion(id, &ctx.cfg.suite)?;
        println!("{}", r.line());
        results.push(r);
    }
    // Timings live in their own table so the report itself is reproducible.
    let views: Vec<CriterionView> = results
        .iter()
        .map(|r| CriterionView { id: r.id, name: &r.name, passed: r.passed, detail: &r.detail, limit_s: r.limit_s })
        .collect();
    let mut t = Table::new(&["id", "name", "passed", "limit_s", "detail"]);
    for r in &results {
        t.push(vec![r.id.to_string(), r.name.clone(), r.passed.to_string(), num(r.limit_s), r.detail.clone()]);
    }
    let mut written = out.write(name, &json!({ "criteria": views }), &t)?;
    let mut timing = Table::new(&["id", "elapsed_s", "limit_s"]);
    for r in &results {
        timing.push(vec![r.id.to_string(), format!("{:.3}", r.elapsed_s), num(r.limit_s)]);
    }
    let p = out.dir.join("suite_timings.csv");
    out.write_table(&p, &timing)?;
    written.push(p);
    let failed: Vec<usize> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() {
        Ok(written)
    } else {
        Err(CliError::Failed(format!("acceptance criteria failed: {failed:?}")))
    }
}
