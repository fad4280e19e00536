//! Planar domains with computable boundaries: membership, distance to the
//! boundary, boundary sampling, flatness, corkscrew points, Harnack chains
//! and retracted caps.

mod cap;
mod chain;
mod corkscrew;
mod flatness;
mod hausdorff;
mod stretch;

pub use cap::{collar_ratio, retracted_cap, RetractedCap, CAP_FATTENING, CAP_RADIUS};
pub use chain::{harnack_chain, BallChain, ChainChecks, PathKind};
pub use corkscrew::{corkscrew, exterior_corkscrew_check, CorkscrewPoint};
pub use flatness::{lipschitz_to_delta, reifenberg_delta, FlatnessReport, FLATNESS_ANGLES};
pub use hausdorff::hausdorff_distance;
pub use stretch::{stretch_map, StretchMap};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

pub type Point = [f64; 2];

/// Half-length of the segments standing in for unbounded boundary pieces.
const FAR: f64 = 1.0e4;

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}
pub(crate) fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}
pub(crate) fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s]
}
pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn dist_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let l2 = dot(ab, ab);
    if l2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), ab) / l2).clamp(0.0, 1.0);
    dist(p, add(a, scale(ab, t)))
}

/// Normalizes an angle into `[0, 2π)`.
fn wrap(theta: f64) -> f64 {
    theta.rem_euclid(2.0 * PI)
}

/// One smooth piece of a boundary curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Segment { a: Point, b: Point },
    /// Counter-clockwise arc from `start` through `sweep` radians.
    Arc { center: Point, radius: f64, start: f64, sweep: f64 },
}

impl Piece {
    pub fn length(&self) -> f64 {
        match *self {
            Piece::Segment { a, b } => dist(a, b),
            Piece::Arc { radius, sweep, .. } => radius * sweep,
        }
    }

    pub fn distance(&self, p: Point) -> f64 {
        match *self {
            Piece::Segment { a, b } => dist_to_segment(p, a, b),
            Piece::Arc { center, radius, start, sweep } => {
                let v = sub(p, center);
                let r = norm(v);
                let rel = wrap(v[1].atan2(v[0]) - start);
                if r > 0.0 && rel <= sweep {
                    (r - radius).abs()
                } else {
                    let e0 = self.point_at(0.0);
                    let e1 = self.point_at(1.0);
                    dist(p, e0).min(dist(p, e1))
                }
            }
        }
    }

    /// Point at normalized parameter `s ∈ [0, 1]`.
    pub fn point_at(&self, s: f64) -> Point {
        match *self {
            Piece::Segment { a, b } => add(a, scale(sub(b, a), s)),
            Piece::Arc { center, radius, start, sweep } => {
                let th = start + sweep * s;
                [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
            }
        }
    }

    /// Parts of this piece inside the closed disc `B̄(c, r)`, each as a polyline.
    ///
    /// Segments clip exactly (two vertices); arcs are sampled at `spacing`.
    fn clip_to_disc(&self, c: Point, r: f64, spacing: f64) -> Vec<Vec<Point>> {
        match *self {
            Piece::Segment { a, b } => {
                let d = sub(b, a);
                let f = sub(a, c);
                let qa = dot(d, d);
                if qa == 0.0 {
                    return if dist(a, c) <= r { vec![vec![a]] } else { vec![] };
                }
                let qb = 2.0 * dot(f, d);
                let qc = dot(f, f) - r * r;
                let disc = qb * qb - 4.0 * qa * qc;
                if disc < 0.0 {
                    return vec![];
                }
                let sq = disc.sqrt();
                let t0 = ((-qb - sq) / (2.0 * qa)).max(0.0);
                let t1 = ((-qb + sq) / (2.0 * qa)).min(1.0);
                if t0 > t1 {
                    return vec![];
                }
                vec![vec![self.point_at(t0), self.point_at(t1)]]
            }
            Piece::Arc { .. } => {
                let n = ((self.length() / spacing).ceil() as usize).max(8);
                let mut runs = Vec::new();
                let mut cur: Vec<Point> = Vec::new();
                for i in 0..=n {
                    let p = self.point_at(i as f64 / n as f64);
                    if dist(p, c) <= r {
                        cur.push(p);
                    } else if !cur.is_empty() {
                        runs.push(std::mem::take(&mut cur));
                    }
                }
                if !cur.is_empty() {
                    runs.push(cur);
                }
                runs
            }
        }
    }
}

/// Distance from `p` to a family of polylines.
pub fn dist_to_polylines(p: Point, lines: &[Vec<Point>]) -> f64 {
    let mut best = f64::INFINITY;
    for line in lines {
        if line.len() == 1 {
            best = best.min(dist(p, line[0]));
        }
        for w in line.windows(2) {
            best = best.min(dist_to_segment(p, w[0], w[1]));
        }
    }
    best
}

/// Resamples polylines at (at most) the given arc-length spacing.
pub fn densify(lines: &[Vec<Point>], spacing: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for line in lines {
        if line.len() == 1 {
            out.push(line[0]);
            continue;
        }
        for (k, w) in line.windows(2).enumerate() {
            let n = ((dist(w[0], w[1]) / spacing).ceil() as usize).max(1);
            let start = if k == 0 { 0 } else { 1 };
            for i in start..=n {
                out.push(add(w[0], scale(sub(w[1], w[0]), i as f64 / n as f64)));
            }
        }
    }
    out
}

/// A piecewise-linear graph `x₂ = g(x₁)`, extended constantly beyond its table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphTable {
    pub xs: Vec<f64>,
    pub gs: Vec<f64>,
}

impl GraphTable {
    pub fn new(xs: Vec<f64>, gs: Vec<f64>) -> Result<Self> {
        if xs.len() != gs.len() || xs.len() < 2 {
            return Err(Error::Config("graph table needs at least two (x, g) rows".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("graph abscissae must be strictly increasing".into()));
        }
        if gs.iter().chain(xs.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Config("graph table contains non-finite values".into()));
        }
        Ok(GraphTable { xs, gs })
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let (mut xs, mut gs) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            let parse = |j: usize| rec.get(j).and_then(|s| s.parse::<f64>().ok());
            match (parse(0), parse(1)) {
                (Some(x), Some(g)) => {
                    xs.push(x);
                    gs.push(g);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::Parse(format!("{}: bad row {}", path.display(), i + 1))),
            }
        }
        GraphTable::new(xs, gs)
    }

    /// Largest slope between any two table points.
    pub fn lipschitz_constant(&self) -> f64 {
        let n = self.xs.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(((self.gs[j] - self.gs[i]) / (self.xs[j] - self.xs[i])).abs());
            }
        }
        best
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.gs[0];
        }
        if x >= self.xs[n - 1] {
            return self.gs[n - 1];
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.gs[i] + t * (self.gs[i + 1] - self.gs[i])
    }

    fn pieces(&self) -> Vec<Piece> {
        let n = self.xs.len();
        let mut out = vec![Piece::Segment {
            a: [self.xs[0] - FAR, self.gs[0]],
            b: [self.xs[0], self.gs[0]],
        }];
        for i in 0..n - 1 {
            out.push(Piece::Segment {
                a: [self.xs[i], self.gs[i]],
                b: [self.xs[i + 1], self.gs[i + 1]],
            });
        }
        out.push(Piece::Segment {
            a: [self.xs[n - 1], self.gs[n - 1]],
            b: [self.xs[n - 1] + FAR, self.gs[n - 1]],
        });
        out
    }
}

/// The supported domain shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainKind {
    /// `{x₂ > 0}`.
    HalfSpace,
    /// `{x₂ > g(x₁)}`.
    LipschitzGraph { graph: GraphTable },
    /// The open square `(0, side)²`.
    Cube { side: f64 },
    /// The open square minus a closed disc.
    CubeMinusBall { side: f64, center: Point, radius: f64 },
    /// `{r_in < |x − c| < r_out, θ ∈ (θ₀, θ₀ + sweep)}`; a sweep of `2π` is a full annulus
    /// and `r_in = 0` with full sweep is a disc.
    AnnulusSector {
        center: Point,
        r_in: f64,
        r_out: f64,
        theta0: f64,
        sweep: f64,
    },
}

/// A domain together with its NTA/flatness constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    /// Lipschitz constant of the boundary (graph kinds), 0 for flat pieces.
    pub l: f64,
    /// Scale below which the description is valid.
    pub r0: f64,
}

impl DomainSpec {
    pub fn half_space() -> Self {
        DomainSpec { kind: DomainKind::HalfSpace, l: 0.0, r0: f64::INFINITY }
    }

    /// Graph domain; fails if the table is not `l`-Lipschitz.
    pub fn lipschitz_graph(graph: GraphTable, l: f64, r0: f64) -> Result<Self> {
        if !(l >= 0.0) {
            return Err(Error::Config(format!("Lipschitz constant must be >= 0, got {l}")));
        }
        let lip = graph.lipschitz_constant();
        if lip > l * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::Config(format!(
                "graph table has slope {lip}, exceeding the declared Lipschitz constant {l}"
            )));
        }
        Ok(DomainSpec { kind: DomainKind::LipschitzGraph { graph }, l, r0 })
    }

    /// The V-shaped graph `x₂ = l|x₁|` on `[-w, w]`, flat beyond.
    pub fn v_graph(l: f64, half_width: f64) -> Result<Self> {
        let graph = GraphTable::new(
            vec![-half_width, 0.0, half_width],
            vec![l * half_width, 0.0, l * half_width],
        )?;
        DomainSpec::lipschitz_graph(graph, l, half_width)
    }

    pub fn cube(side: f64) -> Result<Self> {
        if !(side > 0.0) {
            return Err(Error::Config(format!("cube side must be positive, got {side}")));
        }
        Ok(DomainSpec { kind: DomainKind::Cube { side }, l: 0.0, r0: side / 2.0 })
    }

    pub fn cube_minus_ball(side: f64, center: Point, radius: f64) -> Result<Self> {
        if !(side > 0.0 && radius > 0.0) {
            return Err(Error::Config("cube side and ball radius must be positive".into()));
        }
        Ok(DomainSpec {
            kind: DomainKind::CubeMinusBall { side, center, radius },
            l: 0.0,
            r0: radius.min(side / 2.0),
        })
    }

    pub fn annulus_sector(center: Point, r_in: f64, r_out: f64, theta0: f64, sweep: f64) -> Result<Self> {
        if !(r_in >= 0.0 && r_out > r_in && sweep > 0.0 && sweep <= 2.0 * PI) {
            return Err(Error::Config(format!(
                "annulus sector needs 0 <= r_in < r_out and sweep in (0, 2pi], got r_in = {r_in}, r_out = {r_out}, sweep = {sweep}"
            )));
        }
        Ok(DomainSpec {
            kind: DomainKind::AnnulusSector { center, r_in, r_out, theta0, sweep },
            l: 0.0,
            r0: (r_out - r_in) / 2.0,
        })
    }

    pub fn disc(center: Point, radius: f64) -> Result<Self> {
        Self::annulus_sector(center, 0.0, radius, 0.0, 2.0 * PI)
    }

    /// NTA constant `L = max{l, 2}`.
    pub fn nta_constant(&self) -> f64 {
        self.l.max(2.0)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            DomainKind::HalfSpace => "half_space",
            DomainKind::LipschitzGraph { .. } => "lipschitz_graph",
            DomainKind::Cube { .. } => "cube",
            DomainKind::CubeMinusBall { .. } => "cube_minus_ball",
            DomainKind::AnnulusSector { .. } => "annulus_sector",
        }
    }

    pub fn is_graph_like(&self) -> bool {
        matches!(self.kind, DomainKind::HalfSpace | DomainKind::LipschitzGraph { .. })
    }

    /// Membership in the open domain.
    pub fn contains(&self, p: Point) -> bool {
        match &self.kind {
            DomainKind::HalfSpace => p[1] > 0.0,
            DomainKind::LipschitzGraph { graph } => p[1] > graph.eval(p[0]),
            DomainKind::Cube { side } => p[0] > 0.0 && p[0] < *side && p[1] > 0.0 && p[1] < *side,
            DomainKind::CubeMinusBall { side, center, radius } => {
                p[0] > 0.0 && p[0] < *side && p[1] > 0.0 && p[1] < *side && dist(p, *center) > *radius
            }
            DomainKind::AnnulusSector { center, r_in, r_out, theta0, sweep } => {
                let v = sub(p, *center);
                let r = norm(v);
                if !(r > *r_in && r < *r_out) {
                    return false;
                }
                if *sweep >= 2.0 * PI {
                    return true;
                }
                let rel = wrap(v[1].atan2(v[0]) - theta0);
                rel > 0.0 && rel < *sweep
            }
        }
    }

    /// The boundary decomposed into segments and arcs.
    pub fn pieces(&self) -> Vec<Piece> {
        match &self.kind {
            DomainKind::HalfSpace => vec![Piece::Segment { a: [-FAR, 0.0], b: [FAR, 0.0] }],
            DomainKind::LipschitzGraph { graph } => graph.pieces(),
            DomainKind::Cube { side } => square_edges(*side),
            DomainKind::CubeMinusBall { side, center, radius } => {
                cube_minus_ball_pieces(*side, *center, *radius)
            }
            DomainKind::AnnulusSector { center, r_in, r_out, theta0, sweep } => {
                let mut out = vec![Piece::Arc { center: *center, radius: *r_out, start: *theta0, sweep: *sweep }];
                if *r_in > 0.0 {
                    out.push(Piece::Arc { center: *center, radius: *r_in, start: *theta0, sweep: *sweep });
                }
                if *sweep < 2.0 * PI {
                    for th in [*theta0, theta0 + sweep] {
                        let d = [th.cos(), th.sin()];
                        out.push(Piece::Segment {
                            a: add(*center, scale(d, *r_in)),
                            b: add(*center, scale(d, *r_out)),
                        });
                    }
                }
                out
            }
        }
    }

    /// `d(p, ∂Ω)`.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        match &self.kind {
            DomainKind::HalfSpace => p[1].abs(),
            _ => self
                .pieces()
                .iter()
                .map(|pc| pc.distance(p))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Signed distance: positive inside, negative outside.
    pub fn signed_distance(&self, p: Point) -> f64 {
        let d = self.boundary_distance(p);
        if self.contains(p) {
            d
        } else {
            -d
        }
    }

    /// `∂Ω ∩ B̄(c, r)` as polylines; arcs are sampled at `spacing`.
    pub fn boundary_in_ball(&self, c: Point, r: f64, spacing: f64) -> Vec<Vec<Point>> {
        self.pieces()
            .iter()
            .flat_map(|pc| pc.clip_to_disc(c, r, spacing))
            .collect()
    }

    /// Arc-length-uniform samples of `∂Ω ∩ B̄(c, r)`.
    pub fn boundary_samples(&self, c: Point, r: f64, spacing: f64) -> Vec<Point> {
        densify(&self.boundary_in_ball(c, r, spacing), spacing)
    }

    /// Whether `w` lies on the boundary up to `tol`.
    pub fn on_boundary(&self, w: Point, tol: f64) -> bool {
        self.boundary_distance(w) <= tol
    }

    /// Inward direction used for corkscrew construction at a boundary point.
    pub fn inward_direction(&self, w: Point) -> Point {
        match &self.kind {
            DomainKind::HalfSpace | DomainKind::LipschitzGraph { .. } => [0.0, 1.0],
            DomainKind::Cube { side } => square_inward(w, *side),
            DomainKind::CubeMinusBall { side, center, radius } => {
                let v = sub(w, *center);
                let r = norm(v);
                if (r - radius).abs() < 1e-9 * radius.max(1.0) && r > 0.0 {
                    scale(v, 1.0 / r)
                } else {
                    square_inward(w, *side)
                }
            }
            DomainKind::AnnulusSector { center, r_in, r_out, theta0, sweep } => {
                let v = sub(w, *center);
                let r = norm(v);
                let radial = if r > 0.0 { scale(v, 1.0 / r) } else { [1.0, 0.0] };
                let tol = 1e-9 * r_out.max(1.0);
                if (r - r_out).abs() <= tol {
                    scale(radial, -1.0)
                } else if *r_in > 0.0 && (r - r_in).abs() <= tol {
                    radial
                } else if *sweep < 2.0 * PI {
                    let rel = wrap(v[1].atan2(v[0]) - theta0);
                    let th = if rel < sweep / 2.0 { theta0 + PI / 2.0 } else { theta0 + sweep - PI / 2.0 };
                    [th.cos(), th.sin()]
                } else {
                    scale(radial, -1.0)
                }
            }
        }
    }
}

fn square_edges(side: f64) -> Vec<Piece> {
    let c = [[0.0, 0.0], [side, 0.0], [side, side], [0.0, side]];
    (0..4).map(|i| Piece::Segment { a: c[i], b: c[(i + 1) % 4] }).collect()
}

fn square_inward(w: Point, side: f64) -> Point {
    let tol = 1e-9 * side;
    let mut d = [0.0, 0.0];
    if w[0].abs() <= tol {
        d[0] += 1.0;
    }
    if (w[0] - side).abs() <= tol {
        d[0] -= 1.0;
    }
    if w[1].abs() <= tol {
        d[1] += 1.0;
    }
    if (w[1] - side).abs() <= tol {
        d[1] -= 1.0;
    }
    let n = norm(d);
    if n == 0.0 {
        // Not on an edge: point toward the center.
        let v = sub([side / 2.0, side / 2.0], w);
        let m = norm(v);
        return if m == 0.0 { [0.0, 1.0] } else { scale(v, 1.0 / m) };
    }
    scale(d, 1.0 / n)
}

/// `∂(Q \ B̄) = (∂Q \ B) ∪ (∂B ∩ Q̄)` with exact clipping.
fn cube_minus_ball_pieces(side: f64, c: Point, r: f64) -> Vec<Piece> {
    let mut out = Vec::new();
    for pc in square_edges(side) {
        let Piece::Segment { a, b } = pc else { unreachable!() };
        // Parameters where the edge enters/leaves the disc.
        let d = sub(b, a);
        let f = sub(a, c);
        let qa = dot(d, d);
        let qb = 2.0 * dot(f, d);
        let qc = dot(f, f) - r * r;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 {
            out.push(pc);
            continue;
        }
        let sq = disc.sqrt();
        let t0 = (-qb - sq) / (2.0 * qa);
        let t1 = (-qb + sq) / (2.0 * qa);
        if t0 > 0.0 {
            out.push(Piece::Segment { a, b: add(a, scale(d, t0.min(1.0))) });
        }
        if t1 < 1.0 {
            out.push(Piece::Segment { a: add(a, scale(d, t1.max(0.0))), b });
        }
    }
    // Circle angles where it meets the square's edge lines.
    let mut cuts = Vec::new();
    for (axis, level) in [(0usize, 0.0), (0, side), (1, 0.0), (1, side)] {
        let off = level - c[axis];
        if off.abs() < r {
            let base = (off / r).acos();
            let (a1, a2) = if axis == 0 { (base, -base) } else { (PI / 2.0 - base, PI / 2.0 + base) };
            cuts.push(wrap(a1));
            cuts.push(wrap(a2));
        }
    }
    let inside = |th: f64| {
        let p = [c[0] + r * th.cos(), c[1] + r * th.sin()];
        p[0] >= 0.0 && p[0] <= side && p[1] >= 0.0 && p[1] <= side
    };
    if cuts.is_empty() {
        if inside(0.0) {
            out.push(Piece::Arc { center: c, radius: r, start: 0.0, sweep: 2.0 * PI });
        }
        return out;
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let n = cuts.len();
    for i in 0..n {
        let start = cuts[i];
        let end = if i + 1 < n { cuts[i + 1] } else { cuts[0] + 2.0 * PI };
        if end - start > 1e-14 && inside(0.5 * (start + end)) {
            out.push(Piece::Arc { center: c, radius: r, start, sweep: end - start });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_and_distance_agree() {
        let doms = vec![
            DomainSpec::half_space(),
            DomainSpec::v_graph(0.1, 4.0).unwrap(),
            DomainSpec::cube(1.0).unwrap(),
            DomainSpec::cube_minus_ball(1.0, [1.25, 0.5], 0.5).unwrap(),
            DomainSpec::annulus_sector([0.0, 0.0], 1.0, 3.0, 0.3, 2.0).unwrap(),
            DomainSpec::disc([0.0, 0.0], 1.0).unwrap(),
        ];
        for dom in &doms {
            for i in 0..41 {
                for j in 0..41 {
                    let p = [-2.0 + 0.1 * i as f64 + 0.013, -2.0 + 0.1 * j as f64 + 0.007];
                    let sd = dom.signed_distance(p);
                    assert_eq!(sd > 0.0, dom.contains(p), "{} at {p:?}", dom.kind_name());
                    // A ball of radius |sd| around p stays on one side.
                    let r = 0.99 * sd.abs();
                    for k in 0..16 {
                        let th = k as f64 * PI / 8.0;
                        let q = [p[0] + r * th.cos(), p[1] + r * th.sin()];
                        assert_eq!(dom.contains(q), dom.contains(p), "{} {p:?} {q:?}", dom.kind_name());
                    }
                }
            }
        }
    }

    #[test]
    fn cube_minus_ball_boundary_is_closed_up() {
        let dom = DomainSpec::cube_minus_ball(1.0, [1.25, 0.5], 0.5).unwrap();
        let total: f64 = dom.pieces().iter().map(|p| p.length()).sum();
        // Three full edges, two edge stubs of length 0.5 - sqrt(0.25 - 0.0625), one arc.
        let stub = 0.5 - (0.25f64 - 0.0625).sqrt();
        let arc_angle = 2.0 * (0.25f64 / 0.5).acos();
        let expected = 3.0 + 2.0 * stub + 0.5 * arc_angle;
        assert!((total - expected).abs() < 1e-12, "{total} vs {expected}");
    }

    #[test]
    fn graph_lipschitz_is_enforced() {
        let g = GraphTable::new(vec![0.0, 1.0], vec![0.0, 0.5]).unwrap();
        assert!(DomainSpec::lipschitz_graph(g.clone(), 0.4, 1.0).is_err());
        assert!(DomainSpec::lipschitz_graph(g, 0.5, 1.0).is_ok());
    }

    #[test]
    fn boundary_samples_are_uniform() {
        let dom = DomainSpec::half_space();
        let pts = dom.boundary_samples([0.0, 0.0], 1.0, 0.01);
        assert_eq!(pts.len(), 201);
        assert!(pts.iter().all(|p| p[1] == 0.0 && p[0].abs() <= 1.0 + 1e-12));
    }
}
