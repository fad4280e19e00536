//! Masked lattice fields and their text/CSV formats.

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    /// Unknown of the discrete problem; all eight neighbours are non-exterior.
    Interior,
    /// Dirichlet node: its value is the boundary datum.
    Boundary,
    /// Never read.
    Exterior,
}

impl NodeKind {
    fn code(self) -> char {
        match self {
            NodeKind::Interior => 'I',
            NodeKind::Boundary => 'B',
            NodeKind::Exterior => 'X',
        }
    }

    fn from_code(c: &str) -> Result<Self> {
        match c {
            "I" => Ok(NodeKind::Interior),
            "B" => Ok(NodeKind::Boundary),
            "X" => Ok(NodeKind::Exterior),
            _ => Err(Error::Parse(format!("unknown mask code {c:?}"))),
        }
    }
}

/// Values on an `nx × ny` lattice with spacing `h`, node `(i, j)` at
/// `origin + h·(i, j)`. Boundary nodes carry the Dirichlet data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: Point,
    pub values: Vec<f64>,
    pub mask: Vec<NodeKind>,
}

/// Offsets of the eight neighbours: E, W, N, S, NE, SW, NW, SE.
pub const NEIGHBOURS: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (-1, 1), (1, -1)];

impl GridField {
    /// Rasterizes a domain over the box `[origin, origin + h·(nx−1, ny−1)]`.
    ///
    /// Nodes inside the domain whose eight neighbours all exist are interior;
    /// other nodes touching an interior node are boundary nodes; the rest are
    /// exterior. Every non-exterior node starts with the value `f(x)`.
    pub fn from_domain<F>(dom: &DomainSpec, origin: Point, nx: usize, ny: usize, h: f64, f: F) -> Result<Self>
    where
        F: Fn(Point) -> f64,
    {
        if nx < 3 || ny < 3 || !(h > 0.0) {
            return Err(Error::Argument(format!("grid needs nx, ny >= 3 and h > 0, got {nx}x{ny}, h = {h}")));
        }
        let mut mask = vec![NodeKind::Exterior; nx * ny];
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let p = [origin[0] + h * i as f64, origin[1] + h * j as f64];
                if dom.contains(p) {
                    mask[j * nx + i] = NodeKind::Interior;
                }
            }
        }
        let interior = mask.clone();
        for j in 0..ny {
            for i in 0..nx {
                if interior[j * nx + i] == NodeKind::Interior {
                    continue;
                }
                let touches = NEIGHBOURS.iter().any(|&(di, dj)| {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    ii >= 0
                        && jj >= 0
                        && (ii as usize) < nx
                        && (jj as usize) < ny
                        && interior[jj as usize * nx + ii as usize] == NodeKind::Interior
                });
                if touches {
                    mask[j * nx + i] = NodeKind::Boundary;
                }
            }
        }
        let mut g = GridField { nx, ny, h, origin, values: vec![0.0; nx * ny], mask };
        for k in 0..nx * ny {
            if g.mask[k] != NodeKind::Exterior {
                g.values[k] = f(g.point(k));
            }
        }
        if g.interior_count() == 0 {
            return Err(Error::Argument("grid has no interior nodes".into()));
        }
        Ok(g)
    }

    /// Grid covering `[x0, x1] × [y0, y1]` at spacing `h` (the far edges are rounded to the lattice).
    pub fn over_box<F>(dom: &DomainSpec, lo: Point, hi: Point, h: f64, f: F) -> Result<Self>
    where
        F: Fn(Point) -> f64,
    {
        let nx = ((hi[0] - lo[0]) / h).round() as usize + 1;
        let ny = ((hi[1] - lo[1]) / h).round() as usize + 1;
        GridField::from_domain(dom, lo, nx, ny, h, f)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn point(&self, k: usize) -> Point {
        let (i, j) = self.coords(k);
        [self.origin[0] + self.h * i as f64, self.origin[1] + self.h * j as f64]
    }

    /// Index of the neighbour at offset `(di, dj)`; `None` off the lattice.
    #[inline]
    pub fn neighbour(&self, k: usize, di: i64, dj: i64) -> Option<usize> {
        let (i, j) = self.coords(k);
        let (ii, jj) = (i as i64 + di, j as i64 + dj);
        (ii >= 0 && jj >= 0 && (ii as usize) < self.nx && (jj as usize) < self.ny)
            .then(|| jj as usize * self.nx + ii as usize)
    }

    pub fn interior_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m == NodeKind::Interior).count()
    }

    pub fn is_active(&self, k: usize) -> bool {
        self.mask[k] != NodeKind::Exterior
    }

    /// Replaces values on all non-exterior nodes by `f(x)`.
    pub fn fill<F: Fn(Point) -> f64>(&mut self, f: F) {
        for k in 0..self.values.len() {
            if self.is_active(k) {
                self.values[k] = f(self.point(k));
            }
        }
    }

    /// Max of `|u − f|` over non-exterior nodes.
    pub fn max_error<F: Fn(Point) -> f64>(&self, f: F) -> f64 {
        (0..self.values.len())
            .filter(|&k| self.is_active(k))
            .map(|k| (self.values[k] - f(self.point(k))).abs())
            .fold(0.0, f64::max)
    }

    /// Range `(min, max)` of the boundary data.
    pub fn boundary_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..self.values.len() {
            if self.mask[k] == NodeKind::Boundary {
                lo = lo.min(self.values[k]);
                hi = hi.max(self.values[k]);
            }
        }
        (lo, hi)
    }

    /// `(min, max)` over non-exterior nodes with `|x − c| ≤ r` satisfying `keep`.
    pub fn extrema_where<P: Fn(Point) -> bool>(&self, c: Point, r: f64, keep: P) -> Option<(f64, f64)> {
        let mut out: Option<(f64, f64)> = None;
        for k in 0..self.values.len() {
            if !self.is_active(k) {
                continue;
            }
            let p = self.point(k);
            if (p[0] - c[0]).hypot(p[1] - c[1]) <= r && keep(p) {
                let v = self.values[k];
                out = Some(match out {
                    None => (v, v),
                    Some((a, b)) => (a.min(v), b.max(v)),
                });
            }
        }
        out
    }

    /// `(min, max)` over non-exterior nodes in the closed ball.
    pub fn ball_extrema(&self, c: Point, r: f64) -> Option<(f64, f64)> {
        self.extrema_where(c, r, |_| true)
    }

    /// Bilinear interpolation; the four surrounding nodes must be non-exterior.
    pub fn interpolate(&self, p: Point) -> Result<f64> {
        let fx = (p[0] - self.origin[0]) / self.h;
        let fy = (p[1] - self.origin[1]) / self.h;
        if !(fx >= 0.0 && fy >= 0.0 && fx <= (self.nx - 1) as f64 && fy <= (self.ny - 1) as f64) {
            return Err(Error::Argument(format!("point {p:?} outside the grid")));
        }
        let i = (fx.floor() as usize).min(self.nx - 2);
        let j = (fy.floor() as usize).min(self.ny - 2);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let ks = [self.index(i, j), self.index(i + 1, j), self.index(i, j + 1), self.index(i + 1, j + 1)];
        if ks.iter().any(|&k| !self.is_active(k)) {
            return Err(Error::Argument(format!("point {p:?} touches exterior nodes")));
        }
        let v = |k: usize| self.values[k];
        Ok((1.0 - tx) * (1.0 - ty) * v(ks[0]) + tx * (1.0 - ty) * v(ks[1]) + (1.0 - tx) * ty * v(ks[2]) + tx * ty * v(ks[3]))
    }

    /// Writes the text format:
    ///
    /// ```text
    /// nx ny h
    /// origin x0 y0
    /// mask I=interior B=boundary X=exterior
    /// <code> <value>      (nx·ny lines, row-major: i fastest)
    /// ```
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let mut s = String::with_capacity(self.values.len() * 24);
        writeln!(s, "{} {} {:e}", self.nx, self.ny, self.h).unwrap();
        writeln!(s, "origin {:e} {:e}", self.origin[0], self.origin[1]).unwrap();
        writeln!(s, "mask I=interior B=boundary X=exterior").unwrap();
        for (m, v) in self.mask.iter().zip(&self.values) {
            writeln!(s, "{} {:e}", m.code(), v).unwrap();
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .map_err(Error::from)
        };
        let head = next("header")?;
        let f: Vec<&str> = head.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::Parse(format!("bad header {head:?}")));
        }
        let perr = |e: &dyn std::fmt::Display| Error::Parse(e.to_string());
        let nx: usize = f[0].parse().map_err(|e| perr(&e))?;
        let ny: usize = f[1].parse().map_err(|e| perr(&e))?;
        let h: f64 = f[2].parse().map_err(|e| perr(&e))?;
        let o = next("origin line")?;
        let of: Vec<&str> = o.split_whitespace().collect();
        if of.len() != 3 || of[0] != "origin" {
            return Err(Error::Parse(format!("bad origin line {o:?}")));
        }
        let origin = [of[1].parse().map_err(|e| perr(&e))?, of[2].parse().map_err(|e| perr(&e))?];
        let legend = next("mask legend")?;
        if !legend.starts_with("mask") {
            return Err(Error::Parse(format!("bad mask legend {legend:?}")));
        }
        let mut values = Vec::with_capacity(nx * ny);
        let mut mask = Vec::with_capacity(nx * ny);
        for k in 0..nx * ny {
            let line = next(&format!("node record {k}"))?;
            let mut it = line.split_whitespace();
            let code = it.next().ok_or_else(|| Error::Parse(format!("empty record {k}")))?;
            let val: f64 = it
                .next()
                .ok_or_else(|| Error::Parse(format!("record {k} lacks a value")))?
                .parse()
                .map_err(|e| perr(&e))?;
            mask.push(NodeKind::from_code(code)?);
            values.push(val);
        }
        Ok(GridField { nx, ny, h, origin, values, mask })
    }

    /// Tidy CSV `x,y,mask,value` over non-exterior nodes.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "y", "mask", "value"]).map_err(|e| Error::Parse(e.to_string()))?;
        for k in 0..self.values.len() {
            if !self.is_active(k) {
                continue;
            }
            let p = self.point(k);
            wr.write_record([
                format!("{:e}", p[0]),
                format!("{:e}", p[1]),
                self.mask[k].code().to_string(),
                format!("{:e}", self.values[k]),
            ])
            .map_err(|e| Error::Parse(e.to_string()))?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let dom = DomainSpec::disc([0.0, 0.0], 1.0).unwrap();
        let g = GridField::over_box(&dom, [-1.0, -1.0], [1.0, 1.0], 0.125, |p| p[0] * 0.3 - p[1]).unwrap();
        let mut buf = Vec::new();
        g.write_text(&mut buf).unwrap();
        let back = GridField::read_text(&buf[..]).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn mask_layout_for_half_space() {
        let g = GridField::over_box(&DomainSpec::half_space(), [-1.0, 0.0], [1.0, 1.0], 0.25, |_| 0.0).unwrap();
        // Bottom row sits on the boundary; top and side frames are Dirichlet rows.
        for i in 0..g.nx {
            assert_ne!(g.mask[g.index(i, 0)], NodeKind::Interior);
            assert_ne!(g.mask[g.index(i, g.ny - 1)], NodeKind::Interior);
        }
        assert_eq!(g.mask[g.index(4, 2)], NodeKind::Interior);
        assert_eq!(g.interior_count(), 7 * 3);
    }

    #[test]
    fn bilinear_reproduces_linear_data() {
        let g = GridField::over_box(&DomainSpec::half_space(), [-1.0, 0.0], [1.0, 1.0], 0.1, |p| 2.0 * p[0] + p[1]).unwrap();
        let v = g.interpolate([0.123, 0.456]).unwrap();
        assert!((v - (2.0 * 0.123 + 0.456)).abs() < 1e-12);
    }
}
