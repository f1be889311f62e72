//! Finite metric spaces, validation of the metric axioms, product metrics,
//! derived factor metrics and the metric families used to approximate the
//! generalized recurrent set.
//!
//! A space stores its metric either as a dense symmetric matrix (at most
//! [`DENSE_LIMIT`] points) or as a closed-form generator evaluated on
//! demand: circle arcs, Euclidean coordinates, sums of two factor metrics,
//! and transforms of another space. Spaces are immutable once built and
//! shared through `Arc`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for metric-axiom checks (scaled by the diameter).
pub const AXIOM_TOLERANCE: f64 = 1e-12;

/// Relative slack applied to every tolerance comparison `value <= bound`.
pub const REL_SLACK: f64 = 1e-9;

/// Largest space stored as a dense matrix.
pub const DENSE_LIMIT: usize = 4096;

/// Largest space validated over every triple.
pub const EXHAUSTIVE_LIMIT: usize = 500;

/// Number of random triples checked when a space is too large for the
/// exhaustive pass.
pub const SAMPLED_TRIPLES: usize = 100_000;

const MAX_WITNESSES: usize = 256;

/// `value <= bound`, up to the relative slack [`REL_SLACK`].
#[inline]
pub fn within(value: f64, bound: f64) -> bool {
    value <= inflate(bound)
}

#[inline]
fn inflate(bound: f64) -> f64 {
    bound * (1.0 + REL_SLACK)
}

/// Normalized one-dimensional coordinate of every point, used by the
/// Minkowski `?` reparametrization.
#[derive(Clone, Debug)]
pub enum Chart {
    /// Coordinates in `[0, 1)`, identified at the endpoints.
    Circle { coords: Arc<[f64]>, circumference: f64 },
    /// Coordinates in `[0, 1]`.
    Interval { coords: Arc<[f64]>, length: f64 },
}

/// Monotone concave function with `phi(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
enum Concave {
    Power(f64),
    Table(Vec<(f64, f64)>),
}

impl Concave {
    fn apply(&self, t: f64) -> f64 {
        match self {
            Concave::Power(s) => {
                if t <= 0.0 {
                    0.0
                } else {
                    t.powf(*s)
                }
            }
            Concave::Table(knots) => {
                let k = knots.partition_point(|&(x, _)| x <= t);
                // k >= 1 because knots[0] = (0, 0) and t >= 0.
                let i = k.clamp(1, knots.len() - 1);
                let (x0, y0) = knots[i - 1];
                let (x1, y1) = knots[i];
                y0 + (y1 - y0) * (t - x0) / (x1 - x0)
            }
        }
    }

    /// A `t` such that `phi(t') <= b` implies `t' <= t`.
    fn preimage_bound(&self, b: f64) -> f64 {
        match self {
            Concave::Power(s) => {
                if b <= 0.0 {
                    0.0
                } else {
                    b.powf(1.0 / s)
                }
            }
            Concave::Table(knots) => {
                for w in knots.windows(2) {
                    let (x0, y0) = w[0];
                    let (x1, y1) = w[1];
                    if b <= y1 && y1 > y0 {
                        return x0 + (b - y0) * (x1 - x0) / (y1 - y0);
                    }
                }
                let n = knots.len();
                let (x0, y0) = knots[n - 2];
                let (x1, y1) = knots[n - 1];
                if y1 > y0 {
                    x1 + (b - y1) * (x1 - x0) / (y1 - y0)
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Metric {
    Dense(Arc<[f64]>),
    Circle { step: f64 },
    Euclidean { dim: usize, coords: Arc<[f64]> },
    Sum { left: Arc<FiniteMetricSpace>, right: Arc<FiniteMetricSpace> },
    Concave { base: Arc<FiniteMetricSpace>, phi: Concave },
    Reparam {
        base: Arc<FiniteMetricSpace>,
        // `?(u)` stored as `s` for `u <= 1/2` and as `1 + s` (flag set) above,
        // so values next to 1 keep their precision.
        values: Arc<[(bool, f64)]>,
        periodic: bool,
        scale: f64,
    },
    Pullback { base: Arc<FiniteMetricSpace>, perm: Arc<[usize]>, inverse: Arc<[usize]> },
    Scaled { base: Arc<FiniteMetricSpace>, factor: f64 },
    Torus(Arc<TorusIndex>),
}

/// Points of `R²/Z²` with `d = |Δx|₁ + |Δy|₁`, bucketed on a square grid.
#[derive(Debug)]
struct TorusIndex {
    points: Vec<[f64; 2]>,
    side: usize,
    starts: Vec<u32>,
    members: Vec<u32>,
}

fn circle_gap(t: f64) -> f64 {
    let t = t.rem_euclid(1.0);
    t.min(1.0 - t)
}

impl TorusIndex {
    fn new(points: Vec<[f64; 2]>) -> Self {
        let n = points.len();
        let side = ((n as f64).sqrt().ceil() as usize).clamp(1, 4096);
        let bucket = |p: &[f64; 2]| {
            let c = |t: f64| ((t * side as f64) as usize).min(side - 1);
            c(p[0]) * side + c(p[1])
        };
        let mut counts = vec![0u32; side * side + 1];
        for p in &points {
            counts[bucket(p) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut members = vec![0u32; n];
        for (i, p) in points.iter().enumerate() {
            let b = bucket(p);
            members[fill[b] as usize] = i as u32;
            fill[b] += 1;
        }
        Self {
            points,
            side,
            starts: counts,
            members,
        }
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.points[i], self.points[j]);
        circle_gap(a[0] - b[0]) + circle_gap(a[1] - b[1])
    }

    /// Visits candidates in the buckets within `bound` of `center`.
    fn collect(&self, center: usize, bound: f64, out: &mut Vec<(usize, f64)>) {
        let reach = (bound * self.side as f64).ceil() as usize + 1;
        let keep = |v: usize, out: &mut Vec<(usize, f64)>| {
            let d = self.dist(center, v);
            if d <= bound {
                out.push((v, d));
            }
        };
        if 2 * reach + 1 >= self.side {
            for v in 0..self.points.len() {
                keep(v, out);
            }
            return;
        }
        let c = |t: f64| ((t * self.side as f64) as usize).min(self.side - 1);
        let p = self.points[center];
        let (bx, by) = (c(p[0]), c(p[1]));
        let s = self.side;
        for dx in 0..=2 * reach {
            let x = (bx + s + dx - reach) % s;
            for dy in 0..=2 * reach {
                let y = (by + s + dy - reach) % s;
                let b = x * s + y;
                for &v in &self.members[self.starts[b] as usize..self.starts[b + 1] as usize] {
                    keep(v as usize, out);
                }
            }
        }
    }
}

/// Indexed point set with a metric.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    n: usize,
    metric: Metric,
    labels: Option<Arc<[String]>>,
    chart: Option<Chart>,
    diameter: OnceLock<f64>,
}

impl FiniteMetricSpace {
    fn build(n: usize, metric: Metric) -> Self {
        Self {
            n,
            metric,
            labels: None,
            chart: None,
            diameter: OnceLock::new(),
        }
    }

    /// Dense metric from a square matrix.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidParameter("metric space needs at least one point".into()));
        }
        if n > DENSE_LIMIT {
            return Err(Error::Capacity {
                what: "dense metric matrix",
                requested: n,
                cap: DENSE_LIMIT,
            });
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "matrix row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self::build(n, Metric::Dense(data.into())))
    }

    /// Dense metric from a function on index pairs.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("metric space needs at least one point".into()));
        }
        if n > DENSE_LIMIT {
            return Err(Error::Capacity {
                what: "dense metric matrix",
                requested: n,
                cap: DENSE_LIMIT,
            });
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = f(i, j);
            }
        }
        Ok(Self::build(n, Metric::Dense(data.into())))
    }

    /// Discrete metric: every pair of distinct points at distance 1.
    pub fn discrete(n: usize) -> Result<Self> {
        Self::from_fn(n, |i, j| if i == j { 0.0 } else { 1.0 })
    }

    /// `n` equally spaced points on a circle of circumference `2π` with the
    /// arc-length metric.
    pub fn circle(n: usize) -> Result<Self> {
        Self::circle_with_circumference(n, std::f64::consts::TAU)
    }

    pub fn circle_with_circumference(n: usize, circumference: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("metric space needs at least one point".into()));
        }
        if !(circumference > 0.0 && circumference.is_finite()) {
            return Err(Error::InvalidParameter(format!("circumference {circumference}")));
        }
        let mut space = Self::build(n, Metric::Circle { step: circumference / n as f64 });
        let coords: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
        space.chart = Some(Chart::Circle {
            coords: coords.into(),
            circumference,
        });
        Ok(space)
    }

    /// Euclidean metric on explicit coordinates.
    pub fn euclidean(coords: &[Vec<f64>]) -> Result<Self> {
        let n = coords.len();
        if n == 0 {
            return Err(Error::InvalidParameter("metric space needs at least one point".into()));
        }
        let dim = coords[0].len();
        let mut flat = Vec::with_capacity(n * dim);
        for (i, c) in coords.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::Dimension(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    c.len()
                )));
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!("point {i} has a non-finite coordinate")));
            }
            flat.extend_from_slice(c);
        }
        Ok(Self::build(n, Metric::Euclidean { dim, coords: flat.into() }))
    }

    /// Points of the torus `R²/Z²` (coordinates reduced mod 1) with the sum
    /// of the two circle distances `|Δx|₁ + |Δy|₁`.
    pub fn torus(points: &[[f64; 2]]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("metric space needs at least one point".into()));
        }
        if let Some(i) = points.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidParameter(format!("point {i} has a non-finite coordinate")));
        }
        let reduced = points.iter().map(|p| [p[0].rem_euclid(1.0), p[1].rem_euclid(1.0)]).collect();
        Ok(Self::build(points.len(), Metric::Torus(Arc::new(TorusIndex::new(reduced)))))
    }

    /// Points `0, 1, ..., n-1` on the real line.
    pub fn path(n: usize) -> Result<Self> {
        let coords: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        let mut space = Self::euclidean(&coords)?;
        if n > 1 {
            let unit: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
            space.chart = Some(Chart::Interval {
                coords: unit.into(),
                length: (n - 1) as f64,
            });
        }
        Ok(space)
    }

    /// Sum metric `d_X(x1, x2) + d_Y(y1, y2)` on `X × Y`, flat index
    /// `x * |Y| + y`.
    fn sum(left: Arc<Self>, right: Arc<Self>) -> Result<Self> {
        let n = left.n.checked_mul(right.n).ok_or(Error::Capacity {
            what: "product space",
            requested: usize::MAX,
            cap: crate::capacity_cap(),
        })?;
        let cap = crate::capacity_cap();
        if n > cap {
            return Err(Error::Capacity {
                what: "product space",
                requested: n,
                cap,
            });
        }
        Ok(Self::build(n, Metric::Sum { left, right }))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Dimension(format!(
                "{} labels for {} points",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels.into());
        Ok(self)
    }

    pub fn with_chart(mut self, chart: Chart) -> Result<Self> {
        let len = match &chart {
            Chart::Circle { coords, .. } | Chart::Interval { coords, .. } => coords.len(),
        };
        if len != self.n {
            return Err(Error::Dimension(format!("chart has {len} coordinates for {} points", self.n)));
        }
        self.chart = Some(chart);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Distance between points `i` and `j`.
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.metric {
            Metric::Dense(data) => data[i * self.n + j],
            Metric::Circle { step } => {
                let k = i.abs_diff(j);
                k.min(self.n - k) as f64 * step
            }
            Metric::Euclidean { dim, coords } => {
                let a = &coords[i * dim..(i + 1) * dim];
                let b = &coords[j * dim..(j + 1) * dim];
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }
            Metric::Sum { left, right } => {
                let m = right.n;
                left.dist(i / m, j / m) + right.dist(i % m, j % m)
            }
            Metric::Concave { base, phi } => phi.apply(base.dist(i, j)),
            Metric::Reparam {
                values,
                periodic,
                scale,
                ..
            } => {
                let (hi, si) = values[i];
                let (hj, sj) = values[j];
                let t = if *periodic {
                    let t = (si - sj).abs();
                    t.min(1.0 - t)
                } else if hi == hj {
                    (si - sj).abs()
                } else if hi {
                    (1.0 + si) - sj
                } else {
                    (1.0 + sj) - si
                };
                scale * t
            }
            Metric::Pullback { base, perm, .. } => base.dist(perm[i], perm[j]),
            Metric::Scaled { base, factor } => factor * base.dist(i, j),
            Metric::Torus(index) => index.dist(i, j),
        }
    }

    /// Largest pairwise distance (computed on first use).
    pub fn diameter(&self) -> f64 {
        *self.diameter.get_or_init(|| self.compute_diameter())
    }

    fn compute_diameter(&self) -> f64 {
        if self.n <= 1 {
            return 0.0;
        }
        match &self.metric {
            Metric::Dense(data) => data.iter().copied().fold(0.0, f64::max),
            Metric::Circle { step } => (self.n / 2) as f64 * step,
            Metric::Sum { left, right } => left.diameter() + right.diameter(),
            Metric::Concave { base, phi } => phi.apply(base.diameter()),
            Metric::Pullback { base, .. } => base.diameter(),
            Metric::Scaled { base, factor } => factor * base.diameter(),
            Metric::Euclidean { .. } | Metric::Reparam { .. } | Metric::Torus(_) => {
                let mut best = 0.0f64;
                for i in 0..self.n {
                    for j in i + 1..self.n {
                        best = best.max(self.dist(i, j));
                    }
                }
                best
            }
        }
    }

    /// Label of point `i`.
    pub fn label(&self, i: usize) -> String {
        if let Some(labels) = &self.labels {
            return labels[i].clone();
        }
        match &self.metric {
            Metric::Sum { left, right } => {
                let m = right.n;
                format!("({},{})", left.label(i / m), right.label(i % m))
            }
            Metric::Concave { base, .. }
            | Metric::Reparam { base, .. }
            | Metric::Pullback { base, .. }
            | Metric::Scaled { base, .. } => base.label(i),
            _ => i.to_string(),
        }
    }

    /// Plotting coordinates of point `i` (empty for bare matrices).
    pub fn coords(&self, i: usize) -> Vec<f64> {
        match &self.metric {
            Metric::Dense(_) => Vec::new(),
            Metric::Circle { .. } => {
                let a = std::f64::consts::TAU * i as f64 / self.n as f64;
                vec![a.cos(), a.sin()]
            }
            Metric::Euclidean { dim, coords } => coords[i * dim..(i + 1) * dim].to_vec(),
            Metric::Torus(index) => index.points[i].to_vec(),
            Metric::Sum { left, right } => {
                let m = right.n;
                let mut c = left.coords(i / m);
                c.extend(right.coords(i % m));
                c
            }
            Metric::Concave { base, .. }
            | Metric::Reparam { base, .. }
            | Metric::Pullback { base, .. }
            | Metric::Scaled { base, .. } => base.coords(i),
        }
    }

    /// One-dimensional chart, if the space (or the space it transforms) has one.
    pub fn chart(&self) -> Option<&Chart> {
        if let Some(chart) = &self.chart {
            return Some(chart);
        }
        match &self.metric {
            Metric::Concave { base, .. }
            | Metric::Reparam { base, .. }
            | Metric::Pullback { base, .. }
            | Metric::Scaled { base, .. } => base.chart(),
            _ => None,
        }
    }

    /// Factors of a sum-metric space.
    pub fn sum_factors(&self) -> Option<(&Arc<FiniteMetricSpace>, &Arc<FiniteMetricSpace>)> {
        match &self.metric {
            Metric::Sum { left, right } => Some((left, right)),
            _ => None,
        }
    }

    /// Short description of how the metric is stored.
    pub fn kind(&self) -> &'static str {
        match &self.metric {
            Metric::Dense(_) => "matrix",
            Metric::Circle { .. } => "circle_arc",
            Metric::Euclidean { .. } => "euclidean",
            Metric::Sum { .. } => "sum",
            Metric::Concave { .. } => "concave",
            Metric::Reparam { .. } => "minkowski",
            Metric::Pullback { .. } => "pullback",
            Metric::Scaled { .. } => "scaled",
            Metric::Torus(_) => "torus_l1",
        }
    }

    /// Euclidean coordinates, when the metric is stored that way.
    pub fn euclidean_coords(&self) -> Option<(usize, &[f64])> {
        match &self.metric {
            Metric::Euclidean { dim, coords } => Some((*dim, coords)),
            _ => None,
        }
    }

    /// Explicit labels, if any were attached.
    pub fn explicit_labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Circumference of a circle-arc space.
    pub fn circle_circumference(&self) -> Option<f64> {
        match &self.metric {
            Metric::Circle { step } => Some(step * self.n as f64),
            _ => None,
        }
    }

    /// Every `v` with `dist(center, v) <= radius` (up to [`REL_SLACK`]),
    /// sorted by index, with its distance.
    pub fn neighbors_within(&self, center: usize, radius: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        self.neighbors_into(center, radius, &mut out);
        out
    }

    /// Like [`neighbors_within`](Self::neighbors_within) but reusing `out`.
    pub fn neighbors_into(&self, center: usize, radius: f64, out: &mut Vec<(usize, f64)>) {
        out.clear();
        if radius < 0.0 {
            return;
        }
        self.collect_raw(center, inflate(radius), out);
        out.sort_unstable_by_key(|&(v, _)| v);
    }

    /// Closed ball of radius `radius` around `center`, sorted.
    pub fn ball(&self, center: usize, radius: f64) -> Vec<usize> {
        self.neighbors_within(center, radius).into_iter().map(|(v, _)| v).collect()
    }

    /// Appends every `v` with `dist(center, v) <= bound` exactly.
    fn collect_raw(&self, center: usize, bound: f64, out: &mut Vec<(usize, f64)>) {
        match &self.metric {
            Metric::Dense(data) => {
                let row = &data[center * self.n..(center + 1) * self.n];
                out.extend(row.iter().enumerate().filter(|(_, &d)| d <= bound).map(|(v, &d)| (v, d)));
            }
            Metric::Circle { step } => {
                let reach = (bound / step).floor();
                if !reach.is_finite() || reach as usize * 2 + 1 >= self.n {
                    self.scan(center, bound, out);
                    return;
                }
                let reach = reach as usize + 1;
                for off in 0..=reach {
                    let d = off as f64 * step;
                    if d > bound {
                        break;
                    }
                    out.push(((center + off) % self.n, d));
                    if off > 0 {
                        out.push(((center + self.n - off) % self.n, d));
                    }
                }
            }
            Metric::Euclidean { .. } | Metric::Reparam { .. } => self.scan(center, bound, out),
            Metric::Torus(index) => index.collect(center, bound, out),
            Metric::Sum { left, right } => {
                let m = right.n;
                let mut lhs = Vec::new();
                left.collect_raw(center / m, bound, &mut lhs);
                let mut rhs = Vec::new();
                for (a, da) in lhs {
                    rhs.clear();
                    right.collect_raw(center % m, bound - da, &mut rhs);
                    for &(b, db) in &rhs {
                        let d = da + db;
                        if d <= bound {
                            out.push((a * m + b, d));
                        }
                    }
                }
            }
            Metric::Concave { base, phi } => {
                let t = phi.preimage_bound(bound);
                let mut tmp = Vec::new();
                base.collect_raw(center, t * (1.0 + 1e-12) + f64::MIN_POSITIVE, &mut tmp);
                out.extend(tmp.into_iter().map(|(v, d)| (v, phi.apply(d))).filter(|&(_, d)| d <= bound));
            }
            Metric::Pullback { base, perm, inverse } => {
                let mut tmp = Vec::new();
                base.collect_raw(perm[center], bound, &mut tmp);
                out.extend(tmp.into_iter().map(|(v, d)| (inverse[v], d)));
            }
            Metric::Scaled { base, factor } => {
                let mut tmp = Vec::new();
                base.collect_raw(center, bound / factor * (1.0 + 1e-12), &mut tmp);
                out.extend(tmp.into_iter().map(|(v, d)| (v, factor * d)).filter(|&(_, d)| d <= bound));
            }
        }
    }

    fn scan(&self, center: usize, bound: f64, out: &mut Vec<(usize, f64)>) {
        for v in 0..self.n {
            let d = self.dist(center, v);
            if d <= bound {
                out.push((v, d));
            }
        }
    }

    /// Materialized distance matrix (row-major).
    pub fn to_matrix(&self) -> Vec<f64> {
        if let Metric::Dense(data) = &self.metric {
            return data.to_vec();
        }
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = self.dist(i, j);
            }
        }
        m
    }
}

/// Axiom a violation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Finite,
    ZeroDiagonal,
    Positivity,
    Symmetry,
    Triangle,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Finite => "finiteness",
            Axiom::ZeroDiagonal => "zero diagonal",
            Axiom::Positivity => "positivity",
            Axiom::Symmetry => "symmetry",
            Axiom::Triangle => "triangle inequality",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
    /// Amount by which the axiom fails.
    pub excess: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.witness.iter().map(|i| i.to_string()).collect();
        write!(f, "{} at ({})", self.axiom, w.join(","))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub points: usize,
    pub exhaustive: bool,
    pub triples_checked: u64,
    pub total_violations: u64,
    /// The first violations found (at most 256); `total_violations` counts all.
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.total_violations == 0
    }

    fn record(&mut self, axiom: Axiom, witness: Vec<usize>, excess: f64) {
        self.total_violations += 1;
        if self.violations.len() < MAX_WITNESSES {
            self.violations.push(Violation { axiom, witness, excess });
        }
    }
}

/// Checks the metric axioms: exhaustively for at most [`EXHAUSTIVE_LIMIT`]
/// points, on [`SAMPLED_TRIPLES`] seeded random triples above.
pub fn validate_metric(space: &FiniteMetricSpace) -> ValidationReport {
    validate_metric_seeded(space, 0)
}

pub fn validate_metric_seeded(space: &FiniteMetricSpace, seed: u64) -> ValidationReport {
    let n = space.len();
    let mut report = ValidationReport {
        points: n,
        exhaustive: n <= EXHAUSTIVE_LIMIT,
        triples_checked: 0,
        total_violations: 0,
        violations: Vec::new(),
    };
    if report.exhaustive {
        let m = space.to_matrix();
        let d = |i: usize, j: usize| m[i * n + j];
        let diam = m.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max);
        let tol = AXIOM_TOLERANCE * diam;
        for i in 0..n {
            for j in 0..n {
                if !d(i, j).is_finite() {
                    report.record(Axiom::Finite, vec![i, j], f64::INFINITY);
                }
            }
        }
        if report.total_violations > 0 {
            return report;
        }
        for i in 0..n {
            if d(i, i).abs() > tol {
                report.record(Axiom::ZeroDiagonal, vec![i, i], d(i, i).abs());
            }
            for j in i + 1..n {
                if d(i, j) <= 0.0 {
                    report.record(Axiom::Positivity, vec![i, j], -d(i, j));
                }
                let asym = (d(i, j) - d(j, i)).abs();
                if asym > tol {
                    report.record(Axiom::Symmetry, vec![i, j], asym);
                }
            }
        }
        for i in 0..n {
            for k in i + 1..n {
                let dik = d(i, k);
                for j in 0..n {
                    let excess = dik - d(i, j) - d(j, k);
                    if excess > tol {
                        report.record(Axiom::Triangle, vec![i, j, k], excess);
                    }
                }
                report.triples_checked += n as u64;
            }
        }
        return report;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diam = space.diameter();
    let tol = AXIOM_TOLERANCE * diam;
    for i in 0..n {
        let dii = space.dist(i, i);
        if !dii.is_finite() || dii.abs() > tol {
            report.record(Axiom::ZeroDiagonal, vec![i, i], dii.abs());
        }
    }
    for _ in 0..SAMPLED_TRIPLES {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let k = rng.gen_range(0..n);
        let (dij, djk, dik) = (space.dist(i, j), space.dist(j, k), space.dist(i, k));
        if !(dij.is_finite() && djk.is_finite() && dik.is_finite()) {
            report.record(Axiom::Finite, vec![i, j, k], f64::INFINITY);
            continue;
        }
        if i != j {
            if dij <= 0.0 {
                report.record(Axiom::Positivity, vec![i, j], -dij);
            }
            let asym = (dij - space.dist(j, i)).abs();
            if asym > tol {
                report.record(Axiom::Symmetry, vec![i, j], asym);
            }
        }
        let excess = dik - dij - djk;
        if excess > tol {
            report.record(Axiom::Triangle, vec![i, j, k], excess);
        }
        report.triples_checked += 1;
    }
    report
}

/// `X × Y` with flat index `x * |Y| + y`.
#[derive(Clone, Debug)]
pub struct ProductSpace {
    left: Arc<FiniteMetricSpace>,
    right: Arc<FiniteMetricSpace>,
    space: Arc<FiniteMetricSpace>,
    sum: bool,
}

impl ProductSpace {
    /// Product with an explicit (possibly non-sum) metric on the flat index.
    pub fn explicit(
        left: Arc<FiniteMetricSpace>,
        right: Arc<FiniteMetricSpace>,
        space: Arc<FiniteMetricSpace>,
    ) -> Result<Self> {
        if left.len() * right.len() != space.len() {
            return Err(Error::Dimension(format!(
                "product metric has {} points, factors give {}",
                space.len(),
                left.len() * right.len()
            )));
        }
        Ok(Self {
            left,
            right,
            space,
            sum: false,
        })
    }

    pub fn left(&self) -> &Arc<FiniteMetricSpace> {
        &self.left
    }

    pub fn right(&self) -> &Arc<FiniteMetricSpace> {
        &self.right
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn is_sum(&self) -> bool {
        self.sum
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        x * self.right.len() + y
    }

    #[inline]
    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / self.right.len(), k % self.right.len())
    }

    pub fn dist(&self, a: (usize, usize), b: (usize, usize)) -> f64 {
        self.space.dist(self.index(a.0, a.1), self.index(b.0, b.1))
    }
}

/// Sum metric `D((x1,y1),(x2,y2)) = d_X(x1,x2) + d_Y(y1,y2)`.
pub fn product_metric(dx: &Arc<FiniteMetricSpace>, dy: &Arc<FiniteMetricSpace>) -> Result<ProductSpace> {
    let space = FiniteMetricSpace::sum(dx.clone(), dy.clone())?;
    Ok(ProductSpace {
        left: dx.clone(),
        right: dy.clone(),
        space: Arc::new(space),
        sum: true,
    })
}

/// `D̄_X(x1,x2) = max_y D((x1,y),(x2,y))` and
/// `D̄_Y(y1,y2) = max_x D((x,y1),(x,y2))`, materialized densely.
pub fn derived_factor_metrics(prod: &ProductSpace) -> Result<(FiniteMetricSpace, FiniteMetricSpace)> {
    let nx = prod.left.len();
    let ny = prod.right.len();
    let dbx = FiniteMetricSpace::from_fn(nx, |a, b| {
        if a == b {
            return 0.0;
        }
        (0..ny).map(|y| prod.dist((a, y), (b, y))).fold(0.0, f64::max)
    })?;
    let dby = FiniteMetricSpace::from_fn(ny, |a, b| {
        if a == b {
            return 0.0;
        }
        (0..nx).map(|x| prod.dist((x, a), (x, b))).fold(0.0, f64::max)
    })?;
    let lx: Vec<String> = (0..nx).map(|i| prod.left.label(i)).collect();
    let ly: Vec<String> = (0..ny).map(|i| prod.right.label(i)).collect();
    Ok((dbx.with_labels(lx)?, dby.with_labels(ly)?))
}

/// First pair of product points with `D > D̄_X + D̄_Y` beyond the axiom
/// tolerance, checked over every pair.
pub fn lemma_bound_violation(
    prod: &ProductSpace,
    dbx: &FiniteMetricSpace,
    dby: &FiniteMetricSpace,
) -> Option<(usize, usize)> {
    let n = prod.space.len();
    let tol = AXIOM_TOLERANCE * prod.space.diameter().max(1.0);
    for a in 0..n {
        let (x1, y1) = prod.split(a);
        for b in a + 1..n {
            let (x2, y2) = prod.split(b);
            if prod.space.dist(a, b) > dbx.dist(x1, x2) + dby.dist(y1, y2) + tol {
                return Some((a, b));
            }
        }
    }
    None
}

/// Concave reparametrization of a metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Distortion {
    /// `t ↦ t^s`, `0 < s <= 1`.
    Power { exponent: f64 },
    /// Piecewise-linear `phi` through the knots, extended past the last
    /// knot with the last slope. The first knot must be `(0, 0)`.
    Table { knots: Vec<[f64; 2]> },
    /// Distance between Minkowski `?` images of the chart coordinates.
    Minkowski,
}

fn check_table(knots: &[[f64; 2]]) -> Result<Vec<(f64, f64)>> {
    if knots.len() < 2 {
        return Err(Error::InvalidTransform("table needs at least two knots".into()));
    }
    if knots[0] != [0.0, 0.0] {
        return Err(Error::InvalidTransform(format!(
            "table must start at (0, 0), got ({}, {})",
            knots[0][0], knots[0][1]
        )));
    }
    let mut prev_slope = f64::INFINITY;
    for (i, w) in knots.windows(2).enumerate() {
        let [x0, y0] = w[0];
        let [x1, y1] = w[1];
        if !(x1 > x0) {
            return Err(Error::InvalidTransform(format!("knot {} does not increase in t", i + 1)));
        }
        let slope = (y1 - y0) / (x1 - x0);
        if slope < 0.0 {
            return Err(Error::InvalidTransform(format!("not monotone: decreases at knot {}", i + 1)));
        }
        if i == 0 && slope <= 0.0 {
            return Err(Error::InvalidTransform("first segment must increase (positivity)".into()));
        }
        if slope > prev_slope * (1.0 + 1e-12) {
            return Err(Error::InvalidTransform(format!(
                "not concave: slope increases at knot {} ({prev_slope} -> {slope})",
                i
            )));
        }
        prev_slope = slope;
    }
    Ok(knots.iter().map(|k| (k[0], k[1])).collect())
}

/// Minkowski question-mark function on `[0, 1]` (extended by integer
/// translation), via the Stern–Brocot descent.
pub fn minkowski_question_mark(x: f64) -> f64 {
    let ip = x.floor();
    let x = x - ip;
    let (mut p, mut q, mut r, mut s) = (0.0f64, 1.0f64, 1.0f64, 1.0f64);
    let mut y = 0.0f64;
    let mut d = 1.0f64;
    loop {
        d *= 0.5;
        if y + d == y {
            break;
        }
        let m = p + r;
        let n = q + s;
        if !(n < 1e300) {
            break;
        }
        if x < m / n {
            r = m;
            s = n;
        } else {
            y += d;
            p = m;
            q = n;
        }
    }
    ip + y + d
}

/// `phi ∘ d` for a concave monotone `phi`, or the `?`-reparametrized chart metric.
pub fn distort_metric(space: &Arc<FiniteMetricSpace>, distortion: &Distortion) -> Result<FiniteMetricSpace> {
    let n = space.len();
    let metric = match distortion {
        Distortion::Power { exponent } => {
            if !(*exponent > 0.0 && *exponent <= 1.0) {
                return Err(Error::InvalidTransform(format!(
                    "power exponent {exponent} outside (0, 1] is not concave"
                )));
            }
            Metric::Concave {
                base: space.clone(),
                phi: Concave::Power(*exponent),
            }
        }
        Distortion::Table { knots } => Metric::Concave {
            base: space.clone(),
            phi: Concave::Table(check_table(knots)?),
        },
        Distortion::Minkowski => {
            let chart = space
                .chart()
                .ok_or_else(|| Error::InvalidTransform("Minkowski distortion needs a coordinate chart".into()))?;
            let (coords, periodic, scale) = match chart {
                Chart::Circle { coords, circumference } => (coords, true, *circumference),
                Chart::Interval { coords, length } => (coords, false, *length),
            };
            let values: Vec<(bool, f64)> = coords
                .iter()
                .map(|&u| {
                    if u <= 0.5 {
                        (false, minkowski_question_mark(u))
                    } else {
                        (true, -minkowski_question_mark(1.0 - u))
                    }
                })
                .collect();
            Metric::Reparam {
                base: space.clone(),
                values: values.into(),
                periodic,
                scale,
            }
        }
    };
    Ok(FiniteMetricSpace::build(n, metric))
}

/// `d'(i, j) = d(perm[i], perm[j])`.
pub fn pullback_metric(space: &Arc<FiniteMetricSpace>, perm: &[usize]) -> Result<FiniteMetricSpace> {
    let n = space.len();
    if perm.len() != n {
        return Err(Error::Dimension(format!("permutation of length {} for {n} points", perm.len())));
    }
    let mut inverse = vec![usize::MAX; n];
    for (i, &p) in perm.iter().enumerate() {
        if p >= n || inverse[p] != usize::MAX {
            return Err(Error::InvalidTransform(format!("entry {i} breaks the permutation")));
        }
        inverse[p] = i;
    }
    Ok(FiniteMetricSpace::build(
        n,
        Metric::Pullback {
            base: space.clone(),
            perm: perm.to_vec().into(),
            inverse: inverse.into(),
        },
    ))
}

/// `factor · d`.
pub fn scaled_metric(space: &Arc<FiniteMetricSpace>, factor: f64) -> Result<FiniteMetricSpace> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::InvalidTransform(format!("scale factor {factor}")));
    }
    Ok(FiniteMetricSpace::build(
        space.len(),
        Metric::Scaled {
            base: space.clone(),
            factor,
        },
    ))
}

/// First pair of pairs whose distance order is reversed by `distorted`.
///
/// With `strict`, pairs whose base distances differ must keep strictly
/// different distorted distances as well.
pub fn order_violation(
    base: &FiniteMetricSpace,
    distorted: &FiniteMetricSpace,
    strict: bool,
) -> Option<((usize, usize), (usize, usize))> {
    let n = base.len();
    let tol = AXIOM_TOLERANCE * base.diameter().max(1e-300);
    let tol2 = AXIOM_TOLERANCE * distorted.diameter().max(1e-300);
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((base.dist(i, j), distorted.dist(i, j), (i, j)));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    // Max distorted value among pairs with a strictly smaller base value.
    let mut below: Option<(f64, (usize, usize))> = None;
    let mut group_start = 0;
    for k in 0..pairs.len() {
        if pairs[k].0 - pairs[group_start].0 > tol {
            for p in &pairs[group_start..k] {
                if below.map_or(true, |(v, _)| p.1 > v) {
                    below = Some((p.1, p.2));
                }
            }
            group_start = k;
        }
        if let Some((v, w)) = below {
            let bad = if strict { pairs[k].1 <= v } else { pairs[k].1 < v - tol2 };
            if bad {
                return Some((w, pairs[k].2));
            }
        }
    }
    None
}

/// Transform generating one member of a [`MetricFamily`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MetricTransform {
    Identity,
    Distort { distortion: Distortion },
    Pullback { permutation: Vec<usize> },
}

impl MetricTransform {
    pub fn power(exponent: f64) -> Self {
        MetricTransform::Distort {
            distortion: Distortion::Power { exponent },
        }
    }

    pub fn minkowski() -> Self {
        MetricTransform::Distort {
            distortion: Distortion::Minkowski,
        }
    }

    pub fn name(&self) -> String {
        match self {
            MetricTransform::Identity => "id".into(),
            MetricTransform::Distort { distortion } => match distortion {
                Distortion::Power { exponent } => format!("pow:{exponent}"),
                Distortion::Table { knots } => format!("table:{}", knots.len()),
                Distortion::Minkowski => "minkowski".into(),
            },
            MetricTransform::Pullback { .. } => "pullback".into(),
        }
    }

    /// Parses `id`, `pow:S`, `minkowski` or `reverse` (pullback by
    /// `i ↦ n-1-i`, which needs the point count).
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let s = s.trim();
        match s {
            "id" | "identity" => return Ok(MetricTransform::Identity),
            "minkowski" | "?" => return Ok(MetricTransform::minkowski()),
            "reverse" => {
                return Ok(MetricTransform::Pullback {
                    permutation: (0..n).rev().collect(),
                })
            }
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("pow:") {
            let exponent = parse_ratio(rest)
                .ok_or_else(|| Error::InvalidTransform(format!("bad exponent in {s:?}")))?;
            return Ok(MetricTransform::power(exponent));
        }
        Err(Error::InvalidTransform(format!("unknown metric transform {s:?}")))
    }

    fn apply(&self, base: &Arc<FiniteMetricSpace>) -> Result<Arc<FiniteMetricSpace>> {
        match self {
            MetricTransform::Identity => Ok(base.clone()),
            MetricTransform::Distort { distortion } => Ok(Arc::new(distort_metric(base, distortion)?)),
            MetricTransform::Pullback { permutation } => Ok(Arc::new(pullback_metric(base, permutation)?)),
        }
    }
}

fn parse_ratio(s: &str) -> Option<f64> {
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().ok()?;
        let b: f64 = b.trim().parse().ok()?;
        Some(a / b)
    } else {
        s.trim().parse().ok()
    }
}

/// A materialized family member, rescaled to the base diameter.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub name: String,
    pub space: Arc<FiniteMetricSpace>,
}

/// Explicit, extensible list of metrics on one point set, standing in for
/// "all compatible metrics". Member zero is always the identity.
#[derive(Clone, Debug)]
pub struct MetricFamily {
    base: Arc<FiniteMetricSpace>,
    transforms: Vec<MetricTransform>,
}

impl MetricFamily {
    /// Family containing only the base metric.
    pub fn new(base: Arc<FiniteMetricSpace>) -> Self {
        Self {
            base,
            transforms: vec![MetricTransform::Identity],
        }
    }

    /// Identity, `t^(1/2)`, `t^(1/4)`, and the Minkowski `?` distortion when
    /// the base has a chart.
    pub fn default_for(base: Arc<FiniteMetricSpace>) -> Self {
        let has_chart = base.chart().is_some();
        let mut family = Self::new(base)
            .with(MetricTransform::power(0.5))
            .with(MetricTransform::power(0.25));
        if has_chart {
            family = family.with(MetricTransform::minkowski());
        }
        family
    }

    /// Family from transform names (see [`MetricTransform::parse`]). The
    /// identity is inserted first when missing.
    pub fn from_names(base: Arc<FiniteMetricSpace>, names: &[String]) -> Result<Self> {
        let mut family = Self::new(base.clone());
        for name in names {
            let t = MetricTransform::parse(name, base.len())?;
            if t != MetricTransform::Identity {
                if matches!(&t, MetricTransform::Distort { distortion: Distortion::Minkowski })
                    && base.chart().is_none()
                {
                    continue;
                }
                family = family.with(t);
            }
        }
        Ok(family)
    }

    pub fn with(mut self, transform: MetricTransform) -> Self {
        if !self.transforms.contains(&transform) {
            self.transforms.push(transform);
        }
        self
    }

    pub fn base(&self) -> &Arc<FiniteMetricSpace> {
        &self.base
    }

    pub fn transforms(&self) -> &[MetricTransform] {
        &self.transforms
    }

    pub fn len(&self) -> usize {
        self.transforms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transforms.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.transforms.iter().map(|t| t.name()).collect()
    }

    /// Every member metric, rescaled to the diameter of the base so a
    /// tolerance means the same thing across members.
    pub fn members(&self) -> Result<Vec<FamilyMember>> {
        let target = self.base.diameter();
        self.transforms
            .iter()
            .map(|t| {
                let raw = t.apply(&self.base)?;
                let space = match t {
                    MetricTransform::Identity => raw,
                    _ => {
                        let d = raw.diameter();
                        if d > 0.0 && target > 0.0 && (d - target).abs() > AXIOM_TOLERANCE * target {
                            Arc::new(scaled_metric(&raw, target / d)?)
                        } else {
                            raw
                        }
                    }
                };
                Ok(FamilyMember { name: t.name(), space })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn arc(space: FiniteMetricSpace) -> Arc<FiniteMetricSpace> {
        Arc::new(space)
    }

    #[test]
    fn discrete_metric_is_valid() {
        let report = validate_metric(&FiniteMetricSpace::discrete(3).unwrap());
        assert!(report.is_valid());
        assert!(report.exhaustive);
    }

    #[test]
    fn zero_distance_between_distinct_points_is_reported() {
        let space = FiniteMetricSpace::from_matrix(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let report = validate_metric(&space);
        assert!(!report.is_valid());
        assert_eq!(report.violations[0].to_string(), "positivity at (0,1)");
    }

    #[test]
    fn triangle_violation_has_witness() {
        let space = FiniteMetricSpace::from_matrix(&[
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ])
        .unwrap();
        let report = validate_metric(&space);
        let tri: Vec<_> = report.violations.iter().filter(|v| v.axiom == Axiom::Triangle).collect();
        assert_eq!(tri[0].witness, vec![0, 1, 2]);
        assert!((tri[0].excess - 3.0).abs() < 1e-12);
    }

    #[test]
    fn circle_360_is_valid() {
        let report = validate_metric(&FiniteMetricSpace::circle(360).unwrap());
        assert!(report.is_valid(), "{:?}", &report.violations[..report.violations.len().min(3)]);
        assert_eq!(report.triples_checked, 360 * 359 / 2 * 360);
    }

    #[test]
    fn large_space_uses_sampling() {
        let space = FiniteMetricSpace::circle(1000).unwrap();
        let report = validate_metric(&space);
        assert!(!report.exhaustive);
        assert!(report.triples_checked >= 100_000);
        assert!(report.is_valid());
    }

    #[test]
    fn discrete_product_distances() {
        let a = arc(FiniteMetricSpace::discrete(2).unwrap());
        let prod = product_metric(&a, &a).unwrap();
        assert_eq!(prod.space().len(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let d = prod.space().dist(i, j);
                if i != j {
                    assert!(d == 1.0 || d == 2.0);
                }
            }
        }
        assert!(validate_metric(prod.space()).is_valid());
    }

    #[test]
    fn circle_times_two_points() {
        let c = arc(FiniteMetricSpace::circle(360).unwrap());
        let two = arc(FiniteMetricSpace::discrete(2).unwrap());
        let prod = product_metric(&c, &two).unwrap();
        for x in [0, 17, 359] {
            assert_eq!(prod.dist((x, 0), (x, 1)), 1.0);
        }
    }

    #[test]
    fn circle_four_by_four() {
        let c = arc(FiniteMetricSpace::circle(4).unwrap());
        let prod = product_metric(&c, &c).unwrap();
        assert!((prod.dist((0, 0), (1, 1)) - PI).abs() < 1e-15);
    }

    #[test]
    fn product_capacity_error() {
        std::env::remove_var("RECLAB_CAP");
        let c = arc(FiniteMetricSpace::circle(2000).unwrap());
        let err = product_metric(&c, &c).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn derived_metrics_of_sum_recover_factors() {
        let c = arc(FiniteMetricSpace::circle(12).unwrap());
        let p = arc(FiniteMetricSpace::path(5).unwrap());
        let prod = product_metric(&c, &p).unwrap();
        let (dx, dy) = derived_factor_metrics(&prod).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(dx.dist(i, j), c.dist(i, j));
            }
        }
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(dy.dist(i, j), p.dist(i, j));
            }
        }
    }

    #[test]
    fn derived_metrics_of_distorted_matrix() {
        let c = arc(FiniteMetricSpace::circle(24).unwrap());
        let two = arc(FiniteMetricSpace::discrete(2).unwrap());
        let sum = product_metric(&c, &two).unwrap();
        // Hand-distorted: stretch distances inside the second sheet.
        let n = sum.space().len();
        let m = FiniteMetricSpace::from_fn(n, |a, b| {
            let (x1, y1) = sum.split(a);
            let (x2, y2) = sum.split(b);
            let base = sum.space().dist(a, b);
            if y1 == 1 && y2 == 1 {
                (2.0 * c.dist(x1, x2)).min(c.dist(x1, x2) + 1.0)
            } else {
                base
            }
        })
        .unwrap();
        assert!(validate_metric(&m).is_valid());
        let prod = ProductSpace::explicit(c.clone(), two.clone(), arc(m)).unwrap();
        let (dx, dy) = derived_factor_metrics(&prod).unwrap();
        assert!(validate_metric(&dx).is_valid());
        assert!(validate_metric(&dy).is_valid());
        assert_eq!(lemma_bound_violation(&prod, &dx, &dy), None);
    }

    #[test]
    fn identity_like_power_keeps_metric() {
        let c = arc(FiniteMetricSpace::circle(36).unwrap());
        let same = distort_metric(&c, &Distortion::Power { exponent: 1.0 }).unwrap();
        for i in 0..36 {
            for j in 0..36 {
                assert_eq!(same.dist(i, j), c.dist(i, j));
            }
        }
    }

    #[test]
    fn sqrt_of_discrete_metric() {
        let d = arc(FiniteMetricSpace::discrete(4).unwrap());
        let s = distort_metric(&d, &Distortion::Power { exponent: 0.5 }).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s.dist(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn sqrt_circle_is_valid_and_order_preserving() {
        let c = arc(FiniteMetricSpace::circle(360).unwrap());
        let s = distort_metric(&c, &Distortion::Power { exponent: 0.5 }).unwrap();
        assert!(validate_metric(&s).is_valid());
        let small = arc(FiniteMetricSpace::circle(40).unwrap());
        let s = distort_metric(&small, &Distortion::Power { exponent: 0.5 }).unwrap();
        assert_eq!(order_violation(&small, &s, true), None);
    }

    #[test]
    fn table_distortion_validation() {
        let c = arc(FiniteMetricSpace::circle(24).unwrap());
        let ok = Distortion::Table {
            knots: vec![[0.0, 0.0], [1.0, 2.0], [2.0, 3.0], [4.0, 3.5]],
        };
        let m = distort_metric(&c, &ok).unwrap();
        assert!(validate_metric(&m).is_valid());
        assert_eq!(order_violation(&c, &m, false), None);

        let convex = Distortion::Table {
            knots: vec![[0.0, 0.0], [1.0, 1.0], [2.0, 3.0]],
        };
        let err = distort_metric(&c, &convex).unwrap_err().to_string();
        assert!(err.contains("not concave"), "{err}");

        let decreasing = Distortion::Table {
            knots: vec![[0.0, 0.0], [1.0, 1.0], [2.0, 0.5]],
        };
        let err = distort_metric(&c, &decreasing).unwrap_err().to_string();
        assert!(err.contains("not monotone"), "{err}");
    }

    #[test]
    fn power_outside_unit_interval_is_rejected() {
        let c = arc(FiniteMetricSpace::circle(24).unwrap());
        assert!(distort_metric(&c, &Distortion::Power { exponent: 2.0 }).is_err());
        assert!(distort_metric(&c, &Distortion::Power { exponent: 0.0 }).is_err());
    }

    #[test]
    fn minkowski_known_values() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let cases = [
            (0.0, 0.0),
            (1.0, 1.0),
            (0.5, 0.5),
            (1.0 / 3.0, 0.25),
            (2.0 / 3.0, 0.75),
            (0.4, 0.375),
            (golden, 2.0 / 3.0),
            (2f64.sqrt() - 1.0, 0.4),
        ];
        for (x, want) in cases {
            let got = minkowski_question_mark(x);
            // Irrational inputs are rounded to f64, which moves ? by ~1e-12.
            assert!((got - want).abs() < 1e-10, "?({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn minkowski_circle_metric_is_valid() {
        let c = arc(FiniteMetricSpace::circle(120).unwrap());
        let m = distort_metric(&c, &Distortion::Minkowski).unwrap();
        let report = validate_metric(&m);
        assert!(report.is_valid(), "{:?}", &report.violations[..report.violations.len().min(3)]);
        let plain = arc(FiniteMetricSpace::discrete(3).unwrap());
        assert!(distort_metric(&plain, &Distortion::Minkowski).is_err());
    }

    #[test]
    fn neighbors_match_scan_for_every_storage() {
        let c = arc(FiniteMetricSpace::circle(30).unwrap());
        let p = arc(FiniteMetricSpace::path(7).unwrap());
        let sum = arc(FiniteMetricSpace::sum(c.clone(), p.clone()).unwrap());
        let sq = arc(distort_metric(&sum, &Distortion::Power { exponent: 0.5 }).unwrap());
        let mk = arc(distort_metric(&c, &Distortion::Minkowski).unwrap());
        let pb = arc(pullback_metric(&c, &(0..30).map(|i| (i * 7) % 30).collect::<Vec<_>>()).unwrap());
        let sc = arc(scaled_metric(&sum, 0.3).unwrap());
        for space in [c, p, sum, sq, mk, pb, sc] {
            for center in [0, 3, space.len() - 1] {
                for r in [0.0, 0.2, 1.0, 2.5, 100.0] {
                    let got = space.neighbors_within(center, r);
                    let want: Vec<(usize, f64)> = (0..space.len())
                        .map(|v| (v, space.dist(center, v)))
                        .filter(|&(_, d)| within(d, r))
                        .collect();
                    assert_eq!(got, want, "{} center {center} r {r}", space.kind());
                }
            }
        }
    }

    #[test]
    fn default_family_members_share_the_base_diameter() {
        let c = arc(FiniteMetricSpace::circle(72).unwrap());
        let family = MetricFamily::default_for(c.clone());
        assert_eq!(family.names(), vec!["id", "pow:0.5", "pow:0.25", "minkowski"]);
        for m in family.members().unwrap() {
            assert!((m.space.diameter() - PI).abs() < 1e-9, "{}", m.name);
            assert!(validate_metric(&m.space).is_valid(), "{}", m.name);
        }
        let d = arc(FiniteMetricSpace::discrete(3).unwrap());
        assert_eq!(MetricFamily::default_for(d).len(), 3);
    }

    #[test]
    fn transform_names_parse() {
        assert_eq!(MetricTransform::parse("pow:1/2", 4).unwrap(), MetricTransform::power(0.5));
        assert_eq!(MetricTransform::parse("id", 4).unwrap(), MetricTransform::Identity);
        assert!(MetricTransform::parse("cube", 4).is_err());
        let _ = TAU;
    }

    #[test]
    fn torus_buckets_match_scan() {
        let points: Vec<[f64; 2]> = (0..3000u32)
            .map(|k| {
                let k = k as f64;
                [(k * 2f64.sqrt()).fract(), (k * 3f64.sqrt()).fract()]
            })
            .collect();
        let t = FiniteMetricSpace::torus(&points).unwrap();
        assert_eq!(t.kind(), "torus_l1");
        assert!((t.dist(0, 1) - (circle_gap(2f64.sqrt()) + circle_gap(3f64.sqrt()))).abs() < 1e-15);
        let mut fast = Vec::new();
        for center in [0, 17, 2999] {
            for r in [0.0, 0.01, 0.05, 0.3, 1.0] {
                t.neighbors_into(center, r, &mut fast);
                let slow: Vec<usize> = (0..t.len()).filter(|&v| within(t.dist(center, v), r)).collect();
                assert_eq!(fast.iter().map(|&(v, _)| v).collect::<Vec<_>>(), slow, "{center} {r}");
            }
        }
        let wrap = FiniteMetricSpace::torus(&[[0.999, 0.0], [0.001, 0.999], [-0.25, 1.5]]).unwrap();
        assert!((wrap.dist(0, 1) - 0.003).abs() < 1e-12);
        assert_eq!(wrap.coords(2), vec![0.75, 0.5]);
        assert_eq!(wrap.ball(0, 0.003), vec![0, 1]);
    }
}
