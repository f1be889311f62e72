//! Finite dynamical systems: exact maps on a finite metric space, grid
//! discretizations of a few continuous maps, product maps and the `g_M`
//! family whose return times are prescribed.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric_space::{product_metric, FiniteMetricSpace, ProductSpace};

/// Discretization record of a system sampled from a continuous map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub cell_diameter: f64,
    /// Bound on the distance between the continuous image of a cell center
    /// and the center of the chosen image cell, plus the cell radius.
    pub map_error_bound: f64,
}

/// Closed-form continuous map a circle system was sampled from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CircleMap {
    /// `a ↦ a + θ`.
    Rotation { theta: f64 },
    /// `a ↦ 2a`.
    Doubling,
    /// Fixes the closed left semicircle `[π/2, 3π/2]`; moves the right
    /// semicircle counterclockwise by `c·cos²(a)`.
    HalfFixed,
}

/// Factors of a product system.
#[derive(Clone, Debug)]
pub struct ProductFactors {
    pub space: ProductSpace,
    pub f: FiniteSystem,
    pub g: FiniteSystem,
}

/// A total self-map on the indices of a finite metric space.
#[derive(Clone, Debug)]
pub struct FiniteSystem {
    name: String,
    space: Arc<FiniteMetricSpace>,
    map: Arc<[usize]>,
    meta: Option<Discretization>,
    continuous: Option<CircleMap>,
    product: Option<Arc<ProductFactors>>,
    marked: BTreeMap<String, Vec<usize>>,
}

/// Builds an exact system; `map[i]` is the image of point `i`.
pub fn finite_system(space: Arc<FiniteMetricSpace>, map: Vec<usize>) -> Result<FiniteSystem> {
    let n = space.len();
    if map.len() != n {
        return Err(Error::MapLength {
            got: map.len(),
            expected: n,
        });
    }
    if let Some((index, &value)) = map.iter().enumerate().find(|&(_, &v)| v >= n) {
        return Err(Error::MapOutOfRange { index, value, len: n });
    }
    Ok(FiniteSystem {
        name: "system".into(),
        space,
        map: map.into(),
        meta: None,
        continuous: None,
        product: None,
        marked: BTreeMap::new(),
    })
}

impl FiniteSystem {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_meta(mut self, meta: Discretization) -> Result<Self> {
        if !(meta.cell_diameter >= 0.0) || !(meta.map_error_bound >= 0.0) {
            return Err(Error::InvalidParameter("discretization values must be nonnegative".into()));
        }
        self.meta = Some(meta);
        Ok(self)
    }

    /// Attaches a named point set (e.g. a neighborhood used for return times).
    pub fn with_marked(mut self, name: impl Into<String>, mut points: Vec<usize>) -> Result<Self> {
        if let Some(&p) = points.iter().find(|&&p| p >= self.len()) {
            return Err(Error::InvalidParameter(format!("marked point {p} out of range")));
        }
        points.sort_unstable();
        points.dedup();
        self.marked.insert(name.into(), points);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn meta(&self) -> Option<Discretization> {
        self.meta
    }

    pub fn marked(&self, name: &str) -> Option<&[usize]> {
        self.marked.get(name).map(|v| v.as_slice())
    }

    pub fn marked_sets(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.marked
    }

    pub fn product(&self) -> Option<&ProductFactors> {
        self.product.as_deref()
    }

    pub fn continuous_map(&self) -> Option<CircleMap> {
        self.continuous
    }

    /// `f^k(i)`.
    pub fn iterate(&self, mut i: usize, k: usize) -> usize {
        for _ in 0..k {
            i = self.map[i];
        }
        i
    }

    /// `f^k` as a table, by repeated squaring.
    pub fn power_map(&self, mut k: usize) -> Vec<usize> {
        let n = self.len();
        let mut result: Vec<usize> = (0..n).collect();
        let mut base: Vec<usize> = self.map.to_vec();
        while k > 0 {
            if k & 1 == 1 {
                result = result.iter().map(|&x| base[x]).collect();
            }
            base = base.iter().map(|&x| base[x]).collect();
            k >>= 1;
        }
        result
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        self.map[i] == i
    }

    /// Fixed points, sorted.
    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_fixed(i)).collect()
    }

    /// Per-point flag: `i` lies on a cycle of `f`.
    pub fn periodic_mask(&self) -> Vec<bool> {
        let n = self.len();
        // 0 = unvisited, 1 = on the current walk, 2 = finished.
        let mut state = vec![0u8; n];
        let mut periodic = vec![false; n];
        let mut walk = Vec::new();
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            walk.clear();
            let mut x = start;
            while state[x] == 0 {
                state[x] = 1;
                walk.push(x);
                x = self.map[x];
            }
            if state[x] == 1 {
                let mut y = x;
                loop {
                    periodic[y] = true;
                    y = self.map[y];
                    if y == x {
                        break;
                    }
                }
            }
            for &w in &walk {
                state[w] = 2;
            }
        }
        periodic
    }

    /// Periodic points, sorted.
    pub fn periodic_points(&self) -> Vec<usize> {
        let mask = self.periodic_mask();
        (0..self.len()).filter(|&i| mask[i]).collect()
    }

    /// Least period of `i`, if `i` is periodic.
    pub fn period(&self, i: usize) -> Option<usize> {
        let mut x = self.map[i];
        for k in 1..=self.len() {
            if x == i {
                return Some(k);
            }
            x = self.map[x];
        }
        None
    }

    /// Largest distance between the continuous image of a cell center and
    /// the center of its image cell, for systems sampled from a circle map.
    pub fn continuous_image_error(&self) -> Option<f64> {
        let model = self.continuous?;
        let n = self.len();
        let step = TAU / n as f64;
        let mut worst = 0.0f64;
        for k in 0..n {
            let target = circle_map_value(model, n, k);
            let chosen = self.map[k] as f64 * step;
            let diff = (target - chosen).rem_euclid(TAU);
            worst = worst.max(diff.min(TAU - diff));
        }
        Some(worst)
    }
}

/// Peak displacement of the half-fixed map, in cells, at the right pole.
fn half_fixed_peak_cells(n: usize) -> f64 {
    n as f64 / 24.0
}

/// Smallest displacement of a moving cell of the half-fixed map.
pub const HALF_FIXED_MIN_STEP: usize = 3;

fn in_left_semicircle(n: usize, k: usize) -> bool {
    // Angle 2πk/n in [π/2, 3π/2].
    4 * k >= n && 4 * k <= 3 * n
}

fn circle_map_value(model: CircleMap, n: usize, k: usize) -> f64 {
    let a = TAU * k as f64 / n as f64;
    match model {
        CircleMap::Rotation { theta } => a + theta,
        CircleMap::Doubling => 2.0 * a,
        CircleMap::HalfFixed => {
            if in_left_semicircle(n, k) {
                a
            } else {
                let c = half_fixed_peak_cells(n) * TAU / n as f64;
                a + c * a.cos().powi(2)
            }
        }
    }
}

/// Grid discretization of a circle map on `n` equally spaced cells.
///
/// Rotation and doubling use the nearest image cell. The half-fixed map
/// moves every right-semicircle cell by at least [`HALF_FIXED_MIN_STEP`]
/// cells so that no spurious fixed points or short back-and-forth chains
/// appear near the fixed arc.
pub fn circle_system(kind: CircleMap, n: usize) -> Result<FiniteSystem> {
    if n < 8 {
        return Err(Error::Resolution(format!("circle systems need at least 8 cells, got {n}")));
    }
    let space = Arc::new(FiniteMetricSpace::circle(n)?);
    let (map, lipschitz, name): (Vec<usize>, f64, String) = match kind {
        CircleMap::Rotation { theta } => {
            if !theta.is_finite() {
                return Err(Error::InvalidParameter(format!("rotation angle {theta}")));
            }
            let shift = (theta / TAU * n as f64).round().rem_euclid(n as f64) as usize;
            ((0..n).map(|k| (k + shift) % n).collect(), 1.0, format!("rotation({theta:.6},{n})"))
        }
        CircleMap::Doubling => ((0..n).map(|k| (2 * k) % n).collect(), 2.0, format!("doubling({n})")),
        CircleMap::HalfFixed => {
            let peak = half_fixed_peak_cells(n);
            let map = (0..n)
                .map(|k| {
                    if in_left_semicircle(n, k) {
                        k
                    } else {
                        let a = TAU * k as f64 / n as f64;
                        let cells = ((peak * a.cos().powi(2)).round() as usize).max(HALF_FIXED_MIN_STEP);
                        (k + cells) % n
                    }
                })
                .collect();
            (map, 1.0 + peak * TAU / n as f64, format!("half_fixed({n})"))
        }
    };
    let mut system = finite_system(space, map)?.with_name(name);
    system.continuous = Some(kind);
    let half_cell = PI / n as f64;
    let center_error = system.continuous_image_error().unwrap_or(0.0);
    system = system.with_meta(Discretization {
        cell_diameter: TAU / n as f64,
        map_error_bound: lipschitz * half_cell + half_cell.max(center_error),
    })?;
    Ok(system)
}

/// Index of cell `(ring, j)` of the polar grid, `ring >= 1`.
pub fn spiral_index(n_a: usize, ring: usize, j: usize) -> usize {
    1 + (ring - 1) * n_a + j
}

fn spiral_cell(n_r: usize, n_a: usize) -> f64 {
    (1.0 / n_r as f64).max(2.0 * (PI / n_a as f64).sin())
}

/// Rings crossed per step by default: the least count whose radial
/// displacement exceeds two cell diameters, so that one-cell balls in the
/// interior cannot meet their images.
pub fn spiral_default_drift(n_r: usize, n_a: usize) -> usize {
    (2.0 * spiral_cell(n_r, n_a) * n_r as f64).floor() as usize + 1
}

/// Polar grid on the closed unit disk spiralling clockwise out to the
/// boundary circle, with the default drift [`spiral_default_drift`].
pub fn spiral_disk_system(n_r: usize, n_a: usize) -> Result<FiniteSystem> {
    if n_r < 3 || n_a < 8 {
        return Err(Error::Resolution(format!(
            "spiral needs n_r >= 3 and n_a >= 8, got {n_r} x {n_a}"
        )));
    }
    spiral_disk_system_with_drift(n_r, n_a, spiral_default_drift(n_r, n_a))
}

/// Polar grid: index 0 is the center, ring `r` (1..=n_r) holds `n_a`
/// cells at radius `r/n_r`. The center and the north-pole boundary cell
/// are fixed; interior cells move one cell clockwise and `drift` rings
/// outward (stopping at the boundary); other boundary cells move one cell
/// clockwise.
pub fn spiral_disk_system_with_drift(n_r: usize, n_a: usize, drift: usize) -> Result<FiniteSystem> {
    if n_r < 3 || n_a < 8 {
        return Err(Error::Resolution(format!(
            "spiral needs n_r >= 3 and n_a >= 8, got {n_r} x {n_a}"
        )));
    }
    if drift == 0 {
        return Err(Error::InvalidParameter("spiral drift must be positive".into()));
    }
    let n = n_r
        .checked_mul(n_a)
        .and_then(|x| x.checked_add(1))
        .filter(|&x| x <= crate::capacity_cap())
        .ok_or(Error::Capacity {
            what: "spiral grid",
            requested: n_r.saturating_mul(n_a),
            cap: crate::capacity_cap(),
        })?;
    let pole = (n_a as f64 / 4.0).round() as usize % n_a;
    let mut coords = Vec::with_capacity(n);
    let mut map = Vec::with_capacity(n);
    coords.push(vec![0.0, 0.0]);
    map.push(0);
    for r in 1..=n_r {
        for j in 0..n_a {
            let t = TAU * j as f64 / n_a as f64;
            let rad = r as f64 / n_r as f64;
            coords.push(vec![rad * t.cos(), rad * t.sin()]);
            let image = if r < n_r {
                spiral_index(n_a, (r + drift).min(n_r), (j + n_a - 1) % n_a)
            } else if j == pole {
                spiral_index(n_a, r, j)
            } else {
                spiral_index(n_a, r, (j + n_a - 1) % n_a)
            };
            map.push(image);
        }
    }
    let space = Arc::new(FiniteMetricSpace::euclidean(&coords)?);
    let cell = spiral_cell(n_r, n_a);
    finite_system(space, map)?
        .with_name(format!("spiral({n_r},{n_a})"))
        .with_meta(Discretization {
            cell_diameter: cell,
            map_error_bound: cell,
        })?
        .with_marked("center", vec![0])?
        .with_marked("pole", vec![spiral_index(n_a, n_r, pole)])?
        .with_marked("boundary", (0..n_a).map(|j| spiral_index(n_a, n_r, j)).collect())
}

/// The `g_M` system with its distinguished points.
#[derive(Clone, Debug)]
pub struct GmSystem {
    pub system: FiniteSystem,
    pub m: Vec<usize>,
    pub i_max: usize,
    pub tail_len: usize,
    /// Index of `y = (1, 0)`.
    pub y: usize,
    /// Index of the fixed point `(0, 0)`.
    pub sink: usize,
    /// `V = {(1,0)} ∪ {(1, 1/i) : i <= I_max}`, sorted.
    pub v: Vec<usize>,
    /// Index of `(1, 1/i)` for `i = 1..=I_max`.
    pub heads: Vec<usize>,
}

/// Truncated `g_M`: `Y_0 = {(0,0)} ∪ {(1/n, 0) : n <= tail_len}` and
/// `Y_i = {(1/n, 1/i) : n <= m_i}` for `i <= I_max`. Index 0 is `(0,0)`,
/// index `n` is `(1/n, 0)`, then the `Y_i` blocks in order.
pub fn gm_system(m: &[usize], i_max: usize, tail_len: usize) -> Result<GmSystem> {
    if m.is_empty() {
        return Err(Error::InvalidParameter("M must be nonempty".into()));
    }
    if m[0] == 0 || m.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("M must be strictly increasing positive integers".into()));
    }
    if i_max == 0 || i_max > m.len() {
        return Err(Error::InvalidParameter(format!(
            "I_max = {i_max} must lie in 1..={}",
            m.len()
        )));
    }
    let m = m[..i_max].to_vec();
    let longest = *m.last().unwrap();
    if tail_len < longest {
        return Err(Error::InvalidParameter(format!(
            "tail_len {tail_len} is shorter than max(M) = {longest}"
        )));
    }
    let total = 1 + tail_len + m.iter().sum::<usize>();
    let cap = crate::capacity_cap();
    if total > cap {
        return Err(Error::Capacity {
            what: "g_M truncation",
            requested: total,
            cap,
        });
    }
    let mut coords = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let mut map = Vec::with_capacity(total);
    coords.push(vec![0.0, 0.0]);
    labels.push("(0,0)".to_string());
    map.push(0);
    for n in 1..=tail_len {
        coords.push(vec![1.0 / n as f64, 0.0]);
        labels.push(format!("(1/{n},0)"));
        map.push(if n == 1 { 0 } else { n - 1 });
    }
    let y = 1;
    let mut heads = Vec::with_capacity(i_max);
    for (i0, &mi) in m.iter().enumerate() {
        let i = i0 + 1;
        let start = coords.len();
        // Block index of (1/n, 1/i) is start + n - 1.
        heads.push(start);
        for n in 1..=mi {
            coords.push(vec![1.0 / n as f64, 1.0 / i as f64]);
            labels.push(format!("(1/{n},1/{i})"));
            let image = match n {
                1 if mi == 1 => y,
                1 => start + mi - 1,
                2 => y,
                _ => start + n - 2,
            };
            map.push(image);
        }
    }
    let space = Arc::new(FiniteMetricSpace::euclidean(&coords)?.with_labels(labels)?);
    let mut v = heads.clone();
    v.push(y);
    v.sort_unstable();
    let name = format!(
        "gm({})",
        m.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    );
    let system = finite_system(space, map)?
        .with_name(name)
        .with_marked("V", v.clone())?
        .with_marked("y", vec![y])?;
    Ok(GmSystem {
        system,
        m,
        i_max,
        tail_len,
        y,
        sink: 0,
        v,
        heads,
    })
}

/// Metric used on the product of two systems.
#[derive(Clone, Debug)]
pub enum ProductMode {
    /// `D = d_X + d_Y`.
    Sum,
    /// An explicit metric on the flat index `x * |Y| + y`.
    Explicit(Arc<FiniteMetricSpace>),
}

/// `f × g` on `X × Y`, flat index `x * |Y| + y`.
pub fn product_system(f: &FiniteSystem, g: &FiniteSystem, mode: ProductMode) -> Result<FiniteSystem> {
    let space = match mode {
        ProductMode::Sum => product_metric(f.space(), g.space())?,
        ProductMode::Explicit(m) => ProductSpace::explicit(f.space().clone(), g.space().clone(), m)?,
    };
    let ny = g.len();
    let map: Vec<usize> = (0..f.len() * ny)
        .map(|k| f.image(k / ny) * ny + g.image(k % ny))
        .collect();
    let meta = match (f.meta, g.meta) {
        (None, None) => None,
        (a, b) => {
            let a = a.unwrap_or(Discretization {
                cell_diameter: 0.0,
                map_error_bound: 0.0,
            });
            let b = b.unwrap_or(Discretization {
                cell_diameter: 0.0,
                map_error_bound: 0.0,
            });
            Some(Discretization {
                cell_diameter: a.cell_diameter + b.cell_diameter,
                map_error_bound: a.map_error_bound + b.map_error_bound,
            })
        }
    };
    let mut system = finite_system(space.space().clone(), map)?.with_name(format!("{}x{}", f.name(), g.name()));
    system.meta = meta;
    system.product = Some(Arc::new(ProductFactors {
        space,
        f: f.clone(),
        g: g.clone(),
    }));
    Ok(system)
}

/// The 2-point swap `0 ↔ 1` on the discrete metric.
pub fn swap_system() -> Result<FiniteSystem> {
    let space = Arc::new(FiniteMetricSpace::discrete(2)?);
    Ok(finite_system(space, vec![1, 0])?.with_name("swap"))
}

/// Identity on `n` points with the discrete metric.
pub fn identity_system(n: usize) -> Result<FiniteSystem> {
    let space = Arc::new(FiniteMetricSpace::discrete(n)?);
    Ok(finite_system(space, (0..n).collect())?.with_name(format!("identity({n})")))
}

/// Cyclic permutation `i ↦ i+1 mod n` on the discrete metric.
pub fn cycle_system(n: usize) -> Result<FiniteSystem> {
    let space = Arc::new(FiniteMetricSpace::discrete(n)?);
    Ok(finite_system(space, (0..n).map(|i| (i + 1) % n).collect())?.with_name(format!("cycle({n})")))
}

/// `i ↦ min(i+1, n-1)` on the points `0..n` of the line: everything
/// drains into the sink `n-1`.
pub fn sink_path_system(n: usize) -> Result<FiniteSystem> {
    let space = Arc::new(FiniteMetricSpace::path(n)?);
    Ok(finite_system(space, (0..n).map(|i| (i + 1).min(n - 1)).collect())?.with_name(format!("sink-path({n})")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_of_range_entry_is_named() {
        let space = Arc::new(FiniteMetricSpace::discrete(3).unwrap());
        let err = finite_system(space.clone(), vec![0, 5, 1]).unwrap_err();
        assert!(matches!(err, Error::MapOutOfRange { index: 1, value: 5, .. }));
        assert!(matches!(finite_system(space, vec![0, 1]).unwrap_err(), Error::MapLength { .. }));
    }

    #[test]
    fn identity_swap_and_cycle() {
        let id = identity_system(5).unwrap();
        assert_eq!(id.fixed_points(), vec![0, 1, 2, 3, 4]);
        let swap = swap_system().unwrap();
        assert_eq!(swap.period(0), Some(2));
        assert!(swap.fixed_points().is_empty());
        let c = cycle_system(3).unwrap();
        assert!(c.fixed_points().is_empty());
        assert_eq!(c.periodic_points(), vec![0, 1, 2]);
    }

    #[test]
    fn periodic_mask_on_tree_into_cycle() {
        let space = Arc::new(FiniteMetricSpace::discrete(6).unwrap());
        // 0 -> 1 -> 2 -> 3 -> 2, 4 -> 4, 5 -> 0
        let s = finite_system(space, vec![1, 2, 3, 2, 4, 0]).unwrap();
        assert_eq!(s.periodic_points(), vec![2, 3, 4]);
        assert_eq!(s.power_map(5), (0..6).map(|i| s.iterate(i, 5)).collect::<Vec<_>>());
    }

    #[test]
    fn small_circles_are_rejected() {
        assert!(matches!(circle_system(CircleMap::Doubling, 7), Err(Error::Resolution(_))));
    }

    #[test]
    fn zero_rotation_is_identity() {
        let s = circle_system(CircleMap::Rotation { theta: 0.0 }, 12).unwrap();
        assert_eq!(s.fixed_points().len(), 12);
    }

    #[test]
    fn doubling_sixteen() {
        let s = circle_system(CircleMap::Doubling, 16).unwrap();
        for k in 0..16 {
            assert_eq!(s.image(k), 2 * k % 16);
        }
        let meta = s.meta().unwrap();
        assert!((meta.cell_diameter - TAU / 16.0).abs() < 1e-15);
        assert!((meta.map_error_bound - 3.0 * PI / 16.0).abs() < 1e-12);
        assert!(s.continuous_image_error().unwrap() < 1e-12);
    }

    #[test]
    fn half_fixed_fixes_closed_left_semicircle() {
        let s = circle_system(CircleMap::HalfFixed, 360).unwrap();
        let fixed = s.fixed_points();
        let expected: Vec<usize> = (0..360)
            .filter(|&k| {
                let a = TAU * k as f64 / 360.0;
                a >= PI / 2.0 - 1e-12 && a <= 1.5 * PI + 1e-12
            })
            .collect();
        assert_eq!(fixed.len(), 181);
        assert_eq!(fixed, expected);
        // Moving cells go counterclockwise and eventually stop on the arc.
        for k in 0..360 {
            let end = s.iterate(k, 360);
            assert!(s.is_fixed(end));
        }
    }

    #[test]
    fn continuous_images_within_error_bound() {
        for kind in [
            CircleMap::Rotation { theta: 1.0 },
            CircleMap::Rotation { theta: TAU * (5f64.sqrt() - 1.0) / 2.0 },
            CircleMap::Doubling,
            CircleMap::HalfFixed,
        ] {
            for n in [8, 12, 37, 360] {
                let s = circle_system(kind, n).unwrap();
                let err = s.continuous_image_error().unwrap();
                assert!(err <= s.meta().unwrap().map_error_bound, "{kind:?} n={n}");
            }
        }
    }

    #[test]
    fn spiral_fixed_cells_and_outward_drift() {
        let (n_r, n_a) = (4, 12);
        let s = spiral_disk_system(n_r, n_a).unwrap();
        assert_eq!(s.image(0), 0);
        let pole = s.marked("pole").unwrap()[0];
        assert_eq!(s.image(pole), pole);
        assert_eq!(s.fixed_points(), vec![0, pole]);
        let boundary = s.marked("boundary").unwrap();
        for i in 1..s.len() {
            let end = s.iterate(i, n_r * n_a);
            assert!(boundary.binary_search(&end).is_ok());
        }
        assert!(spiral_disk_system(2, 12).is_err());
    }

    #[test]
    fn gm_fig_one() {
        let gm = gm_system(&[3, 5, 6], 3, 6).unwrap();
        let s = &gm.system;
        assert_eq!(s.len(), 1 + 6 + 14);
        for (i, &head) in gm.heads.iter().enumerate() {
            let mi = gm.m[i];
            assert_eq!(s.iterate(head, mi), gm.y);
            for k in 1..mi {
                assert_ne!(s.iterate(head, k), gm.y);
            }
        }
        assert_eq!(s.image(gm.y), gm.sink);
        for p in 0..s.len() {
            assert_eq!(s.iterate(p, gm.tail_len + 6), gm.sink);
        }
        assert_eq!(gm.v.len(), 4);
        assert_eq!(s.space().label(gm.heads[1]), "(1/1,1/2)");
    }

    #[test]
    fn gm_single_step_head() {
        let gm = gm_system(&[1], 1, 1).unwrap();
        assert_eq!(gm.system.image(gm.heads[0]), gm.y);
    }

    #[test]
    fn gm_parameter_errors() {
        assert!(gm_system(&[3, 5, 6], 3, 5).is_err());
        assert!(gm_system(&[3, 3], 2, 5).is_err());
        assert!(gm_system(&[3, 5], 3, 9).is_err());
    }

    #[test]
    fn product_rotation_swap_orbits() {
        let r = circle_system(CircleMap::Rotation { theta: TAU * 5.0 / 12.0 }, 12).unwrap();
        let p = product_system(&r, &swap_system().unwrap(), ProductMode::Sum).unwrap();
        for k in 0..p.len() {
            assert_eq!(p.period(k), Some(12));
        }
        let ny = 2;
        for k in 0..p.len() {
            assert_eq!(p.image(k) / ny, r.image(k / ny));
        }
    }

    #[test]
    fn half_fixed_times_swap_has_no_fixed_points() {
        let h = circle_system(CircleMap::HalfFixed, 360).unwrap();
        let p = product_system(&h, &swap_system().unwrap(), ProductMode::Sum).unwrap();
        assert!(p.fixed_points().is_empty());
        let meta = p.meta().unwrap();
        assert_eq!(meta.cell_diameter, h.meta().unwrap().cell_diameter);
    }
}
