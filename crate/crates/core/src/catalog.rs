//! Built-in example systems with the tolerances used to study them.

use std::f64::consts::TAU;

use crate::dynamics::{
    circle_system, cycle_system, gm_system, identity_system, sink_path_system, spiral_disk_system, swap_system,
    CircleMap, FiniteSystem,
};
use crate::error::{Error, Result};

/// A catalog system with its default tolerance parameters.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub system: FiniteSystem,
    pub eps: f64,
    /// Radius of the interior of `Fix` for Mañé sets.
    pub radius: f64,
    pub horizon: usize,
}

pub const NAMES: &[&str] = &[
    "identity-5",
    "swap",
    "three-cycle",
    "sink-path-8",
    "rotation-36",
    "doubling-32",
    "half-fixed-72",
    "spiral-4x12",
    "gm-356",
];

/// Golden-ratio rotation angle `2π(√5−1)/2`.
pub fn golden_angle() -> f64 {
    TAU * (5f64.sqrt() - 1.0) / 2.0
}

fn grid(name: &'static str, kind: CircleMap, n: usize) -> Result<CatalogEntry> {
    let cell = TAU / n as f64;
    Ok(CatalogEntry {
        name,
        system: circle_system(kind, n)?.with_name(name),
        eps: 2.0 * cell,
        radius: 1.5 * cell,
        horizon: 200,
    })
}

fn discrete(name: &'static str, system: FiniteSystem) -> CatalogEntry {
    CatalogEntry {
        name,
        system: system.with_name(name),
        eps: 0.5,
        radius: 0.5,
        horizon: 200,
    }
}

/// The catalog entry called `name` (see [`NAMES`]).
pub fn entry(name: &str) -> Result<CatalogEntry> {
    Ok(match name {
        "identity-5" => discrete("identity-5", identity_system(5)?),
        "swap" => discrete("swap", swap_system()?),
        "three-cycle" => discrete("three-cycle", cycle_system(3)?),
        "sink-path-8" => discrete("sink-path-8", sink_path_system(8)?),
        "rotation-36" => grid("rotation-36", CircleMap::Rotation { theta: golden_angle() }, 36)?,
        "doubling-32" => grid("doubling-32", CircleMap::Doubling, 32)?,
        "half-fixed-72" => grid("half-fixed-72", CircleMap::HalfFixed, 72)?,
        "spiral-4x12" => {
            let system = spiral_disk_system(4, 12)?.with_name("spiral-4x12");
            let cell = system.meta().map_or(0.5, |m| m.cell_diameter);
            CatalogEntry {
                name: "spiral-4x12",
                system,
                eps: cell,
                radius: 0.5 * cell,
                horizon: 200,
            }
        }
        "gm-356" => {
            let gm = gm_system(&[3, 5, 6], 3, 6)?;
            CatalogEntry {
                name: "gm-356",
                system: gm.system.with_name("gm-356"),
                eps: 0.2,
                radius: 0.1,
                horizon: 200,
            }
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown catalog system {other:?}; known: {}",
                NAMES.join(", ")
            )))
        }
    })
}

/// Every catalog entry, in [`NAMES`] order.
pub fn catalog() -> Result<Vec<CatalogEntry>> {
    NAMES.iter().map(|n| entry(n)).collect()
}

/// Unordered pairs `(i, j)`, `i <= j`, of catalog indices.
pub fn pairs(len: usize) -> Vec<(usize, usize)> {
    (0..len).flat_map(|i| (i..len).map(move |j| (i, j))).collect()
}

/// Tolerance for the product of two entries: the larger of the two.
pub fn pair_eps(a: &CatalogEntry, b: &CatalogEntry) -> f64 {
    a.eps.max(b.eps)
}
