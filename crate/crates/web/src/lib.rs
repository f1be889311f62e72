//! wasm-bindgen entry points for the demo page. Each returns a JSON string
//! that `www/main.js` draws on a canvas.

use std::f64::consts::TAU;

use reclab::catalog::golden_angle;
use reclab::dynamics::{circle_system, gm_system, spiral_disk_system, swap_system, CircleMap};
use reclab::nonwandering::{nw_set, return_times};
use reclab::recurrence::inclusion_report;
use reclab::{FiniteSystem, MetricFamily};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn coords(system: &FiniteSystem) -> Vec<Vec<f64>> {
    (0..system.len()).map(|i| system.space().coords(i)).collect()
}

pub fn circle_sets_value(map: &str, n: usize, eps_cells: f64, horizon: usize) -> reclab::Result<Value> {
    let kind = match map {
        "rotation" => CircleMap::Rotation { theta: golden_angle() },
        "doubling" => CircleMap::Doubling,
        "half-fixed" => CircleMap::HalfFixed,
        other => return Err(reclab::Error::InvalidParameter(format!("unknown circle map {other:?}"))),
    };
    let system = circle_system(kind, n)?;
    let eps = eps_cells * TAU / n as f64;
    let family = MetricFamily::default_for(system.space().clone());
    let rep = inclusion_report(&system, &family, eps, 0.75 * eps, horizon)?;
    let sets: Vec<Value> = rep
        .sets
        .iter()
        .map(|s| json!({ "kind": s.kind.to_string(), "members": s.members }))
        .collect();
    Ok(json!({
        "system": system.name(),
        "n": n,
        "eps": eps,
        "coords": coords(&system),
        "sets": sets,
        "chain_holds": rep.all_hold(),
    }))
}

pub fn gm_returns_value(m: &str, horizon: usize) -> reclab::Result<Value> {
    let mut ms = Vec::new();
    for part in m.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()) {
        let v = part
            .parse::<usize>()
            .map_err(|_| reclab::Error::InvalidParameter(format!("{part:?} is not a positive integer")))?;
        ms.push(v);
    }
    ms.sort_unstable();
    ms.dedup();
    let max = *ms.last().ok_or_else(|| reclab::Error::InvalidParameter("M is empty".into()))?;
    let gm = gm_system(&ms, ms.len(), max)?;
    let rt = return_times(&gm.system, &gm.v, horizon)?;
    // V × {0} returns to itself in g_M × swap exactly at the common times.
    let swap = swap_system()?;
    let swap_times = return_times(&swap, &[0], horizon)?;
    let common: Vec<usize> = rt.times.iter().copied().filter(|&t| swap_times.contains(t)).collect();
    Ok(json!({
        "m": ms,
        "horizon": horizon,
        "points": gm.system.len(),
        "times": rt.times,
        "swap_times": swap_times.times,
        "common": common,
    }))
}

pub fn spiral_nw_value(n_r: usize, n_a: usize, eps_cells: f64, horizon: usize) -> reclab::Result<Value> {
    let system = spiral_disk_system(n_r, n_a)?;
    let cell = system.meta().map_or(1.0 / n_r as f64, |m| m.cell_diameter);
    let nw = nw_set(&system, system.space(), eps_cells * cell, horizon)?;
    Ok(json!({
        "system": system.name(),
        "n_r": n_r,
        "n_a": n_a,
        "eps": eps_cells * cell,
        "coords": coords(&system),
        "map": system.map(),
        "members": nw.members,
    }))
}

fn to_js(v: reclab::Result<Value>) -> Result<String, String> {
    v.map(|v| v.to_string()).map_err(|e| e.to_string())
}

/// NW, GR_approx, SCR, Mañé and CR of a circle map at `eps_cells` cells.
#[wasm_bindgen]
pub fn circle_sets(map: &str, n: usize, eps_cells: f64, horizon: usize) -> Result<String, String> {
    to_js(circle_sets_value(map, n, eps_cells, horizon))
}

/// Return times of `V` in `g_M`, against the swap's even return times.
#[wasm_bindgen]
pub fn gm_returns(m: &str, horizon: usize) -> Result<String, String> {
    to_js(gm_returns_value(m, horizon))
}

/// Nonwandering cells of the spiral disk.
#[wasm_bindgen]
pub fn spiral_nw(n_r: usize, n_a: usize, eps_cells: f64, horizon: usize) -> Result<String, String> {
    to_js(spiral_nw_value(n_r, n_a, eps_cells, horizon))
}
