//! JSON file formats for spaces, systems and certificates, and the CSV
//! membership export.
//!
//! Space: `{"points": [labels], "metric": {"type": "matrix" | "circle_arc" |
//! "euclidean" | "sum", ...}}`. System: `{"space": <space>, "map": [int],
//! "meta": {...}}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{finite_system, Discretization, FiniteSystem};
use crate::error::{Error, Result};
use crate::metric_space::{FiniteMetricSpace, DENSE_LIMIT};
use crate::recurrence::MembershipSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MetricSpec {
    /// Full distance matrix.
    Matrix { matrix: Vec<Vec<f64>> },
    /// Evenly spaced points on a circle with arc-length distance.
    CircleArc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        circumference: Option<f64>,
    },
    Euclidean { coords: Vec<Vec<f64>> },
    /// Sum metric on a product; point `(i, j)` has index `i·|right| + j`.
    Sum { left: Box<SpaceFile>, right: Box<SpaceFile> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub metric: MetricSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub space: SpaceFile,
    pub map: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Discretization>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub marked: BTreeMap<String, Vec<usize>>,
}

fn default_labels(space: &FiniteMetricSpace, labels: &[String]) -> bool {
    labels.iter().enumerate().all(|(i, l)| *l == space.label(i))
}

impl SpaceFile {
    pub fn from_space(space: &FiniteMetricSpace) -> Result<Self> {
        let points: Vec<String> = (0..space.len()).map(|i| space.label(i)).collect();
        let metric = if let Some(c) = space.circle_circumference() {
            MetricSpec::CircleArc {
                circumference: (c != std::f64::consts::TAU).then_some(c),
            }
        } else if let Some((dim, coords)) = space.euclidean_coords() {
            MetricSpec::Euclidean {
                coords: coords.chunks(dim).map(|c| c.to_vec()).collect(),
            }
        } else if let Some((l, r)) = space.sum_factors() {
            MetricSpec::Sum {
                left: Box::new(SpaceFile::from_space(l)?),
                right: Box::new(SpaceFile::from_space(r)?),
            }
        } else {
            if space.len() > DENSE_LIMIT {
                return Err(Error::Capacity {
                    what: "distance matrix export",
                    requested: space.len(),
                    cap: DENSE_LIMIT,
                });
            }
            let flat = space.to_matrix();
            MetricSpec::Matrix {
                matrix: flat.chunks(space.len()).map(|r| r.to_vec()).collect(),
            }
        };
        Ok(Self { points, metric })
    }

    pub fn to_space(&self) -> Result<FiniteMetricSpace> {
        let n = self.points.len();
        let space = match &self.metric {
            MetricSpec::Matrix { matrix } => FiniteMetricSpace::from_matrix(matrix)?,
            MetricSpec::CircleArc { circumference } => {
                FiniteMetricSpace::circle_with_circumference(n, circumference.unwrap_or(std::f64::consts::TAU))?
            }
            MetricSpec::Euclidean { coords } => FiniteMetricSpace::euclidean(coords)?,
            MetricSpec::Sum { left, right } => {
                let l = Arc::new(left.to_space()?);
                let r = Arc::new(right.to_space()?);
                crate::metric_space::product_metric(&l, &r)?.space().as_ref().clone()
            }
        };
        if space.len() != n {
            return Err(Error::Dimension(format!(
                "{n} point labels but the metric describes {} points",
                space.len()
            )));
        }
        if default_labels(&space, &self.points) {
            Ok(space)
        } else {
            space.with_labels(self.points.clone())
        }
    }
}

impl SystemFile {
    pub fn from_system(system: &FiniteSystem) -> Result<Self> {
        Ok(Self {
            name: Some(system.name().to_string()),
            space: SpaceFile::from_space(system.space())?,
            map: system.map().to_vec(),
            meta: system.meta(),
            marked: system.marked_sets().clone(),
        })
    }

    pub fn to_system(&self) -> Result<FiniteSystem> {
        let space = Arc::new(self.space.to_space()?);
        let mut system = finite_system(space, self.map.clone())?;
        if let Some(name) = &self.name {
            system = system.with_name(name.clone());
        }
        if let Some(meta) = self.meta {
            system = system.with_meta(meta)?;
        }
        for (k, v) in &self.marked {
            system = system.with_marked(k.clone(), v.clone())?;
        }
        Ok(system)
    }
}

pub fn parse_space(text: &str) -> Result<FiniteMetricSpace> {
    serde_json::from_str::<SpaceFile>(text)?.to_space()
}

pub fn parse_system(text: &str) -> Result<FiniteSystem> {
    serde_json::from_str::<SystemFile>(text)?.to_system()
}

pub fn read_space(path: &Path) -> Result<FiniteMetricSpace> {
    parse_space(&std::fs::read_to_string(path)?)
}

pub fn read_system(path: &Path) -> Result<FiniteSystem> {
    parse_system(&std::fs::read_to_string(path)?)
}

pub fn space_json(space: &FiniteMetricSpace) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SpaceFile::from_space(space)?)?)
}

pub fn system_json(system: &FiniteSystem) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SystemFile::from_system(system)?)?)
}

/// `point_index,label,coord...,member` with one row per point of `space`.
pub fn membership_csv(space: &FiniteMetricSpace, set: &MembershipSet) -> Result<String> {
    if set.points != space.len() {
        return Err(Error::Dimension(format!(
            "set over {} points, space has {}",
            set.points,
            space.len()
        )));
    }
    let dim = if space.is_empty() { 0 } else { space.coords(0).len() };
    let mut out = String::from("point_index,label");
    for k in 0..dim {
        let _ = write!(out, ",coord{k}");
    }
    out.push_str(",member\n");
    let mask = set.mask();
    for (i, &m) in mask.iter().enumerate() {
        let _ = write!(out, "{i},{}", csv_field(&space.label(i)));
        for c in space.coords(i) {
            let _ = write!(out, ",{c}");
        }
        let _ = writeln!(out, ",{}", u8::from(m));
    }
    Ok(out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
