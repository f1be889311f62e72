//! Independent re-validation of emitted sets.
//!
//! Each kind gets a route that does not reuse the code path that built the
//! set: chain recurrence by breadth-first search instead of components,
//! strong chain recurrence by verifying each certificate's step costs, and
//! nonwandering by iterating the ball as a set.

use std::collections::VecDeque;

use reclab::chain_engine::{chain_graph, min_cycle_cost, Digraph, ErrorGraph};
use reclab::metric_space::{within, FamilyMember};
use reclab::nonwandering::matched_ball;
use reclab::recurrence::{fixed_points, MembershipSet, SetKind};
use reclab::{FiniteMetricSpace, FiniteSystem};

use crate::config::Outcome;

/// Can `x` reach itself in one or more steps, moving only through `allowed`?
fn returns_through(g: &Digraph, x: usize, allowed: &[bool]) -> bool {
    if !allowed[x] {
        return false;
    }
    let mut seen = vec![false; g.node_count()];
    let mut queue: VecDeque<usize> = g.successors(x).iter().copied().filter(|&v| allowed[v]).collect();
    while let Some(u) = queue.pop_front() {
        if u == x {
            return true;
        }
        if std::mem::replace(&mut seen[u], true) {
            continue;
        }
        queue.extend(g.successors(u).iter().copied().filter(|&v| allowed[v] && !seen[v]));
    }
    false
}

fn strong_members(system: &FiniteSystem, metric: &FiniteMetricSpace, eps: f64, problems: &mut Vec<String>) -> Outcome<Vec<bool>> {
    let eg = ErrorGraph::with_metric(system, metric)?;
    let mut inside = vec![false; system.len()];
    for (x, slot) in inside.iter_mut().enumerate() {
        let (_, cert) = min_cycle_cost(&eg, x, eps * (1.0 + 1e-9));
        if let Some(cert) = cert {
            let total: f64 = cert.points.windows(2).map(|w| metric.dist(system.image(w[0]), w[1])).sum();
            if cert.start() != x || cert.end() != x || !within(total, eps) {
                problems.push(format!("certificate at {x} does not close within eps (cost {total})"));
            } else {
                *slot = true;
            }
        }
    }
    Ok(inside)
}

/// First `n <= horizon` with `f^n(U) ∩ U ≠ ∅`, iterating `U` as a set.
fn ball_returns(system: &FiniteSystem, u: &[usize], horizon: usize) -> bool {
    let mut mark = vec![false; system.len()];
    for &z in u {
        mark[z] = true;
    }
    let mut cur = u.to_vec();
    for _ in 0..horizon {
        for z in cur.iter_mut() {
            *z = system.image(*z);
        }
        cur.sort_unstable();
        cur.dedup();
        if cur.iter().any(|&z| mark[z]) {
            return true;
        }
    }
    false
}

/// Recomputes membership of every point by an independent route and
/// lists disagreements with `set`.
pub fn validate(
    set: &MembershipSet,
    system: &FiniteSystem,
    metric: &FiniteMetricSpace,
    family: &[FamilyMember],
) -> Outcome<Vec<String>> {
    let n = system.len();
    let mut problems = Vec::new();
    if set.points != n {
        problems.push(format!("set covers {} points, system has {n}", set.points));
        return Ok(problems);
    }
    let eps = set.eps;
    let expected: Vec<bool> = match set.kind {
        SetKind::Cr => {
            let g = chain_graph(&ErrorGraph::with_metric(system, metric)?, eps)?;
            let all = vec![true; n];
            (0..n).map(|x| returns_through(&g, x, &all)).collect()
        }
        SetKind::Scr => strong_members(system, metric, eps, &mut problems)?,
        SetKind::Mane => {
            let radius = set.param("radius").unwrap_or(0.0);
            let (fix, interior) = fixed_points(system, metric, radius)?;
            let mut allowed = vec![true; n];
            for &x in &interior {
                allowed[x] = false;
            }
            let g = chain_graph(&ErrorGraph::with_metric(system, metric)?, eps)?;
            let mut out: Vec<bool> = (0..n).map(|x| returns_through(&g, x, &allowed)).collect();
            for x in fix {
                out[x] = true;
            }
            out
        }
        SetKind::GrApprox => {
            let mut keep = vec![true; n];
            for m in family {
                let inside = strong_members(system, &m.space, eps, &mut problems)?;
                for (k, i) in keep.iter_mut().zip(inside) {
                    *k &= i;
                }
            }
            keep
        }
        SetKind::Nw => {
            let horizon = set.param("horizon").unwrap_or(0.0) as usize;
            if set.metric == "family" {
                (0..n)
                    .map(|x| family.iter().all(|m| ball_returns(system, &matched_ball(system, &m.space, x, eps), horizon)))
                    .collect()
            } else {
                (0..n).map(|x| ball_returns(system, &metric.ball(x, eps), horizon)).collect()
            }
        }
        SetKind::Fix => (0..n).map(|x| system.is_fixed(x)).collect(),
    };
    let mask = set.mask();
    let wrong: Vec<usize> = (0..n).filter(|&x| mask[x] != expected[x]).collect();
    if let Some(&x) = wrong.first() {
        problems.push(format!(
            "{} of {n} points disagree, first {x} (set says {}, recheck says {})",
            wrong.len(),
            mask[x],
            expected[x]
        ));
    }
    Ok(problems)
}
