//! Simultaneous approximation: positive `n` with `|nα − nβ|₁ < ε`.
//!
//! The brute method scans `n`. The chain-derived method samples the orbit
//! of `(0, 0)` under `R_α × R_β` on the torus with the sum of circle
//! distances, finds closed strong `ε/2`-chains through the origin with the
//! chain engine, and reads solutions off their lengths: since the product
//! rotation is an isometry, a closed strong δ-chain of length `n` forces
//! `|nα|₁ + |nβ|₁ <= δ`. Every returned `n` is re-checked directly.

use std::collections::{BTreeSet, BinaryHeap};
use std::cmp::Reverse;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain_engine::{min_cycle_cost, ChainCertificate, ErrorGraph};
use crate::dynamics::{finite_system, FiniteSystem};
use crate::error::{Error, Result};
use crate::metric_space::{within, FiniteMetricSpace};

/// `|w|₁`: distance from `w` to the nearest integer.
pub fn frac_distance(w: f64) -> f64 {
    let t = w.rem_euclid(1.0);
    t.min(1.0 - t)
}

/// `|n(α − β)|₁`.
pub fn approx_error(alpha: f64, beta: f64, n: u64) -> f64 {
    frac_distance(n as f64 * (alpha - beta))
}

pub fn is_solution(alpha: f64, beta: f64, eps: f64, n: u64) -> bool {
    n > 0 && approx_error(alpha, beta, n) < eps
}

/// Every solution `n <= n_max`.
pub fn brute_solutions(alpha: f64, beta: f64, eps: f64, n_max: u64) -> Vec<u64> {
    (1..=n_max).filter(|&n| is_solution(alpha, beta, eps, n)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproxMethod {
    Brute,
    ChainDerived,
}

impl std::str::FromStr for ApproxMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(ApproxMethod::Brute),
            "chain" | "chain-derived" => Ok(ApproxMethod::ChainDerived),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?} (brute or chain-derived)"))),
        }
    }
}

/// A closed strong chain through the origin of the sampled orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedChain {
    pub length: u64,
    pub cost: f64,
    /// Found by the least-cost cycle search (otherwise a one-jump closing).
    pub least_cost: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxSolution {
    pub alpha: f64,
    pub beta: f64,
    pub eps: f64,
    pub method: ApproxMethod,
    pub count: usize,
    pub n_cap: u64,
    /// Strictly increasing, each verified by direct evaluation.
    pub solutions: Vec<u64>,
    /// Fewer than `count` solutions were found within the cap.
    pub partial: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cycles: Vec<ClosedChain>,
}

impl ApproxSolution {
    /// Re-evaluates every solution.
    pub fn verify(&self) -> bool {
        self.solutions.windows(2).all(|w| w[0] < w[1])
            && self.solutions.iter().all(|&n| is_solution(self.alpha, self.beta, self.eps, n))
    }
}

/// Finds up to `count` solutions; `n_cap` bounds the scan (brute) or the
/// orbit sample length (chain-derived).
pub fn simultaneous_approx(
    alpha: f64,
    beta: f64,
    eps: f64,
    count: usize,
    n_cap: u64,
    method: ApproxMethod,
) -> Result<ApproxSolution> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidParameter("alpha and beta must be finite".into()));
    }
    let (solutions, cycles) = match method {
        ApproxMethod::Brute => {
            let found = (1..=n_cap).filter(|&n| is_solution(alpha, beta, eps, n)).take(count).collect();
            (found, Vec::new())
        }
        ApproxMethod::ChainDerived => chain_derived(alpha, beta, eps, count, n_cap)?,
    };
    Ok(ApproxSolution {
        alpha,
        beta,
        eps,
        method,
        count,
        n_cap,
        partial: solutions.len() < count,
        solutions,
        cycles,
    })
}

/// Orbit `P_k = (kα, kβ) mod 1`, `k = 0..=n_cap`, as a finite system with
/// `P_k ↦ P_{k+1}`; the last sample maps to itself and is never used by an
/// accepted chain.
pub fn orbit_system(alpha: f64, beta: f64, n_cap: u64) -> Result<FiniteSystem> {
    let n = n_cap
        .checked_add(1)
        .filter(|&n| n <= crate::capacity_cap() as u64)
        .ok_or(Error::Capacity {
            what: "orbit sample",
            requested: n_cap.saturating_add(1) as usize,
            cap: crate::capacity_cap(),
        })? as usize;
    let points: Vec<[f64; 2]> = (0..n)
        .map(|k| {
            let k = k as f64;
            [(k * alpha).rem_euclid(1.0), (k * beta).rem_euclid(1.0)]
        })
        .collect();
    let space = Arc::new(FiniteMetricSpace::torus(&points)?);
    let map = (0..n).map(|k| (k + 1).min(n - 1)).collect();
    Ok(finite_system(space, map)?.with_name(format!("orbit({alpha},{beta};{n_cap})")))
}

fn chain_derived(alpha: f64, beta: f64, eps: f64, count: usize, n_cap: u64) -> Result<(Vec<u64>, Vec<ClosedChain>)> {
    let system = orbit_system(alpha, beta, n_cap)?;
    let last = system.len() - 1;
    let eg = ErrorGraph::new(&system);
    let budget = eps / 2.0;
    let mut cycles: Vec<ClosedChain> = Vec::new();

    let (cost, cert) = min_cycle_cost(&eg, 0, budget);
    if let Some(cert) = cert.filter(|c| within(cost, budget) && c.verify(&eg) && !c.points.contains(&last)) {
        cycles.push(ClosedChain {
            length: cert.len() as u64,
            cost: cert.total_cost,
            least_cost: true,
        });
    }
    // One-jump closings: follow the orbit to P_{j-1}, then jump to P_0.
    for (j, _) in system.space().neighbors_within(0, budget) {
        if j == 0 || cycles.iter().any(|c| c.length == j as u64) {
            continue;
        }
        let w = eg.weight(j - 1, 0);
        if within(w, budget) {
            cycles.push(ClosedChain {
                length: j as u64,
                cost: w,
                least_cost: false,
            });
        }
    }
    cycles.sort_by_key(|c| c.length);

    // Concatenations of closed chains, in increasing length, each checked
    // directly; only accepted lengths are extended further.
    let bases: BTreeSet<u64> = cycles.iter().map(|c| c.length).collect();
    let mut heap: BinaryHeap<Reverse<u64>> = bases.iter().map(|&l| Reverse(l)).collect();
    let mut seen: BTreeSet<u64> = bases.clone();
    let mut solutions = Vec::new();
    while let Some(Reverse(n)) = heap.pop() {
        if solutions.len() >= count {
            break;
        }
        if !is_solution(alpha, beta, eps, n) {
            continue;
        }
        solutions.push(n);
        for &l in &bases {
            if let Some(m) = n.checked_add(l) {
                if seen.insert(m) {
                    heap.push(Reverse(m));
                }
            }
        }
    }
    Ok((solutions, cycles))
}

/// Certificate of the closed chain of length `j` that follows the orbit
/// and jumps back to the origin.
pub fn closing_certificate(system: &FiniteSystem, j: usize) -> Result<ChainCertificate> {
    if j == 0 || j >= system.len() {
        return Err(Error::InvalidParameter(format!("closing length {j} outside 1..{}", system.len())));
    }
    let mut points: Vec<usize> = (0..j).collect();
    points.push(0);
    ChainCertificate::from_points(&ErrorGraph::new(system), points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equal_rotations_solve_everything() {
        let r = simultaneous_approx(2f64.sqrt(), 2f64.sqrt(), 1e-6, 20, 1000, ApproxMethod::Brute).unwrap();
        assert_eq!(r.solutions, (1..=20).collect::<Vec<u64>>());
        assert!(!r.partial && r.verify());
    }

    #[test]
    fn half_and_third_give_multiples_of_six() {
        for method in [ApproxMethod::Brute, ApproxMethod::ChainDerived] {
            let r = simultaneous_approx(0.5, 1.0 / 3.0, 0.01, 8, 200, method).unwrap();
            assert_eq!(r.solutions, (1..=8).map(|k| 6 * k).collect::<Vec<u64>>(), "{method:?}");
        }
    }

    #[test]
    fn brute_oracle_for_sqrt_two_sqrt_three() {
        let (a, b) = (2f64.sqrt(), 3f64.sqrt());
        let r = simultaneous_approx(a, b, 1e-3, 10, 1_000_000, ApproxMethod::Brute).unwrap();
        assert_eq!(&r.solutions[..5], &[925, 1054, 1979, 2108, 2904]);
        assert_eq!(r.solutions.len(), 10);
    }

    #[test]
    fn chain_solutions_lie_in_the_brute_set() {
        let (a, b) = (2f64.sqrt(), 3f64.sqrt());
        let r = simultaneous_approx(a, b, 1e-2, 10, 20_000, ApproxMethod::ChainDerived).unwrap();
        assert!(!r.solutions.is_empty() && r.verify());
        let max = *r.solutions.last().unwrap();
        let brute = brute_solutions(a, b, 1e-2, max);
        assert!(r.solutions.iter().all(|n| brute.binary_search(n).is_ok()));
        // Closing lengths satisfy the stronger two-sided bound.
        for c in &r.cycles {
            let n = c.length as f64;
            assert!(frac_distance(n * a) + frac_distance(n * b) <= 5e-3 * (1.0 + 1e-9));
        }
        assert!(r.cycles.iter().any(|c| c.least_cost));
    }

    #[test]
    fn closing_certificates_verify() {
        let s = orbit_system(0.5, 0.25, 16).unwrap();
        let c = closing_certificate(&s, 4).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.total_cost < 1e-15 && c.verify(&ErrorGraph::new(&s)));
        assert!(closing_certificate(&s, 0).is_err());
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(simultaneous_approx(1.0, 2.0, 0.0, 1, 10, ApproxMethod::Brute), Err(Error::InvalidParameter(_))));
        assert!(simultaneous_approx(1.0, 2.0, 0.1, 0, 10, ApproxMethod::Brute).is_err());
        assert!(matches!(orbit_system(0.1, 0.2, u64::MAX), Err(Error::Capacity { .. })));
        let r = simultaneous_approx(2f64.sqrt(), 3f64.sqrt(), 1e-3, 10, 500, ApproxMethod::Brute).unwrap();
        assert!(r.partial && r.solutions.is_empty());
        assert_eq!("chain".parse::<ApproxMethod>().unwrap(), ApproxMethod::ChainDerived);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn doubling_the_cap_never_loses_solutions(a in 0.0f64..1.0, b in 0.0f64..1.0, cap in 50u64..400) {
            for method in [ApproxMethod::Brute, ApproxMethod::ChainDerived] {
                let small = simultaneous_approx(a, b, 0.05, 6, cap, method).unwrap();
                let large = simultaneous_approx(a, b, 0.05, 6, 2 * cap, method).unwrap();
                prop_assert!(small.verify() && large.verify());
                prop_assert!(large.solutions.len() >= small.solutions.len());
            }
        }

        #[test]
        fn chain_derived_is_inside_brute(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let r = simultaneous_approx(a, b, 0.05, 8, 300, ApproxMethod::ChainDerived).unwrap();
            if let Some(&max) = r.solutions.last() {
                let brute = brute_solutions(a, b, 0.05, max);
                prop_assert!(r.solutions.iter().all(|n| brute.binary_search(n).is_ok()));
            }
        }
    }
}
