//! Return times of neighborhoods, nonwandering sets, local mixing and the
//! product-nonwandering construction built on `g_M`.
//!
//! Everything is exact set-image iteration `S_0 = U`, `S_n = f(S_{n-1})`,
//! truncated at a horizon.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::dynamics::{gm_system, FiniteSystem, GmSystem};
use crate::error::{Error, Result};
use crate::metric_space::{FamilyMember, FiniteMetricSpace};
use crate::par;
use crate::recurrence::{MembershipSet, SetKind};

/// `{n in [1, horizon] : f^n(U) ∩ U ≠ ∅}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReturnTimeSet {
    pub system: String,
    pub neighborhood: Vec<usize>,
    pub horizon: usize,
    pub times: Vec<usize>,
}

impl ReturnTimeSet {
    pub fn contains(&self, n: usize) -> bool {
        self.times.binary_search(&n).is_ok()
    }

    /// `{1..=horizon} \ times`.
    pub fn complement(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.horizon - self.times.len());
        let mut it = self.times.iter().peekable();
        for n in 1..=self.horizon {
            if it.peek() == Some(&&n) {
                it.next();
            } else {
                out.push(n);
            }
        }
        out
    }
}

fn normalize(system: &FiniteSystem, u: &[usize]) -> Result<Vec<usize>> {
    if u.is_empty() {
        return Err(Error::InvalidParameter("neighborhood must be nonempty".into()));
    }
    if let Some(&p) = u.iter().find(|&&p| p >= system.len()) {
        return Err(Error::InvalidParameter(format!("neighborhood point {p} out of range")));
    }
    let mut u = u.to_vec();
    u.sort_unstable();
    u.dedup();
    Ok(u)
}

/// Iterates `S_n = f(S_{n-1})` from `S_0 = start` and calls `hit(n, S_n)`
/// for `n = 1..=horizon`; stops early when `hit` returns false. Once
/// `S_n = S_{n-1}` the remaining steps reuse the same set.
fn iterate_sets(system: &FiniteSystem, start: &[usize], horizon: usize, mut visit: impl FnMut(usize, &[usize]) -> bool) {
    let mut seen = vec![usize::MAX; system.len()];
    let mut cur = start.to_vec();
    let mut next = Vec::with_capacity(cur.len());
    for n in 1..=horizon {
        next.clear();
        for &x in &cur {
            let y = system.image(x);
            if seen[y] != n {
                seen[y] = n;
                next.push(y);
            }
        }
        next.sort_unstable();
        let stable = next == cur;
        std::mem::swap(&mut cur, &mut next);
        if !visit(n, &cur) {
            return;
        }
        if stable {
            for m in n + 1..=horizon {
                if !visit(m, &cur) {
                    return;
                }
            }
            return;
        }
    }
}

fn meets(set: &[usize], mask: &[bool]) -> bool {
    set.iter().any(|&x| mask[x])
}

fn mask_of(n: usize, u: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &x in u {
        mask[x] = true;
    }
    mask
}

/// Exact return times of `u` up to `horizon`.
pub fn return_times(system: &FiniteSystem, u: &[usize], horizon: usize) -> Result<ReturnTimeSet> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let u = normalize(system, u)?;
    let mask = mask_of(system.len(), &u);
    let mut times = Vec::new();
    iterate_sets(system, &u, horizon, |n, s| {
        if meets(s, &mask) {
            times.push(n);
        }
        true
    });
    Ok(ReturnTimeSet {
        system: system.name().to_string(),
        neighborhood: u,
        horizon,
        times,
    })
}

/// Least return time of `u` up to `horizon`.
pub fn first_return(system: &FiniteSystem, u: &[usize], horizon: usize) -> Option<usize> {
    let mask = mask_of(system.len(), u);
    let mut found = None;
    iterate_sets(system, u, horizon, |n, s| {
        if meets(s, &mask) {
            found = Some(n);
            false
        } else {
            true
        }
    });
    found
}

/// `{1..=horizon} \ return_times`.
pub fn non_return_set(system: &FiniteSystem, u: &[usize], horizon: usize) -> Result<Vec<usize>> {
    Ok(return_times(system, u, horizon)?.complement())
}

/// Points whose closed `eps`-ball returns to itself within `horizon`.
pub fn nw_set(system: &FiniteSystem, metric: &FiniteMetricSpace, eps: f64, horizon: usize) -> Result<MembershipSet> {
    check_nw_params(system, metric, eps, horizon)?;
    let hits = par::map_indices(system.len(), |x| {
        let ball = metric.ball(x, eps);
        first_return(system, &ball, horizon).is_some()
    });
    let members = (0..system.len()).filter(|&x| hits[x]).collect();
    let mut params = BTreeMap::new();
    params.insert("horizon".to_string(), horizon as f64);
    Ok(MembershipSet::new(SetKind::Nw, system, metric_name(system, metric), eps, params, members))
}

/// Least return time of the closed `eps`-ball around `x`.
pub fn nw_member(system: &FiniteSystem, metric: &FiniteMetricSpace, x: usize, eps: f64, horizon: usize) -> Option<usize> {
    first_return(system, &metric.ball(x, eps), horizon)
}

fn check_nw_params(system: &FiniteSystem, metric: &FiniteMetricSpace, eps: f64, horizon: usize) -> Result<()> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {eps} must be nonnegative")));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    if metric.len() != system.len() {
        return Err(Error::Dimension(format!(
            "metric has {} points, system has {}",
            metric.len(),
            system.len()
        )));
    }
    Ok(())
}

pub(crate) fn metric_name(system: &FiniteSystem, metric: &FiniteMetricSpace) -> String {
    if std::ptr::eq(system.space().as_ref(), metric) {
        "base".to_string()
    } else {
        metric.kind().to_string()
    }
}

/// Largest closed ball around `x` whose returns certify a strong
/// `eps`-cycle at `x`: radius `r` with `max_{z in B(x,r)} d(f(x), f(z)) + r <= eps`.
pub fn matched_ball(system: &FiniteSystem, metric: &FiniteMetricSpace, x: usize, eps: f64) -> Vec<usize> {
    let mut near = metric.neighbors_within(x, eps);
    near.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let fx = system.image(x);
    let mut spread = 0.0f64;
    let mut keep = 0;
    let mut i = 0;
    while i < near.len() {
        let r = near[i].1;
        let mut j = i;
        let mut group_spread = spread;
        while j < near.len() && near[j].1 == r {
            group_spread = group_spread.max(metric.dist(fx, system.image(near[j].0)));
            j += 1;
        }
        if group_spread + r <= eps {
            spread = group_spread;
            keep = j;
            i = j;
        } else {
            break;
        }
    }
    let mut ball: Vec<usize> = near[..keep].iter().map(|&(v, _)| v).collect();
    if ball.is_empty() {
        ball.push(x);
    }
    ball.sort_unstable();
    ball
}

/// Nonwandering points at tolerance matched to strong chains: the ball
/// around `x` is [`matched_ball`] in every metric of `members`, and it
/// must return within `horizon` for each of them.
pub fn matched_nw_set(system: &FiniteSystem, members: &[FamilyMember], eps: f64, horizon: usize) -> Result<MembershipSet> {
    if members.is_empty() {
        return Err(Error::InvalidParameter("metric family is empty".into()));
    }
    for m in members {
        check_nw_params(system, &m.space, eps, horizon)?;
    }
    let hits = par::map_indices(system.len(), |x| {
        members.iter().all(|m| {
            let ball = matched_ball(system, &m.space, x, eps);
            first_return(system, &ball, horizon).is_some()
        })
    });
    let members_idx = (0..system.len()).filter(|&x| hits[x]).collect();
    let mut params = BTreeMap::new();
    params.insert("horizon".to_string(), horizon as f64);
    params.insert("family_size".to_string(), members.len() as f64);
    let mut set = MembershipSet::new(SetKind::Nw, system, "family".to_string(), eps, params, members_idx);
    set.provenance
        .notes
        .push("balls shrunk per point so every return yields a strong eps-cycle".into());
    Ok(set)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixingKind {
    MixingUpToHorizon,
    NotMixing,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingVerdict {
    pub point: usize,
    pub eps: f64,
    pub horizon: usize,
    pub window: usize,
    /// Least `N` with every `n in [N, horizon]` a return time.
    pub n0: Option<usize>,
    pub verdict: MixingKind,
    /// `(start, period)` of the eventually periodic sequence `f^n(U)`, when
    /// the repetition was seen before the horizon.
    pub cycle: Option<(usize, usize)>,
    pub returns: ReturnTimeSet,
}

/// Local mixing at `x` for the closed `eps`-ball, up to `horizon`.
///
/// The image sets `f^n(U)` are eventually periodic; when the repetition
/// shows up before the horizon the return pattern is known for every `n`,
/// and a non-return inside the period proves the map is not mixing at
/// this neighborhood. Without a repetition the verdict rests on the last
/// `window` steps.
pub fn locally_mixing(
    system: &FiniteSystem,
    metric: &FiniteMetricSpace,
    x: usize,
    eps: f64,
    horizon: usize,
    window: usize,
) -> Result<MixingVerdict> {
    check_nw_params(system, metric, eps, horizon)?;
    if window > horizon {
        return Err(Error::InvalidParameter(format!("window {window} exceeds horizon {horizon}")));
    }
    let u = metric.ball(x, eps);
    let mask = mask_of(system.len(), &u);
    let mut seen_at: HashMap<Vec<usize>, usize> = HashMap::new();
    seen_at.insert(u.clone(), 0);
    let mut hit = vec![false; horizon + 1];
    let mut cycle = None;
    let mut cur = u.clone();
    let mut stamp = vec![usize::MAX; system.len()];
    for n in 1..=horizon {
        let mut next = Vec::with_capacity(cur.len());
        for &p in &cur {
            let q = system.image(p);
            if stamp[q] != n {
                stamp[q] = n;
                next.push(q);
            }
        }
        next.sort_unstable();
        hit[n] = meets(&next, &mask);
        if cycle.is_none() {
            if let Some(&m) = seen_at.get(&next) {
                cycle = Some((m, n - m));
            } else {
                seen_at.insert(next.clone(), n);
            }
        }
        cur = next;
    }
    let times: Vec<usize> = (1..=horizon).filter(|&n| hit[n]).collect();
    let mut n0 = None;
    for n in (1..=horizon).rev() {
        if hit[n] {
            n0 = Some(n);
        } else {
            break;
        }
    }
    let suffix_ok = n0.is_some_and(|n0| horizon - n0 >= window);
    let verdict = match cycle {
        Some((start, period)) => {
            // Pattern repeats from `start` with `period`; it is exact up to
            // the horizon, which covers at least one full period.
            let base = start.max(1);
            let all_return = (base..base + period).all(|n| n > horizon || hit[n]);
            if !all_return {
                MixingKind::NotMixing
            } else if suffix_ok {
                MixingKind::MixingUpToHorizon
            } else {
                MixingKind::Inconclusive
            }
        }
        None => {
            if suffix_ok {
                MixingKind::MixingUpToHorizon
            } else {
                MixingKind::Inconclusive
            }
        }
    };
    Ok(MixingVerdict {
        point: x,
        eps,
        horizon,
        window,
        n0,
        verdict,
        cycle,
        returns: ReturnTimeSet {
            system: system.name().to_string(),
            neighborhood: u,
            horizon,
            times,
        },
    })
}

/// Default confidence window: a quarter of the horizon.
pub fn default_window(horizon: usize) -> usize {
    horizon / 4
}

/// Nonwandering verdict for a product point with box neighborhoods.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductNwVerdict {
    pub x: usize,
    pub y: usize,
    pub eps: f64,
    pub horizon: usize,
    pub nonwandering: bool,
    /// Least common return time.
    pub witness: Option<usize>,
    pub returns_x: ReturnTimeSet,
    pub returns_y: ReturnTimeSet,
    /// Direct iteration of the box `U × V` agreed with the intersection.
    pub cross_checked: bool,
}

/// Product nonwandering up to `horizon` for `(x, y)`, neighborhoods
/// `B(x, eps) × B(y, eps)`.
pub fn product_nw_check(
    f: &FiniteSystem,
    g: &FiniteSystem,
    x: usize,
    y: usize,
    eps: f64,
    horizon: usize,
) -> Result<ProductNwVerdict> {
    let u = f.space().ball(x, eps);
    let v = g.space().ball(y, eps);
    product_nw_check_sets(f, g, x, y, &u, &v, eps, horizon)
}

#[allow(clippy::too_many_arguments)]
fn product_nw_check_sets(
    f: &FiniteSystem,
    g: &FiniteSystem,
    x: usize,
    y: usize,
    u: &[usize],
    v: &[usize],
    eps: f64,
    horizon: usize,
) -> Result<ProductNwVerdict> {
    let rx = return_times(f, u, horizon)?;
    let ry = return_times(g, v, horizon)?;
    let witness = rx.times.iter().copied().find(|&n| ry.contains(n));
    let direct = box_first_return(f, g, &rx.neighborhood, &ry.neighborhood, horizon);
    Ok(ProductNwVerdict {
        x,
        y,
        eps,
        horizon,
        nonwandering: witness.is_some(),
        witness,
        cross_checked: direct == witness,
        returns_x: rx,
        returns_y: ry,
    })
}

/// First `n` with `(f×g)^n(U×V) ∩ (U×V) ≠ ∅`, by iterating the set of pairs.
fn box_first_return(f: &FiniteSystem, g: &FiniteSystem, u: &[usize], v: &[usize], horizon: usize) -> Option<usize> {
    let mu = mask_of(f.len(), u);
    let mv = mask_of(g.len(), v);
    let mut pairs: Vec<(usize, usize)> = u.iter().flat_map(|&a| v.iter().map(move |&b| (a, b))).collect();
    for n in 1..=horizon {
        for p in pairs.iter_mut() {
            *p = (f.image(p.0), g.image(p.1));
        }
        pairs.sort_unstable();
        pairs.dedup();
        if pairs.iter().any(|&(a, b)| mu[a] && mv[b]) {
            return Some(n);
        }
    }
    None
}

/// Outcome of [`build_wandering_witness`].
#[derive(Clone, Debug)]
pub struct WanderingWitness {
    pub mixing: MixingVerdict,
    /// Non-return times of `B(x, eps)` used as `M`.
    pub m: Vec<usize>,
    pub gm: GmSystem,
    pub verdict: ProductNwVerdict,
}

/// For `x` where `f` is not locally mixing, builds `g_M` from the
/// non-return times of `B(x, eps)` and checks that `(x, (1,0))` is
/// wandering for `f × g_M` with neighborhood `B(x, eps) × V`.
pub fn build_wandering_witness(
    f: &FiniteSystem,
    x: usize,
    eps: f64,
    horizon: usize,
    i_max: usize,
) -> Result<WanderingWitness> {
    let mixing = locally_mixing(f, f.space(), x, eps, horizon, default_window(horizon))?;
    if mixing.verdict != MixingKind::NotMixing {
        return Err(Error::Precondition(format!(
            "f is not shown to be non-mixing at point {x} (verdict {:?}, N0 {:?}); refusing to build g_M",
            mixing.verdict, mixing.n0
        )));
    }
    let mut m = mixing.returns.complement();
    m.truncate(i_max.max(1));
    let tail = *m.last().expect("non-mixing verdict implies a non-return time");
    let gm = gm_system(&m, m.len(), tail)?;
    let u = mixing.returns.neighborhood.clone();
    let verdict = product_nw_check_sets(f, &gm.system, x, gm.y, &u, &gm.v, eps, horizon)?;
    Ok(WanderingWitness { mixing, m, gm, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{circle_system, identity_system, spiral_disk_system, swap_system, CircleMap};
    use std::f64::consts::TAU;

    fn orbit_oracle(system: &FiniteSystem, u: &[usize], horizon: usize) -> Vec<usize> {
        (1..=horizon)
            .filter(|&n| u.iter().any(|&z| u.contains(&system.iterate(z, n))))
            .collect()
    }

    #[test]
    fn identity_returns_always() {
        let s = identity_system(4).unwrap();
        assert_eq!(return_times(&s, &[2], 9).unwrap().times, (1..=9).collect::<Vec<_>>());
        assert!(non_return_set(&s, &[1, 3], 9).unwrap().is_empty());
    }

    #[test]
    fn swap_returns_at_even_times() {
        let s = swap_system().unwrap();
        assert_eq!(return_times(&s, &[0], 10).unwrap().times, vec![2, 4, 6, 8, 10]);
    }

    #[test]
    fn gm_fig_one_returns() {
        let gm = gm_system(&[3, 5, 6], 3, 6).unwrap();
        let r = return_times(&gm.system, &gm.v, 10).unwrap();
        assert_eq!(r.times, vec![3, 5, 6]);
        assert_eq!(r.complement(), vec![1, 2, 4, 7, 8, 9, 10]);
        assert_eq!(r.times, orbit_oracle(&gm.system, &gm.v, 10));
    }

    #[test]
    fn odd_gm_returns() {
        let odds: Vec<usize> = (1..=99).step_by(2).collect();
        let gm = gm_system(&odds, 50, 99).unwrap();
        assert_eq!(return_times(&gm.system, &gm.v, 99).unwrap().times, odds);
    }

    #[test]
    fn sink_path_nw_is_the_sink() {
        let space = std::sync::Arc::new(FiniteMetricSpace::path(6).unwrap());
        let s = crate::dynamics::finite_system(space, vec![1, 2, 3, 4, 5, 5]).unwrap();
        assert_eq!(nw_set(&s, s.space(), 0.0, 6).unwrap().members, vec![5]);
    }

    #[test]
    fn one_cell_rotation_is_not_mixing() {
        let cell = TAU / 12.0;
        let s = circle_system(CircleMap::Rotation { theta: cell }, 12).unwrap();
        let v = locally_mixing(&s, s.space(), 0, cell, 96, 24).unwrap();
        assert_eq!(v.verdict, MixingKind::NotMixing);
        let all: Vec<usize> = (1..=96).filter(|n| n % 12 != 0).collect();
        assert_eq!(non_return_set(&s, &[0], 96).unwrap(), all);
    }

    #[test]
    fn fixed_points_are_mixing() {
        let s = circle_system(CircleMap::HalfFixed, 72).unwrap();
        for x in s.fixed_points() {
            for eps in [0.0, 0.1] {
                let v = locally_mixing(&s, s.space(), x, eps, 40, 10).unwrap();
                assert_eq!(v.verdict, MixingKind::MixingUpToHorizon);
                assert_eq!(v.n0, Some(1));
            }
        }
    }

    #[test]
    fn doubling_grid_collapses_to_zero() {
        // k ↦ 2k mod 64 sends every cell to 0 within six steps, so a
        // ball returns only through an orbit segment that starts and ends
        // inside it; compare with a direct orbit search.
        let s = circle_system(CircleMap::Doubling, 64).unwrap();
        let cell = TAU / 64.0;
        let nw = nw_set(&s, s.space(), cell, 64).unwrap();
        let oracle: Vec<usize> = (0..64)
            .filter(|&x| {
                let ball = s.space().ball(x, cell);
                ball.iter().any(|&z| (1..=64).any(|n| ball.contains(&s.iterate(z, n))))
            })
            .collect();
        assert_eq!(nw.members, oracle);
        assert!(nw.contains(0) && nw.len() < 64);
    }

    #[test]
    fn product_check_and_cross_check() {
        let odds: Vec<usize> = (1..=99).step_by(2).collect();
        let gm = gm_system(&odds, 50, 99).unwrap();
        let swap = swap_system().unwrap();
        let eps = 0.2;
        let v = product_nw_check(&gm.system, &swap, gm.y, 0, eps, 200).unwrap();
        assert!(!v.nonwandering);
        assert!(v.cross_checked);
        assert!(nw_member(&gm.system, gm.system.space(), gm.y, eps, 200).is_some());

        let dbl = circle_system(CircleMap::Doubling, 64).unwrap();
        let primes: Vec<usize> = (2..=97usize).filter(|&p| (2..p).all(|d| p % d != 0)).collect();
        let gp = gm_system(&primes, primes.len(), 97).unwrap();
        // The 0.2-ball around y holds the heads (1, 1/i) for i >= 5.
        let w = product_nw_check(&dbl, &gp.system, 0, gp.y, 0.2, 200).unwrap();
        assert!(w.nonwandering && w.cross_checked);
        assert_eq!(w.returns_y.times, primes[4..].to_vec());
        assert_eq!(w.witness, Some(11));
    }

    #[test]
    fn witness_factory() {
        let cell = TAU / 12.0;
        let r = circle_system(CircleMap::Rotation { theta: cell }, 12).unwrap();
        let w = build_wandering_witness(&r, 3, 0.0, 120, 40).unwrap();
        assert!(w.m.iter().all(|n| n % 12 != 0));
        assert!(!w.verdict.nonwandering && w.verdict.cross_checked);

        let swap = swap_system().unwrap();
        let w = build_wandering_witness(&swap, 0, 0.0, 100, 50).unwrap();
        assert_eq!(w.m, (1..100).step_by(2).collect::<Vec<_>>());
        assert!(!w.verdict.nonwandering);

        let dbl = circle_system(CircleMap::Doubling, 64).unwrap();
        assert!(matches!(build_wandering_witness(&dbl, 0, TAU / 64.0, 64, 10), Err(Error::Precondition(_))));
    }

    #[test]
    fn spiral_nonwandering_is_center_and_boundary() {
        let (n_r, n_a) = (10, 36);
        let s = spiral_disk_system(n_r, n_a).unwrap();
        let eps = s.meta().unwrap().cell_diameter;
        let nw = nw_set(&s, s.space(), eps, 2000).unwrap();
        let boundary = s.marked("boundary").unwrap();
        let mut expect = vec![0];
        expect.extend_from_slice(boundary);
        for &b in &expect {
            assert!(nw.contains(b), "{b}");
        }
        // Up to one ring of slack at grid scale.
        for &m in &nw.members {
            let ring = if m == 0 { 0 } else { (m - 1) / n_a + 1 };
            assert!(ring <= 1 || ring >= n_r - 1, "unexpected {m} in ring {ring}");
        }
    }
}
