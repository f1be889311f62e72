//! Recurrence sets at a fixed tolerance and the product-theorem checks.
//!
//! * `CR_ε`: points on a cycle of the ε-chain digraph.
//! * `SCR_ε`: points whose least closed-chain cost is at most ε.
//! * Mañé: `Fix ∪ CR_ε` restricted to the complement of the interior of `Fix`.
//! * `GR_approx`: intersection of `SCR_ε` over a metric family (an outer
//!   approximation of the generalized recurrent set).
//! * `NW`: closed ε-balls that return within a horizon.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain_engine::{
    chain_graph, chain_recurrent_through, cyclic_vertices, exact_length_costs, length_profile, min_cycle_costs, shortest_chains,
    ErrorGraph,
};
use crate::dynamics::{product_system, FiniteSystem, ProductMode};
use crate::error::{Error, Result};
use crate::metric_space::{
    derived_factor_metrics, distort_metric, lemma_bound_violation, product_metric, within, Distortion,
    FamilyMember, FiniteMetricSpace, MetricFamily, MetricTransform, ProductSpace,
};
use crate::nonwandering::{matched_nw_set, metric_name, nw_set};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Cr,
    Scr,
    Mane,
    GrApprox,
    Nw,
    Fix,
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SetKind::Cr => "CR",
            SetKind::Scr => "SCR",
            SetKind::Mane => "Mane",
            SetKind::GrApprox => "GR_approx",
            SetKind::Nw => "NW",
            SetKind::Fix => "Fix",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// A subset of the points of a system, tagged with how it was computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipSet {
    pub kind: SetKind,
    pub system: String,
    pub metric: String,
    pub eps: f64,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub points: usize,
    /// Sorted member indices.
    pub members: Vec<usize>,
    pub provenance: Provenance,
}

impl MembershipSet {
    pub(crate) fn new(
        kind: SetKind,
        system: &FiniteSystem,
        metric: String,
        eps: f64,
        params: BTreeMap<String, f64>,
        members: Vec<usize>,
    ) -> Self {
        Self {
            kind,
            system: system.name().to_string(),
            metric,
            eps,
            params,
            points: system.len(),
            members,
            provenance: Provenance {
                algorithm: crate::ALGORITHM_VERSION.to_string(),
                notes: Vec::new(),
            },
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.points];
        for &i in &self.members {
            m[i] = true;
        }
        m
    }

    /// First member of `self` missing from `other`.
    pub fn first_outside(&self, other: &MembershipSet) -> Option<usize> {
        self.members.iter().copied().find(|&i| !other.contains(i))
    }

    pub fn is_subset_of(&self, other: &MembershipSet) -> bool {
        self.first_outside(other).is_none()
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("tolerance {eps} must be finite and nonnegative")));
    }
    Ok(())
}

/// `CR_ε`: cyclic vertices of the ε-chain digraph.
pub fn cr_set(system: &FiniteSystem, metric: &FiniteMetricSpace, eps: f64) -> Result<MembershipSet> {
    check_eps(eps)?;
    let eg = ErrorGraph::with_metric(system, metric)?;
    let members = cyclic_vertices(&chain_graph(&eg, eps)?);
    Ok(MembershipSet::new(SetKind::Cr, system, metric_name(system, metric), eps, BTreeMap::new(), members))
}

fn scr_members(system: &FiniteSystem, metric: &FiniteMetricSpace, eps: f64) -> Result<Vec<usize>> {
    let eg = ErrorGraph::with_metric(system, metric)?;
    let costs = min_cycle_costs(&eg, eps);
    Ok((0..system.len()).filter(|&x| within(costs[x], eps)).collect())
}

/// `SCR_ε`: points with a closed strong ε-chain.
pub fn scr_set(system: &FiniteSystem, metric: &FiniteMetricSpace, eps: f64) -> Result<MembershipSet> {
    check_eps(eps)?;
    let members = scr_members(system, metric, eps)?;
    Ok(MembershipSet::new(SetKind::Scr, system, metric_name(system, metric), eps, BTreeMap::new(), members))
}

/// `(Fix, InteriorFix)`: fixed points, and fixed points whose closed
/// `radius`-ball consists of fixed points.
pub fn fixed_points(system: &FiniteSystem, metric: &FiniteMetricSpace, radius: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(radius >= 0.0) {
        return Err(Error::InvalidParameter(format!("radius {radius} must be nonnegative")));
    }
    if metric.len() != system.len() {
        return Err(Error::Dimension("metric and system sizes differ".into()));
    }
    let fix = system.fixed_points();
    let interior = fix
        .iter()
        .copied()
        .filter(|&x| metric.ball(x, radius).into_iter().all(|z| system.is_fixed(z)))
        .collect();
    Ok((fix, interior))
}

/// Mañé set at tolerance ε: `Fix ∪ CR_ε` through `X \ Int_radius(Fix)`.
pub fn mane_set(system: &FiniteSystem, metric: &FiniteMetricSpace, eps: f64, radius: f64) -> Result<MembershipSet> {
    check_eps(eps)?;
    let (fix, interior) = fixed_points(system, metric, radius)?;
    let mut allowed = vec![true; system.len()];
    for &x in &interior {
        allowed[x] = false;
    }
    let eg = ErrorGraph::with_metric(system, metric)?;
    let mut members = chain_recurrent_through(&eg, eps, &allowed)?;
    members.extend(fix);
    members.sort_unstable();
    members.dedup();
    let mut params = BTreeMap::new();
    params.insert("radius".to_string(), radius);
    Ok(MembershipSet::new(SetKind::Mane, system, metric_name(system, metric), eps, params, members))
}

/// `∩ SCR_ε` over the members of `family` (each rescaled to the base diameter).
pub fn gr_approx(system: &FiniteSystem, family: &MetricFamily, eps: f64) -> Result<MembershipSet> {
    if family.base().len() != system.len() {
        return Err(Error::Dimension("family base and system sizes differ".into()));
    }
    let members = family.members()?;
    let mut set = gr_approx_members(system, &members, eps)?;
    set.provenance.notes.push(format!("family: {}", family.names().join(", ")));
    Ok(set)
}

/// [`gr_approx`] over already materialized family members.
pub fn gr_approx_members(system: &FiniteSystem, members: &[FamilyMember], eps: f64) -> Result<MembershipSet> {
    check_eps(eps)?;
    if members.is_empty() {
        return Err(Error::InvalidParameter("metric family is empty".into()));
    }
    let mut keep = vec![true; system.len()];
    let periodic = system.periodic_mask();
    // Points already dropped by one member are not searched again.
    for m in members {
        let eg = ErrorGraph::with_metric(system, &m.space)?;
        keep = par::map_indices(system.len(), |x| {
            keep[x] && (periodic[x] || within(shortest_chains(&eg, x, eps, Some(x)).cost[x], eps))
        });
    }
    let set_members = (0..system.len()).filter(|&x| keep[x]).collect();
    let mut params = BTreeMap::new();
    params.insert("family_size".to_string(), members.len() as f64);
    let mut set = MembershipSet::new(SetKind::GrApprox, system, "family".to_string(), eps, params, set_members);
    set.provenance
        .notes
        .push("outer approximation: intersection over a finite metric family".into());
    Ok(set)
}

/// One containment `subset ⊆ superset` between two computed sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentCheck {
    pub subset: SetKind,
    pub superset: SetKind,
    pub holds: bool,
    pub violations: usize,
    pub witness: Option<usize>,
    /// The superset has points outside the subset.
    pub strict: bool,
}

/// `NW ⊆ GR_approx ⊆ SCR ⊆ Mañé ⊆ CR` at one tolerance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InclusionReport {
    pub system: String,
    pub eps: f64,
    pub radius: f64,
    pub horizon: usize,
    pub family: Vec<String>,
    /// NW, GR_approx, SCR, Mañé, CR in that order.
    pub sets: Vec<MembershipSet>,
    /// Plain closed-ε-ball NW, for reference (not part of the chain).
    pub nw_ball: MembershipSet,
    pub checks: Vec<ContainmentCheck>,
}

impl InclusionReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn set(&self, kind: SetKind) -> Option<&MembershipSet> {
        self.sets.iter().find(|s| s.kind == kind)
    }
}

fn compare(sub: &MembershipSet, sup: &MembershipSet) -> ContainmentCheck {
    let missing: Vec<usize> = sub.members.iter().copied().filter(|&i| !sup.contains(i)).collect();
    ContainmentCheck {
        subset: sub.kind,
        superset: sup.kind,
        holds: missing.is_empty(),
        violations: missing.len(),
        witness: missing.first().copied(),
        strict: sup.len() > sub.len() - missing.len(),
    }
}

/// Computes the five sets at matched tolerance and checks the chain.
///
/// NW balls are shrunk per point (see [`crate::nonwandering::matched_ball`])
/// so that every return certifies a strong ε-cycle in each family metric.
pub fn inclusion_report(
    system: &FiniteSystem,
    family: &MetricFamily,
    eps: f64,
    radius: f64,
    horizon: usize,
) -> Result<InclusionReport> {
    check_eps(eps)?;
    let members = family.members()?;
    let base = system.space().as_ref();
    let nw = matched_nw_set(system, &members, eps, horizon)?;
    let gr = gr_approx_members(system, &members, eps)?;
    let scr = scr_set(system, base, eps)?;
    let mane = mane_set(system, base, eps, radius)?;
    let cr = cr_set(system, base, eps)?;
    let nw_ball = nw_set(system, base, eps, horizon)?;
    let checks = vec![compare(&nw, &gr), compare(&gr, &scr), compare(&scr, &mane), compare(&mane, &cr)];
    Ok(InclusionReport {
        system: system.name().to_string(),
        eps,
        radius,
        horizon,
        family: family.names(),
        sets: vec![nw, gr, scr, mane, cr],
        nw_ball,
        checks,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    /// Reported for information; not a pass/fail property.
    Info,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Info => "INFO",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub violations: usize,
    pub witness: Option<String>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItemReport {
    pub item: u8,
    pub title: String,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
}

impl ItemReport {
    fn new(item: u8, title: &str, checks: Vec<Check>) -> Self {
        let verdict = if checks.iter().any(|c| c.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if checks.iter().any(|c| c.verdict == Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        Self {
            item,
            title: title.to_string(),
            verdict,
            checks,
        }
    }

    pub fn check(&self, name_prefix: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name.starts_with(name_prefix))
    }
}

/// Parameters of [`verify_product_theorem`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductParams {
    /// Radius of the interior of `Fix` for Mañé sets (default `0.75·ε`).
    pub radius: Option<f64>,
    /// Horizon for NW (default 200).
    pub horizon: Option<usize>,
    /// Equal-length search horizon (default `4·(|X|+|Y|)`).
    pub n_max: Option<usize>,
    /// Items to run (default all six).
    pub items: Vec<u8>,
    /// Metric transforms pairing the two families for item (2).
    pub family: Option<Vec<String>>,
}

impl Default for ProductParams {
    fn default() -> Self {
        Self {
            radius: None,
            horizon: None,
            n_max: None,
            items: vec![1, 2, 3, 4, 5, 6],
            family: None,
        }
    }
}

impl ProductParams {
    pub fn items(items: &[u8]) -> Self {
        Self {
            items: items.to_vec(),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductReport {
    pub f: String,
    pub g: String,
    pub eps: f64,
    pub radius: f64,
    pub horizon: usize,
    pub n_max: usize,
    pub items: Vec<ItemReport>,
}

impl ProductReport {
    pub fn item(&self, k: u8) -> Option<&ItemReport> {
        self.items.iter().find(|i| i.item == k)
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.verdict != Verdict::Fail)
    }
}

struct Pairing<'a> {
    prod: &'a ProductSpace,
}

impl Pairing<'_> {
    fn label(&self, k: usize) -> String {
        let (x, y) = self.prod.split(k);
        format!("({x},{y})")
    }

    fn product_mask(&self, a: &[usize], b: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.prod.space().len()];
        for &x in a {
            for &y in b {
                m[self.prod.index(x, y)] = true;
            }
        }
        m
    }

    /// `sub ⊆ sup` where `sub` lists product indices.
    fn containment(&self, name: &str, sub: &[usize], sup: &[bool]) -> Check {
        let bad: Vec<usize> = sub.iter().copied().filter(|&k| !sup[k]).collect();
        Check {
            name: name.to_string(),
            verdict: if bad.is_empty() { Verdict::Pass } else { Verdict::Fail },
            violations: bad.len(),
            witness: bad.first().map(|&k| self.label(k)),
            detail: format!("{} points checked", sub.len()),
        }
    }

    /// `A × B ⊆ sup`.
    fn box_containment(&self, name: &str, a: &[usize], b: &[usize], sup: &[bool]) -> Check {
        let sub: Vec<usize> = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).map(|(x, y)| self.prod.index(x, y)).collect();
        self.containment(name, &sub, sup)
    }

    /// Informational comparison of `A × B` with a product set.
    fn strictness(&self, name: &str, a: &[usize], b: &[usize], product: &[usize]) -> Check {
        let boxed = self.product_mask(a, b);
        let extra: Vec<usize> = product.iter().copied().filter(|&k| !boxed[k]).collect();
        let pset: std::collections::HashSet<usize> = product.iter().copied().collect();
        let missing = a.len() * b.len() - boxed.iter().zip(0..).filter(|&(&m, k)| m && pset.contains(&k)).count();
        let relation = if extra.is_empty() && missing == 0 {
            "equal".to_string()
        } else if missing == 0 {
            format!("strict: product set has {} extra points", extra.len())
        } else if extra.is_empty() {
            format!("product set misses {missing} box points")
        } else {
            format!("{} extra, {missing} missing", extra.len())
        };
        Check {
            name: name.to_string(),
            verdict: Verdict::Info,
            violations: 0,
            witness: extra.first().map(|&k| self.label(k)).or_else(|| {
                (0..boxed.len()).find(|&k| boxed[k] && !pset.contains(&k)).map(|k| self.label(k))
            }),
            detail: format!("|A×B| = {}, |product| = {}; {relation}", a.len() * b.len(), product.len()),
        }
    }
}

fn bitset(bits: &[bool]) -> Vec<u64> {
    let mut words = vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    words
}

fn first_common(a: &[u64], b: &[u64]) -> Option<usize> {
    a.iter()
        .zip(b)
        .enumerate()
        .find_map(|(w, (x, y))| {
            let z = x & y;
            (z != 0).then(|| w * 64 + z.trailing_zeros() as usize)
        })
}

/// Length bitmaps of strong `budget`-cycles for each point of `points`.
fn profile_bits(eg: &ErrorGraph, points: &[usize], budget: f64, n_max: usize) -> Result<Vec<Vec<u64>>> {
    let profiles: Vec<Result<Vec<u64>>> =
        par::map_slice(points, |&x| Ok(bitset(&length_profile(eg, x, budget, n_max, false)?.bitmap())));
    profiles.into_iter().collect()
}

/// `out[n]`: least cost of a closed chain of exactly `n` steps at `x`,
/// `n = 0..=n_max` (infinite above `budget`).
fn closing_costs(eg: &ErrorGraph, x: usize, budget: f64, n_max: usize) -> Result<Vec<f64>> {
    Ok(exact_length_costs(eg, x, budget, n_max)?.into_iter().map(|layer| layer[x]).collect())
}

/// Converse check by equal-length cycles: `(x, y)` is confirmed when some
/// `n <= n_max` has closed chains of length `n` at `x` and `y` whose costs
/// add up to at most `2·half`. Cheap first pass: both cycles within `half`
/// (length bitmaps); pairs left over get per-length least costs at the full
/// budget. Confirmed pairs must lie in `target`; pairs outside `target`
/// without a certificate are inconclusive (the split of the budget is a
/// finite-tolerance statement, not the limit one).
#[allow(clippy::too_many_arguments)]
fn equal_length_converse(
    pairing: &Pairing,
    name: &str,
    egf: &ErrorGraph,
    egg: &ErrorGraph,
    xs: &[usize],
    ys: &[usize],
    half: f64,
    n_max: usize,
    target: &[bool],
) -> Result<Check> {
    let bx = profile_bits(egf, xs, half, n_max)?;
    let by = profile_bits(egg, ys, half, n_max)?;
    let full = 2.0 * half;
    let mut cx: Vec<Option<Vec<f64>>> = vec![None; xs.len()];
    let mut cy: Vec<Option<Vec<f64>>> = vec![None; ys.len()];
    let mut confirmed = 0usize;
    let mut by_costs = 0usize;
    let mut direct = 0usize;
    let mut undecided = 0usize;
    let mut bad = Vec::new();
    let mut first_undecided = None;
    let mut longest = 0usize;
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let k = pairing.prod.index(x, y);
            let mut common = first_common(&bx[i], &by[j]);
            if common.is_none() {
                if cx[i].is_none() {
                    cx[i] = Some(closing_costs(egf, x, full, n_max)?);
                }
                if cy[j].is_none() {
                    cy[j] = Some(closing_costs(egg, y, full, n_max)?);
                }
                let (a, b) = (cx[i].as_ref().expect("filled"), cy[j].as_ref().expect("filled"));
                common = (1..=n_max).find(|&n| within(a[n] + b[n], full));
                by_costs += usize::from(common.is_some());
            }
            match common {
                Some(n) => {
                    longest = longest.max(n);
                    if target[k] {
                        confirmed += 1;
                    } else {
                        bad.push(k);
                    }
                }
                // No equal-length certificate, but the exact product set
                // still contains the pair.
                None if target[k] => direct += 1,
                None => {
                    undecided += 1;
                    first_undecided.get_or_insert(k);
                }
            }
        }
    }
    let verdict = if !bad.is_empty() {
        Verdict::Fail
    } else if undecided > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(Check {
        name: name.to_string(),
        verdict,
        violations: bad.len(),
        witness: bad.first().or(first_undecided.as_ref()).map(|&k| pairing.label(k)),
        detail: format!(
            "{confirmed} pairs confirmed by equal-length cycles ({by_costs} needing unequal cost shares, longest common length {longest}), {direct} in the product set without one, {undecided} outside it with no common length <= {n_max}"
        ),
    })
}

fn product_set(prod: &ProductSpace, members: &[usize]) -> Vec<bool> {
    let mut m = vec![false; prod.space().len()];
    for &k in members {
        m[k] = true;
    }
    m
}

/// Checks the product theorem items at tolerance `eps` with the sum metric
/// on `X × Y`.
///
/// Exact containments (Pass/Fail): (1) `NW(f×g) ⊆ NW(f)×NW(g)`;
/// (2) `GR(f×g) ⊆ GR(f)×GR(g)` over paired families; (3)
/// `Mañé_{ε/2}(f)×Mañé_{ε/2}(g) ⊆ Mañé_ε(f×g)`; (4) `SCR_ε(f×g) ⊆
/// SCR_ε(f)×SCR_ε(g)`, and the converse for pairs with equal-length
/// `ε/2`-cycles; (5) `SCR_{D̄_X}(f)×SCR_{D̄_Y}(g) ⊆ SCR_D(f×g)` for pairs
/// with equal-length cycles, `D` the square root of the sum metric; (6)
/// `CR_ε(f×g) ⊆ CR_ε(f)×CR_ε(g)` and `CR_{ε/2}(f)×CR_{ε/2}(g) ⊆ CR_ε(f×g)`.
pub fn verify_product_theorem(f: &FiniteSystem, g: &FiniteSystem, eps: f64, params: &ProductParams) -> Result<ProductReport> {
    check_eps(eps)?;
    let p = product_system(f, g, ProductMode::Sum)?;
    let prod = &p.product().expect("product system").space;
    let pairing = Pairing { prod };
    let radius = params.radius.unwrap_or(0.75 * eps);
    let horizon = params.horizon.unwrap_or(200);
    let n_max = params.n_max.unwrap_or(4 * (f.len() + g.len()));
    let half = eps / 2.0;
    let (df, dg, dp) = (f.space().as_ref(), g.space().as_ref(), p.space().as_ref());
    let mut items = Vec::new();
    let mut wanted: Vec<u8> = params.items.clone();
    wanted.sort_unstable();
    wanted.dedup();
    for item in wanted {
        let report = match item {
            1 => {
                let nf = nw_set(f, df, eps, horizon)?;
                let ng = nw_set(g, dg, eps, horizon)?;
                let np = nw_set(&p, dp, eps, horizon)?;
                let sup = pairing.product_mask(&nf.members, &ng.members);
                ItemReport::new(
                    1,
                    "NW(fxg) in NW(f) x NW(g)",
                    vec![
                        pairing.containment("NW(fxg) in NW(f)xNW(g)", &np.members, &sup),
                        pairing.strictness("NW(f)xNW(g) vs NW(fxg)", &nf.members, &ng.members, &np.members),
                    ],
                )
            }
            2 => item_two(f, g, &p, &pairing, eps, params)?,
            3 => {
                let mf = mane_set(f, df, half, radius)?;
                let mg = mane_set(g, dg, half, radius)?;
                let mp = mane_set(&p, dp, eps, radius)?;
                let mf_full = mane_set(f, df, eps, radius)?;
                let mg_full = mane_set(g, dg, eps, radius)?;
                ItemReport::new(
                    3,
                    "Mane(f) x Mane(g) in Mane(fxg)",
                    vec![
                        pairing.box_containment(
                            "Mane_eps/2(f)xMane_eps/2(g) in Mane_eps(fxg)",
                            &mf.members,
                            &mg.members,
                            &product_set(prod, &mp.members),
                        ),
                        pairing.strictness("Mane_eps(f)xMane_eps(g) vs Mane_eps(fxg)", &mf_full.members, &mg_full.members, &mp.members),
                    ],
                )
            }
            4 => {
                let sf = scr_set(f, df, eps)?;
                let sg = scr_set(g, dg, eps)?;
                let sp = scr_set(&p, dp, eps)?;
                let sup = pairing.product_mask(&sf.members, &sg.members);
                let xs = scr_members(f, df, half)?;
                let ys = scr_members(g, dg, half)?;
                let converse = equal_length_converse(
                    &pairing,
                    "SCR_eps/2(f)xSCR_eps/2(g) in SCR_eps(fxg)",
                    &ErrorGraph::new(f),
                    &ErrorGraph::new(g),
                    &xs,
                    &ys,
                    half,
                    n_max,
                    &product_set(prod, &sp.members),
                )?;
                ItemReport::new(
                    4,
                    "SCR_D(fxg) = SCR(f) x SCR(g)",
                    vec![pairing.containment("SCR_eps(fxg) in SCR_eps(f)xSCR_eps(g)", &sp.members, &sup), converse],
                )
            }
            5 => item_five(f, g, &p, &pairing, eps, n_max)?,
            6 => {
                let cf = cr_set(f, df, eps)?;
                let cg = cr_set(g, dg, eps)?;
                let cp = cr_set(&p, dp, eps)?;
                let hf = cr_set(f, df, half)?;
                let hg = cr_set(g, dg, half)?;
                let sup = pairing.product_mask(&cf.members, &cg.members);
                ItemReport::new(
                    6,
                    "CR(fxg) = CR(f) x CR(g)",
                    vec![
                        pairing.containment("CR_eps(fxg) in CR_eps(f)xCR_eps(g)", &cp.members, &sup),
                        pairing.box_containment(
                            "CR_eps/2(f)xCR_eps/2(g) in CR_eps(fxg)",
                            &hf.members,
                            &hg.members,
                            &product_set(prod, &cp.members),
                        ),
                    ],
                )
            }
            other => return Err(Error::InvalidParameter(format!("unknown theorem item {other}"))),
        };
        items.push(report);
    }
    Ok(ProductReport {
        f: f.name().to_string(),
        g: g.name().to_string(),
        eps,
        radius,
        horizon,
        n_max,
        items,
    })
}

/// Transforms shared by both factor families, paired by name; a factor
/// without a transform uses the identity in that slot.
fn paired_transforms(f: &FiniteSystem, g: &FiniteSystem, names: Option<&[String]>) -> Result<Vec<(MetricTransform, MetricTransform)>> {
    let (ff, gf) = match names {
        Some(names) => (
            MetricFamily::from_names(f.space().clone(), names)?,
            MetricFamily::from_names(g.space().clone(), names)?,
        ),
        None => (MetricFamily::default_for(f.space().clone()), MetricFamily::default_for(g.space().clone())),
    };
    let mut order: Vec<MetricTransform> = Vec::new();
    for t in ff.transforms().iter().chain(gf.transforms()) {
        if !order.contains(t) {
            order.push(t.clone());
        }
    }
    Ok(order
        .into_iter()
        .map(|t| {
            let tx = if ff.transforms().contains(&t) { t.clone() } else { MetricTransform::Identity };
            let ty = if gf.transforms().contains(&t) { t } else { MetricTransform::Identity };
            (tx, ty)
        })
        .collect())
}

fn one_member(base: &Arc<FiniteMetricSpace>, t: MetricTransform) -> Result<FamilyMember> {
    let fam = MetricFamily::new(base.clone()).with(t.clone());
    let members = fam.members()?;
    Ok(members.into_iter().last().expect("family has members"))
}

fn item_two(
    f: &FiniteSystem,
    g: &FiniteSystem,
    p: &FiniteSystem,
    pairing: &Pairing,
    eps: f64,
    params: &ProductParams,
) -> Result<ItemReport> {
    let pairs = paired_transforms(f, g, params.family.as_deref())?;
    let mut fm = Vec::new();
    let mut gm = Vec::new();
    let mut pm = Vec::new();
    for (tx, ty) in &pairs {
        let a = one_member(f.space(), tx.clone())?;
        let b = one_member(g.space(), ty.clone())?;
        let sum = product_metric(&a.space, &b.space)?;
        pm.push(FamilyMember {
            name: format!("{}+{}", a.name, b.name),
            space: sum.space().clone(),
        });
        fm.push(a);
        gm.push(b);
    }
    let gf = gr_approx_members(f, &fm, eps)?;
    let gg = gr_approx_members(g, &gm, eps)?;
    let gp = gr_approx_members(p, &pm, eps)?;
    let sup = pairing.product_mask(&gf.members, &gg.members);
    let names: Vec<String> = pm.iter().map(|m| m.name.clone()).collect();
    let mut exact = pairing.containment("GR(fxg) in GR(f)xGR(g)", &gp.members, &sup);
    exact.detail = format!("{}; paired metrics: {}", exact.detail, names.join(", "));
    let mut approx = pairing.strictness("GR(f)xGR(g) vs GR(fxg) (approximate)", &gf.members, &gg.members, &gp.members);
    approx.detail = format!("{}; outer approximations over {} paired metrics", approx.detail, pm.len());
    Ok(ItemReport::new(2, "GR(fxg) = GR(f) x GR(g) (family approximation)", vec![exact, approx]))
}

/// Lemma bound `D <= D̄_X + D̄_Y`, exhaustively for small products and on
/// 10^5 seeded random pairs otherwise.
pub fn lemma_bound_check(prod: &ProductSpace, dbx: &FiniteMetricSpace, dby: &FiniteMetricSpace) -> (u64, Option<(usize, usize)>) {
    let n = prod.space().len();
    if n <= 1500 {
        return ((n * n.saturating_sub(1) / 2) as u64, lemma_bound_violation(prod, dbx, dby));
    }
    let tol = crate::metric_space::AXIOM_TOLERANCE * prod.space().diameter().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples = 100_000u64;
    for _ in 0..samples {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let (x1, y1) = prod.split(a);
        let (x2, y2) = prod.split(b);
        if prod.space().dist(a, b) > dbx.dist(x1, x2) + dby.dist(y1, y2) + tol {
            return (samples, Some((a, b)));
        }
    }
    (samples, None)
}

fn item_five(f: &FiniteSystem, g: &FiniteSystem, p: &FiniteSystem, pairing: &Pairing, eps: f64, n_max: usize) -> Result<ItemReport> {
    let half = eps / 2.0;
    let root = Arc::new(distort_metric(p.space(), &Distortion::Power { exponent: 0.5 })?);
    let explicit = ProductSpace::explicit(f.space().clone(), g.space().clone(), root.clone())?;
    let (dbx, dby) = derived_factor_metrics(&explicit)?;
    let (checked, bad) = lemma_bound_check(&explicit, &dbx, &dby);
    let lemma = Check {
        name: "D <= D̄_X + D̄_Y".to_string(),
        verdict: if bad.is_none() { Verdict::Pass } else { Verdict::Fail },
        violations: usize::from(bad.is_some()),
        witness: bad.map(|(a, b)| format!("{} {}", pairing.label(a), pairing.label(b))),
        detail: format!("{checked} pairs checked"),
    };
    let sp = scr_members(p, &root, eps)?;
    let egf = ErrorGraph::with_metric(f, &dbx)?;
    let egg = ErrorGraph::with_metric(g, &dby)?;
    let xs = scr_members(f, &dbx, half)?;
    let ys = scr_members(g, &dby, half)?;
    let converse = equal_length_converse(
        pairing,
        "SCR_D̄X(f)xSCR_D̄Y(g) in SCR_D(fxg)",
        &egf,
        &egg,
        &xs,
        &ys,
        half,
        n_max,
        &product_set(pairing.prod, &sp),
    )?;
    Ok(ItemReport::new(5, "SCR_D(fxg) contains SCR_D̄X(f) x SCR_D̄Y(g), D = sqrt(sum)", vec![lemma, converse]))
}
