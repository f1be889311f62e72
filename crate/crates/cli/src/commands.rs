use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use reclab::catalog;
use reclab::chain_engine::{min_cycle_cost, ErrorGraph};
use reclab::dynamics::{
    circle_system, gm_system, product_system, spiral_disk_system, spiral_disk_system_with_drift, CircleMap,
    ProductMode,
};
use reclab::io::{membership_csv, SystemFile};
use reclab::metric_space::{validate_metric_seeded, FamilyMember};
use reclab::nonwandering::{
    build_wandering_witness, default_window, locally_mixing, matched_nw_set, nw_member, nw_set, product_nw_check,
    return_times,
};
use reclab::numtheory::{brute_solutions, simultaneous_approx, ApproxMethod};
use reclab::recurrence::{
    cr_set, gr_approx, inclusion_report, mane_set, scr_set, verify_product_theorem, MembershipSet, ProductParams,
    Verdict,
};
use reclab::{FiniteMetricSpace, FiniteSystem, MetricFamily};
use serde_json::{json, Value};

use crate::args::*;
use crate::config::{input, need, Outcome};
use crate::output::{Loader, Report};
use crate::recheck;

const DEFAULT_HORIZON: usize = 200;

/// `0-3, 7, 9-12`.
pub fn ranges(members: &[usize]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < members.len() {
        let mut j = i;
        while j + 1 < members.len() && members[j + 1] == members[j] + 1 {
            j += 1;
        }
        parts.push(if i == j {
            members[i].to_string()
        } else {
            format!("{}-{}", members[i], members[j])
        });
        i = j + 1;
    }
    if parts.is_empty() {
        "(none)".into()
    } else {
        parts.join(", ")
    }
}

/// A float, `sqrt(k)` or `sqrtk`.
pub fn parse_real(s: &str) -> Outcome<f64> {
    let t = s.trim();
    let inner = t
        .strip_prefix("sqrt(")
        .and_then(|r| r.strip_suffix(')'))
        .or_else(|| t.strip_prefix("sqrt"));
    let v = match inner {
        Some(r) => r.trim().parse::<f64>().ok().filter(|v| *v >= 0.0).map(f64::sqrt),
        None => t.parse::<f64>().ok(),
    };
    v.filter(|v| v.is_finite()).ok_or_else(|| input(format!("cannot read {s:?} as a real number")))
}

/// Radians, or `golden` (2π(√5−1)/2) or `sqrt2` (2π(√2−1)).
pub fn parse_angle(s: &str) -> Outcome<f64> {
    match s.trim() {
        "golden" => Ok(catalog::golden_angle()),
        "sqrt2" => Ok(TAU * (2f64.sqrt() - 1.0)),
        other => parse_real(other),
    }
}

fn check_point(system: &FiniteSystem, x: usize) -> Outcome<()> {
    if x >= system.len() {
        return Err(input(format!("point {x} out of range for {} points", system.len())));
    }
    Ok(())
}

fn positive(v: f64, name: &str) -> Outcome<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(input(format!("--{name} must be positive, got {v}")))
    }
}

fn nonnegative(v: f64, name: &str) -> Outcome<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(input(format!("--{name} must be nonnegative, got {v}")))
    }
}

pub fn space_validate(a: &SpaceValidateArgs, l: &mut Loader) -> Outcome<Report> {
    let path = need(&a.file, "file")?;
    let space = l.space(&path)?;
    let rep = validate_metric_seeded(&space, a.seed.unwrap_or(0));
    let mut text = format!(
        "{} points, metric {}: {}\n",
        space.len(),
        space.kind(),
        if rep.is_valid() { "valid" } else { "INVALID" }
    );
    let _ = writeln!(
        text,
        "{} triples checked ({})",
        rep.triples_checked,
        if rep.exhaustive { "exhaustive" } else { "sampled" }
    );
    for v in rep.violations.iter().take(10) {
        let _ = writeln!(text, "violation: {v} by {:e}", v.excess);
    }
    let ok = rep.is_valid();
    let result = json!({
        "points": space.len(),
        "metric": space.kind(),
        "diameter": space.diameter(),
        "valid": ok,
        "validation": rep,
    });
    Ok(Report::new(result, text, ok))
}

pub fn system_build(a: &SystemBuildArgs, l: &mut Loader) -> Outcome<Report> {
    let kind = need(&a.kind, "kind")?;
    let mut system = match kind {
        SystemKind::Rotation => {
            let theta = parse_angle(&need(&a.theta, "theta")?)?;
            circle_system(CircleMap::Rotation { theta }, need(&a.n, "n")?)?
        }
        SystemKind::Doubling => circle_system(CircleMap::Doubling, need(&a.n, "n")?)?,
        SystemKind::HalfFixed => circle_system(CircleMap::HalfFixed, need(&a.n, "n")?)?,
        SystemKind::Spiral => {
            let (n_r, n_a) = (need(&a.n_r, "n-r")?, need(&a.n_a, "n-a")?);
            match a.drift {
                Some(d) => spiral_disk_system_with_drift(n_r, n_a, d)?,
                None => spiral_disk_system(n_r, n_a)?,
            }
        }
        SystemKind::Gm => {
            let max = *a.m.iter().max().ok_or_else(|| input("--m needs at least one element"))?;
            let i_max = a.i_max.unwrap_or(a.m.len());
            gm_system(&a.m, i_max, a.tail_len.unwrap_or(max))?.system
        }
        SystemKind::Product => {
            let f = l.system(&need(&a.f, "f")?)?;
            let g = l.system(&need(&a.g, "g")?)?;
            product_system(&f, &g, ProductMode::Sum)?
        }
        SystemKind::Catalog => catalog::entry(&need(&a.entry, "entry")?)?.system,
    };
    if let Some(name) = &a.name {
        system = system.with_name(name.clone());
    }
    let text = format!(
        "system {}: {} points, {} fixed, {} periodic, metric {}\n",
        system.name(),
        system.len(),
        system.fixed_points().len(),
        system.periodic_points().len(),
        system.space().kind()
    );
    Ok(Report::new(SystemFile::from_system(&system)?, text, true))
}

fn load_metric(system: &FiniteSystem, path: Option<&Path>, l: &mut Loader) -> Outcome<Arc<FiniteMetricSpace>> {
    match path {
        None => Ok(system.space().clone()),
        Some(p) => {
            let m = l.space(p)?;
            if m.len() != system.len() {
                return Err(input(format!(
                    "{}: metric has {} points, system has {}",
                    p.display(),
                    m.len(),
                    system.len()
                )));
            }
            Ok(Arc::new(m))
        }
    }
}

pub fn chain_mincycle(a: &MincycleArgs, l: &mut Loader) -> Outcome<Report> {
    let system = l.system(&need(&a.system, "system")?)?;
    let metric = load_metric(&system, a.metric.as_deref(), l)?;
    let x = need(&a.point, "point")?;
    check_point(&system, x)?;
    let cutoff = match a.cutoff {
        Some(c) => nonnegative(c, "cutoff")?,
        None => f64::INFINITY,
    };
    let eg = ErrorGraph::with_metric(&system, &metric)?;
    let (cost, cert) = min_cycle_cost(&eg, x, cutoff);
    let verified = cert.as_ref().map_or(true, |c| c.verify(&eg));
    let text = match &cert {
        Some(c) => format!(
            "closed chain at {x}: length {}, total cost {}, max step {}\npoints: {:?}\n",
            c.len(),
            c.total_cost,
            c.max_step,
            c.points
        ),
        None => format!("no closed chain at {x} within cutoff {cutoff}\n"),
    };
    let result = json!({
        "system": system.name(),
        "point": x,
        "cutoff": cutoff.is_finite().then_some(cutoff),
        "cost": cost.is_finite().then_some(cost),
        "certificate": cert,
        "verified": verified,
    });
    Ok(Report::new(result, text, verified))
}

fn family_for(metric: &Arc<FiniteMetricSpace>, names: &[String]) -> Outcome<MetricFamily> {
    if names.is_empty() {
        Ok(MetricFamily::default_for(metric.clone()))
    } else {
        Ok(MetricFamily::from_names(metric.clone(), names)?)
    }
}

fn compute_set(
    a: &RecurComputeArgs,
    system: &FiniteSystem,
    metric: &Arc<FiniteMetricSpace>,
    members: &dyn Fn() -> Outcome<Vec<FamilyMember>>,
) -> Outcome<MembershipSet> {
    let kind = need(&a.kind, "kind")?;
    let eps = nonnegative(need(&a.eps, "eps")?, "eps")?;
    let d = metric.as_ref();
    Ok(match kind {
        RecurKind::Cr => cr_set(system, d, eps)?,
        RecurKind::Scr => scr_set(system, d, eps)?,
        RecurKind::Mane => {
            let radius = nonnegative(a.radius.unwrap_or(0.75 * eps), "radius")?;
            mane_set(system, d, eps, radius)?
        }
        RecurKind::Gr => gr_approx(system, &family_for(metric, &a.family)?, eps)?,
        RecurKind::Nw => {
            let horizon = a.horizon.unwrap_or(DEFAULT_HORIZON);
            if a.matched {
                matched_nw_set(system, &members()?, eps, horizon)?
            } else {
                nw_set(system, d, eps, horizon)?
            }
        }
    })
}

fn set_report(set: &MembershipSet, system: &FiniteSystem, problems: Option<Vec<String>>) -> Outcome<Report> {
    let mut text = format!(
        "{} on {} (metric {}, eps {}): {} of {} points\nmembers: {}\n",
        set.kind,
        set.system,
        set.metric,
        set.eps,
        set.len(),
        set.points,
        ranges(&set.members)
    );
    let mut result = serde_json::to_value(set).expect("sets serialize");
    let mut ok = true;
    if let Some(problems) = problems {
        ok = problems.is_empty();
        for p in &problems {
            let _ = writeln!(text, "recheck: {p}");
        }
        if ok {
            text.push_str("recheck: every point agrees\n");
        }
        result["recheck"] = json!({ "agrees": ok, "problems": problems });
    }
    let mut report = Report::new(result, text, ok);
    report.csv = Some(membership_csv(system.space(), set)?);
    Ok(report)
}

pub fn recur_compute(a: &RecurComputeArgs, recheck_flag: bool, l: &mut Loader) -> Outcome<Report> {
    let system = l.system(&need(&a.system, "system")?)?;
    let metric = load_metric(&system, a.metric.as_deref(), l)?;
    let members = || -> Outcome<Vec<FamilyMember>> { Ok(family_for(&metric, &a.family)?.members()?) };
    let set = compute_set(a, &system, &metric, &members)?;
    let problems = if recheck_flag {
        Some(recheck::validate(&set, &system, &metric, &members()?)?)
    } else {
        None
    };
    set_report(&set, &system, problems)
}

/// Reloads the inputs named in a set's provenance, checks their hashes,
/// recomputes the set, and validates it independently.
pub fn recur_recheck(a: &RecheckArgs, l: &mut Loader) -> Outcome<Report> {
    let path = need(&a.set, "set")?;
    let value = l.json(&path)?;
    let set: MembershipSet =
        serde_json::from_value(value.clone()).map_err(|e| input(format!("{}: not a set: {e}", path.display())))?;
    let prov = &value["provenance"];
    if prov["command"] != "recur compute" {
        return Err(input(format!("{}: provenance does not come from `recur compute`", path.display())));
    }
    let args: RecurComputeArgs = serde_json::from_value(prov["config"].clone())
        .map_err(|e| input(format!("{}: provenance config: {e}", path.display())))?;
    let mut problems = Vec::new();
    let mut fresh = Loader::default();
    let system = fresh.system(&need(&args.system, "system")?)?;
    let metric = load_metric(&system, args.metric.as_deref(), &mut fresh)?;
    for (old, new) in prov["inputs"].as_array().into_iter().flatten().zip(&fresh.inputs) {
        if old["sha256"] != new.sha256.as_str() {
            problems.push(format!("input {} changed since the set was emitted", new.path));
        }
    }
    l.inputs.extend(fresh.inputs);
    let members = || -> Outcome<Vec<FamilyMember>> { Ok(family_for(&metric, &args.family)?.members()?) };
    let again = compute_set(&args, &system, &metric, &members)?;
    if again.members != set.members || again.kind != set.kind {
        problems.push(format!(
            "recomputed {} has {} members, file has {}",
            again.kind,
            again.len(),
            set.len()
        ));
    }
    problems.extend(recheck::validate(&set, &system, &metric, &members()?)?);
    set_report(&set, &system, Some(problems))
}

fn product_text(rep: &reclab::recurrence::ProductReport) -> String {
    let mut text = format!(
        "{} x {} at eps {} (radius {}, horizon {}, n_max {})\n",
        rep.f, rep.g, rep.eps, rep.radius, rep.horizon, rep.n_max
    );
    for item in &rep.items {
        let _ = writeln!(text, "({}) {:<13} {}", item.item, item.verdict.to_string(), item.title);
        for c in &item.checks {
            let _ = write!(text, "    {:<13} {}", c.verdict.to_string(), c.name);
            if c.violations > 0 {
                let _ = write!(text, " [{} violations", c.violations);
                if let Some(w) = &c.witness {
                    let _ = write!(text, ", e.g. {w}");
                }
                text.push(']');
            }
            if !c.detail.is_empty() {
                let _ = write!(text, ": {}", c.detail);
            }
            text.push('\n');
        }
    }
    text
}

pub fn verify_product(a: &VerifyProductArgs, l: &mut Loader) -> Outcome<Report> {
    let f = l.system(&need(&a.f, "f")?)?;
    let g = l.system(&need(&a.g, "g")?)?;
    let eps = positive(need(&a.eps, "eps")?, "eps")?;
    let mut params = ProductParams {
        radius: a.radius,
        horizon: a.horizon,
        n_max: a.n_max,
        family: (!a.family.is_empty()).then(|| a.family.clone()),
        ..ProductParams::default()
    };
    if !a.items.is_empty() {
        params.items = a.items.clone();
    }
    let rep = verify_product_theorem(&f, &g, eps, &params)?;
    Ok(Report::new(&rep, product_text(&rep), rep.passed()))
}

fn neighborhood(system: &FiniteSystem, points: &[usize], point: Option<usize>, eps: Option<f64>, marked: Option<&str>) -> Outcome<Vec<usize>> {
    if !points.is_empty() {
        for &x in points {
            check_point(system, x)?;
        }
        let mut u = points.to_vec();
        u.sort_unstable();
        u.dedup();
        return Ok(u);
    }
    if let Some(name) = marked {
        return system
            .marked(name)
            .map(<[usize]>::to_vec)
            .ok_or_else(|| input(format!("system has no marked set {name:?}")));
    }
    let x = point.ok_or_else(|| input("give --points, --marked, or --point with --eps"))?;
    check_point(system, x)?;
    Ok(system.space().ball(x, nonnegative(eps.unwrap_or(0.0), "eps")?))
}

pub fn nw_return_times(a: &ReturnTimesArgs, l: &mut Loader) -> Outcome<Report> {
    let system = l.system(&need(&a.system, "system")?)?;
    let u = neighborhood(&system, &a.points, a.point, a.eps, a.marked.as_deref())?;
    let rt = return_times(&system, &u, a.horizon.unwrap_or(DEFAULT_HORIZON))?;
    let text = format!(
        "return times of {} points up to {}: {}\n",
        rt.neighborhood.len(),
        rt.horizon,
        ranges(&rt.times)
    );
    let mut csv = String::from("n,returns\n");
    for n in 1..=rt.horizon {
        let _ = writeln!(csv, "{n},{}", u8::from(rt.contains(n)));
    }
    let mut report = Report::new(&rt, text, true);
    report.csv = Some(csv);
    Ok(report)
}

pub fn nw_check(a: &NwCheckArgs, l: &mut Loader) -> Outcome<Report> {
    let f = l.system(&need(&a.system, "system")?)?;
    let x = need(&a.point, "point")?;
    check_point(&f, x)?;
    let eps = nonnegative(need(&a.eps, "eps")?, "eps")?;
    let horizon = a.horizon.unwrap_or(DEFAULT_HORIZON);
    if let Some(gp) = &a.g {
        let g = l.system(gp)?;
        let y = need(&a.point_g, "point-g")?;
        check_point(&g, y)?;
        let v = product_nw_check(&f, &g, x, y, eps, horizon)?;
        let text = format!(
            "({x}, {y}) in {} x {}: {} up to {horizon}{}\n",
            f.name(),
            g.name(),
            if v.nonwandering { "nonwandering" } else { "wandering" },
            v.witness.map_or(String::new(), |n| format!(", first common return {n}"))
        );
        let ok = v.cross_checked;
        return Ok(Report::new(&v, text, ok));
    }
    let first = nw_member(&f, f.space(), x, eps, horizon);
    let mixing = locally_mixing(&f, f.space(), x, eps, horizon, a.window.unwrap_or(default_window(horizon)))?;
    let text = format!(
        "point {x} of {}: {} up to {horizon}{}; local mixing: {:?}\n",
        f.name(),
        if first.is_some() { "nonwandering" } else { "wandering" },
        first.map_or(String::new(), |n| format!(" (first return {n})")),
        mixing.verdict
    );
    let result = json!({
        "system": f.name(),
        "point": x,
        "eps": eps,
        "horizon": horizon,
        "nonwandering": first.is_some(),
        "first_return": first,
        "mixing": mixing,
    });
    Ok(Report::new(result, text, true))
}

pub fn nw_witness(a: &WitnessArgs, l: &mut Loader) -> Outcome<Report> {
    let f = l.system(&need(&a.system, "system")?)?;
    let x = need(&a.point, "point")?;
    check_point(&f, x)?;
    let eps = nonnegative(need(&a.eps, "eps")?, "eps")?;
    let horizon = a.horizon.unwrap_or(DEFAULT_HORIZON);
    let i_max = a.i_max.unwrap_or(30);
    if !a.build_gm {
        let mixing = locally_mixing(&f, f.space(), x, eps, horizon, default_window(horizon))?;
        let mut m = mixing.returns.complement();
        m.truncate(i_max.max(1));
        let text = format!("local mixing at {x}: {:?}; non-return times: {}\n", mixing.verdict, ranges(&m));
        return Ok(Report::new(json!({ "mixing": mixing, "m": m }), text, true));
    }
    let w = build_wandering_witness(&f, x, eps, horizon, i_max)?;
    let ok = !w.verdict.nonwandering && w.verdict.cross_checked;
    let text = format!(
        "M = {{{}}}; ({x}, (1,0)) in {} x g_M is {} up to {horizon}\n",
        ranges(&w.m),
        f.name(),
        if w.verdict.nonwandering { "NONWANDERING (witness failed)" } else { "wandering" }
    );
    let result = json!({
        "mixing": w.mixing,
        "m": w.m,
        "gm": SystemFile::from_system(&w.gm.system)?,
        "y": w.gm.y,
        "v": w.gm.v,
        "verdict": w.verdict,
    });
    Ok(Report::new(result, text, ok))
}

pub fn numtheory_approx(a: &ApproxArgs, recheck_flag: bool) -> Outcome<Report> {
    let alpha = parse_real(&need(&a.alpha, "alpha")?)?;
    let beta = parse_real(&need(&a.beta, "beta")?)?;
    let eps = positive(need(&a.eps, "eps")?, "eps")?;
    let method: ApproxMethod = a.method.as_deref().unwrap_or("chain-derived").parse()?;
    let count = a.count.unwrap_or(10);
    let n_cap = a.n_cap.unwrap_or(1_000_000);
    let sol = simultaneous_approx(alpha, beta, eps, count, n_cap, method)?;
    let mut ok = sol.verify();
    let mut text = format!(
        "{} solutions with |n alpha|, |n beta| <= {eps} ({:?}, cap {n_cap}){}\n",
        sol.solutions.len(),
        sol.method,
        if sol.partial { ", fewer than requested" } else { "" }
    );
    for &n in &sol.solutions {
        let _ = writeln!(text, "{n}\t{:.3e}", reclab::numtheory::approx_error(alpha, beta, n));
    }
    let mut result = serde_json::to_value(&sol).expect("solutions serialize");
    result["verified"] = json!(ok);
    if recheck_flag {
        let top = sol.solutions.last().copied().unwrap_or(0);
        let brute = brute_solutions(alpha, beta, eps, top);
        let inside = sol.solutions.iter().all(|n| brute.binary_search(n).is_ok());
        ok &= inside;
        let _ = writeln!(text, "recheck: {} brute-force solutions up to {top}; all reported found: {inside}", brute.len());
        result["recheck"] = json!({ "brute_up_to": top, "brute_count": brute.len(), "subset_of_brute": inside });
    }
    Ok(Report::new(result, text, ok))
}

pub fn verify_all(a: &VerifyAllArgs) -> Outcome<Report> {
    let cat = catalog::catalog()?;
    let items = if a.items.is_empty() { vec![1, 2, 3, 4, 5, 6] } else { a.items.clone() };
    let pairs = catalog::pairs(cat.len());
    let reports: Vec<reclab::Result<_>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (f, g) = (&cat[i], &cat[j]);
            let params = ProductParams {
                horizon: a.horizon,
                ..ProductParams::items(&items)
            };
            verify_product_theorem(&f.system, &g.system, catalog::pair_eps(f, g), &params)
        })
        .collect();
    let inclusions: Vec<reclab::Result<_>> = cat
        .par_iter()
        .map(|e| {
            let fam = MetricFamily::default_for(e.system.space().clone());
            inclusion_report(&e.system, &fam, e.eps, e.radius, a.horizon.unwrap_or(e.horizon))
        })
        .collect();

    let mut tally: BTreeMap<u8, BTreeMap<String, usize>> = BTreeMap::new();
    let mut rows = Vec::new();
    let mut text = String::from("pair");
    let width = cat.iter().map(|e| e.name.len()).max().unwrap_or(4) * 2 + 3;
    text = format!("{text:<width$}");
    for k in &items {
        let _ = write!(text, " ({k})         ");
    }
    text.push('\n');
    let mut ok = true;
    for (&(i, j), rep) in pairs.iter().zip(reports) {
        let rep = rep?;
        ok &= rep.passed();
        let label = format!("{} x {}", cat[i].name, cat[j].name);
        let _ = write!(text, "{label:<width$}");
        for item in &rep.items {
            let _ = write!(text, " {:<13}", item.verdict.to_string());
            *tally.entry(item.item).or_default().entry(item.verdict.to_string()).or_default() += 1;
        }
        text.push('\n');
        let failing: Vec<Value> = rep
            .items
            .iter()
            .flat_map(|it| it.checks.iter())
            .filter(|c| c.verdict == Verdict::Fail)
            .map(|c| json!({ "check": c.name, "violations": c.violations, "witness": c.witness }))
            .collect();
        rows.push(json!({
            "f": rep.f,
            "g": rep.g,
            "eps": rep.eps,
            "items": rep.items.iter().map(|it| json!({ "item": it.item, "verdict": it.verdict })).collect::<Vec<_>>(),
            "failing_checks": failing,
        }));
    }
    text.push_str("\ninclusion chain NW <= GR_approx <= SCR <= Mane <= CR\n");
    let mut chain_rows = Vec::new();
    for inc in inclusions {
        let inc = inc?;
        ok &= inc.all_hold();
        let sizes: Vec<usize> = inc.sets.iter().map(MembershipSet::len).collect();
        let _ = writeln!(
            text,
            "{:<16} {} sizes {:?}",
            inc.system,
            if inc.all_hold() { "PASS" } else { "FAIL" },
            sizes
        );
        chain_rows.push(json!({
            "system": inc.system,
            "eps": inc.eps,
            "holds": inc.all_hold(),
            "sizes": sizes,
            "checks": inc.checks,
        }));
    }
    text.push_str("\nsummary per item\n");
    for (k, counts) in &tally {
        let parts: Vec<String> = counts.iter().map(|(v, c)| format!("{c} {v}")).collect();
        let _ = writeln!(text, "({k}) {}", parts.join(", "));
    }
    let result = json!({
        "catalog": catalog::NAMES,
        "items": items,
        "pairs": rows,
        "inclusions": chain_rows,
        "summary": tally,
        "passed": ok,
    });
    Ok(Report::new(result, text, ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_formatting() {
        assert_eq!(ranges(&[0, 1, 2, 3, 7, 9, 10]), "0-3, 7, 9-10");
        assert_eq!(ranges(&[]), "(none)");
    }

    #[test]
    fn reals_and_angles() {
        assert_eq!(parse_real("sqrt(2)").unwrap(), 2f64.sqrt());
        assert_eq!(parse_real("sqrt3").unwrap(), 3f64.sqrt());
        assert_eq!(parse_real("0.5").unwrap(), 0.5);
        assert!(parse_real("sqrt(-1)").is_err());
        assert!(parse_real("pi").is_err());
        assert_eq!(parse_angle("golden").unwrap(), catalog::golden_angle());
    }
}
