//! Acceptance suite: one PASS/FAIL line per criterion, each checked at its
//! stated tolerance and runtime limit. Exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reclab::catalog::{self, CatalogEntry};
use reclab::chain_engine::{
    chain_graph, cyclic_vertices, length_profile, lyapunov_from_potential, min_cycle_cost, ErrorGraph,
};
use reclab::dynamics::{circle_system, finite_system, gm_system, product_system, swap_system, CircleMap, ProductMode};
use reclab::metric_space::{derived_factor_metrics, lemma_bound_violation, product_metric, FiniteMetricSpace, ProductSpace};
use reclab::nonwandering::{nw_set, product_nw_check, return_times};
use reclab::numtheory::{brute_solutions, simultaneous_approx, ApproxMethod};
use reclab::recurrence::{
    cr_set, inclusion_report, mane_set, scr_set, verify_product_theorem, ProductParams, Verdict,
};
use reclab::{FiniteSystem, MetricFamily};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: reclab::Error) -> String {
    e.to_string()
}

/// (1) Return times of V in g_M equal M for random M.
fn gm_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..20 {
        let density = rng.gen_range(0.005..0.3);
        let mut m: Vec<usize> = (1..=200).filter(|_| rng.gen_bool(density)).collect();
        if m.is_empty() {
            m.push(rng.gen_range(1..=200));
        }
        let max = *m.last().unwrap();
        let gm = gm_system(&m, m.len(), max).map_err(err)?;
        let rt = return_times(&gm.system, &gm.v, 200).map_err(err)?;
        ensure(rt.times == m, || format!("trial {trial}: M = {m:?}, times = {:?}", rt.times))?;
    }
    Ok("20 random sets reproduced exactly".into())
}

fn catalog_pairs() -> Result<(Vec<CatalogEntry>, Vec<(usize, usize)>), String> {
    let cat = catalog::catalog().map_err(err)?;
    let pairs = catalog::pairs(cat.len());
    Ok((cat, pairs))
}

/// (2) g_M(odds) × swap wanders at (y, 0); NW product containment on the catalog.
fn nw_strictness() -> Outcome {
    let odds: Vec<usize> = (1..=199).step_by(2).collect();
    let gm = gm_system(&odds, odds.len(), 199).map_err(err)?;
    let swap = swap_system().map_err(err)?;
    let eps = 0.2;
    let horizon = 400;
    let v = product_nw_check(&gm.system, &swap, gm.y, 0, eps, horizon).map_err(err)?;
    ensure(!v.nonwandering && v.cross_checked, || format!("(y,0) returns at {:?}", v.witness))?;
    let nf = nw_set(&gm.system, gm.system.space(), eps, horizon).map_err(err)?;
    let ng = nw_set(&swap, swap.space(), eps, horizon).map_err(err)?;
    ensure(nf.contains(gm.y) && ng.contains(0), || "y or 0 not nonwandering".into())?;

    let (cat, pairs) = catalog_pairs()?;
    for &(i, j) in &pairs {
        let (a, b) = (&cat[i], &cat[j]);
        let params = ProductParams {
            horizon: Some(a.horizon.max(b.horizon)),
            ..ProductParams::items(&[1])
        };
        let rep = verify_product_theorem(&a.system, &b.system, catalog::pair_eps(a, b), &params).map_err(err)?;
        let check = &rep.item(1).unwrap().checks[0];
        ensure(check.verdict == Verdict::Pass, || format!("{} x {}: {:?}", a.name, b.name, check))?;
    }
    Ok(format!("(y,0) wandering to horizon {horizon}; containment holds on {} catalog pairs", pairs.len()))
}

/// (3) Mañé set of half_fixed(360) and of its product with the swap.
fn mane_reproduction() -> Outcome {
    let f = circle_system(CircleMap::HalfFixed, 360).map_err(err)?;
    let cell = TAU / 360.0;
    let (eps, radius) = (2.0 * cell, 1.5 * cell);
    let m = mane_set(&f, f.space(), eps, radius).map_err(err)?;
    // Closed left semicircle: cells k with 4k in [360, 1080].
    let left: Vec<usize> = (90..=270).collect();
    ensure((179..=183).contains(&m.len()), || format!("|Mane| = {}", m.len()))?;
    ensure(left.iter().all(|&k| m.contains(k)), || "Mane misses part of the left semicircle".into())?;
    let stray: Vec<usize> = m.members.iter().copied().filter(|k| !left.contains(k)).collect();
    ensure(stray.iter().all(|&k| (88..=272).contains(&k)), || format!("Mane strays beyond eps: {stray:?}"))?;
    let g = swap_system().map_err(err)?;
    let p = product_system(&f, &g, ProductMode::Sum).map_err(err)?;
    let mp = mane_set(&p, p.space(), eps, radius).map_err(err)?;
    ensure(mp.len() == 720, || format!("|Mane(fxg)| = {}", mp.len()))?;
    Ok(format!("|Mane(f)| = {} (extra cells {stray:?}), |Mane(fxg)| = 720", m.len()))
}

/// (4) SCR product equality for two irrational rotations.
fn scr_product() -> Outcome {
    let f = circle_system(CircleMap::Rotation { theta: catalog::golden_angle() }, 360).map_err(err)?;
    let g = circle_system(CircleMap::Rotation { theta: TAU * (2f64.sqrt() - 1.0) }, 360).map_err(err)?;
    let eps = 2.0 * TAU / 360.0;
    let params = ProductParams {
        n_max: Some(1440),
        ..ProductParams::items(&[4])
    };
    let rep = verify_product_theorem(&f, &g, eps, &params).map_err(err)?;
    let item = rep.item(4).unwrap();
    for c in &item.checks {
        ensure(c.verdict == Verdict::Pass, || format!("{}: {} ({})", c.name, c.verdict, c.detail))?;
    }
    Ok(item.checks.iter().map(|c| c.detail.clone()).collect::<Vec<_>>().join("; "))
}

/// (5) CR product law on every catalog pair.
fn cr_product() -> Outcome {
    let (cat, pairs) = catalog_pairs()?;
    for &(i, j) in &pairs {
        let (a, b) = (&cat[i], &cat[j]);
        let rep = verify_product_theorem(&a.system, &b.system, catalog::pair_eps(a, b), &ProductParams::items(&[6]))
            .map_err(err)?;
        let item = rep.item(6).unwrap();
        for c in &item.checks {
            ensure(c.verdict == Verdict::Pass, || format!("{} x {}: {:?}", a.name, b.name, c))?;
        }
    }
    Ok(format!("both containments on {} pairs", pairs.len()))
}

/// (6) Inclusion chain on every catalog system.
fn inclusion_chain() -> Outcome {
    let cat = catalog::catalog().map_err(err)?;
    let mut sizes = Vec::new();
    for e in &cat {
        let fam = MetricFamily::default_for(e.system.space().clone());
        let rep = inclusion_report(&e.system, &fam, e.eps, e.radius, e.horizon).map_err(err)?;
        for c in &rep.checks {
            ensure(c.holds, || format!("{}: {} ⊄ {} at {:?}", e.name, c.subset, c.superset, c.witness))?;
        }
        sizes.push(format!(
            "{} {}",
            e.name,
            rep.sets.iter().map(|s| s.len().to_string()).collect::<Vec<_>>().join("/")
        ));
    }
    Ok(format!("zero violations; NW/GR/SCR/Mane/CR sizes: {}", sizes.join(", ")))
}

fn random_metric(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> FiniteMetricSpace {
    let coords: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
    FiniteMetricSpace::euclidean(&coords).unwrap()
}

/// (7) Derived factor metrics and the lemma bound.
fn derived_metric_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..10 {
        let nx = rng.gen_range(2..=40);
        let ny = rng.gen_range(2..=10);
        let dx = Arc::new(random_metric(&mut rng, nx, 2));
        let dy = Arc::new(random_metric(&mut rng, ny, 2));
        let joint = Arc::new(random_metric(&mut rng, nx * ny, 3));
        let prod = ProductSpace::explicit(dx.clone(), dy.clone(), joint).map_err(err)?;
        let (dbx, dby) = derived_factor_metrics(&prod).map_err(err)?;
        ensure(lemma_bound_violation(&prod, &dbx, &dby).is_none(), || format!("trial {trial}: lemma bound fails"))?;

        let sum = product_metric(&dx, &dy).map_err(err)?;
        let (sx, sy) = derived_factor_metrics(&sum).map_err(err)?;
        for (orig, derived) in [(&dx, &sx), (&dy, &sy)] {
            for a in 0..orig.len() {
                for b in 0..orig.len() {
                    let (u, v) = (orig.dist(a, b), derived.dist(a, b));
                    ensure((u - v).abs() <= 1e-12, || format!("trial {trial}: D̄ differs at ({a},{b}): {u} vs {v}"))?;
                }
            }
        }
    }
    Ok("10 explicit products".into())
}

/// (8) Simultaneous approximation for √2, √3.
fn number_theory() -> Outcome {
    let (a, b, eps) = (2f64.sqrt(), 3f64.sqrt(), 1e-3);
    let brute = simultaneous_approx(a, b, eps, 10, 1_000_000, ApproxMethod::Brute).map_err(err)?;
    ensure(brute.solutions.len() >= 10 && brute.verify(), || format!("{:?}", brute.solutions))?;
    let chain = simultaneous_approx(a, b, eps, 10, 1_000_000, ApproxMethod::ChainDerived).map_err(err)?;
    ensure(!chain.solutions.is_empty() && chain.verify(), || format!("chain-derived: {:?}", chain.solutions))?;
    let oracle = brute_solutions(a, b, eps, *chain.solutions.last().unwrap());
    ensure(chain.solutions.iter().all(|n| oracle.binary_search(n).is_ok()), || "chain solution outside brute set".into())?;
    Ok(format!(
        "brute {:?}..; chain-derived {} solutions from cycle length {}",
        &brute.solutions[..3],
        chain.solutions.len(),
        chain.solutions[0]
    ))
}

/// Random system on a shortest-path metric with small integer weights, so
/// every cost is an exact integer.
fn random_exact_system(rng: &mut ChaCha8Rng) -> FiniteSystem {
    let n = rng.gen_range(2..=12);
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.gen_range(1..=6) as f64;
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let space = Arc::new(FiniteMetricSpace::from_matrix(&d).unwrap());
    let map = (0..n).map(|_| rng.gen_range(0..n)).collect();
    finite_system(space, map).unwrap()
}

struct Exhaustive<'a> {
    s: &'a FiniteSystem,
}

impl Exhaustive<'_> {
    fn w(&self, u: usize, v: usize) -> f64 {
        self.s.space().dist(self.s.image(u), v)
    }

    /// Floyd–Warshall over chains of length >= 1.
    fn all_pairs(&self) -> Vec<Vec<f64>> {
        let n = self.s.len();
        let mut c: Vec<Vec<f64>> = (0..n).map(|u| (0..n).map(|v| self.w(u, v)).collect()).collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let t = c[i][k] + c[k][j];
                    if t < c[i][j] {
                        c[i][j] = t;
                    }
                }
            }
        }
        c
    }

    /// Lengths `1..=n_max` of strong eps-cycles through `x`, by enumerating walks.
    fn lengths(&self, x: usize, eps: f64, n_max: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![(x, 0usize, 0.0f64)];
        while let Some((u, k, c)) = stack.pop() {
            if k == n_max {
                continue;
            }
            for v in 0..self.s.len() {
                let t = c + self.w(u, v);
                if t <= eps {
                    if v == x {
                        out.insert(k + 1);
                    }
                    stack.push((v, k + 1, t));
                }
            }
        }
        out
    }

    /// x reaches itself in >= 1 step of error <= eps.
    fn cr(&self, eps: f64) -> Vec<usize> {
        let n = self.s.len();
        let mut r: Vec<Vec<bool>> = (0..n).map(|u| (0..n).map(|v| self.w(u, v) <= eps).collect()).collect();
        for k in 0..n {
            for i in 0..n {
                if r[i][k] {
                    for j in 0..n {
                        if r[k][j] {
                            r[i][j] = true;
                        }
                    }
                }
            }
        }
        (0..n).filter(|&x| r[x][x]).collect()
    }

    fn return_times(&self, u: &[usize], horizon: usize) -> Vec<usize> {
        (1..=horizon)
            .filter(|&n| u.iter().any(|&z| u.contains(&self.s.iterate(z, n))))
            .collect()
    }
}

/// (9) Engine results against exhaustive enumeration.
fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut compared = 0usize;
    for trial in 0..50 {
        let s = random_exact_system(&mut rng);
        let eg = ErrorGraph::new(&s);
        let ex = Exhaustive { s: &s };
        let n = s.len();
        let eps = rng.gen_range(0..=4) as f64;
        let fw = ex.all_pairs();
        for x in 0..n {
            let cutoff = 1e9;
            let (c, cert) = min_cycle_cost(&eg, x, cutoff);
            ensure(c == fw[x][x], || format!("trial {trial}: min cycle at {x}: {c} vs {}", fw[x][x]))?;
            let cert = cert.ok_or("missing certificate")?;
            ensure(cert.total_cost == c && cert.start() == x && cert.end() == x && cert.verify(&eg), || {
                format!("trial {trial}: bad certificate at {x}")
            })?;
            let prof = length_profile(&eg, x, eps, 6, false).map_err(err)?;
            let want = ex.lengths(x, eps, 6);
            ensure(prof.lengths.iter().copied().collect::<BTreeSet<_>>() == want, || {
                format!("trial {trial}: profile at {x}: {:?} vs {want:?}", prof.lengths)
            })?;
            let u = s.space().ball(x, eps);
            let rt = return_times(&s, &u, 3 * n).map_err(err)?;
            ensure(rt.times == ex.return_times(&u, 3 * n), || format!("trial {trial}: return times at {x}"))?;
            compared += 1;
        }
        let cr = cr_set(&s, s.space(), eps).map_err(err)?;
        ensure(cr.members == ex.cr(eps), || format!("trial {trial}: CR {:?} vs {:?}", cr.members, ex.cr(eps)))?;
        let graph_cr = cyclic_vertices(&chain_graph(&eg, eps).map_err(err)?);
        ensure(graph_cr == cr.members, || "cyclic vertices differ".into())?;
        let scr = scr_set(&s, s.space(), eps).map_err(err)?;
        let want: Vec<usize> = (0..n).filter(|&x| fw[x][x] <= eps).collect();
        ensure(scr.members == want, || format!("trial {trial}: SCR {:?} vs {want:?}", scr.members))?;
    }
    Ok(format!("50 systems, {compared} base points"))
}

/// (10) Lyapunov functions from potentials on the catalog.
fn lyapunov_properties() -> Outcome {
    let cat = catalog::catalog().map_err(err)?;
    let mut count = 0;
    for e in &cat {
        let s = &e.system;
        let eg = ErrorGraph::new(s);
        let n = s.len();
        let cap = s.space().diameter().max(e.eps);
        for k in 0..5 {
            let p = k * (n - 1) / 4;
            let ly = lyapunov_from_potential(&eg, p, cap).map_err(err)?;
            let th = &ly.theta;
            for y in 0..n {
                ensure(th[s.image(y)] <= th[y], || format!("{}: θ increases at {y} (base {p})", e.name))?;
                for z in 0..n {
                    if th[y] < cap && th[z] < cap {
                        let d = s.space().dist(y, z);
                        ensure(th[y] - th[z] <= d + 1e-12, || format!("{}: θ not 1-Lipschitz at ({y},{z})", e.name))?;
                    }
                }
            }
            let (c, _) = min_cycle_cost(&eg, p, cap);
            ensure(th[p] == c.min(cap), || format!("{}: h_p(p) = {} but min cycle cost {c}", e.name, th[p]))?;
            count += 1;
        }
    }
    Ok(format!("{count} potentials"))
}

fn main() {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("1 g_M return times equal M", Duration::from_secs(5), gm_exactness),
        ("2 NW product strictness and containment", Duration::from_secs(10), nw_strictness),
        ("3 Mane reproduction", Duration::from_secs(30), mane_reproduction),
        ("4 SCR product equality", Duration::from_secs(120), scr_product),
        ("5 CR product law", Duration::from_secs(60), cr_product),
        ("6 inclusion chain", Duration::from_secs(60), inclusion_chain),
        ("7 derived-metric lemma", Duration::from_secs(10), derived_metric_lemma),
        ("8 simultaneous approximation", Duration::from_secs(30), number_theory),
        ("9 oracle equivalence", Duration::from_secs(60), oracle_equivalence),
        ("10 Lyapunov properties", Duration::from_secs(30), lyapunov_properties),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > limit => Err(format!("{detail}; took {took:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name} [{took:.2?}]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} [{took:.2?}]: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
