use std::f64::consts::TAU;

use reclab::catalog;
use reclab::dynamics::{circle_system, gm_system, spiral_disk_system, swap_system, CircleMap};
use reclab::nonwandering::{build_wandering_witness, locally_mixing, return_times, MixingKind};
use reclab::recurrence::{inclusion_report, scr_set, verify_product_theorem, ProductParams, SetKind, Verdict};
use reclab::MetricFamily;

#[test]
fn half_fixed_inclusions_are_strict() {
    let s = circle_system(CircleMap::HalfFixed, 360).unwrap();
    let cell = TAU / 360.0;
    let fam = MetricFamily::default_for(s.space().clone());
    assert_eq!(fam.names(), vec!["id", "pow:0.5", "pow:0.25", "minkowski"]);
    let rep = inclusion_report(&s, &fam, 2.0 * cell, 1.5 * cell, 200).unwrap();
    assert!(rep.all_hold(), "{:?}", rep.checks);
    let scr = rep.set(SetKind::Scr).unwrap();
    let mane = rep.set(SetKind::Mane).unwrap();
    let cr = rep.set(SetKind::Cr).unwrap();
    assert!(scr.len() < mane.len() && mane.len() < cr.len());
    assert_eq!(scr.members, s.fixed_points());
    assert_eq!(cr.len(), 360);
    let witness = mane.first_outside(scr).unwrap();
    assert!(!s.is_fixed(witness));
}

#[test]
fn irrational_rotation_is_strongly_recurrent() {
    let s = circle_system(CircleMap::Rotation { theta: catalog::golden_angle() }, 360).unwrap();
    let set = scr_set(&s, s.space(), TAU / 360.0).unwrap();
    assert_eq!(set.members, (0..360).collect::<Vec<_>>());
}

#[test]
fn spiral_nonwandering_sits_in_the_other_sets() {
    let s = spiral_disk_system(10, 36).unwrap();
    let eps = s.meta().unwrap().cell_diameter;
    let rep = inclusion_report(&s, &MetricFamily::default_for(s.space().clone()), eps, 0.5 * eps, 2000).unwrap();
    assert!(rep.all_hold(), "{:?}", rep.checks);
    let nw = &rep.nw_ball;
    assert!(nw.contains(0));
    for &b in s.marked("boundary").unwrap() {
        assert!(nw.contains(b));
    }
    assert!(nw.len() <= 1 + 4 * 36, "{}", nw.len());
}

#[test]
fn gm_return_times_and_witness() {
    let gm = gm_system(&[3, 5, 6], 3, 6).unwrap();
    assert_eq!(return_times(&gm.system, &gm.v, 50).unwrap().times, vec![3, 5, 6]);
    let swap = swap_system().unwrap();
    assert_eq!(return_times(&swap, &[0], 10).unwrap().times, vec![2, 4, 6, 8, 10]);

    let r = circle_system(CircleMap::Rotation { theta: TAU / 12.0 }, 12).unwrap();
    let v = locally_mixing(&r, r.space(), 0, TAU / 12.0, 120, 30).unwrap();
    assert_eq!(v.verdict, MixingKind::NotMixing);
    let w = build_wandering_witness(&r, 0, TAU / 12.0, 120, 30).unwrap();
    assert!(!w.verdict.nonwandering);
    // The witness M avoids every return time of the ball.
    assert!(w.m.iter().all(|&n| !w.verdict.returns_x.contains(n)));
}

#[test]
fn half_fixed_times_swap_report() {
    let f = catalog::entry("half-fixed-72").unwrap();
    let g = catalog::entry("swap").unwrap();
    let rep = verify_product_theorem(&f.system, &g.system, catalog::pair_eps(&f, &g), &ProductParams::default()).unwrap();
    assert!(rep.passed());
    for k in [1, 3, 4, 6] {
        assert_eq!(rep.item(k).unwrap().verdict, Verdict::Pass, "item {k}");
    }
    let mane = rep.item(3).unwrap().check("Mane_eps(f)").unwrap();
    assert_eq!(mane.verdict, Verdict::Info);
}
