mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sicut::follower::Follower;
use sicut::lp::{LpModel, LpStatus};
use sicut::master::{solve, SolveStatus, SolverConfig};
use sicut::problems::{MiblpModel, WmcigInstance};
use sicut::submodular::{ItemSet, SubmodularOracle};
use sicut::verify::brute_force_solve;

/// Solves the 3x3 system `m v = r` by Cramer's rule.
fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-9 {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut a = m;
        for row in 0..3 {
            a[row][c] = r[row];
        }
        *o = det(a) / d;
    }
    Some(out)
}

/// Best objective over all vertices of a bounded 3-variable polytope, found by
/// intersecting every triple of tight constraints.
fn vertex_optimum(cons: &[([f64; 3], f64)], obj: [f64; 3]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for a in 0..cons.len() {
        for b in a + 1..cons.len() {
            for c in b + 1..cons.len() {
                let m = [cons[a].0, cons[b].0, cons[c].0];
                let Some(v) = solve3(m, [cons[a].1, cons[b].1, cons[c].1]) else { continue };
                let feasible = cons.iter().all(|(row, rhs)| row.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>() <= rhs + 1e-7);
                if feasible {
                    let val: f64 = obj.iter().zip(&v).map(|(x, y)| x * y).sum();
                    best = Some(best.map_or(val, |b: f64| b.min(val)));
                }
            }
        }
    }
    best
}

#[test]
fn lp_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut optimal = 0;
    for _ in 0..300 {
        let obj = [1.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let mut lp = LpModel::new();
        let ids: Vec<usize> = (0..3)
            .map(|j| {
                let ub = if j == 0 { 50.0 } else { 1.0 };
                lp.add_var(format!("v{j}"), 0.0, ub, obj[j]).unwrap()
            })
            .collect();
        let mut cons = vec![
            ([-1.0, 0.0, 0.0], 0.0),
            ([1.0, 0.0, 0.0], 50.0),
            ([0.0, -1.0, 0.0], 0.0),
            ([0.0, 1.0, 0.0], 1.0),
            ([0.0, 0.0, -1.0], 0.0),
            ([0.0, 0.0, 1.0], 1.0),
        ];
        for _ in 0..rng.gen_range(1..12) {
            // cut-shaped rows: w >= c0 - g1 x1 - g2 x2
            let row = [-1.0, -(rng.gen_range(0..15) as f64), -(rng.gen_range(0..15) as f64)];
            let rhs = -(rng.gen_range(0..25) as f64);
            lp.add_row(&[(ids[0], row[0]), (ids[1], row[1]), (ids[2], row[2])], rhs).unwrap();
            cons.push((row, rhs));
        }
        if rng.gen_bool(0.3) {
            lp.add_row(&[(ids[1], 1.0), (ids[2], 1.0)], 1.0).unwrap();
            cons.push(([0.0, 1.0, 1.0], 1.0));
        }
        let sol = lp.solve().unwrap();
        match vertex_optimum(&cons, obj) {
            Some(best) => {
                assert_eq!(sol.status, LpStatus::Optimal);
                assert!((sol.objective - best).abs() < 1e-6, "{} vs {best}", sol.objective);
                optimal += 1;
            }
            None => assert_eq!(sol.status, LpStatus::Infeasible),
        }
    }
    assert!(optimal > 250);
}

#[test]
fn superiority_lists_are_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for t in 0..60 {
        let inst = if t % 2 == 0 {
            common::small_wmcig(t).to_instance("w")
        } else {
            common::small_biig(t).to_instance("b")
        };
        let o = inst.oracle.as_ref();
        let n = inst.num_items();
        for a in 0..n {
            for &b in &inst.superior[a] {
                for _ in 0..10 {
                    let s = ItemSet::from_items((0..n).filter(|&i| i != a && i != b && rng.gen_bool(0.4)));
                    let ga = o.marginal_gain(&s, a).unwrap();
                    let gb = o.marginal_gain(&s, b).unwrap();
                    assert!(gb >= ga - 1e-9, "instance {t}: {b} should beat {a}");
                }
            }
        }
    }
}

#[test]
fn interdicting_more_never_helps_the_follower() {
    for t in 0..30 {
        let base = common::small_wmcig(t);
        let mut prev = f64::INFINITY;
        for k in 0..=3 {
            let w = WmcigInstance { interdiction: k, ..base.clone() };
            let v = brute_force_solve(&w.to_instance("k")).unwrap().value;
            assert!(v <= prev, "instance {t}: k={k} raised the value");
            prev = v;
        }
    }
}

#[test]
fn results_are_consistent() {
    for t in 0..40 {
        let model = if t % 2 == 0 { common::small_wmcig(t).to_instance("w") } else { common::small_biig(t).to_instance("b") };
        for setting in ["B-S1", "ILDAE-S2", "IA-S3"] {
            let cfg = SolverConfig::with_setting(setting.parse().unwrap());
            let r = solve(&model, &cfg).unwrap();
            assert_eq!(r.status, SolveStatus::Optimal);
            assert!(r.lower <= r.upper + 1e-9);
            assert!(r.gap.abs() < 1e-6 && r.root_gap >= r.gap - 1e-9);
            let x = r.x.as_ref().unwrap();
            assert!(model.leader.is_feasible(x));
            let phi = Follower::new(model.oracle.as_ref(), &model.knapsacks).phi(x).unwrap();
            assert!((phi - r.upper).abs() < 1e-9);
            assert_eq!(r.total_cuts(), r.cuts.iter().sum::<usize>());
        }
    }
}

#[test]
fn limits_stop_the_search() {
    let inst = common::small_wmcig(3).to_instance("w");
    let none = SolverConfig { time_limit: 0.0, ..SolverConfig::default() };
    let r = solve(&inst, &none).unwrap();
    assert_eq!(r.status, SolveStatus::TimeLimit);
    assert!(r.gap >= 0.0 && r.gap <= 100.0);

    let one = SolverConfig { node_limit: Some(1), setting: "B-S1".parse().unwrap(), ..SolverConfig::default() };
    let r = solve(&inst, &one).unwrap();
    assert!(r.nodes <= 1);
    if r.status == SolveStatus::NodeLimit {
        assert!(r.lower <= r.upper);
    }
}

#[test]
fn miblp_export_covers_every_instance() {
    for t in 0..20 {
        let w = common::small_wmcig(t);
        let m = MiblpModel::from_wmcig(&w).unwrap();
        let back = MiblpModel::parse_lp_text(&m.to_lp_text()).unwrap();
        assert_eq!(back, m);
        // x, y per facility and z per customer
        assert_eq!(m.vars.len(), 2 * w.num_facilities() + w.num_customers());
        let aux = m.to_aux_text();
        assert!(aux.ends_with("@OBJSENSE\nMAX\n"));
        let follower_rows = m.rows.iter().filter(|r| r.follower).count();
        assert!(aux.contains(&format!("@NUMCONSTRS\n{follower_rows}\n")));
    }
    let oracle = common::example_wmcig().oracle();
    assert_eq!(oracle.evaluate(&ItemSet::from_items([0, 1, 2])).unwrap(), 24.0);
}
