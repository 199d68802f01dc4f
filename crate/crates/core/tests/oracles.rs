//! Structural properties of the two model oracles, checked on random sets.

mod common;

use proptest::prelude::*;
use sicut::problems::ModelInstance;
use sicut::submodular::ItemSet;

fn model(family: bool, t: u64) -> ModelInstance {
    if family {
        ModelInstance::Wmcig(common::small_wmcig(t))
    } else {
        ModelInstance::Biig(common::small_biig(t))
    }
}

fn subset(mask: u32, n: usize) -> ItemSet {
    ItemSet::from_items((0..n).filter(|i| mask >> i & 1 == 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Adding items one at a time telescopes to the set value, in any order.
    #[test]
    fn gains_telescope(family: bool, t in 0u64..200, mask: u32, rot in 0usize..12) {
        let inst = model(family, t).to_instance("p");
        let o = inst.oracle.as_ref();
        let n = inst.num_items();
        let mut items = subset(mask, n).sorted();
        let len = items.len().max(1);
        items.rotate_left(rot % len);
        let mut ev = o.evaluator();
        let mut total = 0.0;
        for &i in &items {
            total += ev.gain(i);
            ev.insert(i);
        }
        let direct = o.evaluate(&ItemSet::from_items(items.iter().copied())).unwrap();
        prop_assert!((total - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
        prop_assert_eq!(ev.value(), direct);
    }

    /// rho_i(S) >= rho_i(T) for S ⊆ T, both from fresh evaluations.
    #[test]
    fn diminishing_returns(family: bool, t in 0u64..200, a: u32, b: u32, item in 0usize..12) {
        let inst = model(family, t).to_instance("p");
        let o = inst.oracle.as_ref();
        let n = inst.num_items();
        let item = item % n;
        let small = subset(a & b & !(1 << item), n);
        let large = subset(a & !(1 << item), n);
        let gs = o.marginal_gain(&small, item).unwrap();
        let gl = o.marginal_gain(&large, item).unwrap();
        prop_assert!(gs >= gl - 1e-9, "{gs} < {gl}");
        prop_assert!(gl >= -1e-12);
    }

    /// z(T) <= z(S) + sum_{i in T \ S} rho_i(S).
    #[test]
    fn upper_bound_by_gains(family: bool, t in 0u64..200, a: u32, b: u32) {
        let inst = model(family, t).to_instance("p");
        let o = inst.oracle.as_ref();
        let n = inst.num_items();
        let s = subset(a, n);
        let tt = subset(b, n);
        let mut ev = o.evaluator();
        ev.load(&s);
        let bound = ev.value() + tt.iter().filter(|&i| !s.contains(i)).map(|i| ev.gain(i)).sum::<f64>();
        let zt = o.evaluate(&tt).unwrap();
        prop_assert!(zt <= bound + 1e-9, "{zt} > {bound}");
    }

    /// Removal undoes insertion exactly.
    #[test]
    fn insert_remove_round_trip(family: bool, t in 0u64..200, a: u32, item in 0usize..12) {
        let inst = model(family, t).to_instance("p");
        let o = inst.oracle.as_ref();
        let n = inst.num_items();
        let item = item % n;
        let s = subset(a & !(1 << item), n);
        let mut ev = o.evaluator();
        ev.load(&s);
        let before = ev.value();
        ev.insert(item);
        ev.remove(item);
        prop_assert!((ev.value() - before).abs() <= 1e-12);
    }
}

#[test]
fn model_files_round_trip() {
    for t in 0..20 {
        for fam in [true, false] {
            let m = model(fam, t);
            let text = m.to_text();
            let back = ModelInstance::parse(&text).unwrap();
            assert_eq!(back.to_text(), text);
            let (a, b) = (m.to_instance("a"), back.to_instance("b"));
            let all = ItemSet::from_items(0..a.num_items());
            assert_eq!(a.oracle.evaluate(&all).unwrap(), b.oracle.evaluate(&all).unwrap());
        }
    }
}
