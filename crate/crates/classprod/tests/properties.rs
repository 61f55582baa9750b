use std::sync::OnceLock;

use proptest::prelude::*;

use classprod::burnside::{n_count, ClassTuple};
use classprod::classes::{
    all_class_data, class_data, inverse_class, scalar_shift, ClassData, GroupSpec, Kind,
};
use classprod::decide::{decide, decide_p};

const GROUPS: [&str; 7] = [
    "GL3:3", "GU3:2", "GU3:3", "SL3:4", "SU3:5", "GL2:7", "PSL3:4",
];

fn classes() -> &'static Vec<(GroupSpec, Vec<ClassData>)> {
    static CACHE: OnceLock<Vec<(GroupSpec, Vec<ClassData>)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        GROUPS
            .iter()
            .map(|g| {
                let g: GroupSpec = g.parse().unwrap();
                (g, all_class_data(&g).unwrap())
            })
            .collect()
    })
}

/// A group index and 2 to 5 class indices (taken modulo the class count).
fn tuple_strategy() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (
        0..GROUPS.len(),
        prop::collection::vec(any::<usize>(), 2..=5),
    )
}

fn build(g: usize, ix: &[usize]) -> ClassTuple {
    let (spec, cl) = &classes()[g];
    ClassTuple::new(spec, ix.iter().map(|&i| cl[i % cl.len()].clone()).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn count_ignores_order((g, ix) in tuple_strategy(), rot in 0usize..5) {
        let t = build(g, &ix);
        let m = t.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.rotate_left(rot % m);
        order.swap(0, m - 1);
        let u = t.permuted(&order);
        prop_assert_eq!(n_count(&t).unwrap().0, n_count(&u).unwrap().0);
    }

    #[test]
    fn count_ignores_inversion((g, ix) in tuple_strategy()) {
        let t = build(g, &ix);
        let inv: Vec<_> = t.classes.iter().map(|c| inverse_class(&t.spec, &c.label).unwrap()).collect();
        let u = ClassTuple::from_labels(&t.spec, &inv).unwrap();
        prop_assert_eq!(n_count(&t).unwrap().0, n_count(&u).unwrap().0);
    }

    #[test]
    fn balanced_scalar_shift_keeps_the_count((g, ix) in tuple_strategy(), k in 0i64..64) {
        let t = build(g, &ix);
        let spec = t.spec;
        // In S and P only central scalars are allowed.
        let step = if spec.kind() == Kind::G { 1 } else { (spec.q_pm() / spec.center_s().max(1)) as i64 };
        let k = k * step;
        let mut shifted = t.classes.clone();
        for (i, s) in [(0, k), (1, -k)] {
            shifted[i] = class_data(&spec, &scalar_shift(&spec, &t.classes[i].label, s).unwrap()).unwrap();
        }
        let u = ClassTuple::new(&spec, shifted).unwrap();
        prop_assert_eq!(n_count(&t).unwrap().0, n_count(&u).unwrap().0);
    }

    #[test]
    fn decision_matches_count((g, ix) in tuple_strategy()) {
        let t = build(g, &ix);
        let n = n_count(&t).unwrap().0;
        let d = if t.spec.kind() == Kind::P { decide_p(&t) } else { decide(&t) }.unwrap();
        prop_assert_eq!(d.contains_identity, n != 0u32.into(), "{}", t);
    }
}
