use fatflow::nhtree::parse_tree;
use proptest::prelude::*;

fn random_tree(parents: &[usize], extra: Option<(usize, usize, usize)>) -> String {
    let n = parents.len() + 1;
    let mut t = format!("point {}\n", (0..n).map(|i| format!("p{i}")).collect::<Vec<_>>().join(" "));
    for (i, &p) in parents.iter().enumerate() {
        t.push_str(&format!("segment e{}: p{} p{}\n", i + 1, i + 1, p % (i + 1)));
    }
    if let Some((seg, a, b)) = extra {
        let seg = seg % parents.len() + 1;
        t.push_str(&format!("segment w: p{}\nnonsep p{} p{} via w\n", a % n, b % n, seg));
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hausdorff_fix_sets_agree(parents in proptest::collection::vec(0usize..8, 1..7)) {
        let t = parse_tree(&random_tree(&parents, None), 0).unwrap();
        prop_assert!(t.is_hausdorff());
        let (fix, fix_sim) = t.fix_sets(&t.identity());
        prop_assert_eq!(fix, fix_sim);
    }

    #[test]
    fn block_symmetric_and_fix_contained(
        parents in proptest::collection::vec(0usize..8, 1..6),
        extra in (0usize..8, 0usize..8, 0usize..8),
        x in 0usize..8,
        y in 0usize..8,
    ) {
        let Ok(t) = parse_tree(&random_tree(&parents, Some(extra)), 0) else { return Ok(()) };
        let (x, y) = (x % t.len(), y % t.len());
        let a = t.block(x, y).unwrap();
        let b = t.block(y, x).unwrap();
        prop_assert_eq!(a.distance(), b.distance());
        let pa: std::collections::BTreeSet<usize> = a.points().collect();
        let pb: std::collections::BTreeSet<usize> = b.points().collect();
        prop_assert_eq!(pa, pb);
        let (fix, fix_sim) = t.fix_sets(&t.identity());
        prop_assert!(fix.iter().all(|p| fix_sim.contains(p)));
    }
}
