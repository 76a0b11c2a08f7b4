use fatflow::assembly::assemble;
use fatflow::blueprint::{circle_blueprint, parse_blueprint};
use fatflow::lozenge::{
    bfs_chain_length, build_fat_tree, skew_chain_connected, skew_partner, skew_partner_inverse, SkewConnection,
    SkewOrbit, BFS_DEPTH,
};
use num_rational::Rational64;
use proptest::prelude::*;

fn orbit() -> impl Strategy<Value = SkewOrbit> {
    (-20i64..20, 2i64..9, 1i64..8).prop_filter_map("outside strip", |(n, den, k)| {
        let d = Rational64::new(n, den);
        SkewOrbit::new(d, d + Rational64::new(k, 8)).ok()
    })
}

proptest! {
    #[test]
    fn partner_commutes_with_shift(o in orbit(), n in -5i64..5) {
        prop_assert_eq!(skew_partner(o.shift(n)), skew_partner(o).shift(n));
        prop_assert_eq!(skew_partner(skew_partner(o)), o.shift(1));
        prop_assert_eq!(skew_partner_inverse(skew_partner(o)), o);
    }

    #[test]
    fn partner_stays_in_strip(o in orbit()) {
        let p = skew_partner(o);
        prop_assert!(SkewOrbit::new(p.d(), p.c()).is_ok());
    }

    #[test]
    fn criterion_agrees_with_search(a in orbit(), b in orbit(), n in -3i64..=3, pick in 0u8..3) {
        let b = match pick {
            0 => a.shift(n),
            1 => skew_partner(a).shift(n),
            _ => b,
        };
        let crit = skew_chain_connected(a, b);
        let bfs = bfs_chain_length(a, b, BFS_DEPTH);
        prop_assert_eq!(crit.length(), bfs);
        if let Some(len) = bfs {
            prop_assert_eq!(matches!(crit, SkewConnection::Even { .. }), len % 2 == 0);
        }
    }
}

#[test]
fn figure_eight_ball_sizes() {
    let bp = parse_blueprint(include_str!("../../../data/figure8.fg")).unwrap();
    assemble(&bp).unwrap();
    for r in 0..=4u32 {
        let p = build_fat_tree(&bp, r as i64).unwrap();
        assert!(p.is_tree() && p.labels_alternate());
        assert_eq!(p.vertices.len(), 1 + 4 * (3usize.pow(r) - 1) / 2);
    }
}

#[test]
fn circle_patch_is_a_line() {
    let p = build_fat_tree(&circle_blueprint(4), 4).unwrap();
    assert_eq!(p.vertices.len(), 9);
    assert!(p.is_tree());
}
