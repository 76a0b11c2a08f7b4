use std::f64::consts::{FRAC_PI_2, PI};

use fatflow::block::{BlockPoint, OrbitOptions, OrbitOutcome, ShearProfile};
use fatflow::circle;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shear_is_odd_and_steep(lambda in 0.1f64..30.0, x in -1.5f64..1.5) {
        let p = ShearProfile::new(lambda).unwrap();
        prop_assert!((p.shear(x).unwrap() + p.shear(-x).unwrap()).abs() <= 1e-12);
        prop_assert!(p.shear_derivative(x).unwrap() >= lambda * PI / 2.0 - 1e-9);
    }

    #[test]
    fn exit_map_matches_integration(lambda in 0.5f64..6.0, x in -1.3f64..1.3, y in 0.0f64..1.0) {
        let p = ShearProfile::new(lambda).unwrap();
        let tr = p.integrate_orbit(BlockPoint::new(x, y, -FRAC_PI_2).unwrap(), &OrbitOptions::default()).unwrap();
        let OrbitOutcome::Exited { y: ye, .. } = tr.outcome else { panic!("no exit") };
        let (xe, ye2) = p.exit_map(x, y).unwrap();
        prop_assert_eq!(xe, x);
        prop_assert!(circle::dist(ye, ye2) <= 1e-6);
    }
}

#[test]
fn shear_vanishes_at_centre() {
    for lambda in [0.5, 1.0, 5.0] {
        assert_eq!(ShearProfile::new(lambda).unwrap().shear(0.0).unwrap(), 0.0);
    }
}
