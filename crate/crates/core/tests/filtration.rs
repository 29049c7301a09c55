use std::f64::consts::PI;

use barcode_lab::filtration::*;
use barcode_lab::persistence::{barcode, bottleneck_distance, Barcode};
use barcode_lab::twist::{periodic_orbits, OrbitRecord, Seeding, TwistMapSpec};
use proptest::prelude::*;

fn orbits(kick: f64, k: usize) -> Vec<OrbitRecord> {
    periodic_orbits(&TwistMapSpec::torus(kick), k, &[0], &Seeding::default()).orbits
}

fn sorted_bars(b: &Barcode) -> (Vec<(f64, f64)>, Vec<f64>) {
    let mut f = b.expanded_finite();
    f.sort_by(|a, c| a.0.total_cmp(&c.0).then(a.1.total_cmp(&c.1)));
    let mut i = b.expanded_infinite();
    i.sort_by(f64::total_cmp);
    (f, i)
}

#[test]
fn cosine_on_the_circle() {
    let kick = 2.0;
    let g = grid_action_complex(&TwistMapSpec::torus(kick), 1, 0, 64).unwrap();
    let b = g.barcode();
    assert_eq!(b.finite_count(), 0);
    let (_, inf) = sorted_bars(&b);
    let c = kick / (4.0 * PI * PI);
    assert_eq!(inf.len(), 2);
    assert!((inf[0] + c).abs() <= 2.0 * g.modulus);
    assert!((inf[1] - c).abs() <= 2.0 * g.modulus);
}

#[test]
fn integrable_case_has_only_short_bars() {
    let spec = TwistMapSpec::torus(0.0);
    for (k, n) in [(2, 40), (3, 12), (4, 8)] {
        let g = grid_action_complex(&spec, k, 0, n).unwrap();
        let b = g.barcode();
        assert_eq!(b.infinite_count(), 2);
        for bar in b.finite() {
            assert!(bar.length() < g.modulus, "k={k}: {bar:?} vs {}", g.modulus);
        }
    }
}

#[test]
fn k8_period_two_endpoints_are_orbit_actions() {
    let g = grid_action_complex(&TwistMapSpec::torus(8.0), 2, 0, 128).unwrap();
    let b = g.barcode();
    assert_eq!(b.infinite_count(), 2);
    let actions: Vec<f64> = orbits(8.0, 2).iter().map(|o| o.action).collect();
    let near = |v: f64| actions.iter().any(|a| (a - v).abs() <= 2.0 * g.modulus);
    for bar in b.finite() {
        assert!(near(bar.birth) && near(bar.death), "{bar:?}");
    }
    for bar in b.infinite() {
        assert!(near(bar.birth));
    }
}

#[test]
fn morse_reduction_matches_full_cubical_complex() {
    for (kick, k, m, n) in [(8.0, 2, 0, 48), (8.0, 3, 0, 14), (2.0, 3, 1, 12), (5.0, 4, 0, 7)] {
        let g = grid_action_complex(&TwistMapSpec::torus(kick), k, m, n).unwrap();
        let full = g.explicit_complex().unwrap();
        assert!(full.len() > g.complex.len());
        assert_eq!(sorted_bars(&g.barcode()), sorted_bars(&barcode(&full)), "K={kick} k={k}");
    }
}

#[test]
fn refinement_moves_bars_by_at_most_the_modulus() {
    let spec = TwistMapSpec::torus(8.0);
    let mut prev = grid_action_complex(&spec, 2, 0, 32).unwrap();
    for n in [64, 128, 256] {
        let next = grid_action_complex(&spec, 2, 0, n).unwrap();
        let d = bottleneck_distance(&prev.barcode(), &next.barcode());
        assert!(d <= prev.modulus, "n={n}: {d} > {}", prev.modulus);
        prev = next;
    }
}

#[test]
fn bar_count_bounded_by_periodic_points() {
    let spec = TwistMapSpec::torus(8.0);
    for (k, n) in [(1, 256), (2, 256), (3, 40)] {
        let g = grid_action_complex(&spec, k, 0, n).unwrap();
        let points: usize = orbits(8.0, k).iter().map(|o| o.minimal_period).sum();
        let eps = 2.0 * g.modulus;
        let b = g.barcode().b_eps(eps).unwrap();
        assert!(b as usize <= (points + 2) / 2, "k={k}: b={b}, points={points}");
    }
}

#[test]
fn budget_is_enforced() {
    let spec = TwistMapSpec::torus(8.0);
    match grid_action_complex(&spec, 6, 0, 17) {
        Err(FiltrationError::BudgetExceeded { max_n, .. }) => assert_eq!(max_n, 16),
        other => panic!("{other:?}"),
    }
    let opts = GridOptions {
        budget: 1000,
        radius: None,
    };
    match grid_action_complex_with(&spec, 2, 0, 32, &opts) {
        Err(FiltrationError::BudgetExceeded { max_n, .. }) => assert_eq!(max_n, 31),
        other => panic!("{other:?}"),
    }
    assert_eq!(max_feasible_n(2, 512 * 512), 512);
    assert!(matches!(
        grid_action_complex(&spec, 2, 0, 2),
        Err(FiltrationError::InvalidGrid(_))
    ));
}

#[test]
fn fixed_points_give_spectrum_only_complex() {
    let orbs = orbits(2.0, 1);
    let oc = orbit_complex(&orbs, None).unwrap();
    assert!(oc.spectrum_only);
    assert!(oc.complex.columns().iter().all(|c| c.is_empty()));
    let b = barcode(&oc.complex);
    assert_eq!((b.infinite_count(), b.finite_count()), (2, 0));
    let g = grid_action_complex(&TwistMapSpec::torus(2.0), 1, 0, 64).unwrap();
    assert!(bottleneck_distance(&b, &g.barcode()) <= 2.0 * g.modulus);
}

#[test]
fn empty_orbit_set_gives_empty_complex() {
    let oc = orbit_complex(&[], None).unwrap();
    assert!(oc.complex.is_empty());
}

#[test]
fn degenerate_or_mixed_orbits_are_rejected() {
    let flat = periodic_orbits(&TwistMapSpec::torus(0.0), 2, &[0], &Seeding::default()).orbits;
    assert!(matches!(orbit_complex(&flat, None), Err(FiltrationError::DegenerateInput(_))));
    let mut mixed = orbits(8.0, 1);
    mixed.extend(orbits(8.0, 2));
    assert!(matches!(orbit_complex(&mixed, None), Err(FiltrationError::MixedOrbits)));
    let g = grid_action_complex(&TwistMapSpec::torus(8.0), 1, 0, 32).unwrap();
    assert!(matches!(
        orbit_complex(&orbits(8.0, 2), Some(&g)),
        Err(FiltrationError::MixedOrbits)
    ));
}

#[test]
fn imported_pairing_reproduces_grid_barcode() {
    let g = grid_action_complex(&TwistMapSpec::torus(8.0), 2, 0, 128).unwrap();
    let orbs = orbits(8.0, 2);
    let oc = orbit_complex(&orbs, Some(&g)).unwrap();
    assert!(!oc.spectrum_only);
    let points: usize = orbs.iter().map(|o| o.minimal_period).sum();
    assert_eq!(oc.complex.len(), points);
    let d = bottleneck_distance(&barcode(&oc.complex), &g.barcode());
    assert!(d <= 2.0 * g.modulus, "{d}");
}

#[test]
fn fixed_points_match_grid_perfectly() {
    let g = grid_action_complex(&TwistMapSpec::torus(2.0), 1, 0, 64).unwrap();
    let r = cross_validate(&g, &orbits(2.0, 1));
    assert!(r.is_perfect(), "{r:?}");
    assert_eq!(r.matched.len(), 2);
}

#[test]
fn truncated_orbit_list_leaves_endpoints_unmatched() {
    let g = grid_action_complex(&TwistMapSpec::torus(8.0), 2, 0, 128).unwrap();
    let orbs = orbits(8.0, 2);
    let full = cross_validate(&g, &orbs);
    assert_eq!(full.significant_unmatched, 0);
    let half = &orbs[..orbs.len() / 2];
    let r = cross_validate(&g, half);
    assert!(r.unmatched_endpoints.len() > full.unmatched_endpoints.len());
    assert!(r.significant_unmatched > 0);
}

#[test]
fn matches_persist_under_refinement() {
    let spec = TwistMapSpec::torus(8.0);
    let orbs = orbits(8.0, 2);
    let a = grid_action_complex(&spec, 2, 0, 128).unwrap();
    let b = grid_action_complex(&spec, 2, 0, 256).unwrap();
    let (ra, rb) = (cross_validate(&a, &orbs), cross_validate(&b, &orbs));
    let ratio = rb.tolerance / ra.tolerance;
    assert!((0.45..0.55).contains(&ratio), "{ratio}");
    assert!(ra.unmatched_orbits.is_empty() && rb.unmatched_orbits.is_empty());
    assert_eq!(ra.significant_unmatched, 0);
    assert_eq!(rb.significant_unmatched, 0);
}

#[test]
fn sweep_picks_resolution_from_budget() {
    let kick = 8.0;
    let sweep = grid_sweep(&TwistMapSpec::torus(kick), 1..=3, 0, 40_000).unwrap();
    assert_eq!(sweep.sequence.len(), 3);
    let ns: Vec<usize> = sweep.entries.iter().map(|e| e.n).collect();
    assert_eq!(ns, vec![MAX_RESOLUTION, 200, 34]);
    let first = &sweep.entries[0].spectral;
    let amplitude = 2.0 * kick / (4.0 * PI * PI);
    assert!((first.gamma_proxy - amplitude).abs() <= 2.0 * sweep.entries[0].modulus);
    for e in &sweep.entries {
        assert!(e.spectral.gamma_proxy >= 0.0);
        assert_eq!(sweep.sequence.get(e.k as u32).unwrap().infinite_count(), 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grid_barcode_has_two_essential_bars(
        kick in 0.5f64..9.0,
        k in 1usize..4,
        m in -1i64..2,
        n in 5usize..12,
    ) {
        let g = grid_action_complex(&TwistMapSpec::torus(kick), k, m, n).unwrap();
        let b = g.barcode();
        prop_assert_eq!(b.infinite_count(), 2);
        prop_assert_eq!(
            b.generator_count() as usize,
            g.complex.len()
        );
    }

    #[test]
    fn morse_and_full_complex_agree(
        kick in 0.5f64..9.0,
        k in 1usize..4,
        m in -1i64..2,
        n in 4usize..10,
    ) {
        let g = grid_action_complex(&TwistMapSpec::torus(kick), k, m, n).unwrap();
        let full = barcode(&g.explicit_complex().unwrap());
        prop_assert_eq!(sorted_bars(&g.barcode()), sorted_bars(&full));
    }
}
