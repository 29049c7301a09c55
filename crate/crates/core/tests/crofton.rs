use barcode_lab::crofton::*;
use barcode_lab::entropy::Schedule;
use barcode_lab::twist::{count_intersections, iterate_curve, PhaseSpace, Polyline, RefineOptions, TwistMapSpec};
use proptest::prelude::*;

fn wavy(amplitude: f64, n: usize) -> Polyline {
    let v = (0..n)
        .map(|i| {
            let x = i as f64 / n as f64;
            [x, amplitude * (2.0 * std::f64::consts::PI * x).sin()]
        })
        .collect();
    Polyline::new(v, Some([1.0, 0.0])).unwrap()
}

fn image(kick: f64, k: usize, base: &Polyline) -> Polyline {
    iterate_curve(&TwistMapSpec::torus(kick), base, k, RefineOptions::default())
        .unwrap()
        .curves
        .pop()
        .unwrap()
}

#[test]
fn flat_curve_never_meets_its_translates() {
    let fam = TomographFamily::zero_section(64);
    let est = crofton_integral(&TwistMapSpec::torus(0.0), 5, &fam, 200).unwrap();
    assert_eq!(est.integral, 0.0);
    assert_eq!(est.y_variation, 0.0);
    assert!(est.identity_holds());
}

#[test]
fn vertical_circle_meets_each_translate_once() {
    let fam = TomographFamily::zero_section(64);
    let est = crofton_on_curve(&Polyline::vertical_circle(0.3, 50), &fam, 100, 0).unwrap();
    assert!(est.counts.iter().all(|&c| c == 1));
    assert!((est.integral - 1.0).abs() < 1e-12);
    assert!((est.ratio - 1.0).abs() < 1e-12);
}

#[test]
fn k2_eighth_iterate_at_fine_quadrature() {
    let fam = TomographFamily::zero_section(256);
    let est = crofton_integral(&TwistMapSpec::torus(2.0), 8, &fam, 1000).unwrap();
    assert!(est.ratio <= 1.02, "{}", est.ratio);
    assert!(est.identity_holds(), "{} vs {}", est.integral, est.y_variation);
    assert!(est.length > 10.0);
}

#[test]
fn too_few_nodes_is_an_error() {
    let fam = TomographFamily::zero_section(16);
    assert_eq!(
        crofton_integral(&TwistMapSpec::torus(2.0), 1, &fam, 50),
        Err(CroftonError::TooFewNodes(50))
    );
}

#[test]
fn spiky_counts_are_flagged() {
    let fam = TomographFamily::zero_section(64);
    // a thin comb straddling the node at s = 0.095
    let v = (0..200)
        .map(|i| [i as f64 / 200.0, if i % 2 == 0 { 0.0945 } else { 0.0955 }])
        .collect();
    let comb = Polyline::new(v, Some([1.0, 0.0])).unwrap();
    match crofton_on_curve(&comb, &fam, 100, 0) {
        Err(CroftonError::QuadratureUnstable { max_jump, suggested_n, .. }) => {
            assert_eq!(max_jump, 200);
            assert!(suggested_n > 100);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn translates_are_embedded_and_sweep_area_linearly() {
    let fam = TomographFamily::zero_section(32);
    assert_eq!(fam.member(0.0), fam.base);
    assert_eq!(fam.c_h, 1.0);
    assert_eq!(count_intersections(&fam.member(0.3), &fam.member(0.3), PhaseSpace::Torus), 0);
    for s in [0.0, 0.01, -0.2, 0.5] {
        assert!(fam.displacement_area(s) <= fam.c_h * s.abs() + 1e-15);
    }
    let short = Polyline::new(vec![[0.2, 0.0], [0.5, 0.1]], Some([0.0, 1.0])).unwrap();
    assert!((horizontal_extent(&short) - 0.3).abs() < 1e-12);
}

#[test]
fn ball_minimum_agrees_with_dense_sampling() {
    let fam = TomographFamily::zero_section(128);
    let spec = TwistMapSpec::torus(2.0);
    let report = volb_chain_check(&spec, 3..=5, &Schedule::constant(0.2), &fam).unwrap();
    let it = iterate_curve(&spec, &fam.base, 5, RefineOptions { keep_curves: true, ..Default::default() }).unwrap();
    for row in &report.rows {
        assert!(row.exact);
        let nodes = 2000;
        let counts: Vec<usize> = (0..nodes)
            .map(|j| {
                let s = -row.delta + (j as f64 + 0.5) * row.vol_ball / nodes as f64;
                count_intersections(&fam.member(s), &it.curves[row.k as usize], PhaseSpace::Torus)
            })
            .collect();
        let min = *counts.iter().min().unwrap();
        let mean = counts.iter().sum::<usize>() as f64 / nodes as f64;
        assert!(row.b_hat <= min, "k={}: {} > {min}", row.k, row.b_hat);
        assert!(min - row.b_hat <= 2, "k={}: {} vs {min}", row.k, row.b_hat);
        assert!((row.ball_mean - mean).abs() <= 0.05 * mean.max(1.0), "{} vs {mean}", row.ball_mean);
        assert!(row.ball_mean >= row.b_hat as f64);
    }
}

#[test]
fn sampled_ball_for_non_horizontal_family() {
    let fam = TomographFamily::translates(wavy(0.05, 128));
    let report = volb_chain_check(&TwistMapSpec::torus(2.0), 1..=4, &Schedule::power(0.1, 1.0), &fam).unwrap();
    for row in &report.rows {
        assert!(!row.exact);
        assert!(row.satisfied);
        assert!(row.ball_mean >= row.b_hat as f64);
    }
}

#[test]
fn integrable_chain_is_trivially_satisfied() {
    let fam = TomographFamily::zero_section(64);
    let r = volb_chain_check(&TwistMapSpec::torus(0.0), 1..=6, &Schedule::power(0.1, 1.0), &fam).unwrap();
    assert!(r.warning.is_none());
    for row in &r.rows {
        assert_eq!(row.b_hat, 0);
        assert!((row.length - 1.0).abs() < 1e-12);
        assert!(row.satisfied);
    }
}

#[test]
fn k2_chain_holds_with_shrinking_balls() {
    let fam = TomographFamily::zero_section(128);
    let r = volb_chain_check(&TwistMapSpec::torus(2.0), 1..=10, &Schedule::power(0.1, 1.0), &fam).unwrap();
    assert!(r.all_satisfied());
    assert!(r.certificate.subexponential);
    let last = r.rows.last().unwrap();
    assert_eq!(last.k, 10);
    assert!((last.eps - 0.01).abs() < 1e-15);
    assert!((last.delta - 0.0025).abs() < 1e-15);
    assert!((last.slope_term - 0.01f64.log2() / 10.0).abs() < 1e-12);
    assert!(r.rows.iter().any(|row| row.b_hat > 0));
}

#[test]
fn exponential_schedule_warns_and_keeps_unit_slope() {
    let fam = TomographFamily::zero_section(64);
    let r = volb_chain_check(&TwistMapSpec::torus(2.0), 1..=6, &Schedule::exponential(1.0, 1.0), &fam).unwrap();
    assert!(!r.certificate.subexponential);
    assert!(r.warning.is_some());
    for row in &r.rows {
        assert!((row.slope_term + 1.0).abs() < 1e-12);
    }
}

#[test]
fn gaps_and_empty_ranges_are_errors() {
    let fam = TomographFamily::zero_section(16);
    let spec = TwistMapSpec::torus(1.0);
    let sched = Schedule::explicit([(1u32, 0.1), (2, 0.05)]);
    assert_eq!(volb_chain_check(&spec, 1..=3, &sched, &fam), Err(CroftonError::ScheduleGap(3)));
    #[allow(clippy::reversed_empty_ranges)]
    let empty = 3..=1;
    assert_eq!(volb_chain_check(&spec, empty, &sched, &fam), Err(CroftonError::EmptyRange));
}

#[test]
fn verdict_csv_has_one_row_per_k() {
    let fam = TomographFamily::zero_section(32);
    let r = volb_chain_check(&TwistMapSpec::torus(2.0), 2..=4, &Schedule::power(0.1, 1.0), &fam).unwrap();
    let mut buf = Vec::new();
    write_volb_csv(&r, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("k_iterations,eps_action_units,delta"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn integral_tracks_vertical_variation(kick in 0.0f64..4.0, k in 0usize..4, n in 100usize..300) {
        let fam = TomographFamily::zero_section(64);
        let curve = image(kick, k, &fam.base);
        if let Ok(est) = crofton_on_curve(&curve, &fam, n, k) {
            prop_assert!(est.identity_holds(), "{} vs {}", est.integral, est.y_variation);
            prop_assert!(est.integral <= est.length + est.identity_tolerance);
        }
    }

    #[test]
    fn larger_balls_have_smaller_minima(kick in 0.5f64..3.0, e1 in 0.01f64..0.2, e2 in 0.01f64..0.2) {
        let fam = TomographFamily::zero_section(64);
        let spec = TwistMapSpec::torus(kick);
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let a = volb_chain_check(&spec, 1..=4, &Schedule::constant(lo), &fam).unwrap();
        let b = volb_chain_check(&spec, 1..=4, &Schedule::constant(hi), &fam).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            prop_assert!(rb.b_hat <= ra.b_hat);
            prop_assert!(ra.satisfied && rb.satisfied);
        }
    }
}
