//! Acceptance run: one verdict line per criterion, then a single assertion
//! over all of them.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use barcode_lab::crofton::{crofton_on_curve, volb_chain_check, TomographFamily};
use barcode_lab::entropy::{
    ap_bound_check, barcode_entropy, epsilon_entropy, htop_bound_check, sequential_entropy,
    shortest_bar_series, BarcodeSequence, Schedule, Window,
};
use barcode_lab::filtration::{grid_sweep, GridSweep, DEFAULT_CELL_BUDGET};
use barcode_lab::persistence::{barcode, Barcode};
use barcode_lab::synthetic::{generate, SyntheticLaw};
use barcode_lab::twist::{
    iterate_curve, orbit_census, periodic_orbits, CurveIteration, Polyline, RefineOptions,
    Seeding, TwistMapSpec,
};
use common::{lattice_actions, random_complex, rng, sorted_actions, RankOracle};
use rand::Rng;

/// Measured-property threshold for the spectral-norm proxy series.
const GAMMA_THRESHOLD: f64 = 0.5;
/// Base threshold of the three sequential schedules.
const SEQUENTIAL_EPS0: f64 = 0.05;
const AGREEMENT_TOLERANCE: f64 = 0.15;
const HTOP_MARGIN: f64 = 0.3;
const NULL_TOLERANCE: f64 = 0.05;
const ENTROPY_GRID: [f64; 3] = [0.2, 0.1, 0.05];

struct Verdict {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn bars(bc: &Barcode) -> (BTreeMap<(u64, u64), i64>, BTreeMap<u64, i64>) {
    (
        bc.finite()
            .iter()
            .map(|b| ((b.birth.to_bits(), b.death.to_bits()), b.mult as i64))
            .collect(),
        bc.infinite().iter().map(|b| (b.birth.to_bits(), b.mult as i64)).collect(),
    )
}

fn zero_section(spec: &TwistMapSpec, k: usize) -> CurveIteration {
    iterate_curve(spec, &Polyline::horizontal_circle(0.0, 256), k, RefineOptions::default()).unwrap()
}

fn schedules() -> [Schedule; 3] {
    [
        Schedule::constant(SEQUENTIAL_EPS0),
        Schedule::power(SEQUENTIAL_EPS0, 1.0),
        Schedule::power(SEQUENTIAL_EPS0, 0.5),
    ]
}

fn oracle_equivalence() -> Verdict {
    let t = Instant::now();
    let mut r = rng(20240501);
    let mut mismatches = 0;
    for trial in 0..500 {
        let n = 1 + trial % 12;
        let actions = sorted_actions(&mut r, n);
        let c = random_complex(&mut r, n, &actions);
        if bars(&barcode(&c)) != RankOracle::new(&c).bars() {
            mismatches += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    Verdict {
        id: 1,
        name: "oracle equivalence",
        pass: mismatches == 0 && secs < 10.0,
        detail: format!("500 complexes, {mismatches} mismatches, {secs:.2} s"),
    }
}

fn stability() -> Verdict {
    let mut r = rng(77);
    let mut violations = 0;
    let mut checks = 0;
    for _ in 0..200 {
        let n = r.random_range(2..=12);
        // lattice spacing 0.25 keeps the order under shifts of at most 0.1
        let actions = lattice_actions(&mut r, n, 0.25);
        let c = random_complex(&mut r, n, &actions);
        let delta: f64 = r.random_range(0.0..=0.1);
        let shifted: Vec<f64> = c.actions().map(|a| a + r.random_range(-delta..=delta)).collect();
        let c2 = c.with_actions(&shifted).unwrap();
        let (b1, b2) = (barcode(&c), barcode(&c2));
        for eps in [0.05, 0.1, 0.2] {
            checks += 2;
            if b1.b_eps(eps + 2.0 * delta).unwrap() > b2.b_eps(eps).unwrap() {
                violations += 1;
            }
            if b2.b_eps(eps + 2.0 * delta).unwrap() > b1.b_eps(eps).unwrap() {
                violations += 1;
            }
        }
    }
    Verdict {
        id: 2,
        name: "stability",
        pass: violations == 0,
        detail: format!("{checks} inequalities over 200 complexes, {violations} violations"),
    }
}

fn calibration() -> Verdict {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for c in [0.25, 0.5, 1.0] {
        let seq = generate(&SyntheticLaw::ExponentialGrowth { c }, 40).unwrap();
        let fit = epsilon_entropy(&seq, 0.5, Window::new(10, 40)).unwrap();
        worst = worst.max((fit.value - c).abs());
        parts.push(format!("c={c}: {:.4}", fit.value));
    }
    let secs = t.elapsed().as_secs_f64();
    Verdict {
        id: 3,
        name: "estimator calibration",
        pass: worst <= 0.02 && secs < 5.0,
        detail: format!("{}; max error {worst:.4}, {secs:.3} s", parts.join(", ")),
    }
}

fn growth(sweep: &GridSweep, sweep_secs: f64) -> Verdict {
    let t = Instant::now();
    let spec = TwistMapSpec::torus(8.0);
    let window = Window::new(2, 6);
    let htop = zero_section(&spec, 6).growth_slope(2, 6).unwrap();
    let estimates: Vec<(String, f64)> = schedules()
        .iter()
        .map(|s| {
            let e = sequential_entropy(&sweep.sequence, s, window).unwrap();
            (s.label(), e.fit.value)
        })
        .collect();
    let values: Vec<f64> = estimates.iter().map(|e| e.1).collect();
    let spread = values.iter().copied().fold(f64::MIN, f64::max) - values.iter().copied().fold(f64::MAX, f64::min);
    let below = values.iter().all(|&v| v <= htop + HTOP_MARGIN);
    let secs = sweep_secs + t.elapsed().as_secs_f64();
    let ns: Vec<String> = sweep.entries.iter().map(|e| format!("k{}:n{}", e.k, e.n)).collect();
    let shown: Vec<String> = estimates.iter().map(|(l, v)| format!("{l} {v:.3}")).collect();
    // diagnostic only: thresholds lifted by twice the grid modulus count
    // bars that survive the discretization error
    let lifted: Vec<String> = schedules()
        .iter()
        .map(|s| {
            let values = sweep
                .entries
                .iter()
                .map(|e| (e.k as u32, s.at(e.k as u32).unwrap() + 2.0 * e.modulus));
            match sequential_entropy(&sweep.sequence, &Schedule::explicit(values), window) {
                Ok(e) => format!("{:.3}", e.fit.value),
                Err(e) => format!("n/a ({e})"),
            }
        })
        .collect();
    Verdict {
        id: 4,
        name: "growth at desk scale",
        pass: spread <= AGREEMENT_TOLERANCE && below && secs < 1200.0,
        detail: format!(
            "{}; spread {spread:.3}, curve growth {htop:.3}, grids [{}], {secs:.0} s; with thresholds lifted by 2*modulus: [{}]",
            shown.join(", "),
            ns.join(" "),
            lifted.join(", ")
        ),
    }
}

fn integrable_null() -> Verdict {
    let spec = TwistMapSpec::torus(0.0);
    let window = Window::new(2, 6);
    let curve = zero_section(&spec, 6).growth_slope(2, 6).unwrap();
    let sweep = grid_sweep(&spec, 2..=6, 0, DEFAULT_CELL_BUDGET).unwrap();
    let profile = barcode_entropy(&sweep.sequence, &ENTROPY_GRID, window).unwrap();
    let mut worst = profile.value;
    for s in schedules() {
        worst = worst.max(sequential_entropy(&sweep.sequence, &s, window).unwrap().fit.value);
    }
    Verdict {
        id: 5,
        name: "integrable null case",
        pass: curve <= NULL_TOLERANCE && worst <= NULL_TOLERANCE,
        detail: format!("curve slope {curve:.2e}, largest entropy estimate {worst:.3}"),
    }
}

fn crofton() -> Verdict {
    let spec = TwistMapSpec::torus(2.0);
    let family = TomographFamily::zero_section(256);
    let opts = RefineOptions {
        keep_curves: true,
        ..RefineOptions::default()
    };
    let it = iterate_curve(&spec, &family.base, 8, opts).unwrap();
    let mut max_ratio: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut ok = true;
    for k in 1..=8 {
        let e = crofton_on_curve(&it.curves[k], &family, 1000, k).unwrap();
        let tv = y_total_variation(&it.curves[k]);
        let gap = (e.integral - tv).abs();
        max_ratio = max_ratio.max(e.ratio);
        worst_gap = worst_gap.max(gap / (2.0 * e.length / 1000.0));
        ok &= e.ratio <= 1.02 && gap <= 2.0 * e.length / 1000.0;
    }
    Verdict {
        id: 6,
        name: "Crofton",
        pass: ok,
        detail: format!("max ratio {max_ratio:.4}, worst gap {worst_gap:.3} of allowance"),
    }
}

fn y_total_variation(curve: &Polyline) -> f64 {
    curve.segments().map(|(a, b)| (b[1] - a[1]).abs()).sum()
}

fn volb_chain() -> Verdict {
    let spec = TwistMapSpec::torus(2.0);
    let family = TomographFamily::zero_section(256);
    let r = volb_chain_check(&spec, 1..=10, &Schedule::power(0.1, 1.0), &family).unwrap();
    let violations = r.rows.iter().filter(|row| !row.satisfied).count();
    let term = r.rows.last().unwrap().slope_term;
    Verdict {
        id: 7,
        name: "vol-b chain",
        pass: violations == 0 && term.abs() < 0.05,
        detail: format!(
            "{violations} violations over k=1..10; slope term at k=10 is {term:.4} bits, magnitude {:.4} (needs < 0.05)",
            term.abs()
        ),
    }
}

fn almost_periodic() -> Verdict {
    let eps = 0.2;
    let k_list: Vec<u64> = (1..=11).map(|j| 5 * j).collect();
    let mut ap_violations = 0;
    for seed in 0..10 {
        let seq = generate(&SyntheticLaw::AlmostPeriodic { period: 5, eps, seed }, 60).unwrap();
        ap_violations += ap_bound_check(&seq, &k_list, eps).unwrap().violations.len();
    }
    let exp = generate(&SyntheticLaw::ExponentialGrowth { c: 0.5 }, 40).unwrap();
    let fake: Vec<u64> = (1..=9).map(|j| 4 * j).collect();
    let fired = ap_bound_check(&exp, &fake, 0.5).unwrap().violations.len();
    Verdict {
        id: 8,
        name: "almost-periodic logic",
        pass: ap_violations == 0 && fired >= 1,
        detail: format!("{ap_violations} violations on 10 almost-periodic sequences; {fired} on the exponential one"),
    }
}

fn gamma(sweep: &GridSweep) -> Verdict {
    let k2 = orbit_census(&periodic_orbits(&TwistMapSpec::torus(2.0), 1, &[0], &Seeding::default()).orbits);
    let k8 = orbit_census(&periodic_orbits(&TwistMapSpec::torus(8.0), 3, &[0], &Seeding::default()).orbits);
    let series: Vec<(usize, f64)> = sweep.entries.iter().map(|e| (e.k, e.spectral.gamma_proxy)).collect();
    let first = series[0].1;
    let below: Vec<usize> = series
        .iter()
        .filter(|(_, g)| *g < GAMMA_THRESHOLD * first)
        .map(|(k, _)| *k)
        .collect();
    let min = series.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let census_ok = k2.total == 2 && k2.hyperbolic == 1 && k8.hyperbolic > 2;
    let shown: Vec<String> = series.iter().map(|(k, g)| format!("{k}:{g:.3}")).collect();
    Verdict {
        id: 9,
        name: "gamma experiment",
        pass: census_ok && below.is_empty(),
        detail: format!(
            "K=2 k=1 census {}/{} hyperbolic; K=8 k=3 hyperbolic {}; proxy [{}], min/first {:.3} (threshold {GAMMA_THRESHOLD}), below threshold at k {:?}",
            k2.hyperbolic,
            k2.total,
            k8.hyperbolic,
            shown.join(" "),
            min / first,
            below
        ),
    }
}

fn superexp() -> Verdict {
    let seq: BarcodeSequence = generate(&SyntheticLaw::SuperexpCountShrinkingBars, 11).unwrap();
    let counts: BTreeMap<u32, u128> = seq.entries().iter().map(|(&k, b)| (k, b.generator_count())).collect();
    let log_count = |k: u32| (counts[&k] as f64).log2();
    // log₂count − ck must grow without bound: increasing from k = c on and positive at the end
    let outgrows = (1..=10u32).all(|c| {
        let c = c as f64;
        let excess: Vec<f64> = counts.keys().map(|&k| log_count(k) - c * k as f64).collect();
        excess.windows(2).skip(c as usize).all(|w| w[1] > w[0]) && *excess.last().unwrap() > 0.0
    });
    let b_half: Vec<u128> = seq.entries().values().map(|b| b.b_eps(0.5).unwrap()).collect();
    let constant = b_half.iter().all(|&b| b == 4);
    let check = htop_bound_check(&counts, &shortest_bar_series(&seq), 1, 0.0).unwrap();
    Verdict {
        id: 10,
        name: "superexponential separation",
        pass: outgrows && constant && check.satisfied,
        detail: format!(
            "count outgrows 2^(ck) for c<=10: {outgrows}; b_0.5 = {:?}; shortest-bar bound satisfied: {}",
            b_half.first(),
            check.satisfied
        ),
    }
}

#[test]
fn acceptance() {
    let t = Instant::now();
    let sweep = grid_sweep(&TwistMapSpec::torus(8.0), 1..=6, 0, DEFAULT_CELL_BUDGET).unwrap();
    let sweep_secs = t.elapsed().as_secs_f64();

    let verdicts = [
        oracle_equivalence(),
        stability(),
        calibration(),
        growth(&sweep, sweep_secs),
        integrable_null(),
        crofton(),
        volb_chain(),
        almost_periodic(),
        gamma(&sweep),
        superexp(),
    ];
    for v in &verdicts {
        println!(
            "criterion {:>2} {:<30} {}  {}",
            v.id,
            v.name,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    let failed: Vec<usize> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
