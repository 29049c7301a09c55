use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use barcode_lab::crofton::{crofton_on_curve, volb_chain_check, write_volb_csv, TomographFamily};
use barcode_lab::entropy::{
    sequential_entropy, EntropyReport, Schedule, SequentialEstimate, Window,
};
use barcode_lab::filtration::{
    cross_validate, grid_action_complex_with, grid_sweep, orbit_complex, resolution_for_budget,
    EndpointKind, GridOptions, GridSweep,
};
use barcode_lab::persistence::{barcode, Barcode};
use barcode_lab::synthetic::{generate, SyntheticLaw};
use barcode_lab::twist::{
    iterate_curve, orbit_census, periodic_orbits, CurveIteration, PhaseSpace, Polyline,
    RefineOptions, Seeding, TwistMapSpec,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::options::*;
use crate::output::{fmt, Artifacts, Series};

pub struct Ctx {
    pub seed: u64,
    pub budget: usize,
    pub art: Artifacts,
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

fn twist_spec(kick: f64, phase_space: &str) -> Result<TwistMapSpec, CliError> {
    check(kick.is_finite(), || format!("K = {kick}"))?;
    let space = match phase_space {
        "torus" => PhaseSpace::Torus,
        "cylinder" => PhaseSpace::Cylinder,
        other => return Err(CliError::Config(format!("unknown phase space {other:?}"))),
    };
    Ok(TwistMapSpec::new(kick, space))
}

fn check_range(kmin: u32, kmax: u32) -> Result<Window, CliError> {
    check(kmin >= 1 && kmax >= kmin + 2, || {
        format!("k-range {kmin}..={kmax} needs kmin ≥ 1 and at least three values")
    })?;
    Ok(Window::new(kmin, kmax))
}

fn parse_schedule(name: &str, eps0: f64) -> Result<Schedule, CliError> {
    let s = match name {
        "constant" => Schedule::constant(eps0),
        "harmonic" => Schedule::power(eps0, 1.0),
        "sqrt" => Schedule::power(eps0, 0.5),
        other => match other.strip_prefix("exp:").map(str::parse::<f64>) {
            Some(Ok(eta)) => Schedule::exponential(eps0, eta),
            _ => return Err(CliError::Config(format!("unknown schedule {other:?}"))),
        },
    };
    s.validate()?;
    Ok(s)
}

/// Iterates the circle y = 0 and refuses partial results.
fn zero_section_growth(spec: &TwistMapSpec, kmax: usize) -> Result<CurveIteration, CliError> {
    let base = Polyline::horizontal_circle(0.0, 256);
    let it = iterate_curve(spec, &base, kmax, RefineOptions::default())?;
    if it.budget_exhausted {
        return Err(CliError::Budget(format!(
            "curve vertex budget exhausted at k = {}",
            it.lengths.len() - 1
        )));
    }
    Ok(it)
}

fn write_curve(ctx: &mut Ctx, it: &CurveIteration) -> Result<(), CliError> {
    ctx.art.csv(
        "curve.csv",
        &["k_iterations", "length_phase_units", "vertices_count"],
        it.lengths
            .iter()
            .zip(&it.vertex_counts)
            .enumerate()
            .map(|(k, (l, v))| vec![k.to_string(), fmt(*l), v.to_string()]),
    )?;
    let points = it.lengths.iter().enumerate().map(|(k, l)| (k as f64, l.log2())).collect();
    ctx.art.plot(
        "curve",
        "curve length",
        ("k", "log2 length"),
        vec![Series {
            label: "zero section".into(),
            points,
        }],
        false,
    )
}

fn write_sweep(ctx: &mut Ctx, sweep: &GridSweep) -> Result<(), CliError> {
    ctx.art.csv(
        "sweep.csv",
        &[
            "k_iterations",
            "grid_points_per_axis",
            "radius_config_units",
            "modulus_action_units",
            "critical_cells_by_dim_count",
            "finite_bars_count",
        ],
        sweep.entries.iter().map(|e| {
            let counts: Vec<String> = e.critical_counts.iter().map(|c| c.to_string()).collect();
            vec![
                e.k.to_string(),
                e.n.to_string(),
                fmt(e.radius),
                fmt(e.modulus),
                counts.join(" "),
                sweep.sequence.get(e.k as u32).map_or(0, |b| b.finite_count()).to_string(),
            ]
        }),
    )
}

fn write_barcode(ctx: &mut Ctx, name: &str, bc: &Barcode) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for b in bc.finite() {
        rows.push(vec![
            "finite".into(),
            fmt(b.birth),
            fmt(b.death),
            fmt(b.length()),
            b.mult.to_string(),
        ]);
    }
    for b in bc.infinite() {
        rows.push(vec!["infinite".into(), fmt(b.birth), "inf".into(), "inf".into(), b.mult.to_string()]);
    }
    ctx.art.csv(
        name,
        &[
            "kind",
            "birth_action_units",
            "death_action_units",
            "length_action_units",
            "multiplicity_bars",
        ],
        rows,
    )
}

/// (k, log₂ b) per ε, skipping empty counts.
fn entropy_series(report: &EntropyReport) -> Vec<Series> {
    let mut by_eps: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for &(eps, k, b) in &report.table {
        if by_eps.last().is_none_or(|l| l.0 != eps) {
            by_eps.push((eps, Vec::new()));
        }
        if b > 0 {
            by_eps.last_mut().unwrap().1.push((k as f64, (b as f64).log2()));
        }
    }
    by_eps
        .into_iter()
        .map(|(eps, points)| Series {
            label: format!("eps = {eps}"),
            points,
        })
        .collect()
}

fn write_entropy_report(ctx: &mut Ctx, report: &EntropyReport) -> Result<(), CliError> {
    ctx.art.json("entropy.json", report)?;
    let w = ctx.art.writer("entropy_table.csv")?;
    report.write_table_csv(w)?;
    let series = entropy_series(report);
    ctx.art.plot("entropy", "bar counts", ("k", "log2 b_eps"), series, false)
}

fn write_sequential(ctx: &mut Ctx, seq_est: &[SequentialEstimate], flags: &[bool]) -> Result<(), CliError> {
    ctx.art.csv(
        "sequential.csv",
        &[
            "schedule",
            "estimate_bits_per_iteration",
            "raw_slope_bits_per_iteration",
            "max_rate_bits_per_iteration",
            "subexponential_bool",
            "within_bound_bool",
        ],
        seq_est.iter().zip(flags).map(|(e, ok)| {
            vec![
                e.schedule.label(),
                fmt(e.fit.value),
                fmt(e.fit.raw_slope),
                fmt(e.fit.max_rate),
                e.certificate.subexponential.to_string(),
                ok.to_string(),
            ]
        }),
    )?;
    let mut rows = Vec::new();
    for e in seq_est {
        for &(k, b) in &e.fit.points {
            let eps = e.schedule.at(k).unwrap_or(f64::NAN);
            rows.push(vec![e.schedule.label(), k.to_string(), fmt(eps), b.to_string()]);
        }
    }
    ctx.art.csv(
        "sequential_table.csv",
        &["schedule", "k_iterations", "eps_action_units", "b_eps_bars"],
        rows,
    )?;
    let series = seq_est
        .iter()
        .map(|e| Series {
            label: e.schedule.label(),
            points: e
                .fit
                .points
                .iter()
                .filter(|p| p.1 > 0)
                .map(|&(k, b)| (k as f64, (b as f64).log2()))
                .collect(),
        })
        .collect();
    ctx.art.plot("sequential", "sequential bar counts", ("k", "log2 b_eps_k"), series, false)
}

pub fn orbits(p: &Orbits, ctx: &mut Ctx) -> Result<Value, CliError> {
    let spec = twist_spec(p.kick, &p.phase_space)?;
    check(p.k >= 1, || "k must be at least 1".into())?;
    check(!p.m.is_empty(), || "no rotation class given".into())?;
    let seeding = Seeding {
        random: p.random_seeds,
        seed: ctx.seed,
        ..Seeding::default()
    };
    let set = periodic_orbits(&spec, p.k, &p.m, &seeding);
    ctx.art.csv(
        "orbits.csv",
        &[
            "k_iterations",
            "m_winding",
            "action_action_units",
            "morse_index",
            "residue_dimensionless",
            "type",
            "trace_dimensionless",
            "minimal_period_iterations",
            "x0_phase_units",
            "y0_phase_units",
        ],
        set.orbits.iter().map(|o| {
            let [x0, y0] = o.phase_point(&spec);
            let kind = if !o.nondegenerate {
                "degenerate"
            } else if o.hyperbolic {
                "hyperbolic"
            } else {
                "elliptic"
            };
            vec![
                o.k.to_string(),
                o.m.to_string(),
                fmt(o.action),
                o.morse_index.to_string(),
                fmt(o.residue),
                kind.into(),
                fmt(o.trace),
                o.minimal_period.to_string(),
                fmt(x0),
                fmt(y0),
            ]
        }),
    )?;
    Ok(json!({
        "orbits": set.orbits.len(),
        "periodic_points": set.p_total(),
        "census": orbit_census(&set.orbits),
        "seeds_tried": set.seeds_tried,
        "divergences": set.divergences,
    }))
}

pub fn barcode_cmd(p: &BarcodeParams, ctx: &mut Ctx) -> Result<Value, CliError> {
    let spec = twist_spec(p.kick, "torus")?;
    check(p.k >= 1, || "k must be at least 1".into())?;
    let n = if p.n == 0 { resolution_for_budget(p.k, ctx.budget) } else { p.n };
    let opts = GridOptions {
        budget: ctx.budget,
        radius: None,
    };
    let g = grid_action_complex_with(&spec, p.k, p.m, n, &opts)?;
    let mut summary = json!({
        "n": n,
        "modulus": g.modulus,
        "radius": g.radius,
        "critical_cells": g.critical_counts(),
    });
    let bc = match p.source.as_str() {
        "grid" => g.barcode(),
        "orbit" => {
            let seeding = Seeding {
                seed: ctx.seed,
                ..Seeding::default()
            };
            let all = periodic_orbits(&spec, p.k, &[p.m], &seeding).orbits;
            let orbs: Vec<_> = all.iter().filter(|o| o.nondegenerate).cloned().collect();
            let oc = orbit_complex(&orbs, Some(&g))?;
            let report = cross_validate(&g, &orbs);
            ctx.art.csv(
                "matches.csv",
                &[
                    "endpoint_value_action_units",
                    "degree",
                    "kind",
                    "bar_length_action_units",
                    "orbit_action_action_units",
                ],
                report.endpoints.iter().enumerate().map(|(e, ep)| {
                    let orbit = report
                        .matched
                        .iter()
                        .find(|m| m.0 == e)
                        .map_or(String::new(), |m| fmt(orbs[m.1].action));
                    let kind = match ep.kind {
                        EndpointKind::Birth => "birth",
                        EndpointKind::Death => "death",
                        EndpointKind::Essential => "essential",
                    };
                    vec![fmt(ep.value), ep.degree.to_string(), kind.into(), fmt(ep.bar_length), orbit]
                }),
            )?;
            summary["orbits"] = json!(orbs.len());
            summary["degenerate_dropped"] = json!(all.len() - orbs.len());
            summary["tolerance"] = json!(report.tolerance);
            summary["unmatched_endpoints"] = json!(report.unmatched_endpoints.len());
            summary["unmatched_orbits"] = json!(report.unmatched_orbits.len());
            summary["significant_unmatched"] = json!(report.significant_unmatched);
            summary["unimported_pairs"] = json!(oc.unimported_pairs);
            barcode(&oc.complex)
        }
        other => return Err(CliError::Config(format!("unknown source {other:?}"))),
    };
    write_barcode(ctx, "barcode.csv", &bc)?;
    let points = (-12..=2)
        .map(|j| {
            let eps = 2f64.powi(j);
            (j as f64, bc.b_eps(eps).unwrap_or(0) as f64)
        })
        .collect();
    ctx.art.plot(
        "b_eps",
        "bars longer than eps",
        ("log2 eps", "b_eps"),
        vec![Series {
            label: p.source.clone(),
            points,
        }],
        false,
    )?;
    summary["finite_bars"] = json!(bc.finite_count().to_string());
    summary["infinite_bars"] = json!(bc.infinite_count().to_string());
    summary["boundary_depth"] = json!(bc.boundary_depth());
    Ok(summary)
}

pub fn entropy(p: &EntropyParams, ctx: &mut Ctx) -> Result<Value, CliError> {
    let spec = twist_spec(p.kick, "torus")?;
    let window = check_range(p.kmin, p.kmax)?;
    let sweep = grid_sweep(&spec, p.kmin as usize..=p.kmax as usize, p.m, ctx.budget)?;
    let report = EntropyReport::build(&sweep.sequence, &p.eps_grid, &[], window)?;
    let curve = zero_section_growth(&spec, p.kmax as usize)?;
    let htop = curve.growth_slope(p.kmin as usize, p.kmax as usize).unwrap_or(0.0);
    write_entropy_report(ctx, &report)?;
    write_sweep(ctx, &sweep)?;
    write_curve(ctx, &curve)?;
    let per_eps: BTreeMap<String, f64> = report
        .profile
        .profile
        .iter()
        .map(|(eps, fit)| (eps.to_string(), fit.value))
        .collect();
    Ok(json!({
        "entropy_estimate": report.profile.value,
        "per_eps": per_eps,
        "curve_growth": htop,
    }))
}

pub fn sequential(p: &SequentialParams, ctx: &mut Ctx) -> Result<Value, CliError> {
    let spec = twist_spec(p.kick, "torus")?;
    let window = check_range(p.kmin, p.kmax)?;
    let schedules = p
        .schedules
        .iter()
        .map(|s| parse_schedule(s, p.eps0))
        .collect::<Result<Vec<_>, _>>()?;
    check(!schedules.is_empty(), || "no schedule given".into())?;
    let sweep = grid_sweep(&spec, p.kmin as usize..=p.kmax as usize, p.m, ctx.budget)?;
    let estimates = schedules
        .iter()
        .map(|s| sequential_entropy(&sweep.sequence, s, window))
        .collect::<Result<Vec<_>, _>>()?;
    let curve = zero_section_growth(&spec, p.kmax as usize)?;
    let htop = curve.growth_slope(p.kmin as usize, p.kmax as usize).unwrap_or(0.0);
    let values: Vec<f64> = estimates.iter().map(|e| e.fit.value).collect();
    let below: Vec<bool> = values.iter().map(|&v| v <= htop + p.htop_margin).collect();
    let spread = values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().copied().fold(f64::INFINITY, f64::min);
    write_sequential(ctx, &estimates, &below)?;
    write_sweep(ctx, &sweep)?;
    write_curve(ctx, &curve)?;
    let labelled: BTreeMap<String, f64> = estimates
        .iter()
        .map(|e| (e.schedule.label(), e.fit.value))
        .collect();
    Ok(json!({
        "estimates": labelled,
        "spread": spread,
        "agree": spread <= p.agreement_tolerance,
        "curve_growth": htop,
        "all_within_bound": below.iter().all(|&b| b),
    }))
}

pub fn crofton(p: &CroftonParams, ctx: &mut Ctx) -> Result<Value, CliError> {
    let spec = twist_spec(p.kick, "torus")?;
    check(p.k >= 1, || "k must be at least 1".into())?;
    check(p.base_vertices >= 2, || "base curve needs two vertices".into())?;
    let family = TomographFamily::zero_section(p.base_vertices);
    let opts = RefineOptions {
        keep_curves: true,
        ..RefineOptions::default()
    };
    let it = iterate_curve(&spec, &family.base, p.k, opts)?;
    if it.budget_exhausted {
        return Err(CliError::Budget(format!(
            "curve vertex budget exhausted at k = {}",
            it.lengths.len() - 1
        )));
    }
    let mut estimates = Vec::new();
    for k in 1..=p.k {
        estimates.push(crofton_on_curve(&it.curves[k], &family, p.quadrature_n, k)?);
    }
    ctx.art.csv(
        "crofton.csv",
        &[
            "k_iterations",
            "length_phase_units",
            "integral_phase_units",
            "ratio_dimensionless",
            "y_variation_phase_units",
            "identity_tolerance_phase_units",
            "identity_holds_bool",
        ],
        estimates.iter().map(|e| {
            vec![
                e.k.to_string(),
                fmt(e.length),
                fmt(e.integral),
                fmt(e.ratio),
                fmt(e.y_variation),
                fmt(e.identity_tolerance),
                e.identity_holds().to_string(),
            ]
        }),
    )?;
    let schedule = Schedule::power(p.eps0, p.power);
    let volb = volb_chain_check(&spec, 1..=p.k as u32, &schedule, &family)?;
    write_volb_csv(&volb, ctx.art.writer("volb.csv")?)?;
    ctx.art.json("volb.json", &volb)?;
    ctx.art.plot(
        "crofton",
        "Crofton integral against length",
        ("k", "log2 phase units"),
        vec![
            Series {
                label: "length".into(),
                points: estimates.iter().map(|e| (e.k as f64, e.length.log2())).collect(),
            },
            Series {
                label: "integral".into(),
                points: estimates.iter().map(|e| (e.k as f64, e.integral.max(f64::MIN_POSITIVE).log2())).collect(),
            },
        ],
        false,
    )?;
    let max_ratio = estimates.iter().map(|e| e.ratio).fold(0.0, f64::max);
    let last = volb.rows.last().expect("non-empty range");
    Ok(json!({
        "max_ratio": max_ratio,
        "identity_holds": estimates.iter().all(|e| e.identity_holds()),
        "volb_satisfied": volb.all_satisfied(),
        "slope_term_at_kmax": last.slope_term,
        "warning": volb.warning,
    }))
}

pub fn gamma(p: &GammaParams, ctx: &mut Ctx) -> Result<Value, CliError> {
    let spec = twist_spec(p.kick, "torus")?;
    check(p.kmin >= 1 && p.kmax >= p.kmin, || "empty k-range".into())?;
    check(p.threshold.is_finite(), || "threshold must be finite".into())?;
    let seeding = Seeding {
        seed: ctx.seed,
        ..Seeding::default()
    };
    let sweep = grid_sweep(&spec, p.kmin..=p.kmax, p.m, ctx.budget)?;
    let first = sweep.entries[0].spectral.gamma_proxy;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for e in &sweep.entries {
        let set = periodic_orbits(&spec, e.k, &[p.m], &seeding);
        let c = orbit_census(&set.orbits);
        let ratio = e.spectral.gamma_proxy / first;
        min_ratio = min_ratio.min(ratio);
        if ratio < p.threshold {
            violations.push(e.k);
        }
        rows.push(vec![
            e.k.to_string(),
            e.n.to_string(),
            c.total.to_string(),
            c.hyperbolic.to_string(),
            c.elliptic.to_string(),
            c.degenerate.to_string(),
            set.p_total().to_string(),
            fmt(e.spectral.c_plus),
            fmt(e.spectral.c_minus),
            fmt(e.spectral.gamma_proxy),
            fmt(ratio),
            fmt(e.modulus),
        ]);
    }
    let series = vec![Series {
        label: "gamma proxy".into(),
        points: sweep.entries.iter().map(|e| (e.k as f64, e.spectral.gamma_proxy)).collect(),
    }];
    let hyperbolic: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[3].parse().unwrap()))
        .collect();
    ctx.art.csv(
        "gamma.csv",
        &[
            "k_iterations",
            "grid_points_per_axis",
            "orbits_count",
            "hyperbolic_count",
            "elliptic_count",
            "degenerate_count",
            "periodic_points_count",
            "c_plus_action_units",
            "c_minus_action_units",
            "gamma_proxy_action_units",
            "ratio_to_first_dimensionless",
            "modulus_action_units",
        ],
        rows,
    )?;
    ctx.art.plot("gamma", "spectral norm proxy", ("k", "action units"), series, false)?;
    ctx.art.plot(
        "census",
        "hyperbolic orbits",
        ("k", "count"),
        vec![Series {
            label: "hyperbolic".into(),
            points: hyperbolic,
        }],
        true,
    )?;
    Ok(json!({
        "first": first,
        "min_ratio": min_ratio,
        "threshold": p.threshold,
        "holds": violations.is_empty(),
        "violations": violations,
    }))
}

fn parse_law(p: &SyntheticParams, seed: u64) -> Result<SyntheticLaw, CliError> {
    Ok(match p.law.as_str() {
        "exponential_growth" => SyntheticLaw::ExponentialGrowth { c: p.c },
        "superexp" => SyntheticLaw::SuperexpCountShrinkingBars,
        "almost_periodic" => SyntheticLaw::AlmostPeriodic {
            period: p.period,
            eps: p.law_eps,
            seed,
        },
        "pseudo_rotation" => SyntheticLaw::PseudoRotation { n: p.n },
        other => return Err(CliError::Config(format!("unknown law {other:?}"))),
    })
}

pub fn synthetic(p: &SyntheticParams, ctx: &mut Ctx) -> Result<Value, CliError> {
    let law = parse_law(p, ctx.seed)?;
    let window = check_range(p.kmin, p.kmax)?;
    let schedules = p
        .schedules
        .iter()
        .map(|s| parse_schedule(s, p.eps0))
        .collect::<Result<Vec<_>, _>>()?;
    let seq = generate(&law, p.kmax)?;
    let report = EntropyReport::build(&seq, &p.eps_grid, &schedules, window)?;
    write_entropy_report(ctx, &report)?;
    let flags = vec![true; report.sequential.len()];
    write_sequential(ctx, &report.sequential, &flags)?;
    let sequential: BTreeMap<String, f64> = report
        .sequential
        .iter()
        .map(|e| (e.schedule.label(), e.fit.value))
        .collect();
    let all_zero = report.profile.value == 0.0 && sequential.values().all(|&v| v == 0.0);
    Ok(json!({
        "law": law,
        "entropy_estimate": report.profile.value,
        "sequential": sequential,
        "all_zero": all_zero,
    }))
}

fn find_manifests(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    let mut entries: Vec<_> = std::fs::read_dir(dir)?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.path());
    for e in entries {
        let path = e.path();
        if path.is_dir() {
            find_manifests(&path, out)?;
        } else if path.file_name().is_some_and(|n| n == "manifest.json") {
            out.push(path);
        }
    }
    Ok(())
}

pub fn report(p: &ReportParams, ctx: &mut Ctx) -> Result<Value, CliError> {
    check(p.from.is_dir(), || format!("{} is not a directory", p.from.display()))?;
    let mut paths = Vec::new();
    find_manifests(&p.from, &mut paths)?;
    let mut runs = Vec::new();
    for path in paths {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
        if v["subcommand"] == "report" {
            continue;
        }
        let dir = path.parent().unwrap_or(Path::new("")).display().to_string();
        runs.push((dir, v));
    }
    ctx.art.csv(
        "report.csv",
        &["directory", "subcommand", "seed", "wall_seconds", "files_count", "summary_json"],
        runs.iter().map(|(dir, v)| {
            vec![
                dir.clone(),
                v["subcommand"].as_str().unwrap_or("").to_string(),
                v["seed"].to_string(),
                v["wall_seconds"].to_string(),
                v["files"].as_array().map_or(0, Vec::len).to_string(),
                v["summary"].to_string(),
            ]
        }),
    )?;
    let collected: Vec<Value> = runs
        .iter()
        .map(|(dir, v)| json!({"directory": dir, "manifest": v}))
        .collect();
    ctx.art.json("report.json", &collected)?;
    Ok(json!({ "runs": runs.len() }))
}
