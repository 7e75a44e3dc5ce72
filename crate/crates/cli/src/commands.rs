//! One function per subcommand; each writes its artifacts and returns a JSON summary.

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use semiqc_core::algorithms::{
    integrability_probe_unitary, period_from_phases, phase_estimation, run_spectrum_from_orbits,
    run_traces_from_quantum, PhaseInput, PipelineResult, SpectrumPipelineConfig,
};
use semiqc_core::classical::{
    orbits_with_invariants, rational_to_f64, MapKind, MapModel, OrbitLabel,
};
use semiqc_core::quantum::{
    char_poly_from_traces, det_neg, haar_unitary, quantize, spectral_density, trace_powers,
    UnitaryMatrix, MATRIX_POWER_CAP,
};
use semiqc_core::semiclassics::{
    action_distance, action_spectrum_from_traces, calibrated, period_functions, quantizable_at,
    trace_at, trace_reports, MaslovCalibration,
};
use semiqc_core::Error as CoreError;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, MapChoice};
use crate::error::{CliError, CliResult};
use crate::formats::{
    complex_json, complex_rows, num, write_csv, write_json, write_jsonl, write_unitary, Header,
};

pub const SUBCOMMANDS: [&str; 12] = [
    "orbits",
    "quantize",
    "traces",
    "charpoly",
    "density",
    "semiclassical",
    "action-spectrum",
    "cat-period",
    "spectrum-from-orbits",
    "traces-from-quantum",
    "integrability-probe",
    "phase-estimation",
];

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    header: Header,
}

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.cfg.output.join(name)
    }
}

/// Runs `config.subcommand`, writing artifacts under `config.output` plus `<subcommand>.json`.
pub fn execute(cfg: &ExperimentConfig) -> CliResult<Value> {
    let name = cfg.subcommand.as_str();
    if !SUBCOMMANDS.contains(&name) {
        return Err(CliError::Validation(format!("unknown subcommand {name:?}")));
    }
    fs::create_dir_all(&cfg.output)?;
    let ctx = Ctx {
        cfg,
        header: Header::new(cfg),
    };
    let result = match name {
        "orbits" => orbits(&ctx),
        "quantize" => quantize_cmd(&ctx),
        "traces" => traces(&ctx),
        "charpoly" => charpoly(&ctx),
        "density" => density(&ctx),
        "semiclassical" => semiclassical(&ctx),
        "action-spectrum" => action_spectrum(&ctx),
        "cat-period" => cat_period(&ctx),
        "spectrum-from-orbits" => spectrum_from_orbits(&ctx),
        "traces-from-quantum" => traces_from_quantum(&ctx),
        "integrability-probe" => probe(&ctx),
        "phase-estimation" => phase(&ctx),
        _ => unreachable!(),
    }?;
    write_json(
        &ctx.path(&format!("{name}.json")),
        &ctx.header,
        cfg,
        &result,
    )?;
    Ok(result)
}

fn unitary(cfg: &ExperimentConfig, n: usize) -> CliResult<UnitaryMatrix> {
    if n > MATRIX_POWER_CAP {
        return Err(CoreError::CapExceeded {
            what: "matrix dimension",
            value: n as u64,
            cap: MATRIX_POWER_CAP as u64,
        }
        .into());
    }
    if let Some(path) = &cfg.matrix_file {
        let u = crate::formats::read_unitary(path)?;
        if !cfg.dims.is_empty() && u.dim() != n {
            return Err(CliError::Validation(format!(
                "matrix file has dimension {}, --N is {n}",
                u.dim()
            )));
        }
        return Ok(u);
    }
    Ok(match cfg.model.map {
        MapChoice::Haar => haar_unitary(n, &mut ChaCha8Rng::seed_from_u64(cfg.seed))?,
        MapChoice::Identity => UnitaryMatrix::identity(n),
        _ => quantize(&cfg.model.require_model()?, n)?,
    })
}

fn matrix_dim(cfg: &ExperimentConfig) -> CliResult<usize> {
    match (&cfg.matrix_file, cfg.dims.is_empty()) {
        (Some(path), true) => Ok(crate::formats::read_unitary(path)?.dim()),
        _ => cfg.single_dim(),
    }
}

/// Model with the Maslov index from the config or from calibration.
fn semiclassical_model(cfg: &ExperimentConfig) -> CliResult<(MapModel, Option<MaslovCalibration>)> {
    let model = cfg.model.require_model()?;
    if cfg.model.maslov.is_some() {
        return Ok((model, None));
    }
    let (m, cal) = calibrated(&model)?;
    Ok((m, Some(cal)))
}

fn calibration_json(cal: &Option<MaslovCalibration>) -> Value {
    match cal {
        Some(c) => {
            json!({ "per_step": c.per_step, "reference_n": c.reference_n, "residual": c.residual })
        }
        None => Value::Null,
    }
}

fn orbits(ctx: &Ctx) -> CliResult<Value> {
    let cfg = ctx.cfg;
    let t = cfg.need(cfg.t, "t")?;
    let n = cfg.dim_or(1)?;
    let base = cfg.model.require_model()?;
    let (model, cal) = match semiclassical_model(cfg) {
        Ok(x) => x,
        // maps without a quantization keep the default index
        Err(CliError::Core(_)) => (base, None),
        Err(e) => return Err(e),
    };
    let list = orbits_with_invariants(&model, t, n)?;
    let mut rows = Vec::with_capacity(list.len());
    for o in &list {
        let inv = o.invariants()?;
        let label = match &o.label {
            OrbitLabel::Code(c) => c.to_string(),
            l @ OrbitLabel::Lattice(_) => l.to_string(),
        };
        rows.push(vec![
            o.t.to_string(),
            o.t_p.to_string(),
            o.r.to_string(),
            label,
            num(o.start().q),
            num(o.start().p),
            inv.action.to_string(),
            num(inv.stability),
            num(inv.amplitude),
            inv.maslov.to_string(),
        ]);
    }
    write_csv(
        &ctx.path("orbits.csv"),
        &ctx.header,
        &[
            "t",
            "t_p",
            "r",
            "code_or_lattice",
            "q0",
            "p0",
            "S_p",
            "det_I_minus_Mr",
            "A_p",
            "nu_p",
        ],
        &rows,
    )?;
    let points: usize = list.iter().map(|o| o.t_p).sum();
    let expected = match model.kind() {
        MapKind::Cat(m) => {
            let p = m.pow(t as u32)?;
            Some(((p[0][0] - 1) * (p[1][1] - 1) - p[0][1] * p[1][0]).unsigned_abs())
        }
        _ => model.symbolic().ok().map(|s| s.trace_power(t as u32)),
    };
    Ok(json!({
        "t": t,
        "orbits": list.len(),
        "points": points,
        "expected_points": expected.map(|e| e.to_string()),
        "calibration": calibration_json(&cal),
    }))
}

fn quantize_cmd(ctx: &Ctx) -> CliResult<Value> {
    let n = ctx.cfg.single_dim()?;
    let u = unitary(ctx.cfg, n)?;
    write_unitary(&ctx.path("matrix.bin"), &u)?;
    Ok(
        json!({ "N": n, "unitarity_defect": u.unitarity_defect(), "trace": complex_json(u.trace()) }),
    )
}

fn traces(ctx: &Ctx) -> CliResult<Value> {
    let n = matrix_dim(ctx.cfg)?;
    let t_max = ctx.cfg.t_max.unwrap_or(n);
    let u = unitary(ctx.cfg, n)?;
    let series = trace_powers(&u, t_max)?;
    write_csv(
        &ctx.path("traces.csv"),
        &ctx.header,
        &["t", "re", "im"],
        &complex_rows(1, &series.values),
    )?;
    let max_abs = series.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(json!({ "N": n, "t_max": t_max, "max_abs_trace": max_abs }))
}

fn charpoly(ctx: &Ctx) -> CliResult<Value> {
    let n = matrix_dim(ctx.cfg)?;
    let u = unitary(ctx.cfg, n)?;
    let t_max = if ctx.cfg.half { n.div_ceil(2) } else { n };
    let series = trace_powers(&u, t_max)?;
    let det = det_neg(&u)?;
    let cp = char_poly_from_traces(&series, n, Some(det))?;
    write_csv(
        &ctx.path("beta.csv"),
        &ctx.header,
        &["k", "re", "im"],
        &complex_rows(0, &cp.beta),
    )?;
    Ok(json!({
        "N": n,
        "mode": if ctx.cfg.half { "half" } else { "full" },
        "traces_used": t_max,
        "beta0": complex_json(cp.beta[0]),
        "det_neg_u": complex_json(det),
        "resurgence_residual": cp.resurgence_residual,
    }))
}

fn density(ctx: &Ctx) -> CliResult<Value> {
    let n = matrix_dim(ctx.cfg)?;
    let cutoff = ctx.cfg.t.unwrap_or(n);
    let points = ctx.cfg.points.unwrap_or(512);
    if points == 0 {
        return Err(CliError::Validation("--points must be positive".into()));
    }
    let u = unitary(ctx.cfg, n)?;
    let series = trace_powers(&u, cutoff.max(1))?;
    let grid: Vec<f64> = (0..points)
        .map(|k| 2.0 * PI * k as f64 / points as f64)
        .collect();
    let d = spectral_density(&series, &grid, cutoff)?;
    let rows: Vec<Vec<String>> = grid
        .iter()
        .zip(&d)
        .map(|(th, v)| vec![num(*th), num(*v)])
        .collect();
    write_csv(
        &ctx.path("density.csv"),
        &ctx.header,
        &["theta", "density"],
        &rows,
    )?;
    let integral = d.iter().sum::<f64>() * 2.0 * PI / points as f64;
    Ok(json!({ "N": n, "cutoff": cutoff, "points": points, "integral": integral }))
}

fn semiclassical(ctx: &Ctx) -> CliResult<Value> {
    let cfg = ctx.cfg;
    let (model, cal) = semiclassical_model(cfg)?;
    let t_max = cfg.t_max.unwrap_or(3);
    let dims = if cfg.dims.is_empty() {
        vec![5, 8, 13, 21]
    } else {
        cfg.dims.clone()
    };
    let reports = dims
        .par_iter()
        .map(|&n| trace_reports(&model, n, t_max))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for r in reports.iter().flatten() {
        worst = worst.max(r.abs_defect());
        rows.push(vec![
            r.n.to_string(),
            r.t.to_string(),
            num(r.exact.re),
            num(r.exact.im),
            num(r.semiclassical.re),
            num(r.semiclassical.im),
            num(r.abs_defect()),
            num(r.rel_defect()),
        ]);
    }
    write_csv(
        &ctx.path("trace_report.csv"),
        &ctx.header,
        &[
            "N",
            "t",
            "exact_re",
            "exact_im",
            "semiclassical_re",
            "semiclassical_im",
            "abs_defect",
            "rel_defect",
        ],
        &rows,
    )?;
    Ok(
        json!({ "N": dims, "t_max": t_max, "calibration": calibration_json(&cal), "max_abs_defect": worst }),
    )
}

fn action_spectrum(ctx: &Ctx) -> CliResult<Value> {
    let cfg = ctx.cfg;
    let (model, cal) = semiclassical_model(cfg)?;
    let t = cfg.t.unwrap_or(1);
    let n_max = cfg.n_max.unwrap_or(256);
    if n_max < 8 || t == 0 {
        return Err(CliError::Validation(
            "action spectrum needs --n-max ≥ 8 and --t ≥ 1".into(),
        ));
    }
    let traces = (0..n_max)
        .into_par_iter()
        .map(|n| trace_at(&model, t, n))
        .collect::<Result<Vec<Complex64>, _>>()?;
    let populated = (0..n_max).filter(|&n| quantizable_at(&model, n)).count();
    let spec = action_spectrum_from_traces(&traces, populated)?;
    let rows: Vec<Vec<String>> = spec
        .magnitudes
        .iter()
        .enumerate()
        .map(|(k, m)| vec![k.to_string(), num(k as f64 / n_max as f64), num(*m)])
        .collect();
    write_csv(
        &ctx.path("action_spectrum.csv"),
        &ctx.header,
        &["bin", "frequency", "magnitude"],
        &rows,
    )?;
    let rows: Vec<Vec<String>> = spec
        .peaks
        .iter()
        .map(|p| vec![p.bin.to_string(), num(p.frequency), num(p.weight)])
        .collect();
    write_csv(
        &ctx.path("peaks.csv"),
        &ctx.header,
        &["bin", "frequency", "weight"],
        &rows,
    )?;
    let actions: Vec<f64> = orbits_with_invariants(&model, t, 1)?
        .iter()
        .map(|o| o.invariants().map(|i| rational_to_f64(i.action)))
        .collect::<Result<_, _>>()?;
    let peaks: Vec<Value> = spec
        .peaks
        .iter()
        .map(|p| {
            let nearest = actions
                .iter()
                .map(|&s| action_distance(p.frequency, s))
                .fold(f64::INFINITY, f64::min);
            json!({ "frequency": p.frequency, "weight": p.weight, "distance_to_action": nearest })
        })
        .collect();
    Ok(
        json!({ "t": t, "n_max": n_max, "calibration": calibration_json(&cal), "classical_actions": actions, "peaks": peaks }),
    )
}

fn cat_period(ctx: &Ctx) -> CliResult<Value> {
    let cfg = ctx.cfg;
    let m = cfg.model.cat_matrix()?;
    let dims: Vec<usize> = match cfg.n_max {
        Some(top) => (2..=top).collect(),
        None if !cfg.dims.is_empty() => cfg.dims.clone(),
        None => return Err(CliError::Validation("--N or --n-max is required".into())),
    };
    let bits = cfg.phase_bits.unwrap_or(10);
    let shots = cfg.shots.unwrap_or(8192);
    let records = dims
        .par_iter()
        .map(|&n| -> CliResult<Value> {
            let r = period_functions(&m, n)?;
            let mut line = json!({
                "N": n, "g": r.g, "n": r.n_period, "phi": r.phi, "lattice_residual": r.lattice_residual,
            });
            if cfg.pe_max.is_some_and(|top| n <= top) && m.is_quantizable() {
                let input = PhaseInput::Random { seed: cfg.seed.wrapping_add(n as u64) };
                let run = semiqc_core::algorithms::phase_estimation_cat(&m, n, bits, &input, shots, cfg.seed)?;
                let est = period_from_phases(&run.counts, bits, 8)?;
                line["n_phase_estimation"] = json!(est.n);
                line["phi_phase_estimation"] = json!(est.phi);
            }
            Ok(line)
        })
        .collect::<CliResult<Vec<_>>>()?;
    write_jsonl(&ctx.path("periods.jsonl"), &ctx.header, &records)?;
    let ratio_ok = records.iter().all(|r| {
        let q = r["n"].as_f64().unwrap() / r["g"].as_f64().unwrap();
        q == 0.5 || q == 1.0 || q == 2.0
    });
    let max_residual = records
        .iter()
        .filter_map(|r| r["lattice_residual"].as_f64())
        .fold(0.0, f64::max);
    let pe: Vec<&Value> = records
        .iter()
        .filter(|r| r.get("n_phase_estimation").is_some())
        .collect();
    let pe_ok = pe.iter().all(|r| r["n_phase_estimation"] == r["n"]);
    let mut summary = json!({
        "dims": dims.len(),
        "ratios_in_half_one_two": ratio_ok,
        "max_lattice_residual": max_residual,
        "phase_estimation_runs": pe.len(),
        "phase_estimation_matches": pe_ok,
    });
    // per-N values live in periods.jsonl; echo them for a single N
    if let [only] = records.as_slice() {
        summary["g"] = only["g"].clone();
        summary["n"] = only["n"].clone();
    }
    Ok(summary)
}

fn pipeline_json(res: &PipelineResult) -> Value {
    let estimates: Vec<Value> = res
        .estimates
        .iter()
        .map(|e| {
            json!({
                "t": e.t,
                "estimate_re": e.estimate.re,
                "estimate_im": e.estimate.im,
                "oracle_re": e.oracle.re,
                "oracle_im": e.oracle.im,
                "defect": e.defect,
                "bound": e.bound,
                "zero": e.zero,
                "shot_magnitude": e.shot_magnitude,
            })
        })
        .collect();
    let amplifications: Vec<Value> = res
        .amplifications
        .iter()
        .map(|a| {
            json!({
                "k": a.rounds,
                "initial_probability": a.initial_probability,
                "predicted_probability": a.predicted_probability,
                "measured_probability": a.achieved_probability,
            })
        })
        .collect();
    json!({
        "estimates": estimates,
        "checkpoints": res.checkpoints,
        "amplifications": amplifications,
        "residual_d_mass": res.residual_d_mass,
        "valid_weight": res.valid_weight,
        "qubits": res.qubits,
        "max_defect": res.max_defect(),
        "warnings": res.warnings,
    })
}

fn spectrum_from_orbits(ctx: &Ctx) -> CliResult<Value> {
    let cfg = ctx.cfg;
    let (model, _) = semiclassical_model(cfg)?;
    let t_max = cfg.t_max.unwrap_or(4);
    let n = cfg.dim_or(2 * t_max)?;
    let bc = cfg.phase_bits.unwrap_or(8);
    let bd = cfg.amplitude_bits.unwrap_or(bc);
    let pc = SpectrumPipelineConfig::new(model, t_max, n, bc, bd, cfg.readout())?;
    let res = run_spectrum_from_orbits(&pc)?;
    let mut out = pipeline_json(&res);
    let c = pc.constants;
    out["constants"] =
        json!({ "lambda": c.lambda, "Lambda": c.big_lambda, "mu": c.mu, "kappa": c.kappa });
    Ok(out)
}

fn traces_from_quantum(ctx: &Ctx) -> CliResult<Value> {
    let n = matrix_dim(ctx.cfg)?;
    let u = unitary(ctx.cfg, n)?;
    let res = run_traces_from_quantum(&u, ctx.cfg.t_max.unwrap_or(4), ctx.cfg.readout())?;
    Ok(pipeline_json(&res))
}

fn probe(ctx: &Ctx) -> CliResult<Value> {
    let n = matrix_dim(ctx.cfg)?;
    let p = integrability_probe_unitary(&unitary(ctx.cfg, n)?)?;
    Ok(serde_json::to_value(p)?)
}

fn parse_input(s: Option<&str>, seed: u64) -> CliResult<PhaseInput> {
    match s.unwrap_or("random") {
        "random" => Ok(PhaseInput::Random { seed }),
        other => other
            .strip_prefix("eigenvector:")
            .and_then(|j| j.parse().ok())
            .map(PhaseInput::Eigenvector)
            .ok_or_else(|| {
                CliError::Validation(format!(
                    "input {other:?} is neither random nor eigenvector:<j>"
                ))
            }),
    }
}

fn phase(ctx: &Ctx) -> CliResult<Value> {
    let cfg = ctx.cfg;
    let n = matrix_dim(cfg)?;
    let u = unitary(cfg, n)?;
    let bits = cfg.phase_bits.unwrap_or(8);
    let shots = cfg.shots.unwrap_or(8192);
    let input = parse_input(cfg.input.as_deref(), cfg.seed)?;
    let run = phase_estimation(&u, bits, &input, shots, cfg.seed)?;
    let len = 1u64 << bits;
    let rows: Vec<Vec<String>> = run
        .counts
        .iter()
        .map(|(&y, &c)| {
            vec![
                y.to_string(),
                num(2.0 * PI * y as f64 / len as f64),
                c.to_string(),
                num(run.distribution[y as usize]),
            ]
        })
        .collect();
    write_csv(
        &ctx.path("phases.csv"),
        &ctx.header,
        &["y", "theta", "count", "probability"],
        &rows,
    )?;
    let mut out = json!({ "N": n, "bits": bits, "shots": shots, "eigenphase": run.eigenphase });
    if let Some(th) = run.eigenphase {
        let x = th / (2.0 * PI) * len as f64;
        let near: f64 = (0..len)
            .filter(|&y| {
                let d = (y as f64 - x).rem_euclid(len as f64);
                d.min(len as f64 - d) <= 1.0
            })
            .map(|y| run.distribution[y as usize])
            .sum();
        out["probability_within_one_lsb"] = json!(near);
    } else {
        let est = period_from_phases(&run.counts, bits, 8)?;
        out["period"] = json!({
            "n": est.n,
            "phi": est.phi,
            "clusters": est.clusters.len(),
            "continued_fraction_n": est.continued_fraction_n,
            "warnings": est.warnings,
        });
        if cfg.model.map == MapChoice::Cat && cfg.matrix_file.is_none() {
            let r = period_functions(&cfg.model.cat_matrix()?, n)?;
            out["oracle"] = json!({ "g": r.g, "n": r.n_period, "phi": r.phi });
        }
    }
    Ok(out)
}
