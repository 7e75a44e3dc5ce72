//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semiqc_core::algorithms::*;
use semiqc_core::classical::*;
use semiqc_core::qsim::*;
use semiqc_core::quantum::*;
use semiqc_core::semiclassics::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn ok(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

/// Coefficients of `det(I - xU)` from its values at the `N+1` roots of unity (LU determinants),
/// recovered by an inverse DFT.
fn determinant_coefficients(u: &UnitaryMatrix) -> Vec<Complex64> {
    let n = u.dim();
    let m = n + 1;
    let id = nalgebra::DMatrix::<Complex64>::identity(n, n);
    let vals: Vec<Complex64> = (0..m)
        .map(|j| (&id - u.matrix() * Complex64::cis(2.0 * PI * j as f64 / m as f64)).determinant())
        .collect();
    (0..=n)
        .map(|k| {
            (0..m).map(|j| vals[j] * Complex64::cis(-2.0 * PI * ((j * k) % m) as f64 / m as f64)).sum::<Complex64>()
                / m as f64
        })
        .collect()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn cat_exactness() -> Outcome {
    let (model, cal) = calibrated(&MapModel::cat(CatMatrix::standard())).unwrap();
    let mut worst = 0.0f64;
    for n in [5, 8, 13, 21] {
        let exact = trace_powers(&quantize(&model, n).unwrap(), 3).unwrap();
        for t in 1..=3 {
            let tau = semiclassical_trace(&model, t, n).unwrap();
            worst = worst.max((tau - exact.get(t).unwrap()).norm());
        }
    }
    ok(worst <= 1e-6, format!("nu/step={} max |tau_t - tr U^t| = {worst:.2e}", cal.per_step))
}

fn orbit_counts() -> Outcome {
    let mut bad = Vec::new();
    for m in [CatMatrix::standard(), CatMatrix::arnold(), CatMatrix::new(3, 2, 4, 3).unwrap()] {
        let model = MapModel::cat(m);
        for t in 1..=6u32 {
            let points: usize = enumerate_periodic_orbits(&model, t as usize).unwrap().iter().map(|o| o.t_p).sum();
            let p = m.pow(t).unwrap();
            let expect = ((p[0][0] - 1) * (p[1][1] - 1) - p[0][1] * p[1][0]).unsigned_abs() as usize;
            if points != expect {
                bad.push(format!("cat {:?} t={t}: {points} vs {expect}", m.as_array()));
            }
        }
    }
    for t in 1..=12 {
        let points: usize = enumerate_periodic_orbits(&MapModel::baker(), t).unwrap().iter().map(|o| o.t_p).sum();
        if points != 1 << t {
            bad.push(format!("baker t={t}: {points}"));
        }
    }
    ok(bad.is_empty(), if bad.is_empty() { "cat t<=6 and baker t<=12 exact".into() } else { bad.join("; ") })
}

fn newton_resurgence() -> Outcome {
    let mut unitaries = Vec::new();
    for n in (2..=64).step_by(2) {
        unitaries.push((format!("baker N={n}"), quantize_baker(n).unwrap()));
    }
    for n in 2..=64 {
        unitaries.push((format!("cat N={n}"), quantize_cat(&CatMatrix::standard(), n).unwrap()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..20 {
        let n = rng.random_range(2..=32);
        unitaries.push((format!("haar#{i} N={n}"), haar_unitary(n, &mut rng).unwrap()));
    }
    let (mut e_newton, mut e_res, mut e_half) = (0.0f64, 0.0f64, 0.0f64);
    let mut worst = String::new();
    for (name, u) in &unitaries {
        let n = u.dim();
        let traces = trace_powers(u, n).unwrap();
        let det = det_neg(u).unwrap();
        let full = char_poly_from_traces(&traces, n, Some(det)).unwrap();
        let oracle = determinant_coefficients(u);
        let d = max_diff(&full.beta, &oracle);
        if d > e_newton {
            e_newton = d;
            worst = name.clone();
        }
        e_res = e_res.max(full.resurgence_residual.unwrap_or(0.0));
        let half_series = TraceSeries { n, values: traces.values[..n.div_ceil(2)].to_vec() };
        let half = char_poly_from_traces(&half_series, n, Some(det)).unwrap();
        e_half = e_half.max(max_diff(&half.beta, &full.beta));
    }
    ok(
        e_newton <= 1e-8 && e_res <= 1e-9 && e_half <= 1e-8,
        format!(
            "{} unitaries: newton {e_newton:.1e} (worst {worst}), resurgence {e_res:.1e}, half {e_half:.1e}",
            unitaries.len()
        ),
    )
}

fn spectrum_pipeline() -> Outcome {
    let (model, _) = calibrated(&MapModel::baker()).unwrap();
    let mut defects = Vec::new();
    let mut notes = Vec::new();
    let mut passed = true;
    for bits in [8, 10] {
        let cfg = SpectrumPipelineConfig::new(model.clone(), 4, 8, bits, bits, Readout::Exact).unwrap();
        match run_spectrum_from_orbits(&cfg) {
            Ok(res) => {
                let steps = ["I", "II", "III", "IV", "V", "VI"];
                let all_steps = steps.iter().all(|s| res.checkpoints.iter().any(|c| c.step == *s && c.passed));
                let within = res.estimates.iter().all(|e| e.defect <= e.bound.unwrap());
                passed &= all_steps && within && res.qubits <= 24;
                defects.push(res.max_defect());
                notes.push(format!("b={bits}: max defect {:.2e}, {} qubits", res.max_defect(), res.qubits));
            }
            Err(e) => {
                passed = false;
                notes.push(format!("b={bits}: {e}"));
            }
        }
    }
    if defects.len() == 2 {
        let shrink = defects[0] / defects[1];
        passed &= shrink >= 1.8;
        notes.push(format!("shrink {shrink:.2}"));
    }
    ok(passed, notes.join(", "))
}

fn traces_pipeline() -> Outcome {
    let mut notes = Vec::new();
    let mut passed = true;
    for (name, u) in [("baker N=4", quantize_baker(4).unwrap()), ("cat N=5", quantize_cat(&CatMatrix::standard(), 5).unwrap())] {
        let res = run_traces_from_quantum(&u, 4, Readout::Exact).unwrap();
        let d = res.max_defect();
        let w = res.valid_weight.unwrap();
        passed &= d <= 1e-9 && w > 0.5;
        notes.push(format!("{name}: defect {d:.1e}, D=0 weight {w:.3}"));
    }
    ok(passed, notes.join(", "))
}

fn probe() -> Outcome {
    let free = MapModel::kicked(0.0, 1.0, Potential::Cosine).unwrap();
    let mut notes = Vec::new();
    let mut passed = true;
    for n in [16, 64] {
        let a = integrability_probe(&free, n).unwrap();
        let b = integrability_probe(&MapModel::baker(), n).unwrap();
        passed &= a.verdict == Verdict::IntegrableLike && b.verdict == Verdict::ChaoticLike;
        notes.push(format!(
            "N={n}: free {:?} ({:.3}), baker {:?} ({:.3})",
            a.verdict, a.success_probability, b.verdict, b.success_probability
        ));
    }
    ok(passed, notes.join(", "))
}

fn action_peaks() -> Outcome {
    let model = MapModel::cat(CatMatrix::standard());
    let spec = action_spectrum(&model, 1, 256).unwrap();
    let actions: Vec<f64> = orbits_with_invariants(&model, 1, 1)
        .unwrap()
        .iter()
        .map(|o| rational_to_f64(o.invariants().unwrap().action))
        .collect();
    let tol = 1.0 / 256.0;
    let peaks_ok = spec.peaks.iter().all(|p| actions.iter().any(|&s| action_distance(p.frequency, s) <= tol));
    let actions_ok = actions.iter().all(|&s| spec.peaks.iter().any(|p| action_distance(p.frequency, s) <= tol));
    let freqs: Vec<String> = spec.peaks.iter().map(|p| format!("{:.4}", p.frequency)).collect();
    ok(peaks_ok && actions_ok && !spec.peaks.is_empty(), format!("peaks {freqs:?} vs actions {actions:?}"))
}

fn period_functions_check() -> Outcome {
    let m = CatMatrix::standard();
    let mut bad = Vec::new();
    let mut max_res = 0.0f64;
    for n in 2..=64 {
        let r = period_functions(&m, n).unwrap();
        let ratio = r.n_period as f64 / r.g as f64;
        if ![0.5, 1.0, 2.0].contains(&ratio) {
            bad.push(format!("N={n} ratio {ratio}"));
        }
        max_res = max_res.max(r.lattice_residual.unwrap());
        if n <= 32 {
            let run = phase_estimation_cat(&m, n, 10, &PhaseInput::Random { seed: 7 * n as u64 }, 8192, n as u64).unwrap();
            match period_from_phases(&run.counts, 10, 8) {
                Ok(est) if est.n == r.n_period => {}
                Ok(est) => bad.push(format!("N={n} phase estimation gives {} vs {}", est.n, r.n_period)),
                Err(e) => bad.push(format!("N={n} phase estimation failed: {e}")),
            }
        }
    }
    ok(bad.is_empty() && max_res <= 1e-8, format!("lattice residual {max_res:.1e}; {}", if bad.is_empty() { "n recovered for N<=32".into() } else { bad.join("; ") }))
}

fn simulator_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut notes = Vec::new();
    // Grover law
    let mut grover = 0.0f64;
    for _ in 0..50 {
        let layout = RegisterLayout::new(&[("x", 6)]).unwrap();
        let x = layout.id("x").unwrap();
        let amps = random_state(64, &mut rng);
        let marked: Vec<bool> = (0..64).map(|_| rng.random_bool(0.2)).collect();
        if !marked.iter().any(|&m| m) {
            continue;
        }
        let mut s = QState::from_amplitudes(layout.clone(), amps).unwrap();
        let k = rng.random_range(0..8);
        let log = s.amplitude_amplify(|i| marked[layout.value(i, x) as usize], k).unwrap();
        let th = log.initial_probability.sqrt().asin();
        grover = grover.max((log.achieved_probability.sqrt() - ((2 * k + 1) as f64 * th).sin().abs()).abs());
    }
    notes.push(format!("grover {grover:.1e}"));
    // QFT against the DFT matrix
    let layout = RegisterLayout::new(&[("r", 3)]).unwrap();
    let r = layout.id("r").unwrap();
    let f = dft_matrix(8);
    let mut qft = 0.0f64;
    for j in 0..8 {
        let mut s = QState::basis(layout.clone(), j);
        s.apply_dft(r, 3, None, false).unwrap();
        for k in 0..8 {
            qft = qft.max((s.amplitude(k) - f[(k, j)]).norm());
        }
    }
    notes.push(format!("qft {qft:.1e}"));
    // oracle followed by its uncompute
    let layout = RegisterLayout::new(&[("x", 4), ("y", 4)]).unwrap();
    let (x, y) = (layout.id("x").unwrap(), layout.id("y").unwrap());
    let s0 = QState::from_amplitudes(layout.clone(), random_state(256, &mut rng)).unwrap();
    let mut s = s0.clone();
    let g = |i: usize| (layout.value(i, x) * 7 + 3) % 16;
    s.apply_xor(y, g, "f").unwrap();
    s.apply_xor(y, g, "f").unwrap();
    let identity = s.amplitudes() == s0.amplitudes();
    notes.push(format!("uncompute exact {identity}"));
    // norm fuzz
    let layout = RegisterLayout::new(&[("a", 3), ("b", 3), ("c", 2)]).unwrap();
    let ids: Vec<RegId> = ["a", "b", "c"].iter().map(|n| layout.id(n).unwrap()).collect();
    let mut s = QState::from_amplitudes(layout.clone(), random_state(256, &mut rng)).unwrap();
    let small = haar_unitary(5, &mut rng).unwrap();
    let mut fuzz = 0.0f64;
    for _ in 0..10_000 {
        let t = rng.random_range(0..3);
        let ctl_reg = ids[(t + 1) % 3];
        let v = rng.random_range(0..4u64);
        let ctl = Control::equals(ctl_reg, v);
        let ctl = if rng.random_bool(0.5) { Some(&ctl) } else { None };
        let w = layout.width(ids[t]);
        match rng.random_range(0..6) {
            0 => s.apply_gate(Gate::H, ids[t], rng.random_range(0..w), ctl).unwrap(),
            1 => s.apply_gate(Gate::Ry(rng.random_range(-PI..PI)), ids[t], rng.random_range(0..w), ctl).unwrap(),
            2 => s.apply_gate(Gate::Pz(rng.random_range(-PI..PI)), ids[t], rng.random_range(0..w), ctl).unwrap(),
            3 => s.apply_dft(ids[t], w, ctl, rng.random_bool(0.5)).unwrap(),
            4 if w == 3 => s.apply_unitary(ids[t], &small, ctl).unwrap(),
            _ => {
                let src = ids[(t + 2) % 3];
                let mask = (1u64 << w) - 1;
                s.apply_xor(ids[t], |i| layout.value(i, src) & mask, "copy").unwrap()
            }
        }
        fuzz = fuzz.max((s.norm_sqr() - 1.0).abs());
    }
    notes.push(format!("norm drift {fuzz:.1e}"));
    ok(grover <= 1e-9 && qft <= 1e-12 && identity && fuzz <= 1e-10, notes.join(", "))
}

type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("cat-map exactness", Some(Duration::from_secs(10)), cat_exactness),
        ("orbit counting", None, orbit_counts),
        ("newton/resurgence", None, newton_resurgence),
        ("orbit-sum pipeline", Some(Duration::from_secs(300)), spectrum_pipeline),
        ("quantum-trace pipeline", None, traces_pipeline),
        ("integrability probe", None, probe),
        ("action spectrum", Some(Duration::from_secs(120)), action_peaks),
        ("period functions", None, period_functions_check),
        ("simulator laws", None, simulator_laws),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let passed = out.passed && in_time;
        failures += usize::from(!passed);
        println!(
            "{} [{}] {name}: {} ({:.2}s{})",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            took.as_secs_f64(),
            limit.map(|l| format!(" / limit {}s", l.as_secs())).unwrap_or_default()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
