use core::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::classical::{CatMatrix, KickedParams, Potential};
use crate::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// Coefficients of Π_k (1 - x e^{iθ_k}), from values on the (N+1)-th roots of unity.
fn product_coefficients(phases: &[f64]) -> Vec<Complex64> {
    let n = phases.len();
    let l = n + 1;
    let vals: Vec<Complex64> = (0..l)
        .map(|j| {
            let w = Complex64::cis(2.0 * PI * j as f64 / l as f64);
            phases.iter().map(|&th| c(1.0, 0.0) - w * Complex64::cis(th)).product()
        })
        .collect();
    (0..l)
        .map(|k| {
            vals.iter().enumerate().map(|(j, v)| v * Complex64::cis(-2.0 * PI * (j * k) as f64 / l as f64)).sum::<Complex64>()
                / l as f64
        })
        .collect()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn cat_is_unitary_for_several_matrices() {
    let mats = [
        CatMatrix::standard(),
        CatMatrix::new(3, 2, 4, 3).unwrap(),
        CatMatrix::new(2, -1, -3, 2).unwrap(),
        CatMatrix::new(1, 2, 2, 5).unwrap(),
    ];
    for m in &mats {
        for n in [1, 2, 3, 5, 8, 13] {
            let u = quantize_cat(m, n).unwrap();
            assert!(u.unitarity_defect() < 1e-10, "{m:?} N={n}");
        }
    }
}

#[test]
fn arnold_is_not_quantizable() {
    assert!(matches!(quantize_cat(&CatMatrix::arnold(), 5), Err(crate::Error::NotQuantizable(_))));
}

#[test]
fn baker_small() {
    let u = quantize_baker(2).unwrap();
    let s = 1.0 / 2f64.sqrt();
    let expect = DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
    assert!((u.matrix() - expect).norm() < 1e-15);
    let tr = trace_powers(&u, 2).unwrap();
    assert!(tr.values[0].norm() < 1e-15);
    assert!((tr.values[1] - c(2.0, 0.0)).norm() < 1e-14);
    assert!(quantize_baker(5).is_err());
    for n in (2..=64).step_by(2) {
        assert!(quantize_baker(n).unwrap().unitarity_defect() < 1e-12);
    }
}

#[test]
fn kicked_free_motion() {
    let p = KickedParams { k: 0.0, period: 0.0, potential: Potential::Cosine };
    let u = quantize_kicked(&p, 6).unwrap();
    assert!((u.matrix() - DMatrix::identity(6, 6)).norm() < 1e-13);
    let p = KickedParams { k: 0.0, period: 1.0, potential: Potential::Cosine };
    for n in [16usize, 64] {
        let u = quantize_kicked(&p, n).unwrap();
        assert!(u.unitarity_defect() < 1e-12);
        // quadratic Gauss sum: |Σ_j e^{-iπ j^2/N}| = √N for even N
        assert!((u.trace().norm() - (n as f64).sqrt()).abs() < 1e-9);
    }
}

#[test]
fn kicked_chaotic_traces_are_small() {
    let p = KickedParams { k: 10.0, period: 1.0, potential: Potential::Cosine };
    let n = 128;
    let u = quantize_kicked(&p, n).unwrap();
    let tr = trace_powers(&u, 4).unwrap();
    for v in &tr.values {
        assert!(v.norm() < 0.5 * (n as f64).sqrt(), "{v}");
    }
}

#[test]
fn trace_examples() {
    let tr = trace_powers(&UnitaryMatrix::identity(3), 4).unwrap();
    assert!(tr.values.iter().all(|v| (v - c(3.0, 0.0)).norm() < 1e-15));
    let u = UnitaryMatrix::from_phases(&[0.0, PI]);
    let tr = trace_powers(&u, 2).unwrap();
    assert!(tr.values[0].norm() < 1e-15 && (tr.values[1] - c(2.0, 0.0)).norm() < 1e-15);
}

#[test]
fn trace_paths_agree() {
    for u in [quantize_baker(32).unwrap(), quantize_cat(&CatMatrix::standard(), 21).unwrap()] {
        let a = trace_powers(&u, 10).unwrap();
        let b = trace_powers_from_phases(&eigenphases(&u).unwrap(), 10);
        assert!(max_diff(&a.values, &b.values) < 1e-9);
        assert!(a.values.iter().all(|v| v.norm() <= u.dim() as f64 + 1e-9));
    }
}

#[test]
fn eigenphase_examples() {
    assert_eq!(eigenphases(&UnitaryMatrix::identity(4)).unwrap(), vec![0.0; 4]);
    let ph = eigenphases(&UnitaryMatrix::from_phases(&[PI / 2.0, 3.0 * PI / 2.0])).unwrap();
    assert!((ph[0] - PI / 2.0).abs() < 1e-14 && (ph[1] - 3.0 * PI / 2.0).abs() < 1e-14);
    let u = quantize_baker(16).unwrap();
    let s: Complex64 = eigenphases(&u).unwrap().iter().map(|&t| Complex64::cis(t)).sum();
    assert!((s - u.trace()).norm() < 1e-8);
}

#[test]
fn eigenvectors_are_eigenvectors() {
    let u = quantize_cat(&CatMatrix::standard(), 13).unwrap();
    let es = eigensystem(&u).unwrap();
    for k in 0..13 {
        let v: Vec<Complex64> = es.vectors.column(k).iter().copied().collect();
        let uv = u.apply(&v).unwrap();
        let lam = Complex64::cis(es.phases[k]);
        assert!(uv.iter().zip(&v).all(|(a, b)| (a - lam * b).norm() < 1e-10));
    }
}

#[test]
fn eigensystem_respects_cap() {
    let u = UnitaryMatrix::identity(8);
    assert!(matches!(eigensystem_with_cap(&u, 4), Err(crate::Error::CapExceeded { .. })));
}

#[test]
fn charpoly_examples() {
    let tr = trace_powers(&UnitaryMatrix::from_phases(&[0.0, PI]), 2).unwrap();
    let cp = char_poly_from_traces(&tr, 2, None).unwrap();
    assert!(max_diff(&cp.beta, &[c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]) < 1e-14);
    let tr = trace_powers(&UnitaryMatrix::identity(2), 2).unwrap();
    let cp = char_poly_from_traces(&tr, 2, None).unwrap();
    assert!(max_diff(&cp.beta, &[c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)]) < 1e-14);
}

#[test]
fn charpoly_needs_traces() {
    let tr = trace_powers(&UnitaryMatrix::identity(4), 1).unwrap();
    assert!(matches!(char_poly_from_traces(&tr, 4, None), Err(crate::Error::InsufficientData(_))));
    assert!(matches!(char_poly_from_traces(&tr, 4, Some(c(1.0, 0.0))), Err(crate::Error::InsufficientData(_))));
}

#[test]
fn charpoly_matches_eigen_product_for_haar() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u = haar_unitary(16, &mut rng).unwrap();
    let ph = eigenphases(&u).unwrap();
    let d = det_neg(&u).unwrap();
    let tr = trace_powers(&u, 16).unwrap();
    let full = char_poly_from_traces(&tr, 16, Some(d)).unwrap();
    assert!(max_diff(&full.beta, &product_coefficients(&ph)) < 1e-9);
    assert!(full.resurgence_residual.unwrap() < 1e-9);
    assert!((full.beta[16].norm() - 1.0).abs() < 1e-9);
    let half_tr = TraceSeries { n: 16, values: tr.values[..8].to_vec() };
    let half = char_poly_from_traces(&half_tr, 16, Some(d)).unwrap();
    assert!(max_diff(&half.beta, &full.beta) < 1e-8);
}

#[test]
fn charpoly_odd_dimension_half_path() {
    let u = quantize_cat(&CatMatrix::standard(), 13).unwrap();
    let d = det_neg(&u).unwrap();
    let tr = trace_powers(&u, 13).unwrap();
    let full = char_poly_from_traces(&tr, 13, Some(d)).unwrap();
    let half = char_poly_from_traces(&TraceSeries { n: 13, values: tr.values[..7].to_vec() }, 13, Some(d)).unwrap();
    assert!(max_diff(&half.beta, &full.beta) < 1e-8);
    // roots of the polynomial are the conjugate-inverse eigenvalues
    for th in eigenphases(&u).unwrap() {
        assert!(full.eval(Complex64::cis(-th)).norm() < 1e-8);
    }
}

#[test]
fn density_dirichlet_kernel() {
    let tr = trace_powers(&UnitaryMatrix::identity(1), 5).unwrap();
    let d = spectral_density(&tr, &[0.0, 1.0], 5).unwrap();
    assert!((d[0] - 11.0 / (2.0 * PI)).abs() < 1e-13);
    let expect = (1.0 + 2.0 * (1..=5).map(|t| (t as f64).cos()).sum::<f64>()) / (2.0 * PI);
    assert!((d[1] - expect).abs() < 1e-13);
    assert!(spectral_density(&tr, &[0.0], 6).is_err());
}

#[test]
fn density_integrates_to_dimension() {
    let u = quantize_baker(8).unwrap();
    let tr = trace_powers(&u, 8).unwrap();
    let m = 4096;
    let grid: Vec<f64> = (0..=m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
    let d = spectral_density(&tr, &grid, 8).unwrap();
    let h = 2.0 * PI / m as f64;
    let integral = h * (d.iter().sum::<f64>() - 0.5 * (d[0] + d[m]));
    assert!((integral - 8.0).abs() < 8e-6);
}

#[test]
fn density_peaks_near_eigenphases() {
    let u = quantize_baker(8).unwrap();
    let cutoff = 8;
    let tr = trace_powers(&u, cutoff).unwrap();
    let m = 2048;
    let grid: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
    let d = spectral_density(&tr, &grid, cutoff).unwrap();
    let ph = eigenphases(&u).unwrap();
    let resolution = 2.0 * PI / (2 * cutoff + 1) as f64;
    let maxima: Vec<f64> =
        (0..m).filter(|&j| d[j] > d[(j + m - 1) % m] && d[j] >= d[(j + 1) % m] && d[j] > 0.5).map(|j| grid[j]).collect();
    assert!(!maxima.is_empty());
    let circ = |a: f64, b: f64| {
        let x = (a - b).rem_euclid(2.0 * PI);
        x.min(2.0 * PI - x)
    };
    for x in maxima {
        let nearest = ph.iter().map(|&t| circ(t, x)).fold(f64::INFINITY, f64::min);
        assert!(nearest < resolution, "maximum at {x} is {nearest} from the spectrum");
    }
}

#[test]
fn haar_unitaries_are_unitary_and_seeded() {
    let a = haar_unitary(12, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let b = haar_unitary(12, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    assert_eq!(a, b);
    assert!(a.unitarity_defect() < 1e-12);
}
