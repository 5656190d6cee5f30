use std::f64::consts::{PI, TAU};

use qcomb_core::experiment::{
    estimate_visibility, fringe_shift, phase_grid, raw_visibility, run_dispersion_scan,
    DetectorModel, Interferometer, SweepRecord,
};
use qcomb_core::numerics::{fit_harmonics, solve_depth_for_power, solve_depth_for_ratio, wrap_phase};
use qcomb_core::{CombGrid, CombState, FiberSpec, Modulator};

fn flat(n: usize) -> CombState {
    CombState::flat(CombGrid::new(194.55, 0.036, 0.012, n).unwrap())
}

fn qubit_modulator() -> Modulator {
    Modulator::new(solve_depth_for_power(0.32, 1).unwrap(), 0.018).unwrap()
}

fn period(samples: usize) -> Vec<f64> {
    (0..samples).map(|i| TAU * i as f64 / samples as f64).collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn std_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

#[test]
fn noiseless_qubit_fits_unit_visibility_cosine() {
    let inter = Interferometer::qubit(1, &flat(2), &qubit_modulator()).unwrap();
    let phases = period(64);
    let rates = inter.rates(&phases).unwrap();
    let fit = fit_harmonics(&phases, &rates, 1).unwrap();
    let a = fit.offset;
    assert!(fit.residual_rms < 1e-10 * a);
    assert!((fit.first_harmonic_amplitude() / a - 1.0).abs() < 1e-10);
    assert!(fit.first_harmonic_phase().abs() < 1e-10);
}

#[test]
fn symmetric_qutrit_matches_three_path_sum() {
    let depth = solve_depth_for_ratio(1.0, 3, 1).unwrap();
    let kept = Modulator::new(depth, 0.018).unwrap().truncated(3);
    let full = Modulator::new(depth, 0.018).unwrap();
    let comb = flat(3);
    let truncated = Interferometer::qutrit_symmetric(&comb, &kept).unwrap();
    let enumerated = Interferometer::qutrit_symmetric(&comb, &full).unwrap();
    let a = truncated.rate(0.0).unwrap();
    let mut worst_full = 0.0_f64;
    for phi in period(90) {
        // |1 + e^{iφ} + e^{2iφ}|² = 3 + 4cos φ + 2cos 2φ
        let ideal = a * (3.0 + 4.0 * phi.cos() + 2.0 * (2.0 * phi).cos()) / 9.0;
        let r = truncated.rate(phi).unwrap();
        assert!((r - ideal).abs() <= 1e-10 * a, "phi={phi} r={r} ideal={ideal}");
        worst_full = worst_full.max((enumerated.rate(phi).unwrap() - ideal).abs() / a);
    }
    // carving to three pairs leaves one path per pair, so full enumeration
    // cannot add terms at this output bin
    println!("full-enumeration deviation {worst_full:.3e}");
    assert!(worst_full <= 1e-10);
}

#[test]
fn more_pairs_add_distant_sideband_paths() {
    // an uncarved six-pair comb reaches bin 3/2 through orders up to 9
    let m = qubit_modulator();
    let comb = flat(6);
    let paths = m
        .projection_paths(&comb, qcomb_core::OutputBin::midpoint(1))
        .unwrap();
    assert_eq!(paths.len(), 6);
    let truncated = m.clone().truncated(1);
    let near = truncated
        .projection_paths(&comb, qcomb_core::OutputBin::midpoint(1))
        .unwrap();
    assert_eq!(near.len(), 2);
}

#[test]
fn asymmetric_qutrit_is_one_minus_cosine() {
    let depth = solve_depth_for_ratio(0.5, 3, 1).unwrap();
    let m = Modulator::new(depth, 0.018).unwrap();
    let inter = Interferometer::qutrit_asymmetric(&flat(3), &m).unwrap();
    assert!(inter.warnings.is_empty());
    let b = inter.rate(PI).unwrap() / 2.0;
    for phi in period(100) {
        let r = inter.rate(phi).unwrap();
        assert!((r - b * (1.0 - phi.cos())).abs() <= 1e-10 * b);
    }
}

#[test]
fn dispersion_round_trip_over_grid() {
    let m = qubit_modulator();
    let comb = flat(9);
    let ks: Vec<usize> = (1..=8).collect();
    let detector = DetectorModel::calibrated(0.1, 300.0, 3.0, 1.0, 3, 0)
        .unwrap()
        .with_noiseless(true);
    // per-step shift 2(2π)²|β₂| l fsr² stays below π, the unwrapping limit
    for beta2 in [-2.06e-2, -1.0e-2, -3.0e-3, 5.0e-3, 2.0e-2] {
        for length in [50.0, 300.0, 1100.0] {
            let fiber = FiberSpec::new(beta2, length).unwrap();
            let fit = run_dispersion_scan(&ks, &fiber, &comb, &m, &detector).unwrap();
            assert!(
                (fit.beta2 / beta2 - 1.0).abs() < 1e-6,
                "beta2={beta2} l={length} got {}",
                fit.beta2
            );
            for (i, &k) in ks.iter().enumerate() {
                let truth = fiber.phase_shift(0.036, k as f64 * 0.036);
                assert!((fit.phase_shifts[i] - truth).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn negated_beta2_negates_shift_and_zero_length_gives_none() {
    let m = qubit_modulator();
    let comb = flat(6);
    let grid = period(720);
    let shift = |beta2: f64, length: f64| {
        let fiber = FiberSpec::new(beta2, length).unwrap();
        let inter = Interferometer::dispersion_point(5, &[fiber], &comb, &m).unwrap();
        fringe_shift(&grid, &inter.rates(&grid).unwrap()).unwrap()
    };
    let s = shift(-2.06e-2, 200.0);
    assert!((shift(2.06e-2, 200.0) + s).abs() < 1e-10);
    assert!(shift(-2.06e-2, 0.0).abs() < 1e-12);
}

#[test]
fn shifts_add_for_fibers_in_sequence() {
    let m = qubit_modulator();
    let comb = flat(4);
    let grid = period(720);
    let a = FiberSpec::new(-2.06e-2, 150.0).unwrap();
    let b = FiberSpec::new(1.3e-2, 420.0).unwrap();
    let shift = |fibers: &[FiberSpec]| {
        let inter = Interferometer::dispersion_point(3, fibers, &comb, &m).unwrap();
        fringe_shift(&grid, &inter.rates(&grid).unwrap()).unwrap()
    };
    let sum = shift(&[a]) + shift(&[b]);
    let both = shift(&[a, b]);
    assert!(wrap_phase(both - sum, TAU).abs() < 1e-10);
}

#[test]
fn visibility_estimate_brackets_known_value() {
    let phases = period(12);
    let rates: Vec<f64> = phases.iter().map(|p| 1.0 + 0.9 * p.cos()).collect();
    let mut within = 0;
    let mut estimates = Vec::new();
    for seed in 0..200 {
        let det = DetectorModel::new(1e4, 1.0, 0.0, 3, seed).unwrap();
        let record = SweepRecord::from_rates(&phases, rates.clone(), &det);
        let v = estimate_visibility(&record, 2).unwrap();
        if (v.visibility - 0.9).abs() <= 3.0 * v.sigma {
            within += 1;
        }
        estimates.push(v.visibility);
    }
    println!("V=0.9 synthetic: mean {:.5}, {within}/200 within 3 sigma", mean(&estimates));
    assert!(within >= 190);
    assert!((mean(&estimates) - 0.9).abs() < 0.005);
}

#[test]
fn decision_statistic_falls_as_accidentals_rise() {
    let inter = Interferometer::qubit(1, &flat(2), &qubit_modulator()).unwrap();
    let phases = phase_grid(0.0, TAU, 13);
    let peak = inter.peak_rate(720).unwrap();
    let mut last_raw = f64::INFINITY;
    let mut last_lower = f64::INFINITY;
    for car in [100.0, 10.0, 3.0, 1.0, 0.3] {
        let mut raw = Vec::new();
        let mut lower = Vec::new();
        let mut central = Vec::new();
        for seed in 0..200 {
            let det = DetectorModel::calibrated(peak, 300.0, car, 1.0, 3, seed).unwrap();
            let record = inter.sweep(&phases, &det).unwrap();
            let v = estimate_visibility(&record, 2).unwrap();
            raw.push(raw_visibility(&record).unwrap());
            lower.push(v.visibility - v.sigma);
            central.push(v.visibility);
        }
        println!(
            "CAR {car:>5}: raw {:.4}  V-sigma {:.4}  subtracted V {:.4}",
            mean(&raw),
            mean(&lower),
            mean(&central)
        );
        assert!(mean(&raw) < last_raw);
        assert!(mean(&lower) < last_lower);
        last_raw = mean(&raw);
        last_lower = mean(&lower);
    }
}

#[test]
fn simulated_spread_covers_reported_visibilities() {
    // published values: qubit 0.95 ± 0.07, symmetric qutrit 0.90 ± 0.06
    let comb3 = flat(3);
    let qutrit_m = Modulator::new(solve_depth_for_ratio(1.0, 3, 1).unwrap(), 0.018).unwrap();
    let cases = [
        (Interferometer::qubit(1, &flat(2), &qubit_modulator()).unwrap(), 0.95, 0.07, 13),
        (Interferometer::qutrit_symmetric(&comb3, &qutrit_m).unwrap(), 0.90, 0.06, 25),
    ];
    for (inter, reported, reported_sigma, points) in cases {
        let reported_sigma: f64 = reported_sigma;
        let phases = phase_grid(0.0, TAU, points);
        let peak = inter.peak_rate(720).unwrap();
        let vs: Vec<f64> = (0..200)
            .map(|seed| {
                let det = DetectorModel::calibrated(peak, 300.0, 3.0, 1.0, 3, seed).unwrap();
                estimate_visibility(&inter.sweep(&phases, &det).unwrap(), inter.dimension)
                    .unwrap()
                    .visibility
            })
            .collect();
        let (m, s) = (mean(&vs), std_dev(&vs));
        println!("d={}: simulated V {m:.3} ± {s:.3}, reported {reported} ± {reported_sigma}", inter.dimension);
        assert!((m - reported).abs() < 2.0 * (s.powi(2) + reported_sigma.powi(2)).sqrt());
    }
}

#[test]
fn sweep_is_reproducible_and_seed_sensitive() {
    let inter = Interferometer::qubit(1, &flat(2), &qubit_modulator()).unwrap();
    let phases = phase_grid(0.0, TAU, 13);
    let det = DetectorModel::calibrated(0.2, 300.0, 3.0, 1.0, 3, 9).unwrap();
    assert_eq!(inter.sweep(&phases, &det).unwrap(), inter.sweep(&phases, &det).unwrap());
    let other = det.clone().with_seed(10);
    assert_ne!(inter.sweep(&phases, &det).unwrap(), inter.sweep(&phases, &other).unwrap());
}
