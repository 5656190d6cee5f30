//! Runs a parsed scenario and formats its result files.
//!
//! Every scenario produces `sweep.csv`, `summary.json` and `theory.csv`; the
//! dispersion scan adds `dispersion.csv` with the per-point fringe shifts.
//! Numbers are written with 12 significant digits. Column names carry their
//! units.
//!
//! `summary.json` is a flat object. Keys common to all scenarios: `kind`,
//! `seed`, `noiseless`, `depth`, `mod_frequency_thz`, `warnings`. Phase
//! sweeps add `dimension`, `threshold`, `threshold_d2`, `threshold_d3`,
//! `visibility`, `visibility_sigma`, `visibility_fit`, `visibility_raw`,
//! `entangled_one_sigma`, `entangled_central`, `points`, `repeats`,
//! `peak_counts`, `accidentals_per_point`. `dispersion_point` adds
//! `pattern_shift_rad`, `pattern_shift_pi`, `measured_shift_rad`,
//! `predicted_shift_rad`, `f_os_thz`. `dispersion_scan` adds `beta2`,
//! `beta2_stderr`, `beta2_input`, `slope_rad_per_thz`, `intercept_rad`,
//! `fit_residual_rms_rad`, `clamped_points`, `points`. `correlation` adds
//! `expected_period_ps`, `peak_spacing_ps`, `peak_count`,
//! `substructure_contrast`.

use std::path::Path;

use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::comb::{CombGrid, CombState, FiberSpec};
use crate::config::{ScenarioConfig, ScenarioKind};
use crate::error::{Error, Result};
use crate::experiment::{
    self, estimate_visibility, fitted_visibility, fringe_shift, raw_visibility, DetectorModel,
    Interferometer, SweepRecord, QUBIT_THRESHOLD, QUTRIT_THRESHOLD,
};
use crate::modulation::Modulator;
use crate::numerics::{solve_depth_for_power, solve_depth_for_ratio, wrap_phase};

/// Seed used when neither the command line, the config nor `QCOMB_SEED`
/// supplies one.
pub const DEFAULT_SEED: u64 = 20_190_101;

pub const SEED_ENV: &str = "QCOMB_SEED";

/// Phase samples per period used to locate fringe maxima.
const SHIFT_SAMPLES: usize = 720;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub noiseless: bool,
    /// Overrides the config seed.
    pub seed: Option<u64>,
    /// Fallback below the config seed, normally from `QCOMB_SEED`.
    pub env_seed: Option<u64>,
}

impl RunOptions {
    /// Reads `QCOMB_SEED` into `env_seed`.
    pub fn from_env(noiseless: bool, seed: Option<u64>) -> Result<Self> {
        let env_seed = match std::env::var(SEED_ENV) {
            Ok(text) => Some(text.trim().parse::<u64>().map_err(|_| {
                Error::validation(SEED_ENV, format!("{text:?} is not an unsigned integer"))
            })?),
            Err(_) => None,
        };
        Ok(Self {
            noiseless,
            seed,
            env_seed,
        })
    }

    pub fn resolve_seed(&self, cfg: &ScenarioConfig) -> u64 {
        self.seed
            .or(cfg.detector.seed)
            .or(self.env_seed)
            .unwrap_or(DEFAULT_SEED)
    }
}

/// Result files of one run, in write order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub tables: Vec<(String, String)>,
    pub summary: Map<String, Value>,
}

impl ScenarioOutput {
    pub fn table(&self, name: &str) -> Option<&str> {
        self.tables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t.as_str())
    }

    pub fn summary_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.summary).expect("summary serialises");
        text.push('\n');
        text
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, content) in &self.tables {
            std::fs::write(dir.join(name), content)?;
        }
        std::fs::write(dir.join("summary.json"), self.summary_json())?;
        Ok(())
    }
}

pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn build_comb(cfg: &ScenarioConfig) -> Result<CombState> {
    let c = &cfg.comb;
    let grid = CombGrid::new(
        c.center_frequency.unwrap_or(crate::config::DEFAULT_CENTER_FREQUENCY),
        c.fsr,
        c.linewidth.unwrap_or(c.fsr / 3.0),
        c.num_pairs,
    )?;
    match &c.amplitudes {
        None => Ok(CombState::flat(grid)),
        Some(amps) => {
            let raw: Vec<Complex64> = amps
                .iter()
                .map(|a| {
                    let (re, im) = a.parts();
                    Complex64::new(re, im)
                })
                .collect();
            CombState::build(grid, &raw)
        }
    }
}

pub fn build_modulator(cfg: &ScenarioConfig) -> Result<Modulator> {
    let m = &cfg.modulator;
    let depth = if let Some(d) = m.depth {
        d
    } else if let Some(target) = m.target_power {
        solve_depth_for_power(target, m.order.unwrap_or(1))?
    } else if let Some(ratio) = m.target_ratio {
        let [a, b] = m.ratio_orders.unwrap_or([3, 1]);
        solve_depth_for_ratio(ratio, a, b)?
    } else {
        return Err(Error::validation(
            "modulator",
            "give exactly one of depth, target_power, target_ratio",
        ));
    };
    let frequency = match &m.mod_frequency {
        Some(f) => f.resolve(cfg.comb.fsr)?,
        None => cfg.comb.fsr / 2.0,
    };
    let modulator = match m.cutoff {
        Some(cutoff) => Modulator::with_cutoff(depth, frequency, cutoff)?,
        None => Modulator::new(depth, frequency)?,
    };
    Ok(match m.max_order {
        Some(n) => modulator.truncated(n),
        None => modulator,
    })
}

pub fn build_fiber(cfg: &ScenarioConfig) -> Result<FiberSpec> {
    let f = cfg
        .scenario
        .fiber
        .as_ref()
        .ok_or_else(|| Error::validation("scenario.fiber", "required for dispersion scenarios"))?;
    match (f.beta2, f.dispersion) {
        (Some(b), None) => FiberSpec::new(b, f.length),
        (None, Some(d)) => FiberSpec::from_dispersion_parameter(
            d,
            f.wavelength.unwrap_or(crate::comb::DEFAULT_WAVELENGTH_NM),
            f.length,
        ),
        _ => Err(Error::validation(
            "scenario.fiber",
            "give exactly one of beta2, dispersion",
        )),
    }
}

/// Detector calibrated against the largest theoretical rate of the scenario.
pub fn build_detector(cfg: &ScenarioConfig, peak_rate: f64, seed: u64, noiseless: bool) -> Result<DetectorModel> {
    let d = &cfg.detector;
    let t = d.integration_time.unwrap_or(1.0);
    let repeats = d.repeats.unwrap_or(crate::config::DEFAULT_REPEATS);
    if !(peak_rate > 0.0) {
        return Err(Error::Calibration(format!(
            "peak theoretical rate {peak_rate} leaves nothing to scale"
        )));
    }
    let rate_scale = match (d.rate_scale, d.peak_counts) {
        (Some(s), _) => s,
        (None, p) => p.unwrap_or(crate::config::DEFAULT_PEAK_COUNTS) / (peak_rate * t),
    };
    let accidental_rate = match (d.accidental_rate, d.car) {
        (Some(a), _) => a,
        (None, car) => rate_scale * peak_rate / car.unwrap_or(crate::config::DEFAULT_CAR),
    };
    Ok(DetectorModel::new(rate_scale, t, accidental_rate, repeats, seed)?.with_noiseless(noiseless))
}

fn interferometer(cfg: &ScenarioConfig, comb: &CombState, modulator: &Modulator) -> Result<Interferometer> {
    let pair = cfg.scenario.pair.unwrap_or(1);
    match cfg.scenario.kind {
        ScenarioKind::Qubit => Interferometer::qubit(pair, comb, modulator),
        ScenarioKind::QutritSymmetric => Interferometer::qutrit_symmetric(comb, modulator),
        ScenarioKind::QutritAsymmetric => Interferometer::qutrit_asymmetric(comb, modulator),
        ScenarioKind::DispersionPoint => {
            Interferometer::dispersion_point(pair, &[build_fiber(cfg)?], comb, modulator)
        }
        kind => Err(Error::InvalidArgument(format!(
            "{} is not a phase sweep",
            kind.as_str()
        ))),
    }
}

fn theory_points(cfg: &ScenarioConfig) -> usize {
    cfg.scenario
        .theory_points
        .unwrap_or(crate::config::DEFAULT_THEORY_POINTS)
}

fn fine_phases(cfg: &ScenarioConfig) -> Vec<f64> {
    experiment::phase_grid(0.0, std::f64::consts::TAU, theory_points(cfg))
}

fn period_phases() -> Vec<f64> {
    (0..SHIFT_SAMPLES)
        .map(|i| std::f64::consts::TAU * i as f64 / SHIFT_SAMPLES as f64)
        .collect()
}

fn base_summary(cfg: &ScenarioConfig, modulator: &Modulator, seed: u64, opts: &RunOptions) -> Map<String, Value> {
    let mut s = Map::new();
    s.insert("kind".into(), cfg.scenario.kind.as_str().into());
    s.insert("seed".into(), seed.into());
    s.insert("noiseless".into(), opts.noiseless.into());
    s.insert("depth".into(), modulator.depth().into());
    s.insert("mod_frequency_thz".into(), modulator.mod_frequency().into());
    s
}

fn put(summary: &mut Map<String, Value>, key: &str, value: f64) {
    // non-finite numbers have no JSON form
    let v = serde_json::Number::from_f64(value).map_or(Value::Null, Value::Number);
    summary.insert(key.into(), v);
}

/// Noiseless theory table for the scenario; the same content `simulate`
/// writes to `theory.csv`.
pub fn theory(cfg: &ScenarioConfig) -> Result<String> {
    let comb = build_comb(cfg)?;
    match cfg.scenario.kind {
        ScenarioKind::DispersionScan => {
            let fiber = build_fiber(cfg)?;
            Ok(scan_theory(cfg, &comb, &fiber))
        }
        ScenarioKind::Correlation => Ok(correlation_table(&comb, &fine_taus(cfg))),
        _ => {
            let modulator = build_modulator(cfg)?;
            let inter = interferometer(cfg, &comb, &modulator)?;
            let phases = fine_phases(cfg);
            let rates = inter.rates(&phases)?;
            Ok(phase_theory(&phases, &rates))
        }
    }
}

fn phase_theory(phases: &[f64], rates: &[f64]) -> String {
    let peak = rates.iter().copied().fold(0.0, f64::max);
    csv(
        &["setting_rad", "expected_rate", "normalized_rate"],
        phases.iter().zip(rates).map(|(&p, &r)| {
            let norm = if peak > 0.0 { r / peak } else { 0.0 };
            vec![fmt_num(p), fmt_num(r), fmt_num(norm)]
        }),
    )
}

pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<ScenarioOutput> {
    let seed = opts.resolve_seed(cfg);
    match cfg.scenario.kind {
        ScenarioKind::DispersionScan => run_scan(cfg, opts, seed),
        ScenarioKind::Correlation => run_correlation(cfg, opts, seed),
        _ => run_phase_sweep(cfg, opts, seed),
    }
}

fn sweep_table(record: &SweepRecord) -> String {
    csv(
        &["setting_rad", "expected_rate", "mean_counts", "std_counts", "subtracted_counts"],
        (0..record.len()).map(|i| {
            vec![
                fmt_num(record.settings[i]),
                fmt_num(record.expected_rate[i]),
                fmt_num(record.mean_counts[i]),
                fmt_num(record.std_counts[i]),
                fmt_num(record.subtracted_counts[i]),
            ]
        }),
    )
}

fn run_phase_sweep(cfg: &ScenarioConfig, opts: &RunOptions, seed: u64) -> Result<ScenarioOutput> {
    let comb = build_comb(cfg)?;
    let modulator = build_modulator(cfg)?;
    let inter = interferometer(cfg, &comb, &modulator)?;
    let phases = cfg
        .scenario
        .phases
        .as_ref()
        .map(|g| g.values())
        .ok_or_else(|| Error::validation("scenario.phases", "missing phase grid"))?;

    let fine = fine_phases(cfg);
    let fine_rates = inter.rates(&fine)?;
    let peak_rate = inter
        .rates(&phases)?
        .into_iter()
        .chain(fine_rates.iter().copied())
        .fold(0.0, f64::max);
    let detector = build_detector(cfg, peak_rate, seed, opts.noiseless)?;
    let record = inter.sweep(&phases, &detector)?;

    let mut summary = base_summary(cfg, &modulator, seed, opts);
    let vis = estimate_visibility(&record, inter.dimension)?;
    summary.insert("dimension".into(), inter.dimension.into());
    put(&mut summary, "threshold", vis.threshold);
    put(&mut summary, "threshold_d2", QUBIT_THRESHOLD);
    put(&mut summary, "threshold_d3", QUTRIT_THRESHOLD);
    put(&mut summary, "visibility", vis.visibility);
    put(&mut summary, "visibility_sigma", vis.sigma);
    summary.insert("entangled_one_sigma".into(), vis.entangled.into());
    summary.insert("entangled_central".into(), vis.entangled_central.into());
    let harmonics = if cfg.scenario.kind == ScenarioKind::QutritSymmetric { 2 } else { 1 };
    match fitted_visibility(&record, harmonics) {
        Ok(v) => put(&mut summary, "visibility_fit", v),
        Err(_) => {
            summary.insert("visibility_fit".into(), Value::Null);
        }
    }
    put(&mut summary, "visibility_raw", raw_visibility(&record)?);
    summary.insert("points".into(), record.len().into());
    summary.insert("repeats".into(), detector.repeats.into());
    put(&mut summary, "peak_counts", detector.signal_counts(peak_rate));
    put(&mut summary, "accidentals_per_point", detector.accidental_counts());

    if cfg.scenario.kind == ScenarioKind::DispersionPoint {
        let fiber = build_fiber(cfg)?;
        let pair = cfg.scenario.pair.unwrap_or(1);
        let f_os = comb.grid().offset(pair);
        let grid = period_phases();
        let shift = pattern_shift(&grid, &inter.rates(&grid)?)?;
        put(&mut summary, "pattern_shift_rad", shift);
        put(&mut summary, "pattern_shift_pi", shift / std::f64::consts::PI);
        let measured = pattern_shift(&record.settings, &record.subtracted_counts).ok();
        put(&mut summary, "measured_shift_rad", measured.unwrap_or(f64::NAN));
        let predicted = wrap_phase(fiber.phase_shift(comb.grid().fsr, f_os), std::f64::consts::TAU);
        put(&mut summary, "predicted_shift_rad", predicted);
        put(&mut summary, "f_os_thz", f_os);
    }
    summary.insert("warnings".into(), record.warnings.join("; ").into());

    Ok(ScenarioOutput {
        tables: vec![
            ("sweep.csv".into(), sweep_table(&record)),
            ("theory.csv".into(), phase_theory(&fine, &fine_rates)),
        ],
        summary,
    })
}

/// Displacement of the fringe pattern relative to an undispersed pattern
/// peaking at zero applied phase. The swept phase sits on the lower pair, so
/// a pattern peaking at `φ = p` carries a relative shift of `p`.
pub fn pattern_shift(phases: &[f64], values: &[f64]) -> Result<f64> {
    fringe_shift(phases, values)
}

fn scan_theory(cfg: &ScenarioConfig, comb: &CombState, fiber: &FiberSpec) -> String {
    let fsr = comb.grid().fsr;
    let ks = cfg.scenario.k_values.as_deref().unwrap_or(&[]);
    let top = ks.iter().copied().max().unwrap_or(1) as f64 * fsr;
    let offsets = experiment::phase_grid(0.0, top, theory_points(cfg));
    let curve = experiment::dispersion_theory_curve(fiber, fsr, &offsets);
    csv(
        &["f_os_thz", "normalized_counts", "phase_shift_rad"],
        offsets.iter().zip(&curve).map(|(&f, &c)| {
            vec![fmt_num(f), fmt_num(c), fmt_num(fiber.phase_shift(fsr, f))]
        }),
    )
}

fn run_scan(cfg: &ScenarioConfig, opts: &RunOptions, seed: u64) -> Result<ScenarioOutput> {
    let comb = build_comb(cfg)?;
    let modulator = build_modulator(cfg)?;
    let fiber = build_fiber(cfg)?;
    let ks = cfg
        .scenario
        .k_values
        .clone()
        .ok_or_else(|| Error::validation("scenario.k_values", "missing"))?;
    if fiber.length == 0.0 {
        return Err(Error::ZeroLength);
    }

    let mut peak_rate = 0.0_f64;
    for &k in &ks {
        peak_rate = peak_rate.max(Interferometer::qubit(k, &comb, &modulator)?.rate(0.0)?);
    }
    let detector = build_detector(cfg, peak_rate, seed, opts.noiseless)?;
    let fit = experiment::run_dispersion_scan(&ks, &fiber, &comb, &modulator, &detector)?;

    let record = &fit.record;
    let sweep = csv(
        &["setting_thz", "expected_rate", "mean_counts", "std_counts", "subtracted_counts"],
        (0..record.len()).map(|i| {
            vec![
                fmt_num(record.settings[i]),
                fmt_num(record.expected_rate[i]),
                fmt_num(record.mean_counts[i]),
                fmt_num(record.std_counts[i]),
                fmt_num(record.subtracted_counts[i]),
            ]
        }),
    );
    let shifts = csv(
        &["f_os_thz", "c_max", "subtracted_counts", "phase_shift_rad", "clamped"],
        (0..fit.offsets.len()).map(|i| {
            vec![
                fmt_num(fit.offsets[i]),
                fmt_num(fit.c_max[i]),
                fmt_num(fit.counts[i]),
                fmt_num(fit.phase_shifts[i]),
                (fit.clamped[i] as u8).to_string(),
            ]
        }),
    );

    let mut summary = base_summary(cfg, &modulator, seed, opts);
    put(&mut summary, "beta2", fit.beta2);
    put(&mut summary, "beta2_stderr", fit.beta2_stderr);
    put(&mut summary, "beta2_input", fiber.beta2);
    put(&mut summary, "fiber_length_m", fiber.length);
    put(&mut summary, "slope_rad_per_thz", fit.line.slope);
    put(&mut summary, "intercept_rad", fit.line.intercept);
    put(&mut summary, "fit_residual_rms_rad", fit.line.residual_rms);
    summary.insert(
        "clamped_points".into(),
        fit.clamped.iter().filter(|&&c| c).count().into(),
    );
    summary.insert("points".into(), fit.offsets.len().into());
    summary.insert("repeats".into(), detector.repeats.into());
    put(&mut summary, "peak_counts", detector.signal_counts(peak_rate));
    put(&mut summary, "accidentals_per_point", detector.accidental_counts());
    summary.insert("warnings".into(), record.warnings.join("; ").into());

    Ok(ScenarioOutput {
        tables: vec![
            ("sweep.csv".into(), sweep),
            ("dispersion.csv".into(), shifts),
            ("theory.csv".into(), scan_theory(cfg, &comb, &fiber)),
        ],
        summary,
    })
}

fn fine_taus(cfg: &ScenarioConfig) -> Vec<f64> {
    let taus = cfg
        .scenario
        .tau
        .as_ref()
        .map(|g| g.values())
        .unwrap_or_else(|| vec![-100.0, 100.0]);
    let lo = taus.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = taus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    experiment::phase_grid(lo, hi, theory_points(cfg).max(taus.len()))
}

fn correlation_table(comb: &CombState, taus: &[f64]) -> String {
    let corr = comb.temporal_correlation(taus);
    let env = comb.correlation_envelope(taus);
    csv(
        &["tau_ps", "correlation", "envelope"],
        (0..taus.len()).map(|i| vec![fmt_num(taus[i]), fmt_num(corr[i]), fmt_num(env[i])]),
    )
}

/// Delays of the local maxima of `correlation / envelope` that reach at least
/// half the largest value, restricted to where the envelope exceeds 1e-3.
pub fn substructure_peaks(taus: &[f64], correlation: &[f64], envelope: &[f64]) -> Vec<f64> {
    let ratio: Vec<Option<f64>> = correlation
        .iter()
        .zip(envelope)
        .map(|(&c, &e)| (e > 1e-3).then(|| c / e))
        .collect();
    let top = ratio.iter().flatten().copied().fold(0.0, f64::max);
    let mut peaks = Vec::new();
    for i in 1..taus.len().saturating_sub(1) {
        if let (Some(a), Some(b), Some(c)) = (ratio[i - 1], ratio[i], ratio[i + 1]) {
            if b >= 0.5 * top && b > a && b >= c {
                peaks.push(taus[i]);
            }
        }
    }
    peaks
}

fn run_correlation(cfg: &ScenarioConfig, opts: &RunOptions, seed: u64) -> Result<ScenarioOutput> {
    let comb = build_comb(cfg)?;
    let taus = cfg
        .scenario
        .tau
        .as_ref()
        .map(|g| g.values())
        .ok_or_else(|| Error::validation("scenario.tau", "missing delay grid"))?;
    let corr = comb.temporal_correlation(&taus);
    let env = comb.correlation_envelope(&taus);

    let fsr = comb.grid().fsr;
    let mut summary = Map::new();
    summary.insert("kind".into(), cfg.scenario.kind.as_str().into());
    summary.insert("seed".into(), seed.into());
    summary.insert("noiseless".into(), opts.noiseless.into());
    summary.insert("num_pairs".into(), comb.grid().num_pairs.into());
    put(&mut summary, "expected_period_ps", experiment::correlation_period(fsr));
    let peaks = substructure_peaks(&taus, &corr, &env);
    let spacing = if peaks.len() >= 2 {
        (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64
    } else {
        f64::NAN
    };
    put(&mut summary, "peak_spacing_ps", spacing);
    summary.insert("peak_count".into(), peaks.len().into());
    let period = experiment::period_grid(fsr, 720);
    let contrast = experiment::substructure_contrast(
        &comb.temporal_correlation(&period),
        &comb.correlation_envelope(&period),
    );
    put(&mut summary, "substructure_contrast", contrast);
    summary.insert("warnings".into(), "".into());

    Ok(ScenarioOutput {
        tables: vec![
            ("sweep.csv".into(), correlation_table(&comb, &taus)),
            ("theory.csv".into(), correlation_table(&comb, &fine_taus(cfg))),
        ],
        summary,
    })
}
