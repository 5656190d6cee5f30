//! Interference and dispersion experiments with a Poisson detector model.
//!
//! Each scenario carves the line pairs it uses out of the supplied comb
//! (every other pair is blocked by the first pulse shaper), applies the
//! phase pattern being swept, and reads the coincidence rate on a fixed
//! output bin pair. Count sampling, accidental subtraction and visibility
//! estimation follow the usual coincidence-counting workflow: repeated
//! measurements per setting, a flat accidental background subtracted from the
//! mean, and visibility taken from the extremal data points.

use std::f64::consts::TAU;

use crate::comb::{CombState, FiberSpec, ShaperMask};
use crate::error::{Error, Result};
use crate::modulation::{BinIndex, Modulator, OutputBin};
use crate::numerics::{
    fit_harmonics, fit_line, poisson_sample, stream_rng, unfold_folded_phases, LineFit,
};

/// Classical visibility bound for two-dimensional frequency-bin states.
pub const QUBIT_THRESHOLD: f64 = 0.71;
/// Classical visibility bound for three-dimensional frequency-bin states.
pub const QUTRIT_THRESHOLD: f64 = 0.775;

/// Allowed mismatch between sideband magnitudes before a scenario warns.
const DEPTH_CONDITION_TOL: f64 = 1e-6;

pub fn classical_threshold(dimension: u32) -> Result<f64> {
    match dimension {
        2 => Ok(QUBIT_THRESHOLD),
        3 => Ok(QUTRIT_THRESHOLD),
        d => Err(Error::InvalidArgument(format!(
            "no visibility threshold for dimension {d}"
        ))),
    }
}

/// Coincidence counting setup.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorModel {
    /// Coincidences per second at unit theoretical rate.
    pub rate_scale: f64,
    /// Seconds per measurement.
    pub integration_time: f64,
    /// Accidental coincidences per second.
    pub accidental_rate: f64,
    /// Measurements per setting.
    pub repeats: u32,
    pub rng_seed: u64,
    /// Report expectation values instead of sampling.
    pub noiseless: bool,
}

impl DetectorModel {
    pub fn new(
        rate_scale: f64,
        integration_time: f64,
        accidental_rate: f64,
        repeats: u32,
        rng_seed: u64,
    ) -> Result<Self> {
        for (name, v) in [
            ("detector.rate_scale", rate_scale),
            ("detector.integration_time", integration_time),
            ("detector.accidental_rate", accidental_rate),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::validation(name, "must be finite and >= 0"));
            }
        }
        if repeats == 0 {
            return Err(Error::validation("detector.repeats", "must be >= 1"));
        }
        Ok(Self {
            rate_scale,
            integration_time,
            accidental_rate,
            repeats,
            rng_seed,
            noiseless: false,
        })
    }

    /// Scales the detector so that `peak_rate` yields `peak_counts` true
    /// coincidences per measurement, with a coincidence-to-accidental ratio
    /// of `car` at that peak. An infinite `car` means no accidentals.
    pub fn calibrated(
        peak_rate: f64,
        peak_counts: f64,
        car: f64,
        integration_time: f64,
        repeats: u32,
        rng_seed: u64,
    ) -> Result<Self> {
        if !(peak_rate > 0.0) {
            return Err(Error::Calibration(format!(
                "peak theoretical rate {peak_rate} leaves nothing to scale"
            )));
        }
        if !(integration_time > 0.0) {
            return Err(Error::validation("detector.integration_time", "must be > 0"));
        }
        if !(peak_counts >= 0.0 && peak_counts.is_finite()) {
            return Err(Error::validation("detector.peak_counts", "must be finite and >= 0"));
        }
        if !(car > 0.0) {
            return Err(Error::validation("detector.car", "must be > 0"));
        }
        let rate_scale = peak_counts / (peak_rate * integration_time);
        let accidental_rate = peak_counts / car / integration_time;
        Self::new(rate_scale, integration_time, accidental_rate, repeats, rng_seed)
    }

    pub fn with_noiseless(mut self, noiseless: bool) -> Self {
        self.noiseless = noiseless;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    /// Expected true coincidences per measurement at theoretical rate `rate`.
    pub fn signal_counts(&self, rate: f64) -> f64 {
        self.rate_scale * rate * self.integration_time
    }

    /// Expected accidentals per measurement.
    pub fn accidental_counts(&self) -> f64 {
        self.accidental_rate * self.integration_time
    }
}

/// Repeated measurements at one setting.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSample {
    pub counts: Vec<u64>,
    pub mean: f64,
    /// Sample standard deviation across repeats.
    pub std: f64,
    /// `mean` minus the expected accidentals.
    pub subtracted: f64,
}

/// Draws `detector.repeats` Poisson counts for setting number `point`.
///
/// Repeat `r` of point `p` always uses stream `(seed, p, r)`.
pub fn sample_counts(expected_rate: f64, detector: &DetectorModel, point: usize) -> CountSample {
    let accidentals = detector.accidental_counts();
    let mean_counts = detector.signal_counts(expected_rate) + accidentals;
    if detector.noiseless {
        return CountSample {
            counts: Vec::new(),
            mean: mean_counts,
            std: 0.0,
            subtracted: mean_counts - accidentals,
        };
    }
    let counts: Vec<u64> = (0..detector.repeats)
        .map(|r| {
            let mut rng = stream_rng(detector.rng_seed, point as u64, r as u64);
            poisson_sample(mean_counts, &mut rng)
        })
        .collect();
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<u64>() as f64 / n;
    let std = if counts.len() > 1 {
        (counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    CountSample {
        counts,
        mean,
        std,
        subtracted: mean - accidentals,
    }
}

/// One swept measurement series.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    /// Swept parameter per point: a phase in rad, or an offset in THz.
    pub settings: Vec<f64>,
    /// Theoretical coincidence rate `⟨ψ_out|ψ_out⟩` per point.
    pub expected_rate: Vec<f64>,
    /// Raw counts per repeat; empty rows when noiseless.
    pub counts: Vec<Vec<u64>>,
    pub mean_counts: Vec<f64>,
    pub std_counts: Vec<f64>,
    /// Expected accidentals per measurement, subtracted from every point.
    pub accidentals_estimate: f64,
    /// Mean counts minus accidentals; may dip below zero from noise.
    pub subtracted_counts: Vec<f64>,
    pub warnings: Vec<String>,
}

impl SweepRecord {
    pub fn from_rates(settings: &[f64], rates: Vec<f64>, detector: &DetectorModel) -> Self {
        let samples: Vec<CountSample> = rates
            .iter()
            .enumerate()
            .map(|(i, &r)| sample_counts(r, detector, i))
            .collect();
        Self {
            settings: settings.to_vec(),
            expected_rate: rates,
            mean_counts: samples.iter().map(|s| s.mean).collect(),
            std_counts: samples.iter().map(|s| s.std).collect(),
            subtracted_counts: samples.iter().map(|s| s.subtracted).collect(),
            counts: samples.into_iter().map(|s| s.counts).collect(),
            accidentals_estimate: detector.accidental_counts(),
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }
}

/// Visibility and the resulting entanglement verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityResult {
    pub visibility: f64,
    pub sigma: f64,
    pub dimension: u32,
    pub threshold: f64,
    /// `visibility - sigma > threshold`.
    pub entangled: bool,
    /// `visibility > threshold`.
    pub entangled_central: bool,
}

pub fn entanglement_verdict(visibility: f64, sigma: f64, dimension: u32) -> Result<VisibilityResult> {
    let threshold = classical_threshold(dimension)?;
    Ok(VisibilityResult {
        visibility,
        sigma,
        dimension,
        threshold,
        entangled: visibility - sigma > threshold,
        entangled_central: visibility > threshold,
    })
}

fn extremes(values: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[lo] {
            lo = i;
        }
        if *v > values[hi] {
            hi = i;
        }
    }
    (hi, lo)
}

/// `(C_max - C_min) / (C_max + C_min)` on the accidental-subtracted extremal
/// points, with the per-point spread across repeats propagated to sigma.
pub fn estimate_visibility(record: &SweepRecord, dimension: u32) -> Result<VisibilityResult> {
    if record.len() < 2 {
        return Err(Error::InvalidArgument(
            "visibility needs at least two settings".into(),
        ));
    }
    let (hi, lo) = extremes(&record.subtracted_counts);
    let (c_max, c_min) = (record.subtracted_counts[hi], record.subtracted_counts[lo]);
    let denom = c_max + c_min;
    if !(denom > 0.0) {
        return Err(Error::Degenerate(format!(
            "extremal counts sum to {denom}; visibility undefined"
        )));
    }
    let visibility = (c_max - c_min) / denom;
    let (s_max, s_min) = (record.std_counts[hi], record.std_counts[lo]);
    let sigma = 2.0 * (c_min * c_min * s_max * s_max + c_max * c_max * s_min * s_min).sqrt()
        / (denom * denom);
    entanglement_verdict(visibility, sigma, dimension)
}

/// Extremal-point visibility of the raw means, before accidentals are removed.
pub fn raw_visibility(record: &SweepRecord) -> Result<f64> {
    if record.len() < 2 {
        return Err(Error::InvalidArgument(
            "visibility needs at least two settings".into(),
        ));
    }
    let (hi, lo) = extremes(&record.mean_counts);
    let denom = record.mean_counts[hi] + record.mean_counts[lo];
    if !(denom > 0.0) {
        return Err(Error::Degenerate("no counts recorded".into()));
    }
    Ok((record.mean_counts[hi] - record.mean_counts[lo]) / denom)
}

/// Visibility of a Fourier-series fit with `harmonics` terms to the
/// subtracted counts, evaluated over a full period.
pub fn fitted_visibility(record: &SweepRecord, harmonics: usize) -> Result<f64> {
    let fit = fit_harmonics(&record.settings, &record.subtracted_counts, harmonics)?;
    Ok(fit.contrast(3600))
}

/// Location of the fringe maximum from a first-harmonic fit, in `(-π, π]`.
pub fn fringe_shift(phases: &[f64], values: &[f64]) -> Result<f64> {
    Ok(fit_harmonics(phases, values, 1)?.first_harmonic_phase())
}

/// Full width at half maximum of the peak nearest `centre`, from linear
/// interpolation of samples ordered by phase.
pub fn peak_fwhm(phases: &[f64], values: &[f64], centre: f64) -> Result<f64> {
    if phases.len() != values.len() || phases.len() < 3 {
        return Err(Error::InvalidArgument("need matching samples, at least 3".into()));
    }
    let peak = phases
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - centre).abs().total_cmp(&(b.1 - centre).abs()))
        .map(|(i, _)| i)
        .expect("non-empty");
    let half = 0.5 * values[peak];
    let crossing = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = peak;
        for i in range {
            if values[i] <= half {
                let t = (values[prev] - half) / (values[prev] - values[i]);
                return Some(phases[prev] + t * (phases[i] - phases[prev]));
            }
            prev = i;
        }
        None
    };
    let right = crossing(&mut (peak + 1..phases.len()));
    let left = crossing(&mut (0..peak).rev());
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(Error::Degenerate("peak does not fall to half maximum".into())),
    }
}

/// A prepared comb, modulator and detection bin, with the pairs whose phase
/// is driven by the swept setting.
#[derive(Debug, Clone)]
pub struct Interferometer {
    pub state: CombState,
    pub modulator: Modulator,
    pub output: OutputBin,
    /// `(pair, multiplier)`: the pair receives `multiplier * setting`.
    pub pattern: Vec<(usize, f64)>,
    pub dimension: u32,
    pub warnings: Vec<String>,
}

impl Interferometer {
    /// Pairs `k` and `k + 1` read out halfway between them; the phase sits on
    /// pair `k + 1`.
    pub fn qubit(pair_lo: usize, comb: &CombState, modulator: &Modulator) -> Result<Self> {
        comb.grid().check_pair(pair_lo)?;
        comb.grid().check_pair(pair_lo + 1)?;
        Ok(Self {
            state: comb.carve(&[pair_lo, pair_lo + 1])?,
            modulator: modulator.clone(),
            output: OutputBin::midpoint(pair_lo as i64),
            pattern: vec![(pair_lo + 1, 1.0)],
            dimension: 2,
            warnings: Vec::new(),
        })
    }

    /// Pairs 1..=3 with phases `(0, φ, 2φ)`, both photons read at 3/2.
    pub fn qutrit_symmetric(comb: &CombState, modulator: &Modulator) -> Result<Self> {
        comb.grid().check_pair(3)?;
        let mut warnings = Vec::new();
        let c1 = modulator.sideband_amplitude(1)?;
        let c3 = modulator.sideband_amplitude(3)?;
        if (c1.abs() - c3.abs()).abs() > DEPTH_CONDITION_TOL {
            warnings.push(format!(
                "|C1| = {:.6} and |C3| = {:.6} differ; the three paths are unbalanced",
                c1.abs(),
                c3.abs()
            ));
        }
        Ok(Self {
            state: comb.carve(&[1, 2, 3])?,
            modulator: modulator.clone(),
            output: OutputBin::midpoint(1),
            pattern: vec![(2, 1.0), (3, 2.0)],
            dimension: 3,
            warnings,
        })
    }

    /// Pairs 1..=3 with the phase on pair 2, signal read at 3/2 and idler
    /// at 5/2.
    pub fn qutrit_asymmetric(comb: &CombState, modulator: &Modulator) -> Result<Self> {
        comb.grid().check_pair(3)?;
        let mut warnings = Vec::new();
        let c1 = modulator.sideband_amplitude(1)?;
        let c3 = modulator.sideband_amplitude(3)?;
        if (c3.abs() - 0.5 * c1.abs()).abs() > DEPTH_CONDITION_TOL {
            warnings.push(format!(
                "|C3| / |C1| = {:.6}, not 1/2; the outer paths do not cancel the middle one",
                c3.abs() / c1.abs()
            ));
        }
        Ok(Self {
            state: comb.carve(&[1, 2, 3])?,
            modulator: modulator.clone(),
            output: OutputBin::new(BinIndex::midpoint(1), BinIndex::midpoint(2)),
            pattern: vec![(2, 1.0)],
            dimension: 3,
            warnings,
        })
    }

    /// Pairs `k` and `k + 1` after `fibers`, with the swept phase on pair `k`.
    pub fn dispersion_point(
        pair_lo: usize,
        fibers: &[FiberSpec],
        comb: &CombState,
        modulator: &Modulator,
    ) -> Result<Self> {
        let mut inter = Self::qubit(pair_lo, comb, modulator)?;
        for fiber in fibers {
            inter.state = inter.state.apply_dispersion(fiber);
        }
        inter.pattern = vec![(pair_lo, 1.0)];
        Ok(inter)
    }

    /// Theoretical coincidence rate at `setting`.
    pub fn rate(&self, setting: f64) -> Result<f64> {
        let mut mask = ShaperMask::identity(self.state.grid().num_pairs);
        for &(pair, mult) in &self.pattern {
            mask.set_pair_phase(pair, mult * setting)?;
        }
        let shaped = self.state.apply_mask(&mask)?;
        self.modulator.coincidence_rate(&shaped, self.output)
    }

    pub fn rates(&self, settings: &[f64]) -> Result<Vec<f64>> {
        settings.iter().map(|&s| self.rate(s)).collect()
    }

    /// Largest rate over `samples` settings spread across one period.
    pub fn peak_rate(&self, samples: usize) -> Result<f64> {
        let grid: Vec<f64> = (0..samples)
            .map(|i| TAU * i as f64 / samples as f64)
            .collect();
        Ok(self.rates(&grid)?.into_iter().fold(0.0, f64::max))
    }

    pub fn sweep(&self, settings: &[f64], detector: &DetectorModel) -> Result<SweepRecord> {
        if settings.is_empty() {
            return Err(Error::InvalidArgument("empty phase grid".into()));
        }
        let mut record = SweepRecord::from_rates(settings, self.rates(settings)?, detector);
        record.warnings = self.warnings.clone();
        Ok(record)
    }
}

pub fn run_qubit_sweep(
    pair_lo: usize,
    phases: &[f64],
    comb: &CombState,
    modulator: &Modulator,
    detector: &DetectorModel,
) -> Result<SweepRecord> {
    Interferometer::qubit(pair_lo, comb, modulator)?.sweep(phases, detector)
}

pub fn run_qutrit_symmetric_sweep(
    phases: &[f64],
    comb: &CombState,
    modulator: &Modulator,
    detector: &DetectorModel,
) -> Result<SweepRecord> {
    Interferometer::qutrit_symmetric(comb, modulator)?.sweep(phases, detector)
}

pub fn run_qutrit_asymmetric_sweep(
    phases: &[f64],
    comb: &CombState,
    modulator: &Modulator,
    detector: &DetectorModel,
) -> Result<SweepRecord> {
    Interferometer::qutrit_asymmetric(comb, modulator)?.sweep(phases, detector)
}

pub fn run_dispersion_point(
    pair_lo: usize,
    fiber: &FiberSpec,
    phases: &[f64],
    comb: &CombState,
    modulator: &Modulator,
    detector: &DetectorModel,
) -> Result<SweepRecord> {
    Interferometer::dispersion_point(pair_lo, &[*fiber], comb, modulator)?.sweep(phases, detector)
}

/// Coincidences versus pair offset at zero applied phase, with the derived
/// fringe shifts and the fitted β₂.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionFit {
    /// `f_os = k·fsr` per point, THz, ascending.
    pub offsets: Vec<f64>,
    /// Accidental-subtracted mean counts.
    pub counts: Vec<f64>,
    /// Zero-fiber reference coincidences per point.
    pub c_max: Vec<f64>,
    /// Unwrapped fringe shift per point, rad.
    pub phase_shifts: Vec<f64>,
    /// Points whose `2C/C_max - 1` fell outside `[-1, 1]` and were clamped.
    pub clamped: Vec<bool>,
    pub line: LineFit,
    /// ps²/m
    pub beta2: f64,
    pub beta2_stderr: f64,
    pub record: SweepRecord,
}

/// Scans neighbouring pairs `(k, k+1)` through `fiber` with no applied phase
/// and extracts β₂ from the slope of the fringe shift versus `f_os`.
///
/// Coincidences are symmetric in the sign of the shift, so the direction of
/// the phase ramp is taken from the sign of `fiber.beta2`.
pub fn run_dispersion_scan(
    k_values: &[usize],
    fiber: &FiberSpec,
    comb: &CombState,
    modulator: &Modulator,
    detector: &DetectorModel,
) -> Result<DispersionFit> {
    if fiber.length == 0.0 {
        return Err(Error::ZeroLength);
    }
    let mut ks = k_values.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if ks.len() < 2 {
        return Err(Error::InvalidArgument(
            "dispersion scan needs at least two distinct pair offsets".into(),
        ));
    }

    let fsr = comb.grid().fsr;
    let mut offsets = Vec::with_capacity(ks.len());
    let mut rates = Vec::with_capacity(ks.len());
    let mut reference = Vec::with_capacity(ks.len());
    for &k in &ks {
        let bare = Interferometer::qubit(k, comb, modulator)?;
        reference.push(bare.rate(0.0)?);
        let through = Interferometer::dispersion_point(k, &[*fiber], comb, modulator)?;
        rates.push(through.rate(0.0)?);
        offsets.push(comb.grid().offset(k));
    }
    let record = SweepRecord::from_rates(&offsets, rates, detector);

    let accidentals = detector.accidental_counts();
    let mut folded = Vec::with_capacity(ks.len());
    let mut clamped = Vec::with_capacity(ks.len());
    let mut c_max = Vec::with_capacity(ks.len());
    for (i, &c) in record.subtracted_counts.iter().enumerate() {
        let cm = detector.signal_counts(reference[i]);
        if !(cm > 0.0) {
            return Err(Error::Calibration(format!(
                "reference coincidences at f_os = {} THz are zero",
                offsets[i]
            )));
        }
        let noise = if detector.noiseless {
            0.0
        } else {
            ((cm + accidentals) / detector.repeats as f64).sqrt()
        };
        let tolerance = 5.0 * noise + 1e-9 * cm;
        if c > cm + tolerance || c < -tolerance {
            return Err(Error::Calibration(format!(
                "{c:.3} coincidences at f_os = {} THz lie outside [0, C_max = {cm:.3}] beyond noise",
                offsets[i]
            )));
        }
        let x = 2.0 * c / cm - 1.0;
        clamped.push(!(-1.0..=1.0).contains(&x));
        folded.push(x.clamp(-1.0, 1.0).acos());
        c_max.push(cm);
    }

    let direction = if fiber.beta2 > 0.0 { -1.0 } else { 1.0 };
    let mut phase_shifts = unfold_folded_phases(&offsets, &folded, direction);
    let mut line = fit_line(&offsets, &phase_shifts, None)?;

    // the shift vanishes at f_os = -fsr/2; pick the 2π offset that honours it
    let turns = (line.eval(-0.5 * fsr) / TAU).round();
    if turns != 0.0 {
        for p in &mut phase_shifts {
            *p -= turns * TAU;
        }
        line.intercept -= turns * TAU;
    }

    let scale = -(TAU * TAU) * fiber.length * 2.0 * fsr;
    Ok(DispersionFit {
        offsets,
        counts: record.subtracted_counts.clone(),
        c_max,
        phase_shifts,
        clamped,
        beta2: line.slope / scale,
        beta2_stderr: line.slope_stderr / scale.abs(),
        line,
        record,
    })
}

/// `C_max/2 · (1 + cos φ_shift(f_os))` on a continuous offset axis.
pub fn dispersion_theory_curve(fiber: &FiberSpec, fsr: f64, offsets: &[f64]) -> Vec<f64> {
    offsets
        .iter()
        .map(|&f| 0.5 * (1.0 + fiber.phase_shift(fsr, f).cos()))
        .collect()
}

/// Visibility-style contrast `(max - min)/(max + min)` of the
/// envelope-normalised correlation over one substructure period around τ = 0.
pub fn substructure_contrast(comb_correlation: &[f64], envelope: &[f64]) -> f64 {
    let (lo, hi) = comb_correlation
        .iter()
        .zip(envelope)
        .map(|(c, e)| c / e)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (hi - lo) / (hi + lo)
}

/// Evenly spaced phases `start, ..., stop` inclusive.
pub fn phase_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// One substructure period `1/(2·fsr)` in ps for `fsr` in THz.
pub fn correlation_period(fsr: f64) -> f64 {
    0.5 / fsr
}

/// `samples` delays spanning one substructure period centred on τ = 0.
pub fn period_grid(fsr: f64, samples: usize) -> Vec<f64> {
    let period = correlation_period(fsr);
    (0..samples)
        .map(|i| -0.5 * period + period * i as f64 / samples as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::CombGrid;
    use crate::numerics::solve_depth_for_power;
    use std::f64::consts::PI;

    fn comb(n: usize) -> CombState {
        CombState::flat(CombGrid::new(194.55, 0.036, 0.012, n).unwrap())
    }

    fn modulator() -> Modulator {
        Modulator::new(solve_depth_for_power(0.32, 1).unwrap(), 0.018).unwrap()
    }

    fn record(settings: &[f64], subtracted: &[f64], std: &[f64]) -> SweepRecord {
        SweepRecord {
            settings: settings.to_vec(),
            expected_rate: subtracted.to_vec(),
            counts: vec![Vec::new(); settings.len()],
            mean_counts: subtracted.to_vec(),
            std_counts: std.to_vec(),
            accidentals_estimate: 0.0,
            subtracted_counts: subtracted.to_vec(),
            warnings: Vec::new(),
        }
    }

    #[test]
    fn thresholds() {
        assert_eq!(classical_threshold(2).unwrap(), 0.71);
        assert_eq!(classical_threshold(3).unwrap(), 0.775);
        assert!(classical_threshold(4).is_err());
    }

    #[test]
    fn zero_rate_and_no_accidentals_give_zero_counts() {
        let det = DetectorModel::new(100.0, 1.0, 0.0, 3, 5).unwrap();
        let s = sample_counts(0.0, &det, 0);
        assert_eq!(s.counts, vec![0, 0, 0]);
        assert_eq!(s.subtracted, 0.0);
        let idle = DetectorModel::new(100.0, 0.0, 10.0, 3, 5).unwrap();
        assert!(sample_counts(1.0, &idle, 0).counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn counts_reproducible_per_point() {
        let det = DetectorModel::new(300.0, 1.0, 100.0, 3, 42).unwrap();
        assert_eq!(sample_counts(0.7, &det, 4), sample_counts(0.7, &det, 4));
        assert_ne!(sample_counts(0.7, &det, 4).counts, sample_counts(0.7, &det, 5).counts);
    }

    #[test]
    fn car_three_means_raw_four_thirds_of_signal() {
        let det = DetectorModel::calibrated(0.25, 300.0, 3.0, 1.0, 3, 0)
            .unwrap()
            .with_noiseless(true);
        let s = sample_counts(0.25, &det, 0);
        assert!((s.subtracted - 300.0).abs() < 1e-9);
        assert!((s.mean / s.subtracted - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn calibration_rejects_zero_peak() {
        assert!(matches!(
            DetectorModel::calibrated(0.0, 300.0, 3.0, 1.0, 3, 0),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn visibility_edge_cases() {
        let p = [0.0, 1.0, 2.0];
        let ideal = estimate_visibility(&record(&p, &[2.0, 1.0, 0.0], &[0.0; 3]), 2).unwrap();
        assert_eq!(ideal.visibility, 1.0);
        assert_eq!(ideal.sigma, 0.0);
        assert!(ideal.entangled && ideal.entangled_central);
        let flat = estimate_visibility(&record(&p, &[5.0; 3], &[1.0; 3]), 2).unwrap();
        assert_eq!(flat.visibility, 0.0);
        assert!(estimate_visibility(&record(&p, &[0.0; 3], &[0.0; 3]), 2).is_err());
        assert!(estimate_visibility(&record(&[0.0], &[1.0], &[0.0]), 2).is_err());
    }

    #[test]
    fn sigma_propagation_matches_formula() {
        let r = estimate_visibility(&record(&[0.0, 1.0], &[90.0, 10.0], &[3.0, 4.0]), 2).unwrap();
        // dV/dCmax = 2 Cmin/(S^2), dV/dCmin = -2 Cmax/(S^2)
        let expected = ((2.0 * 10.0 / 1e4 * 3.0_f64).powi(2) + (2.0 * 90.0 / 1e4 * 4.0_f64).powi(2)).sqrt();
        assert!((r.sigma - expected).abs() < 1e-15);
    }

    #[test]
    fn verdict_reports_both_rules() {
        let v = entanglement_verdict(0.75, 0.07, 2).unwrap();
        assert!(v.entangled_central);
        assert!(!v.entangled);
    }

    #[test]
    fn fwhm_of_raised_cosine_is_half_period() {
        let phases = phase_grid(-PI, PI, 2001);
        let values: Vec<f64> = phases.iter().map(|p| 1.0 + p.cos()).collect();
        assert!((peak_fwhm(&phases, &values, 0.0).unwrap() - PI).abs() < 1e-5);
    }

    #[test]
    fn qubit_sweep_noiseless_is_raised_cosine() {
        let inter = Interferometer::qubit(1, &comb(2), &modulator()).unwrap();
        let a = inter.rate(0.0).unwrap() / 2.0;
        for p in phase_grid(0.0, 2.0 * PI, 37) {
            assert!((inter.rate(p).unwrap() - a * (1.0 + p.cos())).abs() < 1e-12 * a);
        }
        assert!(inter.warnings.is_empty());
    }

    #[test]
    fn qutrit_depth_warnings() {
        let bad = Interferometer::qutrit_symmetric(&comb(3), &modulator()).unwrap();
        assert_eq!(bad.warnings.len(), 1);
        let bad = Interferometer::qutrit_asymmetric(&comb(3), &modulator()).unwrap();
        assert_eq!(bad.warnings.len(), 1);
        assert!(matches!(
            Interferometer::qutrit_symmetric(&comb(2), &modulator()),
            Err(Error::MissingPair { .. })
        ));
    }

    #[test]
    fn scan_rejects_zero_length_and_single_offset() {
        let m = modulator();
        let det = DetectorModel::calibrated(0.1, 300.0, 3.0, 1.0, 3, 0).unwrap();
        let zero = FiberSpec::new(-2.06e-2, 0.0).unwrap();
        assert!(matches!(
            run_dispersion_scan(&[1, 2], &zero, &comb(3), &m, &det),
            Err(Error::ZeroLength)
        ));
        let fiber = FiberSpec::new(-2.06e-2, 100.0).unwrap();
        assert!(run_dispersion_scan(&[1, 1], &fiber, &comb(3), &m, &det).is_err());
    }

    #[test]
    fn phase_grid_inclusive() {
        assert_eq!(phase_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert!(phase_grid(0.0, 1.0, 0).is_empty());
        assert_eq!(correlation_period(0.036), 0.5 / 0.036);
    }
}
