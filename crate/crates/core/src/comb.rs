//! Biphoton frequency comb state, pulse-shaper masks and fiber dispersion.
//!
//! Pair `k` (1-based) is the signal line at `f0 + k·fsr` together with the
//! idler line at `f0 - k·fsr`. Its joint complex amplitude is `α_k`.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Speed of light in nm/ps.
const SPEED_OF_LIGHT_NM_PER_PS: f64 = 299_792.458;

/// Center wavelength assumed when converting a dispersion parameter `D` to β₂.
pub const DEFAULT_WAVELENGTH_NM: f64 = 1542.0;

/// Frequency lattice of the carved comb. All frequencies in THz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombGrid {
    pub center_frequency: f64,
    pub fsr: f64,
    pub linewidth: f64,
    pub num_pairs: usize,
}

impl CombGrid {
    pub fn new(center_frequency: f64, fsr: f64, linewidth: f64, num_pairs: usize) -> Result<Self> {
        if !(fsr > 0.0 && fsr.is_finite()) {
            return Err(Error::validation("comb.fsr", "must be > 0"));
        }
        if !(linewidth > 0.0 && linewidth < fsr) {
            return Err(Error::validation(
                "comb.linewidth",
                format!("must lie in (0, fsr = {fsr})"),
            ));
        }
        if num_pairs == 0 {
            return Err(Error::validation("comb.num_pairs", "must be >= 1"));
        }
        if !center_frequency.is_finite() {
            return Err(Error::validation("comb.center_frequency", "must be finite"));
        }
        Ok(Self {
            center_frequency,
            fsr,
            linewidth,
            num_pairs,
        })
    }

    /// Offset of pair `k` from the center frequency, `k·fsr`.
    pub fn offset(&self, pair: usize) -> f64 {
        pair as f64 * self.fsr
    }

    pub(crate) fn check_pair(&self, pair: usize) -> Result<()> {
        if pair == 0 || pair > self.num_pairs {
            return Err(Error::MissingPair {
                pair,
                num_pairs: self.num_pairs,
            });
        }
        Ok(())
    }
}

/// Normalised comb state; `amplitudes[k - 1]` is `α_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombState {
    grid: CombGrid,
    amplitudes: Vec<Complex64>,
}

fn normalise(amplitudes: &mut [Complex64]) -> Result<()> {
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::ZeroState);
    }
    for a in amplitudes {
        *a /= norm;
    }
    Ok(())
}

impl CombState {
    /// Builds a normalised state from unnormalised pair amplitudes.
    pub fn build(grid: CombGrid, raw: &[Complex64]) -> Result<Self> {
        if raw.len() != grid.num_pairs {
            return Err(Error::validation(
                "comb.amplitudes",
                format!("{} amplitudes for {} pairs", raw.len(), grid.num_pairs),
            ));
        }
        let mut amplitudes = raw.to_vec();
        normalise(&mut amplitudes)?;
        Ok(Self { grid, amplitudes })
    }

    /// Equal real amplitudes on every pair, the maximally entangled comb.
    pub fn flat(grid: CombGrid) -> Self {
        let a = Complex64::new(1.0 / (grid.num_pairs as f64).sqrt(), 0.0);
        Self {
            grid,
            amplitudes: vec![a; grid.num_pairs],
        }
    }

    pub fn grid(&self) -> &CombGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `α_k` for 1-based `pair`.
    pub fn amplitude(&self, pair: usize) -> Option<Complex64> {
        pair.checked_sub(1).and_then(|i| self.amplitudes.get(i).copied())
    }

    /// Iterates `(k, α_k)`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.amplitudes.iter().enumerate().map(|(i, &a)| (i + 1, a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies per-pair attenuation and the summed signal/idler phases, then
    /// renormalises.
    pub fn apply_mask(&self, mask: &ShaperMask) -> Result<Self> {
        if mask.len() != self.grid.num_pairs {
            return Err(Error::InvalidArgument(format!(
                "mask covers {} pairs, comb has {}",
                mask.len(),
                self.grid.num_pairs
            )));
        }
        let mut amplitudes: Vec<Complex64> = self
            .amplitudes
            .iter()
            .zip(&mask.pairs)
            .map(|(&a, m)| a * Complex64::from_polar(m.amplitude, m.signal_phase + m.idler_phase))
            .collect();
        normalise(&mut amplitudes)?;
        Ok(Self {
            grid: self.grid,
            amplitudes,
        })
    }

    /// Propagates both photons through `fiber`; pair `k` picks up
    /// `exp(-i (2π)² β₂ l (k·fsr)²)`, bins treated as spectrally narrow.
    pub fn apply_dispersion(&self, fiber: &FiberSpec) -> Self {
        let amplitudes = self
            .pairs()
            .map(|(k, a)| a * Complex64::from_polar(1.0, fiber.pair_phase(self.grid.offset(k))))
            .collect();
        Self {
            grid: self.grid,
            amplitudes,
        }
    }

    /// Keeps only `pairs`, blocking every other line pair, and renormalises.
    pub fn carve(&self, pairs: &[usize]) -> Result<Self> {
        let mut mask = ShaperMask::blocking(self.grid.num_pairs);
        for &k in pairs {
            self.grid.check_pair(k)?;
            mask.set_attenuation(k, 1.0)?;
        }
        self.apply_mask(&mask)
    }

    /// Coincidence intensity `|ψ(τ)|²` versus signal–idler delay τ (ps).
    ///
    /// `ψ(τ) = sinc(π·linewidth·τ) · Σ_k α_k exp(i 2π (2k·fsr) τ)`; the
    /// substructure repeats every `1 / (2·fsr)`.
    pub fn temporal_correlation(&self, tau_ps: &[f64]) -> Vec<f64> {
        tau_ps
            .iter()
            .map(|&tau| {
                let envelope = sinc(PI * self.grid.linewidth * tau);
                let sum: Complex64 = self
                    .pairs()
                    .map(|(k, a)| a * Complex64::from_polar(1.0, TAU * 2.0 * self.grid.offset(k) * tau))
                    .sum();
                envelope * envelope * sum.norm_sqr()
            })
            .collect()
    }

    /// Envelope `sinc²(π·linewidth·τ)` alone.
    pub fn correlation_envelope(&self, tau_ps: &[f64]) -> Vec<f64> {
        tau_ps
            .iter()
            .map(|&tau| sinc(PI * self.grid.linewidth * tau).powi(2))
            .collect()
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMask {
    pub amplitude: f64,
    pub signal_phase: f64,
    pub idler_phase: f64,
}

impl Default for PairMask {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            signal_phase: 0.0,
            idler_phase: 0.0,
        }
    }
}

/// Per-pair amplitude and phase pattern of the first pulse shaper.
#[derive(Debug, Clone, PartialEq)]
pub struct ShaperMask {
    pairs: Vec<PairMask>,
}

impl ShaperMask {
    pub fn identity(num_pairs: usize) -> Self {
        Self {
            pairs: vec![PairMask::default(); num_pairs],
        }
    }

    /// Every pair attenuated to zero.
    pub fn blocking(num_pairs: usize) -> Self {
        Self {
            pairs: vec![
                PairMask {
                    amplitude: 0.0,
                    ..PairMask::default()
                };
                num_pairs
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, pair: usize) -> Option<&PairMask> {
        pair.checked_sub(1).and_then(|i| self.pairs.get(i))
    }

    fn slot(&mut self, pair: usize) -> Result<&mut PairMask> {
        let num_pairs = self.pairs.len();
        pair.checked_sub(1)
            .and_then(|i| self.pairs.get_mut(i))
            .ok_or(Error::MissingPair { pair, num_pairs })
    }

    pub fn set_attenuation(&mut self, pair: usize, amplitude: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&amplitude) {
            return Err(Error::InvalidArgument(format!(
                "mask amplitude {amplitude} outside [0, 1]"
            )));
        }
        self.slot(pair)?.amplitude = amplitude;
        Ok(())
    }

    pub fn set_phases(&mut self, pair: usize, signal: f64, idler: f64) -> Result<()> {
        if !(signal.is_finite() && idler.is_finite()) {
            return Err(Error::InvalidArgument("mask phases must be finite".into()));
        }
        let slot = self.slot(pair)?;
        slot.signal_phase = signal;
        slot.idler_phase = idler;
        Ok(())
    }

    /// Gives `pair` a total phase `phase`, split evenly over signal and idler.
    pub fn set_pair_phase(&mut self, pair: usize, phase: f64) -> Result<()> {
        self.set_phases(pair, 0.5 * phase, 0.5 * phase)
    }

    /// Builder form of [`ShaperMask::set_pair_phase`].
    pub fn with_pair_phase(mut self, pair: usize, phase: f64) -> Result<Self> {
        self.set_pair_phase(pair, phase)?;
        Ok(self)
    }
}

/// Length of fiber with group-velocity dispersion β₂ (ps²/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberSpec {
    pub beta2: f64,
    pub length: f64,
}

impl FiberSpec {
    pub fn new(beta2: f64, length: f64) -> Result<Self> {
        if !(length >= 0.0 && length.is_finite()) {
            return Err(Error::validation("fiber.length", "must be finite and >= 0"));
        }
        if !beta2.is_finite() {
            return Err(Error::validation("fiber.beta2", "must be finite"));
        }
        Ok(Self { beta2, length })
    }

    /// From a dispersion parameter `D` in ps/(nm·km) at `wavelength_nm`,
    /// using `β₂ = -D λ² / (2π c)`.
    pub fn from_dispersion_parameter(d: f64, wavelength_nm: f64, length: f64) -> Result<Self> {
        Self::new(beta2_from_dispersion_parameter(d, wavelength_nm), length)
    }

    /// Spectral phase on a line pair at offset `f_os` (THz) from center.
    pub fn pair_phase(&self, f_os: f64) -> f64 {
        -(TAU * TAU) * self.beta2 * self.length * f_os * f_os
    }

    /// Relative phase of pair `k+1` with respect to pair `k`.
    pub fn phase_shift(&self, fsr: f64, f_os: f64) -> f64 {
        dispersion_phase_shift(self.beta2, self.length, fsr, f_os)
    }

    /// Two fibers spliced end to end, if they share β₂.
    pub fn then(&self, next: &FiberSpec) -> Option<FiberSpec> {
        (self.beta2 == next.beta2).then(|| FiberSpec {
            beta2: self.beta2,
            length: self.length + next.length,
        })
    }
}

/// β₂ in ps²/m from `D` in ps/(nm·km).
pub fn beta2_from_dispersion_parameter(d: f64, wavelength_nm: f64) -> f64 {
    // ps/(nm km) · nm² / (nm/ps) = ps²/km
    -d * wavelength_nm * wavelength_nm / (TAU * SPEED_OF_LIGHT_NM_PER_PS) / 1000.0
}

pub fn ghz_to_thz(ghz: f64) -> f64 {
    ghz / 1000.0
}

/// Fringe shift between neighbouring pairs at offset `f_os` and `f_os + fsr`:
/// `-(2π)² β₂ l fsr (2 f_os + fsr)`, summed over signal and idler.
pub fn dispersion_phase_shift(beta2: f64, length: f64, fsr: f64, f_os: f64) -> f64 {
    -(TAU * TAU) * beta2 * length * fsr * (2.0 * f_os + fsr)
}
