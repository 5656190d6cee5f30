//! Electro-optic phase modulation of comb lines and post-selected biphoton
//! amplitudes.
//!
//! A modulator at depth δ maps a signal line at index `k` onto
//! `k + n·(f_m / fsr)` with amplitude `C_n = J_n(δ)`, and an idler line at
//! index `k` onto `k - m·(f_m / fsr)` with amplitude `C_m`. Idler indices
//! count downward in frequency from the center, so positive orders raise the
//! optical frequency of both photons.
//!
//! Bin matching is exact: positions are kept as integers in units of the
//! modulation frequency, which must divide the FSR.

use num_complex::Complex64;
use std::fmt;

use crate::comb::CombState;
use crate::error::{Error, Result};
use crate::numerics::bessel::{default_cutoff, BesselTable, MAX_ORDER};

/// A frequency-bin index in units of the FSR, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinIndex {
    num: i64,
    den: u32,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl BinIndex {
    pub fn new(num: i64, den: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("bin index with zero denominator".into()));
        }
        let g = gcd(num.unsigned_abs(), den as u64).max(1);
        Ok(Self {
            num: num / g as i64,
            den: (den as u64 / g) as u32,
        })
    }

    pub fn integer(k: i64) -> Self {
        Self { num: k, den: 1 }
    }

    /// The bin halfway between comb lines `k` and `k + 1`.
    pub fn midpoint(k: i64) -> Self {
        Self {
            num: 2 * k + 1,
            den: 2,
        }
    }

    /// Nearest fraction with denominator up to 64, if `x` is one to 1e-9.
    pub fn approximate(x: f64) -> Option<Self> {
        (1..=64u32).find_map(|den| {
            let scaled = x * den as f64;
            let num = scaled.round();
            ((scaled - num).abs() < 1e-9 * den as f64).then(|| Self::new(num as i64, den).ok())?
        })
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> u32 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Position in modulation-frequency steps when one FSR spans `steps`.
    fn to_steps(self, steps: i64) -> Option<i64> {
        let scaled = self.num * steps;
        (scaled % self.den as i64 == 0).then(|| scaled / self.den as i64)
    }

    fn from_steps(position: i64, steps: i64) -> Self {
        Self::new(position, steps as u32).expect("steps per FSR is positive")
    }
}

impl fmt::Display for BinIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Signal and idler detection bins after the second pulse shaper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OutputBin {
    pub signal: BinIndex,
    pub idler: BinIndex,
}

impl OutputBin {
    pub fn new(signal: BinIndex, idler: BinIndex) -> Self {
        Self { signal, idler }
    }

    /// Both photons at the midpoint between pairs `k` and `k + 1`.
    pub fn midpoint(k: i64) -> Self {
        Self::new(BinIndex::midpoint(k), BinIndex::midpoint(k))
    }
}

impl fmt::Display for OutputBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(S {}, I {})", self.signal, self.idler)
    }
}

/// One contribution to a projected amplitude: pair `k` reaching the output
/// through signal order `n` and idler order `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandPath {
    pub pair: usize,
    pub signal_order: i64,
    pub idler_order: i64,
    pub amplitude: Complex64,
}

/// Sinusoidal phase modulator shared by signal and idler.
#[derive(Debug, Clone, PartialEq)]
pub struct Modulator {
    depth: f64,
    mod_frequency: f64,
    max_order: Option<u32>,
    table: BesselTable,
}

impl Modulator {
    /// `depth` is δ, `mod_frequency` is in THz. The sideband cutoff defaults
    /// to `ceil(δ) + 20`.
    pub fn new(depth: f64, mod_frequency: f64) -> Result<Self> {
        Self::with_cutoff(depth, mod_frequency, default_cutoff(depth))
    }

    pub fn with_cutoff(depth: f64, mod_frequency: f64, cutoff: u32) -> Result<Self> {
        if !(depth >= 0.0 && depth.is_finite()) {
            return Err(Error::validation("modulator.depth", "must be finite and >= 0"));
        }
        if !(mod_frequency > 0.0 && mod_frequency.is_finite()) {
            return Err(Error::validation("modulator.mod_frequency", "must be > 0"));
        }
        if cutoff < default_cutoff(depth) || cutoff > MAX_ORDER {
            return Err(Error::validation(
                "modulator.cutoff",
                format!(
                    "must lie in [{}, {MAX_ORDER}] for depth {depth}",
                    default_cutoff(depth)
                ),
            ));
        }
        Ok(Self {
            depth,
            mod_frequency,
            max_order: None,
            table: BesselTable::new(depth, cutoff)?,
        })
    }

    /// Drops every sideband order above `max_order` in projections, which
    /// reproduces the idealised few-order closed forms.
    pub fn truncated(mut self, max_order: u32) -> Self {
        self.max_order = Some(max_order);
        self
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn mod_frequency(&self) -> f64 {
        self.mod_frequency
    }

    pub fn cutoff(&self) -> u32 {
        self.table.n_max()
    }

    pub fn max_order(&self) -> Option<u32> {
        self.max_order
    }

    /// Highest order that takes part in projections.
    pub fn kept_order(&self) -> u32 {
        self.max_order.map_or(self.cutoff(), |m| m.min(self.cutoff()))
    }

    /// `C_n = J_n(δ)`, with `C_{-n} = (-1)^n C_n`.
    pub fn sideband_amplitude(&self, n: i64) -> Result<f64> {
        self.table.get(n).ok_or(Error::CutoffExceeded {
            order: n,
            cutoff: self.cutoff(),
        })
    }

    /// `Σ_{|n| <= cutoff} |C_n|²`: the single-photon power kept by the cutoff.
    pub fn sideband_power_sum(&self) -> f64 {
        self.table.power_sum()
    }

    /// Number of modulation steps in one FSR.
    pub fn steps_per_fsr(&self, fsr: f64) -> Result<i64> {
        let ratio = fsr / self.mod_frequency;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > 1e-9 * ratio {
            return Err(Error::IncommensurateModulation {
                mod_frequency: self.mod_frequency,
                fsr,
            });
        }
        Ok(steps as i64)
    }

    fn kept(&self, order: i64) -> Option<f64> {
        if order.unsigned_abs() > self.kept_order() as u64 {
            return None;
        }
        self.table.get(order)
    }

    /// Every kept `(k, n, m)` path into `out`, with its amplitude
    /// `α_k C_n C_m`.
    pub fn projection_paths(&self, state: &CombState, out: OutputBin) -> Result<Vec<SidebandPath>> {
        let steps = self.steps_per_fsr(state.grid().fsr)?;
        let unreachable = || Error::UnreachableBin(out.to_string());
        let signal = out.signal.to_steps(steps).ok_or_else(unreachable)?;
        let idler = out.idler.to_steps(steps).ok_or_else(unreachable)?;

        let paths: Vec<SidebandPath> = state
            .pairs()
            .filter_map(|(k, alpha)| {
                let line = steps * k as i64;
                let n = signal - line;
                let m = line - idler;
                let (cn, cm) = (self.kept(n)?, self.kept(m)?);
                Some(SidebandPath {
                    pair: k,
                    signal_order: n,
                    idler_order: m,
                    amplitude: alpha * (cn * cm),
                })
            })
            .collect();
        if paths.is_empty() {
            return Err(unreachable());
        }
        Ok(paths)
    }

    /// Post-selected biphoton amplitude on `out`.
    pub fn project_amplitude(&self, state: &CombState, out: OutputBin) -> Result<Complex64> {
        Ok(self
            .projection_paths(state, out)?
            .iter()
            .map(|p| p.amplitude)
            .sum())
    }

    /// `⟨ψ_out|ψ_out⟩` on `out`.
    pub fn coincidence_rate(&self, state: &CombState, out: OutputBin) -> Result<f64> {
        Ok(self.project_amplitude(state, out)?.norm_sqr())
    }

    /// Every output bin reachable from `state` with kept orders.
    pub fn output_lattice(&self, state: &CombState) -> Result<Vec<OutputBin>> {
        let steps = self.steps_per_fsr(state.grid().fsr)?;
        let reach = self.kept_order() as i64;
        let lo = steps - reach;
        let hi = steps * state.grid().num_pairs as i64 + reach;
        let mut bins = Vec::new();
        for s in lo..=hi {
            for i in lo..=hi {
                bins.push(OutputBin::new(
                    BinIndex::from_steps(s, steps),
                    BinIndex::from_steps(i, steps),
                ));
            }
        }
        Ok(bins)
    }

    /// Coincidence rate summed over the whole output lattice.
    pub fn total_output_rate(&self, state: &CombState) -> Result<f64> {
        let mut total = 0.0;
        for bin in self.output_lattice(state)? {
            match self.coincidence_rate(state, bin) {
                Ok(r) => total += r,
                Err(Error::UnreachableBin(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::{CombGrid, ShaperMask};
    use crate::numerics::{bessel_j, solve_depth_for_power, solve_depth_for_ratio};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const FSR: f64 = 0.036;

    fn flat(n: usize) -> CombState {
        CombState::flat(CombGrid::new(194.55, FSR, 0.012, n).unwrap())
    }

    fn half_fsr(depth: f64) -> Modulator {
        Modulator::new(depth, FSR / 2.0).unwrap()
    }

    /// Independent brute force: every (k, n, m) within the cutoff, matched
    /// on floating-point frequency offsets.
    fn brute_force(state: &CombState, m: &Modulator, signal: f64, idler: f64, kept: i64) -> Complex64 {
        let fm = m.mod_frequency();
        let mut amp = Complex64::new(0.0, 0.0);
        for (k, alpha) in state.pairs() {
            let f_line = k as f64 * FSR;
            for n in -kept..=kept {
                for mm in -kept..=kept {
                    let s_hit = (f_line + n as f64 * fm - signal * FSR).abs() < 1e-9;
                    let i_hit = (f_line - mm as f64 * fm - idler * FSR).abs() < 1e-9;
                    if s_hit && i_hit {
                        amp += alpha * bessel_j(n as i32, m.depth()).unwrap() * bessel_j(mm as i32, m.depth()).unwrap();
                    }
                }
            }
        }
        amp
    }

    #[test]
    fn bin_index_arithmetic() {
        assert_eq!(BinIndex::new(3, 2).unwrap(), BinIndex::midpoint(1));
        assert_eq!(BinIndex::new(4, 2).unwrap(), BinIndex::integer(2));
        assert_eq!(BinIndex::approximate(2.5), Some(BinIndex::midpoint(2)));
        assert_eq!(BinIndex::approximate(-1.0 / 3.0), BinIndex::new(-1, 3).ok());
        assert_eq!(BinIndex::approximate(std::f64::consts::PI), None);
        assert_eq!(BinIndex::midpoint(1).to_string(), "3/2");
        assert!(BinIndex::new(1, 0).is_err());
    }

    #[test]
    fn identity_modulator() {
        let m = half_fsr(0.0);
        assert_eq!(m.sideband_amplitude(0).unwrap(), 1.0);
        assert_eq!(m.sideband_amplitude(3).unwrap(), 0.0);
        let raw = [Complex64::new(0.6, 0.1), Complex64::new(-0.2, 0.5), Complex64::new(0.3, 0.3)];
        let s = CombState::build(*flat(3).grid(), &raw).unwrap();
        for k in 1..=3 {
            let out = OutputBin::new(BinIndex::integer(k), BinIndex::integer(k));
            let amp = m.project_amplitude(&s, out).unwrap();
            assert_eq!(amp, s.amplitude(k as usize).unwrap());
        }
    }

    #[test]
    fn measured_first_sideband_power() {
        let d = solve_depth_for_power(0.32, 1).unwrap();
        let m = half_fsr(d);
        assert!((m.sideband_amplitude(1).unwrap().powi(2) - 0.32).abs() < 1e-9);
        assert_eq!(m.sideband_amplitude(-1).unwrap(), -m.sideband_amplitude(1).unwrap());
        assert_eq!(m.sideband_amplitude(-2).unwrap(), m.sideband_amplitude(2).unwrap());
    }

    #[test]
    fn cutoff_enforced() {
        let m = half_fsr(1.0);
        assert_eq!(m.cutoff(), 21);
        assert!(matches!(
            m.sideband_amplitude(22),
            Err(Error::CutoffExceeded { .. })
        ));
        assert!(Modulator::with_cutoff(1.0, FSR / 2.0, 5).is_err());
        assert!(Modulator::new(-1.0, FSR / 2.0).is_err());
        assert!(Modulator::new(1.0, 0.0).is_err());
    }

    #[test]
    fn qubit_closed_form_with_first_order_truncation() {
        let d = solve_depth_for_power(0.32, 1).unwrap();
        let m = half_fsr(d).truncated(1);
        let c1 = bessel_j(1, d).unwrap();
        let s = flat(2);
        let amp = m.project_amplitude(&s, OutputBin::midpoint(1)).unwrap();
        let expected = c1 * -c1 * (s.amplitude(1).unwrap() + s.amplitude(2).unwrap());
        assert!((amp - expected).norm() < 1e-15);
        // full enumeration over a two-pair comb has no further paths
        let full = half_fsr(d).project_amplitude(&s, OutputBin::midpoint(1)).unwrap();
        assert!((full - expected).norm() < 1e-15);
    }

    #[test]
    fn higher_orders_from_distant_lines_match_brute_force() {
        let d = solve_depth_for_power(0.32, 1).unwrap();
        let m = half_fsr(d);
        let raw: Vec<Complex64> = (0..6).map(|i| Complex64::from_polar(1.0, 0.7 * i as f64)).collect();
        let s = CombState::build(*flat(6).grid(), &raw).unwrap();
        let amp = m.project_amplitude(&s, OutputBin::midpoint(2)).unwrap();
        let oracle = brute_force(&s, &m, 2.5, 2.5, m.cutoff() as i64);
        assert!((amp - oracle).norm() < 1e-15);

        let paths = m.projection_paths(&s, OutputBin::midpoint(2)).unwrap();
        let orders: Vec<(usize, i64, i64)> =
            paths.iter().map(|p| (p.pair, p.signal_order, p.idler_order)).collect();
        assert_eq!(orders, vec![(1, 3, -3), (2, 1, -1), (3, -1, 1), (4, -3, 3), (5, -5, 5), (6, -7, 7)]);

        // the first-order part is the two-term closed form
        let m1 = half_fsr(d).truncated(1);
        let two_term = m1.project_amplitude(&s, OutputBin::midpoint(2)).unwrap();
        let c1 = bessel_j(1, d).unwrap();
        let expected = -c1 * c1 * (s.amplitude(2).unwrap() + s.amplitude(3).unwrap());
        assert!((two_term - expected).norm() < 1e-15);
        let rest: Complex64 = paths
            .iter()
            .filter(|p| p.signal_order.abs() > 1)
            .map(|p| p.amplitude)
            .sum();
        assert!((amp - two_term - rest).norm() < 1e-15);
    }

    #[test]
    fn qutrit_symmetric_paths() {
        let d = solve_depth_for_ratio(1.0, 3, 1).unwrap();
        let m = half_fsr(d);
        let s = flat(3);
        let out = OutputBin::midpoint(1);
        let paths = m.projection_paths(&s, out).unwrap();
        let signal: Vec<i64> = paths.iter().map(|p| p.signal_order).collect();
        let idler: Vec<i64> = paths.iter().map(|p| p.idler_order).collect();
        assert_eq!(signal, vec![1, -1, -3]);
        assert_eq!(idler, vec![-1, 1, 3]);

        let mask = ShaperMask::identity(3)
            .with_pair_phase(2, 2.0 * PI / 3.0)
            .unwrap()
            .with_pair_phase(3, 4.0 * PI / 3.0)
            .unwrap();
        let rate = m.coincidence_rate(&s.apply_mask(&mask).unwrap(), out).unwrap();
        let peak = m.coincidence_rate(&s, out).unwrap();
        assert!(rate < 1e-10 * peak, "{rate} vs {peak}");
    }

    #[test]
    fn qubit_destructive_point() {
        let d = solve_depth_for_power(0.32, 1).unwrap();
        let m = half_fsr(d).truncated(1);
        let s = flat(2)
            .apply_mask(&ShaperMask::identity(2).with_pair_phase(2, PI).unwrap())
            .unwrap();
        let rate = m.coincidence_rate(&s, OutputBin::midpoint(1)).unwrap();
        assert!(rate < 1e-30);
        let s0 = flat(2);
        let c1 = bessel_j(1, d).unwrap();
        let peak = m.coincidence_rate(&s0, OutputBin::midpoint(1)).unwrap();
        assert!((peak - c1.powi(4) * 2.0).abs() < 1e-15);
    }

    #[test]
    fn unreachable_bins() {
        let s = flat(2);
        // quarter-FSR bins fall between modulation steps
        let out = OutputBin::new(BinIndex::new(5, 4).unwrap(), BinIndex::midpoint(1));
        assert!(matches!(
            half_fsr(1.0).project_amplitude(&s, out),
            Err(Error::UnreachableBin(_))
        ));
        // beyond every kept order
        let far = OutputBin::new(BinIndex::integer(40), BinIndex::integer(1));
        assert!(half_fsr(1.0).project_amplitude(&s, far).is_err());
        // modulation at 0.7 FSR does not tile the comb
        let odd = Modulator::new(1.0, FSR * 0.7).unwrap();
        assert!(matches!(
            odd.project_amplitude(&s, OutputBin::midpoint(1)),
            Err(Error::IncommensurateModulation { .. })
        ));
        // ω_m = Δω makes half-integer bins unreachable
        let full = Modulator::new(1.0, FSR).unwrap();
        assert!(full.project_amplitude(&s, OutputBin::midpoint(1)).is_err());
    }

    #[test]
    fn single_photon_unitarity() {
        for &d in &[0.0, 0.5, 1.0, 2.57, 3.05, 12.0] {
            let m = half_fsr(d);
            assert!((m.sideband_power_sum() - 1.0).abs() <= 1e-12, "δ={d}");
        }
    }

    #[test]
    fn biphoton_parseval() {
        let raw = [Complex64::new(1.0, 0.0), Complex64::new(0.2, 0.7), Complex64::new(-0.4, 0.1)];
        for &d in &[0.5, 1.0, 2.0] {
            let m = half_fsr(d);
            let s = CombState::build(*flat(3).grid(), &raw).unwrap();
            let total = m.total_output_rate(&s).unwrap();
            assert!((total - 1.0).abs() <= 1e-12, "δ={d} total={total}");
        }
    }

    proptest! {
        #[test]
        fn projection_is_linear(
            a in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
            b in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
            wa in -2.0f64..2.0,
            wb in -2.0f64..2.0,
            depth in 0.1f64..3.0,
            signal in 0i64..14,
            idler in 0i64..14,
        ) {
            let grid = *flat(4).grid();
            let m = half_fsr(depth);
            let out = OutputBin::new(BinIndex::new(signal, 2).unwrap(), BinIndex::new(idler, 2).unwrap());
            let to_c = |v: &Vec<(f64, f64)>| v.iter().map(|&(r, i)| Complex64::new(r, i + 2.0)).collect::<Vec<_>>();
            let (ca, cb) = (to_c(&a), to_c(&b));
            let sa = CombState::build(grid, &ca).unwrap();
            let sb = CombState::build(grid, &cb).unwrap();
            let na = ca.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let nb = cb.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let mixed: Vec<Complex64> = ca.iter().zip(&cb).map(|(x, y)| x * wa + y * wb).collect();
            let nm = mixed.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assume!(nm > 1e-6);
            let sm = CombState::build(grid, &mixed).unwrap();

            let pa = m.project_amplitude(&sa, out).unwrap();
            let pb = m.project_amplitude(&sb, out).unwrap();
            let pm = m.project_amplitude(&sm, out).unwrap();
            let combined = (pa * na * wa + pb * nb * wb) / nm;
            prop_assert!((pm - combined).norm() < 1e-12);
        }
    }
}
