//! Scenario configuration files.
//!
//! A scenario is a TOML document with four sections. Units are fixed: THz
//! for frequencies, ps for delays, m for fiber length, ps²/m for β₂ and rad
//! for phases. `D` values are in ps/(nm·km) and wavelengths in nm.
//!
//! ```toml
//! [comb]
//! fsr = 0.036            # THz
//! num_pairs = 2
//!
//! [modulator]
//! mod_frequency = "fsr/2"
//! target_power = 0.32    # |C_1|^2
//!
//! [detector]
//! seed = 7
//!
//! [scenario]
//! kind = "qubit"
//! pair = 1
//! ```
//!
//! [`parse_config`] fills every default it applies back into the returned
//! value, so [`to_canonical_string`] of a parsed config lists the complete
//! setup. The defaults are:
//!
//! | key | default |
//! |---|---|
//! | `comb.center_frequency` | 194.55 |
//! | `comb.linewidth` | `fsr / 3` |
//! | `comb.amplitudes` | 1.0 on every pair |
//! | `modulator.mod_frequency` | `"fsr/2"` |
//! | `modulator.order` (with `target_power`) | 1 |
//! | `modulator.ratio_orders` (with `target_ratio`) | `[3, 1]` |
//! | `detector.peak_counts` (unless `rate_scale`) | 300 |
//! | `detector.car` (unless `accidental_rate`) | 3.0 |
//! | `detector.integration_time` | 1.0 s |
//! | `detector.repeats` | 3 |
//! | `scenario.pair` (qubit, dispersion_point) | 1 |
//! | `scenario.phases` (phase sweeps) | 13 points over `[0, 2π]` |
//! | `scenario.k_values` (dispersion_scan) | every `k` with `k + 1 <= num_pairs` |
//! | `scenario.tau` (correlation) | 2001 points over `[-100, 100]` ps |
//! | `scenario.theory_points` | 721 |
//! | `scenario.fiber.wavelength` (with `dispersion`) | 1542 nm |
//!
//! The detector seed is not defaulted here: the runner resolves it from the
//! command line, this file, or `QCOMB_SEED`, in that order.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::comb::DEFAULT_WAVELENGTH_NM;
use crate::error::{Error, Result};

pub const DEFAULT_CENTER_FREQUENCY: f64 = 194.55;
pub const DEFAULT_PEAK_COUNTS: f64 = 300.0;
pub const DEFAULT_CAR: f64 = 3.0;
pub const DEFAULT_REPEATS: u32 = 3;
pub const DEFAULT_PHASE_POINTS: usize = 13;
pub const DEFAULT_THEORY_POINTS: usize = 721;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub comb: CombSection,
    pub modulator: ModulatorSection,
    #[serde(default)]
    pub detector: DetectorSection,
    pub scenario: ScenarioSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_frequency: Option<f64>,
    pub fsr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linewidth: Option<f64>,
    pub num_pairs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<Amplitude>>,
}

/// A real amplitude, or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl Amplitude {
    pub fn parts(self) -> (f64, f64) {
        match self {
            Amplitude::Real(re) => (re, 0.0),
            Amplitude::Complex([re, im]) => (re, im),
        }
    }
}

/// Modulation frequency in THz, or `"fsr/N"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModFrequency {
    Thz(f64),
    Expr(String),
}

impl ModFrequency {
    pub fn resolve(&self, fsr: f64) -> Result<f64> {
        match self {
            ModFrequency::Thz(f) => Ok(*f),
            ModFrequency::Expr(text) => {
                let divisor = text
                    .trim()
                    .strip_prefix("fsr/")
                    .and_then(|d| d.trim().parse::<u32>().ok())
                    .filter(|&d| d > 0)
                    .ok_or_else(|| {
                        Error::validation(
                            "modulator.mod_frequency",
                            format!("expected a number in THz or \"fsr/N\", got {text:?}"),
                        )
                    })?;
                Ok(fsr / divisor as f64)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulatorSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mod_frequency: Option<ModFrequency>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<f64>,
    /// Solve for the depth giving `|C_order|² = target_power`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<i32>,
    /// Solve for the depth giving `|C_a| / |C_b| = target_ratio`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_orders: Option<[i32; 2]>,
    /// Keep only sideband orders up to this magnitude.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    /// True coincidences per measurement at the pattern maximum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_counts: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integration_time: Option<f64>,
    /// Coincidence-to-accidental ratio at the pattern maximum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub car: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accidental_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeats: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Qubit,
    QutritSymmetric,
    QutritAsymmetric,
    DispersionPoint,
    DispersionScan,
    Correlation,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Qubit => "qubit",
            ScenarioKind::QutritSymmetric => "qutrit_symmetric",
            ScenarioKind::QutritAsymmetric => "qutrit_asymmetric",
            ScenarioKind::DispersionPoint => "dispersion_point",
            ScenarioKind::DispersionScan => "dispersion_scan",
            ScenarioKind::Correlation => "correlation",
        }
    }

    fn sweeps_phase(self) -> bool {
        matches!(
            self,
            ScenarioKind::Qubit
                | ScenarioKind::QutritSymmetric
                | ScenarioKind::QutritAsymmetric
                | ScenarioKind::DispersionPoint
        )
    }
}

/// Explicit values, or `{ start, stop, points }` inclusive of both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Range { start, stop, points } => {
                crate::experiment::phase_grid(*start, *stop, *points)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSection {
    /// ps²/m
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta2: Option<f64>,
    /// `D` in ps/(nm·km), converted at `wavelength`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<f64>,
    /// m
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_values: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<FiberSection>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn parse_error(text: &str, err: toml::de::Error) -> Error {
    Error::Parse {
        line: err.span().map_or(0, |s| line_of(text, s.start)),
        message: err.message().trim().to_string(),
    }
}

/// Parses, fills defaults and validates a scenario document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| parse_error(text, e))?;
    finish(cfg)
}

/// [`parse_config`] after applying `section.key=value` overrides.
pub fn parse_config_with_overrides(text: &str, overrides: &[String]) -> Result<ScenarioConfig> {
    if overrides.is_empty() {
        return parse_config(text);
    }
    let mut table: toml::Table = text.parse().map_err(|e| parse_error(text, e))?;
    for item in overrides {
        apply_override(&mut table, item)?;
    }
    let cfg = ScenarioConfig::deserialize(toml::Value::Table(table))
        .map_err(|e| Error::validation("--set", e.message().trim()))?;
    finish(cfg)
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<()> {
    let (path, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::validation("--set", format!("expected section.key=value, got {item:?}")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.len() < 2 || keys.iter().any(|k| k.is_empty()) {
        return Err(Error::validation("--set", format!("{path:?} is not section.key")));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let mut node = table;
    for key in &keys[..keys.len() - 1] {
        node = node
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::validation(path, format!("`{key}` is not a section")))?;
    }
    node.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

/// Canonical TOML text of a config.
pub fn to_canonical_string(cfg: &ScenarioConfig) -> String {
    toml::to_string(cfg).expect("scenario configs always serialise")
}

fn finish(mut cfg: ScenarioConfig) -> Result<ScenarioConfig> {
    fill_defaults(&mut cfg);
    validate(&cfg)?;
    Ok(cfg)
}

fn fill_defaults(cfg: &mut ScenarioConfig) {
    let comb = &mut cfg.comb;
    comb.center_frequency.get_or_insert(DEFAULT_CENTER_FREQUENCY);
    comb.linewidth.get_or_insert(comb.fsr / 3.0);
    if comb.amplitudes.is_none() {
        comb.amplitudes = Some(vec![Amplitude::Real(1.0); comb.num_pairs]);
    }

    let m = &mut cfg.modulator;
    m.mod_frequency
        .get_or_insert_with(|| ModFrequency::Expr("fsr/2".into()));
    if m.target_power.is_some() {
        m.order.get_or_insert(1);
    }
    if m.target_ratio.is_some() {
        m.ratio_orders.get_or_insert([3, 1]);
    }

    let d = &mut cfg.detector;
    if d.rate_scale.is_none() {
        d.peak_counts.get_or_insert(DEFAULT_PEAK_COUNTS);
    }
    if d.accidental_rate.is_none() {
        d.car.get_or_insert(DEFAULT_CAR);
    }
    d.integration_time.get_or_insert(1.0);
    d.repeats.get_or_insert(DEFAULT_REPEATS);

    let num_pairs = cfg.comb.num_pairs;
    let s = &mut cfg.scenario;
    s.theory_points.get_or_insert(DEFAULT_THEORY_POINTS);
    match s.kind {
        ScenarioKind::Qubit | ScenarioKind::DispersionPoint => {
            s.pair.get_or_insert(1);
        }
        ScenarioKind::DispersionScan => {
            if s.k_values.is_none() {
                s.k_values = Some((1..num_pairs).collect());
            }
        }
        ScenarioKind::Correlation => {
            s.tau.get_or_insert(Grid::Range {
                start: -100.0,
                stop: 100.0,
                points: 2001,
            });
        }
        _ => {}
    }
    if s.kind.sweeps_phase() {
        s.phases.get_or_insert(Grid::Range {
            start: 0.0,
            stop: TAU,
            points: DEFAULT_PHASE_POINTS,
        });
    }
    if let Some(fiber) = &mut s.fiber {
        if fiber.dispersion.is_some() {
            fiber.wavelength.get_or_insert(DEFAULT_WAVELENGTH_NM);
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, format!("{v} must be finite and > 0")))
    }
}

fn check_grid(field: &str, grid: &Grid) -> Result<()> {
    let values = grid.values();
    if values.is_empty() {
        return Err(Error::validation(field, "grid is empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation(field, "grid values must be finite"));
    }
    Ok(())
}

fn validate(cfg: &ScenarioConfig) -> Result<()> {
    let comb = &cfg.comb;
    positive("comb.fsr", comb.fsr)?;
    if comb.num_pairs == 0 {
        return Err(Error::validation("comb.num_pairs", "must be >= 1"));
    }
    let linewidth = comb.linewidth.unwrap_or(comb.fsr / 3.0);
    if !(linewidth > 0.0 && linewidth < comb.fsr) {
        return Err(Error::validation("comb.linewidth", "must lie in (0, fsr)"));
    }
    if let Some(amps) = &comb.amplitudes {
        if amps.len() != comb.num_pairs {
            return Err(Error::validation(
                "comb.amplitudes",
                format!("{} entries for {} pairs", amps.len(), comb.num_pairs),
            ));
        }
        if amps.iter().all(|a| a.parts() == (0.0, 0.0)) {
            return Err(Error::validation("comb.amplitudes", "all amplitudes are zero"));
        }
    }

    let m = &cfg.modulator;
    let directives = [m.depth.is_some(), m.target_power.is_some(), m.target_ratio.is_some()];
    if directives.iter().filter(|&&d| d).count() != 1 {
        return Err(Error::validation(
            "modulator",
            "give exactly one of depth, target_power, target_ratio",
        ));
    }
    if m.order.is_some() && m.target_power.is_none() {
        return Err(Error::validation("modulator.order", "only used with target_power"));
    }
    if m.ratio_orders.is_some() && m.target_ratio.is_none() {
        return Err(Error::validation(
            "modulator.ratio_orders",
            "only used with target_ratio",
        ));
    }
    if let Some(f) = &m.mod_frequency {
        positive("modulator.mod_frequency", f.resolve(comb.fsr)?)?;
    }

    let d = &cfg.detector;
    if d.peak_counts.is_some() == d.rate_scale.is_some() {
        return Err(Error::validation(
            "detector",
            "give exactly one of peak_counts, rate_scale",
        ));
    }
    if d.car.is_some() == d.accidental_rate.is_some() {
        return Err(Error::validation("detector", "give exactly one of car, accidental_rate"));
    }
    if let Some(t) = d.integration_time {
        positive("detector.integration_time", t)?;
    }
    if let Some(car) = d.car {
        if !(car > 0.0) {
            return Err(Error::validation("detector.car", "must be > 0"));
        }
    }
    if d.repeats == Some(0) {
        return Err(Error::validation("detector.repeats", "must be >= 1"));
    }

    let s = &cfg.scenario;
    let check_pair = |field: &str, k: usize| -> Result<()> {
        if k == 0 || k > comb.num_pairs {
            return Err(Error::validation(
                field,
                format!("pair {k} outside 1..={}", comb.num_pairs),
            ));
        }
        Ok(())
    };
    match s.kind {
        ScenarioKind::Qubit | ScenarioKind::DispersionPoint => {
            let k = s.pair.unwrap_or(1);
            check_pair("scenario.pair", k)?;
            check_pair("scenario.pair", k + 1)?;
        }
        ScenarioKind::QutritSymmetric | ScenarioKind::QutritAsymmetric => {
            check_pair("comb.num_pairs", 3)?;
        }
        ScenarioKind::DispersionScan => {
            let ks = s.k_values.as_deref().unwrap_or(&[]);
            if ks.len() < 2 {
                return Err(Error::validation(
                    "scenario.k_values",
                    "need at least two pair offsets",
                ));
            }
            for &k in ks {
                check_pair("scenario.k_values", k)?;
                check_pair("scenario.k_values", k + 1)?;
            }
        }
        ScenarioKind::Correlation => {}
    }
    if s.kind.sweeps_phase() {
        if let Some(grid) = &s.phases {
            check_grid("scenario.phases", grid)?;
        }
    }
    if let Some(tau) = &s.tau {
        check_grid("scenario.tau", tau)?;
    }
    if s.theory_points.is_some_and(|n| n < 3) {
        return Err(Error::validation("scenario.theory_points", "must be >= 3"));
    }
    if matches!(s.kind, ScenarioKind::DispersionPoint | ScenarioKind::DispersionScan) {
        let fiber = s
            .fiber
            .as_ref()
            .ok_or_else(|| Error::validation("scenario.fiber", "required for dispersion scenarios"))?;
        if fiber.beta2.is_some() == fiber.dispersion.is_some() {
            return Err(Error::validation(
                "scenario.fiber",
                "give exactly one of beta2, dispersion",
            ));
        }
        if !(fiber.length >= 0.0 && fiber.length.is_finite()) {
            return Err(Error::validation("scenario.fiber.length", "must be >= 0"));
        }
        if let Some(w) = fiber.wavelength {
            positive("scenario.fiber.wavelength", w)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_QUBIT: &str = r#"
[comb]
fsr = 0.036
num_pairs = 2

[modulator]
mod_frequency = "fsr/2"
target_power = 0.32
order = 1

[scenario]
kind = "qubit"
pair = 1
"#;

    #[test]
    fn minimal_qubit_resolves_half_fsr_drive() {
        let cfg = parse_config(MINIMAL_QUBIT).unwrap();
        let f = cfg.modulator.mod_frequency.as_ref().unwrap().resolve(cfg.comb.fsr).unwrap();
        assert!((f - 0.018).abs() < 1e-15);
        assert_eq!(cfg.detector.peak_counts, Some(DEFAULT_PEAK_COUNTS));
        assert_eq!(cfg.detector.car, Some(DEFAULT_CAR));
        assert_eq!(cfg.detector.repeats, Some(3));
        assert_eq!(cfg.detector.seed, None);
        assert_eq!(cfg.comb.amplitudes.as_ref().unwrap().len(), 2);
        assert_eq!(
            cfg.scenario.phases.as_ref().unwrap().values().len(),
            DEFAULT_PHASE_POINTS
        );
    }

    #[test]
    fn canonical_form_is_a_fixed_point() {
        let cfg = parse_config(MINIMAL_QUBIT).unwrap();
        let canonical = to_canonical_string(&cfg);
        let again = parse_config(&canonical).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(to_canonical_string(&again), canonical);
    }

    #[test]
    fn pair_beyond_comb_rejected() {
        let text = MINIMAL_QUBIT.replace("pair = 1", "pair = 4").replace("num_pairs = 2", "num_pairs = 3");
        match parse_config(&text) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "scenario.pair"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_phase_grid_rejected() {
        let text = MINIMAL_QUBIT.replace("pair = 1", "pair = 1\nphases = []");
        match parse_config(&text) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "scenario.phases"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = MINIMAL_QUBIT.replace("num_pairs = 2", "num_pairs = 2\nspacing = 3");
        match parse_config(&text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 5, "{message}");
                assert!(message.contains("spacing"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = "[comb]\nfsr = 0.036\nnum_pairs = = 2\n";
        match parse_config(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exactly_one_depth_directive() {
        let both = MINIMAL_QUBIT.replace("order = 1", "order = 1\ndepth = 1.0");
        assert!(matches!(parse_config(&both), Err(Error::Validation { .. })));
        let none = MINIMAL_QUBIT.replace("target_power = 0.32\norder = 1", "");
        assert!(matches!(parse_config(&none), Err(Error::Validation { .. })));
    }

    #[test]
    fn mod_frequency_forms() {
        assert_eq!(ModFrequency::Thz(0.018).resolve(0.036).unwrap(), 0.018);
        assert!((ModFrequency::Expr("fsr/3".into()).resolve(0.036).unwrap() - 0.012).abs() < 1e-15);
        assert!(ModFrequency::Expr("fsr*2".into()).resolve(0.036).is_err());
        assert!(ModFrequency::Expr("fsr/0".into()).resolve(0.036).is_err());
    }

    #[test]
    fn overrides_apply_before_validation() {
        let cfg = parse_config_with_overrides(
            MINIMAL_QUBIT,
            &["detector.seed=11".into(), "scenario.kind=\"qubit\"".into(), "comb.center_frequency=193.0".into()],
        )
        .unwrap();
        assert_eq!(cfg.detector.seed, Some(11));
        assert_eq!(cfg.comb.center_frequency, Some(193.0));

        let bare = parse_config_with_overrides(MINIMAL_QUBIT, &["scenario.kind=qutrit_symmetric".into()]);
        // bare words become strings; the comb only has two pairs
        assert!(matches!(bare, Err(Error::Validation { .. })));

        assert!(parse_config_with_overrides(MINIMAL_QUBIT, &["seed=3".into()]).is_err());
        assert!(parse_config_with_overrides(MINIMAL_QUBIT, &["detector.bogus=3".into()]).is_err());
    }

    #[test]
    fn dispersion_requires_one_fiber_form() {
        let base = r#"
[comb]
fsr = 0.036
num_pairs = 9
[modulator]
target_power = 0.32
[scenario]
kind = "dispersion_scan"
"#;
        assert!(parse_config(base).is_err());
        let with_d = format!("{base}[scenario.fiber]\ndispersion = 16.2\nlength = 1100.0\n");
        let cfg = parse_config(&with_d).unwrap();
        assert_eq!(cfg.scenario.k_values.as_ref().unwrap(), &(1..9).collect::<Vec<_>>());
        assert_eq!(cfg.scenario.fiber.as_ref().unwrap().wavelength, Some(DEFAULT_WAVELENGTH_NM));
        let both = format!("{base}[scenario.fiber]\ndispersion = 16.2\nbeta2 = -0.02\nlength = 1100.0\n");
        assert!(parse_config(&both).is_err());
    }

    #[test]
    fn complex_amplitudes() {
        let text = MINIMAL_QUBIT.replace("num_pairs = 2", "num_pairs = 2\namplitudes = [1.0, [0.0, 1.0]]");
        let cfg = parse_config(&text).unwrap();
        let amps = cfg.comb.amplitudes.unwrap();
        assert_eq!(amps[0].parts(), (1.0, 0.0));
        assert_eq!(amps[1].parts(), (0.0, 1.0));
    }
}
