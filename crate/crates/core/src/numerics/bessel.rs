//! Bessel functions of the first kind, integer order.
//!
//! Values come from Miller's downward recurrence
//! `J_{k-1}(x) = (2k/x) J_k(x) - J_{k+1}(x)`, started well above both the
//! requested order and `x`, and normalised with `J_0 + 2 Σ J_{2k} = 1`.
//! Negative orders follow from `J_{-n} = (-1)^n J_n`.

use crate::error::{Error, Result};

/// Largest order accepted by [`bessel_j`].
pub const MAX_ORDER: u32 = 200;
/// Largest argument accepted by [`bessel_j`].
pub const MAX_ARGUMENT: f64 = 50.0;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `(-1)^n` as a float.
#[inline]
pub fn parity_sign(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Default sideband cutoff for a modulation depth: `ceil(delta) + 20`.
pub fn default_cutoff(delta: f64) -> u32 {
    delta.max(0.0).ceil() as u32 + 20
}

/// `J_0(x) ..= J_max_order(x)` for `x >= 0`.
pub(crate) fn bessel_sequence(max_order: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }

    let top = (max_order as f64).max(x);
    let mut start = (top + 30.0 + (40.0 * top).sqrt()).ceil() as usize;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let mut above = 0.0_f64;
    let mut current = 1.0_f64;
    let mut norm = 0.0_f64;
    // values for orders start..=0 are produced in descending order
    for k in (1..=start).rev() {
        if k <= max_order {
            out[k] = current;
        }
        if k % 2 == 0 {
            norm += 2.0 * current;
        }
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            norm *= RESCALE_BY;
            for v in out.iter_mut().skip(k) {
                *v *= RESCALE_BY;
            }
        }
    }
    out[0] = current;
    norm += current;

    for v in &mut out {
        *v /= norm;
    }
    out
}

fn check_domain(n: i64, x: f64) -> Result<()> {
    if n.unsigned_abs() > MAX_ORDER as u64 {
        return Err(Error::domain(
            "Bessel order",
            format!("|{n}| > {MAX_ORDER}"),
        ));
    }
    if !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(Error::domain(
            "Bessel argument",
            format!("{x} not in [0, {MAX_ARGUMENT}]"),
        ));
    }
    Ok(())
}

/// `J_n(x)` for `|n| <= 200` and `0 <= x <= 50`.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    check_domain(n as i64, x)?;
    let m = n.unsigned_abs() as usize;
    let value = bessel_sequence(m, x)[m];
    Ok(if n < 0 { parity_sign(n as i64) * value } else { value })
}

/// All coefficients `J_n(delta)` for `|n| <= n_max`, computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselTable {
    delta: f64,
    n_max: u32,
    // orders 0..=n_max
    values: Vec<f64>,
}

impl BesselTable {
    pub fn new(delta: f64, n_max: u32) -> Result<Self> {
        check_domain(n_max as i64, delta)?;
        Ok(Self {
            delta,
            n_max,
            values: bessel_sequence(n_max as usize, delta),
        })
    }

    /// Table with the default cutoff `ceil(delta) + 20`.
    pub fn with_default_cutoff(delta: f64) -> Result<Self> {
        Self::new(delta, default_cutoff(delta).min(MAX_ORDER))
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// `J_n(delta)`, or `None` outside `[-n_max, n_max]`.
    pub fn get(&self, n: i64) -> Option<f64> {
        let m = n.unsigned_abs();
        if m > self.n_max as u64 {
            return None;
        }
        let v = self.values[m as usize];
        Some(if n < 0 { parity_sign(n) * v } else { v })
    }

    /// `Σ_{|n| <= n_max} J_n(delta)^2`, which approaches one from below.
    pub fn power_sum(&self) -> f64 {
        let tail: f64 = self.values[1..].iter().map(|v| v * v).sum();
        self.values[0] * self.values[0] + 2.0 * tail
    }
}
