//! Inverting sideband strengths for the modulation depth that produces them.

use super::bessel::{bessel_sequence, bessel_j};
use crate::error::{Error, Result};

/// Upper edge of the search window used by [`solve_depth_for_ratio`].
pub const RATIO_WINDOW: f64 = 20.0;

const SCAN_STEP: f64 = 1e-3;
const BISECT_WIDTH: f64 = 1e-14;

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if hi - lo <= BISECT_WIDTH {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Location of the first maximum of `J_order` for `order >= 1`.
pub fn first_maximum(order: u32) -> f64 {
    // J_n' = (J_{n-1} - J_{n+1}) / 2
    let slope = |x: f64| {
        let j = bessel_sequence(order as usize + 1, x);
        j[order as usize - 1] - j[order as usize + 1]
    };
    let step = 0.01;
    let mut lo = step;
    loop {
        let hi = lo + step;
        if slope(hi) <= 0.0 {
            return bisect(lo, hi, slope);
        }
        lo = hi;
    }
}

/// Smallest depth `δ` with `J_order(δ)^2 = target`, searched on the rising
/// branch `(0, first maximum]`.
pub fn solve_depth_for_power(target: f64, order: i32) -> Result<f64> {
    if order == 0 {
        return Err(Error::InvalidArgument(
            "order 0 has no rising branch from zero depth".into(),
        ));
    }
    if !target.is_finite() || target < 0.0 {
        return Err(Error::domain("target power", format!("{target} is not >= 0")));
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    let m = order.unsigned_abs();
    let peak_at = first_maximum(m);
    let peak = bessel_j(m as i32, peak_at)?.powi(2);
    if target > peak {
        return Err(Error::UnreachableTarget {
            target,
            max: peak,
            order,
        });
    }
    let residual = |x: f64| {
        let j = bessel_sequence(m as usize, x)[m as usize];
        j * j - target
    };
    Ok(bisect(0.0, peak_at, residual))
}

/// Smallest depth `δ` in `(0, 20]` with `|J_order_a(δ)| / |J_order_b(δ)| = ratio`.
pub fn solve_depth_for_ratio(ratio: f64, order_a: i32, order_b: i32) -> Result<f64> {
    if order_a.unsigned_abs() == order_b.unsigned_abs() {
        return Err(Error::InvalidArgument(format!(
            "orders {order_a} and {order_b} have identical magnitudes"
        )));
    }
    if !ratio.is_finite() || ratio <= 0.0 {
        return Err(Error::domain("amplitude ratio", format!("{ratio} is not > 0")));
    }
    let a = order_a.unsigned_abs() as usize;
    let b = order_b.unsigned_abs() as usize;
    let top = a.max(b);
    // |J_a| - ratio |J_b| avoids dividing by zeros of J_b
    let residual = |x: f64| {
        let j = bessel_sequence(top, x);
        j[a].abs() - ratio * j[b].abs()
    };

    let steps = (RATIO_WINDOW / SCAN_STEP).round() as usize;
    let mut lo = SCAN_STEP;
    let mut f_lo = residual(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    for i in 2..=steps {
        let hi = i as f64 * SCAN_STEP;
        let f_hi = residual(hi);
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if (f_hi > 0.0) != (f_lo > 0.0) {
            return Ok(bisect(lo, hi, residual));
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::NoSolution {
        ratio,
        order_a,
        order_b,
        window: RATIO_WINDOW,
    })
}
