//! Phase unwrapping.

use std::f64::consts::{PI, TAU};

/// Maps `phase` into `(-period/2, period/2]`.
pub fn wrap_phase(phase: f64, period: f64) -> f64 {
    let half = 0.5 * period;
    let mut w = phase.rem_euclid(period);
    if w > half {
        w -= period;
    }
    w
}

/// Round to nearest, with exact halves going toward zero.
fn round_half_toward_zero(x: f64) -> f64 {
    let r = x.round();
    if (r - x).abs() == 0.5 {
        x.trunc()
    } else {
        r
    }
}

/// Removes jumps of whole periods between consecutive samples.
///
/// The first sample is kept as is. Each later sample is shifted by the
/// multiple of `period` that brings its step from the previous output below
/// `period/2` in magnitude; a step of exactly half a period is left alone.
pub fn unwrap_phase(samples: &[f64], period: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let Some(&first) = samples.first() else {
        return out;
    };
    out.push(first);
    let mut prev_out = first;
    for pair in samples.windows(2) {
        let step = pair[1] - pair[0];
        let jumps = round_half_toward_zero(step / period);
        prev_out += step - jumps * period;
        out.push(prev_out);
    }
    out
}

/// Phase in `[0, π]` with the same cosine as `phase`.
pub fn fold_phase(phase: f64) -> f64 {
    wrap_phase(phase, TAU).abs()
}

/// Values `v` with `fold_phase(v) == folded` inside `[lo, hi]`.
fn fold_candidates(folded: f64, lo: f64, hi: f64) -> Vec<f64> {
    let first = ((lo - PI) / TAU).floor() as i64;
    let last = ((hi + PI) / TAU).ceil() as i64;
    let mut out = Vec::new();
    for m in first..=last {
        let base = m as f64 * TAU;
        for v in [base - folded, base + folded] {
            if v >= lo && v <= hi && out.iter().all(|&o: &f64| (o - v).abs() > 1e-12) {
                out.push(v);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn line_through(x: &[f64], y: &[f64], at: f64) -> f64 {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - xm).powi(2)).sum();
    if sxx == 0.0 {
        return ym;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    ym + sxy / sxx * (at - xm)
}

fn line_residual(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| (b - line_through(x, y, a)).powi(2))
        .sum()
}

/// Recovers a monotone, roughly linear phase sequence from values known only
/// through their cosine, i.e. folded into `[0, π]`.
///
/// Samples must be ordered by `x`. The sequence is taken to rise
/// (`direction > 0`) or fall (`direction < 0`) by less than π per step; the
/// direction cannot be read from cosines and has to be supplied. Each branch
/// for the first two samples is extended by picking, for every later sample,
/// the candidate nearest the running straight-line prediction. Among
/// branches running in `direction`, the smallest straight-line residual wins. The result is fixed only up
/// to a common multiple of 2π.
pub fn unfold_folded_phases(x: &[f64], folded: &[f64], direction: f64) -> Vec<f64> {
    assert_eq!(x.len(), folded.len(), "x and folded phases differ in length");
    let sign = if direction < 0.0 { -1.0 } else { 1.0 };
    let n = folded.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![sign * folded[0]];
    }

    let slack = 0.25;
    let mut best: Option<(bool, f64, Vec<f64>)> = None;
    for start in fold_candidates(folded[0], 0.0, TAU - 1e-15) {
        for second in fold_candidates(folded[1], start - slack, start + PI) {
            let mut seq = vec![start, second];
            for i in 2..n {
                let predicted = line_through(&x[..i], &seq, x[i]);
                let prev = seq[i - 1];
                let next = fold_candidates(folded[i], prev - PI, prev + TAU)
                    .into_iter()
                    .min_by(|a, b| (a - predicted).abs().total_cmp(&(b - predicted).abs()))
                    .expect("a window wider than 2π always holds a candidate");
                seq.push(next);
            }
            let residual = line_residual(x, &seq);
            // reflected branches fit equally well but run the wrong way
            let backwards = line_through(x, &seq, x[n - 1]) < line_through(x, &seq, x[0]);
            let better = match &best {
                None => true,
                Some((was_backwards, r, _)) => {
                    (*was_backwards && !backwards)
                        || (*was_backwards == backwards && residual < *r - 1e-12)
                }
            };
            if better {
                best = Some((backwards, residual, seq));
            }
        }
    }
    let (_, _, seq) = best.expect("at least one starting branch");
    seq.into_iter().map(|v| sign * v).collect()
}
