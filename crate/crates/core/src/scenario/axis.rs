//! Axis and count specifications.
//!
//! ```text
//! 1,2,5,10        explicit, strictly increasing
//! 1:100           every integer from 1 to 100
//! 0:1:0.05        start:stop:step, stop included when reached
//! 1:10000:log     50 log-spaced points
//! 10:1e6:log:25   25 log-spaced points
//! ```

use super::FutureTrials;
use crate::error::{config, Result};

pub const DEFAULT_LOG_POINTS: usize = 50;
pub const MAX_AXIS_POINTS: usize = 1_000_000;

/// Largest integer an axis or count may hold; every integer below it is an
/// exact `f64`.
pub const MAX_COUNT: u64 = 1 << 53;

fn number(s: &str) -> Result<f64> {
    let t = s.trim();
    let v: f64 = t.parse().map_err(|_| config(format!("not a number: {t:?}")))?;
    if !v.is_finite() {
        return Err(config(format!("not a finite number: {t:?}")));
    }
    Ok(v)
}

fn check_len(points: usize) -> Result<()> {
    if points > MAX_AXIS_POINTS {
        return Err(config(format!("axis has more than {MAX_AXIS_POINTS} points")));
    }
    Ok(())
}

fn stepped(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(config("axis step must be positive"));
    }
    if stop < start {
        return Err(config("axis stop lies below its start"));
    }
    let span = (stop - start) / step;
    if !(span < MAX_AXIS_POINTS as f64) {
        return Err(config(format!("axis has more than {MAX_AXIS_POINTS} points")));
    }
    let count = (span + 1e-9).floor() as usize + 1;
    let mut values: Vec<f64> = (0..count).map(|i| start + i as f64 * step).collect();
    if let Some(last) = values.last_mut() {
        if (*last - stop).abs() <= 1e-9 * step {
            *last = stop;
        }
    }
    Ok(values)
}

fn log_spaced(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if !(start > 0.0) || !(stop > start) {
        return Err(config("log axis needs 0 < start < stop"));
    }
    if points < 2 {
        return Err(config("log axis needs at least 2 points"));
    }
    check_len(points)?;
    let ratio = (stop / start).ln();
    let mut values: Vec<f64> = (0..points)
        .map(|i| start * (ratio * i as f64 / (points - 1) as f64).exp())
        .collect();
    values[0] = start;
    values[points - 1] = stop;
    Ok(values)
}

fn strictly_increasing(values: &[f64]) -> Result<()> {
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(config("axis values must be strictly increasing"));
    }
    Ok(())
}

/// Parses an axis into strictly increasing finite values.
pub fn parse_axis(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(config("empty axis"));
    }
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [a, b] => stepped(number(a)?, number(b)?, 1.0)?,
            [a, b, "log"] => log_spaced(number(a)?, number(b)?, DEFAULT_LOG_POINTS)?,
            [a, b, "log", k] => {
                let k: usize = k.parse().map_err(|_| config(format!("bad point count {k:?}")))?;
                log_spaced(number(a)?, number(b)?, k)?
            }
            [a, b, step] => stepped(number(a)?, number(b)?, number(step)?)?,
            _ => return Err(config(format!("cannot read axis {spec:?}"))),
        }
    } else {
        let values = spec.split(',').map(number).collect::<Result<Vec<_>>>()?;
        check_len(values.len())?;
        values
    };
    if values.is_empty() {
        return Err(config("empty axis"));
    }
    strictly_increasing(&values)?;
    Ok(values)
}

/// Parses an axis of nonnegative counts. Non-integer points are rounded to
/// the nearest integer and repeats dropped.
pub fn parse_count_axis(spec: &str) -> Result<Vec<u64>> {
    let values = parse_axis(spec)?;
    let mut counts: Vec<u64> = Vec::with_capacity(values.len());
    for v in values {
        let r = v.round();
        if r < 0.0 || r > MAX_COUNT as f64 {
            return Err(config(format!("count {v} out of range")));
        }
        let c = r as u64;
        if counts.last() != Some(&c) {
            counts.push(c);
        }
    }
    Ok(counts)
}

/// A single nonnegative integer; integral scientific forms like `1e6` are
/// accepted.
pub fn parse_count(s: &str) -> Result<u64> {
    let t = s.trim();
    if let Ok(v) = t.parse::<u64>() {
        return if v <= MAX_COUNT {
            Ok(v)
        } else {
            Err(config(format!("count {v} out of range")))
        };
    }
    let v = number(t)?;
    if v < 0.0 || v.fract() != 0.0 || v > MAX_COUNT as f64 {
        return Err(config(format!("not a nonnegative integer: {t:?}")));
    }
    Ok(v as u64)
}

/// A future-trial count or the literal `limit`.
pub fn parse_future(s: &str) -> Result<FutureTrials> {
    if s.trim() == "limit" {
        Ok(FutureTrials::Limit)
    } else {
        parse_count(s).map(FutureTrials::Count)
    }
}

/// True when `s` names more than a single value.
pub fn is_axis(s: &str) -> bool {
    s.contains(':') || s.contains(',')
}
