//! Integer-order Bessel functions of the first kind.
//!
//! Small arguments use the ascending series. Everywhere else the value comes
//! from Miller's backward recurrence
//!
//! ```text
//! J_{k-1}(x) = (2k / x) J_k(x) - J_{k+1}(x)
//! ```
//!
//! started well above both the order and the argument, then normalised with
//! `J_0(x) + 2 Σ_{k≥1} J_{2k}(x) = 1`.

use crate::error::{Error, Result};

/// Largest supported |order|.
pub const MAX_ORDER: u32 = 500;
/// Largest supported argument.
pub const MAX_ARG: f64 = 100.0;

/// Below this argument the ascending series is used.
const SERIES_CROSSOVER: f64 = 1.0;
const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `J_order(x)` for `|order| ≤ 500` and `0 ≤ x ≤ 100`, to ~1e-13 absolute.
pub fn bessel_j(order: i32, x: f64) -> Result<f64> {
    let n = order.unsigned_abs();
    if n > MAX_ORDER {
        return Err(Error::OutOfEnvelope(format!(
            "Bessel order {order} exceeds ±{MAX_ORDER}"
        )));
    }
    if !(0.0..=MAX_ARG).contains(&x) {
        return Err(Error::OutOfEnvelope(format!(
            "Bessel argument {x} outside [0, {MAX_ARG}]"
        )));
    }
    let value = if x == 0.0 {
        if n == 0 {
            1.0
        } else {
            0.0
        }
    } else if x < SERIES_CROSSOVER {
        series(n, x)
    } else {
        miller(n, x)
    };
    // J_{-n} = (-1)^n J_n
    Ok(if order < 0 && n % 2 == 1 { -value } else { value })
}

fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= half / k as f64;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut term = lead;
    let mut sum = lead;
    for m in 1..200u32 {
        term *= q / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn miller(n: u32, x: f64) -> f64 {
    let top = (n as f64).max(x);
    let mut start = (top + 20.0 + (40.0 * top).sqrt()).ceil() as u32;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let mut above = 0.0; // J_{k+1}
    let mut current = 1e-30; // J_k, arbitrary scale
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        if k == n {
            wanted = current;
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
            wanted *= RESCALE_BY;
        }
    }
    // `current` now holds J_0.
    if n == 0 {
        wanted = current;
    }
    norm += current;
    wanted / norm
}
