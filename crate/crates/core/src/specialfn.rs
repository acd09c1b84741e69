//! Bessel functions of the first kind `J_m(x)` and their derivatives for
//! integer order `0 <= m <= 50` and real `0 <= x <= 1000`.
//!
//! Small arguments (`(x/2)^2 <= m + 1`) use the power series, whose terms
//! then decrease monotonically so there is no cancellation. Everything else
//! uses Miller's backward recurrence normalized by the Neumann sum
//! `J_0 + 2 sum_k J_2k = 1`.

use crate::error::{Error, Result};

pub const MAX_ORDER: u32 = 50;
pub const MAX_ARGUMENT: f64 = 1.0e3;

/// `J_m(x)` and `J'_m(x)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: u32,
    pub argument: f64,
    pub value: f64,
    pub derivative: f64,
}

fn check(m: u32, x: f64) -> Result<()> {
    if m > MAX_ORDER {
        return Err(Error::Range {
            what: "order m",
            value: m as f64,
        });
    }
    if !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(Error::Range {
            what: "argument x",
            value: x,
        });
    }
    Ok(())
}

/// `J_m(x)`.
pub fn bessel_j(m: u32, x: f64) -> Result<f64> {
    check(m, x)?;
    Ok(j_unchecked(m, x))
}

/// `J'_m(x)`, from `(J_{m-1} - J_{m+1}) / 2` or `-J_1` for `m = 0`.
pub fn bessel_j_prime(m: u32, x: f64) -> Result<f64> {
    Ok(bessel_eval(m, x)?.derivative)
}

/// Value and derivative from a single recurrence sweep.
pub fn bessel_eval(m: u32, x: f64) -> Result<BesselEval> {
    check(m, x)?;
    let (value, derivative) = if x == 0.0 {
        let value = if m == 0 { 1.0 } else { 0.0 };
        let derivative = if m == 1 { 0.5 } else { 0.0 };
        (value, derivative)
    } else if m == 0 {
        (j_unchecked(0, x), -j_unchecked(1, x))
    } else {
        let [jm1, jm, jp1] = orders_triple(m - 1, x);
        (jm, 0.5 * (jm1 - jp1))
    };
    Ok(BesselEval {
        order: m,
        argument: x,
        value,
        derivative,
    })
}

fn j_unchecked(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if use_series(m, x) {
        series(m, x)
    } else {
        let mut out = [0.0];
        miller(m, x, &mut out);
        out[0]
    }
}

fn use_series(m: u32, x: f64) -> bool {
    let q = 0.25 * x * x;
    q <= (m + 1) as f64
}

fn orders_triple(m: u32, x: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    if use_series(m, x) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = series(m + i as u32, x);
        }
    } else {
        miller(m, x, &mut out);
    }
    out
}

/// `sum_k (-1)^k (x/2)^(2k+m) / (k! (k+m)!)`.
fn series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    // (x/2)^m / m!
    let mut term = 1.0;
    for i in 1..=m {
        term *= half / i as f64;
    }
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= -q / (k as f64 * (k + m) as f64);
        sum += term;
        if libm::fabs(term) <= 1e-17 * libm::fabs(sum) || k > 500 {
            break;
        }
    }
    sum
}

/// Backward recurrence writing `J_first .. J_{first+out.len()-1}` into `out`.
fn miller(first: u32, x: f64, out: &mut [f64]) {
    const RESCALE: f64 = 1.0e250;
    let last = first as usize + out.len() - 1;
    let top = libm::fmax(last as f64, x);
    // Start well past the turning point so J_start is negligible.
    let mut start = libm::ceil(top + 30.0 + libm::sqrt(60.0 * top)) as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let two_over_x = 2.0 / x;
    let mut j_above = 0.0; // J_{k+1}
    let mut j_here = 1.0e-300; // J_k
    let mut neumann = 0.0;
    for k in (0..=start).rev() {
        if k % 2 == 0 {
            neumann += if k == 0 { j_here } else { 2.0 * j_here };
        }
        if k >= first as usize && k <= last {
            out[k - first as usize] = j_here;
        }
        if k == 0 {
            break;
        }
        let j_below = k as f64 * two_over_x * j_here - j_above;
        j_above = j_here;
        j_here = j_below;
        if libm::fabs(j_here) > RESCALE {
            j_here /= RESCALE;
            j_above /= RESCALE;
            neumann /= RESCALE;
            for (idx, o) in out.iter_mut().enumerate() {
                if first as usize + idx >= k {
                    *o /= RESCALE;
                }
            }
        }
    }
    for o in out.iter_mut() {
        *o /= neumann;
    }
}
