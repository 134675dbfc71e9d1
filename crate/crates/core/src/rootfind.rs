//! Root finding for monotone scalar maps (bisection with bracket expansion).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo)-target = {f_lo:e}, f(hi)-target = {f_hi:e}")]
    BracketFailure { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("bracket expansion exceeded {limit} doublings starting from [{lo}, {hi}]")]
    ExpansionFailure { lo: f64, hi: f64, limit: usize },
    #[error("function returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
}

fn checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, RootError> {
    let y = f(x);
    if y.is_finite() { Ok(y) } else { Err(RootError::NonFinite { x }) }
}

/// Solves f(x) = target for increasing `f` on [lo, hi].
///
/// Runs plain bisection to f64 exhaustion (the bracket midpoint stops moving),
/// which is ~60 iterations and needs no derivative or tolerance tuning.
pub fn bisect_increasing<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    target: f64,
) -> Result<f64, RootError> {
    let f_lo = checked(&f, lo)? - target;
    let f_hi = checked(&f, hi)? - target;
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(RootError::BracketFailure { lo, hi, f_lo, f_hi });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }

    let (mut lo, mut hi) = (lo, hi);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid.clamp(lo, hi));
        }
        let fm = checked(&f, mid)? - target;
        if fm < 0.0 {
            lo = mid;
        } else if fm > 0.0 {
            hi = mid;
        } else {
            return Ok(mid);
        }
    }
}

/// Like [`bisect_increasing`] but stops once the bracket width drops below
/// `xtol`; use where the downstream consumer has a coarser tolerance than
/// f64 exhaustion and `f` is expensive.
pub fn bisect_increasing_tol<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    target: f64,
    xtol: f64,
) -> Result<f64, RootError> {
    assert!(xtol > 0.0, "xtol must be positive");
    let f_lo = checked(&f, lo)? - target;
    let f_hi = checked(&f, hi)? - target;
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(RootError::BracketFailure { lo, hi, f_lo, f_hi });
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if checked(&f, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Doubles `hi` until f(hi) >= target (f increasing), then bisects.
pub fn bisect_increasing_expand<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    mut hi: f64,
    target: f64,
) -> Result<f64, RootError> {
    const LIMIT: usize = 200;
    let start_hi = hi;
    for _ in 0..LIMIT {
        if checked(&f, hi)? >= target {
            return bisect_increasing(f, lo, hi, target);
        }
        hi *= 2.0;
    }
    Err(RootError::ExpansionFailure { lo, hi: start_hi, limit: LIMIT })
}
