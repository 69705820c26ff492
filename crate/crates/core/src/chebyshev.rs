//! Chebyshev polynomials of the first and second kind.
//!
//! Both kinds obey `P_{n+1}(t) = 2t P_n(t) - P_{n-1}(t)`; they differ only in
//! `P_1` (`t` for `T`, `2t` for `U`). For `|t| >= 1` the closed forms
//!
//! ```text
//! T_n(t) = ((t - s)^n + (t + s)^n) / 2
//! U_n(t) = ((t + s)^(n+1) - (t - s)^(n+1)) / (2 s),     s = sqrt(t^2 - 1)
//! ```
//!
//! grow like `(t + s)^n`, so [`cheb_explicit`] switches to a log-magnitude
//! representation once the value would leave the float range.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChebKind {
    /// `T_n`
    FirstKind,
    /// `U_n`
    SecondKind,
}

/// Value of a Chebyshev polynomial, either held directly or as
/// `sign * exp(ln_abs)` when it would overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChebValue<T> {
    Direct(T),
    Log { ln_abs: T, negative: bool },
}

impl<T: Real> ChebValue<T> {
    /// Natural log of the absolute value.
    pub fn ln_abs(&self) -> T {
        match *self {
            ChebValue::Direct(v) => v.abs().ln(),
            ChebValue::Log { ln_abs, .. } => ln_abs,
        }
    }

    pub fn is_negative(&self) -> bool {
        match *self {
            ChebValue::Direct(v) => v < T::zero(),
            ChebValue::Log { negative, .. } => negative,
        }
    }

    /// The plain value; infinite when the log form exceeds the float range.
    pub fn value(&self) -> T {
        match *self {
            ChebValue::Direct(v) => v,
            ChebValue::Log { ln_abs, negative } => {
                let m = ln_abs.exp();
                if negative {
                    -m
                } else {
                    m
                }
            }
        }
    }
}

/// Three-term recurrence, O(n), no recursion.
pub fn cheb_recurrence<T: Real>(kind: ChebKind, n: usize, t: T) -> T {
    let two_t = t + t;
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = match kind {
        ChebKind::FirstKind => t,
        ChebKind::SecondKind => two_t,
    };
    for _ in 1..n {
        let next = two_t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// All values `P_0(t) ..= P_n(t)` from the recurrence.
pub fn cheb_sequence<T: Real>(kind: ChebKind, n: usize, t: T) -> Vec<T> {
    let two_t = t + t;
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::one());
    if n >= 1 {
        out.push(match kind {
            ChebKind::FirstKind => t,
            ChebKind::SecondKind => two_t,
        });
    }
    for k in 2..=n {
        let next = two_t * out[k - 1] - out[k - 2];
        out.push(next);
    }
    out
}

/// Closed-form evaluation for `|t| >= 1`.
///
/// At `|t| = 1` the second-kind formula is 0/0, so that point falls back to
/// the recurrence (which gives `U_n(1) = n + 1`).
pub fn cheb_explicit<T: Real>(kind: ChebKind, n: usize, t: T) -> Result<ChebValue<T>> {
    if !(t.abs() >= T::one()) {
        return Err(Error::DomainError(t.to_f64_lossy()));
    }
    // P_n(-t) = (-1)^n P_n(t) for both kinds
    let flip = t < T::zero() && n % 2 == 1;
    let t = t.abs();
    if t == T::one() {
        let v = cheb_recurrence(kind, n, t);
        return Ok(ChebValue::Direct(if flip { -v } else { v }));
    }
    let s = (t * t - T::one()).sqrt();
    let big = t + s;
    // t - s = 1 / (t + s); use the reciprocal to avoid cancellation
    let small = big.recip();
    let a = big.ln();
    let half = T::of(0.5);
    let exponent = match kind {
        ChebKind::FirstKind => n,
        ChebKind::SecondKind => n + 1,
    };
    let growth = T::of_usize(exponent) * a;
    let limit = T::max_value().ln() - T::of(2.0);

    let value = if growth < limit {
        let e = exponent as i32;
        let v = match kind {
            ChebKind::FirstKind => half * (big.powi(e) + small.powi(e)),
            ChebKind::SecondKind => (big.powi(e) - small.powi(e)) / (s + s),
        };
        ChebValue::Direct(v)
    } else {
        // ln T_n = n a + ln((1 + e^{-2na}) / 2);  ln U_n = (n+1) a + ln(1 - e^{-2(n+1)a}) - ln(2s)
        let decay = (-(growth + growth)).exp();
        let ln_abs = match kind {
            ChebKind::FirstKind => growth + (half * (T::one() + decay)).ln(),
            ChebKind::SecondKind => growth + (T::one() - decay).ln() - (s + s).ln(),
        };
        ChebValue::Log { ln_abs, negative: false }
    };
    Ok(match value {
        ChebValue::Direct(v) if flip => ChebValue::Direct(-v),
        ChebValue::Log { ln_abs, .. } if flip => ChebValue::Log { ln_abs, negative: true },
        v => v,
    })
}

/// `n ln(t + sqrt(t^2 - 1)) - ln 2`, a lower bound for `ln T_n(t)` when `t > 1`.
pub fn cheb_log_lower_bound_t<T: Real>(n: usize, t: T) -> Result<T> {
    if !(t > T::one()) {
        return Err(Error::DomainError(t.to_f64_lossy()));
    }
    let s = (t * t - T::one()).sqrt();
    Ok(T::of_usize(n) * (t + s).ln() - T::LN_2())
}
