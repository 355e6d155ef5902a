// Float functions that `core` does not provide.
pub(crate) use libm::{acos, asin, atan2, cos, exp, floor, log, log10, log2, pow, sin, sqrt};

pub(crate) const LN_2: f64 = core::f64::consts::LN_2;

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    log(x)
}

/// Round half away from zero for non-negative inputs.
#[inline]
pub(crate) fn round_half_up(x: f64) -> f64 {
    floor(x + 0.5)
}
