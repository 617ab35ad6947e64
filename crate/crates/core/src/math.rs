//! Float intrinsics routed through `libm` so the crate builds without `std`.

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// `|t|^e` with the convention `0^e = 0` for `e > 0`.
#[inline]
pub fn abs_pow(t: f64, e: f64) -> f64 {
    let a = abs(t);
    if a == 0.0 {
        if e == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        powf(a, e)
    }
}
