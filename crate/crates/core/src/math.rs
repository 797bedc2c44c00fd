//! Float helpers that work without `std`.

pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}
