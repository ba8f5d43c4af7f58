//! Entire functions of a squared frequency that appear in every closed form
//! of the quench dynamics.
//!
//! All of them are written in terms of `k2` (a squared frequency, possibly
//! negative) and a time `t`. For `k2 > 0` they are trigonometric, for
//! `k2 < 0` they continue analytically to hyperbolic functions, and close to
//! `k2 = 0` the removable singularities are handled with power series.

/// Below this value of `|k2| * t^2` the series branch is used.
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// Number of series terms. Far more than needed below [`SERIES_THRESHOLD`],
/// which keeps the forced-series branch usable for continuity checks.
const SERIES_TERMS: usize = 12;

/// Which representation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// Closed form away from `k2 = 0`, series close to it.
    #[default]
    Auto,
    /// Always use the trigonometric / hyperbolic closed form.
    Closed,
    /// Always use the power series in `k2`.
    Series,
}

impl Branch {
    fn use_series(self, k2: f64, t: f64) -> bool {
        match self {
            Branch::Auto => k2 == 0.0 || k2.abs() * t * t < SERIES_THRESHOLD,
            Branch::Closed => k2 == 0.0,
            Branch::Series => true,
        }
    }
}

/// `sum_{k >= k0} weight(k) (-k2)^(k - k0) t^(2k + offset) / (2k + offset)!`
fn series(k2: f64, t: f64, offset: u32, k0: usize, weight: impl Fn(usize) -> f64) -> f64 {
    let first = 2 * k0 as u32 + offset;
    let mut term = t.powi(first as i32) / (1..=first).map(f64::from).product::<f64>();
    let mut total = 0.0;
    for k in k0..k0 + SERIES_TERMS {
        total += weight(k) * term;
        let n = (2 * k) as f64 + offset as f64;
        term *= -k2 * t * t / ((n + 1.0) * (n + 2.0));
    }
    total
}

/// `cos(sqrt(k2) t)`, continued to `cosh(sqrt(-k2) t)`.
pub fn cos_c(k2: f64, t: f64, branch: Branch) -> f64 {
    if branch.use_series(k2, t) {
        return series(k2, t, 0, 0, |_| 1.0);
    }
    if k2 > 0.0 {
        (k2.sqrt() * t).cos()
    } else {
        ((-k2).sqrt() * t).cosh()
    }
}

/// `sin(sqrt(k2) t) / sqrt(k2)`, continued to `sinh(sqrt(-k2) t) / sqrt(-k2)`.
pub fn sinc_c(k2: f64, t: f64, branch: Branch) -> f64 {
    if branch.use_series(k2, t) {
        return series(k2, t, 1, 0, |_| 1.0);
    }
    if k2 > 0.0 {
        let s = k2.sqrt();
        (s * t).sin() / s
    } else {
        let s = (-k2).sqrt();
        (s * t).sinh() / s
    }
}

/// `d/dk2 sinc_c(k2, t) = (t cos_c - sinc_c) / (2 k2)`.
pub fn sinc_c_dk2(k2: f64, t: f64, branch: Branch) -> f64 {
    if branch.use_series(k2, t) {
        return -series(k2, t, 1, 1, |k| k as f64);
    }
    (t * cos_c(k2, t, Branch::Closed) - sinc_c(k2, t, Branch::Closed)) / (2.0 * k2)
}

/// `d/dk2 cos_c(k2, t) = -t sinc_c / 2`.
pub fn cos_c_dk2(k2: f64, t: f64, branch: Branch) -> f64 {
    -0.5 * t * sinc_c(k2, t, branch)
}

/// `(cos(sqrt(k2) t) - 1) / k2`, the coefficient of the first commutator in
/// a local generator. Tends to `-t^2/2` at `k2 = 0`.
pub fn cos_minus_one_over(k2: f64, t: f64, branch: Branch) -> f64 {
    if branch.use_series(k2, t) {
        return -series(k2, t, 0, 1, |_| 1.0);
    }
    (cos_c(k2, t, Branch::Closed) - 1.0) / k2
}

/// `(sin(sqrt(k2) t) - sqrt(k2) t) / (sqrt(k2) k2)`, the coefficient of the
/// second commutator in a local generator. Tends to `-t^3/6` at `k2 = 0`.
pub fn sin_minus_arg_over(k2: f64, t: f64, branch: Branch) -> f64 {
    if branch.use_series(k2, t) {
        return -series(k2, t, 1, 1, |_| 1.0);
    }
    (sinc_c(k2, t, Branch::Closed) - t) / k2
}
