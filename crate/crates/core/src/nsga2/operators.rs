//! Variation operators on real-valued genes.

/// Simulated binary crossover for one gene pair, given the uniform draw `u`.
/// `u = 0.5` yields a spread factor of 1, i.e. children equal to parents.
pub fn sbx_pair(p1: f64, p2: f64, u: f64, eta: f64) -> (f64, f64) {
    let beta = if u <= 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
    };
    let c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2);
    let c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2);
    (c1, c2)
}

/// Polynomial mutation of `x` within `[low, high]`, given the draw `u`.
pub fn polynomial_mutation(x: f64, low: f64, high: f64, u: f64, eta: f64) -> f64 {
    let delta = if u < 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0)) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(1.0 / (eta + 1.0))
    };
    (x + delta * (high - low)).clamp(low, high)
}
