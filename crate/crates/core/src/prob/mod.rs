//! Exact finite-probability algebra: dense joint distributions, conditional
//! factors, and Shannon information functionals in bits.

mod factor;
mod joint;

pub use factor::{compose, compose_with_cap, Factor};
pub use joint::{JointPMF, VariableSpec};

/// Compensated (Neumaier) summation. Used wherever a probability mass total
/// is validated against a tight tolerance.
pub(crate) fn neumaier_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Shannon entropy in bits of a nonnegative mass vector; 0 log 0 := 0.
pub(crate) fn entropy_of(mass: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in mass {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Advances a mixed-radix counter; `digits[i]` runs over `0..cards[i]` with
/// the last digit fastest. Returns false once the counter wraps to zero.
pub(crate) fn odometer_step(digits: &mut [usize], cards: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < cards[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}
