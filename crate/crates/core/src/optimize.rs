//! Scalar minimisation.

/// Result of [`golden_section`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    /// Final bracket width.
    pub width: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping once the
/// bracket is narrower than `tol` or after `max_iter` shrink steps.
///
/// Only one new evaluation is made per step. For a unimodal `f` the returned
/// point is within `tol/2` of the minimiser. The best point seen (including
/// the endpoints) is returned, so a monotone `f` yields the boundary.
pub fn golden_section(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> Minimum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;

    while b - a > tol && iterations < max_iter {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        iterations += 1;
    }

    let (mut x, mut value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let mid = 0.5 * (a + b);
    let f_mid = f(mid);
    if f_mid <= value {
        x = mid;
        value = f_mid;
    }
    for end in [lo, hi] {
        let fe = f(end);
        if fe < value {
            x = end;
            value = fe;
        }
    }
    Minimum { x, value, iterations, width: b - a }
}
