//! Reference computations kept apart from the library's code paths.

/// Twisted length from a downward scan of `g(X) = X^2 - L_c^2 + theta^2 r0^2 L_c / X`
/// over `(eps, L_c]` followed by plain bisection on the first sign change.
///
/// `g(L_c) > 0`; the physical root is the first crossing below `L_c`.
pub fn twisted_length(l_c: f64, r0: f64, theta: f64) -> Option<f64> {
    if theta == 0.0 {
        return Some(l_c);
    }
    let g = |x: f64| x * x - l_c * l_c + theta * theta * r0 * r0 * l_c / x;
    let steps = 20_000;
    let eps = l_c * 1e-6;
    let mut hi = l_c;
    let mut lo = None;
    for i in 1..=steps {
        let x = l_c - (l_c - eps) * i as f64 / steps as f64;
        if g(x) <= 0.0 {
            lo = Some(x);
            break;
        }
        hi = x;
    }
    let mut lo = lo?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `L_c - X + r_w phi` evaluated with the oracle length.
pub fn total_contraction(l_c: f64, r0: f64, theta: f64, r_w: f64, phi: f64) -> Option<f64> {
    twisted_length(l_c, r0, theta).map(|x| l_c - x + r_w * phi)
}

/// Central difference of `f` at `x` with step `h`.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
