//! Exact comparisons between a stored value and a scaled value.
//!
//! Kannan-type checks compare `lhs <= factor * base`. With zero slack the
//! rounding of `factor * base` alone can flip the verdict, so the comparison
//! here is made against the exact real product using the fused multiply-add
//! residual. All arguments are assumed non-negative and finite.

/// Returns true iff `lhs <= factor * base` holds for the exact real product.
pub fn le_product(lhs: f64, factor: f64, base: f64) -> bool {
    let prod = factor * base;
    if !prod.is_finite() {
        return lhs <= prod;
    }
    // factor * base == prod + err exactly (no underflow for our magnitudes).
    let err = factor.mul_add(base, -prod);
    if lhs <= 0.5 * prod {
        return true;
    }
    if lhs >= 2.0 * prod {
        return lhs == 0.0 && err >= 0.0;
    }
    // Sterbenz: lhs and prod are within a factor of two, so the difference is exact.
    lhs - prod <= err
}

/// `lhs <= factor * base + slack`, exact when slack is zero and monotone in slack.
pub fn le_scaled(lhs: f64, factor: f64, base: f64, slack: f64) -> bool {
    le_product(lhs, factor, base) || (slack > 0.0 && lhs <= factor * base + slack)
}

/// Smallest double `r` with `num <= r * den` exactly; `den` must be positive.
pub fn ceil_ratio(num: f64, den: f64) -> f64 {
    let r = num / den;
    if le_product(num, r, den) {
        r
    } else {
        r.next_up()
    }
}

/// `|a - b| <= slack`.
pub fn approx_eq(a: f64, b: f64, slack: f64) -> bool {
    (a - b).abs() <= slack
}
