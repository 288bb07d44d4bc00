//! Arithmetic on the extended half-line [0, ∞], shared by the Lawvere quantale
//! and the real-valued semantics.
//!
//! All values are `f64` in [0, ∞]. NaN never enters: constructors clamp and
//! the operations below preserve the invariant.

pub const INF: f64 = f64::INFINITY;

/// Clamps into [0, ∞]; -0.0 normalizes to 0.0 so comparisons stay exact.
pub fn clamp(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x
    }
}

/// Saturating addition: ∞ + x = ∞.
pub fn add(a: f64, b: f64) -> f64 {
    if a == INF || b == INF {
        INF
    } else {
        a + b
    }
}

/// Residual a ⊸ b = ⋀{δ | b + δ ≥ a}. Closed form: truncated subtraction,
/// with ∞ ⊸ ∞ = 0 and x ⊸ ∞ = 0.
pub fn resid(a: f64, b: f64) -> f64 {
    if b == INF {
        0.0
    } else if a == INF {
        INF
    } else {
        clamp(a - b)
    }
}

/// Heyting arrow a ⇐ b = ⋀{δ | b ∨ δ ≥ a}: 0 when a ≤ b, else a.
pub fn arrow(a: f64, b: f64) -> f64 {
    if a <= b {
        0.0
    } else {
        a
    }
}

/// |a - b| with ∞ conventions: |∞ - ∞| = 0.
pub fn abs_diff(a: f64, b: f64) -> f64 {
    if a == INF && b == INF {
        0.0
    } else if a == INF || b == INF {
        INF
    } else {
        (a - b).abs()
    }
}

/// Approximate equality with slack `tol`; ∞ matches only ∞.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    abs_diff(a, b) <= tol
}

/// a ≤ b + tol, tolerant on the finite side only.
pub fn leq_tol(a: f64, b: f64, tol: f64) -> bool {
    if b == INF {
        true
    } else if a == INF {
        false
    } else {
        a <= b + tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_closed_form_matches_brute_force() {
        // oracle: scan a δ-grid for the least δ with b + δ ≥ a
        let grid: Vec<f64> = (0..=80).map(|i| i as f64 * 0.125).collect();
        for &a in &[0.0, 0.5, 3.0, 5.0, 10.0] {
            for &b in &[0.0, 0.25, 3.0, 5.0] {
                let oracle = grid
                    .iter()
                    .copied()
                    .find(|&d| add(b, d) >= a)
                    .expect("grid covers");
                assert_eq!(resid(a, b), oracle, "resid({a},{b})");
            }
        }
        assert_eq!(resid(5.0, 3.0), 2.0);
        assert_eq!(resid(3.0, 5.0), 0.0);
        assert_eq!(resid(INF, INF), 0.0);
        assert_eq!(resid(INF, 3.0), INF);
        assert_eq!(resid(3.0, INF), 0.0);
    }

    #[test]
    fn arrow_closed_form() {
        assert_eq!(arrow(3.0, 5.0), 0.0);
        assert_eq!(arrow(5.0, 3.0), 5.0);
        assert_eq!(arrow(5.0, 5.0), 0.0);
        assert_eq!(arrow(INF, 3.0), INF);
        assert_eq!(arrow(3.0, INF), 0.0);
    }

    #[test]
    fn adjunction_of_residual_sampled() {
        // δ ≥ a ⊸ b  iff  b + δ ≥ a
        let pts = [0.0, 0.5, 1.0, 2.5, 7.0, INF];
        for &a in &pts {
            for &b in &pts {
                for &d in &pts {
                    assert_eq!(d >= resid(a, b), add(b, d) >= a, "a={a} b={b} d={d}");
                }
            }
        }
    }
}
