//! Smooth compactly supported building blocks built from the e^{-1/s} glue.

/// e^{-1/s} for s > 0, zero otherwise.
pub fn glue(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth transition: 0 for s ≤ 0, 1 for s ≥ 1, strictly between on (0, 1).
pub fn step(s: f64) -> f64 {
    let a = glue(s);
    let b = glue(1.0 - s);
    a / (a + b)
}

/// Plateau equal to 1 on |z| ≤ inner, 0 on |z| ≥ outer, strictly between otherwise.
pub fn plateau(z: f64, inner: f64, outer: f64) -> f64 {
    step((outer - z.abs()) / (outer - inner))
}

/// Bump e^{-1/(1-s²)} on (-1, 1), zero outside.
pub fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_levels() {
        assert_eq!(plateau(0.3, 0.5, 1.0), 1.0);
        assert_eq!(plateau(-0.5, 0.5, 1.0), 1.0);
        assert_eq!(plateau(1.0, 0.5, 1.0), 0.0);
        assert_eq!(plateau(-1.7, 0.5, 1.0), 0.0);
        let v = plateau(0.75, 0.5, 1.0);
        assert!(v > 0.0 && v < 1.0);
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bump_support() {
        assert_eq!(bump(1.0), 0.0);
        assert!(bump(0.999) > 0.0);
        assert!((bump(0.0) - (-1.0f64).exp()).abs() < 1e-16);
    }
}
