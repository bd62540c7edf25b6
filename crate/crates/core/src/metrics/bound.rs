use crate::error::{Error, Result};

/// LUF upper bound `e^ε − 1 + δ` for an `(ε, δ)`-differentially private rule.
pub fn dp_luf_bound(epsilon: f64, delta: f64) -> Result<f64> {
    if !(epsilon > 0.0) || epsilon.is_nan() {
        return Err(Error::Argument(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Argument(format!("delta must lie in [0, 1], got {delta}")));
    }
    Ok(epsilon.exp_m1() + delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert!(dp_luf_bound(1e-300, 0.0).unwrap() < 1e-299);
        assert!((dp_luf_bound(0.1, 0.01).unwrap() - 0.115_170_918_075_647_6).abs() < 1e-15);
        assert!((dp_luf_bound(1.0, 0.0).unwrap() - 1.718_281_828_459_045).abs() < 1e-15);
    }

    #[test]
    fn out_of_range() {
        assert!(dp_luf_bound(0.0, 0.0).is_err());
        assert!(dp_luf_bound(-1.0, 0.0).is_err());
        assert!(dp_luf_bound(1.0, 1.5).is_err());
        assert!(dp_luf_bound(f64::NAN, 0.0).is_err());
    }
}
