//! Yaw angle arithmetic in degrees.
//!
//! Stored yaw lives in [0, 360). Differences used in filter innovations are
//! mapped to [-180, 180) so that 359 deg and 1 deg are 2 deg apart, not 358.

use crate::error::{Error, Result};

/// Wraps an angle in degrees into [0, 360).
pub fn wrap_angle(theta_raw: f64) -> Result<f64> {
    if !theta_raw.is_finite() {
        return Err(Error::NonFinite("angle"));
    }
    let wrapped = theta_raw.rem_euclid(360.0);
    // rem_euclid can return exactly 360.0 when the input is a tiny negative
    // number, due to rounding; fold that back to 0.
    Ok(if wrapped >= 360.0 { 0.0 } else { wrapped })
}

/// Maps an angle difference in degrees into [-180, 180).
pub fn wrap_signed(delta: f64) -> f64 {
    let w = (delta + 180.0).rem_euclid(360.0) - 180.0;
    if w >= 180.0 {
        -180.0
    } else {
        w
    }
}

pub const DEG_TO_RAD: f64 = std::f64::consts::PI / 180.0;
pub const RAD_TO_DEG: f64 = 180.0 / std::f64::consts::PI;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wraps_boundary_to_zero() {
        assert_eq!(wrap_angle(360.0).unwrap(), 0.0);
        assert_eq!(wrap_angle(0.0).unwrap(), 0.0);
    }

    #[test]
    fn wraps_negative() {
        assert_eq!(wrap_angle(-90.0).unwrap(), 270.0);
    }

    #[test]
    fn wraps_multiple_turns() {
        assert!((wrap_angle(725.0).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_nan() {
        assert!(wrap_angle(f64::NAN).is_err());
        assert!(wrap_angle(f64::INFINITY).is_err());
    }

    #[test]
    fn signed_wrap_examples() {
        assert_eq!(wrap_signed(359.0 - 1.0), -2.0);
        assert_eq!(wrap_signed(1.0 - 359.0), 2.0);
        assert_eq!(wrap_signed(180.0), -180.0);
        assert_eq!(wrap_signed(-180.0), -180.0);
    }

    proptest! {
        #[test]
        fn wrapped_angle_in_range_and_congruent(theta in -1e6f64..1e6) {
            let w = wrap_angle(theta).unwrap();
            prop_assert!((0.0..360.0).contains(&w));
            let k = (theta - w) / 360.0;
            prop_assert!((k - k.round()).abs() < 1e-6);
        }

        #[test]
        fn signed_wrap_in_range(delta in -1e6f64..1e6) {
            let w = wrap_signed(delta);
            prop_assert!((-180.0..180.0).contains(&w));
        }
    }
}
