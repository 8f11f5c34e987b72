use std::f64::consts::E;

use crate::error::{domain, Result};
use crate::roots::bisect;

const INV_E: f64 = 1.0 / E;

/// Lower real branch of the Lambert W function restricted to `[-1/e, 0)`:
/// the unique `w <= -1` with `w e^w = z`.
///
/// Series start near the branch point, asymptotic start near zero, then
/// Halley iteration; bisection on `[-800, -1]` backs it up if Halley stalls.
pub fn lambert_w_restricted(z: f64) -> Result<f64> {
    if !(-INV_E..0.0).contains(&z) {
        return Err(domain(format!("restricted Lambert W needs z in [-1/e, 0) (got {z})")));
    }
    if z == -INV_E {
        return Ok(-1.0);
    }
    let mut w = if z < -0.25 {
        let p = -(2.0 * (1.0 + E * z)).max(0.0).sqrt();
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))))
    } else {
        let l1 = (-z).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    w = w.min(-1.0);
    for _ in 0..60 {
        let ew = w.exp();
        let f = w * ew - z;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-8 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = (w - step).min(-1.0);
        if (next - w).abs() <= 4.0 * f64::EPSILON * w.abs() {
            w = next;
            break;
        }
        w = next;
    }
    if (w * w.exp() - z).abs() > 1e-14 {
        // w e^w is decreasing on (-inf, -1]
        if let Ok(r) = bisect(|t| t * t.exp() - z, -800.0, -1.0, 0.0) {
            w = r.x;
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_point() {
        assert_eq!(lambert_w_restricted(-INV_E).unwrap(), -1.0);
    }

    #[test]
    fn defining_identity() {
        let w = lambert_w_restricted(-2.0 * (-2.0f64).exp()).unwrap();
        assert!((w + 2.0).abs() < 1e-12);
    }

    #[test]
    fn reference_value() {
        // bisection on w e^w = -0.1 over [-50, -1] at 40 digits
        let w = lambert_w_restricted(-0.1).unwrap();
        assert!((w - -3.577_152_063_957_297).abs() < 1e-12);
    }

    #[test]
    fn residual_on_fine_grid() {
        let n = 10_000;
        for i in 0..n {
            let z = -INV_E + INV_E * i as f64 / n as f64;
            let w = lambert_w_restricted(z).unwrap();
            assert!(w <= -1.0);
            assert!((w * w.exp() - z).abs() <= 1e-12, "z = {z}, w = {w}");
        }
        for z in [-1e-300, -1e-100, -1e-20, -1e-5, -INV_E + 1e-15, -INV_E + 1e-10] {
            let w = lambert_w_restricted(z).unwrap();
            assert!((w * w.exp() - z).abs() <= 1e-12, "z = {z}");
        }
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(lambert_w_restricted(0.0).is_err());
        assert!(lambert_w_restricted(-0.4).is_err());
        assert!(lambert_w_restricted(f64::NAN).is_err());
    }
}
