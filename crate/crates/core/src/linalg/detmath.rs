//! Deterministic `ln` and `exp` built from IEEE-754 primitive operations only.
//!
//! The platform `libm` is allowed to differ in the last bits between systems,
//! which would break bit-exact reproducibility of seeded sampling and problem
//! generation. These fixed polynomial evaluations use nothing but `f64`
//! add/mul/divide/sqrt, all of which are correctly rounded by IEEE-754, so the
//! same inputs give the same bits everywhere. Accuracy is ~1e-15 relative,
//! which is ample for random variate generation.

const LN_2: f64 = std::f64::consts::LN_2;
const FRAC_1_LN_2: f64 = 1.0 / LN_2;

/// Natural logarithm of a finite positive `x`.
pub fn det_ln(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite(), "det_ln domain: x = {x}");
    // Normalize subnormals so the exponent extraction below is exact.
    let (x, sub_adjust) = if x < f64::MIN_POSITIVE {
        (x * 2f64.powi(64), -64.0 * LN_2)
    } else {
        (x, 0.0)
    };
    let bits = x.to_bits();
    let mut exp = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mut mantissa = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | 0x3ff0_0000_0000_0000);
    // Center the mantissa on 1 so the series argument stays small.
    if mantissa > std::f64::consts::SQRT_2 {
        mantissa *= 0.5;
        exp += 1;
    }
    // ln(m) = 2 atanh(t) with t = (m-1)/(m+1), |t| <= 0.1716.
    let t = (mantissa - 1.0) / (mantissa + 1.0);
    let t2 = t * t;
    let mut series = 0.0;
    for k in (1..=10).rev() {
        let odd = (2 * k + 1) as f64;
        series = t2 * (1.0 / odd + series);
    }
    let ln_m = 2.0 * t * (1.0 + series);
    exp as f64 * LN_2 + ln_m + sub_adjust
}

/// Exponential of a finite `x`; saturates to 0 / +inf far outside `f64` range.
pub fn det_exp(x: f64) -> f64 {
    assert!(x.is_finite(), "det_exp domain: x = {x}");
    if x > 709.8 {
        return f64::INFINITY;
    }
    if x < -745.2 {
        return 0.0;
    }
    // x = k ln2 + r with |r| <= ln2 / 2. Two-part Cody-Waite reduction keeps
    // r accurate even when k ln2 nearly cancels x.
    const LN_2_HI: f64 = f64::from_bits(0x3fe6_2e42_fee0_0000);
    const LN_2_LO: f64 = f64::from_bits(0x3dea_39ef_3579_3c76);
    let k = (x * FRAC_1_LN_2).round();
    let r = (x - k * LN_2_HI) - k * LN_2_LO;
    // Taylor series of e^r; |r| <= 0.347 so 17 terms reach full precision.
    let mut sum = 1.0;
    for n in (1..=17).rev() {
        sum = 1.0 + sum * r / n as f64;
    }
    // Scale by 2^k through exponent arithmetic (exact).
    let k = k as i32;
    if (-1021..=1023).contains(&k) {
        sum * f64::from_bits(((1023 + k) as u64) << 52)
    } else if k > 1023 {
        sum * 2f64.powi(1023) * 2f64.powi(k - 1023)
    } else {
        sum * 2f64.powi(-1021) * 2f64.powi(k + 1021)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_matches_std() {
        let samples = [
            1e-300, 1e-10, 0.1, 0.5, 0.9, 1.0, 1.5, 2.0, 10.0, 12345.678, 1e150,
        ];
        for &x in &samples {
            let got = det_ln(x);
            let want = x.ln();
            assert!(
                (got - want).abs() <= 1e-14 * want.abs().max(1.0),
                "ln({x}): {got} vs {want}"
            );
        }
    }

    #[test]
    fn exp_matches_std() {
        let samples = [-700.0, -20.0, -1.0, -0.1, 0.0, 0.1, 1.0, 2.5, 20.0, 700.0];
        for &x in &samples {
            let got = det_exp(x);
            let want = x.exp();
            assert!(
                ((got - want) / want).abs() <= 1e-14,
                "exp({x}): {got} vs {want}"
            );
        }
    }

    #[test]
    fn exp_ln_round_trip() {
        let mut x = 1e-8;
        while x < 1e8 {
            let rel = (det_exp(det_ln(x)) - x).abs() / x;
            assert!(rel <= 1e-13, "round trip at {x}: rel {rel}");
            x *= 3.7;
        }
    }
}
