//! Exact rational scalars and conversions.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used for all coordinates and pairings.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `p/q`.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "zero denominator");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Nearest-value conversion to f64. Infinite-precision rationals that
/// overflow f64 saturate; inputs here are always desk scale.
pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// f64 square root of a nonnegative rational, for reported measures only.
pub fn sqrt_f64(x: &Rat) -> f64 {
    let v = to_f64(x);
    debug_assert!(v >= 0.0, "sqrt of negative rational");
    v.sqrt()
}

/// Dyadic rational `n / 2^k`.
pub fn dyadic(n: i64, k: u32) -> Rat {
    Rat::new(BigInt::from(n), BigInt::one() << k)
}

/// Round a rational to the dyadic grid `2^-k`, to nearest (ties up).
pub fn round_dyadic(x: &Rat, k: u32) -> Rat {
    let scale: BigInt = BigInt::one() << k;
    let scaled = x * Rat::from_integer(scale.clone());
    let n = round_to_int(&scaled);
    Rat::new(n, scale)
}

/// Round a rational to the nearest integer (ties away from zero).
pub fn round_to_int(x: &Rat) -> BigInt {
    let two = BigInt::from(2);
    let (num, den) = (x.numer(), x.denom());
    if num.sign() != Sign::Minus {
        (num * 2 + den) / (den * &two)
    } else {
        let neg: BigInt = -num;
        let q: BigInt = (neg * 2 + den) / (den * &two);
        -q
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// by Stern-Brocot descent. Exact for representable values.
pub fn rational_approx(x: f64, max_den: u64) -> Rat {
    assert!(x.is_finite(), "cannot approximate a non-finite value");
    assert!(max_den >= 1);
    let neg = x < 0.0;
    let x = x.abs();
    // Continued-fraction expansion with convergent denominators capped.
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut v = x;
    let cap = BigInt::from(max_den);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > cap {
            // Largest semiconvergent still within the cap.
            let t = (&cap - &q0) / &q1;
            let ps = &t * &p1 + &p0;
            let qs = &t * &q1 + &q0;
            let semi = Rat::new(ps, qs.max(BigInt::one()));
            let conv = Rat::new(p1.clone(), q1.clone().max(BigInt::one()));
            let xr = rational_approx_exact(x);
            let best = if (&semi - &xr).abs() < (&conv - &xr).abs() { semi } else { conv };
            return if neg { -best } else { best };
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = v - a;
        if frac < 1e-18 {
            break;
        }
        v = 1.0 / frac;
    }
    let best = Rat::new(p1, q1.max(BigInt::one()));
    if neg {
        -best
    } else {
        best
    }
}

/// Exact rational value of an f64 (every finite f64 is rational).
pub fn rational_approx_exact(x: f64) -> Rat {
    Rat::from_float(x).expect("finite f64")
}

/// Parse a decimal or fraction literal ("2.01", "-3", "355/113") exactly.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|e| format!("bad numerator: {e}"))?;
        let q: BigInt = q.trim().parse().map_err(|e| format!("bad denominator: {e}"))?;
        if q.is_zero() {
            return Err("zero denominator".into());
        }
        return Ok(Rat::new(p, q));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(b) => (-1i64, b),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("empty number: {s:?}"));
    }
    let int_val: BigInt = if int_part.is_empty() {
        BigInt::zero()
    } else {
        int_part.parse().map_err(|e| format!("bad integer part: {e}"))?
    };
    let mut val = Rat::from_integer(int_val);
    if !frac_part.is_empty() {
        let digits: BigInt = frac_part.parse().map_err(|e| format!("bad fraction part: {e}"))?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        val += Rat::new(digits, den);
    }
    Ok(val * rat_i(sign))
}

/// Render a rational in the `p/q` text form used by the file formats
/// (integers render without the denominator).
pub fn fmt_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_decimal_and_fraction() {
        assert_eq!(parse_rat("2.01").unwrap(), rat(201, 100));
        assert_eq!(parse_rat("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat("355/113").unwrap(), rat(355, 113));
        assert_eq!(parse_rat("7").unwrap(), rat_i(7));
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(round_to_int(&rat(5, 2)), BigInt::from(3));
        assert_eq!(round_to_int(&rat(-5, 2)), BigInt::from(-3));
        assert_eq!(round_to_int(&rat(7, 3)), BigInt::from(2));
        assert_eq!(round_dyadic(&rat(1, 3), 4), rat(5, 16));
    }

    #[test]
    fn approx_hits_small_fractions() {
        assert_eq!(rational_approx(0.5, 100), rat(1, 2));
        assert_eq!(rational_approx(1.0 / 3.0, 100), rat(1, 3));
        let r = rational_approx(std::f64::consts::SQRT_2, 10_000_000);
        let err = (to_f64(&r) - std::f64::consts::SQRT_2).abs();
        assert!(err < 1e-12, "err {err}");
    }

    #[test]
    fn approx_roundtrips_sign() {
        let r = rational_approx(-0.125, 1 << 20);
        assert_eq!(r, rat(-1, 8));
    }
}
