//! Exact rational helpers: literal parsing, decimal rendering and directed rounding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {literal:?}: {reason}")]
pub struct ParseRationalError {
    pub literal: String,
    pub reason: &'static str,
}

fn err(literal: &str, reason: &'static str) -> ParseRationalError {
    ParseRationalError {
        literal: literal.to_string(),
        reason,
    }
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parses `p/q`, integers and decimal literals with optional exponent, exactly.
pub fn parse_rational(literal: &str) -> Result<Rational, ParseRationalError> {
    let s = literal.trim();
    if s.is_empty() {
        return Err(err(literal, "empty"));
    }
    if s.len() > 4096 {
        return Err(err(literal, "too long"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_int(p.trim()).ok_or_else(|| err(literal, "bad numerator"))?;
        let q = parse_int(q.trim()).ok_or_else(|| err(literal, "bad denominator"))?;
        if q.is_zero() {
            return Err(err(literal, "zero denominator"));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = parse_int(&s[i + 1..])
                .and_then(|e| e.to_i64())
                .ok_or_else(|| err(literal, "bad exponent"))?;
            if e.abs() > 1000 {
                return Err(err(literal, "exponent out of range"));
            }
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, body) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err(literal, "no digits"));
    }
    if !whole.bytes().chain(frac.bytes()).all(|c| c.is_ascii_digit()) {
        return Err(err(literal, "unexpected character"));
    }
    let digits: BigInt = format!("0{whole}{frac}").parse().expect("digits only");
    let scale = exponent - frac.len() as i64;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(digits);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Canonical `p/q` rendering (`p` alone for integers).
pub fn to_fraction(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering rounded half-up to `sig` significant digits.
pub fn to_decimal(r: &Rational, sig: usize) -> String {
    assert!(sig > 0);
    if r.is_zero() {
        return format!("0.{}", "0".repeat(sig - 1));
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let a = r.abs();
    let ten = BigInt::from(10);
    // Position of the leading digit: 10^e <= a < 10^(e+1).
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            Rational::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while a < pow10(e) {
        e -= 1;
    }
    while a >= pow10(e + 1) {
        e += 1;
    }
    let scaled = &a * pow10(sig as i64 - 1 - e);
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let mut n = q;
    if rem * BigInt::from(2) >= *scaled.denom() {
        n += 1;
    }
    if n.to_string().len() > sig {
        n /= &ten;
        e += 1;
    }
    let digits = n.to_string();
    if (-7..sig as i64).contains(&e) {
        if e < 0 {
            format!("{sign}0.{}{digits}", "0".repeat((-e - 1) as usize))
        } else {
            let split = e as usize + 1;
            if split == digits.len() {
                format!("{sign}{digits}")
            } else {
                format!("{sign}{}.{}", &digits[..split], &digits[split..])
            }
        }
    } else {
        format!("{sign}{}.{}e{e}", &digits[..1], &digits[1..])
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Largest f64-representable rational that is `<= r`.
pub fn round_down_f64(r: &Rational) -> Rational {
    let mut f = to_f64(r);
    let mut q = Rational::from_float(f).expect("finite");
    while &q > r {
        f = f.next_down();
        q = Rational::from_float(f).expect("finite");
    }
    q
}

/// Smallest f64-representable rational that is `>= r`.
pub fn round_up_f64(r: &Rational) -> Rational {
    let mut f = to_f64(r);
    let mut q = Rational::from_float(f).expect("finite");
    while &q < r {
        f = f.next_up();
        q = Rational::from_float(f).expect("finite");
    }
    q
}
