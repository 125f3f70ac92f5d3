//! Exact arithmetic helpers shared by every module.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Exact rational used for times, tensions and weights.
pub type Rational = num_rational::Ratio<i128>;

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n as i128)
}

/// Floor of a rational as an integer.
pub fn floor_int(q: &Rational) -> i128 {
    q.floor().to_integer()
}

pub fn ceil_int(q: &Rational) -> i128 {
    q.ceil().to_integer()
}

/// Reduces `value` into `[0, modulus)`.
pub fn mod_floor(value: &Rational, modulus: i64) -> Rational {
    let m = rat(modulus);
    let k = (value / m).floor();
    value - k * m
}

/// The unique representative of `value` modulo `modulus` in `[low, low + modulus)`.
pub fn representative_from(value: &Rational, modulus: i64, low: i64) -> Rational {
    mod_floor(&(value - rat(low)), modulus) + rat(low)
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a, I>(values: I) -> i128
where
    I: IntoIterator<Item = &'a Rational>,
{
    values
        .into_iter()
        .fold(1i128, |acc, q| acc.lcm(q.denom()))
}

/// Error returned when a number cannot be read exactly.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number `{0}`")]
pub struct ParseNumberError(pub String);

/// Parses `7`, `-7/2` or a terminating decimal such as `7.25` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseNumberError> {
    let s = text.trim();
    let err = || ParseNumberError(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = i128::from_str(n.trim()).map_err(|_| err())?;
        let d = i128::from_str(d.trim()).map_err(|_| err())?;
        if d == 0 {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
            || frac.len() > 30
        {
            return Err(err());
        }
        let whole = if int_digits.is_empty() {
            0
        } else {
            i128::from_str(int_digits).map_err(|_| err())?
        };
        let scale = 10i128.checked_pow(frac.len() as u32).ok_or_else(err)?;
        let part = if frac.is_empty() {
            0
        } else {
            i128::from_str(frac).map_err(|_| err())?
        };
        let magnitude = Rational::new(whole * scale + part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    i128::from_str(s).map(Rational::from_integer).map_err(|_| err())
}

pub fn parse_int(text: &str) -> Result<i64, ParseNumberError> {
    i64::from_str(text.trim()).map_err(|_| ParseNumberError(text.to_string()))
}

/// Displays a rational as `n` or `n/d`; round-trips through [`parse_rational`].
pub struct Exact<'a>(pub &'a Rational);

impl fmt::Display for Exact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

pub fn exact(q: &Rational) -> String {
    Exact(q).to_string()
}

/// Terminating decimal rendering if one exists (denominator of the form 2^a 5^b).
pub fn terminating_decimal(q: &Rational) -> Option<String> {
    if q.is_integer() {
        return Some(q.numer().to_string());
    }
    let mut d = *q.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return None;
    }
    let digits = twos.max(fives);
    let scale = 10i128.checked_pow(digits)?;
    let scaled = q * Rational::from_integer(scale);
    debug_assert!(scaled.is_integer());
    let n = scaled.to_integer();
    let sign = if n < 0 { "-" } else { "" };
    let n = n.abs();
    let int = n / scale;
    let frac = n % scale;
    Some(format!("{sign}{int}.{frac:0width$}", width = digits as usize))
}

/// Serde adapter storing rationals as exact strings.
pub mod serde_exact {
    use super::{exact, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&exact(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for maps whose values are rationals.
pub mod serde_exact_map {
    use std::collections::BTreeMap;

    use super::{exact, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<K, S>(map: &BTreeMap<K, Rational>, s: S) -> Result<S::Ok, S::Error>
    where
        K: Serialize + Ord,
        S: Serializer,
    {
        let text: BTreeMap<&K, String> = map.iter().map(|(k, v)| (k, exact(v))).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, K, D>(d: D) -> Result<BTreeMap<K, Rational>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        D: Deserializer<'de>,
    {
        let text = BTreeMap::<K, String>::deserialize(d)?;
        text.into_iter()
            .map(|(k, v)| Ok((k, parse_rational(&v).map_err(serde::de::Error::custom)?)))
            .collect()
    }
}

pub(crate) fn is_nonnegative(q: &Rational) -> bool {
    !q.is_negative()
}

pub(crate) fn zero() -> Rational {
    Rational::zero()
}
