//! Exact rational helpers: parsing, printing and bounded-denominator rounding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats as `"p"` or `"p/q"` in lowest terms.
pub fn to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"` or `"p/q"`; decimal points are rejected.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // very large numerator/denominator: scale through the integer quotient
        let q = r.numer().div_floor(r.denom());
        q.to_f64().unwrap_or(f64::NAN)
    })
}

/// Best rational approximation of `x` with denominator at most `max_denom`,
/// via continued-fraction convergents and semiconvergents.
pub fn approximate(x: f64, max_denom: u64) -> Rational {
    assert!(x.is_finite(), "cannot rationalize a non-finite value");
    assert!(max_denom >= 1);
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1): (u128, u128, u128, u128) = (0, 1, 1, 0);
    let max_q = max_denom as u128;
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let a = a as u128;
        let q2 = a * q1 + q0;
        if q2 > max_q {
            // semiconvergent with largest admissible multiplier
            let k = (max_q - q0) / q1.max(1);
            if q1 > 0 && 2 * k >= a {
                let (ps, qs) = (k * p1 + p0, k * q1 + q0);
                let cand = ps as f64 / qs as f64;
                let best = p1 as f64 / q1 as f64;
                if (cand - x.abs()).abs() < (best - x.abs()).abs() {
                    p1 = ps;
                    q1 = qs;
                }
            }
            break;
        }
        let p2 = a * p1 + p0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let fracpart = v - a as f64;
        if fracpart < 1e-15 {
            break;
        }
        v = 1.0 / fracpart;
    }
    if q1 == 0 {
        q1 = 1;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}

/// Exact square root of a non-negative rational when it is a perfect square.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product::<u64>().max(1)
}

/// Number of injective maps from a `k`-set into an `n`-set.
pub fn falling(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    ((n - k + 1)..=n).product::<u64>().max(1)
}

pub fn max_of<'a>(it: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    it.into_iter().fold(None, |acc: Option<Rational>, v| match acc {
        Some(a) if a >= *v => Some(a),
        _ => Some(v.clone()),
    })
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Serde adapter storing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::super::Rational;
        use serde::{Deserialize, Deserializer, Serializer, ser::SerializeSeq};

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&super::super::to_string(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| super::super::parse(s).map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod matrix {
        use super::super::Rational;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
            let rows: Vec<Vec<String>> = m
                .iter()
                .map(|r| r.iter().map(super::super::to_string).collect())
                .collect();
            rows.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
            let rows = Vec::<Vec<String>>::deserialize(d)?;
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|s| super::super::parse(s).map_err(serde::de::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}
