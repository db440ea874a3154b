//! Exact rational helpers and the `"p/q"` string encoding used on every
//! serialized surface.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

#[inline]
pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

#[inline]
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Formats as `p/q`, always with an explicit denominator.
pub fn to_pq(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q`, `p`, or a finite decimal such as `0.25`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("cannot parse rational from {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
        }
        return Ok(frac(p, q));
    }
    if let Some((whole, decimals)) = s.split_once('.') {
        if decimals.is_empty() || decimals.len() > 12 || !decimals.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_abs: i64 = whole.trim_start_matches(['-', '+']).parse().or_else(|e| {
            if whole.trim_start_matches(['-', '+']).is_empty() { Ok(0) } else { Err(e) }
        }).map_err(|_| bad())?;
        let scale = 10i64.pow(decimals.len() as u32);
        let dec: i64 = decimals.parse().map_err(|_| bad())?;
        let mag = frac(whole_abs * scale + dec, scale);
        return Ok(if negative { -mag } else { mag });
    }
    s.parse::<i64>().map(int).map_err(|_| bad())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering with a fixed number of places (table output).
pub fn to_decimal(r: &Rational, places: usize) -> String {
    format!("{:.*}", places, to_f64(r))
}

pub fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}

/// Least common multiple of the denominators; `1` for an empty or all-integer set.
pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> i64 {
    values
        .into_iter()
        .fold(1i64, |acc, r| acc.lcm(r.denom()))
}

pub fn min_of(values: impl IntoIterator<Item = Rational>) -> Rational {
    values.into_iter().min().unwrap_or_else(Rational::zero)
}

/// serde adapter for a single rational as `"p/q"`.
pub mod pq {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&to_pq(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse(&raw).map_err(serde::de::Error::custom)
    }
}

/// serde adapter for `Option<Rational>`.
pub mod pq_opt {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&to_pq(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let raw = Option::<String>::deserialize(d)?;
        raw.map(|r| parse(&r).map_err(serde::de::Error::custom)).transpose()
    }
}

/// serde adapter for `Vec<Rational>` and fixed arrays of rationals.
pub mod pq_seq {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer, const N: usize>(
        v: &[Rational; N],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(N))?;
        for r in v {
            seq.serialize_element(&to_pq(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(
        d: D,
    ) -> std::result::Result<[Rational; N], D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        if raw.len() != N {
            return Err(serde::de::Error::custom(format!("expected {N} rationals, got {}", raw.len())));
        }
        let mut out = [Rational::zero(); N];
        for (slot, r) in out.iter_mut().zip(&raw) {
            *slot = parse(r).map_err(serde::de::Error::custom)?;
        }
        Ok(out)
    }
}

pub mod pq_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&to_pq(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|r| parse(r).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod pq_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.iter().map(|row| row.iter().map(to_pq).collect()).collect();
        serde::Serialize::serialize(&rows, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
        Vec::<Vec<String>>::deserialize(d)?
            .iter()
            .map(|row| row.iter().map(|r| parse(r).map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("16/3").unwrap(), frac(16, 3));
        assert_eq!(parse("4").unwrap(), int(4));
        assert_eq!(parse(" 2/4 ").unwrap(), frac(1, 2));
        assert_eq!(parse("1.5").unwrap(), frac(3, 2));
        assert_eq!(parse("-0.25").unwrap(), frac(-1, 4));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("1.").is_err());
    }

    #[test]
    fn pq_always_has_denominator() {
        assert_eq!(to_pq(&int(4)), "4/1");
        assert_eq!(to_pq(&frac(16, 3)), "16/3");
        assert_eq!(to_decimal(&frac(16, 3), 4), "5.3333");
    }

    #[test]
    fn lcm_of_thirds() {
        let v = [frac(1, 3), int(2), frac(5, 3)];
        assert_eq!(lcm_denominators(&v), 3);
        assert_eq!(lcm_denominators(&[int(1)]), 1);
    }
}
