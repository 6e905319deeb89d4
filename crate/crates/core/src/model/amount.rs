use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A natural number or the distinguished unbounded value.
///
/// Ordering places every finite value below [`Amount::INF`]. Adding a finite
/// delta to `INF` leaves it at `INF`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Amount(u64);

impl Amount {
    pub const INF: Amount = Amount(u64::MAX);
    pub const ZERO: Amount = Amount(0);

    /// Largest finite value an amount can hold.
    pub const MAX_FINITE: u64 = u64::MAX - 1;

    pub fn finite(v: u64) -> Amount {
        assert!(v <= Self::MAX_FINITE, "finite amount out of range");
        Amount(v)
    }

    pub fn is_finite(self) -> bool {
        self.0 != u64::MAX
    }

    pub fn get(self) -> Option<u64> {
        self.is_finite().then_some(self.0)
    }

    /// Raw encoding; `u64::MAX` stands for `INF`.
    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn from_raw(raw: u64) -> Amount {
        Amount(raw)
    }

    /// `self + delta` when the result stays within `[0, bound]`.
    pub fn offset_within(self, delta: i64, bound: Amount) -> Option<Amount> {
        if !self.is_finite() {
            return Some(self);
        }
        let v = self.0 as i128 + delta as i128;
        if v < 0 {
            return None;
        }
        if bound.is_finite() && v > bound.0 as i128 {
            return None;
        }
        if v > Self::MAX_FINITE as i128 {
            return None;
        }
        Some(Amount(v as u64))
    }
}

impl From<u64> for Amount {
    fn from(v: u64) -> Self {
        Amount::finite(v)
    }
}

impl fmt::Debug for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("inf"),
        }
    }
}

impl FromStr for Amount {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Amount::INF);
        }
        match s.parse::<u64>() {
            Ok(v) if v <= Amount::MAX_FINITE => Ok(Amount(v)),
            _ => Err(format!("expected a natural number or \"inf\", found {s:?}")),
        }
    }
}

impl Serialize for Amount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.get() {
            Some(v) => serializer.serialize_u64(v),
            None => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Amount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct AmountVisitor;

        impl Visitor<'_> for AmountVisitor {
            type Value = Amount;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a natural number or \"inf\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Amount, E> {
                if v > Amount::MAX_FINITE {
                    return Err(E::custom("amount out of range"));
                }
                Ok(Amount(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Amount, E> {
                if v < 0 {
                    return Err(E::custom(format!("negative amount {v}")));
                }
                Ok(Amount(v as u64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Amount, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(AmountVisitor)
    }
}

macro_rules! amount_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub Vec<Amount>);

        impl $name {
            pub fn finite(values: &[u64]) -> Self {
                $name(values.iter().map(|&v| Amount::finite(v)).collect())
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn entries(&self) -> &[Amount] {
                &self.0
            }

            /// Componentwise `self <= other`.
            pub fn le(&self, other: &Self) -> bool {
                self.0.len() == other.0.len()
                    && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
            }
        }

        impl std::ops::Index<usize> for $name {
            type Output = Amount;

            fn index(&self, i: usize) -> &Amount {
                &self.0[i]
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(self, f)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("<")?;
                for (i, a) in self.0.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(">")
            }
        }
    };
}

amount_vector!(
    /// Global availability of every resource on the market.
    Availability
);
amount_vector!(
    /// Money endowment, one entry per agent.
    MoneyVector
);

/// Per-resource quantity change of an action: negative consumes, positive produces.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResourceDelta(pub Vec<i64>);

impl ResourceDelta {
    pub fn zero(r: usize) -> Self {
        ResourceDelta(vec![0; r])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// Consumed part: productions zeroed, consumptions made positive.
    pub fn consumption(&self) -> Vec<u64> {
        self.0.iter().map(|&d| if d < 0 { d.unsigned_abs() } else { 0 }).collect()
    }

    pub fn add_assign(&mut self, other: &ResourceDelta) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a = a.saturating_add(*b);
        }
    }
}

impl fmt::Debug for ResourceDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Applies `delta` to `avail`, defined only when the result lies in `[0, bound]`.
pub fn offset_availability(avail: &[Amount], delta: &[i64], bound: &[Amount]) -> Option<Vec<Amount>> {
    avail
        .iter()
        .zip(delta)
        .zip(bound)
        .map(|((a, &d), &b)| a.offset_within(d, b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inf_absorbs_deltas() {
        assert_eq!(Amount::INF.offset_within(-5, Amount::INF), Some(Amount::INF));
        assert_eq!(Amount::finite(3).offset_within(-4, Amount::finite(3)), None);
        assert_eq!(Amount::finite(3).offset_within(1, Amount::finite(3)), None);
        assert_eq!(Amount::finite(3).offset_within(7, Amount::INF), Some(Amount::finite(10)));
    }

    #[test]
    fn serde_accepts_inf_string() {
        let v: Availability = serde_json::from_str(r#"[1, "inf", 0]"#).unwrap();
        assert_eq!(v.0, vec![Amount::finite(1), Amount::INF, Amount::ZERO]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[1,"inf",0]"#);
        assert!(serde_json::from_str::<Availability>("[-1]").is_err());
    }

    #[test]
    fn consumption_splits_signs() {
        assert_eq!(ResourceDelta(vec![-1]).consumption(), vec![1]);
        assert_eq!(ResourceDelta(vec![0]).consumption(), vec![0]);
        assert_eq!(ResourceDelta(vec![-2, 3, 0]).consumption(), vec![2, 0, 0]);
    }
}
