//! Unbounded naturals with an inline fast path for values that fit a word.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A natural number. Small values stay inline; larger ones are shared
/// behind an `Arc` so clones stay cheap.
#[derive(Clone)]
pub enum Nat {
    Small(u64),
    Big(Arc<BigUint>),
}

impl Nat {
    pub const ZERO: Nat = Nat::Small(0);

    pub fn is_zero(&self) -> bool {
        matches!(self, Nat::Small(0))
    }

    pub fn succ(&self) -> Nat {
        match self {
            Nat::Small(v) => match v.checked_add(1) {
                Some(w) => Nat::Small(w),
                None => Nat::Big(Arc::new(BigUint::from(*v) + 1u32)),
            },
            Nat::Big(b) => Nat::Big(Arc::new(b.as_ref() + 1u32)),
        }
    }

    /// `self ∸ 1`.
    pub fn pred(&self) -> Nat {
        match self {
            Nat::Small(v) => Nat::Small(v.saturating_sub(1)),
            Nat::Big(b) => Nat::from(b.as_ref() - 1u32),
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self {
            Nat::Small(v) => Some(*v),
            Nat::Big(_) => None,
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match self {
            Nat::Small(v) => BigUint::from(*v),
            Nat::Big(b) => b.as_ref().clone(),
        }
    }
}

impl Default for Nat {
    fn default() -> Self {
        Nat::ZERO
    }
}

impl From<u64> for Nat {
    fn from(v: u64) -> Self {
        Nat::Small(v)
    }
}

impl From<u32> for Nat {
    fn from(v: u32) -> Self {
        Nat::Small(v as u64)
    }
}

impl From<usize> for Nat {
    fn from(v: usize) -> Self {
        Nat::Small(v as u64)
    }
}

impl From<BigUint> for Nat {
    fn from(b: BigUint) -> Self {
        match b.to_u64() {
            Some(v) => Nat::Small(v),
            None => Nat::Big(Arc::new(b)),
        }
    }
}

impl PartialEq for Nat {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Nat::Small(a), Nat::Small(b)) => a == b,
            (Nat::Big(a), Nat::Big(b)) => a == b,
            // the representation is canonical: Big never holds a word-sized value
            _ => false,
        }
    }
}

impl Eq for Nat {}

impl Hash for Nat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Nat::Small(v) => {
                0u8.hash(state);
                v.hash(state)
            }
            Nat::Big(b) => {
                1u8.hash(state);
                b.hash(state)
            }
        }
    }
}

impl Ord for Nat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Nat::Small(a), Nat::Small(b)) => a.cmp(b),
            (Nat::Small(_), Nat::Big(_)) => Ordering::Less,
            (Nat::Big(_), Nat::Small(_)) => Ordering::Greater,
            (Nat::Big(a), Nat::Big(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Nat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nat::Small(v) => write!(f, "{v}"),
            Nat::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a decimal natural number: {0:?}")]
pub struct ParseNatError(pub String);

impl FromStr for Nat {
    type Err = ParseNatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseNatError(s.to_string()));
        }
        match s.parse::<u64>() {
            Ok(v) => Ok(Nat::Small(v)),
            Err(_) => BigUint::from_str(s).map(Nat::from).map_err(|_| ParseNatError(s.to_string())),
        }
    }
}

// JSON: word-sized values as numbers, larger ones as decimal strings.
impl Serialize for Nat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Nat::Small(v) => serializer.serialize_u64(*v),
            Nat::Big(b) => serializer.serialize_str(&b.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Nat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Str(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Ok(Nat::Small(v)),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl Zero for Nat {
    fn zero() -> Self {
        Nat::ZERO
    }

    fn is_zero(&self) -> bool {
        Nat::is_zero(self)
    }
}

impl std::ops::Add for Nat {
    type Output = Nat;

    fn add(self, rhs: Nat) -> Nat {
        if let (Nat::Small(a), Nat::Small(b)) = (&self, &rhs) {
            if let Some(c) = a.checked_add(*b) {
                return Nat::Small(c);
            }
        }
        Nat::from(self.to_biguint() + rhs.to_biguint())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn succ_crosses_word_boundary() {
        let n = Nat::from(u64::MAX);
        let m = n.succ();
        assert!(matches!(m, Nat::Big(_)));
        assert_eq!(m.to_string(), "18446744073709551616");
        assert_eq!(m.pred(), n);
        assert!(m > n);
    }

    #[test]
    fn parse_and_compare() {
        let big: Nat = "123456789012345678901234567890".parse().unwrap();
        assert!(big > Nat::from(7u64));
        assert_eq!("42".parse::<Nat>().unwrap(), Nat::from(42u64));
        assert!("-1".parse::<Nat>().is_err());
        assert!("".parse::<Nat>().is_err());
    }

    #[test]
    fn json_forms() {
        let small = serde_json::to_string(&Nat::from(5u64)).unwrap();
        assert_eq!(small, "5");
        let big: Nat = "99999999999999999999999".parse().unwrap();
        let s = serde_json::to_string(&big).unwrap();
        assert_eq!(s, "\"99999999999999999999999\"");
        let back: Nat = serde_json::from_str(&s).unwrap();
        assert_eq!(back, big);
    }

    #[test]
    fn pred_of_zero_is_zero() {
        assert_eq!(Nat::ZERO.pred(), Nat::ZERO);
    }
}
