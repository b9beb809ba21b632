//! Positional arithmetic in a mixed base.
//!
//! A base is a sequence of radices `β_0, β_1, …`, each at least 2, stored as a
//! finite prefix followed by a constant tail. The place value of digit `L` is
//! `β_0 · β_1 ⋯ β_{L-1}`. All arithmetic is checked: anything that would leave
//! the range of the scalar type returns [`Error::Overflow`].

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{PrimInt, Unsigned};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unsigned machine integers usable as heap sizes and digits.
pub trait Natural:
    PrimInt + Unsigned + Hash + fmt::Debug + fmt::Display + FromStr + Send + Sync + 'static
{
}

impl<T> Natural for T where
    T: PrimInt + Unsigned + Hash + fmt::Debug + fmt::Display + FromStr + Send + Sync + 'static
{
}

fn as_u64<T: Natural>(v: T) -> u64 {
    v.to_u64().unwrap_or(u64::MAX)
}

/// A base sequence `(β_L)` given by a finite prefix and a constant tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "T: Natural + Serialize + serde::de::DeserializeOwned")]
pub struct MixedBase<T> {
    prefix: Vec<T>,
    tail: T,
}

impl<T: Natural> MixedBase<T> {
    pub fn new(prefix: Vec<T>, tail: T) -> Result<Self> {
        let two = T::one() + T::one();
        if let Some(&bad) = prefix.iter().chain(std::iter::once(&tail)).find(|&&r| r < two) {
            return Err(Error::InvalidRadix(as_u64(bad)));
        }
        Ok(Self { prefix, tail })
    }

    /// The constant base `(b, b, …)`.
    pub fn constant(radix: T) -> Result<Self> {
        Self::new(Vec::new(), radix)
    }

    pub fn prefix(&self) -> &[T] {
        &self.prefix
    }

    pub fn tail(&self) -> T {
        self.tail
    }

    pub fn radix_at(&self, level: usize) -> T {
        self.prefix.get(level).copied().unwrap_or(self.tail)
    }

    /// `β^(L)`, the product of the first `L` radices.
    pub fn place_value(&self, level: usize) -> Result<T> {
        (0..level).try_fold(T::one(), |acc, l| {
            acc.checked_mul(&self.radix_at(l)).ok_or(Error::Overflow)
        })
    }

    /// Largest radix in the whole sequence. Exact because the tail repeats.
    pub fn max_radix(&self) -> T {
        self.prefix.iter().copied().fold(self.tail, T::max)
    }

    /// The chopped base `(β_1, β_2, …)`.
    pub fn chop(&self) -> Self {
        Self {
            prefix: self.prefix.iter().skip(1).copied().collect(),
            tail: self.tail,
        }
    }

    /// Base chopped `k` times.
    pub fn chop_by(&self, k: usize) -> Self {
        Self {
            prefix: self.prefix.iter().skip(k).copied().collect(),
            tail: self.tail,
        }
    }

    /// True when every radix at index `>= from` equals `radix`.
    pub fn is_constant_from(&self, from: usize, radix: T) -> bool {
        self.tail == radix && self.prefix.iter().skip(from).all(|&r| r == radix)
    }

    /// Digit `L` of `n`.
    pub fn digit(&self, n: T, level: usize) -> T {
        let mut rest = n;
        for l in 0..level {
            if rest.is_zero() {
                return T::zero();
            }
            rest = rest / self.radix_at(l);
        }
        rest % self.radix_at(level)
    }

    /// `n_{≥1}`: the number read in the chopped base after dropping digit 0.
    pub fn chop_num(&self, n: T) -> T {
        n / self.radix_at(0)
    }

    pub fn to_digits(&self, n: T) -> Digits<T> {
        let mut digits = Vec::new();
        let mut rest = n;
        let mut level = 0;
        while !rest.is_zero() {
            let r = self.radix_at(level);
            digits.push(rest % r);
            rest = rest / r;
            level += 1;
        }
        Digits(digits)
    }

    pub fn from_digits(&self, digits: &Digits<T>) -> Result<T> {
        self.from_digit_slice(&digits.0)
    }

    pub fn from_digit_slice(&self, digits: &[T]) -> Result<T> {
        for (index, &d) in digits.iter().enumerate() {
            let radix = self.radix_at(index);
            if d >= radix {
                return Err(Error::InvalidDigit {
                    index,
                    digit: as_u64(d),
                    radix: as_u64(radix),
                });
            }
        }
        let top = match digits.iter().rposition(|d| !d.is_zero()) {
            Some(top) => top,
            None => return Ok(T::zero()),
        };
        // Horner from the top digit keeps intermediate values below the result.
        (0..=top).rev().try_fold(T::zero(), |acc, l| {
            acc.checked_mul(&self.radix_at(l))
                .and_then(|v| v.checked_add(&digits[l]))
                .ok_or(Error::Overflow)
        })
    }

    /// Combine two numbers digit by digit with `op` applied modulo each radix.
    fn digitwise(&self, n: T, h: T, op: impl Fn(T, T, T) -> T) -> Result<T> {
        let mut a = n;
        let mut b = h;
        let mut acc = T::zero();
        let mut place = T::one();
        let mut level = 0;
        while !(a.is_zero() && b.is_zero()) {
            let r = self.radix_at(level);
            let d = op(a % r, b % r, r);
            a = a / r;
            b = b / r;
            if !d.is_zero() {
                let term = d.checked_mul(&place).ok_or(Error::Overflow)?;
                acc = acc.checked_add(&term).ok_or(Error::Overflow)?;
            }
            if !(a.is_zero() && b.is_zero()) {
                place = place.checked_mul(&r).ok_or(Error::Overflow)?;
            }
            level += 1;
        }
        Ok(acc)
    }

    /// Addition without carry.
    pub fn nim_add(&self, n: T, h: T) -> Result<T> {
        self.digitwise(n, h, |x, y, r| if x >= r - y { x - (r - y) } else { x + y })
    }

    /// Subtraction without borrow.
    pub fn nim_sub(&self, n: T, h: T) -> Result<T> {
        self.digitwise(n, h, |x, y, r| if x >= y { x - y } else { x + (r - y) })
    }

    /// The Nim sum `x^0 ⊕ ⋯ ⊕ x^{m-1}`; zero for the empty position.
    pub fn nim_sum(&self, position: &[T]) -> Result<T> {
        position
            .iter()
            .try_fold(T::zero(), |acc, &x| self.nim_add(acc, x))
    }

    /// Largest `L` with `β^(L)` dividing `n`.
    pub fn ord(&self, n: T) -> OrdValue {
        if n.is_zero() {
            return OrdValue::Infinite;
        }
        let mut rest = n;
        let mut level = 0;
        loop {
            let r = self.radix_at(level);
            if !(rest % r).is_zero() {
                return OrdValue::Finite(level);
            }
            rest = rest / r;
            level += 1;
        }
    }

    /// Minimum of `ord` over the coordinates.
    pub fn mord(&self, position: &[T]) -> OrdValue {
        position
            .iter()
            .map(|&c| self.ord(c))
            .min()
            .unwrap_or(OrdValue::Infinite)
    }

    /// `(n + h) ⊖ (n ⊕ h)`: digit `L` is 1 exactly when adding `n + h`
    /// carries into digit `L`.
    pub fn carry_vector(&self, n: T, h: T) -> Result<T> {
        let sum = n.checked_add(&h).ok_or(Error::Overflow)?;
        let xor = self.nim_add(n, h)?;
        self.nim_sub(sum, xor)
    }
}

impl<T: Natural> fmt::Display for MixedBase<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.prefix.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ":{}", self.tail)
    }
}

/// Parses `p0,p1,…,pk:t`; the prefix may be empty (`:3`).
impl<T: Natural> FromStr for MixedBase<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let colon = s.find(':').ok_or_else(|| Error::Parse {
            position: s.len(),
            message: "expected `prefix:tail`, e.g. `2,3:2` or `:3`".into(),
        })?;
        let (prefix_text, tail_text) = (&s[..colon], &s[colon + 1..]);
        let prefix = if prefix_text.trim().is_empty() {
            Vec::new()
        } else {
            parse_list(prefix_text, 0)?
        };
        let tail = parse_number(tail_text, colon + 1)?;
        Self::new(prefix, tail)
    }
}

fn parse_number<T: Natural>(text: &str, offset: usize) -> Result<T> {
    let trimmed = text.trim();
    trimmed.parse::<T>().map_err(|_| Error::Parse {
        position: offset,
        message: format!("invalid natural number `{trimmed}`"),
    })
}

/// Parses a comma-separated list of naturals, reporting the byte offset of
/// the offending item.
pub fn parse_list<T: Natural>(text: &str, offset: usize) -> Result<Vec<T>> {
    let mut out = Vec::new();
    let mut pos = offset;
    for item in text.split(',') {
        out.push(parse_number(item, pos)?);
        pos += item.len() + 1;
    }
    Ok(out)
}

/// Little-endian digit list without trailing zeros; empty for zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Digits<T>(pub Vec<T>);

impl<T: Natural> Digits<T> {
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<T: Natural> fmt::Display for Digits<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("]")
    }
}

/// `ord_β(n)`: finite for nonzero `n`, infinite for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrdValue {
    Finite(usize),
    Infinite,
}

impl OrdValue {
    pub fn finite(self) -> Option<usize> {
        match self {
            OrdValue::Finite(l) => Some(l),
            OrdValue::Infinite => None,
        }
    }
}

impl fmt::Display for OrdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrdValue::Finite(l) => write!(f, "{l}"),
            OrdValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for OrdValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            OrdValue::Finite(l) => s.serialize_u64(*l as u64),
            OrdValue::Infinite => s.serialize_str("inf"),
        }
    }
}
