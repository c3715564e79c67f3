//! Arithmetic in the prime field Z/p.
//!
//! Residues are stored as `u32` in canonical form `0 <= v < p`; products
//! are formed in `u64`, so any prime below 2^32 is accepted.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The modulus used by the reference computations.
pub const DEFAULT_MODULUS: u32 = 101;

/// A prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Modulus {
    p: u32,
}

/// A canonical residue. Carries no modulus; arithmetic goes through [`Modulus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Caller guarantees `v` is already below the modulus in use.
    #[inline]
    pub(crate) const fn from_reduced(v: u32) -> FieldElement {
        FieldElement(v)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut k = 3u64;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

impl Modulus {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(Modulus { p })
    }

    /// Checks `p > d`, needed for every degree-`d` computation.
    pub fn for_degree(p: u32, d: usize) -> Result<Self> {
        let m = Modulus::new(p)?;
        m.check_degree(d)?;
        Ok(m)
    }

    pub fn check_degree(self, d: usize) -> Result<()> {
        if (self.p as usize) <= d {
            return Err(Error::BadModulus { p: self.p, d });
        }
        Ok(())
    }

    pub fn p(self) -> u32 {
        self.p
    }

    pub fn elem(self, v: u64) -> FieldElement {
        FieldElement((v % self.p as u64) as u32)
    }

    /// Reduces a signed integer to its canonical residue.
    pub fn from_i64(self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.p as i64) as u32)
    }

    /// Signed representative in `(-p/2, p/2]`, convenient for display.
    pub fn to_signed(self, a: FieldElement) -> i64 {
        let v = a.0 as i64;
        if v > self.p as i64 / 2 {
            v - self.p as i64
        } else {
            v
        }
    }

    #[inline]
    pub fn add(self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add_raw(a.0, b.0))
    }

    #[inline]
    pub fn sub(self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.sub_raw(a.0, b.0))
    }

    #[inline]
    pub fn neg(self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg_raw(a.0))
    }

    #[inline]
    pub fn mul(self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul_raw(a.0, b.0))
    }

    pub fn pow(self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.0;
        let mut acc = 1u32 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        FieldElement(acc)
    }

    pub fn inv(self, a: FieldElement) -> Result<FieldElement> {
        self.inv_raw(a.0).map(FieldElement)
    }

    pub fn div(self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    #[inline]
    pub(crate) fn add_raw(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        let p = self.p as u64;
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    pub(crate) fn sub_raw(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.p as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub(crate) fn neg_raw(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub(crate) fn mul_raw(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Extended Euclid on (a, p).
    pub(crate) fn inv_raw(self, a: u32) -> Result<u32> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::DivisionByZero(self.p));
        }
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Ok(t0.rem_euclid(self.p as i64) as u32)
    }

    /// A square root of -1, i.e. `c^((p-1)/4)` for the least quadratic non-residue `c`.
    pub fn sqrt_minus_one(self) -> Result<FieldElement> {
        if self.p == 2 {
            return Ok(FieldElement::ONE);
        }
        if self.p % 4 != 1 {
            return Err(Error::NoImaginaryUnit(self.p));
        }
        let half = (self.p as u64 - 1) / 2;
        let minus_one = self.p - 1;
        let c = (2..self.p)
            .map(FieldElement)
            .find(|&c| self.pow(c, half).0 == minus_one)
            .expect("a prime 1 mod 4 has non-residues");
        Ok(self.pow(c, half / 2))
    }
}

impl TryFrom<u32> for Modulus {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        Modulus::new(p)
    }
}

impl From<Modulus> for u32 {
    fn from(m: Modulus) -> u32 {
        m.p
    }
}

impl Default for Modulus {
    fn default() -> Self {
        Modulus { p: DEFAULT_MODULUS }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}", self.p)
    }
}

pub fn ff_inv(a: FieldElement, m: Modulus) -> Result<FieldElement> {
    m.inv(a)
}

pub fn sqrt_minus_one(m: Modulus) -> Result<FieldElement> {
    m.sqrt_minus_one()
}
