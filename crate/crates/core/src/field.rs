//! Prime-field arithmetic with per-scheme modulus selection.
//!
//! Each scheme works over a prime field whose size window is dictated by the
//! largest value the scheme must represent without wrap-around:
//!
//! * triangles:   6(Bn)^3  <= p <= 12(Bn)^3
//! * 4-cycles:    12(Bn)^4 <= p <= 24(Bn)^4
//! * matching:    max(2n^3, 4Bn^2+1) <= p <= 2*max(2n^3, 4Bn^2+1)
//!
//! All moduli are single-word (p < 2^63) so a product of two canonical
//! elements fits a 128-bit intermediate.

use crate::{Error, Result};
use rand::RngCore;

/// Which scheme a field context was sized for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Triangles,
    Matching,
    FourCycles,
}

impl SchemeKind {
    pub fn code(self) -> u8 {
        match self {
            SchemeKind::Triangles => 1,
            SchemeKind::Matching => 2,
            SchemeKind::FourCycles => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            1 => Ok(SchemeKind::Triangles),
            2 => Ok(SchemeKind::Matching),
            3 => Ok(SchemeKind::FourCycles),
            other => Err(Error::InvalidParameter(format!(
                "unknown scheme kind code {other}"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Triangles => "triangles",
            SchemeKind::Matching => "matching",
            SchemeKind::FourCycles => "fourcycles",
        }
    }
}

/// An element of F_p in canonical form (value < p).
///
/// Elements remember their modulus, so arithmetic between elements of
/// different fields is rejected (by panic in the operator impls, or as an
/// error through [`FieldContext::checked_add`] and friends).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn assert_same_field(&self, other: &FieldElement) {
        assert_eq!(
            self.modulus, other.modulus,
            "field mismatch: {} vs {}",
            self.modulus, other.modulus
        );
    }

    /// Multiplicative inverse via Fermat (a^(p-2)); zero is a reported error.
    pub fn inv(&self) -> Result<FieldElement> {
        if self.value == 0 {
            return Err(Error::InvertZero);
        }
        Ok(self.pow(self.modulus - 2))
    }

    /// Square-and-multiply exponentiation by an integer exponent.
    pub fn pow(&self, mut exp: u64) -> FieldElement {
        let p = self.modulus;
        let mut base = self.value;
        let mut acc = 1u64 % p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul_mod(acc, base, p);
            }
            base = mul_mod(base, base, p);
            exp >>= 1;
        }
        FieldElement {
            value: acc,
            modulus: p,
        }
    }

    /// Canonical 8-byte little-endian encoding of the value.
    pub fn to_le_bytes(&self) -> [u8; 8] {
        self.value.to_le_bytes()
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;
    #[inline]
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.assert_same_field(&rhs);
        let mut s = self.value + rhs.value; // both < p < 2^63, no overflow
        if s >= self.modulus {
            s -= self.modulus;
        }
        FieldElement {
            value: s,
            modulus: self.modulus,
        }
    }
}

impl std::ops::Sub for FieldElement {
    type Output = FieldElement;
    #[inline]
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self.assert_same_field(&rhs);
        let value = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.modulus - (rhs.value - self.value)
        };
        FieldElement {
            value,
            modulus: self.modulus,
        }
    }
}

impl std::ops::Mul for FieldElement {
    type Output = FieldElement;
    #[inline]
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.assert_same_field(&rhs);
        FieldElement {
            value: mul_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    #[inline]
    fn neg(self) -> FieldElement {
        let value = if self.value == 0 {
            0
        } else {
            self.modulus - self.value
        };
        FieldElement {
            value,
            modulus: self.modulus,
        }
    }
}

impl std::ops::AddAssign for FieldElement {
    #[inline]
    fn add_assign(&mut self, rhs: FieldElement) {
        *self = *self + rhs;
    }
}

impl std::ops::SubAssign for FieldElement {
    #[inline]
    fn sub_assign(&mut self, rhs: FieldElement) {
        *self = *self - rhs;
    }
}

/// A prime field sized for one scheme instance (n nodes, multiplicity
/// bound B). Immutable after construction; all operations are pure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldContext {
    p: u64,
    kind: SchemeKind,
    n: u32,
    b: u32,
}

impl FieldContext {
    /// Picks the smallest prime in the scheme's window for (n, B).
    pub fn for_scheme(kind: SchemeKind, n: u32, b: u32) -> Result<FieldContext> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
        }
        if b < 1 {
            return Err(Error::InvalidParameter("B must be >= 1".into()));
        }
        let lower = Self::window_lower(kind, n, b)?;
        let p = find_prime(lower)?;
        let ctx = FieldContext { p, kind, n, b };
        ctx.validate()?;
        Ok(ctx)
    }

    /// Rebuilds a context from raw parts (e.g. a deserialized header),
    /// re-checking every invariant.
    pub fn from_raw(kind: SchemeKind, n: u32, b: u32, p: u64) -> Result<FieldContext> {
        if n < 2 || b < 1 {
            return Err(Error::InvalidParameter(format!(
                "invalid field parameters n={n} B={b}"
            )));
        }
        let ctx = FieldContext { p, kind, n, b };
        ctx.validate()?;
        Ok(ctx)
    }

    fn window_lower(kind: SchemeKind, n: u32, b: u32) -> Result<u64> {
        let n = n as u128;
        let b = b as u128;
        let lower: u128 = match kind {
            SchemeKind::Triangles => 6 * (b * n).pow(3),
            SchemeKind::FourCycles => 12 * (b * n).pow(4),
            // The zero-sum check sums D(u,v)*E(u,v) over ordered pairs, which
            // can reach 2Bn^2, so the lower bound is raised above the bare
            // 2n^3 when B is large.
            SchemeKind::Matching => std::cmp::max(2 * n.pow(3), 4 * b * n.pow(2) + 1),
        };
        if lower >= 1u128 << 62 {
            return Err(Error::PrimeWindowOverflow {
                lower: u64::MAX,
            });
        }
        Ok(lower as u64)
    }

    fn validate(&self) -> Result<()> {
        if self.p >= 1u64 << 63 {
            return Err(Error::InvalidParameter(format!(
                "modulus {} exceeds 2^63",
                self.p
            )));
        }
        if !is_prime(self.p) {
            return Err(Error::InvalidParameter(format!("{} is not prime", self.p)));
        }
        let lower = Self::window_lower(self.kind, self.n, self.b)? as u128;
        let upper = 2 * lower;
        if (self.p as u128) < lower || (self.p as u128) > upper {
            return Err(Error::InvalidParameter(format!(
                "modulus {} outside the {} window [{lower}, {upper}]",
                self.p,
                self.kind.name()
            )));
        }
        Ok(())
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn multiplicity_bound(&self) -> u32 {
        self.b
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            value: 0,
            modulus: self.p,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            value: 1 % self.p,
            modulus: self.p,
        }
    }

    /// Embeds an unsigned integer, reducing mod p.
    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.p,
            modulus: self.p,
        }
    }

    /// Embeds a signed integer (negatives map to p - |v| mod p).
    pub fn element_from_i64(&self, value: i64) -> FieldElement {
        if value >= 0 {
            self.element(value as u64)
        } else {
            -self.element(value.unsigned_abs())
        }
    }

    /// Accepts only canonical wire values (value < p).
    pub fn element_canonical(&self, value: u64) -> Result<FieldElement> {
        if value >= self.p {
            return Err(Error::InvalidParameter(format!(
                "non-canonical field value {value} for modulus {}",
                self.p
            )));
        }
        Ok(FieldElement {
            value,
            modulus: self.p,
        })
    }

    /// Verifies an element belongs to this field.
    pub fn check_element(&self, a: FieldElement) -> Result<FieldElement> {
        if a.modulus != self.p {
            return Err(Error::FieldMismatch);
        }
        Ok(a)
    }

    fn check(&self, a: FieldElement) -> Result<FieldElement> {
        self.check_element(a)
    }

    /// Addition with mixed-field operands rejected as an error.
    pub fn checked_add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.check(a)? + self.check(b)?)
    }

    pub fn checked_sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.check(a)? - self.check(b)?)
    }

    pub fn checked_mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.check(a)? * self.check(b)?)
    }

    pub fn checked_neg(&self, a: FieldElement) -> Result<FieldElement> {
        Ok(-self.check(a)?)
    }

    /// Uniform sample from [0, p) by rejection (no modulo bias).
    pub fn sample(&self, rng: &mut impl RngCore) -> FieldElement {
        // Accept x only below the largest multiple of p representable in 64
        // bits, then reduce.
        let full_cycles = (1u128 << 64) / self.p as u128;
        let limit = full_cycles * self.p as u128;
        loop {
            let x = rng.next_u64();
            if (x as u128) < limit {
                return FieldElement {
                    value: x % self.p,
                    modulus: self.p,
                };
            }
        }
    }

    /// Serializes as (scheme_kind: 1 byte, n: 4-byte LE, B: 4-byte LE,
    /// p: 8-byte LE).
    pub fn to_bytes(&self) -> [u8; 17] {
        let mut out = [0u8; 17];
        out[0] = self.kind.code();
        out[1..5].copy_from_slice(&self.n.to_le_bytes());
        out[5..9].copy_from_slice(&self.b.to_le_bytes());
        out[9..17].copy_from_slice(&self.p.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<FieldContext> {
        if bytes.len() != 17 {
            return Err(Error::InvalidParameter(format!(
                "field context encoding must be 17 bytes, got {}",
                bytes.len()
            )));
        }
        let kind = SchemeKind::from_code(bytes[0])?;
        let n = u32::from_le_bytes(bytes[1..5].try_into().unwrap());
        let b = u32::from_le_bytes(bytes[5..9].try_into().unwrap());
        let p = u64::from_le_bytes(bytes[9..17].try_into().unwrap());
        FieldContext::from_raw(kind, n, b, p)
    }
}

/// Smallest prime >= lower.
pub fn find_prime(lower: u64) -> Result<u64> {
    if lower >= 1u64 << 62 {
        return Err(Error::PrimeWindowOverflow { lower });
    }
    let mut candidate = lower.max(2);
    loop {
        if is_prime(candidate) {
            return Ok(candidate);
        }
        candidate = candidate
            .checked_add(1)
            .ok_or(Error::PrimeWindowOverflow { lower })?;
        if candidate >= 1u64 << 63 {
            return Err(Error::PrimeWindowOverflow { lower });
        }
    }
}

/// Deterministic Miller-Rabin, valid for all u64 inputs. The test suite
/// cross-checks against plain trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == small {
            return true;
        }
        if n.is_multiple_of(small) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    // This witness set decides primality for every n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}
