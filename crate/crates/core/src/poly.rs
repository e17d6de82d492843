//! Lagrange basis tables over the node domain {1..n} and point-value
//! polynomial utilities.
//!
//! The verifier's per-update work is constant because lambda_v(r) for every
//! v is precomputed once into a [`LagrangeTable`]. Proof polynomials travel
//! as their values on {0..d} ([`PointValuePoly`]) and are evaluated at the
//! secret point in O(d).

use crate::field::{FieldContext, FieldElement};
use crate::{Error, Result};

/// The row of values lambda_v(r) for v in {1..n}, where lambda_v is the
/// degree-(n-1) Lagrange basis polynomial of the point v over {1..n}.
#[derive(Debug, Clone)]
pub struct LagrangeTable {
    field: FieldContext,
    r: FieldElement,
    n: u32,
    lam: Vec<FieldElement>,
}

impl LagrangeTable {
    /// Builds the table with the incremental q1/q2 recurrences:
    ///   q1(v) = q1(v-1) * (r-v)^-1 * (r-v+1)
    ///   q2(v) = -q2(v-1) * (v-1)^-1 * (n-v+1)
    /// and lambda_v(r) = q1(v) * q2(v). When r lies in {1..n} the q1 recurrence
    /// would divide by zero, so direct per-v products are used instead (only
    /// the prover evaluates at in-domain points, where constant-time updates
    /// are not required).
    pub fn build(field: &FieldContext, r: FieldElement, n: u32) -> Result<LagrangeTable> {
        if n < 1 {
            return Err(Error::InvalidParameter("table domain must be non-empty".into()));
        }
        if n as u64 >= field.modulus() {
            return Err(Error::InvalidParameter(format!(
                "domain size {n} not below modulus {}",
                field.modulus()
            )));
        }
        let r = field.check_element(r)?;
        let in_domain = r.value() >= 1 && r.value() <= n as u64;
        let lam = if in_domain {
            Self::build_direct(field, r, n)?
        } else {
            Self::build_incremental(field, r, n)?
        };
        Ok(LagrangeTable {
            field: *field,
            r,
            n,
            lam,
        })
    }

    fn build_direct(field: &FieldContext, r: FieldElement, n: u32) -> Result<Vec<FieldElement>> {
        // In-domain r: for v != r the numerator product contains the factor
        // (r - r) = 0, so only the v = r entry needs its products evaluated.
        let rv = r.value();
        let mut lam = vec![field.zero(); n as usize];
        let mut num = field.one();
        let mut den = field.one();
        for v2 in 1..=n as u64 {
            if v2 != rv {
                num = num * (r - field.element(v2));
                den = den * (field.element(rv) - field.element(v2));
            }
        }
        lam[(rv - 1) as usize] = num * den.inv()?;
        Ok(lam)
    }

    fn build_incremental(
        field: &FieldContext,
        r: FieldElement,
        n: u32,
    ) -> Result<Vec<FieldElement>> {
        let mut lam = Vec::with_capacity(n as usize);
        // Inverses feeding the recurrences: (r - v) for v in 2..n by batch
        // inversion, (v - 1) by the small-integer sieve.
        let diffs: Vec<FieldElement> = (2..=n as u64).map(|v| r - field.element(v)).collect();
        let inv_diffs = batch_invert(field, &diffs)?;
        let small_inv = small_inverses(field, n.saturating_sub(1) as u64);

        // q1(1), q2(1) by direct products.
        let mut q1 = field.one();
        let mut den = field.one();
        for v2 in 2..=n as u64 {
            q1 = q1 * (r - field.element(v2));
            den = den * (field.element(1) - field.element(v2));
        }
        let mut q2 = den.inv()?;
        lam.push(q1 * q2);
        for v in 2..=n as u64 {
            q1 = q1 * inv_diffs[(v - 2) as usize] * (r - field.element(v - 1));
            q2 = -(q2 * small_inv[(v - 1) as usize] * field.element(n as u64 - v + 1));
            lam.push(q1 * q2);
        }
        Ok(lam)
    }

    /// lambda_v(r) for 1-based v.
    #[inline]
    pub fn lam(&self, v: u32) -> FieldElement {
        self.lam[(v - 1) as usize]
    }

    pub fn field(&self) -> &FieldContext {
        &self.field
    }

    pub fn r(&self) -> FieldElement {
        self.r
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of stored field elements (for verifier state audits).
    pub fn stored_elements(&self) -> usize {
        self.lam.len()
    }
}

/// Montgomery batch inversion: one exponentiation plus 3(k-1) products.
fn batch_invert(field: &FieldContext, values: &[FieldElement]) -> Result<Vec<FieldElement>> {
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc = field.one();
    for &v in values {
        acc = acc * v;
        prefix.push(acc);
    }
    let mut inv_acc = acc.inv()?;
    let mut out = vec![field.zero(); values.len()];
    for i in (0..values.len()).rev() {
        out[i] = if i == 0 { inv_acc } else { inv_acc * prefix[i - 1] };
        inv_acc = inv_acc * values[i];
    }
    Ok(out)
}

/// inv[k] for k in 1..=limit via inv[k] = -(p/k) * inv[p mod k]; index 0
/// unused.
fn small_inverses(field: &FieldContext, limit: u64) -> Vec<FieldElement> {
    let p = field.modulus();
    let mut inv = vec![field.zero(); (limit + 1) as usize];
    if limit >= 1 {
        inv[1] = field.one();
    }
    for k in 2..=limit {
        inv[k as usize] = -(field.element(p / k) * inv[(p % k) as usize]);
    }
    inv
}

/// A polynomial of degree <= d given by its values on {0..d}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointValuePoly {
    field: FieldContext,
    values: Vec<FieldElement>,
}

impl PointValuePoly {
    pub fn new(field: &FieldContext, values: Vec<FieldElement>) -> Result<PointValuePoly> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "point-value polynomial needs at least one value".into(),
            ));
        }
        for v in &values {
            field.check_element(*v)?;
        }
        Ok(PointValuePoly {
            field: *field,
            values,
        })
    }

    pub fn zero(field: &FieldContext, degree_bound: usize) -> PointValuePoly {
        PointValuePoly {
            field: *field,
            values: vec![field.zero(); degree_bound + 1],
        }
    }

    pub fn degree_bound(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    pub fn field(&self) -> &FieldContext {
        &self.field
    }

    /// Value at integer abscissa x in {0..d}.
    pub fn value_at(&self, x: usize) -> FieldElement {
        self.values[x]
    }

    /// Evaluates the unique degree-<=d interpolant at r in O(d) via
    /// prefix/suffix products; in-domain points return the stored value.
    pub fn eval(&self, r: FieldElement) -> Result<FieldElement> {
        let field = &self.field;
        let r = field.check_element(r)?;
        let d = self.degree_bound();
        if r.value() <= d as u64 {
            return Ok(self.values[r.value() as usize]);
        }
        // prefix[x] = prod_{y<x} (r-y), suffix[x] = prod_{y>=x} (r-y)
        let mut prefix = Vec::with_capacity(d + 2);
        prefix.push(field.one());
        for y in 0..=d as u64 {
            let last = *prefix.last().unwrap();
            prefix.push(last * (r - field.element(y)));
        }
        let mut suffix = vec![field.one(); d + 2];
        for y in (0..=d as u64).rev() {
            suffix[y as usize] = suffix[y as usize + 1] * (r - field.element(y));
        }
        // Denominators prod_{y != x} (x-y) = x! * (d-x)! * (-1)^(d-x).
        let mut fact = Vec::with_capacity(d + 1);
        fact.push(field.one());
        for k in 1..=d as u64 {
            let last = *fact.last().unwrap();
            fact.push(last * field.element(k));
        }
        let mut inv_fact = vec![field.one(); d + 1];
        inv_fact[d] = fact[d].inv()?;
        for k in (0..d).rev() {
            inv_fact[k] = inv_fact[k + 1] * field.element(k as u64 + 1);
        }
        let mut acc = field.zero();
        for x in 0..=d {
            let mut w = self.values[x] * prefix[x] * suffix[x + 1] * inv_fact[x] * inv_fact[d - x];
            if (d - x) % 2 == 1 {
                w = -w;
            }
            acc += w;
        }
        Ok(acc)
    }

    /// Sum of the stored values on {a..b}.
    pub fn range_sum(&self, a: usize, b: usize) -> Result<FieldElement> {
        if a > b || b > self.degree_bound() {
            return Err(Error::InvalidParameter(format!(
                "range [{a}, {b}] outside stored domain [0, {}]",
                self.degree_bound()
            )));
        }
        let mut acc = self.field.zero();
        for x in a..=b {
            acc += self.values[x];
        }
        Ok(acc)
    }

    /// Standalone wire form: 4-byte LE count, then count 8-byte LE values.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 8 * self.values.len());
        out.extend_from_slice(&(self.values.len() as u32).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(field: &FieldContext, bytes: &[u8]) -> Result<PointValuePoly> {
        if bytes.len() < 4 {
            return Err(Error::MalformedProof("truncated polynomial encoding".into()));
        }
        let count = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
        if bytes.len() != 4 + 8 * count {
            return Err(Error::MalformedProof(format!(
                "polynomial encoding length {} does not match count {count}",
                bytes.len()
            )));
        }
        Self::from_raw_values(field, &bytes[4..])
    }

    /// Decodes a bare sequence of 8-byte LE canonical values (the in-frame
    /// form, where the count is implied by the payload length).
    pub fn from_raw_values(field: &FieldContext, bytes: &[u8]) -> Result<PointValuePoly> {
        if bytes.is_empty() || !bytes.len().is_multiple_of(8) {
            return Err(Error::MalformedProof(format!(
                "value payload of {} bytes is not a multiple of 8",
                bytes.len()
            )));
        }
        let mut values = Vec::with_capacity(bytes.len() / 8);
        for chunk in bytes.chunks_exact(8) {
            let raw = u64::from_le_bytes(chunk.try_into().unwrap());
            values.push(
                field
                    .element_canonical(raw)
                    .map_err(|_| Error::MalformedProof(format!("non-canonical value {raw}")))?,
            );
        }
        PointValuePoly::new(field, values)
    }

    /// Bare value bytes without the count prefix.
    pub fn to_raw_values(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 * self.values.len());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }
}
