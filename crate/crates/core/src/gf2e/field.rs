//! Binary extension fields GF(2^e) for 2 <= e <= 16.
//!
//! Multiplication goes through log/antilog tables built once per field. The
//! reduction polynomial must be primitive so that `x` generates the
//! multiplicative group; the default polynomials below are the Conway
//! polynomials for characteristic 2, which are primitive by construction.

use std::fmt;
use std::sync::Arc;

use super::FieldError;

pub const MIN_EXTENSION_DEGREE: u8 = 2;
pub const MAX_EXTENSION_DEGREE: u8 = 16;

/// Conway polynomials over GF(2), indexed by extension degree, encoded with
/// bit `i` holding the coefficient of `x^i`.
const CONWAY_POLYNOMIALS: [u32; 17] = [
    0,
    0,
    0x7,     // x^2 + x + 1
    0xB,     // x^3 + x + 1
    0x13,    // x^4 + x + 1
    0x25,    // x^5 + x^2 + 1
    0x5B,    // x^6 + x^4 + x^3 + x + 1
    0x83,    // x^7 + x + 1
    0x11D,   // x^8 + x^4 + x^3 + x^2 + 1
    0x211,   // x^9 + x^4 + 1
    0x46F,   // x^10 + x^6 + x^5 + x^3 + x^2 + x + 1
    0x805,   // x^11 + x^2 + 1
    0x10EB,  // x^12 + x^7 + x^6 + x^5 + x^3 + x + 1
    0x201B,  // x^13 + x^4 + x^3 + x + 1
    0x40A9,  // x^14 + x^7 + x^5 + x^3 + 1
    0x8035,  // x^15 + x^5 + x^4 + x^2 + 1
    0x1002D, // x^16 + x^5 + x^3 + x^2 + 1
];

/// Returns the default reduction polynomial recorded for extension degree `e`.
pub fn default_reduction_polynomial(e: u8) -> Option<u32> {
    if (MIN_EXTENSION_DEGREE..=MAX_EXTENSION_DEGREE).contains(&e) {
        Some(CONWAY_POLYNOMIALS[e as usize])
    } else {
        None
    }
}

/// Smallest supported extension degree whose field holds `size` elements.
pub fn extension_degree_for(size: usize) -> u8 {
    let mut e = MIN_EXTENSION_DEGREE;
    while (1usize << e) < size {
        e += 1;
    }
    e
}

/// An element of GF(2^e), stored as its polynomial-basis bit pattern.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a raw value without checking it against a field order.
    pub const fn new(value: u16) -> Self {
        FieldElement(value)
    }

    pub const fn value(self) -> u16 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

impl From<u16> for FieldElement {
    fn from(v: u16) -> Self {
        FieldElement(v)
    }
}

/// The four element-level operations exposed through [`Field::apply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Div,
}

struct Tables {
    e: u8,
    modulus: u32,
    order: usize,
    // exp has 2 * (order - 1) entries so log sums never need a reduction.
    exp: Vec<u16>,
    log: Vec<u16>,
    // Full multiplication table for orders up to 256, empty otherwise.
    product: Vec<u16>,
}

/// Parameters and arithmetic tables for one GF(2^e). Cloning is cheap.
#[derive(Clone)]
pub struct Field {
    tables: Arc<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("e", &self.tables.e)
            .field("modulus", &format_args!("{:#x}", self.tables.modulus))
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.tables.e == other.tables.e && self.tables.modulus == other.tables.modulus
    }
}

impl Eq for Field {}

impl Field {
    /// Field of order 2^e with the default reduction polynomial for `e`.
    pub fn new(e: u8) -> Result<Self, FieldError> {
        let modulus =
            default_reduction_polynomial(e).ok_or(FieldError::UnsupportedDegree(e))?;
        Self::with_modulus(e, modulus)
    }

    /// Field of order 2^e reduced by `modulus`, which must be primitive.
    pub fn with_modulus(e: u8, modulus: u32) -> Result<Self, FieldError> {
        if !(MIN_EXTENSION_DEGREE..=MAX_EXTENSION_DEGREE).contains(&e) {
            return Err(FieldError::UnsupportedDegree(e));
        }
        if modulus >> e != 1 {
            return Err(FieldError::BadModulus { e, modulus });
        }
        let order = 1usize << e;
        let group = order - 1;
        let mut exp = vec![0u16; 2 * group];
        let mut log = vec![0u16; order];
        let mut seen = vec![false; order];
        let mut x: u32 = 1;
        for i in 0..group {
            if seen[x as usize] {
                // x has order < 2^e - 1: reducible or not primitive.
                return Err(FieldError::BadModulus { e, modulus });
            }
            seen[x as usize] = true;
            exp[i] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << e) != 0 {
                x ^= modulus;
            }
        }
        if x != 1 {
            return Err(FieldError::BadModulus { e, modulus });
        }
        exp.copy_within(0..group, group);
        let mut product = Vec::new();
        if order <= 256 {
            product = vec![0u16; order * order];
            for a in 1..order {
                for b in 1..order {
                    product[a * order + b] = exp[log[a] as usize + log[b] as usize];
                }
            }
        }
        Ok(Field {
            tables: Arc::new(Tables {
                e,
                modulus,
                order,
                exp,
                log,
                product,
            }),
        })
    }

    /// Extension degree e (bits per element).
    pub fn degree(&self) -> u8 {
        self.tables.e
    }

    pub fn reduction_polynomial(&self) -> u32 {
        self.tables.modulus
    }

    /// Number of field elements, 2^e.
    pub fn order(&self) -> usize {
        self.tables.order
    }

    /// Checked construction of an element of this field.
    pub fn element(&self, value: u32) -> Result<FieldElement, FieldError> {
        if (value as usize) < self.tables.order {
            Ok(FieldElement(value as u16))
        } else {
            Err(FieldError::OutOfRange {
                value,
                order: self.tables.order,
            })
        }
    }

    /// All field elements in increasing value order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.tables.order).map(|v| FieldElement(v as u16))
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let t = &self.tables;
        if !t.product.is_empty() {
            return FieldElement(t.product[a.0 as usize * t.order + b.0 as usize]);
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        FieldElement(t.exp[t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize])
    }

    /// `dst[i] += c * src[i]` over the common length.
    pub(crate) fn axpy(&self, dst: &mut [FieldElement], src: &[FieldElement], c: FieldElement) {
        if c.0 == 0 {
            return;
        }
        let t = &self.tables;
        if !t.product.is_empty() {
            let row = &t.product[c.0 as usize * t.order..][..t.order];
            for (d, s) in dst.iter_mut().zip(src) {
                d.0 ^= row[s.0 as usize];
            }
            return;
        }
        let lc = t.log[c.0 as usize] as usize;
        let (exp, log) = (&t.exp[..], &t.log[..]);
        for (d, s) in dst.iter_mut().zip(src) {
            if s.0 != 0 {
                d.0 ^= exp[log[s.0 as usize] as usize + lc];
            }
        }
    }

    #[inline]
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let t = &self.tables;
        let group = t.order - 1;
        Ok(FieldElement(t.exp[(group - t.log[a.0 as usize] as usize) % group]))
    }

    #[inline]
    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^n by log arithmetic; 0^0 = 1.
    pub fn pow(&self, a: FieldElement, n: u64) -> FieldElement {
        if n == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let t = &self.tables;
        let group = (t.order - 1) as u64;
        let l = (t.log[a.0 as usize] as u64 * (n % group)) % group;
        FieldElement(t.exp[l as usize])
    }

    /// Dispatches one of the element operations; `b` is ignored for `Inv`.
    pub fn apply(
        &self,
        op: FieldOp,
        a: FieldElement,
        b: FieldElement,
    ) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        match op {
            FieldOp::Add => Ok(self.add(a, b)),
            FieldOp::Mul => Ok(self.mul(a, b)),
            FieldOp::Inv => self.inv(a),
            FieldOp::Div => self.div(a, b),
        }
    }

    fn check(&self, a: FieldElement) -> Result<(), FieldError> {
        self.element(a.0 as u32).map(|_| ())
    }

    /// Uniformly random element.
    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.random_range(0..self.tables.order) as u16)
    }

    /// Uniformly random nonzero element.
    pub fn random_nonzero<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.random_range(1..self.tables.order) as u16)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Carry-less multiply and reduce, independent of the tables.
    fn slow_mul(e: u8, modulus: u32, a: u16, b: u16) -> u16 {
        let mut acc: u32 = 0;
        for i in 0..e {
            if b >> i & 1 == 1 {
                acc ^= (a as u32) << i;
            }
        }
        for bit in (e as u32..2 * e as u32).rev() {
            if acc >> bit & 1 == 1 {
                acc ^= modulus << (bit - e as u32);
            }
        }
        acc as u16
    }

    fn is_irreducible(e: u8, modulus: u32) -> bool {
        // Trial division by every polynomial of degree 1..=e/2.
        let deg = |p: u32| 31 - p.leading_zeros();
        for d in 1..=(e as u32 / 2) {
            for div in (1u32 << d)..(1u32 << (d + 1)) {
                let mut r = modulus;
                while r != 0 && deg(r) >= d {
                    r ^= div << (deg(r) - d);
                }
                if r == 0 {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn default_polynomials_are_irreducible_and_primitive() {
        for e in MIN_EXTENSION_DEGREE..=MAX_EXTENSION_DEGREE {
            let m = default_reduction_polynomial(e).unwrap();
            assert!(is_irreducible(e, m), "e={e}");
            Field::new(e).unwrap_or_else(|err| panic!("e={e}: {err}"));
        }
    }

    #[test]
    fn rejects_reducible_modulus() {
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2
        assert!(Field::with_modulus(4, 0x15).is_err());
        // x^4 + x^3 + x^2 + x + 1 is irreducible but x has order 5.
        assert!(Field::with_modulus(4, 0x1F).is_err());
        assert!(Field::new(1).is_err());
        assert!(Field::new(17).is_err());
    }

    #[test]
    fn table_mul_matches_carryless_mul() {
        for e in [2u8, 4, 5, 8] {
            let f = Field::new(e).unwrap();
            let m = f.reduction_polynomial();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b).value(), slow_mul(e, m, a.value(), b.value()));
                }
            }
        }
    }

    #[test]
    fn gf16_examples() {
        let f = Field::new(4).unwrap();
        assert_eq!(f.reduction_polynomial(), 0x13);
        for a in f.elements() {
            assert_eq!(f.add(a, a), FieldElement::ZERO);
        }
        assert_eq!(f.mul(0x2.into(), 0x9.into()), FieldElement::ONE);
        assert_eq!(f.inv(FieldElement::ONE).unwrap(), FieldElement::ONE);
        assert_eq!(f.inv(FieldElement::ZERO), Err(FieldError::DivisionByZero));
        assert_eq!(
            f.apply(FieldOp::Div, 0x7.into(), FieldElement::ZERO),
            Err(FieldError::DivisionByZero)
        );
        assert!(f.apply(FieldOp::Add, 0x10.into(), 0x1.into()).is_err());
    }

    #[test]
    fn field_axioms_exhaustive_gf16_gf256() {
        for e in [4u8, 8] {
            let f = Field::new(e).unwrap();
            let all: Vec<_> = f.elements().collect();
            for &a in &all {
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
            }
            // Associativity and distributivity on a stride through the cube.
            let step = if e == 4 { 1 } else { 7 };
            for a in all.iter().step_by(step) {
                for b in all.iter().step_by(step) {
                    for c in all.iter().step_by(step * 3) {
                        let (a, b, c) = (*a, *b, *c);
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let f = Field::new(8).unwrap();
        let a = FieldElement::new(0x53);
        let mut acc = FieldElement::ONE;
        for n in 0..600u64 {
            assert_eq!(f.pow(a, n), acc);
            acc = f.mul(acc, a);
        }
        assert_eq!(f.pow(FieldElement::ZERO, 0), FieldElement::ONE);
    }

    #[test]
    fn extension_degree_sizing() {
        assert_eq!(extension_degree_for(1), 2);
        assert_eq!(extension_degree_for(4), 2);
        assert_eq!(extension_degree_for(5), 3);
        assert_eq!(extension_degree_for(96), 7);
        assert_eq!(extension_degree_for(1536), 11);
        assert_eq!(extension_degree_for(2048), 11);
    }
}
