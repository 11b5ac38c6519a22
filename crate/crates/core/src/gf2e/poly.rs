//! Univariate polynomials over GF(2^e).
//!
//! Coefficients are stored low degree first and kept trailing-zero free, so
//! the zero polynomial is the empty vector and has no degree.

use rand::Rng;

use super::{Field, FieldElement, FieldError};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(FieldElement::ONE)
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// X + a (equivalently X - a in characteristic 2).
    pub fn linear_root(a: FieldElement) -> Self {
        Self::from_coeffs(vec![a, FieldElement::ONE])
    }

    /// c * X^n
    pub fn monomial(c: FieldElement, n: usize) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; n + 1];
        coeffs[n] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_values(values: &[u16]) -> Self {
        Self::from_coeffs(values.iter().map(|&v| FieldElement::new(v)).collect())
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FieldElement> {
        self.coeffs
    }

    /// Coefficient of X^i (zero past the degree).
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree as a signed integer with -1 for the zero polynomial.
    pub fn degree_or_neg(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff() == FieldElement::ONE
    }

    /// Horner evaluation.
    pub fn eval(&self, f: &Field, x: FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c = FieldElement::new(c.value() ^ s.value());
        }
        Poly::from_coeffs(coeffs)
    }

    /// Subtraction equals addition in characteristic 2.
    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(other)
    }

    pub fn scale(&self, f: &Field, c: FieldElement) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// Multiply by X^n.
    pub fn shift(&self, n: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElement::ZERO; n];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    pub fn mul(&self, f: &Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0u16; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] ^= f.mul(a, b).value();
            }
        }
        Poly::from_values(&out)
    }

    /// `self += c * other`, in place.
    pub(crate) fn add_scaled_assign(&mut self, f: &Field, other: &Poly, c: FieldElement) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), FieldElement::ZERO);
        }
        f.axpy(&mut self.coeffs, &other.coeffs, c);
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Multiply in place by (X + a).
    pub fn mul_linear(&mut self, f: &Field, a: FieldElement) {
        if self.is_zero() {
            return;
        }
        self.coeffs.push(FieldElement::ZERO);
        for i in (1..self.coeffs.len()).rev() {
            self.coeffs[i] = f.add(self.coeffs[i - 1], f.mul(self.coeffs[i], a));
        }
        self.coeffs[0] = f.mul(self.coeffs[0], a);
    }

    /// Euclidean division: `self = q * divisor + r` with deg r < deg divisor.
    pub fn div_rem(&self, f: &Field, divisor: &Poly) -> Result<(Poly, Poly), FieldError> {
        let dd = divisor.degree().ok_or(FieldError::DivisionByZero)?;
        let Some(nd) = self.degree() else {
            return Ok((Poly::zero(), Poly::zero()));
        };
        if nd < dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let lead_inv = f.inv(divisor.leading_coeff())?;
        let mut rem: Vec<u16> = self.coeffs.iter().map(|c| c.value()).collect();
        let mut quot = vec![0u16; nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let c = FieldElement::new(rem[i + dd]);
            if c.is_zero() {
                continue;
            }
            let q = f.mul(c, lead_inv);
            quot[i] = q.value();
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] ^= f.mul(q, d).value();
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_values(&quot), Poly::from_values(&rem)))
    }

    /// Divides by the monic factor (X + a), returning the quotient and the
    /// remainder (which equals `self(a)`).
    pub fn div_linear(&self, f: &Field, a: FieldElement) -> (Poly, FieldElement) {
        if self.is_zero() {
            return (Poly::zero(), FieldElement::ZERO);
        }
        let n = self.coeffs.len();
        let mut quot = vec![FieldElement::ZERO; n - 1];
        let mut carry = FieldElement::ZERO;
        for i in (0..n).rev() {
            let v = f.add(self.coeffs[i], f.mul(carry, a));
            if i == 0 {
                return (Poly::from_coeffs(quot), v);
            }
            quot[i - 1] = v;
            carry = v;
        }
        unreachable!()
    }

    /// Scales to leading coefficient one; the zero polynomial stays zero.
    pub fn monic(&self, f: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = f.inv(self.leading_coeff()).expect("nonzero leading coefficient");
        self.scale(f, inv)
    }

    /// Formal derivative; in characteristic 2 only odd-degree terms survive.
    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| if i % 2 == 1 { c } else { FieldElement::ZERO })
            .collect();
        Poly::from_coeffs(coeffs)
    }

    /// Roots in the field, by exhaustive evaluation.
    pub fn roots(&self, f: &Field) -> Vec<FieldElement> {
        if self.is_zero() {
            return f.elements().collect();
        }
        f.elements().filter(|&x| self.eval(f, x).is_zero()).collect()
    }

    /// True if the polynomial vanishes nowhere in the field.
    pub fn is_rootless(&self, f: &Field) -> bool {
        !self.is_zero() && f.elements().all(|x| !self.eval(f, x).is_zero())
    }
}

/// Monic polynomial vanishing exactly on `roots`, the product of (X - v).
pub fn poly_from_roots(f: &Field, roots: &[FieldElement]) -> Poly {
    let mut p = Poly::one();
    for &r in roots {
        p.mul_linear(f, r);
    }
    p
}

/// Unique polynomial of degree < |points| through all points.
///
/// Builds the master polynomial N(X) = prod (X - x_i) once and obtains each
/// Lagrange basis numerator by synthetic division, for O(n^2) work.
pub fn lagrange_interpolate(
    f: &Field,
    points: &[(FieldElement, FieldElement)],
) -> Result<Poly, FieldError> {
    if points.is_empty() {
        return Err(FieldError::EmptyInterpolation);
    }
    let mut seen = vec![false; f.order()];
    for &(x, _) in points {
        let idx = x.index();
        if idx >= f.order() {
            return Err(FieldError::OutOfRange {
                value: idx as u32,
                order: f.order(),
            });
        }
        if std::mem::replace(&mut seen[idx], true) {
            return Err(FieldError::DuplicateAbscissa(x));
        }
    }
    let xs: Vec<FieldElement> = points.iter().map(|p| p.0).collect();
    let master = poly_from_roots(f, &xs);
    let n = points.len();
    let mut acc = vec![0u16; n];
    for &(x, y) in points {
        if y.is_zero() {
            continue;
        }
        let (basis, _) = master.div_linear(f, x);
        // basis(x) = prod_{j != i} (x - x_j)
        let denom = basis.eval(f, x);
        let w = f.div(y, denom)?;
        for (slot, &c) in acc.iter_mut().zip(basis.coeffs()) {
            *slot ^= f.mul(c, w).value();
        }
    }
    Ok(Poly::from_values(&acc))
}

/// One row of the extended Euclidean remainder sequence: r = s*a + t*b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EuclidRow {
    pub r: Poly,
    pub s: Poly,
    pub t: Poly,
}

/// Iterator over the rows of the extended Euclidean algorithm on (a, b),
/// starting with (a, 1, 0) and (b, 0, 1) and ending with the zero remainder.
pub struct EuclidRows<'f> {
    field: &'f Field,
    prev: Option<EuclidRow>,
    cur: Option<EuclidRow>,
}

impl<'f> EuclidRows<'f> {
    pub fn new(field: &'f Field, a: &Poly, b: &Poly) -> Self {
        EuclidRows {
            field,
            prev: Some(EuclidRow {
                r: a.clone(),
                s: Poly::one(),
                t: Poly::zero(),
            }),
            cur: Some(EuclidRow {
                r: b.clone(),
                s: Poly::zero(),
                t: Poly::one(),
            }),
        }
    }
}

impl Iterator for EuclidRows<'_> {
    type Item = EuclidRow;

    fn next(&mut self) -> Option<EuclidRow> {
        let prev = self.prev.take()?;
        match self.cur.take() {
            None => Some(prev),
            Some(cur) => {
                if !cur.r.is_zero() && !prev.r.is_zero() {
                    let f = self.field;
                    let (q, r) = prev.r.div_rem(f, &cur.r).expect("nonzero divisor");
                    let s = prev.s.sub(&q.mul(f, &cur.s));
                    let t = prev.t.sub(&q.mul(f, &cur.t));
                    self.prev = Some(cur);
                    self.cur = Some(EuclidRow { r, s, t });
                } else {
                    // One of the two remainders is zero: emit prev, then cur.
                    self.prev = Some(cur);
                    self.cur = None;
                }
                Some(prev)
            }
        }
    }
}

/// Partial extended Euclid: the first row (a, 1, 0), (b, 0, 1), ... whose
/// remainder has degree below `stop_degree` (the zero polynomial counts as
/// degree -1). Returns the final zero row if no earlier row qualifies.
pub fn extended_euclid(
    f: &Field,
    a: &Poly,
    b: &Poly,
    stop_degree: usize,
) -> Result<EuclidRow, FieldError> {
    if a.is_zero() && b.is_zero() {
        return Err(FieldError::BothZero);
    }
    let mut last = None;
    for row in EuclidRows::new(f, a, b) {
        if row.r.degree_or_neg() < stop_degree as isize {
            return Ok(row);
        }
        last = Some(row);
    }
    Ok(last.expect("at least one row"))
}

/// Monic greatest common divisor.
pub fn poly_gcd(f: &Field, a: &Poly, b: &Poly) -> Poly {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let (_, r) = x.div_rem(f, &y).expect("nonzero divisor");
        x = y;
        y = r;
    }
    x.monic(f)
}

/// Uniformly samples a polynomial of exact degree `degree` with no root in
/// the field, by rejection with exhaustive evaluation.
///
/// Degree 1 is rejected: every linear polynomial has a root.
pub fn sample_rootless_poly<R: Rng + ?Sized>(
    f: &Field,
    degree: usize,
    rng: &mut R,
) -> Result<Poly, FieldError> {
    if degree == 1 {
        return Err(FieldError::NoRootlessPolynomial(degree));
    }
    loop {
        let mut coeffs: Vec<FieldElement> = (0..degree).map(|_| f.random(rng)).collect();
        coeffs.push(f.random_nonzero(rng));
        let p = Poly::from_coeffs(coeffs);
        if p.is_rootless(f) {
            return Ok(p);
        }
    }
}
