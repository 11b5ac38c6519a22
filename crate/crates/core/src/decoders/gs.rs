//! Guruswami–Sudan list decoding.
//!
//! For k ≥ 2 and multiplicity s the decoder builds a nonzero Q(X, Y) of
//! (1, k−1)-weighted degree at most D that vanishes with multiplicity s at
//! each of the u points, where D is the smallest value for which the number
//! of monomials X^a Y^b with a + (k−1)b ≤ D exceeds the u·s(s+1)/2 linear
//! constraints. Any f of degree < k agreeing with at least
//!
//! ```text
//! τ = ⌊D / s⌋ + 1
//! ```
//!
//! points makes Q(X, f(X)) vanish, so f is found among the Y-roots of Q.
//! This τ is the decoding radius reported by [`gs_parameters`]; it approaches
//! ⌊√(u(k−1))⌋ + 1 only as s grows. When s = 1 and L = 1 it equals the
//! unique decoding bound ⌈(u+k)/2⌉.
//!
//! Q is computed with Kötter's interpolation, and its roots with the
//! Roth–Ruckenstein recursion. For k = 1 the candidates are simply all
//! constants that agree with at least one point (radius 1).

use crate::gf2e::{Field, FieldElement, FieldError, Poly};

use super::DecodeError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GsParameters {
    /// Bound D on the weighted degree of Q.
    pub weighted_degree: usize,
    /// Bound L = ⌊D/(k−1)⌋ on the Y-degree of Q.
    pub y_degree: usize,
    /// Minimum agreement τ guaranteed to be decoded.
    pub radius: usize,
    /// Number of linear constraints u·s(s+1)/2.
    pub constraints: usize,
}

fn monomial_count(d: usize, w: usize) -> usize {
    (0..=d / w).map(|b| d - b * w + 1).sum()
}

pub fn gs_parameters(u: usize, k: usize, s: u32) -> Result<GsParameters, DecodeError> {
    if k == 0 {
        return Err(DecodeError::ZeroK);
    }
    if s == 0 {
        return Err(DecodeError::ZeroMultiplicity);
    }
    let s = s as usize;
    let constraints = u * s * (s + 1) / 2;
    if k == 1 {
        return Ok(GsParameters {
            weighted_degree: 0,
            y_degree: 0,
            radius: 1,
            constraints,
        });
    }
    let w = k - 1;
    // Smallest D with more monomials than constraints; the square-root bound
    // below is a safe starting point.
    let mut d = ((2 * constraints * w) as f64).sqrt() as usize;
    d = d.saturating_sub(2 * w);
    while monomial_count(d, w) <= constraints {
        d += 1;
    }
    while d > 0 && monomial_count(d - 1, w) > constraints {
        d -= 1;
    }
    Ok(GsParameters {
        weighted_degree: d,
        y_degree: d / w,
        radius: d / s + 1,
        constraints,
    })
}

/// Smallest multiplicity in 1..=max_s whose radius is at most `target`.
pub fn multiplicity_for_radius(u: usize, k: usize, target: usize, max_s: u32) -> Option<u32> {
    (1..=max_s).find(|&s| gs_parameters(u, k, s).is_ok_and(|p| p.radius <= target))
}

/// Bivariate polynomial as a vector of X-polynomials indexed by Y-degree.
type BiPoly = Vec<Poly>;

fn leading(q: &BiPoly, w: usize) -> (isize, usize) {
    let mut best = (-1isize, 0usize);
    for (l, ql) in q.iter().enumerate() {
        if let Some(dx) = ql.degree() {
            let wd = (dx + l * w) as isize;
            if wd >= best.0 {
                best = (wd, l);
            }
        }
    }
    best
}

// Taylor coefficients of p at x up to order s − 1, by repeated synthetic
// division by (X − x).
fn taylor_x(f: &Field, p: &Poly, x: FieldElement, s: usize, out: &mut Vec<FieldElement>) {
    out.clear();
    let mut c = p.coeffs().to_vec();
    let n = c.len();
    for a in 0..s {
        if a >= n {
            out.push(FieldElement::ZERO);
            continue;
        }
        for i in (a..n - 1).rev() {
            c[i] = f.add(c[i], f.mul(x, c[i + 1]));
        }
        out.push(c[a]);
    }
}

// All Hasse derivatives of order (a, b), a + b < s, of Q at (x, y), stored
// at index b * s + a. Binomials are taken mod 2: C(n, r) is odd iff r's bits
// are a subset of n's.
fn hasse_table(f: &Field, q: &BiPoly, x: FieldElement, y: FieldElement, s: usize, scratch: &mut Vec<FieldElement>) -> Vec<FieldElement> {
    let mut hx = Vec::with_capacity(q.len() * s);
    for ql in q {
        taylor_x(f, ql, x, s, scratch);
        hx.extend_from_slice(scratch);
    }
    let mut table = vec![FieldElement::ZERO; s * s];
    for b in 0..s {
        for a in 0..s - b {
            let mut acc = FieldElement::ZERO;
            for l in (b..q.len()).rev() {
                acc = f.mul(acc, y);
                if l & b == b {
                    acc = f.add(acc, hx[l * s + a]);
                }
            }
            table[b * s + a] = acc;
        }
    }
    table
}

/// Kötter interpolation: the minimal-order Q with the given multiplicity at
/// every point.
///
/// The derivatives of every candidate at the current point are computed once
/// per point and then updated alongside the candidates: adding c·g* adds
/// c times its table, and multiplying g* by (X − x) shifts its table by one
/// in the X order.
///
/// Leading weighted degrees never decrease, and the answer has weighted
/// degree at most `max_wdeg`, so candidates beyond it are dropped.
fn interpolate(
    f: &Field,
    points: &[(FieldElement, FieldElement)],
    s: usize,
    w: usize,
    y_degree: usize,
    max_wdeg: usize,
) -> Result<BiPoly, FieldError> {
    let mut g: Vec<BiPoly> = (0..=y_degree)
        .map(|j| {
            let mut q = vec![Poly::zero(); y_degree + 1];
            q[j] = Poly::one();
            q
        })
        .collect();
    let mut lead: Vec<(isize, usize)> = g.iter().map(|q| leading(q, w)).collect();
    let mut live: Vec<usize> = (0..g.len()).filter(|&j| lead[j].0 <= max_wdeg as isize).collect();
    let mut scratch = Vec::with_capacity(s);
    for &(x, y) in points {
        let mut tables: Vec<Vec<FieldElement>> = vec![Vec::new(); g.len()];
        for &j in &live {
            tables[j] = hasse_table(f, &g[j], x, y, s, &mut scratch);
        }
        for b in 0..s {
            for a in 0..s - b {
                let idx = b * s + a;
                let Some(star) = live
                    .iter()
                    .copied()
                    .filter(|&j| !tables[j][idx].is_zero())
                    .min_by_key(|&j| lead[j])
                else {
                    continue;
                };
                let pivot = std::mem::take(&mut g[star]);
                let pivot_table = std::mem::take(&mut tables[star]);
                let inv = f.inv(pivot_table[idx])?;
                for &j in live.iter().filter(|&&j| j != star) {
                    let dj = tables[j][idx];
                    if dj.is_zero() {
                        continue;
                    }
                    let c = f.mul(dj, inv);
                    for (t, p) in g[j].iter_mut().zip(&pivot) {
                        t.add_scaled_assign(f, p, c);
                    }
                    f.axpy(&mut tables[j], &pivot_table, c);
                    lead[j] = leading(&g[j], w);
                }
                g[star] = pivot;
                tables[star] = pivot_table;
                for ql in g[star].iter_mut() {
                    ql.mul_linear(f, x);
                }
                let t = &mut tables[star];
                for bb in 0..s {
                    for aa in (1..s - bb).rev() {
                        t[bb * s + aa] = t[bb * s + aa - 1];
                    }
                    t[bb * s] = FieldElement::ZERO;
                }
                lead[star] = leading(&g[star], w);
                if lead[star].0 > max_wdeg as isize {
                    live.retain(|&j| j != star);
                }
            }
        }
    }
    let pool = if live.is_empty() { (0..g.len()).collect() } else { live };
    let best = pool.into_iter().min_by_key(|&j| lead[j]).expect("at least one polynomial");
    Ok(g.swap_remove(best))
}

fn strip_x(q: &mut BiPoly) {
    let m = q
        .iter()
        .filter_map(|p| p.coeffs().iter().position(|c| !c.is_zero()))
        .min()
        .unwrap_or(0);
    if m > 0 {
        for p in q.iter_mut() {
            if !p.is_zero() {
                *p = Poly::from_coeffs(p.coeffs()[m..].to_vec());
            }
        }
    }
}

fn univariate_roots(f: &Field, p: &Poly) -> Result<Vec<FieldElement>, FieldError> {
    match p.degree() {
        None | Some(0) => Ok(Vec::new()),
        Some(1) => Ok(vec![f.div(p.coeff(0), p.coeff(1))?]),
        Some(_) => Ok(p.roots(f)),
    }
}

// Q(X, XY + γ): the Y^i coefficient is X^i Σ_{l ≥ i} C(l, i) γ^(l−i) q_l.
fn substitute(f: &Field, q: &BiPoly, gamma: FieldElement) -> BiPoly {
    let top = q.len();
    let mut pw = vec![FieldElement::ONE; top];
    for i in 1..top {
        pw[i] = f.mul(pw[i - 1], gamma);
    }
    (0..top)
        .map(|i| {
            let mut acc = Poly::zero();
            for l in i..top {
                if l & i == i && !q[l].is_zero() && !pw[l - i].is_zero() {
                    acc = acc.add(&q[l].scale(f, pw[l - i]));
                }
            }
            acc.shift(i)
        })
        .collect()
}

/// All f with deg f < k and Q(X, f(X)) = 0 (Roth–Ruckenstein).
fn y_roots(f: &Field, q: BiPoly, k: usize) -> Result<Vec<Poly>, FieldError> {
    let mut out = Vec::new();
    if q.len() <= 2 || q[2..].iter().all(Poly::is_zero) {
        // Linear in Y: the only candidate is q0 / q1.
        if q.len() >= 2 && !q[1].is_zero() {
            let (quot, rem) = q[0].div_rem(f, &q[1])?;
            if rem.is_zero() && quot.degree_or_neg() < k as isize {
                out.push(quot);
            }
        }
        return Ok(out);
    }
    let mut stack: Vec<(BiPoly, Vec<FieldElement>)> = vec![(q, Vec::new())];
    while let Some((mut q, prefix)) = stack.pop() {
        strip_x(&mut q);
        let p0 = Poly::from_coeffs(q.iter().map(|p| p.coeff(0)).collect());
        for gamma in univariate_roots(f, &p0)? {
            let mut next = prefix.clone();
            next.push(gamma);
            if next.len() == k {
                out.push(Poly::from_coeffs(next));
            } else {
                stack.push((substitute(f, &q, gamma), next));
            }
        }
    }
    Ok(out)
}

/// List decoding with multiplicity `s`: every polynomial of degree < k that
/// agrees with at least the radius of [`gs_parameters`] points, sorted by
/// coefficients. Abscissae must be distinct.
pub fn decode_gs(
    field: &Field,
    points: &[(FieldElement, FieldElement)],
    k: usize,
    s: u32,
) -> Result<Vec<Poly>, DecodeError> {
    let params = gs_parameters(points.len(), k, s)?;
    let mut xs: Vec<u16> = points.iter().map(|p| p.0.value()).collect();
    xs.sort_unstable();
    if let Some(w) = xs.windows(2).find(|w| w[0] == w[1]) {
        return Err(FieldError::DuplicateAbscissa(FieldElement::new(w[0])).into());
    }
    if points.len() < params.radius {
        return Ok(Vec::new());
    }
    let mut cands = if k == 1 {
        points.iter().map(|&(_, y)| Poly::constant(y)).collect()
    } else {
        let q = interpolate(field, points, s as usize, k - 1, params.y_degree, params.weighted_degree)?;
        y_roots(field, q, k)?
    };
    cands.retain(|p| {
        points.iter().filter(|&&(x, y)| p.eval(field, x) == y).count() >= params.radius
    });
    cands.sort_by(|a, b| {
        let av: Vec<u16> = a.coeffs().iter().map(|c| c.value()).collect();
        let bv: Vec<u16> = b.coeffs().iter().map(|c| c.value()).collect();
        av.cmp(&bv)
    });
    cands.dedup();
    Ok(cands)
}
