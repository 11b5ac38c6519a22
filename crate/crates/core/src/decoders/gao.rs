use crate::gf2e::{extended_euclid, lagrange_interpolate, poly_from_roots, Field, FieldElement, FieldError, Poly};

/// Gao's Reed–Solomon decoder.
///
/// Interpolates g1 through all u points, runs the extended Euclidean
/// algorithm on (∏(X − x_i), g1) until the remainder r has degree below
/// ⌈(u+k)/2⌉ and returns r / t when that division is exact with quotient
/// degree < k. A returned polynomial agrees with at least ⌈(u+k)/2⌉ points,
/// and such a polynomial is always found when it exists.
pub fn decode_gao(
    field: &Field,
    points: &[(FieldElement, FieldElement)],
    k: usize,
) -> Result<Option<Poly>, FieldError> {
    let u = points.len();
    if k == 0 || u < k {
        return Ok(None);
    }
    let g1 = lagrange_interpolate(field, points)?;
    let xs: Vec<FieldElement> = points.iter().map(|p| p.0).collect();
    let g0 = poly_from_roots(field, &xs);
    let row = extended_euclid(field, &g0, &g1, (u + k).div_ceil(2))?;
    if row.t.is_zero() {
        return Ok(None);
    }
    let (f, rem) = row.r.div_rem(field, &row.t)?;
    if !rem.is_zero() || f.degree_or_neg() >= k as isize {
        return Ok(None);
    }
    Ok(Some(f))
}
