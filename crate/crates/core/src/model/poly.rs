//! Monomial bookkeeping shared by the corpus and the local polynomial bases.

/// Exponents of all monomials of total degree `< order` in `d` variables, graded
/// lexicographic: by total degree, then by decreasing power of the first variable.
pub fn monomial_exponents(d: usize, order: usize) -> Vec<[u32; 2]> {
    let mut out = Vec::new();
    for deg in 0..order as u32 {
        if d == 1 {
            out.push([deg, 0]);
        } else {
            for a in (0..=deg).rev() {
                out.push([a, deg - a]);
            }
        }
    }
    out
}

/// `C(order - 1 + d, d)`, the dimension of polynomials of degree `< order`.
pub fn space_dimension(d: usize, order: usize) -> usize {
    if d == 1 {
        order
    } else {
        order * (order + 1) / 2
    }
}

pub fn monomial(e: [u32; 2], x: [f64; 2]) -> f64 {
    x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32)
}
