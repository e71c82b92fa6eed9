//! Direct Lagrange basis evaluation over `F_p`.

use crate::error::{Error, Result};
use crate::field::FieldElement;

/// `[l_0(at), ..., l_{n-1}(at)]` for the basis on `points`, so that any
/// polynomial `h` of degree `< n` satisfies `h(at) = sum_i l_i(at) h(points[i])`.
pub fn lagrange_basis_at(points: &[FieldElement], at: FieldElement) -> Result<Vec<FieldElement>> {
    let field = at.field();
    points
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let mut num = field.one();
            let mut den = field.one();
            for (j, &xj) in points.iter().enumerate() {
                if i != j {
                    num = num * (at - xj);
                    den = den * (xi - xj);
                }
            }
            den.inv()
                .map(|inv| num * inv)
                .map_err(|_| Error::InvalidParams(format!("repeated interpolation point {xi}")))
        })
        .collect()
}

/// Checks that `points` are pairwise distinct.
pub fn distinct(points: &[FieldElement]) -> bool {
    points
        .iter()
        .enumerate()
        .all(|(i, a)| points[i + 1..].iter().all(|b| a != b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldConfig, FieldRng};

    #[test]
    fn reproduces_random_polynomials() {
        let field = FieldConfig::new(13).unwrap();
        let mut rng = FieldRng::seed_from_u64(0);
        for deg in 0..6 {
            let coeffs: Vec<_> = (0..=deg).map(|_| rng.element(field)).collect();
            let h = |x: FieldElement| coeffs.iter().rev().fold(field.zero(), |acc, &c| acc * x + c);
            let points: Vec<_> = (1..=deg as u64 + 1).map(|v| field.elem(v)).collect();
            let values: Vec<_> = points.iter().map(|&x| h(x)).collect();
            for at in field.elements() {
                let basis = lagrange_basis_at(&points, at).unwrap();
                let got = basis
                    .iter()
                    .zip(&values)
                    .fold(field.zero(), |acc, (&l, &v)| acc + l * v);
                assert_eq!(got, h(at));
            }
        }
    }

    #[test]
    fn repeated_points_rejected() {
        let field = FieldConfig::new(7).unwrap();
        let pts = [field.elem(1), field.elem(8)];
        assert!(!distinct(&pts));
        assert!(lagrange_basis_at(&pts, field.zero()).is_err());
    }
}
