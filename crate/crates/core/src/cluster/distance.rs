use crate::{Error, Matrix, Result, Scalar};

#[inline]
pub(crate) fn dot<T: Scalar, U: Scalar>(u: &[T], v: &[U]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a.as_f64() * b.as_f64()).sum()
}

#[inline]
pub(crate) fn norm<T: Scalar>(u: &[T]) -> f64 {
    dot(u, u).sqrt()
}

/// Cosine distance from precomputed norms, clamped into `[0, 2]`.
#[inline]
pub(crate) fn cosine_with_norms<T: Scalar, U: Scalar>(u: &[T], nu: f64, v: &[U], nv: f64) -> f64 {
    (1.0 - dot(u, v) / (nu * nv)).clamp(0.0, 2.0)
}

/// `1 - u·v / (|u||v|)`, in `[0, 2]`.
pub fn cosine_distance<T: Scalar>(u: &[T], v: &[T]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(u.len(), v.len()));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(cosine_with_norms(u, nu, v, nv))
}

/// Scales every row to unit L2 norm.
pub fn normalize_rows<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let mut data = Vec::with_capacity(m.as_slice().len());
    for (i, row) in m.iter_rows().enumerate() {
        let n = norm(row);
        if n == 0.0 {
            return Err(Error::ZeroRow(i));
        }
        data.extend(row.iter().map(|v| T::from_f64_lossy(v.as_f64() / n)));
    }
    Ok(Matrix::from_parts_unchecked(m.rows(), m.cols(), data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_values() {
        assert_eq!(cosine_distance(&[1.0f64, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(cosine_distance(&[1.0f64, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        let d = cosine_distance(&[1.0f64, 1.0], &[1.0, 0.0]).unwrap();
        assert!((d - (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-15);
        assert!((d - 0.2928932).abs() < 1e-7);
        assert_eq!(cosine_distance(&[1.0f64, 0.0], &[-2.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(
            cosine_distance(&[0.0f32, 0.0], &[1.0, 0.0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn normalize_examples() {
        let m = Matrix::from_rows(&[[3.0f32, 4.0], [0.6, 0.8]]).unwrap();
        let n = normalize_rows(&m).unwrap();
        assert!((n.row(0)[0] - 0.6).abs() < 1e-7 && (n.row(0)[1] - 0.8).abs() < 1e-7);
        assert!((n.row(1)[0] - 0.6).abs() < 1e-7 && (n.row(1)[1] - 0.8).abs() < 1e-7);

        let z = Matrix::from_rows(&[[1.0f32, 0.0], [0.0, 0.0]]).unwrap();
        assert!(matches!(normalize_rows(&z), Err(Error::ZeroRow(1))));
    }

    proptest! {
        #[test]
        fn normalized_rows_are_unit(v in proptest::collection::vec(-1e3f32..1e3, 8)) {
            prop_assume!(v.iter().any(|x| x.abs() > 1e-3));
            let m = Matrix::from_vec(1, 8, v).unwrap();
            let n = normalize_rows(&m).unwrap();
            prop_assert!((norm(n.row(0)) - 1.0).abs() < 1e-6);
        }

        #[test]
        fn symmetric_and_scale_invariant(
            u in proptest::collection::vec(-10f64..10.0, 5),
            v in proptest::collection::vec(-10f64..10.0, 5),
            s in 0.1f64..100.0,
        ) {
            prop_assume!(norm(&u) > 1e-6 && norm(&v) > 1e-6);
            let d = cosine_distance(&u, &v).unwrap();
            prop_assert!((0.0..=2.0).contains(&d));
            prop_assert!((d - cosine_distance(&v, &u).unwrap()).abs() < 1e-12);
            let scaled: Vec<f64> = u.iter().map(|x| x * s).collect();
            prop_assert!(cosine_distance(&u, &scaled).unwrap() < 1e-12);
        }
    }
}
