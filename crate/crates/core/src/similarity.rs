//! Cosine similarity and attribute-set similarity shared by every metric.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::vector::{Vector, EPS_NORM};

/// Cosine similarity clamped to `[-1, 1]`.
pub fn cosine(u: &Vector, v: &Vector) -> Result<f64> {
    v.check_dim(u.dim())?;
    let nu = u.norm();
    let nv = v.norm();
    if nu <= EPS_NORM || nv <= EPS_NORM {
        return Err(Error::ZeroVector);
    }
    Ok((u.dot(v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Mean cosine similarity of `w` to every member of `attributes`.
pub fn set_similarity(w: &Vector, attributes: &[Vector]) -> Result<f64> {
    if attributes.is_empty() {
        return Err(Error::EmptyAttributeSet);
    }
    let mut sum = 0.0;
    for a in attributes {
        sum += cosine(w, a)?;
    }
    Ok(sum / attributes.len() as f64)
}

/// Mean of the unit-normalized members of an attribute set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeMean {
    pub vector: Vector,
    pub source_size: usize,
}

impl AttributeMean {
    pub fn norm(&self) -> f64 {
        self.vector.norm()
    }
}

/// Averages the normalized attribute vectors. Inputs need not be unit length.
pub fn attribute_mean(attributes: &[Vector]) -> Result<AttributeMean> {
    let first = attributes.first().ok_or(Error::EmptyAttributeSet)?;
    let mut acc = Vector::zeros(first.dim());
    for a in attributes {
        a.check_dim(first.dim())?;
        acc = acc.add_scaled(1.0, &a.normalized()?);
    }
    let mean = acc.scale(1.0 / attributes.len() as f64);
    if mean.norm() <= EPS_NORM {
        return Err(Error::DegenerateMean);
    }
    Ok(AttributeMean {
        vector: mean,
        source_size: attributes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> Vector {
        Vector::from_slice(c)
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(cosine(&v(&[2.0, 0.0]), &v(&[1.0, 0.0])).unwrap(), 1.0);
        let c = cosine(&v(&[1.0, 1.0]), &v(&[1.0, 0.0])).unwrap();
        assert!((c - 0.7071067811865475).abs() < 1e-15);
    }

    #[test]
    fn cosine_zero_and_dim_errors() {
        assert!(matches!(
            cosine(&v(&[0.0, 0.0]), &v(&[1.0, 0.0])),
            Err(Error::ZeroVector)
        ));
        assert!(matches!(
            cosine(&v(&[1e-13, 0.0]), &v(&[1.0, 0.0])),
            Err(Error::ZeroVector)
        ));
        assert!(matches!(
            cosine(&v(&[1.0]), &v(&[1.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn set_similarity_examples() {
        let a = [v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert_eq!(set_similarity(&v(&[1.0, 0.0]), &a).unwrap(), 0.5);
        assert_eq!(
            set_similarity(&v(&[0.0, 0.0, 1.0]), &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]).unwrap(),
            0.0
        );
        let s = set_similarity(&v(&[1.0, 1.0]), &a).unwrap();
        assert!((s - 0.7071067811865475).abs() < 1e-15);
        assert!(matches!(
            set_similarity(&v(&[1.0, 0.0]), &[]),
            Err(Error::EmptyAttributeSet)
        ));
    }

    #[test]
    fn attribute_mean_examples() {
        let m = attribute_mean(&[v(&[1.0, 0.0])]).unwrap();
        assert_eq!(m.vector.as_slice(), &[1.0, 0.0]);
        assert!(matches!(
            attribute_mean(&[v(&[1.0, 0.0]), v(&[-1.0, 0.0])]),
            Err(Error::DegenerateMean)
        ));
        let m = attribute_mean(&[v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        assert_eq!(m.vector.as_slice(), &[0.5, 0.5]);
        assert_eq!(m.source_size, 2);
        // raw (non-unit) inputs are normalized first
        let m = attribute_mean(&[v(&[5.0, 0.0]), v(&[0.0, 0.1])]).unwrap();
        assert_eq!(m.vector.as_slice(), &[0.5, 0.5]);
    }

    fn vec_strategy(dim: usize) -> impl Strategy<Value = Vector> {
        prop::collection::vec(-10.0f64..10.0, dim)
            .prop_filter("nonzero", |c| c.iter().map(|x| x * x).sum::<f64>() > 1e-6)
            .prop_map(|c| Vector::from_slice(&c))
    }

    proptest! {
        #[test]
        fn cosine_scale_invariant_and_symmetric(
            (u, w) in (2usize..8).prop_flat_map(|d| (vec_strategy(d), vec_strategy(d))),
            alpha in 0.01f64..100.0,
            beta in 0.01f64..100.0,
        ) {
            let c = cosine(&u, &w).unwrap();
            prop_assert!((c - cosine(&u.scale(alpha), &w.scale(beta)).unwrap()).abs() < 1e-12);
            prop_assert_eq!(c, cosine(&w, &u).unwrap());
            prop_assert!((-1.0..=1.0).contains(&c));
        }

        #[test]
        fn set_similarity_equals_inner_form_with_mean(
            (w, attrs) in (2usize..8).prop_flat_map(|d| (vec_strategy(d), prop::collection::vec(vec_strategy(d), 1..6))),
        ) {
            let unit: Vec<Vector> = attrs.iter().map(|a| a.normalized().unwrap()).collect();
            let Ok(mean) = attribute_mean(&unit) else { return Ok(()); };
            let inner = w.normalized().unwrap().dot(&mean.vector);
            prop_assert!((set_similarity(&w, &unit).unwrap() - inner).abs() < 1e-12);
            prop_assert!(mean.norm() <= 1.0 + 1e-12);
        }
    }
}
