//! Executable witnesses, bound checkers and supremum searches.

pub mod bounds;
pub mod search;
pub mod suite;
pub mod witness;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::vector::Vector;

/// Gaussian vector; nonzero with probability one.
pub fn random_vector<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let c: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let v = Vector::from_slice(&c);
        if v.norm() > 1e-6 {
            return v;
        }
    }
}

pub fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    random_vector(rng, dim).normalized().expect("nonzero by construction")
}

/// Uniformly distributed orthogonal matrix (QR of a Gaussian matrix with the
/// signs of R's diagonal folded into Q), as rows.
pub fn random_orthogonal<R: Rng>(rng: &mut R, dim: usize) -> Vec<Vec<f64>> {
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    (0..dim).map(|i| q.row(i).iter().copied().collect()).collect()
}
