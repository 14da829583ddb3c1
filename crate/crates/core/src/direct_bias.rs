//! Bias directions from defining sets and the Direct Bias score.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::similarity::cosine;
use crate::vector::{common_dim, Vector, EPS_NORM};

/// Relative gap between the top two singular values below which the leading
/// direction is reported as ambiguous.
pub const SPECTRUM_TIE_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionMethod {
    Pca,
    MeanDirection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubspaceWarning {
    /// Fewer than `k` non-null directions exist.
    Truncated { requested: usize, rank: usize },
    /// The leading singular values are tied to within [`SPECTRUM_TIE_REL`].
    DegenerateSpectrum { top: f64, second: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasSubspace {
    /// Orthonormal directions, strongest first.
    pub basis: Vec<Vector>,
    /// Variance of the stacked difference rows along each basis vector.
    pub explained_variance: Vec<f64>,
    pub method: DirectionMethod,
    pub warnings: Vec<SubspaceWarning>,
}

impl BiasSubspace {
    pub fn direction(&self) -> &Vector {
        &self.basis[0]
    }
}

/// Flips `v` so its first component with magnitude above 1e-12 is positive.
pub fn canonical_sign(v: Vector) -> Vector {
    match v.as_slice().iter().find(|c| c.abs() > EPS_NORM) {
        Some(c) if *c < 0.0 => -&v,
        _ => v,
    }
}

/// Stacks `w - mean(D_i)` for every member of every defining set.
pub fn difference_rows(defining_sets: &[Vec<Vector>]) -> Result<Vec<Vector>> {
    if defining_sets.is_empty() {
        return Err(Error::InvalidParameters("no defining sets given".into()));
    }
    common_dim(defining_sets.iter().flatten())?;
    let mut rows = Vec::new();
    for (index, set) in defining_sets.iter().enumerate() {
        if set.len() < 2 {
            return Err(Error::InvalidParameters(format!(
                "defining set {index} has fewer than 2 members"
            )));
        }
        let mut mu = Vector::zeros(set[0].dim());
        for w in set {
            mu = mu.add_scaled(1.0 / set.len() as f64, w);
        }
        let diffs: Vec<Vector> = set.iter().map(|w| w - &mu).collect();
        if diffs.iter().all(|d| d.norm() <= EPS_NORM) {
            return Err(Error::DegenerateDefiningSet { index });
        }
        rows.extend(diffs);
    }
    Ok(rows)
}

/// Top-`k` principal directions of the stacked per-set differences.
///
/// The rows are not re-centred globally; each set's differences already sum
/// to zero. `explained_variance[i] = sigma_i^2 / rows`.
pub fn bias_direction_pca(defining_sets: &[Vec<Vector>], k: usize) -> Result<BiasSubspace> {
    let rows = difference_rows(defining_sets)?;
    let dim = rows[0].dim();
    if k == 0 || k > dim {
        return Err(Error::InvalidParameters(format!("k must be in 1..={dim}, got {k}")));
    }
    let matrix = DMatrix::from_fn(rows.len(), dim, |r, c| rows[r][c]);
    let svd = matrix.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    // stable: equal singular values keep the order the decomposition produced
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma_max = svd.singular_values[order[0]];
    let rank = order
        .iter()
        .filter(|&&i| svd.singular_values[i] > 1e-12 * sigma_max.max(1.0))
        .count();

    let mut warnings = Vec::new();
    if rank < k {
        log::warn!("requested {k} bias directions but the difference matrix has rank {rank}");
        warnings.push(SubspaceWarning::Truncated { requested: k, rank });
    }
    if order.len() > 1 {
        let (top, second) = (
            svd.singular_values[order[0]],
            svd.singular_values[order[1]],
        );
        if top - second < SPECTRUM_TIE_REL * top {
            log::warn!("leading singular values are tied ({top} vs {second})");
            warnings.push(SubspaceWarning::DegenerateSpectrum { top, second });
        }
    }

    let keep = k.min(rank);
    let n_rows = rows.len() as f64;
    let mut basis = Vec::with_capacity(keep);
    let mut explained_variance = Vec::with_capacity(keep);
    for &i in order.iter().take(keep) {
        let row: Vec<f64> = v_t.row(i).iter().copied().collect();
        basis.push(canonical_sign(Vector::new(row)?.normalized()?));
        explained_variance.push(svd.singular_values[i].powi(2) / n_rows);
    }
    Ok(BiasSubspace {
        basis,
        explained_variance,
        method: DirectionMethod::Pca,
        warnings,
    })
}

/// First principal direction by power iteration on `M^T M`.
///
/// Tolerance 1e-12 on successive iterates, at most 10,000 steps.
pub fn first_direction_power_iteration(defining_sets: &[Vec<Vector>]) -> Result<Vector> {
    let rows = difference_rows(defining_sets)?;
    let dim = rows[0].dim();
    let gram = |v: &Vector| {
        let mut out = Vector::zeros(dim);
        for r in &rows {
            out = out.add_scaled(r.dot(v), r);
        }
        out
    };
    // deterministic start, not orthogonal to generic directions
    let mut v = Vector::new((0..dim).map(|i| 1.0 + 0.1 * i as f64).collect())?.normalized()?;
    for _ in 0..10_000 {
        let next = match gram(&v).normalized() {
            Ok(n) => n,
            // start happened to be in the null space
            Err(_) => Vector::basis(dim, 0),
        };
        let delta = (&next - &v).norm().min((&next + &v).norm());
        v = next;
        if delta < 1e-12 {
            break;
        }
    }
    Ok(canonical_sign(v))
}

/// Unit-normalized mean of the normalized pair differences `u - v`.
pub fn bias_direction_mean(pairs: &[(Vector, Vector)]) -> Result<Vector> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameters("no pairs given".into()));
    }
    let dim = pairs[0].0.dim();
    let mut acc = Vector::zeros(dim);
    for (u, v) in pairs {
        u.check_dim(dim)?;
        v.check_dim(dim)?;
        acc = acc.add_scaled(1.0, &(u - v).normalized()?);
    }
    let mean = acc.scale(1.0 / pairs.len() as f64);
    mean.normalized().map_err(|_| Error::DegenerateMean)
}

/// Mean of `|cos(w, g)|^c` over the neutral words.
pub fn direct_bias(neutral: &[Vector], g: &Vector, c: f64) -> Result<f64> {
    let per_word = direct_bias_per_word(neutral, g, c)?;
    Ok(per_word.iter().sum::<f64>() / per_word.len() as f64)
}

pub fn direct_bias_per_word(neutral: &[Vector], g: &Vector, c: f64) -> Result<Vec<f64>> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::NonPositiveStrictness(c));
    }
    if neutral.is_empty() {
        return Err(Error::EmptyTargetSet);
    }
    if g.norm() <= EPS_NORM {
        return Err(Error::ZeroVector);
    }
    neutral
        .iter()
        .map(|w| Ok(cosine(w, g)?.abs().powf(c)))
        .collect()
}

/// Non-standard multi-direction variant: per word, the norm of the projection
/// of `w/|w|` onto the orthonormal `basis`, raised to `c`, then averaged.
/// With a single basis vector this equals [`direct_bias`].
pub fn direct_bias_subspace_norm(neutral: &[Vector], basis: &[Vector], c: f64) -> Result<f64> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::NonPositiveStrictness(c));
    }
    if neutral.is_empty() {
        return Err(Error::EmptyTargetSet);
    }
    if basis.is_empty() {
        return Err(Error::InvalidParameters("empty basis".into()));
    }
    let mut sum = 0.0;
    for w in neutral {
        let u = w.normalized()?;
        let proj: f64 = basis.iter().map(|b| u.dot(b).powi(2)).sum::<f64>().sqrt();
        sum += proj.min(1.0).powf(c);
    }
    Ok(sum / neutral.len() as f64)
}
