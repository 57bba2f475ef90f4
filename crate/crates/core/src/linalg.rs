//! Small dense-vector helpers and the power-iteration eigensolver used for
//! principal components.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scaled(a: &[f64], alpha: f64) -> Vec<f64> {
    a.iter().map(|x| x * alpha).collect()
}

/// Returns `None` for a vector whose norm is zero or not finite.
pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n > 0.0 && n.is_finite() {
        Some(scaled(a, 1.0 / n))
    } else {
        None
    }
}

pub fn mean_of<'a>(rows: impl IntoIterator<Item = &'a [f64]>, dim: usize) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    let mut n = 0usize;
    for r in rows {
        axpy(1.0, r, &mut acc);
        n += 1;
    }
    if n > 0 {
        acc.iter_mut().for_each(|v| *v /= n as f64);
    }
    acc
}

/// Settings for [`top_eigenpairs`].
#[derive(Clone, Copy, Debug)]
pub struct PowerIterationConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerIterationConfig {
    fn default() -> Self {
        PowerIterationConfig {
            tolerance: 1e-10,
            max_iterations: 10_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Leading eigenpairs of the scatter matrix `RᵀR` of the given rows, found
/// by power iteration with deflation. The matrix is never formed; each step
/// costs two passes over the rows.
///
/// Every component is iterated from the normalized all-ones vector and from a
/// fixed pseudo-random vector, keeping whichever reaches the larger Rayleigh
/// quotient. The second start covers an all-ones vector that happens to be
/// orthogonal to the leading eigenvector.
pub fn top_eigenpairs(
    rows: &[Vec<f64>],
    dim: usize,
    k: usize,
    config: PowerIterationConfig,
) -> Vec<EigenPair> {
    let mut found: Vec<EigenPair> = Vec::with_capacity(k);
    let ones = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1ec);
    let alt: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();

    for _ in 0..k.min(dim) {
        let a = iterate(rows, &found, &ones, config);
        let b = iterate(rows, &found, &alt, config);
        let best = match (a, b) {
            (Some(a), Some(b)) => {
                if b.value > a.value * (1.0 + 1e-9) + 1e-300 {
                    b
                } else {
                    a
                }
            }
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => break,
        };
        found.push(best);
    }
    found
}

fn apply(rows: &[Vec<f64>], deflate: &[EigenPair], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for r in rows {
        let c = dot(r, v);
        if c != 0.0 {
            axpy(c, r, &mut out);
        }
    }
    for p in deflate {
        let c = p.value * dot(&p.vector, v);
        axpy(-c, &p.vector, &mut out);
    }
    out
}

fn orthogonalize_against(v: &mut [f64], basis: &[EigenPair]) {
    for p in basis {
        let c = dot(&p.vector, v);
        axpy(-c, &p.vector, v);
    }
}

fn iterate(
    rows: &[Vec<f64>],
    deflate: &[EigenPair],
    start: &[f64],
    config: PowerIterationConfig,
) -> Option<EigenPair> {
    let mut v = start.to_vec();
    orthogonalize_against(&mut v, deflate);
    let mut v = normalized(&v)?;
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=config.max_iterations {
        iterations = it;
        let mut w = apply(rows, deflate, &v);
        orthogonalize_against(&mut w, deflate);
        let Some(w) = normalized(&w) else {
            // v lies in the null space of the deflated operator
            return None;
        };
        let delta = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = w;
        if delta < config.tolerance {
            converged = true;
            break;
        }
    }
    let value = dot(&v, &apply(rows, deflate, &v));
    if !converged {
        log::warn!(
            "power iteration stopped after {iterations} iterations without reaching tolerance {}",
            config.tolerance
        );
    }
    Some(EigenPair {
        value,
        vector: v,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_scatter() {
        // rows along e1 only -> top eigenvector e1, value = sum of squares
        let rows = vec![vec![0.0, 2.0, 0.0], vec![0.0, -1.0, 0.0]];
        let pairs = top_eigenpairs(&rows, 3, 1, PowerIterationConfig::default());
        assert_eq!(pairs.len(), 1);
        assert!((pairs[0].value - 5.0).abs() < 1e-12);
        assert!((pairs[0].vector[1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_ones_start_orthogonal_to_top() {
        // top eigenvector (1,-1)/sqrt2 is orthogonal to the all-ones start
        let rows = vec![vec![1.0, -1.0], vec![-2.0, 2.0], vec![0.1, 0.1]];
        let pairs = top_eigenpairs(&rows, 2, 1, PowerIterationConfig::default());
        let v = &pairs[0].vector;
        assert!((v[0] * std::f64::consts::FRAC_1_SQRT_2 - v[1] * std::f64::consts::FRAC_1_SQRT_2).abs() > 0.999);
        assert!((pairs[0].value - 10.0).abs() < 1e-9);
    }

    #[test]
    fn deflation_finds_second_component() {
        let rows = vec![
            vec![3.0, 0.0, 0.0],
            vec![-3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0],
        ];
        let pairs = top_eigenpairs(&rows, 3, 2, PowerIterationConfig::default());
        assert!((pairs[0].value - 18.0).abs() < 1e-9);
        assert!((pairs[1].value - 2.0).abs() < 1e-9);
        assert!(dot(&pairs[0].vector, &pairs[1].vector).abs() < 1e-9);
    }

    #[test]
    fn zero_rows_yield_nothing() {
        let rows = vec![vec![0.0; 4]; 3];
        assert!(top_eigenpairs(&rows, 4, 1, PowerIterationConfig::default()).is_empty());
    }
}
