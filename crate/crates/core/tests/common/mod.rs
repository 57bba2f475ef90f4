//! Naive reference implementations used as test oracles. They work straight
//! from the definitions (full sorts, explicit sums, dense eigen solvers) and
//! share no code with the library beyond reading vectors out of a space.

#![allow(dead_code)]

use std::cmp::Ordering;

use gendebias::EmbeddingSpace;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn naive_cos(a: &[f64], b: &[f64]) -> f64 {
    let mut ab = 0.0;
    let mut aa = 0.0;
    let mut bb = 0.0;
    for i in 0..a.len() {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    ab / (aa.sqrt() * bb.sqrt())
}

fn vec_of<'a>(space: &'a EmbeddingSpace, w: &str) -> &'a [f64] {
    space.vector(w).unwrap_or_else(|| panic!("oracle: missing {w}"))
}

pub fn naive_assoc(space: &EmbeddingSpace, w: &str, a: &[String], b: &[String]) -> f64 {
    let v = vec_of(space, w);
    let mut sa = 0.0;
    for x in a {
        sa += naive_cos(v, vec_of(space, x));
    }
    let mut sb = 0.0;
    for x in b {
        sb += naive_cos(v, vec_of(space, x));
    }
    sa / a.len() as f64 - sb / b.len() as f64
}

pub fn naive_weat(space: &EmbeddingSpace, x: &[String], y: &[String], a: &[String], b: &[String]) -> f64 {
    let mut total = 0.0;
    for w in x {
        total += naive_assoc(space, w, a, b);
    }
    for w in y {
        total -= naive_assoc(space, w, a, b);
    }
    total
}

pub fn naive_mweat_pair(space: &EmbeddingSpace, m: &str, f: &str, a: &[String], b: &[String], signed: bool) -> f64 {
    let d = naive_assoc(space, m, a, b).abs() - naive_assoc(space, f, a, b).abs();
    if signed {
        d
    } else {
        d.abs()
    }
}

pub fn naive_aggregate(space: &EmbeddingSpace, x: &[String], y: &[String], a: &[String], b: &[String]) -> f64 {
    let sx: f64 = x.iter().map(|w| naive_assoc(space, w, a, b)).sum();
    let sy: f64 = y.iter().map(|w| naive_assoc(space, w, a, b)).sum();
    (sx.abs() - sy.abs()).abs()
}

/// Sorts every non-excluded word by descending cosine, ties by word.
pub fn full_sort(space: &EmbeddingSpace, query: &[f64], exclude: &[&str]) -> Vec<(String, f64)> {
    let mut all: Vec<(String, f64)> = space
        .iter()
        .filter(|(w, _)| !exclude.contains(w))
        .map(|(w, v)| (w.to_string(), naive_cos(query, v)))
        .collect();
    all.sort_by(|p, q| {
        q.1.partial_cmp(&p.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| p.0.cmp(&q.0))
    });
    all
}

pub fn sorted_rank(space: &EmbeddingSpace, query: &[f64], gold: &str, exclude: &[&str]) -> usize {
    full_sort(space, query, exclude)
        .iter()
        .position(|(w, _)| w == gold)
        .expect("gold in candidates")
        + 1
}

pub fn naive_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

/// Rank by counting: `1 + #smaller + (#equal − 1) / 2`.
pub fn naive_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|v| {
            let less = x.iter().filter(|u| *u < v).count() as f64;
            let eq = x.iter().filter(|u| *u == v).count() as f64;
            1.0 + less + (eq - 1.0) / 2.0
        })
        .collect()
}

pub fn naive_spearman(x: &[f64], y: &[f64]) -> f64 {
    naive_pearson(&naive_ranks(x), &naive_ranks(y))
}

/// `#{patterns with stat ≥ observed} / 2^n` over every swap pattern,
/// identity included.
pub fn enumerate_sign_flips(sx: &[f64], sy: &[f64]) -> f64 {
    let n = sx.len();
    let stat = |u: f64, v: f64| (u.abs() - v.abs()).abs();
    let observed = stat(sx.iter().sum(), sy.iter().sum());
    let mut hits = 0;
    for mask in 0..(1u32 << n) {
        let (mut u, mut v) = (0.0, 0.0);
        for i in 0..n {
            if mask & (1 << i) != 0 {
                u += sy[i];
                v += sx[i];
            } else {
                u += sx[i];
                v += sy[i];
            }
        }
        if stat(u, v) >= observed - 1e-12 * observed.max(1.0) {
            hits += 1;
        }
    }
    hits as f64 / (1u64 << n) as f64
}

/// Top eigenvector of the centered scatter of `rows`, by dense eigensolver.
pub fn dense_top_component(rows: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let dim = rows[0].len();
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..dim).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let mut c = DMatrix::<f64>::zeros(dim, dim);
    for r in rows {
        let d = DVector::from_iterator(dim, r.iter().zip(&mean).map(|(a, m)| a - m));
        c += &d * d.transpose();
    }
    let trace = c.trace();
    let eig = SymmetricEigen::new(c);
    let (i, val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    (eig.eigenvectors.column(i).iter().copied().collect(), val / trace)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

/// `n` Gaussian words named `w000`, `w001`, ...
pub fn random_space(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> EmbeddingSpace {
    let rows: Vec<(String, Vec<f64>)> = (0..n)
        .map(|i| (format!("w{i:03}"), gaussian(rng, dim)))
        .collect();
    EmbeddingSpace::from_rows("t", dim, rows).unwrap()
}

/// Random orthogonal matrix: Q of the QR factorization of a Gaussian matrix,
/// with column signs fixed by R's diagonal.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<f64> {
    let g: DMatrix<f64> = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

pub fn apply(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)] * x[c]).sum())
        .collect()
}

pub fn words(list: &[&str]) -> Vec<String> {
    list.iter().map(|w| w.to_string()).collect()
}

pub fn pick<T: Clone>(rng: &mut ChaCha8Rng, items: &[T], k: usize) -> Vec<T> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    for i in 0..k {
        let j = rng.random_range(i..idx.len());
        idx.swap(i, j);
    }
    idx[..k].iter().map(|&i| items[i].clone()).collect()
}
