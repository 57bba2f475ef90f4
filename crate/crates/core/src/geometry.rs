//! Semantic and grammatical gender directions.
//!
//! The semantic direction is the leading principal component of
//! (feminine − masculine) differences of gender-definitional pairs. The
//! grammatical direction is a two-class Fisher discriminant between
//! grammatically masculine and feminine nouns. The orthogonalized semantic
//! direction `d_s` removes the grammatical component from the former.
//!
//! Sign convention: positive projections are the feminine side for all three
//! directions. Every vector is unit-normalized before it enters a
//! construction, so rescaling a space does not change the directions.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{BilingualSpace, EmbeddingSpace};
use crate::error::{Error, Result};
use crate::lexicon::{GenderLexicon, GenderPair};
use crate::linalg::{self, dot, normalized, top_eigenpairs, PowerIterationConfig};

/// Largest allowed deviation of a direction from unit norm on input.
const DIRECTION_NORM_TOLERANCE: f64 = 1e-6;

/// `⟨w, d⟩`.
pub fn project(w: &[f64], d: &[f64]) -> Result<f64> {
    if w.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            actual: w.len(),
        });
    }
    Ok(dot(w, d))
}

fn unit_vector(space: &EmbeddingSpace, word: &str) -> Result<Option<Vec<f64>>> {
    match space.vector(word) {
        None => Ok(None),
        Some(v) => normalized(v)
            .map(Some)
            .ok_or_else(|| Error::ZeroVector(word.to_string())),
    }
}

/// (feminine − masculine) differences for the pairs present in `space`.
pub fn pair_differences(space: &EmbeddingSpace, pairs: &[GenderPair]) -> Result<Vec<Vec<f64>>> {
    let mut diffs = Vec::with_capacity(pairs.len());
    for p in pairs {
        match (unit_vector(space, &p.masculine)?, unit_vector(space, &p.feminine)?) {
            (Some(m), Some(f)) => diffs.push(linalg::sub(&f, &m)),
            _ => log::debug!("skipping definitional pair {}/{}", p.masculine, p.feminine),
        }
    }
    Ok(diffs)
}

/// Output of [`semantic_direction`].
#[derive(Clone, Debug)]
pub struct SemanticDirection {
    pub direction: Vec<f64>,
    pub explained_ratio: f64,
    pub pairs_used: usize,
    /// Mean (feminine − masculine) difference; fixes the sign.
    pub mean_difference: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct PcaOptions {
    /// Subtract the mean difference before extracting the component.
    pub center: bool,
    pub power: PowerIterationConfig,
}

impl Default for PcaOptions {
    fn default() -> Self {
        PcaOptions {
            center: true,
            power: PowerIterationConfig::default(),
        }
    }
}

/// Leading principal component of the given pair differences.
pub fn semantic_direction_from_differences(
    diffs: &[Vec<f64>],
    dim: usize,
    options: PcaOptions,
) -> Result<SemanticDirection> {
    if diffs.len() < 2 {
        return Err(Error::Insufficient(format!(
            "semantic direction needs at least 2 definitional pairs in the vocabulary, found {}",
            diffs.len()
        )));
    }
    let mean = linalg::mean_of(diffs.iter().map(Vec::as_slice), dim);
    let rows: Vec<Vec<f64>> = if options.center {
        diffs.iter().map(|d| linalg::sub(d, &mean)).collect()
    } else {
        diffs.to_vec()
    };
    let spread = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));

    let (mut direction, explained_ratio) = if spread <= 1e-12 {
        // every difference is the same vector
        let d = normalized(&mean).ok_or_else(|| {
            Error::Degenerate("all definitional pair differences are zero".into())
        })?;
        (d, 1.0)
    } else {
        let total: f64 = rows.iter().map(|r| dot(r, r)).sum();
        let top = top_eigenpairs(&rows, dim, 1, options.power);
        let top = top
            .into_iter()
            .next()
            .ok_or_else(|| Error::Degenerate("no principal component found".into()))?;
        let ratio = (top.value / total).clamp(0.0, 1.0);
        (top.vector, ratio)
    };
    orient(&mut direction, &mean);
    Ok(SemanticDirection {
        direction,
        explained_ratio,
        pairs_used: diffs.len(),
        mean_difference: mean,
    })
}

/// Semantic gender direction from definitional pairs. Pairs with a word
/// missing from the space are skipped.
pub fn semantic_direction(
    space: &EmbeddingSpace,
    pairs: &[GenderPair],
    options: PcaOptions,
) -> Result<SemanticDirection> {
    let diffs = pair_differences(space, pairs)?;
    semantic_direction_from_differences(&diffs, space.dim(), options)
}

/// Flips `d` so that `⟨reference, d⟩ ≥ 0`. When the reference is orthogonal,
/// the largest-magnitude component is made positive instead.
fn orient(d: &mut [f64], reference: &[f64]) {
    let s = dot(d, reference);
    let flip = if s != 0.0 {
        s < 0.0
    } else {
        d.iter()
            .copied()
            .fold(0.0f64, |best, v| if v.abs() > best.abs() { v } else { best })
            < 0.0
    };
    if flip {
        d.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Diagonal loading for the pooled covariance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Ridge {
    /// `1e-3 * trace(Σ) / dim`
    #[default]
    Auto,
    Fixed(f64),
}

/// A fitted two-class discriminant: project onto `direction` and compare
/// with `threshold`.
#[derive(Clone, Debug, Serialize)]
pub struct LdaModel {
    pub direction: Vec<f64>,
    pub threshold: f64,
    pub ridge: f64,
    pub n_masculine: usize,
    pub n_feminine: usize,
}

impl LdaModel {
    /// True when `v` falls on the feminine side.
    pub fn is_feminine(&self, v: &[f64]) -> bool {
        dot(v, &self.direction) > self.threshold
    }
}

/// Fits the discriminant `(Σ_pooled + εI)⁻¹ (μ_f − μ_m)` on unit vectors.
pub fn fit_lda(masculine: &[Vec<f64>], feminine: &[Vec<f64>], ridge: Ridge) -> Result<LdaModel> {
    let (nm, nf) = (masculine.len(), feminine.len());
    if nm < 2 || nf < 2 {
        return Err(Error::Insufficient(format!(
            "grammatical direction needs at least 2 words per class, have {nm} masculine and {nf} feminine"
        )));
    }
    let dim = masculine[0].len();
    if masculine.iter().chain(feminine).any(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: masculine
                .iter()
                .chain(feminine)
                .map(Vec::len)
                .find(|l| *l != dim)
                .unwrap_or(dim),
        });
    }
    let mu_m = linalg::mean_of(masculine.iter().map(Vec::as_slice), dim);
    let mu_f = linalg::mean_of(feminine.iter().map(Vec::as_slice), dim);

    let mut centered = DMatrix::<f64>::zeros(nm + nf, dim);
    for (r, v) in masculine.iter().enumerate() {
        for c in 0..dim {
            centered[(r, c)] = v[c] - mu_m[c];
        }
    }
    for (r, v) in feminine.iter().enumerate() {
        for c in 0..dim {
            centered[(nm + r, c)] = v[c] - mu_f[c];
        }
    }
    let mut sigma = centered.tr_mul(&centered);
    sigma /= (nm + nf - 2) as f64;
    let eps = match ridge {
        Ridge::Auto => 1e-3 * sigma.trace() / dim as f64,
        Ridge::Fixed(e) if e >= 0.0 && e.is_finite() => e,
        Ridge::Fixed(e) => {
            return Err(Error::InvalidArgument(format!("ridge must be >= 0, got {e}")))
        }
    };
    for i in 0..dim {
        sigma[(i, i)] += eps;
    }
    let chol = sigma.cholesky().ok_or_else(singular)?;
    let pivots = chol.l_dirty().diagonal();
    let (lo, hi) = pivots
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p.abs()), hi.max(p.abs())));
    if lo.is_nan() || lo <= 0.0 || lo * lo <= 1e-13 * hi * hi {
        return Err(singular());
    }
    let rhs = DVector::from_iterator(dim, mu_f.iter().zip(&mu_m).map(|(f, m)| f - m));
    let sol = chol.solve(&rhs);
    let mut direction = normalized(sol.as_slice())
        .ok_or_else(|| Error::Degenerate("class means coincide".into()))?;
    let gap = linalg::sub(&mu_f, &mu_m);
    orient(&mut direction, &gap);
    let threshold = 0.5 * (dot(&mu_m, &direction) + dot(&mu_f, &direction));
    Ok(LdaModel {
        direction,
        threshold,
        ridge: eps,
        n_masculine: nm,
        n_feminine: nf,
    })
}

fn singular() -> Error {
    Error::Degenerate(
        "pooled covariance is singular; use a positive ridge".into(),
    )
}

fn class_vectors(space: &EmbeddingSpace, words: &[String]) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(words.len());
    for w in words {
        if let Some(v) = unit_vector(space, w)? {
            out.push(v);
        }
    }
    Ok(out)
}

/// Grammatical gender direction from masculine and feminine noun lists.
/// Words absent from the space are skipped.
pub fn grammatical_direction(
    space: &EmbeddingSpace,
    masculine: &[String],
    feminine: &[String],
    ridge: Ridge,
) -> Result<LdaModel> {
    let m = class_vectors(space, masculine)?;
    let f = class_vectors(space, feminine)?;
    if m.is_empty() || f.is_empty() {
        return Err(Error::Insufficient(format!(
            "a grammatical class is empty in the vocabulary ({} masculine, {} feminine)",
            m.len(),
            f.len()
        )));
    }
    let want = space.dim() / 10;
    if m.len() < want || f.len() < want {
        log::warn!(
            "few grammatical nouns for {} dimensions: {} masculine, {} feminine",
            space.dim(),
            m.len(),
            f.len()
        );
    }
    fit_lda(&m, &f, ridge)
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossValidation {
    pub folds: usize,
    pub seed: u64,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
}

/// Stratified k-fold accuracy of the midpoint-threshold LDA classifier.
pub fn lda_cross_validation(
    space: &EmbeddingSpace,
    masculine: &[String],
    feminine: &[String],
    folds: usize,
    seed: u64,
    ridge: Ridge,
) -> Result<CrossValidation> {
    let m = class_vectors(space, masculine)?;
    let f = class_vectors(space, feminine)?;
    cross_validate_vectors(&m, &f, folds, seed, ridge)
}

/// [`lda_cross_validation`] on vectors already pulled from a space.
pub fn cross_validate_vectors(
    masculine: &[Vec<f64>],
    feminine: &[Vec<f64>],
    folds: usize,
    seed: u64,
    ridge: Ridge,
) -> Result<CrossValidation> {
    if folds < 2 {
        return Err(Error::InvalidArgument("cross-validation needs at least 2 folds".into()));
    }
    if masculine.len() < folds || feminine.len() < folds {
        return Err(Error::Insufficient(format!(
            "{folds}-fold cross-validation needs {folds} words per class, have {} masculine and {} feminine",
            masculine.len(),
            feminine.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assign = |n: usize| {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let mut fold_of = vec![0usize; n];
        for (pos, i) in idx.into_iter().enumerate() {
            fold_of[i] = pos % folds;
        }
        fold_of
    };
    let fold_m = assign(masculine.len());
    let fold_f = assign(feminine.len());

    let mut accuracies = Vec::with_capacity(folds);
    for k in 0..folds {
        let split = |vs: &[Vec<f64>], fold_of: &[usize]| {
            let (mut train, mut test) = (Vec::new(), Vec::new());
            for (v, &fo) in vs.iter().zip(fold_of) {
                if fo == k {
                    test.push(v.clone());
                } else {
                    train.push(v.clone());
                }
            }
            (train, test)
        };
        let (train_m, test_m) = split(masculine, &fold_m);
        let (train_f, test_f) = split(feminine, &fold_f);
        let model = fit_lda(&train_m, &train_f, ridge)?;
        let correct = test_m.iter().filter(|v| !model.is_feminine(v)).count()
            + test_f.iter().filter(|v| model.is_feminine(v)).count();
        accuracies.push(correct as f64 / (test_m.len() + test_f.len()) as f64);
    }
    let mean_accuracy = accuracies.iter().sum::<f64>() / folds as f64;
    Ok(CrossValidation {
        folds,
        seed,
        fold_accuracies: accuracies,
        mean_accuracy,
    })
}

/// Removes the `d_g` component from `d_pca` and renormalizes.
pub fn orthogonalize(d_pca: &[f64], d_g: &[f64]) -> Result<Vec<f64>> {
    if d_pca.len() != d_g.len() {
        return Err(Error::DimensionMismatch {
            expected: d_g.len(),
            actual: d_pca.len(),
        });
    }
    for d in [d_pca, d_g] {
        if (linalg::norm(d) - 1.0).abs() > DIRECTION_NORM_TOLERANCE {
            return Err(Error::InvalidArgument("directions must be unit vectors".into()));
        }
    }
    let c = dot(d_pca, d_g);
    if c.abs() >= 1.0 - 1e-9 {
        return Err(Error::Degenerate(
            "semantic and grammatical directions are parallel".into(),
        ));
    }
    let mut r = d_pca.to_vec();
    linalg::axpy(-c, d_g, &mut r);
    // second pass removes what rounding left behind
    let c2 = dot(&r, d_g);
    linalg::axpy(-c2, d_g, &mut r);
    normalized(&r).ok_or_else(|| Error::Degenerate("empty residual".into()))
}

/// The three gender directions plus diagnostics. Serializes to the
/// directions JSON record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenderDirections {
    pub d_pca: Vec<f64>,
    pub d_g: Vec<f64>,
    pub d_s: Vec<f64>,
    /// `⟨d_pca, d_g⟩`
    pub overlap: f64,
    pub pca_explained_ratio: f64,
    pub lda_cv_accuracy: Option<f64>,
}

impl GenderDirections {
    pub fn dim(&self) -> usize {
        self.d_s.len()
    }

    /// Assembles and checks the record from its parts.
    pub fn from_parts(
        semantic: &SemanticDirection,
        grammatical: &LdaModel,
        lda_cv_accuracy: Option<f64>,
    ) -> Result<Self> {
        let mut d_s = orthogonalize(&semantic.direction, &grammatical.direction)?;
        orient(&mut d_s, &semantic.mean_difference);
        let directions = GenderDirections {
            overlap: dot(&semantic.direction, &grammatical.direction),
            d_pca: semantic.direction.clone(),
            d_g: grammatical.direction.clone(),
            d_s,
            pca_explained_ratio: semantic.explained_ratio,
            lda_cv_accuracy,
        };
        directions.check()?;
        Ok(directions)
    }

    /// Unit norms to 1e-9 and `|⟨d_s, d_g⟩| ≤ 1e-6`.
    pub fn check(&self) -> Result<()> {
        for (name, d) in [("d_pca", &self.d_pca), ("d_g", &self.d_g), ("d_s", &self.d_s)] {
            if (linalg::norm(d) - 1.0).abs() > 1e-9 {
                return Err(Error::Degenerate(format!("{name} is not unit length")));
            }
        }
        if dot(&self.d_s, &self.d_g).abs() > 1e-6 {
            return Err(Error::Degenerate("d_s is not orthogonal to d_g".into()));
        }
        Ok(())
    }
}

/// Settings shared by the direction constructions.
#[derive(Clone, Copy, Debug)]
pub struct DirectionOptions {
    pub ridge: Ridge,
    pub pca: PcaOptions,
    /// Run k-fold cross-validation of the grammatical classifier.
    pub cv_folds: Option<usize>,
    pub seed: u64,
}

impl Default for DirectionOptions {
    fn default() -> Self {
        DirectionOptions {
            ridge: Ridge::Auto,
            pca: PcaOptions::default(),
            cv_folds: None,
            seed: 0,
        }
    }
}

fn grammatical_with_cv(
    space: &EmbeddingSpace,
    lex: &GenderLexicon,
    options: &DirectionOptions,
) -> Result<(LdaModel, Option<f64>)> {
    let model = grammatical_direction(
        space,
        &lex.grammatical_masculine,
        &lex.grammatical_feminine,
        options.ridge,
    )?;
    let cv = match options.cv_folds {
        Some(folds) => Some(
            lda_cross_validation(
                space,
                &lex.grammatical_masculine,
                &lex.grammatical_feminine,
                folds,
                options.seed,
                options.ridge,
            )?
            .mean_accuracy,
        ),
        None => None,
    };
    Ok((model, cv))
}

/// Directions for a single gendered-language space.
pub fn monolingual_directions(
    space: &EmbeddingSpace,
    lex: &GenderLexicon,
    options: &DirectionOptions,
) -> Result<GenderDirections> {
    let semantic = semantic_direction(space, &lex.definitional_pairs, options.pca)?;
    let (model, cv) = grammatical_with_cv(space, lex, options)?;
    GenderDirections::from_parts(&semantic, &model, cv)
}

/// Directions for an aligned bilingual space: the grammatical direction uses
/// only the gendered-language nouns, the semantic direction uses the
/// definitional pairs of both languages.
pub fn bilingual_directions(
    bi: &BilingualSpace,
    src_lexicon: &GenderLexicon,
    en_pairs: &[GenderPair],
    options: &DirectionOptions,
) -> Result<GenderDirections> {
    let mut diffs = pair_differences(&bi.source, &src_lexicon.definitional_pairs)?;
    diffs.extend(pair_differences(&bi.target, en_pairs)?);
    let semantic = semantic_direction_from_differences(&diffs, bi.shared_dim(), options.pca)?;
    let (model, cv) = grammatical_with_cv(&bi.source, src_lexicon, options)?;
    GenderDirections::from_parts(&semantic, &model, cv)
}
