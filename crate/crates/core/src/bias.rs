//! WEAT association scores, the per-word and aggregate MWEAT measures,
//! permutation significance and cross-lingual bias correlation.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::lexicon::GenderLexicon;
use crate::linalg::{dot, normalized};
use crate::stats;

/// Largest pair count enumerated exhaustively by the paired test
/// (`2^16 = 65,536` sign patterns).
pub const MAX_EXHAUSTIVE_PAIRS: usize = 16;
pub const MIN_PERMUTATIONS: usize = 100;
pub const DEFAULT_PERMUTATIONS: usize = 10_000;

/// Resolved attribute sets A (male) and B (female) as unit vectors.
#[derive(Clone, Debug)]
pub struct Attributes {
    male: Vec<Vec<f64>>,
    female: Vec<Vec<f64>>,
}

impl Attributes {
    pub fn resolve(space: &EmbeddingSpace, male: &[String], female: &[String]) -> Result<Self> {
        if male.is_empty() || female.is_empty() {
            return Err(Error::Insufficient(
                "attribute sets A and B must both be non-empty".into(),
            ));
        }
        let a: HashSet<&str> = male.iter().map(String::as_str).collect();
        if let Some(w) = female.iter().find(|w| a.contains(w.as_str())) {
            return Err(Error::InvalidArgument(format!(
                "{w:?} is in both attribute sets"
            )));
        }
        let load = |words: &[String]| -> Result<Vec<Vec<f64>>> {
            words
                .iter()
                .map(|w| {
                    normalized(space.require(w)?).ok_or_else(|| Error::ZeroVector(w.clone()))
                })
                .collect()
        };
        Ok(Attributes {
            male: load(male)?,
            female: load(female)?,
        })
    }

    pub fn from_lexicon(space: &EmbeddingSpace, lex: &GenderLexicon) -> Result<Self> {
        Self::resolve(space, &lex.attributes_male, &lex.attributes_female)
    }

    /// `s(w, A, B)` for a raw vector.
    pub fn association(&self, w: &[f64]) -> Result<f64> {
        let w = normalized(w).ok_or_else(|| Error::Degenerate("zero target vector".into()))?;
        let mean = |set: &[Vec<f64>]| {
            set.iter().map(|a| dot(&w, a).clamp(-1.0, 1.0)).sum::<f64>() / set.len() as f64
        };
        Ok(mean(&self.male) - mean(&self.female))
    }

    pub fn association_of(&self, space: &EmbeddingSpace, word: &str) -> Result<f64> {
        self.association(space.require(word)?)
    }
}

/// `s(w, A, B) = mean_a cos(w, a) − mean_b cos(w, b)`.
pub fn weat_assoc(word: &str, a: &[String], b: &[String], space: &EmbeddingSpace) -> Result<f64> {
    Attributes::resolve(space, a, b)?.association_of(space, word)
}

/// `s(X, Y, A, B) = Σ_x s(x, A, B) − Σ_y s(y, A, B)`.
pub fn weat_statistic(
    x: &[String],
    y: &[String],
    a: &[String],
    b: &[String],
    space: &EmbeddingSpace,
) -> Result<f64> {
    let attrs = Attributes::resolve(space, a, b)?;
    let sx = sum_assoc(&attrs, space, x)?;
    let sy = sum_assoc(&attrs, space, y)?;
    Ok(sx - sy)
}

fn sum_assoc(attrs: &Attributes, space: &EmbeddingSpace, words: &[String]) -> Result<f64> {
    words.iter().map(|w| attrs.association_of(space, w)).sum()
}

/// `b_w = |s(w, A, B)|` for a noun with a single form.
pub fn mweat_inanimate(word: &str, a: &[String], b: &[String], space: &EmbeddingSpace) -> Result<f64> {
    Ok(weat_assoc(word, a, b, space)?.abs())
}

/// Pair bias from the two forms' associations. Signed: `|s_m| − |s_f|`,
/// positive when the masculine form is more strongly gender-associated.
pub fn pair_bias(s_m: f64, s_f: f64, signed: bool) -> f64 {
    let d = s_m.abs() - s_f.abs();
    if signed {
        d
    } else {
        d.abs()
    }
}

/// `||s(w_m, A, B)| − |s(w_f, A, B)||`, or its signed variant.
pub fn mweat_pair(
    masculine: &str,
    feminine: &str,
    a: &[String],
    b: &[String],
    space: &EmbeddingSpace,
    signed: bool,
) -> Result<f64> {
    let attrs = Attributes::resolve(space, a, b)?;
    let s_m = attrs.association_of(space, masculine)?;
    let s_f = attrs.association_of(space, feminine)?;
    Ok(pair_bias(s_m, s_f, signed))
}

/// Targets X, Y and attributes A, B for a bias test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasQuery {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub a: Vec<String>,
    pub b: Vec<String>,
    /// `x[i]` and `y[i]` are the two forms of one noun.
    pub paired: bool,
}

impl BiasQuery {
    /// Masculine occupation forms against feminine ones.
    pub fn occupations(lex: &GenderLexicon) -> Result<Self> {
        if lex.occupation_pairs.is_empty() {
            return Err(Error::Insufficient("lexicon has no occupation pairs".into()));
        }
        Ok(BiasQuery {
            x: lex.occupation_pairs.iter().map(|p| p.masculine.clone()).collect(),
            y: lex.occupation_pairs.iter().map(|p| p.feminine.clone()).collect(),
            a: lex.attributes_male.clone(),
            b: lex.attributes_female.clone(),
            paired: true,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.x.is_empty() || self.y.is_empty() {
            return Err(Error::Insufficient("target sets X and Y must be non-empty".into()));
        }
        if self.paired && self.x.len() != self.y.len() {
            return Err(Error::InvalidArgument(format!(
                "paired query with |X| = {} and |Y| = {}",
                self.x.len(),
                self.y.len()
            )));
        }
        Ok(())
    }

    /// Per-word associations `s(x, A, B)` and `s(y, A, B)`.
    pub fn associations(&self, space: &EmbeddingSpace) -> Result<(Vec<f64>, Vec<f64>)> {
        self.validate()?;
        let attrs = Attributes::resolve(space, &self.a, &self.b)?;
        let one = |ws: &[String]| -> Result<Vec<f64>> {
            ws.iter().map(|w| attrs.association_of(space, w)).collect()
        };
        Ok((one(&self.x)?, one(&self.y)?))
    }
}

/// `||Σ s_x| − |Σ s_y||` from precomputed associations.
pub fn aggregate_statistic(s_x: &[f64], s_y: &[f64]) -> f64 {
    let u: f64 = s_x.iter().sum();
    let v: f64 = s_y.iter().sum();
    (u.abs() - v.abs()).abs()
}

/// The aggregate MWEAT difference `||Σ_x s(x,A,B)| − |Σ_y s(y,A,B)||`.
pub fn mweat_aggregate(query: &BiasQuery, space: &EmbeddingSpace) -> Result<f64> {
    let (sx, sy) = query.associations(space)?;
    Ok(aggregate_statistic(&sx, &sy))
}

/// Exchangeable units of the permutation test.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationScheme {
    /// Swap the masculine/feminine labels within each pair independently.
    #[default]
    PairedSwap,
    /// Re-split X ∪ Y into sets of the original sizes.
    Partition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationConfig {
    pub n_perm: usize,
    pub seed: u64,
    pub scheme: PermutationScheme,
}

impl Default for PermutationConfig {
    fn default() -> Self {
        PermutationConfig {
            n_perm: DEFAULT_PERMUTATIONS,
            seed: 0,
            scheme: PermutationScheme::PairedSwap,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PermutationOutcome {
    pub observed: f64,
    /// `(exceedances + 1) / (n_permutations + 1)`
    pub p_value: f64,
    pub exceedances: usize,
    pub n_permutations: usize,
    /// All non-identity sign patterns were enumerated.
    pub exhaustive: bool,
}

fn tie_tolerance(observed: f64) -> f64 {
    1e-12 * observed.abs().max(1.0)
}

/// One-sided sign-flip test on paired associations. With at most
/// [`MAX_EXHAUSTIVE_PAIRS`] pairs every non-identity swap pattern is
/// enumerated, which makes `p` the exact enumeration p-value. Otherwise
/// `n_perm` random patterns are drawn, permutation `i` using ChaCha stream `i`
/// under `seed`. Null values within rounding of the observed one count as
/// exceedances.
pub fn paired_permutation_test(
    s_x: &[f64],
    s_y: &[f64],
    n_perm: usize,
    seed: u64,
) -> Result<PermutationOutcome> {
    if s_x.len() != s_y.len() || s_x.is_empty() {
        return Err(Error::InvalidArgument(
            "paired permutation test needs equal, non-empty X and Y".into(),
        ));
    }
    if n_perm < MIN_PERMUTATIONS {
        return Err(Error::InvalidArgument(format!(
            "n_perm must be at least {MIN_PERMUTATIONS}, got {n_perm}"
        )));
    }
    let n = s_x.len();
    let observed = aggregate_statistic(s_x, s_y);
    let cutoff = observed - tie_tolerance(observed);
    let stat_for = |flip: &dyn Fn(usize) -> bool| {
        let (mut u, mut v) = (0.0, 0.0);
        for i in 0..n {
            if flip(i) {
                u += s_y[i];
                v += s_x[i];
            } else {
                u += s_x[i];
                v += s_y[i];
            }
        }
        (f64::abs(u) - f64::abs(v)).abs()
    };

    if n <= MAX_EXHAUSTIVE_PAIRS {
        let patterns: u64 = 1 << n;
        let exceedances = (1..patterns)
            .into_par_iter()
            .filter(|&mask| stat_for(&|i| mask >> i & 1 == 1) >= cutoff)
            .count();
        let n_permutations = (patterns - 1) as usize;
        return Ok(PermutationOutcome {
            observed,
            p_value: (exceedances + 1) as f64 / (n_permutations + 1) as f64,
            exceedances,
            n_permutations,
            exhaustive: true,
        });
    }

    let exceedances = (0..n_perm as u64)
        .into_par_iter()
        .filter(|&it| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(it);
            let words: Vec<u64> = (0..n.div_ceil(64)).map(|_| rng.random()).collect();
            stat_for(&|i| words[i / 64] >> (i % 64) & 1 == 1) >= cutoff
        })
        .count();
    Ok(PermutationOutcome {
        observed,
        p_value: (exceedances + 1) as f64 / (n_perm + 1) as f64,
        exceedances,
        n_permutations: n_perm,
        exhaustive: false,
    })
}

/// One-sided test that re-partitions X ∪ Y into sets of the original sizes.
pub fn partition_permutation_test(
    s_x: &[f64],
    s_y: &[f64],
    n_perm: usize,
    seed: u64,
) -> Result<PermutationOutcome> {
    if s_x.is_empty() || s_y.is_empty() {
        return Err(Error::InvalidArgument("X and Y must be non-empty".into()));
    }
    if n_perm < MIN_PERMUTATIONS {
        return Err(Error::InvalidArgument(format!(
            "n_perm must be at least {MIN_PERMUTATIONS}, got {n_perm}"
        )));
    }
    let observed = aggregate_statistic(s_x, s_y);
    let cutoff = observed - tie_tolerance(observed);
    let pool: Vec<f64> = s_x.iter().chain(s_y).copied().collect();
    let exceedances = (0..n_perm as u64)
        .into_par_iter()
        .filter(|&it| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(it);
            let mut idx: Vec<usize> = (0..pool.len()).collect();
            idx.shuffle(&mut rng);
            let (xs, ys) = idx.split_at(s_x.len());
            let u: f64 = xs.iter().map(|&i| pool[i]).sum();
            let v: f64 = ys.iter().map(|&i| pool[i]).sum();
            (u.abs() - v.abs()).abs() >= cutoff
        })
        .count();
    Ok(PermutationOutcome {
        observed,
        p_value: (exceedances + 1) as f64 / (n_perm + 1) as f64,
        exceedances,
        n_permutations: n_perm,
        exhaustive: false,
    })
}

/// Significance of [`mweat_aggregate`] under the configured scheme.
pub fn permutation_test(
    query: &BiasQuery,
    space: &EmbeddingSpace,
    config: &PermutationConfig,
) -> Result<PermutationOutcome> {
    if config.scheme == PermutationScheme::PairedSwap && !query.paired {
        return Err(Error::InvalidArgument(
            "the paired permutation scheme needs a paired query".into(),
        ));
    }
    let (sx, sy) = query.associations(space)?;
    match config.scheme {
        PermutationScheme::PairedSwap => paired_permutation_test(&sx, &sy, config.n_perm, config.seed),
        PermutationScheme::Partition => partition_permutation_test(&sx, &sy, config.n_perm, config.seed),
    }
}

/// One row of a [`BiasReport`]: a pair of forms or a single inanimate noun.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordBias {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pair: Option<String>,
    /// Association of the masculine form (or of the word itself).
    pub s_m: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s_f: Option<f64>,
    pub b_w: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub signed: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub per_word: Vec<WordBias>,
    pub statistic: f64,
    pub p_value: f64,
    pub n_permutations: usize,
    pub seed: u64,
}

impl BiasReport {
    /// Recomputes the aggregate statistic from the paired rows.
    pub fn statistic_from_rows(&self) -> f64 {
        let (mut u, mut v) = (0.0, 0.0);
        for r in self.per_word.iter().filter(|r| r.pair.is_some()) {
            u += r.s_m;
            v += r.s_f.unwrap_or(0.0);
        }
        (f64::abs(u) - f64::abs(v)).abs()
    }
}

/// Per-pair and per-inanimate scores plus the aggregate test for a paired
/// query.
pub fn audit(
    query: &BiasQuery,
    inanimate: &[String],
    space: &EmbeddingSpace,
    config: &PermutationConfig,
) -> Result<BiasReport> {
    let (sx, sy) = query.associations(space)?;
    let outcome = match config.scheme {
        PermutationScheme::PairedSwap => {
            if !query.paired {
                return Err(Error::InvalidArgument(
                    "the paired permutation scheme needs a paired query".into(),
                ));
            }
            paired_permutation_test(&sx, &sy, config.n_perm, config.seed)?
        }
        PermutationScheme::Partition => {
            partition_permutation_test(&sx, &sy, config.n_perm, config.seed)?
        }
    };
    let mut per_word = Vec::new();
    if query.paired {
        for (i, (m, f)) in query.x.iter().zip(&query.y).enumerate() {
            per_word.push(WordBias {
                word: None,
                pair: Some(format!("{m}/{f}")),
                s_m: sx[i],
                s_f: Some(sy[i]),
                b_w: pair_bias(sx[i], sy[i], false),
                signed: Some(pair_bias(sx[i], sy[i], true)),
            });
        }
    }
    let attrs = Attributes::resolve(space, &query.a, &query.b)?;
    for w in inanimate {
        let s = attrs.association_of(space, w)?;
        per_word.push(WordBias {
            word: Some(w.clone()),
            pair: None,
            s_m: s,
            s_f: None,
            b_w: s.abs(),
            signed: None,
        });
    }
    Ok(BiasReport {
        per_word,
        statistic: outcome.observed,
        p_value: outcome.p_value,
        n_permutations: outcome.n_permutations,
        seed: config.seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Correlation {
    pub rho: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Spearman correlation over the keys both maps share, with a two-sided
/// t-approximation p-value.
pub fn bias_correlation(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> Result<Correlation> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = a
        .iter()
        .filter_map(|(k, va)| b.get(k).map(|vb| (*va, *vb)))
        .unzip();
    if xs.len() < 5 {
        return Err(Error::Insufficient(format!(
            "bias correlation needs at least 5 shared words, found {}",
            xs.len()
        )));
    }
    let rho = stats::spearman(&xs, &ys)?;
    Ok(Correlation {
        rho,
        p_value: stats::correlation_p_value(rho, xs.len())?,
        n: xs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn toy() -> EmbeddingSpace {
        EmbeddingSpace::from_rows(
            "es",
            3,
            [
                ("el", [1.0, 0.0, 0.0]),
                ("ella", [0.0, 1.0, 0.0]),
                ("mesa", [0.0, 0.0, 1.0]),
                ("doctor", [0.9, 0.1, 0.3]),
                ("doctora", [0.1, 0.8, 0.3]),
                ("juez", [1.0, 1.0, 0.5]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn equidistant_word_scores_zero() {
        let sp = toy();
        assert!(weat_assoc("mesa", &s(&["el"]), &s(&["ella"]), &sp).unwrap().abs() < 1e-15);
        assert!(weat_assoc("juez", &s(&["el"]), &s(&["ella"]), &sp).unwrap().abs() < 1e-15);
    }

    #[test]
    fn self_attribute_scores_one() {
        let sp = toy();
        assert!((weat_assoc("el", &s(&["el"]), &s(&["mesa"]), &sp).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn missing_words_are_named() {
        let sp = toy();
        match weat_assoc("nadie", &s(&["el"]), &s(&["ella"]), &sp) {
            Err(Error::MissingWord(w)) => assert_eq!(w, "nadie"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            weat_assoc("mesa", &s(&["x"]), &s(&["ella"]), &sp),
            Err(Error::MissingWord(_))
        ));
        assert!(weat_assoc("mesa", &[], &s(&["ella"]), &sp).is_err());
        assert!(weat_assoc("mesa", &s(&["el"]), &s(&["el"]), &sp).is_err());
    }

    #[test]
    fn statistic_symmetries() {
        let sp = toy();
        let (a, b) = (s(&["el"]), s(&["ella"]));
        let x = s(&["doctor", "juez"]);
        let y = s(&["doctora", "mesa"]);
        assert_eq!(weat_statistic(&x, &x, &a, &b, &sp).unwrap(), 0.0);
        let f = weat_statistic(&x, &y, &a, &b, &sp).unwrap();
        let r = weat_statistic(&y, &x, &a, &b, &sp).unwrap();
        assert_eq!(f, -r);
    }

    #[test]
    fn pair_bias_arithmetic() {
        assert!((pair_bias(0.5, -0.2, false) - 0.3).abs() < 1e-15);
        assert!((pair_bias(0.5, -0.2, true) - 0.3).abs() < 1e-15);
        assert!((pair_bias(-0.2, 0.5, true) + 0.3).abs() < 1e-15);
        assert_eq!(pair_bias(0.4, -0.4, false), 0.0);
    }

    #[test]
    fn inanimate_is_absolute_association() {
        let sp = toy();
        let (a, b) = (s(&["el"]), s(&["ella"]));
        let raw = weat_assoc("doctora", &a, &b, &sp).unwrap();
        assert!(raw < 0.0);
        assert_eq!(mweat_inanimate("doctora", &a, &b, &sp).unwrap(), raw.abs());
    }

    #[test]
    fn mweat_pair_order() {
        let sp = toy();
        let (a, b) = (s(&["el"]), s(&["ella"]));
        let fwd = mweat_pair("doctor", "doctora", &a, &b, &sp, false).unwrap();
        let rev = mweat_pair("doctora", "doctor", &a, &b, &sp, false).unwrap();
        assert_eq!(fwd, rev);
        let fs = mweat_pair("doctor", "doctora", &a, &b, &sp, true).unwrap();
        let rs = mweat_pair("doctora", "doctor", &a, &b, &sp, true).unwrap();
        assert_eq!(fs, -rs);
    }

    #[test]
    fn mirrored_pair_has_zero_aggregate() {
        let sp = EmbeddingSpace::from_rows(
            "es",
            2,
            [("a", [1.0, 0.0]), ("b", [-1.0, 0.0]), ("m", [0.6, 0.8]), ("f", [-0.6, 0.8])],
        )
        .unwrap();
        let q = BiasQuery {
            x: s(&["m"]),
            y: s(&["f"]),
            a: s(&["a"]),
            b: s(&["b"]),
            paired: true,
        };
        assert!(mweat_aggregate(&q, &sp).unwrap().abs() < 1e-15);
    }

    #[test]
    fn exhaustive_for_small_pair_counts() {
        let sx = [0.5, 0.4, 0.3, 0.2];
        let sy = [-0.1, -0.2, -0.1, 0.0];
        let out = paired_permutation_test(&sx, &sy, 1000, 1).unwrap();
        assert!(out.exhaustive);
        assert_eq!(out.n_permutations, 15);
    }

    #[test]
    fn symmetric_pairs_give_p_one() {
        let sx = vec![0.3; 20];
        let sy = vec![-0.3; 20];
        let out = paired_permutation_test(&sx, &sy, 500, 9).unwrap();
        assert_eq!(out.observed, 0.0);
        assert_eq!(out.p_value, 1.0);
    }

    #[test]
    fn permutation_is_seed_deterministic() {
        let sx: Vec<f64> = (0..30).map(|i| 0.3 + 0.01 * i as f64).collect();
        let sy: Vec<f64> = (0..30).map(|i| -0.25 + 0.02 * (i % 3) as f64).collect();
        let a = paired_permutation_test(&sx, &sy, 2000, 5).unwrap();
        let b = paired_permutation_test(&sx, &sy, 2000, 5).unwrap();
        assert_eq!(a, b);
        assert!(!a.exhaustive);
        let c = partition_permutation_test(&sx, &sy, 2000, 5).unwrap();
        assert_eq!(c, partition_permutation_test(&sx, &sy, 2000, 5).unwrap());
    }

    #[test]
    fn permutation_argument_checks() {
        assert!(paired_permutation_test(&[0.1], &[0.2], 99, 0).is_err());
        assert!(paired_permutation_test(&[0.1, 0.2], &[0.2], 100, 0).is_err());
        let sp = toy();
        let q = BiasQuery {
            x: s(&["doctor"]),
            y: s(&["doctora", "mesa"]),
            a: s(&["el"]),
            b: s(&["ella"]),
            paired: false,
        };
        assert!(permutation_test(&q, &sp, &PermutationConfig::default()).is_err());
        let cfg = PermutationConfig {
            scheme: PermutationScheme::Partition,
            n_perm: 200,
            seed: 1,
        };
        assert!(permutation_test(&q, &sp, &cfg).is_ok());
    }

    #[test]
    fn report_statistic_recomputes_from_rows() {
        let sp = toy();
        let q = BiasQuery {
            x: s(&["doctor", "juez"]),
            y: s(&["doctora", "mesa"]),
            a: s(&["el"]),
            b: s(&["ella"]),
            paired: true,
        };
        let r = audit(&q, &s(&["mesa"]), &sp, &PermutationConfig { n_perm: 100, seed: 3, ..Default::default() })
            .unwrap();
        assert_eq!(r.per_word.len(), 3);
        assert!((r.statistic - r.statistic_from_rows()).abs() <= 1e-12);
        assert_eq!(r.seed, 3);
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["per_word"][0]["pair"].is_string());
        assert!(json["per_word"][2]["word"].is_string());
    }

    #[test]
    fn correlation_edge_cases() {
        let a: BTreeMap<String, f64> = (0..6).map(|i| (format!("w{i}"), i as f64)).collect();
        let same = bias_correlation(&a, &a).unwrap();
        assert!((same.rho - 1.0).abs() < 1e-12);
        let neg: BTreeMap<String, f64> = a.iter().map(|(k, v)| (k.clone(), -v)).collect();
        assert!((bias_correlation(&a, &neg).unwrap().rho + 1.0).abs() < 1e-12);
        let few: BTreeMap<String, f64> = a.iter().take(4).map(|(k, v)| (k.clone(), *v)).collect();
        assert!(bias_correlation(&a, &few).is_err());
    }
}
