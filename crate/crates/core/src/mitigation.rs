//! Bias mitigation: shifting gender-form pairs along the semantic direction
//! about an anchor, neutralizing inanimate nouns, hard-debiasing English,
//! orthogonal Procrustes re-alignment, and the pipelines built from them.
//!
//! Shifted vectors are not renormalized, so the pair objective
//! `|⟨w_m,d_s⟩ + ⟨w_f,d_s⟩ − 2⟨w_a,d_s⟩|` stays exactly zero; use
//! [`MitigationOutcome::renormalized`] when unit vectors are required.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::embedding::{BilingualSpace, EmbeddingSpace};
use crate::error::{Error, Result};
use crate::geometry::{
    bilingual_directions, monolingual_directions, semantic_direction, DirectionOptions,
    GenderDirections, PcaOptions,
};
use crate::lexicon::{BilingualDictionary, GenderLexicon, GenderPair, OccupationPair};
use crate::linalg::{axpy, dot, norm, normalized};

/// Removes the `d` component of `w` and renormalizes to unit length.
pub fn neutralize(w: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    if w.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            actual: w.len(),
        });
    }
    let mut r = w.to_vec();
    axpy(-dot(w, d), d, &mut r);
    let n = norm(&r);
    if n <= 1e-12 * norm(w).max(f64::MIN_POSITIVE) {
        return Err(Error::Degenerate(
            "vector is parallel to the direction being removed".into(),
        ));
    }
    r.iter_mut().for_each(|v| *v /= n);
    Ok(r)
}

/// `|⟨w_m,d⟩ + ⟨w_f,d⟩ − 2·anchor|`
pub fn pair_residual(masculine: &[f64], feminine: &[f64], d_s: &[f64], anchor: f64) -> f64 {
    (dot(masculine, d_s) + dot(feminine, d_s) - 2.0 * anchor).abs()
}

/// Moves both forms by the same `−δ·d_s` so their projections become
/// symmetric about `anchor`. Returns the shifted forms and `δ`.
pub fn shift_pair(
    masculine: &[f64],
    feminine: &[f64],
    d_s: &[f64],
    anchor: f64,
) -> (Vec<f64>, Vec<f64>, f64) {
    let delta = (dot(masculine, d_s) + dot(feminine, d_s) - 2.0 * anchor) / 2.0;
    let mut m = masculine.to_vec();
    let mut f = feminine.to_vec();
    axpy(-delta, d_s, &mut m);
    axpy(-delta, d_s, &mut f);
    (m, f, delta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ShiftOri,
    ShiftEn,
    DeAlign,
    HybridOri,
    HybridEn,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::ShiftOri,
        Method::ShiftEn,
        Method::DeAlign,
        Method::HybridOri,
        Method::HybridEn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::ShiftOri => "shift_ori",
            Method::ShiftEn => "shift_en",
            Method::DeAlign => "de_align",
            Method::HybridOri => "hybrid_ori",
            Method::HybridEn => "hybrid_en",
        }
    }

    pub fn needs_english(self) -> bool {
        self != Method::ShiftOri
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

/// Where a pair's projections are centered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    Origin,
    /// The occupation's English word in the aligned target space.
    English,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairResidual {
    pub pair: String,
    pub anchor: f64,
    pub delta: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InanimateProjection {
    pub word: String,
    pub projection: f64,
}

/// Result of shifting a space.
#[derive(Clone, Debug)]
pub struct ShiftResult {
    pub space: EmbeddingSpace,
    pub residuals: Vec<PairResidual>,
    pub inanimate: Vec<InanimateProjection>,
    pub words_touched: usize,
}

fn check_touch_sets(lex: &GenderLexicon) -> Result<()> {
    if lex.occupation_pairs.is_empty() && lex.inanimate_nouns.is_empty() {
        return Err(Error::Insufficient(
            "lexicon has neither occupation pairs nor inanimate nouns to mitigate".into(),
        ));
    }
    let protected: HashSet<&str> = lex
        .definitional_pairs
        .iter()
        .flat_map(|p| [p.masculine.as_str(), p.feminine.as_str()])
        .chain(lex.attributes_male.iter().map(String::as_str))
        .chain(lex.attributes_female.iter().map(String::as_str))
        .collect();
    let mut seen = HashSet::new();
    let touched = lex
        .occupation_pairs
        .iter()
        .flat_map(|p| [p.masculine.as_str(), p.feminine.as_str()])
        .chain(lex.inanimate_nouns.iter().map(String::as_str));
    for w in touched {
        if !seen.insert(w) {
            return Err(Error::Lexicon(format!(
                "{w:?} appears more than once among occupation forms and inanimate nouns"
            )));
        }
        if protected.contains(w) {
            return Err(Error::Lexicon(format!(
                "{w:?} is both a mitigation target and a definitional or attribute word"
            )));
        }
    }
    Ok(())
}

/// Neutralizes every inanimate noun against `d_s` and shifts every
/// occupation pair about the anchor returned by `anchor_of`. All other rows
/// are copied unchanged.
pub fn apply_shift<F>(
    space: &EmbeddingSpace,
    lex: &GenderLexicon,
    d_s: &[f64],
    anchor_of: F,
) -> Result<ShiftResult>
where
    F: Fn(&OccupationPair) -> Result<f64>,
{
    if d_s.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            actual: d_s.len(),
        });
    }
    check_touch_sets(lex)?;
    let mut updates: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut inanimate = Vec::with_capacity(lex.inanimate_nouns.len());
    for w in &lex.inanimate_nouns {
        let i = space
            .index_of(w)
            .ok_or_else(|| Error::MissingWord(w.clone()))?;
        let v = neutralize(space.row(i), d_s).map_err(|e| match e {
            Error::Degenerate(m) => Error::Degenerate(format!("{w}: {m}")),
            e => e,
        })?;
        inanimate.push(InanimateProjection {
            word: w.clone(),
            projection: dot(&v, d_s),
        });
        updates.push((i, v));
    }
    let mut residuals = Vec::with_capacity(lex.occupation_pairs.len());
    for p in &lex.occupation_pairs {
        let im = space
            .index_of(&p.masculine)
            .ok_or_else(|| Error::MissingWord(p.masculine.clone()))?;
        let iff = space
            .index_of(&p.feminine)
            .ok_or_else(|| Error::MissingWord(p.feminine.clone()))?;
        let anchor = anchor_of(p)?;
        let (m, f, delta) = shift_pair(space.row(im), space.row(iff), d_s, anchor);
        residuals.push(PairResidual {
            pair: p.key(),
            anchor,
            delta,
            residual: pair_residual(&m, &f, d_s, anchor),
        });
        updates.push((im, m));
        updates.push((iff, f));
    }
    let words_touched = updates.len();
    let space = space.with_rows_replaced(&updates)?;
    Ok(ShiftResult {
        space,
        residuals,
        inanimate,
        words_touched,
    })
}

/// Projection of each pair's English word on `d_s`, read from `english`.
fn english_anchor<'a>(
    english: &'a EmbeddingSpace,
    d_s: &'a [f64],
) -> impl Fn(&OccupationPair) -> Result<f64> + 'a {
    move |p| {
        let en = p.require_english()?;
        let v = english.vector(en).ok_or_else(|| {
            Error::MissingWord(format!("{en} (English anchor of {})", p.key()))
        })?;
        Ok(dot(v, d_s))
    }
}

/// Settings for hard-debiasing the English side.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnglishDebiasConfig {
    pub definitional_pairs: Vec<GenderPair>,
    pub equalize_pairs: Vec<GenderPair>,
    /// Words that keep their gender component. Equalize-pair members are
    /// always protected in addition to these.
    pub gender_specific: Vec<String>,
}

impl EnglishDebiasConfig {
    /// Definitional pairs double as equalize pairs; definitional and
    /// attribute words are gender-specific.
    pub fn from_lexicon(en: &GenderLexicon) -> Self {
        let mut gender_specific: Vec<String> = Vec::new();
        let mut seen = HashSet::new();
        let words = en
            .definitional_pairs
            .iter()
            .flat_map(|p| [&p.masculine, &p.feminine])
            .chain(&en.attributes_male)
            .chain(&en.attributes_female);
        for w in words {
            if seen.insert(w.as_str()) {
                gender_specific.push(w.clone());
            }
        }
        EnglishDebiasConfig {
            definitional_pairs: en.definitional_pairs.clone(),
            equalize_pairs: en.definitional_pairs.clone(),
            gender_specific,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HardDebiasOutcome {
    pub space: EmbeddingSpace,
    /// English gender direction the space was debiased against.
    pub direction: Vec<f64>,
    pub neutralized: usize,
    pub equalized: usize,
}

/// Neutralize-and-equalize on a unit-normalized English space. Every word
/// outside `gender_specific` and the equalize pairs loses its component along
/// the English gender direction; each equalize pair is made symmetric about
/// that direction while staying unit length.
pub fn hard_debias_english(
    space: &EmbeddingSpace,
    definitional_pairs: &[GenderPair],
    equalize_pairs: &[GenderPair],
    gender_specific: &[String],
) -> Result<HardDebiasOutcome> {
    if !space.is_normalized() {
        return Err(Error::InvalidArgument(
            "hard debiasing expects a unit-normalized space".into(),
        ));
    }
    let d = semantic_direction(space, definitional_pairs, PcaOptions::default())?.direction;
    let mut protected: HashSet<&str> = gender_specific.iter().map(String::as_str).collect();
    for p in equalize_pairs {
        protected.insert(&p.masculine);
        protected.insert(&p.feminine);
    }
    let mut updates = Vec::new();
    for (i, w) in space.words().iter().enumerate() {
        if protected.contains(w.as_str()) {
            continue;
        }
        let v = neutralize(space.row(i), &d)
            .map_err(|e| Error::Degenerate(format!("cannot neutralize {w:?}: {e}")))?;
        updates.push((i, v));
    }
    let neutralized = updates.len();
    let mut equalized = 0;
    for p in equalize_pairs {
        let (Some(ia), Some(ib)) = (space.index_of(&p.masculine), space.index_of(&p.feminine))
        else {
            continue;
        };
        let (a, b) = (space.row(ia), space.row(ib));
        let mu: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        let mut nu = mu.clone();
        axpy(-dot(&mu, &d), &d, &mut nu);
        let nu_sq = dot(&nu, &nu);
        if nu_sq > 1.0 {
            return Err(Error::Degenerate(format!(
                "cannot equalize {}/{}: |nu| > 1",
                p.masculine, p.feminine
            )));
        }
        let scale = (1.0 - nu_sq).sqrt();
        let sign_a = if dot(a, &d) >= dot(b, &d) { 1.0 } else { -1.0 };
        let mut ea = nu.clone();
        axpy(sign_a * scale, &d, &mut ea);
        let mut eb = nu;
        axpy(-sign_a * scale, &d, &mut eb);
        let ea = normalized(&ea).ok_or_else(|| Error::Degenerate("zero equalized vector".into()))?;
        let eb = normalized(&eb).ok_or_else(|| Error::Degenerate("zero equalized vector".into()))?;
        updates.push((ia, ea));
        updates.push((ib, eb));
        equalized += 1;
    }
    Ok(HardDebiasOutcome {
        space: space.with_rows_replaced(&updates)?,
        direction: d,
        neutralized,
        equalized,
    })
}

/// A fitted orthogonal map applied to the source side.
#[derive(Clone, Debug)]
pub struct Alignment {
    pub bilingual: BilingualSpace,
    /// Row-major `dim × dim` matrix `W` with `W·x ≈ y`.
    pub rotation: DMatrix<f64>,
    pub pairs_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlignmentSummary {
    pub pairs_used: usize,
    /// `max |WᵀW − I|`
    pub orthogonality_error: f64,
}

impl Alignment {
    pub fn summary(&self) -> AlignmentSummary {
        AlignmentSummary {
            pairs_used: self.pairs_used,
            orthogonality_error: orthogonality_error(&self.rotation),
        }
    }
}

pub fn orthogonality_error(w: &DMatrix<f64>) -> f64 {
    let wtw = w.tr_mul(w);
    let n = w.ncols();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((wtw[(i, j)] - target).abs());
        }
    }
    worst
}

/// Orthogonal Procrustes: the `W` minimizing `Σ‖W·x_i − y_i‖²` over the seed
/// pairs is `U·Vᵀ` from the SVD of `Σ y_i x_iᵀ`. The source side is rotated;
/// the target is returned unchanged.
pub fn procrustes_align(
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    seed: &BilingualDictionary,
) -> Result<Alignment> {
    let dim = src.dim();
    if tgt.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: tgt.dim(),
        });
    }
    let pairs: Vec<(&[f64], &[f64])> = seed
        .pairs()
        .filter_map(|(s, t)| Some((src.vector(s)?, tgt.vector(t)?)))
        .collect();
    if pairs.len() < dim {
        return Err(Error::Insufficient(format!(
            "alignment needs at least {dim} seed pairs present in both spaces, found {}",
            pairs.len()
        )));
    }
    if pairs.len() < 5 * dim {
        log::warn!(
            "only {} seed pairs for {dim} dimensions; alignment may be unstable",
            pairs.len()
        );
    }
    let mut cross = DMatrix::<f64>::zeros(dim, dim);
    for (x, y) in &pairs {
        for r in 0..dim {
            let yr = y[r];
            if yr == 0.0 {
                continue;
            }
            for c in 0..dim {
                cross[(r, c)] += yr * x[c];
            }
        }
    }
    let svd = cross.svd(true, true);
    let sv = &svd.singular_values;
    let (lo, hi) = sv
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(*s), hi.max(*s)));
    if hi.is_nan() || hi <= 0.0 {
        return Err(Error::Degenerate("seed pairs give a zero cross-covariance".into()));
    }
    // Hard-debiased targets all lie in one hyperplane, so one vanishing
    // singular value is expected; the map is then fixed up to the sign of
    // that single axis. More than one leaves whole planes undetermined.
    let deficient = sv.iter().filter(|s| **s <= 1e-10 * hi).count();
    if deficient > 1 {
        return Err(Error::Degenerate(format!(
            "seed pairs give a rank-deficient cross-covariance (rank {} of {dim})",
            dim - deficient
        )));
    }
    if deficient == 1 {
        log::warn!("cross-covariance has one vanishing singular value ({lo:.3e})");
    }
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::Degenerate("SVD did not converge".into()));
    };
    let w = u * v_t;
    let rotated = src.map_rows(|x| {
        let mut out = vec![0.0; dim];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..dim).map(|c| w[(r, c)] * x[c]).sum();
        }
        out
    })?;
    let rotated = if src.is_normalized() && !rotated.is_normalized() {
        rotated.unit_normalize()?
    } else {
        rotated
    };
    Ok(Alignment {
        bilingual: BilingualSpace::new(rotated, tgt.clone())?,
        rotation: w,
        pairs_used: pairs.len(),
    })
}

#[derive(Clone, Debug)]
pub struct DeAlignOutcome {
    pub alignment: Alignment,
    pub english: HardDebiasOutcome,
}

/// Hard-debias English, then rotate the gendered-language space onto it.
/// Without a seed dictionary, identical strings across the vocabularies are
/// used.
pub fn mitigate_de_align(
    src: &EmbeddingSpace,
    en: &EmbeddingSpace,
    seed: Option<&BilingualDictionary>,
    config: &EnglishDebiasConfig,
) -> Result<DeAlignOutcome> {
    let english = hard_debias_english(
        en,
        &config.definitional_pairs,
        &config.equalize_pairs,
        &config.gender_specific,
    )?;
    let identical;
    let seed = match seed {
        Some(s) => s,
        None => {
            identical = BilingualDictionary::identical_strings(src, &english.space);
            &identical
        }
    };
    let alignment = procrustes_align(src, &english.space, seed)?;
    Ok(DeAlignOutcome { alignment, english })
}

/// Inputs for [`mitigate`].
#[derive(Clone, Copy, Debug)]
pub struct MitigationPlan<'a> {
    pub method: Method,
    pub source: &'a EmbeddingSpace,
    pub english: Option<&'a EmbeddingSpace>,
    pub lexicon: &'a GenderLexicon,
    pub english_config: Option<&'a EnglishDebiasConfig>,
    pub seed_dictionary: Option<&'a BilingualDictionary>,
    pub directions: DirectionOptions,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnglishDebiasSummary {
    pub neutralized: usize,
    pub equalized: usize,
}

/// Everything a pipeline produced. `space` is the mitigated gendered-language
/// space; `english` is present for the bilingual methods.
#[derive(Clone, Debug)]
pub struct MitigationOutcome {
    pub method: Method,
    pub space: EmbeddingSpace,
    pub english: Option<EmbeddingSpace>,
    pub directions: GenderDirections,
    pub residuals: Vec<PairResidual>,
    pub inanimate: Vec<InanimateProjection>,
    pub words_touched: usize,
    pub alignment: Option<AlignmentSummary>,
    pub english_debias: Option<EnglishDebiasSummary>,
}

/// JSON view of a [`MitigationOutcome`] without the spaces.
#[derive(Clone, Debug, Serialize)]
pub struct MitigationSummary<'a> {
    pub method: Method,
    pub words_touched: usize,
    pub max_residual: f64,
    pub max_inanimate_projection: f64,
    pub residuals: &'a [PairResidual],
    pub inanimate: &'a [InanimateProjection],
    pub directions: &'a GenderDirections,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alignment: Option<&'a AlignmentSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub english_debias: Option<&'a EnglishDebiasSummary>,
}

impl MitigationOutcome {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn max_inanimate_projection(&self) -> f64 {
        self.inanimate
            .iter()
            .map(|r| r.projection.abs())
            .fold(0.0, f64::max)
    }

    pub fn summary(&self) -> MitigationSummary<'_> {
        MitigationSummary {
            method: self.method,
            words_touched: self.words_touched,
            max_residual: self.max_residual(),
            max_inanimate_projection: self.max_inanimate_projection(),
            residuals: &self.residuals,
            inanimate: &self.inanimate,
            directions: &self.directions,
            alignment: self.alignment.as_ref(),
            english_debias: self.english_debias.as_ref(),
        }
    }

    /// Unit-normalizes the mitigated space and reports the pair residuals
    /// measured afterwards against the same anchors.
    pub fn renormalized(&self, lex: &GenderLexicon) -> Result<(EmbeddingSpace, Vec<PairResidual>)> {
        let space = self.space.unit_normalize()?;
        let d_s = &self.directions.d_s;
        let residuals = lex
            .occupation_pairs
            .iter()
            .zip(&self.residuals)
            .map(|(p, r)| {
                let m = space.require(&p.masculine)?;
                let f = space.require(&p.feminine)?;
                Ok(PairResidual {
                    pair: r.pair.clone(),
                    anchor: r.anchor,
                    delta: r.delta,
                    residual: pair_residual(m, f, d_s, r.anchor),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((space, residuals))
    }
}

/// Shift_Ori: origin anchor on a monolingual space.
pub fn mitigate_shift_ori(
    space: &EmbeddingSpace,
    lex: &GenderLexicon,
    directions: &GenderDirections,
) -> Result<MitigationOutcome> {
    let shifted = apply_shift(space, lex, &directions.d_s, |_| Ok(0.0))?;
    Ok(outcome(Method::ShiftOri, shifted, None, directions.clone()))
}

/// Shift_EN: each pair is centered on its aligned English word.
pub fn mitigate_shift_en(
    bi: &BilingualSpace,
    lex: &GenderLexicon,
    directions: &GenderDirections,
) -> Result<MitigationOutcome> {
    let d_s = &directions.d_s;
    let shifted = apply_shift(&bi.source, lex, d_s, english_anchor(&bi.target, d_s))?;
    Ok(outcome(
        Method::ShiftEn,
        shifted,
        Some(bi.target.clone()),
        directions.clone(),
    ))
}

fn outcome(
    method: Method,
    shifted: ShiftResult,
    english: Option<EmbeddingSpace>,
    directions: GenderDirections,
) -> MitigationOutcome {
    MitigationOutcome {
        method,
        space: shifted.space,
        english,
        directions,
        residuals: shifted.residuals,
        inanimate: shifted.inanimate,
        words_touched: shifted.words_touched,
        alignment: None,
        english_debias: None,
    }
}

/// Residuals and inanimate projections measured without moving anything.
fn measure(
    space: &EmbeddingSpace,
    lex: &GenderLexicon,
    d_s: &[f64],
) -> Result<(Vec<PairResidual>, Vec<InanimateProjection>)> {
    let residuals = lex
        .occupation_pairs
        .iter()
        .map(|p| {
            let m = space.require(&p.masculine)?;
            let f = space.require(&p.feminine)?;
            Ok(PairResidual {
                pair: p.key(),
                anchor: 0.0,
                delta: 0.0,
                residual: pair_residual(m, f, d_s, 0.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let inanimate = lex
        .inanimate_nouns
        .iter()
        .map(|w| {
            Ok(InanimateProjection {
                word: w.clone(),
                projection: dot(space.require(w)?, d_s),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((residuals, inanimate))
}

fn require_english<'a>(plan: &MitigationPlan<'a>) -> Result<(&'a EmbeddingSpace, &'a EnglishDebiasConfig)> {
    let en = plan.english.ok_or_else(|| {
        Error::InvalidArgument(format!("{} needs an English space", plan.method))
    })?;
    let cfg = plan.english_config.ok_or_else(|| {
        Error::InvalidArgument(format!("{} needs English definitional pairs", plan.method))
    })?;
    Ok((en, cfg))
}

/// Runs one of the five pipelines.
///
/// Directions are built on the space the shift operates in: monolingual
/// for Shift_Ori, bilingual on the input spaces for Shift_EN, and bilingual
/// on the re-aligned spaces for De-Align and the hybrids.
pub fn mitigate(plan: &MitigationPlan<'_>) -> Result<MitigationOutcome> {
    match plan.method {
        Method::ShiftOri => {
            let directions = monolingual_directions(plan.source, plan.lexicon, &plan.directions)?;
            mitigate_shift_ori(plan.source, plan.lexicon, &directions)
        }
        Method::ShiftEn => {
            let (en, cfg) = require_english(plan)?;
            let bi = BilingualSpace::new(plan.source.clone(), en.clone())?;
            let directions =
                bilingual_directions(&bi, plan.lexicon, &cfg.definitional_pairs, &plan.directions)?;
            mitigate_shift_en(&bi, plan.lexicon, &directions)
        }
        Method::DeAlign | Method::HybridOri | Method::HybridEn => {
            let (en, cfg) = require_english(plan)?;
            let de = mitigate_de_align(plan.source, en, plan.seed_dictionary, cfg)?;
            let bi = &de.alignment.bilingual;
            let directions =
                bilingual_directions(bi, plan.lexicon, &cfg.definitional_pairs, &plan.directions)?;
            let english_debias = Some(EnglishDebiasSummary {
                neutralized: de.english.neutralized,
                equalized: de.english.equalized,
            });
            let alignment = Some(de.alignment.summary());
            let mut out = match plan.method {
                Method::DeAlign => {
                    let (residuals, inanimate) = measure(&bi.source, plan.lexicon, &directions.d_s)?;
                    MitigationOutcome {
                        method: Method::DeAlign,
                        space: bi.source.clone(),
                        english: Some(bi.target.clone()),
                        directions,
                        residuals,
                        inanimate,
                        words_touched: bi.source.len(),
                        alignment: None,
                        english_debias: None,
                    }
                }
                Method::HybridOri => {
                    let mut o = mitigate_shift_ori(&bi.source, plan.lexicon, &directions)?;
                    o.english = Some(bi.target.clone());
                    o
                }
                _ => mitigate_shift_en(bi, plan.lexicon, &directions)?,
            };
            out.method = plan.method;
            out.alignment = alignment;
            out.english_debias = english_debias;
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neutralize_examples() {
        assert_eq!(neutralize(&[0.0, 1.0], &[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
        let v = neutralize(&[0.6, 0.8], &[1.0, 0.0]).unwrap();
        assert!(v[0].abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        assert!(neutralize(&[2.0, 0.0], &[1.0, 0.0]).is_err());
        assert!(neutralize(&[2.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn shift_examples() {
        let d = [1.0, 0.0];
        let (m, f, delta) = shift_pair(&[0.5, 0.3], &[-0.5, 0.1], &d, 0.0);
        assert_eq!(delta, 0.0);
        assert_eq!((m, f), (vec![0.5, 0.3], vec![-0.5, 0.1]));

        let (m, f, delta) = shift_pair(&[0.6, 0.3], &[-0.2, 0.1], &d, 0.0);
        assert!((delta - 0.2).abs() < 1e-15);
        assert!((m[0] - 0.4).abs() < 1e-15 && (f[0] + 0.4).abs() < 1e-15);
        assert_eq!((m[1], f[1]), (0.3, 0.1));

        let (m, f, delta) = shift_pair(&[0.6, 0.3], &[-0.2, 0.1], &d, 0.1);
        assert!((delta - 0.1).abs() < 1e-15);
        assert!((m[0] - 0.5).abs() < 1e-15 && (f[0] + 0.3).abs() < 1e-15);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
        assert!("frobnicate".parse::<Method>().is_err());
    }

    #[test]
    fn touch_set_validation() {
        let mut lex = GenderLexicon::default();
        assert!(check_touch_sets(&lex).is_err());
        lex.inanimate_nouns = vec!["mesa".into(), "mesa".into()];
        assert!(check_touch_sets(&lex).is_err());
        lex.inanimate_nouns = vec!["mesa".into()];
        lex.attributes_male = vec!["mesa".into()];
        assert!(check_touch_sets(&lex).is_err());
        lex.attributes_male.clear();
        assert!(check_touch_sets(&lex).is_ok());
    }

    #[test]
    fn orthogonality_of_identity() {
        assert_eq!(orthogonality_error(&DMatrix::identity(4, 4)), 0.0);
    }
}
