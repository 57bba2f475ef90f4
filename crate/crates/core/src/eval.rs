//! Utility and bias evaluations: word similarity, word translation P@k,
//! analogy-based pair translation (MRR and ASD), and projection tables.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{rank_order, select_top_k, BilingualSpace, EmbeddingSpace, Neighbor};
use crate::error::{Error, Result};
use crate::geometry::GenderDirections;
use crate::lexicon::{
    AnalogyQuery, BilingualDictionary, Gender, GenderLexicon, OccupationPair, SimilarityItem,
};
use crate::linalg::{dot, norm};
use crate::stats;

pub const MIN_SIMILARITY_ROWS: usize = 5;
/// Neighborhood size for the CSLS penalty terms.
pub const CSLS_NEIGHBORS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Similarity,
    Translation,
    PairTranslation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub evaluated: usize,
    pub total: usize,
}

impl Coverage {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.evaluated as f64 / self.total as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub metrics: BTreeMap<String, f64>,
    pub coverage: Coverage,
    /// Filled in by the caller that knows the run configuration.
    pub config_digest: String,
}

impl EvalReport {
    fn new(task: Task, coverage: Coverage) -> Self {
        EvalReport {
            task,
            metrics: BTreeMap::new(),
            coverage,
            config_digest: String::new(),
        }
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }

    pub fn with_config_digest(mut self, digest: impl Into<String>) -> Self {
        self.config_digest = digest.into();
        self
    }
}

fn cosine_or_none(a: &[f64], b: &[f64]) -> Option<f64> {
    let d = norm(a) * norm(b);
    (d > 0.0).then(|| (dot(a, b) / d).clamp(-1.0, 1.0))
}

/// Pearson correlation between model cosine and human score over the rows
/// whose two words are both in the vocabulary.
pub fn word_similarity_eval(space: &EmbeddingSpace, dataset: &[SimilarityItem]) -> Result<EvalReport> {
    let (model, human): (Vec<f64>, Vec<f64>) = dataset
        .iter()
        .filter_map(|item| {
            let a = space.vector(&item.first)?;
            let b = space.vector(&item.second)?;
            Some((cosine_or_none(a, b)?, item.score))
        })
        .unzip();
    if model.len() < MIN_SIMILARITY_ROWS {
        return Err(Error::Insufficient(format!(
            "only {} similarity rows are covered by the vocabulary, need {MIN_SIMILARITY_ROWS}",
            model.len()
        )));
    }
    let mut report = EvalReport::new(
        Task::Similarity,
        Coverage {
            evaluated: model.len(),
            total: dataset.len(),
        },
    );
    report
        .metrics
        .insert("pearson_r".into(), stats::pearson(&model, &human)?);
    report
        .metrics
        .insert("spearman_rho".into(), stats::spearman(&model, &human)?);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationOptions {
    pub ks: Vec<usize>,
    pub csls: bool,
}

impl Default for TranslationOptions {
    fn default() -> Self {
        TranslationOptions {
            ks: vec![1, 5],
            csls: false,
        }
    }
}

/// One row of the translation-detail table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TranslationDetail {
    pub query: String,
    pub gold: Vec<String>,
    pub top: Vec<Neighbor>,
    pub hit_at_1: bool,
    pub hit_at_5: bool,
}

#[derive(Clone, Debug)]
pub struct TranslationEval {
    pub report: EvalReport,
    pub details: Vec<TranslationDetail>,
}

fn csv_error(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

impl TranslationEval {
    /// One row per query. Gold translations and retrieved words are joined
    /// with `|`.
    pub fn write_details_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["query", "gold", "top", "hit_at_1", "hit_at_5"])
            .map_err(csv_error)?;
        for d in &self.details {
            let top: Vec<&str> = d.top.iter().map(|n| n.word.as_str()).collect();
            w.write_record([
                d.query.as_str(),
                &d.gold.join("|"),
                &top.join("|"),
                if d.hit_at_1 { "1" } else { "0" },
                if d.hit_at_5 { "1" } else { "0" },
            ])
            .map_err(csv_error)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        Ok(())
    }
}

/// Mean cosine of each row of `from` to its `k` nearest rows of `to`.
fn mean_neighbor_similarity(from: &EmbeddingSpace, to: &EmbeddingSpace, k: usize) -> Result<Vec<f64>> {
    let none = HashSet::new();
    (0..from.len())
        .into_par_iter()
        .map(|i| {
            let x = from.row(i);
            let nx = norm(x);
            if nx == 0.0 {
                return Ok(0.0);
            }
            let top = select_top_k(to, k, &none, |j| {
                let n = to.row_norm(j);
                (n > 0.0).then(|| (dot(x, to.row(j)) / (n * nx)).clamp(-1.0, 1.0))
            })?;
            Ok(top.iter().map(|n| n.score).sum::<f64>() / top.len() as f64)
        })
        .collect()
}

/// Word translation precision at each `k`, in percent. A query scores at
/// `k` when any gold translation is among its `k` best target words. The
/// source word itself is not excluded from the target candidates.
pub fn word_translation_eval(
    bi: &BilingualSpace,
    dict: &BilingualDictionary,
    options: &TranslationOptions,
) -> Result<TranslationEval> {
    let mut ks = options.ks.clone();
    ks.sort_unstable();
    ks.dedup();
    if ks.first() == Some(&0) || ks.is_empty() {
        return Err(Error::InvalidArgument("ks must be positive".into()));
    }
    let depth = ks.last().copied().unwrap_or(1).max(5);
    let (src, tgt) = (&bi.source, &bi.target);
    let queries: Vec<(&str, Vec<&str>, &[f64])> = dict
        .iter()
        .filter_map(|(s, gold)| {
            let v = src.vector(s)?;
            Some((s, gold.iter().map(String::as_str).collect(), v))
        })
        .collect();
    if queries.is_empty() {
        return Err(Error::Insufficient(
            "no dictionary source word is in the source vocabulary".into(),
        ));
    }
    let r_tgt = if options.csls {
        Some(mean_neighbor_similarity(tgt, src, CSLS_NEIGHBORS.min(src.len()))?)
    } else {
        None
    };
    let r_src_of = |x: &[f64]| -> Result<f64> {
        let none = HashSet::new();
        let nx = norm(x);
        let top = select_top_k(tgt, CSLS_NEIGHBORS.min(tgt.len()), &none, |j| {
            let n = tgt.row_norm(j);
            (n > 0.0 && nx > 0.0).then(|| (dot(x, tgt.row(j)) / (n * nx)).clamp(-1.0, 1.0))
        })?;
        Ok(top.iter().map(|n| n.score).sum::<f64>() / top.len() as f64)
    };
    let none = HashSet::new();
    let details: Vec<TranslationDetail> = queries
        .par_iter()
        .map(|(word, gold, x)| {
            let nx = norm(x);
            let top = match &r_tgt {
                None => select_top_k(tgt, depth, &none, |j| {
                    let n = tgt.row_norm(j);
                    (n > 0.0 && nx > 0.0)
                        .then(|| (dot(x, tgt.row(j)) / (n * nx)).clamp(-1.0, 1.0))
                })?,
                Some(r_tgt) => {
                    let r_x = r_src_of(x)?;
                    select_top_k(tgt, depth, &none, |j| {
                        let n = tgt.row_norm(j);
                        (n > 0.0 && nx > 0.0).then(|| {
                            2.0 * (dot(x, tgt.row(j)) / (n * nx)).clamp(-1.0, 1.0) - r_x - r_tgt[j]
                        })
                    })?
                }
            };
            let hit = |k: usize| top.iter().take(k).any(|n| gold.contains(&n.word.as_str()));
            Ok(TranslationDetail {
                query: word.to_string(),
                gold: gold.iter().map(|g| g.to_string()).collect(),
                hit_at_1: hit(1),
                hit_at_5: hit(5),
                top,
            })
        })
        .collect::<Result<_>>()?;
    let mut report = EvalReport::new(
        Task::Translation,
        Coverage {
            evaluated: details.len(),
            total: dict.len(),
        },
    );
    for k in ks {
        let hits = details
            .iter()
            .filter(|d| d.top.iter().take(k).any(|n| d.gold.contains(&n.word)))
            .count();
        report
            .metrics
            .insert(format!("p_at_{k}"), 100.0 * hits as f64 / details.len() as f64);
    }
    let details = details
        .into_iter()
        .map(|mut d| {
            d.top.truncate(5);
            d
        })
        .collect();
    Ok(TranslationEval { report, details })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairTranslationOptions {
    /// Rank only occupation forms instead of the whole source vocabulary.
    pub occupations_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryRank {
    pub e_i: String,
    pub e_o: String,
    pub s_i: String,
    pub gold: String,
    pub gold_gender: Gender,
    pub rank: usize,
}

#[derive(Clone, Debug)]
pub struct PairTranslationEval {
    pub report: EvalReport,
    pub ranks: Vec<QueryRank>,
}

/// 1-based rank of `gold` among the candidate rows by cosine to `query`,
/// ties broken by ascending word. `None` if the gold row cannot be scored.
pub fn analogy_rank(
    space: &EmbeddingSpace,
    query: &[f64],
    gold: &str,
    exclude: &HashSet<&str>,
    candidates: Option<&[usize]>,
) -> Option<usize> {
    let qn = norm(query);
    if qn == 0.0 {
        return None;
    }
    let score = |i: usize| {
        let n = space.row_norm(i);
        (n > 0.0).then(|| (dot(query, space.row(i)) / (n * qn)).clamp(-1.0, 1.0))
    };
    let gi = space.index_of(gold)?;
    let gs = score(gi)?;
    let better = |i: usize| {
        let w = space.words()[i].as_str();
        if i == gi || exclude.contains(w) {
            return false;
        }
        matches!(score(i), Some(s) if rank_order(s, w, gs, gold) == Ordering::Less)
    };
    let ahead = match candidates {
        Some(c) => c.iter().filter(|&&i| better(i)).count(),
        None => (0..space.len()).filter(|&i| better(i)).count(),
    };
    Some(ahead + 1)
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Mean over English-annotated occupation pairs of
/// `|cos(w_m, e) − cos(w_f, e)|`, with `e` the English word. Pairs with any
/// word missing are skipped; returns the value and the pair count.
pub fn average_similarity_difference(
    bi: &BilingualSpace,
    occupations: &[OccupationPair],
) -> Result<(f64, usize)> {
    let gaps: Vec<f64> = occupations
        .iter()
        .filter_map(|p| {
            let e = bi.target.vector(p.english.as_deref()?)?;
            let m = bi.source.vector(&p.masculine)?;
            let f = bi.source.vector(&p.feminine)?;
            Some((cosine_or_none(m, e)? - cosine_or_none(f, e)?).abs())
        })
        .collect();
    let asd = mean(gaps.iter().copied()).ok_or_else(|| {
        Error::Insufficient("ASD needs at least one English-annotated occupation pair".into())
    })?;
    Ok((asd, gaps.len()))
}

/// Analogy translation `E_i : E_o = S_i : ?`, ranking source words by
/// `cos(S_o, E_o − E_i + S_i)`. `E_i`, `E_o` and `S_i` are excluded from
/// the candidates; the gold form never is. With `asd_pairs`, the average
/// similarity difference is reported too.
pub fn pair_translation_eval(
    bi: &BilingualSpace,
    queries: &[AnalogyQuery],
    asd_pairs: Option<&[OccupationPair]>,
    options: &PairTranslationOptions,
) -> Result<PairTranslationEval> {
    let (src, tgt) = (&bi.source, &bi.target);
    let restricted: Option<Vec<usize>> = options.occupations_only.then(|| {
        let mut idx: Vec<usize> = queries
            .iter()
            .filter_map(|q| src.index_of(&q.gold))
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    });
    let ranks: Vec<Option<QueryRank>> = queries
        .par_iter()
        .map(|q| {
            let e_i = tgt.vector(&q.e_i)?;
            let e_o = tgt.vector(&q.e_o)?;
            let s_i = src.vector(&q.s_i)?;
            src.vector(&q.gold)?;
            let v: Vec<f64> = (0..src.dim()).map(|j| e_o[j] - e_i[j] + s_i[j]).collect();
            let exclude: HashSet<&str> = [q.e_i.as_str(), q.e_o.as_str(), q.s_i.as_str()]
                .into_iter()
                .filter(|w| *w != q.gold)
                .collect();
            let rank = analogy_rank(src, &v, &q.gold, &exclude, restricted.as_deref())?;
            Some(QueryRank {
                e_i: q.e_i.clone(),
                e_o: q.e_o.clone(),
                s_i: q.s_i.clone(),
                gold: q.gold.clone(),
                gold_gender: q.gold_gender,
                rank,
            })
        })
        .collect();
    let ranks: Vec<QueryRank> = ranks.into_iter().flatten().collect();
    if ranks.is_empty() {
        return Err(Error::Insufficient("no analogy query is resolvable".into()));
    }
    let mrr = |g: Gender| {
        mean(
            ranks
                .iter()
                .filter(|r| r.gold_gender == g)
                .map(|r| 1.0 / r.rank as f64),
        )
    };
    let mut report = EvalReport::new(
        Task::PairTranslation,
        Coverage {
            evaluated: ranks.len(),
            total: queries.len(),
        },
    );
    let m = mrr(Gender::Masculine);
    let f = mrr(Gender::Feminine);
    if let Some(m) = m {
        report.metrics.insert("m_mrr".into(), m);
    }
    if let Some(f) = f {
        report.metrics.insert("f_mrr".into(), f);
    }
    if let (Some(m), Some(f)) = (m, f) {
        report.metrics.insert("mrr_diff".into(), (m - f).abs());
    }
    report.metrics.insert(
        "mrr".into(),
        mean(ranks.iter().map(|r| 1.0 / r.rank as f64)).unwrap_or(0.0),
    );
    if let Some(pairs) = asd_pairs {
        let (asd, _) = average_similarity_difference(bi, pairs)?;
        report.metrics.insert("asd".into(), asd);
    }
    Ok(PairTranslationEval { report, ranks })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionRow {
    pub word: String,
    pub group: String,
    pub grammatical_proj: f64,
    pub semantic_proj: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProjectionTable {
    pub rows: Vec<ProjectionRow>,
    pub missing: Vec<String>,
}

impl ProjectionTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["word", "group", "grammatical_proj", "semantic_proj"])
            .map_err(csv_error)?;
        for r in &self.rows {
            w.write_record([
                r.word.as_str(),
                r.group.as_str(),
                &r.grammatical_proj.to_string(),
                &r.semantic_proj.to_string(),
            ])
            .map_err(csv_error)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

/// `(group, word)` labels for every lexicon word used in projection plots,
/// in lexicon order.
pub fn annotated_words(lex: &GenderLexicon) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut push = |group: &str, w: &String| out.push((group.to_string(), w.clone()));
    for w in &lex.grammatical_masculine {
        push("grammatical_masculine", w);
    }
    for w in &lex.grammatical_feminine {
        push("grammatical_feminine", w);
    }
    for p in &lex.definitional_pairs {
        push("definitional_masculine", &p.masculine);
        push("definitional_feminine", &p.feminine);
    }
    for p in &lex.occupation_pairs {
        push("occupation_masculine", &p.masculine);
        push("occupation_feminine", &p.feminine);
    }
    for w in &lex.inanimate_nouns {
        push("inanimate", w);
    }
    out
}

/// Raw projections `⟨w, d_g⟩` and `⟨w, d_s⟩` in input order. Missing words
/// are skipped and listed.
pub fn export_projections(
    space: &EmbeddingSpace,
    words: &[(String, String)],
    directions: &GenderDirections,
) -> Result<ProjectionTable> {
    if directions.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            actual: directions.dim(),
        });
    }
    let mut table = ProjectionTable::default();
    for (group, word) in words {
        match space.vector(word) {
            Some(v) => table.rows.push(ProjectionRow {
                word: word.clone(),
                group: group.clone(),
                grammatical_proj: dot(v, &directions.d_g),
                semantic_proj: dot(v, &directions.d_s),
            }),
            None => table.missing.push(word.clone()),
        }
    }
    Ok(table)
}
