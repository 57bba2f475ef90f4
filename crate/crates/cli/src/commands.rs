use std::collections::BTreeMap;
use std::path::Path;

use gendebias::bias::{audit as run_audit, mweat_pair, weat_assoc, BiasQuery, PermutationConfig, PermutationScheme};
use gendebias::eval::{
    annotated_words, export_projections as project_words, pair_translation_eval,
    word_similarity_eval, word_translation_eval, PairTranslationOptions, TranslationOptions,
};
use gendebias::geometry::{bilingual_directions, monolingual_directions, DirectionOptions};
use gendebias::lexicon::{
    build_analogy_queries, coverage_filter, load_dictionary, load_lexicon, load_similarity_dataset,
    CoverageReport, LexiconCounts,
};
use gendebias::mitigation::{mitigate as run_mitigation, EnglishDebiasConfig, Method, MitigationPlan};
use gendebias::{
    load_text_embeddings, save_text_embeddings, BilingualSpace, EmbeddingSpace, GenderDirections,
    GenderLexicon, Ridge,
};
use serde::Serialize;

use crate::output::{emit, emit_csv, json_document, write_file, MetaBuilder};
use crate::{Bilingual, CliError, Common};

/// Loads and unit-normalizes a space.
fn load_space(path: &Path, common: &Common, language: &str) -> Result<EmbeddingSpace, CliError> {
    let (space, stats) = load_text_embeddings(path, common.max_words)?;
    log::info!(
        "{}: {} words of dim {} ({} duplicates skipped)",
        path.display(),
        stats.loaded,
        space.dim(),
        stats.duplicates
    );
    Ok(space.unit_normalize()?.with_language(language))
}

#[derive(Serialize)]
struct LexiconInfo {
    counts: LexiconCounts,
    dropped: CoverageReport,
}

fn load_covered_lexicon(path: &Path, space: &EmbeddingSpace) -> Result<(GenderLexicon, LexiconInfo), CliError> {
    let (lex, report) = coverage_filter(&load_lexicon(path)?, space);
    for d in &report.dropped {
        log::warn!("{}: dropped {} {:?} (missing {:?})", path.display(), d.field, d.item, d.missing);
    }
    let info = LexiconInfo {
        counts: lex.counts(),
        dropped: report,
    };
    Ok((lex, info))
}

fn direction_options(common: &Common, ridge: Ridge, cv_folds: Option<usize>) -> DirectionOptions {
    DirectionOptions {
        ridge,
        cv_folds,
        seed: common.seed,
        ..DirectionOptions::default()
    }
}

/// Both English paths or neither.
fn english_pair(b: &Bilingual) -> Result<Option<(&Path, &Path)>, CliError> {
    match (&b.embeddings_en, &b.lexicon_en) {
        (Some(e), Some(l)) => Ok(Some((e, l))),
        (None, None) => Ok(None),
        _ => Err(CliError::invalid("--embeddings-en and --lexicon-en must be given together")),
    }
}

struct LoadedBilingual {
    space: EmbeddingSpace,
    lexicon: GenderLexicon,
    info: LexiconInfo,
}

fn load_english(
    en: Option<(&Path, &Path)>,
    common: &Common,
    meta: &mut MetaBuilder,
) -> Result<Option<LoadedBilingual>, CliError> {
    let Some((emb, lex)) = en else {
        return Ok(None);
    };
    meta.input("embeddings_en", emb)?.input("lexicon_en", lex)?;
    let space = load_space(emb, common, "en")?;
    let (lexicon, info) = load_covered_lexicon(lex, &space)?;
    Ok(Some(LoadedBilingual { space, lexicon, info }))
}

fn fit_directions(
    src: &EmbeddingSpace,
    lex: &GenderLexicon,
    en: Option<&LoadedBilingual>,
    options: &DirectionOptions,
) -> Result<GenderDirections, CliError> {
    Ok(match en {
        Some(en) => {
            let bi = BilingualSpace::new(src.clone(), en.space.clone())?;
            bilingual_directions(&bi, lex, &en.lexicon.definitional_pairs, options)?
        }
        None => monolingual_directions(src, lex, options)?,
    })
}

pub fn directions(
    common: &Common,
    embeddings: &Path,
    lexicon: &Path,
    bilingual: &Bilingual,
    ridge: Ridge,
    cv_folds: Option<usize>,
) -> Result<(), CliError> {
    let en_paths = english_pair(bilingual)?;
    let mut meta = MetaBuilder::new("directions", common.seed, common.max_words);
    meta.input("embeddings", embeddings)?.input("lexicon", lexicon)?;
    meta.option("ridge", ridge).option("cv_folds", cv_folds);
    let src = load_space(embeddings, common, "src")?;
    let (lex, info) = load_covered_lexicon(lexicon, &src)?;
    let en = load_english(en_paths, common, &mut meta)?;
    let dirs = fit_directions(&src, &lex, en.as_ref(), &direction_options(common, ridge, cv_folds))?;

    #[derive(Serialize)]
    struct Body<'a> {
        mode: &'static str,
        directions: &'a GenderDirections,
        lexicon: &'a LexiconInfo,
        #[serde(skip_serializing_if = "Option::is_none")]
        lexicon_en: Option<&'a LexiconInfo>,
    }
    let body = Body {
        mode: if en.is_some() { "bilingual" } else { "monolingual" },
        directions: &dirs,
        lexicon: &info,
        lexicon_en: en.as_ref().map(|e| &e.info),
    };
    emit(common.out.as_deref(), &json_document(&meta.build(), &body)?)
}

pub fn audit(
    common: &Common,
    embeddings: &Path,
    lexicon: &Path,
    n_perm: usize,
    scheme: PermutationScheme,
) -> Result<(), CliError> {
    let mut meta = MetaBuilder::new("audit", common.seed, common.max_words);
    meta.input("embeddings", embeddings)?.input("lexicon", lexicon)?;
    meta.n_perm(n_perm).option("scheme", scheme);
    let space = load_space(embeddings, common, "src")?;
    let (lex, info) = load_covered_lexicon(lexicon, &space)?;
    let query = BiasQuery::occupations(&lex)?;
    let config = PermutationConfig {
        n_perm,
        seed: common.seed,
        scheme,
    };
    let report = run_audit(&query, &lex.inanimate_nouns, &space, &config)?;

    #[derive(Serialize)]
    struct Body<'a> {
        report: &'a gendebias::bias::BiasReport,
        lexicon: &'a LexiconInfo,
    }
    let body = Body {
        report: &report,
        lexicon: &info,
    };
    emit(common.out.as_deref(), &json_document(&meta.build(), &body)?)
}

pub fn mitigate(
    common: &Common,
    method: Method,
    embeddings: &Path,
    lexicon: &Path,
    bilingual: &Bilingual,
    seed_dict: Option<&Path>,
    ridge: Ridge,
) -> Result<(), CliError> {
    let out_dir = common
        .out
        .as_deref()
        .ok_or_else(|| CliError::invalid("mitigate needs --out <DIR>"))?;
    let en_paths = english_pair(bilingual)?;
    if method.needs_english() && en_paths.is_none() {
        return Err(CliError::invalid(format!(
            "{method} needs --embeddings-en and --lexicon-en"
        )));
    }
    let mut meta = MetaBuilder::new("mitigate", common.seed, common.max_words);
    meta.input("embeddings", embeddings)?.input("lexicon", lexicon)?;
    meta.option("method", method).option("ridge", ridge);
    let src = load_space(embeddings, common, "src")?;
    let (lex, info) = load_covered_lexicon(lexicon, &src)?;
    let en = load_english(en_paths, common, &mut meta)?;
    let seed = match seed_dict {
        Some(p) => {
            meta.input("seed_dict", p)?;
            Some(load_dictionary(p)?)
        }
        None => None,
    };
    let en_config = en.as_ref().map(|e| EnglishDebiasConfig::from_lexicon(&e.lexicon));
    let plan = MitigationPlan {
        method,
        source: &src,
        english: en.as_ref().map(|e| &e.space),
        lexicon: &lex,
        english_config: en_config.as_ref(),
        seed_dictionary: seed.as_ref(),
        directions: direction_options(common, ridge, None),
    };
    let outcome = run_mitigation(&plan)?;

    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut files = vec!["source.vec"];
    save_text_embeddings(&outcome.space, out_dir.join("source.vec"))?;
    if let Some(en) = &outcome.english {
        save_text_embeddings(en, out_dir.join("english.vec"))?;
        files.push("english.vec");
    }

    #[derive(Serialize)]
    struct Body<'a> {
        outcome: gendebias::mitigation::MitigationSummary<'a>,
        files: &'a [&'a str],
        lexicon: &'a LexiconInfo,
    }
    let body = Body {
        outcome: outcome.summary(),
        files: &files,
        lexicon: &info,
    };
    let text = json_document(&meta.build(), &body)?;
    write_file(&out_dir.join("outcome.json"), text.as_bytes())
}

pub fn eval_similarity(common: &Common, embeddings: &Path, dataset: &Path) -> Result<(), CliError> {
    let mut meta = MetaBuilder::new("eval-similarity", common.seed, common.max_words);
    meta.input("embeddings", embeddings)?.input("dataset", dataset)?;
    let space = load_space(embeddings, common, "src")?;
    let data = load_similarity_dataset(dataset)?;
    let meta = meta.build();
    let report = word_similarity_eval(&space, &data)?.with_config_digest(&meta.config_digest);
    emit(common.out.as_deref(), &json_document(&meta, &report)?)
}

pub fn eval_translation(
    common: &Common,
    embeddings: &Path,
    embeddings_en: &Path,
    dict: &Path,
    csls: bool,
    reverse: bool,
    details: Option<&Path>,
) -> Result<(), CliError> {
    let mut meta = MetaBuilder::new("eval-translation", common.seed, common.max_words);
    meta.input("embeddings", embeddings)?
        .input("embeddings_en", embeddings_en)?
        .input("dict", dict)?;
    meta.option("csls", csls).option("reverse", reverse);
    let src = load_space(embeddings, common, "src")?;
    let en = load_space(embeddings_en, common, "en")?;
    let dictionary = load_dictionary(dict)?;
    let bi = if reverse {
        BilingualSpace::new(en, src)?
    } else {
        BilingualSpace::new(src, en)?
    };
    let options = TranslationOptions {
        csls,
        ..TranslationOptions::default()
    };
    let meta = meta.build();
    let eval = word_translation_eval(&bi, &dictionary, &options)?;
    if let Some(path) = details {
        let mut buf = Vec::new();
        eval.write_details_csv(&mut buf)?;
        let csv = String::from_utf8(buf).map_err(|e| CliError::invalid(e.to_string()))?;
        emit_csv(Some(path), &meta, &csv)?;
    }
    let report = eval.report.with_config_digest(&meta.config_digest);
    emit(common.out.as_deref(), &json_document(&meta, &report)?)
}

pub fn eval_pairs(
    common: &Common,
    embeddings: &Path,
    embeddings_en: &Path,
    lexicon: &Path,
    occupations_only: bool,
) -> Result<(), CliError> {
    let mut meta = MetaBuilder::new("eval-pairs", common.seed, common.max_words);
    meta.input("embeddings", embeddings)?
        .input("embeddings_en", embeddings_en)?
        .input("lexicon", lexicon)?;
    meta.option("occupations_only", occupations_only);
    let src = load_space(embeddings, common, "src")?;
    let en = load_space(embeddings_en, common, "en")?;
    let (lex, info) = load_covered_lexicon(lexicon, &src)?;
    let queries = build_analogy_queries(&lex.occupation_pairs, &lex.adjective_pairs)?;
    log::info!(
        "{} analogy queries from {} adjectives and {} occupation forms",
        queries.summary.queries,
        queries.summary.adjectives,
        queries.summary.occupation_forms
    );
    let bi = BilingualSpace::new(src, en)?;
    let meta = meta.build();
    let eval = pair_translation_eval(
        &bi,
        &queries.queries,
        Some(&lex.occupation_pairs),
        &PairTranslationOptions { occupations_only },
    )?;

    #[derive(Serialize)]
    struct Body<'a> {
        report: gendebias::eval::EvalReport,
        queries: &'a gendebias::lexicon::AnalogySummary,
        lexicon: &'a LexiconInfo,
    }
    let body = Body {
        report: eval.report.with_config_digest(&meta.config_digest),
        queries: &queries.summary,
        lexicon: &info,
    };
    emit(common.out.as_deref(), &json_document(&meta, &body)?)
}

/// Reads the `directions` record from a `directions` output, or a bare
/// record.
fn read_directions(path: &Path) -> Result<GenderDirections, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(inner) = value.get_mut("directions") {
        value = inner.take();
    }
    let dirs: GenderDirections = serde_json::from_value(value)?;
    dirs.check()?;
    Ok(dirs)
}

pub fn export_projections(
    common: &Common,
    embeddings: &Path,
    lexicon: &Path,
    bilingual: &Bilingual,
    directions: Option<&Path>,
    ridge: Ridge,
) -> Result<(), CliError> {
    let en_paths = english_pair(bilingual)?;
    let mut meta = MetaBuilder::new("export-projections", common.seed, common.max_words);
    meta.input("embeddings", embeddings)?.input("lexicon", lexicon)?;
    meta.option("ridge", ridge);
    let src = load_space(embeddings, common, "src")?;
    let (lex, _) = load_covered_lexicon(lexicon, &src)?;
    let dirs = match directions {
        Some(p) => {
            meta.input("directions", p)?;
            read_directions(p)?
        }
        None => {
            let en = load_english(en_paths, common, &mut meta)?;
            fit_directions(&src, &lex, en.as_ref(), &direction_options(common, ridge, None))?
        }
    };
    let table = project_words(&src, &annotated_words(&lex), &dirs)?;
    if !table.missing.is_empty() {
        log::warn!("{} lexicon words missing from the space", table.missing.len());
    }
    emit_csv(common.out.as_deref(), &meta.build(), &table.to_csv_string()?)
}

pub fn correlate(
    common: &Common,
    embeddings: &Path,
    lexicon: &Path,
    embeddings_en: &Path,
    lexicon_en: &Path,
    signed: bool,
) -> Result<(), CliError> {
    let mut meta = MetaBuilder::new("correlate", common.seed, common.max_words);
    meta.input("embeddings", embeddings)?
        .input("lexicon", lexicon)?
        .input("embeddings_en", embeddings_en)?
        .input("lexicon_en", lexicon_en)?;
    meta.option("signed", signed);
    let src = load_space(embeddings, common, "src")?;
    let (lex, _) = load_covered_lexicon(lexicon, &src)?;
    let en = load_space(embeddings_en, common, "en")?;
    let (en_lex, _) = load_covered_lexicon(lexicon_en, &en)?;

    #[derive(Serialize)]
    struct Row {
        pair: String,
        english: String,
        source_score: f64,
        english_score: f64,
    }
    let mut rows = Vec::new();
    for p in &lex.occupation_pairs {
        let Some(e) = p.english.as_deref().filter(|e| en.contains(e)) else {
            log::warn!("skipping {}: English word missing", p.key());
            continue;
        };
        let s = mweat_pair(
            &p.masculine,
            &p.feminine,
            &lex.attributes_male,
            &lex.attributes_female,
            &src,
            signed,
        )?;
        let t = weat_assoc(e, &en_lex.attributes_male, &en_lex.attributes_female, &en)?;
        rows.push(Row {
            pair: p.key(),
            english: e.to_string(),
            source_score: s,
            english_score: if signed { t } else { t.abs() },
        });
    }
    let a: BTreeMap<String, f64> = rows.iter().map(|r| (r.pair.clone(), r.source_score)).collect();
    let b: BTreeMap<String, f64> = rows.iter().map(|r| (r.pair.clone(), r.english_score)).collect();
    let correlation = gendebias::bias::bias_correlation(&a, &b)?;

    #[derive(Serialize)]
    struct Body {
        correlation: gendebias::bias::Correlation,
        occupations: Vec<Row>,
    }
    let body = Body {
        correlation,
        occupations: rows,
    };
    emit(common.out.as_deref(), &json_document(&meta.build(), &body)?)
}
