//! Word lists consumed by the bias measures and mitigation pipelines, plus
//! the bilingual dictionary and similarity dataset readers.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};

/// A (masculine, feminine) pair of word forms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct GenderPair {
    pub masculine: String,
    pub feminine: String,
}

impl GenderPair {
    pub fn new(masculine: impl Into<String>, feminine: impl Into<String>) -> Self {
        GenderPair {
            masculine: masculine.into(),
            feminine: feminine.into(),
        }
    }
}

impl TryFrom<Vec<String>> for GenderPair {
    type Error = String;

    fn try_from(v: Vec<String>) -> std::result::Result<Self, String> {
        match <[String; 2]>::try_from(v) {
            Ok([m, f]) => Ok(GenderPair::new(m, f)),
            Err(v) => Err(format!("expected [masculine, feminine], got {v:?}")),
        }
    }
}

impl From<GenderPair> for Vec<String> {
    fn from(p: GenderPair) -> Self {
        vec![p.masculine, p.feminine]
    }
}

/// The two forms of an occupation noun, optionally with the English word
/// they both translate to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct OccupationPair {
    pub masculine: String,
    pub feminine: String,
    pub english: Option<String>,
}

impl OccupationPair {
    pub fn new(masculine: impl Into<String>, feminine: impl Into<String>) -> Self {
        OccupationPair {
            masculine: masculine.into(),
            feminine: feminine.into(),
            english: None,
        }
    }

    pub fn with_english(mut self, english: impl Into<String>) -> Self {
        self.english = Some(english.into());
        self
    }

    /// Display key, e.g. `enfermero/enfermera`.
    pub fn key(&self) -> String {
        format!("{}/{}", self.masculine, self.feminine)
    }

    pub fn require_english(&self) -> Result<&str> {
        self.english.as_deref().ok_or_else(|| {
            Error::Lexicon(format!(
                "occupation pair {} has no English word",
                self.key()
            ))
        })
    }
}

impl TryFrom<Vec<String>> for OccupationPair {
    type Error = String;

    fn try_from(v: Vec<String>) -> std::result::Result<Self, String> {
        let mut it = v.into_iter();
        match (it.next(), it.next(), it.next(), it.next()) {
            (Some(m), Some(f), en, None) => Ok(OccupationPair {
                masculine: m,
                feminine: f,
                english: en,
            }),
            _ => Err("expected [masculine, feminine] or [masculine, feminine, english]".into()),
        }
    }
}

impl From<OccupationPair> for Vec<String> {
    fn from(p: OccupationPair) -> Self {
        let mut v = vec![p.masculine, p.feminine];
        v.extend(p.english);
        v
    }
}

/// An English adjective with its masculine and feminine translations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct AdjectivePair {
    pub english: String,
    pub masculine: String,
    pub feminine: String,
}

impl AdjectivePair {
    pub fn new(
        english: impl Into<String>,
        masculine: impl Into<String>,
        feminine: impl Into<String>,
    ) -> Self {
        AdjectivePair {
            english: english.into(),
            masculine: masculine.into(),
            feminine: feminine.into(),
        }
    }
}

impl TryFrom<Vec<String>> for AdjectivePair {
    type Error = String;

    fn try_from(v: Vec<String>) -> std::result::Result<Self, String> {
        match <[String; 3]>::try_from(v) {
            Ok([en, m, f]) => Ok(AdjectivePair::new(en, m, f)),
            Err(v) => Err(format!("expected [english, masculine, feminine], got {v:?}")),
        }
    }
}

impl From<AdjectivePair> for Vec<String> {
    fn from(p: AdjectivePair) -> Self {
        vec![p.english, p.masculine, p.feminine]
    }
}

/// All word lists for one language. Every list may be empty on load; the
/// analyses that need a list check it when they run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenderLexicon {
    #[serde(default)]
    pub definitional_pairs: Vec<GenderPair>,
    #[serde(default)]
    pub grammatical_masculine: Vec<String>,
    #[serde(default)]
    pub grammatical_feminine: Vec<String>,
    #[serde(default)]
    pub occupation_pairs: Vec<OccupationPair>,
    #[serde(default)]
    pub inanimate_nouns: Vec<String>,
    #[serde(default)]
    pub attributes_male: Vec<String>,
    #[serde(default)]
    pub attributes_female: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub adjective_pairs: Vec<AdjectivePair>,
}

/// Per-list sizes, reported after loading or filtering.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LexiconCounts {
    pub definitional_pairs: usize,
    pub grammatical_masculine: usize,
    pub grammatical_feminine: usize,
    pub occupation_pairs: usize,
    pub inanimate_nouns: usize,
    pub attributes_male: usize,
    pub attributes_female: usize,
    pub adjective_pairs: usize,
}

fn check_word(field: &str, w: &str) -> Result<()> {
    if w.is_empty() {
        Err(Error::Lexicon(format!("{field}: empty word")))
    } else {
        Ok(())
    }
}

fn check_pair(field: &str, m: &str, f: &str) -> Result<()> {
    check_word(field, m)?;
    check_word(field, f)?;
    if m == f {
        return Err(Error::Lexicon(format!(
            "{field}: pair ({m}, {f}) repeats the same word"
        )));
    }
    Ok(())
}

impl GenderLexicon {
    pub fn from_json_str(json: &str) -> Result<Self> {
        let lex: GenderLexicon =
            serde_json::from_str(json).map_err(|e| Error::Lexicon(e.to_string()))?;
        lex.validate()?;
        Ok(lex)
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.definitional_pairs {
            check_pair("definitional_pairs", &p.masculine, &p.feminine)?;
        }
        for p in &self.occupation_pairs {
            check_pair("occupation_pairs", &p.masculine, &p.feminine)?;
            if let Some(en) = &p.english {
                check_word("occupation_pairs", en)?;
            }
        }
        for p in &self.adjective_pairs {
            check_word("adjective_pairs", &p.english)?;
            check_pair("adjective_pairs", &p.masculine, &p.feminine)?;
        }
        for (field, list) in [
            ("grammatical_masculine", &self.grammatical_masculine),
            ("grammatical_feminine", &self.grammatical_feminine),
            ("inanimate_nouns", &self.inanimate_nouns),
            ("attributes_male", &self.attributes_male),
            ("attributes_female", &self.attributes_female),
        ] {
            for w in list {
                check_word(field, w)?;
            }
        }
        let masc: HashSet<&str> = self.grammatical_masculine.iter().map(String::as_str).collect();
        if let Some(w) = self
            .grammatical_feminine
            .iter()
            .find(|w| masc.contains(w.as_str()))
        {
            return Err(Error::Lexicon(format!(
                "{w:?} is listed as both grammatically masculine and feminine"
            )));
        }
        let male: HashSet<&str> = self.attributes_male.iter().map(String::as_str).collect();
        if let Some(w) = self
            .attributes_female
            .iter()
            .find(|w| male.contains(w.as_str()))
        {
            return Err(Error::Lexicon(format!(
                "{w:?} is in both attributes_male and attributes_female"
            )));
        }
        Ok(())
    }

    pub fn counts(&self) -> LexiconCounts {
        LexiconCounts {
            definitional_pairs: self.definitional_pairs.len(),
            grammatical_masculine: self.grammatical_masculine.len(),
            grammatical_feminine: self.grammatical_feminine.len(),
            occupation_pairs: self.occupation_pairs.len(),
            inanimate_nouns: self.inanimate_nouns.len(),
            attributes_male: self.attributes_male.len(),
            attributes_female: self.attributes_female.len(),
            adjective_pairs: self.adjective_pairs.len(),
        }
    }

    /// Every word of the lexicon in the lexicon's own language (English
    /// annotations excluded).
    pub fn all_words(&self) -> IndexSet<&str> {
        let mut out = IndexSet::new();
        for p in &self.definitional_pairs {
            out.insert(p.masculine.as_str());
            out.insert(p.feminine.as_str());
        }
        for p in &self.occupation_pairs {
            out.insert(p.masculine.as_str());
            out.insert(p.feminine.as_str());
        }
        for p in &self.adjective_pairs {
            out.insert(p.masculine.as_str());
            out.insert(p.feminine.as_str());
        }
        for list in [
            &self.grammatical_masculine,
            &self.grammatical_feminine,
            &self.inanimate_nouns,
            &self.attributes_male,
            &self.attributes_female,
        ] {
            out.extend(list.iter().map(String::as_str));
        }
        out
    }
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<GenderLexicon> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    GenderLexicon::from_json_str(&text)
        .map_err(|e| Error::Lexicon(format!("{}: {e}", path.display())))
}

/// One item removed by [`coverage_filter`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DroppedItem {
    pub field: &'static str,
    pub item: String,
    pub missing: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub dropped: Vec<DroppedItem>,
}

impl CoverageReport {
    pub fn is_empty(&self) -> bool {
        self.dropped.is_empty()
    }
}

/// Drops every word absent from `space`, together with any pair that
/// contains it. English annotations are not checked here since they live in
/// a different space.
pub fn coverage_filter(lex: &GenderLexicon, space: &EmbeddingSpace) -> (GenderLexicon, CoverageReport) {
    let mut report = CoverageReport::default();
    let mut keep_list = |field: &'static str, list: &[String]| -> Vec<String> {
        list.iter()
            .filter(|w| {
                let ok = space.contains(w);
                if !ok {
                    report.dropped.push(DroppedItem {
                        field,
                        item: (*w).clone(),
                        missing: vec![(*w).clone()],
                    });
                }
                ok
            })
            .cloned()
            .collect()
    };
    let grammatical_masculine = keep_list("grammatical_masculine", &lex.grammatical_masculine);
    let grammatical_feminine = keep_list("grammatical_feminine", &lex.grammatical_feminine);
    let inanimate_nouns = keep_list("inanimate_nouns", &lex.inanimate_nouns);
    let attributes_male = keep_list("attributes_male", &lex.attributes_male);
    let attributes_female = keep_list("attributes_female", &lex.attributes_female);

    let missing_of = |words: &[&str]| -> Vec<String> {
        words
            .iter()
            .filter(|w| !space.contains(w))
            .map(|w| w.to_string())
            .collect()
    };
    let mut definitional_pairs = Vec::new();
    for p in &lex.definitional_pairs {
        let missing = missing_of(&[&p.masculine, &p.feminine]);
        if missing.is_empty() {
            definitional_pairs.push(p.clone());
        } else {
            report.dropped.push(DroppedItem {
                field: "definitional_pairs",
                item: format!("{}/{}", p.masculine, p.feminine),
                missing,
            });
        }
    }
    let mut occupation_pairs = Vec::new();
    for p in &lex.occupation_pairs {
        let missing = missing_of(&[&p.masculine, &p.feminine]);
        if missing.is_empty() {
            occupation_pairs.push(p.clone());
        } else {
            report.dropped.push(DroppedItem {
                field: "occupation_pairs",
                item: p.key(),
                missing,
            });
        }
    }
    let mut adjective_pairs = Vec::new();
    for p in &lex.adjective_pairs {
        let missing = missing_of(&[&p.masculine, &p.feminine]);
        if missing.is_empty() {
            adjective_pairs.push(p.clone());
        } else {
            report.dropped.push(DroppedItem {
                field: "adjective_pairs",
                item: format!("{}:{}/{}", p.english, p.masculine, p.feminine),
                missing,
            });
        }
    }
    let filtered = GenderLexicon {
        definitional_pairs,
        grammatical_masculine,
        grammatical_feminine,
        occupation_pairs,
        inanimate_nouns,
        attributes_male,
        attributes_female,
        adjective_pairs,
    };
    (filtered, report)
}

/// Source word to the set of accepted target translations, in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BilingualDictionary {
    entries: IndexMap<String, IndexSet<String>>,
}

impl BilingualDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, source: impl Into<String>, target: impl Into<String>) -> Result<()> {
        let (source, target) = (source.into(), target.into());
        if source.is_empty() || target.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "dictionary entry with empty side: {source:?} -> {target:?}"
            )));
        }
        self.entries.entry(source).or_default().insert(target);
        Ok(())
    }

    pub fn from_pairs<S, T>(pairs: impl IntoIterator<Item = (S, T)>) -> Result<Self>
    where
        S: Into<String>,
        T: Into<String>,
    {
        let mut d = Self::new();
        for (s, t) in pairs {
            d.insert(s, t)?;
        }
        Ok(d)
    }

    /// Identical-string matches between two vocabularies.
    pub fn identical_strings(src: &EmbeddingSpace, tgt: &EmbeddingSpace) -> Self {
        let mut d = Self::new();
        for w in src.words() {
            if tgt.contains(w) {
                d.entries.entry(w.clone()).or_default().insert(w.clone());
            }
        }
        d
    }

    /// Parses `source TAB target` lines. Lines without a tab fall back to
    /// whitespace separation, which is how MUSE dictionaries are shipped.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut d = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (s, t) = match line.split_once('\t') {
                Some((s, t)) => (s.trim(), t.trim()),
                None => {
                    let mut it = line.split_whitespace();
                    match (it.next(), it.next(), it.next()) {
                        (Some(s), Some(t), None) => (s, t),
                        _ => {
                            return Err(Error::Parse {
                                path: origin.to_path_buf(),
                                line: i + 1,
                                message: "expected `source<TAB>target`".into(),
                            })
                        }
                    }
                }
            };
            d.insert(s, t).map_err(|e| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn targets(&self, source: &str) -> Option<&IndexSet<String>> {
        self.entries.get(source)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &IndexSet<String>)> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// All `(source, target)` pairs, flattened.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.entries
            .iter()
            .flat_map(|(s, ts)| ts.iter().map(move |t| (s.as_str(), t.as_str())))
    }

    /// The dictionary with source and target swapped.
    pub fn reversed(&self) -> Self {
        let mut d = Self::new();
        for (s, t) in self.pairs() {
            d.entries.entry(t.to_string()).or_default().insert(s.to_string());
        }
        d
    }
}

pub fn load_dictionary(path: impl AsRef<Path>) -> Result<BilingualDictionary> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    BilingualDictionary::parse(&text, path)
}

/// A human-rated word pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimilarityItem {
    pub first: String,
    pub second: String,
    pub score: f64,
}

/// Parses `word1 TAB word2 TAB score` lines.
pub fn parse_similarity_dataset(text: &str, origin: &Path) -> Result<Vec<SimilarityItem>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: origin.to_path_buf(),
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        let [a, b, s] = fields.as_slice() else {
            return Err(err(format!("expected 3 tab-separated fields, got {}", fields.len())));
        };
        let score: f64 = s
            .trim()
            .parse()
            .map_err(|_| err(format!("unparsable score {s:?}")))?;
        if !score.is_finite() || a.is_empty() || b.is_empty() {
            return Err(err("empty word or non-finite score".into()));
        }
        out.push(SimilarityItem {
            first: a.trim().to_string(),
            second: b.trim().to_string(),
            score,
        });
    }
    Ok(out)
}

pub fn load_similarity_dataset(path: impl AsRef<Path>) -> Result<Vec<SimilarityItem>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_similarity_dataset(&text, path)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Masculine,
    Feminine,
}

/// `e_i : e_o = s_i : ?` with the gendered form of the occupation that
/// agrees with `s_i` as the expected answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalogyQuery {
    pub e_i: String,
    pub e_o: String,
    pub s_i: String,
    pub gold: String,
    pub gold_gender: Gender,
}

/// How a query set was assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AnalogySummary {
    pub adjectives: usize,
    pub occupation_pairs: usize,
    pub occupation_forms: usize,
    pub queries: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalogyQuerySet {
    pub queries: Vec<AnalogyQuery>,
    pub summary: AnalogySummary,
}

/// Pairs every adjective with every occupation: the masculine adjective
/// form asks for the masculine occupation form and the feminine for the
/// feminine, giving `2 * adjectives * occupations` queries.
pub fn build_analogy_queries(
    occupations: &[OccupationPair],
    adjectives: &[AdjectivePair],
) -> Result<AnalogyQuerySet> {
    if occupations.is_empty() || adjectives.is_empty() {
        return Err(Error::Insufficient(
            "analogy queries need at least one occupation pair and one adjective pair".into(),
        ));
    }
    let mut queries = Vec::with_capacity(2 * occupations.len() * adjectives.len());
    for adj in adjectives {
        for occ in occupations {
            let e_o = occ.require_english()?;
            for (s_i, gold, gender) in [
                (&adj.masculine, &occ.masculine, Gender::Masculine),
                (&adj.feminine, &occ.feminine, Gender::Feminine),
            ] {
                queries.push(AnalogyQuery {
                    e_i: adj.english.clone(),
                    e_o: e_o.to_string(),
                    s_i: s_i.clone(),
                    gold: gold.clone(),
                    gold_gender: gender,
                });
            }
        }
    }
    let summary = AnalogySummary {
        adjectives: adjectives.len(),
        occupation_pairs: occupations.len(),
        occupation_forms: 2 * occupations.len(),
        queries: queries.len(),
    };
    log::info!(
        "built {} analogy queries = {} adjectives x {} occupation forms",
        summary.queries,
        summary.adjectives,
        summary.occupation_forms
    );
    Ok(AnalogyQuerySet { queries, summary })
}
