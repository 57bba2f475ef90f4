//! Dense word-embedding spaces: loading, saving, normalization and exact
//! cosine retrieval.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

/// Tolerance on the Euclidean norm for a vector to count as unit length.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-6;

/// An immutable vocabulary-to-vector map. Vectors share one dimension and
/// iterate in insertion order.
#[derive(Clone, Debug)]
pub struct EmbeddingSpace {
    language: String,
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    norms: Vec<f64>,
    normalized: bool,
}

/// Collects rows for an [`EmbeddingSpace`]; duplicate words keep the first
/// vector.
#[derive(Debug)]
pub struct SpaceBuilder {
    language: String,
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    duplicates: usize,
}

impl SpaceBuilder {
    pub fn new(language: impl Into<String>, dim: usize) -> Self {
        SpaceBuilder {
            language: language.into(),
            dim,
            words: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
            duplicates: 0,
        }
    }

    /// Adds a row. Returns `Ok(false)` when the word was already present.
    pub fn push(&mut self, word: impl Into<String>, vector: &[f64]) -> Result<bool> {
        let word = word.into();
        if word.is_empty() || word.contains(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!(
                "invalid vocabulary entry {word:?}"
            )));
        }
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: vector.len(),
            });
        }
        if let Some(bad) = vector.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite component {bad} for {word:?}"
            )));
        }
        if self.index.contains_key(&word) {
            self.duplicates += 1;
            return Ok(false);
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.data.extend_from_slice(vector);
        Ok(true)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn build(self) -> Result<EmbeddingSpace> {
        if self.dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if self.words.is_empty() {
            return Err(Error::Insufficient("empty vocabulary".into()));
        }
        Ok(EmbeddingSpace::from_parts(
            self.language,
            self.dim,
            self.words,
            self.index,
            self.data,
            false,
        ))
    }
}

impl EmbeddingSpace {
    fn from_parts(
        language: String,
        dim: usize,
        words: Vec<String>,
        index: HashMap<String, usize>,
        data: Vec<f64>,
        normalized: bool,
    ) -> Self {
        let norms = data.chunks_exact(dim).map(norm).collect();
        EmbeddingSpace {
            language,
            dim,
            words,
            index,
            data,
            norms,
            normalized,
        }
    }

    /// Builds a space from `(word, vector)` rows, rejecting duplicates.
    pub fn from_rows<W, V, I>(language: &str, dim: usize, rows: I) -> Result<Self>
    where
        W: Into<String>,
        V: AsRef<[f64]>,
        I: IntoIterator<Item = (W, V)>,
    {
        let mut b = SpaceBuilder::new(language, dim);
        for (w, v) in rows {
            let w = w.into();
            if !b.push(w.clone(), v.as_ref())? {
                return Err(Error::InvalidArgument(format!("duplicate word {w:?}")));
            }
        }
        b.build()
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn with_language(mut self, language: impl Into<String>) -> Self {
        self.language = language.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.index_of(word).map(|i| self.row(i))
    }

    /// Like [`vector`](Self::vector), but a missing word is an error.
    pub fn require(&self, word: &str) -> Result<&[f64]> {
        self.vector(word)
            .ok_or_else(|| Error::MissingWord(word.to_string()))
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        self.norms[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> + '_ {
        self.words
            .iter()
            .map(String::as_str)
            .zip(self.data.chunks_exact(self.dim))
    }

    /// Returns a copy where the given rows are replaced. The normalized flag
    /// survives only if every replacement is itself unit length.
    pub fn with_rows_replaced(&self, updates: &[(usize, Vec<f64>)]) -> Result<Self> {
        let mut data = self.data.clone();
        let mut normalized = self.normalized;
        for (i, v) in updates {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    actual: v.len(),
                });
            }
            if *i >= self.len() {
                return Err(Error::InvalidArgument(format!("row {i} out of range")));
            }
            if (norm(v) - 1.0).abs() > UNIT_NORM_TOLERANCE {
                normalized = false;
            }
            data[i * self.dim..(i + 1) * self.dim].copy_from_slice(v);
        }
        Ok(EmbeddingSpace::from_parts(
            self.language.clone(),
            self.dim,
            self.words.clone(),
            self.index.clone(),
            data,
            normalized,
        ))
    }

    /// Applies `f` to every vector. `f` must preserve the dimension.
    pub fn map_rows<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Sync,
    {
        let rows: Vec<Vec<f64>> = self.data.par_chunks_exact(self.dim).map(&f).collect();
        let mut data = Vec::with_capacity(self.data.len());
        for r in rows {
            if r.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    actual: r.len(),
                });
            }
            data.extend(r);
        }
        let mut space = EmbeddingSpace::from_parts(
            self.language.clone(),
            self.dim,
            self.words.clone(),
            self.index.clone(),
            data,
            false,
        );
        space.normalized = space
            .norms
            .iter()
            .all(|n| (n - 1.0).abs() <= UNIT_NORM_TOLERANCE);
        Ok(space)
    }

    /// Scales every vector to unit length.
    pub fn unit_normalize(&self) -> Result<Self> {
        if let Some(i) = self.norms.iter().position(|n| *n == 0.0) {
            return Err(Error::ZeroVector(self.words[i].clone()));
        }
        let mut data = self.data.clone();
        for (row, n) in data.chunks_exact_mut(self.dim).zip(&self.norms) {
            row.iter_mut().for_each(|v| *v /= n);
        }
        Ok(EmbeddingSpace::from_parts(
            self.language.clone(),
            self.dim,
            self.words.clone(),
            self.index.clone(),
            data,
            true,
        ))
    }

    /// Exact cosine top-k; see [`top_k`].
    pub fn top_k(&self, query: &[f64], k: usize, exclude: &HashSet<&str>) -> Result<Vec<Neighbor>> {
        top_k(query, self, k, exclude)
    }
}

/// A gendered-language space and an English space that share one vector
/// space (alignment already applied).
#[derive(Clone, Debug)]
pub struct BilingualSpace {
    pub source: EmbeddingSpace,
    pub target: EmbeddingSpace,
}

impl BilingualSpace {
    pub fn new(source: EmbeddingSpace, target: EmbeddingSpace) -> Result<Self> {
        if source.dim() != target.dim() {
            return Err(Error::DimensionMismatch {
                expected: source.dim(),
                actual: target.dim(),
            });
        }
        Ok(BilingualSpace { source, target })
    }

    pub fn shared_dim(&self) -> usize {
        self.source.dim()
    }
}

/// Cosine similarity, clamped to `[-1, 1]`.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Degenerate("cosine of a zero vector".into()));
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// A retrieved word with its cosine score and 1-based rank.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Neighbor {
    pub word: String,
    pub score: f64,
    pub rank: usize,
}

/// Orders candidates best-first: higher score, then lexicographically
/// smaller word.
pub(crate) fn rank_order(score_a: f64, word_a: &str, score_b: f64, word_b: &str) -> Ordering {
    score_b
        .partial_cmp(&score_a)
        .unwrap_or(Ordering::Equal)
        .then_with(|| word_a.cmp(word_b))
}

struct HeapEntry<'a> {
    score: f64,
    word: &'a str,
}

impl PartialEq for HeapEntry<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry<'_> {}

impl PartialOrd for HeapEntry<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// The max-heap keeps the worst retained candidate on top.
impl Ord for HeapEntry<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        rank_order(self.score, self.word, other.score, other.word)
    }
}

/// The `k` words with the highest cosine to `query`, excluding `exclude`,
/// found by brute force over the whole vocabulary. Zero vectors in the space
/// are never returned.
pub fn top_k(
    query: &[f64],
    space: &EmbeddingSpace,
    k: usize,
    exclude: &HashSet<&str>,
) -> Result<Vec<Neighbor>> {
    if query.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            actual: query.len(),
        });
    }
    let qn = norm(query);
    if qn == 0.0 {
        return Err(Error::Degenerate("zero query vector".into()));
    }
    select_top_k(space, k, exclude, |i| {
        let n = space.row_norm(i);
        (n > 0.0).then(|| (dot(query, space.row(i)) / (n * qn)).clamp(-1.0, 1.0))
    })
}

/// Shared selection loop over the vocabulary. `score` returns `None` for
/// rows that cannot be ranked.
pub(crate) fn select_top_k<F>(
    space: &EmbeddingSpace,
    k: usize,
    exclude: &HashSet<&str>,
    score: F,
) -> Result<Vec<Neighbor>>
where
    F: Fn(usize) -> Option<f64>,
{
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::with_capacity(k + 1);
    let mut candidates = 0usize;
    for (idx, word) in space.words().iter().enumerate() {
        if exclude.contains(word.as_str()) {
            continue;
        }
        let Some(score) = score(idx) else { continue };
        candidates += 1;
        let entry = HeapEntry { score, word };
        if heap.len() < k {
            heap.push(entry);
        } else if let Some(worst) = heap.peek() {
            if entry.cmp(worst) == Ordering::Less {
                heap.pop();
                heap.push(entry);
            }
        }
    }
    if candidates == 0 {
        return Err(Error::Insufficient(
            "no retrieval candidates left after exclusion".into(),
        ));
    }
    Ok(heap
        .into_sorted_vec()
        .into_iter()
        .enumerate()
        .map(|(r, e)| Neighbor {
            word: e.word.to_string(),
            score: e.score,
            rank: r + 1,
        })
        .collect())
}

/// Counts reported by the text loader.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LoadStats {
    pub declared: usize,
    pub loaded: usize,
    pub duplicates: usize,
}

/// Reads the `<count> <dim>` header format used by word2vec and fastText
/// `.vec` files. At most `max_words` distinct words are kept, in file order.
pub fn read_text_embeddings<R: BufRead>(
    reader: R,
    origin: &Path,
    max_words: Option<usize>,
) -> Result<(EmbeddingSpace, LoadStats)> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    if max_words == Some(0) {
        return Err(Error::InvalidArgument("max_words must be positive".into()));
    }
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(l) => l.map_err(|e| Error::io(origin, e))?,
        None => return Err(parse_err(1, "missing header".into())),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (count, dim) = match fields.as_slice() {
        [c, d] => match (c.parse::<usize>(), d.parse::<usize>()) {
            (Ok(c), Ok(d)) if d > 0 => (c, d),
            _ => return Err(parse_err(1, format!("malformed header {header:?}"))),
        },
        _ => return Err(parse_err(1, format!("malformed header {header:?}"))),
    };
    let limit = max_words.map_or(count, |m| m.min(count));
    let mut builder = SpaceBuilder::new("und", dim);
    let mut values = Vec::with_capacity(dim);
    let mut read = 0usize;
    let mut line_no = 1usize;

    while builder.len() < limit {
        let Some(line) = lines.next() else {
            return Err(parse_err(
                line_no + 1,
                format!("header declares {count} entries but file ends after {read}"),
            ));
        };
        let line = line.map_err(|e| Error::io(origin, e))?;
        line_no += 1;
        read += 1;
        let line = line.trim_end_matches(['\r', ' ', '\t']);
        let mut tokens = line.split(' ').filter(|t| !t.is_empty());
        let word = tokens
            .next()
            .ok_or_else(|| parse_err(line_no, "empty line".into()))?;
        values.clear();
        for tok in tokens {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("unparsable component {tok:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(line_no, format!("non-finite component {tok:?}")));
            }
            values.push(v);
        }
        if values.len() != dim {
            return Err(parse_err(
                line_no,
                format!("expected {dim} components, found {}", values.len()),
            ));
        }
        builder
            .push(word, &values)
            .map_err(|e| parse_err(line_no, e.to_string()))?;
        if read == count {
            break;
        }
    }
    if builder.len() == count.min(limit) && read == count {
        for rest in lines {
            let rest = rest.map_err(|e| Error::io(origin, e))?;
            line_no += 1;
            if !rest.trim().is_empty() {
                return Err(parse_err(
                    line_no,
                    format!("more entries than the declared {count}"),
                ));
            }
        }
    }
    let duplicates = builder.duplicates();
    if duplicates > 0 {
        log::warn!(
            "{}: skipped {duplicates} duplicate vocabulary entries",
            origin.display()
        );
    }
    let space = builder.build().map_err(|e| match e {
        Error::Insufficient(_) => parse_err(line_no, "empty vocabulary".into()),
        other => other,
    })?;
    let stats = LoadStats {
        declared: count,
        loaded: space.len(),
        duplicates,
    };
    Ok((space, stats))
}

pub fn load_text_embeddings(
    path: impl AsRef<Path>,
    max_words: Option<usize>,
) -> Result<(EmbeddingSpace, LoadStats)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_text_embeddings(BufReader::new(file), path, max_words)
}

/// Writes the space in the text format read by [`load_text_embeddings`].
/// Components use the shortest decimal form that parses back to the same
/// `f64`.
pub fn write_text_embeddings<W: Write>(space: &EmbeddingSpace, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{} {}", space.len(), space.dim())?;
    for (word, v) in space.iter() {
        out.write_all(word.as_bytes())?;
        for x in v {
            write!(out, " {x}")?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn save_text_embeddings(space: &EmbeddingSpace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_text_embeddings(space, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load_str(s: &str, max: Option<usize>) -> Result<(EmbeddingSpace, LoadStats)> {
        read_text_embeddings(s.as_bytes(), Path::new("<mem>"), max)
    }

    #[test]
    fn minimal_file() {
        let (s, stats) = load_str("2 3\na 1 0 0\nb 0 1 0", None).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.len(), 2);
        assert!(!s.is_normalized());
        assert_eq!(stats.loaded, 2);
        assert_eq!(s.vector("b").unwrap(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn truncation_keeps_prefix() {
        let (s, _) = load_str("2 3\na 1 0 0\nb 0 1 0", Some(1)).unwrap();
        assert_eq!(s.words(), &["a".to_string()]);
    }

    #[test]
    fn wrong_component_count() {
        let err = load_str("1 3\na 1 0", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(err.to_string().contains("expected 3 components"));
    }

    #[test]
    fn malformed_header_and_values() {
        assert!(matches!(load_str("x 3\n", None), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load_str("1\n", None), Err(Error::Parse { line: 1, .. })));
        assert!(load_str("1 2\na NaN 1\n", None).is_err());
        assert!(load_str("1 2\na inf 1\n", None).is_err());
        assert!(load_str("1 2\na 0.5 zz\n", None).is_err());
        assert!(load_str("0 2\n", None).is_err());
        assert!(load_str("", None).is_err());
    }

    #[test]
    fn count_mismatches_are_errors() {
        assert!(load_str("3 2\na 1 0\nb 0 1\n", None).is_err());
        assert!(load_str("1 2\na 1 0\nb 0 1\n", None).is_err());
        // trailing blank lines are fine
        assert!(load_str("1 2\na 1 0\n\n", None).is_ok());
    }

    #[test]
    fn duplicates_keep_first() {
        let (s, stats) = load_str("3 2\na 1 0\na 0 1\nb 0 1\n", None).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(stats.duplicates, 1);
        assert_eq!(s.vector("a").unwrap(), &[1.0, 0.0]);
    }

    #[test]
    fn fasttext_trailing_space_and_crlf() {
        let (s, _) = load_str("1 2\r\nhola 0.5 -0.25 \r\n", None).unwrap();
        assert_eq!(s.vector("hola").unwrap(), &[0.5, -0.25]);
    }

    #[test]
    fn utf8_words_are_byte_exact() {
        let (s, _) = load_str("2 1\nNiño 1\nnino 2\n", None).unwrap();
        assert!(s.contains("Niño"));
        assert!(!s.contains("niño"));
    }

    #[test]
    fn normalize_3_4_5() {
        let s = EmbeddingSpace::from_rows("x", 2, [("a", [3.0, 4.0])]).unwrap();
        let n = s.unit_normalize().unwrap();
        assert!(n.is_normalized());
        let v = n.vector("a").unwrap();
        assert!((v[0] - 0.6).abs() < 1e-15 && (v[1] - 0.8).abs() < 1e-15);
        let again = n.unit_normalize().unwrap();
        for (x, y) in again.vector("a").unwrap().iter().zip(v) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_rejects_zero_vector() {
        let s = EmbeddingSpace::from_rows("x", 2, [("a", [1.0, 0.0]), ("nada", [0.0, 0.0])])
            .unwrap();
        match s.unit_normalize() {
            Err(Error::ZeroVector(w)) => assert_eq!(w, "nada"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(cosine(&[2.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        let c = cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert!(cosine(&[0.0, 0.0], &[1.0, 0.0]).is_err());
        assert!(cosine(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn top_k_self_and_exclusion() {
        let s = EmbeddingSpace::from_rows(
            "x",
            2,
            [("a", [1.0, 0.1]), ("b", [0.0, 1.0]), ("c", [1.0, 1.0])],
        )
        .unwrap();
        let q = s.vector("a").unwrap().to_vec();
        let hits = s.top_k(&q, 2, &HashSet::new()).unwrap();
        assert_eq!(hits[0].word, "a");
        assert!((hits[0].score - 1.0).abs() < 1e-12);
        assert_eq!(hits[0].rank, 1);
        assert_eq!(hits[1].rank, 2);

        let ex: HashSet<&str> = ["a"].into_iter().collect();
        let hits = s.top_k(&q, 3, &ex).unwrap();
        assert_eq!(hits.len(), 2);
        assert!(hits.iter().all(|n| n.word != "a"));

        let all: HashSet<&str> = ["a", "b", "c"].into_iter().collect();
        assert!(s.top_k(&q, 1, &all).is_err());
        assert!(s.top_k(&q, 0, &HashSet::new()).is_err());
        assert!(s.top_k(&[1.0], 1, &HashSet::new()).is_err());
    }

    #[test]
    fn ties_break_lexicographically() {
        let s = EmbeddingSpace::from_rows(
            "x",
            2,
            [("zeta", [1.0, 0.0]), ("alpha", [2.0, 0.0]), ("mid", [0.0, 1.0])],
        )
        .unwrap();
        let hits = s.top_k(&[1.0, 0.0], 2, &HashSet::new()).unwrap();
        assert_eq!(hits[0].word, "alpha");
        assert_eq!(hits[1].word, "zeta");
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.vec");
        let s = EmbeddingSpace::from_rows(
            "x",
            3,
            [("uno", [0.1, -2.5, 1e-7]), ("dos", [1.0 / 3.0, 2.0, -0.0])],
        )
        .unwrap()
        .unit_normalize()
        .unwrap();
        save_text_embeddings(&s, &path).unwrap();
        let (back, _) = load_text_embeddings(&path, None).unwrap();
        assert_eq!(back.words(), s.words());
        for (a, b) in back.iter().zip(s.iter()) {
            for (x, y) in a.1.iter().zip(b.1) {
                assert!((x - y).abs() <= 1e-6);
            }
            assert!((norm(a.1) - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn save_to_unwritable_path() {
        let s = EmbeddingSpace::from_rows("x", 1, [("a", [1.0])]).unwrap();
        let err = save_text_embeddings(&s, "/nonexistent-dir/sub/out.vec").unwrap_err();
        assert!(err.is_io());
    }

    #[test]
    fn replaced_rows_track_normalization() {
        let s = EmbeddingSpace::from_rows("x", 2, [("a", [1.0, 0.0]), ("b", [0.0, 1.0])])
            .unwrap()
            .unit_normalize()
            .unwrap();
        let same = s.with_rows_replaced(&[(0, vec![0.0, 1.0])]).unwrap();
        assert!(same.is_normalized());
        let off = s.with_rows_replaced(&[(0, vec![0.0, 2.0])]).unwrap();
        assert!(!off.is_normalized());
        assert_eq!(s.vector("a").unwrap(), &[1.0, 0.0]);
    }
}
