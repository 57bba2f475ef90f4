//! Planted-structure fixtures: a gendered-language space with a known
//! grammatical axis and semantic axis, an aligned English space, lexicons
//! and dictionaries. Used by tests, examples and benchmarks.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::embedding::{save_text_embeddings, EmbeddingSpace, SpaceBuilder};
use crate::error::{Error, Result};
use crate::lexicon::{
    AdjectivePair, BilingualDictionary, GenderLexicon, GenderPair, OccupationPair, SimilarityItem,
};

/// Shape of the planted fixture. Axis 0 is grammatical gender, axis 1 is
/// semantic gender (feminine positive); the other axes carry word content.
#[derive(Clone, Debug)]
pub struct FixtureConfig {
    pub dim: usize,
    pub vocab: usize,
    pub seed: u64,
    pub noise: f64,
    /// Grammatical offset: masculine nouns at `−γ`, feminine at `+γ`.
    pub grammatical: f64,
    pub occupation_feminine: f64,
    pub occupation_masculine: f64,
    /// Semantic offset of each English occupation word.
    pub english_occupation: f64,
    /// Definitional pair `i` sits at `∓c_i` with `c_i` spread over this range.
    pub definitional_range: (f64, f64),
    pub attribute_offset: f64,
    /// Semantic leak of inanimate nouns, signed with their grammatical gender.
    pub inanimate_leak: f64,
    pub definitional_pairs: usize,
    pub grammatical_per_class: usize,
    pub occupations: usize,
    pub inanimate: usize,
    pub attributes_per_side: usize,
    pub adjectives: usize,
}

impl Default for FixtureConfig {
    fn default() -> Self {
        FixtureConfig {
            dim: 50,
            vocab: 500,
            seed: 20_191_103,
            noise: 0.02,
            grammatical: 0.4,
            occupation_feminine: 0.3,
            occupation_masculine: -0.1,
            english_occupation: -0.05,
            definitional_range: (0.2, 1.0),
            attribute_offset: 0.5,
            inanimate_leak: 0.05,
            definitional_pairs: 10,
            grammatical_per_class: 40,
            occupations: 20,
            inanimate: 20,
            attributes_per_side: 12,
            adjectives: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub config: FixtureConfig,
    /// Unit-normalized gendered-language space.
    pub source: EmbeddingSpace,
    /// Unit-normalized English space in the same coordinates.
    pub english: EmbeddingSpace,
    pub lexicon: GenderLexicon,
    pub english_lexicon: GenderLexicon,
    /// Content words and nouns, for alignment.
    pub seed_dictionary: BilingualDictionary,
    /// Occupation forms, definitional and attribute words, for evaluation.
    pub test_dictionary: BilingualDictionary,
    pub grammatical_axis: Vec<f64>,
    pub semantic_axis: Vec<f64>,
}

struct Gen {
    rng: ChaCha8Rng,
    dim: usize,
    noise: Normal<f64>,
    content: Normal<f64>,
}

impl Gen {
    fn base(&mut self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for x in v.iter_mut().skip(2) {
            *x = self.content.sample(&mut self.rng);
        }
        v
    }

    fn word(&mut self, base: &[f64], g: f64, s: f64) -> Vec<f64> {
        let mut v = base.to_vec();
        v[0] += g;
        v[1] += s;
        for x in v.iter_mut() {
            *x += self.noise.sample(&mut self.rng);
        }
        v
    }
}

fn axis(dim: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    v
}

/// Builds the fixture. Errors if `dim < 3` or the special words alone
/// exceed `vocab`.
pub fn generate(config: &FixtureConfig) -> Result<Fixture> {
    let c = config;
    if c.dim < 3 {
        return Err(Error::InvalidArgument("fixture needs at least 3 dimensions".into()));
    }
    let special = 2 * c.definitional_pairs
        + 2 * c.grammatical_per_class
        + 2 * c.occupations
        + c.inanimate
        + 2 * c.attributes_per_side
        + 2 * c.adjectives;
    if special > c.vocab {
        return Err(Error::InvalidArgument(format!(
            "vocab {} is smaller than the {special} lexicon words",
            c.vocab
        )));
    }
    let mut gen = Gen {
        rng: ChaCha8Rng::seed_from_u64(c.seed),
        dim: c.dim,
        noise: Normal::new(0.0, c.noise).map_err(|e| Error::InvalidArgument(e.to_string()))?,
        content: Normal::new(0.0, 1.0 / ((c.dim - 2) as f64).sqrt())
            .map_err(|e| Error::InvalidArgument(e.to_string()))?,
    };
    let gamma = c.grammatical;
    let mut src = SpaceBuilder::new("src", c.dim);
    let mut en = SpaceBuilder::new("en", c.dim);
    let mut lex = GenderLexicon::default();
    let mut en_lex = GenderLexicon::default();
    let mut seed_pairs: Vec<(String, String)> = Vec::new();
    let mut test_pairs: Vec<(String, String)> = Vec::new();

    let (lo, hi) = c.definitional_range;
    for i in 0..c.definitional_pairs {
        let t = if c.definitional_pairs > 1 {
            i as f64 / (c.definitional_pairs - 1) as f64
        } else {
            0.5
        };
        let ci = lo + (hi - lo) * t;
        let base = gen.base();
        let (m, f) = (format!("def{i:02}_m"), format!("def{i:02}_f"));
        let (em, ef) = (format!("en_{m}"), format!("en_{f}"));
        src.push(&m, &gen.word(&base, -gamma, -ci))?;
        src.push(&f, &gen.word(&base, gamma, ci))?;
        en.push(&em, &gen.word(&base, 0.0, -ci))?;
        en.push(&ef, &gen.word(&base, 0.0, ci))?;
        lex.definitional_pairs.push(GenderPair::new(&m, &f));
        en_lex.definitional_pairs.push(GenderPair::new(&em, &ef));
        test_pairs.push((m, em));
        test_pairs.push((f, ef));
    }
    for (list, sign, tag) in [
        (&mut lex.grammatical_masculine, -1.0, "gm"),
        (&mut lex.grammatical_feminine, 1.0, "gf"),
    ] {
        for i in 0..c.grammatical_per_class {
            let base = gen.base();
            let w = format!("{tag}{i:03}");
            src.push(&w, &gen.word(&base, sign * gamma, 0.0))?;
            en.push(format!("en_{w}"), &gen.word(&base, 0.0, 0.0))?;
            seed_pairs.push((w.clone(), format!("en_{w}")));
            list.push(w);
        }
    }
    for i in 0..c.occupations {
        let base = gen.base();
        let (m, f, e) = (format!("occ{i:02}_m"), format!("occ{i:02}_f"), format!("en_occ{i:02}"));
        src.push(&m, &gen.word(&base, -gamma, c.occupation_masculine))?;
        src.push(&f, &gen.word(&base, gamma, c.occupation_feminine))?;
        en.push(&e, &gen.word(&base, 0.0, c.english_occupation))?;
        lex.occupation_pairs
            .push(OccupationPair::new(&m, &f).with_english(&e));
        test_pairs.push((m, e.clone()));
        test_pairs.push((f, e));
    }
    for i in 0..c.inanimate {
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        let base = gen.base();
        let w = format!("thing{i:02}");
        src.push(&w, &gen.word(&base, sign * gamma, sign * c.inanimate_leak))?;
        en.push(format!("en_{w}"), &gen.word(&base, 0.0, 0.0))?;
        seed_pairs.push((w.clone(), format!("en_{w}")));
        lex.inanimate_nouns.push(w);
    }
    for (sign, tag) in [(-1.0, "m"), (1.0, "f")] {
        for i in 0..c.attributes_per_side {
            let base = gen.base();
            let w = format!("attr_{tag}{i:02}");
            let e = format!("en_{w}");
            src.push(&w, &gen.word(&base, sign * gamma, sign * c.attribute_offset))?;
            en.push(&e, &gen.word(&base, 0.0, sign * c.attribute_offset))?;
            if sign < 0.0 {
                lex.attributes_male.push(w.clone());
                en_lex.attributes_male.push(e.clone());
            } else {
                lex.attributes_female.push(w.clone());
                en_lex.attributes_female.push(e.clone());
            }
            test_pairs.push((w, e));
        }
    }
    for i in 0..c.adjectives {
        let base = gen.base();
        let (m, f, e) = (format!("adj{i}_m"), format!("adj{i}_f"), format!("en_adj{i}"));
        src.push(&m, &gen.word(&base, -gamma, 0.0))?;
        src.push(&f, &gen.word(&base, gamma, 0.0))?;
        en.push(&e, &gen.word(&base, 0.0, 0.0))?;
        lex.adjective_pairs.push(AdjectivePair::new(&e, &m, &f));
    }
    let mut i = 0;
    while src.len() < c.vocab {
        let base = gen.base();
        let sign = if gen.rng.random::<bool>() { 1.0 } else { -1.0 };
        let w = format!("w{i:04}");
        src.push(&w, &gen.word(&base, sign * gamma, 0.0))?;
        en.push(format!("en_{w}"), &gen.word(&base, 0.0, 0.0))?;
        seed_pairs.push((w.clone(), format!("en_{w}")));
        i += 1;
    }

    lex.validate()?;
    en_lex.validate()?;
    Ok(Fixture {
        config: c.clone(),
        source: src.build()?.unit_normalize()?,
        english: en.build()?.unit_normalize()?,
        lexicon: lex,
        english_lexicon: en_lex,
        seed_dictionary: BilingualDictionary::from_pairs(seed_pairs)?,
        test_dictionary: BilingualDictionary::from_pairs(test_pairs)?,
        grammatical_axis: axis(c.dim, 0),
        semantic_axis: axis(c.dim, 1),
    })
}

/// Word pairs scored by their cosine in `space` plus Gaussian noise, on a
/// 0 to 10 scale.
pub fn similarity_dataset(
    space: &EmbeddingSpace,
    rows: usize,
    noise: f64,
    seed: u64,
) -> Result<Vec<SimilarityItem>> {
    if space.len() < 2 {
        return Err(Error::Insufficient("need at least two words".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, noise).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let words = space.words();
    let mut out = Vec::with_capacity(rows);
    while out.len() < rows {
        let a = rng.random_range(0..words.len());
        let b = rng.random_range(0..words.len());
        if a == b {
            continue;
        }
        let cos = crate::embedding::cosine(space.row(a), space.row(b))?;
        out.push(SimilarityItem {
            first: words[a].clone(),
            second: words[b].clone(),
            score: 5.0 * (cos + 1.0) + jitter.sample(&mut rng),
        });
    }
    Ok(out)
}

/// Paths written by [`Fixture::write_files`].
#[derive(Clone, Debug)]
pub struct FixtureFiles {
    pub source: PathBuf,
    pub english: PathBuf,
    pub lexicon: PathBuf,
    pub english_lexicon: PathBuf,
    pub seed_dictionary: PathBuf,
    pub test_dictionary: PathBuf,
}

fn write_dictionary(dict: &BilingualDictionary, path: &Path) -> Result<()> {
    let mut text = String::new();
    for (s, t) in dict.pairs() {
        text.push_str(s);
        text.push('\t');
        text.push_str(t);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

impl Fixture {
    /// Writes the spaces as `.vec` text, the lexicons as JSON and the
    /// dictionaries as tab-separated pairs into `dir`.
    pub fn write_files(&self, dir: impl AsRef<Path>) -> Result<FixtureFiles> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let files = FixtureFiles {
            source: dir.join("src.vec"),
            english: dir.join("en.vec"),
            lexicon: dir.join("src_lexicon.json"),
            english_lexicon: dir.join("en_lexicon.json"),
            seed_dictionary: dir.join("seed.dict"),
            test_dictionary: dir.join("test.dict"),
        };
        save_text_embeddings(&self.source, &files.source)?;
        save_text_embeddings(&self.english, &files.english)?;
        for (lex, path) in [
            (&self.lexicon, &files.lexicon),
            (&self.english_lexicon, &files.english_lexicon),
        ] {
            let json = serde_json::to_string_pretty(lex)?;
            fs::write(path, json).map_err(|e| Error::io(path, e))?;
        }
        write_dictionary(&self.seed_dictionary, &files.seed_dictionary)?;
        write_dictionary(&self.test_dictionary, &files.test_dictionary)?;
        Ok(files)
    }
}
