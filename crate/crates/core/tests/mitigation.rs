mod common;

use std::collections::HashSet;

use gendebias::geometry::{bilingual_directions, monolingual_directions, DirectionOptions};
use gendebias::linalg::{dot, norm};
use gendebias::mitigation::{
    hard_debias_english, mitigate, mitigate_de_align, mitigate_shift_en, mitigate_shift_ori,
    neutralize, orthogonality_error, procrustes_align, shift_pair, EnglishDebiasConfig, Method,
    MitigationPlan,
};
use gendebias::synthetic::{generate, Fixture, FixtureConfig};
use gendebias::{BilingualDictionary, BilingualSpace, EmbeddingSpace};
use proptest::prelude::*;

use common::*;

fn fixture() -> Fixture {
    generate(&FixtureConfig::default()).unwrap()
}

fn plan<'a>(fx: &'a Fixture, cfg: &'a EnglishDebiasConfig, method: Method) -> MitigationPlan<'a> {
    MitigationPlan {
        method,
        source: &fx.source,
        english: Some(&fx.english),
        lexicon: &fx.lexicon,
        english_config: Some(cfg),
        seed_dictionary: Some(&fx.seed_dictionary),
        directions: DirectionOptions::default(),
    }
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = norm(&v);
    v.into_iter().map(|x| x / n).collect()
}

proptest! {
    #[test]
    fn neutralize_gives_unit_orthogonal_vectors(
        w in prop::collection::vec(-1.0f64..1.0, 6),
        d in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        prop_assume!(norm(&d) > 1e-3);
        let d = unit(d);
        let along = dot(&w, &d);
        let rest: f64 = w.iter().zip(&d).map(|(x, y)| (x - along * y).powi(2)).sum::<f64>().sqrt();
        prop_assume!(rest > 1e-3);
        let n = neutralize(&w, &d).unwrap();
        prop_assert!(dot(&n, &d).abs() <= 1e-12);
        prop_assert!((norm(&n) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn shift_pair_is_exact_and_keeps_the_complement(
        m in prop::collection::vec(-1.0f64..1.0, 6),
        f in prop::collection::vec(-1.0f64..1.0, 6),
        d in prop::collection::vec(-1.0f64..1.0, 6),
        anchor in -0.5f64..0.5,
    ) {
        prop_assume!(norm(&d) > 1e-3);
        let d = unit(d);
        let (m2, f2, delta) = shift_pair(&m, &f, &d, anchor);
        prop_assert!((dot(&m2, &d) + dot(&f2, &d) - 2.0 * anchor).abs() <= 1e-12);
        for (a, b) in [(&m, &m2), (&f, &f2)] {
            let moved: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
            for (x, y) in moved.iter().zip(&d) {
                prop_assert!((x - delta * y).abs() <= 1e-12);
            }
        }
        // the difference between the forms is untouched
        for i in 0..6 {
            prop_assert!(((m[i] - f[i]) - (m2[i] - f2[i])).abs() <= 1e-12);
        }
    }

    #[test]
    fn procrustes_is_an_isometry(seed in 0u64..200) {
        let mut r = rng(seed);
        let src = random_space(&mut r, 60, 8).unit_normalize().unwrap();
        let tgt = random_space(&mut r, 60, 8).unit_normalize().unwrap();
        let seed_dict = BilingualDictionary::from_pairs(
            src.words()[..30].iter().zip(&tgt.words()[..30]).map(|(a, b)| (a.clone(), b.clone())),
        ).unwrap();
        let al = procrustes_align(&src, &tgt, &seed_dict).unwrap();
        prop_assert!(orthogonality_error(&al.rotation) <= 1e-10);
        let out = &al.bilingual.source;
        for i in 0..10 {
            let j = (i * 7 + 3) % src.len();
            let before = dot(src.row(i), src.row(j));
            let after = dot(out.row(i), out.row(j));
            prop_assert!((before - after).abs() <= 1e-10);
        }
    }
}

#[test]
fn shift_ori_touches_only_targets() {
    let fx = fixture();
    let dirs = monolingual_directions(&fx.source, &fx.lexicon, &DirectionOptions::default()).unwrap();
    let out = mitigate_shift_ori(&fx.source, &fx.lexicon, &dirs).unwrap();
    let mut targets: HashSet<&str> = fx.lexicon.inanimate_nouns.iter().map(String::as_str).collect();
    for p in &fx.lexicon.occupation_pairs {
        targets.insert(&p.masculine);
        targets.insert(&p.feminine);
    }
    assert_eq!(out.words_touched, targets.len());
    assert_eq!(out.space.words(), fx.source.words());
    for (w, v) in fx.source.iter() {
        if !targets.contains(w) {
            assert_eq!(out.space.vector(w).unwrap(), v, "{w} changed");
        }
    }
    assert!(out.max_residual() <= 1e-12);
    assert!(out.max_inanimate_projection() <= 1e-9);
}

#[test]
fn shift_en_centers_pairs_on_english() {
    let fx = fixture();
    let bi = BilingualSpace::new(fx.source.clone(), fx.english.clone()).unwrap();
    let dirs = bilingual_directions(
        &bi,
        &fx.lexicon,
        &fx.english_lexicon.definitional_pairs,
        &DirectionOptions::default(),
    )
    .unwrap();
    let out = mitigate_shift_en(&bi, &fx.lexicon, &dirs).unwrap();
    for (p, r) in fx.lexicon.occupation_pairs.iter().zip(&out.residuals) {
        let e = fx.english.vector(p.english.as_deref().unwrap()).unwrap();
        let m = out.space.vector(&p.masculine).unwrap();
        let f = out.space.vector(&p.feminine).unwrap();
        let mid = (dot(m, &dirs.d_s) + dot(f, &dirs.d_s)) / 2.0;
        assert!((mid - dot(e, &dirs.d_s)).abs() <= 1e-12);
        assert_eq!(r.anchor, dot(e, &dirs.d_s));
    }
}

#[test]
fn shift_en_needs_english_annotations() {
    let fx = fixture();
    let mut lex = fx.lexicon.clone();
    lex.occupation_pairs[3].english = None;
    let bi = BilingualSpace::new(fx.source.clone(), fx.english.clone()).unwrap();
    let dirs = bilingual_directions(&bi, &lex, &fx.english_lexicon.definitional_pairs, &DirectionOptions::default())
        .unwrap();
    assert!(mitigate_shift_en(&bi, &lex, &dirs).is_err());
}

#[test]
fn hybrid_en_equals_shift_en_on_the_aligned_space() {
    let fx = fixture();
    let cfg = EnglishDebiasConfig::from_lexicon(&fx.english_lexicon);
    let hybrid = mitigate(&plan(&fx, &cfg, Method::HybridEn)).unwrap();
    let de = mitigate_de_align(&fx.source, &fx.english, Some(&fx.seed_dictionary), &cfg).unwrap();
    let bi = &de.alignment.bilingual;
    let dirs = bilingual_directions(bi, &fx.lexicon, &cfg.definitional_pairs, &DirectionOptions::default()).unwrap();
    let direct = mitigate_shift_en(bi, &fx.lexicon, &dirs).unwrap();
    assert_eq!(hybrid.directions, dirs);
    for ((w, a), (_, b)) in hybrid.space.iter().zip(direct.space.iter()) {
        assert_eq!(a, b, "{w}");
    }
}

#[test]
fn de_align_rotates_without_changing_cosines() {
    let fx = fixture();
    let cfg = EnglishDebiasConfig::from_lexicon(&fx.english_lexicon);
    let out = mitigate(&plan(&fx, &cfg, Method::DeAlign)).unwrap();
    assert_eq!(out.words_touched, fx.source.len());
    assert!(out.alignment.unwrap().orthogonality_error <= 1e-10);
    for i in 0..50 {
        let j = (i * 11 + 5) % fx.source.len();
        let before = dot(fx.source.row(i), fx.source.row(j));
        let after = dot(out.space.row(i), out.space.row(j));
        assert!((before - after).abs() <= 1e-10);
    }
}

#[test]
fn every_pipeline_is_deterministic() {
    let fx = fixture();
    let cfg = EnglishDebiasConfig::from_lexicon(&fx.english_lexicon);
    for method in Method::ALL {
        let a = mitigate(&plan(&fx, &cfg, method)).unwrap();
        let b = mitigate(&plan(&fx, &cfg, method)).unwrap();
        assert_eq!(a.directions, b.directions, "{method}");
        for ((_, x), (_, y)) in a.space.iter().zip(b.space.iter()) {
            assert_eq!(x, y, "{method}");
        }
    }
}

#[test]
fn english_pipelines_need_an_english_space() {
    let fx = fixture();
    let cfg = EnglishDebiasConfig::from_lexicon(&fx.english_lexicon);
    for method in Method::ALL.into_iter().filter(|m| m.needs_english()) {
        let mut p = plan(&fx, &cfg, method);
        p.english = None;
        assert!(mitigate(&p).is_err(), "{method}");
    }
}

#[test]
fn overlapping_target_and_protected_words_are_rejected() {
    let fx = fixture();
    let mut lex = fx.lexicon.clone();
    lex.inanimate_nouns.push(lex.attributes_male[0].clone());
    let dirs = monolingual_directions(&fx.source, &fx.lexicon, &DirectionOptions::default()).unwrap();
    assert!(mitigate_shift_ori(&fx.source, &lex, &dirs).is_err());
}

#[test]
fn procrustes_needs_enough_seed_pairs() {
    let mut r = rng(4);
    let src = random_space(&mut r, 100, 50).unit_normalize().unwrap();
    let tgt = random_space(&mut r, 100, 50).unit_normalize().unwrap();
    let seed = BilingualDictionary::from_pairs(
        src.words()[..3].iter().zip(&tgt.words()[..3]).map(|(a, b)| (a.clone(), b.clone())),
    )
    .unwrap();
    assert!(procrustes_align(&src, &tgt, &seed).is_err());
}

#[test]
fn procrustes_of_identical_spaces_is_the_identity() {
    let mut r = rng(5);
    let src = random_space(&mut r, 80, 10).unit_normalize().unwrap();
    let seed = BilingualDictionary::identical_strings(&src, &src);
    let al = procrustes_align(&src, &src, &seed).unwrap();
    for i in 0..10 {
        for j in 0..10 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((al.rotation[(i, j)] - want).abs() <= 1e-10);
        }
    }
}

#[test]
fn hard_debias_with_everything_protected_changes_nothing() {
    let fx = fixture();
    let cfg = EnglishDebiasConfig::from_lexicon(&fx.english_lexicon);
    let all: Vec<String> = fx.english.words().to_vec();
    let out = hard_debias_english(&fx.english, &cfg.definitional_pairs, &[], &all).unwrap();
    assert_eq!(out.neutralized, 0);
    for ((_, a), (_, b)) in fx.english.iter().zip(out.space.iter()) {
        assert_eq!(a, b);
    }
}

#[test]
fn shifted_pairs_have_opposite_projections() {
    use gendebias::eval::{annotated_words, export_projections};
    let fx = fixture();
    let dirs = monolingual_directions(&fx.source, &fx.lexicon, &DirectionOptions::default()).unwrap();
    let out = mitigate_shift_ori(&fx.source, &fx.lexicon, &dirs).unwrap();
    let table = export_projections(&out.space, &annotated_words(&fx.lexicon), &dirs).unwrap();
    let proj = |w: &str| table.rows.iter().find(|r| r.word == w).unwrap().semantic_proj;
    for p in &fx.lexicon.occupation_pairs {
        assert!((proj(&p.masculine) + proj(&p.feminine)).abs() <= 1e-12);
    }
}

#[test]
fn renormalizing_reports_new_residuals() {
    let fx = fixture();
    let dirs = monolingual_directions(&fx.source, &fx.lexicon, &DirectionOptions::default()).unwrap();
    let out = mitigate_shift_ori(&fx.source, &fx.lexicon, &dirs).unwrap();
    let (space, residuals): (EmbeddingSpace, _) = out.renormalized(&fx.lexicon).unwrap();
    assert!(space.is_normalized());
    assert_eq!(residuals.len(), out.residuals.len());
}
