use std::path::Path;

use gendebias::lexicon::{build_analogy_queries, load_lexicon, BilingualDictionary};

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

#[test]
fn sample_lexicons_load_and_validate() {
    let es = load_lexicon(data("es_lexicon.sample.json")).unwrap();
    es.validate().unwrap();
    assert!(es.occupation_pairs.iter().all(|p| p.english.is_some()));
    let qs = build_analogy_queries(&es.occupation_pairs, &es.adjective_pairs).unwrap();
    assert_eq!(qs.queries.len(), 2 * es.adjective_pairs.len() * es.occupation_pairs.len());
    let en = load_lexicon(data("en_lexicon.sample.json")).unwrap();
    en.validate().unwrap();
    assert_eq!(en.definitional_pairs.len(), 8);
}

#[test]
fn dictionaries_accept_tabs_and_spaces() {
    let tab = BilingualDictionary::parse("perro\tdog\ncasa\thouse\ncasa\thome\n", "d".as_ref()).unwrap();
    let space = BilingualDictionary::parse("perro dog\ncasa house\ncasa home\n", "d".as_ref()).unwrap();
    assert_eq!(tab.len(), space.len());
    assert_eq!(tab.targets("casa").unwrap().len(), 2);
    let rev = tab.reversed();
    assert_eq!(rev.targets("dog").unwrap().iter().next().unwrap(), "perro");
}

#[test]
fn unknown_lexicon_fields_are_rejected() {
    let err = gendebias::GenderLexicon::from_json_str(r#"{"definitional": []}"#);
    assert!(err.is_err());
}
