use cosbias_core::embedding_io::{load_embeddings, resolve, save_embeddings, EmbeddingSet, Format, ResolveMode, WordSetConfig};
use cosbias_core::{Error, Vector};
use indexmap::IndexMap;

fn sample() -> EmbeddingSet {
    EmbeddingSet::from_entries(
        "sample",
        [
            ("he".to_owned(), Vector::from_slice(&[1.0, 0.25, -0.5])),
            ("she".to_owned(), Vector::from_slice(&[-1.0, 0.125, 0.5])),
            ("nurse".to_owned(), Vector::from_slice(&[0.1, 1e-17, 3.0e8])),
        ],
    )
    .unwrap()
}

#[test]
fn both_formats_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let set = sample();
    for format in [Format::Word2vecText, Format::GloveText] {
        let path = dir.path().join(format!("{format:?}.txt"));
        save_embeddings(&set, &path, format).unwrap();
        let back = load_embeddings(&path, format).unwrap();
        assert_eq!(back.len(), 3);
        for (token, v) in set.iter() {
            assert_eq!(back.get(token).unwrap(), v, "{token}");
        }
    }
}

#[test]
fn strict_resolution_reports_missing_tokens() {
    let mut attribute_sets = IndexMap::new();
    attribute_sets.insert("male".to_owned(), vec!["he".to_owned()]);
    attribute_sets.insert("female".to_owned(), vec!["she".to_owned(), "her".to_owned()]);
    let config = WordSetConfig { attribute_sets, target_sets: IndexMap::new(), defining_sets: IndexMap::new() };
    let err = resolve(&config, &sample(), ResolveMode::Strict).unwrap_err();
    assert!(matches!(err, Error::MissingTokens(_)), "{err:?}");
    let lenient = resolve(&config, &sample(), ResolveMode::Lenient).unwrap();
    assert_eq!(lenient.missing.len(), 1);
    assert_eq!(lenient.attribute("female").unwrap().tokens, ["she"]);
}
