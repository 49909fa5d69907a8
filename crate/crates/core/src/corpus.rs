//! Corpus file reading and writing (JSON lines of sentences).

use std::io::BufRead;
use std::path::Path;

use crate::db::{Database, SentenceExample};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedCorpus {
    pub examples: Vec<SentenceExample>,
    /// 1-based line numbers, parallel to `examples`.
    pub lines: Vec<usize>,
    /// Sentences dropped because their verb has no database entry.
    pub skipped_unknown_verb: usize,
}

/// Reads a corpus. With a database, sentences of unknown verbs are skipped
/// (and counted), and gold senses are checked against the verb's entry.
pub fn parse_corpus(path: impl AsRef<Path>, db: Option<&Database>) -> Result<ParsedCorpus> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let parsed = parse_reader(std::io::BufReader::new(file), db)?;
    if parsed.skipped_unknown_verb > 0 {
        tracing::warn!(
            skipped = parsed.skipped_unknown_verb,
            "{}: skipped sentences with verbs missing from the database",
            path.display()
        );
    }
    Ok(parsed)
}

pub fn parse_str(text: &str, db: Option<&Database>) -> Result<ParsedCorpus> {
    parse_reader(text.as_bytes(), db)
}

pub fn parse_reader(reader: impl BufRead, db: Option<&Database>) -> Result<ParsedCorpus> {
    let mut out = ParsedCorpus::default();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let x: SentenceExample = serde_json::from_str(&line).map_err(|e| Error::parse(lineno, e.to_string()))?;
        x.check_shape().map_err(|e| Error::parse(lineno, e.to_string()))?;
        if out.examples.iter().any(|p| p.id == x.id) {
            return Err(Error::parse(lineno, format!("duplicate sentence id `{}`", x.id)));
        }
        if let Some(db) = db {
            if db.senses(&x.verb).is_none() {
                tracing::warn!(line = lineno, verb = %x.verb, "unknown verb, skipping");
                out.skipped_unknown_verb += 1;
                continue;
            }
            x.validate(db).map_err(|e| Error::parse(lineno, e.to_string()))?;
        }
        out.examples.push(x);
        out.lines.push(lineno);
    }
    Ok(out)
}

pub fn to_jsonl(examples: &[SentenceExample]) -> String {
    let mut out = String::new();
    for x in examples {
        out.push_str(&serde_json::to_string(x).expect("sentence serializes"));
        out.push('\n');
    }
    out
}

pub fn write_corpus(path: impl AsRef<Path>, examples: &[SentenceExample]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_jsonl(examples)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const THREE: &str = r#"{"id":"1","verb":"toru","complements":[["ga","kare"],["o","kippu"]],"gold":"reserve"}
{"id":"2","verb":"toru","complements":[["o","kane"]]}
{"id":"3","verb":"noru","complements":[["ni","basu"]],"gold":null}
"#;

    #[test]
    fn three_lines() {
        let c = parse_str(THREE, None).unwrap();
        assert_eq!(c.examples.len(), 3);
        assert_eq!(c.examples[0].gold.as_deref(), Some("reserve"));
        assert_eq!(c.examples[2].gold, None);
        assert_eq!(c.lines, [1, 2, 3]);
    }

    #[test]
    fn missing_verb_reports_line() {
        let text = format!("{THREE}{}\n", r#"{"id":"4","complements":[["o","kane"]]}"#);
        match parse_str(&text, None) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("verb"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_complements_rejected() {
        let text = r#"{"id":"1","verb":"toru","complements":[]}"#;
        assert!(matches!(parse_str(text, None), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn unknown_verbs_skipped_with_db() {
        let db =
            Database::from_jsonl(r#"{"verb":"toru","sense":"reserve","frame":{"ga":["kare"],"o":["kippu"]}}"#).unwrap();
        let c = parse_str(THREE, Some(&db)).unwrap();
        assert_eq!(c.examples.len(), 2);
        assert_eq!(c.skipped_unknown_verb, 1);
        let bad_gold = r#"{"id":"1","verb":"toru","complements":[["o","x"]],"gold":"eat"}"#;
        assert!(parse_str(bad_gold, Some(&db)).is_err());
    }

    fn arb_sentence() -> impl Strategy<Value = SentenceExample> {
        (
            "[a-z0-9]{1,6}",
            "[a-z]{1,5}",
            prop::collection::btree_map("[a-z]{1,3}", "[a-zA-Z\\u{3040}-\\u{309f} ]{1,8}", 1..4),
            prop::option::of("[a-z]{1,4}"),
        )
            .prop_map(|(id, verb, comps, gold)| SentenceExample {
                id,
                verb,
                complements: comps.into_iter().map(|(c, n)| crate::db::Complement(c, n)).collect(),
                gold,
            })
    }

    proptest! {
        #[test]
        fn write_then_parse_is_identity(mut xs in prop::collection::vec(arb_sentence(), 0..8)) {
            let mut seen = std::collections::HashSet::new();
            xs.retain(|x| seen.insert(x.id.clone()));
            let text = to_jsonl(&xs);
            let back = parse_str(&text, None).unwrap();
            prop_assert_eq!(&back.examples, &xs);
            prop_assert_eq!(to_jsonl(&back.examples), text);
        }
    }
}
