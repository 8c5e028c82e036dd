use kgbench::formats::records::{parse_node_record, read_records_dir, ParseErrorKind};
use proptest::prelude::*;

proptest! {
    // Any input yields a record or a located error; never a panic.
    #[test]
    fn parsing_is_total(text in ".{0,200}", line in 1usize..1000) {
        if let Err(e) = parse_node_record(&text, line) {
            prop_assert_eq!(e.line, line);
        }
    }

    #[test]
    fn json_shaped_inputs_are_total(
        keys in proptest::collection::vec(prop_oneof![
            Just("paper_id"), Just("title"), Just("fields"), Just("attachments"), Just("embeddings"), Just("venue")
        ], 0..6),
        vals in proptest::collection::vec(prop_oneof![
            Just("\"x\"".to_string()), Just("\"\"".to_string()), Just("1".to_string()), Just("null".to_string()),
            Just("{\"datasets\":\"d\"}".to_string()), Just("{\"title\":\"t\"}".to_string()), Just("{\"bogus\":\"t\"}".to_string()),
            Just("[{\"kind\":\"figures\",\"media\":\"m\"}]".to_string()), Just("[{\"kind\":\"datasets\",\"ordinal\":0,\"vector\":[1]}]".to_string()),
            Just("[1]".to_string()),
        ], 6),
    ) {
        let body: Vec<String> = keys.iter().zip(&vals).map(|(k, v)| format!("\"{k}\":{v}")).collect();
        let text = format!("{{{}}}", body.join(","));
        match parse_node_record(&text, 7) {
            Ok(r) => {
                prop_assert!(!r.title.trim().is_empty());
                prop_assert!(!r.paper_id.as_str().is_empty());
            }
            Err(e) => prop_assert_eq!(e.line, 7),
        }
    }
}

#[test]
fn directory_errors_carry_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("b.jsonl"),
        "{\"paper_id\":\"p2\",\"title\":\"Two\"}\n\n{\"paper_id\":\"p3\",\"title\":\"T\",\"fields\":{\"nope\":\"x\"}}\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("a.jsonl"), "{\"paper_id\":\"p1\",\"title\":\"One\"}\n").unwrap();
    std::fs::write(dir.path().join("ignored.txt"), "garbage").unwrap();
    let (records, errors) = read_records_dir(dir.path()).unwrap();
    assert_eq!(records.iter().map(|r| r.paper_id.as_str()).collect::<Vec<_>>(), ["p1", "p2"]);
    assert_eq!(errors.len(), 1);
    assert!(errors[0].path.ends_with("b.jsonl"));
    assert_eq!(errors[0].error.line, 3);
    assert!(matches!(errors[0].error.kind, ParseErrorKind::UnknownKind(_)));
}
