//! Replays the checked-in fuzz seeds through the parser entry points.

use std::path::PathBuf;

use apstruct::cli::{parse_point_list, parse_sign_list};
use apstruct::config::SuiteConfig;
use apstruct::report::{parse_json, to_json};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn config_seeds() {
    let outcomes: Vec<(String, bool)> = seeds("config_parse")
        .into_iter()
        .map(|(name, text)| (name, SuiteConfig::parse(&text).is_ok()))
        .collect();
    assert_eq!(
        outcomes,
        vec![
            ("seed_bad_field.toml".to_string(), false),
            ("seed_cases.toml".to_string(), true),
            ("seed_default.toml".to_string(), true),
            ("seed_empty.toml".to_string(), true),
        ]
    );
}

#[test]
fn report_seeds() {
    for (name, text) in seeds("report_parse") {
        match parse_json(&text) {
            Ok(report) => assert_eq!(parse_json(&to_json(&report)).unwrap(), report, "{name}"),
            Err(_) => assert_eq!(name, "seed_future_schema.json"),
        }
    }
}

#[test]
fn list_seeds() {
    for (name, text) in seeds("point_list") {
        assert_eq!(parse_point_list(&text).is_ok(), name != "seed_empty_item", "{name}");
    }
    for (name, text) in seeds("sign_list") {
        assert_eq!(parse_sign_list(&text).is_ok(), name != "seed_bad", "{name}");
    }
}
