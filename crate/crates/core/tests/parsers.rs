mod support;

use proptest::prelude::*;
use support::cases::{check_parser_case, parse_day, parser_cases, umbrella_pld_oracle, UMBRELLA_PLD_FIXTURE};
use toplist::combiner::{combine, umbrella_to_pld, CombineConfig, DateWindow};
use toplist::ingest::{parse_majestic_csv, parse_provider_file, ArchiveStore};
use toplist::{Provider, PublicSuffixRules};

fn case(name: &str) {
    let cases = parser_cases();
    let case = cases.iter().find(|c| c.name == name).expect("known case");
    if let Err(e) = check_parser_case(case) {
        panic!("{e}");
    }
}

#[test]
fn alexa_clean() {
    case("alexa_clean");
}

#[test]
fn alexa_error_paths() {
    case("alexa_error_paths");
}

#[test]
fn umbrella_crlf_subdomains() {
    case("umbrella_crlf_subdomains");
}

#[test]
fn majestic_full_header() {
    case("majestic_full_header");
}

#[test]
fn majestic_shuffled_extra_columns() {
    case("majestic_shuffled_extra_columns");
}

#[test]
fn majestic_minimal() {
    case("majestic_minimal");
}

#[test]
fn majestic_error_paths() {
    case("majestic_error_paths");
}

#[test]
fn majestic_missing_columns() {
    case("majestic_missing_domain_column");
    case("majestic_missing_rank_column");
    case("majestic_empty");
}

#[test]
fn quantcast_hidden_profiles() {
    case("quantcast_hidden_profiles");
}

#[test]
fn quantcast_error_paths() {
    case("quantcast_error_paths");
    case("quantcast_all_hidden");
}

#[test]
fn every_case_is_covered() {
    for c in parser_cases() {
        check_parser_case(&c).unwrap();
    }
}

#[test]
fn majestic_column_order_does_not_change_the_snapshot() {
    let rules = PublicSuffixRules::builtin();
    let cases = parser_cases();
    let digest = |name: &str| {
        let c = cases.iter().find(|c| c.name == name).unwrap();
        parse_majestic_csv(c.input.as_bytes(), parse_day(), &rules)
            .unwrap()
            .0
            .digest()
    };
    assert_eq!(digest("majestic_shuffled_extra_columns"), digest("majestic_minimal"));
    assert_eq!(digest("majestic_full_header"), digest("majestic_minimal"));
}

#[test]
fn umbrella_pld_fixture_matches_group_by() {
    let names: Vec<&str> = UMBRELLA_PLD_FIXTURE.iter().map(|(n, _)| *n).collect();
    let snap = support::snapshot(Provider::Umbrella, support::day(0), &names);
    let plds: Vec<String> = umbrella_to_pld(&snap).names().map(str::to_string).collect();
    assert_eq!(plds, umbrella_pld_oracle());
    // already reduced lists are left alone
    assert_eq!(umbrella_to_pld(&umbrella_to_pld(&snap)), umbrella_to_pld(&snap));
}

#[test]
fn umbrella_mode_combines_plds() {
    let names: Vec<&str> = UMBRELLA_PLD_FIXTURE.iter().map(|(n, _)| *n).collect();
    let snap = support::snapshot(Provider::Umbrella, support::day(0), &names);
    let mut c = CombineConfig::new([Provider::Umbrella], DateWindow::single(support::day(0)));
    c.umbrella_pld_mode = true;
    c.reference_length = 8;
    let list = combine(&[snap], &c).unwrap();
    let got: Vec<&str> = list.names().collect();
    assert_eq!(got, umbrella_pld_oracle());
}

#[test]
fn archived_snapshot_round_trips() {
    let rules = PublicSuffixRules::builtin();
    let cases = parser_cases();
    let c = cases.iter().find(|c| c.name == "quantcast_hidden_profiles").unwrap();
    let (snap, _) = parse_provider_file(c.input.as_bytes(), c.provider, parse_day(), &rules).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut store = ArchiveStore::open(dir.path()).unwrap();
    store.put(&snap, false).unwrap();
    let back = ArchiveStore::open(dir.path())
        .unwrap()
        .get(Provider::Quantcast, parse_day(), &rules)
        .unwrap();
    assert_eq!(back, snap);
}

fn line() -> impl Strategy<Value = String> {
    prop_oneof![
        (0u32..30, "[a-z]{1,6}\\.(com|org|co\\.uk)").prop_map(|(r, d)| format!("{r},{d}")),
        (1u32..30).prop_map(|r| format!("{r},Hidden profile")),
        "[a-z!. ]{0,8}".prop_map(|s| format!("x,{s}")),
        (1u32..30, "[a-z]{0,3}\\.\\.[a-z]{1,3}").prop_map(|(r, d)| format!("{r},{d}")),
        Just(String::new()),
    ]
}

proptest! {
    #[test]
    fn report_accounts_for_every_data_line(lines in prop::collection::vec(line(), 0..40)) {
        let rules = PublicSuffixRules::builtin();
        let text = lines.join("\n");
        let (snap, report) = parse_provider_file(text.as_bytes(), Provider::Alexa, parse_day(), &rules).unwrap();
        let data_lines = lines.iter().filter(|l| !l.trim().is_empty()).count();
        prop_assert_eq!(report.accepted + report.dropped(), data_lines);
        prop_assert_eq!(report.accepted, snap.len());
        let ranks: Vec<u32> = snap.entries().iter().map(|e| e.rank).collect();
        prop_assert_eq!(ranks, (1..=snap.len() as u32).collect::<Vec<_>>());
    }
}
