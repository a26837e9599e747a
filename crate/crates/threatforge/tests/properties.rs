//! Property tests: parser/serializer round trips and engine counting laws
//! checked against brute-force oracles over randomly generated systems.

use indexmap::IndexMap;
use proptest::prelude::*;

use threatforge::catalog::default_catalog;
use threatforge::engine::{coverage, enumerate, stats, CoverageStatus};
use threatforge::model::{build_system, validate, Asset, AssetKind, Role, SystemModel, BUILTIN_KINDS};
use threatforge::sdl::{parse, serialize};
use threatforge::taxonomy::SecurityProperty;

fn kind_strategy() -> impl Strategy<Value = AssetKind> {
    (0..BUILTIN_KINDS.len()).prop_map(|i| BUILTIN_KINDS[i].clone())
}

fn display_name() -> impl Strategy<Value = String> {
    // printable text exercising quote/backslash escaping
    proptest::string::string_regex("[a-zA-Z0-9 .,()\"\\\\-]{1,16}")
        .unwrap()
        .prop_filter("non-empty", |s| !s.trim().is_empty())
}

fn attributes() -> impl Strategy<Value = IndexMap<String, String>> {
    proptest::collection::btree_map(
        proptest::string::string_regex("[a-z][a-z0-9_]{0,6}").unwrap(),
        proptest::string::string_regex("[a-zA-Z0-9 ]{0,10}").unwrap(),
        0..4,
    )
    .prop_map(|m| m.into_iter().collect())
}

prop_compose! {
    fn system_strategy()(
        kinds in proptest::collection::vec(kind_strategy(), 0..20),
    )(
        names in proptest::collection::vec(display_name(), kinds.len()),
        attrs in proptest::collection::vec(attributes(), kinds.len()),
        endpoint_picks in proptest::collection::vec(
            proptest::collection::vec(any::<proptest::sample::Index>(), 0..3),
            kinds.len(),
        ),
        kinds in Just(kinds),
    ) -> SystemModel {
        let element_ids: Vec<String> = kinds
            .iter()
            .enumerate()
            .filter(|(_, k)| k.canonical_role() == Some(Role::Element))
            .map(|(i, _)| format!("a{i}"))
            .collect();
        let assets = kinds
            .iter()
            .enumerate()
            .map(|(i, kind)| {
                let mut asset = Asset::builtin(kind.clone(), format!("a{i}"), names[i].clone());
                asset.attributes = attrs[i].clone();
                if kind.canonical_role() == Some(Role::Channel) && !element_ids.is_empty() {
                    let mut endpoints: Vec<String> = endpoint_picks[i]
                        .iter()
                        .map(|pick| pick.get(&element_ids).clone())
                        .collect();
                    endpoints.dedup();
                    asset.endpoints = endpoints;
                }
                asset
            })
            .collect();
        build_system("generated system", assets).expect("generator emits valid systems")
    }
}

proptest! {
    #[test]
    fn generated_systems_validate_cleanly(system in system_strategy()) {
        prop_assert!(validate(&system).is_valid());
    }

    #[test]
    fn parse_serialize_round_trip(system in system_strategy()) {
        let text = serialize(&system);
        let reparsed = parse(&text).map_err(|e| {
            TestCaseError::fail(format!("reparse failed: {e:?}\n{text}"))
        })?;
        prop_assert_eq!(reparsed, system);
    }

    #[test]
    fn serialize_is_idempotent(system in system_strategy()) {
        let once = serialize(&system);
        let twice = serialize(&parse(&once).unwrap());
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn enumeration_count_matches_brute_force(system in system_strategy()) {
        let catalog = default_catalog();
        let model = enumerate(&system, &catalog);
        let expected: usize = system
            .assets
            .iter()
            .map(|a| catalog.templates.iter().filter(|t| t.applies_to == a.kind).count())
            .sum();
        prop_assert_eq!(model.instances.len(), expected);
    }

    #[test]
    fn coverage_matches_brute_force_join(system in system_strategy()) {
        let catalog = default_catalog();
        let model = enumerate(&system, &catalog);
        let report = coverage(&system, &model).unwrap();
        prop_assert_eq!(report.cells.len(), system.assets.len() * 7);
        for cell in &report.cells {
            let joined = model
                .instances
                .iter()
                .filter(|i| i.asset_id == cell.asset_id && i.threat_type == cell.threat_type)
                .count();
            prop_assert_eq!(cell.instance_count, joined);
            prop_assert_eq!(cell.status == CoverageStatus::Covered, joined >= 1);
            // built-in kinds against the default catalog: exactly one per cell
            prop_assert_eq!(cell.instance_count, 1);
        }
    }

    #[test]
    fn stats_totals_are_consistent(system in system_strategy()) {
        let model = enumerate(&system, &default_catalog());
        let s = stats(&model);
        prop_assert_eq!(s.total, model.instances.len());
        prop_assert_eq!(s.per_property.values().sum::<usize>(), s.total);
        prop_assert_eq!(s.per_type.values().sum::<usize>(), s.total);
        prop_assert_eq!(s.per_asset.values().sum::<usize>(), s.total);
        let brute_c = model
            .instances
            .iter()
            .filter(|i| i.threat_type.property == SecurityProperty::Confidentiality)
            .count();
        prop_assert_eq!(s.per_property[&SecurityProperty::Confidentiality], brute_c);
    }
}
