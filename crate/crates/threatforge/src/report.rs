//! Report rendering: Markdown facsimile tables, RFC 4180 CSV, and JSON.
//!
//! The Markdown renderer groups instances by (environment, role, property)
//! into the five-table layout of the default catalog's source tables, with
//! physical elements and channels merged for integrity. All renderers are
//! deterministic byte-for-byte.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::engine::{CoverageReport, CoverageStatus, Stats, ThreatInstance, ThreatModel};
use crate::model::{Asset, Environment, Role, SystemModel};
use crate::taxonomy::SecurityProperty;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("threat model references asset {asset_id:?} absent from system {system:?}")]
    ModelMismatch { system: String, asset_id: String },
}

fn resolve<'a>(
    system: &'a SystemModel,
    instance: &ThreatInstance,
) -> Result<&'a Asset, ReportError> {
    system
        .asset(&instance.asset_id)
        .ok_or_else(|| ReportError::ModelMismatch {
            system: system.name.clone(),
            asset_id: instance.asset_id.clone(),
        })
}

fn md_cell(text: &str) -> String {
    text.replace('|', "\\|").replace('\n', " ")
}

struct Section {
    environment: Environment,
    property: SecurityProperty,
    /// Roles merged into this section (integrity merges elements + channels).
    roles: &'static [Role],
}

const SECTIONS: [Section; 6] = [
    Section {
        environment: Environment::Physical,
        property: SecurityProperty::Confidentiality,
        roles: &[Role::Element],
    },
    Section {
        environment: Environment::Physical,
        property: SecurityProperty::Confidentiality,
        roles: &[Role::Channel],
    },
    Section {
        environment: Environment::Cyber,
        property: SecurityProperty::Confidentiality,
        roles: &[Role::Element],
    },
    Section {
        environment: Environment::Cyber,
        property: SecurityProperty::Confidentiality,
        roles: &[Role::Channel],
    },
    Section {
        environment: Environment::Physical,
        property: SecurityProperty::Integrity,
        roles: &[Role::Element, Role::Channel],
    },
    Section {
        environment: Environment::Cyber,
        property: SecurityProperty::Integrity,
        roles: &[Role::Element, Role::Channel],
    },
];

fn section_caption(section: &Section, has_elements: bool, has_channels: bool) -> String {
    let scope = match section.environment {
        Environment::Physical => "Territory",
        Environment::Cyber => "Computer network",
    };
    let members = match (has_elements, has_channels) {
        (true, true) => "elements, channels,",
        (false, true) => "channels",
        _ => "elements",
    };
    format!(
        "{scope} {members} and {} threats",
        section.property.as_str()
    )
}

fn first_column(has_elements: bool, has_channels: bool) -> &'static str {
    match (has_elements, has_channels) {
        (true, true) => "Element / channel",
        (false, true) => "Channel",
        _ => "Element",
    }
}

/// Render the threat model as the grouped three-column Markdown tables.
pub fn render_markdown(model: &ThreatModel, system: &SystemModel) -> Result<String, ReportError> {
    let mut out = format!("# Threat model: {}\n", md_cell(&model.system_name));

    if model.instances.is_empty() {
        out.push_str("\nNo threats.\n");
        return Ok(out);
    }

    for section in &SECTIONS {
        let rows: Vec<(&Asset, &ThreatInstance)> = model
            .instances
            .iter()
            .map(|i| resolve(system, i).map(|a| (a, i)))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|(asset, instance)| {
                asset.environment == section.environment
                    && section.roles.contains(&asset.role)
                    && instance.threat_type.property == section.property
            })
            .collect();
        if rows.is_empty() {
            continue;
        }
        let has_elements = rows.iter().any(|(a, _)| a.role == Role::Element);
        let has_channels = rows.iter().any(|(a, _)| a.role == Role::Channel);
        let caption = section_caption(section, has_elements, has_channels);
        let column = first_column(has_elements, has_channels);

        let _ = write!(out, "\n## {caption}\n\n");
        let _ = writeln!(out, "| {column} | List of threats | Types of threats |");
        out.push_str("| --- | --- | --- |\n");
        let mut previous_asset: Option<&str> = None;
        for (asset, instance) in rows {
            let label = if previous_asset == Some(asset.id.as_str()) {
                String::new()
            } else {
                md_cell(&asset.kind.display_word())
            };
            previous_asset = Some(asset.id.as_str());
            let _ = writeln!(
                out,
                "| {label} | {} | Type {} |",
                md_cell(&instance.description),
                instance.threat_type.ordinal
            );
        }
    }
    Ok(out)
}

const CSV_HEADER: [&str; 10] = [
    "asset_id",
    "asset_name",
    "kind",
    "role",
    "environment",
    "property",
    "type_code",
    "type_label",
    "template_id",
    "description",
];

/// One CSV row per instance, in model order, RFC 4180 quoting, LF endings.
pub fn render_csv(model: &ThreatModel, system: &SystemModel) -> Result<String, ReportError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("in-memory write");
    for instance in &model.instances {
        let asset = resolve(system, instance)?;
        writer
            .write_record([
                asset.id.as_str(),
                asset.display_name.as_str(),
                &asset.kind.token(),
                asset.role.as_str(),
                asset.environment.as_str(),
                instance.threat_type.property.as_str(),
                &instance.threat_type.code(),
                instance.threat_type.label(),
                instance.template_id.as_str(),
                instance.description.as_str(),
            ])
            .expect("in-memory write");
    }
    Ok(String::from_utf8(writer.into_inner().expect("in-memory flush"))
        .expect("CSV output is UTF-8"))
}

/// Single JSON object with fixed key order: system, instances, coverage, stats.
pub fn render_json(
    model: &ThreatModel,
    coverage: &CoverageReport,
    stats: &Stats,
    system: &SystemModel,
) -> Result<String, ReportError> {
    let instances = model
        .instances
        .iter()
        .map(|instance| {
            let asset = resolve(system, instance)?;
            Ok(json!({
                "asset_id": asset.id,
                "asset_name": asset.display_name,
                "kind": asset.kind.token(),
                "role": asset.role.as_str(),
                "environment": asset.environment.as_str(),
                "property": instance.threat_type.property.as_str(),
                "type_code": instance.threat_type.code(),
                "type_label": instance.threat_type.label(),
                "template_id": instance.template_id,
                "description": instance.description,
            }))
        })
        .collect::<Result<Vec<_>, ReportError>>()?;

    let coverage_cells: Vec<Value> = coverage
        .cells
        .iter()
        .map(|cell| {
            json!({
                "asset_id": cell.asset_id,
                "type_code": cell.threat_type.code(),
                "status": match cell.status {
                    CoverageStatus::Covered => "covered",
                    CoverageStatus::Uncovered => "uncovered",
                },
                "instance_count": cell.instance_count,
            })
        })
        .collect();

    let mut root = Map::new();
    root.insert("system".to_string(), json!(model.system_name));
    root.insert("instances".to_string(), Value::Array(instances));
    root.insert("coverage".to_string(), Value::Array(coverage_cells));
    root.insert("stats".to_string(), stats_json(stats));
    Ok(serde_json::to_string_pretty(&Value::Object(root)).expect("JSON output is infallible"))
}

/// The stats object alone, as rendered inside [`render_json`].
pub fn stats_json(stats: &Stats) -> Value {
    let mut per_property = Map::new();
    for (property, count) in &stats.per_property {
        per_property.insert(property.as_str().to_string(), json!(count));
    }
    let mut per_type = Map::new();
    for (code, count) in &stats.per_type {
        per_type.insert(code.clone(), json!(count));
    }
    let mut per_asset = Map::new();
    for (asset_id, count) in &stats.per_asset {
        per_asset.insert(asset_id.clone(), json!(count));
    }
    let mut out = Map::new();
    out.insert("total".to_string(), json!(stats.total));
    out.insert("per_property".to_string(), Value::Object(per_property));
    out.insert("per_type".to_string(), Value::Object(per_type));
    out.insert("per_asset".to_string(), Value::Object(per_asset));
    Value::Object(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::default_catalog;
    use crate::engine::{coverage, enumerate, stats};
    use crate::model::{build_system, canonical_paper_system};

    fn canonical() -> (SystemModel, ThreatModel) {
        let system = canonical_paper_system();
        let model = enumerate(&system, &default_catalog());
        (system, model)
    }

    #[test]
    fn markdown_has_five_tables_with_paper_row_counts() {
        let (system, model) = canonical();
        let text = render_markdown(&model, &system).unwrap();
        let captions: Vec<&str> = text
            .lines()
            .filter(|l| l.starts_with("## "))
            .collect();
        assert_eq!(
            captions,
            vec![
                "## Territory elements and confidentiality threats",
                "## Territory channels and confidentiality threats",
                "## Computer network elements and confidentiality threats",
                "## Territory elements, channels, and integrity threats",
                "## Computer network elements and integrity threats",
            ]
        );
        // body rows per section: pipe rows minus header and separator
        let counts: Vec<usize> = text
            .split("\n## ")
            .skip(1)
            .map(|section| section.lines().filter(|l| l.starts_with('|')).count() - 2)
            .collect();
        assert_eq!(counts, vec![6, 6, 9, 16, 12]);
    }

    #[test]
    fn markdown_first_row_matches_source_table() {
        let (system, model) = canonical();
        let text = render_markdown(&model, &system).unwrap();
        let first_body_row = text
            .lines()
            .skip_while(|l| !l.starts_with("| ---"))
            .nth(1)
            .unwrap();
        assert_eq!(
            first_body_row,
            "| Office | Disclosure (leakage) of the office number where confidential information is stored or processed | Type 1 |"
        );
    }

    #[test]
    fn markdown_empty_model() {
        let system = build_system("x", vec![]).unwrap();
        let model = enumerate(&system, &default_catalog());
        let text = render_markdown(&model, &system).unwrap();
        assert_eq!(text, "# Threat model: x\n\nNo threats.\n");
    }

    #[test]
    fn csv_line_count_and_fields() {
        let (system, model) = canonical();
        let text = render_csv(&model, &system).unwrap();
        assert_eq!(text.lines().count(), 1 + model.instances.len());
        assert_eq!(text.lines().count(), 50);
        let software_i1 = text
            .lines()
            .find(|l| l.contains("i1.software"))
            .unwrap();
        assert!(software_i1.contains("I1"));
        assert!(software_i1.contains("Removal of software"));
    }

    #[test]
    fn csv_empty_model_is_header_only() {
        let system = build_system("x", vec![]).unwrap();
        let model = enumerate(&system, &default_catalog());
        let text = render_csv(&model, &system).unwrap();
        assert_eq!(text, format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn csv_quoting_round_trips() {
        let (system, model) = canonical();
        let text = render_csv(&model, &system).unwrap();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        for (record, instance) in reader.records().zip(&model.instances) {
            let record = record.unwrap();
            assert_eq!(&record[0], instance.asset_id.as_str());
            assert_eq!(&record[9], instance.description.as_str());
        }
    }

    #[test]
    fn json_shape_and_counts() {
        let (system, model) = canonical();
        let report = coverage(&system, &model).unwrap();
        let s = stats(&model);
        let text = render_json(&model, &report, &s, &system).unwrap();
        let value: Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["system", "instances", "coverage", "stats"]);
        assert_eq!(value["stats"]["per_property"]["confidentiality"], 21);
        assert_eq!(value["stats"]["per_property"]["integrity"], 28);
        assert_eq!(value["instances"].as_array().unwrap().len(), 49);
        assert_eq!(value["coverage"].as_array().unwrap().len(), 49);
    }

    #[test]
    fn json_empty_model() {
        let system = build_system("e", vec![]).unwrap();
        let model = enumerate(&system, &default_catalog());
        let report = coverage(&system, &model).unwrap();
        let s = stats(&model);
        let text = render_json(&model, &report, &s, &system).unwrap();
        let value: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["system"], "e");
        assert!(value["instances"].as_array().unwrap().is_empty());
        assert!(value["coverage"].as_array().unwrap().is_empty());
        assert_eq!(value["stats"]["total"], 0);
    }

    #[test]
    fn json_reserializes_identically() {
        let (system, model) = canonical();
        let report = coverage(&system, &model).unwrap();
        let s = stats(&model);
        let text = render_json(&model, &report, &s, &system).unwrap();
        let value: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&value).unwrap(), text);
    }

    #[test]
    fn renderers_are_deterministic() {
        let (system, model) = canonical();
        assert_eq!(
            render_markdown(&model, &system).unwrap(),
            render_markdown(&model, &system).unwrap()
        );
        assert_eq!(
            render_csv(&model, &system).unwrap(),
            render_csv(&model, &system).unwrap()
        );
    }

    #[test]
    fn model_mismatch_is_reported() {
        let (_, model) = canonical();
        let other = build_system("other", vec![]).unwrap();
        assert!(matches!(
            render_markdown(&model, &other),
            Err(ReportError::ModelMismatch { .. })
        ));
        assert!(matches!(
            render_csv(&model, &other),
            Err(ReportError::ModelMismatch { .. })
        ));
    }
}
