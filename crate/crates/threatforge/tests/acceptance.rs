//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;

use threatforge::catalog::{default_catalog, load_catalog, serialize_catalog};
use threatforge::engine::{coverage, enumerate, CoverageStatus};
use threatforge::model::{build_system, Asset, AssetKind, Role, SystemModel, BUILTIN_KINDS};
use threatforge::report::render_csv;
use threatforge::sdl::{parse, serialize};

fn paper_sdl() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../paper.sdl")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_threatforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

struct Criterion {
    number: u32,
    name: &'static str,
}

impl Criterion {
    fn check(self, condition: bool, detail: &str) {
        if condition {
            println!("PASS criterion {}: {}", self.number, self.name);
        } else {
            println!("FAIL criterion {}: {} ({detail})", self.number, self.name);
            panic!("criterion {} failed: {detail}", self.number);
        }
    }
}

/// Small deterministic generator, independent of proptest, for criteria 4-5.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        // xorshift64
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    fn below(&mut self, bound: usize) -> usize {
        (self.next() % bound as u64) as usize
    }
}

fn random_system(rng: &mut Rng, index: usize) -> SystemModel {
    let count = rng.below(21);
    let kinds: Vec<AssetKind> = (0..count)
        .map(|_| BUILTIN_KINDS[rng.below(BUILTIN_KINDS.len())].clone())
        .collect();
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
            let mut asset = Asset::builtin(kind.clone(), format!("a{i}"), format!("Asset {i}"));
            if rng.below(2) == 0 {
                asset = asset.with_attr("misc", format!("note {}", rng.below(100)));
            }
            if kind.canonical_role() == Some(Role::Channel) && !element_ids.is_empty() {
                let picks = rng.below(3);
                let mut endpoints: Vec<String> = (0..picks)
                    .map(|_| element_ids[rng.below(element_ids.len())].clone())
                    .collect();
                endpoints.dedup();
                asset.endpoints = endpoints;
            }
            asset
        })
        .collect();
    build_system(format!("generated {index}"), assets).expect("generator emits valid systems")
}

#[test]
fn criterion_1_table_facsimile() {
    let start = Instant::now();
    let out = run(&["enumerate", paper_sdl().to_str().unwrap(), "--format", "md"]);
    let elapsed = start.elapsed();
    let text = String::from_utf8(out.stdout).unwrap();

    let golden = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/paper_tables.md"),
    )
    .unwrap();
    let row_counts: Vec<usize> = text
        .split("\n## ")
        .skip(1)
        .map(|section| section.lines().filter(|l| l.starts_with('|')).count() - 2)
        .collect();

    Criterion {
        number: 1,
        name: "five-table Markdown facsimile, byte-exact, under 1s",
    }
    .check(
        out.status.code() == Some(0)
            && text == golden
            && row_counts == vec![6, 6, 9, 16, 12]
            && text.contains("| Office | Disclosure (leakage) of the office number where confidential information is stored or processed | Type 1 |")
            && text.contains("| Software | Removal of software | Type 1 |")
            && elapsed.as_secs_f64() < 1.0,
        &format!("row counts {row_counts:?}, elapsed {elapsed:?}, golden match: {}", text == golden),
    );
}

#[test]
fn criterion_2_published_row_counts() {
    let out = run(&["stats", paper_sdl().to_str().unwrap()]);
    let value: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    Criterion {
        number: 2,
        name: "canonical stats: confidentiality 21, integrity 28, total 49",
    }
    .check(
        value["per_property"]["confidentiality"] == 21
            && value["per_property"]["integrity"] == 28
            && value["total"] == 49,
        &value.to_string(),
    );
}

#[test]
fn criterion_3_coverage_completeness() {
    let system = parse(&std::fs::read_to_string(paper_sdl()).unwrap()).unwrap();
    let model = enumerate(&system, &default_catalog());
    let report = coverage(&system, &model).unwrap();
    let canonical_ok =
        report.cells.len() == 49 && report.cells.iter().all(|c| c.instance_count == 1);

    let custom = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/custom.sdl");
    let out = run(&["coverage", custom.to_str().unwrap(), "--strict"]);
    let uncovered_listed = String::from_utf8(out.stdout)
        .unwrap()
        .matches("uncovered")
        .count();

    Criterion {
        number: 3,
        name: "49/49 covered cells; custom kind adds 7 uncovered cells and exit 2 under --strict",
    }
    .check(
        canonical_ok && out.status.code() == Some(2) && uncovered_listed == 7,
        &format!(
            "canonical_ok={canonical_ok}, strict exit={:?}, uncovered={uncovered_listed}",
            out.status.code()
        ),
    );
}

#[test]
fn criterion_4_oracle_equivalence_over_200_systems() {
    let catalog = default_catalog();
    let mut rng = Rng(0x5eed_cafe_f00d_0001);
    let mut ok = true;
    let mut detail = String::new();
    for index in 0..200 {
        let system = random_system(&mut rng, index);
        let model = enumerate(&system, &catalog);
        // oracle: sum of matching-template counts per asset
        let expected: usize = system
            .assets
            .iter()
            .map(|a| catalog.templates.iter().filter(|t| t.applies_to == a.kind).count())
            .sum();
        if model.instances.len() != expected {
            ok = false;
            detail = format!("system {index}: {} != {expected}", model.instances.len());
            break;
        }
        // oracle: brute-force join of instances onto cells
        let report = coverage(&system, &model).unwrap();
        for cell in &report.cells {
            let joined = model
                .instances
                .iter()
                .filter(|i| i.asset_id == cell.asset_id && i.threat_type == cell.threat_type)
                .count();
            if cell.instance_count != joined
                || (cell.status == CoverageStatus::Covered) != (joined >= 1)
            {
                ok = false;
                detail = format!("system {index}: cell {} {} mismatch", cell.asset_id, cell.threat_type);
                break;
            }
        }
        if !ok {
            break;
        }
    }
    Criterion {
        number: 4,
        name: "enumeration and coverage match brute-force oracles on 200 random systems",
    }
    .check(ok, &detail);
}

#[test]
fn criterion_5_round_trips() {
    let mut rng = Rng(0x5eed_cafe_f00d_0002);
    let mut ok = true;
    let mut detail = String::new();
    for index in 0..200 {
        let system = random_system(&mut rng, index);
        match parse(&serialize(&system)) {
            Ok(reparsed) if reparsed == system => {}
            other => {
                ok = false;
                detail = format!("system {index} did not round-trip: {other:?}");
                break;
            }
        }
    }

    let catalog = default_catalog();
    let catalog_ok = matches!(load_catalog(&serialize_catalog(&catalog)), Ok(c) if c == catalog);

    // CSV rows parse back to the originating field values
    let system = parse(&std::fs::read_to_string(paper_sdl()).unwrap()).unwrap();
    let model = enumerate(&system, &catalog);
    let csv_text = render_csv(&model, &system).unwrap();
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let mut csv_ok = true;
    for (record, instance) in reader.records().zip(&model.instances) {
        let record = record.unwrap();
        if record[0] != instance.asset_id
            || record[6] != instance.threat_type.code()
            || record[8] != instance.template_id
            || record[9] != instance.description
        {
            csv_ok = false;
            break;
        }
    }

    Criterion {
        number: 5,
        name: "SDL, catalog and CSV round trips",
    }
    .check(
        ok && catalog_ok && csv_ok,
        &format!("sdl: {detail:?}, catalog_ok={catalog_ok}, csv_ok={csv_ok}"),
    );
}

#[test]
fn criterion_6_cli_determinism() {
    let paper = paper_sdl();
    let paper = paper.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["validate", paper],
        vec!["enumerate", paper, "--format", "md"],
        vec!["enumerate", paper, "--format", "csv"],
        vec!["enumerate", paper, "--format", "json"],
        vec!["coverage", paper],
        vec!["catalog", "list"],
        vec!["stats", paper],
    ];
    let mut ok = true;
    let mut detail = String::new();
    for args in &commands {
        let first = run(args);
        let second = run(args);
        if first.stdout != second.stdout {
            ok = false;
            detail = format!("{args:?} output differs between runs");
            break;
        }
    }
    Criterion {
        number: 6,
        name: "every CLI command is byte-identical across consecutive runs",
    }
    .check(ok, &detail);
}

#[test]
fn criterion_7_monotonicity_under_asset_duplication() {
    let source = std::fs::read_to_string(paper_sdl()).unwrap();
    let base = parse(&source).unwrap();
    let catalog = default_catalog();
    let base_model = enumerate(&base, &catalog);

    let extended_source = format!("{source}element office office2 \"Office\"\n");
    let extended = parse(&extended_source).unwrap();
    let extended_model = enumerate(&extended, &catalog);

    Criterion {
        number: 7,
        name: "duplicating the office adds exactly 7 instances and keeps the 49 in order",
    }
    .check(
        base_model.instances.len() == 49
            && extended_model.instances.len() == 56
            && extended_model.instances[..49] == base_model.instances[..],
        &format!(
            "base {} extended {}",
            base_model.instances.len(),
            extended_model.instances.len()
        ),
    );
}
