//! Threat-model-as-code engine.
//!
//! Systems are declared in a small text language (SDL), threats live in a
//! layerable JSON catalog seeded with a built-in bank of 49 templates, and
//! the engine deterministically enumerates every applicable threat, checks
//! per-cell coverage, and renders Markdown, CSV and JSON reports.

pub mod catalog;
pub mod engine;
pub mod model;
pub mod report;
pub mod sdl;
pub mod taxonomy;

pub use catalog::{default_catalog, load_catalog, merge, serialize_catalog, Catalog, ThreatTemplate};
pub use engine::{coverage, enumerate, stats, CoverageReport, Stats, ThreatInstance, ThreatModel};
pub use model::{
    build_system, canonical_paper_system, validate, Asset, AssetKind, Environment, Role,
    SystemModel, ValidationReport,
};
pub use sdl::{parse, serialize, ParseError};
pub use taxonomy::{threat_types, type_label, SecurityProperty, ThreatType};
