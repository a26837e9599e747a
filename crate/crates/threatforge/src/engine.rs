//! Deterministic threat enumeration, coverage analysis and summary stats.
//!
//! Enumeration instantiates every catalog template against every asset of the
//! matching kind. Per-asset instantiation is independent, so with the
//! `parallel` feature the asset loop runs on rayon; blocks are reassembled in
//! declaration order, so both paths produce byte-identical output.

use std::collections::BTreeMap;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

use crate::catalog::{templates_for, Catalog};
use crate::model::{Asset, SystemModel};
use crate::taxonomy::{all_threat_types, SecurityProperty, ThreatType};

/// One catalog template applied to one concrete asset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreatInstance {
    pub asset_id: String,
    pub threat_type: ThreatType,
    pub template_id: String,
    pub description: String,
}

/// The full enumerated threat list for a system. Instances are ordered by
/// asset declaration order, then confidentiality before integrity, then
/// ordinal, then catalog order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreatModel {
    pub system_name: String,
    pub instances: Vec<ThreatInstance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageStatus {
    Covered,
    Uncovered,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageCell {
    pub asset_id: String,
    pub threat_type: ThreatType,
    pub status: CoverageStatus,
    pub instance_count: usize,
}

/// Per-(asset, threat type) matrix: seven cells per asset, covered iff at
/// least one instance targets the cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub cells: Vec<CoverageCell>,
}

impl CoverageReport {
    pub fn uncovered(&self) -> impl Iterator<Item = &CoverageCell> {
        self.cells
            .iter()
            .filter(|c| c.status == CoverageStatus::Uncovered)
    }

    pub fn fully_covered(&self) -> bool {
        self.uncovered().next().is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Stats {
    pub total: usize,
    pub per_property: BTreeMap<SecurityProperty, usize>,
    /// Keyed by type code "C1".."I4".
    pub per_type: BTreeMap<String, usize>,
    /// Keyed by asset id, in asset-id order.
    pub per_asset: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("threat model references asset {asset_id:?} absent from system {system:?}")]
    ModelMismatch { system: String, asset_id: String },
}

fn instantiate_asset(asset: &Asset, catalog: &Catalog) -> Vec<ThreatInstance> {
    let mut templates = templates_for(catalog, &asset.kind, None);
    // catalog order is the tie-break within a (property, ordinal) cell
    templates.sort_by_key(|t| (t.threat_type.property, t.threat_type.ordinal));
    templates
        .into_iter()
        .map(|t| ThreatInstance {
            asset_id: asset.id.clone(),
            threat_type: t.threat_type,
            template_id: t.id.clone(),
            description: t.text.replace("{name}", &asset.display_name),
        })
        .collect()
}

/// Sequential enumeration path. Always available; the `parallel` feature
/// only changes which path [`enumerate`] dispatches to.
pub fn enumerate_sequential(system: &SystemModel, catalog: &Catalog) -> ThreatModel {
    let instances = system
        .assets
        .iter()
        .flat_map(|asset| instantiate_asset(asset, catalog))
        .collect();
    ThreatModel {
        system_name: system.name.clone(),
        instances,
    }
}

/// Rayon-parallel enumeration: per-asset blocks computed in parallel and
/// concatenated in declaration order.
#[cfg(feature = "parallel")]
pub fn enumerate_parallel(system: &SystemModel, catalog: &Catalog) -> ThreatModel {
    let instances = system
        .assets
        .par_iter()
        .map(|asset| instantiate_asset(asset, catalog))
        .flatten_iter()
        .collect();
    ThreatModel {
        system_name: system.name.clone(),
        instances,
    }
}

/// Instantiate every applicable catalog template against every asset.
/// Pure function of its inputs; output ordering is stable across runs.
pub fn enumerate(system: &SystemModel, catalog: &Catalog) -> ThreatModel {
    #[cfg(feature = "parallel")]
    {
        enumerate_parallel(system, catalog)
    }
    #[cfg(not(feature = "parallel"))]
    {
        enumerate_sequential(system, catalog)
    }
}

/// Compute the coverage matrix of `model` over `system`: one cell per
/// (asset, threat type), in the same ordering as the instances.
pub fn coverage(system: &SystemModel, model: &ThreatModel) -> Result<CoverageReport, EngineError> {
    for instance in &model.instances {
        if system.asset(&instance.asset_id).is_none() {
            return Err(EngineError::ModelMismatch {
                system: system.name.clone(),
                asset_id: instance.asset_id.clone(),
            });
        }
    }
    let mut cells = Vec::with_capacity(system.assets.len() * 7);
    for asset in &system.assets {
        for threat_type in all_threat_types() {
            let instance_count = model
                .instances
                .iter()
                .filter(|i| i.asset_id == asset.id && i.threat_type == threat_type)
                .count();
            cells.push(CoverageCell {
                asset_id: asset.id.clone(),
                threat_type,
                status: if instance_count >= 1 {
                    CoverageStatus::Covered
                } else {
                    CoverageStatus::Uncovered
                },
                instance_count,
            });
        }
    }
    Ok(CoverageReport { cells })
}

/// Summary counts: total, per property, per type code, per asset.
pub fn stats(model: &ThreatModel) -> Stats {
    let mut out = Stats {
        total: model.instances.len(),
        ..Stats::default()
    };
    for property in SecurityProperty::ALL {
        out.per_property.insert(property, 0);
    }
    for threat_type in all_threat_types() {
        out.per_type.insert(threat_type.code(), 0);
    }
    for instance in &model.instances {
        *out.per_property
            .get_mut(&instance.threat_type.property)
            .unwrap() += 1;
        *out.per_type.get_mut(&instance.threat_type.code()).unwrap() += 1;
        *out.per_asset.entry(instance.asset_id.clone()).or_insert(0) += 1;
    }
    out
}
