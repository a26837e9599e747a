//! Threat catalog: reusable threat templates keyed by asset kind and threat
//! type, plus the embedded default catalog (the baseline "bank of threats").
//!
//! Catalogs load from JSON documents and layer via [`merge`]: an extension
//! template whose id already exists replaces the base entry in place, so user
//! catalogs can override or extend the defaults.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::AssetKind;
use crate::taxonomy::{SecurityProperty, ThreatType};

/// One reusable threat description bound to an asset kind and a threat type.
/// The text may contain the placeholder `{name}`, substituted with the
/// asset's display name at enumeration time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreatTemplate {
    /// Unique per catalog; convention `<c|i><ordinal>.<kind>`, e.g. `c1.office`.
    pub id: String,
    pub applies_to: AssetKind,
    pub threat_type: ThreatType,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub name: String,
    pub version: u32,
    pub templates: Vec<ThreatTemplate>,
}

impl Catalog {
    pub fn empty(name: impl Into<String>) -> Catalog {
        Catalog {
            name: name.into(),
            version: 1,
            templates: Vec::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate template id {id:?}")]
    DuplicateTemplateId { id: String },
    #[error("template {id:?}: unknown kind {kind:?}")]
    UnknownKind { id: String, kind: String },
    #[error("template {id:?}: unknown type code {code:?}")]
    UnknownTypeCode { id: String, code: String },
    #[error("template {id:?}: placeholder {placeholder:?} is not supported (only {{name}})")]
    BadPlaceholder { id: String, placeholder: String },
    #[error("template {id:?}: empty threat text")]
    EmptyText { id: String },
    #[error("catalog version must be >= 1")]
    BadVersion,
}

// Rows of the built-in catalog, in table order: confidentiality for physical
// elements, physical channels, cyber elements, then integrity for physical
// assets and cyber elements. Texts are canonical as printed, including their
// punctuation quirks.
const DEFAULT_ROWS: &[(AssetKind, SecurityProperty, u8, &str)] = &[
    // physical elements, confidentiality
    (AssetKind::Office, SecurityProperty::Confidentiality, 1,
     "Disclosure (leakage) of the office number where confidential information is stored or processed"),
    (AssetKind::Office, SecurityProperty::Confidentiality, 2,
     "Disclosure (leakage) of the list of employees who have access to confidential information. Sniffing out information from employees (the one who does not have access to confidential information, who does). Same threats to the building"),
    (AssetKind::Office, SecurityProperty::Confidentiality, 3,
     "Disclosure of the level of confidentiality of information that is stored"),
    (AssetKind::Building, SecurityProperty::Confidentiality, 1,
     "Disclosure of the location of the building and the entrance"),
    (AssetKind::Building, SecurityProperty::Confidentiality, 2,
     "Disclosure of the rules of entry for employees"),
    (AssetKind::Building, SecurityProperty::Confidentiality, 3,
     "Disclosure of the building plan"),
    // physical channels, confidentiality
    (AssetKind::Corridor, SecurityProperty::Confidentiality, 1,
     "Disclosure of the location of the corridors (on which floor, which corridor and which offices are on this floor)"),
    (AssetKind::Corridor, SecurityProperty::Confidentiality, 2,
     "Disclosure of the list of employees who can move along certain corridors and floors"),
    (AssetKind::Corridor, SecurityProperty::Confidentiality, 3,
     "Disclosure of the corridor plan"),
    (AssetKind::Territory, SecurityProperty::Confidentiality, 1,
     "Disclosure of the plan for the location of buildings on the territory"),
    (AssetKind::Territory, SecurityProperty::Confidentiality, 2,
     "Disclosure of the list of employees and entry rules for these employees who have access to the territory"),
    (AssetKind::Territory, SecurityProperty::Confidentiality, 3,
     "Disclosure of the plan of territories"),
    // cyber elements, confidentiality
    (AssetKind::Software, SecurityProperty::Confidentiality, 1,
     "Disclosure (leakage) of information about the name of the software installed within the operating system"),
    (AssetKind::Software, SecurityProperty::Confidentiality, 2,
     "Disclosure (leakage) of information about the protocol by which the software interacts"),
    (AssetKind::Software, SecurityProperty::Confidentiality, 3,
     "Disclosure (leakage) of information about the name of the software"),
    (AssetKind::OperatingSystem, SecurityProperty::Confidentiality, 1,
     "Disclosure (leakage) of information about OS settings"),
    (AssetKind::OperatingSystem, SecurityProperty::Confidentiality, 2,
     "Disclosure (leakage) of information about the protocol by which the OS interacts in the corresponding local network;"),
    (AssetKind::OperatingSystem, SecurityProperty::Confidentiality, 3,
     "Disclosure (leakage) of information about the OS name."),
    (AssetKind::LocalNetwork, SecurityProperty::Confidentiality, 1,
     "Disclosure (leakage) of information about LAN settings;"),
    (AssetKind::LocalNetwork, SecurityProperty::Confidentiality, 2,
     "Disclosure (leakage) of information about the protocol by which the LAN interacts;"),
    (AssetKind::LocalNetwork, SecurityProperty::Confidentiality, 3,
     "Disclosure (leakage) of information about the name of the LAN."),
    // physical elements and channels, integrity
    (AssetKind::Office, SecurityProperty::Integrity, 1,
     "Disable the camera, which is in the office with confidential information"),
    (AssetKind::Office, SecurityProperty::Integrity, 2,
     "Installation of hidden cameras, microphones or bugs in the office"),
    (AssetKind::Office, SecurityProperty::Integrity, 3,
     "Substitution of a regular pass for a pass, which makes it possible to enter the office with confidential information"),
    (AssetKind::Office, SecurityProperty::Integrity, 4,
     "Violation of the efficiency of employees who work in the office"),
    (AssetKind::Corridor, SecurityProperty::Integrity, 1,
     "Disabling or disabling cameras located in the corridors"),
    (AssetKind::Corridor, SecurityProperty::Integrity, 2,
     "Introduction of an unauthorized user into the list of employees who can move along the corridors"),
    (AssetKind::Corridor, SecurityProperty::Integrity, 3,
     "Replacement of the corridor plan"),
    (AssetKind::Corridor, SecurityProperty::Integrity, 4,
     "Changing the building plan"),
    (AssetKind::Building, SecurityProperty::Integrity, 1,
     "Power outages throughout the building"),
    (AssetKind::Building, SecurityProperty::Integrity, 2,
     "Adding new employees to the list of those employees who can pass through the checkpoint"),
    (AssetKind::Building, SecurityProperty::Integrity, 3,
     "Steal a pass from employees who have the right to enter"),
    (AssetKind::Building, SecurityProperty::Integrity, 4,
     "Changing the building plan"),
    (AssetKind::Territory, SecurityProperty::Integrity, 1,
     "Power outages"),
    (AssetKind::Territory, SecurityProperty::Integrity, 2,
     "Installing a microphone or bug in the smoking area"),
    (AssetKind::Territory, SecurityProperty::Integrity, 3,
     "Replacement of keys to enter"),
    (AssetKind::Territory, SecurityProperty::Integrity, 4,
     "Distortion of data in the pass, which makes it possible to enter the territory"),
    // cyber elements, integrity
    (AssetKind::Software, SecurityProperty::Integrity, 1,
     "Removal of software"),
    (AssetKind::Software, SecurityProperty::Integrity, 2,
     "Software installation"),
    (AssetKind::Software, SecurityProperty::Integrity, 3,
     "Software substitution"),
    (AssetKind::Software, SecurityProperty::Integrity, 4,
     "Change the port number that the software uses"),
    (AssetKind::OperatingSystem, SecurityProperty::Integrity, 1,
     "Intentional damage (disabling) of the operating system"),
    (AssetKind::OperatingSystem, SecurityProperty::Integrity, 2,
     "Installation of an additional operating system"),
    (AssetKind::OperatingSystem, SecurityProperty::Integrity, 3,
     "Substitution of the operating system"),
    (AssetKind::OperatingSystem, SecurityProperty::Integrity, 4,
     "Changing the ip-address used by the operating system"),
    (AssetKind::LocalNetwork, SecurityProperty::Integrity, 1,
     "Intentional damage (disablement) of the local computer network"),
    (AssetKind::LocalNetwork, SecurityProperty::Integrity, 2,
     "Adding protocols"),
    (AssetKind::LocalNetwork, SecurityProperty::Integrity, 3,
     "Substitution of protocols"),
    (AssetKind::LocalNetwork, SecurityProperty::Integrity, 4,
     "Changing the ip-address of the network"),
];

/// The built-in catalog: 49 templates, one per (built-in kind, applicable
/// threat type) pair, 21 confidentiality and 28 integrity.
pub fn default_catalog() -> Catalog {
    let templates = DEFAULT_ROWS
        .iter()
        .map(|(kind, property, ordinal, text)| {
            let threat_type = ThreatType::new(*property, *ordinal).expect("static table");
            ThreatTemplate {
                id: format!(
                    "{}{}.{}",
                    threat_type.code().to_lowercase().chars().next().unwrap(),
                    ordinal,
                    kind.token()
                ),
                applies_to: kind.clone(),
                threat_type,
                text: (*text).to_string(),
            }
        })
        .collect();
    Catalog {
        name: "default".to_string(),
        version: 1,
        templates,
    }
}

fn check_placeholders(id: &str, text: &str) -> Result<(), CatalogError> {
    let mut rest = text;
    while let Some(start) = rest.find('{') {
        let tail = &rest[start..];
        let end = tail.find('}').ok_or_else(|| CatalogError::BadPlaceholder {
            id: id.to_string(),
            placeholder: tail.to_string(),
        })?;
        let placeholder = &tail[..=end];
        if placeholder != "{name}" {
            return Err(CatalogError::BadPlaceholder {
                id: id.to_string(),
                placeholder: placeholder.to_string(),
            });
        }
        rest = &tail[end + 1..];
    }
    Ok(())
}

fn check_catalog(catalog: &Catalog) -> Result<(), CatalogError> {
    if catalog.version < 1 {
        return Err(CatalogError::BadVersion);
    }
    let mut seen = std::collections::HashSet::new();
    for template in &catalog.templates {
        if !seen.insert(template.id.as_str()) {
            return Err(CatalogError::DuplicateTemplateId {
                id: template.id.clone(),
            });
        }
        if template.text.is_empty() {
            return Err(CatalogError::EmptyText {
                id: template.id.clone(),
            });
        }
        check_placeholders(&template.id, &template.text)?;
    }
    Ok(())
}

// Wire form of the catalog file. Unknown keys are rejected.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogDoc {
    catalog: String,
    version: u32,
    templates: Vec<TemplateDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateDoc {
    id: String,
    applies_to: String,
    #[serde(rename = "type")]
    type_code: String,
    text: String,
}

/// Parse and validate a catalog JSON document, preserving file order.
pub fn load_catalog(document: &str) -> Result<Catalog, CatalogError> {
    let doc: CatalogDoc = serde_json::from_str(document).map_err(|e| CatalogError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let templates = doc
        .templates
        .into_iter()
        .map(|t| {
            let applies_to =
                AssetKind::from_token(&t.applies_to).ok_or_else(|| CatalogError::UnknownKind {
                    id: t.id.clone(),
                    kind: t.applies_to.clone(),
                })?;
            let threat_type = ThreatType::parse_code(&t.type_code).map_err(|_| {
                CatalogError::UnknownTypeCode {
                    id: t.id.clone(),
                    code: t.type_code.clone(),
                }
            })?;
            Ok(ThreatTemplate {
                id: t.id,
                applies_to,
                threat_type,
                text: t.text,
            })
        })
        .collect::<Result<Vec<_>, CatalogError>>()?;
    let catalog = Catalog {
        name: doc.catalog,
        version: doc.version,
        templates,
    };
    check_catalog(&catalog)?;
    Ok(catalog)
}

/// Serialize a catalog to its JSON file form.
pub fn serialize_catalog(catalog: &Catalog) -> String {
    let doc = CatalogDoc {
        catalog: catalog.name.clone(),
        version: catalog.version,
        templates: catalog
            .templates
            .iter()
            .map(|t| TemplateDoc {
                id: t.id.clone(),
                applies_to: t.applies_to.token(),
                type_code: t.threat_type.code(),
                text: t.text.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("catalog serialization is infallible")
}

/// Layer `extension` over `base`. A template whose id already exists in the
/// base replaces the base entry in place; new ids append in extension order.
pub fn merge(base: &Catalog, extension: &Catalog) -> Catalog {
    let mut templates = base.templates.clone();
    for template in &extension.templates {
        match templates.iter_mut().find(|t| t.id == template.id) {
            Some(slot) => *slot = template.clone(),
            None => templates.push(template.clone()),
        }
    }
    Catalog {
        name: base.name.clone(),
        version: base.version.max(extension.version),
        templates,
    }
}

/// Templates applicable to a kind, optionally restricted to one property,
/// in catalog order.
pub fn templates_for<'a>(
    catalog: &'a Catalog,
    kind: &AssetKind,
    property: Option<SecurityProperty>,
) -> Vec<&'a ThreatTemplate> {
    catalog
        .templates
        .iter()
        .filter(|t| t.applies_to == *kind)
        .filter(|t| property.map_or(true, |p| t.threat_type.property == p))
        .collect()
}
