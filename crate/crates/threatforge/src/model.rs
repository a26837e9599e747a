//! System-description data model: assets, kinds, roles, environments and
//! whole-system validation.
//!
//! A system is an ordered collection of assets. Each asset is either an
//! element (stores or processes information) or a channel (a pathway between
//! elements), and lives in the physical world or in cyberspace. The seven
//! built-in kinds carry fixed role/environment pairs; custom kinds declare
//! theirs explicitly.

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Element,
    Channel,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Element => "element",
            Role::Channel => "channel",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Environment {
    Physical,
    Cyber,
}

impl Environment {
    pub fn as_str(self) -> &'static str {
        match self {
            Environment::Physical => "physical",
            Environment::Cyber => "cyber",
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Kind of an asset. The seven built-in kinds are the closed set used by the
/// default catalog; custom kinds extend the model for user catalogs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AssetKind {
    Office,
    Building,
    Corridor,
    Territory,
    Software,
    OperatingSystem,
    LocalNetwork,
    Custom(String),
}

pub const BUILTIN_KINDS: [AssetKind; 7] = [
    AssetKind::Office,
    AssetKind::Building,
    AssetKind::Corridor,
    AssetKind::Territory,
    AssetKind::Software,
    AssetKind::OperatingSystem,
    AssetKind::LocalNetwork,
];

impl AssetKind {
    /// Canonical lowercase token, used in catalog files and CSV output.
    /// Custom kinds render as `custom:<name>`.
    pub fn token(&self) -> String {
        match self {
            AssetKind::Office => "office".to_string(),
            AssetKind::Building => "building".to_string(),
            AssetKind::Corridor => "corridor".to_string(),
            AssetKind::Territory => "territory".to_string(),
            AssetKind::Software => "software".to_string(),
            AssetKind::OperatingSystem => "operating_system".to_string(),
            AssetKind::LocalNetwork => "local_network".to_string(),
            AssetKind::Custom(name) => format!("custom:{name}"),
        }
    }

    /// Parse a catalog-file kind token (`office` .. `local_network`,
    /// `custom:<name>`).
    pub fn from_token(token: &str) -> Option<AssetKind> {
        match token {
            "office" => Some(AssetKind::Office),
            "building" => Some(AssetKind::Building),
            "corridor" => Some(AssetKind::Corridor),
            "territory" => Some(AssetKind::Territory),
            "software" => Some(AssetKind::Software),
            "operating_system" => Some(AssetKind::OperatingSystem),
            "local_network" => Some(AssetKind::LocalNetwork),
            _ => {
                let name = token.strip_prefix("custom:")?;
                if is_valid_custom_name(name) {
                    Some(AssetKind::Custom(name.to_string()))
                } else {
                    None
                }
            }
        }
    }

    /// Fixed role for built-in kinds; `None` for custom kinds.
    pub fn canonical_role(&self) -> Option<Role> {
        match self {
            AssetKind::Office | AssetKind::Building => Some(Role::Element),
            AssetKind::Corridor | AssetKind::Territory => Some(Role::Channel),
            AssetKind::Software | AssetKind::OperatingSystem | AssetKind::LocalNetwork => {
                Some(Role::Element)
            }
            AssetKind::Custom(_) => None,
        }
    }

    /// Fixed environment for built-in kinds; `None` for custom kinds.
    pub fn canonical_environment(&self) -> Option<Environment> {
        match self {
            AssetKind::Office
            | AssetKind::Building
            | AssetKind::Corridor
            | AssetKind::Territory => Some(Environment::Physical),
            AssetKind::Software | AssetKind::OperatingSystem | AssetKind::LocalNetwork => {
                Some(Environment::Cyber)
            }
            AssetKind::Custom(_) => None,
        }
    }

    /// Capitalized display word used in the Markdown report's first column.
    pub fn display_word(&self) -> String {
        match self {
            AssetKind::Office => "Office".to_string(),
            AssetKind::Building => "Building".to_string(),
            AssetKind::Corridor => "Corridor".to_string(),
            AssetKind::Territory => "Territory".to_string(),
            AssetKind::Software => "Software".to_string(),
            AssetKind::OperatingSystem => "Operating system (OS)".to_string(),
            AssetKind::LocalNetwork => "Network (LAN)".to_string(),
            AssetKind::Custom(name) => {
                let mut chars = name.chars();
                match chars.next() {
                    Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
                    None => String::new(),
                }
            }
        }
    }
}

/// Custom kind names are lowercase tokens that never shadow a built-in kind.
pub fn is_valid_custom_name(name: &str) -> bool {
    if name.is_empty() {
        return false;
    }
    let mut chars = name.chars();
    let first = chars.next().unwrap();
    if !(first.is_ascii_lowercase() || first == '_') {
        return false;
    }
    if !chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
        return false;
    }
    BUILTIN_KINDS.iter().all(|k| k.token() != name)
}

/// One element or channel of the modeled system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Asset {
    pub id: String,
    pub kind: AssetKind,
    pub role: Role,
    pub environment: Environment,
    pub display_name: String,
    /// Free-form attributes; conventional keys: location, protection, misc.
    pub attributes: IndexMap<String, String>,
    /// Linked element ids. Channels only; empty for elements.
    pub endpoints: Vec<String>,
}

impl Asset {
    /// Asset of a built-in kind with its canonical role and environment.
    pub fn builtin(kind: AssetKind, id: impl Into<String>, display_name: impl Into<String>) -> Asset {
        let role = kind.canonical_role().expect("built-in kind");
        let environment = kind.canonical_environment().expect("built-in kind");
        Asset {
            id: id.into(),
            kind,
            role,
            environment,
            display_name: display_name.into(),
            attributes: IndexMap::new(),
            endpoints: Vec::new(),
        }
    }

    /// Custom-kind asset; role and environment must be given explicitly.
    pub fn custom(
        name: impl Into<String>,
        id: impl Into<String>,
        display_name: impl Into<String>,
        role: Role,
        environment: Environment,
    ) -> Asset {
        Asset {
            id: id.into(),
            kind: AssetKind::Custom(name.into()),
            role,
            environment,
            display_name: display_name.into(),
            attributes: IndexMap::new(),
            endpoints: Vec::new(),
        }
    }

    pub fn with_attr(mut self, key: impl Into<String>, value: impl Into<String>) -> Asset {
        self.attributes.insert(key.into(), value.into());
        self
    }

    pub fn with_endpoints<I, S>(mut self, endpoints: I) -> Asset
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.endpoints = endpoints.into_iter().map(Into::into).collect();
        self
    }
}

/// Validated collection of assets. Declaration order is preserved and drives
/// all downstream output ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemModel {
    pub name: String,
    pub assets: Vec<Asset>,
}

impl SystemModel {
    pub fn asset(&self, id: &str) -> Option<&Asset> {
        self.assets.iter().find(|a| a.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("duplicate asset id {id:?}")]
    DuplicateId { id: String },
    #[error("channel {channel:?} references unknown asset {endpoint:?}")]
    DanglingEndpoint { channel: String, endpoint: String },
    #[error("asset {id:?}: kind {kind} is canonically a {canonical}, declared as {declared}")]
    RoleMismatch {
        id: String,
        kind: String,
        canonical: Role,
        declared: Role,
    },
    #[error("asset {id:?}: kind {kind} canonically lives in the {canonical} environment, declared {declared}")]
    EnvironmentMismatch {
        id: String,
        kind: String,
        canonical: Environment,
        declared: Environment,
    },
    #[error("element {id:?} declares endpoints; only channels connect")]
    EndpointOnElement { id: String },
    #[error("channel {channel:?} endpoint {endpoint:?} is not an element")]
    EndpointNotElement { channel: String, endpoint: String },
    #[error("asset {id:?}: invalid custom kind name {name:?}")]
    InvalidCustomKind { id: String, name: String },
    #[error("asset {id:?}: empty system name or display name")]
    EmptyName { id: String },
}

fn check_asset_shape(asset: &Asset) -> Result<(), BuildError> {
    if asset.display_name.is_empty() || asset.id.is_empty() {
        return Err(BuildError::EmptyName {
            id: asset.id.clone(),
        });
    }
    if let AssetKind::Custom(name) = &asset.kind {
        if !is_valid_custom_name(name) {
            return Err(BuildError::InvalidCustomKind {
                id: asset.id.clone(),
                name: name.clone(),
            });
        }
    }
    if let Some(canonical) = asset.kind.canonical_role() {
        if canonical != asset.role {
            return Err(BuildError::RoleMismatch {
                id: asset.id.clone(),
                kind: asset.kind.token(),
                canonical,
                declared: asset.role,
            });
        }
    }
    if let Some(canonical) = asset.kind.canonical_environment() {
        if canonical != asset.environment {
            return Err(BuildError::EnvironmentMismatch {
                id: asset.id.clone(),
                kind: asset.kind.token(),
                canonical,
                declared: asset.environment,
            });
        }
    }
    if asset.role == Role::Element && !asset.endpoints.is_empty() {
        return Err(BuildError::EndpointOnElement {
            id: asset.id.clone(),
        });
    }
    Ok(())
}

/// Assemble and validate a system. Declaration order is preserved exactly;
/// the first violated invariant is reported.
pub fn build_system(name: impl Into<String>, assets: Vec<Asset>) -> Result<SystemModel, BuildError> {
    let system = SystemModel {
        name: name.into(),
        assets,
    };
    let mut seen = std::collections::HashSet::new();
    for asset in &system.assets {
        check_asset_shape(asset)?;
        if !seen.insert(asset.id.as_str()) {
            return Err(BuildError::DuplicateId {
                id: asset.id.clone(),
            });
        }
    }
    for asset in &system.assets {
        for endpoint in &asset.endpoints {
            match system.asset(endpoint) {
                None => {
                    return Err(BuildError::DanglingEndpoint {
                        channel: asset.id.clone(),
                        endpoint: endpoint.clone(),
                    })
                }
                Some(target) if target.role != Role::Element => {
                    return Err(BuildError::EndpointNotElement {
                        channel: asset.id.clone(),
                        endpoint: endpoint.clone(),
                    })
                }
                Some(_) => {}
            }
        }
    }
    Ok(system)
}

/// The fixed seven-asset system used throughout the default catalog's tables:
/// five elements (office, building, software, operating system, local
/// network) and two physical channels (corridor, territory).
pub fn canonical_paper_system() -> SystemModel {
    build_system(
        "Paper information system",
        vec![
            Asset::builtin(AssetKind::Office, "office", "Office")
                .with_attr("location", "confidential records room"),
            Asset::builtin(AssetKind::Building, "building", "Building"),
            Asset::builtin(AssetKind::Corridor, "corridor", "Corridor")
                .with_endpoints(["building", "office"]),
            Asset::builtin(AssetKind::Territory, "territory", "Territory")
                .with_endpoints(["building"]),
            Asset::builtin(AssetKind::Software, "software", "Software"),
            Asset::builtin(AssetKind::OperatingSystem, "os", "Operating system"),
            Asset::builtin(AssetKind::LocalNetwork, "lan", "Local network"),
        ],
    )
    .expect("canonical system is valid by construction")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub severity: Severity,
    pub asset_id: Option<String>,
    pub message: String,
}

/// Validation outcome. A system is valid iff it has no error-severity issues;
/// warnings (such as an element without attributes) do not invalidate it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues
            .iter()
            .filter(|i| i.severity == Severity::Error)
    }

    pub fn is_valid(&self) -> bool {
        self.errors().count() == 0
    }
}

/// Re-check every invariant of an already-constructed system and report all
/// violations. Never mutates the input.
pub fn validate(system: &SystemModel) -> ValidationReport {
    let mut issues = Vec::new();
    let error = |asset_id: Option<&str>, message: String| Issue {
        severity: Severity::Error,
        asset_id: asset_id.map(str::to_string),
        message,
    };

    if system.name.is_empty() {
        issues.push(error(None, "system name is empty".to_string()));
    }

    let mut seen = std::collections::HashSet::new();
    for asset in &system.assets {
        if let Err(e) = check_asset_shape(asset) {
            issues.push(error(Some(&asset.id), e.to_string()));
        }
        if !seen.insert(asset.id.as_str()) {
            issues.push(error(
                Some(&asset.id),
                format!("duplicate asset id {:?}", asset.id),
            ));
        }
    }
    for asset in &system.assets {
        for endpoint in &asset.endpoints {
            match system.asset(endpoint) {
                None => issues.push(error(
                    Some(&asset.id),
                    format!(
                        "channel {:?} references unknown asset {:?}",
                        asset.id, endpoint
                    ),
                )),
                Some(target) if target.role != Role::Element => issues.push(error(
                    Some(&asset.id),
                    format!(
                        "channel {:?} endpoint {:?} is not an element",
                        asset.id, endpoint
                    ),
                )),
                Some(_) => {}
            }
        }
        if asset.role == Role::Element && asset.attributes.is_empty() {
            issues.push(Issue {
                severity: Severity::Warning,
                asset_id: Some(asset.id.clone()),
                message: format!("element {:?} has no attributes", asset.id),
            });
        }
    }
    ValidationReport { issues }
}
