//! Closed threat typologies for the two supported security properties.
//!
//! Confidentiality has three types (C1..C3), integrity has four (I1..I4).
//! The short codes are the wire form used in catalog files, CSV and JSON.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SecurityProperty {
    Confidentiality,
    Integrity,
}

impl SecurityProperty {
    pub const ALL: [SecurityProperty; 2] =
        [SecurityProperty::Confidentiality, SecurityProperty::Integrity];

    pub fn as_str(self) -> &'static str {
        match self {
            SecurityProperty::Confidentiality => "confidentiality",
            SecurityProperty::Integrity => "integrity",
        }
    }

    fn code_letter(self) -> char {
        match self {
            SecurityProperty::Confidentiality => 'C',
            SecurityProperty::Integrity => 'I',
        }
    }

    fn max_ordinal(self) -> u8 {
        match self {
            SecurityProperty::Confidentiality => 3,
            SecurityProperty::Integrity => 4,
        }
    }
}

impl fmt::Display for SecurityProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One cell of the typology: a security property plus a per-property ordinal.
///
/// Ordinals are per-property, so confidentiality type 1 and integrity type 1
/// are distinct cells. Reports render the qualified codes "C1".."I4".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThreatType {
    pub property: SecurityProperty,
    pub ordinal: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("unknown ordinal {ordinal} for {property}")]
    UnknownOrdinal {
        property: SecurityProperty,
        ordinal: u8,
    },
    #[error("unknown type code {0:?}")]
    UnknownCode(String),
}

impl ThreatType {
    pub fn new(property: SecurityProperty, ordinal: u8) -> Result<ThreatType, TaxonomyError> {
        if ordinal < 1 || ordinal > property.max_ordinal() {
            return Err(TaxonomyError::UnknownOrdinal { property, ordinal });
        }
        Ok(ThreatType { property, ordinal })
    }

    /// Canonical English label for the cell.
    pub fn label(self) -> &'static str {
        match (self.property, self.ordinal) {
            (SecurityProperty::Confidentiality, 1) => "disclosure of location information",
            (SecurityProperty::Confidentiality, 2) => {
                "disclosure of information about protection mechanisms"
            }
            (SecurityProperty::Confidentiality, 3) => "disclosure of information about attributes",
            (SecurityProperty::Integrity, 1) => "disable or delete",
            (SecurityProperty::Integrity, 2) => "addition",
            (SecurityProperty::Integrity, 3) => "substitution",
            (SecurityProperty::Integrity, 4) => "change of attributes",
            _ => unreachable!("ThreatType::new rejects out-of-range ordinals"),
        }
    }

    /// Qualified code "C1".."C3", "I1".."I4".
    pub fn code(self) -> String {
        format!("{}{}", self.property.code_letter(), self.ordinal)
    }

    pub fn parse_code(code: &str) -> Result<ThreatType, TaxonomyError> {
        let mut chars = code.chars();
        let (letter, digit) = match (chars.next(), chars.next(), chars.next()) {
            (Some(l), Some(d), None) => (l, d),
            _ => return Err(TaxonomyError::UnknownCode(code.to_string())),
        };
        let property = match letter {
            'C' => SecurityProperty::Confidentiality,
            'I' => SecurityProperty::Integrity,
            _ => return Err(TaxonomyError::UnknownCode(code.to_string())),
        };
        let ordinal = digit
            .to_digit(10)
            .ok_or_else(|| TaxonomyError::UnknownCode(code.to_string()))? as u8;
        ThreatType::new(property, ordinal)
            .map_err(|_| TaxonomyError::UnknownCode(code.to_string()))
    }
}

impl fmt::Display for ThreatType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

/// All cells of a property's typology, in ordinal order.
pub fn threat_types(property: SecurityProperty) -> Vec<ThreatType> {
    (1..=property.max_ordinal())
        .map(|ordinal| ThreatType { property, ordinal })
        .collect()
}

/// Every cell across both properties, confidentiality first. Seven in total.
pub fn all_threat_types() -> Vec<ThreatType> {
    SecurityProperty::ALL
        .into_iter()
        .flat_map(threat_types)
        .collect()
}

/// Label lookup by property and ordinal.
pub fn type_label(property: SecurityProperty, ordinal: u8) -> Result<&'static str, TaxonomyError> {
    ThreatType::new(property, ordinal).map(ThreatType::label)
}
