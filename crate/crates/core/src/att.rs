//! Typed attribute schemas ([`AttDef`]) and their rendered values ([`AttValue`]),
//! attached to touchables, trajectories and hits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttKind {
    Text,
    Int,
    Double,
    Vector,
    Bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttDef {
    pub key: String,
    pub description: String,
    pub kind: AttKind,
    /// Values carry a unit chosen by best-unit formatting.
    pub dimensioned: bool,
}

impl AttDef {
    pub fn new(key: &str, description: &str, kind: AttKind, dimensioned: bool) -> Self {
        Self { key: key.into(), description: description.into(), kind, dimensioned }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttValue {
    pub key: String,
    pub value: String,
}

impl AttValue {
    pub fn new(key: impl Into<String>, value: impl Into<String>) -> Self {
        Self { key: key.into(), value: value.into() }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AttError {
    #[error("attribute \"{key}\" has no definition in set \"{set}\"")]
    UnknownKey { set: String, key: String },
    #[error("attribute \"{key}\" is defined more than once in set \"{set}\"")]
    DuplicateDef { set: String, key: String },
}

/// Named collection of attribute definitions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttDefSet {
    pub name: String,
    pub defs: Vec<AttDef>,
}

impl AttDefSet {
    pub fn new(name: &str, defs: Vec<AttDef>) -> Self {
        Self { name: name.into(), defs }
    }

    pub fn get(&self, key: &str) -> Option<&AttDef> {
        self.defs.iter().find(|d| d.key == key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.defs.iter().map(|d| d.key.as_str())
    }

    /// Checks that the set defines each key exactly once and that every value resolves.
    pub fn validate(&self, values: &[AttValue]) -> Result<(), AttError> {
        for (i, d) in self.defs.iter().enumerate() {
            if self.defs[..i].iter().any(|e| e.key == d.key) {
                return Err(AttError::DuplicateDef { set: self.name.clone(), key: d.key.clone() });
            }
        }
        match values.iter().find(|v| self.get(&v.key).is_none()) {
            Some(v) => Err(AttError::UnknownKey { set: self.name.clone(), key: v.key.clone() }),
            None => Ok(()),
        }
    }
}

/// Looks up a value by key.
pub fn find<'a>(values: &'a [AttValue], key: &str) -> Option<&'a str> {
    values.iter().find(|v| v.key == key).map(|v| v.value.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let set = AttDefSet::new("s", vec![AttDef::new("A", "a", AttKind::Int, false)]);
        assert!(set.validate(&[AttValue::new("A", "1")]).is_ok());
        assert!(matches!(set.validate(&[AttValue::new("B", "1")]), Err(AttError::UnknownKey { .. })));
        let dup = AttDefSet::new("d", vec![set.defs[0].clone(), set.defs[0].clone()]);
        assert!(matches!(dup.validate(&[]), Err(AttError::DuplicateDef { .. })));
    }
}
