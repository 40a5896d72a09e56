use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cluster::Provenance;
use crate::relations::CitationType;
use crate::{PaperId, TypeId};

/// Who made an edit: the pipeline or a named curator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Actor {
    Machine,
    User(String),
}

impl Actor {
    pub fn user(name: impl Into<String>) -> Self {
        Self::User(name.into())
    }

    pub fn provenance(&self) -> Provenance {
        match self {
            Self::Machine => Provenance::Machine,
            Self::User(_) => Provenance::Human,
        }
    }
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Machine => f.write_str("machine"),
            Self::User(name) => write!(f, "user:{name}"),
        }
    }
}

impl FromStr for Actor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "machine" => Ok(Self::Machine),
            _ => match s.strip_prefix("user:") {
                Some(name) if !name.trim().is_empty() => Ok(Self::User(name.to_owned())),
                _ => Err(format!("actor must be 'machine' or 'user:<name>', got '{s}'")),
            },
        }
    }
}

impl Serialize for Actor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Actor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    SetType {
        paper_id: PaperId,
        type_id: TypeId,
        confidence: f64,
        /// A machine proposal that lost to a human label; recorded, not applied.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        suppressed: bool,
    },
    SetCitationType {
        from_paper_id: PaperId,
        to_paper_id: PaperId,
        citation_type: CitationType,
        rule_id: String,
    },
    CreateType {
        type_id: TypeId,
        description: String,
    },
    Revert {
        target: u64,
    },
}

/// An edit as submitted, before the store assigns it a revision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditRequest {
    pub actor: Actor,
    pub expected_revision: u64,
    #[serde(flatten)]
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditEvent {
    pub revision: u64,
    /// Milliseconds since the Unix epoch; informational only.
    pub timestamp_ms: u64,
    pub actor: Actor,
    pub expected_revision: u64,
    #[serde(flatten)]
    pub action: Action,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actor_strings() {
        assert_eq!("machine".parse::<Actor>().unwrap(), Actor::Machine);
        assert_eq!("user:ana".parse::<Actor>().unwrap(), Actor::user("ana"));
        assert!("user:".parse::<Actor>().is_err());
        assert!("admin".parse::<Actor>().is_err());
        assert_eq!(Actor::user("ana").to_string(), "user:ana");
    }

    #[test]
    fn event_json_shape() {
        let e = EditEvent {
            revision: 3,
            timestamp_ms: 0,
            actor: Actor::user("ana"),
            expected_revision: 2,
            action: Action::SetType { paper_id: "p".into(), type_id: "T".into(), confidence: 1.0, suppressed: false },
        };
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(
            json,
            r#"{"revision":3,"timestamp_ms":0,"actor":"user:ana","expected_revision":2,"action":"set_type","paper_id":"p","type_id":"T","confidence":1.0}"#
        );
        assert_eq!(serde_json::from_str::<EditEvent>(&json).unwrap(), e);
    }
}
