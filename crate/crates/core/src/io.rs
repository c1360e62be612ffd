//! JSON encodings of frames, models, witnesses and verdicts.
//!
//! World names are strings in files and dense ids in memory. A file's names
//! are kept alongside the parsed structure so output can use them again.
//!
//! ```text
//! {"worlds":["w","u"], "relation":[["w","u"]], "valuation":{"p":["u"]}}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::consequence::{Outcome, Verdict, Witness};
use crate::domain::DomainModel;
use crate::frameprops::{has_global_property, in_class, FrameClass, GlobalProperty};
use crate::kripke::{Frame, Model, ModelError, Relation, Valuation, World, WorldSet, MAX_WORLDS};
use crate::update::UpdateModel;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("world {0:?} is listed twice")]
    DuplicateWorld(String),
    #[error("unknown world {0:?}")]
    UnknownWorld(String),
    #[error("a model has at most {MAX_WORLDS} worlds, got {0}")]
    TooManyWorlds(usize),
    #[error("a frame file must contain at least one frame")]
    NoFrames,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    worlds: Vec<String>,
    #[serde(default)]
    relation: Vec<(String, String)>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FramesFile {
    Wrapped { frames: Vec<ModelFile> },
    Many(Vec<ModelFile>),
    One(ModelFile),
}

/// Dense id to name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldNames(Vec<String>);

impl WorldNames {
    /// `"0"`, `"1"`, ..
    pub fn numeric(n: usize) -> WorldNames {
        WorldNames((0..n).map(|i| i.to_string()).collect())
    }

    pub fn name(&self, w: World) -> String {
        self.0.get(w).cloned().unwrap_or_else(|| w.to_string())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn id(&self, name: &str) -> Result<World, IoError> {
        self.0
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| IoError::UnknownWorld(name.to_string()))
    }

    fn set(&self, names: &[String]) -> Result<WorldSet, IoError> {
        names.iter().map(|n| self.id(n)).collect()
    }

    fn names_of(&self, ws: WorldSet) -> Vec<String> {
        ws.iter().map(|w| self.name(w)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedModel {
    pub model: Model,
    pub names: WorldNames,
}

fn decode(file: ModelFile) -> Result<NamedModel, IoError> {
    if file.worlds.len() > MAX_WORLDS {
        return Err(IoError::TooManyWorlds(file.worlds.len()));
    }
    for (i, w) in file.worlds.iter().enumerate() {
        if file.worlds[..i].contains(w) {
            return Err(IoError::DuplicateWorld(w.clone()));
        }
    }
    let names = WorldNames(file.worlds);
    let pairs = file
        .relation
        .iter()
        .map(|(a, b)| Ok((names.id(a)?, names.id(b)?)))
        .collect::<Result<Vec<_>, IoError>>()?;
    let frame = Frame::new(names.len(), pairs)?;
    let valuation = file
        .valuation
        .iter()
        .map(|(p, ws)| Ok((p.clone(), names.set(ws)?)))
        .collect::<Result<Valuation, IoError>>()?;
    Ok(NamedModel {
        model: Model::new(frame, valuation)?,
        names,
    })
}

pub fn parse_model(text: &str) -> Result<NamedModel, IoError> {
    decode(serde_json::from_str(text)?)
}

/// A frame file: one object, an array of objects, or `{"frames": [...]}`.
/// Valuations, if present, are ignored.
pub fn parse_frames(text: &str) -> Result<Vec<(Frame, WorldNames)>, IoError> {
    let files = match serde_json::from_str(text)? {
        FramesFile::Wrapped { frames } | FramesFile::Many(frames) => frames,
        FramesFile::One(f) => vec![f],
    };
    if files.is_empty() {
        return Err(IoError::NoFrames);
    }
    files
        .into_iter()
        .map(|f| decode(f).map(|m| (*m.model.frame(), m.names)))
        .collect()
}

fn relation_json(r: &Relation, names: &WorldNames) -> Value {
    Value::Array(
        r.pairs()
            .map(|(a, b)| json!([names.name(a), names.name(b)]))
            .collect(),
    )
}

fn valuation_json(v: &Valuation, names: &WorldNames) -> Value {
    let mut out = Map::new();
    for (p, ws) in v {
        out.insert(p.clone(), json!(names.names_of(*ws)));
    }
    Value::Object(out)
}

pub fn frame_to_json(fr: &Frame, names: &WorldNames) -> Value {
    json!({
        "worlds": names.names_of(fr.worlds()),
        "relation": relation_json(fr.relation(), names),
    })
}

pub fn model_to_json(m: &Model, names: &WorldNames) -> Value {
    json!({
        "worlds": names.names_of(m.worlds()),
        "relation": relation_json(m.frame().relation(), names),
        "valuation": valuation_json(m.valuation(), names),
    })
}

pub fn domain_model_to_json(d: &DomainModel, names: &WorldNames) -> Value {
    json!({
        "worlds": names.names_of(d.worlds()),
        "valuation": valuation_json(d.valuation(), names),
    })
}

pub fn update_model_to_json(u: &UpdateModel, names: &WorldNames) -> Value {
    json!({
        "worlds": names.names_of(u.worlds()),
        "valuation": valuation_json(u.valuation(), names),
    })
}

/// The witness object: the model's fields plus `"world"` or `"state"`.
pub fn witness_to_json(w: &Witness, names: &WorldNames) -> Value {
    let (mut obj, extra) = match w {
        Witness::Relational { model, world } => (
            model_to_json(model, names),
            world.map(|x| ("world", json!(names.name(x)))),
        ),
        Witness::Informational { model, state } => (
            domain_model_to_json(model, names),
            Some(("state", json!(names.names_of(*state)))),
        ),
        Witness::Update { model, state } => (
            update_model_to_json(model, names),
            Some(("state", json!(names.names_of(*state)))),
        ),
    };
    if let (Value::Object(map), Some((k, v))) = (&mut obj, extra) {
        map.insert(k.to_string(), v);
    }
    obj
}

pub fn verdict_to_json(v: &Verdict, names: &WorldNames, with_stats: bool) -> Value {
    let mut out = Map::new();
    let outcome = match v.outcome {
        Outcome::Holds => "holds",
        Outcome::Refuted => "refuted",
    };
    out.insert("outcome".into(), json!(outcome));
    if let Some(w) = &v.witness {
        out.insert("witness".into(), witness_to_json(w, names));
    }
    if with_stats {
        out.insert(
            "stats".into(),
            json!({
                "frames": v.stats.frames,
                "models": v.stats.models,
                "elapsed_ms": v.stats.elapsed_ms,
            }),
        );
    }
    Value::Object(out)
}

/// Named-class memberships and the eight global properties of a frame.
pub fn classification_json(fr: &Frame) -> Value {
    let mut classes = Map::new();
    for c in FrameClass::NAMED.iter() {
        classes.insert(c.name().to_string(), json!(in_class(fr, c)));
    }
    let mut props = Map::new();
    for p in GlobalProperty::NAMED {
        props.insert(p.name(), json!(has_global_property(fr, p)));
    }
    json!({ "classes": classes, "global_properties": props })
}
