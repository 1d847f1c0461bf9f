//! Task files: a versioned JSON list of classifier and certificate jobs.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use resip_core::braid::{artin_endo, BraidWord};
use resip_core::extension::Cocycle2;
use resip_core::freegrp::{FreeEndo, MappingTorusSpec};
use resip_core::IntMatrix;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::caps::CapOverrides;

pub const SCHEMA_VERSION: u64 = 1;
pub const TASK_KINDS: [&str; 8] = [
    "torus",
    "primes",
    "fibered",
    "bs",
    "braid-cover",
    "witness",
    "extension",
    "sl2-power",
];
pub const SCHEMA_JSON: &str = include_str!("../schema/tasks.schema.json");

/// An exact integer; JSON numbers and decimal strings are both accepted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Int(pub BigInt);

impl Int {
    pub fn value(&self) -> &BigInt {
        &self.0
    }
}

impl From<i64> for Int {
    fn from(x: i64) -> Self {
        Int(BigInt::from(x))
    }
}

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(x) => s.serialize_i64(x),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct IntVisitor;
        impl Visitor<'_> for IntVisitor {
            type Value = Int;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
                v.trim()
                    .parse::<BigInt>()
                    .map(Int)
                    .map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
            }
        }
        d.deserialize_any(IntVisitor)
    }
}

pub fn to_matrix(rows: &[Vec<Int>]) -> Result<IntMatrix, String> {
    IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect())
        .map_err(|e| e.to_string())
}

pub fn from_matrix(m: &IntMatrix) -> Vec<Vec<Int>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(Int).collect()).collect()
}

/// Monodromy of a mapping torus: explicit generator images with a certified
/// inverse, or an Artin braid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monodromy {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub braid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strands: Option<usize>,
}

impl Monodromy {
    pub fn braid_word(&self) -> Result<Option<BraidWord>, String> {
        match (&self.braid, self.strands) {
            (Some(b), Some(n)) => BraidWord::parse(n, b).map(Some).map_err(|e| e.to_string()),
            (Some(_), None) => Err("`braid` needs `strands`".into()),
            (None, _) => Ok(None),
        }
    }

    pub fn endo(&self) -> Result<FreeEndo, String> {
        match (&self.images, self.braid_word()?) {
            (Some(_), Some(_)) => Err("give either `images` or `braid`, not both".into()),
            (None, Some(b)) => Ok(artin_endo(&b)),
            (Some(images), None) => {
                let inverse = self
                    .inverse
                    .as_ref()
                    .ok_or("`images` needs a certified `inverse`")?;
                let imgs: Vec<&str> = images.iter().map(String::as_str).collect();
                let inv: Vec<&str> = inverse.iter().map(String::as_str).collect();
                FreeEndo::parse(imgs.len(), &imgs, Some(&inv)).map_err(|e| e.to_string())
            }
            (None, None) => Err("monodromy needs `images` or `braid`".into()),
        }
    }

    pub fn spec(&self) -> Result<MappingTorusSpec, String> {
        let desc = match &self.braid {
            Some(b) => b.clone(),
            None => self.images.clone().unwrap_or_default().join(", "),
        };
        MappingTorusSpec::new(self.endo()?, desc).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionCheck {
    Heisenberg,
    CircleBundle,
    Cocycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerCheck {
    pub k: u64,
    #[serde(default)]
    pub factors: Vec<Vec<Int>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusTask {
    pub matrix: Vec<Vec<Int>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes_up_to: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimesTask {
    pub matrix: Vec<Vec<Int>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberedTask {
    pub monodromy: Monodromy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes_up_to: Option<u64>,
    /// Also test unipotence over `Z` on Lie layers `1..=layers`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BsTask {
    pub q: Int,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BraidCoverTask {
    pub strands: usize,
    pub braid: String,
    pub modulus: u64,
    pub assignments: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<Vec<Int>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub powers: Vec<PowerCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessTask {
    pub monodromy: Monodromy,
    pub elements: Vec<String>,
    pub p: u64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exploratory: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionTask {
    pub check: ExtensionCheck,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<Cocycle2>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sl2PowerTask {
    pub matrix: Vec<Vec<Int>>,
    pub primes: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TaskKind {
    Torus(TorusTask),
    Primes(PrimesTask),
    Fibered(FiberedTask),
    Bs(BsTask),
    BraidCover(BraidCoverTask),
    Witness(WitnessTask),
    Extension(ExtensionTask),
    Sl2Power(Sl2PowerTask),
}

impl TaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::Torus(_) => "torus",
            TaskKind::Primes(_) => "primes",
            TaskKind::Fibered(_) => "fibered",
            TaskKind::Bs(_) => "bs",
            TaskKind::BraidCover(_) => "braid-cover",
            TaskKind::Witness(_) => "witness",
            TaskKind::Extension(_) => "extension",
            TaskKind::Sl2Power(_) => "sl2-power",
        }
    }

    /// Checks that serde cannot express.
    fn validate(&self) -> Result<(), (String, String)> {
        let field = |f: &str, m: String| Err((f.to_string(), m));
        match self {
            TaskKind::Torus(TorusTask { primes: Some(_), primes_up_to: Some(_), .. })
            | TaskKind::Fibered(FiberedTask { primes: Some(_), primes_up_to: Some(_), .. }) => {
                field("primes", "give `primes` or `primes_up_to`, not both".into())
            }
            TaskKind::Witness(WitnessTask { monodromy, elements, .. }) => {
                if elements.is_empty() {
                    return field("elements", "at least one element is required".into());
                }
                monodromy.endo().map(drop).or_else(|m| field("monodromy", m))
            }
            TaskKind::Fibered(FiberedTask { monodromy, .. }) => monodromy.endo().map(drop).or_else(|m| field("monodromy", m)),
            TaskKind::Extension(ExtensionTask { check: ExtensionCheck::CircleBundle, genus, euler, .. })
                if genus.is_none() || euler.is_none() =>
            {
                field("genus", "circle_bundle needs `genus` and `euler`".into())
            }
            TaskKind::Extension(ExtensionTask { check: ExtensionCheck::Cocycle, cocycle: None, .. }) => {
                field("cocycle", "cocycle check needs `cocycle`".into())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub id: Option<String>,
    pub caps: Option<CapOverrides>,
    pub kind: TaskKind,
}

impl Task {
    pub fn new(kind: TaskKind) -> Self {
        Self { id: None, caps: None, kind }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskFile {
    pub version: u64,
    pub caps: Option<CapOverrides>,
    pub tasks: Vec<Task>,
}

impl TaskFile {
    pub fn single(kind: TaskKind) -> Self {
        Self {
            version: SCHEMA_VERSION,
            caps: None,
            tasks: vec![Task::new(kind)],
        }
    }

    pub fn to_value(&self) -> Value {
        let mut top = Map::new();
        top.insert("version".into(), self.version.into());
        if let Some(c) = &self.caps {
            top.insert("caps".into(), serde_json::to_value(c).expect("caps serialize"));
        }
        let tasks = self
            .tasks
            .iter()
            .map(|t| {
                let Value::Object(mut m) = serde_json::to_value(&t.kind).expect("task serializes") else {
                    unreachable!("tasks serialize to objects")
                };
                if let Some(id) = &t.id {
                    m.insert("id".into(), id.clone().into());
                }
                if let Some(c) = &t.caps {
                    m.insert("caps".into(), serde_json::to_value(c).expect("caps serialize"));
                }
                Value::Object(m)
            })
            .collect();
        top.insert("tasks".into(), Value::Array(tasks));
        Value::Object(top)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("value serializes")
    }
}

/// A task file problem, located by a JSON path such as `tasks[0].matrix`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "schema error at {}: {}", self.path, self.message)
    }
}

impl std::error::Error for SchemaError {}

fn schema_err(path: impl Into<String>, message: impl Into<String>) -> SchemaError {
    SchemaError {
        path: path.into(),
        message: message.into(),
    }
}

fn join_path(prefix: &str, inner: &str) -> String {
    if inner.is_empty() || inner == "." {
        prefix.to_string()
    } else if inner.starts_with('[') {
        format!("{prefix}{inner}")
    } else {
        format!("{prefix}.{inner}")
    }
}

fn typed<T: serde::de::DeserializeOwned>(v: Value, prefix: &str) -> Result<T, SchemaError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let inner = e.path().to_string();
        schema_err(join_path(prefix, &inner), e.into_inner().to_string())
    })
}

pub fn parse_task_file(text: &str) -> Result<TaskFile, SchemaError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| schema_err(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let Value::Object(mut top) = root else {
        return Err(schema_err("$", "expected an object with `version` and `tasks`"));
    };
    let version = top
        .remove("version")
        .ok_or_else(|| schema_err("version", "missing field `version`"))?;
    let version = version
        .as_u64()
        .ok_or_else(|| schema_err("version", "expected an integer"))?;
    if version != SCHEMA_VERSION {
        return Err(schema_err("version", format!("unsupported version {version}, expected {SCHEMA_VERSION}")));
    }
    let caps = top.remove("caps").map(|c| typed(c, "caps")).transpose()?;
    let tasks = top
        .remove("tasks")
        .ok_or_else(|| schema_err("tasks", "missing field `tasks`"))?;
    if let Some(extra) = top.keys().next() {
        return Err(schema_err(extra.as_str(), format!("unknown field `{extra}`")));
    }
    let Value::Array(tasks) = tasks else {
        return Err(schema_err("tasks", "expected an array"));
    };
    let tasks = tasks
        .into_iter()
        .enumerate()
        .map(|(i, t)| parse_task(t, &format!("tasks[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TaskFile { version, caps, tasks })
}

fn parse_task(v: Value, path: &str) -> Result<Task, SchemaError> {
    let Value::Object(mut m) = v else {
        return Err(schema_err(path, "expected an object"));
    };
    let id = match m.remove("id") {
        None => None,
        Some(Value::String(s)) => Some(s),
        Some(_) => return Err(schema_err(format!("{path}.id"), "expected a string")),
    };
    let caps = m
        .remove("caps")
        .map(|c| typed(c, &format!("{path}.caps")))
        .transpose()?;
    let kind = match m.remove("kind") {
        None => return Err(schema_err(format!("{path}.kind"), "missing field `kind`")),
        Some(Value::String(k)) => k,
        Some(_) => return Err(schema_err(format!("{path}.kind"), "expected a string")),
    };
    let body = Value::Object(m);
    let kind = match kind.as_str() {
        "torus" => TaskKind::Torus(typed(body, path)?),
        "primes" => TaskKind::Primes(typed(body, path)?),
        "fibered" => TaskKind::Fibered(typed(body, path)?),
        "bs" => TaskKind::Bs(typed(body, path)?),
        "braid-cover" => TaskKind::BraidCover(typed(body, path)?),
        "witness" => TaskKind::Witness(typed(body, path)?),
        "extension" => TaskKind::Extension(typed(body, path)?),
        "sl2-power" => TaskKind::Sl2Power(typed(body, path)?),
        other => {
            return Err(schema_err(
                format!("{path}.kind"),
                format!("unknown task kind `{other}`; expected one of {}", TASK_KINDS.join(", ")),
            ))
        }
    };
    kind.validate()
        .map_err(|(field, msg)| schema_err(format!("{path}.{field}"), msg))?;
    Ok(Task { id, caps, kind })
}
