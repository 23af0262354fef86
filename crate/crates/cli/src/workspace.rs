//! Corpus registry: named functions, operators, relations and points.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use relforge_core::field::{NfElem, NumberField};
use relforge_core::formats::{
    function_from_json_with, operator_from_json, parse_element, point_from_json, relation_from_json, FunctionJson,
    LoadedFunction, OperatorJson, PointJson, RelationJson,
};
use relforge_core::ore::{Operator, PowerSeries};
use relforge_core::relations::RelationPoly;
use relforge_core::{Error, Result};

pub const SECTIONS: [&str; 4] = ["functions", "operators", "relations", "points"];

/// Default bounds used when a command does not override them.
#[derive(Clone, Debug)]
pub struct Profile {
    pub max_order: usize,
    pub max_degree: usize,
    pub truncation: usize,
}

impl Default for Profile {
    fn default() -> Self {
        Profile { max_order: 4, max_degree: 8, truncation: 512 }
    }
}

#[derive(Clone, Debug)]
pub struct Point {
    pub name: String,
    pub field: Option<Arc<NumberField>>,
    pub value: NfElem,
}

pub struct Workspace {
    pub dir: PathBuf,
    pub profile: Profile,
    functions: RefCell<BTreeMap<String, LoadedFunction>>,
    loading: RefCell<Vec<String>>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

impl Workspace {
    pub fn new(dir: PathBuf) -> Self {
        Workspace { dir, profile: Profile::default(), functions: RefCell::new(BTreeMap::new()), loading: RefCell::new(Vec::new()) }
    }

    /// Directory from `RELFORGE_CORPUS`, else `./corpus`.
    pub fn from_env() -> Self {
        let dir = std::env::var_os("RELFORGE_CORPUS").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("corpus"));
        Workspace::new(dir)
    }

    /// Path given directly, or `<dir>/<section>/<name>.json`.
    fn locate(&self, section: &str, name: &str) -> Result<PathBuf> {
        let direct = PathBuf::from(name);
        if name.ends_with(".json") && direct.is_file() {
            return Ok(direct);
        }
        let p = self.dir.join(section).join(format!("{name}.json"));
        if p.is_file() {
            return Ok(p);
        }
        Err(Error::UnknownCorpusEntry(format!("{section}/{name}")))
    }

    pub fn names(&self, section: &str) -> Vec<String> {
        let mut out: Vec<String> = fs::read_dir(self.dir.join(section))
            .map(|rd| {
                rd.filter_map(|e| e.ok())
                    .filter_map(|e| e.file_name().to_str().and_then(|s| s.strip_suffix(".json")).map(str::to_string))
                    .collect()
            })
            .unwrap_or_default();
        out.sort();
        out
    }

    pub fn function_json(&self, name: &str) -> Result<FunctionJson> {
        read_json(&self.locate("functions", name)?)
    }

    pub fn function(&self, name: &str) -> Result<LoadedFunction> {
        if let Some(f) = self.functions.borrow().get(name) {
            return Ok(f.clone());
        }
        if self.loading.borrow().iter().any(|n| n == name) {
            return Err(Error::InvalidInput(format!("cyclic definition through `{name}`")));
        }
        let j = self.function_json(name)?;
        self.loading.borrow_mut().push(name.to_string());
        let f = function_from_json_with(&j, &|n| self.function(n));
        self.loading.borrow_mut().pop();
        let f = f?;
        self.functions.borrow_mut().insert(name.to_string(), f.clone());
        Ok(f)
    }

    pub fn series_of(&self, names: &[String]) -> Result<Vec<PowerSeries>> {
        names.iter().map(|n| self.function(n).map(|f| f.series().clone())).collect()
    }

    pub fn operator(&self, name: &str) -> Result<Operator> {
        let j: OperatorJson = read_json(&self.locate("operators", name)?)?;
        operator_from_json(&j, None)
    }

    pub fn relation_json(&self, name: &str) -> Result<RelationJson> {
        read_json(&self.locate("relations", name)?)
    }

    pub fn relation(&self, name: &str) -> Result<RelationPoly> {
        relation_from_json(&self.relation_json(name)?)
    }

    /// Corpus point, or a rational given inline.
    pub fn point(&self, name: &str) -> Result<Point> {
        match self.locate("points", name) {
            Ok(path) => {
                let j: PointJson = read_json(&path)?;
                let (field, value) = point_from_json(&j)?;
                Ok(Point { name: j.name, field, value })
            }
            Err(Error::UnknownCorpusEntry(e)) => match parse_element(name, None) {
                Ok(value) => Ok(Point { name: name.to_string(), field: None, value }),
                Err(_) => Err(Error::UnknownCorpusEntry(e)),
            },
            Err(e) => Err(e),
        }
    }

    /// Loads and checks one entry of a section.
    pub fn validate(&self, section: &str, name: &str) -> Result<String> {
        match section {
            "functions" => {
                let f = self.function(name)?;
                if f.name() != name {
                    return Err(Error::InvalidInput(format!("file `{name}` declares name `{}`", f.name())));
                }
                if let Some(k) = f.check_annihilator(64) {
                    return Err(Error::PreconditionViolated(format!("annihilator of `{name}` fails at order {k}")));
                }
                Ok(format!("{} function", f.kind().name()))
            }
            "operators" => {
                let l = self.operator(name)?;
                Ok(format!("{} operator of order {}", l.kind().name(), l.order().unwrap_or(0)))
            }
            "relations" => {
                let r = self.relation(name)?;
                if r.labels().iter().all(|l| self.locate("functions", l).is_ok()) {
                    let funcs = self.series_of(r.labels())?;
                    if let Some(k) = relforge_core::relations::verify_relation(&r, &funcs, 64)? {
                        return Err(Error::PreconditionViolated(format!("relation `{name}` fails at order {k}")));
                    }
                    Ok("relation verified modulo z^64".into())
                } else {
                    Ok("relation among free variables".into())
                }
            }
            "points" => {
                let p = self.point(name)?;
                Ok(format!("point {}", p.value))
            }
            _ => Err(Error::InvalidInput(format!("unknown section `{section}`"))),
        }
    }
}
