//! Bundles of algorithms whose extrinsic functions are computed by members
//! of the bundle.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithm::Algorithm;
use crate::parser::{parse, SourceError};
use crate::value::{name, Name};

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("cannot read `{path}`: {message}")]
    Io { path: PathBuf, message: String },
    #[error("invalid bundle document: {0}")]
    Json(String),
    #[error("member `{path}`: {source}")]
    Source { path: String, source: SourceError },
    #[error("the bundle has no members")]
    Empty,
    #[error("extrinsic `{0}` is neither covered by a member nor a passthrough oracle")]
    UncoveredExtrinsic(Name),
    #[error("`{symbol}` is mapped to member {index}, which does not exist")]
    NoSuchMember { symbol: Name, index: usize },
    #[error("`{symbol}` has arity {arity} but member {index} takes {inputs} input(s)")]
    ArityMismatch {
        symbol: Name,
        arity: usize,
        index: usize,
        inputs: usize,
    },
    #[error("member {0} has no output variable")]
    NoOutput(usize),
    #[error("`{0}` is both covered and declared passthrough")]
    CoveredPassthrough(Name),
    #[error("`{0}` is used as an extrinsic function but is not extrinsic in every member")]
    NotExtrinsic(Name),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub label: String,
    pub algorithm: Algorithm,
    /// Name of the function this member computes, if it is queried anywhere.
    pub objective: Option<Name>,
}

/// Algorithms `A_0, ..., A_{N-1}` with a map from extrinsic symbols to the
/// member computing them. Member 0 is the entry point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgorithmBundle {
    pub members: Vec<Member>,
    pub coverage: BTreeMap<Name, usize>,
    /// Extrinsic symbols left as genuine oracles.
    pub passthrough: BTreeSet<Name>,
}

#[derive(Serialize, Deserialize)]
struct MemberDoc {
    path: String,
    #[serde(default)]
    objective: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct BundleDoc {
    members: Vec<MemberDoc>,
    #[serde(default)]
    coverage: BTreeMap<String, usize>,
    #[serde(default)]
    passthrough: Vec<String>,
}

impl AlgorithmBundle {
    /// Builds a bundle; each member's objective is added to the coverage map.
    pub fn new(
        members: Vec<Member>,
        coverage: BTreeMap<Name, usize>,
        passthrough: BTreeSet<Name>,
    ) -> Result<AlgorithmBundle, BundleError> {
        let mut coverage = coverage;
        for (i, m) in members.iter().enumerate() {
            if let Some(obj) = &m.objective {
                coverage.entry(obj.clone()).or_insert(i);
            }
        }
        let b = AlgorithmBundle {
            members,
            coverage,
            passthrough,
        }
        .dedup_objectives();
        b.validate()?;
        Ok(b)
    }

    /// Reads a bundle document; member paths are relative to it.
    pub fn load(path: &Path) -> Result<AlgorithmBundle, BundleError> {
        let io = |p: &Path, e: std::io::Error| BundleError::Io {
            path: p.to_path_buf(),
            message: e.to_string(),
        };
        let text = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
        let doc: BundleDoc = serde_json::from_str(&text).map_err(|e| BundleError::Json(e.to_string()))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let mut members = Vec::new();
        for m in doc.members {
            let p = dir.join(&m.path);
            let src = std::fs::read_to_string(&p).map_err(|e| io(&p, e))?;
            let algorithm = parse(&src).map_err(|source| BundleError::Source {
                path: m.path.clone(),
                source,
            })?;
            members.push(Member {
                label: m.path,
                algorithm,
                objective: m.objective.map(name),
            });
        }
        AlgorithmBundle::new(
            members,
            doc.coverage.into_iter().map(|(k, v)| (name(k), v)).collect(),
            doc.passthrough.into_iter().map(name).collect(),
        )
    }

    /// Drops members whose objective repeats an earlier member's, pointing
    /// coverage at the earliest one.
    fn dedup_objectives(mut self) -> AlgorithmBundle {
        let mut first: BTreeMap<Name, usize> = BTreeMap::new();
        let mut remap: Vec<usize> = Vec::new();
        let mut kept = Vec::new();
        for m in std::mem::take(&mut self.members) {
            match m.objective.as_ref().and_then(|o| first.get(o)) {
                Some(&k) => remap.push(k),
                None => {
                    if let Some(o) = &m.objective {
                        first.insert(o.clone(), kept.len());
                    }
                    remap.push(kept.len());
                    kept.push(m);
                }
            }
        }
        self.members = kept;
        for idx in self.coverage.values_mut() {
            if let Some(&r) = remap.get(*idx) {
                *idx = r;
            } else {
                // out of range, reported by validate
                *idx = usize::MAX;
            }
        }
        self
    }

    fn validate(&self) -> Result<(), BundleError> {
        if self.members.is_empty() {
            return Err(BundleError::Empty);
        }
        for p in &self.passthrough {
            if self.coverage.contains_key(p) {
                return Err(BundleError::CoveredPassthrough(p.clone()));
            }
        }
        for (sym, &j) in &self.coverage {
            let target = self.members.get(j).ok_or_else(|| BundleError::NoSuchMember {
                symbol: sym.clone(),
                index: j,
            })?;
            if target.algorithm.output().is_none() {
                return Err(BundleError::NoOutput(j));
            }
            let inputs = target.algorithm.inputs().len();
            for m in &self.members {
                if let Some(s) = m.algorithm.vocabulary().get(sym) {
                    if !s.is_extrinsic() {
                        return Err(BundleError::NotExtrinsic(sym.clone()));
                    }
                    if s.arity != inputs {
                        return Err(BundleError::ArityMismatch {
                            symbol: sym.clone(),
                            arity: s.arity,
                            index: j,
                            inputs,
                        });
                    }
                }
            }
        }
        for m in &self.members {
            for e in m.algorithm.vocabulary().extrinsics() {
                if !self.coverage.contains_key(&e.name) && !self.passthrough.contains(&e.name) {
                    return Err(BundleError::UncoveredExtrinsic(e.name.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn entry(&self) -> &Algorithm {
        &self.members[0].algorithm
    }
}
