//! JSON file formats.
//!
//! One object per file. A `space` field is either an inline space object or
//! a path to a space file, resolved relative to the file that names it.
//! Emitted measures always carry their space inline, so every file the tool
//! writes can be read back without its neighbours.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use tropimeas::{FiniteMetricSpace, IdempotentMeasure, LipFunction, MetaMeasure, Normalization, PointMap, RMax};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {context}: {message}")]
    Invalid { path: PathBuf, context: String, message: String },
}

impl InputError {
    fn invalid(path: &Path, context: impl Into<String>, message: impl ToString) -> Self {
        InputError::Invalid { path: path.to_owned(), context: context.into(), message: message.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub dist: Vec<Vec<f64>>,
}

impl SpaceFile {
    pub fn from_space(space: &FiniteMetricSpace) -> Self {
        SpaceFile { points: space.labels().to_vec(), dist: space.matrix().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Inline(SpaceFile),
    Path(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomEntry {
    pub point: String,
    pub weight: RMax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceRef>,
    pub atoms: Vec<AtomEntry>,
}

impl MeasureFile {
    pub fn from_measure(mu: &IdempotentMeasure, inline_space: bool) -> Self {
        let space = mu.space();
        MeasureFile {
            space: inline_space.then(|| SpaceRef::Inline(SpaceFile::from_space(space))),
            atoms: mu
                .atoms()
                .iter()
                .map(|&(p, w)| AtomEntry { point: space.label(p).to_owned(), weight: RMax::Finite(w) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaAtomEntry {
    pub measure: MeasureFile,
    pub weight: RMax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceRef>,
    pub atoms: Vec<MetaAtomEntry>,
}

impl MetaFile {
    pub fn from_meta(meta: &MetaMeasure) -> Self {
        MetaFile {
            space: Some(SpaceRef::Inline(SpaceFile::from_space(meta.space()))),
            atoms: meta
                .atoms()
                .iter()
                .map(|(m, w)| MetaAtomEntry { measure: MeasureFile::from_measure(m, false), weight: RMax::Finite(*w) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombineTerm {
    pub alpha: RMax,
    pub measure: MeasureFile,
}

/// `{"space": …, "terms": [{"alpha": 0, "measure": {"atoms": […]}}, …]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombineFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceRef>,
    pub terms: Vec<CombineTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
}

/// `{"assignment": {"a": "u"}}`; `target` defaults to the source space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub assignment: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<SpaceRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorFile {
    Tropical { z: Vec<f64> },
    Simplex { p: Vec<f64> },
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = fs::read_to_string(path).map_err(|source| InputError::Io { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|source| InputError::Json { path: path.to_owned(), source })
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_owned).unwrap_or_default()
}

pub fn build_space(file: &SpaceFile, path: &Path) -> Result<Arc<FiniteMetricSpace>, InputError> {
    FiniteMetricSpace::new(file.points.clone(), file.dist.clone())
        .map(Arc::new)
        .map_err(|e| InputError::invalid(path, "dist", e))
}

pub fn load_space(path: &Path) -> Result<Arc<FiniteMetricSpace>, InputError> {
    let file: SpaceFile = read_json(path)?;
    build_space(&file, path)
}

/// Resolves a `space` field; `path` is the file containing it.
pub fn resolve_space(space: &SpaceRef, path: &Path) -> Result<Arc<FiniteMetricSpace>, InputError> {
    match space {
        SpaceRef::Inline(file) => build_space(file, path),
        SpaceRef::Path(rel) => load_space(&base_dir(path).join(rel)),
    }
}

fn required_space(space: &Option<SpaceRef>, path: &Path) -> Result<Arc<FiniteMetricSpace>, InputError> {
    match space {
        Some(s) => resolve_space(s, path),
        None => Err(InputError::invalid(path, "space", "missing space")),
    }
}

/// Builds a measure from its file form on a known space.
pub fn measure_on(
    file: &MeasureFile,
    space: &Arc<FiniteMetricSpace>,
    mode: Normalization,
    path: &Path,
    context: &str,
) -> Result<IdempotentMeasure, InputError> {
    let raw = file
        .atoms
        .iter()
        .enumerate()
        .map(|(i, a)| {
            space
                .index_of(&a.point)
                .map(|p| (p, a.weight))
                .map_err(|e| InputError::invalid(path, format!("{context}atoms[{i}].point"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    IdempotentMeasure::canonicalize(space, &raw, mode).map_err(|e| InputError::invalid(path, format!("{context}atoms"), e))
}

pub fn load_measure(path: &Path, mode: Normalization) -> Result<IdempotentMeasure, InputError> {
    let file: MeasureFile = read_json(path)?;
    let space = required_space(&file.space, path)?;
    measure_on(&file, &space, mode, path, "")
}

pub fn load_meta(path: &Path, mode: Normalization) -> Result<MetaMeasure, InputError> {
    let file: MetaFile = read_json(path)?;
    let space = required_space(&file.space, path)?;
    let raw = file
        .atoms
        .iter()
        .enumerate()
        .map(|(i, a)| Ok((measure_on(&a.measure, &space, mode, path, &format!("atoms[{i}].measure."))?, a.weight)))
        .collect::<Result<Vec<_>, InputError>>()?;
    MetaMeasure::canonicalize(raw, mode).map_err(|e| InputError::invalid(path, "atoms", e))
}

pub fn load_combine(path: &Path, mode: Normalization) -> Result<(Vec<RMax>, Vec<IdempotentMeasure>), InputError> {
    let file: CombineFile = read_json(path)?;
    let space = required_space(&file.space, path)?;
    let mut alphas = Vec::with_capacity(file.terms.len());
    let mut measures = Vec::with_capacity(file.terms.len());
    for (i, term) in file.terms.iter().enumerate() {
        alphas.push(term.alpha);
        measures.push(measure_on(&term.measure, &space, mode, path, &format!("terms[{i}].measure."))?);
    }
    Ok((alphas, measures))
}

/// Reads a function table as values indexed by the points of `space`.
pub fn load_function(path: &Path, space: &FiniteMetricSpace) -> Result<Vec<f64>, InputError> {
    let file: FunctionFile = read_json(path)?;
    if let Some(label) = file.values.keys().find(|k| space.index_of(k).is_err()) {
        return Err(InputError::invalid(path, format!("values.{label}"), "unknown point"));
    }
    let values = space
        .labels()
        .iter()
        .map(|label| {
            file.values
                .get(label)
                .copied()
                .ok_or_else(|| InputError::invalid(path, "values", format!("no value at point {label:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(n) = file.n {
        LipFunction::new(space, values.clone(), n).map_err(|e| InputError::invalid(path, "values", e))?;
    }
    Ok(values)
}

pub fn load_map(path: &Path, source: &Arc<FiniteMetricSpace>) -> Result<PointMap, InputError> {
    let file: MapFile = read_json(path)?;
    let target = match &file.target {
        Some(t) => resolve_space(t, path)?,
        None => source.clone(),
    };
    if let Some(label) = file.assignment.keys().find(|k| source.index_of(k).is_err()) {
        return Err(InputError::invalid(path, format!("assignment.{label}"), "unknown source point"));
    }
    let assignment = source
        .labels()
        .iter()
        .map(|label| {
            let image = file
                .assignment
                .get(label)
                .ok_or_else(|| InputError::invalid(path, "assignment", format!("no image for point {label:?}")))?;
            target
                .index_of(image)
                .map_err(|e| InputError::invalid(path, format!("assignment.{label}"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    PointMap::new(source.clone(), target, assignment).map_err(|e| InputError::invalid(path, "assignment", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_file_parses_minus_inf_and_inline_space() {
        let text = r#"{"space":{"points":["a","b"],"dist":[[0,1],[1,0]]},
                       "atoms":[{"point":"a","weight":0.0},{"point":"b","weight":"-inf"}]}"#;
        let file: MeasureFile = serde_json::from_str(text).unwrap();
        let space = required_space(&file.space, Path::new("m.json")).unwrap();
        let mu = measure_on(&file, &space, Normalization::Strict, Path::new("m.json"), "").unwrap();
        assert_eq!(mu.atoms(), &[(0, 0.0)]);
    }

    #[test]
    fn space_ref_accepts_paths() {
        let file: MeasureFile = serde_json::from_str(r#"{"space":"x.json","atoms":[]}"#).unwrap();
        assert_eq!(file.space, Some(SpaceRef::Path("x.json".into())));
    }

    #[test]
    fn vector_file_variants() {
        assert_eq!(serde_json::from_str::<VectorFile>(r#"{"z":[1,0.5]}"#).unwrap(), VectorFile::Tropical { z: vec![1.0, 0.5] });
        assert_eq!(serde_json::from_str::<VectorFile>(r#"{"p":[1]}"#).unwrap(), VectorFile::Simplex { p: vec![1.0] });
    }

    #[test]
    fn emitted_measure_round_trips() {
        let space = tropimeas::sample::space_on_grid(&[(0, 0), (1, 0), (0, 3)]);
        let mu = IdempotentMeasure::canonicalize(&space, &[(0, RMax::UNIT), (2, RMax::Finite(-1.375))], Normalization::Strict).unwrap();
        let text = serde_json::to_string(&MeasureFile::from_measure(&mu, true)).unwrap();
        let file: MeasureFile = serde_json::from_str(&text).unwrap();
        let space2 = required_space(&file.space, Path::new("out.json")).unwrap();
        assert_eq!(measure_on(&file, &space2, Normalization::Strict, Path::new("out.json"), "").unwrap(), mu);
    }
}
