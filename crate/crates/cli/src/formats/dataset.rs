//! Dataset interchange files: JSON-lines records plus optional sidecars
//! for auxiliary texts and split assignments. Parse errors name the file
//! and 1-based line.

use crate::error::{read_err, write_err, CliError};
use annomod_core::corpus::{AnnotationMatrix, Annotator, Dataset, Instance, Split};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRecord {
    instance_id: String,
    text: String,
    annotations: BTreeMap<String, u8>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AuxRecord {
    annotator_id: String,
    text_id: String,
    text: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitRecord {
    instance_id: String,
    split: String,
}

fn data_err(path: &Path, line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}:{line}: {msg}", path.display()))
}

/// Calls `f` with each non-blank line and its 1-based number.
fn for_lines(
    path: &Path,
    mut f: impl FnMut(usize, &str) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let file = std::fs::File::open(path).map_err(|e| read_err(path, e))?;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| read_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        f(idx + 1, &line)?;
    }
    Ok(())
}

/// Loads a dataset with its optional sidecars into a validated corpus.
///
/// Annotators are the union of annotation keys and auxiliary-text
/// authors, so an annotator may contribute texts without labels.
pub fn load_dataset(
    dataset_path: &Path,
    aux_path: Option<&Path>,
    splits_path: Option<&Path>,
) -> Result<Dataset, CliError> {
    let mut instances = Vec::new();
    let mut matrix = AnnotationMatrix::new();
    let mut annotator_ids: BTreeMap<String, Vec<String>> = BTreeMap::new();

    for_lines(dataset_path, |line_no, line| {
        let rec: InstanceRecord = serde_json::from_str(line)
            .map_err(|e| data_err(dataset_path, line_no, e))?;
        for (annotator, label) in &rec.annotations {
            matrix
                .insert(&rec.instance_id, annotator, *label)
                .map_err(|e| data_err(dataset_path, line_no, e))?;
            annotator_ids.entry(annotator.clone()).or_default();
        }
        instances.push(Instance {
            id: rec.instance_id,
            text: rec.text,
        });
        Ok(())
    })?;

    let mut aux_texts = BTreeMap::new();
    if let Some(path) = aux_path {
        for_lines(path, |line_no, line| {
            let rec: AuxRecord =
                serde_json::from_str(line).map_err(|e| data_err(path, line_no, e))?;
            if aux_texts.insert(rec.text_id.clone(), rec.text).is_some() {
                return Err(data_err(
                    path,
                    line_no,
                    format!("duplicate text id '{}'", rec.text_id),
                ));
            }
            annotator_ids
                .entry(rec.annotator_id)
                .or_default()
                .push(rec.text_id);
            Ok(())
        })?;
    }

    let mut splits = None;
    if let Some(path) = splits_path {
        let mut map = BTreeMap::new();
        for_lines(path, |line_no, line| {
            let rec: SplitRecord =
                serde_json::from_str(line).map_err(|e| data_err(path, line_no, e))?;
            let split =
                Split::parse(&rec.split).map_err(|e| data_err(path, line_no, e))?;
            if map.insert(rec.instance_id.clone(), split).is_some() {
                return Err(data_err(
                    path,
                    line_no,
                    format!("instance '{}' assigned twice", rec.instance_id),
                ));
            }
            Ok(())
        })?;
        splits = Some(map);
    }

    let annotators = annotator_ids
        .into_iter()
        .map(|(id, aux_text_ids)| Annotator { id, aux_text_ids })
        .collect();
    Dataset::new(instances, annotators, matrix, splits, aux_texts)
        .map_err(|e| CliError::Data(format!("{}: {e}", dataset_path.display())))
}

/// Writes a dataset as interchange JSON lines, instances in sorted id
/// order so equal datasets produce equal bytes.
pub fn write_dataset(dataset: &Dataset, path: &Path) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| write_err(path, e))?;
    let mut out = BufWriter::new(file);
    for (id, inst) in dataset.instances() {
        let annotations: BTreeMap<String, u8> = dataset
            .matrix()
            .labels_of(id)
            .map(|(a, l)| (a.to_string(), l))
            .collect();
        let rec = InstanceRecord {
            instance_id: id.clone(),
            text: inst.text.clone(),
            annotations,
        };
        serde_json::to_writer(&mut out, &rec).map_err(|e| write_err(path, e.into()))?;
        out.write_all(b"\n").map_err(|e| write_err(path, e))?;
    }
    out.flush().map_err(|e| write_err(path, e))
}

/// Writes the split sidecar for a dataset that carries assignments.
pub fn write_splits(dataset: &Dataset, path: &Path) -> Result<(), CliError> {
    let splits = dataset
        .splits()
        .ok_or_else(|| CliError::Data("dataset has no split assignments".to_string()))?;
    let file = std::fs::File::create(path).map_err(|e| write_err(path, e))?;
    let mut out = BufWriter::new(file);
    for (instance_id, split) in splits {
        let rec = SplitRecord {
            instance_id: instance_id.clone(),
            split: split.as_str().to_string(),
        };
        serde_json::to_writer(&mut out, &rec).map_err(|e| write_err(path, e.into()))?;
        out.write_all(b"\n").map_err(|e| write_err(path, e))?;
    }
    out.flush().map_err(|e| write_err(path, e))
}
