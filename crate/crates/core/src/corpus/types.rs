use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::CoreError;

/// A labeled text item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub text: String,
}

/// An annotator, optionally linked to auxiliary texts they wrote.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotator {
    pub id: String,
    pub aux_text_ids: Vec<String>,
}

/// Dataset partition an instance belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CoreError> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(CoreError::InvalidData(alloc::format!(
                "unknown split '{other}'"
            ))),
        }
    }

    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];
}

/// How an even vote is resolved when deriving majority labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    /// Ties resolve to the positive class.
    #[default]
    PositiveWins,
    /// Ties resolve to the negative class.
    NegativeWins,
}

impl TieRule {
    pub fn resolve(self, ones: usize, zeros: usize) -> u8 {
        use core::cmp::Ordering;
        match ones.cmp(&zeros) {
            Ordering::Greater => 1,
            Ordering::Less => 0,
            Ordering::Equal => match self {
                TieRule::PositiveWins => 1,
                TieRule::NegativeWins => 0,
            },
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TieRule::PositiveWins => "positive",
            TieRule::NegativeWins => "negative",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CoreError> {
        match s {
            "positive" => Ok(TieRule::PositiveWins),
            "negative" => Ok(TieRule::NegativeWins),
            other => Err(CoreError::InvalidConfig(alloc::format!(
                "unknown tie rule '{other}'"
            ))),
        }
    }
}

/// Sparse binary annotation matrix keyed by instance, then annotator.
/// Each (instance, annotator) pair appears at most once; labels are 0 or 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationMatrix {
    by_instance: BTreeMap<String, BTreeMap<String, u8>>,
    len: usize,
}

impl AnnotationMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one annotation. Rejects duplicate pairs and non-binary
    /// labels.
    pub fn insert(
        &mut self,
        instance_id: &str,
        annotator_id: &str,
        label: u8,
    ) -> Result<(), CoreError> {
        if label > 1 {
            return Err(CoreError::InvalidLabel {
                instance: instance_id.to_string(),
                label,
            });
        }
        let row = self.by_instance.entry(instance_id.to_string()).or_default();
        if row.contains_key(annotator_id) {
            return Err(CoreError::DuplicateAnnotation {
                instance: instance_id.to_string(),
                annotator: annotator_id.to_string(),
            });
        }
        row.insert(annotator_id.to_string(), label);
        self.len += 1;
        Ok(())
    }

    pub fn get(&self, instance_id: &str, annotator_id: &str) -> Option<u8> {
        self.by_instance.get(instance_id)?.get(annotator_id).copied()
    }

    /// Labels on one instance, sorted by annotator id. Empty if the
    /// instance has no annotations.
    pub fn labels_of(&self, instance_id: &str) -> impl Iterator<Item = (&str, u8)> {
        self.by_instance
            .get(instance_id)
            .into_iter()
            .flat_map(|row| row.iter().map(|(a, &l)| (a.as_str(), l)))
    }

    /// All annotations in (instance, annotator) sorted order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, u8)> {
        self.by_instance.iter().flat_map(|(i, row)| {
            row.iter().map(move |(a, &l)| (i.as_str(), a.as_str(), l))
        })
    }

    /// Instance ids carrying at least one annotation, sorted.
    pub fn instance_ids(&self) -> impl Iterator<Item = &str> {
        self.by_instance.keys().map(String::as_str)
    }

    /// Number of annotations on one instance.
    pub fn degree(&self, instance_id: &str) -> usize {
        self.by_instance.get(instance_id).map_or(0, BTreeMap::len)
    }

    /// Total number of annotations.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Annotation counts per annotator, sorted by annotator id.
    pub fn annotator_counts(&self) -> BTreeMap<String, usize> {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for (_, a, _) in self.iter() {
            *counts.entry(a.to_string()).or_insert(0) += 1;
        }
        counts
    }

    /// Matrix restricted to the given instances.
    pub fn restrict_to_instances(&self, keep: &BTreeSet<String>) -> AnnotationMatrix {
        let mut out = AnnotationMatrix::new();
        for (i, row) in &self.by_instance {
            if keep.contains(i) {
                for (a, &l) in row {
                    out.insert(i, a, l).expect("restriction cannot duplicate");
                }
            }
        }
        out
    }

    /// Matrix restricted to the given annotators.
    pub fn restrict_to_annotators(&self, keep: &BTreeSet<String>) -> AnnotationMatrix {
        let mut out = AnnotationMatrix::new();
        for (i, a, l) in self.iter() {
            if keep.contains(a) {
                out.insert(i, a, l).expect("restriction cannot duplicate");
            }
        }
        out
    }
}

/// A validated corpus. Construction checks that all ids are unique and
/// non-empty, that every annotation references a known instance and
/// annotator, that annotator auxiliary-text links resolve, and that
/// splits, when present, cover exactly the instance set.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    instances: BTreeMap<String, Instance>,
    annotators: BTreeMap<String, Annotator>,
    matrix: AnnotationMatrix,
    splits: Option<BTreeMap<String, Split>>,
    aux_texts: BTreeMap<String, String>,
}

impl Dataset {
    pub fn new(
        instances: Vec<Instance>,
        annotators: Vec<Annotator>,
        matrix: AnnotationMatrix,
        splits: Option<BTreeMap<String, Split>>,
        aux_texts: BTreeMap<String, String>,
    ) -> Result<Self, CoreError> {
        let mut inst_map: BTreeMap<String, Instance> = BTreeMap::new();
        for inst in instances {
            if inst.id.is_empty() {
                return Err(CoreError::InvalidData("empty instance id".to_string()));
            }
            if inst_map.insert(inst.id.clone(), inst).is_some() {
                return Err(CoreError::InvalidData(
                    "duplicate instance id".to_string(),
                ));
            }
        }
        let mut annot_map: BTreeMap<String, Annotator> = BTreeMap::new();
        for annot in annotators {
            if annot.id.is_empty() {
                return Err(CoreError::InvalidData("empty annotator id".to_string()));
            }
            for tid in &annot.aux_text_ids {
                if !aux_texts.contains_key(tid) {
                    return Err(CoreError::DanglingReference {
                        kind: "auxiliary text",
                        id: tid.clone(),
                    });
                }
            }
            if annot_map.insert(annot.id.clone(), annot).is_some() {
                return Err(CoreError::InvalidData(
                    "duplicate annotator id".to_string(),
                ));
            }
        }
        for (i, a, _) in matrix.iter() {
            if !inst_map.contains_key(i) {
                return Err(CoreError::DanglingReference {
                    kind: "instance",
                    id: i.to_string(),
                });
            }
            if !annot_map.contains_key(a) {
                return Err(CoreError::DanglingReference {
                    kind: "annotator",
                    id: a.to_string(),
                });
            }
        }
        if let Some(splits) = &splits {
            for id in splits.keys() {
                if !inst_map.contains_key(id) {
                    return Err(CoreError::DanglingReference {
                        kind: "instance",
                        id: id.clone(),
                    });
                }
            }
            for id in inst_map.keys() {
                if !splits.contains_key(id) {
                    return Err(CoreError::InvalidData(alloc::format!(
                        "instance '{id}' has no split assignment"
                    )));
                }
            }
        }
        Ok(Dataset {
            instances: inst_map,
            annotators: annot_map,
            matrix,
            splits,
            aux_texts,
        })
    }

    pub fn instances(&self) -> &BTreeMap<String, Instance> {
        &self.instances
    }

    pub fn annotators(&self) -> &BTreeMap<String, Annotator> {
        &self.annotators
    }

    pub fn matrix(&self) -> &AnnotationMatrix {
        &self.matrix
    }

    pub fn splits(&self) -> Option<&BTreeMap<String, Split>> {
        self.splits.as_ref()
    }

    pub fn aux_texts(&self) -> &BTreeMap<String, String> {
        &self.aux_texts
    }

    pub fn split_of(&self, instance_id: &str) -> Option<Split> {
        self.splits.as_ref()?.get(instance_id).copied()
    }

    /// Sorted ids of instances assigned to `split`. Empty when the
    /// dataset has no split assignment.
    pub fn split_instance_ids(&self, split: Split) -> Vec<&str> {
        match &self.splits {
            Some(map) => map
                .iter()
                .filter(|(_, &s)| s == split)
                .map(|(id, _)| id.as_str())
                .collect(),
            None => Vec::new(),
        }
    }

    /// Same dataset with a (new) split assignment.
    pub fn with_splits(&self, splits: BTreeMap<String, Split>) -> Result<Self, CoreError> {
        Dataset::new(
            self.instances.values().cloned().collect(),
            self.annotators.values().cloned().collect(),
            self.matrix.clone(),
            Some(splits),
            self.aux_texts.clone(),
        )
    }

    /// Annotation matrix restricted to instances of one split.
    pub fn split_matrix(&self, split: Split) -> Result<AnnotationMatrix, CoreError> {
        if self.splits.is_none() {
            return Err(CoreError::InvalidData(
                "dataset has no split assignment".to_string(),
            ));
        }
        let keep: BTreeSet<String> = self
            .split_instance_ids(split)
            .into_iter()
            .map(str::to_string)
            .collect();
        Ok(self.matrix.restrict_to_instances(&keep))
    }
}
