//! The trial ledger: one CSV row per trial, appended as trials finish.
//! Failed trials keep their identity columns and carry the error in
//! `status`, with every metric column empty.

use crate::error::{write_err, CliError};
use annomod_core::repr::Strategy;
use annomod_core::scaling::{ScalingPoint, TrialRecord};
use std::collections::BTreeSet;
use std::path::Path;

pub const LEDGER_HEADER: [&str; 17] = [
    "trial_id",
    "dataset",
    "strategy",
    "run",
    "num_annotators",
    "num_instances",
    "num_annotations",
    "ann_per_annotator",
    "alpha",
    "frac",
    "seed",
    "subsample_hash",
    "f1_individual",
    "f1_majority",
    "f1_baseline_individual",
    "rel_improvement_pct",
    "status",
];

pub const STATUS_OK: &str = "ok";

/// A successfully parsed ledger row with `status == "ok"`.
#[derive(Debug, Clone)]
pub struct LedgerRow {
    pub trial_id: String,
    pub dataset: String,
    pub strategy: Strategy,
    pub run: u32,
    pub num_annotators: usize,
    pub num_instances: usize,
    pub num_annotations: usize,
    pub ann_per_annotator: f64,
    pub alpha: Option<f64>,
    pub frac: f64,
    pub seed: u64,
    pub subsample_hash: String,
    pub f1_individual: f64,
    pub f1_majority: f64,
    pub f1_baseline_individual: f64,
    pub rel_improvement_pct: f64,
}

impl LedgerRow {
    pub fn to_scaling_point(&self) -> ScalingPoint {
        ScalingPoint {
            dataset: self.dataset.clone(),
            strategy: self.strategy,
            num_annotators: self.num_annotators,
            num_instances: self.num_instances,
            num_annotations: self.num_annotations,
            ann_per_annotator: self.ann_per_annotator,
            rel_improvement_pct: self.rel_improvement_pct,
        }
    }
}

/// Every ledger row, failed ones included.
#[derive(Debug, Clone)]
pub enum LedgerEntry {
    Ok(LedgerRow),
    Failed {
        trial_id: String,
        dataset: String,
        strategy: String,
        run: String,
        status: String,
    },
}

impl LedgerEntry {
    pub fn trial_id(&self) -> &str {
        match self {
            LedgerEntry::Ok(row) => &row.trial_id,
            LedgerEntry::Failed { trial_id, .. } => trial_id,
        }
    }
}

fn field(rec: &csv::StringRecord, idx: usize) -> &str {
    rec.get(idx).unwrap_or("")
}

fn parse_num<T: std::str::FromStr>(
    path: &Path,
    line: u64,
    name: &str,
    s: &str,
) -> Result<T, CliError> {
    s.parse().map_err(|_| {
        CliError::Data(format!(
            "{}:{line}: column {name} has unparsable value '{s}'",
            path.display()
        ))
    })
}

/// Reads a ledger, validating the exact header.
pub fn read_ledger(path: &Path) -> Result<Vec<LedgerEntry>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let expected: Vec<&str> = LEDGER_HEADER.to_vec();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(CliError::Data(format!(
            "{}: unexpected ledger header",
            path.display()
        )));
    }

    let mut out = Vec::new();
    for record in reader.records() {
        let rec = record.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != LEDGER_HEADER.len() {
            return Err(CliError::Data(format!(
                "{}:{line}: expected {} columns, got {}",
                path.display(),
                LEDGER_HEADER.len(),
                rec.len()
            )));
        }
        let status = field(&rec, 16);
        if status != STATUS_OK {
            out.push(LedgerEntry::Failed {
                trial_id: field(&rec, 0).to_string(),
                dataset: field(&rec, 1).to_string(),
                strategy: field(&rec, 2).to_string(),
                run: field(&rec, 3).to_string(),
                status: status.to_string(),
            });
            continue;
        }
        let alpha = match field(&rec, 8) {
            "" => None,
            s => Some(parse_num(path, line, "alpha", s)?),
        };
        out.push(LedgerEntry::Ok(LedgerRow {
            trial_id: field(&rec, 0).to_string(),
            dataset: field(&rec, 1).to_string(),
            strategy: Strategy::parse(field(&rec, 2)).map_err(|e| {
                CliError::Data(format!("{}:{line}: {e}", path.display()))
            })?,
            run: parse_num(path, line, "run", field(&rec, 3))?,
            num_annotators: parse_num(path, line, "num_annotators", field(&rec, 4))?,
            num_instances: parse_num(path, line, "num_instances", field(&rec, 5))?,
            num_annotations: parse_num(path, line, "num_annotations", field(&rec, 6))?,
            ann_per_annotator: parse_num(path, line, "ann_per_annotator", field(&rec, 7))?,
            alpha,
            frac: parse_num(path, line, "frac", field(&rec, 9))?,
            seed: parse_num(path, line, "seed", field(&rec, 10))?,
            subsample_hash: field(&rec, 11).to_string(),
            f1_individual: parse_num(path, line, "f1_individual", field(&rec, 12))?,
            f1_majority: parse_num(path, line, "f1_majority", field(&rec, 13))?,
            f1_baseline_individual: parse_num(
                path,
                line,
                "f1_baseline_individual",
                field(&rec, 14),
            )?,
            rel_improvement_pct: parse_num(
                path,
                line,
                "rel_improvement_pct",
                field(&rec, 15),
            )?,
        }));
    }
    Ok(out)
}

/// Trial ids already present in a ledger file, or empty when the file
/// does not exist yet.
pub fn completed_trial_ids(path: &Path) -> Result<BTreeSet<String>, CliError> {
    if !path.exists() {
        return Ok(BTreeSet::new());
    }
    Ok(read_ledger(path)?
        .into_iter()
        .map(|e| e.trial_id().to_string())
        .collect())
}

/// Append-mode ledger writer; creates the file with its header when
/// missing. Each appended row is flushed so an interrupted sweep keeps
/// every finished trial.
pub struct LedgerWriter {
    writer: csv::Writer<std::fs::File>,
}

impl LedgerWriter {
    pub fn open(path: &Path) -> Result<Self, CliError> {
        let fresh = !path.exists();
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| write_err(path, e))?;
        let mut writer = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(file);
        if fresh {
            writer
                .write_record(LEDGER_HEADER)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        }
        Ok(LedgerWriter { writer })
    }

    fn write(&mut self, fields: [String; 17]) -> Result<(), CliError> {
        self.writer
            .write_record(&fields)
            .and_then(|()| self.writer.flush().map_err(csv::Error::from))
            .map_err(|e| CliError::Usage(format!("ledger write failed: {e}")))
    }

    pub fn append_ok(&mut self, r: &TrialRecord) -> Result<(), CliError> {
        self.write([
            r.trial_id.clone(),
            r.dataset.clone(),
            r.strategy.as_str().to_string(),
            r.run.to_string(),
            r.num_annotators.to_string(),
            r.num_instances.to_string(),
            r.num_annotations.to_string(),
            format!("{}", r.ann_per_annotator),
            r.alpha.map_or(String::new(), |a| format!("{a}")),
            format!("{}", r.frac),
            r.seed.to_string(),
            r.subsample_hash.clone(),
            format!("{}", r.f1_individual),
            format!("{}", r.f1_majority),
            format!("{}", r.f1_baseline_individual),
            format!("{}", r.rel_improvement_pct),
            STATUS_OK.to_string(),
        ])
    }

    pub fn append_failed(
        &mut self,
        trial_id: &str,
        dataset: &str,
        strategy: Strategy,
        run: u32,
        error: &str,
    ) -> Result<(), CliError> {
        // Newlines would break line-oriented consumers even inside CSV
        // quoting; flatten them.
        let status = error.replace(['\n', '\r'], " ");
        let mut fields: [String; 17] = Default::default();
        fields[0] = trial_id.to_string();
        fields[1] = dataset.to_string();
        fields[2] = strategy.as_str().to_string();
        fields[3] = run.to_string();
        fields[16] = status;
        self.write(fields)
    }

    pub fn flush(&mut self) -> Result<(), CliError> {
        self.writer
            .flush()
            .map_err(|e| CliError::Usage(format!("ledger write failed: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use annomod_core::trainer::TrainHistory;

    fn record(id: &str, alpha: Option<f64>) -> TrialRecord {
        TrialRecord {
            trial_id: id.to_string(),
            dataset: "toy".to_string(),
            strategy: Strategy::UserToken,
            run: 2,
            num_annotators: 9,
            num_instances: 120,
            num_annotations: 600,
            ann_per_annotator: 600.0 / 9.0,
            alpha,
            frac: 0.3,
            seed: 77,
            subsample_hash: "ab12cd34".to_string(),
            f1_individual: 0.7125,
            f1_majority: 2.0 / 3.0,
            f1_baseline_individual: 0.6011,
            rel_improvement_pct: 18.533_333_333_333_33,
            test_rows: Vec::new(),
            history: TrainHistory {
                epochs: Vec::new(),
                selected_epoch: 1,
                adam_updates: 0,
            },
        }
    }

    #[test]
    fn append_then_read_round_trips_across_reopens() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.csv");
        {
            let mut w = LedgerWriter::open(&path).unwrap();
            w.append_ok(&record("t:a", Some(0.4321))).unwrap();
            w.append_ok(&record("t:b", None)).unwrap();
        }
        {
            // Reopening appends without a second header row.
            let mut w = LedgerWriter::open(&path).unwrap();
            w.append_failed("t:c", "toy", Strategy::Composite, 4, "boom\nline two")
                .unwrap();
        }

        let entries = read_ledger(&path).unwrap();
        assert_eq!(entries.len(), 3);
        match &entries[0] {
            LedgerEntry::Ok(row) => {
                assert_eq!(row.trial_id, "t:a");
                assert_eq!(row.strategy, Strategy::UserToken);
                assert_eq!(row.run, 2);
                // Shortest round-trip float formatting parses back exactly.
                assert_eq!(row.ann_per_annotator, 600.0 / 9.0);
                assert_eq!(row.alpha, Some(0.4321));
                assert_eq!(row.f1_majority, 2.0 / 3.0);
                assert_eq!(row.rel_improvement_pct, 18.533_333_333_333_33);
            }
            other => panic!("expected ok row, got {other:?}"),
        }
        match &entries[1] {
            LedgerEntry::Ok(row) => assert_eq!(row.alpha, None),
            other => panic!("expected ok row, got {other:?}"),
        }
        match &entries[2] {
            LedgerEntry::Failed {
                trial_id, status, ..
            } => {
                assert_eq!(trial_id, "t:c");
                assert_eq!(status, "boom line two");
            }
            other => panic!("expected failed row, got {other:?}"),
        }
    }

    #[test]
    fn resume_set_covers_ok_and_failed_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.csv");
        assert!(completed_trial_ids(&path).unwrap().is_empty());

        let mut w = LedgerWriter::open(&path).unwrap();
        w.append_ok(&record("t:a", None)).unwrap();
        w.append_failed("t:c", "toy", Strategy::None, 0, "oom").unwrap();
        drop(w);

        let ids = completed_trial_ids(&path).unwrap();
        assert_eq!(
            ids.iter().map(String::as_str).collect::<Vec<_>>(),
            ["t:a", "t:c"]
        );
    }

    #[test]
    fn malformed_ledgers_are_rejected_with_position() {
        let dir = tempfile::tempdir().unwrap();

        let bad_header = dir.path().join("h.csv");
        std::fs::write(&bad_header, "trial_id,dataset\nx,y\n").unwrap();
        let err = read_ledger(&bad_header).unwrap_err();
        assert!(err.to_string().contains("unexpected ledger header"), "{err}");
        assert_eq!(err.exit_code(), 2);

        let bad_value = dir.path().join("v.csv");
        let mut text = LEDGER_HEADER.join(",");
        text.push('\n');
        text.push_str("t:a,toy,user_token,two,9,120,600,66.7,,1,77,h,0.7,0.6,0.6,16.7,ok\n");
        std::fs::write(&bad_value, text).unwrap();
        let err = read_ledger(&bad_value).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":2:") && msg.contains("run"), "{msg}");
    }
}
