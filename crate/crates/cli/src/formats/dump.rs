//! Prediction dumps: one CSV row per (instance, annotator) prediction.

use crate::error::{write_err, CliError};
use annomod_core::metrics::PredRow;
use std::path::Path;

pub const DUMP_HEADER: [&str; 5] = ["instance_id", "annotator_id", "gold", "prob", "pred"];

pub fn write_dump(rows: &[PredRow], path: &Path) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| write_err(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    let fail = |e: csv::Error| CliError::Usage(format!("{}: {e}", path.display()));
    w.write_record(DUMP_HEADER).map_err(fail)?;
    for r in rows {
        w.write_record([
            r.instance_id.as_str(),
            r.annotator_id.as_str(),
            &r.gold.to_string(),
            &format!("{}", r.prob),
            &r.pred.to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| write_err(path, e))
}

pub fn read_dump(path: &Path) -> Result<Vec<PredRow>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let fail = |msg: String| CliError::Data(format!("{}: {msg}", path.display()));
    let headers = reader.headers().map_err(|e| fail(e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != DUMP_HEADER.to_vec() {
        return Err(fail("unexpected dump header".to_string()));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let rec = record.map_err(|e| fail(e.to_string()))?;
        if rec.len() != DUMP_HEADER.len() {
            return Err(fail(format!("row with {} columns", rec.len())));
        }
        let num = |idx: usize, name: &str| -> Result<String, CliError> {
            Ok(rec.get(idx).ok_or_else(|| fail(format!("missing {name}")))?.to_string())
        };
        out.push(PredRow {
            instance_id: num(0, "instance_id")?,
            annotator_id: num(1, "annotator_id")?,
            gold: num(2, "gold")?
                .parse()
                .map_err(|_| fail("unparsable gold label".to_string()))?,
            prob: num(3, "prob")?
                .parse()
                .map_err(|_| fail("unparsable probability".to_string()))?,
            pred: num(4, "pred")?
                .parse()
                .map_err(|_| fail("unparsable predicted label".to_string()))?,
        });
    }
    Ok(out)
}
