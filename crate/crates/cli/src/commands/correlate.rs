//! `correlate`: regress relative improvement on a corpus-size predictor,
//! split into small and large annotator pools.

use crate::commands::write_text;
use crate::error::CliError;
use crate::formats::ledger::{read_ledger, LedgerEntry};
use annomod_core::scaling::{correlate, CorrelateConfig, PartitionOutcome, Predictor};
use std::path::Path;

fn outcome_text(o: &PartitionOutcome) -> String {
    match o {
        PartitionOutcome::Estimate { r, p, n } => {
            format!("r = {r:.4}, p = {p:.4e}, n = {n}")
        }
        PartitionOutcome::Insufficient { n } => format!("insufficient data (n = {n})"),
        PartitionOutcome::ZeroVariance { n } => {
            format!("zero variance (n = {n})")
        }
    }
}

fn outcome_csv(partition: &str, threshold: usize, predictor: Predictor, o: &PartitionOutcome) -> String {
    let (outcome, n, r, p) = match o {
        PartitionOutcome::Estimate { r, p, n } => {
            ("estimate", *n, format!("{r}"), format!("{p}"))
        }
        PartitionOutcome::Insufficient { n } => ("insufficient", *n, String::new(), String::new()),
        PartitionOutcome::ZeroVariance { n } => ("zero_variance", *n, String::new(), String::new()),
    };
    format!(
        "{},{},{},{},{},{},{}\n",
        predictor.name(),
        partition,
        threshold,
        n,
        outcome,
        r,
        p
    )
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    ledger_path: &Path,
    predictor_name: &str,
    threshold: usize,
    max_per_dataset: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let predictor = Predictor::parse(predictor_name).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown predictor '{predictor_name}'; expected instances, annotators, \
             or annotations_per_annotator"
        ))
    })?;

    let entries = read_ledger(ledger_path)?;
    let mut points = Vec::new();
    let mut failed = 0usize;
    for entry in &entries {
        match entry {
            LedgerEntry::Ok(row) => points.push(row.to_scaling_point()),
            LedgerEntry::Failed { .. } => failed += 1,
        }
    }
    if points.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no successful trials to correlate",
            ledger_path.display()
        )));
    }

    let report = correlate(
        &points,
        &CorrelateConfig {
            predictor,
            threshold,
            max_per_dataset,
            seed,
        },
    );

    println!("predictor: {}", predictor.name());
    println!(
        "ledger rows: {} ok, {failed} failed; points used after filtering: {}",
        points.len(),
        report.used_points
    );
    println!(
        "small pools (annotators <= {}): {}",
        report.threshold,
        outcome_text(&report.small)
    );
    println!(
        "large pools (annotators > {}): {}",
        report.threshold,
        outcome_text(&report.large)
    );

    if let Some(path) = out {
        let mut csv = String::from("predictor,partition,threshold,n,outcome,r,p\n");
        csv.push_str(&outcome_csv("small", report.threshold, predictor, &report.small));
        csv.push_str(&outcome_csv("large", report.threshold, predictor, &report.large));
        write_text(path, &csv)?;
    }
    Ok(())
}
