//! `report`: render a ledger as a markdown summary plus one SVG line
//! plot per (dataset, strategy) group, mean individual F1 against the
//! scale variable with a 95% confidence band across runs.
//!
//! The report is a pure function of the ledger file, so regenerating
//! from an archived ledger reproduces every output byte for byte.

use crate::commands::{ensure_dir, write_text};
use crate::error::CliError;
use crate::formats::ledger::{read_ledger, LedgerEntry, LedgerRow};
use crate::plot::{band_line_plot, BandSeries};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Annotators,
    Fraction,
}

impl Kind {
    fn label(self) -> &'static str {
        match self {
            Kind::Annotators => "annotators",
            Kind::Fraction => "fraction",
        }
    }

    fn x_label(self) -> &'static str {
        match self {
            Kind::Annotators => "annotators",
            Kind::Fraction => "annotation fraction",
        }
    }
}

/// Recovers the grid kind from a trial id of the form
/// `dataset:ann:kN:strategy:rR` or `dataset:frac:kN:fP:strategy:rR`.
/// Parsing walks from the end so dataset names may contain colons.
fn kind_of(trial_id: &str) -> Result<Kind, CliError> {
    let segments: Vec<&str> = trial_id.rsplit(':').collect();
    if segments.len() >= 5
        && segments[2].starts_with('f')
        && segments[3].starts_with('k')
        && segments[4] == "frac"
    {
        return Ok(Kind::Fraction);
    }
    if segments.len() >= 4 && segments[2].starts_with('k') && segments[3] == "ann" {
        return Ok(Kind::Annotators);
    }
    Err(CliError::Data(format!(
        "trial id '{trial_id}' does not name a known grid"
    )))
}

/// Scale position of a row: integer sort key and plotted value.
fn x_of(kind: Kind, row: &LedgerRow) -> (u64, f64) {
    match kind {
        Kind::Annotators => (row.num_annotators as u64, row.num_annotators as f64),
        Kind::Fraction => ((row.frac * 100.0).round() as u64, row.frac),
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// 1.96 standard errors across runs; zero when only one run exists.
fn half_width(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
    1.96 * (var / n as f64).sqrt()
}

fn file_safe(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

type GroupKey = (String, String, Kind);

/// Per-x-value cell: the x coordinate plus F1 and improvement samples.
type SeriesCell = (f64, Vec<f64>, Vec<f64>);

pub fn run(ledger_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let entries = read_ledger(ledger_path)?;

    let mut groups: BTreeMap<GroupKey, BTreeMap<u64, SeriesCell>> = BTreeMap::new();
    let mut failed_by_dataset: BTreeMap<String, usize> = BTreeMap::new();
    let mut ok_rows = 0usize;
    let mut failed_rows = 0usize;
    for entry in &entries {
        match entry {
            LedgerEntry::Failed { dataset, .. } => {
                failed_rows += 1;
                *failed_by_dataset.entry(dataset.clone()).or_default() += 1;
            }
            LedgerEntry::Ok(row) => {
                ok_rows += 1;
                let kind = kind_of(&row.trial_id)?;
                let (key, x) = x_of(kind, row);
                let cell = groups
                    .entry((row.dataset.clone(), row.strategy.as_str().to_string(), kind))
                    .or_default()
                    .entry(key)
                    .or_insert((x, Vec::new(), Vec::new()));
                cell.1.push(row.f1_individual);
                cell.2.push(row.rel_improvement_pct);
            }
        }
    }
    if ok_rows == 0 {
        return Err(CliError::Data(format!(
            "{}: no successful trials to report",
            ledger_path.display()
        )));
    }

    ensure_dir(out_dir)?;
    let plots_dir = out_dir.join("plots");
    ensure_dir(&plots_dir)?;

    let ledger_name = ledger_path
        .file_name()
        .map_or_else(|| "ledger".to_string(), |s| s.to_string_lossy().to_string());
    let mut md = String::new();
    md.push_str("# Scaling report\n\n");
    md.push_str(&format!(
        "Source: `{ledger_name}` with {ok_rows} successful and {failed_rows} failed trials.\n\
         Bands are 95% confidence intervals (1.96 standard errors across runs).\n"
    ));

    let mut plots_written = 0usize;
    let mut current_dataset = String::new();
    for ((dataset, strategy, kind), cells) in &groups {
        if *dataset != current_dataset {
            current_dataset = dataset.clone();
            md.push_str(&format!("\n## {dataset}\n\n"));
            if let Some(&n) = failed_by_dataset.get(dataset) {
                md.push_str(&format!("{n} trial(s) failed; see the ledger status column.\n\n"));
            }
            md.push_str("| strategy | grid | scale points | trials | mean F1 at max scale | mean improvement % |\n");
            md.push_str("|---|---|---|---|---|---|\n");
        }

        let mut series = BandSeries {
            x: Vec::with_capacity(cells.len()),
            mean: Vec::with_capacity(cells.len()),
            half: Vec::with_capacity(cells.len()),
        };
        let mut trials = 0usize;
        let mut improvements = Vec::new();
        for (x, f1s, imps) in cells.values() {
            series.x.push(*x);
            series.mean.push(mean(f1s));
            series.half.push(half_width(f1s));
            trials += f1s.len();
            improvements.extend_from_slice(imps);
        }

        let file = format!(
            "{}-{}-{}.svg",
            file_safe(dataset),
            file_safe(strategy),
            kind.label()
        );
        let title = format!("{dataset} / {strategy}");
        let svg = band_line_plot(&title, kind.x_label(), "individual macro-F1", &series);
        write_text(&plots_dir.join(&file), &svg)?;
        plots_written += 1;

        md.push_str(&format!(
            "| {strategy} | {} | {} | {trials} | {:.4} | {:.2} |\n",
            kind.label(),
            series.x.len(),
            series.mean.last().copied().unwrap_or(f64::NAN),
            mean(&improvements)
        ));
    }

    md.push_str("\n## Plots\n");
    for (dataset, strategy, kind) in groups.keys() {
        let file = format!(
            "{}-{}-{}.svg",
            file_safe(dataset),
            file_safe(strategy),
            kind.label()
        );
        md.push_str(&format!(
            "\n![{dataset} {strategy} {}](plots/{file})\n",
            kind.label()
        ));
    }

    write_text(&out_dir.join("report.md"), &md)?;
    println!(
        "wrote {} and {plots_written} plot(s) under {}",
        out_dir.join("report.md").display(),
        plots_dir.display()
    );
    Ok(())
}
