//! Per-genre binary classification metrics and macro aggregation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::dsp::SpectrogramKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion(predictions: &[bool], truth: &[bool]) -> Result<ConfusionCounts> {
    if predictions.len() != truth.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} labels",
            predictions.len(),
            truth.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    let mut c = ConfusionCounts::default();
    for (&p, &t) in predictions.iter().zip(truth) {
        match (p, t) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// Ratios whose denominator was zero (and were therefore reported as 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ZeroDivision {
    pub precision: bool,
    pub recall: bool,
    pub specificity: bool,
    pub f1: bool,
}

impl ZeroDivision {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.specificity || self.f1
    }

    /// `|`-joined flag names, or `-` when none are set.
    pub fn to_field(&self) -> String {
        let names: Vec<&str> = [
            (self.precision, "precision"),
            (self.recall, "recall"),
            (self.specificity, "specificity"),
            (self.f1, "f1"),
        ]
        .iter()
        .filter(|(set, _)| *set)
        .map(|(_, n)| *n)
        .collect();
        if names.is_empty() {
            "-".to_string()
        } else {
            names.join("|")
        }
    }

    pub fn from_field(s: &str) -> Result<Self> {
        let mut z = ZeroDivision::default();
        if s == "-" || s.is_empty() {
            return Ok(z);
        }
        for name in s.split('|') {
            match name {
                "precision" => z.precision = true,
                "recall" => z.recall = true,
                "specificity" => z.specificity = true,
                "f1" => z.f1 = true,
                other => return Err(Error::Parse(format!("unknown zero-division flag {other:?}"))),
            }
        }
        Ok(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricValues {
    pub accuracy: f64,
    pub balanced_accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub zero_division: ZeroDivision,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// Threshold metrics from counts. Undefined ratios are 0 and flagged.
pub fn compute_metrics(c: &ConfusionCounts) -> Result<MetricValues> {
    let total = c.total();
    if total == 0 {
        return Err(Error::EmptyEvaluation);
    }
    let (precision, zp) = ratio(c.tp, c.tp + c.fp);
    let (recall, zr) = ratio(c.tp, c.tp + c.fn_);
    let (specificity, zs) = ratio(c.tn, c.tn + c.fp);
    let (f1, zf) = if precision + recall == 0.0 {
        (0.0, true)
    } else {
        (2.0 * precision * recall / (precision + recall), false)
    };
    Ok(MetricValues {
        accuracy: (c.tp + c.tn) as f64 / total as f64,
        balanced_accuracy: (recall + specificity) / 2.0,
        precision,
        recall,
        f1,
        zero_division: ZeroDivision {
            precision: zp,
            recall: zr,
            specificity: zs,
            f1: zf,
        },
    })
}

/// Evaluation result for one (genre, kind, variant) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord {
    pub genre: String,
    pub kind: SpectrogramKind,
    pub variant: String,
    pub values: MetricValues,
    /// Mean binary cross-entropy over the evaluated samples.
    pub loss: f64,
}

impl MetricRecord {
    pub fn new(genre: impl Into<String>, kind: SpectrogramKind, variant: impl Into<String>, values: MetricValues, loss: f64) -> Self {
        Self {
            genre: genre.into(),
            kind,
            variant: variant.into(),
            values,
            loss,
        }
    }
}

/// Unweighted means over a group of records.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MacroMetrics {
    pub count: usize,
    pub accuracy: f64,
    pub balanced_accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub loss: f64,
}

impl MacroMetrics {
    fn of<'a>(records: impl IntoIterator<Item = &'a MetricRecord>) -> Self {
        let mut m = MacroMetrics::default();
        for r in records {
            m.count += 1;
            m.accuracy += r.values.accuracy;
            m.balanced_accuracy += r.values.balanced_accuracy;
            m.precision += r.values.precision;
            m.recall += r.values.recall;
            m.f1 += r.values.f1;
            m.loss += r.loss;
        }
        let n = m.count as f64;
        m.accuracy /= n;
        m.balanced_accuracy /= n;
        m.precision /= n;
        m.recall /= n;
        m.f1 /= n;
        m.loss /= n;
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub records: Vec<MetricRecord>,
    /// Macro means per (kind, variant): one entry per model.
    pub by_model: BTreeMap<(SpectrogramKind, String), MacroMetrics>,
    /// Means per (kind, genre) across variants.
    pub by_genre: BTreeMap<(SpectrogramKind, String), MacroMetrics>,
}

pub fn aggregate(records: Vec<MetricRecord>) -> Result<EvalReport> {
    if records.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    let mut model_groups: BTreeMap<(SpectrogramKind, String), Vec<&MetricRecord>> = BTreeMap::new();
    let mut genre_groups: BTreeMap<(SpectrogramKind, String), Vec<&MetricRecord>> = BTreeMap::new();
    for r in &records {
        model_groups.entry((r.kind, r.variant.clone())).or_default().push(r);
        genre_groups.entry((r.kind, r.genre.clone())).or_default().push(r);
    }
    let by_model = model_groups
        .into_iter()
        .map(|(k, v)| (k, MacroMetrics::of(v)))
        .collect();
    let by_genre = genre_groups
        .into_iter()
        .map(|(k, v)| (k, MacroMetrics::of(v)))
        .collect();
    Ok(EvalReport {
        records,
        by_model,
        by_genre,
    })
}

pub const RECORD_CSV_HEADER: &str =
    "genre,kind,variant,accuracy,balanced_accuracy,precision,recall,f1,loss,zero_division_flags";
const MACRO_CSV_HEADER: &str = "accuracy,balanced_accuracy,precision,recall,f1,loss,count";

fn macro_fields(m: &MacroMetrics) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        m.accuracy, m.balanced_accuracy, m.precision, m.recall, m.f1, m.loss, m.count
    )
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl EvalReport {
    /// One row per cell, in record order. Floats use shortest round-trip form.
    pub fn records_csv(&self) -> String {
        let mut out = format!("{RECORD_CSV_HEADER}\n");
        for r in &self.records {
            let v = &r.values;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                quote(&r.genre),
                r.kind,
                quote(&r.variant),
                v.accuracy,
                v.balanced_accuracy,
                v.precision,
                v.recall,
                v.f1,
                r.loss,
                v.zero_division.to_field()
            );
        }
        out
    }

    pub fn macro_csv(&self) -> String {
        let mut out = format!("kind,variant,{MACRO_CSV_HEADER}\n");
        for ((kind, variant), m) in &self.by_model {
            let _ = writeln!(out, "{kind},{},{}", quote(variant), macro_fields(m));
        }
        out
    }

    pub fn genre_csv(&self) -> String {
        let mut out = format!("kind,genre,{MACRO_CSV_HEADER}\n");
        for ((kind, genre), m) in &self.by_genre {
            let _ = writeln!(out, "{kind},{},{}", quote(genre), macro_fields(m));
        }
        out
    }
}

/// Parse the per-cell CSV written by [`EvalReport::records_csv`]. Lines
/// starting with `#` are skipped.
pub fn parse_records_csv(text: &str) -> Result<Vec<MetricRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let want: Vec<&str> = RECORD_CSV_HEADER.split(',').collect();
    if headers.iter().collect::<Vec<_>>() != want {
        return Err(Error::Parse(format!("metrics CSV header must be {RECORD_CSV_HEADER}")));
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("metrics row {}: {e}", i + 2)))?;
        let num = |j: usize| -> Result<f64> {
            rec[j]
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("metrics row {}: bad number {:?}", i + 2, &rec[j])))
        };
        out.push(MetricRecord {
            genre: rec[0].to_string(),
            kind: rec[1].parse()?,
            variant: rec[2].to_string(),
            values: MetricValues {
                accuracy: num(3)?,
                balanced_accuracy: num(4)?,
                precision: num(5)?,
                recall: num(6)?,
                f1: num(7)?,
                zero_division: ZeroDivision::from_field(&rec[9])?,
            },
            loss: num(8)?,
        });
    }
    Ok(out)
}
