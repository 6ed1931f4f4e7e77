use std::collections::BTreeMap;
use std::path::Path;

use specmel_core::dsp::SpectrogramKind;
use specmel_core::metrics::{parse_records_csv, MetricRecord};
use specmel_core::stats::{paired_comparison, PairedSample, PairedTestResult};

use crate::config::{CompareMetric, ExperimentConfig, Pairing};
use crate::error::{CliError, CliResult};
use crate::pipeline::{read_text, write_text, Layout};

fn score(r: &MetricRecord, metric: CompareMetric) -> f64 {
    let v = &r.values;
    match metric {
        CompareMetric::Accuracy => v.accuracy,
        CompareMetric::BalancedAccuracy => v.balanced_accuracy,
        CompareMetric::Precision => v.precision,
        CompareMetric::Recall => v.recall,
        CompareMetric::F1 => v.f1,
        CompareMetric::Loss => r.loss,
    }
}

/// Linear-kind scores as `a`, mel-kind scores as `b`, matched per pairing unit.
pub fn pair_records(records: &[MetricRecord], pairing: Pairing, metric: CompareMetric) -> CliResult<PairedSample> {
    // (variant, genre) -> [linear, mel]
    let mut cells: BTreeMap<(String, String), [Option<f64>; 2]> = BTreeMap::new();
    for r in records {
        let slot = match r.kind {
            SpectrogramKind::Linear => 0,
            SpectrogramKind::Mel => 1,
        };
        let entry = cells.entry((r.variant.clone(), r.genre.clone())).or_default();
        if entry[slot].replace(score(r, metric)).is_some() {
            return Err(CliError::Validation(format!(
                "duplicate {} record for {}/{}",
                r.kind, r.variant, r.genre
            )));
        }
    }
    let mut labels = Vec::new();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let complete = |(variant, genre): &(String, String), pair: &[Option<f64>; 2]| match pair {
        [Some(x), Some(y)] => Ok((*x, *y)),
        _ => Err(CliError::Validation(format!(
            "{variant}/{genre} lacks a score for both spectrogram kinds"
        ))),
    };
    match pairing {
        Pairing::Cell => {
            for (key, pair) in &cells {
                let (x, y) = complete(key, pair)?;
                labels.push(format!("{}/{}", key.0, key.1));
                a.push(x);
                b.push(y);
            }
        }
        Pairing::Model => {
            let mut models: BTreeMap<&str, (f64, f64, usize)> = BTreeMap::new();
            for (key, pair) in &cells {
                let (x, y) = complete(key, pair)?;
                let m = models.entry(key.0.as_str()).or_default();
                m.0 += x;
                m.1 += y;
                m.2 += 1;
            }
            for (variant, (x, y, n)) in models {
                labels.push(variant.to_string());
                a.push(x / n as f64);
                b.push(y / n as f64);
            }
        }
    }
    if a.len() < PairedSample::MIN_LEN {
        return Err(CliError::Validation(format!(
            "{pairing} pairing yields {} pairs; at least {} are needed",
            a.len(),
            PairedSample::MIN_LEN
        )));
    }
    Ok(PairedSample::new(labels, a, b)?)
}

/// Paired comparison of a metrics CSV; writes the result document and Q-Q CSV
/// under the configured output root.
pub fn compare_csv(cfg: &ExperimentConfig, csv_path: &Path) -> CliResult<PairedTestResult> {
    let records = parse_records_csv(&read_text(csv_path, "metrics CSV (run `evaluate` first)")?)?;
    let sample = pair_records(&records, cfg.pairing, cfg.compare_metric)?;
    let result = paired_comparison(&sample)?;
    let header = vec![
        ("config_hash".to_string(), cfg.hash()),
        ("seed".to_string(), cfg.seed.to_string()),
        ("pairing".to_string(), cfg.pairing.to_string()),
        ("metric".to_string(), cfg.compare_metric.as_str().to_string()),
        ("difference".to_string(), "linear - mel".to_string()),
    ];
    let layout = Layout::new(&cfg.output);
    write_text(&layout.compare_result(), &result.to_text(&header))?;
    write_text(&layout.qq_csv(), &format!("{}{}", cfg.provenance(), result.qq_csv()))?;
    println!(
        "compare: n = {}, t = {:.4}, df = {}, p = {:.4}; Shapiro-Wilk W = {:.4}, p = {:.4}",
        result.n, result.t_statistic, result.degrees_of_freedom, result.p_value, result.shapiro_w, result.shapiro_p
    );
    if result.shapiro_p < 0.05 {
        eprintln!("note: differences depart from normality (Shapiro-Wilk p < 0.05)");
    }
    Ok(result)
}

pub fn compare(cfg: &ExperimentConfig) -> CliResult<PairedTestResult> {
    cfg.validate()?;
    compare_csv(cfg, &Layout::new(&cfg.output).metrics_csv())
}

#[cfg(test)]
mod tests {
    use super::*;
    use specmel_core::metrics::{compute_metrics, ConfusionCounts};

    fn record(genre: &str, kind: SpectrogramKind, variant: &str, tp: u64) -> MetricRecord {
        let values = compute_metrics(&ConfusionCounts { tp, fp: 1, tn: 10, fn_: 2 }).unwrap();
        MetricRecord::new(genre, kind, variant, values, 0.3)
    }

    #[test]
    fn cell_and_model_pairing() {
        let mut records = Vec::new();
        for v in ["b32", "b64", "b96"] {
            for (g, tp) in [("Rock", 3), ("Jazz", 5)] {
                records.push(record(g, SpectrogramKind::Linear, v, tp));
                records.push(record(g, SpectrogramKind::Mel, v, tp + 1));
            }
        }
        let cell = pair_records(&records, Pairing::Cell, CompareMetric::F1).unwrap();
        assert_eq!(cell.len(), 6);
        assert_eq!(cell.labels()[0], "b32/Jazz");
        let model = pair_records(&records, Pairing::Model, CompareMetric::Recall).unwrap();
        assert_eq!(model.len(), 3);
        records.pop();
        assert!(pair_records(&records, Pairing::Cell, CompareMetric::F1).is_err());
    }
}
