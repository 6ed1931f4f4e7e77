use std::fmt::Write as _;

use specmel_core::metrics::{aggregate, parse_records_csv};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::pipeline::{read_text, write_text, Layout};

/// Plain-text summary of the evaluation tables and the paired comparison.
pub fn report(cfg: &ExperimentConfig) -> CliResult<String> {
    let layout = Layout::new(&cfg.output);
    let records = parse_records_csv(&read_text(&layout.metrics_csv(), "metrics CSV (run `evaluate` first)")?)?;
    let eval = aggregate(records)?;

    let mut out = cfg.provenance();
    out.push_str("\nmacro scores per model\n");
    let _ = writeln!(
        out,
        "{:<8} {:<8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "kind", "variant", "acc", "bal_acc", "prec", "recall", "f1", "loss"
    );
    for ((kind, variant), m) in &eval.by_model {
        let _ = writeln!(
            out,
            "{:<8} {:<8} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            kind.as_str(),
            variant,
            m.accuracy,
            m.balanced_accuracy,
            m.precision,
            m.recall,
            m.f1,
            m.loss
        );
    }
    out.push_str("\nF1 per genre (mean over variants)\n");
    let _ = writeln!(out, "{:<24} {:>8} {:>8}", "genre", "linear", "mel");
    let genres: Vec<&String> = {
        let mut seen = Vec::new();
        for r in &eval.records {
            if !seen.contains(&&r.genre) {
                seen.push(&r.genre);
            }
        }
        seen
    };
    for g in genres {
        let f1 = |kind| {
            eval.by_genre
                .get(&(kind, g.clone()))
                .map_or_else(|| "-".to_string(), |m| format!("{:.4}", m.f1))
        };
        let _ = writeln!(
            out,
            "{:<24} {:>8} {:>8}",
            g,
            f1(specmel_core::dsp::SpectrogramKind::Linear),
            f1(specmel_core::dsp::SpectrogramKind::Mel)
        );
    }
    match std::fs::read_to_string(layout.compare_result()) {
        Ok(text) => {
            out.push_str("\npaired comparison\n");
            for line in text.lines().filter(|l| !l.starts_with('#')) {
                let _ = writeln!(out, "  {line}");
            }
        }
        Err(_) => out.push_str("\npaired comparison: not run\n"),
    }
    write_text(&layout.report(), &out)?;
    print!("{out}");
    Ok(out)
}
