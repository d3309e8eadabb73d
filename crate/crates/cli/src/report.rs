use std::collections::BTreeMap;
use std::fmt::Write;

use forecastability::analytics::{StratumRow, TercileTable, TriageAction, TriageLabel, ValidationSummary};
use forecastability::domain::Frequency;
use forecastability::ingest::Reject;

pub const REPORT: &str = "report.md";

pub struct ReportInput<'a> {
    pub frequency: Frequency,
    pub survivors: usize,
    pub rejects: &'a [Reject],
    pub summaries: &'a [ValidationSummary],
    pub terciles: &'a [TercileTable],
    pub strata: &'a [(String, Vec<StratumRow>)],
    pub triage: &'a [TriageLabel],
}

fn cell(v: Option<f64>) -> String {
    v.map_or("n/a".to_string(), |x| format!("{x:.3}"))
}

pub fn render(input: &ReportInput<'_>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Forecastability report: {}\n", input.frequency);

    let mut by_gate: BTreeMap<&str, usize> = BTreeMap::new();
    for r in input.rejects {
        *by_gate.entry(r.gate.as_str()).or_default() += 1;
    }
    let _ = writeln!(s, "## Panel\n");
    let _ = writeln!(s, "- survivors: {}", input.survivors);
    let _ = writeln!(s, "- rejected: {}", input.rejects.len());
    for (gate, n) in &by_gate {
        let _ = writeln!(s, "  - {gate}: {n}");
    }

    let _ = writeln!(s, "\n## Spearman rho between AMI(h) and sMAPE(h)\n");
    let _ = writeln!(s, "| model | mean | median | pooled | horizons |");
    let _ = writeln!(s, "|---|---|---|---|---|");
    for v in input.summaries {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} |",
            v.model,
            cell(Some(v.mean_rho)),
            cell(Some(v.median_rho)),
            cell(v.pooled_rho),
            v.per_h.len()
        );
    }

    let _ = writeln!(s, "\n## Median sMAPE (%) by AMI tercile\n");
    let _ = writeln!(s, "| model | low | mid | high |");
    let _ = writeln!(s, "|---|---|---|---|");
    for t in input.terciles {
        let get = |name: &str| t.rows.iter().find(|r| r.tercile.as_str() == name).map(|r| r.median_smape);
        let _ = writeln!(s, "| {} | {} | {} | {} |", t.model, cell(get("low")), cell(get("mid")), cell(get("high")));
    }

    let _ = writeln!(s, "\n## Mean rho by training-length tercile\n");
    let _ = writeln!(s, "| model | short | medium | long |");
    let _ = writeln!(s, "|---|---|---|---|");
    for (model, rows) in input.strata {
        let get = |name: &str| rows.iter().find(|r| r.stratum.length_label() == name).map(|r| r.rho);
        let _ = writeln!(s, "| {model} | {} | {} | {} |", cell(get("short")), cell(get("medium")), cell(get("long")));
    }

    let _ = writeln!(s, "\n## Triage\n");
    let _ = writeln!(s, "| action | series |");
    let _ = writeln!(s, "|---|---|");
    for action in [
        TriageAction::InvestInModelling,
        TriageAction::ModelCautiously,
        TriageAction::ManageUncertainty,
    ] {
        let n = input.triage.iter().filter(|l| l.action == action).count();
        let _ = writeln!(s, "| {} | {n} |", action.as_str());
    }
    s
}
