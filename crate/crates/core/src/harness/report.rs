//! Report export. Wall times are left out unless asked for, so reports of
//! identical specs are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{HarnessError, Scenario, Verdict, VerificationRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(format!("unknown report format {s:?}")),
        }
    }
}

fn cell_label(cell: &BTreeMap<String, usize>) -> String {
    cell.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

pub fn export_report(records: &[VerificationRecord], format: ReportFormat, timing: bool) -> Result<String, HarnessError> {
    let records: Vec<VerificationRecord> = records
        .iter()
        .cloned()
        .map(|mut r| {
            if !timing {
                r.wall_ms = 0;
            }
            r
        })
        .collect();
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(&records)? + "\n"),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["scenario", "cell", "opponent", "seed_start", "seed_count", "verdict", "units", "failures", "stats", "reproducer"];
            if timing {
                header.push("wall_ms");
            }
            w.write_record(&header)?;
            for r in &records {
                let mut row = vec![
                    r.scenario.to_string(),
                    cell_label(&r.cell),
                    r.opponent.clone().unwrap_or_default(),
                    r.seeds.start.to_string(),
                    r.seeds.count.to_string(),
                    format!("{:?}", r.verdict).to_lowercase(),
                    r.units.to_string(),
                    r.failures.to_string(),
                    serde_json::to_string(&r.stats)?,
                    r.reproducer_path.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
                ];
                if timing {
                    row.push(r.wall_ms.to_string());
                }
                w.write_record(&row)?;
            }
            let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        ReportFormat::Markdown => {
            let mut groups: BTreeMap<Scenario, Vec<&VerificationRecord>> = BTreeMap::new();
            for r in &records {
                groups.entry(r.scenario).or_default().push(r);
            }
            let mut out = String::from("# Verification summary\n");
            for (scenario, rs) in groups {
                let passed = rs.iter().filter(|r| r.verdict == Verdict::Pass).count();
                let _ = write!(out, "\n## {scenario} — {passed}/{} cells pass\n\n", rs.len());
                out.push_str("| cell | opponent | units | failures | verdict |\n|---|---|---|---|---|\n");
                for r in rs {
                    let _ = writeln!(
                        out,
                        "| {} | {} | {} | {} | {} |",
                        cell_label(&r.cell),
                        r.opponent.as_deref().unwrap_or("-"),
                        r.units,
                        r.failures,
                        if r.verdict == Verdict::Pass { "pass" } else { "FAIL" }
                    );
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_experiment, ExperimentSpec};

    #[test]
    fn formats_render_and_hash_stably() {
        let spec = ExperimentSpec::from_json(
            r#"{"name":"r","scenario":"wgame-fuzz","grid":{"w":[1,2]},"seeds":{"start":0,"count":4}}"#,
        )
        .unwrap();
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        for f in [ReportFormat::Csv, ReportFormat::Json, ReportFormat::Markdown] {
            assert_eq!(export_report(&a, f, false).unwrap(), export_report(&b, f, false).unwrap());
        }
        let csv = export_report(&a, ReportFormat::Csv, false).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(export_report(&a, ReportFormat::Markdown, false).unwrap().contains("wgame-fuzz — 2/2"));
    }
}
