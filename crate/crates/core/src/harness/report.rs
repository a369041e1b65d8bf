use thiserror::Error;

use super::trials::Metrics;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("no metrics to report")]
    Empty,
}

fn pct(x: f64) -> String {
    format!("{:.1} %", 100.0 * x)
}

/// Aligned text table, one row per scenario.
pub fn report(metrics: &[Metrics]) -> Result<String, ReportError> {
    if metrics.is_empty() {
        return Err(ReportError::Empty);
    }
    let header = [
        "Scenario",
        "Trials",
        "Success",
        "Mean ticks",
        "Recovery",
        "False success",
    ];
    let rows: Vec<[String; 6]> = metrics
        .iter()
        .map(|m| {
            [
                m.scenario.clone(),
                m.trials.to_string(),
                pct(m.success_rate),
                m.mean_ticks.map_or("-".to_string(), |t| format!("{t:.1}")),
                pct(m.recovery_rate),
                pct(m.false_success_rate),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == 0 {
                    format!("{c:<w$}", w = width[i])
                } else {
                    format!("{c:>w$}", w = width[i])
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(&header.map(String::from));
    out.push('\n');
    out.push_str(&line(&width.map(|w| "-".repeat(w))));
    out.push('\n');
    for row in &rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    Ok(out)
}
