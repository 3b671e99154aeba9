//! Text-output conventions shared by every writer in the workspace.

use std::fmt::Write as _;

/// Format a float with 17 significant digits (round-trip exact for binary64).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Render a header plus rows of floats as CSV text.
pub fn csv_table(header: &[&str], columns: &[&[f64]]) -> String {
    let rows = columns.first().map_or(0, |c| c.len());
    let mut out = header.join(",");
    out.push('\n');
    for r in 0..rows {
        for (j, col) in columns.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", fmt_f64(col[r]));
        }
        out.push('\n');
    }
    out
}

/// Parse CSV text produced by [`csv_table`] back into its header and columns.
pub fn parse_csv_table(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> =
        lines.next().ok_or_else(|| "empty CSV".to_string())?.split(',').map(|s| s.trim().to_string()).collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (ln, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(format!("row {} has {} fields, expected {}", ln + 2, fields.len(), header.len()));
        }
        for (c, f) in cols.iter_mut().zip(fields) {
            c.push(f.trim().parse::<f64>().map_err(|e| format!("row {}: {e}", ln + 2))?);
        }
    }
    Ok((header, cols))
}
