//! File interfaces: posterior-sample CSV input, fixture datasets, events
//! directories, and plot-ready CSV output.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::dpgmm::SampleSet;
use crate::error::{Error, Result};
use crate::evidence::WeightedSampleSet;
use crate::hdpgmm::EventSampleSet;

/// Read a weighted sample set from CSV: a header row with one column per
/// parameter plus required `log_likelihood` and `log_prior` columns.
pub fn read_weighted_samples(path: &Path) -> Result<WeightedSampleSet> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let ll_col = headers
        .iter()
        .position(|h| h == "log_likelihood")
        .ok_or_else(|| Error::input("missing required column `log_likelihood`"))?;
    let lp_col = headers
        .iter()
        .position(|h| h == "log_prior")
        .ok_or_else(|| Error::input("missing required column `log_prior`"))?;
    let param_cols: Vec<usize> = (0..headers.len())
        .filter(|&i| i != ll_col && i != lp_col)
        .collect();
    if param_cols.is_empty() {
        return Err(Error::input("no parameter columns found"));
    }

    let mut rows = Vec::new();
    let mut log_l = Vec::new();
    let mut log_pi = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |col: usize| -> Result<f64> {
            record
                .get(col)
                .ok_or_else(|| {
                    Error::input(format!(
                        "row {}: missing column `{}`",
                        row_idx + 2,
                        &headers[col]
                    ))
                })?
                .parse::<f64>()
                .map_err(|_| {
                    Error::input(format!(
                        "row {}, column `{}`: not a number: {:?}",
                        row_idx + 2,
                        &headers[col],
                        record.get(col).unwrap_or("")
                    ))
                })
        };
        rows.push(
            param_cols
                .iter()
                .map(|&c| parse(c))
                .collect::<Result<Vec<f64>>>()?,
        );
        log_l.push(parse(ll_col)?);
        log_pi.push(parse(lp_col)?);
    }
    if rows.is_empty() {
        return Err(Error::input("no data rows in sample file"));
    }
    WeightedSampleSet::new(SampleSet::from_rows(&rows)?, log_l, log_pi)
}

/// Write posterior draws as a one-column CSV.
pub fn write_draws_csv(path: &Path, draws: &[f64]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "log_z")?;
    for d in draws {
        writeln!(f, "{d}")?;
    }
    Ok(())
}

/// Read a fixture dataset: optional `# seed=<n>` comment header, then a CSV
/// header row and one row per point. Returns (points, seed if present).
pub fn read_fixture_csv(text: &str) -> Result<(Vec<Vec<f64>>, Option<u64>)> {
    let mut seed = None;
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("seed=") {
                seed = v.trim().parse::<u64>().ok();
            }
            continue;
        }
        body.push_str(line);
        body.push('\n');
    }
    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(Error::Csv)?;
        let row = record
            .iter()
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::input(format!("fixture row {}: bad number {v:?}", i + 2)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::input("fixture has no data rows"));
    }
    Ok((rows, seed))
}

/// Render a fixture dataset with its seed comment.
pub fn write_fixture_csv(columns: &[&str], rows: &[Vec<f64>], seed: u64) -> String {
    let mut out = format!("# seed={seed}\n{}\n", columns.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Load an events directory: one sample CSV per event (any `.csv` file; each
/// row is one point, columns are parameters, optional header skipped if
/// non-numeric).
pub fn load_events_dir(dir: &Path) -> Result<Vec<EventSampleSet>> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::input(format!(
            "no .csv event files in {}",
            dir.display()
        )));
    }
    let mut events = Vec::new();
    for p in paths {
        let text = fs::read_to_string(&p)?;
        let (rows, _) = read_fixture_csv(&text)?;
        events.push(EventSampleSet::new(SampleSet::from_rows(&rows)?));
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_csv_roundtrip_and_diagnostics() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("samples.csv");
        let mut f = fs::File::create(&path).unwrap();
        writeln!(f, "x,y,log_likelihood,log_prior").unwrap();
        writeln!(f, "0.1,0.2,-1.5,-2.0").unwrap();
        writeln!(f, "0.3,-0.4,-1.0,-2.1").unwrap();
        drop(f);
        let s = read_weighted_samples(&path).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.log_l()[1], -1.0);

        let bad = dir.path().join("bad.csv");
        let mut f = fs::File::create(&bad).unwrap();
        writeln!(f, "x,log_likelihood").unwrap();
        writeln!(f, "0.1,-1.5").unwrap();
        drop(f);
        let err = read_weighted_samples(&bad).unwrap_err().to_string();
        assert!(err.contains("log_prior"), "got: {err}");

        let malformed = dir.path().join("malformed.csv");
        let mut f = fs::File::create(&malformed).unwrap();
        writeln!(f, "x,log_likelihood,log_prior").unwrap();
        writeln!(f, "0.1,oops,-2.0").unwrap();
        drop(f);
        let err = read_weighted_samples(&malformed).unwrap_err().to_string();
        assert!(err.contains("row 2") && err.contains("log_likelihood"), "got: {err}");
    }

    #[test]
    fn fixture_roundtrip_preserves_seed_and_values() {
        let rows = vec![vec![1.25, -0.5], vec![0.0, 3.75]];
        let text = write_fixture_csv(&["a", "b"], &rows, 99);
        let (parsed, seed) = read_fixture_csv(&text).unwrap();
        assert_eq!(seed, Some(99));
        assert_eq!(parsed, rows);
    }

    #[test]
    fn events_dir_loads_sorted_csvs() {
        let dir = tempfile::tempdir().unwrap();
        for (name, val) in [("b.csv", 2.0), ("a.csv", 1.0)] {
            let mut f = fs::File::create(dir.path().join(name)).unwrap();
            writeln!(f, "x").unwrap();
            writeln!(f, "{val}").unwrap();
            writeln!(f, "{}", val + 0.5).unwrap();
        }
        let events = load_events_dir(dir.path()).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].samples.point(0)[0], 1.0);
    }
}
