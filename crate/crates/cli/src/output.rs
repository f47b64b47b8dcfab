use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::CliError;

/// A CSV file: header plus pre-formatted rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// `%.17g`: 17 significant digits, trailing zeros dropped.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn int(x: impl Into<i128>) -> String {
    x.into().to_string()
}

pub fn flag(b: bool) -> String {
    b.to_string()
}

/// `<out>/<experiment>/<label or timestamp>`, created fresh.
pub fn run_directory(out: &Path, experiment: &str, label: Option<&str>) -> Result<PathBuf, CliError> {
    let base = out.join(experiment);
    let dir = match label {
        Some(l) => base.join(l),
        None => {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let mut candidate = base.join(format!("run-{secs}"));
            let mut k = 1;
            while candidate.exists() {
                candidate = base.join(format!("run-{secs}-{k}"));
                k += 1;
            }
            candidate
        }
    };
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

pub fn write_table(dir: &Path, table: &Table, digest: &str, seed: u64) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{}.csv", table.name));
    let io = |e: &dyn std::fmt::Display| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header).map_err(|e| io(&e))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| io(&e))?;
    }
    let mut bytes = w.into_inner().map_err(|e| io(&e))?;
    bytes.extend_from_slice(format!("# config_sha256={digest} seed={seed}\n").as_bytes());
    fs::write(&path, bytes).map_err(|e| io(&e))?;
    Ok(path)
}

pub fn write_summary(dir: &Path, summary: &serde_json::Value) -> Result<PathBuf, CliError> {
    let path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(2.0), "2");
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(2.0 - 2f64.sqrt()), "0.58578643762690485");
        assert_eq!(num(-1.5e-9), "-1.5e-09");
        assert_eq!(num(1e20), "1e+20");
        assert_eq!(num(123456.75), "123456.75");
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-7, 6.02e23, -7.25] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }
}
