//! Column-oriented CSV input and output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Table> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .with_context(|| format!("opening {}", path.display()))?;
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut columns = vec![Vec::new(); headers.len()];
        for (n, rec) in rdr.records().enumerate() {
            let rec = rec?;
            for (k, field) in rec.iter().enumerate() {
                let v: f64 = field
                    .parse()
                    .with_context(|| format!("{}: row {}: bad number '{field}'", path.display(), n + 1))?;
                columns[k].push(v);
            }
        }
        Ok(Table { headers, columns })
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        let i = self.headers.iter().position(|h| h == name)?;
        Some(&self.columns[i])
    }

    /// First column whose name is in `names`.
    pub fn pick(&self, names: &[&str]) -> Result<&[f64]> {
        names
            .iter()
            .find_map(|n| self.column(n))
            .ok_or_else(|| anyhow!("none of the columns {names:?} found (have {:?})", self.headers))
    }
}

/// Write columns under a header; numbers use Rust's locale-independent
/// formatting.
pub fn write_csv(path: &Path, headers: &[&str], columns: &[&[f64]]) -> Result<()> {
    if headers.len() != columns.len() {
        bail!("header/column count mismatch");
    }
    let n = columns.first().map_or(0, |c| c.len());
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(headers)?;
    for i in 0..n {
        w.write_record(columns.iter().map(|c| fmt_num(c[i])))?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip representation, in exponent form outside
/// `[1e-4, 1e9)`.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e9).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Append one JSON object per line.
pub fn write_jsonl(path: &Path, objects: &[serde_json::Value]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for obj in objects {
        serde_json::to_writer(&mut w, obj)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}
