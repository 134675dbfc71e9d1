//! Deterministic CSV emission: fixed per-kind schemas and a stable float
//! format so identical runs produce identical bytes.

use std::io::Write;
use std::path::Path;

use crate::errors::CliError;

/// 17 significant digits; round-trips every f64 and never varies by locale.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

/// Row provenance carried on every record.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub spec_name: String,
    pub seed: u64,
    /// First 12 hex chars of the SHA-256 of the spec file bytes.
    pub spec_hash: String,
}

impl Provenance {
    pub fn new(spec_name: &str, seed: u64, spec_bytes: &[u8]) -> Self {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(spec_bytes);
        let mut hash = String::with_capacity(12);
        for b in digest.iter().take(6) {
            hash.push_str(&format!("{b:02x}"));
        }
        Provenance { spec_name: spec_name.to_string(), seed, spec_hash: hash }
    }
}

/// An in-memory CSV with the shared provenance prefix columns.
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    data_width: usize,
}

impl CsvTable {
    pub fn new(kind_cols: &[&str]) -> Self {
        let mut header: Vec<String> =
            ["spec_name", "engine", "seed", "spec_sha256_12"].iter().map(|s| s.to_string()).collect();
        header.extend(kind_cols.iter().map(|s| s.to_string()));
        CsvTable { header, rows: Vec::new(), data_width: kind_cols.len() }
    }

    pub fn push_row(&mut self, prov: &Provenance, engine: &str, cells: Vec<String>) {
        assert_eq!(cells.len(), self.data_width, "row width must match the declared schema");
        let mut row = vec![prov.spec_name.clone(), engine.to_string(), prov.seed.to_string(), prov.spec_hash.clone()];
        row.extend(cells);
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory CSV write cannot fail");
        for row in &self.rows {
            w.write_record(row).expect("in-memory CSV write cannot fail");
        }
        w.into_inner().expect("in-memory CSV flush cannot fail")
    }

    pub fn write_to(&self, path: &Path) -> Result<(), CliError> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)
                    .map_err(|e| CliError::io(format!("creating {}", parent.display()), e))?;
            }
        }
        let mut f = std::fs::File::create(path)
            .map_err(|e| CliError::io(format!("creating {}", path.display()), e))?;
        f.write_all(&self.to_bytes())
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))
    }
}
