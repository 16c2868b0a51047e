//! File formats: CSV with 17 significant digits, JSON with sorted keys,
//! binary PPM.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use orthocount_core::groups::GroupSpec;
use orthocount_core::perp::{witness_word, OrthoSpectrum};
use orthocount_core::tol::Tolerances;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000e0".into();
    }
    format!("{x:.16e}")
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|source| CliError::Io { path: root.display().to_string(), source })?;
        Ok(OutDir { root: root.to_path_buf() })
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let p = self.root.join(name);
        fs::write(&p, bytes).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
        Ok(p)
    }

    pub fn write_json(&self, name: &str, v: &Value) -> Result<PathBuf, CliError> {
        let mut s = serde_json::to_string_pretty(v).expect("json serializes");
        s.push('\n');
        self.write(name, s.as_bytes())
    }
}

/// Block embedded in every JSON output.
pub fn provenance(cfg: &ExperimentConfig, completeness: &[(&str, &str)]) -> Value {
    let t = Tolerances::DEFAULT;
    let flags: serde_json::Map<String, Value> = completeness.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    json!({
        "config_digest": cfg.digest(),
        "seed": cfg.seed,
        "label": cfg.label,
        "tolerances": {
            "geom_eq": t.geom_eq,
            "det": t.det,
            "limit_t1": t.limit_t1,
            "limit_t2": t.limit_t2,
            "dedup_grid": t.dedup_grid,
            "dedup_confirm": t.dedup_confirm,
            "step_floor": t.step_floor,
        },
        "completeness": flags,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

/// `length,weight,multiplicity,coset_key,witness_word`, one row per record.
pub fn spectrum_csv(spec: &OrthoSpectrum, g: &GroupSpec) -> String {
    let mut s = String::from("length,weight,multiplicity,coset_key,witness_word\n");
    for r in &spec.records {
        let m = if r.multiplicity.den == 1 { format!("{}", r.multiplicity.num) } else { format!("{}/{}", r.multiplicity.num, r.multiplicity.den) };
        let _ = writeln!(s, "{},{},{},{},{}", num(r.perp.length), num(r.weight), m, r.coset_key, quote(&witness_word(g, &r.witness)));
    }
    s
}

/// Quotes a field containing a comma or quote.
pub fn quote(f: &str) -> String {
    if f.contains([',', '"', '\n']) {
        format!("\"{}\"", f.replace('"', "\"\""))
    } else {
        f.to_string()
    }
}

pub fn table_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| num(*x)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}
