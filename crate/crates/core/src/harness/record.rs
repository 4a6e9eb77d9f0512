//! Run results and their on-disk forms: CSV rows, a JSON summary sidecar
//! and an optional gnuplot data file.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

pub const PPDC_HEADER: &str = "z_mm,ppdc,ppdc_oracle,edge_intensity";
pub const TPTS_HEADER: &str =
    "j1_per_mm,j2_per_mm,ratio,delta_d_um,seed,s_t,s_t_closed_form,edge_intensity";

#[derive(Debug, Clone, PartialEq)]
pub struct PpdcRow {
    pub z_mm: f64,
    pub ppdc: f64,
    /// Bulk momentum-space value; absent for gapless or b-sublattice runs.
    pub ppdc_oracle: Option<f64>,
    pub edge_intensity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TptsRow {
    pub j1_per_mm: f64,
    pub j2_per_mm: f64,
    pub ratio: f64,
    pub delta_d_um: Option<f64>,
    pub seed: Option<u64>,
    pub s_t: f64,
    pub s_t_closed_form: f64,
    pub edge_intensity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rows {
    Ppdc(Vec<PpdcRow>),
    Tpts(Vec<TptsRow>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub argmax_index: usize,
    pub argmax_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Summary {
    Winding {
        nu_raw: f64,
        nu_rounded: i64,
        center: f64,
        spread: f64,
    },
    Transition {
        argmax_index: usize,
        argmax_ratio: f64,
    },
    Ensemble {
        runs: Vec<SeedSummary>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub config_hash: String,
    /// Disorder seed of a single disordered run.
    pub seed: Option<u64>,
    pub rows: Rows,
    pub summary: Summary,
    /// Every evaluated distribution kept its boundary-cell intensity under tolerance.
    pub light_cone_ok: bool,
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or large magnitudes.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl RunRecord {
    /// CSV text; floats use shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.rows {
            Rows::Ppdc(rows) => {
                out.push_str(PPDC_HEADER);
                out.push('\n');
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        num(r.z_mm),
                        num(r.ppdc),
                        opt_num(r.ppdc_oracle),
                        num(r.edge_intensity)
                    );
                }
            }
            Rows::Tpts(rows) => {
                out.push_str(TPTS_HEADER);
                out.push('\n');
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        num(r.j1_per_mm),
                        num(r.j2_per_mm),
                        num(r.ratio),
                        opt_num(r.delta_d_um),
                        r.seed.map(|s| s.to_string()).unwrap_or_default(),
                        num(r.s_t),
                        num(r.s_t_closed_form),
                        num(r.edge_intensity)
                    );
                }
            }
        }
        out
    }

    /// Sidecar JSON: provenance plus the run summary.
    pub fn summary_json(&self) -> String {
        let doc = serde_json::json!({
            "config_hash": self.config_hash,
            "seed": self.seed,
            "light_cone_ok": self.light_cone_ok,
            "summary": self.summary,
        });
        serde_json::to_string_pretty(&doc).expect("summary serializes")
    }

    /// Whitespace-separated columns; ensemble seeds become separate data
    /// blocks so gnuplot can address them with `index`.
    pub fn to_gnuplot(&self) -> String {
        let mut out = format!("# config {}\n", self.config_hash);
        match &self.rows {
            Rows::Ppdc(rows) => {
                out.push_str("# z_mm ppdc ppdc_oracle edge_intensity\n");
                for r in rows {
                    let oracle = r.ppdc_oracle.map_or("NaN".to_string(), num);
                    let _ = writeln!(
                        out,
                        "{} {} {} {}",
                        num(r.z_mm),
                        num(r.ppdc),
                        oracle,
                        num(r.edge_intensity)
                    );
                }
            }
            Rows::Tpts(rows) => {
                out.push_str("# ratio s_t s_t_closed_form delta_d_um\n");
                let mut last_seed = rows.first().and_then(|r| r.seed);
                for r in rows {
                    if r.seed != last_seed {
                        out.push_str("\n\n");
                        last_seed = r.seed;
                    }
                    let dd = r.delta_d_um.map_or("NaN".to_string(), num);
                    let _ = writeln!(
                        out,
                        "{} {} {} {}",
                        num(r.ratio),
                        num(r.s_t),
                        num(r.s_t_closed_form),
                        dd
                    );
                }
            }
        }
        out
    }
}

/// `out.csv` → `out.summary.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

/// `out.csv` → `out.dat`.
pub fn gnuplot_path(csv: &Path) -> PathBuf {
    csv.with_extension("dat")
}

/// Writes via a temporary sibling and a rename, so a failed write leaves no
/// partial file behind.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// Writes the CSV at `path` and the summary sidecar next to it.
pub fn emit_csv(record: &RunRecord, path: &Path) -> Result<()> {
    write_atomic(path, &record.to_csv())?;
    write_atomic(&sidecar_path(path), &record.summary_json())
}

pub fn emit_gnuplot(record: &RunRecord, csv_path: &Path) -> Result<PathBuf> {
    let path = gnuplot_path(csv_path);
    write_atomic(&path, &record.to_gnuplot())?;
    Ok(path)
}
