//! Surface CSV, atomic file writes and the plot script.

use std::io::Write;
use std::path::{Path, PathBuf};

use srg_bode::GainRecord;
use tempfile::NamedTempFile;

use crate::error::CliError;

pub const SURFACE_HEADER: [&str; 7] = [
    "omega",
    "U",
    "r_omega_A",
    "r_partial_omega_A",
    "A_bound",
    "gamma",
    "feasible",
];

/// One CSV row; the subset of [`GainRecord`] that is written to disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceRow {
    pub omega: f64,
    pub u: f64,
    pub r_omega_a: f64,
    pub r_partial_omega_a: f64,
    pub a_bound: f64,
    pub gamma: f64,
    pub feasible: bool,
}

impl From<&GainRecord> for SurfaceRow {
    fn from(r: &GainRecord) -> Self {
        SurfaceRow {
            omega: r.omega,
            u: r.u,
            r_omega_a: r.r_omega_a,
            r_partial_omega_a: r.r_partial_omega_a,
            a_bound: r.a_bound,
            gamma: r.gamma,
            feasible: r.feasible,
        }
    }
}

impl SurfaceRow {
    /// Fields the CSV does not carry are NaN.
    pub fn to_record(&self) -> GainRecord {
        GainRecord {
            omega: self.omega,
            u: self.u,
            r_omega_a: self.r_omega_a,
            r_partial_omega_a: self.r_partial_omega_a,
            a_bound: self.a_bound,
            gamma: self.gamma,
            r_omega_inf: f64::NAN,
            r_partial_omega_inf: f64::NAN,
            bisection_iters: 0,
            feasible: self.feasible,
        }
    }
}

/// Shortest round-trip decimal; infinities as `inf` / `-inf`.
pub fn format_float(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

pub fn parse_float(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}

pub fn surface_csv(rows: &[SurfaceRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Csv(e.to_string());
    w.write_record(SURFACE_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            format_float(r.omega),
            format_float(r.u),
            format_float(r.r_omega_a),
            format_float(r.r_partial_omega_a),
            format_float(r.a_bound),
            format_float(r.gamma),
            r.feasible.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Csv(e.to_string()))
}

pub fn read_surface_csv(text: &str) -> Result<Vec<SurfaceRow>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| CliError::Csv(e.to_string()))?;
    if header.iter().ne(SURFACE_HEADER) {
        return Err(CliError::Csv(format!(
            "expected header `{}`",
            SURFACE_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Csv(e.to_string()))?;
        let bad = |col: &str| CliError::Csv(format!("row {}: invalid `{col}`", line + 1));
        let num = |i: usize| parse_float(&rec[i]).ok_or_else(|| bad(SURFACE_HEADER[i]));
        rows.push(SurfaceRow {
            omega: num(0)?,
            u: num(1)?,
            r_omega_a: num(2)?,
            r_partial_omega_a: num(3)?,
            a_bound: num(4)?,
            gamma: num(5)?,
            feasible: rec[6].trim().parse().map_err(|_| bad("feasible"))?,
        });
    }
    Ok(rows)
}

/// `|R_LTI(j omega)|` rows.
pub fn lti_csv(rows: &[(f64, f64)]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Csv(e.to_string());
    w.write_record(["omega", "lti_gain"]).map_err(csv_err)?;
    for (omega, gain) in rows {
        w.write_record([format_float(*omega), format_float(*gain)])
            .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Csv(e.to_string()))
}

/// Files staged in memory and written together by [`OutputSet::commit`].
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl OutputSet {
    pub fn add(&mut self, name: impl Into<PathBuf>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    /// Writes every file to `dir` through a temp file and rename.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, contents) in self.files {
            let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
            tmp.write_all(&contents)
                .and_then(|_| tmp.as_file().sync_all())
                .map_err(|e| CliError::io(tmp.path(), e))?;
            staged.push((dir.join(name), tmp));
        }
        let mut written = Vec::with_capacity(staged.len());
        for (path, tmp) in staged {
            tmp.persist(&path).map_err(|e| CliError::io(&path, e.error))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Renders gamma and A_bound surfaces from `surface.csv` next to the script.
pub const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plot the certified gain and amplitude surfaces from surface.csv."""
import csv
import math
import os
import sys

import matplotlib.pyplot as plt
import numpy as np


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    omegas = sorted({float(r["omega"]) for r in rows})
    energies = sorted({float(r["U"]) for r in rows if math.isfinite(float(r["U"])) and float(r["U"]) > 0})
    gamma = np.full((len(energies), len(omegas)), np.nan)
    amp = np.full_like(gamma, np.nan)
    wi = {w: i for i, w in enumerate(omegas)}
    ui = {u: i for i, u in enumerate(energies)}
    for r in rows:
        u = float(r["U"])
        if u not in ui or r["feasible"] != "true":
            continue
        i, j = ui[u], wi[float(r["omega"])]
        gamma[i, j] = float(r["gamma"])
        amp[i, j] = float(r["A_bound"])
    return np.array(omegas), np.array(energies), gamma, amp


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "surface.csv")
    omegas, energies, gamma, amp = load(path)
    W, U = np.meshgrid(np.log10(omegas), np.log10(energies))
    fig = plt.figure(figsize=(12, 5))
    for k, (z, label) in enumerate([(gamma, r"$\gamma_{\omega,U}$"), (amp, r"$A_{\omega,U}$")]):
        ax = fig.add_subplot(1, 2, k + 1, projection="3d")
        ax.plot_surface(W, U, np.log10(z), cmap="viridis")
        ax.set_xlabel(r"$\log_{10}\omega$")
        ax.set_ylabel(r"$\log_{10}U$")
        ax.set_zlabel(r"$\log_{10}$ " + label)
    fig.tight_layout()
    out = os.path.join(os.path.dirname(path), "surface.png")
    fig.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main()
"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            SurfaceRow {
                omega: 0.1,
                u: 1e-3,
                r_omega_a: 2.9983342,
                r_partial_omega_a: 1.0 / 3.0,
                a_bound: 0.0123,
                gamma: 0.333,
                feasible: true,
            },
            SurfaceRow {
                omega: 2.0,
                u: f64::INFINITY,
                r_omega_a: 0.0,
                r_partial_omega_a: 0.0,
                a_bound: f64::INFINITY,
                gamma: f64::INFINITY,
                feasible: false,
            },
        ];
        let bytes = surface_csv(&rows).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.starts_with("omega,U,r_omega_A,r_partial_omega_A,A_bound,gamma,feasible\n"));
        assert!(text.contains("2,inf,0,0,inf,inf,false"));
        assert_eq!(read_surface_csv(&text).unwrap(), rows);
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(read_surface_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn commit_writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputSet::default();
        out.add("a.txt", "one");
        out.add("b.txt", "two");
        let written = out.commit(&dir.path().join("nested")).unwrap();
        assert_eq!(written.len(), 2);
        assert_eq!(std::fs::read_to_string(&written[1]).unwrap(), "two");
        let leftovers = std::fs::read_dir(dir.path().join("nested")).unwrap().count();
        assert_eq!(leftovers, 2);
    }
}
