//! The JSON interchange format for state-space quadruples.
//!
//! A system file is a single object with the dimensions `n`, `m`, `p`, the
//! four matrices as nested row arrays, and an optional `name`.  Numbers are
//! written in shortest round-trip decimal form, so `parse ∘ write` restores
//! every entry bit for bit.

use std::path::Path;

use geozero::geometry::StateSpaceSystem;
use geozero::matkit::Mat;
use geozero::TolerancePolicy;
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemFile {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

fn grid_to_mat(field: &str, rows: usize, cols: usize, grid: &[Vec<f64>]) -> Result<Mat, Failure> {
    if grid.len() != rows {
        return Err(Failure::validation(format!(
            "matrix {field} has {} rows, expected {rows}",
            grid.len()
        )));
    }
    let mut out = Mat::zeros(rows, cols);
    for (i, row) in grid.iter().enumerate() {
        if row.len() != cols {
            return Err(Failure::validation(format!(
                "matrix {field} row {} has {} entries, expected {cols}",
                i + 1,
                row.len()
            )));
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Failure::validation(format!(
                    "matrix {field} entry ({}, {}) is not finite",
                    i + 1,
                    j + 1
                )));
            }
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

fn mat_to_grid(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl SystemFile {
    pub fn from_parts(name: Option<String>, a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Self {
        Self {
            n: a.nrows(),
            m: b.ncols(),
            p: c.nrows(),
            a: mat_to_grid(a),
            b: mat_to_grid(b),
            c: mat_to_grid(c),
            d: mat_to_grid(d),
            name,
        }
    }

    pub fn from_system(name: Option<String>, sys: &StateSpaceSystem) -> Self {
        Self::from_parts(name, sys.a(), sys.b(), sys.c(), sys.d())
    }

    pub fn to_matrices(&self) -> Result<(Mat, Mat, Mat, Mat), Failure> {
        Ok((
            grid_to_mat("A", self.n, self.n, &self.a)?,
            grid_to_mat("B", self.n, self.m, &self.b)?,
            grid_to_mat("C", self.p, self.n, &self.c)?,
            grid_to_mat("D", self.p, self.m, &self.d)?,
        ))
    }

    /// Shape and finiteness validation only — for quadruples (compensators,
    /// cascades) that legitimately fail the plant rank conditions.
    pub fn to_quadruple(&self) -> Result<StateSpaceSystem, Failure> {
        let (a, b, c, d) = self.to_matrices()?;
        StateSpaceSystem::assemble(a, b, c, d).map_err(Failure::from)
    }

    /// Full plant validation: shapes, finiteness, `B` of full column rank
    /// and `[C D]` of full row rank.
    pub fn to_plant(&self, tol: &TolerancePolicy) -> Result<StateSpaceSystem, Failure> {
        let (a, b, c, d) = self.to_matrices()?;
        StateSpaceSystem::new(a, b, c, d, tol).map_err(Failure::from)
    }

    /// Deterministic rendering with one matrix row per line.  Numbers use
    /// shortest round-trip decimal form, so parsing the output restores the
    /// exact bit pattern of every entry.
    pub fn to_json(&self) -> String {
        fn number(v: f64) -> String {
            serde_json::to_string(&v).expect("finite number")
        }
        fn matrix_entry(label: &str, grid: &[Vec<f64>]) -> String {
            let rows: Vec<String> = grid
                .iter()
                .map(|row| {
                    let cells: Vec<String> = row.iter().map(|&v| number(v)).collect();
                    format!("    [{}]", cells.join(", "))
                })
                .collect();
            format!("  \"{label}\": [\n{}\n  ]", rows.join(",\n"))
        }

        let mut entries = vec![
            format!("  \"n\": {}", self.n),
            format!("  \"m\": {}", self.m),
            format!("  \"p\": {}", self.p),
            matrix_entry("A", &self.a),
            matrix_entry("B", &self.b),
            matrix_entry("C", &self.c),
            matrix_entry("D", &self.d),
        ];
        if let Some(name) = &self.name {
            entries.push(format!(
                "  \"name\": {}",
                serde_json::to_string(name).expect("string")
            ));
        }
        format!("{{\n{}\n}}\n", entries.join(",\n"))
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|err| {
            Failure::validation(format!("cannot read {}: {err}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|err| {
            Failure::validation(format!(
                "malformed system file {} at line {}, column {}: {err}",
                path.display(),
                err.line(),
                err.column()
            ))
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), Failure> {
        std::fs::write(path, self.to_json()).map_err(|err| {
            Failure::validation(format!("cannot write {}: {err}", path.display()))
        })
    }
}
