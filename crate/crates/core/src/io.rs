//! Versioned text formats. Node indices are 1-based in every file.
//!
//! JSON documents carry `"format_version": 1`. Floats are written in the
//! shortest decimal form that parses back to the same bits.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::apps::compression::CompressedSignal;
use crate::error::{HgspError, Result};
use crate::hypergraph::Hypergraph;
use crate::sampling::SamplingPlan;
use crate::spectrum::Spectrum;
use crate::symtensor::Signal;

pub const FORMAT_VERSION: u32 = 1;

fn format_err(field: impl Into<String>, message: impl Into<String>) -> HgspError {
    HgspError::Format {
        field: field.into(),
        message: message.into(),
    }
}

fn check_version(v: u32, what: &str) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(format_err(
            format!("{what}.format_version"),
            format!("unsupported version {v}, expected {FORMAT_VERSION}"),
        ));
    }
    Ok(())
}

fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        format_err(what, format!("line {} column {}: {e}", e.line(), e.column()))
    })
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("plain data serializes");
    s.push('\n');
    s
}

fn check_finite(values: &[f64], field: &str) -> Result<()> {
    match values.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(format_err(format!("{field}[{}]", i + 1), "value is not finite")),
        None => Ok(()),
    }
}

fn matrix_from_rows(rows: &[Vec<f64>], ncols: usize, field: &str) -> Result<DMatrix<f64>> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(format_err(
                format!("{field}[{}]", i + 1),
                format!("row has {} entries, expected {ncols}", row.len()),
            ));
        }
        check_finite(row, &format!("{field}[{}]", i + 1))?;
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn one_based(indices: &[usize], n: usize, field: &str) -> Result<Vec<usize>> {
    indices
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if x == 0 || x > n {
                Err(format_err(
                    format!("{field}[{}]", i + 1),
                    format!("index {x} out of range 1..={n}"),
                ))
            } else {
                Ok(x - 1)
            }
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HypergraphDoc {
    format_version: u32,
    num_nodes: usize,
    hyperedges: Vec<Vec<usize>>,
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let doc: HypergraphDoc = parse_json(text, "hypergraph")?;
    check_version(doc.format_version, "hypergraph")?;
    Hypergraph::from_one_based(doc.num_nodes, doc.hyperedges)
}

pub fn format_hypergraph(h: &Hypergraph) -> String {
    to_json(&HypergraphDoc {
        format_version: FORMAT_VERSION,
        num_nodes: h.num_nodes(),
        hyperedges: h
            .edges()
            .iter()
            .map(|e| e.iter().map(|i| i + 1).collect())
            .collect(),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumDoc {
    format_version: u32,
    order: usize,
    dim: usize,
    lambdas: Vec<f64>,
    basis: Vec<Vec<f64>>,
    residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    extracted: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eigen_residuals: Option<Vec<Option<f64>>>,
}

pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    let doc: SpectrumDoc = parse_json(text, "spectrum")?;
    check_version(doc.format_version, "spectrum")?;
    let n = doc.dim;
    if doc.lambdas.len() != n {
        return Err(format_err(
            "spectrum.lambdas",
            format!("has {} entries, expected dim = {n}", doc.lambdas.len()),
        ));
    }
    if doc.basis.len() != n {
        return Err(format_err(
            "spectrum.basis",
            format!("has {} rows, expected dim = {n}", doc.basis.len()),
        ));
    }
    check_finite(&doc.lambdas, "spectrum.lambdas")?;
    check_finite(&[doc.residual], "spectrum.residual")?;
    if doc.lambdas.windows(2).any(|w| w[0] < w[1]) {
        return Err(format_err("spectrum.lambdas", "must be sorted non-increasing"));
    }
    let basis = matrix_from_rows(&doc.basis, n, "spectrum.basis")?;
    let extracted = doc.extracted.unwrap_or_else(|| vec![true; n]);
    let sp = Spectrum::with_extracted(
        doc.order,
        basis,
        DVector::from_vec(doc.lambdas),
        extracted,
        doc.residual,
    )
    .map_err(|e| format_err("spectrum", e.to_string()))?;
    match doc.eigen_residuals {
        Some(r) => sp
            .with_eigen_residuals(r)
            .map_err(|e| format_err("spectrum.eigen_residuals", e.to_string())),
        None => Ok(sp),
    }
}

pub fn format_spectrum(sp: &Spectrum) -> String {
    let all = sp.rank() == sp.dim();
    let known = sp.eigen_residuals().iter().any(Option::is_some);
    to_json(&SpectrumDoc {
        format_version: FORMAT_VERSION,
        order: sp.order(),
        dim: sp.dim(),
        lambdas: sp.coeffs().iter().copied().collect(),
        basis: matrix_rows(sp.basis()),
        residual: sp.residual(),
        extracted: (!all).then(|| sp.extracted_mask().to_vec()),
        eigen_residuals: known.then(|| sp.eigen_residuals().to_vec()),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanDoc {
    format_version: u32,
    spectrum_id: String,
    bandwidth: usize,
    indices: Vec<usize>,
    recovery: Vec<Vec<f64>>,
}

/// Plans are validated against the spectrum they were built from.
pub fn parse_plan(text: &str, sp: &Spectrum) -> Result<SamplingPlan> {
    let doc: PlanDoc = parse_json(text, "plan")?;
    check_version(doc.format_version, "plan")?;
    let indices = one_based(&doc.indices, sp.dim(), "plan.indices")?;
    let z = matrix_from_rows(&doc.recovery, indices.len(), "plan.recovery")?;
    SamplingPlan::from_parts(sp, indices, doc.bandwidth, z, doc.spectrum_id)
}

pub fn format_plan(plan: &SamplingPlan) -> String {
    to_json(&PlanDoc {
        format_version: FORMAT_VERSION,
        spectrum_id: plan.spectrum_id().to_string(),
        bandwidth: plan.bandwidth(),
        indices: plan.indices().iter().map(|i| i + 1).collect(),
        recovery: matrix_rows(plan.recovery()),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompressedDoc {
    format_version: u32,
    spectrum_id: String,
    dim: usize,
    lossless: bool,
    mse: f64,
    coeffs: Vec<f64>,
}

pub fn parse_compressed(text: &str) -> Result<CompressedSignal> {
    let doc: CompressedDoc = parse_json(text, "compressed")?;
    check_version(doc.format_version, "compressed")?;
    check_finite(&doc.coeffs, "compressed.coeffs")?;
    check_finite(&[doc.mse], "compressed.mse")?;
    if doc.coeffs.is_empty() || doc.coeffs.len() > doc.dim {
        return Err(format_err(
            "compressed.coeffs",
            format!("has {} entries, expected 1..={}", doc.coeffs.len(), doc.dim),
        ));
    }
    Ok(CompressedSignal {
        coeffs: DVector::from_vec(doc.coeffs),
        dim: doc.dim,
        lossless: doc.lossless,
        mse: doc.mse,
        spectrum_id: doc.spectrum_id,
    })
}

pub fn format_compressed(c: &CompressedSignal) -> String {
    to_json(&CompressedDoc {
        format_version: FORMAT_VERSION,
        spectrum_id: c.spectrum_id.clone(),
        dim: c.dim,
        lossless: c.lossless,
        mse: c.mse,
        coeffs: c.coeffs.iter().copied().collect(),
    })
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// One real value per line; blank lines and `#` comments are skipped.
pub fn parse_signal(text: &str) -> Result<Signal> {
    let mut values = Vec::new();
    for (line, l) in data_lines(text) {
        let v: f64 = l
            .parse()
            .map_err(|_| format_err(format!("line {line}"), format!("cannot parse {l:?} as a number")))?;
        if !v.is_finite() {
            return Err(format_err(format!("line {line}"), "value is not finite"));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(format_err("signal", "no values"));
    }
    Ok(DVector::from_vec(values))
}

pub fn format_signal(s: &DVector<f64>) -> String {
    s.iter().map(|x| format!("{x:?}\n")).collect()
}

/// One label per line: `1`, `-1`, or `0` for unlabeled.
pub fn parse_labels(text: &str) -> Result<Vec<i8>> {
    let mut out = Vec::new();
    for (line, l) in data_lines(text) {
        let v: i8 = match l {
            "1" | "+1" => 1,
            "-1" => -1,
            "0" => 0,
            _ => {
                return Err(format_err(
                    format!("line {line}"),
                    format!("label {l:?} must be 1, -1 or 0"),
                ))
            }
        };
        out.push(v);
    }
    if out.is_empty() {
        return Err(format_err("labels", "no values"));
    }
    Ok(out)
}

pub fn format_labels(labels: &[i8]) -> String {
    labels.iter().map(|l| format!("{l}\n")).collect()
}

/// Reads a file, naming the path on failure.
pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| format_err(path.display().to_string(), e.to_string()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| format_err(path.display().to_string(), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::adjacency_tensor;
    use crate::sampling::build_plan;
    use crate::spectrum::{decompose, DecomposeOptions};

    const FIG7B: &str = r#"{"format_version": 1, "num_nodes": 7,
        "hyperedges": [[1, 4, 6], [2, 3], [5, 6, 7]]}"#;

    #[test]
    fn hypergraph_round_trip() {
        let h = parse_hypergraph(FIG7B).unwrap();
        assert_eq!(h.num_nodes(), 7);
        assert_eq!(h.edges()[1], vec![1, 2]);
        assert_eq!(parse_hypergraph(&format_hypergraph(&h)).unwrap(), h);
    }

    #[test]
    fn hypergraph_errors_name_fields() {
        let e = parse_hypergraph(r#"{"format_version": 2, "num_nodes": 3, "hyperedges": []}"#).unwrap_err();
        assert!(e.to_string().contains("format_version"));
        let e = parse_hypergraph("{\n\"format_version\": 1,\n\"num_nodes\": \"x\"}").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        assert!(parse_hypergraph(r#"{"format_version": 1, "num_nodes": 3, "hyperedges": [[1, 4]]}"#).is_err());
    }

    #[test]
    fn spectrum_round_trip_is_bit_exact() {
        let h = parse_hypergraph(FIG7B).unwrap();
        let sp = decompose(&adjacency_tensor(&h), &DecomposeOptions::default()).unwrap();
        let back = parse_spectrum(&format_spectrum(&sp)).unwrap();
        assert_eq!(back, sp);
        assert_eq!(back.id(), sp.id());
    }

    #[test]
    fn spectrum_rejects_ragged_and_non_finite() {
        let ragged = r#"{"format_version":1,"order":3,"dim":2,"lambdas":[1,0],"basis":[[1,0],[0]],"residual":0}"#;
        let e = parse_spectrum(ragged).unwrap_err();
        assert!(e.to_string().contains("basis[2]"), "{e}");
        let huge = r#"{"format_version":1,"order":3,"dim":1,"lambdas":[1e999],"basis":[[1]],"residual":0}"#;
        assert!(parse_spectrum(huge).is_err());
        let unsorted = r#"{"format_version":1,"order":3,"dim":2,"lambdas":[0,1],"basis":[[1,0],[0,1]],"residual":0}"#;
        assert!(parse_spectrum(unsorted).is_err());
    }

    #[test]
    fn plan_round_trip() {
        let h = parse_hypergraph(FIG7B).unwrap();
        let sp = decompose(&adjacency_tensor(&h), &DecomposeOptions::default()).unwrap();
        let plan = build_plan(&sp, 2, 3).unwrap();
        assert_eq!(parse_plan(&format_plan(&plan), &sp).unwrap(), plan);
    }

    #[test]
    fn signal_and_labels() {
        let s = parse_signal("1.5\n# comment\n\n-2\n3e-1\n").unwrap();
        assert_eq!(s.as_slice(), &[1.5, -2.0, 0.3]);
        assert_eq!(parse_signal(&format_signal(&s)).unwrap(), s);
        let e = parse_signal("1\nNaN\n").unwrap_err();
        assert!(e.to_string().contains("line 2"));
        assert!(parse_signal("1\ninf\n").is_err());
        assert!(parse_signal("1\nabc\n").is_err());
        let l = parse_labels("1\n0\n-1\n").unwrap();
        assert_eq!(l, vec![1, 0, -1]);
        assert_eq!(parse_labels(&format_labels(&l)).unwrap(), l);
        assert!(parse_labels("2\n").is_err());
    }

    #[test]
    fn float_format_round_trips_bits() {
        let s = DVector::from_vec(vec![0.1 + 0.2, 1.0 / 3.0, -1e-300, 12345.678901234567]);
        assert_eq!(parse_signal(&format_signal(&s)).unwrap(), s);
    }
}
