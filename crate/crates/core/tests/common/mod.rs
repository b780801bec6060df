#![allow(dead_code)]

use nilflow::catalog::{self, CatalogEntry};
use nilflow::{BracketSpec, DiagonalMetric};

/// Catalog entries that carry a bracket spec.
pub fn algebra_entries() -> Vec<CatalogEntry> {
    let mut out: Vec<CatalogEntry> = ["h3", "l4", "h5", "p5", "r6"]
        .iter()
        .map(|n| catalog::get(n).unwrap())
        .collect();
    for r in 2..=5 {
        out.push(catalog::heisenberg(r).unwrap());
    }
    out
}

/// Entries with a stored soliton metric.
pub fn soliton_entries() -> Vec<CatalogEntry> {
    algebra_entries().into_iter().filter(|e| e.soliton_metric.is_some()).collect()
}

pub fn spec(e: &CatalogEntry) -> &BracketSpec {
    e.spec.as_ref().unwrap()
}

pub fn metric(e: &CatalogEntry) -> DiagonalMetric {
    e.soliton_metric.clone().unwrap()
}

pub fn rel_err(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

pub fn max_rel_err(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| rel_err(*a, *b)).fold(0.0, f64::max)
}

fn seg_dist(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let ap: Vec<f64> = a.iter().zip(p).map(|(x, y)| y - x).collect();
    let nn: f64 = ab.iter().map(|v| v * v).sum();
    let t = if nn == 0.0 {
        0.0
    } else {
        (ap.iter().zip(&ab).map(|(x, y)| x * y).sum::<f64>() / nn).clamp(0.0, 1.0)
    };
    ap.iter()
        .zip(&ab)
        .map(|(x, y)| (x - t * y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn point_to_polyline(p: &[f64], line: &[Vec<f64>]) -> f64 {
    if line.len() == 1 {
        return seg_dist(p, &line[0], &line[0]);
    }
    line.windows(2).map(|w| seg_dist(p, &w[0], &w[1])).fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between two sampled curves, each read as a
/// polyline.
pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let d1 = a.iter().map(|p| point_to_polyline(p, b)).fold(0.0, f64::max);
    let d2 = b.iter().map(|p| point_to_polyline(p, a)).fold(0.0, f64::max);
    d1.max(d2)
}
