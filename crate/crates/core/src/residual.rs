//! Residuals of pointwise identities and their aggregation into reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::GeomError;

/// Absolute defect of one identity at one point, with the size of the
/// quantities it compares.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Residual {
    pub abs: f64,
    /// Largest magnitude among the compared terms.
    pub scale: f64,
    /// Named sub-terms, reported for diagnosis.
    pub terms: BTreeMap<String, f64>,
    pub labels: BTreeMap<String, String>,
}

impl Residual {
    pub fn new(abs: f64, scale: f64) -> Self {
        Self { abs, scale, ..Self::default() }
    }

    /// Residual of `lhs = Σ terms`, scaled by the largest term.
    pub fn from_terms(lhs: (&str, f64), terms: &[(&str, f64)]) -> Self {
        let rhs: f64 = terms.iter().map(|(_, v)| v).sum();
        let scale = terms.iter().fold(lhs.1.abs(), |m, (_, v)| m.max(v.abs()));
        let mut named: BTreeMap<String, f64> = terms.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        named.insert(lhs.0.to_string(), lhs.1);
        Self { abs: (lhs.1 - rhs).abs(), scale, terms: named, labels: BTreeMap::new() }
    }

    /// Componentwise comparison of two arrays.
    pub fn compare(lhs: &[f64], rhs: &[f64]) -> Self {
        let mut r = Self::default();
        r.absorb_arrays(lhs, rhs);
        r
    }

    pub fn absorb_arrays(&mut self, lhs: &[f64], rhs: &[f64]) {
        for (a, b) in lhs.iter().zip(rhs) {
            self.abs = self.abs.max((a - b).abs());
            self.scale = self.scale.max(a.abs()).max(b.abs());
        }
    }

    /// Keeps the worse of two residuals.
    pub fn merge(&mut self, other: &Residual) {
        self.abs = self.abs.max(other.abs);
        self.scale = self.scale.max(other.scale);
        for (k, v) in &other.terms {
            self.terms.entry(k.clone()).or_insert(*v);
        }
    }

    /// `abs / max(1, scale)`.
    pub fn rel(&self) -> f64 {
        self.abs / self.scale.max(1.0)
    }

    pub fn with_term(mut self, name: &str, value: f64) -> Self {
        self.terms.insert(name.to_string(), value);
        self
    }

    pub fn with_label(mut self, name: &str, value: &str) -> Self {
        self.labels.insert(name.to_string(), value.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub u: Vec<f64>,
    pub abs: Option<f64>,
    pub rel: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub terms: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One named check over a set of sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub points: Vec<PointResult>,
    pub max_rel: f64,
    pub tol: f64,
    pub pass: bool,
}

impl IdentityReport {
    /// Aggregates per-point outcomes. A point that failed to evaluate makes
    /// the whole check fail.
    pub fn from_points(name: &str, tol: f64, points: Vec<(Vec<f64>, Result<Residual, GeomError>)>) -> Self {
        let mut max_rel: f64 = 0.0;
        let mut pass = !points.is_empty();
        let points = points
            .into_iter()
            .map(|(u, r)| match r {
                Ok(r) => {
                    let rel = r.rel();
                    if rel.is_nan() || rel > tol {
                        pass = false;
                    }
                    max_rel = if rel.is_nan() { f64::INFINITY } else { max_rel.max(rel) };
                    PointResult { u, abs: Some(r.abs), rel: Some(rel), terms: r.terms, labels: r.labels, error: None }
                }
                Err(e) => {
                    pass = false;
                    PointResult {
                        u,
                        abs: None,
                        rel: None,
                        terms: BTreeMap::new(),
                        labels: BTreeMap::new(),
                        error: Some(e.to_string()),
                    }
                }
            })
            .collect();
        Self { name: name.to_string(), points, max_rel, tol, pass }
    }
}
