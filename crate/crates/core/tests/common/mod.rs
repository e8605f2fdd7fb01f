#![allow(dead_code)]

use std::collections::BTreeMap;

use warpsimons::ambient::{AmbientConfig, AmbientSpec, Interval};
use warpsimons::immersion::{Immersion, ImmersionSpec};

pub fn ambient(epsilon: i32, warp: &str, interval: Interval, fiber_dim: usize, c: f64, s: usize) -> AmbientConfig {
    AmbientConfig::from_spec(AmbientSpec {
        epsilon,
        warp: warp.into(),
        interval,
        fiber_dim,
        fiber_curvature: c,
        fiber_index: s,
        constants: BTreeMap::new(),
    })
    .unwrap()
}

pub fn immersion(params: &[&str], components: &[&str], domain: &[[f64; 2]]) -> Immersion {
    Immersion::from_spec(ImmersionSpec {
        params: params.iter().map(|s| s.to_string()).collect(),
        components: components.iter().map(|s| s.to_string()).collect(),
        domain: domain.to_vec(),
        sample_region: None,
        hyperquadric: false,
        constants: BTreeMap::new(),
    })
    .unwrap()
}

/// A few interior points of a box.
pub fn interior_points(region: &[[f64; 2]]) -> Vec<Vec<f64>> {
    [0.5, 0.2, 0.8, 0.35, 0.65]
        .iter()
        .enumerate()
        .map(|(k, f)| {
            region
                .iter()
                .enumerate()
                .map(|(i, [lo, hi])| {
                    let g = if (i + k) % 2 == 0 { *f } else { 1.0 - f };
                    lo + g * (hi - lo)
                })
                .collect()
        })
        .collect()
}
