//! Parametrized submanifolds `u ↦ (t(u), x(u))` of a warped product.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ambient::{hyperquadric_to_chart_jets, AmbientConfig, ChartPoint};
use crate::error::{GeomError, Result};
use crate::exprlang::{parse, Expr, JetEnv};
use crate::jets::{Jet, JetShape, MAX_VARS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImmersionSpec {
    /// Parameter names, one per dimension of the submanifold.
    pub params: Vec<String>,
    /// The `t` component first, then either the `N` conformal chart
    /// coordinates or, with `hyperquadric`, the `N + 1` flat coordinates of
    /// the fiber hyperquadric (pole coordinate first).
    pub components: Vec<String>,
    /// Open parameter box.
    pub domain: Vec<[f64; 2]>,
    /// Sub-box used for sampling; defaults to the domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_region: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub hyperquadric: bool,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct Immersion {
    spec: ImmersionSpec,
    exprs: Vec<Expr>,
}

fn check_box(name: &str, b: &[[f64; 2]], n: usize) -> Result<()> {
    if b.len() != n {
        return Err(GeomError::Config(format!("{name} has {} intervals for {n} parameters", b.len())));
    }
    for [lo, hi] in b {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(GeomError::Config(format!("{name} interval [{lo}, {hi}] is empty or unbounded")));
        }
    }
    Ok(())
}

impl Immersion {
    pub fn from_spec(spec: ImmersionSpec) -> Result<Self> {
        let n = spec.params.len();
        if n == 0 || n > MAX_VARS {
            return Err(GeomError::Config(format!("need between 1 and {MAX_VARS} parameters, got {n}")));
        }
        for (i, p) in spec.params.iter().enumerate() {
            if spec.params[..i].contains(p) || spec.constants.contains_key(p) {
                return Err(GeomError::Config(format!("parameter `{p}` is declared twice")));
            }
        }
        check_box("domain", &spec.domain, n)?;
        if let Some(region) = &spec.sample_region {
            check_box("sample_region", region, n)?;
            for ([lo, hi], [dlo, dhi]) in region.iter().zip(&spec.domain) {
                if lo < dlo || hi > dhi {
                    return Err(GeomError::Config("sample_region is not inside the domain".into()));
                }
            }
        }
        if spec.components.len() < 2 {
            return Err(GeomError::Config("an immersion needs a t component and fiber components".into()));
        }
        let declared: Vec<&str> =
            spec.params.iter().map(String::as_str).chain(spec.constants.keys().map(String::as_str)).collect();
        let exprs = spec
            .components
            .iter()
            .enumerate()
            .map(|(k, src)| {
                parse(src, &declared).map_err(|source| GeomError::Parse { what: format!("component {k}"), source })
            })
            .collect::<Result<_>>()?;
        Ok(Self { spec, exprs })
    }

    /// Builds an immersion from already parsed components.
    pub fn from_exprs(spec: ImmersionSpec, exprs: Vec<Expr>) -> Result<Self> {
        let mut imm =
            Self::from_spec(ImmersionSpec { components: exprs.iter().map(|e| e.to_string()).collect(), ..spec })?;
        imm.exprs = exprs;
        Ok(imm)
    }

    pub fn spec(&self) -> &ImmersionSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.params.len()
    }

    pub fn params(&self) -> &[String] {
        &self.spec.params
    }

    pub fn components(&self) -> &[Expr] {
        &self.exprs
    }

    pub fn domain(&self) -> &[[f64; 2]] {
        &self.spec.domain
    }

    pub fn sample_region(&self) -> &[[f64; 2]] {
        self.spec.sample_region.as_deref().unwrap_or(&self.spec.domain)
    }

    pub fn in_domain(&self, u: &[f64]) -> bool {
        u.len() == self.dim() && u.iter().zip(&self.spec.domain).all(|(v, [lo, hi])| v > lo && v < hi)
    }

    /// Checks the component count against the ambient fiber dimension.
    pub fn check_against(&self, cfg: &AmbientConfig) -> Result<()> {
        let expected = 1 + cfg.fiber_dim() + usize::from(self.spec.hyperquadric);
        if self.exprs.len() != expected {
            return Err(GeomError::Config(format!(
                "immersion has {} components, the ambient needs {expected}",
                self.exprs.len()
            )));
        }
        if self.dim() > cfg.fiber_dim() {
            return Err(GeomError::Config(format!(
                "submanifold dimension {} exceeds the fiber dimension {}",
                self.dim(),
                cfg.fiber_dim()
            )));
        }
        if self.spec.hyperquadric && cfg.fiber_curvature() == 0.0 {
            return Err(GeomError::Config("hyperquadric components need a curved fiber".into()));
        }
        Ok(())
    }

    /// Chart coordinates `(t, x)` as jets in the parameters at `u`.
    pub fn chart_jets(&self, cfg: &AmbientConfig, u: &[f64], degree: usize) -> Result<(Jet, Vec<Jet>)> {
        self.check_against(cfg)?;
        if !self.in_domain(u) {
            return Err(GeomError::ChartDomain(format!("parameter point {u:?} is outside the domain")));
        }
        let shape = JetShape::new(self.dim(), degree)?;
        let mut env = JetEnv::new(shape);
        for (name, value) in &self.spec.constants {
            env = env.with_const(name, *value);
        }
        for (i, name) in self.spec.params.iter().enumerate() {
            env = env.with_seed(name, i, u[i])?;
        }
        let mut jets: Vec<Jet> = self.exprs.iter().map(|e| e.eval_jet(&env)).collect::<Result<_, _>>()?;
        let t = jets.remove(0);
        let x = if self.spec.hyperquadric {
            hyperquadric_to_chart_jets(cfg.fiber_curvature(), cfg.fiber_index(), &jets)?
        } else {
            jets
        };
        Ok((t, x))
    }

    pub fn chart_point(&self, cfg: &AmbientConfig, u: &[f64]) -> Result<ChartPoint> {
        let (t, x) = self.chart_jets(cfg, u, 0)?;
        Ok(ChartPoint::new(t.value(), x.iter().map(Jet::value).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{AmbientSpec, Interval};

    fn sphere_ambient() -> AmbientConfig {
        AmbientConfig::from_spec(AmbientSpec {
            epsilon: 1,
            warp: "1".into(),
            interval: Interval::REAL_LINE,
            fiber_dim: 2,
            fiber_curvature: 1.0,
            fiber_index: 0,
            constants: BTreeMap::new(),
        })
        .unwrap()
    }

    fn spec(components: &[&str], hyperquadric: bool) -> ImmersionSpec {
        ImmersionSpec {
            params: vec!["u".into()],
            components: components.iter().map(|s| s.to_string()).collect(),
            domain: vec![[-1.0, 1.0]],
            sample_region: None,
            hyperquadric,
            constants: BTreeMap::from([("r".to_string(), 0.5)]),
        }
    }

    #[test]
    fn hyperquadric_components_reach_the_chart() {
        let cfg = sphere_ambient();
        let imm = Immersion::from_spec(spec(&["0", "cos(r)", "sin(r)*cos(u)", "sin(r)*sin(u)"], true)).unwrap();
        let p = imm.chart_point(&cfg, &[0.3]).unwrap();
        let rho = 2.0 * 0.5f64.sin() / (1.0 + 0.5f64.cos());
        assert!((p.x[0] - rho * 0.3f64.cos()).abs() < 1e-15);
        assert!((p.x[1] - rho * 0.3f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let cfg = sphere_ambient();
        assert!(Immersion::from_spec(spec(&["0", "v"], false)).is_err());
        let imm = Immersion::from_spec(spec(&["0", "u"], false)).unwrap();
        assert!(imm.check_against(&cfg).is_err());
        let imm = Immersion::from_spec(spec(&["0", "u", "0"], false)).unwrap();
        assert!(matches!(imm.chart_point(&cfg, &[1.5]), Err(GeomError::ChartDomain(_))));
        let mut bad = spec(&["0", "u", "0"], false);
        bad.sample_region = Some(vec![[-2.0, 0.0]]);
        assert!(Immersion::from_spec(bad).is_err());
    }
}
