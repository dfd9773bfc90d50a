//! JSON instance specifications and their validation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use gapbound_core::graphs::{
    cycle_subgraph, hypercube_subgraph, induce_subgraph, path_subgraph, ConvexSubgraph, GraphError, HomogeneousGraph,
};
use gapbound_core::groups::{Element, GroupSpec};
use gapbound_core::operators::Potential;
use gapbound_core::Tolerances;

/// The only schema version understood.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema {0}, expected {SCHEMA_VERSION}")]
    Schema(u32),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn invalid(msg: impl Into<String>) -> SpecError {
    SpecError::Invalid(msg.into())
}

/// Which vertices of the host form S.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SubgraphSelector {
    /// Every vertex of the host given by `group` and `generators`.
    Full,
    /// Explicit host vertex ids.
    Vertices(Vec<usize>),
    /// Path on `n` vertices (own host).
    Path(usize),
    /// Cycle `C_n` (own host).
    Cycle(usize),
    /// Hypercube `Q_n` (own host).
    Hypercube(usize),
    /// Vertices `x` of the hypercube host with `x & mask == value & mask`.
    Subcube { mask: usize, value: usize },
}

impl SubgraphSelector {
    fn owns_host(&self) -> bool {
        matches!(self, Self::Path(_) | Self::Cycle(_) | Self::Hypercube(_))
    }
}

/// Potential for `H = L + W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `W = 0`: the Laplacian itself.
    None,
    /// Boundary edge counts (Dirichlet condition).
    Boundary,
    /// Explicit values by position in sorted host-id order.
    Values(Vec<f64>),
    /// `W(x) = c (p(x) - center)^2` where `p(x)` is the position along a path.
    Quadratic { c: f64, center: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Spectrum,
    Bounds,
    Heat,
    Moduli,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub schema: u32,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub generators: Option<Vec<Element>>,
    pub subgraph: SubgraphSelector,
    #[serde(default = "default_potential")]
    pub potential: PotentialSpec,
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_potential() -> PotentialSpec {
    PotentialSpec::None
}

/// A validated instance ready for computation.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: Option<String>,
    pub subgraph: ConvexSubgraph,
    /// `None` for the plain Laplacian.
    pub potential: Option<Potential>,
    pub analyses: Vec<Analysis>,
    pub tolerances: Tolerances,
}

impl InstanceSpec {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Validates every field and builds the host and subgraph.
    pub fn build(&self) -> Result<Instance, SpecError> {
        if self.schema != SCHEMA_VERSION {
            return Err(SpecError::Schema(self.schema));
        }
        if self.analyses.is_empty() {
            return Err(invalid("at least one analysis must be requested"));
        }
        let mut analyses = self.analyses.clone();
        analyses.sort();
        analyses.dedup();
        if analyses.len() != self.analyses.len() {
            return Err(invalid("analyses contain duplicates"));
        }
        validate_tolerances(&self.tolerances)?;

        let subgraph = if self.subgraph.owns_host() {
            if self.group.is_some() || self.generators.is_some() {
                return Err(invalid(
                    "named families define their own host; drop group and generators",
                ));
            }
            match self.subgraph {
                SubgraphSelector::Path(n) => path_subgraph(n)?,
                SubgraphSelector::Cycle(n) => cycle_subgraph(n)?,
                SubgraphSelector::Hypercube(n) => hypercube_subgraph(n)?,
                _ => unreachable!(),
            }
        } else {
            let (Some(group), Some(gens)) = (&self.group, &self.generators) else {
                return Err(invalid("this subgraph selector needs both group and generators"));
            };
            let host = Arc::new(HomogeneousGraph::from_spec(group, gens)?);
            match &self.subgraph {
                SubgraphSelector::Full => host.full_subgraph(),
                SubgraphSelector::Vertices(vs) => induce_subgraph(&host, vs)?,
                SubgraphSelector::Subcube { mask, value } => {
                    let dim = host
                        .hypercube_dimension()
                        .ok_or_else(|| invalid("subcube selector needs a hypercube host"))?;
                    if *mask >> dim != 0 {
                        return Err(invalid(format!("subcube mask {mask:#b} exceeds dimension {dim}")));
                    }
                    let target = value & mask;
                    let vs: Vec<usize> = (0..host.order()).filter(|&x| x & mask == target).collect();
                    induce_subgraph(&host, &vs)?
                }
                _ => unreachable!(),
            }
        };

        if subgraph.len() < 2 {
            return Err(invalid("the subgraph needs at least two vertices to have a gap"));
        }

        let potential = match &self.potential {
            PotentialSpec::None => None,
            PotentialSpec::Boundary => Some(Potential::BoundaryInduced),
            PotentialSpec::Values(v) => {
                if v.len() != subgraph.len() {
                    return Err(invalid(format!(
                        "potential has {} values, subgraph has {} vertices",
                        v.len(),
                        subgraph.len()
                    )));
                }
                if let Some((i, w)) = v.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
                    return Err(invalid(format!(
                        "potential value {w} at position {i} is not a non-negative number"
                    )));
                }
                Some(Potential::Values(v.clone()))
            }
            PotentialSpec::Quadratic { c, center } => {
                if !(c.is_finite() && *c >= 0.0 && center.is_finite()) {
                    return Err(invalid("quadratic potential needs finite c >= 0 and a finite center"));
                }
                let order = subgraph
                    .path_order()
                    .ok_or_else(|| invalid("quadratic potential is only defined on paths"))?;
                let mut w = vec![0.0; subgraph.len()];
                for (p, &x) in order.iter().enumerate() {
                    w[x] = c * (p as f64 - center).powi(2);
                }
                Some(Potential::Values(w))
            }
        };

        Ok(Instance {
            name: self.name.clone(),
            subgraph,
            potential,
            analyses,
            tolerances: self.tolerances,
        })
    }
}

/// Every tolerance must be a positive finite number and the sweep cap positive.
pub fn validate_tolerances(t: &Tolerances) -> Result<(), SpecError> {
    let fields = [
        ("jacobi_threshold", t.jacobi_threshold),
        ("residual", t.residual),
        ("orthonormality", t.orthonormality),
        ("certificate", t.certificate),
        ("trace", t.trace),
        ("tie", t.tie),
        ("zero", t.zero),
        ("verify", t.verify),
        ("ratio_identity", t.ratio_identity),
        ("decay_rate", t.decay_rate),
    ];
    if let Some((name, v)) = fields.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
        return Err(invalid(format!("tolerance {name} = {v} must be positive and finite")));
    }
    if t.jacobi_max_sweeps == 0 {
        return Err(invalid("jacobi_max_sweeps must be positive"));
    }
    Ok(())
}

/// Applies a JSON tolerance record on top of `base`; keys not present keep
/// their current values.
pub fn merge_tolerances(base: &Tolerances, overrides: &str) -> Result<Tolerances, SpecError> {
    let mut value = serde_json::to_value(base)?;
    let patch: serde_json::Value = serde_json::from_str(overrides)?;
    let (Some(dst), Some(src)) = (value.as_object_mut(), patch.as_object()) else {
        return Err(invalid("tolerance record must be a JSON object"));
    };
    for (k, v) in src {
        if !dst.contains_key(k) {
            return Err(invalid(format!("unknown tolerance {k}")));
        }
        dst.insert(k.clone(), v.clone());
    }
    let merged: Tolerances = serde_json::from_value(value)?;
    validate_tolerances(&merged)?;
    Ok(merged)
}
