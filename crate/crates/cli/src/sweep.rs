//! Family sweeps: one run per size, executed concurrently and assembled in
//! size order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gapbound_core::bounds::BoundKind;
use gapbound_core::Tolerances;

use crate::instance::{Analysis, InstanceSpec, SpecError, SubgraphSelector, SCHEMA_VERSION};
use crate::pipeline::{fmt_float, run_instance, PipelineError, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Path,
    Cycle,
    Hypercube,
}

impl Family {
    pub fn selector(self, n: usize) -> SubgraphSelector {
        match self {
            Family::Path => SubgraphSelector::Path(n),
            Family::Cycle => SubgraphSelector::Cycle(n),
            Family::Hypercube => SubgraphSelector::Hypercube(n),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Path => "path",
            Family::Cycle => "cycle",
            Family::Hypercube => "hypercube",
        }
    }
}

/// Bound value and slack at one size; absent when not applicable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCell {
    pub bound: BoundKind,
    pub value: f64,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub size: usize,
    pub vertices: usize,
    pub diameter: usize,
    pub gap: f64,
    pub bounds: Vec<BoundCell>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema: u32,
    pub family: Family,
    pub sizes: Vec<usize>,
    pub rows: Vec<SweepRow>,
    pub reports: Vec<RunReport>,
    pub passed: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("size {size}: {source}")]
    Spec { size: usize, source: SpecError },
    #[error("size {size}: {source}")]
    Pipeline { size: usize, source: PipelineError },
}

/// Builds and validates every instance first, then runs them in parallel.
pub fn sweep(
    family: Family,
    sizes: &[usize],
    analyses: &[Analysis],
    tolerances: &Tolerances,
) -> Result<SweepReport, SweepError> {
    let instances = sizes
        .iter()
        .map(|&size| {
            InstanceSpec {
                schema: SCHEMA_VERSION,
                name: Some(format!("{}({size})", family.name())),
                group: None,
                generators: None,
                subgraph: family.selector(size),
                potential: crate::instance::PotentialSpec::None,
                analyses: analyses.to_vec(),
                tolerances: *tolerances,
            }
            .build()
            .map_err(|source| SweepError::Spec { size, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let reports = instances
        .par_iter()
        .zip(sizes.par_iter())
        .map(|(inst, &size)| {
            run_instance(inst)
                .map(|out| out.report)
                .map_err(|source| SweepError::Pipeline { size, source })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let rows: Vec<SweepRow> = sizes
        .iter()
        .zip(&reports)
        .map(|(&size, r)| SweepRow {
            size,
            vertices: r.instance.vertices,
            diameter: r.instance.diameter,
            gap: r
                .bounds
                .as_ref()
                .map(|b| b.gap)
                .or_else(|| r.spectrum.as_ref().map(|s| s.gap))
                .unwrap_or(f64::NAN),
            bounds: r
                .bounds
                .iter()
                .flat_map(|b| &b.records)
                .map(|rec| BoundCell {
                    bound: rec.bound,
                    value: rec.value,
                    slack: rec.slack,
                    holds: rec.holds,
                })
                .collect(),
            passed: r.passed,
        })
        .collect();
    let passed = reports.iter().all(|r| r.passed);
    Ok(SweepReport {
        schema: SCHEMA_VERSION,
        family,
        sizes: sizes.to_vec(),
        rows,
        reports,
        passed,
    })
}

/// `size,vertices,diameter,gap` then a value and slack column per bound;
/// empty cells where a bound does not apply.
pub fn table_csv(report: &SweepReport) -> String {
    let mut out = String::from("size,vertices,diameter,gap");
    for b in BoundKind::ALL {
        out.push_str(&format!(",{0}_value,{0}_slack", b.name()));
    }
    out.push('\n');
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{}",
            row.size,
            row.vertices,
            row.diameter,
            fmt_float(row.gap)
        ));
        for b in BoundKind::ALL {
            match row.bounds.iter().find(|c| c.bound == b) {
                Some(c) => out.push_str(&format!(",{},{}", fmt_float(c.value), fmt_float(c.slack))),
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

/// Parses `a..b` (exclusive) or `a..=b` (inclusive) or a single size.
pub fn parse_range(text: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("invalid range {text:?}; use a..=b, a..b or n");
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let sizes: Vec<usize> = if let Some((a, b)) = text.split_once("..=") {
        (parse(a)?..=parse(b)?).collect()
    } else if let Some((a, b)) = text.split_once("..") {
        (parse(a)?..parse(b)?).collect()
    } else {
        vec![parse(text)?]
    };
    if sizes.is_empty() {
        return Err(bad());
    }
    Ok(sizes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..=5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_range("2..5").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_range("7").unwrap(), vec![7]);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("a..3").is_err());
    }

    #[test]
    fn path_sweep_is_tight() {
        let r = sweep(Family::Path, &[2, 3, 4, 5], &[Analysis::Bounds], &Tolerances::default()).unwrap();
        assert!(r.passed);
        assert_eq!(r.rows.len(), 4);
        for row in &r.rows {
            let cell = row.bounds.iter().find(|c| c.bound == BoundKind::Diameter).unwrap();
            assert!(cell.slack.abs() <= 1e-9, "{row:?}");
        }
        let csv = table_csv(&r);
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("size,vertices,diameter,gap,diameter_value,diameter_slack"));
    }

    #[test]
    fn invalid_size_is_a_spec_error() {
        let e = sweep(Family::Path, &[1, 2], &[Analysis::Bounds], &Tolerances::default()).unwrap_err();
        assert!(matches!(e, SweepError::Spec { size: 1, .. }));
    }
}
