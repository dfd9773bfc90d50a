//! Spectral-gap lower bounds and their verification against exact spectra.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::CertificateFailure;
use crate::config::Tolerances;
use crate::graphs::{is_strongly_convex, ConvexSubgraph, ConvexityReport, GraphError};
use crate::moduli::{
    c_u0, extremal_pairs, log_concavity, modulus_of_concavity, modulus_of_continuity, ModuliError, ModulusOfConcavity,
    ModulusOfContinuity, PairRestriction, RatioConstant, RatioFunction,
};
use crate::operators::{
    check_spectrum, dirichlet_hamiltonian, eigendecompose, laplacian, path_gap, potential_values, rayleigh_gap_check,
    OperatorError, Parity, PathLattice, Potential, SpectralError, Spectrum, SymmetricOperator,
};

/// Cap on eigenvectors sampled from a degenerate `λ_1` eigenspace.
pub const EIGENSPACE_SAMPLES: usize = 16;
const EIGENSPACE_SEED: u64 = 0x05ee_d9a7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("subgraph is not a hypercube or one of its subcubes")]
    NotHypercube,
    #[error("bound unavailable: {0}")]
    BoundUnavailable(#[from] ModuliError),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("diameter must be at least 1")]
    InvalidDiameter,
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("a gap needs at least two vertices")]
    TooSmall,
    #[error("spectrum has {got} eigenpairs, operator has dimension {expected}")]
    SpectrumMismatch { expected: usize, got: usize },
}

/// `2(1 - cos(π/(D+1)))` for a strongly convex subgraph of diameter `D`.
pub fn diameter_bound(d: usize) -> Result<f64, BoundError> {
    if d == 0 {
        return Err(BoundError::InvalidDiameter);
    }
    Ok(path_gap(d + 1))
}

/// `λ_1 >= 2` for the Laplacian of a hypercube.
pub fn hypercube_bound(s: &ConvexSubgraph) -> Result<f64, BoundError> {
    match s.subcube_dimension() {
        Some(m) if m >= 1 => Ok(2.0),
        _ => Err(BoundError::NotHypercube),
    }
}

/// A bound built from the ground-state ratio constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioBound {
    pub value: f64,
    pub constant: RatioConstant,
}

/// `2 C_{u0} (1 - cos(π/(D+1)))` over all extremal pairs.
pub fn ratio_bound(ratio: &RatioFunction, s: &ConvexSubgraph, tol: &Tolerances) -> Result<RatioBound, BoundError> {
    let d = s.diameter();
    let base = diameter_bound(d)?;
    let eta = modulus_of_continuity(ratio.f(), s, tol);
    let xi = extremal_pairs(&eta, ratio.f(), s);
    let constant = c_u0(ratio, &xi, s, PairRestriction::All, tol)?;
    Ok(RatioBound {
        value: constant.value * base,
        constant,
    })
}

/// `2 C_{u0}` with the constant taken over pairs at distance at most two
/// attaining `η(2)`.
pub fn hypercube_ratio_bound(
    ratio: &RatioFunction,
    s: &ConvexSubgraph,
    tol: &Tolerances,
) -> Result<RatioBound, BoundError> {
    hypercube_bound(s)?;
    let eta = modulus_of_continuity(ratio.f(), s, tol);
    let xi = extremal_pairs(&eta, ratio.f(), s);
    let constant = c_u0(ratio, &xi, s, PairRestriction::DistanceLe2, tol)?;
    Ok(RatioBound {
        value: 2.0 * constant.value,
        constant,
    })
}

/// Bounds for log-concave ground states on paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogConcaveBound {
    /// `4 (2 cosh ω̄ - 1)(1 - cos(π/(2D+1)))`.
    pub value: f64,
    /// `4 (1 - cos(π/(2D+1)))`.
    pub weak_value: f64,
    pub omega_bar: f64,
}

fn nonnegative_concavity(omega: &ModulusOfConcavity, tol: &Tolerances) -> Result<f64, BoundError> {
    if let Some(s) = omega.undefined().first() {
        return Err(BoundError::HypothesisFailed(format!(
            "modulus of concavity undefined at distance {s}"
        )));
    }
    if !omega.is_nonnegative(tol.zero) {
        return Err(BoundError::HypothesisFailed("modulus of concavity is negative".into()));
    }
    omega
        .infimum()
        .ok_or_else(|| BoundError::HypothesisFailed("modulus of concavity is empty".into()))
}

fn unit_lattice_term(d: usize) -> f64 {
    // 4 (1 - cos(π/(2D+1))) is twice the gap of the unit-step lattice.
    2.0 * path_gap(2 * d + 1)
}

pub fn log_concave_bound(omega: &ModulusOfConcavity, tol: &Tolerances) -> Result<LogConcaveBound, BoundError> {
    let d = omega.diameter();
    if d == 0 {
        return Err(BoundError::InvalidDiameter);
    }
    let omega_bar = nonnegative_concavity(omega, tol)?;
    let weak_value = unit_lattice_term(d);
    Ok(LogConcaveBound {
        value: (2.0 * omega_bar.cosh() - 1.0) * weak_value,
        weak_value,
        omega_bar,
    })
}

/// Bound driven by the backward difference of `cosh ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityGradientBound {
    /// `4 (1 - cos(π/(2D+1))) + 2 inf_s (cosh ω(s) - cosh ω(s+1))`.
    pub value: f64,
    pub delta_minus_cosh_inf: f64,
    /// `4 (1 - cos(π/(2D+1))) + 2 (cosh ω̄ - 1)`, when `ω` is convex.
    pub convex_form: Option<f64>,
}

pub fn concavity_gradient_bound(
    omega: &ModulusOfConcavity,
    tol: &Tolerances,
) -> Result<ConcavityGradientBound, BoundError> {
    let d = omega.diameter();
    if d == 0 {
        return Err(BoundError::InvalidDiameter);
    }
    let omega_bar = nonnegative_concavity(omega, tol)?;
    let delta_minus_cosh_inf = (1..=d)
        .map(|s| omega.value(s).unwrap().cosh() - omega.value(s + 1).unwrap().cosh())
        .fold(f64::INFINITY, f64::min);
    let base = unit_lattice_term(d);
    Ok(ConcavityGradientBound {
        value: base + 2.0 * delta_minus_cosh_inf,
        delta_minus_cosh_inf,
        convex_form: omega.is_convex(tol.zero).then(|| base + 2.0 * (omega_bar.cosh() - 1.0)),
    })
}

/// The variational route to the diameter bound: on the lattice of `[-D, D]`
/// with the parity of `D`, `-λ_1 η(s) <= -(L_P η)(s)` at every `s > 0`
/// (antisymmetry flips it for `s < 0`), and the Rayleigh quotient of `η`
/// then sits between `μ` and `λ_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeCertificate {
    pub parity: Parity,
    pub mu: f64,
    pub rayleigh: f64,
    /// Largest `-λ_1 η(s) + (L_P η)(s)`; non-positive up to roundoff.
    pub max_violation: f64,
    pub worst_s: i64,
    pub tolerance: f64,
    pub holds: bool,
}

pub fn lattice_certificate(eta: &ModulusOfContinuity, lambda1: f64, tol: &Tolerances) -> LatticeCertificate {
    let d = eta.diameter();
    let lattice = PathLattice::new(d, Parity::of(d));
    let values = eta.on_lattice(&lattice);
    let lp_eta = lattice.operator.apply(&values);
    let tolerance = tol.certificate * lambda1.abs().max(1.0);
    let (worst_s, max_violation) = lattice
        .points
        .iter()
        .zip(values.iter().zip(&lp_eta))
        .filter(|&(&s, _)| s > 0)
        .map(|(&s, (&v, &l))| (s, -lambda1 * v + l))
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (s, v)| if v > acc.1 { (s, v) } else { acc },
        );
    let norm: f64 = values.iter().map(|v| v * v).sum();
    let rayleigh = if norm > 0.0 {
        values.iter().zip(&lp_eta).map(|(a, b)| a * b).sum::<f64>() / norm
    } else {
        0.0
    };
    let mu = lattice.gap();
    let holds =
        max_violation <= tolerance && (norm == 0.0 || (rayleigh >= mu - tolerance && rayleigh <= lambda1 + tolerance));
    LatticeCertificate {
        parity: lattice.parity,
        mu,
        rayleigh,
        max_violation,
        worst_s,
        tolerance,
        holds,
    }
}

/// Vectors spanning a sample of the `λ_1` eigenspace: its basis vectors
/// (up to half the cap) and seeded random unit combinations.
pub fn eigenspace_sample(spectrum: &Spectrum, tol: &Tolerances) -> Vec<Vec<f64>> {
    if spectrum.len() < 2 {
        return Vec::new();
    }
    let lambda1 = spectrum.eigenvalue(1);
    let indices: Vec<usize> = spectrum
        .eigenspace(1, tol.verify_for(lambda1))
        .into_iter()
        .filter(|&j| j >= 1)
        .collect();
    if indices.len() == 1 {
        return vec![spectrum.eigenvector(1).to_vec()];
    }
    let mut out: Vec<Vec<f64>> = indices
        .iter()
        .take(EIGENSPACE_SAMPLES / 2)
        .map(|&j| spectrum.eigenvector(j).to_vec())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(EIGENSPACE_SEED);
    let n = spectrum.len();
    while out.len() < EIGENSPACE_SAMPLES {
        let mut v = vec![0.0; n];
        for &j in &indices {
            let c: f64 = rng.gen_range(-1.0..1.0);
            for (vi, ui) in v.iter_mut().zip(spectrum.eigenvector(j)) {
                *vi += c * ui;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            out.push(v);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Laplacian gap from the diameter alone.
    Diameter,
    /// Laplacian gap of a hypercube.
    Hypercube,
    /// Hamiltonian gap from the ground-state ratio constant.
    Ratio,
    /// Hamiltonian gap on a hypercube from pairs at distance at most two.
    HypercubeRatio,
    /// Hamiltonian gap on a path with log-concave ground state.
    LogConcave,
    /// Refinement of the log-concave bound through `Δ⁻ cosh ω`.
    ConcavityGradient,
}

impl BoundKind {
    pub const ALL: [BoundKind; 6] = [
        BoundKind::Diameter,
        BoundKind::Hypercube,
        BoundKind::Ratio,
        BoundKind::HypercubeRatio,
        BoundKind::LogConcave,
        BoundKind::ConcavityGradient,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Diameter => "diameter",
            BoundKind::Hypercube => "hypercube",
            BoundKind::Ratio => "ratio",
            BoundKind::HypercubeRatio => "hypercube_ratio",
            BoundKind::LogConcave => "log_concave",
            BoundKind::ConcavityGradient => "concavity_gradient",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
}

fn hyp(name: &str, holds: bool) -> Hypothesis {
    Hypothesis {
        name: name.into(),
        holds,
    }
}

/// One evaluated bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub bound: BoundKind,
    pub hypotheses: Vec<Hypothesis>,
    pub value: f64,
    /// `γ - value`; non-negative when the bound holds.
    pub slack: f64,
    pub holds: bool,
    /// Secondary quantities (ratio constant, weaker forms, normalized value).
    pub details: BTreeMap<String, f64>,
}

/// A bound whose hypotheses did not verify, or that could not be formed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NotApplicable {
    pub bound: BoundKind,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateOutcome {
    pub name: String,
    pub passed: bool,
    pub failure: Option<CertificateFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub diameter: usize,
    pub degree: usize,
    pub boundary_vertices: usize,
    pub potential_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub graph: GraphSummary,
    pub convexity: ConvexityReport,
    pub lambda0: f64,
    pub lambda1: f64,
    pub gap: f64,
    pub tol_verify: f64,
    pub tolerances: Tolerances,
    /// Eigenvectors of `λ_1` used for the moduli-based bounds.
    pub eigenspace_samples: usize,
    pub certificates: Vec<CertificateOutcome>,
    pub lattice: Option<LatticeCertificate>,
    pub records: Vec<BoundRecord>,
    pub not_applicable: Vec<NotApplicable>,
}

impl GapReport {
    pub fn record(&self, bound: BoundKind) -> Option<&BoundRecord> {
        self.records.iter().find(|r| r.bound == bound)
    }

    /// Every evaluated bound holds and every certificate passed.
    pub fn all_hold(&self) -> bool {
        self.records.iter().all(|r| r.holds)
            && self.certificates.iter().all(|c| c.passed)
            && self.lattice.as_ref().is_none_or(|l| l.holds)
    }
}

/// Subgraph plus optional potential; no potential means the Laplacian.
#[derive(Debug, Clone)]
pub struct BoundInstance {
    pub subgraph: ConvexSubgraph,
    pub potential: Option<Potential>,
}

impl BoundInstance {
    pub fn laplacian(subgraph: ConvexSubgraph) -> Self {
        Self {
            subgraph,
            potential: None,
        }
    }

    pub fn hamiltonian(subgraph: ConvexSubgraph, potential: Potential) -> Self {
        Self {
            subgraph,
            potential: Some(potential),
        }
    }

    pub fn operator(&self) -> Result<SymmetricOperator, OperatorError> {
        match &self.potential {
            None => Ok(laplacian(&self.subgraph)),
            Some(w) => dirichlet_hamiltonian(&self.subgraph, w),
        }
    }

    /// Resolved potential values; zeros for the Laplacian.
    pub fn potential_values(&self) -> Result<Vec<f64>, OperatorError> {
        match &self.potential {
            None => Ok(vec![0.0; self.subgraph.len()]),
            Some(w) => potential_values(&self.subgraph, w),
        }
    }
}

/// Builds the operator, solves it, and verifies every applicable bound.
pub fn verify_all(inst: &BoundInstance, tol: &Tolerances) -> Result<GapReport, VerifyError> {
    let op = inst.operator()?;
    let spectrum = eigendecompose(&op, tol)?;
    verify_spectrum(inst, &op, &spectrum, tol)
}

/// As [`verify_all`], reusing an existing spectrum of `op`.
pub fn verify_spectrum(
    inst: &BoundInstance,
    op: &SymmetricOperator,
    spectrum: &Spectrum,
    tol: &Tolerances,
) -> Result<GapReport, VerifyError> {
    let s = &inst.subgraph;
    if s.len() < 2 {
        return Err(VerifyError::TooSmall);
    }
    if spectrum.len() != op.dim() {
        return Err(VerifyError::SpectrumMismatch {
            expected: op.dim(),
            got: spectrum.len(),
        });
    }
    let convexity = is_strongly_convex(s)?;
    let w = inst.potential_values()?;
    let potential_zero = w.iter().all(|&v| v == 0.0);
    let lambda0 = spectrum.eigenvalue(0);
    let lambda1 = spectrum.eigenvalue(1);
    let gap = lambda1 - lambda0;
    let tol_verify = tol.verify_for(gap);
    let d = s.diameter();
    let k = s.host().degree();

    let certificates = vec![
        outcome("spectrum", check_spectrum(op, spectrum, tol).map(|_| ())),
        outcome("eigen_recurrence", rayleigh_gap_check(spectrum, op, tol).map(|_| ())),
    ];

    let mut records = Vec::new();
    let mut not_applicable = Vec::new();
    let mut emit = |bound: BoundKind, hypotheses: Vec<Hypothesis>, value: f64, details: BTreeMap<String, f64>| {
        let slack = gap - value;
        records.push(BoundRecord {
            bound,
            hypotheses,
            value,
            slack,
            holds: slack >= -tol_verify,
            details,
        });
    };
    let mut skip = |bound: BoundKind, reason: String| not_applicable.push(NotApplicable { bound, reason });
    let convex = convexity.strongly_convex;
    let samples = eigenspace_sample(spectrum, tol);

    // Laplacian bounds.
    let mut lattice = None;
    if !potential_zero {
        skip(BoundKind::Diameter, "potential is not identically zero".into());
        skip(BoundKind::Hypercube, "potential is not identically zero".into());
    } else {
        if convex {
            let value = diameter_bound(d).expect("at least two vertices");
            let details = BTreeMap::from([("normalized".to_string(), value / k as f64)]);
            emit(BoundKind::Diameter, vec![hyp("strongly_convex", true)], value, details);
            let worst = samples
                .iter()
                .map(|u| lattice_certificate(&modulus_of_continuity(u, s, tol), lambda1, tol))
                .max_by(|a, b| a.max_violation.total_cmp(&b.max_violation));
            lattice = worst;
        } else {
            skip(BoundKind::Diameter, "subgraph is not strongly convex".into());
        }
        match hypercube_bound(s) {
            Ok(value) => {
                let details = BTreeMap::from([("normalized".to_string(), value / k as f64)]);
                emit(BoundKind::Hypercube, vec![hyp("subcube", true)], value, details);
            }
            Err(e) => skip(BoundKind::Hypercube, e.to_string()),
        }
    }

    // Ratio-constant bounds, over the sampled eigenspace.
    let ratio_kinds = [BoundKind::Ratio, BoundKind::HypercubeRatio];
    if !convex {
        for b in ratio_kinds {
            skip(b, "subgraph is not strongly convex".into());
        }
    } else if let Some((x, &v)) = spectrum.eigenvector(0).iter().enumerate().find(|(_, &v)| v <= 0.0) {
        for b in ratio_kinds {
            skip(b, format!("ground state not positive at vertex {x} ({v})"));
        }
    } else {
        for bound in ratio_kinds {
            let evaluate = |u1: &Vec<f64>| -> Result<RatioBound, BoundError> {
                let ratio = RatioFunction::new(spectrum.eigenvector(0), u1)?;
                match bound {
                    BoundKind::Ratio => ratio_bound(&ratio, s, tol),
                    _ => hypercube_ratio_bound(&ratio, s, tol),
                }
            };
            let results: Vec<Result<RatioBound, BoundError>> = samples.iter().map(evaluate).collect();
            let mut unavailable = 0usize;
            let mut best: Option<RatioBound> = None;
            let mut skipped_pairs = 0usize;
            let mut last_err = None;
            for r in results {
                match r {
                    Ok(b) => {
                        skipped_pairs += b.constant.skipped.len();
                        if best.as_ref().is_none_or(|cur| b.value > cur.value) {
                            best = Some(b);
                        }
                    }
                    Err(e) => {
                        unavailable += 1;
                        last_err = Some(e);
                    }
                }
            }
            match best {
                Some(b) => {
                    let details = BTreeMap::from([
                        ("c_u0".to_string(), b.constant.value),
                        ("admitted_pairs".to_string(), b.constant.admitted as f64),
                        ("skipped_pairs".to_string(), skipped_pairs as f64),
                        ("samples".to_string(), samples.len() as f64),
                        ("samples_unavailable".to_string(), unavailable as f64),
                    ]);
                    let mut hypotheses = vec![hyp("strongly_convex", true), hyp("positive_ground_state", true)];
                    if bound == BoundKind::HypercubeRatio {
                        hypotheses.push(hyp("subcube", true));
                    }
                    emit(bound, hypotheses, b.value, details);
                }
                None => skip(
                    bound,
                    last_err.map_or_else(|| "no eigenvector sample".into(), |e| e.to_string()),
                ),
            }
        }
    }

    // Log-concave path bounds.
    let path_kinds = [BoundKind::LogConcave, BoundKind::ConcavityGradient];
    let u0 = spectrum.eigenvector(0);
    if !s.is_path() || !convex {
        for b in path_kinds {
            skip(b, "subgraph is not a strongly convex path".into());
        }
    } else if u0.iter().any(|&v| v <= 0.0) {
        for b in path_kinds {
            skip(b, "ground state is not positive".into());
        }
    } else {
        let g: Vec<f64> = u0.iter().map(|v| v.ln()).collect();
        let lc = log_concavity(s, &g, tol.zero);
        let omega = modulus_of_concavity(&g, s);
        if !lc.holds {
            for b in path_kinds {
                skip(b, format!("ground state not log-concave at vertex {:?}", lc.witness));
            }
        } else {
            match log_concave_bound(&omega, tol) {
                Ok(b) => {
                    let details = BTreeMap::from([
                        ("omega_bar".to_string(), b.omega_bar),
                        ("weak_value".to_string(), b.weak_value),
                    ]);
                    let hypotheses = vec![
                        hyp("path", true),
                        hyp("log_concave", true),
                        hyp("omega_nonnegative", true),
                    ];
                    emit(BoundKind::LogConcave, hypotheses, b.value, details);
                }
                Err(e) => skip(BoundKind::LogConcave, e.to_string()),
            }
            match concavity_gradient_bound(&omega, tol) {
                Ok(b) => {
                    let mut details = BTreeMap::from([("delta_minus_cosh_inf".to_string(), b.delta_minus_cosh_inf)]);
                    if let Some(v) = b.convex_form {
                        details.insert("convex_form".into(), v);
                    }
                    let hypotheses = vec![
                        hyp("path", true),
                        hyp("log_concave", true),
                        hyp("omega_nonnegative", true),
                        hyp("omega_convex", b.convex_form.is_some()),
                    ];
                    emit(BoundKind::ConcavityGradient, hypotheses, b.value, details);
                }
                Err(e) => skip(BoundKind::ConcavityGradient, e.to_string()),
            }
        }
    }

    Ok(GapReport {
        graph: GraphSummary {
            vertices: s.len(),
            diameter: d,
            degree: k,
            boundary_vertices: s.boundary().len(),
            potential_zero,
        },
        convexity,
        lambda0,
        lambda1,
        gap,
        tol_verify,
        tolerances: *tol,
        eigenspace_samples: samples.len(),
        certificates,
        lattice,
        records,
        not_applicable,
    })
}

fn outcome(name: &str, r: Result<(), CertificateFailure>) -> CertificateOutcome {
    CertificateOutcome {
        name: name.into(),
        passed: r.is_ok(),
        failure: r.err(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{cycle_subgraph, hypercube_subgraph, path_subgraph, subcube_subgraph};
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn diameter_bound_values() {
        assert!((diameter_bound(1).unwrap() - 2.0).abs() < 1e-15);
        assert!((diameter_bound(2).unwrap() - 1.0).abs() < 1e-15);
        assert!((diameter_bound(5).unwrap() - 2.0 * (1.0 - (PI / 6.0).cos())).abs() < 1e-15);
        assert_eq!(diameter_bound(0), Err(BoundError::InvalidDiameter));
    }

    #[test]
    fn hypercube_bound_needs_a_cube() {
        assert_eq!(hypercube_bound(&hypercube_subgraph(3).unwrap()), Ok(2.0));
        assert_eq!(hypercube_bound(&subcube_subgraph(4, 0b1001, 0b0001).unwrap()), Ok(2.0));
        assert_eq!(
            hypercube_bound(&path_subgraph(4).unwrap()),
            Err(BoundError::NotHypercube)
        );
    }

    #[test]
    fn path_diameter_bound_is_tight() {
        let report = verify_all(&BoundInstance::laplacian(path_subgraph(5).unwrap()), &tol()).unwrap();
        let r = report.record(BoundKind::Diameter).unwrap();
        assert!(r.slack.abs() < 1e-9, "{}", r.slack);
        assert!(report.all_hold(), "{report:#?}");
        assert!(report.lattice.as_ref().unwrap().holds);
        // Zero potential: the ratio bound coincides with the diameter bound.
        let ratio = report.record(BoundKind::Ratio).unwrap();
        assert!((ratio.value - r.value).abs() < 1e-12);
        assert!((ratio.details["c_u0"] - 1.0).abs() < 1e-12);
        assert!(report.record(BoundKind::Hypercube).is_none());
    }

    #[test]
    fn hypercube_bounds_are_tight() {
        let report = verify_all(&BoundInstance::laplacian(hypercube_subgraph(4).unwrap()), &tol()).unwrap();
        assert!(report.record(BoundKind::Hypercube).unwrap().slack.abs() < 1e-9);
        assert!((report.record(BoundKind::HypercubeRatio).unwrap().value - 2.0).abs() < 1e-9);
        assert!((report.record(BoundKind::Hypercube).unwrap().details["normalized"] - 0.5).abs() < 1e-15);
        assert_eq!(report.eigenspace_samples, EIGENSPACE_SAMPLES);
        assert!(report.all_hold(), "{report:#?}");
    }

    #[test]
    fn cycle_bound_below_exact_gap() {
        let report = verify_all(&BoundInstance::laplacian(cycle_subgraph(6).unwrap()), &tol()).unwrap();
        assert!((report.gap - 1.0).abs() < 1e-12);
        let r = report.record(BoundKind::Diameter).unwrap();
        assert!((r.value - 2.0 * (1.0 - (PI / 4.0).cos())).abs() < 1e-15);
        assert!(r.holds && r.slack > 0.0);
    }

    #[test]
    fn dirichlet_hamiltonian_on_subcube() {
        let s = subcube_subgraph(3, 0b100, 0).unwrap();
        let report = verify_all(&BoundInstance::hamiltonian(s, Potential::BoundaryInduced), &tol()).unwrap();
        assert!(report.record(BoundKind::Diameter).is_none());
        assert!(report.all_hold(), "{report:#?}");
        assert!(report.record(BoundKind::Ratio).is_some());
    }

    #[test]
    fn non_convex_subgraph_gets_no_bounds() {
        use crate::graphs::{induce_subgraph, HomogeneousGraph};
        use std::sync::Arc;
        let host = Arc::new(HomogeneousGraph::hypercube(3).unwrap());
        let s = induce_subgraph(&host, &[0b000, 0b001, 0b011]).unwrap();
        let report = verify_all(&BoundInstance::laplacian(s), &tol()).unwrap();
        assert!(!report.convexity.strongly_convex);
        assert!(report.record(BoundKind::Diameter).is_none());
        assert!(report.record(BoundKind::Ratio).is_none());
    }

    #[test]
    fn log_concave_bounds_on_convex_potential_path() {
        let w: Vec<f64> = (0..6).map(|x| ((x as f64) - 3.0).powi(2) / 2.0).collect();
        let s = path_subgraph(6).unwrap();
        let report = verify_all(&BoundInstance::hamiltonian(s, Potential::Values(w)), &tol()).unwrap();
        assert!(report.all_hold(), "{report:#?}");
        if let (Some(five), Some(six)) = (
            report.record(BoundKind::LogConcave),
            report.record(BoundKind::ConcavityGradient),
        ) {
            let weak = 4.0 * (1.0 - (PI / 11.0).cos());
            assert!((five.details["weak_value"] - weak).abs() < 1e-15);
            assert!(five.value <= report.gap + report.tol_verify);
            assert!(six.value <= report.gap + report.tol_verify);
        }
    }

    #[test]
    fn single_edge_log_concave_bound_equals_gap() {
        let report = verify_all(&BoundInstance::laplacian(path_subgraph(2).unwrap()), &tol()).unwrap();
        let r = report.record(BoundKind::LogConcave).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.slack.abs() < 1e-9);
    }

    #[test]
    fn zero_concavity_makes_both_path_bounds_equal() {
        let s = path_subgraph(4).unwrap();
        let omega = modulus_of_concavity(&[0.0; 4], &s);
        let five = log_concave_bound(&omega, &tol()).unwrap();
        let six = concavity_gradient_bound(&omega, &tol()).unwrap();
        assert_eq!(five.value, five.weak_value);
        assert_eq!(six.value, five.value);
        assert_eq!(six.convex_form, Some(five.value));
    }

    #[test]
    fn constant_concavity_tables() {
        // Only the last class sees the drop to ω(D+1) = 0.
        let c = 0.4;
        let one = ModulusOfConcavity::from_values(vec![Some(c)]);
        let b = concavity_gradient_bound(&one, &tol()).unwrap();
        assert!((b.delta_minus_cosh_inf - (c.cosh() - 1.0)).abs() < 1e-15);
        let three = ModulusOfConcavity::from_values(vec![Some(c); 3]);
        let b = concavity_gradient_bound(&three, &tol()).unwrap();
        assert_eq!(b.delta_minus_cosh_inf, 0.0);
        assert_eq!(b.convex_form, None);
        let five = log_concave_bound(&three, &tol()).unwrap();
        assert!((five.value - (2.0 * c.cosh() - 1.0) * five.weak_value).abs() < 1e-15);
    }

    #[test]
    fn negative_concavity_is_rejected() {
        let omega = ModulusOfConcavity::from_values(vec![Some(0.0), Some(-0.1)]);
        assert!(matches!(
            log_concave_bound(&omega, &tol()),
            Err(BoundError::HypothesisFailed(_))
        ));
        assert!(matches!(
            concavity_gradient_bound(&omega, &tol()),
            Err(BoundError::HypothesisFailed(_))
        ));
    }
}
