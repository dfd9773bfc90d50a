//! Runs the requested analyses on a validated instance and assembles a
//! deterministic report.

use serde::Serialize;
use thiserror::Error;

use gapbound_core::bounds::{diameter_bound, verify_spectrum, BoundInstance, GapReport, VerifyError};
use gapbound_core::graphs::{is_strongly_convex, ConvexityReport, GraphError};
use gapbound_core::heat::{
    decay_rate_check, default_grid, evolve_euler, evolve_spectral, hypercube_eta2_check, lattice_heat_inequality_check,
    ratio_evolution_check, DecayCertificate, DifferentialCertificate, HeatError, RatioEvolutionCertificate,
};
use gapbound_core::moduli::{
    boundary_continuity_violation, boundary_monotonicity_violation, c_u0, extremal_pairs, log_concavity,
    modulus_of_concavity, modulus_of_continuity, BoundaryWitness, ConcavityTriple, LogConcavity, PairRestriction,
    RatioConstant, RatioFunction,
};
use gapbound_core::operators::{
    check_spectrum, eigendecompose, rayleigh_gap_check, OperatorError, RayleighCertificate, SpectralError, Spectrum,
    SpectrumCertificate, SymmetricOperator,
};
use gapbound_core::Tolerances;

use crate::instance::{Analysis, Instance};

/// Explicit steps per stability limit in the Euler cross-check.
const EULER_FRACTION: f64 = 0.05;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Heat(#[from] HeatError),
}

/// One pass/fail verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// A check whose preconditions do not hold on this instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub vertices: usize,
    pub diameter: usize,
    pub host_order: usize,
    pub host_degree: usize,
    pub boundary_vertices: usize,
    pub subcube_dimension: Option<usize>,
    pub path: bool,
    pub potential: Vec<f64>,
    pub convexity: ConvexityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSection {
    pub eigenvalues: Vec<f64>,
    pub lambda0: f64,
    pub lambda1: f64,
    pub gap: f64,
    pub sweeps: usize,
    pub certificate: Option<SpectrumCertificate>,
    pub recurrence: Option<RayleighCertificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerCrossCheck {
    pub dt: f64,
    pub sup_error: f64,
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatSection {
    pub times: Vec<f64>,
    /// Rate the decay of `η(D, t)` is checked against.
    pub mu: Option<f64>,
    pub decay: Option<DecayCertificate>,
    pub lattice_inequality: Option<DifferentialCertificate>,
    pub hypercube_eta2: Option<DifferentialCertificate>,
    pub ratio_evolution: Option<RatioEvolutionCertificate>,
    pub euler: Option<EulerCrossCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioConstantOutcome {
    pub restriction: PairRestriction,
    pub constant: Option<RatioConstant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unavailable: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuliSection {
    /// `η(0..=D)` of the first excited state.
    pub eta: Vec<f64>,
    pub extremal_pairs: usize,
    /// `ω(1..=D)`; `null` where no admissible triple exists.
    pub omega: Option<Vec<Option<f64>>>,
    pub omega_achievers: Option<Vec<Option<ConcavityTriple>>>,
    pub omega_infimum: Option<f64>,
    pub omega_convex: Option<bool>,
    pub log_concavity: Option<LogConcavity>,
    pub ratio_constants: Vec<RatioConstantOutcome>,
    pub boundary_continuity: Option<BoundaryWitness>,
    pub boundary_monotonicity: Option<BoundaryWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub name: Option<String>,
    pub analyses: Vec<Analysis>,
    pub instance: InstanceSummary,
    pub tolerances: Tolerances,
    pub spectrum: Option<SpectrumSection>,
    pub bounds: Option<GapReport>,
    pub heat: Option<HeatSection>,
    pub moduli: Option<ModuliSection>,
    pub checks: Vec<Check>,
    pub skipped: Vec<Skipped>,
    pub passed: bool,
}

impl RunReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// A report plus the CSV series it refers to.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    /// `index,eigenvalue`.
    pub spectrum_csv: Option<String>,
    /// `s,t,eta` of the heat trajectory started at the first excited state.
    pub eta_csv: Option<String>,
}

/// 17 significant digits: enough to round-trip any `f64`.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

struct Recorder {
    checks: Vec<Check>,
    skipped: Vec<Skipped>,
}

impl Recorder {
    fn check(&mut self, name: &str, passed: bool, detail: Option<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }

    fn outcome<T, E: std::fmt::Display>(&mut self, name: &str, r: Result<T, E>) -> Option<T> {
        match r {
            Ok(v) => {
                self.check(name, true, None);
                Some(v)
            }
            Err(e) => {
                self.check(name, false, Some(e.to_string()));
                None
            }
        }
    }

    fn skip(&mut self, name: &str, reason: impl Into<String>) {
        self.skipped.push(Skipped {
            name: name.into(),
            reason: reason.into(),
        });
    }
}

pub fn run_instance(inst: &Instance) -> Result<RunOutput, PipelineError> {
    let tol = &inst.tolerances;
    let s = &inst.subgraph;
    let bound_inst = BoundInstance {
        subgraph: s.clone(),
        potential: inst.potential.clone(),
    };
    let op = bound_inst.operator()?;
    let potential = bound_inst.potential_values()?;
    let potential_zero = potential.iter().all(|&w| w == 0.0);
    let convexity = is_strongly_convex(s)?;
    let convex = convexity.strongly_convex;
    let spectrum = eigendecompose(&op, tol)?;
    let wants = |a: Analysis| inst.analyses.contains(&a);
    let mut rec = Recorder {
        checks: Vec::new(),
        skipped: Vec::new(),
    };

    let summary = InstanceSummary {
        vertices: s.len(),
        diameter: s.diameter(),
        host_order: s.host().order(),
        host_degree: s.host().degree(),
        boundary_vertices: s.boundary().len(),
        subcube_dimension: s.subcube_dimension(),
        path: s.is_path(),
        potential,
        convexity,
    };

    let spectrum_section = wants(Analysis::Spectrum).then(|| {
        let certificate = rec.outcome("spectrum", check_spectrum(&op, &spectrum, tol));
        let recurrence = rec.outcome("eigen_recurrence", rayleigh_gap_check(&spectrum, &op, tol));
        SpectrumSection {
            eigenvalues: spectrum.eigenvalues().to_vec(),
            lambda0: spectrum.eigenvalue(0),
            lambda1: spectrum.eigenvalue(1),
            gap: spectrum.gap().expect("two vertices"),
            sweeps: spectrum.sweeps(),
            certificate,
            recurrence,
        }
    });

    let bounds = if wants(Analysis::Bounds) {
        let report = verify_spectrum(&bound_inst, &op, &spectrum, tol)?;
        for c in &report.certificates {
            rec.check(
                &format!("bounds.{}", c.name),
                c.passed,
                c.failure.as_ref().map(|f| f.to_string()),
            );
        }
        if let Some(l) = &report.lattice {
            rec.check(
                "bounds.lattice_certificate",
                l.holds,
                (!l.holds).then(|| format!("violation {:e} at s = {}", l.max_violation, l.worst_s)),
            );
        }
        for r in &report.records {
            rec.check(
                &format!("bound.{}", r.bound.name()),
                r.holds,
                (!r.holds).then(|| format!("slack {:e} below -{:e}", r.slack, report.tol_verify)),
            );
        }
        for na in &report.not_applicable {
            rec.skip(&format!("bound.{}", na.bound.name()), na.reason.clone());
        }
        Some(report)
    } else {
        None
    };

    let (heat, eta_csv) = if wants(Analysis::Heat) {
        let (section, csv) = heat_analysis(inst, &op, &spectrum, potential_zero, convex, &mut rec)?;
        (Some(section), Some(csv))
    } else {
        (None, None)
    };

    let moduli = wants(Analysis::Moduli).then(|| moduli_analysis(inst, &spectrum, potential_zero, convex, &mut rec));

    let spectrum_csv = wants(Analysis::Spectrum).then(|| {
        let mut out = String::from("index,eigenvalue\n");
        for (i, v) in spectrum.eigenvalues().iter().enumerate() {
            out.push_str(&format!("{i},{}\n", fmt_float(*v)));
        }
        out
    });

    let passed = rec.checks.iter().all(|c| c.passed);
    Ok(RunOutput {
        report: RunReport {
            schema: crate::instance::SCHEMA_VERSION,
            name: inst.name.clone(),
            analyses: inst.analyses.clone(),
            instance: summary,
            tolerances: *tol,
            spectrum: spectrum_section,
            bounds,
            heat,
            moduli,
            checks: rec.checks,
            skipped: rec.skipped,
            passed,
        },
        spectrum_csv,
        eta_csv,
    })
}

fn heat_analysis(
    inst: &Instance,
    op: &SymmetricOperator,
    spectrum: &Spectrum,
    potential_zero: bool,
    convex: bool,
    rec: &mut Recorder,
) -> Result<(HeatSection, String), PipelineError> {
    let tol = &inst.tolerances;
    let s = &inst.subgraph;
    let gap = spectrum.gap().expect("two vertices");
    let rate = if potential_zero { spectrum.eigenvalue(1) } else { gap };
    let times = default_grid(rate);
    let phi0 = spectrum.eigenvector(1);
    let traj = evolve_spectral(spectrum, phi0, &times)?;

    let mut section = HeatSection {
        times: times.clone(),
        mu: None,
        decay: None,
        lattice_inequality: None,
        hypercube_eta2: None,
        ratio_evolution: None,
        euler: None,
    };

    if !potential_zero {
        rec.skip("heat.decay", "decay rate is certified for the Laplacian only");
        rec.skip(
            "heat.lattice_inequality",
            "lattice heat inequality is certified for the Laplacian only",
        );
    } else if !convex {
        rec.skip("heat.decay", "subgraph is not strongly convex");
        rec.skip("heat.lattice_inequality", "subgraph is not strongly convex");
    } else {
        let mu = match s.subcube_dimension() {
            Some(m) if m >= 1 => 2.0,
            _ => diameter_bound(s.diameter()).expect("positive diameter"),
        };
        section.mu = Some(mu);
        section.decay = rec.outcome("heat.decay", decay_rate_check(&traj, s, mu, tol));
        section.lattice_inequality =
            rec.outcome("heat.lattice_inequality", lattice_heat_inequality_check(&traj, s, tol));
    }
    match s.subcube_dimension() {
        Some(m) if m >= 2 && potential_zero => {
            section.hypercube_eta2 = rec.outcome("heat.hypercube_eta2", hypercube_eta2_check(&traj, s, tol));
        }
        _ => rec.skip(
            "heat.hypercube_eta2",
            "needs a Laplacian on a hypercube of dimension at least two",
        ),
    }
    section.ratio_evolution = rec.outcome("heat.ratio_evolution", ratio_evolution_check(spectrum, s, &times, tol));

    // Forward Euler against the spectral states. Per mode the error after
    // time t is at most λ² dt t / 2, so the sup-norm error is bounded by
    // ‖c‖₁ λ_max² dt T / 2 with c the eigen-coefficients of φ₀.
    let dt = EULER_FRACTION / op.gershgorin_max();
    let euler = evolve_euler(op, phi0, &times, dt)?;
    let horizon = *times.last().expect("non-empty grid");
    let lambda_max = spectrum.max_abs_eigenvalue();
    let c1: f64 = spectrum
        .eigenvectors()
        .iter()
        .map(|u| u.iter().zip(phi0).map(|(a, b)| a * b).sum::<f64>().abs())
        .sum();
    let error_bound = c1 * lambda_max * lambda_max * dt * horizon / 2.0 + tol.certificate * c1.max(1.0);
    let sup_error = traj
        .states
        .iter()
        .zip(&euler.states)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0f64, f64::max);
    let ok = sup_error <= error_bound;
    rec.check(
        "heat.euler_cross_check",
        ok,
        (!ok).then(|| format!("sup error {sup_error:e} exceeds {error_bound:e}")),
    );
    section.euler = Some(EulerCrossCheck {
        dt,
        sup_error,
        error_bound,
    });

    let mut csv = String::from("s,t,eta\n");
    for (t, eta) in times.iter().zip(traj.eta_series(s, tol)) {
        for (d, v) in eta.values().iter().enumerate() {
            csv.push_str(&format!("{d},{},{}\n", fmt_float(*t), fmt_float(*v)));
        }
    }
    Ok((section, csv))
}

fn moduli_analysis(
    inst: &Instance,
    spectrum: &Spectrum,
    potential_zero: bool,
    convex: bool,
    rec: &mut Recorder,
) -> ModuliSection {
    let tol = &inst.tolerances;
    let s = &inst.subgraph;
    let u1 = spectrum.eigenvector(1);
    let eta_u = modulus_of_continuity(u1, s, tol);
    let xi_u = extremal_pairs(&eta_u, u1, s);
    let mut section = ModuliSection {
        eta: eta_u.values().to_vec(),
        extremal_pairs: xi_u.len(),
        omega: None,
        omega_achievers: None,
        omega_infimum: None,
        omega_convex: None,
        log_concavity: None,
        ratio_constants: Vec::new(),
        boundary_continuity: None,
        boundary_monotonicity: None,
    };

    match RatioFunction::from_spectrum(spectrum) {
        Ok(ratio) => {
            let omega = modulus_of_concavity(ratio.g(), s);
            section.omega_achievers = Some((1..=omega.diameter()).map(|d| omega.achiever(d)).collect());
            section.omega = Some(omega.values().to_vec());
            section.omega_infimum = omega.infimum();
            section.omega_convex = Some(omega.is_convex(tol.zero));
            section.log_concavity = Some(log_concavity(s, ratio.g(), tol.zero));

            let eta_f = modulus_of_continuity(ratio.f(), s, tol);
            let xi_f = extremal_pairs(&eta_f, ratio.f(), s);
            let mut restrictions = vec![PairRestriction::All];
            if s.subcube_dimension().is_some() {
                restrictions.push(PairRestriction::DistanceLe2);
            }
            for restriction in restrictions {
                let outcome = c_u0(&ratio, &xi_f, s, restriction, tol);
                section.ratio_constants.push(RatioConstantOutcome {
                    restriction,
                    unavailable: outcome.as_ref().err().map(|e| e.to_string()),
                    constant: outcome.ok(),
                });
            }
            if potential_zero {
                // With a constant ground state the ratio constant is exactly one.
                for rc in &section.ratio_constants {
                    if let Some(c) = &rc.constant {
                        let dev = (c.value - 1.0).abs();
                        let ok = dev <= tol.verify;
                        let name = match rc.restriction {
                            PairRestriction::All => "moduli.unit_ratio_constant",
                            PairRestriction::DistanceLe2 => "moduli.unit_ratio_constant_le2",
                        };
                        rec.check(
                            name,
                            ok,
                            (!ok).then(|| format!("ratio constant {} deviates by {dev:e}", c.value)),
                        );
                    }
                }
            }
        }
        Err(e) => rec.skip("moduli.ground_state_ratio", e.to_string()),
    }

    if potential_zero && convex {
        let cont = boundary_continuity_violation(u1, s, &eta_u);
        rec.check(
            "moduli.boundary_continuity",
            cont.is_none(),
            cont.map(|w| format!("{w:?}")),
        );
        let mono = boundary_monotonicity_violation(u1, s, &xi_u);
        rec.check(
            "moduli.boundary_monotonicity",
            mono.is_none(),
            mono.map(|w| format!("{w:?}")),
        );
        section.boundary_continuity = cont;
        section.boundary_monotonicity = mono;
    } else {
        rec.skip(
            "moduli.boundary_checks",
            "need a Laplacian on a strongly convex subgraph",
        );
    }
    section
}
