//! Heat flow `dφ/dt = -Aφ` for Laplacians and Hamiltonians, with the
//! decay and differential-inequality certificates built on it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::CertificateFailure;
use crate::config::Tolerances;
use crate::graphs::ConvexSubgraph;
use crate::moduli::{modulus_of_continuity, ratio_flow, ModulusOfContinuity};
use crate::operators::{eigendecompose, Parity, PathLattice, SpectralError, Spectrum, SymmetricOperator};

/// Samples in the default time grid.
pub const DEFAULT_SAMPLES: usize = 64;
/// Decades the decay fit must span.
pub const MIN_DECADES: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeatError {
    #[error("explicit step {dt:e} is not below the stability limit {limit:e}")]
    UnstableStep { dt: f64, limit: f64 },
    #[error("decay spans only {decades:.2} decades, need {required}")]
    InsufficientSpan { decades: f64, required: f64 },
    #[error("sample times must be non-negative and strictly increasing")]
    InvalidGrid,
    #[error("initial state has length {got}, operator has dimension {expected}")]
    Shape { expected: usize, got: usize },
    #[error("this check needs a spectral trajectory")]
    NeedsSpectral,
    #[error("subgraph is not a hypercube of dimension at least two")]
    NotHypercube,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Certificate(#[from] CertificateFailure),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatMethod {
    /// Exact evolution in the eigenbasis.
    Spectral,
    /// Forward Euler with a fixed step.
    Euler { dt: f64 },
}

/// `φ(t) = Σ_i <u_i, φ_0> e^{-λ_i t} u_i`, evaluable at any time.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEvolver {
    initial: Vec<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
    coefficients: Vec<f64>,
}

impl SpectralEvolver {
    pub fn new(spectrum: &Spectrum, phi0: &[f64]) -> Result<Self, HeatError> {
        if phi0.len() != spectrum.len() {
            return Err(HeatError::Shape {
                expected: spectrum.len(),
                got: phi0.len(),
            });
        }
        let coefficients = spectrum
            .eigenvectors()
            .iter()
            .map(|u| u.iter().zip(phi0).map(|(a, b)| a * b).sum())
            .collect();
        Ok(Self {
            initial: phi0.to_vec(),
            eigenvalues: spectrum.eigenvalues().to_vec(),
            eigenvectors: spectrum.eigenvectors().to_vec(),
            coefficients,
        })
    }

    /// Exactly `φ_0` at `t = 0`: re-expanding it would add roundoff that
    /// ratios against small ground-state entries amplify.
    pub fn state_at(&self, t: f64) -> Vec<f64> {
        if t == 0.0 {
            return self.initial.clone();
        }
        let n = self.eigenvalues.len();
        let mut out = vec![0.0; n];
        for ((lambda, u), c) in self.eigenvalues.iter().zip(&self.eigenvectors).zip(&self.coefficients) {
            let w = c * (-lambda * t).exp();
            if w == 0.0 {
                continue;
            }
            for (o, ui) in out.iter_mut().zip(u) {
                *o += w * ui;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub method: HeatMethod,
    evolver: Option<SpectralEvolver>,
}

impl HeatTrajectory {
    /// `η(·, t_k)` of each sampled state.
    pub fn eta_series(&self, s: &ConvexSubgraph, tol: &Tolerances) -> Vec<ModulusOfContinuity> {
        self.states
            .iter()
            .map(|phi| modulus_of_continuity(phi, s, tol))
            .collect()
    }

    /// `Σ_x φ(x, t_k)`.
    pub fn mass(&self) -> Vec<f64> {
        self.states.iter().map(|phi| phi.iter().sum()).collect()
    }

    pub fn evolver(&self) -> Option<&SpectralEvolver> {
        self.evolver.as_ref()
    }
}

fn check_grid(times: &[f64]) -> Result<(), HeatError> {
    let increasing = times.windows(2).all(|w| w[0] < w[1]);
    if times.is_empty() || !increasing || !(times[0] >= 0.0) || times.iter().any(|t| !t.is_finite()) {
        return Err(HeatError::InvalidGrid);
    }
    Ok(())
}

/// `t = 0` followed by log-spaced samples over `[10^-4 T, T]`, `T = 10/λ_1`.
pub fn default_grid(lambda1: f64) -> Vec<f64> {
    let horizon = 10.0 / lambda1;
    let m = DEFAULT_SAMPLES - 1;
    std::iter::once(0.0)
        .chain((0..m).map(|k| horizon * 10f64.powf(-4.0 * (1.0 - k as f64 / (m - 1) as f64))))
        .collect()
}

pub fn evolve_spectral(spectrum: &Spectrum, phi0: &[f64], times: &[f64]) -> Result<HeatTrajectory, HeatError> {
    check_grid(times)?;
    let evolver = SpectralEvolver::new(spectrum, phi0)?;
    let states = times.iter().map(|&t| evolver.state_at(t)).collect();
    Ok(HeatTrajectory {
        times: times.to_vec(),
        states,
        method: HeatMethod::Spectral,
        evolver: Some(evolver),
    })
}

/// Forward Euler on the sparse operator; the last step into each sample
/// time is shortened to land on it exactly.
pub fn evolve_euler(op: &SymmetricOperator, phi0: &[f64], times: &[f64], dt: f64) -> Result<HeatTrajectory, HeatError> {
    check_grid(times)?;
    if phi0.len() != op.dim() {
        return Err(HeatError::Shape {
            expected: op.dim(),
            got: phi0.len(),
        });
    }
    let limit = 1.0 / op.gershgorin_max();
    if !(dt > 0.0 && dt < limit) {
        return Err(HeatError::UnstableStep { dt, limit });
    }
    let rows = op.sparse_rows();
    let mut phi = phi0.to_vec();
    let mut next = vec![0.0; phi.len()];
    let mut now = 0.0;
    let mut states = Vec::with_capacity(times.len());
    for &target in times {
        while now < target {
            let h = dt.min(target - now);
            for (x, row) in rows.iter().enumerate() {
                let a_phi: f64 = row.iter().map(|&(y, a)| a * phi[y]).sum();
                next[x] = phi[x] - h * a_phi;
            }
            std::mem::swap(&mut phi, &mut next);
            now = if target - now <= dt { target } else { now + dt };
        }
        states.push(phi.clone());
    }
    Ok(HeatTrajectory {
        times: times.to_vec(),
        states,
        method: HeatMethod::Euler { dt },
        evolver: None,
    })
}

/// Solves `op` when needed and evolves `phi0` by the chosen method.
pub fn evolve(
    op: &SymmetricOperator,
    phi0: &[f64],
    times: &[f64],
    method: HeatMethod,
    tol: &Tolerances,
) -> Result<HeatTrajectory, HeatError> {
    match method {
        HeatMethod::Spectral => evolve_spectral(&eigendecompose(op, tol)?, phi0, times),
        HeatMethod::Euler { dt } => evolve_euler(op, phi0, times, dt),
    }
}

/// Centered difference from samples at `t - 2h, t - h, t + h, t + 2h`,
/// with a truncation estimate from the third difference plus a roundoff
/// floor.
fn centered_derivative([m2, m1, p1, p2]: [f64; 4], h: f64) -> (f64, f64) {
    let derivative = (p1 - m1) / (2.0 * h);
    let third = (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h);
    let scale = p1.abs().max(m1.abs()).max(p2.abs()).max(m2.abs()).max(1.0);
    let truncation = 10.0 * third.abs() * h * h / 6.0;
    let roundoff = 1e3 * f64::EPSILON * scale / h;
    (derivative, truncation + roundoff)
}

/// Step for centered differences, `10^-3 / λ_max`.
fn difference_step(evolver: &SpectralEvolver) -> f64 {
    let lmax = evolver.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    1e-3 / lmax.max(1e-12)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub fitted_rate: f64,
    pub mu: f64,
    pub decades: f64,
    pub samples: usize,
}

/// Fits `log η(D, t) ≈ a - r t` by least squares and requires `r >= μ - tol`.
pub fn decay_rate_check(
    traj: &HeatTrajectory,
    s: &ConvexSubgraph,
    mu: f64,
    tol: &Tolerances,
) -> Result<DecayCertificate, HeatError> {
    let d = s.diameter() as i64;
    let points: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(traj.eta_series(s, tol))
        .map(|(&t, eta)| (t, eta.value(d)))
        .filter(|&(_, v)| v > 0.0)
        .map(|(t, v)| (t, v.ln()))
        .collect();
    let decades = match (points.first(), points.last()) {
        (Some(a), Some(b)) if points.len() >= 2 => (a.1 - b.1) / std::f64::consts::LN_10,
        _ => 0.0,
    };
    if decades < MIN_DECADES {
        return Err(HeatError::InsufficientSpan {
            decades,
            required: MIN_DECADES,
        });
    }
    let m = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let fitted_rate = -sxy / sxx;
    if fitted_rate < mu - tol.decay_rate {
        return Err(CertificateFailure::new("decay rate", mu - fitted_rate, tol.decay_rate).into());
    }
    Ok(DecayCertificate {
        fitted_rate,
        mu,
        decades,
        samples: points.len(),
    })
}

/// Outcome of a sampled differential inequality `dη/dt <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialCertificate {
    pub checks: usize,
    /// Largest `dη/dt - rhs` seen, before tolerance.
    pub max_excess: f64,
    pub worst_s: i64,
    pub worst_t: f64,
    pub step: f64,
}

/// Shared loop: for every sample time and every requested `s`, compares
/// the centered derivative of `η(s, ·)` with `rhs(η(·, t), s)`.
fn differential_check(
    traj: &HeatTrajectory,
    s: &ConvexSubgraph,
    tol: &Tolerances,
    name: &str,
    points: &[i64],
    rhs: impl Fn(&ModulusOfContinuity, i64) -> f64,
) -> Result<DifferentialCertificate, HeatError> {
    let evolver = traj.evolver.as_ref().ok_or(HeatError::NeedsSpectral)?;
    let h = difference_step(evolver);
    let eta_at = |t: f64| modulus_of_continuity(&evolver.state_at(t), s, tol);
    let mut cert = DifferentialCertificate {
        checks: 0,
        max_excess: f64::NEG_INFINITY,
        worst_s: 0,
        worst_t: 0.0,
        step: h,
    };
    for &t in &traj.times {
        let etas: Vec<ModulusOfContinuity> = [-2.0, -1.0, 1.0, 2.0].iter().map(|k| eta_at(t + k * h)).collect();
        let now = eta_at(t);
        for &p in points {
            let stencil = [etas[0].value(p), etas[1].value(p), etas[2].value(p), etas[3].value(p)];
            let (derivative, tol_dt) = centered_derivative(stencil, h);
            let bound = rhs(&now, p);
            let floor = tol.certificate * now.value(p).abs().max(1.0);
            let excess = derivative - bound;
            cert.checks += 1;
            if excess > cert.max_excess {
                cert.max_excess = excess;
                cert.worst_s = p;
                cert.worst_t = t;
            }
            if excess > tol_dt + floor {
                return Err(CertificateFailure::new(name, excess, tol_dt + floor)
                    .at_distance(p)
                    .at_time(t)
                    .into());
            }
        }
    }
    Ok(cert)
}

/// `dη(s)/dt <= -(L_P η)(s)` on the lattice of `[-D, D]` with the parity
/// of `D`, for every `s > 0` in that class and every sample time.
pub fn lattice_heat_inequality_check(
    traj: &HeatTrajectory,
    s: &ConvexSubgraph,
    tol: &Tolerances,
) -> Result<DifferentialCertificate, HeatError> {
    let d = s.diameter();
    let lattice = PathLattice::new(d, Parity::of(d));
    let points: Vec<i64> = lattice.points.iter().copied().filter(|&p| p > 0).collect();
    differential_check(traj, s, tol, "lattice heat inequality", &points, |eta, p| {
        let values = eta.on_lattice(&lattice);
        let i = lattice.index_of(p).expect("lattice point");
        -lattice
            .operator
            .row(i)
            .iter()
            .zip(&values)
            .map(|(a, v)| a * v)
            .sum::<f64>()
    })
}

/// `dη(2)/dt <= -2 η(2)` on a hypercube.
pub fn hypercube_eta2_check(
    traj: &HeatTrajectory,
    s: &ConvexSubgraph,
    tol: &Tolerances,
) -> Result<DifferentialCertificate, HeatError> {
    match s.subcube_dimension() {
        Some(m) if m >= 2 => {}
        _ => return Err(HeatError::NotHypercube),
    }
    differential_check(traj, s, tol, "hypercube second-distance decay", &[2], |eta, _| {
        -2.0 * eta.value(2)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioEvolutionCertificate {
    /// `max_x |γ f(x) + Σ_a Δ_a f(x) e^{g(ax)-g(x)}|` at `t = 0`.
    pub identity_residual: f64,
    pub identity_tolerance: f64,
    /// Largest `|df/dt - Σ_a Δ_a f e^{g(a·)-g}|` over samples, before tolerance.
    pub evolution_residual: f64,
    pub checks: usize,
}

/// Evolves `u_0` and `u_1` under `H`, forms `f = u_1/u_0` and `g = log u_0`
/// along the flow, and checks the ratio evolution law and its `t = 0`
/// eigen-identity.
pub fn ratio_evolution_check(
    spectrum: &Spectrum,
    s: &ConvexSubgraph,
    times: &[f64],
    tol: &Tolerances,
) -> Result<RatioEvolutionCertificate, HeatError> {
    check_grid(times)?;
    if spectrum.len() != s.len() || spectrum.len() < 2 {
        return Err(HeatError::Shape {
            expected: s.len(),
            got: spectrum.len(),
        });
    }
    let gamma = spectrum.gap().expect("two eigenpairs");
    let e0 = SpectralEvolver::new(spectrum, spectrum.eigenvector(0))?;
    let e1 = SpectralEvolver::new(spectrum, spectrum.eigenvector(1))?;
    let fields = |t: f64| -> Result<(Vec<f64>, Vec<f64>), HeatError> {
        let u0 = e0.state_at(t);
        let u1 = e1.state_at(t);
        if let Some((x, &v)) = u0.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(CertificateFailure::new("ground state positivity", -v, 0.0)
                .at_vertex(x)
                .at_time(t)
                .into());
        }
        let f = u1.iter().zip(&u0).map(|(a, b)| a / b).collect();
        let g = u0.iter().map(|v| v.ln()).collect();
        Ok((f, g))
    };

    let (f0, g0) = fields(0.0)?;
    let scale = f0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let identity_tolerance = tol.ratio_identity * scale;
    let mut identity_residual = 0.0f64;
    for x in 0..s.len() {
        let r = (gamma * f0[x] + ratio_flow(s, &f0, Some(&g0), x)).abs();
        if r > identity_tolerance {
            return Err(CertificateFailure::new("ratio eigen-identity", r, identity_tolerance)
                .at_vertex(x)
                .into());
        }
        identity_residual = identity_residual.max(r);
    }

    let h = difference_step(&e0);
    let mut evolution_residual = 0.0f64;
    let mut checks = 0;
    for &t in times {
        let (f, g) = fields(t)?;
        let stencil: Vec<Vec<f64>> = [-2.0, -1.0, 1.0, 2.0]
            .iter()
            .map(|k| fields(t + k * h).map(|(f, _)| f))
            .collect::<Result<_, _>>()?;
        for x in 0..s.len() {
            let values = [stencil[0][x], stencil[1][x], stencil[2][x], stencil[3][x]];
            let (derivative, tol_dt) = centered_derivative(values, h);
            let flow = ratio_flow(s, &f, Some(&g), x);
            let r = (derivative - flow).abs();
            let limit = tol_dt + tol.certificate * scale;
            checks += 1;
            evolution_residual = evolution_residual.max(r);
            if r > limit {
                return Err(CertificateFailure::new("ratio evolution", r, limit)
                    .at_vertex(x)
                    .at_time(t)
                    .into());
            }
        }
    }
    Ok(RatioEvolutionCertificate {
        identity_residual,
        identity_tolerance,
        evolution_residual,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{cycle_subgraph, hypercube_subgraph, path_subgraph};
    use crate::operators::{dirichlet_hamiltonian, laplacian, Potential};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn eigenvector_decays_exponentially() {
        let s = path_subgraph(5).unwrap();
        let spec = eigendecompose(&laplacian(&s), &tol()).unwrap();
        let u = spec.eigenvector(2);
        let traj = evolve_spectral(&spec, u, &[0.0, 0.5, 2.0]).unwrap();
        for (t, phi) in traj.times.iter().zip(&traj.states) {
            let expected: Vec<f64> = u.iter().map(|v| v * (-spec.eigenvalue(2) * t).exp()).collect();
            assert!(sup_diff(phi, &expected) < 1e-12);
        }
    }

    #[test]
    fn constant_is_stationary_and_mass_is_conserved() {
        let s = hypercube_subgraph(3).unwrap();
        let spec = eigendecompose(&laplacian(&s), &tol()).unwrap();
        let traj = evolve_spectral(&spec, &[0.7; 8], &default_grid(2.0)).unwrap();
        assert!(traj.states.iter().all(|phi| sup_diff(phi, &[0.7; 8]) < 1e-12));
        let phi0: Vec<f64> = (0..8).map(|x| (x as f64).sin()).collect();
        let traj = evolve_spectral(&spec, &phi0, &default_grid(2.0)).unwrap();
        let mass0: f64 = phi0.iter().sum();
        assert!(traj.mass().iter().all(|m| (m - mass0).abs() < 1e-9));
        assert!(sup_diff(&traj.states[0], &phi0) < 1e-10);
    }

    #[test]
    fn spectral_and_euler_agree() {
        let s = path_subgraph(5).unwrap();
        let op = laplacian(&s);
        let spec = eigendecompose(&op, &tol()).unwrap();
        let phi0 = [0.3, -1.0, 0.8, 0.1, -0.4];
        let times = [0.0, 0.1, 0.5, 1.0];
        let a = evolve_spectral(&spec, &phi0, &times).unwrap();
        let b = evolve_euler(&op, &phi0, &times, 1e-3).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            assert!(sup_diff(x, y) < 5e-3);
        }
        let c = evolve_euler(&op, &phi0, &times, 1e-5).unwrap();
        for (x, y) in a.states.iter().zip(&c.states) {
            assert!(sup_diff(x, y) < 5e-5);
        }
    }

    #[test]
    fn semigroup_property() {
        let s = cycle_subgraph(7).unwrap();
        let spec = eigendecompose(&laplacian(&s), &tol()).unwrap();
        let phi0: Vec<f64> = (0..7).map(|x| (x as f64 * 1.3).cos()).collect();
        let whole = evolve_spectral(&spec, &phi0, &[0.9]).unwrap();
        let half = evolve_spectral(&spec, &phi0, &[0.4]).unwrap();
        let rest = evolve_spectral(&spec, &half.states[0], &[0.5]).unwrap();
        assert!(sup_diff(&whole.states[0], &rest.states[0]) < 1e-9);
    }

    #[test]
    fn unstable_step_is_rejected() {
        let s = path_subgraph(4).unwrap();
        let op = laplacian(&s);
        assert!(matches!(
            evolve_euler(&op, &[0.0; 4], &[1.0], 0.5),
            Err(HeatError::UnstableStep { .. })
        ));
        assert_eq!(
            evolve_euler(&op, &[0.0; 4], &[1.0, 0.5], 0.01),
            Err(HeatError::InvalidGrid)
        );
    }

    #[test]
    fn decay_rates_match_known_gaps() {
        let cases: Vec<(ConvexSubgraph, f64)> = vec![
            (path_subgraph(3).unwrap(), 1.0),
            (hypercube_subgraph(2).unwrap(), 2.0),
            (
                cycle_subgraph(6).unwrap(),
                2.0 * (1.0 - (std::f64::consts::PI / 4.0).cos()),
            ),
        ];
        for (s, mu) in cases {
            let spec = eigendecompose(&laplacian(&s), &tol()).unwrap();
            let lambda1 = spec.eigenvalue(1);
            let traj = evolve_spectral(&spec, spec.eigenvector(1), &default_grid(lambda1)).unwrap();
            let cert = decay_rate_check(&traj, &s, mu, &tol()).unwrap();
            assert!((cert.fitted_rate - lambda1).abs() < 1e-8, "{cert:?}");
        }
    }

    #[test]
    fn short_grid_has_insufficient_span() {
        let s = path_subgraph(3).unwrap();
        let spec = eigendecompose(&laplacian(&s), &tol()).unwrap();
        let traj = evolve_spectral(&spec, spec.eigenvector(1), &[0.0, 1.0]).unwrap();
        assert!(matches!(
            decay_rate_check(&traj, &s, 1.0, &tol()),
            Err(HeatError::InsufficientSpan { .. })
        ));
    }

    #[test]
    fn lattice_heat_inequality_on_path_and_cube() {
        for s in [path_subgraph(5).unwrap(), hypercube_subgraph(3).unwrap()] {
            let spec = eigendecompose(&laplacian(&s), &tol()).unwrap();
            let grid = default_grid(spec.eigenvalue(1));
            let traj = evolve_spectral(&spec, spec.eigenvector(1), &grid).unwrap();
            lattice_heat_inequality_check(&traj, &s, &tol()).unwrap();
            let phi0: Vec<f64> = (0..s.len()).map(|x| ((x * x) as f64 * 0.37).sin()).collect();
            let traj = evolve_spectral(&spec, &phi0, &grid).unwrap();
            lattice_heat_inequality_check(&traj, &s, &tol()).unwrap();
        }
    }

    #[test]
    fn constant_state_satisfies_inequality_trivially() {
        let s = path_subgraph(4).unwrap();
        let spec = eigendecompose(&laplacian(&s), &tol()).unwrap();
        let traj = evolve_spectral(&spec, &[1.0; 4], &[0.0, 1.0]).unwrap();
        let cert = lattice_heat_inequality_check(&traj, &s, &tol()).unwrap();
        assert!(cert.max_excess.abs() < 1e-9);
    }

    #[test]
    fn cube_second_distance_decay() {
        let s = hypercube_subgraph(3).unwrap();
        let spec = eigendecompose(&laplacian(&s), &tol()).unwrap();
        let traj = evolve_spectral(&spec, spec.eigenvector(1), &default_grid(2.0)).unwrap();
        hypercube_eta2_check(&traj, &s, &tol()).unwrap();
        let p = path_subgraph(4).unwrap();
        assert_eq!(hypercube_eta2_check(&traj, &p, &tol()), Err(HeatError::NotHypercube));
    }

    #[test]
    fn euler_trajectory_cannot_drive_difference_checks() {
        let s = path_subgraph(3).unwrap();
        let traj = evolve_euler(&laplacian(&s), &[1.0, 0.0, -1.0], &[0.0, 0.1], 0.01).unwrap();
        assert_eq!(
            lattice_heat_inequality_check(&traj, &s, &tol()),
            Err(HeatError::NeedsSpectral)
        );
    }

    #[test]
    fn ratio_identity_single_edge_and_random_path() {
        let s = path_subgraph(2).unwrap();
        let h = dirichlet_hamiltonian(&s, &Potential::Values(vec![0.0, 1.0])).unwrap();
        let spec = eigendecompose(&h, &tol()).unwrap();
        // Closed form: eigenvalues 1 ∓ sqrt(5)/2 + 1/2.
        let gamma = 5f64.sqrt();
        assert!((spec.gap().unwrap() - gamma).abs() < 1e-12);
        let cert = ratio_evolution_check(&spec, &s, &[0.0, 0.3, 1.0], &tol()).unwrap();
        assert!(cert.identity_residual < 1e-12);

        let s = path_subgraph(4).unwrap();
        let h = dirichlet_hamiltonian(&s, &Potential::Values(vec![0.4, 2.9, 0.0, 1.3])).unwrap();
        let spec = eigendecompose(&h, &tol()).unwrap();
        let cert = ratio_evolution_check(&spec, &s, &default_grid(spec.gap().unwrap()), &tol()).unwrap();
        assert!(cert.identity_residual < 1e-8);
    }

    #[test]
    fn ratio_identity_with_small_ground_state_entries() {
        // The ground state spans five decades here, so the identity only
        // holds to 1e-8 if the smallest entries keep their relative accuracy.
        let w = vec![
            0.4570714410988863,
            1.507111661437981,
            0.6733838602810138,
            2.1273829019890442,
            1.4986511401097236,
            2.4413515025910524,
            1.56424040741609,
            2.539022825319627,
            4.584132645693586,
            2.2063049620146273,
            3.1703954215609267,
            3.98567746063671,
        ];
        let s = path_subgraph(12).unwrap();
        let h = dirichlet_hamiltonian(&s, &Potential::Values(w)).unwrap();
        let spec = eigendecompose(&h, &tol()).unwrap();
        assert!(spec.eigenvector(0).iter().any(|v| v.abs() < 1e-5));
        let cert = ratio_evolution_check(&spec, &s, &[0.0], &tol()).unwrap();
        assert!(cert.identity_residual <= 1e-8, "{cert:?}");
    }
}
