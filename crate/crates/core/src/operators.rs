//! Combinatorial Laplacians, stoquastic Hamiltonians `H = L + W`, the
//! auxiliary path-lattice Laplacians, and their exact spectra.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::CertificateFailure;
use crate::config::Tolerances;
use crate::graphs::ConvexSubgraph;
use crate::jacobi::jacobi;
pub use crate::jacobi::SpectralError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Laplacian,
    Hamiltonian,
    PathLattice,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("potential is negative or not finite at vertex {vertex}: {value}")]
    NegativePotential { vertex: usize, value: f64 },
    #[error("potential has {got} entries, subgraph has {expected} vertices")]
    PotentialLength { expected: usize, got: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("entries do not form a {dim}x{dim} matrix")]
    Shape { dim: usize },
}

/// Dense real symmetric matrix tagged with what it represents.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricOperator {
    dim: usize,
    entries: Vec<f64>,
    kind: OperatorKind,
}

impl SymmetricOperator {
    /// Wraps row-major `entries`, checking exact symmetry.
    pub fn new(dim: usize, entries: Vec<f64>, kind: OperatorKind) -> Result<Self, OperatorError> {
        if entries.len() != dim * dim {
            return Err(OperatorError::Shape { dim });
        }
        for i in 0..dim {
            for j in i + 1..dim {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(OperatorError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { dim, entries, kind })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(u).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Gershgorin upper bound on the largest eigenvalue.
    pub fn gershgorin_max(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                let off: f64 = (0..self.dim).filter(|&j| j != i).map(|j| self.get(i, j).abs()).sum();
                self.get(i, i) + off
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Diagonal potential `W(x)`, recovered as the row sum. Zero for
    /// Laplacians.
    pub fn potential(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Off-diagonal neighbours `(j, weight)` with `weight = -A[i][j] != 0`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.row(i)
            .iter()
            .enumerate()
            .filter(move |&(j, &a)| j != i && a != 0.0)
            .map(|(j, &a)| (j, -a))
    }

    /// Sparse row structure for repeated matrix-vector products.
    pub fn sparse_rows(&self) -> Vec<Vec<(usize, f64)>> {
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .enumerate()
                    .filter(|&(_, &a)| a != 0.0)
                    .map(|(j, &a)| (j, a))
                    .collect()
            })
            .collect()
    }
}

/// Combinatorial Laplacian of S: degree in S on the diagonal, `-1` between
/// adjacent vertices.
pub fn laplacian(s: &ConvexSubgraph) -> SymmetricOperator {
    let n = s.len();
    let mut entries = vec![0.0; n * n];
    for x in 0..n {
        for (_, y) in s.neighbors(x) {
            entries[x * n + y] = -1.0;
            entries[x * n + x] += 1.0;
        }
    }
    SymmetricOperator {
        dim: n,
        entries,
        kind: OperatorKind::Laplacian,
    }
}

/// `(Lu)(x) = Σ_{a ∈ K_x} (u(x) - u(a·x))`, evaluated through the group action.
pub fn laplacian_action(s: &ConvexSubgraph, u: &[f64]) -> Vec<f64> {
    (0..s.len())
        .map(|x| s.neighbors(x).map(|(_, y)| u[x] - u[y]).sum())
        .collect()
}

/// Diagonal potential for `H = L + W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    /// `W(y)` counts boundary edges at `y`: the Dirichlet condition on δS.
    BoundaryInduced,
    /// Arbitrary non-negative values indexed by local vertex.
    Values(Vec<f64>),
}

/// Number of boundary edges at each vertex of S.
pub fn boundary_potential(s: &ConvexSubgraph) -> Vec<f64> {
    (0..s.len()).map(|x| s.boundary_degree(x) as f64).collect()
}

/// Resolves a potential to per-vertex values, validating non-negativity.
pub fn potential_values(s: &ConvexSubgraph, w: &Potential) -> Result<Vec<f64>, OperatorError> {
    match w {
        Potential::BoundaryInduced => Ok(boundary_potential(s)),
        Potential::Values(v) => {
            if v.len() != s.len() {
                return Err(OperatorError::PotentialLength {
                    expected: s.len(),
                    got: v.len(),
                });
            }
            if let Some((vertex, &value)) = v.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
                return Err(OperatorError::NegativePotential { vertex, value });
            }
            Ok(v.clone())
        }
    }
}

/// `H = L(S) + diag(W)`.
pub fn dirichlet_hamiltonian(s: &ConvexSubgraph, w: &Potential) -> Result<SymmetricOperator, OperatorError> {
    let values = potential_values(s, w)?;
    let mut op = laplacian(s);
    let n = op.dim;
    for (x, wx) in values.iter().enumerate() {
        op.entries[x * n + x] += wx;
    }
    op.kind = OperatorKind::Hamiltonian;
    Ok(op)
}

/// Which points of `[-D, D]` the auxiliary path lattice keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// Even points, step 2.
    Even,
    /// Odd points, step 2.
    Odd,
    /// Every integer, step 1.
    Unit,
}

impl Parity {
    /// The step-2 class containing `d`.
    pub fn of(d: usize) -> Self {
        if d.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn step(self) -> usize {
        match self {
            Parity::Unit => 1,
            _ => 2,
        }
    }

    pub fn contains(self, s: i64) -> bool {
        match self {
            Parity::Even => s.rem_euclid(2) == 0,
            Parity::Odd => s.rem_euclid(2) == 1,
            Parity::Unit => true,
        }
    }
}

/// Path graph over lattice points of `[-D, D]`, consecutive points joined.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLattice {
    pub diameter: usize,
    pub parity: Parity,
    pub points: Vec<i64>,
    pub operator: SymmetricOperator,
}

impl PathLattice {
    pub fn new(diameter: usize, parity: Parity) -> Self {
        let d = diameter as i64;
        let points: Vec<i64> = (-d..=d).filter(|&s| parity.contains(s)).collect();
        let operator = path_laplacian(points.len(), OperatorKind::PathLattice);
        Self {
            diameter,
            parity,
            points,
            operator,
        }
    }

    /// Smallest non-trivial eigenvalue, `2(1 - cos(π/m))` for `m` points.
    pub fn gap(&self) -> f64 {
        path_gap(self.points.len())
    }

    /// Index of the lattice point `s`.
    pub fn index_of(&self, s: i64) -> Option<usize> {
        self.points.binary_search(&s).ok()
    }
}

/// Laplacian of the auxiliary path lattice.
pub fn path_lattice_laplacian(diameter: usize, parity: Parity) -> SymmetricOperator {
    PathLattice::new(diameter, parity).operator
}

/// `λ_1` of the path on `m` vertices: `2(1 - cos(π/m))`; zero when `m < 2`.
pub fn path_gap(m: usize) -> f64 {
    if m < 2 {
        0.0
    } else {
        2.0 * (1.0 - (PI / m as f64).cos())
    }
}

fn path_laplacian(m: usize, kind: OperatorKind) -> SymmetricOperator {
    let mut entries = vec![0.0; m * m];
    for i in 0..m.saturating_sub(1) {
        entries[i * m + i + 1] = -1.0;
        entries[(i + 1) * m + i] = -1.0;
        entries[i * m + i] += 1.0;
        entries[(i + 1) * m + i + 1] += 1.0;
    }
    SymmetricOperator { dim: m, entries, kind }
}

/// Ascending eigenpairs of a symmetric operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    sweeps: usize,
}

/// Full spectrum by cyclic Jacobi.
///
/// Eigenvectors are unit length with their first non-negligible component
/// positive; ties in eigenvalue keep the solver's order.
pub fn eigendecompose(op: &SymmetricOperator, tol: &Tolerances) -> Result<Spectrum, SpectralError> {
    let raw = jacobi(op.entries.clone(), op.dim, tol.jacobi_threshold, tol.jacobi_max_sweeps)?;
    let mut order: Vec<usize> = (0..op.dim).collect();
    order.sort_by(|&i, &j| raw.values[i].total_cmp(&raw.values[j]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| raw.values[i]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| {
            let mut v = raw.vectors[i].clone();
            normalize_sign(&mut v);
            v
        })
        .collect();
    let residuals = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(&lambda, u)| {
            op.apply(u)
                .iter()
                .zip(u)
                .map(|(au, ui)| (au - lambda * ui).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        residuals,
        sweeps: raw.sweeps,
    })
}

fn normalize_sign(v: &mut [f64]) {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * scale) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, i: usize) -> f64 {
        self.eigenvalues[i]
    }

    pub fn eigenvector(&self, i: usize) -> &[f64] {
        &self.eigenvectors[i]
    }

    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// `λ_1 - λ_0`; `None` for a one-dimensional operator.
    pub fn gap(&self) -> Option<f64> {
        (self.len() >= 2).then(|| self.eigenvalues[1] - self.eigenvalues[0])
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Indices of eigenvalues within `tol` of `eigenvalue(i)`.
    pub fn eigenspace(&self, i: usize, tol: f64) -> Vec<usize> {
        let target = self.eigenvalues[i];
        (0..self.len())
            .filter(|&j| (self.eigenvalues[j] - target).abs() <= tol)
            .collect()
    }

    /// `max |<u_i, u_j> - δ_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let dot: f64 = self.eigenvectors[i]
                    .iter()
                    .zip(&self.eigenvectors[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Numerical health of a computed spectrum against its operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCertificate {
    pub max_residual: f64,
    pub residual_tolerance: f64,
    pub orthonormality_error: f64,
    pub trace_error: f64,
    pub sweeps: usize,
}

/// Checks residuals, orthonormality, the trace identity, and for
/// Laplacians/Hamiltonians the sign structure of the ground state.
pub fn check_spectrum(
    op: &SymmetricOperator,
    spectrum: &Spectrum,
    tol: &Tolerances,
) -> Result<SpectrumCertificate, CertificateFailure> {
    let residual_tolerance = tol.residual * spectrum.max_abs_eigenvalue().max(1.0);
    let (worst, max_residual) = spectrum
        .residuals
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    if max_residual > residual_tolerance {
        return Err(CertificateFailure::new("eigenpair residual", max_residual, residual_tolerance).at_vertex(worst));
    }
    let orthonormality_error = spectrum.orthonormality_error();
    if orthonormality_error > tol.orthonormality {
        return Err(CertificateFailure::new(
            "orthonormality",
            orthonormality_error,
            tol.orthonormality,
        ));
    }
    let trace = op.trace();
    let sum: f64 = spectrum.eigenvalues.iter().sum();
    let trace_error = (sum - trace).abs() / trace.abs().max(1.0);
    if trace_error > tol.trace {
        return Err(CertificateFailure::new("trace", trace_error, tol.trace));
    }
    match op.kind() {
        OperatorKind::Laplacian | OperatorKind::PathLattice => {
            let l0 = spectrum.eigenvalue(0);
            if l0.abs() > tol.residual * spectrum.max_abs_eigenvalue().max(1.0) {
                return Err(CertificateFailure::new(
                    "laplacian ground eigenvalue",
                    l0.abs(),
                    tol.residual,
                ));
            }
        }
        OperatorKind::Hamiltonian => {}
    }
    if op.kind() != OperatorKind::PathLattice {
        if let Some((x, &v)) = spectrum.eigenvector(0).iter().enumerate().find(|(_, &v)| v <= 0.0) {
            return Err(CertificateFailure::new("ground state positivity", -v, 0.0).at_vertex(x));
        }
    }
    Ok(SpectrumCertificate {
        max_residual,
        residual_tolerance,
        orthonormality_error,
        trace_error,
        sweeps: spectrum.sweeps,
    })
}

/// `u^T A u / u^T u`, with the numerator in edge form
/// `Σ_{x~y} w_xy (u(x) - u(y))^2 + Σ_x W(x) u(x)^2`.
pub fn rayleigh_quotient(op: &SymmetricOperator, u: &[f64]) -> f64 {
    let w = op.potential();
    let mut num = 0.0;
    for x in 0..op.dim() {
        num += w[x] * u[x] * u[x];
        for (y, weight) in op.neighbors(x) {
            if x < y {
                num += weight * (u[x] - u[y]).powi(2);
            }
        }
    }
    num / u.iter().map(|v| v * v).sum::<f64>()
}

/// Certifies the eigen-recurrence for every pair and the variational
/// characterisation of `λ_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayleighCertificate {
    pub max_recurrence_deviation: f64,
    pub lambda1: f64,
    pub rayleigh_lambda1: f64,
    pub u1_dot_u0: f64,
}

/// Checks, for every eigenpair, `-λ u(x) = Σ_{y~x} (u(y) - u(x)) - W(x) u(x)`
/// componentwise, then that the Rayleigh quotient of `u_1` reproduces `λ_1`
/// with `u_1 ⊥ u_0`.
pub fn rayleigh_gap_check(
    spectrum: &Spectrum,
    op: &SymmetricOperator,
    tol: &Tolerances,
) -> Result<RayleighCertificate, CertificateFailure> {
    let scale = spectrum.max_abs_eigenvalue().max(1.0);
    let limit = tol.certificate * scale;
    let w = op.potential();
    let rows: Vec<Vec<(usize, f64)>> = (0..op.dim()).map(|x| op.neighbors(x).collect()).collect();
    let mut max_dev = 0.0f64;
    for (lambda, u) in spectrum.eigenvalues.iter().zip(&spectrum.eigenvectors) {
        for x in 0..op.dim() {
            let flow: f64 = rows[x].iter().map(|&(y, weight)| weight * (u[y] - u[x])).sum();
            let dev = (-lambda * u[x] - (flow - w[x] * u[x])).abs();
            if dev > limit {
                return Err(CertificateFailure::new("eigen-recurrence", dev, limit).at_vertex(x));
            }
            max_dev = max_dev.max(dev);
        }
    }
    let (lambda1, rayleigh_lambda1, u1_dot_u0) = if spectrum.len() >= 2 {
        let u0 = spectrum.eigenvector(0);
        let u1 = spectrum.eigenvector(1);
        let dot: f64 = u0.iter().zip(u1).map(|(a, b)| a * b).sum();
        if dot.abs() > tol.certificate {
            return Err(CertificateFailure::new(
                "u1 orthogonal to u0",
                dot.abs(),
                tol.certificate,
            ));
        }
        let q = rayleigh_quotient(op, u1);
        let l1 = spectrum.eigenvalue(1);
        if (q - l1).abs() > limit {
            return Err(CertificateFailure::new(
                "rayleigh quotient of u1",
                (q - l1).abs(),
                limit,
            ));
        }
        (l1, q, dot)
    } else {
        let l0 = spectrum.eigenvalue(0);
        (l0, rayleigh_quotient(op, spectrum.eigenvector(0)), 0.0)
    };
    Ok(RayleighCertificate {
        max_recurrence_deviation: max_dev,
        lambda1,
        rayleigh_lambda1,
        u1_dot_u0,
    })
}
