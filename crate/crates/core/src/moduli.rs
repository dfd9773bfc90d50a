//! Moduli of continuity and concavity, the ground-state ratio `f = u1/u0`,
//! extremal pairs and the ratio constant `C_{u0}`.
//!
//! All vertex functions are indexed by local subgraph index. Distances are
//! host word-metric distances, which coincide with intra-subgraph
//! distances on strongly convex subgraphs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Tolerances;
use crate::graphs::ConvexSubgraph;
use crate::operators::{PathLattice, Spectrum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModuliError {
    #[error("ground state is not strictly positive at vertex {vertex} ({value})")]
    NonPositiveGroundState { vertex: usize, value: f64 },
    #[error("every extremal pair was skipped ({skipped} pairs); ratio constant unavailable")]
    EmptyAfterSkips { skipped: usize },
    #[error("need at least two eigenpairs to form the ratio function")]
    TooFewEigenpairs,
    #[error("subset choice violates the shared-generator constraint")]
    InvalidSubsets,
}

/// Ordered pair `(y, x)` of local vertices.
pub type Pair = (usize, usize);

/// `η(s) = sup { f(y) - f(x) : d(y, x) <= s }`, antisymmetric in `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusOfContinuity {
    diameter: usize,
    values: Vec<f64>,
    achievers: Vec<Vec<(u32, u32)>>,
    tie: f64,
}

impl ModulusOfContinuity {
    pub fn diameter(&self) -> usize {
        self.diameter
    }

    /// `η(0..=D)`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `η(s)` for any integer `s`; `η(-s) = -η(s)` and `η(s) = η(D)` past
    /// the diameter.
    pub fn value(&self, s: i64) -> f64 {
        let v = self.values[(s.unsigned_abs() as usize).min(self.diameter)];
        if s < 0 {
            -v
        } else {
            v
        }
    }

    /// Pairs `(y, x)` with `d(y, x) <= s` attaining `η(s)` within the tie
    /// tolerance. Empty for `s = 0`.
    pub fn achievers(&self, s: usize) -> impl Iterator<Item = Pair> + '_ {
        self.achievers[s].iter().map(|&(y, x)| (y as usize, x as usize))
    }

    pub fn tie(&self) -> f64 {
        self.tie
    }

    /// Values at the lattice points, in lattice order.
    pub fn on_lattice(&self, lattice: &PathLattice) -> Vec<f64> {
        lattice.points.iter().map(|&s| self.value(s)).collect()
    }
}

/// Exhaustive pair scan for the modulus of continuity of `f` on S.
pub fn modulus_of_continuity(f: &[f64], s: &ConvexSubgraph, tol: &Tolerances) -> ModulusOfContinuity {
    let n = s.len();
    let diameter = s.diameter();
    let mut by_distance = vec![0.0f64; diameter + 1];
    for y in 0..n {
        for x in 0..n {
            let d = s.dist(y, x);
            let v = f[y] - f[x];
            if v > by_distance[d] {
                by_distance[d] = v;
            }
        }
    }
    let mut values = vec![0.0f64; diameter + 1];
    for d in 1..=diameter {
        values[d] = values[d - 1].max(by_distance[d]);
    }
    let tie = tol.tie_for(values[diameter]);
    let mut achievers = vec![Vec::new(); diameter + 1];
    for y in 0..n {
        for x in 0..n {
            if x == y {
                continue;
            }
            let d = s.dist(y, x);
            let v = f[y] - f[x];
            let mut t = d;
            while t <= diameter && v >= values[t] - tie {
                achievers[t].push((y as u32, x as u32));
                t += 1;
            }
        }
    }
    ModulusOfContinuity {
        diameter,
        values,
        achievers,
        tie,
    }
}

/// `u0 > 0` on S, with `f = u1/u0` and `g = log u0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioFunction {
    u0: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
}

impl RatioFunction {
    pub fn new(u0: &[f64], u1: &[f64]) -> Result<Self, ModuliError> {
        if let Some((vertex, &value)) = u0.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(ModuliError::NonPositiveGroundState { vertex, value });
        }
        Ok(Self {
            u0: u0.to_vec(),
            f: u1.iter().zip(u0).map(|(a, b)| a / b).collect(),
            g: u0.iter().map(|v| v.ln()).collect(),
        })
    }

    /// Uses the two lowest eigenpairs.
    pub fn from_spectrum(spectrum: &Spectrum) -> Result<Self, ModuliError> {
        if spectrum.len() < 2 {
            return Err(ModuliError::TooFewEigenpairs);
        }
        Self::new(spectrum.eigenvector(0), spectrum.eigenvector(1))
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn u0(&self) -> &[f64] {
        &self.u0
    }

    /// `Σ_x f(x) u0(x)^2`, which vanishes when `u1 ⊥ u0`.
    pub fn weighted_mean(&self) -> f64 {
        self.f.iter().zip(&self.u0).map(|(f, u)| f * u * u).sum()
    }

    /// `Δ_a f(x)`, zero when `a·x` leaves S.
    pub fn delta(&self, s: &ConvexSubgraph, gen_index: usize, x: usize) -> f64 {
        s.step(gen_index, x).map_or(0.0, |y| self.f[y] - self.f[x])
    }

    /// `Σ_a Δ_a f(x)`.
    pub fn flow(&self, s: &ConvexSubgraph, x: usize) -> f64 {
        ratio_flow(s, &self.f, None, x)
    }

    /// `Σ_a Δ_a f(x) e^{g(a·x) - g(x)}`.
    pub fn weighted_flow(&self, s: &ConvexSubgraph, x: usize) -> f64 {
        ratio_flow(s, &self.f, Some(&self.g), x)
    }
}

/// `Σ_a Δ_a f(x) w_a(x)` with `w_a(x) = e^{g(a·x) - g(x)}`, or `1` when
/// `g` is `None`. Terms across the boundary vanish.
pub fn ratio_flow(s: &ConvexSubgraph, f: &[f64], g: Option<&[f64]>, x: usize) -> f64 {
    s.neighbors(x)
        .map(|(_, y)| {
            let weight = g.map_or(1.0, |g| (g[y] - g[x]).exp());
            (f[y] - f[x]) * weight
        })
        .sum()
}

/// `ξ`: ordered pairs `y != x` with `f(y) - f(x) = η(d(y, x))` up to the
/// tie tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalPairs {
    pairs: Vec<Pair>,
    distances: Vec<usize>,
    gaps: Vec<f64>,
    eta2: f64,
    tie: f64,
}

impl ExtremalPairs {
    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs realising a given host distance.
    pub fn at_distance(&self, d: usize) -> impl Iterator<Item = Pair> + '_ {
        self.pairs
            .iter()
            .zip(&self.distances)
            .filter(move |&(_, &dist)| dist == d)
            .map(|(&p, _)| p)
    }
}

pub fn extremal_pairs(eta: &ModulusOfContinuity, f: &[f64], s: &ConvexSubgraph) -> ExtremalPairs {
    let n = s.len();
    let tie = eta.tie();
    let mut out = ExtremalPairs {
        pairs: Vec::new(),
        distances: Vec::new(),
        gaps: Vec::new(),
        eta2: eta.value(2),
        tie,
    };
    for y in 0..n {
        for x in 0..n {
            if x == y {
                continue;
            }
            let d = s.dist(y, x);
            let v = f[y] - f[x];
            if v >= eta.value(d as i64) - tie {
                out.pairs.push((y, x));
                out.distances.push(d);
                out.gaps.push(v);
            }
        }
    }
    out
}

/// Which extremal pairs enter the ratio constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairRestriction {
    /// Every pair of `ξ`.
    All,
    /// Pairs at distance at most two attaining `η(2)`.
    DistanceLe2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    VanishingDenominator,
    PositiveDenominator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkippedPair {
    pub y: usize,
    pub x: usize,
    pub denominator: f64,
    pub reason: SkipReason,
}

/// The infimum defining `C_{u0}` with its bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioConstant {
    pub value: f64,
    pub argmin: Pair,
    pub admitted: usize,
    pub skipped: Vec<SkippedPair>,
}

/// `inf` over admitted pairs of
/// `[Σ_a Δ_a f(y) e^{g(ay)-g(y)} - Σ_a Δ_a f(x) e^{g(ax)-g(x)}] / [Σ_a Δ_a f(y) - Σ_a Δ_a f(x)]`.
///
/// Pairs whose denominator is within `tol.zero` of zero, or positive, are
/// skipped and listed.
pub fn c_u0(
    ratio: &RatioFunction,
    xi: &ExtremalPairs,
    s: &ConvexSubgraph,
    restrict: PairRestriction,
    tol: &Tolerances,
) -> Result<RatioConstant, ModuliError> {
    let mut best: Option<(f64, Pair)> = None;
    let mut admitted = 0;
    let mut skipped = Vec::new();
    for (i, &(y, x)) in xi.pairs.iter().enumerate() {
        if restrict == PairRestriction::DistanceLe2 && (xi.distances[i] > 2 || xi.gaps[i] < xi.eta2 - xi.tie) {
            continue;
        }
        let denominator = ratio.flow(s, y) - ratio.flow(s, x);
        let reason = if denominator.abs() < tol.zero {
            Some(SkipReason::VanishingDenominator)
        } else if denominator > 0.0 {
            Some(SkipReason::PositiveDenominator)
        } else {
            None
        };
        if let Some(reason) = reason {
            skipped.push(SkippedPair {
                y,
                x,
                denominator,
                reason,
            });
            continue;
        }
        let numerator = ratio.weighted_flow(s, y) - ratio.weighted_flow(s, x);
        let q = numerator / denominator;
        admitted += 1;
        if best.is_none_or(|(b, _)| q < b) {
            best = Some((q, (y, x)));
        }
    }
    match best {
        Some((value, argmin)) => Ok(RatioConstant {
            value,
            argmin,
            admitted,
            skipped,
        }),
        None => Err(ModuliError::EmptyAfterSkips { skipped: skipped.len() }),
    }
}

/// Admissible triple `(y, x, a)` realising a value of the concavity modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcavityTriple {
    pub y: usize,
    pub x: usize,
    /// Generator element.
    pub a: usize,
    pub value: f64,
}

/// `ω(s) = inf (Δ_{a⁻¹} g(y) + Δ_a g(x)) / 2` over admissible triples at
/// distance `s`, for `s` in `1..=D`; `ω(D+1) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusOfConcavity {
    diameter: usize,
    values: Vec<Option<f64>>,
    achievers: Vec<Option<ConcavityTriple>>,
    raw_values: Vec<Option<f64>>,
}

impl ModulusOfConcavity {
    /// Table with `values[s - 1] = ω(s)` for `s` in `1..=D`, without achievers.
    pub fn from_values(values: Vec<Option<f64>>) -> Self {
        let diameter = values.len();
        let mut full = vec![None];
        full.extend(values);
        Self {
            diameter,
            raw_values: full.clone(),
            values: full,
            achievers: vec![None; diameter + 1],
        }
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    /// `ω(s)`; `None` for a class without admissible triples or out of range.
    pub fn value(&self, s: usize) -> Option<f64> {
        match s {
            0 => None,
            s if s == self.diameter + 1 => Some(0.0),
            s if s <= self.diameter => self.values[s],
            _ => None,
        }
    }

    /// `ω(1..=D)`.
    pub fn values(&self) -> &[Option<f64>] {
        &self.values[1..]
    }

    /// Minimising triple per distance class.
    pub fn achiever(&self, s: usize) -> Option<ConcavityTriple> {
        self.achievers.get(s).copied().flatten()
    }

    /// `ω` under the literal condition `d(a²x, y) <= d(x, y)` instead of the
    /// shortest-path step rule.
    pub fn raw_condition_value(&self, s: usize) -> Option<f64> {
        self.raw_values.get(s).copied().flatten()
    }

    /// Distance classes without admissible triples.
    pub fn undefined(&self) -> Vec<usize> {
        (1..=self.diameter).filter(|&s| self.values[s].is_none()).collect()
    }

    /// `ω̄ = inf_s ω(s)` over defined classes.
    pub fn infimum(&self) -> Option<f64> {
        self.values().iter().flatten().copied().reduce(f64::min)
    }

    /// True when `ω(s) >= -tol` for every defined class.
    pub fn is_nonnegative(&self, tol: f64) -> bool {
        self.values().iter().flatten().all(|&w| w >= -tol)
    }

    /// Convexity of `s ↦ ω(s)` over `1..=D+1` including `ω(D+1) = 0`.
    pub fn is_convex(&self, tol: f64) -> bool {
        let seq: Option<Vec<f64>> = (1..=self.diameter + 1).map(|s| self.value(s)).collect();
        match seq {
            Some(seq) => seq.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] >= -tol),
            None => false,
        }
    }
}

/// Exhaustive scan for the modulus of concavity of `g` on S.
///
/// A triple `(y, x, a)` is admissible when `d(y, x) = s`, both `a·x` and
/// `a⁻¹·y` lie in S, and `a` steps from `x` along a shortest path towards
/// `y`, i.e. `d(a·x, y) = s - 1`.
pub fn modulus_of_concavity(g: &[f64], s: &ConvexSubgraph) -> ModulusOfConcavity {
    let host = s.host();
    let group = host.group();
    let gens = host.generators().elements();
    let diameter = s.diameter();
    let n = s.len();
    let mut values: Vec<Option<f64>> = vec![None; diameter + 1];
    let mut achievers: Vec<Option<ConcavityTriple>> = vec![None; diameter + 1];
    let mut raw_values: Vec<Option<f64>> = vec![None; diameter + 1];
    for y in 0..n {
        let hy = s.vertices()[y];
        for x in 0..n {
            let d = s.dist(y, x);
            if d == 0 || d > diameter {
                continue;
            }
            let hx = s.vertices()[x];
            for (j, &a) in gens.iter().enumerate() {
                let Some(ax) = s.step(j, x) else { continue };
                let Some(ainv_y) = s.local_index(group.mul(group.inverse(a), hy)) else {
                    continue;
                };
                let value = ((g[ainv_y] - g[y]) + (g[ax] - g[x])) / 2.0;
                let a2x = group.mul(a, group.mul(a, hx));
                if host.dist(a2x, hy) <= d && raw_values[d].is_none_or(|w| value < w) {
                    raw_values[d] = Some(value);
                }
                if host.dist(s.vertices()[ax], hy) + 1 != d {
                    continue;
                }
                if values[d].is_none_or(|w| value < w) {
                    values[d] = Some(value);
                    achievers[d] = Some(ConcavityTriple { y, x, a, value });
                }
            }
        }
    }
    ModulusOfConcavity {
        diameter,
        values,
        achievers,
        raw_values,
    }
}

/// Discrete log-concavity: `Σ_a (g(a·y) - g(y)) <= 0` at every vertex whose
/// neighbours all lie in S. Vertices touching δS pass trivially.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogConcavity {
    pub holds: bool,
    /// Largest neighbour sum over interior vertices.
    pub worst: f64,
    pub witness: Option<usize>,
    pub interior_vertices: usize,
}

pub fn log_concavity(s: &ConvexSubgraph, g: &[f64], tol: f64) -> LogConcavity {
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    let mut interior_vertices = 0;
    for y in 0..s.len() {
        if s.boundary_degree(y) > 0 {
            continue;
        }
        interior_vertices += 1;
        let sum: f64 = s.neighbors(y).map(|(_, z)| g[z] - g[y]).sum();
        if sum > worst {
            worst = sum;
            witness = Some(y);
        }
    }
    let holds = worst <= tol;
    LogConcavity {
        holds,
        worst,
        witness: if holds { None } else { witness },
        interior_vertices,
    }
}

/// `∇η(s) = η(s) - η(s-1)` and `Δ⁻cosh ω(s) = cosh ω(s) - cosh ω(s+1)` for
/// `s` in `1..=D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientTables {
    pub nabla_eta: Vec<f64>,
    pub delta_minus_cosh: Vec<Option<f64>>,
}

impl GradientTables {
    /// `inf_s Δ⁻cosh ω(s)` over classes where both ends are defined.
    pub fn delta_minus_cosh_infimum(&self) -> Option<f64> {
        self.delta_minus_cosh.iter().flatten().copied().reduce(f64::min)
    }
}

pub fn grad_ops(eta: &ModulusOfContinuity, omega: &ModulusOfConcavity) -> GradientTables {
    let nabla_eta = (1..=eta.diameter())
        .map(|s| eta.value(s as i64) - eta.value(s as i64 - 1))
        .collect();
    let delta_minus_cosh = (1..=omega.diameter())
        .map(|s| Some(omega.value(s)?.cosh() - omega.value(s + 1)?.cosh()))
        .collect();
    GradientTables {
        nabla_eta,
        delta_minus_cosh,
    }
}

/// `y, x, a·y ∈ S` with `a·x ∉ S` and `|u(a·y) - u(x)| > η(d(y, x))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryWitness {
    pub y: usize,
    pub x: usize,
    pub gen_index: usize,
    pub excess: f64,
}

/// Checks that whenever `a·y ∈ S` but `a·x ∉ S`, the step stays within the
/// modulus: `|u(a·y) - u(x)| <= η(d(y, x))`.
pub fn boundary_continuity_violation(
    u: &[f64],
    s: &ConvexSubgraph,
    eta: &ModulusOfContinuity,
) -> Option<BoundaryWitness> {
    let k = s.host().degree();
    for y in 0..s.len() {
        for x in 0..s.len() {
            let bound = eta.value(s.dist(y, x) as i64) + eta.tie();
            for j in 0..k {
                if let (Some(ay), None) = (s.step(j, y), s.step(j, x)) {
                    let excess = (u[ay] - u[x]).abs() - bound;
                    if excess > 0.0 {
                        return Some(BoundaryWitness {
                            y,
                            x,
                            gen_index: j,
                            excess,
                        });
                    }
                }
            }
        }
    }
    None
}

/// At pairs attaining `η(d(y, x))` with `u(y) >= u(x)`: a step leaving
/// S at `x` but not at `y` cannot increase `u` at `y`, and symmetrically.
pub fn boundary_monotonicity_violation(u: &[f64], s: &ConvexSubgraph, xi: &ExtremalPairs) -> Option<BoundaryWitness> {
    let k = s.host().degree();
    for &(y, x) in xi.pairs() {
        for j in 0..k {
            match (s.step(j, y), s.step(j, x)) {
                (Some(ay), None) => {
                    let excess = u[ay] - u[y] - xi.tie;
                    if excess > 0.0 {
                        return Some(BoundaryWitness {
                            y,
                            x,
                            gen_index: j,
                            excess,
                        });
                    }
                }
                (None, Some(ax)) => {
                    let excess = u[x] - u[ax] - xi.tie;
                    if excess > 0.0 {
                        return Some(BoundaryWitness {
                            y,
                            x,
                            gen_index: j,
                            excess,
                        });
                    }
                }
                _ => {}
            }
        }
    }
    None
}

/// Slack of the reduction inequality at an extremal pair:
/// `Σ_{a∈Y} (u(ay) - u(y)) - Σ_{a∈X} (u(ax) - u(x)) - (-Lu(y) + Lu(x))`,
/// non-negative when it holds.
///
/// `ys ⊆ K_y` and `xs ⊆ K_x` are generator indices and must agree on the
/// generators shared by `K_y` and `K_x`.
pub fn reduce_slack(
    u: &[f64],
    lu: &[f64],
    s: &ConvexSubgraph,
    (y, x): Pair,
    ys: &[usize],
    xs: &[usize],
) -> Result<f64, ModuliError> {
    let shared = |j: usize| s.step(j, y).is_some() && s.step(j, x).is_some();
    let valid = ys.iter().all(|&j| s.step(j, y).is_some())
        && xs.iter().all(|&j| s.step(j, x).is_some())
        && ys.iter().filter(|&&j| shared(j)).all(|j| xs.contains(j))
        && xs.iter().filter(|&&j| shared(j)).all(|j| ys.contains(j));
    if !valid {
        return Err(ModuliError::InvalidSubsets);
    }
    let sum_y: f64 = ys.iter().map(|&j| u[s.step(j, y).unwrap()] - u[y]).sum();
    let sum_x: f64 = xs.iter().map(|&j| u[s.step(j, x).unwrap()] - u[x]).sum();
    Ok(sum_y - sum_x - (-lu[y] + lu[x]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{hypercube_subgraph, path_subgraph};
    use crate::operators::{dirichlet_hamiltonian, eigendecompose, laplacian, Potential};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    /// Independent oracle: direct definition over all pairs with d <= s.
    fn eta_oracle(f: &[f64], s: &ConvexSubgraph, t: usize) -> f64 {
        let mut best = 0.0f64;
        for y in 0..s.len() {
            for x in 0..s.len() {
                if s.dist(y, x) <= t {
                    best = best.max(f[y] - f[x]);
                }
            }
        }
        best
    }

    #[test]
    fn constant_function_has_zero_modulus() {
        let s = path_subgraph(4).unwrap();
        let eta = modulus_of_continuity(&[2.0; 4], &s, &tol());
        assert!(eta.values().iter().all(|&v| v == 0.0));
        let xi = extremal_pairs(&eta, &[2.0; 4], &s);
        assert_eq!(xi.len(), 12);
    }

    #[test]
    fn single_edge_modulus() {
        let s = path_subgraph(2).unwrap();
        let f = [0.0, 1.0];
        let eta = modulus_of_continuity(&f, &s, &tol());
        assert_eq!(eta.value(1), 1.0);
        assert_eq!(eta.value(-1), -1.0);
        assert_eq!(eta.value(0), 0.0);
        assert_eq!(eta.value(3), 1.0);
        assert_eq!(eta.achievers(1).collect::<Vec<_>>(), vec![(1, 0)]);
        let xi = extremal_pairs(&eta, &f, &s);
        assert_eq!(xi.pairs(), &[(1, 0)]);
    }

    #[test]
    fn five_path_eigenvector_modulus_matches_oracle() {
        let s = path_subgraph(5).unwrap();
        let spec = eigendecompose(&laplacian(&s), &tol()).unwrap();
        let u1 = spec.eigenvector(1);
        let eta = modulus_of_continuity(u1, &s, &tol());
        for t in 0..=4 {
            assert_eq!(eta.value(t as i64), eta_oracle(u1, &s, t));
        }
        assert!(eta.values().windows(2).all(|w| w[0] <= w[1]));
        for y in 0..5 {
            for x in 0..5 {
                assert!(u1[y] - u1[x] <= eta.value(s.dist(y, x) as i64) + 1e-15);
            }
        }
        // u1 is monotone along the path, so η(4) is the end-to-end difference.
        assert!((eta.value(4) - (u1[0] - u1[4]).abs()).abs() < 1e-15);
    }

    #[test]
    fn concave_quadratic_has_linear_concavity_modulus() {
        // g(x) = -c x^2: inward steps from both ends give (c(s-1)*2)/2.
        let s = path_subgraph(7).unwrap();
        let c = 0.3;
        let g: Vec<f64> = (0..7).map(|x| -c * (x as f64).powi(2)).collect();
        let omega = modulus_of_concavity(&g, &s);
        for t in 1..=6 {
            let expected = c * (t as f64 - 1.0);
            assert!((omega.value(t).unwrap() - expected).abs() < 1e-12, "s={t}");
            assert_eq!(omega.raw_condition_value(t), omega.value(t));
        }
        assert_eq!(omega.value(7), Some(0.0));
        assert!(omega.infimum().unwrap().abs() < 1e-12);
        assert!(omega.is_nonnegative(1e-12));
        assert!(!omega.is_convex(1e-12));
    }

    #[test]
    fn constant_and_linear_logs_have_zero_concavity() {
        let s = path_subgraph(5).unwrap();
        let omega = modulus_of_concavity(&[1.5; 5], &s);
        assert!(omega.values().iter().all(|&w| w == Some(0.0)));
        assert!(omega.is_convex(0.0));
        let lin: Vec<f64> = (0..5).map(|x| 0.4 * x as f64 - 1.0).collect();
        let omega = modulus_of_concavity(&lin, &s);
        assert!(omega.values().iter().all(|w| w.unwrap().abs() < 1e-15));
    }

    #[test]
    fn gradient_tables() {
        let s = path_subgraph(4).unwrap();
        let f = [0.0, 1.0, 2.0, 3.0];
        let eta = modulus_of_continuity(&f, &s, &tol());
        let zero = modulus_of_concavity(&[0.0; 4], &s);
        let tables = grad_ops(&eta, &zero);
        assert_eq!(tables.nabla_eta, vec![1.0, 1.0, 1.0]);
        assert!(tables.delta_minus_cosh.iter().all(|&v| v == Some(0.0)));
    }

    #[test]
    fn delta_minus_cosh_of_linear_decreasing_modulus() {
        // ω(s) = c (D + 1 - s) on a path with D = 3; direct arithmetic oracle.
        let c = 0.25;
        let d = 3;
        let omega = ModulusOfConcavity {
            diameter: d,
            values: vec![None, Some(3.0 * c), Some(2.0 * c), Some(c)],
            achievers: vec![None; 4],
            raw_values: vec![None; 4],
        };
        let s = path_subgraph(4).unwrap();
        let eta = modulus_of_continuity(&[0.0; 4], &s, &tol());
        let tables = grad_ops(&eta, &omega);
        let expected = [
            (3.0 * c).cosh() - (2.0 * c).cosh(),
            (2.0 * c).cosh() - c.cosh(),
            c.cosh() - 1.0,
        ];
        for (got, want) in tables.delta_minus_cosh.iter().zip(expected) {
            assert!((got.unwrap() - want).abs() < 1e-15);
        }
        assert!(omega.is_convex(0.0));
    }

    #[test]
    fn zero_potential_gives_unit_ratio_constant() {
        let s = path_subgraph(6).unwrap();
        let h = dirichlet_hamiltonian(&s, &Potential::Values(vec![0.0; 6])).unwrap();
        let spec = eigendecompose(&h, &tol()).unwrap();
        let ratio = RatioFunction::from_spectrum(&spec).unwrap();
        assert!(ratio.weighted_mean().abs() < 1e-12);
        let eta = modulus_of_continuity(ratio.f(), &s, &tol());
        let xi = extremal_pairs(&eta, ratio.f(), &s);
        let c = c_u0(&ratio, &xi, &s, PairRestriction::All, &tol()).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12);
        assert!(c.skipped.is_empty());
    }

    #[test]
    fn single_edge_ratio_constant_matches_closed_form() {
        // H = [[1, -1], [-1, 1 + v]]; with f = u1/u0 the only extremal pair
        // gives C = (u0(x)/u0(y) + u0(y)/u0(x)) / 2.
        let v = 1.7;
        let s = path_subgraph(2).unwrap();
        let h = dirichlet_hamiltonian(&s, &Potential::Values(vec![0.0, v])).unwrap();
        let spec = eigendecompose(&h, &tol()).unwrap();
        // Closed-form 2x2 eigensystem as the oracle.
        let l0 = 1.0 + v / 2.0 - (1.0 + v * v / 4.0).sqrt();
        let u0 = [1.0, 1.0 - l0];
        let r = u0[1] / u0[0];
        let expected = (r + 1.0 / r) / 2.0;
        let ratio = RatioFunction::from_spectrum(&spec).unwrap();
        let eta = modulus_of_continuity(ratio.f(), &s, &tol());
        let xi = extremal_pairs(&eta, ratio.f(), &s);
        assert_eq!(xi.len(), 1);
        let c = c_u0(&ratio, &xi, &s, PairRestriction::All, &tol()).unwrap();
        assert!((c.value - expected).abs() < 1e-12, "{} vs {}", c.value, expected);
        let gap = spec.gap().unwrap();
        assert!(gap >= 2.0 * c.value * (1.0 - (std::f64::consts::PI / 2.0).cos()) - 1e-9);
    }

    #[test]
    fn constant_ratio_has_no_admissible_pairs() {
        let s = path_subgraph(3).unwrap();
        let ratio = RatioFunction::new(&[1.0; 3], &[0.5; 3]).unwrap();
        let eta = modulus_of_continuity(ratio.f(), &s, &tol());
        let xi = extremal_pairs(&eta, ratio.f(), &s);
        assert_eq!(
            c_u0(&ratio, &xi, &s, PairRestriction::All, &tol()),
            Err(ModuliError::EmptyAfterSkips { skipped: 6 })
        );
    }

    #[test]
    fn non_positive_ground_state_is_rejected() {
        assert_eq!(
            RatioFunction::new(&[1.0, 0.0], &[1.0, 1.0]),
            Err(ModuliError::NonPositiveGroundState { vertex: 1, value: 0.0 })
        );
    }

    #[test]
    fn boundary_checks_on_cube_eigenvectors() {
        let s = hypercube_subgraph(3).unwrap();
        let l = laplacian(&s);
        let spec = eigendecompose(&l, &tol()).unwrap();
        let u = spec.eigenvector(1);
        let eta = modulus_of_continuity(u, &s, &tol());
        assert!(boundary_continuity_violation(u, &s, &eta).is_none());
        let xi = extremal_pairs(&eta, u, &s);
        assert!(boundary_monotonicity_violation(u, &s, &xi).is_none());
        let lu = l.apply(u);
        for &pair in xi.pairs() {
            let all: Vec<usize> = (0..3).collect();
            assert!(reduce_slack(u, &lu, &s, pair, &all, &all).unwrap() >= -1e-12);
            assert!(reduce_slack(u, &lu, &s, pair, &[], &[]).unwrap() >= -1e-12);
        }
        assert_eq!(
            reduce_slack(u, &lu, &s, xi.pairs()[0], &[0], &[]),
            Err(ModuliError::InvalidSubsets)
        );
    }

    #[test]
    fn log_concavity_predicate() {
        let s = path_subgraph(5).unwrap();
        let concave: Vec<f64> = (0..5).map(|x| -((x as f64) - 2.0).powi(2)).collect();
        let lc = log_concavity(&s, &concave, 0.0);
        assert!(lc.holds);
        assert_eq!(lc.interior_vertices, 3);
        let convex: Vec<f64> = concave.iter().map(|v| -v).collect();
        let lc = log_concavity(&s, &convex, 0.0);
        assert!(!lc.holds);
        assert_eq!(lc.witness, Some(1));
    }
}
