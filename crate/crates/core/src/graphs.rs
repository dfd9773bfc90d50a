//! Cayley graphs of finite groups, induced subgraphs and strong convexity.

use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{build_group, check_invariance, Element, FiniteGroup, GeneratorSet, GroupError, GroupSpec};

/// Vertex id; for a Cayley graph this is the group element id.
pub type Vertex = usize;

const UNREACHED: u32 = u32::MAX;
const OUTSIDE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("generator set is not invariant under conjugation by its own elements")]
    NotInvariant,
    #[error("subgraph vertex set is empty")]
    EmptySubgraph,
    #[error("vertex {vertex} is not in a graph with {order} vertices")]
    VertexOutOfRange { vertex: Vertex, order: usize },
    #[error("induced subgraph is disconnected: {reached} of {size} vertices reachable")]
    DisconnectedSubgraph { reached: usize, size: usize },
    #[error("convexity criteria disagree: {0}")]
    CriterionMismatch(String),
    #[error("invalid graph family: {0}")]
    InvalidFamily(String),
}

/// Dense matrix of hop distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.data[x * self.n + y] as usize
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn row(&self, x: usize) -> &[u32] {
        &self.data[x * self.n..(x + 1) * self.n]
    }

    /// Largest entry, or `None` if some pair is unreachable.
    pub fn max(&self) -> Option<usize> {
        let m = self.data.iter().copied().max().unwrap_or(0);
        (m != UNREACHED).then_some(m as usize)
    }

    /// BFS from every source. `neighbors(x)` lists the neighbours of `x`.
    fn from_bfs<F>(n: usize, neighbors: F) -> Self
    where
        F: Fn(usize, &mut Vec<usize>) + Sync,
    {
        let mut data = vec![UNREACHED; n * n];
        data.par_chunks_mut(n.max(1)).enumerate().for_each(|(source, row)| {
            let mut queue = VecDeque::from([source]);
            let mut scratch = Vec::new();
            row[source] = 0;
            while let Some(x) = queue.pop_front() {
                scratch.clear();
                neighbors(x, &mut scratch);
                for &y in &scratch {
                    if row[y] == UNREACHED {
                        row[y] = row[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
        });
        Self { n, data }
    }
}

/// Cayley graph of a group under an invariant symmetric generating set.
#[derive(Debug, Clone)]
pub struct HomogeneousGraph {
    group: FiniteGroup,
    gens: GeneratorSet,
    /// `steps[x * k + i] = gens[i] · x`.
    steps: Vec<Vertex>,
    dist: DistanceMatrix,
    diameter: usize,
}

/// Builds the Cayley graph, rejecting generator sets that are not
/// conjugation invariant.
pub fn build_cayley(group: FiniteGroup, gens: GeneratorSet) -> Result<HomogeneousGraph, GraphError> {
    if !check_invariance(&group, &gens) {
        return Err(GraphError::NotInvariant);
    }
    let n = group.order();
    let k = gens.len();
    let mut steps = Vec::with_capacity(n * k);
    for x in 0..n {
        steps.extend(gens.elements().iter().map(|&a| group.mul(a, x)));
    }
    let dist = DistanceMatrix::from_bfs(n, |x, out| out.extend_from_slice(&steps[x * k..(x + 1) * k]));
    // A generating set always yields a connected graph.
    let diameter = dist.max().expect("generating set implies connectivity");
    Ok(HomogeneousGraph {
        group,
        gens,
        steps,
        dist,
        diameter,
    })
}

impl HomogeneousGraph {
    /// Convenience constructor from a group description and raw generators.
    pub fn from_spec(spec: &GroupSpec, generators: &[Element]) -> Result<Self, GraphError> {
        let group = build_group(spec)?;
        let gens = GeneratorSet::new(&group, generators)?;
        build_cayley(group, gens)
    }

    /// `Z_n` with generators `{1, n-1}`.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::InvalidFamily(format!(
                "cycle needs at least 3 vertices, got {n}"
            )));
        }
        Self::from_spec(&GroupSpec::Cyclic(n), &[1, n - 1])
    }

    /// `Z_2^n` with the standard basis.
    pub fn hypercube(dim: usize) -> Result<Self, GraphError> {
        if dim == 0 {
            return Err(GraphError::InvalidFamily("hypercube needs dimension at least 1".into()));
        }
        Self::from_spec(&GroupSpec::ElementaryAbelian2(dim), &GeneratorSet::hypercube_basis(dim))
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Degree `k = |K|`.
    pub fn degree(&self) -> usize {
        self.gens.len()
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dist
    }

    #[inline]
    pub fn dist(&self, x: Vertex, y: Vertex) -> usize {
        self.dist.get(x, y)
    }

    /// `gens[i] · x`.
    #[inline]
    pub fn step(&self, gen_index: usize, x: Vertex) -> Vertex {
        self.steps[x * self.degree() + gen_index]
    }

    /// Neighbours `a·x` for every generator `a`, in generator order.
    pub fn neighbors(&self, x: Vertex) -> &[Vertex] {
        let k = self.degree();
        &self.steps[x * k..(x + 1) * k]
    }

    /// `(a, a·x)` pairs.
    pub fn adjacency(&self, x: Vertex) -> impl Iterator<Item = (Element, Vertex)> + '_ {
        self.gens
            .elements()
            .iter()
            .copied()
            .zip(self.neighbors(x).iter().copied())
    }

    /// Length of `e` in the word metric over the generators.
    pub fn word_length(&self, e: Element) -> usize {
        self.dist(self.group.identity(), e)
    }

    /// Dimension `n` if this is `Z_2^n` with the standard generators.
    pub fn hypercube_dimension(&self) -> Option<usize> {
        let order = self.order();
        if !order.is_power_of_two() || order < 2 {
            return None;
        }
        let dim = order.trailing_zeros() as usize;
        if self.gens.elements() != GeneratorSet::hypercube_basis(dim).as_slice() {
            return None;
        }
        let xor_table = (0..order).all(|a| (0..order).all(|b| self.group.mul(a, b) == a ^ b));
        xor_table.then_some(dim)
    }

    /// Whole vertex set as a subgraph with empty boundary.
    pub fn full_subgraph(self: &Arc<Self>) -> ConvexSubgraph {
        induce_subgraph(self, &(0..self.order()).collect::<Vec<_>>()).expect("a Cayley graph is connected")
    }
}

/// Vertex subset of a homogeneous graph with its boundary data.
///
/// Local indices `0..len()` follow the sorted order of the host vertex ids.
#[derive(Debug, Clone)]
pub struct ConvexSubgraph {
    host: Arc<HomogeneousGraph>,
    vertices: Vec<Vertex>,
    local: Vec<usize>,
    boundary: Vec<Vertex>,
    boundary_edges: Vec<(Vertex, Vertex)>,
    /// `steps[i * k + j]` is the local index of `gens[j] · vertices[i]`,
    /// or `OUTSIDE` when that neighbour lies in the boundary.
    steps: Vec<usize>,
    dist: DistanceMatrix,
    diameter: usize,
}

/// Induces the subgraph on `vset` (host vertex ids; duplicates ignored).
pub fn induce_subgraph(host: &Arc<HomogeneousGraph>, vset: &[Vertex]) -> Result<ConvexSubgraph, GraphError> {
    let order = host.order();
    let mut vertices = vset.to_vec();
    vertices.sort_unstable();
    vertices.dedup();
    if vertices.is_empty() {
        return Err(GraphError::EmptySubgraph);
    }
    if let Some(&v) = vertices.iter().find(|&&v| v >= order) {
        return Err(GraphError::VertexOutOfRange { vertex: v, order });
    }
    let mut local = vec![OUTSIDE; order];
    for (i, &v) in vertices.iter().enumerate() {
        local[v] = i;
    }
    let k = host.degree();
    let mut steps = Vec::with_capacity(vertices.len() * k);
    let mut on_boundary = vec![false; order];
    let mut boundary_edges = Vec::new();
    for &x in &vertices {
        for &y in host.neighbors(x) {
            steps.push(local[y]);
            if local[y] == OUTSIDE {
                on_boundary[y] = true;
            }
            if local[y] == OUTSIDE || x < y {
                boundary_edges.push((x.min(y), x.max(y)));
            }
        }
    }
    boundary_edges.sort_unstable();
    boundary_edges.dedup();
    let boundary: Vec<Vertex> = (0..order).filter(|&v| on_boundary[v]).collect();

    let m = vertices.len();
    let dist = DistanceMatrix::from_bfs(m, |x, out| {
        out.extend(steps[x * k..(x + 1) * k].iter().copied().filter(|&y| y != OUTSIDE))
    });
    let diameter = match dist.max() {
        Some(d) => d,
        None => {
            let reached = dist.row(0).iter().filter(|&&d| d != UNREACHED).count();
            return Err(GraphError::DisconnectedSubgraph { reached, size: m });
        }
    };
    Ok(ConvexSubgraph {
        host: Arc::clone(host),
        vertices,
        local,
        boundary,
        boundary_edges,
        steps,
        dist,
        diameter,
    })
}

impl ConvexSubgraph {
    pub fn host(&self) -> &Arc<HomogeneousGraph> {
        &self.host
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Host ids of the vertices, indexed by local id.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Local index of a host vertex, if it belongs to the subgraph.
    pub fn local_index(&self, v: Vertex) -> Option<usize> {
        self.local.get(v).copied().filter(|&i| i != OUTSIDE)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.local_index(v).is_some()
    }

    /// `δS`: host vertices outside S adjacent to S.
    pub fn boundary(&self) -> &[Vertex] {
        &self.boundary
    }

    /// `S'`: host edges with at least one end in S, as sorted host pairs.
    pub fn boundary_edges(&self) -> &[(Vertex, Vertex)] {
        &self.boundary_edges
    }

    /// Internal edges as local index pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| self.neighbors(i).filter(move |&(_, j)| i < j).map(move |(_, j)| (i, j)))
            .collect()
    }

    /// Local index of `gens[gen_index] · x`, or `None` if it leaves S.
    #[inline]
    pub fn step(&self, gen_index: usize, x: usize) -> Option<usize> {
        let y = self.steps[x * self.host.degree() + gen_index];
        (y != OUTSIDE).then_some(y)
    }

    /// `(generator index, local neighbour)` for every `a ∈ K_x`.
    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.host.degree();
        self.steps[x * k..(x + 1) * k]
            .iter()
            .enumerate()
            .filter(|&(_, &y)| y != OUTSIDE)
            .map(|(j, &y)| (j, y))
    }

    /// `K_x = { a : a·x ∉ δS }` as generator elements.
    pub fn k_x(&self, x: usize) -> Vec<Element> {
        let gens = self.host.generators().elements();
        self.neighbors(x).map(|(j, _)| gens[j]).collect()
    }

    /// Degree of `x` inside S, `|K_x|`.
    pub fn degree(&self, x: usize) -> usize {
        self.neighbors(x).count()
    }

    /// Number of boundary edges at `x`, `k - |K_x|`.
    pub fn boundary_degree(&self, x: usize) -> usize {
        self.host.degree() - self.degree(x)
    }

    /// Intra-S shortest-path distance between local vertices.
    pub fn dist_within(&self, x: usize, y: usize) -> usize {
        self.dist.get(x, y)
    }

    /// Host (word-metric) distance between local vertices.
    pub fn dist(&self, x: usize, y: usize) -> usize {
        self.host.dist(self.vertices[x], self.vertices[y])
    }

    /// Diameter of S in its own metric.
    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn is_full(&self) -> bool {
        self.boundary.is_empty()
    }

    /// Dimension `m` when the host is a hypercube and S is one of its
    /// `m`-dimensional subcubes (the whole cube included).
    pub fn subcube_dimension(&self) -> Option<usize> {
        self.host.hypercube_dimension()?;
        let base = self.vertices[0];
        let free = self.vertices.iter().fold(0, |acc, &v| acc | (v ^ base));
        let m = free.count_ones() as usize;
        (self.len() == 1 << m).then_some(m)
    }

    /// True when S is connected, has no vertex of degree above two and no cycle.
    pub fn is_path(&self) -> bool {
        let edges: usize = (0..self.len()).map(|x| self.degree(x)).sum::<usize>() / 2;
        edges + 1 == self.len() && (0..self.len()).all(|x| self.degree(x) <= 2)
    }

    /// Local vertices in path order, starting at the lower-id endpoint.
    pub fn path_order(&self) -> Option<Vec<usize>> {
        if !self.is_path() {
            return None;
        }
        if self.len() == 1 {
            return Some(vec![0]);
        }
        let start = (0..self.len()).find(|&x| self.degree(x) == 1)?;
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some((_, next)) = self.neighbors(cur).find(|&(_, y)| y != prev) {
            order.push(next);
            prev = cur;
            cur = next;
        }
        Some(order)
    }
}

/// A host geodesic between two vertices of S passing through `via ∉ S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicWitness {
    pub x: Vertex,
    pub y: Vertex,
    pub via: Vertex,
}

/// Boundary vertex `x` with `a·x, b·x ∈ S` but `b⁻¹a ∉ K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalWitness {
    pub boundary: Vertex,
    pub a: Element,
    pub b: Element,
}

/// `x, a·x, y ∈ S` with `d(a·x, y) = d(x, y) + 1` but `a·y ∉ S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureWitness {
    pub x: Vertex,
    pub a: Element,
    pub y: Vertex,
}

/// Outcome of the strong convexity test, with every criterion evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityReport {
    /// Every host shortest path between vertices of S stays in S.
    pub strongly_convex: bool,
    pub geodesic_witness: Option<GeodesicWitness>,
    /// Intra-S distances equal host distances.
    pub isometric: bool,
    pub isometry_witness: Option<(Vertex, Vertex)>,
    /// Boundary criterion: two S-neighbours of a boundary vertex are adjacent.
    pub local_criterion: bool,
    pub local_witness: Option<LocalWitness>,
    pub closure: bool,
    pub closure_witness: Option<ClosureWitness>,
}

/// Tests strong convexity and cross-checks the equivalent characterisations.
///
/// The verdict is the geodesic criterion. A strongly convex set must also
/// pass the boundary criterion, be isometric and be closed under the
/// distance-increasing step rule; any failure there is reported as
/// [`GraphError::CriterionMismatch`]. The converse direction of the boundary
/// criterion only holds on some hosts (a long arc of a cycle passes it
/// while failing the geodesic test), so that case is reported, not raised.
pub fn is_strongly_convex(s: &ConvexSubgraph) -> Result<ConvexityReport, GraphError> {
    let host = s.host();
    let m = s.len();

    let geodesic_witness = if s.is_full() {
        None
    } else {
        (0..m).into_par_iter().find_map_first(|i| {
            let x = s.vertices[i];
            (i + 1..m).find_map(|j| {
                let y = s.vertices[j];
                let dxy = host.dist(x, y);
                s.boundary
                    .iter()
                    .find(|&&z| host.dist(x, z) + host.dist(z, y) == dxy)
                    .map(|&via| GeodesicWitness { x, y, via })
            })
        })
    };

    let isometry_witness = (0..m).find_map(|i| {
        (i + 1..m)
            .find(|&j| s.dist_within(i, j) != s.dist(i, j))
            .map(|j| (s.vertices[i], s.vertices[j]))
    });

    let group = host.group();
    let gens = host.generators();
    let local_witness = s.boundary.iter().find_map(|&z| {
        let inside: Vec<Element> = host
            .adjacency(z)
            .filter(|&(_, v)| s.contains(v))
            .map(|(a, _)| a)
            .collect();
        inside.iter().find_map(|&a| {
            inside
                .iter()
                .find(|&&b| b != a && !gens.contains(group.mul(group.inverse(b), a)))
                .map(|&b| LocalWitness { boundary: z, a, b })
        })
    });

    let closure_witness = (0..m).into_par_iter().find_map_first(|i| {
        let x = s.vertices[i];
        host.adjacency(x).filter(|&(_, ax)| s.contains(ax)).find_map(|(a, ax)| {
            s.vertices.iter().find_map(|&y| {
                let ay = group.mul(a, y);
                (host.dist(ax, y) == host.dist(x, y) + 1 && !s.contains(ay)).then_some(ClosureWitness { x, a, y })
            })
        })
    });

    let report = ConvexityReport {
        strongly_convex: geodesic_witness.is_none(),
        geodesic_witness,
        isometric: isometry_witness.is_none(),
        isometry_witness,
        local_criterion: local_witness.is_none(),
        local_witness,
        closure: closure_witness.is_none(),
        closure_witness,
    };
    if report.strongly_convex {
        if let Some(w) = report.local_witness {
            return Err(GraphError::CriterionMismatch(format!(
                "geodesic criterion holds but boundary criterion fails at {w:?}"
            )));
        }
        if let Some(w) = report.isometry_witness {
            return Err(GraphError::CriterionMismatch(format!(
                "geodesic criterion holds but intra-subgraph distance differs at {w:?}"
            )));
        }
        if let Some(w) = report.closure_witness {
            return Err(GraphError::CriterionMismatch(format!(
                "geodesic criterion holds but step closure fails at {w:?}"
            )));
        }
    }
    Ok(report)
}

/// Smallest strongly convex superset of `vset`: repeatedly adds boundary
/// vertices lying on host geodesics between current members.
pub fn convex_hull(host: &Arc<HomogeneousGraph>, vset: &[Vertex]) -> Result<Vec<Vertex>, GraphError> {
    let mut current: Vec<Vertex> = vset.to_vec();
    current.sort_unstable();
    current.dedup();
    if current.is_empty() {
        return Err(GraphError::EmptySubgraph);
    }
    if let Some(&v) = current.iter().find(|&&v| v >= host.order()) {
        return Err(GraphError::VertexOutOfRange {
            vertex: v,
            order: host.order(),
        });
    }
    loop {
        let mut member = vec![false; host.order()];
        for &v in &current {
            member[v] = true;
        }
        let candidates: Vec<Vertex> = (0..host.order()).filter(|&z| !member[z]).collect();
        let added: Vec<Vertex> = candidates
            .into_par_iter()
            .filter(|&z| {
                current.iter().enumerate().any(|(i, &x)| {
                    current[i + 1..]
                        .iter()
                        .any(|&y| host.dist(x, z) + host.dist(z, y) == host.dist(x, y))
                })
            })
            .collect();
        if added.is_empty() {
            return Ok(current);
        }
        current.extend(added);
        current.sort_unstable();
    }
}

/// Path on `n` vertices: the arc `0..n` of the cycle `Z_{2n}`, which is
/// strongly convex because every arc shorter than half the cycle is.
pub fn path_subgraph(n: usize) -> Result<ConvexSubgraph, GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidFamily("path needs at least one vertex".into()));
    }
    let modulus = 2 * n;
    let gens = if modulus == 2 { vec![1] } else { vec![1, modulus - 1] };
    let host = Arc::new(HomogeneousGraph::from_spec(&GroupSpec::Cyclic(modulus), &gens)?);
    induce_subgraph(&host, &(0..n).collect::<Vec<_>>())
}

pub fn cycle_subgraph(n: usize) -> Result<ConvexSubgraph, GraphError> {
    Ok(Arc::new(HomogeneousGraph::cycle(n)?).full_subgraph())
}

pub fn hypercube_subgraph(dim: usize) -> Result<ConvexSubgraph, GraphError> {
    Ok(Arc::new(HomogeneousGraph::hypercube(dim)?).full_subgraph())
}

/// Vertices `x` of `Q_dim` with `x & fixed_mask == fixed_value & fixed_mask`.
pub fn subcube_subgraph(dim: usize, fixed_mask: usize, fixed_value: usize) -> Result<ConvexSubgraph, GraphError> {
    let host = Arc::new(HomogeneousGraph::hypercube(dim)?);
    let full = (1usize << dim) - 1;
    if fixed_mask & !full != 0 {
        return Err(GraphError::InvalidFamily(format!(
            "mask {fixed_mask:#b} has bits outside dimension {dim}"
        )));
    }
    let target = fixed_value & fixed_mask;
    let vset: Vec<Vertex> = (0..=full).filter(|&x| x & fixed_mask == target).collect();
    induce_subgraph(&host, &vset)
}
