use std::sync::Arc;

use proptest::prelude::*;

use gapbound_core::graphs::{induce_subgraph, is_strongly_convex, subcube_subgraph, ConvexSubgraph, HomogeneousGraph};
use gapbound_core::groups::{build_group, GroupSpec};
use gapbound_core::heat::{default_grid, evolve_spectral};
use gapbound_core::moduli::modulus_of_continuity;
use gapbound_core::operators::{dirichlet_hamiltonian, eigendecompose, laplacian, Potential};
use gapbound_core::Tolerances;

fn tol() -> Tolerances {
    Tolerances::default()
}

/// `Z_a × Z_b` with the unit generators of both factors, their inverses and
/// optional extra symmetric pairs.
fn product_host(a: usize, b: usize, extras: &[(usize, usize)]) -> HomogeneousGraph {
    let spec = GroupSpec::DirectProduct(vec![GroupSpec::Cyclic(a), GroupSpec::Cyclic(b)]);
    let id = |x: usize, y: usize| (x % a) * b + (y % b);
    let mut gens = vec![id(1, 0), id(a - 1, 0), id(0, 1), id(0, b - 1)];
    for &(x, y) in extras {
        if (x % a, y % b) != (0, 0) {
            gens.push(id(x, y));
            gens.push(id(a - x % a, b - y % b));
        }
    }
    gens.retain(|&g| g != 0);
    HomogeneousGraph::from_spec(&spec, &gens).unwrap()
}

fn host_strategy() -> impl Strategy<Value = HomogeneousGraph> {
    (
        2usize..7,
        2usize..6,
        prop::collection::vec((0usize..7, 0usize..6), 0..3),
    )
        .prop_map(|(a, b, extras)| product_host(a, b, &extras))
}

/// A subcube of `Q_dim` with random fixed coordinates and potential.
fn subcube_strategy() -> impl Strategy<Value = (ConvexSubgraph, Vec<f64>)> {
    (2usize..6)
        .prop_flat_map(|dim| (Just(dim), 0usize..(1 << dim), 0usize..(1 << dim)))
        .prop_filter("at least two vertices", |&(dim, mask, _)| {
            mask.count_ones() < dim as u32
        })
        .prop_flat_map(|(dim, mask, value)| {
            let s = subcube_subgraph(dim, mask, value).unwrap();
            let n = s.len();
            (Just(s), prop::collection::vec(0.0f64..5.0, n))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_is_an_involution(n in 1usize..40, m in 1usize..5) {
        for spec in [
            GroupSpec::Cyclic(n),
            GroupSpec::ElementaryAbelian2(m),
            GroupSpec::DirectProduct(vec![GroupSpec::Cyclic(n), GroupSpec::Cyclic(m + 1)]),
        ] {
            let g = build_group(&spec).unwrap();
            for a in g.elements() {
                prop_assert_eq!(g.inverse(g.inverse(a)), a);
                prop_assert_eq!(g.mul(a, g.inverse(a)), g.identity());
                prop_assert_eq!(g.mul(g.inverse(a), a), g.identity());
            }
        }
    }

    #[test]
    fn host_distance_is_a_metric(host in host_strategy()) {
        let n = host.order();
        for x in 0..n {
            prop_assert_eq!(host.dist(x, x), 0);
            for y in 0..n {
                let d = host.dist(x, y);
                prop_assert_eq!(d, host.dist(y, x));
                if x != y {
                    prop_assert!(d >= 1);
                }
                for z in 0..n {
                    prop_assert!(host.dist(x, z) <= d + host.dist(y, z));
                }
            }
        }
    }

    #[test]
    fn eigenvalues_sum_to_trace(host in host_strategy(), w in prop::collection::vec(0.0f64..5.0, 30)) {
        let host = Arc::new(host);
        let s = host.full_subgraph();
        let values: Vec<f64> = (0..s.len()).map(|i| w[i % w.len()]).collect();
        let op = dirichlet_hamiltonian(&s, &Potential::Values(values)).unwrap();
        let spec = eigendecompose(&op, &tol()).unwrap();
        let sum: f64 = spec.eigenvalues().iter().sum();
        prop_assert!((sum - op.trace()).abs() <= 1e-9 * op.trace().abs().max(1.0));
    }

    #[test]
    fn gap_is_invariant_under_constant_shift((s, w) in subcube_strategy(), c in 0.0f64..10.0) {
        let gap = |values: Vec<f64>| {
            let op = dirichlet_hamiltonian(&s, &Potential::Values(values)).unwrap();
            eigendecompose(&op, &tol()).unwrap().gap().unwrap()
        };
        let base = gap(w.clone());
        let shifted = gap(w.iter().map(|v| v + c).collect());
        prop_assert!((base - shifted).abs() <= 1e-9 * base.max(1.0));
    }

    #[test]
    fn modulus_of_continuity_is_monotone(host in host_strategy(), f in prop::collection::vec(-3.0f64..3.0, 42)) {
        let host = Arc::new(host);
        let s = host.full_subgraph();
        let f: Vec<f64> = (0..s.len()).map(|i| f[i % f.len()]).collect();
        let eta = modulus_of_continuity(&f, &s, &tol());
        prop_assert_eq!(eta.value(0), 0.0);
        for d in 1..=s.diameter() as i64 {
            prop_assert!(eta.value(d) >= eta.value(d - 1));
            prop_assert_eq!(eta.value(-d), -eta.value(d));
        }
        let spread = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - f.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!((eta.value(s.diameter() as i64) - spread).abs() <= 1e-12);
    }

    #[test]
    fn heat_never_increases_the_oscillation((s, _) in subcube_strategy(), seed in 0u64..1000) {
        let op = laplacian(&s);
        let spec = eigendecompose(&op, &tol()).unwrap();
        let phi0: Vec<f64> = (0..s.len()).map(|x| ((x as u64 * 2654435761 + seed) % 97) as f64 / 97.0).collect();
        let traj = evolve_spectral(&spec, &phi0, &default_grid(spec.eigenvalue(1))).unwrap();
        let d = s.diameter() as i64;
        let series: Vec<f64> = traj.eta_series(&s, &tol()).iter().map(|e| e.value(d)).collect();
        for w in series.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12, "{:?}", w);
        }
    }

    #[test]
    fn subcubes_are_strongly_convex((s, _) in subcube_strategy()) {
        let report = is_strongly_convex(&s).unwrap();
        prop_assert!(report.strongly_convex && report.isometric && report.local_criterion && report.closure);
        let host = s.host().clone();
        let again = induce_subgraph(&host, s.vertices()).unwrap();
        prop_assert_eq!(again.diameter(), s.diameter());
    }
}
