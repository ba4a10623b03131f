use std::collections::VecDeque;

use bibcoupling::ingest::PeriodSpec;
use bibcoupling::network::{CoupledGraph, Edge, GraphContext, NodeKind, WeightKind};
use bibcoupling::percolation::{
    aggregate_profiles, components_at, connectivity_profile, cosine_grid, default_threshold_grid,
    quantile_grid, PercolationError,
};
use proptest::prelude::*;

fn graph(n: usize, edges: Vec<(u32, u32, f64)>, kind: WeightKind) -> CoupledGraph<f64> {
    let mut edges: Vec<Edge<f64>> = edges
        .into_iter()
        .map(|(i, j, weight)| Edge { i, j, weight })
        .collect();
    edges.sort_by_key(|e| (e.i, e.j));
    CoupledGraph {
        node_kind: NodeKind::Article,
        weight_kind: kind,
        nodes: (0..n).map(|i| format!("n{i}")).collect(),
        edges,
        context: GraphContext::new("s", PeriodSpec::new("p", 1990, 1999)),
    }
}

/// Component sizes at `t` by breadth-first search over the kept edges.
fn bfs_components(g: &CoupledGraph<f64>, t: f64) -> Vec<usize> {
    let n = g.node_count();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges.iter().filter(|e| e.weight >= t) {
        adj[e.i as usize].push(e.j as usize);
        adj[e.j as usize].push(e.i as usize);
    }
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

fn random_graph() -> impl Strategy<Value = CoupledGraph<f64>> {
    (1usize..100).prop_flat_map(|n| {
        let n32 = n as u32;
        prop::collection::btree_map((0..n32, 0..n32), 1u32..=20, 0..(3 * n)).prop_map(move |m| {
            let edges = m
                .into_iter()
                .filter(|((i, j), _)| i != j)
                .map(|((i, j), w)| ((i.min(j), i.max(j)), w as f64 / 20.0))
                .collect::<std::collections::BTreeMap<_, _>>()
                .into_iter()
                .map(|((i, j), w)| (i, j, w))
                .collect();
            graph(n, edges, WeightKind::CosineOverlap)
        })
    })
}

#[test]
fn triangle_profile() {
    let g = graph(
        3,
        vec![(0, 1, 0.2), (0, 2, 0.5), (1, 2, 0.9)],
        WeightKind::CosineOverlap,
    );
    let p = connectivity_profile(&g, &[0.1, 0.3, 0.6, 1.0]).unwrap();
    assert_eq!(p.components, vec![1, 1, 2, 3]);
    assert_eq!(p.c_values, vec![1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
    let s = components_at(&g, 0.6);
    assert_eq!(s.component_sizes, vec![2, 1]);
    assert_eq!(s.isolate_count, 1);
}

#[test]
fn extremes() {
    let empty = graph(4, vec![], WeightKind::CosineOverlap);
    assert_eq!(
        connectivity_profile(&empty, &[0.0, 0.5]).unwrap().c_values,
        vec![1.0, 1.0]
    );
    assert_eq!(default_threshold_grid(&empty), vec![0.0]);

    let ones = graph(3, vec![(0, 1, 1.0), (1, 2, 1.0)], WeightKind::CosineOverlap);
    let p = connectivity_profile(&ones, &cosine_grid::<f64>()).unwrap();
    assert!(p.c_values.iter().all(|&c| c == 1.0 / 3.0));

    let nodes_only = graph(0, vec![], WeightKind::CosineOverlap);
    assert_eq!(
        connectivity_profile(&nodes_only, &[0.0]).unwrap_err(),
        PercolationError::EmptyGraph
    );
    assert_eq!(
        connectivity_profile(&ones, &[0.5, 0.2]).unwrap_err(),
        PercolationError::UnsortedThresholds(1)
    );
}

#[test]
fn cosine_grid_is_hundredths() {
    let grid = cosine_grid::<f64>();
    assert_eq!(grid.len(), 101);
    assert_eq!(grid[10], 0.1);
    assert_eq!(grid[100], 1.0);
}

#[test]
fn quantile_grid_matches_percentiles() {
    // Weights 1..100: position h = 0.99 k, so the k-th percentile is 1 + 0.99 k.
    let weights: Vec<f64> = (1..=100).map(f64::from).collect();
    let grid = quantile_grid(&weights);
    assert_eq!(grid.len(), 101);
    for (k, &q) in grid.iter().enumerate() {
        assert!((q - (1.0 + 0.99 * k as f64)).abs() < 1e-12, "k = {k}: {q}");
    }
    assert_eq!(quantile_grid(&[2.5; 7]), vec![2.5]);
    let g = graph(3, vec![(0, 1, 3.0), (1, 2, 3.0)], WeightKind::Bm25Text);
    assert_eq!(default_threshold_grid(&g), vec![3.0]);
}

#[test]
fn aggregate_mean_and_median() {
    let a = graph(2, vec![(0, 1, 0.5)], WeightKind::CosineOverlap);
    let b = graph(2, vec![], WeightKind::CosineOverlap);
    let c = graph(4, vec![(0, 1, 0.5)], WeightKind::CosineOverlap);
    let grid = [0.0, 1.0];
    let profiles: Vec<_> = [a, b, c]
        .iter()
        .map(|g| connectivity_profile(g, &grid).unwrap())
        .collect();
    let refs: Vec<_> = profiles.iter().collect();
    let agg = aggregate_profiles(&refs).unwrap().unwrap();
    assert_eq!(agg.c_mean[0], (0.5 + 1.0 + 0.75) / 3.0);
    assert_eq!(agg.c_median[0], 0.75);
    assert_eq!(agg.c_median[1], 1.0);
    let other = connectivity_profile(&graph(2, vec![], WeightKind::CosineOverlap), &[0.0]).unwrap();
    assert_eq!(
        aggregate_profiles(&[&profiles[0], &other]).unwrap_err(),
        PercolationError::GridMismatch
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sweep_equals_bfs(g in random_graph()) {
        let grid = cosine_grid::<f64>();
        let p = connectivity_profile(&g, &grid).unwrap();
        prop_assert!(p.check_monotone().is_ok());
        for (k, &t) in grid.iter().enumerate() {
            let sizes = bfs_components(&g, t);
            prop_assert_eq!(p.components[k], sizes.len());
            prop_assert_eq!(p.giant_fractions[k], sizes[0] as f64 / g.node_count() as f64);
            let pointwise = components_at(&g, t);
            prop_assert_eq!(&pointwise.component_sizes, &sizes);
            prop_assert_eq!(pointwise.component_sizes.iter().sum::<usize>(), g.node_count());
        }
        if g.max_weight().is_none_or(|w| w < 1.0) {
            prop_assert_eq!(p.c_values[100], 1.0);
        }
        prop_assert_eq!(p.components[0], bfs_components(&g, f64::MIN_POSITIVE).len());
    }

    #[test]
    fn quantile_grid_is_strictly_ascending(ws in prop::collection::vec(0.001f64..50.0, 1..300)) {
        let grid = quantile_grid(&ws);
        prop_assert!(grid.windows(2).all(|w| w[0] < w[1]));
        let min = ws.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = ws.iter().cloned().fold(0.0, f64::max);
        prop_assert_eq!(grid[0], min);
        prop_assert_eq!(*grid.last().unwrap(), max);
    }
}
