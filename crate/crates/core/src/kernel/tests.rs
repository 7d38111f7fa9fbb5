use proptest::prelude::*;

use super::*;
use crate::oracle::dijkstra;
use crate::worlds::fixtures::{self, A, B, G, S};
use crate::worlds::World;

fn kernel(w: &World, dir: Direction, root: VertexId, target: VertexId, truncation: Option<f64>) -> SearchKernel {
    SearchKernel::new(w.graph.clone(), w.lazy_weights(1.0).unwrap(), w.heuristic(), dir, root, target, false, truncation)
        .unwrap()
}

fn diamond() -> SearchKernel {
    kernel(&fixtures::diamond4(), Direction::Forward, S, G, None)
}

#[test]
fn key_examples() {
    assert_eq!(Key::new(INF, 0.0, 3.0, 0.0), Key { k1: 3.0, k2: 0.0 });
    assert_eq!(Key::new(4.0, 4.0, 2.0, 0.0), Key { k1: 6.0, k2: 4.0 });
    assert_eq!(Key::new(4.0, 4.0, 2.0, 5.0), Key { k1: 11.0, k2: 4.0 });
    assert!(Key { k1: 3.0, k2: 0.0 } < Key { k1: 3.0, k2: 1.0 });
    assert!(Key { k1: 2.0, k2: 9.0 } < Key::INFINITE);
}

#[test]
fn root_is_seeded() {
    let k = diamond();
    assert_eq!(k.record(S).rhs, 0.0);
    assert_eq!(k.queue().peek(), Some((S, Key { k1: 2.0, k2: 0.0 })));
    assert_eq!(k.queue_invariant_violations(), 0);
}

#[test]
fn update_vertex_uses_parents() {
    let mut k = diamond();
    k.nodes[S.0].g = 0.0;
    k.update_vertex(A);
    let a = k.record(A);
    assert_eq!((a.rhs, a.bp), (1.0, Some(S)));
    assert_eq!(k.queue().key_of(A), Some(Key { k1: 2.0, k2: 1.0 }));
    k.update_vertex(S);
    assert_eq!(k.record(S).rhs, 0.0);
    assert_eq!(k.record(S).bp, None);
    // consistent after recompute: leaves the queue
    k.nodes[A.0].g = 1.0;
    k.update_vertex(A);
    assert!(!k.queue().contains(A));
}

#[test]
fn update_vertex_ties_go_to_smaller_id() {
    let w = fixtures::diamond4();
    let mut k = kernel(&w, Direction::Forward, S, G, None);
    k.nodes[A.0].g = 1.0;
    k.nodes[B.0].g = 1.0;
    k.update_vertex(G);
    assert_eq!(k.record(G).bp, Some(A));
}

#[test]
fn gpi_examples() {
    let mut k = diamond();
    k.nodes[S.0].g = 0.0;
    k.update_vertex(A);
    k.nodes[A.0].g = 1.0;
    k.update_vertex(G);
    assert_eq!(k.compute_gpi(G), 2.0);
    assert_eq!(k.record(G).gpi, 2.0);
    assert_eq!(k.compute_gpi(B), INF);
    k.nodes[A.0].bp = Some(G);
    assert_eq!(k.compute_gpi(G), INF);
}

#[test]
fn obtain_path_splices_frozen_prefix() {
    let mut k = diamond();
    k.nodes[S.0].g = 0.0;
    k.update_vertex(A);
    assert_eq!(k.obtain_path(S).unwrap().vertices, vec![S]);
    assert_eq!(k.obtain_path(A).unwrap().vertices, vec![S, A]);
    k.truncate(A).unwrap();
    // later edits of bp(A) do not affect paths through the truncated vertex
    k.nodes[A.0].bp = None;
    k.nodes[A.0].g = 1.0;
    k.update_vertex(G);
    k.nodes[G.0].bp = Some(A);
    assert_eq!(k.obtain_path(G).unwrap().vertices, vec![S, A, G]);
    assert_eq!(k.compute_gpi(G), 2.0);
    k.clear_truncated();
    assert!(!k.record(A).truncated);
    assert_eq!(k.record(A).gpi, INF);
    // the cleared vertex got its parent back from update_vertex
    assert_eq!(k.obtain_path(G).unwrap().vertices, vec![S, A, G]);
    k.nodes[A.0].bp = None;
    assert!(k.obtain_path(G).is_err());
}

#[test]
fn events() {
    let mut k = diamond();
    k.nodes[S.0].g = 0.0;
    k.update_vertex(A);
    assert!(k.event_triggered(Event::ShortestPath, G).unwrap());
    assert!(!k.event_triggered(Event::ShortestPath, A).unwrap());
    assert!(k.event_triggered(Event::ConstantDepth(1), A).unwrap());
    assert!(!k.event_triggered(Event::ConstantDepth(2), A).unwrap());
    k.weights.evaluate(EdgeId(0));
    assert!(!k.event_triggered(Event::ConstantDepth(1), A).unwrap());
    assert!(Event::constant_depth(0).is_err());
}

#[test]
fn repair_on_diamond() {
    let mut k = diamond();
    let RepairOutcome::Path(p) = k.repair(Event::ShortestPath).unwrap() else { panic!() };
    assert_eq!(p.vertices, vec![S, A, G]);
    assert_eq!(k.lazy_path_cost(&p), 2.0);
    assert_eq!(k.queue_invariant_violations(), 0);
    assert_eq!(k.weights().eval_count(), 0);
    assert_eq!(k.evaluate_edges(&p).unwrap(), None);
    assert_eq!(k.weights().eval_count(), 2);
    assert_eq!(k.evaluate_edges(&p).unwrap(), None);
    assert_eq!(k.weights().eval_count(), 2);
}

#[test]
fn evaluate_edges_stops_at_first_change() {
    let w = fixtures::diamond4();
    let mut k = kernel(&w, Direction::Forward, S, G, None);
    let p = Path::new(vec![S, B, G]);
    assert_eq!(k.evaluate_edges(&p).unwrap(), Some(Edge::new(0, 2)));
    assert_eq!(k.weights().eval_count(), 1);
    let c = fixtures::chain3();
    let mut k = kernel(&c, Direction::Forward, VertexId(0), VertexId(3), None);
    let p = Path::new((0..4).map(VertexId).collect());
    assert_eq!(k.evaluate_edges(&p).unwrap(), Some(Edge::new(2, 3)));
    assert!(k.weights().is_evaluated(EdgeId(0)) && k.weights().is_evaluated(EdgeId(1)));
}

#[test]
fn reverse_tree_evaluates_from_agent_end() {
    let c = fixtures::chain3();
    let mut k = kernel(&c, Direction::Reverse, VertexId(3), VertexId(0), None);
    let RepairOutcome::Path(p) = k.repair(Event::ShortestPath).unwrap() else { panic!() };
    assert_eq!(p.vertices, vec![VertexId(3), VertexId(2), VertexId(1), VertexId(0)]);
    assert_eq!(k.evaluate_edges(&p).unwrap(), Some(Edge::new(2, 3)));
    assert_eq!(k.weights().eval_count(), 3);
}

#[test]
fn apply_changes_reverts_and_requeues() {
    let w = fixtures::diamond4();
    let mut k = diamond();
    let RepairOutcome::Path(p) = k.repair(Event::ShortestPath).unwrap() else { panic!() };
    k.evaluate_edges(&p).unwrap();
    let batch: ChangeBatch = [(Edge::new(1, 3), 10.0)].into_iter().collect();
    k.apply_changes(&batch).unwrap();
    assert!(!k.weights().is_evaluated(EdgeId(2)));
    assert_eq!(k.weights().lazy(EdgeId(2)), 1.0);
    assert_eq!(k.queue_invariant_violations(), 0);
    let _ = w;
}

/// Random graph with consistent (zero) heuristic and lazy weights below truth.
fn arb_graph() -> impl Strategy<Value = World> {
    (3usize..12).prop_flat_map(|n| {
        let edges = proptest::collection::vec((0..n, 0..n, 1u32..6, 0u32..4), 1..40);
        (Just(n), edges)
    })
    .prop_map(|(n, raw)| {
        let mut graph = Graph::with_vertices(n);
        let mut hat = Vec::new();
        let mut truth = Vec::new();
        for (u, v, h, extra) in raw {
            if u == v || graph.edge_id(VertexId(u), VertexId(v)).is_some() {
                continue;
            }
            graph.add_edge(VertexId(u), VertexId(v)).unwrap();
            hat.push(h as f64);
            truth.push(if extra == 3 { INF } else { (h + extra) as f64 });
        }
        World::from_weights(graph, hat, truth, crate::worlds::VertexHeuristic::Zero, false).unwrap()
    })
}

proptest! {
    #[test]
    fn candidates_are_lazy_optimal(w in arb_graph(), dir in prop_oneof![Just(Direction::Forward), Just(Direction::Reverse)]) {
        let n = w.vertex_count();
        let (root, target) = (VertexId(0), VertexId(n - 1));
        let mut k = kernel(&w, dir, root, target, None);
        for _ in 0..=w.graph.edge_count() {
            let lazy: Vec<Cost> = (0..w.graph.edge_count()).map(|i| k.weights().lazy(EdgeId(i))).collect();
            let (dist, _) = crate::oracle::shortest_tree(&w.graph, &lazy, root, dir);
            match k.repair(Event::ShortestPath).unwrap() {
                RepairOutcome::NoPath => {
                    prop_assert!(dist[target.0].is_infinite());
                    break;
                }
                RepairOutcome::Path(p) => {
                    prop_assert_eq!(k.lazy_path_cost(&p), dist[target.0]);
                    prop_assert!(k.counters().max_pops_in_call <= 2);
                    prop_assert_eq!(k.queue_invariant_violations(), 0);
                    match k.evaluate_edges(&p).unwrap() {
                        None => {
                            let truth = match dir {
                                Direction::Forward => dijkstra(&w.graph, &w.truth, root, target).cost,
                                Direction::Reverse => crate::oracle::dijkstra_to_goal(&w.graph, &w.truth, target, root).cost,
                            };
                            prop_assert_eq!(k.true_path_cost(&p), truth);
                            break;
                        }
                        Some(e) => {
                            let c = dir.child_of(e);
                            k.update_vertex(c);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn truncated_repair_is_bounded(w in arb_graph(), eps2 in prop_oneof![Just(1.0), Just(1.2), Just(2.0)]) {
        let n = w.vertex_count();
        let (root, target) = (VertexId(0), VertexId(n - 1));
        let mut k = kernel(&w, Direction::Forward, root, target, Some(eps2));
        let truth = dijkstra(&w.graph, &w.truth, root, target).cost;
        let (path, _) = crate::stationary::solve_rounds(&mut k, Event::ShortestPath).unwrap();
        match path {
            None => prop_assert!(truth.is_infinite()),
            Some(p) => {
                prop_assert!(k.true_path_cost(&p) <= eps2 * truth);
                prop_assert!(k.counters().max_pops_in_call <= 2);
            }
        }
        prop_assert_eq!(k.queue_invariant_violations(), 0);
    }
}

#[test]
fn key_exceeds_ignores_last_bit() {
    let a = Key { k1: 0.9088980882646356, k2: 0.1 };
    let b = Key { k1: 0.9088980882646355, k2: 0.1 };
    assert!(a > b);
    assert!(!a.exceeds(&b));
    assert!(Key { k1: 1.0, k2: 0.0 }.exceeds(&Key { k1: 0.5, k2: 0.0 }));
    assert!(Key { k1: 1.0, k2: 0.5 }.exceeds(&Key { k1: 1.0, k2: 0.25 }));
}

#[test]
fn event_parsing() {
    assert_eq!("sp".parse::<Event>().unwrap(), Event::ShortestPath);
    assert_eq!("inf".parse::<Event>().unwrap(), Event::ShortestPath);
    assert_eq!("cd3".parse::<Event>().unwrap(), Event::ConstantDepth(3));
    assert!("cd0".parse::<Event>().is_err());
    assert!("deep".parse::<Event>().is_err());
}
