//! Lazy edge weights.
//!
//! Before an edge is evaluated its lazy weight is the (optionally inflated)
//! heuristic weight; afterwards it is the true weight. Calling [`LazyWeights::evaluate`]
//! is the only way to reveal a true weight and is what the benchmarks count.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::{validate_weight, ChangeBatch, Cost, Edge, EdgeId, Graph, VertexId};

#[derive(Clone, Debug)]
pub struct LazyWeights {
    heuristic: Vec<Cost>,
    truth: Vec<Cost>,
    evaluated: Vec<bool>,
    inflation: f64,
    eval_counter: u64,
    eval_delay: Duration,
    violations: u64,
}

impl LazyWeights {
    /// Builds the store with nothing evaluated. `heuristic` must be finite and positive.
    pub fn new(heuristic: Vec<Cost>, truth: Vec<Cost>, inflation: f64) -> Result<Self> {
        if heuristic.len() != truth.len() {
            return Err(Error::InvalidParameter(format!(
                "{} heuristic weights for {} true weights",
                heuristic.len(),
                truth.len()
            )));
        }
        check_inflation(inflation)?;
        for (i, (&h, &w)) in heuristic.iter().zip(&truth).enumerate() {
            check_heuristic(EdgeId(i), h)?;
            if w.is_nan() || w <= 0.0 {
                return Err(Error::InvalidParameter(format!("true weight {w} of edge #{i}")));
            }
        }
        let n = heuristic.len();
        Ok(LazyWeights {
            heuristic,
            truth,
            evaluated: vec![false; n],
            inflation,
            eval_counter: 0,
            eval_delay: Duration::ZERO,
            violations: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.heuristic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heuristic.is_empty()
    }

    pub fn inflation(&self) -> f64 {
        self.inflation
    }

    /// Changes ε₁. Only unevaluated edges are affected; callers must repair
    /// the vertices that depend on them.
    pub fn set_inflation(&mut self, inflation: f64) -> Result<()> {
        check_inflation(inflation)?;
        self.inflation = inflation;
        Ok(())
    }

    /// Busy-wait applied inside every true-weight computation.
    pub fn set_eval_delay(&mut self, delay: Duration) {
        self.eval_delay = delay;
    }

    /// Number of true-weight computations performed so far.
    pub fn eval_count(&self) -> u64 {
        self.eval_counter
    }

    /// Invariant violations observed by the post-operation checks.
    pub fn violations(&self) -> u64 {
        self.violations
    }

    #[inline]
    pub fn is_evaluated(&self, e: EdgeId) -> bool {
        self.evaluated[e.0]
    }

    #[inline]
    pub fn heuristic(&self, e: EdgeId) -> Cost {
        self.heuristic[e.0]
    }

    /// The true weight without counting an evaluation. Reserved for oracles and audits.
    #[inline]
    pub fn peek_truth(&self, e: EdgeId) -> Cost {
        self.truth[e.0]
    }

    pub fn truths(&self) -> &[Cost] {
        &self.truth
    }

    #[inline]
    pub fn lazy(&self, e: EdgeId) -> Cost {
        if self.evaluated[e.0] {
            self.truth[e.0]
        } else {
            self.inflation * self.heuristic[e.0]
        }
    }

    /// Lazy weight of `edge`, never triggering an evaluation.
    pub fn lazy_weight(&self, graph: &Graph, edge: Edge) -> Result<Cost> {
        Ok(self.lazy(graph.require_edge(edge)?))
    }

    /// Reveals the true weight of `e`. Returns the weight and whether it differs
    /// from the lazy weight held before the call. Idempotent on evaluated edges.
    pub fn evaluate(&mut self, e: EdgeId) -> (Cost, bool) {
        if self.evaluated[e.0] {
            return (self.truth[e.0], false);
        }
        let before = self.lazy(e);
        self.eval_counter += 1;
        self.busy_wait();
        self.evaluated[e.0] = true;
        let w = self.truth[e.0];
        self.check_edge(e);
        (w, w != before)
    }

    /// Evaluates every edge (used to emulate fully-known graphs).
    pub fn evaluate_all(&mut self) {
        for i in 0..self.len() {
            self.evaluate(EdgeId(i));
        }
    }

    /// Forgets every evaluation; counters are kept.
    pub fn reset_evaluations(&mut self) {
        self.evaluated.iter_mut().for_each(|f| *f = false);
    }

    /// Installs new true weights and reverts the changed edges to their heuristic
    /// lazy weight. The whole batch is validated before anything is applied.
    /// Returns the target vertex of every changed edge, in batch order.
    pub fn apply_change_batch(&mut self, graph: &Graph, batch: &ChangeBatch) -> Result<Vec<VertexId>> {
        let mut ids = Vec::with_capacity(batch.len());
        for c in batch.iter() {
            let id = graph.require_edge(c.edge)?;
            validate_weight(c.edge, c.weight)?;
            ids.push(id);
        }
        let mut targets = Vec::with_capacity(ids.len());
        for (c, id) in batch.iter().zip(ids) {
            self.truth[id.0] = c.weight;
            self.evaluated[id.0] = false;
            self.check_edge(id);
            targets.push(c.edge.target);
        }
        Ok(targets)
    }

    /// Registers a newly added edge (unevaluated).
    pub fn push_edge(&mut self, heuristic: Cost, truth: Cost) -> Result<EdgeId> {
        let id = EdgeId(self.len());
        check_heuristic(id, heuristic)?;
        if truth.is_nan() || truth <= 0.0 {
            return Err(Error::InvalidParameter(format!("true weight {truth} of new edge #{}", id.0)));
        }
        self.heuristic.push(heuristic);
        self.truth.push(truth);
        self.evaluated.push(false);
        Ok(id)
    }

    /// `lazy(e) <= ε₁·truth(e)` and the evaluated branch agrees with the stored values.
    pub fn edge_invariant_holds(&self, e: EdgeId) -> bool {
        let lazy = self.lazy(e);
        let branch_ok = if self.evaluated[e.0] {
            lazy.to_bits() == self.truth[e.0].to_bits()
        } else {
            lazy.to_bits() == (self.inflation * self.heuristic[e.0]).to_bits()
        };
        branch_ok && lazy <= self.inflation * self.truth[e.0]
    }

    /// Full scan; returns the number of edges violating [`Self::edge_invariant_holds`].
    pub fn audit(&self) -> usize {
        (0..self.len()).filter(|&i| !self.edge_invariant_holds(EdgeId(i))).count()
    }

    fn check_edge(&mut self, e: EdgeId) {
        if !self.edge_invariant_holds(e) {
            self.violations += 1;
        }
    }

    fn busy_wait(&self) {
        if self.eval_delay.is_zero() {
            return;
        }
        let start = Instant::now();
        while start.elapsed() < self.eval_delay {
            std::hint::spin_loop();
        }
    }
}

fn check_inflation(inflation: f64) -> Result<()> {
    if !(inflation >= 1.0 && inflation.is_finite()) {
        return Err(Error::InvalidParameter(format!("inflation {inflation} must be finite and >= 1")));
    }
    Ok(())
}

fn check_heuristic(e: EdgeId, h: Cost) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("heuristic weight {h} of edge #{} must be finite and positive", e.0)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::graph::INF;

    fn chain(n: usize) -> Graph {
        let mut g = Graph::with_vertices(n + 1);
        for i in 0..n {
            g.add_edge(VertexId(i), VertexId(i + 1)).unwrap();
        }
        g
    }

    #[test]
    fn lazy_weight_branches() {
        let g = chain(2);
        let mut w = LazyWeights::new(vec![2.0, 3.0], vec![2.0, 3.0], 1.0).unwrap();
        assert_eq!(w.lazy_weight(&g, Edge::new(0, 1)).unwrap(), 2.0);
        w.evaluate(EdgeId(1));
        assert_eq!(w.lazy_weight(&g, Edge::new(1, 2)).unwrap(), 3.0);
        assert!(w.lazy_weight(&g, Edge::new(2, 0)).is_err());

        let w = LazyWeights::new(vec![2.0], vec![5.0], 1.2).unwrap();
        assert_eq!(w.lazy(EdgeId(0)), 2.4);
        assert_eq!(w.eval_count(), 0);
    }

    #[test]
    fn evaluate_is_idempotent() {
        let mut w = LazyWeights::new(vec![2.0], vec![5.0], 1.0).unwrap();
        assert_eq!(w.evaluate(EdgeId(0)), (5.0, true));
        assert_eq!(w.evaluate(EdgeId(0)), (5.0, false));
        assert_eq!(w.eval_count(), 1);
    }

    #[test]
    fn change_batch_reverts_to_heuristic() {
        let g = chain(1);
        let mut w = LazyWeights::new(vec![1.0], vec![1.0], 1.0).unwrap();
        w.evaluate(EdgeId(0));
        let batch: ChangeBatch = [(Edge::new(0, 1), 10.0)].into_iter().collect();
        assert_eq!(w.apply_change_batch(&g, &batch).unwrap(), vec![VertexId(1)]);
        assert!(!w.is_evaluated(EdgeId(0)));
        assert_eq!(w.lazy(EdgeId(0)), 1.0);
        assert_eq!(w.peek_truth(EdgeId(0)), 10.0);

        assert!(w.apply_change_batch(&g, &ChangeBatch::new()).unwrap().is_empty());

        let blocked: ChangeBatch = [(Edge::new(0, 1), INF)].into_iter().collect();
        w.apply_change_batch(&g, &blocked).unwrap();
        assert_eq!(w.lazy(EdgeId(0)), 1.0);
        assert_eq!(w.evaluate(EdgeId(0)), (INF, true));
        assert_eq!(w.violations(), 0);
    }

    #[test]
    fn change_batch_is_validated_atomically() {
        let g = chain(2);
        let mut w = LazyWeights::new(vec![1.0, 1.0], vec![1.0, 1.0], 1.0).unwrap();
        let bad: ChangeBatch = [(Edge::new(0, 1), 4.0), (Edge::new(1, 2), 0.0)].into_iter().collect();
        assert!(w.apply_change_batch(&g, &bad).is_err());
        assert_eq!(w.peek_truth(EdgeId(0)), 1.0);
        let unknown: ChangeBatch = [(Edge::new(2, 1), 4.0)].into_iter().collect();
        assert!(matches!(w.apply_change_batch(&g, &unknown), Err(Error::UnknownEdge(_))));
    }

    #[test]
    fn inadmissible_change_is_reported() {
        let g = chain(1);
        let mut w = LazyWeights::new(vec![2.0], vec![2.0], 1.0).unwrap();
        let batch: ChangeBatch = [(Edge::new(0, 1), 1.0)].into_iter().collect();
        w.apply_change_batch(&g, &batch).unwrap();
        assert_eq!(w.violations(), 1);
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(LazyWeights::new(vec![1.0], vec![1.0], 0.5).is_err());
        assert!(LazyWeights::new(vec![INF], vec![1.0], 1.0).is_err());
        assert!(LazyWeights::new(vec![1.0], vec![], 1.0).is_err());
    }

    #[derive(Clone, Debug)]
    enum Op {
        Evaluate(usize),
        Change(usize, f64),
        Inflate(f64),
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (0..6usize).prop_map(Op::Evaluate),
            (0..6usize, prop_oneof![Just(INF), 1.0f64..10.0]).prop_map(|(e, w)| Op::Change(e, w)),
            prop_oneof![Just(1.0), Just(1.2), Just(std::f64::consts::SQRT_2)].prop_map(Op::Inflate),
        ]
    }

    proptest! {
        // Replays random operation sequences against a log-based model.
        #[test]
        fn branch_semantics_and_counter(ops in proptest::collection::vec(op(), 0..60)) {
            let g = chain(6);
            let h = vec![1.0; 6];
            let mut w = LazyWeights::new(h.clone(), vec![1.0; 6], 1.0).unwrap();
            let mut evaluated = [false; 6];
            let mut first_evals = 0u64;
            for op in ops {
                match op {
                    Op::Evaluate(e) => {
                        if !evaluated[e] { first_evals += 1; }
                        evaluated[e] = true;
                        w.evaluate(EdgeId(e));
                    }
                    Op::Change(e, nw) => {
                        evaluated[e] = false;
                        let batch: ChangeBatch = [(g.edge(EdgeId(e)), nw)].into_iter().collect();
                        w.apply_change_batch(&g, &batch).unwrap();
                    }
                    Op::Inflate(eps) => w.set_inflation(eps).unwrap(),
                }
                for e in 0..6 {
                    prop_assert_eq!(w.is_evaluated(EdgeId(e)), evaluated[e]);
                    let expect = if evaluated[e] { w.peek_truth(EdgeId(e)) } else { w.inflation() * h[e] };
                    prop_assert_eq!(w.lazy(EdgeId(e)).to_bits(), expect.to_bits());
                }
                prop_assert_eq!(w.audit(), 0);
            }
            prop_assert_eq!(w.eval_count(), first_evals);
            prop_assert_eq!(w.violations(), 0);
        }
    }
}
