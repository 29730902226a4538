//! Exact min-cost max-flow on small dense networks.
//!
//! Successive shortest paths with node potentials over exact rational costs.
//! Item arcs carry negative costs in the matching networks built by the
//! additive allocator, so the initial potentials come from one Bellman-Ford
//! pass. Determinism contract: arcs are relaxed in insertion order and
//! shortest-path ties break towards the lowest node index, so a fixed arc
//! ordering yields the same flow on every run and platform.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::Zero;

use crate::error::Error;
use crate::rational::Rational;
use crate::Result;

/// A directed arc with integral capacity and exact rational cost.
#[derive(Debug, Clone)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: u64,
    pub cost: Rational,
}

/// Flow network with designated source and sink. Parallel arcs are allowed,
/// self-loops are not.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    nodes: usize,
    source: usize,
    sink: usize,
    arcs: Vec<Arc>,
}

/// Result of a min-cost max-flow solve; `flows[k]` is the flow on input arc `k`.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub value: u64,
    pub flows: Vec<u64>,
    pub cost: Rational,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        assert!(source < nodes && sink < nodes && source != sink);
        Self { nodes, source, sink, arcs: Vec::new() }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, capacity: u64, cost: Rational) {
        assert!(from < self.nodes && to < self.nodes, "arc endpoint out of range");
        assert_ne!(from, to, "self-loops are not allowed");
        self.arcs.push(Arc { from, to, capacity, cost });
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Integral maximum flow of minimum cost.
    pub fn min_cost_max_flow(&self) -> Result<FlowResult> {
        Solver::new(self).run()
    }
}

struct Edge {
    to: usize,
    residual: u64,
    cost: Rational,
}

struct Solver<'a> {
    net: &'a FlowNetwork,
    // edge 2k is arc k, edge 2k+1 its reverse
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    potential: Vec<Rational>,
}

impl<'a> Solver<'a> {
    fn new(net: &'a FlowNetwork) -> Self {
        let mut edges = Vec::with_capacity(net.arcs.len() * 2);
        let mut adj = vec![Vec::new(); net.nodes];
        for arc in &net.arcs {
            adj[arc.from].push(edges.len());
            edges.push(Edge { to: arc.to, residual: arc.capacity, cost: arc.cost.clone() });
            adj[arc.to].push(edges.len());
            edges.push(Edge { to: arc.from, residual: 0, cost: -arc.cost.clone() });
        }
        Self { net, edges, adj, potential: vec![Rational::zero(); net.nodes] }
    }

    /// Bellman-Ford from the source over residual arcs; establishes feasible
    /// potentials when some arcs have negative cost.
    fn init_potentials(&mut self) -> Result<()> {
        let n = self.net.nodes;
        let mut dist: Vec<Option<Rational>> = vec![None; n];
        dist[self.net.source] = Some(Rational::zero());
        let mut changed = true;
        for round in 0..=n {
            if !changed {
                break;
            }
            changed = false;
            for (id, edge) in self.edges.iter().enumerate() {
                if edge.residual == 0 {
                    continue;
                }
                let from = self.edge_tail(id);
                if let Some(df) = dist[from].clone() {
                    let cand = df + &edge.cost;
                    if dist[edge.to].as_ref().is_none_or(|d| cand < *d) {
                        if round == n {
                            return Err(Error::TooLarge("negative-cost cycle in flow network".into()));
                        }
                        dist[edge.to] = Some(cand);
                        changed = true;
                    }
                }
            }
        }
        for v in 0..n {
            if let Some(d) = dist[v].take() {
                self.potential[v] = d;
            }
        }
        Ok(())
    }

    fn edge_tail(&self, id: usize) -> usize {
        // edges come in pairs; the partner's head is this edge's tail
        self.edges[id ^ 1].to
    }

    fn run(mut self) -> Result<FlowResult> {
        self.init_potentials()?;
        let n = self.net.nodes;
        let (source, sink) = (self.net.source, self.net.sink);
        let mut value = 0u64;
        let mut cost = Rational::zero();

        loop {
            // Dijkstra on reduced costs; ties pop the lowest node index.
            let mut dist: Vec<Option<Rational>> = vec![None; n];
            let mut parent: Vec<Option<usize>> = vec![None; n];
            let mut heap: BinaryHeap<Reverse<(Rational, usize)>> = BinaryHeap::new();
            dist[source] = Some(Rational::zero());
            heap.push(Reverse((Rational::zero(), source)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if dist[u].as_ref() != Some(&d) {
                    continue;
                }
                for &id in &self.adj[u] {
                    let edge = &self.edges[id];
                    if edge.residual == 0 {
                        continue;
                    }
                    let reduced = &edge.cost + &self.potential[u] - &self.potential[edge.to];
                    debug_assert!(reduced >= Rational::zero(), "negative reduced cost");
                    let cand = &d + &reduced;
                    if dist[edge.to].as_ref().is_none_or(|cur| cand < *cur) {
                        dist[edge.to] = Some(cand.clone());
                        parent[edge.to] = Some(id);
                        heap.push(Reverse((cand, edge.to)));
                    }
                }
            }
            if dist[sink].is_none() {
                break;
            }
            for v in 0..n {
                if let Some(d) = &dist[v] {
                    self.potential[v] += d;
                }
            }
            // bottleneck along the parent path
            let mut bottleneck = u64::MAX;
            let mut v = sink;
            while v != source {
                let id = parent[v].expect("path exists");
                bottleneck = bottleneck.min(self.edges[id].residual);
                v = self.edge_tail(id);
            }
            let mut v = sink;
            while v != source {
                let id = parent[v].expect("path exists");
                self.edges[id].residual -= bottleneck;
                self.edges[id ^ 1].residual += bottleneck;
                cost += &self.edges[id].cost * crate::rational::rat_int(bottleneck as i64);
                v = self.edge_tail(id);
            }
            value += bottleneck;
        }

        let flows = self
            .net
            .arcs
            .iter()
            .enumerate()
            .map(|(k, arc)| arc.capacity - self.edges[2 * k].residual)
            .collect();
        Ok(FlowResult { value, flows, cost })
    }
}
