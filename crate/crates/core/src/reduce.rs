//! Exact reduction of complex-impedance networks.
//!
//! Two-terminal compositions ([`series`], [`parallel`]), the three-terminal
//! [`delta_to_y`] / [`y_to_delta`] transforms, and star-mesh node elimination
//! on the admittance graph. Eliminating a node is a Schur complement of the
//! admittance (Laplacian) matrix, so effective impedances between surviving
//! nodes are preserved exactly, independent of planarity.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde_json::json;

use crate::circuit::{EvalContext, Network, NodeId};
use crate::error::{Error, Result};

/// Relative tolerance below which a sum of impedances or admittances is
/// treated as a resonance.
pub const RESONANCE_RTOL: f64 = 1e-12;

/// Relative tolerance below which a final transfer admittance counts as open.
pub const OPEN_RTOL: f64 = 1e-14;

fn vanishes(sum: Complex64, scale: f64) -> bool {
    !(sum.norm() > RESONANCE_RTOL * scale)
}

pub fn series(z1: Complex64, z2: Complex64) -> Complex64 {
    z1 + z2
}

/// `z1 ∥ z2 = z1 z2 / (z1 + z2)`. Two short circuits in parallel stay short.
pub fn parallel(z1: Complex64, z2: Complex64) -> Result<Complex64> {
    if z1 == Complex64::new(0.0, 0.0) && z2 == Complex64::new(0.0, 0.0) {
        return Ok(z1);
    }
    let sum = z1 + z2;
    if vanishes(sum, z1.norm().max(z2.norm())) {
        return Err(Error::Resonance("parallel combination"));
    }
    Ok(z1 * z2 / sum)
}

/// Delta with sides `(ab, bc, ca)` to the equivalent star with legs `(a, b, c)`.
pub fn delta_to_y(
    z_ab: Complex64,
    z_bc: Complex64,
    z_ca: Complex64,
) -> Result<(Complex64, Complex64, Complex64)> {
    let s = z_ab + z_bc + z_ca;
    let scale = z_ab.norm().max(z_bc.norm()).max(z_ca.norm());
    if vanishes(s, scale) {
        return Err(Error::Resonance("delta-Y transform"));
    }
    Ok((z_ab * z_ca / s, z_ab * z_bc / s, z_bc * z_ca / s))
}

/// Star with legs `(a, b, c)` to the equivalent delta with sides `(ab, bc, ca)`.
pub fn y_to_delta(
    z_a: Complex64,
    z_b: Complex64,
    z_c: Complex64,
) -> Result<(Complex64, Complex64, Complex64)> {
    let scale = z_a.norm().max(z_b.norm()).max(z_c.norm());
    if [z_a, z_b, z_c].iter().any(|z| vanishes(*z, scale)) {
        return Err(Error::Resonance("Y-delta transform"));
    }
    let p = z_a * z_b + z_b * z_c + z_c * z_a;
    Ok((p / z_c, p / z_a, p / z_b))
}

/// Symmetric complex admittance graph with a boundary list. The weight of a
/// pair is the sum of the admittances of all parallel edges joining it.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    adj: BTreeMap<NodeId, BTreeMap<NodeId, Complex64>>,
    boundary: Vec<NodeId>,
}

impl WeightedGraph {
    /// Builds a graph from explicit admittance edges. Parallel entries add.
    pub fn from_admittances(
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (NodeId, NodeId, Complex64)>,
        boundary: Vec<NodeId>,
    ) -> Result<Self> {
        let mut adj: BTreeMap<NodeId, BTreeMap<NodeId, Complex64>> =
            nodes.into_iter().map(|n| (n, BTreeMap::new())).collect();
        for (u, v, y) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !y.is_finite() {
                return Err(Error::InvalidElement(format!("admittance {y} is not finite")));
            }
            for n in [u, v] {
                if !adj.contains_key(&n) {
                    return Err(Error::UnknownNode(n));
                }
            }
            *adj.get_mut(&u).unwrap().entry(v).or_default() += y;
            *adj.get_mut(&v).unwrap().entry(u).or_default() += y;
        }
        for b in &boundary {
            if !adj.contains_key(b) {
                return Err(Error::UnknownNode(*b));
            }
        }
        Ok(WeightedGraph { adj, boundary })
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.adj.keys().copied()
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn boundary(&self) -> &[NodeId] {
        &self.boundary
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.adj.contains_key(&n)
    }

    /// Each undirected edge once, as `(u, v, y)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, Complex64)> + '_ {
        self.adj.iter().flat_map(|(&u, nb)| {
            nb.iter()
                .filter(move |(&v, _)| u < v)
                .map(move |(&v, &y)| (u, v, y))
        })
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.adj.get(&n).map_or(0, BTreeMap::len)
    }

    /// Admittance between `a` and `b`; zero when no edge joins them.
    pub fn admittance(&self, a: NodeId, b: NodeId) -> Complex64 {
        self.adj
            .get(&a)
            .and_then(|nb| nb.get(&b))
            .copied()
            .unwrap_or_default()
    }

    /// Impedance of the single equivalent edge joining `a` and `b`, e.g. a
    /// side of a delta produced by [`WeightedGraph::boundary_trace`].
    pub fn edge_impedance(&self, a: NodeId, b: NodeId) -> Result<Complex64> {
        let y = self.admittance(a, b);
        if y == Complex64::new(0.0, 0.0) {
            return Err(Error::Open);
        }
        Ok(y.inv())
    }

    fn max_admittance(&self) -> f64 {
        self.edges().map(|(_, _, y)| y.norm()).fold(0.0, f64::max)
    }

    /// Star-mesh elimination of an interior node.
    pub fn eliminate_node(&self, k: NodeId) -> Result<WeightedGraph> {
        if self.boundary.contains(&k) {
            return Err(Error::BoundaryElimination(k));
        }
        let mut g = self.clone();
        g.eliminate_in_place(k)?;
        Ok(g)
    }

    fn eliminate_in_place(&mut self, k: NodeId) -> Result<()> {
        let star = self.adj.get(&k).ok_or(Error::UnknownNode(k))?;
        let s: Complex64 = star.values().sum();
        let scale = star.values().map(|y| y.norm()).fold(0.0, f64::max);
        if !star.is_empty() && vanishes(s, scale) {
            return Err(Error::Resonance("node elimination"));
        }
        let star: Vec<(NodeId, Complex64)> = self
            .adj
            .remove(&k)
            .unwrap()
            .into_iter()
            .collect();
        for (n, _) in &star {
            self.adj.get_mut(n).unwrap().remove(&k);
        }
        for (i, &(ni, yi)) in star.iter().enumerate() {
            let fi = yi / s;
            for &(nj, yj) in &star[i + 1..] {
                let w = fi * yj;
                *self.adj.get_mut(&ni).unwrap().entry(nj).or_default() += w;
                *self.adj.get_mut(&nj).unwrap().entry(ni).or_default() += w;
            }
        }
        Ok(())
    }

    /// Eliminates every node outside `keep`, smallest current degree first.
    pub fn reduce_to(&self, keep: &[NodeId]) -> Result<WeightedGraph> {
        let keep: BTreeSet<NodeId> = keep.iter().copied().collect();
        for n in &keep {
            if !self.contains(*n) {
                return Err(Error::UnknownNode(*n));
            }
        }
        let mut g = self.clone();
        let mut queue: BTreeSet<(usize, NodeId)> = g
            .adj
            .iter()
            .filter(|(n, _)| !keep.contains(n))
            .map(|(&n, nb)| (nb.len(), n))
            .collect();
        while let Some((_, k)) = queue.pop_first() {
            let neighbors: Vec<NodeId> = g.adj[&k].keys().copied().collect();
            for n in &neighbors {
                if !keep.contains(n) {
                    queue.remove(&(g.degree(*n), *n));
                }
            }
            g.eliminate_in_place(k)?;
            for n in neighbors {
                if !keep.contains(&n) {
                    queue.insert((g.degree(n), n));
                }
            }
        }
        g.boundary.retain(|b| keep.contains(b));
        Ok(g)
    }

    /// Eliminates the given nodes in exactly the given order.
    pub fn reduce_with_order(&self, order: &[NodeId]) -> Result<WeightedGraph> {
        let mut g = self.clone();
        for &k in order {
            if g.boundary.contains(&k) {
                return Err(Error::BoundaryElimination(k));
            }
            g.eliminate_in_place(k)?;
        }
        Ok(g)
    }

    /// Complete graph on the boundary reproducing every pairwise effective
    /// impedance of `self`.
    pub fn boundary_trace(&self) -> Result<WeightedGraph> {
        if self.boundary.len() < 2 {
            return Err(Error::InvalidParameter(
                "boundary trace needs at least two boundary nodes".into(),
            ));
        }
        let keep = self.boundary.clone();
        self.reduce_to(&keep)
    }

    /// Two-terminal impedance between `a` and `b`, i.e. the voltage across
    /// them when a unit current is injected at `a` and withdrawn at `b`.
    pub fn effective_impedance(&self, a: NodeId, b: NodeId) -> Result<Complex64> {
        if a == b {
            return Err(Error::InvalidParameter(
                "effective impedance needs two distinct nodes".into(),
            ));
        }
        let scale = self.max_admittance();
        let mut g = self.clone();
        g.boundary.clear();
        let y = g.reduce_to(&[a, b])?.admittance(a, b);
        if !(y.norm() > OPEN_RTOL * scale) {
            return Err(Error::Open);
        }
        Ok(y.inv())
    }

    /// Debug dump in the network JSON layout with `admittance` edge fields.
    pub fn to_json(&self) -> String {
        let edges: Vec<_> = self
            .edges()
            .map(|(u, v, y)| json!([u, v, {"admittance": [y.re, y.im]}]))
            .collect();
        json!({
            "nodes": self.nodes().collect::<Vec<_>>(),
            "edges": edges,
            "boundary": self.boundary,
        })
        .to_string()
    }
}

/// Maps every edge of `net` to its admittance at `ctx`, summing parallel edges.
pub fn evaluate(net: &Network, ctx: &EvalContext) -> Result<WeightedGraph> {
    let edges = net
        .edges()
        .iter()
        .map(|e| {
            let z = e.element().impedance(ctx);
            if z == Complex64::new(0.0, 0.0) {
                return Err(Error::ZeroImpedance);
            }
            let (u, v) = e.endpoints();
            Ok((u, v, z.inv()))
        })
        .collect::<Result<Vec<_>>>()?;
    WeightedGraph::from_admittances(net.nodes().iter().copied(), edges, net.boundary().to_vec())
}

pub fn eliminate_node(g: &WeightedGraph, k: NodeId) -> Result<WeightedGraph> {
    g.eliminate_node(k)
}

pub fn effective_impedance(net: &Network, ctx: &EvalContext, a: NodeId, b: NodeId) -> Result<Complex64> {
    for n in [a, b] {
        if !net.contains(n) {
            return Err(Error::UnknownNode(n));
        }
    }
    evaluate(net, ctx)?.effective_impedance(a, b)
}

pub fn boundary_trace(net: &Network, ctx: &EvalContext) -> Result<WeightedGraph> {
    evaluate(net, ctx)?.boundary_trace()
}
