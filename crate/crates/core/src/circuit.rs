//! Circuit elements, evaluation contexts and validated networks.
//!
//! A [`Network`] is a connected multigraph whose edges carry two-terminal
//! [`Element`]s, together with an ordered list of boundary terminals. Elements
//! become complex impedances once an [`EvalContext`] fixes the angular
//! frequency and the series regularization resistance.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque node identifier. Builders assign these deterministically.
pub type NodeId = usize;

/// A two-terminal circuit element.
///
/// Inductors and capacitors pick up the regularization resistance of the
/// evaluation context in series; resistors and fixed impedances do not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Element {
    /// Resistance in ohms.
    Resistor(f64),
    /// Inductance in henries.
    Inductor(f64),
    /// Capacitance in farads.
    Capacitor(f64),
    /// A frequency-independent complex impedance in ohms, serialized as `[re, im]`.
    Fixed(Complex64),
    /// Every impedance of the inner element multiplied by `factor`, the
    /// regularization resistance included. Used for geometrically rescaled
    /// copies of a circuit.
    Scaled { factor: f64, element: Box<Element> },
}

impl Element {
    pub fn scaled(self, factor: f64) -> Element {
        if factor == 1.0 {
            return self;
        }
        match self {
            Element::Fixed(z) => Element::Fixed(z * factor),
            Element::Scaled {
                factor: inner,
                element,
            } => Element::Scaled {
                factor: inner * factor,
                element,
            },
            other => Element::Scaled {
                factor,
                element: Box::new(other),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidElement(format!("{what} = {v}")));
        match self {
            Element::Resistor(r) if !(r.is_finite() && *r >= 0.0) => bad("resistance", *r),
            Element::Inductor(l) if !(l.is_finite() && *l > 0.0) => bad("inductance", *l),
            Element::Capacitor(c) if !(c.is_finite() && *c > 0.0) => bad("capacitance", *c),
            Element::Fixed(z) if !z.is_finite() => Err(Error::InvalidElement(format!(
                "fixed impedance {z} is not finite"
            ))),
            Element::Scaled { factor, element } => {
                if !(factor.is_finite() && *factor > 0.0) {
                    return bad("scale factor", *factor);
                }
                element.validate()
            }
            _ => Ok(()),
        }
    }

    /// Complex impedance of the element at `ctx`.
    pub fn impedance(&self, ctx: &EvalContext) -> Complex64 {
        let eps = Complex64::new(ctx.epsilon(), 0.0);
        let w = ctx.omega();
        match self {
            Element::Resistor(r) => Complex64::new(*r, 0.0),
            Element::Inductor(l) => eps + Complex64::new(0.0, w * l),
            Element::Capacitor(c) => eps + Complex64::new(0.0, -1.0 / (w * c)),
            Element::Fixed(z) => *z,
            Element::Scaled { factor, element } => element.impedance(ctx) * *factor,
        }
    }
}

/// Free-function form of [`Element::impedance`].
pub fn element_impedance(element: &Element, ctx: &EvalContext) -> Complex64 {
    element.impedance(ctx)
}

/// Angular frequency (rad/s, strictly positive) and series regularization
/// resistance (ohms, non-negative).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalContext {
    omega: f64,
    epsilon: f64,
}

impl EvalContext {
    pub fn new(omega: f64, epsilon: f64) -> Result<Self> {
        if omega.is_finite() && omega > 0.0 && epsilon.is_finite() && epsilon >= 0.0 {
            Ok(EvalContext { omega, epsilon })
        } else {
            Err(Error::InvalidContext { omega, epsilon })
        }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Impedance `ε + iωL` of an inductor.
    pub fn inductor(&self, l: f64) -> Complex64 {
        Element::Inductor(l).impedance(self)
    }

    /// Impedance `ε + 1/(iωC)` of a capacitor.
    pub fn capacitor(&self, c: f64) -> Complex64 {
        Element::Capacitor(c).impedance(self)
    }
}

/// An edge `[u, v, element]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge(pub NodeId, pub NodeId, pub Element);

impl Edge {
    pub fn new(u: NodeId, v: NodeId, element: Element) -> Self {
        Edge(u, v, element)
    }

    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.0, self.1)
    }

    pub fn element(&self) -> &Element {
        &self.2
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NetworkParts {
    nodes: Vec<NodeId>,
    edges: Vec<Edge>,
    boundary: Vec<NodeId>,
}

/// A validated, connected circuit multigraph with ordered boundary terminals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkParts", into = "NetworkParts")]
pub struct Network {
    nodes: Vec<NodeId>,
    edges: Vec<Edge>,
    boundary: Vec<NodeId>,
}

impl TryFrom<NetworkParts> for Network {
    type Error = Error;

    fn try_from(p: NetworkParts) -> Result<Self> {
        make_network(p.nodes, p.edges, p.boundary)
    }
}

impl From<Network> for NetworkParts {
    fn from(n: Network) -> Self {
        NetworkParts {
            nodes: n.nodes,
            edges: n.edges,
            boundary: n.boundary,
        }
    }
}

/// Validates and assembles a [`Network`].
pub fn make_network(nodes: Vec<NodeId>, edges: Vec<Edge>, boundary: Vec<NodeId>) -> Result<Network> {
    let mut index = BTreeMap::new();
    for (i, &n) in nodes.iter().enumerate() {
        if index.insert(n, i).is_some() {
            return Err(Error::DuplicateNode(n));
        }
    }
    let mut seen = BTreeSet::new();
    for &b in &boundary {
        if !index.contains_key(&b) {
            return Err(Error::UnknownNode(b));
        }
        if !seen.insert(b) {
            return Err(Error::DuplicateBoundary(b));
        }
    }

    let mut dsu = DisjointSets::new(nodes.len());
    for Edge(u, v, element) in &edges {
        let iu = *index.get(u).ok_or(Error::UnknownNode(*u))?;
        let iv = *index.get(v).ok_or(Error::UnknownNode(*v))?;
        if u == v {
            return Err(Error::SelfLoop(*u));
        }
        element.validate()?;
        dsu.union(iu, iv);
    }
    if nodes.is_empty() || dsu.components() != 1 {
        return Err(Error::Disconnected);
    }

    Ok(Network {
        nodes,
        edges,
        boundary,
    })
}

impl Network {
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary(&self) -> &[NodeId] {
        &self.boundary
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.nodes.contains(&n)
    }

    pub fn into_parts(self) -> (Vec<NodeId>, Vec<Edge>, Vec<NodeId>) {
        (self.nodes, self.edges, self.boundary)
    }

    /// Identifies `b` with `a`.
    ///
    /// Edges touching `b` are re-targeted to `a`, edges that become self-loops
    /// are dropped, and the boundary keeps the first occurrence of the merged
    /// node.
    pub fn merge_nodes(&self, a: NodeId, b: NodeId) -> Result<Network> {
        for n in [a, b] {
            if !self.contains(n) {
                return Err(Error::UnknownNode(n));
            }
        }
        if a == b {
            return Ok(self.clone());
        }
        let relabel = |n: NodeId| if n == b { a } else { n };
        let nodes = self.nodes.iter().copied().filter(|&n| n != b).collect();
        let edges = self
            .edges
            .iter()
            .map(|Edge(u, v, e)| Edge(relabel(*u), relabel(*v), e.clone()))
            .filter(|Edge(u, v, _)| u != v)
            .collect();
        let mut seen = BTreeSet::new();
        let boundary = self
            .boundary
            .iter()
            .map(|&n| relabel(n))
            .filter(|n| seen.insert(*n))
            .collect();
        Ok(Network {
            nodes,
            edges,
            boundary,
        })
    }

    /// Replaces the boundary list, keeping nodes and edges.
    pub fn with_boundary(&self, boundary: Vec<NodeId>) -> Result<Network> {
        make_network(self.nodes.clone(), self.edges.clone(), boundary)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("network serialization cannot fail")
    }

    pub fn from_json(s: &str) -> std::result::Result<Network, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Free-function form of [`Network::merge_nodes`].
pub fn merge_nodes(net: &Network, a: NodeId, b: NodeId) -> Result<Network> {
    net.merge_nodes(a, b)
}

/// Union-find over `0..n` with path halving.
#[derive(Debug, Clone)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    count: usize,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            count: n,
        }
    }

    pub(crate) fn push(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.count += 1;
        self.parent.len() - 1
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the sets of `x` and `y`; the smaller root survives.
    pub(crate) fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
            self.parent[hi] = lo;
            self.count -= 1;
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.parent.len()
    }

    pub(crate) fn components(&self) -> usize {
        self.count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(w: f64, e: f64) -> EvalContext {
        EvalContext::new(w, e).unwrap()
    }

    fn triangle() -> Network {
        make_network(
            vec![0, 1, 2],
            vec![
                Edge(0, 1, Element::Resistor(1.0)),
                Edge(1, 2, Element::Resistor(1.0)),
                Edge(2, 0, Element::Resistor(1.0)),
            ],
            vec![0, 1],
        )
        .unwrap()
    }

    #[test]
    fn element_impedances() {
        assert_eq!(
            Element::Inductor(1.0).impedance(&ctx(1.0, 0.0)),
            Complex64::new(0.0, 1.0)
        );
        assert_eq!(
            Element::Capacitor(1.0).impedance(&ctx(2.0, 0.001)),
            Complex64::new(0.001, -0.5)
        );
        let z = Complex64::new(3.0, 4.0);
        assert_eq!(Element::Fixed(z).impedance(&ctx(7.0, 0.5)), z);
        assert_eq!(Element::Resistor(2.5).impedance(&ctx(7.0, 0.5)), Complex64::new(2.5, 0.0));
    }

    #[test]
    fn scaled_element_scales_regularization_too() {
        let e = Element::Inductor(1.0).scaled(0.25);
        assert_eq!(e.impedance(&ctx(2.0, 0.1)), Complex64::new(0.025, 0.5));
        let nested = e.scaled(2.0);
        assert_eq!(nested.impedance(&ctx(2.0, 0.1)), Complex64::new(0.05, 1.0));
        assert_eq!(
            Element::Fixed(Complex64::new(1.0, 1.0)).scaled(3.0),
            Element::Fixed(Complex64::new(3.0, 3.0))
        );
    }

    #[test]
    fn context_rejects_bad_values() {
        assert!(EvalContext::new(0.0, 0.0).is_err());
        assert!(EvalContext::new(-1.0, 0.0).is_err());
        assert!(EvalContext::new(1.0, -1e-9).is_err());
        assert!(EvalContext::new(f64::NAN, 0.0).is_err());
        assert!(EvalContext::new(1.0, 0.0).is_ok());
    }

    #[test]
    fn element_validation() {
        assert!(Element::Resistor(0.0).validate().is_ok());
        assert!(Element::Resistor(-1.0).validate().is_err());
        assert!(Element::Inductor(0.0).validate().is_err());
        assert!(Element::Capacitor(-2.0).validate().is_err());
        assert!(Element::Inductor(1.0).scaled(-1.0).validate().is_err());
    }

    #[test]
    fn make_network_validates() {
        assert_eq!(triangle().nodes().len(), 3);
        assert_eq!(
            make_network(vec![0, 1], vec![], vec![0, 1]).unwrap_err(),
            Error::Disconnected
        );
        assert_eq!(
            make_network(vec![0, 1], vec![Edge(0, 0, Element::Resistor(1.0))], vec![]).unwrap_err(),
            Error::SelfLoop(0)
        );
        assert_eq!(
            make_network(vec![0, 1], vec![Edge(0, 1, Element::Resistor(1.0))], vec![0, 7]).unwrap_err(),
            Error::UnknownNode(7)
        );
        assert_eq!(
            make_network(vec![0, 1], vec![Edge(0, 1, Element::Resistor(1.0))], vec![1, 1]).unwrap_err(),
            Error::DuplicateBoundary(1)
        );
        assert_eq!(
            make_network(vec![0, 1], vec![Edge(0, 2, Element::Resistor(1.0))], vec![]).unwrap_err(),
            Error::UnknownNode(2)
        );
    }

    #[test]
    fn merge_triangle_corners() {
        let m = triangle().merge_nodes(0, 1).unwrap();
        assert_eq!(m.nodes(), &[0, 2]);
        assert_eq!(m.edges().len(), 2);
        assert!(m.edges().iter().all(|e| {
            let (u, v) = e.endpoints();
            (u, v) == (0, 2) || (u, v) == (2, 0)
        }));
        // both were boundary nodes: the merged node appears once
        assert_eq!(m.boundary(), &[0]);
    }

    #[test]
    fn merge_reduces_boundary_by_one() {
        let net = triangle().with_boundary(vec![0, 1, 2]).unwrap();
        let m = net.merge_nodes(1, 2).unwrap();
        assert_eq!(m.boundary(), &[0, 1]);
        assert!(merge_nodes(&net, 0, 9).is_err());
    }

    #[test]
    fn json_schema() {
        let net = make_network(
            vec![0, 1],
            vec![
                Edge(0, 1, Element::Inductor(1.0)),
                Edge(0, 1, Element::Fixed(Complex64::new(3.0, -4.0))),
            ],
            vec![0, 1],
        )
        .unwrap();
        let json = net.to_json();
        assert_eq!(
            json,
            r#"{"nodes":[0,1],"edges":[[0,1,{"kind":"inductor","value":1.0}],[0,1,{"kind":"fixed","value":[3.0,-4.0]}]],"boundary":[0,1]}"#
        );
        assert_eq!(Network::from_json(&json).unwrap(), net);
        // validation runs on deserialization
        assert!(Network::from_json(r#"{"nodes":[0,1],"edges":[],"boundary":[0,1]}"#).is_err());
    }

    #[test]
    fn decompose_and_rebuild_is_identity() {
        let net = triangle();
        let (n, e, b) = net.clone().into_parts();
        assert_eq!(make_network(n, e, b).unwrap(), net);
    }
}
