//! Finite level-N approximations of the three self-similar circuit families.
//!
//! * **ladder**: `N` cells of a series inductor followed by a shunt capacitor
//!   to the return rail, closed by the termination.
//! * **sg**: a triangular cell on corners `A, B, C` with an inductor across
//!   every pair of corners, a capacitor from each corner to the matching outer
//!   corner of an inner gasket, and the inner gasket made of three level-(N−1)
//!   cells. Depth-0 cells are triangles of termination elements.
//! * **hanoi**: three level-(N−1) pieces scaled by `r` (top, bottom-left,
//!   bottom-right), joined by two capacitors and one inductor. Depth-0 pieces
//!   are stars of termination elements.
//!
//! Node numbering is deterministic: identical specs yield identical networks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{make_network, DisjointSets, Edge, Element, EvalContext, Network, NodeId};
use crate::error::{Error, Result};
use crate::reduce::{boundary_trace, delta_to_y, effective_impedance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Ladder,
    Sg,
    Hanoi,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Ladder => "ladder",
            Family::Sg => "sg",
            Family::Hanoi => "hanoi",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ladder" => Ok(Family::Ladder),
            "sg" => Ok(Family::Sg),
            "hanoi" => Ok(Family::Hanoi),
            other => Err(Error::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }
}

/// What closes the circuit at depth 0.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Terminals merged into one node.
    #[default]
    Short,
    /// No element at all.
    Open,
    /// An inductor of the family's inductance.
    Inductor,
    /// A fixed complex impedance on every termination branch.
    Fixed(Complex64),
    /// Vertical and lateral legs of a hanoi depth-0 star.
    FixedPair { zv: Complex64, zl: Complex64 },
}

impl std::str::FromStr for Termination {
    type Err = Error;

    /// Accepts `short`, `open`, `inductor`, `fixed:RE,IM` and
    /// `pair:ZV_RE,ZV_IM,ZL_RE,ZL_IM`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unrecognized termination {s:?}"));
        let numbers = |list: &str| -> Result<Vec<f64>> {
            list.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
                .collect()
        };
        match s {
            "short" => Ok(Termination::Short),
            "open" => Ok(Termination::Open),
            "inductor" => Ok(Termination::Inductor),
            _ => {
                if let Some(rest) = s.strip_prefix("fixed:") {
                    match numbers(rest)?.as_slice() {
                        [re, im] => Ok(Termination::Fixed(Complex64::new(*re, *im))),
                        _ => Err(bad()),
                    }
                } else if let Some(rest) = s.strip_prefix("pair:") {
                    match numbers(rest)?.as_slice() {
                        [a, b, c, d] => Ok(Termination::FixedPair {
                            zv: Complex64::new(*a, *b),
                            zl: Complex64::new(*c, *d),
                        }),
                        _ => Err(bad()),
                    }
                } else {
                    Err(bad())
                }
            }
        }
    }
}

/// Circuit parameters without the finite-approximation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyParams {
    Ladder { l: f64, c: f64 },
    Sg { l: f64, c: f64 },
    Hanoi { l: f64, c: f64, r: f64 },
}

impl FamilyParams {
    pub fn family(&self) -> Family {
        match self {
            FamilyParams::Ladder { .. } => Family::Ladder,
            FamilyParams::Sg { .. } => Family::Sg,
            FamilyParams::Hanoi { .. } => Family::Hanoi,
        }
    }

    pub fn inductance(&self) -> f64 {
        match *self {
            FamilyParams::Ladder { l, .. } | FamilyParams::Sg { l, .. } | FamilyParams::Hanoi { l, .. } => l,
        }
    }

    pub fn capacitance(&self) -> f64 {
        match *self {
            FamilyParams::Ladder { c, .. } | FamilyParams::Sg { c, .. } | FamilyParams::Hanoi { c, .. } => c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (l, c) = (self.inductance(), self.capacitance());
        if !(l.is_finite() && l > 0.0 && c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!("need L > 0 and C > 0, got L = {l}, C = {c}")));
        }
        if let FamilyParams::Hanoi { r, .. } = *self {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidParameter(format!("need 0 < r < 1, got r = {r}")));
            }
        }
        Ok(())
    }

    /// Real reference impedance `√(L/C)`.
    pub fn reference_impedance(&self) -> f64 {
        (self.inductance() / self.capacitance()).sqrt()
    }
}

/// The characteristic quantity of a family: one impedance for the ladder and
/// the gasket, the (vertical, lateral) leg pair for the hanoi star.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FamilyImpedance {
    Scalar(Complex64),
    Pair { zv: Complex64, zl: Complex64 },
}

impl FamilyImpedance {
    /// The impedance reported as `z` in tables: the lateral leg for hanoi.
    pub fn primary(&self) -> Complex64 {
        match *self {
            FamilyImpedance::Scalar(z) => z,
            FamilyImpedance::Pair { zl, .. } => zl,
        }
    }

    pub fn norm(&self) -> f64 {
        match *self {
            FamilyImpedance::Scalar(z) => z.norm(),
            FamilyImpedance::Pair { zv, zl } => zv.norm().hypot(zl.norm()),
        }
    }

    /// Euclidean distance; mismatched shapes are infinitely far apart.
    pub fn distance(&self, other: &FamilyImpedance) -> f64 {
        match (*self, *other) {
            (FamilyImpedance::Scalar(a), FamilyImpedance::Scalar(b)) => (a - b).norm(),
            (FamilyImpedance::Pair { zv: a, zl: b }, FamilyImpedance::Pair { zv: c, zl: d }) => {
                (a - c).norm().hypot((b - d).norm())
            }
            _ => f64::INFINITY,
        }
    }

    /// `|self − reference| / |reference|`.
    pub fn relative_deviation(&self, reference: &FamilyImpedance) -> f64 {
        self.distance(reference) / reference.norm().max(f64::MIN_POSITIVE)
    }
}

/// A family together with the depth and termination of its finite approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub inductance: f64,
    pub capacitance: f64,
    /// Impedance ratio between successive scales; hanoi only.
    pub ratio: f64,
    pub depth: u32,
    pub termination: Termination,
}

impl FamilySpec {
    pub fn new(params: FamilyParams, depth: u32, termination: Termination) -> Self {
        let ratio = match params {
            FamilyParams::Hanoi { r, .. } => r,
            _ => 0.5,
        };
        FamilySpec {
            family: params.family(),
            inductance: params.inductance(),
            capacitance: params.capacitance(),
            ratio,
            depth,
            termination,
        }
    }

    pub fn params(&self) -> FamilyParams {
        let (l, c) = (self.inductance, self.capacitance);
        match self.family {
            Family::Ladder => FamilyParams::Ladder { l, c },
            Family::Sg => FamilyParams::Sg { l, c },
            Family::Hanoi => FamilyParams::Hanoi { l, c, r: self.ratio },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params().validate()?;
        if matches!(self.termination, Termination::FixedPair { .. }) && self.family != Family::Hanoi {
            return Err(Error::InvalidParameter(
                "a vertical/lateral termination pair only applies to hanoi".into(),
            ));
        }
        Ok(())
    }
}

/// Node allocator that records short circuits and relabels on completion.
struct Builder {
    sets: DisjointSets,
    edges: Vec<(usize, usize, Element)>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            sets: DisjointSets::new(0),
            edges: Vec::new(),
        }
    }

    fn node(&mut self) -> usize {
        self.sets.push()
    }

    fn edge(&mut self, a: usize, b: usize, element: Element) {
        self.edges.push((a, b, element));
    }

    fn short(&mut self, a: usize, b: usize) {
        self.sets.union(a, b);
    }

    fn finish(mut self, boundary: &[usize]) -> Result<Network> {
        // class roots are their smallest member, so a forward scan labels
        // every root before any other member of its class
        let n = self.sets.len();
        let mut label = vec![0; n];
        let mut next = 0;
        for x in 0..n {
            let root = self.sets.find(x);
            if root == x {
                label[x] = next;
                next += 1;
            } else {
                label[x] = label[root];
            }
        }
        let edges: Vec<Edge> = self
            .edges
            .into_iter()
            .map(|(a, b, e)| Edge(label[a], label[b], e))
            .filter(|Edge(u, v, _)| u != v)
            .collect();
        let mut bound: Vec<NodeId> = Vec::with_capacity(boundary.len());
        for &b in boundary {
            if !bound.contains(&label[b]) {
                bound.push(label[b]);
            }
        }

        // parts with no path to the boundary carry no current; drop them
        let mut parts = DisjointSets::new(next);
        for Edge(u, v, _) in &edges {
            parts.union(*u, *v);
        }
        let reached: Vec<usize> = bound.iter().map(|&b| parts.find(b)).collect();
        let keep: Vec<bool> = (0..next).map(|x| reached.contains(&parts.find(x))).collect();
        if keep.iter().all(|&k| k) {
            return make_network((0..next).collect(), edges, bound);
        }
        let mut relabel = vec![usize::MAX; next];
        let mut count = 0;
        for x in 0..next {
            if keep[x] {
                relabel[x] = count;
                count += 1;
            }
        }
        let edges = edges
            .into_iter()
            .filter(|Edge(u, _, _)| keep[*u])
            .map(|Edge(u, v, e)| Edge(relabel[u], relabel[v], e))
            .collect();
        let bound = bound.into_iter().map(|b| relabel[b]).collect();
        make_network((0..count).collect(), edges, bound)
    }
}

pub fn build(spec: &FamilySpec) -> Result<Network> {
    match spec.family {
        Family::Ladder => build_ladder(spec),
        Family::Sg => build_sg(spec),
        Family::Hanoi => build_hanoi(spec),
    }
}

fn require(spec: &FamilySpec, family: Family) -> Result<()> {
    if spec.family != family {
        return Err(Error::InvalidParameter(format!(
            "expected a {family} spec, got {}",
            spec.family
        )));
    }
    spec.validate()
}

/// Closes the branch `a`–`b` with the termination, scaled by `scale`.
fn terminate(b: &mut Builder, spec: &FamilySpec, x: usize, y: usize, scale: f64, lateral: bool) {
    match spec.termination {
        Termination::Short => b.short(x, y),
        Termination::Open => {}
        Termination::Inductor => b.edge(x, y, Element::Inductor(spec.inductance).scaled(scale)),
        Termination::Fixed(z) => b.edge(x, y, Element::Fixed(z * scale)),
        Termination::FixedPair { zv, zl } => {
            let z = if lateral { zl } else { zv };
            b.edge(x, y, Element::Fixed(z * scale))
        }
    }
}

/// Ladder: boundary is `(input, rail)`.
pub fn build_ladder(spec: &FamilySpec) -> Result<Network> {
    require(spec, Family::Ladder)?;
    let mut b = Builder::new();
    let input = b.node();
    let rail = b.node();
    let mut tip = input;
    for _ in 0..spec.depth {
        let next = b.node();
        b.edge(tip, next, Element::Inductor(spec.inductance));
        b.edge(next, rail, Element::Capacitor(spec.capacitance));
        tip = next;
    }
    terminate(&mut b, spec, tip, rail, 1.0, false);
    b.finish(&[input, rail])
}

/// Modified gasket: boundary is the three outer corners.
pub fn build_sg(spec: &FamilySpec) -> Result<Network> {
    require(spec, Family::Sg)?;
    let mut b = Builder::new();
    let corners = [b.node(), b.node(), b.node()];
    sg_cell(&mut b, spec, corners, spec.depth);
    b.finish(&corners)
}

fn sg_cell(b: &mut Builder, spec: &FamilySpec, [p, q, s]: [usize; 3], level: u32) {
    if level == 0 {
        for (x, y) in [(p, q), (q, s), (s, p)] {
            terminate(b, spec, x, y, 1.0, false);
        }
        return;
    }
    for (x, y) in [(p, q), (q, s), (s, p)] {
        b.edge(x, y, Element::Inductor(spec.inductance));
    }
    let inner = [b.node(), b.node(), b.node()];
    for (outer, inner) in [p, q, s].into_iter().zip(inner) {
        b.edge(outer, inner, Element::Capacitor(spec.capacitance));
    }
    let [ip, iq, is] = inner;
    let (m_pq, m_qs, m_sp) = (b.node(), b.node(), b.node());
    sg_cell(b, spec, [ip, m_pq, m_sp], level - 1);
    sg_cell(b, spec, [m_pq, iq, m_qs], level - 1);
    sg_cell(b, spec, [m_sp, m_qs, is], level - 1);
}

/// Hanoi: boundary is `(top, left, right)`.
pub fn build_hanoi(spec: &FamilySpec) -> Result<Network> {
    require(spec, Family::Hanoi)?;
    let mut b = Builder::new();
    let [top, left, right] = hanoi_piece(&mut b, spec, spec.depth, 1.0);
    b.finish(&[top, left, right])
}

/// Builds one piece at impedance scale `scale` and returns its terminals
/// `[top, left, right]`.
fn hanoi_piece(b: &mut Builder, spec: &FamilySpec, level: u32, scale: f64) -> [usize; 3] {
    if level == 0 {
        if spec.termination == Termination::Short {
            let n = b.node();
            return [n, n, n];
        }
        let center = b.node();
        let tips = [b.node(), b.node(), b.node()];
        for (i, tip) in tips.into_iter().enumerate() {
            terminate(b, spec, center, tip, scale, i > 0);
        }
        return tips;
    }
    let inner = scale * spec.ratio;
    let [t_top, t_left, t_right] = hanoi_piece(b, spec, level - 1, inner);
    let [l_top, l_left, l_right] = hanoi_piece(b, spec, level - 1, inner);
    let [r_top, r_left, r_right] = hanoi_piece(b, spec, level - 1, inner);
    let cap = Element::Capacitor(spec.capacitance).scaled(scale);
    b.edge(t_left, l_top, cap.clone());
    b.edge(t_right, r_top, cap);
    b.edge(l_right, r_left, Element::Inductor(spec.inductance).scaled(scale));
    [t_top, l_left, r_right]
}

/// Plain gasket of the given level with `element` on every side of every
/// smallest triangle; boundary is the three outer corners.
pub fn build_gasket(level: u32, element: Element) -> Result<Network> {
    fn cell(b: &mut Builder, e: &Element, [p, q, s]: [usize; 3], level: u32) {
        if level == 0 {
            for (x, y) in [(p, q), (q, s), (s, p)] {
                b.edge(x, y, e.clone());
            }
            return;
        }
        let (m_pq, m_qs, m_sp) = (b.node(), b.node(), b.node());
        cell(b, e, [p, m_pq, m_sp], level - 1);
        cell(b, e, [m_pq, q, m_qs], level - 1);
        cell(b, e, [m_sp, m_qs, s], level - 1);
    }
    let mut b = Builder::new();
    let corners = [b.node(), b.node(), b.node()];
    cell(&mut b, &element, corners, level);
    b.finish(&corners)
}

/// Value of the depth-0 termination in the family's characteristic form, or
/// `None` for an open termination (infinite impedance).
pub fn termination_value(spec: &FamilySpec, ctx: &EvalContext) -> Option<FamilyImpedance> {
    let z = match spec.termination {
        Termination::Short => Complex64::new(0.0, 0.0),
        Termination::Open => return None,
        Termination::Inductor => ctx.inductor(spec.inductance),
        Termination::Fixed(z) => z,
        Termination::FixedPair { zv, zl } => return Some(FamilyImpedance::Pair { zv, zl }),
    };
    Some(match spec.family {
        Family::Hanoi => FamilyImpedance::Pair { zv: z, zl: z },
        _ => FamilyImpedance::Scalar(z),
    })
}

/// Reads the characteristic quantity off a built network: input impedance of
/// the ladder, side impedance of the gasket's boundary triangle, and the star
/// legs equivalent to the hanoi boundary triangle.
pub fn measure(family: Family, net: &Network, ctx: &EvalContext) -> Result<FamilyImpedance> {
    let bd = net.boundary();
    match family {
        Family::Ladder => {
            if bd.len() < 2 {
                // the termination shorted the input
                return Ok(FamilyImpedance::Scalar(Complex64::new(0.0, 0.0)));
            }
            effective_impedance(net, ctx, bd[0], bd[1]).map(FamilyImpedance::Scalar)
        }
        Family::Sg => {
            if bd.len() < 3 {
                return Ok(FamilyImpedance::Scalar(Complex64::new(0.0, 0.0)));
            }
            let trace = boundary_trace(net, ctx)?;
            trace.edge_impedance(bd[0], bd[1]).map(FamilyImpedance::Scalar)
        }
        Family::Hanoi => {
            if bd.len() < 3 {
                let zero = Complex64::new(0.0, 0.0);
                return Ok(FamilyImpedance::Pair { zv: zero, zl: zero });
            }
            let trace = boundary_trace(net, ctx)?;
            let (t, l, r) = (bd[0], bd[1], bd[2]);
            let (zv, zl, _) = delta_to_y(
                trace.edge_impedance(t, l)?,
                trace.edge_impedance(l, r)?,
                trace.edge_impedance(r, t)?,
            )?;
            Ok(FamilyImpedance::Pair { zv, zl })
        }
    }
}

/// Builds `spec` and measures it at `ctx`.
pub fn build_and_measure(spec: &FamilySpec, ctx: &EvalContext) -> Result<FamilyImpedance> {
    measure(spec.family, &build(spec)?, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::{effective_impedance, parallel};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    fn spec(params: FamilyParams, depth: u32, termination: Termination) -> FamilySpec {
        FamilySpec::new(params, depth, termination)
    }

    const LADDER: FamilyParams = FamilyParams::Ladder { l: 1.0, c: 1.0 };
    const SG: FamilyParams = FamilyParams::Sg { l: 1.0, c: 1.0 };

    #[test]
    fn termination_parsing() {
        assert_eq!("short".parse::<Termination>().unwrap(), Termination::Short);
        assert_eq!("fixed:1,-2".parse::<Termination>().unwrap(), Termination::Fixed(c(1.0, -2.0)));
        assert_eq!(
            "pair:0,-2,2,0".parse::<Termination>().unwrap(),
            Termination::FixedPair { zv: c(0.0, -2.0), zl: c(2.0, 0.0) }
        );
        assert!("fixed:1".parse::<Termination>().is_err());
        assert!("bogus".parse::<Termination>().is_err());
    }

    #[test]
    fn termination_json() {
        let t: Termination = serde_json::from_str(r#"{"fixed":[1.0,0.5]}"#).unwrap();
        assert_eq!(t, Termination::Fixed(c(1.0, 0.5)));
        let t: Termination = serde_json::from_str(r#""open""#).unwrap();
        assert_eq!(t, Termination::Open);
    }

    #[test]
    fn ladder_single_cell_is_series_resonant() {
        let net = build_ladder(&spec(LADDER, 1, Termination::Open)).unwrap();
        // L and C in series; at ω²LC = 1 the pivot vanishes exactly
        let ctx0 = EvalContext::new(1.0, 0.0).unwrap();
        assert_eq!(
            effective_impedance(&net, &ctx0, 0, 1).unwrap_err(),
            Error::Resonance("node elimination")
        );
        let ctx = EvalContext::new(1.0, 1e-6).unwrap();
        let z = effective_impedance(&net, &ctx, 0, 1).unwrap();
        assert!(close(z, c(2e-6, 0.0), 1e-9));
    }

    #[test]
    fn ladder_depth_zero_is_termination() {
        let ctx = EvalContext::new(1.3, 0.0).unwrap();
        let zt = c(0.7, 0.2);
        let net = build_ladder(&spec(LADDER, 0, Termination::Fixed(zt))).unwrap();
        assert_eq!(net.nodes().len(), 2);
        assert!(close(measure(Family::Ladder, &net, &ctx).unwrap().primary(), zt, 1e-15));

        let short = build_ladder(&spec(LADDER, 0, Termination::Short)).unwrap();
        assert_eq!(short.nodes().len(), 1);
        assert_eq!(measure(Family::Ladder, &short, &ctx).unwrap().primary(), c(0.0, 0.0));

        assert_eq!(
            build_ladder(&spec(LADDER, 0, Termination::Open)).unwrap_err(),
            Error::Disconnected
        );
    }

    #[test]
    fn sg_depth_zero_is_termination_triangle() {
        let zt = c(1.0, 2.0);
        let net = build_sg(&spec(SG, 0, Termination::Fixed(zt))).unwrap();
        assert_eq!(net.nodes().len(), 3);
        assert_eq!(net.edges().len(), 3);
        let ctx = EvalContext::new(2.0, 0.1).unwrap();
        assert!(close(measure(Family::Sg, &net, &ctx).unwrap().primary(), zt, 1e-14));
    }

    #[test]
    fn sg_one_level_satisfies_self_consistency() {
        let (w, l, cap, eps) = (1.3, 0.8, 1.7, 0.01);
        let ctx = EvalContext::new(w, eps).unwrap();
        let z = c(0.4, -0.3);
        let net = build_sg(&spec(FamilyParams::Sg { l, c: cap }, 1, Termination::Fixed(z))).unwrap();
        let side = measure(Family::Sg, &net, &ctx).unwrap().primary();
        let zl = c(eps, w * l);
        let zc = c(eps, -1.0 / (w * cap));
        let rhs = (zl.inv() + (z * 5.0 / 3.0 + zc * 3.0).inv()).inv();
        assert!(close(side, rhs, 1e-12));
    }

    #[test]
    fn sg_open_termination_drops_floating_nodes() {
        let net = build_sg(&spec(SG, 2, Termination::Open)).unwrap();
        // the three innermost midpoints of each depth-0 cell float
        assert_eq!(net.nodes().len(), 27 - 9);
        let ctx = EvalContext::new(1.0, 0.1).unwrap();
        assert!(measure(Family::Sg, &net, &ctx).is_ok());
    }

    #[test]
    fn sg_node_count_is_three_to_the_depth_plus_one() {
        for n in 0..=5 {
            let net = build_sg(&spec(SG, n, Termination::Inductor)).unwrap();
            assert_eq!(net.nodes().len(), 3usize.pow(n + 1));
        }
    }

    #[test]
    fn hanoi_piece_count() {
        let params = FamilyParams::Hanoi { l: 1.0, c: 1.0, r: 0.4 };
        for n in 0..=5 {
            let short = build_hanoi(&spec(params, n, Termination::Short)).unwrap();
            assert_eq!(short.nodes().len(), 3usize.pow(n));
            let fixed = build_hanoi(&spec(params, n, Termination::Fixed(c(1.0, 0.0)))).unwrap();
            assert_eq!(fixed.nodes().len(), 4 * 3usize.pow(n));
        }
        assert_eq!(
            build_hanoi(&spec(params, 2, Termination::Open)).unwrap_err(),
            Error::Disconnected
        );
    }

    #[test]
    fn hanoi_one_level_matches_both_measurements() {
        let (w, l, cap, r) = (1.1, 0.9, 1.4, 0.4);
        let ctx = EvalContext::new(w, 0.0).unwrap();
        let (zv, zl) = (c(0.3, -0.8), c(1.2, 0.4));
        let s = spec(FamilyParams::Hanoi { l, c: cap, r }, 1, Termination::FixedPair { zv, zl });
        let net = build_hanoi(&s).unwrap();
        let (top, left, right) = (net.boundary()[0], net.boundary()[1], net.boundary()[2]);
        let zc = c(0.0, -1.0 / (w * cap));
        let zind = c(0.0, w * l);

        let bottoms = net.merge_nodes(left, right).unwrap();
        let vertical = effective_impedance(&bottoms, &ctx, top, left).unwrap();
        let expected = zv * r + (zv * r + zl * 2.0 * r + zc) / 2.0;
        assert!(close(vertical, expected, 1e-12));

        let lateral = effective_impedance(&net, &ctx, left, right).unwrap();
        let expected = zl * 2.0 * r
            + parallel(zl * 2.0 * r + zind, zv * 2.0 * r + zl * 2.0 * r + zc * 2.0).unwrap();
        assert!(close(lateral, expected, 1e-12));
    }

    #[test]
    fn builders_are_deterministic() {
        let s = spec(FamilyParams::Hanoi { l: 1.0, c: 2.0, r: 0.3 }, 3, Termination::Inductor);
        assert_eq!(build(&s).unwrap(), build(&s).unwrap());
        let s = spec(SG, 3, Termination::Short);
        assert_eq!(build(&s).unwrap().to_json(), build(&s).unwrap().to_json());
    }

    #[test]
    fn plain_gasket_level_one_of_unit_resistors() {
        let net = build_gasket(1, Element::Resistor(1.0)).unwrap();
        assert_eq!(net.nodes().len(), 6);
        let ctx = EvalContext::new(1.0, 0.0).unwrap();
        let z = effective_impedance(&net, &ctx, net.boundary()[0], net.boundary()[1]).unwrap();
        assert!(close(z, c(10.0 / 9.0, 0.0), 1e-14));
    }

    #[test]
    fn pair_termination_needs_hanoi() {
        let t = Termination::FixedPair { zv: c(1.0, 0.0), zl: c(1.0, 0.0) };
        assert!(build(&spec(SG, 1, t)).is_err());
    }
}
