#![allow(dead_code)]

use fraxim::circuit::make_network;
use fraxim::{Complex64, Edge, Element, Network};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Impedance with real part in [0.1, 2) and imaginary part in [−2, 2).
pub fn passive_z<R: Rng>(rng: &mut R) -> Complex64 {
    c(rng.gen_range(0.1..2.0), rng.gen_range(-2.0..2.0))
}

/// Random connected network on `n` nodes: a random spanning tree plus each
/// remaining pair with probability `p`, every edge a passive fixed impedance.
/// The boundary is `boundary` distinct random nodes.
pub fn random_network<R: Rng>(rng: &mut R, n: usize, p: f64, boundary: usize) -> Network {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    let mut pairs = std::collections::BTreeSet::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        pairs.insert((a.min(b), a.max(b)));
        edges.push(Edge(a, b, Element::Fixed(passive_z(rng))));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !pairs.contains(&(a, b)) && rng.gen_bool(p) {
                edges.push(Edge(a, b, Element::Fixed(passive_z(rng))));
            }
        }
    }
    let bd = order[..boundary].to_vec();
    make_network((0..n).collect(), edges, bd).expect("random network is valid")
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
