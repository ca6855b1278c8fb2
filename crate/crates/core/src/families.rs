//! Standard graph families and seeded random instances.

use std::f64::consts::TAU;

use rand::Rng;

use crate::error::Result;
use crate::graph::{MagneticGraph, SwitchingAssignment};
use crate::group::{Group, GroupElement};

/// Unit-weight cycle `0 → 1 → … → n−1 → 0`, `μ ≡ 1`. Every edge is trivial
/// except the closing edge `(n−1, 0)`, which carries `sig`, so the cycle
/// signature in that traversal direction is `sig`.
pub fn cycle(n: usize, sig: &GroupElement) -> Result<MagneticGraph> {
    let group = sig.group();
    let id = group.identity();
    let edges = (0..n).map(|i| (i, (i + 1) % n, 1.0, if i + 1 == n { *sig } else { id }));
    MagneticGraph::with_unit_measure(n, group, edges)
}

/// Unit-weight path `0 − 1 − … − n−1` with trivial signature, `μ ≡ 1`.
pub fn path(n: usize, group: Group) -> Result<MagneticGraph> {
    let id = group.identity();
    MagneticGraph::with_unit_measure(n, group, (1..n).map(|i| (i - 1, i, 1.0, id)))
}

/// Two vertices joined by one unit-weight edge with signature `sig`.
pub fn single_edge(sig: &GroupElement) -> Result<MagneticGraph> {
    MagneticGraph::with_unit_measure(2, sig.group(), [(0, 1, 1.0, *sig)])
}

/// Unit-weight complete graph with trivial signature.
pub fn complete(n: usize, group: Group) -> Result<MagneticGraph> {
    let id = group.identity();
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1.0, id)));
    MagneticGraph::with_unit_measure(n, group, edges)
}

pub fn random_element<R: Rng + ?Sized>(rng: &mut R, group: Group) -> GroupElement {
    match group {
        Group::Cyclic(k) => GroupElement::cyclic(rng.random_range(0..k as i64), k).expect("k ≥ 1"),
        Group::Circle => GroupElement::circle(rng.random_range(0.0..TAU)).expect("finite"),
    }
}

pub fn random_switching<R: Rng + ?Sized>(rng: &mut R, n: usize, group: Group) -> SwitchingAssignment {
    SwitchingAssignment::full((0..n).map(|_| random_element(rng, group)).collect())
}

/// Parameters for [`random_connected`].
#[derive(Debug, Clone, Copy)]
pub struct RandomGraphSpec {
    pub n: usize,
    pub group: Group,
    /// Probability of each non-tree edge.
    pub edge_prob: f64,
    /// Draw weights and measures from `[0.5, 2)` instead of using 1.
    pub weighted: bool,
}

/// A connected graph: a random spanning tree plus independent extra edges,
/// with uniformly random signatures.
pub fn random_connected<R: Rng + ?Sized>(rng: &mut R, spec: RandomGraphSpec) -> MagneticGraph {
    let n = spec.n;
    let mut pairs = Vec::new();
    for v in 1..n {
        pairs.push((rng.random_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !pairs.contains(&(u, v)) && rng.random::<f64>() < spec.edge_prob {
                pairs.push((u, v));
            }
        }
    }
    let draw = |rng: &mut R| if spec.weighted { rng.random_range(0.5..2.0) } else { 1.0 };
    let edges: Vec<_> = pairs.into_iter().map(|(u, v)| (u, v, draw(rng), random_element(rng, spec.group))).collect();
    let measure = (0..n).map(|_| draw(rng)).collect();
    MagneticGraph::new(n, spec.group, edges, measure).expect("generated graph is valid")
}

/// Rejection-sample a connected graph that is not balanced. Needs `n ≥ 3`
/// and a nontrivial group.
pub fn random_unbalanced<R: Rng + ?Sized>(rng: &mut R, spec: RandomGraphSpec) -> MagneticGraph {
    assert!(spec.n >= 3 && spec.group != Group::Cyclic(1));
    let spec = RandomGraphSpec { edge_prob: spec.edge_prob.max(0.3), ..spec };
    loop {
        let g = random_connected(rng, spec);
        if !g.is_balanced().is_balanced() {
            return g;
        }
    }
}

/// A connected balanced graph: trivial signature switched by a random gauge.
pub fn random_balanced<R: Rng + ?Sized>(rng: &mut R, spec: RandomGraphSpec) -> MagneticGraph {
    let g = random_connected(rng, spec).unsigned();
    let tau = random_switching(rng, spec.n, spec.group);
    g.switch(&tau).expect("full assignment in the right group")
}

/// A connected graph with exactly one cycle (plus pendant trees), random
/// weights, measures and signatures.
pub fn random_unicyclic<R: Rng + ?Sized>(rng: &mut R, n: usize, cycle_len: usize, group: Group) -> MagneticGraph {
    assert!(cycle_len >= 3 && cycle_len <= n);
    let mut pairs: Vec<(usize, usize)> = (0..cycle_len).map(|i| (i, (i + 1) % cycle_len)).collect();
    for v in cycle_len..n {
        pairs.push((rng.random_range(0..v), v));
    }
    let edges: Vec<_> =
        pairs.into_iter().map(|(u, v)| (u, v, rng.random_range(0.5..2.0), random_element(rng, group))).collect();
    let measure = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    MagneticGraph::new(n, group, edges, measure).expect("generated graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cycle_signature_is_closing_edge() {
        let x = GroupElement::cyclic(2, 5).unwrap();
        let g = cycle(6, &x).unwrap();
        assert_eq!(g.cycle_signature(&[0, 1, 2, 3, 4, 5]).unwrap(), x);
    }

    #[test]
    fn random_families_have_requested_balance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 3..8 {
            let spec = RandomGraphSpec { n, group: Group::Cyclic(3), edge_prob: 0.4, weighted: true };
            assert!(!random_unbalanced(&mut rng, spec).is_balanced().is_balanced());
            assert!(random_balanced(&mut rng, spec).is_balanced().is_balanced());
            let g = random_unicyclic(&mut rng, n, 3, Group::Circle);
            assert_eq!(g.edges().len(), n);
        }
    }
}
