//! The frustration index `ι^s(V₁) = min_τ Σ_{{u,v}∈E₁} w_{uv}|τ(u) − s_{uv}τ(v)|`.
//!
//! For `S¹ₖ` the minimum is found by exhaustive enumeration after pinning one
//! vertex per connected component of the induced subgraph (the cost is
//! invariant under a global phase on each component). For `S¹` there is no
//! general exact method; induced subgraphs whose components each contain at
//! most one cycle are solved in closed form, since on a weighted cycle the
//! minimum is `min_e w_e · |1 − s(C)|`. Everything else goes through the
//! coordinate-descent heuristic, which only yields an upper bound.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::families::random_element;
use crate::graph::{MagneticGraph, SwitchingAssignment, VertexSet};
use crate::group::{chord_table, Group, GroupElement};

/// Default cap on the number of gauge-fixed assignments one exact call may enumerate.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

const TIE_TOL: f64 = 1e-12;
const RESYNC_EVERY: u128 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct FrustrationResult {
    pub value: f64,
    /// Defined exactly on the queried subset.
    pub minimizer: SwitchingAssignment,
    /// True when the value is a proven minimum rather than an upper bound.
    pub exact: bool,
    pub evaluations: u64,
}

/// How per-subset frustration indices are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrustrationMode {
    Exact {
        budget: u128,
    },
    /// Upper bounds only.
    Heuristic {
        restarts: usize,
        seed: u64,
    },
}

impl Default for FrustrationMode {
    fn default() -> Self {
        FrustrationMode::Exact { budget: DEFAULT_BUDGET }
    }
}

impl FrustrationMode {
    pub fn is_exact(&self) -> bool {
        matches!(self, FrustrationMode::Exact { .. })
    }
}

/// Dispatch on `mode`. Heuristic seeds are mixed with the subset mask so that
/// results do not depend on evaluation order.
pub fn frustration(g: &MagneticGraph, set: VertexSet, mode: FrustrationMode) -> Result<FrustrationResult> {
    match mode {
        FrustrationMode::Exact { budget } => frustration_exact_with_budget(g, set, budget),
        FrustrationMode::Heuristic { restarts, seed } => {
            let mixed = seed ^ set.mask().wrapping_mul(0x9E37_79B9_7F4A_7C15);
            frustration_heuristic(g, set, restarts, mixed)
        }
    }
}

fn check_subset(g: &MagneticGraph, set: VertexSet) -> Result<()> {
    if let Some(v) = set.iter().find(|&v| v >= g.n()) {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    Ok(())
}

/// `Σ_{{u,v}∈E₁} w_{uv}|τ(u) − s_{uv}τ(v)|` for `τ` defined on `set`.
pub fn l1_switch_cost(g: &MagneticGraph, set: VertexSet, tau: &SwitchingAssignment) -> Result<f64> {
    check_subset(g, set)?;
    for u in set.iter() {
        let t = tau.get(u).ok_or(Error::IncompleteAssignment(u))?;
        if t.group() != g.group() {
            return Err(Error::WrongGroup);
        }
    }
    let mut total = 0.0;
    for id in g.induced_edges(set) {
        let e = &g.edges()[id];
        let (tu, tv) = (tau.get(e.u).expect("checked"), tau.get(e.v).expect("checked"));
        // |τ(u) − s τ(v)| = |1 − τ(u)⁻¹ s τ(v)|
        total += e.weight * tu.inv().mul(&e.sig)?.mul(&tv)?.distance_to_one();
    }
    Ok(total)
}

/// `|1 − σ|`: the frustration index of a unit-weight cycle with signature `σ`.
pub fn frustration_cycle_oracle(sigma: &GroupElement) -> f64 {
    sigma.distance_to_one()
}

/// Exact frustration index with the default budget.
pub fn frustration_exact(g: &MagneticGraph, set: VertexSet) -> Result<FrustrationResult> {
    frustration_exact_with_budget(g, set, DEFAULT_BUDGET)
}

/// Exact frustration index. Cyclic groups are enumerated (`k^(|V₁|−c)`
/// assignments must fit in `budget`; ties go to the lexicographically smallest
/// exponent vector). Circle groups are solved only on pseudoforests.
pub fn frustration_exact_with_budget(g: &MagneticGraph, set: VertexSet, budget: u128) -> Result<FrustrationResult> {
    check_subset(g, set)?;
    match g.group() {
        Group::Cyclic(k) => enumerate_cyclic(g, set, k, budget),
        Group::Circle => pseudoforest(g, set),
    }
}

/// Number of gauge-fixed assignments an exact cyclic enumeration would visit.
pub fn exact_search_size(g: &MagneticGraph, set: VertexSet) -> Option<u128> {
    match g.group() {
        Group::Cyclic(k) => {
            let free = set.len() - g.induced_components(set).len();
            (k as u128).checked_pow(free as u32)
        }
        Group::Circle => None,
    }
}

struct LocalEdge {
    a: usize,
    b: usize,
    weight: f64,
    exponent: u32,
}

fn enumerate_cyclic(g: &MagneticGraph, set: VertexSet, k: u32, budget: u128) -> Result<FrustrationResult> {
    let verts: Vec<usize> = set.iter().collect();
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in verts.iter().enumerate() {
        local[v] = i;
    }
    let comps = g.induced_components(set);
    let pinned: Vec<bool> = {
        let mut p = vec![false; verts.len()];
        for c in &comps {
            p[local[c[0]]] = true;
        }
        p
    };
    let free: Vec<usize> = (0..verts.len()).filter(|&i| !pinned[i]).collect();
    let required = (k as u128).checked_pow(free.len() as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }

    let edges: Vec<LocalEdge> = g
        .induced_edges(set)
        .into_iter()
        .map(|id| {
            let e = &g.edges()[id];
            let exponent = match e.sig {
                GroupElement::Cyclic { exponent, .. } => exponent,
                GroupElement::Circle { .. } => unreachable!("cyclic graph"),
            };
            LocalEdge { a: local[e.u], b: local[e.v], weight: e.weight, exponent }
        })
        .collect();
    let mut incident = vec![Vec::new(); verts.len()];
    for (i, e) in edges.iter().enumerate() {
        incident[e.a].push(i);
        incident[e.b].push(i);
    }
    let chords = chord_table(k);
    let kk = k as u64;
    let term = |e: &LocalEdge, x: &[u32]| -> f64 {
        let j = (e.exponent as u64 + x[e.b] as u64 + kk - x[e.a] as u64) % kk;
        e.weight * chords[j as usize]
    };
    let fresh = |x: &[u32]| -> f64 { edges.iter().fold(0.0, |acc, e| acc + term(e, x)) };

    let mut x = vec![0u32; verts.len()];
    let mut terms: Vec<f64> = edges.iter().map(|e| term(e, &x)).collect();
    let mut current = terms.iter().fold(0.0, |acc, t| acc + t);
    let mut best = f64::INFINITY;
    let mut best_x = x.clone();
    let mut visited: u128 = 0;

    'outer: loop {
        visited += 1;
        if current <= best + 1e-9 * (1.0 + best) {
            let exact = fresh(&x);
            if exact < best - TIE_TOL {
                best = exact;
                best_x.copy_from_slice(&x);
            }
        }
        // odometer: the last free vertex is the fastest digit, so visiting
        // order is lexicographic in the exponent vector
        let mut i = free.len();
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            let v = free[i];
            let next = (x[v] + 1) % k;
            x[v] = next;
            for &ei in &incident[v] {
                let t = term(&edges[ei], &x);
                current += t - terms[ei];
                terms[ei] = t;
            }
            if next != 0 {
                break;
            }
        }
        if visited.is_multiple_of(RESYNC_EVERY) {
            current = fresh(&x);
        }
    }

    let mut minimizer = SwitchingAssignment::empty(g.n());
    for (i, &v) in verts.iter().enumerate() {
        minimizer.set(v, GroupElement::cyclic(best_x[i] as i64, k)?);
    }
    let value = if verts.is_empty() { 0.0 } else { best };
    Ok(FrustrationResult { value, minimizer, exact: true, evaluations: visited as u64 })
}

/// BFS gauge on the induced subgraph of `set`, ignoring edge `skip`. Each
/// component root gets the identity; traversed edges become trivial.
fn tree_gauge(
    g: &MagneticGraph,
    set: VertexSet,
    roots: impl IntoIterator<Item = usize>,
    skip: &[usize],
    mut shuffle: Option<&mut ChaCha8Rng>,
) -> Vec<Option<GroupElement>> {
    let mut tau: Vec<Option<GroupElement>> = vec![None; g.n()];
    for root in roots {
        if !set.contains(root) || tau[root].is_some() {
            continue;
        }
        tau[root] = Some(g.group().identity());
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let mut nbrs: Vec<(usize, usize)> = g.neighbors(u).to_vec();
            if let Some(rng) = shuffle.as_deref_mut() {
                nbrs.shuffle(rng);
            }
            for (v, id) in nbrs {
                if set.contains(v) && tau[v].is_none() && !skip.contains(&id) {
                    let tu = tau[u].expect("visited");
                    // τ(u) = s_{uv}·τ(v) makes the edge cost vanish
                    tau[v] = Some(tu.mul(&g.signature(u, v).expect("adjacent").inv()).expect("single group"));
                    queue.push_back(v);
                }
            }
        }
    }
    tau
}

fn pseudoforest(g: &MagneticGraph, set: VertexSet) -> Result<FrustrationResult> {
    let mut skip = Vec::new();
    for comp in g.induced_components(set) {
        let cset = VertexSet::from_vertices(comp.iter().copied())?;
        let cedges = g.induced_edges(cset);
        if cedges.len() + 1 == comp.len() {
            continue;
        }
        if cedges.len() != comp.len() {
            return Err(Error::ContinuousGroup);
        }
        // strip leaves until only the cycle remains
        let mut deg: Vec<usize> = vec![0; g.n()];
        for &id in &cedges {
            deg[g.edges()[id].u] += 1;
            deg[g.edges()[id].v] += 1;
        }
        let mut alive = cset;
        let mut stack: Vec<usize> = comp.iter().copied().filter(|&v| deg[v] == 1).collect();
        while let Some(v) = stack.pop() {
            alive = VertexSet::from_mask(alive.mask() & !(1 << v));
            for &(w, _) in g.neighbors(v) {
                if alive.contains(w) {
                    deg[w] -= 1;
                    if deg[w] == 1 {
                        stack.push(w);
                    }
                }
            }
        }
        let cheapest = g
            .induced_edges(alive)
            .into_iter()
            .min_by(|&a, &b| g.edges()[a].weight.total_cmp(&g.edges()[b].weight).then(a.cmp(&b)))
            .expect("a unicyclic component has a cycle");
        skip.push(cheapest);
    }
    let tau = tree_gauge(g, set, set.iter(), &skip, None);
    let mut minimizer = SwitchingAssignment::empty(g.n());
    for v in set.iter() {
        minimizer.set(v, tau[v].expect("every vertex reached"));
    }
    let value = l1_switch_cost(g, set, &minimizer)?;
    Ok(FrustrationResult { value, minimizer, exact: true, evaluations: 1 })
}

/// Coordinate descent from several starts. Each sweep moves every vertex to
/// the group element minimizing its local cost; for `S¹` the local cost is
/// concave between the points `s_{uv}τ(v)`, so its minimum is at one of them.
/// Starts: the gauge of a maximum-weight spanning forest (optimal on
/// pseudoforests), then alternately random spanning-tree gauges and uniformly
/// random `τ`. Always an upper bound on `ι`.
pub fn frustration_heuristic(
    g: &MagneticGraph,
    set: VertexSet,
    restarts: usize,
    seed: u64,
) -> Result<FrustrationResult> {
    check_subset(g, set)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let verts: Vec<usize> = set.iter().collect();
    let mut best: Option<(f64, Vec<Option<GroupElement>>)> = None;
    let mut evaluations = 0u64;

    for r in 0..restarts.max(1) {
        let mut tau = match r {
            0 => tree_gauge(g, set, verts.iter().copied(), &light_cotree(g, set), None),
            r if r % 2 == 1 => {
                let mut order = verts.clone();
                order.shuffle(&mut rng);
                tree_gauge(g, set, order, &[], Some(&mut rng))
            }
            _ => {
                let mut t = vec![None; g.n()];
                for &v in &verts {
                    t[v] = Some(random_element(&mut rng, g.group()));
                }
                t
            }
        };
        descend(g, set, &verts, &mut tau, &mut evaluations);
        let cost = cost_of(g, set, &tau);
        if best.as_ref().is_none_or(|(b, _)| cost < *b - TIE_TOL) {
            best = Some((cost, tau));
        }
    }
    let (_, tau) = best.expect("at least one restart");
    let mut minimizer = SwitchingAssignment::empty(g.n());
    for &v in &verts {
        minimizer.set(v, tau[v].expect("assigned"));
    }
    let value = l1_switch_cost(g, set, &minimizer)?;
    Ok(FrustrationResult { value, minimizer, exact: false, evaluations })
}

/// Induced edges left out of a maximum-weight spanning forest (Kruskal,
/// ties by edge id).
fn light_cotree(g: &MagneticGraph, set: VertexSet) -> Vec<usize> {
    let mut ids = g.induced_edges(set);
    ids.sort_by(|&a, &b| g.edges()[b].weight.total_cmp(&g.edges()[a].weight).then(a.cmp(&b)));
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut skipped = Vec::new();
    for id in ids {
        let e = &g.edges()[id];
        let (a, b) = (root(&mut parent, e.u), root(&mut parent, e.v));
        if a == b {
            skipped.push(id);
        } else {
            parent[a] = b;
        }
    }
    skipped
}

fn cost_of(g: &MagneticGraph, set: VertexSet, tau: &[Option<GroupElement>]) -> f64 {
    g.induced_edges(set)
        .into_iter()
        .map(|id| {
            let e = &g.edges()[id];
            let (tu, tv) = (tau[e.u].expect("assigned"), tau[e.v].expect("assigned"));
            e.weight * tu.inv().mul(&e.sig).and_then(|s| s.mul(&tv)).expect("single group").distance_to_one()
        })
        .fold(0.0, |acc, c| acc + c)
}

fn local_cost(
    g: &MagneticGraph,
    set: VertexSet,
    tau: &[Option<GroupElement>],
    u: usize,
    candidate: &GroupElement,
) -> f64 {
    let inv = candidate.inv();
    g.neighbors(u)
        .iter()
        .filter(|(v, _)| set.contains(*v))
        .map(|&(v, id)| {
            let s = g.signature(u, v).expect("adjacent");
            g.edges()[id].weight
                * inv.mul(&s).and_then(|x| x.mul(&tau[v].expect("assigned"))).expect("single group").distance_to_one()
        })
        .sum()
}

fn descend(g: &MagneticGraph, set: VertexSet, verts: &[usize], tau: &mut [Option<GroupElement>], evals: &mut u64) {
    const MAX_SWEEPS: usize = 10_000;
    for _ in 0..MAX_SWEEPS {
        let mut improvement = 0.0;
        for &u in verts {
            let candidates: Vec<GroupElement> = match g.group() {
                Group::Cyclic(k) => (0..k).map(|j| GroupElement::cyclic(j as i64, k).expect("k ≥ 1")).collect(),
                Group::Circle => g
                    .neighbors(u)
                    .iter()
                    .filter(|(v, _)| set.contains(*v))
                    .map(|&(v, _)| {
                        g.signature(u, v).expect("adjacent").mul(&tau[v].expect("assigned")).expect("circle")
                    })
                    .collect(),
            };
            let here_cost = local_cost(g, set, tau, u, &tau[u].expect("assigned"));
            let mut best: Option<(f64, GroupElement)> = None;
            *evals += 1;
            for c in candidates {
                let cost = local_cost(g, set, tau, u, &c);
                *evals += 1;
                let bar = best.map_or(here_cost, |(b, _)| b);
                if cost < bar - TIE_TOL {
                    best = Some((cost, c));
                }
            }
            if let Some((cost, c)) = best {
                improvement += here_cost - cost;
                tau[u] = Some(c);
            }
        }
        if improvement < TIE_TOL {
            break;
        }
    }
}

/// Convenience: frustration index of the whole vertex set.
pub fn frustration_of_graph(g: &MagneticGraph, mode: FrustrationMode) -> Result<FrustrationResult> {
    frustration(g, VertexSet::full(g.n()), mode)
}

/// Uniform random point in `Γ^V₁`, used for tests and restarts.
pub fn random_assignment<R: Rng + ?Sized>(rng: &mut R, g: &MagneticGraph, set: VertexSet) -> SwitchingAssignment {
    let mut tau = SwitchingAssignment::empty(g.n());
    for v in set.iter() {
        tau.set(v, random_element(rng, g.group()));
    }
    tau
}
