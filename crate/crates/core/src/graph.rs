//! Weighted magnetic graphs with vertex measures.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};

/// A subset of vertices stored as a bitmask. Only graphs with at most 64
/// vertices can be enumerated subset-by-subset.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const MAX_VERTICES: usize = 64;

    pub const fn from_mask(mask: u64) -> Self {
        VertexSet(mask)
    }

    pub const fn empty() -> Self {
        VertexSet(0)
    }

    /// All of `0..n`. Panics if `n > 64`.
    pub fn full(n: usize) -> Self {
        assert!(n <= Self::MAX_VERTICES, "vertex sets hold at most 64 vertices");
        if n == 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(vertices: I) -> Result<Self> {
        let mut mask = 0u64;
        for v in vertices {
            if v >= Self::MAX_VERTICES {
                return Err(Error::VertexOutOfRange { vertex: v, n: Self::MAX_VERTICES });
            }
            mask |= 1 << v;
        }
        Ok(VertexSet(mask))
    }

    pub fn singleton(v: usize) -> Self {
        assert!(v < Self::MAX_VERTICES);
        VertexSet(1 << v)
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 & (1 << v) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self, n: usize) -> Self {
        VertexSet(!self.0 & Self::full(n).0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(v)
            }
        })
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Stored edge; always `u < v`, and `sig` is `s_{uv}` in that orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    pub sig: GroupElement,
}

/// A switching function `τ`, defined on some subset of the vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingAssignment {
    values: Vec<Option<GroupElement>>,
}

impl SwitchingAssignment {
    /// Defined everywhere.
    pub fn full(values: Vec<GroupElement>) -> Self {
        SwitchingAssignment { values: values.into_iter().map(Some).collect() }
    }

    /// Undefined everywhere on `0..n`.
    pub fn empty(n: usize) -> Self {
        SwitchingAssignment { values: vec![None; n] }
    }

    pub fn identity(n: usize, group: Group) -> Self {
        Self::full(vec![group.identity(); n])
    }

    pub fn set(&mut self, u: usize, g: GroupElement) {
        self.values[u] = Some(g);
    }

    pub fn get(&self, u: usize) -> Option<GroupElement> {
        self.values.get(u).copied().flatten()
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&u| self.values[u].is_some()).collect()
    }

    pub fn values(&self) -> &[Option<GroupElement>] {
        &self.values
    }

    /// Pointwise inverse.
    pub fn inverse(&self) -> Self {
        SwitchingAssignment { values: self.values.iter().map(|g| g.map(|g| g.inv())).collect() }
    }

    /// Pointwise product `self · other` on the common domain.
    pub fn compose(&self, other: &SwitchingAssignment) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return Err(Error::LengthMismatch { expected: self.values.len(), got: other.values.len() });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => a.mul(b).map(Some),
                _ => Ok(None),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SwitchingAssignment { values })
    }
}

/// Frustration, boundary and volume of one vertex subset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutReport {
    pub subset: VertexSet,
    pub frustration: f64,
    pub boundary: f64,
    pub volume: f64,
    /// The quotient minimized by whichever operation produced this report.
    pub objective: f64,
}

/// Result of the balance test.
#[derive(Debug, Clone, PartialEq)]
pub enum Balance {
    /// A switching function trivializing every edge.
    Balanced(SwitchingAssignment),
    /// A fundamental cycle (closed vertex sequence) whose signature is not 1.
    Unbalanced(Vec<usize>),
}

impl Balance {
    pub fn is_balanced(&self) -> bool {
        matches!(self, Balance::Balanced(_))
    }
}

/// An undirected simple graph with positive edge weights, a positive vertex
/// measure and a signature in one group. Immutable once built.
#[derive(Debug, Clone)]
pub struct MagneticGraph {
    n: usize,
    group: Group,
    edges: Vec<Edge>,
    measure: Vec<f64>,
    adjacency: Vec<Vec<(usize, usize)>>,
    index: HashMap<(usize, usize), usize>,
}

impl MagneticGraph {
    /// Validate and build. Edges may be given in either orientation; an edge
    /// `(v, u, w, s)` with `v > u` is stored as `(u, v, w, s⁻¹)`.
    pub fn new(
        n: usize,
        group: Group,
        edges: impl IntoIterator<Item = (usize, usize, f64, GroupElement)>,
        measure: Vec<f64>,
    ) -> Result<Self> {
        if measure.len() != n {
            return Err(Error::MeasureLength { expected: n, got: measure.len() });
        }
        for (vertex, &m) in measure.iter().enumerate() {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::NonpositiveMeasure { vertex, measure: m });
            }
        }
        let mut stored = Vec::new();
        let mut index = HashMap::new();
        let mut adjacency = vec![Vec::new(); n];
        for (a, b, weight, sig) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::NonpositiveWeight { u: a, v: b, weight });
            }
            if sig.group() != group {
                return Err(Error::MixedGroups);
            }
            let (u, v, sig) = if a < b { (a, b, sig) } else { (b, a, sig.inv()) };
            if index.contains_key(&(u, v)) {
                return Err(Error::DuplicateEdge { u, v });
            }
            let id = stored.len();
            index.insert((u, v), id);
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
            stored.push(Edge { u, v, weight, sig });
        }
        Ok(MagneticGraph { n, group, edges: stored, measure, adjacency, index })
    }

    /// Same as [`MagneticGraph::new`] with `μ ≡ 1`.
    pub fn with_unit_measure(
        n: usize,
        group: Group,
        edges: impl IntoIterator<Item = (usize, usize, f64, GroupElement)>,
    ) -> Result<Self> {
        Self::new(n, group, edges, vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    /// `(neighbor, edge id)` pairs.
    pub fn neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.adjacency[u]
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.index.get(&key).copied()
    }

    /// `s_{uv}` in the requested orientation; `s_{vu} = s_{uv}⁻¹`.
    pub fn signature(&self, u: usize, v: usize) -> Option<GroupElement> {
        let e = &self.edges[self.edge_id(u, v)?];
        Some(if e.u == u { e.sig } else { e.sig.inv() })
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.edge_id(u, v).map(|id| self.edges[id].weight)
    }

    /// Weighted degree `d_u = Σ_{v∼u} w_{uv}`.
    pub fn degree(&self, u: usize) -> f64 {
        self.adjacency[u].iter().map(|&(_, id)| self.edges[id].weight).sum()
    }

    /// `d_μ = max_u d_u / μ(u)`; zero for the empty graph.
    pub fn max_mu_degree(&self) -> f64 {
        (0..self.n).map(|u| self.degree(u) / self.measure[u]).fold(0.0, f64::max)
    }

    /// `vol_μ(X) = Σ_{u∈X} μ(u)`.
    pub fn volume(&self, set: VertexSet) -> f64 {
        set.iter().filter(|&u| u < self.n).fold(0.0, |acc, u| acc + self.measure[u])
    }

    pub fn total_volume(&self) -> f64 {
        self.measure.iter().sum()
    }

    /// `|E(X, Xᶜ)| = Σ_{u∈X, v∉X} w_{uv}`.
    pub fn boundary_measure(&self, set: VertexSet) -> f64 {
        self.edges.iter().filter(|e| set.contains(e.u) != set.contains(e.v)).fold(0.0, |acc, e| acc + e.weight)
    }

    /// Ids of edges with both endpoints in `set`.
    pub fn induced_edges(&self, set: VertexSet) -> Vec<usize> {
        (0..self.edges.len()).filter(|&id| set.contains(self.edges[id].u) && set.contains(self.edges[id].v)).collect()
    }

    /// Connected components of the subgraph induced by `set`, each sorted,
    /// listed in order of their smallest vertex.
    pub fn induced_components(&self, set: VertexSet) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in set.iter().filter(|&u| u < self.n) {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &self.adjacency[u] {
                    if set.contains(v) && !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn cut_report(&self, set: VertexSet, frustration: f64, objective: f64) -> CutReport {
        CutReport {
            subset: set,
            frustration,
            boundary: self.boundary_measure(set),
            volume: self.volume(set),
            objective,
        }
    }

    /// The switched graph with `s^τ(u,v) = τ(u)·s(u,v)·τ(v)⁻¹`.
    pub fn switch(&self, tau: &SwitchingAssignment) -> Result<MagneticGraph> {
        if tau.n() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: tau.n() });
        }
        let mut values = Vec::with_capacity(self.n);
        for u in 0..self.n {
            let g = tau.get(u).ok_or(Error::IncompleteAssignment(u))?;
            if g.group() != self.group {
                return Err(Error::WrongGroup);
            }
            values.push(g);
        }
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let s = values[e.u].mul(&e.sig)?.mul(&values[e.v].inv())?;
                Ok((e.u, e.v, e.weight, s))
            })
            .collect::<Result<Vec<_>>>()?;
        MagneticGraph::new(self.n, self.group, edges, self.measure.clone())
    }

    /// Same graph with every signature replaced by `f(signature)` in `group`.
    pub fn map_signatures(
        &self,
        group: Group,
        f: impl Fn(&GroupElement) -> Result<GroupElement>,
    ) -> Result<MagneticGraph> {
        let edges = self.edges.iter().map(|e| Ok((e.u, e.v, e.weight, f(&e.sig)?))).collect::<Result<Vec<_>>>()?;
        MagneticGraph::new(self.n, group, edges, self.measure.clone())
    }

    /// Trivial signature, same weights and measure.
    pub fn unsigned(&self) -> MagneticGraph {
        let id = self.group.identity();
        self.map_signatures(self.group, |_| Ok(id)).expect("identity signature is always valid")
    }

    /// Reinterpret a cyclic signature as circle-valued.
    pub fn to_circle(&self) -> MagneticGraph {
        self.map_signatures(Group::Circle, |g| Ok(g.to_circle())).expect("circle reinterpretation is always valid")
    }

    /// Round every signature to the nearest `k`-th root of unity.
    pub fn discretize(&self, k: u32) -> Result<MagneticGraph> {
        self.map_signatures(Group::cyclic(k)?, |g| g.discretize(k))
    }

    /// Signature of the closed walk `u₁ → u₂ → … → u_ℓ → u₁`, which must use
    /// distinct edges.
    pub fn cycle_signature(&self, cycle: &[usize]) -> Result<GroupElement> {
        if cycle.len() < 3 {
            return Err(Error::NotACycle(format!("{} vertices; a cycle needs at least 3", cycle.len())));
        }
        let mut used = HashSet::new();
        let mut acc = self.group.identity();
        for i in 0..cycle.len() {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            if a >= self.n || b >= self.n {
                return Err(Error::NotACycle(format!("vertex {} out of range", a.max(b))));
            }
            let id = self.edge_id(a, b).ok_or_else(|| Error::NotACycle(format!("{a} and {b} are not adjacent")))?;
            if !used.insert(id) {
                return Err(Error::NotACycle(format!("edge {{{a}, {b}}} repeated")));
            }
            acc = acc.mul(&self.signature(a, b).expect("edge exists"))?;
        }
        Ok(acc)
    }

    /// Spanning-forest gauge: roots get `τ = 1` and tree edges are trivialized.
    /// Balanced iff every non-tree edge is trivialized too.
    pub fn is_balanced(&self) -> Balance {
        let (tau, parent, depth) = self.forest_gauge();
        for e in &self.edges {
            let switched = tau[e.u].mul(&e.sig).and_then(|s| s.mul(&tau[e.v].inv())).expect("single group");
            if !switched.is_identity() {
                return Balance::Unbalanced(fundamental_cycle(e.u, e.v, &parent, &depth));
            }
        }
        Balance::Balanced(SwitchingAssignment::full(tau))
    }

    fn forest_gauge(&self) -> (Vec<GroupElement>, Vec<Option<usize>>, Vec<usize>) {
        let mut tau = vec![self.group.identity(); self.n];
        let mut parent = vec![None; self.n];
        let mut depth = vec![0usize; self.n];
        let mut seen = vec![false; self.n];
        for root in 0..self.n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        // τ(u)·s_{uv}·τ(v)⁻¹ = 1
                        tau[v] = tau[u].mul(&self.signature(u, v).expect("adjacent")).expect("single group");
                        parent[v] = Some(u);
                        depth[v] = depth[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        (tau, parent, depth)
    }

    /// Signed Cartesian product `self × other`. Vertex `(u, v)` gets id
    /// `u·|V₂| + v`.
    pub fn cartesian_product(&self, other: &MagneticGraph) -> Result<MagneticGraph> {
        if self.group != other.group {
            return Err(Error::MixedGroups);
        }
        let n2 = other.n;
        let id = |u: usize, v: usize| u * n2 + v;
        let mut edges = Vec::with_capacity(self.n * other.edges.len() + n2 * self.edges.len());
        for u in 0..self.n {
            for e in &other.edges {
                edges.push((id(u, e.u), id(u, e.v), e.weight * self.measure[u], e.sig));
            }
        }
        for v in 0..n2 {
            for e in &self.edges {
                edges.push((id(e.u, v), id(e.v, v), e.weight * other.measure[v], e.sig));
            }
        }
        let mut measure = Vec::with_capacity(self.n * n2);
        for u in 0..self.n {
            for v in 0..n2 {
                measure.push(self.measure[u] * other.measure[v]);
            }
        }
        MagneticGraph::new(self.n * n2, self.group, edges, measure)
    }

    /// Left fold of [`MagneticGraph::cartesian_product`] over the factors.
    pub fn product_of(factors: &[MagneticGraph]) -> Result<MagneticGraph> {
        let (first, rest) =
            factors.split_first().ok_or_else(|| Error::InvalidArgument("product of zero factors".into()))?;
        rest.iter().try_fold(first.clone(), |acc, g| acc.cartesian_product(g))
    }
}

fn fundamental_cycle(u: usize, v: usize, parent: &[Option<usize>], depth: &[usize]) -> Vec<usize> {
    // climb both endpoints to their lowest common ancestor
    let (mut a, mut b) = (u, v);
    let mut left = vec![a];
    let mut right = vec![b];
    while depth[a] > depth[b] {
        a = parent[a].expect("non-root");
        left.push(a);
    }
    while depth[b] > depth[a] {
        b = parent[b].expect("non-root");
        right.push(b);
    }
    while a != b {
        a = parent[a].expect("non-root");
        b = parent[b].expect("non-root");
        left.push(a);
        right.push(b);
    }
    right.pop();
    // u → … → lca → … → v, closed by the edge (v, u)
    left.extend(right.into_iter().rev());
    left
}
