//! Plumbing trees and their intersection lattices.
//!
//! A plumbing graph is a weighted tree; its intersection matrix carries the
//! vertex weights on the diagonal and a 1 for every edge. Determinants and
//! inverse entries are computed exactly. Characteristic classes are stored
//! by their evaluations on the vertices, so adding `2PD(v)` is an update of
//! `v` and its neighbors only.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{cf_expand, Rational, SeifertData};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::triplet::Triplet;

/// A characteristic (candidate) class, stored as `evals[j] = <k, v_j>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CharVector {
    pub evals: Vec<i64>,
}

impl CharVector {
    pub fn new(evals: Vec<i64>) -> Self {
        CharVector { evals }
    }

    pub fn zeros(n: usize) -> Self {
        CharVector { evals: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.evals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.evals.is_empty()
    }

    pub fn negated(&self) -> Self {
        CharVector { evals: self.evals.iter().map(|x| -x).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphReport {
    pub is_negative_definite: bool,
    pub is_unimodular: bool,
    pub bad_vertex_count: usize,
    #[serde(serialize_with = "serialize_bigint")]
    pub determinant: BigInt,
}

fn serialize_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[derive(Debug)]
pub struct PlumbingGraph {
    weights: Vec<i64>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    determinant: OnceLock<BigInt>,
    // (d, d * I^-1) with d = ±det, or None when singular.
    scaled_inverse: OnceLock<Option<(BigInt, Matrix)>>,
}

impl Clone for PlumbingGraph {
    fn clone(&self) -> Self {
        PlumbingGraph {
            weights: self.weights.clone(),
            edges: self.edges.clone(),
            adjacency: self.adjacency.clone(),
            determinant: self.determinant.clone(),
            scaled_inverse: self.scaled_inverse.clone(),
        }
    }
}

impl PartialEq for PlumbingGraph {
    fn eq(&self, other: &Self) -> bool {
        self.weights == other.weights && self.edges == other.edges
    }
}

impl Eq for PlumbingGraph {}

impl PlumbingGraph {
    /// Builds a weighted tree on vertices `0..weights.len()`.
    pub fn new(weights: Vec<i64>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::invalid("plumbing graph needs at least one vertex"));
        }
        if edges.len() != n - 1 {
            return Err(Error::invalid(format!(
                "a tree on {n} vertices has {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a},{b}) leaves the vertex set")));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at vertex {a}")));
            }
            if adjacency[a].contains(&b) {
                return Err(Error::invalid(format!("duplicate edge ({a},{b})")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let graph = PlumbingGraph {
            weights,
            edges,
            adjacency,
            determinant: OnceLock::new(),
            scaled_inverse: OnceLock::new(),
        };
        // n - 1 edges and connected <=> tree.
        if graph.bfs_parents(0).iter().skip(1).any(Option::is_none) {
            return Err(Error::invalid("plumbing graph is not connected"));
        }
        Ok(graph)
    }

    /// Path graph with the given weights, in order.
    pub fn linear(weights: Vec<i64>) -> Result<Self> {
        let edges = (1..weights.len()).map(|i| (i - 1, i)).collect();
        Self::new(weights, edges)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> i64 {
        self.weights[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn valency(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Vertices whose valency exceeds minus their weight.
    pub fn bad_vertices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| self.valency(v) as i64 > -self.weights[v])
            .collect()
    }

    pub fn intersection_matrix(&self) -> Matrix {
        self.induced_matrix(&vec![true; self.len()])
    }

    /// Intersection matrix of the subforest spanned by `keep`.
    pub fn induced_matrix(&self, keep: &[bool]) -> Matrix {
        let ids: Vec<usize> = (0..self.len()).filter(|&v| keep[v]).collect();
        let mut index = vec![usize::MAX; self.len()];
        for (i, &v) in ids.iter().enumerate() {
            index[v] = i;
        }
        let mut m = vec![vec![BigInt::zero(); ids.len()]; ids.len()];
        for (i, &v) in ids.iter().enumerate() {
            m[i][i] = BigInt::from(self.weights[v]);
            for &w in &self.adjacency[v] {
                if keep[w] {
                    m[i][index[w]] = BigInt::one();
                }
            }
        }
        m
    }

    /// Determinant of the subforest spanned by `keep` (1 when empty).
    pub fn induced_determinant(&self, keep: &[bool]) -> BigInt {
        linalg::determinant(&self.induced_matrix(keep))
    }

    /// Connected components of the subforest spanned by `keep`.
    pub fn components(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if !keep[start] || seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                for &w in &self.adjacency[v] {
                    if keep[w] && !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn determinant(&self) -> BigInt {
        self.determinant
            .get_or_init(|| linalg::determinant(&self.intersection_matrix()))
            .clone()
    }

    /// Exact test via the signs of the leading principal minors, which must
    /// alternate as `(-1)^k`.
    pub fn is_negative_definite(&self) -> bool {
        let minors = linalg::leading_minors(&self.intersection_matrix());
        minors.len() == self.len()
            && minors.iter().enumerate().all(|(i, d)| {
                // minor of size k = i + 1 must have sign (-1)^k
                if i % 2 == 0 {
                    d.is_negative()
                } else {
                    d.is_positive()
                }
            })
    }

    pub fn validate(&self) -> GraphReport {
        let determinant = self.determinant();
        GraphReport {
            is_negative_definite: self.is_negative_definite(),
            is_unimodular: determinant.magnitude().is_one(),
            bad_vertex_count: self.bad_vertices().len(),
            determinant,
        }
    }

    fn bfs_parents(&self, root: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.len()];
        parent[root] = Some(root);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if parent[w].is_none() {
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// The unique minimal path from `v` to `w`, both ends included.
    pub fn path(&self, v: usize, w: usize) -> Vec<usize> {
        let parent = self.bfs_parents(v);
        let mut out = vec![w];
        let mut cur = w;
        while cur != v {
            cur = parent[cur].expect("tree is connected");
            out.push(cur);
        }
        out.reverse();
        out
    }

    /// `(v, w)` entry of `I^-1` by path deletion:
    /// `-|det(I with the path v..w removed) / det(I)|`.
    pub fn inverse_entry(&self, v: usize, w: usize) -> Result<Rational> {
        if v >= self.len() || w >= self.len() {
            return Err(Error::invalid(format!("vertex out of range: ({v},{w})")));
        }
        let det = self.determinant();
        if det.is_zero() {
            return Err(Error::Singular);
        }
        if !self.is_negative_definite() {
            return Err(Error::NotNegativeDefinite);
        }
        let mut keep = vec![true; self.len()];
        for u in self.path(v, w) {
            keep[u] = false;
        }
        let minor = self.induced_determinant(&keep);
        Ok(-Rational::new(minor.abs(), det.abs()))
    }

    fn scaled_inverse(&self) -> Option<&(BigInt, Matrix)> {
        self.scaled_inverse
            .get_or_init(|| {
                let n = self.len();
                let identity: Matrix = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                            .collect()
                    })
                    .collect();
                linalg::solve(&self.intersection_matrix(), &identity)
            })
            .as_ref()
    }

    /// Exact inverse of the intersection matrix (cached after first use).
    pub fn inverse(&self) -> Result<Vec<Vec<Rational>>> {
        let (d, y) = self.scaled_inverse().ok_or(Error::Singular)?;
        Ok(y.iter()
            .map(|row| row.iter().map(|x| Rational::new(x.clone(), d.clone())).collect())
            .collect())
    }

    /// `I^-1` as an integer matrix; requires `det = ±1`.
    pub fn unimodular_inverse(&self) -> Result<Vec<Vec<BigInt>>> {
        let (d, y) = self.scaled_inverse().ok_or(Error::Singular)?;
        if !d.magnitude().is_one() {
            return Err(Error::NotUnimodular(self.determinant()));
        }
        Ok(y.iter().map(|row| row.iter().map(|x| x * d).collect()).collect())
    }

    pub fn check_characteristic(&self, k: &CharVector) -> Result<()> {
        if k.len() != self.len() {
            return Err(Error::invalid(format!(
                "class has {} entries, graph has {} vertices",
                k.len(),
                self.len()
            )));
        }
        match (0..self.len()).find(|&j| (k.evals[j] + self.weights[j]).rem_euclid(2) != 0) {
            Some(j) => Err(Error::NotCharacteristic(j)),
            None => Ok(()),
        }
    }

    /// `k^2 = k^T I^-1 k`, by solving `I x = k` exactly.
    pub fn k_squared(&self, k: &CharVector) -> Result<Rational> {
        self.check_characteristic(k)?;
        let column: Matrix = k.evals.iter().map(|&x| vec![BigInt::from(x)]).collect();
        let (d, y) =
            linalg::solve(&self.intersection_matrix(), &column).ok_or(Error::Singular)?;
        let dot: BigInt = k.evals.iter().zip(&y).map(|(&a, row)| a * &row[0]).sum();
        Ok(Rational::new(dot, d))
    }

    /// Adds `2PD(v)` to `evals`: `<k, w> += 2 I_vw` for every `w`.
    pub fn add_twice_dual(&self, evals: &mut [i64], v: usize) {
        evals[v] += 2 * self.weights[v];
        for &w in &self.adjacency[v] {
            evals[w] += 2;
        }
    }

    /// Isomorphism of weighted trees, via canonical encodings rooted at the
    /// tree centers.
    pub fn is_isomorphic(&self, other: &PlumbingGraph) -> bool {
        self.len() == other.len() && self.canonical_form() == other.canonical_form()
    }

    pub fn canonical_form(&self) -> String {
        self.centers()
            .into_iter()
            .map(|c| self.encode_rooted(c))
            .min()
            .expect("non-empty tree has a center")
    }

    fn centers(&self) -> Vec<usize> {
        let n = self.len();
        if n <= 2 {
            return (0..n).collect();
        }
        let mut degree: Vec<usize> = (0..n).map(|v| self.valency(v)).collect();
        let mut leaves: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        let mut remaining = n;
        while remaining > 2 {
            remaining -= leaves.len();
            let mut next = Vec::new();
            for &leaf in &leaves {
                degree[leaf] = 0;
                for &w in &self.adjacency[leaf] {
                    if degree[w] > 0 {
                        degree[w] -= 1;
                        if degree[w] == 1 {
                            next.push(w);
                        }
                    }
                }
            }
            leaves = next;
        }
        leaves
    }

    fn encode_rooted(&self, root: usize) -> String {
        let parent = self.bfs_parents(root);
        // children before parents: reverse BFS order
        let mut order = vec![root];
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for &w in &self.adjacency[v] {
                if parent[w] == Some(v) && w != root {
                    order.push(w);
                }
            }
            i += 1;
        }
        let mut code: Vec<String> = vec![String::new(); self.len()];
        for &v in order.iter().rev() {
            let mut children: Vec<&str> = self.adjacency[v]
                .iter()
                .filter(|&&w| parent[w] == Some(v) && w != root)
                .map(|&w| code[w].as_str())
                .collect();
            children.sort_unstable();
            code[v] = format!("({}{})", self.weights[v], children.concat());
        }
        std::mem::take(&mut code[root])
    }

    pub fn to_json_value(&self) -> GraphJson {
        GraphJson {
            vertices: self
                .weights
                .iter()
                .enumerate()
                .map(|(id, &weight)| VertexJson { id, weight })
                .collect(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(text)?;
        Self::try_from(raw)
    }

    /// Graphviz rendering; `header` lines become leading `//` comments.
    pub fn to_dot(&self, header: &[&str]) -> String {
        let mut out = String::new();
        for line in header {
            let _ = writeln!(out, "// {line}");
        }
        out.push_str("graph plumbing {\n");
        for (v, w) in self.weights.iter().enumerate() {
            let _ = writeln!(out, "  v{v} [label=\"{w}\"];");
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "  v{a} -- v{b};");
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub weight: i64,
}

/// `{"vertices":[{"id":int,"weight":int}],"edges":[[int,int]]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for PlumbingGraph {
    type Error = Error;

    fn try_from(raw: GraphJson) -> Result<Self> {
        let by_id: BTreeMap<usize, i64> =
            raw.vertices.iter().map(|v| (v.id, v.weight)).collect();
        let n = raw.vertices.len();
        if by_id.len() != n || by_id.keys().next_back().is_some_and(|&last| last + 1 != n) {
            return Err(Error::invalid("vertex ids must be exactly 0..n-1"));
        }
        let weights = by_id.into_values().collect();
        let edges = raw.edges.iter().map(|&[a, b]| (a, b)).collect();
        PlumbingGraph::new(weights, edges)
    }
}

/// All-`(-2)` path on `t` vertices.
pub fn build_simple_linear(t: usize) -> Result<PlumbingGraph> {
    if t == 0 {
        return Err(Error::invalid("simple linear graph needs at least one vertex"));
    }
    PlumbingGraph::linear(vec![-2; t])
}

/// Star-shaped resolution graph: center `e0` (id 0) and three arms read off
/// the negative continued fractions of `p/p'`, `q/q'`, `r/r'`, listed
/// outward from the center. Multiplicity-one fibers contribute no arm.
pub fn build_star_graph(p: u64, q: u64, r: u64, seifert: &SeifertData) -> Result<PlumbingGraph> {
    let mut weights = vec![seifert.e0];
    let mut edges = Vec::new();
    for (mult, inv) in [(p, seifert.p_prime), (q, seifert.q_prime), (r, seifert.r_prime)] {
        if mult == 1 {
            continue;
        }
        let cf = cf_expand(mult, inv)?;
        let mut prev = 0;
        for &t in cf.terms() {
            let id = weights.len();
            weights.push(-t);
            edges.push((prev, id));
            prev = id;
        }
    }
    PlumbingGraph::new(weights, edges)
}

/// Plumbing tree of `Σ(p,q,r)` for a triplet with `pq + pr - qr = 1`.
///
/// Labelling: id 0 is the `-p` vertex, id 1 the central `-2` vertex,
/// ids `2..=q` the `(q-1)`-arm running outward from the center and ids
/// `q+1..=q+r-1` the `(r-1)`-arm running outward, so `q+r-1` is its free end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AslGraph {
    triplet: Triplet,
    graph: PlumbingGraph,
}

pub const ASL_P_VERTEX: usize = 0;
pub const ASL_CENTER: usize = 1;

impl AslGraph {
    pub fn new(triplet: Triplet) -> Result<Self> {
        let (q, r) = (triplet.q() as usize, triplet.r() as usize);
        let n = q + r;
        let mut weights = vec![-2i64; n];
        weights[ASL_P_VERTEX] = -(triplet.p() as i64);
        let mut edges = vec![(ASL_P_VERTEX, ASL_CENTER)];
        // q-arm: 2..=q
        edges.push((ASL_CENTER, 2));
        edges.extend((3..=q).map(|v| (v - 1, v)));
        // r-arm: q+1..=q+r-1
        edges.push((ASL_CENTER, q + 1));
        edges.extend((q + 2..n).map(|v| (v - 1, v)));
        Ok(AslGraph { triplet, graph: PlumbingGraph::new(weights, edges)? })
    }

    pub fn triplet(&self) -> Triplet {
        self.triplet
    }

    pub fn graph(&self) -> &PlumbingGraph {
        &self.graph
    }

    pub fn into_graph(self) -> PlumbingGraph {
        self.graph
    }

    /// The r-arm vertex with exactly `m - 1` vertices between it and the
    /// free end (`m >= 1`).
    pub fn r_arm_vertex(&self, m: u64) -> usize {
        (self.triplet.q() + self.triplet.r() - m) as usize
    }

    /// The class `k_{a,m}`: `a` on the `-p` vertex, `-2` on
    /// [`r_arm_vertex(m)`](Self::r_arm_vertex) when `m > 0`, zero elsewhere.
    pub fn k_am(&self, a: i64, m: u64) -> Result<CharVector> {
        let p = self.triplet.p() as i64;
        if self.triplet.is_p_even() {
            return Err(Error::invalid("k_{a,m} is defined for odd p only"));
        }
        if a.rem_euclid(2) != 1 || a.abs() > p {
            return Err(Error::invalid(format!("a = {a} must be odd with |a| <= {p}")));
        }
        if m > self.triplet.m_max() {
            return Err(Error::invalid(format!(
                "m = {m} exceeds (p-1)/2 = {}",
                self.triplet.m_max()
            )));
        }
        let mut k = CharVector::zeros(self.graph.len());
        k.evals[ASL_P_VERTEX] = a;
        if m > 0 {
            k.evals[self.r_arm_vertex(m)] = -2;
        }
        Ok(k)
    }
}

pub fn build_asl_graph(t: Triplet) -> Result<PlumbingGraph> {
    Ok(AslGraph::new(t)?.into_graph())
}
