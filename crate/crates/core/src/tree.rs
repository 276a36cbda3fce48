//! Finite combinatorial trees with a distinguished leaf set.
//!
//! Trees are immutable once built. Edits go through [`TreeBuilder`] and produce
//! a fresh value; relabelings are explicit maps.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const REMOVED: usize = usize::MAX;

/// An unordered pair of vertex labels, stored with the smaller label first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(String, String);

impl Edge {
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Self {
        let (a, b) = (a.into(), b.into());
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn ends(&self) -> (&str, &str) {
        (&self.0, &self.1)
    }

    pub fn contains(&self, v: &str) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint opposite to `v`, if `v` is an endpoint.
    pub fn other(&self, v: &str) -> Option<&str> {
        if self.0 == v {
            Some(&self.1)
        } else if self.1 == v {
            Some(&self.0)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}--{}", self.0, self.1)
    }
}

/// Interchange form of a tree: sorted vertices, sorted leaves, sorted edge pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDoc {
    pub vertices: Vec<String>,
    pub leaves: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TreeDoc", into = "TreeDoc")]
pub struct CombinatorialTree {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<usize>>,
    leaf: Vec<bool>,
}

impl PartialEq for CombinatorialTree {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.adj == other.adj && self.leaf == other.leaf
    }
}

impl Eq for CombinatorialTree {}

impl TryFrom<TreeDoc> for CombinatorialTree {
    type Error = Error;

    fn try_from(doc: TreeDoc) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &doc.vertices {
            if !seen.insert(v) {
                return Err(Error::InvalidTree(format!("duplicate vertex label {v}")));
            }
        }
        CombinatorialTree::new(
            doc.vertices,
            doc.leaves,
            doc.edges.into_iter().map(|[a, b]| (a, b)),
        )
    }
}

impl From<CombinatorialTree> for TreeDoc {
    fn from(t: CombinatorialTree) -> Self {
        t.to_doc()
    }
}

impl CombinatorialTree {
    /// Builds a tree, checking connectivity, acyclicity and the leaf condition.
    pub fn new<V, L, E, S>(vertices: V, leaves: L, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = S>,
        L: IntoIterator<Item = S>,
        E: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let labels: BTreeSet<String> = vertices.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(Error::InvalidTree(format!(
                "a tree needs at least 2 vertices, got {}",
                labels.len()
            )));
        }
        let labels: Vec<String> = labels.into_iter().collect();
        let index: HashMap<String, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let n = labels.len();

        let mut leaf = vec![false; n];
        for l in leaves {
            let l = l.into();
            let &i = index
                .get(&l)
                .ok_or_else(|| Error::InvalidTree(format!("leaf {l} is not a vertex")))?;
            leaf[i] = true;
        }

        let mut adj = vec![Vec::new(); n];
        let mut edge_set = BTreeSet::new();
        for (a, b) in edges {
            let (a, b) = (a.into(), b.into());
            let ia = *index
                .get(&a)
                .ok_or_else(|| Error::InvalidTree(format!("edge endpoint {a} is not a vertex")))?;
            let ib = *index
                .get(&b)
                .ok_or_else(|| Error::InvalidTree(format!("edge endpoint {b} is not a vertex")))?;
            if ia == ib {
                return Err(Error::InvalidTree(format!("loop at {a}")));
            }
            if !edge_set.insert((ia.min(ib), ia.max(ib))) {
                return Err(Error::InvalidTree(format!("duplicate edge {a}--{b}")));
            }
            adj[ia].push(ib);
            adj[ib].push(ia);
        }
        if edge_set.len() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "{} vertices need {} edges, got {}",
                n,
                n - 1,
                edge_set.len()
            )));
        }
        for a in &mut adj {
            a.sort_unstable();
        }

        // n - 1 edges plus connectivity implies acyclic.
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        if reached != n {
            return Err(Error::InvalidTree("edge set is not connected".into()));
        }

        for i in 0..n {
            if leaf[i] && adj[i].len() != 1 {
                return Err(Error::InvalidTree(format!(
                    "leaf {} has {} edges",
                    labels[i],
                    adj[i].len()
                )));
            }
        }

        Ok(CombinatorialTree {
            labels,
            index,
            adj,
            leaf,
        })
    }

    /// Builds a tree whose vertex set is the set of edge endpoints.
    pub fn from_edges(leaves: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        let vertices: BTreeSet<&str> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        Self::new(vertices, leaves.iter().copied(), edges.iter().copied())
    }

    pub fn to_doc(&self) -> TreeDoc {
        let leaves = self.leaves().map(str::to_owned).collect();
        let edges = self.edges().into_iter().map(|Edge(a, b)| [a, b]).collect();
        TreeDoc {
            vertices: self.labels.clone(),
            leaves,
            edges,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// All vertex labels in sorted order.
    pub fn vertices(&self) -> impl Iterator<Item = &str> + '_ {
        self.labels.iter().map(String::as_str)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &str> + '_ {
        self.vertices().filter(move |v| self.leaf[self.index[*v]])
    }

    pub fn internal(&self) -> impl Iterator<Item = &str> + '_ {
        self.vertices().filter(move |v| !self.leaf[self.index[*v]])
    }

    pub fn leaf_set(&self) -> BTreeSet<String> {
        self.leaves().map(str::to_owned).collect()
    }

    pub fn vertex_set(&self) -> BTreeSet<String> {
        self.labels.iter().cloned().collect()
    }

    pub fn contains(&self, v: &str) -> bool {
        self.index.contains_key(v)
    }

    pub fn is_leaf(&self, v: &str) -> bool {
        self.index.get(v).is_some_and(|&i| self.leaf[i])
    }

    pub fn is_internal(&self, v: &str) -> bool {
        self.index.get(v).is_some_and(|&i| !self.leaf[i])
    }

    pub fn degree(&self, v: &str) -> Result<usize> {
        Ok(self.adj[self.idx(v)?].len())
    }

    pub fn neighbors(&self, v: &str) -> Result<Vec<&str>> {
        let i = self.idx(v)?;
        Ok(self.adj[i]
            .iter()
            .map(|&j| self.labels[j].as_str())
            .collect())
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&i), Some(&j)) => self.adj[i].binary_search(&j).is_ok(),
            _ => false,
        }
    }

    /// All edges, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.len() - 1);
        for (i, nb) in self.adj.iter().enumerate() {
            for &j in nb {
                if i < j {
                    out.push(Edge(self.labels[i].clone(), self.labels[j].clone()));
                }
            }
        }
        out.sort();
        out
    }

    pub(crate) fn idx(&self, v: &str) -> Result<usize> {
        self.index
            .get(v)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("{v} is not a vertex")))
    }

    pub(crate) fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// For each vertex, the position (in the sorted neighbor list of `removed`)
    /// of the component of `t ∖ {removed}` containing it; `REMOVED` for `removed`.
    pub(crate) fn component_ids(&self, removed: usize) -> Vec<usize> {
        let mut ids = vec![REMOVED; self.len()];
        let mut stack = Vec::new();
        for (c, &start) in self.adj[removed].iter().enumerate() {
            ids[start] = c;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if w != removed && ids[w] == REMOVED {
                        ids[w] = c;
                        stack.push(w);
                    }
                }
            }
        }
        ids
    }

    /// Components of `t ∖ {v}`, one per neighbor of `v`, in neighbor order.
    pub fn components_without(&self, v: &str) -> Result<Vec<BTreeSet<String>>> {
        let i = self.idx(v)?;
        let ids = self.component_ids(i);
        let mut comps = vec![BTreeSet::new(); self.adj[i].len()];
        for (u, &c) in ids.iter().enumerate() {
            if c != REMOVED {
                comps[c].insert(self.labels[u].clone());
            }
        }
        Ok(comps)
    }

    /// True iff `a`, `b`, `c` are distinct, differ from `v`, and lie in three
    /// distinct components of `t ∖ {v}`.
    pub fn separates(&self, v: &str, a: &str, b: &str, c: &str) -> Result<bool> {
        let i = self.idx(v)?;
        let (ia, ib, ic) = (self.idx(a)?, self.idx(b)?, self.idx(c)?);
        if [ia, ib, ic].contains(&i) || ia == ib || ib == ic || ia == ic {
            return Ok(false);
        }
        let ids = self.component_ids(i);
        Ok(ids[ia] != ids[ib] && ids[ib] != ids[ic] && ids[ia] != ids[ic])
    }

    /// Parent pointers of a breadth-first traversal rooted at `root`.
    fn parents(&self, root: usize) -> Vec<usize> {
        let mut parent = vec![REMOVED; self.len()];
        parent[root] = root;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if parent[w] == REMOVED {
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    pub(crate) fn arc_indices(&self, from: usize, to: usize) -> Vec<usize> {
        let parent = self.parents(to);
        let mut path = vec![from];
        let mut u = from;
        while u != to {
            u = parent[u];
            path.push(u);
        }
        path
    }

    /// The vertices of the unique path from `v` to `w`, both included.
    pub fn arc(&self, v: &str, w: &str) -> Result<Vec<String>> {
        let (i, j) = (self.idx(v)?, self.idx(w)?);
        Ok(self
            .arc_indices(i, j)
            .into_iter()
            .map(|k| self.labels[k].clone())
            .collect())
    }

    /// The unique vertex whose removal puts three distinct leaves in three
    /// distinct components.
    pub fn separating_vertex(&self, a: &str, b: &str, c: &str) -> Result<String> {
        if a == b || b == c || a == c {
            return Err(Error::InvalidArgument(format!(
                "separating_vertex needs distinct leaves, got ({a}, {b}, {c})"
            )));
        }
        for l in [a, b, c] {
            if !self.is_leaf(l) {
                return Err(Error::InvalidArgument(format!("{l} is not a leaf")));
            }
        }
        Ok(self
            .label(self.median(self.idx(a)?, self.idx(b)?, self.idx(c)?))
            .to_owned())
    }

    /// The vertex where the paths from `a` to `b` and from `a` to `c` diverge.
    pub(crate) fn median(&self, a: usize, b: usize, c: usize) -> usize {
        let parent = self.parents(a);
        let mut on_ab = vec![false; self.len()];
        let mut u = b;
        loop {
            on_ab[u] = true;
            if u == a {
                break;
            }
            u = parent[u];
        }
        let mut u = c;
        while !on_ab[u] {
            u = parent[u];
        }
        u
    }

    /// The component of `t ∖ {v}` on the side of the edge `e` at `v`.
    pub fn branch(&self, v: &str, e: &Edge) -> Result<BTreeSet<String>> {
        let w = e
            .other(v)
            .ok_or_else(|| Error::InvalidArgument(format!("edge {e} is not adjacent to {v}")))?;
        if !self.has_edge(v, w) {
            return Err(Error::InvalidArgument(format!(
                "edge {e} is not in the tree"
            )));
        }
        self.branch_toward(v, w)
    }

    /// The component of `t ∖ {v}` containing the neighbor `w`.
    pub fn branch_toward(&self, v: &str, w: &str) -> Result<BTreeSet<String>> {
        let (i, j) = (self.idx(v)?, self.idx(w)?);
        if self.adj[i].binary_search(&j).is_err() {
            return Err(Error::InvalidArgument(format!(
                "{w} is not adjacent to {v}"
            )));
        }
        let ids = self.component_ids(i);
        let c = ids[j];
        Ok(ids
            .iter()
            .enumerate()
            .filter(|&(_, &k)| k == c)
            .map(|(u, _)| self.labels[u].clone())
            .collect())
    }

    /// The component of `t ∖ {v, w}` containing the interior of the arc
    /// `[v, w]`; empty when `v` and `w` are adjacent or equal.
    pub fn annulus(&self, v: &str, w: &str) -> Result<BTreeSet<String>> {
        let (i, j) = (self.idx(v)?, self.idx(w)?);
        let path = self.arc_indices(i, j);
        if path.len() <= 2 {
            return Ok(BTreeSet::new());
        }
        let mut seen = vec![false; self.len()];
        seen[i] = true;
        seen[j] = true;
        let mut out = BTreeSet::new();
        let mut stack = vec![path[1]];
        seen[path[1]] = true;
        while let Some(u) = stack.pop() {
            out.insert(self.labels[u].clone());
            for &x in &self.adj[u] {
                if !seen[x] {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        Ok(out)
    }

    /// True iff every internal vertex has at least three edges.
    pub fn is_stable(&self) -> bool {
        (0..self.len()).all(|i| self.leaf[i] || self.adj[i].len() >= 3)
    }

    /// Partition of `subset` by the components of `t ∖ {v}` (empty blocks
    /// dropped; `v` itself must not be in `subset`).
    pub fn partition_at(
        &self,
        v: &str,
        subset: &BTreeSet<String>,
    ) -> Result<BTreeSet<BTreeSet<String>>> {
        let i = self.idx(v)?;
        let ids = self.component_ids(i);
        let mut blocks: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
        for s in subset {
            let c = ids[self.idx(s)?];
            if c == REMOVED {
                return Err(Error::InvalidArgument(format!(
                    "{v} is in the partitioned set"
                )));
            }
            blocks.entry(c).or_default().insert(s.clone());
        }
        Ok(blocks.into_values().collect())
    }

    /// Renames vertices through `map`; labels absent from the map are kept.
    pub fn relabel(&self, map: &BTreeMap<String, String>) -> Result<Self> {
        let name = |v: &str| map.get(v).cloned().unwrap_or_else(|| v.to_owned());
        let vertices: Vec<String> = self.vertices().map(name).collect();
        let distinct: BTreeSet<&String> = vertices.iter().collect();
        if distinct.len() != vertices.len() {
            return Err(Error::InvalidArgument("relabeling is not injective".into()));
        }
        let leaves: Vec<String> = self.leaves().map(name).collect();
        let edges: Vec<(String, String)> = self
            .edges()
            .iter()
            .map(|e| (name(&e.0), name(&e.1)))
            .collect();
        Self::new(vertices, leaves, edges)
    }
}

/// Pairs up two labelings of the same index set and checks that they induce
/// the same partition.
fn same_partition(pairs: impl Iterator<Item = (usize, usize)>) -> bool {
    let mut fwd: HashMap<usize, usize> = HashMap::new();
    let mut bwd: HashMap<usize, usize> = HashMap::new();
    for (a, b) in pairs {
        if *fwd.entry(a).or_insert(b) != b || *bwd.entry(b).or_insert(a) != a {
            return false;
        }
    }
    true
}

/// `t1 ◁ t2`: every vertex of `t1` is a vertex of `t2`, and for all vertices
/// `v, v1, v2, v3` of `t1`, `v` separates the triple in `t1` iff it does in `t2`.
///
/// For a fixed `v`, the separated triples are determined by the partition of
/// the other `t1` vertices into components; two partitions separate the same
/// triples iff they are equal or both have at most two blocks.
pub fn is_compatible(t1: &CombinatorialTree, t2: &CombinatorialTree) -> bool {
    let Ok(map) = t1
        .labels
        .iter()
        .map(|l| t2.idx(l))
        .collect::<Result<Vec<usize>>>()
    else {
        return false;
    };
    for v in 0..t1.len() {
        let ids1 = t1.component_ids(v);
        let ids2 = t2.component_ids(map[v]);
        let blocks1 = t1.adj[v].len();
        let blocks2: BTreeSet<usize> = (0..t1.len())
            .filter(|&u| u != v)
            .map(|u| ids2[map[u]])
            .collect();
        if blocks1 <= 2 && blocks2.len() <= 2 {
            continue;
        }
        let pairs = (0..t1.len())
            .filter(|&u| u != v)
            .map(|u| (ids1[u], ids2[map[u]]));
        if !same_partition(pairs) {
            return false;
        }
    }
    true
}

/// Maps each internal vertex of `t1` to the vertex of `t2` separating the same
/// leaf triples, after checking that the branch partitions of the leaves of
/// `t1` agree. The result (extended by the identity on leaves) realizes
/// `t1 ◁ t2` after relabeling.
pub fn embed_by_triples(
    t1: &CombinatorialTree,
    t2: &CombinatorialTree,
) -> Result<BTreeMap<String, String>> {
    if !t1.is_stable() || !t2.is_stable() {
        return Err(Error::InvalidArgument(
            "embed_by_triples needs two stable trees".into(),
        ));
    }
    let leaves1 = t1.leaf_set();
    if let Some(l) = leaves1.iter().find(|l| !t2.is_leaf(l)) {
        return Err(Error::InvalidArgument(format!(
            "leaf {l} of the first tree is not a leaf of the second"
        )));
    }
    let leaf_idx1: Vec<usize> = leaves1.iter().map(|l| t1.index[l]).collect();
    let leaf_idx2: Vec<usize> = leaves1.iter().map(|l| t2.index[l]).collect();

    let mut map = BTreeMap::new();
    let mut used: BTreeMap<String, String> = BTreeMap::new();
    for u in t1.internal() {
        let iu = t1.index[u];
        let ids1 = t1.component_ids(iu);
        // Smallest leaf in each component; a stable vertex has at least three.
        let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
        for (k, &li) in leaf_idx1.iter().enumerate() {
            reps.entry(ids1[li]).or_insert(k);
        }
        let mut firsts: Vec<usize> = reps.into_values().collect();
        firsts.sort_unstable();
        let triple = [firsts[0], firsts[1], firsts[2]];
        let labels: Vec<&String> = leaves1.iter().collect();
        let triple_labels = triple.map(|k| labels[k].clone());
        let image = t2.median(
            leaf_idx2[triple[0]],
            leaf_idx2[triple[1]],
            leaf_idx2[triple[2]],
        );

        let ids2 = t2.component_ids(image);
        let pairs = (0..leaf_idx1.len()).map(|k| (ids1[leaf_idx1[k]], ids2[leaf_idx2[k]]));
        if !same_partition(pairs) {
            return Err(Error::TripleMismatch(triple_labels));
        }
        let image = t2.label(image).to_owned();
        if let Some(prev) = used.insert(image.clone(), u.to_owned()) {
            return Err(Error::InvalidArgument(format!(
                "internal vertices {prev} and {u} both map to {image}"
            )));
        }
        map.insert(u.to_owned(), image);
    }
    Ok(map)
}

/// For stable trees with equal leaf sets and `t1 ◁ t2`, checks that the two
/// trees coincide as graphs.
pub fn assert_stable_equality(t1: &CombinatorialTree, t2: &CombinatorialTree) -> Result<bool> {
    if !t1.is_stable() || !t2.is_stable() {
        return Err(Error::InvalidArgument("both trees must be stable".into()));
    }
    if t1.leaf_set() != t2.leaf_set() {
        return Err(Error::InvalidArgument("leaf sets differ".into()));
    }
    if !is_compatible(t1, t2) {
        return Err(Error::InvalidArgument(
            "first tree is not compatible with the second".into(),
        ));
    }
    Ok(t1.labels == t2.labels && t1.edges() == t2.edges())
}

/// Mutable staging area for tree surgery.
#[derive(Debug, Clone, Default)]
pub struct TreeBuilder {
    vertices: BTreeSet<String>,
    leaves: BTreeSet<String>,
    edges: BTreeSet<Edge>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_tree(t: &CombinatorialTree) -> Self {
        TreeBuilder {
            vertices: t.vertex_set(),
            leaves: t.leaf_set(),
            edges: t.edges().into_iter().collect(),
        }
    }

    pub fn contains(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn add_vertex(&mut self, v: impl Into<String>, leaf: bool) -> &mut Self {
        let v = v.into();
        if leaf {
            self.leaves.insert(v.clone());
        } else {
            self.leaves.remove(&v);
        }
        self.vertices.insert(v);
        self
    }

    pub fn add_edge(&mut self, a: impl Into<String>, b: impl Into<String>) -> &mut Self {
        self.edges.insert(Edge::new(a, b));
        self
    }

    pub fn remove_edge(&mut self, a: &str, b: &str) -> bool {
        self.edges.remove(&Edge::new(a, b))
    }

    /// Replaces the edge `a--b` by `a--new--b` with `new` internal.
    pub fn subdivide(&mut self, a: &str, b: &str, new: impl Into<String>) -> Result<&mut Self> {
        let new = new.into();
        if !self.remove_edge(a, b) {
            return Err(Error::InvalidArgument(format!(
                "no edge {a}--{b} to subdivide"
            )));
        }
        if self.vertices.contains(&new) {
            return Err(Error::InvalidArgument(format!(
                "vertex {new} already exists"
            )));
        }
        self.add_vertex(new.clone(), false);
        self.add_edge(a, new.clone());
        self.add_edge(new, b);
        Ok(self)
    }

    /// Adds a new leaf hanging from `at`.
    pub fn attach_leaf(&mut self, at: &str, new: impl Into<String>) -> Result<&mut Self> {
        let new = new.into();
        if !self.vertices.contains(at) {
            return Err(Error::InvalidArgument(format!("no vertex {at}")));
        }
        if self.vertices.contains(&new) {
            return Err(Error::InvalidArgument(format!(
                "vertex {new} already exists"
            )));
        }
        self.add_vertex(new.clone(), true);
        self.add_edge(at, new);
        Ok(self)
    }

    pub fn build(&self) -> Result<CombinatorialTree> {
        CombinatorialTree::new(
            self.vertices.iter().cloned(),
            self.leaves.iter().cloned(),
            self.edges.iter().map(|e| (e.0.clone(), e.1.clone())),
        )
    }
}
