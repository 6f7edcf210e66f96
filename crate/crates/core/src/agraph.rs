//! Labeled bipartite A-graphs.
//!
//! Vertices are primary or secondary; every secondary vertex carries the
//! factor it belongs to. Each undirected edge joins a primary vertex `p` to a
//! secondary vertex `s` and stores the label `λ` of the dart `p → s`; the
//! reverse dart `s → p` is labeled `−λ`. A path `p → s → p'` reads the
//! syllable `λ(p→s) − λ(p'→s)`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::{self, Write as _};

use num::Zero;

use crate::factor::{FactorElement, FactorId, Rational};
use crate::word::Word;

pub type VertexId = usize;
pub type EdgeId = usize;

/// An oriented edge. Dart `2k` runs primary → secondary along edge `k`,
/// dart `2k + 1` is its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart(pub usize);

impl Dart {
    pub fn forward(edge: EdgeId) -> Dart {
        Dart(2 * edge)
    }

    pub fn backward(edge: EdgeId) -> Dart {
        Dart(2 * edge + 1)
    }

    pub fn edge(self) -> EdgeId {
        self.0 / 2
    }

    pub fn is_forward(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn inverse(self) -> Dart {
        Dart(self.0 ^ 1)
    }
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_forward() {
            write!(f, "e{}", self.edge())
        } else {
            write!(f, "e{}'", self.edge())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Primary,
    Secondary(FactorId),
}

impl VertexKind {
    pub fn is_primary(self) -> bool {
        matches!(self, VertexKind::Primary)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeRec {
    pub primary: VertexId,
    pub secondary: VertexId,
    pub label: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AGraph {
    kinds: Vec<VertexKind>,
    edges: Vec<EdgeRec>,
    base: Option<VertexId>,
    adj: Vec<Vec<Dart>>,
}

/// A subgraph together with the ids its pieces had in the parent graph.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub graph: AGraph,
    pub vertex_origin: Vec<VertexId>,
    pub edge_origin: Vec<EdgeId>,
}

impl Restriction {
    pub fn dart_origin(&self, d: Dart) -> Dart {
        let e = self.edge_origin[d.edge()];
        if d.is_forward() {
            Dart::forward(e)
        } else {
            Dart::backward(e)
        }
    }
}

impl AGraph {
    /// Panics if an edge does not join a primary and a secondary vertex.
    pub fn new(kinds: Vec<VertexKind>, edges: Vec<EdgeRec>, base: Option<VertexId>) -> AGraph {
        let mut adj = vec![Vec::new(); kinds.len()];
        for (k, e) in edges.iter().enumerate() {
            assert!(
                kinds[e.primary].is_primary(),
                "edge {k} must start at a primary vertex"
            );
            assert!(
                !kinds[e.secondary].is_primary(),
                "edge {k} must end at a secondary vertex"
            );
            adj[e.primary].push(Dart::forward(k));
            adj[e.secondary].push(Dart::backward(k));
        }
        if let Some(b) = base {
            assert!(kinds[b].is_primary(), "base vertex must be primary");
        }
        AGraph {
            kinds,
            edges,
            base,
            adj,
        }
    }

    /// The based graph of the trivial subgroup.
    pub fn trivial() -> AGraph {
        AGraph::new(vec![VertexKind::Primary], Vec::new(), Some(0))
    }

    pub fn vertex_count(&self) -> usize {
        self.kinds.len()
    }

    /// Number of undirected edges (each stands for a dart and its inverse).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn kinds(&self) -> &[VertexKind] {
        &self.kinds
    }

    pub fn kind(&self, v: VertexId) -> VertexKind {
        self.kinds[v]
    }

    pub fn is_primary(&self, v: VertexId) -> bool {
        self.kinds[v].is_primary()
    }

    pub fn edges(&self) -> &[EdgeRec] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &EdgeRec {
        &self.edges[e]
    }

    pub fn base(&self) -> Option<VertexId> {
        self.base
    }

    pub fn with_base(mut self, base: Option<VertexId>) -> AGraph {
        if let Some(b) = base {
            assert!(self.is_primary(b), "base vertex must be primary");
        }
        self.base = base;
        self
    }

    pub fn darts_at(&self, v: VertexId) -> &[Dart] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn primary_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.kinds.len()).filter(|&v| self.is_primary(v))
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> {
        (0..2 * self.edges.len()).map(Dart)
    }

    pub fn tail(&self, d: Dart) -> VertexId {
        let e = &self.edges[d.edge()];
        if d.is_forward() {
            e.primary
        } else {
            e.secondary
        }
    }

    pub fn head(&self, d: Dart) -> VertexId {
        self.tail(d.inverse())
    }

    /// The factor of the secondary endpoint of `d`.
    pub fn dart_type(&self, d: Dart) -> FactorId {
        match self.kinds[self.edges[d.edge()].secondary] {
            VertexKind::Secondary(t) => t,
            VertexKind::Primary => unreachable!("secondary endpoint"),
        }
    }

    pub fn label(&self, d: Dart) -> Rational {
        let l = &self.edges[d.edge()].label;
        if d.is_forward() {
            l.clone()
        } else {
            -l
        }
    }

    /// The element of the free product spelled by a sequence of darts.
    pub fn path_word(&self, path: &[Dart]) -> Word {
        Word::from_elements(
            path.iter()
                .map(|&d| FactorElement::new(self.dart_type(d), self.label(d))),
        )
    }

    pub fn is_path(&self, path: &[Dart]) -> bool {
        path.iter().all(|d| d.edge() < self.edges.len())
            && path.windows(2).all(|w| self.head(w[0]) == self.tail(w[1]))
    }

    pub fn is_reduced_path(&self, path: &[Dart]) -> bool {
        self.is_path(path) && path.windows(2).all(|w| w[1] != w[0].inverse())
    }

    pub fn euler_char(&self) -> i64 {
        self.kinds.len() as i64 - self.edges.len() as i64
    }

    pub fn reduced_rank(&self) -> u64 {
        (-self.euler_char()).max(0) as u64
    }

    /// Keeps the flagged vertices and every edge between two kept vertices.
    pub fn restrict(&self, keep: &[bool]) -> Restriction {
        let mut new_id = vec![usize::MAX; self.kinds.len()];
        let mut vertex_origin = Vec::new();
        let mut kinds = Vec::new();
        for v in 0..self.kinds.len() {
            if keep[v] {
                new_id[v] = kinds.len();
                kinds.push(self.kinds[v]);
                vertex_origin.push(v);
            }
        }
        let mut edges = Vec::new();
        let mut edge_origin = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            if keep[e.primary] && keep[e.secondary] {
                edges.push(EdgeRec {
                    primary: new_id[e.primary],
                    secondary: new_id[e.secondary],
                    label: e.label.clone(),
                });
                edge_origin.push(k);
            }
        }
        let base = self.base.filter(|&b| keep[b]).map(|b| new_id[b]);
        Restriction {
            graph: AGraph::new(kinds, edges, base),
            vertex_origin,
            edge_origin,
        }
    }

    /// Iteratively removes vertices of degree at most one, except `protect`.
    pub fn prune_keep(&self, protect: Option<VertexId>) -> Vec<bool> {
        let n = self.kinds.len();
        let mut alive = vec![true; n];
        let mut deg: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut stack: Vec<VertexId> = (0..n)
            .filter(|&v| deg[v] <= 1 && Some(v) != protect)
            .collect();
        while let Some(v) = stack.pop() {
            if !alive[v] {
                continue;
            }
            alive[v] = false;
            for &d in &self.adj[v] {
                let w = self.head(d);
                if alive[w] {
                    deg[w] -= 1;
                    if deg[w] <= 1 && Some(w) != protect {
                        stack.push(w);
                    }
                }
            }
        }
        alive
    }

    /// The core: no vertex of degree ≤ 1 survives and tree components vanish.
    pub fn core(&self) -> AGraph {
        self.core_restriction().graph
    }

    pub fn core_restriction(&self) -> Restriction {
        let mut r = self.restrict(&self.prune_keep(None));
        r.graph.base = None;
        r
    }

    /// Vertex sets of the connected components, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let n = self.kinds.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &d in &self.adj[v] {
                    let w = self.head(d);
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn component_restrictions(&self) -> Vec<Restriction> {
        self.components()
            .into_iter()
            .map(|comp| {
                let mut keep = vec![false; self.kinds.len()];
                for v in comp {
                    keep[v] = true;
                }
                self.restrict(&keep)
            })
            .collect()
    }

    /// Breadth-first tree from `root`: for each reached vertex, the dart
    /// through which it was first reached.
    pub fn bfs_tree(&self, root: VertexId) -> Vec<Option<Dart>> {
        let mut parent = vec![None; self.kinds.len()];
        let mut seen = vec![false; self.kinds.len()];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &d in &self.adj[v] {
                let w = self.head(d);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// The tree path from the root of `tree` to `v`.
    pub fn tree_path(&self, tree: &[Option<Dart>], v: VertexId) -> Vec<Dart> {
        let mut path = Vec::new();
        let mut cur = v;
        while let Some(d) = tree[cur] {
            path.push(d);
            cur = self.tail(d);
        }
        path.reverse();
        path
    }

    /// Darts leaving primary `v` into secondary vertices of type `t`.
    fn dart_of_type(&self, v: VertexId, t: FactorId) -> Option<Dart> {
        self.adj[v]
            .iter()
            .copied()
            .find(|&d| self.dart_type(d) == t)
    }

    /// Deterministic trace of a reduced word from the base vertex.
    ///
    /// Relies on irreducibility: at a primary vertex there is at most one
    /// dart of each type, and at a secondary vertex labels are distinct.
    pub fn membership(&self, w: &Word) -> bool {
        let Some(o) = self.base else {
            return w.is_empty();
        };
        match self.trace(o, w) {
            Some(end) => end == o,
            None => false,
        }
    }

    /// Follows `w` from primary `start`; returns the end vertex.
    pub fn trace(&self, start: VertexId, w: &Word) -> Option<VertexId> {
        let mut v = start;
        for l in w.letters() {
            let e = self.dart_of_type(v, l.factor())?;
            let s = self.head(e);
            let want = self.label(e) - l.value();
            let f = self.adj[s]
                .iter()
                .copied()
                .find(|&d| self.label(d.inverse()) == want)?;
            if f == e.inverse() {
                return None;
            }
            v = self.head(f);
        }
        Some(v)
    }

    /// Free basis of the subgroup read at the base vertex: one word per edge
    /// outside a breadth-first spanning tree.
    pub fn basis(&self) -> Vec<Word> {
        let Some(o) = self.base else {
            return Vec::new();
        };
        let tree = self.bfs_tree(o);
        let in_tree: HashSet<EdgeId> = tree.iter().flatten().map(|d| d.edge()).collect();
        let mut out = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            if in_tree.contains(&k) {
                continue;
            }
            if tree[e.primary].is_none() && e.primary != o {
                continue; // edge outside the base component
            }
            let mut path = self.tree_path(&tree, e.primary);
            path.push(Dart::forward(k));
            let back = self.tree_path(&tree, e.secondary);
            path.extend(back.iter().rev().map(|d| d.inverse()));
            out.push(self.path_word(&path));
        }
        out
    }

    /// Canonical form of a based graph, invariant under relabeling ids and
    /// under shifting all labels at a secondary vertex by a constant.
    pub fn canonical_form(&self) -> Option<CanonicalForm> {
        self.base.map(|o| self.canonical_from(o))
    }

    /// Canonical form ignoring the base: componentwise minimum over all
    /// primary roots, components sorted.
    pub fn unbased_canonical_form(&self) -> Vec<CanonicalForm> {
        let mut forms: Vec<CanonicalForm> = self
            .component_restrictions()
            .into_iter()
            .map(|r| {
                let g = r.graph;
                g.primary_vertices()
                    .map(|v| g.canonical_from(v))
                    .min()
                    .unwrap_or_else(|| g.canonical_from_any())
            })
            .collect();
        forms.sort();
        forms
    }

    fn canonical_from_any(&self) -> CanonicalForm {
        // component without primary vertices: a lone secondary vertex
        CanonicalForm {
            vertices: self.kinds.iter().map(|k| kind_code(*k)).collect(),
            edges: Vec::new(),
        }
    }

    fn canonical_from(&self, root: VertexId) -> CanonicalForm {
        let n = self.kinds.len();
        let mut order = vec![usize::MAX; n];
        let mut offset: Vec<Rational> = vec![Rational::zero(); n];
        let mut visit = vec![root];
        order[root] = 0;
        let mut i = 0;
        while i < visit.len() {
            let v = visit[i];
            i += 1;
            let mut darts: Vec<Dart> = self.adj[v].clone();
            if self.is_primary(v) {
                darts.sort_by(|&a, &b| {
                    self.dart_type(a)
                        .cmp(&self.dart_type(b))
                        .then_with(|| self.label(a).cmp(&self.label(b)))
                });
            } else {
                darts.sort_by_key(|&d| -self.label(d));
            }
            for d in darts {
                let w = self.head(d);
                if order[w] == usize::MAX {
                    order[w] = visit.len();
                    visit.push(w);
                    if !self.is_primary(w) {
                        offset[w] = self.label(d);
                    }
                }
            }
        }
        let vertices = visit.iter().map(|&v| kind_code(self.kinds[v])).collect();
        let mut edges: Vec<(usize, usize, Rational)> = self
            .edges
            .iter()
            .filter(|e| order[e.primary] != usize::MAX)
            .map(|e| {
                (
                    order[e.primary],
                    order[e.secondary],
                    &e.label - &offset[e.secondary],
                )
            })
            .collect();
        edges.sort();
        CanonicalForm { vertices, edges }
    }

    /// Graphviz rendering with deterministic ordering.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        writeln!(s, "graph \"{name}\" {{").unwrap();
        for (v, k) in self.kinds.iter().enumerate() {
            match k {
                VertexKind::Primary => {
                    let extra = if self.base == Some(v) {
                        ", peripheries=2"
                    } else {
                        ""
                    };
                    writeln!(s, "  v{v} [shape=circle, label=\"{v}\"{extra}];").unwrap();
                }
                VertexKind::Secondary(t) => {
                    writeln!(s, "  v{v} [shape=square, label=\"{v}:g{t}\"];").unwrap();
                }
            }
        }
        for e in &self.edges {
            writeln!(
                s,
                "  v{} -- v{} [label=\"{}\"];",
                e.primary, e.secondary, e.label
            )
            .unwrap();
        }
        s.push_str("}\n");
        s
    }
}

fn kind_code(k: VertexKind) -> i64 {
    match k {
        VertexKind::Primary => -1,
        VertexKind::Secondary(t) => t.0 as i64,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    vertices: Vec<i64>,
    edges: Vec<(usize, usize, Rational)>,
}

/// A violated irreducibility property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Two same-type darts leave a primary vertex towards distinct secondaries.
    P1 {
        vertex: VertexId,
        darts: (Dart, Dart),
    },
    /// Two distinct edges into one secondary vertex carry the same label.
    P2 {
        secondary: VertexId,
        edges: (EdgeId, EdgeId),
    },
    MultipleEdge {
        edges: (EdgeId, EdgeId),
    },
    IsolatedVertex(VertexId),
    /// Degree-one vertex that is secondary, or not the single allowed one.
    DegreeOne(VertexId),
}

/// Lists every violation of the irreducibility properties. The lone base
/// vertex of the trivial subgroup is accepted.
pub fn validate(g: &AGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    for v in g.primary_vertices() {
        let mut by_type: BTreeMap<FactorId, Dart> = BTreeMap::new();
        let mut by_secondary: HashMap<VertexId, EdgeId> = HashMap::new();
        for &d in g.darts_at(v) {
            let t = g.dart_type(d);
            match by_type.get(&t) {
                Some(&prev) if g.head(prev) != g.head(d) => out.push(Violation::P1 {
                    vertex: v,
                    darts: (prev, d),
                }),
                Some(_) => {}
                None => {
                    by_type.insert(t, d);
                }
            }
            if let Some(&prev) = by_secondary.get(&g.head(d)) {
                out.push(Violation::MultipleEdge {
                    edges: (prev, d.edge()),
                });
            } else {
                by_secondary.insert(g.head(d), d.edge());
            }
        }
    }
    for s in 0..g.vertex_count() {
        if g.is_primary(s) {
            continue;
        }
        let mut seen: HashMap<Rational, EdgeId> = HashMap::new();
        for &d in g.darts_at(s) {
            let l = g.label(d.inverse());
            if let Some(&prev) = seen.get(&l) {
                out.push(Violation::P2 {
                    secondary: s,
                    edges: (prev, d.edge()),
                });
            } else {
                seen.insert(l, d.edge());
            }
        }
    }
    let trivial = g.vertex_count() == 1 && g.base() == Some(0);
    let mut allowed_leaf_used = false;
    for v in 0..g.vertex_count() {
        match g.degree(v) {
            0 if !trivial => out.push(Violation::IsolatedVertex(v)),
            1 => {
                let ok = g.is_primary(v) && !allowed_leaf_used && g.base().is_none_or(|b| b == v);
                if ok {
                    allowed_leaf_used = true;
                } else {
                    out.push(Violation::DegreeOne(v));
                }
            }
            _ => {}
        }
    }
    out
}
