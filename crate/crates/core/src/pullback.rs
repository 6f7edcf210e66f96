//! Pullbacks of A-graphs: intersections of conjugates of two subgroups.
//!
//! Primary vertices of the product are pairs of primary vertices. Two pairs
//! `v`, `w` share a type-α secondary vertex when their type-α edges end at
//! the same secondary vertices on both sides and
//! `λ(e1) − λ(f1) = λ(e2) − λ(f2)`. All factors are abelian, so this is
//! equality of the key `(s1, s2, λ(e1) − λ(e2))` and classes are built by
//! hashing.

use std::collections::HashMap;

use serde::Serialize;

use crate::agraph::{AGraph, Dart, EdgeId, EdgeRec, Restriction, VertexId, VertexKind};
use crate::factor::Rational;
use crate::word::Word;

/// A graph map into one of the two input graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub vertex: Vec<VertexId>,
    pub edge: Vec<EdgeId>,
}

impl Projection {
    pub fn dart(&self, d: Dart) -> Dart {
        let e = self.edge[d.edge()];
        if d.is_forward() {
            Dart::forward(e)
        } else {
            Dart::backward(e)
        }
    }

    fn restrict(&self, r: &Restriction) -> Projection {
        Projection {
            vertex: r.vertex_origin.iter().map(|&v| self.vertex[v]).collect(),
            edge: r.edge_origin.iter().map(|&e| self.edge[e]).collect(),
        }
    }
}

/// The cored pullback together with its projections onto both inputs.
#[derive(Debug, Clone)]
pub struct PullbackGraph {
    pub graph: AGraph,
    pub proj: [Projection; 2],
}

struct Product {
    graph: AGraph,
    proj: [Projection; 2],
    base: Option<VertexId>,
}

fn product(g1: &AGraph, g2: &AGraph) -> Product {
    let p1: Vec<VertexId> = g1.primary_vertices().collect();
    let p2: Vec<VertexId> = g2.primary_vertices().collect();
    let mut kinds = Vec::new();
    let mut pv = [Vec::new(), Vec::new()];
    let mut base = None;
    for &a in &p1 {
        for &b in &p2 {
            if Some(a) == g1.base() && Some(b) == g2.base() {
                base = Some(kinds.len());
            }
            kinds.push(VertexKind::Primary);
            pv[0].push(a);
            pv[1].push(b);
        }
    }
    let mut classes: HashMap<(VertexId, VertexId, Rational), VertexId> = HashMap::new();
    let mut edges = Vec::new();
    let mut pe = [Vec::new(), Vec::new()];
    for pair in 0..kinds.len() {
        let (a, b) = (pv[0][pair], pv[1][pair]);
        for &d1 in g1.darts_at(a) {
            let t = g1.dart_type(d1);
            let Some(&d2) = g2.darts_at(b).iter().find(|&&d| g2.dart_type(d) == t) else {
                continue;
            };
            let (s1, s2) = (g1.head(d1), g2.head(d2));
            let key = (s1, s2, g1.label(d1) - g2.label(d2));
            let s = *classes.entry(key).or_insert_with(|| {
                kinds.push(VertexKind::Secondary(t));
                pv[0].push(s1);
                pv[1].push(s2);
                kinds.len() - 1
            });
            edges.push(EdgeRec {
                primary: pair,
                secondary: s,
                label: g1.label(d1),
            });
            pe[0].push(d1.edge());
            pe[1].push(d2.edge());
        }
    }
    let [v1, v2] = pv;
    let [e1, e2] = pe;
    Product {
        graph: AGraph::new(kinds, edges, base),
        proj: [
            Projection {
                vertex: v1,
                edge: e1,
            },
            Projection {
                vertex: v2,
                edge: e2,
            },
        ],
        base,
    }
}

/// The core of the pullback of two irreducible graphs.
pub fn pullback(g1: &AGraph, g2: &AGraph) -> PullbackGraph {
    let prod = product(g1, g2);
    let r = prod.graph.core_restriction();
    PullbackGraph {
        proj: [prod.proj[0].restrict(&r), prod.proj[1].restrict(&r)],
        graph: r.graph,
    }
}

/// The based graph of `H1 ∩ H2`: the component of the product containing
/// the pair of base vertices, with hanging trees pruned.
pub fn intersection_with_base(g1: &AGraph, g2: &AGraph) -> AGraph {
    let prod = product(g1, g2);
    let base = prod.base.expect("both graphs must be based");
    let comp = prod
        .graph
        .components()
        .into_iter()
        .find(|c| c.binary_search(&base).is_ok())
        .expect("base lies in some component");
    let mut keep = vec![false; prod.graph.vertex_count()];
    for v in comp {
        keep[v] = true;
    }
    let r = prod.graph.restrict(&keep);
    let g = r.graph;
    let b = g.base();
    g.restrict(&g.prune_keep(b)).graph
}

#[derive(Debug, Clone)]
pub struct Component {
    pub graph: AGraph,
    /// `r̄(H1 ∩ sH2s⁻¹) = −χ`.
    pub rank: u64,
    /// A double coset representative `s`.
    pub representative: Word,
    /// Vertex ids of the component inside the pullback graph.
    pub vertices: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub rank: u64,
    pub representative: String,
    pub vertices: usize,
    pub edges: usize,
}

impl Component {
    pub fn summary(&self) -> ComponentSummary {
        ComponentSummary {
            rank: self.rank,
            representative: self.representative.to_string(),
            vertices: self.graph.vertex_count(),
            edges: self.graph.edge_count(),
        }
    }
}

impl PullbackGraph {
    /// `Σ r̄(H1 ∩ sH2s⁻¹) = −χ(Ψ(H1, H2))`.
    pub fn total_rank(&self) -> u64 {
        (-self.graph.euler_char()).max(0) as u64
    }

    /// Connected components with ranks and double coset representatives.
    ///
    /// For a primary vertex `w = (w1, w2)` of a component the representative
    /// is `φ(q(w1)) φ(q(w2))⁻¹`, where `q(wi)` is the breadth-first tree path
    /// from the base of input `i`.
    pub fn components(&self, g1: &AGraph, g2: &AGraph) -> Vec<Component> {
        let trees = [
            g1.bfs_tree(g1.base().expect("based input")),
            g2.bfs_tree(g2.base().expect("based input")),
        ];
        let inputs = [g1, g2];
        self.graph
            .components()
            .into_iter()
            .map(|vertices| {
                let w = *vertices
                    .iter()
                    .find(|&&v| self.graph.is_primary(v))
                    .expect("core components have primaries");
                let words: Vec<Word> = (0..2)
                    .map(|i| {
                        let g = inputs[i];
                        g.path_word(&g.tree_path(&trees[i], self.proj[i].vertex[w]))
                    })
                    .collect();
                let mut keep = vec![false; self.graph.vertex_count()];
                for &v in &vertices {
                    keep[v] = true;
                }
                let graph = self.graph.restrict(&keep).graph;
                Component {
                    rank: graph.reduced_rank(),
                    representative: words[0].multiply(&words[1].invert()),
                    graph,
                    vertices,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Theorem1Report {
    pub rank1: u64,
    pub rank2: u64,
    pub rank_pair: u64,
    pub holds: bool,
}

/// Checks `r̄(H1, H2) ≤ r̄(H1)·r̄(H2)` with exact integers.
pub fn verify_theorem1(g1: &AGraph, g2: &AGraph) -> Theorem1Report {
    let (rank1, rank2) = (g1.reduced_rank(), g2.reduced_rank());
    let rank_pair = pullback(g1, g2).total_rank();
    Theorem1Report {
        rank1,
        rank2,
        rank_pair,
        holds: rank_pair <= rank1 * rank2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agraph::validate;
    use crate::fold::build_from_generators;

    fn build(gens: &[&str]) -> AGraph {
        let ws: Vec<Word> = gens.iter().map(|s| s.parse().unwrap()).collect();
        build_from_generators(&ws).unwrap()
    }

    #[test]
    fn self_pullback_of_cyclic_subgroup() {
        let g = build(&["g1^1 g2^1"]);
        let p = pullback(&g, &g);
        assert!(validate(&p.graph).is_empty());
        let comps = p.components(&g, &g);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].rank, 0);
        assert_eq!(comps[0].graph.euler_char(), 0);
        assert_eq!(p.total_rank(), 0);
    }

    #[test]
    fn self_pullback_of_rank_two_subgroup() {
        let g = build(&["g1^1 g2^1", "g2^1 g1^1"]);
        let p = pullback(&g, &g);
        assert!(validate(&p.graph).is_empty());
        assert_eq!(p.total_rank(), 1);
        let report = verify_theorem1(&g, &g);
        assert_eq!(
            report,
            Theorem1Report {
                rank1: 1,
                rank2: 1,
                rank_pair: 1,
                holds: true
            }
        );
    }

    #[test]
    fn trivial_second_subgroup() {
        let g = build(&["g1^1 g2^1"]);
        let p = pullback(&g, &AGraph::trivial());
        assert_eq!(p.graph.vertex_count(), 0);
        assert!(p.components(&g, &AGraph::trivial()).is_empty());
    }

    #[test]
    fn intersection_examples() {
        let ab = build(&["g1^1 g2^1"]);
        let ba = build(&["g2^1 g1^1"]);
        let both = build(&["g1^1 g2^1", "g2^1 g1^1"]);

        let same = intersection_with_base(&ab, &ab);
        assert_eq!(same.canonical_form(), ab.canonical_form());

        let none = intersection_with_base(&ab, &ba);
        assert_eq!(none.vertex_count(), 1);
        assert_eq!(none.reduced_rank(), 0);
        assert!(!none.membership(&"g1^1 g2^1".parse().unwrap()));

        let meet = intersection_with_base(&both, &ab);
        assert!(validate(&meet).is_empty());
        assert_eq!(meet.canonical_form(), ab.canonical_form());
    }

    #[test]
    fn theorem1_on_cyclic_inputs() {
        let g = build(&["g1^1 g2^1"]);
        assert_eq!(
            verify_theorem1(&g, &g),
            Theorem1Report {
                rank1: 0,
                rank2: 0,
                rank_pair: 0,
                holds: true
            }
        );
    }

    #[test]
    fn projections_are_label_preserving() {
        let g1 = build(&["g1^1 g2^1 g1^2 g2^1", "g1^1 g2^-1 g1^1 g2^2"]);
        let g2 = build(&["g1^1 g2^1", "g2^1 g1^3 g2^-1 g1^1"]);
        let p = pullback(&g1, &g2);
        let inputs = [&g1, &g2];
        for d in p.graph.darts() {
            for i in 0..2 {
                let img = p.proj[i].dart(d);
                let g = inputs[i];
                assert_eq!(g.tail(img), p.proj[i].vertex[p.graph.tail(d)]);
                assert_eq!(g.head(img), p.proj[i].vertex[p.graph.head(d)]);
                assert_eq!(g.dart_type(img), p.graph.dart_type(d));
            }
        }
    }
}
