//! Construction of irreducible based A-graphs by folding.
//!
//! The generators are laid out as a wedge of subdivided loops at the base,
//! then edges are folded until the graph is irreducible. Every fold removes
//! at least one edge and keeps the set of words read along closed paths at
//! the base unchanged.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::agraph::{AGraph, EdgeRec, VertexId, VertexKind};
use crate::error::{Error, Result};
use crate::factor::{FactorElement, FactorId, Rational};
use crate::word::Word;

/// Order in which pending folds are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldOrder {
    /// P2 folds first, then P1, then multiple edges, then pruning; lowest ids first.
    Deterministic,
    /// A pseudo-random pending fold at every step.
    Shuffled(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldStep {
    /// Two equally labeled edges into one secondary vertex were identified.
    MergeEqualLabels,
    /// Two same-type edges at a primary vertex were identified after relabeling.
    MergeSameType,
    /// A vertex of degree at most one was deleted.
    Prune,
}

/// Mutable graph used during folding. Removed edges and vertices leave holes.
#[derive(Debug, Clone)]
pub struct FoldGraph {
    kinds: Vec<Option<VertexKind>>,
    edges: Vec<Option<EdgeRec>>,
    base: VertexId,
}

#[derive(Debug, Clone)]
enum Pending {
    EqualLabels(usize, usize),
    SameType(usize, usize),
    MultipleEdge(usize, usize),
    Leaf(VertexId),
}

impl FoldGraph {
    /// Wedge of loops at the base; syllable `q` of a generator becomes the
    /// segment `p -q- s -0- p'`.
    pub fn wedge(gens: &[Word]) -> FoldGraph {
        let mut g = FoldGraph {
            kinds: vec![Some(VertexKind::Primary)],
            edges: Vec::new(),
            base: 0,
        };
        for w in gens.iter().filter(|w| !w.is_empty()) {
            let mut cur = 0;
            for (i, l) in w.letters().iter().enumerate() {
                let s = g.add_vertex(VertexKind::Secondary(l.factor()));
                let next = if i + 1 == w.len() {
                    0
                } else {
                    g.add_vertex(VertexKind::Primary)
                };
                g.edges.push(Some(EdgeRec {
                    primary: cur,
                    secondary: s,
                    label: l.value().clone(),
                }));
                g.edges.push(Some(EdgeRec {
                    primary: next,
                    secondary: s,
                    label: Rational::zero(),
                }));
                cur = next;
            }
        }
        g
    }

    fn add_vertex(&mut self, k: VertexKind) -> VertexId {
        self.kinds.push(Some(k));
        self.kinds.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().flatten().count()
    }

    fn type_of(&self, e: &EdgeRec) -> FactorId {
        match self.kinds[e.secondary] {
            Some(VertexKind::Secondary(t)) => t,
            _ => unreachable!("edge into a live secondary vertex"),
        }
    }

    fn live_edges(&self) -> impl Iterator<Item = (usize, &EdgeRec)> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(k, e)| e.as_ref().map(|e| (k, e)))
    }

    fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.kinds.len()];
        for (_, e) in self.live_edges() {
            deg[e.primary] += 1;
            deg[e.secondary] += 1;
        }
        deg
    }

    fn pending(&self) -> [Vec<Pending>; 4] {
        let mut by_label: BTreeMap<(VertexId, &Rational), Vec<usize>> = BTreeMap::new();
        let mut by_type: BTreeMap<(VertexId, FactorId), Vec<usize>> = BTreeMap::new();
        let mut by_ends: BTreeMap<(VertexId, VertexId), Vec<usize>> = BTreeMap::new();
        for (k, e) in self.live_edges() {
            by_label.entry((e.secondary, &e.label)).or_default().push(k);
            by_type
                .entry((e.primary, self.type_of(e)))
                .or_default()
                .push(k);
            by_ends.entry((e.primary, e.secondary)).or_default().push(k);
        }
        let p2 = by_label
            .values()
            .filter(|ks| ks.len() > 1)
            .map(|ks| Pending::EqualLabels(ks[0], ks[1]))
            .collect();
        let p1 = by_type
            .values()
            .filter_map(|ks| {
                let s0 = self.edges[ks[0]].as_ref()?.secondary;
                let other = ks
                    .iter()
                    .copied()
                    .find(|&k| self.edges[k].as_ref().unwrap().secondary != s0)?;
                Some(Pending::SameType(ks[0], other))
            })
            .collect();
        let label = |k: usize| &self.edges[k].as_ref().unwrap().label;
        let p3 = by_ends
            .values()
            .filter_map(|ks| {
                let other = ks.iter().copied().find(|&k| label(k) != label(ks[0]))?;
                Some(Pending::MultipleEdge(ks[0], other))
            })
            .collect();
        let deg = self.degrees();
        let leaves = (0..self.kinds.len())
            .filter(|&v| self.kinds[v].is_some() && v != self.base && deg[v] <= 1)
            .map(Pending::Leaf)
            .collect();
        [p2, p1, p3, leaves]
    }

    fn move_vertex(&mut self, from: VertexId, to: VertexId) {
        for e in self.edges.iter_mut().flatten() {
            if e.primary == from {
                e.primary = to;
            }
            if e.secondary == from {
                e.secondary = to;
            }
        }
        self.kinds[from] = None;
    }

    fn keep_of(&self, a: VertexId, b: VertexId) -> (VertexId, VertexId) {
        if a == self.base || (b != self.base && a < b) {
            (a, b)
        } else {
            (b, a)
        }
    }

    fn apply(&mut self, p: Pending) -> Result<FoldStep> {
        match p {
            Pending::EqualLabels(e, f) => {
                let (pe, pf) = (
                    self.edges[e].as_ref().unwrap().primary,
                    self.edges[f].as_ref().unwrap().primary,
                );
                if pe != pf {
                    let (keep, gone) = self.keep_of(pe, pf);
                    self.move_vertex(gone, keep);
                }
                self.edges[e.max(f)] = None;
                Ok(FoldStep::MergeEqualLabels)
            }
            Pending::SameType(e, f) => {
                let ee = self.edges[e].clone().unwrap();
                let ff = self.edges[f].clone().unwrap();
                // merge into the secondary with the smaller id
                let (e, ee, ff) = if ee.secondary > ff.secondary {
                    (e, ee, ff)
                } else {
                    (f, ff, ee)
                };
                let shift = &ff.label - &ee.label;
                for x in self.edges.iter_mut().flatten() {
                    if x.secondary == ee.secondary {
                        x.label += &shift;
                    }
                }
                self.move_vertex(ee.secondary, ff.secondary);
                self.edges[e] = None;
                Ok(FoldStep::MergeSameType)
            }
            Pending::MultipleEdge(e, f) => {
                let ee = self.edges[e].as_ref().unwrap();
                let ff = self.edges[f].as_ref().unwrap();
                let g = FactorElement::new(self.type_of(ee), &ee.label - &ff.label);
                let s = self.path_word_to(ee.primary);
                let witness = Word::from_elements([g]).conjugate_by(&s);
                Err(Error::FactorFreeViolation { witness })
            }
            Pending::Leaf(v) => {
                for slot in self.edges.iter_mut() {
                    if slot
                        .as_ref()
                        .is_some_and(|e| e.primary == v || e.secondary == v)
                    {
                        *slot = None;
                    }
                }
                self.kinds[v] = None;
                Ok(FoldStep::Prune)
            }
        }
    }

    /// Label of some path from the base to `v`.
    fn path_word_to(&self, v: VertexId) -> Word {
        let mut parent: HashMap<VertexId, (VertexId, FactorElement)> = HashMap::new();
        let mut queue = VecDeque::from([self.base]);
        parent.insert(self.base, (self.base, FactorElement::identity(FactorId(0))));
        while let Some(x) = queue.pop_front() {
            if x == v {
                break;
            }
            for (_, e) in self.live_edges() {
                let t = self.type_of(e);
                let step = if e.primary == x {
                    Some((e.secondary, FactorElement::new(t, e.label.clone())))
                } else if e.secondary == x {
                    Some((e.primary, FactorElement::new(t, -&e.label)))
                } else {
                    None
                };
                if let Some((y, el)) = step {
                    if let std::collections::hash_map::Entry::Vacant(slot) = parent.entry(y) {
                        slot.insert((x, el));
                        queue.push_back(y);
                    }
                }
            }
        }
        let mut labels = Vec::new();
        let mut cur = v;
        while cur != self.base {
            let (prev, el) = parent[&cur].clone();
            labels.push(el);
            cur = prev;
        }
        labels.reverse();
        Word::from_elements(labels)
    }

    /// Whether some closed path at the base of length `2|w|` spells `w`
    /// syllable by syllable. Works on graphs that are not yet irreducible.
    pub fn accepts(&self, w: &Word) -> bool {
        let mut current = vec![self.base];
        for l in w.letters() {
            let mut next = Vec::new();
            for &v in &current {
                for (_, e) in self
                    .live_edges()
                    .filter(|(_, e)| e.primary == v && self.type_of(e) == l.factor())
                {
                    let want = &e.label - l.value();
                    for (_, f) in self.live_edges() {
                        if f.secondary == e.secondary
                            && f.label == want
                            && !next.contains(&f.primary)
                        {
                            next.push(f.primary);
                        }
                    }
                }
            }
            current = next;
        }
        current.contains(&self.base)
    }

    /// Compacts into an [`AGraph`], keeping surviving vertices in id order.
    pub fn finish(&self) -> AGraph {
        let mut new_id = vec![usize::MAX; self.kinds.len()];
        let mut kinds = Vec::new();
        for (v, k) in self.kinds.iter().enumerate() {
            if let Some(k) = k {
                new_id[v] = kinds.len();
                kinds.push(*k);
            }
        }
        let edges = self
            .live_edges()
            .map(|(_, e)| EdgeRec {
                primary: new_id[e.primary],
                secondary: new_id[e.secondary],
                label: e.label.clone(),
            })
            .collect();
        AGraph::new(kinds, edges, Some(new_id[self.base]))
    }
}

/// Builds the irreducible based graph of `⟨gens⟩`.
pub fn build_from_generators(gens: &[Word]) -> Result<AGraph> {
    build_with(gens, FoldOrder::Deterministic, |_, _| {})
}

/// Like [`build_from_generators`], calling `observe` after every step.
pub fn build_with<F>(gens: &[Word], order: FoldOrder, mut observe: F) -> Result<AGraph>
where
    F: FnMut(&FoldGraph, FoldStep),
{
    let mut g = FoldGraph::wedge(gens);
    let mut rng = match order {
        FoldOrder::Shuffled(seed) => Some(Pcg64::seed_from_u64(seed)),
        FoldOrder::Deterministic => None,
    };
    loop {
        let classes = g.pending();
        let step = match rng.as_mut() {
            None => classes
                .into_iter()
                .find_map(|mut c| (!c.is_empty()).then(|| c.swap_remove(0))),
            Some(rng) => {
                let mut all: Vec<Pending> = classes.into_iter().flatten().collect();
                (!all.is_empty()).then(|| all.swap_remove(rng.gen_range(0..all.len())))
            }
        };
        let Some(step) = step else { break };
        let kind = g.apply(step)?;
        observe(&g, kind);
    }
    Ok(g.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agraph::validate;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn single_product_is_a_four_cycle() {
        let g = build_from_generators(&[w("g1^1 g2^1")]).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert!(validate(&g).is_empty());
        assert!(g.membership(&w("g1^1 g2^1")));
    }

    #[test]
    fn factor_element_is_rejected() {
        match build_from_generators(&[w("g1^1")]) {
            Err(Error::FactorFreeViolation { witness }) => {
                assert_eq!(witness.len(), 1);
                assert_eq!(witness.letters()[0].factor(), FactorId(0));
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn conjugate_of_factor_is_rejected() {
        let err = build_from_generators(&[w("g1^1 g2^1"), w("g1^1 g2^2 g1^-1")]).unwrap_err();
        let Error::FactorFreeViolation { witness } = err else {
            panic!()
        };
        // the witness is a conjugate of a single factor element
        let (_, core) = witness.cyclic_reduce();
        assert_eq!(core.len(), 1);
        let g = build_from_generators(&[w("g1^1 g2^1")]).unwrap();
        let _ = g;
    }

    #[test]
    fn no_generators_gives_the_trivial_graph() {
        let g = build_from_generators(&[]).unwrap();
        assert_eq!(g, AGraph::trivial());
        let g = build_from_generators(&[Word::empty()]).unwrap();
        assert_eq!(g, AGraph::trivial());
    }

    #[test]
    fn rank_two_example() {
        let g = build_from_generators(&[w("g1^1 g2^1"), w("g2^1 g1^1")]).unwrap();
        assert!(validate(&g).is_empty());
        assert_eq!(g.euler_char(), -1);
        assert_eq!(g.reduced_rank(), 1);
    }

    #[test]
    fn folds_decrease_edges_and_preserve_generators() {
        let gens = [
            w("g1^1 g2^1 g1^2 g2^1"),
            w("g1^1 g2^-1 g1^1 g2^2"),
            w("g2^1 g1^-1 g2^1 g1^3"),
        ];
        let mut last = FoldGraph::wedge(&gens).edge_count();
        build_with(&gens, FoldOrder::Deterministic, |g, step| {
            let now = g.edge_count();
            assert!(now < last, "{step:?} did not remove an edge");
            last = now;
            for v in &gens {
                assert!(g.accepts(v), "lost generator {v} after {step:?}");
            }
        })
        .unwrap();
    }

    #[test]
    fn shuffled_orders_agree_up_to_isomorphism() {
        let gens = [w("g1^1 g2^1 g3^1/2"), w("g1^1 g2^-1"), w("g3^1 g1^-1 g2^1")];
        let reference = build_from_generators(&gens).unwrap().canonical_form();
        for seed in 0..20 {
            let g = build_with(&gens, FoldOrder::Shuffled(seed), |_, _| {}).unwrap();
            assert!(validate(&g).is_empty());
            assert_eq!(g.canonical_form(), reference, "seed {seed}");
        }
    }
}
