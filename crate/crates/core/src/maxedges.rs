//! Maximal edges: certificates, a constructive finder, a bounded search for
//! all certifiable maximal edges, and the good-cut check.
//!
//! An edge `e` leaving a primary vertex `v` is maximal when there are reduced
//! infinite paths `p = e e2 e3 ...` and `q = f1 f2 ...` from `v`, with
//! `q⁻¹p` reduced, `type(e) > type(f1)`, and every even-length prefix of `p`
//! and of `q` spelling an element `≺ 1`. Certificates describe `p` and `q` as
//! eventually periodic rays `spine · cycle^∞`. When the cycle label `C`
//! satisfies `C⁻¹ ≻ₛ 1`, every prefix of `C` is `≺ 1`, so by left invariance
//! only prefixes inside the spine need checking.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::agraph::{AGraph, Dart, EdgeId, Restriction, VertexId};
use crate::positive::{
    compare, is_strongly_positive, strongly_signed_cyclic_permutation, StrongSign,
};
use crate::pullback::PullbackGraph;
use crate::word::Word;
use crate::{Error, Result};

/// Search effort cap for [`find_all_certified`], counted in visited paths.
pub const DEFAULT_NODE_LIMIT: usize = 200_000;

/// The eventually periodic path `spine · cycle^∞`. The cycle starts at a
/// primary vertex and is already aligned: its label inverse is meant to be
/// strongly positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ray {
    pub spine: Vec<Dart>,
    pub cycle: Vec<Dart>,
}

impl Ray {
    pub fn first(&self) -> Dart {
        self.spine
            .first()
            .or(self.cycle.first())
            .copied()
            .expect("ray has a cycle")
    }

    /// The first `n` darts of the infinite path.
    pub fn prefix(&self, n: usize) -> Vec<Dart> {
        let mut out: Vec<Dart> = self.spine.iter().take(n).copied().collect();
        while out.len() < n {
            let k = out.len() - self.spine.len();
            out.push(self.cycle[k % self.cycle.len()]);
        }
        out
    }

    fn map(&self, f: impl Fn(Dart) -> Dart) -> Ray {
        Ray {
            spine: self.spine.iter().map(|&d| f(d)).collect(),
            cycle: self.cycle.iter().map(|&d| f(d)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MaximalEdgeCertificate {
    pub p: Ray,
    pub q: Ray,
}

impl MaximalEdgeCertificate {
    pub fn map(&self, f: impl Fn(Dart) -> Dart + Copy) -> MaximalEdgeCertificate {
        MaximalEdgeCertificate {
            p: self.p.map(f),
            q: self.q.map(f),
        }
    }
}

fn inverse_path(path: &[Dart]) -> Vec<Dart> {
    path.iter().rev().map(|d| d.inverse()).collect()
}

fn check_ray_structure(g: &AGraph, ray: &Ray, side: &str) -> Result<()> {
    let bad = |why: &str| Err(Error::MalformedCertificate(format!("{side}: {why}")));
    if ray.cycle.is_empty() {
        return bad("empty cycle");
    }
    if ray.spine.len() % 2 == 1 || ray.cycle.len() % 2 == 1 {
        return bad("odd length");
    }
    if ray
        .spine
        .iter()
        .chain(&ray.cycle)
        .any(|d| d.edge() >= g.edge_count())
    {
        return bad("unknown edge");
    }
    if g.tail(ray.cycle[0]) != g.head(*ray.cycle.last().unwrap()) {
        return bad("cycle is not closed");
    }
    if !g.is_primary(g.tail(ray.cycle[0])) {
        return bad("cycle does not start at a primary vertex");
    }
    let mut path = ray.spine.clone();
    path.extend_from_slice(&ray.cycle);
    path.extend_from_slice(&ray.cycle);
    if !g.is_reduced_path(&path) {
        return bad("path is not reduced");
    }
    Ok(())
}

fn is_negative(w: &Word) -> Result<bool> {
    Ok(compare(w, &Word::empty())? == Ordering::Less)
}

/// Labels of the even-length prefixes `2, 4, ..., len` of `path`.
fn even_prefix_labels(g: &AGraph, path: &[Dart]) -> Vec<Word> {
    (1..=path.len() / 2)
        .map(|j| g.path_word(&path[..2 * j]))
        .collect()
}

/// Verifies that `cert` witnesses maximality of `e`.
///
/// Structural faults give `MalformedCertificate`; failing order or type
/// conditions give `Ok(false)`.
pub fn check_certificate(g: &AGraph, e: EdgeId, cert: &MaximalEdgeCertificate) -> Result<bool> {
    check_structure(g, e, cert)?;
    let (p1, q1) = (cert.p.first(), cert.q.first());
    if g.dart_type(p1) <= g.dart_type(q1) {
        return Ok(false);
    }
    for ray in [&cert.p, &cert.q] {
        if !is_strongly_positive(&g.path_word(&ray.cycle).invert())? {
            return Ok(false);
        }
    }
    // The finite label set seen from the start vertex: 1 and the even spine
    // prefixes on both sides. It must consist of distinct elements with 1 as
    // its strict maximum.
    let mut labels = vec![Word::empty()];
    for ray in [&cert.p, &cert.q] {
        for w in even_prefix_labels(g, &ray.spine) {
            if !is_negative(&w)? {
                return Ok(false);
            }
            labels.push(w);
        }
    }
    let mut sorted = labels.clone();
    sorted.sort_by(|a, b| compare(a, b).expect("labels lie in the catalog"));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Ok(false);
    }
    Ok(true)
}

fn check_structure(g: &AGraph, e: EdgeId, cert: &MaximalEdgeCertificate) -> Result<()> {
    check_ray_structure(g, &cert.p, "p")?;
    check_ray_structure(g, &cert.q, "q")?;
    let (p1, q1) = (cert.p.first(), cert.q.first());
    if p1 != Dart::forward(e) {
        return Err(Error::MalformedCertificate(
            "p does not start with the edge".into(),
        ));
    }
    if g.tail(p1) != g.tail(q1) || !g.is_primary(g.tail(p1)) {
        return Err(Error::MalformedCertificate(
            "p and q do not start at a common primary vertex".into(),
        ));
    }
    if p1 == q1 {
        return Err(Error::MalformedCertificate("q⁻¹p is not reduced".into()));
    }
    Ok(())
}

/// Checks every even prefix of both rays up to `depth` darts directly,
/// without relying on the alignment of the cycles.
pub fn check_prefixes_to_depth(
    g: &AGraph,
    e: EdgeId,
    cert: &MaximalEdgeCertificate,
    depth: usize,
) -> Result<bool> {
    check_structure(g, e, cert)?;
    if g.dart_type(cert.p.first()) <= g.dart_type(cert.q.first()) {
        return Ok(false);
    }
    for ray in [&cert.p, &cert.q] {
        for w in even_prefix_labels(g, &ray.prefix(depth)) {
            if !is_negative(&w)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The number of darts up to which [`check_certificate`] inspects prefixes.
pub fn required_depth(cert: &MaximalEdgeCertificate) -> usize {
    cert.p.spine.len().max(cert.q.spine.len())
}

fn sorted_darts(g: &AGraph, v: VertexId) -> Vec<Dart> {
    let mut ds = g.darts_at(v).to_vec();
    ds.sort();
    ds
}

/// Shortest reduced path starting with `first` whose last dart satisfies
/// `accept`, by breadth-first search over last darts.
fn shortest_reduced_path(
    g: &AGraph,
    first: Dart,
    accept: impl Fn(Dart) -> bool,
) -> Option<Vec<Dart>> {
    let mut parent: Vec<Option<Dart>> = vec![None; 2 * g.edge_count()];
    let mut seen = vec![false; 2 * g.edge_count()];
    let mut queue = std::collections::VecDeque::from([first]);
    seen[first.0] = true;
    while let Some(d) = queue.pop_front() {
        if accept(d) {
            let mut path = vec![d];
            let mut cur = d;
            while let Some(prev) = parent[cur.0] {
                path.push(prev);
                cur = prev;
            }
            path.reverse();
            return Some(path);
        }
        for next in sorted_darts(g, g.head(d)) {
            if next != d.inverse() && !seen[next.0] {
                seen[next.0] = true;
                parent[next.0] = Some(d);
                queue.push_back(next);
            }
        }
    }
    None
}

/// One ray of the construction: a reduced path from `o` starting with
/// `first` to a vertex of degree > 2, followed by a closed path there whose
/// cycle label inverse is strongly positive.
fn construct_ray(g: &AGraph, first: Dart) -> Ray {
    let t = shortest_reduced_path(g, first, |d| g.degree(g.head(d)) > 2)
        .expect("a core component with negative Euler characteristic has a branch vertex");
    let x = g.head(*t.last().unwrap());
    let back = t.last().unwrap().inverse();
    let d1 = sorted_darts(g, x)
        .into_iter()
        .find(|&d| d != back)
        .expect("degree > 2");
    let r0 = shortest_reduced_path(g, d1, |a| {
        g.head(a) == x && a.inverse() != back && a.inverse() != d1
    })
    .expect("closed reduced paths avoiding a given edge exist in a core");

    let n = r0.len();
    let k0 = usize::from(!g.is_primary(x));
    let r: Vec<Dart> = (0..n).map(|i| r0[(i + k0) % n]).collect();
    let (rho, sign) = strongly_signed_cyclic_permutation(&g.path_word(&r))
        .expect("closed reduced paths spell cyclically reduced words");
    let shift = (k0 + 2 * rho) % n;
    let r_bar: Vec<Dart> = (0..n).map(|i| r0[(i + shift) % n]).collect();
    let (c, c_bar) = match sign {
        StrongSign::StronglyNegative => (r0, r_bar),
        StrongSign::StronglyPositive => (inverse_path(&r0), inverse_path(&r_bar)),
    };
    let a = (0..n)
        .find(|&a| (0..n).all(|i| c[(a + i) % n] == c_bar[i]))
        .expect("aligned cycle is a rotation");
    let mut spine = t;
    spine.extend_from_slice(&c[..a]);
    Ray {
        spine,
        cycle: c_bar,
    }
}

fn first_negative_component(g: &AGraph) -> Result<(Restriction, Restriction)> {
    let core = g.core_restriction();
    let comp = core
        .graph
        .component_restrictions()
        .into_iter()
        .find(|c| c.graph.euler_char() < 0)
        .ok_or(Error::ChiNonNegative)?;
    Ok((core, comp))
}

/// Finds one maximal edge with a certificate, following the existence proof:
/// two rays from a primary vertex are cut at the vertex where the label of
/// the connecting subpath is largest.
pub fn find_one_maximal_edge(g: &AGraph) -> Result<(EdgeId, MaximalEdgeCertificate)> {
    let (core, comp) = first_negative_component(g)?;
    let h = &comp.graph;
    let o = h
        .primary_vertices()
        .next()
        .expect("core components contain primary vertices");
    let darts = sorted_darts(h, o);
    let big_t = construct_ray(h, darts[0]);
    let big_u = construct_ray(h, darts[1]);

    // Candidates: T(1, 2j) for 2j ≤ |spine T| and U(1, 2k) for 0 < 2k ≤ |spine U|.
    let mut best: (Word, bool, usize) = (Word::empty(), true, 0);
    for (is_t, ray) in [(true, &big_t), (false, &big_u)] {
        for (j, w) in even_prefix_labels(h, &ray.spine).into_iter().enumerate() {
            match compare(&w, &best.0)? {
                Ordering::Greater => best = (w, is_t, 2 * (j + 1)),
                Ordering::Equal => {
                    panic!("prefix labels along a reduced biinfinite path must be distinct")
                }
                Ordering::Less => {}
            }
        }
    }
    let (_, on_t, m) = best;
    let (near, far) = if on_t {
        (&big_t, &big_u)
    } else {
        (&big_u, &big_t)
    };
    let forward = Ray {
        spine: near.spine[m..].to_vec(),
        cycle: near.cycle.clone(),
    };
    let mut back = inverse_path(&near.spine[..m]);
    back.extend_from_slice(&far.spine);
    let backward = Ray {
        spine: back,
        cycle: far.cycle.clone(),
    };

    let (p, q) = if h.dart_type(forward.first()) > h.dart_type(backward.first()) {
        (forward, backward)
    } else {
        (backward, forward)
    };
    let cert = MaximalEdgeCertificate { p, q }.map(|d| core.dart_origin(comp.dart_origin(d)));
    Ok((cert.p.first().edge(), cert))
}

/// `true` iff every component of `g` with the edges of `d` removed has
/// Euler characteristic 0.
pub fn is_good_cut(g: &AGraph, d: &BTreeSet<EdgeId>) -> bool {
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| !d.contains(i))
        .map(|(_, e)| e.clone())
        .collect();
    let cut = AGraph::new(g.kinds().to_vec(), edges, None);
    cut.components().into_iter().all(|comp| {
        let mut keep = vec![false; cut.vertex_count()];
        for v in comp {
            keep[v] = true;
        }
        cut.restrict(&keep).graph.euler_char() == 0
    })
}

#[derive(Debug, Clone)]
pub struct CertifiedSet {
    pub edges: BTreeMap<EdgeId, MaximalEdgeCertificate>,
    /// The bounded search ran to the end without hitting the node limit.
    pub exhausted: bool,
    /// `exhausted`, `|edges| = −χ(g)` and the edges form a good cut.
    pub complete: bool,
}

pub fn default_budget(g: &AGraph) -> usize {
    2 * g.edge_count()
}

struct Search<'a> {
    g: &'a AGraph,
    budget: usize,
    nodes: usize,
    limit: usize,
    aborted: bool,
    cycles: BTreeMap<VertexId, Vec<Vec<Dart>>>,
}

impl Search<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
        }
        !self.aborted
    }

    /// Simple cycles at `v` of length at most the budget whose label inverse
    /// is strongly positive.
    fn aligned_cycles(&mut self, v: VertexId) -> Vec<Vec<Dart>> {
        if let Some(c) = self.cycles.get(&v) {
            return c.clone();
        }
        let g = self.g;
        let mut found = Vec::new();
        let mut on_path = vec![false; g.vertex_count()];
        on_path[v] = true;
        let mut path: Vec<Dart> = Vec::new();
        let mut stack: Vec<(VertexId, usize)> = vec![(v, 0)];
        while let Some(&mut (u, ref mut i)) = stack.last_mut() {
            let darts = sorted_darts(g, u);
            if *i >= darts.len() || path.len() >= self.budget || !self.tick() {
                stack.pop();
                if let Some(d) = path.pop() {
                    if g.head(d) != v {
                        on_path[g.head(d)] = false;
                    }
                }
                continue;
            }
            let d = darts[*i];
            *i += 1;
            if path.last().is_some_and(|&l| l == d.inverse()) {
                continue;
            }
            let w = g.head(d);
            if w == v {
                let mut c = path.clone();
                c.push(d);
                if c.len() > 2 && is_strongly_positive(&g.path_word(&c).invert()).unwrap_or(false) {
                    found.push(c);
                }
                continue;
            }
            if on_path[w] {
                continue;
            }
            on_path[w] = true;
            path.push(d);
            stack.push((w, 0));
        }
        if !self.aborted {
            self.cycles.insert(v, found.clone());
        }
        found
    }

    fn attach_cycle(&mut self, spine: &[Dart], first: Dart) -> Option<Ray> {
        let v = spine.last().map_or(self.g.tail(first), |&d| self.g.head(d));
        let cycles = self.aligned_cycles(v);
        cycles
            .into_iter()
            .find(|c| match spine.last() {
                Some(&l) => c[0] != l.inverse(),
                None => c[0] == first,
            })
            .map(|cycle| Ray {
                spine: spine.to_vec(),
                cycle,
            })
    }

    /// A certified ray starting with `first`, by depth-first search over
    /// spines with every even prefix negative.
    fn good_ray(&mut self, first: Dart) -> Option<Ray> {
        if let Some(r) = self.attach_cycle(&[], first) {
            return Some(r);
        }
        let g = self.g;
        let mut path = vec![first];
        let mut stack: Vec<usize> = vec![0];
        loop {
            if self.aborted {
                return None;
            }
            let i = stack.last_mut()?;
            if *i == 0 && path.len() % 2 == 0 {
                // Fresh node at a primary vertex.
                let ok = self.tick() && is_negative(&g.path_word(&path)).unwrap_or(false);
                if !ok {
                    stack.pop();
                    path.pop();
                    continue;
                }
                if let Some(r) = self.attach_cycle(&path, first) {
                    return Some(r);
                }
            }
            let i = stack.last_mut().unwrap();
            let darts = sorted_darts(g, g.head(*path.last().unwrap()));
            if *i >= darts.len() || path.len() >= self.budget {
                stack.pop();
                path.pop();
                if path.is_empty() {
                    return None;
                }
                continue;
            }
            let d = darts[*i];
            *i += 1;
            if d == path.last().unwrap().inverse() {
                continue;
            }
            path.push(d);
            stack.push(0);
        }
    }
}

/// Certifies maximal edges with spines and simple cycles of at most `budget`
/// darts each. Sound: every returned edge carries a certificate accepted by
/// [`check_certificate`].
pub fn find_all_certified(g: &AGraph, budget: usize) -> CertifiedSet {
    find_all_certified_with_limit(g, budget, DEFAULT_NODE_LIMIT)
}

pub fn find_all_certified_with_limit(g: &AGraph, budget: usize, node_limit: usize) -> CertifiedSet {
    let mut search = Search {
        g,
        budget,
        nodes: 0,
        limit: node_limit,
        aborted: false,
        cycles: BTreeMap::new(),
    };
    let mut edges = BTreeMap::new();
    for v in g.primary_vertices() {
        let mut darts = sorted_darts(g, v);
        darts.sort_by_key(|&d| g.dart_type(d));
        let mut lower: Option<Ray> = None;
        for d in darts {
            let Some(ray) = search.good_ray(d) else {
                continue;
            };
            if let Some(q) = &lower {
                let cert = MaximalEdgeCertificate {
                    p: ray.clone(),
                    q: q.clone(),
                };
                if check_certificate(g, d.edge(), &cert) == Ok(true) {
                    edges.insert(d.edge(), cert);
                }
            }
            if lower.is_none() {
                lower = Some(ray);
            }
        }
    }
    let exhausted = !search.aborted;
    let cut: BTreeSet<EdgeId> = edges.keys().copied().collect();
    let complete = exhausted && edges.len() as i64 == -g.euler_char() && is_good_cut(g, &cut);
    CertifiedSet {
        edges,
        exhausted,
        complete,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Consistent,
    Inconclusive,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchSummary {
    pub certified: usize,
    pub neg_chi: i64,
    pub exhausted: bool,
    pub complete: bool,
}

impl SearchSummary {
    fn of(g: &AGraph, s: &CertifiedSet) -> SearchSummary {
        SearchSummary {
            certified: s.edges.len(),
            neg_chi: -g.euler_char(),
            exhausted: s.exhausted,
            complete: s.complete,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeCountReport {
    pub pullback: SearchSummary,
    /// Searches on the cores of the two inputs.
    pub inputs: [SearchSummary; 2],
    /// `|τ_i(D)|` for the certified set `D` of the pullback.
    pub images: [usize; 2],
    /// Every transported certificate was accepted on the input graph.
    pub transported: bool,
    /// `τ_i(D) ⊆ D_i` for the certified sets.
    pub images_certified: [bool; 2],
    pub status: BoundStatus,
}

/// Runs the edge-counting argument `|D| ≤ |τ1(D)|·|τ2(D)| ≤ |D1|·|D2|` on
/// certified sets. `budget = None` uses [`default_budget`] per graph.
pub fn verify_edge_count_bound(
    p: &PullbackGraph,
    g1: &AGraph,
    g2: &AGraph,
    budget: Option<usize>,
) -> EdgeCountReport {
    let run = |g: &AGraph| find_all_certified(g, budget.unwrap_or_else(|| default_budget(g)));
    // Maximal edges of an input graph lie in its core; searching the core
    // also keeps hanging trees from spoiling the good-cut check.
    let run_core = |g: &AGraph| {
        let r = g.core_restriction();
        let found = run(&r.graph);
        let edges = found
            .edges
            .iter()
            .map(|(&e, cert)| (r.edge_origin[e], cert.map(|x| r.dart_origin(x))))
            .collect();
        (CertifiedSet { edges, ..found }, -r.graph.euler_char())
    };
    let d = run(&p.graph);
    let inputs = [g1, g2];
    let (c1, c2) = (run_core(g1), run_core(g2));
    let neg_chi = [c1.1, c2.1];
    let di = [c1.0, c2.0];
    let mut transported = true;
    let mut images = [0; 2];
    let mut images_certified = [true; 2];
    for i in 0..2 {
        let mut image = BTreeSet::new();
        for (&e, cert) in &d.edges {
            let te = p.proj[i].edge[e];
            let moved = cert.map(|x| p.proj[i].dart(x));
            transported &= check_certificate(inputs[i], te, &moved) == Ok(true);
            image.insert(te);
        }
        images[i] = image.len();
        images_certified[i] = image.iter().all(|e| di[i].edges.contains_key(e));
    }
    let all_complete = d.complete && di.iter().all(|s| s.complete);
    let count = d.edges.len();
    let mut violation = !transported || count as i64 > -p.graph.euler_char();
    if all_complete {
        violation |= !images_certified.iter().all(|&b| b)
            || count > images[0] * images[1]
            || images[0] * images[1] > di[0].edges.len() * di[1].edges.len();
    }
    let status = if violation {
        BoundStatus::Violation
    } else if all_complete {
        BoundStatus::Consistent
    } else {
        BoundStatus::Inconclusive
    };
    EdgeCountReport {
        pullback: SearchSummary::of(&p.graph, &d),
        inputs: [0, 1].map(|i| SearchSummary {
            certified: di[i].edges.len(),
            neg_chi: neg_chi[i],
            exhausted: di[i].exhausted,
            complete: di[i].complete,
        }),
        images,
        transported,
        images_certified,
        status,
    }
}
