//! Classical Stallings graphs over a free group `F(x1, ..., xm)`, kept apart
//! from the A-graph code so that the two can cross-check each other, and the
//! embedding `μ : x_i ↦ a^i b^i a^-i b^-i` of `F` into `Z ∗ Z`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::agraph::AGraph;
use crate::factor::{FactorId, FactorKind};
use crate::fold::build_from_generators;
use crate::pullback::pullback;
use crate::word::{Letter, Word};
use crate::{Error, Result};

/// A freely reduced word; generators are numbered from 1 and exponents are ±1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FreeWord {
    letters: Vec<(u32, i8)>,
}

impl FreeWord {
    pub fn new<I: IntoIterator<Item = (u32, i8)>>(raw: I) -> FreeWord {
        let mut letters: Vec<(u32, i8)> = Vec::new();
        for (g, e) in raw {
            assert!(
                g >= 1 && (e == 1 || e == -1),
                "letters are x_i^±1 with i ≥ 1"
            );
            if letters.last() == Some(&(g, -e)) {
                letters.pop();
            } else {
                letters.push((g, e));
            }
        }
        FreeWord { letters }
    }

    pub fn letters(&self) -> &[(u32, i8)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn multiply(&self, other: &FreeWord) -> FreeWord {
        FreeWord::new(self.letters.iter().chain(&other.letters).copied())
    }

    pub fn invert(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn max_generator(&self) -> u32 {
        self.letters.iter().map(|l| l.0).max().unwrap_or(0)
    }

    /// Parses `x1 x2^-1 x1^3`; `1` or an empty string is the identity.
    pub fn parse(s: &str) -> Result<FreeWord> {
        let mut raw = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let bad = || Error::Parse(format!("bad free-group token `{tok}`"));
            let body = tok.strip_prefix('x').ok_or_else(bad)?;
            let (g, k) = match body.split_once('^') {
                Some((g, k)) => (g, k.parse::<i64>().map_err(|_| bad())?),
                None => (body, 1),
            };
            let g: u32 = g.parse().map_err(|_| bad())?;
            if g == 0 || k == 0 {
                return Err(bad());
            }
            let e = if k > 0 { 1 } else { -1 };
            raw.extend(std::iter::repeat_n((g, e), k.unsigned_abs() as usize));
        }
        Ok(FreeWord::new(raw))
    }

    /// Reads a word over Z-factors as a free word, `g_i^k ↦ x_i^k`.
    pub fn from_z_word(w: &Word) -> Option<FreeWord> {
        let mut raw = Vec::new();
        for l in w.letters() {
            if !l.value().is_integer() {
                return None;
            }
            let k: i64 = l.value().to_integer().try_into().ok()?;
            let e = if k > 0 { 1 } else { -1 };
            raw.extend(std::iter::repeat_n(
                (l.factor().0 + 1, e),
                k.unsigned_abs() as usize,
            ));
        }
        Some(FreeWord::new(raw))
    }
}

impl FromStr for FreeWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<FreeWord> {
        FreeWord::parse(s)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, (g, e)) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if *e == 1 {
                write!(f, "x{g}")?;
            } else {
                write!(f, "x{g}^-1")?;
            }
        }
        Ok(())
    }
}

/// A folded, trimmed Stallings graph. Edge `(u, i, v)` reads `x_i` from `u`
/// to `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StallingsAutomaton {
    pub vertex_count: usize,
    pub edges: Vec<(usize, u32, usize)>,
    pub base: Option<usize>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        self.0[hi] = lo;
        true
    }
}

impl StallingsAutomaton {
    /// Folds a wedge of generator loops at vertex 0 and trims hanging trees.
    pub fn build(gens: &[FreeWord]) -> StallingsAutomaton {
        let mut n = 1;
        let mut edges = Vec::new();
        for w in gens.iter().filter(|w| !w.is_empty()) {
            let mut cur = 0;
            for (i, &(g, e)) in w.letters.iter().enumerate() {
                let next = if i + 1 == w.len() {
                    0
                } else {
                    n += 1;
                    n - 1
                };
                if e == 1 {
                    edges.push((cur, g, next));
                } else {
                    edges.push((next, g, cur));
                }
                cur = next;
            }
        }
        let mut uf = UnionFind((0..n).collect());
        loop {
            let mut changed = false;
            let mut out: HashMap<(usize, u32), usize> = HashMap::new();
            let mut inc: HashMap<(usize, u32), usize> = HashMap::new();
            for &(u, g, v) in &edges {
                let (u, v) = (uf.find(u), uf.find(v));
                if let Some(&w) = out.get(&(u, g)) {
                    changed |= uf.union(v, w);
                } else {
                    out.insert((u, g), v);
                }
                let (u, v) = (uf.find(u), uf.find(v));
                if let Some(&w) = inc.get(&(v, g)) {
                    changed |= uf.union(u, w);
                } else {
                    inc.insert((v, g), u);
                }
            }
            if !changed {
                break;
            }
        }
        let mut folded: Vec<(usize, u32, usize)> = edges
            .iter()
            .map(|&(u, g, v)| (uf.find(u), g, uf.find(v)))
            .collect();
        folded.sort_unstable();
        folded.dedup();
        let alive: Vec<bool> = (0..n).map(|v| uf.find(v) == v).collect();
        StallingsAutomaton::compact(alive, folded, Some(0)).trimmed()
    }

    fn compact(
        alive: Vec<bool>,
        edges: Vec<(usize, u32, usize)>,
        base: Option<usize>,
    ) -> StallingsAutomaton {
        let mut id = vec![usize::MAX; alive.len()];
        let mut n = 0;
        for (v, &a) in alive.iter().enumerate() {
            if a {
                id[v] = n;
                n += 1;
            }
        }
        StallingsAutomaton {
            vertex_count: n,
            edges: edges
                .into_iter()
                .filter(|&(u, _, v)| alive[u] && alive[v])
                .map(|(u, g, v)| (id[u], g, id[v]))
                .collect(),
            base: base.filter(|&b| alive[b]).map(|b| id[b]),
        }
    }

    /// Removes vertices of degree at most one, except the base.
    fn trimmed(self) -> StallingsAutomaton {
        let mut alive = vec![true; self.vertex_count];
        let mut degree = vec![0usize; self.vertex_count];
        for &(u, _, v) in &self.edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        while let Some(v) =
            (0..self.vertex_count).find(|&v| alive[v] && degree[v] <= 1 && Some(v) != self.base)
        {
            alive[v] = false;
            for &(a, _, b) in &self.edges {
                if alive[a] && b == v || alive[b] && a == v {
                    let other = if a == v { b } else { a };
                    degree[other] -= 1;
                }
            }
        }
        StallingsAutomaton::compact(alive, self.edges, self.base)
    }

    /// Rank of the subgroup, `E − V + 1`.
    pub fn rank(&self) -> u64 {
        (self.edges.len() + 1 - self.vertex_count) as u64
    }

    /// `max(rank − 1, 0)`.
    pub fn reduced_rank(&self) -> u64 {
        self.rank().saturating_sub(1)
    }

    pub fn accepts(&self, w: &FreeWord) -> bool {
        let Some(mut cur) = self.base else {
            return w.is_empty();
        };
        for &(g, e) in &w.letters {
            let next = self.edges.iter().find_map(|&(u, h, v)| match (h == g, e) {
                (true, 1) if u == cur => Some(v),
                (true, -1) if v == cur => Some(u),
                _ => None,
            });
            match next {
                Some(v) => cur = v,
                None => return false,
            }
        }
        Some(cur) == self.base
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeComponent {
    pub vertex_count: usize,
    pub edge_count: usize,
    /// `−χ` of the component.
    pub reduced_rank: u64,
}

/// Components of the core of the product of two Stallings graphs.
pub fn stallings_pullback(x1: &StallingsAutomaton, x2: &StallingsAutomaton) -> Vec<FreeComponent> {
    let n2 = x2.vertex_count;
    let n = x1.vertex_count * n2;
    let mut edges = Vec::new();
    for &(u1, g, v1) in &x1.edges {
        for &(u2, h, v2) in &x2.edges {
            if g == h {
                edges.push((u1 * n2 + u2, g, v1 * n2 + v2));
            }
        }
    }
    let core = StallingsAutomaton {
        vertex_count: n,
        edges,
        base: None,
    }
    .trimmed();
    let mut uf = UnionFind((0..core.vertex_count).collect());
    for &(u, _, v) in &core.edges {
        uf.union(u, v);
    }
    let mut comps: std::collections::BTreeMap<usize, (usize, usize)> = Default::default();
    for v in 0..core.vertex_count {
        comps.entry(uf.find(v)).or_default().0 += 1;
    }
    for &(u, _, _) in &core.edges {
        comps.get_mut(&uf.find(u)).unwrap().1 += 1;
    }
    comps
        .into_values()
        .map(|(v, e)| FreeComponent {
            vertex_count: v,
            edge_count: e,
            reduced_rank: (e - v) as u64,
        })
        .collect()
}

/// `Σ r̄(H1 ∩ sH2s⁻¹)` over double cosets, computed classically.
pub fn stallings_total_rank(h1: &[FreeWord], h2: &[FreeWord]) -> u64 {
    let (x1, x2) = (StallingsAutomaton::build(h1), StallingsAutomaton::build(h2));
    stallings_pullback(&x1, &x2)
        .iter()
        .map(|c| c.reduced_rank)
        .sum()
}

/// The factors `a = g1`, `b = g2` of the target of [`mu_embed`].
pub fn mu_factors() -> Vec<FactorKind> {
    vec![FactorKind::Z, FactorKind::Z]
}

/// `x_i ↦ a^i b^i a^-i b^-i` over the factors `a = g1`, `b = g2`.
pub fn mu_embed(w: &FreeWord) -> Word {
    let (a, b) = (FactorId(0), FactorId(1));
    let mut raw = Vec::new();
    for &(g, e) in &w.letters {
        let i = i64::from(g);
        let mut block = vec![(a, i), (b, i), (a, -i), (b, -i)];
        if e == -1 {
            block = block.into_iter().rev().map(|(f, k)| (f, -k)).collect();
        }
        raw.extend(block.into_iter().map(|(f, k)| Letter::int(f.0, k)));
    }
    Word::normalize(raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShncReport {
    /// Free-group side.
    pub a: u64,
    /// Product side, after the embedding.
    pub b: u64,
    pub rank1: u64,
    pub rank2: u64,
    pub bound: u64,
    pub holds: bool,
}

/// Checks `A ≤ B ≤ r̄(H1)·r̄(H2)`. A factor-freeness failure of a μ-image is
/// returned as an error.
pub fn verify_shnc(h1: &[FreeWord], h2: &[FreeWord]) -> Result<ShncReport> {
    let (x1, x2) = (StallingsAutomaton::build(h1), StallingsAutomaton::build(h2));
    let a = stallings_pullback(&x1, &x2)
        .iter()
        .map(|c| c.reduced_rank)
        .sum();
    let embed = |h: &[FreeWord]| -> Result<AGraph> {
        let ws: Vec<Word> = h.iter().map(mu_embed).collect();
        build_from_generators(&ws)
    };
    let (g1, g2) = (embed(h1)?, embed(h2)?);
    let b = pullback(&g1, &g2).total_rank();
    let (rank1, rank2) = (x1.reduced_rank(), x2.reduced_rank());
    debug_assert_eq!((rank1, rank2), (g1.reduced_rank(), g2.reduced_rank()));
    let bound = rank1 * rank2;
    Ok(ShncReport {
        a,
        b,
        rank1,
        rank2,
        bound,
        holds: a <= b && b <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fw(s: &str) -> FreeWord {
        s.parse().unwrap()
    }

    fn gens(ss: &[&str]) -> Vec<FreeWord> {
        ss.iter().map(|s| fw(s)).collect()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(fw("x1 x2^-1 x2 x1").to_string(), "x1 x1");
        assert_eq!(fw("x1^2").to_string(), "x1 x1");
        assert_eq!(fw("1"), FreeWord::default());
        assert!(FreeWord::parse("y1").is_err());
        assert!(FreeWord::parse("x0").is_err());
        assert!(FreeWord::parse("x1^0").is_err());
    }

    #[test]
    fn stallings_examples() {
        let x = StallingsAutomaton::build(&gens(&["x1"]));
        assert_eq!((x.vertex_count, x.edges.len(), x.reduced_rank()), (1, 1, 0));
        assert_eq!(stallings_total_rank(&gens(&["x1"]), &gens(&["x1"])), 0);

        let h = gens(&["x1 x1", "x2 x2", "x1 x2"]);
        let g = StallingsAutomaton::build(&h);
        assert_eq!((g.vertex_count, g.rank()), (2, 3));
        let comps = stallings_pullback(&g, &g);
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.reduced_rank == 2));

        assert!(stallings_pullback(&x, &StallingsAutomaton::build(&gens(&["x2"]))).is_empty());
    }

    #[test]
    fn folding_identifies_redundant_generators() {
        let g = StallingsAutomaton::build(&gens(&["x1 x2", "x1 x2 x1 x2", "x2^-1 x1^-1"]));
        assert_eq!((g.vertex_count, g.rank()), (2, 1));
        assert!(g.accepts(&fw("x1 x2 x1 x2 x1 x2")));
        assert!(!g.accepts(&fw("x1")));
        // A generator with a hanging tail folds back to the base.
        let t = StallingsAutomaton::build(&gens(&["x1 x2 x1^-1", "x1"]));
        assert_eq!(t.rank(), 2);
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu_embed(&fw("x1")).to_string(), "g1^1 g2^1 g1^-1 g2^-1");
        assert_eq!(mu_embed(&fw("x2")).to_string(), "g1^2 g2^2 g1^-2 g2^-2");
        assert!(mu_embed(&FreeWord::default()).is_empty());
    }

    #[test]
    fn shnc_examples() {
        let h = gens(&["x1 x1", "x2 x2", "x1 x2"]);
        let r = verify_shnc(&h, &h).unwrap();
        assert_eq!((r.a, r.b, r.bound), (4, 4, 4));
        assert!(r.holds);
        let r = verify_shnc(&gens(&["x1"]), &gens(&["x2"])).unwrap();
        assert_eq!((r.a, r.b, r.bound), (0, 0, 0));
    }

    fn free_word() -> impl Strategy<Value = FreeWord> {
        proptest::collection::vec((1u32..=3, prop_oneof![Just(1i8), Just(-1i8)]), 0..8)
            .prop_map(FreeWord::new)
    }

    proptest! {
        #[test]
        fn mu_is_a_monomorphism(u in free_word(), v in free_word()) {
            prop_assert_eq!(mu_embed(&u.multiply(&v)), mu_embed(&u).multiply(&mu_embed(&v)));
            prop_assert_eq!(mu_embed(&u).is_empty(), u.is_empty());
        }

        #[test]
        fn generators_are_accepted(gs in proptest::collection::vec(free_word(), 1..4)) {
            let x = StallingsAutomaton::build(&gs);
            for g in &gs {
                prop_assert!(x.accepts(g));
            }
        }
    }
}
