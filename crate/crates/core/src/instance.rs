//! Seeded random instances and the JSON instance file format.
//!
//! Randomness comes from PCG-64 (`rand_pcg::Pcg64`, the 128-bit LCG with
//! XSL-RR output). Instance `i` of a run with seed `s` draws from the PCG
//! stream `i` started at state `s`, so instances are reproducible one by one
//! and independent of how a sweep is scheduled.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::agraph::AGraph;
use crate::factor::{FactorCatalog, FactorId, FactorKind, Rational};
use crate::fold::build_from_generators;
use crate::freegroup::FreeWord;
use crate::word::{Letter, Word};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSpec {
    pub seed: u64,
    pub min_factors: usize,
    pub max_factors: usize,
    /// Restricts every factor to `Z`.
    pub z_only: bool,
    pub max_gens: usize,
    pub min_syllables: usize,
    pub max_syllables: usize,
    /// Nonzero exponents; `Z` factors use the integer part of the pool.
    pub pool: Vec<Rational>,
    pub max_retries: usize,
    /// Draws `H2` as a conjugate of a subgroup of `H1`, so that the two
    /// subgroups intersect nontrivially.
    pub overlap: bool,
}

/// `{−3, …, 3} ∪ {±1/2, ±3/2}` without zero.
pub fn default_pool() -> Vec<Rational> {
    let mut pool: Vec<Rational> = (-3..=3)
        .filter(|&k| k != 0)
        .map(|k| Rational::from_integer(k.into()))
        .collect();
    for (n, d) in [(1, 2), (-1, 2), (3, 2), (-3, 2)] {
        pool.push(Rational::new(n.into(), d.into()));
    }
    pool
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec {
            seed: 1,
            min_factors: 2,
            max_factors: 4,
            z_only: false,
            max_gens: 4,
            min_syllables: 2,
            max_syllables: 8,
            pool: default_pool(),
            max_retries: 200,
            overlap: false,
        }
    }
}

/// Parses a comma-separated exponent pool such as `-1,1,1/2`.
pub fn parse_pool(s: &str) -> Result<Vec<Rational>> {
    let pool: Vec<Rational> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<Rational>()
                .map_err(|_| Error::Parse(format!("bad exponent `{t}`")))
        })
        .collect::<Result<_>>()?;
    if pool.is_empty() || pool.iter().any(|q| *q == Rational::from_integer(0.into())) {
        return Err(Error::Parse(
            "exponent pool must be nonempty and nonzero".into(),
        ));
    }
    Ok(pool)
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub factors: Vec<FactorKind>,
    pub gens: [Vec<Word>; 2],
    pub graphs: [AGraph; 2],
    /// Subgroups resampled because they were not factor-free.
    pub rejections: usize,
}

pub fn rng_for(seed: u64, index: u64) -> Pcg64 {
    Pcg64::new(u128::from(seed), u128::from(index))
}

fn random_word(
    rng: &mut Pcg64,
    spec: &InstanceSpec,
    kinds: &[FactorKind],
    ints: &[Rational],
) -> Word {
    let len = rng.gen_range(spec.min_syllables..=spec.max_syllables);
    let mut letters = Vec::with_capacity(len);
    let mut prev: Option<usize> = None;
    for _ in 0..len {
        let choices: Vec<usize> = (0..kinds.len()).filter(|&f| Some(f) != prev).collect();
        let f = *choices.choose(rng).expect("at least two factors");
        let pool = if kinds[f] == FactorKind::Z {
            ints
        } else {
            &spec.pool[..]
        };
        let q = pool.choose(rng).expect("nonempty pool").clone();
        letters.push(Letter::new(FactorId(f as u32), q).expect("pool is nonzero"));
        prev = Some(f);
    }
    Word::normalize(letters)
}

/// Generates instance `index` of the run seeded by `spec.seed`.
pub fn generate(spec: &InstanceSpec, index: u64) -> Result<Instance> {
    let mut rng = rng_for(spec.seed, index);
    let n = rng.gen_range(spec.min_factors.max(2)..=spec.max_factors.max(2));
    let factors: Vec<FactorKind> = (0..n)
        .map(|_| {
            if spec.z_only || rng.gen_bool(0.5) {
                FactorKind::Z
            } else {
                FactorKind::Q
            }
        })
        .collect();
    let ints: Vec<Rational> = spec
        .pool
        .iter()
        .filter(|q| q.is_integer())
        .cloned()
        .collect();
    if ints.is_empty() && factors.contains(&FactorKind::Z) {
        return Err(Error::PreconditionViolated(
            "exponent pool has no integers for a Z factor".into(),
        ));
    }
    let mut rejections = 0;
    let mut side = || -> Result<(Vec<Word>, AGraph)> {
        loop {
            let k = rng.gen_range(1..=spec.max_gens.max(1));
            let gens: Vec<Word> = (0..k)
                .map(|_| random_word(&mut rng, spec, &factors, &ints))
                .collect();
            match build_from_generators(&gens) {
                Ok(g) => return Ok((gens, g)),
                Err(Error::FactorFreeViolation { .. }) => {
                    rejections += 1;
                    if rejections > spec.max_retries {
                        return Err(Error::RetriesExhausted(rejections));
                    }
                }
                Err(e) => return Err(e),
            }
        }
    };
    let (gens1, g1) = side()?;
    let (gens2, g2) = if spec.overlap {
        overlapping(&mut rng, spec, &factors, &ints, &gens1)?
    } else {
        side()?
    };
    Ok(Instance {
        factors,
        gens: [gens1, gens2],
        graphs: [g1, g2],
        rejections,
    })
}

/// Products of one to three generators of `H1` (with random signs),
/// conjugated by a random word of at most two syllables.
fn overlapping(
    rng: &mut Pcg64,
    spec: &InstanceSpec,
    kinds: &[FactorKind],
    ints: &[Rational],
    gens1: &[Word],
) -> Result<(Vec<Word>, AGraph)> {
    let short = InstanceSpec {
        min_syllables: 0,
        max_syllables: 2,
        ..spec.clone()
    };
    let s = random_word(rng, &short, kinds, ints);
    let k = rng.gen_range(1..=spec.max_gens.max(1));
    let gens: Vec<Word> = (0..k)
        .map(|_| {
            let mut w = Word::empty();
            for _ in 0..rng.gen_range(1..=3) {
                let g = gens1.choose(rng).expect("H1 has generators");
                w = w.multiply(&if rng.gen_bool(0.5) {
                    g.clone()
                } else {
                    g.invert()
                });
            }
            w.conjugate_by(&s)
        })
        .filter(|w| !w.is_empty())
        .collect();
    let g = build_from_generators(&gens)?;
    Ok((gens, g))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeSpec {
    pub seed: u64,
    pub generators: u32,
    pub max_gens: usize,
    pub max_len: usize,
}

impl Default for FreeSpec {
    fn default() -> Self {
        FreeSpec {
            seed: 1,
            generators: 2,
            max_gens: 3,
            max_len: 6,
        }
    }
}

/// A pair of generator lists in `F(x1, ..., xm)`. Words that reduce to the
/// identity are dropped.
pub fn generate_free(spec: &FreeSpec, index: u64) -> [Vec<FreeWord>; 2] {
    let mut rng = rng_for(spec.seed, index);
    let mut side = || {
        let k = rng.gen_range(1..=spec.max_gens.max(1));
        (0..k)
            .map(|_| {
                let len = rng.gen_range(1..=spec.max_len.max(1));
                FreeWord::new((0..len).map(|_| {
                    (
                        rng.gen_range(1..=spec.generators),
                        if rng.gen_bool(0.5) { 1 } else { -1 },
                    )
                }))
            })
            .filter(|w| !w.is_empty())
            .collect()
    };
    [side(), side()]
}

/// Named subgroups over a factor catalog, as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub factors: Vec<FactorDecl>,
    #[serde(default)]
    pub subgroups: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_group: Option<FreeGroupBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDecl {
    pub kind: FactorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeGroupBlock {
    pub generators: u32,
    pub subgroups: BTreeMap<String, Vec<String>>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<InstanceFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files serialize")
    }

    pub fn catalog(&self) -> FactorCatalog {
        FactorCatalog::new(self.factors.iter().map(|f| f.kind).collect())
    }

    /// Parses a word and checks it against the factor catalog.
    pub fn word(&self, s: &str) -> Result<Word> {
        let w: Word = s.parse()?;
        w.in_catalog(&self.catalog())?;
        Ok(w)
    }

    pub fn subgroup(&self, name: &str) -> Result<Vec<Word>> {
        let gens = self
            .subgroups
            .get(name)
            .ok_or_else(|| Error::Parse(format!("no subgroup named `{name}`")))?;
        gens.iter().map(|s| self.word(s)).collect()
    }

    pub fn graph(&self, name: &str) -> Result<AGraph> {
        build_from_generators(&self.subgroup(name)?)
    }

    pub fn free_subgroup(&self, name: &str) -> Result<Vec<FreeWord>> {
        let block = self
            .free_group
            .as_ref()
            .ok_or_else(|| Error::Parse("no free_group block".into()))?;
        let gens = block
            .subgroups
            .get(name)
            .ok_or_else(|| Error::Parse(format!("no free subgroup named `{name}`")))?;
        gens.iter()
            .map(|s| {
                let w: FreeWord = s.parse()?;
                if w.max_generator() > block.generators {
                    return Err(Error::Parse(format!(
                        "`{s}` uses a generator beyond x{}",
                        block.generators
                    )));
                }
                Ok(w)
            })
            .collect()
    }

    /// Instance file holding a generated instance as `H1` and `H2`.
    pub fn from_instance(inst: &Instance) -> InstanceFile {
        let names = ["H1", "H2"];
        InstanceFile {
            factors: inst
                .factors
                .iter()
                .map(|&kind| FactorDecl { kind })
                .collect(),
            subgroups: (0..2)
                .map(|i| {
                    (
                        names[i].to_string(),
                        inst.gens[i].iter().map(|w| w.to_string()).collect(),
                    )
                })
                .collect(),
            free_group: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_reproducible() {
        let spec = InstanceSpec::default();
        let a = generate(&spec, 3).unwrap();
        let b = generate(&spec, 3).unwrap();
        assert_eq!(a.gens, b.gens);
        assert_eq!(a.factors, b.factors);
        let c = generate(&spec, 4).unwrap();
        assert_ne!(a.gens, c.gens);
    }

    #[test]
    fn generated_words_are_valid() {
        let spec = InstanceSpec::default();
        for i in 0..30 {
            let inst = generate(&spec, i).unwrap();
            assert!((2..=4).contains(&inst.factors.len()));
            let cat = FactorCatalog::new(inst.factors.clone());
            for side in &inst.gens {
                assert!((1..=4).contains(&side.len()));
                for w in side {
                    assert!(w.len() <= 8);
                    w.in_catalog(&cat).unwrap();
                }
            }
        }
    }

    #[test]
    fn z_only_unit_pool() {
        let spec = InstanceSpec {
            z_only: true,
            max_factors: 2,
            pool: parse_pool("1,-1").unwrap(),
            ..Default::default()
        };
        let inst = generate(&spec, 0).unwrap();
        assert_eq!(inst.factors, vec![FactorKind::Z, FactorKind::Z]);
        for w in inst.gens.iter().flatten() {
            assert!(FreeWord::from_z_word(w).is_some());
        }
    }

    #[test]
    fn single_syllables_exhaust_retries() {
        let spec = InstanceSpec {
            max_gens: 1,
            min_syllables: 1,
            max_syllables: 1,
            max_retries: 10,
            ..Default::default()
        };
        assert_eq!(generate(&spec, 0).unwrap_err(), Error::RetriesExhausted(11));
    }

    #[test]
    fn overlapping_subgroups_intersect() {
        let spec = InstanceSpec {
            overlap: true,
            ..Default::default()
        };
        let nontrivial = (0..20)
            .filter(|&i| {
                let inst = generate(&spec, i).unwrap();
                let [g1, g2] = &inst.graphs;
                inst.gens[1].iter().all(|w| g2.membership(w))
                    && !crate::pullback::pullback(g1, g2).graph.edges().is_empty()
            })
            .count();
        assert!(nontrivial >= 15);
    }

    #[test]
    fn pool_parsing() {
        assert_eq!(parse_pool("1, -1/2").unwrap().len(), 2);
        assert!(parse_pool("0,1").is_err());
        assert!(parse_pool("a").is_err());
    }

    #[test]
    fn instance_file_round_trip() {
        let text = r#"{
            "factors": [{"kind": "Z"}, {"kind": "Q"}],
            "subgroups": {"H": ["g1^1 g2^1/2", "g2^1 g1^1"]},
            "free_group": {"generators": 2, "subgroups": {"K": ["x1 x1", "x2^-1 x1"]}}
        }"#;
        let file = InstanceFile::parse(text).unwrap();
        assert_eq!(InstanceFile::parse(&file.to_json()).unwrap(), file);
        assert_eq!(file.graph("H").unwrap().reduced_rank(), 1);
        assert_eq!(file.free_subgroup("K").unwrap().len(), 2);
        assert!(file.subgroup("missing").is_err());
        assert!(InstanceFile::parse(r#"{"factors": [{"kind": "R"}]}"#).is_err());
        let bad = InstanceFile::parse(
            r#"{"factors": [{"kind": "Z"}, {"kind": "Z"}], "subgroups": {"H": ["g1^1/2 g2^1"]}}"#,
        )
        .unwrap();
        assert!(matches!(bad.subgroup("H"), Err(Error::NotInFactor { .. })));
    }
}
