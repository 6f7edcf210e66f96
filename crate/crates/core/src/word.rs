//! Elements of the free product as reduced words.

use std::fmt;
use std::str::FromStr;

use num::{BigRational, Zero};

use crate::error::{Error, Result};
use crate::factor::{FactorCatalog, FactorElement, FactorId, Rational};

/// A nontrivial element of a single factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    factor: FactorId,
    value: Rational,
}

impl Letter {
    /// Returns `None` for the identity element.
    pub fn new(factor: FactorId, value: Rational) -> Option<Letter> {
        if value.is_zero() {
            None
        } else {
            Some(Letter { factor, value })
        }
    }

    pub fn int(factor: u32, value: i64) -> Letter {
        Letter::new(FactorId(factor), Rational::from_integer(value.into()))
            .expect("nonzero exponent")
    }

    pub fn factor(&self) -> FactorId {
        self.factor
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn element(&self) -> FactorElement {
        FactorElement::new(self.factor, self.value.clone())
    }

    pub fn inverse(&self) -> Letter {
        Letter {
            factor: self.factor,
            value: -&self.value,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}^{}", self.factor, self.value)
    }
}

/// A reduced word: adjacent letters lie in distinct factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Word {
        Word {
            letters: Vec::new(),
        }
    }

    pub fn letter(l: Letter) -> Word {
        Word { letters: vec![l] }
    }

    /// Reduces an arbitrary sequence of letters.
    pub fn normalize<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in raw {
            push_reducing(&mut out, l.factor, l.value);
        }
        Word { letters: out }
    }

    /// Like [`Word::normalize`] but accepts identity elements, which are dropped.
    pub fn from_elements<I: IntoIterator<Item = FactorElement>>(raw: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for e in raw {
            if !e.value.is_zero() {
                push_reducing(&mut out, e.factor, e.value);
            }
        }
        Word { letters: out }
    }

    /// Wraps letters that are already known to be reduced.
    pub fn from_reduced(letters: Vec<Letter>) -> Result<Word> {
        if letters.windows(2).any(|w| w[0].factor == w[1].factor) {
            return Err(Error::PreconditionViolated(
                "adjacent letters share a factor".into(),
            ));
        }
        Ok(Word { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<&Letter> {
        self.letters.first()
    }

    pub fn last(&self) -> Option<&Letter> {
        self.letters.last()
    }

    pub fn multiply(&self, other: &Word) -> Word {
        let mut out = self.letters.clone();
        for l in &other.letters {
            push_reducing(&mut out, l.factor, l.value.clone());
        }
        Word { letters: out }
    }

    pub fn invert(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(Letter::inverse).collect(),
        }
    }

    pub fn conjugate_by(&self, s: &Word) -> Word {
        s.multiply(self).multiply(&s.invert())
    }

    /// Literal concatenation; `None` if the result would not be reduced.
    pub fn concat_reduced(&self, other: &Word) -> Option<Word> {
        match (self.last(), other.first()) {
            (Some(a), Some(b)) if a.factor == b.factor => None,
            _ => {
                let mut letters = self.letters.clone();
                letters.extend(other.letters.iter().cloned());
                Some(Word { letters })
            }
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word {
            letters: self.letters[..n].to_vec(),
        }
    }

    pub fn suffix_from(&self, n: usize) -> Word {
        Word {
            letters: self.letters[n..].to_vec(),
        }
    }

    /// Cyclic rotation `w[k..] w[..k]`.
    pub fn rotate(&self, k: usize) -> Word {
        if self.letters.is_empty() {
            return self.clone();
        }
        let k = k % self.letters.len();
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        Word { letters }
    }

    /// Words of length at most one count as cyclically reduced, longer words
    /// need first and last letter in distinct factors.
    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) if self.len() >= 2 => a.factor != b.factor,
            _ => true,
        }
    }

    /// Returns `(c, v)` with `self = c v c⁻¹` and `v` cyclically reduced or empty.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let mut conj: Vec<Letter> = Vec::new();
        let mut core = self.letters.clone();
        while core.len() >= 2 && core[0].factor == core[core.len() - 1].factor {
            let head = core.remove(0);
            let tail = core.pop().expect("len >= 1");
            let merged = &tail.value + &head.value;
            push_reducing(&mut core, head.factor, merged);
            conj.push(head);
        }
        (Word { letters: conj }, Word { letters: core })
    }

    pub fn in_catalog(&self, catalog: &FactorCatalog) -> Result<()> {
        for l in &self.letters {
            catalog.check(l.factor, &l.value)?;
        }
        Ok(())
    }

    /// Parses `g1^3 g2^-1 g1^1/2`; `1` or the empty string is the identity.
    pub fn parse(s: &str) -> Result<Word> {
        let mut raw = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            raw.push(parse_letter(tok)?);
        }
        Ok(Word::normalize(raw))
    }
}

fn push_reducing(out: &mut Vec<Letter>, factor: FactorId, value: Rational) {
    match out.last_mut() {
        Some(top) if top.factor == factor => {
            top.value += value;
            if top.value.is_zero() {
                out.pop();
            }
        }
        _ => {
            if !value.is_zero() {
                out.push(Letter { factor, value });
            }
        }
    }
}

fn parse_letter(tok: &str) -> Result<Letter> {
    let body = tok
        .strip_prefix('g')
        .ok_or_else(|| Error::Parse(format!("expected gN^q, got `{tok}`")))?;
    let (idx, exp) = match body.split_once('^') {
        Some((i, e)) => (i, e),
        None => (body, "1"),
    };
    let idx: u32 = idx
        .parse()
        .map_err(|_| Error::Parse(format!("bad factor index in `{tok}`")))?;
    if idx == 0 {
        return Err(Error::Parse(format!(
            "factor indices are 1-based in `{tok}`"
        )));
    }
    let value =
        BigRational::from_str(exp).map_err(|_| Error::Parse(format!("bad exponent in `{tok}`")))?;
    Letter::new(FactorId(idx - 1), value)
        .ok_or_else(|| Error::Parse(format!("zero exponent in `{tok}`")))
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        Word::parse(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(k: i64) -> Letter {
        Letter::int(0, k)
    }
    fn b(k: i64) -> Letter {
        Letter::int(1, k)
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(Word::normalize([a(1), a(2)]).letters(), &[a(3)]);
        assert!(Word::normalize([a(1), a(-1)]).is_empty());
        assert_eq!(
            Word::normalize([a(1), b(2), b(-2), a(1)]).letters(),
            &[a(2)]
        );
    }

    #[test]
    fn group_operation_examples() {
        let wa = Word::letter(a(1));
        assert!(wa.multiply(&Word::letter(a(-1))).is_empty());
        let ab = Word::normalize([a(1), b(1)]);
        assert_eq!(ab.invert().letters(), &[b(-1), a(-1)]);
        let (c, v) = Word::normalize([a(1), b(1), a(-1)]).cyclic_reduce();
        assert_eq!(c.letters(), &[a(1)]);
        assert_eq!(v.letters(), &[b(1)]);
    }

    #[test]
    fn cyclic_reduce_merges_same_factor_ends() {
        let w = Word::normalize([a(1), b(1), a(2)]);
        let (c, v) = w.cyclic_reduce();
        assert!(v.is_cyclically_reduced());
        assert_eq!(v.conjugate_by(&c), w);
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn parse_and_display() {
        let w: Word = "g1^3 g2^-1 g1^1/2".parse().unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.to_string(), "g1^3 g2^-1 g1^1/2");
        assert!(Word::parse("1").unwrap().is_empty());
        assert!(Word::parse("").unwrap().is_empty());
        assert!(Word::parse("g1^0").is_err());
        assert!(Word::parse("g0^1").is_err());
        assert!(Word::parse("x1^1").is_err());
        assert!(Word::parse("g1^a").is_err());
        assert_eq!(Word::parse("g1 g1^2").unwrap().letters(), &[a(3)]);
    }

    #[test]
    fn from_reduced_checks_adjacency() {
        assert!(Word::from_reduced(vec![a(1), a(2)]).is_err());
        assert!(Word::from_reduced(vec![a(1), b(2)]).is_ok());
    }

    pub(crate) fn raw_letters() -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec((0u32..3, -3i64..=3), 0..10).prop_map(|v| {
            v.into_iter()
                .filter(|&(_, k)| k != 0)
                .map(|(f, k)| Letter::int(f, k))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(raw in raw_letters()) {
            let w = Word::normalize(raw);
            prop_assert_eq!(Word::normalize(w.letters().to_vec()), w.clone());
            prop_assert!(w.letters().windows(2).all(|p| p[0].factor() != p[1].factor()));
        }

        #[test]
        fn multiply_matches_concatenation(u in raw_letters(), v in raw_letters()) {
            let (wu, wv) = (Word::normalize(u.clone()), Word::normalize(v.clone()));
            let mut cat = u;
            cat.extend(v);
            prop_assert_eq!(wu.multiply(&wv), Word::normalize(cat));
        }

        #[test]
        fn inverse_cancels(u in raw_letters()) {
            let w = Word::normalize(u);
            prop_assert!(w.multiply(&w.invert()).is_empty());
        }

        #[test]
        fn cyclic_reduce_reconstructs(u in raw_letters()) {
            let w = Word::normalize(u);
            let (c, v) = w.cyclic_reduce();
            prop_assert!(v.is_cyclically_reduced());
            prop_assert_eq!(v.conjugate_by(&c), w);
        }
    }
}
