//! Magnus-type embedding of the free product into truncated noncommutative
//! power series over the rationals.
//!
//! A letter `g = q` of factor `α` maps to `(1 + X_α)^q`, expanded with the
//! generalized binomial series. A nonempty reduced word is positive when the
//! graded-lex least non-constant monomial of its image has a positive
//! coefficient. The positive cone is closed under multiplication and
//! inversion swaps it with its complement, so this gives a left (in fact
//! two-sided) invariant order extending the order of every factor.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::factor::{sign_of, FactorId, Rational};
use crate::word::{Letter, Word};

/// A noncommutative monomial `X_{α1} X_{α2} ... X_{αk}`.
///
/// Ordered graded-lexicographically: total degree first, then
/// lexicographically by factor index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub Vec<FactorId>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Monomial(v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for v in &self.0 {
            write!(f, "X{v}")?;
        }
        Ok(())
    }
}

/// Noncommutative polynomial with every term of degree at most `cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    cap: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl TruncatedSeries {
    pub fn zero(cap: usize) -> Self {
        TruncatedSeries {
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(cap: usize) -> Self {
        let mut s = Self::zero(cap);
        s.terms.insert(Monomial::one(), Rational::one());
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(cap: usize, terms: I) -> Self {
        let mut s = Self::zero(cap);
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if m.degree() > self.cap || c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        if self.cap != other.cap {
            return Err(Error::CapMismatch(self.cap, other.cap));
        }
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if m1.degree() + m2.degree() > self.cap {
                    // terms of `other` are sorted by degree
                    break;
                }
                *acc.entry(m1.times(m2)).or_insert_with(Rational::zero) += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(TruncatedSeries {
            cap: self.cap,
            terms: acc,
        })
    }

    /// The graded-lex least monomial of degree ≥ 1 with a nonzero coefficient.
    pub fn least_nonconstant(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().find(|(m, _)| m.degree() > 0)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.degree() == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "({c}){m}")?;
            }
        }
        Ok(())
    }
}

/// Generalized binomial coefficient `C(q, j)`.
pub fn binomial(q: &Rational, j: usize) -> Rational {
    let mut acc = Rational::one();
    for i in 0..j {
        let i = Rational::from_integer(i.into());
        acc = acc * (q - &i) / (&i + Rational::one());
    }
    acc
}

/// `(1 + X_α)^q` truncated at `cap`.
pub fn letter_series(l: &Letter, cap: usize) -> TruncatedSeries {
    let q = l.value();
    TruncatedSeries::from_terms(
        cap,
        (0..=cap).map(|j| (Monomial(vec![l.factor(); j]), binomial(q, j))),
    )
}

/// Image of a word in the series ring, truncated at `cap`.
pub fn embedding(w: &Word, cap: usize) -> TruncatedSeries {
    let mut acc = TruncatedSeries::one(cap);
    for l in w.letters() {
        acc = acc.mul(&letter_series(l, cap)).expect("equal caps");
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn negate(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    fn of(c: &Rational) -> Sign {
        match sign_of(c) {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }
}

/// Sign of a reduced word in the Magnus order.
///
/// The least nonzero monomial has degree at most the syllable length `n`:
/// the coefficient of `X_{α1}...X_{αn}` is `q1...qn`. Truncating at a cap `d`
/// leaves every coefficient of degree ≤ `d` exact, so the caps `1, 2, ..., n`
/// are tried in turn and the first one exposing a nonzero term decides.
pub fn word_sign(w: &Word) -> Result<Sign> {
    if w.is_empty() {
        return Ok(Sign::Zero);
    }
    // Degree one is the vector of per-factor exponent sums.
    let mut sums: BTreeMap<FactorId, Rational> = BTreeMap::new();
    for l in w.letters() {
        *sums.entry(l.factor()).or_insert_with(Rational::zero) += l.value();
    }
    if let Some(c) = sums.values().find(|c| !c.is_zero()) {
        return Ok(Sign::of(c));
    }
    let n = w.len();
    for cap in 2..=n {
        let s = embedding(w, cap);
        if let Some((_, c)) = s.least_nonconstant() {
            return Ok(Sign::of(c));
        }
    }
    Err(Error::InternalDegreeBoundViolated(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }
    fn x(i: u32) -> Monomial {
        Monomial(vec![FactorId(i)])
    }
    fn mono(v: &[u32]) -> Monomial {
        Monomial(v.iter().map(|&i| FactorId(i)).collect())
    }

    #[test]
    fn series_mul_examples() {
        let one_x1 = TruncatedSeries::from_terms(2, [(Monomial::one(), q(1, 1)), (x(0), q(1, 1))]);
        let one_x2 = TruncatedSeries::from_terms(2, [(Monomial::one(), q(1, 1)), (x(1), q(1, 1))]);
        let expect = TruncatedSeries::from_terms(
            2,
            [
                (Monomial::one(), q(1, 1)),
                (x(0), q(1, 1)),
                (x(1), q(1, 1)),
                (mono(&[0, 1]), q(1, 1)),
            ],
        );
        assert_eq!(one_x1.mul(&one_x2).unwrap(), expect);

        let geo = TruncatedSeries::from_terms(
            2,
            [
                (Monomial::one(), q(1, 1)),
                (x(0), q(-1, 1)),
                (mono(&[0, 0]), q(1, 1)),
            ],
        );
        assert_eq!(one_x1.mul(&geo).unwrap(), TruncatedSeries::one(2));
        assert_eq!(one_x1.mul(&TruncatedSeries::one(2)).unwrap(), one_x1);
    }

    #[test]
    fn cap_mismatch() {
        assert_eq!(
            TruncatedSeries::one(2).mul(&TruncatedSeries::one(3)),
            Err(Error::CapMismatch(2, 3))
        );
    }

    #[test]
    fn letter_series_examples() {
        let s = letter_series(&Letter::int(0, 1), 3);
        assert_eq!(
            s,
            TruncatedSeries::from_terms(3, [(Monomial::one(), q(1, 1)), (x(0), q(1, 1))])
        );
        let s = letter_series(&Letter::int(0, -1), 2);
        assert_eq!(
            s,
            TruncatedSeries::from_terms(
                2,
                [
                    (Monomial::one(), q(1, 1)),
                    (x(0), q(-1, 1)),
                    (mono(&[0, 0]), q(1, 1))
                ]
            )
        );
        let half = Letter::new(FactorId(0), q(1, 2)).unwrap();
        assert_eq!(
            letter_series(&half, 2),
            TruncatedSeries::from_terms(
                2,
                [
                    (Monomial::one(), q(1, 1)),
                    (x(0), q(1, 2)),
                    (mono(&[0, 0]), q(-1, 8))
                ]
            )
        );
    }

    #[test]
    fn word_sign_examples() {
        assert_eq!(word_sign(&Word::empty()).unwrap(), Sign::Zero);
        let w = Word::normalize([Letter::int(0, -1), Letter::int(1, 1)]);
        assert_eq!(word_sign(&w).unwrap(), Sign::Negative);
        let w: Word = "g1^2 g2^3".parse().unwrap();
        assert_eq!(word_sign(&w).unwrap(), Sign::Positive);
        assert_eq!(embedding(&w, 2).coefficient(&mono(&[0, 1])), q(6, 1));
    }

    #[test]
    fn commutators_are_decided_at_degree_two() {
        // [a, b] = 1 + X1X2 - X2X1 + ...
        let w: Word = "g1^1 g2^1 g1^-1 g2^-1".parse().unwrap();
        let s = embedding(&w, 2);
        assert_eq!(s.least_nonconstant().unwrap().0, &mono(&[0, 1]));
        assert_eq!(word_sign(&w).unwrap(), Sign::Positive);
        assert_eq!(word_sign(&w.invert()).unwrap(), Sign::Negative);
    }

    #[test]
    fn monomial_order_is_graded_lex() {
        assert!(x(1) < mono(&[0, 0]));
        assert!(x(0) < x(1));
        assert!(mono(&[0, 1]) < mono(&[1, 0]));
        assert!(Monomial::one() < x(0));
    }

    fn word_strategy() -> impl Strategy<Value = Word> {
        prop::collection::vec((0u32..3, -3i64..=3, 1i64..=2), 0..7).prop_map(|v| {
            Word::normalize(
                v.into_iter()
                    .filter_map(|(f, n, d)| Letter::new(FactorId(f), q(n, d))),
            )
        })
    }

    proptest! {
        #[test]
        fn embedding_is_multiplicative(u in word_strategy(), w in word_strategy(), cap in 1usize..4) {
            let lhs = embedding(&u.multiply(&w), cap);
            let rhs = embedding(&u, cap).mul(&embedding(&w, cap)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn full_monomial_coefficient_is_exponent_product(w in word_strategy()) {
            let full = Monomial(w.letters().iter().map(|l| l.factor()).collect());
            let product = w.letters().iter().fold(Rational::one(), |acc, l| acc * l.value());
            prop_assert_eq!(embedding(&w, w.len()).coefficient(&full), product);
        }

        #[test]
        fn inverse_flips_sign(w in word_strategy()) {
            prop_assert_eq!(word_sign(&w.invert()).unwrap(), word_sign(&w).unwrap().negate());
        }

        #[test]
        fn positive_cone_is_closed(u in word_strategy(), w in word_strategy()) {
            if word_sign(&u).unwrap() == Sign::Positive && word_sign(&w).unwrap() == Sign::Positive {
                prop_assert_eq!(word_sign(&u.multiply(&w)).unwrap(), Sign::Positive);
            }
        }
    }
}
