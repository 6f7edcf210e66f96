//! The left order on the free product and strongly positive words.
//!
//! A reduced word is strongly positive when each of its nonempty
//! letter-aligned suffixes is positive. Every reduced word factors as
//! `U1 U2⁻¹` with strongly positive (or empty) parts, and every cyclically
//! reduced word has a rotation that is strongly positive or strongly negative.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::magnus::{word_sign, Sign};
use crate::word::Word;

/// Compares two reduced words: `u < w` iff `u⁻¹w` is positive.
pub fn compare(u: &Word, w: &Word) -> Result<Ordering> {
    Ok(match word_sign(&u.invert().multiply(w))? {
        Sign::Positive => Ordering::Less,
        Sign::Zero => Ordering::Equal,
        Sign::Negative => Ordering::Greater,
    })
}

pub fn is_positive(w: &Word) -> Result<bool> {
    Ok(word_sign(w)? == Sign::Positive)
}

pub fn is_strongly_positive(w: &Word) -> Result<bool> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    for i in 0..w.len() {
        if !is_positive(&w.suffix_from(i))? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_strongly_negative(w: &Word) -> Result<bool> {
    is_strongly_positive(&w.invert())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrongSign {
    StronglyPositive,
    StronglyNegative,
}

/// Classifies `s⁻¹t` for strongly positive `s`, `t` with `s⁻¹t` reduced.
pub fn lemma4_sign(s: &Word, t: &Word) -> Result<StrongSign> {
    if s.is_empty() || !is_strongly_positive(s)? {
        return Err(Error::PreconditionViolated(
            "s is not strongly positive".into(),
        ));
    }
    if t.is_empty() || !is_strongly_positive(t)? {
        return Err(Error::PreconditionViolated(
            "t is not strongly positive".into(),
        ));
    }
    if s.first().map(|l| l.factor()) == t.first().map(|l| l.factor()) {
        return Err(Error::PreconditionViolated("s⁻¹t is not reduced".into()));
    }
    sign_of_reduced_quotient(s, t)
}

fn sign_of_reduced_quotient(s: &Word, t: &Word) -> Result<StrongSign> {
    match compare(s, t)? {
        Ordering::Less => Ok(StrongSign::StronglyPositive),
        Ordering::Greater => Ok(StrongSign::StronglyNegative),
        Ordering::Equal => Err(Error::PreconditionViolated("s⁻¹t is trivial".into())),
    }
}

#[derive(Debug, Clone)]
struct Block {
    word: Word,
    positive: bool,
}

/// Splits a reduced word as `w ≡ u1 · u2⁻¹` with `u1`, `u2` strongly positive
/// or empty.
///
/// Starts from one block per letter and rewrites the leftmost adjacent pair
/// until no rule applies: equal signs concatenate, and a `(−, +)` pair is
/// replaced by a single block using the classification of `U⁻¹V`. Each
/// rewrite removes one block.
pub fn factorize_u1_u2(w: &Word) -> Result<(Word, Word)> {
    let mut blocks: Vec<Block> = Vec::with_capacity(w.len());
    for l in w.letters() {
        let single = Word::letter(l.clone());
        if is_positive(&single)? {
            blocks.push(Block {
                word: single,
                positive: true,
            });
        } else {
            blocks.push(Block {
                word: single.invert(),
                positive: false,
            });
        }
    }
    'rewrite: loop {
        for i in 0..blocks.len().saturating_sub(1) {
            let (x, y) = (&blocks[i], &blocks[i + 1]);
            let merged = match (x.positive, y.positive) {
                (true, true) => Block {
                    word: concat(&x.word, &y.word),
                    positive: true,
                },
                (false, false) => Block {
                    word: concat(&y.word, &x.word),
                    positive: false,
                },
                (false, true) => match sign_of_reduced_quotient(&x.word, &y.word)? {
                    StrongSign::StronglyPositive => Block {
                        word: concat(&x.word.invert(), &y.word),
                        positive: true,
                    },
                    StrongSign::StronglyNegative => Block {
                        word: concat(&y.word.invert(), &x.word),
                        positive: false,
                    },
                },
                (true, false) => continue,
            };
            blocks.splice(i..i + 2, [merged]);
            continue 'rewrite;
        }
        break;
    }
    let mut u1 = Word::empty();
    let mut u2 = Word::empty();
    for b in blocks {
        if b.positive {
            u1 = b.word;
        } else {
            u2 = b.word;
        }
    }
    Ok((u1, u2))
}

fn concat(a: &Word, b: &Word) -> Word {
    a.concat_reduced(b)
        .expect("adjacent blocks of a reduced word concatenate reducedly")
}

/// Rotation `k` such that `w[k..] w[..k]` is strongly positive (`Positive`)
/// or strongly negative (`Negative`).
pub fn strongly_signed_cyclic_permutation(w: &Word) -> Result<(usize, StrongSign)> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if !w.is_cyclically_reduced() {
        return Err(Error::NotCyclicallyReduced);
    }
    let (u1, u2) = factorize_u1_u2(w)?;
    if u2.is_empty() {
        return Ok((0, StrongSign::StronglyPositive));
    }
    if u1.is_empty() {
        return Ok((0, StrongSign::StronglyNegative));
    }
    Ok((u1.len() % w.len(), sign_of_reduced_quotient(&u2, &u1)?))
}
