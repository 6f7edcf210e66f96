//! Concrete left-ordered factor groups.
//!
//! Every factor is a subgroup of the additive rationals: either `Z` or `Q`
//! with the usual order. Factors are indexed by their position in the
//! declaration order, which is also the order used on the index set.

use std::cmp::Ordering;
use std::fmt;

use num::{BigRational, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Zero-based position of a factor in declaration order. Displayed 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FactorId(pub u32);

impl FactorId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for FactorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FactorKind {
    Z,
    Q,
}

/// An element of one factor group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorElement {
    pub factor: FactorId,
    pub value: Rational,
}

impl FactorElement {
    pub fn new(factor: FactorId, value: Rational) -> Self {
        FactorElement { factor, value }
    }

    pub fn identity(factor: FactorId) -> Self {
        FactorElement {
            factor,
            value: Rational::zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.value.is_zero()
    }

    pub fn inverse(&self) -> Self {
        FactorElement {
            factor: self.factor,
            value: -&self.value,
        }
    }
}

pub fn compose(a: &FactorElement, b: &FactorElement) -> Result<FactorElement> {
    if a.factor != b.factor {
        return Err(Error::FactorMismatch(a.factor, b.factor));
    }
    Ok(FactorElement::new(a.factor, &a.value + &b.value))
}

pub fn factor_compare(a: &FactorElement, b: &FactorElement) -> Result<Ordering> {
    if a.factor != b.factor {
        return Err(Error::FactorMismatch(a.factor, b.factor));
    }
    Ok(a.value.cmp(&b.value))
}

/// The ordered list of factors of a free product.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactorCatalog {
    kinds: Vec<FactorKind>,
}

impl FactorCatalog {
    pub fn new(kinds: Vec<FactorKind>) -> Self {
        FactorCatalog { kinds }
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kinds(&self) -> &[FactorKind] {
        &self.kinds
    }

    pub fn kind(&self, id: FactorId) -> Result<FactorKind> {
        self.kinds
            .get(id.index())
            .copied()
            .ok_or(Error::UnknownFactor(id))
    }

    pub fn ids(&self) -> impl Iterator<Item = FactorId> + '_ {
        (0..self.kinds.len() as u32).map(FactorId)
    }

    /// Checks that `value` is an element of factor `id`.
    pub fn check(&self, id: FactorId, value: &Rational) -> Result<()> {
        match self.kind(id)? {
            FactorKind::Q => Ok(()),
            FactorKind::Z if value.is_integer() => Ok(()),
            FactorKind::Z => Err(Error::NotInFactor {
                factor: id,
                value: value.to_string(),
            }),
        }
    }
}

pub(crate) fn sign_of(value: &Rational) -> Ordering {
    if value.is_positive() {
        Ordering::Greater
    } else if value.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}
