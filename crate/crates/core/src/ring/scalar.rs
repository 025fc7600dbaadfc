//! Sparse polynomials over ℚ in the family parameters α and β.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rat;
use crate::error::Error;

/// A named symbolic parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Alpha,
    Beta,
}

impl Param {
    pub const ALL: [Param; 2] = [Param::Alpha, Param::Beta];

    pub fn name(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::Beta => "beta",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    pub fn from_name(s: &str) -> Option<Param> {
        match s {
            "alpha" => Some(Param::Alpha),
            "beta" => Some(Param::Beta),
            _ => None,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent vector over [`Param::ALL`], ordered graded-lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial([u32; 2]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0, 0]);

    pub fn var(p: Param) -> Monomial {
        let mut e = [0; 2];
        e[p.index()] = 1;
        Monomial(e)
    }

    pub fn from_exponents(alpha: u32, beta: u32) -> Monomial {
        Monomial([alpha, beta])
    }

    pub fn exponent(&self, p: Param) -> u32 {
        self.0[p.index()]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(self, other: Monomial) -> Monomial {
        Monomial([self.0[0] + other.0[0], self.0[1] + other.0[1]])
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
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
        let mut first = true;
        for p in Param::ALL {
            let e = self.exponent(p);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Element of ℚ[α, β]. No zero coefficients are stored, so structural
/// equality is equality of polynomials.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<Monomial, Rat>,
}

impl Scalar {
    pub fn constant(c: Rat) -> Scalar {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::ONE, c);
        }
        Scalar { terms }
    }

    pub fn var(p: Param) -> Scalar {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(p), Rat::one());
        Scalar { terms }
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Monomial, Rat)>) -> Scalar {
        let mut terms: BTreeMap<Monomial, Rat> = BTreeMap::new();
        for (m, c) in iter {
            *terms.entry(m).or_insert_with(Rat::zero) += &c;
        }
        terms.retain(|_, c| !c.is_zero());
        Scalar { terms }
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// The rational value when no parameter occurs.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    pub fn params(&self) -> BTreeSet<Param> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for p in Param::ALL {
                if m.exponent(p) > 0 {
                    out.insert(p);
                }
            }
        }
        out
    }

    /// Fails if a parameter outside `declared` occurs.
    pub fn check_params(&self, declared: &BTreeSet<Param>) -> Result<(), Error> {
        match self.params().into_iter().find(|p| !declared.contains(p)) {
            Some(p) => Err(Error::UndeclaredParameter(p.name().to_string())),
            None => Ok(()),
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> Scalar {
        if r.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(m, c)| (*m, c * r)).collect(),
        }
    }

    /// Evaluates exactly; every occurring parameter must be assigned.
    pub fn eval(&self, assignment: &BTreeMap<Param, Rat>) -> Result<Rat, Error> {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for p in Param::ALL {
                let e = m.exponent(p);
                if e == 0 {
                    continue;
                }
                let v = assignment
                    .get(&p)
                    .ok_or_else(|| Error::MissingParameter(p.name().to_string()))?;
                t = &t * &v.pow(e);
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Substitutes the assigned parameters and keeps the rest symbolic.
    pub fn substitute(&self, assignment: &BTreeMap<Param, Rat>) -> Scalar {
        Scalar::from_terms(self.terms.iter().map(|(m, c)| {
            let mut coeff = c.clone();
            let mut rest = [0u32; 2];
            for p in Param::ALL {
                let e = m.exponent(p);
                match assignment.get(&p) {
                    Some(v) => coeff = &coeff * &v.pow(e),
                    None => rest[p.index()] = e,
                }
            }
            (Monomial(rest), coeff)
        }))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if *m == Monomial::ONE {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::constant(Rat::one())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (m, c) in &rhs.terms {
            match self.terms.get_mut(m) {
                Some(v) => {
                    *v += c;
                    if v.is_zero() {
                        self.terms.remove(m);
                    }
                }
                None => {
                    self.terms.insert(*m, c.clone());
                }
            }
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (m, c) in &rhs.terms {
            match self.terms.get_mut(m) {
                Some(v) => {
                    *v -= c;
                    if v.is_zero() {
                        self.terms.remove(m);
                    }
                }
                None => {
                    self.terms.insert(*m, -c);
                }
            }
        }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.terms.is_empty() || rhs.terms.is_empty() {
            return Scalar::zero();
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale_rat(&c);
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale_rat(&c);
        }
        let mut terms: BTreeMap<Monomial, Rat> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let prod = c1 * c2;
                match terms.entry(m1.mul(*m2)) {
                    std::collections::btree_map::Entry::Occupied(mut e) => *e.get_mut() += &prod,
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(prod);
                    }
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Scalar { terms }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(mut self) -> Scalar {
        for c in self.terms.values_mut() {
            *c = -&*c;
        }
        self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Self {
        Scalar::constant(r)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::constant(Rat::from(v))
    }
}

/// JSON form: terms in descending graded-lex order, each
/// `{"coeff": "p/q", "exps": {"alpha": a, "beta": b}}` with zero exponents omitted.
#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: Rat,
    #[serde(default)]
    exps: BTreeMap<String, u32>,
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| TermRepr {
                coeff: c.clone(),
                exps: Param::ALL
                    .iter()
                    .filter(|p| m.exponent(**p) > 0)
                    .map(|p| (p.name().to_string(), m.exponent(*p)))
                    .collect(),
            })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(deserializer)?;
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            let mut e = [0u32; 2];
            for (name, exp) in t.exps {
                let p = Param::from_name(&name).ok_or_else(|| {
                    serde::de::Error::custom(format!("unknown parameter {name:?}"))
                })?;
                e[p.index()] = exp;
            }
            out.push((Monomial(e), t.coeff));
        }
        Ok(Scalar::from_terms(out))
    }
}
