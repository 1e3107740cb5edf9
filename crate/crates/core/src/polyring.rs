//! Sparse multivariate (Laurent) polynomials over a scalar field.
//!
//! A [`PolyRing`] fixes the variable names and which of them are invertible.
//! Terms live in a `BTreeMap` keyed by exponent vectors in graded
//! lexicographic order, so two polynomials are equal exactly when their
//! term maps are.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::expr::{self, Evaluator, ParseError};
use crate::scalars::base::UPoly;
use crate::scalars::{FieldContext, ScalarElement, ScalarError, Specializer};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("operands belong to different polynomial rings")]
    MixedRings,
    #[error("no binding for variable {0}")]
    UnboundVariable(String),
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("not divisible")]
    NotDivisible,
    #[error("no radical match: cofactor {cofactor} is not a unit")]
    NoMatch { cofactor: String },
    #[error("{0} is not invertible in this ring")]
    NotInvertible(String),
    #[error("negative exponent in non-invertible variable {0}")]
    NegativeExponent(String),
    #[error("polynomial is not univariate in {0}")]
    NotUnivariate(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Scalar(ScalarError),
}

impl From<ScalarError> for PolyError {
    fn from(e: ScalarError) -> Self {
        match e {
            ScalarError::UnknownSymbol(s) => PolyError::UnknownSymbol(s),
            ScalarError::Parse(p) => PolyError::Parse(p),
            other => PolyError::Scalar(other),
        }
    }
}

/// Variables and coefficient field of a polynomial ring.
#[derive(Debug)]
pub struct PolyRing {
    field: Arc<FieldContext>,
    vars: Vec<String>,
    invertible: Vec<bool>,
}

impl PartialEq for PolyRing {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || (self.vars == other.vars && self.invertible == other.invertible && *self.field == *other.field)
    }
}

impl PolyRing {
    pub fn new(field: &Arc<FieldContext>, vars: &[&str]) -> Arc<Self> {
        Self::laurent(field, vars, &[])
    }

    /// Ring in which the variables listed in `invertible` may carry negative exponents.
    pub fn laurent(field: &Arc<FieldContext>, vars: &[&str], invertible: &[&str]) -> Arc<Self> {
        for v in vars {
            assert!(!field.has_symbol(v), "ring variable {v} shadows a field generator");
        }
        Arc::new(PolyRing {
            field: field.clone(),
            vars: vars.iter().map(|v| v.to_string()).collect(),
            invertible: vars.iter().map(|v| invertible.contains(v)).collect(),
        })
    }

    pub fn field(&self) -> &Arc<FieldContext> {
        &self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_invertible(&self, i: usize) -> bool {
        self.invertible[i]
    }

    pub fn invertible_vars(&self) -> Vec<&str> {
        self.vars.iter().zip(&self.invertible).filter(|(_, &i)| i).map(|(v, _)| v.as_str()).collect()
    }

    /// Same variables with a different coefficient field.
    pub fn with_field(&self, field: &Arc<FieldContext>) -> Arc<Self> {
        Arc::new(PolyRing { field: field.clone(), vars: self.vars.clone(), invertible: self.invertible.clone() })
    }
}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn div(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.total_degree().cmp(&o.total_degree()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, Debug)]
pub struct Polynomial {
    ring: Arc<PolyRing>,
    terms: BTreeMap<Monomial, ScalarElement>,
}

/// Laurent polynomials share the representation; invertibility is a ring property.
pub type LaurentPolynomial = Polynomial;

impl PartialEq for Polynomial {
    fn eq(&self, o: &Self) -> bool {
        self.terms == o.terms && *self.ring == *o.ring
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

/// Checked ring arithmetic.
pub fn poly_arith(f: &Polynomial, g: &Polynomial, op: PolyOp) -> Result<Polynomial, PolyError> {
    if *f.ring != *g.ring {
        return Err(PolyError::MixedRings);
    }
    Ok(match op {
        PolyOp::Add => f + g,
        PolyOp::Sub => f - g,
        PolyOp::Mul => f * g,
    })
}

/// Result of [`radical_match`]: `f = unit · ∏ factorᵢ^multiplicityᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadicalMatch {
    pub multiplicities: Vec<u32>,
    pub unit: ScalarElement,
}

impl Polynomial {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Polynomial { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: ScalarElement) -> Self {
        Self::term(ring, Monomial::one(ring.nvars()), c)
    }

    pub fn from_int(ring: &Arc<PolyRing>, n: i64) -> Self {
        Self::constant(ring, ring.field.from_int(n))
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Self::from_int(ring, 1)
    }

    pub fn var(ring: &Arc<PolyRing>, name: &str) -> Result<Self, PolyError> {
        let i = ring.index_of(name).ok_or_else(|| PolyError::UnknownSymbol(name.to_string()))?;
        let mut m = Monomial::one(ring.nvars());
        m.0[i] = 1;
        Ok(Self::term(ring, m, ring.field.one()))
    }

    pub fn term(ring: &Arc<PolyRing>, m: Monomial, c: ScalarElement) -> Self {
        assert_eq!(m.0.len(), ring.nvars());
        for (i, &e) in m.0.iter().enumerate() {
            assert!(e >= 0 || ring.invertible[i], "negative exponent in {}", ring.vars[i]);
        }
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { ring: ring.clone(), terms }
    }

    pub fn parse(ring: &Arc<PolyRing>, s: &str) -> Result<Self, PolyError> {
        expr::parse(s)?.eval(&PolyEval(ring))
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn field(&self) -> &Arc<FieldContext> {
        &self.ring.field
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &ScalarElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> ScalarElement {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.field.zero())
    }

    /// The value as a scalar, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<ScalarElement> {
        match self.terms.len() {
            0 => Some(self.ring.field.zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn leading(&self) -> Option<(&Monomial, &ScalarElement)> {
        self.terms.iter().next_back()
    }

    /// Whether all exponents are non-negative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|&e| e >= 0))
    }

    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<i32> {
        self.terms.keys().map(|m| m.0[i]).max()
    }

    pub fn min_degree_in(&self, i: usize) -> Option<i32> {
        self.terms.keys().map(|m| m.0[i]).min()
    }

    /// Variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.ring.nvars()).filter(|&i| self.terms.keys().any(|m| m.0[i] != 0)).collect()
    }

    pub fn scale(&self, c: &ScalarElement) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect();
        Polynomial { ring: self.ring.clone(), terms }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        let terms = self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect();
        Polynomial { ring: self.ring.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ring);
        let mut b = self.clone();
        let mut n = e;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            n >>= 1;
            if n > 0 {
                b = &b * &b;
            }
        }
        acc
    }

    /// A unit of the ring: a single term whose variables are all invertible.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && {
            let m = self.terms.keys().next().unwrap();
            m.0.iter().enumerate().all(|(i, &e)| e == 0 || self.ring.invertible[i])
        }
    }

    pub fn inverse_unit(&self) -> Result<Self, PolyError> {
        if !self.is_unit() {
            return Err(PolyError::NotInvertible(self.to_string()));
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let inv = Monomial(m.0.iter().map(|e| -e).collect());
        Ok(Self::term(&self.ring, inv, c.inverse()?))
    }

    /// Signed integer power; negative powers need a unit.
    pub fn pow_i(&self, e: i64) -> Result<Self, PolyError> {
        let base = if e < 0 { self.inverse_unit()? } else { self.clone() };
        Ok(base.pow(u32::try_from(e.unsigned_abs()).map_err(|_| PolyError::NotInvertible(self.to_string()))?))
    }

    pub fn derivative(&self, i: usize) -> Self {
        let f = &self.ring.field;
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.0[i] == 0 {
                continue;
            }
            let d = c * &f.from_int(m.0[i] as i64);
            if d.is_zero() {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            terms.insert(m2, d);
        }
        Polynomial { ring: self.ring.clone(), terms }
    }

    /// Ring homomorphism into `target`, sending each variable of `self` to its binding.
    pub fn substitute(&self, target: &Arc<PolyRing>, bindings: &BTreeMap<String, Polynomial>) -> Result<Polynomial, PolyError> {
        if *self.ring.field != *target.field {
            return Err(PolyError::MixedRings);
        }
        let mut images = Vec::with_capacity(self.ring.nvars());
        for (i, v) in self.ring.vars.iter().enumerate() {
            let used = self.terms.keys().any(|m| m.0[i] != 0);
            match bindings.get(v) {
                Some(b) => {
                    if *b.ring != **target {
                        return Err(PolyError::MixedRings);
                    }
                    images.push(Some(b.clone()));
                }
                None if used => return Err(PolyError::UnboundVariable(v.clone())),
                None => images.push(None),
            }
        }
        let mut inverses: Vec<Option<Polynomial>> = vec![None; images.len()];
        let mut power_cache: BTreeMap<(usize, i32), Polynomial> = BTreeMap::new();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = match power_cache.get(&(i, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let img = images[i].as_ref().unwrap();
                        let p = if e > 0 {
                            img.pow(e as u32)
                        } else {
                            if inverses[i].is_none() {
                                inverses[i] = Some(img.inverse_unit()?);
                            }
                            inverses[i].as_ref().unwrap().pow((-e) as u32)
                        };
                        power_cache.insert((i, e), p.clone());
                        p
                    }
                };
                t = &t * &p;
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Re-expresses `self` in a ring with (a superset of) the same variable names.
    pub fn embed(&self, target: &Arc<PolyRing>) -> Result<Polynomial, PolyError> {
        let bindings = self.ring.vars.iter().filter_map(|v| Polynomial::var(target, v).ok().map(|p| (v.clone(), p))).collect();
        self.substitute(target, &bindings)
    }

    /// Applies a coefficient homomorphism, landing in `target` (same variables).
    pub fn specialize(&self, sp: &Specializer, target: &Arc<PolyRing>) -> Result<Polynomial, PolyError> {
        assert_eq!(self.ring.vars, target.vars);
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = sp.map(c)?;
            if !d.is_zero() {
                terms.insert(m.clone(), d);
            }
        }
        Ok(Polynomial { ring: target.clone(), terms })
    }

    /// Coefficients as a univariate polynomial in variable `i`, if no other variable occurs.
    pub fn to_univariate(&self, i: usize) -> Result<UPoly<ScalarElement>, PolyError> {
        let name = &self.ring.vars[i];
        let mut c = Vec::new();
        for (m, a) in &self.terms {
            if m.0.iter().enumerate().any(|(j, &e)| (j != i && e != 0) || e < 0) {
                return Err(PolyError::NotUnivariate(name.clone()));
            }
            let k = m.0[i] as usize;
            if c.len() <= k {
                c.resize(k + 1, self.ring.field.zero());
            }
            c[k] = a.clone();
        }
        Ok(UPoly::new(c))
    }

    pub fn from_univariate(ring: &Arc<PolyRing>, i: usize, p: &UPoly<ScalarElement>) -> Self {
        let mut terms = BTreeMap::new();
        for (k, a) in p.coeffs().iter().enumerate() {
            if !a.is_zero() {
                let mut m = Monomial::one(ring.nvars());
                m.0[i] = k as i32;
                terms.insert(m, a.clone());
            }
        }
        Polynomial { ring: ring.clone(), terms }
    }

    /// Shifts invertible variables to valuation zero; returns the shift applied.
    fn normalize_valuation(&self) -> (Polynomial, Monomial) {
        let mut shift = Monomial::one(self.ring.nvars());
        for i in 0..self.ring.nvars() {
            if self.ring.invertible[i] {
                shift.0[i] = -self.min_degree_in(i).unwrap_or(0);
            }
        }
        (self.mul_monomial(&shift), shift)
    }
}

/// Exact quotient `f / g`, or `NotDivisible`.
///
/// In Laurent rings both sides are first shifted to valuation zero in the
/// invertible variables, where Laurent divisibility coincides with polynomial
/// divisibility.
pub fn divide_exact(f: &Polynomial, g: &Polynomial) -> Result<Polynomial, PolyError> {
    if *f.ring != *g.ring {
        return Err(PolyError::MixedRings);
    }
    if g.is_zero() {
        return Err(PolyError::ZeroDivisor);
    }
    if f.is_zero() {
        return Ok(f.clone());
    }
    let (fs, sf) = f.normalize_valuation();
    let (gs, sg) = g.normalize_valuation();
    let (lm, lc) = gs.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
    let lc_inv = lc.inverse()?;
    let mut rem = fs;
    let mut q = Polynomial::zero(&f.ring);
    while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
        let qm = m.div(&lm);
        if qm.0.iter().any(|&e| e < 0) {
            return Err(PolyError::NotDivisible);
        }
        let t = Polynomial { ring: f.ring.clone(), terms: BTreeMap::from([(qm, &c * &lc_inv)]) };
        rem = &rem - &(&t * &gs);
        q = &q + &t;
    }
    // undo the shifts: f = q·g  ⇔  f·x^sf = (q·x^{sf−sg})·(g·x^sg)
    Ok(q.mul_monomial(&sg.div(&sf)))
}

/// Strips the given factors from `f` as often as they divide it.
pub fn radical_match(f: &Polynomial, factors: &[Polynomial]) -> Result<RadicalMatch, PolyError> {
    if f.is_zero() {
        return Err(PolyError::NoMatch { cofactor: "0".into() });
    }
    let mut rest = f.clone();
    let mut multiplicities = Vec::with_capacity(factors.len());
    for g in factors {
        if g.is_constant() {
            return Err(PolyError::NotInvertible(format!("factor {g} is a constant")));
        }
        let mut e = 0;
        loop {
            match divide_exact(&rest, g) {
                Ok(q) => {
                    rest = q;
                    e += 1;
                }
                Err(PolyError::NotDivisible) => break,
                Err(other) => return Err(other),
            }
        }
        multiplicities.push(e);
    }
    match rest.as_constant() {
        Some(unit) if multiplicities.iter().all(|&e| e >= 1) => Ok(RadicalMatch { multiplicities, unit }),
        _ => Err(PolyError::NoMatch { cofactor: rest.to_string() }),
    }
}

/// Monic gcd of two polynomials in the same single variable.
pub fn gcd_univariate(f: &Polynomial, g: &Polynomial) -> Result<Polynomial, PolyError> {
    if *f.ring != *g.ring {
        return Err(PolyError::MixedRings);
    }
    let mut vars = f.support_vars();
    vars.extend(g.support_vars());
    vars.sort_unstable();
    vars.dedup();
    let i = match vars.as_slice() {
        [] => 0,
        [i] => *i,
        _ => return Err(PolyError::NotUnivariate(vars.iter().map(|&i| f.ring.vars[i].as_str()).collect::<Vec<_>>().join(","))),
    };
    if f.ring.nvars() == 0 {
        return Err(PolyError::NotUnivariate(String::new()));
    }
    let a = f.to_univariate(i)?;
    let b = g.to_univariate(i)?;
    if a.is_zero() && b.is_zero() {
        return Ok(Polynomial::zero(&f.ring));
    }
    Ok(Polynomial::from_univariate(&f.ring, i, &a.gcd(&b)))
}

struct PolyEval<'a>(&'a Arc<PolyRing>);

impl Evaluator for PolyEval<'_> {
    type Value = Polynomial;
    type Error = PolyError;

    fn integer(&self, n: &BigInt) -> Result<Polynomial, PolyError> {
        let q = num_rational::BigRational::from_integer(n.clone());
        Ok(Polynomial::constant(self.0, self.0.field.from_rational(&q)?))
    }
    fn variable(&self, name: &str) -> Result<Polynomial, PolyError> {
        if self.0.index_of(name).is_some() {
            return Polynomial::var(self.0, name);
        }
        Ok(Polynomial::constant(self.0, self.0.field.symbol(name)?))
    }
    fn add(&self, a: Polynomial, b: Polynomial) -> Result<Polynomial, PolyError> {
        Ok(&a + &b)
    }
    fn sub(&self, a: Polynomial, b: Polynomial) -> Result<Polynomial, PolyError> {
        Ok(&a - &b)
    }
    fn mul(&self, a: Polynomial, b: Polynomial) -> Result<Polynomial, PolyError> {
        Ok(&a * &b)
    }
    fn neg(&self, a: Polynomial) -> Result<Polynomial, PolyError> {
        Ok(-&a)
    }
    fn div(&self, a: Polynomial, b: Polynomial) -> Result<Polynomial, PolyError> {
        if b.is_zero() {
            return Err(PolyError::ZeroDivisor);
        }
        if let Some(c) = b.as_constant() {
            return Ok(a.scale(&c.inverse()?));
        }
        Ok(&a * &b.inverse_unit()?)
    }
    fn pow(&self, a: Polynomial, e: i64) -> Result<Polynomial, PolyError> {
        if e < 0 {
            if let Some(c) = a.as_constant() {
                return Ok(Polynomial::constant(self.0, c.pow(e)?));
            }
        }
        a.pow_i(e)
    }
}

fn fmt_monomial(ring: &PolyRing, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(ring.vars[i].clone()),
            _ => parts.push(format!("{}^{}", ring.vars[i], e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (m, c) in self.terms.iter().rev() {
            let mono = fmt_monomial(&self.ring, m);
            let cs = c.to_string();
            let term = if mono.is_empty() {
                if c.is_compound() && !out.is_empty() {
                    format!("({cs})")
                } else {
                    cs
                }
            } else if c.is_one() {
                mono
            } else if (-c).is_one() {
                format!("-{mono}")
            } else if c.is_compound() {
                format!("({cs})*{mono}")
            } else {
                format!("{cs}*{mono}")
            };
            if out.is_empty() {
                out = term;
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        f.write_str(&out)
    }
}

fn merge(a: &Polynomial, b: &Polynomial, negate_b: bool) -> Polynomial {
    assert!(*a.ring == *b.ring, "mixed polynomial rings");
    let mut terms = a.terms.clone();
    for (m, c) in &b.terms {
        let c = if negate_b { -c } else { c.clone() };
        match terms.get_mut(m) {
            Some(t) => {
                let s = &*t + &c;
                if s.is_zero() {
                    terms.remove(m);
                } else {
                    *t = s;
                }
            }
            None => {
                terms.insert(m.clone(), c);
            }
        }
    }
    Polynomial { ring: a.ring.clone(), terms }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        merge(self, o, false)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        merge(self, o, true)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        assert!(*self.ring == *o.ring, "mixed polynomial rings");
        let mut terms: BTreeMap<Monomial, ScalarElement> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = ma.mul(mb);
                let p = ca * cb;
                match terms.get_mut(&m) {
                    Some(t) => *t = &*t + &p,
                    None => {
                        terms.insert(m, p);
                    }
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Polynomial { ring: self.ring.clone(), terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{make_field, FieldDescriptor};

    fn ring() -> Arc<PolyRing> {
        let k =
            make_field(&FieldDescriptor::rationals().with_transcendental("lambda").with_extension("eps", "eps^2 - (1 + lambda)")).unwrap();
        PolyRing::new(&k, &["u", "v"])
    }

    fn p(r: &Arc<PolyRing>, s: &str) -> Polynomial {
        Polynomial::parse(r, s).unwrap()
    }

    #[test]
    fn grlex_order() {
        assert!(Monomial(vec![0, 2]) > Monomial(vec![1, 0]));
        assert!(Monomial(vec![2, 0]) > Monomial(vec![1, 1]));
        let r = ring();
        assert_eq!(p(&r, "u + v^2").leading().unwrap().0, &Monomial(vec![0, 2]));
    }

    #[test]
    fn product_expands() {
        let r = ring();
        let f = p(&r, "u*v*(u - v)*(lambda*v - u)");
        let g = p(&r, "-u^3*v + (lambda + 1)*u^2*v^2 - lambda*u*v^3");
        assert_eq!(f, g);
        assert!((&f * &Polynomial::zero(&r)).is_zero());
    }

    #[test]
    fn substitution_into_chart() {
        let r = ring();
        let c = PolyRing::new(r.field(), &["xi", "v"]);
        let b = BTreeMap::from([("u".to_string(), p(&c, "xi*v")), ("v".to_string(), p(&c, "v"))]);
        let f = p(&r, "u*v*(u - v)*(u - lambda*v)");
        assert_eq!(f.substitute(&c, &b).unwrap(), p(&c, "xi*(xi - 1)*(xi - lambda)*v^4"));
        assert_eq!(p(&r, "u*(u - v)").substitute(&c, &b).unwrap(), p(&c, "xi*(xi - 1)*v^2"));
        let missing = BTreeMap::from([("u".to_string(), p(&c, "xi*v"))]);
        assert_eq!(f.substitute(&c, &missing), Err(PolyError::UnboundVariable("v".into())));
    }

    #[test]
    fn negative_powers_need_units() {
        let r = ring();
        let l = PolyRing::laurent(r.field(), &["xi", "v"], &["v"]);
        let f = p(&l, "v^-2*xi + 1");
        assert_eq!(&f * &p(&l, "v^2"), p(&l, "xi + v^2"));
        assert!(matches!(Polynomial::parse(&l, "xi^-1"), Err(PolyError::NotInvertible(_))));
        assert_eq!(p(&l, "xi/v"), p(&l, "xi*v^-1"));
    }

    #[test]
    fn exact_division() {
        let r = ring();
        let f = p(&r, "u*v*(u - v)^2");
        assert_eq!(divide_exact(&f, &p(&r, "u - v")).unwrap(), p(&r, "u*v*(u - v)"));
        assert_eq!(divide_exact(&p(&r, "u*v"), &p(&r, "u - v")), Err(PolyError::NotDivisible));
        assert_eq!(divide_exact(&f, &Polynomial::zero(&r)), Err(PolyError::ZeroDivisor));
        let l = PolyRing::laurent(r.field(), &["u", "v"], &["v"]);
        assert_eq!(divide_exact(&p(&l, "u"), &p(&l, "u*v^3")).unwrap(), p(&l, "v^-3"));
        assert_eq!(divide_exact(&p(&l, "u^2 - u*v^-1"), &p(&l, "u*v - 1")).unwrap(), p(&l, "u*v^-1"));
    }

    #[test]
    fn radical_matching() {
        let r = ring();
        let m = radical_match(&p(&r, "3*u^2*v"), &[p(&r, "u"), p(&r, "v")]).unwrap();
        assert_eq!(m.multiplicities, vec![2, 1]);
        assert_eq!(m.unit, r.field().from_int(3));
        assert!(matches!(radical_match(&p(&r, "u^2*v + 1"), &[p(&r, "u")]), Err(PolyError::NoMatch { .. })));
        assert!(matches!(radical_match(&p(&r, "u^2"), &[p(&r, "u"), p(&r, "v")]), Err(PolyError::NoMatch { .. })));
    }

    #[test]
    fn univariate_gcd() {
        let r = PolyRing::new(ring().field(), &["xi"]);
        let c = p(&r, "xi*(xi - 1)*(lambda - xi)");
        assert_eq!(gcd_univariate(&c, &c.derivative(0)).unwrap(), Polynomial::one(&r));
        assert_eq!(gcd_univariate(&p(&r, "2*xi - 4"), &Polynomial::zero(&r)).unwrap(), p(&r, "xi - 2"));
        assert_eq!(gcd_univariate(&p(&r, "xi^2"), &p(&r, "xi^3")).unwrap(), p(&r, "xi^2"));
        let two = ring();
        assert!(matches!(gcd_univariate(&p(&two, "u"), &p(&two, "v")), Err(PolyError::NotUnivariate(_))));
    }

    #[test]
    fn print_parse_round_trip() {
        let r = ring();
        for s in ["0", "-u", "2*eps*u*v - u*v*(u^2 + lambda*v^2)", "(lambda + 1)*u^2*v^2 + 1/(lambda - 1)", "eps - 1/2*u"] {
            let f = p(&r, s);
            assert_eq!(p(&r, &f.to_string()), f, "{s} printed as {f}");
        }
    }
}
