//! Exact coefficient fields.
//!
//! A field is described by a [`FieldDescriptor`]: a base (Q or F_p), an
//! optional free transcendental (λ), and an optional algebraic generator given
//! by a monic minimal polynomial (ε with ε² = 1 + λ, or ζ with ζ² + ζ + 1 = 0).
//! Elements are kept in canonical form, so structural equality is
//! mathematical equality. A [`Specializer`] maps elements into a prime field
//! for randomized cross-checks.

pub mod base;
pub mod ratfn;
pub mod roots;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{self, Evaluator, ParseError};
use base::{is_prime, Base, Coeff, UPoly};
use ratfn::RatFn;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("minimal polynomial of {name} is reducible (root {root})")]
    ReducibleMinimalPolynomial { name: String, root: String },
    #[error("bad specialization: {0}")]
    BadSpecialization(String),
    #[error("unsupported field descriptor: {0}")]
    UnsupportedDescriptor(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different field contexts")]
    MixedContexts,
    #[error("specialized minimal polynomial of {name} has no root in the target field")]
    NoRootExists { name: String },
    #[error("a denominator vanishes under the specialization")]
    DenominatorVanishes,
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseSpec {
    Rationals,
    Prime(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionSpec {
    pub name: String,
    /// Monic polynomial in `name`, coefficients in the transcendentals.
    pub minpoly: String,
}

/// Serializable description of a coefficient field (the CLI `--field` payload).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub base: BaseSpec,
    #[serde(default)]
    pub transcendentals: Vec<String>,
    #[serde(default)]
    pub extensions: Vec<ExtensionSpec>,
    /// Values for transcendentals, or explicit roots for algebraic generators.
    #[serde(default)]
    pub bindings: BTreeMap<String, String>,
    /// Values a transcendental may not be bound to.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub excluded: BTreeMap<String, Vec<String>>,
}

impl FieldDescriptor {
    pub fn rationals() -> Self {
        FieldDescriptor {
            base: BaseSpec::Rationals,
            transcendentals: Vec::new(),
            extensions: Vec::new(),
            bindings: BTreeMap::new(),
            excluded: BTreeMap::new(),
        }
    }

    pub fn prime(p: u64) -> Self {
        FieldDescriptor { base: BaseSpec::Prime(p), ..Self::rationals() }
    }

    pub fn with_transcendental(mut self, name: &str) -> Self {
        self.transcendentals.push(name.to_string());
        self
    }

    pub fn with_extension(mut self, name: &str, minpoly: &str) -> Self {
        self.extensions.push(ExtensionSpec { name: name.to_string(), minpoly: minpoly.to_string() });
        self
    }

    pub fn with_binding(mut self, name: &str, value: impl ToString) -> Self {
        self.bindings.insert(name.to_string(), value.to_string());
        self
    }

    pub fn with_excluded(mut self, name: &str, values: &[&str]) -> Self {
        self.excluded.insert(name.to_string(), values.iter().map(|v| v.to_string()).collect());
        self
    }

    /// Same generators over a different base, with fresh bindings.
    pub fn rebased(&self, base: BaseSpec, bindings: BTreeMap<String, String>) -> Self {
        FieldDescriptor { base, bindings, ..self.clone() }
    }
}

#[derive(Debug)]
struct Extension {
    name: String,
    modulus: UPoly<RatFn>,
}

/// A constructed field. Shared behind an `Arc`; immutable.
#[derive(Debug)]
pub struct FieldContext {
    descriptor: FieldDescriptor,
    template: Base,
    free: Option<String>,
    bound: BTreeMap<String, Base>,
    ext: Option<Extension>,
    bound_root: Option<(String, Base)>,
    minpolys: BTreeMap<String, UPoly<RatFn>>,
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || self.descriptor == other.descriptor
    }
}

fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    struct Q;
    impl Evaluator for Q {
        type Value = BigRational;
        type Error = ScalarError;
        fn integer(&self, n: &BigInt) -> Result<BigRational, ScalarError> {
            Ok(BigRational::from_integer(n.clone()))
        }
        fn variable(&self, name: &str) -> Result<BigRational, ScalarError> {
            Err(ScalarError::UnknownSymbol(name.to_string()))
        }
        fn add(&self, a: BigRational, b: BigRational) -> Result<BigRational, ScalarError> {
            Ok(a + b)
        }
        fn sub(&self, a: BigRational, b: BigRational) -> Result<BigRational, ScalarError> {
            Ok(a - b)
        }
        fn mul(&self, a: BigRational, b: BigRational) -> Result<BigRational, ScalarError> {
            Ok(a * b)
        }
        fn neg(&self, a: BigRational) -> Result<BigRational, ScalarError> {
            Ok(-a)
        }
        fn div(&self, a: BigRational, b: BigRational) -> Result<BigRational, ScalarError> {
            if num_traits::Zero::is_zero(&b) {
                return Err(ScalarError::DivisionByZero);
            }
            Ok(a / b)
        }
        fn pow(&self, a: BigRational, e: i64) -> Result<BigRational, ScalarError> {
            if e < 0 && num_traits::Zero::is_zero(&a) {
                return Err(ScalarError::DivisionByZero);
            }
            Ok(num_traits::Pow::pow(a, e as i32))
        }
    }
    expr::parse(s)?.eval(&Q)
}

/// Evaluates a minimal polynomial text into a polynomial in the generator.
struct MinpolyEval<'a> {
    generator: &'a str,
    template: &'a Base,
    free: Option<&'a str>,
    bound: &'a BTreeMap<String, Base>,
}

impl Evaluator for MinpolyEval<'_> {
    type Value = UPoly<RatFn>;
    type Error = ScalarError;

    fn integer(&self, n: &BigInt) -> Result<Self::Value, ScalarError> {
        let b = self.template.embed_rational(&BigRational::from_integer(n.clone())).ok_or(ScalarError::DivisionByZero)?;
        Ok(UPoly::constant(RatFn::constant(b)))
    }

    fn variable(&self, name: &str) -> Result<Self::Value, ScalarError> {
        if name == self.generator {
            return Ok(UPoly::monomial(RatFn::constant(self.template.one_like()), 1));
        }
        if Some(name) == self.free {
            return Ok(UPoly::constant(RatFn::variable(self.template)));
        }
        if let Some(b) = self.bound.get(name) {
            return Ok(UPoly::constant(RatFn::constant(b.clone())));
        }
        Err(ScalarError::UnknownSymbol(name.to_string()))
    }

    fn add(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value, ScalarError> {
        Ok(a.add(&b))
    }

    fn sub(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value, ScalarError> {
        Ok(a.sub(&b))
    }

    fn mul(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value, ScalarError> {
        Ok(a.mul(&b))
    }

    fn neg(&self, a: Self::Value) -> Result<Self::Value, ScalarError> {
        Ok(a.neg())
    }

    fn div(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value, ScalarError> {
        match b.degree() {
            Some(0) => Ok(a.scale(&b.coeffs()[0].inverse().ok_or(ScalarError::DivisionByZero)?)),
            None => Err(ScalarError::DivisionByZero),
            _ => Err(ScalarError::UnsupportedDescriptor("division by the generator in a minimal polynomial".into())),
        }
    }

    fn pow(&self, a: Self::Value, e: i64) -> Result<Self::Value, ScalarError> {
        if e < 0 {
            let inv = self.div(UPoly::constant(RatFn::constant(self.template.one_like())), a)?;
            return self.pow(inv, -e);
        }
        let mut acc = UPoly::constant(RatFn::constant(self.template.one_like()));
        for _ in 0..e {
            acc = acc.mul(&a);
        }
        Ok(acc)
    }
}

/// Number of integer specializations tried when certifying irreducibility over Q(λ).
const CERTIFY_ATTEMPTS: i64 = 40;

/// Builds a field from its descriptor, validating every invariant.
pub fn make_field(desc: &FieldDescriptor) -> Result<Arc<FieldContext>, ScalarError> {
    let template = match desc.base {
        BaseSpec::Rationals => Base::rational(0),
        BaseSpec::Prime(p) => {
            if !is_prime(p) || p >= 1 << 32 {
                return Err(ScalarError::UnsupportedDescriptor(format!("{p} is not a prime below 2^32")));
            }
            Base::fp(0, p)
        }
    };
    if desc.extensions.len() > 1 {
        return Err(ScalarError::UnsupportedDescriptor("at most one algebraic extension is supported".into()));
    }
    let ext_names: Vec<&str> = desc.extensions.iter().map(|e| e.name.as_str()).collect();
    for name in desc.bindings.keys() {
        if !desc.transcendentals.contains(name) && !ext_names.contains(&name.as_str()) {
            return Err(ScalarError::BadSpecialization(format!("binding for unknown generator {name:?}")));
        }
    }

    let mut bound = BTreeMap::new();
    let mut free = None;
    for t in &desc.transcendentals {
        match desc.bindings.get(t) {
            Some(v) => {
                let q = parse_rational(v)?;
                let b = template.embed_rational(&q).ok_or_else(|| {
                    ScalarError::BadSpecialization(format!("{t} = {v} has a denominator divisible by the characteristic"))
                })?;
                if let Some(excl) = desc.excluded.get(t) {
                    for e in excl {
                        let eb = template.embed_rational(&parse_rational(e)?);
                        if eb.as_ref() == Some(&b) {
                            return Err(ScalarError::BadSpecialization(format!("{t} must avoid {}", excl.join(", "))));
                        }
                    }
                }
                bound.insert(t.clone(), b);
            }
            None => {
                if matches!(desc.base, BaseSpec::Prime(_)) {
                    return Err(ScalarError::BadSpecialization(format!("transcendental {t} must be bound in prime-field mode")));
                }
                if free.is_some() {
                    return Err(ScalarError::UnsupportedDescriptor("at most one free transcendental is supported".into()));
                }
                free = Some(t.clone());
            }
        }
    }

    let mut ext = None;
    let mut bound_root = None;
    let mut minpolys = BTreeMap::new();
    if let Some(spec) = desc.extensions.first() {
        if desc.transcendentals.contains(&spec.name) {
            return Err(ScalarError::UnsupportedDescriptor(format!("{} is declared twice", spec.name)));
        }
        let ev = MinpolyEval { generator: &spec.name, template: &template, free: free.as_deref(), bound: &bound };
        let f = expr::parse(&spec.minpoly)?.eval(&ev)?;
        let degree = f.degree().unwrap_or(0);
        if degree == 0 {
            return Err(ScalarError::UnsupportedDescriptor(format!("minimal polynomial of {} is constant", spec.name)));
        }
        if degree > 3 {
            return Err(ScalarError::UnsupportedDescriptor(format!("minimal polynomial of {} has degree {degree} > 3", spec.name)));
        }
        if !f.lead().unwrap().is_one() {
            return Err(ScalarError::UnsupportedDescriptor(format!("minimal polynomial of {} is not monic", spec.name)));
        }
        minpolys.insert(spec.name.clone(), f.clone());
        if let Some(v) = desc.bindings.get(&spec.name) {
            let b = template
                .embed_rational(&parse_rational(v)?)
                .ok_or_else(|| ScalarError::BadSpecialization(format!("{} = {v} is not in the base field", spec.name)))?;
            let val = f.eval(&RatFn::constant(b.clone())).unwrap();
            if !val.is_zero() {
                return Err(ScalarError::BadSpecialization(format!("{v} is not a root of the minimal polynomial of {}", spec.name)));
            }
            bound_root = Some((spec.name.clone(), b));
        } else {
            if let Some(root) = find_root(&f, free.is_some(), desc)? {
                return Err(ScalarError::ReducibleMinimalPolynomial { name: spec.name.clone(), root });
            }
            ext = Some(Extension { name: spec.name.clone(), modulus: f });
        }
    }

    Ok(Arc::new(FieldContext { descriptor: desc.clone(), template, free, bound, ext, bound_root, minpolys }))
}

/// A root of `f` in the base of the tower (as text), or `None` if `f` is
/// irreducible there (degree ≤ 3).
fn find_root(f: &UPoly<RatFn>, has_free: bool, desc: &FieldDescriptor) -> Result<Option<String>, ScalarError> {
    if f.degree() == Some(1) {
        let r = f.coeffs()[0].negate();
        return Ok(Some(r.to_string()));
    }
    let to_base = |g: &UPoly<RatFn>| -> Option<UPoly<Base>> {
        let c: Option<Vec<Base>> = g.coeffs().iter().map(|c| c.as_constant()).collect();
        Some(UPoly::new(c?))
    };
    if !has_free {
        let g = to_base(f).expect("coefficients are constants without a free transcendental");
        return match desc.base {
            BaseSpec::Prime(_) => Ok(roots::prime_roots(&g).first().map(|r| r.to_string())),
            BaseSpec::Rationals => match roots::rational_roots(&g) {
                Some(r) => Ok(r.first().map(|r| r.to_string())),
                None => Err(ScalarError::UnsupportedDescriptor("coefficients too large for the rational root test".into())),
            },
        };
    }
    // Over Q(λ): an irreducible integer specialization certifies irreducibility.
    let mut witness = None;
    for a in (2..2 + CERTIFY_ATTEMPTS / 2).flat_map(|a| [a, -a]) {
        let at = Base::rational(a);
        let spec: Option<Vec<Base>> = f.coeffs().iter().map(|c| c.eval(&at)).collect();
        let Some(spec) = spec else { continue };
        let g = UPoly::new(spec);
        if g.degree() != f.degree() {
            continue;
        }
        match roots::rational_roots(&g) {
            Some(r) if r.is_empty() => return Ok(None),
            Some(r) => witness = Some(format!("{} at specialization {a}", r[0])),
            None => continue,
        }
    }
    Ok(Some(witness.unwrap_or_else(|| "undetermined".into())))
}

impl FieldContext {
    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.descriptor
    }

    /// 0 for Q-based fields, p otherwise.
    pub fn characteristic(&self) -> u64 {
        self.template.characteristic()
    }

    pub fn prime(&self) -> Option<u64> {
        match self.template {
            Base::Fp { p, .. } => Some(p),
            Base::Q(_) => None,
        }
    }

    /// Degree over the base of the algebraic part of the tower.
    pub fn degree(&self) -> usize {
        self.ext.as_ref().map_or(1, |e| e.modulus.degree().unwrap())
    }

    pub fn free_transcendental(&self) -> Option<&str> {
        self.free.as_deref()
    }

    pub fn extension_name(&self) -> Option<&str> {
        self.ext.as_ref().map(|e| e.name.as_str())
    }

    pub fn base_template(&self) -> &Base {
        &self.template
    }

    /// Whether `name` is a generator of this field.
    pub fn has_symbol(&self, name: &str) -> bool {
        self.free.as_deref() == Some(name)
            || self.bound.contains_key(name)
            || self.ext.as_ref().is_some_and(|e| e.name == name)
            || self.bound_root.as_ref().is_some_and(|(n, _)| n == name)
    }

    /// Generator (or bound value) called `name`.
    pub fn symbol(self: &Arc<Self>, name: &str) -> Result<ScalarElement, ScalarError> {
        if self.free.as_deref() == Some(name) {
            return Ok(self.from_ratfn(RatFn::variable(&self.template)));
        }
        if let Some(b) = self.bound.get(name) {
            return Ok(self.from_base(b.clone()));
        }
        if let Some((n, b)) = &self.bound_root {
            if n == name {
                return Ok(self.from_base(b.clone()));
            }
        }
        if let Some(e) = &self.ext {
            if e.name == name {
                let mut c = vec![self.zero_rf(); self.degree()];
                c[1] = RatFn::constant(self.template.one_like());
                return Ok(ScalarElement { ctx: self.clone(), c });
            }
        }
        Err(ScalarError::UnknownSymbol(name.to_string()))
    }

    fn zero_rf(&self) -> RatFn {
        RatFn::constant(self.template.zero_like())
    }

    pub fn zero(self: &Arc<Self>) -> ScalarElement {
        ScalarElement { ctx: self.clone(), c: vec![self.zero_rf(); self.degree()] }
    }

    pub fn one(self: &Arc<Self>) -> ScalarElement {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> ScalarElement {
        self.from_base(self.template.int_like(n))
    }

    pub fn from_rational(self: &Arc<Self>, q: &BigRational) -> Result<ScalarElement, ScalarError> {
        Ok(self.from_base(self.template.embed_rational(q).ok_or(ScalarError::DivisionByZero)?))
    }

    pub fn from_base(self: &Arc<Self>, b: Base) -> ScalarElement {
        self.from_ratfn(RatFn::constant(b))
    }

    fn from_ratfn(self: &Arc<Self>, r: RatFn) -> ScalarElement {
        let mut c = vec![self.zero_rf(); self.degree()];
        c[0] = r;
        ScalarElement { ctx: self.clone(), c }
    }

    /// Parses a scalar expression in the field generators.
    pub fn parse(self: &Arc<Self>, s: &str) -> Result<ScalarElement, ScalarError> {
        expr::parse(s)?.eval(&ScalarEval(self))
    }

    /// Minimal polynomial of the algebraic generator as a list of scalars
    /// (lowest degree first), if any.
    pub fn minimal_polynomial(self: &Arc<Self>, name: &str) -> Option<Vec<ScalarElement>> {
        self.minpolys.get(name).map(|f| f.coeffs().iter().map(|c| self.from_ratfn(c.clone())).collect())
    }

    fn reduce(&self, mut c: Vec<RatFn>) -> Vec<RatFn> {
        let Some(e) = &self.ext else {
            c.truncate(1);
            return c;
        };
        let d = self.degree();
        let m = e.modulus.coeffs();
        for k in (d..c.len()).rev() {
            let t = c[k].clone();
            if t.is_zero() {
                continue;
            }
            for j in 0..d {
                c[k - d + j] = c[k - d + j].minus(&t.times(&m[j]));
            }
            c[k] = t.zero_like();
        }
        c.truncate(d);
        c
    }
}

struct ScalarEval<'a>(&'a Arc<FieldContext>);

impl Evaluator for ScalarEval<'_> {
    type Value = ScalarElement;
    type Error = ScalarError;

    fn integer(&self, n: &BigInt) -> Result<ScalarElement, ScalarError> {
        self.0.from_rational(&BigRational::from_integer(n.clone()))
    }
    fn variable(&self, name: &str) -> Result<ScalarElement, ScalarError> {
        self.0.symbol(name)
    }
    fn add(&self, a: ScalarElement, b: ScalarElement) -> Result<ScalarElement, ScalarError> {
        Ok(&a + &b)
    }
    fn sub(&self, a: ScalarElement, b: ScalarElement) -> Result<ScalarElement, ScalarError> {
        Ok(&a - &b)
    }
    fn mul(&self, a: ScalarElement, b: ScalarElement) -> Result<ScalarElement, ScalarError> {
        Ok(&a * &b)
    }
    fn neg(&self, a: ScalarElement) -> Result<ScalarElement, ScalarError> {
        Ok(-&a)
    }
    fn div(&self, a: ScalarElement, b: ScalarElement) -> Result<ScalarElement, ScalarError> {
        a.div(&b)
    }
    fn pow(&self, a: ScalarElement, e: i64) -> Result<ScalarElement, ScalarError> {
        a.pow(e)
    }
}

/// Element of a [`FieldContext`] in canonical form.
#[derive(Clone, Debug)]
pub struct ScalarElement {
    ctx: Arc<FieldContext>,
    c: Vec<RatFn>,
}

impl PartialEq for ScalarElement {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c && self.ctx == other.ctx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked binary arithmetic.
pub fn arith(a: &ScalarElement, b: &ScalarElement, op: ArithOp) -> Result<ScalarElement, ScalarError> {
    if a.ctx != b.ctx {
        return Err(ScalarError::MixedContexts);
    }
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => a.div(b),
    }
}

impl ScalarElement {
    pub fn ctx(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Coeff::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(Coeff::is_zero)
    }

    /// Components in the power basis of the algebraic generator.
    pub fn components(&self) -> &[RatFn] {
        &self.c
    }

    /// The value as a base-field constant if it involves no generator.
    pub fn as_base(&self) -> Option<Base> {
        if self.c[1..].iter().any(|c| !c.is_zero()) {
            return None;
        }
        self.c[0].as_constant()
    }

    pub fn inverse(&self) -> Result<ScalarElement, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let Some(e) = &self.ctx.ext else {
            let inv = self.c[0].inverse().ok_or(ScalarError::DivisionByZero)?;
            return Ok(ScalarElement { ctx: self.ctx.clone(), c: vec![inv] });
        };
        let a = UPoly::new(self.c.clone());
        let (g, s, _) = a.ext_gcd(&e.modulus);
        debug_assert_eq!(g.degree(), Some(0));
        let mut c = s.coeffs().to_vec();
        c.resize(self.ctx.degree(), self.ctx.zero_rf());
        Ok(ScalarElement { ctx: self.ctx.clone(), c: self.ctx.reduce(c) })
    }

    pub fn div(&self, o: &ScalarElement) -> Result<ScalarElement, ScalarError> {
        if self.ctx != o.ctx {
            return Err(ScalarError::MixedContexts);
        }
        Ok(self * &o.inverse()?)
    }

    pub fn pow(&self, e: i64) -> Result<ScalarElement, ScalarError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = self.ctx.one();
        let mut b = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            n >>= 1;
        }
        Ok(acc)
    }

    /// Whether the printed form needs parentheses as a factor.
    pub fn is_compound(&self) -> bool {
        let nonzero: Vec<&RatFn> = self.c.iter().filter(|c| !c.is_zero()).collect();
        match nonzero.len() {
            0 => false,
            1 => {
                let k = self.c.iter().position(|c| !c.is_zero()).unwrap();
                nonzero[0].is_compound() || (k > 0 && !nonzero[0].has_trivial_denominator())
            }
            _ => true,
        }
    }

    /// Whether the printed form starts with a minus sign.
    pub fn is_negative_looking(&self) -> bool {
        self.to_string().starts_with('-')
    }
}

impl fmt::Display for ScalarElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tvar = self.ctx.free.as_deref().unwrap_or("t");
        let gvar = self.ctx.ext.as_ref().map(|e| e.name.as_str()).unwrap_or("a");
        let mut out = String::new();
        for (k, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = c.fmt_with(tvar);
            let term = if k == 0 {
                cs
            } else {
                let g = if k == 1 { gvar.to_string() } else { format!("{gvar}^{k}") };
                if cs == "1" {
                    g
                } else if cs == "-1" {
                    format!("-{g}")
                } else if c.is_compound() {
                    format!("({cs})*{g}")
                } else {
                    format!("{cs}*{g}")
                }
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
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl Add for &ScalarElement {
    type Output = ScalarElement;
    fn add(self, o: &ScalarElement) -> ScalarElement {
        assert!(self.ctx == o.ctx, "mixed field contexts");
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a.plus(b)).collect();
        ScalarElement { ctx: self.ctx.clone(), c }
    }
}

impl Sub for &ScalarElement {
    type Output = ScalarElement;
    fn sub(self, o: &ScalarElement) -> ScalarElement {
        assert!(self.ctx == o.ctx, "mixed field contexts");
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a.minus(b)).collect();
        ScalarElement { ctx: self.ctx.clone(), c }
    }
}

impl Mul for &ScalarElement {
    type Output = ScalarElement;
    fn mul(self, o: &ScalarElement) -> ScalarElement {
        assert!(self.ctx == o.ctx, "mixed field contexts");
        let d = self.c.len();
        if d == 1 {
            return ScalarElement { ctx: self.ctx.clone(), c: vec![self.c[0].times(&o.c[0])] };
        }
        let mut c = vec![self.ctx.zero_rf(); 2 * d - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] = c[i + j].plus(&a.times(b));
                }
            }
        }
        ScalarElement { ctx: self.ctx.clone(), c: self.ctx.reduce(c) }
    }
}

impl Neg for &ScalarElement {
    type Output = ScalarElement;
    fn neg(self) -> ScalarElement {
        ScalarElement { ctx: self.ctx.clone(), c: self.c.iter().map(Coeff::negate).collect() }
    }
}

impl Coeff for ScalarElement {
    fn zero_like(&self) -> Self {
        self.ctx.zero()
    }
    fn one_like(&self) -> Self {
        self.ctx.one()
    }
    fn is_zero(&self) -> bool {
        ScalarElement::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        ScalarElement::inverse(self).ok()
    }
    fn int_like(&self, n: i64) -> Self {
        self.ctx.from_int(n)
    }
}

/// Ring homomorphism from one field context into a specialization of it.
///
/// The free transcendental must be bound; the algebraic generator maps to an
/// explicitly bound root, to the target's own generator of the same name, or
/// (lazily, on first use) to the smallest root in the target base.
pub struct Specializer {
    source: Arc<FieldContext>,
    target: Arc<FieldContext>,
    transcendental: Option<Base>,
    generator: OnceLock<Result<ScalarElement, ScalarError>>,
    explicit_root: Option<String>,
}

impl Specializer {
    pub fn new(source: &Arc<FieldContext>, target: &Arc<FieldContext>, bindings: &BTreeMap<String, String>) -> Result<Self, ScalarError> {
        if target.free.is_some() {
            return Err(ScalarError::BadSpecialization("target field must not have a free transcendental".into()));
        }
        match (source.characteristic(), target.characteristic()) {
            (0, _) => {}
            (p, q) if p == q => {}
            _ => return Err(ScalarError::BadSpecialization("incompatible characteristics".into())),
        }
        let transcendental = match &source.free {
            None => None,
            Some(t) => {
                let v = bindings.get(t).ok_or_else(|| ScalarError::BadSpecialization(format!("no value for transcendental {t}")))?;
                let b = target.template.embed_rational(&parse_rational(v)?).ok_or(ScalarError::DenominatorVanishes)?;
                if let Some(excl) = source.descriptor.excluded.get(t) {
                    for e in excl {
                        if target.template.embed_rational(&parse_rational(e)?).as_ref() == Some(&b) {
                            return Err(ScalarError::BadSpecialization(format!("{t} must avoid {}", excl.join(", "))));
                        }
                    }
                }
                Some(b)
            }
        };
        let explicit_root = source.ext.as_ref().and_then(|e| bindings.get(&e.name).cloned());
        Ok(Specializer { source: source.clone(), target: target.clone(), transcendental, generator: OnceLock::new(), explicit_root })
    }

    pub fn source(&self) -> &Arc<FieldContext> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FieldContext> {
        &self.target
    }

    fn map_ratfn(&self, r: &RatFn) -> Result<Base, ScalarError> {
        let t = &self.target.template;
        let mapped = r
            .map_base(|b| match b {
                Base::Q(q) => t.embed_rational(q),
                Base::Fp { .. } => Some(b.clone()),
            })
            .ok_or(ScalarError::DenominatorVanishes)?;
        match &self.transcendental {
            None => Ok(mapped.as_constant().expect("no free transcendental in the source")),
            Some(v) => mapped.eval(v).ok_or(ScalarError::DenominatorVanishes),
        }
    }

    fn generator_image(&self) -> Result<ScalarElement, ScalarError> {
        self.generator
            .get_or_init(|| {
                let e = self.source.ext.as_ref().expect("called only with an extension");
                let poly: Vec<Base> = e.modulus.coeffs().iter().map(|c| self.map_ratfn(c)).collect::<Result<_, _>>()?;
                let poly = UPoly::new(poly);
                let check = |img: ScalarElement| -> Result<ScalarElement, ScalarError> {
                    let mut acc = self.target.zero();
                    for c in poly.coeffs().iter().rev() {
                        acc = &(&acc * &img) + &self.target.from_base(c.clone());
                    }
                    if acc.is_zero() {
                        Ok(img)
                    } else {
                        Err(ScalarError::BadSpecialization(format!("chosen image of {} is not a root", e.name)))
                    }
                };
                if let Some(v) = &self.explicit_root {
                    return check(self.target.parse(v)?);
                }
                if self.target.ext.as_ref().is_some_and(|t| t.name == e.name) {
                    return check(self.target.symbol(&e.name)?);
                }
                let root = match &self.target.template {
                    Base::Fp { p, .. } => roots::prime_roots(&poly).first().map(|&v| Base::Fp { v, p: *p }),
                    Base::Q(_) => roots::rational_roots(&poly).and_then(|r| r.first().cloned()).map(Base::Q),
                };
                match root {
                    Some(r) => Ok(self.target.from_base(r)),
                    None => Err(ScalarError::NoRootExists { name: e.name.clone() }),
                }
            })
            .clone()
    }

    pub fn map(&self, a: &ScalarElement) -> Result<ScalarElement, ScalarError> {
        if *a.ctx != *self.source {
            return Err(ScalarError::MixedContexts);
        }
        let mut acc = self.target.zero();
        for (k, c) in a.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = self.target.from_base(self.map_ratfn(c)?);
            let term = if k == 0 { v } else { &v * &self.generator_image()?.pow(k as i64)? };
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

/// One-shot specialization of a single element.
pub fn specialize(
    a: &ScalarElement,
    target: &Arc<FieldContext>,
    bindings: &BTreeMap<String, String>,
) -> Result<ScalarElement, ScalarError> {
    Specializer::new(a.ctx(), target, bindings)?.map(a)
}
