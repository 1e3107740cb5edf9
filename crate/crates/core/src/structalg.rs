//! Finite algebras over a polynomial ring given by structure constants.
//!
//! An algebra is a free module with basis `b₀ … b_{N−1}` over a
//! [`PolyRing`]; `table[i][j]` holds the coordinates of `bᵢ·bⱼ`. Tables for
//! skew presentations `xⁿ = a, yⁿ = b, yx = q·xy + d` are derived by word
//! rewriting; everything else (associativity, identities, traces,
//! discriminants, quotients) is computed from the table.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{self, Evaluator, ParseError};
use crate::polyring::{divide_exact, PolyError, PolyRing, Polynomial};
use crate::scalars::{ScalarElement, ScalarError, Specializer};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgError {
    #[error("operands belong to different algebras")]
    MixedAlgebras,
    #[error("closure failure: {0}")]
    ClosureFailure(String),
    #[error("bad specialization: {0}")]
    BadSpecialization(String),
    #[error("characteristic {characteristic} divides the degree {degree}")]
    CharDividesDegree { characteristic: u64, degree: usize },
    #[error("not an ideal with free quotient: {0}")]
    NotAnIdeal(String),
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("{0} is not invertible")]
    NotInvertible(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Poly(PolyError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

impl From<PolyError> for AlgError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::UnknownSymbol(s) => AlgError::UnknownSymbol(s),
            PolyError::Parse(p) => AlgError::Parse(p),
            PolyError::Scalar(s) => AlgError::Scalar(s),
            other => AlgError::Poly(other),
        }
    }
}

pub type Vector = Vec<Polynomial>;

#[derive(Debug)]
pub struct StructureConstantAlgebra {
    ring: Arc<PolyRing>,
    labels: Vec<String>,
    table: Vec<Vec<Vector>>,
    unit: usize,
    degree: usize,
    symbols: BTreeMap<String, Vector>,
}

/// Skew presentation `xⁿ = a, yⁿ = b, yx = q·xy + d` with `a, b, d` central.
#[derive(Clone, Debug)]
pub struct SkewPresentation {
    pub n: usize,
    pub x_pow: Polynomial,
    pub y_pow: Polynomial,
    pub q: ScalarElement,
    pub d: Polynomial,
    /// Basis labels in the order `xⁱyʲ` with index `j·n + i`; defaults to monomial words.
    pub labels: Option<Vec<String>>,
    /// Extra named elements, given as expressions in `x`, `y` and the ring.
    pub extra_symbols: Vec<(String, String)>,
}

fn zero_vec(ring: &Arc<PolyRing>, n: usize) -> Vector {
    vec![Polynomial::zero(ring); n]
}

fn unit_vec(ring: &Arc<PolyRing>, n: usize, i: usize) -> Vector {
    let mut v = zero_vec(ring, n);
    v[i] = Polynomial::one(ring);
    v
}

fn vadd(a: &mut Vector, b: &Vector) {
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x = &*x + y;
        }
    }
}

fn vscale(a: &Vector, r: &Polynomial) -> Vector {
    a.iter().map(|x| if x.is_zero() { x.clone() } else { x * r }).collect()
}

fn word_label(i: usize, j: usize) -> String {
    let p = |name: &str, e: usize| match e {
        0 => None,
        1 => Some(name.to_string()),
        _ => Some(format!("{name}^{e}")),
    };
    match [p("x", i), p("y", j)] {
        [None, None] => "1".to_string(),
        [Some(a), None] | [None, Some(a)] => a,
        [Some(a), Some(b)] => format!("{a}*{b}"),
    }
}

impl SkewPresentation {
    fn left_mul_xpow(&self, k: usize, v: &Vector, ring: &Arc<PolyRing>) -> Vector {
        let n = self.n;
        let mut out = zero_vec(ring, n * n);
        for (idx, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j) = (idx % n, idx / n);
            let e = i + k;
            let (e, wrap) = (e % n, e / n);
            let mut c = c.clone();
            for _ in 0..wrap {
                c = &c * &self.x_pow;
            }
            out[j * n + e] = &out[j * n + e] + &c;
        }
        out
    }

    fn right_mul_y(&self, v: &Vector, ring: &Arc<PolyRing>) -> Vector {
        let n = self.n;
        let mut out = zero_vec(ring, n * n);
        for (idx, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j) = (idx % n, idx / n);
            if j + 1 < n {
                out[(j + 1) * n + i] = &out[(j + 1) * n + i] + c;
            } else {
                out[i] = &out[i] + &(c * &self.y_pow);
            }
        }
        out
    }

    /// Builds the table by rewriting `(xⁱyʲ)(xᵏyˡ)` to normal words.
    pub fn build(&self, degree: usize) -> Result<Arc<StructureConstantAlgebra>, AlgError> {
        let n = self.n;
        let ring = self.x_pow.ring().clone();
        if **self.y_pow.ring() != *ring || **self.d.ring() != *ring || **self.q.ctx() != **ring.field() {
            return Err(AlgError::MalformedTable("presentation data over different rings".into()));
        }
        let size = n * n;
        let qp = Polynomial::constant(&ring, self.q.clone());
        // ys[j] = yʲ·x in normal form
        let mut ys: Vec<Vector> = vec![unit_vec(&ring, size, 1)];
        for j in 1..n {
            let mut next = vscale(&self.right_mul_y(&ys[j - 1], &ring), &qp);
            let mut dy = zero_vec(&ring, size);
            dy[(j - 1) * n] = self.d.clone();
            vadd(&mut next, &dy);
            ys.push(next);
        }
        let right_mul_x = |v: &Vector| -> Vector {
            let mut out = zero_vec(&ring, size);
            for (idx, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (i, j) = (idx % n, idx / n);
                vadd(&mut out, &vscale(&self.left_mul_xpow(i, &ys[j], &ring), c));
            }
            out
        };
        let table: Vec<Vec<Vector>> = (0..size)
            .map(|a| {
                (0..size)
                    .map(|b| {
                        let mut v = unit_vec(&ring, size, a);
                        for _ in 0..b % n {
                            v = right_mul_x(&v);
                        }
                        for _ in 0..b / n {
                            v = self.right_mul_y(&v, &ring);
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let labels = match &self.labels {
            Some(l) if l.len() == size => l.clone(),
            Some(_) => return Err(AlgError::MalformedTable("wrong number of labels".into())),
            None => (0..size).map(|idx| word_label(idx % n, idx / n)).collect(),
        };
        let mut symbols = BTreeMap::new();
        symbols.insert("x".to_string(), unit_vec(&ring, size, 1));
        symbols.insert("y".to_string(), unit_vec(&ring, size, n));
        let alg = StructureConstantAlgebra::from_table(ring.clone(), labels, table, 0, degree, symbols)?;
        if self.extra_symbols.is_empty() {
            return Ok(alg);
        }
        let mut symbols = alg.symbols.clone();
        for (name, def) in &self.extra_symbols {
            symbols.insert(name.clone(), alg.parse(def)?.c);
        }
        let alg = Arc::try_unwrap(alg).expect("freshly built");
        Ok(Arc::new(StructureConstantAlgebra { symbols, ..alg }))
    }
}

/// Witness that `element^power = value·1` with the component dividing `value` exactly once.
#[derive(Clone, Debug)]
pub struct RadicalWitness {
    pub element: AlgebraElement,
    pub power: usize,
    pub value: Polynomial,
}

impl StructureConstantAlgebra {
    pub fn from_table(
        ring: Arc<PolyRing>,
        labels: Vec<String>,
        table: Vec<Vec<Vector>>,
        unit: usize,
        degree: usize,
        symbols: BTreeMap<String, Vector>,
    ) -> Result<Arc<Self>, AlgError> {
        let n = labels.len();
        if table.len() != n || table.iter().any(|row| row.len() != n || row.iter().any(|v| v.len() != n)) {
            return Err(AlgError::MalformedTable("table shape does not match the basis".into()));
        }
        for (i, row) in table.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if let Some(c) = v.iter().find(|c| !c.is_polynomial() || **c.ring() != *ring) {
                    return Err(AlgError::MalformedTable(format!(
                        "entry {}·{} has coefficient {c} outside the base ring",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        let alg = StructureConstantAlgebra { ring, labels, table, unit, degree, symbols };
        for i in 0..n {
            let e = unit_vec(&alg.ring, n, i);
            if alg.table[unit][i] != e || alg.table[i][unit] != e {
                return Err(AlgError::MalformedTable(format!("{} is not a two-sided unit on {}", alg.labels[unit], alg.labels[i])));
            }
        }
        Ok(Arc::new(alg))
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn entry(&self, i: usize, j: usize) -> &Vector {
        &self.table[i][j]
    }

    pub fn symbol_names(&self) -> impl Iterator<Item = &String> {
        self.symbols.keys()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Copy with one structure constant replaced (mutation tests).
    pub fn with_table_entry(&self, i: usize, j: usize, k: usize, c: Polynomial) -> Arc<Self> {
        let mut table = self.table.clone();
        table[i][j][k] = c;
        Arc::new(StructureConstantAlgebra {
            ring: self.ring.clone(),
            labels: self.labels.clone(),
            table,
            unit: self.unit,
            degree: self.degree,
            symbols: self.symbols.clone(),
        })
    }

    fn mul_vec(&self, a: &Vector, b: &Vector) -> Vector {
        let n = self.rank();
        let mut out = zero_vec(&self.ring, n);
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let s = ai * bj;
                for (k, t) in self.table[i][j].iter().enumerate() {
                    if !t.is_zero() {
                        out[k] = &out[k] + &(&s * t);
                    }
                }
            }
        }
        out
    }

    /// First basis triple violating associativity, if any.
    pub fn associativity_failure(&self) -> Option<(usize, usize, usize)> {
        let n = self.rank();
        (0..n * n * n)
            .into_par_iter()
            .find_first(|&t| {
                let (i, j, k) = (t / (n * n), (t / n) % n, t % n);
                let left = self.mul_vec(&self.table[i][j], &unit_vec(&self.ring, n, k));
                let right = self.mul_vec(&unit_vec(&self.ring, n, i), &self.table[j][k]);
                left != right
            })
            .map(|t| (t / (n * n), (t / n) % n, t % n))
    }

    pub fn check_associativity(&self) -> bool {
        self.associativity_failure().is_none()
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.rank();
        (0..n).all(|i| (i + 1..n).all(|j| self.table[i][j] == self.table[j][i]))
    }

    /// Traces of the left-regular representations of the basis elements.
    fn basis_traces(&self) -> Vec<Polynomial> {
        (0..self.rank()).map(|i| (0..self.rank()).fold(Polynomial::zero(&self.ring), |acc, j| &acc + &self.table[i][j][j])).collect()
    }

    fn trd_scale(&self) -> Result<ScalarElement, AlgError> {
        let f = self.ring.field();
        let p = f.characteristic();
        if p != 0 && (self.degree as u64).is_multiple_of(p) {
            return Err(AlgError::CharDividesDegree { characteristic: p, degree: self.degree });
        }
        Ok(f.from_int(self.degree as i64).inverse()?)
    }

    /// Gram matrix `trd(bᵢbⱼ)` of the reduced-trace form.
    pub fn trace_form(&self) -> Result<Vec<Vec<Polynomial>>, AlgError> {
        let s = self.trd_scale()?;
        let t: Vec<Polynomial> = self.basis_traces().iter().map(|p| p.scale(&s)).collect();
        let n = self.rank();
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.table[i][j].iter().zip(&t).fold(Polynomial::zero(&self.ring), |acc, (c, tr)| &acc + &(c * tr)))
                    .collect()
            })
            .collect())
    }

    /// `det(trd(bᵢbⱼ))`.
    pub fn trace_form_discriminant(&self) -> Result<Polynomial, AlgError> {
        Ok(determinant(self.trace_form()?)?)
    }

    pub fn specialize(&self, sp: &Specializer) -> Result<Arc<Self>, AlgError> {
        let ring = self.ring.with_field(sp.target());
        self.map_coefficients(&ring, |c| Ok(c.specialize(sp, &ring)?))
    }

    /// Applies a ring homomorphism to every structure constant and symbol.
    pub fn map_coefficients(
        &self,
        target: &Arc<PolyRing>,
        f: impl Fn(&Polynomial) -> Result<Polynomial, AlgError>,
    ) -> Result<Arc<Self>, AlgError> {
        let map_vec = |v: &Vector| -> Result<Vector, AlgError> { v.iter().map(&f).collect() };
        let table = self.table.iter().map(|row| row.iter().map(map_vec).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
        let symbols = self.symbols.iter().map(|(k, v)| Ok((k.clone(), map_vec(v)?))).collect::<Result<BTreeMap<_, _>, AlgError>>()?;
        Ok(Arc::new(StructureConstantAlgebra {
            ring: target.clone(),
            labels: self.labels.clone(),
            table,
            unit: self.unit,
            degree: self.degree,
            symbols,
        }))
    }

    /// Copy with additional named elements.
    pub fn with_symbols(&self, extra: BTreeMap<String, Vector>) -> Arc<Self> {
        let mut symbols = self.symbols.clone();
        symbols.extend(extra);
        Arc::new(StructureConstantAlgebra {
            ring: self.ring.clone(),
            labels: self.labels.clone(),
            table: self.table.clone(),
            unit: self.unit,
            degree: self.degree,
            symbols,
        })
    }

    pub fn symbols(&self) -> &BTreeMap<String, Vector> {
        &self.symbols
    }

    /// Product of two coordinate vectors.
    pub fn mul_vectors(&self, a: &Vector, b: &Vector) -> Vector {
        self.mul_vec(a, b)
    }

    /// Algebra dump: labels and printed table entries.
    pub fn dump(&self) -> AlgebraDump {
        let mut table = Vec::new();
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                table.push(TableEntry {
                    left: self.labels[i].clone(),
                    right: self.labels[j].clone(),
                    product: self.fmt_vec(&self.table[i][j]),
                });
            }
        }
        AlgebraDump { ring: self.ring.vars().to_vec(), labels: self.labels.clone(), unit: self.labels[self.unit].clone(), table }
    }

    fn fmt_vec(&self, v: &Vector) -> String {
        let mut parts = Vec::new();
        for (k, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let lab = &self.labels[k];
            let cs = c.to_string();
            let compound = c.num_terms() > 1 || c.terms().next().is_some_and(|(_, s)| s.is_compound());
            let term = if k == self.unit {
                if compound && !parts.is_empty() {
                    format!("({cs})")
                } else {
                    cs
                }
            } else if cs == "1" {
                lab.clone()
            } else if cs == "-1" {
                format!("-{lab}")
            } else if compound {
                format!("({cs})*{lab}")
            } else {
                format!("{cs}*{lab}")
            };
            parts.push(term);
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = parts[0].clone();
        for t in &parts[1..] {
            match t.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(t);
                }
            }
        }
        out
    }

    pub fn parse(self: &Arc<Self>, s: &str) -> Result<AlgebraElement, AlgError> {
        expr::parse(s)?.eval(&AlgEval(self))
    }

    pub fn one(self: &Arc<Self>) -> AlgebraElement {
        AlgebraElement { alg: self.clone(), c: unit_vec(&self.ring, self.rank(), self.unit) }
    }

    pub fn zero(self: &Arc<Self>) -> AlgebraElement {
        AlgebraElement { alg: self.clone(), c: zero_vec(&self.ring, self.rank()) }
    }

    pub fn basis(self: &Arc<Self>, i: usize) -> AlgebraElement {
        AlgebraElement { alg: self.clone(), c: unit_vec(&self.ring, self.rank(), i) }
    }

    /// Named element (generator or derived symbol), or a basis label.
    pub fn symbol(self: &Arc<Self>, name: &str) -> Option<AlgebraElement> {
        if let Some(v) = self.symbols.get(name) {
            return Some(AlgebraElement { alg: self.clone(), c: v.clone() });
        }
        self.index_of(name).map(|i| self.basis(i))
    }

    pub fn scalar(self: &Arc<Self>, r: &Polynomial) -> AlgebraElement {
        let mut c = zero_vec(&self.ring, self.rank());
        c[self.unit] = r.clone();
        AlgebraElement { alg: self.clone(), c }
    }

    pub fn element(self: &Arc<Self>, c: Vector) -> AlgebraElement {
        assert_eq!(c.len(), self.rank());
        AlgebraElement { alg: self.clone(), c }
    }
}

impl PartialEq for StructureConstantAlgebra {
    fn eq(&self, o: &Self) -> bool {
        std::ptr::eq(self, o) || (self.labels == o.labels && *self.ring == *o.ring && self.table == o.table)
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct TableEntry {
    pub left: String,
    pub right: String,
    pub product: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct AlgebraDump {
    pub ring: Vec<String>,
    pub labels: Vec<String>,
    pub unit: String,
    pub table: Vec<TableEntry>,
}

/// Fraction-free (Bareiss) determinant over a polynomial ring.
pub fn determinant(mut m: Vec<Vec<Polynomial>>) -> Result<Polynomial, PolyError> {
    let n = m.len();
    let ring = match m.first().and_then(|r| r.first()) {
        Some(c) => c.ring().clone(),
        None => return Err(PolyError::ZeroDivisor),
    };
    let mut negate = false;
    let mut prev = Polynomial::one(&ring);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return Ok(Polynomial::zero(&ring)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = divide_exact(&num, &prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if negate { -&d } else { d })
}

/// Element of a [`StructureConstantAlgebra`].
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    alg: Arc<StructureConstantAlgebra>,
    c: Vector,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c && *self.alg == *o.alg
    }
}

impl AlgebraElement {
    pub fn algebra(&self) -> &Arc<StructureConstantAlgebra> {
        &self.alg
    }

    pub fn coords(&self) -> &[Polynomial] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Polynomial::is_zero)
    }

    /// The base-ring value if the element is a multiple of the unit.
    pub fn as_scalar(&self) -> Option<Polynomial> {
        let u = self.alg.unit;
        self.c.iter().enumerate().all(|(k, c)| k == u || c.is_zero()).then(|| self.c[u].clone())
    }

    pub fn add(&self, o: &Self) -> Result<Self, AlgError> {
        self.same(o)?;
        let mut c = self.c.clone();
        vadd(&mut c, &o.c);
        Ok(AlgebraElement { alg: self.alg.clone(), c })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, AlgError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        AlgebraElement { alg: self.alg.clone(), c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, r: &Polynomial) -> Self {
        AlgebraElement { alg: self.alg.clone(), c: vscale(&self.c, r) }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = self.alg.one();
        for _ in 0..e {
            acc = AlgebraElement { alg: self.alg.clone(), c: self.alg.mul_vec(&acc.c, &self.c) };
        }
        acc
    }

    fn same(&self, o: &Self) -> Result<(), AlgError> {
        if *self.alg == *o.alg {
            Ok(())
        } else {
            Err(AlgError::MixedAlgebras)
        }
    }

    /// `trd(a) = tr(L_a) / deg`.
    pub fn reduced_trace(&self) -> Result<Polynomial, AlgError> {
        let s = self.alg.trd_scale()?;
        let t = self.alg.basis_traces();
        let tr = self.c.iter().zip(&t).fold(Polynomial::zero(&self.alg.ring), |acc, (a, b)| &acc + &(a * b));
        Ok(tr.scale(&s))
    }
}

/// Bilinear product.
pub fn multiply(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, AlgError> {
    a.same(b)?;
    Ok(AlgebraElement { alg: a.alg.clone(), c: a.alg.mul_vec(&a.c, &b.c) })
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.alg.fmt_vec(&self.c))
    }
}

struct AlgEval<'a>(&'a Arc<StructureConstantAlgebra>);

impl Evaluator for AlgEval<'_> {
    type Value = AlgebraElement;
    type Error = AlgError;

    fn integer(&self, n: &BigInt) -> Result<AlgebraElement, AlgError> {
        let q = num_rational::BigRational::from_integer(n.clone());
        let r = Polynomial::constant(&self.0.ring, self.0.ring.field().from_rational(&q)?);
        Ok(self.0.scalar(&r))
    }
    fn variable(&self, name: &str) -> Result<AlgebraElement, AlgError> {
        if let Some(e) = self.0.symbols.get(name) {
            return Ok(self.0.element(e.clone()));
        }
        if self.0.ring.index_of(name).is_some() {
            return Ok(self.0.scalar(&Polynomial::var(&self.0.ring, name)?));
        }
        if let Some(i) = self.0.index_of(name) {
            return Ok(self.0.basis(i));
        }
        let s = self.0.ring.field().symbol(name)?;
        Ok(self.0.scalar(&Polynomial::constant(&self.0.ring, s)))
    }
    fn add(&self, a: AlgebraElement, b: AlgebraElement) -> Result<AlgebraElement, AlgError> {
        a.add(&b)
    }
    fn sub(&self, a: AlgebraElement, b: AlgebraElement) -> Result<AlgebraElement, AlgError> {
        a.sub(&b)
    }
    fn mul(&self, a: AlgebraElement, b: AlgebraElement) -> Result<AlgebraElement, AlgError> {
        multiply(&a, &b)
    }
    fn neg(&self, a: AlgebraElement) -> Result<AlgebraElement, AlgError> {
        Ok(a.neg())
    }
    fn div(&self, a: AlgebraElement, b: AlgebraElement) -> Result<AlgebraElement, AlgError> {
        let r = b.as_scalar().ok_or_else(|| AlgError::NotInvertible(b.to_string()))?;
        let inv = match r.as_constant() {
            Some(c) => Polynomial::constant(&self.0.ring, c.inverse()?),
            None => r.inverse_unit()?,
        };
        Ok(a.scale(&inv))
    }
    fn pow(&self, a: AlgebraElement, e: i64) -> Result<AlgebraElement, AlgError> {
        if e >= 0 {
            return Ok(a.pow(e as u32));
        }
        let r = a.as_scalar().ok_or_else(|| AlgError::NotInvertible(a.to_string()))?;
        Ok(self.0.scalar(&r.pow_i(e)?))
    }
}

/// Whether `lhs − rhs` is the zero element.
pub fn verify_identity(alg: &Arc<StructureConstantAlgebra>, lhs: &str, rhs: &str) -> Result<bool, AlgError> {
    Ok(alg.parse(lhs)?.sub(&alg.parse(rhs)?)?.is_zero())
}

/// Searches `π = b − s·m·1` (`b` a non-unit basis element or symbol, `s` a small
/// scalar, `m` a monomial of degree ≤ 2) with `π^deg = r·1` where `component`
/// divides `r` exactly once.
pub fn find_radical_witness(alg: &Arc<StructureConstantAlgebra>, component: &Polynomial) -> Option<RadicalWitness> {
    let ring = alg.ring();
    let field = ring.field();
    let mut scalars = vec![field.zero(), field.one(), -&field.one()];
    // algebraic generators, whether adjoined or bound to a root
    for e in &field.descriptor().extensions {
        let g = field.symbol(&e.name).ok()?;
        for p in 1..=2 {
            let gp = g.pow(p).ok()?;
            if !scalars.contains(&gp) {
                scalars.push(-&gp);
                scalars.push(gp);
            }
        }
    }
    let nv = ring.nvars();
    let mut monos = vec![vec![0i32; nv]];
    for i in 0..nv {
        let mut m = vec![0; nv];
        m[i] = 1;
        monos.push(m);
    }
    for i in 0..nv {
        for j in i..nv {
            let mut m = vec![0; nv];
            m[i] += 1;
            m[j] += 1;
            monos.push(m);
        }
    }
    let deg = alg.degree() as u32;
    for b in (0..alg.rank()).filter(|&b| b != alg.unit_index()) {
        for s in &scalars {
            for (mi, m) in monos.iter().enumerate() {
                if s.is_zero() && mi > 0 {
                    continue;
                }
                let shift = Polynomial::term(ring, crate::polyring::Monomial(m.clone()), s.clone());
                let pi = alg.basis(b).sub(&alg.scalar(&shift)).ok()?;
                let Some(r) = pi.pow(deg).as_scalar() else { continue };
                let Ok(q) = divide_exact(&r, component) else { continue };
                if divide_exact(&q, component).is_err() {
                    return Some(RadicalWitness { element: pi, power: deg as usize, value: r });
                }
            }
        }
    }
    None
}

/// Result of [`quotient_by_generators`].
#[derive(Debug, Clone)]
pub struct Quotient {
    pub algebra: Arc<StructureConstantAlgebra>,
    /// Base-ring variables set to zero.
    pub killed_vars: Vec<String>,
    /// Labels of basis elements eliminated by the ideal.
    pub killed_basis: Vec<String>,
    pub commutative: bool,
    /// Image of each original basis element in the surviving basis.
    pub projection: Vec<Vector>,
}

fn is_unit_coeff(c: &Polynomial) -> bool {
    !c.is_zero() && c.is_unit()
}

struct Elimination {
    /// (column, vector with 1 in the column and 0 in every other pivot column)
    pivots: Vec<(usize, Vector)>,
    leftovers: Vec<Vector>,
}

fn reduce_by(v: &mut Vector, pivots: &[(usize, Vector)]) {
    for (col, p) in pivots {
        if !v[*col].is_zero() {
            let f = -&v[*col];
            vadd(v, &vscale(p, &f));
        }
    }
}

fn eliminate(vectors: &[Vector]) -> Result<Elimination, AlgError> {
    let mut pivots: Vec<(usize, Vector)> = Vec::new();
    let mut pending: Vec<Vector> = vectors.to_vec();
    loop {
        let mut leftovers = Vec::new();
        let mut progress = false;
        for mut v in pending {
            reduce_by(&mut v, &pivots);
            if v.iter().all(Polynomial::is_zero) {
                continue;
            }
            let Some(col) = (0..v.len()).rev().find(|&k| is_unit_coeff(&v[k])) else {
                leftovers.push(v);
                continue;
            };
            let inv = v[col].inverse_unit()?;
            let v = vscale(&v, &inv);
            for (_, p) in pivots.iter_mut() {
                if !p[col].is_zero() {
                    let f = -&p[col];
                    vadd(p, &vscale(&v, &f));
                }
            }
            pivots.push((col, v));
            progress = true;
        }
        if !progress {
            return Ok(Elimination { pivots, leftovers });
        }
        pending = leftovers;
    }
}

/// Finds a variable `t` with `(gens) = (t)`, if the generators all have the
/// form `t·sᵢ` with the `sᵢ` generating the unit ideal.
fn principal_variable(ring: &Arc<PolyRing>, gens: &[Polynomial]) -> Option<usize> {
    (0..ring.nvars()).filter(|&i| !ring.is_invertible(i)).find(|&i| {
        let t = Polynomial::var(ring, &ring.vars()[i]).unwrap();
        let cof: Option<Vec<Polynomial>> = gens.iter().map(|g| divide_exact(g, &t).ok()).collect();
        cof.is_some_and(|c| generates_unit(&c))
    })
}

/// Whether the polynomials generate the unit ideal. Decided only when one of
/// them is a unit or all of them live in a single variable.
fn generates_unit(polys: &[Polynomial]) -> bool {
    if polys.iter().any(|c| c.is_unit()) {
        return true;
    }
    let Some(first) = polys.first() else { return false };
    let mut g = first.clone();
    for c in &polys[1..] {
        match crate::polyring::gcd_univariate(&g, c) {
            Ok(h) => g = h,
            Err(_) => return false,
        }
    }
    g.is_unit()
}

/// A basis direction `k` whose single-direction residues `fᵢ·bₖ` have
/// coefficients generating `(1)`, so that `bₖ` itself lies in the ideal.
fn saturated_direction(leftovers: &[Vector]) -> Option<usize> {
    let mut by_dir: BTreeMap<usize, Vec<Polynomial>> = BTreeMap::new();
    for v in leftovers {
        let mut nz = v.iter().enumerate().filter(|(_, c)| !c.is_zero());
        if let (Some((k, c)), None) = (nz.next(), nz.next()) {
            by_dir.entry(k).or_default().push(c.clone());
        }
    }
    by_dir.into_iter().find(|(_, cs)| generates_unit(cs)).map(|(k, _)| k)
}

fn drop_variable(ring: &Arc<PolyRing>, i: usize) -> (Arc<PolyRing>, BTreeMap<String, Polynomial>) {
    let names: Vec<&str> = ring.vars().iter().enumerate().filter(|(k, _)| *k != i).map(|(_, v)| v.as_str()).collect();
    let inv: Vec<&str> = ring.invertible_vars().into_iter().filter(|v| *v != ring.vars()[i]).collect();
    let target = PolyRing::laurent(ring.field(), &names, &inv);
    let mut b: BTreeMap<String, Polynomial> = names.iter().map(|v| (v.to_string(), Polynomial::var(&target, v).unwrap())).collect();
    b.insert(ring.vars()[i].clone(), Polynomial::zero(&target));
    (target, b)
}

/// Quotient of `alg` by the two-sided ideal generated by `kill`.
///
/// The ideal is spanned over the base ring by `bᵢ·g·bⱼ`. Coordinates with
/// unit coefficients are eliminated, and a basis vector is added outright
/// once its multiples alone generate `(1)`. Whatever remains must be a multiple of
/// the unit by a principal variable ideal `(t)`, which is then set to zero
/// in the base ring. The procedure repeats until nothing remains; any other
/// residue means the quotient is not free over the reduced base and is
/// reported as `NotAnIdeal`.
pub fn quotient_by_generators(alg: &Arc<StructureConstantAlgebra>, kill: &[AlgebraElement]) -> Result<Quotient, AlgError> {
    let n = alg.rank();
    for g in kill {
        if *g.alg != **alg {
            return Err(AlgError::MixedAlgebras);
        }
    }
    let mut gens: Vec<Vector> = Vec::new();
    for g in kill {
        for i in 0..n {
            let left = alg.mul_vec(&unit_vec(&alg.ring, n, i), &g.c);
            for j in 0..n {
                gens.push(alg.mul_vec(&left, &unit_vec(&alg.ring, n, j)));
            }
        }
    }
    let mut ring = alg.ring.clone();
    let mut table = alg.table.clone();
    let mut killed_vars = Vec::new();
    loop {
        let el = eliminate(&gens)?;
        if el.pivots.iter().any(|(c, _)| *c == alg.unit) {
            return Err(AlgError::NotAnIdeal("the ideal contains the unit".into()));
        }
        if el.leftovers.is_empty() {
            return finish(alg, ring, &table, el.pivots, killed_vars);
        }
        if let Some(k) = saturated_direction(&el.leftovers) {
            gens.push(unit_vec(&ring, n, k));
            continue;
        }
        let pure: Vec<Polynomial> = el
            .leftovers
            .iter()
            .filter(|v| v.iter().enumerate().all(|(k, c)| k == alg.unit || c.is_zero()))
            .map(|v| v[alg.unit].clone())
            .collect();
        if pure.is_empty() {
            return Err(AlgError::NotAnIdeal(format!("residual generator {} is not central", alg.fmt_vec(&el.leftovers[0]))));
        }
        let Some(t) = principal_variable(&ring, &pure) else {
            return Err(AlgError::NotAnIdeal(format!(
                "base ideal ({}) is not generated by a variable",
                pure.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
            )));
        };
        let (target, b) = drop_variable(&ring, t);
        killed_vars.push(ring.vars()[t].clone());
        let reduce = |v: &Vector| -> Result<Vector, AlgError> { v.iter().map(|c| Ok(c.substitute(&target, &b)?)).collect() };
        gens = gens.iter().map(reduce).collect::<Result<_, _>>()?;
        table = table.iter().map(|row| row.iter().map(reduce).collect::<Result<Vec<_>, _>>()).collect::<Result<_, _>>()?;
        ring = target;
    }
}

fn finish(
    alg: &Arc<StructureConstantAlgebra>,
    ring: Arc<PolyRing>,
    table: &[Vec<Vector>],
    pivots: Vec<(usize, Vector)>,
    killed_vars: Vec<String>,
) -> Result<Quotient, AlgError> {
    let n = alg.rank();
    let killed: Vec<usize> = pivots.iter().map(|(c, _)| *c).collect();
    let surviving: Vec<usize> = (0..n).filter(|k| !killed.contains(k)).collect();
    let m = surviving.len();
    // bₖ ≡ −Σ pₗ bₗ for a pivot on k; survivors map to themselves
    let mut projection: Vec<Vector> = Vec::with_capacity(n);
    for k in 0..n {
        let mut out = zero_vec(&ring, m);
        match pivots.iter().find(|(c, _)| *c == k) {
            Some((_, p)) => {
                for (s, &l) in surviving.iter().enumerate() {
                    out[s] = -&p[l];
                }
            }
            None => out[surviving.iter().position(|&s| s == k).unwrap()] = Polynomial::one(&ring),
        }
        projection.push(out);
    }
    let project = |v: &Vector| -> Vector {
        let mut out = zero_vec(&ring, m);
        for (k, c) in v.iter().enumerate() {
            if !c.is_zero() {
                vadd(&mut out, &vscale(&projection[k], c));
            }
        }
        out
    };
    let qtable: Vec<Vec<Vector>> = surviving.iter().map(|&i| surviving.iter().map(|&j| project(&table[i][j])).collect()).collect();
    let labels: Vec<String> = surviving.iter().map(|&k| alg.labels[k].clone()).collect();
    let unit = surviving.iter().position(|&k| k == alg.unit).unwrap();
    let symbols = BTreeMap::new();
    let q = StructureConstantAlgebra::from_table(ring, labels, qtable, unit, alg.degree, symbols)
        .map_err(|e| AlgError::NotAnIdeal(e.to_string()))?;
    if let Some((i, j, k)) = q.associativity_failure() {
        return Err(AlgError::NotAnIdeal(format!("quotient is not associative on ({}, {}, {})", q.labels[i], q.labels[j], q.labels[k])));
    }
    let commutative = q.is_commutative();
    Ok(Quotient { killed_basis: killed.iter().map(|&k| alg.labels[k].clone()).collect(), algebra: q, killed_vars, commutative, projection })
}

impl Quotient {
    /// Image of an element of the original algebra.
    pub fn project(&self, a: &AlgebraElement) -> Result<AlgebraElement, AlgError> {
        let ring = self.algebra.ring().clone();
        let src = a.alg.ring();
        let mut b = BTreeMap::new();
        for v in src.vars() {
            b.insert(v.clone(), if self.killed_vars.contains(v) { Polynomial::zero(&ring) } else { Polynomial::var(&ring, v)? });
        }
        let mut out = zero_vec(&ring, self.algebra.rank());
        for (k, c) in a.c.iter().enumerate() {
            if !c.is_zero() {
                let c = c.substitute(&ring, &b)?;
                vadd(&mut out, &vscale(&self.projection[k], &c));
            }
        }
        Ok(self.algebra.element(out))
    }
}
