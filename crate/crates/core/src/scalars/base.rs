//! Prime-field and rational base scalars plus the dense univariate polynomial
//! helper used for every level of the field tower.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Minimal field interface needed by [`UPoly`].
///
/// Values carry enough information to produce their own zero and one, which
/// lets prime-field elements keep their modulus without a separate context.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
    fn int_like(&self, n: i64) -> Self;

    fn is_one(&self) -> bool {
        *self == self.one_like()
    }
}

/// Element of Q or of a prime field F_p (p < 2^32).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Base {
    Q(BigRational),
    Fp { v: u64, p: u64 },
}

impl Base {
    pub fn rational(n: i64) -> Self {
        Base::Q(BigRational::from_integer(n.into()))
    }

    pub fn fp(v: i64, p: u64) -> Self {
        Base::Fp { v: v.rem_euclid(p as i64) as u64, p }
    }

    /// Reduces a rational into the same field as `self`; `None` if the
    /// denominator vanishes mod p.
    pub fn embed_rational(&self, q: &BigRational) -> Option<Self> {
        match self {
            Base::Q(_) => Some(Base::Q(q.clone())),
            Base::Fp { p, .. } => rational_mod(q, *p).map(|v| Base::Fp { v, p: *p }),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Base::Q(_) => 0,
            Base::Fp { p, .. } => *p,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Base::Q(q) => Some(q),
            Base::Fp { .. } => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Base::Q(q) => q.is_negative(),
            Base::Fp { .. } => false,
        }
    }
}

/// `q mod p`, or `None` when the denominator is divisible by `p`.
pub fn rational_mod(q: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let num = q.numer().mod_floor(&pb).to_u64().expect("reduced residue");
    let den = q.denom().mod_floor(&pb).to_u64().expect("reduced residue");
    if den == 0 {
        return None;
    }
    Some(mul_mod(num, inv_mod(den, p)?, p))
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(p as i128) as u64)
}

/// Deterministic Miller–Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl Coeff for Base {
    fn zero_like(&self) -> Self {
        match self {
            Base::Q(_) => Base::Q(BigRational::zero()),
            Base::Fp { p, .. } => Base::Fp { v: 0, p: *p },
        }
    }

    fn one_like(&self) -> Self {
        match self {
            Base::Q(_) => Base::Q(BigRational::one()),
            Base::Fp { p, .. } => Base::Fp { v: 1 % p, p: *p },
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Base::Q(q) => q.is_zero(),
            Base::Fp { v, .. } => *v == 0,
        }
    }

    fn plus(&self, o: &Self) -> Self {
        match (self, o) {
            (Base::Q(a), Base::Q(b)) => Base::Q(a + b),
            (Base::Fp { v: a, p }, Base::Fp { v: b, p: q }) if p == q => {
                Base::Fp { v: ((*a as u128 + *b as u128) % *p as u128) as u64, p: *p }
            }
            _ => panic!("mixed base fields: {self:?} + {o:?}"),
        }
    }

    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }

    fn times(&self, o: &Self) -> Self {
        match (self, o) {
            (Base::Q(a), Base::Q(b)) => Base::Q(a * b),
            (Base::Fp { v: a, p }, Base::Fp { v: b, p: q }) if p == q => Base::Fp { v: mul_mod(*a, *b, *p), p: *p },
            _ => panic!("mixed base fields: {self:?} * {o:?}"),
        }
    }

    fn negate(&self) -> Self {
        match self {
            Base::Q(a) => Base::Q(-a),
            Base::Fp { v, p } => Base::Fp { v: if *v == 0 { 0 } else { p - v }, p: *p },
        }
    }

    fn inverse(&self) -> Option<Self> {
        match self {
            Base::Q(a) if a.is_zero() => None,
            Base::Q(a) => Some(Base::Q(a.recip())),
            Base::Fp { v, p } => inv_mod(*v, *p).map(|v| Base::Fp { v, p: *p }),
        }
    }

    fn int_like(&self, n: i64) -> Self {
        match self {
            Base::Q(_) => Base::rational(n),
            Base::Fp { p, .. } => Base::fp(n, *p),
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Q(q) => write!(f, "{q}"),
            Base::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

/// Dense univariate polynomial, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct UPoly<T: Coeff> {
    c: Vec<T>,
}

impl<T: Coeff> UPoly<T> {
    pub fn new(mut c: Vec<T>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> Self {
        UPoly { c: Vec::new() }
    }

    pub fn constant(a: T) -> Self {
        Self::new(vec![a])
    }

    /// `coef · X^k`
    pub fn monomial(coef: T, k: usize) -> Self {
        let mut c = vec![coef.zero_like(); k];
        c.push(coef);
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Option<&T> {
        self.c.get(i)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&T> {
        self.c.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => a.plus(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Self::new(out)
    }

    pub fn neg(&self) -> Self {
        UPoly { c: self.c.iter().map(Coeff::negate).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let z = self.c[0].zero_like();
        let mut out = vec![z; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.c.iter().map(|a| a.times(s)).collect())
    }

    /// Quotient and remainder; `d` must be nonzero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dl = d.lead().expect("division by zero polynomial");
        let inv = dl.inverse().expect("leading coefficient of a field polynomial is invertible");
        let dd = d.c.len() - 1;
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![dl.zero_like(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let t = r[k + dd].times(&inv);
            if t.is_zero() {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                r[k + j] = r[k + j].minus(&t.times(b));
            }
            q[k] = t;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => Self::zero(),
            Some(l) => self.scale(&l.inverse().expect("nonzero lead")),
        }
    }

    /// Monic gcd by Euclid; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s·self + t·o = g`, `g` monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let one = self.lead().or(o.lead()).map(|x| x.one_like());
        let Some(one) = one else {
            return (Self::zero(), Self::zero(), Self::zero());
        };
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::constant(one.clone()), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::constant(one));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        let inv = r0.lead().expect("nonzero gcd").inverse().expect("field");
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn eval(&self, x: &T) -> Option<T> {
        let mut acc: Option<T> = None;
        for a in self.c.iter().rev() {
            acc = Some(match acc {
                None => a.clone(),
                Some(v) => v.times(x).plus(a),
            });
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.c.iter().enumerate().skip(1).map(|(i, a)| a.times(&a.int_like(i as i64))).collect())
    }

    /// `self^e mod m`
    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let one = m.lead().expect("nonzero modulus").one_like();
        let mut base = self.rem(m);
        let mut acc = Self::constant(one).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> UPoly<U> {
        UPoly::new(self.c.iter().map(f).collect())
    }
}

impl UPoly<Base> {
    pub fn from_ints(c: &[i64], template: &Base) -> Self {
        Self::new(c.iter().map(|&n| template.int_like(n)).collect())
    }
}
