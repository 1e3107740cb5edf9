//! Reduced fractions of univariate polynomials over a base field, the carrier
//! of Q(λ). Without a free transcendental every value is a constant fraction.

use std::fmt;

use super::base::{Base, Coeff, UPoly};

/// `num / den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFn {
    num: UPoly<Base>,
    den: UPoly<Base>,
}

impl RatFn {
    pub fn constant(b: Base) -> Self {
        let one = b.one_like();
        RatFn { num: UPoly::constant(b), den: UPoly::constant(one) }
    }

    /// The transcendental itself.
    pub fn variable(template: &Base) -> Self {
        RatFn { num: UPoly::monomial(template.one_like(), 1), den: UPoly::constant(template.one_like()) }
    }

    pub fn from_parts(num: UPoly<Base>, den: UPoly<Base>) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::normalized(num, den))
    }

    pub fn from_poly(num: UPoly<Base>, template: &Base) -> Self {
        RatFn { num, den: UPoly::constant(template.one_like()) }
    }

    fn normalized(num: UPoly<Base>, den: UPoly<Base>) -> Self {
        let one = den.lead().expect("nonzero denominator").one_like();
        if num.is_zero() {
            return RatFn { num, den: UPoly::constant(one) };
        }
        if den.degree() == Some(0) {
            let inv = den.lead().unwrap().inverse().unwrap();
            return RatFn { num: num.scale(&inv), den: UPoly::constant(one) };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree() == Some(0) { (num, den) } else { (num.divrem(&g).0, den.divrem(&g).0) };
        let inv = den.lead().unwrap().inverse().unwrap();
        RatFn { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn numer(&self) -> &UPoly<Base> {
        &self.num
    }

    pub fn denom(&self) -> &UPoly<Base> {
        &self.den
    }

    pub fn has_trivial_denominator(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Constant value if this does not involve the transcendental.
    pub fn as_constant(&self) -> Option<Base> {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => Some(self.template().zero_like()),
            (Some(0), Some(0)) => Some(self.num.coeffs()[0].clone()),
            _ => None,
        }
    }

    fn template(&self) -> &Base {
        self.den.lead().expect("denominator is never zero")
    }

    /// Evaluates at `t`; `None` when the denominator vanishes there.
    pub fn eval(&self, t: &Base) -> Option<Base> {
        let d = self.den.eval(t).expect("nonzero");
        let inv = d.inverse()?;
        let n = self.num.eval(t).unwrap_or_else(|| t.zero_like());
        Some(n.times(&inv))
    }

    /// Maps coefficients into another base field (e.g. Q → F_p).
    pub fn map_base(&self, f: impl Fn(&Base) -> Option<Base>) -> Option<RatFn> {
        let num: Option<Vec<Base>> = self.num.coeffs().iter().map(&f).collect();
        let den: Option<Vec<Base>> = self.den.coeffs().iter().map(&f).collect();
        RatFn::from_parts(UPoly::new(num?), UPoly::new(den?))
    }

    /// Whether the printed form needs parentheses when used as a factor.
    pub fn is_compound(&self) -> bool {
        !self.has_trivial_denominator() || self.num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1
    }

    pub fn fmt_with(&self, var: &str) -> String {
        let num = fmt_upoly(&self.num, var);
        if self.has_trivial_denominator() {
            return num;
        }
        let den = fmt_upoly(&self.den, var);
        let nn = if self.num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 { format!("({num})") } else { num };
        let dd = if self.den.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 { format!("({den})") } else { den };
        format!("{nn}/{dd}")
    }
}

fn fmt_base_factor(c: &Base, suffix: &str) -> String {
    // suffix is "" for constants or "var^k" for monomials
    if suffix.is_empty() {
        return c.to_string();
    }
    if c.is_one() {
        return suffix.to_string();
    }
    if c.negate().is_one() && matches!(c, Base::Q(_)) {
        return format!("-{suffix}");
    }
    format!("{c}*{suffix}")
}

pub(crate) fn fmt_upoly(p: &UPoly<Base>, var: &str) -> String {
    let mut out = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let suffix = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        let term = fmt_base_factor(c, &suffix);
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
        "0".to_string()
    } else {
        out
    }
}

impl Coeff for RatFn {
    fn zero_like(&self) -> Self {
        RatFn::constant(self.template().zero_like())
    }

    fn one_like(&self) -> Self {
        RatFn::constant(self.template().one_like())
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn plus(&self, o: &Self) -> Self {
        if self.has_trivial_denominator() && o.has_trivial_denominator() {
            let one = self.template().one_like();
            return RatFn { num: self.num.add(&o.num), den: UPoly::constant(one) };
        }
        if self.den == o.den {
            return Self::normalized(self.num.add(&o.num), self.den.clone());
        }
        Self::normalized(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }

    fn times(&self, o: &Self) -> Self {
        if self.has_trivial_denominator() && o.has_trivial_denominator() {
            let one = self.template().one_like();
            return RatFn { num: self.num.mul(&o.num), den: UPoly::constant(one) };
        }
        Self::normalized(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    fn negate(&self) -> Self {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    fn inverse(&self) -> Option<Self> {
        if self.num.is_zero() {
            return None;
        }
        Some(Self::normalized(self.den.clone(), self.num.clone()))
    }

    fn int_like(&self, n: i64) -> Self {
        RatFn::constant(self.template().int_like(n))
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with("t"))
    }
}
