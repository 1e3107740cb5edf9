//! The reduction-cycle curve: superelliptic chart equations `wⁿ = c(ξ)`,
//! smoothness, genus, normal crossings of divisor arrangements, and the
//! tame/wild dichotomy by curve type.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::polyring::{gcd_univariate, Monomial, PolyError, Polynomial};
use crate::scalars::base::is_prime;
use crate::scalars::ScalarElement;
use crate::structalg::StructureConstantAlgebra;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("quotient is not commutative")]
    NotCommutative,
    #[error("quotient does not have the shape k[ξ][w]/(wⁿ − c): {0}")]
    NotHyperellipticShape(String),
    #[error("characteristic {characteristic} divides the exponent {n}")]
    CharNotCoprime { characteristic: u64, n: u32 },
    #[error("unsupported curve shape: {0}")]
    UnsupportedShape(String),
    #[error("unsupported divisor factor {0}")]
    UnsupportedFactor(String),
    #[error("bad curve descriptor {0:?} (expected smooth-elliptic, kodaira:<k> or other:<tag>)")]
    BadDescriptor(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Affine chart of a curve `wⁿ = c(ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneCurveChart {
    pub variable: String,
    pub fiber: String,
    pub n: u32,
    /// Univariate in `variable`; nonzero.
    pub c: Polynomial,
}

impl fmt::Display for PlaneCurveChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{} = {}", self.fiber, self.n, self.c)
    }
}

impl PlaneCurveChart {
    pub fn new(variable: &str, fiber: &str, n: u32, c: Polynomial) -> Result<Self, CurveError> {
        if n < 2 {
            return Err(CurveError::UnsupportedShape(format!("exponent {n} < 2")));
        }
        if c.is_zero() {
            return Err(CurveError::UnsupportedShape("c = 0".into()));
        }
        let ring = c.ring();
        if ring.index_of(variable).is_none() || c.support_vars().iter().any(|&i| ring.vars()[i] != variable) {
            return Err(CurveError::UnsupportedShape(format!("{c} is not a polynomial in {variable}")));
        }
        if !c.is_polynomial() {
            return Err(CurveError::UnsupportedShape(format!("{c} has negative exponents")));
        }
        Ok(PlaneCurveChart { variable: variable.into(), fiber: fiber.into(), n, c })
    }

    fn var_index(&self) -> usize {
        self.c.ring().index_of(&self.variable).expect("checked in new")
    }

    /// Degree of `c`.
    pub fn degree(&self) -> u32 {
        self.c.degree_in(self.var_index()).unwrap_or(0).max(0) as u32
    }
}

/// Reads off `wⁿ = c` from a commutative quotient over a one-variable ring.
///
/// The surviving basis must be `{1, w, …, wⁿ⁻¹}` up to unit scalars, with
/// `wⁿ` a multiple of the unit.
pub fn curve_from_quotient(q: &StructureConstantAlgebra) -> Result<PlaneCurveChart, CurveError> {
    if !q.is_commutative() {
        return Err(CurveError::NotCommutative);
    }
    let ring = q.ring();
    let free: Vec<usize> = (0..ring.nvars()).filter(|&i| !ring.is_invertible(i)).collect();
    let [var] = free[..] else {
        return Err(CurveError::NotHyperellipticShape(format!("base ring [{}] is not a line", ring.vars().join(", "))));
    };
    let n = q.rank();
    if n < 2 {
        return Err(CurveError::NotHyperellipticShape("quotient has rank 1".into()));
    }
    let unit = q.unit_index();
    let one_dir = |v: &[Polynomial]| -> Option<usize> {
        let mut nz = v.iter().enumerate().filter(|(_, c)| !c.is_zero());
        match (nz.next(), nz.next()) {
            (Some((k, c)), None) if c.as_constant().is_some() => Some(k),
            _ => None,
        }
    };
    'cand: for w in (0..n).filter(|&k| k != unit) {
        let mut seen = vec![unit, w];
        let mut pow = q.entry(unit, w).clone();
        for _ in 2..n {
            pow = q.mul_vectors(&pow, q.entry(w, unit));
            match one_dir(&pow) {
                Some(k) if !seen.contains(&k) => seen.push(k),
                _ => continue 'cand,
            }
        }
        let top = q.mul_vectors(&pow, q.entry(w, unit));
        if top.iter().enumerate().any(|(k, c)| k != unit && !c.is_zero()) {
            continue;
        }
        return PlaneCurveChart::new(&ring.vars()[var], &q.labels()[w], n as u32, top[unit].clone());
    }
    Err(CurveError::NotHyperellipticShape(format!("no generator w with basis {{1, w, …, w^{}}}", n - 1)))
}

/// `wⁿ = c` is smooth in the affine chart iff `c` is squarefree.
pub fn check_smooth(curve: &PlaneCurveChart) -> Result<bool, CurveError> {
    let p = curve.c.field().characteristic();
    if p != 0 && u64::from(curve.n) % p == 0 {
        return Err(CurveError::CharNotCoprime { characteristic: p, n: curve.n });
    }
    let d = curve.c.derivative(curve.var_index());
    Ok(gcd_univariate(&curve.c, &d)?.is_unit())
}

/// Genus of the smooth projective model, by Riemann–Hurwitz for the cyclic
/// cover of the line. Every root of `c` is a total branch point, and so is
/// infinity unless `n | deg c`.
pub fn genus(curve: &PlaneCurveChart) -> Result<u32, CurveError> {
    if !is_prime(u64::from(curve.n)) {
        return Err(CurveError::UnsupportedShape(format!("exponent {} is not prime", curve.n)));
    }
    if !check_smooth(curve)? {
        return Err(CurveError::UnsupportedShape(format!("{} is not squarefree", curve.c)));
    }
    let n = i64::from(curve.n);
    let m = i64::from(curve.degree());
    let b = m + i64::from(m % n != 0);
    let two_g = 2 - 2 * n + b * (n - 1);
    if two_g < 0 || two_g % 2 != 0 {
        return Err(CurveError::UnsupportedShape(format!("branch count {b} is inconsistent")));
    }
    Ok((two_g / 2) as u32)
}

/// `(a, b, c)` with `f = a·X + b·Y + c` in a two-variable ring.
fn line_coefficients(f: &Polynomial) -> Result<[ScalarElement; 3], CurveError> {
    let ring = f.ring();
    if ring.nvars() != 2 || !f.is_polynomial() || f.total_degree().unwrap_or(0) > 1 {
        return Err(CurveError::UnsupportedFactor(f.to_string()));
    }
    Ok([f.coeff(&Monomial(vec![1, 0])), f.coeff(&Monomial(vec![0, 1])), f.coeff(&Monomial(vec![0, 0]))])
}

/// Normal crossings for an arrangement of lines in a chart: no empty or
/// repeated component and no point on three components.
pub fn check_normal_crossings(factors: &[Polynomial]) -> Result<bool, CurveError> {
    let lines: Vec<[ScalarElement; 3]> = factors.iter().map(line_coefficients).collect::<Result<_, _>>()?;
    if lines.iter().any(|[a, b, _]| a.is_zero() && b.is_zero()) {
        return Ok(false);
    }
    let cross = |x: &ScalarElement, y: &ScalarElement, z: &ScalarElement, w: &ScalarElement| &(x * w) - &(y * z);
    let mut points = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let ([a1, b1, c1], [a2, b2, c2]) = (&lines[i], &lines[j]);
            let det = cross(a1, b1, a2, b2);
            if det.is_zero() {
                if cross(a1, c1, a2, c2).is_zero() && cross(b1, c1, b2, c2).is_zero() {
                    return Ok(false);
                }
                continue;
            }
            let inv = det.inverse().expect("nonzero");
            let x = &cross(b1, c1, b2, c2) * &inv;
            let y = &cross(c1, a1, c2, a2) * &inv;
            points.push((i, j, x, y));
        }
    }
    for (i, j, x, y) in &points {
        for (k, [a, b, c]) in lines.iter().enumerate() {
            if k != *i && k != *j && (&(&(a * x) + &(b * y)) + c).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum CurveDescriptor {
    SmoothElliptic,
    KodairaCycle(u32),
    Other(String),
}

impl FromStr for CurveDescriptor {
    type Err = CurveError;
    fn from_str(s: &str) -> Result<Self, CurveError> {
        let bad = || CurveError::BadDescriptor(s.to_string());
        match s.split_once(':') {
            None if s == "smooth-elliptic" => Ok(CurveDescriptor::SmoothElliptic),
            Some(("kodaira", k)) => match k.parse::<u32>() {
                Ok(k) if k >= 1 => Ok(CurveDescriptor::KodairaCycle(k)),
                _ => Err(bad()),
            },
            Some(("other", tag)) if !tag.is_empty() => Ok(CurveDescriptor::Other(tag.to_string())),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for CurveDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveDescriptor::SmoothElliptic => f.write_str("smooth-elliptic"),
            CurveDescriptor::KodairaCycle(k) => write!(f, "kodaira:{k}"),
            CurveDescriptor::Other(t) => write!(f, "other:{t}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tameness {
    Tame,
    Wild,
}

impl fmt::Display for Tameness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tameness::Tame => "Tame",
            Tameness::Wild => "Wild",
        })
    }
}

pub fn classify_tameness(d: &CurveDescriptor) -> Tameness {
    match d {
        CurveDescriptor::SmoothElliptic | CurveDescriptor::KodairaCycle(_) => Tameness::Tame,
        CurveDescriptor::Other(_) => Tameness::Wild,
    }
}
