//! Root search in the base fields: rational-root test over Q and
//! equal-degree splitting over F_p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::base::{pow_mod, Base, Coeff, UPoly};

/// Largest integer whose divisors the rational-root test will enumerate.
const DIVISOR_LIMIT: u64 = 1_000_000_000_000;

/// Distinct rational roots in increasing order, or `None` if the integer
/// coefficients are too large for divisor enumeration.
pub fn rational_roots(f: &UPoly<Base>) -> Option<Vec<BigRational>> {
    let coeffs: Vec<BigRational> = f.coeffs().iter().map(|c| c.as_rational().expect("rational polynomial").clone()).collect();
    if coeffs.is_empty() {
        return Some(Vec::new());
    }
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = coeffs.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let mut roots = Vec::new();
    // strip the zero root
    let shift = ints.iter().take_while(|c| c.is_zero()).count();
    if shift > 0 {
        roots.push(BigRational::zero());
        ints.drain(..shift);
    }
    if ints.len() > 1 {
        let a0 = ints[0].abs().to_u64().filter(|&v| v <= DIVISOR_LIMIT)?;
        let an = ints.last().unwrap().abs().to_u64().filter(|&v| v <= DIVISOR_LIMIT)?;
        let poly = UPoly::new(ints.iter().map(|c| Base::Q(BigRational::from_integer(c.clone()))).collect());
        for p in divisors(a0) {
            for q in divisors(an) {
                for sign in [1i64, -1] {
                    let cand = BigRational::new(BigInt::from(p) * sign, BigInt::from(q));
                    if poly.eval(&Base::Q(cand.clone())).is_some_and(|v| v.is_zero()) && !roots.contains(&cand) {
                        roots.push(cand);
                    }
                }
            }
        }
    }
    roots.sort();
    Some(roots)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// Distinct roots in F_p in increasing order.
pub fn prime_roots(f: &UPoly<Base>) -> Vec<u64> {
    let Some(lead) = f.lead() else {
        return Vec::new();
    };
    let p = lead.characteristic();
    let x = UPoly::monomial(lead.one_like(), 1);
    let f = f.monic();
    if f.degree() == Some(0) {
        return Vec::new();
    }
    // product of the distinct linear factors
    let xp = x.pow_mod(p, &f);
    let g = f.gcd(&xp.sub(&x));
    let mut roots = Vec::new();
    split_linear(&g, p, 0, &mut roots);
    roots.sort_unstable();
    roots
}

fn split_linear(g: &UPoly<Base>, p: u64, mut shift: u64, out: &mut Vec<u64>) {
    match g.degree() {
        None | Some(0) => return,
        Some(1) => {
            // X + c
            let c = &g.coeffs()[0];
            let Base::Fp { v, .. } = c.negate() else { unreachable!() };
            out.push(v);
            return;
        }
        _ => {}
    }
    if p == 2 {
        for v in 0..2 {
            if g.eval(&Base::fp(v, 2)).is_some_and(|r| r.is_zero()) {
                out.push(v as u64);
            }
        }
        return;
    }
    let one = g.lead().unwrap().one_like();
    loop {
        // gcd(g, (X + shift)^((p-1)/2) - 1) splits g for most shifts
        let lin = UPoly::new(vec![Base::fp(shift as i64, p), one.clone()]);
        let h = lin.pow_mod((p - 1) / 2, g).sub(&UPoly::constant(one.clone()));
        let d = g.gcd(&h);
        shift += 1;
        if let (Some(dd), Some(gd)) = (d.degree(), g.degree()) {
            if dd > 0 && dd < gd {
                let (q, _) = g.divrem(&d);
                split_linear(&d, p, shift, out);
                split_linear(&q, p, shift, out);
                return;
            }
        }
        if shift > p + 2 {
            // fall back to exhaustive search; unreachable for squarefree split input
            for v in 0..p {
                if g.eval(&Base::Fp { v, p }).is_some_and(|r| r.is_zero()) {
                    out.push(v);
                }
            }
            return;
        }
    }
}

/// Whether `a` is a square in F_p (Euler's criterion).
pub fn is_square_mod(a: u64, p: u64) -> bool {
    a.is_multiple_of(p) || p == 2 || pow_mod(a, (p - 1) / 2, p) == 1
}
