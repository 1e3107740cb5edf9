//! Atiyah bundles `G(r,d;p)` on an elliptic curve `Z`, with `Pic⁰(Z)` kept
//! abstract, and the classification of full bundles and of the
//! Cohen–Macaulay modules they come from.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BundleError {
    #[error("bundle {0} is not full")]
    NotFull(String),
    #[error("rank must be positive")]
    ZeroRank,
}

/// Element of `Pic⁰(Z)`: a formal integer combination of named points, with
/// `∞` the empty combination.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PicPoint(BTreeMap<String, i64>);

impl PicPoint {
    pub fn infinity() -> Self {
        PicPoint::default()
    }

    pub fn named(name: &str) -> Self {
        PicPoint(BTreeMap::from([(name.to_string(), 1)]))
    }

    pub fn is_infinity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &PicPoint) -> PicPoint {
        let mut m = self.0.clone();
        for (k, v) in &o.0 {
            *m.entry(k.clone()).or_insert(0) += v;
        }
        m.retain(|_, v| *v != 0);
        PicPoint(m)
    }

    pub fn neg(&self) -> PicPoint {
        PicPoint(self.0.iter().map(|(k, v)| (k.clone(), -v)).collect())
    }
}

impl fmt::Display for PicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            return f.write_str("∞");
        }
        for (i, (k, v)) in self.0.iter().enumerate() {
            match (i, *v) {
                (0, 1) => write!(f, "{k}")?,
                (0, -1) => write!(f, "-{k}")?,
                (0, v) => write!(f, "{v}{k}")?,
                (_, 1) => write!(f, "+{k}")?,
                (_, -1) => write!(f, "-{k}")?,
                (_, v) if v > 0 => write!(f, "+{v}{k}")?,
                (_, v) => write!(f, "{v}{k}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for PicPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The indecomposable bundle of rank `r`, degree `d` and Chern class `p`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AtiyahBundle {
    pub r: u32,
    pub d: i64,
    pub p: PicPoint,
}

impl AtiyahBundle {
    pub fn new(r: u32, d: i64, p: PicPoint) -> Result<Self, BundleError> {
        if r == 0 {
            return Err(BundleError::ZeroRank);
        }
        Ok(AtiyahBundle { r, d, p })
    }

    /// `Λ = G(1,0;∞) ≅ O_Z`.
    pub fn trivial() -> Self {
        AtiyahBundle { r: 1, d: 0, p: PicPoint::infinity() }
    }

    pub fn is_trivial(&self) -> bool {
        self.r == 1 && self.d == 0 && self.p.is_infinity()
    }

    pub fn h0(&self) -> u64 {
        match self.d {
            d if d > 0 => d as u64,
            0 if self.p.is_infinity() => 1,
            _ => 0,
        }
    }

    /// Riemann–Roch on a genus-one curve: `h⁰ − h¹ = d`.
    pub fn h1(&self) -> u64 {
        (self.h0() as i64 - self.d) as u64
    }

    pub fn is_ggg(&self) -> bool {
        self.d > 0 || self.is_trivial()
    }

    pub fn twist_i_dual(&self) -> AtiyahBundle {
        AtiyahBundle { r: self.r, d: self.d - i64::from(self.r), p: self.p.clone() }
    }
}

impl fmt::Display for AtiyahBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("Λ");
        }
        write!(f, "G({},{};{})", self.r, self.d, self.p)
    }
}

/// A finite direct sum of Atiyah bundles, kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BundleSum(Vec<AtiyahBundle>);

impl BundleSum {
    pub fn new(mut parts: Vec<AtiyahBundle>) -> Self {
        parts.sort();
        BundleSum(parts)
    }

    pub fn empty() -> Self {
        BundleSum(Vec::new())
    }

    pub fn single(b: AtiyahBundle) -> Self {
        BundleSum(vec![b])
    }

    /// `self ⊕ m·Λ`.
    pub fn with_trivial(&self, m: usize) -> Self {
        let mut v = self.0.clone();
        v.extend(std::iter::repeat_n(AtiyahBundle::trivial(), m));
        BundleSum::new(v)
    }

    pub fn parts(&self) -> &[AtiyahBundle] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rank(&self) -> u64 {
        self.0.iter().map(|b| u64::from(b.r)).sum()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|b| b.d).sum()
    }
}

impl fmt::Display for BundleSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (g, m) = split_trivial(self);
        let mut parts: Vec<String> = g.0.iter().map(|b| b.to_string()).collect();
        match m {
            0 => {}
            1 => parts.push("Λ".into()),
            m => parts.push(format!("{m}Λ")),
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join(" ⊕ "))
    }
}

impl Serialize for BundleSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn h0(f: &BundleSum) -> u64 {
    f.0.iter().map(AtiyahBundle::h0).sum()
}

pub fn h1(f: &BundleSum) -> u64 {
    f.0.iter().map(AtiyahBundle::h1).sum()
}

pub fn is_ggg(f: &BundleSum) -> bool {
    f.0.iter().all(AtiyahBundle::is_ggg)
}

pub fn twist_i_dual(f: &BundleSum) -> BundleSum {
    BundleSum::new(f.0.iter().map(AtiyahBundle::twist_i_dual).collect())
}

/// `F = G ⊕ m·Λ` with `G` free of trivial summands.
pub fn split_trivial(f: &BundleSum) -> (BundleSum, usize) {
    let (t, g): (Vec<_>, Vec<_>) = f.0.iter().cloned().partition(AtiyahBundle::is_trivial);
    (BundleSum(g), t.len())
}

pub fn is_full(f: &BundleSum) -> bool {
    let (g, m) = split_trivial(f);
    is_ggg(&g) && h1(&g) == 0 && m as u64 >= h0(&twist_i_dual(&g))
}

/// Whether the Cohen–Macaulay module with reduction `f` is indecomposable.
///
/// `G` must itself be indecomposable: a sum `G₁ ⊕ G₂` with the right `m`
/// splits as the sum of the modules for `Gᵢ ⊕ h⁰(I^∨ ⊗ Gᵢ)Λ`.
pub fn is_indecomposable_cm(f: &BundleSum) -> Result<bool, BundleError> {
    if !is_full(f) {
        return Err(BundleError::NotFull(f.to_string()));
    }
    let (g, m) = split_trivial(f);
    if g.is_empty() {
        return Ok(m == 1);
    }
    Ok(g.0.len() == 1 && m as u64 == h0(&twist_i_dual(&g)))
}

pub fn cm_rank(f: &BundleSum) -> Result<u64, BundleError> {
    if !is_full(f) {
        return Err(BundleError::NotFull(f.to_string()));
    }
    Ok(f.rank())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ParameterSpace {
    #[serde(rename = "point")]
    Point,
    #[serde(rename = "Z")]
    Z,
    #[serde(rename = "Z-minus-infinity")]
    ZMinusInfinity,
}

impl fmt::Display for ParameterSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParameterSpace::Point => "point",
            ParameterSpace::Z => "Z",
            ParameterSpace::ZMinusInfinity => "Z∖{∞}",
        })
    }
}

/// Which case of the classification a class comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// `G(r,d;p)` with `0 < d < r`.
    LowDegree,
    /// `G(r,r;p)`, `p ≠ ∞`.
    Balanced,
    /// `G(r,r;∞) ⊕ Λ`.
    BalancedAtInfinity,
    /// `G(r,d;p) ⊕ (d−r)Λ` with `d > r`.
    HighDegree,
    /// `Λ` itself, the reduction of `A`.
    Regular,
}

/// One family (or isolated class) of indecomposable Cohen–Macaulay modules.
/// A family's bundle uses the symbolic point `p` for its parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CMClass {
    pub bundle: BundleSum,
    pub cm_rank: u64,
    pub parameter_space: ParameterSpace,
    pub provenance: Provenance,
    pub m: usize,
    /// Set when the theorem admits the class but the explicit list omits it.
    pub flagged: bool,
}

fn class(g: AtiyahBundle, m: usize, space: ParameterSpace, provenance: Provenance) -> CMClass {
    let bundle = BundleSum::single(g).with_trivial(m);
    CMClass { cm_rank: bundle.rank(), bundle, parameter_space: space, provenance, m, flagged: false }
}

/// The classes of CM-rank `n`.
pub fn enumerate_cm(n: u32) -> Vec<CMClass> {
    assert!(n >= 1, "rank must be positive");
    let p = || PicPoint::named("p");
    let nn = i64::from(n);
    let mut out = Vec::new();
    for d in 1..nn {
        out.push(class(AtiyahBundle { r: n, d, p: p() }, 0, ParameterSpace::Z, Provenance::LowDegree));
    }
    for r in 1..n {
        out.push(class(AtiyahBundle { r, d: nn, p: p() }, (n - r) as usize, ParameterSpace::Z, Provenance::HighDegree));
    }
    out.push(class(AtiyahBundle { r: n, d: nn, p: p() }, 0, ParameterSpace::ZMinusInfinity, Provenance::Balanced));
    if n >= 2 {
        let mut c =
            class(AtiyahBundle { r: n - 1, d: nn - 1, p: PicPoint::infinity() }, 1, ParameterSpace::Point, Provenance::BalancedAtInfinity);
        c.flagged = n == 2;
        out.push(c);
    } else {
        out.push(CMClass {
            bundle: BundleSum::single(AtiyahBundle::trivial()),
            cm_rank: 1,
            parameter_space: ParameterSpace::Point,
            provenance: Provenance::Regular,
            m: 1,
            flagged: false,
        });
    }
    out
}

/// Family counts `(Z, Z∖{∞}, isolated)`.
pub fn family_counts(classes: &[CMClass]) -> (usize, usize, usize) {
    let count = |s| classes.iter().filter(|c| c.parameter_space == s).count();
    (count(ParameterSpace::Z), count(ParameterSpace::ZMinusInfinity), count(ParameterSpace::Point))
}

/// Members of a family at the sample Chern classes `{∞, q}`, restricted to
/// the family's parameter space.
pub fn instances(c: &CMClass) -> Vec<BundleSum> {
    let points = match c.parameter_space {
        ParameterSpace::Point => return vec![c.bundle.clone()],
        ParameterSpace::Z => vec![PicPoint::infinity(), PicPoint::named("q")],
        ParameterSpace::ZMinusInfinity => vec![PicPoint::named("q")],
    };
    let family = PicPoint::named("p");
    points
        .into_iter()
        .map(|pt| {
            BundleSum::new(
                c.bundle.0.iter().map(|b| if b.p == family { AtiyahBundle { p: pt.clone(), ..b.clone() } } else { b.clone() }).collect(),
            )
        })
        .collect()
}

/// Multisets of `items` (by index, nondecreasing) with total rank exactly `rank`.
fn multisets(items: &[AtiyahBundle], start: usize, rank: u32, cur: &mut Vec<AtiyahBundle>, out: &mut Vec<BundleSum>) {
    if rank == 0 {
        out.push(BundleSum::new(cur.clone()));
        return;
    }
    for (i, b) in items.iter().enumerate().skip(start) {
        if b.r <= rank {
            cur.push(b.clone());
            multisets(items, i, rank - b.r, cur, out);
            cur.pop();
        }
    }
}

/// Every full bundle sum with indecomposable module, total rank
/// `≤ max_total_rank`, `|d| ≤ max_degree` per summand and Chern classes in
/// `{∞, q}`, found by exhaustive search.
pub fn brute_force_full(max_total_rank: u32, max_degree: i64) -> BTreeSet<BundleSum> {
    let mut items = Vec::new();
    for r in 1..=max_total_rank {
        for d in -max_degree..=max_degree {
            for p in [PicPoint::infinity(), PicPoint::named("q")] {
                items.push(AtiyahBundle { r, d, p });
            }
        }
    }
    (1..=max_total_rank)
        .into_par_iter()
        .flat_map_iter(|rank| {
            let mut all = Vec::new();
            multisets(&items, 0, rank, &mut Vec::new(), &mut all);
            all.into_iter().filter(|f| is_full(f) && is_indecomposable_cm(f) == Ok(true))
        })
        .collect()
}

/// The sums `enumerate_cm` predicts within the same bounds.
pub fn predicted_full(max_total_rank: u32, max_degree: i64) -> BTreeSet<BundleSum> {
    (1..=max_total_rank)
        .flat_map(enumerate_cm)
        .flat_map(|c| instances(&c))
        .filter(|f| f.parts().iter().all(|b| b.d.abs() <= max_degree))
        .collect()
}
