//! Blow-up charts of the plane and the chart algebras built on them.
//!
//! Chart `U1` has coordinates `(xi, v)` with `u = xi·v`; chart `U2` has
//! `(u, eta)` with `v = eta·u`. On the overlap `xi = eta⁻¹`. Chart
//! algebras are described by their basis written as Laurent combinations of
//! the original basis, with the exceptional variable inverted.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::polyring::{PolyRing, Polynomial};
use crate::scalars::FieldContext;
use crate::structalg::{determinant, AlgError, StructureConstantAlgebra, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ChartName {
    U1,
    U2,
}

impl fmt::Display for ChartName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChartName::U1 => "U1",
            ChartName::U2 => "U2",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub name: ChartName,
    /// Polynomial coordinate ring.
    pub ring: Arc<PolyRing>,
    /// Same variables with the exceptional variable inverted.
    pub laurent: Arc<PolyRing>,
    /// Images of `u` and `v` in `ring`.
    pub substitution: BTreeMap<String, Polynomial>,
    pub exceptional: String,
    /// Both chart variables inverted; coordinates `(u, eta)`.
    pub overlap: Arc<PolyRing>,
}

fn bindings(target: &Arc<PolyRing>, pairs: &[(&str, &str)]) -> BTreeMap<String, Polynomial> {
    pairs.iter().map(|(k, v)| (k.to_string(), Polynomial::parse(target, v).expect("chart substitution"))).collect()
}

impl Chart {
    pub fn new(name: ChartName, field: &Arc<FieldContext>) -> Self {
        let overlap = PolyRing::laurent(field, &["u", "eta"], &["u", "eta"]);
        match name {
            ChartName::U1 => {
                let ring = PolyRing::new(field, &["xi", "v"]);
                Chart {
                    name,
                    laurent: PolyRing::laurent(field, &["xi", "v"], &["v"]),
                    substitution: bindings(&ring, &[("u", "xi*v"), ("v", "v")]),
                    ring,
                    exceptional: "v".into(),
                    overlap,
                }
            }
            ChartName::U2 => {
                let ring = PolyRing::new(field, &["u", "eta"]);
                Chart {
                    name,
                    laurent: PolyRing::laurent(field, &["u", "eta"], &["u"]),
                    substitution: bindings(&ring, &[("u", "u"), ("v", "eta*u")]),
                    ring,
                    exceptional: "u".into(),
                    overlap,
                }
            }
        }
    }

    /// Images of the chart variables in the overlap ring.
    pub fn to_overlap(&self) -> BTreeMap<String, Polynomial> {
        match self.name {
            ChartName::U1 => bindings(&self.overlap, &[("xi", "eta^-1"), ("v", "eta*u")]),
            ChartName::U2 => bindings(&self.overlap, &[("u", "u"), ("eta", "eta")]),
        }
    }

    /// Images of `u` and `v` in the overlap ring.
    pub fn base_to_overlap(&self) -> BTreeMap<String, Polynomial> {
        bindings(&self.overlap, &[("u", "u"), ("v", "eta*u")])
    }
}

/// Substitutes the chart coordinates into every structure constant.
pub fn pullback_relations(alg: &Arc<StructureConstantAlgebra>, chart: &Chart) -> Result<Arc<StructureConstantAlgebra>, AlgError> {
    alg.map_coefficients(&chart.ring, |c| Ok(c.substitute(&chart.ring, &chart.substitution)?))
}

/// How the chart basis is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisChoice {
    /// Expressions in the generators; must include `1`.
    Explicit(Vec<String>),
    /// Words of length ≤ `max_len` in the generators; per original basis
    /// direction, the word with the most negative power of the exceptional
    /// variable wins.
    MonomialSearch { max_len: usize },
}

#[derive(Debug, Clone)]
pub struct ChartAlgebra {
    pub chart: Chart,
    /// The order on the chart, over the polynomial chart ring.
    pub algebra: Arc<StructureConstantAlgebra>,
    /// The pulled-back algebra over the Laurent chart ring, with all generators as symbols.
    pub laurent: Arc<StructureConstantAlgebra>,
    /// The original algebra over `k[u, v]`.
    pub original: Arc<StructureConstantAlgebra>,
    /// Coordinates of each chart basis element in the original basis (Laurent coefficients).
    pub embedding: Vec<Vector>,
    /// Names of the adjoined generators.
    pub generators: Vec<String>,
}

/// Inverse of a square matrix over a Laurent ring, pivoting on units only.
pub fn invert_unit_pivot(m: &[Vec<Polynomial>]) -> Option<Vec<Vec<Polynomial>>> {
    let n = m.len();
    let ring = m.first()?.first()?.ring().clone();
    let mut a: Vec<Vec<Polynomial>> = m.to_vec();
    let mut inv: Vec<Vec<Polynomial>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Polynomial::one(&ring) } else { Polynomial::zero(&ring) }).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero() && a[r][col].is_unit())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let s = a[col][col].inverse_unit().ok()?;
        for j in 0..n {
            a[col][j] = &a[col][j] * &s;
            inv[col][j] = &inv[col][j] * &s;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                a[r][j] = &a[r][j] - &(&f * &a[col][j]);
                inv[r][j] = &inv[r][j] - &(&f * &inv[col][j]);
            }
        }
    }
    Some(inv)
}

fn apply(m: &[Vec<Polynomial>], v: &Vector) -> Vector {
    m.iter()
        .map(|row| row.iter().zip(v).fold(Polynomial::zero(v[0].ring()), |acc, (a, b)| if b.is_zero() { acc } else { &acc + &(a * b) }))
        .collect()
}

fn word_label(word: &[usize], alphabet: &[String]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < word.len() {
        let mut j = i;
        while j < word.len() && word[j] == word[i] {
            j += 1;
        }
        let name = &alphabet[word[i]];
        parts.push(if j - i == 1 { name.clone() } else { format!("{name}^{}", j - i) });
        i = j;
    }
    parts.join("*")
}

/// Exponent of the exceptional variable if `c` is a scalar times a power of it.
fn exceptional_power(c: &Polynomial, exc: usize) -> Option<i32> {
    if c.num_terms() != 1 {
        return None;
    }
    let (m, _) = c.terms().next()?;
    m.0.iter().enumerate().all(|(i, &e)| i == exc || e == 0).then_some(m.0[exc])
}

fn monomial_search(
    laurent: &Arc<StructureConstantAlgebra>,
    alphabet: &[String],
    exc: usize,
    max_len: usize,
) -> Result<Vec<(String, Vector)>, AlgError> {
    let n = laurent.rank();
    let letters: Vec<Vector> = alphabet.iter().map(|a| laurent.symbols()[a].clone()).collect();
    let mut best: Vec<Option<(i32, String, Vector)>> = vec![None; n];
    let mut layer: Vec<(Vec<usize>, Vector)> = vec![(Vec::new(), laurent.one().coords().to_vec())];
    for len in 0..=max_len {
        for (word, v) in &layer {
            let nz: Vec<usize> = (0..n).filter(|&k| !v[k].is_zero()).collect();
            if let [k] = nz[..] {
                if let Some(e) = exceptional_power(&v[k], exc) {
                    if best[k].as_ref().is_none_or(|(b, _, _)| e < *b) {
                        best[k] = Some((e, word_label(word, alphabet), v.clone()));
                    }
                }
            }
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for (word, v) in &layer {
            for (a, l) in letters.iter().enumerate() {
                let mut w = word.clone();
                w.push(a);
                next.push((w, laurent.mul_vectors(v, l)));
            }
        }
        layer = next;
    }
    best.into_iter()
        .enumerate()
        .map(|(k, b)| {
            b.map(|(_, label, v)| (label, v))
                .ok_or_else(|| AlgError::ClosureFailure(format!("no basis word found in direction {}", laurent.labels()[k])))
        })
        .collect()
}

/// Adjoins Laurent-defined generators to a pulled-back algebra and builds the
/// chart order on the chosen basis, verifying that every product of basis
/// elements has polynomial coordinates.
pub fn adjoin_generators(
    original: &Arc<StructureConstantAlgebra>,
    chart: &Chart,
    defs: &[(String, String)],
    basis: &BasisChoice,
) -> Result<ChartAlgebra, AlgError> {
    let laurent = original.map_coefficients(&chart.laurent, |c| Ok(c.substitute(&chart.laurent, &lift(chart))?))?;
    let mut laurent = laurent;
    for (name, def) in defs {
        let v = laurent.parse(def)?.coords().to_vec();
        laurent = laurent.with_symbols(BTreeMap::from([(name.clone(), v)]));
    }
    let exc = chart.laurent.index_of(&chart.exceptional).expect("exceptional variable");
    let chosen: Vec<(String, Vector)> = match basis {
        BasisChoice::Explicit(words) => {
            words.iter().map(|w| Ok((w.clone(), laurent.parse(w)?.coords().to_vec()))).collect::<Result<_, AlgError>>()?
        }
        BasisChoice::MonomialSearch { max_len } => {
            let mut alphabet: Vec<String> = vec!["x".into(), "y".into()];
            alphabet.extend(defs.iter().map(|(n, _)| n.clone()));
            monomial_search(&laurent, &alphabet, exc, *max_len)?
        }
    };
    let n = original.rank();
    if chosen.len() != n {
        return Err(AlgError::ClosureFailure(format!("{} basis elements proposed for rank {n}", chosen.len())));
    }
    let unit = chosen
        .iter()
        .position(|(_, v)| *v == laurent.one().coords())
        .ok_or_else(|| AlgError::ClosureFailure("proposed basis does not contain 1".into()))?;
    // columns of `e` are the embeddings
    let e: Vec<Vec<Polynomial>> = (0..n).map(|i| chosen.iter().map(|(_, v)| v[i].clone()).collect()).collect();
    let e_inv = invert_unit_pivot(&e).ok_or_else(|| AlgError::ClosureFailure("basis change is not invertible on the chart".into()))?;
    let labels: Vec<String> = chosen.iter().map(|(l, _)| l.clone()).collect();
    let to_poly = |v: Vector, what: &str| -> Result<Vector, AlgError> {
        v.into_iter()
            .map(|c| {
                if !c.is_polynomial() {
                    return Err(AlgError::ClosureFailure(format!("{what} needs the coefficient {c}")));
                }
                Ok(c.embed(&chart.ring)?)
            })
            .collect()
    };
    let mut table = vec![Vec::with_capacity(n); n];
    for i in 0..n {
        for j in 0..n {
            let prod = laurent.mul_vectors(&chosen[i].1, &chosen[j].1);
            table[i].push(to_poly(apply(&e_inv, &prod), &format!("{}·{}", labels[i], labels[j]))?);
        }
    }
    let mut symbols = BTreeMap::new();
    // the order must contain every generator, adjoined or original
    for (name, v) in laurent.symbols() {
        symbols.insert(name.clone(), to_poly(apply(&e_inv, v), name)?);
    }
    let algebra = StructureConstantAlgebra::from_table(chart.ring.clone(), labels, table, unit, original.degree(), symbols)?;
    Ok(ChartAlgebra {
        chart: chart.clone(),
        algebra,
        laurent,
        original: original.clone(),
        embedding: chosen.into_iter().map(|(_, v)| v).collect(),
        generators: defs.iter().map(|(n, _)| n.clone()).collect(),
    })
}

fn lift(chart: &Chart) -> BTreeMap<String, Polynomial> {
    chart.substitution.iter().map(|(k, v)| (k.clone(), v.embed(&chart.laurent).expect("same variables"))).collect()
}

impl ChartAlgebra {
    /// Recomputes every basis product through the Laurent embedding and compares with the table.
    pub fn embedding_consistent(&self) -> bool {
        let n = self.algebra.rank();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let direct = self.laurent.mul_vectors(&self.embedding[i], &self.embedding[j]);
                let via_table =
                    self.algebra.entry(i, j).iter().enumerate().fold(vec![Polynomial::zero(&self.chart.laurent); n], |mut acc, (k, c)| {
                        if !c.is_zero() {
                            let c = c.embed(&self.chart.laurent).expect("same variables");
                            for (a, b) in acc.iter_mut().zip(&self.embedding[k]) {
                                *a = &*a + &(&c * b);
                            }
                        }
                        acc
                    });
                direct == via_table
            })
        })
    }

    pub fn basis_labels(&self) -> &[String] {
        self.algebra.labels()
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct TransitionCheck {
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GluingVerdict {
    pub glued: bool,
    /// First generator whose transition failed.
    pub witness: Option<String>,
    pub transitions: Vec<TransitionCheck>,
    /// `det(E₂)/det(E₁)` on the overlap; a unit when the charts agree there.
    pub transition_det: String,
}

/// Checks the transition identities on the overlap and that the basis change
/// between the two chart orders is invertible there.
pub fn check_gluing(a1: &ChartAlgebra, a2: &ChartAlgebra, transitions: &[(String, String)]) -> Result<GluingVerdict, AlgError> {
    let overlap = a1.chart.overlap.clone();
    let base = a1.chart.base_to_overlap();
    let glued_alg = a1.original.map_coefficients(&overlap, |c| Ok(c.substitute(&overlap, &base)?))?;
    let to_o = |a: &ChartAlgebra, v: &Vector| -> Result<Vector, AlgError> {
        let b = a.chart.to_overlap();
        v.iter().map(|c| Ok(c.substitute(&overlap, &b)?)).collect()
    };
    let mut symbols = BTreeMap::new();
    for a in [a1, a2] {
        for name in &a.generators {
            symbols.insert(name.clone(), to_o(a, &a.laurent.symbols()[name])?);
        }
        for (label, v) in a.algebra.labels().iter().zip(&a.embedding) {
            symbols.entry(label.clone()).or_insert(to_o(a, v)?);
        }
    }
    let glued_alg = glued_alg.with_symbols(symbols);
    let mut checks = Vec::new();
    for (lhs, rhs) in transitions {
        let holds = crate::structalg::verify_identity(&glued_alg, lhs, rhs)?;
        checks.push(TransitionCheck { lhs: lhs.clone(), rhs: rhs.clone(), holds });
    }
    let det = |a: &ChartAlgebra| -> Result<Polynomial, AlgError> {
        let n = a.embedding.len();
        let cols: Vec<Vector> = a.embedding.iter().map(|v| to_o(a, v)).collect::<Result<_, _>>()?;
        Ok(determinant((0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())?)
    };
    let (d1, d2) = (det(a1)?, det(a2)?);
    let ratio = crate::polyring::divide_exact(&d2, &d1).ok();
    let invertible = ratio.as_ref().is_some_and(|r| r.is_unit());
    let witness = checks.iter().find(|c| !c.holds).map(|c| c.lhs.clone());
    Ok(GluingVerdict {
        glued: witness.is_none() && invertible,
        witness,
        transitions: checks,
        transition_det: ratio.map_or_else(|| format!("({d2})/({d1})"), |r| r.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{make_field, FieldDescriptor};

    #[test]
    fn unit_pivot_inverse() {
        let k = make_field(&FieldDescriptor::rationals()).unwrap();
        let r = PolyRing::laurent(&k, &["xi", "v"], &["v"]);
        let p = |s: &str| Polynomial::parse(&r, s).unwrap();
        let m = vec![vec![p("1"), p("-xi")], vec![p("0"), p("v^-2")]];
        let inv = invert_unit_pivot(&m).unwrap();
        assert_eq!(inv, vec![vec![p("1"), p("xi*v^2")], vec![p("0"), p("v^2")]]);
        assert!(invert_unit_pivot(&[vec![p("xi")]]).is_none());
    }

    #[test]
    fn overlap_maps_agree_on_the_base() {
        let k = make_field(&FieldDescriptor::rationals()).unwrap();
        let c1 = Chart::new(ChartName::U1, &k);
        let c2 = Chart::new(ChartName::U2, &k);
        for name in ["u", "v"] {
            let via1 = c1.substitution[name].substitute(&c1.overlap, &c1.to_overlap()).unwrap();
            let via2 = c2.substitution[name].substitute(&c2.overlap, &c2.to_overlap()).unwrap();
            assert_eq!(via1, via2, "{name}");
            assert_eq!(via1, c1.base_to_overlap()[name]);
        }
    }

    #[test]
    fn word_labels() {
        let a: Vec<String> = ["x", "y", "z1"].iter().map(|s| s.to_string()).collect();
        assert_eq!(word_label(&[], &a), "1");
        assert_eq!(word_label(&[0, 0, 2], &a), "x^2*z1");
        assert_eq!(word_label(&[2, 2], &a), "z1^2");
    }
}
