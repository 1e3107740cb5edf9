//! End-to-end verification of the worked examples and the enumeration
//! report, shared by the command-line tool and the acceptance tests.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::blowup::{adjoin_generators, check_gluing, pullback_relations, Chart, ChartAlgebra, ChartName};
use crate::bundles::{brute_force_full, enumerate_cm, family_counts, predicted_full, CMClass};
use crate::catalog::{build_example_algebra, Example, Location};
use crate::excurve::{check_normal_crossings, check_smooth, curve_from_quotient, genus, PlaneCurveChart};
use crate::polyring::{radical_match, Polynomial};
use crate::scalars::base::is_prime;
use crate::scalars::{make_field, BaseSpec, FieldContext, FieldDescriptor, ScalarError, Specializer};
use crate::structalg::{find_radical_witness, quotient_by_generators, verify_identity, AlgError, StructureConstantAlgebra};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
}

impl From<ScalarError> for PipelineError {
    fn from(e: ScalarError) -> Self {
        PipelineError::Config(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldMode {
    Symbolic,
    Prime(u64),
    /// An explicit descriptor; it must provide the example's generators.
    Descriptor(Box<FieldDescriptor>),
}

impl std::str::FromStr for FieldMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "symbolic" {
            return Ok(FieldMode::Symbolic);
        }
        if let Some(q) = s.strip_prefix("q:") {
            return q.parse().map(FieldMode::Prime).map_err(|_| format!("bad prime {q:?}"));
        }
        if s.trim_start().starts_with('{') {
            return serde_json::from_str(s).map(|d| FieldMode::Descriptor(Box::new(d))).map_err(|e| e.to_string());
        }
        Err(format!("expected symbolic, q:<prime> or a JSON field descriptor, got {s:?}"))
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub field: FieldMode,
    /// Rational value for `lambda` (ex1 only).
    pub lambda: Option<String>,
    pub seed: u64,
    /// Random prime-field specializations accompanying a symbolic run.
    pub random_specializations: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { field: FieldMode::Symbolic, lambda: None, seed: 0, random_specializations: 20 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldReport {
    pub mode: &'static str,
    pub prime: Option<u64>,
    pub seed: u64,
    pub descriptor: FieldDescriptor,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UncheckedItem {
    pub item: &'static str,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub example: Example,
    pub field: FieldReport,
    pub stages: Vec<Stage>,
    pub unchecked: Vec<UncheckedItem>,
    pub passed: bool,
}

const UNCHECKED: [UncheckedItem; 3] = [
    UncheckedItem { item: "terminal ramification condition", reason: "ramification indices at nodes need completion-local theory" },
    UncheckedItem { item: "h1(X~, A~) = 1", reason: "needs sheaf cohomology on the resolution" },
    UncheckedItem { item: "normality of A", reason: "maximality of the order is assumed, not tested" },
];

/// Builds the field, binding an algebraic generator to a root when its
/// minimal polynomial splits.
pub fn make_field_split(desc: &FieldDescriptor) -> Result<Arc<FieldContext>, ScalarError> {
    let mut desc = desc.clone();
    for _ in 0..=desc.extensions.len() {
        match make_field(&desc) {
            Err(ScalarError::ReducibleMinimalPolynomial { name, root }) => desc = desc.with_binding(&name, root),
            other => return other,
        }
    }
    make_field(&desc)
}

/// Field for a verification run.
pub fn resolve_field(which: Example, opts: &VerifyOptions) -> Result<Arc<FieldContext>, PipelineError> {
    let lambda = opts.lambda.as_deref().filter(|_| which == Example::Ex1);
    match &opts.field {
        FieldMode::Descriptor(d) => {
            let mut desc = (**d).clone();
            if let Some(l) = lambda {
                desc = desc.with_binding("lambda", l);
            }
            Ok(make_field_split(&desc)?)
        }
        FieldMode::Symbolic => {
            let mut desc = which.descriptor();
            if let Some(l) = lambda {
                desc = desc.with_binding("lambda", l);
            }
            Ok(make_field_split(&desc)?)
        }
        &FieldMode::Prime(q) => {
            if !is_prime(q) || !(5..1 << 32).contains(&q) {
                return Err(PipelineError::Config(format!("{q} is not a prime in [5, 2^32)")));
            }
            let base = which.descriptor();
            if let Some(l) = lambda {
                let desc = base.rebased(BaseSpec::Prime(q), BTreeMap::from([("lambda".into(), l.to_string())]));
                return Ok(make_field_split(&desc)?);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut last = None;
            for _ in 0..64 {
                let b = match which {
                    Example::Ex1 => BTreeMap::from([("lambda".into(), rng.gen_range(2..q).to_string())]),
                    Example::Ex2 => BTreeMap::new(),
                };
                match make_field_split(&base.rebased(BaseSpec::Prime(q), b)) {
                    Ok(k) => return Ok(k),
                    Err(e) => last = Some(e),
                }
            }
            Err(last.map(PipelineError::from).unwrap_or_else(|| PipelineError::Config("no usable specialization".into())))
        }
    }
}

struct Run {
    stages: Vec<Stage>,
}

impl Run {
    fn stage(&mut self, name: &'static str, f: impl FnOnce(&mut Vec<String>) -> Result<bool, String>) {
        let mut details = Vec::new();
        let passed = match f(&mut details) {
            Ok(p) => p,
            Err(e) => {
                details.push(format!("error: {e}"));
                false
            }
        };
        self.stages.push(Stage { name, passed, details });
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// A random prime in `[10³, 10⁵]` and matching target field for `source`.
fn random_target(source: &Arc<FieldContext>, rng: &mut ChaCha8Rng) -> Result<(Arc<FieldContext>, BTreeMap<String, String>), String> {
    let mut last = String::new();
    for _ in 0..256 {
        let p = loop {
            let p = rng.gen_range(1_000u64..=100_000);
            if is_prime(p) {
                break p;
            }
        };
        let mut b = source.descriptor().bindings.clone();
        if let Some(t) = source.free_transcendental() {
            b.insert(t.to_string(), rng.gen_range(2..p).to_string());
        }
        let desc = source.descriptor().rebased(BaseSpec::Prime(p), b);
        match make_field_split(&desc) {
            Ok(k) => return Ok((k.clone(), k.descriptor().bindings.clone())),
            Err(e) => last = e.to_string(),
        }
    }
    Err(format!("no prime-field specialization found: {last}"))
}

/// Specializes `alg` to `count` random prime fields; returns the primes used
/// and the first failure.
pub fn random_associativity(alg: &Arc<StructureConstantAlgebra>, seed: u64, count: usize) -> Result<Vec<u64>, String> {
    let source = alg.ring().field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut primes = Vec::new();
    for _ in 0..count {
        let (target, bindings) = random_target(&source, &mut rng)?;
        let p = target.characteristic();
        let sp = Specializer::new(&source, &target, &bindings).map_err(err)?;
        let s = alg.specialize(&sp).map_err(err)?;
        if let Some((i, j, k)) = s.associativity_failure() {
            return Err(format!("associativity fails mod {p} on ({}, {}, {})", s.labels()[i], s.labels()[j], s.labels()[k]));
        }
        primes.push(p);
    }
    Ok(primes)
}

fn parse_all(ring: &Arc<crate::polyring::PolyRing>, xs: &[&str]) -> Result<Vec<Polynomial>, String> {
    xs.iter().map(|s| Polynomial::parse(ring, s).map_err(err)).collect()
}

/// Runs every stage for one example.
pub fn cmd_verify(which: Example, opts: &VerifyOptions) -> Result<VerificationReport, PipelineError> {
    let k = resolve_field(which, opts)?;
    let alg = build_example_algebra(which, &k).map_err(|e| match e {
        AlgError::BadSpecialization(m) => PipelineError::Config(m),
        e => PipelineError::Config(e.to_string()),
    })?;
    let field = FieldReport {
        mode: match opts.field {
            FieldMode::Symbolic => "symbolic",
            FieldMode::Prime(_) => "specialized",
            FieldMode::Descriptor(_) => "descriptor",
        },
        prime: k.prime(),
        seed: opts.seed,
        descriptor: k.descriptor().clone(),
    };
    let mut run = Run { stages: Vec::new() };
    let charts = [ChartName::U1, ChartName::U2];

    run.stage("algebra", |d| {
        d.push(format!("basis {} over [{}]", alg.labels().join(", "), alg.ring().vars().join(", ")));
        Ok(true)
    });

    run.stage("associativity", |d| {
        let n = alg.rank();
        if let Some((i, j, l)) = alg.associativity_failure() {
            d.push(format!("fails on ({}, {}, {})", alg.labels()[i], alg.labels()[j], alg.labels()[l]));
            return Ok(false);
        }
        d.push(format!("{} basis triples", n * n * n));
        if k.prime().is_none() && opts.random_specializations > 0 {
            let primes = random_associativity(&alg, opts.seed, opts.random_specializations)?;
            d.push(format!("{} prime-field specializations: {:?}", primes.len(), primes));
        }
        Ok(true)
    });

    let mut chart_algs: BTreeMap<ChartName, ChartAlgebra> = BTreeMap::new();
    let mut chart_errors = Vec::new();
    for c in charts {
        let spec = which.chart(c);
        match adjoin_generators(&alg, &Chart::new(c, &k), &spec.defs, &spec.basis) {
            Ok(a) => {
                chart_algs.insert(c, a);
            }
            Err(e) => chart_errors.push(format!("{c}: {e}")),
        }
    }

    run.stage("identities", |d| {
        let mut ok = true;
        let mut pulled = BTreeMap::new();
        for id in which.identities() {
            let target = match id.location {
                Location::Original => alg.clone(),
                Location::Pulled(c) => {
                    if let std::collections::btree_map::Entry::Vacant(e) = pulled.entry(c) {
                        e.insert(pullback_relations(&alg, &Chart::new(c, &k)).map_err(err)?);
                    }
                    pulled[&c].clone()
                }
                Location::Chart(c) => match chart_algs.get(&c) {
                    Some(a) => a.algebra.clone(),
                    None => {
                        d.push(format!("{c}: chart algebra unavailable for {} = {}", id.lhs, id.rhs));
                        ok = false;
                        continue;
                    }
                },
            };
            let holds = verify_identity(&target, id.lhs, id.rhs).map_err(err)?;
            let at = match id.location {
                Location::Original => "A".to_string(),
                Location::Pulled(c) => format!("pullback {c}"),
                Location::Chart(c) => format!("A on {c}"),
            };
            d.push(format!("[{}] {at}: {} = {}", if holds { "ok" } else { "FAIL" }, id.lhs, id.rhs));
            ok &= holds;
        }
        Ok(ok)
    });

    run.stage("discriminant", |d| {
        let disc = alg.trace_form_discriminant().map_err(err)?;
        let comps = parse_all(alg.ring(), &which.divisor())?;
        let m = radical_match(&disc, &comps).map_err(err)?;
        d.push(format!("disc(A) = {} * product of ({})^e, e = {:?}", m.unit, which.divisor().join(", "), m.multiplicities));
        let mut ok = true;
        for (s, c) in which.divisor().iter().zip(&comps) {
            match find_radical_witness(&alg, c) {
                Some(w) => d.push(format!("{s}: ({})^{} = {}", w.element, w.power, w.value)),
                None => {
                    d.push(format!("{s}: no radical witness found"));
                    ok = false;
                }
            }
        }
        for c in charts {
            let Some(a) = chart_algs.get(&c) else { continue };
            let spec = which.chart(c);
            let disc = a.algebra.trace_form_discriminant().map_err(err)?;
            let comps = parse_all(a.algebra.ring(), &spec.divisor)?;
            match radical_match(&disc, &comps) {
                Ok(m) => d.push(format!("{c}: components ({}), e = {:?}", spec.divisor.join(", "), m.multiplicities)),
                Err(e) => {
                    d.push(format!("{c}: {e}"));
                    ok = false;
                }
            }
        }
        Ok(ok)
    });

    run.stage("charts", |d| {
        d.extend(chart_errors.iter().cloned());
        let mut ok = chart_errors.is_empty();
        for (c, a) in &chart_algs {
            let assoc = a.algebra.check_associativity();
            let emb = a.embedding_consistent();
            d.push(format!("{c}: basis {}; associative {assoc}; embedding {emb}", a.basis_labels().join(", ")));
            ok &= assoc && emb;
        }
        Ok(ok)
    });

    run.stage("gluing", |d| {
        let (Some(a1), Some(a2)) = (chart_algs.get(&ChartName::U1), chart_algs.get(&ChartName::U2)) else {
            return Err("chart algebras unavailable".into());
        };
        let v = check_gluing(a1, a2, &which.transitions()).map_err(err)?;
        for t in &v.transitions {
            d.push(format!("[{}] {} = {}", if t.holds { "ok" } else { "FAIL" }, t.lhs, t.rhs));
        }
        d.push(format!("det(E2)/det(E1) = {}", v.transition_det));
        Ok(v.glued)
    });

    let mut curves: Vec<(ChartName, PlaneCurveChart)> = Vec::new();
    run.stage("quotient-curves", |d| {
        let mut ok = true;
        for (c, a) in &chart_algs {
            let spec = which.chart(*c);
            let kill = spec.ideal.iter().map(|g| a.algebra.parse(g)).collect::<Result<Vec<_>, _>>().map_err(err)?;
            let q = match quotient_by_generators(&a.algebra, &kill) {
                Ok(q) => q,
                Err(e) => {
                    d.push(format!("{c}: {e}"));
                    ok = false;
                    continue;
                }
            };
            let curve = curve_from_quotient(&q.algebra).map_err(err)?;
            let expected = Polynomial::parse(q.algebra.ring(), spec.curve).map_err(err)?;
            let hit = curve.c == expected && curve.fiber == spec.fiber && curve.n as usize == which.degree();
            d.push(format!(
                "{c}: A/({}) = k[{}][{}], {curve} (kills {})",
                spec.ideal.join(", "),
                curve.variable,
                curve.fiber,
                q.killed_vars.join(", ")
            ));
            ok &= hit && q.commutative;
            curves.push((*c, curve));
        }
        Ok(ok && curves.len() == 2)
    });

    run.stage("smoothness", |d| {
        let mut ok = !curves.is_empty();
        for (c, curve) in &curves {
            let s = check_smooth(curve).map_err(err)?;
            d.push(format!("{c}: smooth {s}"));
            ok &= s;
        }
        Ok(ok)
    });

    run.stage("genus", |d| {
        let mut gs = Vec::new();
        for (c, curve) in &curves {
            let g = genus(curve).map_err(err)?;
            d.push(format!("{c}: genus {g}"));
            gs.push(g);
        }
        Ok(!gs.is_empty() && gs.iter().all(|&g| g == 1))
    });

    run.stage("normal-crossings", |d| {
        let mut ok = true;
        for c in charts {
            let spec = which.chart(c);
            let ring = Chart::new(c, &k).ring;
            let nc = check_normal_crossings(&parse_all(&ring, &spec.divisor)?).map_err(err)?;
            d.push(format!("{c}: ({}) normal crossings {nc}", spec.divisor.join(", ")));
            ok &= nc;
        }
        Ok(ok)
    });

    let passed = run.stages.iter().all(|s| s.passed);
    Ok(VerificationReport { example: which, field, stages: run.stages, unchecked: UNCHECKED.to_vec(), passed })
}

impl VerificationReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let f = &self.field;
        let _ = write!(s, "{} [{}", self.example, f.mode);
        if let Some(p) = f.prime {
            let _ = write!(s, " q={p}");
        }
        let _ = write!(s, " seed={}", f.seed);
        for (k, v) in &f.descriptor.bindings {
            let _ = write!(s, " {k}={v}");
        }
        let _ = writeln!(s, "]");
        for st in &self.stages {
            let _ = writeln!(s, "  {:<17}{}", st.name, if st.passed { "pass" } else { "FAIL" });
            for d in &st.details {
                let _ = writeln!(s, "      {d}");
            }
        }
        for u in &self.unchecked {
            let _ = writeln!(s, "  unchecked: {} ({})", u.item, u.reason);
        }
        let _ = writeln!(s, "  overall: {}", if self.passed { "PASS" } else { "FAIL" });
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub max_degree: i64,
    pub agree: bool,
    pub only_enumerated: Vec<String>,
    pub only_brute_force: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerationReport {
    pub rank: u32,
    pub classes: Vec<CMClass>,
    pub z_families: usize,
    pub punctured_families: usize,
    pub isolated: usize,
    pub oracle: Option<OracleReport>,
}

/// Compares `enumerate_cm` with the exhaustive search up to `rank`.
pub fn oracle_check(rank: u32, max_degree: i64) -> OracleReport {
    let brute = brute_force_full(rank, max_degree);
    let predicted = predicted_full(rank, max_degree);
    OracleReport {
        max_degree,
        agree: brute == predicted,
        only_enumerated: predicted.difference(&brute).map(|b| b.to_string()).collect(),
        only_brute_force: brute.difference(&predicted).map(|b| b.to_string()).collect(),
    }
}

pub fn cmd_enumerate(rank: u32, oracle_degree: Option<i64>) -> Result<EnumerationReport, PipelineError> {
    if !(1..=64).contains(&rank) {
        return Err(PipelineError::Config(format!("rank {rank} outside 1..=64")));
    }
    if oracle_degree.is_some_and(|d| d < 1) {
        return Err(PipelineError::Config("--max-degree must be at least 1".into()));
    }
    let classes = enumerate_cm(rank);
    let (z, punctured, isolated) = family_counts(&classes);
    Ok(EnumerationReport {
        rank,
        classes,
        z_families: z,
        punctured_families: punctured,
        isolated,
        oracle: oracle_degree.map(|d| oracle_check(rank, d)),
    })
}

impl EnumerationReport {
    pub fn passed(&self) -> bool {
        self.oracle.as_ref().is_none_or(|o| o.agree)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<24} {:>7} {:>3}  {:<8} case", "bundle", "cm-rank", "m", "family");
        for c in &self.classes {
            let tag = serde_json::to_value(c.provenance).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let _ = writeln!(
                s,
                "{:<24} {:>7} {:>3}  {:<8} {}{}",
                c.bundle.to_string(),
                c.cm_rank,
                c.m,
                c.parameter_space.to_string(),
                tag,
                if c.flagged { " [flagged: omitted from the explicit list]" } else { "" }
            );
        }
        let _ = writeln!(s, "Z-families: {}, punctured: {}, isolated: {}", self.z_families, self.punctured_families, self.isolated);
        if let Some(o) = &self.oracle {
            let _ = writeln!(s, "oracle (ranks <= {}, |d| <= {}): {}", self.rank, o.max_degree, if o.agree { "agree" } else { "MISMATCH" });
            for b in &o.only_enumerated {
                let _ = writeln!(s, "  only enumerated: {b}");
            }
            for b in &o.only_brute_force {
                let _ = writeln!(s, "  only brute force: {b}");
            }
        }
        s
    }
}
