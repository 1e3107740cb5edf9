//! The two worked examples: presentations, identities, chart data and the
//! expected ramification and curve data used by the verification pipeline.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::blowup::{BasisChoice, ChartName};
use crate::polyring::{PolyRing, Polynomial};
use crate::scalars::{FieldContext, FieldDescriptor};
use crate::structalg::{AlgError, SkewPresentation, StructureConstantAlgebra};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    /// `x² = v, y² = u(u² + λv²), xy + yx = 2εuv` over `Q(λ)[ε]`, `ε² = 1 + λ`.
    Ex1,
    /// `x³ = v, y³ = u(u − v), xy = ζyx` over `Q[ζ]`, `ζ² + ζ + 1 = 0`.
    Ex2,
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Example {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ex1" => Ok(Example::Ex1),
            "ex2" => Ok(Example::Ex2),
            other => Err(format!("unknown example {other:?} (expected ex1 or ex2)")),
        }
    }
}

/// Where an identity is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Location {
    Original,
    /// The pulled-back algebra on a chart, original basis.
    Pulled(ChartName),
    /// The chart order with adjoined generators.
    Chart(ChartName),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Identity {
    pub location: Location,
    pub lhs: &'static str,
    pub rhs: &'static str,
}

const fn id(location: Location, lhs: &'static str, rhs: &'static str) -> Identity {
    Identity { location, lhs, rhs }
}

/// Generator definitions and basis choice for one chart.
#[derive(Debug, Clone)]
pub struct ChartSpec {
    pub defs: Vec<(String, String)>,
    pub basis: BasisChoice,
    /// Generators of the reduction ideal on this chart.
    pub ideal: Vec<&'static str>,
    /// Defining polynomial `c` of the expected curve `wⁿ = c`.
    pub curve: &'static str,
    /// Name of the fibre coordinate of the curve.
    pub fiber: &'static str,
    /// Components of the ramification divisor on the chart.
    pub divisor: Vec<&'static str>,
}

fn defs(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

impl Example {
    pub const ALL: [Example; 2] = [Example::Ex1, Example::Ex2];

    pub fn id(&self) -> &'static str {
        match self {
            Example::Ex1 => "ex1",
            Example::Ex2 => "ex2",
        }
    }

    /// Symbolic coefficient field.
    pub fn descriptor(&self) -> FieldDescriptor {
        match self {
            Example::Ex1 => FieldDescriptor::rationals()
                .with_transcendental("lambda")
                .with_extension("eps", "eps^2 - (1 + lambda)")
                .with_excluded("lambda", &["0", "1"]),
            Example::Ex2 => FieldDescriptor::rationals().with_extension("zeta", "zeta^2 + zeta + 1"),
        }
    }

    /// Degree of the algebra over its centre (2 or 3).
    pub fn degree(&self) -> usize {
        match self {
            Example::Ex1 => 2,
            Example::Ex2 => 3,
        }
    }

    /// Components of the ramification divisor of the original algebra.
    pub fn divisor(&self) -> Vec<&'static str> {
        match self {
            Example::Ex1 => vec!["u", "v", "u - v", "u - lambda*v"],
            Example::Ex2 => vec!["u", "v", "u - v"],
        }
    }

    pub fn identities(&self) -> Vec<Identity> {
        use ChartName::*;
        use Location::*;
        match self {
            Example::Ex1 => vec![
                id(Original, "x^2", "v"),
                id(Original, "y^2", "u*(u^2 + lambda*v^2)"),
                id(Original, "x*y + y*x", "2*eps*u*v"),
                id(Original, "z", "x*y"),
                id(Original, "z^2", "2*eps*u*v*z - u*v*(u^2 + lambda*v^2)"),
                id(Original, "(z - eps*u*v)^2", "z^2 - 2*eps*u*v*z + (1 + lambda)*u^2*v^2"),
                id(Original, "z^2 - 2*eps*u*v*z + (1 + lambda)*u^2*v^2", "-u*v*(u^2 + lambda*v^2) + (1 + lambda)*u^2*v^2"),
                id(Original, "(z - eps*u*v)^2", "u*v*(u - v)*(lambda*v - u)"),
                id(Pulled(U1), "x^2", "v"),
                id(Pulled(U1), "y^2", "xi*(xi^2 + lambda)*v^3"),
                id(Pulled(U1), "x*y + y*x", "2*eps*xi*v^2"),
                id(Pulled(U1), "z^2", "2*eps*xi*v^2*z - xi*v^4*(xi^2 + lambda)"),
                id(Pulled(U2), "x^2", "eta*u"),
                id(Pulled(U2), "y^2", "u^3*(1 + lambda*eta^2)"),
                id(Pulled(U2), "x*y + y*x", "2*eps*eta*u^2"),
                id(Pulled(U2), "z^2", "2*eps*eta*u^2*z - eta*u^4*(1 + eta^2*lambda)"),
                id(Chart(U1), "y1", "x*z1 + eps*xi*x"),
                id(Chart(U1), "z1^2", "xi*(xi - 1)*(lambda - xi)"),
                // xz₂ = u⁻²x²y − εηx = ηy₂ − εηx fixes the sign of the last term
                id(Chart(U2), "eta*y2", "x*z2 + eps*eta*x"),
                id(Chart(U2), "z2*y2", "(1 + lambda*eta^2)*x - eps*eta*y2"),
                id(Chart(U2), "y2^2", "(1 + lambda*eta^2)*u"),
                id(Chart(U2), "z2^2", "eta*(1 - eta)*(lambda*eta - 1)"),
            ],
            Example::Ex2 => vec![
                id(Original, "x^3", "v"),
                id(Original, "y^3", "u*(u - v)"),
                id(Original, "x*y", "zeta*y*x"),
                id(Original, "y*x", "zeta^2*x*y"),
                id(Original, "(x*y)^3", "x^3*y^3"),
                id(Original, "(x*y)^3", "u*v*(u - v)"),
                id(Pulled(U1), "x^3", "v"),
                id(Pulled(U1), "y^3", "xi*(xi - 1)*v^2"),
                id(Pulled(U2), "x^3", "eta*u"),
                id(Pulled(U2), "y^3", "u^2*(1 - eta)"),
                id(Chart(U1), "z1^3", "xi*(xi - 1)"),
                id(Chart(U1), "y", "x^2*z1"),
                id(Chart(U1), "w1", "zeta*x*z1^2"),
                id(Chart(U2), "z2^3", "eta*(1 - eta)"),
                id(Chart(U2), "w2^3", "u*(1 - eta)^2"),
            ],
        }
    }

    pub fn chart(&self, name: ChartName) -> ChartSpec {
        use ChartName::*;
        match (self, name) {
            (Example::Ex1, U1) => ChartSpec {
                defs: defs(&[("y1", "v^-1*y"), ("z1", "v^-2*z - eps*xi")]),
                basis: BasisChoice::Explicit(["1", "x", "y1", "z1"].map(String::from).to_vec()),
                ideal: vec!["x"],
                curve: "xi*(xi - 1)*(lambda - xi)",
                fiber: "z1",
                divisor: vec!["xi", "v", "xi - 1", "xi - lambda"],
            },
            (Example::Ex1, U2) => ChartSpec {
                defs: defs(&[("y2", "u^-1*y"), ("z2", "u^-2*z - eps*eta")]),
                basis: BasisChoice::Explicit(["1", "x", "y2", "z2"].map(String::from).to_vec()),
                ideal: vec!["x", "y2"],
                curve: "eta*(1 - eta)*(lambda*eta - 1)",
                fiber: "z2",
                divisor: vec!["u", "eta", "1 - eta", "1 - lambda*eta"],
            },
            (Example::Ex2, U1) => ChartSpec {
                defs: defs(&[("w1", "v^-1*y^2"), ("z1", "v^-1*x*y")]),
                basis: BasisChoice::MonomialSearch { max_len: 3 },
                ideal: vec!["x"],
                curve: "xi*(xi - 1)",
                fiber: "z1",
                divisor: vec!["xi", "v", "xi - 1"],
            },
            (Example::Ex2, U2) => ChartSpec {
                defs: defs(&[("w2", "u^-1*y^2"), ("z2", "u^-1*x*y")]),
                basis: BasisChoice::MonomialSearch { max_len: 3 },
                ideal: vec!["x", "w2"],
                curve: "eta*(1 - eta)",
                fiber: "z2",
                divisor: vec!["u", "eta", "1 - eta"],
            },
        }
    }

    /// Transition identities `(chart-2 generator, expression in chart-1 generators)`.
    pub fn transitions(&self) -> Vec<(String, String)> {
        match self {
            Example::Ex1 => defs(&[("y2", "eta*y1"), ("z2", "eta^2*z1")]),
            Example::Ex2 => defs(&[("w2", "eta*w1"), ("z2", "eta*z1")]),
        }
    }
}

/// The base ring `k[u, v]`.
pub fn base_ring(ctx: &Arc<FieldContext>) -> Arc<PolyRing> {
    PolyRing::new(ctx, &["u", "v"])
}

/// Builds the example algebra over `k[u, v]` by word rewriting.
pub fn build_example_algebra(which: Example, ctx: &Arc<FieldContext>) -> Result<Arc<StructureConstantAlgebra>, AlgError> {
    let needed: &[&str] = match which {
        Example::Ex1 => &["lambda", "eps"],
        Example::Ex2 => &["zeta"],
    };
    for s in needed {
        if !ctx.has_symbol(s) {
            return Err(AlgError::BadSpecialization(format!("field has no generator {s} required by {which}")));
        }
    }
    let r = base_ring(ctx);
    let p = |s: &str| Polynomial::parse(&r, s).map_err(AlgError::from);
    let pres = match which {
        Example::Ex1 => {
            if ctx.free_transcendental() != Some("lambda") {
                let l = ctx.symbol("lambda")?;
                if l.is_zero() || l.is_one() {
                    return Err(AlgError::BadSpecialization("lambda must avoid 0 and 1".into()));
                }
            }
            SkewPresentation {
                n: 2,
                x_pow: p("v")?,
                y_pow: p("u*(u^2 + lambda*v^2)")?,
                q: ctx.from_int(-1),
                d: p("2*eps*u*v")?,
                labels: Some(["1", "x", "y", "z"].map(String::from).to_vec()),
                extra_symbols: vec![("z".into(), "x*y".into())],
            }
        }
        // xy = ζ·yx  ⇔  yx = ζ²·xy
        Example::Ex2 => SkewPresentation {
            n: 3,
            x_pow: p("v")?,
            y_pow: p("u*(u - v)")?,
            q: ctx.parse("zeta^2")?,
            d: Polynomial::zero(&r),
            labels: None,
            extra_symbols: Vec::new(),
        },
    };
    pres.build(which.degree())
}
