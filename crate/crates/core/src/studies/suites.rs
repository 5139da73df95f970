//! Named analytic fields grouped into suites: polynomials (exactness checks),
//! entire functions (superalgebraic decay), and vertex singularities `r^α`
//! (algebraic rates controlled by α).

use crate::polyspace::Jet;
use crate::projectors::{FieldSuite, Operator};
use crate::sobolev::{AnalyticField, Smoothness};
use std::fmt;

/// Default exponent of the singular suite.
pub const DEFAULT_ALPHA: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SuiteKind {
    Polynomial,
    Entire,
    /// `r^α` centred at the vertex at the origin (the left endpoint in 1D).
    Singular(f64),
}

impl SuiteKind {
    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::Polynomial => "poly",
            SuiteKind::Entire => "entire",
            SuiteKind::Singular(_) => "singular",
        }
    }

    /// Parses `poly`, `entire` and `singular` (with the given α).
    pub fn parse(s: &str, alpha: f64) -> Option<SuiteKind> {
        match s {
            "poly" | "polynomial" => Some(SuiteKind::Polynomial),
            "entire" => Some(SuiteKind::Entire),
            "singular" => Some(SuiteKind::Singular(alpha)),
            _ => None,
        }
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuiteKind::Singular(a) => write!(f, "singular(alpha={a})"),
            k => f.write_str(k.name()),
        }
    }
}

fn c(v: f64) -> Jet {
    Jet::cst(v)
}

fn radius(x: &[Jet; 3], dim: usize) -> Jet {
    let mut r2 = c(0.0);
    for xi in x.iter().take(dim) {
        r2 = r2 + *xi * *xi;
    }
    r2.sqrt()
}

/// Scalar fields on the `dim`-simplex.
pub fn scalar_fields(kind: SuiteKind, dim: usize) -> Vec<AnalyticField> {
    match (kind, dim) {
        (SuiteKind::Polynomial, 3) => vec![AnalyticField::new("x2yz_z3", 1, Smoothness::Polynomial(4), |v| {
            vec![v[0] * v[0] * v[1] * v[2] + v[2] * v[2] * v[2]]
        })],
        (SuiteKind::Polynomial, 2) => vec![AnalyticField::new("x2y_y2", 1, Smoothness::Polynomial(3), |v| {
            vec![v[0] * v[0] * v[1] + v[1] * v[1]]
        })],
        (SuiteKind::Polynomial, _) => {
            vec![AnalyticField::new("x3_x", 1, Smoothness::Polynomial(3), |v| vec![v[0] * v[0] * v[0] + v[0]])]
        }
        (SuiteKind::Entire, 3) => vec![AnalyticField::new("exp_sin", 1, Smoothness::Entire, |v| {
            vec![(v[0] + v[1] * 0.5).exp() * (v[1] * 3.0 + v[2] * 4.0 + 1.0).sin()]
        })],
        (SuiteKind::Entire, 2) => vec![AnalyticField::new("exp_cos", 1, Smoothness::Entire, |v| {
            vec![(v[0] * 0.7).exp() * (v[0] * 3.0 + v[1] * 4.0 + 0.5).cos()]
        })],
        (SuiteKind::Entire, _) => vec![
            AnalyticField::new("exp2x", 1, Smoothness::Entire, |v| vec![(v[0] * 2.0).exp()]),
            AnalyticField::new("sin6x", 1, Smoothness::Entire, |v| vec![(v[0] * 6.0).sin()]),
        ],
        (SuiteKind::Singular(a), 1) => {
            // (1 + x)^α on (−1, 1) lies in H^k for k < α + 1/2.
            vec![AnalyticField::new(format!("one_plus_x_pow_{a}"), 1, Smoothness::Finite(a + 0.5), move |v| {
                vec![(v[0] + 1.0).powf(a)]
            })]
        }
        (SuiteKind::Singular(a), d) => {
            // r^α at a vertex lies in H^k for k < α + d/2.
            vec![AnalyticField::new(format!("r_pow_{a}"), 1, Smoothness::Finite(a + d as f64 / 2.0), move |v| {
                vec![radius(v, d).powf(a)]
            })]
        }
    }
}

/// Vector fields with `dim` components on the `dim`-simplex.
pub fn vector_fields(kind: SuiteKind, dim: usize) -> Vec<AnalyticField> {
    match (kind, dim) {
        (SuiteKind::Polynomial, 3) => vec![AnalyticField::new("y2z_xz_x_zy2", 3, Smoothness::Polynomial(3), |v| {
            vec![v[1] * v[1] * v[2], v[0] * v[2], v[0] + v[2] * v[1] * v[1]]
        })],
        (SuiteKind::Polynomial, _) => vec![AnalyticField::new("y2_x2y", 2, Smoothness::Polynomial(3), |v| {
            vec![v[1] * v[1], v[0] * v[0] * v[1]]
        })],
        (SuiteKind::Entire, 3) => vec![AnalyticField::new("trig_exp", 3, Smoothness::Entire, |v| {
            vec![(v[1] * 3.0 + v[2] * 2.0).sin(), (v[0] * 2.0 - v[2]).exp(), (v[0] * 4.0 + v[1]).cos()]
        })],
        (SuiteKind::Entire, _) => vec![AnalyticField::new("sin_exp", 2, Smoothness::Entire, |v| {
            vec![(v[1] * 4.0).sin() * v[0].exp(), (v[0] * 3.0 - v[1] * 2.0).cos()]
        })],
        (SuiteKind::Singular(a), d) => {
            let name = format!("r_pow_{a}_vec");
            vec![AnalyticField::new(name, d, Smoothness::Finite(a + d as f64 / 2.0), move |v| {
                let r = radius(v, d).powf(a);
                if d == 3 {
                    vec![r, r * 2.0 + v[1], -r + v[0]]
                } else {
                    vec![r + v[1], r * (-0.5)]
                }
            })]
        }
    }
}

/// Fields an operator acts on.
pub fn fields_for(op: Operator, kind: SuiteKind) -> Vec<AnalyticField> {
    match op {
        Operator::Grad3d | Operator::L2_3d => scalar_fields(kind, 3),
        Operator::Curl3d | Operator::Div3d => vector_fields(kind, 3),
        Operator::Grad2d | Operator::L2_2d => scalar_fields(kind, 2),
        Operator::Curl2d => vector_fields(kind, 2),
        Operator::Grad1d => scalar_fields(kind, 1),
    }
}

/// The commuting-diagram suite built from a suite kind.
pub fn field_suite(kind: SuiteKind) -> FieldSuite {
    FieldSuite {
        name: kind.name().into(),
        scalar3d: scalar_fields(kind, 3),
        vector3d: vector_fields(kind, 3),
        scalar2d: scalar_fields(kind, 2),
        vector2d: vector_fields(kind, 2),
    }
}

/// Smooth and singular fields on the edge, used for the 1D operator.
pub fn mixed_1d(alpha: f64) -> Vec<AnalyticField> {
    let mut v = scalar_fields(SuiteKind::Entire, 1);
    v.extend(scalar_fields(SuiteKind::Singular(alpha), 1));
    v
}
