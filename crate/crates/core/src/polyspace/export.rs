//! JSON documents listing polynomials as monomial expansions.

use super::basis::MonoPoly;
use super::{eval_basis, PolyFn, PolySpace};
use crate::refsimplex::ReferenceCell;
use serde_json::{json, Value};

fn ambient_monomials(cell: &ReferenceCell, degree: usize) -> Vec<MonoPoly> {
    let x: Vec<MonoPoly> = (0..cell.dim).map(MonoPoly::var).collect();
    eval_basis::<MonoPoly>(cell, degree, &x)
}

fn expand(mono: &[MonoPoly], coeffs: &[f64], value_dim: usize) -> Value {
    let n = mono.len();
    let comps: Vec<Value> = (0..value_dim)
        .map(|c| {
            let mut acc = MonoPoly::default();
            for j in 0..n {
                let a = coeffs[c * n + j];
                if a != 0.0 {
                    for (e, v) in &mono[j].0 {
                        *acc.0.entry(*e).or_insert(0.0) += a * v;
                    }
                }
            }
            let terms: Vec<Value> = acc
                .0
                .iter()
                .filter(|(_, v)| v.abs() > 1e-15)
                .map(|(e, v)| json!({ "exponents": [e[0], e[1], e[2]], "coefficient": v }))
                .collect();
            Value::Array(terms)
        })
        .collect();
    Value::Array(comps)
}

fn cell_json(cell: &ReferenceCell) -> Value {
    json!({ "dim": cell.dim, "vertices": cell.vertices.iter().map(|v| v[..cell.dim].to_vec()).collect::<Vec<_>>() })
}

/// Basis of a space as monomial expansions in cell coordinates.
pub fn basis_json(space: &PolySpace) -> Value {
    let mono = ambient_monomials(&space.cell, space.degree);
    let funcs: Vec<Value> =
        (0..space.dim()).map(|i| expand(&mono, space.basis.row(i).transpose().as_slice(), space.value_dim)).collect();
    json!({
        "cell": cell_json(&space.cell),
        "kind": space.kind.name(),
        "p": space.p,
        "value_dim": space.value_dim,
        "dim": space.dim(),
        "basis": funcs,
    })
}

/// A single polynomial field as a monomial expansion.
pub fn polyfn_json(f: &PolyFn) -> Value {
    let mono = ambient_monomials(&f.cell, f.degree);
    json!({
        "cell": cell_json(&f.cell),
        "degree": f.degree,
        "value_dim": f.value_dim,
        "components": expand(&mono, f.coeffs.as_slice(), f.value_dim),
    })
}
