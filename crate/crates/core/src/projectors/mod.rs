//! Projection-based interpolation: Π^grad, Π^curl, Π^div, Π^L² on the
//! tetrahedron, their 2D analogs on the triangle, and the 1D operator.
//!
//! A plan splits the target space into blocks, one per vertex, edge, face
//! and the interior. Each block is a minimum-norm lift of the traces of
//! one sub-simplex that vanishes on every other sub-simplex of the same or
//! lower dimension. The conditions of a stage only see traces on its own
//! sub-simplex, so the full system is block lower triangular and is solved
//! by forward substitution, one small square system per stage.
//!
//! All conditions are stored as weighted point functionals of the field
//! values. Derivatives of the field are moved onto the test functions by
//! integration by parts, with explicit boundary terms where the test
//! functions do not vanish.

mod commuting;
mod conditions;

pub use commuting::{check_commuting, check_projection, FieldSuite};

use crate::error::{Error, Result};
use crate::linalg;
use crate::polyspace::{build_space, sample_rows, trace_operator, Field, PolyFn, PolySpace, SpaceKind, SubSimplex, TraceFamily};
use crate::refsimplex::{edge, tet, tri, Point, ReferenceCell};
use nalgebra::{DMatrix, DVector};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Post-solve tolerance on the relative residual of every condition.
pub const CONDITION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    Grad3d,
    Curl3d,
    Div3d,
    L2_3d,
    Grad2d,
    Curl2d,
    L2_2d,
    Grad1d,
}

impl Operator {
    pub const ALL: [Operator; 8] = [
        Operator::Grad3d,
        Operator::Curl3d,
        Operator::Div3d,
        Operator::L2_3d,
        Operator::Grad2d,
        Operator::Curl2d,
        Operator::L2_2d,
        Operator::Grad1d,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Operator::Grad3d => "grad3d",
            Operator::Curl3d => "curl3d",
            Operator::Div3d => "div3d",
            Operator::L2_3d => "l2_3d",
            Operator::Grad2d => "grad2d",
            Operator::Curl2d => "curl2d",
            Operator::L2_2d => "l2_2d",
            Operator::Grad1d => "grad1d",
        }
    }

    pub fn parse(s: &str) -> Option<Operator> {
        Operator::ALL.into_iter().find(|o| o.name().eq_ignore_ascii_case(s))
    }

    pub fn cell(&self) -> Arc<ReferenceCell> {
        match self.cell_dim() {
            3 => tet(),
            2 => tri(),
            _ => edge(),
        }
    }

    pub fn cell_dim(&self) -> usize {
        match self {
            Operator::Grad3d | Operator::Curl3d | Operator::Div3d | Operator::L2_3d => 3,
            Operator::Grad2d | Operator::Curl2d | Operator::L2_2d => 2,
            Operator::Grad1d => 1,
        }
    }

    pub fn family(&self) -> TraceFamily {
        match self {
            Operator::Curl3d | Operator::Curl2d => TraceFamily::Tangential,
            Operator::Div3d => TraceFamily::Normal,
            _ => TraceFamily::Scalar,
        }
    }

    /// Target space. The 1D operator maps onto P_p; the others follow the
    /// sequence indexing (Π^grad onto W_{p+1}).
    pub fn target(&self, p: usize) -> Result<PolySpace> {
        let cell = self.cell();
        let kind = match self {
            Operator::Grad3d | Operator::Grad2d => SpaceKind::W,
            Operator::Curl3d | Operator::Curl2d => SpaceKind::Q,
            Operator::Div3d => SpaceKind::V,
            Operator::L2_3d | Operator::L2_2d | Operator::Grad1d => SpaceKind::L2,
        };
        if *self == Operator::Grad1d && p == 0 {
            return Err(Error::UnsupportedDegree(0));
        }
        build_space(&cell, kind, p as i64)
    }

    /// Sub-simplices fixed before the interior, grouped by stage level.
    fn levels(&self, cell: &ReferenceCell) -> Vec<Vec<SubSimplex>> {
        let verts: Vec<SubSimplex> = (0..cell.vertices.len()).map(SubSimplex::Vertex).collect();
        let edges: Vec<SubSimplex> = (0..cell.edges.len()).map(SubSimplex::Edge).collect();
        let faces: Vec<SubSimplex> = (0..cell.faces.len()).map(SubSimplex::Face).collect();
        match self {
            Operator::Grad3d => vec![verts, edges, faces],
            Operator::Curl3d => vec![edges, faces],
            Operator::Div3d => vec![faces],
            Operator::Grad2d => vec![verts, edges],
            Operator::Curl2d => vec![edges],
            Operator::Grad1d => vec![verts],
            Operator::L2_3d | Operator::L2_2d => vec![],
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a stage lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entity {
    Sub(SubSimplex),
    Interior,
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entity::Sub(SubSimplex::Vertex(i)) => write!(f, "vertex{i}"),
            Entity::Sub(SubSimplex::Edge(i)) => write!(f, "edge{i}"),
            Entity::Sub(SubSimplex::Face(i)) => write!(f, "face{i}"),
            Entity::Interior => f.write_str("interior"),
        }
    }
}

/// One square solve of a plan.
#[derive(Clone, Debug)]
pub struct Stage {
    pub entity: Entity,
    /// Sample points of the field used by this stage.
    pub points: Vec<Point>,
    /// Condition functionals on point-major samples (conditions × points·value_dim).
    pub functionals: DMatrix<f64>,
    /// The same functionals applied to the target basis.
    pub cond: DMatrix<f64>,
    /// Lifted block of this stage, rows in target coordinates.
    pub lift: DMatrix<f64>,
    /// Square stage matrix cond · liftᵀ and its LU factors.
    pub system: DMatrix<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    /// Smallest and largest singular values of the stage matrix.
    pub sigma: (f64, f64),
}

impl Stage {
    pub fn size(&self) -> usize {
        self.lift.nrows()
    }

    pub fn condition_number(&self) -> f64 {
        if self.size() == 0 {
            1.0
        } else {
            self.sigma.1 / self.sigma.0
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProjectorPlan {
    pub op: Operator,
    pub p: usize,
    pub target: Arc<PolySpace>,
    pub stages: Vec<Stage>,
}

/// Result of applying a plan.
#[derive(Clone, Debug)]
pub struct Interpolant {
    pub coords: DVector<f64>,
    pub element: PolyFn,
    /// Coefficients solved in each stage, in stage order.
    pub stage_outputs: Vec<DVector<f64>>,
    /// Largest relative condition residual after the solve.
    pub residual: f64,
}

/// Build (or fetch from the process cache) the plan of an operator.
pub fn build_plan(op: Operator, p: usize) -> Result<Arc<ProjectorPlan>> {
    static CACHE: OnceLock<Mutex<HashMap<(Operator, usize), Arc<ProjectorPlan>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(plan) = cache.lock().unwrap().get(&(op, p)) {
        return Ok(plan.clone());
    }
    let plan = Arc::new(ProjectorPlan::new(op, p)?);
    cache.lock().unwrap().insert((op, p), plan.clone());
    Ok(plan)
}

impl ProjectorPlan {
    /// Assemble all stages without touching the cache.
    pub fn new(op: Operator, p: usize) -> Result<Self> {
        let target = Arc::new(op.target(p)?);
        let cell = target.cell.clone();
        let dim_t = target.dim();
        let family = op.family();
        let ctx = conditions::Context::new(op, &target)?;
        let mut stages = Vec::new();
        // Rows (target coordinates) of the functions whose traces on all
        // earlier levels vanish.
        let mut z = DMatrix::identity(dim_t, dim_t);
        for level in op.levels(&cell) {
            let mut traces = Vec::new();
            for &sub in &level {
                let (tr, _, _) = trace_operator(&cell, family, target.value_dim, target.degree, sub)?;
                traces.push((sub, &tr * target.basis.transpose() * z.transpose()));
            }
            let refs: Vec<&DMatrix<f64>> = traces.iter().map(|t| &t.1).collect();
            let a = linalg::vstack(&refs, z.nrows());
            let a_pinv = linalg::pinv(&a);
            let mut offset = 0;
            for (sub, m) in &traces {
                // Range of this trace on the current block: the sub-simplex bubbles.
                let r = linalg::orth_rows(&m.transpose());
                let mut data = DMatrix::zeros(a.nrows(), r.nrows());
                data.view_mut((offset, 0), (m.nrows(), r.nrows())).copy_from(&r.transpose());
                let y = &a_pinv * &data;
                let miss = linalg::max_abs(&(&a * &y - &data));
                if miss > 1e-9 {
                    return Err(Error::Residual { context: format!("{op} lift on {}", Entity::Sub(*sub)), residual: miss, tol: 1e-9 });
                }
                let lift = y.transpose() * &z;
                offset += m.nrows();
                if r.nrows() == 0 {
                    continue;
                }
                let (points, functionals) = ctx.sub_conditions(*sub, &r)?;
                stages.push(Stage::new(Entity::Sub(*sub), points, functionals, lift, &target)?);
            }
            let n = linalg::null_space_rows(&a);
            z = if n.nrows() == 0 { DMatrix::zeros(0, dim_t) } else { n * z };
        }
        if z.nrows() > 0 {
            let (points, functionals) = ctx.interior_conditions(&z)?;
            stages.push(Stage::new(Entity::Interior, points, functionals, z, &target)?);
        }
        let total: usize = stages.iter().map(|s| s.size()).sum();
        if total != dim_t {
            return Err(Error::Residual { context: format!("{op} block count {total} vs dim {dim_t}"), residual: total as f64, tol: dim_t as f64 });
        }
        Ok(ProjectorPlan { op, p, target, stages })
    }

    /// Interpolate a field given by point values.
    pub fn apply(&self, u: &dyn Field) -> Result<Interpolant> {
        let vd = self.target.value_dim;
        if u.value_dim() != vd {
            return Err(Error::UnsupportedSpace(format!("{} expects {vd} components, got {}", self.op, u.value_dim())));
        }
        let moments: Vec<Result<DVector<f64>>> = crate::par::map_collect(self.stages.iter().collect(), |s| {
            let vals = u.sample(&s.points);
            if let Some(i) = vals.iter().position(|x| !x.is_finite()) {
                let p = s.points[i / vd];
                return Err(Error::NonFinite { x: p[0], y: p[1], z: p[2] });
            }
            Ok(&s.functionals * DVector::from_vec(vals))
        });
        let moments = moments.into_iter().collect::<Result<Vec<_>>>()?;
        self.solve(&moments)
    }

    /// Interpolate a member of the target space given by its coordinates;
    /// the moments are exact, so this is the projection check without sampling.
    pub fn apply_coeffs(&self, coords: &DVector<f64>) -> Result<Interpolant> {
        let moments: Vec<DVector<f64>> = self.stages.iter().map(|s| &s.cond * coords).collect();
        self.solve(&moments)
    }

    /// Forward substitution over the stages given the field moments.
    pub fn solve(&self, moments: &[DVector<f64>]) -> Result<Interpolant> {
        let mut c = DVector::zeros(self.target.dim());
        let mut outs = Vec::with_capacity(self.stages.len());
        for (s, m) in self.stages.iter().zip(moments) {
            let rhs = m - &s.cond * &c;
            let y = if s.size() == 0 { DVector::zeros(0) } else { s.lu.solve(&rhs).expect("stage factor is invertible") };
            c += s.lift.transpose() * &y;
            outs.push(y);
        }
        let mut residual: f64 = 0.0;
        for (s, m) in self.stages.iter().zip(moments) {
            let r = (&s.cond * &c - m).norm();
            let scale = m.norm() + s.cond.norm() * c.norm();
            if scale > 0.0 {
                residual = residual.max(r / scale);
            }
        }
        if residual > CONDITION_TOL {
            return Err(Error::Residual { context: format!("{} conditions", self.op), residual, tol: CONDITION_TOL });
        }
        Ok(Interpolant { element: self.target.element(&c), coords: c, stage_outputs: outs, residual })
    }

    /// Worst stage condition number.
    pub fn max_condition_number(&self) -> f64 {
        self.stages.iter().map(|s| s.condition_number()).fold(1.0, f64::max)
    }
}

impl Stage {
    fn new(entity: Entity, points: Vec<Point>, functionals: DMatrix<f64>, lift: DMatrix<f64>, target: &PolySpace) -> Result<Self> {
        let samples = sample_rows(&target.cell, target.degree, target.value_dim, &target.basis, &points);
        let cond = &functionals * samples;
        let system = &cond * lift.transpose();
        if system.nrows() != system.ncols() {
            return Err(Error::Singular {
                context: format!("{entity}: {} conditions for {} unknowns", system.nrows(), system.ncols()),
                sigma: 0.0,
            });
        }
        let sigma = linalg::sigma_range(&system);
        if system.nrows() > 0 && !(sigma.0 > 1e-12 * sigma.1) {
            return Err(Error::Singular { context: format!("{entity} stage"), sigma: sigma.0 });
        }
        let lu = system.clone().lu();
        Ok(Stage { entity, points, functionals, cond, lift, system, lu, sigma })
    }
}

/// Interpolate with the cached plan of an operator.
pub fn interpolate(op: Operator, p: usize, u: &dyn Field) -> Result<Interpolant> {
    build_plan(op, p)?.apply(u)
}

/// The 1D operator on (−1, 1): endpoint interpolation plus H¹-seminorm
/// orthogonality to the bubbles.
pub fn apply_1d(p: usize, u: &dyn Field) -> Result<Interpolant> {
    interpolate(Operator::Grad1d, p, u)
}
