//! Seeded benchmark problem generators, reference optima, and the instance
//! archive format.
//!
//! Five problem families plus a fixed 2-D demo instance. Each generator is a
//! pure function of `(sizes, seed)` using the crate's documented generator,
//! so instances are bit-identical across runs and platforms; the per-field
//! sampling order is fixed by the implementations and covered by the archive
//! round-trip tests.

mod archive;
mod demo;
mod exp;
mod lin;
mod norm;
mod oracle;
mod sdp;
mod soc;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::program::ConvexProgram;

pub use archive::{parse_instance, write_instance};
pub use demo::{gen_demo, sphere_objective};
pub use exp::{gen_exp, lambert_w1, EXP_LIPSCHITZ_RADIUS};
pub use lin::gen_lin;
pub use norm::{ball_constraint, ball_projector, gen_norm};
pub use oracle::{ensure_reference, reference_oracle, DEFAULT_ORACLE_BUDGET};
pub use sdp::{gen_sdp, SdpData};
pub use soc::{gen_soc, SocCone, RESAMPLE_LIMIT};

/// The benchmark problem families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemClass {
    Lin,
    Sdp,
    Soc,
    Norm,
    Exp,
    Demo,
}

impl ProblemClass {
    pub const BENCHMARK: [ProblemClass; 5] = [
        ProblemClass::Lin,
        ProblemClass::Sdp,
        ProblemClass::Soc,
        ProblemClass::Norm,
        ProblemClass::Exp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemClass::Lin => "lin",
            ProblemClass::Sdp => "sdp",
            ProblemClass::Soc => "soc",
            ProblemClass::Norm => "norm",
            ProblemClass::Exp => "exp",
            ProblemClass::Demo => "demo",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lin" => Some(ProblemClass::Lin),
            "sdp" => Some(ProblemClass::Sdp),
            "soc" => Some(ProblemClass::Soc),
            "norm" => Some(ProblemClass::Norm),
            "exp" => Some(ProblemClass::Exp),
            "demo" => Some(ProblemClass::Demo),
            _ => None,
        }
    }

    /// Stable tag used when deriving per-instance seeds.
    pub fn seed_tag(self) -> u64 {
        match self {
            ProblemClass::Lin => 1,
            ProblemClass::Sdp => 2,
            ProblemClass::Soc => 3,
            ProblemClass::Norm => 4,
            ProblemClass::Exp => 5,
            ProblemClass::Demo => 6,
        }
    }

    pub fn default_dimension(self) -> usize {
        match self {
            ProblemClass::Lin => 10,
            ProblemClass::Sdp => 10,
            ProblemClass::Soc => 20,
            ProblemClass::Norm => 100,
            ProblemClass::Exp => 2,
            ProblemClass::Demo => 2,
        }
    }

    /// Default constraint count for the multi-constraint families.
    pub fn default_constraints(self, dimension: usize) -> Option<usize> {
        match self {
            ProblemClass::Lin => Some(dimension),
            ProblemClass::Soc => Some(5),
            _ => None,
        }
    }

    /// Whether the family has an analytic optimum (no oracle run needed).
    pub fn has_analytic_reference(self) -> bool {
        matches!(
            self,
            ProblemClass::Lin | ProblemClass::Norm | ProblemClass::Demo
        )
    }
}

/// Size and seed parameters of one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub class: ProblemClass,
    pub dimension: usize,
    /// Constraint count for the `lin`/`soc` families; `None` elsewhere.
    pub constraints: Option<usize>,
    pub seed: u64,
}

impl ProblemSpec {
    pub fn new(class: ProblemClass, seed: u64) -> Self {
        let dimension = class.default_dimension();
        ProblemSpec {
            class,
            dimension,
            constraints: class.default_constraints(dimension),
            seed,
        }
    }

    pub fn with_dimension(mut self, dimension: usize) -> Self {
        self.dimension = dimension;
        if self.constraints.is_some() {
            self.constraints = self.class.default_constraints(dimension);
        }
        self
    }

    pub fn with_constraints(mut self, m: usize) -> Self {
        self.constraints = Some(m);
        self
    }

    pub fn generate(&self) -> Result<GeneratedInstance> {
        let m = self
            .constraints
            .or_else(|| self.class.default_constraints(self.dimension));
        match self.class {
            ProblemClass::Lin => gen_lin(self.dimension, m.unwrap_or(self.dimension), self.seed),
            ProblemClass::Sdp => gen_sdp(self.dimension, self.dimension, self.seed),
            ProblemClass::Soc => gen_soc(self.dimension, m.unwrap_or(5), self.seed),
            ProblemClass::Norm => gen_norm(self.dimension, self.seed),
            ProblemClass::Exp => gen_exp(self.dimension, self.seed),
            ProblemClass::Demo => gen_demo(),
        }
    }
}

/// Origin and value of a reference optimum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReferenceValue {
    /// Known in closed form from the construction.
    Analytic(f64),
    /// Estimated by the two-anchor diminishing-step oracle.
    Oracle { value: f64, low_confidence: bool },
}

impl ReferenceValue {
    pub fn value(&self) -> f64 {
        match *self {
            ReferenceValue::Analytic(v) => v,
            ReferenceValue::Oracle { value, .. } => value,
        }
    }

    pub fn is_low_confidence(&self) -> bool {
        matches!(
            self,
            ReferenceValue::Oracle {
                low_confidence: true,
                ..
            }
        )
    }
}

/// Generator internals kept for audits and archival, per family.
#[derive(Clone, Debug)]
pub enum InstanceData {
    Lin(LinData),
    Sdp(Arc<SdpData>),
    Soc(SocData),
    Norm,
    Exp(ExpData),
    Demo(DemoData),
}

#[derive(Clone, Debug)]
pub struct LinData {
    /// Constraint gradients `a_i`; the first is the negated cost direction.
    pub normals: Vec<Vector>,
}

#[derive(Clone, Debug)]
pub struct SocData {
    pub cones: Vec<Arc<SocCone>>,
    /// The sphere sample at which every cone is exactly active (before the
    /// anchor refinement).
    pub raw_anchor: Vector,
}

#[derive(Clone, Debug)]
pub struct ExpData {
    /// The vector `b` with every entry equal to `W(1)`.
    pub center: Vector,
    /// Right-hand side of the constraint (equals the dimension).
    pub level: f64,
}

#[derive(Clone, Debug)]
pub struct DemoData {
    /// Constraint `normal . x <= rhs`.
    pub normal: Vector,
    pub rhs: f64,
    /// Constrained optimum of the sphere objective and its value.
    pub optimum: Vector,
    pub optimum_value: f64,
}

/// A generated problem instance: the program, its reference optimum (if
/// known yet), and the generator internals.
#[derive(Clone)]
pub struct GeneratedInstance {
    pub spec: ProblemSpec,
    pub program: ConvexProgram,
    pub reference: Option<ReferenceValue>,
    pub data: InstanceData,
}

impl GeneratedInstance {
    /// Objective value at the anchor; the normalization baseline.
    pub fn objective_at_anchor(&self) -> f64 {
        self.program.objective().value(self.program.anchor())
    }
}

/// Rebuilds the constraint/program of an instance from its raw data. Shared
/// by the generators and the archive parser so both construct byte-identical
/// programs.
pub(crate) fn rebuild_program(
    class: ProblemClass,
    data: &InstanceData,
    cost: Vector,
    anchor: Vector,
) -> Result<ConvexProgram> {
    match (class, data) {
        (ProblemClass::Lin, InstanceData::Lin(d)) => lin::build_program(cost, &d.normals, anchor),
        (ProblemClass::Sdp, InstanceData::Sdp(d)) => {
            sdp::build_program(Arc::clone(d), cost, anchor)
        }
        (ProblemClass::Soc, InstanceData::Soc(d)) => soc::build_program(&d.cones, cost, anchor),
        (ProblemClass::Norm, InstanceData::Norm) => norm::build_program(cost, anchor),
        (ProblemClass::Exp, InstanceData::Exp(d)) => {
            exp::build_program(cost, d.center.clone(), d.level, anchor)
        }
        (ProblemClass::Demo, InstanceData::Demo(d)) => demo::build_program(d, anchor),
        _ => Err(Error::InvalidInput(
            "instance data does not match the problem class".into(),
        )),
    }
}
