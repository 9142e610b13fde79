//! Plant dynamics with position-and-orientation based Cosserat rods.
//!
//! A plant is drawn as branch curves, compiled into a tree of rod segments
//! with fruit and leaf organs, and stepped by a Gauss–Seidel constraint
//! solver. Plant primitives collide with each other and are pushed by
//! scripted rigid obstacles described by signed distance fields. Segments
//! whose strain exceeds a threshold break, which is how fruit is harvested.
//!
//! ```
//! use plantsim::prelude::*;
//!
//! let curves = CurveSet {
//!     curves: vec![Curve::constant(vec![vec3(0.0, 0.0, 0.0), vec3(0.0, 0.0, 0.3)], 0.005)],
//!     root_curve: 0,
//!     root_end: CurveEnd::Start,
//! };
//! let params = CompilerParams { step: 0.005, sigma_connect: 0.02, sigma_distance: 0.05 };
//! let plant = compile_plant(&curves, &params, &[]).unwrap();
//! let material = Material::new(2e7, 0.3, 300.0).unwrap();
//! let mut state = build_sim_state(&plant.graph, &material, &[0], &LeafLibrary::builtin()).unwrap();
//! let mut solver = Solver::new();
//! solver
//!     .step(&mut state, &SolverParams::default(), &CollisionParams::default(), &[], &FracturePolicy::default())
//!     .unwrap();
//! assert_eq!(state.step_index, 1);
//! ```

pub mod collision;
pub mod compiler;
pub mod error;
pub mod fracture;
pub mod math;
pub mod rod;
pub mod scene;
pub mod solver;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::collision::{
        sdf_query, CollisionParams, GridSdf, Pose, PoseSample, PoseTrajectory, RigidObstacle, Sdf, SdfPrimitive,
    };
    pub use crate::compiler::{
        build_sim_state, compile_plant, connect_branches, sample_curves, simplify, CompilerParams, Curve, CurveEnd,
        CurveSet, LeafLibrary, OrganKind, OrganSpec, PlantGraph,
    };
    pub use crate::error::{Error, Result};
    pub use crate::fracture::{check_fracture, detach_time, FractureEvent, FracturePolicy, FractureThresholds};
    pub use crate::math::{vec3, Quat, Vec3, IDENTITY};
    pub use crate::rod::{
        compute_darboux, director, material_to_stiffness, stretch_shear_constraint, bend_twist_constraint, Material,
        SegmentKind,
    };
    pub use crate::solver::{SimState, Solver, SolverParams};
}
