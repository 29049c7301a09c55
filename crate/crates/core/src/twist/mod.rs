//! Standard-map dynamics: iteration, periodic orbits as critical points of
//! the discrete action, curve iteration and intersection counts.

mod curve;
mod intersect;
mod map;
mod orbits;

pub use curve::{iterate_curve, CurveError, CurveIteration, LipschitzStep, Polyline, RefineOptions, DEFAULT_BUDGET};
pub use intersect::{count_intersections, TANGENCY_SHIFT};
pub use map::{det, map_apply, map_iterate, mat_mul, op_norm, Mat2, PhaseSpace, TwistMapSpec};
pub use orbits::{
    action, canonical, deviation_bound, gradient, hessian, make_record, monodromy, newton,
    orbit_census, periodic_orbits, same_orbit, symbolic_seeds, Census, OrbitRecord, OrbitSet,
    Seeding, DEDUP_TOLERANCE, NONDEGENERACY_THRESHOLD,
};
