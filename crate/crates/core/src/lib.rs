//! Tuples of 2x2 complex matrices: which tuples generate the full matrix
//! algebra, how the non-generating locus stratifies, and how conjugation
//! invariants separate orbits.
//!
//! Everything runs on one of two scalar backends: binary64 complex numbers
//! with explicit tolerances, or exact Gaussian rationals.  See [`scalar`]
//! for the split, [`generation`] for the generation tests, [`invariants`]
//! for the trace invariants and orbit machinery, [`b2model`] for the
//! geometric model of the rank-two base space, and [`strata`] plus
//! [`suite`] for charts, map identities, and the randomized verification
//! suites.

pub mod b2model;
pub mod error;
pub mod generation;
pub mod invariants;
pub mod linalg;
pub mod mat2;
pub mod sample;
pub mod scalar;
pub mod strata;
pub mod suite;

pub use b2model::{
    b2_to_x, circle_sphere_embed, coordinate_change_identity_holds, f_inverse, f_map,
    f_round_trip_residual, g_inverse, g_map, retract_to_core, tangent_rel_distance,
    x_rel_distance, x_to_b2, y_rel_distance, z2_canonical, TangentPoint, XCoords, YPoint,
};
pub use error::Error;
pub use generation::{
    all_commute, classify, common_eigenline, friedland_gap, friedland_generates,
    friedland_sides, generates_by_span, is_incident, CommonLine, SpanClosure, Stratum,
    StratumTag, Word,
};
pub use invariants::{
    b2_coords, conjugate, conjugation_residual, find_conjugator, intertwiner_kernel,
    orbit_equivalent, realize_b2, semisimplify, semisimplify_detailed, sibirskii,
    traceless_retract, B2Coords, ConjugatorSearch, SibInvariants,
};
pub use mat2::{eigenlines, EigenLines, Mat2, MatTuple, ProjLine};
pub use sample::{
    edge_family, sample_complex_sphere, sample_conjugator, sample_exact_tuple,
    sample_float_tuple, sample_tangent_point, sample_tuple, sample_tuples, sample_unit_complex,
    sample_unit_vec3, AnyTuple, Dist, SplitMix64,
};
pub use scalar::{ExactScalar, FloatScalar, Scalar};
pub use strata::{
    flatten_tuple, i_map, j_map, numeric_jacobian_rank, p_trivialize, s1_act, s1_act_spheres,
    sigma_map, t_chart, tau_map, ChartKind, ChartSpec, RankEntry, JACOBIAN_STEP, RANK_GAP_HIGH,
    RANK_GAP_LOW,
};
pub use suite::{run_suite, run_suites, CheckResult, SuiteName, SuiteParams, SuiteReport};
