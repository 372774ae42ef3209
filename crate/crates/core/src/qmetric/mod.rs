//! Operator norms, the Lip-norm, the spectral metric on `X_q` and the
//! distance bounds between the fuzzy spheres and the Podles sphere.

pub mod gns;
pub mod mk;
pub mod report;
pub mod spectral;

pub use gns::{
    gns_compression, gns_norm, gns_norm_at_degree, lipnorm, lipnorm_branches, LipEstimate, NormEstimate,
    TruncationConfig,
};
pub use mk::{counit_measure, hn_measure, mk_between, mk_lower, mk_lower_seeded, MkConfig, MkResult, PointMeasure};
pub use report::{lip_contraction_margin, DistanceReport};
pub use spectral::{
    distance_to_zero, distq_upper, dq_envelopes, dq_upper, dq_upper_via_state, f_func, f_lower_envelope,
    f_upper_envelope, g_func, h_transform, rho_q, spectral_weight, BivariatePoly, XqPoint,
};
