//! Shadow-system profiles, Busemann-type gauges, Brunn profiles and the
//! one-dimensional rearrangement inequality oracle.

mod gauges;
mod profile;
mod rbll;
mod shadow;

pub use gauges::{
    ball_bobkov_gauge, brunn_profile, busemann_gauge, check_concavity, milman_pajor_gauge, ConcavityCheck,
    BRUNN_CONVEXITY_TOL, GAUGE_REL_TOL,
};
pub use profile::{convexity_even_check, ConvexityVerdict, ProfileMethod, ProfileReport};
pub use rbll::{rbll_check_1d, rbll_family, RbllCase, RbllResult, RBLL_TOL};
pub use shadow::{shadow_profile, ShadowConfig, EXACT_PROFILE_TOL};
