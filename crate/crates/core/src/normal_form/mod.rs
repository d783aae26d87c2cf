//! Truncated saddle jets and their weak Moser normal form, and the
//! longitudinal cocycle of suspension flows.

pub mod cocycle;
pub mod jet;
pub mod poly;

pub use cocycle::{
    longitudinal_cocycle, longitudinal_cocycle_with, transversal_independence_check,
    verify_cocycle_identities, CocycleMethod, CocycleOptions, CocycleValue, CovarianceCheck,
    IdentityRow, TransversalCheck,
};
pub use jet::{moser_normal_form, normal_form_defect, JetMap, MoserNormalForm, NormalFormDefect, PlanarJet};
pub use poly::Poly2;
