//! Matrix-level operator theory: numerical and spectral radii, defect
//! operators, the fundamental operator and Γ-class certificates.

mod certify;
mod defect;
mod pair;
mod radius;

pub use certify::{
    certify_gamma_contraction, certify_gamma_unitary, is_pure, joint_eigen, split_pure_unitary,
    unitary_conjugate, CertifyConfig, JointSpectrum, PureUnitarySplit,
};
pub use defect::{defect, fundamental_operator, fundamental_operator_adjoint, DefectData, FundamentalSolve};
pub use pair::{CommutingPair, PairRole, DEFAULT_CTOL};
pub use radius::{numerical_radius, numerical_radius_default, spectral_radius, DEFAULT_GRID, DEFAULT_REFINE};
