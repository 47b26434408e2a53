//! Numerical toolkit for the symmetrized bidisc Γ = π(𝔻̄²), π(z₁, z₂) =
//! (z₁ + z₂, z₁z₂), at matrix scale.

pub mod bipoly;
pub mod certificate;
pub mod decomp;
pub mod dilation;
pub mod error;
pub mod geometry;
pub mod json;
pub mod linalg;
pub mod opcore;
pub mod poly1;
pub mod random;
pub mod subspace;

pub use bipoly::{BiPoly, PencilOrder, PolyTag, PolyVerdict, SamplerConfig};
pub use certificate::{Certificate, Verdict};
pub use decomp::{DecompositionPart, DecompositionResult};
pub use dilation::{ToeplitzModel, TruncatedDilation};
pub use error::{Error, Result};
pub use geometry::{Point2, PointClass, PointTag};
pub use linalg::CMatrix;
pub use opcore::{CommutingPair, PairRole};
pub use subspace::SubspaceBasis;
