use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;
use crate::linalg::{unitarity_defect, zeros, CMatrix};

/// Orthonormal frame (d × k) describing a subspace of ℂ^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceBasis {
    #[serde(with = "json::matrix")]
    pub frame: CMatrix,
    pub label: String,
}

impl SubspaceBasis {
    /// Accepts frames with ‖F*F − I‖ ≤ 1e−10.
    pub fn new(frame: CMatrix, label: impl Into<String>) -> Result<Self> {
        let defect = unitarity_defect(&frame);
        if defect > 1e-10 {
            return Err(Error::NotUnitary { defect });
        }
        Ok(SubspaceBasis {
            frame,
            label: label.into(),
        })
    }

    pub(crate) fn trusted(frame: CMatrix, label: impl Into<String>) -> Self {
        SubspaceBasis {
            frame,
            label: label.into(),
        }
    }

    pub fn empty(ambient: usize, label: impl Into<String>) -> Self {
        Self::trusted(zeros(ambient, 0), label)
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    /// Orthogonal projection F F*.
    pub fn projector(&self) -> CMatrix {
        &self.frame * self.frame.adjoint()
    }

    /// Compression F* M F of an operator on the ambient space.
    pub fn compress(&self, m: &CMatrix) -> CMatrix {
        self.frame.adjoint() * m * &self.frame
    }
}
