use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;
use crate::linalg::{commutator_norm, op_norm, CMatrix};

/// Default commutator tolerance, relative to 1 + ‖S‖‖P‖.
pub const DEFAULT_CTOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairRole {
    #[default]
    Generic,
    GammaContraction,
    GammaUnitary,
    PureGammaIsometryModel,
}

/// Square matrices (S, P) of equal size with ‖SP − PS‖ ≤ ctol·(1 + ‖S‖‖P‖).
///
/// JSON: `{"S": matrix, "P": matrix}`; `role` and `commutator_norm` are
/// written on output and optional on input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairWire")]
pub struct CommutingPair {
    #[serde(rename = "S", with = "json::matrix")]
    s: CMatrix,
    #[serde(rename = "P", with = "json::matrix")]
    p: CMatrix,
    commutator_norm: f64,
    role: PairRole,
}

#[derive(Deserialize)]
struct PairWire {
    #[serde(rename = "S", with = "json::matrix")]
    s: CMatrix,
    #[serde(rename = "P", with = "json::matrix")]
    p: CMatrix,
    #[serde(default)]
    role: PairRole,
}

impl TryFrom<PairWire> for CommutingPair {
    type Error = Error;

    fn try_from(w: PairWire) -> Result<Self> {
        Ok(CommutingPair::new(w.s, w.p)?.with_role(w.role))
    }
}

impl CommutingPair {
    pub fn new(s: CMatrix, p: CMatrix) -> Result<Self> {
        Self::with_tolerance(s, p, DEFAULT_CTOL)
    }

    pub fn with_tolerance(s: CMatrix, p: CMatrix, ctol: f64) -> Result<Self> {
        for m in [&s, &p] {
            if !m.is_square() {
                return Err(Error::NotSquare {
                    rows: m.nrows(),
                    cols: m.ncols(),
                });
            }
        }
        if s.nrows() != p.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "S is {0}x{0}, P is {1}x{1}",
                s.nrows(),
                p.nrows()
            )));
        }
        if s.iter().chain(p.iter()).any(|z| !z.is_finite()) {
            return Err(Error::InvalidInput("pair entries must be finite".into()));
        }
        let norm = commutator_norm(&s, &p);
        let bound = ctol * (1.0 + op_norm(&s) * op_norm(&p));
        if norm > bound {
            return Err(Error::CommutatorTooLarge { norm, bound });
        }
        Ok(CommutingPair {
            s,
            p,
            commutator_norm: norm,
            role: PairRole::Generic,
        })
    }

    pub fn with_role(mut self, role: PairRole) -> Self {
        self.role = role;
        self
    }

    pub fn s(&self) -> &CMatrix {
        &self.s
    }

    pub fn p(&self) -> &CMatrix {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    pub fn commutator_norm(&self) -> f64 {
        self.commutator_norm
    }

    pub fn role(&self) -> PairRole {
        self.role
    }

    /// max(1, ‖S‖, ‖P‖), the reference size for relative residuals.
    pub fn scale(&self) -> f64 {
        op_norm(&self.s).max(op_norm(&self.p)).max(1.0)
    }

    pub fn into_parts(self) -> (CMatrix, CMatrix) {
        (self.s, self.p)
    }
}
