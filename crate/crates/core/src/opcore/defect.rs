use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;
use crate::linalg::{hermitian_eigen, identity, op_norm, zeros, CMatrix};
use crate::opcore::pair::CommutingPair;
use crate::opcore::radius::numerical_radius_default;
use crate::subspace::SubspaceBasis;

/// Eigenvalues of I − P*P below −NEGATIVE_LIMIT reject P.
const NEGATIVE_LIMIT: f64 = 1e-8;
/// Eigenvalues of I − P*P at or below this are rounding noise.
const EIGEN_FLOOR: f64 = 1e-12;

/// D_P = (I − P*P)^{1/2} with an orthonormal frame of its range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectData {
    #[serde(with = "json::matrix")]
    pub d: CMatrix,
    /// Columns of the eigenbasis with singular value above the rank tolerance,
    /// ordered by decreasing value.
    pub frame: SubspaceBasis,
    /// Eigenvalues of D_P, ascending.
    pub eigs: Vec<f64>,
    /// Eigenvalues of D_P attached to the frame columns.
    pub frame_values: Vec<f64>,
    #[serde(skip)]
    basis: CMatrix,
    #[serde(skip)]
    kept: Vec<usize>,
}

impl DefectData {
    pub fn rank(&self) -> usize {
        self.frame.dim()
    }
}

/// Hermitian square root of I − P*P by eigendecomposition. Directions with
/// D-eigenvalue ≤ rank_tol·max are left out of the frame and of D.
pub fn defect(p: &CMatrix, rank_tol: f64) -> Result<DefectData> {
    if !p.is_square() {
        return Err(Error::NotSquare {
            rows: p.nrows(),
            cols: p.ncols(),
        });
    }
    let d = p.nrows();
    let m = identity(d) - p.adjoint() * p;
    let (vals, vecs) = hermitian_eigen(&m);
    if let Some(&low) = vals.first() {
        if low < -NEGATIVE_LIMIT {
            return Err(Error::NotAContraction { min_eigenvalue: low });
        }
    }
    let eigs: Vec<f64> = vals
        .iter()
        .map(|&v| if v <= EIGEN_FLOOR { 0.0 } else { v.sqrt() })
        .collect();
    let top = eigs.iter().copied().fold(0.0, f64::max);
    let mut kept: Vec<usize> = (0..d).filter(|&i| eigs[i] > rank_tol * top && eigs[i] > 0.0).collect();
    kept.sort_by(|&a, &b| eigs[b].total_cmp(&eigs[a]).then(a.cmp(&b)));
    let mut frame = zeros(d, kept.len());
    let mut dm = zeros(d, d);
    for (col, &i) in kept.iter().enumerate() {
        let v = vecs.column(i);
        frame.set_column(col, &v);
        dm += (&v * v.adjoint()).scale(eigs[i]);
    }
    Ok(DefectData {
        d: dm,
        frame: SubspaceBasis::trusted(frame, "defect space"),
        frame_values: kept.iter().map(|&i| eigs[i]).collect(),
        eigs,
        basis: vecs,
        kept,
    })
}

/// Solution A of S − S*P = D_P A D_P on the defect space, in frame
/// coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalSolve {
    #[serde(rename = "A", with = "json::matrix")]
    pub a: CMatrix,
    pub frame: SubspaceBasis,
    /// ‖D_P Ã D_P − (S − S*P)‖ with Ã = F A F*.
    pub residual: f64,
    /// ω(A).
    pub omega: f64,
    /// Largest entry of U*(S − S*P)U outside the defect block.
    pub outside_block: f64,
}

impl FundamentalSolve {
    /// A lifted to the ambient space, F A F*.
    pub fn lifted(&self) -> CMatrix {
        &self.frame.frame * &self.a * self.frame.frame.adjoint()
    }
}

/// Entrywise solve in the defect eigenframe: with D_P = U diag(dᵢ) U* and
/// R = U*(S − S*P)U, A_ij = R_ij / (dᵢ dⱼ) on defect indices. Entries of R
/// outside the defect block must vanish.
pub fn fundamental_operator(pair: &CommutingPair, rank_tol: f64) -> Result<FundamentalSolve> {
    let (s, p) = (pair.s(), pair.p());
    let dd = defect(p, rank_tol)?;
    let rhs = s - s.adjoint() * p;
    let r = dd.basis.adjoint() * &rhs * &dd.basis;
    let n = s.nrows();
    let mut in_block = vec![false; n];
    for &i in &dd.kept {
        in_block[i] = true;
    }
    let mut outside: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if !(in_block[i] && in_block[j]) {
                outside = outside.max(r[(i, j)].norm());
            }
        }
    }
    let limit = 1e-8 * (1.0 + op_norm(s));
    if outside > limit {
        return Err(Error::RankDeficientInconsistent {
            entry: outside,
            tol: limit,
        });
    }
    let k = dd.kept.len();
    let mut a = zeros(k, k);
    for (ci, &i) in dd.kept.iter().enumerate() {
        for (cj, &j) in dd.kept.iter().enumerate() {
            a[(ci, cj)] = r[(i, j)] / (dd.eigs[i] * dd.eigs[j]);
        }
    }
    let omega = numerical_radius_default(&a);
    let frame = dd.frame.clone();
    let lifted = &frame.frame * &a * frame.frame.adjoint();
    let residual = op_norm(&(&dd.d * lifted * &dd.d - rhs));
    Ok(FundamentalSolve {
        a,
        frame,
        residual,
        omega,
        outside_block: outside,
    })
}

/// The fundamental operator F_* of the adjoint pair (S*, P*).
pub fn fundamental_operator_adjoint(pair: &CommutingPair, rank_tol: f64) -> Result<FundamentalSolve> {
    let adj = CommutingPair::with_tolerance(pair.s().adjoint(), pair.p().adjoint(), f64::INFINITY)?;
    fundamental_operator(&adj, rank_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cr, from_real_rows, unitarity_defect};

    fn scalar_family(d: usize, r: f64) -> CommutingPair {
        CommutingPair::new(identity(d).scale(2.0 * r), identity(d).scale(r * r)).unwrap()
    }

    #[test]
    fn defect_examples() {
        let r: f64 = 0.5;
        let dd = defect(&identity(3).scale(r * r), 1e-8).unwrap();
        assert!((op_norm(&(dd.d.clone() - identity(3).scale((1.0 - r.powi(4)).sqrt())))) < 1e-14);
        assert_eq!(dd.rank(), 3);

        let u = crate::linalg::diag(&[c(0.0, 1.0), cr(-1.0)]);
        let dd = defect(&u, 1e-8).unwrap();
        assert_eq!(dd.rank(), 0);
        assert!(op_norm(&dd.d) == 0.0);

        let dd = defect(&zeros(2, 2), 1e-8).unwrap();
        assert!(op_norm(&(dd.d - identity(2))) < 1e-15);

        assert!(matches!(
            defect(&identity(2).scale(1.1), 1e-8),
            Err(Error::NotAContraction { .. })
        ));
    }

    #[test]
    fn defect_square_and_frame() {
        let p = from_real_rows(3, 3, &[0.2, 0.5, 0.0, 0.0, 0.3, 0.1, 0.4, 0.0, 0.6]).scale(0.9);
        let dd = defect(&p, 1e-8).unwrap();
        let target = identity(3) - p.adjoint() * &p;
        assert!(op_norm(&(&dd.d * &dd.d - target)) < 1e-10);
        assert!(unitarity_defect(&dd.frame.frame) < 1e-12);
    }

    #[test]
    fn fundamental_examples() {
        let sol = fundamental_operator(&scalar_family(3, 0.5), 1e-8).unwrap();
        assert!(sol.residual <= 1e-12);
        assert!(op_norm(&(sol.a.clone() - identity(3).scale(0.8))) < 1e-10);
        assert!((sol.omega - 0.8).abs() < 1e-10);

        let zero = CommutingPair::new(zeros(2, 2), zeros(2, 2)).unwrap();
        assert_eq!(op_norm(&fundamental_operator(&zero, 1e-8).unwrap().a), 0.0);
    }

    #[test]
    fn inconsistent_outside_defect_block() {
        // P unitary, so the defect space is trivial, while S − S*P = i·I.
        let pair = CommutingPair::new(identity(2) * c(0.0, 0.5), identity(2)).unwrap();
        assert!(matches!(
            fundamental_operator(&pair, 1e-8),
            Err(Error::RankDeficientInconsistent { .. })
        ));
    }
}
