use num_complex::Complex64;

use crate::linalg::{self, lambda_max, CMatrix};

pub const DEFAULT_GRID: usize = 256;
pub const DEFAULT_REFINE: usize = 40;

/// λ_max of Re(e^{iθ}T).
fn support(t: &CMatrix, theta: f64) -> f64 {
    lambda_max(&(t * Complex64::from_polar(1.0, theta)))
}

/// ω(T) = max_θ λ_max(Re(e^{iθ}T)): uniform θ-grid, then golden-section
/// search on the two cells around the best node. The result never drops
/// below the grid maximum.
pub fn numerical_radius(t: &CMatrix, grid: usize, refine_iters: usize) -> f64 {
    assert!(t.is_square(), "numerical radius needs a square matrix");
    if t.nrows() == 0 {
        return 0.0;
    }
    let grid = grid.max(4);
    let h = 2.0 * std::f64::consts::PI / grid as f64;
    let (best_k, best) = (0..grid)
        .map(|k| (k, support(t, k as f64 * h)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((best_k as f64 - 1.0) * h, (best_k as f64 + 1.0) * h);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (support(t, x1), support(t, x2));
    let mut top = best.max(f1).max(f2);
    for _ in 0..refine_iters {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = support(t, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = support(t, x2);
        }
        top = top.max(f1).max(f2);
    }
    top.max(0.0)
}

pub fn numerical_radius_default(t: &CMatrix) -> f64 {
    numerical_radius(t, DEFAULT_GRID, DEFAULT_REFINE)
}

pub fn spectral_radius(t: &CMatrix) -> f64 {
    linalg::spectral_radius(t)
}
