//! Direct-quadrature evaluation of the normalized Riesz potential
//!
//! ```text
//! (I_α f)(x) = c(n,α) ∫ f(y) |y - x|^{-(n-α)} dy,
//! c(n,α) = Γ((n-α)/2) / (π^{n/2} 2^α Γ(α/2))
//! ```
//!
//! summed over the box without periodic images. Independent of the FFT path,
//! it serves as the reference for [`crate::symbol::riesz_potential`].

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{check_param, Error, Result};
use crate::field::RealField;
use crate::quadrature::gauss_legendre;

/// Largest grid the O(N^{2n}) sum accepts.
pub const ORACLE_POINT_LIMIT: usize = 1 << 16;

/// Normalization constant `c(n, α)` of the Riesz potential.
pub fn riesz_constant(dim: usize, alpha: f64) -> f64 {
    let n = dim as f64;
    libm::tgamma(0.5 * (n - alpha))
        / (libm::pow(PI, 0.5 * n) * libm::pow(2.0, alpha) * libm::tgamma(0.5 * alpha))
}

/// `∫_{[-h/2,h/2]^n} |z|^{-(n-α)} dz`.
///
/// The cube splits into `2n` pyramids with apex at the origin; integrating the
/// radial variable in closed form leaves a smooth integral over one face.
pub fn self_cell_integral(dim: usize, alpha: f64, h: f64) -> f64 {
    let a = 0.5 * h;
    let n = dim as f64;
    match dim {
        1 => 2.0 * libm::pow(a, alpha) / alpha,
        _ => {
            let (x, w) = gauss_legendre(24);
            let face = |y: f64, z: f64| {
                let r2 = a * a + y * y + z * z;
                (a / alpha) * libm::pow(r2, 0.5 * (alpha - n))
            };
            let mut sum = 0.0;
            if dim == 2 {
                for (xi, wi) in x.iter().zip(&w) {
                    sum += wi * a * face(a * xi, 0.0);
                }
            } else {
                for (xi, wi) in x.iter().zip(&w) {
                    for (xj, wj) in x.iter().zip(&w) {
                        sum += wi * wj * a * a * face(a * xi, a * xj);
                    }
                }
            }
            2.0 * n * sum
        }
    }
}

pub fn riesz_oracle(f: &RealField, alpha: f64) -> Result<RealField> {
    let grid = f.grid;
    let dim = grid.dim;
    check_param("alpha", alpha, alpha > 0.0 && alpha < dim as f64, "(0, n)")?;
    let points = grid.len();
    if points > ORACLE_POINT_LIMIT {
        return Err(Error::GridTooLarge {
            points,
            limit: ORACLE_POINT_LIMIT,
        });
    }
    let c = riesz_constant(dim, alpha);
    let h = grid.spacing();
    let w = grid.cell_volume();
    let exponent = -0.5 * (dim as f64 - alpha);
    let local = self_cell_integral(dim, alpha, h);
    let positions: Vec<[f64; 3]> = (0..points).map(|i| grid.point(i)).collect();

    let values = (0..points)
        .map(|i| {
            let xi = positions[i];
            let mut acc = 0.0;
            for (j, yj) in positions.iter().enumerate() {
                if j == i || f.values[j] == 0.0 {
                    continue;
                }
                let mut r2 = 0.0;
                for axis in 0..dim {
                    let d = yj[axis] - xi[axis];
                    r2 += d * d;
                }
                acc += f.values[j] * libm::pow(r2, exponent);
            }
            c * (acc * w + f.values[i] * local)
        })
        .collect();
    RealField::new(grid, values)
}
