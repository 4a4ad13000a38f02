use crate::{Error, Result, Scalar};

use super::mesh::{Mesh1D, NodalVector};
use super::piecewise::PiecewiseFn;
use super::tridiag::{assemble_mass, assemble_stiffness};

/// L² projection `P_h g`: solves `M c = (∫ g φ_j)_j`.
pub fn l2_project<T: Scalar>(g: &PiecewiseFn<T>, mesh: &Mesh1D<T>) -> Result<NodalVector<T>> {
    let b = g.integrate_against_hats(mesh);
    let c = assemble_mass(mesh)
        .solve(&b)
        .map_err(|e| Error::Internal(format!("mass matrix solve failed: {e}")))?;
    NodalVector::from_values(mesh, c)
}

/// Ritz projection `R_h g`: solves `S c = (∫ g′ φ_j′)_j`.
///
/// In one dimension with P1 elements this coincides with nodal interpolation.
pub fn ritz_project<T: Scalar>(g: &PiecewiseFn<T>, mesh: &Mesh1D<T>) -> Result<NodalVector<T>> {
    let b = g.integrate_derivative_against_hats(mesh)?;
    let c = assemble_stiffness(mesh)
        .solve(&b)
        .map_err(|e| Error::Internal(format!("stiffness matrix solve failed: {e}")))?;
    NodalVector::from_values(mesh, c)
}

/// Nodal interpolant at the interior nodes.
pub fn interpolate<T: Scalar>(g: &PiecewiseFn<T>, mesh: &Mesh1D<T>) -> NodalVector<T> {
    NodalVector::from_fn(mesh, |x| g.eval(x))
}

#[cfg(test)]
mod tests {
    use super::super::mesh::{build_mesh, l2_norm};
    use super::*;

    #[test]
    fn zero_data_projects_to_zero() {
        let mesh = build_mesh::<f64>(16).unwrap();
        let z = PiecewiseFn::zero();
        assert_eq!(l2_project(&z, &mesh).unwrap().max_abs(), 0.0);
        assert_eq!(ritz_project(&z, &mesh).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn right_half_indicator_two_cells() {
        let mesh = build_mesh::<f64>(2).unwrap();
        let chi = PiecewiseFn::characteristic(0.5, 1.0).unwrap();
        let c = l2_project(&chi, &mesh).unwrap();
        assert!((c[0] - 0.75).abs() < 1e-15);
    }

    /// With zero boundary values the projection of 1 is not exactly 1: the
    /// Dirichlet rows perturb it by `B·(r^j + r^{N−j})`, `r = √3 − 2`, the
    /// decaying root of `r² + 4r + 1 = 0`. `B` follows from the first row
    /// `4c₁ + c₂ = 6`.
    #[test]
    fn constant_projection_matches_closed_form() {
        let n = 128usize;
        let mesh = build_mesh::<f64>(n).unwrap();
        let c = l2_project(&PiecewiseFn::constant(1.0), &mesh).unwrap();
        let r = 3.0f64.sqrt() - 2.0;
        let pow = |k: usize| r.powi(k as i32);
        let b = 1.0 / (4.0 * (pow(1) + pow(n - 1)) + pow(2) + pow(n - 2));
        for j in 1..n {
            let exact = 1.0 + b * (pow(j) + pow(n - j));
            assert!((c[j - 1] - exact).abs() < 1e-12, "node {j}");
        }
        // Far from the boundary the nodal values are 1.
        for j in 22..n - 21 {
            assert!((c[j - 1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ritz_of_sine_is_interpolation() {
        for n in [2usize, 5, 16, 100] {
            let mesh = build_mesh::<f64>(n).unwrap();
            let g = PiecewiseFn::sine(1);
            let c = ritz_project(&g, &mesh).unwrap();
            let i = interpolate(&g, &mesh);
            assert!(
                c.sub(&i).max_abs() < 1e-10,
                "n = {n}: {:e}",
                c.sub(&i).max_abs()
            );
        }
    }

    #[test]
    fn ritz_of_parabola_four_cells() {
        let mesh = build_mesh::<f64>(4).unwrap();
        let c = ritz_project(&PiecewiseFn::polynomial([0.0, 1.0, -1.0, 0.0]), &mesh).unwrap();
        for (got, want) in c.values().iter().zip([0.1875, 0.25, 0.1875]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn ritz_rejects_rough_data() {
        let mesh = build_mesh::<f64>(4).unwrap();
        let chi = PiecewiseFn::characteristic(0.25, 0.5).unwrap();
        assert!(matches!(
            ritz_project(&chi, &mesh),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn l2_projection_is_idempotent() {
        let mesh = build_mesh::<f64>(33).unwrap();
        for g in [
            PiecewiseFn::characteristic(0.1, 0.77).unwrap(),
            PiecewiseFn::sine(3),
            PiecewiseFn::polynomial([1.0, -2.0, 0.5, 3.0]),
        ] {
            let once = l2_project(&g, &mesh).unwrap();
            let as_fn = PiecewiseFn::from_nodal(&mesh, &once).unwrap();
            let twice = l2_project(&as_fn, &mesh).unwrap();
            assert!(once.sub(&twice).max_abs() < 1e-12);
        }
    }

    #[test]
    fn projection_error_shrinks_quadratically_for_smooth_data() {
        let err = |n: usize| {
            let mesh = build_mesh::<f64>(n).unwrap();
            let c = l2_project(&PiecewiseFn::sine(1), &mesh).unwrap();
            let i = interpolate(&PiecewiseFn::sine(1), &mesh);
            l2_norm(&mesh, &c.sub(&i))
        };
        let rate = (err(32) / err(64)).log2();
        assert!(rate > 1.9, "rate {rate}");
    }
}
