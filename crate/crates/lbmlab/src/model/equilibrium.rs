//! Equilibrium moment tables and their derivatives with respect to the
//! conserved quantities.
//!
//! AD schemes conserve only rho; every equilibrium row is rho times a fixed
//! coefficient built from the advective velocity parameters. The athermal
//! fluids conserve (rho, jx, jy) and use the quadratic/cubic table rows.

use super::{Model, ModelError, ModelName};
use crate::linalg::Mat;

/// Coefficient vector g with m_eq = rho * g for the AD schemes.
fn ad_coefficients(model: &Model) -> Vec<f64> {
    let [vx, vy, vz] = model.velocity_param();
    let v2 = vx * vx + vy * vy + vz * vz;
    let p = |k: &str| model.param(k);
    match model.name {
        ModelName::D2Q5 => {
            // No table in the source for D2Q5; structure mirrors D2Q9-AD with
            // the energy-row V^2 coefficient equal to the polynomial's r^2
            // coefficient.
            vec![1.0, vx, vy, p("alpha") + 5.0 * v2, vx * vx - vy * vy]
        }
        ModelName::D2Q9Ad => {
            let (alpha, beta, d1, a) = (p("alpha"), p("beta"), p("d1"), p("a"));
            vec![
                1.0,
                vx,
                vy,
                alpha + 3.0 * v2,
                vx * vx - vy * vy,
                vx * vy,
                d1 * vx,
                d1 * vy,
                beta + a * v2,
            ]
        }
        ModelName::D3Q15Ad => {
            let (alpha, beta, d1) = (p("alpha"), p("beta"), p("d1"));
            vec![
                1.0,
                vx,
                vy,
                vz,
                alpha + v2,
                2.0 * vx * vx - vy * vy - vz * vz,
                vy * vy - vz * vz,
                vx * vy,
                vy * vz,
                vz * vx,
                d1 * vx,
                d1 * vy,
                d1 * vz,
                beta,
                0.0,
            ]
        }
        ModelName::D3Q19Ad => {
            let (alpha, beta, d1, d2) = (p("alpha"), p("beta"), p("d1"), p("d2"));
            vec![
                1.0,
                vx,
                vy,
                vz,
                alpha + 19.0 * v2,
                2.0 * vx * vx - vy * vy - vz * vz,
                vy * vy - vz * vz,
                vx * vy,
                vy * vz,
                vz * vx,
                d1 * vx,
                d1 * vy,
                d1 * vz,
                0.0,
                0.0,
                beta,
                d2 * vx,
                d2 * vy,
                d2 * vz,
            ]
        }
        _ => unreachable!("not an AD scheme"),
    }
}

pub fn equilibrium_moments(model: &Model, conserved: &[f64]) -> Result<Vec<f64>, ModelError> {
    assert_eq!(conserved.len(), model.n_conserved(), "conserved subvector length");
    if conserved.iter().any(|x| !x.is_finite()) {
        return Err(ModelError::NonFinite("equilibrium_moments"));
    }
    match model.name {
        ModelName::D2Q5 | ModelName::D2Q9Ad | ModelName::D3Q15Ad | ModelName::D3Q19Ad => {
            let rho = conserved[0];
            Ok(ad_coefficients(model).into_iter().map(|g| rho * g).collect())
        }
        ModelName::D2Q9Ns => {
            let (rho, jx, jy) = (conserved[0], conserved[1], conserved[2]);
            if rho <= 0.0 {
                return Err(ModelError::NonPositiveDensity(rho));
            }
            let (alpha, beta) = (model.param("alpha"), model.param("beta"));
            let j2 = jx * jx + jy * jy;
            Ok(vec![
                rho,
                jx,
                jy,
                alpha * rho + 3.0 * j2 / rho,
                (jx * jx - jy * jy) / rho,
                jx * jy / rho,
                -jx,
                -jy,
                beta * rho - 3.0 * j2 / rho,
            ])
        }
        ModelName::D2Q13Ns => {
            let (rho, jx, jy) = (conserved[0], conserved[1], conserved[2]);
            if rho <= 0.0 {
                return Err(ModelError::NonPositiveDensity(rho));
            }
            let p = |k: &str| model.param(k);
            let (alpha, beta, gamma, c1, qp) = (p("alpha"), p("beta"), p("gamma"), p("c1"), p("q"));
            let j2 = jx * jx + jy * jy;
            // Cubic heat-flux rows, written in the momenta themselves.
            let kq = (36.0 * qp - 35.0) / 77.0;
            let cr = -(63.0 * c1 + 65.0) / 24.0;
            let kr = (42.0 * qp - 105.0) / 22.0;
            Ok(vec![
                rho,
                jx,
                jy,
                alpha * rho + 13.0 * j2 / rho,
                (jx * jx - jy * jy) / rho,
                jx * jy / rho,
                jx * (c1 - kq * j2),
                jy * (c1 - kq * j2),
                jx * (cr + qp * jx * jx + kr * jy * jy),
                jy * (cr + kr * jx * jx + qp * jy * jy),
                beta * rho,
                0.0,
                gamma * rho,
            ])
        }
    }
}

pub fn equilibrium_jacobian(model: &Model, conserved: &[f64]) -> Result<Mat, ModelError> {
    assert_eq!(conserved.len(), model.n_conserved(), "conserved subvector length");
    let q = model.q();
    match model.name {
        ModelName::D2Q5 | ModelName::D2Q9Ad | ModelName::D3Q15Ad | ModelName::D3Q19Ad => {
            let g = ad_coefficients(model);
            let mut j = Mat::zeros(q, 1);
            for (row, gi) in g.iter().enumerate() {
                j[(row, 0)] = *gi;
            }
            Ok(j)
        }
        ModelName::D2Q9Ns => {
            let (rho, jx, jy) = (conserved[0], conserved[1], conserved[2]);
            if rho <= 0.0 {
                return Err(ModelError::NonPositiveDensity(rho));
            }
            let (alpha, beta) = (model.param("alpha"), model.param("beta"));
            let (ux, uy) = (jx / rho, jy / rho);
            let u2 = ux * ux + uy * uy;
            let mut m = Mat::zeros(q, 3);
            let rows: [[f64; 3]; 9] = [
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [alpha - 3.0 * u2, 6.0 * ux, 6.0 * uy],
                [-(ux * ux - uy * uy), 2.0 * ux, -2.0 * uy],
                [-ux * uy, uy, ux],
                [0.0, -1.0, 0.0],
                [0.0, 0.0, -1.0],
                [beta + 3.0 * u2, -6.0 * ux, -6.0 * uy],
            ];
            for (r, row) in rows.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    m[(r, c)] = *v;
                }
            }
            Ok(m)
        }
        ModelName::D2Q13Ns => {
            let (rho, jx, jy) = (conserved[0], conserved[1], conserved[2]);
            if rho <= 0.0 {
                return Err(ModelError::NonPositiveDensity(rho));
            }
            let p = |k: &str| model.param(k);
            let (alpha, beta, gamma, c1, qp) = (p("alpha"), p("beta"), p("gamma"), p("c1"), p("q"));
            let (ux, uy) = (jx / rho, jy / rho);
            let u2 = ux * ux + uy * uy;
            let kq = (36.0 * qp - 35.0) / 77.0;
            let cr = -(63.0 * c1 + 65.0) / 24.0;
            let kr = (42.0 * qp - 105.0) / 22.0;
            let mut m = Mat::zeros(q, 3);
            let rows: [[f64; 3]; 13] = [
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [alpha - 13.0 * u2, 26.0 * ux, 26.0 * uy],
                [-(ux * ux - uy * uy), 2.0 * ux, -2.0 * uy],
                [-ux * uy, uy, ux],
                [0.0, c1 - kq * (3.0 * jx * jx + jy * jy), -2.0 * kq * jx * jy],
                [0.0, -2.0 * kq * jx * jy, c1 - kq * (jx * jx + 3.0 * jy * jy)],
                [0.0, cr + 3.0 * qp * jx * jx + kr * jy * jy, 2.0 * kr * jx * jy],
                [0.0, 2.0 * kr * jx * jy, cr + kr * jx * jx + 3.0 * qp * jy * jy],
                [beta, 0.0, 0.0],
                [0.0, 0.0, 0.0],
                [gamma, 0.0, 0.0],
            ];
            for (r, row) in rows.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    m[(r, c)] = *v;
                }
            }
            Ok(m)
        }
    }
}
