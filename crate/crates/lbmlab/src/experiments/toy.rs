//! Fourier-space toy model: evolve each mode of a Gaussian stream function
//! as exp[(-nu k^2 - i g(k) k.V) t] and look at the resulting vorticity. A
//! fast qualitative oracle for what an anomalous advection factor g does to
//! a vortex.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::anisotropy::{anisotropy_report, AnisotropyReport};
use super::ExperimentError;

#[derive(Debug, Clone)]
pub struct ToyConfig {
    pub g0: f64,
    pub r0: f64,
    pub nu: f64,
    pub velocity: [f64; 2],
    pub dims: [usize; 2],
    pub t: f64,
    /// Anomaly amplitude c in g(k) = 1 + c (cos 4 theta - cos 2 theta) k^2.
    pub anomaly: f64,
}

#[derive(Debug)]
pub struct ToyResult {
    pub psi: Vec<f64>,
    pub vorticity: Vec<f64>,
    pub report: AnisotropyReport,
}

/// Spectral evolution of the Gaussian stream function. The initial spectrum
/// is the continuum transform pi r0^2 exp(-r0^2 k^2 / 4) sampled on the
/// grid's wavevectors; vorticity is computed spectrally as k^2 psi-hat.
pub fn fourier_toy_evolution(config: &ToyConfig) -> Result<ToyResult, ExperimentError> {
    let [nx, ny] = config.dims;
    if nx == 0 || ny == 0 {
        return Err(ExperimentError::BadConfig("empty grid".into()));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut psi_hat = vec![Complex64::new(0.0, 0.0); nx * ny];
    let mut vort_hat = vec![Complex64::new(0.0, 0.0); nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            // Wavevector wrapped to [-pi, pi).
            let mx = if ix <= nx / 2 { ix as f64 } else { ix as f64 - nx as f64 };
            let my = if iy <= ny / 2 { iy as f64 } else { iy as f64 - ny as f64 };
            let kx = two_pi * mx / nx as f64;
            let ky = two_pi * my / ny as f64;
            let k2 = kx * kx + ky * ky;
            let theta = f64::atan2(ky, kx);
            let g = 1.0 + config.anomaly * ((4.0 * theta).cos() - (2.0 * theta).cos()) * k2;
            let kdotv = kx * config.velocity[0] + ky * config.velocity[1];
            let spectrum = config.g0 * std::f64::consts::PI * config.r0 * config.r0
                * (-config.r0 * config.r0 * k2 / 4.0).exp();
            let evolve = Complex64::new(-config.nu * k2 * config.t, -g * kdotv * config.t).exp();
            let v = spectrum * evolve;
            psi_hat[ix + nx * iy] = v;
            vort_hat[ix + nx * iy] = v * k2;
        }
    }
    let psi = inverse_fft2d(&mut psi_hat, [nx, ny]);
    let vorticity = inverse_fft2d(&mut vort_hat, [nx, ny]);
    let width = (config.r0 * config.r0 + 4.0 * config.nu * config.t).sqrt();
    let report = anisotropy_report(&vorticity, config.dims, config.t as u64, 2.7 * width, None);
    Ok(ToyResult { psi, vorticity, report })
}

/// Inverse 2D FFT normalized so that field(r) = (1/N) sum spectrum(k)
/// exp(i k.r): with the continuum spectrum above this recovers the Gaussian.
fn inverse_fft2d(data: &mut [Complex64], dims: [usize; 2]) -> Vec<f64> {
    let [nx, ny] = dims;
    let mut planner = FftPlanner::new();
    let fft_x = planner.plan_fft_inverse(nx);
    let fft_y = planner.plan_fft_inverse(ny);
    for row in data.chunks_mut(nx) {
        fft_x.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); ny];
    for x in 0..nx {
        for y in 0..ny {
            col[y] = data[x + nx * y];
        }
        fft_y.process(&mut col);
        for y in 0..ny {
            data[x + nx * y] = col[y];
        }
    }
    let norm = 1.0 / (nx * ny) as f64;
    data.iter().map(|z| z.re * norm).collect()
}
