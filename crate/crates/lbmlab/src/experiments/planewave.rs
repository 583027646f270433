//! Shear plane-wave advection: simulate a transverse-velocity wave advected
//! by a mean flow parallel to its wavevector, track the phase of its Fourier
//! amplitude, and compare the measured phase velocity to the eigenvalue of
//! the scheme's own evolution matrix at the same wavevector.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::ExperimentError;
use crate::dispersion::{mode_eigenvalue_at, Background, ModeKind};
use crate::kernel::{ConservedFields, LatticeState};
use crate::model::Model;

#[derive(Debug, Clone)]
pub struct PlaneWaveResult {
    /// Integer wavevector (multiples of 2 pi / N).
    pub nk: [i32; 2],
    pub k_magnitude: f64,
    /// Measured phase velocity over k.V (the "relative advection").
    pub measured_ratio: f64,
    /// Same ratio from the dispersion eigenvalue at this exact k.
    pub theory_ratio: f64,
    /// Measured attenuation per step over the predicted one.
    pub attenuation_ratio: f64,
    pub steps: u64,
    /// Largest secondary Fourier peak relative to the primary.
    pub contamination: f64,
}

/// Simulate the advection of a transverse shear wave with V parallel to k.
///
/// The wave is initialized at amplitude `eps` on a domain of `n` x `n` nodes
/// with wavevector 2 pi (nk_x, nk_y)/n, run until its phase advances by at
/// least 2 pi, and read back through the complex Fourier amplitude of the
/// transverse momentum.
pub fn plane_wave_relative_advection(
    model: &Model,
    v_magnitude: f64,
    nk: [i32; 2],
    n: usize,
    eps: f64,
) -> Result<PlaneWaveResult, ExperimentError> {
    if model.name.is_advection_diffusion() {
        return Err(ExperimentError::WrongModelKind("athermal fluid"));
    }
    if nk == [0, 0] || v_magnitude < 0.0 {
        return Err(ExperimentError::BadConfig("need a nonzero wavevector and V >= 0".into()));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let kvec = [two_pi * nk[0] as f64 / n as f64, two_pi * nk[1] as f64 / n as f64];
    let k = (kvec[0] * kvec[0] + kvec[1] * kvec[1]).sqrt();
    let khat = [kvec[0] / k, kvec[1] / k];
    let perp = [-khat[1], khat[0]];
    let vel = [v_magnitude * khat[0], v_magnitude * khat[1]];

    let rho = vec![1.0; n * n];
    let mut momentum = vec![[0.0; 2]; n * n];
    for y in 0..n {
        for x in 0..n {
            let phase = kvec[0] * x as f64 + kvec[1] * y as f64;
            let a = eps * phase.cos();
            momentum[x + n * y] = [vel[0] + a * perp[0], vel[1] + a * perp[1]];
        }
    }
    let fields = ConservedFields { rho, momentum: Some(momentum) };
    let mut state = LatticeState::equilibrium_init(Arc::new(model.clone()), [n, n, 1], &fields)?;

    let transverse = |state: &LatticeState| -> Vec<f64> {
        let fields = state.conserved_fields();
        let j = fields.momentum.expect("fluid scheme");
        j.iter().map(|ji| ji[0] * perp[0] + ji[1] * perp[1]).collect()
    };
    let amplitude = |field: &[f64]| -> Complex64 {
        let (re, im) =
            LatticeState::fourier_amplitude(field, [n, n, 1], [nk[0], nk[1], 0]);
        Complex64::new(re, im)
    };

    // Run until the phase advances 2 pi (or a fixed horizon at V = 0),
    // recording the amplitude each step after a short kinetic transient.
    let burn_in = 32u64;
    let phase_rate = (v_magnitude * k).abs();
    let steps = if phase_rate > 0.0 {
        ((two_pi / phase_rate).ceil() as u64).clamp(64, 200_000)
    } else {
        // No advection: keep the horizon short so the wave has not decayed
        // into the roundoff floor by the time the phase is read.
        128
    };
    state.run(burn_in)?;
    let mut amps = Vec::with_capacity(steps as usize + 1);
    amps.push(amplitude(&transverse(&state)));
    for _ in 0..steps {
        state.step()?;
        amps.push(amplitude(&transverse(&state)));
    }
    let a_begin = amps[0].norm();
    let a_end = amps.last().unwrap().norm();
    if !a_end.is_finite() || a_end > 1e3 * a_begin {
        return Err(ExperimentError::Instability { step: state.time, norm: a_end });
    }

    // Unwrapped phase, least-squares slope.
    let mut phases = Vec::with_capacity(amps.len());
    let mut prev = amps[0].arg();
    let mut acc = prev;
    phases.push(acc);
    for a in &amps[1..] {
        let raw = a.arg();
        let mut d = raw - prev;
        while d > std::f64::consts::PI {
            d -= two_pi;
        }
        while d < -std::f64::consts::PI {
            d += two_pi;
        }
        acc += d;
        prev = raw;
        phases.push(acc);
    }
    let m = phases.len() as f64;
    let sx = (m - 1.0) * m / 2.0;
    let sxx = (m - 1.0) * m * (2.0 * m - 1.0) / 6.0;
    let sy: f64 = phases.iter().sum();
    let sxy: f64 = phases.iter().enumerate().map(|(i, p)| i as f64 * p).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let omega_measured = -slope;

    // Attenuation from the endpoint amplitudes.
    let decay_measured = (a_end / a_begin).ln() / steps as f64;

    // The scheme's own prediction at this exact wavevector.
    let bg = Background::with_velocity([vel[0], vel[1], 0.0]);
    let z = mode_eigenvalue_at(model, &bg, [khat[0], khat[1], 0.0], k, ModeKind::Shear)?;
    let omega_theory = -z.arg();
    let decay_theory = z.norm().ln();

    let (measured_ratio, theory_ratio) = if phase_rate > 0.0 {
        (omega_measured / (k * v_magnitude), omega_theory / (k * v_magnitude))
    } else {
        (omega_measured, omega_theory)
    };

    // Spectral cleanliness: any secondary peak of the transverse field above
    // 1% of the primary is a contaminated measurement.
    let contamination = {
        let field = transverse(&state);
        let spec = fft2d(&field, n);
        let idx = |kx: i32, ky: i32| -> usize {
            let x = kx.rem_euclid(n as i32) as usize;
            let y = ky.rem_euclid(n as i32) as usize;
            x + n * y
        };
        let primary = spec[idx(nk[0], nk[1])].norm().max(spec[idx(-nk[0], -nk[1])].norm());
        let mut worst: f64 = 0.0;
        for (i, v) in spec.iter().enumerate() {
            if i == idx(nk[0], nk[1]) || i == idx(-nk[0], -nk[1]) || i == 0 {
                continue;
            }
            worst = worst.max(v.norm());
        }
        worst / primary.max(f64::MIN_POSITIVE)
    };
    if contamination > 0.01 {
        return Err(ExperimentError::Contaminated { peak: contamination });
    }

    Ok(PlaneWaveResult {
        nk,
        k_magnitude: k,
        measured_ratio,
        theory_ratio,
        attenuation_ratio: decay_measured / decay_theory,
        steps,
        contamination,
    })
}

/// Forward 2D FFT of a real field on an n x n grid.
pub(crate) fn fft2d(field: &[f64], n: usize) -> Vec<Complex64> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut data: Vec<Complex64> =
        field.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    // Rows.
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
    // Columns (transpose, transform, transpose back).
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for x in 0..n {
        for y in 0..n {
            col[y] = data[x + n * y];
        }
        fft.process(&mut col);
        for y in 0..n {
            data[x + n * y] = col[y];
        }
    }
    data
}
