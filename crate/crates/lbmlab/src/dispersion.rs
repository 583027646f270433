//! Linear (von Neumann) analysis of the lattice Boltzmann schemes.
//!
//! For a uniform background and a plane-wave perturbation, one time step acts
//! on the q Fourier amplitudes as a dense complex matrix
//! `E(k) = Lambda(k) (I + M^-1 S (J P - I) M)` with `Lambda = diag(exp(-i
//! k.c_p))`, `S` the diagonal of relaxation rates, `J` the equilibrium
//! Jacobian and `P` the projector onto the conserved moments. The module
//! builds that matrix, solves its spectrum, follows the hydrodynamic modes
//! (the eigenvalues connected to 1 as k -> 0) across a set of wavenumbers,
//! and fits the growth exponents gamma = log z as odd/even polynomials in k:
//!
//! gamma(k) ~ -i a1 k - a2 k^2 - i a3 k^3 - a4 k^4 - ...
//!
//! so a1 is the phase velocity along +k, a2 the diffusivity/viscosity, a3 the
//! anomalous-advection correction and a4 the hyper-diffusivity.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{self, lstsq, CMat, LinalgError, Mat, C64};
use crate::model::{Model, ModelError};

#[derive(Debug, Error)]
pub enum DispersionError {
    #[error("background density must be positive, got {0}")]
    BadDensity(f64),
    #[error("background velocity magnitude {0} must be < 1 lattice unit per step")]
    BadVelocity(f64),
    #[error("k samples must be positive, sorted ascending, and <= 0.5 (got {0})")]
    BadSamples(f64),
    #[error("mode tracking failed at k = {k}: {detail}")]
    ModeCollision { k: f64, detail: String },
    #[error(
        "kinetic/hydrodynamic separation violated: min s_p = {min_s} < 10 x max|gamma| = {max_gamma}"
    )]
    SeparationViolated { min_s: f64, max_gamma: f64 },
    #[error("log branch: |arg z| = {0} >= pi/2 at k = {1}; reduce k or the background velocity")]
    BranchCrossing(f64, f64),
    #[error("no advection to normalize by (|a1| = {0} < 1e-12)")]
    NoAdvection(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Uniform background state: density rho0 and mean velocity V.
#[derive(Debug, Clone, Copy)]
pub struct Background {
    pub rho0: f64,
    pub velocity: [f64; 3],
}

impl Background {
    pub fn at_rest() -> Self {
        Background { rho0: 1.0, velocity: [0.0; 3] }
    }

    pub fn with_velocity(v: [f64; 3]) -> Self {
        Background { rho0: 1.0, velocity: v }
    }

    fn validate(&self) -> Result<(), DispersionError> {
        if self.rho0.is_nan() || self.rho0 <= 0.0 {
            return Err(DispersionError::BadDensity(self.rho0));
        }
        let vmag = self.velocity.iter().map(|v| v * v).sum::<f64>().sqrt();
        if vmag >= 1.0 {
            return Err(DispersionError::BadVelocity(vmag));
        }
        Ok(())
    }
}

/// For AD schemes the advective velocity is a model parameter, so the
/// background velocity is written into the model; fluids keep it in the
/// conserved state.
pub fn effective_model(model: &Model, bg: &Background) -> Model {
    if model.name.is_advection_diffusion() {
        model.with_velocity(bg.velocity)
    } else {
        model.clone()
    }
}

fn conserved_state(model: &Model, bg: &Background) -> Vec<f64> {
    if model.name.is_advection_diffusion() {
        vec![bg.rho0]
    } else {
        vec![bg.rho0, bg.rho0 * bg.velocity[0], bg.rho0 * bg.velocity[1]]
    }
}

/// d m_eq / d w at the background, a q x n_c matrix; conserved rows are the
/// identity injection.
pub fn linearize_equilibrium(model: &Model, bg: &Background) -> Result<Mat, DispersionError> {
    bg.validate()?;
    let m = effective_model(model, bg);
    let w = conserved_state(&m, bg);
    Ok(m.equilibrium_jacobian(&w)?)
}

/// The real (k-independent) collision part R = M^-1 (I - S + S J P) M.
fn collision_matrix(model: &Model, bg: &Background) -> Result<Mat, DispersionError> {
    let j = linearize_equilibrium(model, bg)?;
    let q = model.q();
    let conserved = &model.equilibrium.conserved;
    // A = I - S + S J P in moment space.
    let mut a = Mat::zeros(q, q);
    for r in 0..q {
        a[(r, r)] = 1.0 - model.rates.s[r];
        for (ci, &ccol) in conserved.iter().enumerate() {
            a[(r, ccol)] += model.rates.s[r] * j[(r, ci)];
        }
    }
    Ok(model.basis.inverse.mul(&a).mul(&model.basis.matrix))
}

/// One-step evolution matrix for wavevector k (radians per lattice unit).
pub fn evolution_matrix(
    model: &Model,
    bg: &Background,
    k: [f64; 3],
) -> Result<CMat, DispersionError> {
    let r = collision_matrix(model, bg)?;
    Ok(apply_streaming_phases(model, &r, k))
}

/// E = Lambda(k) R with Lambda = diag(exp(-i k.c_p)).
fn apply_streaming_phases(model: &Model, r: &Mat, k: [f64; 3]) -> CMat {
    let q = model.q();
    let mut e = CMat::zeros(q);
    for p in 0..q {
        let c = model.velocity_set.velocities[p];
        let phase = -(k[0] * c[0] as f64 + k[1] * c[1] as f64 + k[2] * c[2] as f64);
        let lam = Complex64::from_polar(1.0, phase);
        for j in 0..q {
            e[(p, j)] = lam * r[(p, j)];
        }
    }
    e
}

/// Eigenvalues of an evolution matrix.
pub fn spectrum(e: &CMat) -> Result<Vec<C64>, DispersionError> {
    Ok(linalg::eigenvalues(e)?)
}

/// Role of a tracked hydrodynamic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    /// The single conserved mode of an advection-diffusion scheme.
    Density,
    /// Transverse momentum mode of a fluid scheme.
    Shear,
    /// Sound mode propagating along +k.
    AcousticPlus,
    /// Sound mode propagating along -k.
    AcousticMinus,
}

impl ModeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModeKind::Density => "density",
            ModeKind::Shear => "shear",
            ModeKind::AcousticPlus => "acoustic+",
            ModeKind::AcousticMinus => "acoustic-",
        }
    }
}

/// Polynomial-fit controls. The reported coefficients stop at k^4 but the
/// fit basis extends further so truncation does not pollute them.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Highest odd power of k fitted to Im(gamma) (>= 3).
    pub odd_max: usize,
    /// Highest even power of k fitted to Re(gamma) (>= 4).
    pub even_max: usize,
    /// Newton cleanup of each eigenpair (keeps the noise floor near machine
    /// epsilon; cheap at these sizes).
    pub refine: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { odd_max: 9, even_max: 10, refine: true }
    }
}

/// Per-mode tracking and fit output.
#[derive(Debug, Clone)]
pub struct TrackedMode {
    pub kind: ModeKind,
    /// Eigenvalue at each retained k sample.
    pub z: Vec<C64>,
    /// Principal log of z.
    pub gamma: Vec<C64>,
    /// Fitted (a1, a2, a3, a4).
    pub a: [f64; 4],
    /// RMS residual of the fit over the retained samples.
    pub residual: f64,
    pub unstable: bool,
}

#[derive(Debug, Clone)]
pub struct DispersionResult {
    pub direction: [f64; 3],
    /// Samples retained by the tracker (degenerate ones may be skipped).
    pub k_samples: Vec<f64>,
    pub modes: Vec<TrackedMode>,
}

impl DispersionResult {
    pub fn mode(&self, kind: ModeKind) -> Option<&TrackedMode> {
        self.modes.iter().find(|m| m.kind == kind)
    }
}

fn normalize(dir: [f64; 3]) -> [f64; 3] {
    let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
    assert!(n > 0.0, "zero direction");
    [dir[0] / n, dir[1] / n, dir[2] / n]
}

/// Uniformly spaced fit samples k_max/n, 2 k_max/n, ..., k_max.
pub fn uniform_samples(k_max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|j| k_max * j as f64 / n as f64).collect()
}

struct SampleEig {
    k: f64,
    z: Vec<C64>,
    vectors: Vec<Vec<C64>>,
}

fn eig_at(
    model: &Model,
    r: &Mat,
    dir: [f64; 3],
    k: f64,
    refine: bool,
) -> Result<SampleEig, DispersionError> {
    let kvec = [k * dir[0], k * dir[1], k * dir[2]];
    let e = apply_streaming_phases(model, r, kvec);
    let eg = linalg::eig(&e)?;
    // Order by distance to 1 so the hydro candidates come first.
    let q = model.q();
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&i, &j| {
        let di = (eg.values[i] - 1.0).norm();
        let dj = (eg.values[j] - 1.0).norm();
        di.partial_cmp(&dj).unwrap()
    });
    let mut z = Vec::with_capacity(q);
    let mut vectors = Vec::with_capacity(q);
    for &idx in &order {
        let mut v: Vec<C64> = (0..q).map(|i| eg.vectors[(i, idx)]).collect();
        let mut val = eg.values[idx];
        if refine {
            let (rv, rvec) = linalg::refine_eigenpair(&e, val, &v);
            val = rv;
            v = rvec;
        }
        z.push(val);
        vectors.push(v);
    }
    Ok(SampleEig { k, z, vectors })
}

fn overlap(a: &[C64], b: &[C64]) -> f64 {
    let dot: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    dot.norm()
}

/// Follow the n_c hydrodynamic modes over the k samples, label them, and fit
/// the growth exponents.
pub fn track_hydrodynamic_modes(
    model: &Model,
    bg: &Background,
    direction: [f64; 3],
    k_samples: &[f64],
    opts: FitOptions,
) -> Result<DispersionResult, DispersionError> {
    if k_samples.last().is_some_and(|&k| k > 0.5 + 1e-12) {
        return Err(DispersionError::BadSamples(*k_samples.last().unwrap()));
    }
    track_modes_impl(model, bg, direction, k_samples, opts, true)
}

/// Continuation without the small-k cap, for following a labeled mode out to
/// a specific finite wavenumber (the fit coefficients are then only
/// diagnostic). The principal-log branch guard still applies.
fn track_modes_impl(
    model: &Model,
    bg: &Background,
    direction: [f64; 3],
    k_samples: &[f64],
    opts: FitOptions,
    check_separation: bool,
) -> Result<DispersionResult, DispersionError> {
    bg.validate()?;
    let dir = normalize(direction);
    if k_samples.is_empty() {
        return Err(DispersionError::BadSamples(0.0));
    }
    for w in k_samples.windows(2) {
        if w[1] <= w[0] {
            return Err(DispersionError::BadSamples(w[1]));
        }
    }
    if k_samples[0] <= 0.0 {
        return Err(DispersionError::BadSamples(k_samples[0]));
    }
    let n_c = model.n_conserved();
    let r = collision_matrix(model, bg)?;

    let samples: Vec<SampleEig> = k_samples
        .par_iter()
        .map(|&k| eig_at(model, &r, dir, k, opts.refine))
        .collect::<Result<_, _>>()?;

    // Seed with the n_c closest-to-1 eigenpairs of the smallest k; guard
    // against a kinetic eigenvalue intruding into that neighborhood.
    let first = &samples[0];
    let d_nc = (first.z[n_c - 1] - 1.0).norm();
    let d_next = if first.z.len() > n_c { (first.z[n_c] - 1.0).norm() } else { f64::INFINITY };
    if d_next < 2.0 * d_nc {
        return Err(DispersionError::ModeCollision {
            k: first.k,
            detail: format!(
                "kinetic eigenvalue {} as close to 1 as the hydrodynamic set",
                first.z[n_c]
            ),
        });
    }
    let mut tracks: Vec<Vec<(f64, C64)>> =
        (0..n_c).map(|m| vec![(first.k, first.z[m])]).collect();
    let mut current_vecs: Vec<Vec<C64>> = (0..n_c).map(|m| first.vectors[m].clone()).collect();
    let first_vecs = current_vecs.clone();
    let mut unstable = vec![false; n_c];
    let mut skipped = 0usize;

    for s in &samples[1..] {
        // Greedy overlap matching of each tracked mode against all new
        // eigenvectors; ambiguity or duplication skips the sample.
        let mut chosen: Vec<usize> = Vec::with_capacity(n_c);
        let mut ambiguous = false;
        for vec_prev in current_vecs.iter() {
            let mut best = 0usize;
            let mut best_ov = -1.0;
            let mut second = -1.0;
            for (idx, cand) in s.vectors.iter().enumerate() {
                let ov = overlap(vec_prev, cand);
                if ov > best_ov {
                    second = best_ov;
                    best_ov = ov;
                    best = idx;
                } else if ov > second {
                    second = ov;
                }
            }
            if best_ov < 0.5 || (second > 0.0 && best_ov < 1.02 * second) {
                ambiguous = true;
            }
            chosen.push(best);
        }
        let mut sorted = chosen.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if ambiguous || sorted.len() != n_c {
            skipped += 1;
            if skipped * 3 > k_samples.len() {
                return Err(DispersionError::ModeCollision {
                    k: s.k,
                    detail: "eigenvector overlap ambiguous on too many samples".into(),
                });
            }
            continue;
        }
        for (m, &idx) in chosen.iter().enumerate() {
            tracks[m].push((s.k, s.z[idx]));
            current_vecs[m] = s.vectors[idx].clone();
            if s.z[idx].norm() > 1.0 + 1e-12 {
                unstable[m] = true;
            }
        }
    }

    // Principal-branch logs, with the branch guard.
    let mut gammas: Vec<Vec<(f64, C64)>> = Vec::with_capacity(n_c);
    for track in &tracks {
        let mut g = Vec::with_capacity(track.len());
        for &(k, z) in track {
            let arg = z.arg();
            if arg.abs() >= std::f64::consts::FRAC_PI_2 {
                return Err(DispersionError::BranchCrossing(arg.abs(), k));
            }
            g.push((k, z.ln()));
        }
        gammas.push(g);
    }

    // Separation check: kinetic rates must sit at least 10x the largest
    // tracked damping away from the conserved eigenvalue 1. Only the decay
    // part counts; sound modes carry an O(c_s k) phase that rotates z without
    // bringing its modulus anywhere near the kinetic ring.
    let min_s = model
        .rates
        .s
        .iter()
        .enumerate()
        .filter(|(row, _)| !model.equilibrium.conserved.contains(row))
        .map(|(_, &s)| s)
        .fold(f64::INFINITY, f64::min);
    let max_gamma = gammas
        .iter()
        .flat_map(|g| g.iter().map(|(_, gm)| gm.re.abs()))
        .fold(0.0, f64::max);
    if check_separation && min_s < 10.0 * max_gamma {
        return Err(DispersionError::SeparationViolated { min_s, max_gamma });
    }

    let kinds = classify_modes(model, dir, &first_vecs, &gammas);

    let mut modes = Vec::with_capacity(n_c);
    for m in 0..n_c {
        let ks: Vec<f64> = gammas[m].iter().map(|(k, _)| *k).collect();
        let gs: Vec<C64> = gammas[m].iter().map(|(_, g)| *g).collect();
        let (a, residual) = fit_growth_series(&ks, &gs, opts)?;
        modes.push(TrackedMode {
            kind: kinds[m],
            z: tracks[m].iter().map(|(_, z)| *z).collect(),
            gamma: gs,
            a,
            residual,
            unstable: unstable[m],
        });
    }
    let retained: Vec<f64> = tracks[0].iter().map(|(k, _)| *k).collect();
    Ok(DispersionResult { direction: dir, k_samples: retained, modes })
}

/// Name the tracked modes. AD schemes have a single density mode; for the
/// fluids the mode whose conserved content is dominated by transverse
/// momentum is the shear mode and the remaining two are the sound pair,
/// oriented by their phase velocity at the smallest k.
fn classify_modes(
    model: &Model,
    dir: [f64; 3],
    first_vecs: &[Vec<C64>],
    gammas: &[Vec<(f64, C64)>],
) -> Vec<ModeKind> {
    let n_c = first_vecs.len();
    if n_c == 1 {
        return vec![ModeKind::Density];
    }
    let perp = [-dir[1], dir[0], 0.0];
    let mut shear_score = vec![0.0; n_c];
    for (m, v) in first_vecs.iter().enumerate() {
        let mut rho = C64::new(0.0, 0.0);
        let mut jx = C64::new(0.0, 0.0);
        let mut jy = C64::new(0.0, 0.0);
        for (p, &f) in v.iter().enumerate() {
            rho += model.basis.matrix[(0, p)] * f;
            jx += model.basis.matrix[(1, p)] * f;
            jy += model.basis.matrix[(2, p)] * f;
        }
        let jpar = jx * dir[0] + jy * dir[1];
        let jperp = jx * perp[0] + jy * perp[1];
        let total = rho.norm() + jpar.norm() + jperp.norm();
        shear_score[m] = if total > 0.0 { jperp.norm() / total } else { 0.0 };
    }
    let shear = shear_score
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    let mut kinds = vec![ModeKind::Shear; n_c];
    let others: Vec<usize> = (0..n_c).filter(|&m| m != shear).collect();
    // Phase velocity -Im(gamma)/k at the smallest retained sample.
    let phase = |m: usize| {
        let (k, g) = gammas[m][0];
        -g.im / k
    };
    if others.len() == 2 {
        let (a, b) = (others[0], others[1]);
        if phase(a) >= phase(b) {
            kinds[a] = ModeKind::AcousticPlus;
            kinds[b] = ModeKind::AcousticMinus;
        } else {
            kinds[a] = ModeKind::AcousticMinus;
            kinds[b] = ModeKind::AcousticPlus;
        }
    }
    kinds
}

/// Least-squares fit of gamma(k): odd powers against Im, even against Re.
/// Returns (a1..a4) and the rms residual. Exposed for the synthetic oracle
/// tests.
pub fn fit_growth_series(
    ks: &[f64],
    gammas: &[C64],
    opts: FitOptions,
) -> Result<([f64; 4], f64), DispersionError> {
    assert_eq!(ks.len(), gammas.len());
    let n = ks.len();
    let odd_terms: Vec<usize> =
        (0..).map(|i| 2 * i + 1).take_while(|&p| p <= opts.odd_max).collect();
    let even_terms: Vec<usize> =
        (1..).map(|i| 2 * i).take_while(|&p| p <= opts.even_max).collect();
    if n < odd_terms.len().max(even_terms.len()) {
        return Err(DispersionError::BadSamples(n as f64));
    }
    let k_scale = ks.iter().copied().fold(0.0, f64::max);

    let solve = |powers: &[usize], rhs: &[f64]| -> Result<Vec<f64>, DispersionError> {
        let mut a = Mat::zeros(n, powers.len());
        for (i, &k) in ks.iter().enumerate() {
            let x = k / k_scale;
            for (j, &p) in powers.iter().enumerate() {
                a[(i, j)] = x.powi(p as i32);
            }
        }
        let scaled = lstsq(&a, rhs)?;
        Ok(scaled.iter().zip(powers).map(|(c, &p)| c / k_scale.powi(p as i32)).collect())
    };

    let im_rhs: Vec<f64> = gammas.iter().map(|g| -g.im).collect();
    let re_rhs: Vec<f64> = gammas.iter().map(|g| -g.re).collect();
    let odd = solve(&odd_terms, &im_rhs)?;
    let even = solve(&even_terms, &re_rhs)?;

    let coeff = |powers: &[usize], values: &[f64], want: usize| -> f64 {
        powers.iter().position(|&p| p == want).map(|i| values[i]).unwrap_or(0.0)
    };
    let a = [
        coeff(&odd_terms, &odd, 1),
        coeff(&even_terms, &even, 2),
        coeff(&odd_terms, &odd, 3),
        coeff(&even_terms, &even, 4),
    ];

    let mut ss = 0.0;
    for (i, &k) in ks.iter().enumerate() {
        let im_fit: f64 = odd_terms.iter().zip(&odd).map(|(&p, c)| c * k.powi(p as i32)).sum();
        let re_fit: f64 = even_terms.iter().zip(&even).map(|(&p, c)| c * k.powi(p as i32)).sum();
        ss += (im_rhs[i] - im_fit).powi(2) + (re_rhs[i] - re_fit).powi(2);
    }
    Ok((a, (ss / n as f64).sqrt()))
}

/// Relative third-order phase-velocity correction h with g(k) = k.V (1 + h
/// k^2), measured on the density mode (AD) or the shear mode (fluids).
pub fn measure_anomalous_advection(
    model: &Model,
    bg: &Background,
    direction: [f64; 3],
    k_samples: &[f64],
    opts: FitOptions,
) -> Result<f64, DispersionError> {
    let result = track_hydrodynamic_modes(model, bg, direction, k_samples, opts)?;
    let kind = if model.n_conserved() == 1 { ModeKind::Density } else { ModeKind::Shear };
    let mode = result.mode(kind).expect("tracked mode present");
    let a1 = mode.a[0];
    if a1.abs() < 1e-12 {
        return Err(DispersionError::NoAdvection(a1.abs()));
    }
    Ok(mode.a[2] / a1)
}

/// Exhaustive max-modulus scan over a wavevector grid.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    /// (k vector, max |z|) per grid point.
    pub entries: Vec<([f64; 3], f64)>,
    /// Grid points with max |z| > 1 + 1e-12.
    pub unstable: Vec<([f64; 3], f64)>,
    pub max_abs: f64,
}

pub fn stability_scan(
    model: &Model,
    bg: &Background,
    k_grid: &[[f64; 3]],
) -> Result<StabilityReport, DispersionError> {
    bg.validate()?;
    let r = collision_matrix(model, bg)?;
    let entries: Vec<([f64; 3], f64)> = k_grid
        .par_iter()
        .map(|&kvec| {
            let e = apply_streaming_phases(model, &r, kvec);
            let max = match linalg::eigenvalues(&e) {
                Ok(vals) => vals.iter().map(|z| z.norm()).fold(0.0, f64::max),
                Err(_) => f64::INFINITY,
            };
            (kvec, max)
        })
        .collect();
    let unstable: Vec<([f64; 3], f64)> =
        entries.iter().filter(|(_, m)| *m > 1.0 + 1e-12).cloned().collect();
    let max_abs = entries.iter().map(|(_, m)| *m).fold(0.0, f64::max);
    Ok(StabilityReport { entries, unstable, max_abs })
}

/// Full [-pi, pi]^d grid with n points per axis (d from the caller).
pub fn full_brillouin_grid(dim: usize, n: usize) -> Vec<[f64; 3]> {
    let axis: Vec<f64> = (0..n)
        .map(|i| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / n as f64)
        .collect();
    let mut grid = Vec::new();
    if dim == 2 {
        for &kx in &axis {
            for &ky in &axis {
                grid.push([kx, ky, 0.0]);
            }
        }
    } else {
        for &kx in &axis {
            for &ky in &axis {
                for &kz in &axis {
                    grid.push([kx, ky, kz]);
                }
            }
        }
    }
    grid
}

/// Eigenvalue of one labeled mode at a single (possibly large) wavenumber,
/// found by continuation from small k. Used by the experiments as the
/// theoretical counterpart of a measured plane wave.
pub fn mode_eigenvalue_at(
    model: &Model,
    bg: &Background,
    direction: [f64; 3],
    k: f64,
    kind: ModeKind,
) -> Result<C64, DispersionError> {
    let steps = 24usize;
    let ks: Vec<f64> = (1..=steps).map(|j| k * j as f64 / steps as f64).collect();
    let result = track_modes_impl(model, bg, direction, &ks, FitOptions::default(), false)?;
    let mode = result
        .mode(kind)
        .ok_or(DispersionError::ModeCollision { k, detail: "mode lost".into() })?;
    if (result.k_samples.last().copied().unwrap_or(0.0) - k).abs() > 1e-12 {
        return Err(DispersionError::ModeCollision {
            k,
            detail: "target sample was skipped during tracking".into(),
        });
    }
    Ok(*mode.z.last().unwrap())
}

#[cfg(test)]
mod tests;
