//! C ABI over the lattice Boltzmann laboratory: opaque handles, status
//! codes, and a thread-local error message. The committed header
//! `include/lbmlab.h` mirrors this surface (regenerate with cbindgen via the
//! provided cbindgen.toml if the surface changes).

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::sync::Arc;

use lbmlab::dispersion::{
    measure_anomalous_advection, stability_scan, track_hydrodynamic_modes, uniform_samples,
    Background, FitOptions, ModeKind,
};
use lbmlab::kernel::{ConservedFields, LatticeState};
use lbmlab::model::{build_model, default_params, rate_groups, Model, ModelName};
use lbmlab::theory::predicted_transport;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbmStatus {
    Ok = 0,
    /// Bad physics inputs (unknown model, parameter out of range, rho <= 0).
    DomainError = 1,
    /// Numerical failure (instability, non-convergence, tracking loss).
    NumericalError = 2,
    /// Malformed call (bad UTF-8, wrong lengths).
    ConfigError = 3,
    NullPointer = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lbm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Opaque model handle.
pub struct LbmModel {
    inner: Arc<Model>,
}

/// Opaque lattice-state handle.
pub struct LbmState {
    inner: LatticeState,
}

unsafe fn str_arg<'a>(ptr: *const c_char) -> Result<&'a str, LbmStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(LbmStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        LbmStatus::ConfigError
    })
}

/// Build a model. `keys`/`values` carry `n` parameter or rate assignments
/// (rate symbols are `s1`, `s3`, ...; anything else is an equilibrium
/// parameter). Missing parameters take the catalog defaults; missing rates
/// default to 1.
///
/// # Safety
/// `name` must be a NUL-terminated string; `keys` must point to `n`
/// NUL-terminated strings and `values` to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_create(
    name: *const c_char,
    keys: *const *const c_char,
    values: *const f64,
    n: usize,
    out: *mut *mut LbmModel,
) -> LbmStatus {
    if out.is_null() || (n > 0 && (keys.is_null() || values.is_null())) {
        set_error("null pointer");
        return LbmStatus::NullPointer;
    }
    let name = match str_arg(name) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let model_name = match ModelName::parse(name) {
        Ok(m) => m,
        Err(e) => {
            set_error(&e.to_string());
            return LbmStatus::DomainError;
        }
    };
    let mut params = default_params(model_name);
    let mut rates: BTreeMap<String, f64> =
        rate_groups(model_name).iter().map(|(sym, _)| (sym.to_string(), 1.0)).collect();
    for i in 0..n {
        let key = match str_arg(*keys.add(i)) {
            Ok(s) => s,
            Err(code) => return code,
        };
        let value = *values.add(i);
        let is_rate = key.len() >= 2
            && key.starts_with('s')
            && key[1..].chars().all(|c| c.is_ascii_digit());
        if is_rate {
            rates.insert(key.to_string(), value);
        } else {
            params.insert(key.to_string(), value);
        }
    }
    match build_model(model_name, params, rates) {
        Ok(model) => {
            *out = Box::into_raw(Box::new(LbmModel { inner: Arc::new(model) }));
            LbmStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            LbmStatus::DomainError
        }
    }
}

/// # Safety
/// `model` must come from `lbm_model_create` and not already be freed.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_free(model: *mut LbmModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_q(model: *const LbmModel) -> usize {
    model.as_ref().map(|m| m.inner.q()).unwrap_or(0)
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_dim(model: *const LbmModel) -> usize {
    model.as_ref().map(|m| m.inner.dim()).unwrap_or(0)
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_n_conserved(model: *const LbmModel) -> usize {
    model.as_ref().map(|m| m.inner.n_conserved()).unwrap_or(0)
}

/// m = M f. Both buffers hold q doubles.
///
/// # Safety
/// `model` live; `f` and `m` point to q doubles.
#[no_mangle]
pub unsafe extern "C" fn lbm_moments_from_f(
    model: *const LbmModel,
    f: *const f64,
    m: *mut f64,
) -> LbmStatus {
    let Some(handle) = model.as_ref() else {
        set_error("null model");
        return LbmStatus::NullPointer;
    };
    if f.is_null() || m.is_null() {
        set_error("null buffer");
        return LbmStatus::NullPointer;
    }
    let q = handle.inner.q();
    let fs = std::slice::from_raw_parts(f, q);
    match handle.inner.moments_from_f(fs) {
        Ok(values) => {
            std::slice::from_raw_parts_mut(m, q).copy_from_slice(&values);
            LbmStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            LbmStatus::DomainError
        }
    }
}

/// f = M^-1 m. Both buffers hold q doubles.
///
/// # Safety
/// `model` live; `m` and `f` point to q doubles.
#[no_mangle]
pub unsafe extern "C" fn lbm_f_from_moments(
    model: *const LbmModel,
    m: *const f64,
    f: *mut f64,
) -> LbmStatus {
    let Some(handle) = model.as_ref() else {
        set_error("null model");
        return LbmStatus::NullPointer;
    };
    if f.is_null() || m.is_null() {
        set_error("null buffer");
        return LbmStatus::NullPointer;
    }
    let q = handle.inner.q();
    let ms = std::slice::from_raw_parts(m, q);
    match handle.inner.f_from_moments(ms) {
        Ok(values) => {
            std::slice::from_raw_parts_mut(f, q).copy_from_slice(&values);
            LbmStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            LbmStatus::DomainError
        }
    }
}

/// Equilibrium moments from the conserved subvector (length n_c); `m` holds
/// q doubles.
///
/// # Safety
/// `model` live; `conserved` points to n_c doubles; `m` to q doubles.
#[no_mangle]
pub unsafe extern "C" fn lbm_equilibrium_moments(
    model: *const LbmModel,
    conserved: *const f64,
    m: *mut f64,
) -> LbmStatus {
    let Some(handle) = model.as_ref() else {
        set_error("null model");
        return LbmStatus::NullPointer;
    };
    if conserved.is_null() || m.is_null() {
        set_error("null buffer");
        return LbmStatus::NullPointer;
    }
    let w = std::slice::from_raw_parts(conserved, handle.inner.n_conserved());
    match handle.inner.equilibrium_moments(w) {
        Ok(values) => {
            std::slice::from_raw_parts_mut(m, handle.inner.q()).copy_from_slice(&values);
            LbmStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            LbmStatus::DomainError
        }
    }
}

/// Equilibrium-initialized lattice of nx x ny x nz nodes (nz = 1 in 2D).
/// `rho` holds one density per node; `jx`/`jy` may be null for a fluid at
/// rest and are ignored by the diffusion schemes.
///
/// # Safety
/// `model` live; field pointers (when non-null) hold nx*ny*nz doubles; `out`
/// valid.
#[no_mangle]
pub unsafe extern "C" fn lbm_state_create(
    model: *const LbmModel,
    nx: usize,
    ny: usize,
    nz: usize,
    rho: *const f64,
    jx: *const f64,
    jy: *const f64,
    out: *mut *mut LbmState,
) -> LbmStatus {
    let Some(handle) = model.as_ref() else {
        set_error("null model");
        return LbmStatus::NullPointer;
    };
    if rho.is_null() || out.is_null() {
        set_error("null buffer");
        return LbmStatus::NullPointer;
    }
    let nn = nx * ny * nz;
    let rho = std::slice::from_raw_parts(rho, nn).to_vec();
    let momentum = if handle.inner.n_conserved() > 1 {
        let mut j = vec![[0.0; 2]; nn];
        if !jx.is_null() {
            for (ji, v) in j.iter_mut().zip(std::slice::from_raw_parts(jx, nn)) {
                ji[0] = *v;
            }
        }
        if !jy.is_null() {
            for (ji, v) in j.iter_mut().zip(std::slice::from_raw_parts(jy, nn)) {
                ji[1] = *v;
            }
        }
        Some(j)
    } else {
        None
    };
    let fields = ConservedFields { rho, momentum };
    match LatticeState::equilibrium_init(Arc::clone(&handle.inner), [nx, ny, nz], &fields) {
        Ok(state) => {
            *out = Box::into_raw(Box::new(LbmState { inner: state }));
            LbmStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            LbmStatus::DomainError
        }
    }
}

/// # Safety
/// `state` must come from `lbm_state_create` and not already be freed.
#[no_mangle]
pub unsafe extern "C" fn lbm_state_free(state: *mut LbmState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Advance the lattice by `steps` collide-stream updates.
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lbm_state_step(state: *mut LbmState, steps: u64) -> LbmStatus {
    let Some(handle) = state.as_mut() else {
        set_error("null state");
        return LbmStatus::NullPointer;
    };
    match handle.inner.run(steps) {
        Ok(()) => LbmStatus::Ok,
        Err(e) => {
            set_error(&e.to_string());
            LbmStatus::NumericalError
        }
    }
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lbm_state_time(state: *const LbmState) -> u64 {
    state.as_ref().map(|s| s.inner.time).unwrap_or(0)
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lbm_state_total_mass(state: *const LbmState) -> f64 {
    state.as_ref().map(|s| s.inner.total_mass()).unwrap_or(f64::NAN)
}

/// Density per node into `rho` (nx*ny*nz doubles).
///
/// # Safety
/// `state` live; `rho` holds nx*ny*nz doubles.
#[no_mangle]
pub unsafe extern "C" fn lbm_state_density(state: *const LbmState, rho: *mut f64) -> LbmStatus {
    let Some(handle) = state.as_ref() else {
        set_error("null state");
        return LbmStatus::NullPointer;
    };
    if rho.is_null() {
        set_error("null buffer");
        return LbmStatus::NullPointer;
    }
    let fields = handle.inner.conserved_fields();
    std::slice::from_raw_parts_mut(rho, fields.rho.len()).copy_from_slice(&fields.rho);
    LbmStatus::Ok
}

/// Momentum per node into `jx`/`jy` (fluid schemes only).
///
/// # Safety
/// `state` live; `jx`, `jy` hold nx*ny*nz doubles each.
#[no_mangle]
pub unsafe extern "C" fn lbm_state_momentum(
    state: *const LbmState,
    jx: *mut f64,
    jy: *mut f64,
) -> LbmStatus {
    let Some(handle) = state.as_ref() else {
        set_error("null state");
        return LbmStatus::NullPointer;
    };
    if jx.is_null() || jy.is_null() {
        set_error("null buffer");
        return LbmStatus::NullPointer;
    }
    let fields = handle.inner.conserved_fields();
    let Some(j) = fields.momentum else {
        set_error("model conserves only density; no momentum field");
        return LbmStatus::DomainError;
    };
    let out_x = std::slice::from_raw_parts_mut(jx, j.len());
    let out_y = std::slice::from_raw_parts_mut(jy, j.len());
    for (i, ji) in j.iter().enumerate() {
        out_x[i] = ji[0];
        out_y[i] = ji[1];
    }
    LbmStatus::Ok
}

fn mode_from_str(name: &str) -> Option<ModeKind> {
    match name {
        "density" => Some(ModeKind::Density),
        "shear" => Some(ModeKind::Shear),
        "acoustic+" => Some(ModeKind::AcousticPlus),
        "acoustic-" => Some(ModeKind::AcousticMinus),
        _ => None,
    }
}

/// Fit the growth exponents of one hydrodynamic mode: coeffs receives
/// (a1, a2, a3, a4) with gamma(k) ~ -i a1 k - a2 k^2 - i a3 k^3 - a4 k^4.
/// `mode` is "density", "shear", "acoustic+" or "acoustic-".
///
/// # Safety
/// `model` live; `velocity` and `direction` point to 3 doubles; `coeffs` to
/// 4 doubles; `mode` is NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lbm_dispersion_fit(
    model: *const LbmModel,
    velocity: *const f64,
    direction: *const f64,
    k_max: f64,
    samples: usize,
    mode: *const c_char,
    coeffs: *mut f64,
) -> LbmStatus {
    let Some(handle) = model.as_ref() else {
        set_error("null model");
        return LbmStatus::NullPointer;
    };
    if velocity.is_null() || direction.is_null() || coeffs.is_null() {
        set_error("null buffer");
        return LbmStatus::NullPointer;
    }
    let mode = match str_arg(mode) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let Some(kind) = mode_from_str(mode) else {
        set_error("mode must be density, shear, acoustic+ or acoustic-");
        return LbmStatus::ConfigError;
    };
    let v = std::slice::from_raw_parts(velocity, 3);
    let d = std::slice::from_raw_parts(direction, 3);
    let bg = Background::with_velocity([v[0], v[1], v[2]]);
    let ks = uniform_samples(k_max, samples.max(6));
    match track_hydrodynamic_modes(&handle.inner, &bg, [d[0], d[1], d[2]], &ks, FitOptions::default())
    {
        Ok(result) => match result.mode(kind) {
            Some(m) => {
                std::slice::from_raw_parts_mut(coeffs, 4).copy_from_slice(&m.a);
                LbmStatus::Ok
            }
            None => {
                set_error("requested mode is not tracked for this scheme");
                LbmStatus::DomainError
            }
        },
        Err(e) => {
            set_error(&e.to_string());
            LbmStatus::NumericalError
        }
    }
}

/// Relative third-order phase-velocity correction h with g(k) = k.V(1 + h
/// k^2), at the given background velocity.
///
/// # Safety
/// `model` live; `velocity` and `direction` point to 3 doubles; `h` valid.
#[no_mangle]
pub unsafe extern "C" fn lbm_anomalous_advection(
    model: *const LbmModel,
    velocity: *const f64,
    direction: *const f64,
    h: *mut f64,
) -> LbmStatus {
    let Some(handle) = model.as_ref() else {
        set_error("null model");
        return LbmStatus::NullPointer;
    };
    if velocity.is_null() || direction.is_null() || h.is_null() {
        set_error("null buffer");
        return LbmStatus::NullPointer;
    }
    let v = std::slice::from_raw_parts(velocity, 3);
    let d = std::slice::from_raw_parts(direction, 3);
    let bg = Background::with_velocity([v[0], v[1], v[2]]);
    let ks = uniform_samples(0.15, 12);
    match measure_anomalous_advection(
        &handle.inner,
        &bg,
        [d[0], d[1], d[2]],
        &ks,
        FitOptions::default(),
    ) {
        Ok(value) => {
            *h = value;
            LbmStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            LbmStatus::NumericalError
        }
    }
}

/// Closed-form transport coefficient ("kappa", "nu0", "nu_eff", "zeta0",
/// "cs") at velocity magnitude v.
///
/// # Safety
/// `model` live; `key` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lbm_predicted_transport(
    model: *const LbmModel,
    v: f64,
    key: *const c_char,
    out: *mut f64,
) -> LbmStatus {
    let Some(handle) = model.as_ref() else {
        set_error("null model");
        return LbmStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null buffer");
        return LbmStatus::NullPointer;
    }
    let key = match str_arg(key) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match predicted_transport(&handle.inner, v) {
        Ok(map) => match map.get(key) {
            Some(value) => {
                *out = *value;
                LbmStatus::Ok
            }
            None => {
                set_error(&format!("no coefficient `{key}` for this scheme"));
                LbmStatus::DomainError
            }
        },
        Err(e) => {
            set_error(&e.to_string());
            LbmStatus::DomainError
        }
    }
}

/// Largest eigenvalue modulus over an n-per-axis wavevector grid; values
/// above 1 mean the configuration is linearly unstable.
///
/// # Safety
/// `model` live; `velocity` points to 3 doubles; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lbm_stability_max_abs(
    model: *const LbmModel,
    velocity: *const f64,
    grid: usize,
    out: *mut f64,
) -> LbmStatus {
    let Some(handle) = model.as_ref() else {
        set_error("null model");
        return LbmStatus::NullPointer;
    };
    if velocity.is_null() || out.is_null() {
        set_error("null buffer");
        return LbmStatus::NullPointer;
    }
    let v = std::slice::from_raw_parts(velocity, 3);
    let bg = Background::with_velocity([v[0], v[1], v[2]]);
    let grid = lbmlab::dispersion::full_brillouin_grid(handle.inner.dim(), grid.max(2));
    match stability_scan(&handle.inner, &bg, &grid) {
        Ok(report) => {
            *out = report.max_abs;
            LbmStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            LbmStatus::NumericalError
        }
    }
}
