//! Lattice model catalog: velocity sets, orthogonal moment bases, equilibrium
//! specifications and relaxation vectors for the supported DdQq schemes.
//!
//! Moment matrices are constructed in exact rational arithmetic by evaluating
//! the per-model orthogonal polynomials at every discrete velocity; the
//! inverse comes from row orthogonality (M^-1 = M^T D^-1 with D the diagonal
//! of squared row norms), so it is exact as a rational and only rounded once
//! on conversion to f64.

mod catalog;
mod equilibrium;
pub mod io;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use thiserror::Error;

use crate::linalg::Mat;

/// Exact rational scalar used for the moment matrices.
pub type Rat = Ratio<i64>;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown model name `{0}`")]
    UnknownModel(String),
    #[error("missing parameter `{0}` for model {1}")]
    MissingParameter(String, ModelName),
    #[error("unknown parameter `{0}` for model {1}")]
    UnknownParameter(String, ModelName),
    #[error("missing relaxation rate `{0}` for model {1}")]
    MissingRate(String, ModelName),
    #[error("unknown relaxation rate `{0}` for model {1}")]
    UnknownRate(String, ModelName),
    #[error("relaxation rate {symbol}={value} out of range [0, 2]")]
    RateOutOfRange { symbol: String, value: f64 },
    #[error("density must be positive, got rho={0}")]
    NonPositiveDensity(f64),
    #[error("non-finite input in `{0}`")]
    NonFinite(&'static str),
}

/// The named schemes of the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelName {
    D2Q5,
    D2Q9Ad,
    D2Q9Ns,
    D2Q13Ns,
    D3Q15Ad,
    D3Q19Ad,
}

impl ModelName {
    pub const ALL: [ModelName; 6] = [
        ModelName::D2Q5,
        ModelName::D2Q9Ad,
        ModelName::D2Q9Ns,
        ModelName::D2Q13Ns,
        ModelName::D3Q15Ad,
        ModelName::D3Q19Ad,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelName::D2Q5 => "D2Q5",
            ModelName::D2Q9Ad => "D2Q9-AD",
            ModelName::D2Q9Ns => "D2Q9-NS",
            ModelName::D2Q13Ns => "D2Q13-NS",
            ModelName::D3Q15Ad => "D3Q15-AD",
            ModelName::D3Q19Ad => "D3Q19-AD",
        }
    }

    pub fn parse(s: &str) -> Result<ModelName, ModelError> {
        match s {
            "D2Q5" => Ok(ModelName::D2Q5),
            "D2Q9-AD" => Ok(ModelName::D2Q9Ad),
            "D2Q9-NS" => Ok(ModelName::D2Q9Ns),
            "D2Q13-NS" => Ok(ModelName::D2Q13Ns),
            "D3Q15-AD" => Ok(ModelName::D3Q15Ad),
            "D3Q19-AD" => Ok(ModelName::D3Q19Ad),
            other => Err(ModelError::UnknownModel(other.to_string())),
        }
    }

    /// Number of conserved moments: 1 for advection-diffusion, d+1 for the
    /// athermal fluid schemes.
    pub fn n_conserved(&self) -> usize {
        match self {
            ModelName::D2Q5 | ModelName::D2Q9Ad | ModelName::D3Q15Ad | ModelName::D3Q19Ad => 1,
            ModelName::D2Q9Ns | ModelName::D2Q13Ns => 3,
        }
    }

    pub fn is_advection_diffusion(&self) -> bool {
        self.n_conserved() == 1
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Row parity under velocity inversion c -> -c.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(&self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn symbol(&self) -> char {
        match self {
            Parity::Even => '+',
            Parity::Odd => '-',
        }
    }
}

/// Discrete velocity set with its inversion permutation. 2D velocities carry
/// a zero third component so the kernel can treat both dimensionalities
/// uniformly.
#[derive(Debug, Clone)]
pub struct VelocitySet {
    pub name: ModelName,
    pub dim: usize,
    pub velocities: Vec<[i32; 3]>,
    pub opposite: Vec<usize>,
}

impl VelocitySet {
    pub fn q(&self) -> usize {
        self.velocities.len()
    }
}

/// The q x q moment matrix, its inverse, and per-row metadata.
#[derive(Debug, Clone)]
pub struct MomentBasis {
    pub matrix: Mat,
    pub inverse: Mat,
    pub parity: Vec<Parity>,
    pub labels: Vec<&'static str>,
    /// Exact entries, kept for the text export and the exactness tests.
    pub matrix_rational: Vec<Vec<Rat>>,
}

impl MomentBasis {
    pub fn q(&self) -> usize {
        self.matrix.rows
    }
}

/// Per-moment relaxation rates with the derived Henon parameters.
#[derive(Debug, Clone)]
pub struct RelaxationVector {
    /// One rate per moment row; conserved rows carry 0.
    pub s: Vec<f64>,
}

impl RelaxationVector {
    /// Henon parameter sigma = 1/s - 1/2 for a non-conserved row.
    pub fn sigma(&self, row: usize) -> f64 {
        sigma_from_rate(self.s[row])
    }
}

/// sigma = 1/s - 1/2, correctly rounded (compensated reciprocal).
pub fn sigma_from_rate(s: f64) -> f64 {
    let hi = 1.0 / s;
    let lo = f64::mul_add(-hi, s, 1.0) / s;
    (hi - 0.5) + lo
}

/// s = 1/(sigma + 1/2), correctly rounded, then snapped to the exact
/// preimage of `sigma` when one exists within a few ulp. Round trips
/// s -> sigma -> s bit-exactly wherever the sigma map is injective (two
/// adjacent rates can share one sigma just above each power of two in
/// sigma; no conversion can undo that).
pub fn rate_from_sigma(sigma: f64) -> f64 {
    let r = sigma + 0.5;
    let hi = 1.0 / r;
    let lo = f64::mul_add(-hi, r, 1.0) / r;
    let s0 = hi + lo;
    if !s0.is_finite() || s0 <= 0.0 {
        return s0;
    }
    let bits = s0.to_bits() as i64;
    let mut best = s0;
    let mut best_err = f64::INFINITY;
    for delta in -3i64..=3 {
        let cand = f64::from_bits((bits + delta) as u64);
        let err = (sigma_from_rate(cand) - sigma).abs();
        if err < best_err {
            best_err = err;
            best = cand;
        }
    }
    best
}

/// Equilibrium specification: which moments are conserved, plus evaluation of
/// the table polynomials for the rest (see `equilibrium.rs`).
#[derive(Debug, Clone)]
pub struct EquilibriumSpec {
    pub conserved: Vec<usize>,
}

/// A fully assembled lattice model. Immutable after construction; wrap in
/// `Arc` to share across workers.
#[derive(Debug, Clone)]
pub struct Model {
    pub name: ModelName,
    pub velocity_set: VelocitySet,
    pub basis: MomentBasis,
    pub equilibrium: EquilibriumSpec,
    pub rates: RelaxationVector,
    pub params: BTreeMap<String, f64>,
}

impl Model {
    pub fn q(&self) -> usize {
        self.velocity_set.q()
    }

    pub fn dim(&self) -> usize {
        self.velocity_set.dim
    }

    pub fn n_conserved(&self) -> usize {
        self.equilibrium.conserved.len()
    }

    pub fn param(&self, key: &str) -> f64 {
        self.params[key]
    }

    /// Advective velocity parameters of the AD schemes (zero vector for NS,
    /// where the velocity is a state, not a model parameter).
    pub fn velocity_param(&self) -> [f64; 3] {
        [
            self.params.get("vx").copied().unwrap_or(0.0),
            self.params.get("vy").copied().unwrap_or(0.0),
            self.params.get("vz").copied().unwrap_or(0.0),
        ]
    }

    /// Clone with the advective velocity parameters replaced. Only meaningful
    /// for AD models; NS models ignore v.
    pub fn with_velocity(&self, v: [f64; 3]) -> Model {
        let mut m = self.clone();
        if self.name.is_advection_diffusion() {
            m.params.insert("vx".into(), v[0]);
            m.params.insert("vy".into(), v[1]);
            if self.dim() == 3 {
                m.params.insert("vz".into(), v[2]);
            }
        }
        m
    }

    /// Clone with one relaxation-rate symbol changed.
    pub fn with_rate(&self, symbol: &str, value: f64) -> Result<Model, ModelError> {
        let mut rates: BTreeMap<String, f64> = self.rate_map();
        if !rates.contains_key(symbol) {
            return Err(ModelError::UnknownRate(symbol.into(), self.name));
        }
        rates.insert(symbol.into(), value);
        build_model(self.name, self.params.clone(), rates)
    }

    /// Clone with one parameter changed.
    pub fn with_param(&self, key: &str, value: f64) -> Result<Model, ModelError> {
        let mut params = self.params.clone();
        params.insert(key.into(), value);
        build_model(self.name, params, self.rate_map())
    }

    /// Rate symbol -> value map reconstructed from the per-row vector.
    pub fn rate_map(&self) -> BTreeMap<String, f64> {
        catalog::rate_groups(self.name)
            .iter()
            .map(|(sym, rows)| (sym.to_string(), self.rates.s[rows[0]]))
            .collect()
    }

    /// Rate symbols of this model, in table order.
    pub fn rate_symbols(&self) -> Vec<&'static str> {
        catalog::rate_groups(self.name).iter().map(|(sym, _)| *sym).collect()
    }

    /// Henon parameter for a rate symbol.
    pub fn sigma(&self, symbol: &str) -> f64 {
        let groups = catalog::rate_groups(self.name);
        let rows = groups
            .iter()
            .find(|(sym, _)| *sym == symbol)
            .unwrap_or_else(|| panic!("model {} has no rate {symbol}", self.name))
            .1
            .clone();
        sigma_from_rate(self.rates.s[rows[0]])
    }

    /// m = M f.
    pub fn moments_from_f(&self, f: &[f64]) -> Result<Vec<f64>, ModelError> {
        if f.iter().any(|x| !x.is_finite()) {
            return Err(ModelError::NonFinite("moments_from_f"));
        }
        Ok(self.basis.matrix.mul_vec(f))
    }

    /// f = M^-1 m.
    pub fn f_from_moments(&self, m: &[f64]) -> Result<Vec<f64>, ModelError> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(ModelError::NonFinite("f_from_moments"));
        }
        Ok(self.basis.inverse.mul_vec(m))
    }

    /// Equilibrium values of all q moments given the conserved subvector
    /// (rho for AD; rho, jx, jy for the 2D fluids).
    pub fn equilibrium_moments(&self, conserved: &[f64]) -> Result<Vec<f64>, ModelError> {
        equilibrium::equilibrium_moments(self, conserved)
    }

    /// d m_eq / d w, a q x n_c matrix (rows of conserved moments are the
    /// identity injection).
    pub fn equilibrium_jacobian(&self, conserved: &[f64]) -> Result<Mat, ModelError> {
        equilibrium::equilibrium_jacobian(self, conserved)
    }

    /// Convenience: shared handle.
    pub fn into_shared(self) -> Arc<Model> {
        Arc::new(self)
    }
}

/// Assemble a model from its name, parameter map and rate map.
///
/// All parameters and rate symbols of the scheme must be present (the AD
/// velocity components vx/vy/vz are optional and default to 0); rates must
/// lie in [0, 2].
pub fn build_model(
    name: ModelName,
    params: BTreeMap<String, f64>,
    rates: BTreeMap<String, f64>,
) -> Result<Model, ModelError> {
    let velocity_set = catalog::velocity_set(name);
    let basis = catalog::moment_basis(name, &velocity_set);
    let conserved = catalog::conserved_rows(name);

    // Validate the parameter map.
    let required = catalog::required_params(name);
    let optional = catalog::optional_params(name);
    for key in params.keys() {
        if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
            return Err(ModelError::UnknownParameter(key.clone(), name));
        }
    }
    let mut full_params = params;
    for key in required {
        if !full_params.contains_key(*key) {
            return Err(ModelError::MissingParameter(key.to_string(), name));
        }
    }
    for key in optional {
        full_params.entry(key.to_string()).or_insert(0.0);
    }

    // Validate and expand the rate map.
    let groups = catalog::rate_groups(name);
    for key in rates.keys() {
        if !groups.iter().any(|(sym, _)| sym == key) {
            return Err(ModelError::UnknownRate(key.clone(), name));
        }
    }
    let q = velocity_set.q();
    let mut s = vec![0.0; q];
    for (sym, rows) in &groups {
        let value = *rates
            .get(*sym)
            .ok_or_else(|| ModelError::MissingRate(sym.to_string(), name))?;
        if !(0.0..=2.0).contains(&value) || !value.is_finite() {
            return Err(ModelError::RateOutOfRange { symbol: sym.to_string(), value });
        }
        for &row in rows {
            s[row] = value;
        }
    }

    Ok(Model {
        name,
        velocity_set,
        basis,
        equilibrium: EquilibriumSpec { conserved },
        rates: RelaxationVector { s },
        params: full_params,
    })
}

/// Build with every rate symbol set to the same value (handy in tests).
pub fn build_model_uniform_rates(
    name: ModelName,
    params: BTreeMap<String, f64>,
    s: f64,
) -> Result<Model, ModelError> {
    let rates = catalog::rate_groups(name)
        .iter()
        .map(|(sym, _)| (sym.to_string(), s))
        .collect();
    build_model(name, params, rates)
}

/// Two-relaxation-time rates: one value for even-parity rows, one for odd.
pub fn trt_rates(name: ModelName, s_even: f64, s_odd: f64) -> BTreeMap<String, f64> {
    let vs = catalog::velocity_set(name);
    let basis = catalog::moment_basis(name, &vs);
    catalog::rate_groups(name)
        .iter()
        .map(|(sym, rows)| {
            let v = match basis.parity[rows[0]] {
                Parity::Even => s_even,
                Parity::Odd => s_odd,
            };
            (sym.to_string(), v)
        })
        .collect()
}

/// Default parameter values (the paper's usual choices where it states them;
/// see README for the rest).
pub fn default_params(name: ModelName) -> BTreeMap<String, f64> {
    catalog::default_params(name)
}

pub use catalog::{rate_groups, required_params};

#[cfg(test)]
mod tests;
