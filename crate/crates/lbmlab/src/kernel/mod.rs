//! Time-domain engine: collide in moment space, stream on a periodic lattice.
//!
//! Distributions are stored per node (f[node * q + p]) with node = x + nx (y
//! + ny z); 2D grids carry nz = 1. Collision is a pure per-node map and
//! streaming is a pure permutation into a second buffer, so a step is
//! deterministic and bit-identical for any worker count.

use std::io::{self, Read, Write};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{Model, ModelError, ModelName};

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("non-positive density rho = {rho} at node ({x}, {y}, {z}) at step {time}")]
    NonPositiveDensity { x: usize, y: usize, z: usize, rho: f64, time: u64 },
    #[error("grid dims {0:?} do not fit the model dimension {1}")]
    BadDims([usize; 3], usize),
    #[error("field data length {got} does not match the grid ({want})")]
    BadFieldLength { got: usize, want: usize },
    #[error("checkpoint: {0}")]
    BadCheckpoint(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Per-node conserved quantities used for initialization and reporting.
#[derive(Debug, Clone)]
pub struct ConservedFields {
    pub rho: Vec<f64>,
    /// Momentum per node, present for the fluid schemes.
    pub momentum: Option<Vec<[f64; 2]>>,
}

/// Periodic lattice of q distribution values per node.
#[derive(Debug, Clone)]
pub struct LatticeState {
    pub model: Arc<Model>,
    pub dims: [usize; 3],
    pub time: u64,
    f: Vec<f64>,
    scratch: Vec<f64>,
}

impl LatticeState {
    pub fn n_nodes(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    #[inline]
    pub fn node_index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn f_at(&self, x: usize, y: usize, z: usize, p: usize) -> f64 {
        self.f[self.node_index(x, y, z) * self.model.q() + p]
    }

    fn check_dims(model: &Model, dims: [usize; 3]) -> Result<(), KernelError> {
        let ok = dims[0] >= 1
            && dims[1] >= 1
            && (model.dim() == 3 || dims[2] == 1)
            && dims[2] >= 1;
        if ok {
            Ok(())
        } else {
            Err(KernelError::BadDims(dims, model.dim()))
        }
    }

    /// State with every node at the equilibrium of the given conserved
    /// fields (the standard neutral start: non-conserved moments hold no
    /// information of their own).
    pub fn equilibrium_init(
        model: Arc<Model>,
        dims: [usize; 3],
        fields: &ConservedFields,
    ) -> Result<Self, KernelError> {
        Self::check_dims(&model, dims)?;
        let nn = dims[0] * dims[1] * dims[2];
        if fields.rho.len() != nn {
            return Err(KernelError::BadFieldLength { got: fields.rho.len(), want: nn });
        }
        if let Some(j) = &fields.momentum {
            if j.len() != nn {
                return Err(KernelError::BadFieldLength { got: j.len(), want: nn });
            }
        }
        let q = model.q();
        let n_c = model.n_conserved();
        let mut f = vec![0.0; nn * q];
        for (i, fi) in f.chunks_mut(q).enumerate() {
            let w: Vec<f64> = if n_c == 1 {
                vec![fields.rho[i]]
            } else {
                let j = fields.momentum.as_ref().map(|m| m[i]).unwrap_or([0.0, 0.0]);
                vec![fields.rho[i], j[0], j[1]]
            };
            let meq = model.equilibrium_moments(&w)?;
            fi.copy_from_slice(&model.f_from_moments(&meq)?);
        }
        let scratch = f.clone();
        Ok(LatticeState { model, dims, time: 0, f, scratch })
    }

    /// State from raw distribution values (node-major, q per node).
    pub fn from_f(model: Arc<Model>, dims: [usize; 3], f: Vec<f64>) -> Result<Self, KernelError> {
        Self::check_dims(&model, dims)?;
        let want = dims[0] * dims[1] * dims[2] * model.q();
        if f.len() != want {
            return Err(KernelError::BadFieldLength { got: f.len(), want });
        }
        let scratch = f.clone();
        Ok(LatticeState { model, dims, time: 0, f, scratch })
    }

    /// Moment-space relaxation at every node: m* = m + S (m_eq - m), with
    /// the conserved moments untouched.
    pub fn collide(&mut self) -> Result<(), KernelError> {
        let model = Arc::clone(&self.model);
        let q = model.q();
        let n_c = model.n_conserved();
        let nx = self.dims[0];
        let ny = self.dims[1];
        let time = self.time;
        let chunk_nodes = 1024usize;
        self.f
            .par_chunks_mut(q * chunk_nodes)
            .enumerate()
            .try_for_each(|(ci, chunk)| -> Result<(), KernelError> {
                let matrix = &model.basis.matrix.data;
                let inverse = &model.basis.inverse.data;
                let mut m = vec![0.0; q];
                let mut w = vec![0.0; n_c];
                for (li, node_f) in chunk.chunks_mut(q).enumerate() {
                    for (k, mk) in m.iter_mut().enumerate() {
                        let row = &matrix[k * q..(k + 1) * q];
                        let mut acc = 0.0;
                        for (a, b) in row.iter().zip(node_f.iter()) {
                            acc += a * b;
                        }
                        *mk = acc;
                    }
                    for (c, &row) in model.equilibrium.conserved.iter().enumerate() {
                        w[c] = m[row];
                    }
                    if n_c > 1 && w[0] <= 0.0 {
                        let node = ci * chunk_nodes + li;
                        return Err(KernelError::NonPositiveDensity {
                            x: node % nx,
                            y: (node / nx) % ny,
                            z: node / (nx * ny),
                            rho: w[0],
                            time,
                        });
                    }
                    let meq = model.equilibrium_moments(&w)?;
                    for k in 0..q {
                        m[k] += model.rates.s[k] * (meq[k] - m[k]);
                    }
                    for (p, fp) in node_f.iter_mut().enumerate() {
                        let row = &inverse[p * q..(p + 1) * q];
                        let mut acc = 0.0;
                        for (a, b) in row.iter().zip(m.iter()) {
                            acc += a * b;
                        }
                        *fp = acc;
                    }
                }
                Ok(())
            })
    }

    /// Periodic propagation: f_p(r + c_p) <- f_p(r). A pure permutation of
    /// the stored values.
    pub fn stream(&mut self) {
        let q = self.model.q();
        let [nx, ny, nz] = self.dims;
        let velocities = self.model.velocity_set.velocities.clone();
        let f = &self.f;
        let dst = &mut self.scratch;
        dst.par_chunks_mut(q * nx)
            .enumerate()
            .for_each(|(row, out)| {
                // Row index r = y + ny z of the destination.
                let y = row % ny;
                let z = row / ny;
                for (p, c) in velocities.iter().enumerate() {
                    let sy = (y as i64 - c[1] as i64).rem_euclid(ny as i64) as usize;
                    let sz = (z as i64 - c[2] as i64).rem_euclid(nz as i64) as usize;
                    let src_row = (sy + ny * sz) * nx;
                    for x in 0..nx {
                        let sx = (x as i64 - c[0] as i64).rem_euclid(nx as i64) as usize;
                        out[x * q + p] = f[(src_row + sx) * q + p];
                    }
                }
            });
        std::mem::swap(&mut self.f, &mut self.scratch);
    }

    /// One full update: collide then stream.
    pub fn step(&mut self) -> Result<(), KernelError> {
        self.collide()?;
        self.stream();
        self.time += 1;
        Ok(())
    }

    pub fn run(&mut self, steps: u64) -> Result<(), KernelError> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }

    /// Conserved moment fields: density, plus momentum for the fluids.
    pub fn conserved_fields(&self) -> ConservedFields {
        let q = self.model.q();
        let n_c = self.model.n_conserved();
        let matrix = &self.model.basis.matrix;
        let nn = self.n_nodes();
        let mut rho = vec![0.0; nn];
        let mut momentum = if n_c > 1 { Some(vec![[0.0; 2]; nn]) } else { None };
        for i in 0..nn {
            let node = &self.f[i * q..(i + 1) * q];
            rho[i] = node.iter().sum();
            if let Some(j) = momentum.as_mut() {
                let mut jx = 0.0;
                let mut jy = 0.0;
                for p in 0..q {
                    jx += matrix[(1, p)] * node[p];
                    jy += matrix[(2, p)] * node[p];
                }
                j[i] = [jx, jy];
            }
        }
        ConservedFields { rho, momentum }
    }

    /// Total mass, compensated summation.
    pub fn total_mass(&self) -> f64 {
        kahan_sum(self.f.iter().copied())
    }

    /// Total momentum (all models; only meaningful as an invariant for the
    /// fluids).
    pub fn total_momentum(&self) -> [f64; 3] {
        let q = self.model.q();
        let mut out = [0.0; 3];
        for a in 0..3 {
            out[a] = kahan_sum(self.f.chunks(q).map(|node| {
                let mut acc = 0.0;
                for (p, fp) in node.iter().enumerate() {
                    acc += fp * self.model.velocity_set.velocities[p][a] as f64;
                }
                acc
            }));
        }
        out
    }

    /// Complex Fourier amplitude of a per-node scalar field at integer mode
    /// numbers (nk_x, nk_y, nk_z): sum_r field(r) exp(-i k.r) / N.
    pub fn fourier_amplitude(field: &[f64], dims: [usize; 3], nk: [i32; 3]) -> (f64, f64) {
        let [nx, ny, nz] = dims;
        let mut re = 0.0;
        let mut im = 0.0;
        let wx = -2.0 * std::f64::consts::PI * nk[0] as f64 / nx as f64;
        let wy = -2.0 * std::f64::consts::PI * nk[1] as f64 / ny as f64;
        let wz = -2.0 * std::f64::consts::PI * nk[2] as f64 / nz as f64;
        for z in 0..nz {
            for y in 0..ny {
                let base = (y + ny * z) * nx;
                let phase_row = wy * y as f64 + wz * z as f64;
                for x in 0..nx {
                    let ph = wx * x as f64 + phase_row;
                    let v = field[base + x];
                    re += v * ph.cos();
                    im += v * ph.sin();
                }
            }
        }
        let n = (nx * ny * nz) as f64;
        (re / n, im / n)
    }

    /// Write one field as CSV, row-major, with the dump header.
    pub fn dump_field_csv<W: Write>(
        &self,
        name: &str,
        field: &[f64],
        out: &mut W,
    ) -> Result<(), KernelError> {
        if field.len() != self.n_nodes() {
            return Err(KernelError::BadFieldLength { got: field.len(), want: self.n_nodes() });
        }
        write_field_csv(name, field, self.dims, self.time, out)
    }

    /// Checkpoint: one text header line, then the raw little-endian f64
    /// stream of f in node-major order.
    pub fn write_checkpoint<W: Write>(&self, out: &mut W) -> Result<(), KernelError> {
        writeln!(
            out,
            "lbmlab-checkpoint v1 model={} nx={} ny={} nz={} q={} t={}",
            self.model.name,
            self.dims[0],
            self.dims[1],
            self.dims[2],
            self.model.q(),
            self.time
        )?;
        let mut buf = Vec::with_capacity(self.f.len() * 8);
        for v in &self.f {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// Restore a checkpoint written by `write_checkpoint`; the model must
    /// match the header.
    pub fn read_checkpoint<R: Read>(model: Arc<Model>, input: &mut R) -> Result<Self, KernelError> {
        let mut header = Vec::new();
        let mut byte = [0u8; 1];
        loop {
            input.read_exact(&mut byte)?;
            if byte[0] == b'\n' {
                break;
            }
            header.push(byte[0]);
            if header.len() > 4096 {
                return Err(KernelError::BadCheckpoint("unterminated header".into()));
            }
        }
        let header = String::from_utf8(header)
            .map_err(|_| KernelError::BadCheckpoint("header is not UTF-8".into()))?;
        let mut fields = header.split_whitespace();
        let magic = fields.next().unwrap_or("");
        let version = fields.next().unwrap_or("");
        if magic != "lbmlab-checkpoint" || version != "v1" {
            return Err(KernelError::BadCheckpoint(format!("bad magic `{header}`")));
        }
        let mut get = |key: &str| -> Result<String, KernelError> {
            fields
                .next()
                .and_then(|kv| kv.strip_prefix(key))
                .and_then(|kv| kv.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(|| KernelError::BadCheckpoint(format!("missing {key}")))
        };
        let name = get("model")?;
        if ModelName::parse(&name)? != model.name {
            return Err(KernelError::BadCheckpoint(format!(
                "checkpoint is for {name}, not {}",
                model.name
            )));
        }
        let parse = |s: String| -> Result<usize, KernelError> {
            s.parse().map_err(|_| KernelError::BadCheckpoint(format!("bad integer `{s}`")))
        };
        let dims = [parse(get("nx")?)?, parse(get("ny")?)?, parse(get("nz")?)?];
        let q = parse(get("q")?)?;
        let time = parse(get("t")?)? as u64;
        if q != model.q() {
            return Err(KernelError::BadCheckpoint(format!("q = {q} != {}", model.q())));
        }
        let want = dims[0] * dims[1] * dims[2] * q;
        let mut bytes = vec![0u8; want * 8];
        input.read_exact(&mut bytes)?;
        let f: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let mut state = Self::from_f(model, dims, f)?;
        state.time = time;
        Ok(state)
    }
}

/// CSV dump used for all field outputs: `# field=<name> t=<step> Nx=.. Ny=..
/// [Nz=..]` then one row per y (and z block), x across columns.
pub fn write_field_csv<W: Write>(
    name: &str,
    field: &[f64],
    dims: [usize; 3],
    time: u64,
    out: &mut W,
) -> Result<(), KernelError> {
    let [nx, ny, nz] = dims;
    if nz == 1 {
        writeln!(out, "# field={name} t={time} Nx={nx} Ny={ny}")?;
    } else {
        writeln!(out, "# field={name} t={time} Nx={nx} Ny={ny} Nz={nz}")?;
    }
    let mut line = String::new();
    for z in 0..nz {
        for y in 0..ny {
            line.clear();
            let base = (y + ny * z) * nx;
            for x in 0..nx {
                if x > 0 {
                    line.push(',');
                }
                line.push_str(&format_float(field[base + x]));
            }
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

/// 17 significant digits: round-trip safe for f64 and byte-stable.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}
