//! Static data for each scheme: discrete velocities, orthogonal polynomials,
//! row parities and labels, rate-symbol groupings, parameter lists.

use super::{ModelName, MomentBasis, Parity, Rat, VelocitySet};
use crate::linalg::Mat;
use std::collections::BTreeMap;

fn r(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

fn ri(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// Table-1 velocity order for 2D (rest; speed-1 +x,+y,-x,-y; speed-sqrt2
/// counterclockwise from (1,1); speed-2 +x,+y,-x,-y) and the column order of
/// the printed 3D matrices.
pub fn velocity_set(name: ModelName) -> VelocitySet {
    let v2 = |list: &[(i32, i32)]| -> Vec<[i32; 3]> {
        list.iter().map(|&(x, y)| [x, y, 0]).collect()
    };
    let velocities: Vec<[i32; 3]> = match name {
        ModelName::D2Q5 => v2(&[(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)]),
        ModelName::D2Q9Ad | ModelName::D2Q9Ns => v2(&[
            (0, 0),
            (1, 0),
            (0, 1),
            (-1, 0),
            (0, -1),
            (1, 1),
            (-1, 1),
            (-1, -1),
            (1, -1),
        ]),
        ModelName::D2Q13Ns => v2(&[
            (0, 0),
            (1, 0),
            (0, 1),
            (-1, 0),
            (0, -1),
            (1, 1),
            (-1, 1),
            (-1, -1),
            (1, -1),
            (2, 0),
            (0, 2),
            (-2, 0),
            (0, -2),
        ]),
        ModelName::D3Q15Ad => vec![
            [0, 0, 0],
            [1, 0, 0],
            [-1, 0, 0],
            [0, 1, 0],
            [0, -1, 0],
            [0, 0, 1],
            [0, 0, -1],
            [1, 1, 1],
            [-1, 1, 1],
            [1, -1, 1],
            [-1, -1, 1],
            [1, 1, -1],
            [-1, 1, -1],
            [1, -1, -1],
            [-1, -1, -1],
        ],
        ModelName::D3Q19Ad => vec![
            [0, 0, 0],
            [1, 0, 0],
            [-1, 0, 0],
            [0, 1, 0],
            [0, -1, 0],
            [0, 0, 1],
            [0, 0, -1],
            [1, 1, 0],
            [-1, 1, 0],
            [1, -1, 0],
            [-1, -1, 0],
            [0, 1, 1],
            [0, -1, 1],
            [0, 1, -1],
            [0, -1, -1],
            [1, 0, 1],
            [1, 0, -1],
            [-1, 0, 1],
            [-1, 0, -1],
        ],
    };
    let dim = match name {
        ModelName::D3Q15Ad | ModelName::D3Q19Ad => 3,
        _ => 2,
    };
    let opposite = velocities
        .iter()
        .map(|c| {
            velocities
                .iter()
                .position(|d| d[0] == -c[0] && d[1] == -c[1] && d[2] == -c[2])
                .expect("velocity set closed under negation")
        })
        .collect();
    VelocitySet { name, dim, velocities, opposite }
}

/// Orthogonal polynomial of moment `row` evaluated at a velocity, exactly.
fn polynomial(name: ModelName, row: usize, c: [i64; 3]) -> Rat {
    let x = ri(c[0]);
    let y = ri(c[1]);
    let z = ri(c[2]);
    let r2 = x * x + y * y + z * z;
    let r4 = r2 * r2;
    let r6 = r4 * r2;
    match name {
        ModelName::D2Q5 => match row {
            0 => ri(1),
            1 => x,
            2 => y,
            3 => ri(-4) + ri(5) * r2,
            4 => x * x - y * y,
            _ => unreachable!(),
        },
        ModelName::D2Q9Ad | ModelName::D2Q9Ns => match row {
            0 => ri(1),
            1 => x,
            2 => y,
            3 => ri(-4) + ri(3) * r2,
            4 => x * x - y * y,
            5 => x * y,
            6 => -(ri(5) - ri(3) * r2) * x,
            7 => -(ri(5) - ri(3) * r2) * y,
            8 => ri(4) - r(3, 2) * (ri(7) - ri(3) * r2) * r2,
            _ => unreachable!(),
        },
        ModelName::D2Q13Ns => match row {
            0 => ri(1),
            1 => x,
            2 => y,
            3 => ri(-28) + ri(13) * r2,
            4 => x * x - y * y,
            5 => x * y,
            6 => -(ri(3) - r2) * x,
            7 => -(ri(3) - r2) * y,
            8 => r(1, 12) * (ri(202) - ri(189) * r2 + ri(35) * r4) * x,
            9 => r(1, 12) * (ri(202) - ri(189) * r2 + ri(35) * r4) * y,
            10 => -r(1, 2) * (ri(280) - ri(361) * r2 + ri(77) * r4),
            11 => -r(1, 12) * (ri(65) - ri(17) * r2) * (x * x - y * y),
            12 => -r(1, 24) * (ri(288) - ri(1162) * r2 + ri(819) * r4 - ri(137) * r6),
            _ => unreachable!(),
        },
        ModelName::D3Q15Ad => match row {
            0 => ri(1),
            1 => x,
            2 => y,
            3 => z,
            4 => ri(-2) + r2,
            5 => ri(2) * x * x - y * y - z * z,
            6 => y * y - z * z,
            7 => x * y,
            8 => y * z,
            9 => z * x,
            10 => x * (r(-13, 2) + r(5, 2) * r2),
            11 => y * (r(-13, 2) + r(5, 2) * r2),
            12 => z * (r(-13, 2) + r(5, 2) * r2),
            13 => ri(16) - r(55, 2) * r2 + r(15, 2) * r4,
            14 => x * y * z,
            _ => unreachable!(),
        },
        ModelName::D3Q19Ad => match row {
            0 => ri(1),
            1 => x,
            2 => y,
            3 => z,
            4 => ri(-30) + ri(19) * r2,
            5 => ri(2) * x * x - y * y - z * z,
            6 => y * y - z * z,
            7 => x * y,
            8 => y * z,
            9 => z * x,
            10 => x * (ri(-9) + ri(5) * r2),
            11 => y * (ri(-9) + ri(5) * r2),
            12 => z * (ri(-9) + ri(5) * r2),
            13 => (ri(2) * x * x - y * y - z * z) * (ri(-5) + ri(3) * r2),
            14 => (y * y - z * z) * (ri(-5) + ri(3) * r2),
            15 => ri(12) - r(53, 2) * r2 + r(21, 2) * r4,
            16 => x * (y * y - z * z),
            17 => y * (z * z - x * x),
            18 => z * (x * x - y * y),
            _ => unreachable!(),
        },
    }
}

pub fn labels(name: ModelName) -> Vec<&'static str> {
    match name {
        ModelName::D2Q5 => vec!["rho", "jx", "jy", "e", "xx"],
        ModelName::D2Q9Ad | ModelName::D2Q9Ns => {
            vec!["rho", "jx", "jy", "e", "xx", "xy", "qx", "qy", "varpi"]
        }
        ModelName::D2Q13Ns => vec![
            "rho", "jx", "jy", "e", "xx", "xy", "qx", "qy", "rx", "ry", "e2", "xxe", "e3",
        ],
        ModelName::D3Q15Ad => vec![
            "rho", "jx", "jy", "jz", "ee", "xx", "yy", "xy", "yz", "zx", "qx", "qy", "qz", "d3",
            "tt",
        ],
        ModelName::D3Q19Ad => vec![
            "rho", "jx", "jy", "jz", "ee", "xx", "yy", "xy", "yz", "zx", "qx", "qy", "qz", "xxe",
            "yye", "d3", "tx", "ty", "tz",
        ],
    }
}

pub fn parities(name: ModelName) -> Vec<Parity> {
    use Parity::{Even as E, Odd as O};
    match name {
        ModelName::D2Q5 => vec![E, O, O, E, E],
        ModelName::D2Q9Ad | ModelName::D2Q9Ns => vec![E, O, O, E, E, E, O, O, E],
        ModelName::D2Q13Ns => vec![E, O, O, E, E, E, O, O, O, O, E, E, E],
        ModelName::D3Q15Ad => vec![E, O, O, O, E, E, E, E, E, E, O, O, O, E, O],
        ModelName::D3Q19Ad => vec![E, O, O, O, E, E, E, E, E, E, O, O, O, E, E, E, O, O, O],
    }
}

/// Build the moment matrix and its inverse from the polynomials, exactly.
pub fn moment_basis(name: ModelName, vs: &VelocitySet) -> MomentBasis {
    let q = vs.q();
    let mut matrix_rational: Vec<Vec<Rat>> = Vec::with_capacity(q);
    for row in 0..q {
        let entries: Vec<Rat> = vs
            .velocities
            .iter()
            .map(|c| polynomial(name, row, [c[0] as i64, c[1] as i64, c[2] as i64]))
            .collect();
        matrix_rational.push(entries);
    }
    // Row orthogonality makes the inverse a scaled transpose.
    let norms: Vec<Rat> = matrix_rational
        .iter()
        .map(|row| row.iter().map(|e| e * e).sum())
        .collect();
    let to_f = |x: &Rat| *x.numer() as f64 / *x.denom() as f64;
    let mut matrix = Mat::zeros(q, q);
    let mut inverse = Mat::zeros(q, q);
    for k in 0..q {
        for p in 0..q {
            matrix[(k, p)] = to_f(&matrix_rational[k][p]);
            inverse[(p, k)] = to_f(&(matrix_rational[k][p] / norms[k]));
        }
    }
    MomentBasis { matrix, inverse, parity: parities(name), labels: labels(name), matrix_rational }
}

pub fn conserved_rows(name: ModelName) -> Vec<usize> {
    match name.n_conserved() {
        1 => vec![0],
        3 => vec![0, 1, 2],
        _ => unreachable!(),
    }
}

/// Rate symbol -> moment rows, following the papers' tables.
pub fn rate_groups(name: ModelName) -> Vec<(&'static str, Vec<usize>)> {
    match name {
        ModelName::D2Q5 => vec![("s1", vec![1, 2]), ("s3", vec![3]), ("s4", vec![4])],
        ModelName::D2Q9Ad => vec![
            ("s1", vec![1, 2]),
            ("s3", vec![3]),
            ("s4", vec![4, 5]),
            ("s6", vec![6, 7]),
            ("s8", vec![8]),
        ],
        ModelName::D2Q9Ns => {
            vec![("s3", vec![3]), ("s4", vec![4, 5]), ("s6", vec![6, 7]), ("s8", vec![8])]
        }
        ModelName::D2Q13Ns => vec![
            ("s3", vec![3]),
            ("s4", vec![4, 5]),
            ("s6", vec![6, 7]),
            ("s8", vec![8, 9]),
            ("s10", vec![10]),
            ("s11", vec![12]),
            ("s12", vec![11]),
        ],
        ModelName::D3Q15Ad => vec![
            ("s1", vec![1, 2, 3]),
            ("s5", vec![4]),
            ("s6", vec![5, 6, 7, 8, 9]),
            ("s11", vec![10, 11, 12]),
            ("s14", vec![13]),
            ("s15", vec![14]),
        ],
        ModelName::D3Q19Ad => vec![
            ("s1", vec![1, 2, 3]),
            ("s5", vec![4]),
            ("s6", vec![5, 6, 7, 8, 9]),
            ("s11", vec![10, 11, 12]),
            ("s14", vec![13, 14]),
            ("s16", vec![15]),
            ("s17", vec![16, 17, 18]),
        ],
    }
}

pub fn required_params(name: ModelName) -> &'static [&'static str] {
    match name {
        ModelName::D2Q5 => &["alpha"],
        ModelName::D2Q9Ad => &["alpha", "beta", "d1", "a"],
        ModelName::D2Q9Ns => &["alpha", "beta"],
        ModelName::D2Q13Ns => &["alpha", "beta", "gamma", "c1", "q"],
        ModelName::D3Q15Ad => &["alpha", "beta", "d1"],
        ModelName::D3Q19Ad => &["alpha", "beta", "d1", "d2"],
    }
}

pub fn optional_params(name: ModelName) -> &'static [&'static str] {
    match name {
        ModelName::D2Q5 | ModelName::D2Q9Ad => &["vx", "vy"],
        ModelName::D3Q15Ad | ModelName::D3Q19Ad => &["vx", "vy", "vz"],
        ModelName::D2Q9Ns | ModelName::D2Q13Ns => &[],
    }
}

/// Usual parameter values: alpha=-2, beta=1 where the paper says so; the AD
/// energy coefficient is set so the advective "sound speed" squared is 1/3;
/// remaining knobs default to neutral values.
pub fn default_params(name: ModelName) -> BTreeMap<String, f64> {
    let pairs: &[(&str, f64)] = match name {
        ModelName::D2Q5 => &[("alpha", -2.0)],
        ModelName::D2Q9Ad => &[("alpha", -2.0), ("beta", 1.0), ("d1", -1.0), ("a", -3.0)],
        ModelName::D2Q9Ns => &[("alpha", -2.0), ("beta", 1.0)],
        ModelName::D2Q13Ns => {
            &[("alpha", -2.0), ("beta", 1.0), ("gamma", 1.0), ("c1", -1.0), ("q", -7.0 / 6.0)]
        }
        ModelName::D3Q15Ad => &[("alpha", -1.0), ("beta", 1.0), ("d1", 0.0)],
        ModelName::D3Q19Ad => &[("alpha", -11.0), ("beta", 1.0), ("d1", 0.0), ("d2", 0.0)],
    };
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}
