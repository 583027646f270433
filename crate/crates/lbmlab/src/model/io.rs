//! Plain-text model exchange format, used by the golden-file tests.
//!
//! Layout:
//! ```text
//! <name> <q> <d> <n_c>
//! <q rows of q space-separated rationals of M, "p/q" or integer>
//! <parity line, one of +/- per row>
//! <rate assignments, one `s*=value` line per symbol, table order>
//! <param assignments, one `key=value` line per key, sorted>
//! ```

use super::{build_model, Model, ModelError, ModelName, Rat};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("model text parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn fmt_rat(x: &Rat) -> String {
    if *x.denom() == 1 {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn parse_rat(s: &str, line: usize) -> Result<Rat, ModelIoError> {
    let bad = |m: String| ModelIoError::Parse { line, message: m };
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.parse().map_err(|_| bad(format!("bad numerator `{n}`")))?;
        let d: i64 = d.parse().map_err(|_| bad(format!("bad denominator `{d}`")))?;
        if d == 0 {
            return Err(bad("zero denominator".into()));
        }
        Ok(Rat::new(n, d))
    } else {
        let n: i64 = s.parse().map_err(|_| bad(format!("bad integer `{s}`")))?;
        Ok(Rat::from_integer(n))
    }
}

/// Serialize a model to the exchange format.
pub fn write_model_text(model: &Model) -> String {
    let q = model.q();
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {} {}", model.name, q, model.dim(), model.n_conserved());
    for row in &model.basis.matrix_rational {
        let cells: Vec<String> = row.iter().map(fmt_rat).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    let parity: Vec<String> =
        model.basis.parity.iter().map(|p| p.symbol().to_string()).collect();
    let _ = writeln!(out, "{}", parity.join(" "));
    for sym in model.rate_symbols() {
        let _ = writeln!(out, "{sym}={}", model.rate_map()[sym]);
    }
    for (key, value) in &model.params {
        let _ = writeln!(out, "{key}={value}");
    }
    out
}

/// Parse the exchange format back into a model, checking the stored matrix
/// and parity data against the regenerated basis.
pub fn read_model_text(text: &str) -> Result<Model, ModelIoError> {
    let mut lines = text.lines().enumerate();
    let bad = |line: usize, m: String| ModelIoError::Parse { line: line + 1, message: m };

    let (hline, header) = lines
        .next()
        .ok_or_else(|| bad(0, "empty input".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(bad(hline, format!("expected `name q d n_c`, got `{header}`")));
    }
    let name = ModelName::parse(fields[0]).map_err(ModelIoError::Model)?;
    let q: usize = fields[1].parse().map_err(|_| bad(hline, "bad q".into()))?;
    let d: usize = fields[2].parse().map_err(|_| bad(hline, "bad d".into()))?;
    let n_c: usize = fields[3].parse().map_err(|_| bad(hline, "bad n_c".into()))?;

    let mut matrix: Vec<Vec<Rat>> = Vec::with_capacity(q);
    for _ in 0..q {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| bad(hline, "truncated matrix".into()))?;
        let row: Result<Vec<Rat>, _> =
            line.split_whitespace().map(|c| parse_rat(c, lno + 1)).collect();
        let row = row?;
        if row.len() != q {
            return Err(bad(lno, format!("expected {q} entries, got {}", row.len())));
        }
        matrix.push(row);
    }
    let (plno, parity_line) = lines
        .next()
        .ok_or_else(|| bad(hline, "missing parity line".into()))?;
    let parity: Vec<&str> = parity_line.split_whitespace().collect();
    if parity.len() != q {
        return Err(bad(plno, "parity line length mismatch".into()));
    }

    let mut rates = BTreeMap::new();
    let mut params = BTreeMap::new();
    for (lno, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(lno, format!("expected key=value, got `{line}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| bad(lno, format!("bad float `{value}`")))?;
        let key = key.trim();
        if key.starts_with('s') && key[1..].chars().all(|c| c.is_ascii_digit()) {
            rates.insert(key.to_string(), value);
        } else {
            params.insert(key.to_string(), value);
        }
    }

    let model = build_model(name, params, rates)?;
    if model.q() != q || model.dim() != d || model.n_conserved() != n_c {
        return Err(bad(hline, "header inconsistent with model".into()));
    }
    if model.basis.matrix_rational != matrix {
        return Err(bad(hline, "stored matrix differs from the generated basis".into()));
    }
    let expect: Vec<String> =
        model.basis.parity.iter().map(|p| p.symbol().to_string()).collect();
    if parity != expect.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(bad(plno, "stored parity differs from the generated basis".into()));
    }
    Ok(model)
}
