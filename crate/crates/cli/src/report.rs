use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use gpk_core::{BitVector, BooleanOracle, GpkError, SubspaceBasis};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::{Failure, Format};

/// Independent random streams derived from one command seed.
#[derive(Debug, Clone, Copy)]
pub enum Stream {
    Generation = 0,
    Markers = 1,
    Measurement = 2,
}

pub fn rng(seed: u64, stream: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Debug, Serialize)]
pub struct Envelope<'a, T> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub input_sha256: Option<&'a str>,
    pub result: T,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Reads and parses an oracle file, returning it with the file's digest.
pub fn load_oracle(path: &Path) -> Result<(BooleanOracle, String), Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Failure::Input(format!("{} is not UTF-8", path.display())))?;
    let oracle = BooleanOracle::parse(text)?;
    Ok((oracle, sha256_hex(&bytes)))
}

/// Sidecar format: a `n k` header, then one basis vector per line.
pub fn answer_file_string(basis: &SubspaceBasis) -> String {
    let mut out = format!("{} {}\n", basis.width(), basis.dim());
    for row in basis.rows() {
        let _ = writeln!(out, "{row}");
    }
    out
}

pub fn parse_answer(text: &str) -> Result<SubspaceBasis, GpkError> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| GpkError::Parse("empty answer file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|e| GpkError::Parse(format!("bad answer header {header:?}: {e}")))?;
    let [n, k] = dims[..] else {
        return Err(GpkError::Parse(format!("answer header must be `n k`, got {header:?}")));
    };
    let rows = lines
        .map(|l| {
            let v: BitVector = l.parse()?;
            if v.width() != n {
                return Err(GpkError::Parse(format!("basis row {l:?} is not {n} bits wide")));
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let basis = SubspaceBasis::span(n, rows);
    if basis.dim() != k {
        return Err(GpkError::Parse(format!(
            "answer declares dimension {k} but its rows span dimension {}",
            basis.dim()
        )));
    }
    Ok(basis)
}

pub fn emit<T: Serialize>(
    command: &str,
    seed: u64,
    input_sha256: Option<&str>,
    result: T,
    format: Format,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let envelope = Envelope {
        tool: "gpk",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed,
        input_sha256,
        result,
    };
    let rendered = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&envelope).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let value = serde_json::to_value(&envelope).expect("reports serialize");
            let mut s = String::new();
            render_text(&mut s, "", &value);
            s
        }
    };
    match out {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(rendered.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Input(format!("cannot write report: {e}")))
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// One `path: value` line per leaf; arrays of scalars stay on one line.
fn render_text(out: &mut String, path: &str, value: &Value) {
    let join = |key: &str| {
        if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                render_text(out, &join(k), v);
            }
        }
        Value::Array(items) if items.iter().all(|v| scalar(v).is_some()) => {
            let parts: Vec<String> = items.iter().filter_map(scalar).collect();
            let _ = writeln!(out, "{path}: [{}]", parts.join(" "));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                render_text(out, &format!("{path}[{i}]"), v);
            }
        }
        leaf => {
            let _ = writeln!(out, "{path}: {}", scalar(leaf).unwrap_or_default());
        }
    }
}
