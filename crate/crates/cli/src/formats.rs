//! Versioned text formats for parameter sets, key files, and
//! transmissions.
//!
//! Bit fields serialize as `<HEX>:<bitlen>` with uppercase hex, the
//! first transmitted position as the most significant bit of the first
//! digit, and the final nibble zero-padded, so leading zeros survive.
//! Matrices are row-major comma-separated hex rows of the block width.
//! Floating-point fields use shortest round-trip decimal text. The
//! digest is the 64-bit FNV-1a hash (offset basis 0xcbf29ce484222325,
//! prime 0x100000001b3) of the parameter set's canonical text.

use std::fmt::Write as _;

use unclone_core::bits::BitString;
use unclone_core::codes::{BinaryLinearCode, NestedCodePair, ProtocolParams};
use unclone_core::error::{Error, Result};
use unclone_core::gf2::BitMatrix;
use unclone_core::protocol::TransmissionDescriptor;
use unclone_core::qsim::{CMat, CVec, Complex64, DensityMatrix, PureState, QuantumRegister, SampledState};

pub const PARAMS_BANNER: &str = "unclone-params v1";
pub const KEY_BANNER: &str = "unclone-key v1";
pub const TX_BANNER: &str = "unclone-tx v1";
pub const TX_WARNING: &str = "SIMULATION ONLY - contains plaintext-equivalent secrets";

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

/// Splits `name=value`, failing with the line content on mismatch.
fn expect_field<'a>(line: &'a str, name: &str) -> Result<&'a str> {
    let (key, value) = line
        .split_once('=')
        .ok_or_else(|| parse_err(format!("expected '{name}=...', got '{line}'")))?;
    if key != name {
        return Err(parse_err(format!("expected field '{name}', got '{key}'")));
    }
    Ok(value)
}

fn write_bits(bits: &BitString) -> String {
    format!("{}:{}", bits.to_hex(), bits.len())
}

fn parse_bits(text: &str) -> Result<BitString> {
    let (hex, len) = text
        .rsplit_once(':')
        .ok_or_else(|| parse_err(format!("bit field '{text}' is missing ':<bitlen>'")))?;
    let len: usize = len
        .parse()
        .map_err(|_| parse_err(format!("invalid bit length in '{text}'")))?;
    BitString::from_hex(hex, len)
}

fn write_matrix(m: &BitMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.n_rows() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&m.row_bits(i).to_hex());
    }
    out
}

fn parse_matrix(text: &str, n_cols: usize) -> Result<BitMatrix> {
    if text.is_empty() {
        return Ok(BitMatrix::zero(0, n_cols));
    }
    let rows = text
        .split(',')
        .map(|hex| BitString::from_hex(hex, n_cols).map(|b| b.word()))
        .collect::<Result<Vec<_>>>()?;
    Ok(BitMatrix::new(rows, n_cols))
}

pub fn write_params_file(params: &ProtocolParams, seed: Option<u64>) -> String {
    let mut out = String::new();
    writeln!(out, "{PARAMS_BANNER}").unwrap();
    writeln!(
        out,
        "n={} s={} N={} K={} K'={}",
        params.n,
        params.s,
        params.big_n(),
        params.k1(),
        params.k2()
    )
    .unwrap();
    writeln!(out, "delta={}", params.delta).unwrap();
    writeln!(out, "eta={}", params.eta).unwrap();
    writeln!(out, "H1={}", write_matrix(params.pair().c1().parity_check())).unwrap();
    writeln!(out, "H2={}", write_matrix(params.pair().c2().parity_check())).unwrap();
    writeln!(out, "L={}", write_matrix(params.pair().label_matrix())).unwrap();
    writeln!(out, "distances_verified={}", params.distances_verified()).unwrap();
    writeln!(out, "digest={:016X}", params.digest()).unwrap();
    if let Some(seed) = seed {
        writeln!(out, "seed={seed}").unwrap();
    }
    out
}

pub fn parse_params_file(text: &str) -> Result<ProtocolParams> {
    let mut lines = text.lines();
    let banner = lines.next().ok_or_else(|| parse_err("empty parameter file"))?;
    if banner != PARAMS_BANNER {
        return Err(parse_err(format!("unrecognized banner '{banner}'")));
    }
    let sizing = lines.next().ok_or_else(|| parse_err("missing sizing line"))?;
    let mut n = None;
    let mut s = None;
    let mut big_n = None;
    for part in sizing.split_whitespace() {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| parse_err(format!("bad sizing entry '{part}'")))?;
        let value: usize = value
            .parse()
            .map_err(|_| parse_err(format!("bad number in '{part}'")))?;
        match key {
            "n" => n = Some(value),
            "s" => s = Some(value),
            "N" => big_n = Some(value),
            "K" | "K'" => {}
            other => return Err(parse_err(format!("unknown sizing field '{other}'"))),
        }
    }
    let (n, s, big_n) = match (n, s, big_n) {
        (Some(n), Some(s), Some(b)) => (n, s, b),
        _ => return Err(parse_err("sizing line must carry n, s, and N")),
    };
    let delta: f64 = expect_field(lines.next().unwrap_or(""), "delta")?
        .parse()
        .map_err(|_| parse_err("invalid delta"))?;
    let eta: f64 = expect_field(lines.next().unwrap_or(""), "eta")?
        .parse()
        .map_err(|_| parse_err("invalid eta"))?;
    let h1 = parse_matrix(expect_field(lines.next().unwrap_or(""), "H1")?, big_n)?;
    let h2 = parse_matrix(expect_field(lines.next().unwrap_or(""), "H2")?, big_n)?;
    let label = parse_matrix(expect_field(lines.next().unwrap_or(""), "L")?, big_n)?;
    let _verified = expect_field(lines.next().unwrap_or(""), "distances_verified")?;
    let digest_text = expect_field(lines.next().unwrap_or(""), "digest")?;
    let c1 = BinaryLinearCode::from_parity_check(h1)?;
    let c2 = BinaryLinearCode::from_parity_check(h2)?;
    let pair = NestedCodePair::with_label_matrix(c1, c2, label)?;
    let params = ProtocolParams::new(n, s as u32, delta, eta, pair)?;
    let expected = format!("{:016X}", params.digest());
    if digest_text != expected {
        return Err(parse_err(format!(
            "digest mismatch: file says {digest_text}, reconstruction gives {expected}"
        )));
    }
    Ok(params)
}

pub struct KeyFileContents {
    pub params_digest: u64,
    pub k_bits: BitString,
    pub e: BitString,
    pub c1: BitString,
    pub b: BitString,
}

pub fn write_key_file(
    key: &unclone_core::protocol::KeyMaterial,
    params: &ProtocolParams,
    seed: Option<u64>,
) -> String {
    let s = params.s as usize;
    let k_bits = BitString::from_word(key.k.value() as u128, s);
    let mut out = String::new();
    writeln!(out, "{KEY_BANNER}").unwrap();
    writeln!(out, "params_digest={:016X}", params.digest()).unwrap();
    writeln!(out, "k={}", write_bits(&k_bits)).unwrap();
    writeln!(out, "e={}", write_bits(&key.e)).unwrap();
    writeln!(out, "c1={}", write_bits(&key.c1)).unwrap();
    writeln!(out, "b={}", write_bits(&key.b)).unwrap();
    if let Some(seed) = seed {
        writeln!(out, "seed={seed}").unwrap();
    }
    out
}

pub fn parse_key_file(text: &str) -> Result<KeyFileContents> {
    let mut lines = text.lines();
    let banner = lines.next().ok_or_else(|| parse_err("empty key file"))?;
    if banner != KEY_BANNER {
        return Err(parse_err(format!("unrecognized banner '{banner}'")));
    }
    let digest_text = expect_field(lines.next().unwrap_or(""), "params_digest")?;
    let params_digest = u64::from_str_radix(digest_text, 16)
        .map_err(|_| parse_err("invalid params digest"))?;
    let k_bits = parse_bits(expect_field(lines.next().unwrap_or(""), "k")?)?;
    let e = parse_bits(expect_field(lines.next().unwrap_or(""), "e")?)?;
    let c1 = parse_bits(expect_field(lines.next().unwrap_or(""), "c1")?)?;
    let b = parse_bits(expect_field(lines.next().unwrap_or(""), "b")?)?;
    Ok(KeyFileContents { params_digest, k_bits, e, c1, b })
}

pub fn key_from_contents(
    contents: &KeyFileContents,
    params: &ProtocolParams,
) -> Result<unclone_core::protocol::KeyMaterial> {
    if contents.params_digest != params.digest() {
        return Err(parse_err(
            "key file was generated for a different parameter set",
        ));
    }
    let field = params.field();
    let k = field.elem(contents.k_bits.word() as u64)?;
    unclone_core::protocol::KeyMaterial::new(k, contents.e, contents.c1, contents.b, params)
}

fn write_complex_lines(out: &mut String, values: impl Iterator<Item = Complex64>) {
    for v in values {
        writeln!(out, "{} {}", v.re, v.im).unwrap();
    }
}

fn parse_complex_line(line: &str) -> Result<Complex64> {
    let mut parts = line.split_whitespace();
    let re: f64 = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(format!("bad amplitude line '{line}'")))?;
    let im: f64 = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(format!("bad amplitude line '{line}'")))?;
    Ok(Complex64::new(re, im))
}

pub fn write_tx_file(tx: &TransmissionDescriptor, seed: Option<u64>) -> String {
    let mut out = String::new();
    writeln!(out, "{TX_BANNER}").unwrap();
    writeln!(out, "banner={TX_WARNING}").unwrap();
    writeln!(out, "params_digest={:016X}", tx.params_digest).unwrap();
    writeln!(out, "bob_qubits={}", tx.bob_qubits).unwrap();
    if let Some(seed) = seed {
        writeln!(out, "seed={seed}").unwrap();
    }
    match &tx.register {
        QuantumRegister::Sampled(s) => {
            let (values, frames) = s.records();
            writeln!(out, "engine=sampled").unwrap();
            writeln!(out, "z={}", write_bits(&values)).unwrap();
            writeln!(out, "basis={}", write_bits(&frames)).unwrap();
        }
        QuantumRegister::Pure(p) => {
            writeln!(out, "engine=exact-pure").unwrap();
            writeln!(out, "qubits={}", p.n_qubits()).unwrap();
            writeln!(out, "amps={}", p.amps().len()).unwrap();
            write_complex_lines(&mut out, p.amps().iter().copied());
        }
        QuantumRegister::Density(d) => {
            writeln!(out, "engine=exact-density").unwrap();
            writeln!(out, "qubits={}", d.n_qubits()).unwrap();
            writeln!(out, "dim={}", d.dim()).unwrap();
            // row-major
            let dim = d.dim();
            write_complex_lines(
                &mut out,
                (0..dim * dim).map(|i| d.matrix()[(i / dim, i % dim)]),
            );
        }
    }
    out
}

pub fn parse_tx_file(text: &str) -> Result<TransmissionDescriptor> {
    let mut lines = text.lines();
    let banner = lines.next().ok_or_else(|| parse_err("empty transmission file"))?;
    if banner != TX_BANNER {
        return Err(parse_err(format!("unrecognized banner '{banner}'")));
    }
    let _warning = expect_field(lines.next().unwrap_or(""), "banner")?;
    let digest_text = expect_field(lines.next().unwrap_or(""), "params_digest")?;
    let params_digest = u64::from_str_radix(digest_text, 16)
        .map_err(|_| parse_err("invalid params digest"))?;
    let bob_qubits: usize = expect_field(lines.next().unwrap_or(""), "bob_qubits")?
        .parse()
        .map_err(|_| parse_err("invalid qubit count"))?;
    let mut line = lines.next().unwrap_or("");
    if line.starts_with("seed=") {
        line = lines.next().unwrap_or("");
    }
    let engine = expect_field(line, "engine")?;
    let register = match engine {
        "sampled" => {
            let z = parse_bits(expect_field(lines.next().unwrap_or(""), "z")?)?;
            let basis = parse_bits(expect_field(lines.next().unwrap_or(""), "basis")?)?;
            QuantumRegister::Sampled(SampledState::prepare(&z, &basis)?)
        }
        "exact-pure" => {
            let qubits: usize = expect_field(lines.next().unwrap_or(""), "qubits")?
                .parse()
                .map_err(|_| parse_err("invalid qubit count"))?;
            let count: usize = expect_field(lines.next().unwrap_or(""), "amps")?
                .parse()
                .map_err(|_| parse_err("invalid amplitude count"))?;
            if count != 1 << qubits {
                return Err(parse_err("amplitude count does not match qubit count"));
            }
            let mut amps = CVec::zeros(count);
            for i in 0..count {
                let line = lines
                    .next()
                    .ok_or_else(|| parse_err(format!("missing amplitude line {i}")))?;
                amps[i] = parse_complex_line(line)?;
            }
            QuantumRegister::Pure(PureState::new(qubits, amps)?)
        }
        "exact-density" => {
            let qubits: usize = expect_field(lines.next().unwrap_or(""), "qubits")?
                .parse()
                .map_err(|_| parse_err("invalid qubit count"))?;
            let dim: usize = expect_field(lines.next().unwrap_or(""), "dim")?
                .parse()
                .map_err(|_| parse_err("invalid dimension"))?;
            if dim != 1 << qubits {
                return Err(parse_err("dimension does not match qubit count"));
            }
            let mut m = CMat::zeros(dim, dim);
            for i in 0..dim * dim {
                let line = lines
                    .next()
                    .ok_or_else(|| parse_err(format!("missing matrix line {i}")))?;
                m[(i / dim, i % dim)] = parse_complex_line(line)?;
            }
            QuantumRegister::Density(DensityMatrix::new(qubits, m)?)
        }
        other => return Err(parse_err(format!("unknown engine '{other}'"))),
    };
    Ok(TransmissionDescriptor { register, bob_qubits, params_digest })
}
