//! Command-line front end: parameter search, key generation, the
//! encrypt/attack/decrypt pipeline, verification suites, key
//! distribution runs, the key-stream distinguisher, and benchmarks.
//!
//! Every command takes `--seed` and embeds it in its outputs, so runs
//! are byte-reproducible. Exit status: 0 = success or acceptance,
//! 1 = rejection or abort, 2 = usage or malformed input.

mod formats;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde_json::json;

use unclone_core::adversary::{Attack, PartialBasisRule};
use unclone_core::analysis::{
    self, distinguisher, pauli_sweep, repetition_probe_attack, shor_preskill_check,
    KeySourceSpec,
};
use unclone_core::bits::BitString;
use unclone_core::codes::{size_parameters, ProtocolParams, SearchBudget};
use unclone_core::error::Error;
use unclone_core::pauli::PauliString;
use unclone_core::presets;
use unclone_core::protocol::{
    decrypt, encrypt_traced, key_accounting, KeyMaterial, Verdict,
};
use unclone_core::qkd;
use unclone_core::qsim::EngineMode;

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "unclone", version, about = "Uncloneable-encryption simulation laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SeedArg {
    /// Seed for all randomness in this command.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a parameter set and write it to a file.
    Params {
        /// Message length in bits (multiple of s). Ignored with --preset.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Tag width in bits.
        #[arg(long, default_value_t = 2)]
        s: u32,
        /// Channel error rate.
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Amplification margin.
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        /// Largest block length to consider.
        #[arg(long = "max-n", default_value_t = 16)]
        max_n: usize,
        /// Random-search trial budget.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Built-in configuration instead of searching
        /// (trivial4 | hamming74 | nontrivial4 | distinguisher8).
        #[arg(long)]
        preset: Option<String>,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw fresh key material for a parameter set.
    Keygen {
        #[arg(long)]
        params: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt a message into a transmission file.
    Encrypt {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        key: PathBuf,
        /// Message as 0/1 text or HEX:bitlen.
        #[arg(long)]
        message: String,
        /// Engine: auto, exact, or sampled.
        #[arg(long, default_value = "auto")]
        engine: String,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an eavesdropper attack on a transmission file.
    Attack {
        #[arg(long)]
        tx: PathBuf,
        /// identity | steal | ir-z | ir-rand | partial:<t>[:z] |
        /// pauli:<IXYZ string> | copy
        #[arg(long)]
        attack: String,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
        /// Optional JSON file for the eavesdropper's record.
        #[arg(long = "eve-out")]
        eve_out: Option<PathBuf>,
    },
    /// Decrypt a transmission; exit 0 with the message on acceptance.
    Decrypt {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        tx: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Run a verification suite and emit a JSON report.
    Verify {
        /// def1 | def2 | sweep | sp
        #[arg(long)]
        suite: String,
        #[arg(long)]
        params: PathBuf,
        /// Attack for the def2 and sp suites.
        #[arg(long)]
        attack: Option<String>,
        /// Bad-mass tolerance for the sweep suite.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Key distribution; exit 0 on acceptance.
    Qkd {
        /// direct | sifted
        #[arg(long, default_value = "direct")]
        mode: String,
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value = "identity")]
        attack: String,
        /// Qubits transmitted before sifting (sifted mode).
        #[arg(long, default_value_t = 64)]
        transmit: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distinguish a pseudorandom key stream from true randomness using
    /// the built-in demonstration configuration.
    Distinguish {
        /// block:<period> | lfsr16 | random
        #[arg(long)]
        prg: String,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        /// Period of the repetition probe attack (defaults to the block
        /// period, or 3).
        #[arg(long = "attack-period")]
        attack_period: Option<usize>,
        /// Null event rate for the verdict test; calibrated from a
        /// true-random baseline run when omitted.
        #[arg(long)]
        null: Option<f64>,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time representative operations.
    Bench {
        #[command(flatten)]
        seed: SeedArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn rng_from(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn read_file(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Parameter(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text)
        .map_err(|e| Error::Parameter(format!("cannot write {}: {e}", path.display())))
}

fn load_params(path: &Path) -> Result<ProtocolParams, Error> {
    formats::parse_params_file(&read_file(path)?)
}

fn load_key(path: &Path, params: &ProtocolParams) -> Result<KeyMaterial, Error> {
    let contents = formats::parse_key_file(&read_file(path)?)?;
    formats::key_from_contents(&contents, params)
}

fn parse_message(text: &str, n: usize) -> Result<BitString, Error> {
    let bits = if text.contains(':') {
        let (hex, len) = text.rsplit_once(':').unwrap();
        let len: usize = len
            .parse()
            .map_err(|_| Error::Parameter(format!("invalid bit length in '{text}'")))?;
        BitString::from_hex(hex, len)?
    } else {
        BitString::parse_binary(text)?
    };
    if bits.len() != n {
        return Err(Error::Parameter(format!(
            "message has {} bits, parameter set expects {n}",
            bits.len()
        )));
    }
    Ok(bits)
}

fn parse_engine(text: &str) -> Result<EngineMode, Error> {
    match text {
        "auto" => Ok(EngineMode::Auto),
        "exact" => Ok(EngineMode::Exact),
        "sampled" => Ok(EngineMode::Sampled),
        other => Err(Error::Parameter(format!("unknown engine '{other}'"))),
    }
}

fn parse_attack(text: &str, n: usize) -> Result<Attack, Error> {
    match text {
        "identity" => return Ok(Attack::Identity),
        "steal" => return Ok(Attack::Steal),
        "ir-z" => return Ok(Attack::InterceptResendZ),
        "ir-rand" => return Ok(Attack::InterceptResendRandom),
        "copy" => return Ok(Attack::AncillaCopy),
        _ => {}
    }
    if let Some(rest) = text.strip_prefix("partial:") {
        let (count_text, rule) = match rest.split_once(':') {
            Some((c, "z")) => (c, PartialBasisRule::AllZ),
            Some((c, "rand")) => (c, PartialBasisRule::Random),
            Some((_, other)) => {
                return Err(Error::Parameter(format!("unknown partial rule '{other}'")))
            }
            None => (rest, PartialBasisRule::Random),
        };
        let count: usize = count_text
            .parse()
            .map_err(|_| Error::Parameter(format!("invalid qubit count in '{text}'")))?;
        return Ok(Attack::PartialMeasure { count, rule });
    }
    if let Some(letters) = text.strip_prefix("pauli:") {
        let p = PauliString::parse(letters)?;
        if p.len() != n {
            return Err(Error::Parameter(format!(
                "Pauli string has {} letters, parameter set expects {n}",
                p.len()
            )));
        }
        return Ok(Attack::PauliTamper(p));
    }
    Err(Error::Parameter(format!("unknown attack '{text}'")))
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Params { n, s, delta, eta, max_n, trials, preset, seed, out } => {
            let params = match preset.as_deref() {
                Some("trivial4") => presets::trivial4(),
                Some("hamming74") => presets::hamming74_config(),
                Some("nontrivial4") => presets::nontrivial4(),
                Some("distinguisher8") => presets::distinguisher8(),
                Some(other) => {
                    return Err(Error::Parameter(format!("unknown preset '{other}'")))
                }
                None => {
                    let mut rng = rng_from(seed.seed);
                    size_parameters(n, s, delta, eta, max_n, SearchBudget { trials }, &mut rng)?
                }
            };
            write_file(&out, &formats::write_params_file(&params, Some(seed.seed)))?;
            let acc = key_accounting(&params);
            println!(
                "params: n={} s={} N={} K={} K'={} | key bits: core={} basis={} total={}",
                params.n,
                params.s,
                params.big_n(),
                params.k1(),
                params.k2(),
                acc.primary_key_bits,
                acc.basis_bits,
                acc.total_bits
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Keygen { params, seed, out } => {
            let params = load_params(&params)?;
            let mut rng = rng_from(seed.seed);
            let key = KeyMaterial::random(&params, &mut rng);
            write_file(&out, &formats::write_key_file(&key, &params, Some(seed.seed)))?;
            println!("key written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Encrypt { params, key, message, engine, seed, out } => {
            let params = load_params(&params)?;
            let key = load_key(&key, &params)?;
            let message = parse_message(&message, params.n)?;
            let mode = parse_engine(&engine)?;
            let mut rng = rng_from(seed.seed);
            let (tx, _) = encrypt_traced(&message, &key, &params, mode, &mut rng)?;
            write_file(&out, &formats::write_tx_file(&tx, Some(seed.seed)))?;
            println!("transmission written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Attack { tx, attack, seed, out, eve_out } => {
            let tx = formats::parse_tx_file(&read_file(&tx)?)?;
            let attack = parse_attack(&attack, tx.bob_qubits)?;
            let mut rng = rng_from(seed.seed);
            let outcome = unclone_core::adversary::apply_attack(&attack, &tx, &mut rng)?;
            let eve_json = json!({
                "attack": attack.name(),
                "seed": seed.seed,
                "tool_version": TOOL_VERSION,
                "bits": outcome.eve.bits.map(|b| b.to_string()),
                "bases": outcome.eve.bases.map(|b| b.to_string()),
                "kept_quantum_share": outcome.eve.register.is_some(),
                "entangled_qubits": outcome.eve.entangled_qubits,
                "transmission_forwarded": outcome.to_bob.is_some(),
            });
            if let Some(path) = eve_out {
                write_file(&path, &serde_json::to_string_pretty(&eve_json).unwrap())?;
            }
            match outcome.to_bob {
                Some(forwarded) => {
                    write_file(&out, &formats::write_tx_file(&forwarded, Some(seed.seed)))?;
                    println!("attacked transmission written to {}", out.display());
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("transmission stolen; nothing forwarded");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Cmd::Decrypt { params, key, tx, seed } => {
            let params = load_params(&params)?;
            let key = load_key(&key, &params)?;
            let tx = formats::parse_tx_file(&read_file(&tx)?)?;
            if tx.params_digest != params.digest() {
                return Err(Error::Parameter(
                    "transmission was produced under a different parameter set".into(),
                ));
            }
            let mut rng = rng_from(seed.seed);
            let outcome = decrypt(Some(&tx), &key, &params, &mut rng)?;
            match outcome.verdict {
                Verdict::Accept => {
                    let m = outcome.message.unwrap();
                    println!("ACC {m} ({}:{})", m.to_hex(), m.len());
                    Ok(ExitCode::SUCCESS)
                }
                Verdict::Reject => {
                    println!("REJ {:?}", outcome.reject_reason.unwrap());
                    Ok(ExitCode::from(1))
                }
            }
        }
        Cmd::Verify { suite, params, attack, tolerance, seed, out } => {
            let params = load_params(&params)?;
            let mut rng = rng_from(seed.seed);
            let report = match suite.as_str() {
                "def1" => {
                    let (m0, m1) = analysis::canonical_messages(&params);
                    let r = analysis::encryption_error(&params, &m0, &m1, 4096, &mut rng)?;
                    json!({
                        "suite": "def1",
                        "encryption_error": r.distance,
                        "exact": r.exact,
                        "keys_averaged": r.keys_averaged,
                        "config_digest": r.config_digest,
                        "seed": seed.seed,
                        "tool_version": TOOL_VERSION,
                    })
                }
                "def2" => {
                    let attack_text = attack.ok_or_else(|| {
                        Error::Parameter("def2 needs --attack".into())
                    })?;
                    let attack = parse_attack(&attack_text, params.big_n())?;
                    let (m0, m1) = analysis::canonical_messages(&params);
                    let mut r =
                        analysis::uncloneability_scan(&attack, &params, &m0, &m1, &mut rng)?;
                    r.seed = Some(seed.seed);
                    let mut v = serde_json::to_value(&r).unwrap();
                    v["tool_version"] = json!(TOOL_VERSION);
                    v["table_fingerprint"] = json!(format!("{:016X}", r.table_fingerprint()));
                    v
                }
                "sweep" => {
                    let r = pauli_sweep(&params, tolerance)?;
                    let mut v = serde_json::to_value(&r).unwrap();
                    v["seed"] = json!(seed.seed);
                    v["tool_version"] = json!(TOOL_VERSION);
                    v["fingerprint"] = json!(format!("{:016X}", r.fingerprint()));
                    v
                }
                "sp" => {
                    let attack_text = attack.unwrap_or_else(|| "identity".into());
                    let attack = parse_attack(&attack_text, params.big_n())?;
                    let mut r = shor_preskill_check(&attack, &params, &mut rng)?;
                    r.seed = Some(seed.seed);
                    let mut v = serde_json::to_value(&r).unwrap();
                    v["tool_version"] = json!(TOOL_VERSION);
                    v
                }
                other => {
                    return Err(Error::Parameter(format!("unknown suite '{other}'")))
                }
            };
            write_file(&out, &serde_json::to_string_pretty(&report).unwrap())?;
            println!("report written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Qkd { mode, params, attack, transmit, seed, out } => {
            let params = load_params(&params)?;
            let mut rng = rng_from(seed.seed);
            let transcript = match mode.as_str() {
                "direct" => {
                    let attack = parse_attack(&attack, params.big_n())?;
                    qkd::run_direct(&params, &attack, EngineMode::Auto, &mut rng)?
                }
                "sifted" => {
                    let attack = parse_attack(&attack, transmit)?;
                    qkd::run_sifted(transmit, &params, &attack, &mut rng)?
                }
                other => return Err(Error::Parameter(format!("unknown mode '{other}'"))),
            };
            let mut v = serde_json::to_value(&transcript).unwrap();
            v["seed"] = json!(seed.seed);
            v["tool_version"] = json!(TOOL_VERSION);
            v["config_digest"] = json!(format!("{:016X}", params.digest()));
            if let Some(path) = out {
                write_file(&path, &serde_json::to_string_pretty(&v).unwrap())?;
            }
            if transcript.accepted {
                println!("ACC shared key {}", transcript.shared_key.as_deref().unwrap_or(""));
                Ok(ExitCode::SUCCESS)
            } else {
                println!(
                    "REJ{}",
                    transcript
                        .abort_reason
                        .map(|r| format!(" ({r})"))
                        .unwrap_or_default()
                );
                Ok(ExitCode::from(1))
            }
        }
        Cmd::Distinguish { prg, trials, attack_period, null, seed, out } => {
            let params = presets::distinguisher8();
            let mut rng = rng_from(seed.seed);
            let (source, default_period) = match prg.as_str() {
                "lfsr16" => {
                    let lfsr_seed = loop {
                        let s: u16 = rng.gen();
                        if s != 0 {
                            break s;
                        }
                    };
                    (KeySourceSpec::Lfsr16 { seed: lfsr_seed }, 3)
                }
                "random" => (KeySourceSpec::TrueRandom, 3),
                other => {
                    let period = other
                        .strip_prefix("block:")
                        .and_then(|p| p.parse::<usize>().ok())
                        .ok_or_else(|| {
                            Error::Parameter(format!(
                                "--prg must be block:<period>, lfsr16, or random; got '{other}'"
                            ))
                        })?;
                    if period == 0 {
                        return Err(Error::Parameter("block period must be positive".into()));
                    }
                    let block = BitString::random(period, &mut rng);
                    (KeySourceSpec::RepeatingBlock { block }, period)
                }
            };
            let probe = repetition_probe_attack(&params, attack_period.unwrap_or(default_period))?;
            // calibrate the null event rate from a true-random baseline
            let null_rate = match null {
                Some(v) => v,
                None => {
                    let baseline = distinguisher(
                        &probe,
                        KeySourceSpec::TrueRandom,
                        &params,
                        trials,
                        1.0,
                        &mut rng,
                    )?;
                    baseline.ci_high + 1.0 / trials as f64
                }
            };
            let mut report = distinguisher(&probe, source, &params, trials, null_rate, &mut rng)?;
            report.seed = Some(seed.seed);
            let mut v = serde_json::to_value(&report).unwrap();
            v["tool_version"] = json!(TOOL_VERSION);
            write_file(&out, &serde_json::to_string_pretty(&v).unwrap())?;
            println!(
                "{}: events {}/{} (rate {:.4}, null {:.4}) -> {}",
                report.source, report.events, report.trials, report.event_rate, report.null_rate,
                report.verdict
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bench { seed } => {
            bench(seed.seed);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn bench(seed: u64) {
    use std::time::Instant;
    let mut rng = rng_from(seed);

    let field = unclone_core::field::FieldParams::new(8).unwrap();
    let pairs: Vec<_> = (0..100_000)
        .map(|_| {
            (
                field.elem(rng.gen_range(0..256)).unwrap(),
                field.elem(rng.gen_range(0..256)).unwrap(),
            )
        })
        .collect();
    let start = Instant::now();
    let mut acc = 0u64;
    for (a, b) in &pairs {
        acc ^= unclone_core::field::mul(*a, *b).unwrap().value();
    }
    let mul_rate = pairs.len() as f64 / start.elapsed().as_secs_f64();
    println!("field mul (s=8): {mul_rate:.0} ops/s (checksum {acc})");

    let start = Instant::now();
    let params = presets::hamming74_config();
    println!(
        "decode table [7,4]: built in {:?} (distance {})",
        start.elapsed(),
        params.pair().c1().min_distance().unwrap()
    );

    let key = KeyMaterial::random(&params, &mut rng);
    let m = BitString::random(2, &mut rng);
    let start = Instant::now();
    let rounds = 2000;
    for _ in 0..rounds {
        let (tx, _) = encrypt_traced(&m, &key, &params, EngineMode::Sampled, &mut rng).unwrap();
        let out = decrypt(Some(&tx), &key, &params, &mut rng).unwrap();
        assert!(out.accepted());
    }
    let rt_rate = rounds as f64 / start.elapsed().as_secs_f64();
    println!("sampled round trip [7,4]: {rt_rate:.0} runs/s");

    let trivial = presets::trivial4();
    let (m0, m1) = analysis::canonical_messages(&trivial);
    let start = Instant::now();
    let report = analysis::encryption_error(&trivial, &m0, &m1, 0, &mut rng).unwrap();
    println!(
        "secrecy average over {} keys: {:?} (distance {:.2e})",
        report.keys_averaged,
        start.elapsed(),
        report.distance
    );
}
