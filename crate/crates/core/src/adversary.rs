//! Eavesdropper attack models.
//!
//! Every attack consumes a transmission and produces what travels on to
//! the receiver plus whatever the eavesdropper keeps. Attacks come in
//! two faces: an operational form ([`apply_attack`]) that acts on any
//! engine by sampling, and an exact channel form ([`attack_kraus`]) used
//! by the definition estimators, where the eavesdropper's share appears
//! as ancilla qubits adjoined above the receiver's.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::protocol::TransmissionDescriptor;
use crate::qsim::{self, CMat, EngineMode, PureState, QuantumRegister};
use num_complex::Complex64;
use rand::Rng;

/// Basis rule for partial measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialBasisRule {
    AllZ,
    Random,
}

/// A user-supplied channel as Kraus operators mapping the N transmitted
/// qubits into N + eve_qubits, with the eavesdropper keeping the top
/// ancillas. Exact engine only.
#[derive(Debug, Clone)]
pub struct KrausAttack {
    pub ops: Vec<CMat>,
    pub eve_qubits: usize,
    pub label: String,
}

#[derive(Debug, Clone)]
pub enum Attack {
    /// Pass the transmission through untouched.
    Identity,
    /// Keep everything; the receiver gets nothing.
    Steal,
    /// Measure every qubit in the Z basis and resend the outcome in Z.
    InterceptResendZ,
    /// Measure each qubit in a fresh random basis and resend in it.
    InterceptResendRandom,
    /// Measure only the first `count` qubits, bases per the rule.
    PartialMeasure { count: usize, rule: PartialBasisRule },
    /// Apply a fixed Pauli string.
    PauliTamper(PauliString),
    /// Adjoin zeroed ancillas and copy each qubit into them in the Z
    /// frame; a perfect clone of any all-Z-basis transmission.
    AncillaCopy,
    /// Arbitrary Kraus-style superoperator.
    Kraus(KrausAttack),
}

impl Attack {
    /// Whether the attack can run on a sampled-engine register.
    pub fn supports_sampled(&self) -> bool {
        !matches!(self, Attack::AncillaCopy | Attack::Kraus(_))
    }

    pub fn name(&self) -> String {
        match self {
            Attack::Identity => "identity".into(),
            Attack::Steal => "steal".into(),
            Attack::InterceptResendZ => "ir-z".into(),
            Attack::InterceptResendRandom => "ir-rand".into(),
            Attack::PartialMeasure { count, rule } => match rule {
                PartialBasisRule::AllZ => format!("partial:{count}:z"),
                PartialBasisRule::Random => format!("partial:{count}:rand"),
            },
            Attack::PauliTamper(p) => format!("pauli:{p}"),
            Attack::AncillaCopy => "copy".into(),
            Attack::Kraus(k) => format!("kraus:{}", k.label),
        }
    }
}

/// What the eavesdropper walks away with.
#[derive(Debug, Clone, Default)]
pub struct EveRecord {
    /// Measured bit values, if any.
    pub bits: Option<BitString>,
    /// Bases used for those measurements, if any.
    pub bases: Option<BitString>,
    /// A retained quantum share (the whole state for Steal; for
    /// entangling attacks the share lives inside the forwarded joint
    /// register instead).
    pub register: Option<QuantumRegister>,
    /// Ancilla count adjoined above the receiver share by an entangling
    /// attack.
    pub entangled_qubits: usize,
}

#[derive(Debug, Clone)]
pub struct AttackOutcome {
    /// What Bob receives; `None` means the transmission was stolen.
    pub to_bob: Option<TransmissionDescriptor>,
    pub eve: EveRecord,
}

/// Runs an attack operationally. Measurement-based attacks consume
/// randomness from `rng`; entangling attacks require an exact register.
pub fn apply_attack<R: Rng + ?Sized>(
    attack: &Attack,
    tx: &TransmissionDescriptor,
    rng: &mut R,
) -> Result<AttackOutcome> {
    let n = tx.bob_qubits;
    if tx.register.n_qubits() != n {
        return Err(Error::parameter("attacks apply to unattacked transmissions"));
    }
    if tx.register.is_sampled() && !attack.supports_sampled() {
        return Err(Error::capability(format!(
            "attack {} needs the exact engine",
            attack.name()
        )));
    }
    match attack {
        Attack::Identity => Ok(AttackOutcome { to_bob: Some(tx.clone()), eve: EveRecord::default() }),
        Attack::Steal => Ok(AttackOutcome {
            to_bob: None,
            eve: EveRecord { register: Some(tx.register.clone()), ..EveRecord::default() },
        }),
        Attack::InterceptResendZ => {
            let bases = BitString::zeros(n);
            intercept_resend(tx, &bases, rng)
        }
        Attack::InterceptResendRandom => {
            let bases = BitString::random(n, rng);
            intercept_resend(tx, &bases, rng)
        }
        Attack::PartialMeasure { count, rule } => {
            if *count > n {
                return Err(Error::parameter("partial measurement count exceeds qubit count"));
            }
            let bases = match rule {
                PartialBasisRule::AllZ => BitString::zeros(*count),
                PartialBasisRule::Random => BitString::random(*count, rng),
            };
            partial_measure(tx, &bases, rng)
        }
        Attack::PauliTamper(p) => {
            if p.len() != n {
                return Err(Error::parameter("Pauli string length does not match N"));
            }
            let register = qsim::apply_pauli(&tx.register, p)?;
            Ok(AttackOutcome {
                to_bob: Some(TransmissionDescriptor { register, ..tx.clone() }),
                eve: EveRecord::default(),
            })
        }
        Attack::AncillaCopy => ancilla_copy(tx),
        Attack::Kraus(k) => kraus_attack(tx, k),
    }
}

fn intercept_resend<R: Rng + ?Sized>(
    tx: &TransmissionDescriptor,
    bases: &BitString,
    rng: &mut R,
) -> Result<AttackOutcome> {
    let (bits, _) = qsim::measure_in_bases(&tx.register, bases, rng)?;
    let mode = if tx.register.is_sampled() { EngineMode::Sampled } else { EngineMode::Exact };
    let resent = qsim::prepare(&bits, bases, mode)?;
    Ok(AttackOutcome {
        to_bob: Some(TransmissionDescriptor { register: resent, ..tx.clone() }),
        eve: EveRecord { bits: Some(bits), bases: Some(*bases), ..EveRecord::default() },
    })
}

fn partial_measure<R: Rng + ?Sized>(
    tx: &TransmissionDescriptor,
    bases: &BitString,
    rng: &mut R,
) -> Result<AttackOutcome> {
    let t = bases.len();
    let n = tx.bob_qubits;
    match &tx.register {
        QuantumRegister::Pure(s) => {
            let (bits, rest) = s.measure_prefix(t, bases, rng)?;
            let resent = match qsim::prepare(&bits, bases, EngineMode::Exact)? {
                QuantumRegister::Pure(p) => p,
                _ => unreachable!(),
            };
            let joined = tensor_pure(&resent, &rest)?;
            Ok(AttackOutcome {
                to_bob: Some(TransmissionDescriptor {
                    register: QuantumRegister::Pure(joined),
                    ..tx.clone()
                }),
                eve: EveRecord { bits: Some(bits), bases: Some(*bases), ..EveRecord::default() },
            })
        }
        QuantumRegister::Sampled(s) => {
            // measure the prefix qubit by qubit; the rest pass untouched
            let mut full_bases = *bases;
            let (values, frames) = s.records();
            for q in t..n {
                full_bases = full_bases.concat(&BitString::from_bits(&[frames.get(q)]));
            }
            let (out, post) = s.measure(&full_bases, rng)?;
            let _ = values;
            let bits = out.slice(0, t);
            Ok(AttackOutcome {
                to_bob: Some(TransmissionDescriptor {
                    register: QuantumRegister::Sampled(post),
                    ..tx.clone()
                }),
                eve: EveRecord { bits: Some(bits), bases: Some(*bases), ..EveRecord::default() },
            })
        }
        QuantumRegister::Density(_) => {
            let (kraus, eve_qubits) = partial_measure_kraus(n, bases)?;
            apply_kraus_to_tx(tx, &kraus, eve_qubits, "partial")
        }
    }
}

fn ancilla_copy(tx: &TransmissionDescriptor) -> Result<AttackOutcome> {
    let n = tx.bob_qubits;
    match &tx.register {
        QuantumRegister::Pure(s) => {
            // |z> -> |z>|z>: ancillas adjoined above, CNOT per qubit in
            // the Z frame
            let dim = 1usize << n;
            let mut amps = crate::qsim::CVec::zeros(dim * dim);
            for z in 0..dim {
                amps[z | (z << n)] = s.amps()[z];
            }
            let joint = PureState::new(2 * n, amps)?;
            Ok(AttackOutcome {
                to_bob: Some(TransmissionDescriptor {
                    register: QuantumRegister::Pure(joint),
                    ..tx.clone()
                }),
                eve: EveRecord { entangled_qubits: n, ..EveRecord::default() },
            })
        }
        QuantumRegister::Density(_) => {
            let (kraus, eve_qubits) = ancilla_copy_kraus(n);
            apply_kraus_to_tx(tx, &kraus, eve_qubits, "copy")
        }
        QuantumRegister::Sampled(_) => Err(Error::capability("entangling attack on the sampled engine")),
    }
}

fn kraus_attack(tx: &TransmissionDescriptor, k: &KrausAttack) -> Result<AttackOutcome> {
    let n = tx.bob_qubits;
    let din = 1usize << n;
    let dout = 1usize << (n + k.eve_qubits);
    for op in &k.ops {
        if op.ncols() != din || op.nrows() != dout {
            return Err(Error::parameter(
                "Kraus operators must map the N qubits into N + eve ancillas",
            ));
        }
    }
    // single isometric Kraus operator keeps a pure state pure
    if k.ops.len() == 1 {
        if let QuantumRegister::Pure(s) = &tx.register {
            let out = &k.ops[0] * s.amps();
            let joint = PureState::new(n + k.eve_qubits, out)?;
            return Ok(AttackOutcome {
                to_bob: Some(TransmissionDescriptor {
                    register: QuantumRegister::Pure(joint),
                    ..tx.clone()
                }),
                eve: EveRecord { entangled_qubits: k.eve_qubits, ..EveRecord::default() },
            });
        }
    }
    apply_kraus_to_tx(tx, &k.ops, k.eve_qubits, &k.label)
}

fn apply_kraus_to_tx(
    tx: &TransmissionDescriptor,
    kraus: &[CMat],
    eve_qubits: usize,
    _label: &str,
) -> Result<AttackOutcome> {
    let rho = tx.register.as_density()?;
    let out = rho.apply_kraus(kraus)?;
    Ok(AttackOutcome {
        to_bob: Some(TransmissionDescriptor {
            register: QuantumRegister::Density(out),
            ..tx.clone()
        }),
        eve: EveRecord { entangled_qubits: eve_qubits, ..EveRecord::default() },
    })
}

fn tensor_pure(low: &PureState, high: &PureState) -> Result<PureState> {
    let nl = low.n_qubits();
    let nh = high.n_qubits();
    let mut amps = crate::qsim::CVec::zeros(1 << (nl + nh));
    for i in 0..1usize << nl {
        for j in 0..1usize << nh {
            amps[i | (j << nl)] = low.amps()[i] * high.amps()[j];
        }
    }
    PureState::new(nl + nh, amps)
}

/// Exact channel form: Kraus operators over N + eve qubits, or `None`
/// for Steal (nothing reaches the receiver). Randomized attacks draw
/// their choices from `rng` once, so the returned channel is fixed.
pub fn attack_kraus<R: Rng + ?Sized>(
    attack: &Attack,
    n: usize,
    rng: &mut R,
) -> Result<Option<(Vec<CMat>, usize)>> {
    let din = 1usize << n;
    match attack {
        Attack::Steal => Ok(None),
        Attack::Identity => Ok(Some((vec![CMat::identity(din, din)], 0))),
        Attack::PauliTamper(p) => {
            if p.len() != n {
                return Err(Error::parameter("Pauli string length does not match N"));
            }
            Ok(Some((vec![qsim::pauli_unitary(p)], 0)))
        }
        Attack::InterceptResendZ => Ok(Some(intercept_resend_kraus(n, &BitString::zeros(n))?)),
        Attack::InterceptResendRandom => {
            let bases = BitString::random(n, rng);
            Ok(Some(intercept_resend_kraus(n, &bases)?))
        }
        Attack::PartialMeasure { count, rule } => {
            let bases = match rule {
                PartialBasisRule::AllZ => BitString::zeros(*count),
                PartialBasisRule::Random => BitString::random(*count, rng),
            };
            Ok(Some(partial_measure_kraus(n, &bases)?))
        }
        Attack::AncillaCopy => Ok(Some(ancilla_copy_kraus(n))),
        Attack::Kraus(k) => Ok(Some((k.ops.clone(), k.eve_qubits))),
    }
}

/// K_z = |phi_z><phi_z| (x) |z>_E where phi_z is the basis state of the
/// measurement frame; the eavesdropper keeps a full classical copy of
/// her outcome in N ancillas.
fn intercept_resend_kraus(n: usize, bases: &BitString) -> Result<(Vec<CMat>, usize)> {
    let din = 1usize << n;
    let dout = din * din;
    let mut ops = Vec::with_capacity(din);
    for z in 0..din {
        let z_bits = BitString::from_word(z as u128, n);
        let phi = match qsim::prepare(&z_bits, bases, EngineMode::Exact)? {
            QuantumRegister::Pure(p) => p,
            _ => unreachable!(),
        };
        let mut k = CMat::zeros(dout, din);
        for row in 0..din {
            let out_idx = row | (z << n);
            for col in 0..din {
                k[(out_idx, col)] = phi.amps()[row] * phi.amps()[col].conj();
            }
        }
        ops.push(k);
    }
    Ok((ops, n))
}

/// Projective measurement of the first `t` qubits, outcome copied into t
/// ancillas; unmeasured qubits pass through.
fn partial_measure_kraus(n: usize, bases: &BitString) -> Result<(Vec<CMat>, usize)> {
    let t = bases.len();
    let din = 1usize << n;
    let dout = din << t;
    let prefix_dim = 1usize << t;
    let mut ops = Vec::with_capacity(prefix_dim);
    for w in 0..prefix_dim {
        let w_bits = BitString::from_word(w as u128, t);
        let phi = match qsim::prepare(&w_bits, bases, EngineMode::Exact)? {
            QuantumRegister::Pure(p) => p,
            _ => unreachable!(),
        };
        let mut k = CMat::zeros(dout, din);
        for rest in 0..1usize << (n - t) {
            for row_pre in 0..prefix_dim {
                let out_idx = (row_pre | (rest << t)) | (w << n);
                for col_pre in 0..prefix_dim {
                    let col = col_pre | (rest << t);
                    k[(out_idx, col)] = phi.amps()[row_pre] * phi.amps()[col_pre].conj();
                }
            }
        }
        ops.push(k);
    }
    Ok((ops, t))
}

/// The copy isometry |z> -> |z>|z>.
fn ancilla_copy_kraus(n: usize) -> (Vec<CMat>, usize) {
    let din = 1usize << n;
    let mut v = CMat::zeros(din * din, din);
    for z in 0..din {
        v[(z | (z << n), z)] = Complex64::new(1.0, 0.0);
    }
    (vec![v], n)
}

/// Seeded random isometry attack: a dense random unitary over
/// n + eve_qubits restricted to zeroed ancilla input. Drawing many of
/// these gives an adversarial battery with no special structure.
pub fn random_isometry_attack<R: Rng + ?Sized>(n: usize, eve_qubits: usize, rng: &mut R, label: String) -> KrausAttack {
    let dim = 1usize << (n + eve_qubits);
    let gauss = |rng: &mut R| {
        // Box-Muller
        let u1: f64 = rng.gen::<f64>().max(1e-12);
        let u2: f64 = rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        Complex64::new(
            r * (2.0 * std::f64::consts::PI * u2).cos(),
            r * (2.0 * std::f64::consts::PI * u2).sin(),
        )
    };
    let m = CMat::from_fn(dim, dim, |_, _| gauss(rng));
    let q = m.qr().q();
    // columns with zeroed ancillas: input index = receiver index
    let din = 1usize << n;
    let mut v = CMat::zeros(dim, din);
    for col in 0..din {
        for row in 0..dim {
            v[(row, col)] = q[(row, col)];
        }
    }
    KrausAttack { ops: vec![v], eve_qubits, label }
}

/// The fixed attack battery used by the certification suites; random
/// draws inside individual attacks still come from the caller's rng.
pub fn standard_battery(n: usize) -> Vec<Attack> {
    let mut battery = vec![
        Attack::Identity,
        Attack::Steal,
        Attack::InterceptResendZ,
        Attack::InterceptResendRandom,
        Attack::PartialMeasure { count: 1, rule: PartialBasisRule::AllZ },
        Attack::PartialMeasure { count: (n / 2).max(1), rule: PartialBasisRule::Random },
        Attack::AncillaCopy,
    ];
    let mut flip_all = vec![crate::pauli::PauliOp::X; n];
    flip_all[n - 1] = crate::pauli::PauliOp::Z;
    battery.push(Attack::PauliTamper(PauliString::new(flip_all)));
    battery.push(Attack::PauliTamper(PauliString::single(
        n,
        0,
        crate::pauli::PauliOp::Y,
    )));
    battery
}
