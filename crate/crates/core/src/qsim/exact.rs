//! Exact complex-amplitude engine: pure states and density matrices.
//!
//! Basis convention: the computational index carries qubit `j` in bit
//! `j`, so a [`crate::bits::BitString`] word is directly a basis index.
//! Capped at 10 qubits; density matrices are then 1024 x 1024 and every
//! definition-level check still finishes in seconds.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::pauli::{PauliOp, PauliString};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub const MAX_EXACT_QUBITS: usize = 10;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub type CVec = DVector<Complex64>;
pub type CMat = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: CVec,
}

impl PureState {
    pub fn new(n_qubits: usize, amps: CVec) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::parameter(format!(
                "amplitude vector length {} is not 2^{n_qubits}",
                amps.len()
            )));
        }
        let state = PureState { n_qubits, amps };
        state.check_norm()?;
        Ok(state)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = CVec::zeros(1 << n_qubits);
        amps[index] = Complex64::new(1.0, 0.0);
        PureState { n_qubits, amps }
    }

    fn check_norm(&self) -> Result<()> {
        let norm2: f64 = self.amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::invariant(format!(
                "pure state squared norm {norm2} deviates from 1"
            )));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amps(&self) -> &CVec {
        &self.amps
    }

    pub fn into_amps(self) -> CVec {
        self.amps
    }

    /// In-place Hadamard on one qubit.
    pub fn hadamard(&mut self, qubit: usize) {
        hadamard_in_place(&mut self.amps, qubit);
    }

    /// Hadamards on every qubit where `pattern` is 1.
    pub fn hadamard_pattern(&mut self, pattern: &BitString) -> Result<()> {
        if pattern.len() != self.n_qubits {
            return Err(Error::parameter("Hadamard pattern length mismatch"));
        }
        for q in 0..self.n_qubits {
            if pattern.get(q) {
                hadamard_in_place(&mut self.amps, q);
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, pauli: &PauliString) -> Result<()> {
        if pauli.len() != self.n_qubits {
            return Err(Error::parameter("Pauli string length mismatch"));
        }
        for q in 0..self.n_qubits {
            apply_single_pauli(&mut self.amps, q, pauli.op(q));
        }
        Ok(())
    }

    pub fn to_density(&self) -> DensityMatrix {
        let d = self.amps.len();
        let mut rho = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                rho[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityMatrix { n_qubits: self.n_qubits, rho }
    }

    /// Adjoins `extra` qubits in |0> above the current ones.
    pub fn adjoin_zero_qubits(&self, extra: usize) -> Result<PureState> {
        if self.n_qubits + extra > 2 * MAX_EXACT_QUBITS {
            return Err(Error::capability("joint register too large"));
        }
        let mut amps = CVec::zeros(1 << (self.n_qubits + extra));
        for i in 0..self.amps.len() {
            amps[i] = self.amps[i];
        }
        Ok(PureState { n_qubits: self.n_qubits + extra, amps })
    }

    /// Born probabilities of full computational outcomes after rotating
    /// by Hadamards on the 1-positions of `bases`.
    pub fn outcome_distribution(&self, bases: &BitString) -> Result<Vec<f64>> {
        let mut rotated = self.clone();
        rotated.hadamard_pattern(bases)?;
        Ok(rotated.amps.iter().map(|a| a.norm_sqr()).collect())
    }

    /// Measures the first `n_prefix` qubits in the given bases; returns
    /// the outcome and the collapsed remainder over the other qubits.
    pub fn measure_prefix<R: Rng + ?Sized>(
        &self,
        n_prefix: usize,
        bases: &BitString,
        rng: &mut R,
    ) -> Result<(BitString, PureState)> {
        if bases.len() != n_prefix || n_prefix > self.n_qubits {
            return Err(Error::parameter("prefix measurement shape mismatch"));
        }
        let mut rotated = self.clone();
        for q in 0..n_prefix {
            if bases.get(q) {
                hadamard_in_place(&mut rotated.amps, q);
            }
        }
        let n_rest = self.n_qubits - n_prefix;
        let prefix_dim = 1usize << n_prefix;
        let rest_dim = 1usize << n_rest;
        // cumulative sampling over prefix outcomes
        let mut probs = vec![0.0f64; prefix_dim];
        for z in 0..prefix_dim {
            for e in 0..rest_dim {
                probs[z] += rotated.amps[z | (e << n_prefix)].norm_sqr();
            }
        }
        let draw: f64 = rng.gen();
        let mut acc = 0.0;
        let mut outcome = prefix_dim - 1;
        for (z, p) in probs.iter().enumerate() {
            acc += p;
            if draw < acc {
                outcome = z;
                break;
            }
        }
        let p = probs[outcome].max(f64::MIN_POSITIVE);
        let scale = Complex64::new(1.0 / p.sqrt(), 0.0);
        let mut rest = CVec::zeros(rest_dim);
        for e in 0..rest_dim {
            rest[e] = rotated.amps[outcome | (e << n_prefix)] * scale;
        }
        Ok((
            BitString::from_word(outcome as u128, n_prefix),
            PureState { n_qubits: n_rest, amps: rest },
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    rho: CMat,
}

impl DensityMatrix {
    pub fn new(n_qubits: usize, rho: CMat) -> Result<Self> {
        if rho.nrows() != 1 << n_qubits || rho.ncols() != 1 << n_qubits {
            return Err(Error::parameter("density matrix dimension is not 2^n x 2^n"));
        }
        let dm = DensityMatrix { n_qubits, rho };
        dm.validate()?;
        Ok(dm)
    }

    /// Skips validation; for internal construction of states known valid.
    pub(crate) fn new_unchecked(n_qubits: usize, rho: CMat) -> Self {
        DensityMatrix { n_qubits, rho }
    }

    pub fn validate(&self) -> Result<()> {
        let tr: Complex64 = self.rho.diagonal().iter().sum();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::invariant(format!("density trace {tr} deviates from 1")));
        }
        let d = self.rho.nrows();
        for i in 0..d {
            for j in i..d {
                let delta = self.rho[(i, j)] - self.rho[(j, i)].conj();
                if delta.norm() > 1e-10 {
                    return Err(Error::invariant("density matrix is not Hermitian"));
                }
            }
        }
        let eigs = hermitian_eigenvalues(&self.rho);
        if eigs.iter().any(|&e| e < -1e-9) {
            return Err(Error::invariant("density matrix has a negative eigenvalue"));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.rho
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        let rho = CMat::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0);
        DensityMatrix { n_qubits, rho }
    }

    /// Average of a family of density matrices with equal weights.
    pub fn average(parts: &[DensityMatrix]) -> Result<DensityMatrix> {
        let first = parts
            .first()
            .ok_or_else(|| Error::parameter("empty density average"))?;
        let mut acc = CMat::zeros(first.dim(), first.dim());
        for p in parts {
            if p.dim() != first.dim() {
                return Err(Error::parameter("density dimensions differ in average"));
            }
            acc += &p.rho;
        }
        acc /= Complex64::new(parts.len() as f64, 0.0);
        Ok(DensityMatrix { n_qubits: first.n_qubits, rho: acc })
    }

    pub fn hadamard_pattern(&mut self, pattern: &BitString) -> Result<()> {
        if pattern.len() != self.n_qubits {
            return Err(Error::parameter("Hadamard pattern length mismatch"));
        }
        for q in 0..self.n_qubits {
            if pattern.get(q) {
                // rows, then columns (conjugate side)
                for col in column_views(&mut self.rho) {
                    hadamard_slice(col, q);
                }
                self.rho = self.rho.adjoint();
                for col in column_views(&mut self.rho) {
                    hadamard_slice(col, q);
                }
                self.rho = self.rho.adjoint();
            }
        }
        self.rehermitize();
        Ok(())
    }

    pub fn apply_pauli(&mut self, pauli: &PauliString) -> Result<()> {
        if pauli.len() != self.n_qubits {
            return Err(Error::parameter("Pauli string length mismatch"));
        }
        for q in 0..self.n_qubits {
            if pauli.op(q) != PauliOp::I {
                conjugate_single_pauli(&mut self.rho, q, pauli.op(q));
            }
        }
        self.rehermitize();
        Ok(())
    }

    /// Exact per-qubit Pauli mixing channel.
    pub fn apply_pauli_channel(&mut self, px: f64, py: f64, pz: f64) {
        let d = self.dim();
        for q in 0..self.n_qubits {
            let pi = 1.0 - px - py - pz;
            let mut out = CMat::zeros(d, d);
            out += self.rho.scale(pi);
            for (op, p) in [(PauliOp::X, px), (PauliOp::Y, py), (PauliOp::Z, pz)] {
                if p == 0.0 {
                    continue;
                }
                let mut term = self.rho.clone();
                conjugate_single_pauli(&mut term, q, op);
                out += term.scale(p);
            }
            self.rho = out;
        }
        self.rehermitize();
    }

    /// rho -> sum_i K_i rho K_i^dagger. Kraus operators may enlarge the
    /// space (isometries into system + ancillas).
    pub fn apply_kraus(&self, kraus: &[CMat]) -> Result<DensityMatrix> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::parameter("empty Kraus list"))?;
        let din = self.dim();
        if first.ncols() != din {
            return Err(Error::parameter("Kraus input dimension mismatch"));
        }
        let dout = first.nrows();
        if !dout.is_power_of_two() {
            return Err(Error::parameter("Kraus output dimension must be a power of two"));
        }
        let mut out = CMat::zeros(dout, dout);
        for k in kraus {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::parameter("Kraus operators have inconsistent shapes"));
            }
            out += k * &self.rho * k.adjoint();
        }
        let mut dm = DensityMatrix {
            n_qubits: dout.trailing_zeros() as usize,
            rho: out,
        };
        dm.rehermitize();
        Ok(dm)
    }

    /// Diagonal in the rotated frame: Born probabilities of measuring
    /// every qubit in the bases given by `bases`.
    pub fn outcome_distribution(&self, bases: &BitString) -> Result<Vec<f64>> {
        let mut rotated = self.clone();
        rotated.hadamard_pattern(bases)?;
        Ok(rotated.rho.diagonal().iter().map(|c| c.re.max(0.0)).collect())
    }

    /// Splits the state into Bob-outcome blocks: for each outcome `z` of
    /// measuring the first `n_prefix` qubits in `bases`, the probability
    /// and the unnormalized residual matrix on the remaining qubits.
    pub fn prefix_outcome_blocks(
        &self,
        n_prefix: usize,
        bases: &BitString,
    ) -> Result<Vec<(f64, CMat)>> {
        if bases.len() != n_prefix || n_prefix > self.n_qubits {
            return Err(Error::parameter("prefix measurement shape mismatch"));
        }
        let mut rotated = self.clone();
        let mut full_pattern = *bases;
        for _ in n_prefix..self.n_qubits {
            full_pattern = full_pattern.concat(&BitString::zeros(1));
        }
        rotated.hadamard_pattern(&full_pattern)?;
        let rest_dim = 1usize << (self.n_qubits - n_prefix);
        let mut out = Vec::with_capacity(1 << n_prefix);
        for z in 0..1usize << n_prefix {
            let mut block = CMat::zeros(rest_dim, rest_dim);
            for e in 0..rest_dim {
                for f in 0..rest_dim {
                    block[(e, f)] = rotated.rho[(z | (e << n_prefix), z | (f << n_prefix))];
                }
            }
            let p: f64 = block.diagonal().iter().map(|c| c.re).sum();
            out.push((p.max(0.0), block));
        }
        Ok(out)
    }

    /// Traces out every qubit not in `keep`; `keep` lists qubit indices
    /// in ascending order and becomes the new register order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&q| q >= self.n_qubits) {
            return Err(Error::parameter("keep list must be ascending qubit indices"));
        }
        let traced: Vec<usize> = (0..self.n_qubits).filter(|q| !keep.contains(q)).collect();
        let kd = 1usize << keep.len();
        let td = 1usize << traced.len();
        let compose = |kept_bits: usize, traced_bits: usize| -> usize {
            let mut idx = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                idx |= ((kept_bits >> pos) & 1) << q;
            }
            for (pos, &q) in traced.iter().enumerate() {
                idx |= ((traced_bits >> pos) & 1) << q;
            }
            idx
        };
        let mut out = CMat::zeros(kd, kd);
        for a in 0..kd {
            for b in 0..kd {
                let mut sum = Complex64::new(0.0, 0.0);
                for e in 0..td {
                    sum += self.rho[(compose(a, e), compose(b, e))];
                }
                out[(a, b)] = sum;
            }
        }
        Ok(DensityMatrix { n_qubits: keep.len(), rho: out })
    }

    pub fn rehermitize(&mut self) {
        let adj = self.rho.adjoint();
        self.rho = (&self.rho + adj).scale(0.5);
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|c| c.re).sum()
    }
}

/// Half the absolute-eigenvalue sum of rho - sigma.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::parameter("trace distance dimension mismatch"));
    }
    Ok(trace_norm(&(rho.matrix() - sigma.matrix())) / 2.0)
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).iter().map(|e| e.abs()).sum()
}

/// |<a|b>| for normalized pure states.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    if a.amps.len() != b.amps.len() {
        return Err(Error::parameter("fidelity dimension mismatch"));
    }
    let inner: Complex64 = a.amps.iter().zip(b.amps.iter()).map(|(x, y)| x.conj() * y).sum();
    Ok(inner.norm())
}

/// Tr[Pi(psi) * out] where Pi projects onto accepted-but-orthogonal
/// states: flag qubit 0 in the ACC value and message component
/// orthogonal to `psi`. The flag is the highest qubit; ACC = 0, so the
/// accepted block is the upper-left quarter.
pub fn bad_subspace_mass(out: &DensityMatrix, psi: &CVec) -> Result<f64> {
    let m = psi.len();
    if out.dim() != 2 * m {
        return Err(Error::parameter(format!(
            "output dimension {} is not twice the message dimension {m}",
            out.dim()
        )));
    }
    // accepted block: flag bit (highest qubit) = 0
    let mut acc = CMat::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            acc[(i, j)] = out.matrix()[(i, j)];
        }
    }
    let psi_norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    if (psi_norm2 - 1.0).abs() > 1e-9 {
        return Err(Error::parameter("reference state is not normalized"));
    }
    let total: f64 = acc.diagonal().iter().map(|c| c.re).sum();
    // <psi| acc |psi>
    let v = &acc * psi;
    let on_psi: f64 = psi.iter().zip(v.iter()).map(|(p, w)| (p.conj() * w).re).sum();
    Ok((total - on_psi).max(0.0))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let sym = m.clone().symmetric_eigen();
    let mut eigs: Vec<f64> = sym.eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eigs
}

/// Dense unitary of a Pauli string (2^n x 2^n, permutation with phases).
pub fn pauli_unitary(pauli: &PauliString) -> CMat {
    let n = pauli.len();
    let d = 1usize << n;
    let x_mask = pauli.x_support().word() as usize;
    let mut u = CMat::zeros(d, d);
    for col in 0..d {
        let row = col ^ x_mask;
        let mut phase = Complex64::new(1.0, 0.0);
        for q in 0..n {
            let bit_in = (col >> q) & 1;
            match pauli.op(q) {
                PauliOp::Z => {
                    if bit_in == 1 {
                        phase = -phase;
                    }
                }
                PauliOp::Y => {
                    // Y|0> = i|1>, Y|1> = -i|0>
                    phase *= if bit_in == 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    };
                }
                _ => {}
            }
        }
        u[(row, col)] = phase;
    }
    u
}

fn hadamard_in_place(amps: &mut CVec, qubit: usize) {
    hadamard_slice(amps.as_mut_slice(), qubit);
}

fn hadamard_slice(amps: &mut [Complex64], qubit: usize) {
    let stride = 1usize << qubit;
    let len = amps.len();
    let mut base = 0;
    while base < len {
        for i in base..base + stride {
            let a0 = amps[i];
            let a1 = amps[i + stride];
            amps[i] = (a0 + a1) * FRAC_1_SQRT_2;
            amps[i + stride] = (a0 - a1) * FRAC_1_SQRT_2;
        }
        base += stride << 1;
    }
}

fn column_views(m: &mut CMat) -> impl Iterator<Item = &mut [Complex64]> {
    let nrows = m.nrows();
    m.as_mut_slice().chunks_mut(nrows)
}

fn apply_single_pauli(amps: &mut CVec, qubit: usize, op: PauliOp) {
    apply_single_pauli_slice(amps.as_mut_slice(), qubit, op);
}

fn apply_single_pauli_slice(amps: &mut [Complex64], qubit: usize, op: PauliOp) {
    let stride = 1usize << qubit;
    let len = amps.len();
    match op {
        PauliOp::I => {}
        PauliOp::X => {
            let mut base = 0;
            while base < len {
                for i in base..base + stride {
                    amps.swap(i, i + stride);
                }
                base += stride << 1;
            }
        }
        PauliOp::Z => {
            for (i, a) in amps.iter_mut().enumerate() {
                if (i >> qubit) & 1 == 1 {
                    *a = -*a;
                }
            }
        }
        PauliOp::Y => {
            let i_unit = Complex64::new(0.0, 1.0);
            let mut base = 0;
            while base < len {
                for i in base..base + stride {
                    let a0 = amps[i];
                    let a1 = amps[i + stride];
                    // |0> -> i|1>, |1> -> -i|0>
                    amps[i] = -i_unit * a1;
                    amps[i + stride] = i_unit * a0;
                }
                base += stride << 1;
            }
        }
    }
}

fn conjugate_single_pauli(rho: &mut CMat, qubit: usize, op: PauliOp) {
    let n = rho.nrows();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    // left multiplication, column by column
    for col in 0..n {
        for r in 0..n {
            buf[r] = rho[(r, col)];
        }
        apply_single_pauli_slice(&mut buf, qubit, op);
        for r in 0..n {
            rho[(r, col)] = buf[r];
        }
    }
    // right multiplication by the adjoint, via conjugated rows
    for row in 0..n {
        for c in 0..n {
            buf[c] = rho[(row, c)].conj();
        }
        apply_single_pauli_slice(&mut buf, qubit, op);
        for c in 0..n {
            rho[(row, c)] = buf[c].conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_and_hadamard() {
        let mut s = PureState::basis(1, 0);
        s.hadamard(0);
        assert_relative_eq!(s.amps()[0].re, FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(s.amps()[1].re, FRAC_1_SQRT_2, epsilon = 1e-12);
        s.hadamard(0);
        assert_relative_eq!(s.amps()[0].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn trace_distance_examples() {
        let zero = PureState::basis(1, 0).to_density();
        let one = PureState::basis(1, 1).to_density();
        assert_relative_eq!(trace_distance(&zero, &zero).unwrap(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(trace_distance(&zero, &one).unwrap(), 1.0, epsilon = 1e-10);
        let mut plus = PureState::basis(1, 0);
        plus.hadamard(0);
        let plus = plus.to_density();
        assert_relative_eq!(
            trace_distance(&zero, &plus).unwrap(),
            FRAC_1_SQRT_2,
            epsilon = 1e-9
        );
    }

    #[test]
    fn fidelity_examples() {
        let zero = PureState::basis(1, 0);
        let one = PureState::basis(1, 1);
        assert_relative_eq!(fidelity(&zero, &zero).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(fidelity(&zero, &one).unwrap(), 0.0, epsilon = 1e-12);
        let mut plus = PureState::basis(1, 0);
        plus.hadamard(0);
        assert_relative_eq!(fidelity(&zero, &plus).unwrap(), FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn depolarizing_gives_maximally_mixed() {
        let mut rho = PureState::basis(1, 0).to_density();
        rho.apply_pauli_channel(0.25, 0.25, 0.25);
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!(trace_distance(&rho, &mixed).unwrap() < 1e-12);
    }

    #[test]
    fn deterministic_x_channel() {
        let mut rho = PureState::basis(1, 0).to_density();
        rho.apply_pauli_channel(1.0, 0.0, 0.0);
        let one = PureState::basis(1, 1).to_density();
        assert!(trace_distance(&rho, &one).unwrap() < 1e-12);
    }

    #[test]
    fn partial_trace_product_and_bell() {
        // product state |0> x |+>: tracing out the second qubit leaves |0><0|
        let mut s = PureState::basis(2, 0);
        s.hadamard(1);
        let rho = s.to_density();
        let reduced = rho.partial_trace(&[0]).unwrap();
        let zero = PureState::basis(1, 0).to_density();
        assert!(trace_distance(&reduced, &zero).unwrap() < 1e-12);
        // Bell state: each side is maximally mixed
        let bell = PureState::new(
            2,
            CVec::from_vec(vec![
                c(FRAC_1_SQRT_2, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(FRAC_1_SQRT_2, 0.0),
            ]),
        )
        .unwrap()
        .to_density();
        let half = bell.partial_trace(&[0]).unwrap();
        assert!(trace_distance(&half, &DensityMatrix::maximally_mixed(1)).unwrap() < 1e-12);
        assert_relative_eq!(half.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pauli_unitary_is_unitary() {
        for text in ["XZ", "YI", "ZY", "XX"] {
            let p = PauliString::parse(text).unwrap();
            let u = pauli_unitary(&p);
            let prod = &u * u.adjoint();
            let id = CMat::identity(4, 4);
            assert!((prod - id).norm() < 1e-12);
        }
    }

    #[test]
    fn pure_and_density_pauli_agree() {
        use rand::{Rng as _, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for text in ["IXZ", "YZX", "ZZY"] {
            let p = PauliString::parse(text).unwrap();
            // random 3-qubit state
            let mut raw: Vec<Complex64> = (0..8)
                .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let norm: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut raw {
                *a /= c(norm, 0.0);
            }
            let mut pure = PureState::new(3, CVec::from_vec(raw)).unwrap();
            let mut dens = pure.to_density();
            pure.apply_pauli(&p).unwrap();
            dens.apply_pauli(&p).unwrap();
            assert!(trace_distance(&pure.to_density(), &dens).unwrap() < 1e-10);
        }
    }

    #[test]
    fn bad_subspace_examples() {
        // flag qubit is the last; message space 2-dim
        let msg_dim = 2;
        let psi = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        // ACC (x) |psi>: index 0 in the combined 4-dim space
        let acc_psi = PureState::basis(2, 0).to_density();
        assert_relative_eq!(bad_subspace_mass(&acc_psi, &psi).unwrap(), 0.0, epsilon = 1e-12);
        // REJ (x) anything: flag bit set -> indices 2, 3
        let rej = PureState::basis(2, 2).to_density();
        assert_relative_eq!(bad_subspace_mass(&rej, &psi).unwrap(), 0.0, epsilon = 1e-12);
        // ACC (x) orthogonal message: index 1
        let acc_orth = PureState::basis(2, 1).to_density();
        assert_relative_eq!(bad_subspace_mass(&acc_orth, &psi).unwrap(), 1.0, epsilon = 1e-12);
        let _ = msg_dim;
    }

    #[test]
    fn prefix_measurement_on_copied_state() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        // |01> measured fully in the Z frame
        let s = PureState::basis(2, 0b01);
        let (z, rest) = s.measure_prefix(2, &BitString::zeros(2), &mut rng).unwrap();
        assert_eq!(z.word(), 0b01);
        assert_eq!(rest.n_qubits(), 0);
    }
}
