//! Binary linear codes, syndrome decoding, and the nested pair behind
//! the protocol's error correction and privacy amplification.
//!
//! A [`BinaryLinearCode`] is defined by a full-row-rank parity-check
//! matrix H. Decoding uses a coset-leader table (block lengths up to 20):
//! each syndrome maps to the minimum-weight vector producing it, ties
//! broken by the smallest backing word with position 0 read as the least
//! significant bit. A [`NestedCodePair`] holds codes C1 and C2 with
//! C2-dual contained in C1; the label matrix L picks out cosets of the
//! dual inside a C1 coset, which is where the message lives.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use rand::Rng;

/// Largest block length for coset-leader decode tables.
pub const MAX_TABLE_N: usize = 20;
/// Largest block length for brute-force distance certification.
pub const MAX_DISTANCE_N: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryLinearCode {
    block_len: usize,
    dimension: usize,
    parity_check: BitMatrix,
    generator: BitMatrix,
    decode_table: Option<Vec<u128>>,
}

impl BinaryLinearCode {
    /// Builds a code from its parity-check matrix, which must have full
    /// row rank. A decode table is attached when the block length allows.
    pub fn from_parity_check(h: BitMatrix) -> Result<Self> {
        let block_len = h.n_cols();
        if block_len == 0 || block_len > 128 {
            return Err(Error::parameter("block length must be in 1..=128"));
        }
        if h.rank() != h.n_rows() {
            return Err(Error::parameter(format!(
                "parity-check matrix rank {} below row count {}",
                h.rank(),
                h.n_rows()
            )));
        }
        let dimension = block_len - h.n_rows();
        let generator = BitMatrix::new(h.nullspace(), block_len);
        debug_assert_eq!(generator.n_rows(), dimension);
        let decode_table = if block_len <= MAX_TABLE_N {
            Some(build_decode_table(&h, block_len))
        } else {
            None
        };
        Ok(BinaryLinearCode {
            block_len,
            dimension,
            parity_check: h,
            generator,
            decode_table,
        })
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.parity_check
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn syndrome_len(&self) -> usize {
        self.block_len - self.dimension
    }

    pub fn has_decode_table(&self) -> bool {
        self.decode_table.is_some()
    }

    /// H * v over GF(2).
    pub fn syndrome(&self, v: &BitString) -> Result<BitString> {
        self.parity_check.mul_vec(v)
    }

    /// Moves `v` into the coset with the requested syndrome by
    /// subtracting the coset leader of the syndrome difference. A vector
    /// within half the minimum distance of a target-coset element is
    /// restored exactly.
    pub fn decode(&self, v: &BitString, target_syndrome: &BitString) -> Result<BitString> {
        let table = self.decode_table.as_ref().ok_or_else(|| {
            Error::capability(format!(
                "no decode table: block length {} exceeds {MAX_TABLE_N}",
                self.block_len
            ))
        })?;
        if target_syndrome.len() != self.syndrome_len() {
            return Err(Error::parameter("target syndrome length mismatch"));
        }
        let current = self.syndrome(v)?;
        let offset = current.xor(target_syndrome)?;
        let leader = table[offset.word() as usize];
        v.xor(&BitString::from_word(leader, self.block_len))
    }

    /// Coset leader for a syndrome, straight from the table.
    pub fn coset_leader(&self, syndrome: &BitString) -> Result<BitString> {
        let table = self.decode_table.as_ref().ok_or_else(|| {
            Error::capability(format!(
                "no decode table: block length {} exceeds {MAX_TABLE_N}",
                self.block_len
            ))
        })?;
        if syndrome.len() != self.syndrome_len() {
            return Err(Error::parameter("syndrome length mismatch"));
        }
        Ok(BitString::from_word(table[syndrome.word() as usize], self.block_len))
    }

    /// Minimum Hamming weight over nonzero codewords, by exhaustive
    /// Gray-code enumeration of all 2^K codewords.
    pub fn min_distance(&self) -> Result<u32> {
        if self.block_len > MAX_DISTANCE_N {
            return Err(Error::capability(format!(
                "brute-force distance needs block length <= {MAX_DISTANCE_N}, got {}",
                self.block_len
            )));
        }
        if self.dimension == 0 {
            return Err(Error::parameter("zero-dimensional code has no nonzero codeword"));
        }
        let gens = self.generator.rows();
        let mut word = 0u128;
        let mut best = u32::MAX;
        for m in 1u64..1 << self.dimension {
            // Gray code: flip the generator indexed by the lowest set bit
            word ^= gens[m.trailing_zeros() as usize];
            if word != 0 {
                best = best.min(word.count_ones());
            }
        }
        Ok(best)
    }

    /// Membership test via the parity check.
    pub fn contains(&self, v: &BitString) -> Result<bool> {
        Ok(self.syndrome(v)?.is_zero())
    }
}

/// Weight-major, smallest-word-minor table of coset leaders.
fn build_decode_table(h: &BitMatrix, block_len: usize) -> Vec<u128> {
    let n_syndromes = 1usize << h.n_rows();
    let mut table = vec![u128::MAX; n_syndromes];
    let mut filled = 0;
    'outer: for weight in 0..=block_len as u32 {
        let mut w = if weight == 0 { 0u128 } else { (1u128 << weight) - 1 };
        loop {
            let syndrome = h.mul_word(w) as usize;
            if table[syndrome] == u128::MAX {
                table[syndrome] = w;
                filled += 1;
                if filled == n_syndromes {
                    break 'outer;
                }
            }
            if weight == 0 {
                break;
            }
            match next_same_weight(w, block_len) {
                Some(next) => w = next,
                None => break,
            }
        }
    }
    debug_assert_eq!(filled, n_syndromes);
    table
}

/// Gosper's hack: next word with the same popcount, within `bits` bits.
fn next_same_weight(w: u128, bits: usize) -> Option<u128> {
    let c = w & w.wrapping_neg();
    let r = w + c;
    let next = (((r ^ w) >> 2) / c) | r;
    let limit = if bits == 128 { u128::MAX } else { (1u128 << bits) - 1 };
    if next > limit {
        None
    } else {
        Some(next)
    }
}

/// Codes C1 (dimension K) and C2 (dimension K') with C2-dual inside C1.
/// The label matrix has K + K' - N rows drawn from C2; together with H
/// of C1 it separates vectors up to C2-dual shifts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedCodePair {
    c1: BinaryLinearCode,
    c2: BinaryLinearCode,
    label_matrix: BitMatrix,
}

impl NestedCodePair {
    /// Verifies nesting and derives a label matrix from the generators
    /// of C2.
    pub fn new(c1: BinaryLinearCode, c2: BinaryLinearCode) -> Result<Self> {
        let label_rows = pick_label_rows(&c1, &c2)?;
        let label = BitMatrix::new(label_rows, c2.block_len());
        Self::with_label_matrix(c1, c2, label)
    }

    /// Uses a caller-supplied label matrix; rows must lie in C2 and the
    /// stacked map (H of C1, L) must separate cosets of the C2-dual.
    pub fn with_label_matrix(
        c1: BinaryLinearCode,
        c2: BinaryLinearCode,
        label_matrix: BitMatrix,
    ) -> Result<Self> {
        let n = c1.block_len();
        if c2.block_len() != n {
            return Err(Error::parameter("codes have different block lengths"));
        }
        // C2-dual is generated by the rows of C2's parity check
        for i in 0..c2.parity_check().n_rows() {
            let row = c2.parity_check().row_bits(i);
            if !c1.contains(&row)? {
                return Err(Error::parameter(
                    "nesting violated: a generator of the C2 dual is outside C1",
                ));
            }
        }
        let expected_rows = c1.dimension() + c2.dimension() - n;
        if label_matrix.n_rows() != expected_rows {
            return Err(Error::parameter(format!(
                "label matrix must have K + K' - N = {expected_rows} rows, got {}",
                label_matrix.n_rows()
            )));
        }
        if label_matrix.n_cols() != n {
            return Err(Error::parameter("label matrix column count mismatch"));
        }
        for i in 0..label_matrix.n_rows() {
            if !c2.contains(&label_matrix.row_bits(i))? {
                return Err(Error::parameter("label row outside C2"));
            }
        }
        // (H1, L) stacked must have kernel exactly the C2 dual
        let stacked = c1.parity_check().stack(&label_matrix);
        if stacked.rank() != c2.dimension() {
            return Err(Error::parameter(
                "label rows do not separate C2-dual cosets within a C1 coset",
            ));
        }
        Ok(NestedCodePair { c1, c2, label_matrix })
    }

    pub fn c1(&self) -> &BinaryLinearCode {
        &self.c1
    }

    pub fn c2(&self) -> &BinaryLinearCode {
        &self.c2
    }

    pub fn label_matrix(&self) -> &BitMatrix {
        &self.label_matrix
    }

    pub fn block_len(&self) -> usize {
        self.c1.block_len()
    }

    /// Label length n + s = K + K' - N.
    pub fn label_len(&self) -> usize {
        self.label_matrix.n_rows()
    }

    /// Bits of private randomness per coset sample: N - K'.
    pub fn coset_random_bits(&self) -> usize {
        self.block_len() - self.c2.dimension()
    }

    /// L * v; invariant under shifts by C2-dual elements.
    pub fn coset_label(&self, v: &BitString) -> Result<BitString> {
        self.label_matrix.mul_vec(v)
    }

    /// Deterministic representative of the coset with the given C1
    /// syndrome and label (free variables zeroed).
    pub fn coset_representative(
        &self,
        c1_syndrome: &BitString,
        label: &BitString,
    ) -> Result<BitString> {
        if c1_syndrome.len() != self.c1.syndrome_len() {
            return Err(Error::parameter("C1 syndrome length mismatch"));
        }
        if label.len() != self.label_len() {
            return Err(Error::parameter("label length mismatch"));
        }
        let stacked = self.c1.parity_check().stack(&self.label_matrix);
        let rhs = c1_syndrome.concat(label);
        let z = stacked
            .solve(rhs.word())
            .ok_or_else(|| Error::invariant("no vector matches syndrome and label"))?;
        Ok(BitString::from_word(z, self.block_len()))
    }

    /// Uniform sample from the 2^(N-K') vectors with the given syndrome
    /// and label, consuming exactly N - K' bits of randomness.
    pub fn sample_coset<R: Rng + ?Sized>(
        &self,
        c1_syndrome: &BitString,
        label: &BitString,
        rng: &mut R,
    ) -> Result<BitString> {
        let mut z = self.coset_representative(c1_syndrome, label)?;
        for i in 0..self.c2.parity_check().n_rows() {
            if rng.gen::<bool>() {
                z = z.xor(&self.c2.parity_check().row_bits(i))?;
            }
        }
        Ok(z)
    }

    /// All 2^(N-K') vectors with the given syndrome and label, in the
    /// order induced by the C2-dual generator combinations.
    pub fn coset_elements(&self, c1_syndrome: &BitString, label: &BitString) -> Result<Vec<BitString>> {
        let base = self.coset_representative(c1_syndrome, label)?;
        let gens = self.c2.parity_check();
        let t = gens.n_rows();
        let mut out = Vec::with_capacity(1 << t);
        for combo in 0u64..1 << t {
            let mut z = base;
            for (i, row) in gens.rows().iter().enumerate() {
                if (combo >> i) & 1 == 1 {
                    z = z.xor(&BitString::from_word(*row, self.block_len()))?;
                }
            }
            out.push(z);
        }
        Ok(out)
    }
}

/// Greedily selects generator rows of C2 whose action on a C1 basis is
/// independent, yielding K + K' - N label rows.
fn pick_label_rows(c1: &BinaryLinearCode, c2: &BinaryLinearCode) -> Result<Vec<u128>> {
    let n = c1.block_len();
    let needed = (c1.dimension() + c2.dimension()).checked_sub(n).ok_or_else(|| {
        Error::parameter("K + K' < N leaves no room for labels")
    })?;
    let g1 = c1.generator();
    let mut picked = Vec::new();
    let mut image_basis: Vec<u128> = Vec::new();
    for i in 0..c2.generator().n_rows() {
        let cand = c2.generator().row(i);
        // image of the candidate as a functional on C1
        let mut image = 0u128;
        for (j, g) in g1.rows().iter().enumerate() {
            if (cand & g).count_ones() % 2 == 1 {
                image |= 1 << j;
            }
        }
        // Gaussian check for independence from already-picked images
        let mut reduced = image;
        for &b in &image_basis {
            let pivot = 127 - b.leading_zeros();
            if (reduced >> pivot) & 1 == 1 {
                reduced ^= b;
            }
        }
        if reduced != 0 {
            image_basis.push(reduced);
            image_basis.sort_unstable_by(|a, b| b.cmp(a));
            picked.push(cand);
            if picked.len() == needed {
                return Ok(picked);
            }
        }
    }
    Err(Error::invariant(
        "could not find independent label rows; nesting is inconsistent",
    ))
}

/// Binary entropy h(x) = -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::parameter(format!("entropy argument {x} outside [0, 1]")));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// Full protocol sizing: message length n, tag width s, block structure,
/// channel and amplification margins, and the nested pair itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    pub n: usize,
    pub s: u32,
    pub delta: f64,
    pub eta: f64,
    pair: NestedCodePair,
    distances_verified: bool,
}

impl ProtocolParams {
    pub fn new(n: usize, s: u32, delta: f64, eta: f64, pair: NestedCodePair) -> Result<Self> {
        if n == 0 || s == 0 || n % s as usize != 0 {
            return Err(Error::parameter(format!(
                "message length {n} must be a positive multiple of s = {s}"
            )));
        }
        if pair.label_len() != n + s as usize {
            return Err(Error::parameter(format!(
                "pair label length {} must equal n + s = {}",
                pair.label_len(),
                n + s as usize
            )));
        }
        let big_n = pair.block_len();
        let distances_verified = if big_n <= MAX_DISTANCE_N {
            check_distances(&pair, delta, eta, big_n)?;
            true
        } else if pair.c1().dimension() == big_n && pair.c2().dimension() == big_n {
            // full-space pair: distance is 1 regardless of length
            check_targets(1, 1, delta, eta, big_n)?;
            true
        } else {
            false
        };
        Ok(ProtocolParams { n, s, delta, eta, pair, distances_verified })
    }

    pub fn r(&self) -> usize {
        self.n / self.s as usize
    }

    pub fn big_n(&self) -> usize {
        self.pair.block_len()
    }

    pub fn k1(&self) -> usize {
        self.pair.c1().dimension()
    }

    pub fn k2(&self) -> usize {
        self.pair.c2().dimension()
    }

    pub fn pair(&self) -> &NestedCodePair {
        &self.pair
    }

    pub fn distances_verified(&self) -> bool {
        self.distances_verified
    }

    pub fn field(&self) -> crate::field::FieldParams {
        crate::field::FieldParams::new(self.s).expect("validated on construction")
    }

    /// Length of the C1 syndrome key component.
    pub fn c1_len(&self) -> usize {
        self.big_n() - self.k1()
    }

    /// Bits of fresh private randomness consumed per encryption.
    pub fn private_random_bits(&self) -> usize {
        self.pair.coset_random_bits()
    }

    /// Canonical text rendering: sizing line, then H1, H2, and L as
    /// row-major uppercase hex, one matrix per line. This is the exact
    /// byte stream fed to [`ProtocolParams::digest`].
    pub fn canonical_text(&self) -> String {
        let mut out = format!(
            "n={} s={} delta={:.12} eta={:.12} N={} K={} K'={}\n",
            self.n,
            self.s,
            self.delta,
            self.eta,
            self.big_n(),
            self.k1(),
            self.k2()
        );
        for (name, m) in [
            ("H1", self.pair.c1().parity_check()),
            ("H2", self.pair.c2().parity_check()),
            ("L", self.pair.label_matrix()),
        ] {
            out.push_str(name);
            out.push('=');
            for i in 0..m.n_rows() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&m.row_bits(i).to_hex());
            }
            out.push('\n');
        }
        out
    }

    /// FNV-1a 64-bit digest of the canonical text; binds key files and
    /// transmissions to their parameter set.
    pub fn digest(&self) -> u64 {
        fnv1a64(self.canonical_text().as_bytes())
    }
}

/// FNV-1a with the standard 64-bit offset basis and prime.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn check_distances(pair: &NestedCodePair, delta: f64, eta: f64, big_n: usize) -> Result<()> {
    let d1 = pair.c1().min_distance()?;
    let d2 = pair.c2().min_distance()?;
    check_targets(d1, d2, delta, eta, big_n)
}

fn check_targets(d1: u32, d2: u32, delta: f64, eta: f64, big_n: usize) -> Result<()> {
    let t1 = 2.0 * delta * big_n as f64;
    let t2 = 2.0 * (delta + eta) * big_n as f64;
    if (d1 as f64) < t1 - 1e-9 {
        return Err(Error::parameter(format!(
            "C1 distance {d1} below target {t1:.3}"
        )));
    }
    if (d2 as f64) < t2 - 1e-9 {
        return Err(Error::parameter(format!(
            "C2 distance {d2} below target {t2:.3}"
        )));
    }
    Ok(())
}

/// Random-search budget for [`size_parameters`].
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub trials: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { trials: 10_000 }
    }
}

/// Searches for the smallest block length N <= max_n admitting a nested
/// pair with K + K' - N = n + s and distances meeting 2*delta*N and
/// 2*(delta+eta)*N. Distances are certified by brute force for N <= 16
/// (and analytically for the full-space pair); larger blocks are
/// accepted as asserted. The full-space pair is tried first at each N.
pub fn size_parameters<R: Rng + ?Sized>(
    n: usize,
    s: u32,
    delta: f64,
    eta: f64,
    max_n: usize,
    budget: SearchBudget,
    rng: &mut R,
) -> Result<ProtocolParams> {
    if n == 0 || s == 0 || n % s as usize != 0 {
        return Err(Error::parameter(format!(
            "message length {n} must be a positive multiple of s = {s}"
        )));
    }
    if !(0.0..0.25).contains(&delta) || delta + eta >= 0.25 || eta < 0.0 {
        return Err(Error::parameter(
            "rates must satisfy 2*delta < 1/2 and 2*(delta + eta) < 1/2",
        ));
    }
    let label_len = n + s as usize;
    if label_len > 128 {
        return Err(Error::capability("n + s beyond 128-bit block support"));
    }
    let min_n = label_len;
    if max_n < min_n {
        return Err(Error::parameter(format!(
            "max_n = {max_n} below the minimum feasible block length {min_n}"
        )));
    }
    let mut trials_used = 0usize;
    for big_n in min_n..=max_n.min(128) {
        // full-space candidate: K = K' = N requires N = n + s exactly
        if big_n == label_len {
            if let Ok(pair) = full_space_pair(big_n) {
                if let Ok(params) = ProtocolParams::new(n, s, delta, eta, pair) {
                    return Ok(params);
                }
            }
        }
        for k1 in (label_len..=big_n).rev() {
            let k2 = label_len + big_n - k1;
            if k2 > big_n {
                continue;
            }
            let per_combo = 50;
            for _ in 0..per_combo {
                if trials_used >= budget.trials {
                    return Err(Error::search_exhausted(format!(
                        "no feasible pair within N <= {max_n} after {trials_used} trials"
                    )));
                }
                trials_used += 1;
                if let Some(pair) = random_nested_pair(big_n, k1, k2, rng) {
                    if let Ok(params) = ProtocolParams::new(n, s, delta, eta, pair) {
                        if params.distances_verified || big_n > MAX_DISTANCE_N {
                            return Ok(params);
                        }
                    }
                }
            }
        }
    }
    Err(Error::search_exhausted(format!(
        "no feasible pair within N <= {max_n} after {trials_used} trials"
    )))
}

/// C1 = C2 = the full space: empty parity checks, identity-like labels.
pub fn full_space_pair(big_n: usize) -> Result<NestedCodePair> {
    let h = BitMatrix::zero(0, big_n);
    let c1 = BinaryLinearCode::from_parity_check(h.clone())?;
    let c2 = BinaryLinearCode::from_parity_check(h)?;
    NestedCodePair::new(c1, c2)
}

fn random_nested_pair<R: Rng + ?Sized>(
    big_n: usize,
    k1: usize,
    k2: usize,
    rng: &mut R,
) -> Option<NestedCodePair> {
    let h1 = BitMatrix::random(big_n - k1, big_n, rng);
    if h1.rank() != big_n - k1 {
        return None;
    }
    // C2 is generated by the dual of C1 plus fresh random rows, which
    // guarantees the nesting C2-dual inside C1
    let extra = BitMatrix::random(k1 + k2 - big_n, big_n, rng);
    let g2 = h1.stack(&extra);
    if g2.rank() != k2 {
        return None;
    }
    let h2 = BitMatrix::new(g2.nullspace(), big_n);
    let c1 = BinaryLinearCode::from_parity_check(h1).ok()?;
    let c2 = BinaryLinearCode::from_parity_check(h2).ok()?;
    NestedCodePair::new(c1, c2).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn repetition3() -> BinaryLinearCode {
        let h = BitMatrix::new(vec![0b011, 0b110], 3);
        BinaryLinearCode::from_parity_check(h).unwrap()
    }

    pub(crate) fn hamming74() -> BinaryLinearCode {
        // columns are the nonzero 3-bit patterns 1..7 in order
        let mut rows = vec![0u128; 3];
        for col in 0..7u32 {
            let pattern = col + 1;
            for bit in 0..3 {
                if (pattern >> bit) & 1 == 1 {
                    rows[bit as usize] |= 1 << col;
                }
            }
        }
        BinaryLinearCode::from_parity_check(BitMatrix::new(rows, 7)).unwrap()
    }

    #[test]
    fn syndrome_basics() {
        let code = hamming74();
        let zero = BitString::zeros(7);
        assert!(code.syndrome(&zero).unwrap().is_zero());
        // generator rows are codewords
        for i in 0..code.generator().n_rows() {
            let g = code.generator().row_bits(i);
            assert!(code.contains(&g).unwrap());
        }
        // third unit vector maps to the third column of H
        let mut e3 = BitString::zeros(7);
        e3.set(2, true);
        let syn = code.syndrome(&e3).unwrap();
        let expected: Vec<bool> = (0..3).map(|r| code.parity_check().get(r, 2)).collect();
        assert_eq!(syn, BitString::from_bits(&expected));
        // length mismatch is a parameter error
        assert!(code.syndrome(&BitString::zeros(6)).is_err());
    }

    #[test]
    fn min_distances() {
        assert_eq!(repetition3().min_distance().unwrap(), 3);
        assert_eq!(hamming74().min_distance().unwrap(), 3);
        let full = BinaryLinearCode::from_parity_check(BitMatrix::zero(0, 5)).unwrap();
        assert_eq!(full.min_distance().unwrap(), 1);
    }

    #[test]
    fn decode_repetition_example() {
        let code = repetition3();
        let v = BitString::parse_binary("110").unwrap();
        let target = BitString::zeros(2);
        let decoded = code.decode(&v, &target).unwrap();
        assert_eq!(decoded.to_string(), "111");
    }

    #[test]
    fn decode_corrects_single_flips_in_every_coset() {
        let code = hamming74();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let target_syndrome = BitString::random(3, &mut rng);
            // a vector in the target coset
            let base = code
                .coset_leader(&target_syndrome)
                .unwrap()
                .xor(&{
                    let m = rng.gen_range(0u64..16);
                    let mut w = BitString::zeros(7);
                    for (i, g) in code.generator().rows().iter().enumerate() {
                        if (m >> i) & 1 == 1 {
                            w = w.xor(&BitString::from_word(*g, 7)).unwrap();
                        }
                    }
                    w
                })
                .unwrap();
            // v already in the coset decodes to itself
            assert_eq!(code.decode(&base, &target_syndrome).unwrap(), base);
            for flip in 0..7 {
                let mut v = base;
                v.flip(flip);
                let decoded = code.decode(&v, &target_syndrome).unwrap();
                assert_eq!(decoded, base, "flip at {flip}");
            }
        }
    }

    #[test]
    fn decode_is_idempotent() {
        let code = hamming74();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let v = BitString::random(7, &mut rng);
            let target = BitString::random(3, &mut rng);
            let once = code.decode(&v, &target).unwrap();
            assert_eq!(code.syndrome(&once).unwrap(), target);
            assert_eq!(code.decode(&once, &target).unwrap(), once);
        }
    }

    #[test]
    fn decode_table_leaders_minimal() {
        let code = hamming74();
        for syn_word in 0..8u128 {
            let syn = BitString::from_word(syn_word, 3);
            let leader = code.coset_leader(&syn).unwrap();
            assert_eq!(code.syndrome(&leader).unwrap(), syn);
            // exhaustive minimality check over the coset
            for w in 0..128u128 {
                let v = BitString::from_word(w, 7);
                if code.syndrome(&v).unwrap() == syn {
                    assert!(v.weight() >= leader.weight());
                }
            }
        }
    }

    #[test]
    fn trivial_pair_label_is_identity_map() {
        let pair = full_space_pair(4).unwrap();
        assert_eq!(pair.label_len(), 4);
        assert_eq!(pair.coset_random_bits(), 0);
        let v = BitString::parse_binary("1010").unwrap();
        let label = pair.coset_label(&v).unwrap();
        // the label map is a bijection on 4 bits; representative inverts it
        let back = pair
            .coset_representative(&BitString::zeros(0), &label)
            .unwrap();
        assert_eq!(back, v);
    }

    fn hamming_even_pair() -> NestedCodePair {
        // C1 = Hamming [7,4], C2 = even-weight [7,6]; the C2 dual {0, 1^7}
        // sits inside C1 because the all-ones word is a Hamming codeword
        let c1 = hamming74();
        let h2 = BitMatrix::new(vec![0x7F], 7);
        let c2 = BinaryLinearCode::from_parity_check(h2).unwrap();
        NestedCodePair::new(c1, c2).unwrap()
    }

    #[test]
    fn nested_pair_invariants() {
        let pair = hamming_even_pair();
        assert_eq!(pair.label_len(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let v = BitString::random(7, &mut rng);
            let label = pair.coset_label(&v).unwrap();
            let syn = pair.c1().syndrome(&v).unwrap();
            // shifting by a C2-dual generator changes neither
            let shifted = v.xor(&pair.c2().parity_check().row_bits(0)).unwrap();
            assert_eq!(pair.coset_label(&shifted).unwrap(), label);
            assert_eq!(pair.c1().syndrome(&shifted).unwrap(), syn);
            // label equals the direct matrix product
            assert_eq!(pair.label_matrix().mul_vec(&v).unwrap(), label);
        }
    }

    #[test]
    fn sample_coset_round_trip_and_uniformity() {
        let pair = hamming_even_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let syn = BitString::parse_binary("101").unwrap();
        let label = BitString::parse_binary("011").unwrap();
        let solutions = pair.coset_elements(&syn, &label).unwrap();
        assert_eq!(solutions.len(), 2);
        let mut counts = vec![0usize; solutions.len()];
        let trials = 1000;
        for _ in 0..trials {
            let z = pair.sample_coset(&syn, &label, &mut rng).unwrap();
            assert_eq!(pair.coset_label(&z).unwrap(), label);
            assert_eq!(pair.c1().syndrome(&z).unwrap(), syn);
            let idx = solutions.iter().position(|s| *s == z).unwrap();
            counts[idx] += 1;
        }
        // 5 sigma around the uniform expectation
        let expect = trials as f64 / solutions.len() as f64;
        let sigma = (trials as f64 * 0.5 * 0.5).sqrt();
        for &c in &counts {
            assert!((c as f64 - expect).abs() <= 5.0 * sigma);
        }
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-12);
        // 30-digit reference evaluation: 0.499915958164527995...
        assert!((binary_entropy(0.11).unwrap() - 0.4999159581645280).abs() < 1e-12);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn size_parameters_trivial_config() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params =
            size_parameters(2, 2, 0.0, 0.0, 16, SearchBudget::default(), &mut rng).unwrap();
        assert_eq!(params.big_n(), 4);
        assert_eq!(params.k1(), 4);
        assert_eq!(params.k2(), 4);
        assert_eq!(params.c1_len(), 0);
        assert!(params.distances_verified());
    }

    #[test]
    fn size_parameters_distance_verified() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let params = size_parameters(
            4,
            4,
            1.0 / 15.0,
            0.0,
            15,
            SearchBudget::default(),
            &mut rng,
        )
        .unwrap();
        assert!(params.big_n() <= 15);
        assert_eq!(params.k1() + params.k2() - params.big_n(), 8);
        assert!(params.distances_verified());
        let d1 = params.pair().c1().min_distance().unwrap();
        assert!(d1 as f64 >= 2.0 * params.delta * params.big_n() as f64 - 1e-9);
    }

    #[test]
    fn size_parameters_exhaustion_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // delta too demanding for tiny blocks
        let err = size_parameters(2, 2, 0.24, 0.0, 5, SearchBudget { trials: 50 }, &mut rng)
            .unwrap_err();
        assert!(matches!(err, Error::SearchExhausted(_)));
    }

    #[test]
    fn size_parameters_rejects_bad_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(size_parameters(2, 2, 0.3, 0.0, 8, SearchBudget::default(), &mut rng).is_err());
        assert!(size_parameters(3, 2, 0.0, 0.0, 8, SearchBudget::default(), &mut rng).is_err());
    }
}
