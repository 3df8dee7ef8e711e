//! Canonical parameter sets used by the verification suites and the CLI
//! demos. All of them are small enough for exact-engine enumeration.

use crate::codes::{full_space_pair, BinaryLinearCode, NestedCodePair, ProtocolParams};
use crate::error::Result;
use crate::gf2::BitMatrix;

/// n = 2, s = 2, N = 4 with the full-space pair: no error correction,
/// no coset randomness, identity label map. The whole key space has
/// 2^10 elements, so every definition-level quantity is enumerable.
pub fn trivial4() -> ProtocolParams {
    let pair = full_space_pair(4).expect("full-space pair at N = 4");
    ProtocolParams::new(2, 2, 0.0, 0.0, pair).expect("trivial parameters")
}

/// The [7,4] parity-check code whose columns are the nonzero 3-bit
/// patterns in increasing order; distance 3, corrects one flip.
pub fn hamming74_code() -> BinaryLinearCode {
    let mut rows = vec![0u128; 3];
    for col in 0..7u32 {
        let pattern = col + 1;
        for bit in 0..3 {
            if (pattern >> bit) & 1 == 1 {
                rows[bit as usize] |= 1 << col;
            }
        }
    }
    BinaryLinearCode::from_parity_check(BitMatrix::new(rows, 7)).expect("Hamming [7,4]")
}

/// n = 2, s = 2, N = 7: C1 is the single-error-correcting [7,4] code,
/// C2 the full space. Tolerates one bit flip per transmission.
pub fn hamming74_config() -> ProtocolParams {
    let c1 = hamming74_code();
    let c2 = BinaryLinearCode::from_parity_check(BitMatrix::zero(0, 7)).expect("full space");
    let pair = NestedCodePair::new(c1, c2).expect("nested pair");
    ProtocolParams::new(2, 2, 1.0 / 14.0, 0.0, pair).expect("single-error parameters")
}

/// n = 1, s = 1, N = 4: both codes are the even-weight [4,3] code, so
/// the C2 dual is {0000, 1111} and each message coset holds two vectors.
/// The smallest configuration with genuine coset randomness, used by the
/// coherent-variant equivalence checks.
pub fn nontrivial4() -> ProtocolParams {
    let h = BitMatrix::new(vec![0b1111], 4);
    let c1 = BinaryLinearCode::from_parity_check(h.clone()).expect("even-weight [4,3]");
    let c2 = BinaryLinearCode::from_parity_check(h).expect("even-weight [4,3]");
    let pair = NestedCodePair::new(c1, c2).expect("nested pair");
    ProtocolParams::new(1, 1, 0.0, 0.0, pair).expect("nontrivial parameters")
}

/// n = 4, s = 4, N = 8 full-space pair with a permutation label matrix
/// that routes the tag register onto qubits {0, 3, 6, 1}. Any bit error
/// supported on {0, 3, 6} lands entirely in the tag register, where the
/// induced tamper polynomial is a nonzero constant and so is caught for
/// every key. Used by the key-stream distinguisher demonstration.
pub fn distinguisher8() -> ProtocolParams {
    let h = BitMatrix::zero(0, 8);
    let c1 = BinaryLinearCode::from_parity_check(h.clone()).expect("full space");
    let c2 = BinaryLinearCode::from_parity_check(h).expect("full space");
    // label rows are z-space functionals: y_i = z_{perm(i)}
    let perm = [2usize, 4, 5, 7, 0, 3, 6, 1];
    let rows: Vec<u128> = perm.iter().map(|&p| 1u128 << p).collect();
    let label = BitMatrix::new(rows, 8);
    let pair = NestedCodePair::with_label_matrix(c1, c2, label).expect("permutation label");
    ProtocolParams::new(4, 4, 0.0, 0.0, pair).expect("distinguisher parameters")
}

/// Five assorted configurations for key-accounting checks.
pub fn accounting_set() -> Result<Vec<ProtocolParams>> {
    let mut out = vec![trivial4(), hamming74_config(), nontrivial4(), distinguisher8()];
    // full-space pair at the asymptotic point n = 64, s = 8, delta = 0
    let pair = full_space_pair(72)?;
    out.push(ProtocolParams::new(64, 8, 0.0, 0.0, pair)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;

    #[test]
    fn trivial4_shape() {
        let p = trivial4();
        assert_eq!((p.n, p.s, p.big_n(), p.k1(), p.k2()), (2, 2, 4, 4, 4));
        assert_eq!(p.c1_len(), 0);
        assert_eq!(p.private_random_bits(), 0);
        // identity label map
        let v = BitString::parse_binary("1010").unwrap();
        assert_eq!(p.pair().coset_label(&v).unwrap(), v);
    }

    #[test]
    fn hamming_shape() {
        let p = hamming74_config();
        assert_eq!((p.big_n(), p.k1(), p.k2()), (7, 4, 7));
        assert_eq!(p.pair().label_len(), 4);
        assert_eq!(p.pair().c1().min_distance().unwrap(), 3);
        assert!(p.distances_verified());
    }

    #[test]
    fn nontrivial4_shape() {
        let p = nontrivial4();
        assert_eq!((p.big_n(), p.k1(), p.k2()), (4, 3, 3));
        assert_eq!(p.private_random_bits(), 1);
        assert_eq!(p.pair().label_len(), 2);
    }

    #[test]
    fn distinguisher8_routes_tag_register() {
        let p = distinguisher8();
        assert_eq!((p.big_n(), p.k1(), p.k2()), (8, 8, 8));
        // flips on {0, 3, 6} produce label changes confined to the tag
        // register (positions 4..8), never the message part
        for mask in 1u128..8 {
            let mut z = BitString::zeros(8);
            if mask & 1 == 1 {
                z.flip(0);
            }
            if mask & 2 == 2 {
                z.flip(3);
            }
            if mask & 4 == 4 {
                z.flip(6);
            }
            let label = p.pair().coset_label(&z).unwrap();
            assert!(label.slice(0, 4).is_zero(), "mask {mask}");
            assert!(!label.slice(4, 4).is_zero(), "mask {mask}");
        }
    }

    #[test]
    fn accounting_set_has_five() {
        assert_eq!(accounting_set().unwrap().len(), 5);
    }
}
