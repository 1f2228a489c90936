//! Exact minimal factorization of symmetric GF(2) matrices.
//!
//! Given symmetric S, finds A with A A^T = S and the provably minimal column
//! count mu(S) = rank(S) + delta(S), where delta is 1 iff the diagonal of S
//! is all zero. The algorithm repeatedly picks a null vector y of A with
//! y_a xor y_b = 1 for some column pair, applies A -> A xor z y^T with
//! z = col_a xor col_b (which makes columns a and b duplicates while
//! preserving A A^T when |y| is even), and destroys the pair.

use crate::gf2::{BitMatrix, BitVec};
use crate::phase::{GateSynthesisMatrix, SignatureMatrix2};

/// Returns a minimal factor of `s`. For s = 0 the empty factor is returned
/// (it trivially satisfies A A^T = 0, although the mu formula would give 1).
pub fn lempel_factor(s: &SignatureMatrix2) -> GateSynthesisMatrix {
    let n = s.n();
    if s.is_zero() {
        return GateSynthesisMatrix::empty(n);
    }
    let mu = s.rank() + s.delta();

    // initial factor: e_a for every diagonal 1, the triple {e_a, e_b,
    // e_a+e_b} for every off-diagonal 1 (duplicate pairs cancel out of AA^T,
    // so the proper form is still a factor)
    let mut cols: Vec<BitVec> = Vec::new();
    for a in 0..n {
        if s.get(a, a) {
            cols.push(BitVec::unit(n, a));
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if s.get(a, b) {
                cols.push(BitVec::unit(n, a));
                cols.push(BitVec::unit(n, b));
                let mut ab = BitVec::unit(n, a);
                ab.set(b, true);
                cols.push(ab);
            }
        }
    }
    cols = proper_cols(n, cols);

    loop {
        let m = cols.len();
        if m <= mu {
            break;
        }
        let a_mat = BitMatrix::from_cols(n, &cols);
        let ns = a_mat.nullspace();
        let mut y: Vec<bool> = Vec::new();
        let mut found = false;
        for k in 0..ns.cols() {
            let cand = ns.col_vec(k);
            let w = cand.weight();
            if w > 0 && w < m {
                y = (0..m).map(|i| cand.get(i)).collect();
                found = true;
                break;
            }
        }
        if !found {
            // the null space is {0, all-ones}: pad a zero column so a
            // mixed-value pair exists; A.1 = 0 still holds for (A|0).(1,0)
            debug_assert!(ns.cols() == 1 && ns.col_vec(0).weight() == m);
            cols.push(BitVec::zeros(n));
            y = vec![true; m];
            y.push(false);
        }
        if y.iter().filter(|&&b| b).count() % 2 == 1 {
            cols.push(BitVec::zeros(n));
            y.push(true);
        }
        let a_idx = y.iter().position(|&b| b).expect("y nonzero");
        let b_idx = y.iter().position(|&b| !b).expect("|y| < cols");
        let z = cols[a_idx].xor(&cols[b_idx]);
        for (j, &yj) in y.iter().enumerate() {
            if yj {
                cols[j].xor_assign(&z);
            }
        }
        debug_assert_eq!(cols[a_idx], cols[b_idx]);
        let (lo, hi) = (a_idx.min(b_idx), a_idx.max(b_idx));
        cols.remove(hi);
        cols.remove(lo);
        assert!(cols.len() < m, "factor size must strictly decrease");
    }
    assert_eq!(cols.len(), mu, "Lempel factor must reach mu(S)");
    GateSynthesisMatrix::from_cols(n, cols)
}

/// Column-list form of `proper`: drops zero columns and duplicate pairs.
fn proper_cols(n: usize, cols: Vec<BitVec>) -> Vec<BitVec> {
    GateSynthesisMatrix::from_cols(n, cols).proper().columns()
}
