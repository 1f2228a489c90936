//! Brute-force optimal factorization of small signature tensors.
//!
//! Finding the minimal column count is equivalent to minimum-distance
//! decoding of a punctured Reed-Muller code, which is only feasible for
//! small n. The decoder builds the constraint system M y = s, where y ranges
//! over 0/1 multiplicities of the 2^n - 1 candidate nonzero columns and M
//! collects the degree-<=3 monomial parities of each candidate, then
//! enumerates the full solution coset y0 + ker(M) in Gray-code order and
//! keeps a minimum-weight solution. Cost is 2^(2^n - 1 - rank(M)), about
//! 2^22 at n = 6.

use crate::gf2::BitVec;
use crate::phase::{binom, GateSynthesisMatrix, SignatureTensor3};
use thiserror::Error;

pub const DEFAULT_RM_LIMIT: usize = 6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RmError {
    #[error("tensor width {n} exceeds the brute-force limit {limit}")]
    TooLarge { n: usize, limit: usize },
}

/// Returns a factor of `s` with the minimum possible number of columns.
pub fn rm_decode(s: &SignatureTensor3, limit: usize) -> Result<GateSynthesisMatrix, RmError> {
    let n = s.n();
    if n > limit {
        return Err(RmError::TooLarge { n, limit });
    }
    if s.is_zero() || n == 0 {
        return Ok(GateSynthesisMatrix::empty(n));
    }
    let ncols = (1usize << n) - 1; // candidate columns are the masks 1..=ncols

    // row masks: row for monomial set T has bit (v-1) set iff T subset supp(v)
    let mut rows: Vec<u64> = Vec::with_capacity(n + binom(n, 2) + binom(n, 3));
    let mut rhs: Vec<bool> = Vec::new();
    let push_row = |t_mask: usize, bit: bool, rows: &mut Vec<u64>, rhs: &mut Vec<bool>| {
        let mut word = 0u64;
        for v in 1..=ncols {
            if v & t_mask == t_mask {
                word |= 1u64 << (v - 1);
            }
        }
        rows.push(word);
        rhs.push(bit);
    };
    for a in 0..n {
        push_row(1 << a, s.get(a, a, a), &mut rows, &mut rhs);
    }
    for a in 0..n {
        for b in a + 1..n {
            push_row((1 << a) | (1 << b), s.get(a, a, b), &mut rows, &mut rhs);
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                push_row(
                    (1 << a) | (1 << b) | (1 << c),
                    s.get(a, b, c),
                    &mut rows,
                    &mut rhs,
                );
            }
        }
    }

    // Gaussian elimination on [M | rhs] over the candidate-column variables
    let nrows = rows.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..nrows).find(|&i| rows[i] >> c & 1 == 1) else {
            continue;
        };
        rows.swap(r, pr);
        rhs.swap(r, pr);
        for i in 0..nrows {
            if i != r && rows[i] >> c & 1 == 1 {
                rows[i] ^= rows[r];
                let v = rhs[r];
                rhs[i] ^= v;
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    // monomials of degree <= 3 are linearly independent on the nonzero
    // inputs, so the system is always full row rank and hence solvable
    for i in r..nrows {
        assert!(!rhs[i], "inconsistent signature system");
    }

    // particular solution: free variables zero
    let mut y0 = 0u64;
    for &(pr, pc) in &pivots {
        if rhs[pr] {
            y0 |= 1u64 << pc;
        }
    }
    // null space basis, one vector per free column in increasing order
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut is_pivot = vec![false; ncols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let mut basis: Vec<u64> = Vec::new();
    for f in 0..ncols {
        if is_pivot[f] {
            continue;
        }
        let mut v = 1u64 << f;
        for &(pr, pc) in &pivots {
            if rows[pr] >> f & 1 == 1 {
                v |= 1u64 << pc;
            }
        }
        basis.push(v);
    }

    // Gray-code walk of the coset y0 + span(basis)
    let mut best = y0;
    let mut best_w = y0.count_ones();
    let mut cur = y0;
    for i in 1u64..(1u64 << basis.len()) {
        cur ^= basis[i.trailing_zeros() as usize];
        let w = cur.count_ones();
        if w < best_w {
            best_w = w;
            best = cur;
        }
    }

    let mut cols = Vec::with_capacity(best_w as usize);
    for v in 1..=ncols {
        if best >> (v - 1) & 1 == 1 {
            let mut col = BitVec::zeros(n);
            for i in 0..n {
                if v >> i & 1 == 1 {
                    col.set(i, true);
                }
            }
            cols.push(col);
        }
    }
    Ok(GateSynthesisMatrix::from_cols(n, cols))
}
