//! Dense bit-packed vectors and matrices over GF(2).
//!
//! Everything downstream (phase polynomials, tensor factorization, CNOT
//! synthesis) is built on these two types. Semantics are per-bit; the u64
//! packing is an internal detail.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("matrix is singular (rank {rank} < {dim})")]
    SingularMatrix { rank: usize, dim: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Packed bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Unit vector e_i of the given length.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {} out of range {}", i, self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {} out of range {}", i, self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of unequal-length vectors");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Element-wise AND.
    pub fn and(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "and of unequal-length vectors");
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w &= o;
        }
        out
    }

    /// Hamming weight |v|.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product <self, other> over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Copy with the length grown to `new_len` (new bits zero).
    pub fn resized(&self, new_len: usize) -> BitVec {
        assert!(new_len >= self.len);
        let mut out = BitVec::zeros(new_len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        out
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { 1 } else { 0 })?;
        }
        Ok(())
    }
}

/// Dense GF(2) matrix, row-major bit packing.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    wpr: usize, // words per row
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols);
        BitMatrix {
            rows,
            cols,
            wpr,
            data: vec![0; rows * wpr],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[&[bool]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        m
    }

    /// Builds a matrix from column vectors (all of equal length).
    pub fn from_cols(rows: usize, cols: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for i in c.iter_ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        (self.data[r * self.wpr + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        let mask = 1u64 << (c % WORD_BITS);
        let w = &mut self.data[r * self.wpr + c / WORD_BITS];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.wpr..(r + 1) * self.wpr]
    }

    pub fn row_vec(&self, r: usize) -> BitVec {
        BitVec {
            len: self.cols,
            words: self.row(r).to_vec(),
        }
    }

    pub fn col_vec(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        assert!(src != dst);
        let (s, d) = (src * self.wpr, dst * self.wpr);
        for k in 0..self.wpr {
            let v = self.data[s + k];
            self.data[d + k] ^= v;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.wpr {
            self.data.swap(a * self.wpr + k, b * self.wpr + k);
        }
    }

    /// XORs `v` (length = cols) into row `r`.
    pub fn xor_vec_into_row(&mut self, r: usize, v: &BitVec) {
        assert_eq!(v.len(), self.cols);
        for (d, s) in self.data[r * self.wpr..(r + 1) * self.wpr]
            .iter_mut()
            .zip(v.words())
        {
            *d ^= s;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "product dimension mismatch");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let (dst, src) = (r * out.wpr, k * other.wpr);
                    for w in 0..out.wpr {
                        out.data[dst + w] ^= other.data[src + w];
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product M·v over GF(2).
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(self.cols, v.len());
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0u64;
            for (a, b) in self.row(r).iter().zip(v.words()) {
                acc ^= a & b;
            }
            if acc.count_ones() % 2 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// Copy with `extra` additional zero columns appended on the right.
    pub fn widen(&self, extra: usize) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, self.cols + extra);
        for r in 0..self.rows {
            let dst = r * out.wpr;
            let src = r * self.wpr;
            out.data[dst..dst + self.wpr].copy_from_slice(&self.data[src..src + self.wpr]);
        }
        out
    }

    /// Stacks `self` on top of `other` (same column count).
    pub fn stack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "stack column mismatch");
        let mut out = BitMatrix::zeros(self.rows + other.rows, self.cols);
        out.data[..self.data.len()].copy_from_slice(&self.data);
        out.data[self.data.len()..].copy_from_slice(&other.data);
        out
    }

    /// Row-reduces in place; returns pivot columns. Full RREF (eliminates
    /// above and below the pivots), so the result is canonical per input.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r >= self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, pr);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// GF(2) rank.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Right null space basis, one basis vector per column. Derived from the
    /// reduced row-echelon form, so the basis is canonical per input: free
    /// columns are visited in increasing order.
    pub fn nullspace(&self) -> BitMatrix {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = BitMatrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis.set(f, k, true);
            for (i, &p) in pivots.iter().enumerate() {
                if m.get(i, f) {
                    basis.set(p, k, true);
                }
            }
        }
        basis
    }

    /// Inverse of a square matrix.
    pub fn invert(&self) -> Result<BitMatrix, Gf2Error> {
        if self.rows != self.cols {
            return Err(Gf2Error::DimensionMismatch(format!(
                "invert of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        // augmented [M | I], reduce left half to identity
        let mut aug = BitMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, n + r, true);
        }
        let mut rank = 0;
        for c in 0..n {
            let Some(pr) = (rank..n).find(|&i| aug.get(i, c)) else {
                continue;
            };
            aug.swap_rows(rank, pr);
            for i in 0..n {
                if i != rank && aug.get(i, c) {
                    aug.xor_row_into(rank, i);
                }
            }
            rank += 1;
        }
        if rank < n {
            return Err(Gf2Error::SingularMatrix { rank, dim: n });
        }
        let mut inv = BitMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                if aug.get(r, n + c) {
                    inv.set(r, c, true);
                }
            }
        }
        Ok(inv)
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", if self.get(r, c) { 1 } else { 0 })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[u8]]) -> BitMatrix {
        let bools: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.iter().map(|&b| b == 1).collect())
            .collect();
        let refs: Vec<&[bool]> = bools.iter().map(|r| r.as_slice()).collect();
        BitMatrix::from_rows(&refs)
    }

    #[test]
    fn rank_identity() {
        assert_eq!(BitMatrix::identity(4).rank(), 4);
    }

    #[test]
    fn rank_zero() {
        assert_eq!(BitMatrix::zeros(3, 5).rank(), 0);
    }

    #[test]
    fn rank_dependent_rows() {
        assert_eq!(mat(&[&[1, 1], &[1, 1]]).rank(), 1);
    }

    #[test]
    fn nullspace_single_row() {
        let n = mat(&[&[1, 1]]).nullspace();
        assert_eq!((n.rows(), n.cols()), (2, 1));
        assert!(n.get(0, 0) && n.get(1, 0));
    }

    #[test]
    fn nullspace_identity_is_empty() {
        let n = BitMatrix::identity(5).nullspace();
        assert_eq!((n.rows(), n.cols()), (5, 0));
    }

    #[test]
    fn nullspace_hand_solved() {
        // x1 + x3 = 0, x2 + x3 = 0 -> (1,1,1)
        let n = mat(&[&[1, 0, 1], &[0, 1, 1]]).nullspace();
        assert_eq!(n.cols(), 1);
        assert_eq!(n.col_vec(0), BitVec::from_bits(&[true, true, true]));
    }

    #[test]
    fn invert_identity() {
        let inv = BitMatrix::identity(3).invert().unwrap();
        assert_eq!(inv, BitMatrix::identity(3));
    }

    #[test]
    fn invert_cnot_is_self_inverse() {
        let m = mat(&[&[1, 0], &[1, 1]]);
        assert_eq!(m.invert().unwrap(), m);
    }

    #[test]
    fn invert_singular_fails() {
        let err = mat(&[&[1, 1], &[1, 1]]).invert().unwrap_err();
        assert_eq!(err, Gf2Error::SingularMatrix { rank: 1, dim: 2 });
    }

    #[test]
    fn mul_and_transpose() {
        let a = mat(&[&[1, 1], &[0, 1]]);
        let b = mat(&[&[1, 0], &[1, 1]]);
        let ab = a.mul(&b);
        assert_eq!(ab, mat(&[&[0, 1], &[1, 1]]));
        assert_eq!(a.transpose().transpose(), a);
    }

    fn arb_matrix(max_dim: usize) -> impl Strategy<Value = BitMatrix> {
        (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
            proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| {
                let mut m = BitMatrix::zeros(r, c);
                for (k, &b) in bits.iter().enumerate() {
                    m.set(k / c, k % c, b);
                }
                m
            })
        })
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(m in arb_matrix(9)) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn nullspace_annihilates(m in arb_matrix(9)) {
            let n = m.nullspace();
            prop_assert!(m.mul(&n).is_zero());
            prop_assert_eq!(n.cols() + m.rank(), m.cols());
            // basis columns are linearly independent
            prop_assert_eq!(n.rank(), n.cols());
        }

        #[test]
        fn invert_involution(m in arb_matrix(8)) {
            if let Ok(inv) = m.invert() {
                prop_assert_eq!(m.mul(&inv), BitMatrix::identity(m.rows()));
                prop_assert_eq!(inv.invert().unwrap(), m);
            }
        }
    }
}
