//! Algebraic representations of diagonal CNOT+T operators and the
//! conversions between them.
//!
//! A diagonal CNOT+T unitary acts as |x> -> w^f(x) |x> with w = e^{i pi/4}.
//! The phase function f is carried in three interchangeable forms:
//!
//! * [`WeightedPolynomial`] — Z8 coefficients over linear, quadratic and
//!   cubic monomials, weighted 1/2/4 per degree;
//! * [`PhasePolynomial`] — Z8 coefficients over linear boolean forms, the
//!   representation lifted directly from a circuit;
//! * [`GateSynthesisMatrix`] — a GF(2) matrix A with f(x) = |A^T x| mod 8;
//!   the column count of its proper form is the T count of the circuit it
//!   synthesizes back into.
//!
//! The parity content of f (its Clifford-equivalence class) is the symmetric
//! order-3 [`SignatureTensor3`], which is what the optimizers re-factorize.

use crate::circuit::{Circuit, Gate};
use crate::gf2::{BitMatrix, BitVec};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhaseError {
    #[error("unsupported gate in diagonal block: {0}")]
    UnsupportedGate(String),
}

pub(crate) fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Rank of the pair {a,b} (a<b) in lexicographic order over n indices.
pub(crate) fn pair_rank(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Rank of the triple {a,b,c} (a<b<c) in lexicographic order over n indices.
pub(crate) fn triple_rank(n: usize, a: usize, b: usize, c: usize) -> usize {
    debug_assert!(a < b && b < c && c < n);
    let mut r = 0;
    for i in 0..a {
        r += binom(n - 1 - i, 2);
    }
    for j in a + 1..b {
        r += n - 1 - j;
    }
    r + (c - b - 1)
}

/// Z8-coefficient polynomial f(x) = sum l.x + 2 sum q.xx + 4 sum c.xxx mod 8.
///
/// Coefficients are stored mod 8 throughout, even though the weights make
/// quadratic terms effective mod 4 and cubic terms mod 2; the redundancy is
/// what lets the diagonal Clifford correction be computed by plain
/// coefficient subtraction.
#[derive(Clone, PartialEq, Eq)]
pub struct WeightedPolynomial {
    n: usize,
    lin: Vec<u8>,
    quad: Vec<u8>,
    cub: Vec<u8>,
}

impl WeightedPolynomial {
    pub fn new(n: usize) -> Self {
        WeightedPolynomial {
            n,
            lin: vec![0; n],
            quad: vec![0; binom(n, 2)],
            cub: vec![0; binom(n, 3)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lin(&self, a: usize) -> u8 {
        self.lin[a]
    }

    pub fn quad(&self, a: usize, b: usize) -> u8 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.quad[pair_rank(self.n, a, b)]
    }

    pub fn cub(&self, a: usize, b: usize, c: usize) -> u8 {
        let mut v = [a, b, c];
        v.sort_unstable();
        self.cub[triple_rank(self.n, v[0], v[1], v[2])]
    }

    pub fn add_lin(&mut self, a: usize, coeff: u8) {
        self.lin[a] = (self.lin[a] + coeff) & 7;
    }

    pub fn add_quad(&mut self, a: usize, b: usize, coeff: u8) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let idx = pair_rank(self.n, a, b);
        self.quad[idx] = (self.quad[idx] + coeff) & 7;
    }

    pub fn add_cub(&mut self, a: usize, b: usize, c: usize, coeff: u8) {
        let mut v = [a, b, c];
        v.sort_unstable();
        let idx = triple_rank(self.n, v[0], v[1], v[2]);
        self.cub[idx] = (self.cub[idx] + coeff) & 7;
    }

    pub fn is_zero(&self) -> bool {
        self.lin.iter().all(|&c| c == 0)
            && self.quad.iter().all(|&c| c == 0)
            && self.cub.iter().all(|&c| c == 0)
    }

    /// Coefficient-wise difference mod 8.
    pub fn sub(&self, other: &WeightedPolynomial) -> WeightedPolynomial {
        assert_eq!(self.n, other.n);
        let take = |a: &[u8], b: &[u8]| -> Vec<u8> {
            a.iter().zip(b).map(|(&x, &y)| (x + 8 - y) & 7).collect()
        };
        WeightedPolynomial {
            n: self.n,
            lin: take(&self.lin, &other.lin),
            quad: take(&self.quad, &other.quad),
            cub: take(&self.cub, &other.cub),
        }
    }

    /// Coefficient-wise sum mod 8.
    pub fn add(&self, other: &WeightedPolynomial) -> WeightedPolynomial {
        assert_eq!(self.n, other.n);
        let take = |a: &[u8], b: &[u8]| -> Vec<u8> {
            a.iter().zip(b).map(|(&x, &y)| (x + y) & 7).collect()
        };
        WeightedPolynomial {
            n: self.n,
            lin: take(&self.lin, &other.lin),
            quad: take(&self.quad, &other.quad),
            cub: take(&self.cub, &other.cub),
        }
    }

    /// Evaluates f(x) mod 8.
    pub fn eval(&self, x: &BitVec) -> u8 {
        assert_eq!(x.len(), self.n);
        let ones: Vec<usize> = x.iter_ones().collect();
        let mut acc = 0u32;
        for &a in &ones {
            acc += self.lin[a] as u32;
        }
        for i in 0..ones.len() {
            for j in i + 1..ones.len() {
                acc += 2 * self.quad[pair_rank(self.n, ones[i], ones[j])] as u32;
            }
        }
        for i in 0..ones.len() {
            for j in i + 1..ones.len() {
                for k in j + 1..ones.len() {
                    acc += 4 * self.cub[triple_rank(self.n, ones[i], ones[j], ones[k])] as u32;
                }
            }
        }
        (acc & 7) as u8
    }

    /// Semantic degree: 3 only if some cubic term survives the weight-4
    /// factor, 2 if some quadratic survives weight 2, and so on.
    pub fn degree(&self) -> usize {
        if self.cub.iter().any(|&c| c % 2 != 0) {
            3
        } else if self.quad.iter().any(|&c| c % 4 != 0) {
            2
        } else if self.lin.iter().any(|&c| c != 0) {
            1
        } else {
            0
        }
    }

    /// Variables with at least one term of nonzero coefficient.
    pub fn dependent_vars(&self) -> Vec<usize> {
        let mut dep = vec![false; self.n];
        for (a, &c) in self.lin.iter().enumerate() {
            if c != 0 {
                dep[a] = true;
            }
        }
        let mut idx = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.quad[idx] % 4 != 0 {
                    dep[a] = true;
                    dep[b] = true;
                }
                idx += 1;
            }
        }
        let mut idx = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                for c in b + 1..self.n {
                    if self.cub[idx] % 2 != 0 {
                        dep[a] = true;
                        dep[b] = true;
                        dep[c] = true;
                    }
                    idx += 1;
                }
            }
        }
        (0..self.n).filter(|&i| dep[i]).collect()
    }

    /// Parity tensor of the coefficients.
    pub fn signature(&self) -> SignatureTensor3 {
        let mut s = SignatureTensor3::new(self.n);
        for (a, &c) in self.lin.iter().enumerate() {
            if c % 2 == 1 {
                s.diag.set(a, true);
            }
        }
        for (i, &c) in self.quad.iter().enumerate() {
            if c % 2 == 1 {
                s.quad.set(i, true);
            }
        }
        for (i, &c) in self.cub.iter().enumerate() {
            if c % 2 == 1 {
                s.cub.set(i, true);
            }
        }
        s
    }

    pub fn same_parity(&self, other: &WeightedPolynomial) -> bool {
        self.signature() == other.signature()
    }

    /// Copy with every coefficient of a term containing x_c zeroed.
    pub fn without_var(&self, c: usize) -> WeightedPolynomial {
        let mut out = self.clone();
        out.lin[c] = 0;
        for a in 0..self.n {
            if a != c {
                let (lo, hi) = if a < c { (a, c) } else { (c, a) };
                out.quad[pair_rank(self.n, lo, hi)] = 0;
            }
        }
        for a in 0..self.n {
            for b in a + 1..self.n {
                if a == c || b == c {
                    continue;
                }
                let mut t = [a, b, c];
                t.sort_unstable();
                out.cub[triple_rank(self.n, t[0], t[1], t[2])] = 0;
            }
        }
        out
    }
}

impl std::fmt::Debug for WeightedPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for (a, &c) in self.lin.iter().enumerate() {
            if c != 0 {
                parts.push(format!("{c}.x{a}"));
            }
        }
        let mut idx = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.quad[idx] != 0 {
                    parts.push(format!("2({}.x{a}x{b})", self.quad[idx]));
                }
                idx += 1;
            }
        }
        let mut idx = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                for c in b + 1..self.n {
                    if self.cub[idx] != 0 {
                        parts.push(format!("4({}.x{a}x{b}x{c})", self.cub[idx]));
                    }
                    idx += 1;
                }
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Z8-weighted sum of linear boolean forms: f(x) = sum a_k . lambda_k(x).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePolynomial {
    n: usize,
    terms: Vec<(BitVec, u8)>,
    index: HashMap<BitVec, usize>,
}

impl PhasePolynomial {
    pub fn new(n: usize) -> Self {
        PhasePolynomial { n, terms: Vec::new(), index: HashMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `coeff` to the term for `form`, merging with any existing term.
    pub fn add_term(&mut self, form: BitVec, coeff: u8) {
        assert_eq!(form.len(), self.n);
        assert!(!form.is_zero(), "phase polynomial forms must be nonzero");
        match self.index.get(&form) {
            Some(&i) => self.terms[i].1 = (self.terms[i].1 + coeff) & 7,
            None => {
                self.index.insert(form.clone(), self.terms.len());
                self.terms.push((form, coeff & 7));
            }
        }
    }

    /// Non-vanishing terms in first-insertion order.
    pub fn terms(&self) -> impl Iterator<Item = (&BitVec, u8)> {
        self.terms.iter().filter(|(_, a)| *a != 0).map(|(v, a)| (v, *a))
    }

    pub fn eval(&self, x: &BitVec) -> u8 {
        let mut acc = 0u32;
        for (form, a) in self.terms() {
            if form.dot(x) {
                acc += a as u32;
            }
        }
        (acc & 7) as u8
    }

    /// Expands each form through the inclusion-exclusion identity
    /// 2ab = a + b - (a xor b): a term (lambda, a) with support V contributes
    /// +a to every linear slot in V, -a to every pair and +a to every triple;
    /// supports of size >= 4 add nothing past degree 3 (weight 2^{r-1} = 0
    /// mod 8).
    pub fn to_weighted(&self) -> WeightedPolynomial {
        let mut w = WeightedPolynomial::new(self.n);
        for (form, a) in self.terms() {
            let vars: Vec<usize> = form.iter_ones().collect();
            for i in 0..vars.len() {
                w.add_lin(vars[i], a);
                for j in i + 1..vars.len() {
                    w.add_quad(vars[i], vars[j], 8 - a);
                    for k in j + 1..vars.len() {
                        w.add_cub(vars[i], vars[j], vars[k], a);
                    }
                }
            }
        }
        w
    }

    /// Gate synthesis matrix with `a_k` copies of each term's column vector.
    pub fn to_gsm(&self) -> GateSynthesisMatrix {
        let mut cols = Vec::new();
        for (form, a) in self.terms() {
            for _ in 0..a {
                cols.push(form.clone());
            }
        }
        GateSynthesisMatrix::from_cols(self.n, cols)
    }
}

/// Symmetric order-3 GF(2) tensor of coefficient parities. Only the
/// independent entries are stored: one bit per index, per unordered pair
/// (which ties S_aab to S_abb) and per unordered triple.
#[derive(Clone, PartialEq, Eq)]
pub struct SignatureTensor3 {
    n: usize,
    pub(crate) diag: BitVec,
    pub(crate) quad: BitVec,
    pub(crate) cub: BitVec,
}

impl SignatureTensor3 {
    pub fn new(n: usize) -> Self {
        SignatureTensor3 {
            n,
            diag: BitVec::zeros(n),
            quad: BitVec::zeros(binom(n, 2)),
            cub: BitVec::zeros(binom(n, 3)),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// S_{a,b,g} for arbitrary index order.
    pub fn get(&self, a: usize, b: usize, g: usize) -> bool {
        let mut v = [a, b, g];
        v.sort_unstable();
        let [a, b, g] = v;
        if a == b && b == g {
            self.diag.get(a)
        } else if a == b {
            self.quad.get(pair_rank(self.n, a, g))
        } else if b == g {
            self.quad.get(pair_rank(self.n, a, b))
        } else {
            self.cub.get(triple_rank(self.n, a, b, g))
        }
    }

    pub fn set_diag(&mut self, a: usize, v: bool) {
        self.diag.set(a, v);
    }

    pub fn set_pair(&mut self, a: usize, b: usize, v: bool) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.quad.set(pair_rank(self.n, a, b), v);
    }

    pub fn set_triple(&mut self, a: usize, b: usize, c: usize, v: bool) {
        let mut t = [a, b, c];
        t.sort_unstable();
        self.cub.set(triple_rank(self.n, t[0], t[1], t[2]), v);
    }

    pub fn is_zero(&self) -> bool {
        self.diag.is_zero() && self.quad.is_zero() && self.cub.is_zero()
    }

    /// Number of independent entries: n + C(n,2) + C(n,3).
    pub fn entry_count(&self) -> usize {
        self.n + binom(self.n, 2) + binom(self.n, 3)
    }

    /// The canonical weighted polynomial with odd coefficients exactly where
    /// the tensor is 1. Any member of the Clifford-equivalence class works
    /// for synthesis purposes.
    pub fn canonical_weighted(&self) -> WeightedPolynomial {
        let mut w = WeightedPolynomial::new(self.n);
        for a in self.diag.iter_ones() {
            w.add_lin(a, 1);
        }
        let mut idx = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.quad.get(idx) {
                    w.add_quad(a, b, 1);
                }
                idx += 1;
            }
        }
        let mut idx = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                for c in b + 1..self.n {
                    if self.cub.get(idx) {
                        w.add_cub(a, b, c, 1);
                    }
                    idx += 1;
                }
            }
        }
        w
    }

    /// Restriction to a subset of variables. Faithful only when every entry
    /// touching a variable outside `vars` is zero.
    pub fn restrict(&self, vars: &[usize]) -> SignatureTensor3 {
        let m = vars.len();
        let mut s = SignatureTensor3::new(m);
        for i in 0..m {
            s.set_diag(i, self.get(vars[i], vars[i], vars[i]));
            for j in i + 1..m {
                s.set_pair(i, j, self.get(vars[i], vars[i], vars[j]));
                for k in j + 1..m {
                    s.set_triple(i, j, k, self.get(vars[i], vars[j], vars[k]));
                }
            }
        }
        s
    }
}

impl std::fmt::Debug for SignatureTensor3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SignatureTensor3(n={}, diag={:?}, pairs={:?}, triples={:?})",
            self.n, self.diag, self.quad, self.cub
        )
    }
}

/// Symmetric GF(2) matrix, the order-2 analogue of the signature tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureMatrix2 {
    mat: BitMatrix,
}

impl SignatureMatrix2 {
    pub fn new(n: usize) -> Self {
        SignatureMatrix2 { mat: BitMatrix::zeros(n, n) }
    }

    pub fn from_matrix(mat: BitMatrix) -> Self {
        assert_eq!(mat.rows(), mat.cols());
        for a in 0..mat.rows() {
            for b in a + 1..mat.cols() {
                assert_eq!(mat.get(a, b), mat.get(b, a), "matrix not symmetric");
            }
        }
        SignatureMatrix2 { mat }
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn get(&self, a: usize, b: usize) -> bool {
        self.mat.get(a, b)
    }

    pub fn set(&mut self, a: usize, b: usize, v: bool) {
        self.mat.set(a, b, v);
        self.mat.set(b, a, v);
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }

    pub fn rank(&self) -> usize {
        self.mat.rank()
    }

    /// 1 if the diagonal is all zero, else 0.
    pub fn delta(&self) -> usize {
        if (0..self.n()).all(|a| !self.mat.get(a, a)) {
            1
        } else {
            0
        }
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.mat
    }
}

/// GF(2) matrix A whose columns are linear forms; f(x) = |A^T x| mod 8.
#[derive(Clone, PartialEq, Eq)]
pub struct GateSynthesisMatrix {
    pub mat: BitMatrix,
}

impl GateSynthesisMatrix {
    pub fn empty(n: usize) -> Self {
        GateSynthesisMatrix { mat: BitMatrix::zeros(n, 0) }
    }

    pub fn from_cols(n: usize, cols: Vec<BitVec>) -> Self {
        GateSynthesisMatrix { mat: BitMatrix::from_cols(n, &cols) }
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn cols(&self) -> usize {
        self.mat.cols()
    }

    pub fn col(&self, j: usize) -> BitVec {
        self.mat.col_vec(j)
    }

    pub fn columns(&self) -> Vec<BitVec> {
        (0..self.cols()).map(|j| self.col(j)).collect()
    }

    /// Removes all-zero columns and pairs of repeated columns, keeping the
    /// first-occurrence order of surviving columns. Strips exactly the
    /// Clifford content: the signature tensor is unchanged.
    pub fn proper(&self) -> GateSynthesisMatrix {
        let cols = self.columns();
        let mut count: HashMap<&BitVec, usize> = HashMap::new();
        for c in &cols {
            *count.entry(c).or_insert(0) += 1;
        }
        let mut emitted: HashMap<&BitVec, bool> = HashMap::new();
        let mut keep = Vec::new();
        for c in &cols {
            if c.is_zero() {
                continue;
            }
            if count[c] % 2 == 1 && !emitted.get(c).copied().unwrap_or(false) {
                emitted.insert(c, true);
                keep.push(c.clone());
            }
        }
        GateSynthesisMatrix::from_cols(self.n(), keep)
    }

    /// f(x) = |A^T x| mod 8.
    pub fn eval_phase(&self, x: &BitVec) -> u8 {
        assert_eq!(x.len(), self.n());
        // XOR of the rows selected by x gives lambda_j(x) across all j
        let mut acc = BitVec::zeros(self.cols());
        for r in x.iter_ones() {
            acc.xor_assign(&self.mat.row_vec(r));
        }
        (acc.weight() & 7) as u8
    }

    /// S_{a,b,g} = sum_j A_aj A_bj A_gj mod 2 over the independent entries.
    pub fn signature(&self) -> SignatureTensor3 {
        let n = self.n();
        let mut s = SignatureTensor3::new(n);
        let rows: Vec<BitVec> = (0..n).map(|r| self.mat.row_vec(r)).collect();
        for a in 0..n {
            if rows[a].weight() % 2 == 1 {
                s.diag.set(a, true);
            }
        }
        let mut idx = 0;
        for a in 0..n {
            for b in a + 1..n {
                if rows[a].and(&rows[b]).weight() % 2 == 1 {
                    s.quad.set(idx, true);
                }
                idx += 1;
            }
        }
        let mut idx = 0;
        for a in 0..n {
            for b in a + 1..n {
                let ab = rows[a].and(&rows[b]);
                for c in b + 1..n {
                    if ab.and(&rows[c]).weight() % 2 == 1 {
                        s.cub.set(idx, true);
                    }
                    idx += 1;
                }
            }
        }
        s
    }

    /// Order-2 signature A A^T.
    pub fn signature2(&self) -> SignatureMatrix2 {
        let n = self.n();
        let mut s = SignatureMatrix2::new(n);
        let rows: Vec<BitVec> = (0..n).map(|r| self.mat.row_vec(r)).collect();
        for a in 0..n {
            s.set(a, a, rows[a].weight() % 2 == 1);
            for b in a + 1..n {
                s.set(a, b, rows[a].and(&rows[b]).weight() % 2 == 1);
            }
        }
        s
    }

    /// Constraint rows of the column-duplication transformation for the
    /// difference vector `z`: one row per 3-combination {a,b,g} of distinct
    /// row indices, in lexicographic order,
    /// R = (z_a r_b ^ r_g) xor (z_b r_g ^ r_a) xor (z_g r_a ^ r_b)
    /// where ^ here is the element-wise product. Duplicate rows are retained.
    pub fn chi(&self, z: &BitVec) -> BitMatrix {
        let n = self.n();
        assert_eq!(z.len(), n);
        let m = self.cols();
        let mut out = BitMatrix::zeros(binom(n, 3), m);
        if n < 3 {
            return out;
        }
        let rows: Vec<BitVec> = (0..n).map(|r| self.mat.row_vec(r)).collect();
        let mut idx = 0;
        for a in 0..n {
            for b in a + 1..n {
                let ab = rows[a].and(&rows[b]);
                for c in b + 1..n {
                    let mut row = BitVec::zeros(m);
                    if z.get(a) {
                        row.xor_assign(&rows[b].and(&rows[c]));
                    }
                    if z.get(b) {
                        row.xor_assign(&rows[c].and(&rows[a]));
                    }
                    if z.get(c) {
                        row.xor_assign(&ab);
                    }
                    out.xor_vec_into_row(idx, &row);
                    idx += 1;
                }
            }
        }
        out
    }

    /// Weighted polynomial of |A^T x|: one unit-coefficient term per column.
    pub fn to_weighted(&self) -> WeightedPolynomial {
        let mut w = WeightedPolynomial::new(self.n());
        for j in 0..self.cols() {
            let vars: Vec<usize> = self.col(j).iter_ones().collect();
            for i in 0..vars.len() {
                w.add_lin(vars[i], 1);
                for k in i + 1..vars.len() {
                    w.add_quad(vars[i], vars[k], 7);
                    for l in k + 1..vars.len() {
                        w.add_cub(vars[i], vars[k], vars[l], 1);
                    }
                }
            }
        }
        w
    }
}

impl std::fmt::Debug for GateSynthesisMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GateSynthesisMatrix {:?}", self.mat)
    }
}

/// Extracts the phase polynomial and linear part of a diagonal CNOT+T
/// circuit by tracking the action of each gate on the computational basis.
/// The circuit's unitary equals U_E . U_f.
pub fn extract(c: &Circuit) -> Result<(PhasePolynomial, BitMatrix), PhaseError> {
    let w = c.width();
    let mut rows: Vec<BitVec> = (0..w).map(|i| BitVec::unit(w, i)).collect();
    let mut pp = PhasePolynomial::new(w);
    for g in &c.gates {
        match g {
            Gate::Cnot { control, target } => {
                let src = rows[*control].clone();
                rows[*target].xor_assign(&src);
            }
            Gate::T(q) => pp.add_term(rows[*q].clone(), 1),
            Gate::Tdg(q) => pp.add_term(rows[*q].clone(), 7),
            Gate::S(q) => pp.add_term(rows[*q].clone(), 2),
            Gate::Sdg(q) => pp.add_term(rows[*q].clone(), 6),
            Gate::Z(q) => pp.add_term(rows[*q].clone(), 4),
            Gate::Cz(a, b) => {
                // 4uv = 2u + 2v - 2(u xor v)
                let (ra, rb) = (rows[*a].clone(), rows[*b].clone());
                pp.add_term(ra.xor(&rb), 6);
                pp.add_term(ra, 2);
                pp.add_term(rb, 2);
            }
            Gate::Cs(a, b) => {
                // 2uv = u + v - (u xor v)
                let (ra, rb) = (rows[*a].clone(), rows[*b].clone());
                pp.add_term(ra.xor(&rb), 7);
                pp.add_term(ra, 1);
                pp.add_term(rb, 1);
            }
            Gate::Ccz(a, b, c) => {
                // 4uvw = u+v+w - (u^v) - (u^w) - (v^w) + (u^v^w)
                let (ra, rb, rc) = (rows[*a].clone(), rows[*b].clone(), rows[*c].clone());
                pp.add_term(ra.xor(&rb), 7);
                pp.add_term(ra.xor(&rc), 7);
                pp.add_term(rb.xor(&rc), 7);
                pp.add_term(ra.xor(&rb).xor(&rc), 1);
                pp.add_term(ra, 1);
                pp.add_term(rb, 1);
                pp.add_term(rc, 1);
            }
            other => {
                return Err(PhaseError::UnsupportedGate(format!("{other:?}")));
            }
        }
    }
    let mut e = BitMatrix::zeros(w, w);
    for (i, r) in rows.iter().enumerate() {
        e.xor_vec_into_row(i, r);
    }
    Ok((pp, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse;

    fn enumerate_inputs(n: usize) -> impl Iterator<Item = BitVec> {
        (0..1usize << n).map(move |bits| {
            let mut v = BitVec::zeros(n);
            for i in 0..n {
                if bits >> i & 1 == 1 {
                    v.set(i, true);
                }
            }
            v
        })
    }

    #[test]
    fn rank_helpers_enumerate_lexicographically() {
        let n = 5;
        let mut expect = 0;
        for a in 0..n {
            for b in a + 1..n {
                assert_eq!(pair_rank(n, a, b), expect);
                expect += 1;
            }
        }
        assert_eq!(expect, binom(n, 2));
        let mut expect = 0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    assert_eq!(triple_rank(n, a, b, c), expect);
                    expect += 1;
                }
            }
        }
        assert_eq!(expect, binom(n, 3));
    }

    #[test]
    fn extract_single_t() {
        let c = parse("qubits 1\nT q0").unwrap();
        let (pp, e) = extract(&c).unwrap();
        assert_eq!(e, BitMatrix::identity(1));
        let terms: Vec<_> = pp.terms().collect();
        assert_eq!(terms, vec![(&BitVec::unit(1, 0), 1)]);
    }

    #[test]
    fn extract_cnot_t() {
        let c = parse("qubits 2\nCNOT q0 q1\nT q1").unwrap();
        let (pp, e) = extract(&c).unwrap();
        let expect_form = BitVec::from_bits(&[true, true]);
        assert_eq!(pp.terms().collect::<Vec<_>>(), vec![(&expect_form, 1)]);
        let expect_e = BitMatrix::from_rows(&[&[true, false], &[true, true]]);
        assert_eq!(e, expect_e);
    }

    #[test]
    fn extract_s_t_merges() {
        let c = parse("qubits 1\nS q0\nT q0").unwrap();
        let (pp, e) = extract(&c).unwrap();
        assert_eq!(e, BitMatrix::identity(1));
        assert_eq!(pp.terms().collect::<Vec<_>>(), vec![(&BitVec::unit(1, 0), 3)]);
    }

    #[test]
    fn extract_rejects_h_and_measurement() {
        assert!(extract(&parse("qubits 1\nH q0").unwrap()).is_err());
        assert!(extract(&parse("qubits 1\nmeasx q0 -> m0").unwrap()).is_err());
    }

    #[test]
    fn extract_ccz_matches_simulator_phase() {
        // the CCZ expansion evaluates to 4*x0*x1*x2 on every input
        let c = parse("qubits 3\nCCZ q0 q1 q2").unwrap();
        let (pp, _) = extract(&c).unwrap();
        for x in enumerate_inputs(3) {
            let expect = if x.weight() == 3 { 4 } else { 0 };
            assert_eq!(pp.eval(&x), expect);
        }
    }

    #[test]
    fn wp_from_pp_examples() {
        let mut p = PhasePolynomial::new(2);
        p.add_term(BitVec::unit(2, 0), 1);
        let w = p.to_weighted();
        assert_eq!((w.lin(0), w.lin(1), w.quad(0, 1)), (1, 0, 0));

        let mut p = PhasePolynomial::new(2);
        p.add_term(BitVec::from_bits(&[true, true]), 1);
        let w = p.to_weighted();
        assert_eq!((w.lin(0), w.lin(1), w.quad(0, 1)), (1, 1, 7));
        for x in enumerate_inputs(2) {
            assert_eq!(p.eval(&x), w.eval(&x));
        }

        let mut p = PhasePolynomial::new(3);
        p.add_term(BitVec::from_bits(&[true, true, true]), 1);
        let w = p.to_weighted();
        assert_eq!((w.lin(0), w.lin(1), w.lin(2)), (1, 1, 1));
        assert_eq!((w.quad(0, 1), w.quad(0, 2), w.quad(1, 2)), (7, 7, 7));
        assert_eq!(w.cub(0, 1, 2), 1);
        for x in enumerate_inputs(3) {
            assert_eq!(p.eval(&x), w.eval(&x));
        }
    }

    #[test]
    fn signature_from_wp_examples() {
        let mut w = WeightedPolynomial::new(3);
        w.add_cub(0, 1, 2, 1);
        let s = w.signature();
        assert!(s.get(0, 1, 2) && s.get(2, 0, 1));
        assert!(!s.get(0, 0, 0) && !s.get(0, 0, 1));

        let mut w = WeightedPolynomial::new(2);
        w.add_lin(0, 2);
        assert!(w.signature().is_zero());

        let mut w = WeightedPolynomial::new(2);
        w.add_quad(0, 1, 3);
        let s = w.signature();
        assert!(s.get(0, 0, 1) && s.get(0, 1, 1));
        assert!(!s.get(0, 0, 0));
    }

    #[test]
    fn pp_to_a_multiplicity() {
        let mut p = PhasePolynomial::new(1);
        p.add_term(BitVec::unit(1, 0), 3);
        assert_eq!(p.to_gsm().cols(), 3);

        let mut p = PhasePolynomial::new(2);
        p.add_term(BitVec::from_bits(&[true, true]), 7);
        assert_eq!(p.to_gsm().cols(), 7);
    }

    #[test]
    fn proper_examples() {
        let e1 = BitVec::unit(2, 0);
        let e2 = BitVec::unit(2, 1);
        let a = GateSynthesisMatrix::from_cols(2, vec![e1.clone(), e1.clone(), e1.clone()]);
        assert_eq!(a.proper().columns(), vec![e1.clone()]);

        let a = GateSynthesisMatrix::from_cols(2, vec![BitVec::zeros(2), e2.clone()]);
        assert_eq!(a.proper().columns(), vec![e2.clone()]);

        let a = GateSynthesisMatrix::from_cols(
            2,
            vec![e1.clone(), e2.clone(), e1.clone(), e2.clone()],
        );
        assert_eq!(a.proper().cols(), 0);
    }

    #[test]
    fn signature_from_a_examples() {
        let a = GateSynthesisMatrix { mat: BitMatrix::identity(3) };
        let s = a.signature();
        for i in 0..3 {
            assert!(s.get(i, i, i));
        }
        assert!(!s.get(0, 0, 1) && !s.get(0, 1, 2));

        let a = GateSynthesisMatrix::from_cols(3, vec![BitVec::from_bits(&[true, true, false])]);
        let s = a.signature();
        assert!(s.get(0, 0, 0) && s.get(1, 1, 1) && s.get(0, 0, 1) && s.get(0, 1, 1));
        assert!(!s.get(0, 1, 2) && !s.get(2, 2, 2));

        let c = BitVec::from_bits(&[true, true, false]);
        let a = GateSynthesisMatrix::from_cols(3, vec![c.clone(), c]);
        assert!(a.signature().is_zero());
    }

    #[test]
    fn eval_phase_examples() {
        let a = GateSynthesisMatrix::from_cols(2, vec![BitVec::unit(2, 0)]);
        assert_eq!(a.eval_phase(&BitVec::from_bits(&[true, false])), 1);

        let a = GateSynthesisMatrix::from_cols(2, vec![BitVec::from_bits(&[true, true])]);
        assert_eq!(a.eval_phase(&BitVec::from_bits(&[true, true])), 0);

        let a = GateSynthesisMatrix::from_cols(
            2,
            vec![
                BitVec::unit(2, 0),
                BitVec::unit(2, 1),
                BitVec::from_bits(&[true, true]),
            ],
        );
        assert_eq!(a.eval_phase(&BitVec::from_bits(&[true, false])), 2);
    }

    #[test]
    fn chi_examples() {
        let a = GateSynthesisMatrix { mat: BitMatrix::identity(3) };
        assert!(a.chi(&BitVec::zeros(3)).is_zero());

        let a2 = GateSynthesisMatrix { mat: BitMatrix::identity(2) };
        assert_eq!(a2.chi(&BitVec::zeros(2)).rows(), 0);

        let chi = a.chi(&BitVec::from_bits(&[true, true, false]));
        assert_eq!((chi.rows(), chi.cols()), (1, 3));
        assert!(chi.is_zero());

        let a4 = GateSynthesisMatrix { mat: BitMatrix::identity(4) };
        assert_eq!(a4.chi(&BitVec::zeros(4)).rows(), binom(4, 3));
    }

    #[test]
    fn wp_from_a_matches_pp_route() {
        let a = GateSynthesisMatrix::from_cols(2, vec![BitVec::from_bits(&[true, true])]);
        let w = a.to_weighted();
        assert_eq!((w.lin(0), w.lin(1), w.quad(0, 1)), (1, 1, 7));
        assert!(GateSynthesisMatrix::empty(3).to_weighted().is_zero());
    }

    #[test]
    fn signature_routes_agree_on_random_phase_polys() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(1..=8);
            let mut p = PhasePolynomial::new(n);
            for _ in 0..rng.gen_range(1..10) {
                let mut form = BitVec::zeros(n);
                for i in 0..n {
                    form.set(i, rng.gen_bool(0.5));
                }
                if form.is_zero() {
                    continue;
                }
                p.add_term(form, rng.gen_range(0..8));
            }
            let a = p.to_gsm();
            for x in enumerate_inputs(n) {
                assert_eq!(a.eval_phase(&x), p.eval(&x));
                assert_eq!(p.to_weighted().eval(&x), p.eval(&x));
            }
            assert_eq!(a.signature(), p.to_weighted().signature());
            assert_eq!(a.proper().signature(), a.signature());
        }
    }
}
