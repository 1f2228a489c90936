//! Recursive expansion: the direct O(n^3)-column synthesis.
//!
//! Every monomial of the weighted polynomial is rewritten into linear forms
//! with the identity 2ab = a + b - (a xor b):
//!
//! * x_a stays x_a;
//! * 2 x_a x_b -> x_a + x_b - (x_a xor x_b);
//! * 4 x_a x_b x_c -> x_a + x_b + x_c - (x_a xor x_b) - (x_a xor x_c)
//!   - (x_b xor x_c) + (x_a xor x_b xor x_c).
//!
//! Negative multiplicities become 8 - k copies. The output keeps full
//! multiplicity so it evaluates to f exactly mod 8; after `proper` it has at
//! most n + C(n,2) + C(n,3) columns.

use crate::gf2::BitVec;
use crate::phase::{GateSynthesisMatrix, WeightedPolynomial};

pub fn re_expand(f: &WeightedPolynomial) -> GateSynthesisMatrix {
    let n = f.n();
    let mut cols: Vec<BitVec> = Vec::new();
    let push = |cols: &mut Vec<BitVec>, v: &BitVec, k: u8| {
        for _ in 0..(k & 7) {
            cols.push(v.clone());
        }
    };
    for a in 0..n {
        let k = f.lin(a);
        if k != 0 {
            push(&mut cols, &BitVec::unit(n, a), k);
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let q = f.quad(a, b);
            if q == 0 {
                continue;
            }
            let ea = BitVec::unit(n, a);
            let eb = BitVec::unit(n, b);
            push(&mut cols, &ea, q);
            push(&mut cols, &eb, q);
            push(&mut cols, &ea.xor(&eb), 8 - q);
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let k = f.cub(a, b, c);
                if k == 0 {
                    continue;
                }
                let ea = BitVec::unit(n, a);
                let eb = BitVec::unit(n, b);
                let ec = BitVec::unit(n, c);
                push(&mut cols, &ea, k);
                push(&mut cols, &eb, k);
                push(&mut cols, &ec, k);
                push(&mut cols, &ea.xor(&eb), 8 - k);
                push(&mut cols, &ea.xor(&ec), 8 - k);
                push(&mut cols, &eb.xor(&ec), 8 - k);
                push(&mut cols, &ea.xor(&eb).xor(&ec), k);
            }
        }
    }
    GateSynthesisMatrix::from_cols(n, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(n: usize) -> impl Iterator<Item = BitVec> {
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
    fn linear_term_is_unit_column() {
        let mut f = WeightedPolynomial::new(2);
        f.add_lin(0, 1);
        let a = re_expand(&f);
        assert_eq!(a.proper().columns(), vec![BitVec::unit(2, 0)]);
    }

    #[test]
    fn quadratic_term_expands_to_three() {
        let mut f = WeightedPolynomial::new(2);
        f.add_quad(0, 1, 1);
        let a = re_expand(&f);
        let p = a.proper();
        assert_eq!(p.cols(), 3);
        for x in inputs(2) {
            assert_eq!(a.eval_phase(&x), f.eval(&x));
        }
    }

    #[test]
    fn cubic_term_expands_to_seven() {
        let mut f = WeightedPolynomial::new(3);
        f.add_cub(0, 1, 2, 1);
        let a = re_expand(&f);
        assert_eq!(a.proper().cols(), 7);
        for x in inputs(3) {
            assert_eq!(a.eval_phase(&x), f.eval(&x));
        }
    }

    #[test]
    fn random_polynomials_evaluate_exactly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = rng.gen_range(1..=6);
            let mut f = WeightedPolynomial::new(n);
            for a in 0..n {
                f.add_lin(a, rng.gen_range(0..8));
                for b in a + 1..n {
                    f.add_quad(a, b, rng.gen_range(0..8));
                    for c in b + 1..n {
                        f.add_cub(a, b, c, rng.gen_range(0..8));
                    }
                }
            }
            let a = re_expand(&f);
            for x in inputs(n) {
                assert_eq!(a.eval_phase(&x), f.eval(&x));
            }
            assert_eq!(a.signature(), f.signature());
        }
    }
}
