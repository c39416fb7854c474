//! Smith normal form over the integers with unimodular transforms.

use rug::Integer;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Integer>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Integer::new(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Integer::from(1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Integer>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::invalid("matrix rows have different lengths"));
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Integer::from(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Integer {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Integer) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut m = IntMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    m.data[i * o.cols + j] += Integer::from(a * o.get(k, j));
                }
            }
        }
        m
    }

    /// Determinant by fraction-free Gaussian elimination (Bareiss).
    pub fn determinant(&self) -> Integer {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Integer::from(1);
        }
        let mut a = self.data.clone();
        let mut sign = 1;
        let mut prev = Integer::from(1);
        for k in 0..n {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            a.swap(k * n + j, i * n + j);
                        }
                        sign = -sign;
                    }
                    None => return Integer::new(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = Integer::from(&a[i * n + j] * &a[k * n + k]) - Integer::from(&a[i * n + k] * &a[k * n + j]);
                    a[i * n + j] = v.div_exact(&prev);
                }
            }
            prev = a[k * n + k].clone();
        }
        prev * sign
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] -= q * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: &Integer) {
        for j in 0..self.cols {
            let t = Integer::from(q * &self.data[src * self.cols + j]);
            self.data[dst * self.cols + j] -= t;
        }
    }

    /// col[dst] -= q * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, q: &Integer) {
        for i in 0..self.rows {
            let t = Integer::from(q * &self.data[i * self.cols + src]);
            self.data[i * self.cols + dst] -= t;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = &mut self.data[r * self.cols + j];
            *v = Integer::from(-&*v);
        }
    }
}

/// `U · M · V = S` with `S` diagonal, `d1 | d2 | …`, all `d_i ≥ 0`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<Integer> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s.get(i, i).clone()).collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithForm> {
    if m.rows == 0 || m.cols == 0 {
        return Err(Error::invalid("Smith normal form of an empty matrix"));
    }
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);
    'outer: for t in 0..n {
        loop {
            // pivot: nonzero entry of least absolute value in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..s.rows {
                for j in t..s.cols {
                    let x = s.get(i, j);
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.cmp_abs(s.get(bi, bj)).is_lt()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break 'outer };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..s.rows {
                if !s.get(i, t).is_zero() {
                    let q = q_floor(s.get(i, t), s.get(t, t));
                    s.row_axpy(i, t, &q);
                    u.row_axpy(i, t, &q);
                    dirty |= !s.get(i, t).is_zero();
                }
            }
            for j in t + 1..s.cols {
                if !s.get(t, j).is_zero() {
                    let q = q_floor(s.get(t, j), s.get(t, t));
                    s.col_axpy(j, t, &q);
                    v.col_axpy(j, t, &q);
                    dirty |= !s.get(t, j).is_zero();
                }
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let piv = s.get(t, t).clone();
            let bad = (t + 1..s.rows).find(|&i| (t + 1..s.cols).any(|j| !s.get(i, j).is_divisible(&piv)));
            match bad {
                Some(i) => {
                    let minus_one = Integer::from(-1);
                    s.row_axpy(t, i, &minus_one);
                    u.row_axpy(t, i, &minus_one);
                }
                None => break,
            }
        }
        if *s.get(t, t) < 0 {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    Ok(SmithForm { s, u, v })
}

fn q_floor(a: &Integer, b: &Integer) -> Integer {
    a.clone().div_rem_floor(b.clone()).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(m: &IntMatrix) -> SmithForm {
        let f = smith_normal_form(m).unwrap();
        assert_eq!(f.u.mul(m).mul(&f.v), f.s, "U M V != S");
        let du = f.u.determinant();
        let dv = f.v.determinant();
        assert!(du == 1 || du == -1);
        assert!(dv == 1 || dv == -1);
        for i in 0..f.s.rows() {
            for j in 0..f.s.cols() {
                if i != j {
                    assert!(f.s.get(i, j).is_zero());
                }
            }
        }
        let d = f.diagonal();
        for w in d.windows(2) {
            assert!(w[0] >= 0);
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_divisible(&w[0]), "{} does not divide {}", w[0], w[1]);
            }
        }
        f
    }

    #[test]
    fn identity_is_fixed() {
        let f = check(&IntMatrix::identity(2));
        assert_eq!(f.diagonal(), vec![1, 1]);
    }

    #[test]
    fn diag_two_three() {
        let m = IntMatrix::from_i64_rows(&[&[2, 0], &[0, 3]]).unwrap();
        assert_eq!(check(&m).diagonal(), vec![1, 6]);
    }

    #[test]
    fn zero_matrix() {
        let m = IntMatrix::zeros(2, 3);
        assert_eq!(check(&m).diagonal(), vec![0, 0]);
    }

    #[test]
    fn rectangular_example() {
        let m = IntMatrix::from_i64_rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]).unwrap();
        assert_eq!(check(&m).diagonal(), vec![2, 6, 12]);
        let m = IntMatrix::from_i64_rows(&[&[4, 6], &[2, 2], &[6, 0]]).unwrap();
        assert_eq!(check(&m).diagonal(), vec![2, 2]);
    }

    #[test]
    fn empty_matrix_rejected() {
        assert!(smith_normal_form(&IntMatrix::zeros(0, 3)).is_err());
    }

    #[test]
    fn random_small_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let r = rng.gen_range(1..=4);
            let c = rng.gen_range(1..=4);
            let rows: Vec<Vec<Integer>> =
                (0..r).map(|_| (0..c).map(|_| Integer::from(rng.gen_range(-9i64..=9))).collect()).collect();
            let m = IntMatrix::from_rows(rows).unwrap();
            let f = check(&m);
            if r == c {
                let det = Integer::from(m.determinant().abs_ref());
                if !det.is_zero() {
                    let prod = f.diagonal().iter().fold(Integer::from(1), |a, d| a * d);
                    assert_eq!(prod, det);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn product_of_invariants_is_abs_det(a in -20i64..20, b in -20i64..20, c in -20i64..20, d in -20i64..20) {
            let m = IntMatrix::from_i64_rows(&[&[a, b], &[c, d]]).unwrap();
            let f = check(&m);
            let prod = Integer::from(f.s.get(0, 0) * f.s.get(1, 1));
            prop_assert_eq!(prod, Integer::from((a * d - b * c).abs()));
        }
    }
}
