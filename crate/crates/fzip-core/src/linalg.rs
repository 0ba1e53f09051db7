//! Exact dense linear algebra over the small finite fields.
//!
//! Matrices are row-major.  Subspaces are always handled through their
//! reduced column echelon basis, which is canonical: two subspaces are equal
//! iff their echelon basis matrices are equal, so echelon matrices can be
//! compared and hashed directly.  Column echelon form is defined as the
//! transpose of the reduced row echelon form of the transpose; pivots sit in
//! strictly increasing rows, each pivot is 1 and is the only nonzero entry
//! in its row.

use crate::field::{F, FqField};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<F>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            a: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Mat {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Mat::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Column vector from a slice.
    pub fn col_vec(v: &[F]) -> Mat {
        let mut m = Mat::zero(v.len(), 1);
        for (i, &x) in v.iter().enumerate() {
            m.set(i, 0, x);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.a[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.a[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[F]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self.set(i, j, v[i]);
        }
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut m = Mat::zero(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j));
            }
        }
        m
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Mat {
        let mut m = Mat::zero(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m.set(i, j, self.get(r, c));
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&v| v == 0)
    }

    pub fn mul(&self, f: &FqField, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut m = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(m.get(i, j), f.mul(aik, other.get(k, j)));
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn add(&self, f: &FqField, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for i in 0..self.a.len() {
            m.a[i] = f.add(self.a[i], other.a[i]);
        }
        m
    }

    pub fn sub(&self, f: &FqField, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for i in 0..self.a.len() {
            m.a[i] = f.sub(self.a[i], other.a[i]);
        }
        m
    }

    pub fn scale(&self, f: &FqField, c: F) -> Mat {
        let mut m = self.clone();
        for v in &mut m.a {
            *v = f.mul(*v, c);
        }
        m
    }

    /// Kronecker product, row-major index pairing: row (i1, i2) of the
    /// product is i1 * other.rows + i2.
    pub fn kron(&self, f: &FqField, other: &Mat) -> Mat {
        let mut m = Mat::zero(self.rows * other.rows, self.cols * other.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let v1 = self.get(i1, j1);
                if v1 == 0 {
                    continue;
                }
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        let v = f.mul(v1, other.get(i2, j2));
                        m.set(i1 * other.rows + i2, j1 * other.cols + j2, v);
                    }
                }
            }
        }
        m
    }

    /// Entrywise t-power (the twist on matrices over an extension).
    pub fn pow_entrywise(&self, f: &FqField, t: u64) -> Mat {
        let mut m = self.clone();
        for v in &mut m.a {
            *v = f.power_map(*v, t);
        }
        m
    }

    /// Map entries through an embedding table into a bigger field.
    pub fn map_entries(&self, table: &[F]) -> Mat {
        let mut m = self.clone();
        for v in &mut m.a {
            *v = table[*v as usize];
        }
        m
    }

    /// Reduced row echelon form; returns (rref, pivot columns).
    pub fn rref(&self, f: &FqField) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            let mut sel = None;
            for r in row..m.rows {
                if m.get(r, col) != 0 {
                    sel = Some(r);
                    break;
                }
            }
            let sel = match sel {
                None => continue,
                Some(s) => s,
            };
            for j in 0..m.cols {
                let tmp = m.get(row, j);
                m.set(row, j, m.get(sel, j));
                m.set(sel, j, tmp);
            }
            let pinv = f.inv(m.get(row, col));
            for j in 0..m.cols {
                m.set(row, j, f.mul(m.get(row, j), pinv));
            }
            for r in 0..m.rows {
                if r != row && m.get(r, col) != 0 {
                    let factor = m.get(r, col);
                    for j in 0..m.cols {
                        let v = f.sub(m.get(r, j), f.mul(factor, m.get(row, j)));
                        m.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, f: &FqField) -> usize {
        self.rref(f).1.len()
    }

    /// Canonical basis of the column space: reduced column echelon form with
    /// zero columns dropped.  Pivot row indices are strictly increasing.
    pub fn col_echelon(&self, f: &FqField) -> Mat {
        let (r, pivots) = self.transpose().rref(f);
        let k = pivots.len();
        let mut out = Mat::zero(self.rows, k);
        for i in 0..k {
            for j in 0..self.rows {
                out.set(j, i, r.get(i, j));
            }
        }
        out
    }

    /// Pivot rows of the canonical column echelon basis.
    pub fn pivot_rows(&self, f: &FqField) -> Vec<usize> {
        self.transpose().rref(f).1
    }

    /// Canonical basis of the null space {x : self * x = 0}.
    pub fn kernel(&self, f: &FqField) -> Mat {
        let (r, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Mat::zero(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, 1);
            for (prow, &pc) in pivots.iter().enumerate() {
                basis.set(pc, k, f.neg(r.get(prow, fc)));
            }
        }
        basis.col_echelon(f)
    }

    /// Unique solution matrix X of self * X = rhs when the columns of self
    /// are independent; None if some column of rhs is outside the span.
    pub fn solve(&self, f: &FqField, rhs: &Mat) -> Option<Mat> {
        assert_eq!(self.rows, rhs.rows);
        let aug = self.hstack(rhs);
        let (r, pivots) = aug.rref(f);
        // Consistency: no pivot may fall in the rhs block.
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        assert_eq!(
            pivots.len(),
            self.cols,
            "solve requires independent columns"
        );
        let mut x = Mat::zero(self.cols, rhs.cols);
        for (prow, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, r.get(prow, self.cols + j));
            }
        }
        Some(x)
    }

    pub fn inverse(&self, f: &FqField) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let aug = self.hstack(&Mat::identity(self.rows));
        let (r, pivots) = aug.rref(f);
        if pivots.len() != self.rows || pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        Some(r.submatrix(
            &(0..self.rows).collect::<Vec<_>>(),
            &(self.cols..2 * self.cols).collect::<Vec<_>>(),
        ))
    }

    pub fn det(&self, f: &FqField) -> F {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let mut det: F = 1;
        for col in 0..m.cols {
            let mut sel = None;
            for r in col..m.rows {
                if m.get(r, col) != 0 {
                    sel = Some(r);
                    break;
                }
            }
            let sel = match sel {
                None => return 0,
                Some(s) => s,
            };
            if sel != col {
                for j in 0..m.cols {
                    let tmp = m.get(col, j);
                    m.set(col, j, m.get(sel, j));
                    m.set(sel, j, tmp);
                }
                det = f.neg(det);
            }
            let piv = m.get(col, col);
            det = f.mul(det, piv);
            let pinv = f.inv(piv);
            for r in (col + 1)..m.rows {
                if m.get(r, col) != 0 {
                    let factor = f.mul(m.get(r, col), pinv);
                    for j in col..m.cols {
                        let v = f.sub(m.get(r, j), f.mul(factor, m.get(col, j)));
                        m.set(r, j, v);
                    }
                }
            }
        }
        det
    }
}

/// Sum of two subspaces given by basis matrices, canonical.
pub fn subspace_sum(f: &FqField, a: &Mat, b: &Mat) -> Mat {
    a.hstack(b).col_echelon(f)
}

/// Intersection of two column spans, canonical.
pub fn subspace_intersect(f: &FqField, a: &Mat, b: &Mat) -> Mat {
    if a.cols == 0 || b.cols == 0 {
        return Mat::zero(a.rows, 0);
    }
    // Solve a x = b y: kernel of [a | -b], read off the a-part.
    let neg_b = b.scale(f, f.neg(1));
    let ker = a.hstack(&neg_b).kernel(f);
    let xs = ker.submatrix(&(0..a.cols).collect::<Vec<_>>(), &(0..ker.cols).collect::<Vec<_>>());
    a.mul(f, &xs).col_echelon(f)
}

/// True if every column of v lies in the column span of space.
pub fn subspace_contains(f: &FqField, space: &Mat, v: &Mat) -> bool {
    assert_eq!(space.rows, v.rows);
    if v.cols == 0 {
        return true;
    }
    space.hstack(v).rank(f) == space.rank(f)
}

/// Annihilator of a column span: functionals (as column vectors in the dual
/// standard basis) vanishing on the span.  Canonical.
pub fn annihilator(f: &FqField, space: &Mat) -> Mat {
    space.transpose().kernel(f)
}

/// Determinant-based wedge: matrix of all m x m minors, rows and columns
/// indexed by increasing index tuples in lexicographic order.
pub fn compound_matrix(f: &FqField, m: &Mat, k: usize) -> Mat {
    let rows = combinations(m.rows, k);
    let cols = combinations(m.cols, k);
    let mut out = Mat::zero(rows.len(), cols.len());
    for (i, ri) in rows.iter().enumerate() {
        for (j, cj) in cols.iter().enumerate() {
            out.set(i, j, m.submatrix(ri, cj).det(f));
        }
    }
    out
}

/// Symmetric-power matrix on the monomial basis: rows and columns indexed
/// by weakly increasing k-tuples in lexicographic order; column J holds the
/// coefficients of prod_{j in J} (A x)_j expanded in the monomials x^I.
/// Functorial: sym_matrix(AB) = sym_matrix(A) * sym_matrix(B).
pub fn sym_matrix(f: &FqField, m: &Mat, k: usize) -> Mat {
    use std::collections::BTreeMap;
    // Index maps for monomials of each intermediate degree.
    let index: Vec<BTreeMap<Vec<usize>, usize>> = (0..=k)
        .map(|d| {
            multisets(m.rows, d)
                .into_iter()
                .enumerate()
                .map(|(pos, ms)| (ms, pos))
                .collect()
        })
        .collect();
    let cols = multisets(m.cols, k);
    let mut out = Mat::zero(index[k].len(), cols.len());
    for (jc, tuple) in cols.iter().enumerate() {
        // Multiply the linear forms (A x)_{j}, one factor at a time.
        let mut coef: Vec<F> = vec![1];
        for (deg, &j) in tuple.iter().enumerate() {
            let mut next: Vec<F> = vec![0; index[deg + 1].len()];
            for (ms, &pos) in index[deg].iter() {
                let c = coef[pos];
                if c == 0 {
                    continue;
                }
                for r in 0..m.rows {
                    let a = m.get(r, j);
                    if a == 0 {
                        continue;
                    }
                    let mut bigger = ms.clone();
                    bigger.push(r);
                    bigger.sort_unstable();
                    let target = index[deg + 1][&bigger];
                    next[target] = f.add(next[target], f.mul(c, a));
                }
            }
            coef = next;
        }
        for (i, &c) in coef.iter().enumerate() {
            out.set(i, jc, c);
        }
    }
    out
}

/// Square block-diagonal assembly of the given square blocks, in order.
pub fn block_diag(blocks: &[Mat]) -> Mat {
    let n: usize = blocks.iter().map(|b| b.rows).sum();
    let m: usize = blocks.iter().map(|b| b.cols).sum();
    let mut out = Mat::zero(n, m);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows {
            for j in 0..b.cols {
                out.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
        r0 += b.rows;
        c0 += b.cols;
    }
    out
}

/// All strictly increasing k-tuples from 0..n, lexicographic.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// All weakly increasing k-tuples from 0..n, lexicographic.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
