//! Filtered modules with graded Frobenius-twist isomorphisms over finite
//! fields, in adapted-basis form: descending/ascending flags, tensor, dual
//! and power constructions, admissibility of morphisms, matrix models for
//! the general linear family, and exact orbit/transporter computations for
//! the associated pair group acting by (p_plus, p_minus) . g = p+ g p-^{-1}.

use std::collections::{BTreeMap, HashMap};

use crate::error::ZipError;
use crate::field::{FqField, F};
use crate::linalg::{
    block_diag, combinations, compound_matrix, multisets, subspace_contains, subspace_intersect,
    sym_matrix, Mat,
};
use crate::weyl::{word_string, CosetSide, WeylElement};
use crate::zipdatum::{build_zip_datum, validate_type, CocharacterType, GroupFamily};

/// Work cap for transporter and isomorphism enumerations.
pub const ENUM_GUARD: u64 = 10_000_000;

/// Default highest extension degree searched for geometric isomorphism.
pub const DEFAULT_EXT_BOUND: u32 = 4;

/// Hard input caps for the brute-force classification.
pub const CLASSIFY_MAX_N: usize = 3;
pub const CLASSIFY_MAX_Q: u64 = 4;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FlagDirection {
    Descending,
    Ascending,
}

/// A filtration of F^n with finitely many jumps, stored as the reduced
/// column-echelon basis of the member subspace at every jump index.
/// Descending flags shrink as the index grows, ascending flags grow; in
/// both cases the extreme listed step is the full space and the filtration
/// is zero beyond the other end.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Flag {
    pub n: usize,
    pub direction: FlagDirection,
    /// (index, echelon basis), sorted by index; every listed index is a
    /// genuine jump.
    pub steps: Vec<(i64, Mat)>,
}

impl Flag {
    pub fn new(
        f: &FqField,
        n: usize,
        direction: FlagDirection,
        raw_steps: Vec<(i64, Mat)>,
    ) -> Result<Flag, ZipError> {
        let mut steps: Vec<(i64, Mat)> = raw_steps
            .into_iter()
            .map(|(i, m)| (i, m.col_echelon(f)))
            .collect();
        steps.sort_by_key(|(i, _)| *i);
        for t in 1..steps.len() {
            if steps[t].0 == steps[t - 1].0 {
                return Err(ZipError::Validation(format!(
                    "duplicate flag index {}",
                    steps[t].0
                )));
            }
        }
        for (_, m) in &steps {
            if m.rows != n {
                return Err(ZipError::Validation(
                    "flag step has the wrong ambient rank".into(),
                ));
            }
        }
        if n == 0 {
            if !steps.is_empty() {
                return Err(ZipError::Validation(
                    "rank-zero flag must have no steps".into(),
                ));
            }
            return Ok(Flag {
                n,
                direction,
                steps,
            });
        }
        if steps.is_empty() {
            return Err(ZipError::Validation("flag without steps".into()));
        }
        // Nesting and strictness; the larger space per adjacent pair
        // depends on the direction.
        for t in 1..steps.len() {
            let (big, small) = match direction {
                FlagDirection::Descending => (&steps[t - 1].1, &steps[t].1),
                FlagDirection::Ascending => (&steps[t].1, &steps[t - 1].1),
            };
            if big.cols <= small.cols || !subspace_contains(f, big, small) {
                return Err(ZipError::Validation(
                    "flag steps are not strictly nested".into(),
                ));
            }
        }
        let full = match direction {
            FlagDirection::Descending => &steps[0].1,
            FlagDirection::Ascending => &steps[steps.len() - 1].1,
        };
        if full.cols != n {
            return Err(ZipError::Validation(
                "extreme flag step is not the full space".into(),
            ));
        }
        Ok(Flag {
            n,
            direction,
            steps,
        })
    }

    /// The member subspace at an arbitrary index (constant between jumps).
    pub fn at(&self, i: i64) -> Mat {
        match self.direction {
            FlagDirection::Descending => {
                // First step with index >= i; zero beyond the last step.
                for (j, m) in &self.steps {
                    if *j >= i {
                        return m.clone();
                    }
                }
                Mat::zero(self.n, 0)
            }
            FlagDirection::Ascending => {
                // Last step with index <= i; zero before the first step.
                for (j, m) in self.steps.iter().rev() {
                    if *j <= i {
                        return m.clone();
                    }
                }
                Mat::zero(self.n, 0)
            }
        }
    }

    pub fn support(&self) -> Vec<i64> {
        self.steps.iter().map(|(i, _)| *i).collect()
    }

    /// Graded ranks at the jump indices.
    pub fn type_counts(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for t in 0..self.steps.len() {
            let here = self.steps[t].1.cols;
            let other = match self.direction {
                FlagDirection::Descending => {
                    if t + 1 < self.steps.len() {
                        self.steps[t + 1].1.cols
                    } else {
                        0
                    }
                }
                FlagDirection::Ascending => {
                    if t > 0 {
                        self.steps[t - 1].1.cols
                    } else {
                        0
                    }
                }
            };
            out.insert(self.steps[t].0, here - other);
        }
        out
    }

    /// Canonical graded lifts by the pivot rule: at each jump, the echelon
    /// columns whose pivot rows are new relative to the adjacent smaller
    /// member of the flag.  Lifts at the same flag reproduce the same
    /// matrices, so equal flags get literally equal graded bases.
    pub fn graded_lifts(&self, f: &FqField) -> BTreeMap<i64, Mat> {
        let all_rows: Vec<usize> = (0..self.n).collect();
        let mut out = BTreeMap::new();
        let mut prev: Vec<usize> = Vec::new();
        let order: Vec<usize> = match self.direction {
            FlagDirection::Descending => (0..self.steps.len()).rev().collect(),
            FlagDirection::Ascending => (0..self.steps.len()).collect(),
        };
        for t in order {
            let (i, e) = &self.steps[t];
            let piv = e.pivot_rows(f);
            let cols: Vec<usize> = (0..piv.len()).filter(|&j| !prev.contains(&piv[j])).collect();
            out.insert(*i, e.submatrix(&all_rows, &cols));
            prev = piv;
        }
        out
    }
}

/// Filtered module with a descending flag C, an ascending flag D of the
/// same type, and for each jump weight an invertible graded matrix phi_i
/// expressed in the canonical graded lifts, with the source basis twisted
/// entrywise by x -> x^twist first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FZip {
    pub field: FqField,
    /// Twist order: a power of the characteristic dividing the field order.
    pub twist: u64,
    pub n: usize,
    pub c: Flag,
    pub d: Flag,
    pub phi: BTreeMap<i64, Mat>,
}

fn check_twist(field: &FqField, twist: u64) -> Result<u32, ZipError> {
    let mut t = 0u32;
    let mut v = 1u64;
    while v < twist {
        v *= field.p;
        t += 1;
    }
    if v != twist || t == 0 {
        return Err(ZipError::Validation(format!(
            "twist {} is not a positive power of the characteristic {}",
            twist, field.p
        )));
    }
    if field.e % t != 0 {
        return Err(ZipError::Validation(format!(
            "field F_{}^{} does not contain the twist field of order {}",
            field.p, field.e, twist
        )));
    }
    Ok(t)
}

/// Coordinates of raw adapted lifts in the canonical graded basis, one
/// invertible block per weight.  `descending` says which side of the
/// filtration the lift is allowed to spill into.
fn gr_coordinates(
    f: &FqField,
    canon: &BTreeMap<i64, Mat>,
    raw: &BTreeMap<i64, Mat>,
    descending: bool,
) -> Result<BTreeMap<i64, Mat>, ZipError> {
    let weights: Vec<i64> = canon.keys().copied().collect();
    let mut full = Mat::zero(canon.values().next().map_or(0, |m| m.rows), 0);
    let mut offsets = BTreeMap::new();
    for w in &weights {
        offsets.insert(*w, full.cols);
        full = full.hstack(&canon[w]);
    }
    let fullinv = full
        .inverse(f)
        .ok_or_else(|| ZipError::Internal("graded lifts do not span".into()))?;
    let mut out = BTreeMap::new();
    for (i, m) in raw {
        let coords = fullinv.mul(f, m);
        for w in &weights {
            let off = offsets[w];
            let rows: Vec<usize> = (off..off + canon[w].cols).collect();
            let cols: Vec<usize> = (0..m.cols).collect();
            let block = coords.submatrix(&rows, &cols);
            let forbidden = if descending { w < i } else { w > i };
            if forbidden && !block.is_zero() {
                return Err(ZipError::Internal(
                    "adapted lift escapes its filtration level".into(),
                ));
            }
            if w == i {
                out.insert(*i, block);
            }
        }
    }
    for (i, b) in &out {
        if b.inverse(f).is_none() {
            return Err(ZipError::Internal(format!(
                "graded change of basis at weight {} is singular",
                i
            )));
        }
    }
    Ok(out)
}

impl FZip {
    /// Build from raw adapted data: per weight, lift columns of the
    /// descending flag, lift columns of the ascending flag, and the graded
    /// matrix in those raw bases.  The result is normalized to the
    /// canonical echelon-pivot graded bases, so equal objects compare
    /// literally equal.
    pub fn new(
        field: FqField,
        twist: u64,
        c_raw: &BTreeMap<i64, Mat>,
        d_raw: &BTreeMap<i64, Mat>,
        phi_raw: &BTreeMap<i64, Mat>,
    ) -> Result<FZip, ZipError> {
        check_twist(&field, twist)?;
        if !(c_raw.keys().eq(d_raw.keys()) && c_raw.keys().eq(phi_raw.keys())) {
            return Err(ZipError::Validation(
                "filtration supports disagree".into(),
            ));
        }
        if c_raw.is_empty() {
            return Ok(FZip {
                field,
                twist,
                n: 0,
                c: Flag {
                    n: 0,
                    direction: FlagDirection::Descending,
                    steps: Vec::new(),
                },
                d: Flag {
                    n: 0,
                    direction: FlagDirection::Ascending,
                    steps: Vec::new(),
                },
                phi: BTreeMap::new(),
            });
        }
        let n = c_raw.values().next().unwrap().rows;
        let mut total = 0;
        for (i, m) in c_raw {
            let dm = &d_raw[i];
            let pm = &phi_raw[i];
            if m.rows != n || dm.rows != n {
                return Err(ZipError::Validation(
                    "lift matrices have mismatched ambient rank".into(),
                ));
            }
            if m.cols != dm.cols || pm.rows != m.cols || pm.cols != m.cols {
                return Err(ZipError::Validation(format!(
                    "graded sizes disagree at weight {}",
                    i
                )));
            }
            if m.cols == 0 {
                return Err(ZipError::Validation(format!(
                    "empty graded piece listed at weight {}",
                    i
                )));
            }
            if pm.inverse(&field).is_none() {
                return Err(ZipError::Validation(format!(
                    "graded matrix at weight {} is singular",
                    i
                )));
            }
            total += m.cols;
        }
        if total != n {
            return Err(ZipError::Validation(
                "graded ranks do not sum to the ambient rank".into(),
            ));
        }
        let weights: Vec<i64> = c_raw.keys().copied().collect();
        // Accumulated subspaces; independence of the lifts is checked by
        // rank.
        let mut c_steps = Vec::new();
        for i in &weights {
            let mut span = Mat::zero(n, 0);
            for j in &weights {
                if j >= i {
                    span = span.hstack(&c_raw[j]);
                }
            }
            if span.rank(&field) != span.cols {
                return Err(ZipError::Validation(
                    "descending lift columns are not independent".into(),
                ));
            }
            c_steps.push((*i, span));
        }
        let mut d_steps = Vec::new();
        for i in &weights {
            let mut span = Mat::zero(n, 0);
            for j in &weights {
                if j <= i {
                    span = span.hstack(&d_raw[j]);
                }
            }
            if span.rank(&field) != span.cols {
                return Err(ZipError::Validation(
                    "ascending lift columns are not independent".into(),
                ));
            }
            d_steps.push((*i, span));
        }
        let c = Flag::new(&field, n, FlagDirection::Descending, c_steps)?;
        let d = Flag::new(&field, n, FlagDirection::Ascending, d_steps)?;
        let cl = c.graded_lifts(&field);
        let dl = d.graded_lifts(&field);
        let a_blocks = gr_coordinates(&field, &cl, c_raw, true)?;
        let b_blocks = gr_coordinates(&field, &dl, d_raw, false)?;
        let mut phi = BTreeMap::new();
        for i in &weights {
            let a_tw_inv = a_blocks[i]
                .pow_entrywise(&field, twist)
                .inverse(&field)
                .ok_or_else(|| ZipError::Internal("twisted block not invertible".into()))?;
            let m = b_blocks[i].mul(&field, &phi_raw[i]).mul(&field, &a_tw_inv);
            phi.insert(*i, m);
        }
        Ok(FZip {
            field,
            twist,
            n,
            c,
            d,
            phi,
        })
    }

    /// The matrix model: coordinate j carries weight lambda[j] (any order);
    /// the descending flag is spanned by the coordinate vectors of weight
    /// >= i, the ascending flag by the g-images of those of weight <= i,
    /// and the raw graded matrices are identities.
    pub fn from_matrix_model(
        field: &FqField,
        twist: u64,
        lambda: &[i64],
        g: &Mat,
    ) -> Result<FZip, ZipError> {
        let n = lambda.len();
        if g.rows != n || g.cols != n {
            return Err(ZipError::Validation(
                "matrix model has the wrong size".into(),
            ));
        }
        if g.inverse(field).is_none() {
            return Err(ZipError::Validation("matrix model is singular".into()));
        }
        let id = Mat::identity(n);
        let all_rows: Vec<usize> = (0..n).collect();
        let mut weights: Vec<i64> = lambda.to_vec();
        weights.sort_unstable();
        weights.dedup();
        let mut c_raw = BTreeMap::new();
        let mut d_raw = BTreeMap::new();
        let mut phi_raw = BTreeMap::new();
        for i in weights {
            let cols: Vec<usize> = (0..n).filter(|&j| lambda[j] == i).collect();
            c_raw.insert(i, id.submatrix(&all_rows, &cols));
            d_raw.insert(i, g.submatrix(&all_rows, &cols));
            phi_raw.insert(i, Mat::identity(cols.len()));
        }
        FZip::new(field.clone(), twist, &c_raw, &d_raw, &phi_raw)
    }

    /// Rank-1 object with both flags jumping at d and identity twist map.
    pub fn make_tate(field: &FqField, twist: u64, d: i64) -> Result<FZip, ZipError> {
        FZip::from_matrix_model(field, twist, &[d], &Mat::identity(1))
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn type_of(&self) -> BTreeMap<i64, usize> {
        self.c.type_counts()
    }

    fn graded_data(&self) -> (Vec<i64>, Vec<Mat>, Vec<Mat>, Vec<Mat>) {
        let cl = self.c.graded_lifts(&self.field);
        let dl = self.d.graded_lifts(&self.field);
        let weights: Vec<i64> = cl.keys().copied().collect();
        let c: Vec<Mat> = weights.iter().map(|i| cl[i].clone()).collect();
        let d: Vec<Mat> = weights.iter().map(|i| dl[i].clone()).collect();
        let p: Vec<Mat> = weights.iter().map(|i| self.phi[i].clone()).collect();
        (weights, c, d, p)
    }

    pub fn tensor(&self, other: &FZip) -> Result<FZip, ZipError> {
        if self.field != other.field || self.twist != other.twist {
            return Err(ZipError::Validation(
                "tensor factors live over different fields".into(),
            ));
        }
        let f = &self.field;
        let (wa, ca, da, pa) = self.graded_data();
        let (wb, cb, db, pb) = other.graded_data();
        let mut c_raw: BTreeMap<i64, Mat> = BTreeMap::new();
        let mut d_raw: BTreeMap<i64, Mat> = BTreeMap::new();
        let mut phi_raw: BTreeMap<i64, Vec<Mat>> = BTreeMap::new();
        for (s, _) in wa.iter().enumerate() {
            for (t, _) in wb.iter().enumerate() {
                let w = wa[s] + wb[t];
                let ck = ca[s].kron(f, &cb[t]);
                let dk = da[s].kron(f, &db[t]);
                let pk = pa[s].kron(f, &pb[t]);
                match c_raw.get_mut(&w) {
                    None => {
                        c_raw.insert(w, ck);
                        d_raw.insert(w, dk);
                        phi_raw.insert(w, vec![pk]);
                    }
                    Some(existing) => {
                        *existing = existing.hstack(&ck);
                        let dd = d_raw.get_mut(&w).unwrap();
                        *dd = dd.hstack(&dk);
                        phi_raw.get_mut(&w).unwrap().push(pk);
                    }
                }
            }
        }
        let phi_raw: BTreeMap<i64, Mat> = phi_raw
            .into_iter()
            .map(|(w, blocks)| (w, block_diag(&blocks)))
            .collect();
        FZip::new(f.clone(), self.twist, &c_raw, &d_raw, &phi_raw)
    }

    pub fn dual(&self) -> Result<FZip, ZipError> {
        let f = &self.field;
        if self.n == 0 {
            return Ok(self.clone());
        }
        let (weights, cl, dl, phis) = self.graded_data();
        let stack = |parts: &[Mat]| {
            let mut m = Mat::zero(self.n, 0);
            for p in parts {
                m = m.hstack(p);
            }
            m
        };
        let c_full = stack(&cl);
        let d_full = stack(&dl);
        let c_dual = c_full
            .transpose()
            .inverse(f)
            .ok_or_else(|| ZipError::Internal("flag basis not invertible".into()))?;
        let d_dual = d_full
            .transpose()
            .inverse(f)
            .ok_or_else(|| ZipError::Internal("flag basis not invertible".into()))?;
        let all_rows: Vec<usize> = (0..self.n).collect();
        let mut c_raw = BTreeMap::new();
        let mut d_raw = BTreeMap::new();
        let mut phi_raw = BTreeMap::new();
        let mut off = 0;
        for (s, w) in weights.iter().enumerate() {
            let k = cl[s].cols;
            let cols: Vec<usize> = (off..off + k).collect();
            // The dual basis vector of a weight-w lift sits at weight -w in
            // the dual object, on both sides of the filtration.
            c_raw.insert(-w, c_dual.submatrix(&all_rows, &cols));
            d_raw.insert(-w, d_dual.submatrix(&all_rows, &cols));
            let inv_t = phis[s]
                .transpose()
                .inverse(f)
                .ok_or_else(|| ZipError::Internal("graded matrix not invertible".into()))?;
            phi_raw.insert(-w, inv_t);
            off += k;
        }
        FZip::new(f.clone(), self.twist, &c_raw, &d_raw, &phi_raw)
    }

    /// Alternating or symmetric power on the induced monomial bases.
    pub fn power(&self, m: usize, kind: PowerKind) -> Result<FZip, ZipError> {
        let f = &self.field;
        let (weights, cl, dl, phis) = self.graded_data();
        let stack = |parts: &[Mat]| {
            let mut acc = Mat::zero(self.n, 0);
            for p in parts {
                acc = acc.hstack(p);
            }
            acc
        };
        let c_full = stack(&cl);
        let d_full = stack(&dl);
        let phi_full = block_diag(&phis);
        // Per-column weights of the stacked graded bases.
        let mut colw: Vec<i64> = Vec::with_capacity(self.n);
        for (s, w) in weights.iter().enumerate() {
            for _ in 0..cl[s].cols {
                colw.push(*w);
            }
        }
        let (tuples, c_big, d_big, phi_big) = match kind {
            PowerKind::Alternating => (
                combinations(self.n, m),
                compound_matrix(f, &c_full, m),
                compound_matrix(f, &d_full, m),
                compound_matrix(f, &phi_full, m),
            ),
            PowerKind::Symmetric => (
                multisets(self.n, m),
                sym_matrix(f, &c_full, m),
                sym_matrix(f, &d_full, m),
                sym_matrix(f, &phi_full, m),
            ),
        };
        let mut buckets: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (idx, tuple) in tuples.iter().enumerate() {
            let w: i64 = tuple.iter().map(|&j| colw[j]).sum();
            buckets.entry(w).or_default().push(idx);
        }
        let all_rows: Vec<usize> = (0..c_big.rows).collect();
        let mut c_raw = BTreeMap::new();
        let mut d_raw = BTreeMap::new();
        let mut phi_raw = BTreeMap::new();
        for (w, cols) in &buckets {
            c_raw.insert(*w, c_big.submatrix(&all_rows, cols));
            d_raw.insert(*w, d_big.submatrix(&all_rows, cols));
            // The graded matrix mixes only tuples with equal weight
            // multisets, so the bucket-diagonal block is the whole map.
            phi_raw.insert(*w, phi_big.submatrix(cols, cols));
        }
        FZip::new(f.clone(), self.twist, &c_raw, &d_raw, &phi_raw)
    }

    /// Base change along the inclusion into a bigger field; echelon bases
    /// and graded matrices embed entrywise and stay canonical.
    pub fn extend_to(&self, big: &FqField) -> Result<FZip, ZipError> {
        let table = big.embedding_from(&self.field)?;
        let map_flag = |fl: &Flag| Flag {
            n: fl.n,
            direction: fl.direction,
            steps: fl
                .steps
                .iter()
                .map(|(i, m)| (*i, m.map_entries(&table)))
                .collect(),
        };
        Ok(FZip {
            field: big.clone(),
            twist: self.twist,
            n: self.n,
            c: map_flag(&self.c),
            d: map_flag(&self.d),
            phi: self
                .phi
                .iter()
                .map(|(i, m)| (*i, m.map_entries(&table)))
                .collect(),
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PowerKind {
    Alternating,
    Symmetric,
}

/// Admissible homomorphism test: the matrix must carry both flags into the
/// target flags strictly (image intersects each member exactly in the image
/// of the member), and the graded squares must commute with the entrywise
/// twist on the source.
pub fn is_admissible_morphism(fm: &Mat, src: &FZip, dst: &FZip) -> Result<bool, ZipError> {
    if src.field != dst.field || src.twist != dst.twist {
        return Err(ZipError::Validation(
            "morphism endpoints live over different fields".into(),
        ));
    }
    if fm.rows != dst.n || fm.cols != src.n {
        return Err(ZipError::Validation(format!(
            "morphism matrix is {}x{}, expected {}x{}",
            fm.rows, fm.cols, dst.n, src.n
        )));
    }
    let f = &src.field;
    let image = fm.col_echelon(f);
    let mut weights: Vec<i64> = src.c.support();
    weights.extend(dst.c.support());
    weights.extend(src.d.support());
    weights.extend(dst.d.support());
    weights.sort_unstable();
    weights.dedup();
    for i in &weights {
        for (sm, dm) in [
            (src.c.at(*i), dst.c.at(*i)),
            (src.d.at(*i), dst.d.at(*i)),
        ] {
            let fim = fm.mul(f, &sm).col_echelon(f);
            if !subspace_contains(f, &dm, &fim) {
                return Ok(false);
            }
            let cut = subspace_intersect(f, &image, &dm).col_echelon(f);
            if fim != cut {
                return Ok(false);
            }
        }
    }
    if src.n == 0 || dst.n == 0 {
        return Ok(true);
    }
    let (dw, dcl, ddl, _) = dst.graded_data();
    let stack = |parts: &[Mat]| {
        let mut acc = Mat::zero(dst.n, 0);
        for p in parts {
            acc = acc.hstack(p);
        }
        acc
    };
    let c_full_inv = stack(&dcl)
        .inverse(f)
        .ok_or_else(|| ZipError::Internal("flag basis not invertible".into()))?;
    let d_full_inv = stack(&ddl)
        .inverse(f)
        .ok_or_else(|| ZipError::Internal("flag basis not invertible".into()))?;
    let block_at = |coords: &Mat, want: i64, sizes: &[(i64, usize)]| -> Mat {
        let mut off = 0;
        for (w, k) in sizes {
            if *w == want {
                let rows: Vec<usize> = (off..off + k).collect();
                let cols: Vec<usize> = (0..coords.cols).collect();
                return coords.submatrix(&rows, &cols);
            }
            off += k;
        }
        Mat::zero(0, coords.cols)
    };
    let c_sizes: Vec<(i64, usize)> = dw.iter().enumerate().map(|(s, w)| (*w, dcl[s].cols)).collect();
    let d_sizes: Vec<(i64, usize)> = dw.iter().enumerate().map(|(s, w)| (*w, ddl[s].cols)).collect();
    let scl = src.c.graded_lifts(f);
    let sdl = src.d.graded_lifts(f);
    for (i, lift) in &scl {
        let g_i = block_at(&c_full_inv.mul(f, &fm.mul(f, lift)), *i, &c_sizes);
        let h_i = block_at(&d_full_inv.mul(f, &fm.mul(f, &sdl[i])), *i, &d_sizes);
        let lhs = h_i.mul(f, &src.phi[i]);
        let rhs = match dst.phi.get(i) {
            Some(p) => p.mul(f, &g_i.pow_entrywise(f, src.twist)),
            None => Mat::zero(0, lift.cols),
        };
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct IsoWitness {
    pub degree: u32,
    pub field: FqField,
    pub matrix: Mat,
}

fn extension_field(base: &FqField, degree: u32) -> Result<FqField, ZipError> {
    FqField::new(base.p, base.e * degree).map_err(|_| {
        ZipError::Guard(format!(
            "extension of degree {} exceeds the supported field size",
            degree
        ))
    })
}

/// Search for an isomorphism over extensions of the coefficient field of
/// degree 1..=ext_degree.  Flag-compatible invertible maps are enumerated
/// in the graded bases (block triangular by weight) and filtered by the
/// full admissibility test.
pub fn isomorphic_over(
    a: &FZip,
    b: &FZip,
    ext_degree: u32,
) -> Result<Option<IsoWitness>, ZipError> {
    if a.field != b.field || a.twist != b.twist {
        return Err(ZipError::Validation(
            "comparison endpoints live over different fields".into(),
        ));
    }
    if a.n != b.n || a.type_of() != b.type_of() {
        return Ok(None);
    }
    for degree in 1..=ext_degree {
        let big = extension_field(&a.field, degree)?;
        let am = a.extend_to(&big)?;
        let bm = b.extend_to(&big)?;
        if am == bm {
            return Ok(Some(IsoWitness {
                degree,
                field: big,
                matrix: Mat::identity(a.n),
            }));
        }
        if let Some(w) = search_iso_fixed_field(&am, &bm)? {
            return Ok(Some(IsoWitness {
                degree,
                field: big,
                matrix: w,
            }));
        }
    }
    Ok(None)
}

fn search_iso_fixed_field(a: &FZip, b: &FZip) -> Result<Option<Mat>, ZipError> {
    let f = &a.field;
    if a.n == 0 {
        return Ok(Some(Mat::zero(0, 0)));
    }
    let (weights, acl, _, _) = a.graded_data();
    let (_, bcl, _, _) = b.graded_data();
    let stack = |parts: &[Mat], n: usize| {
        let mut acc = Mat::zero(n, 0);
        for p in parts {
            acc = acc.hstack(p);
        }
        acc
    };
    let a_full_inv = stack(&acl, a.n)
        .inverse(f)
        .ok_or_else(|| ZipError::Internal("flag basis not invertible".into()))?;
    let b_full = stack(&bcl, b.n);
    // Free positions of the matrix in graded coordinates: target weight
    // block >= source weight block keeps the descending flag.
    let sizes: Vec<usize> = acl.iter().map(|m| m.cols).collect();
    let mut offsets = Vec::new();
    let mut off = 0;
    for k in &sizes {
        offsets.push(off);
        off += k;
    }
    let mut free: Vec<(usize, usize)> = Vec::new();
    for (s, _) in weights.iter().enumerate() {
        for (t, _) in weights.iter().enumerate() {
            if weights[t] >= weights[s] {
                for r in 0..sizes[t] {
                    for c in 0..sizes[s] {
                        free.push((offsets[t] + r, offsets[s] + c));
                    }
                }
            }
        }
    }
    let total = (f.q as u128).checked_pow(free.len() as u32);
    match total {
        Some(t) if t <= ENUM_GUARD as u128 => {}
        _ => {
            return Err(ZipError::Guard(format!(
                "isomorphism search needs {} candidates, over the cap",
                free.len()
            )))
        }
    }
    let mut vals: Vec<F> = vec![0; free.len()];
    loop {
        let mut x = Mat::zero(a.n, a.n);
        for (idx, (r, c)) in free.iter().enumerate() {
            x.set(*r, *c, vals[idx]);
        }
        if x.inverse(f).is_some() {
            let cand = b_full.mul(f, &x).mul(f, &a_full_inv);
            if is_admissible_morphism(&cand, a, b)? {
                return Ok(Some(cand));
            }
        }
        if !odometer_next(&mut vals, f.q) {
            break;
        }
    }
    Ok(None)
}

fn odometer_next(vals: &mut [F], q: u64) -> bool {
    for v in vals.iter_mut() {
        let nv = *v as u64 + 1;
        if nv < q {
            *v = nv as F;
            return true;
        }
        *v = 0;
    }
    false
}

/// Weakly decreasing weight vector of a general linear type.
pub fn standard_lambda(t: &CocharacterType) -> Vec<i64> {
    let mut out = Vec::new();
    for (i, k) in t.nbar.iter().rev() {
        for _ in 0..*k {
            out.push(*i);
        }
    }
    out
}

/// Standard object of the matrix model for the general linear family.
pub fn standard_zip_gl(
    field: &FqField,
    twist: u64,
    t: &CocharacterType,
    g: &Mat,
) -> Result<FZip, ZipError> {
    let n = t.total();
    validate_type(GroupFamily::Gl(n), t)?;
    FZip::from_matrix_model(field, twist, &standard_lambda(t), g)
}

/// Permutation matrix sending e_j to e_{w(j)}.
pub fn perm_matrix(w: &WeylElement) -> Mat {
    let n = w.images.len();
    let mut m = Mat::zero(n, n);
    for (j, &im) in w.images.iter().enumerate() {
        assert!(im > 0, "permutation expected, signed image found");
        m.set(im as usize - 1, j, 1);
    }
    m
}

/// The matrix representative attached to a stratum label w: the matrix of
/// w times the matrix of the base-point permutation y.  The maximal label
/// always yields the identity matrix and the trivial label yields y
/// itself.
pub fn stratum_matrix(t: &CocharacterType, w: &WeylElement) -> Result<Mat, ZipError> {
    let datum = build_zip_datum(GroupFamily::Gl(t.total()), t)?;
    Ok(perm_matrix(&w.compose(&datum.y)))
}

/// A pair (p_plus, p_minus) in the zip group of the weight vector: block
/// upper and block lower triangular with entrywise-twist-linked diagonal
/// blocks.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZipGroupElement {
    pub p_plus: Mat,
    pub p_minus: Mat,
}

impl ZipGroupElement {
    pub fn new(
        f: &FqField,
        twist: u64,
        lambda: &[i64],
        p_plus: Mat,
        p_minus: Mat,
    ) -> Result<ZipGroupElement, ZipError> {
        let n = lambda.len();
        if p_plus.rows != n || p_plus.cols != n || p_minus.rows != n || p_minus.cols != n {
            return Err(ZipError::Validation("pair has the wrong size".into()));
        }
        for r in 0..n {
            for c in 0..n {
                if lambda[r] < lambda[c] && p_plus.get(r, c) != 0 {
                    return Err(ZipError::Validation(
                        "first member is not block upper triangular".into(),
                    ));
                }
                if lambda[r] > lambda[c] && p_minus.get(r, c) != 0 {
                    return Err(ZipError::Validation(
                        "second member is not block lower triangular".into(),
                    ));
                }
                if lambda[r] == lambda[c]
                    && p_minus.get(r, c) != f.power_map(p_plus.get(r, c), twist)
                {
                    return Err(ZipError::Validation(
                        "diagonal blocks are not twist-linked".into(),
                    ));
                }
            }
        }
        if p_plus.inverse(f).is_none() || p_minus.inverse(f).is_none() {
            return Err(ZipError::Validation("pair member is singular".into()));
        }
        Ok(ZipGroupElement { p_plus, p_minus })
    }

    pub fn act(&self, f: &FqField, g: &Mat) -> Mat {
        self.p_plus
            .mul(f, g)
            .mul(f, &self.p_minus.inverse(f).expect("validated invertible"))
    }
}

/// Enumerate the block-upper group for the weight vector and report the
/// first/all pairs transporting g_from to g_to.  The linked second member
/// is derived, not enumerated.
fn scan_transporter(
    f: &FqField,
    twist: u64,
    lambda: &[i64],
    g_from: &Mat,
    g_to: &Mat,
    count_all: bool,
) -> Result<(Option<Mat>, u64), ZipError> {
    let n = lambda.len();
    let mut positions: Vec<(usize, usize)> = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if lambda[r] >= lambda[c] {
                positions.push((r, c));
            }
        }
    }
    let total = (f.q as u128).checked_pow(positions.len() as u32);
    match total {
        Some(t) if t <= ENUM_GUARD as u128 => {}
        _ => {
            return Err(ZipError::Guard(format!(
                "transporter enumeration over F_{}^{} exceeds the cap",
                f.p, f.e
            )))
        }
    }
    let g_to_inv = g_to
        .inverse(f)
        .ok_or_else(|| ZipError::Validation("target matrix is singular".into()))?;
    let mut witness = None;
    let mut count = 0u64;
    let mut vals: Vec<F> = vec![0; positions.len()];
    loop {
        let mut p_plus = Mat::zero(n, n);
        for (idx, (r, c)) in positions.iter().enumerate() {
            p_plus.set(*r, *c, vals[idx]);
        }
        if p_plus.inverse(f).is_some() {
            let p_minus = g_to_inv.mul(f, &p_plus).mul(f, g_from);
            let mut ok = true;
            'shape: for r in 0..n {
                for c in 0..n {
                    let v = p_minus.get(r, c);
                    if (lambda[r] > lambda[c] && v != 0)
                        || (lambda[r] == lambda[c]
                            && v != f.power_map(p_plus.get(r, c), twist))
                    {
                        ok = false;
                        break 'shape;
                    }
                }
            }
            if ok {
                count += 1;
                if witness.is_none() {
                    witness = Some(p_plus.clone());
                }
                if !count_all {
                    return Ok((witness, count));
                }
            }
        }
        if !odometer_next(&mut vals, f.q) {
            break;
        }
    }
    Ok((witness, count))
}

/// Dimension of the stabilizer Lie algebra at g: kernel of
/// (a, b) -> a g - g b over the block-upper a and strictly-block-lower b
/// (the twist kills the linked-diagonal directions in the second member).
pub fn stabilizer_lie_dim(field: &FqField, t: &CocharacterType, g: &Mat) -> Result<usize, ZipError> {
    let n = t.total();
    validate_type(GroupFamily::Gl(n), t)?;
    let lambda = standard_lambda(t);
    if g.rows != n || g.cols != n {
        return Err(ZipError::Validation("matrix has the wrong size".into()));
    }
    let mut upper: Vec<(usize, usize)> = Vec::new();
    let mut lower: Vec<(usize, usize)> = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if lambda[r] >= lambda[c] {
                upper.push((r, c));
            } else {
                lower.push((r, c));
            }
        }
    }
    let unknowns = upper.len() + lower.len();
    let mut sys = Mat::zero(n * n, unknowns);
    // Equation (i, j): sum_k a_{ik} g_{kj} - sum_k g_{ik} b_{kj} = 0.
    for (u, (r, c)) in upper.iter().enumerate() {
        for j in 0..n {
            sys.set(r * n + j, u, g.get(*c, j));
        }
    }
    for (v, (r, c)) in lower.iter().enumerate() {
        for i in 0..n {
            let w = field.neg(g.get(i, *r));
            sys.set(i * n + c, upper.len() + v, w);
        }
    }
    Ok(unknowns - sys.rank(field))
}

/// Point count of the stabilizer over the degree-m extension.
pub fn stabilizer_points(
    field: &FqField,
    t: &CocharacterType,
    g: &Mat,
    ext_degree: u32,
) -> Result<u64, ZipError> {
    let n = t.total();
    validate_type(GroupFamily::Gl(n), t)?;
    let lambda = standard_lambda(t);
    let big = extension_field(field, ext_degree)?;
    let table = big.embedding_from(field)?;
    let gm = g.map_entries(&table);
    let (_, count) = scan_transporter(&big, field.q, &lambda, &gm, &gm, true)?;
    Ok(count)
}

#[derive(Clone, Debug)]
pub struct ClassifiedElement {
    pub g: Mat,
    pub stratum: usize,
    pub degree: u32,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub lambda: Vec<i64>,
    /// Reduced-word labels of the strata, in enumeration order.
    pub words: Vec<String>,
    /// Matrix representative for each stratum.
    pub reps: Vec<Mat>,
    /// Every invertible matrix over the base field, each assigned to
    /// exactly one stratum, with the extension degree that matched it.
    pub elements: Vec<ClassifiedElement>,
    pub class_sizes: Vec<usize>,
}

/// Exhaustive classification of the matrix model over a small field: the
/// pair group orbits are computed by closure under generators, orbits
/// containing a representative are matched directly, and the rest are
/// matched by transporter search over growing extensions.
pub fn classify_bruteforce(
    field: &FqField,
    t: &CocharacterType,
    ext_bound: u32,
) -> Result<Classification, ZipError> {
    let n = t.total();
    if n > CLASSIFY_MAX_N || field.q > CLASSIFY_MAX_Q {
        return Err(ZipError::Guard(format!(
            "brute-force classification is capped at n <= {}, q <= {}",
            CLASSIFY_MAX_N, CLASSIFY_MAX_Q
        )));
    }
    let datum = build_zip_datum(GroupFamily::Gl(n), t)?;
    let lambda = datum.chi.clone();
    let rep_elements = datum
        .sys
        .min_coset_reps(&datum.i_set, CosetSide::Left)?;
    let words: Vec<String> = rep_elements
        .iter()
        .map(|w| word_string(&datum.sys.reduced_word(w)))
        .collect();
    let reps: Vec<Mat> = rep_elements
        .iter()
        .map(|w| perm_matrix(&w.compose(&datum.y)))
        .collect();
    // All invertible matrices, in odometer order of the entry vector.
    let mut elements: Vec<Mat> = Vec::new();
    let mut index: HashMap<Mat, usize> = HashMap::new();
    let mut vals: Vec<F> = vec![0; n * n];
    loop {
        let m = Mat {
            rows: n,
            cols: n,
            a: vals.clone(),
        };
        if m.inverse(field).is_some() {
            index.insert(m.clone(), elements.len());
            elements.push(m);
        }
        if !odometer_next(&mut vals, field.q) {
            break;
        }
    }
    let gens = zip_group_generators(field, field.q, &lambda)?;
    // Orbit closure.
    let mut orbit_of: Vec<usize> = vec![usize::MAX; elements.len()];
    let mut orbit_count = 0;
    for start in 0..elements.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbit_count;
        orbit_count += 1;
        orbit_of[start] = id;
        let mut queue = vec![start];
        while let Some(cur) = queue.pop() {
            for (p_plus, p_minus_inv) in &gens {
                let img = p_plus.mul(field, &elements[cur]).mul(field, p_minus_inv);
                let j = index[&img];
                if orbit_of[j] == usize::MAX {
                    orbit_of[j] = id;
                    queue.push(j);
                }
            }
        }
    }
    // Match orbits to strata: direct membership first.
    let mut orbit_stratum: Vec<Option<(usize, u32)>> = vec![None; orbit_count];
    for (s, rep) in reps.iter().enumerate() {
        let oid = orbit_of[index[rep]];
        if let Some((prev, _)) = orbit_stratum[oid] {
            if prev != s {
                return Err(ZipError::Internal(format!(
                    "representatives of strata {} and {} share an orbit",
                    prev, s
                )));
            }
        }
        orbit_stratum[oid] = Some((s, 1));
    }
    // Remaining orbits: transporter search over extensions.
    for oid in 0..orbit_count {
        if orbit_stratum[oid].is_some() {
            continue;
        }
        let pick = orbit_of.iter().position(|&o| o == oid).unwrap();
        let g = &elements[pick];
        'degrees: for degree in 2..=ext_bound {
            let big = extension_field(field, degree)?;
            let table = big.embedding_from(field)?;
            let gm = g.map_entries(&table);
            let mut matches = Vec::new();
            for (s, rep) in reps.iter().enumerate() {
                let rm = rep.map_entries(&table);
                let (w, _) = scan_transporter(&big, field.q, &lambda, &gm, &rm, false)?;
                if w.is_some() {
                    matches.push(s);
                }
            }
            match matches.len() {
                0 => continue,
                1 => {
                    orbit_stratum[oid] = Some((matches[0], degree));
                    break 'degrees;
                }
                _ => {
                    return Err(ZipError::Internal(format!(
                        "element matches {} strata at degree {}",
                        matches.len(),
                        degree
                    )))
                }
            }
        }
        if orbit_stratum[oid].is_none() {
            return Err(ZipError::Guard(format!(
                "no isomorphism within extension bound {} for one element",
                ext_bound
            )));
        }
    }
    let mut class_sizes = vec![0usize; reps.len()];
    let mut out_elements = Vec::with_capacity(elements.len());
    for (k, g) in elements.iter().enumerate() {
        let (s, degree) = orbit_stratum[orbit_of[k]].unwrap();
        class_sizes[s] += 1;
        out_elements.push(ClassifiedElement {
            g: g.clone(),
            stratum: s,
            degree,
        });
    }
    Ok(Classification {
        lambda,
        words,
        reps,
        elements: out_elements,
        class_sizes,
    })
}

/// Generators of the pair group over F_q: linked Levi pairs, block-upper
/// unipotents in the first member, block-lower unipotents in the second.
/// The second members are stored inverted, ready for the action.
fn zip_group_generators(
    f: &FqField,
    twist: u64,
    lambda: &[i64],
) -> Result<Vec<(Mat, Mat)>, ZipError> {
    let n = lambda.len();
    let mut gens: Vec<(Mat, Mat)> = Vec::new();
    // Levi part: per-weight invertible blocks, all combinations.
    let mut diag_positions: Vec<(usize, usize)> = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if lambda[r] == lambda[c] {
                diag_positions.push((r, c));
            }
        }
    }
    let total = (f.q as u128).checked_pow(diag_positions.len() as u32);
    match total {
        Some(t) if t <= ENUM_GUARD as u128 => {}
        _ => return Err(ZipError::Guard("Levi enumeration exceeds the cap".into())),
    }
    let mut vals: Vec<F> = vec![0; diag_positions.len()];
    loop {
        let mut l = Mat::zero(n, n);
        for (idx, (r, c)) in diag_positions.iter().enumerate() {
            l.set(*r, *c, vals[idx]);
        }
        if l.inverse(f).is_some() {
            let lt = l.pow_entrywise(f, twist);
            let lt_inv = lt.inverse(f).expect("twist of invertible is invertible");
            gens.push((l, lt_inv));
        }
        if !odometer_next(&mut vals, f.q) {
            break;
        }
    }
    // Unipotent parts.
    for upper in [true, false] {
        let mut positions: Vec<(usize, usize)> = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if (upper && lambda[r] > lambda[c]) || (!upper && lambda[r] < lambda[c]) {
                    positions.push((r, c));
                }
            }
        }
        let mut vals: Vec<F> = vec![0; positions.len()];
        loop {
            let mut u = Mat::identity(n);
            for (idx, (r, c)) in positions.iter().enumerate() {
                u.set(*r, *c, vals[idx]);
            }
            if !u.is_zero() {
                if upper {
                    gens.push((u, Mat::identity(n)));
                } else {
                    let uinv = u.inverse(f).expect("unipotent is invertible");
                    gens.push((Mat::identity(n), uinv));
                }
            }
            if !odometer_next(&mut vals, f.q) {
                break;
            }
        }
    }
    Ok(gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strata;
    use crate::zipdatum::build_zip_datum;

    fn f2() -> FqField {
        FqField::new(2, 1).unwrap()
    }

    fn f3() -> FqField {
        FqField::new(3, 1).unwrap()
    }

    fn f4() -> FqField {
        FqField::new(2, 2).unwrap()
    }

    fn tmap(entries: &[(i64, usize)]) -> BTreeMap<i64, usize> {
        entries.iter().copied().collect()
    }

    #[test]
    fn tate_unit_laws() {
        let f = f2();
        let t2 = FZip::make_tate(&f, 2, 2).unwrap();
        let t3 = FZip::make_tate(&f, 2, 3).unwrap();
        assert_eq!(t2.tensor(&t3).unwrap(), FZip::make_tate(&f, 2, 5).unwrap());
        for d in -2..=2 {
            let t = FZip::make_tate(&f, 2, d).unwrap();
            assert_eq!(t.dual().unwrap(), FZip::make_tate(&f, 2, -d).unwrap());
            assert_eq!(t.type_of(), tmap(&[(d, 1)]));
        }
        // Tensoring with the weight-0 object is literally the identity.
        let t = CocharacterType::new(&[(0, 1), (1, 1)]);
        let m = standard_zip_gl(&f, 2, &t, &Mat::from_rows(&[vec![1, 1], vec![0, 1]])).unwrap();
        let unit = FZip::make_tate(&f, 2, 0).unwrap();
        assert_eq!(m.tensor(&unit).unwrap(), m);
    }

    #[test]
    fn matrix_model_flags_and_type() {
        let f = f4();
        let t = CocharacterType::new(&[(0, 2), (1, 1)]);
        let g = Mat::from_rows(&[vec![1, 2, 0], vec![0, 1, 1], vec![1, 0, 1]]);
        let z = standard_zip_gl(&f, 4, &t, &g).unwrap();
        assert_eq!(z.type_of(), tmap(&[(0, 2), (1, 1)]));
        // lambda = (1, 0, 0): the top descending step is the first
        // coordinate line, the bottom ascending step is spanned by the
        // last two columns of g.
        assert_eq!(z.c.at(1), Mat::from_rows(&[vec![1], vec![0], vec![0]]));
        let all: Vec<usize> = (0..3).collect();
        assert_eq!(z.d.at(0), g.submatrix(&all, &[1, 2]).col_echelon(&f));
        // Identity model: both flags coordinate, graded maps identity.
        let z1 = standard_zip_gl(&f, 4, &t, &Mat::identity(3)).unwrap();
        for (_, p) in &z1.phi {
            assert_eq!(*p, Mat::identity(p.rows));
        }
        assert_eq!(z1.c.at(1), z1.d.at(1).submatrix(&all, &[0]));
        // Ascending weight order puts the descending jump on the last
        // coordinates instead.
        let za = FZip::from_matrix_model(&f, 4, &[0, 1], &Mat::identity(2)).unwrap();
        assert_eq!(za.c.at(1), Mat::from_rows(&[vec![0], vec![1]]));
    }

    #[test]
    fn raw_constructor_normalizes_and_is_idempotent() {
        let f = f4();
        // A rank-3 object given by deliberately non-echelon lifts and
        // nontrivial raw graded matrices.
        let c_raw: BTreeMap<i64, Mat> = [
            (0i64, Mat::from_rows(&[vec![1, 1], vec![1, 0], vec![0, 1]])),
            (2i64, Mat::from_rows(&[vec![2], vec![1], vec![1]])),
        ]
        .into_iter()
        .collect();
        let d_raw: BTreeMap<i64, Mat> = [
            (0i64, Mat::from_rows(&[vec![0, 1], vec![1, 1], vec![1, 0]])),
            (2i64, Mat::from_rows(&[vec![1], vec![3], vec![0]])),
        ]
        .into_iter()
        .collect();
        let phi_raw: BTreeMap<i64, Mat> = [
            (0i64, Mat::from_rows(&[vec![1, 1], vec![2, 1]])),
            (2i64, Mat::from_rows(&[vec![3]])),
        ]
        .into_iter()
        .collect();
        let z = FZip::new(f.clone(), 2, &c_raw, &d_raw, &phi_raw).unwrap();
        assert_eq!(z.type_of(), tmap(&[(0, 2), (2, 1)]));
        // Rebuilding from the canonical data must reproduce it literally.
        let cl = z.c.graded_lifts(&f);
        let dl = z.d.graded_lifts(&f);
        let z2 = FZip::new(f.clone(), 2, &cl, &dl, &z.phi).unwrap();
        assert_eq!(z, z2);
    }

    #[test]
    fn tensor_type_convolution_and_rank() {
        let f = f2();
        let t = CocharacterType::new(&[(0, 1), (1, 1)]);
        let g = Mat::from_rows(&[vec![1, 1], vec![1, 0]]);
        let a = standard_zip_gl(&f, 2, &t, &Mat::identity(2)).unwrap();
        let b = standard_zip_gl(&f, 2, &t, &g).unwrap();
        let p = a.tensor(&b).unwrap();
        assert_eq!(p.rank(), 4);
        assert_eq!(p.type_of(), tmap(&[(0, 1), (1, 2), (2, 1)]));
    }

    #[test]
    fn dual_reflects_type_and_biduality_is_literal() {
        let f = f4();
        let t = CocharacterType::new(&[(0, 1), (1, 2)]);
        let g = Mat::from_rows(&[vec![1, 2, 1], vec![0, 1, 3], vec![2, 0, 1]]);
        let z = standard_zip_gl(&f, 4, &t, &g).unwrap();
        let zd = z.dual().unwrap();
        assert_eq!(zd.type_of(), tmap(&[(-1, 2), (0, 1)]));
        assert_eq!(zd.dual().unwrap(), z);
        // Biduality through a nontrivial raw object as well.
        let c_raw: BTreeMap<i64, Mat> = [
            (-1i64, Mat::from_rows(&[vec![1, 0], vec![1, 1], vec![0, 1]])),
            (3i64, Mat::from_rows(&[vec![2], vec![0], vec![1]])),
        ]
        .into_iter()
        .collect();
        let d_raw: BTreeMap<i64, Mat> = [
            (-1i64, Mat::from_rows(&[vec![1, 1], vec![0, 2], vec![1, 0]])),
            (3i64, Mat::from_rows(&[vec![0], vec![1], vec![1]])),
        ]
        .into_iter()
        .collect();
        let phi_raw: BTreeMap<i64, Mat> = [
            (-1i64, Mat::from_rows(&[vec![0, 1], vec![1, 2]])),
            (3i64, Mat::from_rows(&[vec![2]])),
        ]
        .into_iter()
        .collect();
        let w = FZip::new(f.clone(), 2, &c_raw, &d_raw, &phi_raw).unwrap();
        assert_eq!(w.dual().unwrap().dual().unwrap(), w);
    }

    #[test]
    fn power_ranks_and_top_weight() {
        let f = f2();
        for n in 1..=4usize {
            // A type with distinct jumps to exercise mixed buckets.
            let entries: Vec<(i64, usize)> = (0..n as i64).map(|i| (i, 1)).collect();
            let t = CocharacterType::new(&entries);
            let g = Mat::from_rows(
                &(0..n)
                    .map(|r| (0..n).map(|c| u16::from(c <= r)).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            );
            let z = standard_zip_gl(&f, 2, &t, &g).unwrap();
            for m in 0..=(n + 2) {
                let alt = z.power(m, PowerKind::Alternating).unwrap();
                let binom = combinations(n, m).len();
                assert_eq!(alt.rank(), binom);
                let sym = z.power(m, PowerKind::Symmetric).unwrap();
                assert_eq!(sym.rank(), multisets(n, m).len());
            }
            // First alternating power is the object itself.
            assert_eq!(z.power(1, PowerKind::Alternating).unwrap(), z);
            // Zeroth power is the unit.
            assert_eq!(
                z.power(0, PowerKind::Alternating).unwrap(),
                FZip::make_tate(&f, 2, 0).unwrap()
            );
            // Top alternating power has a single jump at the weighted sum.
            let top = z.power(n, PowerKind::Alternating).unwrap();
            let d: i64 = (0..n as i64).sum();
            assert_eq!(top.type_of(), tmap(&[(d, 1)]));
        }
    }

    #[test]
    fn admissibility_cases() {
        let f = f2();
        let t = CocharacterType::new(&[(0, 1), (1, 1)]);
        let m = standard_zip_gl(&f, 2, &t, &Mat::identity(2)).unwrap();
        assert!(is_admissible_morphism(&Mat::identity(2), &m, &m).unwrap());
        assert!(is_admissible_morphism(&Mat::zero(2, 2), &m, &m).unwrap());
        // A nonzero map from the weight-0 unit to the weight-1 unit fails:
        // the ascending flag of the target vanishes at 0.
        let unit0 = FZip::make_tate(&f, 2, 0).unwrap();
        let unit1 = FZip::make_tate(&f, 2, 1).unwrap();
        let one = Mat::identity(1);
        assert!(!is_admissible_morphism(&one, &unit0, &unit1).unwrap());
        assert!(is_admissible_morphism(&Mat::zero(1, 1), &unit0, &unit1).unwrap());
        // Strictness failure: e2 -> e1 kills the descending step yet its
        // image meets it.
        let fm = Mat::from_rows(&[vec![0, 1], vec![0, 0]]);
        assert!(!is_admissible_morphism(&fm, &m, &m).unwrap());
        // Inclusion of the weight-1 line is admissible.
        let inc = Mat::from_rows(&[vec![1], vec![0]]);
        assert!(is_admissible_morphism(&inc, &unit1, &m).unwrap());
    }

    #[test]
    fn isomorphic_over_identity_and_translates() {
        let f = f2();
        let t = CocharacterType::new(&[(0, 1), (1, 1)]);
        let g = Mat::from_rows(&[vec![0, 1], vec![1, 0]]);
        let z = standard_zip_gl(&f, 2, &t, &g).unwrap();
        let w = isomorphic_over(&z, &z, 1).unwrap().unwrap();
        assert_eq!(w.degree, 1);
        assert_eq!(w.matrix, Mat::identity(2));
        // Translating by a pair-group element preserves the class at
        // degree 1.
        let lambda = standard_lambda(&t);
        let e = ZipGroupElement::new(
            &f,
            2,
            &lambda,
            Mat::from_rows(&[vec![1, 1], vec![0, 1]]),
            Mat::from_rows(&[vec![1, 0], vec![1, 1]]),
        )
        .unwrap();
        let zg = standard_zip_gl(&f, 2, &t, &e.act(&f, &g)).unwrap();
        let w = isomorphic_over(&z, &zg, 1).unwrap().unwrap();
        assert_eq!(w.degree, 1);
        assert!(is_admissible_morphism(&w.matrix, &z, &zg).unwrap());
        // Distinct strata stay distinct over every searched extension.
        let zid = standard_zip_gl(&f, 2, &t, &Mat::identity(2)).unwrap();
        assert!(isomorphic_over(&z, &zid, 4).unwrap().is_none());
    }

    #[test]
    fn zip_group_membership_checks() {
        let f = f4();
        let lambda = vec![1, 0];
        // Linked diagonal: lower-left member must be the entrywise square.
        let ok = ZipGroupElement::new(
            &f,
            2,
            &lambda,
            Mat::from_rows(&[vec![2, 1], vec![0, 3]]),
            Mat::from_rows(&[vec![3, 0], vec![1, 2]]),
        );
        assert!(ok.is_ok());
        let bad_link = ZipGroupElement::new(
            &f,
            2,
            &lambda,
            Mat::from_rows(&[vec![2, 1], vec![0, 3]]),
            Mat::from_rows(&[vec![2, 0], vec![1, 2]]),
        );
        assert!(bad_link.is_err());
        let bad_shape = ZipGroupElement::new(
            &f,
            2,
            &lambda,
            Mat::from_rows(&[vec![1, 0], vec![1, 1]]),
            Mat::identity(2),
        );
        assert!(bad_shape.is_err());
    }

    #[test]
    fn tensor_associative_and_commutative_up_to_iso() {
        let f = f2();
        let t = CocharacterType::new(&[(0, 1), (1, 1)]);
        let m = standard_zip_gl(&f, 2, &t, &Mat::from_rows(&[vec![0, 1], vec![1, 0]])).unwrap();
        let a = FZip::make_tate(&f, 2, 1).unwrap();
        let b = FZip::make_tate(&f, 2, -1).unwrap();
        let lhs = m.tensor(&a).unwrap().tensor(&b).unwrap();
        let rhs = m.tensor(&a.tensor(&b).unwrap()).unwrap();
        assert!(isomorphic_over(&lhs, &rhs, 1).unwrap().is_some());
        let ab = m.tensor(&a).unwrap();
        let ba = a.tensor(&m).unwrap();
        assert!(isomorphic_over(&ab, &ba, 1).unwrap().is_some());
    }

    #[test]
    fn classification_small_general_linear() {
        let f = f2();
        let t2 = CocharacterType::new(&[(0, 1), (1, 1)]);
        let c = classify_bruteforce(&f, &t2, 4).unwrap();
        assert_eq!(c.words, vec!["e".to_string(), "1".to_string()]);
        assert_eq!(c.elements.len(), 6);
        assert_eq!(c.class_sizes, vec![2, 4]);
        assert!(c.elements.iter().all(|e| e.degree == 1));
        // The representative of each stratum is assigned to itself.
        for (s, rep) in c.reps.iter().enumerate() {
            let e = c.elements.iter().find(|e| &e.g == rep).unwrap();
            assert_eq!(e.stratum, s);
        }
        let t3 = CocharacterType::new(&[(0, 2), (1, 1)]);
        let c3 = classify_bruteforce(&f, &t3, 4).unwrap();
        assert_eq!(c3.words.len(), 3);
        assert_eq!(c3.elements.len(), 168);
        assert_eq!(c3.class_sizes.iter().sum::<usize>(), 168);
        assert!(c3.class_sizes.iter().all(|&s| s > 0));
        for (s, rep) in c3.reps.iter().enumerate() {
            let e = c3.elements.iter().find(|e| &e.g == rep).unwrap();
            assert_eq!(e.stratum, s);
        }
        // Guard refusals.
        let big = CocharacterType::new(&[(0, 2), (1, 2)]);
        assert!(matches!(
            classify_bruteforce(&f, &big, 4),
            Err(ZipError::Guard(_))
        ));
    }

    #[test]
    fn stabilizer_dimensions_match_combinatorics() {
        for f in [f2(), f3()] {
            for (entries, _) in [
                (vec![(0i64, 1usize), (1, 1)], 2usize),
                (vec![(0, 2), (1, 1)], 3),
            ] {
                let t = CocharacterType::new(&entries);
                let n = t.total();
                let datum = build_zip_datum(GroupFamily::Gl(n), &t).unwrap();
                let reps = datum
                    .sys
                    .min_coset_reps(&datum.i_set, CosetSide::Left)
                    .unwrap();
                for w in &reps {
                    let e = strata::ExtendedElement {
                        w: w.clone(),
                        omega: 0,
                    };
                    let inv = strata::aut_invariants(&datum, &e);
                    let g = stratum_matrix(&t, w).unwrap();
                    let lie = stabilizer_lie_dim(&f, &t, &g).unwrap();
                    assert_eq!(Some(lie), inv.aut_lie_dim);
                    // Smoothness: the kernel dimension drops to the group
                    // dimension exactly for double-coset-minimal labels.
                    assert_eq!(Some(lie) == inv.aut_dim, inv.smooth.unwrap());
                }
            }
        }
        // Hand values over F_2.
        let f = f2();
        let t = CocharacterType::new(&[(0, 1), (1, 1)]);
        let id = Mat::identity(2);
        let anti = Mat::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(stabilizer_lie_dim(&f, &t, &id).unwrap(), 0);
        assert_eq!(stabilizer_lie_dim(&f, &t, &anti).unwrap(), 1);
        let t3 = CocharacterType::new(&[(0, 2), (1, 1)]);
        let datum = build_zip_datum(GroupFamily::Gl(3), &t3).unwrap();
        let reps = datum
            .sys
            .min_coset_reps(&datum.i_set, CosetSide::Left)
            .unwrap();
        let s1 = &reps[1];
        assert_eq!(datum.sys.reduced_word(s1), vec![0]);
        let g = stratum_matrix(&t3, s1).unwrap();
        assert_eq!(stabilizer_lie_dim(&f, &t3, &g).unwrap(), 2);
    }

    #[test]
    fn stabilizer_point_counts() {
        let f = f2();
        let t = CocharacterType::new(&[(0, 1), (1, 1)]);
        let id = Mat::identity(2);
        let anti = Mat::from_rows(&[vec![0, 1], vec![1, 0]]);
        // Dense-class stabilizer: only the identity pair over F_2, and the
        // count never grows (finite group scheme).
        assert_eq!(stabilizer_points(&f, &t, &id, 1).unwrap(), 1);
        assert_eq!(stabilizer_points(&f, &t, &id, 2).unwrap(), 1);
        // Closed-class stabilizer: one free parameter plus components.
        assert_eq!(stabilizer_points(&f, &t, &anti, 1).unwrap(), 2);
        assert_eq!(stabilizer_points(&f, &t, &anti, 2).unwrap(), 12);
        assert_eq!(stabilizer_points(&f, &t, &anti, 4).unwrap(), 48);
    }

    #[test]
    fn extension_of_scalars_preserves_structure() {
        let f = f2();
        let big = f4();
        let t = CocharacterType::new(&[(0, 1), (1, 1)]);
        let z = standard_zip_gl(&f, 2, &t, &Mat::from_rows(&[vec![0, 1], vec![1, 0]])).unwrap();
        let ze = z.extend_to(&big).unwrap();
        assert_eq!(ze.type_of(), z.type_of());
        assert_eq!(ze.twist, 2);
        let w = isomorphic_over(&ze, &ze, 1).unwrap().unwrap();
        assert_eq!(w.matrix, Mat::identity(2));
    }
}
