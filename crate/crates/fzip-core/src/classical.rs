//! Pairing structures on zips: alternating, symmetric, and hermitian forms
//! with values in a rank-one twist, plus determinant trivializations.  Each
//! group family gets a validator that checks every axiom and names the
//! first failed check, and a standard constructor producing the split
//! object translated by a group element.
//!
//! Hermitian objects carry an action rho of the quadratic extension of the
//! twist field.  The extension is presented by the canonical irreducible
//! polynomial x^2 - s x + m over the twist field (the first such pair
//! (s, m) in encoding order), and the pairing, which takes values in the
//! extension, is stored as the juxtaposition [G1 | G2] of its two component
//! Gram matrices on the basis (1, gamma).  This representation works over
//! every coefficient field; when the field contains a root gamma the action
//! diagonalizes and `unitary_decompose` extracts one eigenspace half
//! together with its induced filtrations and graded comparison maps, from
//! which `unitary_recompose` rebuilds the object up to isomorphism.

use std::collections::BTreeMap;

use crate::error::ZipError;
use crate::field::{F, FqField};
use crate::fzip::{
    is_admissible_morphism, standard_lambda, standard_zip_gl, FZip, PowerKind,
};
use crate::linalg::{combinations, multisets, subspace_intersect, Mat};
use crate::zipdatum::{validate_type, CocharacterType, GroupFamily};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PairingKind {
    Symplectic,
    Orthogonal,
    Unitary,
}

impl PairingKind {
    pub fn name(&self) -> &'static str {
        match self {
            PairingKind::Symplectic => "symplectic",
            PairingKind::Orthogonal => "orthogonal",
            PairingKind::Unitary => "unitary",
        }
    }
}

/// A zip together with a pairing into a rank-one target.  For the
/// symplectic and orthogonal kinds `pairing` is the n x n Gram matrix of
/// the form.  For the unitary kind the module also carries the quadratic
/// action `rho` and `pairing` is the n x 2n juxtaposition [G1 | G2] of the
/// component Grams of the extension-valued form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairedFZip {
    pub m: FZip,
    pub kind: PairingKind,
    pub target: FZip,
    pub pairing: Mat,
    pub rho: Option<Mat>,
}

impl PairedFZip {
    /// Component Grams (G1, G2) of a unitary pairing matrix.
    pub fn hermitian_components(&self) -> Option<(Mat, Mat)> {
        if self.kind != PairingKind::Unitary {
            return None;
        }
        let n = self.m.rank();
        if self.pairing.rows != n || self.pairing.cols != 2 * n {
            return None;
        }
        let rows: Vec<usize> = (0..n).collect();
        let g1 = self.pairing.submatrix(&rows, &(0..n).collect::<Vec<_>>());
        let g2 = self
            .pairing
            .submatrix(&rows, &(n..2 * n).collect::<Vec<_>>());
        Some((g1, g2))
    }
}

/// A zip whose top alternating power is trivialized: delta is a 1 x 1
/// isomorphism onto the unit object.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DetTrivializedFZip {
    pub m: FZip,
    pub delta: Mat,
}

/// The object attached to one of the eight group families: a bare zip for
/// the general linear family, a determinant trivialization for the special
/// linear one, and a paired zip for the rest.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ClassicalObject {
    Plain(FZip),
    DetTrivialized(DetTrivializedFZip),
    Paired(PairedFZip),
}

impl ClassicalObject {
    pub fn underlying(&self) -> &FZip {
        match self {
            ClassicalObject::Plain(m) => m,
            ClassicalObject::DetTrivialized(dt) => &dt.m,
            ClassicalObject::Paired(p) => &p.m,
        }
    }
}

fn mat_add(f: &FqField, a: &Mat, b: &Mat) -> Mat {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    let mut out = a.clone();
    for r in 0..a.rows {
        for c in 0..a.cols {
            out.set(r, c, f.add(a.get(r, c), b.get(r, c)));
        }
    }
    out
}

fn mat_sub(f: &FqField, a: &Mat, b: &Mat) -> Mat {
    mat_add(f, a, &b.scale(f, f.neg(1)))
}

fn unit_columns(n: usize, idxs: &[usize]) -> Mat {
    let mut m = Mat::zero(n, idxs.len());
    for (c, &r) in idxs.iter().enumerate() {
        m.set(r, c, 1);
    }
    m
}

fn scalar1(c: F) -> Mat {
    let mut m = Mat::zero(1, 1);
    m.set(0, 0, c);
    m
}

/// Degree of the twist field over the prime field.
fn twist_degree(field: &FqField, twist: u64) -> Result<u32, ZipError> {
    let mut t = 0u32;
    let mut v = 1u64;
    while v < twist {
        v *= field.p;
        t += 1;
    }
    if v != twist || t == 0 || field.e % t != 0 {
        return Err(ZipError::Validation(format!(
            "twist {} is not a positive power of {} with degree dividing the field",
            twist, field.p
        )));
    }
    Ok(t)
}

/// Coefficients (s, m) of the canonical irreducible x^2 - s x + m over the
/// twist field, embedded into `field`: the first pair in encoding order
/// whose polynomial has no root in the twist field.
pub fn quadratic_coeffs(field: &FqField, twist: u64) -> Result<(F, F), ZipError> {
    let t = twist_degree(field, twist)?;
    let base = FqField::new(field.p, t)?;
    let emb = field.embedding_from(&base)?;
    for s in base.elements() {
        for m in base.elements() {
            let has_root = base
                .elements()
                .any(|x| base.add(base.sub(base.mul(x, x), base.mul(s, x)), m) == 0);
            if !has_root {
                return Ok((emb[s as usize], emb[m as usize]));
            }
        }
    }
    Err(ZipError::Internal(
        "no irreducible quadratic over the twist field".into(),
    ))
}

/// Roots of x^2 - s x + m in the field, smallest encoding first; None when
/// the quadratic extension of the twist field is not contained in it.
pub fn quadratic_roots(field: &FqField, s: F, m: F) -> Option<(F, F)> {
    let mut roots = field
        .elements()
        .filter(|&x| field.add(field.sub(field.mul(x, x), field.mul(s, x)), m) == 0);
    let a = roots.next()?;
    let b = roots.next()?;
    Some((a, b))
}

/// Split alternating Gram: antidiagonal, +1 above the middle and -1 below.
pub fn split_symplectic_gram(f: &FqField, n: usize) -> Mat {
    let mut g = Mat::zero(n, n);
    for i in 0..n / 2 {
        g.set(i, n - 1 - i, 1);
    }
    for i in n / 2..n {
        g.set(i, n - 1 - i, f.neg(1));
    }
    g
}

/// Split symmetric Gram: antidiagonal ones.
pub fn split_symmetric_gram(n: usize) -> Mat {
    let mut g = Mat::zero(n, n);
    for i in 0..n {
        g.set(i, n - 1 - i, 1);
    }
    g
}

/// The scalar c with g^T gram g = c gram, if one exists and is nonzero.
fn similitude_factor(f: &FqField, g: &Mat, gram: &Mat) -> Option<F> {
    let t = g.transpose().mul(f, gram).mul(f, g);
    let mut c = None;
    'scan: for r in 0..gram.rows {
        for j in 0..gram.cols {
            if gram.get(r, j) != 0 {
                c = Some(f.div(t.get(r, j), gram.get(r, j)));
                break 'scan;
            }
        }
    }
    let c = c?;
    if c == 0 || t != gram.scale(f, c) {
        return None;
    }
    Some(c)
}

/// Joint similitude factor for the two component Grams of a hermitian form.
fn hermitian_similitude_factor(f: &FqField, g: &Mat, g1: &Mat, g2: &Mat) -> Option<F> {
    let c1 = if g1.is_zero() {
        None
    } else {
        similitude_factor(f, g, g1)
    };
    let c2 = if g2.is_zero() {
        None
    } else {
        similitude_factor(f, g, g2)
    };
    match (c1, c2) {
        (Some(a), Some(b)) if a == b => Some(a),
        (Some(a), None) if g2.is_zero() => Some(a),
        (None, Some(b)) if g1.is_zero() => Some(b),
        _ => None,
    }
}

/// Rank-one zip concentrated at weight d whose comparison map is the given
/// nonzero scalar.
fn rank_one_target(field: &FqField, twist: u64, d: i64, c: F) -> Result<FZip, ZipError> {
    let mut steps = BTreeMap::new();
    steps.insert(d, Mat::identity(1));
    let mut phi = BTreeMap::new();
    phi.insert(d, scalar1(c));
    FZip::new(field.clone(), twist, &steps, &steps, &phi)
}

/// Row functional induced on the second alternating power by an
/// alternating Gram: the wedge monomial e_i ^ e_j (i < j) maps to G[i][j].
fn wedge_functional(gram: &Mat) -> Mat {
    let n = gram.rows;
    let pairs = combinations(n, 2);
    let mut h = Mat::zero(1, pairs.len());
    for (k, p) in pairs.iter().enumerate() {
        h.set(0, k, gram.get(p[0], p[1]));
    }
    h
}

/// Row functional induced on the second symmetric power by a symmetric
/// Gram: the monomial e_i e_j (i <= j) maps to G[i][j].
fn sym_functional(gram: &Mat) -> Mat {
    let n = gram.rows;
    let pairs = multisets(n, 2);
    let mut h = Mat::zero(1, pairs.len());
    for (k, p) in pairs.iter().enumerate() {
        h.set(0, k, gram.get(p[0], p[1]));
    }
    h
}

/// Two-row functional on the tensor square induced by the component Grams
/// of a hermitian form, with values in the rank-two extension module.
fn hermitian_functional(g1: &Mat, g2: &Mat) -> Mat {
    let n = g1.rows;
    let mut h = Mat::zero(2, n * n);
    for a in 0..n {
        for b in 0..n {
            h.set(0, a * n + b, g1.get(a, b));
            h.set(1, a * n + b, g2.get(a, b));
        }
    }
    h
}

/// The constant rank-two zip modeling the quadratic extension on its basis
/// (1, gamma): both filtrations jump at 0, identity comparison map.
fn extension_module(field: &FqField, twist: u64) -> Result<FZip, ZipError> {
    FZip::from_matrix_model(field, twist, &[0, 0], &Mat::identity(2))
}

/// Companion action of gamma on coordinates (f_0.., gamma f_0..):
/// gamma * f_j = gamma f_j and gamma * (gamma f_j) = -m f_j + s gamma f_j.
fn companion_rho(f: &FqField, n: usize, s: F, m: F) -> Mat {
    let mut r = Mat::zero(2 * n, 2 * n);
    for j in 0..n {
        r.set(n + j, j, 1);
        r.set(j, n + j, f.neg(m));
        r.set(n + j, n + j, s);
    }
    r
}

/// Component Grams of the split hermitian form (antidiagonal ones over the
/// extension) on the companion coordinates.
fn companion_grams(f: &FqField, n: usize, s: F, m: F) -> (Mat, Mat) {
    let nn = 2 * n;
    let mut g1 = Mat::zero(nn, nn);
    let mut g2 = Mat::zero(nn, nn);
    for i in 0..n {
        let j = n - 1 - i;
        // H(f_i, f_j) = 1, H(f_i, gamma f_j) = gamma,
        // H(gamma f_i, f_j) = s - gamma, H(gamma f_i, gamma f_j) = m.
        g1.set(i, j, 1);
        g2.set(i, n + j, 1);
        g1.set(n + i, j, s);
        g2.set(n + i, j, f.neg(1));
        g1.set(n + i, n + j, m);
    }
    (g1, g2)
}

/// Component Grams recovered from the gamma component: G2 is determined by
/// the skew part of G+ and G1 by subtracting gamma G2 back off.
fn grams_from_gamma_component(f: &FqField, gplus: &Mat, ga: F, gaq: F) -> (Mat, Mat) {
    let denom = f.sub(ga, gaq);
    let g2 = mat_sub(f, gplus, &gplus.transpose()).scale(f, f.inv(denom));
    let g1 = mat_sub(f, gplus, &g2.scale(f, ga));
    (g1, g2)
}

/// Diagonalized action and component Grams on eigen coordinates: the gamma
/// half first, then the conjugate half, paired by the antidiagonal.
fn eigen_rho_and_grams(f: &FqField, n: usize, ga: F, gaq: F) -> (Mat, Mat, Mat) {
    let nn = 2 * n;
    let mut rho = Mat::zero(nn, nn);
    for j in 0..n {
        rho.set(j, j, ga);
        rho.set(n + j, n + j, gaq);
    }
    let mut gplus = Mat::zero(nn, nn);
    for i in 0..n {
        gplus.set(n + i, n - 1 - i, 1);
    }
    let (g1, g2) = grams_from_gamma_component(f, &gplus, ga, gaq);
    (rho, g1, g2)
}

/// Checks that g is an invertible similitude of the hermitian pair
/// commuting with the quadratic action, and returns its multiplier.
fn unitary_membership(
    f: &FqField,
    g: &Mat,
    rho: &Mat,
    g1: &Mat,
    g2: &Mat,
    exact: bool,
) -> Result<F, ZipError> {
    let nn = rho.rows;
    if g.rows != nn || g.cols != nn {
        return Err(ZipError::Validation(format!(
            "matrix must be {} x {}: the module doubles the type rank",
            nn, nn
        )));
    }
    if g.inverse(f).is_none() {
        return Err(ZipError::Validation("matrix is not invertible".into()));
    }
    if g.mul(f, rho) != rho.mul(f, g) {
        return Err(ZipError::Validation(
            "matrix does not commute with the quadratic action".into(),
        ));
    }
    let c = hermitian_similitude_factor(f, g, g1, g2).ok_or_else(|| {
        ZipError::Validation("matrix is not a similitude of the hermitian form".into())
    })?;
    if exact && c != 1 {
        return Err(ZipError::Validation(format!(
            "matrix scales the hermitian form by {} instead of preserving it",
            c
        )));
    }
    Ok(c)
}

/// Standard object of a family: the split form on the standard module,
/// with the ascending filtration translated by g.  The matrix g must
/// belong to the family's group: invertible, determinant one, a similitude
/// of the split form, or a similitude commuting with the quadratic action;
/// families without a multiplier require similitude factor 1.  Unitary
/// matrices act on the doubled module.
pub fn standard_classical(
    family: GroupFamily,
    field: &FqField,
    twist: u64,
    t: &CocharacterType,
    g: &Mat,
) -> Result<ClassicalObject, ZipError> {
    let info = validate_type(family, t)?;
    let f = field;
    let n = family.module_rank();
    if family.odd_char_only() && f.p == 2 {
        return Err(ZipError::Validation(
            "characteristic 2: orthogonal objects are not supported".into(),
        ));
    }
    match family {
        GroupFamily::Gl(_) => {
            if g.rows != n || g.cols != n || g.inverse(f).is_none() {
                return Err(ZipError::Validation("matrix is not invertible".into()));
            }
            Ok(ClassicalObject::Plain(standard_zip_gl(f, twist, t, g)?))
        }
        GroupFamily::Sl(_) => {
            if g.rows != n || g.cols != n {
                return Err(ZipError::Validation(format!("matrix must be {} x {}", n, n)));
            }
            let det = g.det(f);
            if det != 1 {
                return Err(ZipError::Validation(format!(
                    "matrix has determinant {} instead of 1",
                    det
                )));
            }
            let m = FZip::from_matrix_model(f, twist, &standard_lambda(t), g)?;
            Ok(ClassicalObject::DetTrivialized(DetTrivializedFZip {
                m,
                delta: Mat::identity(1),
            }))
        }
        GroupFamily::Sp(_) | GroupFamily::CSp(_) | GroupFamily::O(_) | GroupFamily::CO(_) => {
            let (kind, gram) = if matches!(family, GroupFamily::Sp(_) | GroupFamily::CSp(_)) {
                (PairingKind::Symplectic, split_symplectic_gram(f, n))
            } else {
                (PairingKind::Orthogonal, split_symmetric_gram(n))
            };
            if g.rows != n || g.cols != n || g.inverse(f).is_none() {
                return Err(ZipError::Validation("matrix is not invertible".into()));
            }
            let c = similitude_factor(f, g, &gram).ok_or_else(|| {
                ZipError::Validation(format!(
                    "matrix is not a similitude of the split {} form",
                    kind.name()
                ))
            })?;
            if !family.has_multiplier() && c != 1 {
                return Err(ZipError::Validation(format!(
                    "matrix scales the {} form by {} instead of preserving it",
                    kind.name(),
                    c
                )));
            }
            let m = FZip::from_matrix_model(f, twist, &standard_lambda(t), g)?;
            let target = rank_one_target(f, twist, info.multiplier, c)?;
            Ok(ClassicalObject::Paired(PairedFZip {
                m,
                kind,
                target,
                pairing: gram,
                rho: None,
            }))
        }
        GroupFamily::U(_) | GroupFamily::CU(_) => {
            let d = info.multiplier;
            let (s, mm) = quadratic_coeffs(f, twist)?;
            let lambda = standard_lambda(t);
            let exact = !family.has_multiplier();
            if info.base_degree == 1 {
                // Symmetric type: the split object is rational over the
                // twist field, on companion coordinates.
                let rho = companion_rho(f, n, s, mm);
                let (g1, g2) = companion_grams(f, n, s, mm);
                let c = unitary_membership(f, g, &rho, &g1, &g2, exact)?;
                let mut mu = lambda.clone();
                mu.extend_from_slice(&lambda);
                let m = FZip::from_matrix_model(f, twist, &mu, g)?;
                let target = rank_one_target(f, twist, d, c)?;
                Ok(ClassicalObject::Paired(PairedFZip {
                    m,
                    kind: PairingKind::Unitary,
                    target,
                    pairing: g1.hstack(&g2),
                    rho: Some(rho),
                }))
            } else {
                // Asymmetric type: the halves have different graded ranks,
                // so the object only exists where the action diagonalizes.
                let (ga, gaq) = quadratic_roots(f, s, mm).ok_or_else(|| {
                    ZipError::Validation(
                        "type is asymmetric and the field does not contain the \
                         quadratic extension of the twist field"
                            .into(),
                    )
                })?;
                let (rho, g1, g2) = eigen_rho_and_grams(f, n, ga, gaq);
                let c = unitary_membership(f, g, &rho, &g1, &g2, exact)?;
                let nn = 2 * n;
                // Weights: the gamma half filters by lambda, the conjugate
                // half by its reflection through d; the comparison map
                // swaps the halves coordinatewise.
                let mut support: Vec<i64> = Vec::new();
                for j in 0..n {
                    support.push(lambda[j]);
                    support.push(d - lambda[n - 1 - j]);
                }
                support.sort_unstable();
                support.dedup();
                let mut c_raw = BTreeMap::new();
                let mut d_raw = BTreeMap::new();
                let mut phi_raw = BTreeMap::new();
                for &i in &support {
                    let plus: Vec<usize> = (0..n).filter(|&j| lambda[j] == i).collect();
                    let minus: Vec<usize> =
                        (0..n).filter(|&j| d - lambda[n - 1 - j] == i).collect();
                    let mut c_cols: Vec<usize> = plus.clone();
                    c_cols.extend(minus.iter().map(|&j| n + j));
                    let mut d_cols: Vec<usize> = plus.iter().map(|&j| n + j).collect();
                    d_cols.extend(minus.iter().copied());
                    c_raw.insert(i, unit_columns(nn, &c_cols));
                    d_raw.insert(i, g.mul(f, &unit_columns(nn, &d_cols)));
                    phi_raw.insert(i, Mat::identity(c_cols.len()));
                }
                let m = FZip::new(f.clone(), twist, &c_raw, &d_raw, &phi_raw)?;
                let target = rank_one_target(f, twist, d, c)?;
                Ok(ClassicalObject::Paired(PairedFZip {
                    m,
                    kind: PairingKind::Unitary,
                    target,
                    pairing: g1.hstack(&g2),
                    rho: Some(rho),
                }))
            }
        }
    }
}

/// Weight of the single jump of a rank-one target.
fn target_weight(target: &FZip) -> Result<i64, ZipError> {
    if target.rank() != 1 {
        return Err(ZipError::Validation(format!(
            "target is not of rank one: rank {}",
            target.rank()
        )));
    }
    Ok(*target.type_of().keys().next().expect("rank one has a jump"))
}

/// Validates every axiom of a classical object, naming the first failed
/// check in the error.
pub fn validate_classical(obj: &ClassicalObject) -> Result<(), ZipError> {
    match obj {
        ClassicalObject::Plain(_) => Ok(()),
        ClassicalObject::DetTrivialized(dt) => validate_det(dt),
        ClassicalObject::Paired(p) => match p.kind {
            PairingKind::Symplectic | PairingKind::Orthogonal => validate_bilinear(p),
            PairingKind::Unitary => validate_unitary(p),
        },
    }
}

fn validate_det(dt: &DetTrivializedFZip) -> Result<(), ZipError> {
    let f = &dt.m.field;
    if dt.delta.rows != 1 || dt.delta.cols != 1 {
        return Err(ZipError::Validation("delta must be a 1 x 1 matrix".into()));
    }
    if dt.delta.get(0, 0) == 0 {
        return Err(ZipError::Validation("delta is not invertible".into()));
    }
    let weighted: i64 = dt.m.type_of().iter().map(|(&i, &c)| i * c as i64).sum();
    if weighted != 0 {
        return Err(ZipError::Validation(format!(
            "weighted rank sum is {} instead of 0, so the top power is not the unit",
            weighted
        )));
    }
    let top = dt.m.power(dt.m.rank(), PowerKind::Alternating)?;
    let unit = FZip::make_tate(f, dt.m.twist, 0)?;
    if !is_admissible_morphism(&dt.delta, &top, &unit)? {
        return Err(ZipError::Validation(
            "delta is not an admissible isomorphism onto the unit".into(),
        ));
    }
    Ok(())
}

fn type_symmetric_about(tc: &BTreeMap<i64, usize>, d: i64) -> bool {
    tc.iter()
        .all(|(&i, &c)| tc.get(&(d - i)).copied().unwrap_or(0) == c)
}

fn validate_bilinear(p: &PairedFZip) -> Result<(), ZipError> {
    let f = &p.m.field;
    let n = p.m.rank();
    if p.rho.is_some() {
        return Err(ZipError::Validation(
            "a quadratic action only belongs to unitary objects".into(),
        ));
    }
    if p.pairing.rows != n || p.pairing.cols != n {
        return Err(ZipError::Validation(format!(
            "pairing must be a {} x {} Gram matrix",
            n, n
        )));
    }
    let gram = &p.pairing;
    match p.kind {
        PairingKind::Symplectic => {
            if n % 2 != 0 {
                return Err(ZipError::Validation(format!(
                    "n odd: rank {} carries no nondegenerate alternating form",
                    n
                )));
            }
            let skew = gram.transpose() == gram.scale(f, f.neg(1));
            let diag_zero = (0..n).all(|i| gram.get(i, i) == 0);
            if !skew || !diag_zero {
                return Err(ZipError::Validation("pairing is not alternating".into()));
            }
        }
        PairingKind::Orthogonal => {
            if f.p == 2 {
                return Err(ZipError::Validation(
                    "characteristic 2: orthogonal objects are not supported".into(),
                ));
            }
            if gram.transpose() != *gram {
                return Err(ZipError::Validation("pairing is not symmetric".into()));
            }
        }
        PairingKind::Unitary => unreachable!(),
    }
    if gram.inverse(f).is_none() {
        return Err(ZipError::Validation("pairing is degenerate".into()));
    }
    let d = target_weight(&p.target)?;
    if !type_symmetric_about(&p.m.type_of(), d) {
        return Err(ZipError::Validation(format!(
            "type is not symmetric about {}: n_i != n_{{d-i}}",
            d
        )));
    }
    let (h, square) = match p.kind {
        PairingKind::Symplectic => (
            wedge_functional(gram),
            p.m.power(2, PowerKind::Alternating)?,
        ),
        PairingKind::Orthogonal => (sym_functional(gram), p.m.power(2, PowerKind::Symmetric)?),
        PairingKind::Unitary => unreachable!(),
    };
    if h.rank(f) != 1 {
        return Err(ZipError::Validation(
            "pairing is not an epimorphism onto the target".into(),
        ));
    }
    if !is_admissible_morphism(&h, &square, &p.target)? {
        return Err(ZipError::Validation(
            "pairing is not an admissible morphism onto the target".into(),
        ));
    }
    Ok(())
}

/// Graded ranks of the filtration induced on a subspace, per jump of the
/// ambient chain.  `descending` says which neighbor is the smaller member.
fn induced_type(
    f: &FqField,
    steps: &[(i64, Mat)],
    half: &Mat,
    descending: bool,
) -> BTreeMap<i64, usize> {
    let dims: Vec<(i64, usize)> = steps
        .iter()
        .map(|(i, m)| (*i, subspace_intersect(f, m, half).cols))
        .collect();
    let mut out = BTreeMap::new();
    for t in 0..dims.len() {
        let here = dims[t].1;
        let other = if descending {
            if t + 1 < dims.len() {
                dims[t + 1].1
            } else {
                0
            }
        } else if t > 0 {
            dims[t - 1].1
        } else {
            0
        };
        if here > other {
            out.insert(dims[t].0, here - other);
        }
    }
    out
}

fn validate_unitary(p: &PairedFZip) -> Result<(), ZipError> {
    let f = &p.m.field;
    let q = p.m.twist;
    let nn = p.m.rank();
    let r = p.rho.as_ref().ok_or_else(|| {
        ZipError::Validation("unitary object is missing the quadratic action".into())
    })?;
    if r.rows != nn || r.cols != nn {
        return Err(ZipError::Validation(format!(
            "quadratic action must be {} x {}",
            nn, nn
        )));
    }
    let (s, mm) = quadratic_coeffs(f, q)?;
    // rho must satisfy the defining polynomial x^2 - s x + m.
    let rr = r.mul(f, r);
    for i in 0..nn {
        for j in 0..nn {
            let mut v = f.sub(rr.get(i, j), f.mul(s, r.get(i, j)));
            if i == j {
                v = f.add(v, mm);
            }
            if v != 0 {
                return Err(ZipError::Validation(
                    "rho is not an action of the quadratic extension: it fails \
                     its defining polynomial"
                        .into(),
                ));
            }
        }
    }
    if !is_admissible_morphism(r, &p.m, &p.m)? {
        return Err(ZipError::Validation(
            "rho is not an admissible endomorphism".into(),
        ));
    }
    if p.pairing.rows != nn || p.pairing.cols != 2 * nn {
        return Err(ZipError::Validation(format!(
            "pairing must be the {} x {} pair of component Grams [G1 | G2]",
            nn,
            2 * nn
        )));
    }
    let (g1, g2) = p.hermitian_components().expect("shape checked");
    // Conjugate symmetry of the form on the basis (1, gamma).
    let sym1 = g1.transpose() == mat_add(f, &g1, &g2.scale(f, s));
    let sym2 = g2.transpose() == g2.scale(f, f.neg(1));
    if !sym1 || !sym2 {
        return Err(ZipError::Validation("pairing is not hermitian".into()));
    }
    // Sesquilinearity: gamma moves across the form as its conjugate
    // s - gamma.
    let rt = r.transpose();
    let ok_sesqui = rt.mul(f, &g1) == mat_add(f, &g1.scale(f, s), &g2.scale(f, mm))
        && rt.mul(f, &g2) == g1.scale(f, f.neg(1))
        && g1.mul(f, r) == g2.scale(f, f.neg(mm))
        && g2.mul(f, r) == mat_add(f, &g1, &g2.scale(f, s));
    if !ok_sesqui {
        return Err(ZipError::Validation(
            "pairing is not sesquilinear over the quadratic action".into(),
        ));
    }
    let d = target_weight(&p.target)?;
    match quadratic_roots(f, s, mm) {
        Some((ga, gaq)) => {
            let eye = Mat::identity(nn);
            let eplus = mat_sub(f, r, &eye.scale(f, ga)).kernel(f);
            let eminus = mat_sub(f, r, &eye.scale(f, gaq)).kernel(f);
            if 2 * eplus.cols != nn || 2 * eminus.cols != nn {
                return Err(ZipError::Validation(format!(
                    "malformed rho: eigenspace ranks {} and {} instead of {}",
                    eplus.cols,
                    eminus.cols,
                    nn / 2
                )));
            }
            let plus_c = induced_type(f, &p.m.c.steps, &eplus, true);
            let minus_c = induced_type(f, &p.m.c.steps, &eminus, true);
            let reflected: BTreeMap<i64, usize> =
                plus_c.iter().map(|(&i, &c)| (d - i, c)).collect();
            if minus_c != reflected {
                return Err(ZipError::Validation(
                    "the eigenspace filtrations are not reflections of each \
                     other about the target weight"
                        .into(),
                ));
            }
        }
        None => {
            if nn % 2 != 0 {
                return Err(ZipError::Validation(format!(
                    "odd rank {}: the quadratic action has no free half",
                    nn
                )));
            }
            let tc = p.m.type_of();
            if tc.values().any(|&c| c % 2 != 0) {
                return Err(ZipError::Validation(
                    "graded rank odd at some weight: the filtration cannot be \
                     stable under the quadratic action"
                        .into(),
                ));
            }
            if !type_symmetric_about(&tc, d) {
                return Err(ZipError::Validation(format!(
                    "type is not symmetric about {}: n_i != n_{{d-i}}",
                    d
                )));
            }
        }
    }
    // Nondegeneracy via the trace form.
    let two = f.add(1, 1);
    let trace_form = mat_add(f, &g1.scale(f, two), &g2.scale(f, s));
    if trace_form.inverse(f).is_none() {
        return Err(ZipError::Validation("pairing is degenerate".into()));
    }
    let h = hermitian_functional(&g1, &g2);
    if h.rank(f) != 2 {
        return Err(ZipError::Validation(
            "pairing is not an epimorphism onto the target".into(),
        ));
    }
    let square = p.m.tensor(&p.m)?;
    let ext = extension_module(f, q)?;
    let t2 = p.target.tensor(&ext)?;
    if !is_admissible_morphism(&h, &square, &t2)? {
        return Err(ZipError::Validation(
            "pairing is not an admissible morphism onto the target".into(),
        ));
    }
    Ok(())
}

/// One eigenspace half of a unitary object: its basis inside the ambient
/// module, the two induced filtrations, the graded ranks of the descending
/// one, and the graded comparison maps.  `psi[i]` sends the twisted
/// weight-i graded piece of the descending filtration to functionals on
/// the weight-(d - i) graded piece of the ascending one, written in the
/// canonical chain-lift bases on both sides.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UnitaryDecomposition {
    pub n_tilde: Mat,
    pub c_steps: Vec<(i64, Mat)>,
    pub d_steps: Vec<(i64, Mat)>,
    pub ntype: BTreeMap<i64, usize>,
    pub psi: BTreeMap<i64, Mat>,
}

/// First nonzero row of each column of an echelon basis.
fn echelon_pivots(m: &Mat) -> Vec<usize> {
    (0..m.cols)
        .map(|c| {
            (0..m.rows)
                .find(|&r| m.get(r, c) != 0)
                .expect("echelon basis has no zero column")
        })
        .collect()
}

/// Graded lifts of a nested chain of echelon bases by the pivot rule: at
/// each member, the columns whose pivot rows are new relative to the
/// adjacent smaller member.  `descending` picks which neighbor is smaller;
/// the chain is listed by ascending index either way.
fn chain_lifts(steps: &[(i64, Mat)], descending: bool) -> BTreeMap<i64, Mat> {
    let mut out = BTreeMap::new();
    let order: Vec<usize> = if descending {
        (0..steps.len()).rev().collect()
    } else {
        (0..steps.len()).collect()
    };
    let mut prev: Vec<usize> = Vec::new();
    for t in order {
        let (i, e) = &steps[t];
        let piv = echelon_pivots(e);
        let cols: Vec<usize> = (0..piv.len())
            .filter(|&j| !prev.contains(&piv[j]))
            .collect();
        let all_rows: Vec<usize> = (0..e.rows).collect();
        out.insert(*i, e.submatrix(&all_rows, &cols));
        prev = piv;
    }
    out
}

/// Splits a unitary object over a field where the quadratic action
/// diagonalizes: the gamma eigenspace with its induced filtrations and
/// graded comparison maps determines the object up to isomorphism.
pub fn unitary_decompose(obj: &PairedFZip) -> Result<UnitaryDecomposition, ZipError> {
    if obj.kind != PairingKind::Unitary {
        return Err(ZipError::Validation(format!(
            "cannot decompose a {} object: only unitary objects split",
            obj.kind.name()
        )));
    }
    let f = &obj.m.field;
    let q = obj.m.twist;
    let nn = obj.m.rank();
    let (s, mm) = quadratic_coeffs(f, q)?;
    let (ga, gaq) = quadratic_roots(f, s, mm).ok_or_else(|| {
        ZipError::Validation(
            "the field does not contain the quadratic extension of the twist \
             field: extend scalars before decomposing"
                .into(),
        )
    })?;
    let r = obj.rho.as_ref().ok_or_else(|| {
        ZipError::Validation("unitary object is missing the quadratic action".into())
    })?;
    if r.rows != nn || r.cols != nn {
        return Err(ZipError::Validation(format!(
            "quadratic action must be {} x {}",
            nn, nn
        )));
    }
    let eye = Mat::identity(nn);
    let eplus = mat_sub(f, r, &eye.scale(f, ga)).kernel(f);
    let eminus = mat_sub(f, r, &eye.scale(f, gaq)).kernel(f);
    if 2 * eplus.cols != nn || 2 * eminus.cols != nn {
        return Err(ZipError::Validation(format!(
            "malformed rho: eigenspace ranks {} and {} instead of {}",
            eplus.cols,
            eminus.cols,
            nn / 2
        )));
    }
    let n = nn / 2;
    let d = target_weight(&obj.target)?;
    let (g1, g2) = obj.hermitian_components().ok_or_else(|| {
        ZipError::Validation("pairing must be the pair of component Grams [G1 | G2]".into())
    })?;
    // The gamma component of the form pairs the conjugate half against the
    // gamma half.
    let gplus = mat_add(f, &g1, &g2.scale(f, ga));
    let cn: Vec<(i64, Mat)> = obj
        .m
        .c
        .steps
        .iter()
        .map(|(i, m)| (*i, subspace_intersect(f, m, &eplus)))
        .collect();
    let dn: Vec<(i64, Mat)> = obj
        .m
        .d
        .steps
        .iter()
        .map(|(i, m)| (*i, subspace_intersect(f, m, &eplus)))
        .collect();
    let dnp: Vec<(i64, Mat)> = obj
        .m
        .d
        .steps
        .iter()
        .map(|(i, m)| (*i, subspace_intersect(f, m, &eminus)))
        .collect();
    let c_lifts = chain_lifts(&cn, true);
    let d_lifts = chain_lifts(&dn, false);
    let dp_lifts = chain_lifts(&dnp, false);
    let width = |lifts: &BTreeMap<i64, Mat>, i: i64| lifts.get(&i).map_or(0, |m| m.cols);
    let ntype: BTreeMap<i64, usize> = c_lifts
        .iter()
        .filter(|(_, m)| m.cols > 0)
        .map(|(&i, m)| (i, m.cols))
        .collect();
    if ntype.values().sum::<usize>() != n {
        return Err(ZipError::Validation(
            "the descending filtration is not stable under the quadratic action".into(),
        ));
    }
    if d_lifts.values().map(|m| m.cols).sum::<usize>() != n {
        return Err(ZipError::Validation(
            "the ascending filtration is not stable under the quadratic action".into(),
        ));
    }
    for (&i, &c) in &ntype {
        if width(&d_lifts, d - i) != c || width(&dp_lifts, i) != c {
            return Err(ZipError::Validation(
                "the induced filtrations are not reflections of each other \
                 about the target weight"
                    .into(),
            ));
        }
    }
    // Ambient graded coordinates: canonical lifts of both flags, with the
    // descending ones concatenated by ascending weight.
    let c_canon = obj.m.c.graded_lifts(f);
    let d_canon = obj.m.d.graded_lifts(f);
    let mut ec = Mat::zero(nn, 0);
    let mut row_range: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    let mut off = 0;
    for (w, b) in &c_canon {
        row_range.insert(*w, (off, off + b.cols));
        off += b.cols;
        ec = ec.hstack(b);
    }
    let mut psi = BTreeMap::new();
    for (&i, cl) in &c_lifts {
        if cl.cols == 0 {
            continue;
        }
        let ni = cl.cols;
        let coords = ec
            .solve(f, cl)
            .ok_or_else(|| ZipError::Internal("flag basis does not span".into()))?;
        let (lo, hi) = row_range[&i];
        let block =
            coords.submatrix(&(lo..hi).collect::<Vec<_>>(), &(0..ni).collect::<Vec<_>>());
        let img = obj
            .m
            .phi
            .get(&i)
            .ok_or_else(|| ZipError::Internal("missing graded comparison".into()))?
            .mul(f, &block.pow_entrywise(f, q));
        let w = d_canon
            .get(&i)
            .ok_or_else(|| ZipError::Internal("missing graded lift".into()))?
            .mul(f, &img);
        // Solve inside the ascending step: conjugate-half lift, gamma-half
        // lift, then everything below.
        let dprev = obj
            .m
            .d
            .steps
            .iter()
            .rev()
            .find(|(j, _)| *j < i)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| Mat::zero(nn, 0));
        let half_p = &dp_lifts[&i];
        let half_n = &d_lifts[&i];
        let basis = half_p.hstack(half_n).hstack(&dprev);
        let sol = basis.solve(f, &w).ok_or_else(|| {
            ZipError::Validation(
                "the comparison map does not respect the ascending filtration".into(),
            )
        })?;
        let a_block = sol.submatrix(
            &(0..half_p.cols).collect::<Vec<_>>(),
            &(0..ni).collect::<Vec<_>>(),
        );
        let n_block = sol.submatrix(
            &(half_p.cols..half_p.cols + half_n.cols).collect::<Vec<_>>(),
            &(0..ni).collect::<Vec<_>>(),
        );
        if !n_block.is_zero() {
            return Err(ZipError::Validation(
                "the comparison map does not exchange the eigenspace halves".into(),
            ));
        }
        let lift_opp = &d_lifts[&(d - i)];
        let p_i = half_p.transpose().mul(f, &gplus).mul(f, lift_opp);
        if p_i.inverse(f).is_none() {
            return Err(ZipError::Validation(
                "pairing is degenerate on the graded pieces".into(),
            ));
        }
        psi.insert(i, p_i.transpose().mul(f, &a_block));
    }
    Ok(UnitaryDecomposition {
        n_tilde: eplus,
        c_steps: cn,
        d_steps: dn,
        ntype,
        psi,
    })
}

/// Rebuilds a unitary object from an eigenspace decomposition: the module
/// is the half plus its twisted dual, carrying the canonical pairing, the
/// diagonal action, and the comparison maps dictated by psi and the
/// target.  The result is isomorphic to any object the decomposition came
/// from.
pub fn unitary_recompose(
    field: &FqField,
    twist: u64,
    target: &FZip,
    dec: &UnitaryDecomposition,
) -> Result<PairedFZip, ZipError> {
    let f = field;
    let (s, mm) = quadratic_coeffs(f, twist)?;
    let (ga, gaq) = quadratic_roots(f, s, mm).ok_or_else(|| {
        ZipError::Validation(
            "the field does not contain the quadratic extension of the twist field".into(),
        )
    })?;
    let d = target_weight(target)?;
    let phi_t = target
        .phi
        .get(&d)
        .ok_or_else(|| ZipError::Internal("rank-one target has no comparison map".into()))?
        .get(0, 0);
    let n: usize = dec.ntype.values().sum();
    if n == 0 {
        return Err(ZipError::Validation("empty decomposition".into()));
    }
    for (&i, &ni) in &dec.ntype {
        let p = dec.psi.get(&i).ok_or_else(|| {
            ZipError::Validation(format!("missing graded comparison at weight {}", i))
        })?;
        if p.rows != ni || p.cols != ni {
            return Err(ZipError::Validation(format!(
                "graded comparison at weight {} has the wrong size",
                i
            )));
        }
        if p.inverse(f).is_none() {
            return Err(ZipError::Validation(format!(
                "graded comparison at weight {} is singular",
                i
            )));
        }
    }
    if dec.psi.keys().any(|i| !dec.ntype.contains_key(i)) {
        return Err(ZipError::Validation(
            "graded comparison at a weight outside the type".into(),
        ));
    }
    // Basis of the half from the descending chain, ascending weight.
    let c_lifts = chain_lifts(&dec.c_steps, true);
    let lift_type: BTreeMap<i64, usize> = c_lifts
        .iter()
        .filter(|(_, m)| m.cols > 0)
        .map(|(&i, m)| (i, m.cols))
        .collect();
    if lift_type != dec.ntype {
        return Err(ZipError::Validation(
            "descending filtration does not match the stated type".into(),
        ));
    }
    let mut e_amb = Mat::zero(dec.n_tilde.rows, 0);
    let mut cw: Vec<i64> = Vec::new();
    for (i, b) in &c_lifts {
        for _ in 0..b.cols {
            cw.push(*i);
        }
        e_amb = e_amb.hstack(b);
    }
    if e_amb.rank(f) != n {
        return Err(ZipError::Validation(
            "descending filtration basis is degenerate".into(),
        ));
    }
    // Ascending chain in those coordinates.
    let d_lifts = chain_lifts(&dec.d_steps, false);
    let mut bd = Mat::zero(n, 0);
    let mut dw: Vec<i64> = Vec::new();
    for (j, b) in &d_lifts {
        if b.cols == 0 {
            continue;
        }
        let sol = e_amb.solve(f, b).ok_or_else(|| {
            ZipError::Validation("ascending filtration does not lie in the half".into())
        })?;
        for _ in 0..b.cols {
            dw.push(*j);
        }
        bd = bd.hstack(&sol);
    }
    let mut dtype: BTreeMap<i64, usize> = BTreeMap::new();
    for &j in &dw {
        *dtype.entry(j).or_insert(0) += 1;
    }
    let reflected: BTreeMap<i64, usize> = dec.ntype.iter().map(|(&i, &c)| (d - i, c)).collect();
    if dtype != reflected {
        return Err(ZipError::Validation(
            "ascending filtration is not the reflection of the type about the \
             target weight"
                .into(),
        ));
    }
    let bd_inv_t = bd
        .inverse(f)
        .ok_or_else(|| {
            ZipError::Validation("ascending filtration does not span the half".into())
        })?
        .transpose();
    let nn = 2 * n;
    let count = |m: &BTreeMap<i64, usize>, i: i64| m.get(&i).copied().unwrap_or(0);
    let mut support: Vec<i64> = dec
        .ntype
        .keys()
        .copied()
        .chain(dec.ntype.keys().map(|&i| d - i))
        .collect();
    support.sort_unstable();
    support.dedup();
    let mut c_raw = BTreeMap::new();
    let mut d_raw = BTreeMap::new();
    let mut phi_raw = BTreeMap::new();
    for &i in &support {
        let ni = count(&dec.ntype, i);
        let nref = count(&dec.ntype, d - i);
        // Descending lift: half coordinates of weight i, then dual
        // coordinates whose underlying basis vector has weight d - i.
        let mut ccols = Mat::zero(nn, ni + nref);
        let mut col = 0;
        for r in 0..n {
            if cw[r] == i {
                ccols.set(r, col, 1);
                col += 1;
            }
        }
        for r in 0..n {
            if cw[r] == d - i {
                ccols.set(n + r, col, 1);
                col += 1;
            }
        }
        // Ascending lift: chain basis columns of weight i on the half,
        // then the dual functionals of the weight-(d - i) columns.
        let mut dcols = Mat::zero(nn, nref + ni);
        let mut col = 0;
        for c0 in 0..n {
            if dw[c0] == i {
                for r in 0..n {
                    dcols.set(r, col, bd.get(r, c0));
                }
                col += 1;
            }
        }
        for c0 in 0..n {
            if dw[c0] == d - i {
                for r in 0..n {
                    dcols.set(n + r, col, bd_inv_t.get(r, c0));
                }
                col += 1;
            }
        }
        // Comparison block: psi on the half; on the dual part the inverse
        // transpose scaled by the target comparison, forced by
        // compatibility with the pairing.
        let mut p = Mat::zero(nref + ni, ni + nref);
        if ni > 0 {
            let psi = &dec.psi[&i];
            for a in 0..ni {
                for b in 0..ni {
                    p.set(nref + a, b, psi.get(a, b));
                }
            }
        }
        if nref > 0 {
            let x = dec.psi[&(d - i)]
                .transpose()
                .inverse(f)
                .expect("graded comparison invertibility checked")
                .scale(f, phi_t);
            for a in 0..nref {
                for b in 0..nref {
                    p.set(a, ni + b, x.get(a, b));
                }
            }
        }
        c_raw.insert(i, ccols);
        d_raw.insert(i, dcols);
        phi_raw.insert(i, p);
    }
    let m = FZip::new(f.clone(), twist, &c_raw, &d_raw, &phi_raw)?;
    // Canonical pairing: the dual half pairs the original by evaluation.
    let mut gplus = Mat::zero(nn, nn);
    for r in 0..n {
        gplus.set(n + r, r, 1);
    }
    let (g1, g2) = grams_from_gamma_component(f, &gplus, ga, gaq);
    let mut rho = Mat::zero(nn, nn);
    for r in 0..n {
        rho.set(r, r, ga);
        rho.set(n + r, n + r, gaq);
    }
    Ok(PairedFZip {
        m,
        kind: PairingKind::Unitary,
        target: target.clone(),
        pairing: g1.hstack(&g2),
        rho: Some(rho),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fzip::isomorphic_over;
    use crate::zipdatum::build_zip_datum;

    fn f2() -> FqField {
        FqField::new(2, 1).unwrap()
    }

    fn f3() -> FqField {
        FqField::new(3, 1).unwrap()
    }

    fn f5() -> FqField {
        FqField::new(5, 1).unwrap()
    }

    fn f9() -> FqField {
        FqField::new(3, 2).unwrap()
    }

    fn mat(rows: &[&[u64]], f: &FqField) -> Mat {
        let mut m = Mat::zero(rows.len(), rows[0].len());
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, (v % f.q) as F);
            }
        }
        m
    }

    fn msg(e: ZipError) -> String {
        e.to_string()
    }

    #[test]
    fn quadratic_polynomial_has_no_small_root() {
        for (p, e, t) in [(2, 1, 1), (3, 1, 1), (2, 2, 1), (3, 2, 1), (5, 1, 1)] {
            let field = FqField::new(p, e).unwrap();
            let twist = p.pow(t);
            let (s, m) = quadratic_coeffs(&field, twist).unwrap();
            let base = FqField::new(p, t).unwrap();
            let emb = field.embedding_from(&base).unwrap();
            let no_root = base.elements().all(|x| {
                let xe = emb[x as usize];
                field.add(field.sub(field.mul(xe, xe), field.mul(s, xe)), m) != 0
            });
            assert!(no_root, "p={} e={}", p, e);
            let has_roots = quadratic_roots(&field, s, m).is_some();
            assert_eq!(has_roots, e % (2 * t) == 0, "p={} e={}", p, e);
        }
        // Conjugate roots are exchanged by the twist power map.
        let field = f9();
        let (s, m) = quadratic_coeffs(&field, 3).unwrap();
        let (ga, gaq) = quadratic_roots(&field, s, m).unwrap();
        assert_eq!(field.power_map(ga, 3), gaq);
        assert_eq!(field.add(ga, gaq), s);
        assert_eq!(field.mul(ga, gaq), m);
    }

    #[test]
    fn split_grams_have_the_right_symmetry() {
        let f = f3();
        for n in [2, 4, 6] {
            let g = split_symplectic_gram(&f, n);
            assert_eq!(g.transpose(), g.scale(&f, f.neg(1)));
            assert!((0..n).all(|i| g.get(i, i) == 0));
            assert!(g.inverse(&f).is_some());
        }
        for n in [1, 2, 3, 5] {
            let g = split_symmetric_gram(n);
            assert_eq!(g.transpose(), g);
            assert!(g.inverse(&f).is_some());
        }
    }

    #[test]
    fn standard_objects_validate_for_all_families() {
        let f = f3();
        let g_unip = mat(&[&[1, 1], &[0, 1]], &f);
        let cases: Vec<ClassicalObject> = vec![
            standard_classical(
                GroupFamily::Gl(2),
                &f,
                3,
                &CocharacterType::new(&[(0, 1), (1, 1)]),
                &g_unip,
            )
            .unwrap(),
            standard_classical(
                GroupFamily::Sl(2),
                &f,
                3,
                &CocharacterType::new(&[(-1, 1), (1, 1)]),
                &g_unip,
            )
            .unwrap(),
            standard_classical(
                GroupFamily::Sp(2),
                &f,
                3,
                &CocharacterType::new(&[(-1, 1), (1, 1)]),
                &g_unip,
            )
            .unwrap(),
            standard_classical(
                GroupFamily::CSp(2),
                &f,
                3,
                &CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 1),
                &mat(&[&[1, 0], &[0, 2]], &f),
            )
            .unwrap(),
            standard_classical(
                GroupFamily::O(3),
                &f,
                3,
                &CocharacterType::new(&[(-1, 1), (0, 1), (1, 1)]),
                &Mat::identity(3),
            )
            .unwrap(),
            standard_classical(
                GroupFamily::CO(2),
                &f5(),
                5,
                &CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 1),
                &Mat::identity(2),
            )
            .unwrap(),
            standard_classical(
                GroupFamily::U(2),
                &f2(),
                2,
                &CocharacterType::new(&[(-1, 1), (1, 1)]),
                &Mat::identity(4),
            )
            .unwrap(),
            standard_classical(
                GroupFamily::CU(2),
                &f9(),
                3,
                &CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 2),
                &Mat::identity(4),
            )
            .unwrap(),
        ];
        for (k, obj) in cases.iter().enumerate() {
            validate_classical(obj).unwrap_or_else(|e| panic!("case {}: {}", k, e));
        }
    }

    #[test]
    fn standard_rejects_non_members() {
        let f = f3();
        let t2 = CocharacterType::new(&[(-1, 1), (1, 1)]);
        let e = standard_classical(GroupFamily::Sl(2), &f, 3, &t2, &mat(&[&[2, 0], &[0, 1]], &f));
        assert!(msg(e.unwrap_err()).contains("determinant"));
        let e = standard_classical(GroupFamily::Sp(2), &f, 3, &t2, &mat(&[&[1, 1], &[1, 1]], &f));
        assert!(msg(e.unwrap_err()).contains("not invertible"));
        // Every invertible 2 x 2 matrix is a symplectic similitude, so a
        // genuine non-similitude needs rank 4.
        let t4 = CocharacterType::new(&[(-1, 2), (1, 2)]);
        let mut g4 = Mat::identity(4);
        g4.set(0, 1, 1);
        let e = standard_classical(GroupFamily::Sp(4), &f, 3, &t4, &g4);
        assert!(msg(e.unwrap_err()).contains("similitude"));
        // A similitude with factor 2 is fine for CSp but not Sp.
        let e = standard_classical(GroupFamily::Sp(2), &f, 3, &t2, &mat(&[&[1, 0], &[0, 2]], &f));
        assert!(msg(e.unwrap_err()).contains("instead of preserving"));
        // Unitary membership needs the doubled rank and commutation.
        let e = standard_classical(GroupFamily::U(2), &f2(), 2, &t2, &Mat::identity(2));
        assert!(msg(e.unwrap_err()).contains("doubles the type rank"));
        let mut bad = Mat::identity(4);
        bad.set(0, 1, 1);
        let e = standard_classical(GroupFamily::U(2), &f2(), 2, &t2, &bad);
        assert!(msg(e.unwrap_err()).contains("commute with the quadratic action"));
        // Orthogonal families refuse characteristic 2 outright.
        let e = standard_classical(
            GroupFamily::O(2),
            &f2(),
            2,
            &CocharacterType::new(&[(-1, 1), (1, 1)]),
            &Mat::identity(2),
        );
        assert!(msg(e.unwrap_err()).contains("characteristic 2"));
    }

    #[test]
    fn multiplier_families_record_the_similitude_factor() {
        let f = f3();
        let obj = standard_classical(
            GroupFamily::CSp(2),
            &f,
            3,
            &CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 1),
            &mat(&[&[1, 0], &[0, 2]], &f),
        )
        .unwrap();
        let p = match &obj {
            ClassicalObject::Paired(p) => p,
            _ => panic!("expected a paired object"),
        };
        assert_eq!(p.target.phi.get(&1).unwrap().get(0, 0), 2);
        // Unitary similitude: diag(a, a, b, b) on eigen coordinates scales
        // the form by a * b.
        let f = f9();
        let b = f.neg(1);
        let mut g = Mat::identity(4);
        g.set(2, 2, b);
        g.set(3, 3, b);
        let obj = standard_classical(
            GroupFamily::CU(2),
            &f,
            3,
            &CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 2),
            &g,
        )
        .unwrap();
        let p = match &obj {
            ClassicalObject::Paired(p) => p,
            _ => panic!("expected a paired object"),
        };
        assert_eq!(p.target.phi.get(&2).unwrap().get(0, 0), b);
        validate_classical(&obj).unwrap();
    }

    fn standard_paired(
        family: GroupFamily,
        field: &FqField,
        twist: u64,
        t: &CocharacterType,
    ) -> PairedFZip {
        let size = family.module_rank()
            * if matches!(family, GroupFamily::U(_) | GroupFamily::CU(_)) {
                2
            } else {
                1
            };
        match standard_classical(family, field, twist, t, &Mat::identity(size)).unwrap() {
            ClassicalObject::Paired(p) => p,
            _ => panic!("expected a paired object"),
        }
    }

    #[test]
    fn validate_names_each_defect() {
        let f = f3();
        let t2 = CocharacterType::new(&[(-1, 1), (1, 1)]);
        let sp = standard_paired(GroupFamily::Sp(2), &f, 3, &t2);

        // Not alternating.
        let mut bad = sp.clone();
        bad.pairing = mat(&[&[0, 1], &[1, 0]], &f);
        assert!(msg(validate_classical(&ClassicalObject::Paired(bad)).unwrap_err())
            .contains("not alternating"));

        // Degenerate.
        let mut bad = sp.clone();
        bad.pairing = Mat::zero(2, 2);
        assert!(msg(validate_classical(&ClassicalObject::Paired(bad)).unwrap_err())
            .contains("degenerate"));

        // Odd rank cannot be symplectic.
        let modd = FZip::from_matrix_model(&f, 3, &[0], &Mat::identity(1)).unwrap();
        let bad = PairedFZip {
            m: modd,
            kind: PairingKind::Symplectic,
            target: FZip::make_tate(&f, 3, 0).unwrap(),
            pairing: Mat::zero(1, 1),
            rho: None,
        };
        assert!(msg(validate_classical(&ClassicalObject::Paired(bad)).unwrap_err())
            .contains("n odd"));

        // Type not symmetric about the target weight.
        let masym = FZip::from_matrix_model(&f, 3, &[2, 0], &Mat::identity(2)).unwrap();
        let bad = PairedFZip {
            m: masym,
            kind: PairingKind::Symplectic,
            target: FZip::make_tate(&f, 3, 0).unwrap(),
            pairing: split_symplectic_gram(&f, 2),
            rho: None,
        };
        assert!(msg(validate_classical(&ClassicalObject::Paired(bad)).unwrap_err())
            .contains("not symmetric about"));

        // Target must have rank one.
        let mut bad = sp.clone();
        bad.target = FZip::from_matrix_model(&f, 3, &[0, 0], &Mat::identity(2)).unwrap();
        assert!(msg(validate_classical(&ClassicalObject::Paired(bad)).unwrap_err())
            .contains("rank one"));

        // Not symmetric.
        let o3 = standard_paired(
            GroupFamily::O(3),
            &f,
            3,
            &CocharacterType::new(&[(-1, 1), (0, 1), (1, 1)]),
        );
        let mut bad = o3.clone();
        bad.pairing = mat(&[&[0, 1, 0], &[2, 0, 0], &[0, 0, 1]], &f);
        assert!(msg(validate_classical(&ClassicalObject::Paired(bad)).unwrap_err())
            .contains("not symmetric"));

        // Orthogonal objects refuse characteristic 2.
        let m2 = FZip::from_matrix_model(&f2(), 2, &[0, 0], &Mat::identity(2)).unwrap();
        let bad = PairedFZip {
            m: m2,
            kind: PairingKind::Orthogonal,
            target: FZip::make_tate(&f2(), 2, 0).unwrap(),
            pairing: split_symmetric_gram(2),
            rho: None,
        };
        assert!(msg(validate_classical(&ClassicalObject::Paired(bad)).unwrap_err())
            .contains("characteristic 2"));

        // A bilinear object must not carry a quadratic action.
        let mut bad = sp.clone();
        bad.rho = Some(Mat::identity(2));
        assert!(msg(validate_classical(&ClassicalObject::Paired(bad)).unwrap_err())
            .contains("only belongs to unitary"));

        // Unitary defects.
        let u = standard_paired(GroupFamily::U(2), &f2(), 2, &t2);
        let mut bad = u.clone();
        bad.rho = None;
        assert!(msg(validate_classical(&ClassicalObject::Paired(bad)).unwrap_err())
            .contains("missing the quadratic action"));

        let mut bad = u.clone();
        bad.rho = Some(Mat::identity(4));
        assert!(msg(validate_classical(&ClassicalObject::Paired(bad)).unwrap_err())
            .contains("defining polynomial"));

        let mut bad = u.clone();
        let (g1, g2) = u.hermitian_components().unwrap();
        bad.pairing = g2.hstack(&g1);
        assert!(msg(validate_classical(&ClassicalObject::Paired(bad)).unwrap_err())
            .contains("hermitian"));

        // Dropping one component breaks hermitian symmetry or
        // sesquilinearity.
        let mut bad = u.clone();
        let (g1, g2) = u.hermitian_components().unwrap();
        bad.pairing = g1.hstack(&g2.scale(&f2(), 0));
        let e = msg(validate_classical(&ClassicalObject::Paired(bad)).unwrap_err());
        assert!(e.contains("sesquilinear") || e.contains("hermitian"), "{}", e);

        // Determinant trivialization defects.
        let sl = match standard_classical(GroupFamily::Sl(2), &f, 3, &t2, &Mat::identity(2))
            .unwrap()
        {
            ClassicalObject::DetTrivialized(dt) => dt,
            _ => panic!("expected a determinant trivialization"),
        };
        let mut bad = sl.clone();
        bad.delta = Mat::zero(1, 1);
        assert!(
            msg(validate_classical(&ClassicalObject::DetTrivialized(bad)).unwrap_err())
                .contains("not invertible")
        );

        let bad = DetTrivializedFZip {
            m: FZip::from_matrix_model(&f, 3, &[0, 1], &Mat::identity(2)).unwrap(),
            delta: Mat::identity(1),
        };
        assert!(
            msg(validate_classical(&ClassicalObject::DetTrivialized(bad)).unwrap_err())
                .contains("weighted rank sum")
        );

        // Over a bigger field delta must still be twist-rational.
        let f9 = f9();
        let m9 = FZip::from_matrix_model(&f9, 3, &[1, -1], &Mat::identity(2)).unwrap();
        let bad = DetTrivializedFZip {
            m: m9,
            delta: scalar1(3),
        };
        assert!(
            msg(validate_classical(&ClassicalObject::DetTrivialized(bad)).unwrap_err())
                .contains("admissible isomorphism")
        );
    }

    #[test]
    fn theta_order_follows_the_component_rule() {
        let o_cases: Vec<(usize, Vec<(i64, usize)>)> = vec![
            (2, vec![(-1, 1), (1, 1)]),
            (2, vec![(0, 2)]),
            (3, vec![(-1, 1), (0, 1), (1, 1)]),
            (3, vec![(0, 3)]),
            (4, vec![(-1, 2), (1, 2)]),
            (4, vec![(-1, 1), (0, 2), (1, 1)]),
            (5, vec![(-2, 1), (-1, 1), (0, 1), (1, 1), (2, 1)]),
        ];
        for (n, entries) in o_cases {
            let t = CocharacterType::new(&entries);
            let datum = build_zip_datum(GroupFamily::O(n), &t).unwrap();
            let expect = if t.count(0) > 0 { 2 } else { 1 };
            assert_eq!(datum.theta_order, expect, "O({}) {:?}", n, entries);
        }
        let co_cases: Vec<(usize, Vec<(i64, usize)>)> = vec![
            (2, vec![(0, 1), (1, 1)]),
            (2, vec![(0, 2)]),
            (3, vec![(0, 1), (1, 1), (2, 1)]),
            (4, vec![(0, 2), (2, 2)]),
            (4, vec![(0, 1), (1, 2), (2, 1)]),
            (4, vec![(1, 4)]),
        ];
        for (n, entries) in co_cases {
            let t = CocharacterType::new(&entries);
            let datum = build_zip_datum(GroupFamily::CO(n), &t).unwrap();
            let d = datum.info.multiplier;
            let mid = if d % 2 == 0 { t.count(d / 2) } else { 0 };
            let expect = if d % 2 == 0 && mid > 0 && mid % 2 == 0 {
                2
            } else {
                1
            };
            assert_eq!(datum.theta_order, expect, "CO({}) {:?}", n, entries);
        }
    }

    #[test]
    fn decompose_splits_the_standard_objects() {
        // Asymmetric type: the half keeps the stated graded ranks.
        let f = f9();
        let cu = standard_paired(
            GroupFamily::CU(2),
            &f,
            3,
            &CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 2),
        );
        let dec = unitary_decompose(&cu).unwrap();
        let expect: BTreeMap<i64, usize> = [(0, 1), (1, 1)].into_iter().collect();
        assert_eq!(dec.ntype, expect);
        assert_eq!(dec.n_tilde.cols, 2);
        assert_eq!(dec.psi.len(), 2);
        for p in dec.psi.values() {
            assert!(p.inverse(&f).is_some());
        }
        // Symmetric type on companion coordinates splits too.
        let u = standard_paired(
            GroupFamily::U(2),
            &f,
            3,
            &CocharacterType::new(&[(-1, 1), (1, 1)]),
        );
        let dec = unitary_decompose(&u).unwrap();
        let expect: BTreeMap<i64, usize> = [(-1, 1), (1, 1)].into_iter().collect();
        assert_eq!(dec.ntype, expect);
    }

    /// The canonical isomorphism from the recomposed module onto the
    /// original: chain-lift basis of the half, juxtaposed with its dual
    /// basis under the gamma component of the pairing.
    fn recompose_witness(obj: &PairedFZip, dec: &UnitaryDecomposition) -> Mat {
        let f = &obj.m.field;
        let nn = obj.m.rank();
        let (s, mm) = quadratic_coeffs(f, obj.m.twist).unwrap();
        let (ga, gaq) = quadratic_roots(f, s, mm).unwrap();
        let (g1, g2) = obj.hermitian_components().unwrap();
        let gplus = mat_add(f, &g1, &g2.scale(f, ga));
        let c_lifts = chain_lifts(&dec.c_steps, true);
        let mut e = Mat::zero(nn, 0);
        for b in c_lifts.values() {
            e = e.hstack(b);
        }
        let r = obj.rho.as_ref().unwrap();
        let eminus = mat_sub(f, r, &Mat::identity(nn).scale(f, gaq)).kernel(f);
        let a = eminus.transpose().mul(f, &gplus).mul(f, &e);
        let u = eminus.mul(f, &a.transpose().inverse(f).unwrap());
        e.hstack(&u)
    }

    #[test]
    fn recompose_inverts_decompose_up_to_isomorphism() {
        let f = f9();
        let cases = vec![
            standard_paired(
                GroupFamily::CU(2),
                &f,
                3,
                &CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 2),
            ),
            standard_paired(
                GroupFamily::U(2),
                &f,
                3,
                &CocharacterType::new(&[(-1, 1), (1, 1)]),
            ),
        ];
        for obj in cases {
            let dec = unitary_decompose(&obj).unwrap();
            let rec = unitary_recompose(&f, 3, &obj.target, &dec).unwrap();
            validate_classical(&ClassicalObject::Paired(rec.clone())).unwrap();
            assert_eq!(rec.m.type_of(), obj.m.type_of());
            let t = recompose_witness(&obj, &dec);
            assert!(t.inverse(&f).is_some());
            assert!(is_admissible_morphism(&t, &rec.m, &obj.m).unwrap());
        }
        // A rank-two case small enough for the blind search to confirm.
        let f4 = FqField::new(2, 2).unwrap();
        let cu1 = standard_paired(
            GroupFamily::CU(1),
            &f4,
            2,
            &CocharacterType::with_multiplier(&[(0, 1)], 1),
        );
        let dec = unitary_decompose(&cu1).unwrap();
        let rec = unitary_recompose(&f4, 2, &cu1.target, &dec).unwrap();
        validate_classical(&ClassicalObject::Paired(rec.clone())).unwrap();
        assert!(isomorphic_over(&cu1.m, &rec.m, 1).unwrap().is_some());
    }

    #[test]
    fn decompose_needs_the_quadratic_extension() {
        let u = standard_paired(
            GroupFamily::U(2),
            &f2(),
            2,
            &CocharacterType::new(&[(-1, 1), (1, 1)]),
        );
        validate_classical(&ClassicalObject::Paired(u.clone())).unwrap();
        let e = msg(unitary_decompose(&u).unwrap_err());
        assert!(
            e.contains("does not contain the quadratic extension"),
            "{}",
            e
        );
    }

    #[test]
    fn decompose_rejects_a_malformed_action() {
        let f = f9();
        let mut cu = standard_paired(
            GroupFamily::CU(2),
            &f,
            3,
            &CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 2),
        );
        let (s, m) = quadratic_coeffs(&f, 3).unwrap();
        let (ga, _) = quadratic_roots(&f, s, m).unwrap();
        cu.rho = Some(Mat::identity(4).scale(&f, ga));
        let e = msg(unitary_decompose(&cu).unwrap_err());
        assert!(e.contains("malformed rho"), "{}", e);
    }

    #[test]
    fn asymmetric_types_need_the_extension_in_the_field() {
        let e = standard_classical(
            GroupFamily::CU(2),
            &f3(),
            3,
            &CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 2),
            &Mat::identity(4),
        );
        assert!(msg(e.unwrap_err()).contains("asymmetric"));
    }
}
