//! Classical group families, cocharacter types, and the combinatorial datum
//! that drives the stratification.
//!
//! A cocharacter type records the graded ranks n_i of the standard module;
//! for the multiplier families (CSp, CO, CU) there is also a multiplier
//! weight d, derived from the symmetry n_i = n_{d-i} when possible.
//!
//! Building the datum realizes the Weyl group of the family, reads off the
//! parabolic type I fixed by the weight vector, the Frobenius-linked type J,
//! the two linking elements y = w0 w0_I and x (the minimal element of
//! W_J w0 W_{F(I)}, which must equal F(y)), the component group Omega and
//! the subgroup Theta acting on strata.  Every identity that the later
//! stages rely on is recomputed here by a second route and any mismatch is
//! reported as an internal consistency error.

use crate::error::ZipError;
use crate::weyl::{
    Family, Frobenius, Omega, OmegaAction, SimpleSubset, WeylElement, WeylSystem,
};
use std::collections::BTreeMap;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GroupFamily {
    Gl(usize),
    Sl(usize),
    Sp(usize),
    CSp(usize),
    O(usize),
    CO(usize),
    U(usize),
    CU(usize),
}

impl GroupFamily {
    pub fn module_rank(&self) -> usize {
        match *self {
            GroupFamily::Gl(n)
            | GroupFamily::Sl(n)
            | GroupFamily::Sp(n)
            | GroupFamily::CSp(n)
            | GroupFamily::O(n)
            | GroupFamily::CO(n)
            | GroupFamily::U(n)
            | GroupFamily::CU(n) => n,
        }
    }

    /// Orthogonal-kind families are only supported away from characteristic 2.
    pub fn odd_char_only(&self) -> bool {
        matches!(self, GroupFamily::O(_) | GroupFamily::CO(_))
    }

    /// Families whose type carries a multiplier weight.
    pub fn has_multiplier(&self) -> bool {
        matches!(
            self,
            GroupFamily::CSp(_) | GroupFamily::CO(_) | GroupFamily::CU(_)
        )
    }

    /// Families modeled on a degree-2 extension of the base field.
    pub fn is_unitary(&self) -> bool {
        matches!(self, GroupFamily::U(_) | GroupFamily::CU(_))
    }

    pub fn name(&self) -> String {
        match *self {
            GroupFamily::Gl(n) => format!("GL({})", n),
            GroupFamily::Sl(n) => format!("SL({})", n),
            GroupFamily::Sp(n) => format!("Sp({})", n),
            GroupFamily::CSp(n) => format!("CSp({})", n),
            GroupFamily::O(n) => format!("O({})", n),
            GroupFamily::CO(n) => format!("CO({})", n),
            GroupFamily::U(n) => format!("U({})", n),
            GroupFamily::CU(n) => format!("CU({})", n),
        }
    }
}

impl std::fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Graded ranks of the standard module: weight i occurs n_i times.  Only
/// nonzero entries are stored.  The multiplier weight is optional input for
/// the multiplier families and must be absent otherwise.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CocharacterType {
    pub nbar: BTreeMap<i64, usize>,
    pub multiplier_weight: Option<i64>,
}

impl CocharacterType {
    pub fn new(entries: &[(i64, usize)]) -> CocharacterType {
        CocharacterType {
            nbar: entries.iter().cloned().collect(),
            multiplier_weight: None,
        }
    }

    pub fn with_multiplier(entries: &[(i64, usize)], d: i64) -> CocharacterType {
        CocharacterType {
            nbar: entries.iter().cloned().collect(),
            multiplier_weight: Some(d),
        }
    }

    pub fn total(&self) -> usize {
        self.nbar.values().sum()
    }

    pub fn count(&self, i: i64) -> usize {
        *self.nbar.get(&i).unwrap_or(&0)
    }

    /// The d with n_i = n_{d-i} for all i, if the type is symmetric.  When it
    /// exists it is unique: reflection must match the smallest and largest
    /// supported weights, so d = min + max.
    pub fn derived_multiplier(&self) -> Option<i64> {
        let min = *self.nbar.keys().next()?;
        let max = *self.nbar.keys().last()?;
        let d = min + max;
        if self.is_symmetric_about(d) {
            Some(d)
        } else {
            None
        }
    }

    pub fn is_symmetric_about(&self, d: i64) -> bool {
        self.nbar.iter().all(|(&i, &n)| self.count(d - i) == n)
    }
}

/// Result of validating a type against a family: the degree of the field
/// the objects are defined over (2 means the quadratic extension, unitary
/// families only) and the multiplier weight (0 where not applicable).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TypeInfo {
    pub base_degree: u8,
    pub multiplier: i64,
}

pub fn validate_type(family: GroupFamily, t: &CocharacterType) -> Result<TypeInfo, ZipError> {
    let n = family.module_rank();
    if n == 0 {
        return Err(ZipError::Validation("module rank must be positive".into()));
    }
    if t.nbar.is_empty() {
        return Err(ZipError::Validation("empty type".into()));
    }
    if t.nbar.values().any(|&c| c == 0) {
        return Err(ZipError::Validation(
            "type entries must have positive multiplicity".into(),
        ));
    }
    if t.total() != n {
        return Err(ZipError::Validation(format!(
            "type has total rank {} but {} needs {}",
            t.total(),
            family.name(),
            n
        )));
    }
    if !family.has_multiplier() && t.multiplier_weight.is_some() {
        return Err(ZipError::Validation(format!(
            "{} does not take a multiplier weight",
            family.name()
        )));
    }
    match family {
        GroupFamily::Gl(_) => Ok(TypeInfo {
            base_degree: 1,
            multiplier: 0,
        }),
        GroupFamily::Sl(_) => {
            let sum: i64 = t.nbar.iter().map(|(&i, &c)| i * c as i64).sum();
            if sum != 0 {
                return Err(ZipError::Validation(format!(
                    "SL type needs sum i*n_i = 0, got {}",
                    sum
                )));
            }
            Ok(TypeInfo {
                base_degree: 1,
                multiplier: 0,
            })
        }
        GroupFamily::Sp(_) => {
            if n % 2 != 0 {
                return Err(ZipError::Validation("Sp needs even rank".into()));
            }
            if !t.is_symmetric_about(0) {
                return Err(ZipError::Validation(
                    "Sp type needs n_i = n_{-i}".into(),
                ));
            }
            Ok(TypeInfo {
                base_degree: 1,
                multiplier: 0,
            })
        }
        GroupFamily::CSp(_) => {
            if n % 2 != 0 {
                return Err(ZipError::Validation("CSp needs even rank".into()));
            }
            let d = resolve_multiplier(family, t)?;
            Ok(TypeInfo {
                base_degree: 1,
                multiplier: d,
            })
        }
        GroupFamily::O(_) => {
            if !t.is_symmetric_about(0) {
                return Err(ZipError::Validation("O type needs n_i = n_{-i}".into()));
            }
            Ok(TypeInfo {
                base_degree: 1,
                multiplier: 0,
            })
        }
        GroupFamily::CO(_) => {
            let d = resolve_multiplier(family, t)?;
            Ok(TypeInfo {
                base_degree: 1,
                multiplier: d,
            })
        }
        GroupFamily::U(_) => {
            let base_degree = if t.is_symmetric_about(0) { 1 } else { 2 };
            Ok(TypeInfo {
                base_degree,
                multiplier: 0,
            })
        }
        GroupFamily::CU(_) => {
            let d = match t.multiplier_weight {
                Some(d) => d,
                None => t.derived_multiplier().ok_or_else(|| {
                    ZipError::Validation(
                        "CU type is not symmetric about any weight; give a multiplier weight"
                            .into(),
                    )
                })?,
            };
            let base_degree = if t.is_symmetric_about(d) { 1 } else { 2 };
            Ok(TypeInfo {
                base_degree,
                multiplier: d,
            })
        }
    }
}

/// Multiplier for CSp/CO: derived from the symmetry of the type and checked
/// against an explicitly given weight.
fn resolve_multiplier(family: GroupFamily, t: &CocharacterType) -> Result<i64, ZipError> {
    let derived = t.derived_multiplier().ok_or_else(|| {
        ZipError::Validation(format!(
            "{} type needs n_i = n_{{d-i}} for some d",
            family.name()
        ))
    })?;
    if let Some(given) = t.multiplier_weight {
        if given != derived {
            return Err(ZipError::Validation(format!(
                "given multiplier weight {} does not match the type symmetry about {}",
                given, derived
            )));
        }
    }
    Ok(derived)
}

/// The full combinatorial datum attached to a family and type.
#[derive(Clone, Debug)]
pub struct ZipDatum {
    pub family: GroupFamily,
    pub ctype: CocharacterType,
    pub info: TypeInfo,
    pub sys: WeylSystem,
    /// Internal weight vector of the cocharacter on the torus coordinates.
    /// For the B/C/D realizations entries are doubled (2i - d) so that they
    /// stay integral; only signs and equalities of entries are ever used.
    pub chi: Vec<i64>,
    pub i_set: SimpleSubset,
    pub j_set: SimpleSubset,
    pub y: WeylElement,
    pub x: WeylElement,
    pub w0: WeylElement,
    pub theta_order: usize,
    /// Dimension of the ascending-side flag variety G/P_+.
    pub dim: usize,
}

impl ZipDatum {
    /// No nontrivial component group.
    pub fn connected(&self) -> bool {
        self.sys.omega.order == 1
    }

    /// The indices of Omega that lie in Theta (always an initial segment).
    pub fn theta_indices(&self) -> Vec<usize> {
        (0..self.theta_order).collect()
    }

    /// The automorphism int(x) . F of the Weyl group, on plain elements.
    pub fn psi_w(&self, w: &WeylElement) -> WeylElement {
        self.x
            .compose(&self.sys.frobenius_apply(w))
            .compose(&self.x.inverse())
    }

    /// psi on a simple reflection index, when the image is again simple.
    pub fn psi_simple(&self, i: usize) -> Option<usize> {
        let fi = self.sys.frobenius.apply_simple(i);
        self.sys.conjugate_simple(&self.x, fi)
    }

    /// Inverse of psi on simple indices.
    pub fn psi_simple_inverse(&self, j: usize) -> Option<usize> {
        let pre = self.sys.conjugate_simple(&self.x.inverse(), j)?;
        Some(self.sys.frobenius.inverse_simple(pre))
    }
}

/// Build the Weyl-side realization of a family: the Weyl system (with its
/// component group and Frobenius action) and the internal weight vector.
fn realize(
    family: GroupFamily,
    t: &CocharacterType,
    info: TypeInfo,
) -> Result<(WeylSystem, Vec<i64>), ZipError> {
    let n = family.module_rank();
    let d = info.multiplier;
    let mut sys;
    let chi: Vec<i64>;
    match family {
        GroupFamily::Gl(_) | GroupFamily::Sl(_) | GroupFamily::U(_) | GroupFamily::CU(_) => {
            sys = WeylSystem::new(Family::A, n - 1);
            let mut v = Vec::with_capacity(n);
            for (&i, &c) in t.nbar.iter().rev() {
                for _ in 0..c {
                    v.push(i);
                }
            }
            chi = v;
            if family.is_unitary() {
                // Frobenius acts as the diagram flip, i.e. conjugation by w0.
                let r = sys.rank();
                sys.frobenius = Frobenius {
                    s_perm: (0..r).map(|i| r - 1 - i).collect(),
                };
            }
        }
        GroupFamily::Sp(_) | GroupFamily::CSp(_) => {
            let m = n / 2;
            sys = WeylSystem::new(Family::C, m);
            chi = half_module_weights(t, d, m, 0)?;
        }
        GroupFamily::O(_) | GroupFamily::CO(_) => {
            if n % 2 == 1 {
                let m = (n - 1) / 2;
                sys = WeylSystem::new(Family::B, m);
                chi = half_module_weights(t, d, m, 1)?;
                // O(odd) has a central extra component; CO(odd) is connected.
                if matches!(family, GroupFamily::O(_)) {
                    sys.omega = Omega {
                        order: 2,
                        action: OmegaAction::Trivial,
                    };
                }
            } else {
                let m = n / 2;
                sys = WeylSystem::new(Family::D, m);
                chi = half_module_weights(t, d, m, 0)?;
                // Both O(even) and CO(even) have two components; the flip
                // representative changes the sign of the last coordinate.
                let mut flip = WeylElement::identity(m);
                flip.images[m - 1] = -(m as i32);
                sys.omega = Omega {
                    order: 2,
                    action: OmegaAction::Conjugation(flip),
                };
            }
        }
    }
    Ok((sys, chi))
}

/// Weight vector on the m torus coordinates for the B/C/D realizations:
/// each weight i > d/2 contributes n_i doubled-centred entries 2i - d, and
/// the middle weight d/2 (d even) contributes zeros: half of its count, or
/// half of count - 1 in the odd-rank orthogonal case where one middle vector
/// is fixed.
fn half_module_weights(
    t: &CocharacterType,
    d: i64,
    m: usize,
    middle_drop: usize,
) -> Result<Vec<i64>, ZipError> {
    let mut v = Vec::new();
    for (&i, &c) in t.nbar.iter().rev() {
        if 2 * i > d {
            for _ in 0..c {
                v.push(2 * i - d);
            }
        }
    }
    if d % 2 == 0 {
        let mid = t.count(d / 2);
        if middle_drop > 0 && mid % 2 == 0 && mid > 0 {
            return Err(ZipError::Internal(
                "odd-rank orthogonal type with even middle multiplicity".into(),
            ));
        }
        let zeros = mid.saturating_sub(middle_drop) / 2;
        for _ in 0..zeros {
            v.push(0);
        }
    }
    if v.len() != m {
        return Err(ZipError::Internal(format!(
            "weight vector has {} coordinates, expected {}",
            v.len(),
            m
        )));
    }
    Ok(v)
}

/// Order of Theta: the part of the component group that fixes the weight
/// vector componentwise.
fn theta_order_for(family: GroupFamily, t: &CocharacterType, d: i64, omega: &Omega) -> usize {
    if omega.order == 1 {
        return 1;
    }
    match family {
        GroupFamily::O(_) => {
            if t.count(0) > 0 {
                2
            } else {
                1
            }
        }
        GroupFamily::CO(_) => {
            if d % 2 == 0 && t.count(d / 2) > 0 {
                2
            } else {
                1
            }
        }
        _ => 1,
    }
}

pub fn build_zip_datum(family: GroupFamily, t: &CocharacterType) -> Result<ZipDatum, ZipError> {
    let info = validate_type(family, t)?;
    let (sys, chi) = realize(family, t, info)?;
    let rank = sys.rank();

    // I: simples fixing the weight vector.
    let mut i_set = SimpleSubset::empty(rank);
    for (idx, s) in sys.simples.iter().enumerate() {
        if s.apply_vec(&chi) == chi {
            i_set.insert(idx);
        }
    }

    // dim G/P_+ counts the positive roots pairing strictly with chi; chi is
    // dominant, so the complement is exactly the Levi's positive system.
    let dim = sys
        .roots
        .positive_roots
        .iter()
        .filter(|r| {
            r.iter()
                .zip(&chi)
                .map(|(&a, &b)| a * b)
                .sum::<i64>()
                > 0
        })
        .count();
    for r in &sys.roots.positive_roots {
        let pairing: i64 = r.iter().zip(&chi).map(|(&a, &b)| a * b).sum();
        if pairing < 0 {
            return Err(ZipError::Internal(
                "weight vector is not dominant".into(),
            ));
        }
    }

    let w0 = sys.longest_element(&SimpleSubset::full(rank));
    let w0_i = sys.longest_element(&i_set);

    // J = F(w0 I w0), computed twice.
    let conj_by_w0 = |k: &SimpleSubset| -> Result<SimpleSubset, ZipError> {
        let mut out = SimpleSubset::empty(rank);
        for i in k.indices() {
            let j = sys.conjugate_simple(&w0, i).ok_or_else(|| {
                ZipError::Internal("w0 conjugation left the simple reflections".into())
            })?;
            out.insert(j);
        }
        Ok(out)
    };
    let j_set = sys.frobenius.apply_subset(&conj_by_w0(&i_set)?);
    let j_alt = conj_by_w0(&sys.frobenius.apply_subset(&i_set))?;
    if j_set != j_alt {
        return Err(ZipError::Internal(
            "the two routes to J disagree".into(),
        ));
    }

    // y = w0 w0_I, checked against w0_{F^{-1}(J)} w0.
    let y = w0.compose(&w0_i);
    let y_alt = sys
        .longest_element(&sys.frobenius.inverse_subset(&j_set))
        .compose(&w0);
    if y != y_alt {
        return Err(ZipError::Internal(
            "the two routes to y disagree".into(),
        ));
    }

    // x = F(y), checked against the minimal double coset representative.
    let x = sys.frobenius_apply(&y);
    let x_alt = sys.min_double_coset_rep(&j_set, &sys.frobenius.apply_subset(&i_set), &w0);
    if x != x_alt {
        return Err(ZipError::Internal(
            "F(y) is not the minimal element of W_J w0 W_{F(I)}".into(),
        ));
    }
    if sys.length(&x) != sys.length(&y) {
        return Err(ZipError::Internal("x and y have different lengths".into()));
    }

    let theta_order = theta_order_for(family, t, info.multiplier, &sys.omega);

    let datum = ZipDatum {
        family,
        ctype: t.clone(),
        info,
        sys,
        chi,
        i_set,
        j_set,
        y,
        x,
        w0,
        theta_order,
        dim,
    };

    // psi maps I bijectively onto J through simple reflections.
    let mut seen = SimpleSubset::empty(rank);
    for i in datum.i_set.indices() {
        let j = datum.psi_simple(i).ok_or_else(|| {
            ZipError::Internal("psi sends a simple of I to a non-simple".into())
        })?;
        if !datum.j_set.contains(j) || seen.contains(j) {
            return Err(ZipError::Internal(
                "psi does not map I bijectively onto J".into(),
            ));
        }
        seen.insert(j);
        if datum.psi_simple_inverse(j) != Some(i) {
            return Err(ZipError::Internal("psi inverse check failed".into()));
        }
    }
    if seen != datum.j_set {
        return Err(ZipError::Internal("psi misses part of J".into()));
    }

    // psi must keep Theta inside the component group: for each Theta element
    // the Weyl part of psi(1, theta) has to vanish.
    for theta in datum.theta_indices() {
        let part = datum
            .x
            .compose(&datum.sys.omega.act(theta, &datum.x.inverse()));
        if !part.is_identity() {
            return Err(ZipError::Internal(
                "psi moves Theta out of the component group".into(),
            ));
        }
    }

    Ok(datum)
}

/// A representative grid of small data across all families, with Weyl rank
/// capped at `max_rank`; shared by the datum, stratum, and acceptance test
/// suites.
pub fn catalog_grid(max_rank: usize) -> Vec<(GroupFamily, CocharacterType)> {
    let mut grid: Vec<(GroupFamily, CocharacterType)> = Vec::new();
    for n in 1..=5usize {
        for d in 0..=n {
            if d == 0 || d == n {
                continue;
            }
            grid.push((
                GroupFamily::Gl(n),
                CocharacterType::new(&[(0, n - d), (1, d)]),
            ));
        }
    }
    grid.push((GroupFamily::Gl(3), CocharacterType::new(&[(0, 1), (1, 1), (3, 1)])));
    grid.push((GroupFamily::Sl(2), CocharacterType::new(&[(-1, 1), (1, 1)])));
    grid.push((GroupFamily::Sl(4), CocharacterType::new(&[(-1, 2), (1, 2)])));
    grid.push((
        GroupFamily::Sl(3),
        CocharacterType::new(&[(-1, 1), (0, 1), (1, 1)]),
    ));
    for g in 1..=4usize {
        grid.push((
            GroupFamily::Sp(2 * g),
            CocharacterType::new(&[(-1, g), (1, g)]),
        ));
        grid.push((
            GroupFamily::CSp(2 * g),
            CocharacterType::new(&[(0, g), (1, g)]),
        ));
    }
    grid.push((
        GroupFamily::Sp(6),
        CocharacterType::new(&[(-1, 2), (0, 2), (1, 2)]),
    ));
    grid.push((
        GroupFamily::O(3),
        CocharacterType::new(&[(-1, 1), (0, 1), (1, 1)]),
    ));
    grid.push((
        GroupFamily::O(5),
        CocharacterType::new(&[(-1, 2), (0, 1), (1, 2)]),
    ));
    grid.push((
        GroupFamily::O(7),
        CocharacterType::new(&[(-1, 2), (0, 3), (1, 2)]),
    ));
    grid.push((
        GroupFamily::O(4),
        CocharacterType::new(&[(-1, 1), (0, 2), (1, 1)]),
    ));
    grid.push((GroupFamily::O(4), CocharacterType::new(&[(-1, 2), (1, 2)])));
    grid.push((
        GroupFamily::O(6),
        CocharacterType::new(&[(-1, 2), (0, 2), (1, 2)]),
    ));
    grid.push((
        GroupFamily::O(8),
        CocharacterType::new(&[(-1, 1), (0, 6), (1, 1)]),
    ));
    grid.push((
        GroupFamily::CO(5),
        CocharacterType::new(&[(-1, 2), (0, 1), (1, 2)]),
    ));
    grid.push((
        GroupFamily::CO(7),
        CocharacterType::new(&[(0, 3), (1, 1), (2, 3)]),
    ));
    grid.push((GroupFamily::CO(4), CocharacterType::new(&[(0, 2), (1, 2)])));
    grid.push((
        GroupFamily::CO(6),
        CocharacterType::new(&[(0, 1), (1, 4), (2, 1)]),
    ));
    grid.push((
        GroupFamily::CO(8),
        CocharacterType::new(&[(0, 3), (1, 2), (2, 3)]),
    ));
    grid.push((GroupFamily::U(2), CocharacterType::new(&[(-1, 1), (1, 1)])));
    grid.push((GroupFamily::U(3), CocharacterType::new(&[(0, 2), (1, 1)])));
    grid.push((
        GroupFamily::U(4),
        CocharacterType::new(&[(-1, 1), (0, 2), (1, 1)]),
    ));
    grid.push((
        GroupFamily::U(5),
        CocharacterType::new(&[(-1, 2), (0, 1), (1, 2)]),
    ));
    grid.push((
        GroupFamily::CU(3),
        CocharacterType::with_multiplier(&[(0, 2), (1, 1)], 1),
    ));
    grid.push((
        GroupFamily::CU(4),
        CocharacterType::with_multiplier(&[(0, 2), (1, 1), (2, 1)], 2),
    ));
    grid.retain(|(f, t)| {
        validate_type(*f, t).unwrap();
        let datum = build_zip_datum(*f, t).unwrap();
        datum.sys.rank() <= max_rank
    });
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::CosetSide;
    use crate::weyl::word_string;

    fn gl(n: usize, entries: &[(i64, usize)]) -> ZipDatum {
        build_zip_datum(GroupFamily::Gl(n), &CocharacterType::new(entries)).unwrap()
    }

    #[test]
    fn validation_rejects_bad_types() {
        let err = |f: GroupFamily, t: CocharacterType| validate_type(f, &t).unwrap_err();
        assert!(matches!(
            err(GroupFamily::Sp(3), CocharacterType::new(&[(0, 3)])),
            ZipError::Validation(_)
        ));
        assert!(matches!(
            err(GroupFamily::Sp(4), CocharacterType::new(&[(1, 3), (-1, 1)])),
            ZipError::Validation(_)
        ));
        assert!(matches!(
            err(GroupFamily::Sl(2), CocharacterType::new(&[(0, 1), (1, 1)])),
            ZipError::Validation(_)
        ));
        assert!(matches!(
            err(GroupFamily::Gl(2), CocharacterType::with_multiplier(&[(0, 2)], 1)),
            ZipError::Validation(_)
        ));
        assert!(matches!(
            err(GroupFamily::Gl(2), CocharacterType::new(&[(0, 1)])),
            ZipError::Validation(_)
        ));
        assert!(matches!(
            err(
                GroupFamily::CU(3),
                CocharacterType::new(&[(0, 2), (1, 1)])
            ),
            ZipError::Validation(_)
        ));
        let mut zero = CocharacterType::new(&[(0, 2)]);
        zero.nbar.insert(1, 0);
        assert!(matches!(
            err(GroupFamily::Gl(2), zero),
            ZipError::Validation(_)
        ));
        assert!(matches!(
            err(
                GroupFamily::CSp(4),
                CocharacterType::with_multiplier(&[(0, 2), (1, 2)], 3)
            ),
            ZipError::Validation(_)
        ));
    }

    #[test]
    fn multiplier_and_base_degree_resolution() {
        let info = validate_type(
            GroupFamily::CSp(4),
            &CocharacterType::new(&[(0, 2), (1, 2)]),
        )
        .unwrap();
        assert_eq!(info.multiplier, 1);
        let info = validate_type(GroupFamily::U(2), &CocharacterType::new(&[(-1, 1), (1, 1)]))
            .unwrap();
        assert_eq!(info.base_degree, 1);
        let info = validate_type(GroupFamily::U(3), &CocharacterType::new(&[(0, 2), (1, 1)]))
            .unwrap();
        assert_eq!(info.base_degree, 2);
        let info = validate_type(
            GroupFamily::CU(3),
            &CocharacterType::with_multiplier(&[(0, 2), (1, 1)], 2),
        )
        .unwrap();
        assert_eq!(info.base_degree, 2);
        assert_eq!(info.multiplier, 2);
        let info = validate_type(
            GroupFamily::CU(2),
            &CocharacterType::new(&[(0, 1), (1, 1)]),
        )
        .unwrap();
        assert_eq!((info.base_degree, info.multiplier), (1, 1));
    }

    #[test]
    fn gl2_ordinary_datum() {
        let d = gl(2, &[(0, 1), (1, 1)]);
        assert_eq!(d.chi, vec![1, 0]);
        assert_eq!(d.i_set.card(), 0);
        assert_eq!(d.j_set.card(), 0);
        assert_eq!(d.dim, 1);
        assert_eq!(d.theta_order, 1);
        assert_eq!(d.y.images, vec![2, 1]);
        assert_eq!(d.x, d.y);
    }

    #[test]
    fn gl3_datum_hand_values() {
        let d = gl(3, &[(0, 2), (1, 1)]);
        assert_eq!(d.chi, vec![1, 0, 0]);
        assert_eq!(d.i_set.indices(), vec![1]);
        assert_eq!(d.j_set.indices(), vec![0]);
        assert_eq!(d.dim, 2);
        assert_eq!(d.y.images, vec![3, 1, 2]);
        assert_eq!(word_string(&d.sys.reduced_word(&d.y)), "2-1");
        assert_eq!(d.x, d.y);
        assert_eq!(d.psi_simple(1), Some(0));
        assert_eq!(d.psi_simple_inverse(0), Some(1));
    }

    #[test]
    fn csp4_siegel_datum() {
        let d = build_zip_datum(
            GroupFamily::CSp(4),
            &CocharacterType::new(&[(0, 2), (1, 2)]),
        )
        .unwrap();
        assert_eq!(d.info.multiplier, 1);
        assert_eq!(d.chi, vec![1, 1]);
        assert_eq!(d.i_set.indices(), vec![0]);
        assert_eq!(d.j_set.indices(), vec![0]);
        assert_eq!(d.dim, 3);
        assert_eq!(d.theta_order, 1);
    }

    #[test]
    fn sp2_elliptic_datum() {
        let d = build_zip_datum(
            GroupFamily::Sp(2),
            &CocharacterType::new(&[(-1, 1), (1, 1)]),
        )
        .unwrap();
        assert_eq!(d.chi, vec![2]);
        assert_eq!(d.i_set.card(), 0);
        assert_eq!(d.dim, 1);
    }

    #[test]
    fn odd_orthogonal_datum() {
        let d = build_zip_datum(
            GroupFamily::O(5),
            &CocharacterType::new(&[(-1, 2), (0, 1), (1, 2)]),
        )
        .unwrap();
        assert_eq!(d.sys.family(), Family::B);
        assert_eq!(d.chi, vec![2, 2]);
        assert_eq!(d.i_set.indices(), vec![0]);
        assert_eq!(d.dim, 3);
        assert_eq!(d.sys.omega.order, 2);
        assert_eq!(d.theta_order, 2);
        // CO(5) on the same module is connected.
        let d = build_zip_datum(
            GroupFamily::CO(5),
            &CocharacterType::new(&[(-1, 2), (0, 1), (1, 2)]),
        )
        .unwrap();
        assert_eq!(d.sys.omega.order, 1);
        assert_eq!(d.theta_order, 1);
    }

    #[test]
    fn even_orthogonal_datum_and_theta() {
        let d = build_zip_datum(
            GroupFamily::O(4),
            &CocharacterType::new(&[(-1, 1), (0, 2), (1, 1)]),
        )
        .unwrap();
        assert_eq!(d.sys.family(), Family::D);
        assert_eq!(d.chi, vec![2, 0]);
        assert_eq!(d.i_set.card(), 0);
        assert_eq!(d.dim, 2);
        assert_eq!(d.sys.omega.order, 2);
        assert_eq!(d.theta_order, 2);
        // Without weight-zero vectors Theta collapses.
        let d = build_zip_datum(
            GroupFamily::O(4),
            &CocharacterType::new(&[(-1, 2), (1, 2)]),
        )
        .unwrap();
        assert_eq!(d.sys.omega.order, 2);
        assert_eq!(d.theta_order, 1);
        // CO with odd multiplier has trivial Theta, even with two components.
        let d = build_zip_datum(
            GroupFamily::CO(4),
            &CocharacterType::new(&[(0, 2), (1, 2)]),
        )
        .unwrap();
        assert_eq!(d.info.multiplier, 1);
        assert_eq!(d.sys.omega.order, 2);
        assert_eq!(d.theta_order, 1);
        // CO with even multiplier and middle vectors has Theta of order 2.
        let d = build_zip_datum(
            GroupFamily::CO(6),
            &CocharacterType::new(&[(0, 1), (1, 4), (2, 1)]),
        )
        .unwrap();
        assert_eq!(d.info.multiplier, 2);
        assert_eq!(d.theta_order, 2);
    }

    #[test]
    fn unitary_datum_uses_the_diagram_flip() {
        let d = build_zip_datum(GroupFamily::U(3), &CocharacterType::new(&[(0, 2), (1, 1)]))
            .unwrap();
        assert_eq!(d.info.base_degree, 2);
        assert!(!d.sys.frobenius.is_identity());
        // J = F(w0 I w0) collapses to I for the unitary realization.
        assert_eq!(d.i_set, d.j_set);
        let d = build_zip_datum(
            GroupFamily::U(4),
            &CocharacterType::new(&[(-1, 1), (0, 2), (1, 1)]),
        )
        .unwrap();
        assert_eq!(d.info.base_degree, 1);
        assert_eq!(d.i_set, d.j_set);
    }

    #[test]
    fn rank_zero_data() {
        let d = gl(1, &[(5, 1)]);
        assert_eq!(d.sys.rank(), 0);
        assert_eq!(d.dim, 0);
        let d = build_zip_datum(GroupFamily::O(1), &CocharacterType::new(&[(0, 1)])).unwrap();
        assert_eq!(d.sys.rank(), 0);
        assert_eq!(d.theta_order, 2);
        let d = build_zip_datum(
            GroupFamily::O(2),
            &CocharacterType::new(&[(0, 2)]),
        )
        .unwrap();
        assert_eq!(d.sys.rank(), 0);
        assert_eq!(d.sys.omega.order, 2);
        assert_eq!(d.theta_order, 2);
    }

    #[test]
    fn catalog_grid_builds_with_all_cross_checks() {
        let grid = catalog_grid(4);
        assert!(grid.len() > 25, "grid has {} entries", grid.len());
        for (f, t) in grid {
            let d = build_zip_datum(f, &t).unwrap();
            // dim G/P equals the maximal length of a minimal coset rep.
            let reps = d.sys.min_coset_reps(&d.i_set, CosetSide::Left).unwrap();
            let maxlen = reps.iter().map(|w| d.sys.length(w)).max().unwrap_or(0);
            assert_eq!(d.dim, maxlen, "dim mismatch for {}", f.name());
        }
    }
}
