//! Weyl groups of the classical families as (signed) permutation groups.
//!
//! Family A_m acts on {1..m+1} by plain permutations; B_m and C_m share the
//! hyperoctahedral group of signed permutations of {1..m}; D_m is its
//! even-sign subgroup.  An element stores the images of 1..dim, where a
//! negative image means the basis vector picks up a sign: w(-i) = -w(i).
//!
//! Length is the number of positive roots sent negative, which matches the
//! word metric in the simple generators for every family.  The Bruhat order
//! is computed by the standard descent recursion and is cross-checked in the
//! tests against an independent subword oracle.

use crate::error::ZipError;
use std::collections::{HashMap, HashSet, VecDeque};

/// Hard bound on any group enumeration.
pub const ENUM_GUARD: usize = 10_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Family {
    A,
    B,
    C,
    D,
}

/// Root system data in coordinates, used for pairing computations and for
/// cross-checking the fast length/descent routines.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub family: Family,
    /// Subscript of the family symbol (A_m, B_m, C_m, D_m).
    pub m: usize,
    /// Number of coordinates the group permutes (m+1 for A_m, m otherwise).
    pub dim: usize,
    pub positive_roots: Vec<Vec<i64>>,
    pub simple_roots: Vec<Vec<i64>>,
}

impl RootSystem {
    pub fn new(family: Family, m: usize) -> RootSystem {
        let dim = match family {
            Family::A => m + 1,
            _ => m,
        };
        let mut positive: Vec<Vec<i64>> = Vec::new();
        let mut simple: Vec<Vec<i64>> = Vec::new();
        let e = |i: usize, c: i64, n: usize| -> Vec<i64> {
            let mut v = vec![0i64; n];
            v[i] = c;
            v
        };
        let e2 = |i: usize, ci: i64, j: usize, cj: i64, n: usize| -> Vec<i64> {
            let mut v = vec![0i64; n];
            v[i] = ci;
            v[j] = cj;
            v
        };
        match family {
            Family::A => {
                for i in 0..dim {
                    for j in (i + 1)..dim {
                        positive.push(e2(i, 1, j, -1, dim));
                    }
                }
                for i in 0..m {
                    simple.push(e2(i, 1, i + 1, -1, dim));
                }
            }
            Family::B | Family::C | Family::D => {
                for i in 0..dim {
                    for j in (i + 1)..dim {
                        positive.push(e2(i, 1, j, -1, dim));
                        positive.push(e2(i, 1, j, 1, dim));
                    }
                }
                match family {
                    Family::B => {
                        for i in 0..dim {
                            positive.push(e(i, 1, dim));
                        }
                    }
                    Family::C => {
                        for i in 0..dim {
                            positive.push(e(i, 2, dim));
                        }
                    }
                    Family::D => {}
                    Family::A => unreachable!(),
                }
                if m >= 1 {
                    for i in 0..(m - 1) {
                        simple.push(e2(i, 1, i + 1, -1, dim));
                    }
                    match family {
                        Family::B => simple.push(e(m - 1, 1, dim)),
                        Family::C => simple.push(e(m - 1, 2, dim)),
                        Family::D => {
                            // D_1 is a torus: no roots at all.
                            if m >= 2 {
                                simple.push(e2(m - 2, 1, m - 1, 1, dim));
                            } else {
                                positive.clear();
                                simple.clear();
                            }
                        }
                        Family::A => unreachable!(),
                    }
                }
            }
        }
        RootSystem {
            family,
            m,
            dim,
            positive_roots: positive,
            simple_roots: simple,
        }
    }

    pub fn rank(&self) -> usize {
        self.simple_roots.len()
    }
}

/// Signed permutation; `images[i]` is w(i+1), with w(-i) = -w(i).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct WeylElement {
    pub images: Vec<i32>,
}

impl WeylElement {
    pub fn identity(dim: usize) -> WeylElement {
        WeylElement {
            images: (1..=dim as i32).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.images.len()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| v == i as i32 + 1)
    }

    /// Image of a signed index.
    pub fn apply(&self, i: i32) -> i32 {
        if i > 0 {
            self.images[(i - 1) as usize]
        } else {
            -self.images[(-i - 1) as usize]
        }
    }

    /// Function composition: (self*other)(i) = self(other(i)).
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        WeylElement {
            images: other.images.iter().map(|&v| self.apply(v)).collect(),
        }
    }

    pub fn inverse(&self) -> WeylElement {
        let mut images = vec![0i32; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            let target = i as i32 + 1;
            if v > 0 {
                images[(v - 1) as usize] = target;
            } else {
                images[(-v - 1) as usize] = -target;
            }
        }
        WeylElement { images }
    }

    /// Apply to a coordinate vector: e_i goes to sign * e_|w(i)|.
    pub fn apply_vec(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; v.len()];
        for (i, &c) in v.iter().enumerate() {
            let im = self.images[i];
            if im > 0 {
                out[(im - 1) as usize] += c;
            } else {
                out[(-im - 1) as usize] -= c;
            }
        }
        out
    }

    pub fn count_negatives(&self) -> usize {
        self.images.iter().filter(|&&v| v < 0).count()
    }
}

/// Subset of the simple reflections, as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SimpleSubset {
    pub bits: u32,
    pub rank: usize,
}

impl SimpleSubset {
    pub fn empty(rank: usize) -> SimpleSubset {
        assert!(rank <= 32);
        SimpleSubset { bits: 0, rank }
    }

    pub fn full(rank: usize) -> SimpleSubset {
        assert!(rank <= 32);
        let bits = if rank == 32 { u32::MAX } else { (1u32 << rank) - 1 };
        SimpleSubset { bits, rank }
    }

    pub fn from_indices(rank: usize, idx: &[usize]) -> SimpleSubset {
        let mut s = SimpleSubset::empty(rank);
        for &i in idx {
            assert!(i < rank);
            s.bits |= 1 << i;
        }
        s
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.rank && (self.bits >> i) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.rank);
        self.bits |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.bits &= !(1u32 << i);
    }

    pub fn card(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.rank).filter(|&i| self.contains(i)).collect()
    }

    pub fn is_subset_of(&self, other: &SimpleSubset) -> bool {
        self.bits & !other.bits == 0
    }
}

/// Which side the subgroup sits on when forming cosets.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CosetSide {
    /// Cosets W_K w; minimal representatives have no left descent in K.
    Left,
    /// Cosets w W_K; minimal representatives have no right descent in K.
    Right,
}

/// The component group Omega of the extended Weyl group, order 1 or 2.
/// The nontrivial element acts on W either trivially (central component,
/// odd orthogonal case) or by conjugation with a stored signed permutation
/// (last-coordinate sign flip, even orthogonal case).
#[derive(Clone, Debug)]
pub struct Omega {
    pub order: usize,
    pub action: OmegaAction,
}

#[derive(Clone, Debug)]
pub enum OmegaAction {
    Trivial,
    Conjugation(WeylElement),
}

impl Omega {
    pub fn trivial() -> Omega {
        Omega {
            order: 1,
            action: OmegaAction::Trivial,
        }
    }

    /// Conjugation action of element `elt` (0 or 1) on W.
    pub fn act(&self, elt: usize, w: &WeylElement) -> WeylElement {
        assert!(elt < self.order);
        match (&self.action, elt) {
            (OmegaAction::Conjugation(c), 1) => c.compose(w).compose(&c.inverse()),
            _ => w.clone(),
        }
    }

    /// Product inside Omega (cyclic of order at most 2).
    pub fn mul(&self, a: usize, b: usize) -> usize {
        (a + b) % self.order
    }
}

/// Automorphism of (W, S) given by a permutation of the simple reflections.
/// Applied to an element through any reduced word, which is well defined for
/// a diagram automorphism and preserves lengths.
#[derive(Clone, Debug)]
pub struct Frobenius {
    pub s_perm: Vec<usize>,
}

impl Frobenius {
    pub fn identity(rank: usize) -> Frobenius {
        Frobenius {
            s_perm: (0..rank).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.s_perm.iter().enumerate().all(|(i, &v)| v == i)
    }

    pub fn apply_simple(&self, i: usize) -> usize {
        self.s_perm[i]
    }

    pub fn inverse_simple(&self, j: usize) -> usize {
        self.s_perm.iter().position(|&v| v == j).unwrap()
    }

    pub fn apply_subset(&self, k: &SimpleSubset) -> SimpleSubset {
        let idx: Vec<usize> = k.indices().iter().map(|&i| self.s_perm[i]).collect();
        SimpleSubset::from_indices(k.rank, &idx)
    }

    pub fn inverse_subset(&self, k: &SimpleSubset) -> SimpleSubset {
        let idx: Vec<usize> = k.indices().iter().map(|&j| self.inverse_simple(j)).collect();
        SimpleSubset::from_indices(k.rank, &idx)
    }
}

/// A Weyl group with its root system, simple reflections, component group
/// and Frobenius action: the combinatorial backbone of a zip datum.
#[derive(Clone, Debug)]
pub struct WeylSystem {
    pub roots: RootSystem,
    pub simples: Vec<WeylElement>,
    pub omega: Omega,
    pub frobenius: Frobenius,
}

impl WeylSystem {
    pub fn new(family: Family, m: usize) -> WeylSystem {
        let roots = RootSystem::new(family, m);
        let dim = roots.dim;
        let mut simples = Vec::new();
        match family {
            Family::A => {
                for i in 0..m {
                    simples.push(swap(dim, i, i + 1));
                }
            }
            Family::B | Family::C => {
                for i in 0..m.saturating_sub(1) {
                    simples.push(swap(dim, i, i + 1));
                }
                if m >= 1 {
                    let mut w = WeylElement::identity(dim);
                    w.images[m - 1] = -(m as i32);
                    simples.push(w);
                }
            }
            Family::D => {
                if m >= 2 {
                    for i in 0..(m - 1) {
                        simples.push(swap(dim, i, i + 1));
                    }
                    let mut w = WeylElement::identity(dim);
                    w.images[m - 2] = -(m as i32);
                    w.images[m - 1] = -(m as i32 - 1);
                    simples.push(w);
                }
            }
        }
        let rank = simples.len();
        WeylSystem {
            roots,
            simples,
            omega: Omega::trivial(),
            frobenius: Frobenius::identity(rank),
        }
    }

    pub fn rank(&self) -> usize {
        self.simples.len()
    }

    pub fn dim(&self) -> usize {
        self.roots.dim
    }

    pub fn family(&self) -> Family {
        self.roots.family
    }

    pub fn identity(&self) -> WeylElement {
        WeylElement::identity(self.dim())
    }

    /// Check that an element belongs to this group: a signed permutation with
    /// the family's sign constraint.
    pub fn check_element(&self, w: &WeylElement) -> Result<(), ZipError> {
        if w.dim() != self.dim() {
            return Err(ZipError::Validation(format!(
                "element of dim {} in a group of dim {}",
                w.dim(),
                self.dim()
            )));
        }
        let mut seen = vec![false; self.dim()];
        for &v in &w.images {
            let a = v.unsigned_abs() as usize;
            if v == 0 || a == 0 || a > self.dim() || seen[a - 1] {
                return Err(ZipError::Validation(format!(
                    "not a signed permutation: {:?}",
                    w.images
                )));
            }
            seen[a - 1] = true;
        }
        let negs = w.count_negatives();
        match self.family() {
            Family::A => {
                if negs > 0 {
                    return Err(ZipError::Validation(format!(
                        "family A element with sign flips: {:?}",
                        w.images
                    )));
                }
            }
            Family::D => {
                if negs % 2 != 0 {
                    return Err(ZipError::Validation(format!(
                        "family D element with an odd number of sign flips: {:?}",
                        w.images
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Number of positive roots sent negative.  Uses the signed inversion
    /// count; the root-by-root definition is checked against this in tests.
    pub fn length(&self, w: &WeylElement) -> usize {
        let m = self.dim();
        let img = &w.images;
        let mut len = 0usize;
        // Roots e_i - e_j, i < j: negative iff rho(w(i)) > rho(w(j)) in the
        // order 1 < 2 < ... < m < -m < ... < -1.
        let rho = |a: i32| -> i64 {
            if a > 0 {
                a as i64
            } else {
                2 * m as i64 + 1 + a as i64
            }
        };
        for i in 0..m {
            for j in (i + 1)..m {
                if rho(img[i]) > rho(img[j]) {
                    len += 1;
                }
            }
        }
        match self.family() {
            Family::A => {}
            Family::B | Family::C | Family::D => {
                // Roots e_i + e_j, i < j.
                for i in 0..m {
                    for j in (i + 1)..m {
                        let (a, b) = (img[i], img[j]);
                        let neg = if a > 0 && b > 0 {
                            false
                        } else if a < 0 && b < 0 {
                            true
                        } else if a > 0 {
                            a > -b
                        } else {
                            b > -a
                        };
                        if neg {
                            len += 1;
                        }
                    }
                }
                if matches!(self.family(), Family::B | Family::C) {
                    // Roots e_i (or 2 e_i).
                    len += w.count_negatives();
                }
            }
        }
        len
    }

    /// Length computed directly from the root system; test oracle.
    pub fn length_by_roots(&self, w: &WeylElement) -> usize {
        self.roots
            .positive_roots
            .iter()
            .filter(|r| is_negative(&w.apply_vec(r)))
            .count()
    }

    /// True if s_i is a left descent: l(s_i w) < l(w).
    pub fn is_left_descent(&self, w: &WeylElement, i: usize) -> bool {
        // Equivalent to w^{-1}(alpha_i) < 0; use the right descent test on
        // the inverse to avoid allocating root vectors.
        self.is_right_descent(&w.inverse(), i)
    }

    /// True if s_i is a right descent: l(w s_i) < l(w), i.e. w(alpha_i) < 0.
    pub fn is_right_descent(&self, w: &WeylElement, i: usize) -> bool {
        let m = self.dim();
        let img = &w.images;
        let last = self.rank() - 1;
        let simple_is_swap = match self.family() {
            Family::A => true,
            Family::B | Family::C => i < last,
            Family::D => i < last,
        };
        if simple_is_swap {
            // alpha_i = e_{i+1} - e_{i+2} in 0-based coordinates i, i+1.
            let rho = |a: i32| -> i64 {
                if a > 0 {
                    a as i64
                } else {
                    2 * m as i64 + 1 + a as i64
                }
            };
            rho(img[i]) > rho(img[i + 1])
        } else {
            match self.family() {
                Family::B | Family::C => img[m - 1] < 0,
                Family::D => {
                    // alpha = e_{m-1} + e_m.
                    let (a, b) = (img[m - 2], img[m - 1]);
                    if a > 0 && b > 0 {
                        false
                    } else if a < 0 && b < 0 {
                        true
                    } else if a > 0 {
                        a > -b
                    } else {
                        b > -a
                    }
                }
                Family::A => unreachable!(),
            }
        }
    }

    pub fn left_descents(&self, w: &WeylElement) -> Vec<usize> {
        let inv = w.inverse();
        (0..self.rank())
            .filter(|&i| self.is_right_descent(&inv, i))
            .collect()
    }

    pub fn right_descents(&self, w: &WeylElement) -> Vec<usize> {
        (0..self.rank())
            .filter(|&i| self.is_right_descent(w, i))
            .collect()
    }

    /// Lexicographically smallest reduced word (0-based letters).  Built by
    /// repeatedly taking the smallest left descent, which is the greedy
    /// choice of the smallest possible first letter.
    pub fn reduced_word(&self, w: &WeylElement) -> Vec<usize> {
        let mut word = Vec::new();
        let mut cur = w.clone();
        let mut inv = cur.inverse();
        loop {
            let mut found = None;
            for i in 0..self.rank() {
                if self.is_right_descent(&inv, i) {
                    found = Some(i);
                    break;
                }
            }
            match found {
                None => break,
                Some(i) => {
                    word.push(i);
                    cur = self.simples[i].compose(&cur);
                    inv = cur.inverse();
                }
            }
        }
        debug_assert!(cur.is_identity());
        word
    }

    pub fn from_word(&self, word: &[usize]) -> WeylElement {
        let mut w = self.identity();
        for &i in word {
            w = w.compose(&self.simples[i]);
        }
        w
    }

    /// Bruhat order, by the descent recursion: for a left descent s of w,
    /// u <= w iff (su <= sw if s is a descent of u, else u <= sw).
    pub fn bruhat_leq(&self, u: &WeylElement, w: &WeylElement) -> bool {
        if u == w {
            return true;
        }
        let lu = self.length(u);
        let lw = self.length(w);
        self.bruhat_leq_inner(u, lu, w, lw)
    }

    fn bruhat_leq_inner(&self, u: &WeylElement, lu: usize, w: &WeylElement, lw: usize) -> bool {
        if lu > lw {
            return false;
        }
        if u == w {
            return true;
        }
        if lu == lw || lw == 0 {
            return false;
        }
        let s = match self.left_descents(w).first() {
            Some(&s) => s,
            None => return false,
        };
        let sw = self.simples[s].compose(w);
        if self.is_left_descent(u, s) {
            let su = self.simples[s].compose(u);
            self.bruhat_leq_inner(&su, lu - 1, &sw, lw - 1)
        } else {
            self.bruhat_leq_inner(u, lu, &sw, lw - 1)
        }
    }

    /// Longest element of the standard parabolic W_K, by greedy ascent.
    pub fn longest_element(&self, k: &SimpleSubset) -> WeylElement {
        let mut w = self.identity();
        let mut len = 0usize;
        loop {
            let mut advanced = false;
            for i in k.indices() {
                let cand = self.simples[i].compose(&w);
                let cl = self.length(&cand);
                if cl > len {
                    w = cand;
                    len = cl;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                return w;
            }
        }
    }

    /// All elements of the standard parabolic W_K, breadth first with an
    /// enumeration guard, sorted by (length, images).
    pub fn enumerate_subgroup(&self, k: &SimpleSubset) -> Result<Vec<WeylElement>, ZipError> {
        self.enumerate_subgroup_guarded(k, ENUM_GUARD)
    }

    pub fn enumerate_subgroup_guarded(
        &self,
        k: &SimpleSubset,
        guard: usize,
    ) -> Result<Vec<WeylElement>, ZipError> {
        let mut seen: HashSet<WeylElement> = HashSet::new();
        let mut queue: VecDeque<WeylElement> = VecDeque::new();
        let e = self.identity();
        seen.insert(e.clone());
        queue.push_back(e);
        while let Some(w) = queue.pop_front() {
            for i in k.indices() {
                let next = w.compose(&self.simples[i]);
                if !seen.contains(&next) {
                    if seen.len() >= guard {
                        return Err(ZipError::Guard(format!(
                            "group enumeration exceeds {} elements",
                            guard
                        )));
                    }
                    seen.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
        let mut out: Vec<(usize, WeylElement)> =
            seen.into_iter().map(|w| (self.length(&w), w)).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.images.cmp(&b.1.images)));
        Ok(out.into_iter().map(|(_, w)| w).collect())
    }

    /// Order of the full group, by the classical product formulas.
    pub fn group_order(&self) -> u128 {
        let m = self.roots.m as u128;
        let fact = |n: u128| -> u128 { (1..=n).product::<u128>().max(1) };
        match self.family() {
            Family::A => fact(m + 1),
            Family::B | Family::C => (1u128 << m) * fact(m),
            Family::D => {
                if m >= 2 {
                    (1u128 << (m - 1)) * fact(m)
                } else {
                    1
                }
            }
        }
    }

    pub fn enumerate_full(&self) -> Result<Vec<WeylElement>, ZipError> {
        if self.group_order() > ENUM_GUARD as u128 {
            return Err(ZipError::Guard(format!(
                "group of order {} exceeds the enumeration guard {}",
                self.group_order(),
                ENUM_GUARD
            )));
        }
        self.enumerate_subgroup(&SimpleSubset::full(self.rank()))
    }

    /// Minimal length representatives of the cosets of W_K, on the given
    /// side, sorted by (length, reduced word).
    pub fn min_coset_reps(
        &self,
        k: &SimpleSubset,
        side: CosetSide,
    ) -> Result<Vec<WeylElement>, ZipError> {
        let all = self.enumerate_full()?;
        let mut reps: Vec<WeylElement> = all
            .into_iter()
            .filter(|w| match side {
                CosetSide::Left => !k.indices().iter().any(|&i| self.is_left_descent(w, i)),
                CosetSide::Right => !k.indices().iter().any(|&i| self.is_right_descent(w, i)),
            })
            .collect();
        reps.sort_by(|a, b| {
            let (la, lb) = (self.length(a), self.length(b));
            la.cmp(&lb)
                .then_with(|| self.reduced_word(a).cmp(&self.reduced_word(b)))
        });
        Ok(reps)
    }

    /// The minimal element of the double coset W_K w W_K', by greedy descent.
    pub fn min_double_coset_rep(
        &self,
        k: &SimpleSubset,
        k2: &SimpleSubset,
        w: &WeylElement,
    ) -> WeylElement {
        let mut cur = w.clone();
        loop {
            let mut advanced = false;
            for i in k.indices() {
                if self.is_left_descent(&cur, i) {
                    cur = self.simples[i].compose(&cur);
                    advanced = true;
                    break;
                }
            }
            if advanced {
                continue;
            }
            for i in k2.indices() {
                if self.is_right_descent(&cur, i) {
                    cur = cur.compose(&self.simples[i]);
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                return cur;
            }
        }
    }

    /// If u s_i u^{-1} is again a simple reflection, return its index.
    pub fn conjugate_simple(&self, u: &WeylElement, i: usize) -> Option<usize> {
        let cand = u.compose(&self.simples[i]).compose(&u.inverse());
        self.simples.iter().position(|s| *s == cand)
    }

    /// Apply the Frobenius diagram automorphism to an element through a
    /// reduced word.
    pub fn frobenius_apply(&self, w: &WeylElement) -> WeylElement {
        if self.frobenius.is_identity() {
            return w.clone();
        }
        let word = self.reduced_word(w);
        let mapped: Vec<usize> = word.iter().map(|&i| self.frobenius.s_perm[i]).collect();
        self.from_word(&mapped)
    }

    pub fn frobenius_apply_inverse(&self, w: &WeylElement) -> WeylElement {
        if self.frobenius.is_identity() {
            return w.clone();
        }
        let word = self.reduced_word(w);
        let mapped: Vec<usize> = word
            .iter()
            .map(|&i| self.frobenius.inverse_simple(i))
            .collect();
        self.from_word(&mapped)
    }
}

fn swap(dim: usize, i: usize, j: usize) -> WeylElement {
    let mut w = WeylElement::identity(dim);
    w.images.swap(i, j);
    w
}

fn is_negative(v: &[i64]) -> bool {
    for &c in v {
        if c > 0 {
            return false;
        }
        if c < 0 {
            return true;
        }
    }
    false
}

/// Render a 0-based word as a deterministic 1-based string: "e" or "1-2-1".
pub fn word_string(word: &[usize]) -> String {
    if word.is_empty() {
        "e".to_string()
    } else {
        word.iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// Memoizing wrapper around length and Bruhat comparisons, for the poset
/// construction where the same pairs recur.
pub struct WeylCache<'a> {
    pub sys: &'a WeylSystem,
    lengths: std::cell::RefCell<HashMap<WeylElement, usize>>,
    bruhat: std::cell::RefCell<HashMap<(WeylElement, WeylElement), bool>>,
}

impl<'a> WeylCache<'a> {
    pub fn new(sys: &'a WeylSystem) -> WeylCache<'a> {
        WeylCache {
            sys,
            lengths: std::cell::RefCell::new(HashMap::new()),
            bruhat: std::cell::RefCell::new(HashMap::new()),
        }
    }

    pub fn length(&self, w: &WeylElement) -> usize {
        if let Some(&l) = self.lengths.borrow().get(w) {
            return l;
        }
        let l = self.sys.length(w);
        self.lengths.borrow_mut().insert(w.clone(), l);
        l
    }

    pub fn leq(&self, u: &WeylElement, w: &WeylElement) -> bool {
        if u == w {
            return true;
        }
        let key = (u.clone(), w.clone());
        if let Some(&r) = self.bruhat.borrow().get(&key) {
            return r;
        }
        let r = self.sys.bruhat_leq(u, w);
        self.bruhat.borrow_mut().insert(key, r);
        r
    }
}
