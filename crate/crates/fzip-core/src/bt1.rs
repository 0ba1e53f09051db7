//! Classification table for truncated Barsotti-Tate groups of level 1
//! over a field: isomorphism classes of height n and dimension d are
//! indexed by permutations with two prescribed ascending runs, each
//! carrying an inversion-count length and the automorphism dimension
//! d(n-d) - length.  The linear-algebra avatar is a level-1 display,
//! stored in normal form as one structural invertible matrix on split
//! coordinates; converting a display to a zip supported on weights
//! {0, 1} is an equivalence, and twisted duality swaps the two graded
//! ranks.

use std::collections::BTreeMap;

use crate::error::ZipError;
use crate::field::FqField;
use crate::fzip::FZip;
use crate::linalg::{combinations, Mat};

/// Largest height for which the table is enumerated; C(12, 6) = 924 rows.
pub const BT1_HEIGHT_CAP: usize = 12;

/// One isomorphism class of height n and dimension d.  The permutation w
/// is stored in one-line notation with values 1..n; the positions of the
/// values 1..d increase left to right, as do the positions of the values
/// d+1..n, so the class is determined by the position set of the small
/// values.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BT1Class {
    pub n: usize,
    pub d: usize,
    pub w: Vec<usize>,
    pub length: usize,
    pub aut_dim: usize,
}

fn inversions(w: &[usize]) -> usize {
    let n = w.len();
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            if w[i] > w[j] {
                count += 1;
            }
        }
    }
    count
}

/// All classes of height n and dimension d, one per d-subset of positions,
/// in lexicographic order of the position sets.  The first row is the
/// identity permutation (largest automorphism group) and the last is the
/// unique class with a finite automorphism group.
pub fn classify_bt1(n: usize, d: usize) -> Result<Vec<BT1Class>, ZipError> {
    if d > n {
        return Err(ZipError::Validation(format!(
            "dimension {} exceeds height {}",
            d, n
        )));
    }
    if n > BT1_HEIGHT_CAP {
        return Err(ZipError::Guard(format!(
            "height {} is over the table cap {}",
            n, BT1_HEIGHT_CAP
        )));
    }
    let mut out = Vec::new();
    for s in combinations(n, d) {
        let mut w = vec![0usize; n];
        for (k, &pos) in s.iter().enumerate() {
            w[pos] = k + 1;
        }
        let mut big = d + 1;
        for slot in w.iter_mut() {
            if *slot == 0 {
                *slot = big;
                big += 1;
            }
        }
        let length = inversions(&w);
        out.push(BT1Class {
            n,
            d,
            w,
            length,
            aut_dim: d * (n - d) - length,
        });
    }
    Ok(out)
}

/// A level-1 display over F_q in normal form: the module splits as the
/// first d coordinates (mapping onto the cokernel of iota) followed by
/// n - d coordinates spanning the image of iota, and the whole structure
/// is carried by one invertible matrix phi whose first d columns give the
/// q-power-semilinear operator F on the cokernel part and whose remaining
/// columns give the divided operator F_1 on the image part.  F kills the
/// image of iota, and the defining relation between F_1 and F holds by
/// construction in these coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Display1 {
    pub field: FqField,
    pub n: usize,
    pub d: usize,
    pub phi: Mat,
}

impl Display1 {
    pub fn new(field: FqField, n: usize, d: usize, phi: Mat) -> Result<Display1, ZipError> {
        if d > n {
            return Err(ZipError::Validation(format!(
                "dimension {} exceeds height {}",
                d, n
            )));
        }
        if phi.rows != n || phi.cols != n {
            return Err(ZipError::Validation(format!(
                "structural matrix must be {} x {}",
                n, n
            )));
        }
        if phi.inverse(&field).is_none() {
            return Err(ZipError::Validation(
                "structural matrix is singular: the divided operator does not \
                 generate the module"
                    .into(),
            ));
        }
        Ok(Display1 { field, n, d, phi })
    }
}

/// The zip attached to a display: the descending filtration jumps at the
/// split position, the ascending one is spanned by the image of F, and
/// the graded comparison maps are induced by F and F_1.  In the normal
/// coordinates that is exactly the matrix model of phi with weights
/// (0, .., 0, 1, .., 1).
pub fn fzip_of_display(dsp: &Display1) -> Result<FZip, ZipError> {
    let lambda: Vec<i64> = (0..dsp.n).map(|j| if j < dsp.d { 0 } else { 1 }).collect();
    FZip::from_matrix_model(&dsp.field, dsp.field.q, &lambda, &dsp.phi)
}

fn check_bt1_type(m: &FZip) -> Result<BTreeMap<i64, usize>, ZipError> {
    let tc = m.type_of();
    for &i in tc.keys() {
        if i != 0 && i != 1 {
            return Err(ZipError::Validation(format!(
                "type has a jump at weight {} outside {{0, 1}}",
                i
            )));
        }
    }
    Ok(tc)
}

/// The display of a zip supported on weights {0, 1}: rewrite the zip on
/// the canonical graded lifts of its descending filtration, so that the
/// filtration becomes the standard split one, and read off the structural
/// matrix from the comparison maps.  The structural matrix is built from
/// canonical ascending-side lifts, so the display is a canonical form:
/// round-tripping a display through its zip canonicalizes it (changing
/// columns only by lower filtration steps), and round-tripping a zip in
/// matrix-model coordinates through its display reproduces it literally.
pub fn display_of_fzip(m: &FZip) -> Result<Display1, ZipError> {
    let f = &m.field;
    if m.twist != f.q {
        return Err(ZipError::Validation(format!(
            "comparison twist is {} but a display twists by the full field power {}",
            m.twist, f.q
        )));
    }
    let tc = check_bt1_type(m)?;
    let n = m.rank();
    let d = tc.get(&0).copied().unwrap_or(0);
    let cl = m.c.graded_lifts(f);
    let dl = m.d.graded_lifts(f);
    let mut a = Mat::zero(n, 0);
    let mut b = Mat::zero(n, 0);
    for i in [0i64, 1] {
        if let Some(c) = cl.get(&i) {
            a = a.hstack(c);
            b = b.hstack(&dl[&i].mul(f, &m.phi[&i]));
        }
    }
    let ainv = a
        .inverse(f)
        .ok_or_else(|| ZipError::Internal("graded lifts do not span".into()))?;
    Display1::new(f.clone(), n, d, ainv.mul(f, &b))
}

/// Duality on zips supported on {0, 1}: the plain dual twisted back by
/// the rank-one object at weight 1, so that the result is again supported
/// on {0, 1} with the two graded ranks swapped.
pub fn dual_bt1(m: &FZip) -> Result<FZip, ZipError> {
    check_bt1_type(m)?;
    let unit = FZip::make_tate(&m.field, m.twist, 1)?;
    m.dual()?.tensor(&unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fzip::isomorphic_over;
    use crate::zipdatum::{build_zip_datum, CocharacterType, GroupFamily};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn binomial(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        let mut num = 1usize;
        for i in 0..k {
            num = num * (n - i) / (i + 1);
        }
        num
    }

    fn random_invertible(f: &FqField, n: usize, rng: &mut ChaCha8Rng) -> Mat {
        loop {
            let mut g = Mat::zero(n, n);
            for r in 0..n {
                for c in 0..n {
                    g.set(r, c, rng.gen_range(0..f.q) as crate::field::F);
                }
            }
            if g.inverse(f).is_some() {
                return g;
            }
        }
    }

    #[test]
    fn table_counts_match_binomials() {
        for n in 0..=10 {
            for d in 0..=n {
                let table = classify_bt1(n, d).unwrap();
                assert_eq!(table.len(), binomial(n, d), "({}, {})", n, d);
                let top = d * (n - d);
                let zero = table.iter().filter(|c| c.aut_dim == 0).count();
                let full = table.iter().filter(|c| c.aut_dim == top).count();
                assert_eq!(zero, 1, "({}, {})", n, d);
                assert_eq!(full, 1, "({}, {})", n, d);
                for c in &table {
                    assert!(c.length <= top);
                    assert_eq!(c.aut_dim, top - c.length);
                    // Two ascending runs: positions of 1..d and of d+1..n.
                    let pos = |v: usize| c.w.iter().position(|&x| x == v).unwrap();
                    for v in 1..d {
                        assert!(pos(v) < pos(v + 1));
                    }
                    for v in d + 1..n {
                        assert!(pos(v) < pos(v + 1));
                    }
                    // The length also counts how far the small-value
                    // positions sit beyond their minimal placement.
                    let shift: usize = (1..=d).map(|v| pos(v)).sum::<usize>()
                        - (0..d).sum::<usize>();
                    assert_eq!(c.length, shift);
                }
            }
        }
    }

    #[test]
    fn small_tables_by_hand() {
        let t21 = classify_bt1(2, 1).unwrap();
        assert_eq!(
            t21.iter().map(|c| c.aut_dim).collect::<Vec<_>>(),
            vec![1, 0]
        );
        assert_eq!(t21[0].w, vec![1, 2]);
        assert_eq!(t21[1].w, vec![2, 1]);
        let t31 = classify_bt1(3, 1).unwrap();
        assert_eq!(
            t31.iter().map(|c| c.aut_dim).collect::<Vec<_>>(),
            vec![2, 1, 0]
        );
        for n in 1..=4 {
            let et = classify_bt1(n, 0).unwrap();
            assert_eq!(et.len(), 1);
            assert_eq!(et[0].w, (1..=n).collect::<Vec<_>>());
            assert_eq!(et[0].aut_dim, 0);
        }
        assert!(matches!(classify_bt1(13, 1), Err(ZipError::Guard(_))));
        assert!(matches!(classify_bt1(2, 3), Err(ZipError::Validation(_))));
    }

    #[test]
    fn lengths_match_the_linear_strata() {
        for n in 1..=6usize {
            for d in 0..=n {
                let mut entries: Vec<(i64, usize)> = Vec::new();
                if d > 0 {
                    entries.push((0, d));
                }
                if n - d > 0 {
                    entries.push((1, n - d));
                }
                let t = CocharacterType::new(&entries);
                let datum = build_zip_datum(GroupFamily::Gl(n), &t).unwrap();
                let poset = crate::strata::build_poset(&datum).unwrap();
                let mut strata_lengths: Vec<usize> =
                    poset.strata.iter().map(|s| s.length).collect();
                let mut table_lengths: Vec<usize> = classify_bt1(n, d)
                    .unwrap()
                    .iter()
                    .map(|c| c.length)
                    .collect();
                strata_lengths.sort_unstable();
                table_lengths.sort_unstable();
                assert_eq!(strata_lengths, table_lengths, "({}, {})", n, d);
                if n <= 5 {
                    let mut strata_auts: Vec<usize> = poset
                        .strata
                        .iter()
                        .map(|s| s.aut.aut_dim.unwrap())
                        .collect();
                    let mut table_auts: Vec<usize> = classify_bt1(n, d)
                        .unwrap()
                        .iter()
                        .map(|c| c.aut_dim)
                        .collect();
                    strata_auts.sort_unstable();
                    table_auts.sort_unstable();
                    assert_eq!(strata_auts, table_auts, "({}, {})", n, d);
                }
            }
        }
    }

    #[test]
    fn display_roundtrip_fixes_the_zip() {
        let fields = [FqField::new(2, 1).unwrap(), FqField::new(2, 2).unwrap()];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in &fields {
            for n in 1..=4usize {
                for _ in 0..5 {
                    let d = rng.gen_range(0..=n);
                    let phi = random_invertible(f, n, &mut rng);
                    let dsp = Display1::new(f.clone(), n, d, phi).unwrap();
                    let m = fzip_of_display(&dsp).unwrap();
                    let mut expect = BTreeMap::new();
                    if d > 0 {
                        expect.insert(0i64, d);
                    }
                    if n - d > 0 {
                        expect.insert(1i64, n - d);
                    }
                    assert_eq!(m.type_of(), expect);
                    let back = display_of_fzip(&m).unwrap();
                    assert_eq!((back.n, back.d), (dsp.n, dsp.d));
                    // The zip does not see the choice of structural lifts.
                    assert_eq!(fzip_of_display(&back).unwrap(), m);
                    // Canonicalization is a retraction.
                    let again = display_of_fzip(&fzip_of_display(&back).unwrap()).unwrap();
                    assert_eq!(again, back);
                }
            }
        }
    }

    #[test]
    fn zip_roundtrip_is_isomorphic() {
        let f = FqField::new(2, 1).unwrap();
        // A zip of type (1, 2) built away from matrix-model form: the
        // flags come from a non-monomial change of basis.
        let mut g = Mat::identity(3);
        g.set(0, 1, 1);
        g.set(1, 2, 1);
        let m = FZip::from_matrix_model(&f, 2, &[1, 0, 1], &g).unwrap();
        let dsp = display_of_fzip(&m).unwrap();
        assert_eq!(dsp.d, 1);
        let back = fzip_of_display(&dsp).unwrap();
        assert_eq!(back.type_of(), m.type_of());
        assert!(isomorphic_over(&m, &back, 1).unwrap().is_some());
    }

    #[test]
    fn duality_swaps_the_type() {
        let f = FqField::new(2, 1).unwrap();
        let m = FZip::from_matrix_model(&f, 2, &[0, 1, 1], &Mat::identity(3)).unwrap();
        let dual = dual_bt1(&m).unwrap();
        let expect: BTreeMap<i64, usize> = [(0i64, 2), (1i64, 1)].into_iter().collect();
        assert_eq!(dual.type_of(), expect);
        let double = dual_bt1(&dual).unwrap();
        assert_eq!(double.type_of(), m.type_of());
        assert!(isomorphic_over(&m, &double, 1).unwrap().is_some());
        // The all-zero-weight boundary case maps onto the all-one class.
        let et = FZip::from_matrix_model(&f, 2, &[0, 0], &Mat::identity(2)).unwrap();
        let dual = dual_bt1(&et).unwrap();
        let expect: BTreeMap<i64, usize> = [(1i64, 2)].into_iter().collect();
        assert_eq!(dual.type_of(), expect);
    }

    #[test]
    fn rejects_unsupported_input() {
        let f = FqField::new(2, 1).unwrap();
        let m = FZip::from_matrix_model(&f, 2, &[0, 2], &Mat::identity(2)).unwrap();
        assert!(matches!(display_of_fzip(&m), Err(ZipError::Validation(_))));
        assert!(matches!(dual_bt1(&m), Err(ZipError::Validation(_))));
        let f4 = FqField::new(2, 2).unwrap();
        let m = FZip::from_matrix_model(&f4, 2, &[0, 1], &Mat::identity(2)).unwrap();
        let e = display_of_fzip(&m).unwrap_err();
        assert!(e.to_string().contains("full field power"));
        let singular = Mat::zero(2, 2);
        assert!(Display1::new(f.clone(), 2, 1, singular).is_err());
    }
}
