//! Small finite fields with table-based arithmetic.
//!
//! A field F_{p^e} is built from the lexicographically smallest monic
//! irreducible polynomial of degree e over F_p, where candidates are ordered
//! by the base-p value of their coefficient tuple (c_0, ..., c_{e-1}).  This
//! makes every field, and hence every computation over it, deterministic.
//!
//! Elements are indices 0..q encoding the coefficient vector of the residue
//! class in base p: index = sum c_i p^i.  In particular 0 is zero and 1 is
//! one, and prime-subfield elements have the same index in every field of
//! the same characteristic.  Addition, multiplication, inversion and the
//! p-power map are precomputed tables, so fields are capped at a modest q.
//!
//! Embeddings between fields of the same characteristic are computed by
//! exhaustive root-finding: the image of the small field's generator is the
//! smallest root of its defining polynomial in the big field.

use crate::error::ZipError;

/// Largest permitted field size (tables are q*q entries).
pub const MAX_Q: u64 = 512;

pub type F = u16;

#[derive(Clone)]
pub struct FqField {
    pub p: u64,
    pub e: u32,
    pub q: u64,
    /// Monic defining polynomial; poly[i] is the coefficient of X^i,
    /// length e+1, poly[e] = 1.  For e = 1 this is X - 0, i.e. [0, 1].
    pub poly: Vec<u64>,
    add: Vec<F>,
    mul: Vec<F>,
    inv: Vec<F>,
    neg: Vec<F>,
    frob_p: Vec<F>,
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.poly == other.poly
    }
}
impl Eq for FqField {}

impl std::fmt::Debug for FqField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F_{}^{}", self.p, self.e)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Polynomial arithmetic over F_p on coefficient vectors (little endian).
mod polys {
    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder of a modulo the monic polynomial m.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r: Vec<u64> = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        while r.len() > dm {
            let lead = *r.last().unwrap() % p;
            let shift = r.len() - 1 - dm;
            for i in 0..=dm {
                let idx = shift + i;
                let sub = (lead * m[i]) % p;
                r[idx] = (r[idx] + p * p - sub) % p;
            }
            trim(&mut r);
            if r.len() > dm && *r.last().unwrap() == 0 {
                trim(&mut r);
            }
        }
        r
    }
}

/// True if the monic polynomial (coeff vec, length e+1) is irreducible over
/// F_p, by trial division against every monic polynomial of degree 1..e/2.
fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let e = poly.len() - 1;
    if e == 1 {
        return true;
    }
    for d in 1..=(e / 2) {
        let count = p.pow(d as u32);
        for idx in 0..count {
            // Monic divisor of degree d with coefficient tuple from idx.
            let mut div = Vec::with_capacity(d + 1);
            let mut k = idx;
            for _ in 0..d {
                div.push(k % p);
                k /= p;
            }
            div.push(1);
            let r = polys::rem(poly, &div, p);
            if r.is_empty() {
                return false;
            }
        }
    }
    true
}

/// The lexicographically smallest monic irreducible polynomial of degree e,
/// candidates ordered by base-p value of the coefficient tuple.
fn lowest_irreducible(p: u64, e: u32) -> Vec<u64> {
    if e == 1 {
        return vec![0, 1];
    }
    let count = p.pow(e);
    for idx in 0..count {
        let mut cand = Vec::with_capacity(e as usize + 1);
        let mut k = idx;
        for _ in 0..e {
            cand.push(k % p);
            k /= p;
        }
        cand.push(1);
        if is_irreducible(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree");
}

impl FqField {
    pub fn new(p: u64, e: u32) -> Result<FqField, ZipError> {
        if !is_prime(p) {
            return Err(ZipError::Validation(format!("{} is not prime", p)));
        }
        if e == 0 {
            return Err(ZipError::Validation("extension degree must be positive".into()));
        }
        let q = p.checked_pow(e).filter(|&q| q <= MAX_Q).ok_or_else(|| {
            ZipError::Guard(format!("field size {}^{} exceeds the cap {}", p, e, MAX_Q))
        })?;
        let poly = lowest_irreducible(p, e);
        let qu = q as usize;
        let idx_to_vec = |i: u64| -> Vec<u64> {
            let mut v = Vec::with_capacity(e as usize);
            let mut k = i;
            for _ in 0..e {
                v.push(k % p);
                k /= p;
            }
            v
        };
        let vec_to_idx = |v: &[u64]| -> u64 {
            let mut idx = 0u64;
            for (i, &c) in v.iter().enumerate() {
                idx += (c % p) * p.pow(i as u32);
            }
            idx
        };
        let mut add = vec![0 as F; qu * qu];
        let mut mul = vec![0 as F; qu * qu];
        let mut neg = vec![0 as F; qu];
        for a in 0..q {
            let va = idx_to_vec(a);
            let vneg: Vec<u64> = va.iter().map(|&c| (p - c) % p).collect();
            neg[a as usize] = vec_to_idx(&vneg) as F;
            for b in 0..q {
                let vb = idx_to_vec(b);
                let vsum: Vec<u64> = va.iter().zip(&vb).map(|(&x, &y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = vec_to_idx(&vsum) as F;
                let mut prod = polys::mul(&va, &vb, p);
                prod = polys::rem(&prod, &poly, p);
                prod.resize(e as usize, 0);
                mul[(a * q + b) as usize] = vec_to_idx(&prod) as F;
            }
        }
        let mut inv = vec![0 as F; qu];
        for a in 1..q {
            for b in 1..q {
                if mul[(a * q + b) as usize] == 1 {
                    inv[a as usize] = b as F;
                    break;
                }
            }
            if inv[a as usize] == 0 {
                return Err(ZipError::Internal(format!(
                    "element {} has no inverse in F_{}^{}",
                    a, p, e
                )));
            }
        }
        let mut frob_p = vec![0 as F; qu];
        for a in 0..q {
            let mut acc = 1 as F;
            for _ in 0..p {
                acc = mul[(acc as u64 * q + a) as usize];
            }
            frob_p[a as usize] = acc;
        }
        Ok(FqField {
            p,
            e,
            q,
            poly,
            add,
            mul,
            inv,
            neg,
            frob_p,
        })
    }

    #[inline]
    pub fn add(&self, a: F, b: F) -> F {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: F, b: F) -> F {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn neg(&self, a: F) -> F {
        self.neg[a as usize]
    }

    #[inline]
    pub fn mul(&self, a: F, b: F) -> F {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: F) -> F {
        assert!(a != 0, "division by zero");
        self.inv[a as usize]
    }

    #[inline]
    pub fn div(&self, a: F, b: F) -> F {
        self.mul(a, self.inv(b))
    }

    /// x -> x^p, the absolute Frobenius.
    #[inline]
    pub fn frob_p(&self, a: F) -> F {
        self.frob_p[a as usize]
    }

    /// x -> x^(p^k).
    pub fn frob_pk(&self, a: F, k: u32) -> F {
        let mut x = a;
        for _ in 0..(k % self.e) {
            x = self.frob_p(x);
        }
        x
    }

    /// x -> x^t, the twist map of a zip category whose base field has order
    /// t; t must be a power of p not exceeding q.
    pub fn power_map(&self, a: F, t: u64) -> F {
        let mut k = 0u32;
        let mut v = 1u64;
        while v < t {
            v *= self.p;
            k += 1;
        }
        assert_eq!(v, t, "twist order must be a power of the characteristic");
        self.frob_pk(a, k)
    }

    pub fn pow(&self, a: F, n: u64) -> F {
        let mut acc: F = 1;
        for _ in 0..n {
            acc = self.mul(acc, a);
        }
        acc
    }

    pub fn elements(&self) -> impl Iterator<Item = F> {
        0..(self.q as F)
    }

    /// A multiplicative generator: the smallest element of full order.
    pub fn primitive_element(&self) -> F {
        'outer: for a in 2..self.q {
            let mut x = a as F;
            for _ in 1..(self.q - 1) {
                if x == 1 {
                    continue 'outer;
                }
                x = self.mul(x, a as F);
            }
            if x == 1 {
                return a as F;
            }
        }
        // F_2 has only the element 1.
        1
    }

    /// Evaluate a polynomial with F_p coefficients at a point of this field.
    fn eval_prime_poly(&self, poly: &[u64], x: F) -> F {
        let mut acc: F = 0;
        for &c in poly.iter().rev() {
            acc = self.mul(acc, x);
            acc = self.add(acc, (c % self.p) as F);
        }
        acc
    }

    /// Embedding table from `small` into this field: index i of the small
    /// field maps to table[i].  The image of the small field's generator is
    /// the smallest root of its defining polynomial here.
    pub fn embedding_from(&self, small: &FqField) -> Result<Vec<F>, ZipError> {
        if small.p != self.p || self.e % small.e != 0 {
            return Err(ZipError::Validation(format!(
                "no embedding of F_{}^{} into F_{}^{}",
                small.p, small.e, self.p, self.e
            )));
        }
        let root = self
            .elements()
            .find(|&x| self.eval_prime_poly(&small.poly, x) == 0)
            .ok_or_else(|| {
                ZipError::Internal("defining polynomial has no root in the big field".into())
            })?;
        let mut table = vec![0 as F; small.q as usize];
        for a in 0..small.q {
            // Digits of a in base p are the coefficients over the prime field.
            let mut acc: F = 0;
            let mut power: F = 1;
            let mut k = a;
            for _ in 0..small.e {
                let digit = (k % small.p) as F;
                acc = self.add(acc, self.mul(digit, power));
                power = self.mul(power, root);
                k /= small.p;
            }
            table[a as usize] = acc;
        }
        Ok(table)
    }
}
