//! Strata: extended Weyl elements, the component-group orbit structure, the
//! specialization order, and the resulting poset with automorphism
//! invariants per stratum.
//!
//! Strata are indexed by orbits of Theta on the set of pairs (w, omega)
//! with w a minimal coset representative for W_I and omega in the component
//! group.  One stratum specializes into the closure of another when some
//! twisted conjugate under W_I x Theta lies below it in the (extended)
//! Bruhat order; the order axioms are recomputed explicitly on every build
//! and any failure is an internal error, never a silent wrong poset.

use crate::error::ZipError;
use crate::weyl::{word_string, CosetSide, SimpleSubset, WeylCache, WeylElement};
use crate::zipdatum::ZipDatum;
use serde_json::json;

/// An element of the extended Weyl group W x Omega.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExtendedElement {
    pub w: WeylElement,
    pub omega: usize,
}

impl ExtendedElement {
    pub fn new(w: WeylElement, omega: usize) -> ExtendedElement {
        ExtendedElement { w, omega }
    }
}

pub fn ext_mul(datum: &ZipDatum, a: &ExtendedElement, b: &ExtendedElement) -> ExtendedElement {
    let om = &datum.sys.omega;
    ExtendedElement {
        w: a.w.compose(&om.act(a.omega, &b.w)),
        omega: om.mul(a.omega, b.omega),
    }
}

pub fn ext_inv(datum: &ZipDatum, a: &ExtendedElement) -> ExtendedElement {
    let om = &datum.sys.omega;
    let inv_omega = (om.order - a.omega) % om.order;
    ExtendedElement {
        w: om.act(inv_omega, &a.w.inverse()),
        omega: inv_omega,
    }
}

/// The isogeny-induced automorphism int(x) . F on extended elements; it
/// fixes the component part.
pub fn psi_ext(datum: &ZipDatum, a: &ExtendedElement) -> ExtendedElement {
    let fw = datum.sys.frobenius_apply(&a.w);
    let w = datum
        .x
        .compose(&fw)
        .compose(&datum.sys.omega.act(a.omega, &datum.x.inverse()));
    ExtendedElement { w, omega: a.omega }
}

/// All pairs (w, omega) with w minimal in its W_I coset, sorted by
/// (length, reduced word, omega).
pub fn enumerate_extended(datum: &ZipDatum) -> Result<Vec<ExtendedElement>, ZipError> {
    let reps = datum.sys.min_coset_reps(&datum.i_set, CosetSide::Left)?;
    let mut out = Vec::with_capacity(reps.len() * datum.sys.omega.order);
    for w in &reps {
        for omega in 0..datum.sys.omega.order {
            out.push(ExtendedElement::new(w.clone(), omega));
        }
    }
    out.sort_by(|a, b| {
        let (la, lb) = (datum.sys.length(&a.w), datum.sys.length(&b.w));
        la.cmp(&lb)
            .then_with(|| {
                datum
                    .sys
                    .reduced_word(&a.w)
                    .cmp(&datum.sys.reduced_word(&b.w))
            })
            .then_with(|| a.omega.cmp(&b.omega))
    });
    Ok(out)
}

/// The action of a component-group element theta on a catalog element:
/// theta . a . psi(theta)^{-1}.
pub fn theta_action(datum: &ZipDatum, theta: usize, a: &ExtendedElement) -> ExtendedElement {
    let t = ExtendedElement::new(datum.sys.identity(), theta);
    let pt_inv = ext_inv(datum, &psi_ext(datum, &t));
    ext_mul(datum, &t, &ext_mul(datum, a, &pt_inv))
}

/// Partition the catalog into Theta-orbits.  Orbits are listed by their
/// smallest member index; within an orbit indices are increasing, so the
/// first entry is the canonical representative (elements come in sorted
/// by length, word, omega, all of which the action preserves).
pub fn theta_orbits(datum: &ZipDatum, elements: &[ExtendedElement]) -> Vec<Vec<usize>> {
    let mut orbit_of: Vec<Option<usize>> = vec![None; elements.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..elements.len() {
        if orbit_of[start].is_some() {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![start];
        orbit_of[start] = Some(id);
        let mut frontier = vec![start];
        while let Some(i) = frontier.pop() {
            for theta in datum.theta_indices() {
                let image = theta_action(datum, theta, &elements[i]);
                let j = elements
                    .iter()
                    .position(|e| *e == image)
                    .expect("Theta action must stay inside the catalog");
                if orbit_of[j].is_none() {
                    orbit_of[j] = Some(id);
                    members.push(j);
                    frontier.push(j);
                }
            }
        }
        members.sort();
        orbits.push(members);
    }
    orbits
}

/// Extended Bruhat order: compare Weyl parts when the component parts agree.
pub fn ext_bruhat_leq(datum: &ZipDatum, a: &ExtendedElement, b: &ExtendedElement) -> bool {
    a.omega == b.omega && datum.sys.bruhat_leq(&a.w, &b.w)
}

/// Shared context for specialization tests: the elements of W_I and the
/// Theta indices, enumerated once.
pub struct SpecializationContext<'a> {
    pub datum: &'a ZipDatum,
    w_i: Vec<WeylElement>,
    cache: WeylCache<'a>,
}

impl<'a> SpecializationContext<'a> {
    pub fn new(datum: &'a ZipDatum) -> Result<SpecializationContext<'a>, ZipError> {
        let w_i = datum.sys.enumerate_subgroup(&datum.i_set)?;
        Ok(SpecializationContext {
            datum,
            w_i,
            cache: WeylCache::new(&datum.sys),
        })
    }

    /// a specializes into the closure of b: some twisted conjugate of a
    /// under W_I x Theta lies below b in the extended Bruhat order.
    pub fn precedes(&self, a: &ExtendedElement, b: &ExtendedElement) -> bool {
        if a.omega != b.omega {
            return false;
        }
        let d = self.datum;
        for theta in d.theta_indices() {
            for v in &self.w_i {
                let vhat = ExtendedElement::new(v.clone(), theta);
                let conj = ext_mul(
                    d,
                    &vhat,
                    &ext_mul(d, a, &ext_inv(d, &psi_ext(d, &vhat))),
                );
                debug_assert_eq!(conj.omega, a.omega);
                if conj.omega == b.omega && self.cache.leq(&conj.w, &b.w) {
                    return true;
                }
            }
        }
        false
    }

    /// Does the shortened test apply: untwisted group, connected, and the
    /// longest element central in the Weyl group.
    pub fn split_shortcut_applies(&self) -> bool {
        let d = self.datum;
        d.sys.frobenius.is_identity()
            && d.sys.omega.order == 1
            && (0..d.sys.rank()).all(|i| d.sys.conjugate_simple(&d.w0, i) == Some(i))
    }

    /// Specialization via the shortened test: exists v in W_I with
    /// v a w0_I v^{-1} w0_I <= b.  Only valid when split_shortcut_applies.
    pub fn precedes_split_shortcut(&self, a: &ExtendedElement, b: &ExtendedElement) -> bool {
        let d = self.datum;
        let w0_i = d.sys.longest_element(&d.i_set);
        for v in &self.w_i {
            let cand = v
                .compose(&a.w)
                .compose(&w0_i)
                .compose(&v.inverse())
                .compose(&w0_i);
            if self.cache.leq(&cand, &b.w) {
                return true;
            }
        }
        false
    }
}

/// Stand-alone specialization test; for bulk work use SpecializationContext.
pub fn precedes(datum: &ZipDatum, a: &ExtendedElement, b: &ExtendedElement) -> Result<bool, ZipError> {
    Ok(SpecializationContext::new(datum)?.precedes(a, b))
}

/// Automorphism-group invariants of a stratum, from the Weyl part of its
/// representative.  The dimension formulas describe the identity component
/// and only apply to connected groups; for a group with several components
/// they are reported as unsupported (None).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AutInvariants {
    /// Minimal element of W_I w W_J, the Levi-conjugation normal form.
    pub v_min: WeylElement,
    /// Dimension of the unipotent radical of the automorphism group.
    pub aut_dim: Option<usize>,
    /// Dimension of the Lie algebra of the automorphism group.
    pub aut_lie_dim: Option<usize>,
    /// The stratum is smooth exactly when the two dimensions agree, i.e.
    /// the representative is minimal in its double coset.
    pub smooth: Option<bool>,
    /// Largest subset of J cap w^{-1}(I) stable under s -> psi(w s w^{-1});
    /// the type of the Levi part of the stabilizer.
    pub k_w: SimpleSubset,
}

pub fn aut_invariants(datum: &ZipDatum, e: &ExtendedElement) -> AutInvariants {
    let sys = &datum.sys;
    let w = &e.w;
    let v_min = sys.min_double_coset_rep(&datum.i_set, &datum.j_set, w);

    // K_w by iterated removal: start from the simples of J whose
    // w-conjugate is a simple of I, then drop anything whose image under
    // tau(s) = psi(w s w^{-1}) has fallen outside.
    let rank = sys.rank();
    let mut k = SimpleSubset::empty(rank);
    for j in datum.j_set.indices() {
        if let Some(im) = sys.conjugate_simple(w, j) {
            if datum.i_set.contains(im) {
                k.insert(j);
            }
        }
    }
    let tau = |j: usize| -> Option<usize> {
        let im = sys.conjugate_simple(w, j)?;
        let fi = sys.frobenius_apply(&sys.simples[im]);
        let conj = datum.x.compose(&fi).compose(&datum.x.inverse());
        sys.simples.iter().position(|s| *s == conj)
    };
    loop {
        let mut next = SimpleSubset::empty(rank);
        for j in k.indices() {
            match tau(j) {
                Some(t) if k.contains(t) => {
                    next.insert(j);
                }
                _ => {}
            }
        }
        if next == k {
            break;
        }
        k = next;
    }

    if datum.connected() {
        let lw = sys.length(w);
        let lv = sys.length(&v_min);
        AutInvariants {
            aut_dim: Some(datum.dim - lw),
            aut_lie_dim: Some(datum.dim - lv),
            smooth: Some(lw == lv),
            v_min,
            k_w: k,
        }
    } else {
        AutInvariants {
            aut_dim: None,
            aut_lie_dim: None,
            smooth: None,
            v_min,
            k_w: k,
        }
    }
}

/// One stratum: the canonical orbit representative and its invariants.
#[derive(Clone, Debug)]
pub struct Stratum {
    pub rep: ExtendedElement,
    pub word: Vec<usize>,
    pub length: usize,
    pub codim: usize,
    pub orbit_size: usize,
    pub aut: AutInvariants,
}

/// The full poset of strata for a datum.
pub struct StratumPoset {
    pub datum: ZipDatum,
    pub strata: Vec<Stratum>,
    /// leq[i][j]: stratum i lies in the closure of stratum j.
    pub leq: Vec<Vec<bool>>,
    /// Transitive reduction of leq, as (lower, upper) index pairs.
    pub hasse: Vec<(usize, usize)>,
}

pub fn build_poset(datum: &ZipDatum) -> Result<StratumPoset, ZipError> {
    let elements = enumerate_extended(datum)?;
    let orbits = theta_orbits(datum, &elements);
    let total: usize = orbits.iter().map(|o| o.len()).sum();
    if total != elements.len() {
        return Err(ZipError::Internal("orbits do not partition the catalog".into()));
    }

    let ctx = SpecializationContext::new(datum)?;
    let reps: Vec<&ExtendedElement> = orbits.iter().map(|o| &elements[o[0]]).collect();
    let n = reps.len();
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            leq[i][j] = ctx.precedes(reps[i], reps[j]);
        }
    }

    // The relation must be a partial order, strictly increasing in length.
    for i in 0..n {
        if !leq[i][i] {
            return Err(ZipError::Internal("specialization is not reflexive".into()));
        }
        for j in 0..n {
            if i != j && leq[i][j] {
                if leq[j][i] {
                    return Err(ZipError::Internal(
                        "specialization is not antisymmetric".into(),
                    ));
                }
                let (li, lj) = (datum.sys.length(&reps[i].w), datum.sys.length(&reps[j].w));
                if li >= lj {
                    return Err(ZipError::Internal(
                        "specialization does not increase length".into(),
                    ));
                }
            }
            for k in 0..n {
                if leq[i][j] && leq[j][k] && !leq[i][k] {
                    return Err(ZipError::Internal(
                        "specialization is not transitive".into(),
                    ));
                }
            }
        }
    }

    let mut hasse = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || !leq[i][j] {
                continue;
            }
            let covered = (0..n).any(|k| k != i && k != j && leq[i][k] && leq[k][j]);
            if !covered {
                hasse.push((i, j));
            }
        }
    }

    let strata = orbits
        .iter()
        .map(|orbit| {
            let rep = elements[orbit[0]].clone();
            let length = datum.sys.length(&rep.w);
            Stratum {
                word: datum.sys.reduced_word(&rep.w),
                length,
                codim: datum.dim - length,
                orbit_size: orbit.len(),
                aut: aut_invariants(datum, &rep),
                rep,
            }
        })
        .collect();

    Ok(StratumPoset {
        datum: datum.clone(),
        strata,
        leq,
        hasse,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EmitFormat {
    Dot,
    Json,
    Tsv,
}

impl std::str::FromStr for EmitFormat {
    type Err = ZipError;
    fn from_str(s: &str) -> Result<EmitFormat, ZipError> {
        match s {
            "dot" => Ok(EmitFormat::Dot),
            "json" => Ok(EmitFormat::Json),
            "tsv" => Ok(EmitFormat::Tsv),
            other => Err(ZipError::Validation(format!("unknown format: {}", other))),
        }
    }
}

impl StratumPoset {
    pub fn emit(&self, format: EmitFormat) -> String {
        match format {
            EmitFormat::Dot => self.emit_dot(),
            EmitFormat::Json => self.emit_json(),
            EmitFormat::Tsv => self.emit_tsv(),
        }
    }

    fn stratum_label(&self, s: &Stratum) -> String {
        let mut label = word_string(&s.word);
        if s.rep.omega != 0 {
            label.push_str(&format!(" [{}]", s.rep.omega));
        }
        label
    }

    fn emit_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph strata {\n");
        out.push_str("  rankdir=BT;\n");
        out.push_str("  node [shape=box];\n");
        for (i, s) in self.strata.iter().enumerate() {
            out.push_str(&format!(
                "  n{} [label=\"{}\\ncodim {}\"];\n",
                i,
                self.stratum_label(s),
                s.codim
            ));
        }
        for &(lo, hi) in &self.hasse {
            out.push_str(&format!("  n{} -> n{};\n", lo, hi));
        }
        out.push_str("}\n");
        out
    }

    fn emit_json(&self) -> String {
        let d = &self.datum;
        let nbar: serde_json::Map<String, serde_json::Value> = d
            .ctype
            .nbar
            .iter()
            .map(|(&i, &c)| (i.to_string(), json!(c)))
            .collect();
        let simple_list = |k: &SimpleSubset| -> Vec<usize> {
            k.indices().iter().map(|&i| i + 1).collect()
        };
        let strata: Vec<serde_json::Value> = self
            .strata
            .iter()
            .map(|s| {
                json!({
                    "word": word_string(&s.word),
                    "omega": s.rep.omega,
                    "length": s.length,
                    "codim": s.codim,
                    "aut_dim": s.aut.aut_dim,
                    "aut_lie_dim": s.aut.aut_lie_dim,
                    "aut_smooth": s.aut.smooth,
                    "orbit_size": s.orbit_size,
                })
            })
            .collect();
        let hasse: Vec<serde_json::Value> = self
            .hasse
            .iter()
            .map(|&(a, b)| json!([a, b]))
            .collect();
        let doc = json!({
            "datum": {
                "family": d.family.name(),
                "nbar": nbar,
                "I": simple_list(&d.i_set),
                "J": simple_list(&d.j_set),
                "dim": d.dim,
            },
            "strata": strata,
            "hasse": hasse,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
        s.push('\n');
        s
    }

    fn emit_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str("word\tomega\tlength\tcodim\taut_dim\taut_lie_dim\taut_smooth\torbit_size\n");
        let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
        for s in &self.strata {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                word_string(&s.word),
                s.rep.omega,
                s.length,
                s.codim,
                opt(s.aut.aut_dim),
                opt(s.aut.aut_lie_dim),
                s.aut
                    .smooth
                    .map_or("-".to_string(), |b| b.to_string()),
                s.orbit_size,
            ));
        }
        out
    }
}
