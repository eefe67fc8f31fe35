//! Cancellation of type D structures: eliminating a single invertible-pivot
//! pair, iterated elimination of the mutual pairs over free circles, and the
//! closed-form reduced structure with inverse-weight coefficients, together
//! with the maps realizing the retraction.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::cleaved::{Algebra, Elem, GenKind, Sign, Word};
use crate::diagram::TangleDiagram;
use crate::field::RationalFunction;
use crate::pairing::DView;
use crate::planar::Side;
use crate::type_d::{Report, StateId, TypeDStructure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("pivot between {0} and {1} is not an invertible multiple of the idempotent")]
    NonInvertiblePivot(usize, usize),
    #[error("a perturbation word could not be reduced to length <= 1: {0}")]
    NeedsWordReduction(String),
}

/// A sparse matrix of algebra elements indexed by state ids; used for type D
/// differentials and morphisms during reduction.
#[derive(Debug, Clone, Default)]
pub struct DMat {
    pub terms: BTreeMap<(usize, usize), Elem>,
}

impl DMat {
    pub fn add_elem(&mut self, i: usize, j: usize, e: &Elem) {
        if e.is_empty() {
            return;
        }
        let slot = self.terms.entry((i, j)).or_default();
        slot.add(e);
        if slot.is_empty() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&(usize, usize), &Elem)> {
        self.terms.iter()
    }

    /// Word-concatenating composition: apply `self` first, then `after`.
    pub fn then(&self, after: &DMat) -> DMat {
        let mut out = DMat::default();
        for (&(i, j), e1) in &self.terms {
            for (&(j2, k), e2) in &after.terms {
                if j != j2 {
                    continue;
                }
                out.add_elem(i, k, &e1.mul(e2));
            }
        }
        out
    }

    pub fn identity(states: impl IntoIterator<Item = (usize, crate::cleaved::LinkId)>) -> DMat {
        let mut out = DMat::default();
        for (i, link) in states {
            out.add_elem(i, i, &Elem::from_word(Word::idem(link)));
        }
        out
    }
}

/// Try to rewrite every word of length >= 2 in an element to length <= 1:
/// words that are zero in the algebra are dropped, and right-bridge/co-core
/// pairs are replaced by the right decoration element they equal. Returns
/// an error for anything left over.
pub fn reduce_words(alg: &Algebra, e: &Elem) -> Result<Elem, ReduceError> {
    let mut out = Elem::new();
    for (w, c) in &e.terms {
        if w.len() <= 1 {
            out.add_term(w.clone(), c.clone());
            continue;
        }
        if w.len() == 2 {
            let single = Elem::from_word(w.clone());
            if alg.is_zero(&single) == Ok(true) {
                continue;
            }
            // try the bridge/co-core identification
            let sl = alg.link(w.source);
            let tl = alg.link(w.target);
            if sl.left == tl.left && sl.right == tl.right {
                let diffs: Vec<usize> = (0..sl.dec.len())
                    .filter(|&k| sl.dec[k] != tl.dec[k])
                    .collect();
                if let [circle] = diffs[..] {
                    if sl.dec[circle] == Sign::Plus {
                        if let Some(rdec) = alg.dec_gen(w.source, Side::Right, circle) {
                            let mut cand = single.clone();
                            cand.add(&Elem::from_gen(alg, rdec));
                            if alg.is_zero(&cand) == Ok(true) {
                                out.add_term(Word::single(alg, rdec), c.clone());
                                continue;
                            }
                        }
                    }
                }
            }
        }
        return Err(ReduceError::NeedsWordReduction(format!(
            "{}-letter word from link {} to {}",
            w.len(),
            w.source,
            w.target
        )));
    }
    Ok(out)
}

/// A type D structure given as states plus a coefficient matrix, together
/// with bookkeeping shared with the structure it was reduced from.
pub struct ReducedD<'a> {
    pub algebra: &'a Algebra,
    pub diagram: &'a TangleDiagram,
    /// Original state ids that survive.
    pub alive: Vec<StateId>,
    pub boundary: Vec<crate::cleaved::LinkId>,
    pub zeta4: Vec<i32>,
    pub labels: Vec<String>,
    pub delta: DMat,
}

/// The retraction data produced by cancellation.
pub struct CancellationData<'a> {
    pub reduced: ReducedD<'a>,
    pub iota: DMat,
    pub pi: DMat,
    pub homotopy: DMat,
}

pub fn dmat_of(d: &TypeDStructure<'_>) -> DMat {
    let mut m = DMat::default();
    for (i, terms) in d.delta.iter().enumerate() {
        for t in terms {
            let mut e = Elem::new();
            e.add_term(Word::single(d.algebra, t.gen), t.coeff.clone());
            m.add_elem(i, t.target, &e);
        }
    }
    m
}

fn idem_coeff(e: &Elem) -> Option<RationalFunction> {
    if e.terms.len() != 1 {
        return None;
    }
    let (w, c) = e.terms.iter().next().unwrap();
    if w.is_empty() {
        Some(c.clone())
    } else {
        None
    }
}

/// Cancel the pair (x1, x2): the coefficient from x1 to x2 must be an
/// invertible scalar times the idempotent, and neither state may carry a
/// self-term. Returns the perturbed matrix on the remaining states and the
/// retraction maps (as matrices over the original index set).
pub fn cancel(
    alg: &Algebra,
    delta: &DMat,
    boundary: &[crate::cleaved::LinkId],
    alive: &[StateId],
    x1: StateId,
    x2: StateId,
) -> Result<(DMat, DMat, DMat, DMat), ReduceError> {
    let pivot = delta.get(x1, x2);
    let Some(c) = idem_coeff(&pivot) else {
        return Err(ReduceError::NonInvertiblePivot(x1, x2));
    };
    if c.is_zero() {
        return Err(ReduceError::NonInvertiblePivot(x1, x2));
    }
    if !delta.get(x1, x1).is_empty() || !delta.get(x2, x2).is_empty() {
        return Err(ReduceError::NonInvertiblePivot(x1, x2));
    }
    let p_inv = c.inv().expect("nonzero");

    let keep: Vec<StateId> = alive.iter().copied().filter(|&s| s != x1 && s != x2).collect();
    let mut out = DMat::default();
    for (&(i, j), e) in &delta.terms {
        if i == x1 || i == x2 || j == x1 || j == x2 {
            continue;
        }
        out.add_elem(i, j, e);
    }
    for &i in &keep {
        let a_i2 = delta.get(i, x2);
        if a_i2.is_empty() {
            continue;
        }
        for &j in &keep {
            let a_1j = delta.get(x1, j);
            if a_1j.is_empty() {
                continue;
            }
            let prod = a_i2.mul(&a_1j).scaled(&p_inv);
            // eager reduction: collapse bridge/co-core pairs and drop zero
            // words where possible; anything left is cleaned up at the end
            match reduce_words(alg, &prod) {
                Ok(r) => out.add_elem(i, j, &r),
                Err(_) => out.add_elem(i, j, &prod),
            }
        }
    }

    // iota: reduced -> original, 1 (x) x_i + p^-1 a_{i,x2} (x) x1
    let mut iota = DMat::identity(keep.iter().map(|&i| (i, boundary[i])));
    for &i in &keep {
        let a_i2 = delta.get(i, x2);
        if !a_i2.is_empty() {
            iota.add_elem(i, x1, &a_i2.scaled(&p_inv));
        }
    }
    // pi: original -> reduced
    let mut pi = DMat::identity(keep.iter().map(|&i| (i, boundary[i])));
    for &j in &keep {
        let a_1j = delta.get(x1, j);
        if !a_1j.is_empty() {
            pi.add_elem(x2, j, &a_1j.scaled(&p_inv));
        }
    }
    // homotopy: H(x2) = p^-1 (x) x1
    let mut h = DMat::default();
    let mut e = Elem::new();
    e.add_term(Word::idem(boundary[x2]), p_inv);
    h.add_elem(x2, x1, &e);
    Ok((out, iota, pi, h))
}

/// Mutual pairs: states differing only in the decoration of one free
/// circle, ordered (plus member, minus member). Only pairs whose minus
/// member is still alive are usable.
fn mutual_pairs(d: &TypeDStructure<'_>, alive: &[StateId]) -> Vec<(StateId, StateId)> {
    let mut out = Vec::new();
    for &sid in alive {
        let s = &d.states[sid];
        let cs = &d.circles[sid];
        for (k, circ) in cs.circles.iter().enumerate() {
            if !circ.is_free() || s.dec[k] != Sign::Plus {
                continue;
            }
            let mut dec = s.dec.clone();
            dec[k] = Sign::Minus;
            let partner = d.state_ids[&crate::type_d::DState {
                matching: s.matching.clone(),
                mask: s.mask,
                dec,
            }];
            if alive.contains(&partner) {
                out.push((sid, partner));
                break;
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Iteratively cancel every mutual pair, leaving the structure supported on
/// states without free circles. The retraction maps are composed across
/// iterations and reduced to words of length <= 1 at the end.
pub fn reduce_free_circles<'a>(d: &'a TypeDStructure<'a>) -> Result<CancellationData<'a>, ReduceError> {
    reduce_free_circles_ordered(d, false)
}

pub fn reduce_free_circles_ordered<'a>(
    d: &'a TypeDStructure<'a>,
    reverse: bool,
) -> Result<CancellationData<'a>, ReduceError> {
    let boundary = &d.boundary;
    let mut alive: Vec<StateId> = (0..d.states.len()).collect();
    let mut delta = dmat_of(d);
    let mut iota_total = DMat::identity(alive.iter().map(|&i| (i, boundary[i])));
    let mut pi_total = iota_total.clone();
    let mut h_total = DMat::default();

    loop {
        let mut pairs = mutual_pairs(d, &alive);
        if pairs.is_empty() {
            if alive.iter().any(|&s| {
                let cs = &d.circles[s];
                cs.circles.len() != cs.n_cleaved
            }) {
                return Err(ReduceError::NeedsWordReduction(
                    "free circles remain but no mutual pair is available".into(),
                ));
            }
            break;
        }
        if reverse {
            pairs.reverse();
        }
        let (x1, x2) = pairs[0];
        let (next, iota, pi, h) = cancel(d.algebra, &delta, boundary, &alive, x1, x2)?;
        delta = next;
        alive.retain(|&s| s != x1 && s != x2);
        // composing deformation retractions:
        //   iota = iota_new then iota_old, pi = pi_old then pi_new,
        //   H = H_old + (pi_old then H_new then iota_old)
        let new_h = pi_total.then(&h).then(&iota_total);
        h_total = add_dmat(&h_total, &new_h);
        iota_total = iota.then(&iota_total);
        pi_total = pi_total.then(&pi);
    }

    // final cleanup: all words must reduce to length <= 1
    let clean = |m: &DMat| -> Result<DMat, ReduceError> {
        let mut out = DMat::default();
        for (&(i, j), e) in &m.terms {
            out.add_elem(i, j, &reduce_words(d.algebra, e)?);
        }
        Ok(out)
    };
    let delta = clean(&delta)?;
    let iota_total = clean(&iota_total)?;
    let pi_total = clean(&pi_total)?;
    let h_total = clean(&h_total)?;

    let reduced = ReducedD {
        algebra: d.algebra,
        diagram: d.diagram,
        alive: alive.clone(),
        boundary: alive.iter().map(|&i| boundary[i]).collect(),
        zeta4: alive.iter().map(|&i| d.zeta4(i)).collect(),
        labels: alive.iter().map(|&i| format!("s{i}")).collect(),
        delta,
    };
    Ok(CancellationData {
        reduced,
        iota: iota_total,
        pi: pi_total,
        homotopy: h_total,
    })
}

fn add_dmat(a: &DMat, b: &DMat) -> DMat {
    let mut out = a.clone();
    for (&(i, j), e) in &b.terms {
        out.add_elem(i, j, e);
    }
    out
}

/// The closed-form structure on the free-circle-free states: surgery and
/// decoration terms restricted from the full structure, plus idempotent
/// terms over pairs of crossings weighted by inverse free-circle weights of
/// the two intermediate resolutions.
pub fn closed_form<'a>(d: &'a TypeDStructure<'a>) -> (Vec<StateId>, DMat) {
    let alive: Vec<StateId> = (0..d.states.len())
        .filter(|&i| {
            let cs = &d.circles[i];
            cs.circles.len() == cs.n_cleaved
        })
        .collect();
    let mut m = DMat::default();
    // restricted one-step terms: targets must be alive
    for &i in &alive {
        for t in &d.delta[i] {
            if !alive.contains(&t.target) {
                continue;
            }
            let mut e = Elem::new();
            e.add_term(Word::single(d.algebra, t.gen), t.coeff.clone());
            m.add_elem(i, t.target, &e);
        }
    }
    // two-crossing idempotent terms
    let ncross = d.diagram.crossings.len();
    for &i in &alive {
        let s = &d.states[i];
        let m_rho = d.diagram.resolve(s.mask).matching;
        for c1 in 0..ncross {
            if s.mask >> c1 & 1 == 1 {
                continue;
            }
            for c2 in c1 + 1..ncross {
                if s.mask >> c2 & 1 == 1 {
                    continue;
                }
                let full = s.mask | 1 << c1 | 1 << c2;
                let resolved = d.diagram.resolve(full);
                if !resolved.free.is_empty() || resolved.matching != m_rho {
                    continue;
                }
                // same boundary decoration: cleaved circles have identical
                // point sets, so the decoration carries over unchanged
                let target = d.state_ids.get(&crate::type_d::DState {
                    matching: s.matching.clone(),
                    mask: full,
                    dec: s.dec.clone(),
                });
                let Some(&target) = target else { continue };
                if !alive.contains(&target) {
                    continue;
                }
                let mut coeff = RationalFunction::zero();
                for inter in [s.mask | 1 << c1, s.mask | 1 << c2] {
                    let ri = d.diagram.resolve(inter);
                    if let [f] = &ri.free[..] {
                        let w = d.diagram.weight_of_arcs(&f.arcs);
                        coeff = &coeff + &w.inv().expect("free circle weight is nonzero");
                    }
                }
                if coeff.is_zero() {
                    continue;
                }
                let mut e = Elem::new();
                e.add_term(Word::idem(d.boundary[i]), coeff);
                m.add_elem(i, target, &e);
            }
        }
    }
    (alive, m)
}

/// Verify the type D structure equation for a matrix-form structure.
pub fn verify_structure_mat(alg: &Algebra, alive: &[StateId], delta: &DMat) -> Report {
    let mut report = Report::default();
    for &i in alive {
        for &k in alive {
            let mut acc = Elem::new();
            for &j in alive {
                let e1 = delta.get(i, j);
                if e1.is_empty() {
                    continue;
                }
                let e2 = delta.get(j, k);
                if e2.is_empty() {
                    continue;
                }
                acc.add(&e1.mul(&e2));
            }
            for (w, c) in delta.get(i, k).terms {
                let mut d_elem = alg.d_elem(&Elem::from_word(w));
                d_elem = d_elem.scaled(&c);
                acc.add(&d_elem);
            }
            if acc.is_empty() {
                report.checked += 1;
                continue;
            }
            report.checked += 1;
            match alg.is_zero(&acc) {
                Ok(true) => {}
                Ok(false) => report
                    .failures
                    .push(format!("reduced structure equation fails on {i} -> {k}")),
                Err(e) => report.failures.push(format!("{i} -> {k}: {e}")),
            }
        }
    }
    report
}

/// Verify the type D morphism equation for psi: (A, delta_a) -> (B, delta_b).
pub fn verify_morphism_mat(
    alg: &Algebra,
    a_states: &[StateId],
    b_states: &[StateId],
    delta_a: &DMat,
    delta_b: &DMat,
    psi: &DMat,
) -> Report {
    let mut report = Report::default();
    for &i in a_states {
        for &k in b_states {
            let mut acc = Elem::new();
            for &j in b_states {
                let p = psi.get(i, j);
                if p.is_empty() {
                    continue;
                }
                let e = delta_b.get(j, k);
                if !e.is_empty() {
                    acc.add(&p.mul(&e));
                }
            }
            for &j in a_states {
                let e = delta_a.get(i, j);
                if e.is_empty() {
                    continue;
                }
                let p = psi.get(j, k);
                if !p.is_empty() {
                    acc.add(&e.mul(&p));
                }
            }
            for (w, c) in psi.get(i, k).terms {
                let d_elem = alg.d_elem(&Elem::from_word(w)).scaled(&c);
                acc.add(&d_elem);
            }
            report.checked += 1;
            if !acc.is_empty() {
                match alg.is_zero(&acc) {
                    Ok(true) => {}
                    Ok(false) => report
                        .failures
                        .push(format!("morphism equation fails on {i} -> {k}")),
                    Err(e) => report.failures.push(format!("{i} -> {k}: {e}")),
                }
            }
        }
    }
    report
}

/// Verify `psi + phi = delta_b . H + H . delta_a + d H` (a homotopy).
pub fn verify_homotopy_mat(
    alg: &Algebra,
    a_states: &[StateId],
    b_states: &[StateId],
    delta_a: &DMat,
    delta_b: &DMat,
    psi: &DMat,
    phi: &DMat,
    h: &DMat,
) -> Report {
    let mut report = Report::default();
    for &i in a_states {
        for &k in b_states {
            let mut acc = psi.get(i, k);
            acc.add(&phi.get(i, k));
            for &j in b_states {
                let hh = h.get(i, j);
                if hh.is_empty() {
                    continue;
                }
                let e = delta_b.get(j, k);
                if !e.is_empty() {
                    acc.add(&hh.mul(&e));
                }
            }
            for &j in a_states {
                let e = delta_a.get(i, j);
                if e.is_empty() {
                    continue;
                }
                let hh = h.get(j, k);
                if !hh.is_empty() {
                    acc.add(&e.mul(&hh));
                }
            }
            for (w, c) in h.get(i, k).terms {
                let d_elem = alg.d_elem(&Elem::from_word(w)).scaled(&c);
                acc.add(&d_elem);
            }
            report.checked += 1;
            if !acc.is_empty() {
                match alg.is_zero(&acc) {
                    Ok(true) => {}
                    Ok(false) => report
                        .failures
                        .push(format!("homotopy equation fails on {i} -> {k}")),
                    Err(e) => report.failures.push(format!("{i} -> {k}: {e}")),
                }
            }
        }
    }
    report
}

/// View a reduced structure for pairing: words of length one become
/// single-generator terms, the empty word the idempotent.
pub fn view_of<'a>(r: &'a ReducedD<'a>) -> DView<'a> {
    let index: BTreeMap<StateId, usize> = r
        .alive
        .iter()
        .enumerate()
        .map(|(k, &s)| (s, k))
        .collect();
    let mut terms: Vec<Vec<(RationalFunction, crate::cleaved::GenId, usize)>> =
        vec![Vec::new(); r.alive.len()];
    for (&(i, j), e) in &r.delta.terms {
        for (w, c) in &e.terms {
            let gen = if w.is_empty() {
                r.algebra
                    .gens_from(w.source)
                    .into_iter()
                    .find(|&g| r.algebra.generator(g).kind == GenKind::Idempotent)
                    .unwrap()
            } else {
                debug_assert_eq!(w.len(), 1);
                w.gens[0]
            };
            terms[index[&i]].push((c.clone(), gen, index[&j]));
        }
    }
    DView {
        algebra: r.algebra,
        registry: &r.diagram.registry,
        boundary: r.boundary.clone(),
        zeta4: r.zeta4.clone(),
        terms,
        labels: r.labels.clone(),
    }
}
