//! Weight-move isomorphisms of type D structures: moving the weight of an
//! arc across a crossing produces an isomorphic structure, realized by the
//! identity-plus-correction morphisms in both directions.

use num_traits::One;

use crate::cleaved::{Algebra, Elem, Word};
use crate::diagram::{induced_class, site_surgery, TangleDiagram};
use crate::field::RationalFunction;
use crate::planar::Side;
use crate::reduce::{dmat_of, verify_morphism_mat, DMat};
use crate::type_d::{build_delta, frobenius_components, DState, Report, TypeDStructure};

/// A weight move: the same diagram combinatorics with the weight `w`
/// redistributed between two arcs across crossing `c`. The two diagrams
/// share state sets.
pub struct WeightMove {
    pub crossing: usize,
    pub w: RationalFunction,
    pub source: TangleDiagram,
    pub target: TangleDiagram,
    /// Which pair of the four crossing ports exchanged the weight.
    pub route: MoveRoute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveRoute {
    /// Along the strand entering at the lower left and leaving at the upper
    /// right.
    LowerStrand,
    /// Along the strand entering at the upper left and leaving at the lower
    /// right.
    UpperStrand,
}

/// Move the full weight of an incoming arc at `crossing` across the
/// crossing, following its strand.
pub fn make_move(diagram: &TangleDiagram, crossing: usize, route: MoveRoute) -> WeightMove {
    let resolved = diagram.resolve(0);
    let ports = resolved.port_arcs[crossing];
    let (from_arc, to_arc) = match route {
        MoveRoute::LowerStrand => (ports[0], ports[3]),
        MoveRoute::UpperStrand => (ports[1], ports[2]),
    };
    let w = diagram.arc_weight(from_arc).clone();
    let mut target = diagram.clone();
    target.arc_weights[from_arc] = &target.arc_weights[from_arc] + &w;
    target.arc_weights[to_arc] = &target.arc_weights[to_arc] + &w;
    WeightMove {
        crossing,
        w,
        source: diagram.clone(),
        target,
        route,
    }
}

/// The correction map: zero on states where the crossing is 0-resolved; on
/// states where it is 1-resolved, the sum of components of the downward
/// surgery at the crossing, with the connecting algebra element (an
/// idempotent, a right decoration element, or a right bridge element).
pub fn build_dc<'b>(d: &'b TypeDStructure<'_>) -> impl Fn(usize) -> DMat + 'b {
    move |crossing: usize| {
        let mut m = DMat::default();
        for (sid, s) in d.states.iter().enumerate() {
            if s.mask >> crossing & 1 == 0 {
                continue;
            }
            let surg = site_surgery(d.diagram, s.mask, crossing, &s.matching);
            let b = d.boundary[sid];
            for (dec_after, flip) in frobenius_components(&surg, &s.dec) {
                let t = d.state_ids[&DState {
                    matching: s.matching.clone(),
                    mask: surg.new_mask,
                    dec: dec_after,
                }];
                let tb = d.boundary[t];
                let gen = if surg.matching_changed {
                    let before = d.diagram.resolve(s.mask).matching;
                    let class = induced_class(&before, &surg.new_matching);
                    d.algebra
                        .bridge_gen(b, Side::Right, &class, tb)
                        .expect("right bridge generator for the downward surgery")
                } else if let Some(circle) = flip {
                    d.algebra
                        .dec_gen(b, Side::Right, circle)
                        .expect("right decoration generator")
                } else {
                    d.algebra
                        .gens_from(b)
                        .into_iter()
                        .find(|&g| {
                            d.algebra.generator(g).kind == crate::cleaved::GenKind::Idempotent
                        })
                        .unwrap()
                };
                let mut e = Elem::new();
                e.add_term(Word::single(d.algebra, gen), RationalFunction::one());
                m.add_elem(sid, t, &e);
            }
        }
        m
    }
}

pub struct MoveMorphisms<'a> {
    pub d_source: TypeDStructure<'a>,
    pub d_target: TypeDStructure<'a>,
    pub psi: DMat,
    pub phi: DMat,
}

/// Identity plus `w` times the correction, in each direction. Both type D
/// structures share the state set, so the matrices act on one index space.
pub fn build_psi_phi<'a>(mv: &'a WeightMove, algebra: &'a Algebra) -> MoveMorphisms<'a> {
    let d_source = build_delta(&mv.source, algebra);
    let d_target = build_delta(&mv.target, algebra);
    let identity = DMat::identity((0..d_source.states.len()).map(|i| (i, d_source.boundary[i])));
    let dc = build_dc(&d_source)(mv.crossing);
    let mut psi = identity.clone();
    for (&(i, j), e) in dc.rows() {
        psi.add_elem(i, j, &e.scaled(&mv.w));
    }
    // the reverse correction is the same map on the shared state set
    let mut phi = identity;
    for (&(i, j), e) in dc.rows() {
        phi.add_elem(i, j, &e.scaled(&mv.w));
    }
    MoveMorphisms {
        d_source,
        d_target,
        psi,
        phi,
    }
}

pub fn verify_move(mv: &WeightMove, algebra: &Algebra) -> (Report, Report, bool) {
    let m = build_psi_phi(mv, algebra);
    let states: Vec<usize> = (0..m.d_source.states.len()).collect();
    let delta_s = dmat_of(&m.d_source);
    let delta_t = dmat_of(&m.d_target);
    let r_psi = verify_morphism_mat(algebra, &states, &states, &delta_s, &delta_t, &m.psi);
    let r_phi = verify_morphism_mat(algebra, &states, &states, &delta_t, &delta_s, &m.phi);
    let comp1 = m.psi.then(&m.phi);
    let comp2 = m.phi.then(&m.psi);
    let identity = DMat::identity(states.iter().map(|&i| (i, m.d_source.boundary[i])));
    let ident_ok = dmat_eq(&comp1, &identity) && dmat_eq(&comp2, &identity);
    (r_psi, r_phi, ident_ok)
}

pub fn dmat_eq(a: &DMat, b: &DMat) -> bool {
    let keys: std::collections::BTreeSet<(usize, usize)> = a
        .terms
        .keys()
        .chain(b.terms.keys())
        .copied()
        .collect();
    for k in keys {
        let mut e = a.get(k.0, k.1);
        e.add(&b.get(k.0, k.1));
        if !e.is_empty() {
            return false;
        }
    }
    true
}

/// Build a move at `crossing`, trying both redistributions; return the one
/// whose morphisms verify, with its reports.
pub fn working_move(
    diagram: &TangleDiagram,
    crossing: usize,
    algebra: &Algebra,
) -> Option<(WeightMove, Report, Report, bool)> {
    for route in [MoveRoute::LowerStrand, MoveRoute::UpperStrand] {
        let mv = make_move(diagram, crossing, route);
        let (r1, r2, ident) = verify_move(&mv, algebra);
        if r1.pass() && r2.pass() && ident {
            return Some((mv, r1, r2, ident));
        }
    }
    None
}
