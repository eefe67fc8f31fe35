//! The twisted type A structure on the state complex of a left tangle: the
//! differential (surgery part plus vertical part), the right action of the
//! cleaved algebra with the twisted left-decoration rule, word actions, and
//! verification of the module relations.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cleaved::{Algebra, Elem, GenId, GenKind, LinkId, Sign};
use crate::diagram::{
    combine, induced_class, site_surgery, state_grading, zeta_string, CircleSet, Grading,
    TangleDiagram,
};
use crate::field::RationalFunction;
use crate::planar::{enumerate_matchings, PlanarMatching, Side};
use crate::type_d::{boundary_link, frobenius_components, Report};

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AState {
    pub mask: u32,
    pub matching: PlanarMatching,
    pub dec: Vec<Sign>,
}

/// A field-linear combination of states.
pub type StateVec = HashMap<StateId, RationalFunction>;

pub fn add_state(v: &mut StateVec, s: StateId, c: RationalFunction) {
    if c.is_zero() {
        return;
    }
    use std::collections::hash_map::Entry;
    match v.entry(s) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut o) => {
            let sum = o.get() + &c;
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

pub fn add_scaled(v: &mut StateVec, other: &StateVec, c: &RationalFunction) {
    for (&s, k) in other {
        add_state(v, s, k * c);
    }
}

pub struct TypeAStructure<'a> {
    pub diagram: &'a TangleDiagram,
    pub algebra: &'a Algebra,
    pub states: Vec<AState>,
    pub state_ids: HashMap<AState, StateId>,
    pub circles: Vec<CircleSet>,
    pub boundary: Vec<LinkId>,
    pub grading: Vec<Grading>,
    pub m1: Vec<StateVec>,
}

pub fn build_states(diagram: &TangleDiagram) -> Vec<AState> {
    assert_eq!(diagram.side, Side::Left, "type A structures live on left tangles");
    let mut out = Vec::new();
    for matching in enumerate_matchings(diagram.n) {
        for mask in 0..(1u32 << diagram.crossings.len()) {
            let resolved = diagram.resolve(mask);
            let circles = combine(&resolved, &matching);
            let k = circles.circles.len();
            for bits in 0..(1u32 << k) {
                let dec: Vec<Sign> = (0..k)
                    .map(|i| {
                        if bits >> i & 1 == 1 {
                            Sign::Plus
                        } else {
                            Sign::Minus
                        }
                    })
                    .collect();
                if dec[circles.marked] == Sign::Plus {
                    continue;
                }
                out.push(AState {
                    mask,
                    matching: matching.clone(),
                    dec,
                });
            }
        }
    }
    out
}

pub fn build<'a>(diagram: &'a TangleDiagram, algebra: &'a Algebra) -> TypeAStructure<'a> {
    let states = build_states(diagram);
    let state_ids: HashMap<AState, StateId> = states
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let mut circles = Vec::with_capacity(states.len());
    let mut boundary = Vec::with_capacity(states.len());
    let mut grading = Vec::with_capacity(states.len());
    for s in &states {
        let resolved = diagram.resolve(s.mask);
        let cs = combine(&resolved, &s.matching);
        let b = boundary_link(
            algebra,
            &cs,
            Side::Left,
            &resolved.matching,
            &s.matching,
            &s.dec,
        );
        let link = algebra.link(b);
        let free_plus = cs.circles[cs.n_cleaved..]
            .iter()
            .zip(&s.dec[cs.n_cleaved..])
            .filter(|&(_, &d)| d == Sign::Plus)
            .count() as i32;
        let free_minus = (cs.circles.len() - cs.n_cleaved) as i32 - free_plus;
        grading.push(state_grading(
            s.mask.count_ones() as i32,
            link.i_grading(),
            free_plus,
            free_minus,
            diagram.n_plus() as i32,
            diagram.n_minus() as i32,
        ));
        circles.push(cs);
        boundary.push(b);
    }
    let mut a = TypeAStructure {
        diagram,
        algebra,
        states,
        state_ids,
        circles,
        boundary,
        grading,
        m1: Vec::new(),
    };
    a.m1 = (0..a.states.len()).map(|i| a.build_m1_at(i)).collect();
    a
}

impl<'a> TypeAStructure<'a> {
    pub fn zeta4(&self, id: StateId) -> i32 {
        self.grading[id].zeta4()
    }

    fn id_of(&self, s: &AState) -> StateId {
        *self.state_ids.get(s).unwrap_or_else(|| panic!("unknown state {s:?}"))
    }

    /// The differential: boundary-preserving surgery components plus the
    /// weighted flips of + free circles.
    fn build_m1_at(&self, sid: StateId) -> StateVec {
        let s = &self.states[sid];
        let cs = &self.circles[sid];
        let mut out = StateVec::new();
        // vertical part
        for (i, c) in cs.circles.iter().enumerate() {
            if !c.is_free() || s.dec[i] != Sign::Plus {
                continue;
            }
            let w = self.diagram.weight_of_arcs(&c.arcs);
            if w.is_zero() {
                continue;
            }
            let mut dec = s.dec.clone();
            dec[i] = Sign::Minus;
            let t = self.id_of(&AState {
                mask: s.mask,
                matching: s.matching.clone(),
                dec,
            });
            add_state(&mut out, t, w);
        }
        // boundary-preserving surgery components
        for c in 0..self.diagram.crossings.len() {
            if s.mask >> c & 1 == 1 {
                continue;
            }
            let surg = site_surgery(self.diagram, s.mask, c, &s.matching);
            if surg.matching_changed {
                continue;
            }
            for (dec_after, flip) in frobenius_components(&surg, &s.dec) {
                if flip.is_some() {
                    continue; // decoration-type components belong to the action
                }
                let t = self.id_of(&AState {
                    mask: surg.new_mask,
                    matching: s.matching.clone(),
                    dec: dec_after,
                });
                add_state(&mut out, t, RationalFunction::one());
            }
        }
        out
    }

    pub fn m1(&self, v: &StateVec) -> StateVec {
        let mut out = StateVec::new();
        for (&s, c) in v {
            add_scaled(&mut out, &self.m1[s], c);
        }
        out
    }

    /// Action of a single algebra generator on a state.
    pub fn act_generator(&self, sid: StateId, g: GenId) -> StateVec {
        let gen = self.algebra.generator(g);
        let mut out = StateVec::new();
        if gen.source != self.boundary[sid] {
            return out;
        }
        let s = &self.states[sid];
        let cs = &self.circles[sid];
        match gen.kind {
            GenKind::Idempotent => {
                add_state(&mut out, sid, RationalFunction::one());
            }
            GenKind::Dec {
                side: Side::Right,
                circle,
            } => {
                // bare flip of the cleaved circle
                let mut dec = s.dec.clone();
                debug_assert_eq!(dec[circle], Sign::Plus);
                dec[circle] = Sign::Minus;
                let t = self.id_of(&AState {
                    mask: s.mask,
                    matching: s.matching.clone(),
                    dec,
                });
                add_state(&mut out, t, RationalFunction::one());
            }
            GenKind::Dec {
                side: Side::Left,
                circle,
            } => {
                // untwisted part: decoration-type surgeries flipping this
                // circle with the matching preserved
                for c in 0..self.diagram.crossings.len() {
                    if s.mask >> c & 1 == 1 {
                        continue;
                    }
                    let surg = site_surgery(self.diagram, s.mask, c, &s.matching);
                    if surg.matching_changed {
                        continue;
                    }
                    for (dec_after, flip) in frobenius_components(&surg, &s.dec) {
                        if flip != Some(circle) {
                            continue;
                        }
                        let t = self.id_of(&AState {
                            mask: surg.new_mask,
                            matching: s.matching.clone(),
                            dec: dec_after,
                        });
                        add_state(&mut out, t, RationalFunction::one());
                    }
                }
                // twisted correction: the diagram-side weight of the circle
                // times the bare flip
                let w = self.diagram.weight_of_arcs(&cs.circles[circle].arcs);
                if !w.is_zero() {
                    let mut dec = s.dec.clone();
                    dec[circle] = Sign::Minus;
                    let t = self.id_of(&AState {
                        mask: s.mask,
                        matching: s.matching.clone(),
                        dec,
                    });
                    add_state(&mut out, t, w);
                }
            }
            GenKind::Bridge {
                side: Side::Right,
                class,
            } => {
                // abstract surgery of the right matching; cleaved circles
                // take the target decorations, free circles persist
                let (new_matching, _) = s.matching.surger(&class);
                let resolved = self.diagram.resolve(s.mask);
                let new_cs = combine(&resolved, &new_matching);
                let tl = self.algebra.link(gen.target);
                let mut dec = vec![None; new_cs.circles.len()];
                for (j, circ) in new_cs.circles.iter().enumerate() {
                    if circ.is_free() {
                        let old = cs
                            .circles
                            .iter()
                            .position(|c| c.is_free() && c.arcs == circ.arcs)
                            .expect("free circle persists");
                        dec[j] = Some(s.dec[old]);
                    } else {
                        let k = tl
                            .circles
                            .iter()
                            .position(|pts| pts == &circ.points)
                            .expect("cleaved circle in target link");
                        dec[j] = Some(tl.dec[k]);
                    }
                }
                let dec: Vec<Sign> = dec.into_iter().map(|d| d.unwrap()).collect();
                let t = self.id_of(&AState {
                    mask: s.mask,
                    matching: new_matching,
                    dec,
                });
                add_state(&mut out, t, RationalFunction::one());
            }
            GenKind::Bridge {
                side: Side::Left,
                class,
            } => {
                // surgeries of the left resolution whose induced boundary
                // class is this one and which realize the target decoration
                for c in 0..self.diagram.crossings.len() {
                    if s.mask >> c & 1 == 1 {
                        continue;
                    }
                    let surg = site_surgery(self.diagram, s.mask, c, &s.matching);
                    if !surg.matching_changed {
                        continue;
                    }
                    let before = self.diagram.resolve(s.mask).matching;
                    if induced_class(&before, &surg.new_matching) != class {
                        continue;
                    }
                    for (dec_after, _) in frobenius_components(&surg, &s.dec) {
                        // the cleaved decorations must match the generator's
                        // target exactly
                        let t = self.id_of(&AState {
                            mask: surg.new_mask,
                            matching: s.matching.clone(),
                            dec: dec_after.clone(),
                        });
                        let tb = self.boundary[t];
                        if tb != gen.target {
                            continue;
                        }
                        add_state(&mut out, t, RationalFunction::one());
                    }
                }
            }
        }
        out
    }

    pub fn act_vec(&self, v: &StateVec, g: GenId) -> StateVec {
        let mut out = StateVec::new();
        for (&s, c) in v {
            let a = self.act_generator(s, g);
            add_scaled(&mut out, &a, c);
        }
        out
    }

    /// Action of an algebra element whose words have length <= 2, by
    /// left-to-right composition of generator actions.
    pub fn act_elem(&self, sid: StateId, e: &Elem) -> StateVec {
        let mut out = StateVec::new();
        for (w, c) in &e.terms {
            assert!(w.len() <= 2, "action of a word of length {}", w.len());
            let mut v = StateVec::new();
            if w.is_empty() {
                // idempotent word: projection
                if self.boundary[sid] == w.source {
                    add_state(&mut v, sid, RationalFunction::one());
                }
            } else {
                v = self.act_generator(sid, w.gens[0]);
                for &g in &w.gens[1..] {
                    v = self.act_vec(&v, g);
                }
            }
            add_scaled(&mut out, &v, c);
        }
        out
    }
}

/// The module relations: the differential squares to zero; the mixed
/// relation with the algebra differential holds for every generator; the
/// action kills every relation instance.
pub fn verify_ainf(a: &TypeAStructure<'_>) -> Report {
    let mut report = Report::default();
    // m1 squared
    for sid in 0..a.states.len() {
        report.checked += 1;
        let sq = a.m1(&a.m1[sid]);
        if !sq.is_empty() {
            report.failures.push(format!("m1^2 != 0 at state {sid}"));
        }
    }
    // mixed relation per generator
    for sid in 0..a.states.len() {
        let b = a.boundary[sid];
        for g in a.algebra.gens_from(b) {
            report.checked += 1;
            let mut total = a.m1(&a.act_generator(sid, g));
            let first = a.act_vec(&a.m1[sid], g);
            add_scaled(&mut total, &first, &RationalFunction::one());
            let dg = a.algebra.d_gamma(g);
            if !dg.is_empty() {
                let second = a.act_elem(sid, &dg);
                add_scaled(&mut total, &second, &RationalFunction::one());
            }
            if !total.is_empty() {
                report.failures.push(format!(
                    "module relation fails at state {sid} with {}",
                    crate::cleaved::describe_kind(&a.algebra.generator(g).kind)
                ));
            }
        }
    }
    // relation instances act by zero
    for sid in 0..a.states.len() {
        let b = a.boundary[sid];
        for rel in a.algebra.relations_from(b) {
            report.checked += 1;
            let v = a.act_elem(sid, &rel);
            if !v.is_empty() {
                report
                    .failures
                    .push(format!("relation instance acts nontrivially at state {sid}"));
            }
        }
    }
    // per-kind zeta shift is constant
    let mut shifts: BTreeMap<String, i32> = BTreeMap::new();
    for sid in 0..a.states.len() {
        let b = a.boundary[sid];
        for g in a.algebra.gens_from(b) {
            let kind = kind_tag(&a.algebra.generator(g).kind);
            for (&t, _) in &a.act_generator(sid, g) {
                report.checked += 1;
                let shift = a.zeta4(t) - a.zeta4(sid);
                match shifts.get(&kind) {
                    None => {
                        shifts.insert(kind.clone(), shift);
                    }
                    Some(&s) if s == shift => {}
                    Some(&s) => report.failures.push(format!(
                        "zeta shift of {kind} is {} at state {sid}, elsewhere {}",
                        zeta_string(shift),
                        zeta_string(s)
                    )),
                }
            }
        }
    }
    report
}

fn kind_tag(k: &GenKind) -> String {
    match k {
        GenKind::Idempotent => "idempotent".into(),
        GenKind::Dec { side, .. } => format!("{side} decoration"),
        GenKind::Bridge { side, .. } => format!("{side} bridge"),
    }
}

/// JSON dump of the action tables.
#[derive(Serialize)]
pub struct AStructureDump {
    pub states: Vec<AStateDump>,
}

#[derive(Serialize)]
pub struct AStateDump {
    pub id: StateId,
    pub matching: String,
    pub mask: u32,
    pub dec: Vec<Sign>,
    pub zeta: String,
    pub m1: Vec<(StateId, String)>,
    pub actions: Vec<ActionDump>,
}

#[derive(Serialize)]
pub struct ActionDump {
    pub generator: String,
    pub outputs: Vec<(StateId, String)>,
}

pub fn dump(a: &TypeAStructure<'_>) -> AStructureDump {
    let fmt_vec = |v: &StateVec| -> Vec<(StateId, String)> {
        let mut items: Vec<_> = v
            .iter()
            .map(|(&s, c)| (s, c.display(&a.diagram.registry).to_string()))
            .collect();
        items.sort();
        items
    };
    AStructureDump {
        states: (0..a.states.len())
            .map(|i| AStateDump {
                id: i,
                matching: a.states[i].matching.to_string(),
                mask: a.states[i].mask,
                dec: a.states[i].dec.clone(),
                zeta: zeta_string(a.zeta4(i)),
                m1: fmt_vec(&a.m1[i]),
                actions: a
                    .algebra
                    .gens_from(a.boundary[i])
                    .into_iter()
                    .filter(|&g| a.algebra.generator(g).kind != GenKind::Idempotent)
                    .filter_map(|g| {
                        let out = a.act_generator(i, g);
                        if out.is_empty() {
                            return None;
                        }
                        Some(ActionDump {
                            generator: crate::cleaved::describe_kind(&a.algebra.generator(g).kind),
                            outputs: fmt_vec(&out),
                        })
                    })
                    .collect(),
            })
            .collect(),
    }
}
