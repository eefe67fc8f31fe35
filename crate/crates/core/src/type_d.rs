//! The twisted type D structure on the state complex of a right tangle:
//! states, the vertical differential, the surgery differential, their sum,
//! verification of the structure equation and grading, and transport along
//! field substitutions.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cleaved::{Algebra, Elem, GenId, GenKind, LinkId, Sign, Word};
use crate::diagram::{
    combine, induced_class, site_surgery, state_grading, zeta_string, CircleSet, Grading,
    TangleDiagram,
};
use crate::field::{FieldError, RationalFunction, Substitution};
use crate::planar::{enumerate_matchings, PlanarMatching, Side};

pub type StateId = usize;

/// A state of the right-tangle complex: an opposite-side planar matching, a
/// resolution, and a decoration of the resulting circles with the marked
/// circle minus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DState {
    pub matching: PlanarMatching,
    pub mask: u32,
    pub dec: Vec<Sign>,
}

/// One term of a type D map: coefficient * generator tensor target state.
/// The generator is a single algebra generator (words of length <= 1).
#[derive(Debug, Clone)]
pub struct DTerm {
    pub coeff: RationalFunction,
    pub gen: GenId,
    pub target: StateId,
}

pub struct TypeDStructure<'a> {
    pub diagram: &'a TangleDiagram,
    pub algebra: &'a Algebra,
    pub states: Vec<DState>,
    pub state_ids: HashMap<DState, StateId>,
    pub circles: Vec<CircleSet>,
    pub boundary: Vec<LinkId>,
    pub grading: Vec<Grading>,
    pub delta: Vec<Vec<DTerm>>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub failures: Vec<String>,
    pub checked: usize,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Decoration of the boundary cleaved link induced by a state decoration.
pub fn boundary_link(alg: &Algebra, circles: &CircleSet, matching_side: Side, diagram_matching: &PlanarMatching, opposite: &PlanarMatching, dec: &[Sign]) -> LinkId {
    // cleaved circles come first in `circles`
    let bdec: Vec<Sign> = dec[..circles.n_cleaved].to_vec();
    let (left, right) = match matching_side {
        Side::Right => (opposite.clone(), diagram_matching.clone()),
        Side::Left => (diagram_matching.clone(), opposite.clone()),
    };
    alg.intern_link(&left, &right, bdec)
}

impl<'a> TypeDStructure<'a> {
    pub fn state(&self, id: StateId) -> &DState {
        &self.states[id]
    }

    pub fn zeta4(&self, id: StateId) -> i32 {
        self.grading[id].zeta4()
    }

    /// The algebra element carried by delta from `source` to `target`.
    pub fn elem_between(&self, source: StateId, target: StateId) -> Elem {
        let mut e = Elem::new();
        for t in &self.delta[source] {
            if t.target == target {
                e.add_term(Word::single(self.algebra, t.gen), t.coeff.clone());
            }
        }
        e
    }

    pub fn term_count(&self) -> usize {
        self.delta.iter().map(|d| d.len()).sum()
    }
}

/// Enumerate all states of the right tangle.
pub fn build_states(diagram: &TangleDiagram) -> Vec<DState> {
    assert_eq!(diagram.side, Side::Right, "type D structures live on right tangles");
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
                out.push(DState {
                    matching: matching.clone(),
                    mask,
                    dec,
                });
            }
        }
    }
    out
}

struct Builder<'a> {
    diagram: &'a TangleDiagram,
    algebra: &'a Algebra,
    states: Vec<DState>,
    state_ids: HashMap<DState, StateId>,
    circles: Vec<CircleSet>,
    boundary: Vec<LinkId>,
    grading: Vec<Grading>,
}

impl<'a> Builder<'a> {
    fn new(diagram: &'a TangleDiagram, algebra: &'a Algebra) -> Self {
        let states = build_states(diagram);
        let state_ids: HashMap<DState, StateId> = states
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
                Side::Right,
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
        Builder {
            diagram,
            algebra,
            states,
            state_ids,
            circles,
            boundary,
            grading,
        }
    }

    fn id_of(&self, s: &DState) -> StateId {
        *self.state_ids.get(s).unwrap_or_else(|| panic!("unknown state {s:?}"))
    }

    /// Vertical terms: flip a + free circle with its weight (idempotent
    /// coefficient), or a + cleaved circle with its diagram-side weight and
    /// a right decoration coefficient.
    fn delta_v(&self, sid: StateId) -> Vec<DTerm> {
        let s = &self.states[sid];
        let cs = &self.circles[sid];
        let b = self.boundary[sid];
        let mut out = Vec::new();
        for (i, c) in cs.circles.iter().enumerate() {
            if s.dec[i] != Sign::Plus {
                continue;
            }
            let w = self.diagram.weight_of_arcs(&c.arcs);
            if w.is_zero() {
                // a weight can vanish after weight moves; the term drops
                continue;
            }
            let mut dec = s.dec.clone();
            dec[i] = Sign::Minus;
            let t = self.id_of(&DState {
                matching: s.matching.clone(),
                mask: s.mask,
                dec,
            });
            let gen = if c.is_free() {
                self.idem(b)
            } else {
                self.algebra
                    .dec_gen(b, Side::Right, i)
                    .expect("right decoration generator")
            };
            out.push(DTerm {
                coeff: w,
                gen,
                target: t,
            });
        }
        out
    }

    fn idem(&self, link: LinkId) -> GenId {
        self.algebra
            .gens_from(link)
            .into_iter()
            .find(|&g| self.algebra.generator(g).kind == GenKind::Idempotent)
            .unwrap()
    }

    /// Surgery terms: boundary-preserving components with idempotent
    /// coefficient, decoration-flipping components with a right decoration
    /// coefficient, matching-changing components with the induced right
    /// bridge element, and left-bridge terms surgering the opposite matching;
    /// plus the left decoration term on every + cleaved circle.
    fn delta_surgery(&self, sid: StateId) -> Vec<DTerm> {
        let s = &self.states[sid];
        let b = self.boundary[sid];
        let mut out = Vec::new();

        // active resolution-bridge surgeries (0 -> 1)
        for c in 0..self.diagram.crossings.len() {
            if s.mask >> c & 1 == 1 {
                continue;
            }
            let surg = site_surgery(self.diagram, s.mask, c, &s.matching);
            for (dec_after, flip_info) in frobenius_components(&surg, &s.dec) {
                let t = self.id_of(&DState {
                    matching: s.matching.clone(),
                    mask: surg.new_mask,
                    dec: dec_after.clone(),
                });
                let tb = self.boundary[t];
                let gen = if surg.matching_changed {
                    let before = self.diagram.resolve(s.mask).matching;
                    let class = induced_class(&before, &surg.new_matching);
                    self.algebra
                        .bridge_gen(b, Side::Right, &class, tb)
                        .expect("induced right bridge generator")
                } else {
                    match flip_info {
                        Some(circle) => self
                            .algebra
                            .dec_gen(b, Side::Right, circle)
                            .expect("right decoration generator"),
                        None => self.idem(b),
                    }
                };
                out.push(DTerm {
                    coeff: RationalFunction::one(),
                    gen,
                    target: t,
                });
            }
        }

        // left bridges of the boundary act on the opposite matching
        let link = self.algebra.link(b);
        for class in link.left.bridge_classes() {
            let (new_matching, _) = link.left.surger(&class);
            let resolved = self.diagram.resolve(s.mask);
            let new_cs = combine(&resolved, &new_matching);
            // transfer decorations: free circles persist (same arcs);
            // cleaved circles take every Frobenius-compatible decoration
            let cs = &self.circles[sid];
            for tlink in bridge_images(self.algebra, b, Side::Left, &class) {
                let tl = self.algebra.link(tlink);
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
                let t = self.id_of(&DState {
                    matching: new_matching.clone(),
                    mask: s.mask,
                    dec,
                });
                let gen = self
                    .algebra
                    .bridge_gen(b, Side::Left, &class, tlink)
                    .expect("left bridge generator");
                out.push(DTerm {
                    coeff: RationalFunction::one(),
                    gen,
                    target: t,
                });
            }
        }

        // left decoration terms on + cleaved circles
        let cs = &self.circles[sid];
        for i in 0..cs.n_cleaved {
            if s.dec[i] != Sign::Plus {
                continue;
            }
            let mut dec = s.dec.clone();
            dec[i] = Sign::Minus;
            let t = self.id_of(&DState {
                matching: s.matching.clone(),
                mask: s.mask,
                dec,
            });
            let gen = self
                .algebra
                .dec_gen(b, Side::Left, i)
                .expect("left decoration generator");
            out.push(DTerm {
                coeff: RationalFunction::one(),
                gen,
                target: t,
            });
        }
        out
    }
}

/// Frobenius components of a surgery applied to a state decoration: each
/// output is the target decoration vector plus, when the component flips a
/// cleaved circle with the matching preserved, the index of that boundary
/// circle.
pub fn frobenius_components(
    surg: &crate::diagram::SiteSurgery,
    dec: &[Sign],
) -> Vec<(Vec<Sign>, Option<usize>)> {
    let mut base: Vec<Option<Sign>> = vec![None; surg.after.circles.len()];
    for (&i, &j) in &surg.untouched {
        base[j] = Some(dec[i]);
    }
    let mut out = Vec::new();
    if surg.sources.len() == 2 {
        let (sa, sb) = (surg.sources[0], surg.sources[1]);
        let t = surg.targets[0];
        let merged = match (dec[sa], dec[sb]) {
            (Sign::Plus, Sign::Plus) => Some(Sign::Plus),
            (Sign::Plus, Sign::Minus) | (Sign::Minus, Sign::Plus) => Some(Sign::Minus),
            (Sign::Minus, Sign::Minus) => None,
        };
        if let Some(m) = merged {
            let mut d = base.clone();
            d[t] = Some(m);
            let dec_after: Vec<Sign> = d.into_iter().map(|x| x.unwrap()).collect();
            if valid_marked(surg, &dec_after) {
                // a flip happens when a + cleaved circle merges into a -
                let flip = if !surg.matching_changed {
                    let pa = !surg.before.circles[sa].is_free();
                    let pb = !surg.before.circles[sb].is_free();
                    if pa && dec[sa] == Sign::Plus && m == Sign::Minus {
                        Some(cleaved_index(&surg.before, sa))
                    } else if pb && dec[sb] == Sign::Plus && m == Sign::Minus {
                        Some(cleaved_index(&surg.before, sb))
                    } else {
                        None
                    }
                } else {
                    None
                };
                out.push((dec_after, flip));
            }
        }
    } else {
        let s = surg.sources[0];
        let (ta, tb) = (surg.targets[0], surg.targets[1]);
        let options: Vec<(Sign, Sign)> = match dec[s] {
            Sign::Plus => vec![(Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus)],
            Sign::Minus => vec![(Sign::Minus, Sign::Minus)],
        };
        for (da, db) in options {
            let mut d = base.clone();
            d[ta] = Some(da);
            d[tb] = Some(db);
            let dec_after: Vec<Sign> = d.into_iter().map(|x| x.unwrap()).collect();
            if !valid_marked(surg, &dec_after) {
                continue;
            }
            let flip = if !surg.matching_changed && dec[s] == Sign::Plus
                && !surg.before.circles[s].is_free()
            {
                // the cleaved part keeps the points; it flips when it is -
                let cleaved_target = if surg.after.circles[ta].is_free() { tb } else { ta };
                let cleaved_sign = if cleaved_target == ta { da } else { db };
                if cleaved_sign == Sign::Minus {
                    Some(cleaved_index(&surg.before, s))
                } else {
                    None
                }
            } else {
                None
            };
            out.push((dec_after, flip));
        }
    }
    out
}

fn cleaved_index(cs: &CircleSet, circle: usize) -> usize {
    debug_assert!(circle < cs.n_cleaved);
    circle
}

fn valid_marked(surg: &crate::diagram::SiteSurgery, dec: &[Sign]) -> bool {
    dec[surg.after.marked] == Sign::Minus
}

/// Target links of a boundary bridge generator, from the algebra catalog.
fn bridge_images(
    alg: &Algebra,
    link: LinkId,
    side: Side,
    class: &crate::planar::BridgeClass,
) -> Vec<LinkId> {
    alg.gens_from(link)
        .into_iter()
        .filter_map(|g| {
            let gen = alg.generator(g);
            match gen.kind {
                GenKind::Bridge { side: s, class: c } if s == side && c == *class => {
                    Some(gen.target)
                }
                _ => None,
            }
        })
        .collect()
}

/// The vertical structure alone.
pub fn build_delta_v<'a>(diagram: &'a TangleDiagram, algebra: &'a Algebra) -> TypeDStructure<'a> {
    let b = Builder::new(diagram, algebra);
    let delta = (0..b.states.len()).map(|i| b.delta_v(i)).collect();
    finish(b, delta)
}

/// The surgery structure alone.
pub fn build_delta_t<'a>(diagram: &'a TangleDiagram, algebra: &'a Algebra) -> TypeDStructure<'a> {
    let b = Builder::new(diagram, algebra);
    let delta = (0..b.states.len()).map(|i| b.delta_surgery(i)).collect();
    finish(b, delta)
}

/// The total twisted structure: surgery plus vertical terms.
pub fn build_delta<'a>(diagram: &'a TangleDiagram, algebra: &'a Algebra) -> TypeDStructure<'a> {
    let b = Builder::new(diagram, algebra);
    let delta = (0..b.states.len())
        .map(|i| {
            let mut d = b.delta_surgery(i);
            d.extend(b.delta_v(i));
            d
        })
        .collect();
    finish(b, delta)
}

fn finish(b: Builder<'_>, delta: Vec<Vec<DTerm>>) -> TypeDStructure<'_> {
    TypeDStructure {
        diagram: b.diagram,
        algebra: b.algebra,
        states: b.states,
        state_ids: b.state_ids,
        circles: b.circles,
        boundary: b.boundary,
        grading: b.grading,
        delta,
    }
}

/// Check the structure equation: for every source and reachable target, the
/// sum of two-step coefficient products plus the differential applied to
/// one-step coefficients vanishes in the algebra.
pub fn verify_structure(d: &TypeDStructure<'_>) -> Report {
    let mut report = Report::default();
    for source in 0..d.states.len() {
        let mut blocks: BTreeMap<StateId, Elem> = BTreeMap::new();
        for t1 in &d.delta[source] {
            // d_gamma of the coefficient
            let dg = d.algebra.d_gamma(t1.gen);
            if !dg.is_empty() {
                blocks
                    .entry(t1.target)
                    .or_default()
                    .add(&dg.scaled(&t1.coeff));
            }
            for t2 in &d.delta[t1.target] {
                let w = Word::single(d.algebra, t1.gen)
                    .concat(&Word::single(d.algebra, t2.gen))
                    .expect("delta terms compose");
                blocks
                    .entry(t2.target)
                    .or_default()
                    .add_term(w, &t1.coeff * &t2.coeff);
            }
        }
        for (target, elem) in blocks {
            report.checked += 1;
            match d.algebra.is_zero(&elem) {
                Ok(true) => {}
                Ok(false) => report.failures.push(format!(
                    "structure equation fails on block {source} -> {target}"
                )),
                Err(e) => report
                    .failures
                    .push(format!("block {source} -> {target}: {e}")),
            }
        }
    }
    report
}

/// Check that every term raises the collapsed grading by exactly one.
pub fn verify_grading(d: &TypeDStructure<'_>) -> Report {
    let mut report = Report::default();
    for source in 0..d.states.len() {
        for t in &d.delta[source] {
            report.checked += 1;
            let lhs = d.algebra.generator(t.gen).zeta4() + d.zeta4(t.target);
            let rhs = d.zeta4(source) + 4;
            if lhs != rhs {
                report.failures.push(format!(
                    "term {} -> {} with {} has zeta {} vs {}",
                    source,
                    t.target,
                    crate::cleaved::describe_kind(&d.algebra.generator(t.gen).kind),
                    zeta_string(lhs),
                    zeta_string(rhs)
                ));
            }
        }
    }
    report
}

/// Substitute every coefficient. States are unchanged.
pub fn transport<'a>(
    d: &TypeDStructure<'a>,
    s: &Substitution,
) -> Result<TypeDStructure<'a>, FieldError> {
    let mut delta = Vec::with_capacity(d.delta.len());
    for terms in &d.delta {
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            out.push(DTerm {
                coeff: t.coeff.substitute(s)?,
                gen: t.gen,
                target: t.target,
            });
        }
        delta.push(out);
    }
    Ok(TypeDStructure {
        diagram: d.diagram,
        algebra: d.algebra,
        states: d.states.clone(),
        state_ids: d.state_ids.clone(),
        circles: d.circles.clone(),
        boundary: d.boundary.clone(),
        grading: d.grading.clone(),
        delta,
    })
}

/// JSON dump: states with gradings and terms.
#[derive(Serialize)]
pub struct DStructureDump {
    pub states: Vec<DStateDump>,
}

#[derive(Serialize)]
pub struct DStateDump {
    pub id: StateId,
    pub matching: String,
    pub mask: u32,
    pub dec: Vec<Sign>,
    pub zeta: String,
    pub terms: Vec<DTermDump>,
}

#[derive(Serialize)]
pub struct DTermDump {
    pub coeff: String,
    pub generator: String,
    pub target: StateId,
}

pub fn dump(d: &TypeDStructure<'_>) -> DStructureDump {
    DStructureDump {
        states: (0..d.states.len())
            .map(|i| DStateDump {
                id: i,
                matching: d.states[i].matching.to_string(),
                mask: d.states[i].mask,
                dec: d.states[i].dec.clone(),
                zeta: zeta_string(d.zeta4(i)),
                terms: d.delta[i]
                    .iter()
                    .map(|t| DTermDump {
                        coeff: t.coeff.display(&d.diagram.registry).to_string(),
                        generator: crate::cleaved::describe_kind(&d.algebra.generator(t.gen).kind),
                        target: t.target,
                    })
                    .collect(),
            })
            .collect(),
    }
}
