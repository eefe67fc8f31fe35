//! The differential graded algebra of decorated cleaved links: generators,
//! relation instances, products as free words, the differential, and a zero
//! test for field-linear combinations of words of length at most two.
//!
//! Products are kept as free words; no normal form is computed. Equality is
//! decided where needed by testing membership in the span of the relation
//! instances with the same endpoints, inside the vector space freely spanned
//! by the composable words of length <= 2 with those endpoints. The defining
//! ideal is generated by elements supported on such words, so that span is
//! the whole intersection.

use std::sync::Mutex;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::RationalFunction;
use crate::planar::{enumerate_matchings, placements, surger_band, BridgeClass, PlanarMatching, Side};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("zero test on a word of length {0} (only lengths <= 2 are decidable)")]
    WordTooLong(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

pub type LinkId = usize;
pub type GenId = usize;

/// A decorated cleaved link: left and right planar matchings, the circle
/// partition they induce on the axis points, and a sign per circle with the
/// marked circle (through the top point) always minus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecoratedLink {
    pub left: PlanarMatching,
    pub right: PlanarMatching,
    /// Point sets, sorted by minimum point.
    pub circles: Vec<Vec<u8>>,
    pub dec: Vec<Sign>,
    pub marked: usize,
}

impl DecoratedLink {
    pub fn i_grading(&self) -> i32 {
        let mut i = 0;
        for (k, &d) in self.dec.iter().enumerate() {
            match d {
                Sign::Plus => i += 1,
                Sign::Minus => {
                    if k != self.marked {
                        i -= 1;
                    }
                }
            }
        }
        i
    }

    pub fn circle_of_point(&self, p: u8) -> usize {
        self.circles
            .iter()
            .position(|c| c.contains(&p))
            .expect("point on no circle")
    }

    pub fn matching(&self, side: Side) -> &PlanarMatching {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

/// Circle partition induced by a pair of matchings.
pub fn link_circles(left: &PlanarMatching, right: &PlanarMatching) -> Vec<Vec<u8>> {
    let n2 = 2 * left.n() as u8;
    let mut seen = vec![false; n2 as usize + 1];
    let mut out = Vec::new();
    for start in 1..=n2 {
        if seen[start as usize] {
            continue;
        }
        let mut pts = Vec::new();
        let mut p = start;
        loop {
            seen[p as usize] = true;
            pts.push(p);
            let q = right.partner(p);
            seen[q as usize] = true;
            pts.push(q);
            p = left.partner(q);
            if p == start {
                break;
            }
        }
        pts.sort();
        pts.dedup();
        out.push(pts);
    }
    out.sort_by_key(|c| c[0]);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GenKind {
    Idempotent,
    /// Decoration element on a + circle (index into the source link's
    /// circle list), on the given side.
    Dec { side: Side, circle: usize },
    Bridge { side: Side, class: BridgeClass },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub kind: GenKind,
    pub source: LinkId,
    pub target: LinkId,
}

impl Generator {
    pub fn zeta4(&self) -> i32 {
        match self.kind {
            GenKind::Idempotent => 0,
            GenKind::Dec { .. } => 2,
            GenKind::Bridge {
                side: Side::Right, ..
            } => 1,
            GenKind::Bridge {
                side: Side::Left, ..
            } => 3,
        }
    }
}

/// A word of non-idempotent generators with explicit endpoints; the empty
/// word is the idempotent of its (equal) endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    pub source: LinkId,
    pub target: LinkId,
    pub gens: Vec<GenId>,
}

impl Word {
    pub fn idem(link: LinkId) -> Self {
        Word {
            source: link,
            target: link,
            gens: Vec::new(),
        }
    }

    pub fn single(alg: &Algebra, g: GenId) -> Self {
        let gen = alg.generator(g);
        if gen.kind == GenKind::Idempotent {
            Word::idem(gen.source)
        } else {
            Word {
                source: gen.source,
                target: gen.target,
                gens: vec![g],
            }
        }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Option<Word> {
        if self.target != other.source {
            return None;
        }
        let mut gens = self.gens.clone();
        gens.extend_from_slice(&other.gens);
        Some(Word {
            source: self.source,
            target: other.target,
            gens,
        })
    }
}

/// A field-linear combination of words.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Elem {
    pub terms: HashMap<Word, RationalFunction>,
}

impl Elem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_word(w: Word) -> Self {
        let mut e = Elem::new();
        e.add_term(w, RationalFunction::one());
        e
    }

    pub fn from_gen(alg: &Algebra, g: GenId) -> Self {
        Elem::from_word(Word::single(alg, g))
    }

    pub fn add_term(&mut self, w: Word, c: RationalFunction) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&mut self, other: &Elem) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    pub fn scaled(&self, c: &RationalFunction) -> Elem {
        let mut out = Elem::new();
        for (w, k) in &self.terms {
            out.add_term(w.clone(), k * c);
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Bilinear concatenation; incomposable word pairs contribute zero.
    pub fn mul(&self, other: &Elem) -> Elem {
        let mut out = Elem::new();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                if let Some(w) = w1.concat(w2) {
                    out.add_term(w, c1 * c2);
                }
            }
        }
        out
    }
}

/// The algebra context for one strand count n: interned links, interned
/// generators, and cached relation spans. All queries are pure; caches are
/// filled lazily behind a lock, so concurrent reads are safe.
pub struct Algebra {
    pub n: usize,
    inner: Mutex<Inner>,
}

#[derive(Default)]
struct Inner {
    links: Vec<DecoratedLink>,
    link_ids: HashMap<DecoratedLink, LinkId>,
    gens: Vec<Generator>,
    gen_ids: HashMap<Generator, GenId>,
    gens_from: HashMap<LinkId, Vec<GenId>>,
    relations: HashMap<LinkId, Vec<Elem>>,
    spans: HashMap<(LinkId, LinkId), Span>,
}

impl Algebra {
    pub fn new(n: usize) -> Self {
        Algebra {
            n,
            inner: Mutex::new(Inner::default()),
        }
    }

    pub fn link(&self, id: LinkId) -> DecoratedLink {
        self.inner.lock().unwrap().links[id].clone()
    }

    pub fn generator(&self, id: GenId) -> Generator {
        self.inner.lock().unwrap().gens[id].clone()
    }

    pub fn intern_link(&self, left: &PlanarMatching, right: &PlanarMatching, dec: Vec<Sign>) -> LinkId {
        let circles = link_circles(left, right);
        let n2 = 2 * self.n as u8;
        let marked = circles
            .iter()
            .position(|c| c.contains(&n2))
            .expect("marked circle");
        assert_eq!(dec.len(), circles.len());
        assert_eq!(dec[marked], Sign::Minus, "marked circle must be decorated -");
        let link = DecoratedLink {
            left: left.clone(),
            right: right.clone(),
            circles,
            dec,
            marked,
        };
        let mut inner = self.inner.lock().unwrap();
        if let Some(&id) = inner.link_ids.get(&link) {
            return id;
        }
        let id = inner.links.len();
        inner.links.push(link.clone());
        inner.link_ids.insert(link, id);
        id
    }

    /// The same link with circle `c` flipped from + to -.
    pub fn flip(&self, link: LinkId, c: usize) -> LinkId {
        let l = self.link(link);
        assert_eq!(l.dec[c], Sign::Plus, "can only flip a + circle");
        let mut dec = l.dec.clone();
        dec[c] = Sign::Minus;
        self.intern_link(&l.left, &l.right, dec)
    }

    /// All decorated cleaved links for this n, marked circle minus.
    pub fn enumerate_links(&self) -> Vec<LinkId> {
        let ms = enumerate_matchings(self.n);
        let mut out = Vec::new();
        for left in &ms {
            for right in &ms {
                let circles = link_circles(left, right);
                let n2 = 2 * self.n as u8;
                let marked = circles.iter().position(|c| c.contains(&n2)).unwrap();
                let k = circles.len();
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
                    if dec[marked] == Sign::Plus {
                        continue;
                    }
                    out.push(self.intern_link(left, right, dec));
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn intern_gen(&self, g: Generator) -> GenId {
        let mut inner = self.inner.lock().unwrap();
        if let Some(&id) = inner.gen_ids.get(&g) {
            return id;
        }
        let id = inner.gens.len();
        inner.gens.push(g.clone());
        inner.gen_ids.insert(g, id);
        id
    }

    /// Frobenius-compatible surgeries of `link` along a class of one side:
    /// (target link, involved source circles, involved target circles).
    fn bridge_targets(
        &self,
        link: LinkId,
        side: Side,
        class: &BridgeClass,
    ) -> Vec<(LinkId, Vec<usize>, Vec<usize>)> {
        let l = self.link(link);
        let m = l.matching(side);
        let (new_m, _) = m.surger(class);
        let (new_left, new_right) = match side {
            Side::Left => (new_m, l.right.clone()),
            Side::Right => (l.left.clone(), new_m),
        };
        let new_circles = link_circles(&new_left, &new_right);
        // circles touched by the surgered arcs
        let feet_points: Vec<u8> = class
            .feet
            .iter()
            .flat_map(|&(arc, _)| {
                let (a, b) = m.pairs()[arc];
                [a, b]
            })
            .collect();
        let mut sources: Vec<usize> = feet_points.iter().map(|&p| l.circle_of_point(p)).collect();
        sources.sort();
        sources.dedup();
        let mut targets: Vec<usize> = feet_points
            .iter()
            .map(|&p| new_circles.iter().position(|c| c.contains(&p)).unwrap())
            .collect();
        targets.sort();
        targets.dedup();
        debug_assert_eq!(sources.len() + targets.len(), 3);

        // untouched circles map by point set
        let map_untouched = |dec_t: &mut Vec<Option<Sign>>| {
            for (i, c) in l.circles.iter().enumerate() {
                if sources.contains(&i) {
                    continue;
                }
                let j = new_circles.iter().position(|d| d == c).expect("untouched circle");
                dec_t[j] = Some(l.dec[i]);
            }
        };

        let mut out = Vec::new();
        if sources.len() == 2 {
            // merge
            let (sa, sb) = (sources[0], sources[1]);
            let t = targets[0];
            let merged = match (l.dec[sa], l.dec[sb]) {
                (Sign::Plus, Sign::Plus) => Some(Sign::Plus),
                (Sign::Plus, Sign::Minus) | (Sign::Minus, Sign::Plus) => Some(Sign::Minus),
                (Sign::Minus, Sign::Minus) => None,
            };
            if let Some(s) = merged {
                let mut dec_t = vec![None; new_circles.len()];
                map_untouched(&mut dec_t);
                dec_t[t] = Some(s);
                let dec: Vec<Sign> = dec_t.into_iter().map(|d| d.unwrap()).collect();
                let id = self.intern_link(&new_left, &new_right, dec);
                out.push((id, sources.clone(), targets.clone()));
            }
        } else {
            // divide
            let s = sources[0];
            let (ta, tb) = (targets[0], targets[1]);
            let options: Vec<(Sign, Sign)> = match l.dec[s] {
                Sign::Plus => vec![(Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus)],
                Sign::Minus => vec![(Sign::Minus, Sign::Minus)],
            };
            for (da, db) in options {
                let mut dec_t = vec![None; new_circles.len()];
                map_untouched(&mut dec_t);
                dec_t[ta] = Some(da);
                dec_t[tb] = Some(db);
                let dec: Vec<Sign> = dec_t.into_iter().map(|d| d.unwrap()).collect();
                // the marked circle must stay minus
                let n2 = 2 * self.n as u8;
                let marked = new_circles.iter().position(|c| c.contains(&n2)).unwrap();
                if dec[marked] == Sign::Plus {
                    continue;
                }
                let id = self.intern_link(&new_left, &new_right, dec);
                out.push((id, sources.clone(), targets.clone()));
            }
        }
        out
    }

    /// Catalog of generators out of a link: the idempotent, one left and one
    /// right decoration element per + circle, and every compatible bridge
    /// element on both sides.
    pub fn gens_from(&self, link: LinkId) -> Vec<GenId> {
        if let Some(g) = self.inner.lock().unwrap().gens_from.get(&link) {
            return g.clone();
        }
        let l = self.link(link);
        let mut out = Vec::new();
        out.push(self.intern_gen(Generator {
            kind: GenKind::Idempotent,
            source: link,
            target: link,
        }));
        for (c, &d) in l.dec.iter().enumerate() {
            if d == Sign::Plus {
                let t = self.flip(link, c);
                for side in [Side::Right, Side::Left] {
                    out.push(self.intern_gen(Generator {
                        kind: GenKind::Dec { side, circle: c },
                        source: link,
                        target: t,
                    }));
                }
            }
        }
        for side in [Side::Left, Side::Right] {
            for class in l.matching(side).bridge_classes() {
                for (t, _, _) in self.bridge_targets(link, side, &class) {
                    out.push(self.intern_gen(Generator {
                        kind: GenKind::Bridge { side, class },
                        source: link,
                        target: t,
                    }));
                }
            }
        }
        self.inner
            .lock().unwrap()
            .gens_from
            .insert(link, out.clone());
        out
    }

    /// Find the interned bridge generator with given data, if compatible.
    pub fn bridge_gen(
        &self,
        source: LinkId,
        side: Side,
        class: &BridgeClass,
        target: LinkId,
    ) -> Option<GenId> {
        self.gens_from(source).into_iter().find(|&g| {
            let gen = self.generator(g);
            gen.target == target
                && matches!(gen.kind, GenKind::Bridge { side: s, class: c } if s == side && c == *class)
        })
    }

    pub fn dec_gen(&self, source: LinkId, side: Side, circle: usize) -> Option<GenId> {
        self.gens_from(source).into_iter().find(|&g| {
            let gen = self.generator(g);
            matches!(gen.kind, GenKind::Dec { side: s, circle: c } if s == side && c == circle)
        })
    }

    /// The differential: on a left decoration element it is the sum over
    /// left bridge classes and compatible intermediate decorations of the
    /// two-step surgery word returning to the link with the supporting
    /// circle flipped; zero on every other generator.
    pub fn d_gamma(&self, g: GenId) -> Elem {
        let gen = self.generator(g);
        let GenKind::Dec {
            side: Side::Left,
            circle,
        } = gen.kind
        else {
            return Elem::new();
        };
        let l = self.link(gen.source);
        let flipped = gen.target;
        let mut out = Elem::new();
        for class in l.left.bridge_classes() {
            let (_, cocore) = l.left.surger(&class);
            for (mid, _, _) in self.bridge_targets(gen.source, Side::Left, &class) {
                let Some(g1) = self.bridge_gen(gen.source, Side::Left, &class, mid) else {
                    continue;
                };
                if let Some(g2) = self.bridge_gen(mid, Side::Left, &cocore, flipped) {
                    // endpoint matching forces the composite to flip exactly
                    // the supporting circle
                    let w = Word::single(self, g1).concat(&Word::single(self, g2)).unwrap();
                    out.add_term(w, RationalFunction::one());
                }
            }
        }
        let _ = circle;
        out
    }

    /// Extend the differential to an element by the Leibniz rule.
    pub fn d_elem(&self, e: &Elem) -> Elem {
        let mut out = Elem::new();
        for (w, c) in &e.terms {
            for k in 0..w.gens.len() {
                let d = self.d_gamma(w.gens[k]);
                for (dw, dc) in &d.terms {
                    let mut pre = Word {
                        source: w.source,
                        target: self.generator(w.gens[k]).source,
                        gens: w.gens[..k].to_vec(),
                    };
                    pre = pre.concat(dw).unwrap();
                    let post = Word {
                        source: self.generator(w.gens[k]).target,
                        target: w.target,
                        gens: w.gens[k + 1..].to_vec(),
                    };
                    let full = pre.concat(&post).unwrap();
                    out.add_term(full, c * dc);
                }
            }
        }
        out
    }

    // -- relation instances ------------------------------------------------

    /// All relation instances with the given source, cached.
    pub fn relations_from(&self, source: LinkId) -> Vec<Elem> {
        if let Some(r) = self.inner.lock().unwrap().relations.get(&source) {
            return r.clone();
        }
        let mut out = Vec::new();
        self.rel_dec_dec(source, &mut out);
        self.rel_bridge_dec(source, &mut out);
        self.rel_band_pairs(source, &mut out);
        self.rel_bridge_cocore(source, &mut out);
        self.rel_forced_crossing_zero(source, &mut out);
        self.rel_decoration_edges(source, &mut out);
        out.retain(|e| !e.is_empty());
        // deduplicate identical instances
        let mut seen: Vec<Elem> = Vec::new();
        for e in out {
            if !seen.contains(&e) {
                seen.push(e);
            }
        }
        self.inner
            .lock().unwrap()
            .relations
            .insert(source, seen.clone());
        seen
    }

    /// Commutators of decoration elements on distinct circles, in all four
    /// left/right mixes.
    fn rel_dec_dec(&self, source: LinkId, out: &mut Vec<Elem>) {
        let l = self.link(source);
        let plus: Vec<usize> = (0..l.dec.len()).filter(|&c| l.dec[c] == Sign::Plus).collect();
        for &c in &plus {
            for &d in &plus {
                if c == d {
                    continue;
                }
                for sc in [Side::Left, Side::Right] {
                    for sd in [Side::Left, Side::Right] {
                        let g1 = self.dec_gen(source, sc, c).unwrap();
                        let m1 = self.generator(g1).target;
                        let g2 = self.dec_gen(m1, sd, d).unwrap();
                        let h1 = self.dec_gen(source, sd, d).unwrap();
                        let m2 = self.generator(h1).target;
                        let h2 = self.dec_gen(m2, sc, c).unwrap();
                        let mut e = Elem::new();
                        e.add_term(
                            Word::single(self, g1).concat(&Word::single(self, g2)).unwrap(),
                            RationalFunction::one(),
                        );
                        e.add_term(
                            Word::single(self, h1).concat(&Word::single(self, h2)).unwrap(),
                            RationalFunction::one(),
                        );
                        out.push(e);
                    }
                }
            }
        }
    }

    /// Commutators of a bridge element with a decoration element whose
    /// circle is disjoint from the bridge's support.
    fn rel_bridge_dec(&self, source: LinkId, out: &mut Vec<Elem>) {
        let l = self.link(source);
        for side in [Side::Left, Side::Right] {
            for class in l.matching(side).bridge_classes() {
                for (target, sources, _) in self.bridge_targets(source, side, &class) {
                    let g = self.bridge_gen(source, side, &class, target).unwrap();
                    let tl = self.link(target);
                    for (c, &d) in l.dec.iter().enumerate() {
                        if d != Sign::Plus || sources.contains(&c) {
                            continue;
                        }
                        // image of the untouched circle in the target link
                        let c_img = tl
                            .circles
                            .iter()
                            .position(|x| x == &l.circles[c])
                            .expect("untouched circle image");
                        for dec_side in [Side::Left, Side::Right] {
                            let g2 = self.dec_gen(target, dec_side, c_img).unwrap();
                            let h1 = self.dec_gen(source, dec_side, c).unwrap();
                            let mid = self.generator(h1).target;
                            // same class, flipped decorations on both ends
                            let t2 = self.flip(target, c_img);
                            let Some(h2) = self.bridge_gen(mid, side, &class, t2) else {
                                continue;
                            };
                            let mut e = Elem::new();
                            e.add_term(
                                Word::single(self, g).concat(&Word::single(self, g2)).unwrap(),
                                RationalFunction::one(),
                            );
                            e.add_term(
                                Word::single(self, h1).concat(&Word::single(self, h2)).unwrap(),
                                RationalFunction::one(),
                            );
                            out.push(e);
                        }
                    }
                }
            }
        }
    }

    /// Commutation relations from pairs of disjointly embedded bands, and
    /// the three-path slide relations from interleaved same-segment pairs.
    fn rel_band_pairs(&self, source: LinkId, out: &mut Vec<Elem>) {
        let l = self.link(source);
        // mixed sides: transfers are trivial
        for lc in l.left.bridge_classes() {
            for rc in l.right.bridge_classes() {
                let mut paths = Vec::new();
                paths.push(((Side::Left, lc), (Side::Right, rc)));
                paths.push(((Side::Right, rc), (Side::Left, lc)));
                self.push_path_sums(source, &paths, out);
            }
        }
        // same side
        for side in [Side::Left, Side::Right] {
            let m = l.matching(side).clone();
            let classes = m.bridge_classes();
            for i in 0..classes.len() {
                for j in i + 1..classes.len() {
                    let (c1, c2) = (classes[i], classes[j]);
                    let shared: Vec<_> = c1
                        .feet
                        .iter()
                        .filter(|f| c2.feet.contains(f))
                        .copied()
                        .collect();
                    for (b1, b2, ok) in placements(&m, &c1, &c2) {
                        if !ok {
                            // interleaved placements admit no disjoint
                            // two-band surgery
                            continue;
                        }
                        let (m1, t2) = surger_band(&m, &b1, &b2);
                        let (_, t1) = surger_band(&m, &b2, &b1);
                        let mut paths = vec![
                            ((side, c1), (side, t2.class())),
                            ((side, c2), (side, t1.class())),
                        ];
                        if side == Side::Left && shared.len() == 1 {
                            // left bridges sharing a segment: the two
                            // orders do not commute; together with the
                            // slid bridge they form a three-path relation
                            let sh = shared[0];
                            let a = *c1.feet.iter().find(|&&f| f != sh).unwrap();
                            let b = *c2.feet.iter().find(|&&f| f != sh).unwrap();
                            debug_assert_ne!(a.0, b.0);
                            let slide = BridgeClass::new(a, b);
                            debug_assert!(m.bridge_classes().contains(&slide));
                            let (composite, _) = m1.surger(&t2.class());
                            let (ms, _) = m.surger(&slide);
                            let Some(eta) = ms.class_to(&composite) else {
                                continue;
                            };
                            paths.push(((side, slide), (side, eta)));
                        }
                        self.push_path_sums(source, &paths, out);
                    }
                }
            }
        }
    }

    /// For each listed (first class, second class) path shape, sum every
    /// decoration-compatible two-step word, grouped by final link; each
    /// group is one relation instance.
    fn push_path_sums(
        &self,
        source: LinkId,
        paths: &[((Side, BridgeClass), (Side, BridgeClass))],
        out: &mut Vec<Elem>,
    ) {
        let mut by_target: BTreeMap<LinkId, Elem> = BTreeMap::new();
        for &((s1, c1), (s2, c2)) in paths {
            for (mid, _, _) in self.bridge_targets(source, s1, &c1) {
                let g1 = self.bridge_gen(source, s1, &c1, mid).unwrap();
                for (end, _, _) in self.bridge_targets(mid, s2, &c2) {
                    let g2 = self.bridge_gen(mid, s2, &c2, end).unwrap();
                    let w = Word::single(self, g1).concat(&Word::single(self, g2)).unwrap();
                    by_target
                        .entry(end)
                        .or_default()
                        .add_term(w, RationalFunction::one());
                }
            }
        }
        out.extend(by_target.into_values().filter(|e| !e.is_empty()));
    }

    /// A right bridge followed by its co-core, landing on a flip of a +
    /// circle, equals the right decoration element of that circle.
    fn rel_bridge_cocore(&self, source: LinkId, out: &mut Vec<Elem>) {
        let l = self.link(source);
        for class in l.right.bridge_classes() {
            let (_, cocore) = l.right.surger(&class);
            for (mid, _, _) in self.bridge_targets(source, Side::Right, &class) {
                let g1 = self.bridge_gen(source, Side::Right, &class, mid).unwrap();
                for (end, _, _) in self.bridge_targets(mid, Side::Right, &cocore) {
                    let el = self.link(end);
                    if el.left != l.left || el.right != l.right {
                        continue;
                    }
                    // the composite flips exactly one + circle
                    let diffs: Vec<usize> = (0..l.dec.len())
                        .filter(|&c| l.dec[c] != el.dec[c])
                        .collect();
                    let [c] = diffs[..] else { continue };
                    debug_assert_eq!(l.dec[c], Sign::Plus);
                    let g2 = self.bridge_gen(mid, Side::Right, &cocore, end).unwrap();
                    let rdec = self.dec_gen(source, Side::Right, c).unwrap();
                    let mut e = Elem::new();
                    e.add_term(
                        Word::single(self, g1).concat(&Word::single(self, g2)).unwrap(),
                        RationalFunction::one(),
                    );
                    e.add_term(Word::single(self, rdec), RationalFunction::one());
                    out.push(e);
                }
            }
        }
    }

    /// A left bridge followed by a class every representative of which
    /// crosses the co-core is zero.
    fn rel_forced_crossing_zero(&self, source: LinkId, out: &mut Vec<Elem>) {
        let l = self.link(source);
        for class in l.left.bridge_classes() {
            let (new_m, cocore) = l.left.surger(&class);
            let walks = new_m.faces();
            let face_of = |c: &BridgeClass| {
                walks
                    .iter()
                    .position(|w| c.feet.iter().all(|f| w.contains(f)))
                    .expect("class face")
            };
            let fc = face_of(&cocore);
            for eta in new_m.bridge_classes() {
                if eta == cocore || face_of(&eta) != fc {
                    continue;
                }
                // shared segments mean the crossing can be avoided
                if eta.feet.iter().any(|f| cocore.feet.contains(f)) {
                    continue;
                }
                let walk = &walks[fc];
                let pos = |f: &(usize, crate::planar::ArcSide)| {
                    walk.iter().position(|s| s == f).unwrap()
                };
                let (a, b) = (pos(&cocore.feet[0]), pos(&cocore.feet[1]));
                let (c, d) = (pos(&eta.feet[0]), pos(&eta.feet[1]));
                let between = |x: usize| (a < x && x < b) != (a > b);
                if between(c) == between(d) {
                    continue; // not interleaved
                }
                for (mid, _, _) in self.bridge_targets(source, Side::Left, &class) {
                    let g1 = self.bridge_gen(source, Side::Left, &class, mid).unwrap();
                    for (end, _, _) in self.bridge_targets(mid, Side::Left, &eta) {
                        let g2 = self.bridge_gen(mid, Side::Left, &eta, end).unwrap();
                        let w = Word::single(self, g1).concat(&Word::single(self, g2)).unwrap();
                        out.push(Elem::from_word(w));
                    }
                }
            }
        }
    }

    /// Relations tying decoration elements to bridges with overlapping
    /// support: for right decorations the three expressions agree pairwise;
    /// for left decorations their three-term sum vanishes.
    fn rel_decoration_edges(&self, source: LinkId, out: &mut Vec<Elem>) {
        let l = self.link(source);
        for side in [Side::Left, Side::Right] {
            for class in l.matching(side).bridge_classes() {
                let surgered = self.bridge_targets(source, side, &class);
                if surgered.is_empty() {
                    continue;
                }
                let (_, sources, _) = surgered[0].clone();
                if sources.len() == 2 {
                    // merge of C_a and C_b into C_t
                    let (ca, cb) = (sources[0], sources[1]);
                    if l.dec[ca] != Sign::Plus || l.dec[cb] != Sign::Plus {
                        continue;
                    }
                    let build = |dec_side: Side| -> Vec<Elem> {
                        let mut terms = Vec::new();
                        for &c in &[ca, cb] {
                            let h1 = self.dec_gen(source, dec_side, c).unwrap();
                            let mid = self.generator(h1).target;
                            // merge (-,+) or (+,-) -> -, target has C_t = -
                            for (end, _, _) in self.bridge_targets(mid, side, &class) {
                                let g2 = self.bridge_gen(mid, side, &class, end).unwrap();
                                terms.push(Elem::from_word(
                                    Word::single(self, h1).concat(&Word::single(self, g2)).unwrap(),
                                ));
                            }
                        }
                        // bridge first at (+,+) -> +, then flip C_t
                        for (w, _, tg) in &surgered {
                            let wl = self.link(*w);
                            let t = tg[0];
                            if wl.dec[t] != Sign::Plus {
                                continue;
                            }
                            let g1 = self.bridge_gen(source, side, &class, *w).unwrap();
                            let h2 = self.dec_gen(*w, dec_side, t).unwrap();
                            terms.push(Elem::from_word(
                                Word::single(self, g1).concat(&Word::single(self, h2)).unwrap(),
                            ));
                        }
                        terms
                    };
                    self.emit_dec_edge(build(Side::Right), Side::Right, out);
                    self.emit_dec_edge(build(Side::Left), Side::Left, out);
                } else {
                    // divide of C_s into C_1, C_2
                    let cs = sources[0];
                    if l.dec[cs] != Sign::Plus {
                        continue;
                    }
                    let build = |dec_side: Side| -> Vec<Elem> {
                        let mut terms = Vec::new();
                        // flip C_s first, then divide (-) -> (-,-)
                        let h1 = self.dec_gen(source, dec_side, cs).unwrap();
                        let mid = self.generator(h1).target;
                        for (end, _, _) in self.bridge_targets(mid, side, &class) {
                            let g2 = self.bridge_gen(mid, side, &class, end).unwrap();
                            terms.push(Elem::from_word(
                                Word::single(self, h1).concat(&Word::single(self, g2)).unwrap(),
                            ));
                        }
                        // divide + -> (+,-) or (-,+), then flip the + part
                        for (w, _, tg) in &surgered {
                            let wl = self.link(*w);
                            let plus = tg.iter().find(|&&t| wl.dec[t] == Sign::Plus);
                            let Some(&t) = plus else { continue };
                            let g1 = self.bridge_gen(source, side, &class, *w).unwrap();
                            let h2 = self.dec_gen(*w, dec_side, t).unwrap();
                            terms.push(Elem::from_word(
                                Word::single(self, g1).concat(&Word::single(self, h2)).unwrap(),
                            ));
                        }
                        terms
                    };
                    self.emit_dec_edge(build(Side::Right), Side::Right, out);
                    self.emit_dec_edge(build(Side::Left), Side::Left, out);
                }
            }
        }
    }

    fn emit_dec_edge(&self, terms: Vec<Elem>, dec_side: Side, out: &mut Vec<Elem>) {
        match dec_side {
            Side::Right => {
                // pairwise equalities
                for i in 0..terms.len() {
                    for j in i + 1..terms.len() {
                        let mut e = terms[i].clone();
                        e.add(&terms[j]);
                        out.push(e);
                    }
                }
            }
            Side::Left => {
                // the full sum vanishes
                let mut e = Elem::new();
                for t in &terms {
                    e.add(t);
                }
                out.push(e);
            }
        }
    }

    // -- zero test ---------------------------------------------------------

    /// All composable words of length <= 2 from S to T (plus the idempotent
    /// when S == T), in a deterministic order.
    pub fn block_words(&self, source: LinkId, target: LinkId) -> Vec<Word> {
        let mut out = Vec::new();
        if source == target {
            out.push(Word::idem(source));
        }
        for g in self.gens_from(source) {
            let gen = self.generator(g);
            if gen.kind == GenKind::Idempotent {
                continue;
            }
            if gen.target == target {
                out.push(Word::single(self, g));
            }
            for g2 in self.gens_from(gen.target) {
                let gen2 = self.generator(g2);
                if gen2.kind == GenKind::Idempotent || gen2.target != target {
                    continue;
                }
                out.push(Word::single(self, g).concat(&Word::single(self, g2)).unwrap());
            }
        }
        out
    }

    fn span(&self, source: LinkId, target: LinkId) -> Span {
        if let Some(s) = self.inner.lock().unwrap().spans.get(&(source, target)) {
            return s.clone();
        }
        let words = self.block_words(source, target);
        let index: HashMap<Word, usize> =
            words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut span = Span::new(words.len(), index);
        for rel in self.relations_from(source) {
            let Some((s, t)) = endpoints(&rel) else { continue };
            if s != source || t != target {
                continue;
            }
            span.insert_gf2(&rel);
        }
        self.inner
            .lock().unwrap()
            .spans
            .insert((source, target), span.clone());
        span
    }

    /// Is this element zero in the algebra? Defined for elements all of
    /// whose words have length <= 2. Blockwise: each (source, target)
    /// component must lie in the relation span.
    pub fn is_zero(&self, e: &Elem) -> Result<bool, AlgebraError> {
        let mut blocks: HashMap<(LinkId, LinkId), Elem> = HashMap::new();
        for (w, c) in &e.terms {
            if w.len() > 2 {
                return Err(AlgebraError::WordTooLong(w.len()));
            }
            blocks
                .entry((w.source, w.target))
                .or_default()
                .add_term(w.clone(), c.clone());
        }
        for ((s, t), block) in blocks {
            let span = self.span(s, t);
            if !span.reduces_to_zero(&block) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Dimension of the (source, target) block of the quotient algebra,
    /// restricted to words of length <= 2.
    pub fn block_dimension(&self, source: LinkId, target: LinkId) -> usize {
        let span = self.span(source, target);
        span.ncols - span.rows.len()
    }
}

fn endpoints(e: &Elem) -> Option<(LinkId, LinkId)> {
    let mut it = e.terms.keys();
    let w = it.next()?;
    let (s, t) = (w.source, w.target);
    debug_assert!(it.all(|w| w.source == s && w.target == t), "mixed block relation");
    Some((s, t))
}

/// Echelonized span of GF(2) relation vectors in a word basis. Reduction of
/// field-coefficient vectors against it decides membership in the F-span.
#[derive(Clone)]
struct Span {
    ncols: usize,
    index: HashMap<Word, usize>,
    /// rows as (pivot, bitset)
    rows: Vec<(usize, Vec<u64>)>,
}

impl Span {
    fn new(ncols: usize, index: HashMap<Word, usize>) -> Self {
        Span {
            ncols,
            index,
            rows: Vec::new(),
        }
    }

    fn insert_gf2(&mut self, rel: &Elem) {
        let nw = self.ncols.div_ceil(64);
        let mut row = vec![0u64; nw];
        for (w, c) in &rel.terms {
            debug_assert!(c.is_one(), "relation with non-unit coefficient");
            let i = *self.index.get(w).expect("relation word outside block basis");
            row[i / 64] ^= 1 << (i % 64);
        }
        // reduce against existing rows
        loop {
            let Some(p) = first_bit(&row) else { return };
            match self.rows.iter().find(|&&(pivot, _)| pivot == p) {
                Some((_, r)) => {
                    for (a, b) in row.iter_mut().zip(r) {
                        *a ^= b;
                    }
                }
                None => {
                    self.rows.push((p, row));
                    self.rows.sort_by_key(|&(p, _)| p);
                    return;
                }
            }
        }
    }

    fn reduces_to_zero(&self, e: &Elem) -> bool {
        let mut vec: Vec<RationalFunction> = vec![RationalFunction::zero(); self.ncols];
        for (w, c) in &e.terms {
            let Some(&i) = self.index.get(w) else {
                return false; // word outside the block basis cannot be zero
            };
            vec[i] = &vec[i] + c;
        }
        for &(pivot, ref row) in &self.rows {
            if vec[pivot].is_zero() {
                continue;
            }
            let c = vec[pivot].clone();
            for i in bits(row) {
                vec[i] = &vec[i] + &c;
            }
        }
        vec.iter().all(|c| c.is_zero())
    }
}

fn first_bit(row: &[u64]) -> Option<usize> {
    for (i, &w) in row.iter().enumerate() {
        if w != 0 {
            return Some(i * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

fn bits(row: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &w) in row.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            out.push(i * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
    out
}

/// Debug dump of a generator catalog.
#[derive(Serialize)]
pub struct GenDump {
    pub id: GenId,
    pub kind: String,
    pub zeta4: i32,
    pub source: LinkId,
    pub target: LinkId,
}

pub fn dump_gens(alg: &Algebra, link: LinkId) -> Vec<GenDump> {
    alg.gens_from(link)
        .into_iter()
        .map(|g| {
            let gen = alg.generator(g);
            GenDump {
                id: g,
                kind: describe_kind(&gen.kind),
                zeta4: gen.zeta4(),
                source: gen.source,
                target: gen.target,
            }
        })
        .collect()
}

pub fn describe_kind(k: &GenKind) -> String {
    match k {
        GenKind::Idempotent => "I".into(),
        GenKind::Dec {
            side: Side::Right,
            circle,
        } => format!("re_C{circle}"),
        GenKind::Dec {
            side: Side::Left,
            circle,
        } => format!("le_C{circle}"),
        GenKind::Bridge { side, class } => format!(
            "{}bridge[{:?}]",
            if *side == Side::Left { "l" } else { "r" },
            class.feet
        ),
    }
}
