//! Noncrossing planar matchings of the 2n axis points, their face structure
//! in one half-plane, bridge classes, and surgery.
//!
//! A matching is drawn canonically as nested semicircles. Its complement in
//! the half-plane has one face per arc (the region directly inside it) plus
//! the outer face. A bridge class is an unordered pair of arc-sides on the
//! boundary of a common face; surgering along it reconnects the two arcs.
//!
//! The module also provides a small band calculus (`BandConfig`) that places
//! one or two bands at explicit positions along arc-sides and computes how
//! the second band transfers across surgery of the first. This is what makes
//! the commutation relations of the cleaved algebra exactly computable.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

/// Which side of an arc a bridge foot sits on: `Inside` faces the region the
/// arc encloses, `Outside` faces its parent region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArcSide {
    Inside,
    Outside,
}

impl ArcSide {
    fn flip(self) -> ArcSide {
        match self {
            ArcSide::Inside => ArcSide::Outside,
            ArcSide::Outside => ArcSide::Inside,
        }
    }
}

/// A noncrossing perfect matching of {1..2n}. Pairs are stored sorted by
/// lower endpoint, each pair (lo, hi).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlanarMatching {
    pairs: Vec<(u8, u8)>,
}

impl PlanarMatching {
    pub fn new(mut pairs: Vec<(u8, u8)>) -> Self {
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                std::mem::swap(&mut p.0, &mut p.1);
            }
        }
        pairs.sort();
        let m = PlanarMatching { pairs };
        debug_assert!(m.is_noncrossing(), "crossing matching: {:?}", m.pairs);
        m
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(u8, u8)] {
        &self.pairs
    }

    pub fn partner(&self, point: u8) -> u8 {
        for &(a, b) in &self.pairs {
            if a == point {
                return b;
            }
            if b == point {
                return a;
            }
        }
        panic!("point {point} not matched");
    }

    pub fn arc_index(&self, point: u8) -> usize {
        self.pairs
            .iter()
            .position(|&(a, b)| a == point || b == point)
            .expect("point not matched")
    }

    fn is_noncrossing(&self) -> bool {
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            for &(c, d) in &self.pairs[i + 1..] {
                if a < c && c < b && b < d {
                    return false;
                }
            }
        }
        true
    }

    /// Children of each arc in the nesting forest, plus the top-level arcs.
    /// Children and top-level lists are ordered left to right.
    fn nesting(&self) -> (Vec<Vec<usize>>, Vec<usize>) {
        let mut children = vec![Vec::new(); self.pairs.len()];
        let mut top = Vec::new();
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            // the parent is the tightest arc strictly containing (a, b)
            let mut parent: Option<usize> = None;
            for (j, &(c, d)) in self.pairs.iter().enumerate() {
                if j != i && c < a && b < d {
                    match parent {
                        None => parent = Some(j),
                        Some(p) => {
                            let (pc, pd) = self.pairs[p];
                            if c > pc || d < pd {
                                parent = Some(j);
                            }
                        }
                    }
                }
            }
            match parent {
                Some(p) => children[p].push(i),
                None => top.push(i),
            }
        }
        for c in children.iter_mut() {
            c.sort_by_key(|&i| self.pairs[i].0);
        }
        top.sort_by_key(|&i| self.pairs[i].0);
        (children, top)
    }

    /// Face walks: each face as the cyclic sequence of arc-side segments on
    /// its boundary, in boundary-walk order. Face 0 is the outer face.
    /// Every (arc, side) occurs in exactly one walk.
    pub fn faces(&self) -> Vec<Vec<(usize, ArcSide)>> {
        let (children, top) = self.nesting();
        let mut walks = Vec::with_capacity(self.pairs.len() + 1);
        walks.push(top.iter().map(|&i| (i, ArcSide::Outside)).collect());
        for i in 0..self.pairs.len() {
            let mut w = vec![(i, ArcSide::Inside)];
            w.extend(children[i].iter().map(|&c| (c, ArcSide::Outside)));
            walks.push(w);
        }
        walks
    }

    /// All bridge classes: unordered pairs of arc-sides of distinct arcs on a
    /// common face. Deterministic order.
    pub fn bridge_classes(&self) -> Vec<BridgeClass> {
        let mut out = Vec::new();
        for walk in self.faces() {
            for i in 0..walk.len() {
                for j in i + 1..walk.len() {
                    if walk[i].0 != walk[j].0 {
                        out.push(BridgeClass::new(walk[i], walk[j]));
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Surger along a class; returns the new matching and the co-core class.
    pub fn surger(&self, class: &BridgeClass) -> (PlanarMatching, BridgeClass) {
        let [(ai, aside), (bi, bside)] = class.feet;
        let (a1, a2) = self.pairs[ai];
        let (b1, b2) = self.pairs[bi];
        let mut rest: Vec<(u8, u8)> = self
            .pairs
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != ai && k != bi)
            .map(|(_, &p)| p)
            .collect();
        let (n1, n2, cocore_shape) = match (aside, bside) {
            (ArcSide::Outside, ArcSide::Outside) => {
                // siblings; order them left to right
                let ((a1, a2), (b1, b2)) = if a1 < b1 {
                    ((a1, a2), (b1, b2))
                } else {
                    ((b1, b2), (a1, a2))
                };
                // band joins the facing outsides: (a1,b2) around (a2,b1)
                ((a1, b2), (a2, b1), (ArcSide::Inside, ArcSide::Outside))
            }
            (ArcSide::Inside, ArcSide::Outside) | (ArcSide::Outside, ArcSide::Inside) => {
                // parent-child; result is two siblings
                let ((p1, p2), (c1, c2)) = if aside == ArcSide::Inside {
                    ((a1, a2), (b1, b2))
                } else {
                    ((b1, b2), (a1, a2))
                };
                debug_assert!(p1 < c1 && c2 < p2);
                ((p1, c1), (c2, p2), (ArcSide::Outside, ArcSide::Outside))
            }
            (ArcSide::Inside, ArcSide::Inside) => {
                unreachable!("inside-inside pairs never share a face")
            }
        };
        rest.push(n1);
        rest.push(n2);
        let new = PlanarMatching::new(rest);
        let f1 = (new.arc_index(n1.0), cocore_shape.0);
        let f2 = (new.arc_index(n2.0), cocore_shape.1);
        (new, BridgeClass::new(f1, f2))
    }

    /// The unique class whose surgery yields `target`, if any.
    pub fn class_to(&self, target: &PlanarMatching) -> Option<BridgeClass> {
        self.bridge_classes()
            .into_iter()
            .find(|c| &self.surger(c).0 == target)
    }
}

impl fmt::Display for PlanarMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({a},{b})")?;
        }
        write!(f, "}}")
    }
}

/// A bridge class: two feet on distinct arcs sharing a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BridgeClass {
    pub feet: [(usize, ArcSide); 2],
}

impl BridgeClass {
    pub fn new(a: (usize, ArcSide), b: (usize, ArcSide)) -> Self {
        let mut feet = [a, b];
        feet.sort();
        BridgeClass { feet }
    }
}

/// All noncrossing perfect matchings of {1..2n}, in a deterministic order.
pub fn enumerate_matchings(n: usize) -> Vec<PlanarMatching> {
    fn gen(points: &[u8]) -> Vec<Vec<(u8, u8)>> {
        if points.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        // the first point pairs with points[k] for odd k; the inside and
        // outside regions are matched independently
        for k in (1..points.len()).step_by(2) {
            for inside in gen(&points[1..k]) {
                for outside in gen(&points[k + 1..]) {
                    let mut m = vec![(points[0], points[k])];
                    m.extend_from_slice(&inside);
                    m.extend_from_slice(&outside);
                    out.push(m);
                }
            }
        }
        out
    }
    let points: Vec<u8> = (1..=2 * n as u8).collect();
    let mut out: Vec<PlanarMatching> = gen(&points).into_iter().map(PlanarMatching::new).collect();
    out.sort();
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// Band calculus: explicit placements of bands at positions along arc-sides.
// ---------------------------------------------------------------------------

/// A foot placed on an arc at a rational position in (0,1), on one side.
/// Positions order feet along the arc from its lower endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Foot {
    pub arc: usize,
    pub side: ArcSide,
    pub pos: f64,
}

/// A band with two feet. The class it represents is `(arc, side)` pairs; the
/// positions pin down one embedded representative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub feet: [Foot; 2],
}

impl Band {
    pub fn class(&self) -> BridgeClass {
        BridgeClass::new(
            (self.feet[0].arc, self.feet[0].side),
            (self.feet[1].arc, self.feet[1].side),
        )
    }
}

/// Cyclic position of a foot around a face walk: (index of its segment in
/// the walk, position along the segment in walk direction).
fn walk_coord(m: &PlanarMatching, walk: &[(usize, ArcSide)], f: &Foot) -> Option<(usize, f64)> {
    let seg = walk.iter().position(|&(a, s)| a == f.arc && s == f.side)?;
    // walk direction: Outside is traversed lo -> hi, Inside hi -> lo
    let t = match f.side {
        ArcSide::Outside => f.pos,
        ArcSide::Inside => 1.0 - f.pos,
    };
    let _ = m;
    Some((seg, t))
}

/// Do two bands, both placed in the same face, interleave (i.e. their chords
/// must cross)?
fn interleaved(m: &PlanarMatching, walk: &[(usize, ArcSide)], x: &Band, y: &Band) -> bool {
    let coords: Vec<(usize, f64)> = [x.feet[0], x.feet[1], y.feet[0], y.feet[1]]
        .iter()
        .map(|f| walk_coord(m, walk, f).expect("foot not on face"))
        .collect();
    // cyclic order of the four feet
    let mut idx = [0usize, 1, 2, 3];
    idx.sort_by(|&a, &b| coords[a].partial_cmp(&coords[b]).unwrap());
    // x-feet are labels 0,1; y-feet 2,3; interleaved iff they alternate
    let labels: Vec<bool> = idx.iter().map(|&i| i < 2).collect();
    labels[0] != labels[1] && labels[1] != labels[2] && labels[2] != labels[3]
}

/// In which face does a band lie? Both feet must be on the face's boundary.
fn face_of_band(m: &PlanarMatching, b: &Band) -> Option<usize> {
    for (fi, walk) in m.faces().iter().enumerate() {
        if walk_coord(m, walk, &b.feet[0]).is_some() && walk_coord(m, walk, &b.feet[1]).is_some() {
            return Some(fi);
        }
    }
    None
}

/// Can the two bands be embedded disjointly at these positions?
pub fn disjointly_embeddable(m: &PlanarMatching, a: &Band, b: &Band) -> bool {
    let fa = face_of_band(m, a).expect("band a has no face");
    let fb = face_of_band(m, b).expect("band b has no face");
    if fa != fb {
        return true;
    }
    let walk = &m.faces()[fa];
    !interleaved(m, walk, a, b)
}

/// Surger along band `cut`, transferring the feet of `other` to the new
/// matching. Returns the new matching and the transferred band.
///
/// Reconnection rule, in the walk orientation of the cut band's face: the
/// piece entering a foot joins the piece leaving the other foot.
pub fn surger_band(m: &PlanarMatching, cut: &Band, other: &Band) -> (PlanarMatching, Band) {
    let [fa, fb] = cut.feet;
    let (a1, a2) = m.pairs()[fa.arc];
    let (b1, b2) = m.pairs()[fb.arc];
    assert_ne!(fa.arc, fb.arc, "band feet on one arc");

    // Direction each side is traversed by its face walk.
    let dir_lo_hi = |side: ArcSide| side == ArcSide::Outside;

    // Piece descriptors: (arc, interval, traversed lo->hi inside the new arc?)
    // before(foot) = the piece entering the foot in walk direction,
    // after(foot) = the piece leaving it.
    #[derive(Clone, Copy, Debug)]
    struct Piece {
        arc: usize,
        lo_end: bool, // contains the arc's lo endpoint (else the hi endpoint)
    }
    let before = |f: Foot| -> Piece {
        Piece {
            arc: f.arc,
            lo_end: dir_lo_hi(f.side),
        }
    };
    let after = |f: Foot| -> Piece {
        Piece {
            arc: f.arc,
            lo_end: !dir_lo_hi(f.side),
        }
    };
    let free_end = |p: Piece, lo: u8, hi: u8| -> u8 {
        if p.lo_end {
            lo
        } else {
            hi
        }
    };
    let ends = |p: Piece| -> (u8, u8) {
        if p.arc == fa.arc {
            (a1, a2)
        } else {
            (b1, b2)
        }
    };

    // New arcs: before(fa)+after(fb) and after(fa)+before(fb).
    let join = |p: Piece, q: Piece| -> ((u8, u8), [Piece; 2]) {
        let (plo, phi) = ends(p);
        let (qlo, qhi) = ends(q);
        let e1 = free_end(p, plo, phi);
        let e2 = free_end(q, qlo, qhi);
        ((e1.min(e2), e1.max(e2)), [p, q])
    };
    let (na, pa) = join(before(fa), after(fb));
    let (nb, pb) = join(after(fa), before(fb));

    let mut rest: Vec<(u8, u8)> = m
        .pairs()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != fa.arc && k != fb.arc)
        .map(|(_, &p)| p)
        .collect();
    rest.push(na);
    rest.push(nb);
    let new = PlanarMatching::new(rest);

    // Transfer a foot of `other`.
    let cut_pos = |arc: usize| -> f64 {
        if arc == fa.arc {
            fa.pos
        } else {
            fb.pos
        }
    };
    let transfer = |f: Foot| -> Foot {
        if f.arc != fa.arc && f.arc != fb.arc {
            // untouched arc keeps its span; find its new index
            let (lo, hi) = m.pairs()[f.arc];
            let ni = new
                .pairs()
                .iter()
                .position(|&p| p == (lo, hi))
                .expect("untouched arc survives");
            return Foot {
                arc: ni,
                side: f.side,
                pos: f.pos,
            };
        }
        let cp = cut_pos(f.arc);
        let on_lo_piece = f.pos < cp;
        // locate the piece in the two new arcs
        for (narc, pieces) in [(na, pa), (nb, pb)] {
            for (pi, piece) in pieces.iter().enumerate() {
                if piece.arc == f.arc && piece.lo_end == on_lo_piece {
                    let ni = new.pairs().iter().position(|&p| p == narc).unwrap();
                    // Does the new arc traverse this piece in the old lo->hi
                    // direction? New arc runs free-end(piece0) -> band ->
                    // free-end(piece1). Piece 0 is traversed from its free
                    // end toward the band, piece 1 from the band outward.
                    let (plo, phi) = ends(*piece);
                    let p_free = free_end(*piece, plo, phi);
                    let toward_band = pi == 0;
                    // orientation of the new arc: from narc.0 (lo) to narc.1
                    let starts_at_piece0 = {
                        let (q0lo, q0hi) = ends(pieces[0]);
                        free_end(pieces[0], q0lo, q0hi) == narc.0
                    };
                    let piece_from_free = toward_band == starts_at_piece0;
                    // old lo->hi direction inside the piece: from the cut
                    // toward hi if the piece contains hi, i.e. "from free end"
                    // iff the piece contains lo.
                    let old_lo_hi_from_free = piece.lo_end;
                    let same_dir = piece_from_free == old_lo_hi_from_free;
                    let side = if same_dir { f.side } else { f.side.flip() };
                    // position: keep relative order; exact value is only used
                    // for ordering feet, so map into the piece's subinterval.
                    let pos = relocate(f.pos, cp, piece.lo_end, p_free == narc.0);
                    return Foot {
                        arc: ni,
                        side,
                        pos,
                    };
                }
            }
        }
        unreachable!("foot piece not found")
    };

    let t = Band {
        feet: [transfer(other.feet[0]), transfer(other.feet[1])],
    };
    (new, t)
}

/// Map a position in the cut piece into (0,1) on the new arc, preserving
/// order within the piece. `piece_lo` tells which old piece the foot is on;
/// `piece_at_new_lo` whether that piece holds the new arc's lo endpoint.
fn relocate(pos: f64, cut: f64, piece_lo: bool, piece_at_new_lo: bool) -> f64 {
    // normalized position within the piece, measured from the arc's old lo
    let t = if piece_lo { pos / cut } else { (pos - cut) / (1.0 - cut) };
    // orient from the piece's free end toward the band
    let from_free = if piece_lo { t } else { 1.0 - t };
    let half = 0.5 * from_free;
    if piece_at_new_lo {
        half
    } else {
        1.0 - half
    }
}

/// Place a representative band for a class, with feet at given positions.
pub fn band_for_class(class: &BridgeClass, pos0: f64, pos1: f64) -> Band {
    Band {
        feet: [
            Foot {
                arc: class.feet[0].0,
                side: class.feet[0].1,
                pos: pos0,
            },
            Foot {
                arc: class.feet[1].0,
                side: class.feet[1].1,
                pos: pos1,
            },
        ],
    }
}

/// Enumerate the essentially distinct placements of representatives of two
/// classes (orders along shared segments), tagged by embeddability.
pub fn placements(m: &PlanarMatching, c1: &BridgeClass, c2: &BridgeClass) -> Vec<(Band, Band, bool)> {
    let mut out = Vec::new();
    // arcs carrying a foot of both bands need distinct positions; enumerate
    // both orders along each such arc
    let arcs1: Vec<usize> = c1.feet.iter().map(|&(a, _)| a).collect();
    let shared: Vec<usize> = c2
        .feet
        .iter()
        .map(|&(a, _)| a)
        .filter(|a| arcs1.contains(a))
        .collect();
    let orders: Vec<Vec<bool>> = match shared.len() {
        0 => vec![vec![]],
        1 => vec![vec![false], vec![true]],
        2 => vec![
            vec![false, false],
            vec![false, true],
            vec![true, false],
            vec![true, true],
        ],
        _ => unreachable!(),
    };
    for order in orders {
        let pos_for = |foot: (usize, ArcSide), of_c2: bool| -> f64 {
            match shared.iter().position(|&a| a == foot.0) {
                None => 0.5,
                Some(k) => {
                    // order[k] = true means the c2 foot comes first
                    if of_c2 == order[k] {
                        0.3
                    } else {
                        0.7
                    }
                }
            }
        };
        let b1 = Band {
            feet: [
                Foot {
                    arc: c1.feet[0].0,
                    side: c1.feet[0].1,
                    pos: pos_for(c1.feet[0], false),
                },
                Foot {
                    arc: c1.feet[1].0,
                    side: c1.feet[1].1,
                    pos: pos_for(c1.feet[1], false),
                },
            ],
        };
        let b2 = Band {
            feet: [
                Foot {
                    arc: c2.feet[0].0,
                    side: c2.feet[0].1,
                    pos: pos_for(c2.feet[0], true),
                },
                Foot {
                    arc: c2.feet[1].0,
                    side: c2.feet[1].1,
                    pos: pos_for(c2.feet[1], true),
                },
            ],
        };
        let ok = disjointly_embeddable(m, &b1, &b2);
        out.push((b1, b2, ok));
    }
    out
}
