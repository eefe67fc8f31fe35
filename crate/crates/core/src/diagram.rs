//! Tangle diagrams as planar Morse words in one half-plane, their
//! resolutions, circle extraction with weights, and the local analysis of
//! resolution-bridge surgeries.
//!
//! A diagram starts at the axis with 2n strands (p1..p2n bottom to top, p2n
//! marked) and sweeps away from the axis through cup, cap and crossing
//! events, ending with no strands. Arcs are the maximal strand segments
//! whose endpoints are crossings or axis points; each arc carries a formal
//! variable (its weight, which weight moves may override).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Polynomial, RationalFunction, VarRegistry};
use crate::planar::{BridgeClass, PlanarMatching, Side};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("event {index}: {reason}")]
    NonPlanarEvent { index: usize, reason: String },
    #[error("diagram ends with {0} strands")]
    OpenStrands(usize),
    #[error("closed crossing-free component")]
    ClosedFreeComponent,
    #[error("expected a {expected} tangle")]
    WrongSide { expected: Side },
    #[error("unknown crossing {0}")]
    UnknownCrossing(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossingSign {
    Positive,
    Negative,
}

/// Which smoothing the 0-resolution uses at a crossing. `Pos` means the
/// 0-resolution is the identity smoothing (strands pass through); `Neg`
/// swaps the roles. The declared sign feeds only the crossing counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OverStrand {
    Pos,
    Neg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    pub name: String,
    pub sign: CrossingSign,
    pub over: OverStrand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorseEvent {
    Cup(usize),
    Cap(usize),
    Cross(usize, usize),
}

type SegId = usize;

#[derive(Debug, Clone)]
pub struct TangleDiagram {
    pub side: Side,
    pub n: usize,
    pub events: Vec<MorseEvent>,
    pub crossings: Vec<Crossing>,
    pub arc_names: Vec<String>,
    /// Weight of each arc; defaults to the arc's own variable.
    pub arc_weights: Vec<RationalFunction>,
    pub registry: VarRegistry,
    n_segments: usize,
    seg_arc: Vec<usize>,
    smooth_joins: Vec<(SegId, SegId)>,
    /// Per crossing: segments at [in_lo, in_hi, out_lo, out_hi].
    cross_ports: Vec<[SegId; 4]>,
}

impl TangleDiagram {
    pub fn n_plus(&self) -> usize {
        self.crossings
            .iter()
            .filter(|c| c.sign == CrossingSign::Positive)
            .count()
    }

    pub fn n_minus(&self) -> usize {
        self.crossings.len() - self.n_plus()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_names.len()
    }

    pub fn crossing_index(&self, name: &str) -> Result<usize, DiagramError> {
        self.crossings
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| DiagramError::UnknownCrossing(name.to_string()))
    }

    /// Build from parts, running validation and arc discovery.
    pub fn build(
        side: Side,
        n: usize,
        events: Vec<MorseEvent>,
        crossings: Vec<Crossing>,
        arc_names: Option<BTreeMap<usize, String>>,
    ) -> Result<Self, DiagramError> {
        if n == 0 {
            return Err(DiagramError::Schema("n must be positive".into()));
        }
        // simulate the sweep
        let mut strands: Vec<SegId> = (0..2 * n).collect();
        let mut n_segments = 2 * n;
        let mut smooth_joins: Vec<(SegId, SegId)> = Vec::new();
        let mut cross_ports: Vec<[SegId; 4]> = vec![[0; 4]; crossings.len()];
        let mut cross_seen = vec![false; crossings.len()];
        for (index, ev) in events.iter().enumerate() {
            match *ev {
                MorseEvent::Cup(i) => {
                    if i < 1 || i > strands.len() + 1 {
                        return Err(DiagramError::NonPlanarEvent {
                            index,
                            reason: format!("cup at {i} with {} strands", strands.len()),
                        });
                    }
                    let (a, b) = (n_segments, n_segments + 1);
                    n_segments += 2;
                    smooth_joins.push((a, b));
                    strands.insert(i - 1, b);
                    strands.insert(i - 1, a);
                }
                MorseEvent::Cap(i) => {
                    if i < 1 || i + 1 > strands.len() {
                        return Err(DiagramError::NonPlanarEvent {
                            index,
                            reason: format!("cap at {i} with {} strands", strands.len()),
                        });
                    }
                    let a = strands.remove(i - 1);
                    let b = strands.remove(i - 1);
                    smooth_joins.push((a, b));
                }
                MorseEvent::Cross(i, c) => {
                    if i < 1 || i + 1 > strands.len() {
                        return Err(DiagramError::NonPlanarEvent {
                            index,
                            reason: format!("crossing at {i} with {} strands", strands.len()),
                        });
                    }
                    if c >= crossings.len() || cross_seen[c] {
                        return Err(DiagramError::Schema(format!(
                            "crossing index {c} repeated or out of range"
                        )));
                    }
                    cross_seen[c] = true;
                    let in_lo = strands[i - 1];
                    let in_hi = strands[i];
                    let out_lo = n_segments;
                    let out_hi = n_segments + 1;
                    n_segments += 2;
                    cross_ports[c] = [in_lo, in_hi, out_lo, out_hi];
                    strands[i - 1] = out_lo;
                    strands[i] = out_hi;
                }
            }
        }
        if !strands.is_empty() {
            return Err(DiagramError::OpenStrands(strands.len()));
        }
        if let Some(missing) = cross_seen.iter().position(|&s| !s) {
            return Err(DiagramError::Schema(format!(
                "crossing {} never placed",
                crossings[missing].name
            )));
        }

        // arcs: classes of segments glued at cups and caps
        let mut uf = UnionFind::new(n_segments);
        for &(a, b) in &smooth_joins {
            uf.union(a, b);
        }
        let mut arc_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut seg_arc = vec![usize::MAX; n_segments];
        for s in 0..n_segments {
            let r = uf.find(s);
            let next = arc_of_root.len();
            let id = *arc_of_root.entry(r).or_insert(next);
            seg_arc[s] = id;
        }
        let arc_count = arc_of_root.len();

        // terminals: axis points and crossing ports
        let mut has_terminal = vec![false; arc_count];
        for s in 0..2 * n {
            has_terminal[seg_arc[s]] = true;
        }
        for ports in &cross_ports {
            for &p in ports {
                has_terminal[seg_arc[p]] = true;
            }
        }
        if has_terminal.iter().any(|&t| !t) {
            return Err(DiagramError::ClosedFreeComponent);
        }

        let mut registry = VarRegistry::new();
        let mut names = Vec::with_capacity(arc_count);
        for i in 0..arc_count {
            let name = match &arc_names {
                Some(map) => map
                    .get(&i)
                    .cloned()
                    .ok_or_else(|| DiagramError::Schema(format!("arc {i} unnamed")))?,
                None => format!("x{}", i + 1),
            };
            registry.fresh(name.clone());
            names.push(name);
        }
        let arc_weights = (0..arc_count)
            .map(|i| RationalFunction::var(i as u32))
            .collect();

        Ok(TangleDiagram {
            side,
            n,
            events,
            crossings,
            arc_names: names,
            arc_weights,
            registry,
            n_segments,
            seg_arc,
            smooth_joins,
            cross_ports,
        })
    }

    pub fn parse(json: &str) -> Result<Self, DiagramError> {
        let raw: DiagramJson =
            serde_json::from_str(json).map_err(|e| DiagramError::Schema(e.to_string()))?;
        raw.into_diagram()
    }

    /// Resolve every crossing per the 0/1 choices in `mask` (bit c set means
    /// crossing c takes its 1-resolution).
    pub fn resolve(&self, mask: u32) -> ResolvedHalf {
        let mut uf = UnionFind::new(self.n_segments);
        for &(a, b) in &self.smooth_joins {
            uf.union(a, b);
        }
        for (c, ports) in self.cross_ports.iter().enumerate() {
            let one = mask >> c & 1 == 1;
            let identity = match self.crossings[c].over {
                OverStrand::Pos => !one,
                OverStrand::Neg => one,
            };
            let [in_lo, in_hi, out_lo, out_hi] = *ports;
            if identity {
                uf.union(in_lo, out_lo);
                uf.union(in_hi, out_hi);
            } else {
                uf.union(in_lo, in_hi);
                uf.union(out_lo, out_hi);
            }
        }
        // components
        let mut comp_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut comp_of_seg = vec![usize::MAX; self.n_segments];
        for s in 0..self.n_segments {
            let r = uf.find(s);
            let next = comp_of_root.len();
            comp_of_seg[s] = *comp_of_root.entry(r).or_insert(next);
        }
        let ncomp = comp_of_root.len();
        let mut comp_points: Vec<Vec<u8>> = vec![Vec::new(); ncomp];
        let mut comp_arcs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncomp];
        for s in 0..self.n_segments {
            comp_arcs[comp_of_seg[s]].insert(self.seg_arc[s]);
        }
        for p in 0..2 * self.n {
            comp_points[comp_of_seg[p]].push(p as u8 + 1);
        }
        let mut pairs = Vec::new();
        let mut pair_arcs = HashMap::new();
        let mut free = Vec::new();
        for c in 0..ncomp {
            comp_points[c].sort();
            match comp_points[c].len() {
                0 => free.push(FreeCircle {
                    arcs: comp_arcs[c].clone(),
                }),
                2 => {
                    let pr = (comp_points[c][0], comp_points[c][1]);
                    pairs.push(pr);
                    pair_arcs.insert(pr, comp_arcs[c].clone());
                }
                k => panic!("resolution path with {k} axis points"),
            }
        }
        free.sort_by_key(|f| f.arcs.iter().next().copied());
        let port_arcs = self
            .cross_ports
            .iter()
            .map(|ports| ports.map(|s| self.seg_arc[s]))
            .collect();
        ResolvedHalf {
            matching: PlanarMatching::new(pairs),
            pair_arcs,
            free,
            port_arcs,
        }
    }

    pub fn arc_weight(&self, arc: usize) -> &RationalFunction {
        &self.arc_weights[arc]
    }

    pub fn weight_of_arcs(&self, arcs: &BTreeSet<usize>) -> RationalFunction {
        let mut acc = RationalFunction::from_poly(Polynomial::zero());
        for &a in arcs {
            acc = &acc + &self.arc_weights[a];
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeCircle {
    pub arcs: BTreeSet<usize>,
}

/// One resolved half-diagram: the induced planar matching on axis points,
/// the arcs along each matched path, and the free circles.
#[derive(Debug, Clone)]
pub struct ResolvedHalf {
    pub matching: PlanarMatching,
    pub pair_arcs: HashMap<(u8, u8), BTreeSet<usize>>,
    pub free: Vec<FreeCircle>,
    /// Per crossing, the diagram arcs meeting its four ports.
    pub port_arcs: Vec<[usize; 4]>,
}

/// A circle of a resolved half glued with an abstract opposite matching.
/// Cleaved circles carry their axis points; free circles none. `arcs` are
/// diagram-side arcs only.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circle {
    pub points: Vec<u8>,
    pub arcs: BTreeSet<usize>,
}

impl Circle {
    pub fn is_free(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleSet {
    /// Cleaved circles (sorted by min axis point) then free circles (sorted
    /// by min arc).
    pub circles: Vec<Circle>,
    pub marked: usize,
    pub n_cleaved: usize,
}

impl CircleSet {
    pub fn circle_of_arc(&self, arc: usize) -> usize {
        self.circles
            .iter()
            .position(|c| c.arcs.contains(&arc))
            .expect("arc on no circle")
    }
}

/// Glue the resolved half with a matching on the opposite side.
pub fn combine(resolved: &ResolvedHalf, opposite: &PlanarMatching) -> CircleSet {
    let n2 = 2 * resolved.matching.n() as u8;
    let mut seen = vec![false; n2 as usize + 1];
    let mut cleaved = Vec::new();
    for start in 1..=n2 {
        if seen[start as usize] {
            continue;
        }
        let mut points = Vec::new();
        let mut arcs = BTreeSet::new();
        let mut p = start;
        loop {
            seen[p as usize] = true;
            points.push(p);
            let q = resolved.matching.partner(p);
            let key = (p.min(q), p.max(q));
            arcs.extend(resolved.pair_arcs[&key].iter().copied());
            seen[q as usize] = true;
            points.push(q);
            p = opposite.partner(q);
            if p == start {
                break;
            }
        }
        points.sort();
        points.dedup();
        cleaved.push(Circle { points, arcs });
    }
    cleaved.sort_by_key(|c| c.points[0]);
    let n_cleaved = cleaved.len();
    let mut circles = cleaved;
    circles.extend(resolved.free.iter().map(|f| Circle {
        points: Vec::new(),
        arcs: f.arcs.clone(),
    }));
    let marked = circles
        .iter()
        .position(|c| c.points.contains(&n2))
        .expect("marked circle");
    CircleSet {
        circles,
        marked,
        n_cleaved,
    }
}

/// How one resolution-bridge surgery transforms the circles of a state.
#[derive(Debug, Clone)]
pub struct SiteSurgery {
    pub crossing: usize,
    pub new_mask: u32,
    pub before: CircleSet,
    pub after: CircleSet,
    pub matching_changed: bool,
    pub new_matching: PlanarMatching,
    /// Indices of circles involved in the surgery (1 or 2 of `before`),
    /// and of their images (2 or 1 of `after`).
    pub sources: Vec<usize>,
    pub targets: Vec<usize>,
    /// For untouched circles, `after` index per `before` index.
    pub untouched: HashMap<usize, usize>,
}

impl SiteSurgery {
    pub fn is_merge(&self) -> bool {
        self.sources.len() == 2
    }
}

/// Analyze the surgery at `crossing` (flipping its resolution bit) for the
/// state with resolution `mask` glued with `opposite`.
pub fn site_surgery(
    diagram: &TangleDiagram,
    mask: u32,
    crossing: usize,
    opposite: &PlanarMatching,
) -> SiteSurgery {
    let before_res = diagram.resolve(mask);
    let new_mask = mask ^ (1 << crossing);
    let after_res = diagram.resolve(new_mask);
    let before = combine(&before_res, opposite);
    let after = combine(&after_res, opposite);
    let local = before_res.port_arcs[crossing];
    let mut sources: Vec<usize> = local.iter().map(|&a| before.circle_of_arc(a)).collect();
    sources.sort();
    sources.dedup();
    let mut targets: Vec<usize> = local.iter().map(|&a| after.circle_of_arc(a)).collect();
    targets.sort();
    targets.dedup();
    debug_assert!(sources.len() + targets.len() == 3, "surgery is not a merge or divide");
    let mut by_value: HashMap<&Circle, usize> = HashMap::new();
    for (i, c) in after.circles.iter().enumerate() {
        if !targets.contains(&i) {
            by_value.insert(c, i);
        }
    }
    let mut untouched = HashMap::new();
    for (i, c) in before.circles.iter().enumerate() {
        if sources.contains(&i) {
            continue;
        }
        let j = *by_value.get(c).expect("untouched circle not found after surgery");
        untouched.insert(i, j);
    }
    let matching_changed = after_res.matching != before_res.matching;
    SiteSurgery {
        crossing,
        new_mask,
        before,
        after,
        matching_changed,
        new_matching: after_res.matching,
        sources,
        targets,
        untouched,
    }
}

/// The bridge class of the source diagram-side matching induced by a
/// matching-changing site surgery.
pub fn induced_class(before: &PlanarMatching, after: &PlanarMatching) -> BridgeClass {
    before
        .class_to(after)
        .expect("matching-changing surgery with no inducing class")
}

// ---------------------------------------------------------------------------
// Gradings
// ---------------------------------------------------------------------------

/// Bigrading stored exactly: `h` and `q2 = 2q`; the collapsed grading is
/// zeta = h - q/2, stored as `zeta4 = 4*zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grading {
    pub h: i32,
    pub q2: i32,
}

impl Grading {
    pub fn zeta4(&self) -> i32 {
        4 * self.h - self.q2
    }
}

/// h(r,s) = h(rho) - n_-; q = h(rho) + i(L,s)/2 + #free+ - #free- + n+ - 2n-.
pub fn state_grading(
    h_rho: i32,
    i_link: i32,
    free_plus: i32,
    free_minus: i32,
    n_plus: i32,
    n_minus: i32,
) -> Grading {
    let h = h_rho - n_minus;
    let q2 = 2 * h_rho + i_link + 2 * (free_plus - free_minus) + 2 * n_plus - 4 * n_minus;
    Grading { h, q2 }
}

/// Pretty-print a quarter-integer 4*zeta.
pub fn zeta_string(zeta4: i32) -> String {
    if zeta4 % 4 == 0 {
        format!("{}", zeta4 / 4)
    } else if zeta4 % 2 == 0 {
        format!("{}/2", zeta4 / 2)
    } else {
        format!("{zeta4}/4")
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct DiagramJson {
    side: String,
    n: usize,
    events: Vec<EventJson>,
    #[serde(default)]
    arcs: Option<serde_json::Value>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum EventJson {
    Cup {
        cup: usize,
    },
    Cap {
        cap: usize,
    },
    Cross {
        cross: usize,
        id: String,
        sign: String,
        over: String,
    },
}

impl DiagramJson {
    fn into_diagram(self) -> Result<TangleDiagram, DiagramError> {
        let side = match self.side.as_str() {
            "left" => Side::Left,
            "right" => Side::Right,
            s => return Err(DiagramError::Schema(format!("bad side {s:?}"))),
        };
        let mut events = Vec::new();
        let mut crossings = Vec::new();
        for ev in self.events {
            match ev {
                EventJson::Cup { cup } => events.push(MorseEvent::Cup(cup)),
                EventJson::Cap { cap } => events.push(MorseEvent::Cap(cap)),
                EventJson::Cross {
                    cross,
                    id,
                    sign,
                    over,
                } => {
                    let sign = match sign.as_str() {
                        "+" => CrossingSign::Positive,
                        "-" => CrossingSign::Negative,
                        s => return Err(DiagramError::Schema(format!("bad sign {s:?}"))),
                    };
                    let over = match over.as_str() {
                        "pos" => OverStrand::Pos,
                        "neg" => OverStrand::Neg,
                        s => return Err(DiagramError::Schema(format!("bad over {s:?}"))),
                    };
                    let idx = crossings.len();
                    crossings.push(Crossing {
                        name: id,
                        sign,
                        over,
                    });
                    events.push(MorseEvent::Cross(cross, idx));
                }
            }
        }
        let arc_names = match self.arcs {
            None => None,
            Some(serde_json::Value::String(s)) if s == "auto" => None,
            Some(serde_json::Value::Object(map)) => {
                let mut out = BTreeMap::new();
                for (k, v) in map {
                    let idx: usize = k
                        .parse()
                        .map_err(|_| DiagramError::Schema(format!("bad arc index {k:?}")))?;
                    let name = v
                        .as_str()
                        .ok_or_else(|| DiagramError::Schema("arc name must be a string".into()))?;
                    out.insert(idx, name.to_string());
                }
                Some(out)
            }
            Some(v) => return Err(DiagramError::Schema(format!("bad arcs field {v}"))),
        };
        TangleDiagram::build(side, self.n, events, crossings, arc_names)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}
