//! Pairing a type A and a type D structure into a graded chain complex over
//! the merged rational-function field, the whole-diagram twisted complex
//! built independently as an oracle, their comparison, and homology ranks.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cleaved::{GenId, Sign};
use crate::diagram::{zeta_string, ResolvedHalf, TangleDiagram};
use crate::field::{rank, FieldError, Matrix, RankMode, RationalFunction, VarRegistry};
use crate::planar::Side;
use crate::type_a::TypeAStructure;
use crate::type_d::TypeDStructure;

/// A based chain complex with quarter-integer grading; the differential
/// raises zeta4 by exactly 4.
pub struct ChainComplex {
    pub registry: VarRegistry,
    pub labels: Vec<String>,
    pub zeta4: Vec<i32>,
    pub diff: Vec<Vec<(usize, RationalFunction)>>,
}

impl ChainComplex {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn d_squared_is_zero(&self) -> bool {
        for i in 0..self.len() {
            let mut acc: HashMap<usize, RationalFunction> = HashMap::new();
            for (j, c) in &self.diff[i] {
                for (k, d) in &self.diff[*j] {
                    let e = acc.entry(*k).or_insert_with(RationalFunction::zero);
                    *e = &*e + &(c * d);
                }
            }
            if acc.values().any(|c| !c.is_zero()) {
                return false;
            }
        }
        true
    }

    pub fn coeff(&self, from: usize, to: usize) -> RationalFunction {
        let mut acc = RationalFunction::zero();
        for (j, c) in &self.diff[from] {
            if *j == to {
                acc = &acc + c;
            }
        }
        acc
    }

    /// Homology rank per zeta4 degree.
    pub fn homology_ranks(&self, mode: RankMode) -> Result<BTreeMap<i32, usize>, FieldError> {
        let degrees: BTreeSet<i32> = self.zeta4.iter().copied().collect();
        let gens_at = |z: i32| -> Vec<usize> {
            (0..self.len()).filter(|&i| self.zeta4[i] == z).collect()
        };
        let rank_between = |z: i32| -> Result<usize, FieldError> {
            let rows = gens_at(z);
            let cols = gens_at(z + 4);
            if rows.is_empty() || cols.is_empty() {
                return Ok(0);
            }
            let col_index: HashMap<usize, usize> =
                cols.iter().enumerate().map(|(i, &g)| (g, i)).collect();
            let mut m: Matrix<RationalFunction> = Matrix::zero(rows.len(), cols.len());
            for (r, &g) in rows.iter().enumerate() {
                for (t, c) in &self.diff[g] {
                    if let Some(&cc) = col_index.get(t) {
                        let cur = m.at(r, cc).clone();
                        m.set(r, cc, &cur + c);
                    }
                }
            }
            rank(&m, mode)
        };
        let mut out = BTreeMap::new();
        for &z in &degrees {
            let n = gens_at(z).len();
            let out_rank = rank_between(z)?;
            let in_rank = if degrees.contains(&(z - 4)) {
                rank_between(z - 4)?
            } else {
                0
            };
            let h = n - out_rank - in_rank;
            if h > 0 {
                out.insert(z, h);
            }
        }
        Ok(out)
    }
}

/// A uniform view of a type D structure for pairing: per state, its
/// boundary link, grading, and the delta terms (coefficient, generator,
/// target). Both the full structure and reduced structures provide one.
pub struct DView<'a> {
    pub algebra: &'a crate::cleaved::Algebra,
    pub registry: &'a VarRegistry,
    pub boundary: Vec<crate::cleaved::LinkId>,
    pub zeta4: Vec<i32>,
    pub terms: Vec<Vec<(RationalFunction, GenId, usize)>>,
    pub labels: Vec<String>,
}

impl<'a> From<&TypeDStructure<'a>> for DView<'a> {
    fn from(d: &TypeDStructure<'a>) -> DView<'a> {
        DView {
            algebra: d.algebra,
            registry: &d.diagram.registry,
            boundary: d.boundary.clone(),
            zeta4: (0..d.states.len()).map(|i| d.zeta4(i)).collect(),
            terms: d
                .delta
                .iter()
                .map(|ts| {
                    ts.iter()
                        .map(|t| (t.coeff.clone(), t.gen, t.target))
                        .collect()
                })
                .collect(),
            labels: (0..d.states.len())
                .map(|i| format!("m{}r{}d{}", d.states[i].matching, d.states[i].mask, dec_tag(&d.states[i].dec)))
                .collect(),
        }
    }
}

fn dec_tag(dec: &[Sign]) -> String {
    dec.iter()
        .map(|d| if *d == Sign::Plus { '+' } else { '-' })
        .collect()
}

/// The box tensor product. The type A and type D sides must share the
/// algebra; variable universes are concatenated (left first).
pub fn box_tensor(a: &TypeAStructure<'_>, d: &DView<'_>) -> ChainComplex {
    assert!(std::ptr::eq(a.algebra, d.algebra), "pairing requires one shared algebra");
    let (registry, shift) =
        VarRegistry::merged(&a.diagram.registry, d.registry).expect("disjoint variable names");
    // generators: pairs with equal boundary
    let mut gens: Vec<(usize, usize)> = Vec::new();
    for x in 0..a.states.len() {
        for y in 0..d.boundary.len() {
            if a.boundary[x] == d.boundary[y] {
                gens.push((x, y));
            }
        }
    }
    let index: HashMap<(usize, usize), usize> =
        gens.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let zeta4: Vec<i32> = gens.iter().map(|&(x, y)| a.zeta4(x) + d.zeta4[y]).collect();
    let labels = gens
        .iter()
        .map(|&(x, y)| format!("{}(x){}", x, d.labels[y]))
        .collect();
    let mut diff = vec![Vec::new(); gens.len()];
    for (i, &(x, y)) in gens.iter().enumerate() {
        let mut acc: HashMap<usize, RationalFunction> = HashMap::new();
        // m1(x) (x) y
        for (&x2, c) in &a.m1[x] {
            if let Some(&j) = index.get(&(x2, y)) {
                let e = acc.entry(j).or_insert_with(RationalFunction::zero);
                *e = &*e + c;
            }
        }
        // (m2 (x) id)(x (x) delta y)
        for (c, g, y2) in &d.terms[y] {
            let acted = a.act_generator(x, *g);
            let c_shifted = c.shift_vars(shift);
            for (&x2, k) in &acted {
                if let Some(&j) = index.get(&(x2, *y2)) {
                    let e = acc.entry(j).or_insert_with(RationalFunction::zero);
                    *e = &*e + &(k * &c_shifted);
                }
            }
        }
        diff[i] = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        diff[i].sort_by_key(|&(j, _)| j);
    }
    ChainComplex {
        registry,
        labels,
        zeta4,
        diff,
    }
}

// ---------------------------------------------------------------------------
// The whole-diagram twisted complex (the oracle).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct GlobalCircle {
    points: Vec<u8>,
    left_arcs: BTreeSet<usize>,
    right_arcs: BTreeSet<usize>,
}

fn global_circles(rl: &ResolvedHalf, rr: &ResolvedHalf) -> (Vec<GlobalCircle>, usize) {
    let n2 = 2 * rl.matching.n() as u8;
    let mut seen = vec![false; n2 as usize + 1];
    let mut out = Vec::new();
    for start in 1..=n2 {
        if seen[start as usize] {
            continue;
        }
        let mut points = Vec::new();
        let mut left_arcs = BTreeSet::new();
        let mut right_arcs = BTreeSet::new();
        let mut p = start;
        loop {
            seen[p as usize] = true;
            points.push(p);
            let q = rr.matching.partner(p);
            right_arcs.extend(rr.pair_arcs[&(p.min(q), p.max(q))].iter().copied());
            seen[q as usize] = true;
            points.push(q);
            let r = rl.matching.partner(q);
            left_arcs.extend(rl.pair_arcs[&(q.min(r), q.max(r))].iter().copied());
            p = r;
            if p == start {
                break;
            }
        }
        points.sort();
        points.dedup();
        out.push(GlobalCircle {
            points,
            left_arcs,
            right_arcs,
        });
    }
    out.sort_by_key(|c| c.points[0]);
    let marked = out.len() - 1;
    debug_assert!(out[marked].points.contains(&n2) || out.iter().any(|c| c.points.contains(&n2)));
    let marked = out.iter().position(|c| c.points.contains(&n2)).unwrap();
    // free circles afterwards
    for f in &rl.free {
        out.push(GlobalCircle {
            points: Vec::new(),
            left_arcs: f.arcs.clone(),
            right_arcs: BTreeSet::new(),
        });
    }
    for f in &rr.free {
        out.push(GlobalCircle {
            points: Vec::new(),
            left_arcs: BTreeSet::new(),
            right_arcs: f.arcs.clone(),
        });
    }
    (out, marked)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct GlobalState {
    mask_l: u32,
    mask_r: u32,
    dec: Vec<Sign>,
}

/// The totally twisted whole-diagram complex: generators are global
/// resolutions with decorations (marked circle minus); the differential is
/// the sum of all surgery components (components decorating the marked
/// circle + are discarded) and the weighted flips of + unmarked circles.
pub fn twisted_khovanov(left: &TangleDiagram, right: &TangleDiagram) -> ChainComplex {
    assert_eq!(left.side, Side::Left);
    assert_eq!(right.side, Side::Right);
    assert_eq!(left.n, right.n);
    let (registry, shift) =
        VarRegistry::merged(&left.registry, &right.registry).expect("disjoint variable names");

    let weight_of = |c: &GlobalCircle| -> RationalFunction {
        let mut acc = RationalFunction::zero();
        for &a in &c.left_arcs {
            acc = &acc + left.arc_weight(a);
        }
        for &a in &c.right_arcs {
            acc = &acc + &right.arc_weight(a).shift_vars(shift);
        }
        acc
    };

    // enumerate states
    let mut states: Vec<GlobalState> = Vec::new();
    let mut circ_cache: HashMap<(u32, u32), (Vec<GlobalCircle>, usize)> = HashMap::new();
    for mask_l in 0..(1u32 << left.crossings.len()) {
        let rl = left.resolve(mask_l);
        for mask_r in 0..(1u32 << right.crossings.len()) {
            let rr = right.resolve(mask_r);
            let (gc, marked) = global_circles(&rl, &rr);
            let k = gc.len();
            circ_cache.insert((mask_l, mask_r), (gc, marked));
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
                states.push(GlobalState {
                    mask_l,
                    mask_r,
                    dec,
                });
            }
        }
    }
    let index: HashMap<GlobalState, usize> = states
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();

    let n_plus = (left.n_plus() + right.n_plus()) as i32;
    let n_minus = (left.n_minus() + right.n_minus()) as i32;
    let zeta4: Vec<i32> = states
        .iter()
        .map(|s| {
            let (gc, marked) = &circ_cache[&(s.mask_l, s.mask_r)];
            let h_rho = (s.mask_l.count_ones() + s.mask_r.count_ones()) as i32;
            let plus = s.dec.iter().filter(|&&d| d == Sign::Plus).count() as i32;
            let minus_unmarked = gc
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != *marked && s.dec[i] == Sign::Minus)
                .count() as i32;
            let h = h_rho - n_minus;
            let q2 = 2 * h_rho + 2 * n_plus - 4 * n_minus + 2 * (plus - minus_unmarked);
            4 * h - q2
        })
        .collect();

    let mut diff: Vec<Vec<(usize, RationalFunction)>> = vec![Vec::new(); states.len()];
    for (i, s) in states.iter().enumerate() {
        let (gc, marked) = circ_cache[&(s.mask_l, s.mask_r)].clone();
        let mut acc: HashMap<usize, RationalFunction> = HashMap::new();
        // vertical flips
        for (ci, c) in gc.iter().enumerate() {
            if ci == marked || s.dec[ci] != Sign::Plus {
                continue;
            }
            let w = weight_of(c);
            if w.is_zero() {
                continue;
            }
            let mut dec = s.dec.clone();
            dec[ci] = Sign::Minus;
            let t = index[&GlobalState {
                mask_l: s.mask_l,
                mask_r: s.mask_r,
                dec,
            }];
            let e = acc.entry(t).or_insert_with(RationalFunction::zero);
            *e = &*e + &w;
        }
        // surgery components over all unresolved crossings of both sides
        for (side, diagram, mask) in [
            (Side::Left, left, s.mask_l),
            (Side::Right, right, s.mask_r),
        ] {
            for c in 0..diagram.crossings.len() {
                if mask >> c & 1 == 1 {
                    continue;
                }
                let (new_l, new_r) = match side {
                    Side::Left => (mask ^ (1 << c), s.mask_r),
                    Side::Right => (s.mask_l, mask ^ (1 << c)),
                };
                let rl = left.resolve(new_l);
                let rr = right.resolve(new_r);
                let (gc2, marked2) = global_circles(&rl, &rr);
                // involved circles: those containing the crossing's port arcs
                let ports = diagram.resolve(mask).port_arcs[c];
                let on_side = |circ: &GlobalCircle, arc: usize| match side {
                    Side::Left => circ.left_arcs.contains(&arc),
                    Side::Right => circ.right_arcs.contains(&arc),
                };
                let mut sources: Vec<usize> = ports
                    .iter()
                    .map(|&a| gc.iter().position(|circ| on_side(circ, a)).unwrap())
                    .collect();
                sources.sort();
                sources.dedup();
                let mut targets: Vec<usize> = ports
                    .iter()
                    .map(|&a| gc2.iter().position(|circ| on_side(circ, a)).unwrap())
                    .collect();
                targets.sort();
                targets.dedup();
                let mut base: Vec<Option<Sign>> = vec![None; gc2.len()];
                for (bi, bc) in gc.iter().enumerate() {
                    if sources.contains(&bi) {
                        continue;
                    }
                    let j = gc2.iter().position(|x| x == bc).expect("untouched global circle");
                    base[j] = Some(s.dec[bi]);
                }
                let mut components: Vec<Vec<Sign>> = Vec::new();
                if sources.len() == 2 {
                    let merged = match (s.dec[sources[0]], s.dec[sources[1]]) {
                        (Sign::Plus, Sign::Plus) => Some(Sign::Plus),
                        (Sign::Plus, Sign::Minus) | (Sign::Minus, Sign::Plus) => Some(Sign::Minus),
                        (Sign::Minus, Sign::Minus) => None,
                    };
                    if let Some(m) = merged {
                        let mut d = base.clone();
                        d[targets[0]] = Some(m);
                        components.push(d.into_iter().map(|x| x.unwrap()).collect());
                    }
                } else {
                    let opts = match s.dec[sources[0]] {
                        Sign::Plus => vec![(Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus)],
                        Sign::Minus => vec![(Sign::Minus, Sign::Minus)],
                    };
                    for (da, db) in opts {
                        let mut d = base.clone();
                        d[targets[0]] = Some(da);
                        d[targets[1]] = Some(db);
                        components.push(d.into_iter().map(|x| x.unwrap()).collect());
                    }
                }
                for dec in components {
                    if dec[marked2] == Sign::Plus {
                        continue; // reduced theory: the marked circle stays -
                    }
                    let t = index[&GlobalState {
                        mask_l: new_l,
                        mask_r: new_r,
                        dec,
                    }];
                    let e = acc.entry(t).or_insert_with(RationalFunction::zero);
                    *e = &*e + &RationalFunction::one();
                }
            }
        }
        diff[i] = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        diff[i].sort_by_key(|&(j, _)| j);
    }

    let labels = states
        .iter()
        .map(|s| format!("L{}R{}d{}", s.mask_l, s.mask_r, dec_tag(&s.dec)))
        .collect();
    ChainComplex {
        registry,
        labels,
        zeta4,
        diff,
    }
}

/// The canonical identification of box-tensor generators with global
/// states: pair (x, y) assembles x's resolution, y's resolution, and the
/// union of their decorations.
pub fn canonical_bijection(
    a: &TypeAStructure<'_>,
    d: &TypeDStructure<'_>,
    paired: &ChainComplex,
    oracle: &ChainComplex,
) -> Option<Vec<usize>> {
    // rebuild the pair list in the order box_tensor used
    let mut gens: Vec<(usize, usize)> = Vec::new();
    for x in 0..a.states.len() {
        for y in 0..d.states.len() {
            if a.boundary[x] == d.boundary[y] {
                gens.push((x, y));
            }
        }
    }
    debug_assert_eq!(gens.len(), paired.len());
    let mut out = Vec::with_capacity(gens.len());
    for &(x, y) in &gens {
        let xs = &a.states[x];
        let ys = &d.states[y];
        let rl = a.diagram.resolve(xs.mask);
        let rr = d.diagram.resolve(ys.mask);
        let (gc, _) = global_circles(&rl, &rr);
        let xcs = &a.circles[x];
        let ycs = &d.circles[y];
        let mut dec = Vec::with_capacity(gc.len());
        for c in &gc {
            let sign = if !c.points.is_empty() {
                // cleaved: read from either side, they agree on the boundary
                let i = xcs
                    .circles
                    .iter()
                    .position(|cc| cc.points == c.points)
                    .expect("cleaved circle on the A side");
                xs.dec[i]
            } else if !c.left_arcs.is_empty() {
                let i = xcs
                    .circles
                    .iter()
                    .position(|cc| cc.is_free() && cc.arcs == c.left_arcs)
                    .expect("left free circle");
                xs.dec[i]
            } else {
                let i = ycs
                    .circles
                    .iter()
                    .position(|cc| cc.is_free() && cc.arcs == c.right_arcs)
                    .expect("right free circle");
                ys.dec[i]
            };
            dec.push(sign);
        }
        let label = format!(
            "L{}R{}d{}",
            xs.mask,
            ys.mask,
            dec_tag(&dec)
        );
        let idx = oracle.labels.iter().position(|l| l == &label)?;
        out.push(idx);
    }
    Some(out)
}

/// Entrywise comparison of two complexes under a generator bijection.
pub fn compare(c1: &ChainComplex, c2: &ChainComplex, bijection: &[usize]) -> bool {
    if c1.len() != c2.len() || bijection.len() != c1.len() {
        return false;
    }
    for i in 0..c1.len() {
        if c1.zeta4[i] != c2.zeta4[bijection[i]] {
            return false;
        }
        for j in 0..c1.len() {
            if c1.coeff(i, j) != c2.coeff(bijection[i], bijection[j]) {
                return false;
            }
        }
    }
    true
}

#[derive(Serialize)]
pub struct ComplexDump {
    pub generators: Vec<GenDump>,
    pub differential: Vec<DiffDump>,
    pub homology: BTreeMap<String, usize>,
}

#[derive(Serialize)]
pub struct GenDump {
    pub id: usize,
    pub zeta: String,
}

#[derive(Serialize)]
pub struct DiffDump {
    pub from: usize,
    pub to: usize,
    pub coeff: String,
}

pub fn dump(c: &ChainComplex, mode: RankMode) -> Result<ComplexDump, FieldError> {
    let ranks = c.homology_ranks(mode)?;
    Ok(ComplexDump {
        generators: (0..c.len())
            .map(|i| GenDump {
                id: i,
                zeta: zeta_string(c.zeta4[i]),
            })
            .collect(),
        differential: (0..c.len())
            .flat_map(|i| {
                c.diff[i].iter().map(move |(j, coeff)| (i, *j, coeff))
            })
            .map(|(i, j, coeff)| DiffDump {
                from: i,
                to: j,
                coeff: coeff.display(&c.registry).to_string(),
            })
            .collect(),
        homology: ranks
            .into_iter()
            .map(|(z, r)| (zeta_string(z), r))
            .collect(),
    })
}
