//! Deterministic generation of small tangle diagrams for the property
//! suites: braid words of bounded length closed off by every planar
//! matching, deduplicated by their resolution tables.

use std::collections::BTreeSet;

use crate::diagram::{Crossing, CrossingSign, MorseEvent, OverStrand, TangleDiagram};
use crate::planar::{enumerate_matchings, PlanarMatching, Side};

/// Realize a planar matching as a sequence of cap events (innermost first).
fn caps_for(matching: &PlanarMatching) -> Vec<MorseEvent> {
    let mut pairs: Vec<(u8, u8)> = matching.pairs().to_vec();
    let mut alive: Vec<u8> = (1..=2 * matching.n() as u8).collect();
    let mut out = Vec::new();
    while !pairs.is_empty() {
        // find an innermost pair: adjacent among alive points
        let (idx, _) = pairs
            .iter()
            .enumerate()
            .find(|(_, &(a, b))| {
                let ia = alive.iter().position(|&p| p == a).unwrap();
                let ib = alive.iter().position(|&p| p == b).unwrap();
                ib == ia + 1
            })
            .expect("noncrossing matching has an adjacent pair");
        let (a, b) = pairs.remove(idx);
        let ia = alive.iter().position(|&p| p == a).unwrap();
        out.push(MorseEvent::Cap(ia + 1));
        alive.retain(|&p| p != a && p != b);
    }
    out
}

/// A cheap signature identifying the combinatorial content of a diagram:
/// for every resolution, the induced matching and free-circle arc sets.
fn signature(d: &TangleDiagram) -> String {
    let mut out = String::new();
    for mask in 0..(1u32 << d.crossings.len()) {
        let r = d.resolve(mask);
        out.push_str(&format!("{}", r.matching));
        for f in &r.free {
            out.push_str(&format!("{:?}", f.arcs));
        }
        out.push('|');
    }
    out
}

/// All diagrams with exactly `k` crossings on the given side, braid-shaped
/// (crossings first, then a matching closure), over both smoothing
/// conventions per crossing, deduplicated by resolution table.
pub fn braid_diagrams(side: Side, n: usize, k: usize) -> Vec<TangleDiagram> {
    let slots: Vec<usize> = (1..2 * n).collect();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut slot_choice = vec![0usize; k];
    loop {
        // iterate over all over-strand patterns
        for over_bits in 0..(1u32 << k) {
            for closure in enumerate_matchings(n) {
                let mut events = Vec::new();
                let mut crossings = Vec::new();
                for (c, &si) in slot_choice.iter().enumerate() {
                    let over = if over_bits >> c & 1 == 1 {
                        OverStrand::Pos
                    } else {
                        OverStrand::Neg
                    };
                    crossings.push(Crossing {
                        name: format!("c{}", c + 1),
                        sign: CrossingSign::Negative,
                        over,
                    });
                    events.push(MorseEvent::Cross(slots[si], c));
                }
                events.extend(caps_for(&closure));
                let Ok(d) = TangleDiagram::build(side, n, events, crossings, None) else {
                    continue;
                };
                if seen.insert(signature(&d)) {
                    out.push(d);
                }
            }
        }
        // advance the slot choice
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            slot_choice[i] += 1;
            if slot_choice[i] < slots.len() {
                break;
            }
            slot_choice[i] = 0;
            i += 1;
        }
        if k == 0 {
            return out;
        }
    }
}

/// Corpus with up to `max_cross` crossings.
pub fn corpus(side: Side, n: usize, max_cross: usize) -> Vec<TangleDiagram> {
    let mut out = Vec::new();
    for k in 0..=max_cross {
        out.extend(braid_diagrams(side, n, k));
    }
    out
}
