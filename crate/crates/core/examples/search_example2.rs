//! Search for a five-crossing right tangle whose reduced structure carries
//! the full coefficient pattern: two single-inverse and two double-inverse
//! idempotent transitions, two matching-changing crossings, three circle
//! splitters, and a combined decoration term on the state with an unmarked
//! + circle. The first hit is frozen as the `example2_right` fixture.

use borkh::cleaved::{Algebra, GenKind};
use borkh::corpus;
use borkh::planar::{PlanarMatching, Side};
use borkh::reduce::closed_form;
use borkh::type_d;

fn main() {
    let parallel = PlanarMatching::new(vec![(1, 2), (3, 4)]);
    let nested = PlanarMatching::new(vec![(1, 4), (2, 3)]);
    let alg = Algebra::new(2);
    let mut tried = 0;
    for d in corpus::braid_diagrams(Side::Right, 2, 5) {
        // cheap filters on resolution tables
        let r0 = d.resolve(0);
        if r0.matching != parallel || !r0.free.is_empty() { continue; }
        let mut changers = vec![];
        let mut splitters = vec![];
        for c in 0..5 {
            let r = d.resolve(1 << c);
            if r.matching != parallel { changers.push(c); }
            else if r.free.len() == 1 { splitters.push(c); }
        }
        if changers.len() != 2 || splitters.len() != 3 { continue; }
        // pair coefficients
        let mut single = 0; let mut double = 0; let mut bad = false;
        for i in 0..5 {
            for j in i+1..5 {
                let full = (1 << i) | (1 << j);
                let rf = d.resolve(full);
                if !rf.free.is_empty() || rf.matching != parallel { continue; }
                let mut inv = 0;
                for inter in [1 << i, 1 << j] {
                    if d.resolve(inter).free.len() == 1 { inv += 1; }
                }
                match inv { 0 => {}, 1 => single += 1, 2 => double += 1, _ => bad = true }
            }
        }
        if bad || single != 2 || double != 2 { continue; }
        tried += 1;
        // full check via the closed form
        let t = type_d::build_delta(&d, &alg);
        let (alive, cf) = closed_form(&t);
        // state xi_{00000,1}: nested left matching, mask 0, single circle -
        let Some(&s1) = alive.iter().find(|&&i| {
            let s = &t.states[i];
            s.matching == nested && s.mask == 0 && s.dec.len() == 1
        }) else { continue };
        let mut idem_single = 0; let mut idem_double = 0; let mut rb = 0; let mut lb = 0; let mut other = 0;
        for (&(i, j), e) in &cf.terms {
            if i != s1 { continue; }
            for (w, c) in &e.terms {
                if w.is_empty() {
                    // classify by the number of intermediates with free
                    // circles for the two flipped crossings
                    let diff = t.states[j].mask ^ t.states[s1].mask;
                    let mut inv = 0;
                    for cx in 0..5 {
                        if diff >> cx & 1 == 1 && d.resolve(t.states[s1].mask | (1 << cx)).free.len() == 1 {
                            inv += 1;
                        }
                    }
                    match inv { 1 => idem_single += 1, 2 => idem_double += 1, _ => other += 1 }
                } else {
                    match alg.generator(w.gens[0]).kind {
                        GenKind::Bridge { side: Side::Right, .. } => rb += 1,
                        GenKind::Bridge { side: Side::Left, .. } => lb += 1,
                        _ => other += 1,
                    }
                }
            }
        }
        if !(idem_single == 2 && idem_double == 2 && rb == 2 && lb == 1 && other == 0) {
            continue;
        }
        // state xi_{00000,2,+}
        let Some(&s2) = alive.iter().find(|&&i| {
            let s = &t.states[i];
            s.matching == parallel && s.mask == 0 && s.dec.len() == 2
                && s.dec.contains(&borkh::cleaved::Sign::Plus)
        }) else { continue };
        let mut dec_terms = 0; let mut terms2 = 0;
        let mut kinds = vec![];
        for (&(i, _), e) in &cf.terms {
            if i != s2 { continue; }
            for (w, _) in &e.terms {
                terms2 += 1;
                if w.is_empty() { kinds.push("idem".to_string()); continue; }
                let k = alg.generator(w.gens[0]).kind;
                kinds.push(borkh::cleaved::describe_kind(&k));
                if matches!(k, GenKind::Dec { .. }) { dec_terms += 1; }
            }
        }
        if dec_terms != 2 || terms2 != 9 {
            continue;
        }
        println!("FOUND: events {:?}", d.events);
        for (ci, cr) in d.crossings.iter().enumerate() {
            println!("  crossing {ci}: over {:?}", cr.over);
        }
        println!("  changers {:?} splitters {:?}", changers, splitters);
        println!("  xi1 terms: singles {idem_single} doubles {idem_double} rb {rb} lb {lb}");
        println!("  xi2 kinds: {kinds:?}");
        // show the actual xi1 row
        for (&(i, j), e) in &cf.terms {
            if i != s1 { continue; }
            for (w, c) in &e.terms {
                let name = if w.is_empty() { "I".into() } else { borkh::cleaved::describe_kind(&alg.generator(w.gens[0]).kind) };
                println!("    -> state {j} [{}] {}", name, c.display(&d.registry));
            }
        }
        return;
    }
    println!("no hit; {tried} candidates passed the cheap filters");
}
