//! Property suites over the generated corpus: structure equations, grading,
//! module relations, the algebra differential, and state counts.

use borkh::cleaved::{Algebra, Elem, Word};
use borkh::corpus;
use borkh::diagram::combine;
use borkh::planar::{enumerate_matchings, Side};
use borkh::type_a;
use borkh::type_d;

/// Independent state count: sum over resolutions and opposite matchings of
/// 2^(number of unmarked circles).
fn brute_state_count(d: &borkh::diagram::TangleDiagram) -> usize {
    let mut total = 0usize;
    for m in enumerate_matchings(d.n) {
        for mask in 0..(1u32 << d.crossings.len()) {
            let cs = combine(&d.resolve(mask), &m);
            total += 1 << (cs.circles.len() - 1);
        }
    }
    total
}

#[test]
fn type_d_suite_n2_up_to_3_crossings() {
    let alg = Algebra::new(2);
    let diagrams = corpus::corpus(Side::Right, 2, 3);
    assert!(diagrams.len() >= 20);
    for d in &diagrams {
        let t = type_d::build_delta(d, &alg);
        assert_eq!(t.states.len(), brute_state_count(d));
        let r = type_d::verify_structure(&t);
        assert!(r.pass(), "structure fails on {:?}: {:?}", d.events, r.failures);
        let g = type_d::verify_grading(&t);
        assert!(g.pass(), "grading fails on {:?}: {:?}", d.events, g.failures);
    }
}

#[test]
fn type_d_pieces_anticommute_n2() {
    let alg = Algebra::new(2);
    for d in corpus::corpus(Side::Right, 2, 2) {
        let dv = type_d::build_delta_v(d_ref(&d), &alg);
        let dt = type_d::build_delta_t(d_ref(&d), &alg);
        assert!(type_d::verify_structure(&dv).pass(), "vertical alone fails");
        assert!(type_d::verify_structure(&dt).pass(), "surgery alone fails");
        // mixed two-step sums vanish: check via the total structure minus
        // no. Verify the anticommutator directly.
        let mut failures = Vec::new();
        for src in 0..dv.states.len() {
            let mut blocks: std::collections::BTreeMap<usize, Elem> = Default::default();
            for t1 in &dv.delta[src] {
                for t2 in &dt.delta[t1.target] {
                    let w = Word::single(&alg, t1.gen)
                        .concat(&Word::single(&alg, t2.gen))
                        .unwrap();
                    blocks
                        .entry(t2.target)
                        .or_default()
                        .add_term(w, &t1.coeff * &t2.coeff);
                }
                // the differential of vertical coefficients vanishes
            }
            for t1 in &dt.delta[src] {
                for t2 in &dv.delta[t1.target] {
                    let w = Word::single(&alg, t1.gen)
                        .concat(&Word::single(&alg, t2.gen))
                        .unwrap();
                    blocks
                        .entry(t2.target)
                        .or_default()
                        .add_term(w, &t1.coeff * &t2.coeff);
                }
            }
            for (tgt, e) in blocks {
                if alg.is_zero(&e) != Ok(true) {
                    failures.push((src, tgt));
                }
            }
        }
        assert!(failures.is_empty(), "anticommutator fails on {:?}: {failures:?}", d.events);
    }
}

fn d_ref(d: &borkh::diagram::TangleDiagram) -> &borkh::diagram::TangleDiagram {
    d
}

#[test]
fn type_d_suite_n1() {
    let alg = Algebra::new(1);
    for d in corpus::corpus(Side::Right, 1, 3) {
        let t = type_d::build_delta(&d, &alg);
        assert!(type_d::verify_structure(&t).pass());
        assert!(type_d::verify_grading(&t).pass());
    }
}

#[test]
fn type_d_suite_n3_up_to_2_crossings() {
    let alg = Algebra::new(3);
    let diagrams = corpus::corpus(Side::Right, 3, 2);
    for d in &diagrams {
        let t = type_d::build_delta(d, &alg);
        let r = type_d::verify_structure(&t);
        assert!(r.pass(), "structure fails on {:?}: {:?}", d.events, r.failures);
        assert!(type_d::verify_grading(&t).pass());
    }
}

#[test]
fn type_a_suite_n2_up_to_2_crossings() {
    let alg = Algebra::new(2);
    for d in corpus::corpus(Side::Left, 2, 2) {
        let a = type_a::build(&d, &alg);
        let r = type_a::verify_ainf(&a);
        assert!(r.pass(), "module relations fail on {:?}: {:?}", d.events, r.failures);
    }
}

#[test]
fn type_a_corrupted_action_fails() {
    // negative control: dropping the decoration-type part of the left
    // decoration action breaks the mixed relation. Emulate by checking that
    // the relation actually uses it: a kinked left tangle where the
    // decoration-type surgery exists.
    let alg = Algebra::new(2);
    let diagrams = corpus::corpus(Side::Left, 2, 2);
    // zero out the differential on structures that have one; at least one
    // diagram must then fail the mixed relation
    let mut candidates = 0;
    let mut failed = 0;
    for d in &diagrams {
        let mut a = type_a::build(d, &alg);
        if a.m1.iter().all(|v| v.is_empty()) {
            continue;
        }
        candidates += 1;
        for v in &mut a.m1 {
            v.clear();
        }
        if !type_a::verify_ainf(&a).pass() {
            failed += 1;
        }
    }
    assert!(candidates > 0, "no fixture with nonzero differential");
    assert!(failed > 0, "corruption was never detected");
}

#[test]
fn d_gamma_squares_to_zero_n3() {
    let alg = Algebra::new(3);
    for link in alg.enumerate_links() {
        for g in alg.gens_from(link) {
            let d = alg.d_gamma(g);
            let dd = alg.d_elem(&d);
            assert!(dd.is_empty());
            // and d of the element is zero blockwise where testable
            if !d.is_empty() {
                // every relation instance must be killed by is_zero
                assert_eq!(alg.is_zero(&Elem::new()), Ok(true));
            }
        }
    }
}

#[test]
fn leibniz_on_composable_pairs_n3() {
    let alg = Algebra::new(3);
    let links = alg.enumerate_links();
    for &link in links.iter() {
        for g1 in alg.gens_from(link) {
            let t = alg.generator(g1).target;
            for g2 in alg.gens_from(t) {
                let w = Word::single(&alg, g1).concat(&Word::single(&alg, g2)).unwrap();
                let mut lhs = alg.d_elem(&Elem::from_word(w));
                lhs.add(&alg.d_gamma(g1).mul(&Elem::from_gen(&alg, g2)));
                lhs.add(&Elem::from_gen(&alg, g1).mul(&alg.d_gamma(g2)));
                assert!(lhs.is_empty(), "Leibniz fails");
            }
        }
    }
}

#[test]
fn relations_hold_and_are_homogeneous_n3() {
    let alg = Algebra::new(3);
    for link in alg.enumerate_links() {
        for rel in alg.relations_from(link) {
            assert_eq!(alg.is_zero(&rel), Ok(true), "relation not in its own span");
            let zetas: Vec<i32> = rel
                .terms
                .keys()
                .map(|w| w.gens.iter().map(|&g| alg.generator(g).zeta4()).sum())
                .collect();
            assert!(zetas.windows(2).all(|p| p[0] == p[1]));
        }
    }
}

#[test]
fn mirror_state_counts_agree() {
    // building the module side on the mirror of a right fixture gives the
    // same number of states
    let alg = Algebra::new(2);
    for d in corpus::corpus(Side::Right, 2, 2) {
        let mut mirror = d.clone();
        mirror.side = Side::Left;
        let t = type_d::build_delta(&d, &alg);
        let a = type_a::build(&mirror, &alg);
        assert_eq!(t.states.len(), a.states.len());
    }
}

#[test]
fn type_a_suite_n3_small() {
    // exercises the n=3 relation instances (including the three-path
    // relations) against the independently built module action
    let alg = Algebra::new(3);
    for d in corpus::corpus(Side::Left, 3, 1) {
        let a = type_a::build(&d, &alg);
        let r = type_a::verify_ainf(&a);
        assert!(r.pass(), "module relations fail on {:?}: {:?}", d.events, r.failures);
    }
}

#[test]
fn corrupted_structure_fails_n3() {
    let alg = Algebra::new(3);
    let diagrams = corpus::corpus(Side::Right, 3, 1);
    let mut detected = false;
    for d in &diagrams {
        let mut t = type_d::build_delta(d, &alg);
        let Some((src, pos)) = (0..t.states.len())
            .flat_map(|i| (0..t.delta[i].len()).map(move |k| (i, k)))
            .find(|&(i, k)| {
                matches!(
                    alg.generator(t.delta[i][k].gen).kind,
                    borkh::cleaved::GenKind::Bridge { .. }
                ) && !t.delta[t.delta[i][k].target].is_empty()
            })
        else {
            continue;
        };
        t.delta[src].remove(pos);
        if !type_d::verify_structure(&t).pass() {
            detected = true;
            break;
        }
    }
    assert!(detected, "no corruption detected at n=3");
}
