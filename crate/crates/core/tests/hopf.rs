//! The two-component link fixture: structure tables, pairing, and homology,
//! compared against the hand-computed coefficients.

use borkh::cleaved::{Algebra, GenKind, Sign};
use borkh::diagram::TangleDiagram;
use borkh::field::{Polynomial, RationalFunction, rank, Matrix, RankMode};
use borkh::fixtures;
use borkh::pairing;
use borkh::planar::{PlanarMatching, Side};
use borkh::type_a;
use borkh::type_d;
use num_traits::Zero;

fn parallel() -> PlanarMatching {
    PlanarMatching::new(vec![(1, 2), (3, 4)])
}

fn nested() -> PlanarMatching {
    PlanarMatching::new(vec![(1, 4), (2, 3)])
}

/// Index the six states in the order of the worked example.
fn hopf_d_states(d: &type_d::TypeDStructure<'_>) -> [usize; 6] {
    let find = |matching: &PlanarMatching, mask: u32, dec: &[Sign]| -> usize {
        (0..d.states.len())
            .find(|&i| {
                let s = &d.states[i];
                s.matching == *matching && s.mask == mask && s.dec == dec
            })
            .expect("state")
    };
    [
        find(&parallel(), 0, &[Sign::Plus, Sign::Minus]),
        find(&parallel(), 0, &[Sign::Minus, Sign::Minus]),
        find(&nested(), 0, &[Sign::Minus]),
        find(&nested(), 1, &[Sign::Minus, Sign::Plus]),
        find(&nested(), 1, &[Sign::Minus, Sign::Minus]),
        find(&parallel(), 1, &[Sign::Minus]),
    ]
}

fn wsum(vars: &[u32]) -> RationalFunction {
    RationalFunction::from_poly(Polynomial::sum_of_vars(vars.iter().copied()))
}

#[test]
fn type_d_reproduces_the_structure_table() {
    let diagram = TangleDiagram::parse(fixtures::HOPF_RIGHT).unwrap();
    let alg = Algebra::new(2);
    let d = type_d::build_delta(&diagram, &alg);
    assert_eq!(d.states.len(), 6);
    let xi = hopf_d_states(&d);

    // zeta gradings: -1/4, 1/4, 0, 1/4, 3/4, 1/2
    let zetas: Vec<i32> = xi.iter().map(|&i| d.zeta4(i)).collect();
    assert_eq!(zetas, vec![-1, 1, 0, 1, 3, 2]);

    // delta(xi1) = e_l (x) xi3 + e_r (x) xi6 + (le_C + (x3+x4) re_C) (x) xi2
    let terms = &d.delta[xi[0]];
    assert_eq!(terms.len(), 4);
    let mut saw = [false; 4];
    for t in terms {
        let gen = d.algebra.generator(t.gen);
        match (gen.kind, t.target) {
            (GenKind::Bridge { side: Side::Left, .. }, tgt) if tgt == xi[2] => {
                assert!(t.coeff == RationalFunction::from_poly(Polynomial::one()));
                saw[0] = true;
            }
            (GenKind::Bridge { side: Side::Right, .. }, tgt) if tgt == xi[5] => {
                saw[1] = true;
            }
            (GenKind::Dec { side: Side::Left, .. }, tgt) if tgt == xi[1] => {
                saw[2] = true;
            }
            (GenKind::Dec { side: Side::Right, .. }, tgt) if tgt == xi[1] => {
                // arc names x3, x4 are registry ids 1, 0
                let x3 = diagram.registry.lookup("x3").unwrap();
                let x4 = diagram.registry.lookup("x4").unwrap();
                assert!(t.coeff == wsum(&[x3, x4]), "coefficient of re_C");
                saw[3] = true;
            }
            other => panic!("unexpected term {other:?}"),
        }
    }
    assert_eq!(saw, [true; 4]);

    // delta(xi3) = e_r (x) xi5 + e_l (x) xi2
    let terms = &d.delta[xi[2]];
    assert_eq!(terms.len(), 2);
    for t in terms {
        let gen = d.algebra.generator(t.gen);
        match gen.kind {
            GenKind::Bridge { side: Side::Right, .. } => assert_eq!(t.target, xi[4]),
            GenKind::Bridge { side: Side::Left, .. } => assert_eq!(t.target, xi[1]),
            k => panic!("unexpected coefficient {k:?}"),
        }
    }

    // delta(xi4) = e_l (x) xi6 + (le_D + (x2+x3) re_D) (x) xi5
    let terms = &d.delta[xi[3]];
    assert_eq!(terms.len(), 3);
    for t in terms {
        let gen = d.algebra.generator(t.gen);
        match gen.kind {
            GenKind::Bridge { side: Side::Left, .. } => assert_eq!(t.target, xi[5]),
            GenKind::Dec { side: Side::Left, .. } => assert_eq!(t.target, xi[4]),
            GenKind::Dec { side: Side::Right, .. } => {
                assert_eq!(t.target, xi[4]);
                let x2 = diagram.registry.lookup("x2").unwrap();
                let x3 = diagram.registry.lookup("x3").unwrap();
                assert!(t.coeff == wsum(&[x2, x3]), "coefficient of re_D");
            }
            k => panic!("unexpected coefficient {k:?}"),
        }
    }

    // delta(xi6) = e_l (x) xi5; delta(xi2) = delta(xi5) = 0
    let terms = &d.delta[xi[5]];
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0].target, xi[4]);
    assert!(d.delta[xi[1]].is_empty());
    assert!(d.delta[xi[4]].is_empty());
}

#[test]
fn type_d_structure_and_grading_verify() {
    let diagram = TangleDiagram::parse(fixtures::HOPF_RIGHT).unwrap();
    let alg = Algebra::new(2);
    let d = type_d::build_delta(&diagram, &alg);
    let r = type_d::verify_structure(&d);
    assert!(r.pass(), "{:?}", r.failures);
    let g = type_d::verify_grading(&d);
    assert!(g.pass(), "{:?}", g.failures);

    // pieces: the vertical structure alone and the surgery structure alone
    // verify, and the mixed two-step sums vanish
    let dv = type_d::build_delta_v(&diagram, &alg);
    assert!(type_d::verify_structure(&dv).pass());
    let dt = type_d::build_delta_t(&diagram, &alg);
    assert!(type_d::verify_structure(&dt).pass());
}

#[test]
fn corrupted_delta_fails_verification() {
    let diagram = TangleDiagram::parse(fixtures::HOPF_RIGHT).unwrap();
    let alg = Algebra::new(2);
    let mut d = type_d::build_delta(&diagram, &alg);
    // delete a bridge term (these feed two-step blocks)
    let (src, pos) = (0..d.states.len())
        .flat_map(|i| (0..d.delta[i].len()).map(move |k| (i, k)))
        .find(|&(i, k)| {
            matches!(
                d.algebra.generator(d.delta[i][k].gen).kind,
                GenKind::Bridge { .. }
            ) && !d.delta[d.delta[i][k].target].is_empty()
        })
        .unwrap();
    d.delta[src].remove(pos);
    let r = type_d::verify_structure(&d);
    assert!(!r.pass(), "corrupted structure must fail");
}

#[test]
fn empty_tangle_has_zero_delta() {
    let diagram =
        TangleDiagram::parse(r#"{"side":"right","n":1,"events":[{"cap":1}]}"#).unwrap();
    let alg = Algebra::new(1);
    let d = type_d::build_delta(&diagram, &alg);
    assert_eq!(d.states.len(), 1);
    assert!(d.delta[0].is_empty());
}

#[test]
fn transport_preserves_the_structure_equation() {
    let diagram = TangleDiagram::parse(fixtures::HOPF_RIGHT).unwrap();
    let alg = Algebra::new(2);
    let d = type_d::build_delta(&diagram, &alg);
    // x3 -> x3 + x4 (and the rest fixed) is injective on supports
    let x3 = diagram.registry.lookup("x3").unwrap();
    let x4 = diagram.registry.lookup("x4").unwrap();
    let mut s = borkh::field::Substitution::identity(4);
    s.assign(x3, Polynomial::sum_of_vars([x3, x4]));
    let dt = type_d::transport(&d, &s).unwrap();
    assert!(type_d::verify_structure(&dt).pass());
    assert!(type_d::verify_grading(&dt).pass());

    // identity transport is the identity; transports compose
    let id = borkh::field::Substitution::identity(4);
    let d_id = type_d::transport(&d, &id).unwrap();
    for i in 0..d.states.len() {
        assert_eq!(d.delta[i].len(), d_id.delta[i].len());
        for (a, b) in d.delta[i].iter().zip(&d_id.delta[i]) {
            assert!(a.coeff == b.coeff);
        }
    }
    let twice = type_d::transport(&dt, &s).unwrap();
    let composed = type_d::transport(&d, &s.then(&s).unwrap()).unwrap();
    for i in 0..d.states.len() {
        for (a, b) in twice.delta[i].iter().zip(&composed.delta[i]) {
            assert!(a.coeff == b.coeff, "transport composition");
        }
    }
}

fn hopf_a_states(a: &type_a::TypeAStructure<'_>) -> [usize; 6] {
    let find = |mask: u32, matching: &PlanarMatching, dec: &[Sign]| -> usize {
        (0..a.states.len())
            .find(|&i| {
                let s = &a.states[i];
                s.mask == mask && s.matching == *matching && s.dec == dec
            })
            .expect("state")
    };
    // boundaries mirror the type D side: the left matching comes from the
    // resolution (0 -> parallel, 1 -> nested), the right matching is chosen
    [
        find(0, &parallel(), &[Sign::Plus, Sign::Minus]),
        find(0, &parallel(), &[Sign::Minus, Sign::Minus]),
        find(1, &parallel(), &[Sign::Minus]),
        find(1, &nested(), &[Sign::Minus, Sign::Plus]),
        find(1, &nested(), &[Sign::Minus, Sign::Minus]),
        find(0, &nested(), &[Sign::Minus]),
    ]
}

#[test]
fn type_a_reproduces_the_action_table() {
    let left = TangleDiagram::parse(fixtures::HOPF_LEFT).unwrap();
    let alg = Algebra::new(2);
    let a = type_a::build(&left, &alg);
    assert_eq!(a.states.len(), 6);
    let xi = hopf_a_states(&a);

    // zeta gradings: -1/4, 1/4, 1/2, 1/4, 3/4, 0
    let zetas: Vec<i32> = xi.iter().map(|&i| a.zeta4(i)).collect();
    assert_eq!(zetas, vec![-1, 1, 2, 1, 3, 0]);

    // m1 vanishes identically
    for i in 0..a.states.len() {
        assert!(a.m1[i].is_empty(), "m1 must vanish on this fixture");
    }

    let x6 = left.registry.lookup("x6").unwrap();
    let x7 = left.registry.lookup("x7").unwrap();
    let x8 = left.registry.lookup("x8").unwrap();

    // collect the eleven nonzero action lines
    let mut lines: Vec<(usize, String, Vec<(usize, RationalFunction)>)> = Vec::new();
    for (pos, &i) in xi.iter().enumerate() {
        for g in a.algebra.gens_from(a.boundary[i]) {
            let gen = a.algebra.generator(g);
            if gen.kind == GenKind::Idempotent {
                continue;
            }
            let out = a.act_generator(i, g);
            if out.is_empty() {
                continue;
            }
            let mut items: Vec<(usize, RationalFunction)> = out
                .iter()
                .map(|(&t, c)| (xi.iter().position(|&x| x == t).unwrap(), c.clone()))
                .collect();
            items.sort_by_key(|&(t, _)| t);
            lines.push((pos, borkh::cleaved::describe_kind(&gen.kind), items));
        }
    }
    // ten nonzero action lines; together with the vanishing differential
    // these are the eleven lines of the worked table
    assert_eq!(lines.len(), 10, "action lines: {lines:?}");

    let expect = |src: usize, pred: &dyn Fn(&str) -> bool, tgt: usize, coeff: &RationalFunction| {
        assert!(
            lines.iter().any(|(s, k, items)| {
                *s == src
                    && pred(k)
                    && items.len() == 1
                    && items[0].0 == tgt
                    && items[0].1 == *coeff
            }),
            "missing action line from xi{} ({lines:?})",
            src + 1
        );
    };
    let one = RationalFunction::from_poly(Polynomial::one());
    let is_lbridge = |k: &str| k.starts_with("lbridge");
    let is_rbridge = |k: &str| k.starts_with("rbridge");
    let is_ldec = |k: &str| k.starts_with("le_");
    let is_rdec = |k: &str| k.starts_with("re_");

    expect(0, &is_lbridge, 2, &one); // m2(x1, e_l) = x3
    expect(0, &is_rbridge, 5, &one); // m2(x1, e_r) = x6
    expect(0, &is_rdec, 1, &one); // m2(x1, re_C) = x2
    expect(0, &is_ldec, 1, &wsum(&[x7, x8])); // m2(x1, le_C) = (x7+x8) x2
    expect(2, &is_rbridge, 4, &one); // m2(x3, e_r) = x5
    expect(3, &is_rbridge, 2, &one); // m2(x4, e_r) = x3
    expect(3, &is_rdec, 4, &one); // m2(x4, re_D) = x5
    expect(3, &is_ldec, 4, &wsum(&[x6, x7])); // m2(x4, le_D) = (x6+x7) x5
    expect(5, &is_rbridge, 1, &one); // m2(x6, e_r) = x2
    expect(5, &is_lbridge, 4, &one); // m2(x6, e_l) = x5
    // xi2 and xi5 support no actions: their boundaries have no + circle
    assert!(lines.iter().all(|(s, _, _)| *s != 1 && *s != 4));
}

#[test]
fn type_a_module_relations_verify() {
    let left = TangleDiagram::parse(fixtures::HOPF_LEFT).unwrap();
    let alg = Algebra::new(2);
    let a = type_a::build(&left, &alg);
    let r = type_a::verify_ainf(&a);
    assert!(r.pass(), "{:?}", r.failures);
}

#[test]
fn pairing_matches_the_displayed_differential() {
    let left = TangleDiagram::parse(fixtures::HOPF_LEFT).unwrap();
    let right = TangleDiagram::parse(fixtures::HOPF_RIGHT).unwrap();
    let alg = Algebra::new(2);
    let a = type_a::build(&left, &alg);
    let d = type_d::build_delta(&right, &alg);
    let paired = pairing::box_tensor(&a, &(&d).into());
    assert_eq!(paired.len(), 6);
    assert!(paired.d_squared_is_zero());

    // paired zeta gradings: -1/2, 1/2, 1/2, 1/2, 3/2, 1/2
    let mut zetas = paired.zeta4.clone();
    zetas.sort();
    assert_eq!(zetas, vec![-2, 2, 2, 2, 2, 6]);

    // locate the paired generators via the type D state table
    let dx = hopf_d_states(&d);
    let ax = hopf_a_states(&a);
    let mut pair_index = [usize::MAX; 6];
    let mut gens: Vec<(usize, usize)> = Vec::new();
    for x in 0..a.states.len() {
        for y in 0..d.states.len() {
            if a.boundary[x] == d.boundary[y] {
                gens.push((x, y));
            }
        }
    }
    for k in 0..6 {
        pair_index[k] = gens
            .iter()
            .position(|&(x, y)| x == ax[k] && y == dx[k])
            .expect("paired generator");
    }

    // d(xi1) = xi3 + xi6 + (x3+x4+x7+x8) xi2
    let reg = &paired.registry;
    let c12 = paired.coeff(pair_index[0], pair_index[1]);
    let expected = Polynomial::sum_of_vars(
        ["x3", "x4", "x7", "x8"].iter().map(|n| reg.lookup(n).unwrap()),
    );
    assert!(c12 == RationalFunction::from_poly(expected));
    assert!(!paired.coeff(pair_index[0], pair_index[2]).is_zero());
    assert!(!paired.coeff(pair_index[0], pair_index[5]).is_zero());
    // d(xi3) = xi5, d(xi6) = xi5
    assert!(!paired.coeff(pair_index[2], pair_index[4]).is_zero());
    assert!(!paired.coeff(pair_index[5], pair_index[4]).is_zero());
    // d(xi4) = (x2+x3+x6+x7) xi5
    let c45 = paired.coeff(pair_index[3], pair_index[4]);
    let expected = Polynomial::sum_of_vars(
        ["x2", "x3", "x6", "x7"].iter().map(|n| reg.lookup(n).unwrap()),
    );
    assert!(c45 == RationalFunction::from_poly(expected));
    // nothing else
    assert!(paired.coeff(pair_index[1], pair_index[4]).is_zero());

    // homology: rank two, concentrated in degree 1/2
    let ranks = paired.homology_ranks(RankMode::Exact).unwrap();
    assert_eq!(ranks.len(), 1);
    assert_eq!(ranks.get(&2), Some(&2));
    let rr = paired.homology_ranks(RankMode::Randomized { seed: 11 }).unwrap();
    assert_eq!(ranks, rr);
}

#[test]
fn pairing_matches_the_oracle() {
    let left = TangleDiagram::parse(fixtures::HOPF_LEFT).unwrap();
    let right = TangleDiagram::parse(fixtures::HOPF_RIGHT).unwrap();
    let alg = Algebra::new(2);
    let a = type_a::build(&left, &alg);
    let d = type_d::build_delta(&right, &alg);
    let paired = pairing::box_tensor(&a, &(&d).into());
    let oracle = pairing::twisted_khovanov(&left, &right);
    assert!(oracle.d_squared_is_zero());
    let bij = pairing::canonical_bijection(&a, &d, &paired, &oracle).expect("bijection");
    assert!(pairing::compare(&paired, &oracle, &bij));

    // negative control: deleting a differential entry breaks the comparison
    let mut broken = pairing::box_tensor(&a, &(&d).into());
    let src = (0..broken.len()).find(|&i| !broken.diff[i].is_empty()).unwrap();
    broken.diff[src].pop();
    assert!(!pairing::compare(&broken, &oracle, &bij));

    // identity comparison
    let idbij: Vec<usize> = (0..oracle.len()).collect();
    assert!(pairing::compare(&oracle, &oracle, &idbij));
}

#[test]
fn rank_mode_agreement_on_the_paired_matrix() {
    // the degree-1/2 block of the paired differential
    let left = TangleDiagram::parse(fixtures::HOPF_LEFT).unwrap();
    let right = TangleDiagram::parse(fixtures::HOPF_RIGHT).unwrap();
    let alg = Algebra::new(2);
    let a = type_a::build(&left, &alg);
    let d = type_d::build_delta(&right, &alg);
    let paired = pairing::box_tensor(&a, &(&d).into());
    let rows: Vec<usize> = (0..paired.len()).filter(|&i| paired.zeta4[i] == 2).collect();
    let cols: Vec<usize> = (0..paired.len()).filter(|&i| paired.zeta4[i] == 6).collect();
    let mut m: Matrix<RationalFunction> = Matrix::zero(rows.len(), cols.len());
    for (ri, &r) in rows.iter().enumerate() {
        for (ci, &c) in cols.iter().enumerate() {
            m.set(ri, ci, paired.coeff(r, c));
        }
    }
    assert_eq!(rank(&m, RankMode::Exact).unwrap(), 1);
    assert_eq!(rank(&m, RankMode::Randomized { seed: 5 }).unwrap(), 1);
}
