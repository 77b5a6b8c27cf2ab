use std::collections::BTreeMap;

use ceerlab::algebra::{gs_audit, GsBudget, HomogeneousIdeal, Monomial, Poly};
use ceerlab::ceer::pairing::unpair;
use ceerlab::ceer::{
    product, pullback, uniform_join, verify_reduction, CeerTable, ReductionFn,
};
use ceerlab::groups::{
    fp_reduce, star_z2_to_star_h, z2_module_wp, CyclicDecider, FactorDecider, FreeProductWord,
    GenStatus, Relation, StagedPresentation, StarWord, Word,
};
use ceerlab::priority::{
    run_dark_ring, run_star_universal, verify_log, DarkParams, PhiStub, StarParams, TestStream,
};
use ceerlab::ceer::StagedSet;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn table(bound: usize, raw: &[(usize, usize, usize)]) -> CeerTable {
    CeerTable::from_pairs(bound, raw.iter().map(|&(a, b, s)| (a % bound, b % bound, s))).unwrap()
}

fn pairs(max: usize) -> impl Strategy<Value = Vec<(usize, usize, usize)>> {
    prop::collection::vec((0..64usize, 0..64usize, 0..12usize), 0..max)
}

fn poly(p: u32, max_degree: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((0..=max_degree, any::<u64>(), 1..p as i64), 0..8).prop_map(move |terms| {
        let mut f = Poly::zero(p);
        for (d, idx, c) in terms {
            let m = Monomial::from_index(d, idx % (1 << d));
            f = f.checked_add(&Poly::term(p, m, c)).unwrap();
        }
        f
    })
}

fn homogeneous(p: u32, degree: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((any::<u64>(), 1..p as i64), 1..5).prop_map(move |terms| {
        let mut f = Poly::zero(p);
        for (idx, c) in terms {
            f = f.checked_add(&Poly::term(p, Monomial::from_index(degree, idx % (1 << degree)), c)).unwrap();
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partitions_are_equivalences_and_only_merge(raw in pairs(12)) {
        let t = table(12, &raw);
        for s in 0..13 {
            for a in 0..12 {
                prop_assert!(t.related(a, a, s).unwrap());
                for b in 0..12 {
                    let ab = t.related(a, b, s).unwrap();
                    prop_assert_eq!(ab, t.related(b, a, s).unwrap());
                    if ab {
                        prop_assert!(t.related(a, b, s + 1).unwrap());
                        for c in 0..12 {
                            if t.related(b, c, s).unwrap() {
                                prop_assert!(t.related(a, c, s).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pullback_is_definitional(raw in pairs(10), map in prop::collection::vec(0..10usize, 8)) {
        let r = table(10, &raw);
        let f = ReductionFn::from_fn(8, |n| map[n]);
        let back = pullback(&f, &r).unwrap();
        for s in 0..13 {
            for i in 0..8 {
                for j in 0..8 {
                    prop_assert_eq!(back.related(i, j, s).unwrap(), r.related(map[i], map[j], s).unwrap());
                }
            }
        }
    }

    #[test]
    fn identity_reduces_every_ceer_to_itself(raw in pairs(10), stage in 0..14usize) {
        let e = table(10, &raw);
        let report = verify_reduction(&ReductionFn::identity(10), &e, &e, 10, stage).unwrap();
        prop_assert!(report.positive_violations.is_empty());
    }

    #[test]
    fn product_and_join_are_definitional(a in pairs(6), b in pairs(6)) {
        let (a, b) = (table(8, &a), table(8, &b));
        let prod = product(&a, &b, 32).unwrap();
        let join = uniform_join(&[a.clone(), b.clone()], 32).unwrap();
        for s in 0..13 {
            for z in 0..32 {
                for w in 0..32 {
                    let ((x, y), (x2, y2)) = (unpair(z), unpair(w));
                    prop_assert_eq!(prod.related(z, w, s).unwrap(), a.related(x, x2, s).unwrap() && b.related(y, y2, s).unwrap());
                    let col = [&a, &b];
                    let want = x == x2 && col.get(x).map_or(y == y2, |c| c.related(y, y2, s).unwrap());
                    prop_assert_eq!(join.related(z, w, s).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn multiplication_is_graded_associative_and_distributive(
        p in prop::sample::select(vec![2u32, 3, 5]),
        du in 0..=5usize,
        dv in 0..=5usize,
        seed in any::<u64>(),
    ) {
        let mut runner = proptest::test_runner::TestRunner::new_with_rng(
            ProptestConfig::default(),
            proptest::test_runner::TestRng::from_seed(proptest::test_runner::RngAlgorithm::ChaCha, &seed.to_le_bytes().repeat(4)),
        );
        let u = homogeneous(p, du).new_tree(&mut runner).unwrap().current();
        let v = homogeneous(p, dv).new_tree(&mut runner).unwrap().current();
        let uv = u.checked_mul(&v).unwrap();
        if !uv.is_zero() {
            prop_assert_eq!(uv.degree(), Some(du + dv));
            prop_assert!(uv.is_homogeneous());
        }
        let f = poly(p, 5).new_tree(&mut runner).unwrap().current();
        let g = poly(p, 5).new_tree(&mut runner).unwrap().current();
        let h = poly(p, 5).new_tree(&mut runner).unwrap().current();
        prop_assert_eq!(f.checked_mul(&g).unwrap().checked_mul(&h).unwrap(), f.checked_mul(&g.checked_mul(&h).unwrap()).unwrap());
        prop_assert_eq!(
            f.checked_mul(&g.checked_add(&h).unwrap()).unwrap(),
            f.checked_mul(&g).unwrap().checked_add(&f.checked_mul(&h).unwrap()).unwrap()
        );
        prop_assert_eq!(
            g.checked_add(&h).unwrap().checked_mul(&f).unwrap(),
            g.checked_mul(&f).unwrap().checked_add(&h.checked_mul(&f).unwrap()).unwrap()
        );
    }

    #[test]
    fn quotient_reduce_matches_membership(
        p in prop::sample::select(vec![2u32, 3]),
        d1 in 1..=3usize,
        d2 in 1..=3usize,
        seed in any::<u64>(),
        horizon in 1..=6usize,
    ) {
        let mut runner = proptest::test_runner::TestRunner::new_with_rng(
            ProptestConfig::default(),
            proptest::test_runner::TestRng::from_seed(proptest::test_runner::RngAlgorithm::ChaCha, &seed.to_le_bytes().repeat(4)),
        );
        let mut ideal = HomogeneousIdeal::new(p, 6).unwrap();
        for d in [d1, d2] {
            let gen = homogeneous(p, d).new_tree(&mut runner).unwrap().current();
            if !gen.is_zero() {
                ideal.add_generator(gen).unwrap();
            }
        }
        let f = poly(p, 6).new_tree(&mut runner).unwrap().current();
        // Either a random g or f shifted by an ideal element.
        let g = if seed % 2 == 0 {
            poly(p, 6).new_tree(&mut runner).unwrap().current()
        } else {
            let h = ideal.generators().first().cloned().unwrap_or_else(|| Poly::zero(p));
            let u = homogeneous(p, 1).new_tree(&mut runner).unwrap().current();
            f.checked_add(&u.checked_mul(&h).unwrap().truncate(6)).unwrap()
        };
        let same = ideal.quotient_reduce(&f, horizon).unwrap() == ideal.quotient_reduce(&g, horizon).unwrap();
        let diff = f.checked_sub(&g).unwrap().truncate(horizon);
        prop_assert_eq!(same, ideal.member(&diff).unwrap());
    }

    #[test]
    fn gs_audit_is_monotone_in_counts(counts in prop::collection::btree_map(2..20usize, 0..6usize, 0..6), k in 2..20usize) {
        let eps = BigRational::new(1.into(), 4.into());
        let before = gs_audit(&GsBudget::with_counts(eps.clone(), counts.clone()).unwrap(), 20);
        let mut more = counts.clone();
        *more.entry(k).or_default() += 1;
        let after = gs_audit(&GsBudget::with_counts(eps, more).unwrap(), 20);
        prop_assert!(before.passed() || !after.passed());
    }

    #[test]
    fn module_word_problem_factors_through_classes(raw in pairs(10), word in prop::collection::vec((0..10usize, -3..4i64, any::<u8>()), 0..8)) {
        let e = table(10, &raw);
        let s = 12;
        let w = Word::parse(&word.iter().filter(|t| t.1 != 0).map(|&(g, x, _)| format!("x{g}^{x}")).collect::<Vec<_>>().join(" ")).unwrap_or_else(|_| Word::empty());
        let swapped: Vec<String> = word
            .iter()
            .filter(|t| t.1 != 0)
            .map(|&(g, x, pick)| {
                let class: Vec<usize> = (0..10).filter(|&h| e.related(g, h, s).unwrap()).collect();
                format!("x{}^{x}", class[pick as usize % class.len()])
            })
            .collect();
        let w2 = if swapped.is_empty() { Word::empty() } else { Word::parse(&swapped.join(" ")).unwrap() };
        prop_assert_eq!(z2_module_wp(&e, &w, s).unwrap(), z2_module_wp(&e, &w2, s).unwrap());
    }

    #[test]
    fn presentations_stay_triangular(attempts in prop::collection::vec((0..30usize, prop::collection::vec(0..30usize, 0..3), 0..4usize), 0..40)) {
        let mut g = StagedPresentation::free(30);
        let mut stage = 0;
        for (lhs, rhs, step) in attempts {
            stage += step;
            let mut rel = Relation::one(stage, lhs);
            for r in rhs {
                *rel.rhs.entry(r).or_insert(0) += 1;
            }
            let _ = g.add_relation(rel);
        }
        let mut seen = std::collections::BTreeSet::new();
        for r in g.relations() {
            prop_assert!(seen.insert(r.lhs));
            prop_assert!(r.rhs.keys().all(|&k| k < r.lhs));
        }
        // Words in the generators that are not left-hand sides are never trivial.
        let free: Vec<usize> = (0..30).filter(|k| !seen.contains(k)).collect();
        if let Some(&k) = free.first() {
            let w = BTreeMap::from([(k, 1i64)]);
            prop_assert!(!g.is_identity(&w, stage).unwrap());
        }
    }
}

fn fp_words(orders: (i64, i64), len: usize) -> Vec<FreeProductWord> {
    let alphabet: Vec<(usize, i64)> =
        (0..orders.0).map(|e| (0, e)).chain((0..orders.1).map(|e| (1, e))).collect();
    let mut out = vec![FreeProductWord::new([])];
    let mut frontier = vec![Vec::<(usize, i64)>::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &alphabet {
                let mut v = w.clone();
                v.push(l);
                out.push(FreeProductWord::new(v.iter().map(|&(f, e)| (f, Word::power(0, e)))));
                next.push(v);
            }
        }
        frontier = next;
    }
    out
}

#[test]
fn fp_reduce_is_idempotent_and_confluent() {
    for (a, b) in [(2i64, 2i64), (2, 3), (3, 5), (5, 4)] {
        let (ga, gb) = (CyclicDecider::new(a), CyclicDecider::new(b));
        let factors: [&dyn FactorDecider; 2] = [&ga, &gb];
        let len = if a + b > 7 { 5 } else { 6 };
        for w in fp_words((a, b), len) {
            let r = fp_reduce(&w, &factors).unwrap();
            assert_eq!(fp_reduce(&r, &factors).unwrap(), r);
            assert!(r.is_alternating());
            let mid = w.len() / 2;
            let (u, v) = (
                FreeProductWord { syllables: w.syllables[..mid].to_vec() },
                FreeProductWord { syllables: w.syllables[mid..].to_vec() },
            );
            let split = fp_reduce(&fp_reduce(&u, &factors).unwrap().concat(&fp_reduce(&v, &factors).unwrap()), &factors).unwrap();
            assert_eq!(split, r, "{w}");
        }
    }
}

#[test]
fn translated_quotients_alternate_signs() {
    let z5 = CyclicDecider::new(5);
    let h = Word::power(0, 2);
    let words: Vec<StarWord> = (0..4)
        .flat_map(|n| (0..3usize.pow(n + 1)).map(move |code| (n, code)))
        .map(|(n, mut code)| {
            StarWord::new(
                (0..=n)
                    .map(|_| {
                        let e = (code % 3) as i64;
                        code /= 3;
                        Word::power(1, e)
                    })
                    .collect(),
            )
        })
        .collect();
    for u in &words {
        for v in &words {
            let q = star_z2_to_star_h(u, &h, &z5).unwrap().inverse().concat(&star_z2_to_star_h(v, &h, &z5).unwrap());
            let signs: Vec<i64> = q
                .syllables
                .iter()
                .filter(|s| s.factor == 1)
                .map(|s| s.word.letters()[0].exp.signum())
                .collect();
            assert!(signs.windows(2).all(|p| p[0] != p[1]), "{u} / {v}: {q}");
        }
    }
}

fn phi_strategy() -> impl Strategy<Value = PhiStub> {
    let word = prop::collection::vec((0..120usize, -2..3i64), 0..4).prop_map(|letters| {
        let text: Vec<String> = letters.iter().filter(|l| l.1 != 0).map(|&(g, e)| format!("x{g}^{e}")).collect();
        if text.is_empty() { Word::empty() } else { Word::parse(&text.join(" ")).unwrap() }
    });
    (prop::collection::btree_map(0..12usize, (word.clone(), 0..30usize), 0..6), prop::option::of((word, 0..30usize)))
        .prop_map(|(entries, default)| PhiStub { entries, default })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn star_runs_keep_their_invariants(
        phis in prop::collection::vec(phi_strategy(), 0..4),
        u_pairs in prop::collection::vec((0..3usize, 0..3usize, 0..40usize), 0..2),
    ) {
        let u = CeerTable::from_pairs(8, u_pairs.clone()).unwrap();
        let params = StarParams { stages: 60, ..StarParams::default() };
        let run = run_star_universal(&u, &phis, &params).unwrap();
        for suite in ["triangularity", "vi-vs-U", "level-census", "injury"] {
            let report = verify_log(&run.log.records, suite).unwrap();
            prop_assert!(report.passed(), "{}", report);
        }
        let again = run_star_universal(&u, &phis, &params).unwrap();
        prop_assert_eq!(run.log_jsonl(), again.log_jsonl());
        let out = run.star().unwrap();
        for i in 0..=2 {
            for j in 0..=2 {
                prop_assert_eq!(out.v_equal(i, j, 59).unwrap(), u.related(i, j, 59).unwrap());
            }
        }
        if u.pairs().is_empty() {
            for r in run.log.records.iter().filter(|r| r.action == "case-2") {
                let (a, b): (usize, usize) = (r.get("a").unwrap().parse().unwrap(), r.get("b").unwrap().parse().unwrap());
                prop_assert!(out.x.related(a, b, 59).unwrap());
                let w = Word::parse(r.get("w").unwrap()).unwrap().exponents();
                prop_assert!(!out.presentation.is_identity(&w, 59).unwrap());
            }
        }
        for r in &run.log.records {
            for c in &r.status_changes {
                prop_assert!(c.from != GenStatus::Determined || c.to == GenStatus::Determined);
            }
        }
    }

    #[test]
    fn dark_ring_runs_keep_their_invariants(
        cols in prop::collection::vec(prop::collection::vec((0..4usize, 0..60usize), 0..4), 1..3),
        rates in prop::collection::vec(1..24usize, 1..3),
    ) {
        let columns: Vec<StagedSet> = cols.into_iter().map(StagedSet::new).collect();
        let tests: Vec<TestStream> = rates.iter().map(|&rate| TestStream::Monomials { start: 0, rate, from_degree: 0 }).collect();
        let params = DarkParams { modulus: 2, epsilon: BigRational::new(1.into(), 4.into()), stages: 120, maxdeg: 14, unit_exponent: 13 };
        let run = run_dark_ring(&columns, &tests, &params).unwrap();
        for suite in ["membership", "protection", "injury"] {
            let report = verify_log(&run.log.records, suite).unwrap();
            prop_assert!(report.passed(), "{}", report);
        }
        let out = run.dark().unwrap();
        for (m, w) in &out.witnesses {
            prop_assert_eq!(run.actions_of(&format!("D_{m}")).len(), 1);
            let diff = Poly::parse(&w.f, 2).unwrap().checked_sub(&Poly::parse(&w.g, 2).unwrap()).unwrap();
            prop_assert!(out.ideal.member(&diff).unwrap());
        }
        prop_assert_eq!(run.log_jsonl(), run_dark_ring(&columns, &tests, &params).unwrap().log_jsonl());
    }
}
