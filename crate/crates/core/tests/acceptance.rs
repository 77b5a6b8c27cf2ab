//! One line per acceptance criterion, written straight to stdout so that it
//! shows up in the test transcript.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use ceerlab::algebra::{
    gs_audit, parse_rational, unit_inverse, unit_word_to_poly, GsBudget, GsVerdict,
    HomogeneousIdeal, Letter, Monomial, Poly,
};
use ceerlab::ceer::pairing::unpair;
use ceerlab::ceer::{
    product, pullback, uniform_join, verify_reduction, CeerTable, ReductionFn, StagedRelation,
};
use ceerlab::groups::{
    fp_reduce, star_as_free_product, star_z2_to_star_h, CyclicDecider, FactorDecider,
    ModuleWordProblem, StarWord, Word,
};
use ceerlab::priority::{level_census, verify_log, ConstructionRun};
use ceerlab::scenario::Scenario;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn scenario(name: &str) -> Scenario {
    let path = format!("{}/../../scenarios/{name}.toml", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    Scenario::parse(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn run(name: &str) -> Result<ConstructionRun, String> {
    scenario(name).run().map_err(|e| format!("{name}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// Criterion 1: dense span-closure oracle for homogeneous ideals.

struct DenseSpan {
    p: u8,
    rows: Vec<Option<Vec<u8>>>,
    rank: usize,
}

impl DenseSpan {
    fn new(p: u8, degree: usize) -> Self {
        Self { p, rows: vec![None; 1 << degree], rank: 0 }
    }

    fn inv(&self, a: u8) -> u8 {
        (1..self.p).find(|&b| (a as u32 * b as u32) % self.p as u32 == 1).unwrap()
    }

    fn reduce(&self, v: &mut [u8]) -> Option<usize> {
        let p = self.p as u32;
        for col in 0..v.len() {
            if v[col] == 0 {
                continue;
            }
            match &self.rows[col] {
                Some(row) => {
                    let c = v[col] as u32;
                    for (x, &r) in v.iter_mut().zip(row).skip(col) {
                        *x = ((*x as u32 + (p - c) * r as u32) % p) as u8;
                    }
                }
                None => return Some(col),
            }
        }
        None
    }

    fn insert(&mut self, mut v: Vec<u8>) {
        if self.rank == v.len() {
            return;
        }
        if let Some(col) = self.reduce(&mut v) {
            let inv = self.inv(v[col]) as u32;
            for x in v.iter_mut() {
                *x = ((*x as u32 * inv) % self.p as u32) as u8;
            }
            self.rows[col] = Some(v);
            self.rank += 1;
        }
    }

    fn contains(&self, mut v: Vec<u8>) -> bool {
        self.reduce(&mut v).is_none()
    }
}

/// `span { u g v : g a generator, u, v monomials }` in each degree up to
/// `maxdeg`.
fn span_closure(p: u8, generators: &[Poly], maxdeg: usize) -> Vec<DenseSpan> {
    let mut spans: Vec<DenseSpan> = (0..=maxdeg).map(|k| DenseSpan::new(p, k)).collect();
    for g in generators {
        let d = g.degree().unwrap();
        for k in d..=maxdeg {
            for i in 0..=k - d {
                let j = k - d - i;
                for u in 0..1usize << i {
                    for w in 0..1usize << j {
                        let mut v = vec![0u8; 1 << k];
                        for (m, c) in g.terms() {
                            v[(u << (d + j)) | ((m.index() as usize) << j) | w] = c as u8;
                        }
                        spans[k].insert(v);
                    }
                }
            }
        }
    }
    spans
}

fn random_homogeneous(rng: &mut ChaCha8Rng, p: u32, degree: usize) -> Poly {
    loop {
        let mut f = Poly::zero(p);
        for m in Monomial::all_of_degree(degree) {
            if rng.gen_bool(0.3) {
                f = f.checked_add(&Poly::term(p, m, rng.gen_range(1..p) as i64)).unwrap();
            }
        }
        if !f.is_zero() {
            return f;
        }
    }
}

fn poly_from_dense(p: u32, degree: usize, v: &[u8]) -> Poly {
    let mut f = Poly::zero(p);
    for (idx, &c) in v.iter().enumerate() {
        if c != 0 {
            f = f.checked_add(&Poly::term(p, Monomial::from_index(degree, idx as u64), c as i64)).unwrap();
        }
    }
    f
}

/// Compares `member` with the oracle on one ideal. Returns the number of
/// membership queries made.
fn compare_ideal(p: u32, generators: &[Poly], rng: &mut ChaCha8Rng) -> Result<usize, String> {
    const MAXDEG: usize = 8;
    let mut ideal = HomogeneousIdeal::new(p, MAXDEG).unwrap();
    for g in generators {
        ideal.add_generator(g.clone()).unwrap();
    }
    let spans = span_closure(p as u8, generators, MAXDEG);
    let names = || generators.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ");
    let mut queries = 0;
    for k in 1..=MAXDEG {
        let basis = ideal.ideal_degree_basis(k).unwrap();
        ensure(basis.dim() == spans[k].rank, || {
            format!("({}) degree {k}: dim {} vs oracle {}", names(), basis.dim(), spans[k].rank)
        })?;
        for row in spans[k].rows.iter().flatten() {
            queries += 1;
            let f = poly_from_dense(p, k, row);
            ensure(ideal.member(&f).unwrap(), || format!("({}) oracle member {f} rejected", names()))?;
        }
    }
    for _ in 0..16 {
        let mut f = Poly::zero(p);
        let mut expect = true;
        for k in 1..=MAXDEG {
            let rows: Vec<&Vec<u8>> = spans[k].rows.iter().flatten().collect();
            let mut v = vec![0u8; 1 << k];
            for row in rows.iter().filter(|_| rng.gen_bool(0.3)) {
                for (x, &r) in v.iter_mut().zip(row.iter()) {
                    *x = ((*x as u32 + r as u32) % p) as u8;
                }
            }
            if rng.gen_bool(0.15) {
                let idx = rng.gen_range(0..1usize << k);
                v[idx] = ((v[idx] as u32 + 1) % p) as u8;
            }
            expect &= spans[k].contains(v.clone());
            f = f.checked_add(&poly_from_dense(p, k, &v)).unwrap();
        }
        queries += 1;
        ensure(ideal.member(&f).unwrap() == expect, || {
            format!("({}) member({f}) disagrees with oracle ({expect})", names())
        })?;
    }
    Ok(queries)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut ideals = 0;
    let mut queries = 0;
    // Every single generator of small degree.
    for (p, top) in [(2u32, 3usize), (3, 2)] {
        for d in 1..=top {
            let monos: Vec<Monomial> = Monomial::all_of_degree(d).collect();
            let total = (p as usize).pow(monos.len() as u32);
            for code in 1..total {
                let mut f = Poly::zero(p);
                let mut c = code;
                for m in &monos {
                    let a = c % p as usize;
                    c /= p as usize;
                    if a != 0 {
                        f = f.checked_add(&Poly::term(p, *m, a as i64)).unwrap();
                    }
                }
                queries += compare_ideal(p, &[f], &mut rng)?;
                ideals += 1;
            }
        }
    }
    // Every set of at most three monomials of degree at most 3.
    for p in [2u32, 3] {
        let monos: Vec<Poly> =
            (1..=3).flat_map(Monomial::all_of_degree).map(|m| Poly::monomial(p, m)).collect();
        for a in 0..monos.len() {
            for b in a..monos.len() {
                for c in b..monos.len() {
                    let mut gens = vec![monos[a].clone()];
                    for i in [b, c] {
                        if !gens.contains(&monos[i]) {
                            gens.push(monos[i].clone());
                        }
                    }
                    queries += compare_ideal(p, &gens, &mut rng)?;
                    ideals += 1;
                }
            }
        }
    }
    // Seeded random ideals: 1 to 3 generators of degree 1 to 4.
    for p in [2u32, 3] {
        for _ in 0..150 {
            let n = rng.gen_range(1..=3);
            let gens: Vec<Poly> =
                (0..n).map(|_| { let d = rng.gen_range(1..=4); random_homogeneous(&mut rng, p, d) }).collect();
            queries += compare_ideal(p, &gens, &mut rng)?;
            ideals += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{ideals} ideals, {queries} membership queries, 100% agreement, {:.1}s", elapsed.as_secs_f64()))
}

// ---------------------------------------------------------------------------

fn criterion_2() -> Outcome {
    let free = HomogeneousIdeal::new(2, 12).unwrap();
    for k in 0..=12 {
        let count = Monomial::all_of_degree(k).count() as u64;
        let dim = free.quotient_dim(k).unwrap();
        ensure(count == 1 << k && dim == 1 << k, || format!("dim F_{k} = {dim}, {count} monomials"))?;
    }
    for n in [10usize, 13] {
        let mut h = HomogeneousIdeal::new(2, n).unwrap();
        for l in [Letter::X, Letter::Y] {
            h.add_generator(Poly::monomial(2, Monomial::power(l, n).unwrap())).unwrap();
        }
        for k in 0..n {
            let dim = h.quotient_dim(k).unwrap();
            ensure(dim == 1 << k, || format!("N = {n}: quotient dim in degree {k} is {dim}"))?;
        }
        let top = h.quotient_dim(n).unwrap();
        ensure(top == (1 << n) - 2, || format!("N = {n}: degree {n} has dim {top}"))?;
    }
    Ok("dim F_k = 2^k for k <= 12; quotient by {x^N, y^N} is free below N for N in {10, 13}".into())
}

fn criterion_3() -> Outcome {
    let eps = parse_rational("1/4").unwrap();
    let counts: Vec<(usize, usize)> = (0..=40usize).map(|k| (k, k.saturating_sub(10))).collect();
    let verdict = gs_audit(&GsBudget::with_counts(eps.clone(), counts).unwrap(), 40);
    ensure(verdict == GsVerdict::Pass { checked_through: 40 }, || format!("n_k = k - 10: {verdict}"))?;
    let verdict = gs_audit(&GsBudget::with_counts(eps, [(10, 2)]).unwrap(), 40);
    let witness = BigRational::new(BigInt::from(6561), BigInt::from(4096));
    ensure(verdict == GsVerdict::Fail { degree: 10, count: 2, bound: witness }, || format!("n_10 = 2: {verdict}"))?;
    Ok(format!("n_k = max(0, k-10) passes through k = 40; n_10 = 2 gives \"{verdict}\""))
}

fn criterion_4() -> Outcome {
    for n in [10usize, 13] {
        for p in [2u32, 3] {
            let mut ideal = HomogeneousIdeal::new(p, n).unwrap();
            ideal.add_generator(Poly::monomial(p, Monomial::power(Letter::X, n).unwrap())).unwrap();
            let mut series = Poly::zero(p);
            for i in 0..n {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                series = series.checked_add(&Poly::term(p, Monomial::power(Letter::X, i).unwrap(), sign)).unwrap();
            }
            ensure(unit_inverse(Letter::X, n, p).unwrap() == series, || format!("unit_inverse N={n} p={p}"))?;
            let one_plus_x = Poly::one(p).checked_add(&Poly::x(p)).unwrap();
            let prod = one_plus_x.checked_mul(&series).unwrap();
            let diff = prod.checked_sub(&Poly::one(p)).unwrap();
            ensure(ideal.member(&diff).unwrap(), || format!("N={n} p={p}: (1+x)s - 1 = {diff}"))?;
        }
    }
    Ok("(1+x) * sum_{i<N} (-1)^i x^i = 1 mod (x^N) for N in {10, 13}, p in {2, 3}".into())
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let z2 = CyclicDecider::new(2);
    let mut checked = 0usize;
    for g_order in 2..=5i64 {
        let g = CyclicDecider::new(g_order);
        for h_order in 2..=5i64 {
            let hd = CyclicDecider::new(h_order);
            for h in 1..h_order {
                let h_word = Word::power(0, h);
                for n in 0..=4u32 {
                    for code in 0..(g_order as usize).pow(n + 1) {
                        let mut c = code;
                        let pieces: Vec<Word> = (0..=n)
                            .map(|_| {
                                let e = (c % g_order as usize) as i64;
                                c /= g_order as usize;
                                Word::power(0, e)
                            })
                            .collect();
                        let w = StarWord::new(pieces);
                        let lhs = fp_reduce(&star_as_free_product(&w), &[&g as &dyn FactorDecider, &z2])
                            .map_err(|e| e.to_string())?
                            .is_empty();
                        let image = star_z2_to_star_h(&w, &h_word, &hd).map_err(|e| e.to_string())?;
                        let rhs = fp_reduce(&image, &[&g as &dyn FactorDecider, &hd]).map_err(|e| e.to_string())?.is_empty();
                        ensure(lhs == rhs, || {
                            format!("G = Z/{g_order}, H = Z/{h_order}, h = x0^{h}: {w} gives {lhs} vs {rhs}")
                        })?;
                        checked += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} words, zero counterexamples, {:.1}s", elapsed.as_secs_f64()))
}

fn criterion_6() -> Outcome {
    let sc = scenario("dark-ring-basic");
    ensure(sc.params.stages == 300 && sc.params.maxdeg == 16 && sc.tests.len() == 2, || "scenario shape".into())?;
    let last = sc.params.stages - 1;
    ensure(sc.columns.iter().all(|c| c.count_at(last) == c.entries().len()), || "columns not finite".into())?;
    let run = run("dark-ring-basic")?;
    let out = run.dark().ok_or("not a dark run")?;
    let p = sc.params.modulus;
    let mut stages = Vec::new();
    for m in 0..sc.tests.len() {
        let acts = run.actions_of(&format!("D_{m}"));
        ensure(acts.len() == 1, || format!("D_{m} acted {} times", acts.len()))?;
        let w = out.witnesses.get(&m).ok_or_else(|| format!("D_{m} has no witness"))?;
        let f = Poly::parse(&w.f, p).map_err(|e| e.to_string())?;
        let g = Poly::parse(&w.g, p).map_err(|e| e.to_string())?;
        let diff = f.checked_sub(&g).unwrap();
        ensure(out.ideal.member(&diff).unwrap(), || format!("D_{m}: {diff} not in I"))?;
        stages.push(w.stage);
    }
    // Replay generator counts from the log and audit every stage.
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for s in 0..sc.params.stages {
        for r in run.log.records.iter().filter(|r| r.stage == s) {
            for text in &r.emitted_relations {
                let d = Poly::parse(text, p).map_err(|e| e.to_string())?.degree().unwrap();
                *counts.entry(d).or_default() += 1;
            }
        }
        let budget = GsBudget::with_counts(sc.params.epsilon.clone(), counts.clone()).unwrap();
        let verdict = gs_audit(&budget, sc.params.maxdeg);
        ensure(verdict.passed(), || format!("stage {s}: {verdict}"))?;
    }
    ensure(out.audits_passed == sc.params.stages, || "run skipped audits".into())?;
    Ok(format!("D_0, D_1 acted once each (stages {stages:?}); witnesses in I; GS audit passed at all 300 stages"))
}

fn criterion_7() -> Outcome {
    let sc = scenario("dark-group-basic");
    ensure(
        sc.params.unit_exponent == 13 && sc.params.epsilon == parse_rational("1/4").unwrap() && sc.params.stages == 300,
        || "scenario shape".into(),
    )?;
    let run = run("dark-group-basic")?;
    let out = run.dark().ok_or("not a dark run")?;
    let t0 = &out.t_words[0];
    ensure(t0.len() >= 10, || format!("|T_0| = {}", t0.len()))?;
    let (n, p, horizon) = (sc.params.unit_exponent, sc.params.modulus, sc.params.maxdeg);
    for (i, u) in t0.iter().enumerate() {
        for v in &t0[i + 1..] {
            let image = unit_word_to_poly(&u.concat(&v.inverse()), n, &out.ideal, horizon).map_err(|e| e.to_string())?;
            ensure(image != Poly::one(p), || format!("{u} = {v} in the unit group"))?;
        }
    }
    let mut protected: Vec<usize> = Vec::new();
    let mut later = 0;
    for r in &run.log.records {
        if r.requirement == "L_0" && r.action == "enumerate" {
            protected.push(r.get("protect").ok_or("no protect detail")?.parse().map_err(|_| "bad protect")?);
        }
        for text in &r.emitted_relations {
            let d = Poly::parse(text, p).map_err(|e| e.to_string())?.degree().unwrap();
            if let Some(&top) = protected.iter().max() {
                later += 1;
                ensure(d > top, || format!("stage {}: relator of degree {d} after protection of {top}", r.stage))?;
            }
        }
    }
    let report = verify_log(&run.log.records, "protection")?;
    ensure(report.passed() && report.checked > 0, || report.to_string())?;
    Ok(format!(
        "|T_0| = {}; all {} pairs distinct at horizon {horizon}; {later} later relator(s) respect protections {protected:?}",
        t0.len(),
        t0.len() * (t0.len() - 1) / 2
    ))
}

fn criterion_8() -> Outcome {
    let sc = scenario("star-universal-basic");
    ensure(sc.params.base == 10 && sc.params.levels == 2 && sc.params.stages == 500, || "scenario shape".into())?;
    ensure(sc.universal.pairs().len() == 1 && sc.universal.pairs()[0].stage == 5, || "U shape".into())?;
    let run = run("star-universal-basic")?;
    let out = run.star().ok_or("not a star run")?;
    let last = sc.params.stages - 1;

    let tri = verify_log(&run.log.records, "triangularity")?;
    ensure(tri.passed() && tri.checked > 0, || tri.to_string())?;

    let eq = |i, j, s| out.v_equal(i, j, s).map_err(|e| e.to_string());
    ensure(!eq(0, 1, 4)?, || "v_0 = v_1 before stage 5".into())?;
    for s in 5..=last {
        ensure(eq(0, 1, s)?, || format!("v_0 != v_1 at stage {s}"))?;
    }
    ensure(!eq(0, 2, last)? && !eq(1, 2, last)?, || "v_2 identified".into())?;

    let mut census_checks = 0;
    for s in 0..=last {
        for j in 0..=sc.params.levels {
            let least = (0..j).all(|i| !sc.universal.related(i, j, s).unwrap());
            if least {
                let c = level_census(&run, j, s).ok_or("no census")?;
                let floor = sc.params.base.pow(j as u32);
                ensure(c.level > floor, || format!("stage {s}, level {j}: {} <= {floor}", c.level))?;
                census_checks += 1;
            }
        }
    }

    let c3 = run.log.records.iter().find(|r| r.action == "case-3c").ok_or("case 3c never fired")?;
    let k: usize = c3.get("K").ok_or("no K")?.parse().map_err(|_| "bad K")?;
    let after = c3.get("K-after").ok_or("no K-after")?;
    let decreased = after == "none" || after.parse::<usize>().is_ok_and(|a| a < k);
    ensure(decreased, || format!("case 3c: K {k} -> {after}"))?;
    let case1 = run.log.records.iter().any(|r| r.action == "case-1");
    ensure(case1, || "case 1 never fired".into())?;
    Ok(format!(
        "triangular ({} relations); v_0 = v_1 from stage 5, v_2 apart; {census_checks} census checks; case 3c took K {k} -> {after}; case 1 fired",
        tri.checked
    ))
}

fn random_table(rng: &mut ChaCha8Rng, bound: usize, pairs: usize) -> CeerTable {
    let mut stage = 0;
    let mut t = CeerTable::identity(bound);
    for _ in 0..pairs {
        stage += rng.gen_range(0..3);
        t.assert_pair(rng.gen_range(0..bound), rng.gen_range(0..bound), stage).unwrap();
    }
    t
}

fn criterion_9() -> Outcome {
    const BOUND: usize = 32;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pair_checks = 0usize;
    for _ in 0..20 {
        let a = { let n = rng.gen_range(0..6); random_table(&mut rng, 8, n) };
        let b = { let n = rng.gen_range(0..6); random_table(&mut rng, 8, n) };
        let c = { let n = rng.gen_range(0..6); random_table(&mut rng, 8, n) };
        let prod = product(&a, &b, BOUND).map_err(|e| e.to_string())?;
        let join = uniform_join(&[a.clone(), b.clone(), c.clone()], BOUND).map_err(|e| e.to_string())?;
        let cols = [&a, &b, &c];
        let top = a.last_stage().max(b.last_stage()).max(c.last_stage()) + 1;
        for s in 0..=top {
            for z in 0..BOUND {
                for w in 0..BOUND {
                    let ((x, y), (x2, y2)) = (unpair(z), unpair(w));
                    let want = a.related(x, x2, s).unwrap() && b.related(y, y2, s).unwrap();
                    ensure(prod.related(z, w, s).unwrap() == want, || format!("product {z} {w} @ {s}"))?;
                    let want = x == x2
                        && match cols.get(x) {
                            Some(col) => col.related(y, y2, s).unwrap(),
                            None => y == y2,
                        };
                    ensure(join.related(z, w, s).unwrap() == want, || format!("join {z} {w} @ {s}"))?;
                    pair_checks += 2;
                }
            }
        }
    }
    let mut violations = 0;
    for _ in 0..20 {
        let e = { let n = rng.gen_range(0..12); random_table(&mut rng, 16, n) };
        let wp = ModuleWordProblem { ceer: &e };
        let f = ReductionFn::from_fn(16, ModuleWordProblem::generator_code);
        let back = pullback(&f, &wp).map_err(|e| e.to_string())?;
        for s in e.change_stages().unwrap() {
            ensure(back.snapshot(s) == e.snapshot(s), || format!("pullback differs at stage {s}"))?;
        }
        let report = verify_reduction(&f, &e, &wp, 16, e.last_stage()).map_err(|e| e.to_string())?;
        violations += report.positive_violations.len() + report.unaligned_so_far.len();
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("{pair_checks} product/join pair checks below 32; 20 pullbacks into the module word problem, 0 violations"))
}

fn criterion_10() -> Outcome {
    let names = ["dark-ring-basic", "dark-group-basic", "sigma3-basic", "star-universal-basic", "sug-basic"];
    for name in names {
        let a = run(name)?.log_jsonl();
        let b = run(name)?.log_jsonl();
        ensure(a == b, || format!("{name}: logs differ"))?;
        ensure(!a.is_empty(), || format!("{name}: empty log"))?;
    }
    Ok(format!("{} shipped scenarios rerun byte-identically", names.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("graded-algebra oracle equivalence", criterion_1),
        ("free and truncated dimensions", criterion_2),
        ("GS audit exactness", criterion_3),
        ("unit identity", criterion_4),
        ("free-product biconditional", criterion_5),
        ("dark-ring scenario", criterion_6),
        ("dark-group scenario", criterion_7),
        ("star-universal scenario", criterion_8),
        ("ceer algebra", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = Vec::new();
    let mut stdout = std::io::stdout().lock();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        let line = match check() {
            Ok(msg) => format!("acceptance {n:>2} PASS {name}: {msg}"),
            Err(msg) => {
                failed.push(n);
                format!("acceptance {n:>2} FAIL {name}: {msg}")
            }
        };
        writeln!(stdout, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
