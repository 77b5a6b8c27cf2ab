use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;

use super::{ConstructionRun, LogRecord, Requirement, RequirementKind, RunError, RunLog, RunOutputs};
use crate::algebra::{
    gs_audit, unit_word_to_poly, GsBudget, HomogeneousIdeal, Letter, Monomial, Poly, UnitWord,
    MAX_DEGREE,
};
use crate::ceer::{Stage, StagedSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DarkParams {
    pub modulus: u32,
    pub epsilon: BigRational,
    pub stages: usize,
    pub maxdeg: usize,
    pub unit_exponent: usize,
}

/// A declarative stream of test elements `W_m`. Texts are polynomials for
/// the ring and unit words for the group; generated streams yield monomials
/// (resp. the unit words spelling them).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TestStream {
    Explicit(Vec<(String, Stage)>),
    /// All monomials in degree-then-lex order from `from_degree` on, `rate`
    /// per stage from stage `start`.
    Monomials { start: Stage, rate: usize, from_degree: usize },
    /// `t^0, t^1, …`, `rate` per stage from stage `start`.
    Powers { start: Stage, rate: usize, letter: Letter },
}


#[derive(Debug, Clone)]
enum Element {
    Ring(Poly),
    Unit(UnitWord),
}

impl Element {
    fn text(&self) -> String {
        match self {
            Element::Ring(f) => f.to_string(),
            Element::Unit(w) => w.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Ring,
    Group,
}

impl TestStream {
    fn materialize(&self, mode: Mode, p: u32, stages: usize) -> Result<Vec<(Stage, Element)>, RunError> {
        let wrap = |m: Monomial| match mode {
            Mode::Ring => Element::Ring(Poly::monomial(p, m)),
            Mode::Group => Element::Unit(UnitWord::from_monomial(&m)),
        };
        let mut out = Vec::new();
        match self {
            TestStream::Explicit(items) => {
                for (text, stage) in items {
                    if *stage >= stages {
                        continue;
                    }
                    let e = match mode {
                        Mode::Ring => Element::Ring(Poly::parse(text, p)?),
                        Mode::Group => Element::Unit(UnitWord::parse(text)?),
                    };
                    out.push((*stage, e));
                }
                out.sort_by_key(|(s, _)| *s);
            }
            TestStream::Monomials { start, rate, from_degree } => {
                let total = stages.saturating_sub(*start) * rate;
                let mut degree = *from_degree;
                let mut index = 0u64;
                for i in 0..total {
                    if degree > MAX_DEGREE.min(30) {
                        break;
                    }
                    out.push((start + i / rate, wrap(Monomial::from_index(degree, index))));
                    index += 1;
                    if index == 1u64 << degree {
                        degree += 1;
                        index = 0;
                    }
                }
            }
            TestStream::Powers { start, rate, letter } => {
                let total = stages.saturating_sub(*start) * rate;
                for i in 0..total.min(MAX_DEGREE + 1) {
                    out.push((start + i / rate, wrap(Monomial::power(*letter, i)?)));
                }
            }
        }
        Ok(out)
    }
}

/// What a dark run built: the ideal `(H)`, the sets `T_n` and each `D_m`'s
/// witness pair.
#[derive(Debug, Clone)]
pub struct DarkOutputs {
    pub ideal: HomogeneousIdeal,
    pub t_sets: Vec<Vec<Monomial>>,
    pub t_words: Vec<Vec<UnitWord>>,
    pub protections: Vec<Vec<usize>>,
    pub witnesses: BTreeMap<usize, DarkWitness>,
    pub audits_passed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DarkWitness {
    pub stage: Stage,
    pub f: String,
    pub g: String,
    pub k_s: usize,
    /// `f - g`, as polynomials for the ring and as images truncated at the
    /// horizon for the group.
    pub difference: Poly,
}

struct DState {
    elements: Vec<(Stage, Element)>,
    arrived: usize,
    acted: bool,
    cache_key: Option<(usize, usize)>,
    seen: HashMap<String, usize>,
    normals: Vec<Poly>,
    scanned: usize,
    found: Option<(usize, usize)>,
}

struct Dark {
    mode: Mode,
    params: DarkParams,
    ideal: HomogeneousIdeal,
    columns: Vec<StagedSet>,
    pending: Vec<usize>,
    t_sets: Vec<Vec<Monomial>>,
    protections: Vec<Vec<usize>>,
    used_max: usize,
    d: Vec<DState>,
    witnesses: BTreeMap<usize, DarkWitness>,
    log: RunLog,
}

fn l_req(n: usize) -> Requirement {
    Requirement::new(format!("L_{n}"), RequirementKind::Light, 2 * n + 1)
}

fn d_req(m: usize) -> Requirement {
    Requirement::new(format!("D_{m}"), RequirementKind::Collapse, 2 * m + 2)
}

/// `run_dark_ring`: requirements `L_0, D_0, L_1, D_1, …` building a
/// homogeneous ideal whose quotient is dark.
pub fn run_dark_ring(
    columns: &[StagedSet],
    tests: &[TestStream],
    params: &DarkParams,
) -> Result<ConstructionRun, RunError> {
    run(Mode::Ring, columns, tests, params)
}

/// `run_dark_group`: as the ring, with `H` starting at `{x^N, y^N}` and `T_n`
/// holding unit words.
pub fn run_dark_group(
    columns: &[StagedSet],
    tests: &[TestStream],
    params: &DarkParams,
) -> Result<ConstructionRun, RunError> {
    run(Mode::Group, columns, tests, params)
}

fn run(
    mode: Mode,
    columns: &[StagedSet],
    tests: &[TestStream],
    params: &DarkParams,
) -> Result<ConstructionRun, RunError> {
    if mode == Mode::Group && params.unit_exponent < 2 {
        return Err(RunError::Params(format!(
            "unit exponent must be at least 2, got {}",
            params.unit_exponent
        )));
    }
    let p = params.modulus;
    let mut d = Vec::new();
    for t in tests {
        d.push(DState {
            elements: t.materialize(mode, p, params.stages)?,
            arrived: 0,
            acted: false,
            cache_key: None,
            seen: HashMap::new(),
            normals: Vec::new(),
            scanned: 0,
            found: None,
        });
    }
    let mut run = Dark {
        mode,
        params: params.clone(),
        ideal: HomogeneousIdeal::new(p, params.maxdeg)?,
        columns: columns.to_vec(),
        pending: vec![0; columns.len()],
        t_sets: vec![Vec::new(); columns.len()],
        protections: vec![Vec::new(); columns.len()],
        used_max: 0,
        d,
        witnesses: BTreeMap::new(),
        log: RunLog::default(),
    };
    let mut audits_passed = 0;
    if mode == Mode::Group {
        run.initialize()?;
        run.audit(0)?;
    }
    for stage in 0..params.stages {
        run.stage(stage)?;
        run.audit(stage)?;
        audits_passed += 1;
    }
    let name = if mode == Mode::Ring { "dark-ring" } else { "dark-group" };
    let t_words = run
        .t_sets
        .iter()
        .map(|t| t.iter().map(UnitWord::from_monomial).collect())
        .collect();
    Ok(ConstructionRun {
        name: name.to_string(),
        stages_run: params.stages,
        log: run.log,
        outputs: RunOutputs::Dark(DarkOutputs {
            ideal: run.ideal,
            t_sets: run.t_sets,
            t_words: if mode == Mode::Group { t_words } else { Vec::new() },
            protections: run.protections,
            witnesses: run.witnesses,
            audits_passed,
        }),
    })
}

impl Dark {
    fn p(&self) -> u32 {
        self.params.modulus
    }

    fn initialize(&mut self) -> Result<(), RunError> {
        let n = self.params.unit_exponent;
        let mut rec = LogRecord::new(0, &Requirement::initialization(), "initialize")
            .with("modulus", self.p())
            .with("maxdeg", self.params.maxdeg)
            .with("unit-exponent", n);
        for letter in [Letter::X, Letter::Y] {
            let h = Poly::monomial(self.p(), Monomial::power(letter, n)?);
            rec.emitted_relations.push(h.to_string());
            self.ideal.add_generator(h)?;
        }
        self.log.push(rec);
        Ok(())
    }

    fn audit(&self, stage: Stage) -> Result<(), RunError> {
        let counts = self.ideal.generator_counts();
        let top = counts.keys().next_back().copied().unwrap_or(0).max(self.params.maxdeg);
        let budget = GsBudget::with_counts(self.params.epsilon.clone(), counts)?;
        let verdict = gs_audit(&budget, top);
        if verdict.passed() {
            Ok(())
        } else {
            Err(RunError::GsViolation { stage, verdict })
        }
    }

    fn stage(&mut self, stage: Stage) -> Result<(), RunError> {
        for (n, col) in self.columns.iter().enumerate() {
            let before = if stage == 0 { 0 } else { col.count_at(stage - 1) };
            self.pending[n] += col.count_at(stage) - before;
        }
        for ds in &mut self.d {
            while ds.arrived < ds.elements.len() && ds.elements[ds.arrived].0 <= stage {
                ds.arrived += 1;
            }
        }
        let count = self.columns.len().max(self.d.len());
        for i in 0..count {
            if i < self.columns.len() && self.pending[i] > 0 {
                return self.act_l(stage, i);
            }
            if i < self.d.len() && !self.d[i].acted {
                if let Some(pair) = self.search(i)? {
                    return self.act_d(stage, i, pair);
                }
            }
        }
        Ok(())
    }

    fn k_s(&self, m: usize) -> usize {
        let protected = self.protections.iter().take(m + 1).flatten().copied().max().unwrap_or(0);
        protected.max(m + 10)
    }

    fn normal_form(&self, e: &Element) -> Result<Poly, RunError> {
        let maxdeg = self.params.maxdeg;
        Ok(match e {
            Element::Ring(f) => {
                let mut out = self.ideal.quotient_reduce(f, maxdeg)?;
                for (k, c) in f.homogeneous_components() {
                    if k > maxdeg {
                        out = out.checked_add(&c)?;
                    }
                }
                out
            }
            Element::Unit(w) => unit_word_to_poly(w, self.params.unit_exponent, &self.ideal, maxdeg)?,
        })
    }

    /// First pair `(i, j)`, `i < j`, of arrived elements of `W_m` equal in
    /// `A_s / F_{>k_s}`.
    fn search(&mut self, m: usize) -> Result<Option<(usize, usize)>, RunError> {
        let k_s = self.k_s(m);
        if k_s > self.params.maxdeg {
            return Ok(None);
        }
        let key = (self.ideal.generators().len(), k_s);
        if self.d[m].cache_key != Some(key) {
            let ds = &mut self.d[m];
            ds.cache_key = Some(key);
            ds.seen.clear();
            ds.normals.clear();
            ds.scanned = 0;
            ds.found = None;
        }
        while self.d[m].found.is_none() && self.d[m].scanned < self.d[m].arrived {
            let j = self.d[m].scanned;
            let normal = self.normal_form(&self.d[m].elements[j].1)?;
            let ds = &mut self.d[m];
            let text = normal.truncate(k_s).to_string();
            if let Some(&i) = ds.seen.get(&text) {
                ds.found = Some((i, j));
            } else {
                ds.seen.insert(text, j);
            }
            ds.normals.push(normal);
            ds.scanned += 1;
        }
        Ok(self.d[m].found)
    }

    fn act_l(&mut self, stage: Stage, n: usize) -> Result<(), RunError> {
        let req = l_req(n);
        let h_max = self.ideal.generators().iter().filter_map(Poly::degree).max().unwrap_or(0);
        let protected = self.protections.iter().flatten().copied().max().unwrap_or(0);
        let k = protected.max(h_max).max(self.used_max) + 1;
        let horizon = RunError::Horizon { requirement: req.name.clone(), degree: k, maxdeg: self.params.maxdeg };
        if k > self.params.maxdeg {
            return Err(horizon);
        }
        let m = self.ideal.first_standard_monomial(k)?.ok_or(horizon)?;
        self.pending[n] -= 1;
        self.used_max = k;
        self.t_sets[n].push(m);
        self.protections[n].push(k);
        let mut rec = LogRecord::new(stage, &req, "enumerate")
            .with("monomial", m)
            .with("protect", k)
            .with("t-size", self.t_sets[n].len());
        if self.mode == Mode::Group {
            rec = rec.with("element", UnitWord::from_monomial(&m));
        }
        self.log.push(rec);
        Ok(())
    }

    fn act_d(&mut self, stage: Stage, m: usize, (i, j): (usize, usize)) -> Result<(), RunError> {
        let req = d_req(m);
        let k_s = self.k_s(m);
        let ds = &self.d[m];
        let (f, g) = (&ds.elements[i].1, &ds.elements[j].1);
        let difference = match (f, g) {
            (Element::Ring(f), Element::Ring(g)) => f.checked_sub(g)?,
            _ => ds.normals[i].checked_sub(&ds.normals[j])?,
        };
        let reduced = ds.normals[i].checked_sub(&ds.normals[j])?;
        let (f_text, g_text) = (f.text(), g.text());
        let mut rec = LogRecord::new(stage, &req, "collapse")
            .with("f", &f_text)
            .with("g", &g_text)
            .with("k_s", k_s)
            .with("difference", &difference)
            .with("modulus", self.p())
            .with("maxdeg", self.params.maxdeg);
        let mut degrees = Vec::new();
        for (k, c) in reduced.homogeneous_components() {
            if k <= k_s {
                continue;
            }
            if k <= self.params.maxdeg && self.ideal.member(&c)? {
                continue;
            }
            rec.emitted_relations.push(c.to_string());
            degrees.push(k.to_string());
            self.used_max = self.used_max.max(k);
            self.ideal.add_generator(c)?;
        }
        self.used_max = self.used_max.max(k_s);
        rec = rec.with("degrees", degrees.join(","));
        self.d[m].acted = true;
        self.witnesses.insert(m, DarkWitness { stage, f: f_text, g: g_text, k_s, difference });
        self.log.push(rec);
        let mut victims = Vec::new();
        for n in m + 1..self.columns.len() {
            if !self.t_sets[n].is_empty() || self.pending[n] > 0 {
                self.t_sets[n].clear();
                self.protections[n].clear();
                self.pending[n] = 0;
                victims.push(l_req(n));
            }
        }
        self.log.reinitialize(stage, &req, &victims);
        Ok(())
    }
}
