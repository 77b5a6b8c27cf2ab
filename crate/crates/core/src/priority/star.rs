use std::collections::BTreeMap;

use super::{
    ConstructionRun, LogRecord, Requirement, RequirementKind, RunError, RunLog, RunOutputs,
    StatusChange,
};
use crate::ceer::{CeerTable, Stage, DEFAULT_BOUND};
use crate::groups::{
    fp_reduce, star_as_free_product, AbelianDecider, CyclicDecider, ExponentVector, GenStatus,
    GroupError, Relation, StagedPresentation, StarWord, Word,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarParams {
    pub base: usize,
    pub levels: usize,
    pub stages: usize,
    /// Bound of the auxiliary ceer `X`; witnesses are drawn below it.
    pub x_bound: usize,
}

impl Default for StarParams {
    fn default() -> Self {
        Self { base: 10, levels: 2, stages: 500, x_bound: DEFAULT_BOUND }
    }
}

impl StarParams {
    /// First index of block `j`; block 0 starts at `x_0`.
    pub fn block_start(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            self.base.pow(j as u32)
        }
    }

    pub fn block_end(&self, j: usize) -> usize {
        self.base.pow(j as u32 + 1)
    }

    pub fn generators(&self) -> usize {
        self.block_end(self.levels)
    }

    /// The StillActiveStuff budget: block size minus the worst-case removals
    /// must exceed `B^j` at every simulated level.
    pub fn check_budget(&self) -> Result<(), RunError> {
        if self.base < 2 {
            return Err(RunError::Params(format!("base must be at least 2, got {}", self.base)));
        }
        let top = (self.base as u128).checked_pow(self.levels as u32 + 1);
        if top.is_none_or(|t| t > 1 << 24) {
            return Err(RunError::Params("too many generators to materialize".into()));
        }
        for j in 0..=self.levels {
            let size = (self.block_end(j) - self.block_start(j)) as i128;
            let removed = 4 * j as i128 * (1i128 << j);
            if size - removed <= self.base.pow(j as u32) as i128 {
                return Err(RunError::Budget {
                    level: j,
                    requirement: "startup".into(),
                    reason: format!("B^(j+1) - B^j - 4*j*2^j must exceed B^j for B = {}", self.base),
                });
            }
        }
        Ok(())
    }
}

/// Stage table for `φ_e`: argument ↦ (value word, convergence stage), with
/// an optional default for unlisted arguments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhiStub {
    pub entries: BTreeMap<usize, (Word, Stage)>,
    pub default: Option<(Word, Stage)>,
}

impl PhiStub {
    pub fn eval(&self, arg: usize, stage: Stage) -> Option<&Word> {
        self.entries
            .get(&arg)
            .or(self.default.as_ref())
            .filter(|(_, s)| *s <= stage)
            .map(|(w, _)| w)
    }
}

/// `v_j = Π_{k in block j} a x_k`.
pub fn star_word(params: &StarParams, j: usize) -> StarWord {
    let mut pieces = vec![Word::empty()];
    pieces.extend((params.block_start(j)..params.block_end(j)).map(Word::gen));
    StarWord::new(pieces)
}

/// Whether `v = w` in `G_s * Z/2Z`.
pub fn words_equal(
    g: &StagedPresentation,
    stage: Stage,
    v: &StarWord,
    w: &StarWord,
) -> Result<bool, GroupError> {
    let abelian = AbelianDecider { presentation: g, stage };
    let z2 = CyclicDecider::new(2);
    Ok(fp_reduce(&star_as_free_product(&v.inverse().concat(w)), &[&abelian, &z2])?.is_empty())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LevelCensus {
    pub level: usize,
    pub free: usize,
    pub determined: usize,
    pub collapsed: usize,
}

#[derive(Debug, Clone)]
pub struct StarOutputs {
    pub params: StarParams,
    pub presentation: StagedPresentation,
    pub x: CeerTable,
    pub words: Vec<StarWord>,
    pub u: CeerTable,
}

impl StarOutputs {
    pub fn census(&self, j: usize, stage: Stage) -> LevelCensus {
        census(&self.params, &self.presentation, j, stage)
    }

    pub fn v_equal(&self, i: usize, j: usize, stage: Stage) -> Result<bool, GroupError> {
        words_equal(&self.presentation, stage, &self.words[i], &self.words[j])
    }
}

fn census(params: &StarParams, g: &StagedPresentation, j: usize, stage: Stage) -> LevelCensus {
    let mut c = LevelCensus::default();
    for k in params.block_start(j)..params.block_end(j) {
        match g.status_at(k, stage) {
            GenStatus::Level(_) => c.level += 1,
            GenStatus::Free => c.free += 1,
            GenStatus::Determined => c.determined += 1,
            GenStatus::Collapsed => c.collapsed += 1,
        }
    }
    c
}

/// Counts per status among the generators of block `j` at `stage`; `None`
/// for runs without a ∗-universal group or unmaterialized levels.
pub fn level_census(run: &ConstructionRun, j: usize, stage: Stage) -> Option<LevelCensus> {
    let out = run.star()?;
    (j <= out.params.levels).then(|| out.census(j, stage))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Case0,
    Case1,
    Case2,
    Case3,
}

#[derive(Debug, Clone, Default)]
struct RState {
    witnesses: Option<(usize, usize)>,
    done: Option<Outcome>,
}

fn r_req(e: usize) -> Requirement {
    Requirement::new(format!("R_{e}"), RequirementKind::Diagonal, e + 1)
}

/// The ∗-universal construction as a stepwise state machine, so that it can
/// also be driven one step at a time from outside.
#[derive(Debug, Clone)]
pub struct StarUniversal {
    params: StarParams,
    u: CeerTable,
    phis: Vec<PhiStub>,
    g: StagedPresentation,
    x: CeerTable,
    stage: Stage,
    r: Vec<RState>,
    next_witness: usize,
    u_rep: Vec<usize>,
    log: RunLog,
}

impl StarUniversal {
    pub fn new(u: &CeerTable, phis: &[PhiStub], params: &StarParams) -> Result<Self, RunError> {
        params.check_budget()?;
        if u.bound() <= params.levels {
            return Err(RunError::Params(format!(
                "U has bound {} but {} levels are simulated",
                u.bound(),
                params.levels
            )));
        }
        let p = params.clone();
        let g = StagedPresentation::new(params.generators(), |k| {
            GenStatus::Level((0..=p.levels).find(|&j| k < p.block_end(j)).expect("materialized"))
        });
        Ok(Self {
            params: params.clone(),
            u: u.clone(),
            phis: phis.to_vec(),
            g,
            x: CeerTable::identity(params.x_bound),
            stage: 0,
            r: vec![RState::default(); phis.len()],
            next_witness: 0,
            u_rep: (0..=params.levels).collect(),
            log: RunLog::default(),
        })
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn presentation(&self) -> &StagedPresentation {
        &self.g
    }

    pub fn log(&self) -> &RunLog {
        &self.log
    }

    /// Runs the next stage and returns the records it produced.
    pub fn step(&mut self) -> Result<&[LogRecord], RunError> {
        let start = self.log.records.len();
        let s = self.stage;
        if s == 0 {
            self.initialize()?;
        }
        self.respond_to_u(s)?;
        self.r_turn(s)?;
        self.stage += 1;
        Ok(&self.log.records[start..])
    }

    pub fn finish(self) -> ConstructionRun {
        let words = (0..=self.params.levels).map(|j| star_word(&self.params, j)).collect();
        ConstructionRun {
            name: "star-universal".to_string(),
            stages_run: self.stage,
            log: self.log,
            outputs: RunOutputs::Star(Box::new(StarOutputs {
                params: self.params,
                presentation: self.g,
                x: self.x,
                words,
                u: self.u,
            })),
        }
    }

    fn fresh_witnesses(&mut self) -> Result<(usize, usize), RunError> {
        let a = self.next_witness;
        if a + 1 >= self.params.x_bound {
            return Err(RunError::Params(format!("witnesses exhausted below {}", self.params.x_bound)));
        }
        self.next_witness += 2;
        Ok((a, a + 1))
    }

    fn set_status(&mut self, rec: &mut LogRecord, k: usize, to: GenStatus) {
        let from = self.g.status(k);
        self.g.set_status(k, self.stage, to);
        rec.status_changes.push(StatusChange { generator: k, from, to });
    }

    fn emit(&mut self, rec: &mut LogRecord, rel: Relation) -> Result<(), RunError> {
        rec.emitted_relations.push(rel.to_string());
        self.g.add_relation(rel)?;
        Ok(())
    }

    fn initialize(&mut self) -> Result<(), RunError> {
        let mut rec = LogRecord::new(0, &Requirement::initialization(), "initialize")
            .with("base", self.params.base)
            .with("levels", self.params.levels)
            .with("generators", self.params.generators());
        for j in 0..=self.params.levels {
            let block: Vec<usize> = (self.params.block_start(j)..self.params.block_end(j)).collect();
            for parity in [0, 1] {
                let set: Vec<usize> = block.iter().copied().filter(|k| k % 2 == parity).collect();
                let rel = Relation::product(0, &set);
                let lhs = rel.lhs;
                self.emit(&mut rec, rel)?;
                self.set_status(&mut rec, lhs, GenStatus::Determined);
            }
        }
        for e in 0..self.r.len() {
            let w = self.fresh_witnesses()?;
            self.r[e].witnesses = Some(w);
            rec = rec.with(&format!("witnesses R_{e}"), format!("{},{}", w.0, w.1));
        }
        self.log.push(rec);
        Ok(())
    }

    /// Current level-`j` generators in index order.
    fn level_list(&self, j: usize) -> Vec<usize> {
        (self.params.block_start(j)..self.params.block_end(j))
            .filter(|&k| self.g.status(k) == GenStatus::Level(j))
            .collect()
    }

    fn respond_to_u(&mut self, s: Stage) -> Result<(), RunError> {
        for j in 1..=self.params.levels {
            let mut rep = j;
            for i in 0..j {
                if self.u.related(i, j, s)? {
                    rep = i;
                    break;
                }
            }
            if rep == self.u_rep[j] {
                continue;
            }
            let was_least = self.u_rep[j] == j;
            self.u_rep[j] = rep;
            let env = Requirement::environment();
            let pair = format!("{rep} {j}");
            if !was_least {
                self.log.push(LogRecord::new(s, &env, "u-merge").with("pair", pair));
                continue;
            }
            let mut rec = LogRecord::new(s, &env, "u-collapse").with("pair", pair);
            let list = self.level_list(j);
            let i_start = self.params.block_start(rep);
            let r = self.params.block_end(rep) - i_start;
            if list.len() < r || list.first().is_some_and(|&k| k % 2 != i_start % 2) {
                return Err(RunError::Budget {
                    level: j,
                    requirement: "env".into(),
                    reason: format!("{} level generators cannot cover block {rep}", list.len()),
                });
            }
            for (t, &k) in list.iter().enumerate() {
                let rel = if t < r { Relation::equal(s, k, i_start + t) } else { Relation::one(s, k) };
                self.emit(&mut rec, rel)?;
                self.set_status(&mut rec, k, GenStatus::Collapsed);
            }
            self.log.push(rec);
            let mut victims = Vec::new();
            for e in j..self.r.len() {
                if self.r[e].done == Some(Outcome::Case2) {
                    let w = self.fresh_witnesses()?;
                    self.r[e] = RState { witnesses: Some(w), done: None };
                    victims.push((r_req(e), w));
                }
            }
            self.reinit_records(s, &env, victims);
        }
        Ok(())
    }

    fn reinit_records(&mut self, s: Stage, by: &Requirement, victims: Vec<(Requirement, (usize, usize))>) {
        let reqs: Vec<Requirement> = victims.iter().map(|(r, _)| r.clone()).collect();
        self.log.reinitialize(s, by, &reqs);
        let n = self.log.records.len();
        for (rec, (_, w)) in self.log.records[n - victims.len()..].iter_mut().zip(&victims) {
            rec.detail.insert("witnesses".into(), format!("{},{}", w.0, w.1));
        }
    }

    fn reinit_lower(&mut self, s: Stage, e: usize) -> Result<(), RunError> {
        let mut victims = Vec::new();
        for e2 in e + 1..self.r.len() {
            let w = self.fresh_witnesses()?;
            self.r[e2] = RState { witnesses: Some(w), done: None };
            victims.push((r_req(e2), w));
        }
        self.reinit_records(s, &r_req(e), victims);
        Ok(())
    }

    fn r_turn(&mut self, s: Stage) -> Result<(), RunError> {
        for e in 0..self.r.len() {
            let RState { witnesses: Some((a, b)), done: None } = self.r[e] else { continue };
            let (Some(wa), Some(wb)) = (self.phis[e].eval(a, s), self.phis[e].eval(b, s)) else {
                continue;
            };
            let w = wa.concat(&wb.inverse()).exponents();
            return self.dispatch(s, e, a, b, w);
        }
        Ok(())
    }

    fn letter_level(&self, k: usize) -> Option<usize> {
        match self.g.status(k) {
            GenStatus::Level(j) => Some(j),
            _ => None,
        }
    }

    fn dispatch(&mut self, s: Stage, e: usize, a: usize, b: usize, w: ExponentVector) -> Result<(), RunError> {
        let req = r_req(e);
        loop {
            let w = self.g.staged_abelian_wp(&w, s)?;
            let base = |action: &str| {
                LogRecord::new(s, &req, action).with("a", a).with("b", b).with("w", Word::from_exponents(&w))
            };
            if w.is_empty() {
                self.log.push(base("case-0"));
                self.r[e].done = Some(Outcome::Case0);
                return Ok(());
            }
            if w.keys().any(|&k| self.g.status(k) == GenStatus::Free) {
                self.x.assert_pair(a, b, s)?;
                self.log.push(base("case-1"));
                self.r[e].done = Some(Outcome::Case1);
                return self.reinit_lower(s, e);
            }
            let k_level = w.keys().filter_map(|&k| self.letter_level(k)).max().ok_or_else(|| {
                RunError::Budget { level: 0, requirement: req.name.clone(), reason: "w has no level letters".into() }
            })?;
            if k_level <= e {
                self.x.assert_pair(a, b, s)?;
                self.log.push(base("case-2").with("K", k_level));
                self.r[e].done = Some(Outcome::Case2);
                return self.reinit_lower(s, e);
            }
            let list = self.level_list(k_level);
            let exp = |k: usize| w.get(&k).copied().unwrap_or(0);
            let mut quartet = None;
            for (parity, name) in [(0, "case-3a"), (1, "case-3b")] {
                let same: Vec<usize> = list.iter().copied().filter(|k| k % 2 == parity).collect();
                if let Some(pair) = same.windows(2).find(|p| exp(p[0]) != exp(p[1])) {
                    quartet = Some((pair[0], pair[1], name));
                    break;
                }
            }
            if let Some((lo, hi, name)) = quartet {
                let budget = |reason: &str| RunError::Budget {
                    level: k_level,
                    requirement: req.name.clone(),
                    reason: reason.into(),
                };
                let pos_lo = list.iter().position(|&k| k == lo).expect("listed");
                let pos_hi = list.iter().position(|&k| k == hi).expect("listed");
                if pos_hi != pos_lo + 2 {
                    return Err(budget("level generators no longer alternate in parity"));
                }
                let between = list[pos_lo + 1];
                let (m, action) = match list.get(pos_hi + 1) {
                    Some(&m) => (m, name.to_string()),
                    None if pos_lo > 0 => (list[pos_lo - 1], format!("{name}-alt")),
                    None => return Err(budget("no neighbouring letter to collapse")),
                };
                let mut rec = base(&action).with("K", k_level);
                self.emit(&mut rec, Relation::one(s, between))?;
                self.emit(&mut rec, Relation::one(s, m))?;
                self.emit(&mut rec, Relation::inverse(s, hi, lo))?;
                self.set_status(&mut rec, between, GenStatus::Collapsed);
                self.set_status(&mut rec, m, GenStatus::Collapsed);
                self.set_status(&mut rec, lo, GenStatus::Free);
                self.set_status(&mut rec, hi, GenStatus::Free);
                self.x.assert_pair(a, b, s)?;
                self.log.push(rec);
                self.r[e].done = Some(Outcome::Case3);
                return self.reinit_lower(s, e);
            }
            let mut rec = base("case-3c").with("K", k_level);
            for parity in [0, 1] {
                let set: Vec<usize> = list.iter().copied().filter(|k| k % 2 == parity).collect();
                if set.is_empty() {
                    continue;
                }
                let rel = Relation::product(s, &set);
                let lhs = rel.lhs;
                self.emit(&mut rec, rel)?;
                self.set_status(&mut rec, lhs, GenStatus::Determined);
            }
            let reduced = self.g.staged_abelian_wp(&w, s)?;
            let k_after = reduced.keys().filter_map(|&k| self.letter_level(k)).max();
            rec = rec.with("K-after", k_after.map_or("none".to_string(), |k| k.to_string()));
            self.log.push(rec);
            self.reinit_lower(s, e)?;
        }
    }
}

/// `run_star_universal`: builds `G`, `X` and the words `v_j` so that `X`
/// does not reduce to the word problem of `G * Z/2Z` via any listed `φ_e`.
pub fn run_star_universal(
    u: &CeerTable,
    phis: &[PhiStub],
    params: &StarParams,
) -> Result<ConstructionRun, RunError> {
    let mut machine = StarUniversal::new(u, phis, params)?;
    for _ in 0..params.stages {
        machine.step()?;
    }
    Ok(machine.finish())
}
