use std::collections::BTreeMap;

use super::star::{PhiStub, StarParams, StarUniversal};
use super::{ConstructionRun, LogRecord, Requirement, RequirementKind, RunError, RunLog, RunOutputs};
use crate::ceer::pairing::{pair, unpair};
use crate::ceer::{CeerTable, FunctionalStub, Halting, Stage, StagedSet};

/// Inputs of the indexset construction: column families `V_k`, `U_k`, the
/// fixed universal ceer coded into every `H_ℓ`, the `φ_e` stubs handed to
/// each embedded ∗-universal group and the lowness stubs.
#[derive(Debug, Clone)]
pub struct SugInputs {
    pub v_columns: Vec<StagedSet>,
    pub u_columns: Vec<StagedSet>,
    pub universal: CeerTable,
    pub phis: Vec<PhiStub>,
    pub functionals: Vec<FunctionalStub>,
    pub star: StarParams,
    pub stages: usize,
}

#[derive(Debug, Clone)]
pub struct SugOutputs {
    /// Every `G_ℓ` ever started, with the `C_k` that started it and its
    /// embedded run.
    pub g_runs: BTreeMap<usize, (usize, ConstructionRun)>,
    /// Module ceer of every `H_ℓ` ever started.
    pub h_tables: BTreeMap<usize, CeerTable>,
    /// Stage of the last coding step into each `H_ℓ`.
    pub h_last_coded: BTreeMap<usize, Stage>,
    /// `ℓ` held at the end by each `C_k` and each `D_n`.
    pub c_owners: BTreeMap<usize, usize>,
    pub d_owners: BTreeMap<usize, usize>,
    pub restraints: Vec<Option<(usize, Stage)>>,
}

fn c_req(k: usize) -> Requirement {
    Requirement::new(format!("C_{k}"), RequirementKind::Coding, 3 * k + 1)
}

fn l_req(m: usize) -> Requirement {
    Requirement::new(format!("L_{m}"), RequirementKind::Lowness, 3 * m + 2)
}

fn d_req(n: usize) -> Requirement {
    let (k, k2) = unpair(n);
    Requirement::new(format!("D_<{k},{k2}>"), RequirementKind::PairCoding, 3 * n + 3)
}

/// Which lower-priority requirements an action injures: everything for
/// initialization and restraint, and for a continuation step only the
/// restraints covering the group slot it wrote to.
enum Injury {
    All,
    Slot(usize),
    Nothing,
}

struct Sug<'a> {
    inputs: &'a SugInputs,
    c_ell: Vec<Option<usize>>,
    c_seen: Vec<usize>,
    d_ell: Vec<Option<usize>>,
    d_seen: Vec<(usize, usize)>,
    restraint: Vec<Option<(usize, Stage)>>,
    machines: BTreeMap<usize, (usize, StarUniversal)>,
    h_tables: BTreeMap<usize, CeerTable>,
    h_last_coded: BTreeMap<usize, Stage>,
    next_g: usize,
    next_h: usize,
    log: RunLog,
}

impl Sug<'_> {
    /// Relator count of group slot `2ℓ` (`G_ℓ`) or `2ℓ+1` (`H_ℓ`).
    fn relators(&self, slot: usize) -> usize {
        let ell = slot / 2;
        if slot.is_multiple_of(2) {
            self.machines.get(&ell).map_or(0, |(_, m)| m.presentation().relations().len())
        } else {
            self.h_tables.get(&ell).map_or(0, |t| t.pairs().len())
        }
    }

    fn floor(&self, priority: usize) -> usize {
        self.restraint
            .iter()
            .enumerate()
            .filter(|(m, _)| l_req(*m).priority < priority)
            .filter_map(|(_, r)| r.map(|(u, _)| u))
            .max()
            .unwrap_or(0)
    }

    fn act_c(&mut self, stage: Stage, k: usize) -> Result<Injury, RunError> {
        let req = c_req(k);
        self.c_seen[k] = self.inputs.v_columns[k].count_at(stage);
        match self.c_ell[k] {
            None => {
                let floor = self.floor(req.priority);
                let mut ell = self.next_g;
                while 2 * ell < floor {
                    ell += 1;
                }
                self.next_g = ell + 1;
                self.c_ell[k] = Some(ell);
                let machine = StarUniversal::new(&self.inputs.universal, &self.inputs.phis, &self.inputs.star)?;
                self.machines.insert(ell, (k, machine));
                self.log.push(LogRecord::new(stage, &req, "initialize").with("group", format!("G_{ell}")));
                Ok(Injury::All)
            }
            Some(ell) => {
                let (_, machine) = self.machines.get_mut(&ell).expect("started");
                let internal = machine.stage();
                let records = machine.step()?;
                let mut rec = LogRecord::new(stage, &req, "step")
                    .with("group", format!("G_{ell}"))
                    .with("internal-stage", internal);
                for r in records {
                    rec.emitted_relations.extend(r.emitted_relations.iter().map(|x| format!("G{ell}: {x}")));
                }
                let injury = if rec.emitted_relations.is_empty() { Injury::Nothing } else { Injury::Slot(2 * ell) };
                self.log.push(rec);
                Ok(injury)
            }
        }
    }

    fn act_d(&mut self, stage: Stage, n: usize) -> Result<Injury, RunError> {
        let req = d_req(n);
        let (k, k2) = unpair(n);
        self.d_seen[n] =
            (self.inputs.v_columns[k].count_at(stage), self.inputs.u_columns[k2].count_at(stage));
        match self.d_ell[n] {
            None => {
                let floor = self.floor(req.priority);
                let mut ell = self.next_h;
                while 2 * ell + 1 < floor {
                    ell += 1;
                }
                self.next_h = ell + 1;
                self.d_ell[n] = Some(ell);
                self.h_tables.insert(ell, CeerTable::identity(self.inputs.universal.bound()));
                self.log.push(LogRecord::new(stage, &req, "initialize").with("group", format!("H_{ell}")));
                Ok(Injury::All)
            }
            Some(ell) => {
                let table = self.h_tables.get_mut(&ell).expect("started");
                let mut rec = LogRecord::new(stage, &req, "code").with("group", format!("H_{ell}"));
                for p in self.inputs.universal.pairs().iter().take_while(|p| p.stage <= stage) {
                    if !table.related(p.a, p.b, stage)? {
                        table.assert_pair(p.a, p.b, stage)?;
                        rec.emitted_relations.push(format!("H{ell}: g{} = g{}", p.a, p.b));
                    }
                }
                self.h_last_coded.insert(ell, stage);
                let injury =
                    if rec.emitted_relations.is_empty() { Injury::Nothing } else { Injury::Slot(2 * ell + 1) };
                self.log.push(rec);
                Ok(injury)
            }
        }
    }

    fn reinit_below(&mut self, stage: Stage, by: &Requirement, injury: Injury) {
        let mut victims = Vec::new();
        let slot = match injury {
            Injury::Nothing => return,
            Injury::Slot(slot) => Some(slot),
            Injury::All => None,
        };
        for m in 0..self.restraint.len() {
            let covered = match (slot, self.restraint[m]) {
                (_, None) => false,
                (None, Some(_)) => true,
                (Some(slot), Some((u, _))) => slot < u,
            };
            if l_req(m).priority > by.priority && covered {
                self.restraint[m] = None;
                victims.push(l_req(m));
            }
        }
        if slot.is_none() {
            for k in 0..self.c_ell.len() {
                if c_req(k).priority > by.priority && self.c_ell[k].take().is_some() {
                    victims.push(c_req(k));
                }
            }
            for n in 0..self.d_ell.len() {
                if d_req(n).priority > by.priority && self.d_ell[n].take().is_some() {
                    victims.push(d_req(n));
                }
            }
        }
        victims.sort_by_key(|r| r.priority);
        self.log.reinitialize(stage, by, &victims);
    }

    fn stage(&mut self, stage: Stage) -> Result<(), RunError> {
        let (nv, nu, nf) =
            (self.inputs.v_columns.len(), self.inputs.u_columns.len(), self.inputs.functionals.len());
        let nd = self.d_ell.len();
        for i in 0..nv.max(nf).max(nd) {
            if i < nv && self.inputs.v_columns[i].count_at(stage) > self.c_seen[i] {
                let injury = self.act_c(stage, i)?;
                self.reinit_below(stage, &c_req(i), injury);
                return Ok(());
            }
            if i < nf && self.restraint[i].is_none() {
                let oracle = |slot: usize, count: usize| self.relators(slot) >= count;
                if let Halting::Halted { use_bound } = self.inputs.functionals[i].evaluate(&oracle, stage) {
                    self.restraint[i] = Some((use_bound, stage));
                    self.log.push(LogRecord::new(stage, &l_req(i), "restrain").with("use", use_bound));
                    self.reinit_below(stage, &l_req(i), Injury::All);
                    return Ok(());
                }
            }
            if i < nd {
                let (k, k2) = unpair(i);
                if k < nv && k2 < nu {
                    let (sv, su) = self.d_seen[i];
                    if self.inputs.v_columns[k].count_at(stage) > sv
                        && self.inputs.u_columns[k2].count_at(stage) > su
                    {
                        let injury = self.act_d(stage, i)?;
                        self.reinit_below(stage, &d_req(i), injury);
                        return Ok(());
                    }
                }
            }
        }
        Ok(())
    }
}

/// `run_sug_indexset`: requirements `C_0, L_0, D_0, C_1, …`; `C_k` drives a
/// fresh ∗-universal `G_ℓ` one step per new `V_k` entry, `D_<k,k'>` codes
/// the universal ceer into `H_ℓ` while `V_k` and `U_k'` both grow, and `L_m`
/// restrains the groups below the use of a halted stub. Every group is
/// declared abelian at stage 0.
pub fn run_sug_indexset(inputs: &SugInputs) -> Result<ConstructionRun, RunError> {
    inputs.star.check_budget()?;
    let (nv, nu) = (inputs.v_columns.len(), inputs.u_columns.len());
    let nd = if nv == 0 || nu == 0 { 0 } else { pair(nv - 1, nu - 1) + 1 };
    let mut sug = Sug {
        inputs,
        c_ell: vec![None; nv],
        c_seen: vec![0; nv],
        d_ell: vec![None; nd],
        d_seen: vec![(0, 0); nd],
        restraint: vec![None; inputs.functionals.len()],
        machines: BTreeMap::new(),
        h_tables: BTreeMap::new(),
        h_last_coded: BTreeMap::new(),
        next_g: 0,
        next_h: 0,
        log: RunLog::default(),
    };
    for stage in 0..inputs.stages {
        if stage == 0 {
            let mut rec = LogRecord::new(0, &Requirement::initialization(), "abelianize");
            rec.emitted_relations = vec![
                "[G_l, G_l] = 1 for every l".to_string(),
                "[H_l, H_l] = 1 for every l".to_string(),
            ];
            sug.log.push(rec);
        }
        sug.stage(stage)?;
    }
    let c_owners = sug.c_ell.iter().enumerate().filter_map(|(k, l)| l.map(|l| (k, l))).collect();
    let d_owners = sug.d_ell.iter().enumerate().filter_map(|(n, l)| l.map(|l| (n, l))).collect();
    let g_runs = sug.machines.into_iter().map(|(ell, (k, m))| (ell, (k, m.finish()))).collect();
    Ok(ConstructionRun {
        name: "sug".to_string(),
        stages_run: inputs.stages,
        log: sug.log,
        outputs: RunOutputs::Sug(Box::new(SugOutputs {
            g_runs,
            h_tables: sug.h_tables,
            h_last_coded: sug.h_last_coded,
            c_owners,
            d_owners,
            restraints: sug.restraint,
        })),
    })
}
