use std::collections::BTreeMap;

use super::{ConstructionRun, LogRecord, Requirement, RequirementKind, RunError, RunLog, RunOutputs};
use crate::ceer::pairing::{triangle, unpair};
use crate::ceer::{uniform_join, CeerTable, FunctionalStub, Halting, Stage, StagedSet};

/// What the Σ3 construction built: the columns `X^j`, their join `E^i` and
/// the final restraints.
#[derive(Debug, Clone)]
pub struct Sigma3Outputs {
    pub columns: Vec<CeerTable>,
    /// Column currently held by each `C_k`.
    pub owners: BTreeMap<usize, usize>,
    pub join: CeerTable,
    pub join_bound: usize,
    /// Per `L_m`: use and stage of the restraint in force at the end.
    pub restraints: Vec<Option<(usize, Stage)>>,
    /// `(stage, k, j)` for every `C_k` action on column `j`.
    pub catch_ups: Vec<(Stage, usize, usize)>,
}

impl Sigma3Outputs {
    /// Whether the join restricted below `L_m`'s use is the same at the end
    /// as when the restraint was placed.
    pub fn use_preserved(&self, m: usize, final_stage: Stage) -> bool {
        let Some(Some((u, at))) = self.restraints.get(m) else { return false };
        let u = (*u).min(self.join_bound);
        (0..u).all(|a| {
            (0..u).all(|b| {
                self.join.related(a, b, *at).unwrap_or(false)
                    == self.join.related(a, b, final_stage).unwrap_or(false)
            })
        })
    }
}

fn c_req(k: usize) -> Requirement {
    Requirement::new(format!("C_{k}"), RequirementKind::Coding, 2 * k + 1)
}

fn l_req(m: usize) -> Requirement {
    Requirement::new(format!("L_{m}"), RequirementKind::Lowness, 2 * m + 2)
}

fn oracle_holds(columns: &[CeerTable], stage: Stage, a: usize, b: usize) -> bool {
    if a == b {
        return true;
    }
    let ((j, n), (j2, n2)) = (unpair(a), unpair(b));
    j == j2 && columns.get(j).is_some_and(|c| c.related(n, n2, stage).unwrap_or(false))
}

/// `run_sigma3_ceer`: each `C_k` makes a column copy `U` while `W^[k]` keeps
/// growing; each `L_m` freezes the join below the use of a halted stub.
/// `join_bound` defaults to `T(U.bound())`, the largest bound at which every
/// code fits inside its column.
pub fn run_sigma3_ceer(
    columns_in: &[StagedSet],
    u: &CeerTable,
    functionals: &[FunctionalStub],
    stages: usize,
    join_bound: Option<usize>,
) -> Result<ConstructionRun, RunError> {
    let join_bound = join_bound.unwrap_or_else(|| triangle(u.bound()));
    let mut columns: Vec<CeerTable> = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; columns_in.len()];
    let mut handled = vec![0usize; columns_in.len()];
    let mut restraint: Vec<Option<(usize, Stage)>> = vec![None; functionals.len()];
    let mut next_fresh = 0usize;
    let mut catch_ups = Vec::new();
    let mut log = RunLog::default();
    let count = columns_in.len().max(functionals.len());

    for stage in 0..stages {
        let mut acted: Option<Requirement> = None;
        for i in 0..count {
            if i < columns_in.len() && columns_in[i].count_at(stage) > handled[i] {
                handled[i] = columns_in[i].count_at(stage);
                let req = c_req(i);
                let mut rec;
                let j = match owner[i] {
                    Some(j) => {
                        rec = LogRecord::new(stage, &req, "catch-up");
                        j
                    }
                    None => {
                        let floor = restraint.iter().take(i).flatten().map(|&(u, _)| u).max().unwrap_or(0);
                        let mut j = next_fresh;
                        while triangle(j) < floor {
                            j += 1;
                        }
                        next_fresh = j + 1;
                        owner[i] = Some(j);
                        rec = LogRecord::new(stage, &req, "initialize");
                        j
                    }
                };
                if columns.len() <= j {
                    columns.resize(j + 1, CeerTable::identity(u.bound()));
                }
                let mut added = 0;
                for p in u.pairs().iter().take_while(|p| p.stage <= stage) {
                    if !columns[j].related(p.a, p.b, stage)? {
                        columns[j].assert_pair(p.a, p.b, stage)?;
                        added += 1;
                    }
                }
                rec = rec.with("column", j).with("pairs-added", added);
                log.push(rec);
                catch_ups.push((stage, i, j));
                acted = Some(req);
                break;
            }
            if i < functionals.len() && restraint[i].is_none() {
                let oracle = |a: usize, b: usize| oracle_holds(&columns, stage, a, b);
                if let Halting::Halted { use_bound } = functionals[i].evaluate(&oracle, stage) {
                    restraint[i] = Some((use_bound, stage));
                    let req = l_req(i);
                    log.push(LogRecord::new(stage, &req, "restrain").with("use", use_bound));
                    acted = Some(req);
                    break;
                }
            }
        }
        if let Some(req) = acted {
            let mut victims = Vec::new();
            for i in 0..count {
                if i < columns_in.len() && c_req(i).priority > req.priority && owner[i].is_some() {
                    owner[i] = None;
                    victims.push(c_req(i));
                }
                if i < functionals.len() && l_req(i).priority > req.priority && restraint[i].is_some() {
                    restraint[i] = None;
                    victims.push(l_req(i));
                }
            }
            log.reinitialize(stage, &req, &victims);
        }
    }

    let join = uniform_join(&columns, join_bound)?;
    let owners = owner.iter().enumerate().filter_map(|(k, j)| j.map(|j| (k, j))).collect();
    Ok(ConstructionRun {
        name: "sigma3".to_string(),
        stages_run: stages,
        log,
        outputs: RunOutputs::Sigma3(Sigma3Outputs {
            columns,
            owners,
            join,
            join_bound,
            restraints: restraint,
            catch_ups,
        }),
    })
}
