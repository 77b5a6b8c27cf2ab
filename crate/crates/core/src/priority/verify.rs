use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::star::{star_word, words_equal, StarParams};
use super::{LogRecord, RequirementKind};
use crate::algebra::{HomogeneousIdeal, Poly};
use crate::ceer::Stage;
use crate::groups::{GenStatus, Relation, StagedPresentation};

pub const SUITES: [&str; 6] =
    ["triangularity", "level-census", "vi-vs-U", "membership", "protection", "injury"];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub checked: usize,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        Self { suite: suite.to_string(), ..Self::default() }
    }

    fn vacuous(mut self, why: &str) -> Self {
        self.warnings.push(format!("vacuous pass: {why}"));
        self
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{verdict} {} ({} checks)", self.suite, self.checked)?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for x in &self.failures {
            writeln!(f, "failure: {x}")?;
        }
        Ok(())
    }
}

/// Runs the named invariant suite over a finished log.
pub fn verify_log(records: &[LogRecord], suite: &str) -> Result<SuiteReport, String> {
    if !SUITES.contains(&suite) {
        return Err(format!("unknown suite {suite:?}; expected one of {}", SUITES.join(", ")));
    }
    let report = SuiteReport::new(suite);
    if records.is_empty() {
        return Ok(report.vacuous("empty log"));
    }
    Ok(match suite {
        "triangularity" => triangularity(records, report),
        "level-census" => level_census(records, report),
        "vi-vs-U" => vi_vs_u(records, report),
        "membership" => membership(records, report),
        "protection" => protection(records, report),
        _ => injury(records, report),
    })
}

/// Group-tagged relations: `"G3: x8 = …"` belongs to group `G3`, untagged
/// relations to the single group of the run.
fn relations(records: &[LogRecord]) -> Vec<(String, Stage, String)> {
    let mut out = Vec::new();
    for r in records {
        for text in &r.emitted_relations {
            let (group, body) = match text.split_once(": ") {
                Some((g, b)) => (g.to_string(), b),
                None => (String::new(), text.as_str()),
            };
            if body.starts_with('x') && body.contains('=') {
                out.push((group, r.stage, body.to_string()));
            }
        }
    }
    out
}

fn triangularity(records: &[LogRecord], mut report: SuiteReport) -> SuiteReport {
    let rels = relations(records);
    if rels.is_empty() {
        return report.vacuous("no generator relations in log");
    }
    let mut seen: BTreeSet<(String, usize)> = BTreeSet::new();
    for (group, _, text) in rels {
        report.checked += 1;
        let rel: Relation = match text.parse() {
            Ok(rel) => rel,
            Err(e) => {
                report.failures.push(format!("{text}: {e}"));
                continue;
            }
        };
        let tag = if group.is_empty() { String::new() } else { format!("{group}: ") };
        if !seen.insert((group.clone(), rel.lhs)) {
            report.failures.push(format!("{tag}{text}: x{} is a left-hand side twice", rel.lhs));
        }
        if let Some(g) = rel.rhs.keys().find(|&&g| g >= rel.lhs) {
            report.failures.push(format!("{tag}{text}: right-hand side mentions x{g}"));
        }
    }
    report
}

/// What a ∗-universal log says about itself: its parameters, the
/// presentation it built and the `U`-merges it saw.
struct StarReplay {
    params: StarParams,
    presentation: StagedPresentation,
    merges: Vec<(Stage, usize, usize)>,
    stages: Vec<Stage>,
}

fn replay_star(records: &[LogRecord]) -> Result<Option<StarReplay>, String> {
    let Some(init) = records.iter().find(|r| r.kind == RequirementKind::Initialization && r.get("base").is_some())
    else {
        return Ok(None);
    };
    let num = |key: &str| -> Result<usize, String> {
        init.get(key).and_then(|v| v.parse().ok()).ok_or_else(|| format!("init record lacks {key}"))
    };
    let params = StarParams { base: num("base")?, levels: num("levels")?, ..StarParams::default() };
    let n = num("generators")?;
    if n != params.generators() {
        return Err(format!("init record claims {n} generators"));
    }
    let p = params.clone();
    let mut presentation = StagedPresentation::new(n, |k| {
        GenStatus::Level((0..=p.levels).find(|&j| k < p.block_end(j)).expect("materialized"))
    });
    let mut merges = Vec::new();
    let mut stages = Vec::new();
    for r in records {
        if stages.last() != Some(&r.stage) {
            stages.push(r.stage);
        }
        for text in &r.emitted_relations {
            let mut rel: Relation = text.parse().map_err(|e| format!("{text}: {e}"))?;
            rel.stage = r.stage;
            presentation.add_relation(rel).map_err(|e| e.to_string())?;
        }
        for c in &r.status_changes {
            if c.generator >= n {
                return Err(format!("status change for x{} beyond the materialized range", c.generator));
            }
            presentation.set_status(c.generator, r.stage, c.to);
        }
        if r.kind == RequirementKind::Environment {
            if let Some((i, j)) = r.get("pair").and_then(|p| p.split_once(' ')) {
                let (i, j) = (i.parse().map_err(|_| "bad pair")?, j.parse().map_err(|_| "bad pair")?);
                merges.push((r.stage, i, j));
            }
        }
    }
    Ok(Some(StarReplay { params, presentation, merges, stages }))
}

impl StarReplay {
    /// Least member of each level's `U`-class at `stage`.
    fn u_reps(&self, stage: Stage) -> Vec<usize> {
        let mut rep: Vec<usize> = (0..=self.params.levels).collect();
        for &(s, i, j) in &self.merges {
            if s > stage {
                break;
            }
            let (a, b) = (rep[i], rep[j]);
            let (lo, hi) = (a.min(b), a.max(b));
            for r in rep.iter_mut() {
                if *r == hi {
                    *r = lo;
                }
            }
        }
        rep
    }
}

fn star_replay_or_vacuous(
    records: &[LogRecord],
    report: SuiteReport,
) -> Result<(StarReplay, SuiteReport), SuiteReport> {
    match replay_star(records) {
        Ok(Some(replay)) => Ok((replay, report)),
        Ok(None) => Err(report.vacuous("log has no star-universal initialization")),
        Err(e) => {
            let mut report = report;
            report.failures.push(e);
            Err(report)
        }
    }
}

fn level_census(records: &[LogRecord], report: SuiteReport) -> SuiteReport {
    let (replay, mut report) = match star_replay_or_vacuous(records, report) {
        Ok(x) => x,
        Err(r) => return r,
    };
    for &stage in &replay.stages {
        let reps = replay.u_reps(stage);
        for j in 0..=replay.params.levels {
            if reps[j] != j {
                continue;
            }
            report.checked += 1;
            let count = (replay.params.block_start(j)..replay.params.block_end(j))
                .filter(|&k| replay.presentation.status_at(k, stage) == GenStatus::Level(j))
                .count();
            let floor = replay.params.base.pow(j as u32);
            if count <= floor {
                report.failures.push(format!("stage {stage}: level {j} has {count} generators, not more than {floor}"));
            }
        }
    }
    report
}

fn vi_vs_u(records: &[LogRecord], report: SuiteReport) -> SuiteReport {
    let (replay, mut report) = match star_replay_or_vacuous(records, report) {
        Ok(x) => x,
        Err(r) => return r,
    };
    let words: Vec<_> = (0..=replay.params.levels).map(|j| star_word(&replay.params, j)).collect();
    for &stage in &replay.stages {
        let reps = replay.u_reps(stage);
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                report.checked += 1;
                match words_equal(&replay.presentation, stage, &words[i], &words[j]) {
                    Ok(equal) if equal == (reps[i] == reps[j]) => {}
                    Ok(equal) => report.failures.push(format!(
                        "stage {stage}: v_{i} {} v_{j} but U says {}",
                        if equal { "=" } else { "!=" },
                        if reps[i] == reps[j] { "related" } else { "unrelated" }
                    )),
                    Err(e) => report.failures.push(format!("stage {stage}: {e}")),
                }
            }
        }
    }
    report
}

fn membership(records: &[LogRecord], mut report: SuiteReport) -> SuiteReport {
    let collapses: Vec<&LogRecord> =
        records.iter().filter(|r| r.get("difference").is_some() && r.get("modulus").is_some()).collect();
    if collapses.is_empty() {
        return report.vacuous("no collapse records with witness pairs");
    }
    let parse_num = |r: &LogRecord, key: &str| r.get(key).and_then(|v| v.parse::<usize>().ok());
    let (Some(p), Some(maxdeg)) = (parse_num(collapses[0], "modulus"), parse_num(collapses[0], "maxdeg")) else {
        report.failures.push("collapse record lacks modulus or maxdeg".into());
        return report;
    };
    let p = p as u32;
    let mut ideal = match HomogeneousIdeal::new(p, maxdeg) {
        Ok(i) => i,
        Err(e) => {
            report.failures.push(e.to_string());
            return report;
        }
    };
    for r in records.iter().filter(|r| r.get("modulus").is_some()) {
        for text in &r.emitted_relations {
            if let Err(e) = Poly::parse(text, p).and_then(|h| ideal.add_generator(h)) {
                report.failures.push(format!("{}: {text}: {e}", r.requirement));
            }
        }
    }
    for r in collapses {
        report.checked += 1;
        let diff = match Poly::parse(r.get("difference").expect("filtered"), p) {
            Ok(d) => d,
            Err(e) => {
                report.failures.push(format!("{}: {e}", r.requirement));
                continue;
            }
        };
        for (k, c) in diff.homogeneous_components() {
            let ok = if k <= maxdeg { ideal.member(&c).unwrap_or(false) } else { ideal.has_generator(&c) };
            if !ok {
                report.failures.push(format!(
                    "{}: degree-{k} component of f - g is not in the ideal (f = {}, g = {})",
                    r.requirement,
                    r.get("f").unwrap_or("?"),
                    r.get("g").unwrap_or("?")
                ));
            }
        }
    }
    report
}

fn protection(records: &[LogRecord], mut report: SuiteReport) -> SuiteReport {
    let mut active: BTreeMap<String, (usize, Vec<usize>)> = BTreeMap::new();
    let mut any = false;
    for r in records {
        if r.is_reinitialization() {
            active.remove(&r.requirement);
            continue;
        }
        if let Some(k) = r.get("protect").and_then(|k| k.parse::<usize>().ok()) {
            any = true;
            active.entry(r.requirement.clone()).or_insert((r.priority, Vec::new())).1.push(k);
        }
        if r.emitted_relations.is_empty() || r.priority == 0 {
            continue;
        }
        let Some(p) = r.get("modulus").and_then(|p| p.parse::<u32>().ok()) else { continue };
        for text in &r.emitted_relations {
            let Some(degree) = Poly::parse(text, p).ok().and_then(|h| h.degree()) else {
                report.failures.push(format!("{}: cannot read relator {text}", r.requirement));
                continue;
            };
            for (name, (priority, degrees)) in &active {
                if *priority >= r.priority {
                    continue;
                }
                for &k in degrees {
                    report.checked += 1;
                    if degree <= k {
                        report.failures.push(format!(
                            "stage {}: {} added {text} of degree {degree}, but {name} protects degree {k}",
                            r.stage, r.requirement
                        ));
                    }
                }
            }
        }
    }
    if !any {
        return report.vacuous("no protected degrees in log");
    }
    report
}

fn injury(records: &[LogRecord], mut report: SuiteReport) -> SuiteReport {
    let mut by_stage: BTreeMap<Stage, Vec<&LogRecord>> = BTreeMap::new();
    for r in records {
        by_stage.entry(r.stage).or_default().push(r);
    }
    for (stage, recs) in by_stage {
        let actors: BTreeSet<(&str, usize)> = recs
            .iter()
            .filter(|r| !r.is_reinitialization() && r.priority > 0)
            .map(|r| (r.requirement.as_str(), r.priority))
            .collect();
        report.checked += 1;
        if actors.len() > 1 {
            let names: Vec<&str> = actors.iter().map(|a| a.0).collect();
            report.failures.push(format!("stage {stage}: several requirements acted: {}", names.join(", ")));
        }
        for r in recs.iter().filter(|r| r.is_reinitialization()) {
            report.checked += 1;
            let by = r.get("by").unwrap_or("");
            let cause = recs.iter().find(|c| c.requirement == by && !c.is_reinitialization());
            match cause {
                Some(c) if c.priority < r.priority => {}
                Some(c) => report.failures.push(format!(
                    "stage {stage}: {} (priority {}) reinitialized by {by} of priority {}",
                    r.requirement, r.priority, c.priority
                )),
                None => report.failures.push(format!(
                    "stage {stage}: {} reinitialized by {by:?}, which did not act",
                    r.requirement
                )),
            }
        }
    }
    report
}
