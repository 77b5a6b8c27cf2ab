//! Declarative scenario files.
//!
//! A scenario is a TOML document naming a construction, a `[params]` block
//! and the input tables the construction reads:
//!
//! ```toml
//! construction = "dark-ring"
//!
//! [params]
//! modulus = 2
//! epsilon = "1/4"
//! stages = 300
//! maxdeg = 16
//!
//! [[columns]]
//! entries = [[0, 3], [1, 7]]      # (element, stage)
//!
//! [[columns]]
//! stream = { start = 10, every = 30 }
//!
//! [[tests]]
//! kind = "powers"
//! letter = "y"
//! ```
//!
//! Tables: `columns` (the `U^[n]`, or the `W^[k]` for `sigma3`, or the `U_k`
//! for `sug-indexset`), `v_columns` (the `V_k`), `tests` (the `W_m`),
//! `universal.pairs` (the ceer `U` as `[a, b, stage]`), `phis` (value tables
//! of `φ_e`) and `functionals` (halting tables of `Φ_m`). A scenario fully
//! determines its run.

use std::fmt;
use std::ops::Range;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Deserialize;
use toml::Spanned;

use crate::algebra::{check_prime, parse_rational, Letter, MAX_DEGREE};
use crate::ceer::{CeerTable, FunctionalStub, Stage, StagedSet, StubComputation, DEFAULT_BOUND};
use crate::groups::Word;
use crate::priority::{
    run_dark_group, run_dark_ring, run_sigma3_ceer, run_star_universal, run_sug_indexset,
    ConstructionRun, DarkParams, PhiStub, RunError, RunOutputs, StarParams, SugInputs, TestStream,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    DarkRing,
    DarkGroup,
    Sigma3,
    StarUniversal,
    SugIndexset,
}

impl Construction {
    pub const NAMES: [&'static str; 5] =
        ["dark-ring", "dark-group", "sigma3", "star-universal", "sug-indexset"];

    pub fn name(self) -> &'static str {
        match self {
            Construction::DarkRing => "dark-ring",
            Construction::DarkGroup => "dark-group",
            Construction::Sigma3 => "sigma3",
            Construction::StarUniversal => "star-universal",
            Construction::SugIndexset => "sug-indexset",
        }
    }

    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "dark-ring" => Construction::DarkRing,
            "dark-group" => Construction::DarkGroup,
            "sigma3" => Construction::Sigma3,
            "star-universal" => Construction::StarUniversal,
            "sug-indexset" => Construction::SugIndexset,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    pub modulus: u32,
    pub epsilon: BigRational,
    pub stages: usize,
    pub maxdeg: usize,
    pub unit_exponent: usize,
    pub base: usize,
    pub levels: usize,
    /// Working bound of the ceer `U`.
    pub bound: usize,
    pub join_bound: Option<usize>,
}

/// Command-line replacements for `[params]` entries, applied before
/// validation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub stages: Option<usize>,
    pub maxdeg: Option<usize>,
    pub base: Option<usize>,
    pub levels: Option<usize>,
    pub epsilon: Option<String>,
    pub modulus: Option<u32>,
    pub unit_exponent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ScenarioError {}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub construction: Construction,
    pub params: Params,
    pub columns: Vec<StagedSet>,
    pub v_columns: Vec<StagedSet>,
    pub tests: Vec<TestStream>,
    pub universal: CeerTable,
    pub phis: Vec<PhiStub>,
    pub functionals: Vec<FunctionalStub>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    construction: Spanned<String>,
    #[serde(default)]
    params: RawParams,
    #[serde(default)]
    columns: Vec<Spanned<RawColumn>>,
    #[serde(default)]
    v_columns: Vec<Spanned<RawColumn>>,
    #[serde(default)]
    tests: Vec<Spanned<RawTest>>,
    #[serde(default)]
    universal: RawUniversal,
    #[serde(default)]
    phis: Vec<Spanned<RawPhi>>,
    #[serde(default)]
    functionals: Vec<RawFunctional>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawParams {
    modulus: Option<Spanned<u32>>,
    epsilon: Option<Spanned<String>>,
    stages: Option<Spanned<usize>>,
    maxdeg: Option<Spanned<usize>>,
    unit_exponent: Option<Spanned<usize>>,
    base: Option<Spanned<usize>>,
    levels: Option<Spanned<usize>>,
    bound: Option<Spanned<usize>>,
    join_bound: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawColumn {
    #[serde(default)]
    entries: Vec<(usize, Stage)>,
    stream: Option<RawStream>,
}

/// Elements `0, 1, 2, …` enumerated at stages `start, start + every, …`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStream {
    #[serde(default)]
    start: Stage,
    every: usize,
    count: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTest {
    kind: String,
    #[serde(default)]
    start: Stage,
    #[serde(default = "one")]
    rate: usize,
    #[serde(default)]
    from_degree: usize,
    letter: Option<String>,
    #[serde(default)]
    items: Vec<(String, Stage)>,
}

fn one() -> usize {
    1
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawUniversal {
    #[serde(default)]
    pairs: Vec<Spanned<(usize, usize, Stage)>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhi {
    default: Option<(String, Stage)>,
    #[serde(default)]
    entries: Vec<(usize, String, Stage)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunctional {
    computations: Vec<StubComputation>,
}

struct Lines<'a> {
    text: &'a str,
}

impl Lines<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn err(&self, span: Range<usize>, message: impl Into<String>) -> ScenarioError {
        ScenarioError { line: Some(self.line(span)), message: message.into() }
    }
}

fn flag_err(flag: &str, message: impl fmt::Display) -> ScenarioError {
    ScenarioError { line: None, message: format!("--{flag}: {message}") }
}

/// A parameter taken from an override if present, else the file, else a
/// default; errors point at whichever source supplied it.
enum Source {
    Flag(&'static str),
    File(Range<usize>),
    Default,
}

fn pick<T: Clone>(
    flag: &'static str,
    over: Option<T>,
    file: &Option<Spanned<T>>,
    default: T,
) -> (T, Source) {
    match (over, file) {
        (Some(v), _) => (v, Source::Flag(flag)),
        (None, Some(s)) => (s.get_ref().clone(), Source::File(s.span())),
        (None, None) => (default, Source::Default),
    }
}

impl Lines<'_> {
    fn at(&self, source: &Source, name: &str, message: impl fmt::Display) -> ScenarioError {
        match source {
            Source::Flag(flag) => flag_err(flag, message),
            Source::File(span) => self.err(span.clone(), format!("{name}: {message}")),
            Source::Default => ScenarioError { line: None, message: format!("{name}: {message}") },
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        Self::load(text, &Overrides::default())
    }

    pub fn load(text: &str, overrides: &Overrides) -> Result<Self, ScenarioError> {
        let lines = Lines { text };
        let raw: RawScenario = toml::from_str(text).map_err(|e| ScenarioError {
            line: e.span().map(|s| lines.line(s)),
            message: e.message().to_string(),
        })?;
        let construction = Construction::parse(raw.construction.get_ref()).ok_or_else(|| {
            lines.err(
                raw.construction.span(),
                format!(
                    "unknown construction {:?}; expected one of {}",
                    raw.construction.get_ref(),
                    Construction::NAMES.join(", ")
                ),
            )
        })?;
        let params = validate_params(&lines, &raw.params, overrides, construction)?;

        let columns = raw
            .columns
            .iter()
            .map(|c| column(&lines, c, params.stages))
            .collect::<Result<Vec<_>, _>>()?;
        let v_columns = raw
            .v_columns
            .iter()
            .map(|c| column(&lines, c, params.stages))
            .collect::<Result<Vec<_>, _>>()?;
        let tests = raw.tests.iter().map(|t| test(&lines, t)).collect::<Result<Vec<_>, _>>()?;

        let mut universal = CeerTable::identity(params.bound);
        let mut pairs: Vec<&Spanned<(usize, usize, Stage)>> = raw.universal.pairs.iter().collect();
        pairs.sort_by_key(|p| p.get_ref().2);
        for p in pairs {
            let (a, b, s) = *p.get_ref();
            universal.assert_pair(a, b, s).map_err(|e| lines.err(p.span(), e.to_string()))?;
        }

        let mut phis = Vec::new();
        for phi in &raw.phis {
            let word = |w: &str| Word::parse(w).map_err(|e| lines.err(phi.span(), e.to_string()));
            let r = phi.get_ref();
            let mut stub = PhiStub::default();
            if let Some((w, s)) = &r.default {
                stub.default = Some((word(w)?, *s));
            }
            for (arg, w, s) in &r.entries {
                stub.entries.insert(*arg, (word(w)?, *s));
            }
            phis.push(stub);
        }
        let functionals = raw
            .functionals
            .into_iter()
            .enumerate()
            .map(|(id, f)| FunctionalStub::new(id, f.computations))
            .collect();

        Ok(Scenario {
            construction,
            params,
            columns,
            v_columns,
            tests,
            universal,
            phis,
            functionals,
        })
    }

    fn dark_params(&self) -> DarkParams {
        DarkParams {
            modulus: self.params.modulus,
            epsilon: self.params.epsilon.clone(),
            stages: self.params.stages,
            maxdeg: self.params.maxdeg,
            unit_exponent: self.params.unit_exponent,
        }
    }

    fn star_params(&self) -> StarParams {
        star_params(&self.params)
    }

    pub fn run(&self) -> Result<ConstructionRun, RunError> {
        let p = &self.params;
        match self.construction {
            Construction::DarkRing => run_dark_ring(&self.columns, &self.tests, &self.dark_params()),
            Construction::DarkGroup => run_dark_group(&self.columns, &self.tests, &self.dark_params()),
            Construction::Sigma3 => {
                run_sigma3_ceer(&self.columns, &self.universal, &self.functionals, p.stages, p.join_bound)
            }
            Construction::StarUniversal => {
                run_star_universal(&self.universal, &self.phis, &self.star_params())
            }
            Construction::SugIndexset => run_sug_indexset(&SugInputs {
                v_columns: self.v_columns.clone(),
                u_columns: self.columns.clone(),
                universal: self.universal.clone(),
                phis: self.phis.clone(),
                functionals: self.functionals.clone(),
                star: self.star_params(),
                stages: p.stages,
            }),
        }
    }

    /// Human-readable report on a finished run of this scenario.
    pub fn summary(&self, run: &ConstructionRun) -> String {
        let mut out = Vec::new();
        out.push(format!("construction: {}", run.name));
        out.push(format!("stages: {}", run.stages_run));
        let records = &run.log.records;
        let relators: usize = records.iter().map(|r| r.emitted_relations.len()).sum();
        let reinits = records.iter().filter(|r| r.is_reinitialization()).count();
        out.push(format!("log records: {}", records.len()));
        out.push(format!("relators emitted: {relators}"));
        out.push(format!("reinitializations: {reinits}"));

        let mut order: Vec<&str> = Vec::new();
        for r in records.iter().filter(|r| !r.is_reinitialization()) {
            if !order.contains(&r.requirement.as_str()) {
                order.push(&r.requirement);
            }
        }
        for name in order {
            let acts = run.actions_of(name);
            let last = acts.last().expect("listed requirements acted");
            out.push(format!(
                "{name}: {} action(s), last {} at stage {}",
                acts.len(),
                last.action,
                last.stage
            ));
        }

        match &run.outputs {
            RunOutputs::Dark(d) => {
                for m in 0..self.tests.len() {
                    match d.witnesses.get(&m) {
                        Some(w) => out.push(format!(
                            "D_{m} acted at stage {} (k_s = {}): {} ~ {}",
                            w.stage, w.k_s, w.f, w.g
                        )),
                        None => out.push(format!("D_{m} did not act")),
                    }
                }
                for (n, t) in d.t_sets.iter().enumerate() {
                    out.push(format!("|T_{n}| = {}", t.len()));
                }
                let counts: Vec<String> =
                    d.ideal.generator_counts().iter().map(|(k, n)| format!("n_{k} = {n}")).collect();
                out.push(format!("generator counts: {}", counts.join(", ")));
                out.push(format!(
                    "gs audit: pass at all {} stages (epsilon = {})",
                    d.audits_passed, self.params.epsilon
                ));
            }
            RunOutputs::Sigma3(s) => {
                for (k, j) in &s.owners {
                    out.push(format!("C_{k} holds column {j}"));
                }
                for (m, r) in s.restraints.iter().enumerate() {
                    match r {
                        Some((u, at)) => out.push(format!(
                            "L_{m} restrains use {u} from stage {at}; preserved: {}",
                            s.use_preserved(m, run.stages_run.saturating_sub(1))
                        )),
                        None => out.push(format!("L_{m} holds no restraint")),
                    }
                }
                out.push(format!("join classes below {}: {}", s.join_bound, s.join.final_partition().class_count()));
            }
            RunOutputs::Star(s) => {
                let last = run.stages_run.saturating_sub(1);
                for j in 0..=s.params.levels {
                    let c = s.census(j, last);
                    out.push(format!(
                        "level {j}: {} level, {} free, {} determined, {} collapsed",
                        c.level, c.free, c.determined, c.collapsed
                    ));
                }
                out.push(format!("relations in presentation: {}", s.presentation.relations().len()));
            }
            RunOutputs::Sug(s) => {
                for (ell, (k, _)) in &s.g_runs {
                    out.push(format!("G_{ell} belongs to C_{k}"));
                }
                for (ell, t) in &s.h_tables {
                    out.push(format!("H_{ell}: {} pairs coded", t.pairs().len()));
                }
            }
        }
        let mut text = out.join("\n");
        text.push('\n');
        text
    }
}

fn star_params(p: &Params) -> StarParams {
    StarParams { base: p.base, levels: p.levels, stages: p.stages, x_bound: DEFAULT_BOUND }
}

fn validate_params(
    lines: &Lines<'_>,
    raw: &RawParams,
    o: &Overrides,
    construction: Construction,
) -> Result<Params, ScenarioError> {
    let (modulus, src) = pick("modulus", o.modulus, &raw.modulus, 2);
    check_prime(modulus).map_err(|e| lines.at(&src, "modulus", e))?;

    let (eps_text, src) = pick("epsilon", o.epsilon.clone(), &raw.epsilon, "1/4".to_string());
    let epsilon = parse_rational(&eps_text).map_err(|e| lines.at(&src, "epsilon", e))?;
    if epsilon <= BigRational::zero() || epsilon > BigRational::one() {
        return Err(lines.at(&src, "epsilon", format!("must lie in (0, 1], got {epsilon}")));
    }

    let (stages, _) = pick("stages", o.stages, &raw.stages, 500);
    let (maxdeg, src) = pick("maxdeg", o.maxdeg, &raw.maxdeg, 16);
    if maxdeg == 0 || maxdeg > MAX_DEGREE {
        return Err(lines.at(&src, "maxdeg", format!("must lie in 1..={MAX_DEGREE}, got {maxdeg}")));
    }
    let (unit_exponent, src) = pick("unit-exponent", o.unit_exponent, &raw.unit_exponent, 13);
    if construction == Construction::DarkGroup && !(2..=maxdeg).contains(&unit_exponent) {
        return Err(lines.at(
            &src,
            "unit_exponent",
            format!("must lie in 2..={maxdeg} (maxdeg), got {unit_exponent}"),
        ));
    }
    let (base, base_src) = pick("base", o.base, &raw.base, 10);
    let (levels, levels_src) = pick("levels", o.levels, &raw.levels, 2);
    let (bound, src) = pick("bound", None, &raw.bound, 64);
    if bound == 0 {
        return Err(lines.at(&src, "bound", "must be positive"));
    }
    let params = Params {
        modulus,
        epsilon,
        stages,
        maxdeg,
        unit_exponent,
        base,
        levels,
        bound,
        join_bound: raw.join_bound,
    };
    if matches!(construction, Construction::StarUniversal | Construction::SugIndexset) {
        if levels + 1 > bound {
            return Err(lines.at(&levels_src, "levels", format!("needs bound > levels, got bound {bound}")));
        }
        star_params(&params).check_budget().map_err(|e| lines.at(&base_src, "base", e))?;
    }
    Ok(params)
}

fn column(lines: &Lines<'_>, c: &Spanned<RawColumn>, stages: usize) -> Result<StagedSet, ScenarioError> {
    let raw = c.get_ref();
    let mut entries = raw.entries.clone();
    if let Some(s) = &raw.stream {
        if s.every == 0 {
            return Err(lines.err(c.span(), "stream: every must be positive"));
        }
        if !entries.is_empty() {
            return Err(lines.err(c.span(), "a column has either entries or a stream, not both"));
        }
        let mut i = 0;
        while s.count.is_none_or(|n| i < n) && s.start + i * s.every < stages {
            entries.push((i, s.start + i * s.every));
            i += 1;
        }
    }
    Ok(StagedSet::new(entries))
}

fn test(lines: &Lines<'_>, t: &Spanned<RawTest>) -> Result<TestStream, ScenarioError> {
    let raw = t.get_ref();
    if raw.rate == 0 {
        return Err(lines.err(t.span(), "rate must be positive"));
    }
    Ok(match raw.kind.as_str() {
        "explicit" => TestStream::Explicit(raw.items.clone()),
        "monomials" => {
            TestStream::Monomials { start: raw.start, rate: raw.rate, from_degree: raw.from_degree }
        }
        "powers" => {
            let letter = match raw.letter.as_deref() {
                Some("x") | None => Letter::X,
                Some("y") => Letter::Y,
                Some(other) => {
                    return Err(lines.err(t.span(), format!("letter must be x or y, got {other:?}")))
                }
            };
            TestStream::Powers { start: raw.start, rate: raw.rate, letter }
        }
        other => {
            return Err(lines.err(
                t.span(),
                format!("unknown test kind {other:?}; expected explicit, monomials or powers"),
            ))
        }
    })
}
