//! Regression suites for proven statements and falsification probes for open
//! ones, run over corpora of schemes.
//!
//! Every case is a [`Check`] on a [`CorpusEntry`]. Its [`Mode`] comes from the
//! rule table in [`SuiteSpec`]. A failing regression case is an engine bug. A
//! failing probe case is replayed on a fresh lab and, over a prime field,
//! under a second prime before it is reported as a counterexample candidate.

pub mod checks;
pub mod corpus;
pub mod rules;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cache::DiskCache;
use crate::error::{Error, Result};
use crate::forms::binomial;
use crate::ideal::Lab;
use crate::par;
use crate::scalar::Field;
use crate::schemes::SchemeRecipe;

pub use checks::{Check, ContainmentRecord, Evidence, Outcome, Value};
pub use corpus::{CorpusEntry, Subject};
pub use rules::{Family, Mode, Relation, Rule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteId {
    ConjMain,
    Chudnovsky,
    Evoessen,
    P2,
    Products,
    RefinedGamma,
    Els,
    Euler,
    Table,
}

impl SuiteId {
    pub const ALL: [SuiteId; 9] = [
        SuiteId::ConjMain,
        SuiteId::Chudnovsky,
        SuiteId::Evoessen,
        SuiteId::P2,
        SuiteId::Products,
        SuiteId::RefinedGamma,
        SuiteId::Els,
        SuiteId::Euler,
        SuiteId::Table,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteId::ConjMain => "conj-main",
            SuiteId::Chudnovsky => "chudnovsky",
            SuiteId::Evoessen => "evoessen",
            SuiteId::P2 => "p2",
            SuiteId::Products => "products",
            SuiteId::RefinedGamma => "refined-gamma",
            SuiteId::Els => "els",
            SuiteId::Euler => "euler",
            SuiteId::Table => "table",
        }
    }

    /// Whether the suite only makes sense over the rationals.
    pub fn needs_rationals(&self) -> bool {
        matches!(self, SuiteId::Euler)
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL.into_iter().find(|id| id.as_str() == s).ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// Which schemes a suite runs over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CorpusSelector {
    /// The suite's built-in corpus.
    Default,
    /// `I = M` with the inflated shift, as a probe: the path on which a
    /// confirmed counterexample is expected.
    MControl,
    Entries { entries: Vec<CorpusEntry> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub suite: SuiteId,
    pub r_max: usize,
    pub m_max: usize,
    pub t_max: usize,
    pub k_max: usize,
    /// Symbolic powers used for the Waldschmidt bracket.
    pub bracket_m: usize,
    /// Seeds for the general-point families of the built-in corpus.
    pub seeds: Vec<u64>,
    /// Random configurations drawn per seed, where the suite uses them.
    pub random_per_seed: usize,
    /// Cases whose largest symbolic power has more conditions than this are
    /// not generated.
    pub max_degree: usize,
    pub corpus: CorpusSelector,
    pub rules: Vec<Rule>,
}

impl SuiteSpec {
    pub fn new(suite: SuiteId) -> Self {
        let (r_max, m_max, t_max, k_max, max_degree) = match suite {
            SuiteId::ConjMain => (2, 2, 1, 1, 800),
            SuiteId::Chudnovsky => (1, 4, 1, 1, 800),
            SuiteId::Evoessen => (3, 3, 1, 1, 800),
            SuiteId::P2 => (3, 5, 1, 1, 800),
            SuiteId::Products => (2, 2, 1, 3, 800),
            SuiteId::RefinedGamma => (1, 2, 2, 1, 800),
            SuiteId::Els => (3, 3, 1, 1, 800),
            SuiteId::Euler => (1, 2, 1, 1, 800),
            SuiteId::Table => (1, 4, 1, 1, 1300),
        };
        SuiteSpec {
            suite,
            r_max,
            m_max,
            t_max,
            k_max,
            bracket_m: 6,
            seeds: vec![1, 2, 3],
            random_per_seed: 60,
            max_degree,
            corpus: CorpusSelector::Default,
            rules: rules::default_rules(),
        }
    }

    pub fn corpus(&self) -> Vec<CorpusEntry> {
        match &self.corpus {
            CorpusSelector::Entries { entries } => entries.clone(),
            CorpusSelector::MControl => vec![CorpusEntry::maximal(2)],
            CorpusSelector::Default => {
                let random = || corpus::random_configurations(&self.seeds[..self.seeds.len().min(2)], self.random_per_seed);
                let mut out = Vec::new();
                match self.suite {
                    SuiteId::ConjMain => {
                        out.extend(corpus::plane(&self.seeds));
                        out.extend(corpus::space(&self.seeds));
                        out.push(CorpusEntry::maximal(2));
                        out.push(CorpusEntry::maximal(3));
                    }
                    SuiteId::Chudnovsky | SuiteId::Evoessen | SuiteId::Els => {
                        out.extend(corpus::plane(&self.seeds));
                        out.extend(corpus::space(&self.seeds));
                        out.extend(random());
                    }
                    SuiteId::P2 => {
                        out.extend(corpus::plane(&self.seeds));
                        out.extend(random());
                    }
                    SuiteId::Products => out.extend(corpus::plane(&self.seeds)),
                    SuiteId::RefinedGamma => {
                        out.extend(corpus::plane(&self.seeds));
                        out.extend(corpus::space(&self.seeds));
                    }
                    SuiteId::Euler => out.extend(corpus::explicit_small()),
                    SuiteId::Table => out.extend(corpus::general(2, 1..=9, &self.seeds)),
                }
                out
            }
        }
    }

    /// The checks this suite runs on one entry, within the cost cap.
    pub fn checks(&self, entry: &CorpusEntry) -> Vec<Check> {
        let n = entry.ambient();
        let plane = n == 2;
        let radical = entry.is_radical();
        let is_m = entry.has(Family::Maximal);
        let mut out: Vec<(Check, usize)> = Vec::new();
        let mut add = |c: Check, top_m: usize| out.push((c, top_m));
        match self.suite {
            SuiteId::ConjMain => {
                for r in 1..=self.r_max {
                    if !is_m {
                        add(Check::new(Relation::ConjMain, &[("r", r), ("j", r * (n - 1))]), r * n);
                    } else if self.corpus == CorpusSelector::MControl {
                        add(Check::new(Relation::ConjMain, &[("r", r), ("j", r * (n - 1) + 1)]), 0);
                    } else {
                        add(Check::new(Relation::NegativeControl, &[("r", r)]), 0);
                    }
                }
            }
            SuiteId::Chudnovsky if radical && !is_m => {
                for m in 1..=self.m_max {
                    add(Check::new(Relation::Chudnovsky, &[("m", m)]), m);
                    add(Check::new(Relation::WaldschmidtSkoda, &[("m", m)]), m);
                    if plane {
                        add(Check::new(Relation::ProductBound, &[("m", m)]), m);
                    }
                }
                add(Check::new(Relation::BracketConsistency, &[("m_max", self.m_max)]), self.m_max);
            }
            SuiteId::Evoessen if radical && !is_m => {
                for r in 1..=self.r_max {
                    let m = r * n - n + 1;
                    add(Check::new(Relation::EvoContainment, &[("r", r)]), m);
                    add(Check::new(Relation::EvoShift, &[("r", r)]), m);
                    add(Check::new(Relation::EvoAlpha, &[("r", r)]), m);
                    if plane && entry.has(Family::General) {
                        add(Check::new(Relation::EvoVariant, &[("r", r)]), 2 * r - 1);
                    }
                }
            }
            SuiteId::P2 if plane && radical && !is_m => {
                for r in 1..=self.r_max {
                    for m in r..(2 * r).min(self.m_max + 1) {
                        add(Check::new(Relation::P2, &[("m", m), ("r", r)]), m);
                    }
                }
            }
            SuiteId::Products if plane && !is_m => {
                for m in 1..=self.m_max {
                    for k in 2..=self.k_max {
                        add(Check::new(Relation::ProductsEquality, &[("m", m), ("k", k)]), m * k);
                    }
                }
                if is_five_general(entry) {
                    for r in 1..=self.r_max {
                        add(Check::new(Relation::OddFactorization, &[("r", r)]), 2 * r + 1);
                    }
                }
            }
            SuiteId::RefinedGamma if radical && !is_m => {
                for m in 1..=self.m_max {
                    add(Check::new(Relation::RefinedGamma, &[("m", m), ("m_max", self.bracket_m)]), self.bracket_m);
                    add(Check::new(Relation::GammaQuestion, &[("m", m), ("m_max", self.bracket_m)]), self.bracket_m);
                    for t in 1..=self.t_max {
                        let top = t * (m + n - 1);
                        add(Check::new(Relation::ShiftQuestion, &[("m", m), ("t", t)]), top);
                        if n > 2 {
                            add(Check::new(Relation::ShiftQuestionFull, &[("m", m), ("t", t)]), top);
                        }
                    }
                }
                if let Some(s) = star_lines(entry) {
                    for m in 1..=self.bracket_m {
                        add(Check::new(Relation::StarAlpha, &[("m", m), ("s", s)]), m);
                    }
                }
            }
            SuiteId::Els if !is_m => {
                for r in 1..=self.r_max {
                    add(Check::new(Relation::Els, &[("r", r)]), n * r);
                }
                if plane && radical {
                    for m in 1..=self.m_max {
                        add(Check::new(Relation::AlphaRegContainment, &[("m", m)]), 2 * m);
                    }
                }
            }
            SuiteId::Euler if !is_m => add(Check::new(Relation::EulerFact, &[]), 2),
            SuiteId::Table => {
                if let Some(count) = general_count(entry) {
                    for m in 1..=self.m_max {
                        if let Some(a) = table_alpha(count, m) {
                            add(Check::new(Relation::TableAlpha, &[("m", m), ("expected", a)]), m);
                        }
                        if let Some(b) = table_beta(count, m) {
                            add(Check::new(Relation::TableBeta, &[("m", m), ("expected", b)]), m);
                        }
                    }
                    let extra = match count {
                        6 => Some(5),
                        7 => Some(8),
                        8 => Some(17),
                        _ => None,
                    };
                    if let Some(m) = extra.filter(|&m| m > self.m_max) {
                        if let Some(a) = table_alpha(count, m) {
                            add(Check::new(Relation::TableAlpha, &[("m", m), ("expected", a)]), m);
                        }
                    }
                }
            }
            _ => {}
        }
        out.into_iter().filter(|(_, top)| entry.degree_at(*top) <= self.max_degree).map(|(c, _)| c).collect()
    }
}

fn general_count(entry: &CorpusEntry) -> Option<usize> {
    match entry.recipe() {
        Some(SchemeRecipe::General { ambient: 2, n, .. }) => Some(*n),
        _ => None,
    }
}

fn is_five_general(entry: &CorpusEntry) -> bool {
    general_count(entry) == Some(5)
}

/// Number of hyperplanes of a star-family entry, from its point count.
fn star_lines(entry: &CorpusEntry) -> Option<usize> {
    if !entry.has(Family::Star) {
        return None;
    }
    let (n, pts) = (entry.ambient(), entry.point_count());
    (n..=pts + n).find(|&s| binomial(s, n) == pts)
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Initial degree of `I^(m)` for `n <= 9` general points of the plane.
pub fn table_alpha(n: usize, m: usize) -> Option<usize> {
    Some(match n {
        1 | 2 => m,
        3 => ceil_div(3 * m, 2),
        4 | 5 => 2 * m,
        6 => ceil_div(12 * m, 5),
        7 => ceil_div(21 * m, 8),
        8 => ceil_div(48 * m, 17),
        9 => 3 * m,
        _ => return None,
    })
}

/// `beta(I^(m))` for `n <= 9` general points of the plane.
pub fn table_beta(n: usize, m: usize) -> Option<usize> {
    Some(match n {
        1 => m,
        2..=4 => 2 * m,
        5 | 6 => ceil_div(5 * m, 2),
        7 => ceil_div(8 * m, 3),
        8 => ceil_div(17 * m, 6),
        9 => 3 * m + 1,
        _ => return None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    NotApplicable,
    /// A probe failure that did not survive the second prime.
    Unconfirmed,
    CounterexampleCandidate,
    RegressionFailure,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recheck {
    /// Result of the replay on a fresh lab over the same field.
    pub fresh_holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_holds: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_evidence: Option<Evidence>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub key: String,
    pub scheme: String,
    pub relation: Relation,
    pub params: BTreeMap<String, usize>,
    pub mode: Mode,
    pub basis: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
    #[serde(default)]
    pub evidence: Evidence,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recheck: Option<Recheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregate {
    AllPass,
    Counterexamples,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteVerdict {
    pub suite: SuiteId,
    pub field: String,
    pub aggregate: Aggregate,
    pub counts: BTreeMap<Status, usize>,
    pub cases: Vec<CaseRecord>,
}

impl SuiteVerdict {
    pub fn from_cases(suite: SuiteId, field: String, mut cases: Vec<CaseRecord>) -> Self {
        cases.sort_by(|a, b| a.key.cmp(&b.key));
        let mut counts = BTreeMap::new();
        for c in &cases {
            *counts.entry(c.status).or_insert(0) += 1;
        }
        let has = |s: Status| counts.contains_key(&s);
        let aggregate = if has(Status::Error) || has(Status::RegressionFailure) {
            Aggregate::Error
        } else if has(Status::CounterexampleCandidate) {
            Aggregate::Counterexamples
        } else {
            Aggregate::AllPass
        };
        SuiteVerdict { suite, field, aggregate, counts, cases }
    }

    /// 0 when everything passed, 1 for confirmed counterexample candidates,
    /// 2 for errors and regression failures.
    pub fn exit_code(&self) -> i32 {
        match self.aggregate {
            Aggregate::AllPass => 0,
            Aggregate::Counterexamples => 1,
            Aggregate::Error => 2,
        }
    }

    pub fn count(&self, s: Status) -> usize {
        self.counts.get(&s).copied().unwrap_or(0)
    }
}

fn evaluate_fresh<F: Field>(field: F, entry: &CorpusEntry, check: &Check) -> Result<Outcome> {
    let lab = Lab::new(field, entry.ambient())?;
    checks::Subjected::realize(&lab, entry)?.evaluate(check)
}

/// Replays a failed probe on a fresh lab, then under the alternate field.
fn recheck<F: Field>(field: &F, entry: &CorpusEntry, check: &Check) -> Result<Recheck> {
    let fresh = evaluate_fresh(field.clone(), entry, check)?;
    if fresh.holds {
        return Err(Error::Irreproducible);
    }
    let mut out = Recheck { fresh_holds: false, second_field: None, second_holds: None, second_evidence: None };
    if let Some(alt) = field.alternate() {
        out.second_field = Some(alt.config().describe());
        let second = evaluate_fresh(alt, entry, check)?;
        out.second_holds = Some(second.holds || !second.applicable);
        out.second_evidence = Some(second.evidence);
    }
    Ok(out)
}

fn run_entry<F: Field>(
    spec: &SuiteSpec,
    field: &F,
    disk: &Option<Arc<DiskCache>>,
    entry: &CorpusEntry,
) -> Vec<CaseRecord> {
    let checks = spec.checks(entry);
    if checks.is_empty() {
        return Vec::new();
    }
    let lab = Lab::new(field.clone(), entry.ambient()).map(|l| l.with_disk_cache(disk.clone()));
    let subject = lab.as_ref().map_err(Clone::clone).and_then(|l| checks::Subjected::realize(l, entry));
    checks
        .iter()
        .map(|check| {
            let (mode, basis) =
                rules::classify(&spec.rules, check.relation, &entry.families, entry.ambient(), entry.point_count());
            let mut rec = CaseRecord {
                key: format!("{}/{}/{}", spec.suite, entry.key, check.label()),
                scheme: entry.key.clone(),
                relation: check.relation,
                params: check.params.clone(),
                mode,
                basis: basis.to_string(),
                status: Status::Error,
                holds: None,
                evidence: Evidence::default(),
                recheck: None,
                error: None,
            };
            let outcome = match &subject {
                Ok(s) => s.evaluate(check),
                Err(e) => Err(e.clone()),
            };
            match outcome {
                Err(e) => rec.error = Some(e.in_case(&rec.key).to_string()),
                Ok(o) => {
                    rec.holds = Some(o.holds);
                    rec.evidence = o.evidence;
                    rec.status = if !o.applicable {
                        Status::NotApplicable
                    } else if o.holds {
                        Status::Pass
                    } else if mode == Mode::Regression {
                        Status::RegressionFailure
                    } else {
                        match recheck(field, entry, check) {
                            Err(e) => {
                                rec.error = Some(e.in_case(&rec.key).to_string());
                                Status::Error
                            }
                            Ok(r) => {
                                let confirmed = r.second_holds != Some(true);
                                rec.recheck = Some(r);
                                if confirmed {
                                    Status::CounterexampleCandidate
                                } else {
                                    Status::Unconfirmed
                                }
                            }
                        }
                    };
                }
            }
            rec
        })
        .collect()
}

/// Runs one suite over its corpus. Entries run concurrently, each on its
/// own lab; records come back sorted by case key.
pub fn run_suite<F: Field>(spec: &SuiteSpec, field: F, disk: Option<Arc<DiskCache>>) -> SuiteVerdict {
    let corpus = spec.corpus();
    let records: Vec<CaseRecord> = par::map(&corpus, |e| run_entry(spec, &field, &disk, e)).into_iter().flatten().collect();
    SuiteVerdict::from_cases(spec.suite, field.config().describe(), records)
}
