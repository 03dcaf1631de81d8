//! Regression/probe classification.
//!
//! A relation that is proven for a family of schemes is a regression check on
//! that family: a failure indicts the engine. Everything else is a probe,
//! whose failures are counterexample candidates. Classification lives in this
//! table so that a new proof changes data, not control flow.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Regression,
    Probe,
}

/// Tags attached to corpus entries; rules select on them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Star,
    CompleteIntersection,
    General,
    Fixture,
    Random,
    Explicit,
    Maximal,
}

/// Every relation the suites evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `I^(rN) ⊆ M^j I^r` with `j = r(N-1)`.
    ConjMain,
    /// `M^(rN) ⊄ M^(r(N-1)+1) M^r`, with a verified witness.
    NegativeControl,
    /// `alpha_m / m >= (alpha + N - 1) / N`.
    Chudnovsky,
    /// `alpha_m / m >= alpha / N`.
    WaldschmidtSkoda,
    /// `alpha_m beta_m >= m^2 deg Z` in the plane.
    ProductBound,
    /// `alpha_m / (m + N - 1) <= alpha_k / k` for all computed `m, k`.
    BracketConsistency,
    /// `I^(Nr) ⊆ I^r`.
    Els,
    /// `I^(2m) ⊆ I^m` when `alpha = reg <= 3`.
    AlphaRegContainment,
    /// `I^(rN-N+1) ⊆ I^r`.
    EvoContainment,
    /// `I^(rN-N+1) ⊆ M^((r-1)(N-1)) I^r`.
    EvoShift,
    /// `alpha(I^(rN-N+1)) >= r alpha + (r-1)(N-1)`.
    EvoAlpha,
    /// `I^(2r-1) I ⊆ M^(r-1) I^r` in the plane.
    EvoVariant,
    /// `I^(m) ⊆ I^r` whenever `m/r >= 2 alpha / (alpha + 1)`.
    P2,
    /// `(I^(m))^k = I^(mk)` when `alpha_m beta_m = m^2 deg Z`.
    ProductsEquality,
    /// `I^(2r) = (I^(2))^r` and `I^(2r+1) = I^(2r) I` for five general points.
    OddFactorization,
    /// `alpha(I^(m))` of a star matches the closed formula.
    StarAlpha,
    /// `(alpha_m + 1) / (m + N - 1) <= gamma`.
    RefinedGamma,
    /// `(alpha_m + N - 1) / (m + N - 1) <= gamma`.
    GammaQuestion,
    /// `I^(t(m+N-1)) ⊆ M^t (I^(m))^t`.
    ShiftQuestion,
    /// `I^(t(m+N-1)) ⊆ M^(t(N-1)) (I^(m))^t`.
    ShiftQuestionFull,
    /// `I^(2) ⊆ M I` in characteristic zero.
    EulerFact,
    /// `alpha(I^(m))` of general points matches the tabulated value.
    TableAlpha,
    /// `beta(I^(m))` of general points matches the tabulated value.
    TableBeta,
}

impl Relation {
    pub fn name(&self) -> &'static str {
        match self {
            Relation::ConjMain => "conj-main",
            Relation::NegativeControl => "negative-control",
            Relation::Chudnovsky => "chudnovsky",
            Relation::WaldschmidtSkoda => "waldschmidt-skoda",
            Relation::ProductBound => "product-bound",
            Relation::BracketConsistency => "bracket-consistency",
            Relation::Els => "els",
            Relation::AlphaRegContainment => "alpha-reg-containment",
            Relation::EvoContainment => "evo-containment",
            Relation::EvoShift => "evo-shift",
            Relation::EvoAlpha => "evo-alpha",
            Relation::EvoVariant => "evo-variant",
            Relation::P2 => "p2",
            Relation::ProductsEquality => "products-equality",
            Relation::OddFactorization => "odd-factorization",
            Relation::StarAlpha => "star-alpha",
            Relation::RefinedGamma => "refined-gamma",
            Relation::GammaQuestion => "gamma-question",
            Relation::ShiftQuestion => "shift-question",
            Relation::ShiftQuestionFull => "shift-question-full",
            Relation::EulerFact => "euler",
            Relation::TableAlpha => "table-alpha",
            Relation::TableBeta => "table-beta",
        }
    }
}

/// One classification row. Empty selectors match everything; the first
/// matching rule for a relation wins.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub relation: Relation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_points: Option<usize>,
    pub mode: Mode,
    pub basis: String,
}

impl Rule {
    fn new(relation: Relation, mode: Mode, basis: &str) -> Self {
        Rule { relation, family: None, ambient: None, min_points: None, max_points: None, mode, basis: basis.into() }
    }

    fn family(mut self, f: Family) -> Self {
        self.family = Some(f);
        self
    }

    fn ambient(mut self, n: usize) -> Self {
        self.ambient = Some(n);
        self
    }

    fn points(mut self, lo: usize, hi: usize) -> Self {
        self.min_points = Some(lo);
        self.max_points = Some(hi);
        self
    }

    pub fn matches(&self, relation: Relation, families: &[Family], ambient: usize, points: usize) -> bool {
        self.relation == relation
            && self.family.is_none_or(|f| families.contains(&f))
            && self.ambient.is_none_or(|n| n == ambient)
            && self.min_points.is_none_or(|lo| points >= lo)
            && self.max_points.is_none_or(|hi| points <= hi)
    }
}

/// First matching rule, or an unconditional probe when none matches.
pub fn classify<'a>(rules: &'a [Rule], relation: Relation, families: &[Family], ambient: usize, points: usize) -> (Mode, &'a str) {
    rules
        .iter()
        .find(|r| r.matches(relation, families, ambient, points))
        .map_or((Mode::Probe, "open"), |r| (r.mode, r.basis.as_str()))
}

pub fn default_rules() -> Vec<Rule> {
    use Family::*;
    use Mode::*;
    use Relation::*;
    vec![
        Rule::new(ConjMain, Probe, "inflated shift on M fails in general").family(Maximal),
        Rule::new(ConjMain, Regression, "proven for star configurations").family(Star),
        Rule::new(ConjMain, Regression, "proven for general points of the plane").family(General).ambient(2),
        Rule::new(ConjMain, Probe, "open"),
        Rule::new(NegativeControl, Regression, "M^(rN) is not in M^(r(N-1)+1) M^r for degree reasons"),
        Rule::new(Chudnovsky, Regression, "proven in the plane").ambient(2),
        Rule::new(Chudnovsky, Regression, "proven for star configurations").family(Star),
        Rule::new(Chudnovsky, Probe, "open for N >= 3"),
        Rule::new(WaldschmidtSkoda, Regression, "follows from I^(Nr) ⊆ I^r"),
        Rule::new(ProductBound, Regression, "proven for points of the plane").ambient(2),
        Rule::new(BracketConsistency, Regression, "alpha_m/(m+N-1) <= gamma <= alpha_k/k"),
        Rule::new(Els, Regression, "proven for ideals of points in every characteristic"),
        Rule::new(AlphaRegContainment, Regression, "instance of I^(Nr) ⊆ I^r in the plane").ambient(2),
        Rule::new(EvoContainment, Regression, "proven for star configurations").family(Star),
        Rule::new(EvoContainment, Regression, "symbolic and ordinary powers agree").family(CompleteIntersection),
        Rule::new(EvoContainment, Regression, "proven for general points of the plane").family(General).ambient(2),
        Rule::new(EvoShift, Regression, "proven for star configurations").family(Star),
        Rule::new(EvoShift, Regression, "symbolic and ordinary powers agree").family(CompleteIntersection),
        Rule::new(EvoAlpha, Regression, "alpha of star symbolic powers is known exactly").family(Star),
        Rule::new(EvoAlpha, Regression, "symbolic and ordinary powers agree").family(CompleteIntersection),
        Rule::new(EvoVariant, Regression, "characteristic-free argument for at most five general points")
            .family(General)
            .ambient(2)
            .points(1, 5),
        Rule::new(P2, Regression, "proven for star configurations").family(Star),
        Rule::new(P2, Regression, "symbolic and ordinary powers agree").family(CompleteIntersection),
        Rule::new(P2, Regression, "proven for general points of the plane").family(General).ambient(2),
        Rule::new(ProductsEquality, Regression, "alpha beta = m^2 n forces equality"),
        Rule::new(OddFactorization, Regression, "proven for five general points"),
        Rule::new(StarAlpha, Regression, "closed formula for star configurations"),
        Rule::new(RefinedGamma, Probe, "proven only in characteristic zero"),
        Rule::new(GammaQuestion, Regression, "answered affirmatively for star configurations").family(Star),
        Rule::new(EulerFact, Regression, "Euler identity in characteristic zero"),
        Rule::new(TableAlpha, Regression, "known values for general points"),
        Rule::new(TableBeta, Regression, "known values for general points").points(1, 5),
        Rule::new(TableBeta, Regression, "known values for general points").points(9, 9),
        Rule::new(TableBeta, Probe, "values cited from outside sources"),
    ]
}
