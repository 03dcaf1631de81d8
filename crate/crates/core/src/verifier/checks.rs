//! Evaluation of a single relation on a single corpus entry.
//!
//! Checks are plain data so that a failing probe can be replayed over a
//! fresh lab or a different field.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::{ContainmentReport, IdealHandle, Lab};
use crate::invariants::{self, Exact, GammaBracket};
use crate::scalar::Field;
use crate::schemes::FatPointScheme;
use crate::verifier::corpus::{CorpusEntry, Subject};
use crate::verifier::rules::Relation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub relation: Relation,
    pub params: BTreeMap<String, usize>,
}

impl Check {
    pub fn new(relation: Relation, params: &[(&str, usize)]) -> Self {
        Check { relation, params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect() }
    }

    fn p(&self, name: &str) -> Result<usize> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("{} needs parameter {name}", self.relation.name())))
    }

    /// `relation[k=v,...]` with parameters in key order.
    pub fn label(&self) -> String {
        let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}[{}]", self.relation.name(), ps.join(","))
    }
}

/// A reported value: an integer, an exact rational or a flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(usize),
    Ratio(Exact),
    Flag(bool),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentRecord {
    #[serde(flatten)]
    pub report: ContainmentReport,
    /// Present when the containment failed: whether the witness was checked
    /// to lie in the contained ideal and outside the container.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_verified: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub containments: Vec<ContainmentRecord>,
}

impl Evidence {
    fn int(&mut self, k: &str, v: usize) {
        self.values.insert(k.into(), Value::Int(v));
    }

    fn ratio(&mut self, k: &str, v: Exact) {
        self.values.insert(k.into(), Value::Ratio(v));
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// False when the hypothesis of the relation is not met.
    pub applicable: bool,
    pub holds: bool,
    pub evidence: Evidence,
}

type Ideal<F> = Arc<IdealHandle<F>>;

/// One corpus entry realized over one lab's field.
pub struct Subjected<'a, F: Field> {
    lab: &'a Lab<F>,
    scheme: Option<FatPointScheme<F::Elem>>,
}

impl<'a, F: Field> Subjected<'a, F> {
    pub fn realize(lab: &'a Lab<F>, entry: &CorpusEntry) -> Result<Self> {
        let scheme = match &entry.subject {
            Subject::Scheme { recipe } => Some(recipe.realize(lab.field())?),
            Subject::Maximal { .. } => None,
        };
        Ok(Subjected { lab, scheme })
    }

    fn base(&self) -> Result<Ideal<F>> {
        match &self.scheme {
            Some(z) => self.lab.scheme(z),
            None => Ok(self.lab.maximal()),
        }
    }

    /// `I^(k)`; for `M` this is `M^k`.
    fn symbolic(&self, k: usize) -> Result<Ideal<F>> {
        match &self.scheme {
            Some(z) => self.lab.scheme(&z.scale(k as u32)?),
            None => self.lab.power(&self.lab.maximal(), k),
        }
    }

    fn ordinary(&self, r: usize) -> Result<Ideal<F>> {
        self.lab.power(&self.base()?, r)
    }

    fn alpha_sym(&self, k: usize) -> Result<usize> {
        self.symbolic(k)?.alpha()
    }

    fn ambient(&self) -> usize {
        self.lab.ambient()
    }

    /// `sum m_i^2`, the self-intersection count in Bezout's bound.
    fn squared_multiplicities(&self) -> usize {
        self.scheme.as_ref().map_or(0, |z| z.entries().iter().map(|(_, m)| (*m as usize).pow(2)).sum())
    }

    /// Decides `contained ⊆ container`, recording the report and checking
    /// any witness.
    fn contain(&self, container: &Ideal<F>, contained: &Ideal<F>, ev: &mut Evidence) -> Result<bool> {
        let c = self.lab.contains(container, contained)?;
        let mut witness_verified = None;
        if !c.report.holds {
            // A cached negative verdict is recomputed, so the witness exists.
            let (degree, form) = c.witness.as_ref().ok_or(Error::Irreproducible)?;
            let ok = self.lab.verify_witness(container, contained, *degree, form)?;
            if !ok {
                return Err(Error::WitnessRejected { degree: *degree, form: form.render(self.lab.field()) });
            }
            witness_verified = Some(true);
        }
        let holds = c.report.holds;
        ev.containments.push(ContainmentRecord { report: c.report, witness_verified });
        Ok(holds)
    }

    fn equal(&self, a: &Ideal<F>, b: &Ideal<F>, ev: &mut Evidence) -> Result<bool> {
        let ab = self.contain(a, b, ev)?;
        let ba = self.contain(b, a, ev)?;
        Ok(ab && ba)
    }

    fn bracket(&self, m_max: usize, ev: &mut Evidence) -> Result<GammaBracket> {
        let z = self.scheme.as_ref().ok_or_else(|| Error::InvalidParameter("gamma needs a scheme".into()))?;
        let b = invariants::gamma_bracket(self.lab, z, m_max)?;
        ev.ratio("gamma_lower", b.lower);
        ev.ratio("gamma_upper", b.upper);
        Ok(b)
    }

    pub fn evaluate(&self, check: &Check) -> Result<Outcome> {
        let n = self.ambient();
        let mut ev = Evidence::default();
        let mut applicable = true;
        let holds = match check.relation {
            Relation::ConjMain => {
                let r = check.p("r")?;
                let j = check.p("j")?;
                let container = self.lab.shift_by_m(&self.ordinary(r)?, j)?;
                self.contain(&container, &self.symbolic(r * n)?, &mut ev)?
            }
            Relation::NegativeControl => {
                let r = check.p("r")?;
                let container = self.lab.shift_by_m(&self.ordinary(r)?, r * (n - 1) + 1)?;
                !self.contain(&container, &self.symbolic(r * n)?, &mut ev)?
            }
            Relation::Chudnovsky | Relation::WaldschmidtSkoda => {
                let m = check.p("m")?;
                let (a, am) = (self.alpha_sym(1)?, self.alpha_sym(m)?);
                ev.int("alpha", a);
                ev.int("alpha_m", am);
                let lhs = Exact::new(am as i64, m as i64);
                let rhs = if check.relation == Relation::Chudnovsky {
                    Exact::new((a + n - 1) as i64, n as i64)
                } else {
                    Exact::new(a as i64, n as i64)
                };
                ev.ratio("ratio", lhs);
                ev.ratio("bound", rhs);
                lhs >= rhs
            }
            Relation::ProductBound => {
                let m = check.p("m")?;
                let sym = self.symbolic(m)?;
                let (am, bm) = (sym.alpha()?, invariants::beta(&sym)?);
                let bound = m * m * self.squared_multiplicities();
                ev.int("alpha_m", am);
                ev.int("beta_m", bm);
                ev.int("bound", bound);
                am * bm >= bound
            }
            Relation::BracketConsistency => self.bracket(check.p("m_max")?, &mut ev)?.is_consistent(),
            Relation::Els => {
                let r = check.p("r")?;
                self.contain(&self.ordinary(r)?, &self.symbolic(n * r)?, &mut ev)?
            }
            Relation::AlphaRegContainment => {
                let m = check.p("m")?;
                let base = self.base()?;
                let (a, reg) = (base.alpha()?, base.regularity()?);
                ev.int("alpha", a);
                ev.int("reg", reg);
                if a == reg && a <= 3 {
                    self.contain(&self.ordinary(m)?, &self.symbolic(2 * m)?, &mut ev)?
                } else {
                    applicable = false;
                    true
                }
            }
            Relation::EvoContainment => {
                let r = check.p("r")?;
                self.contain(&self.ordinary(r)?, &self.symbolic(r * n - n + 1)?, &mut ev)?
            }
            Relation::EvoShift => {
                let r = check.p("r")?;
                let container = self.lab.shift_by_m(&self.ordinary(r)?, (r - 1) * (n - 1))?;
                self.contain(&container, &self.symbolic(r * n - n + 1)?, &mut ev)?
            }
            Relation::EvoAlpha => {
                let r = check.p("r")?;
                let (a, am) = (self.alpha_sym(1)?, self.alpha_sym(r * n - n + 1)?);
                let bound = r * a + (r - 1) * (n - 1);
                ev.int("alpha", a);
                ev.int("alpha_m", am);
                ev.int("bound", bound);
                am >= bound
            }
            Relation::EvoVariant => {
                let r = check.p("r")?;
                let contained = self.lab.product(&self.symbolic(2 * r - 1)?, &self.base()?)?;
                let container = self.lab.shift_by_m(&self.ordinary(r)?, r - 1)?;
                self.contain(&container, &contained, &mut ev)?
            }
            Relation::P2 => {
                let (m, r) = (check.p("m")?, check.p("r")?);
                let a = self.alpha_sym(1)?;
                ev.int("alpha", a);
                // m / r >= 2a / (a + 1)
                if m * (a + 1) >= 2 * a * r {
                    self.contain(&self.ordinary(r)?, &self.symbolic(m)?, &mut ev)?
                } else {
                    applicable = false;
                    true
                }
            }
            Relation::ProductsEquality => {
                let (m, k) = (check.p("m")?, check.p("k")?);
                let sym = self.symbolic(m)?;
                let (am, bm) = (sym.alpha()?, invariants::beta(&sym)?);
                let bound = m * m * self.squared_multiplicities();
                ev.int("alpha_m", am);
                ev.int("beta_m", bm);
                ev.int("m2n", bound);
                if am * bm == bound {
                    let power = self.lab.power(&sym, k)?;
                    self.equal(&power, &self.symbolic(m * k)?, &mut ev)?
                } else {
                    applicable = false;
                    true
                }
            }
            Relation::OddFactorization => {
                let r = check.p("r")?;
                let even = self.symbolic(2 * r)?;
                let squares = self.lab.power(&self.symbolic(2)?, r)?;
                let odd = self.lab.product(&even, &self.base()?)?;
                self.equal(&even, &squares, &mut ev)? && self.equal(&self.symbolic(2 * r + 1)?, &odd, &mut ev)?
            }
            Relation::StarAlpha => {
                let (m, s) = (check.p("m")?, check.p("s")?);
                let (got, want) = (self.alpha_sym(m)?, invariants::star_alpha(s, n, m));
                ev.int("alpha_m", got);
                ev.int("expected", want);
                got == want
            }
            Relation::RefinedGamma | Relation::GammaQuestion => {
                let m = check.p("m")?;
                let b = self.bracket(check.p("m_max")?, &mut ev)?;
                let am = self.alpha_sym(m)?;
                let shift = if check.relation == Relation::RefinedGamma { 1 } else { n - 1 };
                let lhs = Exact::new((am + shift) as i64, (m + n - 1) as i64);
                ev.int("alpha_m", am);
                ev.ratio("value", lhs);
                lhs <= b.upper
            }
            Relation::ShiftQuestion | Relation::ShiftQuestionFull => {
                let (m, t) = (check.p("m")?, check.p("t")?);
                let j = if check.relation == Relation::ShiftQuestion { t } else { t * (n - 1) };
                let container = self.lab.shift_by_m(&self.lab.power(&self.symbolic(m)?, t)?, j)?;
                self.contain(&container, &self.symbolic(t * (m + n - 1))?, &mut ev)?
            }
            Relation::EulerFact => {
                let container = self.lab.shift_by_m(&self.base()?, 1)?;
                self.contain(&container, &self.symbolic(2)?, &mut ev)?
            }
            Relation::TableAlpha => {
                let (m, want) = (check.p("m")?, check.p("expected")?);
                let got = self.alpha_sym(m)?;
                ev.int("alpha_m", got);
                got == want
            }
            Relation::TableBeta => {
                let (m, want) = (check.p("m")?, check.p("expected")?);
                let got = invariants::beta(&*self.symbolic(m)?)?;
                ev.int("beta_m", got);
                got == want
            }
        };
        Ok(Outcome { applicable, holds, evidence: ev })
    }
}
