//! Numerical invariants: alpha, beta, Hilbert function, regularity and
//! Waldschmidt brackets.

use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::forms::Form;
use crate::gcd;
use crate::ideal::{counting_bound, IdealHandle, Lab, Presentation};
use crate::par;
use crate::scalar::{Field, SeedStream};
use crate::schemes::FatPointScheme;

/// Random pairs tried per degree before beta certification gives up.
pub const BETA_ATTEMPTS: usize = 64;

/// An exact rational that serializes as `{"num": .., "den": ..}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Rational64);

impl Exact {
    pub fn new(num: i64, den: i64) -> Self {
        Exact(Rational64::new(num, den))
    }

    pub fn num(&self) -> i64 {
        *self.0.numer()
    }

    pub fn den(&self) -> i64 {
        *self.0.denom()
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

#[derive(Serialize, Deserialize)]
struct NumDen {
    num: i64,
    den: i64,
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NumDen { num: self.num(), den: self.den() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let nd = NumDen::deserialize(d)?;
        if nd.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Exact::new(nd.num, nd.den))
    }
}

/// Least degree of a nonzero element.
pub fn alpha<F: Field>(ideal: &IdealHandle<F>) -> Result<usize> {
    ideal.alpha()
}

/// Ascending scan for alpha, stopping at the counting bound for schemes.
/// Slower than [`alpha`]; kept as an independent check.
pub fn alpha_by_scan<F: Field>(ideal: &IdealHandle<F>) -> Result<usize> {
    let ceiling = match ideal.presentation() {
        Presentation::Scheme(z) => counting_bound(ideal.ambient(), z.degree()),
        Presentation::Span(g) => *g.keys().next().ok_or(Error::ZeroIdeal)?,
        Presentation::Maximal => 1,
    };
    for t in 0..=ceiling {
        if ideal.dim(t)? > 0 {
            return Ok(t);
        }
    }
    Err(Error::ZeroIdeal)
}

/// A certified value of beta: two coprime forms of the ideal in that degree.
#[derive(Clone, Debug)]
pub struct BetaCertificate<E> {
    pub degree: usize,
    pub pair: (Form<E>, Form<E>),
}

/// Least `t` such that `I_t` holds two forms without a common factor
/// (plane ideals only).
pub fn beta<F: Field>(ideal: &IdealHandle<F>) -> Result<usize> {
    Ok(beta_certified(ideal)?.degree)
}

pub fn beta_certified<F: Field>(ideal: &IdealHandle<F>) -> Result<BetaCertificate<F::Elem>> {
    if ideal.ambient() != 2 {
        return Err(Error::UnsupportedDimension { op: "beta", n: ideal.ambient() });
    }
    let ceiling = match ideal.presentation() {
        Presentation::Scheme(_) => ideal.regularity()?,
        Presentation::Span(g) => *g.keys().next_back().ok_or(Error::ZeroIdeal)?,
        Presentation::Maximal => 1,
    };
    let mut stream = SeedStream::derived(0, &format!("beta|{}", ideal.key()));
    for t in ideal.alpha()?..=ceiling {
        if ideal.dim(t)? < 2 {
            continue;
        }
        let slice = ideal.slice(t)?;
        if let Some(pair) = gcd::coprime_pair(ideal.ring(), &slice, &mut stream, BETA_ATTEMPTS)? {
            return Ok(BetaCertificate { degree: t, pair });
        }
    }
    Err(Error::BetaCeilingReached { ceiling })
}

/// `dim (R/I(Z))_t`.
pub fn hilbert_function<F: Field>(lab: &Lab<F>, z: &FatPointScheme<F::Elem>, t: usize) -> Result<usize> {
    lab.scheme(z)?.hilbert_function(t)
}

/// Regularity of `I(Z)`: one more than the least `t` with `HF(t) = deg Z`.
pub fn regularity<F: Field>(lab: &Lab<F>, z: &FatPointScheme<F::Elem>) -> Result<usize> {
    lab.scheme(z)?.regularity()
}

/// Exact bracket `lower <= gamma(I) <= upper` from `alpha(I^(m))`,
/// `m = 1..=m_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaBracket {
    pub lower: Exact,
    pub upper: Exact,
    /// Indices `m` attaining the lower bound `alpha_m / (m + N - 1)`.
    pub lower_m: Vec<usize>,
    /// Indices `m` attaining the upper bound `alpha_m / m`.
    pub upper_m: Vec<usize>,
    /// `(m, alpha(I^(m)))` for every `m` used.
    pub alphas: Vec<(usize, usize)>,
}

impl GammaBracket {
    pub fn from_alphas(ambient: usize, alphas: Vec<(usize, usize)>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidParameter("gamma bracket needs m_max >= 1".into()));
        }
        let lows: Vec<Exact> = alphas.iter().map(|&(m, a)| Exact::new(a as i64, (m + ambient - 1) as i64)).collect();
        let ups: Vec<Exact> = alphas.iter().map(|&(m, a)| Exact::new(a as i64, m as i64)).collect();
        let lower = *lows.iter().max().unwrap();
        let upper = *ups.iter().min().unwrap();
        let pick = |vals: &[Exact], v: Exact| alphas.iter().zip(vals).filter(|(_, x)| **x == v).map(|(a, _)| a.0).collect();
        Ok(GammaBracket { lower, upper, lower_m: pick(&lows, lower), upper_m: pick(&ups, upper), alphas })
    }

    pub fn is_consistent(&self) -> bool {
        self.lower <= self.upper
    }
}

/// Alpha of every symbolic power `I^(m)`, `m = 1..=m_max`.
pub fn symbolic_alphas<F: Field>(lab: &Lab<F>, z: &FatPointScheme<F::Elem>, m_max: usize) -> Result<Vec<(usize, usize)>> {
    let ms: Vec<usize> = (1..=m_max).collect();
    par::map(&ms, |&m| {
        let ideal: Arc<IdealHandle<F>> = lab.scheme(&z.scale(m as u32)?)?;
        Ok((m, ideal.alpha()?))
    })
    .into_iter()
    .collect()
}

pub fn gamma_bracket<F: Field>(lab: &Lab<F>, z: &FatPointScheme<F::Elem>, m_max: usize) -> Result<GammaBracket> {
    GammaBracket::from_alphas(z.ambient(), symbolic_alphas(lab, z, m_max)?)
}

/// Alpha of the `m`-th symbolic power of a star configuration of `s`
/// hyperplanes in `P^N`: `(i + 1) s - N + j` with `m = N i + j`, `0 < j <= N`.
pub fn star_alpha(s: usize, ambient: usize, m: usize) -> usize {
    assert!(m >= 1 && ambient >= 1);
    let i = (m - 1) / ambient;
    let j = m - ambient * i;
    (i + 1) * s + j - ambient
}
