//! Fat-point schemes `Z = m1 p1 + ... + mn pn` and their constructors.
//!
//! A [`SchemeRecipe`] describes a scheme independently of the ground field;
//! [`SchemeRecipe::realize`] produces a validated [`FatPointScheme`] over a
//! concrete field. Explicit points and star configurations realize to the
//! same integer configuration over every field; general points are sampled
//! afresh from the seed in each field.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::binomial;
use crate::linalg;
use crate::scalar::{Field, SeedStream};

const STAR_RESAMPLES: usize = 32;
const GENERAL_RESAMPLES: usize = 32;
/// Seeded star hyperplanes have integer coefficients in `[-B, B]`.
const STAR_COEFF_BOUND: u64 = 1 << 20;

/// A point of `P^N` scaled so its first nonzero coordinate is one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectivePoint<E> {
    coords: Vec<E>,
}

impl<E: Clone + PartialEq + fmt::Debug> ProjectivePoint<E> {
    pub fn new<F: Field<Elem = E>>(field: &F, coords: Vec<E>) -> Result<Self> {
        let lead = coords.iter().find(|c| !field.is_zero(c)).ok_or(Error::ZeroPoint)?;
        let inv = field.inv(lead).expect("nonzero");
        Ok(ProjectivePoint { coords: coords.iter().map(|c| field.mul(c, &inv)).collect() })
    }

    pub fn coords(&self) -> &[E] {
        &self.coords
    }

    /// Index of the first nonzero coordinate (which is one).
    pub fn chart<F: Field<Elem = E>>(&self, field: &F) -> usize {
        self.coords.iter().position(|c| !field.is_zero(c)).expect("normalized point is nonzero")
    }

    pub fn render<F: Field<Elem = E>>(&self, field: &F) -> String {
        let parts: Vec<String> = self.coords.iter().map(|c| field.fmt_elem(c)).collect();
        format!("[{}]", parts.join(":"))
    }
}

/// How a scheme was constructed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Explicit { name: String },
    Star { s: usize, seed: Option<u64>, hyperplanes: Vec<Vec<i64>> },
    General { n: usize, seed: u64 },
}

/// A validated fat-point scheme over a concrete field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FatPointScheme<E> {
    ambient: usize,
    entries: Vec<(ProjectivePoint<E>, u32)>,
    provenance: Provenance,
}

impl<E: Clone + PartialEq + fmt::Debug> FatPointScheme<E> {
    pub fn new<F: Field<Elem = E>>(
        field: &F,
        ambient: usize,
        entries: Vec<(ProjectivePoint<E>, u32)>,
        provenance: Provenance,
    ) -> Result<Self> {
        if ambient == 0 {
            return Err(Error::InvalidParameter("ambient dimension N must be at least 1".into()));
        }
        if entries.is_empty() {
            return Err(Error::InvalidParameter("a scheme needs at least one point".into()));
        }
        for (i, (p, m)) in entries.iter().enumerate() {
            if p.coords.len() != ambient + 1 {
                return Err(Error::CoordinateCount { expected: ambient + 1, found: p.coords.len() });
            }
            if *m == 0 {
                return Err(Error::ZeroMultiplicity { point: p.render(field) });
            }
            if entries[..i].iter().any(|(q, _)| q == p) {
                return Err(Error::DuplicatePoint { point: p.render(field) });
            }
        }
        Ok(FatPointScheme { ambient, entries, provenance })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn entries(&self) -> &[(ProjectivePoint<E>, u32)] {
        &self.entries
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.entries.iter().map(|(_, m)| *m).max().unwrap_or(0)
    }

    pub fn is_radical(&self) -> bool {
        self.entries.iter().all(|(_, m)| *m == 1)
    }

    /// `deg Z = sum C(m_i + N - 1, N)`.
    pub fn degree(&self) -> usize {
        self.entries.iter().map(|(_, m)| binomial(*m as usize + self.ambient - 1, self.ambient)).sum()
    }

    /// Multiplicities multiplied by `m`; the ideal of the result is the
    /// `m`-th symbolic power.
    pub fn scale(&self, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("scale factor must be positive".into()));
        }
        Ok(FatPointScheme {
            ambient: self.ambient,
            entries: self.entries.iter().map(|(p, k)| (p.clone(), k * m)).collect(),
            provenance: self.provenance.clone(),
        })
    }

    /// Canonical text naming every point and multiplicity; equal schemes
    /// have equal fingerprints.
    pub fn fingerprint<F: Field<Elem = E>>(&self, field: &F) -> String {
        let body: Vec<String> = self.entries.iter().map(|(p, m)| format!("{}x{}", p.render(field), m)).collect();
        format!("{}|N={}|{}", field.config().describe(), self.ambient, body.join(","))
    }
}

/// Rational coordinate `num/den` of an explicit point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coord {
    pub num: i64,
    pub den: i64,
}

impl Coord {
    pub fn int(v: i64) -> Self {
        Coord { num: v, den: 1 }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StarSource {
    Seed { seed: u64 },
    Hyperplanes { hyperplanes: Vec<Vec<i64>> },
}

/// Field-independent description of a scheme.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemeRecipe {
    Explicit { name: String, ambient: usize, points: Vec<(Vec<Coord>, u32)> },
    Star { ambient: usize, s: usize, source: StarSource },
    General { ambient: usize, n: usize, seed: u64 },
}

impl SchemeRecipe {
    pub fn explicit_integral(name: &str, ambient: usize, points: &[(&[i64], u32)]) -> Self {
        SchemeRecipe::Explicit {
            name: name.to_string(),
            ambient,
            points: points.iter().map(|(c, m)| (c.iter().map(|&v| Coord::int(v)).collect(), *m)).collect(),
        }
    }

    pub fn star(ambient: usize, s: usize, seed: u64) -> Self {
        SchemeRecipe::Star { ambient, s, source: StarSource::Seed { seed } }
    }

    pub fn general(ambient: usize, n: usize, seed: u64) -> Self {
        SchemeRecipe::General { ambient, n, seed }
    }

    pub fn ambient(&self) -> usize {
        match self {
            SchemeRecipe::Explicit { ambient, .. }
            | SchemeRecipe::Star { ambient, .. }
            | SchemeRecipe::General { ambient, .. } => *ambient,
        }
    }

    /// Number of points the recipe produces.
    pub fn point_count(&self) -> usize {
        match self {
            SchemeRecipe::Explicit { points, .. } => points.len(),
            SchemeRecipe::Star { ambient, s, .. } => binomial(*s, *ambient),
            SchemeRecipe::General { n, .. } => *n,
        }
    }

    /// Short stable identifier used as a case key in reports.
    pub fn id(&self) -> String {
        match self {
            SchemeRecipe::Explicit { name, .. } => name.clone(),
            SchemeRecipe::Star { ambient, s, source: StarSource::Seed { seed } } => {
                format!("star-N{ambient}-s{s}-seed{seed}")
            }
            SchemeRecipe::Star { ambient, s, source: StarSource::Hyperplanes { hyperplanes } } => {
                let h: Vec<String> = hyperplanes
                    .iter()
                    .map(|v| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
                    .collect();
                format!("star-N{ambient}-s{s}-[{}]", h.join(";"))
            }
            SchemeRecipe::General { ambient, n, seed } => format!("general-N{ambient}-n{n}-seed{seed}"),
        }
    }

    pub fn realize<F: Field>(&self, field: &F) -> Result<FatPointScheme<F::Elem>> {
        match self {
            SchemeRecipe::Explicit { name, ambient, points } => {
                let mut entries = Vec::with_capacity(points.len());
                for (coords, m) in points {
                    if coords.len() != ambient + 1 {
                        return Err(Error::CoordinateCount { expected: ambient + 1, found: coords.len() });
                    }
                    let elems = coords
                        .iter()
                        .map(|c| field.from_ratio(&BigInt::from(c.num), &BigInt::from(c.den)))
                        .collect::<Result<Vec<_>>>()?;
                    entries.push((ProjectivePoint::new(field, elems)?, *m));
                }
                FatPointScheme::new(field, *ambient, entries, Provenance::Explicit { name: name.clone() })
            }
            SchemeRecipe::Star { ambient, s, source } => star_configuration(field, *ambient, *s, source),
            SchemeRecipe::General { ambient, n, seed } => general_points(field, *n, *ambient, *seed),
        }
    }
}

impl fmt::Display for SchemeRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// `n` distinct points with uniformly random normalized coordinates.
pub fn general_points<F: Field>(field: &F, n: usize, ambient: usize, seed: u64) -> Result<FatPointScheme<F::Elem>> {
    if n == 0 {
        return Err(Error::InvalidParameter("general_points needs n >= 1".into()));
    }
    let mut stream = SeedStream::derived(seed, &format!("general-N{ambient}"));
    let mut entries: Vec<(ProjectivePoint<F::Elem>, u32)> = Vec::with_capacity(n);
    let mut rejected = 0;
    while entries.len() < n {
        let coords = (0..=ambient).map(|_| field.random(&mut stream)).collect::<Result<Vec<_>>>()?;
        match ProjectivePoint::new(field, coords) {
            Ok(p) if !entries.iter().any(|(q, _)| q == &p) => entries.push((p, 1)),
            _ => {
                rejected += 1;
                if rejected > GENERAL_RESAMPLES {
                    return Err(Error::ResamplingExhausted { what: "general points".into(), attempts: rejected });
                }
            }
        }
    }
    FatPointScheme::new(field, ambient, entries, Provenance::General { n, seed })
}

/// Every `k`-subset of `0..s` in lexicographic order.
pub fn subsets(s: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, s: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..s {
            if s - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, s, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, s, k, &mut Vec::new(), &mut out);
    out
}

fn star_points<F: Field>(
    field: &F,
    ambient: usize,
    hyperplanes: &[Vec<i64>],
) -> std::result::Result<Vec<ProjectivePoint<F::Elem>>, Error> {
    let s = hyperplanes.len();
    let rows: Vec<Vec<F::Elem>> =
        hyperplanes.iter().map(|h| h.iter().map(|&c| field.from_i64(c)).collect()).collect();
    let mut points = Vec::new();
    for subset in subsets(s, ambient) {
        let sub: Vec<Vec<F::Elem>> = subset.iter().map(|&i| rows[i].clone()).collect();
        let ker = linalg::kernel(field, sub, ambient + 1)?;
        if ker.rank() != 1 {
            return Err(Error::DegenerateStar { subset, reason: "do not meet in a single point".into() });
        }
        let p = ProjectivePoint::new(field, ker.rows[0].clone())?;
        let on: Vec<usize> = (0..s)
            .filter(|&i| {
                let v = rows[i].iter().zip(p.coords()).fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)));
                field.is_zero(&v)
            })
            .collect();
        if on != subset {
            return Err(Error::DegenerateStar { subset: on, reason: "are concurrent".into() });
        }
        points.push(p);
    }
    Ok(points)
}

/// The `C(s, N)` points where exactly `N` of `s` hyperplanes meet.
pub fn star_configuration<F: Field>(
    field: &F,
    ambient: usize,
    s: usize,
    source: &StarSource,
) -> Result<FatPointScheme<F::Elem>> {
    if ambient == 0 || s < ambient {
        return Err(Error::InvalidParameter(format!("star configuration needs s >= N >= 1 (s = {s}, N = {ambient})")));
    }
    let (hyperplanes, seed) = match source {
        StarSource::Hyperplanes { hyperplanes } => {
            if hyperplanes.len() != s {
                return Err(Error::InvalidParameter(format!("expected {s} hyperplanes, got {}", hyperplanes.len())));
            }
            for h in hyperplanes {
                if h.len() != ambient + 1 {
                    return Err(Error::CoordinateCount { expected: ambient + 1, found: h.len() });
                }
            }
            (hyperplanes.clone(), None)
        }
        StarSource::Seed { seed } => {
            let mut stream = SeedStream::derived(*seed, &format!("star-N{ambient}-s{s}"));
            let mut found = None;
            for _ in 0..STAR_RESAMPLES {
                let hs: Vec<Vec<i64>> = (0..s)
                    .map(|_| {
                        (0..=ambient)
                            .map(|_| stream.below(2 * STAR_COEFF_BOUND + 1) as i64 - STAR_COEFF_BOUND as i64)
                            .collect()
                    })
                    .collect();
                if star_points(field, ambient, &hs).is_ok() {
                    found = Some(hs);
                    break;
                }
            }
            let hs = found.ok_or(Error::ResamplingExhausted {
                what: "star hyperplanes".into(),
                attempts: STAR_RESAMPLES,
            })?;
            (hs, Some(*seed))
        }
    };
    let points = star_points(field, ambient, &hyperplanes)?;
    let entries = points.into_iter().map(|p| (p, 1)).collect();
    FatPointScheme::new(field, ambient, entries, Provenance::Star { s, seed, hyperplanes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{PrimeField, Rationals};

    #[test]
    fn normalization_is_canonical() {
        let f = Rationals;
        let q = |n: i64| f.from_i64(n);
        let a = ProjectivePoint::new(&f, vec![q(0), q(2), q(4)]).unwrap();
        let b = ProjectivePoint::new(&f, vec![q(0), q(-1), q(-2)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.render(&f), "[0:1:2]");
        assert!(matches!(ProjectivePoint::new(&f, vec![q(0), q(0)]), Err(Error::ZeroPoint)));
    }

    #[test]
    fn coordinate_star() {
        let f = PrimeField::default();
        let hs = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let z = star_configuration(&f, 2, 3, &StarSource::Hyperplanes { hyperplanes: hs }).unwrap();
        let pts: Vec<Vec<u64>> = z.entries().iter().map(|(p, _)| p.coords().to_vec()).collect();
        assert_eq!(pts, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn star_counts() {
        let f = PrimeField::default();
        for (n, s, count) in [(2, 5, 10), (3, 4, 4), (2, 4, 6), (3, 5, 10)] {
            let z = SchemeRecipe::star(n, s, 7).realize(&f).unwrap();
            assert_eq!(z.len(), count);
            let Provenance::Star { hyperplanes, .. } = z.provenance() else { panic!() };
            for (p, _) in z.entries() {
                let on = hyperplanes
                    .iter()
                    .filter(|h| {
                        let v = h.iter().zip(p.coords()).fold(0, |acc, (a, b)| f.add(&acc, &f.mul(&f.from_i64(*a), b)));
                        v == 0
                    })
                    .count();
                assert_eq!(on, n);
            }
        }
    }

    #[test]
    fn concurrent_lines_are_rejected() {
        let f = Rationals;
        // x0, x1 and x0 + x1 all pass through [0:0:1].
        let hs = vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]];
        let err = star_configuration(&f, 2, 3, &StarSource::Hyperplanes { hyperplanes: hs }).unwrap_err();
        assert!(matches!(err, Error::DegenerateStar { .. }));
        let hs = vec![vec![1, 0, 0], vec![2, 0, 0], vec![0, 0, 1]];
        let err = star_configuration(&f, 2, 3, &StarSource::Hyperplanes { hyperplanes: hs }).unwrap_err();
        assert!(matches!(err, Error::DegenerateStar { subset, .. } if subset == vec![0, 1]));
    }

    #[test]
    fn general_points_are_deterministic_and_generic() {
        let f = PrimeField::default();
        let a = general_points(&f, 5, 2, 11).unwrap();
        assert_eq!(a, general_points(&f, 5, 2, 11).unwrap());
        assert_ne!(a, general_points(&f, 5, 2, 12).unwrap());
        for triple in subsets(5, 3) {
            let rows = triple.iter().map(|&i| a.entries()[i].0.coords().to_vec()).collect();
            assert_eq!(linalg::rank(&f, rows, 3).unwrap(), 3);
        }
        assert_eq!(general_points(&f, 9, 2, 1).unwrap().degree(), 9);
        assert_eq!(general_points(&f, 1, 3, 1).unwrap().degree(), 1);
        assert!(matches!(general_points(&Rationals, 3, 2, 1), Err(Error::SamplingUnsupported)));
    }

    #[test]
    fn scaling_and_degree() {
        let f = Rationals;
        let z = SchemeRecipe::explicit_integral("2p+q", 2, &[(&[1, 0, 0], 2), (&[0, 1, 0], 1)]).realize(&f).unwrap();
        assert_eq!(z.degree(), 4);
        let z2 = z.scale(2).unwrap();
        assert_eq!(z2.degree(), 13);
        assert_eq!(z.scale(1).unwrap(), z);
        assert_eq!(z.scale(2).unwrap().scale(3).unwrap(), z.scale(6).unwrap());
        let p = SchemeRecipe::explicit_integral("p", 2, &[(&[1, 1, 1], 1)]).realize(&f).unwrap();
        assert_eq!(p.scale(3).unwrap().degree(), 6);
    }

    #[test]
    fn duplicates_are_named() {
        let f = Rationals;
        let r = SchemeRecipe::explicit_integral("dup", 2, &[(&[1, 2, 3], 1), (&[2, 4, 6], 1)]);
        match r.realize(&f) {
            Err(Error::DuplicatePoint { point }) => assert_eq!(point, "[1:2:3]"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
