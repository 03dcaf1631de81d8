//! Graded ideals presented by fat-point schemes, by generators, or as the
//! irrelevant ideal `M`, with slice-by-slice containment decisions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::cache::DiskCache;
use crate::error::{Error, Result};
use crate::forms::{binomial, monomial_basis, Form, GradedRing, SliceBasis};
use crate::linalg::{self, Echelon};
use crate::par;
use crate::scalar::Field;
use crate::schemes::{FatPointScheme, Provenance};

/// Linear conditions on degree-`t` coefficient vectors for vanishing to
/// order `m_i` at each `p_i`, one row per local monomial of degree `< m_i`.
///
/// In the chart `x_k = 1` of a point with `p_k = 1`, `x^e` expands as
/// `prod_{i != k} (p_i + u_i)^{e_i}`; the coefficient of `u^a` is
/// `prod_{i != k} C(e_i, a_i) p_i^{e_i - a_i}`. These are Hasse derivatives,
/// valid in every characteristic.
pub fn conditions_matrix<F: Field>(
    ring: &GradedRing<F>,
    z: &FatPointScheme<F::Elem>,
    t: usize,
) -> Vec<Vec<F::Elem>> {
    let f = &ring.field;
    let n = ring.ambient;
    let basis = ring.basis(t);
    let max_m = z.max_multiplicity() as usize;
    // pascal[e][a] = C(e, a) in the field, e <= t, a < max_m.
    let mut pascal = vec![vec![f.zero(); max_m.max(1)]; t + 1];
    for e in 0..=t {
        for a in 0..max_m.max(1) {
            pascal[e][a] = if a == 0 {
                f.one()
            } else if e == 0 {
                f.zero()
            } else {
                f.add(&pascal[e - 1][a - 1], &pascal[e - 1][a])
            };
        }
    }
    let blocks = par::map(z.entries(), |(p, m)| {
        let k = p.chart(f);
        let others: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
        let powers: Vec<Vec<F::Elem>> = others
            .iter()
            .map(|&i| {
                let mut row = Vec::with_capacity(t + 1);
                let mut acc = f.one();
                for _ in 0..=t {
                    row.push(acc.clone());
                    acc = f.mul(&acc, &p.coords()[i]);
                }
                row
            })
            .collect();
        let mut rows = Vec::with_capacity(binomial(*m as usize + n - 1, n));
        for d in 0..*m as usize {
            for local in monomial_basis(n - 1, d) {
                let row: Vec<F::Elem> = basis
                    .monomials
                    .iter()
                    .map(|mono| {
                        let mut acc = f.one();
                        for (slot, &i) in others.iter().enumerate() {
                            let e = mono.0[i] as usize;
                            let a = local.0[slot] as usize;
                            if a > e {
                                return f.zero();
                            }
                            acc = f.mul(&acc, &f.mul(&pascal[e][a], &powers[slot][e - a]));
                            if f.is_zero(&acc) {
                                return acc;
                            }
                        }
                        acc
                    })
                    .collect();
                rows.push(row);
            }
        }
        rows
    });
    blocks.into_iter().flatten().collect()
}

/// How an ideal is given.
#[derive(Clone, Debug)]
pub enum Presentation<E> {
    /// The saturated ideal of a fat-point scheme.
    Scheme(FatPointScheme<E>),
    /// The ideal generated by the given degree-wise generator spaces.
    Span(BTreeMap<usize, Echelon<E>>),
    /// `M = (x0, ..., xN)`.
    Maximal,
}

/// A graded ideal with memoized slices.
///
/// Cached slices are canonical (reduced echelon form), so concurrent writers
/// racing on the same degree store identical values and the first one wins.
pub struct IdealHandle<F: Field> {
    ring: Arc<GradedRing<F>>,
    disk: Option<Arc<DiskCache>>,
    presentation: Presentation<F::Elem>,
    key: String,
    label: String,
    slices: RwLock<BTreeMap<usize, Arc<SliceBasis<F::Elem>>>>,
    dims: RwLock<BTreeMap<usize, usize>>,
    generators: OnceLock<Arc<BTreeMap<usize, Echelon<F::Elem>>>>,
    alpha: OnceLock<usize>,
    regularity: OnceLock<usize>,
}

impl<F: Field> fmt::Debug for IdealHandle<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdealHandle").field("label", &self.label).finish_non_exhaustive()
    }
}

fn provenance_label(p: &Provenance) -> String {
    match p {
        Provenance::Explicit { name } => name.clone(),
        Provenance::Star { s, seed: Some(seed), .. } => format!("star s={s} seed={seed}"),
        Provenance::Star { s, seed: None, .. } => format!("star s={s}"),
        Provenance::General { n, seed } => format!("general n={n} seed={seed}"),
    }
}

impl<F: Field> IdealHandle<F> {
    fn new(
        ring: Arc<GradedRing<F>>,
        disk: Option<Arc<DiskCache>>,
        presentation: Presentation<F::Elem>,
        key: String,
        label: String,
    ) -> Self {
        IdealHandle {
            ring,
            disk,
            presentation,
            key,
            label,
            slices: RwLock::default(),
            dims: RwLock::default(),
            generators: OnceLock::new(),
            alpha: OnceLock::new(),
            regularity: OnceLock::new(),
        }
    }

    pub fn ring(&self) -> &GradedRing<F> {
        &self.ring
    }

    pub fn field(&self) -> &F {
        &self.ring.field
    }

    pub fn ambient(&self) -> usize {
        self.ring.ambient
    }

    pub fn presentation(&self) -> &Presentation<F::Elem> {
        &self.presentation
    }

    /// Identity of the presentation; equal keys mean equal ideals.
    pub fn key(&self) -> &str {
        &self.key
    }

    /// Human-readable name used in reports.
    pub fn describe(&self) -> &str {
        &self.label
    }

    pub fn scheme(&self) -> Option<&FatPointScheme<F::Elem>> {
        match &self.presentation {
            Presentation::Scheme(z) => Some(z),
            _ => None,
        }
    }

    fn zero_slice(&self, t: usize) -> SliceBasis<F::Elem> {
        SliceBasis {
            ambient: self.ambient(),
            degree: t,
            echelon: Echelon { ncols: self.ring.dim(t), rows: Vec::new(), pivots: Vec::new() },
        }
    }

    fn full_slice(&self, t: usize) -> SliceBasis<F::Elem> {
        let f = self.field();
        let d = self.ring.dim(t);
        let rows = (0..d)
            .map(|i| {
                let mut r = vec![f.zero(); d];
                r[i] = f.one();
                r
            })
            .collect();
        SliceBasis { ambient: self.ambient(), degree: t, echelon: Echelon { ncols: d, rows, pivots: (0..d).collect() } }
    }

    fn store(&self, t: usize, s: SliceBasis<F::Elem>) -> Arc<SliceBasis<F::Elem>> {
        let mut w = self.slices.write().unwrap();
        w.entry(t).or_insert_with(|| Arc::new(s)).clone()
    }

    fn cached(&self, t: usize) -> Option<Arc<SliceBasis<F::Elem>>> {
        self.slices.read().unwrap().get(&t).cloned()
    }

    /// Reduced basis of the degree-`t` piece.
    pub fn slice(&self, t: usize) -> Result<Arc<SliceBasis<F::Elem>>> {
        if let Some(s) = self.cached(t) {
            return Ok(s);
        }
        let s = match &self.presentation {
            Presentation::Maximal if t == 0 => self.zero_slice(t),
            Presentation::Maximal => self.full_slice(t),
            Presentation::Scheme(z) if t < z.max_multiplicity() as usize => self.zero_slice(t),
            Presentation::Scheme(z) => {
                let rows = conditions_matrix(&self.ring, z, t);
                let echelon = linalg::kernel(self.field(), rows, self.ring.dim(t))?;
                SliceBasis { ambient: self.ambient(), degree: t, echelon }
            }
            Presentation::Span(gens) => return self.span_slice(gens, t),
        };
        Ok(self.store(t, s))
    }

    fn span_slice(&self, gens: &BTreeMap<usize, Echelon<F::Elem>>, t: usize) -> Result<Arc<SliceBasis<F::Elem>>> {
        let Some(&lo) = gens.keys().next() else { return Ok(self.store(t, self.zero_slice(t))) };
        if t < lo {
            return Ok(self.store(t, self.zero_slice(t)));
        }
        // Build upward from the highest cached degree at or above `lo`.
        let mut start = lo;
        let mut prev: Option<Arc<SliceBasis<F::Elem>>> = None;
        {
            let r = self.slices.read().unwrap();
            if let Some((&d, s)) = r.range(lo..t).next_back() {
                start = d + 1;
                prev = Some(s.clone());
            }
        }
        let f = self.field();
        for d in start..=t {
            if let Some(s) = self.cached(d) {
                prev = Some(s);
                continue;
            }
            let s = match &prev {
                Some(p) if p.is_full() => self.full_slice(d),
                _ => {
                    let mut rows: Vec<Vec<F::Elem>> = Vec::new();
                    if let Some(p) = &prev {
                        for v in &p.echelon.rows {
                            for i in 0..self.ring.nvars() {
                                rows.push(self.ring.times_var(v, d - 1, i));
                            }
                        }
                    }
                    if let Some(g) = gens.get(&d) {
                        rows.extend(g.rows.iter().cloned());
                    }
                    let echelon = linalg::rref(f, rows, self.ring.dim(d))?;
                    SliceBasis { ambient: self.ambient(), degree: d, echelon }
                }
            };
            prev = Some(self.store(d, s));
        }
        Ok(prev.expect("t >= lo"))
    }

    fn disk_key(&self, what: &str, t: usize) -> String {
        format!("{}|{}|{}|{}", self.field().config().describe(), self.key, what, t)
    }

    /// `dim I_t`, using rank alone where no basis is needed.
    pub fn dim(&self, t: usize) -> Result<usize> {
        if let Some(s) = self.cached(t) {
            return Ok(s.dim());
        }
        if let Some(&d) = self.dims.read().unwrap().get(&t) {
            return Ok(d);
        }
        let d = match &self.presentation {
            Presentation::Scheme(z) if t < z.max_multiplicity() as usize => 0,
            Presentation::Scheme(z) => {
                let material = self.disk_key("dim", t);
                match self.disk.as_ref().and_then(|c| c.get::<usize>(&material)) {
                    Some(d) => d,
                    None => {
                        let cols = self.ring.dim(t);
                        let rows = conditions_matrix(&self.ring, z, t);
                        let d = cols - linalg::rank(self.field(), rows, cols)?;
                        if let Some(c) = &self.disk {
                            c.put(&material, &d)?;
                        }
                        d
                    }
                }
            }
            _ => self.slice(t)?.dim(),
        };
        self.dims.write().unwrap().entry(t).or_insert(d);
        Ok(d)
    }

    /// Whether the degree-`t` coefficient vector `v` lies in `I_t`.
    pub fn contains_vec(&self, t: usize, v: &[F::Elem]) -> Result<bool> {
        let f = self.field();
        if v.len() != self.ring.dim(t) {
            return Err(Error::RaggedRows { row: 0, expected: self.ring.dim(t), found: v.len() });
        }
        if v.iter().all(|c| f.is_zero(c)) {
            return Ok(true);
        }
        match &self.presentation {
            Presentation::Maximal => Ok(t > 0),
            Presentation::Scheme(z) => {
                let cond = conditions_matrix(&self.ring, z, t);
                Ok(cond.iter().all(|row| f.is_zero(&dot(f, row, v))))
            }
            Presentation::Span(_) => Ok(self.slice(t)?.contains_vec(f, v)),
        }
    }

    /// Generator spaces by degree: minimal generators for schemes, the given
    /// generators for spans, the variables for `M`.
    pub fn generators(&self) -> Result<Arc<BTreeMap<usize, Echelon<F::Elem>>>> {
        if let Some(g) = self.generators.get() {
            return Ok(g.clone());
        }
        let g = match &self.presentation {
            Presentation::Span(g) => g.clone(),
            Presentation::Maximal => BTreeMap::from([(1, self.full_slice(1).echelon)]),
            Presentation::Scheme(_) => self.minimal_generators()?,
        };
        Ok(self.generators.get_or_init(|| Arc::new(g)).clone())
    }

    fn minimal_generators(&self) -> Result<BTreeMap<usize, Echelon<F::Elem>>> {
        let f = self.field();
        let lo = self.alpha()?;
        let hi = self.regularity()?;
        let mut out = BTreeMap::new();
        for t in lo..=hi {
            let cur = self.slice(t)?;
            let prev = self.slice(t - 1)?;
            let mut lifted = Vec::new();
            for v in &prev.echelon.rows {
                for i in 0..self.ring.nvars() {
                    lifted.push(self.ring.times_var(v, t - 1, i));
                }
            }
            let w = linalg::rref(f, lifted, self.ring.dim(t))?;
            if w.rank() == cur.dim() {
                continue;
            }
            let residuals: Vec<Vec<F::Elem>> = cur
                .echelon
                .rows
                .iter()
                .map(|v| {
                    let mut r = v.clone();
                    f.reduce_against(&w.rows, &w.pivots, &mut r);
                    r
                })
                .collect();
            let comp = linalg::rref(f, residuals, self.ring.dim(t))?;
            debug_assert_eq!(comp.rank() + w.rank(), cur.dim());
            out.insert(t, comp);
        }
        Ok(out)
    }

    /// Degrees of minimal generators with multiplicity, ascending.
    pub fn generator_degrees(&self) -> Result<Vec<usize>> {
        Ok(self.generators()?.iter().flat_map(|(d, e)| std::iter::repeat_n(*d, e.rank())).collect())
    }

    /// Least degree of a nonzero element.
    pub fn alpha(&self) -> Result<usize> {
        if let Some(&a) = self.alpha.get() {
            return Ok(a);
        }
        let a = match &self.presentation {
            Presentation::Maximal => 1,
            Presentation::Span(g) => *g.keys().next().ok_or(Error::ZeroIdeal)?,
            Presentation::Scheme(z) => {
                // I_t != 0 is monotone in t: search between the multiplicity
                // bound and the first degree where counting forces a form.
                let mut lo = z.max_multiplicity() as usize;
                let mut hi = counting_bound(self.ambient(), z.degree());
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    if self.dim(mid)? > 0 {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                lo
            }
        };
        Ok(*self.alpha.get_or_init(|| a))
    }

    /// `dim (R/I)_t` for scheme ideals.
    pub fn hilbert_function(&self, t: usize) -> Result<usize> {
        Ok(self.ring.dim(t) - self.dim(t)?)
    }

    /// Castelnuovo-Mumford regularity of a scheme ideal: one more than the
    /// least degree in which the Hilbert function reaches `deg Z`.
    pub fn regularity(&self) -> Result<usize> {
        if let Some(&r) = self.regularity.get() {
            return Ok(r);
        }
        let z = self.scheme().ok_or_else(|| {
            Error::InvalidParameter(format!("regularity is defined here for scheme ideals, not {}", self.label))
        })?;
        let deg = z.degree();
        let n = self.ambient();
        let sum_m: usize = z.entries().iter().map(|(_, m)| *m as usize).sum();
        let ceiling = sum_m.saturating_sub(1);
        let mut lo = (0..).find(|&t| binomial(t + n, n) >= deg).unwrap().min(ceiling);
        let reached = |t: usize| -> Result<bool> { Ok(self.hilbert_function(t)? == deg) };
        // Gallop up from the counting lower bound, then bisect.
        let mut step = 1;
        let mut hi = lo;
        while !reached(hi)? {
            lo = hi + 1;
            hi = (hi + step).min(ceiling);
            step *= 2;
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if reached(mid)? {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(*self.regularity.get_or_init(|| hi + 1))
    }

    /// Degree up to which containment of this ideal in another must be
    /// checked, with the reason that bound suffices.
    pub fn certification_degree(&self) -> Result<(usize, String)> {
        Ok(match &self.presentation {
            Presentation::Maximal => (1, "M is generated by the variables in degree 1".into()),
            Presentation::Span(g) => (
                *g.keys().next_back().ok_or(Error::ZeroIdeal)?,
                "maximum degree of a generator of the contained ideal".into(),
            ),
            Presentation::Scheme(_) => (
                self.regularity()?,
                "regularity of the contained saturated ideal bounds its generator degrees".into(),
            ),
        })
    }
}

fn dot<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    a.iter().zip(b).fold(f.zero(), |acc, (x, y)| if f.is_zero(y) { acc } else { f.add(&acc, &f.mul(x, y)) })
}

/// First degree where `C(t+N, N)` exceeds the number of conditions.
pub fn counting_bound(ambient: usize, conditions: usize) -> usize {
    (0..).find(|&t| binomial(t + ambient, ambient) > conditions).unwrap()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub bound: usize,
    pub justification: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeEvidence {
    pub degree: usize,
    /// Basis vectors of the contained ideal tested in this degree.
    pub checked: usize,
    pub contained: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub degree: usize,
    pub form: String,
}

/// Outcome of `contains(A, B)`, i.e. of deciding `B ⊆ A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub container: String,
    pub contained: String,
    pub holds: bool,
    pub checked_degrees: [usize; 2],
    pub per_degree: Vec<DegreeEvidence>,
    pub witness: Option<WitnessRecord>,
    pub certificate: Certificate,
}

#[derive(Clone, Debug)]
pub struct Containment<E> {
    pub report: ContainmentReport,
    /// The failing element, present exactly when `holds` is false.
    pub witness: Option<(usize, Form<E>)>,
}

/// Factory and memo for ideals over one ring.
pub struct Lab<F: Field> {
    ring: Arc<GradedRing<F>>,
    disk: Option<Arc<DiskCache>>,
    memo: Mutex<HashMap<String, Arc<IdealHandle<F>>>>,
}

impl<F: Field> fmt::Debug for Lab<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lab").field("field", &self.ring.field).field("ambient", &self.ring.ambient).finish()
    }
}

pub type Ideal<F> = Arc<IdealHandle<F>>;

impl<F: Field> Lab<F> {
    pub fn new(field: F, ambient: usize) -> Result<Self> {
        Ok(Lab { ring: Arc::new(GradedRing::new(field, ambient)?), disk: None, memo: Mutex::default() })
    }

    pub fn with_disk_cache(mut self, cache: Option<Arc<DiskCache>>) -> Self {
        self.disk = cache;
        self
    }

    pub fn field(&self) -> &F {
        &self.ring.field
    }

    pub fn ring(&self) -> &GradedRing<F> {
        &self.ring
    }

    pub fn ambient(&self) -> usize {
        self.ring.ambient
    }

    fn intern(&self, key: String, build: impl FnOnce() -> (Presentation<F::Elem>, String)) -> Ideal<F> {
        if let Some(h) = self.memo.lock().unwrap().get(&key) {
            return h.clone();
        }
        let (presentation, label) = build();
        let h = Arc::new(IdealHandle::new(self.ring.clone(), self.disk.clone(), presentation, key.clone(), label));
        self.memo.lock().unwrap().entry(key).or_insert(h).clone()
    }

    fn check_ambient(&self, n: usize) -> Result<()> {
        if n != self.ambient() {
            return Err(Error::AmbientMismatch { left: self.ambient(), right: n });
        }
        Ok(())
    }

    pub fn scheme(&self, z: &FatPointScheme<F::Elem>) -> Result<Ideal<F>> {
        self.check_ambient(z.ambient())?;
        self.field().config().check_multiplicity(z.max_multiplicity())?;
        let key = z.fingerprint(self.field());
        let ms: Vec<u32> = z.entries().iter().map(|(_, m)| *m).collect();
        let label = if ms.iter().all(|&m| m == ms[0]) {
            if ms[0] == 1 {
                format!("I({})", provenance_label(z.provenance()))
            } else {
                format!("I({})^({})", provenance_label(z.provenance()), ms[0])
            }
        } else {
            format!("I({}; multiplicities {:?})", provenance_label(z.provenance()), ms)
        };
        Ok(self.intern(key, || (Presentation::Scheme(z.clone()), label)))
    }

    pub fn maximal(&self) -> Ideal<F> {
        self.intern("M".into(), || (Presentation::Maximal, "M".into()))
    }

    /// Ideal generated by explicit forms.
    pub fn span(&self, label: &str, generators: &[Form<F::Elem>]) -> Result<Ideal<F>> {
        let mut by_degree: BTreeMap<usize, Vec<Vec<F::Elem>>> = BTreeMap::new();
        for g in generators {
            self.check_ambient(g.nvars() - 1)?;
            if !g.is_zero() {
                by_degree.entry(g.degree()).or_default().push(g.to_dense(&self.ring));
            }
        }
        let gens = self.rref_by_degree(by_degree)?;
        let key = format!("span({})", self.gens_fingerprint(&gens));
        Ok(self.intern(key, || (Presentation::Span(gens), label.to_string())))
    }

    fn rref_by_degree(&self, rows: BTreeMap<usize, Vec<Vec<F::Elem>>>) -> Result<BTreeMap<usize, Echelon<F::Elem>>> {
        let mut out = BTreeMap::new();
        for (d, r) in rows {
            let e = linalg::rref(self.field(), r, self.ring.dim(d))?;
            if e.rank() > 0 {
                out.insert(d, e);
            }
        }
        Ok(out)
    }

    fn gens_fingerprint(&self, gens: &BTreeMap<usize, Echelon<F::Elem>>) -> String {
        let f = self.field();
        gens.iter()
            .map(|(d, e)| {
                let rows: Vec<String> = e.rows.iter().map(|r| Form::from_dense(&self.ring, *d, r).render(f)).collect();
                format!("{d}:[{}]", rows.join(";"))
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    fn multiply_spaces(
        &self,
        a: &BTreeMap<usize, Echelon<F::Elem>>,
        b: &BTreeMap<usize, Echelon<F::Elem>>,
    ) -> Result<BTreeMap<usize, Echelon<F::Elem>>> {
        let f = self.field();
        let mut rows: BTreeMap<usize, Vec<Vec<F::Elem>>> = BTreeMap::new();
        for (da, ea) in a {
            let fa: Vec<Form<F::Elem>> = ea.rows.iter().map(|r| Form::from_dense(&self.ring, *da, r)).collect();
            for (db, eb) in b {
                let fb: Vec<Form<F::Elem>> = eb.rows.iter().map(|r| Form::from_dense(&self.ring, *db, r)).collect();
                let pairs: Vec<(usize, usize)> =
                    (0..fa.len()).flat_map(|i| (0..fb.len()).map(move |j| (i, j))).collect();
                let prods = par::map(&pairs, |&(i, j)| fa[i].mul(f, &fb[j]).map(|p| p.to_dense(&self.ring)));
                let entry = rows.entry(da + db).or_default();
                for p in prods {
                    entry.push(p?);
                }
            }
        }
        self.rref_by_degree(rows)
    }

    /// Ideal generated by all products `g h`, `g` from `a`, `h` from `b`.
    pub fn product(&self, a: &Ideal<F>, b: &Ideal<F>) -> Result<Ideal<F>> {
        let key = format!("prod({},{})", a.key(), b.key());
        if let Some(h) = self.memo.lock().unwrap().get(&key) {
            return Ok(h.clone());
        }
        let (ga, gb) = (a.generators()?, b.generators()?);
        let gens = self.multiply_spaces(&ga, &gb)?;
        let label = format!("{}·{}", a.describe(), b.describe());
        Ok(self.intern(key, || (Presentation::Span(gens), label)))
    }

    /// The ordinary power `I^r`, generated by `r`-fold products of
    /// generators of `I`.
    pub fn power(&self, ideal: &Ideal<F>, r: usize) -> Result<Ideal<F>> {
        if r == 0 {
            return Err(Error::InvalidParameter("power exponent must be positive".into()));
        }
        let key = format!("pow({},{})", r, ideal.key());
        if let Some(h) = self.memo.lock().unwrap().get(&key) {
            return Ok(h.clone());
        }
        let base = ideal.generators()?;
        let mut gens = (*base).clone();
        for _ in 1..r {
            gens = self.multiply_spaces(&gens, &base)?;
        }
        let label = if r == 1 { format!("({})^1", ideal.describe()) } else { format!("({})^{r}", ideal.describe()) };
        Ok(self.intern(key, || (Presentation::Span(gens), label)))
    }

    /// `M^j I`, generated by `mu g` with `deg mu = j`.
    pub fn shift_by_m(&self, ideal: &Ideal<F>, j: usize) -> Result<Ideal<F>> {
        let key = format!("shift({},{})", j, ideal.key());
        if let Some(h) = self.memo.lock().unwrap().get(&key) {
            return Ok(h.clone());
        }
        let base = ideal.generators()?;
        let monos = monomial_basis(self.ambient(), j);
        let mut rows: BTreeMap<usize, Vec<Vec<F::Elem>>> = BTreeMap::new();
        for (d, e) in base.iter() {
            let entry = rows.entry(d + j).or_default();
            for v in &e.rows {
                for mu in &monos {
                    entry.push(self.ring.times_monomial(v, *d, mu));
                }
            }
        }
        let gens = self.rref_by_degree(rows)?;
        let label = match j {
            0 => ideal.describe().to_string(),
            1 => format!("M·{}", ideal.describe()),
            _ => format!("M^{j}·{}", ideal.describe()),
        };
        Ok(self.intern(key, || (Presentation::Span(gens), label)))
    }

    /// Decides `contained ⊆ container` degree by degree up to the
    /// certification degree of `contained`.
    pub fn contains(&self, container: &Ideal<F>, contained: &Ideal<F>) -> Result<Containment<F::Elem>> {
        let f = self.field();
        let material = format!("{}|{}|{}|contains", f.config().describe(), container.key(), contained.key());
        if let Some(report) = self.disk.as_ref().and_then(|c| c.get::<ContainmentReport>(&material)) {
            if report.holds {
                return Ok(Containment { report, witness: None });
            }
        }
        let (hi, justification) = contained.certification_degree()?;
        let lo = contained.alpha()?;
        let mut per_degree = Vec::new();
        let mut witness = None;
        for t in lo..=hi {
            let rows: Vec<Vec<F::Elem>> = match contained.presentation() {
                Presentation::Span(g) => g.get(&t).map(|e| e.rows.clone()).unwrap_or_default(),
                _ => contained.slice(t)?.echelon.rows.clone(),
            };
            if rows.is_empty() {
                continue;
            }
            let failing = first_outside(container, t, &rows)?;
            per_degree.push(DegreeEvidence { degree: t, checked: rows.len(), contained: failing.is_none() });
            if let Some(i) = failing {
                witness = Some((t, Form::from_dense(&self.ring, t, &rows[i])));
                break;
            }
        }
        let last = if witness.is_some() { per_degree.last().map_or(hi, |e| e.degree) } else { hi };
        let report = ContainmentReport {
            container: container.describe().to_string(),
            contained: contained.describe().to_string(),
            holds: witness.is_none(),
            checked_degrees: [lo, last],
            per_degree,
            witness: witness.as_ref().map(|(d, w)| WitnessRecord { degree: *d, form: w.render(f) }),
            certificate: Certificate { bound: hi, justification },
        };
        if let Some(c) = &self.disk {
            c.put(&material, &report)?;
        }
        Ok(Containment { report, witness })
    }

    /// Rechecks a reported witness: it must lie in `contained` and not in
    /// `container`.
    pub fn verify_witness(
        &self,
        container: &Ideal<F>,
        contained: &Ideal<F>,
        degree: usize,
        form: &Form<F::Elem>,
    ) -> Result<bool> {
        let v = form.to_dense(&self.ring);
        Ok(!form.is_zero() && contained.contains_vec(degree, &v)? && !container.contains_vec(degree, &v)?)
    }
}

/// Index of the first row outside `ideal`'s degree-`t` piece.
fn first_outside<F: Field>(ideal: &IdealHandle<F>, t: usize, rows: &[Vec<F::Elem>]) -> Result<Option<usize>> {
    let f = ideal.field();
    let inside: Vec<bool> = match ideal.presentation() {
        Presentation::Maximal => vec![t > 0; rows.len()],
        Presentation::Scheme(z) => {
            let cond = conditions_matrix(ideal.ring(), z, t);
            par::map(rows, |v| cond.iter().all(|c| f.is_zero(&dot(f, c, v))))
        }
        Presentation::Span(_) => {
            let s = ideal.slice(t)?;
            par::map(rows, |v| s.contains_vec(f, v))
        }
    };
    Ok(inside.iter().position(|ok| !ok))
}
