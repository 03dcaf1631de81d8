//! Homogeneous forms in `K[x0, ..., xN]` and degree-wise monomial bases.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::linalg::Echelon;
use crate::scalar::Field;

/// Exponent vector of a monomial. Ordered by graded reverse lexicographic
/// order with `x0 > x1 > ... > xN`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            if a != b {
                // Smaller exponent in the last differing variable is larger.
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "x{i}^{e}")?;
        }
        Ok(())
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All monomials of degree `t` in `N + 1` variables, largest first.
pub fn monomial_basis(ambient: usize, t: usize) -> Vec<Monomial> {
    fn fill(out: &mut Vec<Monomial>, cur: &mut Vec<u32>, var: usize, left: u32) {
        if var + 1 == cur.len() {
            cur[var] = left;
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[var] = e;
            fill(out, cur, var + 1, left - e);
        }
        cur[var] = 0;
    }
    let nvars = ambient + 1;
    let mut out = Vec::with_capacity(binomial(t + ambient, ambient));
    fill(&mut out, &mut vec![0; nvars], 0, t as u32);
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// Column indexing for one degree.
#[derive(Debug)]
pub struct MonomialBasis {
    pub degree: usize,
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl MonomialBasis {
    fn new(ambient: usize, degree: usize) -> Self {
        let monomials = monomial_basis(ambient, degree);
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        MonomialBasis { degree, monomials, index }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// `K[x0..xN]` over a concrete field, with memoized monomial tables.
#[derive(Debug)]
pub struct GradedRing<F: Field> {
    pub field: F,
    pub ambient: usize,
    bases: RwLock<HashMap<usize, Arc<MonomialBasis>>>,
    var_maps: RwLock<HashMap<usize, Arc<Vec<Vec<usize>>>>>,
}

impl<F: Field> GradedRing<F> {
    pub fn new(field: F, ambient: usize) -> Result<Self> {
        if ambient == 0 {
            return Err(Error::InvalidParameter("ambient dimension N must be at least 1".into()));
        }
        Ok(GradedRing { field, ambient, bases: RwLock::default(), var_maps: RwLock::default() })
    }

    pub fn nvars(&self) -> usize {
        self.ambient + 1
    }

    pub fn dim(&self, t: usize) -> usize {
        binomial(t + self.ambient, self.ambient)
    }

    pub fn basis(&self, t: usize) -> Arc<MonomialBasis> {
        if let Some(b) = self.bases.read().unwrap().get(&t) {
            return b.clone();
        }
        let b = Arc::new(MonomialBasis::new(self.ambient, t));
        self.bases.write().unwrap().entry(t).or_insert(b).clone()
    }

    /// `maps[i][j]` is the index in degree `t + 1` of `x_i` times monomial `j`
    /// of degree `t`.
    pub fn var_maps(&self, t: usize) -> Arc<Vec<Vec<usize>>> {
        if let Some(m) = self.var_maps.read().unwrap().get(&t) {
            return m.clone();
        }
        let src = self.basis(t);
        let dst = self.basis(t + 1);
        let maps: Vec<Vec<usize>> = (0..self.nvars())
            .map(|i| {
                let xi = Monomial::var(self.nvars(), i);
                src.monomials.iter().map(|m| dst.index_of(&m.mul(&xi)).expect("monomial in basis")).collect()
            })
            .collect();
        let maps = Arc::new(maps);
        self.var_maps.write().unwrap().entry(t).or_insert(maps).clone()
    }

    /// Coefficient vector of `x_i * v`, with `v` in degree `t`.
    pub fn times_var(&self, v: &[F::Elem], t: usize, i: usize) -> Vec<F::Elem> {
        let maps = self.var_maps(t);
        let mut out = vec![self.field.zero(); self.dim(t + 1)];
        for (j, c) in v.iter().enumerate() {
            if !self.field.is_zero(c) {
                out[maps[i][j]] = c.clone();
            }
        }
        out
    }

    /// Coefficient vector of `mono * v`.
    pub fn times_monomial(&self, v: &[F::Elem], t: usize, mono: &Monomial) -> Vec<F::Elem> {
        let src = self.basis(t);
        let dst = self.basis(t + mono.degree());
        let mut out = vec![self.field.zero(); dst.len()];
        for (j, c) in v.iter().enumerate() {
            if !self.field.is_zero(c) {
                out[dst.index_of(&src.monomials[j].mul(mono)).expect("monomial in basis")] = c.clone();
            }
        }
        out
    }
}

/// A homogeneous form: terms sorted largest monomial first, no zero
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form<E> {
    nvars: usize,
    degree: usize,
    terms: Vec<(Monomial, E)>,
}

impl<E: Clone + PartialEq + fmt::Debug> Form<E> {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        Form { nvars, degree, terms: Vec::new() }
    }

    pub fn constant<F: Field<Elem = E>>(field: &F, nvars: usize, c: E) -> Self {
        Self::from_terms(field, nvars, 0, vec![(Monomial::one(nvars), c)]).expect("constant is homogeneous")
    }

    pub fn one<F: Field<Elem = E>>(field: &F, nvars: usize) -> Self {
        Self::constant(field, nvars, field.one())
    }

    pub fn monomial<F: Field<Elem = E>>(field: &F, m: Monomial) -> Self {
        let nvars = m.nvars();
        let degree = m.degree();
        Form { nvars, degree, terms: vec![(m, field.one())] }
    }

    pub fn var<F: Field<Elem = E>>(field: &F, nvars: usize, i: usize) -> Self {
        Self::monomial(field, Monomial::var(nvars, i))
    }

    /// Combines like terms and drops zeros; rejects inhomogeneous input.
    pub fn from_terms<F: Field<Elem = E>>(
        field: &F,
        nvars: usize,
        degree: usize,
        terms: Vec<(Monomial, E)>,
    ) -> Result<Self> {
        let mut acc: HashMap<Monomial, E> = HashMap::new();
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::AmbientMismatch { left: nvars, right: m.nvars() });
            }
            if m.degree() != degree {
                return Err(Error::InvalidParameter(format!(
                    "term {m} has degree {} in a form of degree {degree}",
                    m.degree()
                )));
            }
            let e = acc.entry(m).or_insert_with(|| field.zero());
            *e = field.add(e, &c);
        }
        let mut terms: Vec<(Monomial, E)> = acc.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Ok(Form { nvars, degree, terms })
    }

    pub fn from_dense<F: Field<Elem = E>>(ring: &GradedRing<F>, degree: usize, v: &[E]) -> Self {
        let basis = ring.basis(degree);
        debug_assert_eq!(basis.len(), v.len());
        // Basis order is already descending.
        let terms = basis
            .monomials
            .iter()
            .zip(v)
            .filter(|(_, c)| !ring.field.is_zero(c))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Form { nvars: ring.nvars(), degree, terms }
    }

    pub fn to_dense<F: Field<Elem = E>>(&self, ring: &GradedRing<F>) -> Vec<E> {
        let basis = ring.basis(self.degree);
        let mut out = vec![ring.field.zero(); basis.len()];
        for (m, c) in &self.terms {
            out[basis.index_of(m).expect("monomial in basis")] = c.clone();
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, E)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.degree == 0 && !self.is_zero()
    }

    pub fn leading(&self) -> Option<&(Monomial, E)> {
        self.terms.first()
    }

    pub fn scale<F: Field<Elem = E>>(&self, field: &F, c: &E) -> Self {
        if field.is_zero(c) {
            return Form::zero(self.nvars, self.degree);
        }
        Form {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), field.mul(x, c))).collect(),
        }
    }

    /// Scaled so the leading coefficient is one. Zero stays zero.
    pub fn monic<F: Field<Elem = E>>(&self, field: &F) -> Self {
        match self.leading() {
            Some((_, c)) => self.scale(field, &field.inv(c).expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }

    pub fn add<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::InvalidParameter("sum of forms of different degrees".into()));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Self::from_terms(field, self.nvars, degree, terms)
    }

    pub fn sub<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Result<Self> {
        self.add(field, &other.scale(field, &field.neg(&field.one())))
    }

    pub fn mul<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut acc: HashMap<Monomial, E> = HashMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let e = acc.entry(a.mul(b)).or_insert_with(|| field.zero());
                *e = field.add(e, &field.mul(x, y));
            }
        }
        let mut terms: Vec<(Monomial, E)> = acc.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Ok(Form { nvars: self.nvars, degree: self.degree + other.degree, terms })
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Form {
            nvars: self.nvars,
            degree: self.degree + m.degree(),
            terms: self.terms.iter().map(|(a, c)| (a.mul(m), c.clone())).collect(),
        }
    }

    /// Division with remainder by a single form (leading terms in grevlex
    /// order). Since `{d}` is a Groebner basis of `(d)`, the remainder is zero
    /// exactly when `d` divides `self`.
    pub fn div_rem<F: Field<Elem = E>>(&self, field: &F, d: &Self) -> Result<(Self, Self)> {
        self.check_compatible(d)?;
        let (lm, lc) = d.leading().ok_or(Error::DivisionByZero)?.clone();
        let lc_inv = field.inv(&lc).expect("nonzero leading coefficient");
        let qdeg = self.degree.checked_sub(d.degree);
        let mut rem: Vec<(Monomial, E)> = Vec::new();
        let mut quot: Vec<(Monomial, E)> = Vec::new();
        let mut cur = self.clone();
        while let Some((m, c)) = cur.leading().cloned() {
            if qdeg.is_some() && lm.divides(&m) {
                let qm = lm.quotient_of(&m);
                let qc = field.mul(&c, &lc_inv);
                let sub = d.mul_monomial(&qm).scale(field, &qc);
                quot.push((qm, qc));
                cur = cur.sub(field, &sub)?;
            } else {
                rem.push((m, c));
                cur.terms.remove(0);
            }
        }
        let q = match qdeg {
            Some(qd) => Self::from_terms(field, self.nvars, qd, quot)?,
            None => Form::zero(self.nvars, 0),
        };
        let r = Self::from_terms(field, self.nvars, self.degree, rem)?;
        Ok((q, r))
    }

    pub fn divides<F: Field<Elem = E>>(&self, field: &F, f: &Self) -> Result<bool> {
        Ok(f.div_rem(field, self)?.1.is_zero())
    }

    pub fn eval<F: Field<Elem = E>>(&self, field: &F, point: &[E]) -> E {
        let mut acc = field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                t = field.mul(&t, &field.pow(x, u64::from(e)));
            }
            acc = field.add(&acc, &t);
        }
        acc
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::AmbientMismatch { left: self.nvars - 1, right: other.nvars - 1 });
        }
        Ok(())
    }

    /// Canonical term syntax `coeff*x0^a x1^b ...`, terms joined by ` + `.
    pub fn render<F: Field<Elem = E>>(&self, field: &F) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(m, c)| format!("{}*{}", field.fmt_elem(c), m))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// The degree-`t` piece `J_t` of a homogeneous ideal, as an RREF matrix over
/// the monomial basis of degree `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceBasis<E> {
    pub ambient: usize,
    pub degree: usize,
    pub echelon: Echelon<E>,
}

impl<E: Clone + PartialEq + fmt::Debug> SliceBasis<E> {
    pub fn dim(&self) -> usize {
        self.echelon.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.echelon.ncols
    }

    pub fn forms<F: Field<Elem = E>>(&self, ring: &GradedRing<F>) -> Vec<Form<E>> {
        self.echelon.rows.iter().map(|r| Form::from_dense(ring, self.degree, r)).collect()
    }

    pub fn contains_vec<F: Field<Elem = E>>(&self, field: &F, v: &[E]) -> bool {
        crate::linalg::in_span(field, &self.echelon, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{PrimeField, Rationals, SeedStream};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn basis_counts_and_order() {
        let b = monomial_basis(2, 1);
        assert_eq!(b, vec![Monomial(vec![1, 0, 0]), Monomial(vec![0, 1, 0]), Monomial(vec![0, 0, 1])]);
        assert_eq!(monomial_basis(2, 4).len(), 15);
        assert_eq!(monomial_basis(3, 2).len(), 10);
        assert_eq!(monomial_basis(2, 0), vec![Monomial(vec![0, 0, 0])]);
        // grevlex: x0 x2 < x1^2
        let b2 = monomial_basis(2, 2);
        let pos = |e: [u32; 3]| b2.iter().position(|m| m.0 == e).unwrap();
        assert!(pos([0, 2, 0]) < pos([1, 0, 1]));
        assert_eq!(b2[0].0, vec![2, 0, 0]);
        assert_eq!(b2[5].0, vec![0, 0, 2]);
    }

    #[test]
    fn products() {
        let f = Rationals;
        let x0 = Form::var(&f, 3, 0);
        let x1 = Form::var(&f, 3, 1);
        let one = Form::one(&f, 3);
        assert_eq!(x0.mul(&f, &one).unwrap(), x0);
        let p = x0.mul(&f, &x1).unwrap();
        assert_eq!(p.terms(), &[(Monomial(vec![1, 1, 0]), q(1))]);
        let s = x0.add(&f, &x1).unwrap();
        let sq = s.mul(&f, &s).unwrap();
        assert_eq!(sq.render(&f), "1*x0^2 x1^0 x2^0 + 2*x0^1 x1^1 x2^0 + 1*x0^0 x1^2 x2^0");
        assert_eq!(sq.degree(), 2);
    }

    #[test]
    fn division() {
        let f = PrimeField::default();
        let x0 = Form::var(&f, 3, 0);
        let x1 = Form::var(&f, 3, 1);
        let x2 = Form::var(&f, 3, 2);
        let a = x0.add(&f, &x2).unwrap();
        let b = x1.sub(&f, &x2).unwrap();
        let ab = a.mul(&f, &b).unwrap();
        let (qq, r) = ab.div_rem(&f, &a).unwrap();
        assert!(r.is_zero());
        assert_eq!(qq, b);
        assert!(!x1.divides(&f, &a).unwrap());
    }

    #[test]
    fn dense_round_trip() {
        let f = PrimeField::default();
        let ring = GradedRing::new(f, 2).unwrap();
        let v: Vec<u64> = (0..10).map(|i| (i * 7 % 3) as u64).collect();
        let form = Form::from_dense(&ring, 3, &v);
        assert_eq!(form.to_dense(&ring), v);
        let x1v = ring.times_var(&v, 3, 1);
        assert_eq!(Form::from_dense(&ring, 4, &x1v), form.mul(&f, &Form::var(&f, 3, 1)).unwrap());
    }

    fn random_form(f: &PrimeField, s: &mut SeedStream, deg: usize) -> Form<u64> {
        let terms = monomial_basis(2, deg).into_iter().map(|m| (m, s.below(5))).collect();
        Form::from_terms(f, 3, deg, terms).unwrap()
    }

    proptest! {
        #[test]
        fn product_is_commutative_and_associative(seed in 0u64..500, d1 in 0usize..4, d2 in 0usize..4, d3 in 0usize..3) {
            let f = PrimeField::default();
            let mut s = SeedStream::new(seed);
            let a = random_form(&f, &mut s, d1);
            let b = random_form(&f, &mut s, d2);
            let c = random_form(&f, &mut s, d3);
            prop_assert_eq!(a.mul(&f, &b).unwrap(), b.mul(&f, &a).unwrap());
            prop_assert_eq!(
                a.mul(&f, &b).unwrap().mul(&f, &c).unwrap(),
                a.mul(&f, &b.mul(&f, &c).unwrap()).unwrap()
            );
            let bc = b.add(&f, &random_form(&f, &mut s, d2)).unwrap();
            let lhs = a.mul(&f, &bc).unwrap();
            let rhs_terms = a.mul(&f, &b).unwrap().add(&f, &a.mul(&f, &bc.sub(&f, &b).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs_terms);
        }
    }
}
