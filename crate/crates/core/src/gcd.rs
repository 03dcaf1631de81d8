//! Greatest common divisors of ternary forms and fixed divisors of slices.
//!
//! Forms are first sheared by `x_i -> x_i + l_i x0` so that both have a
//! nonzero `x0^deg` coefficient. The gcd is then monic in `x0` with constant
//! leading coefficient, which makes images under `x1 = a, x2 = 1` consistent:
//! the gcd is interpolated from univariate gcds of minimal degree and accepted
//! only after exact trial division.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::forms::{Form, GradedRing, Monomial, SliceBasis};
use crate::scalar::{Field, SeedStream};

const SHEAR_ATTEMPTS: usize = 64;
const INTERPOLATION_ROUNDS: usize = 8;

type Poly<E> = Vec<E>;

fn trim<F: Field>(f: &F, p: &mut Poly<F::Elem>) {
    while p.last().is_some_and(|c| f.is_zero(c)) {
        p.pop();
    }
}

fn poly_rem<F: Field>(f: &F, mut a: Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    let db = b.len() - 1;
    let inv = f.inv(&b[db]).expect("trimmed divisor");
    while a.len() > db {
        let da = a.len() - 1;
        let c = f.mul(&a[da], &inv);
        for (k, bk) in b.iter().enumerate() {
            let idx = da - db + k;
            a[idx] = f.sub(&a[idx], &f.mul(&c, bk));
        }
        debug_assert!(f.is_zero(&a[da]));
        a.pop();
        trim(f, &mut a);
    }
    a
}

/// Monic gcd of univariate polynomials (coefficients low to high).
fn poly_gcd<F: Field>(f: &F, mut a: Poly<F::Elem>, mut b: Poly<F::Elem>) -> Poly<F::Elem> {
    trim(f, &mut a);
    trim(f, &mut b);
    while !b.is_empty() {
        let r = poly_rem(f, a, &b);
        a = b;
        b = r;
    }
    if let Some(lc) = a.last().cloned() {
        let inv = f.inv(&lc).expect("nonzero");
        for c in &mut a {
            *c = f.mul(c, &inv);
        }
    }
    a
}

/// Coefficients of `(x_i + l x0)^e` ordered by the power of `x0`.
fn binomial_row<F: Field>(f: &F, l: &F::Elem, e: u32) -> Vec<F::Elem> {
    let mut row = vec![f.one()];
    for _ in 0..e {
        let mut next = vec![f.zero(); row.len() + 1];
        for (k, c) in row.iter().enumerate() {
            next[k] = f.add(&next[k], c);
            next[k + 1] = f.add(&next[k + 1], &f.mul(c, l));
        }
        row = next;
    }
    row
}

/// `form(x0, x1 + l1 x0, ..., xN + lN x0)`; `shifts[0]` is ignored.
pub fn shear<F: Field>(f: &F, form: &Form<F::Elem>, shifts: &[F::Elem]) -> Form<F::Elem> {
    let nvars = form.nvars();
    let mut acc: HashMap<Monomial, F::Elem> = HashMap::new();
    for (m, c) in form.terms() {
        let mut partial: Vec<(Monomial, F::Elem)> = vec![(Monomial::var(nvars, 0), c.clone())];
        partial[0].0 .0[0] = m.0[0];
        for i in 1..nvars {
            let row = binomial_row(f, &shifts[i], m.0[i]);
            let mut next = Vec::with_capacity(partial.len() * row.len());
            for (pm, pc) in &partial {
                for (k, rc) in row.iter().enumerate() {
                    let mut e = pm.0.clone();
                    e[0] += k as u32;
                    e[i] += m.0[i] - k as u32;
                    next.push((Monomial(e), f.mul(pc, rc)));
                }
            }
            partial = next;
        }
        for (pm, pc) in partial {
            let e = acc.entry(pm).or_insert_with(|| f.zero());
            *e = f.add(e, &pc);
        }
    }
    Form::from_terms(f, nvars, form.degree(), acc.into_iter().collect()).expect("shear preserves degree")
}

/// Dense `coeffs[i][j]` of `x0^i x1^j` after setting `x2 = 1`.
fn dehomogenize<F: Field>(f: &F, form: &Form<F::Elem>) -> Vec<Vec<F::Elem>> {
    let d = form.degree();
    let mut out = vec![vec![f.zero(); d + 1]; d + 1];
    for (m, c) in form.terms() {
        out[m.0[0] as usize][m.0[1] as usize] = c.clone();
    }
    out
}

fn specialize<F: Field>(f: &F, b: &[Vec<F::Elem>], a: &F::Elem) -> Poly<F::Elem> {
    b.iter()
        .map(|row| row.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, a), c)))
        .collect()
}

/// Newton interpolation through `(xs[k], ys[k])`, coefficients low to high.
fn interpolate<F: Field>(f: &F, xs: &[F::Elem], ys: &[F::Elem]) -> Poly<F::Elem> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for k in (level..n).rev() {
            let num = f.sub(&dd[k], &dd[k - 1]);
            let den = f.sub(&xs[k], &xs[k - level]);
            dd[k] = f.mul(&num, &f.inv(&den).expect("distinct nodes"));
        }
    }
    let mut poly = vec![f.zero(); n];
    for k in (0..n).rev() {
        // poly = poly * (x - xs[k]) + dd[k]
        let mut next = vec![f.zero(); n];
        for j in 0..n {
            if j + 1 < n {
                next[j + 1] = f.add(&next[j + 1], &poly[j]);
            }
            next[j] = f.sub(&next[j], &f.mul(&poly[j], &xs[k]));
        }
        next[0] = f.add(&next[0], &dd[k]);
        poly = next;
    }
    poly
}

fn leading_x0_coefficient<F: Field>(f: &F, form: &Form<F::Elem>, shifts: &[F::Elem]) -> F::Elem {
    let mut point = shifts.to_vec();
    point[0] = f.one();
    form.eval(f, &point)
}

fn require_plane(nvars: usize) -> Result<()> {
    if nvars != 3 {
        return Err(Error::UnsupportedDimension { op: "gcd of forms", n: nvars - 1 });
    }
    Ok(())
}

/// Monic gcd of two ternary forms. The gcd of zero and zero is zero.
pub fn gcd_forms<F: Field>(f: &F, a: &Form<F::Elem>, b: &Form<F::Elem>) -> Result<Form<F::Elem>> {
    require_plane(a.nvars())?;
    if a.nvars() != b.nvars() {
        return Err(Error::AmbientMismatch { left: a.nvars() - 1, right: b.nvars() - 1 });
    }
    if a.is_zero() {
        return Ok(b.monic(f));
    }
    if b.is_zero() {
        return Ok(a.monic(f));
    }
    if a.degree() == 0 || b.degree() == 0 {
        return Ok(Form::one(f, 3));
    }
    let mut stream = SeedStream::derived(0, "gcd-shear");
    let mut shifts = vec![f.zero(); 3];
    for attempt in 0..SHEAR_ATTEMPTS {
        if attempt > 0 {
            for s in shifts.iter_mut().skip(1) {
                *s = f.from_i64(stream.below(1 << 30) as i64);
            }
        }
        let good = |g: &Form<F::Elem>| !f.is_zero(&leading_x0_coefficient(f, g, &shifts));
        if good(a) && good(b) {
            if let Some(g) = gcd_sheared(f, a, b, &shifts, &mut stream)? {
                return Ok(g);
            }
        }
    }
    Err(Error::ResamplingExhausted { what: "gcd shear".into(), attempts: SHEAR_ATTEMPTS })
}

fn gcd_sheared<F: Field>(
    f: &F,
    a: &Form<F::Elem>,
    b: &Form<F::Elem>,
    shifts: &[F::Elem],
    stream: &mut SeedStream,
) -> Result<Option<Form<F::Elem>>> {
    let sa = shear(f, a, shifts);
    let sb = shear(f, b, shifts);
    let da = dehomogenize(f, &sa);
    let db = dehomogenize(f, &sb);
    let bound = a.degree().min(b.degree());
    for _ in 0..INTERPOLATION_ROUNDS {
        let mut best: Option<usize> = None;
        let mut xs: Vec<F::Elem> = Vec::new();
        let mut images: Vec<Poly<F::Elem>> = Vec::new();
        let mut tries = 0;
        while best.is_none_or(|e| xs.len() < e + 1) && tries < 4 * (bound + 2) {
            tries += 1;
            let x = f.from_i64(stream.below(1 << 30) as i64);
            if xs.contains(&x) {
                continue;
            }
            let g = poly_gcd(f, specialize(f, &da, &x), specialize(f, &db, &x));
            let e = g.len() - 1;
            match best {
                Some(b) if e > b => continue,
                Some(b) if e == b => {}
                _ => {
                    best = Some(e);
                    xs.clear();
                    images.clear();
                }
            }
            if e == 0 {
                return Ok(Some(Form::one(f, 3)));
            }
            xs.push(x);
            images.push(g);
        }
        let Some(e) = best else { continue };
        if xs.len() < e + 1 {
            continue;
        }
        // Coefficient of x0^i is a polynomial in x1 of degree <= e - i.
        let mut terms = Vec::new();
        let mut overshoot = false;
        for i in 0..=e {
            let ys: Vec<F::Elem> = images.iter().map(|g| g[i].clone()).collect();
            for (j, c) in interpolate(f, &xs, &ys).into_iter().enumerate() {
                if f.is_zero(&c) {
                    continue;
                }
                overshoot |= i + j > e;
                terms.push((Monomial(vec![i as u32, j as u32, e.saturating_sub(i + j) as u32]), c));
            }
        }
        if overshoot {
            continue;
        }
        let cand = Form::from_terms(f, 3, e, terms)?;
        if cand.divides(f, &sa)? && cand.divides(f, &sb)? {
            let neg: Vec<F::Elem> = shifts.iter().map(|s| f.neg(s)).collect();
            return Ok(Some(shear(f, &cand, &neg).monic(f)));
        }
    }
    Ok(None)
}

fn random_combination<F: Field>(
    ring: &GradedRing<F>,
    slice: &SliceBasis<F::Elem>,
    stream: &mut SeedStream,
) -> Form<F::Elem> {
    let f = &ring.field;
    let mut v = vec![f.zero(); slice.echelon.ncols];
    for row in &slice.echelon.rows {
        let c = f.from_i64(stream.below(1 << 30) as i64 + 1);
        for (x, r) in v.iter_mut().zip(row) {
            *x = f.add(x, &f.mul(&c, r));
        }
    }
    Form::from_dense(ring, slice.degree, &v)
}

/// Monic gcd of every form in a nonzero slice of a ternary ideal.
pub fn fixed_divisor<F: Field>(
    ring: &GradedRing<F>,
    slice: &SliceBasis<F::Elem>,
    stream: &mut SeedStream,
) -> Result<Form<F::Elem>> {
    require_plane(ring.nvars())?;
    if slice.is_zero() {
        return Err(Error::ZeroSlice);
    }
    let f = &ring.field;
    let mut h = random_combination(ring, slice, stream);
    // Random combinations usually collapse the gcd at once; the basis pass
    // makes the answer exact.
    let probes = (0..2).map(|_| random_combination(ring, slice, stream)).collect::<Vec<_>>();
    for g in probes.iter().chain(slice.forms(ring).iter()) {
        if h.degree() == 0 {
            break;
        }
        h = gcd_forms(f, &h, g)?;
    }
    Ok(h.monic(f))
}

/// Two forms of the slice without a common factor, found by random
/// combination. `Ok(None)` when the slice has a nonconstant fixed divisor or
/// fewer than two independent forms.
pub fn coprime_pair<F: Field>(
    ring: &GradedRing<F>,
    slice: &SliceBasis<F::Elem>,
    stream: &mut SeedStream,
    attempts: usize,
) -> Result<Option<(Form<F::Elem>, Form<F::Elem>)>> {
    require_plane(ring.nvars())?;
    if slice.dim() < 2 {
        return Ok(None);
    }
    let f = &ring.field;
    for _ in 0..attempts {
        let a = random_combination(ring, slice, stream);
        let b = random_combination(ring, slice, stream);
        if gcd_forms(f, &a, &b)?.degree() == 0 {
            return Ok(Some((a, b)));
        }
        if fixed_divisor(ring, slice, stream)?.degree() > 0 {
            return Ok(None);
        }
    }
    Err(Error::CertificationFailed { degree: slice.degree, attempts })
}
