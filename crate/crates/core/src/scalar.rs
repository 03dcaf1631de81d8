//! Exact scalars: prime fields GF(p) with p < 2^31, and arbitrary-precision
//! rationals.
//!
//! The engine is generic over [`Field`]; the dynamically typed [`Scalar`] is
//! the boundary type used by reports and by [`scalar_arith`].

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// 2^31 - 1.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

/// Second prime used when re-checking probe failures: the largest prime below
/// 2^31 - 1.
pub const RECHECK_PRIME: u64 = 2_147_483_629;

/// Exclusive upper bound on supported primes. Keeps `3 p^2 < 2^64`, which the
/// lazy-reduction elimination kernel relies on.
pub const PRIME_LIMIT: u64 = 1 << 31;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldConfig {
    Prime { p: u64 },
    Rationals,
}

impl FieldConfig {
    pub fn prime(p: u64) -> Result<Self> {
        if p <= 2 || p >= PRIME_LIMIT {
            return Err(Error::PrimeOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldConfig::Prime { p })
    }

    /// Order-`m` vanishing conditions need `m < p`.
    pub fn check_multiplicity(&self, multiplicity: u32) -> Result<()> {
        match *self {
            FieldConfig::Prime { p } if u64::from(multiplicity) >= p => {
                Err(Error::MultiplicityTooLarge { multiplicity, p })
            }
            _ => Ok(()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            FieldConfig::Prime { p } => format!("GF({p})"),
            FieldConfig::Rationals => "QQ".to_string(),
        }
    }
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig::Prime { p: DEFAULT_PRIME }
    }
}

impl fmt::Display for FieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Deterministic random stream. Owned by exactly one consumer.
#[derive(Clone, Debug)]
pub struct SeedStream {
    rng: ChaCha8Rng,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        SeedStream { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream derived from `seed` and a domain tag.
    pub fn derived(seed: u64, tag: &str) -> Self {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(seed.to_le_bytes());
        h.update(tag.as_bytes());
        let digest = h.finalize();
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        SeedStream::new(u64::from_le_bytes(bytes))
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.rng.gen_range(0..bound)
    }
}

/// A field the graded engine can compute over.
///
/// Linear-algebra kernels live on the trait so that prime fields can swap in
/// the lazily reduced elimination while rationals use the generic one.
pub trait Field: Clone + Send + Sync + fmt::Debug + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + Send + Sync + fmt::Debug;

    fn config(&self) -> FieldConfig;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;

    /// `num/den` as a field element; fails when `den` vanishes in the field.
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Self::Elem> {
        let d = self.from_bigint(den);
        let inv = self.inv(&d).ok_or(Error::DivisionByZero)?;
        Ok(self.mul(&self.from_bigint(num), &inv))
    }

    /// Uniform element; prime fields only.
    fn random(&self, stream: &mut SeedStream) -> Result<Self::Elem>;

    fn to_scalar(&self, a: &Self::Elem) -> Scalar;
    fn from_scalar(&self, s: &Scalar) -> Result<Self::Elem>;

    /// Same kind of field over a different characteristic, for re-checking
    /// results obtained in this one. Rationals have none.
    fn alternate(&self) -> Option<Self>;

    /// Row-reduce `rows` in place (reduced echelon form when `reduced`),
    /// dropping zero rows. Returns pivot columns in increasing order.
    fn echelon(&self, rows: &mut Vec<Vec<Self::Elem>>, ncols: usize, reduced: bool) -> Vec<usize> {
        linalg::generic_echelon(self, rows, ncols, reduced)
    }

    /// Subtract from `v` its projection onto an RREF basis; `v` is zero on
    /// return iff it lay in the span.
    fn reduce_against(&self, basis: &[Vec<Self::Elem>], pivots: &[usize], v: &mut [Self::Elem]) {
        linalg::generic_reduce(self, basis, pivots, v)
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn fmt_elem(&self, a: &Self::Elem) -> String {
        self.to_scalar(a).to_string()
    }
}

/// GF(p) with elements stored as canonical residues in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        FieldConfig::prime(p)?;
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn config(&self) -> FieldConfig {
        FieldConfig::Prime { p: self.p }
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if (*a).is_multiple_of(self.p) {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        let r = v % BigInt::from(self.p);
        let r = if r.is_negative() { r + BigInt::from(self.p) } else { r };
        r.to_u64().expect("residue fits in u64")
    }
    fn random(&self, stream: &mut SeedStream) -> Result<u64> {
        Ok(stream.below(self.p))
    }
    fn to_scalar(&self, a: &u64) -> Scalar {
        Scalar::Prime { p: self.p, value: *a }
    }
    fn from_scalar(&self, s: &Scalar) -> Result<u64> {
        match s {
            Scalar::Prime { p, value } if *p == self.p => Ok(*value % self.p),
            Scalar::Rational(q) => self.from_ratio(q.numer(), q.denom()),
            other => Err(Error::MixedFields {
                left: self.config().describe(),
                right: other.field().describe(),
            }),
        }
    }
    fn alternate(&self) -> Option<Self> {
        let q = if self.p == RECHECK_PRIME { DEFAULT_PRIME } else { RECHECK_PRIME };
        Some(PrimeField { p: q })
    }
    fn echelon(&self, rows: &mut Vec<Vec<u64>>, ncols: usize, reduced: bool) -> Vec<usize> {
        linalg::prime_echelon(self.p, rows, ncols, reduced)
    }
    fn reduce_against(&self, basis: &[Vec<u64>], pivots: &[usize], v: &mut [u64]) {
        linalg::prime_reduce(self.p, basis, pivots, v)
    }
    fn fmt_elem(&self, a: &u64) -> String {
        a.to_string()
    }
}

/// The rational numbers, as reduced big fractions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn config(&self) -> FieldConfig {
        FieldConfig::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
    fn random(&self, _stream: &mut SeedStream) -> Result<BigRational> {
        Err(Error::SamplingUnsupported)
    }
    fn to_scalar(&self, a: &BigRational) -> Scalar {
        Scalar::Rational(a.clone())
    }
    fn from_scalar(&self, s: &Scalar) -> Result<BigRational> {
        match s {
            Scalar::Rational(q) => Ok(q.clone()),
            other => Err(Error::MixedFields {
                left: self.config().describe(),
                right: other.field().describe(),
            }),
        }
    }
    fn alternate(&self) -> Option<Self> {
        None
    }
}

/// A field element tagged with its field, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Prime { p: u64, value: u64 },
    Rational(BigRational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Scalar {
    pub fn prime(p: u64, value: i64) -> Result<Self> {
        let f = PrimeField::new(p)?;
        Ok(f.to_scalar(&f.from_i64(value)))
    }

    pub fn rational(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::Rational(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    pub fn field(&self) -> FieldConfig {
        match self {
            Scalar::Prime { p, .. } => FieldConfig::Prime { p: *p },
            Scalar::Rational(_) => FieldConfig::Rationals,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Prime { value, .. } => *value == 0,
            Scalar::Rational(q) => q.is_zero(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Prime { value, .. } => write!(f, "{value}"),
            Scalar::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

/// Exact arithmetic on tagged scalars.
pub fn scalar_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar> {
    fn apply<F: Field>(f: &F, a: &F::Elem, b: &F::Elem, op: ArithOp) -> Result<F::Elem> {
        Ok(match op {
            ArithOp::Add => f.add(a, b),
            ArithOp::Sub => f.sub(a, b),
            ArithOp::Mul => f.mul(a, b),
            ArithOp::Div => f.mul(a, &f.inv(b).ok_or(Error::DivisionByZero)?),
        })
    }
    match (a, b) {
        (Scalar::Prime { p, value: x }, Scalar::Prime { p: q, value: y }) if p == q => {
            let f = PrimeField::new(*p)?;
            let r = apply(&f, &(x % p), &(y % p), op)?;
            Ok(f.to_scalar(&r))
        }
        (Scalar::Rational(x), Scalar::Rational(y)) => {
            Ok(Scalar::Rational(apply(&Rationals, x, y, op)?))
        }
        _ => Err(Error::MixedFields { left: a.field().describe(), right: b.field().describe() }),
    }
}

/// Draw one uniform scalar from `stream`; rationals mode is rejected.
pub fn random_scalar(config: &FieldConfig, stream: &mut SeedStream) -> Result<Scalar> {
    match config {
        FieldConfig::Prime { p } => {
            let f = PrimeField::new(*p)?;
            Ok(f.to_scalar(&f.random(stream)?))
        }
        FieldConfig::Rationals => Err(Error::SamplingUnsupported),
    }
}
