//! Exact arithmetic in the fraction field of `GF(2)[x_1, ..., x_k]`.
//!
//! Polynomials are sets of monomials (coefficients live in GF(2), so a
//! monomial is either present or absent). Fractions are not reduced to lowest
//! terms; equality is decided by cross-multiplication. A cheap normalization
//! divides numerator and denominator by their common monomial content to
//! bound growth.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul};

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VarId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("substitution sends a denominator to zero")]
    SubstitutionKillsDenominator,
    #[error("no admissible evaluation point found (denominator vanished {0} times)")]
    BadEvaluationPoint(u32),
    #[error("unknown variable id {0}")]
    UnknownVariable(VarId),
}

/// Registry of formal variables for one diagram (or one merged universe).
/// Ids are dense; display names are user strings such as `x3` or `y_L`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarRegistry {
    names: Vec<String>,
}

impl VarRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self, name: impl Into<String>) -> VarId {
        let name = name.into();
        assert!(
            !self.names.contains(&name),
            "variable name collision: {name}"
        );
        self.names.push(name);
        (self.names.len() - 1) as VarId
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name).map(|i| i as VarId)
    }

    /// Concatenate two registries into one universe. Name collisions are an
    /// error since merged diagrams must keep their arc labels distinct.
    pub fn merged(a: &VarRegistry, b: &VarRegistry) -> Result<(VarRegistry, u32), String> {
        let mut out = a.clone();
        for n in &b.names {
            if out.names.contains(n) {
                return Err(format!("variable name collision on merge: {n}"));
            }
            out.names.push(n.clone());
        }
        Ok((out, a.names.len() as u32))
    }
}

/// A monomial: map from variable id to positive exponent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Monomial {
    exps: Vec<(VarId, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: VarId) -> Self {
        Monomial { exps: vec![(v, 1)] }
    }

    pub fn from_pairs(mut pairs: Vec<(VarId, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort();
        let mut exps: Vec<(VarId, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            if let Some(last) = exps.last_mut() {
                if last.0 == v {
                    last.1 += e;
                    continue;
                }
            }
            exps.push((v, e));
        }
        Monomial { exps }
    }

    pub fn exponents(&self) -> &[(VarId, u32)] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            match self.exps[i].0.cmp(&other.exps[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.exps[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.exps[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((self.exps[i].0, self.exps[i].1 + other.exps[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.exps[i..]);
        out.extend_from_slice(&other.exps[j..]);
        Monomial { exps: out }
    }

    /// Componentwise min with another monomial (gcd of monomials).
    fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            match self.exps[i].0.cmp(&other.exps[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push((self.exps[i].0, self.exps[i].1.min(other.exps[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial { exps: out }
    }

    /// Divide by a monomial known to divide self.
    fn div_exact(&self, other: &Monomial) -> Monomial {
        let mut m: BTreeMap<VarId, i64> = self.exps.iter().map(|&(v, e)| (v, e as i64)).collect();
        for &(v, e) in &other.exps {
            *m.get_mut(&v).expect("div_exact: missing variable") -= e as i64;
        }
        Monomial {
            exps: m
                .into_iter()
                .filter(|&(_, e)| e > 0)
                .map(|(v, e)| (v, e as u32))
                .collect(),
        }
    }

    pub fn max_var(&self) -> Option<VarId> {
        self.exps.last().map(|&(v, _)| v)
    }
}

/// A polynomial over GF(2): a finite set of monomials. Adding a monomial
/// twice removes it; zero is the empty set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Polynomial {
            terms: vec![Monomial::one()],
        }
    }

    pub fn var(v: VarId) -> Self {
        Polynomial {
            terms: vec![Monomial::var(v)],
        }
    }

    pub fn from_monomials(mut ms: Vec<Monomial>) -> Self {
        ms.sort();
        let mut terms: Vec<Monomial> = Vec::with_capacity(ms.len());
        for m in ms {
            if terms.last() == Some(&m) {
                terms.pop();
            } else {
                terms.push(m);
            }
        }
        Polynomial { terms }
    }

    /// Sum of single variables, the usual shape of a circle weight.
    pub fn sum_of_vars(vars: impl IntoIterator<Item = VarId>) -> Self {
        Self::from_monomials(vars.into_iter().map(Monomial::var).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        // symmetric difference of sorted term lists
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].cmp(&other.terms[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Polynomial { terms: out }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut prods = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                prods.push(a.mul(b));
            }
        }
        Polynomial::from_monomials(prods)
    }

    /// Monomial content: gcd of all terms.
    fn content(&self) -> Option<Monomial> {
        let mut it = self.terms.iter();
        let mut g = it.next()?.clone();
        for m in it {
            g = g.gcd(m);
            if g.exps.is_empty() {
                break;
            }
        }
        Some(g)
    }

    fn div_content(&self, c: &Monomial) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|m| m.div_exact(c)).collect(),
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.terms.iter().flat_map(|m| m.exps.iter().map(|&(v, _)| v))
    }

    pub fn max_var(&self) -> Option<VarId> {
        self.terms.iter().filter_map(|m| m.max_var()).max()
    }

    pub fn substitute(&self, s: &Substitution) -> Result<Polynomial, FieldError> {
        let mut acc = Polynomial::zero();
        for m in &self.terms {
            let mut term = Polynomial::one();
            for &(v, e) in &m.exps {
                let img = s.image(v)?;
                for _ in 0..e {
                    term = term.mul(img);
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    pub fn eval(&self, point: &[Gf2e]) -> Result<Gf2e, FieldError> {
        let mut acc = Gf2e(0);
        for m in &self.terms {
            let mut t = Gf2e::one();
            for &(v, e) in &m.exps {
                let x = *point
                    .get(v as usize)
                    .ok_or(FieldError::UnknownVariable(v))?;
                t = t * x.pow(e as u64);
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    pub fn display<'a>(&'a self, reg: &'a VarRegistry) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, reg }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    reg: &'a VarRegistry,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.poly.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if m.exps.is_empty() {
                write!(f, "1")?;
            } else {
                for (j, &(v, e)) in m.exps.iter().enumerate() {
                    if j > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{}", self.reg.name(v))?;
                    if e > 1 {
                        write!(f, "^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Element of the fraction field. Denominator is always nonzero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(RationalFunction { num, den }.normalized())
    }

    pub fn var(v: VarId) -> Self {
        Self::from_poly(Polynomial::var(v))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    /// Divide num and den by their common monomial content.
    fn normalized(self) -> Self {
        if self.num.is_zero() {
            return RationalFunction {
                num: Polynomial::zero(),
                den: Polynomial::one(),
            };
        }
        let cn = self.num.content().expect("nonzero");
        let cd = self.den.content().expect("den nonzero");
        let g = cn.gcd(&cd);
        if g.exps.is_empty() {
            return self;
        }
        RationalFunction {
            num: self.num.div_content(&g),
            den: self.den.div_content(&g),
        }
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.num.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(RationalFunction {
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    pub fn substitute(&self, s: &Substitution) -> Result<Self, FieldError> {
        let num = self.num.substitute(s)?;
        let den = self.den.substitute(s)?;
        if den.is_zero() {
            return Err(FieldError::SubstitutionKillsDenominator);
        }
        Ok(RationalFunction { num, den }.normalized())
    }

    /// Evaluate at a point of GF(2^64). Errors if the denominator vanishes.
    pub fn eval(&self, point: &[Gf2e]) -> Result<Gf2e, FieldError> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(FieldError::BadEvaluationPoint(1));
        }
        Ok(self.num.eval(point)? * d.inv().expect("nonzero"))
    }

    /// Shift every variable id by `offset` (used when merging universes).
    pub fn shift_vars(&self, offset: u32) -> Self {
        let shift_poly = |p: &Polynomial| Polynomial {
            terms: p
                .terms
                .iter()
                .map(|m| Monomial {
                    exps: m.exps.iter().map(|&(v, e)| (v + offset, e)).collect(),
                })
                .collect(),
        };
        RationalFunction {
            num: shift_poly(&self.num),
            den: shift_poly(&self.den),
        }
    }

    pub fn display<'a>(&'a self, reg: &'a VarRegistry) -> RatDisplay<'a> {
        RatDisplay { rf: self, reg }
    }
}

pub struct RatDisplay<'a> {
    rf: &'a RationalFunction,
    reg: &'a VarRegistry,
}

impl fmt::Display for RatDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rf.den == Polynomial::one() {
            write!(f, "{}", self.rf.num.display(self.reg))
        } else {
            write!(
                f,
                "{} / {}",
                self.rf.num.display(self.reg),
                self.rf.den.display(self.reg)
            )
        }
    }
}

impl PartialEq for RationalFunction {
    /// Cross-multiplication equality; no gcd reduction required.
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for RationalFunction {}

impl Add for RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: RationalFunction) -> RationalFunction {
        &self + &rhs
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        let den = self.den.mul(&rhs.den);
        RationalFunction { num, den }.normalized()
    }
}

impl Mul for RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: RationalFunction) -> RationalFunction {
        &self * &rhs
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: self.num.mul(&rhs.num),
            den: self.den.mul(&rhs.den),
        }
        .normalized()
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self * &rhs.inv().expect("division by zero")
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }
}

/// A total assignment of polynomials to source variables.
#[derive(Debug, Clone, Default)]
pub struct Substitution {
    assignment: BTreeMap<VarId, Polynomial>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identity on the first `k` variables.
    pub fn identity(k: u32) -> Self {
        let mut s = Self::new();
        for v in 0..k {
            s.assign(v, Polynomial::var(v));
        }
        s
    }

    pub fn assign(&mut self, v: VarId, p: Polynomial) -> &mut Self {
        self.assignment.insert(v, p);
        self
    }

    pub fn image(&self, v: VarId) -> Result<&Polynomial, FieldError> {
        self.assignment.get(&v).ok_or(FieldError::UnknownVariable(v))
    }

    /// Composition: apply `self` first, then `after`.
    pub fn then(&self, after: &Substitution) -> Result<Substitution, FieldError> {
        let mut out = Substitution::new();
        for (&v, p) in &self.assignment {
            out.assign(v, p.substitute(after)?);
        }
        Ok(out)
    }
}

/// GF(2^64) with the irreducible polynomial x^64 + x^4 + x^3 + x + 1.
/// Used for randomized zero and rank certification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gf2e(pub u64);

impl Gf2e {
    pub fn random(rng: &mut impl Rng) -> Self {
        Gf2e(rng.gen())
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Gf2e(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn inv(self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            // a^(2^64 - 2)
            Some(self.pow(u64::MAX - 1))
        }
    }
}

impl Add for Gf2e {
    type Output = Gf2e;
    fn add(self, rhs: Gf2e) -> Gf2e {
        Gf2e(self.0 ^ rhs.0)
    }
}

impl Mul for Gf2e {
    type Output = Gf2e;
    fn mul(self, rhs: Gf2e) -> Gf2e {
        // carryless multiply
        let mut acc: u128 = 0;
        let a = self.0 as u128;
        let mut b = rhs.0;
        let mut shift = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a << shift;
            }
            b >>= 1;
            shift += 1;
        }
        // reduce modulo x^64 + x^4 + x^3 + x + 1
        let mut hi = (acc >> 64) as u64;
        let mut lo = acc as u64;
        for _ in 0..2 {
            if hi == 0 {
                break;
            }
            let h = hi as u128;
            let folded = (h << 4) ^ (h << 3) ^ (h << 1) ^ h;
            hi = (folded >> 64) as u64;
            lo ^= folded as u64;
        }
        Gf2e(lo)
    }
}

impl Zero for Gf2e {
    fn zero() -> Self {
        Gf2e(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Gf2e {
    fn one() -> Self {
        Gf2e(1)
    }
}

/// The scalar interface the linear algebra is generic over: the exact
/// rational-function field and GF(2^64) both implement it.
pub trait Field: Clone + PartialEq + Zero + One {
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn inv_ref(&self) -> Option<Self>;
}

impl Field for RationalFunction {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn inv_ref(&self) -> Option<Self> {
        self.inv().ok()
    }
}

impl Field for Gf2e {
    fn add_ref(&self, other: &Self) -> Self {
        *self + *other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        *self * *other
    }
    fn inv_ref(&self) -> Option<Self> {
        self.inv()
    }
}

/// Dense matrix over a field, row major.
#[derive(Debug, Clone)]
pub struct Matrix<K: Field> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<K>,
}

impl<K: Field> Matrix<K> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![K::zero(); rows * cols],
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &K {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: K) {
        self.data[r * self.cols + c] = v;
    }

    /// Rank by Gaussian elimination. Pivot tests use the field's exact zero
    /// test, so this is exact over `RationalFunction`.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            let mut pivot = None;
            for r in rank..rows {
                if !m[r * cols + col].is_zero() {
                    pivot = Some(r);
                    break;
                }
            }
            let Some(p) = pivot else { continue };
            m.swap_chunks(p, rank, cols);
            let inv = m[rank * cols + col].inv_ref().expect("nonzero pivot");
            for r in 0..rows {
                if r == rank || m[r * cols + col].is_zero() {
                    continue;
                }
                let factor = m[r * cols + col].mul_ref(&inv);
                for c in col..cols {
                    let sub = m[rank * cols + c].mul_ref(&factor);
                    m[r * cols + c] = m[r * cols + c].add_ref(&sub);
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }
}

trait SwapChunks {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize);
}

impl<K> SwapChunks for Vec<K> {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize) {
        if a == b {
            return;
        }
        for c in 0..width {
            self.swap(a * width + c, b * width + c);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMode {
    Exact,
    Randomized { seed: u64 },
}

/// Rank of a rational-function matrix. Randomized mode evaluates all entries
/// at a shared random point of GF(2^64) (retrying when a denominator
/// vanishes) and computes the rank there; this lower-bounds the exact rank
/// and equals it with probability at least 1 - deg/2^64 per trial.
pub fn rank(m: &Matrix<RationalFunction>, mode: RankMode) -> Result<usize, FieldError> {
    match mode {
        RankMode::Exact => Ok(m.rank()),
        RankMode::Randomized { seed } => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let nvars = m
                .data
                .iter()
                .filter_map(|x| x.num.max_var().max(x.den.max_var()))
                .max()
                .map(|v| v as usize + 1)
                .unwrap_or(0);
            const MAX_RETRIES: u32 = 64;
            'retry: for _ in 0..MAX_RETRIES {
                let point: Vec<Gf2e> = (0..nvars).map(|_| Gf2e::random(&mut rng)).collect();
                let mut ev = Matrix::zero(m.rows, m.cols);
                for r in 0..m.rows {
                    for c in 0..m.cols {
                        match m.at(r, c).eval(&point) {
                            Ok(x) => ev.set(r, c, x),
                            Err(_) => continue 'retry,
                        }
                    }
                }
                return Ok(ev.rank());
            }
            Err(FieldError::BadEvaluationPoint(MAX_RETRIES))
        }
    }
}
