//! Sparse exact multivariate polynomials over F_p.
//!
//! Monomials carry a fixed number of variables (2..=4) and a cached degree.
//! Two graded orders are provided; every lead-term computation takes the
//! order explicitly.  Term storage is kept sorted in descending graded
//! reverse-lexicographic order at all times, which makes equality, hashing
//! and iteration deterministic.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::arith::Prime;

/// Maximum number of variables in the polynomial rings we work with.
pub const MAX_VARS: usize = 4;
/// Minimum number of variables.
pub const MIN_VARS: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("number of variables {0} outside supported range {MIN_VARS}..={MAX_VARS}")]
    BadVarCount(usize),
    #[error("variable index {0} out of range for {1} variables")]
    BadVarIndex(usize, usize),
    #[error("monomials have different variable counts ({0} vs {1})")]
    VarMismatch(usize, usize),
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("the zero polynomial has no lead term")]
    ZeroLeadTerm,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

fn parse_err(pos: usize, msg: impl Into<String>) -> PolyError {
    PolyError::Parse {
        pos,
        msg: msg.into(),
    }
}

/// A monomial in at most [`MAX_VARS`] variables with cached total degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u32; MAX_VARS],
    num_vars: u8,
    degree: u32,
}

impl Monomial {
    pub fn new(exps: &[u32]) -> Result<Self, PolyError> {
        if exps.len() < MIN_VARS || exps.len() > MAX_VARS {
            return Err(PolyError::BadVarCount(exps.len()));
        }
        let mut buf = [0u32; MAX_VARS];
        buf[..exps.len()].copy_from_slice(exps);
        Ok(Monomial {
            exps: buf,
            num_vars: exps.len() as u8,
            degree: exps.iter().sum(),
        })
    }

    /// The monomial 1.
    pub fn one(num_vars: usize) -> Result<Self, PolyError> {
        Self::new(&vec![0; num_vars])
    }

    /// The monomial x_{i+1} (zero-based variable index).
    pub fn variable(i: usize, num_vars: usize) -> Result<Self, PolyError> {
        if i >= num_vars {
            return Err(PolyError::BadVarIndex(i, num_vars));
        }
        let mut exps = vec![0; num_vars];
        exps[i] = 1;
        Self::new(&exps)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars as usize
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps[..self.num_vars as usize]
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial, PolyError> {
        if self.num_vars != other.num_vars {
            return Err(PolyError::VarMismatch(self.num_vars(), other.num_vars()));
        }
        let mut exps = self.exps;
        for i in 0..self.num_vars as usize {
            exps[i] += other.exps[i];
        }
        Ok(Monomial {
            exps,
            num_vars: self.num_vars,
            degree: self.degree + other.degree,
        })
    }
}

/// A graded monomial order with variable precedence x_1 > x_2 > ... > x_m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MonomialOrder {
    /// Total degree first, ties broken lexicographically.
    GrLex,
    /// Total degree first, ties broken by reverse lexicographic comparison:
    /// the monomial whose trailing variable block is smaller wins.
    #[default]
    GrevLex,
}

impl MonomialOrder {
    pub fn name(self) -> &'static str {
        match self {
            MonomialOrder::GrLex => "gradedlex",
            MonomialOrder::GrevLex => "gradedrevlex",
        }
    }

    /// Compares two monomials, failing on mismatched variable counts.
    pub fn compare(self, a: &Monomial, b: &Monomial) -> Result<Ordering, PolyError> {
        if a.num_vars != b.num_vars {
            return Err(PolyError::VarMismatch(a.num_vars(), b.num_vars()));
        }
        Ok(self.cmp_same(a, b))
    }

    /// Comparison for monomials known to share a variable count.
    pub(crate) fn cmp_same(self, a: &Monomial, b: &Monomial) -> Ordering {
        debug_assert_eq!(a.num_vars, b.num_vars);
        match a.degree.cmp(&b.degree) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let m = a.num_vars as usize;
        match self {
            MonomialOrder::GrLex => {
                for i in 0..m {
                    match a.exps[i].cmp(&b.exps[i]) {
                        Ordering::Equal => {}
                        ord => return ord,
                    }
                }
                Ordering::Equal
            }
            MonomialOrder::GrevLex => {
                // Rightmost nonzero entry of a - b decides, with a negative
                // entry meaning a is larger.
                for i in (0..m).rev() {
                    match a.exps[i].cmp(&b.exps[i]) {
                        Ordering::Equal => {}
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                    }
                }
                Ordering::Equal
            }
        }
    }
}

/// A sparse polynomial over F_p.
///
/// Invariants: no zero coefficients are stored, monomials are distinct, and
/// terms are sorted in strictly decreasing graded-revlex order.  The zero
/// polynomial has an empty term list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    prime: Prime,
    num_vars: u8,
    terms: Vec<(Monomial, u64)>,
}

impl Polynomial {
    pub fn zero(prime: Prime, num_vars: usize) -> Result<Self, PolyError> {
        if !(MIN_VARS..=MAX_VARS).contains(&num_vars) {
            return Err(PolyError::BadVarCount(num_vars));
        }
        Ok(Polynomial {
            prime,
            num_vars: num_vars as u8,
            terms: Vec::new(),
        })
    }

    pub fn constant(prime: Prime, num_vars: usize, c: u64) -> Result<Self, PolyError> {
        let mut f = Self::zero(prime, num_vars)?;
        let c = prime.reduce(c);
        if c != 0 {
            f.terms.push((Monomial::one(num_vars)?, c));
        }
        Ok(f)
    }

    pub fn one(prime: Prime, num_vars: usize) -> Result<Self, PolyError> {
        Self::constant(prime, num_vars, 1)
    }

    /// The variable x_{i+1} (zero-based index).
    pub fn variable(prime: Prime, num_vars: usize, i: usize) -> Result<Self, PolyError> {
        let mut f = Self::zero(prime, num_vars)?;
        f.terms.push((Monomial::variable(i, num_vars)?, 1));
        Ok(f)
    }

    pub fn monomial_term(prime: Prime, mon: Monomial, c: u64) -> Self {
        let mut f = Polynomial {
            prime,
            num_vars: mon.num_vars,
            terms: Vec::new(),
        };
        let c = prime.reduce(c);
        if c != 0 {
            f.terms.push((mon, c));
        }
        f
    }

    /// Builds a polynomial from arbitrary (monomial, coefficient) pairs,
    /// reducing coefficients, merging duplicates and dropping zeros.
    pub fn from_terms<I>(prime: Prime, num_vars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Monomial, u64)>,
    {
        let mut f = Self::zero(prime, num_vars)?;
        let mut raw: Vec<(Monomial, u64)> = Vec::new();
        for (mon, c) in terms {
            if mon.num_vars() != num_vars {
                return Err(PolyError::VarMismatch(mon.num_vars(), num_vars));
            }
            raw.push((mon, c));
        }
        f.terms = normalize(prime, raw);
        Ok(f)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars as usize
    }

    pub fn terms(&self) -> &[(Monomial, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// Some(d) when every term has degree d (the zero polynomial is
    /// homogeneous of every degree and reports None).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.terms.first()?.0.degree();
        if self.terms.iter().all(|(m, _)| m.degree() == d) {
            Some(d)
        } else {
            None
        }
    }

    pub fn coeff_of(&self, mon: &Monomial) -> u64 {
        self.terms
            .iter()
            .find(|(m, _)| m == mon)
            .map(|&(_, c)| c)
            .unwrap_or(0)
    }

    fn same_ring(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.prime != other.prime || self.num_vars != other.num_vars {
            return Err(PolyError::RingMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.same_ring(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.same_ring(other)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.same_ring(other)?;
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mon = ma.mul(mb).expect("same ring");
                raw.push((mon, self.prime.mul(*ca, *cb)));
            }
        }
        Ok(Polynomial {
            prime: self.prime,
            num_vars: self.num_vars,
            terms: normalize(self.prime, raw),
        })
    }

    pub fn scalar_mul(&self, c: u64) -> Polynomial {
        let c = self.prime.reduce(c);
        if c == 0 {
            return Polynomial {
                prime: self.prime,
                num_vars: self.num_vars,
                terms: Vec::new(),
            };
        }
        let terms = self
            .terms
            .iter()
            .map(|&(m, a)| (m, self.prime.mul(a, c)))
            .collect();
        Polynomial {
            prime: self.prime,
            num_vars: self.num_vars,
            terms,
        }
    }

    pub fn neg(&self) -> Polynomial {
        self.scalar_mul(self.prime.p() - 1)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc =
            Polynomial::one(self.prime, self.num_vars()).expect("ring validated at construction");
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base).expect("same ring");
            }
        }
        acc
    }

    /// Merge of two sorted term lists (subtract flips the sign of `other`).
    fn merge(&self, other: &Polynomial, subtract: bool) -> Polynomial {
        let ord = MonomialOrder::GrevLex;
        let p = self.prime;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let take_left = match (self.terms.get(i), other.terms.get(j)) {
                (Some((ma, _)), Some((mb, _))) => match ord.cmp_same(ma, mb) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => {
                        let (m, ca) = self.terms[i];
                        let cb = other.terms[j].1;
                        let c = if subtract {
                            p.sub(ca, cb)
                        } else {
                            p.add(ca, cb)
                        };
                        if c != 0 {
                            out.push((m, c));
                        }
                        i += 1;
                        j += 1;
                        continue;
                    }
                },
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            if take_left {
                out.push(self.terms[i]);
                i += 1;
            } else {
                let (m, c) = other.terms[j];
                out.push((m, if subtract { p.neg(c) } else { c }));
                j += 1;
            }
        }
        Polynomial {
            prime: self.prime,
            num_vars: self.num_vars,
            terms: out,
        }
    }

    /// The maximal term of a nonzero polynomial under the given order.
    pub fn lead_term(&self, order: MonomialOrder) -> Result<(Monomial, u64), PolyError> {
        let mut best: Option<(Monomial, u64)> = None;
        for &(m, c) in &self.terms {
            match &best {
                None => best = Some((m, c)),
                Some((bm, _)) => {
                    if order.cmp_same(&m, bm) == Ordering::Greater {
                        best = Some((m, c));
                    }
                }
            }
        }
        best.ok_or(PolyError::ZeroLeadTerm)
    }

    pub fn lead_monomial(&self, order: MonomialOrder) -> Result<Monomial, PolyError> {
        self.lead_term(order).map(|(m, _)| m)
    }

    /// Parses the canonical text format, e.g. `x2^2 + 3*x1*x3 + 4*x2*x3`.
    ///
    /// Grammar: `poly := term ('+' term)*`, `term := coeff ('*' varpow)* |
    /// varpow ('*' varpow)*`, `varpow := 'x'INDEX('^'EXP)?`.  Coefficients
    /// must be canonical residues in [0, p); variable indices are 1-based.
    /// Whitespace between tokens is ignored.
    pub fn parse(src: &str, prime: Prime, num_vars: usize) -> Result<Polynomial, PolyError> {
        Parser {
            src: src.as_bytes(),
            pos: 0,
            prime,
            num_vars,
        }
        .parse()
    }
}

fn normalize(prime: Prime, mut raw: Vec<(Monomial, u64)>) -> Vec<(Monomial, u64)> {
    let ord = MonomialOrder::GrevLex;
    raw.sort_by(|a, b| ord.cmp_same(&b.0, &a.0));
    let mut out: Vec<(Monomial, u64)> = Vec::with_capacity(raw.len());
    for (m, c) in raw {
        let c = prime.reduce(c);
        match out.last_mut() {
            Some((last, acc)) if *last == m => *acc = prime.add(*acc, c),
            _ => out.push((m, c)),
        }
    }
    out.retain(|&(_, c)| c != 0);
    out
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("polynomial ring mismatch")
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("polynomial ring mismatch")
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("polynomial ring mismatch")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (mon, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if *c != 1 || mon.degree() == 0 {
                factors.push(c.to_string());
            }
            for i in 0..mon.num_vars() {
                let e = mon.exp(i);
                if e == 1 {
                    factors.push(format!("x{}", i + 1));
                } else if e > 1 {
                    factors.push(format!("x{}^{}", i + 1, e));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    prime: Prime,
    num_vars: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<(usize, u64), PolyError> {
        self.skip_ws();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(b) = self.src.get(self.pos) {
            if b.is_ascii_digit() {
                value = value
                    .checked_mul(10)
                    .and_then(|v| v.checked_add((b - b'0') as u64))
                    .ok_or_else(|| parse_err(start, "number too large"))?;
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(parse_err(start, "expected a number"));
        }
        Ok((start, value))
    }

    /// `x INDEX (^ EXP)?` -> (variable index, exponent)
    fn varpow(&mut self) -> Result<(usize, u32), PolyError> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) != Some(&b'x') {
            return Err(parse_err(start, "expected a variable"));
        }
        self.pos += 1;
        let (ipos, index) = self.number()?;
        if index == 0 || index as usize > self.num_vars {
            return Err(parse_err(
                ipos,
                format!(
                    "unknown variable x{index} (ring has {} variables)",
                    self.num_vars
                ),
            ));
        }
        let mut exp: u32 = 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let (epos, e) = self.number()?;
            exp = u32::try_from(e).map_err(|_| parse_err(epos, "exponent too large"))?;
        }
        Ok((index as usize - 1, exp))
    }

    fn term(&mut self) -> Result<(Monomial, u64), PolyError> {
        self.skip_ws();
        let mut coeff: u64 = 1;
        let mut exps = vec![0u32; self.num_vars];
        match self.peek() {
            Some(b) if b.is_ascii_digit() => {
                let (cpos, c) = self.number()?;
                if c >= self.prime.p() {
                    return Err(parse_err(
                        cpos,
                        format!(
                            "coefficient {c} is not a canonical residue mod {}",
                            self.prime.p()
                        ),
                    ));
                }
                coeff = c;
            }
            Some(b'x') => {
                let (i, e) = self.varpow()?;
                exps[i] += e;
            }
            _ => return Err(parse_err(self.pos, "expected a term")),
        }
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let (i, e) = self.varpow()?;
            exps[i] += e;
        }
        Ok((Monomial::new(&exps)?, coeff))
    }

    fn parse(mut self) -> Result<Polynomial, PolyError> {
        let mut terms = vec![self.term()?];
        while let Some(b) = self.peek() {
            if b == b'+' {
                self.pos += 1;
                terms.push(self.term()?);
            } else {
                return Err(parse_err(
                    self.pos,
                    format!("unexpected character '{}'", b as char),
                ));
            }
        }
        Polynomial::from_terms(self.prime, self.num_vars, terms)
    }
}
