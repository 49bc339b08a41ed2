//! The cyclic-group action on the polynomial ring and the operator calculus
//! built on Δ = σ − ι.
//!
//! The generator σ acts by a unipotent linear substitution on the variables;
//! all higher structure (powers of Δ, weights, relative transfers and norms)
//! is derived from that substitution.

use thiserror::Error;

use crate::arith::Prime;
use crate::poly::{Monomial, PolyError, Polynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error("sigma image of x{0} is not a homogeneous linear form")]
    NotLinear(usize),
    #[error("substitution matrix is not unipotent upper-triangular")]
    NotUnipotent,
    #[error("sigma does not have order exactly q = {0}")]
    NotFaithful(u64),
    #[error("expected {expected} sigma images, got {got}")]
    WrongImageCount { expected: usize, got: usize },
    #[error("polynomial does not live in the ring acted on")]
    RingMismatch,
    #[error("subgroup exponent {0} exceeds k = {1}")]
    SubgroupOutOfRange(u32, u32),
    #[error("input is not invariant under the subgroup")]
    NotSubgroupInvariant,
    #[error("the weight of the zero polynomial is undefined")]
    ZeroWeight,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The subgroup H = <sigma^{p^m}> of index p^m, named by the exponent m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subgroup {
    index_exponent: u32,
}

impl Subgroup {
    /// The whole group (index 1).
    pub fn full() -> Self {
        Subgroup { index_exponent: 0 }
    }

    pub fn index_exponent(self) -> u32 {
        self.index_exponent
    }
}

/// A faithful unipotent action of the cyclic group C_q on k[x_1..x_m].
///
/// Immutable after construction; all operations are pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicAction {
    prime: Prime,
    num_vars: usize,
    /// Row i holds the coefficients of sigma(x_{i+1}) in the variables.
    matrix: Vec<Vec<u64>>,
    sigma_images: Vec<Polynomial>,
}

impl CyclicAction {
    /// Builds the action from the images sigma(x_i), validating that each is
    /// a linear form, that the matrix is unipotent with sigma(x_i) - x_i
    /// supported on later variables, and that sigma has order exactly q.
    pub fn new(prime: Prime, sigma_images: Vec<Polynomial>) -> Result<Self, ActionError> {
        let num_vars = sigma_images.len();
        if sigma_images.is_empty() {
            return Err(ActionError::WrongImageCount {
                expected: 1,
                got: 0,
            });
        }
        let mut matrix = vec![vec![0u64; num_vars]; num_vars];
        for (i, f) in sigma_images.iter().enumerate() {
            if f.prime() != prime || f.num_vars() != num_vars {
                return Err(ActionError::RingMismatch);
            }
            if f.is_zero() || f.homogeneous_degree() != Some(1) {
                return Err(ActionError::NotLinear(i + 1));
            }
            for (mon, c) in f.terms() {
                let j = (0..num_vars).find(|&j| mon.exp(j) == 1).expect("linear");
                matrix[i][j] = *c;
            }
        }
        for i in 0..num_vars {
            for j in 0..=i {
                let expected = if i == j { 1 } else { 0 };
                if matrix[i][j] != expected {
                    return Err(ActionError::NotUnipotent);
                }
            }
        }
        let action = CyclicAction {
            prime,
            num_vars,
            matrix,
            sigma_images,
        };
        // sigma^q = 1 and sigma^{q/p} != 1 (faithfulness).
        let q = prime.q();
        if action.matrix_power(q) != identity(num_vars) {
            return Err(ActionError::NotFaithful(q));
        }
        if action.matrix_power(q / prime.p()) == identity(num_vars) {
            return Err(ActionError::NotFaithful(q));
        }
        Ok(action)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn sigma_images(&self) -> &[Polynomial] {
        &self.sigma_images
    }

    /// Matrix of sigma^power, rows = images of the variables.
    pub fn matrix_power(&self, power: u64) -> Vec<Vec<u64>> {
        let mut acc = identity(self.num_vars);
        for _ in 0..power {
            acc = mat_mul(self.prime, &acc, &self.matrix);
        }
        acc
    }

    /// Applies sigma^power to f by simultaneous substitution of the
    /// variables.  A degree-preserving ring homomorphism.
    pub fn act(&self, power: i64, f: &Polynomial) -> Result<Polynomial, ActionError> {
        if f.prime() != self.prime || f.num_vars() != self.num_vars {
            return Err(ActionError::RingMismatch);
        }
        let q = self.prime.q();
        let power = power.rem_euclid(q as i64) as u64;
        if power == 0 || f.is_zero() {
            return Ok(f.clone());
        }
        let mat = self.matrix_power(power);
        // Linear forms substituted for the variables.
        let forms: Vec<Polynomial> = (0..self.num_vars)
            .map(|i| {
                let terms = (0..self.num_vars).filter_map(|j| {
                    if mat[i][j] == 0 {
                        None
                    } else {
                        Some((
                            Monomial::variable(j, self.num_vars).expect("in range"),
                            mat[i][j],
                        ))
                    }
                });
                Polynomial::from_terms(self.prime, self.num_vars, terms).expect("valid ring")
            })
            .collect();
        // Power tables, built lazily up to the largest exponent in f.
        let mut powers: Vec<Vec<Polynomial>> = (0..self.num_vars)
            .map(|_| vec![Polynomial::one(self.prime, self.num_vars).expect("valid ring")])
            .collect();
        let mut out = Polynomial::zero(self.prime, self.num_vars)?;
        for (mon, c) in f.terms() {
            let mut term = Polynomial::constant(self.prime, self.num_vars, *c)?;
            for i in 0..self.num_vars {
                let e = mon.exp(i) as usize;
                while powers[i].len() <= e {
                    let next = powers[i].last().unwrap().try_mul(&forms[i])?;
                    powers[i].push(next);
                }
                if e > 0 {
                    term = term.try_mul(&powers[i][e])?;
                }
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    /// Δ(f) = σ(f) − f.
    pub fn delta(&self, f: &Polynomial) -> Result<Polynomial, ActionError> {
        Ok(&self.act(1, f)? - f)
    }

    /// Δ^n(f), computed by n-fold iterated first differences.
    pub fn delta_pow(&self, n: u32, f: &Polynomial) -> Result<Polynomial, ActionError> {
        let mut g = f.clone();
        for _ in 0..n {
            if g.is_zero() {
                return Ok(g);
            }
            g = self.delta(&g)?;
        }
        Ok(g)
    }

    /// True when f is fixed by the whole group.
    pub fn is_invariant(&self, f: &Polynomial) -> Result<bool, ActionError> {
        Ok(self.delta(f)?.is_zero())
    }

    /// The weight of a nonzero f: the least i > 0 with Δ^i(f) = 0.
    pub fn weight(&self, f: &Polynomial) -> Result<u64, ActionError> {
        if f.is_zero() {
            return Err(ActionError::ZeroWeight);
        }
        let mut g = self.delta(f)?;
        let mut i = 1u64;
        while !g.is_zero() {
            g = self.delta(&g)?;
            i += 1;
            debug_assert!(i <= self.prime.q(), "weight exceeded the group order");
        }
        Ok(i)
    }

    /// The subgroup of index p^index_exponent.
    pub fn subgroup(&self, index_exponent: u32) -> Result<Subgroup, ActionError> {
        if index_exponent > self.prime.k() {
            return Err(ActionError::SubgroupOutOfRange(
                index_exponent,
                self.prime.k(),
            ));
        }
        Ok(Subgroup { index_exponent })
    }

    /// The trivial subgroup (index q).
    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup {
            index_exponent: self.prime.k(),
        }
    }

    /// Index [G : H] = p^m.
    pub fn subgroup_index(&self, h: Subgroup) -> u64 {
        self.prime.p().pow(h.index_exponent)
    }

    /// True when f is fixed by H = <sigma^{p^m}>.
    pub fn is_subgroup_invariant(&self, h: Subgroup, f: &Polynomial) -> Result<bool, ActionError> {
        let gen_power = self.subgroup_index(h) as i64;
        Ok(self.act(gen_power, f)? == *f)
    }

    fn check_subgroup(&self, h: Subgroup, f: &Polynomial) -> Result<u64, ActionError> {
        if h.index_exponent > self.prime.k() {
            return Err(ActionError::SubgroupOutOfRange(
                h.index_exponent,
                self.prime.k(),
            ));
        }
        if !self.is_subgroup_invariant(h, f)? {
            return Err(ActionError::NotSubgroupInvariant);
        }
        Ok(self.subgroup_index(h))
    }

    /// Relative transfer Tr^G_H(f) = Σ_t t·f over the coset representatives
    /// {σ^0, ..., σ^{[G:H]-1}}.  The input must be H-invariant.
    pub fn transfer(&self, h: Subgroup, f: &Polynomial) -> Result<Polynomial, ActionError> {
        let index = self.check_subgroup(h, f)?;
        let mut acc = Polynomial::zero(self.prime, self.num_vars)?;
        for t in 0..index {
            acc = acc.try_add(&self.act(t as i64, f)?)?;
        }
        Ok(acc)
    }

    /// Relative norm N^G_H(f) = Π_t t·f over the same coset representatives.
    /// The input must be H-invariant.
    pub fn norm(&self, h: Subgroup, f: &Polynomial) -> Result<Polynomial, ActionError> {
        let index = self.check_subgroup(h, f)?;
        let mut acc = Polynomial::one(self.prime, self.num_vars)?;
        for t in 0..index {
            acc = acc.try_mul(&self.act(t as i64, f)?)?;
        }
        Ok(acc)
    }
}

fn identity(n: usize) -> Vec<Vec<u64>> {
    (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect()
}

fn mat_mul(prime: Prime, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut out = vec![vec![0u64; n]; n];
    for i in 0..n {
        for t in 0..n {
            if a[i][t] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] = prime.add(out[i][j], prime.mul(a[i][t], b[t][j]));
            }
        }
    }
    out
}

/// The standard single-Jordan-block action on m variables:
/// sigma(x_i) = x_i + x_{i+1}, sigma(x_m) = x_m.
pub fn jordan_block_action(prime: Prime, num_vars: usize) -> Result<CyclicAction, ActionError> {
    let images = (0..num_vars)
        .map(|i| {
            let xi = Polynomial::variable(prime, num_vars, i)?;
            if i + 1 < num_vars {
                Ok(&xi + &Polynomial::variable(prime, num_vars, i + 1)?)
            } else {
                Ok(xi)
            }
        })
        .collect::<Result<Vec<_>, PolyError>>()?;
    CyclicAction::new(prime, images)
}

/// The V2 ⊕ V2 block action on four variables:
/// sigma(x_1) = x_1 + x_3, sigma(x_2) = x_2 + x_4, x_3 and x_4 fixed.
pub fn block_v2v2_action(prime: Prime) -> Result<CyclicAction, ActionError> {
    let m = 4;
    let x = |i| Polynomial::variable(prime, m, i);
    let images = vec![&x(0)? + &x(2)?, &x(1)? + &x(3)?, x(2)?, x(3)?];
    CyclicAction::new(prime, images)
}
