//! The four certified case families and the kernel/covariant dictionary.
//!
//! Each case bundles a unipotent cyclic action, a homogeneous system of
//! parameters, the secondary invariants that generate the invariant ring
//! freely over it, and the explicit candidate generators for the kernel
//! modules K_n = ker(Δ^n).  The map Ξ sends kernel elements to covariants
//! with values in the n-dimensional indecomposable V_n; a direct slice
//! computation of the covariant module provides the independent oracle for
//! that identification.

use std::sync::Arc;

use thiserror::Error;

use crate::action::{block_v2v2_action, jordan_block_action, ActionError, CyclicAction, Subgroup};
use crate::arith::{binom_mod, ArithError, Prime};
use crate::hilbert::{self, HilbertError, HilbertNumerator, RankS, SsubalgReport, TruncatedSeries};
use crate::poly::{Monomial, MonomialOrder, PolyError, Polynomial};
use crate::slices::{
    monomial_basis, sigma_matrix, FpMatrix, SliceCache, SliceError, SubspaceSlice,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CaseError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("the three-variable odd case needs an odd prime, got {0}")]
    EvenPrime(u64),
    #[error("n = {n} outside the valid range 1..={max}")]
    BadN { n: u32, max: u64 },
    #[error("constructed polynomial `{0}` is not invariant")]
    NotInvariant(String),
    #[error("hsop degree product {product} / q = {q} does not match {count} secondary generators")]
    RankMismatch { product: u64, q: u64, count: usize },
    #[error("polynomial `{0}` does not lie in the kernel of Δ^{1}")]
    NotInKernel(String, u32),
    #[error("covariant has {got} components, expected {want}")]
    WrongComponentCount { got: usize, want: usize },
    #[error("lemma checks are exhaustive only for p <= 7, got {0}")]
    LemmaPrimeTooLarge(u64),
    #[error("lemma {0} is not defined for this case kind")]
    LemmaCaseMismatch(&'static str),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Slice(#[from] SliceError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// Which of the four certified representations is being built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// C_p on the 2-dimensional indecomposable.
    V2 { p: u64 },
    /// C_p on the 3-dimensional indecomposable, p odd.
    V3Odd { p: u64 },
    /// C_p on a direct sum of two 2-dimensional indecomposables.
    V2V2 { p: u64 },
    /// C_4 on the 3-dimensional indecomposable over F_2.
    V3C4,
}

impl CaseKind {
    pub fn name(self) -> &'static str {
        match self {
            CaseKind::V2 { .. } => "v2",
            CaseKind::V3Odd { .. } => "v3",
            CaseKind::V2V2 { .. } => "v2v2",
            CaseKind::V3C4 => "v3c4",
        }
    }

    pub fn prime(self) -> Result<Prime, CaseError> {
        match self {
            CaseKind::V2 { p } | CaseKind::V2V2 { p } => Ok(Prime::new(p, 1)?),
            CaseKind::V3Odd { p } => {
                if p == 2 {
                    return Err(CaseError::EvenPrime(p));
                }
                Ok(Prime::new(p, 1)?)
            }
            CaseKind::V3C4 => Ok(Prime::new(2, 2)?),
        }
    }

    pub fn num_vars(self) -> usize {
        match self {
            CaseKind::V2 { .. } => 2,
            CaseKind::V3Odd { .. } | CaseKind::V3C4 => 3,
            CaseKind::V2V2 { .. } => 4,
        }
    }

    /// Largest admissible module parameter n.
    pub fn max_n(self) -> Result<u64, CaseError> {
        match self {
            CaseKind::V3C4 => Ok(4),
            _ => Ok(self.prime()?.p()),
        }
    }
}

/// A case kind together with the target indecomposable dimension n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseSpec {
    kind: CaseKind,
    n: u32,
}

impl CaseSpec {
    pub fn new(kind: CaseKind, n: u32) -> Result<Self, CaseError> {
        let max = kind.max_n()?;
        if n == 0 || u64::from(n) > max {
            return Err(CaseError::BadN { n, max });
        }
        Ok(CaseSpec { kind, n })
    }

    pub fn kind(&self) -> CaseKind {
        self.kind
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn prime(&self) -> Prime {
        self.kind.prime().expect("validated at construction")
    }

    /// Closed-form rank and s-invariant of K_n over the hsop algebra.
    pub fn expected_rank_s(&self) -> RankS {
        let n = u64::from(self.n);
        match self.kind {
            CaseKind::V2 { .. } => RankS {
                r: n,
                s: n * (n - 1) / 2,
            },
            CaseKind::V3Odd { p } => RankS { r: 2 * n, s: n * p },
            CaseKind::V2V2 { p } => RankS {
                r: n * p,
                s: n * p * (p - 1),
            },
            CaseKind::V3C4 => RankS {
                r: 2 * n,
                s: [3, 6, 11, 16][self.n as usize - 1],
            },
        }
    }

    /// Closed-form rank and s-invariant of the invariant ring over the hsop
    /// algebra (the n = 1 instance).
    pub fn expected_secondary_rank_s(&self) -> RankS {
        match self.kind {
            CaseKind::V2 { .. } => RankS { r: 1, s: 0 },
            CaseKind::V3Odd { p } => RankS { r: 2, s: p },
            CaseKind::V2V2 { p } => RankS {
                r: p,
                s: p * (p - 1),
            },
            CaseKind::V3C4 => RankS { r: 2, s: 3 },
        }
    }
}

/// An element of k[V] ⊗ V_n: component j holds the coefficient of the basis
/// vector w_{j+1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Covariant {
    components: Vec<Polynomial>,
}

impl Covariant {
    pub fn new(components: Vec<Polynomial>) -> Self {
        Covariant { components }
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }
}

/// A fully constructed case: action, hsop, secondary invariants, candidate
/// generators and a shared kernel-slice cache.  Immutable after `build`.
#[derive(Debug, Clone)]
pub struct CaseData {
    spec: CaseSpec,
    action: CyclicAction,
    hsop: Vec<Polynomial>,
    secondary: Vec<Polynomial>,
    candidates: Vec<Polynomial>,
    slices: Arc<SliceCache>,
}

impl CaseData {
    /// Builds the action, hsop, secondary invariants and candidate set for
    /// the given case, verifying the construction invariants.
    pub fn build(spec: CaseSpec) -> Result<Self, CaseError> {
        let prime = spec.prime();
        let p = prime.p();
        let n = spec.n;
        let var = |i: usize| Polynomial::variable(prime, spec.kind.num_vars(), i);

        let (action, hsop, secondary, candidates) = match spec.kind {
            CaseKind::V2 { .. } => {
                let action = jordan_block_action(prime, 2)?;
                let x1 = var(0)?;
                let x2 = var(1)?;
                let norm_x1 = action.norm(action.trivial_subgroup(), &x1)?;
                let hsop = vec![x2, norm_x1];
                let secondary = vec![Polynomial::one(prime, 2)?];
                let candidates = (0..n).map(|k| x1.pow(k)).collect();
                (action, hsop, secondary, candidates)
            }
            CaseKind::V3Odd { .. } => {
                let action = jordan_block_action(prime, 3)?;
                let x1 = var(0)?;
                let x2 = var(1)?;
                let x3 = var(2)?;
                let a1 = x3.clone();
                let a2 = &(&x2.pow(2) - &(&x1 * &x3).scalar_mul(2)) - &(&x2 * &x3);
                let a3 = action.norm(action.trivial_subgroup(), &x1)?;
                let hsop = vec![a1, a2, a3];
                let secondary = vec![
                    Polynomial::one(prime, 3)?,
                    action.norm(action.trivial_subgroup(), &x2)?,
                ];
                // The ladder M_i and the complementary family P_i.
                let m_i = |i: u32| {
                    if i.is_multiple_of(2) {
                        x1.pow(i / 2)
                    } else {
                        &x1.pow((i - 1) / 2) * &x2
                    }
                };
                let p_i = |i: u32| -> Result<Polynomial, CaseError> {
                    let p32 = p as u32;
                    Ok(if i == 0 {
                        &x1.pow(p32 - 1) * &x2
                    } else if i % 2 == 1 {
                        x1.pow(p32 - i.div_ceil(2))
                    } else {
                        action.delta(&x1.pow(p32 - i / 2))?
                    })
                };
                let mut candidates: Vec<Polynomial> = (0..n).map(m_i).collect();
                for i in 0..n {
                    candidates.push(action.delta_pow(p as u32 - n, &p_i(i)?)?);
                }
                (action, hsop, secondary, candidates)
            }
            CaseKind::V2V2 { .. } => {
                let action = block_v2v2_action(prime)?;
                let x1 = var(0)?;
                let x2 = var(1)?;
                let x3 = var(2)?;
                let x4 = var(3)?;
                let trivial = action.trivial_subgroup();
                let hsop = vec![
                    x3.clone(),
                    x4.clone(),
                    action.norm(trivial, &x1)?,
                    action.norm(trivial, &x2)?,
                ];
                let u = &(&x1 * &x4) - &(&x2 * &x3);
                let secondary = (0..p as u32).map(|k| u.pow(k)).collect();
                // M_k = {x1^i x2^j : i+j = k, i < p, j < p}, x1-dominant first.
                let block_monomials = |k: u32| -> Vec<Polynomial> {
                    let p32 = p as u32;
                    let hi = k.min(p32 - 1);
                    let lo = k.saturating_sub(p32 - 1);
                    (lo..=hi)
                        .rev()
                        .map(|i| &x1.pow(i) * &x2.pow(k - i))
                        .collect()
                };
                let mut candidates = Vec::new();
                for k in 0..n {
                    candidates.extend(block_monomials(k));
                }
                for k in 1..=(p as u32).saturating_sub(n) {
                    for m in block_monomials(n - 1) {
                        candidates.push(&u.pow(k) * &m);
                    }
                }
                let p32 = p as u32;
                for k in (2 * p32 - n)..=(2 * p32 - 2) {
                    for m in block_monomials(k) {
                        candidates.push(action.delta_pow(p32 - n, &m)?);
                    }
                }
                (action, hsop, secondary, candidates)
            }
            CaseKind::V3C4 => {
                let action = jordan_block_action(prime, 3)?;
                let x1 = var(0)?;
                let x2 = var(1)?;
                let x3 = var(2)?;
                let h = action.subgroup(1)?;
                let hsop = vec![
                    action.norm(action.trivial_subgroup(), &x1)?,
                    action.norm(h, &x2)?,
                    x3.clone(),
                ];
                let u = Polynomial::parse("x1^2*x3 + x1*x3^2 + x2^3 + x2^2*x3", prime, 3)?;
                let secondary = vec![Polynomial::one(prime, 3)?, u.clone()];
                // N^H(x1) = x1 · sigma^2(x1), the norm for the subgroup action.
                let norm_h_x1 = &x1 * &action.act(2, &x1)?;
                let one = Polynomial::one(prime, 3)?;
                let candidates = match n {
                    1 => vec![one, u],
                    2 => vec![one, x2.clone(), norm_h_x1.clone(), &x2 * &norm_h_x1],
                    3 => vec![
                        one,
                        x1.clone(),
                        x2.clone(),
                        x1.pow(2),
                        action.delta(&x1.pow(3))?,
                        action.delta(&(&x1.pow(3) * &x2))?,
                    ],
                    4 => vec![
                        one,
                        x1.clone(),
                        x2.clone(),
                        x1.pow(2),
                        &x1 * &x2,
                        x1.pow(3),
                        &x1.pow(2) * &x2,
                        &x1.pow(3) * &x2,
                    ],
                    _ => unreachable!("n validated by CaseSpec"),
                };
                (action, hsop, secondary, candidates)
            }
        };

        let data = CaseData {
            spec,
            slices: Arc::new(SliceCache::new(action.clone())),
            action,
            hsop,
            secondary,
            candidates,
        };
        data.check_construction()?;
        Ok(data)
    }

    fn check_construction(&self) -> Result<(), CaseError> {
        for f in self.hsop.iter().chain(&self.secondary) {
            if !f.is_zero() && !self.action.is_invariant(f)? {
                return Err(CaseError::NotInvariant(f.to_string()));
            }
        }
        let product: u64 = self
            .hsop
            .iter()
            .map(|f| u64::from(f.homogeneous_degree().unwrap_or(0)))
            .product();
        let q = self.action.prime().q();
        if !product.is_multiple_of(q) || (product / q) as usize != self.secondary.len() {
            return Err(CaseError::RankMismatch {
                product,
                q,
                count: self.secondary.len(),
            });
        }
        Ok(())
    }

    pub fn spec(&self) -> &CaseSpec {
        &self.spec
    }

    pub fn action(&self) -> &CyclicAction {
        &self.action
    }

    pub fn prime(&self) -> Prime {
        self.action.prime()
    }

    pub fn num_vars(&self) -> usize {
        self.action.num_vars()
    }

    pub fn hsop(&self) -> &[Polynomial] {
        &self.hsop
    }

    pub fn hsop_degrees(&self) -> Vec<u32> {
        self.hsop
            .iter()
            .map(|f| f.homogeneous_degree().expect("hsop is homogeneous"))
            .collect()
    }

    pub fn max_hsop_degree(&self) -> u32 {
        self.hsop_degrees().into_iter().max().unwrap_or(1)
    }

    pub fn secondary(&self) -> &[Polynomial] {
        &self.secondary
    }

    pub fn candidates(&self) -> &[Polynomial] {
        &self.candidates
    }

    pub fn slices(&self) -> &SliceCache {
        &self.slices
    }

    /// The intermediate subgroup of index p for the order-4 case.
    pub fn intermediate_subgroup(&self) -> Option<Subgroup> {
        match self.spec.kind {
            CaseKind::V3C4 => Some(self.action.subgroup(1).expect("k = 2")),
            _ => None,
        }
    }

    /// Hilbert series of K_n from kernel-slice dimensions, up to `bound`.
    pub fn kernel_series(&self, n: u32, bound: u32) -> Result<TruncatedSeries, CaseError> {
        let dims: Vec<usize> = (0..=bound)
            .map(|d| self.slices.kernel(n, d).map(|s| s.rank()))
            .collect::<Result<_, _>>()?;
        Ok(TruncatedSeries::from_dims(&dims))
    }

    /// Numerator of H(K_n, t) over the hsop algebra, with the polynomiality
    /// window sized for generator degrees up to `expected_top`.  An optional
    /// cap clips the truncation bound (numerator extraction then fails if
    /// the window no longer fits).
    pub fn kernel_numerator(
        &self,
        n: u32,
        expected_top: u32,
        degree_cap: Option<u32>,
    ) -> Result<HilbertNumerator, CaseError> {
        let mut bound = expected_top + self.max_hsop_degree();
        if let Some(cap) = degree_cap {
            bound = bound.min(cap);
        }
        let series = self.kernel_series(n, bound)?;
        Ok(hilbert::numerator(
            &series,
            &self.hsop_degrees(),
            expected_top as usize,
        )?)
    }

    /// Numerator of the invariant ring over the hsop algebra.
    pub fn invariant_numerator(
        &self,
        degree_cap: Option<u32>,
    ) -> Result<HilbertNumerator, CaseError> {
        let top = self
            .secondary
            .iter()
            .filter_map(Polynomial::homogeneous_degree)
            .max()
            .unwrap_or(0);
        self.kernel_numerator(1, top, degree_cap)
    }

    /// Change-of-base report for M = K_n over A = invariant ring over the
    /// hsop algebra.
    pub fn ssubalg_report(&self) -> Result<SsubalgReport, CaseError> {
        let top = self.max_candidate_degree();
        let f = self.kernel_numerator(self.spec.n, top, None)?;
        let g = self.invariant_numerator(None)?;
        Ok(hilbert::verify_ssubalg(&f, &g)?)
    }

    pub fn max_candidate_degree(&self) -> u32 {
        self.candidates
            .iter()
            .filter_map(Polynomial::homogeneous_degree)
            .max()
            .unwrap_or(0)
    }

    /// Ξ(f) = Σ_i Δ^i(f) ⊗ w_{i+1} for f in K_n; rejects non-kernel inputs.
    pub fn xi(&self, f: &Polynomial) -> Result<Covariant, CaseError> {
        let n = self.spec.n;
        if !self.action.delta_pow(n, f)?.is_zero() {
            return Err(CaseError::NotInKernel(f.to_string(), n));
        }
        let mut components = Vec::with_capacity(n as usize);
        let mut g = f.clone();
        for i in 0..n {
            components.push(g.clone());
            if i + 1 < n {
                g = self.action.delta(&g)?;
            }
        }
        Ok(Covariant { components })
    }

    /// True when the diagonal action fixes φ: σ acts on the W-basis by
    /// σ(w_j) = w_j − w_{j−1} + w_{j−2} − ..., so φ is fixed exactly when
    /// Σ_{j>=t} (−1)^{j−t} σ(f_j) = f_t for every component t.
    pub fn is_covariant(&self, phi: &Covariant) -> Result<bool, CaseError> {
        let n = self.spec.n as usize;
        if phi.components.len() != n {
            return Err(CaseError::WrongComponentCount {
                got: phi.components.len(),
                want: n,
            });
        }
        let sigma_f: Vec<Polynomial> = phi
            .components
            .iter()
            .map(|f| self.action.act(1, f))
            .collect::<Result<_, _>>()?;
        for t in 0..n {
            let mut acc = Polynomial::zero(self.prime(), self.num_vars())?;
            for (j, sf) in sigma_f.iter().enumerate().skip(t) {
                acc = if (j - t) % 2 == 0 {
                    acc.try_add(sf)?
                } else {
                    acc.try_sub(sf)?
                };
            }
            if acc != phi.components[t] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Degree-d slice of the covariant module (k[V] ⊗ V_n)^G, computed by
    /// direct linear algebra on the stacked coordinates, independently of Ξ.
    /// Component j of a covariant occupies columns [j·dim, (j+1)·dim).
    pub fn covariant_slice(&self, degree: u32) -> Result<SubspaceSlice, CaseError> {
        let prime = self.prime();
        let n = self.spec.n as usize;
        let basis = monomial_basis(self.num_vars(), degree, MonomialOrder::GrevLex);
        let dim = basis.dim();
        let sigma = sigma_matrix(&self.action, 1, &basis)?;
        let total = n * dim;
        let mut big = FpMatrix::zeros(prime, total, total);
        for t in 0..n {
            for j in t..n {
                let sign_is_plus = (j - t) % 2 == 0;
                for r in 0..dim {
                    for c in 0..dim {
                        let mut v = sigma.get(r, c);
                        if v != 0 && !sign_is_plus {
                            v = prime.neg(v);
                        }
                        if j == t && r == c {
                            v = prime.sub(v, 1);
                        }
                        if v != 0 {
                            big.set(t * dim + r, j * dim + c, v);
                        }
                    }
                }
            }
        }
        let rows = big.nullspace();
        Ok(SubspaceSlice::from_span(prime, degree, total, rows))
    }

    /// Stacked coordinates of Ξ applied to a degree-d kernel element.
    pub fn xi_coords(&self, f: &Polynomial, degree: u32) -> Result<Vec<u64>, CaseError> {
        let basis = monomial_basis(self.num_vars(), degree, MonomialOrder::GrevLex);
        let cov = self.xi(f)?;
        let mut out = Vec::with_capacity(self.spec.n as usize * basis.dim());
        for comp in cov.components() {
            out.extend(basis.coords_of(comp)?);
        }
        Ok(out)
    }
}

/// The explicit candidate generating set for a case, in construction order.
pub fn candidate_generators(spec: CaseSpec) -> Result<Vec<Polynomial>, CaseError> {
    Ok(CaseData::build(spec)?.candidates.clone())
}

/// Identifiers for the lead-term statements checked exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaId {
    /// Lead term of Δ^j(x1^k) in the 3-variable case (graded-revlex).
    DeltaPowersOfX1,
    /// Lead term of Δ^j(x1^k·x2) in the 3-variable case (graded-revlex).
    DeltaPowersOfX1X2,
    /// Lead term of Δ^k(x1^i·x2^j) in the block case (graded-lex).
    BlockLeadTerms,
    /// Lead monomials of hsop-algebra elements have the shape
    /// x1^(p·i)·x2^(2j)·x3^k (graded-revlex, randomized).
    AlgebraLeadShape,
}

impl LemmaId {
    pub fn name(self) -> &'static str {
        match self {
            LemmaId::DeltaPowersOfX1 => "delta-powers-x1",
            LemmaId::DeltaPowersOfX1X2 => "delta-powers-x1x2",
            LemmaId::BlockLeadTerms => "block-lead-terms",
            LemmaId::AlgebraLeadShape => "algebra-lead-shape",
        }
    }

    pub fn all() -> [LemmaId; 4] {
        [
            LemmaId::DeltaPowersOfX1,
            LemmaId::DeltaPowersOfX1X2,
            LemmaId::BlockLeadTerms,
            LemmaId::AlgebraLeadShape,
        ]
    }
}

/// Outcome of one lemma verification run.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub p: u64,
    pub order: MonomialOrder,
    pub checked: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl LemmaReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Falling factorial k·(k−1)···(k−j+1) = k!/(k−j)! mod p.
fn falling_factorial_mod(k: u32, j: u32, prime: Prime) -> u64 {
    let mut acc = 1 % prime.p();
    for t in (k - j + 1)..=k {
        acc = prime.mul(acc, u64::from(t) % prime.p());
    }
    acc
}

/// Exhaustively (or, for the algebra-shape lemma, on random samples)
/// verifies a lead-term statement under the order that makes it true.
pub fn lead_term_lemma_check(lemma: LemmaId, p: u64, seed: u64) -> Result<LemmaReport, CaseError> {
    if p > 7 {
        return Err(CaseError::LemmaPrimeTooLarge(p));
    }
    match lemma {
        LemmaId::DeltaPowersOfX1 => check_delta_powers(lemma, p, false),
        LemmaId::DeltaPowersOfX1X2 => check_delta_powers(lemma, p, true),
        LemmaId::BlockLeadTerms => check_block_lead_terms(p),
        LemmaId::AlgebraLeadShape => check_algebra_lead_shape(p, seed),
    }
}

fn check_delta_powers(lemma: LemmaId, p: u64, with_x2: bool) -> Result<LemmaReport, CaseError> {
    if p == 2 {
        return Err(CaseError::LemmaCaseMismatch(lemma.name()));
    }
    let prime = Prime::new(p, 1)?;
    let action = jordan_block_action(prime, 3)?;
    let order = MonomialOrder::GrevLex;
    let x1 = Polynomial::variable(prime, 3, 0)?;
    let x2 = Polynomial::variable(prime, 3, 1)?;
    let mut report = LemmaReport {
        lemma,
        p,
        order,
        checked: 0,
        failures: Vec::new(),
        notes: Vec::new(),
    };
    for k in 0..p as u32 {
        for j in 0..=k {
            let base = if with_x2 { &x1.pow(k) * &x2 } else { x1.pow(k) };
            let image = action.delta_pow(j, &base)?;
            let coeff = falling_factorial_mod(k, j, prime);
            let x2_exp = if with_x2 { j + 1 } else { j };
            let mon = Monomial::new(&[k - j, x2_exp, 0])?;
            report.checked += 1;
            match image.lead_term(order) {
                Ok((lm, lc)) if lm == mon && lc == coeff => {}
                Ok((lm, lc)) => report.failures.push(format!(
                    "j={j} k={k}: lead term {lc}·{:?} != {coeff}·{:?}",
                    lm.exps(),
                    mon.exps()
                )),
                Err(_) => report.failures.push(format!("j={j} k={k}: image is zero")),
            }
        }
    }
    Ok(report)
}

fn check_block_lead_terms(p: u64) -> Result<LemmaReport, CaseError> {
    let prime = Prime::new(p, 1)?;
    let action = block_v2v2_action(prime)?;
    let order = MonomialOrder::GrLex;
    let x1 = Polynomial::variable(prime, 4, 0)?;
    let x2 = Polynomial::variable(prime, 4, 1)?;
    let mut report = LemmaReport {
        lemma: LemmaId::BlockLeadTerms,
        p,
        order,
        checked: 0,
        failures: Vec::new(),
        notes: Vec::new(),
    };
    let mut second_branch = 0usize;
    let mut closed_form_matches = 0usize;
    for i in 0..p as u32 {
        for j in 0..p as u32 {
            let weight_bound = (i + j).min(p as u32 - 1);
            for k in 0..=weight_bound {
                let base = &x1.pow(i) * &x2.pow(j);
                let image = action.delta_pow(k, &base)?;
                report.checked += 1;
                let lead = match image.lead_term(order) {
                    Ok(t) => t,
                    Err(_) => {
                        report
                            .failures
                            .push(format!("i={i} j={j} k={k}: image is zero"));
                        continue;
                    }
                };
                if k <= j {
                    // First branch: both monomial and coefficient are exact.
                    let mon = Monomial::new(&[i, j - k, 0, k])?;
                    let coeff = falling_factorial_mod(j, k, prime);
                    if lead != (mon, coeff) {
                        report.failures.push(format!(
                            "i={i} j={j} k={k}: lead {:?} (coeff {}) != expected {:?} (coeff {coeff})",
                            lead.0.exps(),
                            lead.1,
                            mon.exps()
                        ));
                    }
                } else {
                    // Second branch: only the monomial shape is asserted; the
                    // coefficient is determined by the computation and checked
                    // against the closed form C(k,j)·i!·j!/(i+j−k)! for the
                    // record only.
                    second_branch += 1;
                    let mon = Monomial::new(&[i + j - k, 0, k - j, j])?;
                    if lead.0 != mon {
                        report.failures.push(format!(
                            "i={i} j={j} k={k}: lead monomial {:?} != expected {:?}",
                            lead.0.exps(),
                            mon.exps()
                        ));
                        continue;
                    }
                    let closed = prime.mul(
                        binom_mod(u64::from(k), u64::from(j), prime),
                        prime.mul(
                            falling_factorial_mod(i, k - j, prime),
                            falling_factorial_mod(j, j, prime),
                        ),
                    );
                    if lead.1 == closed {
                        closed_form_matches += 1;
                    }
                }
            }
        }
    }
    report.notes.push(format!(
        "second branch (j < k): {second_branch} entries, observed lead coefficient matches \
         C(k,j)*i!*j!/(i+j-k)! in {closed_form_matches} of them"
    ));
    Ok(report)
}

fn check_algebra_lead_shape(p: u64, seed: u64) -> Result<LemmaReport, CaseError> {
    use rand::{Rng, SeedableRng};
    if p == 2 {
        return Err(CaseError::LemmaCaseMismatch(
            LemmaId::AlgebraLeadShape.name(),
        ));
    }
    let prime = Prime::new(p, 1)?;
    let action = jordan_block_action(prime, 3)?;
    let order = MonomialOrder::GrevLex;
    let a1 = Polynomial::variable(prime, 3, 2)?;
    let a2 = {
        let x1 = Polynomial::variable(prime, 3, 0)?;
        let x2 = Polynomial::variable(prime, 3, 1)?;
        let x3 = Polynomial::variable(prime, 3, 2)?;
        &(&x2.pow(2) - &(&x1 * &x3).scalar_mul(2)) - &(&x2 * &x3)
    };
    let a3 = action.norm(
        action.trivial_subgroup(),
        &Polynomial::variable(prime, 3, 0)?,
    )?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut report = LemmaReport {
        lemma: LemmaId::AlgebraLeadShape,
        p,
        order,
        checked: 0,
        failures: Vec::new(),
        notes: Vec::new(),
    };
    while report.checked < 200 {
        // A random algebra element: a few products a1^i a2^j a3^k with
        // nonzero coefficients.
        let nterms = rng.gen_range(1..=4);
        let mut f = Polynomial::zero(prime, 3)?;
        for _ in 0..nterms {
            let i = rng.gen_range(0..=3u32);
            let j = rng.gen_range(0..=2u32);
            let k = rng.gen_range(0..=2u32);
            let c = rng.gen_range(1..p);
            let prod = &(&a1.pow(i) * &a2.pow(j)) * &a3.pow(k);
            f = f.try_add(&prod.scalar_mul(c))?;
        }
        if f.is_zero() {
            continue;
        }
        report.checked += 1;
        let lm = f.lead_monomial(order)?;
        if u64::from(lm.exp(0)) % p != 0 || lm.exp(1) % 2 != 0 {
            report.failures.push(format!(
                "lead monomial {:?} is not of the shape x1^(p·i)·x2^(2j)·x3^k",
                lm.exps()
            ));
        }
    }
    Ok(report)
}
