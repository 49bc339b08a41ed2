//! Degree-graded exact linear algebra over F_p.
//!
//! A fixed homogeneous degree d of k[V] is coordinatized by its monomial
//! basis; operators, kernels, spans of module products and transfer kernels
//! are all computed as dense row-reduced matrices inside such a slice.  This
//! module is the brute-force oracle the rest of the crate is checked against.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::action::{ActionError, CyclicAction, Subgroup};
use crate::arith::Prime;
use crate::poly::{Monomial, MonomialOrder, PolyError, Polynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SliceError {
    #[error("polynomial is not homogeneous of degree {0}")]
    NotHomogeneous(u32),
    #[error("monomial does not belong to the slice basis")]
    ForeignMonomial,
    #[error("coordinate vector has length {got}, ambient dimension is {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("algebra generator {0} is not a nonzero homogeneous invariant")]
    BadAlgebraGenerator(usize),
    #[error("module slices provided up to degree {got}, need degree {need}")]
    MissingModuleSlice { got: usize, need: usize },
    #[error("kernel power must be at least 1")]
    ZeroKernelPower,
    #[error("the subgroup must be proper for a transfer kernel")]
    ImproperSubgroup,
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The monomial basis of k[V]_d, sorted descending under a graded order.
#[derive(Debug, Clone)]
pub struct SliceBasis {
    num_vars: usize,
    degree: u32,
    order: MonomialOrder,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

/// All degree-d monomials in m variables, listed in decreasing order.
pub fn monomial_basis(num_vars: usize, degree: u32, order: MonomialOrder) -> SliceBasis {
    let mut monomials = Vec::new();
    let mut exps = vec![0u32; num_vars];
    enumerate_exponents(&mut exps, 0, degree, &mut monomials);
    monomials.sort_by(|a, b| order.cmp_same(b, a));
    let index = monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    SliceBasis {
        num_vars,
        degree,
        order,
        monomials,
        index,
    }
}

fn enumerate_exponents(exps: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if pos + 1 == exps.len() {
        exps[pos] = remaining;
        out.push(Monomial::new(exps).expect("valid var count"));
        return;
    }
    for e in 0..=remaining {
        exps[pos] = e;
        enumerate_exponents(exps, pos + 1, remaining - e, out);
    }
    exps[pos] = 0;
}

impl SliceBasis {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn index_of(&self, mon: &Monomial) -> Option<usize> {
        self.index.get(mon).copied()
    }

    /// Coordinates of a homogeneous polynomial of this degree (the zero
    /// polynomial coordinatizes to the zero vector).
    pub fn coords_of(&self, f: &Polynomial) -> Result<Vec<u64>, SliceError> {
        let mut v = vec![0u64; self.dim()];
        for (mon, c) in f.terms() {
            if mon.degree() != self.degree {
                return Err(SliceError::NotHomogeneous(self.degree));
            }
            let i = self.index_of(mon).ok_or(SliceError::ForeignMonomial)?;
            v[i] = *c;
        }
        Ok(v)
    }

    pub fn poly_from_coords(&self, prime: Prime, coords: &[u64]) -> Result<Polynomial, SliceError> {
        if coords.len() != self.dim() {
            return Err(SliceError::DimensionMismatch {
                got: coords.len(),
                want: self.dim(),
            });
        }
        let terms = self
            .monomials
            .iter()
            .zip(coords)
            .filter(|&(_, &c)| c != 0)
            .map(|(m, &c)| (*m, c));
        Ok(Polynomial::from_terms(prime, self.num_vars, terms)?)
    }
}

/// A dense matrix over F_p, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    prime: Prime,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(prime: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix {
            prime,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(prime: Prime, n: usize) -> Self {
        let mut m = Self::zeros(prime, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(prime: Prime, rows: Vec<Vec<u64>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend_from_slice(&r);
        }
        FpMatrix {
            prime,
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0)
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let p = self.prime;
        let mut out = FpMatrix::zeros(p, self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a == 0 {
                    continue;
                }
                let src = t * other.cols;
                let dst = i * other.cols;
                for j in 0..other.cols {
                    // Entries are < p <= 97; the sum cannot overflow before
                    // the reduction below.
                    let v = out.data[dst + j] + a * other.data[src + j];
                    out.data[dst + j] = v % p.p();
                }
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let p = self.prime;
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(r) = (pivot_row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if r != pivot_row {
                for j in 0..self.cols {
                    self.data.swap(r * self.cols + j, pivot_row * self.cols + j);
                }
            }
            let inv = p.inv(self.get(pivot_row, col)).expect("nonzero pivot");
            for j in col..self.cols {
                let v = p.mul(self.get(pivot_row, j), inv);
                self.set(pivot_row, j, v);
            }
            for r in 0..self.rows {
                if r == pivot_row {
                    continue;
                }
                let f = self.get(r, col);
                if f == 0 {
                    continue;
                }
                let neg_f = p.neg(f);
                for j in col..self.cols {
                    let v = (self.get(r, j) + neg_f * self.get(pivot_row, j)) % p.p();
                    self.set(r, j, v);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// A basis of {x : Mx = 0}, returned as rows.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let p = self.prime;
        let mut work = self.clone();
        let pivots = work.rref_in_place();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = p.neg(work.get(r, free));
            }
            basis.push(v);
        }
        basis
    }
}

/// A subspace of a degree slice, stored as a reduced-row-echelon matrix.
///
/// Immutable once built; the rank is the number of (nonzero) rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceSlice {
    prime: Prime,
    degree: u32,
    ambient: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl SubspaceSlice {
    /// Row-reduces an arbitrary spanning set.
    pub fn from_span(prime: Prime, degree: u32, ambient: usize, span: Vec<Vec<u64>>) -> Self {
        for r in &span {
            assert_eq!(r.len(), ambient, "ragged span rows");
        }
        let mut m = FpMatrix::from_rows(prime, span);
        if m.cols() == 0 {
            m = FpMatrix::zeros(prime, 0, ambient);
        }
        let pivots = m.rref_in_place();
        let rows = (0..pivots.len()).map(|i| m.row(i).to_vec()).collect();
        SubspaceSlice {
            prime,
            degree,
            ambient,
            rows,
            pivots,
        }
    }

    pub fn empty(prime: Prime, degree: u32, ambient: usize) -> Self {
        SubspaceSlice {
            prime,
            degree,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of v after reduction against the echelon rows; the zero
    /// vector exactly when v lies in the subspace.
    pub fn reduce(&self, v: &[u64]) -> Result<Vec<u64>, SliceError> {
        if v.len() != self.ambient {
            return Err(SliceError::DimensionMismatch {
                got: v.len(),
                want: self.ambient,
            });
        }
        let p = self.prime;
        let mut out = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let f = out[pc];
            if f == 0 {
                continue;
            }
            let neg_f = p.neg(f);
            for j in 0..self.ambient {
                out[j] = (out[j] + neg_f * row[j]) % p.p();
            }
        }
        Ok(out)
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool, SliceError> {
        Ok(self.reduce(v)?.iter().all(|&c| c == 0))
    }

    /// The echelon basis decoded as polynomials.
    pub fn basis_polynomials(&self, basis: &SliceBasis) -> Result<Vec<Polynomial>, SliceError> {
        self.rows
            .iter()
            .map(|r| basis.poly_from_coords(self.prime, r))
            .collect()
    }
}

/// Matrix of sigma^power restricted to k[V]_d: column c holds the
/// coordinates of sigma^power applied to the c-th basis monomial.
pub fn sigma_matrix(
    action: &CyclicAction,
    power: i64,
    basis: &SliceBasis,
) -> Result<FpMatrix, SliceError> {
    let prime = action.prime();
    let n = basis.dim();
    let mut m = FpMatrix::zeros(prime, n, n);
    for c in 0..n {
        let mono = Polynomial::monomial_term(prime, basis.monomials()[c], 1);
        let image = action.act(power, &mono)?;
        for (mon, coeff) in image.terms() {
            let r = basis.index_of(mon).ok_or(SliceError::ForeignMonomial)?;
            m.set(r, c, *coeff);
        }
    }
    Ok(m)
}

/// Matrix of Δ^n restricted to k[V]_d in the given basis coordinates.
pub fn operator_matrix(
    action: &CyclicAction,
    n: u32,
    basis: &SliceBasis,
) -> Result<FpMatrix, SliceError> {
    let prime = action.prime();
    let dim = basis.dim();
    if n == 0 {
        return Ok(FpMatrix::identity(prime, dim));
    }
    if u64::from(n) >= prime.q() {
        // Δ^q = 0 kills the whole slice.
        return Ok(FpMatrix::zeros(prime, dim, dim));
    }
    let sigma = sigma_matrix(action, 1, basis)?;
    let mut delta = sigma;
    for i in 0..dim {
        let v = delta.get(i, i);
        delta.set(i, i, prime.sub(v, 1));
    }
    let mut acc = delta.clone();
    for _ in 1..n {
        acc = acc.mul(&delta);
    }
    Ok(acc)
}

/// RREF basis of ker(Δ^n) ∩ k[V]_d.  n = 1 is the invariant slice.
pub fn kernel_slice(
    action: &CyclicAction,
    n: u32,
    degree: u32,
    order: MonomialOrder,
) -> Result<SubspaceSlice, SliceError> {
    if n == 0 {
        return Err(SliceError::ZeroKernelPower);
    }
    let basis = monomial_basis(action.num_vars(), degree, order);
    let op = operator_matrix(action, n, &basis)?;
    let rows = op.nullspace();
    Ok(SubspaceSlice::from_span(
        action.prime(),
        degree,
        basis.dim(),
        rows,
    ))
}

/// All distinct products of the algebra generators with total degree
/// exactly `degree` (the empty product {1} for degree 0).
pub fn algebra_monomials(
    prime: Prime,
    num_vars: usize,
    gens: &[Polynomial],
    degree: u32,
) -> Result<Vec<Polynomial>, SliceError> {
    let one = Polynomial::one(prime, num_vars)?;
    let mut out = Vec::new();
    fn recurse(
        gens: &[Polynomial],
        gen_degrees: &[u32],
        idx: usize,
        remaining: u32,
        acc: &Polynomial,
        out: &mut Vec<Polynomial>,
    ) {
        if remaining == 0 {
            out.push(acc.clone());
            return;
        }
        if idx == gens.len() {
            return;
        }
        let d = gen_degrees[idx];
        let mut power = acc.clone();
        let mut used = 0;
        loop {
            recurse(
                gens,
                gen_degrees,
                idx + 1,
                remaining - used * d,
                &power,
                out,
            );
            used += 1;
            if used * d > remaining {
                break;
            }
            power = power.try_mul(&gens[idx]).expect("same ring");
        }
    }
    let mut gen_degrees = Vec::with_capacity(gens.len());
    for g in gens {
        let d = g
            .homogeneous_degree()
            .filter(|&d| d > 0)
            .ok_or(SliceError::BadAlgebraGenerator(0))?;
        gen_degrees.push(d);
    }
    recurse(gens, &gen_degrees, 0, degree, &one, &mut out);
    Ok(out)
}

/// RREF of the span of {a·m : a an algebra monomial of degree e, m in the
/// degree-(d−e) module slice}, with e >= 1 when `positive_only` and e >= 0
/// otherwise.  Generators must be nonzero homogeneous invariants.
pub fn module_product_slice(
    action: &CyclicAction,
    algebra_gens: &[Polynomial],
    module_slices: &[Arc<SubspaceSlice>],
    degree: u32,
    positive_only: bool,
) -> Result<SubspaceSlice, SliceError> {
    let prime = action.prime();
    let m = action.num_vars();
    for (i, g) in algebra_gens.iter().enumerate() {
        let homogeneous = g.homogeneous_degree().is_some_and(|d| d > 0);
        if g.is_zero() || !homogeneous || !action.is_invariant(g)? {
            return Err(SliceError::BadAlgebraGenerator(i));
        }
    }
    if (module_slices.len() as u32) <= degree {
        return Err(SliceError::MissingModuleSlice {
            got: module_slices.len().saturating_sub(1),
            need: degree as usize,
        });
    }
    let target = monomial_basis(m, degree, MonomialOrder::GrevLex);
    let min_e = u32::from(positive_only);
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for e in min_e..=degree {
        let module = &module_slices[(degree - e) as usize];
        if module.rank() == 0 {
            continue;
        }
        let source = monomial_basis(m, degree - e, MonomialOrder::GrevLex);
        let members = module.basis_polynomials(&source)?;
        for a in algebra_monomials(prime, m, algebra_gens, e)? {
            if e == 0 {
                // The empty product multiplies by 1; reuse members directly.
                for mem in &members {
                    rows.push(target.coords_of(mem)?);
                }
                break;
            }
            for mem in &members {
                let prod = a.try_mul(mem)?;
                rows.push(target.coords_of(&prod)?);
            }
        }
    }
    Ok(SubspaceSlice::from_span(prime, degree, target.dim(), rows))
}

/// RREF basis of {f in k[V]^H_d : Tr^G_H(f) = 0} for a proper subgroup H.
pub fn transfer_kernel_slice(
    action: &CyclicAction,
    h: Subgroup,
    degree: u32,
) -> Result<SubspaceSlice, SliceError> {
    let index = action.subgroup_index(h);
    if index == 1 {
        return Err(SliceError::ImproperSubgroup);
    }
    let prime = action.prime();
    let basis = monomial_basis(action.num_vars(), degree, MonomialOrder::GrevLex);
    let dim = basis.dim();
    // H-invariant subspace: kernel of sigma^{[G:H]} - 1 on the slice.
    let mut h_op = sigma_matrix(action, index as i64, &basis)?;
    for i in 0..dim {
        let v = h_op.get(i, i);
        h_op.set(i, i, prime.sub(v, 1));
    }
    let h_basis = h_op.nullspace();
    if h_basis.is_empty() {
        return Ok(SubspaceSlice::empty(prime, degree, dim));
    }
    // Transfer operator on the slice: sum of sigma^t over coset reps.
    let mut tr = FpMatrix::zeros(prime, dim, dim);
    for t in 0..index {
        let st = sigma_matrix(action, t as i64, &basis)?;
        for i in 0..dim {
            for j in 0..dim {
                tr.set(i, j, prime.add(tr.get(i, j), st.get(i, j)));
            }
        }
    }
    // Solve Tr(sum c_i h_i) = 0 for coefficient vectors c.
    let r = h_basis.len();
    let mut system = FpMatrix::zeros(prime, dim, r);
    for (col, hvec) in h_basis.iter().enumerate() {
        for i in 0..dim {
            let mut acc = 0u64;
            for (j, &hj) in hvec.iter().enumerate() {
                if hj != 0 {
                    acc += tr.get(i, j) * hj;
                }
            }
            system.set(i, col, acc % prime.p());
        }
    }
    let combos = system.nullspace();
    let rows = combos
        .iter()
        .map(|c| {
            let mut v = vec![0u64; dim];
            for (i, &ci) in c.iter().enumerate() {
                if ci == 0 {
                    continue;
                }
                for j in 0..dim {
                    v[j] = (v[j] + ci * h_basis[i][j]) % prime.p();
                }
            }
            v
        })
        .collect();
    Ok(SubspaceSlice::from_span(prime, degree, dim, rows))
}

/// Memoized kernel slices for one action, keyed by (power, degree).
///
/// Slices are immutable once published; concurrent recomputation of the same
/// key is harmless because the values are identical.
#[derive(Debug)]
pub struct SliceCache {
    action: CyclicAction,
    memo: Mutex<HashMap<(u32, u32), Arc<SubspaceSlice>>>,
}

impl SliceCache {
    pub fn new(action: CyclicAction) -> Self {
        SliceCache {
            action,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn action(&self) -> &CyclicAction {
        &self.action
    }

    /// ker(Δ^n) ∩ k[V]_d in the canonical graded-revlex basis.
    pub fn kernel(&self, n: u32, degree: u32) -> Result<Arc<SubspaceSlice>, SliceError> {
        if let Some(hit) = self.memo.lock().unwrap().get(&(n, degree)) {
            return Ok(Arc::clone(hit));
        }
        let slice = Arc::new(kernel_slice(
            &self.action,
            n,
            degree,
            MonomialOrder::GrevLex,
        )?);
        let mut memo = self.memo.lock().unwrap();
        let entry = memo
            .entry((n, degree))
            .or_insert_with(|| Arc::clone(&slice));
        Ok(Arc::clone(entry))
    }

    /// Kernel slices for all degrees 0..=bound, index = degree.
    pub fn kernel_range(&self, n: u32, bound: u32) -> Result<Vec<Arc<SubspaceSlice>>, SliceError> {
        (0..=bound).map(|d| self.kernel(n, d)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{block_v2v2_action, jordan_block_action};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fp(p: u64) -> Prime {
        Prime::new(p, 1).unwrap()
    }

    fn grevlex() -> MonomialOrder {
        MonomialOrder::GrevLex
    }

    #[test]
    fn basis_dimensions() {
        assert_eq!(monomial_basis(4, 0, grevlex()).dim(), 1);
        assert_eq!(monomial_basis(3, 2, grevlex()).dim(), 6);
        // C(11, 3) = 165.
        assert_eq!(monomial_basis(4, 8, grevlex()).dim(), 165);
    }

    #[test]
    fn basis_is_sorted_and_duplicate_free() {
        for (m, d) in [(2usize, 5u32), (3, 4), (4, 3)] {
            for order in [MonomialOrder::GrLex, MonomialOrder::GrevLex] {
                let b = monomial_basis(m, d, order);
                for w in b.monomials().windows(2) {
                    assert_eq!(
                        order.compare(&w[0], &w[1]).unwrap(),
                        std::cmp::Ordering::Greater
                    );
                }
                // Binomial count C(d+m-1, m-1).
                let expected: u64 = {
                    let (mut num, mut den) = (1u64, 1u64);
                    for i in 0..m as u64 - 1 {
                        num *= u64::from(d) + i + 1;
                        den *= i + 1;
                    }
                    num / den
                };
                assert_eq!(b.dim() as u64, expected);
            }
        }
    }

    #[test]
    fn operator_matrix_power_zero_is_identity() {
        let a = jordan_block_action(fp(3), 3).unwrap();
        let basis = monomial_basis(3, 2, grevlex());
        assert_eq!(
            operator_matrix(&a, 0, &basis).unwrap(),
            FpMatrix::identity(fp(3), 6)
        );
    }

    #[test]
    fn operator_matrix_at_group_order_is_zero() {
        let a = jordan_block_action(fp(3), 3).unwrap();
        let basis = monomial_basis(3, 3, grevlex());
        assert!(operator_matrix(&a, 3, &basis).unwrap().is_zero());
        assert!(operator_matrix(&a, 7, &basis).unwrap().is_zero());
        // Also via honest multiplication rather than the shortcut: Δ^2 of a
        // C_2 action is zero.
        let a2 = jordan_block_action(fp(2), 2).unwrap();
        let b2 = monomial_basis(2, 4, grevlex());
        let d1 = operator_matrix(&a2, 1, &b2).unwrap();
        assert!(d1.mul(&d1).is_zero());
    }

    #[test]
    fn delta_squared_on_linear_forms_has_rank_one() {
        // V3, p=3, n=2, d=1: Δ^2(x1) = x3, Δ^2(x2) = Δ^2(x3) = 0.
        let a = jordan_block_action(fp(3), 3).unwrap();
        let basis = monomial_basis(3, 1, grevlex());
        let m = operator_matrix(&a, 2, &basis).unwrap();
        assert_eq!(m.rank(), 1);
        let k = kernel_slice(&a, 2, 1, grevlex()).unwrap();
        assert_eq!(k.rank(), 2);
    }

    #[test]
    fn kernel_at_group_order_is_the_full_slice() {
        let a = block_v2v2_action(fp(3)).unwrap();
        for d in 0..5 {
            let k = kernel_slice(&a, 3, d, grevlex()).unwrap();
            assert_eq!(k.rank(), monomial_basis(4, d, grevlex()).dim());
        }
    }

    #[test]
    fn invariant_linear_forms_of_v3() {
        let a = jordan_block_action(fp(3), 3).unwrap();
        let k = kernel_slice(&a, 1, 1, grevlex()).unwrap();
        assert_eq!(k.rank(), 1);
        let basis = monomial_basis(3, 1, grevlex());
        let polys = k.basis_polynomials(&basis).unwrap();
        assert_eq!(polys[0], Polynomial::variable(fp(3), 3, 2).unwrap());
    }

    #[test]
    fn kernel_power_zero_is_rejected() {
        let a = jordan_block_action(fp(3), 3).unwrap();
        assert_eq!(
            kernel_slice(&a, 0, 2, grevlex()),
            Err(SliceError::ZeroKernelPower)
        );
    }

    #[test]
    fn kernel_rank_is_monotone_in_the_power() {
        let a = jordan_block_action(fp(5), 3).unwrap();
        for d in 0..6 {
            let dims: Vec<usize> = (1..=6)
                .map(|n| kernel_slice(&a, n, d, grevlex()).unwrap().rank())
                .collect();
            for w in dims.windows(2) {
                assert!(w[0] <= w[1]);
            }
            assert_eq!(dims[4], monomial_basis(3, d, grevlex()).dim());
            assert_eq!(dims[5], dims[4]);
        }
    }

    #[test]
    fn invariant_slice_vectors_are_fixed_by_the_group() {
        let a = block_v2v2_action(fp(3)).unwrap();
        let basis = monomial_basis(4, 3, grevlex());
        let k = kernel_slice(&a, 1, 3, grevlex()).unwrap();
        for f in k.basis_polynomials(&basis).unwrap() {
            for i in 0..a.prime().q() {
                assert_eq!(a.act(i as i64, &f).unwrap(), f);
            }
        }
    }

    #[test]
    fn rref_is_involutive() {
        let p = fp(7);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let rows = (0..4)
                .map(|_| (0..6).map(|_| rng.gen_range(0..7)).collect())
                .collect::<Vec<Vec<u64>>>();
            let mut m = FpMatrix::from_rows(p, rows);
            m.rref_in_place();
            let mut again = m.clone();
            again.rref_in_place();
            assert_eq!(m, again);
        }
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let p = fp(5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let rows = (0..5)
                .map(|_| (0..5).map(|_| rng.gen_range(0..5)).collect())
                .collect::<Vec<Vec<u64>>>();
            let m = FpMatrix::from_rows(p, rows);
            let null = m.nullspace();
            assert_eq!(m.rank() + null.len(), 5);
            for v in null {
                for i in 0..5 {
                    let mut acc = 0;
                    for j in 0..5 {
                        acc = p.add(acc, p.mul(m.get(i, j), v[j]));
                    }
                    assert_eq!(acc, 0);
                }
            }
        }
    }

    #[test]
    fn module_product_in_the_v2_case() {
        // V2, p=2, A = {x2, N(x1)}, M = K_2 = k[V]: (A_+ M)_1 = span{x2}.
        let a = jordan_block_action(fp(2), 2).unwrap();
        let cache = SliceCache::new(a.clone());
        let x2 = Polynomial::variable(fp(2), 2, 1).unwrap();
        let n1 = a
            .norm(
                a.trivial_subgroup(),
                &Polynomial::variable(fp(2), 2, 0).unwrap(),
            )
            .unwrap();
        let gens = vec![x2.clone(), n1];
        let module = cache.kernel_range(2, 1).unwrap();
        let s = module_product_slice(&a, &gens, &module, 1, true).unwrap();
        assert_eq!(s.rank(), 1);
        let basis = monomial_basis(2, 1, grevlex());
        assert_eq!(s.basis_polynomials(&basis).unwrap(), vec![x2]);
        // Degree 0 with positive_only has no contributions at all.
        let s0 = module_product_slice(&a, &gens, &module, 0, true).unwrap();
        assert_eq!(s0.rank(), 0);
    }

    #[test]
    fn module_product_in_the_v3_case() {
        // V3, p=3, A = {a1, a2, a3}, M = K_2: (A_+ M)_1 = span{x3}.
        let p = fp(3);
        let a = jordan_block_action(p, 3).unwrap();
        let cache = SliceCache::new(a.clone());
        let a1 = Polynomial::variable(p, 3, 2).unwrap();
        let a2 = Polynomial::parse("x2^2 + x1*x3 + 2*x2*x3", p, 3).unwrap();
        let a3 = a
            .norm(
                a.trivial_subgroup(),
                &Polynomial::variable(p, 3, 0).unwrap(),
            )
            .unwrap();
        let gens = vec![a1.clone(), a2, a3];
        let module = cache.kernel_range(2, 1).unwrap();
        let s = module_product_slice(&a, &gens, &module, 1, true).unwrap();
        assert_eq!(s.rank(), 1);
        let basis = monomial_basis(3, 1, grevlex());
        assert_eq!(s.basis_polynomials(&basis).unwrap(), vec![a1]);
    }

    #[test]
    fn module_product_rejects_non_invariant_generators() {
        let a = jordan_block_action(fp(3), 3).unwrap();
        let cache = SliceCache::new(a.clone());
        let x1 = Polynomial::variable(fp(3), 3, 0).unwrap();
        let module = cache.kernel_range(1, 2).unwrap();
        assert_eq!(
            module_product_slice(&a, &[x1], &module, 2, true),
            Err(SliceError::BadAlgebraGenerator(0))
        );
    }

    #[test]
    fn transfer_kernel_matches_invariants_in_characteristic_two() {
        // C4 on V3, H = <sigma^2>: f + sigma(f) = 0 iff sigma(f) = f.
        let a = jordan_block_action(Prime::new(2, 2).unwrap(), 3).unwrap();
        let h = a.subgroup(1).unwrap();
        for d in 0..8 {
            let tk = transfer_kernel_slice(&a, h, d).unwrap();
            let inv = kernel_slice(&a, 1, d, grevlex()).unwrap();
            assert_eq!(tk.rank(), inv.rank(), "degree {d}");
        }
    }

    #[test]
    fn transfer_kernel_contains_the_constants() {
        // p divides [G:H], so constants transfer to zero.
        let a = jordan_block_action(Prime::new(2, 2).unwrap(), 3).unwrap();
        let h = a.subgroup(1).unwrap();
        assert_eq!(transfer_kernel_slice(&a, h, 0).unwrap().rank(), 1);
    }

    #[test]
    fn transfer_kernel_rejects_the_full_group() {
        let a = jordan_block_action(fp(3), 3).unwrap();
        assert_eq!(
            transfer_kernel_slice(&a, Subgroup::full(), 2),
            Err(SliceError::ImproperSubgroup)
        );
    }

    #[test]
    fn transfer_kernel_members_transfer_to_zero() {
        let a = jordan_block_action(Prime::new(2, 2).unwrap(), 3).unwrap();
        let h = a.subgroup(1).unwrap();
        for d in 1..6 {
            let tk = transfer_kernel_slice(&a, h, d).unwrap();
            let basis = monomial_basis(3, d, grevlex());
            for f in tk.basis_polynomials(&basis).unwrap() {
                assert!(a.is_subgroup_invariant(h, &f).unwrap());
                assert!(a.transfer(h, &f).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn cache_returns_identical_slices() {
        let a = jordan_block_action(fp(3), 3).unwrap();
        let cache = SliceCache::new(a);
        let s1 = cache.kernel(2, 3).unwrap();
        let s2 = cache.kernel(2, 3).unwrap();
        assert!(Arc::ptr_eq(&s1, &s2));
    }

    #[test]
    fn cache_tolerates_concurrent_lookups() {
        let a = block_v2v2_action(fp(3)).unwrap();
        let cache = std::sync::Arc::new(SliceCache::new(a));
        let handles: Vec<_> = (0..8)
            .map(|t| {
                let cache = std::sync::Arc::clone(&cache);
                std::thread::spawn(move || {
                    let mut ranks = Vec::new();
                    for d in 0..6u32 {
                        ranks.push(cache.kernel(1 + (t % 3), d).unwrap().rank());
                    }
                    ranks
                })
            })
            .collect();
        let results: Vec<Vec<usize>> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for pair in results.chunks(3) {
            if pair.len() > 1 {
                // Threads asking for the same power see the same ranks.
                assert_eq!(pair[0].len(), pair[1].len());
            }
        }
    }

    #[test]
    fn coords_round_trip() {
        let p = fp(5);
        let basis = monomial_basis(3, 3, grevlex());
        let f = Polynomial::parse("2*x1^2*x2 + x2*x3^2 + 4*x3^3", p, 3).unwrap();
        let v = basis.coords_of(&f).unwrap();
        assert_eq!(basis.poly_from_coords(p, &v).unwrap(), f);
        // Inhomogeneous input is rejected.
        let g = Polynomial::parse("x1 + x2^3", p, 3).unwrap();
        assert!(matches!(
            basis.coords_of(&g),
            Err(SliceError::NotHomogeneous(3))
        ));
    }
}
