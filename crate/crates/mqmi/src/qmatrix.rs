//! Dense complex linear algebra for multipartite density matrices.
//!
//! A state lives on an ordered list of subsystems with dimensions
//! `d_1, …, d_n`; the matrix side equals the product of the dims and the
//! first subsystem is the most significant tensor factor, so `|i_1 … i_n⟩`
//! maps to the flat index `i_1 d_2 ⋯ d_n + … + i_n`. Everything here is
//! 0-based; command-line front ends translate from 1-based party labels.
//!
//! Storage is dense and intended for desk-scale work (total dimension up to
//! a few hundred). No sparsity, no GPU.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default numerical tolerance for state validation and eigenvalue clamping.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Hermiticity gate used by [`hermitian_eig`]; slightly looser than
/// [`DEFAULT_TOL`] so states that barely pass validation still decompose.
const HERMITICITY_GATE: f64 = 1e-8;

/// A sorted set of subsystem indices (0-based).
///
/// The empty set is allowed and plays the role of the trivial conditioning
/// system: its entropy is zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubsystemSet(BTreeSet<usize>);

impl SubsystemSet {
    pub fn new<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        SubsystemSet(indices.into_iter().collect())
    }

    pub fn empty() -> Self {
        SubsystemSet(BTreeSet::new())
    }

    pub fn singleton(i: usize) -> Self {
        Self::new([i])
    }

    /// The full set `{0, …, n-1}`.
    pub fn full(n: usize) -> Self {
        Self::new(0..n)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().copied().collect()
    }

    pub fn union(&self, other: &SubsystemSet) -> SubsystemSet {
        SubsystemSet(self.0.union(&other.0).copied().collect())
    }

    pub fn is_disjoint(&self, other: &SubsystemSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn complement(&self, n: usize) -> SubsystemSet {
        SubsystemSet((0..n).filter(|i| !self.0.contains(i)).collect())
    }

    /// Bitmask representation; requires all indices < 64.
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &i| m | (1u64 << i))
    }

    pub fn from_mask(mask: u64) -> SubsystemSet {
        SubsystemSet((0..64).filter(|i| mask & (1u64 << i) != 0).collect())
    }

    /// Errors unless every index is < `n`.
    pub fn check_bounds(&self, n: usize) -> Result<()> {
        match self.0.iter().next_back() {
            Some(&max) if max >= n => Err(Error::InvalidSubsystems(format!(
                "subsystem index {max} out of range for {n} parties"
            ))),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for SubsystemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        SubsystemSet::new(iter)
    }
}

/// A density matrix together with the ordered subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipartiteState {
    matrix: CMatrix,
    dims: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl MultipartiteState {
    /// Wraps a matrix as a multipartite state, checking only structural
    /// consistency (square matrix, side equal to the product of `dims`,
    /// every dim at least 2). Physical validity is reported by [`validate`].
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::DimensionMismatch("dims must be nonempty".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::DimensionMismatch(format!(
                "subsystem dimension {d} < 2"
            )));
        }
        let side: usize = dims.iter().product();
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() != side {
            return Err(Error::DimensionMismatch(format!(
                "matrix side {} does not equal product of dims {}",
                matrix.nrows(),
                side
            )));
        }
        Ok(MultipartiteState {
            matrix,
            dims,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} parties",
                labels.len(),
                self.dims.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `tr ρ²`, real part; equals 1 for pure states.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues in descending
/// order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

/// Largest entrywise modulus of `m − m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let adj = m.adjoint();
    (m - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Errors if the matrix is not square or its hermiticity defect exceeds
/// 1e-8. The decomposition is performed on the hermitized part
/// `(m + m†)/2`, which is exact for genuinely Hermitian input.
pub fn hermitian_eig(m: &CMatrix) -> Result<Spectrum> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let defect = hermiticity_defect(m);
    if defect > HERMITICITY_GATE {
        return Err(Error::InvalidState(format!(
            "matrix is not Hermitian: defect {defect:.3e}"
        )));
    }
    Ok(hermitian_eig_unchecked(m))
}

fn hermitian_eig_unchecked(m: &CMatrix) -> Spectrum {
    let herm = (m + m.adjoint()).scale(0.5);
    let (vals, vecs) = robust_hermitian_eigen(&herm);
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &vecs.column(src));
    }
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigenvalues only, descending; skips the hermiticity gate (callers that
/// hold an already-validated state use this on its reductions).
pub(crate) fn eigenvalues_descending(m: &CMatrix) -> Vec<f64> {
    let herm = (m + m.adjoint()).scale(0.5);
    let (mut vals, _) = robust_hermitian_eigen(&herm);
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    vals
}

/// QR-based eigendecomposition with a cyclic Jacobi fallback.
///
/// nalgebra's symmetric QR iteration occasionally returns NaN on heavily
/// rank-deficient matrices (observed on post-measurement states with large
/// zero blocks); Jacobi is slower but unconditionally convergent for
/// Hermitian input.
fn robust_hermitian_eigen(herm: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = herm.clone().symmetric_eigen();
    if eig.eigenvalues.iter().all(|x| x.is_finite()) {
        return (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors,
        );
    }
    jacobi_hermitian_eigen(herm)
}

fn jacobi_hermitian_eigen(herm: &CMatrix) -> (Vec<f64>, CMatrix) {
    const MAX_SWEEPS: usize = 50;
    let n = herm.nrows();
    let mut a = herm.clone();
    let mut v = CMatrix::identity(n, n);
    let scale: f64 = (0..n)
        .map(|i| a[(i, i)].re.abs())
        .fold(1.0, f64::max);
    let threshold = 1e-14 * scale;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= threshold * 1e-2 {
                    continue;
                }
                let phase = apq / C64::from(mag);
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // plane rotation J: J[p,p]=c, J[p,q]=s·phase, J[q,p]=−s·conj(phase), J[q,q]=c
                let jpq = phase * s;
                let jqp = -phase.conj() * s;
                // A ← A·J on columns p, q
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * c;
                }
                // A ← J†·A on rows p, q
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * jqp.conj();
                    a[(q, k)] = apk * jpq.conj() + aqk * c;
                }
                // keep the matrix numerically Hermitian on the pivot
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                // V ← V·J
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * c;
                }
            }
        }
    }
    let vals: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    (vals, v)
}

/// Result of checking the density-matrix axioms at a given tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub trace_defect: f64,
    pub dims_consistent: bool,
    pub tol: f64,
    pub valid: bool,
}

/// Reports hermiticity defect, minimum eigenvalue and trace defect; the
/// state is valid iff all are within `tol`. The eigenvalue check runs on
/// the hermitized part, so it stays meaningful for slightly defective
/// input.
pub fn validate(state: &MultipartiteState, tol: f64) -> ValidationReport {
    let m = state.matrix();
    let herm_defect = hermiticity_defect(m);
    let side: usize = state.dims().iter().product();
    let dims_consistent = side == m.nrows();
    let evals = eigenvalues_descending(m);
    let min_eigenvalue = evals.last().copied().unwrap_or(0.0);
    let trace_defect = (m.trace() - C64::new(1.0, 0.0)).norm();
    let valid = dims_consistent
        && herm_defect <= tol
        && min_eigenvalue >= -tol
        && trace_defect <= tol;
    ValidationReport {
        hermiticity_defect: herm_defect,
        min_eigenvalue,
        trace_defect,
        dims_consistent,
        tol,
        valid,
    }
}

/// Kronecker product of two states: dims concatenate, party order of `a`
/// precedes `b`.
pub fn tensor(a: &MultipartiteState, b: &MultipartiteState) -> MultipartiteState {
    let matrix = a.matrix().kronecker(b.matrix());
    let mut dims = a.dims().to_vec();
    dims.extend_from_slice(b.dims());
    MultipartiteState {
        matrix,
        dims,
        labels: None,
    }
}

/// Row strides of each subsystem for the flat index (first party most
/// significant).
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Flat offsets of every multi-index over `dims`, where digit `k` advances
/// the offset by `digit_strides[k]`. Enumerates multi-indices with the last
/// digit fastest; the empty list yields a single zero offset.
fn index_offsets(dims: &[usize], digit_strides: &[usize]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    let mut offsets = vec![0usize; total];
    let mut digits = vec![0usize; dims.len()];
    let mut current = 0usize;
    for slot in offsets.iter_mut() {
        *slot = current;
        for pos in (0..dims.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < dims[pos] {
                current += digit_strides[pos];
                break;
            }
            current -= (dims[pos] - 1) * digit_strides[pos];
            digits[pos] = 0;
        }
    }
    offsets
}

/// Reorders subsystems: output position `p` carries what was subsystem
/// `perm[p]` of the input. `perm` must be a bijection on `0..n`.
pub fn permute_subsystems(state: &MultipartiteState, perm: &[usize]) -> Result<MultipartiteState> {
    let n = state.n_parties();
    if perm.len() != n {
        return Err(Error::InvalidSubsystems(format!(
            "permutation length {} for {} parties",
            perm.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidSubsystems(
                "permutation is not a bijection".into(),
            ));
        }
        seen[p] = true;
    }
    let old_strides = strides(state.dims());
    let new_dims: Vec<usize> = perm.iter().map(|&p| state.dims()[p]).collect();
    let digit_strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
    let map = index_offsets(&new_dims, &digit_strides);
    let d = state.total_dim();
    let m = state.matrix();
    let out = CMatrix::from_fn(d, d, |r, c| m[(map[r], map[c])]);
    let labels = state
        .labels()
        .map(|ls| perm.iter().map(|&p| ls[p].clone()).collect());
    Ok(MultipartiteState {
        matrix: out,
        dims: new_dims,
        labels,
    })
}

/// Reduced state on the subsystems in `keep`, in their original relative
/// order. Tracing over the empty complement is the identity operation.
pub fn partial_trace(state: &MultipartiteState, keep: &SubsystemSet) -> Result<MultipartiteState> {
    let n = state.n_parties();
    if keep.is_empty() {
        return Err(Error::InvalidSubsystems(
            "partial trace must keep at least one subsystem".into(),
        ));
    }
    keep.check_bounds(n)?;
    if keep.len() == n {
        return Ok(state.clone());
    }
    let all_strides = strides(state.dims());
    let kept: Vec<usize> = keep.indices();
    let traced: Vec<usize> = (0..n).filter(|i| !keep.contains(*i)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&i| state.dims()[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| state.dims()[i]).collect();
    let kept_strides: Vec<usize> = kept.iter().map(|&i| all_strides[i]).collect();
    let traced_strides: Vec<usize> = traced.iter().map(|&i| all_strides[i]).collect();
    let kept_offsets = index_offsets(&kept_dims, &kept_strides);
    let traced_offsets = index_offsets(&traced_dims, &traced_strides);
    let d_keep: usize = kept_dims.iter().product();
    let m = state.matrix();
    let mut out = CMatrix::zeros(d_keep, d_keep);
    for (r, &ro) in kept_offsets.iter().enumerate() {
        for (c, &co) in kept_offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &to in &traced_offsets {
                acc += m[(ro + to, co + to)];
            }
            out[(r, c)] = acc;
        }
    }
    let labels = state
        .labels()
        .map(|ls| kept.iter().map(|&i| ls[i].clone()).collect());
    Ok(MultipartiteState {
        matrix: out,
        dims: kept_dims,
        labels,
    })
}

/// Kronecker product of a list of operators; errors on an empty list.
pub fn kron_all(mats: &[CMatrix]) -> Result<CMatrix> {
    let (first, rest) = mats
        .split_first()
        .ok_or_else(|| Error::InvalidParams("kron_all of empty list".into()))?;
    let mut acc = first.clone();
    for m in rest {
        acc = acc.kronecker(m);
    }
    Ok(acc)
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` at `target` and identities matching
/// `dims` elsewhere. The operator may change the target's dimension, in
/// which case it must be rectangular `d_out × dims[target]`.
pub fn embed_at(op: &CMatrix, dims: &[usize], target: usize) -> Result<CMatrix> {
    if target >= dims.len() {
        return Err(Error::InvalidSubsystems(format!(
            "target {target} out of range for {} parties",
            dims.len()
        )));
    }
    if op.ncols() != dims[target] {
        return Err(Error::DimensionMismatch(format!(
            "operator acts on dimension {}, party has dimension {}",
            op.ncols(),
            dims[target]
        )));
    }
    let pre: usize = dims[..target].iter().product();
    let post: usize = dims[target + 1..].iter().product();
    let id_pre = CMatrix::identity(pre, pre);
    let id_post = CMatrix::identity(post, post);
    Ok(id_pre.kronecker(op).kronecker(&id_post))
}

/// Computational basis ket `|i⟩` of the given dimension.
pub fn basis_ket(dim: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Rank-1 projector `|v⟩⟨v|`; the vector is used as given (not normalized).
pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}
