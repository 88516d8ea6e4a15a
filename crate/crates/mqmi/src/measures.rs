//! The multiparty mutual-information family on block partitions.
//!
//! All measures are built from entropies of unions of blocks. For a
//! partition into `m` blocks `B_1, …, B_m` with union `U`:
//!
//! * generalized conditional mutual information
//!   `I(B_{k_1}: … :B_{k_j} | Y) = −S(Y) + Σ_{j'} (−1)^{j'+1} Σ S(union ∪ Y)`
//!   over the nonempty sub-selections — the inclusion–exclusion of block
//!   entropies against a conditioning set `Y` (empty `Y` contributes zero);
//! * the mutual-information family
//!   `M_k = Σ_{|J|=k} S(B_J) − C(m−1, k−1) S(U)` for `1 ≤ k ≤ m`, with
//!   `M_1` the total correlation `T`, `M_{m−1}` the dual total correlation
//!   `S`, and `M_m ≡ 0`;
//! * the alternating combination `C = Σ_k (−1)^{k+1} M_k`, equal to the
//!   all-blocks conditional mutual information with empty conditioning;
//! * convex combinations `Σ λ_k M_k` with `λ_k ≥ 0`, `Σ λ_k = 1`.
//!
//! `T` and `S` each come in four equivalent algebraic forms which this
//! module evaluates independently (entropic sum, relative entropy to the
//! product of marginals, chains of bipartite terms, weighted region sums);
//! agreement across forms is a strong internal consistency check.
//!
//! Blocks are first class: a measure over composite parties is the same
//! measure on a coarser partition, so grouping and discarding parties need
//! no special casing. Entropies are memoized per evaluator instance keyed
//! on the party bitmask, and every sum runs in ascending bitmask order, so
//! results are deterministic and block-relabeling leaves them bit-for-bit
//! unchanged.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::entropy::{entropy_from_eigenvalues, relative_entropy, RelativeEntropy};
use crate::error::{Error, Result};
use crate::qmatrix::{
    eigenvalues_descending, hermiticity_defect, partial_trace, permute_subsystems, tensor,
    MultipartiteState, SubsystemSet, C64, DEFAULT_TOL,
};

/// Ordered list of disjoint nonempty blocks of subsystem indices. The
/// union may be a strict subset of the parties, which is how discarded
/// parties are expressed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    blocks: Vec<SubsystemSet>,
}

impl Partition {
    pub fn new(blocks: Vec<SubsystemSet>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("partition has no blocks".into()));
        }
        let mut seen = SubsystemSet::empty();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if !seen.is_disjoint(b) {
                return Err(Error::InvalidPartition("blocks overlap".into()));
            }
            seen = seen.union(b);
        }
        Ok(Partition { blocks })
    }

    /// One singleton block per party, `{0}, {1}, …, {n−1}`.
    pub fn singletons(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(SubsystemSet::singleton).collect(),
        }
    }

    pub fn blocks(&self) -> &[SubsystemSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn union(&self) -> SubsystemSet {
        self.blocks
            .iter()
            .fold(SubsystemSet::empty(), |acc, b| acc.union(b))
    }

    /// Merges block `j` into block `i`, keeping the remaining order.
    pub fn merged(&self, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= self.len() || j >= self.len() {
            return Err(Error::InvalidPartition(format!(
                "cannot merge blocks {i} and {j} of {}",
                self.len()
            )));
        }
        let mut blocks = Vec::with_capacity(self.len() - 1);
        for (idx, b) in self.blocks.iter().enumerate() {
            if idx == j {
                continue;
            }
            if idx == i {
                blocks.push(b.union(&self.blocks[j]));
            } else {
                blocks.push(b.clone());
            }
        }
        Partition::new(blocks)
    }

    /// Drops block `i` (its parties are discarded from the measure).
    pub fn without(&self, i: usize) -> Result<Self> {
        if i >= self.len() || self.len() < 2 {
            return Err(Error::InvalidPartition(format!(
                "cannot drop block {i} of {}",
                self.len()
            )));
        }
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .filter(|(idx, _)| *idx != i)
            .map(|(_, b)| b.clone())
            .collect();
        Partition::new(blocks)
    }

    /// Reorders blocks; measures are symmetric so this must not change any
    /// value.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return Err(Error::InvalidPartition("permutation length mismatch".into()));
        }
        let mut seen = vec![false; self.len()];
        for &p in perm {
            if p >= self.len() || seen[p] {
                return Err(Error::InvalidPartition("not a block permutation".into()));
            }
            seen[p] = true;
        }
        Partition::new(perm.iter().map(|&p| self.blocks[p].clone()).collect())
    }

    /// Grouping for a state enlarged by one announcement register per
    /// party: each party is paired with the register copy it holds,
    /// `{i, n+i}`. Shared announced randomness then shows up as
    /// correlation between the blocks.
    pub fn broadcast_holders(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(|i| SubsystemSet::new([i, n + i])).collect(),
        }
    }

    /// Grouping that assigns every announcement register to the announcing
    /// party's block. The whole measure-and-broadcast event is then a
    /// channel internal to that block, which is what makes the total and
    /// dual correlations provably nonincreasing under it.
    pub fn broadcast_announcer(n: usize, announcer: usize) -> Self {
        Partition {
            blocks: (0..n)
                .map(|i| {
                    if i == announcer {
                        SubsystemSet::new(std::iter::once(i).chain(n..2 * n))
                    } else {
                        SubsystemSet::singleton(i)
                    }
                })
                .collect(),
        }
    }
}

/// Convex weights over `M_1 … M_m`: nonnegative, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParams("empty weight vector".into()));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidParams("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(WeightVector(weights))
    }

    /// The standard basis vector `e_k` (1-based `k`).
    pub fn basis(len: usize, k: usize) -> Result<Self> {
        if k == 0 || k > len {
            return Err(Error::InvalidParams(format!("k = {k} outside 1..={len}")));
        }
        let mut w = vec![0.0; len];
        w[k - 1] = 1.0;
        Ok(WeightVector(w))
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidParams("empty weight vector".into()));
        }
        Ok(WeightVector(vec![1.0 / len as f64; len]))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The four equivalent expressions of the total correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TotalForm {
    /// `Σ S(B_k) − S(U)`
    Entropic,
    /// `D(ρ_U ‖ ρ_{B_1} ⊗ … ⊗ ρ_{B_m})`
    Relative,
    /// `Σ_k I(B_k : B_{k+1} … B_m)`
    Chain,
    /// `Σ_{j≥2} (j−1) Σ_{|J|=j} I(B_J | rest)` over block subsets
    Regions,
}

/// The four equivalent expressions of the dual total correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualForm {
    /// `Σ S(U∖B_k) − (m−1) S(U)`
    Entropic,
    /// `I(B_1 : rest) + Σ_k I(B_k : suffix | prefix)`
    Chain,
    /// `Σ_{j≥2} Σ_{|J|=j} I(B_J | rest)` over block subsets
    Regions,
    /// `S(U) − Σ_k I(B_k | U∖B_k)`
    Complement,
}

/// Which measure to evaluate on a partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "id")]
pub enum MeasureId {
    /// `M_k`
    MutualK { k: usize },
    /// Total correlation `T = M_1` in the requested form.
    Total { form: TotalForm },
    /// Dual total correlation `S = M_{m−1}` in the requested form.
    Dual { form: DualForm },
    /// Convex combination `Σ λ_k M_k`.
    Combined { weights: Vec<f64> },
    /// Alternating combination `C = Σ (−1)^{k+1} M_k`.
    Common,
    /// Conditional mutual information of the blocks given `cond`.
    Gcmi { cond: SubsystemSet },
}

impl MeasureId {
    pub fn name(&self) -> String {
        match self {
            MeasureId::MutualK { k } => format!("M_{k}"),
            MeasureId::Total { .. } => "T".into(),
            MeasureId::Dual { .. } => "S".into(),
            MeasureId::Combined { .. } => "M_combined".into(),
            MeasureId::Common => "C".into(),
            MeasureId::Gcmi { .. } => "I".into(),
        }
    }
}

/// One entropy term of a measure: `coefficient · S(parties)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureTerm {
    pub parties: Vec<usize>,
    pub coefficient: f64,
    pub entropy: f64,
}

/// A measure value with the partition context that produced it and its
/// entropy decomposition; `value` equals `Σ coefficient·entropy` whenever
/// `terms` is nonempty (the relative-entropy form reports no terms).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureReport {
    pub name: String,
    pub value: f64,
    pub blocks: Vec<Vec<usize>>,
    pub conditioning: Vec<usize>,
    pub terms: Vec<MeasureTerm>,
}

/// The seven regions of a tripartite cut plus the two total correlations
/// and the residuals of their decompositions into regions.
#[derive(Debug, Clone, Serialize)]
pub struct TripartiteRegions {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub ab: f64,
    pub ac: f64,
    pub bc: f64,
    pub abc: f64,
    pub total: f64,
    pub dual: f64,
    pub total_regions_residual: f64,
    pub total_chain_residual: f64,
    pub dual_regions_residual: f64,
    pub dual_chain_residual: f64,
    pub dual_complement_residual: f64,
}

/// Decomposition of the correlation between a pair of blocks and a third
/// party (the eavesdropper reading): `leakage = I(AB : E)` with the three
/// conditional pieces it splits into.
#[derive(Debug, Clone, Serialize)]
pub struct SecretSharingReport {
    pub leakage: f64,
    pub a_e_given_b: f64,
    pub b_e_given_a: f64,
    pub common_abe: f64,
    pub a_b_given_e: f64,
    pub pair_mutual: f64,
    /// `|I(A:E|B) + I(B:E|A) + I(A:B:E) − leakage|`
    pub sum_residual: f64,
    /// `|M_2(A:B:E) − I(A:B|E) − leakage|`
    pub pair_residual: f64,
}

/// A named identity residual.
#[derive(Debug, Clone, Serialize)]
pub struct NamedResidual {
    pub name: String,
    pub residual: f64,
}

pub(crate) fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i as u128 + 1);
    }
    acc as f64
}

/// Memoizing measure evaluator over one validated state.
///
/// Entropies of party subsets are cached by bitmask, so a full `M_1 … M_m`
/// profile costs one eigensolve per distinct subset.
pub struct Evaluator<'a> {
    state: &'a MultipartiteState,
    cache: RefCell<HashMap<u64, f64>>,
}

impl<'a> Evaluator<'a> {
    /// Validates the state at the default tolerance and seeds the entropy
    /// cache with the full-system entropy.
    pub fn new(state: &'a MultipartiteState) -> Result<Self> {
        let herm = hermiticity_defect(state.matrix());
        if herm > DEFAULT_TOL {
            return Err(Error::InvalidState(format!(
                "hermiticity defect {herm:.3e}"
            )));
        }
        let trace_defect = (state.trace() - C64::new(1.0, 0.0)).norm();
        if trace_defect > DEFAULT_TOL {
            return Err(Error::InvalidState(format!(
                "trace defect {trace_defect:.3e}"
            )));
        }
        let evals = eigenvalues_descending(state.matrix());
        let min = evals.last().copied().unwrap_or(0.0);
        if min < -DEFAULT_TOL {
            return Err(Error::InvalidState(format!(
                "min eigenvalue {min:.3e}"
            )));
        }
        let cache = RefCell::new(HashMap::new());
        let full = SubsystemSet::full(state.n_parties()).mask();
        cache
            .borrow_mut()
            .insert(full, entropy_from_eigenvalues(&evals));
        Ok(Evaluator { state, cache })
    }

    pub fn state(&self) -> &MultipartiteState {
        self.state
    }

    fn entropy_mask(&self, mask: u64) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        if let Some(&s) = self.cache.borrow().get(&mask) {
            return s;
        }
        let set = SubsystemSet::from_mask(mask);
        let reduced =
            partial_trace(self.state, &set).expect("cached masks are bounds-checked upstream");
        let s = entropy_from_eigenvalues(&eigenvalues_descending(reduced.matrix()));
        self.cache.borrow_mut().insert(mask, s);
        s
    }

    /// Entropy of the reduced state on `set`; the empty set has entropy 0.
    pub fn entropy_of(&self, set: &SubsystemSet) -> Result<f64> {
        set.check_bounds(self.state.n_parties())?;
        Ok(self.entropy_mask(set.mask()))
    }

    fn check_partition(&self, parts: &Partition) -> Result<()> {
        parts.union().check_bounds(self.state.n_parties())
    }

    /// Sums `coefficient · S(mask)` in ascending mask order after merging
    /// duplicate masks, so the result does not depend on how the terms
    /// were enumerated. Block relabelings therefore reproduce values bit
    /// for bit.
    fn sum_canonical(&self, mut terms: Vec<(u64, f64)>) -> f64 {
        terms.sort_by_key(|t| t.0);
        let mut value = 0.0;
        let mut i = 0;
        while i < terms.len() {
            let mask = terms[i].0;
            let mut coeff = 0.0;
            while i < terms.len() && terms[i].0 == mask {
                coeff += terms[i].1;
                i += 1;
            }
            if coeff != 0.0 {
                value += coeff * self.entropy_mask(mask);
            }
        }
        value
    }

    /// Inclusion–exclusion over the nonempty block selections, conditioned
    /// on `cond` (bitmask form). Disjoint nonempty blocks make every
    /// selection's union distinct, so the sign is a function of the union.
    fn gcmi_masks(&self, block_masks: &[u64], cond: u64) -> f64 {
        let m = block_masks.len();
        let mut terms = Vec::with_capacity(1 << m);
        terms.push((cond, -1.0));
        for sel in 1u64..(1u64 << m) {
            let mut union = cond;
            for (i, &bm) in block_masks.iter().enumerate() {
                if sel & (1 << i) != 0 {
                    union |= bm;
                }
            }
            let sign = if sel.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
            terms.push((union, sign));
        }
        self.sum_canonical(terms)
    }

    fn mqmi_masks(&self, block_masks: &[u64], k: usize) -> f64 {
        let m = block_masks.len();
        let full = block_masks.iter().fold(0u64, |a, &b| a | b);
        let mut terms = Vec::new();
        for sel in 1u64..(1u64 << m) {
            if sel.count_ones() as usize != k {
                continue;
            }
            let mut union = 0u64;
            for (i, &bm) in block_masks.iter().enumerate() {
                if sel & (1 << i) != 0 {
                    union |= bm;
                }
            }
            terms.push((union, 1.0));
        }
        terms.push((full, -binom(m - 1, k - 1)));
        self.sum_canonical(terms)
    }

    fn masks(parts: &Partition) -> Vec<u64> {
        parts.blocks().iter().map(|b| b.mask()).collect()
    }

    /// Generalized conditional mutual information of the blocks given
    /// `cond`. With a single block this is the conditional entropy
    /// `S(B|Y)`; the value may be negative.
    pub fn gcmi(&self, blocks: &Partition, cond: &SubsystemSet) -> Result<f64> {
        self.check_partition(blocks)?;
        cond.check_bounds(self.state.n_parties())?;
        if !blocks.union().is_disjoint(cond) {
            return Err(Error::InvalidSubsystems(
                "conditioning set overlaps the blocks".into(),
            ));
        }
        Ok(self.gcmi_masks(&Self::masks(blocks), cond.mask()))
    }

    /// `M_k` over the blocks of the partition, `1 ≤ k ≤ m`.
    pub fn mqmi(&self, parts: &Partition, k: usize) -> Result<f64> {
        self.check_partition(parts)?;
        if k == 0 || k > parts.len() {
            return Err(Error::InvalidParams(format!(
                "k = {k} outside 1..={}",
                parts.len()
            )));
        }
        Ok(self.mqmi_masks(&Self::masks(parts), k))
    }

    /// All of `M_1 … M_m` sharing one entropy cache.
    pub fn mqmi_profile(&self, parts: &Partition) -> Result<Vec<f64>> {
        self.check_partition(parts)?;
        let masks = Self::masks(parts);
        Ok((1..=parts.len())
            .map(|k| self.mqmi_masks(&masks, k))
            .collect())
    }

    /// Total correlation `T = M_1` in the requested form.
    pub fn total_correlation(&self, parts: &Partition, form: TotalForm) -> Result<f64> {
        self.check_partition(parts)?;
        let masks = Self::masks(parts);
        let full = masks.iter().fold(0u64, |a, &b| a | b);
        match form {
            TotalForm::Entropic => Ok(masks.iter().map(|&b| self.entropy_mask(b)).sum::<f64>()
                - self.entropy_mask(full)),
            TotalForm::Chain => {
                let m = masks.len();
                let mut suffix = vec![0u64; m + 1];
                for i in (0..m).rev() {
                    suffix[i] = suffix[i + 1] | masks[i];
                }
                let mut value = 0.0;
                for i in 0..m.saturating_sub(1) {
                    value += self.entropy_mask(masks[i]) + self.entropy_mask(suffix[i + 1])
                        - self.entropy_mask(masks[i] | suffix[i + 1]);
                }
                Ok(value)
            }
            TotalForm::Regions => {
                let m = masks.len();
                let mut value = 0.0;
                for sel in 1u64..(1u64 << m) {
                    let j = sel.count_ones() as usize;
                    if j < 2 {
                        continue;
                    }
                    let chosen: Vec<u64> = (0..m)
                        .filter(|i| sel & (1 << i) != 0)
                        .map(|i| masks[i])
                        .collect();
                    let rest = (0..m)
                        .filter(|i| sel & (1 << i) == 0)
                        .fold(0u64, |a, i| a | masks[i]);
                    value += (j - 1) as f64 * self.gcmi_masks(&chosen, rest);
                }
                Ok(value)
            }
            TotalForm::Relative => self.total_relative(parts),
        }
    }

    fn total_relative(&self, parts: &Partition) -> Result<f64> {
        let union = parts.union();
        let rho_u = if union.len() == self.state.n_parties() {
            self.state.clone()
        } else {
            partial_trace(self.state, &union)?
        };
        let mut marginals = Vec::with_capacity(parts.len());
        for b in parts.blocks() {
            marginals.push(partial_trace(self.state, b)?);
        }
        let mut product = marginals[0].clone();
        for m in &marginals[1..] {
            product = tensor(&product, m);
        }
        // Align the product's party order (block order) with the reduced
        // state's ascending order.
        let order_src: Vec<usize> = parts
            .blocks()
            .iter()
            .flat_map(|b| b.indices())
            .collect();
        let sorted = union.indices();
        let perm: Vec<usize> = sorted
            .iter()
            .map(|party| order_src.iter().position(|x| x == party).unwrap())
            .collect();
        let aligned = permute_subsystems(&product, &perm)?;
        match relative_entropy(&rho_u, &aligned, DEFAULT_TOL)? {
            RelativeEntropy::Finite(v) => Ok(v),
            RelativeEntropy::Infinite => Err(Error::InvalidState(
                "support failure against the product of own marginals".into(),
            )),
        }
    }

    /// Dual total correlation `S = M_{m−1}` in the requested form.
    pub fn dual_total_correlation(&self, parts: &Partition, form: DualForm) -> Result<f64> {
        self.check_partition(parts)?;
        let masks = Self::masks(parts);
        let m = masks.len();
        let full = masks.iter().fold(0u64, |a, &b| a | b);
        match form {
            DualForm::Entropic => {
                let sum: f64 = masks
                    .iter()
                    .map(|&b| self.entropy_mask(full & !b))
                    .sum();
                Ok(sum - (m as f64 - 1.0) * self.entropy_mask(full))
            }
            DualForm::Chain => {
                let mut value = self.entropy_mask(masks[0]) + self.entropy_mask(full & !masks[0])
                    - self.entropy_mask(full);
                let mut prefix = masks[0];
                for i in 1..m.saturating_sub(1) {
                    let suffix = (i + 1..m).fold(0u64, |a, j| a | masks[j]);
                    value += self.entropy_mask(prefix | masks[i])
                        + self.entropy_mask(prefix | suffix)
                        - self.entropy_mask(prefix)
                        - self.entropy_mask(full);
                    prefix |= masks[i];
                }
                Ok(value)
            }
            DualForm::Regions => {
                let mut value = 0.0;
                for sel in 1u64..(1u64 << m) {
                    let j = sel.count_ones() as usize;
                    if j < 2 {
                        continue;
                    }
                    let chosen: Vec<u64> = (0..m)
                        .filter(|i| sel & (1 << i) != 0)
                        .map(|i| masks[i])
                        .collect();
                    let rest = (0..m)
                        .filter(|i| sel & (1 << i) == 0)
                        .fold(0u64, |a, i| a | masks[i]);
                    value += self.gcmi_masks(&chosen, rest);
                }
                Ok(value)
            }
            DualForm::Complement => {
                let s_full = self.entropy_mask(full);
                let strictly_local: f64 = masks
                    .iter()
                    .map(|&b| s_full - self.entropy_mask(full & !b))
                    .sum();
                Ok(s_full - strictly_local)
            }
        }
    }

    /// `Σ λ_k M_k` with convex weights, one per block count.
    pub fn combined(&self, parts: &Partition, weights: &WeightVector) -> Result<f64> {
        self.check_partition(parts)?;
        if weights.len() != parts.len() {
            return Err(Error::InvalidParams(format!(
                "{} weights for {} blocks",
                weights.len(),
                parts.len()
            )));
        }
        let masks = Self::masks(parts);
        Ok(weights
            .weights()
            .iter()
            .enumerate()
            .map(|(i, &w)| w * self.mqmi_masks(&masks, i + 1))
            .sum())
    }

    /// Alternating combination `C = Σ (−1)^{k+1} M_k`; equals the
    /// all-blocks conditional mutual information with empty conditioning.
    /// May be negative, and vanishes for pure states with an odd number of
    /// blocks.
    pub fn common_information(&self, parts: &Partition) -> Result<f64> {
        self.check_partition(parts)?;
        let masks = Self::masks(parts);
        Ok((1..=masks.len())
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * self.mqmi_masks(&masks, k)
            })
            .sum())
    }

    /// The seven region values of a three-block cut, the two total
    /// correlations, and the residuals of their decompositions.
    pub fn tripartite_regions(&self, parts: &Partition) -> Result<TripartiteRegions> {
        self.check_partition(parts)?;
        if parts.len() != 3 {
            return Err(Error::InvalidPartition(format!(
                "tripartite regions need exactly 3 blocks, got {}",
                parts.len()
            )));
        }
        let masks = Self::masks(parts);
        let (a, b, c) = (masks[0], masks[1], masks[2]);
        let region_a = self.gcmi_masks(&[a], b | c);
        let region_b = self.gcmi_masks(&[b], a | c);
        let region_c = self.gcmi_masks(&[c], a | b);
        let region_ab = self.gcmi_masks(&[a, b], c);
        let region_ac = self.gcmi_masks(&[a, c], b);
        let region_bc = self.gcmi_masks(&[b, c], a);
        let region_abc = self.gcmi_masks(&[a, b, c], 0);
        let total = self.total_correlation(parts, TotalForm::Entropic)?;
        let dual = self.dual_total_correlation(parts, DualForm::Entropic)?;
        let mutual = |x: u64, y: u64| {
            self.entropy_mask(x) + self.entropy_mask(y) - self.entropy_mask(x | y)
        };
        let cond_mutual = |x: u64, y: u64, z: u64| {
            self.entropy_mask(x | z) + self.entropy_mask(y | z)
                - self.entropy_mask(z)
                - self.entropy_mask(x | y | z)
        };
        Ok(TripartiteRegions {
            a: region_a,
            b: region_b,
            c: region_c,
            ab: region_ab,
            ac: region_ac,
            bc: region_bc,
            abc: region_abc,
            total,
            dual,
            total_regions_residual: (total
                - (region_ab + region_ac + region_bc + 2.0 * region_abc))
                .abs(),
            total_chain_residual: (total - (mutual(a, b | c) + mutual(b, c))).abs(),
            dual_regions_residual: (dual
                - (region_ab + region_ac + region_bc + region_abc))
                .abs(),
            dual_chain_residual: (dual - (mutual(a, b | c) + cond_mutual(b, c, a))).abs(),
            dual_complement_residual: (dual
                - (self.entropy_mask(a | b | c) - region_a - region_b - region_c))
                .abs(),
        })
    }

    /// `|M_p + M_q − Σ I(B_J : B_J̄)|` over all size-`p` block subsets,
    /// with `q = m − p`.
    pub fn partition_identity_residual(&self, parts: &Partition, p: usize) -> Result<f64> {
        self.check_partition(parts)?;
        let m = parts.len();
        if p == 0 || p >= m {
            return Err(Error::InvalidParams(format!(
                "p = {p} outside 1..={}",
                m - 1
            )));
        }
        let masks = Self::masks(parts);
        let full = masks.iter().fold(0u64, |a, &b| a | b);
        let lhs = self.mqmi_masks(&masks, p) + self.mqmi_masks(&masks, m - p);
        let mut rhs = 0.0;
        for sel in 1u64..(1u64 << m) {
            if sel.count_ones() as usize != p {
                continue;
            }
            let part = (0..m)
                .filter(|i| sel & (1 << i) != 0)
                .fold(0u64, |a, i| a | masks[i]);
            rhs += self.entropy_mask(part) + self.entropy_mask(full & !part)
                - self.entropy_mask(full);
        }
        Ok((lhs - rhs).abs())
    }

    /// Absolute residuals of the recurrence and step identities relating
    /// measures on `m` and `m−1` blocks; all vanish analytically.
    pub fn recurrence_residuals(&self, parts: &Partition) -> Result<Vec<NamedResidual>> {
        self.check_partition(parts)?;
        let m = parts.len();
        if m < 3 {
            return Err(Error::InvalidPartition(format!(
                "recurrence identities need at least 3 blocks, got {m}"
            )));
        }
        let masks = Self::masks(parts);
        let full = masks.iter().fold(0u64, |a, &b| a | b);
        let mutual = |x: u64, y: u64| {
            self.entropy_mask(x) + self.entropy_mask(y) - self.entropy_mask(x | y)
        };
        let cond_mutual = |x: u64, y: u64, z: u64| {
            self.entropy_mask(x | z) + self.entropy_mask(y | z)
                - self.entropy_mask(z)
                - self.entropy_mask(x | y | z)
        };
        let sub_masks = |skip: usize| -> Vec<u64> {
            masks
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &b)| b)
                .collect()
        };
        let mut out = Vec::new();

        let total = self.mqmi_masks(&masks, 1);
        let dual = self.mqmi_masks(&masks, m - 1);

        // Peeling one block off the total correlation.
        for i in 0..m {
            let rest = full & !masks[i];
            let reduced = self.mqmi_masks(&sub_masks(i), 1);
            out.push(NamedResidual {
                name: format!("total_peel_{i}"),
                residual: (total - reduced - mutual(rest, masks[i])).abs(),
            });
        }

        // Merging a pair of blocks.
        for i in 0..m {
            for j in (i + 1)..m {
                let merged = Self::masks(&parts.merged(i, j)?);
                out.push(NamedResidual {
                    name: format!("total_merge_{i}_{j}"),
                    residual: (total - self.mqmi_masks(&merged, 1) - mutual(masks[i], masks[j]))
                        .abs(),
                });
                let rest = full & !(masks[i] | masks[j]);
                out.push(NamedResidual {
                    name: format!("dual_merge_{i}_{j}"),
                    residual: (dual
                        - self.mqmi_masks(&merged, m - 2)
                        - cond_mutual(masks[i], masks[j], rest))
                    .abs(),
                });
            }
        }

        // M_2 against the pairwise mutual informations.
        let pairwise: f64 = (0..m)
            .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
            .map(|(i, j)| mutual(masks[i], masks[j]))
            .sum();
        out.push(NamedResidual {
            name: "pair_vs_single".into(),
            residual: (self.mqmi_masks(&masks, 2) + pairwise - (m as f64 - 1.0) * total).abs(),
        });

        // Step relation between consecutive k.
        for k in 1..m {
            let mut cross = 0.0;
            for sel in 1u64..(1u64 << m) {
                if sel.count_ones() as usize != k {
                    continue;
                }
                let part = (0..m)
                    .filter(|i| sel & (1 << i) != 0)
                    .fold(0u64, |a, i| a | masks[i]);
                for (i, &bm) in masks.iter().enumerate() {
                    if sel & (1 << i) == 0 {
                        cross += mutual(part, bm);
                    }
                }
            }
            let lhs = (k as f64 + 1.0) * self.mqmi_masks(&masks, k + 1) + cross;
            let rhs = (m - k) as f64 * self.mqmi_masks(&masks, k)
                + binom(m - 1, k) * total;
            out.push(NamedResidual {
                name: format!("k_step_{k}"),
                residual: (lhs - rhs).abs(),
            });
        }

        // Dual correlation against the (m−1)-block dual after dropping the
        // last block.
        let last = m - 1;
        let head = sub_masks(last);
        let reduced_dual = self.mqmi_masks(&head, m - 2);
        let correction: f64 = (0..last)
            .map(|k| {
                self.entropy_mask(full & !masks[k]) + self.entropy_mask(full & !masks[last])
                    - self.entropy_mask(full)
                    - self.entropy_mask(full & !(masks[k] | masks[last]))
            })
            .sum();
        out.push(NamedResidual {
            name: "tail_drop".into(),
            residual: (dual - reduced_dual - correction).abs(),
        });

        // M_2 recurrence through conditional mutual informations.
        let head_full = full & !masks[last];
        let cond_sum: f64 = (0..last)
            .map(|j| cond_mutual(masks[last], head_full & !masks[j], masks[j]))
            .sum();
        let rhs = self.mqmi_masks(&head, 2) + self.mqmi_masks(&head, 1) + cond_sum;
        out.push(NamedResidual {
            name: "pair_recurrence".into(),
            residual: (self.mqmi_masks(&masks, 2) - rhs).abs(),
        });

        Ok(out)
    }

    /// Splits the correlation between `A ∪ B` and `E` into its conditional
    /// pieces; the three disjoint sets must cover all parties.
    pub fn secret_sharing_leakage(
        &self,
        a: &SubsystemSet,
        b: &SubsystemSet,
        e: &SubsystemSet,
    ) -> Result<SecretSharingReport> {
        let n = self.state.n_parties();
        for set in [a, b, e] {
            set.check_bounds(n)?;
            if set.is_empty() {
                return Err(Error::InvalidSubsystems(
                    "A, B, E must be nonempty".into(),
                ));
            }
        }
        if !a.is_disjoint(b) || !a.is_disjoint(e) || !b.is_disjoint(e) {
            return Err(Error::InvalidSubsystems(
                "A, B, E must be pairwise disjoint".into(),
            ));
        }
        if a.union(b).union(e).len() != n {
            return Err(Error::InvalidSubsystems(
                "A, B, E must cover all parties".into(),
            ));
        }
        let (am, bm, em) = (a.mask(), b.mask(), e.mask());
        let mutual = |x: u64, y: u64| {
            self.entropy_mask(x) + self.entropy_mask(y) - self.entropy_mask(x | y)
        };
        let cond_mutual = |x: u64, y: u64, z: u64| {
            self.entropy_mask(x | z) + self.entropy_mask(y | z)
                - self.entropy_mask(z)
                - self.entropy_mask(x | y | z)
        };
        let leakage = mutual(am | bm, em);
        let a_e_given_b = cond_mutual(am, em, bm);
        let b_e_given_a = cond_mutual(bm, em, am);
        let common_abe = self.gcmi_masks(&[am, bm, em], 0);
        let a_b_given_e = cond_mutual(am, bm, em);
        let pair_mutual = self.mqmi_masks(&[am, bm, em], 2);
        Ok(SecretSharingReport {
            leakage,
            a_e_given_b,
            b_e_given_a,
            common_abe,
            a_b_given_e,
            pair_mutual,
            sum_residual: (a_e_given_b + b_e_given_a + common_abe - leakage).abs(),
            pair_residual: (pair_mutual - a_b_given_e - leakage).abs(),
        })
    }

    /// Evaluates a measure by id.
    pub fn evaluate(&self, id: &MeasureId, parts: &Partition) -> Result<f64> {
        match id {
            MeasureId::MutualK { k } => self.mqmi(parts, *k),
            MeasureId::Total { form } => self.total_correlation(parts, *form),
            MeasureId::Dual { form } => self.dual_total_correlation(parts, *form),
            MeasureId::Combined { weights } => {
                self.combined(parts, &WeightVector::new(weights.clone())?)
            }
            MeasureId::Common => self.common_information(parts),
            MeasureId::Gcmi { cond } => self.gcmi(parts, cond),
        }
    }

    /// Evaluates a measure and reports its entropy decomposition.
    pub fn report(&self, id: &MeasureId, parts: &Partition) -> Result<MeasureReport> {
        let value = self.evaluate(id, parts)?;
        let terms = match id {
            MeasureId::Total {
                form: TotalForm::Relative,
            } => Vec::new(),
            _ => {
                let lincomb = self.lincomb(id, parts)?;
                lincomb
                    .into_iter()
                    .filter(|(_, c)| c.abs() > 1e-12)
                    .map(|(mask, coefficient)| MeasureTerm {
                        parties: SubsystemSet::from_mask(mask).indices(),
                        coefficient,
                        entropy: self.entropy_mask(mask),
                    })
                    .collect()
            }
        };
        let conditioning = match id {
            MeasureId::Gcmi { cond } => cond.indices(),
            _ => Vec::new(),
        };
        Ok(MeasureReport {
            name: id.name(),
            value,
            blocks: parts.blocks().iter().map(|b| b.indices()).collect(),
            conditioning,
            terms,
        })
    }

    /// Entropy coefficients of a measure as a map from party bitmask to
    /// coefficient; the relative form has no such decomposition.
    fn lincomb(&self, id: &MeasureId, parts: &Partition) -> Result<BTreeMap<u64, f64>> {
        let masks = Self::masks(parts);
        let full = masks.iter().fold(0u64, |a, &b| a | b);
        let mut map: BTreeMap<u64, f64> = BTreeMap::new();
        let add = |map: &mut BTreeMap<u64, f64>, mask: u64, c: f64| {
            *map.entry(mask).or_insert(0.0) += c;
        };
        let add_mqmi = |map: &mut BTreeMap<u64, f64>, k: usize, scale: f64| {
            let m = masks.len();
            for sel in 1u64..(1u64 << m) {
                if sel.count_ones() as usize != k {
                    continue;
                }
                let union = (0..m)
                    .filter(|i| sel & (1 << i) != 0)
                    .fold(0u64, |a, i| a | masks[i]);
                *map.entry(union).or_insert(0.0) += scale;
            }
            *map.entry(full).or_insert(0.0) += -scale * binom(m - 1, k - 1);
        };
        match id {
            MeasureId::MutualK { k } => add_mqmi(&mut map, *k, 1.0),
            MeasureId::Common => {
                for k in 1..=masks.len() {
                    add_mqmi(&mut map, k, if k % 2 == 1 { 1.0 } else { -1.0 });
                }
            }
            MeasureId::Combined { weights } => {
                let w = WeightVector::new(weights.clone())?;
                if w.len() != masks.len() {
                    return Err(Error::InvalidParams(format!(
                        "{} weights for {} blocks",
                        w.len(),
                        masks.len()
                    )));
                }
                for (i, &wk) in w.weights().iter().enumerate() {
                    add_mqmi(&mut map, i + 1, wk);
                }
            }
            MeasureId::Gcmi { cond } => {
                let c = cond.mask();
                add(&mut map, c, -1.0);
                let m = masks.len();
                for sel in 1u64..(1u64 << m) {
                    let union = (0..m)
                        .filter(|i| sel & (1 << i) != 0)
                        .fold(c, |a, i| a | masks[i]);
                    let sign = if sel.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
                    add(&mut map, union, sign);
                }
            }
            MeasureId::Total { .. } => {
                for &b in &masks {
                    add(&mut map, b, 1.0);
                }
                add(&mut map, full, -1.0);
            }
            MeasureId::Dual { .. } => {
                for &b in &masks {
                    add(&mut map, full & !b, 1.0);
                }
                add(&mut map, full, -(masks.len() as f64 - 1.0));
            }
        }
        Ok(map)
    }
}

/// One-shot convenience wrappers; suites should hold an [`Evaluator`] to
/// share the entropy cache across calls.
pub fn gcmi(state: &MultipartiteState, blocks: &Partition, cond: &SubsystemSet) -> Result<f64> {
    Evaluator::new(state)?.gcmi(blocks, cond)
}

pub fn mqmi(state: &MultipartiteState, parts: &Partition, k: usize) -> Result<f64> {
    Evaluator::new(state)?.mqmi(parts, k)
}

pub fn mqmi_profile(state: &MultipartiteState, parts: &Partition) -> Result<Vec<f64>> {
    Evaluator::new(state)?.mqmi_profile(parts)
}

pub fn total_correlation(
    state: &MultipartiteState,
    parts: &Partition,
    form: TotalForm,
) -> Result<f64> {
    Evaluator::new(state)?.total_correlation(parts, form)
}

pub fn dual_total_correlation(
    state: &MultipartiteState,
    parts: &Partition,
    form: DualForm,
) -> Result<f64> {
    Evaluator::new(state)?.dual_total_correlation(parts, form)
}

pub fn common_information(state: &MultipartiteState, parts: &Partition) -> Result<f64> {
    Evaluator::new(state)?.common_information(parts)
}

pub const TOTAL_FORMS: [TotalForm; 4] = [
    TotalForm::Entropic,
    TotalForm::Relative,
    TotalForm::Chain,
    TotalForm::Regions,
];

pub const DUAL_FORMS: [DualForm; 4] = [
    DualForm::Entropic,
    DualForm::Chain,
    DualForm::Regions,
    DualForm::Complement,
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::binary_entropy;
    use crate::states::{cluster4, dicke, ggz, hs4, random_mixed, random_pure, StateSpec};

    fn eval(state: &MultipartiteState) -> Evaluator<'_> {
        Evaluator::new(state).unwrap()
    }

    #[test]
    fn gcmi_of_bell_pair() {
        let bell = ggz(2, 0.5, 0.0).unwrap();
        let v = gcmi(&bell, &Partition::singletons(2), &SubsystemSet::empty()).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn gcmi_of_ghz_conditioned_on_third() {
        let ghz = ggz(3, 0.5, 0.0).unwrap();
        let parts = Partition::new(vec![SubsystemSet::singleton(0), SubsystemSet::singleton(1)])
            .unwrap();
        let v = gcmi(&ghz, &parts, &SubsystemSet::singleton(2)).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gcmi_of_pure_three_party_vanishes() {
        let state = random_pure(&[2, 2, 2], 8).unwrap();
        let v = gcmi(&state, &Partition::singletons(3), &SubsystemSet::empty()).unwrap();
        assert!(v.abs() < 1e-9);
    }

    #[test]
    fn gcmi_single_block_is_conditional_entropy() {
        let ghz = ggz(3, 0.5, 0.0).unwrap();
        let e = eval(&ghz);
        let parts = Partition::new(vec![SubsystemSet::singleton(0)]).unwrap();
        let v = e.gcmi(&parts, &SubsystemSet::new([1, 2])).unwrap();
        // S(ABC) − S(BC) = 0 − 1
        assert!((v + 1.0).abs() < 1e-10);
    }

    #[test]
    fn gcmi_rejects_overlapping_conditioning() {
        let ghz = ggz(3, 0.5, 0.0).unwrap();
        let parts = Partition::new(vec![SubsystemSet::singleton(0)]).unwrap();
        assert!(gcmi(&ghz, &parts, &SubsystemSet::singleton(0)).is_err());
    }

    #[test]
    fn cluster_profile_matches_hand_values() {
        let state = cluster4();
        let profile = mqmi_profile(&state, &Partition::singletons(4)).unwrap();
        let expected = [4.0, 10.0, 4.0, 0.0];
        for (got, want) in profile.iter().zip(expected) {
            assert!((got - want).abs() < 1e-9, "{profile:?}");
        }
        let c = common_information(&state, &Partition::singletons(4)).unwrap();
        assert!((c + 2.0).abs() < 1e-9);
    }

    #[test]
    fn hs4_profile_matches_hand_values() {
        // Pair marginals all share the spectrum {1/2, 1/6, 1/6, 1/6}.
        let pair_entropy = 0.5 + 0.5 * 6f64.log2();
        let state = hs4();
        let profile = mqmi_profile(&state, &Partition::singletons(4)).unwrap();
        assert!((profile[0] - 4.0).abs() < 1e-9);
        assert!((profile[1] - 6.0 * pair_entropy).abs() < 1e-9, "{profile:?}");
        assert!((profile[2] - 4.0).abs() < 1e-9);
        assert_eq!(profile[3], 0.0);
        let c = common_information(&state, &Partition::singletons(4)).unwrap();
        assert!((c - (8.0 - 6.0 * pair_entropy)).abs() < 1e-9);
    }

    #[test]
    fn dicke_values_match_marginal_spectra() {
        // Pair marginal of the five-qubit single-excitation state has
        // spectrum {3/5, 2/5}; of the two-excitation state {6/10, 3/10, 1/10}.
        let w5 = dicke(5, 1).unwrap();
        let m3 = mqmi(&w5, &Partition::singletons(5), 3).unwrap();
        let h25 = binary_entropy(0.4).unwrap();
        assert!((m3 - 10.0 * h25).abs() < 1e-9);

        let d52 = dicke(5, 2).unwrap();
        let pair = -(0.6f64 * 0.6f64.log2() + 0.3 * 0.3f64.log2() + 0.1 * 0.1f64.log2());
        let m2 = mqmi(&d52, &Partition::singletons(5), 2).unwrap();
        assert!((m2 - 10.0 * pair).abs() < 1e-9);

        let d42 = dicke(4, 2).unwrap();
        let pair42 = (1.0 / 3.0) * 6f64.log2() + (2.0 / 3.0) * 1.5f64.log2();
        let m2 = mqmi(&d42, &Partition::singletons(4), 2).unwrap();
        assert!((m2 - 6.0 * pair42).abs() < 1e-9);
    }

    #[test]
    fn ggz_profile_follows_binomial_formula() {
        let p = 0.3;
        let h = binary_entropy(p).unwrap();
        let state = ggz(4, p, 0.4).unwrap();
        let profile = mqmi_profile(&state, &Partition::singletons(4)).unwrap();
        let expected = [4.0 * h, 6.0 * h, 4.0 * h, 0.0];
        for (got, want) in profile.iter().zip(expected) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn product_states_have_zero_measures() {
        let spec = StateSpec {
            kind: crate::states::StateKind::Product,
            params: crate::states::StateParams {
                factors: Some(vec![
                    StateSpec::random_mixed(vec![2], 2, 1),
                    StateSpec::random_mixed(vec![2], 2, 2),
                    StateSpec::random_mixed(vec![2], 2, 3),
                ]),
                ..Default::default()
            },
        };
        let state = spec.build().unwrap();
        let e = eval(&state);
        let parts = Partition::singletons(3);
        for k in 1..=3 {
            assert!(e.mqmi(&parts, k).unwrap().abs() < 1e-9);
        }
        assert!(e.common_information(&parts).unwrap().abs() < 1e-9);
        let w = WeightVector::uniform(3).unwrap();
        assert!(e.combined(&parts, &w).unwrap().abs() < 1e-9);
    }

    #[test]
    fn pure_duality_on_random_four_party() {
        let state = random_pure(&[2, 2, 2, 2], 12).unwrap();
        let profile = mqmi_profile(&state, &Partition::singletons(4)).unwrap();
        assert!((profile[0] - profile[2]).abs() < 1e-9);
    }

    #[test]
    fn mqmi_rejects_out_of_range_k() {
        let state = random_pure(&[2, 2], 1).unwrap();
        let parts = Partition::singletons(2);
        assert!(mqmi(&state, &parts, 0).is_err());
        assert!(mqmi(&state, &parts, 3).is_err());
    }

    #[test]
    fn partition_rejects_overlap() {
        assert!(Partition::new(vec![
            SubsystemSet::new([0, 1]),
            SubsystemSet::singleton(1)
        ])
        .is_err());
    }

    #[test]
    fn total_forms_agree_on_ghz() {
        let state = ggz(3, 0.5, 0.0).unwrap();
        let e = eval(&state);
        let parts = Partition::singletons(3);
        for form in TOTAL_FORMS {
            let v = e.total_correlation(&parts, form).unwrap();
            assert!((v - 3.0).abs() < 1e-9, "{form:?} gave {v}");
        }
    }

    #[test]
    fn total_forms_agree_on_random_mixed() {
        for seed in 0..10 {
            let state = random_mixed(&[2, 2, 2], 4, seed).unwrap();
            let e = eval(&state);
            let parts = Partition::singletons(3);
            let values: Vec<f64> = TOTAL_FORMS
                .iter()
                .map(|&f| e.total_correlation(&parts, f).unwrap())
                .collect();
            for v in &values[1..] {
                assert!((v - values[0]).abs() < 1e-8, "seed {seed}: {values:?}");
            }
        }
    }

    #[test]
    fn dual_forms_agree_and_match_table_values() {
        let e_hs = hs4();
        let ev = eval(&e_hs);
        let parts = Partition::singletons(4);
        for form in DUAL_FORMS {
            let v = ev.dual_total_correlation(&parts, form).unwrap();
            assert!((v - 4.0).abs() < 1e-9, "{form:?} gave {v}");
        }
        let p = 0.35;
        let h = binary_entropy(p).unwrap();
        let g5 = ggz(5, p, 0.0).unwrap();
        let ev5 = eval(&g5);
        let parts5 = Partition::singletons(5);
        for form in DUAL_FORMS {
            let v = ev5.dual_total_correlation(&parts5, form).unwrap();
            assert!((v - 5.0 * h).abs() < 1e-9, "{form:?} gave {v}");
        }
    }

    #[test]
    fn dual_forms_agree_on_random_mixed() {
        for seed in 0..6 {
            let state = random_mixed(&[2, 2, 2, 2], 4, seed).unwrap();
            let e = eval(&state);
            let parts = Partition::singletons(4);
            let values: Vec<f64> = DUAL_FORMS
                .iter()
                .map(|&f| e.dual_total_correlation(&parts, f).unwrap())
                .collect();
            for v in &values[1..] {
                assert!((v - values[0]).abs() < 1e-8, "seed {seed}: {values:?}");
            }
        }
    }

    #[test]
    fn dual_bounded_by_total_plus_twice_entropy() {
        for seed in 0..10 {
            let state = random_mixed(&[2, 2, 2, 2], 6, seed).unwrap();
            let e = eval(&state);
            let parts = Partition::singletons(4);
            let t = e.total_correlation(&parts, TotalForm::Entropic).unwrap();
            let s = e.dual_total_correlation(&parts, DualForm::Entropic).unwrap();
            let s_full = e.entropy_of(&SubsystemSet::full(4)).unwrap();
            assert!(s <= t + 2.0 * s_full + 1e-9);
        }
    }

    #[test]
    fn combined_basis_weight_recovers_single_measure() {
        let state = random_mixed(&[2, 2, 2], 3, 9).unwrap();
        let e = eval(&state);
        let parts = Partition::singletons(3);
        let w = WeightVector::basis(3, 1).unwrap();
        let combined = e.combined(&parts, &w).unwrap();
        let m1 = e.mqmi(&parts, 1).unwrap();
        assert!((combined - m1).abs() < 1e-12);
    }

    #[test]
    fn combined_uniform_on_ghz() {
        let state = ggz(3, 0.5, 0.0).unwrap();
        let e = eval(&state);
        let w = WeightVector::uniform(3).unwrap();
        let v = e.combined(&Partition::singletons(3), &w).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn weight_vector_rejects_bad_inputs() {
        assert!(WeightVector::new(vec![0.5, 0.6]).is_err());
        assert!(WeightVector::new(vec![1.5, -0.5]).is_err());
        assert!(WeightVector::new(vec![]).is_err());
    }

    #[test]
    fn common_information_table_values() {
        let g4 = ggz(4, 0.5, 0.0).unwrap();
        let c = common_information(&g4, &Partition::singletons(4)).unwrap();
        assert!((c - 2.0).abs() < 1e-9);
        let asym = crate::states::antisym3();
        let c = common_information(&asym, &Partition::singletons(3)).unwrap();
        assert!(c.abs() < 1e-9);
    }

    #[test]
    fn common_equals_all_blocks_gcmi_exactly() {
        let state = random_mixed(&[2, 2, 2, 2], 5, 33).unwrap();
        let e = eval(&state);
        let parts = Partition::singletons(4);
        let c = e.common_information(&parts).unwrap();
        let g = e.gcmi(&parts, &SubsystemSet::empty()).unwrap();
        assert!((c - g).abs() < 1e-9);
    }

    #[test]
    fn regions_of_ghz() {
        let ghz = ggz(3, 0.5, 0.0).unwrap();
        let r = eval(&ghz).tripartite_regions(&Partition::singletons(3)).unwrap();
        assert!((r.a + 1.0).abs() < 1e-10 && (r.b + 1.0).abs() < 1e-10 && (r.c + 1.0).abs() < 1e-10);
        assert!((r.ab - 1.0).abs() < 1e-10 && (r.ac - 1.0).abs() < 1e-10 && (r.bc - 1.0).abs() < 1e-10);
        assert!(r.abc.abs() < 1e-10);
        assert!((r.total - 3.0).abs() < 1e-10 && (r.dual - 3.0).abs() < 1e-10);
        assert!(r.total_regions_residual < 1e-10 && r.dual_regions_residual < 1e-10);
    }

    #[test]
    fn regions_of_product_pure_vanish() {
        let zero = crate::states::pure_from_amplitudes(
            &[2],
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        )
        .unwrap();
        let product = tensor(&tensor(&zero, &zero), &zero);
        let r = eval(&product).tripartite_regions(&Partition::singletons(3)).unwrap();
        for v in [r.a, r.b, r.c, r.ab, r.ac, r.bc, r.abc] {
            assert!(v.abs() < 1e-10);
        }
    }

    #[test]
    fn region_sum_is_total_entropy() {
        for seed in 0..8 {
            let state = random_mixed(&[2, 2, 2], 5, seed).unwrap();
            let e = eval(&state);
            let r = e.tripartite_regions(&Partition::singletons(3)).unwrap();
            let sum = r.a + r.b + r.c + r.ab + r.ac + r.bc + r.abc;
            let s_all = e.entropy_of(&SubsystemSet::full(3)).unwrap();
            assert!((sum - s_all).abs() < 1e-9);
        }
    }

    #[test]
    fn regions_reject_wrong_block_count() {
        let state = random_mixed(&[2, 2], 2, 1).unwrap();
        assert!(eval(&state).tripartite_regions(&Partition::singletons(2)).is_err());
    }

    #[test]
    fn partition_identity_on_random_states() {
        for seed in 0..8 {
            let state = random_mixed(&[2, 2, 2, 2], 4, seed).unwrap();
            let e = eval(&state);
            let parts = Partition::singletons(4);
            for p in 1..4 {
                assert!(e.partition_identity_residual(&parts, p).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn partition_identity_on_ggz5() {
        let state = ggz(5, 0.5, 0.0).unwrap();
        let e = eval(&state);
        let parts = Partition::singletons(5);
        assert!(e.partition_identity_residual(&parts, 1).unwrap() <= 1e-9);
        // M_1 + M_4 = 5h + 5h = 10 at p = 1/2
        let lhs = e.mqmi(&parts, 1).unwrap() + e.mqmi(&parts, 4).unwrap();
        assert!((lhs - 10.0).abs() < 1e-9);
    }

    #[test]
    fn recurrences_vanish_on_random_states() {
        for seed in 0..6 {
            let state = random_mixed(&[2, 2, 2], 4, seed).unwrap();
            let residuals = eval(&state)
                .recurrence_residuals(&Partition::singletons(3))
                .unwrap();
            for r in residuals {
                assert!(r.residual <= 1e-8, "seed {seed}: {} = {}", r.name, r.residual);
            }
        }
    }

    #[test]
    fn recurrences_vanish_on_four_blocks() {
        let state = random_mixed(&[2, 2, 2, 2], 6, 77).unwrap();
        let residuals = eval(&state)
            .recurrence_residuals(&Partition::singletons(4))
            .unwrap();
        for r in residuals {
            assert!(r.residual <= 1e-8, "{} = {}", r.name, r.residual);
        }
    }

    #[test]
    fn recurrences_vanish_on_product_states() {
        let spec = StateSpec {
            kind: crate::states::StateKind::Product,
            params: crate::states::StateParams {
                factors: Some(vec![
                    StateSpec::random_mixed(vec![2], 2, 11),
                    StateSpec::random_mixed(vec![2], 2, 12),
                    StateSpec::random_mixed(vec![2], 2, 13),
                ]),
                ..Default::default()
            },
        };
        let state = spec.build().unwrap();
        for r in eval(&state)
            .recurrence_residuals(&Partition::singletons(3))
            .unwrap()
        {
            assert!(r.residual < 1e-12, "{} = {}", r.name, r.residual);
        }
    }

    #[test]
    fn measures_invariant_under_subsystem_relabeling() {
        let state = random_mixed(&[2, 2, 2], 4, 41).unwrap();
        let perm = [2usize, 0, 1];
        let relabeled = crate::qmatrix::permute_subsystems(&state, &perm).unwrap();
        // block {i} of the original is block {p} of the relabeled state
        // where perm[p] = i
        let mut inverse = vec![0usize; 3];
        for (p, &i) in perm.iter().enumerate() {
            inverse[i] = p;
        }
        let e1 = eval(&state);
        let e2 = eval(&relabeled);
        let parts = Partition::singletons(3);
        for k in 1..=3 {
            let a = e1.mqmi(&parts, k).unwrap();
            let b = e2.mqmi(&parts, k).unwrap();
            assert!((a - b).abs() < 1e-9, "k = {k}: {a} vs {b}");
        }
        let blocks = Partition::new(vec![
            SubsystemSet::new([0, 1]),
            SubsystemSet::singleton(2),
        ])
        .unwrap();
        let mapped = Partition::new(vec![
            SubsystemSet::new([inverse[0], inverse[1]]),
            SubsystemSet::singleton(inverse[2]),
        ])
        .unwrap();
        let a = e1.gcmi(&blocks, &SubsystemSet::empty()).unwrap();
        let b = e2.gcmi(&mapped, &SubsystemSet::empty()).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn ghz_total_peels_into_pair_terms() {
        let ghz = ggz(3, 0.5, 0.0).unwrap();
        let e = eval(&ghz);
        let parts = Partition::singletons(3);
        // T_3 = T_2(A:B) + I(AB:C) = 1 + 2
        let sub = parts.without(2).unwrap();
        let t2 = e.total_correlation(&sub, TotalForm::Entropic).unwrap();
        assert!((t2 - 1.0).abs() < 1e-10);
        let t3 = e.total_correlation(&parts, TotalForm::Entropic).unwrap();
        assert!((t3 - 3.0).abs() < 1e-10);
        let residuals = e.recurrence_residuals(&parts).unwrap();
        let peel = residuals.iter().find(|r| r.name == "total_peel_2").unwrap();
        assert!(peel.residual < 1e-10);
    }

    #[test]
    fn secret_sharing_of_product_with_eavesdropper() {
        let bell = ggz(2, 0.5, 0.0).unwrap();
        let eve = random_mixed(&[2], 2, 4).unwrap();
        let state = tensor(&bell, &eve);
        let report = eval(&state)
            .secret_sharing_leakage(
                &SubsystemSet::singleton(0),
                &SubsystemSet::singleton(1),
                &SubsystemSet::singleton(2),
            )
            .unwrap();
        assert!(report.leakage.abs() < 1e-9);
        assert!(report.sum_residual < 1e-9 && report.pair_residual < 1e-9);
    }

    #[test]
    fn secret_sharing_of_ghz() {
        let ghz = ggz(3, 0.5, 0.0).unwrap();
        let report = eval(&ghz)
            .secret_sharing_leakage(
                &SubsystemSet::singleton(0),
                &SubsystemSet::singleton(1),
                &SubsystemSet::singleton(2),
            )
            .unwrap();
        assert!((report.leakage - 2.0).abs() < 1e-9);
    }

    #[test]
    fn secret_sharing_identity_on_random_states() {
        for seed in 0..8 {
            let state = random_mixed(&[2, 2, 2], 3, seed).unwrap();
            let report = eval(&state)
                .secret_sharing_leakage(
                    &SubsystemSet::singleton(0),
                    &SubsystemSet::singleton(1),
                    &SubsystemSet::singleton(2),
                )
                .unwrap();
            assert!(report.sum_residual <= 1e-9 && report.pair_residual <= 1e-9);
        }
    }

    #[test]
    fn secret_sharing_requires_cover() {
        let state = random_mixed(&[2, 2, 2, 2], 2, 1).unwrap();
        assert!(eval(&state)
            .secret_sharing_leakage(
                &SubsystemSet::singleton(0),
                &SubsystemSet::singleton(1),
                &SubsystemSet::singleton(2),
            )
            .is_err());
    }

    #[test]
    fn semipositivity_and_monotonicity_spot_checks() {
        for seed in 0..6 {
            let state = random_mixed(&[2, 2, 2, 2], if seed % 2 == 0 { 2 } else { 16 }, seed)
                .unwrap();
            let e = eval(&state);
            let parts = Partition::singletons(4);
            let profile = e.mqmi_profile(&parts).unwrap();
            for (k, v) in profile.iter().enumerate() {
                assert!(*v >= -1e-9, "M_{} = {v}", k + 1);
            }
            for k in 1..4 {
                for drop in 0..4 {
                    let sub = parts.without(drop).unwrap();
                    let reduced = e.mqmi(&sub, k).unwrap();
                    assert!(profile[k - 1] >= reduced - 1e-9);
                }
                for i in 0..4 {
                    for j in (i + 1)..4 {
                        let merged = parts.merged(i, j).unwrap();
                        let grouped = e.mqmi(&merged, k).unwrap();
                        assert!(profile[k - 1] >= grouped - 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn block_permutation_is_bitwise_exact() {
        let state = random_mixed(&[2, 2, 2, 2], 5, 13).unwrap();
        let e = eval(&state);
        let parts = Partition::new(vec![
            SubsystemSet::new([0, 3]),
            SubsystemSet::singleton(1),
            SubsystemSet::singleton(2),
        ])
        .unwrap();
        let base = e.mqmi_profile(&parts).unwrap();
        for perm in [[1usize, 0, 2], [2, 1, 0], [1, 2, 0]] {
            let shuffled = parts.permuted(&perm).unwrap();
            let got = e.mqmi_profile(&shuffled).unwrap();
            assert_eq!(base, got);
        }
    }

    #[test]
    fn additivity_under_partywise_tensor() {
        let a = random_mixed(&[2, 2, 2], 2, 5).unwrap();
        let b = random_pure(&[2, 2, 2], 6).unwrap();
        let joint = tensor(&a, &b);
        let grouped = Partition::new(
            (0..3).map(|i| SubsystemSet::new([i, i + 3])).collect(),
        )
        .unwrap();
        let ej = eval(&joint);
        let ea = eval(&a);
        let eb = eval(&b);
        let parts = Partition::singletons(3);
        for k in 1..=3 {
            let lhs = ej.mqmi(&grouped, k).unwrap();
            let rhs = ea.mqmi(&parts, k).unwrap() + eb.mqmi(&parts, k).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "k = {k}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn grouped_blocks_reduce_to_smaller_family() {
        // A three-block measure on a four-party state equals the four-party
        // measure after merging, by construction.
        let state = random_mixed(&[2, 2, 2, 2], 4, 21).unwrap();
        let e = eval(&state);
        let merged = Partition::singletons(4).merged(1, 2).unwrap();
        assert_eq!(merged.len(), 3);
        let v = e.mqmi(&merged, 2).unwrap();
        assert!(v.is_finite());
        // and the union is unchanged
        assert_eq!(merged.union(), SubsystemSet::full(4));
    }

    #[test]
    fn report_terms_reproduce_value() {
        let state = random_mixed(&[2, 2, 2], 4, 17).unwrap();
        let e = eval(&state);
        let parts = Partition::singletons(3);
        for id in [
            MeasureId::MutualK { k: 2 },
            MeasureId::Common,
            MeasureId::Total {
                form: TotalForm::Entropic,
            },
            MeasureId::Dual {
                form: DualForm::Entropic,
            },
            MeasureId::Gcmi {
                cond: SubsystemSet::empty(),
            },
            MeasureId::Combined {
                weights: vec![0.25, 0.5, 0.25],
            },
        ] {
            let report = e.report(&id, &parts).unwrap();
            let from_terms: f64 = report
                .terms
                .iter()
                .map(|t| t.coefficient * t.entropy)
                .sum();
            assert!(
                (report.value - from_terms).abs() < 1e-10,
                "{}: {} vs {}",
                report.name,
                report.value,
                from_terms
            );
        }
    }
}
