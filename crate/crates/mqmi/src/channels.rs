//! Quantum operations on single parties: Kraus channels, random channels
//! sliced from Haar isometries, a measure-and-broadcast model of public
//! classical announcement, and the information-deviation quantity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Evaluator, MeasureId, Partition};
use crate::qmatrix::{
    basis_ket, embed_at, kron_all, projector, CMatrix, MultipartiteState, C64,
};
use crate::states::haar_unitary;

const COMPLETENESS_TOL: f64 = 1e-9;

/// A completely positive trace-preserving map on one party, given by Kraus
/// operators with `Σ K†K = I`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    target: usize,
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    /// Checks that all operators share one square dimension and satisfy the
    /// trace-preservation condition within 1e-9.
    pub fn new(target: usize, operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let d = first.nrows();
        if operators
            .iter()
            .any(|k| k.nrows() != d || k.ncols() != d)
        {
            return Err(Error::InvalidChannel(
                "Kraus operators must be square with a shared dimension".into(),
            ));
        }
        let mut sum = CMatrix::zeros(d, d);
        for k in &operators {
            sum += k.adjoint() * k;
        }
        let defect = (sum - CMatrix::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel(format!(
                "channel is not trace preserving: completeness defect {defect:.3e}"
            )));
        }
        Ok(KrausChannel { target, operators })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn identity(target: usize, d: usize) -> Self {
        KrausChannel {
            target,
            operators: vec![CMatrix::identity(d, d)],
        }
    }

    /// `ρ ↦ (1−p) ρ + p I/d` via the shift/clock (generalized Pauli)
    /// operators.
    pub fn depolarizing(target: usize, d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidChannel(format!("p = {p} outside [0, 1]")));
        }
        let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
        let mut shift = CMatrix::zeros(d, d);
        for j in 0..d {
            shift[((j + 1) % d, j)] = C64::new(1.0, 0.0);
        }
        let clock = CMatrix::from_fn(d, d, |r, c| {
            if r == c {
                omega.powu(r as u32)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let dd = (d * d) as f64;
        let mut operators = Vec::with_capacity(d * d);
        operators.push(CMatrix::identity(d, d).scale((1.0 - p * (dd - 1.0) / dd).sqrt()));
        let mut xa = CMatrix::identity(d, d);
        for a in 0..d {
            let mut w = xa.clone();
            for b in 0..d {
                if a != 0 || b != 0 {
                    operators.push(w.scale(p.sqrt() / d as f64));
                }
                w *= &clock;
            }
            xa *= &shift;
        }
        KrausChannel::new(target, operators)
    }

    /// Random channel of the given Kraus rank: a Haar isometry from the
    /// party into party ⊗ environment, sliced along the environment.
    /// `kraus_rank == 1` yields a Haar-random unitary. Deterministic per
    /// seed.
    pub fn random(target: usize, d: usize, kraus_rank: usize, seed: u64) -> Result<Self> {
        if kraus_rank == 0 {
            return Err(Error::InvalidChannel("kraus_rank must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let big = haar_unitary(d * kraus_rank, &mut rng);
        let mut operators = Vec::with_capacity(kraus_rank);
        for i in 0..kraus_rank {
            let k = CMatrix::from_fn(d, d, |a, b| big[(a * kraus_rank + i, b)]);
            operators.push(k);
        }
        KrausChannel::new(target, operators)
    }

    /// `ρ ↦ Σ (I ⊗ K ⊗ I) ρ (I ⊗ K ⊗ I)†` on the target party.
    pub fn apply(&self, state: &MultipartiteState) -> Result<MultipartiteState> {
        let dims = state.dims();
        if self.target >= dims.len() {
            return Err(Error::InvalidSubsystems(format!(
                "target {} out of range for {} parties",
                self.target,
                dims.len()
            )));
        }
        if dims[self.target] != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "channel dimension {} but party {} has dimension {}",
                self.dim(),
                self.target,
                dims[self.target]
            )));
        }
        let d = state.total_dim();
        let mut out = CMatrix::zeros(d, d);
        for k in &self.operators {
            let e = embed_at(k, dims, self.target)?;
            out += &e * state.matrix() * e.adjoint();
        }
        MultipartiteState::new(out, dims.to_vec())
    }
}

/// JSON schema for a Kraus channel: `{"target": 1-based party, "kraus":
/// [matrix, ...]}` with matrices as nested `[re, im]` arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub target: usize,
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

impl ChannelSpec {
    pub fn to_channel(&self) -> Result<KrausChannel> {
        if self.target == 0 {
            return Err(Error::InvalidChannel(
                "target party is 1-based and must be >= 1".into(),
            ));
        }
        let operators = self
            .kraus
            .iter()
            .map(|rows| {
                let d = rows.len();
                if rows.iter().any(|r| r.len() != d) {
                    return Err(Error::InvalidChannel("Kraus matrix is not square".into()));
                }
                Ok(CMatrix::from_fn(d, d, |r, c| {
                    let [re, im] = rows[r][c];
                    C64::new(re, im)
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(self.target - 1, operators)
    }

    pub fn from_channel(channel: &KrausChannel) -> Self {
        let kraus = channel
            .operators()
            .iter()
            .map(|k| {
                (0..k.nrows())
                    .map(|r| (0..k.ncols()).map(|c| [k[(r, c)].re, k[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        ChannelSpec {
            target: channel.target() + 1,
            kraus,
        }
    }
}

/// Projectively measures `party` in the given orthonormal basis (columns)
/// and appends to every party a classical register of the basis size
/// recording the outcome:
///
/// `ρ ↦ Σ_o (P_o ρ P_o) ⊗ |o⟩⟨o|^{⊗n}`
///
/// on dims enlarged by `n` registers, register `j` sitting at index
/// `n + j` and held by party `j`. How registers are grouped for later
/// measure evaluation is the caller's choice:
/// [`Partition::broadcast_announcer`] keeps the whole event a channel
/// internal to the measured party's block, while
/// [`Partition::broadcast_holders`] pairs each copy with the party holding
/// it and exposes the announced outcome as shared randomness.
pub fn measure_and_broadcast(
    state: &MultipartiteState,
    party: usize,
    basis: &CMatrix,
) -> Result<MultipartiteState> {
    let dims = state.dims();
    let n = dims.len();
    if party >= n {
        return Err(Error::InvalidSubsystems(format!(
            "party {party} out of range for {n} parties"
        )));
    }
    let d = dims[party];
    if basis.nrows() != d || basis.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "basis is {}x{}, party has dimension {d}",
            basis.nrows(),
            basis.ncols()
        )));
    }
    let ortho_defect = (basis.adjoint() * basis - CMatrix::identity(d, d))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if ortho_defect > 1e-9 {
        return Err(Error::InvalidChannel(format!(
            "basis is not orthonormal: defect {ortho_defect:.3e}"
        )));
    }

    let mut new_dims = dims.to_vec();
    new_dims.extend(std::iter::repeat(d).take(n));
    let total: usize = new_dims.iter().product();
    let mut out = CMatrix::zeros(total, total);
    for o in 0..d {
        let col = basis.column(o).into_owned();
        let p_o = projector(&col);
        let embedded = embed_at(&p_o, dims, party)?;
        let collapsed = &embedded * state.matrix() * embedded.adjoint();
        let flag = projector(&basis_ket(d, o));
        let registers = kron_all(&vec![flag; n])?;
        out += collapsed.kronecker(&registers);
    }
    MultipartiteState::new(out, new_dims)
}

/// `|Q(Φ(ρ)) − Q(ρ)|` for a measure `Q` evaluated on the same partition
/// before and after the channel.
pub fn deviation(
    state: &MultipartiteState,
    channel: &KrausChannel,
    measure: &MeasureId,
    parts: &Partition,
) -> Result<f64> {
    let before = Evaluator::new(state)?.evaluate(measure, parts)?;
    let after_state = channel.apply(state)?;
    let after = Evaluator::new(&after_state)?.evaluate(measure, parts)?;
    Ok((after - before).abs())
}
