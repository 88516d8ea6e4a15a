//! Constructors for the named benchmark states and seeded random sampling.
//!
//! Named states (all returned as density matrices):
//!
//! * `ggz(n, p, φ)` — `√p |0…0⟩ + e^{iφ} √(1−p) |1…1⟩`
//! * `dicke(n, r)` — uniform superposition of all weight-`r` n-qubit kets
//! * `antisym3` — the three-qutrit totally antisymmetric state
//! * `cluster4` — `(|0000⟩ + |0011⟩ + |1100⟩ − |1111⟩)/2`
//! * `hs4` — `(|0011⟩ + |1100⟩ + ω(|1010⟩+|0101⟩) + ω²(|1001⟩+|0110⟩))/√6`
//!   with `ω = e^{2πi/3}`
//!
//! Random sampling uses a single documented scheme: ChaCha8 seeded with the
//! given `u64`; a Haar pure state draws `2·D` standard normals (re, im per
//! amplitude in flat-index order) and normalizes; a mixed state of rank `r`
//! is the reduction of a Haar pure state on `dims ⊕ [r]` with the ancilla
//! appended last. Identical seeds reproduce identical states bit for bit.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmatrix::{
    partial_trace, projector, validate, CMatrix, CVector, MultipartiteState, SubsystemSet, C64,
};

/// Which named constructor or sampler a [`StateSpec`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Ggz,
    Dicke,
    Antisym3,
    Cluster4,
    Hs4,
    Product,
    PureVector,
    Dense,
    RandomPure,
    RandomMixed,
}

/// Kind-specific parameters; unused fields stay `None` and are omitted from
/// JSON. [`StateSpec::build`] checks completeness and ranges per kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StateParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<StateSpec>>,
}

/// JSON-serializable description of a state: `{"kind": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub kind: StateKind,
    #[serde(default)]
    pub params: StateParams,
}

impl StateSpec {
    pub fn ggz(n: usize, p: f64, phi: f64) -> StateSpec {
        StateSpec {
            kind: StateKind::Ggz,
            params: StateParams {
                n: Some(n),
                p: Some(p),
                phi: Some(phi),
                ..Default::default()
            },
        }
    }

    pub fn dicke(n: usize, r: usize) -> StateSpec {
        StateSpec {
            kind: StateKind::Dicke,
            params: StateParams {
                n: Some(n),
                r: Some(r),
                ..Default::default()
            },
        }
    }

    pub fn antisym3() -> StateSpec {
        StateSpec {
            kind: StateKind::Antisym3,
            params: StateParams::default(),
        }
    }

    pub fn cluster4() -> StateSpec {
        StateSpec {
            kind: StateKind::Cluster4,
            params: StateParams::default(),
        }
    }

    pub fn hs4() -> StateSpec {
        StateSpec {
            kind: StateKind::Hs4,
            params: StateParams::default(),
        }
    }

    pub fn random_pure(dims: Vec<usize>, seed: u64) -> StateSpec {
        StateSpec {
            kind: StateKind::RandomPure,
            params: StateParams {
                dims: Some(dims),
                seed: Some(seed),
                ..Default::default()
            },
        }
    }

    pub fn random_mixed(dims: Vec<usize>, rank: usize, seed: u64) -> StateSpec {
        StateSpec {
            kind: StateKind::RandomMixed,
            params: StateParams {
                dims: Some(dims),
                rank: Some(rank),
                seed: Some(seed),
                ..Default::default()
            },
        }
    }

    /// Dense spec carrying the full matrix of an existing state.
    pub fn dense_from_state(state: &MultipartiteState) -> StateSpec {
        let d = state.total_dim();
        let m = state.matrix();
        let matrix = (0..d)
            .map(|r| (0..d).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
            .collect();
        StateSpec {
            kind: StateKind::Dense,
            params: StateParams {
                dims: Some(state.dims().to_vec()),
                matrix: Some(matrix),
                ..Default::default()
            },
        }
    }

    /// Builds the density matrix this spec describes.
    pub fn build(&self) -> Result<MultipartiteState> {
        match self.kind {
            StateKind::Ggz => {
                let n = require(self.params.n, "n")?;
                let p = require(self.params.p, "p")?;
                let phi = self.params.phi.unwrap_or(0.0);
                ggz(n, p, phi)
            }
            StateKind::Dicke => {
                let n = require(self.params.n, "n")?;
                let r = require(self.params.r, "r")?;
                dicke(n, r)
            }
            StateKind::Antisym3 => Ok(antisym3()),
            StateKind::Cluster4 => Ok(cluster4()),
            StateKind::Hs4 => Ok(hs4()),
            StateKind::Product => {
                let factors = self
                    .params
                    .factors
                    .as_ref()
                    .ok_or_else(|| missing("factors"))?;
                product(factors)
            }
            StateKind::PureVector => {
                let dims = self.params.dims.clone().ok_or_else(|| missing("dims"))?;
                let amps = self
                    .params
                    .amplitudes
                    .as_ref()
                    .ok_or_else(|| missing("amplitudes"))?;
                let v: Vec<C64> = amps.iter().map(|&[re, im]| C64::new(re, im)).collect();
                pure_from_amplitudes(&dims, &v)
            }
            StateKind::Dense => {
                let dims = self.params.dims.clone().ok_or_else(|| missing("dims"))?;
                let rows = self
                    .params
                    .matrix
                    .as_ref()
                    .ok_or_else(|| missing("matrix"))?;
                dense(&dims, rows)
            }
            StateKind::RandomPure => {
                let dims = self.params.dims.clone().ok_or_else(|| missing("dims"))?;
                let seed = require(self.params.seed, "seed")?;
                random_pure(&dims, seed)
            }
            StateKind::RandomMixed => {
                let dims = self.params.dims.clone().ok_or_else(|| missing("dims"))?;
                let rank = require(self.params.rank, "rank")?;
                let seed = require(self.params.seed, "seed")?;
                random_mixed(&dims, rank, seed)
            }
        }
    }
}

fn missing(field: &str) -> Error {
    Error::InvalidParams(format!("missing parameter `{field}`"))
}

fn require<T: Copy>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| missing(field))
}

fn pure_state(dims: &[usize], v: CVector) -> Result<MultipartiteState> {
    let norm = v.norm();
    if norm <= 0.0 {
        return Err(Error::InvalidParams("zero state vector".into()));
    }
    MultipartiteState::new(projector(&v.unscale(norm.into())), dims.to_vec())
}

/// `√p |0…0⟩ + e^{iφ} √(1−p) |1…1⟩` on `n` qubits.
pub fn ggz(n: usize, p: f64, phi: f64) -> Result<MultipartiteState> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("ggz needs n >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("p = {p} outside [0, 1]")));
    }
    let d = 1usize << n;
    let mut v = CVector::zeros(d);
    v[0] = C64::new(p.sqrt(), 0.0);
    v[d - 1] = C64::from_polar((1.0 - p).sqrt(), phi);
    pure_state(&vec![2; n], v)
}

/// Uniform superposition of all `n`-qubit computational kets of Hamming
/// weight `r`.
pub fn dicke(n: usize, r: usize) -> Result<MultipartiteState> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("dicke needs n >= 2, got {n}")));
    }
    if r > n {
        return Err(Error::InvalidParams(format!("dicke weight {r} > n = {n}")));
    }
    let d = 1usize << n;
    let hits: Vec<usize> = (0..d).filter(|g| g.count_ones() as usize == r).collect();
    let amp = 1.0 / (hits.len() as f64).sqrt();
    let mut v = CVector::zeros(d);
    for g in hits {
        v[g] = C64::new(amp, 0.0);
    }
    pure_state(&vec![2; n], v)
}

/// Three-qutrit totally antisymmetric state. Basis labels 1, 2, 3 map to
/// computational levels 0, 1, 2, so `|123⟩` is `|0⟩|1⟩|2⟩`.
pub fn antisym3() -> MultipartiteState {
    let amp = 1.0 / 6f64.sqrt();
    let mut v = CVector::zeros(27);
    // (sign, levels) of ± |abc⟩ over the six permutations of (1,2,3)
    let terms: [(f64, [usize; 3]); 6] = [
        (1.0, [0, 1, 2]),
        (-1.0, [0, 2, 1]),
        (1.0, [1, 2, 0]),
        (-1.0, [1, 0, 2]),
        (1.0, [2, 0, 1]),
        (-1.0, [2, 1, 0]),
    ];
    for (sign, [a, b, c]) in terms {
        v[a * 9 + b * 3 + c] = C64::new(sign * amp, 0.0);
    }
    pure_state(&[3, 3, 3], v).expect("antisymmetric state is well formed")
}

/// Four-qubit cluster state `(|0000⟩ + |0011⟩ + |1100⟩ − |1111⟩)/2`.
pub fn cluster4() -> MultipartiteState {
    let mut v = CVector::zeros(16);
    v[0b0000] = C64::new(0.5, 0.0);
    v[0b0011] = C64::new(0.5, 0.0);
    v[0b1100] = C64::new(0.5, 0.0);
    v[0b1111] = C64::new(-0.5, 0.0);
    pure_state(&[2, 2, 2, 2], v).expect("cluster state is well formed")
}

/// The four-qubit Higuchi–Sudbery state with `ω = e^{2πi/3}`.
pub fn hs4() -> MultipartiteState {
    let amp = 1.0 / 6f64.sqrt();
    let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let omega2 = omega * omega;
    let mut v = CVector::zeros(16);
    v[0b0011] = C64::new(amp, 0.0);
    v[0b1100] = C64::new(amp, 0.0);
    v[0b1010] = omega * amp;
    v[0b0101] = omega * amp;
    v[0b1001] = omega2 * amp;
    v[0b0110] = omega2 * amp;
    pure_state(&[2, 2, 2, 2], v).expect("hs4 state is well formed")
}

/// Tensor product of the factor specs, in order.
pub fn product(factors: &[StateSpec]) -> Result<MultipartiteState> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidParams("product of zero factors".into()))?;
    let mut acc = first.build()?;
    for f in rest {
        acc = crate::qmatrix::tensor(&acc, &f.build()?);
    }
    Ok(acc)
}

/// Normalizes the amplitude vector and returns the rank-1 projector.
pub fn pure_from_amplitudes(dims: &[usize], amplitudes: &[C64]) -> Result<MultipartiteState> {
    let side: usize = dims.iter().product();
    if amplitudes.len() != side {
        return Err(Error::InvalidParams(format!(
            "{} amplitudes for total dimension {side}",
            amplitudes.len()
        )));
    }
    pure_state(dims, DVector::from_column_slice(amplitudes))
}

/// Arbitrary density matrix from nested `[re, im]` rows; validated at the
/// default tolerance.
pub fn dense(dims: &[usize], rows: &[Vec<[f64; 2]>]) -> Result<MultipartiteState> {
    let side: usize = dims.iter().product();
    if rows.len() != side || rows.iter().any(|r| r.len() != side) {
        return Err(Error::InvalidParams(format!(
            "matrix is not {side}x{side}"
        )));
    }
    let m = CMatrix::from_fn(side, side, |r, c| {
        let [re, im] = rows[r][c];
        C64::new(re, im)
    });
    let state = MultipartiteState::new(m, dims.to_vec())?;
    let report = validate(&state, crate::qmatrix::DEFAULT_TOL);
    if !report.valid {
        return Err(Error::InvalidState(format!(
            "dense matrix fails validation: hermiticity {:.3e}, min eigenvalue {:.3e}, trace defect {:.3e}",
            report.hermiticity_defect, report.min_eigenvalue, report.trace_defect
        )));
    }
    Ok(state)
}

fn gaussian_vector(d: usize, rng: &mut ChaCha8Rng) -> CVector {
    CVector::from_iterator(
        d,
        (0..d).map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        }),
    )
}

/// Haar-distributed pure state: normalized complex standard-normal vector,
/// formed into a rank-1 projector. Deterministic for a fixed seed.
pub fn random_pure(dims: &[usize], seed: u64) -> Result<MultipartiteState> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidParams(
            "dims must be nonempty with every entry >= 2".into(),
        ));
    }
    let d: usize = dims.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = gaussian_vector(d, &mut rng);
    while v.norm() == 0.0 {
        v = gaussian_vector(d, &mut rng);
    }
    pure_state(dims, v)
}

/// Induced-measure mixed state: the reduction of a Haar pure state on
/// `dims ⊕ [rank]`, ancilla appended last. `rank == 1` coincides with
/// [`random_pure`] on the same seed.
pub fn random_mixed(dims: &[usize], rank: usize, seed: u64) -> Result<MultipartiteState> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidParams(
            "dims must be nonempty with every entry >= 2".into(),
        ));
    }
    let d: usize = dims.iter().product();
    if rank == 0 || rank > d {
        return Err(Error::InvalidParams(format!(
            "rank {rank} outside 1..={d}"
        )));
    }
    if rank == 1 {
        return random_pure(dims, seed);
    }
    let mut ext = dims.to_vec();
    ext.push(rank);
    let purification = random_pure(&ext, seed)?;
    partial_trace(&purification, &SubsystemSet::new(0..dims.len()))
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phase
/// convention fixed by the diagonal of `R`.
pub fn haar_unitary(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let qr = g.qr();
    let r_diag: Vec<C64> = (0..d).map(|i| qr.r()[(i, i)]).collect();
    let q = qr.q();
    let mut u = CMatrix::zeros(d, d);
    for c in 0..d {
        let phase = if r_diag[c].norm() > 0.0 {
            r_diag[c] / Complex64::from(r_diag[c].norm())
        } else {
            C64::new(1.0, 0.0)
        };
        for r in 0..d {
            u[(r, c)] = q[(r, c)] * phase;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::{hermitian_eig, permute_subsystems};

    fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn every_builtin_validates_tightly() {
        let specs = [
            StateSpec::ggz(3, 0.3, 1.1),
            StateSpec::dicke(4, 2),
            StateSpec::antisym3(),
            StateSpec::cluster4(),
            StateSpec::hs4(),
            StateSpec::random_pure(vec![2, 2, 2], 17),
            StateSpec::random_mixed(vec![2, 2], 3, 17),
        ];
        for spec in specs {
            let state = spec.build().unwrap();
            let report = validate(&state, 1e-12);
            assert!(report.valid, "{spec:?} fails: {report:?}");
        }
    }

    #[test]
    fn ggz_two_qubits_at_half_is_bell() {
        let state = ggz(2, 0.5, 0.0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVector::from_iterator(
            4,
            [
                C64::new(s, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(s, 0.0),
            ],
        );
        assert!(max_entry_diff(state.matrix(), &projector(&v)) < 1e-15);
    }

    #[test]
    fn ggz_marginals_are_diagonal_with_p_eigenvalues() {
        let p = 0.3;
        let state = ggz(4, p, 0.7).unwrap();
        for keep in [
            SubsystemSet::singleton(2),
            SubsystemSet::new([0, 2]),
            SubsystemSet::new([0, 1, 3]),
        ] {
            let red = partial_trace(&state, &keep).unwrap();
            let m = red.matrix();
            let d = m.nrows();
            for r in 0..d {
                for c in 0..d {
                    if r != c {
                        assert!(m[(r, c)].norm() < 1e-12);
                    }
                }
            }
            assert!((m[(0, 0)].re - p).abs() < 1e-12);
            assert!((m[(d - 1, d - 1)].re - (1.0 - p)).abs() < 1e-12);
        }
    }

    #[test]
    fn dicke_w_state_marginal() {
        let w = dicke(3, 1).unwrap();
        let red = partial_trace(&w, &SubsystemSet::singleton(1)).unwrap();
        let spec = hermitian_eig(red.matrix()).unwrap();
        assert!((spec.eigenvalues[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((spec.eigenvalues[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn dicke_is_permutation_symmetric() {
        let state = dicke(4, 2).unwrap();
        for perm in [[1usize, 0, 2, 3], [3, 2, 1, 0], [1, 2, 3, 0]] {
            let permuted = permute_subsystems(&state, &perm).unwrap();
            assert!(max_entry_diff(state.matrix(), permuted.matrix()) <= 1e-12);
        }
    }

    #[test]
    fn dicke_rejects_overweight() {
        assert!(dicke(3, 4).is_err());
    }

    #[test]
    fn ggz_rejects_bad_probability() {
        assert!(ggz(3, 1.5, 0.0).is_err());
        assert!(ggz(3, -0.1, 0.0).is_err());
    }

    #[test]
    fn antisym3_single_marginal_is_maximally_mixed() {
        let state = antisym3();
        let red = partial_trace(&state, &SubsystemSet::singleton(0)).unwrap();
        let expected = CMatrix::identity(3, 3).scale(1.0 / 3.0);
        assert!(max_entry_diff(red.matrix(), &expected) < 1e-12);
    }

    #[test]
    fn antisym3_pair_marginal_spectrum() {
        let state = antisym3();
        let red = partial_trace(&state, &SubsystemSet::new([1, 2])).unwrap();
        let spec = hermitian_eig(red.matrix()).unwrap();
        for i in 0..3 {
            assert!((spec.eigenvalues[i] - 1.0 / 3.0).abs() < 1e-12);
        }
        for i in 3..9 {
            assert!(spec.eigenvalues[i].abs() < 1e-12);
        }
    }

    #[test]
    fn hs4_is_pure_with_maximally_mixed_singles() {
        let state = hs4();
        assert!((state.purity() - 1.0).abs() < 1e-12);
        for i in 0..4 {
            let red = partial_trace(&state, &SubsystemSet::singleton(i)).unwrap();
            let expected = CMatrix::identity(2, 2).scale(0.5);
            assert!(max_entry_diff(red.matrix(), &expected) < 1e-12);
        }
    }

    #[test]
    fn cluster4_amplitudes() {
        let state = cluster4();
        let m = state.matrix();
        assert!((m[(0, 0)].re - 0.25).abs() < 1e-15);
        assert!((m[(0b1111, 0b0000)].re + 0.25).abs() < 1e-15);
        assert!((m[(0b0011, 0b1100)].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn random_pure_is_pure_and_deterministic() {
        let a = random_pure(&[2, 2], 99).unwrap();
        let b = random_pure(&[2, 2], 99).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert!((a.purity() - 1.0).abs() < 1e-12);
        assert!((a.trace().re - 1.0).abs() < 1e-12);
        let c = random_pure(&[2, 2], 100).unwrap();
        assert!(max_entry_diff(a.matrix(), c.matrix()) > 1e-3);
    }

    #[test]
    fn random_pure_single_party_has_unit_top_eigenvalue() {
        let state = random_pure(&[2], 5).unwrap();
        let spec = hermitian_eig(state.matrix()).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_mixed_rank_one_is_pure() {
        let a = random_mixed(&[2, 2], 1, 7).unwrap();
        assert!((a.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_mixed_matches_explicit_purification() {
        let dims = [2usize, 2];
        let rank = 3;
        let seed = 31;
        let mixed = random_mixed(&dims, rank, seed).unwrap();
        let mut ext = dims.to_vec();
        ext.push(rank);
        let purification = random_pure(&ext, seed).unwrap();
        let reduced = partial_trace(&purification, &SubsystemSet::new([0, 1])).unwrap();
        assert!(max_entry_diff(mixed.matrix(), reduced.matrix()) == 0.0);
    }

    #[test]
    fn random_mixed_interior_eigenvalues() {
        for seed in 0..20 {
            let state = random_mixed(&[2], 2, seed).unwrap();
            let spec = hermitian_eig(state.matrix()).unwrap();
            assert!(spec.eigenvalues[0] < 1.0 - 1e-6);
            assert!(spec.eigenvalues[1] > 1e-6);
        }
    }

    #[test]
    fn random_mixed_rejects_rank_out_of_range() {
        assert!(random_mixed(&[2, 2], 0, 1).is_err());
        assert!(random_mixed(&[2, 2], 5, 1).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = StateSpec::random_mixed(vec![2, 2, 2], 4, 123);
        let text = serde_json::to_string(&spec).unwrap();
        let back: StateSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
        assert_eq!(
            spec.build().unwrap().matrix(),
            back.build().unwrap().matrix()
        );
    }

    #[test]
    fn dense_spec_round_trip() {
        let original = dicke(3, 1).unwrap();
        let spec = StateSpec::dense_from_state(&original);
        let text = serde_json::to_string(&spec).unwrap();
        let rebuilt: StateSpec = serde_json::from_str(&text).unwrap();
        let state = rebuilt.build().unwrap();
        assert!(max_entry_diff(state.matrix(), original.matrix()) == 0.0);
    }

    #[test]
    fn dense_rejects_invalid_matrix() {
        let rows = vec![
            vec![[0.9, 0.0], [0.0, 0.0]],
            vec![[0.0, 0.0], [0.0, 0.0]],
        ];
        assert!(dense(&[2], &rows).is_err());
    }

    #[test]
    fn product_of_factors() {
        let spec = StateSpec {
            kind: StateKind::Product,
            params: StateParams {
                factors: Some(vec![StateSpec::ggz(2, 0.5, 0.0), StateSpec::dicke(2, 1)]),
                ..Default::default()
            },
        };
        let state = spec.build().unwrap();
        assert_eq!(state.dims(), &[2, 2, 2, 2]);
        assert!(validate(&state, 1e-12).valid);
    }

    #[test]
    fn pure_vector_normalizes() {
        let amps = [C64::new(3.0, 0.0), C64::new(4.0, 0.0)];
        let state = pure_from_amplitudes(&[2], &amps).unwrap();
        assert!((state.matrix()[(0, 0)].re - 9.0 / 25.0).abs() < 1e-12);
    }

    #[test]
    fn haar_unitary_is_unitary_and_seeded() {
        let mut rng1 = ChaCha8Rng::seed_from_u64(4);
        let mut rng2 = ChaCha8Rng::seed_from_u64(4);
        let u1 = haar_unitary(6, &mut rng1);
        let u2 = haar_unitary(6, &mut rng2);
        assert_eq!(u1, u2);
        let defect = (u1.adjoint() * &u1 - CMatrix::identity(6, 6))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(defect < 1e-10);
    }
}
