//! Scalar entropic primitives, all in bits (base-2 logarithms).
//!
//! Entropies are always computed from eigenvalues, never from a matrix
//! logarithm, so rank-deficient states are handled exactly: eigenvalues in
//! `[−tol, 0)` are clamped to zero and `0·log 0 = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmatrix::{
    hermitian_eig, partial_trace, MultipartiteState, SubsystemSet, DEFAULT_TOL,
};

/// `−Σ λ log₂ λ` over the nonnegative part of the spectrum.
pub(crate) fn entropy_from_eigenvalues(eigenvalues: &[f64]) -> f64 {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    s.max(0.0)
}

/// Von Neumann entropy `S(ρ) = −tr(ρ log₂ ρ)`.
///
/// Errors if the matrix is not Hermitian or has an eigenvalue below
/// `−1e-9`; eigenvalues in `[−1e-9, 0)` are treated as exact zeros.
pub fn von_neumann(state: &MultipartiteState) -> Result<f64> {
    let spec = hermitian_eig(state.matrix())?;
    let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -DEFAULT_TOL {
        return Err(Error::InvalidState(format!(
            "state is not positive semidefinite: min eigenvalue {min:.3e}"
        )));
    }
    Ok(entropy_from_eigenvalues(&spec.eigenvalues))
}

/// Binary entropy `h(p) = −p log₂ p − (1−p) log₂ (1−p)`, zero at the
/// endpoints.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("p = {p} outside [0, 1]")));
    }
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    Ok(h)
}

/// Quantum relative entropy value; infinity is a tagged sentinel, never a
/// floating-point overflow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RelativeEntropy {
    Finite(f64),
    Infinite,
}

impl RelativeEntropy {
    pub fn is_infinite(&self) -> bool {
        matches!(self, RelativeEntropy::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            RelativeEntropy::Finite(v) => Some(v),
            RelativeEntropy::Infinite => None,
        }
    }
}

/// `D(τ‖σ) = tr(τ log₂ τ) − tr(τ log₂ σ)`, computed in σ's eigenbasis.
///
/// Returns the infinite sentinel when τ carries more than `tol` weight on
/// σ's numerical kernel (eigenvalues at or below `tol`); the support
/// condition is what makes the quantity meaningful.
pub fn relative_entropy(
    tau: &MultipartiteState,
    sigma: &MultipartiteState,
    tol: f64,
) -> Result<RelativeEntropy> {
    if tau.dims() != sigma.dims() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy of states on dims {:?} and {:?}",
            tau.dims(),
            sigma.dims()
        )));
    }
    let sigma_spec = hermitian_eig(sigma.matrix())?;
    let rotated = sigma_spec.eigenvectors.adjoint() * tau.matrix() * &sigma_spec.eigenvectors;
    let weights: Vec<f64> = (0..rotated.nrows()).map(|i| rotated[(i, i)].re).collect();

    let kernel_weight: f64 = weights
        .iter()
        .zip(&sigma_spec.eigenvalues)
        .filter(|(_, &l)| l <= tol)
        .map(|(&w, _)| w)
        .sum();
    if kernel_weight > tol {
        return Ok(RelativeEntropy::Infinite);
    }

    let s_tau = von_neumann(tau)?;
    let cross: f64 = weights
        .iter()
        .zip(&sigma_spec.eigenvalues)
        .filter(|(_, &l)| l > tol)
        .map(|(&w, &l)| w * l.log2())
        .sum();
    Ok(RelativeEntropy::Finite((-s_tau - cross).max(0.0)))
}

/// Signed residuals of the basic entropy inequalities for a disjoint cut
/// `X, Y, Z`; every residual is nonnegative for a valid state. With an
/// empty `Z` only the two-party inequalities apply.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    /// `S(XY) − (S(X) − S(Y)) ≥ 0`
    pub araki_lieb_xy: f64,
    /// `S(XY) − (S(Y) − S(X)) ≥ 0`
    pub araki_lieb_yx: f64,
    /// `S(X) + S(Y) − S(XY) ≥ 0`
    pub subadditivity: f64,
    /// `S(XZ) + S(YZ) − S(X) − S(Y) ≥ 0`
    pub weak_monotonicity: Option<f64>,
    /// `S(XY) + S(YZ) − S(Y) − S(XYZ) ≥ 0`
    pub strong_subadditivity: Option<f64>,
}

impl InequalityReport {
    /// Name/value pairs of every residual that applies to the cut.
    pub fn residuals(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![
            ("araki_lieb_xy", self.araki_lieb_xy),
            ("araki_lieb_yx", self.araki_lieb_yx),
            ("subadditivity", self.subadditivity),
        ];
        if let Some(v) = self.weak_monotonicity {
            out.push(("weak_monotonicity", v));
        }
        if let Some(v) = self.strong_subadditivity {
            out.push(("strong_subadditivity", v));
        }
        out
    }

    pub fn min_residual(&self) -> f64 {
        self.residuals()
            .into_iter()
            .map(|(_, v)| v)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates the basic entropy inequalities on the cut `X, Y, Z`.
pub fn basic_inequality_report(
    state: &MultipartiteState,
    x: &SubsystemSet,
    y: &SubsystemSet,
    z: &SubsystemSet,
) -> Result<InequalityReport> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidSubsystems("X and Y must be nonempty".into()));
    }
    if !x.is_disjoint(y) || !x.is_disjoint(z) || !y.is_disjoint(z) {
        return Err(Error::InvalidSubsystems(
            "X, Y, Z must be pairwise disjoint".into(),
        ));
    }
    let n = state.n_parties();
    x.check_bounds(n)?;
    y.check_bounds(n)?;
    z.check_bounds(n)?;

    let s = |set: &SubsystemSet| -> Result<f64> { von_neumann(&partial_trace(state, set)?) };
    let xy = x.union(y);
    let s_x = s(x)?;
    let s_y = s(y)?;
    let s_xy = s(&xy)?;
    let (weak, ssa) = if z.is_empty() {
        (None, None)
    } else {
        let s_xz = s(&x.union(z))?;
        let s_yz = s(&y.union(z))?;
        let s_xyz = s(&xy.union(z))?;
        (
            Some(s_xz + s_yz - s_x - s_y),
            Some(s_xy + s_yz - s_y - s_xyz),
        )
    };
    Ok(InequalityReport {
        araki_lieb_xy: s_xy - (s_x - s_y),
        araki_lieb_yx: s_xy - (s_y - s_x),
        subadditivity: s_x + s_y - s_xy,
        weak_monotonicity: weak,
        strong_subadditivity: ssa,
    })
}
