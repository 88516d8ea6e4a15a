//! Multiparty entropic correlation measures on finite-dimensional density
//! matrices.
//!
//! The crate computes the generalized conditional mutual information and
//! the `M_k` family of multiparty mutual informations on block partitions
//! of a multipartite state, together with the total correlation `T = M_1`,
//! the dual total correlation `S = M_{m−1}`, convex combinations, and the
//! alternating combination `C`. Around the measures sit constructors for
//! the standard benchmark states (generalized GHZ, Dicke, the three-qutrit
//! antisymmetric state, the four-qubit cluster and Higuchi–Sudbery
//! states), seeded Haar sampling, Kraus channels with a
//! measure-and-broadcast model of public announcement, and batch property
//! suites plus conjecture scanners with reproducible witnesses.
//!
//! Everything is dense linear algebra in bits (base-2 logs), intended for
//! desk-scale systems (total dimension up to a few hundred). Subsystem
//! indices are 0-based throughout the library; command-line and file
//! interfaces use 1-based party labels.
//!
//! ```
//! use mqmi::measures::{mqmi_profile, Partition};
//! use mqmi::states::ggz;
//!
//! let state = ggz(3, 0.5, 0.0).unwrap();
//! let profile = mqmi_profile(&state, &Partition::singletons(3)).unwrap();
//! assert!((profile[0] - 3.0).abs() < 1e-9); // T_3 of the GHZ state
//! ```

pub mod channels;
pub mod entropy;
pub mod error;
pub mod measures;
pub mod qmatrix;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use qmatrix::{CMatrix, CVector, MultipartiteState, SubsystemSet, C64, DEFAULT_TOL};
