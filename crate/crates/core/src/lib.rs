//! Batched tridiagonal solvers for multi-dimensional meshes.
//!
//! Thomas, PCR and the tiled Thomas-Thomas / Thomas-PCR splittings, the line
//! batching that drives them along each axis of a mesh, an ADI heat diffusion
//! step built on top, and an analytic FPGA performance model in [`perfmodel`].
//!
//! The crate is `no_std` with `alloc`.
//!
//! ```
//! use tridax_core::{thomas_solve, TridiagonalSystem};
//!
//! let sys = TridiagonalSystem::new(
//!     vec![0.0, -1.0, -1.0],
//!     vec![2.0, 2.0, 2.0],
//!     vec![-1.0, -1.0, 0.0],
//!     vec![1.0, 0.0, 1.0],
//! )
//! .unwrap();
//! let u = thomas_solve(&sys).unwrap();
//! assert!((u[1] - 1.0f64).abs() < 1e-12);
//! ```

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod adi;
pub mod batch;
pub mod dense;
pub mod error;
pub mod mesh;
pub mod pcr;
pub mod perfmodel;
pub mod scalar;
pub mod system;
pub mod thomas;
pub mod tiled;

pub use adi::{
    adi_rhs, adi_step, adi_sweep, adi_update, effective_bandwidth, AdiConfig, AdiError, AdiTraffic,
    DiagonalRule,
};
pub use batch::{batch_solve, Algorithm, BatchOptions, BatchSolution, Layout, TridiagonalBatch};
pub use dense::{dense_oracle_solve, DENSE_ORACLE_LIMIT};
pub use error::{BatchError, SolveError};
pub use mesh::{solve_lines, Axis, Dims, ExecConfig, Mesh, MeshError};
pub use pcr::pcr_solve;
pub use scalar::{Precision, Real};
pub use system::{residual_max_norm, TridiagonalSystem};
pub use thomas::thomas_solve;
pub use tiled::{thomas_pcr_solve, thomas_thomas_solve, ReducedSolver, TilePlan};
