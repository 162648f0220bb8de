//! Factorization of joint PMFs over GF(|A|)^N into soft parity check
//! interactions, lifting to a dual-Hamming Tanner graph, and exact or
//! sum-product marginalization on that graph.
//!
//! Pipeline: a [`JointPmf`] is projected onto every interaction subspace by
//! [`factorize`]; the resulting [`Factorization`] is turned into a
//! [`TannerGraph`] with hard parity checks and degree-one factors by
//! [`lift_to_tanner`]; marginals come from [`brute_marginals_lifted`] or
//! [`sum_product`].

pub mod error;
pub mod factorize;
pub mod galois;
pub mod io;
pub mod pmfspace;
pub mod spci;
pub mod tanner;
pub mod umm;
pub mod verify;

pub use error::{Error, Result};
pub use factorize::{
    factorize, project, project_by_basis, reconstruct, residual_norm, subspace_basis,
    Factorization, SubspaceBasis,
};
pub use galois::{
    projective_count, projective_reps, FieldMatrix, FieldSpec, GaloisField, ParityVector,
};
pub use pmfspace::{
    box_dot, box_plus, inner_product, l_inverse, l_map, norm, JointPmf, LogCoord, Pmf,
};
pub use spci::{spci_detect, spci_make, spci_order, SpciFactor};
pub use tanner::{build_parity_matrices, export_graph, lift_to_tanner, ExportFormat, TannerGraph};
pub use umm::{
    brute_marginals, brute_marginals_lifted, check_node_naive, check_node_transform, sum_product,
    BpConfig, BpReport, Message,
};
