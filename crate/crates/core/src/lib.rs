//! Exact computations for twisted Yangians attached to σ-quiver varieties:
//! rational-function matrix algebra, Dynkin data, K-class reflections,
//! fixed-point tableaux, R- and K-matrices, the identities they satisfy and
//! the induced-polarization constraint problem.

pub mod ratfield;
pub mod dynkin;
pub mod kclass;
pub mod tableaux;
pub mod rkmat;
pub mod relations;
pub mod polarization;
pub mod acceptance;
