//! Heegaard Floer d-invariants of Brieskorn spheres `Sigma(p,q,r)` with
//! `pq + pr - qr = 1`.
//!
//! Two independent routes compute the same number:
//!
//! * [`fast::d_invariant`], a closed-form scan over a small lattice of
//!   characteristic classes, and
//! * [`oracle::oracle_d`], a brute-force search over full paths on the
//!   negative definite plumbing graph built by [`plumbing::build_asl_graph`].

pub mod arith;
pub mod commands;
pub mod error;
pub mod families;
pub mod fast;
pub mod linalg;
pub mod oracle;
pub mod plumbing;
pub mod triplet;

pub use arith::{cf_evaluate, cf_expand, solve_seifert_diophantine, CfExpansion, Rational, SeifertData};
pub use error::{Error, Result};
pub use families::{builtin_families, builtin_family, enumerate_triplets, verify_family, FamilySpec};
pub use fast::{d_invariant, region_dump, DInvariantResult, LatticePoint, Method, RegionSlice};
pub use oracle::{oracle_d, run_full_path, OracleConfig, OracleResult, PathOutcome, Verdict, VertexOrder};
pub use plumbing::{build_asl_graph, build_simple_linear, build_star_graph, AslGraph, CharVector, PlumbingGraph};
pub use triplet::Triplet;
