//! Deciding the Hasse principle for multinorm equations over Q.

pub mod abelian_q;
pub mod arith;
pub mod brauer;
pub mod cyclic_products;
pub mod error;
pub mod intmat;
pub mod oracle;
pub mod sha_core;
pub mod splitting;

pub use abelian_q::{AbelianFieldQ, GaloisAmbient, GaloisSubgroup, Place};
pub use error::{Error, Result};
pub use brauer::{decide, knot_group, parse_rational, Multinorm, Obstruction, Verdict};
pub use cyclic_products::{example_map_f, sha_prime_case, sha_product_cyclic, PrimeCaseReport};
pub use oracle::{norm_solution_search, spot_check_profile};
pub use sha_core::{compute_sha, Limits, ShaDecomposition, ShaGroup};
pub use splitting::{Context, SplittingProfile};
