//! Exact modular certificates for sums of squares of forms.
//!
//! The crate computes, over a prime field Z/p, the ranks that control the
//! secant varieties of the variety of squares: Terracini spans (dimension),
//! stacked Hessians of the annihilating hyperplanes (tangential contact
//! loci, hence `O(r)`-identifiability), and catalecticants. It also lists the
//! `O(2)`-orbits of two-square decompositions of binary forms.
//!
//! Every certificate is one-sided: maximal ranks observed over Z/p at a
//! sampled point certify the corresponding generic statement over C, while
//! anything else is reported as inconclusive.

pub mod binary;
pub mod catalect;
pub mod cli;
pub mod contact;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod poly;
pub mod secant;
pub mod seed;

pub use binary::{
    distinct_orbits, gram_invariant, orbit_decompositions, random_orthogonal, verify_decomposition, Decomposition,
    GramInvariant, OrbitComparison,
};
pub use catalect::{catalecticant, containment_check, middle_cat_rank, Catalecticant};
pub use contact::{
    complement_basis, contact_locus_dim, generic_identifiability, hyperplane_basis, specific_identifiability,
    stacked_hessian_rank, ContactData, HessianMode, IdentifiabilityCertificate, IdentifiabilityVerdict,
};
pub use error::{Error, Result};
pub use gf::{FieldElement, Modulus};
pub use linalg::{kernel_basis, rank, rank_lower_bound_streaming, FMatrix};
pub use poly::{contract, monomial_basis, poly_mul, GradedBasis, HomogeneousPoly, Monomial};
pub use secant::{
    bdp_bound_check, bop2_bound_check, expected_dim, generic_rank, secant_dim_sample, terracini_matrix,
    DimensionReport, DimensionVerdict, SecantParams,
};
