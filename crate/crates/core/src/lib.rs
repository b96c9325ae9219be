//! Permutation groups of small degree, their orbits on subsets, and the
//! groups of automorphisms of relations (families of subsets).

pub mod budget;
pub mod catalog;
pub mod certify;
pub mod error;
pub mod group;
pub mod perm;
pub mod relation;
pub mod report;
pub mod set_orbits;
pub mod subset;

pub use budget::Budget;
pub use catalog::{Catalog, CatalogEntry, Claim, ClaimKind};
pub use certify::{decide_relation_group, NotRgCertificate, RgStatus, RgVerdict};
pub use error::{Error, Result};
pub use group::PermGroup;
pub use perm::Permutation;
pub use relation::{invariance_group, orbit_relation, Relation};
pub use report::{ClaimReport, Verdict, VerifyOptions};
pub use subset::SubsetMask;
