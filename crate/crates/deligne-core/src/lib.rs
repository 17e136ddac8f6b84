//! Equivariant smooth Deligne cohomology for finite group actions on finite
//! simplicial complexes, computed exactly.

pub mod exact;
pub mod group;
pub mod group_cohomology;
pub mod integral;
pub mod action;
pub mod assembly;
pub mod cover;
pub mod deligne;
pub mod forms;
pub mod sequences;
pub mod simplicial;
pub mod spectral;
