//! Exact linear algebra over Z and Q and the mixed category built from both.

pub mod complex;
pub mod matrix;
pub mod mixed;
pub mod module;
pub mod presented;
pub mod snf;
pub mod sparse;
