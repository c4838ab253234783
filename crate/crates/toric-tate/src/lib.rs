//! Tate resolutions, sheaf cohomology and resolutions of the diagonal on
//! weighted projective and toric stacks, computed with exact linear algebra
//! over a field through the multigraded BGG correspondence.

pub mod linalg;
pub mod par;
pub mod smodule;
pub mod toric;
pub mod diffmod;
pub mod exterior;
pub mod bgg;
pub mod dmres;
pub mod cohomology;
pub mod tate;
pub mod diagonal;
