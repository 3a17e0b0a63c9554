//! Exact computations behind growth estimates for torsion in homotopy
//! groups: linear algebra over `F_p`, free Lie algebra counts, symmetric
//! group actions on tensor powers, the mod 2 lambda algebra, Moore space
//! homology bookkeeping and certified growth-rate lower bounds.

pub mod field;
pub mod free_lie;
pub mod growth;
pub mod lambda;
pub mod logbounds;
pub mod moore;
pub mod tensor;
pub mod verify;
