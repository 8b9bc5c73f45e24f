//! Exact linear algebra over finite abelian groups.

mod group;
mod linear;
mod snf;

pub use group::{
    annihilator, image, preimage, quotient, subgroup, AbHom, BilinearForm, FiniteAbelianGroup, Quotient,
    SubgroupPresentation,
};
pub use linear::{LinearSolver, ModSolver};
pub use snf::{smith_normal_form, IntMatrix, Smith};
