//! Clifford algebras `Cl(p,q)` over ℚ and exact matrix representations of
//! their generators.

mod algebra;
mod family;

pub use algebra::{blade_mul, Blade, CliffordElement, CliffordSignature};
pub use family::{
    build_epsilon_family, check_anticommutation, extend_to_algebra_hom, is_signed_permutation,
    verify_epsilon_family, CliffordRepresentation, Epsilon, EpsilonFamily, RelationFailure,
    VerificationReport,
};
