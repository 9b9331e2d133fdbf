//! Poset polytopes, type C pipe dreams, and exact machine verification of
//! toric and Gröbner degenerations of symplectic and odd orthogonal flag
//! varieties at small rank.

pub mod degenverify;
pub mod exactalg;
pub mod grobner;
pub mod liealg;
pub mod pipedream;
pub mod polytope_b;
pub mod polytope_c;
pub mod poset;

pub use degenverify::{Report, Status};
pub use exactalg::{Monomial, MonomialOrder, OrderKind, Poly, Rational, Ring, VarName};
pub use grobner::{Certificate, Grading, GroebnerBasis, Ideal};
pub use liealg::{LieType, Module, Realization, Tensor};
pub use pipedream::{SignedPermutation, Twist};
pub use polytope_b::WeightB;
pub use polytope_c::{WeightC, XiMap};
pub use poset::{OSet, OrderIdeal, PosetElement, PosetP};
