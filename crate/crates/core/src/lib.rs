//! Exact normal ordering for boson operators that are linear in one of the
//! ladder operators, `q(a†)a + v(a†)` and its conjugate `a†q(a) + v(a)`.
//!
//! The crate is layered bottom-up:
//!
//! * [`fps`]: truncated formal power series over exact rationals.
//! * [`boson`]: normally ordered Weyl-algebra elements, the brute-force
//!   product oracle, and a truncated Fock-space numeric oracle.
//! * [`sheffer`]: Sheffer sequences, their raising/lowering operators, and
//!   the named polynomial families.
//! * [`flow`]: the flow equations for `T(λ,x)` and `G(λ,x)`, the normally
//!   ordered exponential, coherent-state elements, and the two-way
//!   correspondence between `(q, v)` and Sheffer pairs `(A, B)`.
//! * [`combinat`]: Stirling and Bell numbers and the integer sequences that
//!   fall out of particular `(q, v)` choices.

pub mod boson;
pub mod combinat;
pub mod flow;
pub mod fps;
pub mod poly;
pub mod rational;
pub mod sheffer;

pub use boson::{NormalForm, Side};
pub use flow::{BiSeries, NormalExponential, QvSymbol};
pub use fps::Series;
pub use poly::Poly;
pub use rational::Rational;
pub use sheffer::{LadderOp, ShefferPair};
