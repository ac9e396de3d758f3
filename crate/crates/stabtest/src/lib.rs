//! Single-copy stabilizer testing and Clifford-commutant verification.
//!
//! The toolkit has two halves that share an exact-arithmetic core:
//!
//! * **Testing half** ([`spanning`], [`tester`], backed by [`gf2`], [`pauli`],
//!   [`tableau`], [`statevec`]): estimate the average spanning probability of
//!   computational difference samples of `C|ψ⟩` over random Cliffords `C`,
//!   compare against the exact closed-form value attained by stabilizer
//!   states, and decide "stabilizer" vs "far from stabilizer" from
//!   single-copy measurements only.
//! * **Commutant half** ([`commutant`]): desk-scale numerical checks of the
//!   stochastic-Lagrangian subspace family Σ_{t,t}, the stochastic
//!   orthogonal group O_t, the operators R(T), their Gram matrix, the
//!   partial-transpose singular-value law, and the projector Π_O with its
//!   t = 6 product-state counterexample.
//!
//! Everything stochastic is driven by explicit seeds with one ChaCha stream
//! per Monte-Carlo trial, so results are reproducible bit-for-bit regardless
//! of worker-thread count.

pub mod commutant;
pub mod error;
pub mod gf2;
pub mod pauli;
pub mod spanning;
pub mod statevec;
pub mod tableau;
pub mod tester;
pub mod verify;

pub use error::{Error, Result};
