//! Exact toric geometry.
//!
//! Cones, fans and lattice polytopes go in; toric-variety invariants,
//! divisor positivity, momentum-map images and the contact classification of
//! odd-dimensional smooth projective toric varieties come out. All
//! combinatorial questions are answered in exact integer or rational
//! arithmetic; only the analytic momentum-map evaluation uses `f64`.
//!
//! ```
//! use toric::fan::Fan;
//!
//! let p2 = Fan::projective_space(2);
//! assert!(p2.is_complete());
//! assert!(p2.is_smooth());
//! assert_eq!(p2.euler_characteristic().unwrap(), 3);
//! ```

pub mod cli;
pub mod cone;
pub mod divisor;
mod error;
pub mod fan;
pub mod lattice;
mod linalg;
pub mod moment;
mod polyhedral;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/cones.md")]
    mod cones {}
    #[doc = include_str!("../../../book/src/fans.md")]
    mod fans {}
    #[doc = include_str!("../../../book/src/divisors.md")]
    mod divisors {}
    #[doc = include_str!("../../../book/src/moment.md")]
    mod moment {}
    #[doc = include_str!("../../../book/src/contact.md")]
    mod contact {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
