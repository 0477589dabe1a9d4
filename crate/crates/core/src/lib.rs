//! Two-parameter non-commutative central limit machinery.
//!
//! The crate is organised bottom-up:
//!
//! * [`pairings`]: pair partitions of `[2n]`, their crossings and nestings,
//!   and the equivalence classes of index tuples.
//! * [`wickpoly`]: exact polynomials in `(q, t)` and the Wick-type moment sums.
//! * [`fock`]: a truncated `(q,t)`-Fock space with creation, annihilation and
//!   field operators.
//! * [`coeffs`]: commutation-coefficient tables, their random sampling and the
//!   normal-ordering algorithm.
//! * [`jw`]: the two-parameter Jordan-Wigner matrix model evaluated as sparse
//!   monomial operators.
//! * [`clt`]: finite-`N` moment and crossing/nesting estimator experiments.

pub mod clt;
pub mod coeffs;
pub mod error;
pub mod fock;
pub mod jw;
pub mod pairings;
pub mod wickpoly;

pub use error::{Error, Result};

/// Formats a float with 17 significant digits, the canonical rendering used
/// by every CSV emitted by this crate. Parsing the output with
/// `str::parse::<f64>` recovers the value bit-for-bit.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of negative zero out of reports
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}
