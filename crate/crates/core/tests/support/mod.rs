//! Checkers shared by the integration tests and the acceptance suite.
//! Each returns the violations it found; an empty list means the property holds.

#![allow(dead_code)]

pub mod albl;
pub mod numerics;
pub mod oracles;
pub mod protocol;
