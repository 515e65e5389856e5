//! Analysis of homogeneous potentials of degree -1 at Darboux points.

pub mod expr;
pub mod parse;
pub mod potential;
pub mod ratfunc;
pub mod darboux;
pub mod eigen;
pub mod exact_eigen;
pub mod verdict;
pub mod input;
pub mod pipeline;
pub mod report;
