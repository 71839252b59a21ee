//! Effective-cone thresholds and weighted bounded negativity bounds for
//! blowups of Hirzebruch surfaces and of the projective plane at
//! configurations of infinitely near points.

pub mod bounds;
pub mod cone;
pub mod config;
pub mod fixtures;
pub mod formulas;
pub mod lattice;
pub mod rational;
