//! Locally repairable codes with information locality built from
//! combinatorial designs, their sector-disk style array arrangements, and
//! Goppa-style variants, together with the exact machinery to verify them.

pub mod algebra;
pub mod designs;
pub mod bounds;
pub mod erasure;
pub mod fixtures;
pub mod goppa;
pub mod gsd;
pub mod lrc;
pub mod sweep;
