//! Obstacle-number lower bounds via SAT, and exact checking of obstacle
//! drawings.

pub mod cnf;
pub mod encode;
pub mod graph;
pub mod orientation;
pub mod paths;
pub mod solver;
pub mod verify;
