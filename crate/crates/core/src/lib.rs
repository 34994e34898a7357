pub mod arith;
pub mod config;
pub mod triangulation;
pub mod flip;
pub mod input;
pub mod lp;
pub mod regularity;
pub mod search;
pub mod symmetry;
