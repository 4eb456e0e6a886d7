pub mod diagnostics;
pub mod driver;
pub mod embedding;
pub mod gkr;
pub mod graph;
pub mod harness;
pub mod lp;
pub mod rounding;
