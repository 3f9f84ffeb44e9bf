pub mod cli;
pub mod dynamics;
pub mod entropy;
pub mod expansion;
pub mod parallel;
pub mod rng;
pub mod subres;
pub mod walk;
