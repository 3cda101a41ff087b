pub mod bnb;
pub mod generator;
pub mod harness;
pub mod heuristics;
pub mod lp;
pub mod metrics;
pub mod model;
pub mod mps;
pub mod probe;
pub mod sos1;
