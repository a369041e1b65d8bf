pub mod chain;
pub mod domain;
pub mod executive;
pub mod harness;
pub mod kitchen;
pub mod logic;
pub mod perception;
pub mod planner;
pub mod rng;
pub mod sim;
