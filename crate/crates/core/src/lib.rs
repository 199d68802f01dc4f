//! Exact branch-and-cut for interdiction games with a monotone submodular
//! follower objective under knapsack constraints.

pub mod cuts;
pub mod error;
pub mod follower;
pub mod instance;
pub mod lp;
pub mod master;
pub mod numfmt;
pub mod problems;
pub mod report;
pub mod submodular;
pub mod verify;

pub use error::{Error, Result};
