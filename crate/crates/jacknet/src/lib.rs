//! Analysis toolkit for Markovian Jackson networks: stability validation,
//! explicit multiplicative Lyapunov functions, lower and upper bounds on the
//! essential spectral radius with closed forms for several routing families,
//! and an embedded continuous-time Markov chain simulator for empirical
//! cross-checks.

pub mod bounds;
pub mod error;
pub mod game;
pub mod generator;
pub mod linalg;
pub mod lyapunov;
pub mod network;
pub mod optim;
pub mod report;
pub mod sim;
pub mod special;
pub mod testnets;

pub use error::{Error, Result};
pub use network::{
    detect_branching, solve_traffic, time_reverse, validate_network, JacksonNetwork,
    TrafficSolution,
};
