//! Service-oriented logic programming: Muller automata, temporal logic,
//! asynchronous relational networks, program expressions, and a resolution
//! engine that is generic over the scheme of specifications.

pub mod arn;
pub mod corpus;
pub mod engine;
pub mod ltl;
pub mod muller;
pub mod pexpr;
pub mod sigcat;
