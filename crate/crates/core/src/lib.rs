//! Interpreter and analysis toolkit for a probabilistic polymorphic lambda
//! calculus with recursive and existential types and a ground store.

pub mod syntax;
pub mod prob;
pub mod semantics;
pub mod typecheck;
pub mod analysis;
pub mod corpus;
pub mod equiv;
pub mod cli;
