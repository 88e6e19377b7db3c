pub mod compile;
pub mod corpus;
pub mod diagonal;
pub mod eval;
pub mod godel;
pub mod halt;
pub mod imp;
pub mod nat;
pub mod poly;
pub mod recognize;
pub mod rf;
