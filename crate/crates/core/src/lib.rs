pub mod alphabet;
pub mod corpus;
pub mod error;
pub mod field;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod quad;
pub mod spectrum;
pub mod structure;
pub mod util;
pub mod rank;
