//! Seeded corpora and independent brute-force oracles for the anabel tests.

pub mod corpus;
pub mod groups;
pub mod oracles;
