#![allow(unused_imports)]

pub use anabel_testkit::corpus::*;
pub use anabel_testkit::oracles::*;
