//! Exact combinatorics and arithmetic for log and p-adic geometry.
//!
//! Exact linear algebra, affine monoids, polysimplicial sets, graphs with
//! branches, currents, p-adic splitting arithmetic, graphs of finite groups
//! and cospecialization maps.

pub mod algebra;
pub mod cospec;
pub mod currents;
pub mod gog;
pub mod graphs;
pub mod monoids;
pub mod polysimplicial;
pub mod presentation;
pub mod splitting;
