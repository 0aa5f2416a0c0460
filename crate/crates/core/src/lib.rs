//! Exact-arithmetic Krichever–Novikov type algebras on the Riemann sphere
//! with finitely many marked points.

pub mod exactnum;
pub mod forms;
pub mod geometry;
pub mod ratfunc;
pub mod knbasis;
pub mod linalg;
pub mod algebras;
pub mod cocycles;
pub mod fock;
pub mod lax;
