pub mod error;
pub mod par;
pub mod poly;
pub mod syntax;

pub use error::{Error, Result};
pub use par::Execution;
pub use poly::{MonomialMap, PolyExpr, Rational, Vars};
pub mod exterior;
pub mod structures;
pub mod geometry;
pub mod regularity;
pub mod dynamics;
pub mod catalog;
