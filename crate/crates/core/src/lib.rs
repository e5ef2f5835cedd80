//! Model checking for arbitrary arrow update logic on finite Kripke models.
//!
//! ```
//! use aaul::checker::{satisfies, Budget};
//! use aaul::kripke::load_model;
//! use aaul::syntax::parse_formula;
//!
//! let m = load_model("states: s t\nagent a: s->t t->t\nval p: t\n").unwrap();
//! let f = parse_formula("<*>[a]false").unwrap();
//! assert!(satisfies(&m, 0, &f, Budget::default()).unwrap());
//! ```

pub mod bisim;
pub mod checker;
pub mod error;
pub mod kripke;
pub mod oracle;
pub mod syntax;
pub mod tiling;
pub mod updates;

pub use checker::{Budget, Checker};
pub use error::EvalError;
pub use kripke::KripkeModel;
pub use syntax::{Clause, Formula, Update};
