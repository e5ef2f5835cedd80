//! Every chapter of the guide in `book/src` is included here so that
//! `cargo test` runs its code blocks as doctests. One module per chapter
//! keeps failures traceable to their file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/formulas.md")]
pub mod formulas {}
#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}
#[doc = include_str!("../../../book/src/updates.md")]
pub mod updates {}
#[doc = include_str!("../../../book/src/quantifier.md")]
pub mod quantifier {}
#[doc = include_str!("../../../book/src/tiling.md")]
pub mod tiling {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/testing.md")]
pub mod testing {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
