//! Runs the Rust snippets of the guide in `book/src` as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/distributions.md")]
pub mod distributions {}

#[doc = include_str!("../../../book/src/placement.md")]
pub mod placement {}

#[doc = include_str!("../../../book/src/genetic.md")]
pub mod genetic {}

#[doc = include_str!("../../../book/src/ilp.md")]
pub mod ilp {}

#[doc = include_str!("../../../book/src/wfft.md")]
pub mod wfft {}

#[doc = include_str!("../../../book/src/synthetic.md")]
pub mod synthetic {}

#[doc = include_str!("../../../book/src/cachesim.md")]
pub mod cachesim {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
