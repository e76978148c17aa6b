//! The book chapters, attached as module docs so that every code snippet in
//! `book/src/` compiles and runs under `cargo test --doc`. The rendered book
//! (`mdbook build book`) and these doc-tests share the same source files and
//! cannot drift apart.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/uncertainty.md")]
pub mod uncertainty {}

#[doc = include_str!("../../../book/src/deterministic_subproblems.md")]
pub mod deterministic_subproblems {}

#[doc = include_str!("../../../book/src/bottleneck_labels.md")]
pub mod bottleneck_labels {}

#[doc = include_str!("../../../book/src/generators_and_oracle.md")]
pub mod generators_and_oracle {}

#[doc = include_str!("../../../book/src/files_and_cli.md")]
pub mod files_and_cli {}
