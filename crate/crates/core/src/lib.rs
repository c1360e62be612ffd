//! Bounded decision procedures for modal consequence relations.

pub mod consequence;
pub mod domain;
pub mod frameprops;
pub mod kripke;
pub mod syntax;
pub mod update;
pub mod io;
pub mod harness;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/kripke.md")]
    mod kripke {}
    #[doc = include_str!("../../../book/src/frameprops.md")]
    mod frameprops {}
    #[doc = include_str!("../../../book/src/consequence.md")]
    mod consequence {}
    #[doc = include_str!("../../../book/src/informational.md")]
    mod informational {}
    #[doc = include_str!("../../../book/src/update.md")]
    mod update {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
