//! Combinatory ReFLect (CR), a variable-free combinatory logic with
//! quotation and reflection operators, and its stratified variant (SCR).
//!
//! The crate provides a parser and printer, the two typing judgments, a
//! small-step reducer with cycle detection, builders for the classic
//! self-referential constructions, and an enumeration lab that checks
//! metatheoretic properties exhaustively up to a size bound.

pub mod cli;
pub mod constructions;
pub mod lab;
pub mod reduction;
pub mod syntax;
pub mod typing;

pub use syntax::{CrType, ScrType, System, Term, TermKind, TypeLang};

/// Stack size used for runs over very deep terms. The reducer and checker
/// recurse along the term, and long runs of the diagonal construction build
/// application chains thousands of nodes deep.
pub const DEEP_STACK_BYTES: usize = 1 << 29;

/// Run `f` on a scoped thread with [`DEEP_STACK_BYTES`] of stack.
pub fn with_deep_stack<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(DEEP_STACK_BYTES)
            .spawn_scoped(scope, f)
            .expect("spawn worker thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}
