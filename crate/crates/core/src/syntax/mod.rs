//! Abstract and concrete syntax shared by CR and SCR.

mod parse;
mod term;
mod ty;

pub use parse::{
    parse_term, parse_term_spanned, parse_type, ParseError, Parsed, SourceSpan, SpanTree,
};
pub use term::{term_equal, Dir, Path, Term, TermKind};
pub use ty::{CrType, ScrType, System, TypeLang};

/// Canonical concrete syntax; `parse_term(&print_term(t)) == Ok(t)`.
pub fn print_term<T: TypeLang>(t: &Term<T>) -> String {
    t.to_string()
}
