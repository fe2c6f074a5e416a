//! Surface syntax reader.
//!
//! ```text
//! type_cr  := "bool" | "unit" | "term" | type_cr "->" type_cr | "(" type_cr ")"
//! type_scr := "bool" | "unit" | "term" "[" type_scr "]" | type_scr "->" type_scr | "(" type_scr ")"
//! atom     := "I[" ty "]" | "K[" ty "," ty "]" | "S[" ty "," ty "," ty "]"
//!           | "value[" ty "]" | "lift" | "lift[" ty "]" | "app"
//!           | "true" | "false" | "not" | "<<" term ">>" | "(" term ")"
//! term     := atom | term atom
//! ```

use std::collections::BTreeSet;
use std::fmt;

use super::term::{Dir, Path, Term, TermKind};
use super::ty::{System, TypeLang};

/// Character offsets into the source text, `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }

    fn join(self, other: SourceSpan) -> Self {
        SourceSpan::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// Spans of a parsed term, mirroring its shape: an application has two
/// children (function, argument), a quotation one, an atom none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanTree {
    pub span: SourceSpan,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    fn leaf(span: SourceSpan) -> Self {
        SpanTree {
            span,
            children: Vec::new(),
        }
    }

    /// Span of the subterm at `path`, or of the deepest node on the way.
    pub fn lookup(&self, path: &Path) -> SourceSpan {
        let mut cur = self;
        for dir in &path.0 {
            let idx = match dir {
                Dir::Fun | Dir::Body => 0,
                Dir::Arg => 1,
            };
            match cur.children.get(idx) {
                Some(next) => cur = next,
                None => break,
            }
        }
        cur.span
    }
}

/// A term together with the source location of every node.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub term: Term<T>,
    pub spans: SpanTree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: BTreeSet<String>,
    pub found: String,
    pub note: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}: ", self.span)?;
        if let Some(note) = &self.note {
            return write!(f, "{note}");
        }
        let expected: Vec<&str> = self.expected.iter().map(String::as_str).collect();
        match expected.as_slice() {
            [] => write!(f, "unexpected {}", self.found),
            [one] => write!(f, "expected {one}, found {}", self.found),
            many => write!(
                f,
                "expected one of {}, found {}",
                many.join(" "),
                self.found
            ),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    LBracket,
    RBracket,
    Comma,
    LParen,
    RParen,
    LQuote,
    RQuote,
    Arrow,
    Bad(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LQuote => "`<<`".into(),
            Tok::RQuote => "`>>`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Bad(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Vec<(Tok, SourceSpan)> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = chars.get(i + 1).copied();
        let tok = match (c, two) {
            ('<', Some('<')) => {
                i += 2;
                Tok::LQuote
            }
            ('>', Some('>')) => {
                i += 2;
                Tok::RQuote
            }
            ('-', Some('>')) => {
                i += 2;
                Tok::Arrow
            }
            ('[', _) => {
                i += 1;
                Tok::LBracket
            }
            (']', _) => {
                i += 1;
                Tok::RBracket
            }
            (',', _) => {
                i += 1;
                Tok::Comma
            }
            ('(', _) => {
                i += 1;
                Tok::LParen
            }
            (')', _) => {
                i += 1;
                Tok::RParen
            }
            (c, _) if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                Tok::Word(chars[start..i].iter().collect())
            }
            (c, _) => {
                i += 1;
                Tok::Bad(c)
            }
        };
        out.push((tok, SourceSpan::new(start, i)));
    }
    out.push((Tok::Eof, SourceSpan::new(chars.len(), chars.len())));
    out
}

const TERM_STARTS: [&str; 11] = [
    "`I`", "`K`", "`S`", "`value`", "`lift`", "`app`", "`true`", "`false`", "`not`", "`<<`", "`(`",
];

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> SourceSpan {
        let sp = self.span();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        sp
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError {
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
            note: None,
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<SourceSpan, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[&tok.describe()]))
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::LQuote | Tok::LParen => true,
            Tok::Word(w) => matches!(
                w.as_str(),
                "I" | "K" | "S" | "value" | "lift" | "app" | "true" | "false" | "not"
            ),
            _ => false,
        }
    }

    fn term<T: TypeLang>(&mut self) -> Result<(Term<T>, SpanTree), ParseError> {
        if !self.starts_atom() {
            return Err(self.unexpected(&TERM_STARTS));
        }
        let (mut term, mut spans) = self.atom::<T>()?;
        while self.starts_atom() {
            let (arg, arg_spans) = self.atom::<T>()?;
            let span = spans.span.join(arg_spans.span);
            term = Term::apply(term, arg);
            spans = SpanTree {
                span,
                children: vec![spans, arg_spans],
            };
        }
        Ok((term, spans))
    }

    fn bracketed<T: TypeLang>(&mut self, n: usize) -> Result<(Vec<T>, SourceSpan), ParseError> {
        self.expect(Tok::LBracket)?;
        let mut tys = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                self.expect(Tok::Comma)?;
            }
            tys.push(self.ty::<T>()?);
        }
        let end = self.expect(Tok::RBracket)?;
        Ok((tys, end))
    }

    fn atom<T: TypeLang>(&mut self) -> Result<(Term<T>, SpanTree), ParseError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::LQuote => {
                self.bump();
                let (body, body_spans) = self.term::<T>()?;
                let end = self.expect(Tok::RQuote)?;
                Ok((
                    Term::quote(body),
                    SpanTree {
                        span: start.join(end),
                        children: vec![body_spans],
                    },
                ))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.term::<T>()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Word(w) => {
                self.bump();
                let (kind, end) = match w.as_str() {
                    "I" => {
                        let (mut t, end) = self.bracketed::<T>(1)?;
                        (TermKind::I(t.remove(0)), end)
                    }
                    "K" => {
                        let (t, end) = self.bracketed::<T>(2)?;
                        let [a, b]: [T; 2] = t.try_into().expect("two types");
                        (TermKind::K(a, b), end)
                    }
                    "S" => {
                        let (t, end) = self.bracketed::<T>(3)?;
                        let [a, b, c]: [T; 3] = t.try_into().expect("three types");
                        (TermKind::S(a, b, c), end)
                    }
                    "value" => {
                        let (mut t, end) = self.bracketed::<T>(1)?;
                        (TermKind::Value(t.remove(0)), end)
                    }
                    "lift" => match (T::SYSTEM, self.peek()) {
                        (System::Cr, Tok::LBracket) => {
                            return Err(ParseError {
                                span: self.span(),
                                expected: BTreeSet::new(),
                                found: "`[`".into(),
                                note: Some("`lift` takes no type annotation in CR".into()),
                            })
                        }
                        (System::Cr, _) => (TermKind::Lift, start),
                        (System::Scr, Tok::LBracket) => {
                            let (mut t, end) = self.bracketed::<T>(1)?;
                            (TermKind::LiftAt(t.remove(0)), end)
                        }
                        (System::Scr, _) => {
                            return Err(ParseError {
                                span: start,
                                expected: ["`[`".to_string()].into(),
                                found: self.peek().describe(),
                                note: Some(
                                    "`lift` needs a type annotation `lift[σ]` in SCR".into(),
                                ),
                            })
                        }
                    },
                    "app" => (TermKind::App, start),
                    "true" => (TermKind::True, start),
                    "false" => (TermKind::False, start),
                    "not" => (TermKind::Not, start),
                    _ => unreachable!("starts_atom admitted {w}"),
                };
                Ok((Term::new(kind), SpanTree::leaf(start.join(end))))
            }
            _ => Err(self.unexpected(&TERM_STARTS)),
        }
    }

    fn ty<T: TypeLang>(&mut self) -> Result<T, ParseError> {
        let dom = self.ty_prim::<T>()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let cod = self.ty::<T>()?;
            Ok(T::arrow(dom, cod))
        } else {
            Ok(dom)
        }
    }

    fn ty_prim<T: TypeLang>(&mut self) -> Result<T, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.ty::<T>()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Word(w) if w == "bool" => {
                self.bump();
                Ok(T::bool())
            }
            Tok::Word(w) if w == "unit" => {
                self.bump();
                Ok(T::unit())
            }
            Tok::Word(w) if w == "term" => {
                self.bump();
                match T::SYSTEM {
                    System::Cr => Ok(T::quotation_of(&T::unit())),
                    System::Scr => {
                        if *self.peek() != Tok::LBracket {
                            let mut err = self.unexpected(&["`[`"]);
                            err.note = Some("SCR quotation types are written `term[σ]`".into());
                            return Err(err);
                        }
                        self.bump();
                        let inner = self.ty::<T>()?;
                        self.expect(Tok::RBracket)?;
                        Ok(T::quotation_of(&inner))
                    }
                }
            }
            _ => Err(self.unexpected(&["`bool`", "`unit`", "`term`", "`(`"])),
        }
    }
}

/// Parse a complete term, keeping the span of every node.
pub fn parse_term_spanned<T: TypeLang>(src: &str) -> Result<Parsed<T>, ParseError> {
    let mut p = Parser {
        toks: lex(src),
        pos: 0,
    };
    let (term, spans) = p.term::<T>()?;
    if *p.peek() != Tok::Eof {
        let mut expected: Vec<&str> = TERM_STARTS.to_vec();
        expected.push("end of input");
        return Err(p.unexpected(&expected));
    }
    Ok(Parsed { term, spans })
}

pub fn parse_term<T: TypeLang>(src: &str) -> Result<Term<T>, ParseError> {
    parse_term_spanned(src).map(|p| p.term)
}

/// Parse a standalone type.
pub fn parse_type<T: TypeLang>(src: &str) -> Result<T, ParseError> {
    let mut p = Parser {
        toks: lex(src),
        pos: 0,
    };
    let ty = p.ty::<T>()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(&["`->`", "end of input"]));
    }
    Ok(ty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{CrType, ScrType};

    type Cr = Term<CrType>;
    type Scr = Term<ScrType>;

    #[test]
    fn reads_annotated_identity() {
        assert_eq!(
            parse_term::<CrType>("I[bool]").unwrap(),
            Cr::i(CrType::Bool)
        );
    }

    #[test]
    fn reads_f_construction() {
        let t = parse_term::<CrType>("S[term,term,term] app lift").unwrap();
        let s = Cr::s(CrType::Term, CrType::Term, CrType::Term);
        assert_eq!(t, s.to(Cr::app()).to(Cr::lift()));
    }

    #[test]
    fn reads_quotation() {
        let t = parse_term::<CrType>("value[term] <<I[term]>>").unwrap();
        assert_eq!(t, Cr::value(CrType::Term).to(Cr::i(CrType::Term).quoted()));
        let nested = parse_term::<CrType>("<<<<I[term]>>>>").unwrap();
        assert_eq!(nested, Cr::i(CrType::Term).quoted().quoted());
    }

    #[test]
    fn arrows_associate_right_and_parens_group() {
        let t = parse_type::<CrType>("term -> term -> bool").unwrap();
        assert_eq!(
            t,
            CrType::arrows([CrType::Term, CrType::Term, CrType::Bool])
        );
        let t = parse_type::<CrType>("(bool -> bool) -> unit").unwrap();
        assert_eq!(
            t,
            CrType::arrow(CrType::arrow(CrType::Bool, CrType::Bool), CrType::Unit)
        );
        let t = parse_term::<CrType>("not (not true)").unwrap();
        assert_eq!(t, Cr::not().to(Cr::not().to(Cr::bool_const(true))));
    }

    #[test]
    fn scr_types_and_lift() {
        let t = parse_term::<ScrType>("lift[term[bool]] <<<<true>>>>").unwrap();
        let ty = ScrType::term_of(ScrType::Bool);
        assert_eq!(
            t,
            Scr::lift_at(ty).to(Scr::bool_const(true).quoted().quoted())
        );
    }

    #[test]
    fn lift_annotation_must_match_system() {
        let err = parse_term::<ScrType>("lift").unwrap_err();
        assert!(err.note.unwrap().contains("needs a type annotation"));
        let err = parse_term::<CrType>("lift[term]").unwrap_err();
        assert!(err.note.unwrap().contains("no type annotation"));
    }

    #[test]
    fn bare_term_rejected_in_scr_and_indexed_term_rejected_in_cr() {
        assert!(parse_term::<ScrType>("I[term]").is_err());
        assert!(parse_term::<CrType>("I[term[bool]]").is_err());
    }

    #[test]
    fn errors_carry_span_and_expectations() {
        let err = parse_term::<CrType>("I[bool").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(6, 6));
        assert!(err.expected.contains("`]`"));
        assert!(err.expected.contains("`->`") || err.found == "end of input");
        let err = parse_term::<CrType>("I[bool] )").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(8, 9));
        assert!(parse_term::<CrType>("").is_err());
        assert!(parse_term::<CrType>("<<true").is_err());
        assert!(parse_term::<CrType>("X").is_err());
    }

    #[test]
    fn spans_cover_each_node() {
        let parsed = parse_term_spanned::<CrType>("I[bool] (not true)").unwrap();
        assert_eq!(parsed.spans.span, SourceSpan::new(0, 17));
        assert_eq!(
            parsed.spans.lookup(&Path(vec![Dir::Fun])),
            SourceSpan::new(0, 7)
        );
        assert_eq!(
            parsed.spans.lookup(&Path(vec![Dir::Arg])),
            SourceSpan::new(9, 17)
        );
        assert_eq!(
            parsed.spans.lookup(&Path(vec![Dir::Arg, Dir::Arg])),
            SourceSpan::new(13, 17)
        );
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_term::<CrType>("K[ bool ,unit ]true\n\tfalse").unwrap();
        let b = parse_term::<CrType>("K[bool,unit] true false").unwrap();
        assert_eq!(a, b);
    }
}
