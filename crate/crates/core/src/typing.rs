//! The CR and SCR typing judgments.
//!
//! Terms carry all their type subscripts, so checking is syntax directed:
//! types are synthesized bottom-up and compared structurally, with no
//! unification. The two systems share every rule except those for the
//! reflective constants and quotation.

use std::fmt;

use crate::syntax::{CrType, Dir, Path, ScrType, SpanTree, System, Term, TermKind, TypeLang};

/// Why a term failed to type. Each kind names one failed premise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeErrorKind<T> {
    /// An argument's type differs from the function's domain.
    ArgumentMismatch { expected: T, actual: T },
    /// Something that is not a function was applied.
    NotAFunction(T),
    /// A constant that belongs to the other system (`lift` in SCR,
    /// `lift[σ]` in CR).
    WrongSystemConstant(&'static str),
    /// SCR `app` with no argument to fix its type.
    BareApp,
    /// SCR `app` applied to something other than a quoted function.
    NotAQuotedFunction(T),
}

/// A failed judgment, located at the innermost offending subterm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeError<T> {
    pub kind: TypeErrorKind<T>,
    pub path: Path,
}

impl<T: fmt::Display> fmt::Display for TypeErrorKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeErrorKind::ArgumentMismatch { expected, actual } => {
                write!(f, "expected {expected}, found {actual}")
            }
            TypeErrorKind::NotAFunction(actual) => {
                write!(f, "expected a function, found {actual}")
            }
            TypeErrorKind::WrongSystemConstant(what) => {
                write!(f, "`{what}` is not a constant of this system")
            }
            TypeErrorKind::BareApp => {
                f.write_str("`app` must be applied to a quoted function to fix its type")
            }
            TypeErrorKind::NotAQuotedFunction(actual) => {
                write!(f, "expected term[σ -> τ], found {actual}")
            }
        }
    }
}

impl<T: fmt::Display> fmt::Display for TypeError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.kind)
    }
}

impl<T> TypeError<T> {
    fn at(kind: TypeErrorKind<T>, path: &[Dir]) -> Self {
        TypeError {
            kind,
            path: Path(path.to_vec()),
        }
    }
}

impl<T: fmt::Display> TypeError<T> {
    /// Diagnostic with the source location of the offending subterm.
    pub fn render_with_spans(&self, spans: &SpanTree) -> String {
        format!("{} (at {})", self.kind, spans.lookup(&self.path))
    }
}

/// Outcome of type checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Judgment<T> {
    WellTyped(T),
    IllTyped(TypeError<T>),
}

impl<T> Judgment<T> {
    pub fn ty(&self) -> Option<&T> {
        match self {
            Judgment::WellTyped(t) => Some(t),
            Judgment::IllTyped(_) => None,
        }
    }

    pub fn is_well_typed(&self) -> bool {
        matches!(self, Judgment::WellTyped(_))
    }

    pub fn into_result(self) -> Result<T, TypeError<T>> {
        match self {
            Judgment::WellTyped(t) => Ok(t),
            Judgment::IllTyped(e) => Err(e),
        }
    }
}

impl<T> From<Result<T, TypeError<T>>> for Judgment<T> {
    fn from(r: Result<T, TypeError<T>>) -> Self {
        match r {
            Ok(t) => Judgment::WellTyped(t),
            Err(e) => Judgment::IllTyped(e),
        }
    }
}

/// Check a term under the rules of its own system.
pub fn typecheck<T: TypeLang>(t: &Term<T>) -> Judgment<T> {
    synth(t, &mut Vec::new()).into()
}

pub fn typecheck_cr(t: &Term<CrType>) -> Judgment<CrType> {
    typecheck(t)
}

pub fn typecheck_scr(t: &Term<ScrType>) -> Judgment<ScrType> {
    typecheck(t)
}

/// Convenience: the synthesized type, if any.
pub fn type_of<T: TypeLang>(t: &Term<T>) -> Option<T> {
    synth(t, &mut Vec::new()).ok()
}

/// Every type of depth at most `max_depth` in the system's type language.
pub fn type_universe<T: TypeLang>(max_depth: usize) -> Vec<T> {
    T::universe(max_depth)
}

fn synth<T: TypeLang>(t: &Term<T>, path: &mut Vec<Dir>) -> Result<T, TypeError<T>> {
    let arrow = T::arrow;
    let quoted = |ty: &T| T::quotation_of(ty);
    match t.kind() {
        TermKind::I(a) => Ok(arrow(a.clone(), a.clone())),
        TermKind::K(a, b) => Ok(T::arrows([a.clone(), b.clone(), a.clone()])),
        TermKind::S(a, b, c) => Ok(T::arrows([
            T::arrows([a.clone(), b.clone(), c.clone()]),
            arrow(a.clone(), b.clone()),
            a.clone(),
            c.clone(),
        ])),
        // CR: term -> σ.  SCR: term[σ] -> σ.
        TermKind::Value(a) => Ok(arrow(quoted(a), a.clone())),
        TermKind::Lift => match T::SYSTEM {
            System::Cr => {
                let term = quoted(&T::unit());
                Ok(arrow(term.clone(), term))
            }
            System::Scr => Err(TypeError::at(
                TypeErrorKind::WrongSystemConstant("lift"),
                path,
            )),
        },
        TermKind::LiftAt(a) => match T::SYSTEM {
            System::Scr => Ok(arrow(quoted(a), quoted(&quoted(a)))),
            System::Cr => Err(TypeError::at(
                TypeErrorKind::WrongSystemConstant("lift[σ]"),
                path,
            )),
        },
        TermKind::App => match T::SYSTEM {
            System::Cr => {
                let term = quoted(&T::unit());
                Ok(T::arrows([term.clone(), term.clone(), term]))
            }
            System::Scr => Err(TypeError::at(TypeErrorKind::BareApp, path)),
        },
        TermKind::True | TermKind::False => Ok(T::bool()),
        TermKind::Not => Ok(arrow(T::bool(), T::bool())),
        TermKind::Quote(body) => {
            path.push(Dir::Body);
            let inner = synth(body, path)?;
            path.pop();
            Ok(quoted(&inner))
        }
        TermKind::Apply(fun, arg) => {
            if T::SYSTEM == System::Scr && matches!(fun.kind(), TermKind::App) {
                return synth_scr_app(arg, path);
            }
            path.push(Dir::Fun);
            let fun_ty = synth(fun, path)?;
            path.pop();
            path.push(Dir::Arg);
            let arg_ty = synth(arg, path)?;
            let result = match fun_ty.as_arrow() {
                None => {
                    path.pop();
                    path.push(Dir::Fun);
                    Err(TypeError::at(
                        TypeErrorKind::NotAFunction(fun_ty.clone()),
                        path,
                    ))
                }
                Some((dom, _)) if *dom != arg_ty => Err(TypeError::at(
                    TypeErrorKind::ArgumentMismatch {
                        expected: dom.clone(),
                        actual: arg_ty,
                    },
                    path,
                )),
                Some((_, cod)) => Ok(cod.clone()),
            };
            path.pop();
            result
        }
    }
}

/// `app : term[σ -> τ] -> term[σ] -> term[τ]`, with σ and τ read off the
/// first argument.
fn synth_scr_app<T: TypeLang>(arg: &Term<T>, path: &mut Vec<Dir>) -> Result<T, TypeError<T>> {
    path.push(Dir::Arg);
    let arg_ty = synth(arg, path)?;
    let fun = arg_ty.quoted_content().and_then(T::as_arrow);
    let result = match fun {
        Some((dom, cod)) => Ok(T::arrow(T::quotation_of(dom), T::quotation_of(cod))),
        None => Err(TypeError::at(
            TypeErrorKind::NotAQuotedFunction(arg_ty.clone()),
            path,
        )),
    };
    path.pop();
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn cr(src: &str) -> Judgment<CrType> {
        typecheck_cr(&parse_term(src).unwrap())
    }

    fn scr(src: &str) -> Judgment<ScrType> {
        typecheck_scr(&parse_term(src).unwrap())
    }

    fn arr(d: CrType, c: CrType) -> CrType {
        CrType::arrow(d, c)
    }

    #[test]
    fn combinator_signatures() {
        use CrType::*;
        assert_eq!(cr("I[bool]"), Judgment::WellTyped(arr(Bool, Bool)));
        assert_eq!(
            cr("K[bool,unit]"),
            Judgment::WellTyped(CrType::arrows([Bool, Unit, Bool]))
        );
        let s = CrType::arrows([
            CrType::arrows([Bool, Unit, Term]),
            arr(Bool, Unit),
            Bool,
            Term,
        ]);
        assert_eq!(cr("S[bool,unit,term]"), Judgment::WellTyped(s));
        assert_eq!(cr("value[unit]"), Judgment::WellTyped(arr(Term, Unit)));
        assert_eq!(cr("lift"), Judgment::WellTyped(arr(Term, Term)));
        assert_eq!(
            cr("app"),
            Judgment::WellTyped(CrType::arrows([Term, Term, Term]))
        );
        assert_eq!(cr("not"), Judgment::WellTyped(arr(Bool, Bool)));
        assert!(!cr("<<I[bool] I[unit]>>").is_well_typed());
    }

    #[test]
    fn f_has_type_term_to_term() {
        assert_eq!(
            cr("S[term,term,term] app lift"),
            Judgment::WellTyped(arr(CrType::Term, CrType::Term))
        );
    }

    #[test]
    fn application_mismatch_is_reported_at_the_argument() {
        assert_eq!(cr("I[bool] true"), Judgment::WellTyped(CrType::Bool));
        let j = cr("I[bool] I[unit]");
        let Judgment::IllTyped(err) = j else {
            panic!("expected failure")
        };
        assert_eq!(
            err.kind,
            TypeErrorKind::ArgumentMismatch {
                expected: CrType::Bool,
                actual: arr(CrType::Unit, CrType::Unit)
            }
        );
        assert_eq!(err.to_string(), "arg: expected bool, found unit -> unit");
    }

    #[test]
    fn applying_a_non_function() {
        let Judgment::IllTyped(err) = cr("true false") else {
            panic!()
        };
        assert_eq!(err.kind, TypeErrorKind::NotAFunction(CrType::Bool));
        assert_eq!(err.path, Path(vec![Dir::Fun]));
    }

    #[test]
    fn innermost_failure_inside_quotation() {
        let Judgment::IllTyped(err) = cr("lift <<not I[unit]>>") else {
            panic!()
        };
        assert_eq!(err.path, Path(vec![Dir::Arg, Dir::Body, Dir::Arg]));
    }

    #[test]
    fn cr_value_does_not_check_quoted_type() {
        assert_eq!(
            cr("value[bool] <<I[unit]>>"),
            Judgment::WellTyped(CrType::Bool)
        );
    }

    #[test]
    fn scr_quotation_records_content_type() {
        let bb = ScrType::arrow(ScrType::Bool, ScrType::Bool);
        assert_eq!(
            scr("<<I[bool]>>"),
            Judgment::WellTyped(ScrType::term_of(bb))
        );
    }

    #[test]
    fn scr_value_requires_matching_content() {
        assert_eq!(
            scr("value[bool] <<true>>"),
            Judgment::WellTyped(ScrType::Bool)
        );
        let Judgment::IllTyped(err) = scr("value[bool] <<I[unit]>>") else {
            panic!()
        };
        assert!(matches!(err.kind, TypeErrorKind::ArgumentMismatch { .. }));
    }

    #[test]
    fn scr_lift_doubles_quotation() {
        let tb = ScrType::term_of(ScrType::Bool);
        assert_eq!(
            scr("lift[bool] <<true>>"),
            Judgment::WellTyped(ScrType::term_of(tb))
        );
    }

    #[test]
    fn scr_app_is_typed_from_its_arguments() {
        let tb = ScrType::term_of(ScrType::Bool);
        assert_eq!(scr("app <<not>> <<true>>"), Judgment::WellTyped(tb.clone()));
        assert_eq!(
            scr("app <<not>>"),
            Judgment::WellTyped(ScrType::arrow(tb.clone(), tb))
        );
        let Judgment::IllTyped(err) = scr("app") else {
            panic!()
        };
        assert_eq!(err.kind, TypeErrorKind::BareApp);
        let Judgment::IllTyped(err) = scr("app <<true>>") else {
            panic!()
        };
        assert!(matches!(err.kind, TypeErrorKind::NotAQuotedFunction(_)));
        let Judgment::IllTyped(err) = scr("app <<not>> <<I[unit]>>") else {
            panic!()
        };
        assert!(matches!(err.kind, TypeErrorKind::ArgumentMismatch { .. }));
        let Judgment::IllTyped(err) = scr("I[bool] app") else {
            panic!()
        };
        assert_eq!(err.kind, TypeErrorKind::BareApp);
    }

    #[test]
    fn constants_from_the_other_system_are_rejected() {
        let t: Term<ScrType> = Term::lift();
        let Judgment::IllTyped(err) = typecheck_scr(&t) else {
            panic!()
        };
        assert_eq!(err.kind, TypeErrorKind::WrongSystemConstant("lift"));
        let t: Term<CrType> = Term::lift_at(CrType::Term);
        assert!(!typecheck_cr(&t).is_well_typed());
    }

    // Independent oracle: every type tree over the grammar, filtered by depth.
    fn all_types_scr(depth: usize) -> Vec<ScrType> {
        if depth == 0 {
            return Vec::new();
        }
        let smaller = all_types_scr(depth - 1);
        let mut out = vec![ScrType::Bool, ScrType::Unit];
        for t in &smaller {
            out.push(ScrType::term_of(t.clone()));
        }
        for d in &smaller {
            for c in &smaller {
                out.push(ScrType::arrow(d.clone(), c.clone()));
            }
        }
        out
    }

    #[test]
    fn universe_matches_brute_force() {
        use std::collections::BTreeSet;
        for depth in 1..=3 {
            let got = type_universe::<ScrType>(depth);
            let set: BTreeSet<_> = got.iter().cloned().collect();
            assert_eq!(set.len(), got.len(), "duplicates at depth {depth}");
            let oracle: BTreeSet<_> = all_types_scr(depth).into_iter().collect();
            assert_eq!(set, oracle);
            assert!(got.windows(2).all(|w| w[0].depth() <= w[1].depth()));
        }
        assert_eq!(type_universe::<ScrType>(3).len(), 74);
        assert_eq!(type_universe::<CrType>(3).len(), 3 + 9 + (12 * 12 - 9));
    }

    #[test]
    fn universe_sizes() {
        use CrType::*;
        assert_eq!(type_universe::<CrType>(1), vec![Bool, Unit, Term]);
        assert_eq!(type_universe::<CrType>(2).len(), 12);
        let scr2 = type_universe::<ScrType>(2);
        let printed: Vec<String> = scr2.iter().map(|t| t.to_string()).collect();
        assert_eq!(
            printed,
            [
                "bool",
                "unit",
                "term[bool]",
                "term[unit]",
                "bool -> bool",
                "bool -> unit",
                "unit -> bool",
                "unit -> unit"
            ]
        );
    }
}
