use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use smallvec::SmallVec;

use super::ty::TypeLang;

/// One constructor of the term grammar.
///
/// Combinators carry their type subscripts explicitly. `Lift` is the CR
/// form; `LiftAt` is the annotated SCR form. `True`, `False` and `Not` are
/// plumbing constants used to build the falsity predicate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum TermKind<T> {
    I(T),
    K(T, T),
    S(T, T, T),
    Value(T),
    Lift,
    LiftAt(T),
    App,
    Apply(Term<T>, Term<T>),
    Quote(Term<T>),
    True,
    False,
    Not,
}

struct Node<T> {
    kind: TermKind<T>,
    hash: u64,
    size: usize,
}

/// An immutable, cheaply cloneable term.
///
/// Equality is structural, type subscripts included; two quotations are equal
/// only when their bodies are the same syntax tree. The structural hash and
/// the node count are computed once at construction, so hashing a whole
/// program state is O(1).
pub struct Term<T>(Arc<Node<T>>);

/// The arguments of an application spine, left to right. Spines are short,
/// so they live on the stack.
pub type Spine<'a, T> = SmallVec<[&'a Term<T>; 6]>;

impl<T> Clone for Term<T> {
    fn clone(&self) -> Self {
        Term(Arc::clone(&self.0))
    }
}

impl<T: PartialEq> PartialEq for Term<T> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.0.size == other.0.size
                && self.0.kind == other.0.kind)
    }
}

impl<T: Eq> Eq for Term<T> {}

impl<T> Hash for Term<T> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl<T: TypeLang> Term<T> {
    pub fn new(kind: TermKind<T>) -> Self {
        let mut h = DefaultHasher::new();
        let size = match &kind {
            TermKind::Apply(f, a) => {
                0u8.hash(&mut h);
                h.write_u64(f.0.hash);
                h.write_u64(a.0.hash);
                1 + f.size() + a.size()
            }
            TermKind::Quote(b) => {
                1u8.hash(&mut h);
                h.write_u64(b.0.hash);
                1 + b.size()
            }
            atom => {
                2u8.hash(&mut h);
                atom.hash(&mut h);
                1
            }
        };
        Term(Arc::new(Node {
            kind,
            hash: h.finish(),
            size,
        }))
    }

    pub fn i(ty: T) -> Self {
        Self::new(TermKind::I(ty))
    }

    pub fn k(a: T, b: T) -> Self {
        Self::new(TermKind::K(a, b))
    }

    pub fn s(a: T, b: T, c: T) -> Self {
        Self::new(TermKind::S(a, b, c))
    }

    pub fn value(ty: T) -> Self {
        Self::new(TermKind::Value(ty))
    }

    pub fn lift() -> Self {
        Self::new(TermKind::Lift)
    }

    pub fn lift_at(ty: T) -> Self {
        Self::new(TermKind::LiftAt(ty))
    }

    pub fn app() -> Self {
        Self::new(TermKind::App)
    }

    pub fn apply(fun: Term<T>, arg: Term<T>) -> Self {
        Self::new(TermKind::Apply(fun, arg))
    }

    pub fn quote(body: Term<T>) -> Self {
        Self::new(TermKind::Quote(body))
    }

    pub fn bool_const(b: bool) -> Self {
        Self::new(if b { TermKind::True } else { TermKind::False })
    }

    pub fn not() -> Self {
        Self::new(TermKind::Not)
    }

    /// `head a1 a2 ... an`, associating to the left.
    pub fn spine(head: Term<T>, args: impl IntoIterator<Item = Term<T>>) -> Self {
        args.into_iter().fold(head, Term::apply)
    }

    /// Apply `self` to `arg`.
    pub fn to(&self, arg: Term<T>) -> Self {
        Term::apply(self.clone(), arg)
    }

    pub fn quoted(&self) -> Self {
        Term::quote(self.clone())
    }

    /// Split an application spine into its head and arguments, left to right.
    pub fn unspine(&self) -> (&Term<T>, Spine<'_, T>) {
        let mut args = Spine::new();
        let mut head = self;
        while let TermKind::Apply(f, a) = head.kind() {
            args.push(a);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    /// Map every type subscript, keeping the shape. Used to move reflection
    /// free terms between the two systems.
    pub fn map_types<U: TypeLang>(&self, f: &impl Fn(&T) -> Option<U>) -> Option<Term<U>> {
        Some(Term::new(match self.kind() {
            TermKind::I(a) => TermKind::I(f(a)?),
            TermKind::K(a, b) => TermKind::K(f(a)?, f(b)?),
            TermKind::S(a, b, c) => TermKind::S(f(a)?, f(b)?, f(c)?),
            TermKind::Value(a) => TermKind::Value(f(a)?),
            TermKind::LiftAt(a) => TermKind::LiftAt(f(a)?),
            TermKind::Lift => TermKind::Lift,
            TermKind::App => TermKind::App,
            TermKind::True => TermKind::True,
            TermKind::False => TermKind::False,
            TermKind::Not => TermKind::Not,
            TermKind::Apply(x, y) => TermKind::Apply(x.map_types(f)?, y.map_types(f)?),
            TermKind::Quote(b) => TermKind::Quote(b.map_types(f)?),
        }))
    }
}

impl<T> Term<T> {
    /// Whether both handles share one node.
    pub fn ptr_eq(a: &Term<T>, b: &Term<T>) -> bool {
        Arc::ptr_eq(&a.0, &b.0)
    }

    pub fn kind(&self) -> &TermKind<T> {
        &self.0.kind
    }

    /// Node count; a quotation counts as one plus its body.
    pub fn size(&self) -> usize {
        self.0.size
    }

    /// The cached structural hash.
    pub fn fingerprint(&self) -> u64 {
        self.0.hash
    }

    pub fn is_quote(&self) -> bool {
        matches!(self.kind(), TermKind::Quote(_))
    }

    pub fn as_quote(&self) -> Option<&Term<T>> {
        match self.kind() {
            TermKind::Quote(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.kind() {
            TermKind::True => Some(true),
            TermKind::False => Some(false),
            _ => None,
        }
    }

    /// `true` when the term uses none of `value`, `lift`, `app` or quotation.
    pub fn is_reflection_free(&self) -> bool {
        match self.kind() {
            TermKind::Value(_) | TermKind::Lift | TermKind::LiftAt(_) | TermKind::App => false,
            TermKind::Quote(_) => false,
            TermKind::Apply(f, a) => f.is_reflection_free() && a.is_reflection_free(),
            _ => true,
        }
    }
}

/// `term_equal`: structural identity including every type subscript.
pub fn term_equal<T: TypeLang>(a: &Term<T>, b: &Term<T>) -> bool {
    a == b
}

impl<T> Drop for Node<T> {
    // Long application chains would otherwise be dropped recursively.
    fn drop(&mut self) {
        let mut pending = Vec::new();
        take_children(&mut self.kind, &mut pending);
        while let Some(child) = pending.pop() {
            if let Ok(mut node) = Arc::try_unwrap(child.0) {
                take_children(&mut node.kind, &mut pending);
            }
        }
    }
}

fn take_children<T>(kind: &mut TermKind<T>, out: &mut Vec<Term<T>>) {
    match std::mem::replace(kind, TermKind::App) {
        TermKind::Apply(f, a) => {
            out.push(f);
            out.push(a);
        }
        TermKind::Quote(b) => out.push(b),
        other => *kind = other,
    }
}

impl<T: fmt::Debug> fmt::Debug for Term<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            TermKind::I(a) => write!(f, "I({a:?})"),
            TermKind::K(a, b) => write!(f, "K({a:?}, {b:?})"),
            TermKind::S(a, b, c) => write!(f, "S({a:?}, {b:?}, {c:?})"),
            TermKind::Value(a) => write!(f, "Value({a:?})"),
            TermKind::Lift => f.write_str("Lift"),
            TermKind::LiftAt(a) => write!(f, "LiftAt({a:?})"),
            TermKind::App => f.write_str("App"),
            TermKind::Apply(x, y) => write!(f, "Apply({x:?}, {y:?})"),
            TermKind::Quote(b) => write!(f, "Quote({b:?})"),
            TermKind::True => f.write_str("True"),
            TermKind::False => f.write_str("False"),
            TermKind::Not => f.write_str("Not"),
        }
    }
}

/// Canonical concrete syntax with minimal parentheses.
impl<T: fmt::Display> fmt::Display for Term<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            TermKind::I(a) => write!(f, "I[{a}]"),
            TermKind::K(a, b) => write!(f, "K[{a},{b}]"),
            TermKind::S(a, b, c) => write!(f, "S[{a},{b},{c}]"),
            TermKind::Value(a) => write!(f, "value[{a}]"),
            TermKind::Lift => f.write_str("lift"),
            TermKind::LiftAt(a) => write!(f, "lift[{a}]"),
            TermKind::App => f.write_str("app"),
            TermKind::Apply(x, y) => {
                if matches!(y.kind(), TermKind::Apply(..)) {
                    write!(f, "{x} ({y})")
                } else {
                    write!(f, "{x} {y}")
                }
            }
            TermKind::Quote(b) => write!(f, "<<{b}>>"),
            TermKind::True => f.write_str("true"),
            TermKind::False => f.write_str("false"),
            TermKind::Not => f.write_str("not"),
        }
    }
}

/// One step on the way from a term's root to a subterm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    /// Function side of an application.
    Fun,
    /// Argument side of an application.
    Arg,
    /// Body of a quotation.
    Body,
}

/// Address of a subterm; the empty path is the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<Dir>);

impl Path {
    pub fn root() -> Self {
        Path(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, dir: Dir) -> Path {
        let mut p = self.0.clone();
        p.push(dir);
        Path(p)
    }

    /// The subterm this path addresses, if it exists.
    pub fn resolve<'t, T>(&self, term: &'t Term<T>) -> Option<&'t Term<T>> {
        let mut cur = term;
        for dir in &self.0 {
            cur = match (dir, cur.kind()) {
                (Dir::Fun, TermKind::Apply(f, _)) => f,
                (Dir::Arg, TermKind::Apply(_, a)) => a,
                (Dir::Body, TermKind::Quote(b)) => b,
                _ => return None,
            };
        }
        Some(cur)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(match d {
                Dir::Fun => "fun",
                Dir::Arg => "arg",
                Dir::Body => "body",
            })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{CrType, ScrType};

    type Cr = Term<CrType>;

    fn ski_identity(e: Cr) -> Cr {
        let s = Cr::s(
            CrType::Bool,
            CrType::arrow(CrType::Bool, CrType::Bool),
            CrType::Bool,
        );
        let k1 = Cr::k(CrType::Bool, CrType::arrow(CrType::Bool, CrType::Bool));
        let k2 = Cr::k(CrType::Bool, CrType::Bool);
        Term::spine(s, [k1, k2, e])
    }

    #[test]
    fn equality_is_syntactic() {
        assert!(term_equal(&Cr::i(CrType::Bool), &Cr::i(CrType::Bool)));
        assert!(!term_equal(&Cr::i(CrType::Bool), &Cr::i(CrType::Unit)));
        let e = Cr::bool_const(true);
        let a = ski_identity(e.clone()).quoted();
        let b = Cr::i(CrType::Bool).to(e).quoted();
        assert!(!term_equal(&a, &b));
    }

    #[test]
    fn size_counts_nodes() {
        let t = Cr::i(CrType::Bool).to(Cr::bool_const(true));
        assert_eq!(t.size(), 3);
        assert_eq!(t.quoted().size(), 4);
    }

    #[test]
    fn printing_elides_left_parentheses() {
        let x = Cr::bool_const(true);
        let y = Cr::lift();
        let t = Term::spine(Cr::k(CrType::Bool, CrType::Unit), [x, y]);
        assert_eq!(t.to_string(), "K[bool,unit] true lift");
        let nested = Cr::i(CrType::Term).quoted().quoted();
        assert_eq!(nested.to_string(), "<<<<I[term]>>>>");
        let right = Cr::not().to(Cr::not().to(Cr::bool_const(false)));
        assert_eq!(right.to_string(), "not (not false)");
    }

    #[test]
    fn unspine_recovers_arguments() {
        let t = Term::spine(Cr::app(), [Cr::lift(), Cr::not()]);
        let (head, args) = t.unspine();
        assert_eq!(head, &Cr::app());
        assert_eq!(args.as_slice(), [&Cr::lift(), &Cr::not()]);
    }

    #[test]
    fn paths_resolve() {
        let t = Cr::i(CrType::Bool).to(Cr::bool_const(true)).quoted();
        let p = Path(vec![Dir::Body, Dir::Arg]);
        assert_eq!(p.resolve(&t), Some(&Cr::bool_const(true)));
        assert_eq!(p.to_string(), "body.arg");
        assert_eq!(Path(vec![Dir::Fun]).resolve(&t), None);
    }

    #[test]
    fn deep_terms_drop_without_recursion() {
        let mut t = Term::<ScrType>::bool_const(true);
        for _ in 0..200_000 {
            t = Term::not().to(t);
        }
        drop(t);
    }
}
