use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use serde::Serialize;

/// Which of the two type disciplines a term instance lives under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    /// Combinatory ReFLect: every quotation has the single type `term`.
    Cr,
    /// Stratified Combinatory ReFLect: a quotation of `e : σ` has type `term[σ]`.
    Scr,
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            System::Cr => f.write_str("cr"),
            System::Scr => f.write_str("scr"),
        }
    }
}

/// Types of CR terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CrType {
    Bool,
    Unit,
    Term,
    Arrow(Arc<CrType>, Arc<CrType>),
}

/// Types of SCR terms. There is no bare `term`; quotations record the type
/// of their contents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScrType {
    Bool,
    Unit,
    TermOf(Arc<ScrType>),
    Arrow(Arc<ScrType>, Arc<ScrType>),
}

/// Structure shared by the two type languages.
///
/// A `Term<T>` is a CR term when `T = CrType` and an SCR term when
/// `T = ScrType`; everything generic over the system is written against this
/// trait.
pub trait TypeLang:
    Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const SYSTEM: System;

    fn bool() -> Self;
    fn unit() -> Self;
    fn arrow(domain: Self, codomain: Self) -> Self;
    fn as_arrow(&self) -> Option<(&Self, &Self)>;

    /// The type of a quotation whose body has type `body`.
    fn quotation_of(body: &Self) -> Self;

    /// For an indexed quotation type `term[σ]`, the content type `σ`. Always
    /// `None` in CR, where quotation types carry no index.
    fn quoted_content(&self) -> Option<&Self>;

    /// Tree depth; base types have depth 1.
    fn depth(&self) -> usize;

    /// Every type of depth at most `max_depth`, shallowest first, in a fixed
    /// order with no duplicates.
    fn universe(max_depth: usize) -> Vec<Self>;

    fn arrows(types: impl IntoIterator<Item = Self>) -> Self {
        let mut types: Vec<Self> = types.into_iter().collect();
        let mut ty = types.pop().expect("at least one type");
        while let Some(dom) = types.pop() {
            ty = Self::arrow(dom, ty);
        }
        ty
    }
}

impl CrType {
    pub fn arrow(domain: CrType, codomain: CrType) -> CrType {
        CrType::Arrow(Arc::new(domain), Arc::new(codomain))
    }

    /// `true` when the type mentions `term` anywhere.
    pub fn mentions_term(&self) -> bool {
        match self {
            CrType::Term => true,
            CrType::Bool | CrType::Unit => false,
            CrType::Arrow(d, c) => d.mentions_term() || c.mentions_term(),
        }
    }
}

impl ScrType {
    pub fn arrow(domain: ScrType, codomain: ScrType) -> ScrType {
        ScrType::Arrow(Arc::new(domain), Arc::new(codomain))
    }

    pub fn term_of(content: ScrType) -> ScrType {
        ScrType::TermOf(Arc::new(content))
    }

    pub fn as_term_of(&self) -> Option<&ScrType> {
        match self {
            ScrType::TermOf(inner) => Some(inner),
            _ => None,
        }
    }
}

impl TypeLang for CrType {
    const SYSTEM: System = System::Cr;

    fn bool() -> Self {
        CrType::Bool
    }

    fn unit() -> Self {
        CrType::Unit
    }

    fn arrow(domain: Self, codomain: Self) -> Self {
        CrType::arrow(domain, codomain)
    }

    fn as_arrow(&self) -> Option<(&Self, &Self)> {
        match self {
            CrType::Arrow(d, c) => Some((d, c)),
            _ => None,
        }
    }

    fn quotation_of(_body: &Self) -> Self {
        CrType::Term
    }

    fn quoted_content(&self) -> Option<&Self> {
        None
    }

    fn depth(&self) -> usize {
        match self {
            CrType::Bool | CrType::Unit | CrType::Term => 1,
            CrType::Arrow(d, c) => 1 + d.depth().max(c.depth()),
        }
    }

    fn universe(max_depth: usize) -> Vec<Self> {
        build_universe(
            max_depth,
            vec![CrType::Bool, CrType::Unit, CrType::Term],
            |_| None,
        )
    }
}

impl TypeLang for ScrType {
    const SYSTEM: System = System::Scr;

    fn bool() -> Self {
        ScrType::Bool
    }

    fn unit() -> Self {
        ScrType::Unit
    }

    fn arrow(domain: Self, codomain: Self) -> Self {
        ScrType::arrow(domain, codomain)
    }

    fn as_arrow(&self) -> Option<(&Self, &Self)> {
        match self {
            ScrType::Arrow(d, c) => Some((d, c)),
            _ => None,
        }
    }

    fn quotation_of(body: &Self) -> Self {
        ScrType::term_of(body.clone())
    }

    fn quoted_content(&self) -> Option<&Self> {
        self.as_term_of()
    }

    fn depth(&self) -> usize {
        match self {
            ScrType::Bool | ScrType::Unit => 1,
            ScrType::TermOf(inner) => 1 + inner.depth(),
            ScrType::Arrow(d, c) => 1 + d.depth().max(c.depth()),
        }
    }

    fn universe(max_depth: usize) -> Vec<Self> {
        build_universe(max_depth, vec![ScrType::Bool, ScrType::Unit], |t| {
            Some(ScrType::term_of(t.clone()))
        })
    }
}

/// Layered construction: layer `d` holds exactly the types of depth `d`,
/// built from the layers below it. Unary wrappers come before arrows.
fn build_universe<T: TypeLang>(
    max_depth: usize,
    base: Vec<T>,
    wrap: impl Fn(&T) -> Option<T>,
) -> Vec<T> {
    if max_depth == 0 {
        return Vec::new();
    }
    let mut all = base;
    let mut prev_len = 0;
    for _ in 2..=max_depth {
        let below = all.clone();
        let newest = prev_len..below.len();
        let mut layer = Vec::new();
        for t in &below[newest.clone()] {
            if let Some(w) = wrap(t) {
                layer.push(w);
            }
        }
        // An arrow lands in this layer iff at least one side is from the newest layer.
        for (i, d) in below.iter().enumerate() {
            for (j, c) in below.iter().enumerate() {
                if newest.contains(&i) || newest.contains(&j) {
                    layer.push(T::arrow(d.clone(), c.clone()));
                }
            }
        }
        prev_len = below.len();
        all.extend(layer);
    }
    all
}

fn write_arrow<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    domain: &T,
    domain_is_arrow: bool,
    codomain: &T,
) -> fmt::Result {
    if domain_is_arrow {
        write!(f, "({domain}) -> {codomain}")
    } else {
        write!(f, "{domain} -> {codomain}")
    }
}

impl fmt::Display for CrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrType::Bool => f.write_str("bool"),
            CrType::Unit => f.write_str("unit"),
            CrType::Term => f.write_str("term"),
            CrType::Arrow(d, c) => write_arrow(f, d, d.as_arrow().is_some(), c),
        }
    }
}

impl fmt::Display for ScrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScrType::Bool => f.write_str("bool"),
            ScrType::Unit => f.write_str("unit"),
            ScrType::TermOf(inner) => write!(f, "term[{inner}]"),
            ScrType::Arrow(d, c) => write_arrow(f, d, d.as_arrow().is_some(), c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrows_print_right_associated() {
        let t = CrType::arrows([CrType::Term, CrType::Term, CrType::Bool]);
        assert_eq!(t.to_string(), "term -> term -> bool");
        let t = CrType::arrow(CrType::arrow(CrType::Bool, CrType::Bool), CrType::Unit);
        assert_eq!(t.to_string(), "(bool -> bool) -> unit");
        let t = ScrType::term_of(ScrType::arrow(ScrType::Bool, ScrType::Unit));
        assert_eq!(t.to_string(), "term[bool -> unit]");
    }

    #[test]
    fn depth_counts_nesting() {
        assert_eq!(CrType::Term.depth(), 1);
        assert_eq!(CrType::arrow(CrType::Term, CrType::Bool).depth(), 2);
        assert_eq!(ScrType::term_of(ScrType::term_of(ScrType::Unit)).depth(), 3);
    }
}
