use std::collections::BTreeMap;

use crate::syntax::{System, Term, TermKind, TypeLang};
use crate::typing::{type_of, type_universe};

/// Well-typed terms of one size, bucketed by type.
pub type Buckets<T> = BTreeMap<T, Vec<Term<T>>>;

/// The constants of size one, with subscripts drawn from `universe`.
pub fn atoms<T: TypeLang>(universe: &[T], plumbing: bool) -> Vec<Term<T>> {
    let mut out = Vec::new();
    out.extend(universe.iter().map(|a| Term::i(a.clone())));
    for a in universe {
        for b in universe {
            out.push(Term::k(a.clone(), b.clone()));
        }
    }
    for a in universe {
        for b in universe {
            for c in universe {
                out.push(Term::s(a.clone(), b.clone(), c.clone()));
            }
        }
    }
    out.extend(universe.iter().map(|a| Term::value(a.clone())));
    match T::SYSTEM {
        System::Cr => {
            out.push(Term::lift());
            out.push(Term::app());
        }
        System::Scr => out.extend(universe.iter().map(|a| Term::lift_at(a.clone()))),
    }
    if plumbing {
        out.push(Term::bool_const(true));
        out.push(Term::bool_const(false));
        out.push(Term::not());
    }
    out
}

/// Every well-typed term of size `1..=max_size`, indexed by size (index 0
/// is empty). Within a size, terms are grouped by type in type order and
/// each group is in construction order, so the result is deterministic.
///
/// Sizes build on smaller sizes: `f a` is enumerated from the buckets of
/// `f` and `a` whose types fit, and `<<b>>` from every term `b`. In SCR the
/// bare `app` constant has no type, so `app a` is enumerated directly from
/// the terms `a : term[σ -> τ]`.
pub fn enumerate_by_size<T: TypeLang>(
    max_size: usize,
    max_type_depth: usize,
    plumbing: bool,
) -> Vec<Buckets<T>> {
    let universe: Vec<T> = type_universe(max_type_depth);
    let mut sizes: Vec<Buckets<T>> = vec![Buckets::new()];
    if max_size == 0 {
        return sizes;
    }
    let mut first = Buckets::new();
    for atom in atoms(&universe, plumbing) {
        if let Some(ty) = type_of(&atom) {
            first.entry(ty).or_insert_with(Vec::new).push(atom);
        }
    }
    sizes.push(first);
    for n in 2..=max_size {
        let mut layer: Buckets<T> = Buckets::new();
        for fun_size in 1..n - 1 {
            let arg_size = n - 1 - fun_size;
            for (fun_ty, funs) in &sizes[fun_size] {
                let Some((dom, cod)) = fun_ty.as_arrow() else {
                    continue;
                };
                let Some(args) = sizes[arg_size].get(dom) else {
                    continue;
                };
                let bucket = layer.entry(cod.clone()).or_default();
                for f in funs {
                    for a in args {
                        bucket.push(Term::apply(f.clone(), a.clone()));
                    }
                }
            }
        }
        if T::SYSTEM == System::Scr && n >= 3 {
            for (arg_ty, args) in &sizes[n - 2] {
                let Some(fun) = arg_ty.quoted_content().and_then(T::as_arrow) else {
                    continue;
                };
                let ty = T::arrow(T::quotation_of(fun.0), T::quotation_of(fun.1));
                let bucket = layer.entry(ty).or_default();
                bucket.extend(args.iter().map(|a| Term::app().to(a.clone())));
            }
        }
        for (body_ty, bodies) in &sizes[n - 1] {
            let bucket = layer.entry(T::quotation_of(body_ty)).or_default();
            bucket.extend(bodies.iter().map(|b| b.quoted()));
        }
        layer.retain(|_, terms| !terms.is_empty());
        sizes.push(layer);
    }
    sizes
}

/// Every well-typed term up to `max_size`, by size, then type, then
/// construction order, each paired with its type.
pub fn enumerate_terms<T: TypeLang>(
    max_size: usize,
    max_type_depth: usize,
    plumbing: bool,
) -> Vec<(Term<T>, T)> {
    enumerate_by_size::<T>(max_size, max_type_depth, plumbing)
        .into_iter()
        .flat_map(|buckets| {
            buckets
                .into_iter()
                .flat_map(|(ty, terms)| terms.into_iter().map(move |t| (t, ty.clone())))
        })
        .collect()
}

/// Every term, typed or not, of exactly `size` nodes over `atoms`.
/// Exponential; used to check [`enumerate_by_size`] at small bounds.
pub fn all_shapes<T: TypeLang>(atoms: &[Term<T>], size: usize) -> Vec<Term<T>> {
    let mut out = Vec::new();
    if size == 1 {
        out.extend(atoms.iter().cloned());
    }
    if size >= 3 {
        for fun_size in 1..size - 1 {
            let args = all_shapes(atoms, size - 1 - fun_size);
            for f in all_shapes(atoms, fun_size) {
                for a in &args {
                    out.push(Term::apply(f.clone(), a.clone()));
                }
            }
        }
    }
    if size >= 2 {
        out.extend(all_shapes(atoms, size - 1).into_iter().map(Term::quote));
    }
    out
}

/// Whether every subscript in `t` lies in `universe`.
pub fn subscripts_within<T: TypeLang>(t: &Term<T>, universe: &[T]) -> bool {
    let ok = |a: &T| universe.contains(a);
    match t.kind() {
        TermKind::I(a) | TermKind::Value(a) | TermKind::LiftAt(a) => ok(a),
        TermKind::K(a, b) => ok(a) && ok(b),
        TermKind::S(a, b, c) => ok(a) && ok(b) && ok(c),
        TermKind::Apply(f, a) => subscripts_within(f, universe) && subscripts_within(a, universe),
        TermKind::Quote(b) => subscripts_within(b, universe),
        TermKind::Lift | TermKind::App | TermKind::True | TermKind::False | TermKind::Not => true,
    }
}
