//! Property tests over random terms.
//!
//! Typed terms are drawn from the exhaustive enumeration and then combined
//! by one more application or quotation, which reaches sizes well past the
//! census bound while staying well typed.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;

use crefl::lab::{atoms, enumerate_terms};
use crefl::reduction::{
    classify, normalize, normalize_by_steps, reduces_to, step, successors, Shape, StepResult,
    Verdict,
};
use crefl::syntax::{parse_term, print_term};
use crefl::typing::{type_of, type_universe};
use crefl::{CrType, ScrType, System, Term, TermKind, TypeLang};

struct Pool<T> {
    terms: Vec<(Term<T>, T)>,
    by_type: BTreeMap<T, Vec<Term<T>>>,
}

impl<T: TypeLang> Pool<T> {
    fn new(max_size: usize, depth: usize) -> Self {
        let terms = enumerate_terms::<T>(max_size, depth, true);
        let mut by_type: BTreeMap<T, Vec<Term<T>>> = BTreeMap::new();
        for (t, ty) in &terms {
            by_type.entry(ty.clone()).or_default().push(t.clone());
        }
        Pool { terms, by_type }
    }

    /// Term `i` of the pool, applied to a fitting argument when it is a
    /// function (chosen by `j`), quoted when `j` is a multiple of 7.
    fn combine(&self, i: usize, j: usize) -> Term<T> {
        let (f, ty) = &self.terms[i % self.terms.len()];
        if j.is_multiple_of(7) {
            return f.quoted();
        }
        match ty.as_arrow().and_then(|(dom, _)| self.by_type.get(dom)) {
            Some(args) => f.to(args[j % args.len()].clone()),
            None => f.clone(),
        }
    }
}

fn cr_pool() -> &'static Pool<CrType> {
    static POOL: OnceLock<Pool<CrType>> = OnceLock::new();
    POOL.get_or_init(|| Pool::new(5, 2))
}

fn scr_pool() -> &'static Pool<ScrType> {
    static POOL: OnceLock<Pool<ScrType>> = OnceLock::new();
    POOL.get_or_init(|| Pool::new(6, 2))
}

fn cr_term() -> impl Strategy<Value = Term<CrType>> {
    (any::<usize>(), any::<usize>()).prop_map(|(i, j)| cr_pool().combine(i, j))
}

fn scr_term() -> impl Strategy<Value = Term<ScrType>> {
    (any::<usize>(), any::<usize>()).prop_map(|(i, j)| scr_pool().combine(i, j))
}

/// Arbitrary shapes over the atoms, mostly ill typed.
fn shape<T: TypeLang + 'static>() -> impl Strategy<Value = Term<T>> {
    let universe: Vec<T> = type_universe(2);
    let mut leaves = atoms(&universe, true);
    if T::SYSTEM == System::Scr {
        // Parseable, though never typable without an argument.
        leaves.push(Term::app());
    }
    let leaf = proptest::sample::select(leaves);
    leaf.prop_recursive(5, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::apply(f, a)),
            inner.prop_map(Term::quote),
        ]
    })
}

fn assert_agree<T: TypeLang>(t: &Term<T>, fuel: usize) {
    let fast = normalize(t, fuel);
    let slow = normalize_by_steps(t, fuel);
    assert_eq!(fast.verdict(), slow.verdict(), "{t}");
    assert_eq!(fast.rules(), slow.rules(), "{t}");
    assert_eq!(fast.last(), slow.last(), "{t}");
    assert_eq!(fast.stuck().is_some(), slow.stuck().is_some(), "{t}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_is_identity_cr(t in cr_term()) {
        let back: Term<CrType> = parse_term(&print_term(&t)).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn print_then_parse_is_identity_scr(t in scr_term()) {
        let back: Term<ScrType> = parse_term(&print_term(&t)).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn print_then_parse_is_identity_on_ill_typed_shapes(t in shape::<CrType>(), u in shape::<ScrType>()) {
        prop_assert_eq!(parse_term::<CrType>(&t.to_string()).unwrap(), t);
        prop_assert_eq!(parse_term::<ScrType>(&u.to_string()).unwrap(), u);
    }

    #[test]
    fn parser_never_panics(src in "[ a-zA-Z\\[\\]()<>,\\-]{0,40}") {
        let _ = parse_term::<CrType>(&src);
        let _ = parse_term::<ScrType>(&src);
    }

    #[test]
    fn every_one_step_reduct_keeps_its_type_cr(t in cr_term()) {
        let ty = type_of(&t).unwrap();
        for next in successors(&t) {
            prop_assert_eq!(type_of(&next), Some(ty.clone()), "{} ⇒ {}", t, next);
        }
    }

    #[test]
    fn every_one_step_reduct_keeps_its_type_scr(t in scr_term()) {
        let ty = type_of(&t).unwrap();
        for next in successors(&t) {
            prop_assert_eq!(type_of(&next), Some(ty.clone()), "{} ⇒ {}", t, next);
        }
    }

    #[test]
    fn normal_order_step_is_one_of_the_successors(t in cr_term()) {
        let all = successors(&t);
        match step(&t) {
            StepResult::Stepped { next, .. } => prop_assert!(all.contains(&next)),
            StepResult::NormalForm | StepResult::Stuck(_) => prop_assert!(all.is_empty()),
        }
    }

    #[test]
    fn classify_agrees_with_step(t in cr_term(), u in shape::<CrType>()) {
        for t in [t, u] {
            let expected = match step(&t) {
                StepResult::Stepped { .. } => Shape::Reducible,
                StepResult::Stuck(_) => Shape::Stuck,
                StepResult::NormalForm => Shape::Normal,
            };
            prop_assert_eq!(classify(&t), expected, "{}", t);
        }
    }

    #[test]
    fn machine_agrees_with_iterated_step(t in cr_term(), u in scr_term()) {
        assert_agree(&t, 300);
        assert_agree(&u, 300);
    }

    #[test]
    fn quotations_are_inert(t in shape::<CrType>()) {
        prop_assert!(successors(&t.quoted()).is_empty());
    }

    #[test]
    fn normal_forms_are_reachable(t in cr_term()) {
        let trace = normalize(&t, 40);
        if trace.verdict() == Verdict::Normalized && trace.steps_used() <= 8 {
            prop_assert!(reduces_to(&t, trace.last(), trace.steps_used()));
        }
    }

    #[test]
    fn replayed_states_all_have_the_start_type(t in cr_term()) {
        let ty = type_of(&t).unwrap();
        for state in normalize(&t, 200).states() {
            prop_assert_eq!(type_of(&state), Some(ty.clone()));
        }
    }

    #[test]
    fn scr_terms_normalize(t in scr_term()) {
        let trace = normalize(&t, 10_000);
        prop_assert_eq!(trace.verdict(), Verdict::Normalized, "{}", t);
        prop_assert!(trace.stuck().is_none(), "{}", t);
    }

    #[test]
    fn sizes_count_nodes(t in shape::<CrType>()) {
        fn count<T>(t: &Term<T>) -> usize {
            match t.kind() {
                TermKind::Apply(f, a) => 1 + count(f) + count(a),
                TermKind::Quote(b) => 1 + count(b),
                _ => 1,
            }
        }
        prop_assert_eq!(t.size(), count(&t));
    }
}
