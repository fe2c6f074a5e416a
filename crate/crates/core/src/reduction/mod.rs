//! Small-step reduction.
//!
//! The one-step relation is the contraction rules for `I`, `K`, `S`,
//! `value`, `lift`, `app` and `not`, closed under congruence on both sides of
//! an application. Nothing is ever rewritten inside a quotation. The
//! reflective rules carry typing side conditions, checked with the ambient
//! system's own checker; a redex whose side condition fails is *stuck*.
//!
//! [`step`] follows the leftmost-outermost strategy. When the head of a
//! spine is `value`, `lift` or `app` and its arguments are not yet
//! quotations, the arguments are reduced, left to right.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::syntax::{Dir, Path, System, Term, TermKind, TypeLang};
use crate::typing::type_of;

mod machine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleName {
    RedI,
    RedK,
    RedS,
    RedValue,
    RedLift,
    RedApp,
    RedNot,
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleName::RedI => "I",
            RuleName::RedK => "K",
            RuleName::RedS => "S",
            RuleName::RedValue => "value",
            RuleName::RedLift => "lift",
            RuleName::RedApp => "app",
            RuleName::RedNot => "not",
        })
    }
}

/// A redex-shaped subterm whose typing side condition failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StuckReason {
    pub rule: RuleName,
    pub path: Path,
    pub detail: String,
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}: {}", self.rule, self.path, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult<T> {
    Stepped {
        next: Term<T>,
        rule: RuleName,
        position: Path,
    },
    NormalForm,
    Stuck(StuckReason),
}

/// One contraction at one position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Redex<T> {
    pub next: Term<T>,
    pub rule: RuleName,
    pub position: Path,
}

enum Contraction<T> {
    Fired {
        arity: usize,
        result: Term<T>,
        rule: RuleName,
    },
    /// The guard failed. The explanation is built by [`blocked_detail`]
    /// only when a stuck reason is actually reported.
    Blocked {
        arity: usize,
        rule: RuleName,
    },
    None,
}

fn describe_type<T: TypeLang>(t: &Term<T>) -> String {
    match type_of(t) {
        Some(ty) => ty.to_string(),
        None => "an ill-typed term".to_string(),
    }
}

/// Try the rule selected by `head` against the leading `args`.
fn contract<T: TypeLang>(head: &Term<T>, args: &[&Term<T>]) -> Contraction<T> {
    let n = args.len();
    match head.kind() {
        TermKind::I(_) if n >= 1 => Contraction::Fired {
            arity: 1,
            result: args[0].clone(),
            rule: RuleName::RedI,
        },
        TermKind::K(..) if n >= 2 => Contraction::Fired {
            arity: 2,
            result: args[0].clone(),
            rule: RuleName::RedK,
        },
        TermKind::S(..) if n >= 3 => {
            let (x, y, z) = (args[0], args[1], args[2]);
            Contraction::Fired {
                arity: 3,
                result: Term::apply(x.to(z.clone()), y.to(z.clone())),
                rule: RuleName::RedS,
            }
        }
        TermKind::Not if n >= 1 => match args[0].as_bool() {
            Some(b) => Contraction::Fired {
                arity: 1,
                result: Term::bool_const(!b),
                rule: RuleName::RedNot,
            },
            None => Contraction::None,
        },
        TermKind::Value(sigma) if n >= 1 => match args[0].as_quote() {
            Some(e) => match type_of(e) {
                Some(ty) if ty == *sigma => Contraction::Fired {
                    arity: 1,
                    result: e.clone(),
                    rule: RuleName::RedValue,
                },
                _ => Contraction::Blocked {
                    arity: 1,
                    rule: RuleName::RedValue,
                },
            },
            None => Contraction::None,
        },
        TermKind::Lift if n >= 1 && T::SYSTEM == System::Cr => match args[0].as_quote() {
            Some(_) => Contraction::Fired {
                arity: 1,
                result: args[0].quoted(),
                rule: RuleName::RedLift,
            },
            None => Contraction::None,
        },
        TermKind::LiftAt(sigma) if n >= 1 && T::SYSTEM == System::Scr => match args[0].as_quote() {
            Some(s) => match type_of(s) {
                Some(ty) if ty == *sigma => Contraction::Fired {
                    arity: 1,
                    result: args[0].quoted(),
                    rule: RuleName::RedLift,
                },
                _ => Contraction::Blocked {
                    arity: 1,
                    rule: RuleName::RedLift,
                },
            },
            None => Contraction::None,
        },
        TermKind::App if n >= 2 => match (args[0].as_quote(), args[1].as_quote()) {
            (Some(e1), Some(e2)) => {
                let joined = Term::apply(e1.clone(), e2.clone());
                if type_of(&joined).is_some() {
                    Contraction::Fired {
                        arity: 2,
                        result: joined.quoted(),
                        rule: RuleName::RedApp,
                    }
                } else {
                    Contraction::Blocked {
                        arity: 2,
                        rule: RuleName::RedApp,
                    }
                }
            }
            _ => Contraction::None,
        },
        _ => Contraction::None,
    }
}

/// Why the guard of a blocked redex failed.
fn blocked_detail<T: TypeLang>(head: &Term<T>, args: &[&Term<T>]) -> String {
    let body = |i: usize| {
        args[i]
            .as_quote()
            .expect("blocked redexes have quoted arguments")
    };
    match head.kind() {
        TermKind::Value(sigma) => {
            format!(
                "value[{sigma}] applied to a quotation of {}",
                describe_type(body(0))
            )
        }
        TermKind::LiftAt(sigma) => {
            format!(
                "lift[{sigma}] applied to a quotation of {}",
                describe_type(body(0))
            )
        }
        TermKind::App => format!(
            "the quoted application `{}` is ill-typed",
            Term::apply(body(0).clone(), body(1).clone())
        ),
        _ => unreachable!("only reflective redexes have guards"),
    }
}

/// How a term stands with respect to reduction, without building a reduct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Some redex fires.
    Reducible,
    /// No redex fires, but some redex has a failed guard.
    Stuck,
    Normal,
}

/// Classify `t` in one pass. Agrees with [`step`] but allocates no reduct
/// and no diagnostic.
pub fn classify<T: TypeLang>(t: &Term<T>) -> Shape {
    if !matches!(t.kind(), TermKind::Apply(..)) {
        return Shape::Normal;
    }
    let (head, args) = t.unspine();
    let mut shape = match contract(head, &args) {
        Contraction::Fired { .. } => return Shape::Reducible,
        Contraction::Blocked { .. } => Shape::Stuck,
        Contraction::None => Shape::Normal,
    };
    for a in args {
        match classify(a) {
            Shape::Reducible => return Shape::Reducible,
            Shape::Stuck => shape = Shape::Stuck,
            Shape::Normal => {}
        }
    }
    shape
}

/// Path from a spine of `n` arguments to the prefix node holding `k` of them.
fn prefix_path(base: &[Dir], n: usize, k: usize) -> Path {
    let mut p = base.to_vec();
    p.extend(std::iter::repeat_n(Dir::Fun, n - k));
    Path(p)
}

enum Local<T> {
    Stepped(Term<T>, RuleName, Path),
    Irreducible(Option<StuckReason>),
}

fn step_in<T: TypeLang>(t: &Term<T>, path: &mut Vec<Dir>) -> Local<T> {
    if !matches!(t.kind(), TermKind::Apply(..)) {
        return Local::Irreducible(None);
    }
    let (head, args) = t.unspine();
    let n = args.len();
    let mut stuck = None;
    match contract(head, &args) {
        Contraction::Fired {
            arity,
            result,
            rule,
        } => {
            let next = Term::spine(result, args[arity..].iter().map(|a| (*a).clone()));
            return Local::Stepped(next, rule, prefix_path(path, n, arity));
        }
        Contraction::Blocked { arity, rule } => {
            stuck = Some(StuckReason {
                rule,
                path: prefix_path(path, n, arity),
                detail: blocked_detail(head, &args),
            });
        }
        Contraction::None => {}
    }
    for i in 0..n {
        let depth = path.len();
        path.extend(std::iter::repeat_n(Dir::Fun, n - 1 - i));
        path.push(Dir::Arg);
        let local = step_in(args[i], path);
        path.truncate(depth);
        match local {
            Local::Stepped(new_arg, rule, pos) => {
                let rebuilt = args.iter().enumerate().map(|(j, a)| {
                    if j == i {
                        new_arg.clone()
                    } else {
                        (*a).clone()
                    }
                });
                return Local::Stepped(Term::spine(head.clone(), rebuilt), rule, pos);
            }
            Local::Irreducible(s) => {
                if stuck.is_none() {
                    stuck = s;
                }
            }
        }
    }
    Local::Irreducible(stuck)
}

/// Contract the leftmost-outermost redex.
pub fn step<T: TypeLang>(t: &Term<T>) -> StepResult<T> {
    match step_in(t, &mut Vec::new()) {
        Local::Stepped(next, rule, position) => StepResult::Stepped {
            next,
            rule,
            position,
        },
        Local::Irreducible(None) => StepResult::NormalForm,
        Local::Irreducible(Some(reason)) => StepResult::Stuck(reason),
    }
}

fn collect_redexes<T: TypeLang>(t: &Term<T>, path: &mut Vec<Dir>, out: &mut Vec<Redex<T>>) {
    let TermKind::Apply(fun, arg) = t.kind() else {
        return;
    };
    let (head, args) = t.unspine();
    if let Contraction::Fired {
        arity,
        result,
        rule,
    } = contract(head, &args)
    {
        if arity == args.len() {
            out.push(Redex {
                next: result,
                rule,
                position: Path(path.clone()),
            });
        }
    }
    path.push(Dir::Fun);
    let start = out.len();
    collect_redexes(fun, path, out);
    path.pop();
    for r in &mut out[start..] {
        r.next = Term::apply(r.next.clone(), arg.clone());
    }
    path.push(Dir::Arg);
    let start = out.len();
    collect_redexes(arg, path, out);
    path.pop();
    for r in &mut out[start..] {
        r.next = Term::apply(fun.clone(), r.next.clone());
    }
}

/// Every one-step contraction, in leftmost-outermost position order. The
/// `next` field of each entry is the whole rewritten term.
pub fn redexes<T: TypeLang>(t: &Term<T>) -> Vec<Redex<T>> {
    let mut out = Vec::new();
    collect_redexes(t, &mut Vec::new(), &mut out);
    out
}

/// The set of one-step reducts of `t`, without duplicates, in position order.
pub fn successors<T: TypeLang>(t: &Term<T>) -> Vec<Term<T>> {
    let mut seen = HashSet::new();
    redexes(t)
        .into_iter()
        .map(|r| r.next)
        .filter(|n| seen.insert(n.clone()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Reached a term with no redex (possibly a stuck one).
    Normalized,
    /// `states[entry] == states[entry + period]`.
    CycleDetected {
        entry: usize,
        period: usize,
    },
    FuelExhausted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Normalized => f.write_str("Normalized"),
            Verdict::CycleDetected { entry, period } => write!(f, "Cycle({entry},{period})"),
            Verdict::FuelExhausted => f.write_str("FuelExhausted"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: RuleName,
    pub position: Path,
}

/// A normal-order reduction history.
///
/// Only the first state and the rule fired at each step are stored; the
/// intermediate states and redex positions are regenerated on demand by
/// replaying [`step`], which is deterministic. This keeps long runs (where
/// every state can be thousands of nodes) in linear memory.
#[derive(Debug, Clone)]
pub struct Trace<T> {
    start: Term<T>,
    rules: Vec<RuleName>,
    last: Term<T>,
    verdict: Verdict,
    stuck: Option<StuckReason>,
}

impl<T: TypeLang> Trace<T> {
    pub fn start(&self) -> &Term<T> {
        &self.start
    }

    /// The final state reached.
    pub fn last(&self) -> &Term<T> {
        &self.last
    }

    /// The rule fired at each step.
    pub fn rules(&self) -> &[RuleName] {
        &self.rules
    }

    pub fn steps_used(&self) -> usize {
        self.rules.len()
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    /// Set when the run ended on a stuck redex rather than a normal form.
    pub fn stuck(&self) -> Option<&StuckReason> {
        self.stuck.as_ref()
    }

    /// Number of recorded states (`steps_used + 1`).
    pub fn len(&self) -> usize {
        self.rules.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every state with the step taken from it; the final state has none.
    pub fn replay(&self) -> impl Iterator<Item = (Term<T>, Option<TraceStep>)> + '_ {
        let mut cur = Some(self.start.clone());
        let mut remaining = self.rules.len() + 1;
        std::iter::from_fn(move || {
            if remaining == 0 {
                return None;
            }
            remaining -= 1;
            let this = cur.take()?;
            if remaining == 0 {
                return Some((this, None));
            }
            match step(&this) {
                StepResult::Stepped {
                    next,
                    rule,
                    position,
                } => {
                    cur = Some(next);
                    Some((this, Some(TraceStep { rule, position })))
                }
                _ => unreachable!("replay diverged from the recorded trace"),
            }
        })
    }

    /// Iterate over every state, `states[0]` being the input.
    pub fn states(&self) -> impl Iterator<Item = Term<T>> + '_ {
        let last = self.rules.len();
        self.replay().enumerate().map(
            move |(i, (state, _))| {
                if i == last {
                    self.last.clone()
                } else {
                    state
                }
            },
        )
    }

    pub fn state(&self, index: usize) -> Option<Term<T>> {
        if index == self.rules.len() {
            return Some(self.last.clone());
        }
        self.states().nth(index)
    }

    /// Line-oriented rendering: `n: <term>   [rule @ path]` per state, then
    /// the verdict. With `limit`, only the first `limit` states are shown.
    pub fn render(&self, limit: Option<usize>) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let shown = limit.unwrap_or(usize::MAX);
        for (i, (state, taken)) in self.replay().enumerate() {
            if i >= shown {
                let _ = writeln!(out, "... {} more states", self.len() - i);
                break;
            }
            match taken {
                Some(s) => {
                    let _ = writeln!(out, "{i}: {state}   [{} @ {}]", s.rule, s.position);
                }
                None => {
                    let _ = writeln!(out, "{i}: {state}");
                }
            }
        }
        if let Some(reason) = &self.stuck {
            let _ = writeln!(out, "stuck: {reason}");
        }
        let _ = write!(out, "verdict: {}", self.verdict);
        out
    }
}

/// Run the normal-order strategy for at most `fuel` steps, detecting
/// revisited states by structural equality.
pub fn normalize<T: TypeLang>(t: &Term<T>, fuel: usize) -> Trace<T> {
    let run = machine::run(t, fuel, |j, state| replay(t, j) == *state);
    let stuck = match (run.verdict, step(&run.last)) {
        (Verdict::Normalized, StepResult::Stuck(reason)) => Some(reason),
        _ => None,
    };
    Trace {
        start: t.clone(),
        rules: run.rules,
        last: run.last,
        verdict: run.verdict,
        stuck,
    }
}

/// The reference implementation of [`normalize`]: iterate [`step`] from the
/// root every time. Quadratic on deep terms, kept as a test oracle.
pub fn normalize_by_steps<T: TypeLang>(t: &Term<T>, fuel: usize) -> Trace<T> {
    normalize_observed(t, fuel, |_, _| {})
}

/// [`normalize_by_steps`], calling `observe(i, state)` on every state after
/// the first as it is reached. Cheaper than [`normalize`] followed by
/// [`Trace::states`] for short runs on small terms.
pub fn normalize_observed<T: TypeLang>(
    t: &Term<T>,
    fuel: usize,
    mut observe: impl FnMut(usize, &Term<T>),
) -> Trace<T> {
    let mut rules = Vec::new();
    let mut cur = t.clone();
    let mut seen: HashMap<Term<T>, usize> = HashMap::new();
    seen.insert(cur.clone(), 0);
    let mut stuck = None;
    let verdict = loop {
        match step(&cur) {
            StepResult::NormalForm => break Verdict::Normalized,
            StepResult::Stuck(reason) => {
                stuck = Some(reason);
                break Verdict::Normalized;
            }
            StepResult::Stepped { next, rule, .. } => {
                if rules.len() == fuel {
                    break Verdict::FuelExhausted;
                }
                rules.push(rule);
                cur = next;
                let index = rules.len();
                observe(index, &cur);
                if let Some(&entry) = seen.get(&cur) {
                    break Verdict::CycleDetected {
                        entry,
                        period: index - entry,
                    };
                }
                seen.insert(cur.clone(), index);
            }
        }
    };
    Trace {
        start: t.clone(),
        rules,
        last: cur,
        verdict,
        stuck,
    }
}

fn replay<T: TypeLang>(t: &Term<T>, n: usize) -> Term<T> {
    let mut cur = t.clone();
    for _ in 0..n {
        match step(&cur) {
            StepResult::Stepped { next, .. } => cur = next,
            _ => unreachable!("replay ran past a normal form"),
        }
    }
    cur
}

/// Upper bound on distinct states a reachability search may visit.
pub const REACH_STATE_LIMIT: usize = 250_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reach<T> {
    /// A shortest reduction sequence from the source to the target,
    /// both ends included.
    Reached(Vec<Term<T>>),
    /// The target was not found. `exhausted` is true when every term
    /// reachable within the step bound was examined.
    NotReached { visited: usize, exhausted: bool },
}

impl<T> Reach<T> {
    pub fn is_reached(&self) -> bool {
        matches!(self, Reach::Reached(_))
    }
}

/// Breadth-first search of the full one-step relation (every position, not
/// only the normal-order redex) for a sequence of at most `fuel` steps from
/// `t` to `target`.
pub fn reachable<T: TypeLang>(t: &Term<T>, target: &Term<T>, fuel: usize) -> Reach<T> {
    let mut parent: HashMap<Term<T>, Option<Term<T>>> = HashMap::new();
    parent.insert(t.clone(), None);
    let mut frontier = VecDeque::from([(t.clone(), 0usize)]);
    let mut truncated = false;
    while let Some((cur, depth)) = frontier.pop_front() {
        if cur == *target {
            let mut path = vec![cur.clone()];
            let mut at = cur;
            while let Some(Some(prev)) = parent.get(&at) {
                path.push(prev.clone());
                at = prev.clone();
            }
            path.reverse();
            return Reach::Reached(path);
        }
        if depth == fuel {
            if !successors(&cur).is_empty() {
                truncated = true;
            }
            continue;
        }
        for next in successors(&cur) {
            if parent.len() >= REACH_STATE_LIMIT {
                return Reach::NotReached {
                    visited: parent.len(),
                    exhausted: false,
                };
            }
            if !parent.contains_key(&next) {
                parent.insert(next.clone(), Some(cur.clone()));
                frontier.push_back((next, depth + 1));
            }
        }
    }
    Reach::NotReached {
        visited: parent.len(),
        exhausted: !truncated,
    }
}

/// `t ⇒* target` in at most `fuel` steps.
pub fn reduces_to<T: TypeLang>(t: &Term<T>, target: &Term<T>, fuel: usize) -> bool {
    reachable(t, target, fuel).is_reached()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, CrType, ScrType};

    type Cr = Term<CrType>;

    fn cr(src: &str) -> Cr {
        parse_term(src).unwrap()
    }

    fn scr(src: &str) -> Term<ScrType> {
        parse_term(src).unwrap()
    }

    fn stepped(t: &Cr) -> (Cr, RuleName, Path) {
        match step(t) {
            StepResult::Stepped {
                next,
                rule,
                position,
            } => (next, rule, position),
            other => panic!("expected a step, got {other:?}"),
        }
    }

    #[test]
    fn identity_contracts_at_root() {
        let (next, rule, pos) = stepped(&cr("I[bool] true"));
        assert_eq!(next, cr("true"));
        assert_eq!(rule, RuleName::RedI);
        assert!(pos.is_root());
    }

    #[test]
    fn k_and_s_rules() {
        assert_eq!(stepped(&cr("K[bool,unit] true I[unit]")).0, cr("true"));
        let (next, rule, _) = stepped(&cr("S[bool,bool,bool] K[bool,bool] not false"));
        assert_eq!(rule, RuleName::RedS);
        assert_eq!(next, cr("K[bool,bool] false (not false)"));
    }

    #[test]
    fn lift_requotes() {
        let (next, rule, _) = stepped(&cr("lift <<true>>"));
        assert_eq!(next, cr("<<<<true>>>>"));
        assert_eq!(rule, RuleName::RedLift);
    }

    #[test]
    fn value_guard_failure_is_stuck() {
        match step(&cr("value[bool] <<I[unit]>>")) {
            StepResult::Stuck(reason) => {
                assert_eq!(reason.rule, RuleName::RedValue);
                assert!(reason.path.is_root());
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(stepped(&cr("value[bool] <<not true>>")).0, cr("not true"));
    }

    #[test]
    fn app_requires_well_typed_application() {
        assert_eq!(stepped(&cr("app <<not>> <<true>>")).0, cr("<<not true>>"));
        assert!(matches!(
            step(&cr("app <<not>> <<I[unit]>>")),
            StepResult::Stuck(_)
        ));
    }

    #[test]
    fn nothing_reduces_under_quotation() {
        assert_eq!(step(&cr("<<I[bool] true>>")), StepResult::NormalForm);
        assert!(successors(&cr("<<I[bool] true>>")).is_empty());
    }

    #[test]
    fn reflective_heads_reduce_their_arguments_first() {
        let (next, rule, pos) = stepped(&cr("value[bool] (I[term] <<true>>)"));
        assert_eq!(next, cr("value[bool] <<true>>"));
        assert_eq!(rule, RuleName::RedI);
        assert_eq!(pos, Path(vec![Dir::Arg]));
        let (next, _, pos) = stepped(&cr("app <<not>> (I[term] <<true>>)"));
        assert_eq!(next, cr("app <<not>> <<true>>"));
        assert_eq!(pos, Path(vec![Dir::Arg]));
    }

    #[test]
    fn stuck_head_does_not_block_later_arguments() {
        let t = cr("value[bool -> bool] <<true>> (I[bool] true)");
        let (next, rule, _) = stepped(&t);
        assert_eq!(rule, RuleName::RedI);
        assert_eq!(next, cr("value[bool -> bool] <<true>> true"));
        assert!(matches!(step(&next), StepResult::Stuck(_)));
    }

    #[test]
    fn stuck_inside_an_argument_surfaces() {
        assert!(matches!(
            step(&cr("not (value[bool] <<I[unit]>>)")),
            StepResult::Stuck(_)
        ));
    }

    #[test]
    fn two_redex_successors() {
        let t = cr("K[bool,unit] (I[bool] true) I[unit]");
        let succ = successors(&t);
        assert_eq!(
            succ,
            vec![cr("I[bool] true"), cr("K[bool,unit] true I[unit]")]
        );
        let rs = redexes(&t);
        assert_eq!(rs[0].rule, RuleName::RedK);
        assert!(rs[0].position.is_root());
        assert_eq!(rs[1].rule, RuleName::RedI);
        assert_eq!(rs[1].position, Path(vec![Dir::Fun, Dir::Arg]));
    }

    #[test]
    fn app_successor() {
        let succ = successors(&cr("app <<not>> <<false>>"));
        assert!(succ.contains(&cr("<<not false>>")));
    }

    #[test]
    fn ski_behaves_as_identity() {
        let t = cr("S[bool,bool -> bool,bool] K[bool,bool -> bool] K[bool,bool] true");
        let trace = normalize(&t, 10);
        assert_eq!(trace.verdict(), Verdict::Normalized);
        assert_eq!(trace.last(), &cr("true"));
    }

    #[test]
    fn zero_fuel() {
        let t = cr("I[bool] true");
        let trace = normalize(&t, 0);
        assert_eq!(trace.verdict(), Verdict::FuelExhausted);
        assert_eq!(trace.states().collect::<Vec<_>>(), vec![t]);
        assert_eq!(normalize(&cr("true"), 0).verdict(), Verdict::Normalized);
    }

    #[test]
    fn states_replay_in_order() {
        let t = cr("not (not (I[bool] true))");
        let trace = normalize(&t, 100);
        let states: Vec<_> = trace.states().collect();
        assert_eq!(states.len(), trace.steps_used() + 1);
        assert_eq!(states[0], t);
        assert_eq!(states.last(), Some(trace.last()));
        assert_eq!(trace.last(), &cr("true"));
        assert_eq!(trace.state(1), Some(cr("not (not true)")));
    }

    fn assert_same_run<T: TypeLang>(t: &Term<T>, fuel: usize) {
        let fast = normalize(t, fuel);
        let slow = normalize_by_steps(t, fuel);
        assert_eq!(fast.verdict(), slow.verdict(), "{t}");
        assert_eq!(fast.rules(), slow.rules(), "{t}");
        assert_eq!(fast.last(), slow.last(), "{t}");
        assert_eq!(fast.stuck(), slow.stuck(), "{t}");
    }

    #[test]
    fn machine_agrees_with_iterated_step() {
        let g = "S[term,term,term] (K[term -> term,term] value[term]) \
                 (S[term,term,term] (K[term -> term,term] (S[term,term,term] app lift)) I[term])";
        let gg = cr(&format!("{g} <<{g}>>"));
        for fuel in [0, 1, 5, 9, 10, 11, 40] {
            assert_same_run(&gg, fuel);
        }
        for src in [
            "not (not (I[bool] true))",
            "I[bool] (not true)",
            "value[bool] (app <<I[bool]>> (lift <<true>>))",
            "K[bool,bool] (not (I[bool] true)) (not false)",
            "value[bool] <<I[unit]>>",
            "K[bool,bool] (value[bool] <<I[unit]>>) (I[bool] true)",
            "S[bool,bool -> bool,bool] K[bool,bool -> bool] K[bool,bool] true",
        ] {
            assert_same_run(&cr(src), 50);
        }
        assert_same_run(&scr("value[bool] (lift[bool] <<true>>)"), 50);
        assert_same_run(&scr("app <<I[bool]>> <<true>>"), 50);
    }

    #[test]
    fn classify_agrees_with_step() {
        let terms = crate::lab::enumerate_terms::<CrType>(5, 1, true);
        for (t, _) in &terms {
            let expected = match step(t) {
                StepResult::Stepped { .. } => Shape::Reducible,
                StepResult::Stuck(_) => Shape::Stuck,
                StepResult::NormalForm => Shape::Normal,
            };
            assert_eq!(classify(t), expected, "{t}");
        }
    }

    #[test]
    fn trace_rendering() {
        let trace = normalize(&cr("I[bool] (not true)"), 10);
        assert_eq!(
            trace.render(None),
            "0: I[bool] (not true)   [I @ root]\n1: not true   [not @ root]\n2: false\nverdict: Normalized"
        );
    }

    #[test]
    fn reduces_to_basic() {
        let e = cr("I[bool] true");
        assert!(reduces_to(&e, &e, 0));
        assert!(reduces_to(&e, &cr("true"), 1));
        assert!(!reduces_to(&cr("<<I[bool] true>>"), &cr("<<true>>"), 10));
        assert_eq!(
            reachable(&cr("<<I[bool] true>>"), &cr("<<true>>"), 10),
            Reach::NotReached {
                visited: 1,
                exhausted: true
            }
        );
    }

    #[test]
    fn reachability_finds_non_normal_order_targets() {
        // Normal order contracts K first and never visits the target.
        let t = cr("K[bool,unit] (I[bool] true) I[unit]");
        let target = cr("K[bool,unit] true I[unit]");
        assert!(!normalize(&t, 10).states().any(|s| s == target));
        assert!(reduces_to(&t, &target, 1));
    }

    #[test]
    fn scr_lift_guard() {
        let t = scr("lift[bool] <<true>>");
        match step(&t) {
            StepResult::Stepped { next, .. } => assert_eq!(next, scr("<<<<true>>>>")),
            other => panic!("{other:?}"),
        }
    }
}
