use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::reduction::successors;
use crate::syntax::{Term, TypeLang};

/// Per-side cap on the states a joinability search may visit.
pub const JOIN_STATE_LIMIT: usize = 20_000;

/// Outcome of checking the one-step peaks of a term for joinability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinOutcome<T> {
    /// Unordered pairs of distinct one-step reducts.
    pub peaks: usize,
    pub joined: usize,
    /// Peaks with no common reduct within the depth bound.
    pub unjoined: Vec<(Term<T>, Term<T>)>,
    /// Peaks left undecided because a search hit [`JOIN_STATE_LIMIT`].
    pub inconclusive: usize,
}

/// Everything reachable from `t` in at most `depth` steps. The flag is
/// false when the state cap cut the search short.
fn reach_set<T: TypeLang>(t: &Term<T>, depth: usize) -> (HashSet<Term<T>>, bool) {
    let mut seen = HashSet::from([t.clone()]);
    let mut frontier = VecDeque::from([(t.clone(), 0)]);
    while let Some((cur, d)) = frontier.pop_front() {
        if d == depth {
            continue;
        }
        for next in successors(&cur) {
            if seen.len() >= JOIN_STATE_LIMIT {
                return (seen, false);
            }
            if seen.insert(next.clone()) {
                frontier.push_back((next, d + 1));
            }
        }
    }
    (seen, true)
}

/// For every pair of distinct one-step reducts `u ⇐ t ⇒ v`, search for a
/// common reduct of `u` and `v` reachable from each within `depth` steps.
pub fn joinability_check<T: TypeLang>(t: &Term<T>, depth: usize) -> JoinOutcome<T> {
    let succ = successors(t);
    let mut outcome = JoinOutcome {
        peaks: 0,
        joined: 0,
        unjoined: Vec::new(),
        inconclusive: 0,
    };
    if succ.len() < 2 {
        return outcome;
    }
    let sets: Vec<_> = succ.iter().map(|s| reach_set(s, depth)).collect();
    for i in 0..succ.len() {
        for j in i + 1..succ.len() {
            outcome.peaks += 1;
            let ((a, a_full), (b, b_full)) = (&sets[i], &sets[j]);
            let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
            if small.iter().any(|x| large.contains(x)) {
                outcome.joined += 1;
            } else if *a_full && *b_full {
                outcome.unjoined.push((succ[i].clone(), succ[j].clone()));
            } else {
                outcome.inconclusive += 1;
            }
        }
    }
    outcome
}

/// A peak that did not join, printed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct JoinWitness {
    pub term: String,
    pub left: String,
    pub right: String,
}
