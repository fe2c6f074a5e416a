//! A zipper machine for long normal-order runs.
//!
//! Re-deriving every state from the root, as [`super::step`] does, costs time
//! proportional to the depth of the redex on every step. The diagonal
//! constructions push the redex under an ever-growing chain of `not`s, which
//! makes that quadratic. The machine keeps its place instead: after a
//! contraction, the only subterms that can hold the next leftmost-outermost
//! redex are the contractum, the spine immediately enclosing it, and
//! whatever lies to its right. Everything to the left was already found
//! irreducible, and no ancestor above the enclosing spine changes shape.
//!
//! States are recognised by a fingerprint built from the hashes of the
//! zipper frames and of the redex. The redex position is a function of the
//! term, so equal terms get equal fingerprints.

use std::collections::HashMap;

use crate::syntax::{Dir, Term, TermKind, TypeLang};

use super::{contract, Contraction, RuleName, Verdict};

struct Frame<T> {
    dir: Dir,
    /// The node this frame was entered from, reused on the way up when the
    /// child is unchanged.
    parent: Term<T>,
    /// Hash of the context down to and including this frame.
    context: u64,
}

struct Zipper<T> {
    frames: Vec<Frame<T>>,
    focus: Term<T>,
}

fn mix(a: u64, b: u64) -> u64 {
    // splitmix64 finaliser over a simple combination.
    let mut z = a.rotate_left(5) ^ b.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl<T: TypeLang> Zipper<T> {
    fn context(&self) -> u64 {
        self.frames.last().map_or(0, |f| f.context)
    }

    fn down(&mut self, dir: Dir) {
        let TermKind::Apply(fun, arg) = self.focus.kind() else {
            unreachable!("descending into a non-application")
        };
        let (child, sibling) = match dir {
            Dir::Fun => (fun.clone(), arg),
            _ => (arg.clone(), fun),
        };
        let tag = if dir == Dir::Fun { 1 } else { 2 };
        let context = mix(mix(self.context(), tag), sibling.fingerprint());
        let parent = std::mem::replace(&mut self.focus, child);
        self.frames.push(Frame {
            dir,
            parent,
            context,
        });
    }

    fn up(&mut self) -> Dir {
        let frame = self.frames.pop().expect("climbing above the root");
        let TermKind::Apply(fun, arg) = frame.parent.kind() else {
            unreachable!("frames always hold applications")
        };
        let focus = std::mem::replace(&mut self.focus, frame.parent.clone());
        match frame.dir {
            Dir::Fun if !Term::ptr_eq(fun, &focus) => self.focus = Term::apply(focus, arg.clone()),
            Dir::Arg if !Term::ptr_eq(arg, &focus) => self.focus = Term::apply(fun.clone(), focus),
            _ => {}
        }
        frame.dir
    }

    fn top_dir(&self) -> Option<Dir> {
        self.frames.last().map(|f| f.dir)
    }

    /// The whole term, without moving.
    fn materialize(&self) -> Term<T> {
        let mut t = self.focus.clone();
        for frame in self.frames.iter().rev() {
            let TermKind::Apply(fun, arg) = frame.parent.kind() else {
                unreachable!()
            };
            t = match frame.dir {
                Dir::Fun => Term::apply(t, arg.clone()),
                _ => Term::apply(fun.clone(), t),
            };
        }
        t
    }

    /// Move to the next spine to the right of the (irreducible) focus.
    /// Returns false at the end of the term.
    fn advance(&mut self) -> bool {
        loop {
            // The focus is a spine root: either the whole term or an argument.
            if self.frames.is_empty() {
                return false;
            }
            self.up();
            if self.top_dir() == Some(Dir::Fun) {
                self.up();
                self.down(Dir::Arg);
                return true;
            }
            // Otherwise the focus is now a finished spine root.
        }
    }

    /// After a contraction at the focus: climb to the spine root that
    /// contains it, give the enclosing spine's head a chance to fire, and
    /// otherwise leave the focus on the contractum's spine root.
    fn settle(&mut self) -> Option<()> {
        while self.top_dir() == Some(Dir::Fun) {
            self.up();
        }
        if self.top_dir() != Some(Dir::Arg) {
            return None;
        }
        // Climb to the enclosing spine root, remembering how far we went.
        self.up();
        let mut above = 0;
        while self.top_dir() == Some(Dir::Fun) {
            self.up();
            above += 1;
        }
        let fired = {
            let (head, args) = self.focus.unspine();
            match contract(head, &args) {
                Contraction::Fired { arity, .. } => Some(args.len() - arity),
                _ => None,
            }
        };
        if let Some(excess) = fired {
            for _ in 0..excess {
                self.down(Dir::Fun);
            }
            return Some(());
        }
        for _ in 0..above {
            self.down(Dir::Fun);
        }
        self.down(Dir::Arg);
        None
    }
}

/// Directions from `t` to the leftmost-outermost redex inside it.
fn find<T: TypeLang>(t: &Term<T>, out: &mut Vec<Dir>) -> bool {
    if !matches!(t.kind(), TermKind::Apply(..)) {
        return false;
    }
    let (head, args) = t.unspine();
    let n = args.len();
    if let Contraction::Fired { arity, .. } = contract(head, &args) {
        out.extend(std::iter::repeat_n(Dir::Fun, n - arity));
        return true;
    }
    for (i, arg) in args.iter().enumerate() {
        let mark = out.len();
        out.extend(std::iter::repeat_n(Dir::Fun, n - 1 - i));
        out.push(Dir::Arg);
        if find(arg, out) {
            return true;
        }
        out.truncate(mark);
    }
    false
}

pub(super) struct Run<T> {
    pub rules: Vec<RuleName>,
    pub last: Term<T>,
    pub verdict: Verdict,
}

/// Normal-order reduction of `t` for at most `fuel` steps. `confirm(j, s)`
/// must report whether state `j` equals `s`; it is consulted only on a
/// fingerprint match.
pub(super) fn run<T: TypeLang>(
    t: &Term<T>,
    fuel: usize,
    confirm: impl Fn(usize, &Term<T>) -> bool,
) -> Run<T> {
    let mut z = Zipper {
        frames: Vec::new(),
        focus: t.clone(),
    };
    let mut rules = Vec::new();
    let mut seen: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut at_redex = false;
    let mut path = Vec::new();
    let verdict = loop {
        if !at_redex {
            path.clear();
            if find(&z.focus, &mut path) {
                for &d in &path {
                    z.down(d);
                }
            } else if z.advance() {
                continue;
            } else {
                break Verdict::Normalized;
            }
        }
        // The focus is the redex of state `index`.
        let index = rules.len();
        let fingerprint = mix(z.context(), z.focus.fingerprint());
        let bucket = seen.entry(fingerprint).or_default();
        if !bucket.is_empty() {
            let here = z.materialize();
            if let Some(&entry) = bucket.iter().find(|&&j| confirm(j, &here)) {
                break Verdict::CycleDetected {
                    entry,
                    period: index - entry,
                };
            }
        }
        bucket.push(index);
        if index == fuel {
            break Verdict::FuelExhausted;
        }
        let (result, rule) = {
            let (head, args) = z.focus.unspine();
            let Contraction::Fired { result, rule, .. } = contract(head, &args) else {
                unreachable!("the focus was located as a redex")
            };
            (result, rule)
        };
        rules.push(rule);
        z.focus = result;
        at_redex = z.settle().is_some();
    };
    while !z.frames.is_empty() {
        z.up();
    }
    Run {
        rules,
        last: z.focus,
        verdict,
    }
}
