//! Exhaustive search for SCR annotations of the self-referential skeletons.
//!
//! A skeleton is a CR construction with its type subscripts erased. Each
//! subscript becomes a hole ranging over the SCR types of bounded depth. The
//! search counts the hole assignments that make the whole term well typed.
//!
//! Literal enumeration is hopeless (the β skeleton has 27 holes), so the
//! count is computed bottom-up: for each subterm, a map from the type it can
//! take to the number of assignments of its own holes giving that type.
//! Typing is syntax directed, so a node's type depends only on its
//! children's types. Distinct subterms have disjoint holes, except under
//! [`Skeleton::SelfApply`], where the quoted copy shares every hole with the
//! function and its type is therefore fixed by the function's type.
//!
//! Types are never computed by hand here. Each bucket keeps a witness term
//! and new types come from calling the checker on witnesses.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::syntax::{CrType, ScrType, Term, TermKind, TypeLang};
use crate::typing::{type_of, type_universe};

use super::{beta_term, g_term, isfalse_term, ConstructionError};

type Scr = Term<ScrType>;
type TypeCounts = BTreeMap<ScrType, (u128, Scr)>;
/// Atom typings keyed by the printed atom; atoms have no children, so the
/// result depends only on the universe.
type AtomCache = HashMap<String, TypeCounts>;

/// A term shape whose type subscripts are holes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Skeleton {
    I,
    K,
    S,
    Value,
    /// `lift[_]`; CR `lift` erases to this as well.
    Lift,
    App,
    True,
    False,
    Not,
    Apply(Box<Skeleton>, Box<Skeleton>),
    Quote(Box<Skeleton>),
    /// `x <<x>>`, with both copies of `x` annotated identically.
    SelfApply(Box<Skeleton>),
}

impl Skeleton {
    /// Erase the subscripts of a CR term.
    pub fn erase(t: &Term<CrType>) -> Skeleton {
        match t.kind() {
            TermKind::I(_) => Skeleton::I,
            TermKind::K(..) => Skeleton::K,
            TermKind::S(..) => Skeleton::S,
            TermKind::Value(_) => Skeleton::Value,
            TermKind::Lift | TermKind::LiftAt(_) => Skeleton::Lift,
            TermKind::App => Skeleton::App,
            TermKind::True => Skeleton::True,
            TermKind::False => Skeleton::False,
            TermKind::Not => Skeleton::Not,
            TermKind::Apply(f, a) => Skeleton::apply(Skeleton::erase(f), Skeleton::erase(a)),
            TermKind::Quote(b) => Skeleton::Quote(Box::new(Skeleton::erase(b))),
        }
    }

    pub fn apply(f: Skeleton, a: Skeleton) -> Skeleton {
        Skeleton::Apply(Box::new(f), Box::new(a))
    }

    pub fn self_apply(x: Skeleton) -> Skeleton {
        Skeleton::SelfApply(Box::new(x))
    }

    /// Number of independent holes.
    pub fn holes(&self) -> usize {
        match self {
            Skeleton::I | Skeleton::Value | Skeleton::Lift => 1,
            Skeleton::K => 2,
            Skeleton::S => 3,
            Skeleton::App | Skeleton::True | Skeleton::False | Skeleton::Not => 0,
            Skeleton::Apply(f, a) => f.holes() + a.holes(),
            Skeleton::Quote(x) | Skeleton::SelfApply(x) => x.holes(),
        }
    }

    /// Fill the holes left to right from `types`.
    pub fn instantiate(&self, types: &mut impl Iterator<Item = ScrType>) -> Scr {
        let mut next = || types.next().expect("one type per hole");
        match self {
            Skeleton::I => Scr::i(next()),
            Skeleton::K => {
                let a = next();
                Scr::k(a, next())
            }
            Skeleton::S => {
                let a = next();
                let b = next();
                Scr::s(a, b, next())
            }
            Skeleton::Value => Scr::value(next()),
            Skeleton::Lift => Scr::lift_at(next()),
            Skeleton::App => Scr::app(),
            Skeleton::True => Scr::bool_const(true),
            Skeleton::False => Scr::bool_const(false),
            Skeleton::Not => Scr::not(),
            Skeleton::Apply(f, a) => {
                let f = f.instantiate(types);
                Scr::apply(f, a.instantiate(types))
            }
            Skeleton::Quote(x) => x.instantiate(types).quoted(),
            Skeleton::SelfApply(x) => {
                let x = x.instantiate(types);
                x.to(x.quoted())
            }
        }
    }

    /// For every type the skeleton can take, the number of hole assignments
    /// giving it and one witness.
    pub fn typings(&self, universe: &[ScrType]) -> TypeCounts {
        self.typings_cached(universe, &mut HashMap::new())
    }

    fn typings_cached(&self, universe: &[ScrType], atoms: &mut AtomCache) -> TypeCounts {
        let mut out = Typings::new();
        match self {
            Skeleton::Apply(f, a) if **f == Skeleton::App => {
                for (count, w) in a.typings_cached(universe, atoms).into_values() {
                    out.add_term(Scr::app().to(w), count);
                }
            }
            Skeleton::Apply(f, a) => {
                let fs = f.typings_cached(universe, atoms);
                let args = a.typings_cached(universe, atoms);
                for (ty, (fc, fw)) in &fs {
                    // Only an argument of the domain type can check, so look it up.
                    let Some((dom, _)) = ty.as_arrow() else {
                        continue;
                    };
                    if let Some((ac, aw)) = args.get(dom) {
                        out.add_term(Scr::apply(fw.clone(), aw.clone()), fc * ac);
                    }
                }
            }
            Skeleton::Quote(x) => {
                for (count, w) in x.typings_cached(universe, atoms).into_values() {
                    out.add_term(w.quoted(), count);
                }
            }
            Skeleton::SelfApply(x) => {
                for (count, w) in x.typings_cached(universe, atoms).into_values() {
                    out.add_term(w.to(w.quoted()), count);
                }
            }
            atom => {
                if let Some(known) = atoms.get(atom.to_string().as_str()) {
                    return known.clone();
                }
                let holes = atom.holes();
                let found: Vec<(ScrType, Scr)> = (0..universe.len().pow(holes as u32))
                    .into_par_iter()
                    .filter_map(|mut index| {
                        let mut picks = Vec::with_capacity(holes);
                        for _ in 0..holes {
                            picks.push(universe[index % universe.len()].clone());
                            index /= universe.len();
                        }
                        let t = atom.instantiate(&mut picks.into_iter());
                        type_of(&t).map(|ty| (ty, t))
                    })
                    .collect();
                for (ty, t) in found {
                    out.add(ty, t, 1);
                }
                atoms.insert(atom.to_string(), out.0.clone());
            }
        }
        out.0
    }
}

struct Typings(TypeCounts);

impl Typings {
    fn new() -> Self {
        Typings(BTreeMap::new())
    }

    fn add_term(&mut self, t: Scr, count: u128) {
        if let Some(ty) = type_of(&t) {
            self.add(ty, t, count);
        }
    }

    fn add(&mut self, ty: ScrType, t: Scr, count: u128) {
        self.0.entry(ty).or_insert((0, t)).0 += count;
    }
}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Skeleton::I => f.write_str("I[_]"),
            Skeleton::K => f.write_str("K[_,_]"),
            Skeleton::S => f.write_str("S[_,_,_]"),
            Skeleton::Value => f.write_str("value[_]"),
            Skeleton::Lift => f.write_str("lift[_]"),
            Skeleton::App => f.write_str("app"),
            Skeleton::True => f.write_str("true"),
            Skeleton::False => f.write_str("false"),
            Skeleton::Not => f.write_str("not"),
            Skeleton::Apply(fun, arg) => {
                write!(f, "{fun} ")?;
                write_arg(f, arg)
            }
            Skeleton::Quote(x) => write!(f, "<<{x}>>"),
            Skeleton::SelfApply(x) => {
                write_arg(f, x)?;
                write!(f, " <<{x}>>")
            }
        }
    }
}

fn write_arg(f: &mut fmt::Formatter<'_>, s: &Skeleton) -> fmt::Result {
    match s {
        Skeleton::Apply(..) | Skeleton::SelfApply(_) => write!(f, "({s})"),
        _ => write!(f, "{s}"),
    }
}

#[derive(Debug, Clone)]
pub struct SkeletonRow {
    pub name: &'static str,
    pub skeleton: Skeleton,
    pub holes: usize,
    /// `universe^holes`, when it fits in a `u128`.
    pub assignments: Option<u128>,
    pub accepted: u128,
    pub witness: Option<Scr>,
    /// Rows for the diagonal constructions must accept nothing; control
    /// rows are there to show the search does find typings.
    pub expect_blocked: bool,
}

#[derive(Debug, Clone)]
pub struct ScrBlockReport {
    pub depth: usize,
    pub universe_size: usize,
    pub rows: Vec<SkeletonRow>,
}

impl ScrBlockReport {
    /// Total accepted assignments across the rows that should be blocked.
    pub fn banned_accepted(&self) -> u128 {
        self.rows
            .iter()
            .filter(|r| r.expect_blocked)
            .map(|r| r.accepted)
            .sum()
    }

    pub fn row(&self, name: &str) -> Option<&SkeletonRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn into_result(self) -> Result<Self, ConstructionError> {
        if self.banned_accepted() == 0 {
            Ok(self)
        } else {
            Err(ConstructionError::ScrAccepted(Box::new(self)))
        }
    }
}

impl fmt::Display for ScrBlockReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "SCR annotation search, type depth <= {} ({} types per hole)",
            self.depth, self.universe_size
        )?;
        for r in &self.rows {
            let space = match r.assignments {
                Some(n) => n.to_string(),
                None => format!("{}^{}", self.universe_size, r.holes),
            };
            let role = if r.expect_blocked {
                "blocked"
            } else {
                "control"
            };
            writeln!(
                f,
                "  {:<14} {:<8} holes={:<3} assignments={:<20} accepted={}",
                r.name, role, r.holes, space, r.accepted
            )?;
            if let Some(w) = &r.witness {
                writeln!(
                    f,
                    "    e.g. {w} : {}",
                    type_of(w).expect("witness is well typed")
                )?;
            }
        }
        Ok(())
    }
}

/// The skeletons searched by [`verify_scr_blocks`], with whether each must
/// be blocked.
pub fn skeletons() -> Vec<(&'static str, Skeleton, bool)> {
    let f = Skeleton::erase(&super::f_term());
    let g = Skeleton::erase(&g_term());
    let beta = Skeleton::erase(&beta_term(&isfalse_term()));
    let id = Skeleton::I;
    vec![
        ("f", f, true),
        ("g <<g>>", Skeleton::self_apply(g), true),
        ("β <<β>>", Skeleton::self_apply(beta), true),
        ("I <<I>>", Skeleton::self_apply(id.clone()), true),
        ("I true", Skeleton::apply(id.clone(), Skeleton::True), false),
        (
            "I <<true>>",
            Skeleton::apply(id, Skeleton::Quote(Box::new(Skeleton::True))),
            false,
        ),
    ]
}

/// Count the SCR annotations, with every subscript drawn from the types of
/// depth at most `depth`, under which the diagonal skeletons type check.
pub fn verify_scr_blocks(depth: usize) -> ScrBlockReport {
    let universe: Vec<ScrType> = type_universe(depth);
    let mut atoms = AtomCache::new();
    let rows = skeletons()
        .into_iter()
        .map(|(name, skeleton, expect_blocked)| {
            let typings = skeleton.typings_cached(&universe, &mut atoms);
            let holes = skeleton.holes();
            SkeletonRow {
                name,
                holes,
                assignments: (universe.len() as u128).checked_pow(holes as u32),
                accepted: typings.values().map(|(c, _)| c).sum(),
                witness: typings.into_values().next().map(|(_, w)| w),
                skeleton,
                expect_blocked,
            }
        })
        .collect();
    ScrBlockReport {
        depth,
        universe_size: universe.len(),
        rows,
    }
}
