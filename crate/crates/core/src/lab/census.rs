use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::{g_term, gamma_term, isfalse_term};
use crate::reduction::{classify, normalize, normalize_observed, Shape, Trace, Verdict};
use crate::syntax::{parse_term, CrType, ScrType, System, Term, TypeLang};
use crate::typing::type_of;

use super::enumerate::{enumerate_by_size, Buckets};
use super::join::{joinability_check, JoinWitness};

/// At most this many subject-reduction violations are kept in a report;
/// the count is always exact.
pub const KEPT_VIOLATIONS: usize = 50;
/// Stack for census worker threads; seeded runs build deep terms.
const WORKER_STACK_BYTES: usize = 64 << 20;
/// Terms up to this size are reduced by plain iteration of `step`.
const SMALL_TERM: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JoinConfig {
    /// Only terms up to this size are checked.
    pub max_size: usize,
    /// Steps allowed on each side of a peak.
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumConfig {
    pub system: System,
    pub max_term_size: usize,
    pub max_type_depth: usize,
    pub fuel: usize,
    /// Include `true`, `false` and `not` among the atoms.
    pub include_plumbing_constants: bool,
    /// Also run the diagonal terms (`g <<g>>` and `Γ` for `isfalse`), which
    /// are far larger than the size bound. CR only.
    pub seed_pathological: bool,
    pub joinability: Option<JoinConfig>,
    /// Check that printing and reparsing is the identity on every term up
    /// to this size; 0 turns the check off.
    pub roundtrip_max_size: usize,
}

impl EnumConfig {
    pub fn new(system: System) -> Self {
        EnumConfig {
            system,
            max_term_size: 8,
            max_type_depth: 2,
            fuel: 10_000,
            include_plumbing_constants: true,
            seed_pathological: true,
            joinability: Some(JoinConfig {
                max_size: 6,
                depth: 8,
            }),
            roundtrip_max_size: 6,
        }
    }
}

/// Outcome counts for the enumerated terms of one size. The four verdict
/// columns partition `terms`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SizeRow {
    pub size: usize,
    pub terms: u64,
    /// Reached a normal form with no blocked redex.
    pub normalized: u64,
    /// Reached a term whose only redexes fail their typing side condition.
    pub stuck: u64,
    pub cycles: u64,
    pub fuel_exhausted: u64,
    pub total_steps: u64,
    pub max_steps: u64,
}

impl SizeRow {
    fn merge(&mut self, o: &SizeRow) {
        self.terms += o.terms;
        self.normalized += o.normalized;
        self.stuck += o.stuck;
        self.cycles += o.cycles;
        self.fuel_exhausted += o.fuel_exhausted;
        self.total_steps += o.total_steps;
        self.max_steps = self.max_steps.max(o.max_steps);
    }
}

/// A reduct whose type differs from the type of the term it came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub term: String,
    pub ty: String,
    pub step: usize,
    pub state: String,
    /// `None` when the reduct is ill-typed.
    pub state_ty: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedRow {
    pub name: String,
    pub size: usize,
    pub verdict: String,
    pub steps: usize,
    pub final_size: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct JoinSummary {
    pub max_size: usize,
    pub depth: usize,
    /// Terms with at least two distinct one-step reducts.
    pub terms_with_peaks: u64,
    pub peaks: u64,
    pub joined: u64,
    pub inconclusive: u64,
    pub witnesses: Vec<JoinWitness>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RoundtripSummary {
    pub max_size: usize,
    pub checked: u64,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub enumerate_ms: f64,
    pub census_ms: f64,
    pub seeds_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub config: EnumConfig,
    pub sizes: Vec<SizeRow>,
    pub seeds: Vec<SeedRow>,
    /// Reduct states whose type was compared against the original.
    pub states_checked: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub joinability: Option<JoinSummary>,
    pub roundtrip: Option<RoundtripSummary>,
    pub timings: Timings,
}

impl CensusReport {
    pub fn totals(&self) -> SizeRow {
        let mut total = SizeRow::default();
        for row in &self.sizes {
            total.merge(row);
        }
        total
    }

    /// Every enumerated term reached a normal form that is not stuck.
    pub fn all_normalized(&self) -> bool {
        let t = self.totals();
        t.normalized == t.terms
    }

    /// No violation of subject reduction, and no round-trip failure.
    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
            && self
                .roundtrip
                .as_ref()
                .is_none_or(|r| r.failures.is_empty())
    }

    /// The report with every timing zeroed, for comparing runs.
    pub fn without_timings(&self) -> CensusReport {
        CensusReport {
            timings: Timings::default(),
            ..self.clone()
        }
    }
}

/// Per-worker accumulator, merged in a fixed order.
#[derive(Default)]
struct Tally {
    row: SizeRow,
    states_checked: u64,
    violation_count: u64,
    violations: Vec<Violation>,
    join: JoinSummary,
    roundtrip: RoundtripSummary,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.row.merge(&o.row);
        self.states_checked += o.states_checked;
        self.violation_count += o.violation_count;
        self.violations.extend(o.violations);
        self.violations.sort();
        self.violations.truncate(KEPT_VIOLATIONS);
        self.join.terms_with_peaks += o.join.terms_with_peaks;
        self.join.peaks += o.join.peaks;
        self.join.joined += o.join.joined;
        self.join.inconclusive += o.join.inconclusive;
        self.join.witnesses.extend(o.join.witnesses);
        self.roundtrip.checked += o.roundtrip.checked;
        self.roundtrip.failures.extend(o.roundtrip.failures);
        self
    }

    fn record_violation(&mut self, v: Violation) {
        self.violation_count += 1;
        if self.violations.len() < KEPT_VIOLATIONS {
            self.violations.push(v);
        }
    }

    /// Reduce one term and check every claim the census makes about it.
    fn visit<T: TypeLang>(&mut self, t: &Term<T>, ty: &T, config: &EnumConfig) {
        self.row.terms += 1;
        // Most enumerated terms are already normal; skip the trace for them.
        match classify(t) {
            Shape::Normal => self.row.normalized += 1,
            Shape::Stuck => self.row.stuck += 1,
            Shape::Reducible => {
                self.reduce(t, ty, config.fuel);
            }
        }
        if let Some(join) = &config.joinability {
            if t.size() <= join.max_size {
                let out = joinability_check(t, join.depth);
                if out.peaks > 0 {
                    self.join.terms_with_peaks += 1;
                }
                self.join.peaks += out.peaks as u64;
                self.join.joined += out.joined as u64;
                self.join.inconclusive += out.inconclusive as u64;
                self.join
                    .witnesses
                    .extend(out.unjoined.into_iter().map(|(l, r)| JoinWitness {
                        term: t.to_string(),
                        left: l.to_string(),
                        right: r.to_string(),
                    }));
            }
        }
        if t.size() <= config.roundtrip_max_size {
            self.roundtrip.checked += 1;
            let printed = t.to_string();
            if parse_term::<T>(&printed).ok().as_ref() != Some(t) {
                self.roundtrip.failures.push(printed);
            }
        }
    }

    fn reduce<T: TypeLang>(&mut self, t: &Term<T>, ty: &T, fuel: usize) -> Trace<T> {
        let mut found = Vec::new();
        let mut checked = 0;
        let mut check = |i: usize, state: &Term<T>| {
            checked += 1;
            let state_ty = type_of(state);
            if state_ty.as_ref() != Some(ty) {
                found.push(Violation {
                    term: t.to_string(),
                    ty: ty.to_string(),
                    step: i,
                    state: state.to_string(),
                    state_ty: state_ty.map(|s| s.to_string()),
                });
            }
        };
        // Small enumerated terms run a few steps; the seeds are long and deep.
        let trace = if t.size() <= SMALL_TERM {
            normalize_observed(t, fuel, &mut check)
        } else {
            let trace = normalize(t, fuel);
            trace
                .states()
                .enumerate()
                .skip(1)
                .for_each(|(i, s)| check(i, &s));
            trace
        };
        match trace.verdict() {
            Verdict::Normalized if trace.stuck().is_some() => self.row.stuck += 1,
            Verdict::Normalized => self.row.normalized += 1,
            Verdict::CycleDetected { .. } => self.row.cycles += 1,
            Verdict::FuelExhausted => self.row.fuel_exhausted += 1,
        }
        let steps = trace.steps_used() as u64;
        self.row.total_steps += steps;
        self.row.max_steps = self.row.max_steps.max(steps);
        self.states_checked += checked;
        for v in found {
            self.record_violation(v);
        }
        trace
    }
}

/// A slice of the terms of one size: either stored terms, or the
/// applications of one stored function to a bucket of stored arguments,
/// possibly under some quotations.
enum Unit<'a, T> {
    Stored(&'a [Term<T>], T),
    Apply(&'a Term<T>, &'a [Term<T>], T),
    AppOf(&'a [Term<T>], T),
    Quoted(Box<Unit<'a, T>>),
}

impl<'a, T: TypeLang> Unit<'a, T> {
    fn ty(&self) -> T {
        match self {
            Unit::Stored(_, ty) | Unit::Apply(_, _, ty) | Unit::AppOf(_, ty) => ty.clone(),
            Unit::Quoted(inner) => T::quotation_of(&inner.ty()),
        }
    }

    fn for_each(&self, f: &mut dyn FnMut(Term<T>)) {
        match self {
            Unit::Stored(terms, _) => terms.iter().for_each(|t| f(t.clone())),
            Unit::Apply(fun, args, _) => {
                for a in *args {
                    f(Term::apply((*fun).clone(), a.clone()));
                }
            }
            Unit::AppOf(args, _) => args.iter().for_each(|a| f(Term::app().to(a.clone()))),
            Unit::Quoted(inner) => inner.for_each(&mut |t| f(t.quoted())),
        }
    }
}

/// The terms of size up to `stored.len() - 1` are kept; larger sizes are
/// produced on demand from them.
struct Store<T> {
    stored: Vec<Buckets<T>>,
}

impl<T: TypeLang> Store<T> {
    fn max_stored(&self) -> usize {
        self.stored.len() - 1
    }

    fn units(&self, n: usize) -> Vec<Unit<'_, T>> {
        if n <= self.max_stored() {
            return self.stored[n]
                .iter()
                .map(|(ty, terms)| Unit::Stored(terms, ty.clone()))
                .collect();
        }
        let mut out = Vec::new();
        for fun_size in 1..n - 1 {
            let arg_size = n - 1 - fun_size;
            for (fun_ty, funs) in &self.stored[fun_size] {
                let Some((dom, cod)) = fun_ty.as_arrow() else {
                    continue;
                };
                let Some(args) = self.stored[arg_size].get(dom) else {
                    continue;
                };
                out.extend(funs.iter().map(|f| Unit::Apply(f, args, cod.clone())));
            }
        }
        if T::SYSTEM == System::Scr {
            for (arg_ty, args) in &self.stored[n - 2] {
                if let Some((a, b)) = arg_ty.quoted_content().and_then(T::as_arrow) {
                    let ty = T::arrow(T::quotation_of(a), T::quotation_of(b));
                    out.push(Unit::AppOf(args, ty));
                }
            }
        }
        out.extend(
            self.units(n - 1)
                .into_iter()
                .map(|u| Unit::Quoted(Box::new(u))),
        );
        out
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1000.0
}

/// Enumerate every well-typed term within the bounds of `config`, reduce
/// each one and tabulate the results.
///
/// Work is spread over a rayon pool; partial results are merged in a fixed
/// order, so the report is identical from run to run except for timings.
pub fn run_census(config: &EnumConfig) -> CensusReport {
    let pool = rayon::ThreadPoolBuilder::new()
        .stack_size(WORKER_STACK_BYTES)
        .build()
        .expect("census thread pool");
    pool.install(|| match config.system {
        System::Cr => census_in::<CrType>(config, seeds_cr()),
        System::Scr => census_in::<ScrType>(config, Vec::new()),
    })
}

fn seeds_cr() -> Vec<(String, Term<CrType>)> {
    let g = g_term();
    vec![
        ("g <<g>>".to_string(), g.to(g.quoted())),
        ("Γ(isfalse)".to_string(), gamma_term(&isfalse_term())),
    ]
}

fn census_in<T: TypeLang>(config: &EnumConfig, seeds: Vec<(String, Term<T>)>) -> CensusReport {
    let start = Instant::now();
    let n = config.max_term_size;
    let store = Store {
        stored: enumerate_by_size::<T>(
            n.saturating_sub(2).max(n.min(2)),
            config.max_type_depth,
            config.include_plumbing_constants,
        ),
    };
    let enumerate_ms = ms(start);

    let census_start = Instant::now();
    let mut total = Tally::default();
    let mut sizes = Vec::new();
    for size in 1..=n {
        let units = store.units(size);
        let tally = units
            .par_iter()
            .map(|u| {
                let ty = u.ty();
                let mut tally = Tally::default();
                u.for_each(&mut |t| tally.visit(&t, &ty, config));
                tally
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Tally::default(), Tally::merge);
        let mut row = tally.row.clone();
        row.size = size;
        sizes.push(row);
        total = total.merge(tally);
    }
    let census_ms = ms(census_start);

    let seeds_start = Instant::now();
    let mut seed_rows = Vec::new();
    if config.seed_pathological {
        for (name, t) in seeds {
            let ty = type_of(&t).expect("seeded terms are well typed");
            let mut tally = Tally::default();
            let trace = tally.reduce(&t, &ty, config.fuel);
            seed_rows.push(SeedRow {
                name,
                size: t.size(),
                verdict: trace.verdict().to_string(),
                steps: trace.steps_used(),
                final_size: trace.last().size(),
            });
            total.states_checked += tally.states_checked;
            total.violation_count += tally.violation_count;
            total.violations.extend(tally.violations);
        }
    }
    let seeds_ms = ms(seeds_start);

    total.violations.sort();
    total.violations.truncate(KEPT_VIOLATIONS);
    total.join.witnesses.sort();
    total.roundtrip.failures.sort();
    let joinability = config.joinability.as_ref().map(|j| JoinSummary {
        max_size: j.max_size,
        depth: j.depth,
        ..total.join
    });
    let roundtrip = (config.roundtrip_max_size > 0).then_some(RoundtripSummary {
        max_size: config.roundtrip_max_size,
        ..total.roundtrip
    });
    CensusReport {
        config: config.clone(),
        sizes,
        seeds: seed_rows,
        states_checked: total.states_checked,
        violation_count: total.violation_count,
        violations: total.violations,
        joinability,
        roundtrip,
        timings: Timings {
            enumerate_ms,
            census_ms,
            seeds_ms,
            total_ms: ms(start),
        },
    }
}
