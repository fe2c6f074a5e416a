//! The self-referential CR terms and machine checks of their properties.
//!
//! * `f = S app lift` maps `<<e>>` to `<<e <<e>>>>`.
//! * `g = S (K value[term]) (S (K f) I)` makes `g <<g>>` reduce to itself.
//! * `β = S (K Ψ) (S (K f) I)` and `Γ = β <<β>>` give `Γ ⇒* Ψ <<Γ>>` for any
//!   predicate `Ψ : term -> bool`.
//! * `isfalse = S (K not) (S (K value[bool]) I)` is a falsity predicate;
//!   with `Ψ = isfalse`, `Γ` can have no boolean normal form.
//!
//! Every builder re-checks each claim it makes and refuses to return a
//! construction with an unverified claim.

mod stratified;

use std::fmt;

use thiserror::Error;

use crate::reduction::{normalize, reachable, Reach, Trace, Verdict};
use crate::syntax::{CrType, Term};
use crate::typing::{typecheck_cr, Judgment};

pub use stratified::{verify_scr_blocks, ScrBlockReport, Skeleton, SkeletonRow};

/// Fuel for the cycle of `g <<g>>`.
pub const CYCLE_FUEL: usize = 1000;
/// Step bound for the diagonal reachability checks.
pub const DIAGONAL_FUEL: usize = 500;
/// Fuel for showing that `Γ(isfalse)` never reaches a boolean.
pub const LIAR_FUEL: usize = 100_000;

type Cr = Term<CrType>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionName {
    F,
    G,
    Beta,
    Gamma,
    IsFalse,
}

impl fmt::Display for ConstructionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstructionName::F => "f",
            ConstructionName::G => "g",
            ConstructionName::Beta => "β",
            ConstructionName::Gamma => "Γ",
            ConstructionName::IsFalse => "isfalse",
        })
    }
}

#[derive(Debug, Clone)]
pub enum Witness {
    Judgment(Judgment<CrType>),
    Trace(Trace<CrType>),
    Reach(Reach<CrType>),
}

#[derive(Debug, Clone)]
pub struct Evidence {
    pub claim: String,
    pub verified: bool,
    pub witness: Witness,
}

#[derive(Debug, Clone)]
pub struct NamedConstruction {
    pub name: ConstructionName,
    /// The predicate for `β` and `Γ`.
    pub psi: Option<Cr>,
    pub term: Cr,
    pub claimed_type: CrType,
    pub evidence: Vec<Evidence>,
}

impl NamedConstruction {
    pub fn all_verified(&self) -> bool {
        self.evidence.iter().all(|e| e.verified)
    }

    fn new(name: ConstructionName, psi: Option<Cr>, term: Cr, claimed_type: CrType) -> Self {
        NamedConstruction {
            name,
            psi,
            term,
            claimed_type,
            evidence: Vec::new(),
        }
    }

    fn check_type(&mut self, label: &str, t: &Cr, expected: &CrType) {
        let judgment = typecheck_cr(t);
        self.evidence.push(Evidence {
            claim: format!("{label} : {expected}"),
            verified: judgment.ty() == Some(expected),
            witness: Witness::Judgment(judgment),
        });
    }

    fn check_reach(&mut self, from_label: &str, from: &Cr, to_label: &str, to: &Cr) {
        let reach = reachable(from, to, DIAGONAL_FUEL);
        self.evidence.push(Evidence {
            claim: format!("{from_label} ⇒* {to_label}"),
            verified: reach.is_reached(),
            witness: Witness::Reach(reach),
        });
    }

    fn push(&mut self, claim: String, verified: bool, witness: Witness) {
        self.evidence.push(Evidence {
            claim,
            verified,
            witness,
        });
    }

    fn finish(self) -> Result<Self, ConstructionError> {
        if self.all_verified() {
            Ok(self)
        } else {
            Err(ConstructionError::Unverified(Box::new(self)))
        }
    }
}

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("construction {} has unverified claims", .0.name)]
    Unverified(Box<NamedConstruction>),
    #[error("predicate `{psi}` must have type term -> bool")]
    NotAPredicate { psi: Cr, judgment: Judgment<CrType> },
    #[error("an SCR annotation assignment was accepted for a banned skeleton")]
    ScrAccepted(Box<ScrBlockReport>),
}

fn term_ty() -> CrType {
    CrType::Term
}

fn tt() -> CrType {
    CrType::arrow(CrType::Term, CrType::Term)
}

fn tb() -> CrType {
    CrType::arrow(CrType::Term, CrType::Bool)
}

/// `S[term,term,term] app lift`.
pub fn f_term() -> Cr {
    Term::spine(
        Cr::s(term_ty(), term_ty(), term_ty()),
        [Cr::app(), Cr::lift()],
    )
}

/// `S[term,term,term] (K[term->term,term] f) I[term]`, which maps `x` to `f x`.
fn f_after_identity() -> Cr {
    Term::spine(
        Cr::s(term_ty(), term_ty(), term_ty()),
        [Cr::k(tt(), term_ty()).to(f_term()), Cr::i(term_ty())],
    )
}

/// `S[term,term,term] (K[term->term,term] value[term]) (S (K f) I)`.
pub fn g_term() -> Cr {
    Term::spine(
        Cr::s(term_ty(), term_ty(), term_ty()),
        [
            Cr::k(tt(), term_ty()).to(Cr::value(term_ty())),
            f_after_identity(),
        ],
    )
}

/// `S[term,term,bool] (K[term->bool,term] Ψ) (S (K f) I)`.
pub fn beta_term(psi: &Cr) -> Cr {
    Term::spine(
        Cr::s(term_ty(), term_ty(), CrType::Bool),
        [Cr::k(tb(), term_ty()).to(psi.clone()), f_after_identity()],
    )
}

/// `β <<β>>`.
pub fn gamma_term(psi: &Cr) -> Cr {
    let beta = beta_term(psi);
    beta.to(beta.quoted())
}

/// `S[term,bool,bool] (K[bool->bool,term] not) (S[term,term,bool] (K[term->bool,term] value[bool]) I[term])`.
pub fn isfalse_term() -> Cr {
    let bb = CrType::arrow(CrType::Bool, CrType::Bool);
    let truth = Term::spine(
        Cr::s(term_ty(), term_ty(), CrType::Bool),
        [
            Cr::k(tb(), term_ty()).to(Cr::value(CrType::Bool)),
            Cr::i(term_ty()),
        ],
    );
    Term::spine(
        Cr::s(term_ty(), CrType::Bool, CrType::Bool),
        [Cr::k(bb, term_ty()).to(Cr::not()), truth],
    )
}

/// `K[bool,term] true`, the predicate that holds of every term.
pub fn constant_true_predicate() -> Cr {
    Cr::k(CrType::Bool, term_ty()).to(Cr::bool_const(true))
}

pub fn build_f() -> Result<NamedConstruction, ConstructionError> {
    let f = f_term();
    let mut c = NamedConstruction::new(ConstructionName::F, None, f.clone(), tt());
    c.check_type("f", &f, &tt());
    for e in [Cr::i(term_ty()), Cr::lift(), Cr::value(term_ty())] {
        let start = f.to(e.quoted());
        let target = e.to(e.quoted()).quoted();
        let trace = normalize(&start, 100);
        let ok = trace.verdict() == Verdict::Normalized && *trace.last() == target;
        c.push(format!("{start} ⇒* {target}"), ok, Witness::Trace(trace));
    }
    let e = Cr::i(term_ty());
    let start = f.to(e.quoted());
    let middle = Cr::app().to(e.quoted()).to(Cr::lift().to(e.quoted()));
    let trace = normalize(&start, 100);
    let ok = trace.states().any(|s| s == middle);
    c.push(
        format!("the reduction of {start} passes through {middle}"),
        ok,
        Witness::Trace(trace),
    );
    c.finish()
}

pub fn build_g() -> Result<NamedConstruction, ConstructionError> {
    let g = g_term();
    let gg = g.to(g.quoted());
    let mut c = NamedConstruction::new(ConstructionName::G, None, g.clone(), tt());
    c.check_type("g", &g, &tt());
    c.check_type("g <<g>>", &gg, &CrType::Term);
    let trace = normalize(&gg, CYCLE_FUEL);
    let ok = match trace.verdict() {
        Verdict::CycleDetected { entry, .. } => trace.state(entry).as_ref() == Some(&gg),
        _ => false,
    };
    c.push(
        format!("g <<g>> reduces back to itself within {CYCLE_FUEL} steps"),
        ok,
        Witness::Trace(trace),
    );
    c.finish()
}

fn require_predicate(psi: &Cr) -> Result<(), ConstructionError> {
    let judgment = typecheck_cr(psi);
    if judgment.ty() == Some(&tb()) {
        Ok(())
    } else {
        Err(ConstructionError::NotAPredicate {
            psi: psi.clone(),
            judgment,
        })
    }
}

pub fn build_beta(psi: &Cr) -> Result<NamedConstruction, ConstructionError> {
    require_predicate(psi)?;
    let beta = beta_term(psi);
    let f = f_term();
    let mut c = NamedConstruction::new(
        ConstructionName::Beta,
        Some(psi.clone()),
        beta.clone(),
        tb(),
    );
    c.check_type("β", &beta, &tb());
    let sample = Cr::i(CrType::Bool).quoted();
    c.check_reach(
        "β <<I[bool]>>",
        &beta.to(sample.clone()),
        "Ψ (f <<I[bool]>>)",
        &psi.to(f.to(sample)),
    );
    let bq = beta.quoted();
    c.check_reach(
        "β <<β>>",
        &beta.to(bq.clone()),
        "Ψ (f <<β>>)",
        &psi.to(f.to(bq.clone())),
    );
    c.check_reach(
        "Ψ (f <<β>>)",
        &psi.to(f.to(bq.clone())),
        "Ψ <<β <<β>>>>",
        &psi.to(beta.to(bq).quoted()),
    );
    c.finish()
}

pub fn build_gamma(psi: &Cr) -> Result<NamedConstruction, ConstructionError> {
    build_beta(psi)?;
    let gamma = gamma_term(psi);
    let mut c = NamedConstruction::new(
        ConstructionName::Gamma,
        Some(psi.clone()),
        gamma.clone(),
        CrType::Bool,
    );
    c.check_type("Γ", &gamma, &CrType::Bool);
    c.check_reach("Γ", &gamma, "Ψ <<Γ>>", &psi.to(gamma.quoted()));
    c.finish()
}

pub fn build_isfalse() -> Result<NamedConstruction, ConstructionError> {
    let isfalse = isfalse_term();
    let mut c = NamedConstruction::new(ConstructionName::IsFalse, None, isfalse.clone(), tb());
    c.check_type("isfalse", &isfalse, &tb());
    let samples = [
        Cr::bool_const(true),
        Cr::bool_const(false),
        Cr::not().to(Cr::bool_const(true)),
        Cr::i(CrType::Bool).to(Cr::bool_const(false)),
    ];
    for e in samples {
        let Some(value) = normalize(&e, 100).last().as_bool() else {
            unreachable!("boolean samples normalize to literals")
        };
        let trace = normalize(&isfalse.to(e.quoted()), 100);
        let ok = trace.verdict() == Verdict::Normalized && trace.last().as_bool() == Some(!value);
        c.push(
            format!("isfalse <<{e}>> ⇒* {}", !value),
            ok,
            Witness::Trace(trace),
        );
    }
    c.finish()
}

/// `Γ` for `Ψ = isfalse`: it reaches `isfalse <<Γ>>`, yet its normal-order
/// reduction never produces a boolean within `fuel` steps.
///
/// Long runs build deep terms; call this from [`crate::with_deep_stack`].
pub fn build_liar(fuel: usize) -> Result<NamedConstruction, ConstructionError> {
    let isfalse = isfalse_term();
    build_isfalse()?;
    let mut c = build_gamma(&isfalse).map_err(|e| match e {
        ConstructionError::Unverified(c) => ConstructionError::Unverified(c),
        other => other,
    })?;
    let trace = normalize(&c.term, fuel);
    let boolean = trace.verdict() == Verdict::Normalized && trace.last().as_bool().is_some();
    c.push(
        format!("Γ has no boolean normal form within {fuel} steps"),
        !boolean,
        Witness::Trace(trace),
    );
    c.finish()
}
