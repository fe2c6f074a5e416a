//! Acceptance suite: one PASS or FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance`. The process exits non-zero if
//! any criterion fails. The two full censuses dominate the running time.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use crefl::constructions::{
    build_f, build_g, build_liar, gamma_term, isfalse_term, verify_scr_blocks, CYCLE_FUEL,
    DIAGONAL_FUEL, LIAR_FUEL,
};
use crefl::lab::report::{render_jsonl, render_text};
use crefl::lab::{enumerate_terms, run_census, CensusReport, EnumConfig};
use crefl::reduction::{normalize, reduces_to, Verdict};
use crefl::typing::typecheck_cr;
use crefl::{with_deep_stack, CrType, System, Term};

type Outcome = Result<String, String>;

fn tb() -> CrType {
    CrType::arrow(CrType::Term, CrType::Bool)
}

fn tt() -> CrType {
    CrType::arrow(CrType::Term, CrType::Term)
}

fn nonterm() -> Outcome {
    let start = Instant::now();
    let f = build_f().map_err(|e| e.to_string())?;
    let g = build_g().map_err(|e| e.to_string())?;
    if typecheck_cr(&f.term).ty() != Some(&tt()) {
        return Err("f is not term -> term".into());
    }
    let gg = g.term.to(g.term.quoted());
    if typecheck_cr(&gg).ty() != Some(&CrType::Term) {
        return Err("g <<g>> is not of type term".into());
    }
    let trace = normalize(&gg, CYCLE_FUEL);
    let elapsed = start.elapsed();
    let Verdict::CycleDetected { entry, period } = trace.verdict() else {
        return Err(format!("verdict {}", trace.verdict()));
    };
    if trace.state(entry).as_ref() != Some(&gg) {
        return Err(format!("cycle entry {entry} is not g <<g>>"));
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    let mut out = Vec::new();
    let args = ["crefl", "demo", "nonterm"].map(String::from);
    let code = crefl::cli::run(args, &mut std::io::empty(), &mut out, &mut std::io::sink());
    if code != crefl::cli::EXIT_OK {
        return Err(format!("`crefl demo nonterm` exited {code}"));
    }
    Ok(format!(
        "Cycle(entry {entry}, period {period}) in {elapsed:.2?}; CLI demo exits 0"
    ))
}

fn diagonal() -> Outcome {
    let predicates: Vec<Term<CrType>> = enumerate_terms::<CrType>(5, 2, true)
        .into_iter()
        .filter(|(_, ty)| *ty == tb())
        .map(|(t, _)| t)
        .chain([isfalse_term()])
        .collect();
    let failed: Vec<String> = predicates
        .iter()
        .filter(|psi| {
            let gamma = gamma_term(psi);
            !reduces_to(&gamma, &psi.to(gamma.quoted()), DIAGONAL_FUEL)
        })
        .map(|psi| psi.to_string())
        .collect();
    if let Some(first) = failed.first() {
        return Err(format!("{} predicates fail, e.g. {first}", failed.len()));
    }
    Ok(format!(
        "Γ(Ψ) ⇒* Ψ <<Γ(Ψ)>> for isfalse and {} enumerated predicates",
        predicates.len() - 1
    ))
}

fn liar() -> Outcome {
    let c = build_liar(LIAR_FUEL).map_err(|e| e.to_string())?;
    let trace = normalize(&c.term, LIAR_FUEL);
    if trace.verdict() == Verdict::Normalized && trace.last().as_bool().is_some() {
        return Err(format!("Γ normalized to {}", trace.last()));
    }
    Ok(format!(
        "Γ ⇒* isfalse <<Γ>>; {} after {} steps, final size {}",
        trace.verdict(),
        trace.steps_used(),
        trace.last().size()
    ))
}

fn scr_blocking() -> Outcome {
    let start = Instant::now();
    let report = verify_scr_blocks(3);
    let elapsed = start.elapsed();
    for name in ["f", "g <<g>>", "β <<β>>"] {
        let row = report.row(name).ok_or(format!("no row {name}"))?;
        if row.accepted != 0 {
            return Err(format!("{name} accepts {} assignments", row.accepted));
        }
    }
    let control = report.row("I true").ok_or("no control row")?;
    if control.accepted != 1 {
        return Err(format!("control accepts {}", control.accepted));
    }
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "0 typings for the diagonal skeletons, 1 for I true, in {elapsed:.1?}"
    ))
}

fn subject_reduction(cr: &CensusReport, scr: &CensusReport) -> Outcome {
    let mut parts = Vec::new();
    for r in [cr, scr] {
        if r.violation_count != 0 {
            return Err(format!(
                "{}: {} violations",
                r.config.system, r.violation_count
            ));
        }
        parts.push(format!(
            "{}: {} terms, {} states",
            r.config.system,
            r.totals().terms,
            r.states_checked
        ));
    }
    Ok(format!("0 violations ({})", parts.join("; ")))
}

fn scr_normalizes(scr: &CensusReport) -> Outcome {
    let t = scr.totals();
    if !scr.all_normalized() {
        return Err(format!(
            "{} of {} normalized ({} stuck, {} cycles, {} fuel-out)",
            t.normalized, t.terms, t.stuck, t.cycles, t.fuel_exhausted
        ));
    }
    Ok(format!(
        "{} of {} SCR terms normalized",
        t.normalized, t.terms
    ))
}

fn joinability(cr: &CensusReport) -> Outcome {
    let j = cr.joinability.as_ref().ok_or("joinability was not run")?;
    for w in &j.witnesses {
        println!("    witness: {}  =>  {}  |  {}", w.term, w.left, w.right);
    }
    Ok(format!(
        "{} peaks in {} terms: {} joined, {} inconclusive, {} witnesses",
        j.peaks,
        j.terms_with_peaks,
        j.joined,
        j.inconclusive,
        j.witnesses.len()
    ))
}

fn small_config(system: System, size: usize) -> EnumConfig {
    EnumConfig {
        max_term_size: size,
        ..EnumConfig::new(system)
    }
}

fn roundtrip_and_determinism(cr: &CensusReport, scr: &CensusReport) -> Outcome {
    let mut checked = 0;
    for r in [cr, scr] {
        let rt = r.roundtrip.as_ref().ok_or("round trip was not run")?;
        if let Some(f) = rt.failures.first() {
            return Err(format!("round trip fails on {f}"));
        }
        checked += rt.checked;
    }

    let config = small_config(System::Cr, 6);
    let a = run_census(&config);
    let b = run_census(&config);
    let scr_again = run_census(&scr.config);
    let same = |x: &CensusReport, y: &CensusReport| {
        x.without_timings() == y.without_timings()
            && render_text(x, false) == render_text(y, false)
            && render_jsonl(x, false) == render_jsonl(y, false)
    };
    if !same(&a, &b) {
        return Err("two CR size-6 censuses differ".into());
    }
    if !same(scr, &scr_again) {
        return Err("two SCR censuses differ".into());
    }
    Ok(format!(
        "{checked} terms round-trip; repeated censuses agree modulo timings"
    ))
}

fn main() -> ExitCode {
    with_deep_stack(|| {
        let mut failures = 0;
        let mut report = |n: usize, name: &str, outcome: Outcome| match outcome {
            Ok(detail) => println!("PASS {n} {name}: {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL {n} {name}: {why}");
            }
        };
        report(1, "demo nonterm", nonterm());
        report(2, "diagonal reaches Ψ <<Γ>>", diagonal());
        report(3, "liar has no boolean value", liar());
        report(4, "SCR blocks the diagonal", scr_blocking());

        let cr = run_census(&EnumConfig::new(System::Cr));
        let scr = run_census(&EnumConfig::new(System::Scr));
        report(5, "subject reduction", subject_reduction(&cr, &scr));
        report(6, "SCR terms normalize", scr_normalizes(&scr));
        report(7, "CR joinability", joinability(&cr));
        report(
            8,
            "round trip and determinism",
            roundtrip_and_determinism(&cr, &scr),
        );
        if failures == 0 {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        }
    })
}
