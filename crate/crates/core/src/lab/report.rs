//! Census report formats.
//!
//! Both renderers can leave out timings, which are the only part of a
//! report that changes between runs of the same configuration.

use std::fmt::Write;

use serde::Serialize;

use super::census::{
    CensusReport, EnumConfig, JoinSummary, RoundtripSummary, SeedRow, SizeRow, Timings, Violation,
};
use super::join::JoinWitness;

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// An aligned plain-text table.
pub fn render_text(report: &CensusReport, with_timings: bool) -> String {
    let mut out = String::new();
    let c = &report.config;
    let _ = writeln!(
        out,
        "census system={} max-size={} type-depth={} fuel={} plumbing={}",
        c.system,
        c.max_term_size,
        c.max_type_depth,
        c.fuel,
        yes_no(c.include_plumbing_constants)
    );
    let _ = writeln!(
        out,
        "{:>4} {:>10} {:>10} {:>7} {:>7} {:>9} {:>11} {:>9}",
        "size", "terms", "normalized", "stuck", "cycles", "fuel-out", "steps", "max-steps"
    );
    let row = |out: &mut String, label: &str, r: &SizeRow| {
        let _ = writeln!(
            out,
            "{:>4} {:>10} {:>10} {:>7} {:>7} {:>9} {:>11} {:>9}",
            label,
            r.terms,
            r.normalized,
            r.stuck,
            r.cycles,
            r.fuel_exhausted,
            r.total_steps,
            r.max_steps
        );
    };
    for r in &report.sizes {
        row(&mut out, &r.size.to_string(), r);
    }
    row(&mut out, "all", &report.totals());
    if !report.seeds.is_empty() {
        let _ = writeln!(out, "seeded terms");
        for s in &report.seeds {
            let _ = writeln!(
                out,
                "  {:<12} size={:<4} verdict={:<14} steps={:<6} final-size={}",
                s.name, s.size, s.verdict, s.steps, s.final_size
            );
        }
    }
    let _ = writeln!(
        out,
        "subject reduction: {} violations over {} reduct states",
        report.violation_count, report.states_checked
    );
    for v in &report.violations {
        let _ = writeln!(
            out,
            "  {} : {} reaches at step {} {} : {}",
            v.term,
            v.ty,
            v.step,
            v.state,
            v.state_ty.as_deref().unwrap_or("ill-typed")
        );
    }
    if let Some(j) = &report.joinability {
        let _ = writeln!(
            out,
            "joinability (size <= {}, depth {}): {} terms with peaks, {} peaks, {} joined, {} inconclusive, {} witnesses",
            j.max_size,
            j.depth,
            j.terms_with_peaks,
            j.peaks,
            j.joined,
            j.inconclusive,
            j.witnesses.len()
        );
        for w in &j.witnesses {
            let _ = writeln!(out, "  {}  =>  {}  |  {}", w.term, w.left, w.right);
        }
    }
    if let Some(r) = &report.roundtrip {
        let _ = writeln!(
            out,
            "round trip (size <= {}): {} terms, {} failures",
            r.max_size,
            r.checked,
            r.failures.len()
        );
        for f in &r.failures {
            let _ = writeln!(out, "  {f}");
        }
    }
    if with_timings {
        let t = &report.timings;
        let _ = writeln!(
            out,
            "timings: enumerate={:.1}ms census={:.1}ms seeds={:.1}ms total={:.1}ms",
            t.enumerate_ms, t.census_ms, t.seeds_ms, t.total_ms
        );
    }
    out
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Record<'a> {
    Config(&'a EnumConfig),
    Size(&'a SizeRow),
    Seed(&'a SeedRow),
    SubjectReduction {
        states_checked: u64,
        violations: u64,
    },
    Violation(&'a Violation),
    Joinability {
        max_size: usize,
        depth: usize,
        terms_with_peaks: u64,
        peaks: u64,
        joined: u64,
        inconclusive: u64,
        witnesses: usize,
    },
    JoinWitness(&'a JoinWitness),
    Roundtrip {
        max_size: usize,
        checked: u64,
        failures: &'a [String],
    },
    Timings(&'a Timings),
}

/// One JSON object per line, each tagged with a `record` field.
pub fn render_jsonl(report: &CensusReport, with_timings: bool) -> String {
    let mut records = vec![Record::Config(&report.config)];
    records.extend(report.sizes.iter().map(Record::Size));
    records.extend(report.seeds.iter().map(Record::Seed));
    records.push(Record::SubjectReduction {
        states_checked: report.states_checked,
        violations: report.violation_count,
    });
    records.extend(report.violations.iter().map(Record::Violation));
    if let Some(JoinSummary {
        max_size,
        depth,
        terms_with_peaks,
        peaks,
        joined,
        inconclusive,
        witnesses,
    }) = &report.joinability
    {
        records.push(Record::Joinability {
            max_size: *max_size,
            depth: *depth,
            terms_with_peaks: *terms_with_peaks,
            peaks: *peaks,
            joined: *joined,
            inconclusive: *inconclusive,
            witnesses: witnesses.len(),
        });
        records.extend(witnesses.iter().map(Record::JoinWitness));
    }
    if let Some(RoundtripSummary {
        max_size,
        checked,
        failures,
    }) = &report.roundtrip
    {
        records.push(Record::Roundtrip {
            max_size: *max_size,
            checked: *checked,
            failures,
        });
    }
    if with_timings {
        records.push(Record::Timings(&report.timings));
    }
    let mut out = String::new();
    for r in &records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{run_census, JoinConfig};
    use crate::System;

    fn tiny() -> CensusReport {
        let config = EnumConfig {
            max_term_size: 3,
            max_type_depth: 1,
            fuel: 50,
            seed_pathological: false,
            joinability: Some(JoinConfig {
                max_size: 3,
                depth: 2,
            }),
            roundtrip_max_size: 3,
            ..EnumConfig::new(System::Cr)
        };
        run_census(&config)
    }

    #[test]
    fn every_jsonl_line_is_an_object() {
        let text = render_jsonl(&tiny(), true);
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v.get("record").is_some(), "{line}");
        }
        assert!(text.lines().last().unwrap().contains("\"timings\""));
        assert!(!render_jsonl(&tiny(), false).contains("timings"));
    }

    #[test]
    fn text_has_a_total_row() {
        let text = render_text(&tiny(), false);
        assert!(text.lines().any(|l| l.trim_start().starts_with("all ")));
        assert!(!text.contains("timings"));
    }
}
