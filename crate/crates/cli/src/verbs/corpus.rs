//! `corpus run`: analyze every labelled probe and compare with its label.
//!
//! Entries are analyzed on worker threads; results are collected by entry
//! index and emitted once, so the output does not depend on scheduling.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use muwork_core::corpus::{load_corpus, CorpusEntry, Label};
use muwork_core::halt::{analyze, Analysis, AnalyzerConfig, Verdict};
use serde_json::Value;

use super::config;
use crate::report::{analysis_fields, failed, obj, to_value, CliError, Report};
use crate::{CorpusVerb, Opts};

/// How a verdict relates to the label of its probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Agreement {
    /// Decided, and as labelled (or Unknown on an open label).
    Confirmed,
    /// Unknown on a decided label: incomplete, not wrong.
    Unknown,
    /// An open probe the analyzer decided anyway.
    DecidedOpen,
    /// Contradicts the label, or the degree does not fit the verdict.
    Contradicted,
}

impl Agreement {
    fn name(self) -> &'static str {
        match self {
            Agreement::Confirmed => "confirmed",
            Agreement::Unknown => "unknown",
            Agreement::DecidedOpen => "decided-open",
            Agreement::Contradicted => "contradicted",
        }
    }
}

fn compare(label: &Label, a: &Analysis, pr: bool) -> Agreement {
    if !a.is_consistent(pr) {
        return Agreement::Contradicted;
    }
    match (label, &a.verdict) {
        (Label::Halts { value }, Verdict::Halts { value: v, .. }) if v == value => Agreement::Confirmed,
        (Label::Diverges, v) if v.is_divergence() => Agreement::Confirmed,
        (Label::Open, Verdict::Unknown { .. }) => Agreement::Confirmed,
        (Label::Open, _) => Agreement::DecidedOpen,
        (_, Verdict::Unknown { .. }) => Agreement::Unknown,
        _ => Agreement::Contradicted,
    }
}

type EntryResult = Result<Vec<ProbeResult>, String>;

struct ProbeResult {
    json: Value,
    agreement: Agreement,
}

fn run_entry(e: &CorpusEntry, cfg: &AnalyzerConfig) -> Result<Vec<ProbeResult>, String> {
    let pr = e.is_primitive_recursive();
    e.probes
        .iter()
        .map(|p| {
            let spec = e.problem(&p.input).ok_or_else(|| format!("{}: input {:?} does not fit", e.name, p.input))?;
            let a = analyze(&spec, cfg).map_err(|err| format!("{} at {:?}: {err}", e.name, p.input))?;
            let agreement = compare(&p.label, &a, pr);
            let mut json = obj([("input", to_value(&p.input)), ("label", to_value(&p.label))]);
            json.insert("source".into(), to_value(&p.source));
            json.insert("analysis".into(), Value::Object(analysis_fields(&a)));
            json.insert("agreement".into(), agreement.name().into());
            Ok(ProbeResult { json: Value::Object(json), agreement })
        })
        .collect()
}

pub fn dispatch(c: &CorpusVerb, o: &Opts) -> Result<Report, CliError> {
    let CorpusVerb::Run { dir, tag, jobs } = c;
    run(dir, tag.as_deref(), jobs.map(|j| j as usize), &config(o))
}

fn run(dir: &Path, tag: Option<&str>, jobs: Option<usize>, cfg: &AnalyzerConfig) -> Result<Report, CliError> {
    let mut entries = load_corpus(dir).map_err(failed)?;
    if entries.is_empty() {
        return Err(failed(format!("{}: no labelled corpus entries", dir.display())));
    }
    if let Some(t) = tag {
        entries.retain(|e| e.has_tag(t));
    }
    let results = analyze_all(&entries, jobs, cfg);

    let mut counts = [0usize; 4];
    let mut text = String::new();
    let mut rows = Vec::new();
    for (e, r) in entries.iter().zip(results) {
        let probes = r.map_err(failed)?;
        let mut mine = [0usize; 4];
        for p in &probes {
            mine[p.agreement as usize] += 1;
        }
        for (c, m) in counts.iter_mut().zip(mine) {
            *c += m;
        }
        let file = e.source.file_name().unwrap_or_default().to_string_lossy().to_string();
        text += &format!(
            "{:<20} {:<16} {} probes: {} confirmed, {} unknown, {} decided-open, {} contradicted\n",
            e.name,
            file,
            probes.len(),
            mine[0],
            mine[1],
            mine[2],
            mine[3]
        );
        let mut row = obj([("name", e.name.clone().into()), ("file", file.into())]);
        row.insert("tags".into(), to_value(&e.tags));
        row.insert("probes".into(), Value::Array(probes.into_iter().map(|p| p.json).collect()));
        rows.push(Value::Object(row));
    }
    let total: usize = counts.iter().sum();
    text += &format!(
        "total: {} entries, {total} probes: {} confirmed, {} unknown, {} decided-open, {} contradicted\n",
        entries.len(),
        counts[0],
        counts[1],
        counts[2],
        counts[3]
    );
    let summary = obj([
        ("entries", entries.len().into()),
        ("probes", total.into()),
        ("confirmed", counts[0].into()),
        ("unknown", counts[1].into()),
        ("decided_open", counts[2].into()),
        ("contradicted", counts[3].into()),
    ]);
    let json = obj([("entries", Value::Array(rows)), ("summary", Value::Object(summary))]);
    let mut report = Report::new(json, text);
    report.failed = counts[3] > 0;
    Ok(report)
}

fn analyze_all(entries: &[CorpusEntry], jobs: Option<usize>, cfg: &AnalyzerConfig) -> Vec<EntryResult> {
    let workers =
        jobs.unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get())).clamp(1, entries.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<EntryResult>>> = entries.iter().map(|_| Mutex::new(None)).collect();
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(e) = entries.get(i) else { break };
                *slots[i].lock().expect("no worker panics while holding a slot") = Some(run_entry(e, cfg));
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("workers finished").expect("every slot filled")).collect()
}
