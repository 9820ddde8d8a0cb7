use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use tempeval_core::closure::{self, ClosureError};
use tempeval_core::merging::{merge_corpus, MergeError};
use tempeval_core::scoring::{score_corpus, AwarenessOptions, MatchMode, Prf, ScoreOptions, ScoringError, TaskSet};
use tempeval_core::stats::{corpus_stats, CorpusStats};
use tempeval_core::timeml::{
    self, issues_from_error, list_tml_files, validate_source, Profile, Severity, ValidationIssue,
};
use tempeval_core::{AnnotatedDocument, EntityRef, MergeConfig, ScoreReport64, TemporalLink};

use crate::style::{bold, green, red, table, yellow};
use crate::{ClosureArgs, Context, MergeArgs, ModeArg, ProfileArg, ScoreArgs, StatsArgs, Status, TaskArg, ValidateArgs};

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

fn fail(status: Status, message: impl std::fmt::Display) -> Status {
    eprintln!("error: {message}");
    status
}

fn warn(ctx: &Context, message: impl std::fmt::Display) {
    if !ctx.quiet {
        eprintln!("{} {message}", yellow(ctx.color, "warning:"));
    }
}

#[derive(Serialize)]
struct FileReport {
    path: String,
    issues: Vec<ValidationIssue>,
}

pub fn validate(ctx: &Context, args: &ValidateArgs) -> Status {
    let profile = match args.profile {
        ProfileArg::Structural => Profile::Structural,
        ProfileArg::Gold => Profile::Gold,
    };
    let mut status = Status::Ok;
    let mut files: Vec<PathBuf> = Vec::new();
    for path in &args.paths {
        if path.is_dir() {
            match list_tml_files(path, args.recursive) {
                Ok(found) => files.extend(found),
                Err(e) => status = fail(Status::Io, e),
            }
        } else if path.is_file() {
            files.push(path.clone());
        } else {
            status = fail(Status::Io, format!("{}: no such file or directory", path.display()));
        }
    }

    let reports: Vec<Result<FileReport, String>> = files
        .par_iter()
        .map(|path| {
            let raw = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(FileReport { path: path.display().to_string(), issues: validate_source(&raw, &stem, profile) })
        })
        .collect();

    let mut ok_reports = Vec::new();
    for r in reports {
        match r {
            Ok(r) => ok_reports.push(r),
            Err(e) => status = fail(Status::Io, e),
        }
    }
    let count = |sev: Severity| ok_reports.iter().flat_map(|r| &r.issues).filter(|i| i.severity == sev).count();
    let (errors, warnings) = (count(Severity::Error), count(Severity::Warning));

    if ctx.json {
        print_json(&json!({ "files": ok_reports, "errors": errors, "warnings": warnings }));
    } else {
        for r in &ok_reports {
            for issue in &r.issues {
                match issue.severity {
                    Severity::Error => println!("{}: {}", r.path, red(ctx.color, &issue.to_string())),
                    Severity::Warning if !ctx.quiet => println!("{}: {}", r.path, yellow(ctx.color, &issue.to_string())),
                    Severity::Warning => {}
                }
            }
        }
        println!("{} files, {errors} errors, {warnings} warnings", ok_reports.len());
    }
    if status == Status::Ok && errors > 0 {
        status = Status::Findings;
    }
    status
}

fn scoring_status(e: &ScoringError) -> Status {
    match e {
        ScoringError::NoLinks(_) => Status::Usage,
        ScoringError::Load { .. } | ScoringError::Io(_) => Status::Io,
        _ => Status::Findings,
    }
}

fn fmt_score(x: f64) -> String {
    format!("{x:.4}")
}

fn prf_row(name: &str, p: &Prf<f64>, kappa: Option<Option<f64>>) -> Vec<String> {
    let c = p.counts;
    vec![
        name.to_string(),
        fmt_score(p.precision),
        fmt_score(p.recall),
        fmt_score(p.f1),
        c.tp().to_string(),
        c.fp().to_string(),
        c.fn_().to_string(),
        match kappa {
            Some(Some(k)) => fmt_score(k),
            Some(None) => "n/a".into(),
            None => "".into(),
        },
    ]
}

fn print_score_report(ctx: &Context, report: &ScoreReport64) {
    let mode = match report.mode {
        MatchMode::Strict => "strict",
        MatchMode::Relaxed => "relaxed",
    };
    println!("{}", bold(ctx.color, &format!("{} documents, {mode} matching", report.documents)));
    println!();
    let mut rows: Vec<Vec<String>> =
        report.metrics.iter().map(|(name, p)| prf_row(name, p, report.kappa.get(name).copied())).collect();
    if let Some(a) = &report.awareness {
        rows.push(prf_row("temporal_awareness", a, None));
    }
    for line in table(&["metric", "precision", "recall", "f1", "tp", "fp", "fn", "kappa"], &rows) {
        println!("{line}");
    }
    if !report.macro_averages.is_empty() {
        println!();
        println!("{}", bold(ctx.color, "macro averages"));
        let rows: Vec<Vec<String>> = report
            .macro_averages
            .iter()
            .map(|(name, m)| {
                vec![name.clone(), fmt_score(m.precision), fmt_score(m.recall), fmt_score(m.f1), m.documents.to_string()]
            })
            .collect();
        for line in table(&["metric", "precision", "recall", "f1", "documents"], &rows) {
            println!("{line}");
        }
    }
    if !report.inconsistent_responses.is_empty() {
        println!();
        println!("inconsistent responses (awareness 0): {}", report.inconsistent_responses.join(", "));
    }
}

pub fn score(ctx: &Context, args: &ScoreArgs) -> Status {
    for dir in [&args.reference, &args.response] {
        if !dir.is_dir() {
            return fail(Status::Io, format!("{}: not a directory", dir.display()));
        }
    }
    let tasks = match args.task {
        TaskArg::A => TaskSet { timexes: true, events: false, relations: false },
        TaskArg::B => TaskSet { timexes: false, events: true, relations: false },
        TaskArg::C => TaskSet { timexes: false, events: false, relations: true },
        TaskArg::All => TaskSet::ALL,
    };
    let options = ScoreOptions {
        tasks,
        mode: match args.mode {
            ModeArg::Strict => MatchMode::Strict,
            ModeArg::Relaxed => MatchMode::Relaxed,
        },
        all_attributes: args.all_attributes,
        awareness: AwarenessOptions { reduce: !args.no_reduce },
    };
    let report: ScoreReport64 = match score_corpus(&args.reference, &args.response, &options, args.recursive) {
        Ok(r) => r,
        Err(e) => return fail(scoring_status(&e), e),
    };
    for w in &report.warnings {
        warn(ctx, w);
    }
    if ctx.json {
        print_json(&report);
    } else {
        print_score_report(ctx, &report);
    }
    Status::Ok
}

fn merge_status(e: &MergeError) -> Status {
    match e {
        MergeError::Config(_) => Status::Usage,
        MergeError::Io { .. } | MergeError::Load { .. } => Status::Io,
        MergeError::DocIdMismatch(_) | MergeError::TextMismatch { .. } | MergeError::Serialize { .. } => {
            Status::Findings
        }
    }
}

pub fn merge(ctx: &Context, args: &MergeArgs) -> Status {
    let config = match MergeConfig::from_file(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(merge_status(&e), e),
    };
    let summary = match merge_corpus(&config, &args.out, !args.no_repair) {
        Ok(s) => s,
        Err(e) => return fail(merge_status(&e), e),
    };
    for d in summary.documents.iter().filter(|d| !d.consistent) {
        warn(ctx, format!("{}: merged relations are inconsistent", d.doc_id));
    }
    if ctx.json {
        print_json(&summary);
        return Status::Ok;
    }
    println!(
        "{}",
        bold(
            ctx.color,
            &format!(
                "merged {} documents from {} (best: {}, threshold {}) into {}",
                summary.documents.len(),
                summary.systems.join(", "),
                summary.best_system,
                summary.support_threshold,
                args.out.display()
            )
        )
    );
    println!();
    let rows: Vec<Vec<String>> = summary
        .documents
        .iter()
        .map(|d| {
            vec![
                d.doc_id.clone(),
                d.entities_kept.to_string(),
                d.entities_dropped.to_string(),
                d.entities_conflicted.to_string(),
                d.links_kept.to_string(),
                d.links_dropped.to_string(),
                d.links_conflicted.to_string(),
                d.links_repaired.to_string(),
            ]
        })
        .collect();
    let header = ["document", "entities", "dropped", "conflicted", "links", "dropped", "conflicted", "repaired"];
    for line in table(&header, &rows) {
        println!("{line}");
    }
    println!();
    println!(
        "total: {} entities kept, {} dropped; {} links kept, {} dropped",
        summary.entities_kept, summary.entities_dropped, summary.links_kept, summary.links_dropped
    );
    Status::Ok
}

fn entity_kind(doc: &AnnotatedDocument) -> impl Fn(&str) -> EntityRef + '_ {
    let timexes: HashSet<&str> = doc.all_timexes().map(|t| t.tid.as_str()).collect();
    move |id| {
        if timexes.contains(id) {
            EntityRef::Timex(id.to_string())
        } else {
            EntityRef::Event(id.to_string())
        }
    }
}

fn link_json(l: &TemporalLink) -> serde_json::Value {
    json!({ "lid": l.lid, "source": l.source.id(), "relType": l.relation.as_str(), "target": l.target.id() })
}

pub fn closure(ctx: &Context, args: &ClosureArgs) -> Status {
    let doc = match timeml::read_document(&args.file) {
        Ok(d) => d,
        Err(e) => {
            for issue in issues_from_error(&e, &args.file.display().to_string()) {
                eprintln!("{issue}");
            }
            return fail(Status::Io, format!("{}: {e}", args.file.display()));
        }
    };
    let closed = match closure::close_document(&doc) {
        Ok(c) => c,
        Err(ClosureError::Inconsistent(w)) => {
            if ctx.json {
                let witness: Vec<String> = w
                    .witness
                    .iter()
                    .map(|s| format!("{} {} {} ({})", s.from, s.relation.symbol(), s.to, s.origin))
                    .collect();
                print_json(&json!({
                    "doc_id": doc.doc_id,
                    "consistent": false,
                    "links": w.links(),
                    "witness": witness,
                }));
            } else {
                println!("{}: {}", doc.doc_id, red(ctx.color, "inconsistent"));
                println!("links: {}", w.links().join(", "));
                println!("{w}");
            }
            return Status::Findings;
        }
        Err(e) => return fail(Status::Findings, format!("{}: {e}", doc.doc_id)),
    };

    if args.check {
        let stated = doc.relation_links().count();
        if ctx.json {
            print_json(&json!({
                "doc_id": doc.doc_id,
                "consistent": true,
                "entities": closed.entity_ids().len(),
                "links": stated,
            }));
        } else {
            println!("{}: {} ({} entities, {stated} links)", doc.doc_id, green(ctx.color, "consistent"), closed.entity_ids().len());
        }
        return Status::Ok;
    }

    let links: Vec<TemporalLink> = if args.reduced {
        let stated: Vec<TemporalLink> = doc.relation_links().cloned().collect();
        match closure::reduce(&stated, doc.instance_ids()) {
            Ok(l) => l,
            Err(e) => return fail(Status::Findings, e),
        }
    } else {
        let kind = entity_kind(&doc);
        closed
            .determined_pairs()
            .into_iter()
            .enumerate()
            .map(|(i, (a, r, b))| TemporalLink::new(format!("l{}", i + 1), kind(a), kind(b), r))
            .collect()
    };
    if ctx.json {
        let links: Vec<serde_json::Value> = links.iter().map(link_json).collect();
        print_json(&json!({ "doc_id": doc.doc_id, "reduced": args.reduced, "links": links }));
        return Status::Ok;
    }
    let out = AnnotatedDocument { links, ..doc };
    match timeml::serialize_document(&out) {
        Ok(text) => {
            print!("{text}");
            Status::Ok
        }
        Err(e) => fail(Status::Findings, e),
    }
}

#[derive(Serialize)]
struct DirStats {
    directory: String,
    #[serde(flatten)]
    stats: CorpusStats,
    failures: Vec<String>,
}

pub fn stats(ctx: &Context, args: &StatsArgs) -> Status {
    let mut status = Status::Ok;
    let mut all = Vec::new();
    for dir in &args.dirs {
        if !dir.is_dir() {
            status = fail(Status::Io, format!("{}: not a directory", dir.display()));
            continue;
        }
        match corpus_stats(dir, args.recursive) {
            Ok((stats, corpus)) => {
                for w in &corpus.warnings {
                    warn(ctx, w);
                }
                let failures: Vec<String> =
                    corpus.failures.iter().map(|f| format!("{}: {}", f.path.display(), f.error)).collect();
                for f in &failures {
                    status = fail(Status::Io, f);
                }
                all.push(DirStats { directory: dir.display().to_string(), stats, failures });
            }
            Err(e) => status = fail(Status::Io, e),
        }
    }
    if ctx.json {
        print_json(&all);
        return status;
    }
    for (i, d) in all.iter().enumerate() {
        if i > 0 {
            println!();
        }
        let s = &d.stats;
        println!("{}", bold(ctx.color, &d.directory));
        let rows = vec![
            vec!["documents".to_string(), s.documents.to_string()],
            vec!["tokens".to_string(), s.tokens.to_string()],
            vec!["timexes".to_string(), s.timexes.to_string()],
            vec!["dct timexes".to_string(), s.dcts.to_string()],
            vec!["events".to_string(), s.events.to_string()],
            vec!["links".to_string(), s.links.to_string()],
        ];
        for line in table(&["", "count"], &rows).into_iter().skip(1) {
            println!("  {line}");
        }
        if !s.relations.is_empty() {
            println!("  relations");
            let rows: Vec<Vec<String>> = s.relations.iter().map(|(k, v)| vec![k.clone(), v.to_string()]).collect();
            for line in table(&["", ""], &rows).into_iter().skip(1) {
                println!("    {line}");
            }
        }
    }
    status
}
