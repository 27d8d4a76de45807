mod report;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use resgraph::blowup::{blow_up, verify_transport, BlowUpCenter};
use resgraph::classify::{dynkin_detect, enumerate_graphs, shape, DynkinLabel, LtType, Shape};
use resgraph::cover::{cover_step, cover_verdict, residues_mod_p, ComponentCase, CoverVerdict};
use resgraph::discrepancy::{
    classify_pair, cycle_numbers, discrepancies, fundamental_cycle, rationality_check,
    DiscrepancyProfile, PairClass,
};
use resgraph::format::{self, GraphDocument};
use resgraph::graph::ResolutionGraph;
use resgraph::{Error, Int};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "resgraph", version, about = "Exact analyzer for resolution dual graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the pull-back system: coefficients, index, class, cycle
    Analyze {
        /// Graph file; a bare name is also tried as <name>.rdg and corpus/<name>.rdg
        file: String,
        /// Machine-readable output with stable field order
        #[arg(long)]
        json: bool,
    },
    /// Residues and curve-by-curve cases of the degree-p cyclic cover
    Cover {
        file: String,
        /// Characteristic: a prime
        #[arg(long = "char")]
        characteristic: u64,
        #[arg(long)]
        json: bool,
    },
    /// Blow up a point and transport the coefficients without re-solving
    Blowup {
        file: String,
        /// Center: free:<id>, edge:<id>,<id>, boundary:<id>, or boundary:-
        #[arg(long = "at")]
        center: String,
        /// Write the new graph here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Re-solve the blown-up graph and compare against the transport
        #[arg(long)]
        verify: bool,
    },
    /// Chain/fork shape, branch determinants, and Dynkin label
    Classify { file: String },
    /// Walk every negative definite tree inside a weight envelope
    Enumerate {
        #[arg(long)]
        max_vertices: usize,
        /// Most negative self-intersection allowed (weights run up to -2)
        #[arg(long, allow_hyphen_values = true)]
        min_weight: i64,
        /// Keep only graphs in this class
        #[arg(long)]
        filter: Option<FilterArg>,
        /// Verify a law over the walk instead of printing graphs
        #[arg(long)]
        check: Option<CheckArg>,
        /// Smallest wild characteristic exercised by --check dichotomy
        #[arg(long, default_value_t = 5)]
        char_min: u64,
        /// Print full documents instead of one-line summaries
        #[arg(long)]
        emit: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FilterArg {
    /// Log terminal graphs
    Lt,
    /// Canonical graphs
    Canonical,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckArg {
    /// Wild covers at primes >= char-min must step the index down cleanly
    Dichotomy,
}

struct Failure {
    code: u8,
    message: String,
}

/// The input was readable but the analysis refuses it.
fn refuse(e: impl std::fmt::Display) -> Failure {
    Failure { code: 1, message: e.to_string() }
}

/// The invocation itself is wrong: missing file, bad syntax, bad argument.
fn usage(e: impl std::fmt::Display) -> Failure {
    Failure { code: 2, message: e.to_string() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    let out = match cmd {
        Cmd::Analyze { file, json } => cmd_analyze(&load(&file)?, json)?,
        Cmd::Cover { file, characteristic, json } => cmd_cover(&load(&file)?, characteristic, json)?,
        Cmd::Blowup { file, center, output, verify } => {
            cmd_blowup(&load(&file)?, &center, output.as_deref(), verify)?
        }
        Cmd::Classify { file } => cmd_classify(&load(&file)?)?,
        Cmd::Enumerate { max_vertices, min_weight, filter, check, char_min, emit } => {
            return cmd_enumerate(max_vertices, min_weight, filter, check, char_min, emit);
        }
    };
    write_stdout(&out)
}

/// One write at the end of a bounded subcommand; a reader hanging up early
/// is not an error.
fn write_stdout(s: &str) -> Result<(), Failure> {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match lock.write_all(s.as_bytes()).and_then(|()| lock.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(usage(format!("cannot write to stdout: {e}"))),
    }
}

/// Resolve `arg` to a document: literal path, then `<arg>.rdg`, then
/// `corpus/<arg>.rdg` relative to the working directory.
fn load(arg: &str) -> Result<GraphDocument, Failure> {
    let candidates = [
        PathBuf::from(arg),
        PathBuf::from(format!("{arg}.rdg")),
        PathBuf::from(format!("corpus/{arg}.rdg")),
    ];
    let path = candidates
        .iter()
        .find(|p| p.is_file())
        .ok_or_else(|| usage(format!("cannot find {arg} (tried {arg}, {arg}.rdg, corpus/{arg}.rdg)")))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    format::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn class_human(c: PairClass) -> &'static str {
    match c {
        PairClass::Canonical => "canonical",
        PairClass::LogTerminalNotCanonical => "log terminal (not canonical)",
        PairClass::NotLogTerminal => "not log terminal",
    }
}

fn class_slug(c: PairClass) -> &'static str {
    match c {
        PairClass::Canonical => "canonical",
        PairClass::LogTerminalNotCanonical => "log-terminal-not-canonical",
        PairClass::NotLogTerminal => "not-log-terminal",
    }
}

fn verdict_human(v: CoverVerdict) -> &'static str {
    match v {
        CoverVerdict::TameCanonical => "canonical (cover is tame)",
        CoverVerdict::StepLogTerminal => "log terminal (one cover step taken)",
        CoverVerdict::NotLogTerminal => "not log terminal",
        CoverVerdict::TheoremBackedCanonical => "canonical (wild step, characteristic at least 5)",
        CoverVerdict::TypeACanonical => "canonical (wild step on a chain)",
        CoverVerdict::Indeterminate => "indeterminate",
    }
}

fn verdict_slug(v: CoverVerdict) -> &'static str {
    match v {
        CoverVerdict::TameCanonical => "tame-canonical",
        CoverVerdict::StepLogTerminal => "step-log-terminal",
        CoverVerdict::NotLogTerminal => "not-log-terminal",
        CoverVerdict::TheoremBackedCanonical => "theorem-backed-canonical",
        CoverVerdict::TypeACanonical => "type-a-canonical",
        CoverVerdict::Indeterminate => "indeterminate",
    }
}

fn pairs_table(rows: impl Iterator<Item = (String, String)>) -> String {
    let rows: Vec<_> = rows.collect();
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "  {k:width$}  {v}");
    }
    out
}

fn cmd_analyze(doc: &GraphDocument, json: bool) -> Result<String, Failure> {
    let g = &doc.graph;
    let v = g.validate();
    if !v.is_negative_definite {
        return Err(refuse(Error::NotNegativeDefinite));
    }
    let profile = discrepancies(g).map_err(refuse)?;
    let class = classify_pair(&profile);
    let z = fundamental_cycle(g).map_err(refuse)?;
    let nums = cycle_numbers(g, &z).map_err(refuse)?;
    let rationality = match rationality_check(g) {
        Ok(r) => Some(r),
        Err(Error::NotLogTerminalInput) => None,
        Err(e) => return Err(refuse(e)),
    };
    let boundary_total: u64 = (0..g.vertex_count()).map(|i| g.boundary(i)).sum();

    if json {
        let rep = report::AnalyzeReport {
            name: doc.name.clone(),
            curves: g.vertex_count(),
            edges: g.edge_count(),
            boundary: boundary_total,
            negative_definite: true,
            minimal: v.is_minimal,
            tree: v.is_tree,
            coefficients: profile
                .iter()
                .map(|(id, a)| report::Entry { vertex: id.to_string(), value: a.to_string() })
                .collect(),
            index: profile.index().to_string(),
            class: class_slug(class),
            fundamental_cycle: z
                .iter()
                .map(|(id, m)| report::Entry { vertex: id.to_string(), value: m.to_string() })
                .collect(),
            z_squared: nums.z_squared.to_string(),
            z_dot_k: nums.z_dot_k.to_string(),
            p_a: nums.p_a.to_string(),
            rational: rationality.as_ref().map(|r| r.p_a.is_zero()),
            multiplicity: rationality.as_ref().and_then(|r| r.multiplicity.as_ref()).map(|m| m.to_string()),
        };
        let mut s = serde_json::to_string_pretty(&rep).expect("report serializes");
        s.push('\n');
        return Ok(s);
    }

    let boundary_note = match boundary_total {
        0 => "no boundary".into(),
        1 => "1 boundary incidence".to_string(),
        n => format!("{n} boundary incidences"),
    };
    let mut o = String::new();
    let _ = writeln!(
        o,
        "graph {}: {} curves, {} edges, {}",
        doc.name,
        g.vertex_count(),
        g.edge_count(),
        boundary_note
    );
    let _ = writeln!(o, "negative definite: yes");
    let _ = writeln!(o, "minimal: {}", if v.is_minimal { "yes" } else { "no" });
    let _ = writeln!(o, "coefficients:");
    o.push_str(&pairs_table(profile.iter().map(|(id, a)| (id.to_string(), a.to_string()))));
    let _ = writeln!(o, "index: {}", profile.index());
    let _ = writeln!(o, "class: {}", class_human(class));
    if boundary_total > 0 {
        let _ = writeln!(o, "fundamental cycle (boundary ignored):");
    } else {
        let _ = writeln!(o, "fundamental cycle:");
    }
    o.push_str(&pairs_table(z.iter().map(|(id, m)| (id.to_string(), m.to_string()))));
    let _ = writeln!(o, "Z.Z = {}, Z.K = {}, p_a(Z) = {}", nums.z_squared, nums.z_dot_k, nums.p_a);
    match rationality {
        Some(r) if r.p_a.is_zero() => match &r.multiplicity {
            Some(m) => {
                let _ = writeln!(o, "rational: yes (multiplicity {m})");
            }
            None => {
                let _ = writeln!(o, "rational: yes");
            }
        },
        Some(r) => {
            let _ = writeln!(o, "rational: no (p_a(Z) = {})", r.p_a);
        }
        None => {
            let _ = writeln!(o, "rationality: skipped (needs a log terminal graph)");
        }
    }
    Ok(o)
}

fn case_human(case: &ComponentCase, p: u64) -> String {
    match case {
        ComponentCase::Case1 { coefficient } => {
            format!("ramified, coefficient {coefficient}, multiplicity {p}")
        }
        ComponentCase::Case2 { coefficient } => {
            format!("pass-through, coefficient {coefficient}, multiplicity 1")
        }
        ComponentCase::FailEndPattern { lower_bound } => {
            format!("chain-end failure, some coefficient at least {lower_bound}, multiplicity {p}")
        }
        ComponentCase::Unclassified => "unclassified".into(),
    }
}

fn cmd_cover(doc: &GraphDocument, p: u64, json: bool) -> Result<String, Failure> {
    let g = &doc.graph;
    let profile = discrepancies(g).map_err(refuse)?;
    let report = cover_verdict(g, &profile, p).map_err(|e| match e {
        Error::NotPrime(_) => usage(e),
        other => refuse(other),
    })?;
    let residues = residues_mod_p(&profile, p).ok();
    let failing = report.failing_vertices();

    if json {
        let rep = report::CoverJson {
            name: doc.name.clone(),
            characteristic: p,
            index: profile.index().to_string(),
            residues: residues.as_ref().map(|rv| {
                rv.ids
                    .iter()
                    .zip(&rv.residues)
                    .map(|(id, &m)| report::ResidueEntry { vertex: id.to_string(), value: m })
                    .collect()
            }),
            cases: report
                .cases
                .iter()
                .map(|(id, case)| {
                    let (slug, coefficient, lower_bound) = match case {
                        ComponentCase::Case1 { coefficient } => {
                            ("ramified", Some(coefficient.to_string()), None)
                        }
                        ComponentCase::Case2 { coefficient } => {
                            ("pass-through", Some(coefficient.to_string()), None)
                        }
                        ComponentCase::FailEndPattern { lower_bound } => {
                            ("chain-end-failure", None, Some(lower_bound.to_string()))
                        }
                        ComponentCase::Unclassified => ("unclassified", None, None),
                    };
                    report::CaseEntry {
                        vertex: id.to_string(),
                        case: slug,
                        coefficient,
                        lower_bound,
                        multiplicity: case.pullback_multiplicity(p),
                    }
                })
                .collect(),
            verdict: verdict_slug(report.verdict),
            provenance: report.verdict.provenance(),
            boundary_reduced: report.boundary_reduced,
            index_after_step: report.step_index_after.as_ref().map(|i| i.to_string()),
            failing: failing.iter().map(|v| v.to_string()).collect(),
        };
        let mut s = serde_json::to_string_pretty(&rep).expect("report serializes");
        s.push('\n');
        return Ok(s);
    }

    let mut o = String::new();
    let _ = writeln!(o, "graph {}: index {}, characteristic {}", doc.name, profile.index(), p);
    match &residues {
        Some(rv) => {
            let _ = writeln!(o, "residues mod {p}:");
            o.push_str(&pairs_table(
                rv.ids.iter().zip(&rv.residues).map(|(id, m)| (id.to_string(), m.to_string())),
            ));
        }
        None => {
            let _ = writeln!(o, "residues: not applicable ({p} does not divide the index)");
        }
    }
    if !report.cases.is_empty() {
        let _ = writeln!(o, "cases:");
        o.push_str(&pairs_table(
            report.cases.iter().map(|(id, c)| (id.to_string(), case_human(c, p))),
        ));
    }
    let _ = writeln!(o, "verdict: {}", verdict_human(report.verdict));
    let _ = writeln!(o, "provenance: {}", report.verdict.provenance());
    if let Some(after) = &report.step_index_after {
        let _ = writeln!(o, "index after step: {after}");
    }
    if !failing.is_empty() {
        let names: Vec<String> = failing.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(o, "failing: {}", names.join(", "));
    }
    Ok(o)
}

fn cmd_blowup(
    doc: &GraphDocument,
    center_arg: &str,
    output: Option<&std::path::Path>,
    verify: bool,
) -> Result<String, Failure> {
    let g = &doc.graph;
    let profile = discrepancies(g).map_err(refuse)?;
    let center: BlowUpCenter = center_arg.parse().map_err(usage)?;
    let (blown, transported) = blow_up(g, &profile, &center).map_err(|e| match e {
        Error::UnknownVertex(_) | Error::MissingEdge(_, _) | Error::NoBoundaryAt(_) => usage(e),
        other => refuse(other),
    })?;
    if verify {
        let ok = verify_transport(g, &center).map_err(refuse)?;
        if !ok {
            return Err(refuse("transported coefficients do not match a direct solve"));
        }
        eprintln!("transport verified against a direct solve");
    }
    let out_doc = GraphDocument::new(format!("{}-up", doc.name), blown).map_err(refuse)?;
    let text = format::serialize(&out_doc);
    let mut o = String::new();
    match output {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
            let _ = writeln!(o, "coefficients after blow-up:");
            o.push_str(&pairs_table(transported.iter().map(|(id, a)| (id.to_string(), a.to_string()))));
            let _ = writeln!(o, "index: {}", transported.index());
        }
        None => {
            o.push_str(&text);
            let _ = writeln!(o, "# coefficients after blow-up:");
            for (id, a) in transported.iter() {
                let _ = writeln!(o, "# {id} {a}");
            }
            let _ = writeln!(o, "# index: {}", transported.index());
        }
    }
    Ok(o)
}

fn lt_type_human(t: LtType) -> &'static str {
    match t {
        LtType::A => "A (chain)",
        LtType::D => "D (fork with two determinant-2 branches)",
        LtType::E6 => "E6",
        LtType::E7 => "E7",
        LtType::E8 => "E8",
        LtType::None => "none (fork outside the log terminal patterns)",
    }
}

fn dynkin_human(d: DynkinLabel) -> String {
    match d {
        DynkinLabel::A(n) => format!("A{n}"),
        DynkinLabel::D(n) => format!("D{n}"),
        DynkinLabel::E6 => "E6".into(),
        DynkinLabel::E7 => "E7".into(),
        DynkinLabel::E8 => "E8".into(),
        DynkinLabel::None => "none".into(),
    }
}

fn cmd_classify(doc: &GraphDocument) -> Result<String, Failure> {
    let g = &doc.graph;
    let sh = shape(g).map_err(refuse)?;
    let v = g.validate();
    if !v.is_negative_definite || !v.is_minimal {
        eprintln!("note: the type label assumes a minimal negative definite graph; this one is not");
    }
    let mut o = String::new();
    let _ = writeln!(o, "graph {}: {} curves", doc.name, g.vertex_count());
    match &sh.shape {
        Shape::Chain => {
            let _ = writeln!(o, "shape: chain");
        }
        Shape::Fork { center, branches } => {
            let arms: Vec<String> = branches
                .iter()
                .map(|b| b.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
                .collect();
            let _ = writeln!(o, "shape: fork at {center}, branches {}", arms.join(" | "));
        }
        Shape::Other => {
            let _ = writeln!(o, "shape: branched beyond a single fork");
        }
    }
    if let Some(dets) = &sh.branch_determinants {
        let _ = writeln!(o, "branch determinants: {}, {}, {}", dets[0], dets[1], dets[2]);
    }
    let _ = writeln!(o, "type: {}", lt_type_human(sh.lt_type));
    let _ = writeln!(o, "dynkin: {}", dynkin_human(dynkin_detect(g)));
    Ok(o)
}

fn cmd_enumerate(
    max_vertices: usize,
    min_weight: i64,
    filter: Option<FilterArg>,
    check: Option<CheckArg>,
    char_min: u64,
    emit: bool,
) -> Result<(), Failure> {
    if check == Some(CheckArg::Dichotomy) {
        return enumerate_dichotomy(max_vertices, min_weight, char_min);
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut total = 0usize;
    let mut matched = 0usize;
    for g in enumerate_graphs(max_vertices, min_weight) {
        total += 1;
        let profile = discrepancies(&g).map_err(refuse)?;
        let class = classify_pair(&profile);
        let keep = match filter {
            None => true,
            Some(FilterArg::Lt) => class.is_log_terminal(),
            Some(FilterArg::Canonical) => class == PairClass::Canonical,
        };
        if !keep {
            continue;
        }
        matched += 1;
        let line = if emit {
            let doc = GraphDocument::new(format!("enum-{matched}"), g).map_err(refuse)?;
            format::serialize(&doc)
        } else {
            summary_line(&g, &profile, class)
        };
        match emit_line(&mut out, &line) {
            Ok(true) => {}
            Ok(false) => return Ok(()),
            Err(f) => return Err(f),
        }
    }
    eprintln!("enumerated {total} graphs, printed {matched}");
    Ok(())
}

/// Write one line; `Ok(false)` means the reader hung up and the stream
/// should stop without an error.
fn emit_line(out: &mut impl std::io::Write, line: &str) -> Result<bool, Failure> {
    match writeln!(out, "{line}") {
        Ok(()) => Ok(true),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(false),
        Err(e) => Err(usage(format!("cannot write to stdout: {e}"))),
    }
}

fn summary_line(g: &ResolutionGraph, profile: &DiscrepancyProfile, class: PairClass) -> String {
    let ws: Vec<String> = (0..g.vertex_count()).map(|i| g.self_int(i).to_string()).collect();
    let es: Vec<String> =
        g.edges().iter().map(|&(i, j)| format!("{}-{}", i + 1, j + 1)).collect();
    let edge_part = if es.is_empty() { String::from("-") } else { es.join(",") };
    format!(
        "weights {}; edges {}; index {}; {}",
        ws.join(","),
        edge_part,
        profile.index(),
        class_slug(class)
    )
}

/// Exit 1 with a report on the first graphs violating the wild-step law.
fn enumerate_dichotomy(max_vertices: usize, min_weight: i64, char_min: u64) -> Result<(), Failure> {
    if char_min < 5 {
        return Err(usage("--char-min below 5 is outside the clean-step law"));
    }
    let mut graphs = 0usize;
    let mut lt_count = 0usize;
    let mut pairs = 0usize;
    let mut violations: Vec<String> = Vec::new();
    for g in enumerate_graphs(max_vertices, min_weight) {
        graphs += 1;
        let profile = discrepancies(&g).map_err(refuse)?;
        if !classify_pair(&profile).is_log_terminal() {
            continue;
        }
        lt_count += 1;
        let mut r = profile.index().clone();
        let mut p = 2u64;
        let mut wild = Vec::new();
        while r > Int::from(1) {
            if (&r % p).is_zero() {
                if p >= char_min {
                    wild.push(p);
                }
                while (&r % p).is_zero() {
                    r /= p;
                }
            }
            p += 1;
        }
        for p in wild {
            pairs += 1;
            let report = cover_step(&g, &profile, p).map_err(refuse)?;
            let index_expected = profile.index() / p;
            let clean = report.verdict == CoverVerdict::StepLogTerminal
                && report.step_index_after.as_ref() == Some(&index_expected);
            if !clean && violations.len() < 10 {
                violations.push(format!(
                    "{} at characteristic {p}",
                    summary_line(&g, &profile, classify_pair(&profile))
                ));
            }
        }
    }
    if violations.is_empty() {
        write_stdout(&format!(
            "dichotomy holds: {pairs} wild cover steps over {lt_count} log terminal graphs ({graphs} enumerated)\n"
        ))
    } else {
        let mut o = String::new();
        for v in &violations {
            let _ = writeln!(o, "violation: {v}");
        }
        write_stdout(&o)?;
        Err(refuse(format!("{} violations of the wild-step law", violations.len())))
    }
}
