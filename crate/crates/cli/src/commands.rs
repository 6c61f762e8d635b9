//! The four subcommands. Each returns an [`Outcome`]; `main` prints it.
//!
//! The first line on stderr is always `<status> <command>: <detail>` with
//! status one of `ok`, `fail`, `invalid`, `undefined`, `blocked`.

use std::fmt::Write as _;
use std::path::Path;

use escrow_core::laws::{run_selected, LawSuiteConfig};
use escrow_core::{
    diamond, emon_product, escrow_act, escrow_shape, make_comodule, optic_eq, run, seq_compose,
    vermittler_act, ComoduleStr, ComonoidStr, Error, Escrow, EscrowMonoidCtx, FinMap, ModuleStr,
    MonoidStr, Optic, TensorObj, VermittlerCtx,
};

use crate::format::{
    describe_shape, parse_definition_file, serialize, standalone, Definition, DefinitionFile,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Fail,
    Invalid,
    Undefined,
    Blocked,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Fail | Status::Invalid => 1,
            Status::Undefined => 2,
            Status::Blocked => 3,
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Fail => "fail",
            Status::Invalid => "invalid",
            Status::Undefined => "undefined",
            Status::Blocked => "blocked",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: Status,
    /// First stderr line, without the status word.
    pub headline: String,
    pub stdout: String,
}

impl Outcome {
    fn new(status: Status, headline: impl Into<String>, stdout: String) -> Self {
        Outcome {
            status,
            headline: headline.into(),
            stdout,
        }
    }

    fn invalid(command: &str, message: impl std::fmt::Display) -> Self {
        Outcome::new(
            Status::Invalid,
            format!("{command}: {message}"),
            String::new(),
        )
    }

    pub fn code(&self) -> i32 {
        self.status.code()
    }

    /// The status line as printed, without color.
    pub fn status_line(&self) -> String {
        format!("{} {}", self.status.word(), self.headline)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Style {
    Diamond,
    Seq,
    Emon,
    Act,
    Vermittler,
}

impl Style {
    fn name(self) -> &'static str {
        match self {
            Style::Diamond => "diamond",
            Style::Seq => "seq",
            Style::Emon => "emon",
            Style::Act => "act",
            Style::Vermittler => "vermittler",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TraceFormat {
    Text,
    Json,
}

/// Explicit structure choices for `compose`, by definition name.
#[derive(Clone, Debug, Default)]
pub struct Structures {
    pub monoid: Option<String>,
    pub module: Option<String>,
    pub comodule: Option<String>,
}

// ---- check-laws ----

pub fn cmd_check_laws(config: &LawSuiteConfig) -> Outcome {
    let reports = match run_selected(config) {
        Ok(r) => r,
        Err(e) => return Outcome::invalid("check-laws", e),
    };
    let mut out = String::new();
    for r in &reports {
        out.push_str(&r.to_string());
    }
    let total: u64 = reports.iter().map(|r| r.cases()).sum();
    match reports.iter().find(|r| !r.passed()) {
        None => Outcome::new(
            Status::Ok,
            format!(
                "check-laws: {} suites, {total} cases, 0 failures",
                reports.len()
            ),
            out,
        ),
        Some(r) => {
            let check = r
                .first_failure()
                .expect("a failing suite has a failing check");
            let _ = writeln!(
                out,
                "\nfirst counterexample ({} / {}):",
                r.suite, check.name
            );
            if let Some(cx) = &check.counterexample {
                out.push_str(cx);
                if !cx.ends_with('\n') {
                    out.push('\n');
                }
            }
            let failures: u64 = reports.iter().map(|r| r.failures()).sum();
            Outcome::new(
                Status::Fail,
                format!(
                    "check-laws: {failures} failures, first in {} / {}",
                    r.suite, check.name
                ),
                out,
            )
        }
    }
}

// ---- shared rendering ----

fn indent_table(out: &mut String, label: &str, f: &FinMap) {
    let _ = writeln!(out, "{label}:");
    for line in f.render_table() {
        let _ = writeln!(out, "  {line}");
    }
}

/// Representative and normal form of an optic.
pub fn render_optic(o: &Optic) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "shape: {}", describe_shape(o));
    let _ = writeln!(
        out,
        "residual: {} (size {})",
        o.residual(),
        o.residual().size()
    );
    out.push_str("representative:\n");
    let mut rep = String::new();
    indent_table(&mut rep, "fwd", o.fwd());
    indent_table(&mut rep, "bwd", o.bwd());
    for line in rep.lines() {
        let _ = writeln!(out, "  {line}");
    }
    out.push_str("normal form:\n");
    for line in o.to_lens().render().lines() {
        let _ = writeln!(out, "  {line}");
    }
    out
}

fn load(command: &str, file: &Path) -> Result<DefinitionFile, Outcome> {
    parse_definition_file(file)
        .map_err(|e| Outcome::invalid(command, format!("{}: {e}", file.display())))
}

fn optic_named<'a>(defs: &'a DefinitionFile, name: &str) -> Result<&'a Optic, String> {
    match defs.get(name) {
        None => Err(format!("undefined name `{name}`")),
        Some(d) => d
            .as_optic()
            .ok_or_else(|| format!("`{name}` is a {}, expected an optic or escrow", d.kind())),
    }
}

fn escrow_named(defs: &DefinitionFile, name: &str) -> Result<Escrow, String> {
    let o = optic_named(defs, name)?;
    Escrow::new(o.clone())
        .map_err(|_| format!("`{name}` has shape {}, not an escrow shape", o.shape()))
}

// ---- explain ----

pub fn cmd_explain(file: &Path, name: &str) -> Outcome {
    let defs = match load("explain", file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let mut out = String::new();
    match defs.get(name) {
        Some(Definition::Map(f)) => {
            let _ = writeln!(out, "{name}: map {} -> {}", f.dom(), f.cod());
            for line in f.render_table() {
                let _ = writeln!(out, "  {line}");
            }
        }
        Some(d) => match d.as_optic() {
            Some(o) => {
                let _ = writeln!(out, "{name}:");
                out.push_str(&render_optic(o));
            }
            None => {
                return Outcome::invalid(
                    "explain",
                    format!(
                        "`{name}` is a {}; explain takes optics, escrows and maps",
                        d.kind()
                    ),
                )
            }
        },
        None => return Outcome::invalid("explain", format!("undefined name `{name}`")),
    }
    Outcome::new(Status::Ok, format!("explain {name}"), out)
}

// ---- run ----

pub fn cmd_run(file: &Path, scenario: &str, format: TraceFormat) -> Outcome {
    let defs = match load("run", file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let s = match defs.get(scenario) {
        Some(Definition::Scenario(s)) => s,
        Some(d) => {
            return Outcome::invalid(
                "run",
                format!("`{scenario}` is a {}, expected a scenario", d.kind()),
            )
        }
        None => return Outcome::invalid("run", format!("undefined scenario `{scenario}`")),
    };
    let trace = match run(s) {
        Ok(t) => t,
        Err(e) => return Outcome::invalid("run", e),
    };
    let body = match format {
        TraceFormat::Text => trace.to_text(),
        TraceFormat::Json => trace.to_json(),
    };
    let mut settled = trace.settled_parties();
    settled.sort();
    let detail = format!(
        "run {scenario} ({}): settled {{{}}}",
        trace.topology(),
        settled.join(",")
    );
    let status = if trace.is_blocked() {
        Status::Blocked
    } else {
        Status::Ok
    };
    Outcome::new(status, detail, body)
}

// ---- compose ----

/// Picks the unique candidate, or the one named explicitly.
fn choose<T>(
    what: &str,
    wanted: Option<&str>,
    candidates: Vec<(&str, T)>,
    requirement: &str,
) -> Result<T, String> {
    if let Some(w) = wanted {
        return candidates
            .into_iter()
            .find(|(n, _)| *n == w)
            .map(|(_, t)| t)
            .ok_or_else(|| format!("no {what} named `{w}` {requirement}"));
    }
    let names: Vec<&str> = candidates.iter().map(|(n, _)| *n).collect();
    match candidates.len() {
        0 => Err(format!("no {what} {requirement} in the file")),
        1 => Ok(candidates.into_iter().next().expect("one").1),
        _ => Err(format!(
            "several {what}s {requirement} ({}); pick one with --{what}",
            names.join(", ")
        )),
    }
}

fn monoid_on(
    defs: &DefinitionFile,
    c: &TensorObj,
    wanted: Option<&str>,
) -> Result<MonoidStr, String> {
    let cands = defs
        .monoids()
        .filter(|(_, m)| m.carrier() == c)
        .map(|(n, m)| (n, m.clone()))
        .collect();
    choose("monoid", wanted, cands, &format!("on {c}"))
}

fn context(
    defs: &DefinitionFile,
    a: &TensorObj,
    c: &TensorObj,
    b: &TensorObj,
    st: &Structures,
) -> Result<VermittlerCtx, String> {
    let modules: Vec<(&str, ModuleStr)> = defs
        .modules()
        .filter(|(_, m)| m.monoid().carrier() == c && m.carrier() == b)
        .map(|(n, m)| (n, m.clone()))
        .collect();
    let module = choose(
        "module",
        st.module.as_deref(),
        modules,
        &format!("of {c} on {b}"),
    )?;
    let comodules: Vec<(&str, ComoduleStr)> = defs
        .comodules()
        .filter(|(_, m)| m.comonoid().carrier() == a && m.carrier() == b)
        .map(|(n, m)| (n, m.clone()))
        .collect();
    let comodule = match choose(
        "comodule",
        st.comodule.as_deref(),
        comodules,
        &format!("{b} -> {a}"),
    ) {
        Ok(c) => c,
        // a lone map B -> A in the file also serves as the attribute
        Err(e) => {
            let maps: Vec<(&str, FinMap)> = defs
                .entries()
                .iter()
                .filter_map(|(n, d)| match d {
                    Definition::Map(f) if f.dom() == b && f.cod() == a => {
                        Some((n.as_str(), f.clone()))
                    }
                    _ => None,
                })
                .collect();
            if maps.len() != 1 || st.comodule.is_some() {
                return Err(e);
            }
            let attr = maps.into_iter().next().expect("one").1;
            make_comodule(ComonoidStr::new(a.clone()), b.clone(), attr)
                .map_err(|e| e.to_string())?
        }
    };
    VermittlerCtx::new(module, comodule).map_err(|e| e.to_string())
}

enum Composite {
    Done(Box<Optic>),
    Undefined(String),
}

fn compose_pair(
    defs: &DefinitionFile,
    n1: &str,
    n2: &str,
    style: Style,
    st: &Structures,
) -> Result<Composite, String> {
    let done = |r: Result<Optic, Error>| match r {
        Ok(o) => Ok(Composite::Done(Box::new(o))),
        Err(Error::Undefined(msg)) => Ok(Composite::Undefined(msg)),
        Err(e) => Err(e.to_string()),
    };
    match style {
        Style::Diamond => {
            let (k, h) = (escrow_named(defs, n1)?, escrow_named(defs, n2)?);
            done(diamond(&k, &h).map(Escrow::into_optic))
        }
        Style::Seq => {
            let (p, o) = (optic_named(defs, n1)?, optic_named(defs, n2)?);
            done(seq_compose(p, o))
        }
        Style::Emon => {
            let (h, k) = (escrow_named(defs, n1)?, escrow_named(defs, n2)?);
            let monoid = monoid_on(defs, h.right(), st.monoid.as_deref())?;
            let ctx = EscrowMonoidCtx::new(ComonoidStr::new(h.left().clone()), monoid)
                .map_err(|e| e.to_string())?;
            done(emon_product(&ctx, &h, &k).map(Escrow::into_optic))
        }
        Style::Act => {
            let h = escrow_named(defs, n1)?;
            let o = optic_named(defs, n2)?;
            let b = o.shape().inner_left.clone();
            let ctx = context(defs, h.left(), h.right(), &b, st)?;
            done(escrow_act(&ctx, &h, o))
        }
        Style::Vermittler => {
            let h = escrow_named(defs, n1)?;
            let f = optic_named(defs, n2)?;
            // h ∈ ⟨C A⟩, f : (A,C) → (B,B)
            let b = f.shape().outer_left.clone();
            let ctx = context(defs, h.right(), h.left(), &b, st)?;
            done(vermittler_act(&ctx, &h, f).map(|v| v.into_optic()))
        }
    }
}

pub fn cmd_compose(
    file: &Path,
    n1: &str,
    n2: &str,
    style: Style,
    out_path: Option<&Path>,
    structures: &Structures,
) -> Outcome {
    let defs = match load("compose", file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let label = format!("compose {n1} {} {n2}", style.name());
    let result = match compose_pair(&defs, n1, n2, style, structures) {
        Ok(Composite::Done(o)) => *o,
        Ok(Composite::Undefined(msg)) => {
            let out = format!("first difference: {msg}\n");
            return Outcome::new(Status::Undefined, format!("{label}: {msg}"), out);
        }
        Err(msg) => return Outcome::invalid(&label, msg),
    };
    let name = format!("{n1}_{}_{n2}", style.name());
    let mut out = format!("{name}:\n");
    out.push_str(&render_optic(&result));
    let mut notes = Vec::new();
    for (other, def) in defs.entries() {
        if let Some(o) = def.as_optic() {
            if o.shape() == result.shape() && optic_eq(o, &result).unwrap_or(false) {
                let exact = if *o == result {
                    ", identical representative"
                } else {
                    ""
                };
                notes.push(format!("note: equal to {other} (optic_eq{exact})"));
            }
        }
    }
    for n in &notes {
        let _ = writeln!(out, "{n}");
    }
    if let Some(path) = out_path {
        let sh = result.shape();
        let def = if *sh == escrow_shape(&sh.outer_left, &sh.outer_right) {
            Definition::Escrow(Escrow::new(result.clone()).expect("escrow shape"))
        } else {
            Definition::Optic(result.clone())
        };
        let text = serialize(&standalone(&name, def));
        if let Err(e) = std::fs::write(path, text) {
            return Outcome::invalid(&label, format!("cannot write {}: {e}", path.display()));
        }
        let _ = writeln!(out, "wrote {name} to {}", path.display());
    }
    let headline = match notes.first() {
        Some(n) => format!("{label}: {}", n.trim_start_matches("note: ")),
        None => label,
    };
    Outcome::new(Status::Ok, headline, out)
}
