//! The line-oriented definition file format.
//!
//! ```text
//! # comment
//! [set X]
//! elements = 0, 1
//!
//! [map neg]
//! dom = X
//! cod = X
//! 0 -> 1
//! 1 -> 0
//! ```
//!
//! Sections are `set`, `monoid`, `map`, `module`, `comodule`, `optic`,
//! `escrow` and `scenario`. Objects are written `X*Y`, with `I` for the
//! unit. Elements of a product are tuples `(a,b)`. Optic and escrow tables
//! prefix their rows with `fwd` or `bwd`, or name a map: `fwd = f`.
//! Every name must be defined before it is used.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use escrow_core::{
    check_module, check_monoid, escrow_shape, make_comodule, AtomObj, ComoduleStr, ComonoidStr,
    Elem, Escrow, FinMap, ModuleStr, MonoidStr, Named, Optic, OpticShape, Scenario, TensorObj,
    Topology, Witness,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        column,
        message: message.into(),
    })
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Definition {
    Set(AtomObj),
    Monoid(MonoidStr),
    Map(FinMap),
    Module(ModuleStr),
    Comodule(ComoduleStr),
    Optic(Optic),
    Escrow(Escrow),
    Scenario(Scenario),
}

impl Definition {
    pub fn kind(&self) -> &'static str {
        match self {
            Definition::Set(_) => "set",
            Definition::Monoid(_) => "monoid",
            Definition::Map(_) => "map",
            Definition::Module(_) => "module",
            Definition::Comodule(_) => "comodule",
            Definition::Optic(_) => "optic",
            Definition::Escrow(_) => "escrow",
            Definition::Scenario(_) => "scenario",
        }
    }

    /// The optic behind an `optic` or `escrow` definition.
    pub fn as_optic(&self) -> Option<&Optic> {
        match self {
            Definition::Optic(o) => Some(o),
            Definition::Escrow(e) => Some(e.optic()),
            _ => None,
        }
    }
}

/// A fully resolved definition file. Sets live in their own namespace; all
/// other definitions share one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DefinitionFile {
    entries: Vec<(String, Definition)>,
}

impl DefinitionFile {
    pub fn new() -> Self {
        DefinitionFile::default()
    }

    pub fn entries(&self) -> &[(String, Definition)] {
        &self.entries
    }

    pub fn push(&mut self, name: impl Into<String>, def: Definition) {
        self.entries.push((name.into(), def));
    }

    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.entries
            .iter()
            .find(|(n, d)| n == name && !matches!(d, Definition::Set(_)))
            .map(|(_, d)| d)
    }

    pub fn set(&self, name: &str) -> Option<&AtomObj> {
        self.entries.iter().find_map(|(n, d)| match d {
            Definition::Set(a) if n == name => Some(a),
            _ => None,
        })
    }

    pub fn monoids(&self) -> impl Iterator<Item = (&str, &MonoidStr)> {
        self.entries.iter().filter_map(|(n, d)| match d {
            Definition::Monoid(m) => Some((n.as_str(), m)),
            _ => None,
        })
    }

    pub fn modules(&self) -> impl Iterator<Item = (&str, &ModuleStr)> {
        self.entries.iter().filter_map(|(n, d)| match d {
            Definition::Module(m) => Some((n.as_str(), m)),
            _ => None,
        })
    }

    pub fn comodules(&self) -> impl Iterator<Item = (&str, &ComoduleStr)> {
        self.entries.iter().filter_map(|(n, d)| match d {
            Definition::Comodule(m) => Some((n.as_str(), m)),
            _ => None,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn parse_definition_file(path: &Path) -> Result<DefinitionFile, ParseError> {
    let text = std::fs::read_to_string(path)
        .or_else(|e| err(0, 0, format!("cannot read {}: {e}", path.display())))?;
    parse_definitions(&text)
}

// ---- lexing ----

#[derive(Debug)]
enum Item {
    Pair {
        key: String,
        value: String,
        value_col: usize,
    },
    Row {
        prefix: Option<String>,
        lhs: String,
        lhs_col: usize,
        rhs: String,
        rhs_col: usize,
    },
}

#[derive(Debug)]
struct Located {
    line: usize,
    col: usize,
    item: Item,
}

#[derive(Debug)]
struct Section {
    kind: String,
    name: String,
    line: usize,
    name_col: usize,
    items: Vec<Located>,
}

const KINDS: [&str; 8] = [
    "set", "monoid", "map", "module", "comodule", "optic", "escrow", "scenario",
];

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '\'' | '.'))
}

/// Removes all whitespace; element labels never contain any.
fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn lex(text: &str) -> Result<Vec<Section>, ParseError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = body.len() - body.trim_start().len() + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(inner) = rest.strip_suffix(']') else {
                return err(
                    line,
                    col + trimmed.len(),
                    "expected `]` closing the section header",
                );
            };
            let mut words = inner.split_whitespace();
            let (Some(kind), Some(name), None) = (words.next(), words.next(), words.next()) else {
                return err(line, col + 1, "expected `[kind name]`");
            };
            if !KINDS.contains(&kind) {
                return err(
                    line,
                    col + 1,
                    format!(
                        "unknown section kind `{kind}`; expected one of {}",
                        KINDS.join(", ")
                    ),
                );
            }
            let name_col = col + 1 + inner.find(name).unwrap_or(0);
            if !valid_name(name) {
                return err(line, name_col, format!("invalid name `{name}`"));
            }
            sections.push(Section {
                kind: kind.to_string(),
                name: name.to_string(),
                line,
                name_col,
                items: Vec::new(),
            });
            continue;
        }
        let Some(section) = sections.last_mut() else {
            return err(
                line,
                col,
                "expected a section header `[kind name]` before any entry",
            );
        };
        let item = if let Some(arrow) = trimmed.find("->") {
            let (left, right) = (&trimmed[..arrow], &trimmed[arrow + 2..]);
            let mut prefix = None;
            let mut lhs = left.trim();
            let mut lhs_off = left.len() - left.trim_start().len();
            if let Some((word, rest)) = lhs.split_once(char::is_whitespace) {
                if (word == "fwd" || word == "bwd") && !rest.trim().is_empty() {
                    prefix = Some(word.to_string());
                    lhs_off += word.len() + (rest.len() - rest.trim_start().len()) + 1;
                    lhs = rest.trim();
                }
            }
            if lhs.is_empty() {
                return err(line, col, "expected an element before `->`");
            }
            if right.trim().is_empty() {
                return err(line, col + arrow + 2, "expected an element after `->`");
            }
            Item::Row {
                prefix,
                lhs: squash(lhs),
                lhs_col: col + lhs_off,
                rhs: squash(right),
                rhs_col: col + arrow + 2 + (right.len() - right.trim_start().len()),
            }
        } else if let Some(eq) = trimmed.find('=') {
            let key = trimmed[..eq].trim();
            let value = &trimmed[eq + 1..];
            if !valid_name(key) {
                return err(line, col, format!("invalid key `{key}`"));
            }
            Item::Pair {
                key: key.to_string(),
                value: value.trim().to_string(),
                value_col: col + eq + 1 + (value.len() - value.trim_start().len()),
            }
        } else {
            return err(
                line,
                col,
                "expected `key = value`, a table row `x -> y`, or a section header",
            );
        };
        section.items.push(Located { line, col, item });
    }
    Ok(sections)
}

// ---- resolution ----

struct Pairs<'a> {
    section: &'a Section,
    pairs: HashMap<&'a str, (&'a str, usize, usize)>,
}

impl<'a> Pairs<'a> {
    fn new(section: &'a Section, allowed: &[&str]) -> Result<Self, ParseError> {
        let mut pairs = HashMap::new();
        for loc in &section.items {
            if let Item::Pair {
                key,
                value,
                value_col,
            } = &loc.item
            {
                if !allowed.contains(&key.as_str()) {
                    return err(
                        loc.line,
                        loc.col,
                        format!(
                            "unknown key `{key}` in {} section; expected one of {}",
                            section.kind,
                            allowed.join(", ")
                        ),
                    );
                }
                if pairs
                    .insert(key.as_str(), (value.as_str(), loc.line, *value_col))
                    .is_some()
                {
                    return err(loc.line, loc.col, format!("duplicate key `{key}`"));
                }
            }
        }
        Ok(Pairs { section, pairs })
    }

    fn optional(&self, key: &str) -> Option<(&'a str, usize, usize)> {
        self.pairs.get(key).copied()
    }

    fn required(&self, key: &str) -> Result<(&'a str, usize, usize), ParseError> {
        self.optional(key).map_or_else(
            || {
                err(
                    self.section.line,
                    self.section.name_col,
                    format!(
                        "{} {} is missing `{key} = ...`",
                        self.section.kind, self.section.name
                    ),
                )
            },
            Ok,
        )
    }
}

/// Splits on commas outside parentheses.
fn split_list(value: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in value.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(squash(&cur));
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(squash(&cur));
    }
    out
}

struct Resolver {
    file: DefinitionFile,
    sets: HashSet<String>,
    values: HashSet<String>,
}

impl Resolver {
    fn object(&self, text: &str, line: usize, col: usize) -> Result<TensorObj, ParseError> {
        let text = squash(text);
        if text == "I" {
            return Ok(TensorObj::unit());
        }
        let mut factors = Vec::new();
        for part in text.split('*') {
            match self.file.set(part) {
                Some(a) => factors.push(a.clone()),
                None if part.is_empty() => return err(line, col, "expected a set name in object"),
                None => return err(line, col, format!("undefined set `{part}`")),
            }
        }
        Ok(TensorObj::from_factors(factors))
    }

    fn element(
        &self,
        obj: &TensorObj,
        text: &str,
        line: usize,
        col: usize,
    ) -> Result<Elem, ParseError> {
        obj.parse_element(text).map_or_else(
            || err(line, col, format!("`{text}` is not an element of {obj}")),
            Ok,
        )
    }

    fn value(&self, name: &str, line: usize, col: usize) -> Result<&Definition, ParseError> {
        self.file
            .get(name)
            .map_or_else(|| err(line, col, format!("undefined name `{name}`")), Ok)
    }

    fn map_ref(
        &self,
        name: &str,
        dom: &TensorObj,
        cod: &TensorObj,
        line: usize,
        col: usize,
    ) -> Result<FinMap, ParseError> {
        match self.value(name, line, col)? {
            Definition::Map(f) if f.dom() == dom && f.cod() == cod => Ok(f.clone()),
            Definition::Map(f) => err(
                line,
                col,
                format!(
                    "map `{name}` is {} -> {}, expected {dom} -> {cod}",
                    f.dom(),
                    f.cod()
                ),
            ),
            other => err(
                line,
                col,
                format!("`{name}` is a {}, expected a map", other.kind()),
            ),
        }
    }

    /// Collects the rows with the given prefix into a total table.
    fn table(
        &self,
        section: &Section,
        prefix: Option<&str>,
        dom: &TensorObj,
        cod: &TensorObj,
    ) -> Result<FinMap, ParseError> {
        let what = match prefix {
            Some(p) => format!("{p} table of {} {}", section.kind, section.name),
            None => format!("table of {} {}", section.kind, section.name),
        };
        let mut table: Vec<Option<Elem>> = vec![None; dom.size()];
        for loc in &section.items {
            let Item::Row {
                prefix: p,
                lhs,
                lhs_col,
                rhs,
                rhs_col,
            } = &loc.item
            else {
                continue;
            };
            if p.as_deref() != prefix {
                continue;
            }
            let x = self.element(dom, lhs, loc.line, *lhs_col)?;
            let y = self.element(cod, rhs, loc.line, *rhs_col)?;
            if table[x].is_some() {
                return err(
                    loc.line,
                    *lhs_col,
                    format!("duplicate row for `{lhs}` in {what}"),
                );
            }
            table[x] = Some(y);
        }
        if let Some(missing) = table.iter().position(Option::is_none) {
            return err(
                section.line,
                section.name_col,
                format!("{what} has no row for `{}`", dom.render(missing)),
            );
        }
        let table: Vec<Elem> = table.into_iter().map(|v| v.expect("checked")).collect();
        Ok(FinMap::new(dom.clone(), cod.clone(), table).expect("rows checked against boundaries"))
    }

    fn no_rows(&self, section: &Section, allowed: &[Option<&str>]) -> Result<(), ParseError> {
        for loc in &section.items {
            if let Item::Row { prefix, .. } = &loc.item {
                if !allowed.contains(&prefix.as_deref()) {
                    let msg = match prefix {
                        Some(p) => format!("{} sections take no `{p}` rows", section.kind),
                        None if allowed.is_empty() => {
                            format!("{} sections take no table rows", section.kind)
                        }
                        None => "table rows here must start with `fwd` or `bwd`".to_string(),
                    };
                    return err(loc.line, loc.col, msg);
                }
            }
        }
        Ok(())
    }

    /// `fwd = name` or inline `fwd` rows.
    fn component(
        &self,
        section: &Section,
        pairs: &Pairs<'_>,
        which: &str,
        dom: &TensorObj,
        cod: &TensorObj,
    ) -> Result<FinMap, ParseError> {
        let has_rows = section
            .items
            .iter()
            .any(|l| matches!(&l.item, Item::Row { prefix: Some(p), .. } if p == which));
        match pairs.optional(which) {
            Some((_, line, col)) if has_rows => err(
                line,
                col,
                format!("`{which}` is given both by name and by rows"),
            ),
            Some((name, line, col)) => self.map_ref(name, dom, cod, line, col),
            None => self.table(section, Some(which), dom, cod),
        }
    }

    fn resolve(&mut self, s: &Section) -> Result<Definition, ParseError> {
        match s.kind.as_str() {
            "set" => {
                let p = Pairs::new(s, &["elements"])?;
                self.no_rows(s, &[])?;
                let (value, line, col) = p.required("elements")?;
                if s.name == "I" {
                    return err(s.line, s.name_col, "`I` is reserved for the unit object");
                }
                let labels = split_list(value);
                AtomObj::new(s.name.clone(), labels)
                    .map(Definition::Set)
                    .or_else(|e| err(line, col, e.to_string()))
            }
            "monoid" => {
                let p = Pairs::new(s, &["carrier", "unit"])?;
                self.no_rows(s, &[None])?;
                let (carrier, line, col) = p.required("carrier")?;
                let c = self.object(carrier, line, col)?;
                let (unit, uline, ucol) = p.required("unit")?;
                let e = self.element(&c, &squash(unit), uline, ucol)?;
                let mult = self.table(s, None, &c.tensor(&c), &c)?;
                let m = MonoidStr::new(c.clone(), mult, e)
                    .or_else(|e| err(s.line, s.name_col, e.to_string()))?;
                if let Some(v) = check_monoid(&m).first() {
                    let r = |x: Elem| c.render(x);
                    let msg = match v {
                        escrow_core::MonoidViolation::LeftUnit { x, got } => {
                            format!("left unit law fails at {}: got {}", r(*x), r(*got))
                        }
                        escrow_core::MonoidViolation::RightUnit { x, got } => {
                            format!("right unit law fails at {}: got {}", r(*x), r(*got))
                        }
                        escrow_core::MonoidViolation::Associativity { x, y, z } => {
                            format!("associativity fails at ({}, {}, {})", r(*x), r(*y), r(*z))
                        }
                    };
                    return err(s.line, s.name_col, format!("monoid {}: {msg}", s.name));
                }
                Ok(Definition::Monoid(m))
            }
            "map" => {
                let p = Pairs::new(s, &["dom", "cod"])?;
                self.no_rows(s, &[None])?;
                let (dom, line, col) = p.required("dom")?;
                let dom = self.object(dom, line, col)?;
                let (cod, line, col) = p.required("cod")?;
                let cod = self.object(cod, line, col)?;
                Ok(Definition::Map(self.table(s, None, &dom, &cod)?))
            }
            "module" => {
                let p = Pairs::new(s, &["monoid", "carrier"])?;
                self.no_rows(s, &[None])?;
                let (mname, line, col) = p.required("monoid")?;
                let monoid = match self.value(mname, line, col)? {
                    Definition::Monoid(m) => m.clone(),
                    other => {
                        return err(
                            line,
                            col,
                            format!("`{mname}` is a {}, expected a monoid", other.kind()),
                        )
                    }
                };
                let (carrier, line, col) = p.required("carrier")?;
                let b = self.object(carrier, line, col)?;
                let action = self.table(s, None, &monoid.carrier().tensor(&b), &b)?;
                let m = ModuleStr::new(monoid.clone(), b.clone(), action)
                    .or_else(|e| err(s.line, s.name_col, e.to_string()))?;
                if let Some(v) = check_module(&m).first() {
                    let (c, r) = (monoid.carrier(), |x: Elem| b.render(x));
                    let msg = match v {
                        escrow_core::ModuleViolation::Unit { b: x, got } => {
                            format!("unit law fails at {}: got {}", r(*x), r(*got))
                        }
                        escrow_core::ModuleViolation::Associativity { x, y, b: z } => format!(
                            "action associativity fails at ({}, {}, {})",
                            c.render(*x),
                            c.render(*y),
                            r(*z)
                        ),
                    };
                    return err(s.line, s.name_col, format!("module {}: {msg}", s.name));
                }
                Ok(Definition::Module(m))
            }
            "comodule" => {
                let p = Pairs::new(s, &["comonoid", "carrier"])?;
                self.no_rows(s, &[None])?;
                let (a, line, col) = p.required("comonoid")?;
                let a = self.object(a, line, col)?;
                let (b, line, col) = p.required("carrier")?;
                let b = self.object(b, line, col)?;
                let attr = self.table(s, None, &b, &a)?;
                make_comodule(ComonoidStr::new(a), b, attr)
                    .map(Definition::Comodule)
                    .or_else(|e| err(s.line, s.name_col, e.to_string()))
            }
            "optic" => {
                let p = Pairs::new(s, &["outer", "inner", "residual", "fwd", "bwd"])?;
                self.no_rows(s, &[Some("fwd"), Some("bwd")])?;
                let (outer, line, col) = p.required("outer")?;
                let [so, to] = self.object_pair(outer, line, col)?;
                let (inner, line, col) = p.required("inner")?;
                let [a, b] = self.object_pair(inner, line, col)?;
                let (res, line, col) = p.required("residual")?;
                let m = self.object(res, line, col)?;
                let fwd = self.component(s, &p, "fwd", &so, &m.tensor(&a))?;
                let bwd = self.component(s, &p, "bwd", &m.tensor(&b), &to)?;
                Optic::new(OpticShape::new(a, b, so, to), m, fwd, bwd)
                    .map(Definition::Optic)
                    .or_else(|e| err(s.line, s.name_col, e.to_string()))
            }
            "escrow" => {
                let p = Pairs::new(s, &["left", "right", "residual", "fwd", "bwd"])?;
                self.no_rows(s, &[Some("fwd"), Some("bwd")])?;
                let (x, line, col) = p.required("left")?;
                let x = self.object(x, line, col)?;
                let (y, line, col) = p.required("right")?;
                let y = self.object(y, line, col)?;
                let (res, line, col) = p.required("residual")?;
                let m = self.object(res, line, col)?;
                let fwd = self.component(s, &p, "fwd", &x, &m.tensor(&y))?;
                let bwd = self.component(s, &p, "bwd", &m.tensor(&x), &y)?;
                Escrow::from_maps(&x, &y, m, fwd, bwd)
                    .map(Definition::Escrow)
                    .or_else(|e| err(s.line, s.name_col, e.to_string()))
            }
            "scenario" => self.scenario(s),
            other => unreachable!("kind {other} rejected by the lexer"),
        }
    }

    fn object_pair(
        &self,
        value: &str,
        line: usize,
        col: usize,
    ) -> Result<[TensorObj; 2], ParseError> {
        let parts = split_list(value);
        if parts.len() != 2 {
            return err(line, col, "expected two objects `S, T`");
        }
        Ok([
            self.object(&parts[0], line, col)?,
            self.object(&parts[1], line, col)?,
        ])
    }

    fn scenario(&self, s: &Section) -> Result<Definition, ParseError> {
        let p = Pairs::new(
            s,
            &[
                "topology",
                "parties",
                "escrows",
                "witnesses",
                "absent",
                "initial",
            ],
        )?;
        self.no_rows(s, &[])?;
        let (topo, line, col) = p.required("topology")?;
        let topology: Topology = topo.parse().or_else(|_| {
            err(
                line,
                col,
                format!("unknown topology `{topo}`; expected greedy, kind or mediated"),
            )
        })?;
        let parties: [String; 3] = match p.optional("parties") {
            None => ["A".into(), "B".into(), "C".into()],
            Some((v, line, col)) => {
                let names = split_list(v);
                match <[String; 3]>::try_from(names) {
                    Ok(names) if names.iter().all(|n| valid_name(n)) => names,
                    _ => return err(line, col, "expected three party names"),
                }
            }
        };
        let (esc, line, col) = p.required("escrows")?;
        let names = split_list(esc);
        if names.len() != 2 {
            return err(line, col, "expected two escrow names");
        }
        let mut optics = Vec::new();
        for n in &names {
            match self.value(n, line, col)?.as_optic() {
                Some(o) => optics.push(Named::new(n.clone(), o.clone())),
                None => {
                    let kind = self.value(n, line, col)?.kind();
                    return err(
                        line,
                        col,
                        format!("`{n}` is a {kind}, expected an escrow or optic"),
                    );
                }
            }
        }
        let (wit, wline, wcol) = p.required("witnesses")?;
        let wnames = split_list(wit);
        if wnames.len() != 2 {
            return err(wline, wcol, "expected two witness names");
        }
        let absent: Vec<String> = match p.optional("absent") {
            None => Vec::new(),
            Some((v, line, col)) => {
                let list = split_list(v);
                if let Some(bad) = list.iter().find(|n| !wnames.contains(n)) {
                    return err(
                        line,
                        col,
                        format!("`{bad}` is not one of this scenario's witnesses"),
                    );
                }
                list
            }
        };
        let mut witnesses = Vec::new();
        for n in &wnames {
            let map = match self.value(n, wline, wcol)? {
                Definition::Map(f) => f.clone(),
                other => {
                    return err(
                        wline,
                        wcol,
                        format!("witness `{n}` is a {}, expected a map", other.kind()),
                    )
                }
            };
            witnesses.push(Witness {
                name: n.clone(),
                map,
                present: !absent.contains(n),
            });
        }
        let [first, second]: [Named<Optic>; 2] = optics.try_into().expect("two escrows");
        let [w1, w2]: [Witness; 2] = witnesses.try_into().expect("two witnesses");
        let (init, iline, icol) = p.required("initial")?;
        let init_parts = split_list(init);
        let a_obj = first.value.shape().outer_left.clone();
        let objects = match topology {
            Topology::Mediated => vec![a_obj, second.value.shape().outer_left.clone()],
            _ => vec![a_obj],
        };
        if init_parts.len() != objects.len() {
            return err(
                iline,
                icol,
                format!(
                    "{topology} scenarios take {} initial element(s)",
                    objects.len()
                ),
            );
        }
        let initial = init_parts
            .iter()
            .zip(&objects)
            .map(|(t, o)| self.element(o, t, iline, icol))
            .collect::<Result<Vec<_>, _>>()?;
        Scenario::new(
            s.name.clone(),
            parties,
            topology,
            first,
            second,
            w1,
            w2,
            initial,
        )
        .map(Definition::Scenario)
        .or_else(|e| err(s.line, s.name_col, e.to_string()))
    }
}

pub fn parse_definitions(text: &str) -> Result<DefinitionFile, ParseError> {
    let sections = lex(text)?;
    let mut r = Resolver {
        file: DefinitionFile::new(),
        sets: HashSet::new(),
        values: HashSet::new(),
    };
    for s in &sections {
        let fresh = if s.kind == "set" {
            r.sets.insert(s.name.clone())
        } else {
            r.values.insert(s.name.clone())
        };
        if !fresh {
            return err(s.line, s.name_col, format!("`{}` is defined twice", s.name));
        }
        let def = r.resolve(s)?;
        r.file.push(s.name.clone(), def);
    }
    Ok(r.file)
}

// ---- serialization ----

fn rows(out: &mut String, prefix: &str, f: &FinMap) {
    for x in f.dom().elements() {
        let _ = writeln!(
            out,
            "{prefix}{} -> {}",
            f.dom().render(x),
            f.cod().render(f.apply(x))
        );
    }
}

fn obj(o: &TensorObj) -> String {
    o.to_string()
}

/// Writes a file that parses back to an equal [`DefinitionFile`]. Tables
/// are always written inline; modules and scenarios refer to earlier
/// definitions by name.
pub fn serialize(file: &DefinitionFile) -> String {
    let mut out = String::new();
    let name_of = |target: &Definition| -> String {
        file.entries
            .iter()
            .find(|(_, d)| d == target)
            .map(|(n, _)| n.clone())
            .unwrap_or_else(|| "?".into())
    };
    let optic_name = |o: &Named<Optic>| o.name.clone();
    for (i, (name, def)) in file.entries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "[{} {name}]", def.kind());
        match def {
            Definition::Set(a) => {
                let _ = writeln!(out, "elements = {}", a.elements().join(", "));
            }
            Definition::Monoid(m) => {
                let c = m.carrier();
                let _ = writeln!(out, "carrier = {}", obj(c));
                let _ = writeln!(out, "unit = {}", c.render(m.unit()));
                rows(&mut out, "", m.mult_map());
            }
            Definition::Map(f) => {
                let _ = writeln!(out, "dom = {}", obj(f.dom()));
                let _ = writeln!(out, "cod = {}", obj(f.cod()));
                rows(&mut out, "", f);
            }
            Definition::Module(m) => {
                let _ = writeln!(
                    out,
                    "monoid = {}",
                    name_of(&Definition::Monoid(m.monoid().clone()))
                );
                let _ = writeln!(out, "carrier = {}", obj(m.carrier()));
                rows(&mut out, "", m.action_map());
            }
            Definition::Comodule(c) => {
                let _ = writeln!(out, "comonoid = {}", obj(c.comonoid().carrier()));
                let _ = writeln!(out, "carrier = {}", obj(c.carrier()));
                rows(&mut out, "", c.attr_map());
            }
            Definition::Optic(o) => {
                let sh = o.shape();
                let _ = writeln!(
                    out,
                    "outer = {}, {}",
                    obj(&sh.outer_left),
                    obj(&sh.outer_right)
                );
                let _ = writeln!(
                    out,
                    "inner = {}, {}",
                    obj(&sh.inner_left),
                    obj(&sh.inner_right)
                );
                let _ = writeln!(out, "residual = {}", obj(o.residual()));
                rows(&mut out, "fwd ", o.fwd());
                rows(&mut out, "bwd ", o.bwd());
            }
            Definition::Escrow(e) => {
                let _ = writeln!(out, "left = {}", obj(e.left()));
                let _ = writeln!(out, "right = {}", obj(e.right()));
                let _ = writeln!(out, "residual = {}", obj(e.residual()));
                rows(&mut out, "fwd ", e.lock());
                rows(&mut out, "bwd ", e.unlock());
            }
            Definition::Scenario(s) => {
                let _ = writeln!(out, "topology = {}", s.topology());
                let _ = writeln!(out, "parties = {}", s.parties().join(", "));
                let _ = writeln!(
                    out,
                    "escrows = {}, {}",
                    optic_name(s.first()),
                    optic_name(s.second())
                );
                let _ = writeln!(out, "witnesses = {}, {}", s.w1().name, s.w2().name);
                let absent: Vec<&str> = [s.w1(), s.w2()]
                    .into_iter()
                    .filter(|w| !w.present)
                    .map(|w| w.name.as_str())
                    .collect();
                if !absent.is_empty() {
                    let _ = writeln!(out, "absent = {}", absent.join(", "));
                }
                let (a, b, _) = s.party_objects();
                let mut init = vec![a.render(s.initial()[0])];
                if s.topology() == Topology::Mediated {
                    init.push(b.render(s.initial()[1]));
                }
                let _ = writeln!(out, "initial = {}", init.join(", "));
            }
        }
    }
    out
}

/// A file holding `def` under `name`, preceded by every set it mentions.
pub fn standalone(name: &str, def: Definition) -> DefinitionFile {
    let mut objects: Vec<TensorObj> = Vec::new();
    match &def {
        Definition::Optic(o) => {
            let sh = o.shape();
            objects.extend([
                sh.outer_left.clone(),
                sh.outer_right.clone(),
                sh.inner_left.clone(),
                sh.inner_right.clone(),
                o.residual().clone(),
            ]);
        }
        Definition::Escrow(e) => {
            objects.extend([e.left().clone(), e.right().clone(), e.residual().clone()]);
        }
        Definition::Map(f) => objects.extend([f.dom().clone(), f.cod().clone()]),
        Definition::Set(_) => {}
        _ => panic!("standalone takes sets, maps, optics and escrows"),
    }
    let mut file = DefinitionFile::new();
    let mut seen = HashSet::new();
    for o in &objects {
        for a in o.factors() {
            if seen.insert(a.name().to_string()) {
                file.push(a.name(), Definition::Set(a.clone()));
            }
        }
    }
    file.push(name, def);
    file
}

/// `escrow <X Y>` when the shape is an escrow shape, else the optic shape.
pub fn describe_shape(o: &Optic) -> String {
    let sh = o.shape();
    if *sh == escrow_shape(&sh.outer_left, &sh.outer_right) {
        format!("escrow <{} {}>", sh.outer_left, sh.outer_right)
    } else {
        format!("optic {sh}")
    }
}
