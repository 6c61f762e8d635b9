//! Settlement semantics for three trade topologies between a buyer `A`, an
//! intermediary `B` and a seller `C`.
//!
//! * greedy: the chained escrows settle through the diamond composite, so
//!   `B` is paid before `C` and nobody is paid unless both witnesses exist;
//! * kind: `B` pays `C` as soon as `C` delivers, then settles with `A`;
//!   the witness `C → B` is used twice;
//! * mediated: the composite witness fills both the main escrow `A → C` and
//!   `B`'s collateral comb.
//!
//! Failures are modelled by marking witnesses absent.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::escrow::{escrow_shape, Escrow};
use crate::map::FinMap;
use crate::object::{pair, unpair, Elem, TensorObj};
use crate::optic::{Optic, OpticShape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Greedy,
    Kind,
    Mediated,
}

impl Topology {
    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Greedy => "greedy",
            Topology::Kind => "kind",
            Topology::Mediated => "mediated",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Topology::Greedy),
            "kind" => Ok(Topology::Kind),
            "mediated" => Ok(Topology::Mediated),
            other => Err(Error::Scenario(format!("unknown topology {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Named<T> {
    pub name: String,
    pub value: T,
}

impl<T> Named<T> {
    pub fn new(name: impl Into<String>, value: T) -> Self {
        Named {
            name: name.into(),
            value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub name: String,
    pub map: FinMap,
    pub present: bool,
}

/// A validated trade.
///
/// For greedy and kind, `first = k ∈ ⟨A B⟩` and `second = h ∈ ⟨B C⟩`.
/// For mediated, `first = h ∈ ⟨A C⟩` and `second = f`, a comb
/// `(C,A) → (B,B)`. In every topology `w1 : C → B` and `w2 : B → A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    name: String,
    parties: [String; 3],
    topology: Topology,
    first: Named<Optic>,
    second: Named<Optic>,
    w1: Witness,
    w2: Witness,
    initial: Vec<Elem>,
}

fn check_map(w: &FinMap, dom: &TensorObj, cod: &TensorObj, what: &str) -> Result<()> {
    if w.dom() != dom || w.cod() != cod {
        return Err(Error::Scenario(format!(
            "{what} must be {dom} -> {cod}, found {} -> {}",
            w.dom(),
            w.cod()
        )));
    }
    Ok(())
}

impl Scenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        parties: [String; 3],
        topology: Topology,
        first: Named<Optic>,
        second: Named<Optic>,
        w1: Witness,
        w2: Witness,
        initial: Vec<Elem>,
    ) -> Result<Self> {
        let s = Scenario {
            name: name.into(),
            parties,
            topology,
            first,
            second,
            w1,
            w2,
            initial,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let scen = |msg: String| Error::Scenario(format!("{}: {msg}", self.name));
        let (a, b, c) = self.party_objects();
        match self.topology {
            Topology::Greedy | Topology::Kind => {
                let k = &self.first;
                let h = &self.second;
                if k.value.shape() != &escrow_shape(&a, &b) {
                    return Err(scen(format!("{} is not an escrow <A B>", k.name)));
                }
                if h.value.shape() != &escrow_shape(&b, &c) {
                    return Err(scen(format!(
                        "{} must be an escrow <{b} {c}>, found {}",
                        h.name,
                        h.value.shape()
                    )));
                }
                if self.initial.len() != 1 {
                    return Err(scen("expects one initial element".into()));
                }
            }
            Topology::Mediated => {
                let h = &self.first;
                let f = &self.second;
                if h.value.shape() != &escrow_shape(&a, &c) {
                    return Err(scen(format!("{} is not an escrow <A C>", h.name)));
                }
                let want = OpticShape::new(c.clone(), a.clone(), b.clone(), b.clone());
                if f.value.shape() != &want {
                    return Err(scen(format!(
                        "collateral comb {} must have shape {want}, found {}",
                        f.name,
                        f.value.shape()
                    )));
                }
                if self.initial.len() != 2 {
                    return Err(scen("expects initial elements for A and B".into()));
                }
                if self.initial[1] >= b.size() {
                    return Err(scen("initial element of B out of range".into()));
                }
            }
        }
        if self.initial[0] >= a.size() {
            return Err(scen("initial element of A out of range".into()));
        }
        check_map(&self.w1.map, &c, &b, &format!("witness {}", self.w1.name))
            .map_err(|e| scen(e.to_string()))?;
        check_map(&self.w2.map, &b, &a, &format!("witness {}", self.w2.name))
            .map_err(|e| scen(e.to_string()))?;
        Ok(())
    }

    /// Value spaces of `A`, `B`, `C`.
    pub fn party_objects(&self) -> (TensorObj, TensorObj, TensorObj) {
        let s1 = self.first.value.shape();
        let s2 = self.second.value.shape();
        match self.topology {
            Topology::Greedy | Topology::Kind => (
                s1.outer_left.clone(),
                s1.outer_right.clone(),
                s2.outer_right.clone(),
            ),
            Topology::Mediated => (
                s1.outer_left.clone(),
                s2.outer_left.clone(),
                s1.outer_right.clone(),
            ),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parties(&self) -> &[String; 3] {
        &self.parties
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn first(&self) -> &Named<Optic> {
        &self.first
    }

    pub fn second(&self) -> &Named<Optic> {
        &self.second
    }

    pub fn w1(&self) -> &Witness {
        &self.w1
    }

    pub fn w2(&self) -> &Witness {
        &self.w2
    }

    pub fn initial(&self) -> &[Elem] {
        &self.initial
    }

    /// Same data with the witnesses' presence overridden.
    pub fn with_presence(&self, w1: bool, w2: bool) -> Scenario {
        let mut s = self.clone();
        s.w1.present = w1;
        s.w2.present = w2;
        s
    }

    /// Same data under another topology (greedy and kind share boundaries).
    pub fn with_topology(&self, topology: Topology) -> Result<Scenario> {
        let mut s = self.clone();
        s.topology = topology;
        s.validate()?;
        Ok(s)
    }

    fn first_missing(&self) -> Option<&str> {
        [&self.w1, &self.w2]
            .into_iter()
            .find(|w| !w.present)
            .map(|w| w.name.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Lock {
        party: String,
        escrow: String,
        residual: String,
    },
    Request {
        from: String,
        to: String,
        value: String,
    },
    Deliver {
        witness: String,
        value: String,
    },
    Settle {
        party: String,
        escrow: String,
        value: String,
        #[serde(skip)]
        index: Elem,
    },
    Blocked {
        escrow: String,
        missing: String,
    },
}

impl Event {
    /// Tab-separated fields, kind first.
    pub fn to_line(&self) -> String {
        let fields: Vec<&str> = match self {
            Event::Lock {
                party,
                escrow,
                residual,
            } => vec!["lock", party, escrow, residual],
            Event::Request { from, to, value } => vec!["request", from, to, value],
            Event::Deliver { witness, value } => vec!["deliver", witness, value],
            Event::Settle {
                party,
                escrow,
                value,
                ..
            } => vec!["settle", party, escrow, value],
            Event::Blocked { escrow, missing } => vec!["blocked", escrow, missing],
        };
        fields.join("\t")
    }
}

/// Events of one run, in causal order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SettlementTrace {
    topology: Topology,
    parties: [String; 3],
    events: Vec<Event>,
}

impl SettlementTrace {
    /// Checks the ordering invariants before accepting the events.
    pub fn new(topology: Topology, parties: [String; 3], events: Vec<Event>) -> Result<Self> {
        let t = SettlementTrace {
            topology,
            parties,
            events,
        };
        t.check_order()?;
        Ok(t)
    }

    fn check_order(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Scenario(format!("trace order violated: {m}")));
        for (i, ev) in self.events.iter().enumerate() {
            if let Event::Settle { escrow, .. } = ev {
                let before = &self.events[..i];
                let locked = before
                    .iter()
                    .any(|e| matches!(e, Event::Lock { escrow: x, .. } if x == escrow));
                if !locked {
                    return bad(format!("settle of {escrow} before its lock"));
                }
                if !before.iter().any(|e| matches!(e, Event::Deliver { .. })) {
                    return bad(format!("settle of {escrow} before any delivery"));
                }
                let blocked = self
                    .events
                    .iter()
                    .any(|e| matches!(e, Event::Blocked { escrow: x, .. } if x == escrow));
                if blocked {
                    return bad(format!("{escrow} both settled and blocked"));
                }
            }
        }
        let pos = |p: &str| {
            self.events
                .iter()
                .position(|e| matches!(e, Event::Settle { party, .. } if party == p))
        };
        if let (Some(b), Some(c)) = (pos(&self.parties[1]), pos(&self.parties[2])) {
            match self.topology {
                Topology::Greedy if b > c => return bad("greedy settles C before B".into()),
                Topology::Kind if c > b => return bad("kind settles B before C".into()),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn is_blocked(&self) -> bool {
        self.events
            .iter()
            .any(|e| matches!(e, Event::Blocked { .. }))
    }

    /// Parties that settle, in trace order.
    pub fn settled_parties(&self) -> Vec<String> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::Settle { party, .. } => Some(party.clone()),
                _ => None,
            })
            .collect()
    }

    /// Element index paid to `party`, if it settles.
    pub fn settlement(&self, party: &str) -> Option<Elem> {
        self.events.iter().find_map(|e| match e {
            Event::Settle {
                party: p, index, ..
            } if p == party => Some(*index),
            _ => None,
        })
    }

    /// One event per line, fields separated by tabs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&e.to_line());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.events).expect("events serialize");
        s.push('\n');
        s
    }
}

struct Recorder<'a> {
    s: &'a Scenario,
    events: Vec<Event>,
}

impl<'a> Recorder<'a> {
    fn new(s: &'a Scenario) -> Self {
        Recorder {
            s,
            events: Vec::new(),
        }
    }

    fn party(&self, i: usize) -> String {
        self.s.parties[i].clone()
    }

    fn lock(&mut self, party: usize, escrow: &str, obj: &TensorObj, m: Elem) {
        self.events.push(Event::Lock {
            party: self.party(party),
            escrow: escrow.to_string(),
            residual: obj.render(m),
        });
    }

    fn request(&mut self, from: usize, to: usize, obj: &TensorObj, v: Elem) {
        self.events.push(Event::Request {
            from: self.party(from),
            to: self.party(to),
            value: obj.render(v),
        });
    }

    fn deliver(&mut self, w: &Witness, input: Elem) -> Elem {
        let out = w.map.apply(input);
        self.events.push(Event::Deliver {
            witness: w.name.clone(),
            value: w.map.cod().render(out),
        });
        out
    }

    fn settle(&mut self, party: usize, escrow: &str, obj: &TensorObj, v: Elem) {
        self.events.push(Event::Settle {
            party: self.party(party),
            escrow: escrow.to_string(),
            value: obj.render(v),
            index: v,
        });
    }

    fn blocked(&mut self, escrow: &str, missing: &str) {
        self.events.push(Event::Blocked {
            escrow: escrow.to_string(),
            missing: missing.to_string(),
        });
    }

    fn finish(self) -> Result<SettlementTrace> {
        SettlementTrace::new(self.s.topology, self.s.parties.clone(), self.events)
    }
}

struct ChainState {
    n: Elem,
    m: Elem,
    c_req: Elem,
}

/// Shared opening of the two chain topologies: both escrows lock, `A`
/// requests from `B`, `B` requests from `C`.
fn open_chain(s: &Scenario, rec: &mut Recorder<'_>) -> ChainState {
    let (k, h) = (&s.first, &s.second);
    let (_, b_obj, c_obj) = s.party_objects();
    let (n, b_req) = unpair(k.value.fwd().apply(s.initial[0]), b_obj.size());
    let (m, c_req) = unpair(h.value.fwd().apply(b_req), c_obj.size());
    rec.lock(0, &k.name, k.value.residual(), n);
    rec.lock(1, &h.name, h.value.residual(), m);
    rec.request(0, 1, &b_obj, b_req);
    rec.request(1, 2, &c_obj, c_req);
    ChainState { n, m, c_req }
}

fn expect_topology(s: &Scenario, want: Topology) -> Result<()> {
    if s.topology != want {
        return Err(Error::Scenario(format!(
            "{}: topology is {}, not {want}",
            s.name, s.topology
        )));
    }
    Ok(())
}

/// Settlement through the diamond composite: `B` is paid, then `C`.
pub fn run_greedy(s: &Scenario) -> Result<SettlementTrace> {
    expect_topology(s, Topology::Greedy)?;
    let mut rec = Recorder::new(s);
    let st = open_chain(s, &mut rec);
    let (k, h) = (&s.first, &s.second);
    let (a_obj, b_obj, c_obj) = s.party_objects();
    match s.first_missing() {
        Some(missing) => {
            rec.blocked(&k.name, missing);
            rec.blocked(&h.name, missing);
        }
        None => {
            let at_b = rec.deliver(&s.w1, st.c_req);
            let a_goods = rec.deliver(&s.w2, at_b);
            let paid_b = k.value.bwd().apply(pair(st.n, a_goods, a_obj.size()));
            rec.settle(1, &k.name, &b_obj, paid_b);
            let paid_c = h.value.bwd().apply(pair(st.m, paid_b, b_obj.size()));
            rec.settle(2, &h.name, &c_obj, paid_c);
        }
    }
    rec.finish()
}

/// `B` pays `C` on delivery, then settles with `A`.
pub fn run_kind(s: &Scenario) -> Result<SettlementTrace> {
    expect_topology(s, Topology::Kind)?;
    let mut rec = Recorder::new(s);
    let st = open_chain(s, &mut rec);
    let (k, h) = (&s.first, &s.second);
    let (a_obj, b_obj, c_obj) = s.party_objects();
    if !s.w1.present {
        rec.blocked(&h.name, &s.w1.name);
        rec.blocked(&k.name, &s.w1.name);
        return rec.finish();
    }
    let at_b = rec.deliver(&s.w1, st.c_req);
    let paid_c = h.value.bwd().apply(pair(st.m, at_b, b_obj.size()));
    rec.settle(2, &h.name, &c_obj, paid_c);
    if s.w2.present {
        let again = rec.deliver(&s.w1, st.c_req);
        let a_goods = rec.deliver(&s.w2, again);
        let paid_b = k.value.bwd().apply(pair(st.n, a_goods, a_obj.size()));
        rec.settle(1, &k.name, &b_obj, paid_b);
    } else {
        rec.blocked(&k.name, &s.w2.name);
    }
    rec.finish()
}

/// The composite witness `w2 ∘ w1` fills both the main escrow and `B`'s
/// collateral comb; `B`'s only settlement is its collateral coming back.
pub fn run_mediated(s: &Scenario) -> Result<SettlementTrace> {
    expect_topology(s, Topology::Mediated)?;
    let mut rec = Recorder::new(s);
    let (h, f) = (&s.first, &s.second);
    let (a_obj, b_obj, c_obj) = s.party_objects();
    let cs = c_obj.size();
    let (ea, c_req) = unpair(h.value.fwd().apply(s.initial[0]), cs);
    let (eb, c_req_b) = unpair(f.value.fwd().apply(s.initial[1]), cs);
    rec.lock(0, &h.name, h.value.residual(), ea);
    rec.lock(1, &f.name, f.value.residual(), eb);
    rec.request(0, 2, &c_obj, c_req);
    rec.request(1, 2, &c_obj, c_req_b);
    match s.first_missing() {
        Some(missing) => {
            rec.blocked(&h.name, missing);
            rec.blocked(&f.name, missing);
        }
        None => {
            let via_b = rec.deliver(&s.w1, c_req);
            let goods = rec.deliver(&s.w2, via_b);
            let paid_c = h.value.bwd().apply(pair(ea, goods, a_obj.size()));
            let via_b2 = rec.deliver(&s.w1, c_req_b);
            let goods_b = rec.deliver(&s.w2, via_b2);
            let returned = f.value.bwd().apply(pair(eb, goods_b, a_obj.size()));
            rec.settle(2, &h.name, &c_obj, paid_c);
            rec.settle(1, &f.name, &b_obj, returned);
        }
    }
    rec.finish()
}

pub fn run(s: &Scenario) -> Result<SettlementTrace> {
    match s.topology {
        Topology::Greedy => run_greedy(s),
        Topology::Kind => run_kind(s),
        Topology::Mediated => run_mediated(s),
    }
}

/// The chain escrows of a greedy or kind scenario as [`Escrow`] values.
pub fn chain_escrows(s: &Scenario) -> Result<(Escrow, Escrow)> {
    if s.topology == Topology::Mediated {
        return Err(Error::Scenario(format!("{} is not a chain", s.name)));
    }
    Ok((
        Escrow::new(s.first.value.clone())?,
        Escrow::new(s.second.value.clone())?,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureRow {
    pub w1_present: bool,
    pub w2_present: bool,
    pub settled: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureReport {
    pub topology: Topology,
    pub rows: Vec<FailureRow>,
}

impl FailureReport {
    pub fn row(&self, w1_present: bool, w2_present: bool) -> Option<&FailureRow> {
        self.rows
            .iter()
            .find(|r| r.w1_present == w1_present && r.w2_present == w2_present)
    }
}

impl fmt::Display for FailureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |p: bool| if p { "present" } else { "absent" };
        for r in &self.rows {
            writeln!(
                f,
                "{}\tw1={}\tw2={}\tsettled={{{}}}",
                self.topology,
                mark(r.w1_present),
                mark(r.w2_present),
                r.settled.join(",")
            )?;
        }
        Ok(())
    }
}

/// Runs the scenario under every presence pattern of the two witnesses.
pub fn compare_failure_modes(s: &Scenario) -> Result<FailureReport> {
    let mut rows = Vec::with_capacity(4);
    for (w1, w2) in [(true, true), (true, false), (false, true), (false, false)] {
        let trace = run(&s.with_presence(w1, w2))?;
        let mut settled = trace.settled_parties();
        settled.sort();
        rows.push(FailureRow {
            w1_present: w1,
            w2_present: w2,
            settled,
        });
    }
    Ok(FailureReport {
        topology: s.topology,
        rows,
    })
}
