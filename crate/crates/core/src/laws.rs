//! Law suites over small finite instances.
//!
//! Every suite enumerates its instances by rank, so runs are deterministic.
//! Associativity over large lens spaces is checked on Cayley tables of lens
//! classes; each table entry comes from the real operation on canonical
//! representatives, and a separate check confirms the operations do not
//! depend on the representative they are handed.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{check_module, convolve, make_comodule, ComonoidStr, ModuleStr, MonoidStr};
use crate::error::{Error, Result};
use crate::escrow::{
    diamond, diamond_untwisted, emon_product, emon_unit, escrow_shape, nu, Escrow, EscrowMonoidCtx,
};
use crate::map::{count_maps, enumerate_maps, whisker_left, FinMap};
use crate::object::{AtomObj, TensorObj};
use crate::optic::{optic_eq, tensor_strength, Lens, Optic, OpticShape, Side, SlideSpan};
use crate::vermittler::{
    escrow_act, unit_counit_restriction, vermittler_act, vermittler_fill_law, VermittlerCtx,
};

/// Triple count above which exhaustive associativity switches to Cayley tables.
pub const DEFAULT_DIRECT_BUDGET: u128 = 300_000;

/// Largest Cayley table (entries) a suite will build.
pub const TABLE_CAP: u128 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Sliding,
    Lens,
    Diamond,
    Tambara,
    Emon,
    Action,
    Vermittler,
    Convolution,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Sliding,
        Suite::Lens,
        Suite::Diamond,
        Suite::Tambara,
        Suite::Emon,
        Suite::Action,
        Suite::Vermittler,
        Suite::Convolution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Sliding => "sliding",
            Suite::Lens => "lens",
            Suite::Diamond => "diamond",
            Suite::Tambara => "tambara",
            Suite::Emon => "emon",
            Suite::Action => "action",
            Suite::Vermittler => "vermittler",
            Suite::Convolution => "convolution",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::InvalidStructure(format!(
                    "unknown suite `{s}`; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Debug)]
pub struct LawSuiteConfig {
    /// Atomic boundary size. Suites quantifying over "size ≤ n" use `1..=n`.
    pub max_size: usize,
    pub max_residual: usize,
    pub monoids: Vec<MonoidStr>,
    pub suites: Vec<Suite>,
    /// `Some(k)`: draw `k` random cases per check instead of enumerating.
    pub sample: Option<usize>,
    pub seed: u64,
    pub direct_budget: u128,
    /// Swap in a diamond without the residual twist.
    #[doc(hidden)]
    pub corrupt_diamond: bool,
}

impl Default for LawSuiteConfig {
    fn default() -> Self {
        LawSuiteConfig {
            max_size: 2,
            max_residual: 2,
            monoids: vec![MonoidStr::cyclic(2), MonoidStr::cyclic(3)],
            suites: Suite::ALL.to_vec(),
            sample: None,
            seed: 0,
            direct_budget: DEFAULT_DIRECT_BUDGET,
            corrupt_diamond: false,
        }
    }
}

impl LawSuiteConfig {
    pub fn only(suites: &[Suite]) -> Self {
        LawSuiteConfig {
            suites: suites.to_vec(),
            ..LawSuiteConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_size == 0 || self.max_residual == 0 {
            return Err(Error::InvalidStructure(
                "max size and max residual must be at least 1".into(),
            ));
        }
        if self.monoids.is_empty() {
            return Err(Error::InvalidStructure("monoid whitelist is empty".into()));
        }
        for m in &self.monoids {
            if let Some(v) = crate::algebra::check_monoid(m).first() {
                return Err(Error::InvalidStructure(format!(
                    "{} is not a monoid: {v}",
                    m.carrier()
                )));
            }
        }
        if self.sample == Some(0) {
            return Err(Error::InvalidStructure(
                "sample size must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Direct,
    Cayley,
    Sampled,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::Cayley => "cayley",
            Method::Sampled => "sampled",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub method: Method,
    pub cases: u64,
    pub failures: u64,
    /// First failing case, rendered as tables.
    pub counterexample: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} cases, {} failures ({})",
            self.name, self.cases, self.failures, self.method
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }

    pub fn cases(&self) -> u64 {
        self.checks.iter().map(|c| c.cases).sum()
    }

    pub fn failures(&self) -> u64 {
        self.checks.iter().map(|c| c.failures).sum()
    }

    /// Sum of case counts over checks whose name starts with `prefix`.
    pub fn cases_of(&self, prefix: &str) -> u64 {
        self.checks
            .iter()
            .filter(|c| c.name.starts_with(prefix))
            .map(|c| c.cases)
            .sum()
    }

    pub fn first_failure(&self) -> Option<&CheckReport> {
        self.checks.iter().find(|c| !c.passed())
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "suite {}: {verdict} ({} cases, {} failures)",
            self.suite,
            self.cases(),
            self.failures()
        )?;
        for check in &self.checks {
            writeln!(f, "  {check}")?;
        }
        Ok(())
    }
}

/// Runs every selected suite in `config.suites` order.
pub fn run_selected(config: &LawSuiteConfig) -> Result<Vec<SuiteReport>> {
    config.validate()?;
    config
        .suites
        .iter()
        .map(|&s| run_suite(s, config))
        .collect()
}

pub fn run_suite(suite: Suite, config: &LawSuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let mut sampler = Sampler::new(config, suite);
    let checks = match suite {
        Suite::Sliding => sliding_suite(config, &mut sampler)?,
        Suite::Lens => lens_suite(config, &mut sampler)?,
        Suite::Diamond => diamond_suite(config, &mut sampler)?,
        Suite::Tambara => tambara_suite(config, &mut sampler)?,
        Suite::Emon => emon_suite(config, &mut sampler)?,
        Suite::Action => action_suite(config, &mut sampler)?,
        Suite::Vermittler => vermittler_suite(config, &mut sampler)?,
        Suite::Convolution => convolution_suite(config, &mut sampler)?,
    };
    Ok(SuiteReport { suite, checks })
}

struct Tally(CheckReport);

impl Tally {
    fn new(name: impl Into<String>, method: Method) -> Self {
        Tally(CheckReport {
            name: name.into(),
            method,
            cases: 0,
            failures: 0,
            counterexample: None,
        })
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.0.cases += 1;
        if !ok {
            self.0.failures += 1;
            if self.0.counterexample.is_none() {
                self.0.counterexample = Some(describe());
            }
        }
    }

    fn finish(self) -> CheckReport {
        self.0
    }
}

struct Sampler {
    sample: Option<usize>,
    rng: ChaCha8Rng,
}

enum Picks {
    All(std::ops::Range<u128>),
    Sampled(std::vec::IntoIter<u128>),
}

impl Iterator for Picks {
    type Item = u128;

    fn next(&mut self) -> Option<u128> {
        match self {
            Picks::All(r) => r.next(),
            Picks::Sampled(v) => v.next(),
        }
    }
}

impl Sampler {
    fn new(config: &LawSuiteConfig, suite: Suite) -> Self {
        Sampler {
            sample: config.sample,
            rng: ChaCha8Rng::seed_from_u64(config.seed ^ (suite as u64 + 1)),
        }
    }

    fn exhaustive(&self) -> bool {
        self.sample.is_none()
    }

    fn method(&self) -> Method {
        if self.exhaustive() {
            Method::Direct
        } else {
            Method::Sampled
        }
    }

    fn picks(&mut self, total: u128) -> Picks {
        match self.sample {
            Some(k) if (k as u128) < total => {
                let v: Vec<u128> = (0..k).map(|_| self.rng.gen_range(0..total)).collect();
                Picks::Sampled(v.into_iter())
            }
            _ => Picks::All(0..total),
        }
    }
}

fn atom(name: &str, n: usize) -> TensorObj {
    AtomObj::range(name, n).into()
}

fn maps_count(dom: &TensorObj, cod: &TensorObj) -> Result<u128> {
    count_maps(dom, cod).ok_or(Error::EnumerationTooLarge {
        count: u128::MAX,
        cap: crate::map::DEFAULT_ENUMERATION_CAP,
    })
}

/// Splits `i` into mixed-radix digits, first digit most significant.
fn decode(mut i: u128, radices: &[u128]) -> Vec<u128> {
    let mut out = vec![0; radices.len()];
    for (slot, &r) in out.iter_mut().zip(radices).rev() {
        *slot = i % r;
        i /= r;
    }
    out
}

fn lens_reps(shape: &OpticShape) -> Result<Vec<Optic>> {
    Ok(Lens::enumerate(shape)?.map(|l| l.to_optic()).collect())
}

fn escrow_reps(shape: &OpticShape) -> Result<Vec<Escrow>> {
    lens_reps(shape)?.into_iter().map(Escrow::new).collect()
}

fn class(o: &Optic) -> usize {
    o.to_lens().rank() as usize
}

fn indent(text: &str, by: &str) -> String {
    text.lines().map(|l| format!("{by}{l}\n")).collect()
}

fn render_map(f: &FinMap) -> String {
    f.render_table()
        .iter()
        .map(|l| format!("    {l}\n"))
        .collect()
}

fn render_optic(label: &str, o: &Optic) -> String {
    format!(
        "{label}: residual {}\n  fwd:\n{}  bwd:\n{}  lens:\n{}",
        o.residual(),
        render_map(o.fwd()),
        render_map(o.bwd()),
        indent(&o.to_lens().render(), "    ")
    )
}

fn render_lens(label: &str, o: &Optic) -> String {
    format!("{label}:\n{}", indent(&o.to_lens().render(), "  "))
}

fn same_lens(x: &Optic, y: &Optic) -> bool {
    x.to_lens() == y.to_lens()
}

fn sliding_suite(cfg: &LawSuiteConfig, sampler: &mut Sampler) -> Result<Vec<CheckReport>> {
    let n = cfg.max_size;
    let (s, t, a, b) = (atom("S", n), atom("T", n), atom("A", n), atom("B", n));
    let shape = OpticShape::new(a.clone(), b.clone(), s.clone(), t.clone());
    let fillers: Vec<FinMap> = enumerate_maps(&a, &b)?.collect();
    let mut eq = Tally::new(format!("generators |S|=|T|=|A|=|B|={n}"), sampler.method());
    let mut fills = Tally::new("fill agreement", sampler.method());
    for mi in 1..=cfg.max_residual {
        for ni in 1..=cfg.max_residual {
            let (m, nn) = (atom("M", mi), atom("N", ni));
            let (fwd_cod, bwd_dom) = (m.tensor(&a), nn.tensor(&b));
            let radices = [
                maps_count(&s, &fwd_cod)?,
                maps_count(&bwd_dom, &t)?,
                maps_count(&m, &nn)?,
            ];
            for i in sampler.picks(radices.iter().product()) {
                let d = decode(i, &radices);
                let span = SlideSpan::new(
                    shape.clone(),
                    FinMap::from_rank(&s, &fwd_cod, d[0]),
                    FinMap::from_rank(&bwd_dom, &t, d[1]),
                    FinMap::from_rank(&m, &nn, d[2]),
                )?;
                let (l, r) = (span.slide(Side::Left), span.slide(Side::Right));
                eq.record(optic_eq(&l, &r)?, || {
                    render_optic("left", &l) + &render_optic("right", &r)
                });
                for f in &fillers {
                    let (fl, fr) = (l.fill(f)?, r.fill(f)?);
                    fills.record(fl == fr, || {
                        format!(
                            "filler:\n{}{}{}",
                            render_map(f),
                            render_optic("left", &l),
                            render_optic("right", &r)
                        )
                    });
                }
            }
        }
    }
    Ok(vec![eq.finish(), fills.finish()])
}

fn lens_suite(cfg: &LawSuiteConfig, sampler: &mut Sampler) -> Result<Vec<CheckReport>> {
    let n = cfg.max_size;
    let (s, t, a, b) = (atom("S", n), atom("T", n), atom("A", n), atom("B", n));
    let shape = OpticShape::new(a.clone(), b.clone(), s.clone(), t.clone());
    let total = Lens::count(&shape).ok_or(Error::EnumerationTooLarge {
        count: u128::MAX,
        cap: crate::map::DEFAULT_ENUMERATION_CAP,
    })?;
    let mut round = Tally::new(format!("round trip |S|=|T|=|A|=|B|={n}"), sampler.method());
    for i in sampler.picks(total) {
        let l = Lens::from_rank(&shape, i);
        let back = l.to_optic().to_lens();
        round.record(back == l && back.rank() == i, || {
            format!(
                "lens:\n{}round trip:\n{}",
                indent(&l.render(), "  "),
                indent(&back.render(), "  ")
            )
        });
    }
    // every representative is one generator step from the canonical one
    let mut reps = Tally::new("representative to canonical", sampler.method());
    for mi in 1..=cfg.max_residual {
        let m = atom("M", mi);
        let (fwd_cod, bwd_dom) = (m.tensor(&a), m.tensor(&b));
        let radices = [maps_count(&s, &fwd_cod)?, maps_count(&bwd_dom, &t)?];
        for i in sampler.picks(radices.iter().product()) {
            let d = decode(i, &radices);
            let o = Optic::new(
                shape.clone(),
                m.clone(),
                FinMap::from_rank(&s, &fwd_cod, d[0]),
                FinMap::from_rank(&bwd_dom, &t, d[1]),
            )?;
            let canonical = o.to_lens().to_optic();
            let asz = a.size();
            let w = FinMap::from_fn(s.clone(), m.clone(), |x| o.fwd().apply(x) / asz);
            let span = SlideSpan::new(shape.clone(), canonical.fwd().clone(), o.bwd().clone(), w)?;
            let ok = span.slide(Side::Left) == o && span.slide(Side::Right) == canonical;
            reps.record(ok, || render_optic("representative", &o));
        }
    }
    Ok(vec![round.finish(), reps.finish()])
}

type BinOp<'a, X, Y> = &'a dyn Fn(&X, &Y) -> Result<Y>;

/// `act(mul(x1,x2), y) ~ act(x1, act(x2, y))` over all triples of canonical
/// representatives. `xs` and `ys` must list one representative per lens
/// class in rank order.
fn assoc_check<X: AsRef<Optic> + Clone, Y: AsRef<Optic> + Clone>(
    label: &str,
    xs: &[X],
    ys: &[Y],
    mul: BinOp<'_, X, X>,
    act: BinOp<'_, X, Y>,
    cfg: &LawSuiteConfig,
    sampler: &mut Sampler,
) -> Result<Vec<CheckReport>> {
    let (lx, ly) = (xs.len() as u128, ys.len() as u128);
    let total = lx * lx * ly;
    let describe = |a: usize, b: usize, c: usize, lhs: &Y, rhs: &Y| {
        format!(
            "{}{}{}{}{}",
            render_lens("first", xs[a].as_ref()),
            render_lens("second", xs[b].as_ref()),
            render_lens("third", ys[c].as_ref()),
            render_lens("(first*second)*third", lhs.as_ref()),
            render_lens("first*(second*third)", rhs.as_ref()),
        )
    };
    if !sampler.exhaustive() {
        let mut t = Tally::new(format!("assoc {label}"), Method::Sampled);
        for i in sampler.picks(total) {
            let d = decode(i, &[lx, lx, ly]);
            let (a, b, c) = (d[0] as usize, d[1] as usize, d[2] as usize);
            let lhs = act(&mul(&xs[a], &xs[b])?, &ys[c])?;
            let rhs = act(&xs[a], &act(&xs[b], &ys[c])?)?;
            t.record(same_lens(lhs.as_ref(), rhs.as_ref()), || {
                describe(a, b, c, &lhs, &rhs)
            });
        }
        return Ok(vec![t.finish()]);
    }
    if total <= cfg.direct_budget {
        let (nx, ny) = (xs.len(), ys.len());
        let mut bc = Vec::with_capacity(nx * ny);
        for b in xs {
            for c in ys {
                bc.push(act(b, c)?);
            }
        }
        let mut t = Tally::new(format!("assoc {label}"), Method::Direct);
        for a in 0..nx {
            for b in 0..nx {
                let ab = mul(&xs[a], &xs[b])?;
                for c in 0..ny {
                    let lhs = act(&ab, &ys[c])?;
                    let rhs = act(&xs[a], &bc[b * ny + c])?;
                    t.record(same_lens(lhs.as_ref(), rhs.as_ref()), || {
                        describe(a, b, c, &lhs, &rhs)
                    });
                }
            }
        }
        return Ok(vec![t.finish()]);
    }
    let too_big = |count: u128| Error::EnumerationTooLarge {
        count,
        cap: TABLE_CAP,
    };
    if lx * lx > TABLE_CAP {
        return Err(too_big(lx * lx));
    }
    if lx * ly > TABLE_CAP {
        return Err(too_big(lx * ly));
    }
    let (nx, ny) = (xs.len(), ys.len());
    let mut act_t = vec![0u32; nx * ny];
    for (a, x) in xs.iter().enumerate() {
        for (c, y) in ys.iter().enumerate() {
            act_t[a * ny + c] = class(act(x, y)?.as_ref()) as u32;
        }
    }
    // pseudo-random partner for the representative checks
    let partner = |i: usize, n: usize| (i.wrapping_mul(2_654_435_761) >> 7) % n;
    let mut rep_left = Tally::new(format!("representatives (product) {label}"), Method::Direct);
    let mut mul_t = vec![0u32; nx * nx];
    for a in 0..nx {
        for b in 0..nx {
            let raw = mul(&xs[a], &xs[b])?;
            let k = class(raw.as_ref());
            mul_t[a * nx + b] = k as u32;
            let c = partner(a * nx + b, ny);
            let got = act(&raw, &ys[c])?;
            rep_left.record(class(got.as_ref()) == act_t[k * ny + c] as usize, || {
                render_optic("raw product", raw.as_ref()) + &render_lens("acted on", ys[c].as_ref())
            });
        }
    }
    let mut rep_right = Tally::new(format!("representatives (acted) {label}"), Method::Direct);
    for (b, x) in xs.iter().enumerate() {
        for (c, y) in ys.iter().enumerate() {
            let raw = act(x, y)?;
            let k = class(raw.as_ref());
            let a = partner(b * ny + c, nx);
            let got = act(&xs[a], &raw)?;
            rep_right.record(class(got.as_ref()) == act_t[a * ny + k] as usize, || {
                render_lens("acting", xs[a].as_ref()) + &render_optic("raw result", raw.as_ref())
            });
        }
    }
    let mut t = Tally::new(format!("assoc {label}"), Method::Cayley);
    for a in 0..nx {
        for b in 0..nx {
            let ab = mul_t[a * nx + b] as usize;
            for c in 0..ny {
                let lhs = act_t[ab * ny + c];
                let rhs = act_t[a * ny + act_t[b * ny + c] as usize];
                t.record(lhs == rhs, || {
                    let lhs =
                        act(&mul(&xs[a], &xs[b]).expect("recomputed"), &ys[c]).expect("recomputed");
                    let rhs =
                        act(&xs[a], &act(&xs[b], &ys[c]).expect("recomputed")).expect("recomputed");
                    describe(a, b, c, &lhs, &rhs)
                });
            }
        }
    }
    Ok(vec![t.finish(), rep_left.finish(), rep_right.finish()])
}

type UnitOp<'a, X> = &'a dyn Fn(&X) -> Result<X>;

fn unit_checks<X: AsRef<Optic>>(
    label: &str,
    xs: &[X],
    left: impl Fn(&X) -> Result<X>,
    right: Option<UnitOp<'_, X>>,
    sampler: &mut Sampler,
) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let mut t = Tally::new(format!("left unit {label}"), sampler.method());
    for i in sampler.picks(xs.len() as u128) {
        let x = &xs[i as usize];
        let got = left(x)?;
        t.record(optic_eq(got.as_ref(), x.as_ref())?, || {
            render_lens("operand", x.as_ref()) + &render_lens("with unit", got.as_ref())
        });
    }
    out.push(t.finish());
    if let Some(right) = right {
        let mut t = Tally::new(format!("right unit {label}"), sampler.method());
        for i in sampler.picks(xs.len() as u128) {
            let x = &xs[i as usize];
            let got = right(x)?;
            t.record(optic_eq(got.as_ref(), x.as_ref())?, || {
                render_lens("operand", x.as_ref()) + &render_lens("with unit", got.as_ref())
            });
        }
        out.push(t.finish());
    }
    Ok(out)
}

fn diamond_suite(cfg: &LawSuiteConfig, sampler: &mut Sampler) -> Result<Vec<CheckReport>> {
    let n = cfg.max_size;
    let x = atom("X", n);
    let shape = escrow_shape(&x, &x);
    let op: fn(&Escrow, &Escrow) -> Result<Escrow> = if cfg.corrupt_diamond {
        diamond_untwisted
    } else {
        diamond
    };
    let reps = escrow_reps(&shape)?;
    let label = format!("|X|={n}");
    let mut out = assoc_check(&label, &reps, &reps, &op, &op, cfg, sampler)?;
    let unit = nu(&x);
    let left = |k: &Escrow| op(&unit, k);
    let right = |k: &Escrow| op(k, &unit);
    out.extend(unit_checks(&label, &reps, left, Some(&right), sampler)?);

    // both sides of every generator, fed to either argument
    for position in ["first", "second"] {
        let mut t = Tally::new(format!("slide in {position} argument"), sampler.method());
        for mi in 1..=cfg.max_residual {
            for ni in 1..=cfg.max_residual {
                let (m, nn) = (atom("M", mi), atom("N", ni));
                let (fwd_cod, bwd_dom) = (m.tensor(&x), nn.tensor(&x));
                let radices = [
                    maps_count(&x, &fwd_cod)?,
                    maps_count(&bwd_dom, &x)?,
                    maps_count(&m, &nn)?,
                    reps.len() as u128,
                ];
                for i in sampler.picks(radices.iter().product()) {
                    let d = decode(i, &radices);
                    let span = SlideSpan::new(
                        shape.clone(),
                        FinMap::from_rank(&x, &fwd_cod, d[0]),
                        FinMap::from_rank(&bwd_dom, &x, d[1]),
                        FinMap::from_rank(&m, &nn, d[2]),
                    )?;
                    let l = Escrow::new(span.slide(Side::Left))?;
                    let r = Escrow::new(span.slide(Side::Right))?;
                    let other = &reps[d[3] as usize];
                    let (dl, dr) = if position == "first" {
                        (op(&l, other)?, op(&r, other)?)
                    } else {
                        (op(other, &l)?, op(other, &r)?)
                    };
                    t.record(optic_eq(dl.optic(), dr.optic())?, || {
                        render_optic("left slide", l.optic())
                            + &render_optic("right slide", r.optic())
                            + &render_lens("other", other.optic())
                    });
                }
            }
        }
        out.push(t.finish());
    }
    Ok(out)
}

fn tambara_suite(cfg: &LawSuiteConfig, sampler: &mut Sampler) -> Result<Vec<CheckReport>> {
    let n = cfg.max_size;
    let (s, t, a, b) = (atom("S", n), atom("T", n), atom("A", n), atom("B", n));
    let shape = OpticShape::new(a.clone(), b.clone(), s, t);
    let reps = lens_reps(&shape)?;
    let fillers: Vec<FinMap> = enumerate_maps(&a, &b)?.collect();
    let mut out = Vec::new();

    let mut unit = Tally::new(format!("unitor |S|=|T|=|A|=|B|={n}"), sampler.method());
    for i in sampler.picks(reps.len() as u128) {
        let o = &reps[i as usize];
        let got = tensor_strength(o, &TensorObj::unit());
        unit.record(optic_eq(&got, o)?, || render_optic("optic", o));
    }
    out.push(unit.finish());

    let mut assoc = Tally::new("associator", sampler.method());
    for mi in 1..=cfg.max_residual {
        for ni in 1..=cfg.max_residual {
            let (m, nn) = (atom("M", mi), atom("N", ni));
            let mn = m.tensor(&nn);
            for i in sampler.picks(reps.len() as u128) {
                let o = &reps[i as usize];
                let nested = tensor_strength(&tensor_strength(o, &nn), &m);
                let joint = tensor_strength(o, &mn);
                assoc.record(optic_eq(&nested, &joint)?, || {
                    format!("|M|={mi} |N|={ni}\n")
                        + &render_optic("optic", o)
                        + &render_lens("nested", &nested)
                        + &render_lens("joint", &joint)
                });
            }
        }
    }
    out.push(assoc.finish());

    let mut fill = Tally::new("fill", sampler.method());
    for wi in 1..=cfg.max_residual {
        let w = atom("W", wi);
        let radices = [reps.len() as u128, fillers.len() as u128];
        for i in sampler.picks(radices.iter().product()) {
            let d = decode(i, &radices);
            let (o, f) = (&reps[d[0] as usize], &fillers[d[1] as usize]);
            let got = tensor_strength(o, &w).fill(f)?;
            let want = whisker_left(&w, &o.fill(f)?);
            fill.record(got == want, || {
                format!("|W|={wi}\nfiller:\n{}", render_map(f)) + &render_optic("optic", o)
            });
        }
    }
    out.push(fill.finish());
    Ok(out)
}

fn monoid_name(m: &MonoidStr) -> String {
    m.carrier().to_string()
}

fn emon_suite(cfg: &LawSuiteConfig, sampler: &mut Sampler) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for a_size in 1..=cfg.max_size {
        let a = atom("A", a_size);
        for c in &cfg.monoids {
            let ctx = EscrowMonoidCtx::new(ComonoidStr::new(a.clone()), c.clone())?;
            let label = format!("|A|={a_size} C={}", monoid_name(c));
            let reps = escrow_reps(&ctx.shape())?;
            let mul = |h: &Escrow, k: &Escrow| emon_product(&ctx, h, k);
            out.extend(assoc_check(&label, &reps, &reps, &mul, &mul, cfg, sampler)?);
            let unit = emon_unit(&ctx);
            let left = |k: &Escrow| emon_product(&ctx, &unit, k);
            let right = |k: &Escrow| emon_product(&ctx, k, &unit);
            out.extend(unit_checks(&label, &reps, left, Some(&right), sampler)?);

            let maps: Vec<FinMap> = enumerate_maps(&a, c.carrier())?.collect();
            let comonoid = ctx.comonoid();
            let m = maps.len() as u128;
            let mut bridge = Tally::new(format!("purity bridge {label}"), sampler.method());
            for i in sampler.picks(m * m * m * m) {
                let d = decode(i, &[m, m, m, m]);
                let [p, q, p2, q2] = [0, 1, 2, 3].map(|j| &maps[d[j] as usize]);
                let lhs = emon_product(&ctx, &Escrow::pure(p, q)?, &Escrow::pure(p2, q2)?)?;
                let rhs = Escrow::pure(
                    &convolve(p, p2, comonoid, c)?,
                    &convolve(q, q2, comonoid, c)?,
                )?;
                bridge.record(optic_eq(lhs.optic(), rhs.optic())?, || {
                    format!(
                        "p:\n{}q:\n{}p':\n{}q':\n{}",
                        render_map(p),
                        render_map(q),
                        render_map(p2),
                        render_map(q2)
                    )
                });
            }
            out.push(bridge.finish());
        }
    }
    Ok(out)
}

/// Every `(module, comodule)` pair on atoms of the given sizes.
fn structures(a: &TensorObj, c: &MonoidStr, b: &TensorObj) -> Result<Vec<(String, VermittlerCtx)>> {
    let mut out = Vec::new();
    let modules: Vec<ModuleStr> = enumerate_maps(&c.carrier().tensor(b), b)?
        .filter_map(|act| ModuleStr::new(c.clone(), b.clone(), act).ok())
        .filter(|m| check_module(m).is_empty())
        .collect();
    for (mi, module) in modules.iter().enumerate() {
        for attr in enumerate_maps(b, a)? {
            let label = format!("module#{mi} attr={:?}", attr.table());
            let comodule = make_comodule(ComonoidStr::new(a.clone()), b.clone(), attr)?;
            out.push((label, VermittlerCtx::new(module.clone(), comodule)?));
        }
    }
    Ok(out)
}

fn action_suite(cfg: &LawSuiteConfig, sampler: &mut Sampler) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for a_size in 1..=cfg.max_size {
        let a = atom("A", a_size);
        for c in &cfg.monoids {
            let ectx = EscrowMonoidCtx::new(ComonoidStr::new(a.clone()), c.clone())?;
            let escrows = escrow_reps(&ectx.shape())?;
            let unit = emon_unit(&ectx);
            let mul = |h: &Escrow, k: &Escrow| emon_product(&ectx, h, k);
            for b_size in 1..=cfg.max_size {
                let b = atom("B", b_size);
                for (slabel, ctx) in structures(&a, c, &b)? {
                    let label = format!("|A|={a_size} C={} |B|={b_size} {slabel}", monoid_name(c));
                    let optics = lens_reps(&ctx.acted_shape())?;
                    let act = |h: &Escrow, o: &Optic| escrow_act(&ctx, h, o);
                    let left = |o: &Optic| escrow_act(&ctx, &unit, o);
                    out.extend(unit_checks(&label, &optics, left, None, sampler)?);
                    out.extend(assoc_check(
                        &label, &escrows, &optics, &mul, &act, cfg, sampler,
                    )?);
                }
            }
        }
    }
    Ok(out)
}

/// A representative of `f`'s class with residual `B⊗B` instead of `B`.
fn duplicated_residual(f: &Optic) -> Result<Optic> {
    let m = f.residual();
    let mm = m.tensor(m);
    let inner_left = f.shape().inner_left.size();
    let inner_right = f.shape().inner_right.size();
    let ms = m.size();
    let fwd = FinMap::from_fn(
        f.shape().outer_left.clone(),
        mm.tensor(&f.shape().inner_left),
        |s| {
            let v = f.fwd().apply(s);
            let (r, x) = (v / inner_left, v % inner_left);
            ((r * ms + r) * inner_left) + x
        },
    );
    let bwd = FinMap::from_fn(
        mm.tensor(&f.shape().inner_right),
        f.shape().outer_right.clone(),
        |z| {
            let (rr, y) = (z / inner_right, z % inner_right);
            f.bwd().apply((rr / ms) * inner_right + y)
        },
    );
    Optic::new(f.shape().clone(), mm, fwd, bwd)
}

fn vermittler_suite(cfg: &LawSuiteConfig, sampler: &mut Sampler) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for a_size in 1..=cfg.max_size {
        let a = atom("A", a_size);
        for c in &cfg.monoids {
            let hs = escrow_reps(&escrow_shape(c.carrier(), &a))?;
            let gs: Vec<FinMap> = enumerate_maps(&a, c.carrier())?.collect();
            for b_size in 1..=cfg.max_size {
                let b = atom("B", b_size);
                for (slabel, ctx) in structures(&a, c, &b)? {
                    let label = format!("|A|={a_size} C={} |B|={b_size} {slabel}", monoid_name(c));
                    let fs = lens_reps(&ctx.collateral_shape())?;
                    let alphas: Vec<Lens> = hs
                        .iter()
                        .map(|h| {
                            crate::vermittler::alpha_tilde(&ctx, h).map(|v| v.optic().to_lens())
                        })
                        .collect::<Result<_>>()?;
                    let betas: Vec<Lens> = fs
                        .iter()
                        .map(|f| {
                            crate::vermittler::beta_tilde(&ctx, f).map(|v| v.optic().to_lens())
                        })
                        .collect::<Result<_>>()?;
                    let mut defined = Tally::new(format!("definedness {label}"), sampler.method());
                    let mut rerep =
                        Tally::new(format!("definedness per class {label}"), sampler.method());
                    let mut restriction =
                        Tally::new(format!("counit/unit {label}"), sampler.method());
                    let mut fill = Tally::new(format!("fill law {label}"), sampler.method());
                    let radices = [hs.len() as u128, fs.len() as u128];
                    for i in sampler.picks(radices[0] * radices[1]) {
                        let d = decode(i, &radices);
                        let (hi, fi) = (d[0] as usize, d[1] as usize);
                        let (h, f) = (&hs[hi], &fs[fi]);
                        let expected = alphas[hi] == betas[fi];
                        let res = vermittler_act(&ctx, h, f);
                        let ok = match &res {
                            Ok(_) => expected,
                            Err(Error::Undefined(_)) => !expected,
                            Err(e) => return Err(e.clone()),
                        };
                        let describe = || render_lens("h", h.optic()) + &render_optic("f", f);
                        defined.record(ok, describe);
                        let Ok(v) = res else { continue };
                        // a different representative of f must land in the same place
                        let f2 = duplicated_residual(f)?;
                        rerep.record(vermittler_act(&ctx, h, &f2).is_ok(), describe);
                        let back = unit_counit_restriction(&ctx, &v)?;
                        restriction.record(optic_eq(&back, f)?, || {
                            describe() + &render_lens("restricted", &back)
                        });
                        for g in &gs {
                            let violations = vermittler_fill_law(&ctx, &v, f, g)?;
                            fill.record(violations.is_empty(), || {
                                format!(
                                    "filler:\n{}{}{}\n",
                                    render_map(g),
                                    describe(),
                                    violations[0]
                                )
                            });
                        }
                    }
                    out.extend([
                        defined.finish(),
                        rerep.finish(),
                        restriction.finish(),
                        fill.finish(),
                    ]);
                }
            }
        }
    }
    Ok(out)
}

fn convolution_suite(cfg: &LawSuiteConfig, sampler: &mut Sampler) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for a_size in 1..=cfg.max_size + 1 {
        let a = atom("A", a_size);
        let comonoid = ComonoidStr::new(a.clone());
        for c in &cfg.monoids {
            let label = format!("|A|={a_size} C={}", monoid_name(c));
            let maps: Vec<FinMap> = enumerate_maps(&a, c.carrier())?.collect();
            let m = maps.len() as u128;
            let unit = FinMap::constant(&a, c.carrier(), c.unit());

            let mut assoc = Tally::new(format!("assoc {label}"), sampler.method());
            for i in sampler.picks(m * m * m) {
                let d = decode(i, &[m, m, m]);
                let [f, g, h] = [0, 1, 2].map(|j| &maps[d[j] as usize]);
                let lhs = convolve(&convolve(f, g, &comonoid, c)?, h, &comonoid, c)?;
                let rhs = convolve(f, &convolve(g, h, &comonoid, c)?, &comonoid, c)?;
                assoc.record(lhs == rhs, || {
                    format!(
                        "f:\n{}g:\n{}h:\n{}",
                        render_map(f),
                        render_map(g),
                        render_map(h)
                    )
                });
            }
            out.push(assoc.finish());

            let mut units = Tally::new(format!("unit {label}"), sampler.method());
            for i in sampler.picks(m) {
                let f = &maps[i as usize];
                let ok = convolve(&unit, f, &comonoid, c)? == *f
                    && convolve(f, &unit, &comonoid, c)? == *f;
                units.record(ok, || format!("f:\n{}", render_map(f)));
            }
            out.push(units.finish());

            let mut pointwise = Tally::new(format!("pointwise {label}"), sampler.method());
            for i in sampler.picks(m * m) {
                let d = decode(i, &[m, m]);
                let (f, g) = (&maps[d[0] as usize], &maps[d[1] as usize]);
                let fg = convolve(f, g, &comonoid, c)?;
                let ok = a
                    .elements()
                    .all(|x| fg.apply(x) == c.mult(f.apply(x), g.apply(x)));
                pointwise.record(ok, || format!("f:\n{}g:\n{}", render_map(f), render_map(g)));
            }
            out.push(pointwise.finish());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suite: Suite) -> LawSuiteConfig {
        LawSuiteConfig {
            max_size: 1,
            max_residual: 1,
            monoids: vec![MonoidStr::cyclic(2)],
            ..LawSuiteConfig::only(&[suite])
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn decode_is_mixed_radix() {
        assert_eq!(decode(0, &[2, 3]), vec![0, 0]);
        assert_eq!(decode(5, &[2, 3]), vec![1, 2]);
        assert_eq!(decode(7, &[4, 2, 1]), vec![3, 1, 0]);
    }

    #[test]
    fn tiny_suites_pass() {
        for s in Suite::ALL {
            let report = run_suite(s, &small(s)).unwrap();
            assert!(report.passed(), "{report}");
            assert!(report.cases() > 0, "{report}");
        }
    }

    #[test]
    fn cayley_path_agrees_with_direct() {
        let mut cfg = small(Suite::Emon);
        cfg.max_size = 2;
        let direct = run_suite(Suite::Emon, &cfg).unwrap();
        cfg.direct_budget = 0;
        let cayley = run_suite(Suite::Emon, &cfg).unwrap();
        assert!(direct.passed() && cayley.passed());
        assert_eq!(direct.cases_of("assoc"), cayley.cases_of("assoc"));
        assert!(cayley.checks.iter().any(|c| c.method == Method::Cayley));
    }

    #[test]
    fn corrupt_diamond_is_caught() {
        let mut cfg = LawSuiteConfig::only(&[Suite::Diamond]);
        cfg.corrupt_diamond = true;
        cfg.sample = Some(2000);
        let report = run_suite(Suite::Diamond, &cfg).unwrap();
        assert!(!report.passed());
        let first = report.first_failure().unwrap();
        assert!(first.counterexample.as_ref().unwrap().contains("get:"));
    }

    #[test]
    fn sampling_is_seeded() {
        let mut cfg = LawSuiteConfig::only(&[Suite::Sliding]);
        cfg.sample = Some(50);
        let a = run_suite(Suite::Sliding, &cfg).unwrap();
        let b = run_suite(Suite::Sliding, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.checks[0].cases <= 200);
    }

    #[test]
    fn rejects_degenerate_config() {
        let cfg = LawSuiteConfig {
            max_size: 0,
            ..LawSuiteConfig::default()
        };
        assert!(run_selected(&cfg).is_err());
    }
}
