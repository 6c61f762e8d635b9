//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Law suites run at their default sizes.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use escrow_core::laws::{run_suite, LawSuiteConfig, Suite, SuiteReport};
use escrow_core::{
    compare_failure_modes, compose, diamond, escrow_shape, run, run_greedy, AtomObj, Escrow, Event,
    FinMap, Named, Optic, Scenario, TensorObj, Topology, Witness,
};
use escrowctl::format::{parse_definition_file, parse_definitions, serialize, Definition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn suite(s: Suite) -> Result<SuiteReport, String> {
    let report = run_suite(s, &LawSuiteConfig::default()).map_err(|e| e.to_string())?;
    if let Some(check) = report.first_failure() {
        return Err(format!(
            "{}: {} failures\n{}",
            check.name,
            check.failures,
            check.counterexample.clone().unwrap_or_default()
        ));
    }
    ensure(report.cases() > 0, || "no cases ran".into())?;
    Ok(report)
}

fn summary(r: &SuiteReport) -> String {
    format!("{} cases, 0 failures", r.cases())
}

fn sliding() -> Verdict {
    let r = suite(Suite::Sliding)?;
    let gens = r.cases_of("generators |S|=|T|=|A|=|B|=2");
    let fills = r.cases_of("fill agreement");
    ensure(gens > 0 && fills == 4 * gens, || {
        format!("{gens} generator instances but {fills} fill comparisons")
    })?;
    Ok(format!(
        "{gens} generator instances, {fills} fill comparisons"
    ))
}

fn lens_bijection() -> Verdict {
    let r = suite(Suite::Lens)?;
    let round = r.cases_of("round trip |S|=|T|=|A|=|B|=2");
    ensure(round == 64, || format!("{round} lenses, expected 64"))?;
    Ok(summary(&r))
}

fn diamond_laws() -> Verdict {
    let r = suite(Suite::Diamond)?;
    let assoc = r.cases_of("assoc |X|=2");
    let left = r.cases_of("left unit |X|=2");
    let right = r.cases_of("right unit |X|=2");
    ensure(assoc == 262_144, || {
        format!("{assoc} associativity triples, expected 64^3")
    })?;
    ensure(left == 64 && right == 64, || {
        format!("unit checks {left}/{right}, expected 64/64")
    })?;
    let corrupt = LawSuiteConfig {
        corrupt_diamond: true,
        ..LawSuiteConfig::only(&[Suite::Diamond])
    };
    let broken = run_suite(Suite::Diamond, &corrupt).map_err(|e| e.to_string())?;
    ensure(!broken.passed(), || {
        "corrupted diamond was not caught".into()
    })?;
    Ok(format!(
        "{assoc} triples, {left}+{right} unit checks; corrupted diamond caught with {} failures",
        broken.failures()
    ))
}

fn tambara() -> Verdict {
    let r = suite(Suite::Tambara)?;
    ensure(
        r.cases_of("unitor") > 0 && r.cases_of("associator") > 0,
        || "missing unitor or associator checks".into(),
    )?;
    Ok(summary(&r))
}

fn escrow_monoid() -> Verdict {
    let r = suite(Suite::Emon)?;
    for c in ["C=Z2", "C=Z3"] {
        for a in 1..=2 {
            let label = format!("|A|={a} {c}");
            for check in ["assoc", "left unit", "right unit", "purity bridge"] {
                let n = r.cases_of(&format!("{check} {label}"));
                ensure(n > 0, || format!("no `{check} {label}` cases"))?;
            }
        }
    }
    Ok(summary(&r))
}

fn action() -> Verdict {
    let r = suite(Suite::Action)?;
    ensure(
        r.cases_of("left unit") > 0 && r.cases_of("assoc") > 0,
        || "missing checks".into(),
    )?;
    Ok(summary(&r))
}

fn vermittler() -> Verdict {
    let r = suite(Suite::Vermittler)?;
    let defined = r.cases_of("counit/unit");
    let pairs = r.cases_of("definedness |");
    ensure(defined > 0, || "no defined pair was found".into())?;
    ensure(r.cases_of("fill law") > 0, || {
        "fill law never checked".into()
    })?;
    Ok(format!("{pairs} pairs, {defined} defined; {}", summary(&r)))
}

fn load(name: &str) -> Result<escrowctl::format::DefinitionFile, String> {
    parse_definition_file(&data(name)).map_err(|e| e.to_string())
}

fn scenario(file: &str, name: &str) -> Result<Scenario, String> {
    match load(file)?.get(name) {
        Some(Definition::Scenario(s)) => Ok(s.clone()),
        _ => Err(format!("no scenario {name} in {file}")),
    }
}

fn settle_order(s: &Scenario) -> Result<Vec<String>, String> {
    let t = run(s).map_err(|e| e.to_string())?;
    Ok(t.events()
        .iter()
        .filter_map(|e| match e {
            Event::Settle { party, .. } => Some(party.clone()),
            _ => None,
        })
        .collect())
}

fn settlement() -> Verdict {
    let greedy = scenario("canonical.def", "greedy")?;
    let kind = scenario("canonical.def", "kind")?;
    let g = compare_failure_modes(&greedy).map_err(|e| e.to_string())?;
    let k = compare_failure_modes(&kind).map_err(|e| e.to_string())?;
    let expect = |report: &escrow_core::FailureReport, w1: bool, w2: bool, want: &[&str]| {
        let row = report.row(w1, w2).ok_or("missing row")?;
        ensure(row.settled == want, || {
            format!(
                "{} w1={w1} w2={w2}: settled {:?}, expected {want:?}",
                report.topology, row.settled
            )
        })
    };
    expect(&g, true, true, &["B", "C"])?;
    expect(&g, true, false, &[])?;
    expect(&g, false, true, &[])?;
    expect(&g, false, false, &[])?;
    expect(&k, true, true, &["B", "C"])?;
    expect(&k, true, false, &["C"])?;
    expect(&k, false, true, &[])?;
    expect(&k, false, false, &[])?;
    let go = settle_order(&greedy)?;
    let ko = settle_order(&kind)?;
    ensure(go == ["B", "C"], || {
        format!("greedy settles in order {go:?}")
    })?;
    ensure(ko == ["C", "B"], || format!("kind settles in order {ko:?}"))?;

    let cases = [
        "greedy",
        "greedy_w2_absent",
        "greedy_w1_absent",
        "kind",
        "kind_w2_absent",
        "kind_both_absent",
    ];
    let mut files = 0;
    for name in cases {
        for (fmt, ext) in [("text", "txt"), ("json", "json")] {
            let want =
                std::fs::read(golden(&format!("{name}.{ext}"))).map_err(|e| e.to_string())?;
            for _ in 0..2 {
                let out = cli(&[
                    "run",
                    data("canonical.def").to_str().unwrap(),
                    name,
                    "--trace",
                    fmt,
                ])?;
                ensure(out.stdout == want, || {
                    format!("{name}.{ext} differs from the golden file")
                })?;
            }
            files += 1;
        }
    }
    Ok(format!(
        "failure table matches; {files} golden traces byte-stable over 2 runs"
    ))
}

fn range(name: &str, n: usize) -> TensorObj {
    AtomObj::range(name, n).into()
}

fn random_map(rng: &mut ChaCha8Rng, dom: &TensorObj, cod: &TensorObj) -> FinMap {
    let table = (0..dom.size())
        .map(|_| rng.gen_range(0..cod.size()))
        .collect();
    FinMap::new(dom.clone(), cod.clone(), table).expect("in range")
}

fn random_escrow(rng: &mut ChaCha8Rng, x: &TensorObj, y: &TensorObj) -> Optic {
    let m = range("M", rng.gen_range(1..=3));
    let fwd = random_map(rng, x, &m.tensor(y));
    let bwd = random_map(rng, &m.tensor(x), y);
    Optic::new(escrow_shape(x, y), m, fwd, bwd).expect("valid shape")
}

fn greedy_coherence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let parties = || ["A".to_string(), "B".to_string(), "C".to_string()];
    for i in 0..100 {
        let a = range("A", rng.gen_range(1..=3));
        let b = range("B", rng.gen_range(1..=3));
        let c = range("C", rng.gen_range(1..=3));
        let k = random_escrow(&mut rng, &a, &b);
        let h = random_escrow(&mut rng, &b, &c);
        let w1 = random_map(&mut rng, &c, &b);
        let w2 = random_map(&mut rng, &b, &a);
        let init = rng.gen_range(0..a.size());
        let s = Scenario::new(
            format!("random{i}"),
            parties(),
            Topology::Greedy,
            Named::new("k", k.clone()),
            Named::new("h", h.clone()),
            Witness {
                name: "w1".into(),
                map: w1.clone(),
                present: true,
            },
            Witness {
                name: "w2".into(),
                map: w2.clone(),
                present: true,
            },
            vec![init],
        )
        .map_err(|e| e.to_string())?;
        let trace = run_greedy(&s).map_err(|e| e.to_string())?;
        let composite = diamond(&Escrow::new(k).unwrap(), &Escrow::new(h).unwrap())
            .map_err(|e| e.to_string())?;
        let w = compose(&w2, &w1).map_err(|e| e.to_string())?;
        let filled = composite.optic().fill(&w).map_err(|e| e.to_string())?;
        let want = filled.apply(init);
        ensure(trace.settlement("C") == Some(want), || {
            format!(
                "scenario {i}: C settled {:?}, diamond fill gives {want}",
                trace.settlement("C")
            )
        })?;
    }
    Ok("100 random scenarios agree".into())
}

struct CliOut {
    code: i32,
    stdout: Vec<u8>,
    stderr: String,
}

fn cli(args: &[&str]) -> Result<CliOut, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_escrowctl"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .map_err(|e| e.to_string())?;
    Ok(CliOut {
        code: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    })
}

fn cli_contract() -> Verdict {
    let p = |f: &str| data(f).to_str().unwrap().to_string();
    let text = |o: &CliOut| String::from_utf8_lossy(&o.stdout).into_owned();

    let o = cli(&[
        "compose",
        &p("memory.def"),
        "memory",
        "memory",
        "--style",
        "diamond",
    ])?;
    ensure(o.code == 0, || {
        format!("diamond of memories exited {}", o.code)
    })?;
    let nf = text(&o);
    let nf = nf.split("normal form:\n").nth(1).unwrap_or("");
    ensure(
        nf.contains("  get:\n    0 -> 0\n    1 -> 1\n")
            && nf.contains(
                "  put:\n    (0,0) -> 0\n    (0,1) -> 0\n    (1,0) -> 1\n    (1,1) -> 1\n",
            ),
        || format!("diamond of memories has normal form\n{nf}"),
    )?;

    let o = cli(&["compose", &p("emon.def"), "h", "i", "--style", "emon"])?;
    ensure(
        o.code == 0 && o.stderr.contains("equal to h (optic_eq"),
        || format!("emon with unit: exit {}, {}", o.code, o.stderr),
    )?;

    let o = cli(&[
        "compose",
        &p("vermittler.def"),
        "h_id",
        "f",
        "--style",
        "vermittler",
    ])?;
    ensure(
        o.code == 2 && text(&o).contains("first difference: "),
        || format!("vermittler mismatch: exit {}, {}", o.code, o.stderr),
    )?;

    let o = cli(&["run", &p("canonical.def"), "greedy"])?;
    ensure(
        o.code == 0 && text(&o).ends_with("settle\tB\tk\t1\nsettle\tC\th\t1\n"),
        || format!("greedy run: exit {}", o.code),
    )?;

    let o = cli(&["run", &p("canonical.def"), "kind_w2_absent"])?;
    let t = text(&o);
    ensure(
        o.code == 3 && t.contains("settle\tC\t") && t.contains("blocked\t"),
        || format!("kind run without w2: exit {}", o.code),
    )?;

    let o = cli(&["run", &p("mediated.def"), "mediated"])?;
    let t = text(&o);
    let settles: Vec<&str> = t.lines().filter(|l| l.starts_with("settle")).collect();
    ensure(
        o.code == 0
            && settles.len() == 2
            && settles[0].contains("\th\t")
            && settles[1].contains("\tf\t"),
        || format!("mediated run: exit {}, settles {settles:?}", o.code),
    )?;

    let mut files: Vec<PathBuf> = std::fs::read_dir(data(""))
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "def"))
        .collect();
    files.sort();
    ensure(files.len() >= 10, || {
        format!("corpus has {} files", files.len())
    })?;
    for f in &files {
        let parsed = parse_definition_file(f).map_err(|e| format!("{}: {e}", f.display()))?;
        let again =
            parse_definitions(&serialize(&parsed)).map_err(|e| format!("{}: {e}", f.display()))?;
        ensure(again == parsed, || {
            format!("{} does not round trip", f.display())
        })?;
    }
    Ok(format!(
        "6 exit-code examples; {} files round trip",
        files.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("sliding soundness", sliding),
        ("lens bijection", lens_bijection),
        ("diamond laws", diamond_laws),
        ("tambara strength", tambara),
        ("escrow monoid", escrow_monoid),
        ("action laws", action),
        ("vermittler laws", vermittler),
        ("settlement semantics", settlement),
        ("greedy/diamond coherence", greedy_coherence),
        ("cli contract", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = check();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({secs:.1}s)", i + 1);
                for line in why.lines() {
                    println!("    {line}");
                }
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
