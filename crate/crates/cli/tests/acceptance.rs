//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines show under a plain `cargo test`.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use graphing_core::encodings::{computation_dot, encode_machine, language, run_word, MachineSpec, TapeLayout};
use graphing_core::equivalence::{compile_experiment, separation_experiment, treeing_cost};
use graphing_core::execution::{Budget, Test, Verdict};
use graphing_core::graphing::{Class, Graphing};
use graphing_core::oracle::{oracle_language, pfa_probabilities};
use graphing_core::random::{associativity_experiment, closure_experiment};
use graphing_core::{Scalar, Q};
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn machine_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../machines").join(format!("{name}.machine"))
}

fn machine(name: &str) -> (MachineSpec<Q>, TapeLayout, Graphing<Q>) {
    let text = std::fs::read_to_string(machine_path(name)).expect("machine file");
    let spec = MachineSpec::parse(&text).expect("parses");
    let layout = spec.layout().expect("layout");
    let g = encode_machine(&spec, &layout).expect("encodes");
    (spec, layout, g)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn graphing_language(name: &str, test: &Test<Q>, max_len: usize) -> Result<(Vec<String>, Vec<String>), String> {
    let (spec, layout, g) = machine(name);
    let report = language(&g, &layout, test, max_len, !spec.two_way, spec.states.len(), Budget::default())
        .map_err(|e| e.to_string())?;
    ensure(report.undetermined.is_empty(), format!("{name}: undetermined {:?}", report.undetermined))?;
    let expected = oracle_language(&spec, test, max_len).map_err(|e| e.to_string())?;
    Ok((report.accepted, expected))
}

fn golden() -> Check {
    let cases = [
        ("one", "0", Verdict::Reject),
        ("one", "11", Verdict::Accept),
        ("one", "01", Verdict::Accept),
        ("ten", "0", Verdict::Reject),
        ("ten", "11", Verdict::Reject),
        ("ten", "01", Verdict::Accept),
    ];
    for (name, word, want) in cases {
        let start = Instant::now();
        let (spec, layout, g) = machine(name);
        let (enc, exec, outcome) = run_word(&g, &layout, spec.states.len(), word, true, &Test::Det, Budget::default())
            .map_err(|e| e.to_string())?;
        let took = start.elapsed();
        ensure(outcome.verdict == want, format!("{name} on {word:?}: {} instead of {want}", outcome.verdict))?;
        ensure(took < Duration::from_secs(1), format!("{name} on {word:?} took {took:?}"))?;
        let dot = computation_dot(&spec, &layout, &g, &enc, &exec, &outcome);
        let bold = dot.contains("bold=true");
        ensure(bold == (want == Verdict::Accept), format!("{name} on {word:?}: bold edges {bold}"))?;
    }
    Ok(format!("{} verdicts, each under 1s, accepting paths bold", cases.len()))
}

fn deterministic() -> Check {
    let names = ["one", "ten", "endsone", "samefirstlast", "bounce"];
    for name in names {
        let (got, want) = graphing_language(name, &Test::Det, 8)?;
        ensure(got == want, format!("{name}: {got:?} vs {want:?}"))?;
    }
    Ok(format!("{} deterministic machines agree on all words up to length 8", names.len()))
}

fn nondeterministic() -> Check {
    let names = ["factor10", "wander", "echo"];
    for name in names {
        for test in [Test::Nl, Test::CoNl] {
            let (got, want) = graphing_language(name, &test, 6)?;
            ensure(got == want, format!("{name} {}: {got:?} vs {want:?}", test.name()))?;
        }
    }
    Ok(format!("{} machines agree under both tests up to length 6", names.len()))
}

fn probabilistic() -> Check {
    let names = ["coin", "relay", "leaky"];
    let test = Test::prob(Q::frac(1, 2)).map_err(|e| e.to_string())?;
    let mut words = 0;
    for name in names {
        let (spec, layout, g) = machine(name);
        let report = language(&g, &layout, &test, 5, !spec.two_way, spec.states.len(), Budget::default())
            .map_err(|e| e.to_string())?;
        for (w, o) in &report.outcomes {
            let exact = pfa_probabilities(&spec, w).map_err(|e| e.to_string())?.accept;
            ensure(o.accept_mass == exact, format!("{name} on {w:?}: {} vs {}", o.accept_mass.to_pq(), exact.to_pq()))?;
            words += 1;
        }
        let want = oracle_language(&spec, &test, 5).map_err(|e| e.to_string())?;
        ensure(report.accepted == want, format!("{name}: cutpoint languages differ"))?;
    }
    Ok(format!("exact accept mass on {words} words, cutpoint 1/2 languages agree"))
}

fn closure() -> Check {
    let mut parts = Vec::new();
    for class in [Class::Deterministic, Class::NonDeterministic, Class::Probabilistic] {
        let r = closure_experiment::<Q>(1, 200, class).map_err(|e| e.to_string())?;
        ensure(r.checked == 200 && r.all_pass(), format!("{class}: {r:?}"))?;
        parts.push(format!("{class} {}/{}", r.passed, r.checked));
    }
    Ok(parts.join(", "))
}

fn associativity() -> Check {
    let r = associativity_experiment::<Q>(1, 100).map_err(|e| e.to_string())?;
    ensure(r.checked == 100 && r.all_pass(), format!("{r:?}"))?;
    Ok(format!("{}/{} triples", r.passed, r.checked))
}

fn treeing() -> Check {
    let e = |x: graphing_core::Error| x.to_string();
    // sum of 2^(-d-1) over 1 <= d <= depth
    let mut series = Q::frac(0, 1);
    for depth in 0..=20u32 {
        if depth > 0 {
            series += Q::frac(1, 1i64 << (depth + 1));
        }
        let c = treeing_cost::<Q>(2, depth).map_err(e)?;
        ensure(c.partial == series, format!("depth {depth}: {} vs {}", c.partial.to_pq(), series.to_pq()))?;
        let tail = Q::frac(1, 2) - Q::frac(1, 1i64 << (depth + 1));
        ensure(c.partial == tail, format!("depth {depth}: closed form {}", tail.to_pq()))?;
    }
    for (i, total) in [(2, Q::frac(1, 2)), (3, Q::frac(5, 6)), (4, Q::frac(23, 24))] {
        let mut last = Q::frac(0, 1);
        for depth in 0..=6 {
            let c = treeing_cost::<Q>(i, depth).map_err(e)?;
            ensure(c.total == total, format!("i={i}: total {}", c.total.to_pq()))?;
            ensure(c.partial >= last && c.partial <= c.total, format!("i={i} depth {depth}: not monotone"))?;
            last = c.partial;
        }
    }
    Ok("depth series matches up to 20, totals 1/2, 5/6, 23/24, partial costs monotone".into())
}

fn compile() -> Check {
    let (spec, _, _) = machine("one");
    let r = compile_experiment(&spec, &Test::Det, 8, Budget::default()).map_err(|e| e.to_string())?;
    ensure(r.languages_equal(), "languages differ")?;
    ensure(r.cost_split == r.cost_after, "splitting changed the cost")?;
    Ok(format!("{} edges, cost {} before and after splitting", r.edges_after, r.cost_after.to_pq()))
}

fn separation() -> Check {
    for (i, j) in [(2, 3), (2, 4)] {
        let r = separation_experiment::<Q>(i, j, 6, 8).map_err(|e| e.to_string())?;
        ensure(r.consistent(), format!("({i}, {j}) inconsistent"))?;
    }
    Ok("(2,3) and (2,4): costs differ, no compilation within length 6 and 8 parts".into())
}

/// Every number in a report is an integer count; rationals appear only as
/// `p/q` strings.
fn scan(v: &Value, bad: &mut Vec<String>) {
    match v {
        Value::Number(n) => {
            if !(n.is_i64() || n.is_u64()) {
                bad.push(n.to_string());
            }
        }
        Value::String(s) => {
            let numeric = !s.is_empty() && s.chars().all(|c| c.is_ascii_digit() || "-./eE+".contains(c));
            let pq = s.split_once('/').is_some_and(|(p, q)| {
                p.trim_start_matches('-').chars().all(|c| c.is_ascii_digit()) && q.chars().all(|c| c.is_ascii_digit())
            });
            if numeric && s.chars().any(|c| c.is_ascii_digit()) && !pq && s.parse::<i64>().is_err() {
                bad.push(s.clone());
            }
        }
        Value::Array(xs) => xs.iter().for_each(|x| scan(x, bad)),
        Value::Object(m) => m.values().for_each(|x| scan(x, bad)),
        _ => {}
    }
}

fn no_floats() -> Check {
    let out = std::env::temp_dir().join(format!("gvm-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&out);
    let one = machine_path("one");
    let coin = machine_path("coin");
    let runs: Vec<Vec<String>> = vec![
        vec!["experiment".into(), "cost".into(), "--i".into(), "3".into(), "--depth".into(), "8".into()],
        vec!["experiment".into(), "separation".into(), "--i".into(), "2".into(), "--j".into(), "3".into()],
        vec!["experiment".into(), "closure".into(), "--n".into(), "20".into()],
        vec!["experiment".into(), "associativity".into(), "--n".into(), "20".into()],
        vec!["experiment".into(), "compile".into(), one.display().to_string(), "--max-len".into(), "4".into()],
        vec!["run".into(), coin.display().to_string(), "01".into(), "--json".into()],
        vec!["language".into(), coin.display().to_string(), "--max-len".into(), "3".into(), "--json".into()],
    ];
    for args in &runs {
        let status = Command::new(env!("CARGO_BIN_EXE_gvm"))
            .args(args)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), format!("gvm {} exited with {}", args.join(" "), status.status))?;
    }
    let mut lines = 0;
    let mut bad = Vec::new();
    for entry in std::fs::read_dir(&out).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        for line in text.lines() {
            let v: Value = serde_json::from_str(line).map_err(|e| format!("{}: {e}", path.display()))?;
            scan(&v, &mut bad);
            lines += 1;
        }
    }
    let _ = std::fs::remove_dir_all(&out);
    ensure(lines > 0, "no reports written")?;
    ensure(bad.is_empty(), format!("non-exact numbers: {bad:?}"))?;
    Ok(format!("{lines} report lines, all rationals exact p/q"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("golden verdicts and figures", golden),
        ("deterministic languages", deterministic),
        ("nondeterministic languages", nondeterministic),
        ("probabilistic acceptance", probabilistic),
        ("closure under plugging", closure),
        ("associativity", associativity),
        ("treeing costs", treeing),
        ("compilation", compile),
        ("separation", separation),
        ("exact reports", no_floats),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1}s)", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
