//! `gvm`: run machine files as graphings and reproduce the experiments.
//!
//! Exit codes: 0 ok, 1 graphing/oracle mismatch or failed check, 2 usage,
//! 3 undetermined verdict, 4 parse error, 5 anything else.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphing_core::encodings::{computation_dot, encode_machine, encode_word, language, run_word, Mode, TapeLayout};
use graphing_core::equivalence::{compile_experiment, separation_experiment, treeing_cost};
use graphing_core::execution::{Budget, Test, Verdict};
use graphing_core::graphing::Class;
use graphing_core::oracle::{oracle_accepts, pfa_probabilities};
use graphing_core::random::{associativity_experiment, closure_experiment};
use graphing_core::{Error, MachineSpec, Scalar, Q};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gvm", version, about = "Multihead automata executed as graphings, with exact arithmetic")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunConfig {
    /// Longest alternating path explored per execution.
    #[arg(long, global = true, default_value_t = 10_000)]
    max_steps: usize,
    /// Longest word enumerated by `language` and `experiment compile`.
    #[arg(long, global = true, default_value_t = 6)]
    max_len: usize,
    /// Cutpoint of the probabilistic test, as p/q.
    #[arg(long, global = true, default_value = "1/2")]
    cutpoint: String,
    /// Truncation depth for treeing costs.
    #[arg(long, global = true, default_value_t = 20)]
    depth: u32,
    /// Directory for traces, DOT files and reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write JSON-lines traces (run) or reports (language) to the output directory.
    #[arg(long, global = true)]
    json: bool,
    /// Write DOT renderings to the output directory (run), or print DOT (encode).
    #[arg(long, global = true)]
    dot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a machine on one word.
    Run {
        machine: PathBuf,
        /// Use "" for the empty word.
        word: String,
        #[arg(long, value_enum)]
        test: Option<TestArg>,
    },
    /// Compare the graphing's language with direct simulation on all short words.
    Language {
        machine: PathBuf,
        #[arg(long, value_enum)]
        test: Option<TestArg>,
    },
    /// Reproducible experiments; each prints one JSON report per line.
    Experiment {
        #[command(subcommand)]
        kind: ExperimentKind,
    },
    /// Print the graphing of a word or a machine.
    Encode {
        #[command(subcommand)]
        what: EncodeKind,
    },
    /// Parse and check machine files.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExperimentKind {
    /// Cost of the depth-truncated treeing of the symmetric group action.
    Cost {
        #[arg(long, default_value_t = 2)]
        i: u32,
    },
    /// Decompose a machine into generator words and compare languages.
    Compile {
        machine: PathBuf,
        #[arg(long, value_enum)]
        test: Option<TestArg>,
    },
    /// Bounded search for the swap of heads 1 and j among words over m_i.
    Separation {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
        #[arg(long, default_value_t = 6)]
        max_word_len: usize,
        #[arg(long, default_value_t = 8)]
        max_parts: usize,
    },
    /// Class preservation of plugging random graphings.
    Closure {
        #[arg(long, value_enum, default_value_t = ClassArg::All)]
        class: ClassArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
    /// Associativity of plugging on random chained triples.
    Associativity {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum EncodeKind {
    Word {
        word: String,
        #[arg(long, default_value = "01")]
        alphabet: String,
        #[arg(long, default_value_t = 1)]
        heads: u32,
        #[arg(long, default_value_t = 1)]
        rows: usize,
        #[arg(long)]
        one_way: bool,
    },
    Machine {
        machine: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TestArg {
    Det,
    Nl,
    Conl,
    Prob,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    Det,
    Nondet,
    Prob,
    All,
}

enum Failure {
    Mismatch(String),
    Undetermined(String),
    Parse(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::UnknownSymbol(_) => Failure::Parse(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = check_config(&cli.config).and_then(|()| dispatch(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, kind, msg) = match f {
                Failure::Mismatch(m) => (1, "mismatch", m),
                Failure::Undetermined(m) => (3, "undetermined", m),
                Failure::Parse(m) => (4, "parse error", m),
                Failure::Other(m) => (5, "error", m),
            };
            eprintln!("gvm: {kind}: {msg}");
            ExitCode::from(code)
        }
    }
}

fn check_config(c: &RunConfig) -> Outcome {
    if c.max_steps == 0 {
        return Err(Failure::Other("--max-steps must be positive".into()));
    }
    cutpoint(c).map(|_| ())
}

fn cutpoint(c: &RunConfig) -> Result<Q, Failure> {
    let p = Q::parse_pq(&c.cutpoint).ok_or_else(|| Failure::Parse(format!("bad cutpoint {:?}, expected p/q", c.cutpoint)))?;
    Ok(p)
}

fn dispatch(cli: &Cli) -> Outcome {
    let c = &cli.config;
    match &cli.command {
        Command::Run { machine, word, test } => run(c, machine, word, *test),
        Command::Language { machine, test } => language_cmd(c, machine, *test),
        Command::Experiment { kind } => experiment(c, kind),
        Command::Encode { what } => encode(c, what),
        Command::Validate { files } => validate(files),
    }
}

fn load(path: &Path) -> Result<MachineSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    MachineSpec::parse(&text).map_err(|e| match Failure::from(e) {
        Failure::Parse(m) => Failure::Parse(format!("{}: {m}", path.display())),
        Failure::Other(m) => Failure::Other(format!("{}: {m}", path.display())),
        f => f,
    })
}

fn test_for(c: &RunConfig, spec: &MachineSpec, arg: Option<TestArg>) -> Result<Test<Q>, Failure> {
    let arg = arg.unwrap_or(match spec.mode {
        Mode::Det => TestArg::Det,
        Mode::NonDet => TestArg::Nl,
        Mode::Prob => TestArg::Prob,
    });
    Ok(match arg {
        TestArg::Det => Test::Det,
        TestArg::Nl => Test::Nl,
        TestArg::Conl => Test::CoNl,
        TestArg::Prob => Test::prob(cutpoint(c)?)?,
    })
}

fn budget(c: &RunConfig) -> Budget {
    Budget::steps(c.max_steps)
}

fn out_dir(c: &RunConfig) -> Result<PathBuf, Failure> {
    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_lines(path: &Path, lines: &[Value]) -> Outcome {
    let mut text = String::new();
    for l in lines {
        text.push_str(&l.to_string());
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

fn shown(word: &str) -> &str {
    if word.is_empty() {
        "ε"
    } else {
        word
    }
}

fn file_stem(word: &str) -> &str {
    if word.is_empty() {
        "empty"
    } else {
        word
    }
}

fn run(c: &RunConfig, path: &Path, word: &str, test: Option<TestArg>) -> Outcome {
    let spec = load(path)?;
    let test = test_for(c, &spec, test)?;
    let layout = spec.layout()?;
    let machine = encode_machine(&spec, &layout)?;
    let rows = spec.states.len();
    let (enc, exec, outcome) = run_word(&machine, &layout, rows, word, !spec.two_way, &test, budget(c))?;
    println!("machine: {}", spec.name);
    println!("word: {}", shown(word));
    println!("test: {}", test.name());
    println!("verdict: {}", outcome.verdict);
    println!("accept mass: {}", outcome.accept_mass.to_pq());
    println!("reject mass: {}", outcome.reject_mass.to_pq());
    println!("unresolved mass: {}", outcome.unresolved_mass.to_pq());
    println!("paths: {}", exec.paths.len());
    let stem = format!("{}-{}", spec.name, file_stem(word));
    if c.json {
        let mut lines = exec.trace_json(&machine, &enc.graphing);
        lines.push(json!({
            "kind": "verdict",
            "machine": spec.name,
            "word": word,
            "test": test.name(),
            "verdict": outcome.verdict.to_string(),
            "accept_mass": outcome.accept_mass.to_pq(),
            "reject_mass": outcome.reject_mass.to_pq(),
            "unresolved_mass": outcome.unresolved_mass.to_pq(),
        }));
        let file = out_dir(c)?.join(format!("{stem}.jsonl"));
        write_lines(&file, &lines)?;
        println!("trace: {}", file.display());
    }
    if c.dot {
        let file = out_dir(c)?.join(format!("{stem}.dot"));
        fs::write(&file, computation_dot(&spec, &layout, &machine, &enc, &exec, &outcome))?;
        println!("dot: {}", file.display());
    }
    if outcome.verdict == Verdict::Undetermined {
        return Err(Failure::Undetermined(format!("budget of {} steps exhausted", c.max_steps)));
    }
    Ok(())
}

fn language_cmd(c: &RunConfig, path: &Path, test: Option<TestArg>) -> Outcome {
    let spec = load(path)?;
    let test = test_for(c, &spec, test)?;
    let layout = spec.layout()?;
    let machine = encode_machine(&spec, &layout)?;
    let report = language(&machine, &layout, &test, c.max_len, !spec.two_way, spec.states.len(), budget(c))?;
    let prob = matches!(test, Test::Prob(_));
    let mut mismatches = 0;
    let mut lines = Vec::new();
    println!("# machine {} test {} max-len {}", spec.name, test.name(), c.max_len);
    for (word, outcome) in &report.outcomes {
        let expected = oracle_accepts(&spec, &test, word)?;
        let agrees = match outcome.verdict {
            Verdict::Accept => expected,
            Verdict::Reject => !expected,
            Verdict::Undetermined => true,
        };
        let mut line = json!({
            "kind": "word",
            "word": word,
            "verdict": outcome.verdict.to_string(),
            "oracle": if expected { "accept" } else { "reject" },
            "agrees": agrees,
        });
        let mut row = format!(
            "{}\t{}\t{}",
            shown(word),
            outcome.verdict,
            if expected { "accept" } else { "reject" }
        );
        if prob {
            let exact = pfa_probabilities(&spec, word)?.accept;
            let same = exact == outcome.accept_mass;
            row.push_str(&format!("\t{}\t{}", outcome.accept_mass.to_pq(), exact.to_pq()));
            line["accept_mass"] = json!(outcome.accept_mass.to_pq());
            line["oracle_accept"] = json!(exact.to_pq());
            if !same && outcome.unresolved_mass == Q::from_int(0) {
                line["agrees"] = json!(false);
            }
        }
        if line["agrees"] == json!(false) {
            mismatches += 1;
            row.push_str("\tMISMATCH");
        }
        println!("{row}");
        lines.push(line);
    }
    let summary = json!({
        "kind": "language",
        "machine": spec.name,
        "test": test.name(),
        "max_len": c.max_len,
        "accepted": report.accepted,
        "undetermined": report.undetermined,
        "mismatches": mismatches,
    });
    println!("{summary}");
    lines.push(summary);
    if c.json {
        write_lines(&out_dir(c)?.join(format!("{}-language.jsonl", spec.name)), &lines)?;
    }
    if mismatches > 0 {
        return Err(Failure::Mismatch(format!("{mismatches} words disagree with direct simulation")));
    }
    if !report.undetermined.is_empty() {
        return Err(Failure::Undetermined(format!("{} words undetermined", report.undetermined.len())));
    }
    Ok(())
}

/// Print reports and, with `--out`, append them to `<out>/<name>.jsonl`.
fn emit(c: &RunConfig, name: &str, reports: &[Value]) -> Outcome {
    for r in reports {
        println!("{r}");
    }
    if c.out.is_some() {
        write_lines(&out_dir(c)?.join(format!("{name}.jsonl")), reports)?;
    }
    Ok(())
}

fn experiment(c: &RunConfig, kind: &ExperimentKind) -> Outcome {
    match kind {
        ExperimentKind::Cost { i } => {
            let reports = (0..=c.depth)
                .map(|d| treeing_cost::<Q>(*i, d).map(|t| t.to_json()))
                .collect::<Result<Vec<_>, _>>()?;
            emit(c, "cost", &reports)
        }
        ExperimentKind::Compile { machine, test } => {
            let spec = load(machine)?;
            let test = test_for(c, &spec, *test)?;
            let report = compile_experiment(&spec, &test, c.max_len, budget(c))?;
            emit(c, "compile", &[report.to_json()])?;
            if !report.languages_equal() {
                return Err(Failure::Mismatch("languages differ after compilation".into()));
            }
            Ok(())
        }
        ExperimentKind::Separation { i, j, max_word_len, max_parts } => {
            let report = separation_experiment::<Q>(*i, *j, *max_word_len, *max_parts)?;
            emit(c, "separation", &[report.to_json()])?;
            if !report.consistent() {
                return Err(Failure::Mismatch("separation check inconsistent".into()));
            }
            Ok(())
        }
        ExperimentKind::Closure { class, seed, n } => {
            let classes: Vec<Class> = match class {
                ClassArg::Det => vec![Class::Deterministic],
                ClassArg::Nondet => vec![Class::NonDeterministic],
                ClassArg::Prob => vec![Class::Probabilistic],
                ClassArg::All => vec![Class::Deterministic, Class::NonDeterministic, Class::Probabilistic],
            };
            let mut reports = Vec::new();
            let mut ok = true;
            for class in classes {
                let r = closure_experiment::<Q>(*seed, *n, class)?;
                ok &= r.all_pass() && r.checked == *n;
                reports.push(r.to_json());
            }
            emit(c, "closure", &reports)?;
            if !ok {
                return Err(Failure::Mismatch("closure check failed".into()));
            }
            Ok(())
        }
        ExperimentKind::Associativity { seed, n } => {
            let r = associativity_experiment::<Q>(*seed, *n)?;
            emit(c, "associativity", &[r.to_json()])?;
            if !(r.all_pass() && r.checked == *n) {
                return Err(Failure::Mismatch("associativity check failed".into()));
            }
            Ok(())
        }
    }
}

fn encode(c: &RunConfig, what: &EncodeKind) -> Outcome {
    let (title, graphing, layout, states) = match what {
        EncodeKind::Word { word, alphabet, heads, rows, one_way } => {
            let alphabet: Vec<char> = alphabet.chars().collect();
            let layout = TapeLayout::new(&alphabet, *heads)?;
            let enc = encode_word::<Q>(word, &layout, *rows, *one_way)?;
            (format!("*{word}"), enc.graphing, layout, Vec::new())
        }
        EncodeKind::Machine { machine } => {
            let spec = load(machine)?;
            let layout = spec.layout()?;
            let g = encode_machine(&spec, &layout)?;
            (spec.name.clone(), g, layout, spec.states)
        }
    };
    let text = if c.dot {
        graphing.to_dot(&title, &|cell| layout.cell_name(cell, &states), &Default::default())
    } else {
        format!("{}\n", graphing.to_json())
    };
    print!("{text}");
    if let Some(dir) = &c.out {
        fs::create_dir_all(dir)?;
        let ext = if c.dot { "dot" } else { "json" };
        fs::write(dir.join(format!("{}.{ext}", title.trim_start_matches('*'))), &text)?;
    }
    Ok(())
}

fn validate(files: &[PathBuf]) -> Outcome {
    let mut first: Option<Failure> = None;
    for path in files {
        let checked = load(path).and_then(|spec| {
            let layout = spec.layout()?;
            let g = encode_machine(&spec, &layout)?;
            g.validate().map_err(|v| Failure::Other(format!("{}: invalid graphing: {v:?}", path.display())))?;
            Ok((spec, g))
        });
        match checked {
            Ok((spec, g)) => println!(
                "ok {} name={} mode={} heads={} states={} edges={} class={}",
                path.display(),
                spec.name,
                spec.mode,
                spec.heads,
                spec.states.len(),
                g.edges.len(),
                g.classify()
            ),
            Err(f) => {
                let msg = match &f {
                    Failure::Parse(m) | Failure::Other(m) | Failure::Mismatch(m) | Failure::Undetermined(m) => m.clone(),
                };
                println!("error {msg}");
                first.get_or_insert(f);
            }
        }
    }
    first.map_or(Ok(()), Err)
}
