//! The two example machines: verdicts, paths and DOT output.

use graphing_core::encodings::{
    classify_result, computation_dot, encode_machine, encode_word, language, run_word, BoolResult, MachineSpec, Port,
    TapeLayout,
};
use graphing_core::execution::{cycles, plug, Budget, Execution, Side, Test, Verdict};
use graphing_core::graphing::Graphing;
use graphing_core::Q;

fn machine(name: &str) -> (MachineSpec<Q>, TapeLayout, Graphing<Q>) {
    let path = format!("{}/../../machines/{name}.machine", env!("CARGO_MANIFEST_DIR"));
    let spec = MachineSpec::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
    let layout = spec.layout().unwrap();
    let g = encode_machine(&spec, &layout).unwrap();
    (spec, layout, g)
}

fn verdict(name: &str, word: &str) -> Verdict {
    let (spec, layout, g) = machine(name);
    run_word(&g, &layout, spec.states.len(), word, true, &Test::Det, Budget::default()).unwrap().2.verdict
}

/// Cells a result path goes from and to.
fn endpoints(exec: &Execution<Q>, layout: &TapeLayout) -> Vec<(Port, Port)> {
    exec.graphing
        .edges
        .iter()
        .map(|e| {
            let from = e.source.boxes()[0].cell();
            let to = from + e.realizer.shift_by();
            (layout.port_of(from).unwrap().0, layout.port_of(to).unwrap().0)
        })
        .collect()
}

#[test]
fn one_machine_verdicts() {
    assert_eq!(verdict("one", "0"), Verdict::Reject);
    assert_eq!(verdict("one", "11"), Verdict::Accept);
    assert_eq!(verdict("one", "01"), Verdict::Accept);
}

#[test]
fn ten_machine_verdicts() {
    assert_eq!(verdict("ten", "0"), Verdict::Reject);
    assert_eq!(verdict("ten", "11"), Verdict::Reject);
    assert_eq!(verdict("ten", "01"), Verdict::Accept);
}

#[test]
fn one_machine_paths() {
    let (_, layout, g) = machine("one");
    let on = |w: &str| {
        let enc = encode_word::<Q>(w, &layout, 1, false).unwrap();
        let exec = plug(&g, &enc.graphing, None, Budget::default()).unwrap();
        (endpoints(&exec, &layout), classify_result(&exec, &enc.regions).unwrap())
    };
    let (paths, result) = on("0");
    assert!(paths.contains(&(Port::Accept, Port::Reject)));
    assert!(!paths.contains(&(Port::Accept, Port::Accept)));
    assert_eq!(result, BoolResult::False);

    let (paths, result) = on("11");
    assert_eq!(paths, vec![(Port::Accept, Port::Accept)]);
    assert_eq!(result, BoolResult::True);
}

#[test]
fn empty_result_is_other() {
    let (_, layout, _) = machine("one");
    let enc = encode_word::<Q>("0", &layout, 1, false).unwrap();
    let exec = plug(&Graphing::empty(), &enc.graphing, None, Budget::default()).unwrap();
    assert_eq!(classify_result(&exec, &enc.regions).unwrap(), BoolResult::Other);
}

#[test]
fn figure_computations_are_acyclic() {
    for (name, word) in [("one", "0"), ("one", "11"), ("one", "01"), ("ten", "0"), ("ten", "11"), ("ten", "01")] {
        let (spec, layout, g) = machine(name);
        let enc = encode_word::<Q>(word, &layout, spec.states.len(), false).unwrap();
        let found = cycles(&g, &enc.graphing, None, 16).unwrap();
        assert!(found.cycles.is_empty(), "{name} on {word}");
    }
}

#[test]
fn ten_machine_continues_after_the_swap() {
    let (spec, layout, g) = machine("ten");
    for word in ["11", "01"] {
        let (_, exec, _) = run_word(&g, &layout, spec.states.len(), word, true, &Test::Det, Budget::default()).unwrap();
        let traces = exec.paths.iter().map(|p| &p.steps).chain(exec.diagnostics.stuck.iter().map(|m| &m.steps));
        let after_swap = traces.into_iter().any(|steps| {
            let k = steps.iter().position(|s| s.side == Side::F && !g.edges[s.edge].realizer.perm().is_identity());
            matches!(k, Some(k) if k + 1 < steps.len())
        });
        assert!(after_swap, "{word}");
    }
}

#[test]
fn small_languages() {
    let (spec, layout, g) = machine("one");
    let rep = language(&g, &layout, &Test::Det, 3, true, spec.states.len(), Budget::default()).unwrap();
    assert_eq!(rep.accepted, ["1", "01", "10", "11", "001", "010", "011", "100", "101", "110", "111"]);

    let (spec, layout, g) = machine("ten");
    let rep = language(&g, &layout, &Test::Det, 2, true, spec.states.len(), Budget::default()).unwrap();
    assert_eq!(rep.accepted, ["01", "10"]);

    let text = "alphabet: 0 1\nheads: 1\nstates: S\nmode: det\ntwoway: false\nS, 0 -> advance\nS, 1 -> reject\n";
    let spec = MachineSpec::<Q>::parse(text).unwrap();
    let layout = spec.layout().unwrap();
    let g = encode_machine(&spec, &layout).unwrap();
    assert!(language(&g, &layout, &Test::Det, 3, true, 1, Budget::default()).unwrap().accepted.is_empty());
}

#[test]
fn figure_dot_bolds_accepting_paths_only() {
    for (name, word, bold) in [("one", "0", false), ("one", "11", true), ("ten", "11", false), ("ten", "01", true)] {
        let (spec, layout, g) = machine(name);
        let (enc, exec, outcome) = run_word(&g, &layout, spec.states.len(), word, false, &Test::Det, Budget::default()).unwrap();
        let dot = computation_dot(&spec, &layout, &g, &enc, &exec, &outcome);
        assert_eq!(dot.contains("penwidth=3"), bold, "{name} on {word}");
        assert_eq!(dot.contains("style=dashed"), name == "ten");
    }
}

#[test]
fn compiling_the_one_machine_keeps_its_language() {
    let (spec, _, _) = machine("one");
    let r = graphing_core::equivalence::compile_experiment(&spec, &Test::Det, 4, Budget::default()).unwrap();
    assert!(r.languages_equal());
    assert_eq!(r.cost_before, r.cost_after);
    assert_eq!(r.cost_before, r.cost_split);
    assert_eq!(r.edges_after, r.edges_before);
}
