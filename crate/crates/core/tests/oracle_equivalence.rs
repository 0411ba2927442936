//! Graphing languages against direct simulation.

use graphing_core::encodings::{encode_machine, language, run_word, words_up_to, MachineSpec, Mode};
use graphing_core::execution::{Budget, Test};
use graphing_core::oracle::{oracle_language, pfa_probabilities};
use graphing_core::random::{random_machine, rng};
use graphing_core::{Scalar, Q};

fn machine(name: &str) -> MachineSpec<Q> {
    let path = format!("{}/../../machines/{name}.machine", env!("CARGO_MANIFEST_DIR"));
    MachineSpec::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn half() -> Test<Q> {
    Test::prob(Q::frac(1, 2)).unwrap()
}

fn check(spec: &MachineSpec<Q>, test: &Test<Q>, max_len: usize) {
    let layout = spec.layout().unwrap();
    let m = encode_machine(spec, &layout).unwrap();
    let rep = language(&m, &layout, test, max_len, !spec.two_way, spec.states.len(), Budget::default()).unwrap();
    assert!(rep.undetermined.is_empty(), "{} {}: undetermined {:?}", spec.name, test.name(), rep.undetermined);
    assert_eq!(rep.accepted, oracle_language(spec, test, max_len).unwrap(), "{}\n{}", test.name(), spec.to_text());
}

#[test]
fn shipped_deterministic_machines() {
    for name in ["one", "ten", "endsone", "samefirstlast", "bounce"] {
        check(&machine(name), &Test::Det, 5);
    }
}

#[test]
fn shipped_nondeterministic_machines() {
    for name in ["factor10", "wander", "echo"] {
        check(&machine(name), &Test::Nl, 4);
        check(&machine(name), &Test::CoNl, 4);
    }
}

#[test]
fn shipped_probabilistic_machines_have_exact_masses() {
    for name in ["coin", "relay", "leaky"] {
        let spec = machine(name);
        let layout = spec.layout().unwrap();
        let m = encode_machine(&spec, &layout).unwrap();
        for w in words_up_to(&spec.alphabet, 4) {
            let (_, _, o) = run_word(&m, &layout, spec.states.len(), &w, true, &half(), Budget::default()).unwrap();
            let p = pfa_probabilities(&spec, &w).unwrap();
            assert_eq!(o.accept_mass, p.accept, "{name} on {w:?}");
        }
        check(&spec, &half(), 4);
    }
}

#[test]
fn random_machines_agree_with_the_oracle() {
    let mut r = rng(2024);
    for trial in 0..24 {
        let mode = [Mode::Det, Mode::NonDet, Mode::Prob][trial % 3];
        let heads = 1 + (trial / 3 % 2) as u32;
        let two_way = mode != Mode::Prob && trial / 6 % 2 == 1;
        let spec = random_machine::<Q>(&mut r, heads, 3, mode, two_way);
        match mode {
            Mode::Det => check(&spec, &Test::Det, 4),
            Mode::NonDet => {
                check(&spec, &Test::Nl, 3);
                check(&spec, &Test::CoNl, 3);
            }
            Mode::Prob => check(&spec, &half(), 3),
        }
    }
}
