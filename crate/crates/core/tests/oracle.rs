use cpbpv_core::brute::{brute_force_verify, BruteOptions};
use cpbpv_core::corpus::{self, FIND_MIN};
use cpbpv_core::interp::{postcondition_violated, precondition_holds, InterpOptions, Outcome};
use cpbpv_core::{concrete_interpret, explore, Contract, ExecOptions, VerdictKind};

#[test]
fn corpus_agrees_with_enumeration_at_four_bits() {
    let mut programs: Vec<(String, cpbpv_core::ProgramAst, Vec<cpbpv_core::frontend::Function>)> = Vec::new();
    for b in corpus::corpus() {
        for n in 1..=3 {
            let (ast, callees) = b.at(n).unwrap();
            programs.push((format!("{} N={n}", b.name), ast, callees));
        }
    }
    for n in 1..=3 {
        programs.push((format!("find_min N={n}"), corpus::instantiate(FIND_MIN, &[("N", n)]).unwrap(), vec![]));
    }
    for (name, ast, callees) in programs {
        let contracts: Vec<Contract> = callees.iter().map(Contract::from).collect();
        let sym = explore(&ast, &contracts, &ExecOptions::with_bits(4)).unwrap();
        let brute = brute_force_verify(&ast, &callees, &BruteOptions::default()).unwrap();
        assert_eq!(sym.verdict, brute.verdict, "{name}");
        if sym.verdict == VerdictKind::PartiallyCorrect {
            assert_eq!(sym.stats.feasible_paths as usize, brute.feasible_traces, "{name}");
        }
    }
}

#[test]
fn random_programs_agree_with_enumeration() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut violations = 0;
    for _ in 0..200 {
        let src = cpbpv_core::generate::random_program(&mut rng);
        let ast = cpbpv_core::parse_program(&src).unwrap();
        let sym = explore(&ast, &[], &ExecOptions::with_bits(4)).unwrap();
        let brute = brute_force_verify(&ast, &[], &BruteOptions::default()).unwrap();
        assert_eq!(sym.verdict, brute.verdict, "{src}");
        if let Some(v) = &sym.violation {
            violations += 1;
            assert!(precondition_holds(&ast, &v.witness), "{src}");
            let opts = InterpOptions {
                bits: 4,
                ..InterpOptions::default()
            };
            let run = concrete_interpret(&ast, &v.witness, &[], &opts).unwrap();
            assert_eq!(run.trace, v.trace, "{src}");
            match v.kind {
                VerdictKind::PostconditionViolation => assert!(postcondition_violated(&ast, &run), "{src}"),
                VerdictKind::AssertionViolation => {
                    assert!(matches!(run.outcome, Outcome::AssertionFailed { .. }), "{src}")
                }
                k => panic!("unexpected {k:?}"),
            }
        }
    }
    assert!(violations > 20 && violations < 180, "{violations}");
}
