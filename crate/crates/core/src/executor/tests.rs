use super::*;
use crate::corpus;
use crate::frontend::parse_program;
use crate::interp::{concrete_interpret, InterpOptions, Outcome};
use crate::renaming::{ArrayRef, VarRef};

fn run(ast: &ProgramAst, bits: u32) -> VerificationReport {
    explore(ast, &[], &ExecOptions::with_bits(bits)).unwrap()
}

fn src(body: &str) -> ProgramAst {
    parse_program(body).unwrap()
}

#[test]
fn first_two_assignments_of_binary_search() {
    let (ast, _) = corpus::find("binary_search").unwrap().at(8).unwrap();
    let opts = ExecOptions::default();
    let c0 = Configuration::initial(&ast).unwrap();
    let c1 = step(&ast, &[], &c0, &opts).unwrap().remove(0);
    let c2 = step(&ast, &[], &c1, &opts).unwrap().remove(0);
    let tail: Vec<String> = c2.store.iter().skip(1).map(|c| c.to_string()).collect();
    assert_eq!(tail, ["l^0 == 0", "u^0 == 7"]);
    assert_eq!(c2.sigma.version("l"), Some(0));
    assert_eq!(c2.sigma.version("u"), Some(0));
}

#[test]
fn conditional_gives_two_successors() {
    let (ast, _) = corpus::find("binary_search").unwrap().at(8).unwrap();
    let opts = ExecOptions::default();
    let mut cfg = Configuration::initial(&ast).unwrap();
    // l, u, while (true), body block, m
    for _ in 0..5 {
        cfg = step(&ast, &[], &cfg, &opts).unwrap().remove(0);
    }
    assert_eq!(cfg.consts.get(&VarRef::new("m", 0)), Some(&3));
    let succ = step(&ast, &[], &cfg, &opts).unwrap();
    assert_eq!(succ.len(), 2);
    let last = |c: &Configuration| c.store.constraints().last().unwrap().to_string();
    assert_eq!(last(&succ[0]), "t^0[3] == v^0");
    assert_eq!(last(&succ[1]), "t^0[3] != v^0");
    assert_eq!(format_trace(&succ[0].trace), "<T4,T6>");
}

#[test]
fn array_write_at_variable_index_posts_frames() {
    let ast = src("requires 0 <= e && e < 3\nfn f(int[3] a, int e, int x) { a[e] = x; }");
    let cfg = Configuration::initial(&ast).unwrap();
    let next = step(&ast, &[], &cfg, &ExecOptions::default()).unwrap().remove(0);
    let posted: Vec<String> = next.store.iter().map(|c| c.to_string()).collect();
    assert_eq!(posted.len(), 1 + 2 + 1 + 3);
    assert_eq!(posted[3], "a^1[e^0] == x^0");
    assert_eq!(posted[4], "(e^0 != 0 ==> a^1[0] == a^0[0])");

    // every model agrees with a concrete array update
    let frames = &next.store.constraints()[3..];
    for e in 0..3i64 {
        for x in [-1, 5] {
            let mut m = Model::default();
            m.scalars.insert(VarRef::new("e", 0), e);
            m.scalars.insert(VarRef::new("x", 0), x);
            let old = vec![10, 20, 30];
            let mut new = old.clone();
            new[e as usize] = x;
            m.arrays.insert(ArrayRef::new("a", 0, 3), old.clone());
            m.arrays.insert(ArrayRef::new("a", 1, 3), new.clone());
            assert!(m.satisfies_all(frames));
            let mut wrong = new.clone();
            wrong[(e as usize + 1) % 3] += 1;
            m.arrays.insert(ArrayRef::new("a", 1, 3), wrong);
            assert!(!m.satisfies_all(frames));
        }
    }
}

#[test]
fn entailed_assert_keeps_store() {
    let ast = src("requires x == 3\nfn f(int x) { assert(x >= 0); }");
    let cfg = Configuration::initial(&ast).unwrap();
    let next = step(&ast, &[], &cfg, &ExecOptions::default()).unwrap();
    assert_eq!(next.len(), 1);
    assert_eq!(next[0].store, cfg.store);
    assert_eq!(next[0].status, Status::Running(vec![]));
}

#[test]
fn failing_assert_is_reported_with_witness() {
    let ast = src("fn f(int x) { int y = x + 1; assert(y != 5); }");
    let r = run(&ast, 8);
    assert_eq!(r.verdict, VerdictKind::AssertionViolation);
    let v = r.violation.unwrap();
    assert_eq!(v.line, Some(1));
    assert_eq!(v.witness.scalars["x"], 4);
}

#[test]
fn correct_binary_search_verifies() {
    let (ast, _) = corpus::find("binary_search").unwrap().at(8).unwrap();
    let r = run(&ast, 8);
    assert_eq!(r.verdict, VerdictKind::PartiallyCorrect);
    assert!(r.stats.feasible_paths > 0);
}

#[test]
fn buggy_binary_search_counterexample() {
    let (ast, _) = corpus::find("binary_search_bug").unwrap().at(8).unwrap();
    let r = run(&ast, 8);
    assert_eq!(r.verdict, VerdictKind::PostconditionViolation);
    let v = r.violation.unwrap();
    assert_eq!(v.result, Some(-1));
    let t = &v.witness.arrays["t"];
    assert!(t.contains(&v.witness.scalars["v"]));
    let pruned: Vec<String> = r.pruned.iter().map(|t| format_trace(t)).collect();
    assert!(pruned.contains(&"<T4,F6,F8,T4,T6>".to_string()), "{pruned:?}");
    assert!(pruned.contains(&"<T4,F6,F8,T4,F6,T8>".to_string()), "{pruned:?}");
    let run = concrete_interpret(&ast, &v.witness, &[], &InterpOptions::default()).unwrap();
    assert_eq!(run.outcome, Outcome::Returned(Some(-1)));
    assert_eq!(run.trace, v.trace);
}

#[test]
fn tritype_has_ten_feasible_paths() {
    let ast = corpus::instantiate(corpus::TRITYPE, &[]).unwrap();
    let r = run(&ast, 8);
    assert_eq!(r.verdict, VerdictKind::PartiallyCorrect);
    assert_eq!(r.stats.feasible_paths, 10);
}

#[test]
fn overflow_checks() {
    let ast = src("requires x == 100\nfn f(int x) { int y = x + x; }");
    let mut opts = ExecOptions::with_bits(8);
    opts.check_overflow = true;
    let r = explore(&ast, &[], &opts).unwrap();
    assert_eq!(r.verdict, VerdictKind::OverflowViolation);
    assert_eq!(r.violation.unwrap().witness.scalars["x"], 100);

    let ok = src("requires 0 <= x && x <= 10\nfn f(int x) { int y = x + 1; }");
    assert_eq!(explore(&ok, &[], &opts).unwrap().verdict, VerdictKind::PartiallyCorrect);

    let edge = src("requires 0 <= x\nfn f(int x) { int y = x + 1; }");
    let r = explore(&edge, &[], &opts).unwrap();
    assert_eq!(r.verdict, VerdictKind::OverflowViolation);
    assert_eq!(r.violation.unwrap().witness.scalars["x"], 127);
}

#[test]
fn contract_with_trivial_precondition() {
    let ast = src("extern fn g(int a) ensures result == a + 1;\nfn f(int x) { int y = g(x); assert(y == x + 1); }");
    let r = run(&ast, 8);
    assert_eq!(r.verdict, VerdictKind::PartiallyCorrect);
}

#[test]
fn contract_precondition_violation() {
    let ast = src("extern fn g(int a) requires 0 <= a && a < 4;\nfn f(int x) { int y = g(x); }");
    let r = run(&ast, 8);
    assert_eq!(r.verdict, VerdictKind::ContractViolation);
    let x = r.violation.unwrap().witness.scalars["x"];
    assert!(!(0..4).contains(&x));
}

#[test]
fn missing_contract_is_an_error() {
    let ast = src("fn f(int x) { int y = g(x); }");
    assert!(matches!(
        explore(&ast, &[], &ExecOptions::default()),
        Err(ExecError::MissingContract(_))
    ));
}

#[test]
fn find_min_contract_at_first_iteration() {
    let (ast, callees) = corpus::find("selection_sort").unwrap().at(40).unwrap();
    let contracts: Vec<Contract> = callees.iter().map(Contract::from).collect();
    let opts = ExecOptions::default();
    let mut cfg = Configuration::initial(&ast).unwrap();
    // i = 0, while (true), body block, k = findMin(t, i)
    for _ in 0..4 {
        cfg = step(&ast, &contracts, &cfg, &opts).unwrap().remove(0);
    }
    let post = cfg.store.constraints().last().unwrap().to_string();
    assert!(post.starts_with("(0 <= k^0 && k^0 < 40 && t^0[k^0] <= t^0[0] && t^0[k^0] <= t^0[1]"), "{post}");
    assert!(post.ends_with("t^0[k^0] <= t^0[39])"), "{post}");
}

#[test]
fn depth_limit_names_the_path() {
    let ast = src("fn f(int x) { int i = 0; while (i < 100) { i = i + 1; } }");
    let opts = ExecOptions {
        max_depth: 10,
        ..ExecOptions::default()
    };
    match explore(&ast, &[], &opts) {
        Err(ExecError::DepthLimit { trace, limit }) => {
            assert_eq!(limit, 10);
            assert!(trace.starts_with("<T1,T1"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn parallel_report_equals_sequential() {
    for name in ["binary_search", "binary_search_bug"] {
        let (ast, _) = corpus::find(name).unwrap().at(8).unwrap();
        let seq = run(&ast, 8);
        let par = explore(
            &ast,
            &[],
            &ExecOptions {
                jobs: 4,
                ..ExecOptions::with_bits(8)
            },
        )
        .unwrap();
        assert_eq!(seq, par);
    }
}

#[test]
fn split_depth_grows_with_jobs() {
    assert_eq!(split_depth(1), 2);
    assert_eq!(split_depth(2), 3);
    assert_eq!(split_depth(4), 4);
}
