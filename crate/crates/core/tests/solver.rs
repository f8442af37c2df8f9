use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cpbpv_core::generate::RandomStore;
use cpbpv_core::solver::propagators::{LinRel, Prop};
use cpbpv_core::solver::Domain;
use cpbpv_core::{check_cheap, check_complete, SolverConfig, Verdict};

#[test]
fn complete_layer_matches_enumeration_on_random_stores() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let cfg = SolverConfig::with_bits(6);
    let mut sat = 0;
    for _ in 0..1000 {
        let r = RandomStore::generate(&mut rng);
        let expected = r.enumerate().is_some();
        let text = r.store.to_text();
        match check_complete(&r.store, &cfg).unwrap() {
            Verdict::Sat(m) => {
                assert!(expected, "{text}");
                assert!(m.satisfies_all(r.store.iter()), "{text}");
                sat += 1;
            }
            Verdict::Unsat => assert!(!expected, "{text}"),
            Verdict::Unknown => panic!("complete layer returned unknown"),
        }
        if expected {
            assert!(!check_cheap(&r.store, &cfg).is_unsat(), "{text}");
        }
    }
    assert!((200..=800).contains(&sat), "{sat}");
}

fn domain() -> impl Strategy<Value = Domain> {
    (-4i64..=3, 0i64..=5, proptest::collection::vec(-4i64..=8, 0..3)).prop_map(|(lo, w, holes)| {
        let mut d = Domain::new(lo, lo + w);
        for h in holes {
            if d.size() > 1 {
                let _ = d.remove(h);
            }
        }
        d
    })
}

fn prop_kind() -> impl Strategy<Value = Prop> {
    let coef = prop_oneof![Just(-2i128), Just(-1), Just(1), Just(2), Just(3)];
    let rel = prop_oneof![Just(LinRel::Le), Just(LinRel::Eq), Just(LinRel::Ne)];
    prop_oneof![
        (proptest::collection::vec((0usize..4, coef), 1..=3), -4i128..=4, rel)
            .prop_map(|(terms, c, rel)| Prop::Linear { terms, c, rel }),
        (0usize..4, 0usize..4, 0usize..4).prop_map(|(x, y, z)| Prop::Times { x, y, z }),
        (0usize..4, 0usize..4, 0usize..4).prop_map(|(x, y, z)| Prop::Div { x, y, z }),
        (0usize..4, 0usize..4).prop_map(|(idx, z)| Prop::Element { idx, cells: vec![4, 5], z }),
        Just(Prop::AllDiff { vars: vec![0, 1, 2] }),
    ]
}

fn subset(a: &Domain, b: &Domain) -> bool {
    a.iter().all(|v| b.contains(v))
}

/// Every assignment of the six variables within `d` that satisfies `p`.
fn solutions(p: &Prop, d: &[Domain]) -> Vec<Vec<i64>> {
    let vals: Vec<Vec<i64>> = d.iter().map(|x| x.iter().collect()).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; d.len()];
    if vals.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let point: Vec<i64> = idx.iter().enumerate().map(|(k, &i)| vals[k][i]).collect();
        let fixed: Vec<Domain> = point.iter().map(|&v| Domain::singleton(v)).collect();
        if p.holds(&fixed) == Some(true) {
            out.push(point);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < vals[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn fix_unused(p: &Prop, mut d: Vec<Domain>) -> Vec<Domain> {
    let used = p.vars();
    for (v, dom) in d.iter_mut().enumerate() {
        if !used.contains(&v) {
            *dom = Domain::singleton(dom.lo());
        }
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn propagators_contract_and_keep_solutions(p in prop_kind(), d in proptest::collection::vec(domain(), 6)) {
        let d = fix_unused(&p, d);
        let sols = solutions(&p, &d);
        let mut out = d.clone();
        match p.propagate(&mut out) {
            Err(_) => prop_assert!(sols.is_empty(), "{p:?} failed on {d:?} with solutions {sols:?}"),
            Ok(()) => {
                for (a, b) in out.iter().zip(&d) {
                    prop_assert!(subset(a, b));
                }
                for s in &sols {
                    for (v, x) in s.iter().enumerate() {
                        prop_assert!(out[v].contains(*x), "{p:?} lost {s:?}: {d:?} -> {out:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn propagators_are_monotone(
        p in prop_kind(),
        d in proptest::collection::vec(domain(), 6),
        cut in proptest::collection::vec((0i64..=2, 0i64..=2), 6),
    ) {
        let big = fix_unused(&p, d);
        let small: Vec<Domain> = big
            .iter()
            .zip(&cut)
            .map(|(b, &(l, h))| {
                let lo = (b.lo() + l).min(b.hi());
                let hi = (b.hi() - h).max(lo);
                let mut s = b.clone();
                if s.set_lo(lo as i128).is_err() || s.set_hi(hi as i128).is_err() {
                    s = Domain::singleton(b.hi());
                }
                s
            })
            .collect();
        let mut out_big = big.clone();
        let mut out_small = small.clone();
        let rb = p.propagate(&mut out_big);
        let rs = p.propagate(&mut out_small);
        if rb.is_err() {
            prop_assert!(rs.is_err(), "{p:?}: {small:?} succeeded where {big:?} failed");
        } else if rs.is_ok() {
            // Narrower input, narrower bounds.
            for (s, b) in out_small.iter().zip(&out_big) {
                prop_assert!(s.lo() >= b.lo() && s.hi() <= b.hi(), "{p:?}: {small:?} -> {out_small:?} vs {big:?} -> {out_big:?}");
            }
        }
    }
}

#[test]
fn excluded_alternative_with_undefined_read_keeps_models() {
    use cpbpv_core::renaming::{ArithOp, RelOp};
    use cpbpv_core::{ArrayRef, Constraint, ConstraintStore, SolverExpr, VarRef};
    let x = SolverExpr::Var(VarRef::new("x", 0));
    let a = ArrayRef::new("a", 0, 2);
    let k = SolverExpr::Const;
    let sq = SolverExpr::bin(ArithOp::Mul, x.clone(), x.clone());
    let store: ConstraintStore = [
        Constraint::cmp(RelOp::Ge, x.clone(), k(-2)),
        Constraint::cmp(RelOp::Le, x.clone(), k(1)),
        Constraint::eq(a.cell(0), k(2)),
        Constraint::eq(a.cell(1), k(-2)),
        Constraint::cmp(RelOp::Lt, x.clone(), sq.clone()),
        Constraint::Or(vec![
            Constraint::AllDifferent(vec![k(-2), SolverExpr::Select(a, Box::new(x.clone()))]),
            Constraint::cmp(RelOp::Ge, sq, SolverExpr::bin(ArithOp::Sub, x, k(1))),
        ]),
    ]
    .into_iter()
    .collect();
    let m = check_complete(&store, &SolverConfig::with_bits(6)).unwrap().model().expect("x = -2 or -1 works");
    assert!(m.satisfies_all(store.iter()));
}
