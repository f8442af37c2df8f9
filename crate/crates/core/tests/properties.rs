use std::collections::BTreeMap;

use proptest::prelude::*;

use cpbpv_core::constraint_ir::nnf;
use cpbpv_core::frontend::{BinOp, Expr, ExprKind, Span, UnOp};
use cpbpv_core::renaming::rename_bool;
use cpbpv_core::{negate, ArrayRef, Model, VarRef, VersionMap};

const SCALARS: [&str; 4] = ["l", "u", "m", "v"];
const LEN: usize = 4;

fn node(kind: ExprKind) -> Expr {
    Expr::new(kind, Span::new(1, 1))
}

fn int_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-5i64..=5).prop_map(Expr::int),
        proptest::sample::select(SCALARS.to_vec()).prop_map(Expr::var),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (proptest::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]), inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| Expr::binary(op, a, b)),
            inner.clone().prop_map(|e| node(ExprKind::Unary(UnOp::Neg, Box::new(e)))),
            inner.prop_map(|e| node(ExprKind::Index("t".into(), Box::new(e)))),
        ]
    })
}

fn bool_expr() -> impl Strategy<Value = Expr> {
    let rel = proptest::sample::select(vec![BinOp::Eq, BinOp::Ne, BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge]);
    let atom = prop_oneof![
        (rel, int_expr(), int_expr()).prop_map(|(op, a, b)| Expr::binary(op, a, b)),
        any::<bool>().prop_map(|b| node(ExprKind::Bool(b))),
    ];
    atom.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (proptest::sample::select(vec![BinOp::And, BinOp::Or, BinOp::Implies]), inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| Expr::binary(op, a, b)),
            inner.prop_map(Expr::not),
        ]
    })
}

#[derive(Debug)]
struct State {
    scalars: BTreeMap<&'static str, i64>,
    t: Vec<i64>,
}

/// Integer value, `None` when a read is out of bounds or a divisor is 0.
fn int(e: &Expr, s: &State) -> Option<i128> {
    match &e.kind {
        ExprKind::Int(v) => Some(*v as i128),
        ExprKind::Var(n) => s.scalars.get(n.as_str()).map(|&v| v as i128),
        ExprKind::Index(_, i) => {
            let i = int(i, s)?;
            (0..LEN as i128).contains(&i).then(|| s.t[i as usize] as i128)
        }
        ExprKind::Unary(UnOp::Neg, a) => Some(-int(a, s)?),
        ExprKind::Binary(op, a, b) => {
            let (a, b) = (int(a, s)?, int(b, s)?);
            match op {
                BinOp::Add => Some(a + b),
                BinOp::Sub => Some(a - b),
                BinOp::Mul => Some(a * b),
                BinOp::Div => (b != 0).then(|| a / b),
                _ => unreachable!(),
            }
        }
        _ => unreachable!(),
    }
}

/// Truth in polarity `pos`; comparisons over undefined terms are false
/// whichever way they are read.
fn truth(e: &Expr, s: &State, pos: bool) -> bool {
    match &e.kind {
        ExprKind::Bool(b) => *b == pos,
        ExprKind::Unary(UnOp::Not, a) => truth(a, s, !pos),
        ExprKind::Binary(op, a, b) if op.is_logical() => match (op, pos) {
            (BinOp::And, true) | (BinOp::Or, false) => truth(a, s, pos) && truth(b, s, pos),
            (BinOp::And, false) | (BinOp::Or, true) => truth(a, s, pos) || truth(b, s, pos),
            (BinOp::Implies, true) => truth(a, s, false) || truth(b, s, true),
            _ => truth(a, s, true) && truth(b, s, false),
        },
        ExprKind::Binary(op, a, b) => {
            let (Some(x), Some(y)) = (int(a, s), int(b, s)) else {
                return false;
            };
            let holds = match op {
                BinOp::Eq => x == y,
                BinOp::Ne => x != y,
                BinOp::Lt => x < y,
                BinOp::Le => x <= y,
                BinOp::Gt => x > y,
                _ => x >= y,
            };
            holds == pos
        }
        _ => unreachable!(),
    }
}

fn state() -> impl Strategy<Value = State> {
    (proptest::collection::vec(-6i64..=6, 4), proptest::collection::vec(-6i64..=6, LEN)).prop_map(|(sc, t)| State {
        scalars: SCALARS.iter().copied().zip(sc).collect(),
        t,
    })
}

/// A version map after some assignments, and a model that gives the
/// current versions the values of `s` and stale versions other values.
fn versioned(s: &State, bumps: &[usize]) -> (VersionMap, Model) {
    let mut sigma = VersionMap::initial(SCALARS, [("t", LEN)]);
    for &b in bumps {
        sigma = if b < SCALARS.len() {
            sigma.bump(SCALARS[b]).unwrap()
        } else {
            sigma.bump("t").unwrap()
        };
    }
    let mut m = Model::default();
    for (n, &v) in &s.scalars {
        let cur = sigma.version(n).unwrap();
        for ver in 0..=cur {
            m.scalars.insert(VarRef::new(n, ver), if ver == cur { v } else { v + 17 });
        }
    }
    let cur = sigma.version("t").unwrap();
    for ver in 0..=cur {
        let cells = if ver == cur { s.t.clone() } else { s.t.iter().map(|x| 30 - x).collect() };
        m.arrays.insert(ArrayRef::new("t", ver, LEN), cells);
    }
    (sigma, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn renaming_preserves_meaning(e in bool_expr(), s in state(), bumps in proptest::collection::vec(0usize..5, 0..6)) {
        let (sigma, m) = versioned(&s, &bumps);
        let c = rename_bool(&sigma, &e).unwrap();
        prop_assert_eq!(m.eval(&c), truth(&e, &s, true), "{}", c);
        prop_assert_eq!(m.eval(&negate(&c)), truth(&e, &s, false), "{}", c);
    }

    #[test]
    fn negation_normal_form_keeps_meaning(e in bool_expr(), s in state()) {
        let (sigma, m) = versioned(&s, &[]);
        let c = rename_bool(&sigma, &e).unwrap();
        prop_assert_eq!(m.eval(&nnf(&c)), m.eval(&c));
        prop_assert_eq!(m.eval(&negate(&negate(&c))), m.eval(&c));
    }

    #[test]
    fn negation_complements_defined_constraints(e in bool_expr(), s in state()) {
        let (sigma, m) = versioned(&s, &[]);
        let c = rename_bool(&sigma, &e).unwrap();
        let defined = cpbpv_core::constraint_ir::constraint_definedness(&c).iter().all(|d| m.eval(d));
        if defined {
            prop_assert_eq!(m.eval(&negate(&c)), !m.eval(&c), "{}", c);
        }
    }
}
