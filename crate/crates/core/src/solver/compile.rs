//! Translation of constraints into domains and propagators.
//!
//! Every scalar variable and every cell of every array mentioned by the
//! input becomes a primary variable with a `k`-bit domain. Intermediate
//! terms (products, quotients, reads at a variable index) become wide
//! auxiliary variables that are never labeled.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use super::domain::{Domain, Fail};
use super::propagators::{floor_div, LinRel, Prop};
use crate::constraint_ir::{nnf, Model};
use crate::renaming::{ArithOp, ArrayRef, Constraint, RelOp, SolverExpr, VarRef};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum VarKey {
    Scalar(VarRef),
    Cell(ArrayRef, usize),
}

/// Primary variables of one satisfiability problem.
#[derive(Debug, Default)]
pub(crate) struct Table {
    pub keys: Vec<VarKey>,
    index: HashMap<VarKey, usize>,
}

impl Table {
    pub fn build<'a>(cs: impl IntoIterator<Item = &'a Constraint>) -> Table {
        let mut keys = BTreeSet::new();
        for c in cs {
            c.visit_exprs(&mut |e| {
                e.visit(&mut |sub| match sub {
                    SolverExpr::Var(v) => {
                        keys.insert(VarKey::Scalar(v.clone()));
                    }
                    SolverExpr::Select(a, _) => {
                        for i in 0..a.len {
                            keys.insert(VarKey::Cell(a.clone(), i));
                        }
                    }
                    _ => {}
                })
            });
        }
        let keys: Vec<VarKey> = keys.into_iter().collect();
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Table { keys, index }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn scalar(&self, v: &VarRef) -> Option<usize> {
        self.index.get(&VarKey::Scalar(v.clone())).copied()
    }

    pub fn cell(&self, a: &ArrayRef, i: usize) -> Option<usize> {
        self.index.get(&VarKey::Cell(a.clone(), i)).copied()
    }

    /// Read a model off fixed primary domains.
    pub fn model(&self, doms: &[Domain]) -> Model {
        let mut m = Model::default();
        for (i, k) in self.keys.iter().enumerate() {
            let v = doms[i].lo();
            match k {
                VarKey::Scalar(r) => {
                    m.scalars.insert(r.clone(), v);
                }
                VarKey::Cell(a, j) => {
                    let cells = m.arrays.entry(a.clone()).or_insert_with(|| vec![0; a.len]);
                    cells[*j] = v;
                }
            }
        }
        m
    }
}

/// Solver state at one search node.
#[derive(Debug, Clone)]
pub(crate) struct Space {
    pub doms: Vec<Domain>,
    pub props: Vec<Arc<Prop>>,
    /// Pending disjunctions (alternatives in negation-normal form).
    pub disjs: Vec<Arc<Vec<Constraint>>>,
    /// Auxiliary variable of each nonlinear term already compiled.
    shared: Arc<HashMap<SolverExpr, usize>>,
}

impl Space {
    pub fn new(table: &Table, bits: u32) -> Space {
        Space {
            doms: vec![Domain::bits(bits); table.len()],
            props: Vec::new(),
            disjs: Vec::new(),
            shared: Arc::default(),
        }
    }

    fn aux(&mut self, dom: Domain) -> usize {
        self.doms.push(dom);
        self.doms.len() - 1
    }
}

#[derive(Debug, Clone, Default)]
struct Lin {
    terms: BTreeMap<usize, i128>,
    c: i128,
}

impl Lin {
    fn constant(c: i128) -> Lin {
        Lin {
            terms: BTreeMap::new(),
            c,
        }
    }

    fn var(v: usize) -> Lin {
        Lin {
            terms: BTreeMap::from([(v, 1)]),
            c: 0,
        }
    }

    fn as_const(&self) -> Option<i128> {
        self.terms.is_empty().then_some(self.c)
    }

    fn scale(mut self, k: i128) -> Lin {
        if k == 0 {
            return Lin::constant(0);
        }
        for a in self.terms.values_mut() {
            *a *= k;
        }
        self.c *= k;
        self
    }

    fn add(mut self, other: Lin, sign: i128) -> Lin {
        for (v, a) in other.terms {
            let e = self.terms.entry(v).or_insert(0);
            *e += sign * a;
            if *e == 0 {
                self.terms.remove(&v);
            }
        }
        self.c += sign * other.c;
        self
    }
}

struct Compiler<'a> {
    table: &'a Table,
}

impl Compiler<'_> {
    fn var_of(&self, s: &mut Space, l: Lin) -> usize {
        if l.c == 0 && l.terms.len() == 1 {
            if let Some((&v, &1)) = l.terms.iter().next() {
                return v;
            }
        }
        let z = match l.as_const() {
            Some(c) if c.abs() < super::domain::WIDE as i128 => s.aux(Domain::singleton(c as i64)),
            _ => s.aux(Domain::wide()),
        };
        if l.as_const().is_none() {
            let mut terms: Vec<(usize, i128)> = l.terms.into_iter().collect();
            terms.push((z, -1));
            s.props.push(Arc::new(Prop::Linear {
                terms,
                c: l.c,
                rel: LinRel::Eq,
            }));
        }
        z
    }

    fn lin(&self, s: &mut Space, e: &SolverExpr) -> Result<Lin, Fail> {
        Ok(match e {
            SolverExpr::Const(c) => Lin::constant(*c as i128),
            SolverExpr::Var(v) => match self.table.scalar(v) {
                Some(i) => Lin::var(i),
                None => return Err(Fail),
            },
            SolverExpr::Select(a, idx) => {
                let li = self.lin(s, idx)?;
                if let Some(c) = li.as_const() {
                    if c < 0 || c >= a.len as i128 {
                        return Err(Fail);
                    }
                    return Ok(Lin::var(self.table.cell(a, c as usize).ok_or(Fail)?));
                }
                if let Some(&z) = s.shared.get(e) {
                    return Ok(Lin::var(z));
                }
                let iv = self.var_of(s, li);
                let cells: Vec<usize> = (0..a.len)
                    .map(|i| self.table.cell(a, i).ok_or(Fail))
                    .collect::<Result<_, _>>()?;
                let z = s.aux(Domain::wide());
                s.props.push(Arc::new(Prop::Element { idx: iv, cells, z }));
                Arc::make_mut(&mut s.shared).insert(e.clone(), z);
                Lin::var(z)
            }
            SolverExpr::Neg(a) => self.lin(s, a)?.scale(-1),
            SolverExpr::Bin(op, a, b) => {
                let la = self.lin(s, a)?;
                let lb = self.lin(s, b)?;
                match op {
                    ArithOp::Add => la.add(lb, 1),
                    ArithOp::Sub => la.add(lb, -1),
                    ArithOp::Mul => match (la.as_const(), lb.as_const()) {
                        (Some(k), _) => lb.scale(k),
                        (_, Some(k)) => la.scale(k),
                        _ => {
                            if let Some(&z) = s.shared.get(e) {
                                return Ok(Lin::var(z));
                            }
                            let x = self.var_of(s, la);
                            let y = self.var_of(s, lb);
                            let z = s.aux(Domain::wide());
                            s.props.push(Arc::new(Prop::Times { x, y, z }));
                            Arc::make_mut(&mut s.shared).insert(e.clone(), z);
                            Lin::var(z)
                        }
                    },
                    ArithOp::Div => match (la.as_const(), lb.as_const()) {
                        (_, Some(0)) => return Err(Fail),
                        (Some(x), Some(y)) => Lin::constant(x / y),
                        _ => {
                            if let Some(&z) = s.shared.get(e) {
                                return Ok(Lin::var(z));
                            }
                            let x = self.var_of(s, la);
                            let y = self.var_of(s, lb);
                            let z = s.aux(Domain::wide());
                            s.props.push(Arc::new(Prop::Div { x, y, z }));
                            Arc::make_mut(&mut s.shared).insert(e.clone(), z);
                            Lin::var(z)
                        }
                    },
                }
            }
        })
    }

    fn post_cmp(&self, s: &mut Space, op: RelOp, a: &SolverExpr, b: &SolverExpr) -> Result<(), Fail> {
        let l = self.lin(s, a)?.add(self.lin(s, b)?, -1);
        let (l, rel) = match op {
            RelOp::Eq => (l, LinRel::Eq),
            RelOp::Ne => (l, LinRel::Ne),
            RelOp::Le => (l, LinRel::Le),
            RelOp::Lt => (l.add(Lin::constant(1), 1), LinRel::Le),
            RelOp::Ge => (l.scale(-1), LinRel::Le),
            RelOp::Gt => (l.scale(-1).add(Lin::constant(1), 1), LinRel::Le),
        };
        if let Some(c) = l.as_const() {
            let ok = match rel {
                LinRel::Le => c <= 0,
                LinRel::Eq => c == 0,
                LinRel::Ne => c != 0,
            };
            return if ok { Ok(()) } else { Err(Fail) };
        }
        let mut terms: Vec<(usize, i128)> = l.terms.into_iter().collect();
        let mut c = l.c;
        // Divide through by the gcd of the coefficients.
        let g = terms.iter().fold(0i128, |g, t| gcd(g, t.1.abs()));
        if g > 1 {
            match rel {
                LinRel::Le => {
                    for t in &mut terms {
                        t.1 /= g;
                    }
                    c = -floor_div(-c, g);
                }
                LinRel::Eq | LinRel::Ne => {
                    if c % g != 0 {
                        return if rel == LinRel::Eq { Err(Fail) } else { Ok(()) };
                    }
                    for t in &mut terms {
                        t.1 /= g;
                    }
                    c /= g;
                }
            }
        }
        let prop = Prop::Linear { terms, c, rel };
        prop.propagate(&mut s.doms)?;
        s.props.push(Arc::new(prop));
        Ok(())
    }

    fn post(&self, s: &mut Space, c: &Constraint) -> Result<(), Fail> {
        match c {
            Constraint::True => Ok(()),
            Constraint::False => Err(Fail),
            Constraint::Cmp(op, a, b) => self.post_cmp(s, *op, a, b),
            Constraint::And(cs) => cs.iter().try_for_each(|c| self.post(s, c)),
            Constraint::Or(cs) => match cs.len() {
                0 => Err(Fail),
                1 => self.post(s, &cs[0]),
                _ => {
                    s.disjs.push(Arc::new(cs.clone()));
                    Ok(())
                }
            },
            Constraint::AllDifferent(es) => {
                let mut vars = Vec::with_capacity(es.len());
                for e in es {
                    let l = self.lin(s, e)?;
                    vars.push(self.var_of(s, l));
                }
                s.props.push(Arc::new(Prop::AllDiff { vars }));
                Ok(())
            }
            Constraint::Not(_) | Constraint::Implies(..) => self.post(s, &nnf(c)),
        }
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Post a constraint (any shape) into a space.
pub(crate) fn post(s: &mut Space, table: &Table, c: &Constraint) -> Result<(), Fail> {
    Compiler { table }.post(s, c)
}
