//! Random small programs for differential testing against the
//! enumerating oracle.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::constraint_ir::{ConstraintStore, Model};
use crate::renaming::{ArithOp, ArrayRef, Constraint, RelOp, SolverExpr, VarRef};

const NAMES: [&str; 3] = ["x", "y", "z"];

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    vars: Vec<&'static str>,
    loops: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn var(&mut self) -> &'static str {
        self.vars.choose(self.rng).copied().expect("at least one variable")
    }

    fn expr(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return if self.rng.gen_bool(0.6) {
                self.var().to_string()
            } else {
                self.rng.gen_range(-3..=3).to_string()
            };
        }
        let a = self.expr(depth - 1);
        match self.rng.gen_range(0..5) {
            0 | 1 => format!("({a} + {})", self.expr(depth - 1)),
            2 => format!("({a} - {})", self.expr(depth - 1)),
            3 => format!("({a} * {})", self.expr(depth - 1)),
            _ => format!("({a} / {})", self.rng.gen_range(2..=3)),
        }
    }

    fn cond(&mut self) -> String {
        let op = ["==", "!=", "<", "<=", ">", ">="].choose(self.rng).copied().unwrap();
        let c = format!("{} {op} {}", self.expr(1), self.expr(1));
        match self.rng.gen_range(0..6) {
            0 => format!("{c} && {} {op} {}", self.var(), self.expr(0)),
            1 => format!("{c} || {} < {}", self.var(), self.expr(0)),
            _ => c,
        }
    }

    fn block(&mut self, out: &mut String, indent: usize, len: usize, depth: u32) {
        for _ in 0..len {
            self.stmt(out, indent, depth);
        }
    }

    fn stmt(&mut self, out: &mut String, indent: usize, depth: u32) {
        let pad = "    ".repeat(indent);
        let roll = if depth == 0 { 0 } else { self.rng.gen_range(0..10) };
        match roll {
            0..=4 => {
                let v = self.var();
                let _ = writeln!(out, "{pad}{v} = {};", self.expr(2));
            }
            5 | 6 => {
                let _ = writeln!(out, "{pad}if ({}) {{", self.cond());
                let n = self.rng.gen_range(1..=2);
                self.block(out, indent + 1, n, depth - 1);
                if self.rng.gen_bool(0.5) {
                    let _ = writeln!(out, "{pad}}} else {{");
                    self.block(out, indent + 1, 1, depth - 1);
                }
                let _ = writeln!(out, "{pad}}}");
            }
            7 if self.loops == 0 => {
                // The counter only moves down and nothing else writes it.
                self.loops += 1;
                let counter = self.var();
                let saved = std::mem::take(&mut self.vars);
                self.vars = saved.iter().copied().filter(|v| *v != counter).collect();
                let _ = writeln!(out, "{pad}while ({counter} > 0) {{");
                if !self.vars.is_empty() {
                    let n = self.rng.gen_range(1..=2);
                    self.block(out, indent + 1, n, depth - 1);
                }
                let _ = writeln!(out, "{pad}    {counter} = {counter} - 1;");
                let _ = writeln!(out, "{pad}}}");
                self.vars = saved;
            }
            8 => {
                let _ = writeln!(out, "{pad}assert({});", self.cond());
            }
            _ => {
                let v = self.var();
                let _ = writeln!(out, "{pad}{v} = {v} + {};", self.rng.gen_range(-2..=2));
            }
        }
    }
}

/// A function over one to three integer parameters built from
/// assignments, conditionals, at most one counting loop and assertions,
/// with a random contract.
pub fn random_program<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..=3);
    let mut g = Gen {
        rng,
        vars: NAMES[..n].to_vec(),
        loops: 0,
    };
    let mut out = String::new();
    if g.rng.gen_bool(0.5) {
        let v = g.var();
        let _ = writeln!(out, "requires {v} >= {}", g.rng.gen_range(-4..=1));
    }
    let ensures = match g.rng.gen_range(0..3) {
        0 => format!("result >= {}", g.expr(1)),
        1 => format!("result != {}", g.expr(1)),
        _ => format!("{} ==> result <= {}", g.cond(), g.expr(1)),
    };
    let _ = writeln!(out, "ensures {ensures}");
    let params: Vec<String> = NAMES[..n].iter().map(|v| format!("int {v}")).collect();
    let _ = writeln!(out, "fn f({}) {{", params.join(", "));
    let len = g.rng.gen_range(1..=4);
    g.block(&mut out, 1, len, 2);
    let _ = writeln!(out, "    return {};", g.expr(1));
    out.push_str("}\n");
    out
}

/// A store over a few scalars `x0..` and the cells of one array `a`, each
/// bounded to at most five values, plus random atoms.
#[derive(Debug, Clone)]
pub struct RandomStore {
    pub store: ConstraintStore,
    pub scalars: usize,
    pub cells: usize,
    /// Bounds of the scalars, then of the cells.
    pub domains: Vec<(i64, i64)>,
}

const RELS: [RelOp; 6] = [RelOp::Eq, RelOp::Ne, RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge];

fn scalar(i: usize) -> SolverExpr {
    SolverExpr::Var(VarRef::new(&format!("x{i}"), 0))
}

impl RandomStore {
    fn array(&self) -> ArrayRef {
        ArrayRef::new("a", 0, self.cells)
    }

    fn term<R: Rng>(&self, rng: &mut R) -> SolverExpr {
        let k = rng.gen_range(0..self.scalars);
        let other = scalar(rng.gen_range(0..self.scalars));
        match rng.gen_range(0..6) {
            0 => SolverExpr::Const(rng.gen_range(-3..=3)),
            1 if self.cells > 0 => SolverExpr::Select(self.array(), Box::new(scalar(k))),
            2 => SolverExpr::bin(ArithOp::Mul, scalar(k), other),
            3 => SolverExpr::bin(ArithOp::Add, scalar(k), SolverExpr::Const(rng.gen_range(-2..=2))),
            4 => SolverExpr::bin(ArithOp::Sub, scalar(k), other),
            _ => scalar(k),
        }
    }

    fn atom<R: Rng>(&self, rng: &mut R) -> Constraint {
        match rng.gen_range(0..10) {
            0 => {
                let n = rng.gen_range(2..=3);
                Constraint::AllDifferent((0..n).map(|_| self.term(rng)).collect())
            }
            1 => Constraint::Or(vec![self.atom(rng), self.atom(rng)]),
            2 => Constraint::Not(Box::new(self.atom(rng))),
            3 => Constraint::Implies(Box::new(self.atom(rng)), Box::new(self.atom(rng))),
            _ => {
                let op = RELS[rng.gen_range(0..RELS.len())];
                Constraint::Cmp(op, self.term(rng), self.term(rng))
            }
        }
    }

    pub fn generate<R: Rng>(rng: &mut R) -> RandomStore {
        let vars = rng.gen_range(1..=4);
        let cells = if vars > 1 && rng.gen_bool(0.5) { rng.gen_range(1..vars) } else { 0 };
        let domains = (0..vars)
            .map(|_| {
                let lo = rng.gen_range(-3..=2);
                (lo, lo + rng.gen_range(0..5))
            })
            .collect();
        let mut r = RandomStore {
            store: ConstraintStore::new(),
            scalars: vars - cells,
            cells,
            domains,
        };
        for i in 0..vars {
            let (lo, hi) = r.domains[i];
            let e = if i < r.scalars {
                scalar(i)
            } else {
                r.array().cell(i - r.scalars)
            };
            r.store.post(Constraint::cmp(RelOp::Ge, e.clone(), SolverExpr::Const(lo)));
            r.store.post(Constraint::cmp(RelOp::Le, e, SolverExpr::Const(hi)));
        }
        for _ in 0..rng.gen_range(1..=4) {
            let c = r.atom(rng);
            r.store.post(c);
        }
        r
    }

    /// First model in lexicographic order, by trying every assignment.
    pub fn enumerate(&self) -> Option<Model> {
        let mut values: Vec<i64> = self.domains.iter().map(|d| d.0).collect();
        loop {
            let mut m = Model::default();
            for i in 0..self.scalars {
                m.scalars.insert(VarRef::new(&format!("x{i}"), 0), values[i]);
            }
            if self.cells > 0 {
                m.arrays.insert(self.array(), values[self.scalars..].to_vec());
            }
            if m.satisfies_all(self.store.iter()) {
                return Some(m);
            }
            let mut k = 0;
            loop {
                if k == values.len() {
                    return None;
                }
                if values[k] < self.domains[k].1 {
                    values[k] += 1;
                    break;
                }
                values[k] = self.domains[k].0;
                k += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::frontend::parse_program;

    #[test]
    fn generated_programs_parse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let src = random_program(&mut rng);
            parse_program(&src).unwrap_or_else(|e| panic!("{e}\n{src}"));
        }
    }
}
