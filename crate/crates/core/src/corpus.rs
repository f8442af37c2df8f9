//! Benchmark programs shipped with the verifier.

use std::collections::BTreeMap;

use crate::frontend::{parse_program, substitute_params, FrontendError, Function, ProgramAst};

pub const BINARY_SEARCH: &str = include_str!("../corpus/binary_search.cpv");
pub const BINARY_SEARCH_BUG: &str = include_str!("../corpus/binary_search_bug.cpv");
pub const TRITYPE: &str = include_str!("../corpus/tritype.cpv");
pub const TRITYPE_BUG: &str = include_str!("../corpus/tritype_bug.cpv");
pub const BUBBLE_SORT: &str = include_str!("../corpus/bubble_sort.cpv");
pub const SELECTION_SORT: &str = include_str!("../corpus/selection_sort.cpv");
pub const SUM_OF_SQUARES: &str = include_str!("../corpus/sum_of_squares.cpv");
/// Callee of selection sort, verifiable on its own.
pub const FIND_MIN: &str = include_str!("../corpus/find_min.cpv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Benchmark {
    pub name: &'static str,
    pub source: &'static str,
    /// Expected to verify.
    pub correct: bool,
    /// Sources of callees whose contracts (and bodies) the program uses.
    pub callees: &'static [&'static str],
}

/// The five benchmarks and the two faulty variants.
pub fn corpus() -> Vec<Benchmark> {
    let b = |name, source, correct, callees| Benchmark {
        name,
        source,
        correct,
        callees,
    };
    vec![
        b("binary_search", BINARY_SEARCH, true, &[][..]),
        b("binary_search_bug", BINARY_SEARCH_BUG, false, &[]),
        b("tritype", TRITYPE, true, &[]),
        b("tritype_bug", TRITYPE_BUG, false, &[]),
        b("bubble_sort", BUBBLE_SORT, true, &[]),
        b("selection_sort", SELECTION_SORT, true, &[FIND_MIN]),
        b("sum_of_squares", SUM_OF_SQUARES, true, &[]),
    ]
}

pub fn find(name: &str) -> Option<Benchmark> {
    corpus().into_iter().find(|b| b.name == name)
}

/// Parse a source and bind its symbolic bounds. Unused bindings are
/// ignored.
pub fn instantiate(source: &str, params: &[(&str, i64)]) -> Result<ProgramAst, FrontendError> {
    let ast = parse_program(source)?;
    let bindings: BTreeMap<String, i64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    substitute_params(&ast, &bindings)
}

impl Benchmark {
    /// The program at array length `n`, plus its callees at the same length.
    pub fn at(&self, n: i64) -> Result<(ProgramAst, Vec<Function>), FrontendError> {
        let ast = instantiate(self.source, &[("N", n)])?;
        let callees = self
            .callees
            .iter()
            .map(|src| instantiate(src, &[("N", n)]).map(|a| a.function))
            .collect::<Result<_, _>>()?;
        Ok((ast, callees))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_programs_that_parse() {
        let all = corpus();
        assert_eq!(all.len(), 7);
        assert_eq!(all.iter().filter(|b| b.correct).count(), 5);
        for b in all {
            b.at(3).unwrap_or_else(|e| panic!("{}: {e}", b.name));
        }
        instantiate(FIND_MIN, &[("N", 4)]).unwrap();
    }

    fn diff_lines(a: &str, b: &str) -> Vec<(usize, String, String)> {
        a.lines()
            .zip(b.lines())
            .enumerate()
            .filter(|(_, (x, y))| x != y)
            .map(|(i, (x, y))| (i, x.to_string(), y.to_string()))
            .collect()
    }

    #[test]
    fn faulty_variants_differ_by_one_edit() {
        // line 1 is the header comment
        let d = diff_lines(BINARY_SEARCH, BINARY_SEARCH_BUG);
        assert_eq!(d.len(), 2);
        assert_eq!(d[1].1.trim(), "l = m + 1;");
        assert_eq!(d[1].2.trim(), "u = m - 1;");
        let d = diff_lines(TRITYPE, TRITYPE_BUG);
        assert_eq!(d.len(), 2);
        assert!(d[1].1.contains("trityp == 2 && i + k > j"));
        assert!(d[1].2.contains("trityp == 1 && i + k > j"));
    }
}
