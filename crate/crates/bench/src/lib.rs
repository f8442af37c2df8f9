//! Workloads shared by the criterion benches.

use cpbpv_core::{corpus, explore, Contract, ExecOptions, VerificationReport};

/// Verify corpus program `name` at array length `n` with `bits`-bit integers.
pub fn verify(name: &str, n: i64, bits: u32, jobs: usize) -> VerificationReport {
    let bench = corpus::find(name).unwrap_or_else(|| panic!("no benchmark {name}"));
    let (ast, callees) = bench.at(n).expect("corpus programs parse");
    let opts = ExecOptions {
        jobs,
        ..ExecOptions::with_bits(bits)
    };
    let contracts: Vec<Contract> = callees.iter().map(Contract::from).collect();
    explore(&ast, &contracts, &opts).expect("corpus programs run")
}
