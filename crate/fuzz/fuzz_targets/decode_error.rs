#![no_main]

//! Errors drawn from the input bytes: the depolarizing decoder must always
//! explain their syndrome, and the erasure decoder must succeed when the
//! erasure covers the error.

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use qldpc_core::code::{circulant, hypergraph_product, CssCode};
use qldpc_core::decoder::{self, ClusterBudget, DecodeStatus};
use qldpc_core::graph::{build_connectivity_graph, ClusterGraph};
use qldpc_core::pauli::{Pauli, PauliVector};

fn setup() -> &'static (CssCode, ClusterGraph) {
    static CELL: OnceLock<(CssCode, ClusterGraph)> = OnceLock::new();
    CELL.get_or_init(|| {
        let h = circulant(8, &[0, 1, 3, 7]).unwrap();
        let code = hypergraph_product(&h, &h).unwrap();
        let graph = build_connectivity_graph(&code);
        (code, graph)
    })
}

fuzz_target!(|data: &[u8]| {
    let (code, graph) = setup();
    let n = code.n();
    let ops: Vec<(usize, Pauli)> = data
        .chunks_exact(2)
        .take(6)
        .map(|c| {
            let p = [Pauli::X, Pauli::Y, Pauli::Z][c[1] as usize % 3];
            ((c[0] as usize) * 3 % n, p)
        })
        .collect();
    let Ok(error) = PauliVector::from_paulis(n, &ops) else { return };
    let synd = decoder::syndrome(code, &error).unwrap();
    let budget = ClusterBudget { max_cluster_size: 3, max_work: 200_000 };
    let out = decoder::decode_depolarizing(code, graph, &synd, &budget).unwrap();
    if out.status != DecodeStatus::ClusterBudgetExceeded {
        assert_eq!(decoder::syndrome(code, &out.correction).unwrap(), synd);
    }
    let mut erased = decoder::decode_erasure(code, graph, &error.support(), &synd).unwrap();
    assert_ne!(erased.adjudicate_against(code, &error).unwrap(), DecodeStatus::DetectedUncorrectable);
});
