#![no_main]

//! Arbitrary syndrome bits for the [[18,2,3]] code. Decoders may reject
//! them but must not panic, and any correction must reproduce them.

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use qldpc_core::code::{circulant, hypergraph_product, CssCode};
use qldpc_core::decoder::{self, ClusterBudget, DecodeStatus};
use qldpc_core::gf2::BinaryVector;
use qldpc_core::graph::{build_connectivity_graph, ClusterGraph};

fn setup() -> &'static (CssCode, ClusterGraph) {
    static CELL: OnceLock<(CssCode, ClusterGraph)> = OnceLock::new();
    CELL.get_or_init(|| {
        let h = circulant(3, &[0, 1]).unwrap();
        let code = hypergraph_product(&h, &h).unwrap();
        let graph = build_connectivity_graph(&code);
        (code, graph)
    })
}

fuzz_target!(|data: &[u8]| {
    let (code, graph) = setup();
    let m = code.g_x().rows() + code.g_z().rows();
    let bits: Vec<bool> = (0..m).map(|i| data.get(i / 8).is_some_and(|b| b >> (i % 8) & 1 == 1)).collect();
    let synd = BinaryVector::from_bits(&bits);
    let budget = ClusterBudget { max_cluster_size: 4, max_work: 100_000 };
    if let Ok(out) = decoder::decode_depolarizing(code, graph, &synd, &budget) {
        if out.status != DecodeStatus::ClusterBudgetExceeded {
            assert_eq!(decoder::syndrome(code, &out.correction).unwrap(), synd);
        }
    }
    let mask: Vec<usize> = data.iter().skip(m.div_ceil(8)).map(|&b| b as usize % code.n()).collect();
    let _ = decoder::decode_erasure(code, graph, &mask, &synd);
});
