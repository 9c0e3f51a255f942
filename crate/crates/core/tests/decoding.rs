use qldpc_core::bounds;
use qldpc_core::code::{circulant, hypergraph_product, CssCode};
use qldpc_core::decoder::{self, ClusterBudget, DecodeStatus, DEFAULT_MAX_WORK};
use qldpc_core::graph::{build_connectivity_graph, decompose};
use qldpc_core::harness::{sample_depolarizing, sample_erasure};
use qldpc_core::pauli::{Pauli, PauliVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn square_product(size: usize, support: &[usize]) -> CssCode {
    let h = circulant(size, support).unwrap();
    hypergraph_product(&h, &h).unwrap()
}

fn all_single_qubit_errors_succeed(code: &CssCode, budget: &ClusterBudget) {
    let graph = build_connectivity_graph(code);
    let n = code.n();
    for q in 0..n {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let e = PauliVector::from_paulis(n, &[(q, p)]).unwrap();
            let s = decoder::syndrome(code, &e).unwrap();
            let mut out = decoder::decode_depolarizing(code, &graph, &s, budget).unwrap();
            assert_eq!(out.adjudicate_against(code, &e).unwrap(), DecodeStatus::SuccessDegenerate, "{p}{q}");
            assert_eq!(out.correction, e);
        }
    }
}

#[test]
fn single_qubit_errors_on_small_toric_code() {
    let code = square_product(3, &[0, 1]);
    all_single_qubit_errors_succeed(&code, &ClusterBudget::recommended(3, code.n(), 0.01, code.z_bound()));
}

#[test]
fn single_qubit_errors_on_450_qubit_code() {
    let code = square_product(15, &[0, 1, 3, 7]);
    assert_eq!((code.n(), code.k()), (450, 98));
    all_single_qubit_errors_succeed(&code, &ClusterBudget::recommended(5, code.n(), 0.001, code.z_bound()));
}

#[test]
fn adjacent_weight_two_error_is_explained() {
    let code = square_product(3, &[0, 1]);
    let graph = build_connectivity_graph(&code);
    let n = code.n();
    let budget = ClusterBudget { max_cluster_size: n, max_work: DEFAULT_MAX_WORK };
    let q = graph.neighbors(0)[0];
    let e = PauliVector::from_paulis(n, &[(0, Pauli::X), (q, Pauli::X)]).unwrap();
    let s = decoder::syndrome(&code, &e).unwrap();
    let out = decoder::decode_depolarizing(&code, &graph, &s, &budget).unwrap();
    let residual = e.mul(&out.correction).unwrap();
    assert!(decoder::syndrome(&code, &residual).unwrap().is_zero());
    let oracle = decoder::decode_oracle_min_weight(&code, &s, 2).unwrap();
    assert_eq!(out.correction.weight(), oracle.correction.weight());
}

#[test]
fn depolarizing_corrections_reproduce_the_syndrome() {
    let code = square_product(8, &[0, 1, 3, 7]);
    let graph = build_connectivity_graph(&code);
    let budget = ClusterBudget { max_cluster_size: 4, max_work: 2_000_000 };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut decoded = 0;
    for _ in 0..300 {
        let e = sample_depolarizing(code.n(), 0.01, &mut rng).unwrap();
        let s = decoder::syndrome(&code, &e).unwrap();
        let out = decoder::decode_depolarizing(&code, &graph, &s, &budget).unwrap();
        if out.status != DecodeStatus::ClusterBudgetExceeded {
            assert_eq!(decoder::syndrome(&code, &out.correction).unwrap(), s);
            decoded += 1;
        }
    }
    assert!(decoded > 250);
}

#[test]
fn erasures_with_small_clusters_never_fail() {
    let code = square_product(15, &[0, 1, 3, 7]);
    let graph = build_connectivity_graph(&code);
    let d = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut small = 0;
    for _ in 0..400 {
        let sample = sample_erasure(code.n(), 0.03, &mut rng).unwrap();
        let mask = sample.erasure_mask.clone().unwrap();
        let s = decoder::syndrome(&code, &sample.error).unwrap();
        let mut out = decoder::decode_erasure(&code, &graph, &mask, &s).unwrap();
        let status = out.adjudicate_against(&code, &sample.error).unwrap();
        assert_ne!(status, DecodeStatus::DetectedUncorrectable);
        if decompose(&graph, &mask).unwrap().cluster_sizes.iter().all(|&w| w < d) {
            small += 1;
            assert_eq!(status, DecodeStatus::SuccessDegenerate);
        }
    }
    assert!(small > 100);
}

/// Mean decoder work at a fixed rate below the depolarizing bound grows
/// more slowly than `n²` across the circulant family.
#[test]
fn decoder_work_scales_subquadratically() {
    let sizes = [8usize, 11, 15];
    let codes: Vec<CssCode> = sizes.iter().map(|&l| square_product(l, &[0, 1, 3, 7])).collect();
    let z = codes.iter().map(CssCode::z_bound).max().unwrap();
    let p = 0.9 * bounds::depolarizing_bound(z).unwrap();
    // Condition on one error per sample so the comparison is not dominated by
    // the (linear) chance of seeing any error at all.
    let mut points = Vec::new();
    for code in &codes {
        let graph = build_connectivity_graph(code);
        let budget = ClusterBudget::recommended(2, code.n(), p, z);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let trials = 60_000u64;
        let mut work = 0u64;
        for _ in 0..trials {
            let e = sample_depolarizing(code.n(), p, &mut rng).unwrap();
            if e.is_identity() {
                continue;
            }
            let s = decoder::syndrome(code, &e).unwrap();
            work += decoder::decode_depolarizing(code, &graph, &s, &budget).unwrap().work_units;
        }
        points.push(((code.n() as f64).ln(), ((work as f64 + 1.0) / trials as f64).ln()));
    }
    let (x0, y0) = points[0];
    let (x1, y1) = points[points.len() - 1];
    let slope = (y1 - y0) / (x1 - x0);
    assert!(slope < 2.0, "log-log slope {slope}");
}
