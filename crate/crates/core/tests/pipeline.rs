use qldpc_core::bounds::{self, BoundsReport};
use qldpc_core::code::{circulant, hypergraph_product_with_meta, random_regular_ldpc, CssCode};
use qldpc_core::decoder::ClusterBudget;
use qldpc_core::formats::{code_from_json, code_to_json, read_alist, write_alist, SeedSpec};
use qldpc_core::graph::{build_connectivity_graph, build_spacetime_graph};
use qldpc_core::harness::{run_sweep, threshold_estimate, Channel, SweepConfig, ThresholdEstimate};
use qldpc_core::percolation::sample_cluster_histogram;

fn from_spec(spec: &str) -> CssCode {
    let h = spec.parse::<SeedSpec>().unwrap().to_matrix().unwrap();
    hypergraph_product_with_meta(&h, &h, spec.to_string()).unwrap()
}

#[test]
fn construct_and_serialize_the_reference_codes() {
    for (spec, n, k) in [("circulant:15:0,1,3,7", 450, 98), ("circulant:15:0,1", 450, 2), ("circulant:3:0,1", 18, 2)] {
        let code = from_spec(spec);
        assert_eq!((code.n(), code.k()), (n, k), "{spec}");
        assert_eq!(code.parameters_string(None), format!("[[{n},{k},?]]"));
        let json = code_to_json(&code).unwrap();
        let back = code_from_json(&json).unwrap();
        assert_eq!(back, code);
        assert_eq!(code_to_json(&back).unwrap(), json);
    }
}

#[test]
fn alist_seed_files_round_trip() {
    let dir = std::env::temp_dir().join(format!("qldpc-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let h = random_regular_ldpc(20, 3, 4, 5).unwrap();
    let path = dir.join("seed.alist");
    std::fs::write(&path, write_alist(&h)).unwrap();
    let spec: SeedSpec = path.to_str().unwrap().parse().unwrap();
    assert_eq!(spec.to_matrix().unwrap(), h);
    assert_eq!(read_alist(&write_alist(&h)).unwrap(), h);
    assert_eq!(h.max_column_weight(), 3);
    assert_eq!(h.max_row_weight(), 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn spacetime_graph_respects_its_degree_bound() {
    let code = from_spec("circulant:3:0,1");
    let (graph, layout) = build_spacetime_graph(&code, 4).unwrap();
    assert_eq!(graph.z_bound(), code.j() * (code.ell() + 1));
    assert!(graph.max_degree_observed() <= graph.z_bound());
    assert_eq!(graph.vertex_count(), layout.vertex_count());
    let hist = sample_cluster_histogram(&graph, 0.01, 2000, 3).unwrap();
    assert!(hist.total_events() > 0);
}

#[test]
fn percolation_csv_has_bound_column() {
    let code = from_spec("circulant:3:0,1");
    let graph = build_connectivity_graph(&code);
    let hist = sample_cluster_histogram(&graph, 0.05, 1000, 1).unwrap();
    let csv = hist.to_csv(graph.z_bound());
    assert!(csv.starts_with("s,count,n_hat,eq3_bound\n"));
    assert!(csv.lines().count() > 1);
}

#[test]
fn bounds_report_for_the_3_4_family() {
    let r = BoundsReport::new(4, 7).unwrap().with_gv(3, 4, None).unwrap();
    assert_eq!(r.p0, 1.0 / 23.0);
    assert_eq!(r.z_prime, 32);
    let gv = r.gv.unwrap();
    assert!((gv.distance_per_sqrt_n() - 0.09).abs() < 0.005);
    assert!(bounds::rate_bound(7, 24).unwrap() < 1.0);
}

fn erasure_config(p_values: Vec<f64>, trials: u64) -> SweepConfig {
    SweepConfig {
        channel: Channel::Erasure,
        p_values,
        trials,
        seed: 21,
        budget: ClusterBudget::default(),
        count_budget_failures: true,
    }
}

#[test]
fn erasure_failures_grow_with_p() {
    let code = from_spec("circulant:15:0,1,3,7");
    let r = run_sweep(&code, &erasure_config(vec![0.01, 0.08], 10_000)).unwrap();
    let (low, high) = (&r.points[0], &r.points[1]);
    assert!(low.ci_high < high.ci_low, "{low:?} {high:?}");
}

#[test]
fn circulant_family_threshold_is_above_p0() {
    let grid = vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4];
    let results: Vec<_> = [8usize, 15]
        .iter()
        .map(|&l| {
            let h = circulant(l, &[0, 1, 3, 7]).unwrap();
            let code = hypergraph_product_with_meta(&h, &h, String::new()).unwrap();
            run_sweep(&code, &erasure_config(grid.clone(), 2000)).unwrap()
        })
        .collect();
    let z = results.iter().map(|r| r.code.z).max().unwrap();
    let p0 = bounds::threshold_for_degree(z).unwrap();
    let est = threshold_estimate(&results).unwrap();
    let upper = match est {
        ThresholdEstimate::Interval { high, .. } => high,
        ThresholdEstimate::AtLeast(b) | ThresholdEstimate::AtMost(b) => b,
    };
    assert!(upper >= p0, "{est:?} p0 = {p0}");
}
