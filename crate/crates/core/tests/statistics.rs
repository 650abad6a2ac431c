//! Statistical checks of the random models against their laws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use v2vbench::allocators::{allocate_md, allocate_rr, Slot};
use v2vbench::analysis::nth_neighbor_cdf;
use v2vbench::radio::ShadowField;
use v2vbench::resources::ResourceGrid;
use v2vbench::scenario::{generate_ppp, Scenario, ScenarioConfig};
use v2vbench::simulator::stats::{ks_pvalue, ks_statistic, mean_ci95};

fn ring(density: f64, seed: u64) -> Scenario {
    generate_ppp(&ScenarioConfig { density, road_length: 20_000.0, wrap: false, seed }).unwrap()
}

fn gaps(xs: &[f64]) -> Vec<f64> {
    xs.windows(2).map(|w| w[1] - w[0]).collect()
}

#[test]
fn ppp_gaps_are_exponential() {
    let s = ring(0.1, 3);
    let g = gaps(s.positions());
    let d = ks_statistic(&g, |x| 1.0 - (-0.1 * x).exp());
    assert!(ks_pvalue(g.len(), d) > 0.01, "D = {d}");
}

#[test]
fn rr_marking_thins_to_rate_rho_over_r() {
    // One resource of an RR allocation is a PPP of density rho / R.
    let grid = ResourceGrid::new(10, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut g = Vec::new();
    for seed in 0..20 {
        let s = ring(0.1, 100 + seed);
        let alloc = allocate_rr(s.len(), &grid, &mut rng);
        let on_one: Vec<f64> = s
            .positions()
            .iter()
            .zip(alloc.slots())
            .filter(|(_, slot)| **slot == Slot::Resource(1))
            .map(|(x, _)| *x)
            .collect();
        g.extend(gaps(&on_one));
    }
    let d = ks_statistic(&g, |x| 1.0 - (-0.01 * x).exp());
    assert!(ks_pvalue(g.len(), d) > 0.01, "D = {d} over {} gaps", g.len());
}

#[test]
fn md_reuse_gaps_follow_the_r_th_neighbor_law() {
    let r = 20;
    let grid = ResourceGrid::new(r, 1).unwrap();
    let mut g = Vec::new();
    for seed in 0..30 {
        let s = ring(0.1, 200 + seed);
        let alloc = allocate_md(&s, &grid);
        let on_one: Vec<f64> = s
            .positions()
            .iter()
            .zip(alloc.slots())
            .filter(|(_, slot)| **slot == Slot::Resource(1))
            .map(|(x, _)| *x)
            .collect();
        g.extend(gaps(&on_one));
    }
    let d = ks_statistic(&g, |x| nth_neighbor_cdf(r, 0.1, x).unwrap());
    assert!(ks_pvalue(g.len(), d) > 0.01, "D = {d} over {} gaps", g.len());
}

#[test]
fn shadowing_marginal_and_time_correlation() {
    let n = 60;
    let ids: Vec<u64> = (0..n as u64).collect();
    let mut field = ShadowField::new(3.0, 25.0, 9);
    // Link lengths grow by 25 m between the snapshots: correlation e^-1.
    field.advance(&ids, |a, b| 10.0 * a.abs_diff(b) as f64);
    let first: Vec<f64> = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).map(|(a, b)| field.db(a, b)).collect();
    field.advance(&ids, |a, b| 10.0 * a.abs_diff(b) as f64 + 25.0);
    let second: Vec<f64> = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).map(|(a, b)| field.db(a, b)).collect();

    let (mean, _) = mean_ci95(&first);
    let var = first.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (first.len() - 1) as f64;
    assert!(mean.abs() < 0.25, "mean {mean}");
    assert!((var.sqrt() - 3.0).abs() < 0.15, "sd {}", var.sqrt());

    let cov = first.iter().zip(&second).map(|(a, b)| a * b).sum::<f64>() / first.len() as f64;
    let corr = cov / 9.0;
    assert!((corr - (-1.0f64).exp()).abs() < 0.06, "corr {corr}");

    for a in 0..n {
        for b in 0..n {
            assert_eq!(field.db(a, b), field.db(b, a));
        }
    }
}
