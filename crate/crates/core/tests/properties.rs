use proptest::prelude::*;

use v2vbench::analysis::{
    md_interference_cdf, p_hd_md, prp, rr_stable_params, stable_cdf, Benchmark, MdMode, MdParams,
};
use v2vbench::radio::RadioConfig;
use v2vbench::resources::ResourceGrid;

fn log_grid(centre: f64) -> impl Iterator<Item = f64> {
    (0..100).map(move |k| centre * 10f64.powf(-3.0 + 6.0 * f64::from(k) / 99.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stable_cdf_is_a_cdf(rho in 0.01f64..0.5, beta in 2.0f64..5.0, r in 10u32..500) {
        let radio = RadioConfig { beta, ..RadioConfig::default() };
        let p = rr_stable_params(rho, &ResourceGrid::new(r, 1).unwrap(), &radio).unwrap();
        let mut prev = 0.0;
        for y in log_grid(p.c) {
            let f = stable_cdf(&p, y).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!(f >= prev - 1e-9, "F({y}) = {f} < {prev}");
            prev = f;
        }
    }

    #[test]
    fn md_cdf_is_a_cdf(rho in 0.02f64..0.3, d in 10.0f64..600.0, full in any::<bool>()) {
        let radio = RadioConfig::default();
        let grid = ResourceGrid::new(100, 1).unwrap();
        let p = MdParams::new(rho, &grid, &radio, d).unwrap();
        let mode = if full { MdMode::Full } else { MdMode::Approximate };
        let scale = p.pr0 * (f64::from(p.r_total) / rho).powf(-p.beta);
        let mut prev = 0.0;
        for y in log_grid(scale) {
            let f = md_interference_cdf(&p, y, mode).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!(f >= prev - 1e-9, "F({y}) = {f} < {prev}");
            prev = f;
        }
    }

    #[test]
    fn prp_is_a_probability(rho in 0.02f64..0.3, d in 1.0f64..800.0, r_time in 20u32..500) {
        let radio = RadioConfig::default();
        let grid = ResourceGrid::new(r_time, 1).unwrap();
        for algo in [Benchmark::Rr, Benchmark::Md(MdMode::Approximate)] {
            let v = prp(algo, &radio, rho, &grid, d).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn md_half_duplex_is_a_probability(rho in 0.001f64..1.0, d in 0.0f64..5000.0, r_time in 1u32..200) {
        let v = p_hd_md(rho, d, &ResourceGrid::new(r_time, 1).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn md_dominates_rr_at_defaults_up_to_300_m() {
    let radio = RadioConfig::default();
    let grid = ResourceGrid::new(100, 1).unwrap();
    for k in 1..=12 {
        let d = 25.0 * f64::from(k);
        let md = prp(Benchmark::Md(MdMode::Approximate), &radio, 0.1, &grid, d).unwrap();
        let rr = prp(Benchmark::Rr, &radio, 0.1, &grid, d).unwrap();
        assert!(md >= rr, "{d} m: MD {md} < RR {rr}");
    }
}
