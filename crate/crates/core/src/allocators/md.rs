use super::Allocation;
use crate::resources::ResourceGrid;
use crate::scenario::Scenario;

/// Cyclic allocation over the position order: the `n`-th vehicle (1-based)
/// gets `((n - 1) mod R) + 1`.
pub fn allocate_md(scenario: &Scenario, grid: &ResourceGrid) -> Allocation {
    let r = grid.total() as usize;
    Allocation::from_resources((0..scenario.len()).map(|i| (i % r) as u32 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocators::{
        brute_force_best_mean_distance, class_sizes, mean_same_resource_distance, Slot,
    };
    use proptest::prelude::*;

    fn line(xs: Vec<f64>) -> Scenario {
        Scenario::from_positions(xs, 1e6, false).unwrap()
    }

    #[test]
    fn cyclic_pattern() {
        let s = line((0..8).map(|i| i as f64 * 10.0).collect());
        let a = allocate_md(&s, &ResourceGrid::new(4, 1).unwrap());
        let got: Vec<u32> = a.slots().iter().map(|s| s.resource().unwrap()).collect();
        assert_eq!(got, vec![1, 2, 3, 4, 1, 2, 3, 4]);
    }

    #[test]
    fn distinct_when_resources_suffice() {
        let s = line(vec![5.0, 1.0, 3.0]);
        let a = allocate_md(&s, &ResourceGrid::new(10, 1).unwrap());
        assert_eq!(a.slots(), &[Slot::Resource(1), Slot::Resource(2), Slot::Resource(3)]);
    }

    #[test]
    fn optimal_for_eight_vehicles_two_resources() {
        let xs = vec![0.0, 7.0, 15.0, 40.0, 41.0, 63.0, 90.0, 118.0];
        let s = line(xs.clone());
        let md: Vec<u32> = allocate_md(&s, &ResourceGrid::new(2, 1).unwrap())
            .slots()
            .iter()
            .map(|s| s.resource().unwrap())
            .collect();
        let md_value = mean_same_resource_distance(&xs, &md).unwrap();
        let best = brute_force_best_mean_distance(&xs, 2, Some(&class_sizes(&md, 2)));
        assert!(best <= md_value + 1e-9, "{best} > {md_value}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        // Among assignments using MD's class sizes, cyclic order maximizes
        // the mean same-resource distance.
        #[test]
        fn md_optimal_for_its_class_sizes(
            mut xs in prop::collection::vec(0.0f64..1000.0, 3..=8),
            r in 2u32..=3,
        ) {
            prop_assume!(xs.len() > r as usize);
            xs.sort_by(f64::total_cmp);
            let s = line(xs.clone());
            let md: Vec<u32> = allocate_md(&s, &ResourceGrid::new(r, 1).unwrap())
                .slots().iter().map(|s| s.resource().unwrap()).collect();
            let md_value = mean_same_resource_distance(&xs, &md).unwrap();
            let best = brute_force_best_mean_distance(&xs, r, Some(&class_sizes(&md, r)));
            prop_assert!(best <= md_value + 1e-9 * md_value.max(1.0));
        }
    }
}
