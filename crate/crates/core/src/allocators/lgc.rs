use rand::seq::SliceRandom;
use rand::Rng;

use super::Allocation;
use crate::resources::ResourceGrid;
use crate::scenario::{separation, Scenario};

/// Location-based greedy colouring. Vehicles are visited in a fresh random
/// order; each takes the resource whose nearest current user is farthest
/// away. Unused resources count as infinitely far, so the first `R`
/// vehicles receive distinct resources. Ties go to the lowest index.
pub fn allocate_lgc<G: Rng + ?Sized>(scenario: &Scenario, grid: &ResourceGrid, rng: &mut G) -> Allocation {
    let n = scenario.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    lgc_in_order(scenario, grid, &order)
}

pub(crate) fn lgc_in_order(scenario: &Scenario, grid: &ResourceGrid, order: &[usize]) -> Allocation {
    let (l, wrap) = (scenario.road_length(), scenario.wrap());
    let xs = scenario.positions();
    let r = grid.total() as usize;
    // Sorted positions of the current users of each resource.
    let mut users: Vec<Vec<f64>> = vec![Vec::new(); r];
    let mut out = vec![0u32; xs.len()];
    for &v in order {
        let x = xs[v];
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (k, list) in users.iter().enumerate() {
            let gap = nearest(list, x, l, wrap);
            if gap > best.0 {
                best = (gap, k);
            }
        }
        let list = &mut users[best.1];
        let at = list.partition_point(|&p| p < x);
        list.insert(at, x);
        out[v] = best.1 as u32 + 1;
    }
    Allocation::from_resources(out)
}

fn nearest(sorted: &[f64], x: f64, l: f64, wrap: bool) -> f64 {
    if sorted.is_empty() {
        return f64::INFINITY;
    }
    let at = sorted.partition_point(|&p| p < x);
    let mut best = f64::INFINITY;
    if at < sorted.len() {
        best = best.min(separation(x, sorted[at], l, wrap));
    }
    if at > 0 {
        best = best.min(separation(x, sorted[at - 1], l, wrap));
    }
    if wrap {
        best = best
            .min(separation(x, sorted[0], l, wrap))
            .min(separation(x, sorted[sorted.len() - 1], l, wrap));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocators::Slot;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn distinct_when_resources_suffice() {
        let s = Scenario::from_positions(vec![0.0, 5.0, 10.0, 15.0], 1000.0, false).unwrap();
        let g = ResourceGrid::new(4, 1).unwrap();
        let a = allocate_lgc(&s, &g, &mut ChaCha8Rng::seed_from_u64(3));
        let mut rs: Vec<u32> = a.slots().iter().map(|s| s.resource().unwrap()).collect();
        rs.sort_unstable();
        assert_eq!(rs, vec![1, 2, 3, 4]);
    }

    #[test]
    fn extra_vehicle_reuses_farthest() {
        let s = Scenario::from_positions(vec![0.0, 100.0, 400.0, 390.0], 10_000.0, false).unwrap();
        // Sorted: 0, 100, 390, 400; visit 0, 100, 390 then 400.
        let g = ResourceGrid::new(3, 1).unwrap();
        let a = lgc_in_order(&s, &g, &[0, 1, 2, 3]);
        assert_eq!(a.get(3), Slot::Resource(1));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let s = Scenario::from_positions(vec![0.0, 50.0, 100.0], 10_000.0, false).unwrap();
        let g = ResourceGrid::new(2, 1).unwrap();
        // 0 -> r1, 100 -> r2, 50 is 50 m from both: lowest index.
        let a = lgc_in_order(&s, &g, &[0, 2, 1]);
        assert_eq!(a.get(1), Slot::Resource(1));
        let again = lgc_in_order(&s, &g, &[0, 2, 1]);
        assert_eq!(a, again);
    }
}
