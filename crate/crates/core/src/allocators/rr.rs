use rand::Rng;

use super::Allocation;
use crate::resources::ResourceGrid;

/// Independent uniform resource per vehicle, redrawn on every call.
pub fn allocate_rr<G: Rng + ?Sized>(n_vehicles: usize, grid: &ResourceGrid, rng: &mut G) -> Allocation {
    let r = grid.total();
    Allocation::from_resources((0..n_vehicles).map(|_| rng.random_range(1..=r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocators::Slot;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_resource_is_shared() {
        let g = ResourceGrid::new(1, 1).unwrap();
        let a = allocate_rr(10, &g, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(a.slots().iter().all(|s| *s == Slot::Resource(1)));
    }

    #[test]
    fn uniform_frequencies() {
        let g = ResourceGrid::new(4, 1).unwrap();
        let n = 40_000;
        let a = allocate_rr(n, &g, &mut ChaCha8Rng::seed_from_u64(1));
        let sd = (n as f64 * 0.25 * 0.75).sqrt();
        for r in 1..=4 {
            let c = a.slots().iter().filter(|s| **s == Slot::Resource(r)).count() as f64;
            assert!((c - n as f64 / 4.0).abs() < 3.0 * sd, "resource {r}: {c}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let g = ResourceGrid::new(100, 1).unwrap();
        let a = allocate_rr(50, &g, &mut ChaCha8Rng::seed_from_u64(7));
        let b = allocate_rr(50, &g, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
    }
}
