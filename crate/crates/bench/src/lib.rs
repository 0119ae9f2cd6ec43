//! Workloads shared by the benchmarks.

use qcqpx_core::instances::{example41, instance_disk_ring};
use qcqpx_core::{QcqpInstance, Rank1Decomposition, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A rank-`r` decomposition of size `n` and a matrix orthogonal to its sum.
pub fn split_case(n: usize, r: usize, seed: u64) -> (Rank1Decomposition, SymMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors = (0..r).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let d = Rank1Decomposition::new(n, factors);
    let x = d.reconstruct();
    let lower = (0..n * (n + 1) / 2).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b = SymMatrix::from_lower(n, lower).expect("length matches");
    let b = b.axpy(-b.inner(&x).expect("same size") / x.inner(&x).expect("same size"), &x);
    (d, b)
}

pub fn random_symmetric(n: usize, seed: u64) -> SymMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lower = (0..n * (n + 1) / 2).map(|_| rng.gen_range(-2.0..2.0)).collect();
    SymMatrix::from_lower(n, lower).expect("length matches")
}

pub fn table_rows() -> Vec<QcqpInstance> {
    (1..=6).map(|k| example41::instance(k).expect("rows 1 to 6")).collect()
}

pub fn ring_instance(seed: u64) -> QcqpInstance {
    QcqpInstance::homogeneous(random_symmetric(3, seed), instance_disk_ring(0.5).expect("valid radius"))
        .expect("dimensions match")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_case_is_orthogonal() {
        let (d, b) = split_case(5, 3, 1);
        assert!(b.inner(&d.reconstruct()).unwrap().abs() < 1e-12);
    }
}
