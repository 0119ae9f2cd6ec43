use qcqpx_core::constraints::{conjugate, is_feasible, rotation, scaling, Transform3};
use qcqpx_core::extract::{extract, CasePath};
use qcqpx_core::instances::{convex_combine, instance_disk_ring, instance_strip, instance_strip_single, strip_objective};
use qcqpx_core::sdp::{solve_relaxation, SolverOptions, Status};
use qcqpx_core::verify::{bounded_region_box, brute_force_2d, verify_condition_d, DEFAULT_COARSE, DEFAULT_REFINE_LEVELS};
use qcqpx_core::{ConstraintSet, QcqpInstance, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_objective(rng: &mut ChaCha8Rng) -> SymMatrix {
    let lower: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..=2.0)).collect();
    SymMatrix::from_lower(3, lower).unwrap()
}

fn transformed_ring() -> ConstraintSet {
    let t: Transform3 = scaling([1.5, 0.8]).unwrap().then(&rotation(0.3));
    let set = instance_disk_ring(0.5).unwrap();
    let cs = set.constraints().iter().map(|c| conjugate(c, &t)).collect::<Result<Vec<_>, _>>().unwrap();
    let mut out = ConstraintSet::new(cs).unwrap();
    out.set_alphas(set.alphas().map(<[f64]>::to_vec)).unwrap();
    out
}

#[test]
fn random_objectives_match_grid_search() {
    let sets = [
        instance_disk_ring(0.5).unwrap(),
        transformed_ring(),
        convex_combine(&instance_disk_ring(0.5).unwrap(), &instance_disk_ring(1.0 / 3.0).unwrap(), 0.5).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for set in &sets {
        assert!(verify_condition_d(set).unwrap().passed);
        let bbox = bounded_region_box(set).unwrap().unwrap().expanded(0.01);
        for _ in 0..4 {
            let inst = QcqpInstance::homogeneous(random_objective(&mut rng), set.clone()).unwrap();
            let sol = solve_relaxation(&inst, &SolverOptions::default()).unwrap();
            assert_eq!(sol.status, Status::Optimal);
            let grid = brute_force_2d(&inst, &bbox, DEFAULT_COARSE, DEFAULT_REFINE_LEVELS).unwrap();
            let zeta = grid.value;
            assert!((sol.objective - zeta).abs() <= 1e-3 * (1.0 + zeta.abs()), "{} vs {zeta}", sol.objective);
            let r = extract(&inst, &sol).unwrap();
            let u = r.u.as_ref().unwrap();
            let vals: Vec<f64> = set.constraints().iter().map(|c| c.evaluate(u).unwrap()).collect();
            assert!(is_feasible(set, u).unwrap(), "{u:?} {vals:?} {:?}", r.case_path);
            assert!((r.objective - zeta).abs() <= 2e-3 * (1.0 + zeta.abs()));
        }
    }
}

#[test]
fn strip_representations_differ() {
    let q = strip_objective();
    let two = QcqpInstance::homogeneous(q.clone(), instance_strip()).unwrap();
    let sol = solve_relaxation(&two, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, Status::Unbounded);
    assert!(sol.ray.is_some());

    let one = QcqpInstance::homogeneous(q, instance_strip_single()).unwrap();
    let sol = solve_relaxation(&one, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    assert!((sol.objective + 4.0).abs() < 1e-4);
    let r = extract(&one, &sol).unwrap();
    let u = r.u.unwrap();
    assert!(((u[0] + u[1]).abs() - 2.0).abs() < 1e-3);
    assert_ne!(r.case_path, CasePath::Ii);
}
