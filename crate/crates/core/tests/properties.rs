//! Property tests for the algebra and file-format invariants.

use nalgebra::Vector3;
use proptest::prelude::*;

use rigcal_core::dq::DualQuaternion;
use rigcal_core::interp::sclerp;
use rigcal_core::pose::Pose;
use rigcal_core::quat::Quaternion;
use rigcal_core::trajectory::Trajectory;

fn arb_unit_quaternion() -> impl Strategy<Value = Quaternion> {
    (
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
    )
        .prop_filter_map("non-degenerate quaternion", |(w, x, y, z)| {
            let q = Quaternion::new(w, x, y, z);
            (q.norm() > 0.2).then(|| q.normalized())
        })
}

fn arb_vector(scale: f64) -> impl Strategy<Value = Vector3<f64>> {
    (-scale..scale, -scale..scale, -scale..scale).prop_map(|(x, y, z)| Vector3::new(x, y, z))
}

fn arb_unit_dq() -> impl Strategy<Value = DualQuaternion> {
    (arb_unit_quaternion(), arb_vector(8.0))
        .prop_map(|(q, t)| DualQuaternion::from_rotation_translation(&q, &t))
}

fn arb_pose() -> impl Strategy<Value = Pose> {
    (arb_unit_quaternion(), arb_vector(10.0)).prop_map(|(q, t)| Pose::new(0.0, q, t))
}

fn max_component_diff(a: &DualQuaternion, b: &DualQuaternion) -> f64 {
    a.to_array()
        .iter()
        .zip(b.to_array())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

proptest! {
    // product of unit DQs is associative and stays unit
    #[test]
    fn dq_product_is_associative(a in arb_unit_dq(), b in arb_unit_dq(), c in arb_unit_dq()) {
        let left = a.mul(&b).mul(&c);
        let right = a.mul(&b.mul(&c));
        prop_assert!(max_component_diff(&left, &right) < 1e-9);
        prop_assert!(left.is_unit(1e-9));
    }

    // conjugation reverses products
    #[test]
    fn conjugate_reverses_products(a in arb_unit_dq(), b in arb_unit_dq()) {
        let lhs = a.mul(&b).conjugate();
        let rhs = b.conjugate().mul(&a.conjugate());
        prop_assert!(max_component_diff(&lhs, &rhs) < 1e-9);
    }

    // q (x) q* embeds the squared norm as a dual scalar
    #[test]
    fn product_with_conjugate_is_norm(q in arb_unit_dq()) {
        let prod = q.mul(&q.conjugate());
        let (real, dual) = q.norm_sq();
        prop_assert!((prod.real.w - real).abs() < 1e-9);
        prop_assert!((prod.dual.w - dual).abs() < 1e-9);
        prop_assert!(prod.real.vector().norm() < 1e-9);
        prop_assert!(prod.dual.vector().norm() < 1e-9);
    }

    // pose composition maps onto DQ multiplication (double cover sign)
    #[test]
    fn pose_to_dq_is_homomorphism(a in arb_pose(), b in arb_pose()) {
        let lhs = a.compose(&b).to_dq();
        let rhs = a.to_dq().mul(&b.to_dq()).canonicalized();
        prop_assert!(max_component_diff(&lhs, &rhs) < 1e-9);
    }

    // converting back to a pose inverts the embedding
    #[test]
    fn pose_round_trip(p in arb_pose()) {
        let back = Pose::from_dq(&p.to_dq(), p.timestamp).unwrap();
        let (dt, dr) = p.error_to(&back);
        prop_assert!(dt < 1e-9);
        prop_assert!(dr < 1e-9);
    }

    // interpolation is symmetric under endpoint swap
    #[test]
    fn sclerp_swap_symmetry(q1 in arb_unit_dq(), q2 in arb_unit_dq(), n in 0.0f64..1.0) {
        let fwd = sclerp(&q1, &q2, n).unwrap();
        let rev = sclerp(&q2, &q1, 1.0 - n).unwrap();
        prop_assert!(max_component_diff(&fwd, &rev) < 1e-8);
    }

    // screw power composes additively in the exponent
    #[test]
    fn pow_is_additive(q in arb_unit_dq(), n in 0.0f64..0.5, m in 0.0f64..0.5) {
        let combined = q.pow(n + m).unwrap();
        let split = q.pow(n).unwrap().mul(&q.pow(m).unwrap()).canonicalized();
        prop_assert!(max_component_diff(&combined, &split) < 1e-8);
    }

    // pose files survive a serialize/parse cycle at 9 decimal places
    #[test]
    fn pose_file_round_trip(poses in proptest::collection::vec(arb_pose(), 2..20)) {
        let stamped: Vec<Pose> = poses
            .into_iter()
            .enumerate()
            .map(|(k, mut p)| {
                p.timestamp = k as f64 * 0.1;
                p
            })
            .collect();
        let traj = Trajectory::new("t", stamped).unwrap();
        let text = rigcal_core::io::serialize_trajectory(&traj);
        let parsed = rigcal_core::io::parse_pose_str(
            &text,
            std::path::Path::new("prop.txt"),
            "t",
        )
        .unwrap();
        let text2 = rigcal_core::io::serialize_trajectory(&parsed.trajectory);
        prop_assert_eq!(text, text2);
    }
}
