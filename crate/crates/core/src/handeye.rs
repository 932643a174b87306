//! Dual-quaternion hand-eye solver.
//!
//! Matched relative motions `(a, b)` of two rigidly coupled sensors satisfy
//! `a = x b x*` for the unknown unit extrinsic DQ `x`. Because congruent
//! screws share scalar parts, each pair contributes six linear constraints
//! `S (x_r; x_d) = 0` on the eight DQ components. Stacking pairs gives a
//! rank-6 system whose two smallest right-singular vectors span the
//! solution space; the unit-norm and orthogonality constraints pick the
//! unique combination via a scalar quadratic.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::dq::DualQuaternion;
use crate::error::{Error, Result};
use crate::init::RigidFit;
use crate::interp::AlignedPair;
use crate::pose::Pose;
use crate::tol::PARALLEL_AXIS_TOL;

/// Matched relative motions of the two sensors over one grid interval.
#[derive(Debug, Clone, Copy)]
pub struct MotionPair {
    /// Front-sensor motion over the interval.
    pub a: DualQuaternion,
    /// Rear-sensor motion over the same interval.
    pub b: DualQuaternion,
    /// `(t_start, t_end)` seconds.
    pub interval: (f64, f64),
    /// Screw rotation angle of the front motion (radians).
    pub rotation_angle: f64,
}

/// Motion pairs surviving the quality filters, with rejection counts.
#[derive(Debug, Clone, Default)]
pub struct MotionExtraction {
    pub pairs: Vec<MotionPair>,
    pub rejected_small_angle: usize,
    pub rejected_congruence: usize,
}

/// Conditioning verdict for a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegeneracyFlag {
    WellConditioned,
    /// Screw axes nearly parallel: the extrinsic component along the common
    /// axis is weakly observable.
    NearPlanar,
    /// Too few pairs for a trustworthy estimate.
    Insufficient,
}

/// Recovered extrinsic with solver diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub extrinsic: DualQuaternion,
    pub extrinsic_pose: Pose,
    /// Singular values of the stacked constraint matrix, descending.
    pub singular_values: Vec<f64>,
    pub pairs_used: usize,
    /// Pairs dropped by the initialization-based axis gate.
    pub rejected_by_init: usize,
    /// Mean of `|S x|` over the pairs used (dimensionless).
    pub mean_residual: f64,
    pub degeneracy_flag: DegeneracyFlag,
    pub batches: usize,
}

/// Solver knobs; defaults match the pipeline configuration defaults.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Pairs per batch; `None` solves one whole-matrix SVD.
    pub batch_size: Option<usize>,
    /// `NearPlanar` when `sigma_6 / sigma_5` falls below this.
    pub degeneracy_threshold: f64,
    /// Gate (radians) on the angle between the rear screw axis and the one
    /// predicted from the front axis by the initial fit.
    pub init_axis_gate: f64,
    /// Below this pair count the result is flagged `Insufficient`.
    pub min_confident_pairs: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            batch_size: Some(50),
            degeneracy_threshold: 1e-3,
            init_axis_gate: 30f64.to_radians(),
            min_confident_pairs: 10,
        }
    }
}

/// Relative motions per consecutive grid interval, filtered by rotation
/// magnitude and screw congruence.
pub fn extract_motions(
    pair: &AlignedPair,
    min_angle: f64,
    congruence_tol: f64,
) -> MotionExtraction {
    let mut out = MotionExtraction::default();
    for i in 1..pair.len() {
        let a = pair.poses_a[i - 1].between(&pair.poses_a[i]).to_dq();
        let b = pair.poses_b[i - 1].between(&pair.poses_b[i]).to_dq();
        let angle_a = a.real.angle();
        let angle_b = b.real.angle();
        if angle_a.min(angle_b) < min_angle {
            out.rejected_small_angle += 1;
            continue;
        }
        if (a.real.w - b.real.w).abs() > congruence_tol
            || (a.dual.w - b.dual.w).abs() > congruence_tol
        {
            out.rejected_congruence += 1;
            continue;
        }
        out.pairs.push(MotionPair {
            a,
            b,
            interval: (pair.timestamps[i - 1], pair.timestamps[i]),
            rotation_angle: angle_a,
        });
    }
    out
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// The 6x8 constraint block of one motion pair.
///
/// Row block 1: `[v(a_r)-v(b_r) | [v(a_r)+v(b_r)]x | 0 | 0]`;
/// row block 2: `[v(a_d)-v(b_d) | [v(a_d)+v(b_d)]x | v(a_r)-v(b_r) | [v(a_r)+v(b_r)]x]`,
/// acting on the extrinsic stacked as `(w_r, v_r, w_d, v_d)`.
pub fn build_s_matrix(m: &MotionPair) -> SMatrix<f64, 6, 8> {
    let ar = m.a.real.vector();
    let br = m.b.real.vector();
    let ad = m.a.dual.vector();
    let bd = m.b.dual.vector();

    let mut s = SMatrix::<f64, 6, 8>::zeros();
    s.fixed_view_mut::<3, 1>(0, 0).copy_from(&(ar - br));
    s.fixed_view_mut::<3, 3>(0, 1).copy_from(&skew(&(ar + br)));
    s.fixed_view_mut::<3, 1>(3, 0).copy_from(&(ad - bd));
    s.fixed_view_mut::<3, 3>(3, 1).copy_from(&skew(&(ad + bd)));
    s.fixed_view_mut::<3, 1>(3, 4).copy_from(&(ar - br));
    s.fixed_view_mut::<3, 3>(3, 5).copy_from(&skew(&(ar + br)));
    s
}

/// `T_B_R = T_B_F * T_F_R`: express the solved extrinsic in the vehicle
/// base frame given the known base-to-front mount.
pub fn express_in_base(extrinsic_fr: &Pose, base_to_front: &Pose) -> Pose {
    base_to_front.compose(extrinsic_fr)
}

/// Screw axis direction of a motion (unit vector).
fn screw_axis(q: &DualQuaternion) -> Vector3<f64> {
    let v = q.real.vector();
    let n = v.norm();
    if n > 0.0 {
        v / n
    } else {
        Vector3::z()
    }
}

/// Singular values (descending) and right-singular vectors of the stacked
/// constraint matrix, computed through the 8x8 Gram matrix. The Gram route
/// keeps memory constant in the pair count and the symmetric solver is
/// robust to the exactly rank-deficient systems noiseless data produces.
fn gram_spectrum(pairs: &[MotionPair]) -> ([f64; 8], [SVector<f64, 8>; 8]) {
    let mut gram = SMatrix::<f64, 8, 8>::zeros();
    for p in pairs {
        let s = build_s_matrix(p);
        gram += s.transpose() * s;
    }
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..8).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let mut singular = [0.0f64; 8];
    let mut vectors = [SVector::<f64, 8>::zeros(); 8];
    for (rank, &col) in order.iter().enumerate() {
        singular[rank] = eig.eigenvalues[col].max(0.0).sqrt();
        vectors[rank] = eig.eigenvectors.column(col).into_owned();
    }
    (singular, vectors)
}

/// Solve one batch; returns the unit extrinsic DQ and the batch's singular
/// values (descending).
fn solve_batch(pairs: &[MotionPair]) -> Result<(DualQuaternion, [f64; 8])> {
    let (singular, vectors) = gram_spectrum(pairs);
    let q = combine_nullspace(&vectors[6], &vectors[7])?;
    Ok((q, singular))
}

/// Recover the unit extrinsic from the two nullspace basis vectors via the
/// unit-norm and real-dual orthogonality constraints.
fn combine_nullspace(v7: &SVector<f64, 8>, v8: &SVector<f64, 8>) -> Result<DualQuaternion> {
    let u1 = Vector4::new(v7[0], v7[1], v7[2], v7[3]);
    let w1 = Vector4::new(v7[4], v7[5], v7[6], v7[7]);
    let u2 = Vector4::new(v8[0], v8[1], v8[2], v8[3]);
    let w2 = Vector4::new(v8[4], v8[5], v8[6], v8[7]);

    // orthogonality: a s^2 + b s + c = 0 with s = lambda1/lambda2
    let a = u1.dot(&w1);
    let b = u1.dot(&w2) + u2.dot(&w1);
    let c = u2.dot(&w2);
    // norm expression: s^2 n11 + 2 s n12 + n22 = 1/lambda2^2
    let n11 = u1.dot(&u1);
    let n12 = u1.dot(&u2);
    let n22 = u2.dot(&u2);
    let norm_expr = |s: f64| s * s * n11 + 2.0 * s * n12 + n22;

    // candidates carry (lambda1, lambda2, norm expression before scaling);
    // the true solution maximizes the norm expression, the spurious root
    // collapses the real part
    const EPS: f64 = 1e-12;
    let mut candidates: Vec<(f64, f64, f64)> = Vec::new();
    if a.abs() > EPS {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Err(Error::NumericalFailure(format!(
                "nullspace quadratic has no real root (disc {disc:.3e})"
            )));
        }
        let sq = disc.sqrt();
        for s in [(-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a)] {
            let val = norm_expr(s);
            if val > EPS {
                let l2 = 1.0 / val.sqrt();
                candidates.push((s * l2, l2, val));
            }
        }
    } else {
        // degenerate quadratic: lambda2 = 0 branch plus the linear root
        if n11 > EPS {
            candidates.push((1.0 / n11.sqrt(), 0.0, n11));
        }
        if b.abs() > EPS {
            let s = -c / b;
            let val = norm_expr(s);
            if val > EPS {
                let l2 = 1.0 / val.sqrt();
                candidates.push((s * l2, l2, val));
            }
        }
    }

    let best = candidates
        .into_iter()
        .max_by(|x, y| x.2.partial_cmp(&y.2).unwrap())
        .ok_or_else(|| Error::NumericalFailure("no valid nullspace combination".into()))?;

    let (l1, l2, _) = best;
    let y = v7.scale(l1) + v8.scale(l2);
    let arr = [y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7]];
    Ok(DualQuaternion::from_array(&arr).normalized())
}

/// Solve the hand-eye system over all pairs.
///
/// Pairs are optionally gated against the initial fit, batched, solved per
/// batch by SVD nullspace analysis, and fused by weighted chordal averaging
/// of the sign-aligned 8-vectors. Degeneracy is judged on the singular
/// values of the full stacked system (accumulated as an 8x8 Gram matrix so
/// batching does not change the diagnostic).
pub fn solve(
    pairs: &[MotionPair],
    init: Option<&RigidFit>,
    options: &SolveOptions,
) -> Result<CalibrationResult> {
    // initialization-based outlier gate on the rear screw axis
    let mut rejected_by_init = 0usize;
    let usable: Vec<MotionPair> = match init {
        Some(fit) if !fit.low_confidence => pairs
            .iter()
            .filter(|p| {
                let predicted = fit.rotation.rotate(&screw_axis(&p.a));
                let cosine = predicted.dot(&screw_axis(&p.b)).clamp(-1.0, 1.0);
                let keep = cosine.acos() <= options.init_axis_gate;
                if !keep {
                    rejected_by_init += 1;
                }
                keep
            })
            .copied()
            .collect(),
        _ => pairs.to_vec(),
    };

    if usable.len() < 2 {
        return Err(Error::InsufficientMotion(format!(
            "{} usable motion pairs, need at least 2",
            usable.len()
        )));
    }
    let first_axis = screw_axis(&usable[0].a);
    let all_parallel = usable
        .iter()
        .all(|p| screw_axis(&p.a).cross(&first_axis).norm() < PARALLEL_AXIS_TOL);
    if all_parallel {
        return Err(Error::InsufficientMotion(
            "all screw axes are parallel; the extrinsic is unobservable along the axis".into(),
        ));
    }

    // equal-size batch partition so no batch is a tiny (ill-conditioned)
    // remainder of temporally adjacent motions
    let batch_size = options.batch_size.unwrap_or(usable.len()).max(2);
    let n_batches = usable.len().div_ceil(batch_size).max(1);
    let base = usable.len() / n_batches;
    let extra = usable.len() % n_batches;
    let mut batches: Vec<&[MotionPair]> = Vec::with_capacity(n_batches);
    let mut start = 0;
    for k in 0..n_batches {
        let len = base + usize::from(k < extra);
        batches.push(&usable[start..start + len]);
        start += len;
    }

    let (global_singular, _) = gram_spectrum(&usable);

    let axes_all_parallel = |pairs: &[MotionPair]| {
        let first = screw_axis(&pairs[0].a);
        pairs
            .iter()
            .all(|p| screw_axis(&p.a).cross(&first).norm() < PARALLEL_AXIS_TOL)
    };

    let mut fused = [0.0f64; 8];
    let mut reference: Option<[f64; 8]> = None;
    let mut solved_batches = 0usize;
    for batch in &batches {
        // a batch of parallel-axis motions cannot constrain the extrinsic
        if batches.len() > 1 && axes_all_parallel(batch) {
            continue;
        }
        let (q, singular) = match solve_batch(batch) {
            Ok(r) => r,
            // a corrupt batch is damped out of the fusion, not fatal
            Err(_) if batches.len() > 1 => continue,
            Err(e) => return Err(e),
        };
        // a batch is only usable when its nullspace pair is cleanly
        // separated from the weakest constraint; otherwise the batch has an
        // effectively unconstrained component and would poison the average
        let degenerate = singular[5] < options.degeneracy_threshold * singular[4]
            || singular[6] > 0.5 * singular[5];
        if batches.len() > 1 && degenerate {
            continue;
        }
        let mut v = q.to_array();
        match &reference {
            None => reference = Some(v),
            Some(r) => {
                let dot: f64 = v.iter().zip(r).map(|(x, y)| x * y).sum();
                if dot < 0.0 {
                    for c in &mut v {
                        *c = -*c;
                    }
                }
            }
        }
        // the floor keeps exact batches (whose seventh singular value is
        // numerical noise) at equal weight instead of a roundoff lottery
        let sigma7 = singular[6].max(1e-9 * singular[0]).max(f64::MIN_POSITIVE);
        let weight = 1.0 / sigma7.powi(2);
        for (acc, c) in fused.iter_mut().zip(v) {
            *acc += weight * c;
        }
        solved_batches += 1;
    }
    if solved_batches == 0 {
        // every batch was degenerate on its own: solve the whole system at
        // once and let the global flag report the conditioning
        let (q, _) = solve_batch(&usable)?;
        fused = q.to_array();
        solved_batches = 1;
    }
    let mut extrinsic = DualQuaternion::from_array(&fused).normalized();

    // sign disambiguation: prefer the hemisphere of the initial rotation
    // (the fit maps front positions onto rear, i.e. the inverse rotation)
    if let Some(fit) = init {
        if extrinsic.real.dot(&fit.rotation.conjugate()) < 0.0 {
            extrinsic = extrinsic.neg();
        }
    }

    let x = extrinsic.to_array();
    let xv: SVector<f64, 8> = SVector::from_column_slice(&x);
    let mean_residual = usable
        .iter()
        .map(|p| (build_s_matrix(p) * xv).norm())
        .sum::<f64>()
        / usable.len() as f64;

    let singular_values: Vec<f64> = global_singular.to_vec();

    let degeneracy_flag = if singular_values[5] < options.degeneracy_threshold * singular_values[4]
    {
        DegeneracyFlag::NearPlanar
    } else if usable.len() < options.min_confident_pairs {
        DegeneracyFlag::Insufficient
    } else {
        DegeneracyFlag::WellConditioned
    };

    let extrinsic_pose = Pose::from_dq(&extrinsic, 0.0)?;
    Ok(CalibrationResult {
        extrinsic,
        extrinsic_pose,
        singular_values,
        pairs_used: usable.len(),
        rejected_by_init,
        mean_residual,
        degeneracy_flag,
        batches: solved_batches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;
    use crate::test_util::{random_pose, random_rotation, random_vector};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Build a motion pair satisfying `a = x b x^-1` exactly.
    fn conjugate_pair(x: &Pose, b_pose: &Pose, t0: f64) -> MotionPair {
        let a_pose = x.compose(b_pose).compose(&x.inverse());
        let a = a_pose.to_dq();
        MotionPair {
            a,
            b: b_pose.to_dq(),
            interval: (t0, t0 + 0.1),
            rotation_angle: a.real.angle(),
        }
    }

    fn varied_motion(rng: &mut ChaCha8Rng) -> Pose {
        Pose::new(
            0.0,
            random_rotation(rng),
            random_vector(rng, 0.5),
        )
    }

    #[test]
    fn identity_extrinsic_lies_in_nullspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let m = varied_motion(&mut rng);
        let pair = conjugate_pair(&Pose::identity(0.0), &m, 0.0);
        let s = build_s_matrix(&pair);
        let x = SVector::<f64, 8>::from_column_slice(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((s * x).norm() < 1e-12);
    }

    #[test]
    fn exact_pair_annihilates_true_extrinsic() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..100 {
            let x = random_pose(&mut rng, 0.0);
            let pair = conjugate_pair(&x, &varied_motion(&mut rng), 0.0);
            let s = build_s_matrix(&pair);
            let xv = SVector::<f64, 8>::from_column_slice(&x.to_dq().to_array());
            assert!((s * xv).norm() < 1e-9);
        }
    }

    #[test]
    fn s_residual_grows_linearly_with_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let x = random_pose(&mut rng, 0.0);
        let xv = SVector::<f64, 8>::from_column_slice(&x.to_dq().to_array());
        let mean_at = |sigma: f64, rng: &mut ChaCha8Rng| {
            let mut total = 0.0;
            for _ in 0..300 {
                let b = varied_motion(rng);
                let mut pair = conjugate_pair(&x, &b, 0.0);
                // perturb the rear motion on the tangent
                let nudge_rot = Quaternion::from_scaled_axis(&random_vector(rng, sigma));
                let nudge = Pose::new(0.0, nudge_rot, random_vector(rng, sigma));
                pair.b = Pose::from_dq(&pair.b, 0.0).unwrap().compose(&nudge).to_dq();
                total += (build_s_matrix(&pair) * xv).norm();
            }
            total / 300.0
        };
        let r1 = mean_at(1e-4, &mut rng);
        let r2 = mean_at(2e-4, &mut rng);
        let r4 = mean_at(4e-4, &mut rng);
        assert!((r2 / r1 - 2.0).abs() < 0.5, "ratio {}", r2 / r1);
        assert!((r4 / r2 - 2.0).abs() < 0.5, "ratio {}", r4 / r2);
    }

    #[test]
    fn solve_recovers_constructed_extrinsic() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        for _ in 0..10 {
            let x = random_pose(&mut rng, 0.0);
            let pairs: Vec<MotionPair> = (0..40)
                .map(|k| conjugate_pair(&x, &varied_motion(&mut rng), k as f64 * 0.1))
                .collect();
            let result = solve(&pairs, None, &SolveOptions::default()).unwrap();
            let (dt, dr) = result.extrinsic_pose.error_to(&x);
            assert!(dt < 1e-9, "translation error {dt}");
            assert!(dr < 1e-9, "rotation error {dr}");
            assert!(result.mean_residual < 1e-9);
            assert_eq!(result.degeneracy_flag, DegeneracyFlag::WellConditioned);

            // hand-eye identity holds for every pair: a x - x b = 0
            for p in &pairs {
                let lhs = p.a.mul(&result.extrinsic);
                let rhs = result.extrinsic.mul(&p.b);
                let diff: f64 = lhs
                    .to_array()
                    .iter()
                    .zip(rhs.to_array())
                    .map(|(l, r)| (l - r).abs())
                    .fold(0.0, f64::max);
                assert!(diff < 1e-9);
            }
        }
    }

    #[test]
    fn solve_satisfies_rotation_translation_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let x = random_pose(&mut rng, 0.0);
        let pairs: Vec<MotionPair> = (0..30)
            .map(|k| conjugate_pair(&x, &varied_motion(&mut rng), k as f64 * 0.1))
            .collect();
        let result = solve(&pairs, None, &SolveOptions::default()).unwrap();
        let r_x = result.extrinsic_pose.rotation.to_rotation_matrix();
        let t_x = result.extrinsic_pose.translation;
        for p in &pairs {
            let pa = Pose::from_dq(&p.a, 0.0).unwrap();
            let pb = Pose::from_dq(&p.b, 0.0).unwrap();
            let r_a = pa.rotation.to_rotation_matrix();
            let r_b = pb.rotation.to_rotation_matrix();
            assert!((r_a * r_x - r_x * r_b).norm() < 1e-9);
            let lhs = (r_a - Matrix3::identity()) * t_x;
            let rhs = r_x * pb.translation - pa.translation;
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn permuting_pairs_leaves_single_batch_solution_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        let x = random_pose(&mut rng, 0.0);
        let mut pairs: Vec<MotionPair> = (0..25)
            .map(|k| conjugate_pair(&x, &varied_motion(&mut rng), k as f64 * 0.1))
            .collect();
        let opts = SolveOptions {
            batch_size: None,
            ..SolveOptions::default()
        };
        let before = solve(&pairs, None, &opts).unwrap();
        pairs.reverse();
        pairs.swap(0, 7);
        let after = solve(&pairs, None, &opts).unwrap();
        let sign = if before.extrinsic.real.dot(&after.extrinsic.real) < 0.0 {
            -1.0
        } else {
            1.0
        };
        let diff: f64 = before
            .extrinsic
            .to_array()
            .iter()
            .zip(after.extrinsic.to_array())
            .map(|(p, q)| (p - sign * q).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-9, "permuted solution drifted {diff}");
    }

    #[test]
    fn batch_sizes_agree_on_exact_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        let x = random_pose(&mut rng, 0.0);
        let pairs: Vec<MotionPair> = (0..120)
            .map(|k| conjugate_pair(&x, &varied_motion(&mut rng), k as f64 * 0.1))
            .collect();
        let solve_with = |bs: Option<usize>| {
            let opts = SolveOptions {
                batch_size: bs,
                ..SolveOptions::default()
            };
            solve(&pairs, None, &opts).unwrap().extrinsic
        };
        let whole = solve_with(None);
        for bs in [10, 50] {
            let batched = solve_with(Some(bs));
            let diff: f64 = whole
                .to_array()
                .iter()
                .zip(batched.to_array())
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-9, "batch size {bs} drifted {diff}");
        }
    }

    #[test]
    fn few_pairs_solve_but_flag_insufficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let x = random_pose(&mut rng, 0.0);
        let pairs: Vec<MotionPair> = (0..4)
            .map(|k| conjugate_pair(&x, &varied_motion(&mut rng), k as f64 * 0.1))
            .collect();
        let result = solve(&pairs, None, &SolveOptions::default()).unwrap();
        assert_eq!(result.degeneracy_flag, DegeneracyFlag::Insufficient);
        let (dt, dr) = result.extrinsic_pose.error_to(&x);
        assert!(dt < 1e-9 && dr < 1e-9);
    }

    #[test]
    fn single_pair_is_insufficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(58);
        let x = random_pose(&mut rng, 0.0);
        let pairs = vec![conjugate_pair(&x, &varied_motion(&mut rng), 0.0)];
        assert!(matches!(
            solve(&pairs, None, &SolveOptions::default()),
            Err(Error::InsufficientMotion(_))
        ));
    }

    #[test]
    fn exactly_parallel_axes_are_insufficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let x = random_pose(&mut rng, 0.0);
        let pairs: Vec<MotionPair> = (0..20)
            .map(|k| {
                let m = Pose::new(
                    0.0,
                    Quaternion::from_axis_angle(&Vector3::z(), rng.random_range(0.05..0.3)),
                    random_vector(&mut rng, 0.5),
                );
                conjugate_pair(&x, &m, k as f64 * 0.1)
            })
            .collect();
        assert!(matches!(
            solve(&pairs, None, &SolveOptions::default()),
            Err(Error::InsufficientMotion(_))
        ));
    }

    #[test]
    fn extract_motions_on_conjugate_trajectories() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let x = random_pose(&mut rng, 0.0);
        // build absolute trajectories sharing the anchor so poses conjugate exactly
        let mut pa = vec![Pose::identity(0.0)];
        for k in 1..30 {
            let m = varied_motion(&mut rng);
            let mut next = pa[k - 1].compose(&m);
            next.timestamp = k as f64 * 0.1;
            pa.push(next);
        }
        let pb: Vec<Pose> = pa
            .iter()
            .map(|p| {
                let mut q = x.inverse().compose(p).compose(&x);
                q.timestamp = p.timestamp;
                q
            })
            .collect();
        let aligned = AlignedPair {
            timestamps: pa.iter().map(|p| p.timestamp).collect(),
            poses_a: pa,
            poses_b: pb,
        };
        let ext = extract_motions(&aligned, 0.5f64.to_radians(), 0.02);
        assert!(ext.pairs.len() > 25);
        assert_eq!(ext.rejected_congruence, 0);
        let xq = x.to_dq();
        for p in &ext.pairs {
            // a = x b x*
            let rhs = xq.mul(&p.b).mul(&xq.conjugate()).canonicalized();
            let diff: f64 = p
                .a
                .to_array()
                .iter()
                .zip(rhs.to_array())
                .map(|(l, r)| (l - r).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-9);
        }
    }

    #[test]
    fn stationary_rig_yields_no_pairs() {
        let poses: Vec<Pose> = (0..10).map(|k| Pose::identity(k as f64 * 0.1)).collect();
        let aligned = AlignedPair {
            timestamps: poses.iter().map(|p| p.timestamp).collect(),
            poses_a: poses.clone(),
            poses_b: poses,
        };
        let ext = extract_motions(&aligned, 0.5f64.to_radians(), 0.02);
        assert!(ext.pairs.is_empty());
        assert_eq!(ext.rejected_small_angle, 9);
    }

    #[test]
    fn congruence_fault_is_counted() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let x = random_pose(&mut rng, 0.0);
        let mut pa = vec![Pose::identity(0.0)];
        for k in 1..10 {
            let m = varied_motion(&mut rng);
            let mut next = pa[k - 1].compose(&m);
            next.timestamp = k as f64 * 0.1;
            pa.push(next);
        }
        let mut pb: Vec<Pose> = pa
            .iter()
            .map(|p| {
                let mut q = x.inverse().compose(p).compose(&x);
                q.timestamp = p.timestamp;
                q
            })
            .collect();
        // corrupt one rear pose with a large rotation so two intervals break
        pb[4].rotation = Quaternion::from_axis_angle(&Vector3::x(), 1.0).mul(&pb[4].rotation);
        let aligned = AlignedPair {
            timestamps: pa.iter().map(|p| p.timestamp).collect(),
            poses_a: pa,
            poses_b: pb,
        };
        let ext = extract_motions(&aligned, 0.5f64.to_radians(), 0.02);
        assert!(ext.rejected_congruence >= 1);
    }

    #[test]
    fn express_in_base_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let ext = random_pose(&mut rng, 0.0);
        let mount = random_pose(&mut rng, 0.0);
        assert_eq!(express_in_base(&ext, &Pose::identity(0.0)), ext);
        let out = express_in_base(&Pose::identity(0.0), &mount);
        assert!((out.translation - mount.translation).norm() < 1e-12);
        let full = express_in_base(&ext, &mount);
        let expect = mount.compose(&ext);
        assert!((full.translation - expect.translation).norm() < 1e-12);
        assert!((full.rotation.dot(&expect.rotation).abs() - 1.0).abs() < 1e-12);
    }
}
