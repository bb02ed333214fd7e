//! Acceptance suite: one line per criterion, exit status 1 if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ndarray::Array5;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trt_core::backprojection::trt_adjoint;
use trt_core::geometry::{AxisFrame, CoordAxis, SymTensor3, SymTensorField3, VoxelGrid3};
use trt_core::metrics::{compare_fields, compare_vector_fields};
use trt_core::phantoms::{
    default_null1_generator, default_null2_generator, one_axis_null_field, sharp_phantom, smooth_bumps,
    smooth_phantom, two_axis_null_field, GaussianBump, GaussianDisplacement,
};
use trt_core::projector::{
    adjugate_slab, angle, eta_cross_f_eta_slab, forward_trt_ray, lrt_plane_tensor, lrt_plane_vector,
    simulate_acquisition, AcquisitionConfig, TrtDataSet, J1, J2,
};
use trt_core::reconstruct::solvers::{diagonals_at, offdiagonals_at};
use trt_core::reconstruct::{
    alternative_diagonals, consistency_residual, recover_diagonals_alternative, recover_diagonals_fbp,
    reconstruct_three_axis, reconstruct_two_axis_potential, solve_offdiagonals, LambdaTriple, MuTriple, PlaneFill,
    ReconstructionOptions,
};
use trt_core::spectral::{hamming_window, SpectralField};

const ADJOINT_TOL: f64 = 1e-6;
const ADJOINT_PAIRS: usize = 20;
const ADJOINT_BUDGET: Duration = Duration::from_secs(30);
const SOLVER_TOL: f64 = 1e-10;
const SOLVER_FREQUENCIES: usize = 10_000;
const SOLVER_BUDGET: Duration = Duration::from_secs(5);
const LEMMA_FIELDS: usize = 10;
const CENTRE_RAY_TOL: f64 = 0.02;
const SMOOTH_TOL: f64 = 0.10;
const SMOOTH_BUDGET: Duration = Duration::from_secs(15 * 60);
const NOISY_TOL: f64 = 0.20;
const POTENTIAL_TOL: f64 = 0.10;
const NULL_LEAK: f64 = 1e-3;
const NULL_VISIBLE: f64 = 0.1;
const CONSISTENCY_TOL: f64 = 0.15;
const BROKEN_CONSISTENCY: f64 = 0.5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn grid(n: usize) -> VoxelGrid3 {
    VoxelGrid3::new(n, 1.0).unwrap()
}

fn pct(v: f64) -> String {
    format!("{:.2}%", 100.0 * v)
}

fn random_field(grid: VoxelGrid3, rng: &mut ChaCha8Rng) -> SymTensorField3 {
    let mut f = SymTensorField3::zeros(grid);
    f.data.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
    f
}

/// Frobenius pairing of symmetric fields, off-diagonals counted twice.
fn frobenius(a: &SymTensorField3, b: &SymTensorField3) -> f64 {
    let w = [1.0, 2.0, 2.0, 1.0, 2.0, 1.0];
    a.as_slice()
        .chunks(6)
        .zip(b.as_slice().chunks(6))
        .map(|(x, y)| (0..6).map(|c| w[c] * x[c] * y[c]).sum::<f64>())
        .sum()
}

fn c1_adjoint() -> Outcome {
    let start = Instant::now();
    let g = grid(16);
    let cfg = AcquisitionConfig::for_grid(16, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..ADJOINT_PAIRS {
        let f = random_field(g, &mut rng);
        let af = simulate_acquisition(&f, &cfg).unwrap();
        let d = TrtDataSet {
            data: Array5::from_shape_fn(af.data.dim(), |_| rng.gen_range(-1.0..1.0)),
            ..af.clone()
        };
        // data measure: pitch x row spacing / angles; field measure: voxel volume
        let h = g.voxel_size();
        let lhs = af.data.iter().zip(d.data.iter()).map(|(a, b)| a * b).sum::<f64>() * h * h / cfg.n_angles as f64;
        let rhs = frobenius(&f, &trt_adjoint(&d, g).unwrap()) * h.powi(3);
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()));
    }
    let t = start.elapsed();
    outcome(
        worst < ADJOINT_TOL && t < ADJOINT_BUDGET,
        format!("worst relative mismatch {worst:.2e} < {ADJOINT_TOL:e}, {:.1} s", t.as_secs_f64()),
    )
}

/// Gaussian elimination with partial pivoting, real matrix and complex right-hand side.
fn dense_solve(mut a: [[f64; 3]; 3], mut b: [Complex64; 3]) -> [Complex64; 3] {
    for col in 0..3 {
        let p = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..3 {
            let m = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= m * a[col][k];
            }
            b[row] = b[row] - b[col] * m;
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= x[k] * a[row][k];
        }
        x[row] = s / a[row][row];
    }
    x
}

fn oracle_offdiagonals(y: [f64; 3], l: [Complex64; 3]) -> [Complex64; 3] {
    let [y1, y2, y3] = y;
    dense_solve([[y2, y3, 0.0], [y1, 0.0, y3], [0.0, y1, y2]], l)
}

fn oracle_diagonals(y: [f64; 3], l: [Complex64; 3], m: [Complex64; 3]) -> [Complex64; 3] {
    let [y1, y2, y3] = y;
    let off = oracle_offdiagonals(y, l);
    let rhs = [
        m[0] - off[2] * (2.0 * y2 * y3),
        m[1] - off[1] * (2.0 * y1 * y3),
        m[2] - off[0] * (2.0 * y1 * y2),
    ];
    let s = y.map(|v| v * v);
    dense_solve([[0.0, s[1], s[2]], [s[0], 0.0, s[2]], [s[0], s[1], 0.0]], rhs)
}

fn vec_rel(a: [Complex64; 3], b: [Complex64; 3]) -> f64 {
    let num: f64 = (0..3).map(|i| (a[i] - b[i]).norm_sqr()).sum();
    let den: f64 = b.iter().map(|v| v.norm_sqr()).sum();
    (num / den).sqrt()
}

fn c2_solvers() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let c = |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut worst = 0.0f64;

    for _ in 0..SOLVER_FREQUENCIES {
        let y: [f64; 3] = std::array::from_fn(|_| {
            let v: f64 = rng.gen_range(0.01..10.0);
            if rng.gen_bool(0.5) { v } else { -v }
        });
        let l = [c(&mut rng), c(&mut rng), c(&mut rng)];
        let m = [c(&mut rng), c(&mut rng), c(&mut rng)];
        worst = worst.max(vec_rel(offdiagonals_at(y, l), oracle_offdiagonals(y, l)));
        worst = worst.max(vec_rel(diagonals_at(y, l, m), oracle_diagonals(y, l, m)));
    }

    // field level: every nonsingular bin of a 23³ lattice (22³ = 10648 bins)
    let g = grid(23);
    let random_spec = |rng: &mut ChaCha8Rng| {
        let mut s = SpectralField::zeros(g);
        s.data.mapv_inplace(|_| c(rng));
        s
    };
    let lt = LambdaTriple { lambda: std::array::from_fn(|_| random_spec(&mut rng)) };
    let mt = MuTriple { mu: std::array::from_fn(|_| random_spec(&mut rng)) };
    let off = solve_offdiagonals(&lt, PlaneFill::Interpolate).unwrap();
    let diag = recover_diagonals_alternative(&lt, &mt, PlaneFill::Interpolate, 0.0).unwrap();
    let mut bins = 0;
    for ((k3, k2, k1), _) in off[0].data.indexed_iter() {
        if k1 == 0 || k2 == 0 || k3 == 0 {
            continue;
        }
        bins += 1;
        let idx = [k3, k2, k1];
        let y = off[0].frequency([k1, k2, k3]);
        let l = lt.lambda.each_ref().map(|s| s.data[idx]);
        let m = mt.mu.each_ref().map(|s| s.data[idx]);
        worst = worst.max(vec_rel(off.each_ref().map(|s| s.data[idx]), oracle_offdiagonals(y, l)));
        worst = worst.max(vec_rel(diag.each_ref().map(|s| s.data[idx]), oracle_diagonals(y, l, m)));
    }
    let t = start.elapsed();
    outcome(
        worst < SOLVER_TOL && t < SOLVER_BUDGET && bins >= SOLVER_FREQUENCIES,
        format!(
            "worst relative deviation {worst:.2e} < {SOLVER_TOL:e} over {SOLVER_FREQUENCIES} random + {bins} lattice frequencies, {:.2} s",
            t.as_secs_f64()
        ),
    )
}

fn c3_planar_identity() -> Outcome {
    let g = grid(16);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut rays, mut mismatches) = (0usize, 0usize);
    for _ in 0..LEMMA_FIELDS {
        let f = random_field(g, &mut rng);
        for axis in CoordAxis::ALL {
            for s_index in [0, 5, 8, 15] {
                let v = eta_cross_f_eta_slab(&f, axis, s_index).unwrap();
                let t = adjugate_slab(&f, axis, s_index).unwrap();
                for j in 0..7 {
                    let frame = AxisFrame::new(axis, angle(j, 7) + 0.1);
                    for c in 0..21 {
                        let ray = frame.ray(g.center(s_index), (c as f64 - 10.0) * g.voxel_size());
                        let m = forward_trt_ray(&f, &frame, &ray).unwrap();
                        rays += 1;
                        if m[J1] != lrt_plane_vector(&v, &ray).unwrap() || m[J2] != lrt_plane_tensor(&t, &ray).unwrap() {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(mismatches == 0, format!("{mismatches} of {rays} rays differ bitwise"))
}

fn c4_centre_rays() -> Outcome {
    let g = grid(64);
    let exact = (std::f64::consts::PI / GaussianBump::RATE).sqrt();
    let bumps = smooth_bumps();
    let mut worst = 0.0f64;
    let mut checks = 0;
    for (c, list) in bumps.iter().enumerate() {
        let (i, j) = trt_core::geometry::COMPONENTS[c];
        for bump in list {
            let single = *bump;
            let f = SymTensorField3::from_fn(g, |x| {
                let mut t = SymTensor3::zero();
                t.set(i, j, single.eval(x));
                t
            });
            for axis in CoordAxis::ALL {
                for theta in [0.0, 0.3, 1.1, 2.0] {
                    let frame = AxisFrame::new(axis, theta);
                    let (eta, zeta) = (frame.eta(), frame.zeta());
                    let dot = |u: [f64; 3], v: [f64; 3]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
                    let ray = frame.ray(dot(bump.center, eta), dot(bump.center, zeta));
                    let m = forward_trt_ray(&f, &frame, &ray).unwrap();
                    let pair = |u: [f64; 3], v: [f64; 3]| {
                        if i == j { u[i] * v[i] } else { u[i] * v[j] + u[j] * v[i] }
                    };
                    let expected = [pair(eta, eta), pair(zeta, eta), pair(zeta, zeta)].map(|w| bump.alpha * w * exact);
                    for k in 0..3 {
                        if expected[k].abs() > 0.5 * exact {
                            checks += 1;
                            worst = worst.max((m[k] - expected[k]).abs() / expected[k].abs());
                        }
                    }
                }
            }
        }
    }
    outcome(
        worst < CENTRE_RAY_TOL && checks > 0,
        format!("worst relative deviation from sqrt(pi/50) {} < {} over {checks} rays", pct(worst), pct(CENTRE_RAY_TOL)),
    )
}

fn reconstruct_worst(f: &SymTensorField3, n_angles: usize) -> (f64, String, Duration) {
    let start = Instant::now();
    let n = f.grid.n();
    let data = simulate_acquisition(f, &AcquisitionConfig::for_grid(n, n_angles)).unwrap();
    let (r, _) = reconstruct_three_axis(&data, &ReconstructionOptions::default()).unwrap();
    let t = start.elapsed();
    let cmp = compare_fields(&r, f).unwrap();
    let list = cmp.components.iter().map(|c| format!("{} {}", c.component, pct(c.band_limited_relative_l2)));
    (cmp.worst_band_limited(), list.collect::<Vec<_>>().join(", "), t)
}

fn c5_c7_smooth_and_sharp() -> (Outcome, Outcome) {
    let g = grid(64);
    let (smooth, detail, t) = reconstruct_worst(&smooth_phantom(g), 120);
    let c5 = outcome(
        smooth < SMOOTH_TOL && t < SMOOTH_BUDGET,
        format!("band-limited errors {detail}; worst {} < {}, {:.1} s", pct(smooth), pct(SMOOTH_TOL), t.as_secs_f64()),
    );
    let (sharp, _, _) = reconstruct_worst(&sharp_phantom(g), 120);
    let c7 = outcome(sharp > smooth, format!("sharp worst {} > smooth worst {}", pct(sharp), pct(smooth)));
    (c5, c7)
}

fn c6_noise() -> Outcome {
    let fine = grid(96);
    let cfg = AcquisitionConfig {
        noise_pct: 0.01,
        seed: 6,
        ..AcquisitionConfig::for_grid(96, 120).with_binning(96, 3)
    };
    let data = simulate_acquisition(&smooth_phantom(fine), &cfg).unwrap();
    let (r, _) = reconstruct_three_axis(&data, &ReconstructionOptions::default()).unwrap();
    let cmp = compare_fields(&r, &smooth_phantom(r.grid)).unwrap();
    let list: Vec<String> =
        cmp.components.iter().map(|c| format!("{} {}", c.component, pct(c.band_limited_relative_l2))).collect();
    outcome(
        cmp.worst_band_limited() < NOISY_TOL,
        format!("{}³ band-limited errors {}; worst {} < {}", r.grid.n(), list.join(", "), pct(cmp.worst_band_limited()), pct(NOISY_TOL)),
    )
}

fn c8_two_axis() -> Outcome {
    let g = grid(64);
    let disp = GaussianDisplacement::standard();
    let truth = disp.field(g);
    let cfg = AcquisitionConfig {
        axes: vec![CoordAxis::E1, CoordAxis::E2],
        ..AcquisitionConfig::for_grid(64, 120)
    };
    let data = simulate_acquisition(&truth, &cfg).unwrap();
    let r = reconstruct_two_axis_potential(&data, &ReconstructionOptions::default()).unwrap();
    let cu = compare_vector_fields(&r.u, &disp.sample(g)).unwrap();
    let cf = compare_fields(&r.f, &truth).unwrap();
    let worst = cu.worst_band_limited().max(cf.worst_band_limited());
    let list: Vec<String> = cu
        .components
        .iter()
        .chain(&cf.components)
        .map(|c| format!("{} {}", c.component, pct(c.band_limited_relative_l2)))
        .collect();
    outcome(worst < POTENTIAL_TOL, format!("band-limited errors {}; worst {} < {}", list.join(", "), pct(worst), pct(POTENTIAL_TOL)))
}

fn axis_max(data: &TrtDataSet, axis: CoordAxis) -> f64 {
    let slot = data.axis_slot(axis).unwrap();
    data.data.index_axis(ndarray::Axis(0), slot).iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn c9_null_space() -> Outcome {
    let g = grid(64);
    let cfg = AcquisitionConfig::for_grid(64, 36);
    let reference = simulate_acquisition(&smooth_phantom(g), &cfg).unwrap().max_abs();
    let n1 = simulate_acquisition(&one_axis_null_field(g, &default_null1_generator()).unwrap(), &cfg).unwrap();
    let n2 = simulate_acquisition(&two_axis_null_field(g, &default_null2_generator()).unwrap(), &cfg).unwrap();
    let one = axis_max(&n1, CoordAxis::E1) / reference;
    let two = axis_max(&n2, CoordAxis::E1).max(axis_max(&n2, CoordAxis::E2)) / reference;
    let third = axis_max(&n2, CoordAxis::E3) / reference;
    outcome(
        one <= NULL_LEAK && two <= NULL_LEAK && third >= NULL_VISIBLE,
        format!(
            "one-axis e1 {one:.2e}, two-axis e1/e2 {two:.2e} (<= {NULL_LEAK:e}), two-axis e3 {third:.3} (>= {NULL_VISIBLE})"
        ),
    )
}

fn c10_consistency() -> Outcome {
    let g = grid(64);
    let mut data = simulate_acquisition(&smooth_phantom(g), &AcquisitionConfig::for_grid(64, 120)).unwrap();
    let opts = ReconstructionOptions::default();
    let fbp = recover_diagonals_fbp(&data).unwrap();
    let agree = consistency_residual(&fbp, &alternative_diagonals(&data, &opts).unwrap()).unwrap().aggregate;
    let slot = data.axis_slot(CoordAxis::E2).unwrap();
    data.data
        .index_axis_mut(ndarray::Axis(0), slot)
        .index_axis_mut(ndarray::Axis(3), J2)
        .fill(0.0);
    let fbp = recover_diagonals_fbp(&data).unwrap();
    let broken = consistency_residual(&fbp, &alternative_diagonals(&data, &opts).unwrap()).unwrap().aggregate;
    outcome(
        agree < CONSISTENCY_TOL && broken > BROKEN_CONSISTENCY,
        format!("residual {agree:.3} < {CONSISTENCY_TOL}; with e2 J² zeroed {broken:.3} > {BROKEN_CONSISTENCY}"),
    )
}

fn c11_hamming() -> Outcome {
    let bad: Vec<usize> = (3..=4097)
        .step_by(2)
        .filter(|&n| hamming_window(0, n) != 0.08 || hamming_window((n - 1) / 2, n) != 1.0)
        .collect();
    outcome(bad.is_empty(), format!("w(0) = 0.08 and w((N-1)/2) = 1 exactly for odd N in 3..=4097; {} failures", bad.len()))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        outcome(false, format!("panicked: {msg}"))
    })
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |id: u32, name: &'static str, o: Outcome| {
        println!("[{}] {id:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((id, name, o));
    };
    report(1, "adjoint identity", guarded(c1_adjoint));
    report(2, "per-frequency solvers", guarded(c2_solvers));
    report(3, "planar transform identity", guarded(c3_planar_identity));
    report(4, "centre-ray integrals", guarded(c4_centre_rays));
    let (c5, c7) = catch_unwind(c5_c7_smooth_and_sharp).unwrap_or_else(|_| {
        (outcome(false, "panicked".into()), outcome(false, "panicked".into()))
    });
    report(5, "smooth phantom, three axes", c5);
    report(6, "noise and binning", guarded(c6_noise));
    report(7, "sharp phantom is worse", c7);
    report(8, "two-axis potential", guarded(c8_two_axis));
    report(9, "null spaces", guarded(c9_null_space));
    report(10, "diagonal consistency", guarded(c10_consistency));
    report(11, "Hamming point values", guarded(c11_hamming));

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("{} of {} criteria pass", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failing: {failed:?}");
        std::process::exit(1);
    }
}
