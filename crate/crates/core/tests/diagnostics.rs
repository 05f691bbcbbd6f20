mod common;

use common::*;
use zakharov_core::diagnostics::*;
use zakharov_core::randomize::*;
use zakharov_core::solver::{linear_trajectory, picard_solve};
use zakharov_core::{Field, Grid};

fn random_coefficients(n: usize, seed: u64) -> Vec<f64> {
    let m = RandomModel::gaussian(1.0, seed).unwrap();
    (0..n as u64).map(|i| m.sample(StreamTag::Aux, 0, &[i as i64])).collect()
}

#[test]
fn beta_growth_is_square_root_for_both_families() {
    let c = random_coefficients(24, 40);
    for model in [RandomModel::gaussian(1.0, 1).unwrap(), RandomModel::bounded(1.0, 2).unwrap()] {
        let r = large_deviation_mc(&c, &model, &BETAS, 20_000).unwrap();
        assert!(r.fit.slope <= 0.55, "{:?}: slope {}", model.family, r.fit.slope);
        assert!(r.is_consistent());
    }
}

#[test]
fn monte_carlo_error_halves_with_four_times_the_samples() {
    let c = random_coefficients(8, 41);
    let model = RandomModel::bounded(1.0, 3).unwrap();
    let s = coefficient_sums(&c, &model, 40_000);
    let sq: Vec<f64> = s.iter().map(|x| x * x).collect();
    let (_, a) = mean_se(&sq[..10_000]);
    let (_, b) = mean_se(&sq);
    assert!((1.8..=2.2).contains(&(a / b)), "ratio {}", a / b);
}

#[test]
fn tail_rate_is_stable_across_coefficient_choices() {
    let model = RandomModel::bounded(1.0, 4).unwrap();
    let lambdas: Vec<f64> = (0..9).map(|i| 1.0 + 0.25 * i as f64).collect();
    let rates: Vec<f64> = [random_coefficients(16, 5), random_coefficients(64, 6)]
        .iter()
        .map(|c| {
            let a = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            let s = coefficient_sums(c, &model, 200_000);
            let r = tail_probability_mc(&s, a, &lambdas, Criterion::AtLeast { bound: 0.0 }).unwrap();
            assert!(r.pass);
            r.value
        })
        .collect();
    assert!(rates[0] / rates[1] < 2.0 && rates[1] / rates[0] < 2.0, "{rates:?}");
}

#[test]
fn mismatch_spatial_ignores_near_pairs() {
    let g = Grid::new(48.0, 64).unwrap();
    let pou = PartitionOfUnity::new(&g).unwrap();
    let f = Field::plane_wave(&g, [8, 0, 0], Cx::new(1.0, 0.0));
    let case = MismatchCase::Spatial { block: Some(-1), l_prime: [-6, 0, 0], direction: [1, 0, 0], separations: (2..=12).collect() };
    let r = mismatch_decay(&f, &pou, 2.0, 1.0, &case).unwrap();
    let fitted: Vec<f64> = r.x.iter().zip(&r.in_fit).filter(|p| *p.1).map(|p| p.0.powi(2) - 1.0).collect();
    assert_eq!(fitted.first().map(|d| d.sqrt().round()), Some(8.0));
    assert_eq!(fitted.len(), 5);
    assert!(r.y.iter().all(|y| y.is_finite() && *y >= 0.0));
}

#[test]
fn physical_randomization_mean_square_matches_partition_oracle() {
    // E ||sum X_k psi_k u||^2 = int sum_k psi_k^2 |u|^2 for unit-variance signs
    let g = Grid::new(8.0, 24).unwrap();
    let pou = PartitionOfUnity::new(&g).unwrap();
    let u = gaussian(&g, [0.3, 0.0, -0.2], 1.0);
    let mut sq = vec![0.0; g.len()];
    for k in pou.translates() {
        for (s, p) in sq.iter_mut().zip(pou.psi(k)) {
            *s += p * p;
        }
    }
    let vals = u.values();
    let dv = g.dx().powi(3);
    let oracle: f64 = vals.iter().zip(&sq).map(|(z, s)| s * z.norm_sqr() * dv).sum();
    let model = RandomModel::bounded(1.0, 8).unwrap();
    let draws: Vec<f64> =
        (0..200).map(|d| randomize_physical(&u, &pou, &model, d).unwrap().norm_l2().powi(2)).collect();
    let (m, se) = mean_se(&draws);
    assert!((m - oracle).abs() < 3.0 * se, "{m} vs {oracle} (se {se})");
    // overlapping bumps make the randomized mass a small fraction of the input's
    assert!(oracle < 0.25 * u.norm_l2().powi(2));
}

#[test]
fn dispersive_reports_are_reproducible() {
    let g = Grid::new(16.0, 24).unwrap();
    let pou = PartitionOfUnity::new(&g).unwrap();
    let u = gaussian(&g, [0.0; 3], 1.0);
    let model = RandomModel::bounded(1.0, 9).unwrap();
    let mut cfg = DispersiveConfig::new(2.0, 6.0, 0.0, 2);
    cfg.intervals = 2;
    let a = dispersive_decay_mc(&u, &pou, Some(&model), &cfg).unwrap();
    let b = dispersive_decay_mc(&u, &pou, Some(&model), &cfg).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    assert_eq!(a.summary["predicted_exponent"], -0.5);
    assert!(a.y.iter().all(|y| *y > 0.0));
    assert!(dispersive_decay_mc(&u, &pou, Some(&model), &DispersiveConfig::new(2.0, 2.0, 0.0, 2)).is_err());
}

#[test]
fn wave_refuses_inadmissible_pair() {
    let g = Grid::new(16.0, 32).unwrap();
    let v = gaussian(&g, [0.0; 3], 1.5);
    let frame = build_good_frame(&FrameOptions::with_degree(2), 1).unwrap();
    let model = RandomModel::bounded(1.0, 1).unwrap();
    let cfg = WaveConfig::new(2.0, 4.0, 2.0, 4);
    assert!(!cfg.admissible());
    assert!(matches!(wave_aniso_mc(&v, &frame, &model, &cfg), Err(zakharov_core::Error::InvalidParameter(_))));
}

#[test]
fn radial_wave_data_only_sees_block_signs() {
    // degree-0 frames: each block is multiplied by one sign, so the norm is
    // a function of the sign pattern
    let g = Grid::new(16.0, 32).unwrap();
    let v = gaussian(&g, [0.0; 3], 1.5);
    let frame = build_good_frame(&FrameOptions::with_degree(0), 1).unwrap();
    let model = RandomModel::bounded(1.0, 2).unwrap();
    let mut cfg = WaveConfig::new(4.0, 4.0, 2.0, 24);
    cfg.n_times = 2;
    let rz = AngularRandomizer::new(&v, &frame, &cfg.angular).unwrap();
    assert!(rz.report.degenerate_radial);
    let blocks = rz.report.blocks.len();
    let z = wave_norm_samples(&v, &frame, &model, &cfg).unwrap();
    let mut distinct: Vec<f64> = Vec::new();
    for x in z {
        if !distinct.iter().any(|d| (d - x).abs() < 1e-9 * x) {
            distinct.push(x);
        }
    }
    assert!(distinct.len() <= 1 << blocks, "{} values from {blocks} blocks", distinct.len());
    assert!(distinct.len() < 24);
}

#[test]
fn sobolev_ratios_separate_the_flows_and_are_resolution_stable() {
    let run = |n: usize, flow: Flow| {
        let g = Grid::new(8.0, n).unwrap();
        let bump = gaussian(&g, [0.0; 3], 0.4);
        let u0 = flow.propagate(&bump, -2.0).unwrap();
        let mut cfg = SobolevConfig::new(2.0, 6.0, 0.0, 1.0, 3.0);
        cfg.ks = Some((-1..=2).collect());
        sobolev_embedding_check(&u0, flow, &cfg).unwrap()
    };
    let s = run(32, Flow::Schrodinger);
    let w = run(32, Flow::HalfWave { alpha: 1.0 });
    assert!(s.pass && w.pass);
    assert!(s.fit.slope > w.fit.slope + 0.1, "{} vs {}", s.fit.slope, w.fit.slope);
    let fine = run(64, Flow::Schrodinger);
    let rel = (fine.summary["constant"] / s.summary["constant"] - 1.0).abs();
    assert!(rel < 0.2, "constant moved by {rel}");
}

#[test]
fn scattering_residual_of_free_flow_vanishes() {
    let g = picard_grid();
    let (u, v) = picard_data(&g, 0.1);
    let lin = linear_trajectory(&u, &v, 0.5, 2.0, 4.0, 0.5).unwrap();
    let s = scattering_residual(&lin, &u, &v, 0.5, 0.45).unwrap();
    assert!(s.sup_u_weighted < 1e-12 && s.sup_v_weighted < 1e-12);
}

#[test]
fn scattering_residual_of_converged_run() {
    let g = picard_grid();
    let (u, v) = picard_data(&g, 1e-2);
    let opts = picard_options();
    let (st, rep) = picard_solve(&u, &v, &opts).unwrap();
    let sigma = 0.5 - opts.nu;
    let s = scattering_residual(&st.full(), &u, &v, opts.duhamel.alpha, sigma).unwrap();
    let (first, last) = (s.u_residual[0], *s.u_residual.last().unwrap());
    assert!(last <= first * (opts.t / opts.t_max).powf(sigma) / 2.0, "{first} -> {last}");
    let spec = opts.norm_spec().unwrap();
    let x = zakharov_core::dyadic::xt_norm(&st.nonlinear, &spec).unwrap();
    let y = zakharov_core::dyadic::yt_norm(&st.nonlinear, &spec).unwrap();
    assert!(s.sup_u_weighted <= x.energy * (1.0 + 1e-12) && s.sup_v_weighted <= y * (1.0 + 1e-12));
    assert!(rep.residual < 1e-8);
    let mut buf = Vec::new();
    s.write_csv(&mut buf).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("t,u_residual,v_residual,u_weighted,v_weighted\n"));
}
