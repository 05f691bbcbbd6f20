mod common;

use common::*;
use zakharov_core::diagnostics::scattering_residual;
use zakharov_core::solver::*;
use zakharov_core::{Error, Field32, Grid32};

#[test]
fn scattering_residual_vanishes_at_the_final_time() {
    let g = picard_grid();
    let (u, v) = picard_data(&g, 1e-2);
    let opts = picard_options();
    let (st, _) = picard_solve(&u, &v, &opts).unwrap();
    let s = scattering_residual(&st.full(), &u, &v, opts.duhamel.alpha, 0.45).unwrap();
    let last = s.times.len() - 1;
    assert!(s.u_residual[last] < 1e-14 && s.v_residual[last] < 1e-14);
    assert!(s.u_residual[0] > 0.0);
    // the residual is the nonlinear part, which accumulates backward from T_max
    for w in s.u_residual.windows(2) {
        assert!(w[1] <= 1.05 * w[0], "{:?}", s.u_residual);
    }
    assert!(s.v_residual[0] > s.v_residual[last / 2]);
}

#[test]
fn large_data_is_reported_as_non_contraction() {
    let g = picard_grid();
    let (u, v) = picard_data(&g, 30.0);
    let opts = picard_options();
    let (_, rep) = picard_run(&u, &v, &opts, None).unwrap();
    assert_eq!(rep.status, PicardStatus::NonContraction);
    assert!(rep.ratios.iter().rev().take(opts.stall_limit).all(|r| *r >= 1.0));
    assert!(matches!(picard_solve(&u, &v, &opts), Err(Error::NonContraction(_))));
}

#[test]
fn faster_wave_speed_converges_without_the_normal_form() {
    let g = picard_grid();
    let (u, v) = picard_data(&g, 1e-2);
    let opts = PicardOptions::new(2.0, 2.0, 6.0, 0.1);
    let (_, rep) = picard_solve(&u, &v, &opts).unwrap();
    assert_eq!(rep.status, PicardStatus::Converged);
    assert!(!rep.normal_form_active);
    assert!(rep.contraction_ratio < 0.5 && rep.iterations <= 12);
}

#[test]
fn single_precision_forward_run_keeps_mass() {
    let g = Grid32::new(16.0, 16).unwrap();
    let u = Field32::from_fn(&g, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        num_complex::Complex::new((-r2 / 8.0).exp(), 0.0)
    });
    let v = u.abs_sq().scale_re(-0.5);
    let mut o = ForwardOptions::new(1.0, 0.01);
    o.save_every = 50;
    let tr = evolve_forward(&u, &v, 0.0, 0.5, &o).unwrap();
    let m0 = mass(&u);
    let m1 = mass(tr.u(tr.len() - 1));
    assert!((m1 - m0).abs() / m0 < 1e-5, "{m0} -> {m1}");
}
