use cnstn::diagnostics::mass_momentum;
use cnstn::noise::{make_constant_q, smooth_driver, DriverComponent, DriverPath, DriverTerm, QField};
use cnstn::solver::*;
use cnstn::spectral::{inner, norm_l2, ScalarField, TorusGrid, VectorField};
use proptest::prelude::*;
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

fn driver(k: usize, amp: f64, t_end: f64, steps: usize) -> DriverPath {
    let comps: Vec<DriverComponent> = (0..k)
        .map(|i| DriverComponent {
            linear: 0.1 * amp,
            terms: vec![DriverTerm { amp, freq: 4.0 + i as f64, phase: 0.2 * i as f64 }],
        })
        .collect();
    smooth_driver(&comps, t_end, steps)
}

fn initial() -> InitialData {
    InitialData {
        rho_mean: 1.0,
        rho_modes: vec![
            DensityMode { k: vec![1, 0], cos: 0.2, sin: 0.0 },
            DensityMode { k: vec![1, -2], cos: 0.0, sin: 0.1 },
        ],
        u_modes: vec![
            VelocityMode { component: 0, k: vec![0, 1], cos: 0.0, sin: 0.5 },
            VelocityMode { component: 1, k: vec![2, 1], cos: 0.3, sin: 0.0 },
        ],
    }
}

fn setup(m: usize, n: usize, dt: f64, t_end: f64, q: QField, amp: f64) -> RunSetup {
    let grid = TorusGrid::new(2, m, n).unwrap();
    let params = SchemeParams { dt, t_end, ..SchemeParams::default() };
    let steps = params.steps();
    RunSetup { grid, params, driver: driver(q.len(), amp, t_end, steps), q, initial: initial(), stride: 1 }
}

fn scheme(grid: TorusGrid, params: SchemeParams, q: QField) -> Scheme {
    Scheme::new(grid, params, 1e-8, q).unwrap()
}

fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    a.values().iter().zip(b.values()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn stress_of_solenoidal_mode_is_shear_laplacian() {
    let grid = TorusGrid::new(2, 4, 16).unwrap();
    let params = SchemeParams { mu: 0.3, eta: 0.7, ..SchemeParams::default() };
    let u = VectorField::from_fn(grid, |x| [x[1].sin(), 0.0, 0.0]);
    let s = stress_divergence(&u, &params);
    let expect = ScalarField::from_fn(grid, |x| -0.3 * x[1].sin());
    assert!(max_diff(s.component(0), &expect) < 1e-13);
    assert!(s.component(1).max_abs() < 1e-13);
}

#[test]
fn stress_of_gradient_mode_uses_longitudinal_viscosity() {
    let grid = TorusGrid::new(2, 4, 16).unwrap();
    let params = SchemeParams { mu: 0.3, eta: 0.7, ..SchemeParams::default() };
    let u = VectorField::from_fn(grid, |x| [x[0].cos(), 0.0, 0.0]);
    let s = stress_divergence(&u, &params);
    let expect = ScalarField::from_fn(grid, |x| -(2.0 * 0.3 + 0.7) * x[0].cos());
    assert!(max_diff(s.component(0), &expect) < 1e-13);
}

#[test]
fn continuity_rhs_examples() {
    let grid = TorusGrid::new(2, 4, 16).unwrap();
    let q = make_constant_q(2, &[vec![0.4, -0.3]]).unwrap();
    let params = SchemeParams { epsilon: 0.2, ..SchemeParams::default() };
    let sch = scheme(grid, params, q);
    let uniform = GalerkinState::new(0.0, ScalarField::constant(grid, 1.3), &VectorField::zeros(grid));
    assert!(rhs_continuity(&sch, &uniform, &[2.0]).unwrap().max_abs() < 1e-14);

    let rho = ScalarField::from_fn(grid, |x| 1.0 + 0.3 * (x[0] + x[1]).cos());
    let state = GalerkinState::new(0.0, rho, &VectorField::zeros(grid));
    let r = rhs_continuity(&sch, &state, &[0.0]).unwrap();
    let expect = ScalarField::from_fn(grid, |x| -0.2 * 2.0 * 0.3 * (x[0] + x[1]).cos());
    assert!(max_diff(&r, &expect) < 1e-13);
}

#[test]
fn uniform_state_has_zero_momentum_rhs() {
    let grid = TorusGrid::new(2, 4, 16).unwrap();
    let q = make_constant_q(2, &[vec![0.4, -0.3]]).unwrap();
    let sch = scheme(grid, SchemeParams { delta: 0.1, ..SchemeParams::default() }, q);
    let state = GalerkinState::new(0.0, ScalarField::constant(grid, 2.0), &VectorField::zeros(grid));
    let r = rhs_momentum(&sch, &state, &[1.5]).unwrap();
    assert!(r.max_abs() < 1e-14);
}

/// Closed-form value, gradient and Hessian of `c + a cos(k·x) + b sin(k·x)`.
#[derive(Clone, Copy)]
struct Wave {
    c: f64,
    a: f64,
    b: f64,
    k: [f64; 2],
}

impl Wave {
    fn jet(&self, x: [f64; 3]) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let ph = self.k[0] * x[0] + self.k[1] * x[1];
        let (s, c) = ph.sin_cos();
        let v = self.c + self.a * c + self.b * s;
        let d = -self.a * s + self.b * c;
        let dd = -self.a * c - self.b * s;
        let g = [d * self.k[0], d * self.k[1]];
        let h = [
            [dd * self.k[0] * self.k[0], dd * self.k[0] * self.k[1]],
            [dd * self.k[1] * self.k[0], dd * self.k[1] * self.k[1]],
        ];
        (v, g, h)
    }
}

/// Fourier coefficient of mode `k` by a direct (non-FFT) sum on an `n × n` grid.
fn direct_coeff(f: &dyn Fn([f64; 3]) -> f64, k: [i64; 3], n: usize) -> Complex64 {
    let h = 2.0 * PI / n as f64;
    let mut acc = Complex64::default();
    for i in 0..n {
        for j in 0..n {
            let x = [i as f64 * h, j as f64 * h, 0.0];
            let ph = -(k[0] as f64 * x[0] + k[1] as f64 * x[1]);
            acc += Complex64::new(ph.cos(), ph.sin()) * f(x);
        }
    }
    acc / (n * n) as f64
}

#[test]
fn momentum_rhs_matches_term_by_term_quadrature() {
    let grid = TorusGrid::new(2, 4, 18).unwrap();
    let params = SchemeParams { mu: 0.2, eta: 0.15, epsilon: 0.05, delta: 0.1, beta: 5.0, ..SchemeParams::default() };
    let qv = [0.3, -0.2];
    let slope = 0.7;
    let sch = scheme(grid, params, make_constant_q(2, &[qv.to_vec()]).unwrap());
    let rho_w = Wave { c: 1.0, a: 0.3, b: 0.0, k: [1.0, 0.0] };
    let u_w = [Wave { c: 0.0, a: 0.0, b: 0.5, k: [0.0, 1.0] }, Wave { c: 0.0, a: 0.4, b: 0.1, k: [1.0, 1.0] }];
    let rho = ScalarField::from_fn(grid, |x| rho_w.jet(x).0);
    let u = VectorField::new(u_w.iter().map(|w| ScalarField::from_fn(grid, |x| w.jet(x).0)).collect());
    let state = GalerkinState::new(0.0, rho, &u);
    let rhs = rhs_momentum(&sch, &state, &[slope]).unwrap();

    let (mu, eta, eps) = (params.mu, params.eta, params.epsilon);
    for i in 0..2 {
        let exact = |x: [f64; 3]| -> f64 {
            let (r, gr, hr) = rho_w.jet(x);
            let jets: Vec<_> = u_w.iter().map(|w| w.jet(x)).collect();
            let (ui, gui, hui) = jets[i];
            let div_u: f64 = (0..2).map(|j| jets[j].1[j]).sum();
            let mut conv = 0.0;
            for j in 0..2 {
                let (uj, _, _) = jets[j];
                conv += gr[j] * ui * uj + r * gui[j] * uj;
            }
            conv += r * ui * div_u;
            let dp = (params.a * params.gamma * r.powf(params.gamma - 1.0)
                + params.delta * params.beta * r.powf(params.beta - 1.0))
                * gr[i];
            let lap_ui = hui[0][0] + hui[1][1];
            let grad_div_i: f64 = (0..2).map(|j| jets[j].2[j][i]).sum();
            let stress = mu * lap_ui + (mu + eta) * grad_div_i;
            let lap_r = hr[0][0] + hr[1][1];
            let eps_term = eps * (lap_r * ui + 2.0 * (gr[0] * gui[0] + gr[1] * gui[1]) + r * lap_ui);
            let noise = slope * ((qv[0] * gr[0] + qv[1] * gr[1]) * ui + r * (qv[0] * gui[0] + qv[1] * gui[1]));
            -conv - dp + stress + eps_term + noise
        };
        for flat in 0..grid.len() {
            let k = grid.wavevector(flat);
            let got = rhs.component(i).coeffs()[flat];
            let want = if k[0].abs() <= 4 && k[1].abs() <= 4 { direct_coeff(&exact, k, 40) } else { Complex64::default() };
            assert!((got - want).norm() < 1e-10, "component {i} mode {k:?}: {got} vs {want}");
        }
    }
}

#[test]
fn stationary_uniform_state_is_a_fixed_point() {
    let grid = TorusGrid::new(2, 4, 16).unwrap();
    let params = SchemeParams { dt: 1e-2, t_end: 1.0, epsilon: 0.1, delta: 0.2, ..SchemeParams::default() };
    let q = make_constant_q(2, &[vec![1.0, 0.5], vec![-0.3, 0.2]]).unwrap();
    let sch = scheme(grid, params, q);
    let drv = driver(2, 3.0, 1.0, 100);
    let mut state = GalerkinState::new(0.0, ScalarField::constant(grid, 1.7), &VectorField::zeros(grid));
    for _ in 0..10 {
        state = step(&sch, &state, &drv).unwrap();
    }
    assert!((state.rho.max() - 1.7).abs() < 1e-14 && (state.rho.min() - 1.7).abs() < 1e-14);
    assert!(state.u.max_abs() < 1e-14);
}

#[test]
fn step_refuses_to_leave_the_driver_interval() {
    let grid = TorusGrid::new(1, 2, 8).unwrap();
    let params = SchemeParams { gamma: 1.4, dt: 0.1, t_end: 0.2, ..SchemeParams::default() };
    let sch = scheme(grid, params, make_constant_q(1, &[vec![1.0]]).unwrap());
    let drv = driver(1, 1.0, 0.2, 2);
    let state = GalerkinState::new(0.2, ScalarField::constant(grid, 1.0), &VectorField::zeros(grid));
    assert!(matches!(step(&sch, &state, &drv), Err(SolverError::Params(_))));
}

/// One step of size `dt` against 16 steps of size `dt/16`.
fn one_step_defect(sch: &Scheme, state: &GalerkinState, dt: f64) -> f64 {
    let dz = [0.3 * dt, -0.2 * dt];
    let (coarse, _) = step_increment(sch, state, dt, &dz).unwrap();
    let mut fine = state.clone();
    for _ in 0..16 {
        let (next, _) = step_increment(sch, &fine, dt / 16.0, &[dz[0] / 16.0, dz[1] / 16.0]).unwrap();
        fine = next;
    }
    norm_l2(&(&coarse.rho - &fine.rho))
        + (0..2).map(|i| norm_l2(&(coarse.u.component(i) - fine.u.component(i)))).sum::<f64>()
}

#[test]
fn halving_dt_at_least_quarters_the_one_step_defect() {
    let s = setup(6, 26, 1e-3, 0.5, make_constant_q(2, &[vec![0.5, 0.2], vec![0.1, -0.4]]).unwrap(), 1.0);
    let (state, floor) = initial_state(s.grid, &s.params, &s.initial).unwrap();
    let sch = Scheme::new(s.grid, s.params, floor, s.q.clone()).unwrap();
    let d1 = one_step_defect(&sch, &state, 8e-3);
    let d2 = one_step_defect(&sch, &state, 4e-3);
    assert!(d1 / d2 >= 4.0, "defect ratio {}", d1 / d2);
}

#[test]
fn self_convergence_is_second_order() {
    let q = make_constant_q(2, &[vec![0.5, 0.2]]).unwrap();
    let final_state = |dt: f64| run(&setup(6, 26, dt, 0.1, q.clone(), 1.0)).unwrap().states.pop().unwrap();
    let reference = final_state(0.25e-3);
    let err = |dt: f64| {
        let s = final_state(dt);
        norm_l2(&(&s.rho - &reference.rho))
            + (0..2).map(|i| norm_l2(&(s.u.component(i) - reference.u.component(i)))).sum::<f64>()
    };
    let (e1, e2) = (err(4e-3), err(2e-3));
    let order = (e1 / e2).log2();
    assert!(order >= 1.9, "observed order {order}");
}

#[test]
fn mass_drift_over_a_thousand_steps() {
    let q = make_constant_q(2, &[vec![0.5, 0.2]]).unwrap();
    let mut s = setup(4, 18, 5e-4, 0.5, q, 2.0);
    s.params.epsilon = 0.01;
    s.stride = 1000;
    let traj = run(&s).unwrap();
    assert_eq!(traj.steps_done, 1000);
    let (m0, _) = mass_momentum(&traj.states[0]);
    let (m1, _) = mass_momentum(traj.states.last().unwrap());
    assert!(((m1 - m0) / m0).abs() <= 1e-11);
}

#[test]
fn velocity_stays_in_the_galerkin_space() {
    let q = make_constant_q(2, &[vec![0.5, 0.2]]).unwrap();
    let mut s = setup(4, 20, 1e-3, 0.1, q, 1.0);
    s.stride = 10;
    let traj = run(&s).unwrap();
    for state in &traj.states {
        for c in state.u.iter().chain(state.momentum.iter()) {
            for (flat, z) in c.coeffs().iter().enumerate() {
                let k = c.grid().wavevector(flat);
                if k.iter().any(|x| x.unsigned_abs() > 4) {
                    assert_eq!(*z, Complex64::default());
                }
            }
        }
    }
}

#[test]
fn zero_noise_uniform_run_is_constant() {
    let grid = TorusGrid::new(2, 4, 16).unwrap();
    let params = SchemeParams { dt: 1e-2, t_end: 0.2, ..SchemeParams::default() };
    let setup = RunSetup {
        grid,
        params,
        q: make_constant_q(2, &[vec![0.0, 0.0]]).unwrap(),
        driver: DriverPath::zero(1, 0.2, 20),
        initial: InitialData { rho_mean: 1.5, ..InitialData::default() },
        stride: 1,
    };
    let traj = run(&setup).unwrap();
    assert_eq!(traj.states.len(), 21);
    assert_eq!(traj.ledger.len(), 21);
    for s in &traj.states {
        assert!((s.rho.max() - 1.5).abs() < 1e-14 && (s.rho.min() - 1.5).abs() < 1e-14);
        assert_eq!(s.u.max_abs(), 0.0);
    }
}

#[test]
fn desk_scale_smooth_driver_run_completes() {
    let grid = TorusGrid::new(2, 16, 64).unwrap();
    let q = cnstn::noise::make_streamfunction_q(
        grid,
        &[vec![cnstn::noise::StreamMode { k: [1, 1], cos: 0.3, sin: 0.1 }]],
    )
    .unwrap();
    let params = SchemeParams { dt: 1e-3, t_end: 0.5, ..SchemeParams::default() };
    let setup = RunSetup {
        grid,
        params,
        driver: driver(1, 1.0, 0.5, 500),
        q,
        initial: initial(),
        stride: 50,
    };
    let traj = run(&setup).unwrap();
    assert_eq!(traj.steps_done, 500);
    assert_eq!(traj.states.len(), 11);
    assert_eq!(traj.cfl_warnings, 0);
    assert!(traj.states.iter().all(|s| s.rho.min() > traj.scheme.floor));
}

#[test]
fn initial_data_is_regularized_with_mass_kept() {
    let grid = TorusGrid::new(2, 2, 10).unwrap();
    let init = InitialData {
        rho_mean: 1.0,
        rho_modes: vec![
            DensityMode { k: vec![1, 0], cos: 0.9, sin: 0.0 },
            DensityMode { k: vec![0, 1], cos: 0.9, sin: 0.0 },
            DensityMode { k: vec![4, 0], cos: 0.3, sin: 0.0 },
        ],
        u_modes: vec![VelocityMode { component: 1, k: vec![3, 0], cos: 1.0, sin: 0.0 }],
    };
    let (state, floor) = initial_state(grid, &SchemeParams::default(), &init).unwrap();
    assert_eq!(floor, 1e-8);
    assert!((state.rho.mean() - 1.0).abs() < 1e-14);
    assert!(state.rho.min() > 0.005);
    assert_eq!(state.rho.coeff([4, 0, 0]), Complex64::default());
    assert_eq!(state.u.max_abs(), 0.0);
}

#[test]
fn floor_breach_returns_partial_trajectory() {
    let grid = TorusGrid::new(1, 4, 16).unwrap();
    let params = SchemeParams { gamma: 1.4, dt: 0.05, t_end: 1.0, mu: 0.01, eta: 0.01, ..SchemeParams::default() };
    let setup = RunSetup {
        grid,
        params,
        q: make_constant_q(1, &[vec![0.0]]).unwrap(),
        driver: DriverPath::zero(1, 1.0, 20),
        initial: InitialData {
            rho_mean: 1.0,
            rho_modes: vec![],
            u_modes: vec![VelocityMode { component: 0, k: vec![1], cos: 0.0, sin: 20.0 }],
        },
        stride: 1,
    };
    let err = run(&setup).unwrap_err();
    assert!(matches!(err.error, SolverError::BlowUp { .. }), "{}", err.error);
    assert!(!err.partial.states.is_empty());
    assert_eq!(err.partial.states.len(), err.partial.ledger.len());
}

#[test]
fn stride_keeps_ledger_aligned() {
    let q = make_constant_q(2, &[vec![0.5, 0.2]]).unwrap();
    let mut s = setup(4, 18, 1e-2, 0.5, q, 1.0);
    s.stride = 7;
    let traj = run(&s).unwrap();
    let times = traj.times();
    assert_eq!(times.len(), traj.ledger.len());
    assert_eq!(times.len(), traj.tested.times.len());
    assert_eq!(*times.last().unwrap(), 0.5);
    for (t, row) in times.iter().zip(&traj.ledger) {
        assert_eq!(*t, row.t);
    }
}

#[test]
fn truncation_knots_are_c1() {
    for k in [0.3, 1.0, 2.5] {
        for knot in [k, 3.0 * k] {
            let h = 1e-13 * k;
            let left = truncation_derivative(knot - h, k).unwrap();
            let right = truncation_derivative(knot + h, k).unwrap();
            assert!((left - right).abs() <= 1e-12, "k={k} knot={knot}: {left} vs {right}");
            let jump = truncation(knot + h, k).unwrap() - truncation(knot - h, k).unwrap();
            assert!((jump - 2.0 * h * left).abs() <= 1e-12 * k);
        }
    }
}

#[test]
fn renormalized_residual_vanishes_on_constant_state() {
    let grid = TorusGrid::new(2, 4, 16).unwrap();
    let params = SchemeParams { dt: 1e-2, t_end: 0.1, ..SchemeParams::default() };
    let setup = RunSetup {
        grid,
        params,
        q: make_constant_q(2, &[vec![0.7, 0.1]]).unwrap(),
        driver: driver(1, 1.0, 0.1, 10),
        initial: InitialData { rho_mean: 0.8, ..InitialData::default() },
        stride: 1,
    };
    let traj = run(&setup).unwrap();
    let psi = ScalarField::mode(grid, [1, 2, 0], 1.0, -0.5);
    let r = renorm_residual(&traj, &Truncation { k: 1.0 }, &psi);
    assert_eq!(r.residual.len(), 10);
    assert!(r.max_abs() < 1e-12);
    assert!(!r.warning);
    assert!(renorm_residual(&traj, &Identity, &psi).warning);
}

#[test]
fn identity_renormalization_is_the_continuity_residual() {
    let q = make_constant_q(2, &[vec![0.4, 0.3]]).unwrap();
    let psi_of = |grid| ScalarField::mode(grid, [1, 1, 0], 1.0, 0.5);
    let max_res = |dt: f64| {
        let traj = run(&setup(6, 26, dt, 0.1, q.clone(), 1.0)).unwrap();
        renorm_residual(&traj, &Identity, &psi_of(traj.grid())).max_abs()
    };
    let (r1, r2) = (max_res(4e-3), max_res(2e-3));
    assert!(r1 < 1e-2 && r2 < 0.6 * r1, "{r1:e} {r2:e}");
}

#[test]
fn checkpoint_restart_reproduces_the_run() {
    let q = make_constant_q(2, &[vec![0.5, 0.2]]).unwrap();
    let s = setup(4, 18, 1e-2, 0.2, q, 1.0);
    let full = run(&s).unwrap();
    let mid = &full.states[10];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mid.json");
    write_checkpoint(&path, mid, &s.params, full.scheme.floor, None).unwrap();
    let (header, state) = read_checkpoint(&path).unwrap();
    let scheme = Scheme::new(s.grid, header.params, header.floor, s.q.clone()).unwrap();
    let rest = run_from(&s, scheme, state).unwrap();
    let a = full.states.last().unwrap();
    let b = rest.states.last().unwrap();
    assert_eq!(b.t, a.t);
    assert!(max_diff(&a.rho, &b.rho) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pressure_potential_identity(
        a in 0.1f64..5.0, gamma in 1.01f64..3.0, delta in 0.0f64..1.0, extra in 0.01f64..3.0, z in 0.0f64..5.0,
    ) {
        let beta = gamma.max(4.0) + extra;
        let p = SchemeParams { a, gamma, delta, beta, ..SchemeParams::default() };
        let lhs = p.potential_prime(z) * z - p.potential(z);
        prop_assert!((lhs - p.p(z)).abs() <= 1e-10 * (1.0 + p.p(z)));
    }

    #[test]
    fn truncation_is_monotone_and_bounded(k in 0.01f64..10.0, z in 0.0f64..50.0, dz in 0.0f64..5.0) {
        let t = truncation(z, k).unwrap();
        prop_assert!(truncation(z + dz, k).unwrap() >= t);
        prop_assert!(t <= z.min(2.0 * k) + 1e-15);
    }

    #[test]
    fn continuity_rhs_has_zero_mean(seed in any::<u64>(), slope in -5.0f64..5.0, eps in 0.0f64..1.0) {
        let (grid, rho, u) = random_state(seed);
        let q = make_constant_q(2, &[vec![0.3, -0.8]]).unwrap();
        let sch = scheme(grid, SchemeParams { epsilon: eps, ..SchemeParams::default() }, q);
        let state = GalerkinState::new(0.0, rho, &u);
        let r = rhs_continuity(&sch, &state, &[slope]).unwrap();
        prop_assert!(r.coeff([0, 0, 0]).norm() < 1e-14);
    }

    #[test]
    fn momentum_rhs_has_zero_mean(seed in any::<u64>()) {
        let (grid, rho, u) = random_state(seed);
        let q = make_constant_q(2, &[vec![0.3, -0.8]]).unwrap();
        let sch = scheme(grid, SchemeParams { delta: 0.1, ..SchemeParams::default() }, q);
        let state = GalerkinState::new(0.0, rho, &u);
        let r = rhs_momentum(&sch, &state, &[0.0]).unwrap();
        for c in r.iter() {
            prop_assert!(c.coeff([0, 0, 0]).norm() < 1e-14);
        }
    }

    #[test]
    fn stress_dissipation_is_nonnegative(seed in any::<u64>(), mu in 0.01f64..2.0, eta in 0.01f64..2.0) {
        let (_, _, u) = random_state(seed);
        let params = SchemeParams { mu, eta, ..SchemeParams::default() };
        let s = stress_divergence(&u, &params);
        let work: f64 = (0..2).map(|i| inner(s.component(i), u.component(i))).sum();
        prop_assert!(-work >= -1e-12);
    }

    #[test]
    fn uniform_state_is_fixed_for_any_constant_noise(q0 in -2.0f64..2.0, q1 in -2.0f64..2.0, dz in -0.5f64..0.5) {
        let grid = TorusGrid::new(2, 3, 12).unwrap();
        let params = SchemeParams { dt: 1e-2, t_end: 1.0, epsilon: 0.05, ..SchemeParams::default() };
        let sch = scheme(grid, params, make_constant_q(2, &[vec![q0, q1]]).unwrap());
        let state = GalerkinState::new(0.0, ScalarField::constant(grid, 1.2), &VectorField::zeros(grid));
        let (next, _) = step_increment(&sch, &state, 1e-2, &[dz]).unwrap();
        prop_assert!((next.rho.max() - 1.2).abs() < 1e-14 && (next.rho.min() - 1.2).abs() < 1e-14);
        prop_assert!(next.u.max_abs() < 1e-14);
    }
}

/// Random positive density and velocity with modes `|k|_∞ ≤ 3` on a 2D grid.
fn random_state(seed: u64) -> (TorusGrid, ScalarField, VectorField) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let grid = TorusGrid::new(2, 3, 14).unwrap();
    let mut rho = ScalarField::constant(grid, 1.0);
    let mut u = VectorField::zeros(grid);
    for k0 in -3i64..=3 {
        for k1 in 0i64..=3 {
            if k1 == 0 && k0 <= 0 {
                continue;
            }
            let k = [k0, k1, 0];
            rho.add_mode(k, 0.05 * rng.random_range(-1.0..1.0), 0.05 * rng.random_range(-1.0..1.0));
            for i in 0..2 {
                u.component_mut(i).add_mode(k, rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
            }
        }
    }
    (grid, rho, u)
}
