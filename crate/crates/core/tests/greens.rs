//! Green's function, resolvent and derivative checks against finite-difference
//! and quadrature oracles written here.

mod common;

use std::f64::consts::PI;

use ebc_core::data::InitialDataMode;
use ebc_core::grid::uniform_nodes;
use ebc_core::tg::{
    d_y0_stream, endpoint_eigenfunctions, generalized_stream, greens, homogeneous_pair, solve_inhomogeneous,
    solve_inhomogeneous_with, source_f, wronskian, DerivativeOrder, TaylorGoldstein,
};
use ebc_core::{Complex64 as C64, GridFunction, GridKind, PhysicalParams, Profile, SpectralPoint};
use proptest::prelude::*;

fn params(m: u32, beta2: f64) -> PhysicalParams {
    PhysicalParams::new(m, beta2.sqrt()).unwrap()
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// `y(1 - y)` as a Chebyshev series in `2y - 1`.
fn parabola() -> Profile {
    Profile::Chebyshev(vec![0.125, 0.0, -0.125])
}

fn sample_data() -> InitialDataMode {
    let omega = Profile::Product(Box::new(Profile::Sine { k: 1 }), Box::new(parabola()));
    let rho = Profile::Bump { center: 0.4, width: 0.3 };
    InitialDataMode::new(omega, rho)
}

/// Five-point second derivative.
fn d2(f: impl Fn(f64) -> C64, y: f64, h: f64) -> C64 {
    (-f(y + 2.0 * h) + 16.0 * f(y + h) - 30.0 * f(y) + 16.0 * f(y - h) - f(y - 2.0 * h)) / (12.0 * h * h)
}

/// Relative residual of `φ'' - m²φ + β²φ/ζ²` measured against the largest term.
fn tg_residual(p: &PhysicalParams, zeta: C64, phi: C64, phi_yy: C64) -> f64 {
    let m2 = p.mf() * p.mf();
    let pot = p.beta2() * phi / (zeta * zeta);
    let r = phi_yy - m2 * phi + pot;
    r.norm() / phi_yy.norm().max(m2 * phi.norm()).max(pot.norm())
}

const REGIMES: [f64; 3] = [0.1, 0.25, 1.0];

#[test]
fn dirichlet_solutions_vanish_at_their_walls() {
    for &b2 in &REGIMES {
        for m in [1, 2, 4, 8] {
            let p = params(m, b2);
            for (y0, eps) in [(0.3, 1e-2), (0.5, 1e-3), (0.9, 1e-4), (-0.2, 0.0)] {
                let sp = SpectralPoint::plus(y0, eps);
                let scale = (0..=10)
                    .map(|i| {
                        let (u, l) = homogeneous_pair(p, sp, i as f64 / 10.0).unwrap();
                        u.value.norm().max(l.value.norm())
                    })
                    .fold(0.0, f64::max);
                let (u1, _) = homogeneous_pair(p, sp, 1.0).unwrap();
                let (_, l0) = homogeneous_pair(p, sp, 0.0).unwrap();
                assert!(u1.value.norm() < 1e-12 * scale, "phi_u(1) β²={b2} m={m} y0={y0}");
                assert!(l0.value.norm() < 1e-12 * scale, "phi_l(0) β²={b2} m={m} y0={y0}");
            }
        }
    }
}

#[test]
fn homogeneous_solutions_satisfy_the_equation() {
    for &b2 in &REGIMES {
        for m in [1, 4] {
            let p = params(m, b2);
            for (y0, eps) in [(0.3, 1e-2), (0.5, 1e-3), (0.7, 1e-3)] {
                let sp = SpectralPoint::minus(y0, eps);
                for y in [0.1, 0.25, 0.5, 0.62, 0.9] {
                    let zeta = sp.zeta(y).zeta;
                    let h = zeta.norm() / 200.0;
                    let at = |x: f64| homogeneous_pair(p, sp, x).unwrap();
                    let (u, l) = at(y);
                    let u_yy = d2(|x| at(x).0.value, y, h);
                    let l_yy = d2(|x| at(x).1.value, y, h);
                    let (ru, rl) = (tg_residual(&p, zeta, u.value, u_yy), tg_residual(&p, zeta, l.value, l_yy));
                    assert!(ru < 1e-6 && rl < 1e-6, "β²={b2} m={m} y0={y0} y={y}: {ru:e} {rl:e}");
                }
            }
        }
    }
}

#[test]
fn reference_residual_example() {
    let p = params(1, 1.0);
    let sp = SpectralPoint::plus(0.3, 1e-2);
    let zeta = sp.zeta(0.5).zeta;
    let u = |x: f64| homogeneous_pair(p, sp, x).unwrap().0.value;
    let r = tg_residual(&p, zeta, u(0.5), d2(u, 0.5, 1e-3));
    assert!(r < 1e-6, "{r:e}");
}

#[test]
fn wronskian_conjugation_and_constancy() {
    for &b2 in &REGIMES {
        for m in [1, 2, 4] {
            let p = params(m, b2);
            let wp = wronskian(p, SpectralPoint::plus(0.4, 1e-2)).unwrap();
            let wm = wronskian(p, SpectralPoint::minus(0.4, 1e-2)).unwrap();
            assert!(rel(wp, wm.conj()) < 1e-12, "β²={b2} m={m}");
            for (y0, eps) in [(0.4, 1e-2), (0.5, 1e-3), (-0.1, 0.0), (1.2, 0.0)] {
                let sp = SpectralPoint::plus(y0, eps);
                let w = wronskian(p, sp).unwrap();
                for y in [0.25, 0.75] {
                    let (u, l) = homogeneous_pair(p, sp, y).unwrap();
                    let direct = u.value * l.derivative - u.derivative * l.value;
                    assert!(rel(direct, w) < 1e-8, "β²={b2} m={m} y0={y0} y={y}: {:e}", rel(direct, w));
                }
            }
        }
    }
}

#[test]
fn greens_kernel_structure() {
    for &b2 in &REGIMES {
        for m in [1, 2, 8] {
            let p = params(m, b2);
            let sp = SpectralPoint::plus(0.5, 1e-2);
            let g = |y, z, sp| greens(p, sp, y, z).unwrap();
            let a = g(0.3, 0.7, sp);
            let b = g(0.7, 0.3, sp);
            assert!(rel(a.g, b.g) < 1e-12);
            assert!(rel(a.dg_dy, b.dg_dz) < 1e-12);
            assert!(rel(a.g, g(0.3, 0.7, sp.conj()).g.conj()) < 1e-12);
            let scale = a.g.norm().max(g(0.5, 0.5, sp).g.norm());
            for z in [0.2, 0.5, 0.8] {
                assert!(g(0.0, z, sp).g.norm() < 1e-12 * scale);
                assert!(g(1.0, z, sp).g.norm() < 1e-12 * scale);
            }
        }
    }
}

#[test]
fn greens_inverts_the_operator() {
    // ∫G(y,z)f(z)dz compared with the solver, and the jump of ∂_yG across z = y.
    let p = params(1, 1.0);
    let sp = SpectralPoint::plus(0.5, 1e-2);
    let y = 0.35;
    let below = greens(p, sp, y, y - 1e-12).unwrap();
    let above = greens(p, sp, y, y + 1e-12).unwrap();
    let jump = below.dg_dy - above.dg_dy;
    assert!((jump - C64::new(1.0, 0.0)).norm() < 1e-8, "{jump}");
}

#[test]
fn source_examples() {
    let p = params(1, 1.0);
    let sp = SpectralPoint::plus(0.3, 1e-2);
    let d = InitialDataMode::new(Profile::Zero, Profile::Sine { k: 1 });
    let f = source_f(&p, &d, sp, 0.5);
    assert!((f - C64::new(-(PI * PI + 1.0), 0.0)).norm() < 1e-12, "{f}");

    let d = InitialDataMode::new(Profile::Sine { k: 1 }, Profile::Zero);
    let f = source_f(&p, &d, SpectralPoint::plus(0.0, 0.0), 0.5);
    assert!((f - C64::new(0.5 * (PI * PI + 1.0), 0.0)).norm() < 1e-12, "{f}");

    let d = sample_data();
    let d2 = d.scaled(2.0);
    for z in [0.1, 0.45, 0.8] {
        assert!(rel(source_f(&p, &d2, sp, z), 2.0 * source_f(&p, &d, sp, z)) < 1e-14);
    }
}

/// Residual of `Φ'' - m²Φ + β²Φ/ζ² - f` at interior samples, with each second
/// derivative from a five-point stencil scaled to the local distance to `y₀`.
fn inhomogeneous_residual(p: PhysicalParams, sp: SpectralPoint, f: impl Fn(f64) -> C64 + Copy) -> f64 {
    let ys: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    let hs: Vec<f64> = ys.iter().map(|&y| (sp.zeta(y).zeta.norm() / 200.0).min(1e-3)).collect();
    let mut pts: Vec<f64> = ys
        .iter()
        .zip(&hs)
        .flat_map(|(&y, &h)| [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k| y + k * h))
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let phi = solve_inhomogeneous_with(p, sp, &pts, f).unwrap();
    let at = |x: f64| {
        let i = pts.binary_search_by(|t| t.partial_cmp(&x).unwrap()).unwrap();
        phi[i]
    };
    let m2 = p.mf() * p.mf();
    let (mut num, mut den) = (0.0, 0.0);
    for (&y, &h) in ys.iter().zip(&hs) {
        let z = sp.zeta(y).zeta;
        let yy: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k| y + k * h);
        let v: Vec<C64> = yy.iter().map(|&x| at(x)).collect();
        let lap = (-v[4] + 16.0 * v[3] - 30.0 * v[2] + 16.0 * v[1] - v[0]) / (12.0 * h * h);
        let r = lap - m2 * v[2] + p.beta2() * v[2] / (z * z) - f(y);
        num += r.norm_sqr();
        den += f(y).norm_sqr();
    }
    (num / den).sqrt()
}

#[test]
fn inhomogeneous_solve_residual() {
    let p = params(1, 1.0);
    let sp = SpectralPoint::plus(0.5, 1e-2);
    let r = inhomogeneous_residual(p, sp, |_| C64::new(1.0, 0.0));
    assert!(r < 1e-5, "{r:e}");
    for &b2 in &REGIMES {
        for (y0, eps) in [(0.25, 1e-3), (0.75, 1e-2)] {
            let sp = SpectralPoint::minus(y0, eps);
            let r = inhomogeneous_residual(params(2, b2), sp, |y| C64::new((3.0 * y).cos(), y));
            assert!(r < 1e-5, "β²={b2} y0={y0}: {r:e}");
        }
    }
}

#[test]
fn inhomogeneous_solve_zero_and_walls() {
    let p = params(1, 1.0);
    let sp = SpectralPoint::plus(0.5, 1e-2);
    let zero = GridFunction::zeros(uniform_nodes(64), GridKind::Uniform);
    let phi = solve_inhomogeneous(p, sp, &zero).unwrap();
    assert!(phi.max_abs() == 0.0);
    let one = GridFunction::uniform(64, |_| C64::new(1.0, 0.0));
    let phi = solve_inhomogeneous(p, sp, &one).unwrap();
    let scale = phi.max_abs();
    assert!(phi.values[0].norm() < 1e-12 * scale && phi.values[64].norm() < 1e-12 * scale);
}

#[test]
fn kernel_bound_is_uniform_in_m() {
    for &b2 in &[0.1, 1.0] {
        let q: Vec<f64> = [1, 2, 4, 8].iter().map(|&m| common::normalized_kernel(params(m, b2), 0.5, 1e-3)).collect();
        let hi = q.iter().cloned().fold(0.0, f64::max);
        let lo = q.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi / lo < 4.0, "β²={b2}: {q:?}");
    }
}

#[test]
fn critical_kernel_bound_saturates_in_m() {
    // Small m is held down by the walls; once the critical layer scale 1/m
    // is well inside the channel the log-normalized quantity levels off.
    let q: Vec<f64> = [4, 8, 16, 32].iter().map(|&m| common::normalized_kernel(params(m, 0.25), 0.5, 1e-3)).collect();
    let hi = q.iter().cloned().fold(0.0, f64::max);
    let lo = q.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi / lo < 2.0, "{q:?}");
}

#[test]
fn inhomogeneous_bound_is_uniform_in_m() {
    for &b2 in &[0.1, 1.0] {
        let q: Vec<f64> = [1, 2, 4]
            .iter()
            .map(|&m| {
                let p = params(m, b2);
                let (y0, eps) = (0.5, 1e-3);
                let reach = 3.0 * p.beta / p.mf();
                let ys: Vec<f64> = (0..=60)
                    .map(|i| y0 - reach + 2.0 * reach * i as f64 / 60.0)
                    .filter(|y| *y > 0.0 && *y < 1.0)
                    .collect();
                let phi = solve_inhomogeneous_with(p, SpectralPoint::plus(y0, eps), &ys, |_| C64::new(1.0, 0.0))
                    .unwrap();
                ys.iter()
                    .zip(&phi)
                    .map(|(&y, v)| {
                        let z = C64::new(y - y0, eps).norm();
                        p.mf().powf(1.0 + p.mu) * z.powf(-0.5 + p.mu) * v.norm()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        let hi = q.iter().cloned().fold(0.0, f64::max);
        assert!(hi / q[0] < 4.0, "β²={b2}: {q:?}");
    }
}

#[test]
fn resolvent_conjugation_and_zero_data() {
    let p = params(1, 1.0);
    let d = sample_data();
    let (psi_p, rho_p) = generalized_stream(p, &d, SpectralPoint::plus(0.5, 1e-2)).unwrap();
    let (psi_m, rho_m) = generalized_stream(p, &d, SpectralPoint::minus(0.5, 1e-2)).unwrap();
    assert!(psi_p.sub(&psi_m.conj()).unwrap().max_abs() < 1e-12 * psi_p.max_abs());
    assert!(rho_p.sub(&rho_m.conj()).unwrap().max_abs() < 1e-12 * rho_p.max_abs());

    let z = InitialDataMode::zero();
    let (psi, rho) = generalized_stream(p, &z, SpectralPoint::plus(0.5, 1e-2)).unwrap();
    assert!(psi.max_abs() == 0.0 && rho.max_abs() == 0.0);
    let dz = d_y0_stream(p, &z, SpectralPoint::plus(0.5, 1e-2)).unwrap();
    assert!(dz.dpsi_dy0.max_abs() == 0.0 && dz.dpsi_dy.max_abs() == 0.0 && dz.drho_dy0.max_abs() == 0.0);
}

fn rel_l2(a: &GridFunction, b: &GridFunction) -> f64 {
    a.sub(b).unwrap().norm_l2() / b.norm_l2()
}

#[test]
fn y0_derivatives_match_finite_differences() {
    let h = 1e-4;
    for &b2 in &REGIMES {
        let p = params(1, b2);
        let d = sample_data();
        let (y0, eps) = (0.5, 5e-2);
        let r = TaylorGoldstein::new(p)
            .resolvent(&d, SpectralPoint::plus(y0, eps), d.nodes(), DerivativeOrder::Second)
            .unwrap();
        let grid = |v: &[C64]| GridFunction::new(d.nodes().to_vec(), v.to_vec(), GridKind::Uniform).unwrap();
        let (pa, ra) = generalized_stream(p, &d, SpectralPoint::plus(y0 + h, eps)).unwrap();
        let (pb, rb) = generalized_stream(p, &d, SpectralPoint::plus(y0 - h, eps)).unwrap();
        let fd_psi = pa.sub(&pb).unwrap().scale(C64::new(0.5 / h, 0.0));
        let fd_rho = ra.sub(&rb).unwrap().scale(C64::new(0.5 / h, 0.0));
        let e1 = rel_l2(&grid(r.dpsi_dy0.as_ref().unwrap()), &fd_psi);
        let e2 = rel_l2(&grid(r.drho_dy0.as_ref().unwrap()), &fd_rho);
        assert!(e1 < 1e-3 && e2 < 1e-3, "β²={b2}: {e1:e} {e2:e}");

        let psi0 = r.psi_grid();
        let fd2 = pa.add(&pb).unwrap().sub(&psi0.scale(C64::new(2.0, 0.0))).unwrap().scale(C64::new(1.0 / (h * h), 0.0));
        let e3 = rel_l2(&grid(r.d2psi_dy0.as_ref().unwrap()), &fd2);
        assert!(e3 < 1e-3, "β²={b2}: second derivative {e3:e}");

        let sd = d_y0_stream(p, &d, SpectralPoint::plus(y0, eps)).unwrap();
        assert!(rel_l2(&sd.dpsi_dy0, &fd_psi) < 1e-3);
    }
}

#[test]
fn y_derivative_matches_grid_derivative() {
    let p = params(1, 1.0);
    let d = sample_data().with_nodes(uniform_nodes(4096), GridKind::Uniform).unwrap();
    let sd = d_y0_stream(p, &d, SpectralPoint::plus(0.5, 5e-2)).unwrap();
    let (psi, _) = generalized_stream(p, &d, SpectralPoint::plus(0.5, 5e-2)).unwrap();
    let e = rel_l2(&psi.derivative(), &sd.dpsi_dy);
    assert!(e < 1e-4, "{e:e}");
}

#[test]
fn wall_slopes_match_one_sided_differences() {
    let p = params(2, 1.0);
    let d = sample_data();
    let sp = SpectralPoint::plus(0.4, 1e-2);
    let h = 1e-3;
    let mut nodes: Vec<f64> = (0..=4).map(|k| k as f64 * h).collect();
    nodes.extend((0..=4).rev().map(|k| 1.0 - k as f64 * h));
    let r = TaylorGoldstein::new(p).resolvent(&d, sp, &nodes, DerivativeOrder::None).unwrap();
    let c = [-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25];
    let lo: C64 = (0..5).map(|k| r.phi[k] * c[k]).sum::<C64>() / h;
    let hi: C64 = (0..5).map(|k| r.phi[9 - k] * c[k]).sum::<C64>() / -h;
    assert!(rel(r.wall_slopes.0, lo) < 1e-6, "{} vs {lo}", r.wall_slopes.0);
    assert!(rel(r.wall_slopes.1, hi) < 1e-6, "{} vs {hi}", r.wall_slopes.1);
}

#[test]
fn endpoint_eigenfunctions_structure() {
    for &b2 in &REGIMES {
        let p = params(1, b2);
        let ys = [0.0, 0.3, 0.7, 1.0];
        let e = endpoint_eigenfunctions(p, &ys).unwrap();
        let scale = e.phi_u.max_abs();
        assert!(e.phi_u.values[3].norm() < 1e-12 * scale);
        assert!(e.phi_l.values[0].norm() < 1e-12 * scale);
        assert!(rel(e.phi_l.values[1], e.phi_u.values[2]) < 1e-12);

        for y in [0.2, 0.5, 0.8] {
            let h = y / 200.0;
            let mut nodes = vec![0.0];
            nodes.extend([-2.0, -1.0, 0.0, 1.0, 2.0].map(|k| y + k * h));
            nodes.push(1.0);
            let u = endpoint_eigenfunctions(p, &nodes).unwrap().phi_u.values;
            let lap = (-u[5] + 16.0 * u[4] - 30.0 * u[3] + 16.0 * u[2] - u[1]) / (12.0 * h * h);
            let r = tg_residual(&p, C64::new(y, 0.0), u[3], lap);
            assert!(r < 1e-6, "β²={b2} y={y}: {r:e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn greens_symmetry_conjugation_vanishing(
        m in 1u32..=8,
        b2 in prop::sample::select(vec![0.05, 0.1, 0.2, 0.25, 0.5, 1.0, 2.0]),
        y in 0.0f64..1.0,
        z in 0.0f64..1.0,
        y0 in -0.2f64..1.2,
        log_eps in -4.0f64..-1.0,
    ) {
        let p = params(m, b2);
        let sp = SpectralPoint::plus(y0, 10f64.powf(log_eps));
        let a = greens(p, sp, y, z).unwrap();
        let b = greens(p, sp, z, y).unwrap();
        let c = greens(p, sp.conj(), y, z).unwrap();
        let scale = a.g.norm().max(1e-300);
        prop_assert!((a.g - b.g).norm() <= 1e-12 * scale);
        prop_assert!((a.g - c.g.conj()).norm() <= 1e-12 * scale);
        let w0 = greens(p, sp, 0.0, z).unwrap().g.norm();
        let w1 = greens(p, sp, 1.0, z).unwrap().g.norm();
        let ref_scale = greens(p, sp, z, z).unwrap().g.norm();
        prop_assert!(w0 <= 1e-10 * ref_scale && w1 <= 1e-10 * ref_scale);
    }

    #[test]
    fn resolvent_is_linear(a in -3.0f64..3.0, y0 in 0.05f64..0.95) {
        let p = params(1, 1.0);
        let d = sample_data().with_nodes(uniform_nodes(32), GridKind::Uniform).unwrap();
        let sp = SpectralPoint::plus(y0, 1e-2);
        let (psi, _) = generalized_stream(p, &d, sp).unwrap();
        let (psi_a, _) = generalized_stream(p, &d.scaled(a), sp).unwrap();
        let e = psi_a.sub(&psi.scale(C64::new(a, 0.0))).unwrap().max_abs();
        prop_assert!(e <= 1e-12 * psi.max_abs().max(1e-300) * a.abs().max(1.0));
    }
}
