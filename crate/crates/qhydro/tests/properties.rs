//! Property tests of the structural invariants: polar round-trips,
//! projection idempotence, measure scaling, and closure independence.

use num_complex::Complex64;
use proptest::prelude::*;

use qhydro::field::{ComplexField, ScalarField, VectorField};
use qhydro::flow::helmholtz_decompose;
use qhydro::madelung::{recompose, to_polar};
use qhydro::torus::{
    helicoidal_ring, mesh_measures, mesh_torus, torus_measures, TorusShape,
};
use qhydro::vortex::circulation_enclosed;
use qhydro::{Boundary, Grid, PhysicalConstants};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// to_polar then recompose reproduces psi wherever the density sits
    /// above the floor.
    #[test]
    fn polar_round_trip(
        width in 0.4f64..2.0,
        k in -3.0f64..3.0,
        chirp in -0.4f64..0.4,
        amp in 0.2f64..3.0,
    ) {
        let c = PhysicalConstants::default();
        let g = Grid::line(-8.0, 8.0, 256, Boundary::Periodic).unwrap();
        let psi = ComplexField::from_fn(&g, |x, _| {
            Complex64::from_polar(
                amp * (-x * x / (4.0 * width * width)).exp(),
                k * x + chirp * x * x,
            )
        });
        let wf = to_polar(&psi, &c).unwrap();
        let back = recompose(&wf, &c);
        let floor = wf.rho_floor();
        for i in 0..g.len() {
            if wf.rho[i] >= floor {
                prop_assert!((back.data[i] - psi.data[i]).norm() < 1e-12);
            }
        }
    }

    /// The spectral projections reconstruct the field and are idempotent.
    #[test]
    fn helmholtz_projection_properties(
        a1 in -1.0f64..1.0, a2 in -1.0f64..1.0,
        b1 in -1.0f64..1.0, b2 in -1.0f64..1.0,
        mx in 1i32..4, my in 1i32..4,
    ) {
        let g = Grid::plane(
            (0.0, 2.0 * std::f64::consts::PI), 48,
            (0.0, 2.0 * std::f64::consts::PI), 48,
            Boundary::Periodic,
        ).unwrap();
        let (mxf, myf) = (mx as f64, my as f64);
        let v = VectorField::new(
            g.clone(),
            vec![
                ScalarField::from_fn(&g, |x, y| {
                    a1 * (mxf * x).sin() * (myf * y).cos() + b1 * (myf * y).sin()
                }).data,
                ScalarField::from_fn(&g, |x, y| {
                    a2 * (mxf * x).cos() * (myf * y).sin() + b2 * (mxf * x).cos()
                }).data,
            ],
        ).unwrap();
        let (vs, vr) = helmholtz_decompose(&v).unwrap();
        let recon = vs.add(&vr).sub(&v);
        prop_assert!(recon.max_abs() < 1e-10, "reconstruction {}", recon.max_abs());
        let (vss, vsr) = helmholtz_decompose(&vs).unwrap();
        prop_assert!(vss.sub(&vs).max_abs() < 1e-10);
        prop_assert!(vsr.max_abs() < 1e-10);
        let (vrs, vrr) = helmholtz_decompose(&vr).unwrap();
        prop_assert!(vrr.sub(&vr).max_abs() < 1e-10);
        prop_assert!(vrs.max_abs() < 1e-10);
    }

    /// Enclosed circulation grows monotonically and saturates at Gamma.
    #[test]
    fn circulation_monotone_and_bounded(
        gamma in 0.1f64..10.0,
        sigma_total in 0.05f64..5.0,
    ) {
        let mut prev = 0.0;
        for k in 1..=120 {
            let r = k as f64 * 0.1 * sigma_total.sqrt();
            let g = circulation_enclosed(gamma, sigma_total, r).unwrap();
            prop_assert!(g + 1e-12 >= prev);
            prop_assert!(g <= gamma * (1.0 + 1e-12));
            prev = g;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Scaling (a, b) -> (la, lb) scales V by l^3 and S by l^2 on both
    /// the formula and the mesh route.
    #[test]
    fn measure_scaling(
        a in 0.5f64..2.0,
        b_over_a in 1.0f64..3.0,
        lambda in 0.5f64..2.5,
    ) {
        let b = a * b_over_a;
        let f0 = torus_measures(a, b).unwrap();
        let f1 = torus_measures(lambda * a, lambda * b).unwrap();
        prop_assert!((f1.volume / f0.volume / lambda.powi(3) - 1.0).abs() < 1e-12);
        prop_assert!((f1.surface / f0.surface / lambda.powi(2) - 1.0).abs() < 1e-12);

        let shape0 = TorusShape::with_rational_ratio(a, b, 1.0, 2, 1, 0.0, 0.0).unwrap();
        let shape1 = TorusShape::with_rational_ratio(lambda * a, lambda * b, 1.0, 2, 1, 0.0, 0.0).unwrap();
        let m0 = mesh_measures(&mesh_torus(&shape0, 48, 48).unwrap());
        let m1 = mesh_measures(&mesh_torus(&shape1, 48, 48).unwrap());
        prop_assert!((m1.enclosed_volume / m0.enclosed_volume / lambda.powi(3) - 1.0).abs() < 1e-9);
        prop_assert!((m1.unsigned_area / m0.unsigned_area / lambda.powi(2) - 1.0).abs() < 1e-9);
    }

    /// Rings built from rational rates close regardless of the torus
    /// radius and phases, with the reduced turn counts.
    #[test]
    fn rational_rings_close(
        p in 1u32..5, q in 1u32..5,
        b in 0.0f64..4.0,
        phi0 in 0.0f64..6.2,
        phi1 in 0.0f64..6.2,
    ) {
        let shape = TorusShape::with_rational_ratio(1.0, b, 1.0, p, q, phi0, phi1).unwrap();
        let ring = helicoidal_ring(&shape, 64).unwrap();
        prop_assert!(ring.closed, "gap {}", ring.closure_gap);
        prop_assert!(ring.closure_gap < 1e-10);
        let g = gcd(p, q);
        prop_assert_eq!(ring.turns_about_tube, p / g);
        prop_assert_eq!(ring.turns_about_axis, q / g);
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
