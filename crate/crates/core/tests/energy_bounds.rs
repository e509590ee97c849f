mod common;

use std::f64::consts::PI;
use std::sync::OnceLock;

use helfrich_core::delaunay::{self, DomainLabel};
use helfrich_core::energy::*;
use helfrich_core::geometry::{curvature_field, CurvatureField};
use helfrich_core::mesh::TriMesh;
use helfrich_core::meshgen;
use proptest::prelude::*;

use common::unit_params;

fn close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * y.abs()
}

#[test]
fn classification_examples() {
    let c = lower_bound(&unit_params(1.0, 0.0, 0.0), Topology::Annulus).unwrap();
    assert_eq!((c.case_label, c.attained), ("(v)", Attainment::Minimum));
    assert!((c.bound.unwrap() - 8.0 * PI).abs() < 1e-12);

    let c = lower_bound(&unit_params(1.0, 1.0, -1.0), Topology::Annulus).unwrap();
    assert_eq!((c.case_label, c.witness), ("(iii)", Some("N2")));
    assert!((c.bound.unwrap() - 4.0 * PI).abs() < 1e-12);

    let c = lower_bound(&unit_params(1.0, 1.0, 0.5), Topology::Disc).unwrap();
    assert!((c.e_underline - 1.5).abs() < 1e-15);
    assert!((c.bound.unwrap() - 4.0 * PI).abs() < 1e-12);
    assert_eq!(c.attained.label(), "no CMC critical disc exists");

    assert!(matches!(lower_bound(&unit_params(1.0, -1.0, 0.0), Topology::Disc), Err(helfrich_core::Error::OutOfScope(_))));
}

#[test]
fn energy_examples() {
    let hemi = meshgen::hemisphere(1.0, 96).unwrap();
    let r = evaluate_energy(&hemi, &unit_params(1.0, 1.0, 0.0)).unwrap();
    assert!(r.helfrich_term.abs() < 1e-4);
    assert!(close(r.total, 4.0 * PI, 1e-3), "{}", r.total);

    let p = unit_params(1.0, 1.0, 1.0);
    let n1 = delaunay::domain(&p, DomainLabel::N1, 257).unwrap().mesh(256, 256).unwrap();
    let r = evaluate_energy(&n1, &p).unwrap();
    assert!(close(r.total, 4.0 * PI, 1e-2), "{}", r.total);
    assert!((r.helfrich_term + r.gauss_term + r.boundary_bending + r.boundary_length_term - r.total).abs() < 1e-12 * r.total.abs());
    assert!((r.bound_gap.unwrap() - (r.total - 4.0 * PI)).abs() < 1e-12);
}

#[test]
fn rescaling_identity() {
    let p = unit_params(1.0, 0.0, 0.0);
    let crit = meshgen::flat_disc(1.0, 128, 16).unwrap();
    assert!(rescaling_identity_residual(&crit, &p).unwrap() < 1e-6);
    let off = meshgen::flat_disc(2.0, 128, 16).unwrap();
    assert!((rescaling_identity_residual(&off, &p).unwrap() - 0.6).abs() < 1e-6);
    // spherical cap with H = -c₀
    let cap = meshgen::hemisphere(1.0, 128).unwrap();
    assert!(rescaling_identity_residual(&cap, &unit_params(1.0, 1.0, 0.0)).unwrap() < 1e-6);
}

#[test]
fn boundary_residual_examples() {
    let disc = meshgen::flat_disc(1.0, 128, 16).unwrap();
    for b in [-1.0, 0.0, 2.0] {
        let r = el_boundary_residuals(&disc, &unit_params(1.0, 0.0, b)).unwrap();
        assert!(r.r2 < 1e-3 && r.r3 < 1e-3 && r.r4 < 1e-3, "b {b}: {r:?}");
    }
    let p = unit_params(1.0, 1.0, -1.0);
    let n2 = delaunay::domain(&p, DomainLabel::N2, 513).unwrap().mesh(512, 512).unwrap();
    let r = el_boundary_residuals(&n2, &p).unwrap();
    assert!(r.r2 < 1e-2 && r.r3 < 1e-2 && r.r4 < 1e-2, "{r:?}");
    // boundary radius 2 against the critical radius 1; on the equator J' is
    // horizontal and the conormal vertical, so the defect shows in r3
    let hemi = meshgen::hemisphere(2.0, 96).unwrap();
    let r = el_boundary_residuals(&hemi, &unit_params(1.0, 0.5, 0.0)).unwrap();
    assert!(r.r3 > 0.1 && r.r4 < 1e-3, "{r:?}");
    let cap = meshgen::sphere_zone(2.0, 0.0, PI / 3.0, 96).unwrap();
    let r = el_boundary_residuals(&cap, &unit_params(1.0, 0.5, 0.0)).unwrap();
    assert!(r.r4 > 0.1, "{r:?}");
}

#[test]
fn willmore_holes() {
    let p = unit_params(1.0, 0.0, -1.0);
    let one = meshgen::sphere_zone(2.0, PI / 6.0, PI, 256).unwrap();
    assert!(close(willmore_case_check(&one, &p).unwrap().total, 4.0 * PI, 1e-2));
    let two = meshgen::sphere_zone(2.0, PI / 6.0, 5.0 * PI / 6.0, 256).unwrap();
    assert!(close(willmore_case_check(&two, &p).unwrap().total, 8.0 * PI, 1e-2));
    let disc = meshgen::flat_disc(1.5, 64, 8).unwrap();
    let r = willmore_case_check(&disc, &p).unwrap();
    assert!(r.helfrich_term.abs() + r.gauss_term.abs() < 1e-9);
    assert!((r.total - r.boundary_bending - r.boundary_length_term).abs() < 1e-12);
    assert!(willmore_case_check(&disc, &unit_params(1.0, 0.0, -0.5)).is_err());
}

#[test]
fn report_terms_rescale() {
    let p = unit_params(1.0, 0.0, 0.7);
    let m = meshgen::sphere_zone(1.0, 0.4, 2.0, 64).unwrap();
    let base = evaluate_energy(&m, &p).unwrap();
    for sigma in [0.5, 2.0] {
        let r = evaluate_energy(&m.scaled(sigma), &p).unwrap();
        assert!(close(r.helfrich_term, base.helfrich_term, 1e-6));
        assert!(close(r.gauss_term, base.gauss_term, 1e-6));
        assert!(close(r.boundary_bending, base.boundary_bending / sigma, 1e-6));
        assert!(close(r.boundary_length_term, base.boundary_length_term * sigma, 1e-6));
    }
}

/// The sequences approaching the infima with `α = β = a = 1`.
#[test]
fn infimum_sequences_decrease_to_the_bound() {
    let sequences: [(f64, f64, Box<dyn Fn(f64) -> TriMesh>); 3] = [
        (0.0, 1.0, Box::new(|r| meshgen::catenoid_slice(r, 1.0, 128, (64.0 * r) as usize).unwrap())),
        (0.0, -1.5, Box::new(|r| meshgen::sphere_zone(r, (1.0 / r).asin(), PI - (1.0 / r).asin(), 128).unwrap())),
        (0.0, -0.5, Box::new(|r| meshgen::planar_annulus(1.0 - 1.0 / r, 1.0 + 1.0 / r, 256, 16).unwrap())),
    ];
    for (c0, b, build) in sequences {
        let p = unit_params(1.0, c0, b);
        let c = lower_bound(&p, Topology::Annulus).unwrap();
        assert_eq!(c.attained, Attainment::InfimumOnly);
        let bound = c.bound.unwrap();
        let energies: Vec<f64> = [2.0, 4.0, 8.0, 16.0].iter().map(|&r| evaluate_energy(&build(r), &p).unwrap().total).collect();
        for w in energies.windows(2) {
            assert!(w[1] < w[0], "b {b}: {energies:?}");
        }
        assert!(energies.iter().all(|&e| e >= bound - 1e-2));
        assert!(close(energies[3], bound, 1e-2), "b {b}: {energies:?} vs {bound}");
    }
}

/// Sphere minus a cap of boundary radius 1: the infimum for discs with
/// `c₀ = 0` and `a + b < 0` comes from letting the sphere grow.
#[test]
fn large_caps_approach_the_disc_infimum() {
    let p = unit_params(1.0, 0.0, -2.0);
    let c = lower_bound(&p, Topology::Disc).unwrap();
    assert_eq!(c.attained, Attainment::InfimumOnly);
    let bound = c.bound.unwrap();
    let radii = [2.0, 4.0, 8.0, 16.0];
    let energies: Vec<f64> = radii
        .iter()
        .map(|&r: &f64| evaluate_energy(&meshgen::sphere_zone(r, (1.0 / r).asin(), PI, 128).unwrap(), &p).unwrap().total)
        .collect();
    for w in energies.windows(2) {
        assert!(w[1] < w[0], "{energies:?}");
    }
    // exact energy 2π(1 - cos φ₀) along the sequence
    for (&r, &e) in radii.iter().zip(&energies) {
        let exact = 2.0 * PI * (1.0 - (1.0 - 1.0 / (r * r)).sqrt());
        assert!(e >= bound - 1e-2 && (e - exact).abs() < 1e-2 * (1.0 + exact), "R {r}: {e} vs {exact}");
    }
    assert!(energies[3] - bound < 2e-2, "{energies:?} vs {bound}");
}

struct Suite {
    meshes: Vec<(&'static str, TriMesh, CurvatureField, Topology)>,
}

fn suite() -> &'static Suite {
    static SUITE: OnceLock<Suite> = OnceLock::new();
    SUITE.get_or_init(|| Suite {
        meshes: common::suite()
            .into_iter()
            .filter_map(|(name, m)| {
                let t = Topology::of(&m)?;
                let f = curvature_field(&m).unwrap();
                Some((name, m, f, t))
            })
            .collect(),
    })
}

fn params() -> impl Strategy<Value = EnergyParams> {
    (0.2..3.0f64, prop_oneof![Just(0.0), 0.0..2.0f64], -3.0..3.0f64, 0.2..3.0f64, 0.2..3.0f64)
        .prop_map(|(a, c0, b, alpha, beta)| EnergyParams::new(a, c0, b, alpha, beta).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bounds_are_sound_on_the_suite(index in 0usize..64, p in params()) {
        let s = suite();
        let (name, mesh, field, topology) = &s.meshes[index % s.meshes.len()];
        let c = lower_bound(&p, *topology).unwrap();
        prop_assert_eq!(c.bound.is_some(), c.bounded_below);
        if let Some(bound) = c.bound {
            let e = evaluate_with(mesh, field, &p).unwrap().total;
            prop_assert!(e >= bound - 1e-2, "{}: {} < {} ({:?})", name, e, bound, p);
        }
    }

    #[test]
    fn every_cell_is_classified(
        c0 in prop_oneof![Just(0.0), 0.01..3.0f64],
        b in prop_oneof![Just(0.0), -4.0..4.0f64],
        a in 0.1..3.0f64,
        ab in (0.1..3.0f64, 0.1..3.0f64),
        disc in any::<bool>(),
    ) {
        let p = EnergyParams::new(a, c0, b, ab.0, ab.1).unwrap();
        let topology = if disc { Topology::Disc } else { Topology::Annulus };
        let c = lower_bound(&p, topology).unwrap();
        prop_assert!(!c.case_label.is_empty());
        prop_assert_eq!(c.bound.is_some(), c.bounded_below);
        prop_assert_eq!(c.attained == Attainment::Unbounded, !c.bounded_below);
        if p.e_underline() < 0.0 && c0 > 0.0 {
            prop_assert!(!c.bounded_below);
        }
    }
}
