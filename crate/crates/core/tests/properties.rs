use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use tflab::analytic::{disk_eigenvalues, gamma_tail_sandwich};
use tflab::bounds::verify_lemma41;
use tflab::geometry::{kappa_estimate, mollification_defect};
use tflab::operator::{assemble_galerkin, eigen_spectrum, twisted_convolution};
use tflab::stats::{counting, plunge};
use tflab::window::{ambiguity, moment_constant};
use tflab::{Domain, QuadSpec, SampledField, Spectrum, Window};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

/// Convex polygon from sorted angles on an ellipse.
fn convex_polygon() -> impl Strategy<Value = Domain> {
    (prop::collection::vec(0.0..2.0 * PI, 3..9), 0.5..2.0f64, 0.5..2.0f64).prop_filter_map("degenerate", |(mut t, a, b)| {
        t.sort_by(f64::total_cmp);
        t.dedup_by(|x, y| (*x - *y).abs() < 0.05);
        if t.len() < 3 {
            return None;
        }
        Domain::polygon(t.iter().map(|th| [a * th.cos(), b * th.sin()]).collect()).ok()
    })
}

fn any_domain() -> impl Strategy<Value = Domain> {
    prop_oneof![
        (0.1..3.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(r, x, y)| Domain::disk([x, y], r).unwrap()),
        (0.1..3.0f64, 0.1..3.0f64).prop_map(|(w, h)| Domain::rect([0.0, 0.0], [w, h]).unwrap()),
        convex_polygon(),
    ]
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn counting_is_monotone_and_plunge_is_a_difference(
        raw in prop::collection::vec(0.0..=1.0f64, 0..60),
        d1 in 0.001..0.999f64,
        d2 in 0.001..0.999f64,
    ) {
        let n = raw.len();
        let s = Spectrum::from_values(raw.clone(), n).unwrap();
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(counting(&s, lo).unwrap() >= counting(&s, hi).unwrap());
        let e = lo.min(0.499);
        let brute = raw.iter().filter(|&&l| l > e && l <= 1.0 - e).count();
        prop_assert_eq!(plunge(&s, e).unwrap(), brute);
    }

    #[test]
    fn isoperimetric_inequality(d in any_domain()) {
        let p = d.perimeter();
        prop_assert!(p * p >= 4.0 * PI * d.measure() * (1.0 - 1e-12));
    }

    #[test]
    fn lemma41_on_analytic_disks(r in 0.3..4.0f64, delta in 0.001..0.999f64, p in 0.1..=2.0f64) {
        let dom = Domain::disk([0.0, 0.0], r).unwrap();
        let spec = disk_eigenvalues(r, 400).unwrap().to_spectrum();
        let c = verify_lemma41(&spec, &dom, delta, p).unwrap();
        prop_assert!(c.holds, "{:?}", c);
    }

    #[test]
    fn gamma_tail_envelope(r in 0.5..5.0f64, extra in 0usize..200) {
        let k = (PI * r * r - 1.0).ceil() as usize + extra;
        prop_assert!(gamma_tail_sandwich(r, k).unwrap().holds_upper);
    }

    #[test]
    fn disk_eigenvalues_increase_with_radius(r in 0.2..4.0f64, dr in 0.01..1.0f64) {
        let a = disk_eigenvalues(r, 80).unwrap().values;
        let b = disk_eigenvalues(r + dr, 80).unwrap().values;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(x <= y);
        }
    }

    #[test]
    fn ambiguity_magnitude_is_even(m in 0usize..6, x in -3.0..3.0f64, xi in -3.0..3.0f64) {
        let w = Window::hermite(m);
        let a = ambiguity(&w, [x, xi]).unwrap().norm();
        let b = ambiguity(&w, [-x, -xi]).unwrap().norm();
        prop_assert!((a - b).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn galerkin_spectra_lie_in_unit_interval(d in any_domain(), m in 0usize..3) {
        let mat = assemble_galerkin(&Window::hermite(m), &d, 16, &QuadSpec::default(), 1e-8).unwrap();
        let s = eigen_spectrum(&mat).unwrap();
        prop_assert!(s.max_clip() <= 1e-8);
        prop_assert!(s.trace() <= d.measure() + 1e-8);
    }

    #[test]
    fn kappa_refines_downwards_and_is_scale_invariant(d in any_domain(), eta in 0.05..1.0f64, f in 1.5..4.0f64) {
        let k = kappa_estimate(&d, eta, 64, 32).unwrap();
        prop_assert!(k.value <= k.coarse);
        let big = Domain::dilated(d.clone(), f).unwrap();
        let kb = kappa_estimate(&big, eta * f, 64, 32).unwrap();
        prop_assert!((kb.value - k.value).abs() < 1e-9 * k.value.max(1.0));
    }

    #[test]
    fn mollification_defect_bound(w in 0.3..2.0f64, h in 0.3..2.0f64, sigma in 0.05..0.4f64, complement in any::<bool>()) {
        let dom = Domain::rect([0.0, 0.0], [w, h]).unwrap();
        let step = sigma / 6.0;
        let phi = SampledField::centered(9.0 * sigma, step, |p| {
            (-(p[0] * p[0] + p[1] * p[1]) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma)
        });
        let first_moment = sigma * (PI / 2.0).sqrt();
        let defect = mollification_defect(&dom, &phi, complement).unwrap();
        // grid error of the indicator sampling is O(step·perimeter)
        prop_assert!(defect <= dom.perimeter() * (first_moment + step));
    }

    #[test]
    fn moment_constant_is_monotone(m in 0usize..4, s in 0.0..3.0f64, ds in 0.05..2.0f64) {
        let w = Window::hermite(m);
        prop_assert!(moment_constant(&w, s).unwrap() <= moment_constant(&w, s + ds).unwrap() + 1e-10);
    }
}

fn compact_field() -> impl Strategy<Value = SampledField<Complex64>> {
    let n = 15usize;
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
        let vals = v
            .into_iter()
            .enumerate()
            .map(|(i, (re, im))| {
                let (a, b) = (i / n, i % n);
                // zero ring keeps the support inside the grid
                if a < 4 || b < 4 || a >= n - 4 || b >= n - 4 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(re, im)
                }
            })
            .collect();
        SampledField::new([-1.4, -1.4], 0.2, n, n, vals).unwrap()
    })
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn twisted_convolution_is_norm_contractive(f in compact_field(), g in compact_field()) {
        let out = twisted_convolution(&f, &g).unwrap();
        prop_assert!(out.l2_norm() <= f.l2_norm() * g.l2_norm() * (1.0 + 1e-9));
    }
}
