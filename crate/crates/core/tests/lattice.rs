use anderson_thermo::disorder::{sample_potential, translate_realization, DisorderSpec};
use anderson_thermo::lattice::{box_distance, make_cube_sequence, CubeSequenceParams, LatticeBox, Region};
use anderson_thermo::oneparticle::{assemble_one_body, diagonalize};
use proptest::prelude::*;

fn lattice_box() -> impl Strategy<Value = LatticeBox> {
    (1usize..=3).prop_flat_map(|d| {
        (
            prop::collection::vec(-20i64..20, d),
            prop::collection::vec(1usize..=7, d),
        )
            .prop_map(|(c, s)| LatticeBox::new(c, s).unwrap())
    })
}

fn sequence_params() -> impl Strategy<Value = CubeSequenceParams> {
    (1usize..=2, 0.05f64..0.95, 0.0f64..6.0, 1.0f64..3.0).prop_filter_map(
        "valid parameters",
        |(d, t, extra, r0)| {
            let decay = d as f64 + 2.0;
            let lo = 2f64.powf(d as f64 / decay);
            let mut p = CubeSequenceParams {
                dimension: d,
                theta: lo + t * (2.0 - lo),
                base_side: 0.0,
                range: r0,
                slack: 4.0,
                decay,
            };
            p.base_side = p.gap_scale() + 1.0 + extra;
            p.validate().ok().map(|_| p)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_is_an_isometry(b in lattice_box(), seed in 0u64..1000) {
        let d = b.dimension();
        let gamma: Vec<i64> = (0..d).map(|k| ((seed as i64 * 7 + k as i64 * 13) % 31) - 15).collect();
        let moved = b.translate(&gamma).unwrap();
        prop_assert_eq!(moved.site_count(), b.site_count());
        prop_assert_eq!(moved.sides(), b.sides());
        prop_assert!((moved.diameter() - b.diameter()).abs() < 1e-12);
        let other = LatticeBox::cube(d, 40, 2).unwrap();
        let before = box_distance(&b, &other).unwrap();
        let after = box_distance(&moved, &other.translate(&gamma).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn distance_matches_brute_force(a in lattice_box(), shift in prop::collection::vec(-12i64..12, 3)) {
        let d = a.dimension();
        let b = a.translate(&shift[..d]).unwrap();
        let brute = a
            .sites()
            .iter()
            .flat_map(|x| b.sites().into_iter().map(move |y| anderson_thermo::lattice::dist(x, &y)))
            .fold(f64::INFINITY, f64::min);
        prop_assert!((box_distance(&a, &b).unwrap() - brute).abs() < 1e-12);
        prop_assert_eq!(a.is_disjoint(&b), brute > 0.0);
    }

    #[test]
    fn interior_sites_are_deep(b in lattice_box(), margin in 0.0f64..3.0) {
        match b.interior(margin) {
            Some(inner) => {
                prop_assert!(inner.is_subset_of(&b));
                for x in b.sites() {
                    prop_assert_eq!(inner.contains(&x), (b.depth(&x) as f64) > margin);
                }
            }
            None => prop_assert!(b.sites().iter().all(|x| (b.depth(x) as f64) <= margin)),
        }
    }

    #[test]
    fn cube_sequence_invariants(p in sequence_params()) {
        let fam = make_cube_sequence(&p, 3).unwrap();
        let d = p.dimension;
        for n in 0..3u32 {
            let lvl = fam.level(n).unwrap();
            let next = fam.level(n + 1).unwrap();
            prop_assert_eq!(lvl.side % 2, 0);
            let gap = lvl.gap.unwrap();
            prop_assert_eq!(gap, next.side - 2 * lvl.side);
            prop_assert!(gap as f64 >= p.range);
            let subs = fam.translates(n).unwrap();
            prop_assert_eq!(subs.len(), 1 << d);
            for (i, a) in subs.iter().enumerate() {
                prop_assert!(a.is_subset_of(&next.cube));
                for b in &subs[i + 1..] {
                    prop_assert!(box_distance(a, b).unwrap() >= gap as f64);
                }
            }
            let covered: usize = subs.iter().map(LatticeBox::site_count).sum();
            prop_assert!(covered <= next.cube.site_count());
        }
        prop_assert!(fam.level(3).unwrap().placements.is_empty());
    }

    #[test]
    fn translated_spectra_are_stationary(seed in 0u64..500, g in -30i64..30) {
        // a translate of ω on Λ is ω on Λ + γ
        let spec = DisorderSpec::Uniform { low: 0.0, high: 2.0 };
        let b = LatticeBox::interval(0, 7).unwrap();
        let r = Region::from_box(&b);
        let shifted = Region::from_box(&b.translate(&[g]).unwrap());
        let f = sample_potential(&spec, &r, seed, 3).unwrap();
        let moved = translate_realization(&f, &[g]).unwrap();
        let direct = sample_potential(&spec, &shifted, seed, 3).unwrap();
        prop_assert_eq!(moved.values(), direct.values());
        let a = diagonalize(&assemble_one_body(&r, &moved).unwrap()).unwrap();
        let c = diagonalize(&assemble_one_body(&shifted, &direct).unwrap()).unwrap();
        prop_assert_eq!(a.values(), c.values());
    }
}

#[test]
fn invalid_sequence_parameters_name_the_constraint() {
    let base = CubeSequenceParams {
        dimension: 1,
        theta: 1.5,
        base_side: 40.0,
        range: 1.0,
        slack: 4.0,
        decay: 3.0,
    };
    assert!(base.validate().is_ok());
    let low = CubeSequenceParams { theta: 1.1, ..base.clone() };
    assert!(low.validate().unwrap_err().to_string().contains('θ'));
    let high = CubeSequenceParams { theta: 2.0, ..base.clone() };
    assert!(high.validate().unwrap_err().to_string().contains('θ'));
    let decay = CubeSequenceParams { decay: 1.0, ..base.clone() };
    assert!(decay.validate().unwrap_err().to_string().contains('λ'));
    let small = CubeSequenceParams { base_side: 5.0, ..base };
    assert!(small.validate().unwrap_err().to_string().contains("L̃"));
}
