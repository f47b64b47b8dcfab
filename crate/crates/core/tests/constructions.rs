use anderson_thermo::constructions::{
    build_test_function, check_subadditivity, check_subadditivity_multi, tuple_value, verify_energy_bound,
    SplitSetup,
};
use anderson_thermo::disorder::{sample_potential, DisorderSpec};
use anderson_thermo::lattice::{LatticeBox, Region};
use anderson_thermo::manybody::{
    assemble_many_body, enumerate_basis, many_body_eigenpairs, InteractionKind, InteractionSpec, Statistics,
};
use proptest::prelude::*;

fn uniform() -> DisorderSpec {
    DisorderSpec::Uniform { low: 0.0, high: 1.0 }
}

fn boxes() -> (LatticeBox, LatticeBox) {
    (
        LatticeBox::interval(0, 3).unwrap(),
        LatticeBox::interval(7, 10).unwrap(),
    )
}

fn all_tuples(sites: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..sites).map(move |s| {
                    let mut u = t.clone();
                    u.push(s);
                    u
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn zeta_has_the_sector_symmetry(
        n1 in 1usize..=2,
        n2 in 1usize..=2,
        stats in prop_oneof![Just(Statistics::Bose), Just(Statistics::Fermi)],
        seed in 0u64..10_000,
    ) {
        let (a, b) = boxes();
        let (ra, rb) = (Region::from_box(&a), Region::from_box(&b));
        let joint = Region::union(&[a, b]).unwrap();
        let b1 = enumerate_basis(&ra, n1, stats, None).unwrap();
        let b2 = enumerate_basis(&rb, n2, stats, None).unwrap();
        let bj = enumerate_basis(&joint, n1 + n2, stats, None).unwrap();
        let noise = |k: usize, salt: u64| (((k as u64 + 1) * 2654435761 ^ (seed + salt)) % 1000) as f64 / 500.0 - 1.0;
        let phi1: Vec<f64> = (0..b1.len()).map(|k| noise(k, 1)).collect();
        let phi2: Vec<f64> = (0..b2.len()).map(|k| noise(k, 2)).collect();
        prop_assume!(phi1.iter().any(|v| *v != 0.0) && phi2.iter().any(|v| *v != 0.0));
        let z = build_test_function(&phi1, &b1, &phi2, &b2, &bj).unwrap();
        prop_assert!((z.norm_sq - z.predicted_norm_sq).abs() <= 1e-10 * z.predicted_norm_sq);

        let n = n1 + n2;
        let sign = if stats == Statistics::Fermi { -1.0 } else { 1.0 };
        for t in all_tuples(joint.len() as u32, n) {
            let v = tuple_value(&bj, &z.coefficients, &t);
            for i in 0..n {
                for j in i + 1..n {
                    let mut s = t.clone();
                    s.swap(i, j);
                    let w = tuple_value(&bj, &z.coefficients, &s);
                    prop_assert!((w - sign * v).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn random_inputs_respect_the_bound(seed in 0u64..10_000, stats in prop_oneof![Just(Statistics::Boltzmann), Just(Statistics::Bose), Just(Statistics::Fermi)]) {
        // any φ_j, with E_j their own Rayleigh quotients
        let (a, b) = boxes();
        let (ra, rb) = (Region::from_box(&a), Region::from_box(&b));
        let joint = Region::union(&[a, b]).unwrap();
        let u = InteractionSpec::tempered(1.0, 2.0, 1.0);
        let field = sample_potential(&uniform(), &joint, seed, 0).unwrap();
        let b1 = enumerate_basis(&ra, 1, stats, None).unwrap();
        let b2 = enumerate_basis(&rb, 1, stats, None).unwrap();
        let bj = enumerate_basis(&joint, 2, stats, None).unwrap();
        let op1 = assemble_many_body(&b1, &field.on_region(&ra).unwrap(), &u).unwrap();
        let op2 = assemble_many_body(&b2, &field.on_region(&rb).unwrap(), &u).unwrap();
        let p1 = many_body_eigenpairs(&op1).unwrap();
        let p2 = many_body_eigenpairs(&op2).unwrap();
        // mix the two lowest states of each box
        let mix = |p: &anderson_thermo::eigen::EigenPairs| -> Vec<f64> {
            let w = (seed % 7) as f64 / 7.0;
            (0..p.vectors.nrows()).map(|r| p.vectors[(r, 0)] + w * p.vectors[(r, 1)]).collect()
        };
        let (phi1, phi2) = (mix(&p1), mix(&p2));
        let e1 = anderson_thermo::manybody::rayleigh_quotient(&op1, &phi1).unwrap();
        let e2 = anderson_thermo::manybody::rayleigh_quotient(&op2, &phi2).unwrap();
        let z = build_test_function(&phi1, &b1, &phi2, &b2, &bj).unwrap();
        let op = assemble_many_body(&bj, &field, &u).unwrap();
        let report = verify_energy_bound(&z, &op, e1, e2, &u, 4.0).unwrap();
        prop_assert!(report.pass, "{:?}", report);
    }
}

#[test]
fn free_bound_is_tight_for_eigenvectors() {
    let (a, b) = boxes();
    let (ra, rb) = (Region::from_box(&a), Region::from_box(&b));
    let joint = Region::union(&[a, b]).unwrap();
    let field = sample_potential(&uniform(), &joint, 9, 4).unwrap();
    let u = InteractionSpec::none();
    for stats in Statistics::ALL {
        let b1 = enumerate_basis(&ra, 2, stats, None).unwrap();
        let b2 = enumerate_basis(&rb, 1, stats, None).unwrap();
        let bj = enumerate_basis(&joint, 3, stats, None).unwrap();
        let p1 = many_body_eigenpairs(&assemble_many_body(&b1, &field.on_region(&ra).unwrap(), &u).unwrap()).unwrap();
        let p2 = many_body_eigenpairs(&assemble_many_body(&b2, &field.on_region(&rb).unwrap(), &u).unwrap()).unwrap();
        let phi1: Vec<f64> = p1.vectors.column(1).iter().copied().collect();
        let phi2: Vec<f64> = p2.vectors.column(0).iter().copied().collect();
        let z = build_test_function(&phi1, &b1, &phi2, &b2, &bj).unwrap();
        let op = assemble_many_body(&bj, &field, &u).unwrap();
        let r = verify_energy_bound(&z, &op, p1.spectrum.values()[1], p2.spectrum.values()[0], &u, 3.0).unwrap();
        assert!(r.margin.abs() < 1e-10, "{stats}: {r:?}");
    }
}

#[test]
fn bound_rejects_distance_below_range() {
    let (a, b) = boxes();
    let (ra, rb) = (Region::from_box(&a), Region::from_box(&b));
    let joint = Region::union(&[a, b]).unwrap();
    let field = sample_potential(&uniform(), &joint, 1, 0).unwrap();
    let u = InteractionSpec::tempered(1.0, 2.0, 2.0);
    let b1 = enumerate_basis(&ra, 1, Statistics::Fermi, None).unwrap();
    let b2 = enumerate_basis(&rb, 1, Statistics::Fermi, None).unwrap();
    let bj = enumerate_basis(&joint, 2, Statistics::Fermi, None).unwrap();
    let z = build_test_function(&[1.0, 0.0, 0.0, 0.0], &b1, &[0.0, 1.0, 0.0, 0.0], &b2, &bj).unwrap();
    let op = assemble_many_body(&bj, &field, &u).unwrap();
    assert!(verify_energy_bound(&z, &op, 0.0, 0.0, &u, 1.5).is_err());
    // r beyond the actual separation (4) is a geometry error
    assert!(verify_energy_bound(&z, &op, 0.0, 0.0, &u, 5.0).is_err());
}

#[test]
fn free_subadditivity_at_zero_entropy() {
    let (first, second) = (
        LatticeBox::interval(0, 4).unwrap(),
        LatticeBox::interval(8, 12).unwrap(),
    );
    for statistics in Statistics::ALL {
        let setup = SplitSetup {
            first: first.clone(),
            second: second.clone(),
            n1: 2,
            n2: 1,
            s1: 0.0,
            s2: 0.0,
            statistics,
        };
        for t in check_subadditivity(&uniform(), &InteractionSpec::none(), &setup, 3, 20).unwrap() {
            assert!(t.all_pass(), "{statistics} {}", t.name);
        }
    }
}

#[test]
fn yukawa_subadditivity() {
    let u = InteractionSpec::new(InteractionKind::Yukawa {
        charge: 1.0,
        screening: 1.5,
    });
    let setup = SplitSetup {
        first: LatticeBox::interval(0, 5).unwrap(),
        second: LatticeBox::interval(9, 14).unwrap(),
        n1: 1,
        n2: 1,
        s1: 2f64.ln(),
        s2: 0.0,
        statistics: Statistics::Fermi,
    };
    for t in check_subadditivity(&uniform(), &u, &setup, 5, 30).unwrap() {
        assert!(t.all_pass(), "{}", t.name);
    }
}

#[test]
fn three_group_energy_inequality() {
    let boxes = [
        LatticeBox::interval(0, 2).unwrap(),
        LatticeBox::interval(6, 8).unwrap(),
        LatticeBox::interval(12, 14).unwrap(),
    ];
    let u = InteractionSpec::tempered(1.0, 2.0, 1.0);
    for stats in Statistics::ALL {
        let t = check_subadditivity_multi(&uniform(), &u, &boxes, &[1, 1, 1], &[0.0, 0.0, 0.0], stats, 8, 20).unwrap();
        assert!(t.all_pass(), "{stats}: min margin {}", t.min_margin());
        assert_eq!(t.rows.len(), 20);
    }
}

#[test]
fn non_log_integer_entropy_is_rejected() {
    let setup = SplitSetup {
        first: LatticeBox::interval(0, 3).unwrap(),
        second: LatticeBox::interval(7, 10).unwrap(),
        n1: 1,
        n2: 1,
        s1: 0.5,
        s2: 0.0,
        statistics: Statistics::Fermi,
    };
    assert!(check_subadditivity(&uniform(), &InteractionSpec::none(), &setup, 1, 1).is_err());
}
