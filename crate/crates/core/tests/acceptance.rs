//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use anderson_thermo::constructions::{check_subadditivity, testfn_check, SplitSetup};
use anderson_thermo::disorder::{sample_potential, translate_realization, DisorderSpec};
use anderson_thermo::lattice::{CubeSequenceParams, LatticeBox, Region};
use anderson_thermo::manybody::{
    assemble_many_body, energy_at_entropy, entropy, enumerate_basis, many_body_spectrum, sector_dimension,
    InteractionKind, InteractionSpec, Statistics,
};
use anderson_thermo::oneparticle::{assemble_one_body, diagonalize};
use anderson_thermo::thermo::{
    boltzmann_limit_check, fermion_density_report, hardcore_packing, run_cube_sequence, wegner_scaling_check,
    weyl_bound_check, ThermoParams,
};

const SEED: u64 = 20_240_601;

fn uniform() -> DisorderSpec {
    DisorderSpec::Uniform { low: 0.0, high: 1.0 }
}

fn interval(lo: i64, hi: i64) -> LatticeBox {
    LatticeBox::interval(lo, hi).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn fermion_energy_density() -> Outcome {
    let exact = 2.0 * (PI - 2.0) / PI;
    let t = Instant::now();
    let free = fermion_density_report(&DisorderSpec::free(), &interval(0, 1999), 0.5, 400, 1, SEED).unwrap();
    let t_free = t.elapsed();
    let t = Instant::now();
    let dis = fermion_density_report(&uniform(), &interval(0, 499), 0.5, 400, 50, SEED).unwrap();
    let t_dis = t.elapsed();
    let rel = |v: f64| (v - exact).abs() / exact;
    let free_ok = rel(free.formula) < 0.01 && rel(free.direct.mean) < 0.01 && t_free < Duration::from_secs(60);
    let dis_ok = dis.relative_gap < 0.03 && t_dis < Duration::from_secs(300);
    Outcome {
        pass: free_ok && dis_ok,
        detail: format!(
            "free L=2000: formula {:.6}, direct {:.6} (target {exact:.6}, {:.2?}); uniform L=500 M=50: formula {:.6}, direct {:.6}, gap {:.3}% ({:.2?})",
            free.formula,
            free.direct.mean,
            t_free,
            dis.formula,
            dis.direct.mean,
            100.0 * dis.relative_gap,
            t_dis
        ),
    }
}

fn maxwell_boltzmann() -> Outcome {
    let r = boltzmann_limit_check(&uniform(), &InteractionSpec::none(), &[20, 40, 80, 160], 2, 0.0, 200, SEED).unwrap();
    let means: Vec<String> = r.per_particle.iter().map(|s| format!("{:.4}", s.mean)).collect();
    let last = r.per_particle.last().unwrap().mean;
    let sub = &r.subadditivity;
    Outcome {
        pass: r.strictly_decreasing && last < 0.05 && sub.all_pass(),
        detail: format!(
            "mean E/n over sides 20,40,80,160: [{}]; strictly decreasing: {}; final {:.4} (needs < 0.05); fixed-box subadditivity {}/{}",
            means.join(", "),
            r.strictly_decreasing,
            last,
            sub.passed(),
            sub.rows.len()
        ),
    }
}

fn split(statistics: Statistics) -> SplitSetup {
    SplitSetup {
        first: interval(0, 5),
        second: interval(9, 14),
        n1: 1,
        n2: 1,
        s1: 0.0,
        s2: 0.0,
        statistics,
    }
}

fn test_function_bound() -> Outcome {
    let u = InteractionSpec::tempered(1.0, 2.0, 1.0);
    let mut pass = true;
    let mut parts = Vec::new();
    for stats in Statistics::ALL {
        let rows = testfn_check(&uniform(), &u, &split(stats), SEED, 100).unwrap();
        let ok = rows.iter().filter(|r| r.pass).count();
        let norm_err = rows.iter().map(|r| r.norm_error()).fold(0.0, f64::max);
        let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
        pass &= ok == rows.len() && norm_err <= 1e-10;
        parts.push(format!(
            "{stats} {ok}/{} (min margin {min_margin:.3e}, norm error {norm_err:.1e})",
            rows.len()
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn subadditive_inequalities() -> Outcome {
    let kinds = [
        ("none", InteractionSpec::none()),
        ("tempered", InteractionSpec::tempered(1.0, 2.0, 1.0)),
        (
            "compact",
            InteractionSpec::new(InteractionKind::Compact {
                range: 2.0,
                values: vec![1.0, 0.5],
            }),
        ),
        ("hardcore", InteractionSpec::hard_core(2.0)),
    ];
    let mut total = 0;
    let mut passed = 0;
    let mut failures = Vec::new();
    for (name, u) in &kinds {
        for stats in Statistics::ALL {
            for (s1, s2) in [(0.0, 0.0), (2f64.ln(), 2f64.ln())] {
                let setup = SplitSetup { s1, s2, ..split(stats) };
                let tables = check_subadditivity(&uniform(), u, &setup, SEED, 100).unwrap();
                for t in &tables {
                    total += t.rows.len();
                    passed += t.passed();
                    if !t.all_pass() {
                        failures.push(format!("{name}/{stats}/{}", t.name));
                    }
                }
            }
        }
    }
    Outcome {
        pass: passed == total,
        detail: format!(
            "{passed}/{total} rows over kinds none, tempered, compact, hardcore x 3 statistics x 2 entropy pairs{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failing: {}", failures.join(", "))
            }
        ),
    }
}

fn cube_sequence() -> Outcome {
    let params = ThermoParams {
        density: 0.25,
        entropy_density: 0.0,
        cube: CubeSequenceParams {
            dimension: 1,
            theta: 1.5,
            base_side: 16.0,
            range: 1.0,
            slack: 4.0,
            decay: 2.0,
        },
        max_level: 2,
        min_level: 0,
        realizations: 100,
        seed: SEED,
        sector_cap: 5000,
    };
    let d = run_cube_sequence(&params, &uniform(), &InteractionSpec::none(), Statistics::Fermi).unwrap();
    let levels: Vec<String> = d
        .levels
        .iter()
        .map(|l| {
            format!(
                "N={} n={} mean {:.4} var {:.3e}",
                l.level, l.particles, l.stats.mean, l.stats.variance
            )
        })
        .collect();
    Outcome {
        pass: d.levels.len() == 3 && d.nonnegative && d.mean_recursion && d.variance_decay,
        detail: format!(
            "{}; X_N >= 0: {}; mean recursion: {}; variance nonincreasing: {}; pathwise violations {}",
            levels.join(", "),
            d.nonnegative,
            d.mean_recursion,
            d.variance_decay,
            d.pathwise_violations
        ),
    }
}

fn structural_invariants() -> Outcome {
    let mut failures = Vec::new();

    // dimension formulas
    for m in 1..=10i64 {
        let region = Region::from_box(&interval(0, m - 1));
        for n in 1..=3usize {
            for stats in Statistics::ALL {
                let expect = sector_dimension(m as usize, n, stats).unwrap();
                let got = match enumerate_basis(&region, n, stats, None) {
                    Ok(b) => b.len() as u128,
                    Err(_) => 0,
                };
                if got != expect {
                    failures.push(format!("dim {stats} |Λ|={m} n={n}: {got} vs {expect}"));
                }
            }
        }
    }

    // free fermion ground energies
    let free = InteractionSpec::none();
    for seed in 0..10u64 {
        let b = LatticeBox::new(vec![0, 0], vec![3, 3]).unwrap();
        let region = Region::from_box(&b);
        let field = sample_potential(&uniform(), &region, seed, 0).unwrap();
        let one = diagonalize(&assemble_one_body(&region, &field).unwrap()).unwrap();
        for n in 1..=3usize {
            let basis = enumerate_basis(&region, n, Statistics::Fermi, None).unwrap();
            let op = assemble_many_body(&basis, &field, &free).unwrap();
            let g = many_body_spectrum(&op).unwrap().values()[0];
            let sum: f64 = one.values()[..n].iter().sum();
            if (g - sum).abs() > 1e-9 {
                failures.push(format!("fermi ground n={n} seed={seed}: {g} vs {sum}"));
            }
        }
    }

    // Dirichlet monotonicity in many-body sectors, every level
    let u = InteractionSpec::tempered(1.0, 2.0, 1.0);
    let small = Region::from_box(&interval(0, 4));
    let large = Region::from_box(&interval(-1, 6));
    for seed in 0..10u64 {
        let field = sample_potential(&uniform(), &large, SEED, seed).unwrap();
        let fs = field.on_region(&small).unwrap();
        for stats in Statistics::ALL {
            let a = many_body_spectrum(
                &assemble_many_body(&enumerate_basis(&small, 2, stats, None).unwrap(), &fs, &u).unwrap(),
            )
            .unwrap();
            let b = many_body_spectrum(
                &assemble_many_body(&enumerate_basis(&large, 2, stats, None).unwrap(), &field, &u).unwrap(),
            )
            .unwrap();
            for k in 1..=a.len() {
                let s = (k as f64).ln();
                let (ea, eb) = (energy_at_entropy(&a, s).unwrap(), energy_at_entropy(&b, s).unwrap());
                if eb > ea + 1e-9 * (1.0 + ea.abs()) {
                    failures.push(format!("monotonicity {stats} k={k}: {eb} > {ea}"));
                }
            }
        }
    }

    // covariance: translated disorder equals translated coordinates
    let base = Region::from_box(&LatticeBox::new(vec![0, 0], vec![4, 3]).unwrap());
    for gamma in [vec![3i64, -2], vec![-7, 11]] {
        let field = sample_potential(&uniform(), &base, SEED, 3).unwrap();
        let moved = translate_realization(&field, &gamma).unwrap();
        let shifted_region = base.translate(&gamma).unwrap();
        let direct = field.on_region(&shifted_region).unwrap();
        let h_moved = assemble_one_body(&base, &moved).unwrap().to_dense();
        let h_direct = assemble_one_body(&shifted_region, &direct).unwrap().to_dense();
        if h_moved != h_direct {
            failures.push(format!("covariance γ={gamma:?}"));
        }
    }

    // inversion identities
    for seed in 0..10u64 {
        let region = Region::from_box(&interval(0, 5));
        let field = sample_potential(&uniform(), &region, SEED, seed).unwrap();
        for stats in Statistics::ALL {
            let spec = many_body_spectrum(
                &assemble_many_body(&enumerate_basis(&region, 2, stats, None).unwrap(), &field, &u).unwrap(),
            )
            .unwrap();
            for &e in spec.values() {
                if energy_at_entropy(&spec, entropy(&spec, e)).unwrap() != e {
                    failures.push(format!("E(S(E)) = E fails at {e}"));
                }
            }
            for k in 1..=spec.len() {
                let s = (k as f64).ln();
                let e = energy_at_entropy(&spec, s).unwrap();
                if entropy(&spec, e) < s - 1e-12 {
                    failures.push(format!("S(E(S)) ≥ S fails at k={k}"));
                }
            }
        }
    }

    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            "dimension formulas (|Λ| ≤ 10, n ≤ 3), free fermion ground sums, Dirichlet monotonicity, covariance and inversion identities all exact".into()
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
    }
}

fn weyl_bound() -> Outcome {
    let rows = weyl_bound_check(&uniform(), &interval(0, 199), &[0.25, 0.5], 50, SEED).unwrap();
    let pass = rows.iter().all(|r| r.table.all_pass() && r.table.rows.len() == 50);
    let parts: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "ρ={} {}/{} (free {:.5}, β {:.4}, min margin {:.4})",
                r.density,
                r.table.passed(),
                r.table.rows.len(),
                r.free_value,
                r.beta,
                r.table.min_margin()
            )
        })
        .collect();
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn wegner_scaling() -> Outcome {
    let boxes = [interval(0, 49), interval(0, 99), interval(0, 199)];
    let r = wegner_scaling_check(&uniform(), &boxes, &[(1.0, 1.5)], 200, SEED).unwrap();
    let ratios: Vec<String> = r.cells.iter().map(|c| format!("{:.4}", c.ratio)).collect();
    Outcome {
        pass: r.variation[0] < 0.25,
        detail: format!(
            "I = [1.0, 1.5], ratios over sides 50,100,200: [{}]; variation {:.2}% (needs < 25%)",
            ratios.join(", "),
            100.0 * r.variation[0]
        ),
    }
}

fn hard_core_density() -> Outcome {
    let rows = hardcore_packing(&[7, 15, 31, 63], 2.0, 15).unwrap();
    let pass = rows
        .iter()
        .all(|r| (r.density - 0.5).abs() <= 1.0 / r.side as f64 && r.enumerated != Some(false));
    let parts: Vec<String> = rows
        .iter()
        .map(|r| format!("side {}: n_max {} (ρ {:.4})", r.side, r.max_particles, r.density))
        .collect();
    Outcome {
        pass,
        detail: parts.join(", "),
    }
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "fermionic energy density", fermion_energy_density),
        (2, "Maxwell-Boltzmann triviality", maxwell_boltzmann),
        (3, "test-function energy bound", test_function_bound),
        (4, "subadditive inequalities", subadditive_inequalities),
        (5, "cube-sequence recursion", cube_sequence),
        (6, "structural invariants", structural_invariants),
        (7, "Weyl bound", weyl_bound),
        (8, "Wegner scaling", wegner_scaling),
        (9, "hard-core critical density", hard_core_density),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let t = Instant::now();
        let out = run();
        println!(
            "criterion {id} {}: {name}: {} [{:.1?}]",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            t.elapsed()
        );
        if !out.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
