use anderson_thermo::constructions::{check_subadditivity, sector_spectrum, testfn_check, CheckTable, SplitSetup};
use anderson_thermo::disorder::sample_potential;
use anderson_thermo::exec;
use anderson_thermo::lattice::Region;
use anderson_thermo::oneparticle::{assemble_one_body, diagonalize, empirical_ids, energy_grid, spectral_bounds};
use anderson_thermo::thermo::{
    boltzmann_limit_check, fermion_density_report, hardcore_packing, run_cube_sequence, weyl_bound_check,
    wegner_scaling_check, ThermoParams,
};
use serde_json::{json, Value};

use crate::config::{
    BoltzmannParams, CubeSeqParams, Experiment, FermionDensityParams, IdsParams, PackingParams, RunConfig,
    SpectrumParams, SplitParams, WegnerParams, WeylParams,
};
use crate::output::{flag, int, num, Table};
use crate::CliError;

pub struct Outcome {
    pub results: Value,
    pub tables: Vec<Table>,
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    match config.experiment {
        Experiment::Spectrum => spectrum(config),
        Experiment::Ids => ids(config),
        Experiment::BoltzmannLimit => boltzmann_limit(config),
        Experiment::FermionDensity => fermion_density(config),
        Experiment::WeylCheck => weyl(config),
        Experiment::WegnerCheck => wegner(config),
        Experiment::SubaddCheck => subadd(config),
        Experiment::TestfnCheck => testfn(config),
        Experiment::CubeSeq => cube_seq(config),
        Experiment::HardcorePacking => packing(config),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn check_table(t: &CheckTable) -> Table {
    let mut out = Table::new(&t.name, &["realization", "lhs", "rhs", "margin", "pass"]);
    for r in &t.rows {
        out.push(vec![int(r.seed_index), num(r.lhs), num(r.rhs), num(r.margin), flag(r.pass)]);
    }
    out
}

fn check_summary(t: &CheckTable) -> Value {
    json!({
        "name": t.name,
        "passed": t.passed(),
        "total": t.rows.len(),
        "pass_rate": t.pass_rate(),
        "min_margin": t.min_margin(),
    })
}

fn spectrum(c: &RunConfig) -> Result<Outcome, CliError> {
    let p: SpectrumParams = c.params()?;
    let spec = c.disorder()?;
    let interaction = c.interaction();
    let statistics = if p.particles > 1 {
        Some(c.statistics()?)
    } else {
        c.statistics
    };
    let region = Region::from_box(&p.region);
    let spectra = exec::try_map_indexed(c.realizations, |m| {
        let field = sample_potential(spec, &region, c.seed, m as u64)?;
        match statistics {
            Some(s) if p.particles > 1 => sector_spectrum(&region, p.particles, s, &field, &interaction),
            _ => diagonalize(&assemble_one_body(&region, &field)?),
        }
    })?;
    let mut table = Table::new("spectrum", &["realization", "level", "energy"]);
    for (m, s) in spectra.iter().enumerate() {
        let keep = p.levels.unwrap_or(s.len()).min(s.len());
        for (k, &e) in s.values()[..keep].iter().enumerate() {
            table.push(vec![int(m as u64), int(k as u64 + 1), num(e)]);
        }
    }
    let ground: Vec<f64> = spectra.iter().filter_map(|s| s.min()).collect();
    Ok(Outcome {
        results: json!({
            "sites": region.len(),
            "particles": p.particles,
            "dimension": spectra.first().map(|s| s.len()),
            "ground_mean": ground.iter().sum::<f64>() / ground.len() as f64,
            "max_residual": spectra.iter().map(|s| s.residual()).fold(0.0, f64::max),
        }),
        tables: vec![table],
    })
}

fn ids(c: &RunConfig) -> Result<Outcome, CliError> {
    let p: IdsParams = c.params()?;
    let spec = c.disorder()?;
    let grid = match &p.grid {
        Some(g) => energy_grid(g.lo, g.hi, g.points)?,
        None => {
            let (lo, hi) = spectral_bounds(spec, p.region.dimension());
            energy_grid(lo, hi, 400)?
        }
    };
    let ids = empirical_ids(spec, &p.region, &grid, c.realizations, c.seed)?;
    let mut table = Table::new("ids", &["energy", "ids"]);
    for (e, v) in ids.grid.iter().zip(&ids.values) {
        table.push(vec![num(*e), num(*v)]);
    }
    Ok(Outcome {
        results: json!({
            "sites": ids.site_count(),
            "sides": ids.side_label(),
            "grid_points": ids.grid.len(),
        }),
        tables: vec![table],
    })
}

fn boltzmann_limit(c: &RunConfig) -> Result<Outcome, CliError> {
    let p: BoltzmannParams = c.params()?;
    let report = boltzmann_limit_check(
        c.disorder()?,
        &c.interaction(),
        &p.sides,
        p.particles,
        p.entropy,
        c.realizations,
        c.seed,
    )?;
    let mut means = Table::new("per_particle", &["side", "mean", "variance", "se_mean"]);
    for (side, s) in report.sides.iter().zip(&report.per_particle) {
        means.push(vec![int(*side as u64), num(s.mean), num(s.variance), num(s.se_mean)]);
    }
    let mut results = to_value(&report);
    results["subadditivity"] = check_summary(&report.subadditivity);
    let mut sub = check_table(&report.subadditivity);
    sub.name = "subadditivity".into();
    Ok(Outcome {
        results,
        tables: vec![means, sub],
    })
}

fn fermion_density(c: &RunConfig) -> Result<Outcome, CliError> {
    let p: FermionDensityParams = c.params()?;
    let report = fermion_density_report(
        c.disorder()?,
        &p.region,
        p.density,
        p.grid_points,
        c.realizations,
        c.seed,
    )?;
    let mut table = Table::new("ids", &["energy", "ids"]);
    for (e, v) in report.ids.grid.iter().zip(&report.ids.values) {
        table.push(vec![num(*e), num(*v)]);
    }
    Ok(Outcome {
        results: to_value(&report),
        tables: vec![table],
    })
}

fn weyl(c: &RunConfig) -> Result<Outcome, CliError> {
    let p: WeylParams = c.params()?;
    let rows = weyl_bound_check(c.disorder()?, &p.region, &p.densities, c.realizations, c.seed)?;
    let mut table = Table::new("weyl", &["density", "realization", "lhs", "rhs", "margin", "pass"]);
    let mut summary = Vec::new();
    for row in &rows {
        for r in &row.table.rows {
            table.push(vec![
                num(row.density),
                int(r.seed_index),
                num(r.lhs),
                num(r.rhs),
                num(r.margin),
                flag(r.pass),
            ]);
        }
        summary.push(json!({
            "density": row.density,
            "particles": row.particles,
            "free_value": row.free_value,
            "beta": row.beta,
            "check": check_summary(&row.table),
        }));
    }
    Ok(Outcome {
        results: json!({ "rows": summary, "all_pass": rows.iter().all(|r| r.table.all_pass()) }),
        tables: vec![table],
    })
}

fn wegner(c: &RunConfig) -> Result<Outcome, CliError> {
    let p: WegnerParams = c.params()?;
    let report = wegner_scaling_check(c.disorder()?, &p.boxes, &p.intervals, c.realizations, c.seed)?;
    let mut table = Table::new("wegner", &["sites", "a", "b", "mean", "se_mean", "ratio"]);
    for cell in &report.cells {
        table.push(vec![
            int(cell.sites as u64),
            num(cell.interval.0),
            num(cell.interval.1),
            num(cell.estimate.mean),
            num(cell.estimate.se_mean),
            num(cell.ratio),
        ]);
    }
    Ok(Outcome {
        results: to_value(&report),
        tables: vec![table],
    })
}

fn split(c: &RunConfig) -> Result<SplitSetup, CliError> {
    let p: SplitParams = c.params()?;
    Ok(SplitSetup {
        first: p.first,
        second: p.second,
        n1: p.n1,
        n2: p.n2,
        s1: p.s1,
        s2: p.s2,
        statistics: c.statistics()?,
    })
}

fn subadd(c: &RunConfig) -> Result<Outcome, CliError> {
    let setup = split(c)?;
    let tables = check_subadditivity(c.disorder()?, &c.interaction(), &setup, c.seed, c.realizations)?;
    Ok(Outcome {
        results: json!({
            "checks": tables.iter().map(check_summary).collect::<Vec<_>>(),
            "all_pass": tables.iter().all(CheckTable::all_pass),
        }),
        tables: tables.iter().map(check_table).collect(),
    })
}

fn testfn(c: &RunConfig) -> Result<Outcome, CliError> {
    let setup = split(c)?;
    let rows = testfn_check(c.disorder()?, &c.interaction(), &setup, c.seed, c.realizations)?;
    let mut table = Table::new(
        "testfn",
        &["realization", "quotient", "bound", "margin", "pass", "norm_sq", "predicted_norm_sq"],
    );
    for r in &rows {
        table.push(vec![
            int(r.seed_index),
            num(r.quotient),
            num(r.bound),
            num(r.margin),
            flag(r.pass),
            num(r.norm_sq),
            num(r.predicted_norm_sq),
        ]);
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    Ok(Outcome {
        results: json!({
            "passed": passed,
            "total": rows.len(),
            "all_pass": passed == rows.len(),
            "min_margin": rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min),
            "max_norm_error": rows.iter().map(|r| r.norm_error()).fold(0.0, f64::max),
        }),
        tables: vec![table],
    })
}

fn cube_seq(c: &RunConfig) -> Result<Outcome, CliError> {
    let p: CubeSeqParams = c.params()?;
    let params = ThermoParams {
        density: p.density,
        entropy_density: p.entropy_density,
        cube: p.cube,
        max_level: p.max_level,
        min_level: p.min_level,
        realizations: c.realizations,
        seed: c.seed,
        sector_cap: p.sector_cap,
    };
    params
        .validate()
        .map_err(|e| CliError::Config(format!("params: {e}")))?;
    let diag = run_cube_sequence(&params, c.disorder()?, &c.interaction(), c.statistics()?)?;
    let mut levels = Table::new(
        "levels",
        &[
            "level", "side", "sites", "particles", "entropy", "mean", "variance", "se_mean", "se_variance",
            "correction",
        ],
    );
    let mut samples = Table::new("samples", &["level", "realization", "x"]);
    for l in &diag.levels {
        levels.push(vec![
            int(l.level),
            int(l.side),
            int(l.sites as u64),
            int(l.particles as u64),
            num(l.entropy),
            num(l.stats.mean),
            num(l.stats.variance),
            num(l.stats.se_mean),
            num(l.stats.se_variance),
            l.correction.map(num).unwrap_or_default(),
        ]);
        for (m, x) in l.samples.iter().enumerate() {
            samples.push(vec![int(l.level), int(m as u64), num(*x)]);
        }
    }
    let mut results = to_value(&diag);
    if let Some(levels) = results.get_mut("levels").and_then(Value::as_array_mut) {
        for l in levels {
            if let Some(obj) = l.as_object_mut() {
                obj.remove("samples");
            }
        }
    }
    Ok(Outcome {
        results,
        tables: vec![levels, samples],
    })
}

fn packing(c: &RunConfig) -> Result<Outcome, CliError> {
    let p: PackingParams = c.params()?;
    let rows = hardcore_packing(&p.sides, p.radius, p.enumerate_up_to)?;
    let mut table = Table::new("packing", &["side", "max_particles", "density", "enumerated"]);
    for r in &rows {
        table.push(vec![
            int(r.side as u64),
            int(r.max_particles as u64),
            num(r.density),
            r.enumerated.map(flag).unwrap_or_default(),
        ]);
    }
    Ok(Outcome {
        results: json!({ "radius": p.radius, "rows": to_value(&rows) }),
        tables: vec![table],
    })
}
