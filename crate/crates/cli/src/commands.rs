use std::fs;
use std::path::{Path, PathBuf};

use rigidlab::asymptotics::{estimate_t_prime, homoclinic_periods, recover_exponent};
use rigidlab::cocycles::{default_tolerance, matching_report, Verdict, MATCH_CSV_HEADER};
use rigidlab::equilibrium::{
    bowen_integral, build_ensemble, pigeonhole_certificate, structural_assignment, Potential,
};
use rigidlab::normal_form::{longitudinal_cocycle_with, CocycleMethod, CocycleOptions};
use rigidlab::verify::{run_criterion, VerifyOptions, CRITERIA};
use rigidlab::{Automorphism64, Flow64, HomoclinicPoint};
use serde_json::{json, Value};

use crate::config::{FieldSpec, ParamSpec, RawConfig, Resolved};
use crate::error::CliError;

pub const COMMANDS: [&str; 8] = [
    "enumerate",
    "spectrum",
    "cocycle",
    "homoclinic",
    "bowen",
    "match",
    "pigeonhole",
    "verify",
];

const ROOF: FieldSpec = FieldSpec {
    name: "roof",
    default: "cos 0 0 1",
    weight: false,
};
const ROOF2: FieldSpec = FieldSpec {
    name: "roof2",
    default: "cos 0 0 1",
    weight: false,
};
const WEIGHT: FieldSpec = FieldSpec {
    name: "weight",
    default: "cos 0 0 1",
    weight: true,
};
const WEIGHT2: FieldSpec = FieldSpec {
    name: "weight2",
    default: "cos 0 0 1",
    weight: true,
};
const TEST: FieldSpec = FieldSpec {
    name: "test",
    default: "cos 1 0 1",
    weight: true,
};

fn schema(command: &str) -> (&'static [FieldSpec], ParamSpec) {
    match command {
        "enumerate" => (&[], &[("k_max", "3")]),
        "spectrum" => (&[ROOF], &[("k_max", "6")]),
        "cocycle" => (
            &[ROOF, WEIGHT],
            &[
                ("k_max", "4"),
                ("method", "both"),
                ("h0", "0.001"),
                ("levels", "3"),
                ("gauge_a", "1"),
                ("gauge_b", "1"),
            ],
        ),
        "homoclinic" => (
            &[ROOF],
            &[("m", "1 0"), ("n_lo", "10"), ("n_hi", "31"), ("fit_lo", "10"), ("fit_hi", "26")],
        ),
        "bowen" => (
            &[ROOF, TEST],
            &[
                ("t_start", "5"),
                ("t_stop", "12"),
                ("t_step", "1"),
                ("delta", "1"),
                ("potential", "zero"),
                ("potential_constant", "0"),
                ("offset", "0"),
            ],
        ),
        "match" => (&[ROOF, WEIGHT, ROOF2, WEIGHT2], &[("k_max", "8"), ("tol", "auto")]),
        "pigeonhole" => (&[], &[("n", "3"), ("choice", "first_max")]),
        "verify" => (&[], &[("long_run", "true"), ("tighten", ""), ("only", "")]),
        _ => unreachable!("command list checked by the argument parser"),
    }
}

/// Output of one command: named files plus the JSON summary.
pub struct Artifacts {
    pub files: Vec<(String, String)>,
    pub summary: Value,
    pub stdout: String,
    pub failed: usize,
}

impl Artifacts {
    fn new(summary: Value) -> Self {
        Self {
            files: Vec::new(),
            summary,
            stdout: String::new(),
            failed: 0,
        }
    }

    fn file(mut self, name: &str, contents: String) -> Self {
        self.files.push((name.to_string(), contents));
        self
    }

    pub fn write(&self, out: &Path, command: &str) -> Result<(), CliError> {
        let io = |path: PathBuf| move |source| CliError::Io {
            path: path.display().to_string(),
            source,
        };
        fs::create_dir_all(out).map_err(io(out.to_path_buf()))?;
        for (name, contents) in &self.files {
            let path = out.join(name);
            fs::write(&path, contents).map_err(io(path.clone()))?;
        }
        let path = out.join(format!("{command}.json"));
        let mut text = serde_json::to_string_pretty(&self.summary).expect("json values serialize");
        text.push('\n');
        fs::write(&path, text).map_err(io(path.clone()))
    }
}

pub fn resolve(command: &str, text: &str) -> Result<Resolved, CliError> {
    let raw = RawConfig::parse(text)?;
    let (fields, params) = schema(command);
    Resolved::resolve(command, &raw, fields, params)
}

pub fn run(cfg: &mut Resolved) -> Result<Artifacts, CliError> {
    match cfg.command.as_str() {
        "enumerate" => enumerate(cfg),
        "spectrum" => spectrum(cfg),
        "cocycle" => cocycle(cfg),
        "homoclinic" => homoclinic(cfg),
        "bowen" => bowen(cfg),
        "match" => matching(cfg),
        "pigeonhole" => pigeonhole(cfg),
        "verify" => verify(cfg),
        other => unreachable!("unknown command {other}"),
    }
}

fn base(cfg: &Resolved) -> Result<Automorphism64, CliError> {
    Ok(Automorphism64::new(cfg.matrix)?)
}

fn flow(cfg: &Resolved, roof: &str) -> Result<Flow64, CliError> {
    Ok(Flow64::new(base(cfg)?, cfg.field(roof))?)
}

fn enumerate(cfg: &Resolved) -> Result<Artifacts, CliError> {
    let k_max = cfg.usize("k_max")?;
    let cat = base(cfg)?.enumerate_periodic_orbits(k_max)?;
    let mut csv = String::from("k,rep_x,rep_y\n");
    let mut counts = Vec::new();
    for k in 1..=k_max {
        let orbits = cat.of_period(k);
        counts.push(orbits.len());
        for o in orbits {
            let p = o.representative();
            csv.push_str(&format!("{k},{},{}\n", p.x_str(), p.y_str()));
        }
    }
    let summary = json!({
        "orbit_count": cat.len(),
        "counts_by_period": counts,
        "config": cfg.echo(),
    });
    Ok(Artifacts::new(summary).file("orbits.csv", csv))
}

fn spectrum(cfg: &Resolved) -> Result<Artifacts, CliError> {
    let k_max = cfg.usize("k_max")?;
    let f = flow(cfg, "roof")?;
    let cat = f.base().enumerate_periodic_orbits(k_max)?;
    let mut csv = String::from("k,rep_x,rep_y,T,chi,mu\n");
    let mut min_period = f64::INFINITY;
    for o in cat.iter() {
        let d = f.orbit_flow_data(o);
        let p = o.representative();
        min_period = min_period.min(d.period);
        csv.push_str(&format!(
            "{},{},{},{:e},{:e},{:e}\n",
            o.prime_period,
            p.x_str(),
            p.y_str(),
            d.period,
            d.exponent,
            d.multiplier
        ));
    }
    let summary = json!({
        "orbit_count": cat.len(),
        "min_period": min_period,
        "config": cfg.echo(),
    });
    Ok(Artifacts::new(summary).file("spectrum.csv", csv))
}

fn cocycle(cfg: &Resolved) -> Result<Artifacts, CliError> {
    let k_max = cfg.usize("k_max")?;
    let methods = match cfg.string("method").as_str() {
        "analytic" => vec![CocycleMethod::Analytic],
        "finite_difference" => vec![CocycleMethod::FiniteDifference],
        "both" => vec![CocycleMethod::Analytic, CocycleMethod::FiniteDifference],
        other => {
            return Err(CliError::Config {
                line: cfg.line("method"),
                message: format!("`method` must be analytic, finite_difference or both, found `{other}`"),
            })
        }
    };
    let opts = CocycleOptions {
        h0: cfg.positive("h0")?,
        levels: cfg.usize("levels")?,
        gauge: (cfg.positive("gauge_a")?, cfg.positive("gauge_b")?),
    };
    let f = flow(cfg, "roof")?;
    let phi = cfg.weight("weight");
    let cat = f.base().enumerate_periodic_orbits(k_max)?;
    let mut csv = String::from("k,rep_x,rep_y,method,K\n");
    let mut max_abs = vec![0.0f64; methods.len()];
    for o in cat.iter() {
        for (j, m) in methods.iter().enumerate() {
            let v = longitudinal_cocycle_with(&f, o, &phi, *m, &opts)?;
            max_abs[j] = max_abs[j].max(v.value.abs());
            csv.push_str(&format!(
                "{},{},{},{},{:e}\n",
                v.k,
                v.representative.x_str(),
                v.representative.y_str(),
                m.name(),
                v.value
            ));
        }
    }
    let max: serde_json::Map<String, Value> = methods
        .iter()
        .zip(&max_abs)
        .map(|(m, v)| (m.name().to_string(), json!(v)))
        .collect();
    let summary = json!({
        "orbit_count": cat.len(),
        "max_abs": max,
        "config": cfg.echo(),
    });
    Ok(Artifacts::new(summary).file("cocycle.csv", csv))
}

fn homoclinic(cfg: &Resolved) -> Result<Artifacts, CliError> {
    let m = cfg.ints("m")?;
    if m.len() != 2 {
        return Err(CliError::Config {
            line: cfg.line("m"),
            message: format!("`m` needs 2 integers, found {}", m.len()),
        });
    }
    let f = flow(cfg, "roof")?;
    let h = HomoclinicPoint::new(f.base(), [m[0], m[1]])?;
    let exp = homoclinic_periods(&f, &h, cfg.usize("n_lo")?, cfg.usize("n_hi")?)?;
    let est = estimate_t_prime(&exp)?;
    let fit = (cfg.usize("fit_lo")?, cfg.usize("fit_hi")?);
    let rec = recover_exponent(&exp, est.t_prime, Some(fit))?;
    let mut csv = String::from("n,log_abs_r\n");
    for r in &exp.rows {
        let res = r.excess - est.t_prime;
        csv.push_str(&format!("{},{:e}\n", r.n, res.abs().ln()));
    }
    let summary = json!({
        "t0": exp.t0,
        "t_prime": est.t_prime,
        "t_prime_uncertainty": est.uncertainty,
        "log_mu_hat": rec.log_mu_hat,
        "k_is_zero": rec.k_is_zero,
        "n_reported": exp.ns(),
        "config": cfg.echo(),
    });
    Ok(Artifacts::new(summary).file("homoclinic.csv", csv))
}

fn bowen(cfg: &Resolved) -> Result<Artifacts, CliError> {
    let delta = cfg.positive("delta")?;
    let (start, stop, step) = (cfg.f64("t_start")?, cfg.f64("t_stop")?, cfg.positive("t_step")?);
    if start < 0.0 || stop < start {
        return Err(CliError::Config {
            line: cfg.line("t_stop").max(cfg.line("t_start")),
            message: format!("need 0 <= t_start <= t_stop, found {start} and {stop}"),
        });
    }
    let potential = match cfg.string("potential").as_str() {
        "zero" => Potential::zero(),
        "neg_log_unstable_jacobian" => Potential::neg_log_unstable_jacobian(),
        "constant" => Potential::constant(cfg.f64("potential_constant")?),
        other => {
            return Err(CliError::Config {
                line: cfg.line("potential"),
                message: format!(
                    "`potential` must be zero, neg_log_unstable_jacobian or constant, found `{other}`"
                ),
            })
        }
    }
    .with_offset(cfg.f64("offset")?);
    let f = flow(cfg, "roof")?;
    let g = cfg.weight("test");
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    let mut csv = String::from("T,value\n");
    let mut windows = Vec::new();
    for i in 0..count {
        let t = start + i as f64 * step;
        let e = build_ensemble(&f, t, delta, potential)?;
        let value = bowen_integral(&e.measure(), &g);
        csv.push_str(&format!("{t},{value:e}\n"));
        windows.push(json!({
            "t": t,
            "delta": delta,
            "k_cap": e.k_cap(),
            "orbit_count": e.orbit_count(),
            "normalization": e.normalization(),
            "value": value,
        }));
    }
    let summary = json!({
        "windows": windows,
        "config": cfg.echo(),
    });
    Ok(Artifacts::new(summary).file("bowen.csv", csv))
}

fn matching(cfg: &mut Resolved) -> Result<Artifacts, CliError> {
    let k_max = cfg.usize("k_max")?;
    let tol = if cfg.string("tol") == "auto" {
        let t = default_tolerance::<f64>(k_max);
        cfg.set("tol", format!("{t:e}"));
        t
    } else {
        cfg.positive("tol")?
    };
    let f1 = flow(cfg, "roof")?;
    let f2 = flow(cfg, "roof2")?;
    let rep = matching_report(&f1, &cfg.weight("weight"), &f2, &cfg.weight("weight2"), k_max, tol)?;
    debug_assert!(rep.to_csv().starts_with(MATCH_CSV_HEADER));
    let summary = json!({
        "verdict": match rep.verdict {
            Verdict::Matched => "matched",
            Verdict::Mismatched => "mismatched",
        },
        "max_gap": rep.max_gap(),
        "max_chi_gap": rep.max_chi_gap(),
        "tol": rep.tol,
        "orbit_count": rep.rows.len(),
        "config": cfg.echo(),
    });
    Ok(Artifacts::new(summary).file("match.csv", rep.to_csv()))
}

fn pigeonhole(cfg: &Resolved) -> Result<Artifacts, CliError> {
    let n = cfg.usize("n")?;
    let choice: fn(&[u8]) -> usize = match cfg.string("choice").as_str() {
        "first" => |_| 1,
        "first_max" => |a| {
            let m = *a.iter().max().expect("nonempty");
            a.iter().position(|&x| x == m).expect("max present") + 1
        },
        "last_max" => |a| {
            let m = *a.iter().max().expect("nonempty");
            a.iter().rposition(|&x| x == m).expect("max present") + 1
        },
        "sum_mod" => |a| a.iter().map(|&x| x as usize).sum::<usize>() % a.len() + 1,
        other => {
            return Err(CliError::Config {
                line: cfg.line("choice"),
                message: format!("`choice` must be first, first_max, last_max or sum_mod, found `{other}`"),
            })
        }
    };
    let c = pigeonhole_certificate(n, structural_assignment(choice))?;
    let summary = json!({
        "n": c.n,
        "alpha": c.alpha,
        "beta": c.beta,
        "index": c.index,
        "image": c.image,
        "domain_size": c.domain_size,
        "range_size": c.range_size,
        "valid": c.is_valid(),
        "config": cfg.echo(),
    });
    Ok(Artifacts::new(summary))
}

fn id_list(cfg: &Resolved, key: &str) -> Result<Vec<usize>, CliError> {
    let ids = cfg.ints(key)?;
    ids.into_iter()
        .map(|i| {
            usize::try_from(i)
                .ok()
                .filter(|i| (1..=CRITERIA).contains(i))
                .ok_or_else(|| CliError::Config {
                    line: cfg.line(key),
                    message: format!("criterion id {i} outside 1..={CRITERIA}"),
                })
        })
        .collect()
}

/// Tolerances of the `tighten` criteria are divided by 100.
fn verify(cfg: &Resolved) -> Result<Artifacts, CliError> {
    let mut opts = VerifyOptions {
        long_run: cfg.bool("long_run")?,
        ..VerifyOptions::default()
    };
    for id in id_list(cfg, "tighten")? {
        opts.tolerance_scale[id - 1] = 0.01;
    }
    let mut only = id_list(cfg, "only")?;
    if only.is_empty() {
        only = (1..=CRITERIA).collect();
    }
    let mut stdout = String::new();
    let mut rows = Vec::new();
    let mut failed = 0;
    for id in only {
        let r = run_criterion(id, &opts);
        stdout.push_str(&format!("{r}\n"));
        failed += usize::from(!r.passed);
        rows.push(json!({
            "id": r.id,
            "name": r.name,
            "passed": r.passed,
            "measured": r.measured,
        }));
    }
    let summary = json!({
        "criteria": rows,
        "all_passed": failed == 0,
        "config": cfg.echo(),
    });
    let mut a = Artifacts::new(summary);
    a.stdout = stdout;
    a.failed = failed;
    Ok(a)
}
