//! The five subcommands. Each writes its artifacts plus `manifest.ini` into the
//! output directory and returns a short JSON summary for stdout.

use std::fs;
use std::path::{Path, PathBuf};

use motzkin_core::converge::{ladders, tv_distance, LadderParams};
use motzkin_core::engine::{endpoint_pgf_both, ExactModel, WeightTable};
use motzkin_core::limit_chains::{chain_fdd_law, initial_law, xi_pmf, ChainSimulator, InitialLawSpec, KernelSpec};
use motzkin_core::model::default_tail_epsilon;
use motzkin_core::rational::{frac, to_f64, to_pq};
use motzkin_core::sampler::{build_backward_table, empirical_fdd, paths_to_binary, paths_to_text, sample_paths};
use motzkin_core::spectral::{certificates, CertConfig, CertReport};
use motzkin_core::{DistTable, ModelSpec};
use serde_json::{json, Value};

use crate::config::{CommandKind, Format, RunConfig};

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Model(motzkin_core::Error),
    Io(String),
    /// Artifacts were written but at least one certificate failed.
    Certificate(Value),
}

impl From<motzkin_core::Error> for RunError {
    fn from(e: motzkin_core::Error) -> Self {
        RunError::Model(e)
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Certificate(_) => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, detail) = match self {
            RunError::Config(m) => ("config", json!(m)),
            RunError::Model(e) => ("model", json!(e.to_string())),
            RunError::Io(m) => ("io", json!(m)),
            RunError::Certificate(v) => ("certificate", v.clone()),
        };
        json!({ "error": { "kind": kind, "detail": detail } })
    }
}

struct Output {
    dir: PathBuf,
    format: Format,
    files: Vec<String>,
}

impl Output {
    fn new(dir: &Path, format: Format) -> Result<Self, RunError> {
        fs::create_dir_all(dir).map_err(|e| RunError::Io(format!("creating {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), format, files: Vec::new() })
    }

    fn bytes(&mut self, name: &str, data: &[u8]) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, data).map_err(|e| RunError::Io(format!("writing {}: {e}", path.display())))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json(&mut self, stem: &str, value: &Value) -> Result<(), RunError> {
        let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
        self.bytes(&format!("{stem}.json"), text.as_bytes())
    }

    /// A law as JSON atoms or as CSV with one column per coordinate.
    fn table(&mut self, stem: &str, columns: &[String], table: &DistTable) -> Result<(), RunError> {
        match self.format {
            Format::Json => self.json(
                stem,
                &json!({ "columns": columns, "atoms": table.to_json(), "tail_mass": to_pq(table.tail_mass()) }),
            ),
            Format::Csv => {
                let mut text = columns.join(",");
                text.push_str(",prob,prob_float\n");
                for (support, p) in table.iter() {
                    for x in support {
                        text.push_str(&format!("{x},"));
                    }
                    text.push_str(&format!("{},{:e}\n", to_pq(p), to_f64(p)));
                }
                self.bytes(&format!("{stem}.csv"), text.as_bytes())
            }
        }
    }
}

fn gammas(coords: &[usize]) -> Vec<String> {
    coords.iter().map(|c| format!("gamma_{c}")).collect()
}

fn model_spec(c: &RunConfig) -> Result<ModelSpec, RunError> {
    Ok(ModelSpec::constant(c.sigma().clone(), c.alpha.clone(), c.beta.clone(), c.length())?)
}

pub fn run(c: &RunConfig) -> Result<Value, RunError> {
    let manifest = c.manifest();
    if RunConfig::from_manifest(&manifest).as_ref() != Ok(c) {
        return Err(RunError::Config("configuration does not survive its manifest round trip".into()));
    }
    let mut out = Output::new(&c.out, c.format)?;
    out.bytes("manifest.ini", manifest.as_bytes())?;
    let summary = match c.command {
        CommandKind::Exact => exact(c, &mut out)?,
        CommandKind::Sample => sample(c, &mut out)?,
        CommandKind::Limit => limit(c, &mut out)?,
        CommandKind::Verify => verify(c, &mut out)?,
        CommandKind::Converge => converge(c, &mut out)?,
    };
    Ok(json!({ "command": c.command.name(), "out": c.out.display().to_string(), "files": out.files, "summary": summary }))
}

fn exact(c: &RunConfig, out: &mut Output) -> Result<Value, RunError> {
    let spec = model_spec(c)?;
    let model = ExactModel::new(spec.clone())?;
    let l = model.length();
    let k = c.k;
    let left: Vec<usize> = (0..=k).collect();
    out.table("left_fdd", &gammas(&left), &model.left_fdd_law(k)?)?;
    let right: Vec<usize> = (0..=k).map(|i| l - i.min(l)).collect();
    out.table("right_fdd", &gammas(&right), &model.right_fdd_law(k, false)?)?;
    let incr: Vec<String> = (1..=k).map(|i| format!("gamma_{}-gamma_{l}", l - i)).collect();
    out.table("right_increments", &incr, &model.right_fdd_law(k, true)?)?;
    out.table("endpoints", &gammas(&[0, l]), &model.endpoint_law()?)?;
    let weights = WeightTable::build(model.weights(), l, model.bound())?;
    out.bytes("weights.csv", weights.to_csv().as_bytes())?;

    let half = frac(1, 2);
    let pgf = endpoint_pgf_both(&spec, &half, &half)?;
    let summary = json!({
        "L": l,
        "K": k,
        "max_start": model.max_start(),
        "height_bound": model.bound(),
        "normalization": to_pq(model.normalization()),
        "tail_mass": to_pq(model.tail_mass()),
        "endpoint_pgf_at_half": { "direct": to_pq(&pgf.direct), "matrix": to_pq(&pgf.matrix) },
    });
    out.json("summary", &summary)?;
    Ok(summary)
}

fn sample(c: &RunConfig, out: &mut Output) -> Result<Value, RunError> {
    if c.samples == 0 {
        return Err(RunError::Config("samples must be >= 1".into()));
    }
    let table = build_backward_table(&model_spec(c)?)?;
    let l = table.length();
    let paths = sample_paths(&table, c.seed, c.samples);
    out.bytes("paths.txt", paths_to_text(&paths).as_bytes())?;
    out.bytes("paths.bin", &paths_to_binary(&paths))?;
    let mut coords: Vec<usize> = (0..=c.k.min(l)).collect();
    if coords.last() != Some(&l) {
        coords.push(l);
    }
    let exact = table.model().coordinate_law(&coords)?;
    let empirical = empirical_fdd(&paths, &coords)?;
    out.table("exact_fdd", &gammas(&coords), &exact)?;
    out.table("empirical_fdd", &gammas(&coords), &empirical)?;
    let tv = tv_distance(&exact, &empirical);
    let summary = json!({
        "L": l,
        "samples": c.samples,
        "seed": c.seed,
        "coordinates": coords,
        "tv": { "exact": to_pq(&tv), "float": to_f64(&tv) },
        "tail_mass": to_pq(table.tail_mass()),
    });
    out.json("summary", &summary)?;
    Ok(summary)
}

fn limit(c: &RunConfig, out: &mut Output) -> Result<Value, RunError> {
    let sigma = c.sigma().clone();
    let (kernel, init) = match c.rho1.first() {
        Some(rho) => (KernelSpec::q(rho.clone(), sigma.clone())?, InitialLawSpec::QDeformed(c.alpha.clone(), rho.clone())),
        None => (KernelSpec::p(sigma.clone())?, InitialLawSpec::SizeBiased(c.alpha.clone())),
    };
    init.validate()?;
    let eps = default_tail_epsilon();
    let cap = init.certified_cap(&eps);
    let start = initial_law(&init, cap)?;
    out.table("initial_law", &gammas(&[0]), &start)?;

    let rows: Vec<_> = (0..=c.length()).map(|n| (n, kernel.row(n))).collect();
    match c.format {
        Format::Json => out.json(
            "kernel",
            &json!(rows
                .iter()
                .map(|(n, r)| json!({ "n": n, "down": to_pq(&r.down), "stay": to_pq(&r.stay), "up": to_pq(&r.up) }))
                .collect::<Vec<_>>()),
        )?,
        Format::Csv => {
            let mut text = String::from("n,down,stay,up\n");
            for (n, r) in &rows {
                text.push_str(&format!("{n},{},{},{}\n", to_pq(&r.down), to_pq(&r.stay), to_pq(&r.up)));
            }
            out.bytes("kernel.csv", text.as_bytes())?;
        }
    }
    let coords: Vec<usize> = (0..=c.k).collect();
    out.table("chain_fdd", &gammas(&coords), &chain_fdd_law(&kernel, &start, c.k)?)?;
    if let Some(rho) = c.rho1.first() {
        out.table("xi", &["xi".to_string()], &xi_pmf(rho, &sigma)?)?;
    }

    let sim = ChainSimulator::new(&kernel, &init, &eps)?;
    let mut text = String::new();
    for traj in sim.run_many(c.length(), c.seed, c.samples) {
        let line: Vec<String> = traj.iter().map(usize::to_string).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    out.bytes("trajectories.txt", text.as_bytes())?;
    let summary = json!({
        "kernel": kernel.to_string(),
        "initial_cap": cap,
        "initial_tail": to_pq(start.tail_mass()),
        "steps": c.length(),
        "trajectories": c.samples,
        "seed": c.seed,
    });
    out.json("summary", &summary)?;
    Ok(summary)
}

fn csv_field(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn verify(c: &RunConfig, out: &mut Output) -> Result<Value, RunError> {
    let registry = certificates();
    let names: Vec<String> = if c.certificates.is_empty() {
        registry.names().iter().map(|s| s.to_string()).collect()
    } else {
        c.certificates.clone()
    };
    let config = CertConfig {
        sigmas: (!c.sigma.is_empty()).then(|| c.sigma.clone()),
        rhos: (!c.rho1.is_empty()).then(|| c.rho1.clone()),
        max_index: None,
        max_length: c.lengths.iter().max().copied(),
        lengths: (!c.lengths.is_empty()).then(|| c.lengths.clone()),
        tol: c.tol,
    };
    let reports: Vec<CertReport> = names
        .iter()
        .map(|n| registry.get(n)?.run(&config))
        .collect::<Result<_, _>>()?;
    let all_pass = reports.iter().all(CertReport::pass);
    match c.format {
        Format::Json => out.json(
            "certificates",
            &json!({ "pass": all_pass, "reports": reports.iter().map(CertReport::to_json).collect::<Vec<_>>() }),
        )?,
        Format::Csv => {
            let mut text = String::from("certificate,check,lhs,rhs,residual,tol,pass,params\n");
            for r in &reports {
                for ch in &r.checks {
                    text.push_str(&format!(
                        "{},{},{:e},{:e},{:e},{:e},{},{}\n",
                        r.certificate,
                        ch.check,
                        ch.lhs,
                        ch.rhs,
                        ch.residual,
                        ch.tol,
                        ch.pass,
                        csv_field(&ch.params.to_string())
                    ));
                }
            }
            out.bytes("certificates.csv", text.as_bytes())?;
        }
    }
    let verdicts: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "certificate": r.certificate,
                "pass": r.pass(),
                "checks": r.checks.len(),
                "failures": r.failures().count(),
                "worst_residual_over_tol": r.worst_ratio(),
            })
        })
        .collect();
    if !all_pass {
        let failing: Vec<Value> = reports
            .iter()
            .filter(|r| !r.pass())
            .map(|r| json!({ "certificate": r.certificate, "first_failure": r.failures().next().map(|f| f.to_json()) }))
            .collect();
        return Err(RunError::Certificate(json!({ "failed": failing, "files": out.files })));
    }
    Ok(json!({ "pass": true, "certificates": verdicts }))
}

fn converge(c: &RunConfig, out: &mut Output) -> Result<Value, RunError> {
    let mut params = LadderParams::new(c.sigma().clone(), c.alpha.clone(), c.k, c.lengths.clone()).with_beta(c.beta.clone());
    if let Some(rho) = c.rho1.first() {
        params = params.with_rho1(rho.clone());
    }
    params.tightness_level = c.tightness_level;
    let report = ladders().get(&c.theorem)?.run(&params)?;
    match c.format {
        Format::Json => out.json("ladder", &report.to_json())?,
        Format::Csv => out.bytes("ladder.csv", report.to_csv().as_bytes())?,
    }
    Ok(json!({ "ladder": report.ladder, "verdicts": report.verdicts }))
}
