//! `sicut` command line: generate instances, solve, verify against brute
//! force, run benchmark manifests, export MIBLP files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use sicut::master::{solve, Setting, SolveResult, SolverConfig};
use sicut::problems::{biig, wmcig, BiigParams, MiblpModel, ModelInstance, WmcigParams};
use sicut::report::{write_records, RunRecord};
use sicut::verify::brute_force_solve;

#[derive(Parser)]
#[command(name = "sicut", version, about = "Branch-and-cut for interdiction games with submodular followers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Wmcig,
    Biig,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(clap::Args)]
struct SolveArgs {
    /// Component setting, e.g. ILDAE-S2.
    #[arg(long, default_value = "ILDAE-S2")]
    setting: Setting,
    /// Minimum relative violation for a fractional cut.
    #[arg(long, default_value_t = 0.01)]
    frac_sep: f64,
    /// Seconds.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    #[arg(long)]
    node_limit: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolveArgs {
    fn config(&self) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            setting: self.setting,
            frac_violation_threshold: self.frac_sep,
            time_limit: self.time_limit,
            node_limit: self.node_limit,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a random instance.
    Generate {
        family: Family,
        #[arg(long)]
        n: usize,
        /// Coverage radius (wmcig).
        #[arg(long, default_value_t = 2.0)]
        radius: f64,
        /// Interdiction budget as a fraction of n (wmcig, unless --k is given).
        #[arg(long, default_value_t = 0.1)]
        k_frac: f64,
        /// Follower budget (default n/10 for wmcig, 2 for biig).
        #[arg(long)]
        budget: Option<usize>,
        /// Interdiction budget.
        #[arg(long)]
        k: Option<usize>,
        /// Targets per item (biig).
        #[arg(long, default_value_t = 2)]
        m_mult: usize,
        /// Arc density (biig).
        #[arg(long, default_value_t = 0.2)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one instance and print its result row.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        args: SolveArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Solve and compare against exhaustive enumeration; fails on mismatch.
    Verify {
        instance: PathBuf,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// Run every (instance, setting) line of a manifest and write the rows.
    Bench {
        /// Lines `instance_path,setting`; `#` starts a comment. Paths are
        /// relative to the manifest.
        manifest: PathBuf,
        #[arg(long, default_value_t = 3600.0)]
        time_limit: f64,
        #[arg(long)]
        node_limit: Option<usize>,
        #[arg(long, default_value_t = 0.01)]
        frac_sep: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Write the bilevel MIP form of a coverage instance: `<out>.lp` and `<out>.aux`.
    ExportMiblp {
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn read_instance(path: &Path) -> Result<ModelInstance> {
    ModelInstance::read(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(text)?),
    }
}

fn csv_rows(records: &[RunRecord]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_records(&mut buf, records)?;
    Ok(buf)
}

fn summary(res: &SolveResult) -> String {
    format!(
        "UB={} LB={} gap={:.4}% nodes={} cuts={} status={} interdicted={:?}",
        res.upper,
        res.lower,
        res.gap,
        res.nodes,
        res.total_cuts(),
        res.status.name(),
        res.interdicted()
    )
}

#[allow(clippy::too_many_arguments)]
fn generate(
    family: Family,
    n: usize,
    radius: f64,
    k_frac: f64,
    budget: Option<usize>,
    k: Option<usize>,
    m_mult: usize,
    density: f64,
    seed: u64,
) -> Result<ModelInstance> {
    Ok(match family {
        Family::Wmcig => {
            let mut p = WmcigParams::standard(n, radius, k_frac)?;
            p.budget = budget.unwrap_or(p.budget);
            p.interdiction = k.unwrap_or(p.interdiction);
            ModelInstance::Wmcig(wmcig::generate(&p, seed)?)
        }
        Family::Biig => {
            let p = BiigParams {
                n,
                target_mult: m_mult,
                budget: budget.unwrap_or(2),
                interdiction: k.unwrap_or((n as f64 * k_frac + 1e-9).floor() as usize),
                density,
            };
            ModelInstance::Biig(biig::generate(&p, seed)?)
        }
    })
}

fn verify(path: &Path, args: &SolveArgs) -> Result<()> {
    let model = read_instance(path)?;
    let inst = model.to_instance(instance_name(path));
    let truth = brute_force_solve(&inst)?;
    let res = solve(&inst, &args.config()?)?;
    let tol = match model {
        ModelInstance::Wmcig(_) => 0.0,
        ModelInstance::Biig(_) => 1e-6,
    };
    println!("solver {} / brute force {}", summary(&res), truth.value);
    if (res.upper - truth.value).abs() > tol {
        bail!("mismatch: solver {} vs brute force {}", res.upper, truth.value);
    }
    Ok(())
}

fn bench(manifest: &Path, base: &SolverConfig, threads: usize) -> Result<Vec<RunRecord>> {
    let text = fs::read_to_string(manifest).with_context(|| format!("reading {}", manifest.display()))?;
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let mut jobs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((path, setting)) = line.split_once(',') else {
            bail!("{}:{}: expected `instance,setting`", manifest.display(), i + 1);
        };
        let setting: Setting = setting.trim().parse().with_context(|| format!("{}:{}", manifest.display(), i + 1))?;
        jobs.push((dir.join(path.trim()), setting));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?;
    // each job owns its solver; rows come back in manifest order
    pool.install(|| {
        jobs.par_iter()
            .map(|(path, setting)| {
                let model = read_instance(path)?;
                let name = instance_name(path);
                let cfg = SolverConfig { setting: *setting, ..base.clone() };
                let res = solve(&model.to_instance(name.as_str()), &cfg)?;
                Ok(RunRecord::new(&name, &model, setting, &res))
            })
            .collect()
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Generate { family, n, radius, k_frac, budget, k, m_mult, density, seed, out } => {
            let model = generate(family, n, radius, k_frac, budget, k, m_mult, density, seed)?;
            emit(out.as_deref(), model.to_text().as_bytes())
        }
        Cmd::Solve { instance, args, out, format: Format::Csv } => {
            let model = read_instance(&instance)?;
            let name = instance_name(&instance);
            let res = solve(&model.to_instance(name.as_str()), &args.config()?)?;
            eprintln!("{}", summary(&res));
            emit(out.as_deref(), &csv_rows(&[RunRecord::new(&name, &model, &args.setting, &res)])?)
        }
        Cmd::Verify { instance, args } => verify(&instance, &args),
        Cmd::Bench { manifest, time_limit, node_limit, frac_sep, seed, threads, out, format: Format::Csv } => {
            let base = SolverConfig { frac_violation_threshold: frac_sep, time_limit, node_limit, seed, ..Default::default() };
            base.validate()?;
            let records = bench(&manifest, &base, threads)?;
            emit(out.as_deref(), &csv_rows(&records)?)
        }
        Cmd::ExportMiblp { instance, out } => {
            let ModelInstance::Wmcig(w) = read_instance(&instance)? else {
                bail!("only coverage (WMCIG) instances have a MIBLP form");
            };
            let m = MiblpModel::from_wmcig(&w)?;
            fs::write(out.with_extension("lp"), m.to_lp_text())?;
            fs::write(out.with_extension("aux"), m.to_aux_text())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
