//! `lipcube`: build, measure and certify Lipschitz bijections between
//! boolean functions on the Hamming cube.
//!
//! Seeded commands are reproducible: the same invocation writes byte
//! identical mapping files and reports. Exit code 0 means every
//! requested check passed; failed checks exit 1 and still emit their
//! structured report.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lipcube::analysis::{
    self, approx_f64, certify_local_map, chain_swap_avg_stretch_bound, dependency_graph,
    inverse_stretch_bounds, stretch_report_exhaustive, stretch_report_sampled,
};
use lipcube::cube::{random_balanced_function, BooleanFunction, RngStream};
use lipcube::mappings::Mapping;
use lipcube::oracle;
use lipcube::randmap::{run_pipeline, PipelineConfig, PipelineError};
use lipcube::scd;

use lipcube_cli::formats;
use lipcube_cli::report::{self, to_json_string};

#[derive(Parser)]
#[command(name = "lipcube", version, about = "Lipschitz mappings on the Hamming cube")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapName {
    Identity,
    DictToXorPrefix,
    DictToXorLocal,
    XorToMaj,
}

impl MapName {
    fn construct(self, n: u32) -> Result<Mapping> {
        let m = match self {
            MapName::Identity => Mapping::identity(n),
            MapName::DictToXorPrefix => Mapping::dict_to_xor_prefix(n),
            MapName::DictToXorLocal => Mapping::dict_to_xor_local(n),
            MapName::XorToMaj => Mapping::xor_to_maj_scd(n),
        };
        m.map_err(|e| anyhow!("cannot build mapping: {e}"))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the canonical symmetric chain decomposition, one chain per
    /// line as space-separated point encodings.
    Scd {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a named mapping and write it as a mapping file.
    Build {
        #[arg(value_enum)]
        name: MapName,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that a mapping file is a bijection carrying source to target.
    Verify {
        #[arg(long)]
        map: PathBuf,
        /// Source function: dict, xor or maj.
        #[arg(long)]
        source: String,
        /// Target function: dict, xor, maj, or a truth-table file.
        #[arg(long)]
        target: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Measure Lipschitz constant, average stretch and displacement.
    Stretch {
        #[arg(long, conflicts_with_all = ["name", "n"])]
        map: Option<PathBuf>,
        #[arg(long, value_enum, requires = "n")]
        name: Option<MapName>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: Mode,
        /// Sample count; required in sampled mode.
        #[arg(long)]
        samples: Option<u64>,
        /// Seed; required in sampled mode.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Exact average stretch of a named map across dimensions, as CSV
    /// columns n,avg_stretch,stretch_bound,lipschitz,ratio_sqrt_n.
    StretchSweep {
        #[arg(long, value_enum, default_value = "xor-to-maj")]
        name: MapName,
        /// Comma-separated dimensions, e.g. 3,5,7,9.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Dependency graph of a dictator-to-parity mapping and the
    /// per-output-bit inverse stretch bounds it forces.
    Depgraph {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Certificate that a local Lipschitz dictator-to-parity mapping has
    /// the forced logarithmic inverse lower bound.
    Certify {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the randomized dictator-to-balanced-function pipeline.
    Randmap(RandmapArgs),
    /// Exact dissimilarity between two truth tables (tiny dimensions).
    Dlip {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        /// Write the optimal witness as a mapping file.
        #[arg(long)]
        witness_out: Option<PathBuf>,
        /// Use branch-and-bound (allows n=4).
        #[arg(long)]
        branch_and_bound: bool,
        /// Search-node budget for branch-and-bound.
        #[arg(long, default_value_t = 2_000_000_000)]
        node_budget: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Draw a uniformly random balanced function as a truth-table file.
    GenBalanced {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Write the hex body variant.
        #[arg(long)]
        hex: bool,
    },
}

#[derive(Args)]
struct RandmapArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    seed: u64,
    /// Target truth-table file; a random balanced function when absent.
    #[arg(long)]
    f: Option<PathBuf>,
    /// Minimum pairwise distance between block centers.
    #[arg(long)]
    d0: Option<u32>,
    /// Number of endpoint pairs to sample.
    #[arg(long)]
    paths: Option<u64>,
    #[arg(long)]
    retries: Option<u32>,
    #[arg(long)]
    unit_cap: Option<u32>,
    /// Keep a path with probability n^e / (|B1| |B2|).
    #[arg(long)]
    discard_exponent: Option<u32>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(cli) {
        Ok(code) => {
            eprintln!("elapsed: {:?}", start.elapsed());
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Scd { n, out } => cmd_scd(n, out.as_deref()),
        Cmd::Build { name, n, out } => cmd_build(name, n, &out),
        Cmd::Verify {
            map,
            source,
            target,
            report,
        } => cmd_verify(&map, &source, &target, report.as_deref()),
        Cmd::Stretch {
            map,
            name,
            n,
            mode,
            samples,
            seed,
            report,
        } => cmd_stretch(map.as_deref(), name, n, mode, samples, seed, report.as_deref()),
        Cmd::StretchSweep { name, n, out, report } => {
            cmd_stretch_sweep(name, &n, out.as_deref(), report.as_deref())
        }
        Cmd::Depgraph { map, report } => cmd_depgraph(&map, report.as_deref()),
        Cmd::Certify { map, report } => cmd_certify(&map, report.as_deref()),
        Cmd::Randmap(args) => cmd_randmap(args),
        Cmd::Dlip {
            f,
            g,
            witness_out,
            branch_and_bound,
            node_budget,
            report,
        } => cmd_dlip(&f, &g, witness_out.as_deref(), branch_and_bound, node_budget, report.as_deref()),
        Cmd::GenBalanced { n, seed, out, hex } => cmd_gen_balanced(n, seed, &out, hex),
    }
}

/// The invocation, normalized to the bare program name, echoed into
/// experiment reports so a row set can be reproduced from its file.
fn command_echo() -> String {
    let mut args = std::env::args();
    let _program = args.next();
    std::iter::once("lipcube".to_string())
        .chain(args)
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_report<T: serde::Serialize>(path: Option<&Path>, doc: &T) -> Result<()> {
    if let Some(path) = path {
        std::fs::write(path, to_json_string(doc))
            .with_context(|| format!("writing report {}", path.display()))?;
    }
    Ok(())
}

fn named_function(name: &str, n: u32) -> Option<BooleanFunction> {
    match name {
        "dict" | "dictator" | "dic" => Some(BooleanFunction::dictator(n)),
        "xor" | "parity" => Some(BooleanFunction::xor(n)),
        "maj" | "majority" => Some(BooleanFunction::maj(n)),
        _ => None,
    }
}

fn function_arg(arg: &str, n: u32) -> Result<BooleanFunction> {
    if let Some(f) = named_function(arg, n) {
        return Ok(f);
    }
    let path = Path::new(arg);
    if path.exists() {
        let f = formats::read_truth_table(path)?;
        if f.dim() != n {
            bail!("{arg}: table dimension {} does not match mapping dimension {n}", f.dim());
        }
        return Ok(f);
    }
    bail!("unknown function `{arg}` (expected dict, xor, maj, or a truth-table file)")
}

fn cmd_scd(n: u32, out: Option<&Path>) -> Result<i32> {
    let d = scd::decompose(n).map_err(|e| anyhow!("{e}"))?;
    let mut text = String::new();
    for chain in d.chains() {
        let line: Vec<String> = chain.points().iter().map(|p| p.index().to_string()).collect();
        text.push_str(&line.join(" "));
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_build(name: MapName, n: u32, out: &Path) -> Result<i32> {
    let mapping = name.construct(n)?.materialize().map_err(|e| anyhow!("{e}"))?;
    formats::write_mapping(out, &mapping)?;
    println!(
        "wrote {} (n={n}, {} lines) to {}",
        mapping.name(),
        1u64 << n,
        out.display()
    );
    Ok(0)
}

fn cmd_verify(map: &Path, source: &str, target: &str, report: Option<&Path>) -> Result<i32> {
    let (n, table) = formats::read_mapping_table(map)?;
    let src = function_arg(source, n)?;
    let tgt = function_arg(target, n)?;
    let (bijective, maps) = match Mapping::from_table("candidate".into(), n, table) {
        Ok(m) => (true, analysis::is_mapping(&m, &src, &tgt).map_err(|e| anyhow!("{e}"))?),
        Err(_) => (false, false),
    };
    let pass = bijective && maps;
    let doc = report::VerifyDoc {
        mapping_file: map.display().to_string(),
        n,
        source: source.to_string(),
        target: target.to_string(),
        bijective,
        is_mapping: maps,
        pass,
    };
    write_report(report, &doc)?;
    println!(
        "{}: bijective={bijective} is_mapping={maps} -> {}",
        map.display(),
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { 0 } else { 1 })
}

fn cmd_stretch(
    map: Option<&Path>,
    name: Option<MapName>,
    n: Option<u32>,
    mode: Mode,
    samples: Option<u64>,
    seed: Option<u64>,
    report: Option<&Path>,
) -> Result<i32> {
    let mapping = match (map, name, n) {
        (Some(path), None, _) => formats::read_mapping(path, "file")?,
        (None, Some(name), Some(n)) => name.construct(n)?,
        _ => bail!("pass either --map FILE or --name NAME --n N"),
    };
    let r = match mode {
        Mode::Exhaustive => {
            let mapping = mapping.materialize().map_err(|e| anyhow!("{e}"))?;
            stretch_report_exhaustive(&mapping).map_err(|e| anyhow!("{e}"))?
        }
        Mode::Sampled => {
            let samples =
                samples.ok_or_else(|| anyhow!("sampled mode requires an explicit --samples"))?;
            let seed = seed.ok_or_else(|| anyhow!("sampled mode requires --seed"))?;
            stretch_report_sampled(&mapping, samples, &mut RngStream::new(seed))
        }
    };
    let doc = report::StretchDoc::new(command_echo(), mapping.name(), &r);
    write_report(report, &doc)?;
    match &r.avg_stretch {
        analysis::AvgStretch::Exact(rat) => println!(
            "{}: n={} lipschitz={} avg_stretch={}/{} ({:.6}) max_displacement={}",
            mapping.name(),
            r.n,
            r.lipschitz_constant,
            rat.numer(),
            rat.denom(),
            approx_f64(rat),
            r.max_displacement
        ),
        analysis::AvgStretch::Sampled { mean, samples } => println!(
            "{}: n={} lipschitz>={} avg_stretch~{mean:.6} ({samples} samples) max_displacement>={}",
            mapping.name(),
            r.n,
            r.lipschitz_constant,
            r.max_displacement
        ),
    }
    Ok(0)
}

fn cmd_stretch_sweep(
    name: MapName,
    ns: &[u32],
    out: Option<&Path>,
    report: Option<&Path>,
) -> Result<i32> {
    if ns.is_empty() {
        bail!("--n needs at least one dimension");
    }
    let mut rows = Vec::new();
    let mut csv = String::from("n,avg_stretch,stretch_bound,lipschitz,ratio_sqrt_n\n");
    for &n in ns {
        let mapping = name.construct(n)?.materialize().map_err(|e| anyhow!("{e}"))?;
        let avg = analysis::avg_stretch_exhaustive(&mapping).map_err(|e| anyhow!("{e}"))?;
        let bound = chain_swap_avg_stretch_bound(n);
        let lipschitz = analysis::lipschitz_constant(&mapping).map_err(|e| anyhow!("{e}"))?;
        let ratio = approx_f64(&avg) / (n as f64).sqrt();
        csv.push_str(&format!(
            "{n},{},{},{lipschitz},{ratio}\n",
            approx_f64(&avg),
            approx_f64(&bound),
        ));
        rows.push(report::SweepRow {
            n,
            avg_stretch: (&avg).into(),
            stretch_bound: (&bound).into(),
            lipschitz,
            ratio_sqrt_n: ratio,
        });
    }
    let doc = report::SweepDoc {
        command: command_echo(),
        mapping: match name {
            MapName::Identity => "identity".into(),
            MapName::DictToXorPrefix => "dict-to-xor-prefix".into(),
            MapName::DictToXorLocal => "dict-to-xor-local".into(),
            MapName::XorToMaj => "xor-to-maj-scd".into(),
        },
        rows,
    };
    write_report(report, &doc)?;
    match out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_depgraph(map: &Path, report: Option<&Path>) -> Result<i32> {
    let mapping = formats::read_mapping(map, "file")?;
    let graph = dependency_graph(&mapping).map_err(|e| anyhow!("{e}"))?;
    let cert = inverse_stretch_bounds(&mapping).map_err(|e| anyhow!("{e}"))?;
    let n = mapping.dim();
    let adjacency: Vec<Vec<u32>> = (1..=n)
        .map(|j| (1..=n).filter(|&i| graph.depends(j, i)).collect())
        .collect();
    let doc = report::DepgraphDoc::new(
        map.display().to_string(),
        adjacency,
        graph.locality(),
        &cert,
    );
    write_report(report, &doc)?;
    for b in &cert.bounds {
        println!(
            "output {}: bfs_distance={} min_inverse_stretch={} {}",
            b.output,
            b.dependency_distance
                .map_or("unreachable".to_string(), |d| d.to_string()),
            b.min_inverse_stretch,
            if b.certified { "ok" } else { "VIOLATED" }
        );
    }
    println!(
        "locality={} all_certified={}",
        graph.locality(),
        cert.all_certified
    );
    Ok(if cert.all_certified { 0 } else { 1 })
}

fn cmd_certify(map: &Path, report: Option<&Path>) -> Result<i32> {
    let mapping = formats::read_mapping(map, "file")?;
    let cert = certify_local_map(&mapping).map_err(|e| anyhow!("{e}"))?;
    let doc = report::CertifyDoc::new(map.display().to_string(), &cert);
    write_report(report, &doc)?;
    println!(
        "C={} k={} delta={} degree_cap={} max_input_degree={} ecc={} (bound {:.4})",
        cert.lipschitz,
        cert.locality,
        cert.delta,
        cert.input_degree_cap,
        doc.max_input_degree,
        cert.eccentricity,
        cert.eccentricity_bound,
    );
    println!(
        "inverse_lipschitz={} >= {:.4}: {}",
        cert.inverse_lipschitz,
        cert.inverse_lower_bound,
        if cert.certified { "CERTIFIED" } else { "FAILED" }
    );
    Ok(if cert.certified { 0 } else { 1 })
}

fn cmd_randmap(args: RandmapArgs) -> Result<i32> {
    let mut cfg = PipelineConfig::desk(args.n, args.seed);
    if let Some(d0) = args.d0 {
        cfg.min_center_distance = d0;
    }
    if let Some(k) = args.paths {
        cfg.path_count = k;
    }
    if let Some(r) = args.retries {
        cfg.max_retries = r;
    }
    if let Some(c) = args.unit_cap {
        cfg.unit_cap = c;
    }
    cfg.discard_exponent = args.discard_exponent;

    let target = match &args.f {
        Some(path) => Some(formats::read_truth_table(path)?),
        None => None,
    };
    match run_pipeline(&cfg, target.as_ref()) {
        Ok(run) => {
            formats::write_mapping(&args.out, &run.mapping)?;
            let doc = report::RandmapDoc {
                command: command_echo(),
                config: (&cfg).into(),
                success: true,
                failure: None,
                diagnostics: Some((&run.diagnostics).into()),
                mapping_file: Some(args.out.display().to_string()),
            };
            write_report(args.report.as_deref(), &doc)?;
            println!(
                "ok: n={} seed={} blocks={} max_displacement={} (bound {}) attempts={}",
                cfg.n,
                cfg.seed,
                run.diagnostics.block_count,
                run.diagnostics.max_displacement.unwrap_or(0),
                run.diagnostics.displacement_bound,
                run.diagnostics.attempts,
            );
            Ok(0)
        }
        Err(PipelineError::Exhausted {
            attempts,
            last_failure,
            diagnostics,
        }) => {
            let doc = report::RandmapDoc {
                command: command_echo(),
                config: (&cfg).into(),
                success: false,
                failure: Some(format!("all {attempts} attempts failed; last: {last_failure}")),
                diagnostics: Some(diagnostics.as_ref().into()),
                mapping_file: None,
            };
            write_report(args.report.as_deref(), &doc)?;
            println!("FAILED after {attempts} attempts: {last_failure}");
            Ok(1)
        }
        Err(e @ PipelineError::UnitCapBelowImbalance { .. }) => {
            let doc = report::RandmapDoc {
                command: command_echo(),
                config: (&cfg).into(),
                success: false,
                failure: Some(e.to_string()),
                diagnostics: None,
                mapping_file: None,
            };
            write_report(args.report.as_deref(), &doc)?;
            println!("FAILED: {e}");
            Ok(1)
        }
        Err(e) => Err(anyhow!("{e}")),
    }
}

fn cmd_dlip(
    f_path: &Path,
    g_path: &Path,
    witness_out: Option<&Path>,
    branch_and_bound: bool,
    node_budget: u64,
    report: Option<&Path>,
) -> Result<i32> {
    let f = formats::read_truth_table(f_path)?;
    let g = formats::read_truth_table(g_path)?;
    let result = if branch_and_bound {
        oracle::dlip_branch_and_bound(&f, &g, node_budget)
    } else {
        oracle::dlip_exact(&f, &g)
    }
    .map_err(|e| anyhow!("{e}"))?;
    if let Some(path) = witness_out {
        formats::write_mapping(path, &result.witness)?;
    }
    let doc = report::DlipDoc {
        command: command_echo(),
        n: f.dim(),
        f_file: f_path.display().to_string(),
        g_file: g_path.display().to_string(),
        value: result.value,
        candidates: result.candidates,
        method: if branch_and_bound {
            "branch-and-bound"
        } else {
            "enumeration"
        },
        witness_file: witness_out.map(|p| p.display().to_string()),
    };
    write_report(report, &doc)?;
    println!("dlip = {} ({} candidates)", result.value, result.candidates);
    Ok(0)
}

fn cmd_gen_balanced(n: u32, seed: u64, out: &Path, hex: bool) -> Result<i32> {
    let f = random_balanced_function(n, &mut RngStream::new(seed));
    formats::write_truth_table(out, &f, hex)?;
    println!("wrote balanced table (n={n}, seed={seed}) to {}", out.display());
    Ok(0)
}
