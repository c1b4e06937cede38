use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use netdesign::bounds::BoundReport;
use netdesign::design::{
    crd, degree_class_types, partition_by_degree, randomized_degree_blocking, read_blocks,
    read_treatment, sample_within_blocks, type_restricted, write_blocks, write_treatment,
    ExperimentConfig, TypePartition,
};
use netdesign::graph::{
    copies_graph, erdos_renyi, preferential_attachment, read_edge_list, write_edge_list, Graph,
};
use netdesign::interference::DkMetric;
use netdesign::quasicoloring::{
    bidegree_measure, find_perfect_quasicoloring, is_perfect_quasicoloring, write_measure,
};
use netdesign::sim::{
    bound_report, interference_from_kind, part_norm, run_experiment, sweep, write_csv, DesignKind,
    GraphFamily, RunConfig, SweepConfig,
};
use netdesign::{rng, Error, Exec};

#[derive(Parser)]
#[command(
    name = "netdesign",
    version,
    about = "Treatment designs and diagnostics for experiments on networks"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random graph and write it as an edge list.
    GenGraph(GenGraphArgs),
    /// Draw one treatment from a design.
    Design(DesignArgs),
    /// Check whether a treatment is a perfect quasi-coloring.
    QcCheck(QcCheckArgs),
    /// Search for a perfect quasi-coloring.
    QcFind(QcFindArgs),
    /// Evaluate the closed-form bias and rmse bounds for a graph.
    Bounds(BoundsArgs),
    /// Run one simulation and print a CSV row.
    Simulate(SimulateArgs),
    /// Run a parameter grid from a config file and write CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFamily {
    Er,
    Pa,
    Copies,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseGraph {
    Edge,
    Path3,
    Triangle,
}

#[derive(Args)]
struct GenGraphArgs {
    #[arg(long, value_enum)]
    family: GenFamily,
    #[arg(long, default_value_t = 100)]
    vertices: usize,
    #[arg(long, default_value_t = 0.1)]
    density: f64,
    #[arg(long, default_value_t = 1.0)]
    pow: f64,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Base graph H for the copies construction.
    #[arg(long, value_enum, default_value = "edge")]
    base: BaseGraph,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Edge list destination (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Copies only: write the canonical quasi-coloring here.
    #[arg(long)]
    qc_out: Option<PathBuf>,
    /// Copies only: write the induced type partition here.
    #[arg(long)]
    types_out: Option<PathBuf>,
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "crd")]
    design: String,
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Treatment destination (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the partition (or type partition) used by the draw here.
    #[arg(long)]
    blocks_out: Option<PathBuf>,
}

#[derive(Args)]
struct QcCheckArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    treatment: PathBuf,
    /// Type partition, one part per line.
    #[arg(long)]
    types: Option<PathBuf>,
}

#[derive(Args)]
struct QcFindArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    types: Option<PathBuf>,
    /// Largest graph the exhaustive search accepts.
    #[arg(long, default_value_t = netdesign::quasicoloring::DEFAULT_SEARCH_CAP)]
    cap: usize,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "linear")]
    interference: String,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Type partition for the typed and homophily rows (degree classes when
    /// omitted).
    #[arg(long)]
    types: Option<PathBuf>,
    /// Within-type outcome spread; adds the homophily row.
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML file with RunConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    vertices: Option<usize>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    pow: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    graph_file: Option<PathBuf>,
    #[arg(long)]
    graph_seed: Option<u64>,
    #[arg(long)]
    design: Option<String>,
    #[arg(long)]
    interference: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    model_seed: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    redraw_model: bool,
    #[arg(long)]
    repeats: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML file with SweepConfig fields.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; overrides `output` in the config (stdout when both
    /// are missing).
    #[arg(long)]
    output: Option<PathBuf>,
}

fn validation(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidConfig(msg.into()).into()
}

fn open(path: &Path) -> Result<BufReader<File>> {
    if !path.is_file() {
        return Err(validation(format!(
            "file {} does not exist",
            path.display()
        )));
    }
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_graph(path: &Path) -> Result<Graph> {
    read_edge_list(open(path)?).with_context(|| format!("reading graph {}", path.display()))
}

fn load_types(path: &Path, g: &Graph) -> Result<TypePartition> {
    let parts = read_blocks(open(path)?)?;
    Ok(TypePartition::new(g.num_vertices(), parts)?)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| validation(format!("{}: {e}", path.display())))
}

fn load_run_config(path: &Path) -> Result<RunConfig> {
    toml::from_str(&read_text(path)?).map_err(|e| validation(format!("{}: {e}", path.display())))
}

fn load_sweep_config(path: &Path) -> Result<SweepConfig> {
    toml::from_str(&read_text(path)?).map_err(|e| validation(format!("{}: {e}", path.display())))
}

fn gen_graph(args: GenGraphArgs) -> Result<()> {
    let mut rng = rng::seeded(args.seed);
    let g = match args.family {
        GenFamily::Er => erdos_renyi(args.vertices, args.density, &mut rng)?,
        GenFamily::Pa => preferential_attachment(args.vertices, args.pow, args.m, &mut rng)?,
        GenFamily::Copies => {
            let h = match args.base {
                BaseGraph::Edge => Graph::path(2),
                BaseGraph::Path3 => Graph::path(3),
                BaseGraph::Triangle => Graph::complete(3),
            };
            let cg = copies_graph(&h)?;
            if let Some(p) = &args.qc_out {
                let mut out = sink(Some(p))?;
                write_treatment(&cg.quasicoloring, &mut out)?;
                out.flush()?;
            }
            if let Some(p) = &args.types_out {
                let mut out = sink(Some(p))?;
                write_blocks(cg.types.parts(), &mut out)?;
                out.flush()?;
            }
            cg.graph
        }
    };
    let mut out = sink(args.output.as_deref())?;
    write_edge_list(&g, &mut out)?;
    out.flush()?;
    Ok(())
}

fn design(args: DesignArgs) -> Result<()> {
    let kind: DesignKind = args.design.parse()?;
    let g = load_graph(&args.graph)?;
    let cfg = ExperimentConfig::for_graph(&g, args.p, args.r)?;
    let mut rng = rng::seeded(args.seed);
    let (treatment, groups) = match kind {
        DesignKind::Crd => (crd(&cfg, &mut rng), vec![(0..g.num_vertices()).collect()]),
        DesignKind::Pbd => {
            let part = partition_by_degree(&g, &cfg)?;
            (
                sample_within_blocks(&part, &cfg, &mut rng)?,
                part.blocks().to_vec(),
            )
        }
        DesignKind::PbdRandom => {
            let part = randomized_degree_blocking(&g, &cfg, &mut rng)?;
            (
                sample_within_blocks(&part, &cfg, &mut rng)?,
                part.blocks().to_vec(),
            )
        }
        DesignKind::Typed => {
            let types = degree_class_types(&g, cfg.r())?;
            (
                type_restricted(&types, &cfg, &mut rng)?,
                types.parts().to_vec(),
            )
        }
    };
    if let Some(p) = &args.blocks_out {
        let mut out = sink(Some(p))?;
        write_blocks(&groups, &mut out)?;
        out.flush()?;
    }
    let mut out = sink(args.output.as_deref())?;
    write_treatment(&treatment.treated(), &mut out)?;
    out.flush()?;
    Ok(())
}

fn qc_check(args: QcCheckArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    let q = read_treatment(open(&args.treatment)?)?;
    let types = args
        .types
        .as_deref()
        .map(|p| load_types(p, &g))
        .transpose()?;
    let perfect = is_perfect_quasicoloring(&g, &q, types.as_ref())?;
    let mut out = sink(None)?;
    writeln!(out, "{}", if perfect { "perfect" } else { "not perfect" })?;
    if g.has_isolated_vertices() {
        log::warn!("graph has isolated vertices; bidegree measure not printed");
    } else {
        let cfg = ExperimentConfig::for_graph(&g, 1, 2)?;
        let t = netdesign::design::Treatment::from_vertices(&q, cfg)?;
        write_measure(&bidegree_measure(&g, &t)?, &mut out)?;
    }
    out.flush()?;
    Ok(())
}

fn qc_find(args: QcFindArgs, exec: Exec) -> Result<()> {
    let g = load_graph(&args.graph)?;
    let types = args
        .types
        .as_deref()
        .map(|p| load_types(p, &g))
        .transpose()?;
    let found = find_perfect_quasicoloring(&g, types.as_ref(), args.cap, exec)?;
    match found {
        Some(q) => {
            let line: Vec<String> = q.iter().map(usize::to_string).collect();
            println!("{}", line.join(" "));
        }
        None => println!("NONE"),
    }
    Ok(())
}

fn homophily_report(
    g: &Graph,
    types: &TypePartition,
    sigma: f64,
    spec: &netdesign::interference::InterferenceSpec,
    cfg: &ExperimentConfig,
) -> Result<BoundReport> {
    let fraction = DkMetric::new(0.0, 1.0, g.degree_stats().dmax)?;
    let k = part_norm(g, spec, types.parts(), &fraction)?;
    Ok(BoundReport::homophily(g, types, sigma, k, cfg)?)
}

fn bounds(args: BoundsArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    let cfg = ExperimentConfig::for_graph(&g, args.p, args.r)?;
    let spec = interference_from_kind(&args.interference, args.gamma)?;
    g.require_no_isolated()?;
    let types = args
        .types
        .as_deref()
        .map(|p| load_types(p, &g))
        .transpose()?;
    let mut rows = Vec::new();
    for kind in DesignKind::ALL {
        rows.push((
            kind.to_string(),
            bound_report(kind, &g, &cfg, &spec, types.as_ref())?,
        ));
    }
    let unit = DkMetric::new(1.0, 1.0, g.degree_stats().dmax)?;
    let nu = spec.lipschitz_norm_dk(&g, &unit)?;
    rows.push(("pbd-dense".into(), BoundReport::dense(&g, nu, nu, &cfg)?));
    if let Some(sigma) = args.sigma {
        let owned;
        let t = match &types {
            Some(t) => t,
            None => {
                owned = degree_class_types(&g, cfg.r())?;
                &owned
            }
        };
        rows.push((
            "homophily".into(),
            homophily_report(&g, t, sigma, &spec, &cfg)?,
        ));
    }
    let mut out = sink(None)?;
    writeln!(out, "design,{}", BoundReport::csv_header())?;
    for (name, report) in rows {
        writeln!(out, "{name},{}", report.csv_row())?;
    }
    out.flush()?;
    Ok(())
}

fn run_config(args: SimulateArgs) -> Result<RunConfig> {
    let mut c: RunConfig = match &args.config {
        Some(p) => load_run_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = args.family {
        c.family = v.parse::<GraphFamily>()?;
    }
    if let Some(v) = args.design {
        c.design = v.parse()?;
    }
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = args.$f { c.$f = v; } )* };
    }
    set!(
        vertices,
        density,
        pow,
        m,
        graph_seed,
        interference,
        gamma,
        model_seed,
        seed,
        replications,
        p,
        r,
        repeats
    );
    if args.graph_file.is_some() {
        c.graph_file = args.graph_file;
    }
    if args.output.is_some() {
        c.output = args.output;
    }
    c.redraw_model |= args.redraw_model;
    c.validate()?;
    Ok(c)
}

fn simulate(args: SimulateArgs, exec: Exec) -> Result<()> {
    let c = run_config(args)?;
    let row = run_experiment(&c, exec)?;
    let mut out = sink(c.output.as_deref())?;
    write_csv(&[row], &mut out)?;
    out.flush()?;
    Ok(())
}

fn run_sweep(args: SweepArgs, exec: Exec) -> Result<()> {
    let mut c = load_sweep_config(&args.config)?;
    if args.output.is_some() {
        c.output = args.output;
    }
    let rows = sweep(&c, exec)?;
    let mut out = sink(c.output.as_deref())?;
    write_csv(&rows, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(validation("--threads must be positive"));
        }
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    match cli.command {
        Command::GenGraph(a) => gen_graph(a),
        Command::Design(a) => design(a),
        Command::QcCheck(a) => qc_check(a),
        Command::QcFind(a) => qc_find(a, exec),
        Command::Bounds(a) => bounds(a),
        Command::Simulate(a) => simulate(a, exec),
        Command::Sweep(a) => run_sweep(a, exec),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            // library errors other than I/O are bad input
            let bad_input =
                matches!(e.downcast_ref::<Error>(), Some(err) if !matches!(err, Error::Io(_)));
            ExitCode::from(if bad_input { 2 } else { 1 })
        }
    }
}
