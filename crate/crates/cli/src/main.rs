use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qldpc_core::code::{builtin, CodeDefinition, CssCode, Side, GHP_882_NAME};
use qldpc_core::gf2::{write_alist, BitVector};
use qldpc_core::minsum::{DecoderConfig, MinSumDecoder};
use qldpc_core::qccnr::{residual, QccnrDecoder, RoundRecord};
use qldpc_core::removal::{cnr, qcnr, RemovalConfig};
use qldpc_core::sim::{run_memory_experiment, write_csv, Algorithm, DecoderParams, DecoderSpec, SimConfig, SimOptions};
use qldpc_core::tanner::{
    build_ct, find_ims, leaf_checks, limiting_checks, qubit_separation, trapping_set_dot, ImTable, Node, TannerGraph,
    TrappingSetKind, TrappingSetSpec,
};

#[derive(Parser)]
#[command(name = "qldpc", version, about = "Quantum LDPC code construction, decoding and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and write its check matrices as alist files.
    Build(BuildArgs),
    /// Decode one syndrome with min-sum BP or QCCNR.
    Decode(DecodeArgs),
    /// Report computation trees, separations and IM tables.
    Analyze(AnalyzeArgs),
    /// Run a Monte Carlo memory experiment from a config file.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct CodeArgs {
    /// Built-in code name.
    #[arg(long, conflicts_with = "config")]
    code: Option<String>,
    /// Code definition file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CodeArgs {
    fn load(&self) -> Result<CssCode> {
        match (&self.code, &self.config) {
            (_, Some(path)) => {
                let def = CodeDefinition::load(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(def.build()?)
            }
            (Some(name), None) => load_code(name),
            (None, None) => builtin(GHP_882_NAME).context("built-in code missing"),
        }
    }
}

fn load_code(name_or_path: &str) -> Result<CssCode> {
    if let Some(code) = builtin(name_or_path) {
        return Ok(code);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        return Ok(CodeDefinition::load(path)?.build()?);
    }
    bail!("unknown code {name_or_path:?}; built-ins: {GHP_882_NAME}")
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    X,
    Z,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::X => Side::X,
            SideArg::Z => Side::Z,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct DecoderFlags {
    #[arg(long, value_enum, default_value = "bp")]
    algorithm: AlgorithmArg,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    max_sub: Option<usize>,
    #[arg(long)]
    fr: Option<usize>,
    #[arg(long)]
    tol: Option<usize>,
    #[arg(long)]
    scaling_factor: Option<f64>,
    #[arg(long)]
    df_first: Option<usize>,
    #[arg(long)]
    df_second: Option<usize>,
    /// Channel error probability used for the prior LLR.
    #[arg(long, default_value_t = 0.05)]
    p: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Bp,
    Qccnr,
}

impl DecoderFlags {
    fn spec(&self, seed: u64) -> DecoderSpec {
        let params = DecoderParams {
            max_iter: self.max_iter,
            max_sub: self.max_sub,
            fr: self.fr,
            tol: self.tol,
            scaling_factor: self.scaling_factor,
            df_first: self.df_first,
            df_second: self.df_second,
        };
        let algorithm = match self.algorithm {
            AlgorithmArg::Bp => Algorithm::Bp,
            AlgorithmArg::Qccnr => Algorithm::Qccnr,
        };
        match params.to_spec(algorithm) {
            DecoderSpec::Bp(cfg) => DecoderSpec::Bp(DecoderConfig {
                channel_error_prob: self.p,
                ..cfg
            }),
            DecoderSpec::Qccnr(cfg) => DecoderSpec::Qccnr(qldpc_core::qccnr::QccnrConfig {
                channel_error_prob: self.p,
                rng_seed: seed,
                ..cfg
            }),
        }
    }
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Error side to decode: x uses H_Z, z uses H_X.
    #[arg(long, value_enum, default_value = "x")]
    side: SideArg,
    /// Unsatisfied check indices, comma separated.
    #[arg(long, conflicts_with = "error", value_delimiter = ',', num_args = 0..)]
    syndrome: Option<Vec<usize>>,
    /// Qubit indices of an injected error; its syndrome is decoded.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    error: Option<Vec<usize>>,
    #[command(flatten)]
    decoder: DecoderFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    Cts33,
    Qts60,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, value_enum, default_value = "x")]
    side: SideArg,
    /// Trapping-set fixture of the built-in code.
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
    /// Error support whose unsatisfied checks are analysed.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    error: Option<Vec<usize>>,
    /// Levels of each reported computation tree.
    #[arg(long, default_value_t = 1)]
    ct_levels: usize,
    /// Cap on reported separations.
    #[arg(long, default_value_t = 6)]
    k_max: usize,
    /// Deselection degree for the candidate removal sample.
    #[arg(long, default_value_t = 6)]
    df: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Graphviz output of the fixture subgraph.
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Simulation config file (TOML).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// CSV output path; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-shot JSON records.
    #[arg(long)]
    shots_out: Option<PathBuf>,
}

enum Outcome {
    Ok,
    DecodeFailure,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => cmd_build(&a),
        Command::Decode(a) => cmd_decode(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Simulate(a) => cmd_simulate(&a),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::DecodeFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct BuildMeta<'a> {
    name: &'a str,
    n: usize,
    k: usize,
    h_x_rows: usize,
    h_z_rows: usize,
    css_valid: bool,
}

fn cmd_build(args: &BuildArgs) -> Result<Outcome> {
    let code = args.code.load()?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for (file, h) in [("h_x.alist", &code.h_x), ("h_z.alist", &code.h_z)] {
        fs::write(args.out.join(file), write_alist(h))?;
    }
    let meta = BuildMeta {
        name: &code.name,
        n: code.n,
        k: code.k,
        h_x_rows: code.h_x.rows(),
        h_z_rows: code.h_z.rows(),
        css_valid: code.h_x.mul_transpose(&code.h_z)?.nnz() == 0,
    };
    fs::write(args.out.join("meta.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
    println!("{}: n={} k={} H_X {}x{} H_Z {}x{}", code.name, code.n, code.k, code.h_x.rows(), code.n, code.h_z.rows(), code.n);
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct IterationPoint {
    iteration: usize,
    unsatisfied: usize,
}

#[derive(Serialize)]
struct DecodeReport {
    code: String,
    algorithm: &'static str,
    side: Side,
    syndrome: Vec<usize>,
    estimate: Vec<usize>,
    residual: Vec<usize>,
    success: bool,
    main_converged: bool,
    main_stalled: Option<bool>,
    iterations: usize,
    /// Unsatisfied checks after each main-mode iteration.
    main_trace: Vec<IterationPoint>,
    sub_rounds: Vec<RoundRecord>,
}

fn support_vector(len: usize, indices: &[usize], what: &str) -> Result<BitVector> {
    let mut v = indices.to_vec();
    v.sort_unstable();
    BitVector::from_support(len, v).with_context(|| format!("invalid {what}"))
}

fn cmd_decode(args: &DecodeArgs) -> Result<Outcome> {
    let code = args.code.load()?;
    let side: Side = args.side.into();
    let h = code.check_matrix(side);
    let s = match (&args.syndrome, &args.error) {
        (Some(s), _) => support_vector(h.rows(), s, "syndrome")?,
        (None, Some(e)) => h.syndrome(&support_vector(h.cols(), e, "error")?)?,
        (None, None) => bail!("one of --syndrome or --error is required"),
    };
    let spec = args.decoder.spec(args.seed);
    let (main_cfg, tol) = match &spec {
        DecoderSpec::Bp(cfg) => (*cfg, None),
        DecoderSpec::Qccnr(cfg) => {
            cfg.validate()?;
            let main = DecoderConfig {
                max_iterations: cfg.max_iter,
                scaling_factor: cfg.scaling_factor,
                channel_error_prob: cfg.channel_error_prob,
            };
            (main, (cfg.fr > 0).then_some(cfg.tol))
        }
    };
    let bp = MinSumDecoder::new(h);
    let (traced, stalled) = match tol {
        Some(tol) => {
            let (o, st) = bp.decode_with_stall(&s, &main_cfg, tol, true)?;
            (o, Some(st))
        }
        None => (bp.decode_traced(&s, &main_cfg)?, None),
    };
    let main_trace = traced
        .per_iteration_syndrome
        .as_deref()
        .unwrap_or_default()
        .iter()
        .enumerate()
        .map(|(i, pred)| {
            Ok(IterationPoint {
                iteration: i + 1,
                unsatisfied: pred.xor(&s)?.weight(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let report = match &spec {
        DecoderSpec::Bp(_) => {
            let r = residual(h, &s, &traced.hard_decision)?;
            DecodeReport {
                code: code.name.clone(),
                algorithm: "bp",
                side,
                syndrome: s.support().to_vec(),
                estimate: traced.hard_decision.support().to_vec(),
                success: r.is_zero(),
                residual: r.support().to_vec(),
                main_converged: traced.converged,
                main_stalled: None,
                iterations: traced.iterations_used,
                main_trace,
                sub_rounds: Vec::new(),
            }
        }
        DecoderSpec::Qccnr(cfg) => {
            let out = QccnrDecoder::new(h).decode(&s, cfg)?;
            DecodeReport {
                code: code.name.clone(),
                algorithm: "qccnr",
                side,
                syndrome: s.support().to_vec(),
                estimate: out.estimate.support().to_vec(),
                residual: out.residual_syndrome.support().to_vec(),
                success: out.success,
                main_converged: out.main_converged,
                main_stalled: stalled,
                iterations: out.total_iterations,
                main_trace,
                sub_rounds: out.trace,
            }
        }
    };
    emit(args.out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(if report.success {
        Outcome::Ok
    } else {
        Outcome::DecodeFailure
    })
}

fn node_label(n: Node) -> String {
    match n.kind {
        qldpc_core::tanner::NodeKind::Qubit => format!("v{}", n.id),
        qldpc_core::tanner::NodeKind::Check => format!("c{}", n.id),
    }
}

#[derive(Serialize)]
struct FixtureReport {
    kind: TrappingSetKind,
    label: (usize, usize),
    qubits: Vec<usize>,
    odd_checks: Vec<usize>,
    separations: BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    limiting_checks: BTreeMap<usize, Vec<usize>>,
    /// Node labels per level of each trapped qubit's computation tree.
    computation_trees: BTreeMap<usize, Vec<Vec<String>>>,
}

#[derive(Serialize)]
struct RootReport {
    check: usize,
    leaf_checks: Vec<usize>,
    ims: ImTable,
    max_im_checks: Vec<usize>,
}

#[derive(Serialize)]
struct UnsatReport {
    error: Vec<usize>,
    unsat: Vec<usize>,
    roots: Vec<RootReport>,
    cnr_candidates: Vec<usize>,
    qcnr_candidates: Vec<usize>,
    qcnr_removed: Vec<usize>,
}

#[derive(Serialize)]
struct AnalyzeReport {
    code: String,
    side: Side,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixture: Option<FixtureReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<UnsatReport>,
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    let code = args.code.load()?;
    let side: Side = args.side.into();
    let h = code.check_matrix(side);
    let g = TannerGraph::new(h);
    if args.fixture.is_none() && args.error.is_none() {
        bail!("one of --fixture or --error is required");
    }

    let fixture = match args.fixture {
        None => None,
        Some(which) => {
            let spec = match which {
                Fixture::Cts33 => TrappingSetSpec::cts_3_3(),
                Fixture::Qts60 => TrappingSetSpec::qts_6_0(),
            };
            spec.validate(&g).context("fixture does not match this code")?;
            if let Some(path) = &args.dot {
                fs::write(path, trapping_set_dot(&g, &spec)).with_context(|| format!("writing {}", path.display()))?;
            }
            let mut separations = BTreeMap::new();
            let mut limiting = BTreeMap::new();
            let mut trees = BTreeMap::new();
            for &v in &spec.qubits {
                separations.insert(v, qubit_separation(&g, v, &spec, args.k_max)?);
                if spec.kind == TrappingSetKind::Qts {
                    limiting.insert(v, limiting_checks(&g, v, &spec)?);
                }
                let ct = build_ct(&g, Node::qubit(v), args.ct_levels)?;
                let levels = (0..ct.levels.len())
                    .map(|l| ct.level_nodes(l).into_iter().map(node_label).collect())
                    .collect();
                trees.insert(v, levels);
            }
            Some(FixtureReport {
                kind: spec.kind,
                label: spec.label,
                qubits: spec.qubits.clone(),
                odd_checks: spec.odd_checks.clone(),
                separations,
                limiting_checks: limiting,
                computation_trees: trees,
            })
        }
    };

    let error = match &args.error {
        None => None,
        Some(e) => {
            let e = support_vector(h.cols(), e, "error")?;
            let unsat = h.syndrome(&e)?.support().to_vec();
            let mut roots = Vec::new();
            for &c in &unsat {
                let leaves = leaf_checks(&g, c)?;
                let ims = find_ims(&g, &unsat, &leaves)?;
                roots.push(RootReport {
                    check: c,
                    leaf_checks: leaves,
                    max_im_checks: ims.argmax(),
                    ims,
                });
            }
            let cfg = RemovalConfig::new(args.df, args.seed);
            let plain = cnr(h, &unsat, &cfg)?;
            let filtered = qcnr(h, &unsat, &cfg)?;
            Some(UnsatReport {
                error: e.support().to_vec(),
                unsat,
                roots,
                cnr_candidates: plain.sample_space,
                qcnr_candidates: filtered.sample_space,
                qcnr_removed: filtered.removed_checks,
            })
        }
    };

    let report = AnalyzeReport {
        code: code.name.clone(),
        side,
        fixture,
        error,
    };
    emit(args.out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(Outcome::Ok)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome> {
    let mut cfg = SimConfig::load(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let code = match cfg.code.as_str() {
        name if builtin(name).is_some() => builtin(name).expect("checked"),
        path => {
            let path = args.config.parent().unwrap_or(Path::new(".")).join(path);
            CodeDefinition::load(&path)
                .with_context(|| format!("reading code {}", path.display()))?
                .build()?
        }
    };
    let spec = cfg.params.to_spec(cfg.decoder);
    let options = SimOptions {
        threads: args.threads.or(cfg.threads).unwrap_or(1),
        keep_shots: args.shots_out.is_some(),
        record_timing: cfg.record_timing,
    };
    let summaries = run_memory_experiment(&code, &spec, cfg.noise, &cfg.p, cfg.shots, cfg.seed, &options)?;

    let out = args.out.clone().or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("results.csv"));
    let file = fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
    write_csv(file, &summaries)?;
    if let Some(path) = &args.shots_out {
        fs::write(path, serde_json::to_string(&summaries)? + "\n")?;
    }

    println!("{:<14} {:<7} {:>8} {:>7} {:>9} {:>10} {:>10}", "code", "decoder", "p", "shots", "failures", "ler", "stderr");
    for s in &summaries {
        println!(
            "{:<14} {:<7} {:>8} {:>7} {:>9} {:>10.3e} {:>10.3e}",
            s.code, s.decoder, s.p, s.shots, s.failures, s.ler, s.stderr
        );
    }
    Ok(Outcome::Ok)
}
