//! Code-capacity memory experiments: noise sampling, failure classification,
//! Monte Carlo LER estimation, CSV output and threshold crossing scans.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{CssCode, Side};
use crate::error::{Error, Result};
use crate::gf2::{BitVector, RowSpace};
use crate::minsum::{DecoderConfig, MinSumDecoder};
use crate::qccnr::{QccnrConfig, QccnrDecoder};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    /// Independent X flips.
    Bitflip,
    /// X, Y, Z each with probability `p/3`.
    Depolarizing,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub p: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("error probability {p} outside [0, 1]")));
        }
        Ok(Self { kind, p })
    }

    /// Marginal flip probability of one side's component.
    pub fn marginal(&self, side: Side) -> f64 {
        match (self.kind, side) {
            (NoiseKind::Bitflip, Side::X) => self.p,
            (NoiseKind::Bitflip, Side::Z) => 0.0,
            (NoiseKind::Depolarizing, _) => 2.0 * self.p / 3.0,
        }
    }
}

/// Samples i.i.d. Pauli errors; returns the `(x_part, z_part)` supports.
pub fn sample_error(model: &NoiseModel, n: usize, seed: u64) -> (BitVector, BitVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::new();
    let mut z = Vec::new();
    for q in 0..n {
        let u: f64 = rng.gen();
        match model.kind {
            NoiseKind::Bitflip => {
                if u < model.p {
                    x.push(q);
                }
            }
            NoiseKind::Depolarizing => {
                let third = model.p / 3.0;
                if u < third {
                    x.push(q);
                } else if u < 2.0 * third {
                    x.push(q);
                    z.push(q);
                } else if u < model.p {
                    z.push(q);
                }
            }
        }
    }
    (
        BitVector::from_support(n, x).expect("sorted in-range support"),
        BitVector::from_support(n, z).expect("sorted in-range support"),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureClass {
    Success,
    SyndromeMismatch,
    LogicalFailure,
}

impl FailureClass {
    pub fn is_failure(self) -> bool {
        self != FailureClass::Success
    }
}

/// Classifies `injected + estimate`: a nonzero syndrome is a mismatch, a
/// stabilizer is a success, anything else flips a logical.
pub fn is_logical_failure(code: &CssCode, injected: &BitVector, estimate: &BitVector, side: Side) -> Result<FailureClass> {
    let judge = FailureJudge::new(code);
    judge.classify(code, injected, estimate, side)
}

/// Caches the stabilizer row spaces used by [`is_logical_failure`].
#[derive(Clone, Debug)]
pub struct FailureJudge {
    x_stabilizers: RowSpace,
    z_stabilizers: RowSpace,
}

impl FailureJudge {
    pub fn new(code: &CssCode) -> Self {
        Self {
            x_stabilizers: code.stabilizer_matrix(Side::X).row_space(),
            z_stabilizers: code.stabilizer_matrix(Side::Z).row_space(),
        }
    }

    pub fn classify(&self, code: &CssCode, injected: &BitVector, estimate: &BitVector, side: Side) -> Result<FailureClass> {
        let residual = injected.xor(estimate)?;
        if !code.check_matrix(side).syndrome(&residual)?.is_zero() {
            return Ok(FailureClass::SyndromeMismatch);
        }
        let span = match side {
            Side::X => &self.x_stabilizers,
            Side::Z => &self.z_stabilizers,
        };
        Ok(if span.contains(&residual) {
            FailureClass::Success
        } else {
            FailureClass::LogicalFailure
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum DecoderSpec {
    Bp(DecoderConfig),
    Qccnr(QccnrConfig),
}

impl DecoderSpec {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderSpec::Bp(_) => "bp",
            DecoderSpec::Qccnr(_) => "qccnr",
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            DecoderSpec::Bp(cfg) => cfg.validate(),
            DecoderSpec::Qccnr(cfg) => cfg.validate(),
        }
    }
}

/// Decoders for both check matrices of a code, built once and shared by shots.
#[derive(Clone, Debug)]
enum SideDecoders {
    Bp { x: MinSumDecoder, z: MinSumDecoder },
    Qccnr { x: QccnrDecoder, z: QccnrDecoder },
}

impl SideDecoders {
    fn new(code: &CssCode, spec: &DecoderSpec) -> Self {
        match spec {
            DecoderSpec::Bp(_) => SideDecoders::Bp {
                x: MinSumDecoder::new(code.check_matrix(Side::X)),
                z: MinSumDecoder::new(code.check_matrix(Side::Z)),
            },
            DecoderSpec::Qccnr(_) => SideDecoders::Qccnr {
                x: QccnrDecoder::new(code.check_matrix(Side::X)),
                z: QccnrDecoder::new(code.check_matrix(Side::Z)),
            },
        }
    }

    fn decode(&self, spec: &DecoderSpec, side: Side, syndrome: &BitVector, p: f64, shot_seed: u64) -> Result<BitVector> {
        let p = p.clamp(1e-9, 0.5);
        match (self, spec) {
            (SideDecoders::Bp { x, z }, DecoderSpec::Bp(cfg)) => {
                let cfg = DecoderConfig {
                    channel_error_prob: p,
                    ..*cfg
                };
                let dec = if side == Side::X { x } else { z };
                Ok(dec.decode(syndrome, &cfg)?.hard_decision)
            }
            (SideDecoders::Qccnr { x, z }, DecoderSpec::Qccnr(cfg)) => {
                let cfg = QccnrConfig {
                    channel_error_prob: p,
                    rng_seed: seed::derive(shot_seed, side as u64),
                    ..cfg.clone()
                };
                let dec = if side == Side::X { x } else { z };
                Ok(dec.decode(syndrome, &cfg)?.estimate)
            }
            _ => unreachable!("decoders are built from the same spec"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub shot: usize,
    pub seed: u64,
    pub x_error: Vec<usize>,
    pub z_error: Vec<usize>,
    pub x_class: FailureClass,
    pub z_class: FailureClass,
}

impl ShotRecord {
    /// The worse of the two sides.
    pub fn class(&self) -> FailureClass {
        match (self.x_class, self.z_class) {
            (FailureClass::LogicalFailure, _) | (_, FailureClass::LogicalFailure) => FailureClass::LogicalFailure,
            (FailureClass::SyndromeMismatch, _) | (_, FailureClass::SyndromeMismatch) => FailureClass::SyndromeMismatch,
            _ => FailureClass::Success,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub code: String,
    pub decoder: String,
    pub p: f64,
    pub shots: usize,
    /// Shots whose residual is not a stabilizer on some side.
    pub failures: usize,
    pub logical_failures: usize,
    pub syndrome_mismatches: usize,
    pub ler: f64,
    pub stderr: f64,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shot_records: Option<Vec<ShotRecord>>,
}

impl SimSummary {
    fn from_records(code: &str, decoder: &str, p: f64, records: Vec<ShotRecord>, seconds: f64, keep: bool) -> Self {
        let shots = records.len();
        let classes: Vec<FailureClass> = records.iter().map(ShotRecord::class).collect();
        let failures = classes.iter().filter(|c| c.is_failure()).count();
        let ler = failures as f64 / shots as f64;
        Self {
            code: code.to_string(),
            decoder: decoder.to_string(),
            p,
            shots,
            failures,
            logical_failures: classes.iter().filter(|&&c| c == FailureClass::LogicalFailure).count(),
            syndrome_mismatches: classes.iter().filter(|&&c| c == FailureClass::SyndromeMismatch).count(),
            ler,
            stderr: (ler * (1.0 - ler) / shots as f64).sqrt(),
            seconds,
            shot_records: keep.then_some(records),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Worker threads; 0 uses rayon's default.
    pub threads: usize,
    pub keep_shots: bool,
    /// When false, `seconds` is reported as 0 so outputs are byte-reproducible.
    pub record_timing: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            threads: 1,
            keep_shots: false,
            record_timing: false,
        }
    }
}

/// Seed of one shot; independent of scheduling.
pub fn shot_seed(master: u64, p_index: usize, shot: usize) -> u64 {
    seed::derive2(master, p_index as u64, shot as u64)
}

/// Runs `shots` memory-experiment shots per error probability. X and Z
/// components are decoded independently.
pub fn run_memory_experiment(
    code: &CssCode,
    decoder: &DecoderSpec,
    noise: NoiseKind,
    p_list: &[f64],
    shots: usize,
    master_seed: u64,
    options: &SimOptions,
) -> Result<Vec<SimSummary>> {
    if shots == 0 {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    decoder.validate()?;
    let models = p_list
        .iter()
        .map(|&p| NoiseModel::new(noise, p))
        .collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let decoders = SideDecoders::new(code, decoder);
    let judge = FailureJudge::new(code);

    let mut out = Vec::with_capacity(models.len());
    for (p_index, model) in models.iter().enumerate() {
        let start = Instant::now();
        let records = pool.install(|| {
            (0..shots)
                .into_par_iter()
                .map(|shot| run_shot(code, decoder, &decoders, &judge, model, shot_seed(master_seed, p_index, shot), shot))
                .collect::<Result<Vec<_>>>()
        })?;
        let seconds = if options.record_timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        out.push(SimSummary::from_records(
            &code.name,
            decoder.name(),
            model.p,
            records,
            seconds,
            options.keep_shots,
        ));
    }
    Ok(out)
}

fn run_shot(
    code: &CssCode,
    spec: &DecoderSpec,
    decoders: &SideDecoders,
    judge: &FailureJudge,
    model: &NoiseModel,
    seed: u64,
    shot: usize,
) -> Result<ShotRecord> {
    let (x_err, z_err) = sample_error(model, code.n, seed);
    let mut classes = [FailureClass::Success; 2];
    for (slot, side, err) in [(0, Side::X, &x_err), (1, Side::Z, &z_err)] {
        let syndrome = code.check_matrix(side).syndrome(err)?;
        let estimate = if syndrome.is_zero() {
            BitVector::zeros(code.n)
        } else {
            decoders.decode(spec, side, &syndrome, model.marginal(side), seed)?
        };
        classes[slot] = judge.classify(code, err, &estimate, side)?;
    }
    Ok(ShotRecord {
        shot,
        seed,
        x_error: x_err.support().to_vec(),
        z_error: z_err.support().to_vec(),
        x_class: classes[0],
        z_class: classes[1],
    })
}

pub const CSV_HEADER: [&str; 8] = ["code", "decoder", "p", "shots", "failures", "ler", "stderr", "seconds"];

#[derive(Serialize)]
struct CsvRow<'a> {
    code: &'a str,
    decoder: &'a str,
    p: f64,
    shots: usize,
    failures: usize,
    ler: f64,
    stderr: f64,
    seconds: f64,
}

pub fn write_csv<W: Write>(writer: W, summaries: &[SimSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for s in summaries {
        w.serialize(CsvRow {
            code: &s.code,
            decoder: &s.decoder,
            p: s.p,
            shots: s.shots,
            failures: s.failures,
            ler: s.ler,
            stderr: s.stderr,
            seconds: s.seconds,
        })
        .map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// One LER measurement as read back from a results CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub code: String,
    pub decoder: String,
    pub p: f64,
    pub shots: usize,
    pub failures: usize,
    pub ler: f64,
    pub stderr: f64,
    pub seconds: f64,
}

pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Vec<CsvRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse(format!("unexpected CSV header {headers:?}")));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

/// Decoder section of a simulation config; unset fields take library defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderParams {
    pub max_iter: Option<usize>,
    pub max_sub: Option<usize>,
    pub fr: Option<usize>,
    pub tol: Option<usize>,
    pub scaling_factor: Option<f64>,
    pub df_first: Option<usize>,
    pub df_second: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Bp,
    Qccnr,
}

impl DecoderParams {
    pub fn to_spec(&self, algorithm: Algorithm) -> DecoderSpec {
        match algorithm {
            Algorithm::Bp => {
                let d = DecoderConfig::default();
                DecoderSpec::Bp(DecoderConfig {
                    max_iterations: self.max_iter.unwrap_or(d.max_iterations),
                    scaling_factor: self.scaling_factor.unwrap_or(d.scaling_factor),
                    ..d
                })
            }
            Algorithm::Qccnr => {
                let d = QccnrConfig::default();
                let fr = self.fr.unwrap_or(d.fr);
                let cfg = QccnrConfig {
                    max_iter: self.max_iter.unwrap_or(d.max_iter),
                    max_sub: self.max_sub.unwrap_or(d.max_sub),
                    fr,
                    tol: self.tol.unwrap_or(d.tol),
                    scaling_factor: self.scaling_factor.unwrap_or(d.scaling_factor),
                    ..d
                };
                let custom = self.df_first.is_some() || self.df_second.is_some() || fr != 200;
                DecoderSpec::Qccnr(if custom {
                    cfg.with_split_schedule(self.df_first.unwrap_or(6), self.df_second.unwrap_or(1))
                } else {
                    cfg
                })
            }
        }
    }
}

/// Simulation config file.
///
/// ```toml
/// code = "ghp-882-24"        # built-in name or path to a code definition
/// decoder = "qccnr"
/// noise = "bitflip"
/// p = [0.04, 0.05, 0.06]
/// shots = 2000
/// seed = 7
/// out = "results.csv"
/// [params]
/// fr = 200
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub code: String,
    pub decoder: Algorithm,
    pub noise: NoiseKind,
    pub p: Vec<f64>,
    pub shots: usize,
    #[serde(default)]
    pub seed: u64,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub params: DecoderParams,
}

impl SimConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if self.p.is_empty() {
            return Err(Error::Config("p list is empty".into()));
        }
        for &p in &self.p {
            NoiseModel::new(self.noise, p)?;
        }
        self.params.to_spec(self.decoder).validate()
    }
}

/// Anything that can report an LER at a physical error rate.
pub trait LerSource {
    fn label(&self) -> String;
    fn ler(&self, p: f64) -> Result<f64>;
}

/// Monte Carlo LER of one code under one decoder.
pub struct MonteCarloLer<'a> {
    pub code: &'a CssCode,
    pub decoder: &'a DecoderSpec,
    pub noise: NoiseKind,
    pub shots: usize,
    pub seed: u64,
    pub options: SimOptions,
}

impl LerSource for MonteCarloLer<'_> {
    fn label(&self) -> String {
        self.code.name.clone()
    }

    fn ler(&self, p: f64) -> Result<f64> {
        let s = run_memory_experiment(self.code, self.decoder, self.noise, &[p], self.shots, self.seed, &self.options)?;
        Ok(s[0].ler)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LerCurve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub first: String,
    pub second: String,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub curves: Vec<LerCurve>,
    pub crossings: Vec<Crossing>,
}

/// Evaluates every source on the grid and reports pairwise crossings.
pub fn threshold_scan(sources: &[&dyn LerSource], p_grid: &[f64]) -> Result<ThresholdReport> {
    if sources.len() < 2 {
        return Err(Error::Config("threshold scan needs at least two codes".into()));
    }
    if p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("p grid must be strictly increasing".into()));
    }
    let mut curves = Vec::with_capacity(sources.len());
    for src in sources {
        let points = p_grid
            .iter()
            .map(|&p| src.ler(p).map(|l| (p, l)))
            .collect::<Result<Vec<_>>>()?;
        curves.push(LerCurve {
            label: src.label(),
            points,
        });
    }
    let mut crossings = Vec::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            crossings.extend(curve_crossings(&curves[i], &curves[j]));
        }
    }
    Ok(ThresholdReport { curves, crossings })
}

/// Sign changes of `ln LER_a - ln LER_b` between neighbouring grid points,
/// located by linear interpolation. Points with a zero LER are skipped.
pub fn curve_crossings(a: &LerCurve, b: &LerCurve) -> Vec<Crossing> {
    let diffs: Vec<(f64, f64)> = a
        .points
        .iter()
        .zip(&b.points)
        .filter(|((_, la), (_, lb))| *la > 0.0 && *lb > 0.0)
        .map(|(&(p, la), &(_, lb))| (p, la.ln() - lb.ln()))
        .collect();
    diffs
        .windows(2)
        .filter(|w| w[0].1 * w[1].1 < 0.0)
        .map(|w| {
            let ((p0, d0), (p1, d1)) = (w[0], w[1]);
            Crossing {
                first: a.label.clone(),
                second: b.label.clone(),
                p: p0 + (p1 - p0) * d0 / (d0 - d1),
            }
        })
        .collect()
}
