use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use lrclab::bounds::{self, BoundCurve, BoundKind, BoundsError, Q};
use lrclab::distance::{self, construct_h, degree_lower_bound, DistanceError, HVariant};
use lrclab::evalcode::{EvalCodeError, ErasurePattern};
use lrclab::export;
use lrclab::galois::{Field, GaloisError};
use lrclab::presets::{distance_report, DistanceOptions, Preset, PresetError};
use lrclab::structure::{self, CheckStatus, StructureError};
use lrclab::tower::{TowerError, TowerSpec, DEFAULT_PLACE_CAP};

const ENUMERATION_Q: [u64; 5] = [2, 4, 8, 16, 32];

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Capability(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Capability(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<TowerError> for CliError {
    fn from(e: TowerError) -> Self {
        match e {
            TowerError::CapExceeded { .. } | TowerError::Unsupported(_) => CliError::Capability(e.to_string()),
            _ => CliError::Verification(e.to_string()),
        }
    }
}

impl From<GaloisError> for CliError {
    fn from(e: GaloisError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<DistanceError> for CliError {
    fn from(e: DistanceError) -> Self {
        match e {
            DistanceError::BudgetExceeded { .. } | DistanceError::Unsupported(_) => CliError::Capability(e.to_string()),
            DistanceError::EvalCode(e) => e.into(),
            _ => CliError::Verification(e.to_string()),
        }
    }
}

impl From<EvalCodeError> for CliError {
    fn from(e: EvalCodeError) -> Self {
        match e {
            EvalCodeError::Tower(e) => e.into(),
            EvalCodeError::LocalityUndefined(_) | EvalCodeError::BoxTooLong { .. } => CliError::Capability(e.to_string()),
            _ => CliError::Verification(e.to_string()),
        }
    }
}

impl From<PresetError> for CliError {
    fn from(e: PresetError) -> Self {
        match e {
            PresetError::Unknown(_) | PresetError::OutOfRange { .. } => {
                CliError::Usage(format!("{e}\nhint: try `f8-prop44`, `gs-thm34-q8` or `gs-cor38-q8-l5`"))
            }
            PresetError::Tower(e) => e.into(),
            PresetError::EvalCode(e) => e.into(),
            PresetError::Distance(e) => e.into(),
        }
    }
}

impl From<StructureError> for CliError {
    fn from(e: StructureError) -> Self {
        match e {
            StructureError::Unsupported { .. } => CliError::Capability(e.to_string()),
            StructureError::Galois(e) => e.into(),
            StructureError::Tower(e) => e.into(),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "lrclab", version, about = "Locally recoverable codes from towers of function fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Bin,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TowerArg {
    Gs,
    F4,
    F8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Describe GF(2^m), given as --m or as --q = 2^m.
    Field {
        #[arg(long, conflicts_with = "q")]
        m: Option<u32>,
        #[arg(long)]
        q: Option<u64>,
        /// List every element.
        #[arg(long)]
        elements: bool,
    },
    /// Enumerate the completely splitting places of a tower.
    Places {
        #[arg(long, value_enum, default_value = "gs")]
        tower: TowerArg,
        #[arg(long, default_value_t = 8)]
        q: u64,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Also write the splitting digraph in DOT format.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a preset code; json gives its parameters, csv and bin its generator matrix.
    Build {
        #[arg(long)]
        preset: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Exhaustive-search budget in codewords.
        #[arg(long, default_value_t = 1 << 24)]
        budget: u128,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stated parameters of a preset next to the measured ones.
    Params {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a seeded random message, erase one symbol and repair it.
    RepairDemo {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Erased coordinate; drawn from the seed when omitted.
        #[arg(long)]
        position: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum-distance report for a preset.
    Distance {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = distance::DEFAULT_BUDGET)]
        budget: u128,
        /// Random codewords to sample for an upper bound.
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rank checks allowed for an erasure-rank lower bound; 0 disables.
        #[arg(long, default_value_t = 0)]
        certificate_budget: u128,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the structural checks at q.
    Verify {
        #[arg(long, default_value_t = 8)]
        q: u64,
        /// Run a single check by name.
        #[arg(long)]
        proposition: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rate thresholds at one delta, or a curve sampled at --points.
    Bounds {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, conflicts_with = "points")]
        delta: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Table rows and the box sweep as (delta, R) points with bound checks.
    Scatter {
        #[arg(long, default_value_t = 8)]
        q: u64,
        /// Skip the sweep over the x_0 bound.
        #[arg(long)]
        no_sweep: bool,
        /// Build every sweep code and report its explicit low-weight codeword.
        #[arg(long)]
        witness: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn emit_json(out: &Option<PathBuf>, value: &Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).expect("json");
    s.push('\n');
    emit(out, s.as_bytes())
}

fn check_enumeration_q(q: u64) -> Result<(), CliError> {
    if ENUMERATION_Q.contains(&q) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("q must be one of {ENUMERATION_Q:?}, got {q}")))
    }
}

fn rational(x: &Q) -> Value {
    json!(format!("{}/{}", x.numer(), x.denom()))
}

fn cmd_field(m: Option<u32>, q: Option<u64>, elements: bool) -> Result<(), CliError> {
    let m = match (m, q) {
        (Some(m), _) => m,
        (None, Some(q)) if q >= 2 && q.is_power_of_two() => q.trailing_zeros(),
        (None, Some(q)) => return Err(CliError::Usage(format!("q = {q} is not a power of two"))),
        (None, None) => return Err(CliError::Usage("give --m or --q".into())),
    };
    let field = Field::with_degree(m)?;
    let mut v = json!({
        "schema": "lrclab-field/1",
        "m": m,
        "size": field.size(),
        "modulus": format!("{:#x}", field.modulus()),
        "generator": format!("{:#x}", field.generator()),
    });
    if elements {
        v["elements"] = field
            .elements()
            .iter()
            .map(|&a| json!({"hex": export::hex_symbol(&field, a), "power": field.power_notation(a)}))
            .collect();
    }
    emit_json(&None, &v)
}

fn cmd_places(
    tower: TowerArg,
    q: u64,
    depth: usize,
    format: Format,
    graph: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let spec = match tower {
        TowerArg::Gs => {
            check_enumeration_q(q)?;
            TowerSpec::garcia_stichtenoth(q)?
        }
        TowerArg::F4 => TowerSpec::quadratic_f4(),
        TowerArg::F8 => TowerSpec::quadratic_f8(),
    };
    let spec = Arc::new(spec);
    let places = spec.enumerate_places(depth, DEFAULT_PLACE_CAP)?;
    eprintln!("{}: {} places at depth {depth}", spec.name(), places.len());
    if let Some(path) = &graph {
        let g = spec.split_graph()?;
        std::fs::write(path, export::graph_dot(spec.field(), &g))?;
    }
    match format {
        Format::Csv => emit(&out, export::places_csv(&places).as_bytes()),
        Format::Json => emit_json(&out, &export::places_json(&places)),
        Format::Bin => Err(CliError::Usage("places support csv and json".into())),
    }
}

fn cmd_build(name: &str, format: Format, budget: u128, out: Option<PathBuf>) -> Result<(), CliError> {
    let preset = Preset::parse(name)?;
    let code = preset.build()?;
    match format {
        Format::Json => {
            let opts = DistanceOptions { budget, ..Default::default() };
            let report = distance_report(&preset, &code, &opts)?;
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            emit_json(
                &out,
                &json!({
                    "schema": "lrclab-build/1",
                    "preset": preset.name,
                    "n": code.len(),
                    "k": code.dimension(),
                    "d": report.exact.then_some(report.d_lower),
                    "dLower": report.d_lower,
                    "dUpper": report.d_upper,
                    "r": code.locality(),
                    "box": preset.bounds,
                    "kNominal": code.nominal_dimension(),
                    "repairRule": code.repair_index().rule(),
                }),
            )
        }
        Format::Csv => emit(&out, export::matrix_csv(code.field(), &code.generator_matrix()).as_bytes()),
        Format::Bin => {
            if out.is_none() {
                return Err(CliError::Usage("binary output needs --out".into()));
            }
            emit(&out, &export::matrix_binary(code.field(), &code.generator_matrix()))
        }
    }
}

fn cmd_params(name: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    let preset = Preset::parse(name)?;
    let code = preset.build()?;
    let bound = degree_lower_bound(&code)?;
    let claimed = preset.claimed();
    let mut v = json!({
        "schema": "lrclab-params/1",
        "preset": preset.name,
        "box": preset.bounds,
        "claimed": claimed,
        "measured": {
            "n": code.len(),
            "k": code.dimension(),
            "kNominal": code.nominal_dimension(),
            "r": code.locality(),
            "degreeBound": bound.value,
        },
    });
    if let Some(c) = claimed {
        let p = bounds::RatePoint::new(&preset.name, c.n, c.k, c.d, c.r);
        v["claimedRatios"] = json!({
            "delta": rational(&p.delta()),
            "R": rational(&p.rate()),
            "rOverN": rational(&p.r_over_n()),
        });
        if (c.n, c.k, c.r) != (code.len() as u64, code.dimension() as u64, code.locality() as u64) {
            eprintln!("note: measured (n, k, r) differ from the stated parameters");
        }
    }
    emit_json(&out, &v)
}

fn cmd_repair_demo(name: &str, seed: u64, position: Option<usize>, out: Option<PathBuf>) -> Result<(), CliError> {
    let preset = Preset::parse(name)?;
    let code = preset.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = code.field().size();
    let message: Vec<u32> = (0..code.dimension()).map(|_| rng.gen_range(0..size) as u32).collect();
    let word = code.encode(&message)?;
    let pos = match position {
        Some(p) if p >= code.len() => {
            return Err(CliError::Usage(format!("position {p} is outside 0..{}", code.len())))
        }
        Some(p) => p,
        None => rng.gen_range(0..code.len()),
    };
    let repaired = code.repair(&ErasurePattern::single(&word, pos))?;
    let fiber = code.repair_index().fiber(pos);
    let field = code.field();
    let ok = repaired == word[pos];
    emit_json(
        &out,
        &json!({
            "schema": "lrclab-repair/1",
            "preset": preset.name,
            "seed": seed,
            "position": pos,
            "place": code.places().get(pos).coords.iter().map(|&c| export::hex_symbol(field, c)).collect::<Vec<_>>(),
            "rule": code.repair_index().rule(),
            "fiber": fiber,
            "original": export::hex_symbol(field, word[pos]),
            "repaired": export::hex_symbol(field, repaired),
            "ok": ok,
        }),
    )?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Verification(format!("repair of position {pos} returned the wrong symbol")))
    }
}

fn cmd_distance(
    name: &str,
    budget: u128,
    samples: u64,
    seed: u64,
    certificate_budget: u128,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let preset = Preset::parse(name)?;
    let code = preset.build()?;
    let opts = DistanceOptions { budget, sample_trials: samples, seed, certificate_budget };
    let report = distance_report(&preset, &code, &opts)?;
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    let mut v = serde_json::to_value(&report).expect("report");
    v["schema"] = json!("lrclab-distance/1");
    v["preset"] = json!(preset.name);
    emit_json(&out, &v)
}

fn cmd_verify(q: u64, proposition: Option<String>, out: Option<PathBuf>) -> Result<(), CliError> {
    let results = match proposition {
        Some(name) => {
            let id = structure::PropositionId::parse(&name)
                .ok_or_else(|| CliError::Usage(format!("unknown proposition `{name}`")))?;
            vec![structure::check(id, q)?]
        }
        None => structure::verify_all(q)?,
    };
    let failed: Vec<_> = results.iter().filter(|r| r.is_failure()).map(|r| r.proposition_id.name()).collect();
    let passed = results.iter().filter(|r| r.status == CheckStatus::Passed).count();
    emit_json(&out, &json!({"schema": "lrclab-verify/1", "q": q, "results": results}))?;
    eprintln!("{passed} checks passed, {} failed, {} not applicable", failed.len(), results.len() - passed - failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("failed: {}", failed.join(", "))))
    }
}

fn cmd_bounds(r: u64, q: u64, delta: Option<f64>, points: Option<usize>, tol: f64, out: Option<PathBuf>) -> Result<(), CliError> {
    match (delta, points) {
        (Some(d), _) => {
            let exact = Q::approximate_float(d).ok_or_else(|| CliError::Usage(format!("bad delta {d}")))?;
            if !(0.0..=1.0).contains(&d) {
                return Err(CliError::Usage(format!("delta = {d} is outside [0, 1]")));
            }
            let btv = bounds::btv_threshold(r, q, exact)?;
            let paper = bounds::paper_threshold(r, q, exact)?;
            let gv = match bounds::gv_threshold(r, q, d, tol) {
                Ok(g) => json!(g),
                Err(BoundsError::DeltaOutOfRange(_)) => Value::Null,
                Err(e) => return Err(e.into()),
            };
            let f = |x: &Q| *x.numer() as f64 / *x.denom() as f64;
            emit_json(
                &out,
                &json!({"schema": "lrclab-bounds/1", "r": r, "q": q, "delta": d, "btv": f(&btv), "paper": f(&paper), "gv": gv}),
            )
        }
        (None, Some(n)) if n >= 2 => {
            let mut s = String::from("# lrclab-bounds v1\ndelta,btv,paper,gv\n");
            let curve = |kind| BoundCurve { kind, r, q };
            for i in 1..n {
                let d = i as f64 / n as f64;
                s.push_str(&format!(
                    "{d},{},{},{}\n",
                    curve(BoundKind::Btv).eval(d)?,
                    curve(BoundKind::PaperIneq).eval(d)?,
                    bounds::gv_threshold(r, q, d, tol)?.rate
                ));
            }
            emit(&out, s.as_bytes())
        }
        _ => Err(CliError::Usage("give --delta or --points (at least 2)".into())),
    }
}

fn cmd_scatter(q: u64, no_sweep: bool, witness: bool, out: Option<PathBuf>) -> Result<(), CliError> {
    check_enumeration_q(q)?;
    if q < 4 {
        return Err(CliError::Capability("the table rows need q >= 4".into()));
    }
    let mut points = bounds::table_rows(q);
    let sweep = if no_sweep { Vec::new() } else { bounds::cor38_sweep(q) };
    points.extend(sweep.iter().cloned());
    for note in bounds::table_errata(q) {
        eprintln!("erratum: {note}");
    }
    if witness {
        for p in &sweep {
            let l = p.label.rsplit_once("-l").and_then(|(_, l)| l.parse::<u32>().ok()).expect("sweep label");
            let preset = Preset::parse(&format!("gs-cor38-q{q}-l{l}"))?;
            let code = preset.build()?;
            match construct_h(&code, HVariant::Cor38 { l }) {
                Ok(h) => eprintln!("witness l={l}: weight {} (stated {})", h.weight, p.d),
                Err(DistanceError::Construction(e)) => {
                    let w = e.fallback.as_ref().map(|h| h.weight);
                    eprintln!("witness l={l}: construction fails ({}); best weight {w:?} (stated {})", e.detail, p.d)
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let rows = bounds::scatter(&points, q)?;
    emit(&out, bounds::scatter_csv(&rows).as_bytes())
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("LRCLAB_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::Usage(format!("LRCLAB_THREADS = `{v}` is not a number")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Field { m, q, elements } => cmd_field(m, q, elements),
        Command::Places { tower, q, depth, format, graph, out } => cmd_places(tower, q, depth, format, graph, out),
        Command::Build { preset, format, budget, out } => cmd_build(&preset, format, budget, out),
        Command::Params { preset, out } => cmd_params(&preset, out),
        Command::RepairDemo { preset, seed, position, out } => cmd_repair_demo(&preset, seed, position, out),
        Command::Distance { preset, budget, samples, seed, certificate_budget, out } => {
            cmd_distance(&preset, budget, samples, seed, certificate_budget, out)
        }
        Command::Verify { q, proposition, out } => cmd_verify(q, proposition, out),
        Command::Bounds { r, q, delta, points, tol, out } => cmd_bounds(r, q, delta, points, tol, out),
        Command::Scatter { q, no_sweep, witness, out } => cmd_scatter(q, no_sweep, witness, out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
