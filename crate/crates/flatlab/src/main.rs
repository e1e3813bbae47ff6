//! Command-line entry point: testing, correction, shadow and expansion
//! reports, the spectral battery, lifted codes, instance generation, and
//! experiment sweeps.
//!
//! Exit codes: 0 ok, 1 some check violated (or a correction failed to
//! converge), 2 usage or I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use flatlab::corrector::{self, CorrectionOptions, CorrectionTrace};
use flatlab::flats::{self, FlatSet, ZoomKind};
use flatlab::generate;
use flatlab::gf::{FieldElement, FieldSpec};
use flatlab::io;
use flatlab::poly::decode_point;
use flatlab::report::{CheckRecord, Quantity, Report, Verdict};
use flatlab::spectral;
use flatlab::tester::{self, TestReport};
use flatlab::{lifted, Error, DEFAULT_ENUMERATION_CAP};

#[derive(Parser)]
#[command(name = "flatlab", version, about = "Local testing and correction of Reed-Muller and lifted affine-invariant codes, with an exact affine Grassmann spectral laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rejection probability of the flat tester on a function file.
    Test(TestArgs),
    /// Iterative local correction of a function file.
    Correct(CorrectArgs),
    /// Shadow bound report for a set of flats.
    Shadow(SetArgs),
    /// Expansion (stay probability) report for a set of flats.
    Expansion(SetArgs),
    /// Full spectral battery for a set of flats.
    Spectra(SetArgs),
    /// Lifted affine-invariant codes.
    #[command(subcommand)]
    Lifted(LiftedCommand),
    /// Generates instance files.
    Gen(GenArgs),
    /// Named experiment sweeps, CSV output.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum LiftedCommand {
    /// Rejection probability of the k-flat lift tester.
    Test(LiftedTestArgs),
    /// Local correction against a base code.
    Correct(LiftedCorrectArgs),
}

#[derive(Args)]
struct TestArgs {
    /// Truth-table file.
    #[arg(long = "fn")]
    function: PathBuf,
    #[arg(long)]
    degree: u32,
    /// Flat dimension; derived from (q, p, degree) when omitted.
    #[arg(long = "flat-dim")]
    flat_dim: Option<usize>,
    /// Exact enumeration (default).
    #[arg(long, conflicts_with_all = ["samples", "seed"])]
    exact: bool,
    /// Monte Carlo sample count.
    #[arg(long, requires = "seed")]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Enumeration cap.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    /// Report file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorrectArgs {
    #[arg(long = "fn")]
    function: PathBuf,
    #[arg(long)]
    degree: u32,
    #[arg(long = "flat-dim")]
    flat_dim: Option<usize>,
    #[arg(long = "max-iters")]
    max_iters: Option<u64>,
    /// Write the corrected truth table here.
    #[arg(long = "emit-fn")]
    emit_fn: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SetArgs {
    /// Truth-table file; the set is its rejecting flats at --degree.
    #[arg(long = "fn", conflicts_with_all = ["zoom", "random"])]
    function: Option<PathBuf>,
    #[arg(long)]
    degree: Option<u32>,
    /// Zoom family, e.g. point:5, hyperplane:3:1, point-linear:6,
    /// hyperplane-linear:3 (points by canonical integer encoding).
    #[arg(long)]
    zoom: Option<String>,
    /// A uniformly random set of this many flats.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Field and space parameters for --zoom / --random sources.
    #[arg(long)]
    p: Option<u16>,
    #[arg(long, default_value_t = 1)]
    r: u16,
    #[arg(long)]
    n: Option<usize>,
    /// Dimension of the member flats.
    #[arg(long = "flat-dim")]
    flat_dim: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LiftedTestArgs {
    /// Base-code file.
    #[arg(long)]
    base: PathBuf,
    #[arg(long = "fn")]
    function: PathBuf,
    /// Tester flat dimension; the base dimension when omitted.
    #[arg(long = "flat-dim")]
    flat_dim: Option<usize>,
    #[arg(long, conflicts_with_all = ["samples", "seed"])]
    exact: bool,
    #[arg(long, requires = "seed")]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LiftedCorrectArgs {
    #[arg(long)]
    base: PathBuf,
    #[arg(long = "fn")]
    function: PathBuf,
    #[arg(long = "max-iters")]
    max_iters: Option<u64>,
    #[arg(long = "emit-fn")]
    emit_fn: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// random-codeword | corrupted-codeword | random-function
    #[arg(long)]
    kind: String,
    #[arg(long)]
    p: u16,
    #[arg(long, default_value_t = 1)]
    r: u16,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    degree: Option<u32>,
    /// Number of corrupted points for corrupted-codeword.
    #[arg(long, default_value_t = 1)]
    corruptions: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// soundness-sweep | correction-sweep
    #[arg(long)]
    name: String,
    #[arg(long)]
    p: u16,
    #[arg(long, default_value_t = 1)]
    r: u16,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    degree: u32,
    #[arg(long, default_value_t = 1)]
    corruptions: usize,
    #[arg(long, default_value_t = 20)]
    instances: u64,
    #[arg(long)]
    seed: u64,
    /// CSV output path.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Correct(args) => cmd_correct(args),
        Command::Shadow(args) => cmd_set_report(args, SetReport::Shadow),
        Command::Expansion(args) => cmd_set_report(args, SetReport::Expansion),
        Command::Spectra(args) => cmd_set_report(args, SetReport::Spectra),
        Command::Lifted(LiftedCommand::Test(args)) => cmd_lifted_test(args),
        Command::Lifted(LiftedCommand::Correct(args)) => cmd_lifted_correct(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Experiment(args) => cmd_experiment(args),
    }
}

fn emit(report: &Report, out: Option<&Path>) -> Result<ExitCode, Error> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?,
        None => println!("{text}"),
    }
    Ok(if report.any_violated() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn test_report_records(rep: &TestReport, name: &str) -> (Vec<CheckRecord>, serde_json::Value) {
    match rep {
        TestReport::Exact {
            rejecting,
            total,
            epsilon,
        } => (
            vec![CheckRecord::descriptive(
                name,
                Quantity::from_ratio(epsilon),
                format!("{rejecting} of {total} flats reject (exact)"),
            )],
            json!({"mode": "exact", "rejecting": rejecting.to_string(), "total": total.to_string()}),
        ),
        TestReport::MonteCarlo {
            rejections,
            samples,
            seed,
            estimate,
            stderr,
        } => (
            vec![CheckRecord::descriptive(
                name,
                Quantity::from_f64(*estimate),
                format!("{rejections} of {samples} sampled flats reject, stderr {stderr:.3e}"),
            )],
            json!({"mode": "monte-carlo", "samples": samples, "seed": seed, "stderr": stderr}),
        ),
    }
}

fn cmd_test(args: TestArgs) -> Result<ExitCode, Error> {
    let start = Instant::now();
    let table = io::read_truth_table(&args.function)?;
    let t = match args.flat_dim {
        Some(t) => t,
        None => tester::compute_t(table.field.q(), table.field.p() as u32, args.degree)? as usize,
    };
    if t > table.n {
        return Err(Error::InvalidParameter(format!(
            "flat dimension {t} exceeds ambient dimension {}",
            table.n
        )));
    }
    let rep = match args.samples {
        Some(samples) => tester::reject_mc(&table, args.degree, t, samples, args.seed.unwrap())?,
        None => tester::reject_exact_with(
            &table,
            t,
            &tester::DegreeAbove(args.degree),
            args.cap,
        )?,
    };
    let (records, mode) = test_report_records(&rep, "rejection-probability");
    let report = Report {
        command: "test".into(),
        config: json!({
            "fn": args.function.display().to_string(),
            "degree": args.degree,
            "flat_dim": t,
            "p": table.field.p(), "r": table.field.r(), "n": table.n,
            "mode": mode,
        }),
        records,
        seed: args.seed,
        elapsed_ms: start.elapsed().as_millis(),
    };
    emit(&report, args.out.as_deref())
}

fn trace_json(trace: &CorrectionTrace) -> serde_json::Value {
    let steps: Vec<serde_json::Value> = trace
        .steps
        .iter()
        .chain(trace.rejected_step.iter())
        .map(|s| {
            json!({
                "point_index": s.point_index,
                "old_value": s.old_value.value(),
                "new_value": s.new_value.value(),
                "mu_s_x": Quantity::from_ratio(&s.mu_s_x),
                "epsilon_before": Quantity::from_ratio(&s.epsilon_before),
                "epsilon_after": Quantity::from_ratio(&s.epsilon_after),
                "decrement_floor": Quantity::from_ratio(&s.decrement_floor),
                "decrement_floor_alt": s.decrement_floor_alt.as_ref().map(|r| Quantity::from_ratio(r)),
                "vote_tally": s
                    .vote_tally
                    .iter()
                    .map(|(v, frac)| (v.to_string(), Quantity::from_ratio(frac)))
                    .collect::<std::collections::BTreeMap<_, _>>(),
            })
        })
        .collect();
    json!({
        "steps": steps,
        "converged": trace.converged,
        "iterations": trace.iterations,
        "changed_points": trace.changed_points,
        "aborted": trace.abort.as_ref().map(|a| format!("{a:?}")),
        "distance_bound": trace.distance_bound.as_ref().map(Quantity::from_ratio),
    })
}

fn correction_records(trace: &CorrectionTrace) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    records.push(CheckRecord {
        name: "correction-converged".into(),
        lhs: Quantity::from_f64(trace.iterations as f64),
        rhs: Quantity::none(),
        verdict: if trace.converged {
            Verdict::Holds
        } else {
            Verdict::Violated
        },
        note: Some(match &trace.abort {
            None => "rejection probability driven to zero".into(),
            Some(a) => format!("aborted: {a:?}"),
        }),
    });
    for (i, s) in trace.steps.iter().enumerate() {
        records.push(CheckRecord::exact_le(
            format!("step-{i}-strict-decrease"),
            &s.epsilon_after,
            &s.epsilon_before,
        ));
    }
    records
}

fn cmd_correct(args: CorrectArgs) -> Result<ExitCode, Error> {
    let start = Instant::now();
    let table = io::read_truth_table(&args.function)?;
    let trace = corrector::correct(
        &table,
        args.degree,
        CorrectionOptions {
            flat_dim: args.flat_dim,
            max_iters: args.max_iters,
            cap: args.cap,
        },
    )?;
    if let Some(path) = &args.emit_fn {
        io::write_truth_table(path, &trace.final_table)?;
    }
    let report = Report {
        command: "correct".into(),
        config: json!({
            "fn": args.function.display().to_string(),
            "degree": args.degree,
            "flat_dim": args.flat_dim,
            "max_iters": args.max_iters,
            "trace": trace_json(&trace),
        }),
        records: correction_records(&trace),
        seed: None,
        elapsed_ms: start.elapsed().as_millis(),
    };
    emit(&report, args.out.as_deref())
}

enum SetReport {
    Shadow,
    Expansion,
    Spectra,
}

fn parse_point(field: &FieldSpec, n: usize, txt: &str) -> Result<Vec<FieldElement>, Error> {
    let idx: usize = txt
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad point encoding {txt:?}")))?;
    if idx >= (field.q() as usize).pow(n as u32) {
        return Err(Error::InvalidParameter(format!("point {idx} out of range")));
    }
    let mut pt = vec![FieldElement::ZERO; n];
    decode_point(field, idx, &mut pt);
    Ok(pt)
}

fn parse_zoom(field: &FieldSpec, n: usize, spec: &str) -> Result<ZoomKind, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["point", z] => Ok(ZoomKind::Point(parse_point(field, n, z)?)),
        ["point-linear", z] => Ok(ZoomKind::PointLinear(parse_point(field, n, z)?)),
        ["hyperplane", h, c] => Ok(ZoomKind::Hyperplane {
            normal: parse_point(field, n, h)?,
            constant: {
                let v: u32 = c.parse().map_err(|_| {
                    Error::InvalidParameter(format!("bad constant {c:?}"))
                })?;
                if v >= field.q() {
                    return Err(Error::InvalidParameter(format!(
                        "constant {v} out of range"
                    )));
                }
                FieldElement(v as u16)
            },
        }),
        ["hyperplane-linear", h] => Ok(ZoomKind::HyperplaneLinear {
            normal: parse_point(field, n, h)?,
        }),
        _ => Err(Error::InvalidParameter(format!(
            "zoom spec {spec:?}; expected kind:param (point, point-linear, hyperplane, hyperplane-linear)"
        ))),
    }
}

/// Builds the flat set a report runs on, plus whether the stay-probability
/// floor is guaranteed for it (zoom families and rejecting sets).
fn build_set(args: &SetArgs) -> Result<(FlatSet, bool, serde_json::Value), Error> {
    if let Some(path) = &args.function {
        let degree = args.degree.ok_or_else(|| {
            Error::InvalidParameter("--fn sources need --degree".into())
        })?;
        let table = io::read_truth_table(path)?;
        let derived =
            tester::compute_t(table.field.q(), table.field.p() as u32, degree)? as usize;
        let t = args.flat_dim.unwrap_or(derived);
        let set = corrector::error_set(&table, degree, t)?;
        let config = json!({
            "source": "rejecting-set",
            "fn": path.display().to_string(),
            "degree": degree,
            "flat_dim": t,
        });
        // the stay-probability floor for rejecting sets needs the flat
        // dimension to be at least the derived one
        return Ok((set, t >= derived, config));
    }
    let p = args
        .p
        .ok_or_else(|| Error::InvalidParameter("--zoom/--random sources need --p".into()))?;
    let n = args
        .n
        .ok_or_else(|| Error::InvalidParameter("--zoom/--random sources need --n".into()))?;
    let t = args.flat_dim.ok_or_else(|| {
        Error::InvalidParameter("--zoom/--random sources need --flat-dim".into())
    })?;
    let field = FieldSpec::new(p, args.r)?;
    if let Some(spec) = &args.zoom {
        let kind = parse_zoom(&field, n, spec)?;
        let set = flats::zoom_family(&field, n, t, &kind, args.cap)?;
        let config = json!({"source": "zoom", "zoom": spec, "p": p, "r": args.r, "n": n, "flat_dim": t});
        // only the point zoom-in carries the 1/q stay floor at every size;
        // the other families drop below it at small co-dimension
        let floor = matches!(kind, ZoomKind::Point(_));
        return Ok((set, floor, config));
    }
    if let Some(size) = args.random {
        let seed = args
            .seed
            .ok_or_else(|| Error::InvalidParameter("--random needs --seed".into()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set = FlatSet::empty(field.clone(), n, t);
        while set.len() < size {
            set.members.insert(flats::sample_flat(&field, n, t, &mut rng));
        }
        let config =
            json!({"source": "random", "size": size, "seed": seed, "p": p, "r": args.r, "n": n, "flat_dim": t});
        return Ok((set, false, config));
    }
    Err(Error::InvalidParameter(
        "need one of --fn, --zoom, --random".into(),
    ))
}

fn cmd_set_report(args: SetArgs, which: SetReport) -> Result<ExitCode, Error> {
    let start = Instant::now();
    let (set, floor_guaranteed, source) = build_set(&args)?;
    let (command, records) = match which {
        SetReport::Shadow => {
            let rep = flats::shadow_expansion_check(&set)?;
            let rhs = &rep.mu / &rep.stay;
            let mut records = vec![
                CheckRecord::exact_ge("shadow-lower-bound", &rep.mu_up, &rhs).with_note(
                    "measure of the upper shadow against measure over stay probability",
                ),
                CheckRecord::descriptive(
                    "set-measure",
                    Quantity::from_ratio(&rep.mu),
                    format!("{} members", set.len()),
                ),
                CheckRecord::descriptive(
                    "upper-shadow-measure",
                    Quantity::from_ratio(&rep.mu_up),
                    "",
                ),
                CheckRecord::descriptive(
                    "stay-probability",
                    Quantity::from_ratio(&rep.stay),
                    "",
                ),
            ];
            let q = set.field.q() as u64;
            let upper = &rep.mu * flatlab::Ratio::from(num::BigInt::from(q));
            if floor_guaranteed {
                records.push(
                    CheckRecord::exact_le("shadow-upper-bound", &rep.mu_up, &upper)
                        .with_note("guaranteed for rejecting sets and point zooms"),
                );
            } else {
                records.push(CheckRecord::descriptive(
                    "shadow-upper-bound",
                    Quantity::from_ratio(&rep.mu_up),
                    format!("q mu(S) = {upper}; bound asserted only for rejecting sets and point zooms"),
                ));
            }
            ("shadow", records)
        }
        SetReport::Expansion => {
            let stay = flats::expansion_stay(&set, true)?;
            let stay_no_self = flats::expansion_stay(&set, false)?;
            let mut records = vec![
                CheckRecord::descriptive(
                    "stay-probability",
                    Quantity::from_ratio(&stay),
                    "up-down walk, self-loop included",
                ),
                CheckRecord::descriptive(
                    "stay-probability-without-self-loop",
                    Quantity::from_ratio(&stay_no_self),
                    "self-loop conditioned away",
                ),
            ];
            if floor_guaranteed {
                records.push(CheckRecord::exact_ge(
                    "stay-probability-floor",
                    &stay,
                    &flatlab::ratio_of(1, set.field.q() as u64),
                ));
            }
            ("expansion", records)
        }
        SetReport::Spectra => {
            let rep = spectral::verify_spectral(&set, floor_guaranteed)?;
            ("spectra", rep.records)
        }
    };
    let report = Report {
        command: command.into(),
        config: source,
        records,
        seed: args.seed,
        elapsed_ms: start.elapsed().as_millis(),
    };
    emit(&report, args.out.as_deref())
}

fn cmd_lifted_test(args: LiftedTestArgs) -> Result<ExitCode, Error> {
    let start = Instant::now();
    let base = io::read_base_code(&args.base)?;
    let table = io::read_truth_table(&args.function)?;
    let k = args.flat_dim.unwrap_or(base.t);
    let rep = lifted::reject_lifted(
        &table,
        &base,
        k,
        args.samples.map(|s| (s, args.seed.unwrap())),
    )?;
    let (records, mode) = test_report_records(&rep, "lift-rejection-probability");
    let report = Report {
        command: "lifted-test".into(),
        config: json!({
            "base": args.base.display().to_string(),
            "fn": args.function.display().to_string(),
            "flat_dim": k,
            "mode": mode,
        }),
        records,
        seed: args.seed,
        elapsed_ms: start.elapsed().as_millis(),
    };
    emit(&report, args.out.as_deref())
}

fn cmd_lifted_correct(args: LiftedCorrectArgs) -> Result<ExitCode, Error> {
    let start = Instant::now();
    let base = io::read_base_code(&args.base)?;
    let table = io::read_truth_table(&args.function)?;
    let trace = lifted::correct_lifted(
        &table,
        &base,
        CorrectionOptions {
            flat_dim: None,
            max_iters: args.max_iters,
            cap: args.cap,
        },
    )?;
    if let Some(path) = &args.emit_fn {
        io::write_truth_table(path, &trace.final_table)?;
    }
    let report = Report {
        command: "lifted-correct".into(),
        config: json!({
            "base": args.base.display().to_string(),
            "fn": args.function.display().to_string(),
            "trace": trace_json(&trace),
        }),
        records: correction_records(&trace),
        seed: None,
        elapsed_ms: start.elapsed().as_millis(),
    };
    emit(&report, args.out.as_deref())
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, Error> {
    let field = FieldSpec::new(args.p, args.r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    match args.kind.as_str() {
        "random-function" => {
            let table = generate::random_function(&field, args.n, &mut rng);
            io::write_truth_table(&args.out, &table)?;
        }
        "random-codeword" => {
            let d = args.degree.ok_or_else(|| {
                Error::InvalidParameter("random-codeword needs --degree".into())
            })?;
            let table = generate::random_codeword(&field, args.n, d, &mut rng).tabulate(&field);
            io::write_truth_table(&args.out, &table)?;
        }
        "corrupted-codeword" => {
            let d = args.degree.ok_or_else(|| {
                Error::InvalidParameter("corrupted-codeword needs --degree".into())
            })?;
            let instance =
                generate::corrupted_codeword(&field, args.n, d, args.corruptions, &mut rng);
            io::write_truth_table(&args.out, &instance.table)?;
            let sidecar = json!({
                "p": args.p, "r": args.r, "n": args.n, "degree": d, "seed": args.seed,
                "original_terms": instance
                    .original
                    .terms()
                    .map(|(m, c)| json!({"exponents": m.0, "coefficient": c.value()}))
                    .collect::<Vec<_>>(),
                "original_values": instance
                    .original_table
                    .values
                    .iter()
                    .map(|v| v.value())
                    .collect::<Vec<_>>(),
                "corruptions": instance.corruptions,
            });
            let sidecar_path = sidecar_path(&args.out);
            std::fs::write(
                &sidecar_path,
                serde_json::to_string_pretty(&sidecar).expect("serializes"),
            )
            .map_err(|e| Error::Io {
                path: sidecar_path.display().to_string(),
                source: e,
            })?;
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown kind {other:?}; expected random-function, random-codeword, corrupted-codeword"
            )))
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".sidecar.json");
    PathBuf::from(os)
}

fn cmd_experiment(args: ExperimentArgs) -> Result<ExitCode, Error> {
    let field = FieldSpec::new(args.p, args.r)?;
    let mut csv = String::new();
    match args.name.as_str() {
        "soundness-sweep" => {
            // random functions of degree above d; epsilon against the floor
            csv.push_str("instance,seed,degree,epsilon,floor\n");
            let t = tester::compute_t(field.q(), field.p() as u32, args.degree)? as usize;
            let k = args.n - 1;
            if k < t {
                return Err(Error::InvalidParameter(format!(
                    "need n - 1 >= t = {t}"
                )));
            }
            let mut produced = 0u64;
            let mut seed = args.seed;
            while produced < args.instances {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                seed += 1;
                let table = generate::random_function(&field, args.n, &mut rng);
                let deg = match table.interpolate().degree() {
                    Some(deg) if deg > args.degree => deg,
                    _ => continue,
                };
                let rep = tester::reject_exact(&table, args.degree, k)?;
                let eps = rep.exact_epsilon().expect("exact");
                csv.push_str(&format!(
                    "{produced},{},{deg},{}/{},{}\n",
                    seed - 1,
                    eps.numer(),
                    eps.denom(),
                    format!("1/{}", field.q()),
                ));
                produced += 1;
            }
        }
        "correction-sweep" => {
            csv.push_str("instance,seed,epsilon,delta,steps,recovered\n");
            let t = tester::compute_t(field.q(), field.p() as u32, args.degree)? as usize;
            let book = tester::Codebook::enumerate(
                &field,
                args.n,
                args.degree,
                flatlab::DEFAULT_CODEWORD_CAP,
            )?;
            for i in 0..args.instances {
                let mut rng = ChaCha8Rng::seed_from_u64(args.seed + i);
                let inst = generate::corrupted_codeword(
                    &field,
                    args.n,
                    args.degree,
                    args.corruptions,
                    &mut rng,
                );
                let eps = tester::reject_exact(&inst.table, args.degree, t)?;
                let eps = eps.exact_epsilon().expect("exact");
                let delta = book.distance(&inst.table);
                let trace = corrector::correct(
                    &inst.table,
                    args.degree,
                    CorrectionOptions::default(),
                )?;
                let recovered = trace.converged && trace.final_table == inst.original_table;
                csv.push_str(&format!(
                    "{i},{},{}/{},{}/{},{},{recovered}\n",
                    args.seed + i,
                    eps.numer(),
                    eps.denom(),
                    delta.numer(),
                    delta.denom(),
                    trace.steps.len(),
                ));
            }
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown experiment {other:?}; expected soundness-sweep or correction-sweep"
            )))
        }
    }
    std::fs::write(&args.out, csv).map_err(|e| Error::Io {
        path: args.out.display().to_string(),
        source: e,
    })?;
    Ok(ExitCode::SUCCESS)
}
