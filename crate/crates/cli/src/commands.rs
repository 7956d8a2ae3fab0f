use std::path::{Path, PathBuf};

use colrep::compose::{read_composed, CompositionFile};
use colrep::field::Field;
use colrep::hash_family::{
    check_distributing, check_perfect, check_separating, check_strengthening, gen_linear,
    CheckOptions,
};
use colrep::ingredient::{default_nodes, spread_nodes, vandermonde, NscKind};
use colrep::recover::{
    recover_general, recover_noisy, recover_positive, recover_strengthened, recover_sublinear,
    NoisyParams,
};
use colrep::sweep::{plot_script, run_bench, write_csv, BenchConfig};
use colrep::{
    ComposedMatrix, Execution, HashFamily, Ingredient, PartitionShape, RecoveryOptions, SchemeKind,
    Tolerance,
};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{code, CliError};
use crate::io::{emit, parse_repeated, pretty, read_vector, vector_json, write_atomic};
use crate::{
    BenchArgs, CheckArgs, Cli, Command, ComposeArgs, HfCommand, IngredientCommand, Mode, Property,
    RecoverArgs, SampleArgs, SchemeArg,
};

struct Context {
    tol: Tolerance,
    execution: Execution,
}

impl Context {
    fn recovery(&self) -> RecoveryOptions {
        RecoveryOptions {
            tol: self.tol,
            execution: self.execution,
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let tol = match cli.tolerance {
        Some(eps) => Tolerance::new(eps).map_err(|e| CliError::param(e.to_string()))?,
        None => Tolerance::from_env(),
    };
    let ctx = Context {
        tol,
        execution: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    match cli.command {
        Command::Hf(HfCommand::GenLinear {
            q,
            alpha,
            m,
            output,
        }) => gen_linear_cmd(q, alpha, m, output.as_deref()),
        Command::Hf(HfCommand::Check(args)) => check_cmd(&ctx, args),
        Command::Ingredient(cmd) => ingredient_cmd(&ctx, cmd),
        Command::Compose(args) => compose_cmd(args),
        Command::Sample(args) => sample_cmd(args),
        Command::Recover(args) => recover_cmd(&ctx, args),
        Command::Bench(args) => bench_cmd(args),
    }
}

fn gen_linear_cmd(q: u32, alpha: usize, m: usize, output: Option<&Path>) -> Result<(), CliError> {
    let field = Field::of_order(q).map_err(|e| CliError::param(e.to_string()))?;
    let p = gen_linear(&field, alpha, m)?;
    emit(output, &p.to_json())
}

fn shapes(specs: &[String]) -> Result<Vec<PartitionShape>, CliError> {
    specs
        .iter()
        .map(|s| {
            s.parse::<PartitionShape>()
                .map_err(|e| CliError::param(e.to_string()))
        })
        .collect()
}

fn check_cmd(ctx: &Context, args: CheckArgs) -> Result<(), CliError> {
    let p = HashFamily::read(&args.family)?;
    let opts = CheckOptions {
        budget: args.budget,
        sample_trials: args.samples,
        seed: args.seed,
        execution: ctx.execution,
    };
    let (property, verdict) = match &args.property {
        Property::Perfect { t } => (
            json!({ "kind": "perfect", "t": t }),
            check_perfect(&p, *t, &opts)?,
        ),
        Property::Separating { shapes: s } => {
            let sh = shapes(s)?;
            (
                json!({ "kind": "separating", "shapes": sh }),
                check_separating(&p, &sh, &opts)?,
            )
        }
        Property::Distributing { t, s } => (
            json!({ "kind": "distributing", "t": t, "s": s }),
            check_distributing(&p, *t, *s, &opts)?,
        ),
        Property::Strengthening { d, tau, shapes: s } => {
            let d: Vec<u32> = parse_repeated(d)
                .map_err(|e| CliError::param(format!("--d: {e}")))?
                .into_iter()
                .map(|v| v as u32)
                .collect();
            let sh = shapes(s)?;
            let verdict = check_strengthening(&p, &d, *tau, &sh, &opts)?;
            (
                json!({ "kind": "strengthening", "d": d, "tau": tau, "shapes": sh }),
                verdict,
            )
        }
    };
    let report = json!({
        "family": args.family,
        "rows": p.rows(),
        "cols": p.cols(),
        "property": property,
        "holds": verdict.holds(),
        "exhaustive": verdict.is_exhaustive(),
        "result": verdict,
    });
    emit(args.output.as_deref(), &pretty(&report))?;
    if verdict.holds() {
        Ok(())
    } else {
        Err(CliError::new(
            code::PROPERTY_FAILED,
            "property does not hold; witness written to the report",
        ))
    }
}

fn nsc_kind(s: SchemeArg) -> NscKind {
    match s {
        SchemeArg::L0 => NscKind::L0,
        SchemeArg::L1 => NscKind::L1,
    }
}

fn parse_nodes(spec: &str, k: usize) -> Result<Vec<f64>, CliError> {
    match spec {
        "default" => Ok(default_nodes(k)),
        "spread" => Ok(spread_nodes(k)),
        list => list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::param(format!("bad node {v:?}")))
            })
            .collect(),
    }
}

fn ingredient_cmd(ctx: &Context, cmd: IngredientCommand) -> Result<(), CliError> {
    match cmd {
        IngredientCommand::Make {
            k,
            t,
            rows,
            nodes,
            scheme,
            output,
        } => {
            if k == 0 || t == 0 {
                return Err(CliError::param("k and t must be positive"));
            }
            let nodes = parse_nodes(&nodes, k)?;
            if nodes.len() != k {
                return Err(CliError::new(
                    code::MISMATCH,
                    format!("{} nodes for k = {k}", nodes.len()),
                ));
            }
            let matrix = vandermonde(&nodes, rows.unwrap_or(2 * t))?;
            let kind = match scheme {
                SchemeArg::L0 => SchemeKind::L0BruteForce,
                SchemeArg::L1 => SchemeKind::L1Program,
            };
            let mut ing = Ingredient::new(matrix, kind);
            if !ing.certify(nsc_kind(scheme), t, &ctx.tol)? {
                return Err(CliError::new(
                    code::PROPERTY_FAILED,
                    format!(
                        "the {scheme:?} null-space condition fails at t = {t}; no file written"
                    ),
                ));
            }
            emit(output.as_deref(), &ing.to_json()?)
        }
        IngredientCommand::Certify {
            ingredient,
            kind,
            t,
            output,
        } => {
            let mut ing = Ingredient::read(&ingredient)?;
            let holds = ing.certify(nsc_kind(kind), t, &ctx.tol)?;
            if let Some(out) = output {
                write_atomic(&out, &ing.to_json()?)?;
            }
            let report = json!({
                "ingredient": ingredient,
                "kind": nsc_kind(kind),
                "t": t,
                "holds": holds,
                "tolerance": ctx.tol.eps,
            });
            print!("{}", pretty(&report));
            if holds {
                Ok(())
            } else {
                Err(CliError::new(
                    code::PROPERTY_FAILED,
                    format!("condition fails at t = {t}"),
                ))
            }
        }
    }
}

fn absolute(p: &Path) -> Result<PathBuf, CliError> {
    p.canonicalize()
        .map_err(|e| CliError::io(format!("{}: {e}", p.display())))
}

fn compose_cmd(args: ComposeArgs) -> Result<(), CliError> {
    let file = CompositionFile {
        pattern: absolute(&args.pattern)?,
        ingredients: args
            .ingredients
            .iter()
            .map(|p| absolute(p))
            .collect::<Result<_, _>>()?,
    };
    let composed = file.load(Path::new("."))?;
    let csv = composed.to_csv();
    write_atomic(&args.output, &file.to_json())?;
    if let Some(path) = args.csv {
        write_atomic(&path, &csv)?;
    }
    Ok(())
}

fn load(path: &Path) -> Result<ComposedMatrix, CliError> {
    Ok(read_composed(path)?)
}

fn random_signal(n: usize, args: &SampleArgs, t: usize) -> Result<Vec<f64>, CliError> {
    if t > n {
        return Err(CliError::param(format!("t = {t} exceeds n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut x = vec![0.0; n];
    let dominant = sample(&mut rng, n, t).into_vec();
    for &j in &dominant {
        let mag = rng.gen_range(0.5..2.0);
        x[j] = if args.nonnegative || rng.gen_bool(0.5) {
            mag
        } else {
            -mag
        };
    }
    if let Some(s) = args.tail {
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::param("--tail must be positive"));
        }
        let rest: Vec<usize> = (0..n).filter(|j| !dominant.contains(j)).collect();
        let weights: Vec<f64> = rest.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let mass = rng.gen_range(0.0..s);
        if total > 0.0 {
            for (&j, &w) in rest.iter().zip(&weights) {
                let sign = if args.nonnegative || rng.gen_bool(0.5) {
                    1.0
                } else {
                    -1.0
                };
                x[j] = sign * 0.999 * mass * w / total;
            }
        }
    }
    Ok(x)
}

fn sample_cmd(args: SampleArgs) -> Result<(), CliError> {
    let c = load(&args.composed)?;
    let x = match (&args.x, args.random) {
        (Some(path), None) => read_vector(path)?,
        (None, Some(t)) => random_signal(c.cols(), &args, t)?,
        _ => {
            return Err(CliError::new(
                code::USAGE,
                "give exactly one of --x or --random",
            ))
        }
    };
    let y = c.sample(&x)?;
    if let Some(record) = &args.record {
        write_atomic(record, &vector_json(&x))?;
    }
    emit(args.output.as_deref(), &vector_json(&y))
}

fn recover_cmd(ctx: &Context, args: RecoverArgs) -> Result<(), CliError> {
    let c = load(&args.composed)?;
    let y = read_vector(&args.y)?;
    let opts = ctx.recovery();
    let mut report = match args.mode {
        Mode::Positive => to_value(recover_positive(&c, &y, args.t, &opts)?),
        Mode::General => to_value(recover_general(&c, &y, args.t, &opts)?),
        Mode::Sublinear => to_value(recover_sublinear(&c, &y, args.t, &opts)?),
        Mode::Strengthened => {
            let spec = args
                .d
                .as_deref()
                .ok_or_else(|| CliError::new(code::USAGE, "strengthened mode needs --d"))?;
            let d = parse_repeated(spec).map_err(|e| CliError::param(format!("--d: {e}")))?;
            to_value(recover_strengthened(&c, &y, &d, &opts)?)
        }
        Mode::Noisy => {
            let params = NoisyParams {
                t: args.t,
                s: args.s,
                eps: args.eps,
                refit: args.refit,
            };
            let (x, estimate) = recover_noisy(&c, &y, &params, &opts)?;
            json!({ "x": x, "estimate": estimate })
        }
    };
    let mode = format!("{:?}", args.mode).to_lowercase();
    report
        .as_object_mut()
        .expect("results are objects")
        .insert("mode".into(), Value::String(mode));
    emit(args.output.as_deref(), &pretty(&report))
}

fn to_value<T: serde::Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn parse_points(spec: &str) -> Result<Vec<(u32, usize)>, CliError> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (q, a) = item
                .split_once(':')
                .ok_or_else(|| CliError::param(format!("point {item:?} is not q:alpha")))?;
            let q = q
                .parse()
                .map_err(|_| CliError::param(format!("bad q in {item:?}")))?;
            let a = a
                .parse()
                .map_err(|_| CliError::param(format!("bad alpha in {item:?}")))?;
            Ok((q, a))
        })
        .collect()
}

fn bench_cmd(args: BenchArgs) -> Result<(), CliError> {
    let cfg = BenchConfig {
        points: parse_points(&args.points)?,
        t: args.t,
        trials: args.trials,
        repetitions: args.reps,
        seed: args.seed,
    };
    if cfg.points.is_empty() {
        return Err(CliError::param("no benchmark points"));
    }
    let rows = run_bench(&cfg)?;
    let csv = write_csv(&rows);
    emit(args.output.as_deref(), &csv)?;
    if let Some(plot) = args.plot {
        let csv_name = args
            .output
            .as_deref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "bench.csv".into());
        write_atomic(&plot, &plot_script(&csv_name))?;
    }
    Ok(())
}
