/// Print to stdout, exiting quietly when the consumer closed the pipe.
macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

mod bench;
mod verify;

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ellbase::bundle::{
    self, bundle_from_contexts, format_vector, load_bundle_recorded, parse_vector, BaseChangeJson,
    ContextBundle,
};
use ellbase::*;

/// Elliptic bases and elliptic normal bases for finite field extensions.
///
/// Exit codes: 0 success, 1 invariant failure, 2 usage error,
/// 3 arithmetic domain error.
#[derive(Parser)]
#[command(name = "ellbase", version, about)]
struct Cli {
    /// Seed override (the ELLBASIS_SEED environment variable wins).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct basis contexts for F_{q^d}/F_q and write a bundle.
    Construct {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        /// Explicit curve a1,a2,a3,a4,a6 (coordinates use / for F_q digits).
        #[arg(long)]
        curve: Option<String>,
        /// Torsion point x,y (requires --curve).
        #[arg(long)]
        t: Option<String>,
        /// Point a on the quotient curve x,y.
        #[arg(long)]
        a: Option<String>,
        /// Normal-basis point R x,y.
        #[arg(long)]
        r: Option<String>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<String>,
    },
    /// Apply a basis operation to vectors from the command line.
    Op {
        #[arg(long)]
        ctx: String,
        #[arg(long)]
        basis: String,
        #[arg(long)]
        op: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: Option<String>,
        #[arg(long, default_value_t = 1)]
        power: i64,
        /// Also print the operation counters as JSON.
        #[arg(long)]
        counters: bool,
    },
    /// Run the invariant suites against a bundle.
    Verify {
        #[arg(long)]
        ctx: String,
        #[arg(long, default_value_t = 50)]
        trials: u64,
    },
    /// Operation-count table across degrees and curve models (CSV).
    Bench {
        #[arg(long)]
        q: u64,
        /// Degree range A..B inclusive.
        #[arg(long, value_name = "A..B", default_value = "4..13")]
        d_range: String,
        #[arg(long, default_value_t = 3)]
        reps: u64,
        /// all | general | short | char2-j-nonzero | char2-j-zero |
        /// char3-j-nonzero | char3-j-zero
        #[arg(long, default_value = "all")]
        models: String,
    },
    /// The d_q invariant of (q, d) with per-prime valuations.
    Dq {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u64,
    },
    /// The auxiliary base change plan for (q, d).
    Basechange {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u64,
    },
    /// Summarize a bundle.
    Info {
        #[arg(long)]
        ctx: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = std::env::var("ELLBASIS_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .or(cli.seed)
        .unwrap_or(1);
    match run(cli.command, seed) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

enum CliError {
    Usage(String),
    Domain(String),
    Failed(String),
}

fn construction_error(e: Error) -> CliError {
    let json = serde_json::json!({ "error": format!("{e}"), "kind": format!("{e:?}") });
    CliError::Failed(json.to_string())
}

fn run(cmd: Command, seed: u64) -> CliResult<ExitCode> {
    match cmd {
        Command::Construct { q, d, curve, t, a, r, out } => {
            let bundle = construct(q, d, curve, t, a, r, seed)?;
            let text = serde_json::to_string_pretty(&bundle).expect("serializable");
            match out {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| CliError::Usage(format!("writing {path}: {e}")))?,
                None => outln!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Op { ctx, basis, op, a, b, power, counters } => {
            op_command(&ctx, &basis, &op, &a, b.as_deref(), power, counters)
        }
        Command::Verify { ctx, trials } => {
            let loaded = load_ctx(&ctx)?;
            let results = verify::run(&loaded, trials);
            let mut ok = true;
            for g in &results {
                let status = if g.passed() { "pass" } else { "FAIL" };
                outln!("{:<24} {:>7} checks  {}", g.name, g.checks, status);
                for d in &g.detail {
                    outln!("    - {d}");
                }
                ok &= g.passed();
            }
            if ok {
                Ok(ExitCode::SUCCESS)
            } else {
                Err(CliError::Failed("verification failed".into()))
            }
        }
        Command::Bench { q, d_range, reps, models } => {
            let (lo, hi) = parse_range(&d_range)?;
            let model_list: Vec<CurveModel> = if models == "all" {
                match BaseField::of_order(q) {
                    Ok(k) => CurveModel::applicable(k.p()),
                    Err(e) => return Err(CliError::Usage(format!("{e}"))),
                }
            } else {
                vec![CurveModel::parse(&models)
                    .ok_or_else(|| CliError::Usage(format!("unknown model {models}")))?]
            };
            outln!("{}", bench::header());
            for d in lo..=hi {
                for &model in &model_list {
                    let row = bench::run_cell(q, d, model, reps, seed);
                    outln!("{}", bench::format_row(&row));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Dq { q, d } => {
            let prof = compute_dq(q, d).map_err(|e| CliError::Usage(format!("{e}")))?;
            let flags = existence_check(q, d).map_err(|e| CliError::Usage(format!("{e}")))?;
            let json = serde_json::json!({
                "q": q.to_string(),
                "d": d.to_string(),
                "d_q": prof.dq.to_string(),
                "valuations": prof.valuations.iter().map(|(l, vd, vq1, vdq)| {
                    serde_json::json!({
                        "prime": l.to_string(),
                        "v_d": vd,
                        "v_q_minus_1": vq1,
                        "v_dq": vdq,
                    })
                }).collect::<Vec<_>>(),
                "omega_guaranteed": flags.omega_guaranteed,
                "theta_guaranteed": flags.theta_guaranteed,
            });
            outln!("{}", serde_json::to_string_pretty(&json).unwrap());
            Ok(ExitCode::SUCCESS)
        }
        Command::Basechange { q, d } => {
            let plan = find_base_change(q, d).map_err(|e| CliError::Usage(format!("{e}")))?;
            let json = serde_json::json!({
                "q": plan.q.to_string(),
                "d": plan.d.to_string(),
                "f": plan.f.to_string(),
                "F": plan.f_inverse.to_string(),
                "Q": plan.q_big,
            });
            outln!("{}", serde_json::to_string_pretty(&json).unwrap());
            Ok(ExitCode::SUCCESS)
        }
        Command::Info { ctx } => {
            let loaded = load_ctx(&ctx)?;
            let o = &loaded.omega;
            let json = serde_json::json!({
                "q": o.fq.q().to_string(),
                "p": o.fq.p().to_string(),
                "m": o.fq.m(),
                "d": o.d,
                "curve_order": o.curve.group_order().ok().map(|m| m.to_string()),
                "has_theta": loaded.theta.is_some(),
                "psi_bridge": o.d % 2 == 1 && o.two_db_nonzero,
                "base_change": loaded.bundle.base_change.clone().map(|b| b.f),
            });
            outln!("{}", serde_json::to_string_pretty(&json).unwrap());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_range(s: &str) -> CliResult<(usize, usize)> {
    let parts: Vec<&str> = s.split("..").collect();
    match parts.as_slice() {
        [a, b] => {
            let lo = a.parse().map_err(|_| CliError::Usage(format!("bad range {s}")))?;
            let hi = b.parse().map_err(|_| CliError::Usage(format!("bad range {s}")))?;
            Ok((lo, hi))
        }
        [a] => {
            let v = a.parse().map_err(|_| CliError::Usage(format!("bad range {s}")))?;
            Ok((v, v))
        }
        _ => Err(CliError::Usage(format!("bad range {s}"))),
    }
}

fn load_ctx(path: &str) -> CliResult<bundle::LoadedBundle> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("reading {path}: {e}")))?;
    let bundle: ContextBundle = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("parsing {path}: {e}")))?;
    load_bundle_recorded(&bundle).map_err(|e| CliError::Usage(format!("loading {path}: {e}")))
}

fn parse_point(k: &BaseField, s: &str) -> CliResult<Point> {
    if s == "O" {
        return Ok(CurvePoint::Infinity);
    }
    let v = parse_vector(k, 2, Basis::Psi, s)
        .map_err(|e| CliError::Usage(format!("bad point {s}: {e}")))?;
    Ok(CurvePoint::Affine(v.coords[0].clone(), v.coords[1].clone()))
}

fn construct(
    q: u64,
    d: usize,
    curve: Option<String>,
    t: Option<String>,
    a: Option<String>,
    r: Option<String>,
    seed: u64,
) -> CliResult<ContextBundle> {
    let flags = existence_check(q, d as u64).map_err(|e| CliError::Usage(format!("{e}")))?;
    eprintln!(
        "existence: omega_guaranteed={} theta_guaranteed={}",
        flags.omega_guaranteed, flags.theta_guaranteed
    );
    // direct attempt over F_q first; on failure fall back to the base change
    match construct_over(q, d, &curve, &t, &a, &r, seed) {
        Ok(bundle) => {
            eprintln!("base change: not applied (f = 1)");
            Ok(bundle)
        }
        Err(e) => {
            if curve.is_some() {
                return Err(e);
            }
            let plan = find_base_change(q, d as u64)
                .map_err(|e2| CliError::Usage(format!("{e2}")))?;
            if plan.f == 1 {
                return Err(e);
            }
            let q_big = plan
                .q_big
                .parse::<u64>()
                .map_err(|_| CliError::Usage("base change exceeds word size".into()))?;
            eprintln!("base change: applied with f={} F={} Q={}", plan.f, plan.f_inverse, q_big);
            let mut bundle = construct_over(q_big, d, &None, &None, &None, &None, seed)?;
            bundle.base_change = Some(BaseChangeJson {
                q: q.to_string(),
                d: d.to_string(),
                f: plan.f.to_string(),
                f_inverse: plan.f_inverse.to_string(),
                q_big: plan.q_big,
            });
            Ok(bundle)
        }
    }
}

fn construct_over(
    q: u64,
    d: usize,
    curve: &Option<String>,
    t: &Option<String>,
    a: &Option<String>,
    r: &Option<String>,
    seed: u64,
) -> CliResult<ContextBundle> {
    let k = BaseField::of_order(q).map_err(|e| CliError::Usage(format!("{e}")))?;
    let mut rng = SplitMix64::new(seed);
    let omega = if let Some(cs) = curve {
        let v = parse_vector(&k, 5, Basis::Psi, cs)
            .map_err(|e| CliError::Usage(format!("bad curve: {e}")))?;
        let e = WeierstrassCurve::new(
            k.clone(),
            v.coords[0].clone(),
            v.coords[1].clone(),
            v.coords[2].clone(),
            v.coords[3].clone(),
            v.coords[4].clone(),
        )
        .map_err(construction_error)?;
        let tp = match t {
            Some(ts) => parse_point(&k, ts)?,
            None => e
                .find_point_of_order(d as u64, &mut rng)
                .map_err(construction_error)?,
        };
        let ap = match a {
            Some(s) => Some(parse_point(&k, s)?),
            None => None,
        };
        OmegaContext::build(&e, &tp, ap, seed).map_err(construction_error)?
    } else {
        let mut found = None;
        for model in CurveModel::applicable(k.p()) {
            if let Ok(ctx) = model.find_context(&k, d, &mut rng) {
                found = Some(ctx);
                break;
            }
        }
        found.ok_or_else(|| construction_error(Error::SearchExhausted("curve search")))?
    };
    let rp = match r {
        Some(s) => Some(parse_point(&k, s)?),
        None => None,
    };
    let theta = ThetaContext::build(omega, rp, seed).map_err(construction_error)?;
    let psi = if theta.omega.d % 2 == 1 && theta.omega.d >= 3 && theta.omega.two_db_nonzero {
        Some(PsiContext::build(&theta.omega).map_err(construction_error)?)
    } else {
        None
    };
    Ok(bundle_from_contexts(&theta.omega, Some(&theta), psi.as_ref(), None))
}

fn op_command(
    ctx_path: &str,
    basis: &str,
    op: &str,
    a: &str,
    b: Option<&str>,
    power: i64,
    counters: bool,
) -> CliResult<ExitCode> {
    let loaded = load_ctx(ctx_path)?;
    let omega = &loaded.omega;
    let k = omega.fq.clone();
    let d = omega.d;
    let basis = match basis {
        "omega" => Basis::Omega,
        "theta" => Basis::Theta,
        "psi" => Basis::Psi,
        other => return Err(CliError::Usage(format!("unknown basis {other}"))),
    };
    if basis == Basis::Theta && loaded.theta.is_none() {
        return Err(CliError::Usage("bundle has no theta section".into()));
    }
    let va = parse_vector(&k, d, basis, a).map_err(|e| CliError::Usage(format!("--a: {e}")))?;
    let vb = |s: Option<&str>| -> CliResult<CoordVector> {
        let s = s.ok_or_else(|| CliError::Usage("--b required for this op".into()))?;
        parse_vector(&k, d, basis, s).map_err(|e| CliError::Usage(format!("--b: {e}")))
    };
    // inversion: the fast bridge for odd degrees, the matrix route otherwise
    let invert_any = |v: &CoordVector| -> CliResult<CoordVector> {
        let as_omega = match v.basis {
            Basis::Omega => v.clone(),
            Basis::Theta => loaded.theta.as_ref().unwrap().theta_to_omega(v).0,
            Basis::Psi => omega.psi_to_omega(v),
        };
        let inv = if d % 2 == 1 && d >= 3 && omega.two_db_nonzero {
            let p = PsiContext::build(omega).map_err(|e| CliError::Usage(format!("{e}")))?;
            p.invert(&as_omega, None)
        } else {
            omega.invert_generic(&as_omega)
        }
        .map_err(|e| CliError::Domain(format!("{e}")))?;
        Ok(match v.basis {
            Basis::Omega => inv,
            Basis::Theta => loaded.theta.as_ref().unwrap().omega_to_theta(&inv).0,
            Basis::Psi => omega.omega_to_psi(&inv),
        })
    };
    let mut tally = OpTally::default();
    let result = match (op, basis) {
        ("mul", Basis::Omega) => {
            let (r, t) = omega.multiply(&va, &vb(b)?);
            tally = t;
            r
        }
        ("mul", Basis::Theta) => {
            let (r, t) = loaded.theta.as_ref().unwrap().multiply(&va, &vb(b)?);
            tally = t;
            r
        }
        ("mul", Basis::Psi) => {
            let pa = Polynomial::from_coeffs(&k, va.coords.clone());
            let pb = Polynomial::from_coeffs(&k, vb(b)?.coords);
            let prod = pa.mul_mod(&k, &pb, &omega.pi).map_err(|e| CliError::Domain(format!("{e}")))?;
            let mut coords = prod.coeffs;
            coords.resize(d, k.zero());
            CoordVector::new(Basis::Psi, coords)
        }
        ("frob", Basis::Omega) => {
            let (r, t) = omega.frobenius_power(&va, power);
            tally = t;
            r
        }
        ("frobinv", Basis::Omega) => {
            let (r, t) = omega.frobenius_power(&va, -power);
            tally = t;
            r
        }
        ("frob", Basis::Theta) => loaded.theta.as_ref().unwrap().frobenius(&va, power),
        ("frobinv", Basis::Theta) => loaded.theta.as_ref().unwrap().frobenius(&va, -power),
        ("frob", Basis::Psi) | ("frobinv", Basis::Psi) => {
            let sign = if op == "frob" { 1 } else { -1 };
            let n = (sign * power).rem_euclid(d as i64) as usize;
            let mut cur = va.coords.clone();
            for _ in 0..n {
                cur = omega.ell.frobenius(&cur);
            }
            CoordVector::new(Basis::Psi, cur)
        }
        ("inv", _) => invert_any(&va)?,
        ("div", _) => {
            let vb = vb(b)?;
            let inv = invert_any(&vb)?;
            match basis {
                Basis::Omega => omega.multiply(&va, &inv).0,
                Basis::Theta => loaded.theta.as_ref().unwrap().multiply(&va, &inv).0,
                Basis::Psi => {
                    let pa = Polynomial::from_coeffs(&k, va.coords.clone());
                    let pb = Polynomial::from_coeffs(&k, inv.coords.clone());
                    let prod = pa
                        .mul_mod(&k, &pb, &omega.pi)
                        .map_err(|e| CliError::Domain(format!("{e}")))?;
                    let mut coords = prod.coeffs;
                    coords.resize(d, k.zero());
                    CoordVector::new(Basis::Psi, coords)
                }
            }
        }
        (other, _) => return Err(CliError::Usage(format!("unknown op {other}"))),
    };
    outln!("{}", format_vector(&result));
    if counters {
        outln!("{}", serde_json::to_string(&tally).unwrap());
    }
    Ok(ExitCode::SUCCESS)
}
