//! Command-line front end. Exit codes: 0 success, 1 a verification or
//! check did not pass, 2 bad input.

use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::cox::{
    contracting_exponent, cox_ring, induced_cox_endo, module_shifts, pic_coset_decomposition,
    rank_bookkeeping,
};
use crate::divisor::{class_group, find_ample_class, h0, positivity, PicLattice, TorusDivisor};
use crate::endo::{build_endo, fixed_classes, is_int_amplified, pullback_matrix, IntAmplified, ToricEndomorphism};
use crate::fan::{standard_fan, Fan};
use crate::io::{bundled, parse_class, parse_divisor, parse_endo, parse_fan};
use crate::lattice::IntMatrix;
use crate::pushforward::{decompose_pushforward, verify_decomposition};

#[derive(Parser, Debug)]
#[command(name = "toricpf", version, about = "Push-forwards of line bundles under toric endomorphisms")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    /// Accept fans without a certified ample class.
    #[arg(long, global = true)]
    allow_nonprojective: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct DivisorArgs {
    /// Ray coefficients, comma separated.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "class")]
    divisor: Option<String>,
    /// Pic coordinates, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    class: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check smoothness and completeness of a fan.
    Validate { fan: String },
    /// Count global sections of a divisor.
    H0 {
        fan: String,
        #[command(flatten)]
        divisor: DivisorArgs,
    },
    /// Ample / nef-not-ample / not-nef.
    Positivity {
        fan: String,
        #[command(flatten)]
        divisor: DivisorArgs,
    },
    /// Show the ray permutation, multiplicities, degree and Pic action.
    EndoCheck {
        fan: String,
        #[arg(long)]
        endo: String,
    },
    /// Decide whether the endomorphism is int-amplified.
    Intamp {
        fan: String,
        #[arg(long)]
        endo: String,
    },
    /// Decompose the push-forward of a line bundle.
    Pushforward {
        fan: String,
        #[arg(long)]
        endo: String,
        #[command(flatten)]
        divisor: DivisorArgs,
    },
    /// Verify a decomposition against the projection formula.
    Verify {
        fan: String,
        #[arg(long)]
        endo: String,
        #[command(flatten)]
        divisor: DivisorArgs,
        #[arg(long = "box", default_value_t = 2)]
        bound: u32,
    },
    /// Shifts of the graded free module, checked degreewise.
    CoxShifts {
        fan: String,
        #[arg(long)]
        endo: String,
        #[command(flatten)]
        divisor: DivisorArgs,
        #[arg(long = "box", default_value_t = 2)]
        bound: u32,
    },
    /// Contracting exponent of the induced Cox ring map.
    Contracting {
        fan: String,
        #[arg(long)]
        endo: String,
    },
    /// Representatives of Pic / f*Pic.
    CosetCount {
        fan: String,
        #[arg(long)]
        endo: String,
    },
    /// Check prod c = deg(f) * |Pic / f*Pic|.
    RankCheck {
        fan: String,
        #[arg(long)]
        endo: String,
    },
}

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<(i32, String), InputError>;

/// Runs the CLI on `argv` (including the program name).
pub fn run_command<I, T>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                CommandOutput { code, stdout: text, stderr: String::new() }
            } else {
                CommandOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli) {
        Ok((code, stdout)) => CommandOutput { code, stdout, stderr: String::new() },
        Err(InputError(msg)) => CommandOutput {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

fn read_source(spec: &str) -> Result<String, InputError> {
    if let Some(name) = spec.strip_prefix("bundled:") {
        return bundled(name)
            .map(str::to_string)
            .ok_or_else(|| InputError(format!("no bundled file {name:?}")));
    }
    std::fs::read_to_string(Path::new(spec)).map_err(|e| InputError(format!("{spec}: {e}")))
}

fn load_fan(spec: &str) -> Result<Fan, InputError> {
    if let Some(name) = spec.strip_prefix("std:") {
        return Ok(standard_fan(name)?);
    }
    let text = read_source(spec)?;
    let doc = parse_fan(&text).map_err(|e| InputError(format!("{spec}: {e}")))?;
    Ok(doc.to_fan()?)
}

fn load_endo(fan: &Fan, spec: &str) -> Result<ToricEndomorphism, InputError> {
    let matrix = if let Some(q) = spec.strip_prefix("mul:") {
        let q: i64 = q.parse().map_err(|_| InputError(format!("bad multiplier {q:?}")))?;
        IntMatrix::scalar(fan.dim(), q.into())
    } else if spec == "id" || spec == "identity" {
        IntMatrix::identity(fan.dim())
    } else {
        let text = read_source(spec)?;
        parse_endo(&text, Some(fan.dim()))
            .map_err(|e| InputError(format!("{spec}: {e}")))?
            .to_matrix()?
    };
    Ok(build_endo(fan, matrix)?)
}

struct Context {
    fan: Fan,
    pic: PicLattice,
}

fn context(cli: &Cli, spec: &str) -> Result<Context, InputError> {
    let fan = load_fan(spec)?;
    let pic = class_group(&fan)?;
    if !cli.allow_nonprojective && find_ample_class(&fan, &pic)?.is_none() {
        return Err(InputError(
            "the ample cone is empty; pass --allow-nonprojective to continue".into(),
        ));
    }
    Ok(Context { fan, pic })
}

fn divisor_of(ctx: &Context, args: &DivisorArgs) -> Result<TorusDivisor, InputError> {
    let d = match (&args.divisor, &args.class) {
        (Some(d), _) => parse_divisor(d)?,
        (None, Some(c)) => {
            let c = parse_class(c)?;
            ctx.pic.check_class(&c)?;
            ctx.pic.lift(&c)
        }
        (None, None) => TorusDivisor::zero(ctx.fan.num_rays()),
    };
    ctx.pic.check_divisor(&d)?;
    Ok(d)
}

/// Integers that overflow `i64` are emitted as decimal strings.
fn int(x: &num_bigint::BigInt) -> Value {
    match x.to_i64() {
        Some(i) => json!(i),
        None => json!(x.to_string()),
    }
}

fn ints(v: &[num_bigint::BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| ints(r)).collect())
}

fn tuple(v: &[num_bigint::BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn emit(cli: &Cli, code: i32, value: Value, human: String) -> Outcome {
    if cli.json {
        Ok((code, format!("{}\n", serde_json::to_string(&value)?)))
    } else {
        Ok((code, human))
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { fan } => {
            let fan = load_fan(fan)?;
            let r = fan.report();
            let code = if r.smooth && r.complete { 0 } else { 1 };
            let human = format!(
                "{} {}\n",
                if r.smooth { "smooth" } else { "not-smooth" },
                if r.complete { "complete" } else { "not-complete" }
            );
            let value = json!({
                "dim": fan.dim(),
                "rays": fan.num_rays(),
                "cones": fan.cones().len(),
                "smooth": r.smooth,
                "complete": r.complete,
            });
            emit(cli, code, value, human)
        }
        Command::H0 { fan, divisor } => {
            let ctx = context(cli, fan)?;
            let d = divisor_of(&ctx, divisor)?;
            let n = h0(&ctx.fan, &d)?;
            let class = ctx.pic.class_of(&d);
            let value = json!({"divisor": ints(d.coeffs()), "class": ints(class.coords()), "h0": n});
            emit(cli, 0, value, format!("h0({class}) = {n}\n"))
        }
        Command::Positivity { fan, divisor } => {
            let ctx = context(cli, fan)?;
            let d = divisor_of(&ctx, divisor)?;
            let p = positivity(&ctx.fan, &d)?;
            let class = ctx.pic.class_of(&d);
            let value = json!({"divisor": ints(d.coeffs()), "class": ints(class.coords()), "positivity": p.as_str()});
            emit(cli, 0, value, format!("{p}\n"))
        }
        Command::EndoCheck { fan, endo } => {
            let ctx = context(cli, fan)?;
            let e = load_endo(&ctx.fan, endo)?;
            let pb = pullback_matrix(&e, &ctx.pic);
            let mut human = String::new();
            writeln!(human, "degree: {}", e.degree())?;
            let perm: Vec<String> = e
                .permutation()
                .iter()
                .enumerate()
                .map(|(r, t)| format!("{r}->{t}"))
                .collect();
            writeln!(human, "ray permutation: {}", perm.join(" "))?;
            writeln!(human, "multiplicities: {}", tuple(e.multiplicities()))?;
            writeln!(human, "pullback on Pic: {pb}")?;
            let value = json!({
                "degree": int(&e.degree()),
                "permutation": e.permutation(),
                "multiplicities": ints(e.multiplicities()),
                "pullback": matrix_json(&pb),
            });
            emit(cli, 0, value, human)
        }
        Command::Intamp { fan, endo } => {
            let ctx = context(cli, fan)?;
            let e = load_endo(&ctx.fan, endo)?;
            let verdict = is_int_amplified(&e, &ctx.pic)?;
            let fixed: Vec<Value> = fixed_classes(&e, &ctx.pic).iter().map(|c| ints(c.coords())).collect();
            let (human, value) = match &verdict {
                IntAmplified::Yes { certificate } => (
                    format!("yes, certificate H={}\n", tuple(certificate.coords())),
                    json!({"int_amplified": true, "certificate": ints(certificate.coords()), "fixed_classes": fixed}),
                ),
                IntAmplified::No => (
                    "no\n".to_string(),
                    json!({"int_amplified": false, "certificate": null, "fixed_classes": fixed}),
                ),
            };
            emit(cli, 0, value, human)
        }
        Command::Pushforward { fan, endo, divisor } => {
            let ctx = context(cli, fan)?;
            let e = load_endo(&ctx.fan, endo)?;
            let d = divisor_of(&ctx, divisor)?;
            let dec = decompose_pushforward(&e, &ctx.pic, &d)?;
            let mut human = String::new();
            writeln!(
                human,
                "f_*O(D), D = {} (class {}), degree {}",
                d,
                ctx.pic.class_of(&d),
                e.degree()
            )?;
            writeln!(human, "{:<14} {:<20} class", "coset", "witness")?;
            for s in &dec.summands {
                writeln!(human, "{:<14} {:<20} {}", tuple(&s.coset), s.witness.to_string(), s.class)?;
            }
            let summands: Vec<Value> = dec
                .summands
                .iter()
                .map(|s| json!({"coset": ints(&s.coset), "witness": ints(s.witness.coeffs()), "class": ints(s.class.coords())}))
                .collect();
            let value = json!({
                "divisor": ints(d.coeffs()),
                "degree": int(&e.degree()),
                "summands": summands,
            });
            emit(cli, 0, value, human)
        }
        Command::Verify { fan, endo, divisor, bound } => {
            let ctx = context(cli, fan)?;
            let e = load_endo(&ctx.fan, endo)?;
            let d = divisor_of(&ctx, divisor)?;
            let dec = decompose_pushforward(&e, &ctx.pic, &d)?;
            let report = verify_decomposition(&e, &ctx.pic, &d, &dec, *bound);
            let code = if report.passed() { 0 } else { 1 };
            let mut human = if report.passed() {
                format!("pass: {} summands, {} twists checked\n", dec.len(), report.twists_checked)
            } else {
                format!("FAIL: {} violations\n", report.violations.len())
            };
            for v in &report.violations {
                writeln!(human, "  {v}")?;
            }
            let value = json!({
                "passed": report.passed(),
                "twists_checked": report.twists_checked,
                "violations": report.violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
            });
            emit(cli, code, value, human)
        }
        Command::CoxShifts { fan, endo, divisor, bound } => {
            let ctx = context(cli, fan)?;
            let e = load_endo(&ctx.fan, endo)?;
            let d = divisor_of(&ctx, divisor)?;
            let ring = cox_ring(&ctx.fan, &ctx.pic)?;
            match module_shifts(&e, &ring, &d, *bound) {
                Ok(s) => {
                    let parts: Vec<String> =
                        s.shifts.iter().map(|c| format!("R({})", c.to_csv())).collect();
                    let value = json!({
                        "shifts": s.shifts.iter().map(|c| ints(c.coords())).collect::<Vec<_>>(),
                        "verified_box": bound,
                    });
                    emit(cli, 0, value, format!("E_M = {}\n", parts.join(" + ")))
                }
                Err(err) => {
                    let value = json!({"error": err.to_string()});
                    emit(cli, 1, value, format!("FAIL: {err}\n"))
                }
            }
        }
        Command::Contracting { fan, endo } => {
            let ctx = context(cli, fan)?;
            let e = load_endo(&ctx.fan, endo)?;
            let ring = cox_ring(&ctx.fan, &ctx.pic)?;
            let phi = induced_cox_endo(&e, &ring)?;
            let exp = contracting_exponent(&phi);
            let human = match exp {
                Some(k) => format!("e = {k}\nphi: {phi}\n"),
                None => format!("none\nphi: {phi}\n"),
            };
            emit(cli, 0, json!({"exponent": exp, "substitution": phi.to_string()}), human)
        }
        Command::CosetCount { fan, endo } => {
            let ctx = context(cli, fan)?;
            let e = load_endo(&ctx.fan, endo)?;
            let reps = pic_coset_decomposition(&e, &ctx.pic)?;
            let mut human = format!("|Pic/f*Pic| = {}\n", reps.len());
            for r in &reps {
                writeln!(human, "  {}", tuple(r.coords()))?;
            }
            let reps_json: Vec<Value> = reps.iter().map(|r| ints(r.coords())).collect();
            emit(cli, 0, json!({"count": reps.len(), "representatives": reps_json}), human)
        }
        Command::RankCheck { fan, endo } => {
            let ctx = context(cli, fan)?;
            let e = load_endo(&ctx.fan, endo)?;
            match rank_bookkeeping(&e, &ctx.pic) {
                Ok(r) => {
                    let human = format!(
                        "ok: prod c = {} = {} x {}\n",
                        r.multiplicity_product, r.degree, r.pic_index
                    );
                    let value = json!({
                        "holds": true,
                        "multiplicity_product": int(&r.multiplicity_product),
                        "degree": int(&r.degree),
                        "pic_index": int(&r.pic_index),
                    });
                    emit(cli, 0, value, human)
                }
                Err(err) => emit(cli, 1, json!({"holds": false, "error": err.to_string()}), format!("FAIL: {err}\n")),
            }
        }
    }
}
