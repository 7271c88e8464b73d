//! Command-line front end.
//!
//! Exit codes: 0 success, 1 internal failure, 2 no representation (or no
//! coprime solution), 3 verification reject or unreadable trace, 64 usage or
//! invalid input, 65 work budget exceeded.

pub mod trace_doc;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::Budget;
use crate::congruence;
use crate::descent::{self, verify_trace, DescentOptions, DescentTrace, Form, SeedMultiple};
use crate::error::Error;
use crate::identities::FormKind;
use crate::oracle;
use crate::pipeline;

pub use trace_doc::{parse_trace, serialize_trace, to_json, ParseError, TraceDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NONE: i32 = 2;
pub const EXIT_REJECT: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_BUDGET: i32 = 65;

#[derive(Debug, Parser)]
#[command(name = "descent", version, about = "Sums of squares by descent, with checkable certificates")]
struct Cli {
    /// Print results as JSON (integers as decimal strings).
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct TraceOut {
    /// Write the descent certificates here, one JSON document per line.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Four-square representation of N >= 0.
    Foursq {
        #[arg(value_parser = parse_big, allow_hyphen_values = true)]
        n: BigInt,
        #[command(flatten)]
        out: TraceOut,
    },
    /// Representation of N as x^2 + D y^2.
    Form {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
        d: u32,
        #[arg(value_parser = parse_big, allow_hyphen_values = true)]
        n: BigInt,
        #[command(flatten)]
        out: TraceOut,
    },
    /// Run one descent from an explicit seed; --d 4 selects four squares.
    Descend {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
        d: u32,
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        modulus: BigInt,
        /// Comma-separated roots: a,b or a,b,c,d.
        #[arg(long, allow_hyphen_values = true)]
        roots: String,
        /// Allow composite targets and report failure instead of refusing.
        #[arg(long)]
        best_effort: bool,
        #[command(flatten)]
        out: TraceOut,
    },
    /// Solve lambda x^2 + mu y^2 + nu z^2 = 0 modulo an odd prime.
    Congruence {
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        lambda: BigInt,
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        mu: BigInt,
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        nu: BigInt,
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        modulus: BigInt,
        #[arg(long)]
        require_coprime: bool,
    },
    /// Solve p^2 = B q^2 + C modulo a prime, (p, q) != (0, 0).
    Lagrange {
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        b: BigInt,
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        c: BigInt,
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        modulus: BigInt,
    },
    /// Check every trace document in a file (one per line).
    Verify { file: PathBuf },
    /// Check four squares and all three forms for every N in [0, max] against brute force.
    Sweep {
        #[arg(long)]
        max: u64,
    },
}

fn parse_big(s: &str) -> Result<BigInt, String> {
    s.parse().map_err(|_| format!("{s:?} is not an integer"))
}

enum Failure {
    Code(i32, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget(_) => EXIT_BUDGET,
            Error::NoCoprimeSolution(_) => EXIT_NONE,
            Error::DescentFailed(_) => EXIT_FAILURE,
            _ => EXIT_USAGE,
        };
        Failure::Code(code, e.to_string())
    }
}

fn fail(code: i32, msg: impl Into<String>) -> Failure {
    Failure::Code(code, msg.into())
}

type CmdResult = Result<i32, Failure>;

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run_command<S: AsRef<str>>(argv: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let budget = Budget::default();
    let result = match cli.command {
        Command::Foursq { n, out: t } => cmd_foursq(&n, t.trace.as_deref(), cli.json, &budget, out),
        Command::Form { d, n, out: t } => cmd_form(d, &n, t.trace.as_deref(), cli.json, &budget, out),
        Command::Descend { d, modulus, roots, best_effort, out: t } => {
            cmd_descend(d, &modulus, &roots, best_effort, t.trace.as_deref(), cli.json, &budget, out)
        }
        Command::Congruence { lambda, mu, nu, modulus, require_coprime } => {
            cmd_congruence(&lambda, &mu, &nu, &modulus, require_coprime, cli.json, &budget, out)
        }
        Command::Lagrange { b, c, modulus } => cmd_lagrange(&b, &c, &modulus, cli.json, &budget, out),
        Command::Verify { file } => cmd_verify(&file, cli.json, out, err),
        Command::Sweep { max } => cmd_sweep(max, cli.json, &budget, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Code(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn strs(v: &[BigInt]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| fail(EXIT_FAILURE, format!("cannot write output: {e}")))
}

fn emit_json(out: &mut dyn Write, v: &Value) -> Result<(), Failure> {
    emit(out, &format!("{v}\n"))
}

fn check_traces(traces: &[DescentTrace]) -> Result<(), Failure> {
    for t in traces {
        if let Some(r) = verify_trace(t).rejection() {
            return Err(fail(EXIT_FAILURE, format!("internal error: emitted trace for {} rejected: {r}", t.target)));
        }
    }
    Ok(())
}

fn write_traces(path: Option<&Path>, traces: &[DescentTrace]) -> Result<(), Failure> {
    let Some(path) = path else { return Ok(()) };
    let text: String = traces.iter().map(trace_doc::trace_to_json).collect();
    std::fs::write(path, text).map_err(|e| fail(EXIT_FAILURE, format!("cannot write {}: {e}", path.display())))
}

fn form_kind(d: u32) -> Result<FormKind, Failure> {
    Ok(FormKind::from_d(d)?)
}

fn render_form(kind: FormKind, x: &dyn std::fmt::Display, y: &dyn std::fmt::Display) -> String {
    match kind.d() {
        1 => format!("{x}^2 + {y}^2"),
        d => format!("{x}^2 + {d}*{y}^2"),
    }
}

fn cmd_foursq(n: &BigInt, trace: Option<&Path>, json: bool, budget: &Budget, out: &mut dyn Write) -> CmdResult {
    let (rep, traces) = pipeline::four_squares(n, budget)?;
    if !rep.is_valid() {
        return Err(fail(EXIT_FAILURE, format!("internal error: {:?} does not represent {n}", rep.to_vec())));
    }
    check_traces(&traces)?;
    write_traces(trace, &traces)?;
    let v = rep.to_vec();
    if json {
        emit_json(out, &json!({ "N": n.to_string(), "rep": strs(&v) }))?;
    } else {
        let terms: Vec<String> = v.iter().map(|x| format!("{x}^2")).collect();
        emit(out, &format!("{n} = {}\n", terms.join(" + ")))?;
    }
    Ok(EXIT_OK)
}

fn cmd_form(d: u32, n: &BigInt, trace: Option<&Path>, json: bool, budget: &Budget, out: &mut dyn Write) -> CmdResult {
    let kind = form_kind(d)?;
    let Some((rep, traces)) = pipeline::represent_form(kind, n, budget)? else {
        write_traces(trace, &[])?;
        if json {
            emit_json(out, &json!({ "N": n.to_string(), "d": d.to_string(), "rep": Value::Null }))?;
        } else {
            emit(out, &format!("{n} is not representable as {}\n", render_form(kind, &"x", &"y")))?;
        }
        return Ok(EXIT_NONE);
    };
    if !rep.is_valid() {
        return Err(fail(EXIT_FAILURE, format!("internal error: ({}, {}) does not represent {n}", rep.x, rep.y)));
    }
    check_traces(&traces)?;
    write_traces(trace, &traces)?;
    if json {
        emit_json(out, &json!({ "N": n.to_string(), "d": d.to_string(), "rep": [rep.x.to_string(), rep.y.to_string()] }))?;
    } else {
        emit(out, &format!("{n} = {}\n", render_form(kind, &rep.x, &rep.y)))?;
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_descend(
    d: u32,
    modulus: &BigInt,
    roots: &str,
    best_effort: bool,
    trace: Option<&Path>,
    json: bool,
    budget: &Budget,
    out: &mut dyn Write,
) -> CmdResult {
    let form = if d == 4 { Form::Four } else { Form::Binary(form_kind(d)?) };
    let roots: Vec<BigInt> = roots
        .split(',')
        .map(|s| parse_big(s.trim()).map_err(|m| fail(EXIT_USAGE, m)))
        .collect::<Result<_, _>>()?;
    if roots.len() != form.arity() {
        return Err(fail(EXIT_USAGE, format!("--d {d} needs {} roots, got {}", form.arity(), roots.len())));
    }
    let seed = SeedMultiple::new(form, modulus.clone(), roots)?;
    let opts = DescentOptions { best_effort, budget: *budget };
    let (result, t) = match form {
        Form::Binary(kind) => {
            let (rep, t) = descent::descend_form(kind, &seed, &opts)?;
            (vec![rep.x, rep.y], t)
        }
        Form::Four => {
            let (rep, t) = descent::descend_four(&seed, &opts)?;
            (rep.to_vec(), t)
        }
    };
    if form.norm(&result).as_ref() != Some(modulus) {
        return Err(fail(EXIT_FAILURE, "internal error: result does not verify"));
    }
    check_traces(std::slice::from_ref(&t))?;
    write_traces(trace, std::slice::from_ref(&t))?;
    let chain = strs(&t.n_chain());
    if json {
        emit_json(
            out,
            &json!({ "form": form.as_str(), "N": modulus.to_string(), "rep": strs(&result), "n_chain": chain }),
        )?;
    } else {
        let rendered = match form {
            Form::Binary(kind) => render_form(kind, &result[0], &result[1]),
            Form::Four => result.iter().map(|x| format!("{x}^2")).collect::<Vec<_>>().join(" + "),
        };
        emit(out, &format!("{modulus} = {rendered}\nn: {}\n", chain.join(" -> ")))?;
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_congruence(
    lambda: &BigInt,
    mu: &BigInt,
    nu: &BigInt,
    modulus: &BigInt,
    require_coprime: bool,
    json: bool,
    budget: &Budget,
    out: &mut dyn Write,
) -> CmdResult {
    let s = match congruence::solve_ternary(lambda, mu, nu, modulus, require_coprime, budget) {
        Ok(s) => s,
        Err(Error::NoCoprimeSolution(m)) => {
            if json {
                emit_json(out, &json!({ "modulus": m, "solution": Value::Null }))?;
            } else {
                emit(out, &format!("no coprime solution modulo {m}\n"))?;
            }
            return Ok(EXIT_NONE);
        }
        Err(e) => return Err(e.into()),
    };
    if !s.verifies() {
        return Err(fail(EXIT_FAILURE, "internal error: solution does not verify"));
    }
    if json {
        emit_json(
            out,
            &json!({
                "modulus": modulus.to_string(),
                "solution": [s.x.to_string(), s.y.to_string(), s.z.to_string()],
                "coprime": s.coprime,
            }),
        )?;
    } else {
        emit(
            out,
            &format!("{lambda}*{}^2 + {mu}*{}^2 + {nu}*{}^2 = 0 (mod {modulus})\n", s.x, s.y, s.z),
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_lagrange(b: &BigInt, c: &BigInt, modulus: &BigInt, json: bool, budget: &Budget, out: &mut dyn Write) -> CmdResult {
    let (p, q) = congruence::solve_lagrange(b, c, modulus, budget)?;
    let lhs = &p * &p - b * &q * &q - c;
    if !(lhs % modulus).is_zero() {
        return Err(fail(EXIT_FAILURE, "internal error: solution does not verify"));
    }
    if json {
        emit_json(out, &json!({ "modulus": modulus.to_string(), "p": p.to_string(), "q": q.to_string() }))?;
    } else {
        emit(out, &format!("{p}^2 = {b}*{q}^2 + {c} (mod {modulus})\n"))?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(file: &Path, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let text = std::fs::read_to_string(file)
        .map_err(|e| fail(EXIT_REJECT, format!("cannot read {}: {e}", file.display())))?;
    let mut count = 0usize;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let t = trace_doc::trace_from_json(line)
            .map_err(|e| fail(EXIT_REJECT, format!("{}:{}: {e}", file.display(), i + 1)))?;
        if let Some(r) = verify_trace(&t).rejection() {
            let _ = writeln!(err, "{}:{}: rejected: {r}", file.display(), i + 1);
            if json {
                emit_json(out, &json!({ "verified": false, "line": i + 1, "reason": r.to_string() }))?;
            }
            return Ok(EXIT_REJECT);
        }
        count += 1;
    }
    if count == 0 {
        return Err(fail(EXIT_REJECT, format!("{} contains no traces", file.display())));
    }
    if json {
        emit_json(out, &json!({ "verified": true, "traces": count }))?;
    } else {
        emit(out, &format!("ok: {count} trace(s) verified\n"))?;
    }
    Ok(EXIT_OK)
}

fn sweep_one(n: u64, budget: &Budget) -> Result<Vec<String>, Error> {
    let big = BigInt::from(n);
    let mut problems = Vec::new();
    let (rep, traces) = pipeline::four_squares(&big, budget)?;
    if !rep.is_valid() || !traces.iter().all(|t| verify_trace(t).is_accept()) {
        problems.push(format!("{n}: four squares {:?} failed to verify", strs(&rep.to_vec())));
    }
    if n <= oracle::FOUR_LIMIT && !oracle::enum_four_reps(n)?.contains(&to_u64s(&rep.to_vec())) {
        problems.push(format!("{n}: four squares not in the brute-force list"));
    }
    if n == 0 {
        return Ok(problems);
    }
    for kind in FormKind::ALL {
        let found = pipeline::represent_form(kind, &big, budget)?;
        let truth = oracle::enum_form_reps(kind, n)?;
        match found {
            Some((rep, traces)) => {
                let ok = rep.is_valid()
                    && traces.iter().all(|t| verify_trace(t).is_accept())
                    && truth.contains(&to_u64s(&[rep.x.clone(), rep.y.clone()]));
                if !ok {
                    problems.push(format!("{n}: {kind} representation ({}, {}) wrong", rep.x, rep.y));
                }
            }
            None if !truth.is_empty() => problems.push(format!("{n}: {kind} missed a representation")),
            None => {}
        }
    }
    Ok(problems)
}

fn to_u64s(v: &[BigInt]) -> Vec<u64> {
    v.iter().map(|x| x.abs().to_u64().unwrap_or(u64::MAX)).collect()
}

fn cmd_sweep(max: u64, json: bool, budget: &Budget, out: &mut dyn Write) -> CmdResult {
    if max > oracle::FOUR_LIMIT {
        return Err(fail(EXIT_USAGE, format!("--max is limited to {}", oracle::FOUR_LIMIT)));
    }
    let results: Vec<Result<Vec<String>, Error>> = (0..=max).into_par_iter().map(|n| sweep_one(n, budget)).collect();
    let mut problems = Vec::new();
    for r in results {
        problems.extend(r?);
    }
    if json {
        emit_json(out, &json!({ "max": max.to_string(), "checked": (max + 1).to_string(), "failures": problems }))?;
    } else {
        for p in &problems {
            emit(out, &format!("FAIL {p}\n"))?;
        }
        emit(out, &format!("checked N = 0..={max}: {} failure(s)\n", problems.len()))?;
    }
    Ok(if problems.is_empty() { EXIT_OK } else { EXIT_REJECT })
}
