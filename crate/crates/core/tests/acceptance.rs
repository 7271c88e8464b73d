//! Acceptance suite: one line per criterion, then a single assertion that all passed.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use descent_core::arith::{self, Budget};
use descent_core::cli::{run_command, trace_doc};
use descent_core::congruence;
use descent_core::descent::{self, verify_trace, DescentOptions, DescentTrace, StepKind};
use descent_core::identities::{self, FormKind, FormPair, Quad};
use descent_core::{oracle, pipeline, Error};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn b(v: u64) -> BigInt {
    BigInt::from(v)
}

fn primes_below(limit: u64) -> Vec<u64> {
    let mut sieve = vec![true; limit as usize];
    let mut out = Vec::new();
    for i in 2..limit as usize {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < limit as usize {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

fn u64s(v: &[BigInt]) -> Vec<u64> {
    v.iter().map(|x| x.to_u64().expect("non-negative and small")).collect()
}

fn within(name: &str, started: Instant, limit: Duration) -> Result<(), String> {
    let took = started.elapsed();
    if took > limit {
        Err(format!("{name} took {took:?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn four_square_totality() -> Outcome {
    let bud = Budget::default();
    let started = Instant::now();
    let mut checked_against_oracle = 0;
    for n in 0..=20_000u64 {
        let (rep, traces) = pipeline::four_squares(&b(n), &bud).map_err(|e| format!("N={n}: {e}"))?;
        let v = rep.to_vec();
        let norm: BigInt = v.iter().map(|x| x * x).sum();
        if norm != b(n) || v.windows(2).any(|w| w[0] < w[1]) || v[3].sign() == Sign::Minus {
            return Err(format!("N={n}: bad quadruple {v:?}"));
        }
        if let Some(t) = traces.iter().find(|t| !verify_trace(t).is_accept()) {
            return Err(format!("N={n}: trace for prime {} rejected", t.target));
        }
        if n <= 3000 {
            let set = oracle::enum_four_reps(n).map_err(|e| e.to_string())?;
            if !set.contains(&u64s(&v)) {
                return Err(format!("N={n}: {v:?} not in the enumeration"));
            }
            checked_against_oracle += 1;
        }
    }
    within("sweep", started, Duration::from_secs(60))?;
    Ok(format!(
        "20001 values verified, {checked_against_oracle} matched enumeration, {:.1?}",
        started.elapsed()
    ))
}

fn prime_representability() -> Outcome {
    let bud = Budget::default();
    let started = Instant::now();
    let mut violations = Vec::new();
    let mut checked = 0;
    for p in primes_below(10_000) {
        let pb = b(p);
        for kind in FormKind::ALL {
            checked += 1;
            let root = arith::sqrt_mod(&-BigInt::from(kind.d()), &pb).map_err(|e| e.to_string())?;
            let truth = oracle::enum_form_reps(kind, p).map_err(|e| e.to_string())?;
            let found = pipeline::represent_form(kind, &pb, &bud).map_err(|e| format!("D={kind} p={p}: {e}"))?;
            match (root, found) {
                (Some(_), Some((rep, _))) if truth.contains(&u64s(&[rep.x.clone(), rep.y.clone()])) => {}
                (Some(_), Some((rep, _))) => violations.push(format!("D={} p={p}: ({}, {}) not enumerated", kind.d(), rep.x, rep.y)),
                (Some(s), None) => violations.push(format!(
                    "D={} p={p}: sqrt_mod(-{}, {p}) = {s} exists but no representation returned (enumeration size {})",
                    kind.d(),
                    kind.d(),
                    truth.reps.len()
                )),
                (None, None) if truth.is_empty() => {}
                (None, None) => violations.push(format!("D={} p={p}: none returned but enumeration nonempty", kind.d())),
                (None, Some(_)) => violations.push(format!("D={} p={p}: representation returned without a root", kind.d())),
            }
        }
    }
    within("sweep", started, Duration::from_secs(30))?;
    if violations.is_empty() {
        Ok(format!("{checked} (D, p) pairs, {:.1?}", started.elapsed()))
    } else {
        Err(violations.join("; "))
    }
}

fn random_big(rng: &mut StdRng) -> BigInt {
    let magnitude = BigInt::from(rng.random::<u128>());
    if rng.random_bool(0.5) {
        -magnitude
    } else {
        magnitude
    }
}

fn identity_exactness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    const TRIALS: usize = 100_000;
    for kind in FormKind::ALL {
        let d = BigInt::from(kind.d());
        let norm = |x: &BigInt, y: &BigInt| x * x + &d * y * y;
        for i in 0..TRIALS {
            let (x1, y1, x2, y2) = (random_big(&mut rng), random_big(&mut rng), random_big(&mut rng), random_big(&mut rng));
            let u = FormPair { kind, x: x1.clone(), y: y1.clone() };
            let v = FormPair { kind, x: x2.clone(), y: y2.clone() };
            let w = identities::compose_form(kind, &u, &v).map_err(|e| e.to_string())?;
            if norm(&w.x, &w.y) != norm(&x1, &y1) * norm(&x2, &y2) {
                return Err(format!("D={} trial {i}: product of norms differs", kind.d()));
            }
        }
    }
    let sq = |v: &[BigInt]| -> BigInt { v.iter().map(|x| x * x).sum() };
    for i in 0..TRIALS {
        let u: Vec<BigInt> = (0..4).map(|_| random_big(&mut rng)).collect();
        let v: Vec<BigInt> = (0..4).map(|_| random_big(&mut rng)).collect();
        let w = identities::compose_four(&Quad::from_slice(&u).unwrap(), &Quad::from_slice(&v).unwrap());
        if sq(&w.to_vec()) != sq(&u) * sq(&v) {
            return Err(format!("four squares trial {i}: product of norms differs"));
        }
    }
    Ok(format!("{} tuples per identity, 4 identities, exact", TRIALS))
}

/// Every single-integer or kind change to a trace that must be caught.
fn tamperings(t: &DescentTrace) -> Vec<(String, DescentTrace)> {
    let mut out = Vec::new();
    let mut push = |label: String, f: &dyn Fn(&mut DescentTrace)| {
        let mut c = t.clone();
        f(&mut c);
        out.push((label, c));
    };
    push("N".into(), &|c| {
        c.target += 1;
        c.seed.target += 1;
    });
    push("seed.n".into(), &|c| c.seed.n += 1);
    for i in 0..t.seed.roots.len() {
        push(format!("seed.roots[{i}]"), &|c| c.seed.roots[i] += 1);
    }
    for i in 0..t.result.len() {
        push(format!("result[{i}]"), &|c| c.result[i] += 1);
    }
    for (k, s) in t.steps.iter().enumerate() {
        push(format!("steps[{k}].n"), &|c| c.steps[k].n += 1);
        push(format!("steps[{k}].n_next"), &|c| c.steps[k].n_next += 1);
        push(format!("steps[{k}].kind"), &|c| {
            c.steps[k].kind = match c.steps[k].kind {
                StepKind::Standard => StepKind::Halve,
                _ => StepKind::Standard,
            }
        });
        let lists: [(&str, usize); 5] = [
            ("roots_in", s.roots_in.len()),
            ("residues", s.residues.len()),
            ("quotients", s.quotients.len()),
            ("composed", s.composed.len()),
            ("roots_out", s.roots_out.len()),
        ];
        for (name, len) in lists {
            for i in 0..len {
                push(format!("steps[{k}].{name}[{i}]"), &|c| {
                    let st = &mut c.steps[k];
                    let field = match name {
                        "roots_in" => &mut st.roots_in,
                        "residues" => &mut st.residues,
                        "quotients" => &mut st.quotients,
                        "composed" => &mut st.composed,
                        _ => &mut st.roots_out,
                    };
                    field[i] += 1;
                });
            }
        }
    }
    out
}

fn contraction_bounds() -> Outcome {
    let bud = Budget::default();
    let opts = DescentOptions::default();
    const PER_FORM: usize = 1000;
    let primes = primes_below(100_000);
    let mut traces = 0;
    let mut tampered = 0;
    let mut worst_steps = 0f64;
    let forms: [Option<FormKind>; 4] = [Some(FormKind::One), Some(FormKind::Two), Some(FormKind::Three), None];
    for form in forms {
        let mut taken = 0;
        for &p in primes.iter().filter(|&&p| p > 2) {
            if taken == PER_FORM {
                break;
            }
            let pb = b(p);
            let trace = match form {
                Some(kind) => match pipeline::form_seed(kind, &pb).map_err(|e| e.to_string())? {
                    Some(seed) => descent::descend_form(kind, &seed, &opts).map_err(|e| e.to_string())?.1,
                    None => continue,
                },
                None => pipeline::decompose_prime(&pb, &bud).map_err(|e| e.to_string())?.1,
            };
            taken += 1;
            traces += 1;
            let label = form.map_or("four".to_string(), |k| format!("D={}", k.d()));
            for (i, s) in trace.steps.iter().enumerate() {
                if s.kind != StepKind::Standard {
                    continue;
                }
                let ok = match form {
                    Some(FormKind::One) => &s.n_next * 2u32 <= s.n,
                    Some(FormKind::Two) => &s.n_next * 4u32 <= &s.n * 3u32,
                    _ => s.n_next < s.n,
                };
                if !ok {
                    return Err(format!("{label} p={p} step {i}: n {} -> {}", s.n, s.n_next));
                }
            }
            let bound = 2 * arith::bit_length(&trace.seed.n) as usize + 2;
            if trace.steps.len() > bound {
                return Err(format!("{label} p={p}: {} steps, bound {bound}", trace.steps.len()));
            }
            worst_steps = worst_steps.max(trace.steps.len() as f64 / bound as f64);
            if let Some(r) = verify_trace(&trace).rejection() {
                return Err(format!("{label} p={p}: emitted trace rejected: {r}"));
            }
            for (what, bad) in tamperings(&trace) {
                tampered += 1;
                if verify_trace(&bad).is_accept() {
                    return Err(format!("{label} p={p}: tampering {what} accepted"));
                }
            }
        }
        if taken < PER_FORM {
            return Err(format!("only {taken} seeds found for one form"));
        }
    }
    Ok(format!(
        "{traces} traces verified, {tampered} tamperings rejected, worst steps/bound {worst_steps:.2}"
    ))
}

fn three_squares_sweep() -> Outcome {
    let bud = Budget::default();
    let started = Instant::now();
    let mut not_coprime = Vec::new();
    let mut empty = Vec::new();
    for p in primes_below(2000).into_iter().filter(|&p| p > 2) {
        let s = congruence::find_three_squares(&b(p), &bud).map_err(|e| format!("N={p}: {e}"))?;
        if !s.verifies() {
            return Err(format!("N={p}: solution does not verify"));
        }
        if !s.coprime {
            not_coprime.push(p);
        }
        if oracle::first_exhaustive_ternary(1, 1, 1, p).map_err(|e| e.to_string())?.is_none() {
            empty.push(p);
        }
    }
    within("sweep", started, Duration::from_secs(20))?;
    if not_coprime != empty {
        return Err(format!("coprime flag false at {not_coprime:?}, enumeration empty at {empty:?}"));
    }
    if not_coprime != vec![5] {
        return Err(format!("expected only N=5 without coprime solution, got {not_coprime:?}"));
    }
    Ok(format!("all odd primes below 2000 verified; no coprime solution only at {not_coprime:?}, {:.1?}", started.elapsed()))
}

fn ternary_sweep() -> Outcome {
    let bud = Budget::default();
    let check = |l: u64, m: u64, v: u64, n: u64| -> Result<(), String> {
        let s = congruence::solve_ternary(&b(l), &b(m), &b(v), &b(n), false, &bud)
            .map_err(|e| format!("({l},{m},{v}) mod {n}: {e}"))?;
        let value = b(l) * &s.x * &s.x + b(m) * &s.y * &s.y + b(v) * &s.z * &s.z;
        let nonzero = !(s.x.is_zero() && s.y.is_zero() && s.z.is_zero());
        if !s.verifies() || !value.is_multiple_of(&b(n)) || !nonzero {
            return Err(format!("({l},{m},{v}) mod {n}: bad solution ({}, {}, {})", s.x, s.y, s.z));
        }
        Ok(())
    };
    let primes = primes_below(300);
    let mut exhaustive = 0;
    for &n in primes.iter().filter(|&&p| p > 2 && p <= 23) {
        for l in 1..n {
            for m in 1..n {
                for v in 1..n {
                    check(l, m, v, n)?;
                    exhaustive += 1;
                }
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let mut sampled = 0;
    for &n in primes.iter().filter(|&&p| p > 23) {
        for _ in 0..1000 {
            check(rng.random_range(1..n), rng.random_range(1..n), rng.random_range(1..n), n)?;
            sampled += 1;
        }
    }
    match congruence::solve_ternary(&b(1), &b(1), &b(1), &b(5), true, &bud) {
        Err(Error::NoCoprimeSolution(_)) => {}
        other => return Err(format!("(1,1,1) mod 5 with coprimality required gave {other:?}")),
    }
    Ok(format!("{exhaustive} exhaustive and {sampled} sampled triples solved; (1,1,1) mod 5 refused"))
}

fn divisibility_regression() -> Outcome {
    let (p, q, r, s, a) = (b(219), b(192), b(255), b(402), b(117));
    let total = &p * &p + &q * &q + &r * &r + &s * &s;
    if total != b(311_454) {
        return Err(format!("sum of squares is {total}"));
    }
    if !total.is_multiple_of(&a) {
        return Err("117 does not divide the sum".into());
    }
    for x in [&p, &q, &r, &s] {
        if (x * x).is_multiple_of(&a) {
            return Err(format!("117 divides {x}^2"));
        }
    }
    let three = b(3);
    if !(&p * &p + &q * &q).is_multiple_of(&three) || !(&r * &r + &s * &s).is_multiple_of(&three) {
        return Err("3 does not divide both pair sums".into());
    }
    Ok(format!("{total} = 117 * {}", &total / &a))
}

fn triangular_impossibility() -> Outcome {
    let started = Instant::now();
    let found = oracle::rational_triangular_search(200).map_err(|e| e.to_string())?;
    within("search", started, Duration::from_secs(10))?;
    if found.is_empty() {
        Ok(format!("no a^2+b^2+c^2 = 7t^2 with t <= 200, {:.1?}", started.elapsed()))
    } else {
        Err(format!("found {:?}", &found[..found.len().min(3)]))
    }
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["descent"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_command(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn cli_contract() -> Outcome {
    let (code, out, _) = run(&["foursq", "7", "--json"]);
    if code != 0 || out != golden("foursq_7.json") {
        return Err(format!("foursq 7 --json: exit {code}, output {out:?}"));
    }
    let (code, out, _) = run(&["form", "--d", "3", "2"]);
    if code != 2 || out != golden("form_d3_2.txt") || !out.contains("not representable") {
        return Err(format!("form --d 3 2: exit {code}, output {out:?}"));
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("trace.ndjson");
    let path_str = path.to_str().unwrap();
    let (code, _, err) = run(&["foursq", "23", "--trace", path_str]);
    if code != 0 {
        return Err(format!("foursq 23 --trace: exit {code}: {err}"));
    }
    let emitted = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    if emitted != golden("trace_23.ndjson") {
        return Err(format!("trace for 23 differs from golden: {emitted}"));
    }
    let (code, out, err) = run(&["verify", path_str]);
    if code != 0 || out != golden("verify_23.txt") {
        return Err(format!("verify: exit {code}, output {out:?}, stderr {err:?}"));
    }

    let bud = Budget::default();
    let mut round_trips = 0;
    let mut n = 2u64;
    while round_trips < 100 {
        let (_, traces) = pipeline::four_squares(&b(n), &bud).map_err(|e| e.to_string())?;
        let form_traces = FormKind::ALL
            .iter()
            .filter_map(|&k| pipeline::represent_form(k, &b(n), &bud).ok().flatten())
            .flat_map(|(_, t)| t);
        for t in traces.into_iter().chain(form_traces) {
            if t.steps.is_empty() || round_trips == 100 {
                continue;
            }
            let text = trace_doc::trace_to_json(&t);
            let back = trace_doc::trace_from_json(&text).map_err(|e| e.to_string())?;
            if back != t || trace_doc::trace_to_json(&back) != text {
                return Err(format!("round trip changed the trace for {}", t.target));
            }
            round_trips += 1;
        }
        n += 1;
    }
    Ok(format!("3 golden outputs match; {round_trips} traces round-trip byte-identically"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("four-square totality", four_square_totality),
        ("prime representability", prime_representability),
        ("identity exactness", identity_exactness),
        ("contraction bounds", contraction_bounds),
        ("three-squares sweep", three_squares_sweep),
        ("ternary congruence sweep", ternary_sweep),
        ("117 divisibility regression", divisibility_regression),
        ("triangular impossibility", triangular_impossibility),
        ("CLI contract", cli_contract),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = f();
        let took = started.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{took:.1?}]", i + 1),
            Err(why) => {
                println!("FAIL {} {name}: {why} [{took:.1?}]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
