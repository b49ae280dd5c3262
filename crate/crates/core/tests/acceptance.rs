//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any criterion fails.

use std::io::Write;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use schatten_core::divdiff::SymbolFunction;
use schatten_core::embed::{
    corner_embedding, cubature_embedding_2_4_3, diag_embedding, first_row_embedding, lambda_bound,
    s2_to_sp_embedding, sum_diff_embedding, vec_embedding, verify_isometry, DivisionAlgebra,
    Element, EmbeddingMap, Field, SpaceSpec,
};
use schatten_core::matrix::{
    function_calculus, random_complex, random_hermitian, DEFAULT_GROUP_TOL,
};
use schatten_core::moi::{fd_second_derivative, moi_apply, second_derivative_schatten, MoiProblem};
use schatten_core::obstruct::{
    check_candidate, eigenvalue_curves, CandidatePair, CheckConfig, Verdict, DEFAULT_T_GRID,
};
use schatten_core::schatten::{schatten_norm_pow, PExponent};
use serde_json::{json, Value};

const ISOMETRY_TOL: f64 = 1e-9;
const ISOMETRY_SAMPLES: usize = 200;
const CUBATURE_TOL: f64 = 1e-10;
const CUBATURE_SAMPLES: usize = 100;
const TRACE_FD_STEP: f64 = 1e-3;
const TRACE_TOL: f64 = 1e-4;
const DOI_TOL: f64 = 1e-8;
const OBSTRUCTION_CONSISTENT_TOL: f64 = 1e-10;
const CURVE_TOL: f64 = 1e-9;
/// The residual at t = 1 is exactly 2/5, so the bound carries a round-off allowance.
const SCALAR_FAIL_MIN: f64 = 0.4 - 1e-12;

type Criterion<'a> = (&'a str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn criterion_isometries() -> Outcome {
    let start = Instant::now();
    let exps = [
        PExponent::Finite(0.5),
        PExponent::Finite(1.0),
        PExponent::Finite(2.0),
        PExponent::Finite(3.0),
        PExponent::Infinity,
    ];
    let mut maps: Vec<(String, EmbeddingMap)> = Vec::new();
    for p in exps {
        maps.push((format!("diag(3, {p})"), diag_embedding(3, p).unwrap()));
        maps.push((
            format!("corner(2, 4, {p})"),
            corner_embedding(2, 4, p).unwrap(),
        ));
        maps.push((
            format!("firstrow(2, {p})"),
            first_row_embedding(2, p).unwrap(),
        ));
        maps.push((format!("s2sp(2, {p})"), s2_to_sp_embedding(2, p).unwrap()));
    }
    for n in [2, 3, 5] {
        maps.push((format!("sumdiff({n})"), sum_diff_embedding(n).unwrap()));
    }
    for m in [1, 2, 3] {
        maps.push((format!("vec({m})"), vec_embedding(m).unwrap()));
    }
    let mut worst = 0.0_f64;
    let mut failures = Vec::new();
    for (k, (name, map)) in maps.iter().enumerate() {
        let v = verify_isometry(map, ISOMETRY_SAMPLES, k as u64, ISOMETRY_TOL).unwrap();
        worst = worst.max(v.max_relative_residual);
        if !v.pass {
            failures.push(name.clone());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && within(elapsed, 10.0),
        format!(
            "{} maps, worst residual {worst:.2e} (tol {ISOMETRY_TOL:.0e}), failures {failures:?}, {:.2}s",
            maps.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_cubature() -> Outcome {
    let third = std::f64::consts::PI / 3.0;
    let oracle_err = (0..1000)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / 1000.0;
            let s: f64 = (0..3)
                .map(|k| (theta - k as f64 * third).cos().powi(4))
                .sum();
            (s - 9.0 / 8.0).abs()
        })
        .fold(0.0, f64::max);
    let oracle_ok = oracle_err < 1e-14;
    let v = verify_isometry(
        &cubature_embedding_2_4_3(),
        CUBATURE_SAMPLES,
        0,
        CUBATURE_TOL,
    )
    .unwrap();
    outcome(
        oracle_ok && v.pass,
        format!(
            "oracle max error {oracle_err:.2e}, map residual {:.2e} over {} probes (tol {CUBATURE_TOL:.0e})",
            v.max_relative_residual, v.samples_checked
        ),
    )
}

fn criterion_trace_formula() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut worst_case = String::new();
    let mut failures = 0;
    for i in 0..50u64 {
        let dim = 2 + (i as usize % 5);
        let a = random_hermitian(dim, 1000 + 2 * i);
        let b = random_hermitian(dim, 1001 + 2 * i);
        for p in [2.0, 2.5, 3.0, 4.0] {
            let exact = second_derivative_schatten(&a, &b, p).unwrap();
            let fd = fd_second_derivative(&a, &b, PExponent::Finite(p), TRACE_FD_STEP).unwrap();
            let scaled = (exact - fd).abs() / (1.0 + exact.abs());
            if scaled > worst {
                worst = scaled;
                worst_case = format!("pair {i}, dim {dim}, p {p}");
            }
            if scaled > TRACE_TOL {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && within(elapsed, 30.0),
        format!(
            "200 comparisons, worst |d2 - fd|/(1+|d2|) = {worst:.2e} at {worst_case} (tol {TRACE_TOL:.0e}), {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_doi() -> Outcome {
    let start = Instant::now();
    let symbols = [
        ("x^2", SymbolFunction::polynomial(&[0.0, 0.0, 1.0])),
        ("x^3", SymbolFunction::polynomial(&[0.0, 0.0, 0.0, 1.0])),
        (
            "x^4",
            SymbolFunction::polynomial(&[0.0, 0.0, 0.0, 0.0, 1.0]),
        ),
        ("|x|^2.5", SymbolFunction::abs_pow(2.5).unwrap()),
    ];
    let mut worst = 0.0_f64;
    for (name, f) in &symbols {
        for i in 0..100u64 {
            let dim = 2 + (i as usize % 5);
            let a = random_hermitian(dim, 5000 + 2 * i);
            let b = random_hermitian(dim, 5001 + 2 * i);
            let lhs = function_calculus(&a, f)
                .unwrap()
                .sub(&function_calculus(&b, f).unwrap())
                .unwrap();
            let problem = MoiProblem::new(
                vec![a.clone(), b.clone()],
                vec![a.sub(&b).unwrap()],
                f.clone(),
            )
            .unwrap();
            let rhs = moi_apply(&problem, DEFAULT_GROUP_TOL).unwrap();
            let rel = lhs.sub(&rhs).unwrap().frobenius_norm() / lhs.frobenius_norm();
            if rel > worst {
                worst = rel;
            }
            if rel.is_nan() || rel > DOI_TOL {
                return outcome(false, format!("{name}, pair {i}: relative error {rel:.2e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        within(elapsed, 10.0),
        format!(
            "4 symbols x 100 pairs, worst relative error {worst:.2e} (tol {DOI_TOL:.0e}), {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

/// Binomial coefficients read off a Pascal triangle built by addition only.
fn pascal(n: u64, k: u64) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for j in 1..row.len() {
            next[j] = row[j - 1] + row[j];
        }
        row = next;
    }
    row.get(k as usize).copied().unwrap_or(0)
}

fn lambda_oracle(m: u64, p: u64, alg: DivisionAlgebra) -> u128 {
    let h = p / 2;
    match alg {
        DivisionAlgebra::Real => pascal(m + p - 1, m - 1),
        DivisionAlgebra::Complex => pascal(m + h - 1, m - 1).pow(2),
        DivisionAlgebra::Quaternion => {
            pascal(2 * m + h - 2, 2 * m - 2) * pascal(2 * m + h - 1, 2 * m - 2)
                / (2 * m as u128 - 1)
        }
    }
}

fn criterion_lambda() -> Outcome {
    let table = [
        (2, 2, DivisionAlgebra::Real, 3u128),
        (2, 2, DivisionAlgebra::Complex, 4),
        (2, 4, DivisionAlgebra::Complex, 9),
        (2, 2, DivisionAlgebra::Quaternion, 6),
    ];
    let mut ok = true;
    let mut cells = Vec::new();
    for (m, p, alg, want) in table {
        let oracle = lambda_oracle(m, p, alg);
        let got = lambda_bound(m, p, alg).unwrap();
        ok &= oracle == want && got == want;
        cells.push(format!("({m},{p},{alg:?})={got}"));
    }
    // Wider sweep against the oracle, beyond the reference table.
    for m in 2..8 {
        for p in (2..20).step_by(2) {
            for alg in [
                DivisionAlgebra::Real,
                DivisionAlgebra::Complex,
                DivisionAlgebra::Quaternion,
            ] {
                ok &= lambda_bound(m, p, alg).unwrap() == lambda_oracle(m, p, alg);
            }
        }
    }
    outcome(
        ok,
        format!("{} and 162-cell sweep vs Pascal oracle", cells.join(" ")),
    )
}

fn candidate(q: f64, p: f64, n: usize, seed: u64) -> EmbeddingMap {
    EmbeddingMap::new(
        SpaceSpec::vector(2, PExponent::Finite(q), Field::Complex),
        SpaceSpec::matrix(n, PExponent::Finite(p)),
        vec![
            Element::Matrix(random_complex(n, n, seed)),
            Element::Matrix(random_complex(n, n, seed + 1)),
        ],
    )
    .unwrap()
}

fn criterion_obstruction() -> Outcome {
    let start = Instant::now();
    let config = CheckConfig::default();

    let mut a_ok = true;
    let mut a_worst = 0.0_f64;
    for p in [0.5, 1.0, 1.5, 2.0, 3.0, 4.0] {
        let r =
            check_candidate(&diag_embedding(2, PExponent::Finite(p)).unwrap(), &config).unwrap();
        a_worst = a_worst.max(r.max_residual);
        a_ok &= r.verdict == Verdict::Consistent && r.max_residual <= OBSTRUCTION_CONSISTENT_TOL;
    }

    let q1 = diag_embedding(2, PExponent::Finite(2.0))
        .unwrap()
        .with_exponents(PExponent::Finite(1.0), PExponent::Finite(2.0));
    let r = check_candidate(&q1, &config).unwrap();
    let at_one = r
        .residual_profile
        .iter()
        .find(|row| row.t == 1.0)
        .map_or(0.0, |row| row.residual);
    let b_ok = r.verdict == Verdict::FailsScalarIdentity && at_one >= SCALAR_FAIL_MIN;

    let mut c_ok = true;
    let mut c_count = 0;
    for (k, q) in [1.1, 1.5, 1.9].into_iter().enumerate() {
        for p in [2.0, 2.5, 3.0, 4.0] {
            let diag = diag_embedding(2, PExponent::Finite(p))
                .unwrap()
                .with_exponents(PExponent::Finite(q), PExponent::Finite(p));
            let mut maps = vec![diag];
            maps.extend((0..3).map(|s| candidate(q, p, 2 + s as usize, 100 * k as u64 + 10 * s)));
            for map in maps {
                c_count += 1;
                c_ok &=
                    check_candidate(&map, &config).unwrap().verdict == Verdict::FailsD2Divergence;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        a_ok && b_ok && c_ok && within(elapsed, 10.0),
        format!(
            "(a) {} worst residual {a_worst:.2e}; (b) {} residual at t=1 {at_one:.3}; (c) {} over {c_count} candidates; {:.2}s",
            if a_ok { "ok" } else { "FAIL" },
            if b_ok { "ok" } else { "FAIL" },
            if c_ok { "ok" } else { "FAIL" },
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_curves() -> Outcome {
    let mut worst = 0.0_f64;
    for i in 0..20u64 {
        let dim = 2 + (i as usize % 5);
        let p = [0.5, 1.0, 2.5, 3.0][i as usize % 4];
        let pair = CandidatePair::new(
            random_hermitian(dim, 9000 + 2 * i),
            random_hermitian(dim, 9001 + 2 * i),
            2.0,
            PExponent::Finite(p),
        )
        .unwrap();
        let curves = eigenvalue_curves(&pair, &DEFAULT_T_GRID).unwrap();
        for (k, &t) in DEFAULT_T_GRID.iter().enumerate() {
            let from_curves: f64 = curves.iter().map(|c| c[k].abs().powf(p)).sum();
            let direct = schatten_norm_pow(&pair.pencil(t), p);
            worst = worst.max((from_curves - direct).abs() / direct);
        }
    }
    outcome(
        worst <= CURVE_TOL,
        format!(
            "20 pairs x {} grid points, worst relative gap {worst:.2e} (tol {CURVE_TOL:.0e})",
            DEFAULT_T_GRID.len()
        ),
    )
}

fn run_cli(args: &[&str], input: &Value) -> Option<Value> {
    let mut child = Command::new(env!("CARGO_BIN_EXE_schatten"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .ok()?;
    child
        .stdin
        .take()?
        .write_all(input.to_string().as_bytes())
        .ok()?;
    let out = child.wait_with_output().ok()?;
    if !out.status.success() {
        return None;
    }
    serde_json::from_slice(&out.stdout).ok()
}

fn criterion_cli_and_runtime(suite_start: Instant) -> Outcome {
    let m = json!({"rows": 2, "cols": 2, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]});
    let x = json!({"rows": 2, "cols": 2, "re": [[0, 1], [1, 0]]});
    let runs: Vec<(&str, Value, Vec<&str>)> = vec![
        (
            "norm",
            json!({"matrix": m, "p": "inf"}),
            vec!["norm", "p", "singular_values", "seed"],
        ),
        (
            "svals",
            json!({"matrix": m}),
            vec!["singular_values", "seed"],
        ),
        (
            "divdiff",
            json!({"symbol": {"kind": "abs_pow", "p": 3}, "nodes": [1, 1, 2]}),
            vec!["value", "seed"],
        ),
        (
            "moi",
            json!({"anchors": [m, m, m], "perturbations": [x, x], "symbol": {"kind": "abs_pow", "p": 4}}),
            vec!["result", "seed"],
        ),
        (
            "d2",
            json!({"a": m, "b": x, "p": 4}),
            vec!["d2", "p", "seed"],
        ),
        (
            "embed",
            json!({"map": {"kind": "s2sp", "m": 2, "p": 3}, "x": m}),
            vec!["map", "image", "domain_norm", "codomain_norm", "seed"],
        ),
        (
            "verify",
            json!({"map": {"kind": "firstrow", "m": 2, "p": 1}, "samples": 5}),
            vec![
                "max_relative_residual",
                "pass",
                "samples_checked",
                "tol",
                "seed",
            ],
        ),
        (
            "lambda",
            json!({"m": 2, "p": 2, "field": "R"}),
            vec!["lambda", "seed"],
        ),
        (
            "obstruct",
            json!({"map": {"kind": "diag", "m": 2, "p": 2}, "q": 1}),
            vec![
                "q",
                "p",
                "tol",
                "residual_profile",
                "max_residual",
                "d2_actual",
                "d2_target",
                "verdict",
                "seed",
            ],
        ),
    ];
    let mut broken = Vec::new();
    for (cmd, input, keys) in &runs {
        match run_cli(&[cmd], input) {
            Some(v) if keys.iter().all(|k| v.get(k).is_some()) => {
                // Documents the CLI emits are accepted back as inputs.
                let replay = match *cmd {
                    "norm" => run_cli(&["norm"], &json!({"matrix": input["matrix"], "p": v["p"]})),
                    "moi" => run_cli(&["svals"], &json!({"matrix": v["result"]})),
                    "embed" => run_cli(&["embed"], &json!({"map": v["map"], "x": input["x"]})),
                    _ => Some(v.clone()),
                };
                let same = match (*cmd, &replay) {
                    ("embed", Some(r)) => r["image"] == v["image"] && r["map"] == v["map"],
                    ("norm", Some(r)) => r == &v,
                    (_, r) => r.is_some(),
                };
                if !same {
                    broken.push(format!("{cmd} (replay)"));
                }
            }
            _ => broken.push(cmd.to_string()),
        }
    }
    let elapsed = suite_start.elapsed();
    outcome(
        broken.is_empty() && within(elapsed, 120.0),
        format!(
            "{} subcommands round-tripped, broken {broken:?}; acceptance wall clock {:.2}s (limit 120s)",
            runs.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn main() {
    let suite_start = Instant::now();
    let criteria: Vec<Criterion> = vec![
        ("isometry suite", Box::new(criterion_isometries)),
        ("cubature instance", Box::new(criterion_cubature)),
        (
            "trace formula vs finite differences",
            Box::new(criterion_trace_formula),
        ),
        (
            "first-order operator integral identity",
            Box::new(criterion_doi),
        ),
        ("cubature bound table", Box::new(criterion_lambda)),
        ("obstruction pipeline", Box::new(criterion_obstruction)),
        ("eigenvalue-curve identity", Box::new(criterion_curves)),
        (
            "runtime and CLI round trip",
            Box::new(move || criterion_cli_and_runtime(suite_start)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "acceptance {}: {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
