//! Acceptance gate. Runs each criterion at full scale and prints one
//! PASS/FAIL line per criterion; exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use exact_drazin::decomp::{
    complement_formula_check, core_nilpotent, default_window, eventuating_family,
    munn_power_iso_check,
};
use exact_drazin::drazin::{drazin_inverse, rank_chain};
use exact_drazin::finite::{endo_drazin, EndoFun, MatrixMonoid, TransformationMonoid};
use exact_drazin::oracle::{
    all_matrices, brute_force_drazin, check_axioms, check_monoid_drazin, cross_route_audit,
    AxiomSystem, Subject,
};
use exact_drazin::pairs::{
    check_binary_idempotent, cline, moore_penrose, mp_drazin_check, mp_via_pair_drazin,
    pair_drazin, OpposingPair,
};
use exact_drazin::{FieldDescriptor, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

type Check = Result<String, String>;

const Q: FieldDescriptor = FieldDescriptor::Rational;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn random_matrix(rng: &mut ChaCha8Rng, field: FieldDescriptor, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(field, rows, cols, |_, _| match field.order() {
        Some(p) => field.int(rng.gen_range(0..p as i64)),
        None => field.int(rng.gen_range(-5..=5)),
    })
}

/// Random matrix of random rank, so that singular cases are common.
fn random_low_rank(rng: &mut ChaCha8Rng, field: FieldDescriptor, rows: usize, cols: usize) -> Matrix {
    let r = rng.gen_range(0..=rows.min(cols));
    let a = random_matrix(rng, field, rows, r);
    let b = random_matrix(rng, field, r, cols);
    &a * &b
}

fn random_invertible(rng: &mut ChaCha8Rng, field: FieldDescriptor, n: usize) -> Matrix {
    loop {
        let p = random_matrix(rng, field, n, n);
        if p.is_invertible() {
            return p;
        }
    }
}

fn least_stable_rank(x: &Matrix) -> Result<usize, String> {
    let chain = rank_chain(x).map_err(|e| e.to_string())?;
    Ok(chain.windows(2).position(|w| w[0] == w[1]).unwrap_or(0))
}

fn err(e: exact_drazin::Error) -> String {
    e.to_string()
}

// Criterion 1
fn f2_sweep(cases: &mut Vec<Matrix>) -> Check {
    let f2 = FieldDescriptor::Prime(2);
    let mut count = 0;
    for n in [2, 3] {
        let monoid = MatrixMonoid { field: f2, size: n };
        for x in all_matrices(f2, n, n).map_err(err)? {
            let d = drazin_inverse(&x).map_err(err)?;
            let found = brute_force_drazin(&monoid, &x, all_matrices(f2, n, n).map_err(err)?, n)
                .map_err(err)?;
            ensure!(found.as_ref() == Some(&d.inverse), "brute force disagrees on\n{x}");
            ensure!(d.index == least_stable_rank(&x)?, "index mismatch on\n{x}");
            let report = check_monoid_drazin(&monoid, &x, &d.inverse, n);
            ensure!(report.witnessed_index == Some(d.index), "witnessed index mismatch on\n{x}");
            cases.push(x);
            count += 1;
        }
    }
    Ok(format!("{count} matrices"))
}

// Criterion 2
fn endofunction_sweep() -> Check {
    let mut count = 0;
    for n in 0..=4 {
        let monoid = TransformationMonoid(n);
        for f in EndoFun::all(n) {
            let (fd, k) = endo_drazin(&f);
            let found = brute_force_drazin(&monoid, &f, EndoFun::all(n), n).map_err(err)?;
            ensure!(found.as_ref() == Some(&fd), "brute force disagrees on {:?}", f.table());
            let report = check_monoid_drazin(&monoid, &f, &fd, n);
            ensure!(report.witnessed_index == Some(k), "index mismatch on {:?}", f.table());
            count += 1;
        }
    }
    Ok(format!("{count} endofunctions"))
}

// Criterion 3
fn cross_routes(rng: &mut ChaCha8Rng, cases: &mut Vec<Matrix>) -> Check {
    let f5 = FieldDescriptor::Prime(5);
    let mut singular = 0;
    let mut count = 0;
    for (field, sizes, per) in [(f5, 2..=6, 1000), (Q, 2..=5, 500)] {
        for n in sizes {
            for i in 0..per {
                let x = if i % 2 == 0 {
                    random_matrix(rng, field, n, n)
                } else {
                    random_low_rank(rng, field, n, n)
                };
                let audit = cross_route_audit(&x).map_err(err)?;
                let expected = if field.is_finite() { 3 } else { 2 };
                ensure!(audit.routes.len() == expected, "missing route on\n{x}");
                ensure!(audit.all_agree(), "routes disagree on\n{x}\n{}", audit.to_json());
                if audit.routes[0].2 > 0 {
                    singular += 1;
                }
                cases.push(x);
                count += 1;
            }
        }
    }
    Ok(format!("{count} matrices, {singular} of positive index"))
}

fn laws(x: &Matrix, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let d = drazin_inverse(x).map_err(err)?;
    let (xd, k) = (&d.inverse, d.index);
    let n = x.rows();
    for m in 0..=k + 3 {
        ensure!(&x.pow(m) * &xd.pow(m + 1) == *xd, "x^m (x^D)^(m+1) on\n{x}");
        ensure!(&xd.pow(m + 1) * &x.pow(m) == *xd, "(x^D)^(m+1) x^m on\n{x}");
        if m >= k {
            let xm = x.pow(m);
            ensure!(&x.pow(m + 1) * xd == xm && xd * &x.pow(m + 1) == xm, "x^(m+1) x^D on\n{x}");
            for j in 0..=3 {
                let shifted = x.pow(m + j);
                let back = xd.pow(j);
                ensure!(&shifted * &back == xm && &back * &shifted == xm, "x^(m+j) (x^D)^j on\n{x}");
            }
        }
    }
    for m in 0..=4 {
        let dm = drazin_inverse(&x.pow(m)).map_err(err)?;
        ensure!(dm.inverse == xd.pow(m) && dm.index <= k, "power {m} on\n{x}");
    }
    let dt = drazin_inverse(&x.transpose()).map_err(err)?;
    ensure!(dt.inverse == xd.transpose() && dt.index == k, "transpose on\n{x}");
    for _ in 0..20 {
        let p = random_invertible(rng, x.field(), n);
        let pinv = p.inverse().map_err(err)?;
        let conj = drazin_inverse(&(&(&p * x) * &pinv)).map_err(err)?;
        ensure!(conj.inverse == &(&p * xd) * &pinv && conj.index == k, "conjugation on\n{x}");
    }
    let cn = core_nilpotent(x, &d).map_err(err)?;
    let report = check_axioms(
        AxiomSystem::CND,
        Subject::CoreNilpotent {
            x,
            core: &cn.core,
            nilpotent: &cn.nilpotent_part,
            nilpotent_index: cn.nilpotent_index,
        },
    )
    .map_err(err)?;
    ensure!(report.passed, "core-nilpotent fails {:?} on\n{x}", report.failed_axioms);
    ensure!(k == 0 || cn.nilpotent_index == k, "nilpotent index on\n{x}");
    let one = x.field().one();
    for i in 0..n {
        for j in 0..n {
            let mut c = cn.core.clone();
            let mut nil = cn.nilpotent_part.clone();
            c.set(i, j, &c[(i, j)] + &one);
            nil.set(i, j, &nil[(i, j)] - &one);
            let r = check_axioms(
                AxiomSystem::CND,
                Subject::CoreNilpotent { x, core: &c, nilpotent: &nil, nilpotent_index: n },
            )
            .map_err(err)?;
            ensure!(!r.passed, "perturbed decomposition ({i},{j}) accepted on\n{x}");
        }
    }
    ensure!(complement_formula_check(x, &d).map_err(err)?, "complement formula on\n{x}");
    ensure!(munn_power_iso_check(x, &d).map_err(err)?, "power isomorphism on\n{x}");
    let family = eventuating_family(x, &d, default_window(&d)).map_err(err)?;
    let report = check_axioms(AxiomSystem::EV, Subject::Eventuating { x, family: &family }).map_err(err)?;
    ensure!(report.passed, "eventuating family fails {:?} on\n{x}", report.failed_axioms);
    Ok(())
}

// Criterion 4
fn law_suite(cases: &[Matrix], rng: &mut ChaCha8Rng) -> Check {
    for x in cases {
        laws(x, rng)?;
    }
    Ok(format!("{} matrices", cases.len()))
}

fn pair_laws(f: &Matrix, g: &Matrix) -> Result<(), String> {
    let ctx = || format!("f =\n{f}\ng =\n{g}");
    let (gf_d, fg_d) = cline(f, g).map_err(err)?;
    let fg = f * g;
    let gf = g * f;
    for (x, xd) in [(&gf, &gf_d), (&fg, &fg_d)] {
        let r = check_axioms(AxiomSystem::D, Subject::Endo { x, xd }).map_err(err)?;
        ensure!(r.passed, "Cline output fails {:?} for\n{}", r.failed_axioms, ctx());
    }
    let pair = OpposingPair::new(f.clone(), g.clone()).map_err(err)?;
    let d = pair_drazin(&pair).map_err(err)?;
    let r = check_axioms(
        AxiomSystem::DV,
        Subject::Pair { pair: &pair, g_over_f: &d.g_over_f, f_over_g: &d.f_over_g },
    )
    .map_err(err)?;
    ensure!(r.passed, "pair inverse fails {:?} for\n{}", r.failed_axioms, ctx());
    ensure!(d.index == d.source_index.max(d.target_index), "pair index for\n{}", ctx());
    let swapped = pair_drazin(&pair.swap()).map_err(err)?;
    ensure!(
        swapped.g_over_f == d.f_over_g && swapped.f_over_g == d.g_over_f && swapped.index == d.index,
        "swap law for\n{}",
        ctx()
    );
    let on_source = &d.f_over_g * f;
    ensure!(on_source == g * &d.g_over_f && on_source == d.idem_fg, "source idempotent for\n{}", ctx());
    ensure!(on_source == &gf_d * &gf && on_source.is_idempotent(), "source idempotent for\n{}", ctx());
    let on_target = f * &d.f_over_g;
    ensure!(on_target == &d.g_over_f * g && on_target == d.idem_gf, "target idempotent for\n{}", ctx());
    ensure!(on_target == &fg_d * &fg && on_target.is_idempotent(), "target idempotent for\n{}", ctx());
    Ok(())
}

// Criterion 5
fn pair_suite(rng: &mut ChaCha8Rng) -> Check {
    let mut count = 0;
    for field in [FieldDescriptor::Prime(7), Q] {
        for i in 0..500 {
            let (n, m) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
            let (f, g) = if i % 2 == 0 {
                (random_matrix(rng, field, n, m), random_matrix(rng, field, m, n))
            } else {
                (random_low_rank(rng, field, n, m), random_low_rank(rng, field, m, n))
            };
            pair_laws(&f, &g)?;
            count += 1;
        }
    }
    Ok(format!("{count} pairs"))
}

fn mp_laws(f: &Matrix, square: &mut usize) -> Result<bool, String> {
    let direct = moore_penrose(f).map_err(err)?;
    let via = mp_via_pair_drazin(f).map_err(err)?;
    ensure!(direct == via, "routes disagree on\n{f}");
    let pair = OpposingPair::new(f.clone(), f.transpose()).map_err(err)?;
    let d = pair_drazin(&pair).map_err(err)?;
    let characterised = d.index <= 1 && &(f * &d.f_over_g) * f == *f;
    ensure!(characterised == direct.exists, "existence characterisation fails on\n{f}");
    if let Some(pseudo) = &direct.pseudo {
        let r = check_axioms(AxiomSystem::MP, Subject::MoorePenrose { f, pseudo }).map_err(err)?;
        ensure!(r.passed, "pseudo-inverse fails {:?} on\n{f}", r.failed_axioms);
        let binary = OpposingPair::new(f.clone(), pseudo.clone()).map_err(err)?;
        ensure!(check_binary_idempotent(&binary).map_err(err)?, "(f, f+) not binary idempotent on\n{f}");
    }
    if f.is_square() {
        mp_drazin_check(f).map_err(err)?;
        *square += 1;
    }
    Ok(direct.exists)
}

// Criterion 6
fn mp_suite(rng: &mut ChaCha8Rng) -> Check {
    let mut square = 0;
    for i in 0..300 {
        let (n, m) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let f = if i % 2 == 0 { random_matrix(rng, Q, n, m) } else { random_low_rank(rng, Q, n, m) };
        ensure!(mp_laws(&f, &mut square)?, "no pseudo-inverse over Q for\n{f}");
    }
    let mut missing = Vec::new();
    for (p, constructed) in [(2u64, vec![vec![1i64], vec![1]]), (3, vec![vec![1], vec![1], vec![1]])] {
        let field = FieldDescriptor::Prime(p);
        let x = Matrix::from_ints(field, &constructed);
        ensure!(!mp_laws(&x, &mut square)?, "constructed instance over F{p} not detected");
        let mut absent = 1;
        for _ in 0..300 {
            let (n, m) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            if !mp_laws(&random_matrix(rng, field, n, m), &mut square)? {
                absent += 1;
            }
        }
        missing.push(format!("F{p}: {absent} without"));
    }
    for field in [Q, FieldDescriptor::Prime(2), FieldDescriptor::Prime(3)] {
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            mp_drazin_check(&random_low_rank(rng, field, n, n)).map_err(err)?;
            square += 1;
        }
    }
    Ok(format!("{}, {square} EP checks", missing.join(", ")))
}

fn cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_drazin"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.code() == Some(0),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let reports = v["axioms"].as_array().cloned().unwrap_or_default();
    ensure!(
        !reports.is_empty() && reports.iter().all(|r| r["passed"] == true),
        "{args:?} lacks a passing report"
    );
    Ok(v)
}

fn entries(v: &Value) -> Value {
    v["entries"].clone()
}

// Criterion 7
fn cli_spot_checks() -> Check {
    let e = "[[1,1],[0,0]]";
    let v = cli(&["drazin", "--matrix", e])?;
    ensure!(entries(&v["inverse"]) == json!([["1/1", "1/1"], ["0/1", "0/1"]]) && v["index"] == 1, "idempotent: {v}");
    let v = cli(&["group", "--matrix", e])?;
    ensure!(v["exists"] == true && entries(&v["inverse"]) == json!([["1/1", "1/1"], ["0/1", "0/1"]]), "group of idempotent: {v}");
    let v = cli(&["verify", "--system", "D", "--matrix", e, "--claimed", e])?;
    ensure!(v["axioms"][0]["witnessed_index"] == 1, "verify idempotent: {v}");
    let w = format!(r#"{{"y":{e},"p":1,"z":{e},"q":1}}"#);
    let v = cli(&["drazin", "--matrix", e, "--witnesses", &w])?;
    ensure!(v["from_witnesses"] == v["inverse"], "witnesses: {v}");

    let nil = "[[0,1],[0,0]]";
    let zero = json!([["0/1", "0/1"], ["0/1", "0/1"]]);
    let v = cli(&["drazin", "--matrix", nil])?;
    ensure!(entries(&v["inverse"]) == zero && v["index"] == 2, "nilpotent: {v}");
    let v = cli(&["decompose", "--matrix", nil])?;
    ensure!(v["core_nilpotent"]["nilpotent_index"] == v["drazin"]["index"], "nilpotent index: {v}");
    let v = cli(&["drazin", "--field", "Fp", "--p", "2", "--matrix", nil, "--brute-force"])?;
    ensure!(entries(&v["inverse"]) == json!([[0, 0], [0, 0]]) && v["brute_force"] == "agrees", "brute force: {v}");

    let v = cli(&["drazin", "--matrix", "[[2,1],[1,1]]"])?;
    ensure!(entries(&v["inverse"]) == json!([["1/1", "-1/1"], ["-1/1", "2/1"]]) && v["index"] == 0, "invertible: {v}");
    let v = cli(&["endofun", "--table", "[1,2,0]"])?;
    ensure!(v["drazin"]["table"] == json!([2, 0, 1]) && v["index"] == 0, "bijection: {v}");

    let v = cli(&["pair", "--forward", nil, "--backward", "[[1,0],[0,1]]"])?;
    ensure!(entries(&v["g_over_f"]) == zero && entries(&v["f_over_g"]) == zero, "nilpotent with identity: {v}");
    let v = cli(&["pair", "--forward", "[[2,1],[1,1]]", "--backward", "[[1,1],[0,1]]"])?;
    ensure!(
        entries(&v["f_over_g"]) == json!([["1/1", "-1/1"], ["-1/1", "2/1"]])
            && entries(&v["g_over_f"]) == json!([["1/1", "-1/1"], ["0/1", "1/1"]])
            && v["index"] == 0,
        "invertible pair: {v}"
    );
    let x = "[[1,1],[0,0]]";
    let v = cli(&["pair", "--forward", "[[0,1,0],[0,0,0],[0,0,3]]", "--backward", "[[1,0,0],[0,1,0],[0,0,1]]"])?;
    let dx = cli(&["drazin", "--matrix", "[[0,1,0],[0,0,0],[0,0,3]]"])?;
    ensure!(v["f_over_g"] == dx["inverse"] && v["g_over_f"] == dx["idempotent"], "pair with identity: {v}");
    let (f, g) = ("[[1,0],[0,0]]", "[[1,5],[0,0]]");
    let v = cli(&["pair", "--forward", f, "--backward", g])?;
    ensure!(
        entries(&v["g_over_f"]) == json!([["1/1", "0/1"], ["0/1", "0/1"]])
            && entries(&v["f_over_g"]) == json!([["1/1", "5/1"], ["0/1", "0/1"]]),
        "binary idempotent: {v}"
    );
    let claim = format!(r#"{{"g_over_f":{f},"f_over_g":{g}}}"#);
    cli(&["verify", "--system", "DV", "--matrix", f, "--backward", g, "--claimed", &claim])?;
    let mp = cli(&["mp", "--matrix", x])?;
    let pseudo = mp["pseudo"].to_string();
    let v = cli(&["pair", "--forward", x, "--backward", &pseudo])?;
    ensure!(v["g_over_f"]["entries"] == json!([["1/1", "1/1"], ["0/1", "0/1"]]) && v["f_over_g"] == mp["pseudo"], "(f, f+): {v}");
    let v = cli(&["mp", "--field", "Fp", "--p", "2", "--matrix", "[[1],[1]]"])?;
    ensure!(v["exists"] == false, "mp over F2: {v}");
    Ok("all known values reproduced".into())
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0d7a_21e5);
    let mut cases = Vec::new();
    let mut failed = false;
    let mut gate = |label: &str, limit: Option<Duration>, run: &mut dyn FnMut() -> Check| {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = limit.is_some_and(|l| elapsed > l);
        let line = match (&outcome, over) {
            (Ok(detail), false) => format!("PASS {label}: {detail} in {:.1}s", elapsed.as_secs_f64()),
            (Ok(detail), true) => format!(
                "FAIL {label}: {detail} but took {:.1}s (limit {}s)",
                elapsed.as_secs_f64(),
                limit.unwrap().as_secs()
            ),
            (Err(e), _) => format!("FAIL {label}: {e}"),
        };
        failed |= outcome.is_err() || over;
        println!("{line}");
    };
    gate("1 exhaustive F2 sweep", Some(Duration::from_secs(60)), &mut || f2_sweep(&mut cases));
    gate("2 exhaustive endofunction sweep", Some(Duration::from_secs(30)), &mut endofunction_sweep);
    let mut audit_rng = rng.clone();
    gate("3 cross-route audit", Some(Duration::from_secs(300)), &mut || cross_routes(&mut audit_rng, &mut cases));
    rng = audit_rng;
    let mut law_rng = rng.clone();
    gate("4 axiom-law suite", None, &mut || law_suite(&cases, &mut law_rng));
    gate("5 pair and Cline suite", Some(Duration::from_secs(180)), &mut || pair_suite(&mut rng));
    gate("6 Moore-Penrose suite", Some(Duration::from_secs(120)), &mut || mp_suite(&mut rng));
    gate("7 CLI spot checks", None, &mut cli_spot_checks);
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
