//! Command-line front end.
//!
//! Every successful response is a JSON object carrying the computed objects
//! and at least one passing [`AxiomReport`]. Exit codes: 0 on success, 1 for
//! bad input, 2 when the library contradicts itself.

use std::ffi::OsString;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::decomp::{
    complement_formula_check, core_nilpotent, default_window, eventuating_family,
    fitting_decomposition, image_kernel_drazin, munn_power_iso_check, split_idempotent,
    splitting_iso,
};
use crate::drazin::{drazin_from_pi_witnesses, drazin_inverse, DrazinData, Route};
use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::finite::{
    endo_drazin, eventual_image, minimal_monoid_index, monoid_drazin, EndoFun, MatrixMonoid,
    MulMod, TransformationMonoid,
};
use crate::linalg::Matrix;
use crate::oracle::{
    all_matrices, brute_force_drazin, check_axioms, check_monoid_drazin, cross_route_audit,
    monoid_cycle_drazin, AxiomReport, AxiomSystem, Subject,
};
use crate::pairs::{moore_penrose, mp_via_pair_drazin, pair_drazin, OpposingPair};

#[derive(Debug, Parser)]
#[command(name = "drazin", version, about = "Exact Drazin, group and Moore-Penrose inverses")]
pub struct Cli {
    /// Print aligned text instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldKind {
    #[value(name = "Q", alias = "q")]
    Q,
    #[value(name = "Fp", alias = "fp")]
    Fp,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    #[arg(long, value_enum, default_value = "Q")]
    pub field: FieldKind,
    /// Characteristic when `--field Fp`.
    #[arg(long)]
    pub p: Option<u64>,
}

impl FieldArgs {
    pub fn descriptor(&self) -> Result<FieldDescriptor> {
        match (self.field, self.p) {
            (FieldKind::Q, None) => Ok(FieldDescriptor::Rational),
            (FieldKind::Q, Some(_)) => Err(Error::Parse("--p only applies to --field Fp".into())),
            (FieldKind::Fp, Some(p)) => FieldDescriptor::prime(p),
            (FieldKind::Fp, None) => Err(Error::Parse("--field Fp needs --p".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Rank,
    ImageKernel,
    MonoidCycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemArg {
    #[value(name = "D", alias = "d")]
    D,
    #[value(name = "G", alias = "g")]
    G,
    #[value(name = "MP", alias = "mp")]
    Mp,
    #[value(name = "DV", alias = "dv")]
    Dv,
    #[value(name = "GV", alias = "gv")]
    Gv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Drazin inverse and index of a square matrix.
    Drazin {
        #[command(flatten)]
        field: FieldArgs,
        /// JSON matrix, or `-` for stdin.
        #[arg(long)]
        matrix: String,
        #[arg(long, value_enum, default_value = "rank")]
        route: RouteArg,
        /// Also run every other available construction and compare.
        #[arg(long)]
        audit: bool,
        /// Confirm against every matrix of the same size (finite fields).
        #[arg(long)]
        brute_force: bool,
        /// Strong pi-regularity witnesses `{"y":..,"p":..,"z":..,"q":..}`
        /// with `x^{p+1} y = x^p` and `z x^{q+1} = x^q`.
        #[arg(long)]
        witnesses: Option<String>,
    },
    /// Group inverse, when the index is at most one.
    Group {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        matrix: String,
    },
    /// Moore-Penrose inverse with the transpose as dagger.
    Mp {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        matrix: String,
    },
    /// Drazin inverse of an opposing pair `f: A -> B`, `g: B -> A`.
    Pair {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        forward: String,
        #[arg(long)]
        backward: String,
    },
    /// Drazin inverse of an endofunction of a finite set.
    Endofun {
        /// `[1,2,1]`, `{"n":3,"table":[1,2,1]}`, or `-` for stdin.
        #[arg(long)]
        table: String,
        /// Confirm against every endofunction of the same set.
        #[arg(long)]
        brute_force: bool,
    },
    /// Drazin inverse in the multiplicative monoid of integers modulo n.
    Monoid {
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        element: u64,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        brute_force: bool,
    },
    /// Splitting, core-nilpotent, Fitting and eventuating data of a matrix.
    Decompose {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        matrix: String,
        /// Eventuating family window; defaults to index + 2.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Check a claimed inverse without computing one.
    Verify {
        #[arg(long, value_enum, default_value = "D")]
        system: SystemArg,
        #[command(flatten)]
        field: FieldArgs,
        /// The endomorphism, or the forward map of a pair.
        #[arg(long)]
        matrix: String,
        /// Backward map, for pair systems.
        #[arg(long)]
        backward: Option<String>,
        /// Claimed inverse; for pair systems an object with `g_over_f` and
        /// `f_over_g`.
        #[arg(long)]
        claimed: String,
    },
}

/// What a single invocation produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and executes the request.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut input = Input { stdin, used: false };
    match execute(&cli.command, &mut input) {
        Ok(Response { body, code }) => {
            let stdout = if cli.pretty {
                render_pretty(&body)
            } else {
                format!("{body}\n")
            };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(e) => {
            let code = if matches!(e, Error::InternalInconsistency(_)) { 2 } else { 1 };
            Outcome {
                code,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
    }
}

struct Input<'a> {
    stdin: &'a mut dyn Read,
    used: bool,
}

impl Input<'_> {
    fn text(&mut self, arg: &str) -> Result<String> {
        if arg != "-" {
            return Ok(arg.to_string());
        }
        if self.used {
            return Err(Error::Parse("only one argument can read stdin".into()));
        }
        self.used = true;
        let mut buf = String::new();
        self.stdin
            .read_to_string(&mut buf)
            .map_err(|e| Error::Parse(format!("reading stdin: {e}")))?;
        Ok(buf)
    }

    fn json(&mut self, arg: &str) -> Result<Value> {
        let text = self.text(arg)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))
    }

    fn matrix(&mut self, field: FieldDescriptor, arg: &str) -> Result<Matrix> {
        Matrix::from_json(field, &self.json(arg)?)
    }
}

struct Response {
    body: Value,
    code: i32,
}

impl Response {
    fn ok(body: Value) -> Self {
        Response { body, code: 0 }
    }
}

/// Fails with an internal inconsistency unless every report passed.
fn certified(reports: &[AxiomReport]) -> Result<Value> {
    if let Some(bad) = reports.iter().find(|r| !r.passed) {
        return Err(Error::InternalInconsistency(format!(
            "computed answer fails {:?}",
            bad.failed_axioms
        )));
    }
    Ok(serde_json::to_value(reports).expect("reports serialize"))
}

fn drazin_report(x: &Matrix, d: &DrazinData) -> Result<AxiomReport> {
    let r = check_axioms(AxiomSystem::D, Subject::Endo { x, xd: &d.inverse })?;
    if r.witnessed_index != Some(d.index) {
        return Err(Error::InternalInconsistency(format!(
            "reported index {} but the axioms witness {:?}",
            d.index, r.witnessed_index
        )));
    }
    Ok(r)
}

fn object(command: &str, field: Option<FieldDescriptor>, fields: Value) -> Value {
    let mut map = Map::new();
    map.insert("command".into(), json!(command));
    if let Some(field) = field {
        map.insert("field".into(), serde_json::to_value(field).expect("descriptor"));
    }
    if let Value::Object(rest) = fields {
        map.extend(rest);
    }
    Value::Object(map)
}

fn execute(command: &Command, input: &mut Input<'_>) -> Result<Response> {
    match command {
        Command::Drazin { field, matrix, route, audit, brute_force, witnesses } => {
            let field = field.descriptor()?;
            let x = input.matrix(field, matrix)?;
            let d = match route {
                RouteArg::Rank => drazin_inverse(&x)?,
                RouteArg::ImageKernel => image_kernel_drazin(&x)?,
                RouteArg::MonoidCycle => {
                    let (inv, k) = monoid_cycle_drazin(&x)?.ok_or_else(|| {
                        Error::Parse("the monoid-cycle route needs a finite field".into())
                    })?;
                    DrazinData::new(&x, inv, k, Route::MonoidCycle)
                }
            };
            let axioms = certified(&[drazin_report(&x, &d)?])?;
            let mut body = object("drazin", Some(field), d.to_json());
            body["axioms"] = axioms;
            if *audit {
                let report = cross_route_audit(&x)?;
                if !report.all_agree() {
                    return Err(Error::InternalInconsistency(format!(
                        "constructions disagree: {}",
                        report.to_json()
                    )));
                }
                body["audit"] = report.to_json();
            }
            if *brute_force {
                let monoid = MatrixMonoid { field, size: x.rows() };
                let found = brute_force_drazin(&monoid, &x, all_matrices(field, x.rows(), x.rows())?, x.rows())?;
                if found.as_ref() != Some(&d.inverse) {
                    return Err(Error::InternalInconsistency("exhaustive search disagrees".into()));
                }
                body["brute_force"] = json!("agrees");
            }
            if let Some(w) = witnesses {
                let w = input.json(w)?;
                let get = |key: &str| {
                    w.get(key).ok_or_else(|| Error::Parse(format!("witnesses lack {key:?}")))
                };
                let power = |key: &str| -> Result<usize> {
                    get(key)?
                        .as_u64()
                        .and_then(|v| usize::try_from(v).ok())
                        .ok_or_else(|| Error::Parse(format!("{key:?} must be a natural number")))
                };
                let y = Matrix::from_json(field, get("y")?)?;
                let z = Matrix::from_json(field, get("z")?)?;
                let from = drazin_from_pi_witnesses(&x, &y, power("p")?, &z, power("q")?)?;
                if from != d.inverse {
                    return Err(Error::InternalInconsistency("witness construction disagrees".into()));
                }
                body["from_witnesses"] = from.to_json();
            }
            Ok(Response::ok(body))
        }
        Command::Group { field, matrix } => {
            let field = field.descriptor()?;
            let x = input.matrix(field, matrix)?;
            let d = drazin_inverse(&x)?;
            let mut reports = vec![drazin_report(&x, &d)?];
            let exists = d.index <= 1;
            if exists {
                reports.push(check_axioms(AxiomSystem::G, Subject::Endo { x: &x, xd: &d.inverse })?);
            }
            let body = object(
                "group",
                Some(field),
                json!({
                    "exists": exists,
                    "index": d.index,
                    "inverse": exists.then(|| d.inverse.to_json()),
                    "axioms": certified(&reports)?,
                }),
            );
            Ok(Response::ok(body))
        }
        Command::Mp { field, matrix } => {
            let field = field.descriptor()?;
            let f = input.matrix(field, matrix)?;
            let direct = moore_penrose(&f)?;
            let via_pair = mp_via_pair_drazin(&f)?;
            if direct != via_pair {
                return Err(Error::InternalInconsistency(
                    "Moore-Penrose routes disagree".into(),
                ));
            }
            let pair = OpposingPair::new(f.clone(), f.transpose())?;
            let pd = pair_drazin(&pair)?;
            let mut reports = vec![check_axioms(
                AxiomSystem::DV,
                Subject::Pair { pair: &pair, g_over_f: &pd.g_over_f, f_over_g: &pd.f_over_g },
            )?];
            if let Some(pseudo) = &direct.pseudo {
                reports.push(check_axioms(AxiomSystem::MP, Subject::MoorePenrose { f: &f, pseudo })?);
            }
            let mut body = object("mp", Some(field), direct.to_json());
            body["pair_index"] = json!(pd.index);
            body["axioms"] = certified(&reports)?;
            Ok(Response::ok(body))
        }
        Command::Pair { field, forward, backward } => {
            let field = field.descriptor()?;
            let f = input.matrix(field, forward)?;
            let g = input.matrix(field, backward)?;
            let pair = OpposingPair::new(f, g)?;
            let d = pair_drazin(&pair)?;
            let subject = Subject::Pair { pair: &pair, g_over_f: &d.g_over_f, f_over_g: &d.f_over_g };
            let mut reports = vec![check_axioms(AxiomSystem::DV, subject)?];
            if d.index <= 1 {
                reports.push(check_axioms(AxiomSystem::GV, subject)?);
            }
            let mut body = object("pair", Some(field), d.to_json());
            body["group"] = json!(d.index <= 1);
            body["axioms"] = certified(&reports)?;
            Ok(Response::ok(body))
        }
        Command::Endofun { table, brute_force } => {
            let f = parse_endofun(&input.json(table)?)?;
            let (fd, k) = endo_drazin(&f);
            let (stable, _) = eventual_image(&f);
            let monoid = TransformationMonoid(f.size());
            let report = check_monoid_drazin(&monoid, &f, &fd, f.size());
            if report.witnessed_index != Some(k) {
                return Err(Error::InternalInconsistency("endofunction index mismatch".into()));
            }
            let mut body = json!({
                "command": "endofun",
                "function": f,
                "drazin": fd,
                "index": k,
                "eventual_image": stable,
                "axioms": certified(&[report])?,
            });
            if *brute_force {
                let found = brute_force_drazin(&monoid, &f, EndoFun::all(f.size()), f.size())?;
                if found.as_ref() != Some(&fd) {
                    return Err(Error::InternalInconsistency(
                        "exhaustive search disagrees".into(),
                    ));
                }
                body["brute_force"] = json!("agrees");
            }
            Ok(Response::ok(body))
        }
        Command::Monoid { modulus, element, max_steps, brute_force } => {
            if *modulus == 0 {
                return Err(Error::Parse("modulus must be positive".into()));
            }
            let monoid = MulMod(*modulus);
            let x = element % modulus;
            let steps = max_steps.unwrap_or(usize::try_from(*modulus).unwrap_or(usize::MAX));
            let r = monoid_drazin(&monoid, &x, steps)?;
            let k = minimal_monoid_index(&monoid, &x, &r.inverse, r.index_bound);
            let report = check_monoid_drazin(&monoid, &x, &r.inverse, r.index_bound);
            if report.witnessed_index != Some(k) {
                return Err(Error::InternalInconsistency("monoid index mismatch".into()));
            }
            let mut body = json!({
                "command": "monoid",
                "modulus": modulus,
                "element": x,
                "drazin": r.inverse,
                "index": k,
                "index_bound": r.index_bound,
                "tail": r.tail,
                "period": r.period,
                "axioms": certified(&[report])?,
            });
            if *brute_force {
                let found = brute_force_drazin(&monoid, &x, 0..*modulus, r.index_bound)?;
                if found != Some(r.inverse) {
                    return Err(Error::InternalInconsistency(
                        "exhaustive search disagrees".into(),
                    ));
                }
                body["brute_force"] = json!("agrees");
            }
            Ok(Response::ok(body))
        }
        Command::Decompose { field, matrix, window } => {
            let field = field.descriptor()?;
            let x = input.matrix(field, matrix)?;
            let d = drazin_inverse(&x)?;
            let split = split_idempotent(&d.idempotent)?;
            let alpha = splitting_iso(&x, &d)?;
            let alpha_inverse = &(&split.retraction * &d.inverse) * &split.section;
            let cn = core_nilpotent(&x, &d)?;
            let fitting = fitting_decomposition(&x, &d)?;
            let family = eventuating_family(&x, &d, window.unwrap_or_else(|| default_window(&d)))?;
            let complement = complement_formula_check(&x, &d)?;
            let munn = munn_power_iso_check(&x, &d)?;
            if !complement || !munn {
                return Err(Error::InternalInconsistency(
                    "complement formula or power isomorphism check failed".into(),
                ));
            }
            let reports = [
                drazin_report(&x, &d)?,
                check_axioms(
                    AxiomSystem::CND,
                    Subject::CoreNilpotent {
                        x: &x,
                        core: &cn.core,
                        nilpotent: &cn.nilpotent_part,
                        nilpotent_index: cn.nilpotent_index,
                    },
                )?,
                check_axioms(AxiomSystem::EV, Subject::Eventuating { x: &x, family: &family })?,
            ];
            let body = object(
                "decompose",
                Some(field),
                json!({
                    "drazin": d.to_json(),
                    "splitting": split.to_json(),
                    "splitting_iso": alpha.to_json(),
                    "splitting_iso_inverse": alpha_inverse.to_json(),
                    "core_nilpotent": cn.to_json(),
                    "fitting": fitting.to_json(),
                    "eventuating": family.to_json(),
                    "complement_formula": complement,
                    "power_iso": munn,
                    "axioms": certified(&reports)?,
                }),
            );
            Ok(Response::ok(body))
        }
        Command::Verify { system, field, matrix, backward, claimed } => {
            let field = field.descriptor()?;
            let x = input.matrix(field, matrix)?;
            let report = match system {
                SystemArg::D | SystemArg::G => {
                    let xd = input.matrix(field, claimed)?;
                    let sys = if *system == SystemArg::D { AxiomSystem::D } else { AxiomSystem::G };
                    check_axioms(sys, Subject::Endo { x: &x, xd: &xd })?
                }
                SystemArg::Mp => {
                    let pseudo = input.matrix(field, claimed)?;
                    check_axioms(AxiomSystem::MP, Subject::MoorePenrose { f: &x, pseudo: &pseudo })?
                }
                SystemArg::Dv | SystemArg::Gv => {
                    let g = backward
                        .as_ref()
                        .ok_or_else(|| Error::Parse("pair systems need --backward".into()))?;
                    let g = input.matrix(field, g)?;
                    let pair = OpposingPair::new(x.clone(), g)?;
                    let claim = input.json(claimed)?;
                    let part = |key: &str| {
                        claim
                            .get(key)
                            .ok_or_else(|| Error::Parse(format!("claimed pair lacks {key:?}")))
                            .and_then(|v| Matrix::from_json(field, v))
                    };
                    let (g_over_f, f_over_g) = (part("g_over_f")?, part("f_over_g")?);
                    let sys = if *system == SystemArg::Dv { AxiomSystem::DV } else { AxiomSystem::GV };
                    check_axioms(sys, Subject::Pair { pair: &pair, g_over_f: &g_over_f, f_over_g: &f_over_g })?
                }
            };
            let code = if report.passed { 0 } else { 1 };
            let body = object(
                "verify",
                Some(field),
                json!({ "axioms": [serde_json::to_value(&report).expect("report serializes")] }),
            );
            Ok(Response { body, code })
        }
    }
}

/// Accepts a bare table or the `{"n":..,"table":..}` object.
pub fn parse_endofun(value: &Value) -> Result<EndoFun> {
    match value {
        Value::Array(_) => {
            let table: Vec<usize> = serde_json::from_value(value.clone())
                .map_err(|e| Error::Parse(format!("endofunction table: {e}")))?;
            EndoFun::new(table)
        }
        _ => serde_json::from_value(value.clone())
            .map_err(|e| Error::Parse(format!("endofunction: {e}"))),
    }
}

fn is_matrix(map: &Map<String, Value>) -> bool {
    map.len() == 3 && ["rows", "cols", "entries"].iter().all(|k| map.contains_key(*k))
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.strip_suffix("/1").unwrap_or(s).to_string(),
        other => other.to_string(),
    }
}

fn render_matrix(map: &Map<String, Value>, indent: usize, out: &mut String) {
    let rows: Vec<Vec<String>> = map["entries"]
        .as_array()
        .map(|rows| {
            rows.iter()
                .map(|r| r.as_array().map(|r| r.iter().map(cell).collect()).unwrap_or_default())
                .collect()
        })
        .unwrap_or_default();
    let pad = " ".repeat(indent);
    if rows.is_empty() || rows[0].is_empty() {
        out.push_str(&format!("{pad}[{}x{} empty]\n", map["rows"], map["cols"]));
        return;
    }
    let width = rows.iter().flatten().map(String::len).max().unwrap_or(0);
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&format!("{pad}[{}]\n", cells.join(" ")));
    }
}

fn render(value: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (key, v) in map {
                match v {
                    Value::Object(inner) if is_matrix(inner) => {
                        out.push_str(&format!("{pad}{key}:\n"));
                        render_matrix(inner, indent + 2, out);
                    }
                    Value::Object(_) | Value::Array(_) if !is_flat(v) => {
                        out.push_str(&format!("{pad}{key}:\n"));
                        render(v, indent + 2, out);
                    }
                    _ => out.push_str(&format!("{pad}{key}: {}\n", cell(v))),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(inner) if is_matrix(inner) => render_matrix(inner, indent, out),
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        render(item, indent + 2, out);
                    }
                    _ => out.push_str(&format!("{pad}- {}\n", cell(item))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", cell(other))),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| !i.is_object() && !i.is_array()),
        Value::Object(_) => false,
        _ => true,
    }
}

/// Human-readable rendering with matrices laid out as aligned rows.
pub fn render_pretty(value: &Value) -> String {
    let mut out = String::new();
    render(value, 0, &mut out);
    out
}
