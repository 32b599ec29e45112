//! Requests, JSON reports, and re-checking of reports.
//!
//! A [`Request`] is what the command line collects; [`execute`] turns it
//! into a [`Report`] whose `certificate` field carries the serialized
//! evidence. [`recheck`] re-verifies that evidence from the JSON alone and
//! re-runs the request to compare results.
//!
//! Object variables are the free variables whose names start with `x`;
//! the remaining free variables of a `δ` are its parameter variables.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forking::{
    is_morley, morley_witness, no_consistent_morley_sequence, object_vars, strong_division_cert, strongly_divides,
    thorn_divides, thorn_divides_formula, thorn_forks, thorn_indep, Decision, DivideCert, ForkCert, Independence,
    MorleyWitness, SearchBudget, StrongDivision,
};
use crate::formula::{Elem, Formula, Var};
use crate::oracles::{oracle_indep_report, oracle_uth, OracleReport};
use crate::rank::{
    lascar_check, local_rank, local_rank_of_type, uth_rank, uth_star_rank, RankParams, RankTree, UthValue,
};
use crate::suites::run_suite;
use crate::theory::{enumerate_types, qe, realize_type, satisfies, solution_count, type_of, holds, SolutionCount, Theory};

/// Default cap for local ranks.
pub const DEFAULT_RANK_CAP: usize = 6;
/// Default Morley sequence length.
pub const DEFAULT_LENGTH: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Qe,
    Holds,
    Count,
    Types,
    Sdivides,
    Divides,
    Forks,
    Indep,
    Morley,
    Rank,
    Uth,
    Uthstar,
    Lascar,
    Verify,
    Recheck,
}

impl Command {
    pub const ALL: [Command; 15] = [
        Command::Qe,
        Command::Holds,
        Command::Count,
        Command::Types,
        Command::Sdivides,
        Command::Divides,
        Command::Forks,
        Command::Indep,
        Command::Morley,
        Command::Rank,
        Command::Uth,
        Command::Uthstar,
        Command::Lascar,
        Command::Verify,
        Command::Recheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Qe => "qe",
            Command::Holds => "holds",
            Command::Count => "count",
            Command::Types => "types",
            Command::Sdivides => "sdivides",
            Command::Divides => "divides",
            Command::Forks => "forks",
            Command::Indep => "indep",
            Command::Morley => "morley",
            Command::Rank => "rank",
            Command::Uth => "uth",
            Command::Uthstar => "uthstar",
            Command::Lascar => "lascar",
            Command::Verify => "verify",
            Command::Recheck => "recheck",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown command `{s}`")))
    }
}

/// The user's inputs, kept as typed so that a report can be re-run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pi: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_of: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
}

/// Search and rank bounds in force.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub budget: SearchBudget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { budget: SearchBudget::default(), cap: None, seed: None, count: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Request {
    pub command: Command,
    pub theory: Option<Theory>,
    pub inputs: Inputs,
    pub bounds: Bounds,
    /// Worker threads for suites; never changes a result.
    pub jobs: usize,
}

impl Request {
    pub fn new(command: Command, theory: Option<Theory>) -> Request {
        Request { command, theory, inputs: Inputs::default(), bounds: Bounds::default(), jobs: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Decided,
    Unknown,
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Decided => 0,
            Status::Unknown => 2,
            Status::Failed => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Command,
    pub theory: Option<Theory>,
    pub inputs: Inputs,
    pub status: Status,
    pub result: Value,
    pub certificate: Option<Value>,
    pub bounds: Bounds,
    pub oracle: Option<OracleReport>,
    pub wall_time_ms: u64,
}

impl Report {
    /// The report as JSON with the timing field zeroed, for comparisons.
    pub fn without_timing(&self) -> Report {
        Report { wall_time_ms: 0, ..self.clone() }
    }
}

struct Outcome {
    status: Status,
    result: Value,
    certificate: Option<Value>,
    oracle: Option<OracleReport>,
}

impl Outcome {
    fn decided(result: Value) -> Outcome {
        Outcome { status: Status::Decided, result, certificate: None, oracle: None }
    }

    fn with_cert(mut self, cert: impl Serialize) -> Result<Outcome> {
        self.certificate = Some(to_value(cert)?);
        Ok(self)
    }
}

fn to_value(v: impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Invalid(format!("serialization: {e}")))
}

/// Runs a request. Errors in the inputs or in the computation are
/// returned; undecided searches give a report with status `unknown`.
pub fn execute(req: &Request) -> Result<Report> {
    req.bounds.budget.validate()?;
    let start = Instant::now();
    let out = match req.command {
        Command::Verify => verify(req)?,
        Command::Recheck => return Err(Error::Invalid("recheck takes a report; use `recheck`".into())),
        _ => {
            let theory = req.theory.ok_or_else(|| Error::Invalid("--theory is required".into()))?;
            run(theory, req)?
        }
    };
    Ok(Report {
        command: req.command,
        theory: req.theory,
        inputs: req.inputs.clone(),
        status: out.status,
        result: out.result,
        certificate: out.certificate,
        bounds: req.bounds.clone(),
        oracle: out.oracle,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

fn required<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::Invalid(format!("--{flag} is required")))
}

fn elems(theory: Theory, s: &Option<String>) -> Result<Vec<Elem>> {
    match s {
        Some(s) => theory.parse_elems(s),
        None => Ok(Vec::new()),
    }
}

fn parse_vars(s: &str) -> Result<Vec<Var>> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(Var::parse_annotated).collect()
}

fn is_object(v: &Var) -> bool {
    v.name.starts_with('x')
}

/// The declared variables, or else the object variables of `f`.
fn vars_of(inputs: &Inputs, f: &Formula) -> Result<Vec<Var>> {
    match &inputs.vars {
        Some(s) => parse_vars(s),
        None => Ok(f.free_vars().into_iter().filter(is_object).collect()),
    }
}

fn formula(theory: Theory, inputs: &Inputs) -> Result<Formula> {
    let text = required(&inputs.p, "p")?;
    match &inputs.vars {
        Some(s) => theory.parse_with(text, &parse_vars(s)?),
        None => theory.parse(text),
    }
}

fn decision_status<C>(d: &Decision<C>) -> Status {
    if d.is_unknown() {
        Status::Unknown
    } else {
        Status::Decided
    }
}

fn decision_value<C>(d: &Decision<C>) -> Value {
    match d {
        Decision::Yes(_) => json!(true),
        Decision::No => json!(false),
        Decision::Unknown(_) => Value::Null,
    }
}

fn reason<C>(d: &Decision<C>) -> Option<&str> {
    match d {
        Decision::Unknown(why) => Some(why),
        _ => None,
    }
}

fn run(theory: Theory, req: &Request) -> Result<Outcome> {
    let inputs = &req.inputs;
    let budget = &req.bounds.budget;
    let base = elems(theory, &inputs.base)?;
    match req.command {
        Command::Qe => {
            let f = formula(theory, inputs)?;
            Ok(Outcome::decided(json!({ "formula": qe(theory, &f)?.to_string() })))
        }
        Command::Holds => {
            let f = formula(theory, inputs)?;
            Ok(Outcome::decided(json!({ "holds": holds(theory, &f)? })))
        }
        Command::Count => {
            let f = formula(theory, inputs)?;
            let vars = match &inputs.vars {
                Some(s) => parse_vars(s)?,
                None => f.free_vars().into_iter().collect(),
            };
            Ok(Outcome::decided(match solution_count(theory, &f, &vars)? {
                SolutionCount::Infinite => json!({ "vars": vars, "infinite": true }),
                SolutionCount::Finite(n, sols) => json!({ "vars": vars, "infinite": false, "count": n, "solutions": sols }),
            }))
        }
        Command::Types => {
            let vars = parse_vars(required(&inputs.vars, "vars")?)?;
            let types: Vec<Value> = enumerate_types(theory, &vars, &base)
                .into_iter()
                .map(|t| {
                    let r = realize_type(&t, &[]).ok();
                    json!({ "formula": t.formula, "realization": r, "algebraic": t.is_algebraic() })
                })
                .collect();
            Ok(Outcome::decided(json!({ "vars": vars, "count": types.len(), "types": types })))
        }
        Command::Sdivides => {
            let (delta, x, y) = split_delta(theory, inputs)?;
            let a = elems(theory, &inputs.a)?;
            let outcome = strongly_divides(theory, &delta, &x, &y, &a, &base, budget.k_max)?;
            let (yes, k) = outcome.as_pair();
            let label = match outcome {
                StrongDivision::Yes { .. } => "yes",
                StrongDivision::Algebraic => "algebraic",
                StrongDivision::Never => "never",
                StrongDivision::ExceedsKMax => "exceeds_k_max",
            };
            let mut out = Outcome::decided(json!({ "strongly_divides": yes, "outcome": label, "k": k }));
            if outcome == StrongDivision::ExceedsKMax {
                out.status = Status::Unknown;
            }
            if let StrongDivision::Yes { k } = outcome {
                out = out.with_cert(strong_division_cert(theory, &delta, &x, &y, &a, &base, k)?)?;
            }
            Ok(out)
        }
        Command::Divides => {
            let d = if inputs.delta.is_empty() {
                let psi = formula(theory, inputs)?;
                let x = vars_of(inputs, &psi)?;
                thorn_divides_formula(theory, &psi, &x, &base, budget)?
            } else {
                let (delta, x, y) = split_delta(theory, inputs)?;
                let a = elems(theory, &inputs.a)?;
                thorn_divides(theory, &delta, &x, &y, &a, &base, budget)?
            };
            let out = Outcome {
                status: decision_status(&d),
                result: json!({ "divides": decision_value(&d), "reason": reason(&d) }),
                certificate: None,
                oracle: None,
            };
            match d {
                Decision::Yes(cert) => out.with_cert(cert),
                _ => Ok(out),
            }
        }
        Command::Forks => {
            let phi = formula(theory, inputs)?;
            let x = vars_of(inputs, &phi)?;
            let d = thorn_forks(theory, &phi, &x, &base, budget)?;
            let out = Outcome {
                status: decision_status(&d),
                result: json!({ "forks": decision_value(&d), "reason": reason(&d) }),
                certificate: None,
                oracle: None,
            };
            match d {
                Decision::Yes(cert) => out.with_cert(cert),
                _ => Ok(out),
            }
        }
        Command::Indep => {
            let a = elems(theory, &inputs.a)?;
            let b = elems(theory, &inputs.b)?;
            let r = thorn_indep(theory, &a, &b, &base, budget)?;
            let oracle = Some(oracle_indep_report(theory, &a, &b, &base));
            let why = match &r {
                Independence::Unknown(why) => Some(why.clone()),
                _ => None,
            };
            let mut out = Outcome {
                status: if why.is_some() { Status::Unknown } else { Status::Decided },
                result: json!({ "independent": r.decided(), "reason": why }),
                certificate: None,
                oracle,
            };
            if let Independence::Dependent(cert) = r {
                out = out.with_cert(*cert)?;
            }
            Ok(out)
        }
        Command::Morley => {
            let psi = formula(theory, inputs)?;
            let x = vars_of(inputs, &psi)?;
            let length = inputs.length.unwrap_or(DEFAULT_LENGTH);
            let d = thorn_forks(theory, &psi, &x, &base, budget)?;
            match d {
                Decision::No => {
                    let w = morley_witness(theory, &psi, &x, &base, length, budget)?;
                    let out = Outcome::decided(json!({ "forks": false, "sequence_found": w.is_some() }));
                    match w {
                        Some(w) => out.with_cert(w),
                        None => Ok(out),
                    }
                }
                Decision::Yes(_) => {
                    let none = no_consistent_morley_sequence(theory, &psi, &x, &base, length, budget)?;
                    Ok(Outcome::decided(json!({ "forks": true, "no_consistent_sequence": none })))
                }
                Decision::Unknown(why) => Ok(Outcome {
                    status: Status::Unknown,
                    result: json!({ "forks": null, "reason": why }),
                    certificate: None,
                    oracle: None,
                }),
            }
        }
        Command::Rank => {
            let cap = req.bounds.cap.unwrap_or(DEFAULT_RANK_CAP);
            let (params, r) = match &inputs.type_of {
                Some(s) => {
                    let a = theory.parse_elems(s)?;
                    let t = type_of(theory, &a, &base);
                    let params = rank_params(theory, inputs, &t.vars)?;
                    let r = local_rank_of_type(&t, &params, cap)?;
                    (params, r)
                }
                None => {
                    let phi = formula(theory, inputs)?;
                    let x = vars_of(inputs, &phi)?;
                    let params = rank_params(theory, inputs, &x)?;
                    let r = local_rank(theory, &phi, &params, cap)?;
                    (params, r)
                }
            };
            Outcome::decided(json!({ "rank": r.value, "x": params.x, "y": params.y, "z": params.z })).with_cert(r.tree)
        }
        Command::Uth | Command::Uthstar => {
            let a = theory.parse_elems(required(&inputs.type_of, "type-of")?)?;
            let t = type_of(theory, &a, &base);
            let v = if req.command == Command::Uth {
                uth_rank(&t, req.bounds.cap, budget)?
            } else {
                uth_star_rank(&t, req.bounds.cap, budget)?
            };
            let o = oracle_uth(&t)?;
            let oracle = OracleReport {
                query: format!("rank of {t}"),
                verdict: o.to_string(),
                rule: if theory == Theory::Dlo { "o-minimal dimension" } else { "closed-form U-rank" }.into(),
            };
            let mut out = Outcome::decided(json!({ "rank": v.value, "type": t.formula }));
            out.oracle = Some(oracle);
            out.with_cert(v)
        }
        Command::Lascar => {
            let a = elems(theory, &inputs.a)?;
            let b = elems(theory, &inputs.b)?;
            let r = lascar_check(theory, &a, &b, &base, budget)?;
            Ok(Outcome::decided(to_value(r)?))
        }
        Command::Verify | Command::Recheck => unreachable!("handled by the caller"),
    }
}

/// `δ` from the first `--delta`, with object variables `x` and the rest `y`.
fn split_delta(theory: Theory, inputs: &Inputs) -> Result<(Formula, Vec<Var>, Vec<Var>)> {
    let text = inputs.delta.first().ok_or_else(|| Error::Invalid("--delta is required".into()))?;
    let delta = theory.parse(text)?;
    let (x, y): (Vec<Var>, Vec<Var>) = delta.free_vars().into_iter().partition(is_object);
    let x = match &inputs.vars {
        Some(s) => parse_vars(s)?,
        None => x,
    };
    let y = y.into_iter().filter(|v| !x.contains(v)).collect();
    Ok((delta, x, y))
}

fn rank_params(theory: Theory, inputs: &Inputs, x: &[Var]) -> Result<RankParams> {
    let delta: Vec<&str> = inputs.delta.iter().map(String::as_str).collect();
    let pi: Vec<&str> = inputs.pi.iter().map(String::as_str).collect();
    RankParams::parse(theory, x, &delta, &pi, inputs.k.unwrap_or(2))
}

fn verify(req: &Request) -> Result<Outcome> {
    let name = required(&req.inputs.suite, "suite")?;
    let seed = req.bounds.seed.unwrap_or(0);
    let count = req.bounds.count.unwrap_or(100);
    let r = run_suite(name, seed, count, &req.bounds.budget, req.jobs.max(1))?;
    let status = if r.failed > 0 {
        Status::Failed
    } else if r.unknown > 0 {
        Status::Unknown
    } else {
        Status::Decided
    };
    Ok(Outcome { status, result: to_value(&r)?, certificate: None, oracle: None })
}

fn from_value<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Certificate(format!("unreadable certificate: {e}")))
}

/// Re-verifies the certificate of `report` through the library checks,
/// then re-runs its request and compares results and certificates.
pub fn recheck(report: &Report) -> Result<Report> {
    let start = Instant::now();
    let checked = match &report.certificate {
        Some(cert) => {
            verify_certificate(report, cert)?;
            true
        }
        None => false,
    };
    let req = Request {
        command: report.command,
        theory: report.theory,
        inputs: report.inputs.clone(),
        bounds: report.bounds.clone(),
        jobs: 1,
    };
    let again = execute(&req)?;
    let same_result = again.result == report.result && again.status == report.status;
    let same_cert = again.certificate == report.certificate;
    let ok = same_result && same_cert;
    Ok(Report {
        command: Command::Recheck,
        theory: report.theory,
        inputs: report.inputs.clone(),
        status: if ok { Status::Decided } else { Status::Failed },
        result: json!({
            "of": report.command,
            "certificate_verified": checked,
            "result_matches": same_result,
            "certificate_matches": same_cert,
        }),
        certificate: None,
        bounds: report.bounds.clone(),
        oracle: None,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

fn verify_certificate(report: &Report, cert: &Value) -> Result<()> {
    let theory = report.theory.ok_or_else(|| Error::Certificate("report has no theory".into()))?;
    let inputs = &report.inputs;
    match report.command {
        Command::Sdivides | Command::Divides => {
            let mut c: DivideCert = from_value(cert)?;
            c.fix_sorts();
            c.verify()
        }
        Command::Forks | Command::Indep => {
            let mut c: ForkCert = from_value(cert)?;
            c.fix_sorts();
            c.verify()
        }
        Command::Rank => {
            let x = match &inputs.type_of {
                Some(s) => object_vars(&theory.parse_elems(s)?),
                None => vars_of(inputs, &formula(theory, inputs)?)?,
            };
            let mut params = rank_params(theory, inputs, &x)?;
            params.fix_sorts();
            let mut tree: RankTree = from_value(cert)?;
            tree.fix_sorts(&params);
            tree.verify(theory, &params)
        }
        Command::Uth | Command::Uthstar => {
            let mut v: UthValue = from_value(cert)?;
            v.fix_sorts();
            v.verify(theory)
        }
        Command::Morley => {
            let base = elems(theory, &inputs.base)?;
            let psi = formula(theory, inputs)?;
            let x = vars_of(inputs, &psi)?;
            let w: MorleyWitness = from_value(cert)?;
            let xy: Vec<Var> = x.iter().chain(&w.y).cloned().collect();
            let delta = w.delta.with_sorts(&xy);
            let length = inputs.length.unwrap_or(DEFAULT_LENGTH);
            if w.sequence.len() != length {
                return Err(Error::Certificate("sequence has the wrong length".into()));
            }
            if is_morley(theory, &w.sequence, &base, &report.bounds.budget)? != Some(true) {
                return Err(Error::Certificate("sequence is not a Morley sequence".into()));
            }
            for ai in &w.sequence {
                if !satisfies(theory, &delta.instantiate(&w.y, ai), &x, &w.b)? {
                    return Err(Error::Certificate("common solution fails a member".into()));
                }
            }
            Ok(())
        }
        _ => Err(Error::Certificate(format!("{} reports carry no certificate", report.command))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(command: Command, theory: Theory, f: impl FnOnce(&mut Inputs)) -> Request {
        let mut r = Request::new(command, Some(theory));
        f(&mut r.inputs);
        r
    }

    #[test]
    fn documented_commands() {
        let r = execute(&req(Command::Indep, Theory::Dlo, |i| {
            i.a = Some("0".into());
            i.b = Some("1".into());
            i.base = Some(String::new());
        }))
        .unwrap();
        assert_eq!(r.result["independent"], json!(true));
        assert_eq!(r.oracle.unwrap().verdict, "true");

        let r = execute(&req(Command::Rank, Theory::Eq, |i| {
            i.p = Some("x=x".into());
            i.delta = vec!["x=y".into()];
            i.pi = vec!["y=y".into()];
            i.k = Some(2);
        }))
        .unwrap();
        assert_eq!(r.result["rank"], json!(1));

        let r = execute(&req(Command::Uth, Theory::Dlo, |i| {
            i.type_of = Some("0,1".into());
            i.base = Some(String::new());
        }))
        .unwrap();
        assert_eq!(r.result["rank"], json!(2));
        assert_eq!(r.status, Status::Decided);
    }

    #[test]
    fn reports_recheck() {
        let requests = [
            req(Command::Forks, Theory::Erel, |i| i.p = Some("E(x, 2.5)".into())),
            req(Command::Indep, Theory::Eq, |i| {
                i.a = Some("#0,#1".into());
                i.b = Some("#1,#2".into());
            }),
            req(Command::Divides, Theory::Dlo, |i| i.p = Some("x = 0".into())),
            req(Command::Sdivides, Theory::Eq, |i| {
                i.delta = vec!["x = y".into()];
                i.a = Some("#0".into());
            }),
            req(Command::Rank, Theory::Dlo, |i| {
                i.p = Some("x1 = x1 & x2 = x2".into());
                i.delta = vec!["x1 = y".into(), "x2 = y".into()];
                i.pi = vec!["y = y".into()];
            }),
            req(Command::Uthstar, Theory::Erel, |i| i.type_of = Some("2.5".into())),
            req(Command::Morley, Theory::Dlo, |i| i.p = Some("0 < x".into())),
        ];
        for r in requests {
            let report = execute(&r).unwrap();
            assert!(report.certificate.is_some(), "{:?}", r.command);
            let text = serde_json::to_string(&report).unwrap();
            let back: Report = serde_json::from_str(&text).unwrap();
            let re = recheck(&back).unwrap();
            assert_eq!(re.status, Status::Decided, "{:?}: {}", r.command, re.result);
        }
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let report = execute(&req(Command::Forks, Theory::Eq, |i| i.p = Some("x = #0".into()))).unwrap();
        let mut bad = report.clone();
        let text = serde_json::to_string(&bad.certificate).unwrap().replace("#0", "#7");
        bad.certificate = Some(serde_json::from_str(&text).unwrap());
        assert!(recheck(&bad).is_err() || recheck(&bad).unwrap().status == Status::Failed);
    }

    #[test]
    fn missing_inputs_are_errors() {
        assert!(execute(&req(Command::Forks, Theory::Eq, |_| {})).is_err());
        assert!(execute(&Request::new(Command::Holds, None)).is_err());
        assert!("nope".parse::<Command>().is_err());
    }

    #[test]
    fn reports_are_stable() {
        let r = req(Command::Lascar, Theory::Dlo, |i| {
            i.a = Some("0,1".into());
            i.b = Some("1/2".into());
        });
        let one = serde_json::to_string(&execute(&r).unwrap().without_timing()).unwrap();
        let two = serde_json::to_string(&execute(&r).unwrap().without_timing()).unwrap();
        assert_eq!(one, two);
    }
}
