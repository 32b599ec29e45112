//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! All comparisons are exact (tolerance 0). Suite counts are totals cycled
//! over EQ, DLO and EREL in that order, so a count of 3n gives n
//! instances per theory.

use std::process::ExitCode;
use std::time::Instant;

use thornlab::forking::SearchBudget;
use thornlab::rank::uth_rank_of;
use thornlab::report::{execute, recheck, Command, Inputs, Request, Status};
use thornlab::suites::{run_suite, SuiteReport};
use thornlab::{Elem, Theory};

const SEED: u64 = 1;
const TOLERANCE: usize = 0;

struct Outcome {
    pass: bool,
    summary: String,
}

fn suite(name: &str, count: usize) -> SuiteReport {
    run_suite(name, SEED, count, &SearchBudget::default(), 1).expect("suite runs")
}

fn passed(r: &SuiteReport, prop: &str) -> usize {
    r.properties.get(prop).map_or(0, |t| t.passed)
}

fn clean(r: &SuiteReport) -> bool {
    r.failed == 0 && r.unknown == 0
}

fn failure(r: &SuiteReport) -> String {
    match &r.first_failure {
        Some(f) => format!("; first failure {f}"),
        None => String::new(),
    }
}

fn qe_fuzz() -> Outcome {
    let r = suite("qe-fuzz", 3 * 10_000);
    Outcome {
        pass: clean(&r) && passed(&r, "qe") == 30_000,
        summary: format!("{} formulas, {} per theory, {} failed{}", r.count, r.count / 3, r.failed, failure(&r)),
    }
}

fn symmetry() -> Outcome {
    let r = suite("symmetry", 3 * 200);
    Outcome {
        pass: clean(&r) && passed(&r, "symmetry") == 600 && passed(&r, "oracle") == 600,
        summary: format!(
            "{} instances, symmetric {}, oracle {}, unknown {}, failed {}{}",
            r.count,
            passed(&r, "symmetry"),
            passed(&r, "oracle"),
            r.unknown,
            r.failed,
            failure(&r)
        ),
    }
}

const AXIOMS: [&str; 9] = [
    "existence",
    "extension",
    "reflexivity",
    "monotonicity",
    "finite character",
    "symmetry",
    "transitivity",
    "forking persists",
    "algebraic closure",
];

fn axioms() -> Outcome {
    // the axiom rotates every third instance, so 27 instances cover each
    // axiom once per theory
    let r = suite("axioms", 27 * 100);
    let least = AXIOMS.iter().map(|a| passed(&r, a)).min().unwrap_or(0);
    let counts: Vec<String> = AXIOMS.iter().map(|a| format!("{a} {}", passed(&r, a))).collect();
    Outcome {
        pass: clean(&r) && least >= 100,
        summary: format!("{}; failed {}, unknown {}{}", counts.join(", "), r.failed, r.unknown, failure(&r)),
    }
}

fn rank_laws() -> Outcome {
    let r = suite("rank-laws", 300);
    let laws = ["monotonicity", "transitivity", "additivity"];
    let least = laws.iter().map(|l| passed(&r, l)).min().unwrap_or(0);
    Outcome {
        pass: clean(&r) && least >= 100,
        summary: format!("{} paired instances, each law holds on {least}, failed {}{}", r.count, r.failed, failure(&r)),
    }
}

fn rank_characterization() -> Outcome {
    let r = suite("rank-characterization", 3 * 200);
    Outcome {
        pass: clean(&r) && passed(&r, "characterization") == 600,
        summary: format!("{} symmetry-corpus triples, mismatches {}, unknown {}{}", r.count, r.failed, r.unknown, failure(&r)),
    }
}

fn dlo_dimension(oracle: &SuiteReport) -> Outcome {
    let pair = [Elem::rat(0, 1), Elem::rat(1, 1)];
    let u = uth_rank_of(Theory::Dlo, &pair, &[], None, &SearchBudget::default()).expect("rank of (0,1)");
    let tally = oracle.properties.get("uth = dim").cloned().unwrap_or_default();
    Outcome {
        pass: tally.failed == 0 && tally.unknown == 0 && tally.passed >= 50 && u.value == 2,
        summary: format!(
            "{} formulas agree with the dimension, {} disagree; Uth(0,1 / empty) = {}",
            tally.passed, tally.failed, u.value
        ),
    }
}

fn stable_oracles(oracle: &SuiteReport) -> Outcome {
    // EQ and EREL instances carry both checks; 60 of each
    let indep = passed(oracle, "indep = oracle");
    let uth = passed(oracle, "uth = oracle");
    Outcome {
        pass: clean(oracle) && indep >= 100 && uth >= 100,
        summary: format!("independence {indep}, Uth {uth} over EQ and EREL, failed {}{}", oracle.failed, failure(oracle)),
    }
}

fn uth_star() -> Outcome {
    let r = suite("uth-star", 150);
    Outcome {
        pass: clean(&r) && passed(&r, "uth = uth*") == 150,
        summary: format!("{} types, equal on {}{}", r.count, passed(&r, "uth = uth*"), failure(&r)),
    }
}

fn lascar() -> Outcome {
    let r = suite("lascar", 120);
    let eq = r.properties.get("equality").cloned().unwrap_or_default();
    Outcome {
        pass: clean(&r) && passed(&r, "inequalities") >= 100 && eq.passed == 40,
        summary: format!(
            "{} triples satisfy both inequalities; DLO equality on {} of 40{}",
            passed(&r, "inequalities"),
            eq.passed,
            failure(&r)
        ),
    }
}

fn morley() -> Outcome {
    let r = suite("morley", 180);
    let no = passed(&r, "non-forking has sequence");
    let yes = passed(&r, "forking has none");
    Outcome {
        pass: clean(&r) && no >= 50 && yes >= 20,
        summary: format!("non-forking with sequence {no}, forking without {yes}, failed {}{}", r.failed, failure(&r)),
    }
}

fn request(command: Command, theory: Theory, f: impl FnOnce(&mut Inputs)) -> Request {
    let mut r = Request::new(command, Some(theory));
    f(&mut r.inputs);
    r
}

fn determinism() -> Outcome {
    let mut problems = Vec::new();
    for (name, count) in [("symmetry", 60), ("morley", 12), ("lascar", 12)] {
        let once = serde_json::to_string(&suite(name, count)).unwrap();
        let twice = serde_json::to_string(&suite(name, count)).unwrap();
        let parallel =
            serde_json::to_string(&run_suite(name, SEED, count, &SearchBudget::default(), 3).unwrap()).unwrap();
        if once != twice || once != parallel {
            problems.push(format!("suite {name} differs between runs"));
        }
    }
    let requests = [
        request(Command::Forks, Theory::Erel, |i| i.p = Some("E(x, 2.5)".into())),
        request(Command::Forks, Theory::Dlo, |i| {
            i.p = Some("0 < x & x < 1".into());
            i.base = Some("0".into());
        }),
        request(Command::Indep, Theory::Eq, |i| {
            i.a = Some("#0,#1".into());
            i.b = Some("#1,#2".into());
        }),
        request(Command::Indep, Theory::Dlo, |i| {
            i.a = Some("1/2".into());
            i.b = Some("0,1".into());
        }),
        request(Command::Divides, Theory::Dlo, |i| i.p = Some("x = 0".into())),
        request(Command::Sdivides, Theory::Eq, |i| {
            i.delta = vec!["x = y".into()];
            i.a = Some("#0".into());
        }),
        request(Command::Rank, Theory::Dlo, |i| {
            i.p = Some("x1 = x1 & x2 = x2".into());
            i.delta = vec!["x1 = y".into(), "x2 = y".into()];
            i.pi = vec!["y = y".into()];
        }),
        request(Command::Uth, Theory::Dlo, |i| i.type_of = Some("0,1".into())),
        request(Command::Uthstar, Theory::Erel, |i| i.type_of = Some("2.5".into())),
        request(Command::Morley, Theory::Dlo, |i| i.p = Some("0 < x".into())),
        request(Command::Morley, Theory::Eq, |i| i.p = Some("x != #0".into())),
    ];
    let mut rechecked = 0;
    let mut certified = 0;
    for r in &requests {
        let (first, second) = match (execute(r), execute(r)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                problems.push(format!("{} failed: {e}", r.command));
                continue;
            }
        };
        let text = serde_json::to_string(&first.without_timing()).unwrap();
        if text != serde_json::to_string(&second.without_timing()).unwrap() {
            problems.push(format!("{} differs between runs", r.command));
        }
        // only Yes answers carry certificates; the rest must re-run identically
        let has_cert = first.certificate.is_some();
        certified += has_cert as usize;
        let saved = serde_json::from_str(&text).unwrap();
        match recheck(&saved) {
            Ok(re) if re.status == Status::Decided && re.result["certificate_verified"] == has_cert => rechecked += 1,
            Ok(re) => problems.push(format!("recheck of {}: {}", r.command, re.result)),
            Err(e) => problems.push(format!("recheck of {}: {e}", r.command)),
        }
    }
    Outcome {
        pass: problems.is_empty(),
        summary: format!(
            "3 suites x 3 runs compared, {} of {} reports identical and rechecked ({} certificates re-verified){}",
            rechecked,
            requests.len(),
            certified,
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut all = true;
    let mut report = |n: usize, name: &str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        all &= o.pass;
        println!(
            "{} {n:>2} {name} (tolerance {TOLERANCE}, {:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.summary
        );
    };
    report(1, "qe soundness", &qe_fuzz);
    report(2, "symmetry", &symmetry);
    report(3, "independence axioms", &axioms);
    report(4, "rank laws", &rank_laws);
    report(5, "rank characterization", &rank_characterization);
    let oracle = suite("oracle-agreement", 3 * 60);
    report(6, "DLO Uth = dimension", &|| dlo_dimension(&oracle));
    report(7, "stable forking = thorn-forking", &|| stable_oracles(&oracle));
    report(8, "Uth = Uth*", &uth_star);
    report(9, "Lascar inequalities", &lascar);
    report(10, "Morley sequences", &morley);
    report(11, "determinism and recheck", &determinism);
    println!("total {:.1}s", start.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
