use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use classprod::burnside::{n_count, n_sigma, ClassTuple, Method};
use classprod::chartab::{char_value, families};
use classprod::classes::{all_class_data, GroupSpec, Kind};
use classprod::decide::{
    covering_numbers, decide_p, decide_with, table2_scan, DecideOptions, Table2Scan,
};
use classprod::oracle::{build_cached, n_oracle};
use classprod::verify::{closed_form_suite, oracle_suite, rules_suite, Coverage, SuiteReport};
use classprod::{Error, Result};

/// Character values printed by `chartab` before refusing.
const CHARTAB_MAX_ENTRIES: u64 = 200_000;

#[derive(Parser)]
#[command(
    name = "classprod",
    version,
    about = "Structure constants and class products in GL, GU, SL, SU, PSL, PSU of rank 2 and 3"
)]
struct Cli {
    /// Emit one JSON object per line.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the conjugacy classes with sizes and determinants.
    Classes {
        #[arg(long)]
        group: GroupSpec,
    },
    /// Number of tuples (a₁, …, a_m) with a_i in c_i and product 1.
    Constant {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long)]
        classes: String,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        method: Engine,
    },
    /// Whether the identity lies in c₁⋯c_m.
    Decide {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long)]
        classes: String,
        /// Compare rule answers with the count up to this many classes (0 = never).
        #[arg(long, default_value_t = classprod::decide::CROSS_CHECK_MAX_LEN)]
        cross_check_len: usize,
    },
    /// Covering number and extended covering number of PSL(3,q) / PSU(3,q²).
    Covering {
        #[arg(long)]
        group: GroupSpec,
    },
    /// Tuples of GL(3,q) / GU(3,q²) missing the identity, classified by pattern.
    #[command(name = "scan-table2")]
    ScanTable2 {
        #[arg(long)]
        group: GroupSpec,
    },
    /// Character values of GL(3,q) / GU(3,q²) as sums of roots of unity.
    Chartab {
        #[arg(long)]
        group: GroupSpec,
    },
    /// Run the verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 3)]
        max_q: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Auto,
    Sigma,
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Oracle,
    Closed,
    Rules,
    All,
}

/// Writes a line to stdout; a closed pipe ends the process quietly.
fn out(line: &str) {
    if let Err(e) = writeln!(io::stdout().lock(), "{line}") {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(4);
    }
}

fn emit(json: bool, v: Value, text: impl FnOnce() -> String) {
    if json {
        out(&v.to_string());
    } else {
        out(&text());
    }
}

fn big(n: &BigUint) -> Value {
    Value::String(n.to_string())
}

fn labels(t: &ClassTuple) -> Vec<String> {
    t.labels().iter().map(|l| l.to_string()).collect()
}

fn classes(json: bool, g: &GroupSpec) -> Result<()> {
    for c in all_class_data(g)? {
        emit(
            json,
            json!({"group": g.to_string(), "class": c.label.to_string(), "size": big(&c.size), "det": c.det_exp, "central": c.is_central()}),
            || {
                format!(
                    "{:<20} size {:>12}  det τ^{}",
                    c.label.to_string(),
                    c.size,
                    c.det_exp
                )
            },
        );
    }
    Ok(())
}

fn constant(json: bool, g: &GroupSpec, text: &str, engine: Engine) -> Result<()> {
    let t = ClassTuple::parse(g, text)?;
    let (n, method) = match engine {
        Engine::Auto => n_count(&t)?,
        Engine::Sigma => (n_sigma(&t)?, Method::Sigma),
        Engine::Oracle => (n_oracle(&build_cached(g)?, &t.labels())?, Method::Oracle),
    };
    let c1 = &t.classes[0].size;
    let per = &n / c1;
    if &per * c1 != n {
        return Err(Error::IntegralityViolation(format!(
            "{t}: N = {n} is not a multiple of |c1| = {c1}"
        )));
    }
    emit(
        json,
        json!({"group": g.to_string(), "classes": labels(&t), "N": big(&n), "N_over_c1": big(&per), "method": method.to_string()}),
        || format!("N = {n}\nN/|c1| = {per}\nmethod = {method}"),
    );
    Ok(())
}

fn decide(json: bool, g: &GroupSpec, text: &str, cross_check_len: usize) -> Result<()> {
    let t = ClassTuple::parse(g, text)?;
    let d = if g.kind() == Kind::P {
        decide_p(&t)?
    } else {
        decide_with(&t, DecideOptions { cross_check_len })?
    };
    emit(
        json,
        json!({
            "group": g.to_string(),
            "classes": labels(&t),
            "contains_identity": d.contains_identity,
            "method": d.method.to_string(),
            "rule": d.rule_id,
            "N": d.count.as_ref().map(big),
        }),
        || {
            let mut s = format!(
                "contains_identity = {}\nmethod = {}",
                d.contains_identity, d.method
            );
            if let Some(r) = &d.rule_id {
                s += &format!("\nrule = {r}");
            }
            if let Some(n) = &d.count {
                s += &format!("\nN = {n}");
            }
            s
        },
    );
    Ok(())
}

fn covering(json: bool, g: &GroupSpec) -> Result<()> {
    let (cn, ecn) = covering_numbers(g)?;
    emit(
        json,
        json!({"group": g.to_string(), "cn": cn, "ecn": ecn}),
        || format!("cn = {cn}\necn = {ecn}"),
    );
    Ok(())
}

fn scan(json: bool, g: &GroupSpec) -> Result<()> {
    if g.dim != 3 || g.kind() != Kind::G {
        return Err(Error::WrongGroup(format!(
            "{g}: the scan runs on GL(3,q) and GU(3,q²)"
        )));
    }
    let s = table2_scan(g.qv(), g.sign())?;
    let expected = Table2Scan::expected(g.sign());
    if json {
        out(&json!({
            "group": g.to_string(),
            "tuples": s.tuples,
            "profiles": s.profiles,
            "hit": s.hit,
            "not_hit": expected.difference(&s.hit).collect::<Vec<_>>(),
            "unlisted": s.unlisted,
            "spurious": s.spurious,
        })
        .to_string());
        return Ok(());
    }
    out(&format!(
        "{g}: {} tuples, {} δ-profiles",
        s.tuples, s.profiles
    ));
    for r in &expected {
        out(&format!(
            "  {} {r}",
            if s.hit.contains(r) {
                "hit    "
            } else {
                "not hit"
            }
        ));
    }
    for u in &s.unlisted {
        out(&format!("  unlisted {u}"));
    }
    for u in &s.spurious {
        out(&format!("  spurious {u}"));
    }
    Ok(())
}

fn chartab(json: bool, g: &GroupSpec) -> Result<()> {
    if g.dim != 3 || g.kind() != Kind::G {
        return Err(Error::WrongGroup(format!(
            "{g}: character families are tabulated for GL(3,q) and GU(3,q²)"
        )));
    }
    let cls = all_class_data(g)?;
    let fams = families(g.qv(), g.sign());
    let entries: u64 = fams.iter().map(|f| f.size()).sum::<u64>() * cls.len() as u64;
    if entries > CHARTAB_MAX_ENTRIES {
        return Err(Error::CapacityExceeded(format!(
            "{g}: {entries} character values"
        )));
    }
    let tower = g.tower();
    for f in &fams {
        for p in f.params() {
            let values: Vec<String> = cls
                .iter()
                .map(|c| char_value(f, &p, c, tower).to_string())
                .collect();
            emit(
                json,
                json!({
                    "group": g.to_string(),
                    "family": f.name.to_string(),
                    "params": p,
                    "degree": f.dim_d,
                    "symmetry": f.sym_factor.to_string(),
                    "values": cls.iter().zip(&values).map(|(c, v)| json!({"class": c.label.to_string(), "value": v})).collect::<Vec<_>>(),
                }),
                || {
                    let body: Vec<String> = cls
                        .iter()
                        .zip(&values)
                        .map(|(c, v)| format!("  {}: {v}", c.label))
                        .collect();
                    format!(
                        "{}{:?} degree {} s = {}\n{}",
                        f.name,
                        p,
                        f.dim_d,
                        f.sym_factor,
                        body.join("\n")
                    )
                },
            );
        }
    }
    Ok(())
}

fn verify_groups(suite: Suite, max_q: u64) -> Vec<(Suite, GroupSpec)> {
    let parse = |s: String| s.parse::<GroupSpec>().ok();
    let qs: Vec<u64> = (2..=max_q)
        .filter(|&q| classprod::arith::PrimePowerQ::new(q).is_ok())
        .collect();
    let mut out = Vec::new();
    if matches!(suite, Suite::Oracle | Suite::All) {
        let mut names: Vec<String> = Vec::new();
        for &q in qs.iter().filter(|&&q| q <= 3) {
            names.extend(
                ["GL3", "GU3", "SL3", "SU3"]
                    .iter()
                    .map(|f| format!("{f}:{q}")),
            );
        }
        for &q in qs.iter().filter(|&&q| q <= 5) {
            names.extend(["GL2", "GU2"].iter().map(|f| format!("{f}:{q}")));
        }
        for &q in qs.iter().filter(|&&q| q <= 7 && q % 2 == 1) {
            names.push(format!("SL2:{q}"));
        }
        out.extend(
            names
                .into_iter()
                .filter_map(parse)
                .map(|g| (Suite::Oracle, g)),
        );
    }
    if matches!(suite, Suite::Closed | Suite::All) {
        for &q in &qs {
            let mut names = vec![
                format!("GL2:{q}"),
                format!("GU2:{q}"),
                format!("SL2:{q}"),
                format!("SU2:{q}"),
            ];
            if q >= 3 {
                names.extend([
                    format!("GL3:{q}"),
                    format!("GU3:{q}"),
                    format!("SL3:{q}"),
                    format!("SU3:{q}"),
                ]);
            }
            out.extend(
                names
                    .into_iter()
                    .filter_map(parse)
                    .map(|g| (Suite::Closed, g)),
            );
        }
    }
    if matches!(suite, Suite::Rules | Suite::All) {
        for &q in &qs {
            let names = [
                "GL3", "GU3", "SL3", "SU3", "PSL3", "PSU3", "GL2", "GU2", "SL2", "SU2",
            ]
            .map(|f| format!("{f}:{q}"));
            out.extend(
                names
                    .into_iter()
                    .filter_map(parse)
                    .map(|g| (Suite::Rules, g)),
            );
        }
    }
    out
}

/// Multisets of classes per (group, m) checked in full by the rules suite.
const VERIFY_EXHAUSTIVE_CAP: u64 = 50_000;

fn multisets(n: u64, m: u64) -> u64 {
    (0..m).fold(1u64, |a, i| a.saturating_mul(n + i) / (i + 1))
}

fn verify(json: bool, suite: Suite, max_q: u64) -> Result<bool> {
    let mut all_ok = true;
    for (kind, g) in verify_groups(suite, max_q) {
        let reports: Vec<SuiteReport> = match kind {
            Suite::Oracle => vec![oracle_suite(&g)?],
            Suite::Closed => vec![closed_form_suite(&g)?],
            _ => {
                let nc = all_class_data(&g)?
                    .iter()
                    .filter(|c| !c.is_central())
                    .count() as u64;
                (3..=4)
                    .map(|m| {
                        let cov = if multisets(nc, m as u64) <= VERIFY_EXHAUSTIVE_CAP {
                            Coverage::Exhaustive
                        } else {
                            Coverage::Sampled {
                                count: 5_000,
                                seed: 1,
                            }
                        };
                        rules_suite(&g, m, cov)
                    })
                    .collect::<Result<_>>()?
            }
        };
        for r in reports {
            all_ok &= r.ok();
            emit(
                json,
                json!({"suite": r.name, "checked": r.checked, "failed": r.failed, "failures": r.failures}),
                || {
                    let mut s = r.to_string();
                    for f in &r.failures {
                        s += &format!("\n  {f}");
                    }
                    s
                },
            );
        }
    }
    Ok(all_ok)
}

fn run(cli: Cli) -> Result<bool> {
    let json = cli.json;
    match cli.command {
        Command::Classes { group } => classes(json, &group)?,
        Command::Constant {
            group,
            classes,
            method,
        } => constant(json, &group, &classes, method)?,
        Command::Decide {
            group,
            classes,
            cross_check_len,
        } => decide(json, &group, &classes, cross_check_len)?,
        Command::Covering { group } => covering(json, &group)?,
        Command::ScanTable2 { group } => scan(json, &group)?,
        Command::Chartab { group } => chartab(json, &group)?,
        Command::Verify { suite, max_q } => return verify(json, suite, max_q),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
