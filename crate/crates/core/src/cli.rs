//! Command-line front end. Every subcommand is a thin adapter over one
//! library call; JSON is the default output, `--output plain` is for humans.
//!
//! Exit codes: 0 success, 1 losing position, 2 usage error, 3 overflow.

use std::collections::BTreeSet;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::canonical_systems::{
    find_move_detailed, has_minimum_symmetric_system, has_minimum_system, in_ord, nj_info,
    sigma_weight, MoveSystem, SystemKind,
};
use crate::error::{Error, Result};
use crate::game_oracle::{sg_table, verify_system, GridBox, VerifyReport};
use crate::maximum_system::{admissible_level, max_equals_ord, LevelQuery};
use crate::minimal_audit::audit_minimal;
use crate::mixed_radix::{parse_list, Digits};
use crate::{Base, Nat, Position};

#[derive(Parser, Debug)]
#[command(name = "mixed-nim", version, about = "Nim sums in a mixed base and their move systems")]
struct Cli {
    /// Base as `p0,p1,…,pk:t` (prefix radices, then the repeating tail).
    #[arg(long, global = true, default_value = ":2")]
    base: String,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,

    /// Worker threads for table generation and audits (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Tsv,
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    MinSystem,
    MinSymmetric,
    MaxEqOrd,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert a number to its digits, or digits back to a number.
    Digits {
        #[arg(long, conflicts_with = "from", required_unless_present = "from")]
        value: Option<Nat>,
        /// Little-endian digits `d0,d1,…`.
        #[arg(long)]
        from: Option<String>,
    },
    /// Nim sum of a position.
    Nimsum {
        #[arg(long)]
        pos: String,
    },
    /// Order of a number, or the minimum order over a position.
    Ord {
        #[arg(long, conflicts_with = "pos", required_unless_present = "pos")]
        value: Option<Nat>,
        #[arg(long)]
        pos: Option<String>,
    },
    /// Carry vector of `n + h`.
    Carry {
        #[arg(long)]
        n: Nat,
        #[arg(long)]
        h: Nat,
    },
    /// Membership of a move with its certificate.
    Member {
        /// `ord | nmin | max | wt1 | explicit@FILE`, optionally with `+{…}` / `-{…}`.
        #[arg(long)]
        system: String,
        #[arg(long = "move")]
        mv: String,
    },
    /// Check that a system yields the Nim sum on every position of a box.
    Verify {
        #[arg(long)]
        system: String,
        /// Exclusive bounds `n0,n1,…`.
        #[arg(long = "box")]
        grid: String,
    },
    /// Brute-force Sprague-Grundy table over a box.
    SgTable {
        #[arg(long, default_value = "ord")]
        system: String,
        #[arg(long = "box")]
        grid: String,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Members of a system inside a box.
    Enumerate {
        #[arg(long)]
        system: String,
        #[arg(long = "box")]
        grid: String,
    },
    /// A move to a position of the target Nim sum.
    BestMove {
        #[arg(long)]
        pos: String,
        #[arg(long, default_value_t = 0)]
        target: Nat,
    },
    /// Necessity witnesses for the members of a system inside a box.
    AuditMinimal {
        #[arg(long)]
        system: String,
        #[arg(long = "box")]
        grid: String,
    },
    /// Decidable existence criteria.
    Props {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(short = 'm', long = "heaps")]
        m: usize,
    },
}

fn load_explicit(path: &str) -> Result<BTreeSet<Position>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        position: 0,
        message: format!("cannot read `{path}`: {e}"),
    })?;
    let moves: Vec<Position> = serde_json::from_str(&text).map_err(|e| Error::Parse {
        position: e.column(),
        message: format!("`{path}`: {e}"),
    })?;
    Ok(moves.into_iter().collect())
}

fn parse_system(text: &str) -> Result<MoveSystem> {
    MoveSystem::parse_with(text, load_explicit)
}

fn parse_box(text: &str) -> Result<GridBox> {
    GridBox::new(parse_list(text, 0)?)
}

fn join(v: &[Nat]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn padded_digits(base: &Base, n: Nat, width: usize) -> Digits<Nat> {
    let digits = base.to_digits(n);
    let width = width.max(digits.len());
    Digits((0..width).map(|l| base.digit(n, l)).collect())
}

/// What a subcommand produced: a JSON value, its plain rendering, and an
/// exit code.
struct Outcome {
    json: Value,
    plain: String,
    tsv: Option<String>,
    code: i32,
}

impl Outcome {
    fn new(json: Value, plain: impl Into<String>) -> Self {
        Self {
            json,
            plain: plain.into(),
            tsv: None,
            code: 0,
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let base: Base = cli.base.parse()?;
    match &cli.command {
        Command::Digits { value, from } => {
            let (n, digits) = match (value, from) {
                (Some(n), _) => (*n, base.to_digits(*n)),
                (None, Some(text)) => {
                    let digits = Digits(parse_list(text, 0)?);
                    let n = base.from_digits(&digits)?;
                    (n, base.to_digits(n))
                }
                (None, None) => unreachable!("clap requires one of --value/--from"),
            };
            Ok(Outcome::new(
                json!({ "value": n, "digits": digits }),
                format!("{n} {digits}"),
            ))
        }
        Command::Nimsum { pos } => {
            let x = parse_list(pos, 0)?;
            let value = base.nim_sum(&x)?;
            let width = x.iter().map(|&v| base.to_digits(v).len()).max().unwrap_or(0);
            let digits = padded_digits(&base, value, width);
            Ok(Outcome::new(
                json!({ "value": value, "digits": digits }),
                format!("{value}\n{digits}"),
            ))
        }
        Command::Ord { value, pos } => match (value, pos) {
            (Some(n), _) => {
                let ord = base.ord(*n);
                Ok(Outcome::new(json!({ "value": n, "ord": ord }), ord.to_string()))
            }
            (None, Some(text)) => {
                let x = parse_list(text, 0)?;
                let ords: Vec<_> = x.iter().map(|&v| base.ord(v)).collect();
                let mord = base.mord(&x);
                Ok(Outcome::new(
                    json!({ "pos": x, "ords": ords, "mord": mord }),
                    mord.to_string(),
                ))
            }
            (None, None) => unreachable!("clap requires one of --value/--pos"),
        },
        Command::Carry { n, h } => {
            let r = base.carry_vector(*n, *h)?;
            let digits = base.to_digits(r);
            Ok(Outcome::new(
                json!({ "n": n, "h": h, "carry": r, "digits": digits }),
                format!("{r} {digits}"),
            ))
        }
        Command::Member { system, mv } => member(&base, &parse_system(system)?, &parse_list(mv, 0)?),
        Command::Verify { system, grid } => {
            let report = verify_system(&base, &parse_system(system)?, &parse_box(grid)?)?;
            let plain = match &report {
                VerifyReport::Ok => "ok".to_string(),
                VerifyReport::Sg1Violation { x, c } => {
                    format!("sg1 violation: move {} keeps the nim sum of {}", join(c), join(x))
                }
                VerifyReport::Sg2Violation { x, h } => {
                    format!("sg2 violation: {} is not covered at {h}", join(x))
                }
            };
            Ok(Outcome::new(serde_json::to_value(&report).unwrap(), plain))
        }
        Command::SgTable { system, grid, out } => {
            let table = sg_table(&base, &parse_box(grid)?, &parse_system(system)?)?;
            let tsv = if table.grid.dim() == 2 {
                Some(table.to_tsv()?)
            } else {
                None
            };
            if cli.output == OutputFormat::Tsv && tsv.is_none() {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    got: table.grid.dim(),
                });
            }
            let plain = tsv.clone().unwrap_or_else(|| {
                (0..table.grid.len())
                    .map(|i| format!("{}\t{}\n", join(&table.grid.position(i)), table.values[i]))
                    .collect()
            });
            let mut outcome = Outcome::new(table.to_json(), plain);
            outcome.tsv = tsv;
            if let Some(path) = out {
                let body = render(&outcome, cli.output);
                std::fs::write(path, body).map_err(|e| Error::Parse {
                    position: 0,
                    message: format!("cannot write `{}`: {e}", path.display()),
                })?;
                return Ok(Outcome::new(
                    json!({ "written": path.display().to_string() }),
                    format!("wrote {}", path.display()),
                ));
            }
            Ok(outcome)
        }
        Command::Enumerate { system, grid } => {
            let members = crate::canonical_systems::enumerate_system(&base, &parse_system(system)?, &parse_box(grid)?)?;
            let plain = members.iter().map(|c| join(c) + "\n").collect::<String>();
            Ok(Outcome::new(json!(members), plain))
        }
        Command::BestMove { pos, target } => {
            let x = parse_list(pos, 0)?;
            match find_move_detailed(&base, &x, *target) {
                Ok(choice) => {
                    let result: Position = x.iter().zip(&choice.c).map(|(a, b)| a - b).collect();
                    Ok(Outcome::new(
                        json!({
                            "move": choice.c,
                            "result": result,
                            "level": choice.level,
                            "pivot": choice.pivot,
                        }),
                        join(&choice.c),
                    ))
                }
                Err(Error::LosingPosition { nim_sum, target }) => {
                    let plain = if nim_sum == 0 {
                        "losing position".to_string()
                    } else {
                        format!("target {target} is not below nim sum {nim_sum}")
                    };
                    Ok(Outcome {
                        json: json!({ "losing": nim_sum == 0, "nim_sum": nim_sum, "target": target }),
                        plain,
                        tsv: None,
                        code: 1,
                    })
                }
                Err(e) => Err(e),
            }
        }
        Command::AuditMinimal { system, grid } => {
            let report = audit_minimal(&base, &parse_system(system)?, &parse_box(grid)?)?;
            let mut plain = String::new();
            for n in &report.necessary {
                plain += &format!("necessary {} witness {} h={}\n", join(&n.c), join(&n.witness_x), n.h);
            }
            for c in &report.undetermined {
                plain += &format!("undetermined {}\n", join(c));
            }
            Ok(Outcome::new(serde_json::to_value(&report).unwrap(), plain))
        }
        Command::Props { check, m } => {
            let (name, holds) = match check {
                Check::MinSystem => ("min-system", has_minimum_system(&base, *m)),
                Check::MinSymmetric => ("min-symmetric", has_minimum_symmetric_system(&base, *m)),
                Check::MaxEqOrd => ("max-eq-ord", max_equals_ord(&base, *m)),
            };
            Ok(Outcome::new(
                json!({
                    "check": name,
                    "base": base.to_string(),
                    "m": m,
                    "holds": holds,
                    "weight": sigma_weight(&base, *m),
                }),
                holds.to_string(),
            ))
        }
    }
}

fn member(base: &Base, system: &MoveSystem, c: &[Nat]) -> Result<Outcome> {
    let is_member = system.contains(base, c)?;
    let mut json = json!({ "system": system.to_string(), "move": c, "member": is_member });
    let mut plain = is_member.to_string();
    let adjusted = !system.added().is_empty() || !system.removed().is_empty();
    match system.kind() {
        SystemKind::Nmin => {
            let info = nj_info(base, c);
            plain += &format!("\nnj {}", serde_json::to_string(&info).unwrap());
            json["nj"] = serde_json::to_value(info).unwrap();
        }
        SystemKind::Ord => {
            let total = c.iter().try_fold(0 as Nat, |a, &v| a.checked_add(v)).ok_or(Error::Overflow)?;
            json["ord_sum"] = serde_json::to_value(base.ord(total)).unwrap();
            json["mord"] = serde_json::to_value(base.mord(c)).unwrap();
            debug_assert!(adjusted || in_ord(base, c)? == is_member);
        }
        SystemKind::Max => {
            let query = LevelQuery::new(base.clone());
            let level = admissible_level(base, c);
            json["level"] = json!(level);
            plain += &format!("\nlevel {level}");
            if let Some(steps) = query.derivation(c)? {
                let witness = query.nonmove_witness(c)?;
                plain += &format!("\nwitness {}", join(&witness));
                json["derivation"] = serde_json::to_value(steps).unwrap();
                json["witness"] = json!(witness);
            }
        }
        SystemKind::WeightOne | SystemKind::Explicit(_) => {}
    }
    Ok(Outcome::new(json, plain))
}

fn render(outcome: &Outcome, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string(&outcome.json).unwrap() + "\n",
        OutputFormat::Tsv => outcome.tsv.clone().unwrap_or_else(|| ensure_newline(&outcome.plain)),
        OutputFormat::Plain => ensure_newline(&outcome.plain),
    }
}

fn ensure_newline(s: &str) -> String {
    if s.is_empty() || s.ends_with('\n') {
        s.to_string()
    } else {
        format!("{s}\n")
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Overflow => 3,
        Error::LosingPosition { .. } => 1,
        _ => 2,
    }
}

/// Runs one invocation, writing results to `out` and diagnostics to `err`.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let target: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let run_it = || execute(&cli);
    let result = if cli.threads > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
            Ok(pool) => pool.install(run_it),
            Err(e) => {
                let _ = writeln!(err, "error: cannot start thread pool: {e}");
                return 2;
            }
        }
    } else {
        run_it()
    };
    match result {
        Ok(outcome) => {
            let _ = write!(out, "{}", render(&outcome, cli.output));
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
