//! `prbatl`: check, reach, compile, simulate, flatten and fuzz.
//!
//! Exit codes: 0 verdict true (or accepted), 1 false (or rejected), 2
//! usage, parse or validation errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use prbatl::checker::oracle::oracle_check;
use prbatl::formula::TeamOp;
use prbatl::gen::{random_instance, GenParams};
use prbatl::lbatm::{accepts, parse_machine, trace, MachineConfig, Tape};
use prbatl::model::{AgentId, Amount, MoneyVector};
use prbatl::reduction::{self, CompileOptions, Labelling, Mode};
use prbatl::{parse_formula, witness, Checker, ExecPolicy, Formula, PricedGameStructure, Signature};

use prbatl_cli::report::RunReport;

#[derive(Parser)]
#[command(name = "prbatl", version, about = "Model checker for priced resource-bounded ATL")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Digit,
    Unary,
}

#[derive(Clone, Copy, ValueEnum)]
enum LabellingArg {
    /// p on every halting full state; the machine must be in normal form
    Literal,
    /// p only on universal halting full states
    Universal,
}

#[derive(clap::Args)]
struct RunFlags {
    /// Print the report as JSON
    #[arg(long)]
    json: bool,
    /// Include a memoryless strategy for the outermost team operator
    #[arg(long)]
    witness: bool,
    /// Disable data parallelism
    #[arg(long)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check a formula at the initial configuration of a structure
    Check {
        structure: PathBuf,
        /// Formula text, or @FILE to read it from a file
        formula: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Check <<team:money>> F prop
    Reach {
        structure: PathBuf,
        /// Comma-separated agent names; empty for the empty team
        #[arg(long, default_value = "")]
        team: String,
        /// Comma-separated budgets, one per agent ("inf" allowed); all unbounded by default
        #[arg(long)]
        money: Option<String>,
        /// Target proposition
        #[arg(long)]
        prop: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Compile machine acceptance on a tape into a structure and formula
    Compile {
        machine: PathBuf,
        /// Tape such as "[B12]"; delimiters may be omitted
        tape: String,
        #[arg(long, value_enum, default_value = "digit")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "literal")]
        labelling: LabellingArg,
        /// Print resource and location counts instead of the structure
        #[arg(long)]
        stats: bool,
        /// Write the structure here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the hierarchical description here
        #[arg(long)]
        hierarchy: Option<PathBuf>,
    },
    /// Decide acceptance of a tape by a machine
    Simulate {
        machine: PathBuf,
        /// Tape such as "[B(1)2]"; the marked cell is the head, cell 1 by default
        tape: String,
        /// Print the proof tree
        #[arg(long)]
        trace: bool,
    },
    /// Expand a hierarchical description into a structure
    Flatten {
        hierarchy: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the checker with the brute-force oracle on random instances
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
    },
}

type Failure = String;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_structure(path: &Path) -> Result<PricedGameStructure, Failure> {
    PricedGameStructure::from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_formula(arg: &str, game: &PricedGameStructure) -> Result<Formula, Failure> {
    let text = match arg.strip_prefix('@') {
        Some(file) => read(Path::new(file))?,
        None => arg.to_string(),
    };
    parse_formula(text.trim(), &Signature::of(game)).map_err(|e| {
        let pos = e.position();
        format!("formula error at position {pos}: {e}\n  {}\n  {}^", text.trim(), " ".repeat(pos))
    })
}

fn verdict_code(v: bool) -> ExitCode {
    ExitCode::from(if v { 0 } else { 1 })
}

fn run_check(game: &PricedGameStructure, phi: &Formula, flags: &RunFlags) -> Result<ExitCode, Failure> {
    let policy = if flags.sequential { ExecPolicy::Sequential } else { ExecPolicy::Parallel };
    let start = Instant::now();
    let checker = Checker::with_policy(game, policy);
    let lab = checker.label(phi).map_err(|e| e.to_string())?;
    let micros = start.elapsed().as_micros() as u64;
    let w = if flags.witness { witness(game, phi).map_err(|e| e.to_string())? } else { None };
    let rep = RunReport::new(game, phi, &lab, micros, w.as_ref());
    if flags.json {
        println!("{}", rep.to_json());
    } else {
        print!("{}", rep.human());
    }
    Ok(verdict_code(rep.verdict))
}

fn parse_money(text: Option<&str>, n: usize) -> Result<MoneyVector, Failure> {
    let Some(text) = text else { return Ok(MoneyVector(vec![Amount::INF; n])) };
    let v = text
        .split(',')
        .map(|s| match s.trim() {
            "inf" => Ok(Amount::INF),
            s => s.parse().map(Amount::finite).map_err(|_| format!("bad budget '{s}'")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if v.len() != n {
        return Err(format!("money has {} entries, the structure has {n} agents", v.len()));
    }
    Ok(MoneyVector(v))
}

fn parse_team(text: &str, game: &PricedGameStructure) -> Result<Vec<AgentId>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| game.agent_id(s).ok_or_else(|| format!("unknown agent '{s}'")))
        .collect()
}

fn parse_tape(text: &str) -> Result<(Tape, Option<usize>), Failure> {
    Tape::parse(text).map_err(|e| e.to_string())
}

fn run(cmd: Command) -> Result<ExitCode, Failure> {
    match cmd {
        Command::Check { structure, formula, flags } => {
            let game = load_structure(&structure)?;
            let phi = load_formula(&formula, &game)?;
            run_check(&game, &phi, &flags)
        }
        Command::Reach { structure, team, money, prop, flags } => {
            let game = load_structure(&structure)?;
            let team = parse_team(&team, &game)?;
            let money = parse_money(money.as_deref(), game.agent_count())?;
            let phi = Formula::eventually(TeamOp::new(team, money), Formula::atom(prop));
            run_check(&game, &phi, &flags)
        }
        Command::Compile { machine, tape, mode, labelling, stats, out, hierarchy } => {
            let m = parse_machine(&read(&machine)?).map_err(|e| format!("{}: {e}", machine.display()))?;
            let (tape, head) = parse_tape(&tape)?;
            if head.is_some_and(|h| h != 1) {
                return Err("compilation starts with the head on cell 1".into());
            }
            let mode = match mode {
                ModeArg::Digit => Mode::Digit,
                ModeArg::Unary => Mode::Unary,
            };
            let labelling = match labelling {
                LabellingArg::Literal => Labelling::Literal,
                LabellingArg::Universal => Labelling::Universal,
            };
            let c = reduction::compile(&m, &tape, mode, CompileOptions { labelling }).map_err(|e| e.to_string())?;
            let json = c.game().to_json();
            if let Some(path) = &hierarchy {
                write(path, &c.hierarchy.render())?;
            }
            match &out {
                Some(path) => write(path, &json)?,
                None if !stats => println!("{json}"),
                None => {}
            }
            if stats {
                println!("{}", c.stats());
            }
            if stats || out.is_some() {
                println!("formula    {}", c.formula.render(&Signature::of(c.game())));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { machine, tape, trace: show } => {
            let m = parse_machine(&read(&machine)?).map_err(|e| format!("{}: {e}", machine.display()))?;
            let (tape, head) = parse_tape(&tape)?;
            let c = MachineConfig::with_head(&m, &tape, head.unwrap_or(1));
            let ok = accepts(&m, &c).map_err(|e| e.to_string())?;
            println!("{}", if ok { "accept" } else { "reject" });
            if show {
                for line in trace(&m, &c).map_err(|e| e.to_string())? {
                    println!("{line}");
                }
            }
            Ok(verdict_code(ok))
        }
        Command::Flatten { hierarchy, out } => {
            let h = reduction::parse_hierarchical(&read(&hierarchy)?).map_err(|e| format!("{}: {e}", hierarchy.display()))?;
            let f = reduction::flatten(&h).map_err(|e| e.to_string())?;
            let json = f.game.to_json();
            match out {
                Some(path) => write(&path, &json)?,
                None => println!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fuzz { seed, count } => {
            let p = GenParams::default();
            let mut bad = 0;
            for s in seed..seed + count {
                let (g, f) = random_instance(s, &p);
                let a = Checker::new(&g).check(&f).map_err(|e| e.to_string())?;
                let b = oracle_check(&g, &f).map_err(|e| e.to_string())?;
                if a != b {
                    bad += 1;
                    println!("seed {s}: checker {a}, oracle {b}: {}", f.render(&Signature::of(&g)));
                }
            }
            println!("{count} instances from seed {seed}, {bad} disagreements");
            Ok(verdict_code(bad == 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
