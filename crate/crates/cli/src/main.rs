//! `ctrs`: command-line front end for conditional rewriting transformations.
//!
//! Exit status is 0 on success, 1 on domain errors and 2 on usage errors.

use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ctrs::classify::classify;
use ctrs::cp::critical_pairs;
use ctrs::engine::{build_universe, Bounds, Engine, EvState, Policy, Strategy, Universe, UniverseMode};
use ctrs::format::{emit_json, parse_file, parse_system, parse_term_in, render_map, render_system};
use ctrs::homo::{canonical_phi, check_simulation, det_transform, norm_transform, Construction};
use ctrs::lab::{search_unsoundness, soundness_condition_report, SearchConfig, TransformKind, TransformationHandle};
use ctrs::system::System;
use ctrs::term::Term;
use ctrs::unravel::{unravel_u, unravel_uj, unravel_un, unravel_uopt};

/// Writes a line to stdout, ignoring a closed pipe.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! outn {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "ctrs", version, about = "Transform, run and compare conditional term rewriting systems")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BoundArgs {
    /// Maximum rewrite steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Conditional evaluation level.
    #[arg(long)]
    level: Option<usize>,
    /// Maximum term size.
    #[arg(long)]
    size: Option<usize>,
    /// Depth of the universe used for unbound variables.
    #[arg(long)]
    ev_depth: Option<usize>,
}

impl BoundArgs {
    fn bounds(self) -> Bounds {
        let d = Bounds::default();
        Bounds {
            steps: self.steps.unwrap_or(d.steps),
            level: self.level.unwrap_or(d.level),
            term_size: self.size.unwrap_or(d.term_size),
            ev_depth: self.ev_depth.unwrap_or(d.ev_depth),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum UnravelMethod {
    U,
    Uopt,
    Uj,
    Un,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformMethod {
    Invert,
    Norm,
    Det,
    Sr,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Full,
    Li,
}

#[derive(Clone, Copy, ValueEnum)]
enum Restrict {
    None,
    Cs,
    Membership,
}

#[derive(Subcommand)]
enum Command {
    /// Syntactic properties of a system.
    Classify { file: PathBuf },
    /// Unravel a conditional system into an unconditional one.
    Unravel {
        #[arg(long, value_enum)]
        method: UnravelMethod,
        file: PathBuf,
    },
    /// Apply inversion, Norm, Det or the SR transformation.
    Transform {
        #[arg(long, value_enum)]
        method: TransformMethod,
        file: PathBuf,
    },
    /// Follow one reduction sequence from a term.
    Rewrite {
        file: PathBuf,
        #[arg(long)]
        term: String,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long, value_enum, default_value = "full")]
        strategy: StrategyArg,
        #[arg(long, value_enum, default_value = "none")]
        restrict: Restrict,
        /// Rewrite only at basic positions (unconditional systems).
        #[arg(long)]
        ev_safe: bool,
    },
    /// Decide bounded reachability between two terms.
    Reach {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// List critical pairs.
    Cp { file: PathBuf },
    /// Compare a system with the homomorphic image of another.
    CheckHomo {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        /// File holding a (MAP ...) block.
        #[arg(long, conflicts_with = "canonical", required_unless_present = "canonical")]
        phi: Option<PathBuf>,
        /// Named canonical construction, built from --source.
        #[arg(long, requires = "source")]
        canonical: Option<String>,
        /// The conditional system the canonical construction is built from.
        #[arg(long)]
        source: Option<PathBuf>,
        #[arg(long)]
        modulo_identity: bool,
    },
    /// Bounded search for soundness counterexamples.
    SearchUnsound {
        file: PathBuf,
        /// u, uopt, uj, un, un-norm, u-det or sr.
        #[arg(long)]
        method: String,
        /// Start terms; defaults to the ground terms of depth at most 1.
        #[arg(long = "start")]
        starts: Vec<String>,
        /// Restrict targets to these terms.
        #[arg(long = "target")]
        targets: Vec<String>,
        /// Constants outside the signature available to unbound variables.
        #[arg(long = "extra")]
        extra: Vec<String>,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long, value_enum, default_value = "none")]
        restrict: Restrict,
        #[arg(long)]
        ev_safe: bool,
    },
    /// Soundness condition report.
    Report { file: PathBuf },
    /// Run every acceptance check over the built-in corpus.
    CorpusVerify,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn color() -> bool {
    std::env::var("CTRS_COLOR").map_or(true, |v| v != "0") && std::io::stdout().is_terminal()
}

fn paint(text: &str, ok: bool) -> String {
    if color() {
        format!("\x1b[{}m{text}\x1b[0m", if ok { 32 } else { 31 })
    } else {
        text.to_string()
    }
}

fn load(path: &Path) -> Result<System> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_system(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Parses a term; variables are the system's declared ones.
fn term(text: &str, sys: &System) -> Result<Term> {
    parse_term_in(text, sys).with_context(|| format!("term {text}"))
}

fn policy(r: Restrict, s: StrategyArg, sys: &System) -> Policy {
    let p = match r {
        Restrict::None => Policy::full(),
        Restrict::Cs => Policy::u_context_sensitive(sys),
        Restrict::Membership => Policy::membership(),
    };
    match s {
        StrategyArg::Full => p,
        StrategyArg::Li => p.with_strategy(Strategy::LeftmostInnermost),
    }
}

fn print_system(sys: &System, json: bool) {
    if json {
        out!("{}", emit_json(&json!({ "system": render_system(sys), "rules": sys.rules })));
    } else {
        let text = render_system(sys);
        outn!("{text}{}", if text.ends_with('\n') { "" } else { "\n" });
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let json = cli.json;
    match &cli.command {
        Command::Classify { file } => {
            let rep = classify(&load(file)?);
            if json {
                out!("{}", emit_json(&rep));
            } else {
                let v = serde_json::to_value(&rep)?;
                for (k, x) in v.as_object().expect("report is an object") {
                    if k != "rules" {
                        out!("{k}: {x}");
                    }
                }
            }
        }
        Command::Unravel { method, file } => {
            let sys = load(file)?;
            let out = match method {
                UnravelMethod::U => unravel_u(&sys),
                UnravelMethod::Uopt => unravel_uopt(&sys),
                UnravelMethod::Uj => unravel_uj(&sys),
                UnravelMethod::Un => unravel_un(&sys),
            }?;
            print_system(&out, json);
        }
        Command::Transform { method, file } => {
            let sys = load(file)?;
            match method {
                TransformMethod::Invert => print_system(&sys.invert()?, json),
                TransformMethod::Norm => print_system(&norm_transform(&sys)?, json),
                TransformMethod::Det => print_system(&det_transform(&sys)?, json),
                TransformMethod::Sr => print_system(&ctrs::sr::sr_transform(&sys)?.0, json),
            }
        }
        Command::Rewrite { file, term: t, bounds, strategy, restrict, ev_safe } => {
            let sys = load(file)?;
            let t = term(t, &sys)?;
            let b = bounds.bounds();
            let universe = Universe::for_system(&sys, b.ev_depth, UniverseMode::Original, &[]);
            let mut eng = Engine::new(&sys, b, policy(*restrict, *strategy, &sys), universe);
            let mut steps = Vec::new();
            if *ev_safe {
                let mut st = EvState::initial(&t);
                while steps.len() < b.steps {
                    let Some((next, step)) = eng.ev_safe_successors(&st)?.into_iter().next() else { break };
                    st = next;
                    steps.push(step);
                }
            } else {
                let mut cur = t.clone();
                while steps.len() < b.steps {
                    let Some(step) = eng.successors(&cur).into_iter().next() else { break };
                    cur = step.result.clone();
                    steps.push(step);
                }
            }
            let end = steps.last().map_or(t.clone(), |s| s.result.clone());
            let normal = if *ev_safe {
                false
            } else {
                eng.successors(&end).is_empty()
            };
            if json {
                out!("{}", emit_json(&json!({ "start": t, "steps": steps, "end": end, "normal_form": normal })));
            } else {
                out!("{t}");
                for s in &steps {
                    out!("  -> {}   [{} at {}]", s.result, s.rule, s.pos);
                }
                if normal {
                    out!("normal form after {} steps", steps.len());
                } else {
                    out!("stopped after {} steps", steps.len());
                }
            }
        }
        Command::Reach { file, from, to, bounds } => {
            let sys = load(file)?;
            let (s, t) = (term(from, &sys)?, term(to, &sys)?);
            let b = bounds.bounds();
            let universe = Universe::for_system(&sys, b.ev_depth, UniverseMode::Original, &[]);
            let mut eng = Engine::new(&sys, b, Policy::full(), universe);
            let r = eng.reach_until(&s, &|u| *u == t);
            let d = r.derivation(&t);
            if json {
                out!(
                    "{}",
                    emit_json(&json!({ "reachable": d.is_some(), "steps": d.as_ref().map(|d| d.len()), "derivation": d, "truncated": r.truncated }))
                );
            } else {
                match d {
                    Some(d) => out!("reachable ({} step{})", d.len(), if d.len() == 1 { "" } else { "s" }),
                    None if r.truncated => out!("not reachable within bounds"),
                    None => out!("not reachable (closure exhausted)"),
                }
            }
        }
        Command::Cp { file } => {
            let cps = critical_pairs(&load(file)?);
            if json {
                out!("{}", emit_json(&cps));
            } else {
                for c in &cps {
                    let conds: Vec<String> = c.conds.iter().map(|x| format!("{} -> {}", x.lhs, x.rhs)).collect();
                    let guard = if conds.is_empty() { String::new() } else { format!(" | {}", conds.join(", ")) };
                    let tag = if c.trivial { "  (trivial)" } else { "" };
                    out!("{} / {} at {}: <{}, {}>{guard}{tag}", c.outer, c.inner, c.position, c.pair.0, c.pair.1);
                }
                out!("{} critical pairs", cps.len());
            }
        }
        Command::CheckHomo { lhs, rhs, phi, canonical, source, modulo_identity } => {
            let (l, r) = (load(lhs)?, load(rhs)?);
            let h = match (phi, canonical) {
                (Some(p), _) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    parse_file(&text)?.1.ok_or_else(|| anyhow!("{} has no MAP block", p.display()))?
                }
                (None, Some(name)) => {
                    let c = Construction::parse(name).ok_or_else(|| {
                        let names: Vec<_> = Construction::ALL.iter().map(|c| c.name()).collect();
                        anyhow!("unknown construction {name}; expected one of {}", names.join(", "))
                    })?;
                    let src = load(source.as_ref().expect("clap requires --source"))?;
                    canonical_phi(c, &src)?
                }
                (None, None) => bail!("either --phi or --canonical is required"),
            };
            let v = check_simulation(&l, &r, &h, *modulo_identity)?;
            if json {
                out!("{}", emit_json(&json!({ "verdict": v, "phi": render_map(&h) })));
            } else {
                out!("{}", if v.equal { "equal" } else { "not equal" });
                for m in &v.missing {
                    out!("  missing from image: {m}");
                }
                for m in &v.extra {
                    out!("  extra in image: {m}");
                }
                let f = &v.flags;
                out!(
                    "flags: linear={} non_erasing={} f_identical={} ev_preserving={}",
                    f.linear, f.non_erasing, f.f_identical, f.ev_preserving
                );
                if v.discarded_identity_rules > 0 {
                    out!("identity rules discarded: {}", v.discarded_identity_rules);
                }
            }
            if !v.equal {
                return Ok(ExitCode::from(1));
            }
        }
        Command::SearchUnsound { file, method, starts, targets, extra, bounds, restrict, ev_safe } => {
            let sys = load(file)?;
            let kind = TransformKind::parse(method).ok_or_else(|| anyhow!("unknown transformation {method}"))?;
            let h = TransformationHandle::build(kind, &sys)?;
            let mut ground = sys.clone();
            ground.vars.clear();
            let starts: Vec<Term> = if starts.is_empty() {
                build_universe(&sys.sig(), 1, UniverseMode::Original, &[]).into_iter().filter(|t| t.depth() <= 1).collect()
            } else {
                starts.iter().map(|s| term(s, &ground)).collect::<Result<_>>()?
            };
            let cfg = SearchConfig {
                bounds: bounds.bounds(),
                policy: policy(*restrict, StrategyArg::Full, &h.system),
                ev_safe: *ev_safe,
                extra_constants: extra.iter().map(|c| Term::constant(c)).collect(),
                targets: targets.iter().map(|s| term(s, &ground)).collect::<Result<_>>()?,
                ..SearchConfig::default()
            };
            let v = search_unsoundness(&h, &starts, &cfg)?;
            if json {
                out!("{}", emit_json(&v));
            } else {
                out!("{}", v.status.as_str());
                if let Some(c) = &v.counterexample {
                    out!("{} ->* {} in {}, not in the original system", c.start, c.target, v.transformation);
                    out!("witness ({} steps):", c.witness.len());
                    out!("  {}", c.witness.start);
                    for s in &c.witness.steps {
                        out!("  -> {}   [{} at {}]", s.result, s.rule, s.pos);
                    }
                    out!("original closure: {} terms, exhaustive", c.absence.closure.len());
                }
                out!("starts: {}, candidates: {}", v.starts, v.candidates);
                for (s, t) in &v.unconfirmed {
                    out!("unconfirmed: {s} ->* {t}");
                }
            }
        }
        Command::Report { file } => {
            let rep = soundness_condition_report(&load(file)?);
            if json {
                out!("{}", emit_json(&rep));
            } else {
                if let Some(r) = &rep.registry {
                    out!("registry: {r}");
                }
                for (t, ids) in &rep.applies {
                    out!("{t}: sound by {}", if ids.is_empty() { "none".to_string() } else { ids.join(", ") });
                }
                for (t, ids) in &rep.insufficient_matches {
                    if !ids.is_empty() {
                        out!("{t}: insufficient conditions met {}", ids.join(", "));
                    }
                }
                for row in &rep.rows {
                    out!("  {:<32} {:?} {:?}", row.id, row.kind, row.status);
                }
                let cp = &rep.critical_pairs;
                out!(
                    "critical pairs: {} total, {} unconditional, {} joinable within bounds",
                    cp.total, cp.unconditional, cp.joinable_within_bounds
                );
            }
        }
        Command::CorpusVerify => {
            let results = ctrs::suite::run_all(&mut |r| {
                if !json {
                    let line = r.line();
                    let (tag, rest) = line.split_at(4);
                    out!("{}{rest}", paint(tag, r.pass));
                    for f in &r.failures {
                        out!("    {f}");
                    }
                }
            });
            if json {
                out!("{}", emit_json(&results));
            }
            if results.iter().any(|r| !r.pass) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
