//! `ghybrid`: bounded reasoning over guarded hybrid knowledge bases.

mod output;

use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ghybrid::asp::{SearchConfig, SearchResult};
use ghybrid::dl::normalize_kb;
use ghybrid::hybrid::{
    backward_construction, cross_check, for_each_hybrid_model, hybrid_satisfiable_direct,
    hybrid_satisfiable_translated, is_hybrid_model, random_kb, random_target, target_holds, translate,
    HybridInterpretation, HybridKb, RandomKbParams, Target, TranslatedProblem,
};
use ghybrid::syntax::{parse_concept, parse_hybrid, parse_model, parse_rule};
use ghybrid::Error;

use output::{Format, Out};

#[derive(Parser)]
#[command(
    name = "ghybrid",
    version,
    about = "Bounded reasoning over guarded hybrid knowledge bases"
)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Output format; `structured` prints one JSON record per line.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Smallest domain size to try.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..), global = true)]
    k_min: u32,
    /// Largest domain size to try.
    #[arg(long = "k", default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..), global = true)]
    k_max: u32,
    /// Maximum number of ground rule instances per domain size.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    grounding_cap: u64,
    /// Maximum Herbrand base for brute-force answer-set enumeration.
    #[arg(long, default_value_t = 22, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    base_cap: u64,
    /// Maximum number of candidate DL interpretations per domain and sigma.
    #[arg(long, default_value_t = 100_000_000, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    extension_cap: u64,
    /// Fix every top relation to the full power of the domain.
    #[arg(long, global = true)]
    full_top: bool,
    /// Only try constant maps up to renaming of the anonymous domain.
    #[arg(long, global = true)]
    symmetry: bool,
    /// Leave timings out so identical runs print identical bytes.
    #[arg(long, global = true)]
    deterministic: bool,
}

impl RunArgs {
    fn config(&self) -> anyhow::Result<SearchConfig> {
        if self.k_min > self.k_max {
            return Err(Usage(format!("--k-min {} exceeds --k {}", self.k_min, self.k_max)).into());
        }
        Ok(SearchConfig {
            k_min: self.k_min as usize,
            k_max: self.k_max as usize,
            grounding_cap: self.grounding_cap,
            base_cap: self.base_cap as usize,
            extension_cap: self.extension_cap,
            full_top: self.full_top,
            symmetry: self.symmetry,
        })
    }
}

#[derive(Args, Default)]
#[group(multiple = false)]
struct TargetArgs {
    /// Target predicate: a concept or role name, or a program predicate.
    #[arg(long)]
    pred: Option<String>,
    /// Target concept expression, e.g. `some(1, and(drinks, sel(3/3, one(wine))))`.
    #[arg(long)]
    concept: Option<String>,
    /// Target ground atom, e.g. `problemDrinker(john)`.
    #[arg(long)]
    atom: Option<String>,
}

impl TargetArgs {
    fn resolve(&self, kb: &HybridKb) -> anyhow::Result<Option<Target>> {
        Ok(if let Some(p) = &self.pred {
            Some(Target::Predicate(p.clone()))
        } else if let Some(c) = &self.concept {
            Some(Target::Concept(parse_concept(c, &kb.dl).context("in --concept")?))
        } else if let Some(a) = &self.atom {
            let rule = parse_rule(&format!("{}.", a.trim_end_matches('.'))).context("in --atom")?;
            match rule.head() {
                [l] if !l.negated && rule.body().is_empty() => Some(Target::Atom(l.atom.clone())),
                _ => return Err(Usage(format!("--atom expects a single atom, got `{a}`")).into()),
            }
        } else {
            None
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    /// Search hybrid models directly.
    Direct,
    /// Search open answer sets of the translated program.
    Translated,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a KB and report guardedness; exits 0 iff clean.
    Check { kb: PathBuf },
    /// Print the translation of the DL part as a program.
    Translate {
        kb: PathBuf,
        /// Append the rules of the KB itself.
        #[arg(long)]
        with_program: bool,
    },
    /// Bounded satisfiability of a program or hybrid KB (a file or inline text).
    Solve {
        input: String,
        #[command(flatten)]
        target: TargetArgs,
        /// List every model up to the bound instead of the first witness.
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = Route::Direct)]
        route: Route,
    },
    /// Stream hybrid models up to the bound.
    Models {
        kb: PathBuf,
        /// Stop after this many models.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Check a candidate model given as a model file.
    Verify { kb: PathBuf, model: PathBuf },
    /// Compare the direct and translated routes at every domain size.
    Crosscheck {
        /// KB to check; omit with --random.
        kb: Option<PathBuf>,
        #[command(flatten)]
        target: TargetArgs,
        /// Check this many generated KBs instead.
        #[arg(long)]
        random: Option<u64>,
        /// First seed for --random.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Input or usage problems: exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())).into())
}

fn load_text(src: &str, origin: &str) -> anyhow::Result<HybridKb> {
    let (dl, program) = parse_hybrid(src).with_context(|| origin.to_owned())?;
    HybridKb::new(dl, program).with_context(|| origin.to_owned())
}

fn load(path: &Path) -> anyhow::Result<HybridKb> {
    load_text(&read(path)?, &path.display().to_string())
}

/// `solve` takes a file name or the program text itself.
fn load_input(input: &str) -> anyhow::Result<HybridKb> {
    let path = Path::new(input);
    if path.exists() || !input.trim_end().ends_with('.') {
        load(path)
    } else {
        load_text(input, "<inline>")
    }
}

fn found(n: usize) -> ExitCode {
    if n > 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli, out: &mut Out) -> anyhow::Result<ExitCode> {
    let cfg = cli.run.config()?;
    match cli.command {
        Command::Check { kb } => {
            let kb = load(&kb)?;
            let report = kb.check();
            out.check(&kb, &report);
            Ok(found(report.is_clean() as usize))
        }
        Command::Translate { kb, with_program } => {
            let kb = load(&kb)?;
            let mut p = translate(&normalize_kb(&kb.dl))?;
            if with_program {
                p.extend(kb.program.clone());
            }
            out.program(&p);
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            input,
            target,
            all,
            route,
        } => {
            let kb = load_input(&input)?;
            let target = target.resolve(&kb)?;
            if all {
                if matches!(route, Route::Translated) {
                    return Err(Usage("--all enumerates hybrid models on the direct route".into()).into());
                }
                let mut n = 0;
                let mut err = None;
                let _ = for_each_hybrid_model(&kb, &cfg, |h| {
                    match target.as_ref().map(|t| target_holds(&kb, t, h)).unwrap_or(Ok(true)) {
                        Ok(true) => {
                            n += 1;
                            out.model(h);
                        }
                        Ok(false) => {}
                        Err(e) => {
                            err = Some(e);
                            return ControlFlow::Break(());
                        }
                    }
                    ControlFlow::Continue(())
                })?;
                if let Some(e) = err {
                    return Err(e.into());
                }
                out.summary("models", n, None, cfg.k_max);
                return Ok(found(n));
            }
            let result = match (target, route) {
                (None, Route::Direct) => {
                    let mut first = None;
                    let _ = for_each_hybrid_model(&kb, &cfg, |h| {
                        first = Some(h.clone());
                        ControlFlow::Break(())
                    })?;
                    match first {
                        Some(h) => SearchResult::Satisfiable {
                            k: h.pre.domain.len(),
                            witness: h,
                        },
                        None => SearchResult::ExhaustedUpTo(cfg.k_max),
                    }
                }
                (None, Route::Translated) => {
                    return Err(Usage("the translated route needs --pred, --concept or --atom".into()).into())
                }
                (Some(t), Route::Direct) => hybrid_satisfiable_direct(&kb, &t, &cfg)?,
                (Some(t), Route::Translated) => {
                    let problem = TranslatedProblem::new(&kb, &t)?;
                    match hybrid_satisfiable_translated(&kb, &t, &cfg)? {
                        SearchResult::Satisfiable { k, witness } => {
                            let mut h = backward_construction(&kb, &problem, &witness)?;
                            h.model
                                .retain(|a| a.pred.name().is_some_and(|p| kb.program.predicates().contains_key(p)));
                            SearchResult::Satisfiable { k, witness: h }
                        }
                        SearchResult::ExhaustedUpTo(k) => SearchResult::ExhaustedUpTo(k),
                    }
                }
            };
            out.result(&result);
            Ok(found(result.is_satisfiable() as usize))
        }
        Command::Models { kb, limit } => {
            let kb = load(&kb)?;
            let mut n = 0;
            let _ = for_each_hybrid_model(&kb, &cfg, |h| {
                if limit.is_some_and(|l| n >= l) {
                    return ControlFlow::Break(());
                }
                n += 1;
                out.model(h);
                ControlFlow::Continue(())
            })?;
            out.summary("models", n, None, cfg.k_max);
            Ok(found(n))
        }
        Command::Verify { kb, model } => {
            let kb = load(&kb)?;
            let file = parse_model(&read(&model)?).with_context(|| model.display().to_string())?;
            let h = HybridInterpretation::from_model_file(&kb, &file)?;
            let report = is_hybrid_model(&kb, &h)?;
            out.verdict(&kb, &h, &report);
            Ok(found(report.is_model() as usize))
        }
        Command::Crosscheck {
            kb,
            target,
            random,
            seed,
        } => {
            let cases: Vec<(String, HybridKb, Target)> = match (kb, random) {
                (Some(path), None) => {
                    let kb = load(&path)?;
                    let t = target
                        .resolve(&kb)?
                        .ok_or_else(|| Usage("crosscheck needs --pred, --concept or --atom".into()))?;
                    vec![(path.display().to_string(), kb, t)]
                }
                (None, Some(count)) => (seed..seed + count)
                    .map(|s| {
                        let kb = random_kb(s, &RandomKbParams::default());
                        let t = target.resolve(&kb)?.unwrap_or_else(|| random_target(&kb, s));
                        Ok((format!("seed {s}"), kb, t))
                    })
                    .collect::<anyhow::Result<_>>()?,
                _ => return Err(Usage("crosscheck takes either a KB file or --random N".into()).into()),
            };
            let mut agreeing = 0;
            for (name, kb, t) in &cases {
                let report = cross_check(kb, t, &cfg)?;
                agreeing += report.ok() as usize;
                out.crosscheck(name, t, &report);
            }
            out.summary("agreeing", agreeing, Some(cases.len()), cfg.k_max);
            Ok(found((agreeing == cases.len()) as usize))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::GroundingCap { .. } | Error::BaseCap { .. } | Error::ExtensionCap { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Out::new(cli.run.format, cli.run.deterministic);
    let start = Instant::now();
    match run(cli, &mut out) {
        Ok(code) => {
            out.finish(start.elapsed());
            code
        }
        Err(e) => {
            let code = exit_code(&e);
            out.error(&e, code);
            ExitCode::from(code)
        }
    }
}
