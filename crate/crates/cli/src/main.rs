use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pcmax::bounds::compute_bounds;
use pcmax::budget::Budget;
use pcmax::instance::validate_schedule;
use pcmax::solver::{CdsmSolver, Preset};
use pcmax_cli::batch::{
    evaluate_instance, run_batch, write_csv, write_json_lines, RowStatus, RunOptions,
};
use pcmax_cli::format::{parse_assignment, parse_instance, serialize_instance, ParsedInstance};
use pcmax_cli::planted::{generate_planted, PlantedParams, Ratio, SWEEP_RATIOS};

/// Exact makespan minimization on identical machines.
#[derive(Parser)]
#[command(name = "pcmax", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound an instance and, unless the bounds already close it, solve it
    /// exactly; prints one report row.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        run: RunFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Run only the bounding pipeline and print the bounds found.
    Bounds {
        file: PathBuf,
        #[command(flatten)]
        run: RunFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Generate benchmark instances.
    Generate {
        #[command(subcommand)]
        what: GenerateCommand,
    },
    /// Check an assignment file against an instance file.
    Verify {
        file: PathBuf,
        /// Assignment file: one 1-based machine index per job, in the
        /// instance file's job order.
        #[arg(long)]
        assignment: PathBuf,
        /// Makespan bound to check feasibility against.
        #[arg(long)]
        u: Option<u64>,
    },
    /// Evaluate many instance files and emit a report.
    Batch {
        /// Instance files; `*` and `?` in the final path component expand.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
        #[command(flatten)]
        output: OutputFlags,
        /// Worker threads (1 preserves timing fidelity).
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write the report here instead of stdout.
        #[arg(short, long)]
        output_file: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// One planted instance with a known construction optimum.
    Planted {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        u: u64,
        /// Fraction of jobs whose duration is incremented by one.
        #[arg(long, default_value = "0")]
        r: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// A family of planted instances over job-to-machine ratios
    /// 2, 2.5, ..., 5; one file per parameter combination.
    Sweep {
        /// Machine counts (repeatable).
        #[arg(long, required = true, num_args = 1..)]
        m: Vec<usize>,
        #[arg(long)]
        u: u64,
        /// Increment ratios (repeatable).
        #[arg(long, num_args = 1.., default_values = ["0", "0.01", "0.05", "0.1"])]
        r: Vec<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct RunFlags {
    /// Rule set for the exact search.
    #[arg(long, value_enum, default_value_t = PresetArg::Cdsm)]
    config: PresetArg,
    /// Exact-search budget in seconds.
    #[arg(long, default_value_t = 500.0)]
    timeout: f64,
    /// Bounding-pipeline budget in seconds.
    #[arg(long, default_value_t = 10.0)]
    bounds_timeout: f64,
    /// Seed for the stochastic bounding stages.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct OutputFlags {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Include the schedule (1-based machine per job, input order).
    #[arg(long)]
    witness: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PresetArg {
    Base,
    R5,
    R6,
    Fur,
    Irr,
    Cdsm,
}

impl PresetArg {
    fn preset(self) -> Preset {
        match self {
            PresetArg::Base => Preset::Base,
            PresetArg::R5 => Preset::R5,
            PresetArg::R6 => Preset::R6,
            PresetArg::Fur => Preset::Fur,
            PresetArg::Irr => Preset::Irr,
            PresetArg::Cdsm => Preset::Cdsm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Failure with the process exit code it maps to: 1 usage, 2 I/O or parse,
/// 3 internal.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

/// Writes a line to stdout, mapping write failures (e.g. closed pipes) to a
/// clean internal-error exit instead of a panic.
fn emit(line: std::fmt::Arguments<'_>) -> CliResult<()> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_fmt(line)
        .and_then(|_| stdout.write_all(b"\n"))
        .or_code(3)
}

type CliResult<T> = Result<T, Failure>;

trait IntoFailure<T> {
    fn or_code(self, code: u8) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> IntoFailure<T> for Result<T, E> {
    fn or_code(self, code: u8) -> CliResult<T> {
        self.map_err(|e| Failure {
            code,
            error: e.into(),
        })
    }
}

impl RunFlags {
    fn options(&self, witness: bool) -> RunOptions {
        RunOptions {
            preset: self.config.preset(),
            solve_budget: Budget::Time(Duration::from_secs_f64(self.timeout)),
            bounds_budget: Budget::Time(Duration::from_secs_f64(self.bounds_timeout)),
            seed: self.seed,
            witness,
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => {
            let code = match error.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = error.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}

fn load_instance(path: &Path) -> CliResult<ParsedInstance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .or_code(2)?;
    parse_instance(&text)
        .map_err(|e| anyhow!("{}: {e}", path.display()))
        .or_code(2)
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Solve { file, run, output } => {
            let parsed = load_instance(&file)?;
            let options = run.options(output.witness);
            let row = evaluate_instance(&file.display().to_string(), &parsed, &options);
            let rows = [row];
            let stdout = std::io::stdout().lock();
            match output.format {
                Format::Csv => write_csv(&rows, output.witness, stdout),
                Format::Json => write_json_lines(&rows, output.witness, stdout),
            }
            .or_code(3)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bounds { file, run, output } => {
            let parsed = load_instance(&file)?;
            let solver = CdsmSolver {
                config: run.config.preset().config(),
            };
            let budget = Budget::Time(Duration::from_secs_f64(run.bounds_timeout));
            let bounds = compute_bounds(&parsed.instance, budget, run.seed, Some(&solver));
            let witness = output.witness.then(|| {
                bounds.witness.as_ref().map(|s| {
                    parsed
                        .assignment_in_input_order(s.assignment())
                        .iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join(" ")
                })
            });
            match output.format {
                Format::Csv => {
                    let mut header = "path,n,m,L,U".to_string();
                    let mut record = format!(
                        "{},{},{},{},{}",
                        file.display(),
                        parsed.instance.jobs(),
                        parsed.instance.machines(),
                        bounds.lower,
                        bounds.upper
                    );
                    if let Some(w) = witness {
                        header.push_str(",witness");
                        record.push_str(&format!(",\"{}\"", w.unwrap_or_default()));
                    }
                    emit(format_args!("{header}\n{record}"))?;
                }
                Format::Json => {
                    let mut value = serde_json::json!({
                        "path": file.display().to_string(),
                        "n": parsed.instance.jobs(),
                        "m": parsed.instance.machines(),
                        "L": bounds.lower,
                        "U": bounds.upper,
                    });
                    if let Some(w) = witness {
                        value["witness"] = serde_json::json!(w);
                    }
                    emit(format_args!("{value}"))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Generate { what } => generate(what),
        Command::Verify {
            file,
            assignment,
            u,
        } => {
            let parsed = load_instance(&file)?;
            let text = std::fs::read_to_string(&assignment)
                .with_context(|| format!("reading {}", assignment.display()))
                .or_code(2)?;
            let input_order = parse_assignment(&text, parsed.instance.jobs())
                .map_err(|e| anyhow!("{}: {e}", assignment.display()))
                .or_code(2)?;
            let sorted = parsed
                .assignment_in_sorted_order(&input_order)
                .map_err(|e| anyhow!("{e}"))
                .or_code(2)?;
            let report = validate_schedule(&parsed.instance, &sorted, u)
                .map_err(|e| anyhow!("{e}"))
                .or_code(2)?;
            emit(format_args!("makespan {}", report.makespan))?;
            let loads = report
                .loads
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(" ");
            emit(format_args!("loads {loads}"))?;
            if let Some(feasible) = report.feasible {
                emit(format_args!("feasible {feasible}"))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Batch {
            files,
            run,
            output,
            jobs,
            output_file,
        } => {
            let paths = expand_patterns(&files);
            let options = run.options(output.witness);
            let rows = run_batch(&paths, &options, jobs);
            for row in rows.iter().filter(|r| r.status == RowStatus::Error) {
                eprintln!(
                    "error: {}: {}",
                    row.path,
                    row.error.as_deref().unwrap_or("unknown")
                );
            }
            let result = match &output_file {
                Some(path) => {
                    let file = std::fs::File::create(path)
                        .with_context(|| format!("creating {}", path.display()))
                        .or_code(2)?;
                    match output.format {
                        Format::Csv => write_csv(&rows, output.witness, file),
                        Format::Json => write_json_lines(&rows, output.witness, file),
                    }
                }
                None => {
                    let stdout = std::io::stdout().lock();
                    match output.format {
                        Format::Csv => write_csv(&rows, output.witness, stdout),
                        Format::Json => write_json_lines(&rows, output.witness, stdout),
                    }
                }
            };
            result.or_code(3)?;
            let all_ok = rows.iter().all(|r| r.status != RowStatus::Error);
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
    }
}

fn generate(what: GenerateCommand) -> CliResult<ExitCode> {
    match what {
        GenerateCommand::Planted {
            n,
            m,
            u,
            r,
            seed,
            output,
        } => {
            let ratio = Ratio::parse(&r).map_err(|e| anyhow!("--r {r}: {e}")).or_code(1)?;
            let params = PlantedParams {
                jobs: n,
                machines: m,
                optimum: u,
                increment_ratio: ratio,
                seed,
            };
            let instance = generate_planted(&params).map_err(anyhow::Error::from).or_code(1)?;
            let text = serialize_instance(&instance);
            match output {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))
                    .or_code(2)?,
                None => emit(format_args!("{}", text.trim_end()))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        GenerateCommand::Sweep {
            m,
            u,
            r,
            seed,
            out_dir,
        } => {
            let ratios: Vec<Ratio> = r
                .iter()
                .map(|text| Ratio::parse(text).map_err(|e| anyhow!("--r {text}: {e}")))
                .collect::<Result<_, _>>()
                .or_code(1)?;
            std::fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))
                .or_code(2)?;
            let mut combo = 0u64;
            for &machines in &m {
                for &(num, den) in SWEEP_RATIOS.iter() {
                    // Round the job count to the nearest integer, halves up.
                    let jobs = ((machines as u64 * num * 2 + den) / (2 * den)) as usize;
                    for &ratio in &ratios {
                        let params = PlantedParams {
                            jobs,
                            machines,
                            optimum: u,
                            increment_ratio: ratio,
                            seed: seed.wrapping_add(combo),
                        };
                        combo += 1;
                        let instance =
                            generate_planted(&params).map_err(anyhow::Error::from).or_code(1)?;
                        let name = format!(
                            "planted_n{}_m{}_u{}_r{}_seed{}.txt",
                            jobs, machines, u, ratio, params.seed
                        );
                        let path = out_dir.join(name);
                        std::fs::write(&path, serialize_instance(&instance))
                            .with_context(|| format!("writing {}", path.display()))
                            .or_code(2)?;
                        emit(format_args!("{}", path.display()))?;
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Expands `*`/`?` in final path components; non-patterns and unmatched
/// patterns pass through verbatim.
fn expand_patterns(paths: &[PathBuf]) -> Vec<PathBuf> {
    let mut expanded = Vec::new();
    for path in paths {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if !name.contains(['*', '?']) {
            expanded.push(path.clone());
            continue;
        }
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut matches: Vec<PathBuf> = std::fs::read_dir(&dir)
            .into_iter()
            .flatten()
            .flatten()
            .filter(|entry| {
                entry
                    .file_name()
                    .to_str()
                    .is_some_and(|f| wildcard_match(name, f))
            })
            .map(|entry| entry.path())
            .collect();
        matches.sort();
        if matches.is_empty() {
            expanded.push(path.clone());
        } else {
            expanded.extend(matches);
        }
    }
    expanded
}

fn wildcard_match(pattern: &str, text: &str) -> bool {
    let pattern: Vec<char> = pattern.chars().collect();
    let text: Vec<char> = text.chars().collect();
    fn rec(p: &[char], t: &[char]) -> bool {
        match p.first() {
            None => t.is_empty(),
            Some('*') => rec(&p[1..], t) || (!t.is_empty() && rec(p, &t[1..])),
            Some('?') => !t.is_empty() && rec(&p[1..], &t[1..]),
            Some(&c) => t.first() == Some(&c) && rec(&p[1..], &t[1..]),
        }
    }
    rec(&pattern, &text)
}
