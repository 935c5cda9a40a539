//! Batch evaluation: per-instance bounding + solving with report rows.

use std::io::{self, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use pcmax::bounds::compute_bounds;
use pcmax::budget::Budget;
use pcmax::solver::{solve_optimal, CdsmSolver, Preset, SolveStatus};
use serde_json::json;

use crate::format::{parse_instance, ParsedInstance};

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub preset: Preset,
    pub solve_budget: Budget,
    pub bounds_budget: Budget,
    pub seed: u64,
    pub witness: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    ClosedByBounds,
    Optimal,
    Timeout,
    Error,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::ClosedByBounds => "closed-by-bounds",
            RowStatus::Optimal => "optimal",
            RowStatus::Timeout => "timeout",
            RowStatus::Error => "error",
        }
    }
}

/// One report row; numeric fields are absent on error rows.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub path: String,
    pub jobs: Option<usize>,
    pub machines: Option<usize>,
    pub lower: Option<u64>,
    pub upper_initial: Option<u64>,
    pub status: RowStatus,
    pub optimum: Option<u64>,
    pub wall_time_ms: u64,
    pub explored_nodes: Option<u64>,
    pub st_hits: Option<u64>,
    pub config: String,
    pub witness: Option<String>,
    pub error: Option<String>,
}

/// Bounds then (only if needed) the exact search, mirroring how a single
/// `solve` invocation treats one file.
pub fn evaluate_instance(
    label: &str,
    parsed: &ParsedInstance,
    options: &RunOptions,
) -> ReportRow {
    let started = Instant::now();
    let instance = &parsed.instance;
    let solver = CdsmSolver {
        config: options.preset.config(),
    };
    let bounds = compute_bounds(instance, options.bounds_budget, options.seed, Some(&solver));

    let mut row = ReportRow {
        path: label.to_string(),
        jobs: Some(instance.jobs()),
        machines: Some(instance.machines()),
        lower: Some(bounds.lower),
        upper_initial: Some(bounds.upper),
        status: RowStatus::Error,
        optimum: None,
        wall_time_ms: 0,
        explored_nodes: Some(0),
        st_hits: Some(0),
        config: options.preset.name().to_string(),
        witness: None,
        error: None,
    };

    let schedule = if bounds.tight() {
        row.status = RowStatus::ClosedByBounds;
        row.optimum = Some(bounds.lower);
        bounds.witness.clone()
    } else {
        let config = options.preset.config().with_budget(options.solve_budget);
        let result = solve_optimal(instance, &bounds, &config);
        row.explored_nodes = Some(result.stats.explored_nodes);
        row.st_hits = Some(result.stats.memo_hits);
        match result.status {
            SolveStatus::Optimal => {
                row.status = RowStatus::Optimal;
                row.optimum = Some(result.makespan);
            }
            SolveStatus::Timeout => row.status = RowStatus::Timeout,
        }
        Some(result.schedule)
    };
    if options.witness {
        row.witness = schedule.map(|s| {
            parsed
                .assignment_in_input_order(s.assignment())
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        });
    }
    row.wall_time_ms = started.elapsed().as_millis() as u64;
    row
}

/// Reads and evaluates one file; failures become error rows.
pub fn evaluate_file(path: &Path, options: &RunOptions) -> ReportRow {
    let label = path.display().to_string();
    let started = Instant::now();
    let outcome = std::fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|text| parse_instance(&text).map_err(|e| e.to_string()));
    match outcome {
        Ok(parsed) => evaluate_instance(&label, &parsed, options),
        Err(message) => ReportRow {
            path: label,
            jobs: None,
            machines: None,
            lower: None,
            upper_initial: None,
            status: RowStatus::Error,
            optimum: None,
            wall_time_ms: started.elapsed().as_millis() as u64,
            explored_nodes: None,
            st_hits: None,
            config: options.preset.name().to_string(),
            witness: None,
            error: Some(message),
        },
    }
}

/// Evaluates the files on a pool of `workers` threads; rows come back in
/// input order regardless of completion order.
pub fn run_batch(paths: &[std::path::PathBuf], options: &RunOptions, workers: usize) -> Vec<ReportRow> {
    let results: Vec<Mutex<Option<ReportRow>>> =
        paths.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers.max(1).min(paths.len().max(1)) {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= paths.len() {
                    break;
                }
                let row = evaluate_file(&paths[index], options);
                *results[index].lock().unwrap() = Some(row);
            });
        }
    });
    results
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("every slot is filled"))
        .collect()
}

/// Fixed column order of the CSV report.
pub fn csv_header(with_witness: bool) -> Vec<&'static str> {
    let mut header = vec![
        "path",
        "n",
        "m",
        "L",
        "U_initial",
        "status",
        "optimum",
        "wall_time_ms",
        "explored_nodes",
        "st_hits",
        "config",
    ];
    if with_witness {
        header.push("witness");
    }
    header
}

fn opt_string<T: ToString>(value: &Option<T>) -> String {
    value.as_ref().map(T::to_string).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[ReportRow], with_witness: bool, out: W) -> io::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(csv_header(with_witness))?;
    for row in rows {
        let mut record = vec![
            row.path.clone(),
            opt_string(&row.jobs),
            opt_string(&row.machines),
            opt_string(&row.lower),
            opt_string(&row.upper_initial),
            row.status.as_str().to_string(),
            opt_string(&row.optimum),
            row.wall_time_ms.to_string(),
            opt_string(&row.explored_nodes),
            opt_string(&row.st_hits),
            row.config.clone(),
        ];
        if with_witness {
            record.push(row.witness.clone().unwrap_or_default());
        }
        writer.write_record(&record)?;
    }
    writer.flush()
}

pub fn write_json_lines<W: Write>(
    rows: &[ReportRow],
    with_witness: bool,
    mut out: W,
) -> io::Result<()> {
    for row in rows {
        let mut value = json!({
            "path": row.path,
            "n": row.jobs,
            "m": row.machines,
            "L": row.lower,
            "U_initial": row.upper_initial,
            "status": row.status.as_str(),
            "optimum": row.optimum,
            "wall_time_ms": row.wall_time_ms,
            "explored_nodes": row.explored_nodes,
            "st_hits": row.st_hits,
            "config": row.config,
        });
        if with_witness {
            value["witness"] = json!(row.witness);
        }
        if let Some(error) = &row.error {
            value["error"] = json!(error);
        }
        writeln!(out, "{value}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    fn options() -> RunOptions {
        RunOptions {
            preset: Preset::Cdsm,
            solve_budget: Budget::Time(Duration::from_secs(5)),
            bounds_budget: Budget::Units(2_000),
            seed: 3,
            witness: true,
        }
    }

    #[test]
    fn tight_instances_close_without_search() {
        let parsed = parse_instance("7 3\n5 5 4 4 3 3 3\n").unwrap();
        let row = evaluate_instance("classic", &parsed, &options());
        assert_eq!(row.status, RowStatus::ClosedByBounds);
        assert_eq!(row.optimum, Some(9));
        assert_eq!(row.explored_nodes, Some(0));
        assert!(row.witness.is_some());
    }

    #[test]
    fn zero_solve_budget_times_out_on_open_instances() {
        // With both budgets at zero only the cheap bounds run (9 and 10
        // here), and the search cannot even start.
        let parsed = parse_instance("5 2\n4 4 4 3 3\n").unwrap();
        let mut opts = options();
        opts.solve_budget = Budget::Units(0);
        opts.bounds_budget = Budget::Units(0);
        let row = evaluate_instance("gap", &parsed, &opts);
        assert_eq!(row.status, RowStatus::Timeout);
        assert_eq!(row.optimum, None);
    }

    #[test]
    fn missing_files_become_error_rows() {
        let row = evaluate_file(Path::new("does/not/exist.txt"), &options());
        assert_eq!(row.status, RowStatus::Error);
        assert!(row.error.is_some());
    }

    #[test]
    fn csv_report_has_the_fixed_schema() {
        let parsed = parse_instance("2 2\n3 4\n").unwrap();
        let row = evaluate_instance("tiny", &parsed, &options());
        let mut out = Vec::new();
        write_csv(std::slice::from_ref(&row), false, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "path,n,m,L,U_initial,status,optimum,wall_time_ms,explored_nodes,st_hits,config"
        );
        assert!(lines.next().unwrap().starts_with("tiny,2,2,4,4,closed-by-bounds,4,"));
    }

    #[test]
    fn json_lines_are_parseable() {
        let parsed = parse_instance("2 2\n3 4\n").unwrap();
        let row = evaluate_instance("tiny", &parsed, &options());
        let mut out = Vec::new();
        write_json_lines(std::slice::from_ref(&row), true, &mut out).unwrap();
        let value: serde_json::Value =
            serde_json::from_str(String::from_utf8(out).unwrap().trim()).unwrap();
        assert_eq!(value["status"], "closed-by-bounds");
        assert_eq!(value["optimum"], 4);
        assert_eq!(value["witness"].as_str().unwrap().split(' ').count(), 2);
    }
}
