//! Command-line surface: build templates, compile and verify networks,
//! measure fault distance, run campaigns, and fit results.

use blocks::analysis;
use blocks::blocks::{build_block, compile, build_template};
use blocks::config::CampaignConfig;
use blocks::distance::block_distance;
use blocks::engine::{csv_row, parse_csv_row, run_point, TrialStats, CSV_HEADER};
use blocks::graph::dump_graph;
use blocks::template::BlockKind;
use blocks::verify;
use clap::{Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_VALIDATION: u8 = 2;
const EXIT_RUNTIME: u8 = 1;

#[derive(Parser)]
#[command(name = "blocks", about = "fault-tolerant logical block construction and simulation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FitMode {
    Decay,
    Threshold,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a block template and write it to a file.
    Build {
        #[arg(long)]
        kind: String,
        #[arg(long, short = 'd')]
        distance: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compile a template file to a syndrome-graph listing.
    Compile {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check every compiled check and membrane algebraically.
    Verify {
        #[arg(long)]
        kind: String,
        #[arg(long, short = 'd')]
        distance: u32,
    },
    /// Print the fault distance of a block.
    Distance {
        #[arg(long)]
        kind: String,
        #[arg(long, short = 'd')]
        distance: u32,
    },
    /// Run a Monte Carlo campaign from a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Fit decay curves or estimate a threshold from a results CSV.
    Fit {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, value_enum)]
        mode: FitMode,
    },
    /// Emit a plot-ready long-format table from a results CSV.
    Report {
        #[arg(long)]
        results: PathBuf,
    },
}

fn parse_kind(s: &str) -> Result<BlockKind, String> {
    s.parse()
}

fn load_results(path: &PathBuf) -> Result<Vec<TrialStats>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 && line == CSV_HEADER {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_csv_row(line).ok_or(format!("bad CSV row {}: {line}", i + 1))?);
    }
    Ok(out)
}

fn run() -> Result<(), (u8, String)> {
    let cli = Cli::parse();
    let validation = |e: String| (EXIT_VALIDATION, e);
    let runtime = |e: String| (EXIT_RUNTIME, e);
    match cli.cmd {
        Cmd::Build { kind, distance, out } => {
            let kind = parse_kind(&kind).map_err(validation)?;
            let t = build_template(kind, distance).map_err(|e| validation(e.to_string()))?;
            t.validate().map_err(|e| validation(e.to_string()))?;
            std::fs::write(&out, blocks::template::export_template(&t))
                .map_err(|e| runtime(e.to_string()))?;
            println!("wrote {}", out.display());
        }
        Cmd::Compile { template, out } => {
            let text = std::fs::read_to_string(&template)
                .map_err(|e| validation(format!("{}: {e}", template.display())))?;
            let t = blocks::template::import_template(&text)
                .map_err(|e| validation(e.to_string()))?;
            t.validate().map_err(|e| validation(e.to_string()))?;
            let (net, graph) = compile(&t).map_err(|e| validation(e.to_string()))?;
            std::fs::write(&out, dump_graph(&net, &graph))
                .map_err(|e| runtime(e.to_string()))?;
            println!(
                "wrote {} ({} checks, {} edges)",
                out.display(),
                graph.checks.len(),
                graph.edges.len()
            );
        }
        Cmd::Verify { kind, distance } => {
            let kind = parse_kind(&kind).map_err(validation)?;
            let b = build_block(kind, distance).map_err(|e| validation(e.to_string()))?;
            let bad = verify::bad_checks(&b.net, &b.graph);
            if !bad.is_empty() {
                return Err(runtime(format!("{} checks fail stabilizer verification", bad.len())));
            }
            println!("checks: {} verified", b.graph.checks.len());
            for m in &b.masks {
                match verify::verify_membrane(&b.net, &b.graph, m) {
                    Ok(res) => {
                        let mut per_port: BTreeMap<u8, String> = BTreeMap::new();
                        for (q, p) in verify::port_qubits(&b.net) {
                            if let Some(l) = res.letter(q) {
                                per_port.entry(p).or_default().push(match l {
                                    blocks::pauli::Letter::X => 'X',
                                    blocks::pauli::Letter::Y => 'Y',
                                    blocks::pauli::Letter::Z => 'Z',
                                });
                            }
                        }
                        let desc: Vec<String> = per_port
                            .iter()
                            .map(|(p, s)| format!("port{p}:{}^{}", s.chars().next().unwrap_or('-'), s.len()))
                            .collect();
                        println!("membrane {}: ok [{}]", m.name, desc.join(" "));
                    }
                    Err(e) => return Err(runtime(format!("membrane {}: {e}", m.name))),
                }
            }
        }
        Cmd::Distance { kind, distance } => {
            let kind = parse_kind(&kind).map_err(validation)?;
            let b = build_block(kind, distance).map_err(|e| validation(e.to_string()))?;
            match block_distance(&b.graph, &b.masks) {
                Some(fd) => println!("{fd}"),
                None => return Err(runtime("no undetectable logical error exists".into())),
            }
        }
        Cmd::Simulate { config, trials, seed, workers } => {
            let mut cfg = CampaignConfig::load(&config).map_err(validation)?;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            if cfg.workers == 0 {
                if let Ok(w) = std::env::var("BLOCKS_WORKERS") {
                    cfg.workers = w.parse().map_err(|_| validation("bad BLOCKS_WORKERS".into()))?;
                }
            }
            if cfg.workers > 0 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.workers)
                    .build_global()
                    .map_err(|e| runtime(e.to_string()))?;
            }
            let mut rows = vec![CSV_HEADER.to_string()];
            for &d in &cfg.distances {
                let b = build_block(cfg.kind, d).map_err(|e| validation(e.to_string()))?;
                for &(pe, pp) in &cfg.rates {
                    if cfg.trials > 0 {
                        let stats = run_point(&b, pe, pp, cfg.trials, cfg.seed);
                        eprintln!(
                            "{} d={} p_E={} p_P={}: {}/{} failures ({:.1}s)",
                            cfg.kind, d, pe, pp, stats.failures, stats.trials, stats.wall_seconds
                        );
                        rows.push(csv_row(&stats));
                    }
                }
            }
            std::fs::write(&cfg.output, rows.join("\n") + "\n")
                .map_err(|e| runtime(e.to_string()))?;
            println!("wrote {}", cfg.output.display());
        }
        Cmd::Fit { results, mode } => {
            let rows = load_results(&results).map_err(validation)?;
            match mode {
                FitMode::Decay => {
                    // one fit per (kind, rate point) across distances
                    let mut groups: BTreeMap<(String, String), Vec<(u32, TrialStats)>> =
                        BTreeMap::new();
                    for r in rows {
                        groups
                            .entry((r.kind.to_string(), format!("{},{}", r.p_e, r.p_p)))
                            .or_default()
                            .push((r.d, r));
                    }
                    println!("kind,p_E,p_P,alpha,beta,stderr_alpha,stderr_beta");
                    for ((kind, rate), pts) in groups {
                        let data: Vec<_> =
                            pts.iter().map(|(d, s)| (*d, s.estimate())).collect();
                        match analysis::fit_decay(&data) {
                            Ok(fit) => println!(
                                "{kind},{rate},{},{},{},{}",
                                fit.alpha, fit.beta, fit.stderr_alpha, fit.stderr_beta
                            ),
                            Err(e) => eprintln!("{kind} @ {rate}: {e}"),
                        }
                    }
                }
                FitMode::Threshold => {
                    let mut curves: BTreeMap<u32, Vec<(f64, blocks::engine::LogicalErrorEstimate)>> =
                        BTreeMap::new();
                    for r in &rows {
                        let p = if r.p_p > 0.0 { r.p_p } else { r.p_e };
                        curves.entry(r.d).or_default().push((p, r.estimate()));
                    }
                    let est = analysis::estimate_threshold(&curves).map_err(runtime)?;
                    println!("p_th,{}", est.p_th);
                    println!("error,{}", est.error);
                    for ((d1, d2), p) in est.crossings {
                        println!("crossing_{d1}_{d2},{p}");
                    }
                }
            }
        }
        Cmd::Report { results } => {
            let rows = load_results(&results).map_err(validation)?;
            println!("kind,d,p_E,p_P,rate,stderr");
            for r in rows {
                let est = r.estimate();
                println!("{},{},{},{},{},{}", r.kind, r.d, r.p_e, r.p_p, est.rate, est.stderr);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
