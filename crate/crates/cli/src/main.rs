//! Command-line front end for the FinDebate pipeline.
//!
//! Exit codes: 0 success (including safe debate skips/reverts), 1 usage
//! errors, 2 runtime failures.

use clap::{Parser, Subcommand};
use findebate_core::config::RunConfig;
use findebate_core::judge::{compare_modes, score_report, Scorecard};
use findebate_core::pipeline::{default_out_dir, run_pipeline, PipelineMode};
use findebate_core::report::parse_report;
use findebate_core::segmenter::{chunks_to_jsonl, segment_document};
use findebate_core::transcript::{ingest_dir, load_transcript};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "findebate", version, about = "Earnings-call transcripts to multi-horizon investment reports")]
struct Cli {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Force the deterministic offline backends.
    #[arg(long, global = true)]
    offline: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and segment transcripts, writing chunk inventories.
    Ingest {
        /// A transcript file or a directory of *.txt / *.md transcripts.
        input: PathBuf,
        /// Output directory for parsed documents and chunk files.
        #[arg(long, default_value = "artifacts/ingest")]
        out: PathBuf,
    },
    /// Run a pipeline mode over one transcript.
    Analyze {
        input: PathBuf,
        #[arg(long, default_value = "findebate")]
        mode: PipelineMode,
        /// Output directory; defaults to artifacts/<doc>/<mode>.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run only the debate stage over an existing draft report.
    Debate {
        /// Markdown draft report (R0).
        report: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a final report against its source transcript.
    Evaluate {
        report: PathBuf,
        transcript: PathBuf,
        /// Mode label recorded on the scorecard.
        #[arg(long, default_value = "findebate")]
        mode: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate scorecard files into a mode comparison table.
    Compare {
        /// Scorecard JSON files produced by `evaluate`.
        scorecards: Vec<PathBuf>,
    },
}

fn load_config(path: &Option<PathBuf>) -> anyhow::Result<RunConfig> {
    match path {
        Some(p) => Ok(RunConfig::load(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn cmd_ingest(cfg: &RunConfig, input: &Path, out: &Path) -> anyhow::Result<()> {
    let docs = if input.is_dir() {
        ingest_dir(input)?
    } else {
        vec![load_transcript(input)?]
    };
    if docs.is_empty() {
        anyhow::bail!("no transcripts found under {}", input.display());
    }
    std::fs::create_dir_all(out)?;
    for doc in &docs {
        let chunks = segment_document(doc, &cfg.segmenter)?;
        let stem = &doc.doc_id[..12];
        std::fs::write(out.join(format!("{stem}.doc.json")), serde_json::to_string_pretty(doc)?)?;
        std::fs::write(out.join(format!("{stem}.chunks.jsonl")), chunks_to_jsonl(&chunks))?;
        println!(
            "{stem}  {:60.60}  sections={} chunks={}",
            doc.title,
            doc.sections.len(),
            chunks.len()
        );
        for wmsg in &doc.warnings {
            eprintln!("warning [{stem}]: {wmsg}");
        }
    }
    Ok(())
}

fn cmd_analyze(
    cfg: &RunConfig,
    input: &Path,
    mode: PipelineMode,
    out: &Option<PathBuf>,
    offline: bool,
) -> anyhow::Result<()> {
    let doc = load_transcript(input)?;
    let out_dir = out
        .clone()
        .unwrap_or_else(|| default_out_dir(Path::new("artifacts"), &doc, mode));
    let result = run_pipeline(&doc, cfg, mode, &out_dir, offline)?;
    println!("mode={} doc={} out={}", mode, &doc.doc_id[..12], out_dir.display());
    if let Some(outcome) = result.debate_outcome {
        println!("debate outcome: {outcome:?}");
    }
    println!(
        "final report: {} ({} recommendations)",
        out_dir.join("final_report.md").display(),
        result.final_report.recommendations.len()
    );
    Ok(())
}

fn cmd_debate(cfg: &RunConfig, report_path: &Path, out: &Option<PathBuf>, offline: bool) -> anyhow::Result<()> {
    use findebate_core::debate::{render_debate_report, run_safe_debate, DebateConfig};
    let markdown = std::fs::read_to_string(report_path)?;
    let r0 = parse_report(&markdown);
    let gateway = cfg.build_gateway(offline)?;
    let session = run_safe_debate(
        &r0,
        &[],
        &gateway,
        &DebateConfig {
            rounds: cfg.debate.rounds,
            thresholds: cfg.debate.thresholds,
            params: cfg.generation,
        },
    );
    println!("debate outcome: {:?}", session.outcome);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("final_report.md"), &session.final_report().markdown)?;
        std::fs::write(dir.join("debate_audit.md"), render_debate_report(&session))?;
        std::fs::write(
            dir.join("debate_log.json"),
            serde_json::to_string_pretty(&session.log)?,
        )?;
        println!("artifacts: {}", dir.display());
    }
    Ok(())
}

fn cmd_evaluate(
    cfg: &RunConfig,
    report: &Path,
    transcript: &Path,
    mode: &str,
    out: &Option<PathBuf>,
    offline: bool,
) -> anyhow::Result<()> {
    let report_text = std::fs::read_to_string(report)?;
    let doc = load_transcript(transcript)?;
    let gateway = cfg.build_gateway(offline)?;
    let report_id = report
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    let card = score_report(&report_id, mode, &report_text, &doc.raw_text, &gateway)?;
    println!("mode={mode} mean={:.2}", card.mean);
    for (dim, score) in &card.scores {
        println!("  {:<32} {}", format!("{dim:?}"), score);
    }
    if let Some(path) = out {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        std::fs::write(path, serde_json::to_string_pretty(&card)?)?;
        println!("scorecard: {}", path.display());
    }
    Ok(())
}

fn cmd_compare(paths: &[PathBuf]) -> anyhow::Result<()> {
    if paths.is_empty() {
        anyhow::bail!("compare requires at least one scorecard file");
    }
    let mut grouped: BTreeMap<String, Vec<Scorecard>> = BTreeMap::new();
    for p in paths {
        let card: Scorecard = serde_json::from_str(&std::fs::read_to_string(p)?)?;
        grouped.entry(card.mode.clone()).or_default().push(card);
    }
    let modes: Vec<&str> = grouped.keys().map(String::as_str).collect();
    let table = compare_modes(&grouped, &modes)?;
    print!("{}", table.render());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    let cfg = match load_config(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Ingest { input, out } => cmd_ingest(&cfg, input, out),
        Command::Analyze { input, mode, out } => cmd_analyze(&cfg, input, *mode, out, cli.offline),
        Command::Debate { report, out } => cmd_debate(&cfg, report, out, cli.offline),
        Command::Evaluate {
            report,
            transcript,
            mode,
            out,
        } => cmd_evaluate(&cfg, report, transcript, mode, out, cli.offline),
        Command::Compare { scorecards } => cmd_compare(scorecards),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
