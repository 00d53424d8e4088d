//! `wsim`: runs scenarios and works with their artifacts.
//!
//! Exit codes: 0 success or Verified, 1 Rejected or not found, 2 Indeterminate
//! or any usage/runtime error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use wsim_core::attacks::{crack_dictionary, extract_handshake, parse_wordlist, read_handshake, verify_candidate,
    write_handshake, VerificationResult};
use wsim_core::frames::{read_capture, Ssid};
use wsim_core::portal::{default_password_log_name, serve_http, CaptivePortal, Language, PasswordLog, PortalConfig};
use wsim_core::scenario::{bundled, parse_scenario, read_event_log, run_scenario, RunReport, ScenarioConfig,
    ScenarioError};

#[derive(Parser)]
#[command(name = "wsim", version, about = "WPA2/WPA3 transition-network attack simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a bundled scenario by name) and write its artifacts.
    Run {
        scenario: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Print the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Pull EAPOL messages 1 and 2 for an SSID out of a capture file.
    Extract {
        capture: PathBuf,
        #[arg(long)]
        ssid: String,
        /// Handshake file to write; defaults to the capture path with a `.hs` extension.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Test one candidate passphrase against a handshake file.
    Verify { handshake: PathBuf, candidate: String },
    /// Dictionary attack against a handshake file.
    Crack { handshake: PathBuf, wordlist: PathBuf },
    /// Serve the captive portal over HTTP until interrupted.
    ServePortal {
        handshake: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
        #[arg(long, default_value = "english")]
        lang: Language,
        /// Where recovered passphrases are appended.
        #[arg(long)]
        password_log: Option<PathBuf>,
    },
    /// Recompute the run report from a JSONL event log.
    Report {
        event_log: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if let Some(ScenarioError::Invalid(issues)) = e.downcast_ref::<ScenarioError>() {
                for issue in issues {
                    eprintln!("  {issue}");
                }
            }
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run { scenario, out_dir, json } => run(&scenario, &out_dir, json),
        Command::Extract { capture, ssid, output } => extract(&capture, &ssid, output),
        Command::Verify { handshake, candidate } => verify(&handshake, &candidate),
        Command::Crack { handshake, wordlist } => crack(&handshake, &wordlist),
        Command::ServePortal { handshake, bind, lang, password_log } => {
            serve_portal(&handshake, bind, lang, password_log)
        }
        Command::Report { event_log, json } => {
            let log = read_event_log(&event_log)?;
            print_report(&RunReport::from_log(&log), json)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_scenario(arg: &str) -> Result<ScenarioConfig> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(parse_scenario(path)?);
    }
    let mut config = bundled(arg).ok_or_else(|| anyhow!("no scenario file or bundled scenario named {arg:?}"))?;
    config.apply_seed_override(std::env::var(wsim_core::scenario::SEED_ENV).ok().as_deref())?;
    Ok(config)
}

fn print_report(report: &RunReport, json: bool) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(report)?);
    } else {
        print!("{report}");
    }
    Ok(())
}

fn run(scenario: &str, out_dir: &Path, json: bool) -> Result<ExitCode> {
    let config = load_scenario(scenario)?;
    log::info!("running {} (seed {})", config.name, config.seed);
    let run = run_scenario(&config, out_dir)?;
    print_report(&run.report, json)?;
    if !json {
        println!("event log:          {}", run.paths.event_log.display());
        println!("capture:            {}", run.paths.capture.display());
        println!("report:             {}", run.paths.report.display());
        if let (false, Some(path)) = (run.password_log.is_empty(), &run.paths.password_log) {
            println!("password log:       {}", path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn extract(capture: &Path, ssid: &str, output: Option<PathBuf>) -> Result<ExitCode> {
    let ssid = Ssid::new(ssid)?;
    let file = read_capture(capture).with_context(|| format!("reading {}", capture.display()))?;
    let frames: Vec<_> = file.frames().collect();
    let Some(hs) = extract_handshake(frames.iter().copied(), &ssid) else {
        println!("no usable handshake for {ssid:?} in {} frames", file.records.len());
        return Ok(ExitCode::from(1));
    };
    let output = output.unwrap_or_else(|| capture.with_extension("hs"));
    write_handshake(&output, &hs)?;
    println!("ssid:    {}", hs.ssid.as_str());
    println!("ap:      {}", hs.aa);
    println!("station: {}", hs.sa);
    println!("msg1 at tick {}, msg2 at tick {}", hs.source_ticks.0, hs.source_ticks.1);
    println!("written: {}", output.display());
    Ok(ExitCode::SUCCESS)
}

fn verify(handshake: &Path, candidate: &str) -> Result<ExitCode> {
    let hs = read_handshake(handshake)?;
    let result = verify_candidate(&hs, candidate);
    match &result {
        VerificationResult::Verified { .. } => println!("Verified"),
        VerificationResult::Rejected => println!("Rejected"),
        VerificationResult::Indeterminate { reason } => println!("Indeterminate: {reason}"),
    }
    Ok(ExitCode::from(match result {
        VerificationResult::Verified { .. } => 0,
        VerificationResult::Rejected => 1,
        VerificationResult::Indeterminate { .. } => 2,
    }))
}

fn crack(handshake: &Path, wordlist: &Path) -> Result<ExitCode> {
    let hs = read_handshake(handshake)?;
    let text = std::fs::read_to_string(wordlist).with_context(|| format!("reading {}", wordlist.display()))?;
    let outcome = crack_dictionary(&hs, &parse_wordlist(&text));
    let elapsed = outcome.elapsed.as_millis();
    match &outcome.found {
        Some(password) => {
            println!("{password}");
            println!("tried={} elapsed_ms={elapsed}", outcome.candidates_tried);
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("not found");
            println!("tried={} elapsed_ms={elapsed}", outcome.candidates_tried);
            Ok(ExitCode::from(1))
        }
    }
}

fn serve_portal(handshake: &Path, bind: String, language: Language, password_log: Option<PathBuf>) -> Result<ExitCode> {
    let hs = read_handshake(handshake)?;
    let log_path = password_log.unwrap_or_else(|| PathBuf::from(default_password_log_name(hs.ssid.as_str())));
    let config = PortalConfig { language, bind_address: bind, ..PortalConfig::default() };
    let portal = Arc::new(CaptivePortal::new(config, hs, PasswordLog::at(&log_path), 0)?);

    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        let handle = serve_http(portal, shutdown).await?;
        println!("portal for {:?} listening on http://{}", handle.portal().essid(), handle.local_addr());
        println!("recovered passphrases go to {}", log_path.display());
        handle.wait().await?;
        Ok::<_, anyhow::Error>(())
    })?;
    Ok(ExitCode::SUCCESS)
}
