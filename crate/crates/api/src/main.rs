use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use foodcal_api::{AppState, ServerOptions};
use foodcal_core::analytics::{self, report};
use foodcal_core::catalog::{self, ValidationMode};
use foodcal_core::levelgen::{self, LevelGenConfig};
use foodcal_core::solver;
use foodcal_core::store::FileStore;
use foodcal_core::{CalorieRequirementTable, Catalog, Gender, Level};

#[derive(Parser)]
#[command(name = "foodcal", version, about = "FoodCalorie game server and admin tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = "FOODCAL_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "FOODCAL_BIND", default_value = "0.0.0.0")]
        bind: String,
        #[arg(long, env = "FOODCAL_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "FOODCAL_DATA_DIR", default_value = "data")]
        data_dir: PathBuf,
        #[arg(long, env = "FOODCAL_CORS_ORIGIN")]
        cors_origin: Option<String>,
        /// Serve /hint; set to false for the plain game.
        #[arg(long, env = "FOODCAL_HINTS", default_value_t = true, action = clap::ArgAction::Set)]
        hints: bool,
        /// Accept requirement tables that do not span 96 ages.
        #[arg(long)]
        lenient_span: bool,
    },
    /// Check a catalog file and list every violation.
    ValidateCatalog {
        path: PathBuf,
        #[arg(long)]
        lenient: bool,
    },
    /// Print the level for one age as JSON.
    GenLevel {
        #[arg(long)]
        age: u32,
        /// Master seed; the level matches what the server hands out.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write every level as one JSON file into a directory.
    GenAll {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        lenient_span: bool,
    },
    /// Generate and audit all levels for master seeds 0..N.
    Audit {
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        start: u64,
    },
    /// Best day plan for one gender of a saved level.
    Solve {
        #[arg(long)]
        level_file: PathBuf,
        #[arg(long)]
        gender: Gender,
    },
    /// Statistics report for a study CSV.
    StudyReport {
        #[arg(long)]
        csv: PathBuf,
        /// Also write SVG charts into this directory.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

fn engine_data() -> anyhow::Result<(Catalog, CalorieRequirementTable)> {
    let catalog = Catalog::from_env().context("loading catalog")?;
    let reqs = CalorieRequirementTable::from_env().context("loading requirement table")?;
    Ok((catalog, reqs))
}

fn levelgen_config(lenient_span: bool) -> LevelGenConfig {
    LevelGenConfig {
        strict_span: !lenient_span,
        ..LevelGenConfig::default()
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Serve {
            port,
            bind,
            seed,
            data_dir,
            cors_origin,
            hints,
            lenient_span,
        } => {
            let (catalog, reqs) = engine_data()?;
            let store = FileStore::open(&data_dir).with_context(|| format!("opening {}", data_dir.display()))?;
            let mut options = ServerOptions {
                master_seed: seed,
                hints_enabled: hints,
                cors_origin,
                ..ServerOptions::default()
            };
            options.levelgen = levelgen_config(lenient_span);
            let state = AppState::new(catalog, reqs, Arc::new(store), options)?;
            let addr: SocketAddr = format!("{bind}:{port}").parse().context("bind address")?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(addr).await?;
                eprintln!("listening on {}", listener.local_addr()?);
                tokio::select! {
                    r = foodcal_api::serve(listener, state) => r?,
                    _ = tokio::signal::ctrl_c() => {}
                }
                anyhow::Ok(())
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ValidateCatalog { path, lenient } => {
            let mode = if lenient { ValidationMode::Lenient } else { ValidationMode::Strict };
            let cat = match catalog::load_catalog_with(&path, ValidationMode::Lenient) {
                Ok(c) => c,
                Err(e) => {
                    println!("invalid: {e}");
                    return Ok(ExitCode::FAILURE);
                }
            };
            let problems = catalog::validate_catalog(&cat, mode);
            if problems.is_empty() {
                println!("ok: {} items", cat.len());
                Ok(ExitCode::SUCCESS)
            } else {
                for p in &problems {
                    println!("{p}");
                }
                Ok(ExitCode::FAILURE)
            }
        }
        Command::GenLevel { age, seed } => {
            let (catalog, reqs) = engine_data()?;
            if age < reqs.age_min() || age > reqs.age_max() {
                bail!("age {age} outside {}..={}", reqs.age_min(), reqs.age_max());
            }
            let n = age - reqs.age_min() + 1;
            let level = levelgen::generate_level(
                &catalog,
                &reqs,
                age,
                foodcal_core::rng::level_seed(seed, n),
                &LevelGenConfig::default(),
            )?;
            println!("{}", serde_json::to_string_pretty(&level)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::GenAll { seed, out, lenient_span } => {
            let (catalog, reqs) = engine_data()?;
            let levels = levelgen::generate_all_levels(&catalog, &reqs, seed, &levelgen_config(lenient_span))?;
            std::fs::create_dir_all(&out)?;
            for level in &levels {
                let path = out.join(format!("level_{:03}.json", level.level_number));
                std::fs::write(&path, serde_json::to_string_pretty(level)?)?;
            }
            println!("wrote {} levels to {}", levels.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Audit { seeds, start } => {
            let (catalog, reqs) = engine_data()?;
            let cfg = LevelGenConfig::default();
            let failures: Vec<String> = (start..start + seeds)
                .into_par_iter()
                .flat_map_iter(|seed| match levelgen::generate_all_levels(&catalog, &reqs, seed, &cfg) {
                    Ok(levels) => levels
                        .iter()
                        .flat_map(|l| {
                            levelgen::audit_level(l, &catalog, &reqs, &cfg)
                                .into_iter()
                                .map(move |p| format!("seed {seed} level {}: {p}", l.level_number))
                        })
                        .collect::<Vec<_>>(),
                    Err(e) => vec![format!("seed {seed}: {e}")],
                })
                .collect();
            for f in &failures {
                println!("{f}");
            }
            println!(
                "{} seeds x {} levels audited, {} problems",
                seeds,
                reqs.span_len(),
                failures.len()
            );
            Ok(if failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Solve { level_file, gender } => {
            let (catalog, _) = engine_data()?;
            let text = std::fs::read_to_string(&level_file)?;
            let level: Level = serde_json::from_str(&text).context("parsing level file")?;
            let [b, l, d] = level.pools(&catalog, gender).map_err(anyhow::Error::msg)?;
            let target = level.target(gender);
            let plan = solver::best_plan([&b, &l, &d], &LevelGenConfig::default().constraints, target)?;
            let stars = foodcal_core::scoring::score_stars(plan.day_total_kcal, target);
            let out = serde_json::json!({
                "gender": gender,
                "required_kcal": target,
                "plan": plan,
                "projected_stars": stars,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::StudyReport { csv, plot } => {
            let records = analytics::load_study_csv(&csv)?;
            print!("{}", report::text_report(&records)?);
            if let Some(dir) = plot {
                for path in report::write_plots(&records, &dir)? {
                    println!("wrote {}", path.display());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
