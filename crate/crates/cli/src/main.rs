use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use bellinfo::bellgen::{
    bell_report, correlation_table, general_bell_lhs, maximize_general_bell, parse_settings_file, BellReport,
    SettingsPair, DEFAULT_BELL_RESTARTS,
};
use bellinfo::infocrit::{
    corr_info, maximize_corr_info, maximize_corr_info_from, CriterionVerdict, OptimizerSummary, VerdictExport,
};
use bellinfo::lhv::{construct_lhv, verify_lhv, ModelExport};
use bellinfo::optim::OptimizerOptions;
use bellinfo::pauli::{correlation_tensor, CorrelationTensor, LocalFrame, TensorExport};
use bellinfo::qstate::{build_preset, parse_state_file, DensityMatrix, PresetKind, StatePreset};
use bellinfo::wernerlab::{analyze_werner, scan_to_csv, visibility_scan, WernerAnalysis, DEFAULT_GRID};
use bellinfo::{format_sig17, Vec3};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Entanglement and Bell-inequality analysis of N-qubit states.
#[derive(Debug, Parser)]
#[command(name = "bellinfo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full Pauli correlation tensor.
    Tensor {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Correlation information maximized over local measurement planes.
    Info {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// General two-setting Bell inequality, at given or optimized settings.
    Bell {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Settings file; skips the optimization.
        #[arg(long)]
        settings: Option<PathBuf>,
    },
    /// Local hidden-variable model for the correlations at given settings.
    Lhv {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        settings: PathBuf,
    },
    /// Both criteria over the visibility of GHZ-Werner states.
    WernerScan {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Tensor, both criteria and, when local, an explicit model.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// State file, or `-` for stdin.
    #[arg(long, short = 'i', conflicts_with = "preset")]
    input: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    /// Qubit count for presets.
    #[arg(long)]
    n: Option<usize>,
    /// Visibility for `werner_ghz`.
    #[arg(long)]
    visibility: Option<f64>,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Low-discrepancy restarts of the optimizer.
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Problems with what the user supplied; mapped to exit code 2.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_error(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

fn load_state(args: &InputArgs) -> anyhow::Result<DensityMatrix> {
    match (&args.input, &args.preset) {
        (Some(path), None) => {
            if args.n.is_some() || args.visibility.is_some() {
                return Err(input_error("--n and --visibility apply to presets only"));
            }
            let mut bytes = Vec::new();
            if path == "-" {
                std::io::stdin()
                    .read_to_end(&mut bytes)
                    .map_err(|e| input_error(format!("stdin: {e}")))?;
            } else {
                bytes = std::fs::read(path).map_err(|e| input_error(format!("{path}: {e}")))?;
            }
            Ok(parse_state_file(&bytes)?)
        }
        (None, Some(kind)) => {
            let kind: PresetKind = kind.parse()?;
            let n_qubits = args.n.unwrap_or(2);
            Ok(build_preset(&StatePreset {
                kind,
                n_qubits,
                visibility: args.visibility,
            })?)
        }
        _ => Err(input_error("give exactly one of --input or --preset")),
    }
}

fn load_settings(path: &PathBuf) -> anyhow::Result<SettingsPair> {
    let bytes = std::fs::read(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    Ok(parse_settings_file(&bytes)?)
}

fn options(search: &SearchArgs, default_restarts: usize) -> OptimizerOptions {
    OptimizerOptions {
        restarts: search.restarts.unwrap_or(default_restarts),
        seed: search.seed,
        ..OptimizerOptions::default()
    }
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn require_json(format: Format, command: &str) -> anyhow::Result<()> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(input_error(format!("`{command}` has no CSV output"))),
    }
}

#[derive(Serialize)]
struct InfoReport {
    #[serde(flatten)]
    verdict: VerdictExport,
    per_index: BTreeMap<String, f64>,
}

fn info_report(t: &CorrelationTensor, v: &CriterionVerdict) -> anyhow::Result<InfoReport> {
    let per_index = corr_info(t, &v.argmax_frame)?.labelled().into_iter().collect();
    Ok(InfoReport {
        verdict: v.export(),
        per_index,
    })
}

#[derive(Serialize)]
struct BellOutput {
    #[serde(flatten)]
    report: BellReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimizer: Option<OptimizerSummary>,
}

#[derive(Serialize)]
struct LhvOutput {
    model: ModelExport,
    table: Vec<f64>,
    max_abs_error: f64,
}

#[derive(Serialize)]
struct AnalyzeReport {
    n_qubits: usize,
    tensor: TensorExport,
    info: InfoReport,
    bell: BellOutput,
    /// Model at the Bell-optimal settings, absent when they violate.
    lhv: Option<LhvOutput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    werner: Option<WernerAnalysis>,
}

fn lhv_output(t: &CorrelationTensor, settings: &SettingsPair) -> anyhow::Result<LhvOutput> {
    let table = correlation_table(t, settings)?;
    let model = construct_lhv(&table)?;
    Ok(LhvOutput {
        max_abs_error: verify_lhv(&model, &table)?,
        model: model.export(),
        table: table.values().to_vec(),
    })
}

/// Frame whose planes contain both settings of every qubit.
fn frame_of_settings(s: &SettingsPair) -> Option<LocalFrame> {
    let normals: Option<Vec<Vec3>> = s
        .pairs()
        .iter()
        .map(|(a, b)| {
            let c = [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ];
            let l = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
            (l > 1e-9).then(|| [c[0] / l, c[1] / l, c[2] / l])
        })
        .collect();
    LocalFrame::from_normals(&normals?).ok()
}

fn tensor_csv(t: &CorrelationTensor) -> String {
    const ALPHABET: [char; 4] = ['0', 'x', 'y', 'z'];
    let n = t.n_qubits();
    let mut out = String::from("label,value\n");
    for (flat, value) in t.entries().iter().enumerate() {
        let label: String = (0..n).map(|j| ALPHABET[(flat >> (2 * (n - 1 - j))) & 3]).collect();
        out.push_str(&format!("{label},{}\n", format_sig17(*value)));
    }
    out
}

fn run(cli: Cli) -> anyhow::Result<(String, Option<PathBuf>)> {
    match cli.command {
        Command::Tensor { input, output } => {
            let t = correlation_tensor(&load_state(&input)?)?;
            let text = match output.format {
                Format::Json => json(&t.export())?,
                Format::Csv => tensor_csv(&t),
            };
            Ok((text, output.out))
        }
        Command::Info { input, search, output } => {
            require_json(output.format, "info")?;
            let t = correlation_tensor(&load_state(&input)?)?;
            let v = maximize_corr_info(&t, &options(&search, OptimizerOptions::default().restarts))?;
            Ok((json(&info_report(&t, &v)?)?, output.out))
        }
        Command::Bell {
            input,
            search,
            output,
            settings,
        } => {
            require_json(output.format, "bell")?;
            let t = correlation_tensor(&load_state(&input)?)?;
            let out = match settings {
                Some(path) => {
                    let s = load_settings(&path)?;
                    let e = general_bell_lhs(&correlation_table(&t, &s)?);
                    BellOutput {
                        report: bell_report(&e, &s),
                        optimizer: None,
                    }
                }
                None => {
                    let best = maximize_general_bell(&t, &options(&search, DEFAULT_BELL_RESTARTS))?;
                    BellOutput {
                        report: best.export(),
                        optimizer: Some(OptimizerSummary::from(&best.report)),
                    }
                }
            };
            Ok((json(&out)?, output.out))
        }
        Command::Lhv {
            input,
            output,
            settings,
        } => {
            require_json(output.format, "lhv")?;
            let t = correlation_tensor(&load_state(&input)?)?;
            Ok((json(&lhv_output(&t, &load_settings(&settings)?)?)?, output.out))
        }
        Command::WernerScan {
            n,
            grid,
            search,
            out,
            format,
        } => {
            let rows = visibility_scan(n, grid, &options(&search, OptimizerOptions::default().restarts))?;
            let text = match format {
                Format::Csv => scan_to_csv(&rows),
                Format::Json => json(&rows)?,
            };
            Ok((text, out))
        }
        Command::Analyze { input, search, output } => {
            require_json(output.format, "analyze")?;
            let preset = input.preset.clone();
            let visibility = input.visibility;
            let t = correlation_tensor(&load_state(&input)?)?;
            let n = t.n_qubits();
            let mut info = maximize_corr_info(&t, &options(&search, OptimizerOptions::default().restarts))?;
            let best = maximize_general_bell(&t, &options(&search, DEFAULT_BELL_RESTARTS))?;
            if best.evaluation.violated && !info.entangled {
                // The planes of violating settings carry more than one bit;
                // search again from them.
                if let Some(frame) = frame_of_settings(&best.settings) {
                    let again = maximize_corr_info_from(&t, &[frame], &options(&search, 0))?;
                    if again.max_total > info.max_total {
                        info = again;
                    }
                }
            }
            let lhv = if best.evaluation.violated {
                None
            } else {
                Some(lhv_output(&t, &best.settings)?)
            };
            let werner = match (preset.as_deref(), visibility) {
                (Some("werner_ghz"), Some(v)) if n >= 2 => Some(analyze_werner(n, v)?),
                _ => None,
            };
            let report = AnalyzeReport {
                n_qubits: n,
                tensor: t.export(),
                info: info_report(&t, &info)?,
                bell: BellOutput {
                    report: best.export(),
                    optimizer: Some(OptimizerSummary::from(&best.report)),
                },
                lhv,
                werner,
            };
            Ok((json(&report)?, output.out))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<InputError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<bellinfo::Error>() {
        Some(e) if e.is_input_error() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(text, out)| {
        match out {
            Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| anyhow!(e))?,
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
