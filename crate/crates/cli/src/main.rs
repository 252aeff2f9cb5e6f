use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adaptive_floorplan::paint::{validate_palette, PaletteError};
use adaptive_floorplan::pipeline::{
    render, run_adapt, run_clean, run_enrich, run_load, run_validate, EnrichInputs, PipelineError,
    Report,
};
use adaptive_floorplan::rules::RulesError;
use adaptive_floorplan::{
    default_palette, parse_svg, serialize_svg, simulate_cvd, simulate_document, CleanConfig,
    CvdKind, DisabilityProfile, FillMode, LayerRules, Palette, Rgb, StyleOptions,
};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "adaptive-floorplan",
    version,
    about = "Build and check adaptive SVG floorplans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Strip editor debris, hidden elements, comments and empty groups.
    Clean {
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
        /// Keep elements hidden with display/visibility.
        #[arg(long)]
        keep_hidden: bool,
    },
    /// Join CSV metadata and inject accessibility markup and layer bit fields.
    Enrich {
        input: PathBuf,
        #[arg(long)]
        metadata: PathBuf,
        #[command(flatten)]
        rules: RulesArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Render a document for a disability profile.
    Adapt {
        input: PathBuf,
        /// Enrich from this CSV first; without it the input must already be enriched.
        #[arg(long)]
        metadata: Option<PathBuf>,
        #[command(flatten)]
        rules: RulesArg,
        #[arg(long)]
        palette: Option<PathBuf>,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value = "full")]
        fill_mode: FillMode,
        /// default, large-print or OpenDyslexic.
        #[arg(long)]
        font: Option<String>,
        /// Category colour override, e.g. `accessible_entrance=#000000`. Repeatable.
        #[arg(long = "colour", value_name = "CATEGORY=COLOUR")]
        colours: Vec<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check contrast, aria references, bit fields, paints and ids.
    Validate {
        input: PathBuf,
        #[command(flatten)]
        rules: RulesArg,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Show colours, or a whole SVG, as seen with a colour-vision deficiency.
    SimulateCvd {
        #[arg(long)]
        kind: CvdKind,
        /// Colours to convert.
        colours: Vec<Rgb>,
        /// SVG to convert instead of colours.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Palette operations.
    Palette {
        #[command(subcommand)]
        action: PaletteAction,
    },
}

#[derive(Subcommand)]
enum PaletteAction {
    /// Print the palette, its paint options and per-deficiency distinguishability.
    List {
        #[arg(long)]
        palette: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// Output SVG; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// JSON run report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Overwrite the input file.
    #[arg(long, conflicts_with = "output")]
    in_place: bool,
}

#[derive(Args)]
struct RulesArg {
    /// Layer rules JSON; the bundled rules when omitted.
    #[arg(long = "rules", env = "AF_RULES")]
    path: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    low_vision: bool,
    #[arg(long)]
    colour_impaired: bool,
    #[arg(long)]
    dyslexia: bool,
    #[arg(long)]
    mobility: bool,
}

impl ProfileArgs {
    fn profile(&self) -> DisabilityProfile {
        DisabilityProfile {
            low_vision: self.low_vision,
            colour_impairment: self.colour_impaired,
            dyslexia: self.dyslexia,
            mobility_impairment: self.mobility,
        }
    }
}

/// A failure reported as one JSON object on stderr.
#[derive(Debug)]
struct Failure {
    stage: String,
    message: String,
}

impl Failure {
    fn new(stage: impl Into<String>, message: impl ToString) -> Self {
        Failure {
            stage: stage.into(),
            message: message.to_string(),
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Failure::new("io", format!("{}: {e}", path.display()))
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::new(e.stage().to_string(), e)
    }
}

impl From<RulesError> for Failure {
    fn from(e: RulesError) -> Self {
        Failure::new("config", e)
    }
}

impl From<PaletteError> for Failure {
    fn from(e: PaletteError) -> Self {
        Failure::new("config", e)
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::io(path, e))
}

fn source_name(path: &Path) -> String {
    path.display().to_string()
}

fn load_rules(arg: &RulesArg) -> Result<LayerRules, Failure> {
    match &arg.path {
        None => Ok(LayerRules::default()),
        Some(p) => {
            let text = String::from_utf8(read(p)?).map_err(|e| Failure::new("config", e))?;
            Ok(LayerRules::from_json(&text)?)
        }
    }
}

fn load_palette(path: Option<&Path>) -> Result<Palette, Failure> {
    match path {
        None => Ok(default_palette()),
        Some(p) => {
            let text = String::from_utf8(read(p)?).map_err(|e| Failure::new("config", e))?;
            Ok(Palette::from_json(&text)?)
        }
    }
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(a), Ok(b)) => a == b,
        _ => a == b,
    }
}

/// Writes the output SVG and report. Refuses to replace the input unless
/// `--in-place` was given.
fn emit(input: &Path, out: &OutputArgs, svg: &[u8], report: &Report) -> Result<(), Failure> {
    let target = if out.in_place {
        Some(input)
    } else {
        out.output.as_deref()
    };
    if let Some(path) = out.output.as_deref() {
        if same_file(path, input) {
            return Err(Failure::new(
                "io",
                format!(
                    "refusing to overwrite input {}; pass --in-place",
                    input.display()
                ),
            ));
        }
    }
    if let Some(path) = &out.report {
        if same_file(path, input) {
            return Err(Failure::new("io", "report path is the input file"));
        }
        write(path, report.to_json().as_bytes())?;
    }
    match target {
        Some(path) => write(path, svg),
        None => io::stdout()
            .write_all(svg)
            .map_err(|e| Failure::new("io", e)),
    }
}

fn status(report: &Report) -> ExitCode {
    if report.has_errors() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Clean {
            input,
            out,
            keep_hidden,
        } => {
            let cfg = CleanConfig {
                strip_hidden: !keep_hidden,
                ..CleanConfig::default()
            };
            let (doc, report) = run_clean(&read(&input)?, &source_name(&input), &cfg)?;
            emit(&input, &out, &render(&doc), &report)?;
            Ok(status(&report))
        }
        Command::Enrich {
            input,
            metadata,
            rules,
            out,
        } => {
            let rules = load_rules(&rules)?;
            let (doc, report) = run_enrich(&EnrichInputs {
                svg: &read(&input)?,
                source_name: &source_name(&input),
                metadata: &read(&metadata)?,
                rules: &rules,
                clean: &CleanConfig::default(),
            })?;
            emit(&input, &out, &render(&doc), &report)?;
            Ok(status(&report))
        }
        Command::Adapt {
            input,
            metadata,
            rules,
            palette,
            profile,
            fill_mode,
            font,
            colours,
            out,
        } => {
            let rules = load_rules(&rules)?;
            let palette = load_palette(palette.as_deref())?;
            let svg = read(&input)?;
            let name = source_name(&input);
            let (doc, mut report) = match &metadata {
                Some(csv) => run_enrich(&EnrichInputs {
                    svg: &svg,
                    source_name: &name,
                    metadata: &read(csv)?,
                    rules: &rules,
                    clean: &CleanConfig::default(),
                })?,
                None => run_load(&svg, &name, "adapt")?,
            };
            let mut style = StyleOptions::from_palette(&palette).with_fill_mode(fill_mode);
            if let Some(font) = &font {
                style = style
                    .set_font(font)
                    .map_err(|e| Failure::new("config", e))?;
            }
            for spec in &colours {
                let (category, colour) = spec.split_once('=').ok_or_else(|| {
                    Failure::new("config", format!("`{spec}` is not CATEGORY=COLOUR"))
                })?;
                let colour: Rgb = colour.parse().map_err(|e| Failure::new("config", e))?;
                let (next, warning) = style
                    .set_category_color(category, colour)
                    .map_err(|e| Failure::new("config", e))?;
                if let Some(w) = warning {
                    report.warnings.push(w.to_string());
                }
                style = next;
            }
            let (doc, report) = run_adapt(&doc, report, &profile.profile(), &style, &rules)?;
            emit(&input, &out, &render(&doc), &report)?;
            Ok(status(&report))
        }
        Command::Validate {
            input,
            rules,
            report: path,
        } => {
            let rules = load_rules(&rules)?;
            let (_, report) = run_validate(&read(&input)?, &source_name(&input), &rules)?;
            let json = report.to_json();
            match path {
                Some(p) => write(&p, json.as_bytes())?,
                None => io::stdout()
                    .write_all(json.as_bytes())
                    .map_err(|e| Failure::new("io", e))?,
            }
            Ok(status(&report))
        }
        Command::SimulateCvd {
            kind,
            colours,
            svg,
            output,
        } => {
            if let Some(path) = svg {
                let doc =
                    parse_svg(&read(&path)?, &source_name(&path)).map_err(PipelineError::from)?;
                let bytes = serialize_svg(&simulate_document(&doc, kind));
                match output {
                    Some(o) if same_file(&o, &path) => {
                        return Err(Failure::new("io", "refusing to overwrite input"));
                    }
                    Some(o) => write(&o, &bytes)?,
                    None => io::stdout()
                        .write_all(&bytes)
                        .map_err(|e| Failure::new("io", e))?,
                }
            } else {
                let rows: Vec<_> = colours
                    .iter()
                    .map(|c| json!({ "input": c, "simulated": simulate_cvd(*c, kind) }))
                    .collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({ "kind": kind, "colours": rows }))
                        .unwrap()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Palette {
            action: PaletteAction::List { palette },
        } => {
            let palette = load_palette(palette.as_deref())?;
            let checks: Vec<_> = CvdKind::ALL
                .iter()
                .map(|k| validate_palette(&palette, *k))
                .collect();
            let patterns: Vec<_> = palette
                .patterns
                .iter()
                .map(|p| json!({ "id": p.id(), "fill": p.reference() }))
                .collect();
            let body = json!({
                "name": palette.name,
                "base_colours": palette.base_colours,
                "paint_options": palette.paint_options(),
                "patterns": patterns,
                "distinguishability": checks,
            });
            println!("{}", serde_json::to_string_pretty(&body).unwrap());
            let ok = checks.iter().all(|c| c.passes);
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            let err = json!({ "error": { "stage": f.stage, "message": f.message } });
            eprintln!("{err}");
            ExitCode::from(2)
        }
    }
}
