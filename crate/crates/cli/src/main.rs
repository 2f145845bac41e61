//! Command-line surface: JSON file I/O around the exact tomography
//! library, plus SVG rendering. All data files carry exact rationals;
//! floating-point coordinates appear only in rendered SVG.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use cycloto_core::grid::{build_grid, decompose};
use cycloto_core::modelset::{ModelSetSpec, Patch};
use cycloto_core::separation::{separate, SeparableFamily, SeparableMember};
use cycloto_core::tomography::{consistency, reconstruct, uniqueness, TomographyStatus};
use cycloto_core::xray::Direction;
use cycloto_core::{CycNum, Rat, TomographyResult, XRayInstance};

#[derive(Parser)]
#[command(name = "cycloto", version, about = "Exact discrete tomography of planar cyclotomic model sets")]
struct Cli {
    /// Model-set specification JSON file
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Bits of working precision for rendered coordinates (>= 32)
    #[arg(long, global = true, default_value_t = 64)]
    precision: u32,
    /// Random seed for sampling-based diagnostics (reserved)
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate all model-set points with |z| <= radius
    Generate {
        /// Patch radius, an exact rational like "3" or "5/2"
        #[arg(long)]
        radius: String,
    },
    /// Compute the X-rays of a point set in the given directions
    Xray {
        /// Patch JSON file holding the points
        #[arg(long)]
        points: PathBuf,
        /// A direction as comma-separated integer coefficients over the
        /// power basis; repeat for each direction
        #[arg(long = "direction", required = true)]
        directions: Vec<String>,
    },
    /// Partition the instance grid into translation classes
    Decompose {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Enumerate the window-separable subsets of every grid class
    Separate {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Decide consistency; exit 0 = CONSISTENT, 1 = INCONSISTENT
    Check {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Construct a solution set with the prescribed X-rays, if any
    Reconstruct {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Decide whether a point set is the only one with its X-rays
    Unique {
        /// Patch JSON file holding the queried points
        #[arg(long)]
        points: PathBuf,
        #[arg(long = "direction", required = true)]
        directions: Vec<String>,
    },
    /// Render an artifact to SVG
    Render {
        /// Input JSON file
        #[arg(long)]
        input: PathBuf,
        /// Input kind: patch | grid | result | window
        #[arg(long)]
        kind: String,
        /// Pixels per unit length
        #[arg(long, default_value_t = 40.0)]
        scale: f64,
    },
}

/// Decomposition output: the grid partitioned into translation classes.
#[derive(Serialize, Deserialize)]
struct DecompositionOut {
    classes: Vec<Vec<CycNum>>,
    iterations: usize,
}

/// Separation output: one separable family per grid class.
#[derive(Serialize, Deserialize)]
struct SeparationOut {
    families: Vec<ClassFamily>,
}

#[derive(Serialize, Deserialize)]
struct ClassFamily {
    class_index: usize,
    points: Vec<CycNum>,
    members: Vec<SeparableMember>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad JSON in {}: {e}", path.display()))
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, body).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), String> {
    let mut body = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    body.push('\n');
    emit(out, &body)
}

fn load_spec(cli: &Cli) -> Result<ModelSetSpec, String> {
    let path = cli.spec.as_ref().ok_or("--spec is required for this command")?;
    read_json(path)
}

fn parse_directions(n: u32, raw: &[String]) -> Result<Vec<Direction>, String> {
    raw.iter()
        .map(|s| {
            let coeffs = s
                .split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|e| format!("bad direction {s:?}: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            Direction::new(CycNum::from_int_coeffs(n, &coeffs)).map_err(|e| e.to_string())
        })
        .collect()
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    match &cli.command {
        Command::Generate { radius } => {
            let spec = load_spec(cli)?;
            let radius: Rat = radius
                .parse()
                .map_err(|e| format!("bad radius {radius:?}: {e}"))?;
            if radius <= Rat::from_integer(0.into()) {
                return Err("radius must be positive".into());
            }
            let patch = spec.generate_patch(&radius);
            emit_json(&cli.out, &patch)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Xray { points, directions } => {
            let spec = load_spec(cli)?;
            let patch: Patch = read_json(points)?;
            let dirs = parse_directions(spec.n, directions)?;
            let inst = XRayInstance::from_points(spec, &dirs, &patch.points)
                .map_err(|e| e.to_string())?;
            emit_json(&cli.out, &inst)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose { instance } => {
            let inst: XRayInstance = read_json(instance)?;
            inst.validate().map_err(|e| e.to_string())?;
            let cls = decompose(&build_grid(&inst));
            let out = DecompositionOut {
                classes: cls
                    .classes
                    .iter()
                    .map(|c| c.iter().map(|g| g.position.clone()).collect())
                    .collect(),
                iterations: cls.iterations,
            };
            emit_json(&cli.out, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Separate { instance } => {
            let inst: XRayInstance = read_json(instance)?;
            inst.validate().map_err(|e| e.to_string())?;
            let cls = decompose(&build_grid(&inst));
            let mut families = Vec::new();
            for (ci, class) in cls.classes.iter().enumerate() {
                let positions: Vec<CycNum> =
                    class.iter().map(|g| g.position.clone()).collect();
                let family = if inst.spec.window.dim() == 0 {
                    // crystallographic case: the full class always fits
                    SeparableFamily {
                        members: vec![SeparableMember {
                            indices: (0..positions.len()).collect(),
                            witness: CycNum::zero(inst.spec.window.n_geom),
                        }],
                    }
                } else {
                    let stars: Vec<_> =
                        positions.iter().map(|z| inst.spec.star_point(z)).collect();
                    separate(&inst.spec.window, &stars)
                };
                families.push(ClassFamily {
                    class_index: ci,
                    points: positions,
                    members: family.members,
                });
            }
            emit_json(&cli.out, &SeparationOut { families })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { instance } => {
            let inst: XRayInstance = read_json(instance)?;
            let result = match inst.validate() {
                Ok(_) => consistency(&inst).map_err(|e| e.to_string())?,
                Err(cycloto_core::xray::XRayError::TotalsMismatch(_)) => TomographyResult {
                    status: TomographyStatus::Inconsistent,
                    solution: None,
                    second_solution: None,
                    witness: None,
                    provenance: None,
                },
                Err(e) => return Err(e.to_string()),
            };
            if cli.out.is_some() {
                emit_json(&cli.out, &result)?;
            }
            match result.status {
                TomographyStatus::Consistent => Ok(ExitCode::SUCCESS),
                _ => Ok(ExitCode::from(1)),
            }
        }
        Command::Reconstruct { instance } => {
            let inst: XRayInstance = read_json(instance)?;
            inst.validate().map_err(|e| e.to_string())?;
            let result = reconstruct(&inst).map_err(|e| e.to_string())?;
            emit_json(&cli.out, &result)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Unique { points, directions } => {
            let spec = load_spec(cli)?;
            let patch: Patch = read_json(points)?;
            let dirs = parse_directions(spec.n, directions)?;
            let result =
                uniqueness(&patch.points, &dirs, &spec).map_err(|e| e.to_string())?;
            emit_json(&cli.out, &result)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Render { input, kind, scale } => {
            if *scale <= 0.0 {
                return Err("scale must be positive".into());
            }
            if cli.precision < 32 {
                return Err("precision must be at least 32 bits".into());
            }
            let svg = render(input, kind, *scale, cli.precision)?;
            emit(&cli.out, &svg)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

// ---- SVG rendering ----

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#bcbd22",
];

fn coords(z: &CycNum, bits: u32) -> (f64, f64) {
    let c = z.embed(bits);
    (
        c.re.mid().to_f64().unwrap_or(0.0),
        c.im.mid().to_f64().unwrap_or(0.0),
    )
}

struct Svg {
    body: String,
    min: (f64, f64),
    max: (f64, f64),
}

impl Svg {
    fn new() -> Svg {
        Svg {
            body: String::new(),
            min: (f64::INFINITY, f64::INFINITY),
            max: (f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, (x, y): (f64, f64)) {
        self.min.0 = self.min.0.min(x);
        self.min.1 = self.min.1.min(y);
        self.max.0 = self.max.0.max(x);
        self.max.1 = self.max.1.max(y);
    }

    fn circle(&mut self, p: (f64, f64), r: f64, color: &str) {
        self.grow(p);
        // SVG y grows downward; flip the vertical axis
        self.body.push_str(&format!(
            "  <circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"{:.4}\" fill=\"{color}\"/>\n",
            p.0, -p.1, r
        ));
    }

    fn polygon(&mut self, pts: &[(f64, f64)], stroke: &str) {
        let path: Vec<String> = pts
            .iter()
            .map(|&p| {
                self.grow(p);
                format!("{:.4},{:.4}", p.0, -p.1)
            })
            .collect();
        self.body.push_str(&format!(
            "  <polygon points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"0.05\"/>\n",
            path.join(" ")
        ));
    }

    fn finish(self, scale: f64) -> String {
        let (minx, miny, maxx, maxy) = if self.body.is_empty() {
            (-1.0, -1.0, 1.0, 1.0)
        } else {
            (self.min.0, self.min.1, self.max.0, self.max.1)
        };
        let margin = 0.5;
        let (w, h) = (maxx - minx + 2.0 * margin, maxy - miny + 2.0 * margin);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" \
             viewBox=\"{:.4} {:.4} {:.4} {:.4}\">\n{}</svg>\n",
            w * scale,
            h * scale,
            minx - margin,
            -maxy - margin,
            w,
            h,
            self.body
        )
    }
}

fn render(input: &Path, kind: &str, scale: f64, bits: u32) -> Result<String, String> {
    let mut svg = Svg::new();
    match kind {
        "patch" => {
            let patch: Patch = read_json(input)?;
            for z in &patch.points {
                svg.circle(coords(z, bits), 0.08, PALETTE[0]);
            }
        }
        "grid" => {
            let dec: DecompositionOut = read_json(input)?;
            for (ci, class) in dec.classes.iter().enumerate() {
                let color = PALETTE[ci % PALETTE.len()];
                for z in class {
                    svg.circle(coords(z, bits), 0.08, color);
                }
            }
        }
        "result" => {
            let res: TomographyResult = read_json(input)?;
            for z in res.solution.iter().flatten() {
                svg.circle(coords(z, bits), 0.08, PALETTE[0]);
            }
            for z in res.second_solution.iter().flatten() {
                svg.circle(coords(z, bits), 0.05, PALETTE[1]);
            }
        }
        "window" => {
            let spec: ModelSetSpec = read_json(input)?;
            let verts: Vec<(f64, f64)> = spec
                .window
                .vertices()
                .iter()
                .map(|v| coords(&v.z, bits))
                .collect();
            if verts.is_empty() {
                return Err("window has no vertices to draw".into());
            }
            svg.polygon(&verts, PALETTE[0]);
        }
        other => return Err(format!("unknown render kind {other:?}")),
    }
    Ok(svg.finish(scale))
}
