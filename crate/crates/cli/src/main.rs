use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use arealength::extremal::{ExtremalFamily, LensOptimum};
use arealength::isoperimetric::{polygon_enclosing_cap, random_closed_polygon};
use arealength::lens::{find_h0, h, zeta0, zeta1};
use arealength::polycurve::{Convexity, GeodesicPolygon};
use arealength::verify::{builtin_map, InequalityReport, MapSpec, Verdict, Verifier, VerifyError};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Area/length computations for maps into the Riemann sphere.
///
/// Exit status: 0 on success (or when every checked inequality holds),
/// 1 when a check fails or is inconclusive, 2 on usage errors.
#[derive(Parser, Debug)]
#[command(name = "arealength", version, about)]
struct Cli {
    /// Absolute quadrature / optimizer tolerance.
    #[arg(long, global = true, default_value_t = 1e-8, env = "RATIO_TOL",
          value_parser = positive_float, allow_negative_numbers = true)]
    tol: f64,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maximize h on [0, 1]: prints tau0, h0 and the iteration count.
    H0,
    /// Tabulate tau, zeta0, zeta1 and h on an even grid including both ends.
    HTable {
        /// Number of grid points (at least 2).
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..), allow_negative_numbers = true)]
        n: u32,
    },
    /// Area, length, ratio and deficit of the extremal lens coverings.
    Extremal {
        /// Comma-separated indices, each at least 1.
        #[arg(long, value_delimiter = ',', required = true,
              value_parser = clap::value_parser!(u64).range(1..), allow_negative_numbers = true)]
        m: Vec<u64>,
    },
    /// Check an inequality on a built-in map or a map spec file.
    Verify {
        /// Built-in map name.
        #[arg(long, conflicts_with = "spec_file", required_unless_present = "spec_file")]
        map: Option<String>,
        /// JSON map spec: {"kind":"polynomial","coeffs":[...]} or {"kind":"builtin","name":...}.
        #[arg(long)]
        spec_file: Option<PathBuf>,
        /// Which inequality to check.
        #[arg(long, value_enum, default_value_t = Which::Main)]
        which: Which,
    },
    /// Random short closed geodesic polygons and their hemisphere margins.
    Rado {
        /// Number of polygons (at least 1).
        #[arg(long, default_value_t = 1000,
              value_parser = clap::value_parser!(u64).range(1..), allow_negative_numbers = true)]
        count: u64,
    },
    /// Classify a geodesic polygon read from a JSON file.
    Classify {
        /// {"vertices":[{"re":x,"im":y} | "inf", ...],"closed":bool,"witnesses":[null | [x,y,z], ...]}
        file: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    Main,
    Good,
    Good2,
}

fn positive_float(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive finite number, got {s}"))
    }
}

enum Failure {
    /// Checked and failed or inconclusive.
    Check(String),
    Usage(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Out {
    format: Format,
    sink: Box<dyn Write>,
}

impl Out {
    fn record<T: Serialize>(&mut self, value: &T) -> Result<(), Failure> {
        match self.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut self.sink, value).map_err(io::Error::from)?;
                writeln!(self.sink)?;
            }
            Format::Csv => self.rows(std::slice::from_ref(value))?,
        }
        Ok(())
    }

    fn rows<T: Serialize>(&mut self, rows: &[T]) -> Result<(), Failure> {
        match self.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut self.sink, rows).map_err(io::Error::from)?;
                writeln!(self.sink)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut self.sink);
                for r in rows {
                    w.serialize(r).map_err(|e| Failure::Usage(e.to_string()))?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct H0Row {
    tau0: f64,
    h0: f64,
    iterations: usize,
    bracket_width: f64,
}

#[derive(Serialize)]
struct HRow {
    tau: f64,
    zeta0: f64,
    zeta1: f64,
    h: f64,
}

#[derive(Serialize)]
struct ExtremalRow {
    m: u64,
    area: f64,
    length: f64,
    ratio: f64,
    deficit: f64,
}

#[derive(Serialize)]
struct ReportRow<'a> {
    map_label: &'a str,
    #[serde(rename = "A")]
    area: f64,
    #[serde(rename = "L")]
    length: f64,
    bound_name: &'a str,
    bound_value: f64,
    slack: f64,
    holds: bool,
    verdict: Verdict,
    quad_tol: f64,
    area_error: f64,
    length_error: f64,
    combined_error: f64,
    omission_margin: Option<f64>,
}

impl<'a> From<&'a InequalityReport> for ReportRow<'a> {
    fn from(r: &'a InequalityReport) -> Self {
        Self {
            map_label: &r.map_label,
            area: r.area,
            length: r.length,
            bound_name: &r.bound_name,
            bound_value: r.bound_value,
            slack: r.slack,
            holds: r.holds,
            verdict: r.verdict(),
            quad_tol: r.tolerances.quad_tol,
            area_error: r.tolerances.area_error,
            length_error: r.tolerances.length_error,
            combined_error: r.tolerances.combined_error,
            omission_margin: r.tolerances.omission_margin,
        }
    }
}

#[derive(Serialize)]
struct RadoSummary {
    seed: u64,
    count: u64,
    max_length: f64,
    min_margin: f64,
    all_positive: bool,
}

#[derive(Serialize)]
struct VertexRow {
    index: usize,
    re: Option<f64>,
    im: Option<f64>,
    infinite: bool,
    natural: bool,
    convexity: Option<Convexity>,
}

#[derive(Serialize)]
struct Classification {
    length: f64,
    natural_edge_lengths: Vec<f64>,
    vertices: Vec<VertexRow>,
    ray_arcs: Vec<arealength::polycurve::RayArc>,
    ray_contacts: usize,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let sink: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(io::BufWriter::new(fs::File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = Out {
        format: cli.format,
        sink,
    };
    match cli.command {
        Command::H0 => {
            let r = find_h0(cli.tol).map_err(|e| Failure::Usage(e.to_string()))?;
            out.record(&H0Row {
                tau0: r.tau0,
                h0: r.h0,
                iterations: r.iterations,
                bracket_width: r.bracket_width,
            })?;
        }
        Command::HTable { n } => {
            let rows: Vec<HRow> = (0..n)
                .map(|i| {
                    let tau = if i + 1 == n { 1.0 } else { i as f64 / (n - 1) as f64 };
                    HRow {
                        tau,
                        zeta0: zeta0(tau).expect("grid in [0, 1]"),
                        zeta1: zeta1(tau).expect("grid in [0, 1]"),
                        h: h(tau).expect("grid in [0, 1]"),
                    }
                })
                .collect();
            out.rows(&rows)?;
        }
        Command::Extremal { m } => {
            let optimum = LensOptimum::compute().map_err(|e| Failure::Usage(e.to_string()))?;
            let rows: Vec<ExtremalRow> = m
                .iter()
                .map(|&m| {
                    let f = ExtremalFamily::with_optimum(optimum, m);
                    ExtremalRow {
                        m,
                        area: f.area,
                        length: f.length,
                        ratio: f.ratio(),
                        deficit: f.deficit(),
                    }
                })
                .collect();
            out.rows(&rows)?;
        }
        Command::Verify {
            map,
            spec_file,
            which,
        } => {
            let f = match (map, spec_file) {
                (Some(name), _) => builtin_map(&name),
                (None, Some(path)) => MapSpec::from_json(&fs::read_to_string(&path)?).and_then(|s| s.build()),
                (None, None) => unreachable!("clap requires one of --map / --spec-file"),
            }
            .map_err(|e| Failure::Usage(e.to_string()))?;
            let verifier = Verifier::new(cli.tol)
                .map_err(|e| Failure::Usage(e.to_string()))?
                .with_seed(cli.seed);
            let reports = match which {
                Which::Main => verifier.check_main(&f).map(|r| vec![r]),
                Which::Good => verifier.check_good(&f),
                Which::Good2 => verifier.check_good2(&f),
            }
            .map_err(|e| match e {
                VerifyError::UnknownMap(_) | VerifyError::MapSpec(_) => Failure::Usage(e.to_string()),
                other => Failure::Check(other.to_string()),
            })?;
            match cli.format {
                Format::Json => out.rows(&reports)?,
                Format::Csv => out.rows(&reports.iter().map(ReportRow::from).collect::<Vec<_>>())?,
            }
            if let Some(bad) = reports.iter().find(|r| r.verdict() != Verdict::Holds) {
                return Err(Failure::Check(format!(
                    "{} bound for {}: {:?} (slack {:e}, error {:e})",
                    bad.bound_name,
                    bad.map_label,
                    bad.verdict(),
                    bad.slack,
                    bad.tolerances.combined_error
                )));
            }
        }
        Command::Rado { count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut min_margin = f64::INFINITY;
            let mut max_length: f64 = 0.0;
            for k in 0..count {
                let p = random_closed_polygon(&mut rng, std::f64::consts::TAU - 0.01);
                let cap = polygon_enclosing_cap(&p, cli.seed.wrapping_add(k))
                    .map_err(|e| Failure::Usage(e.to_string()))?;
                min_margin = min_margin.min(cap.margin);
                max_length = max_length.max(p.length());
            }
            let summary = RadoSummary {
                seed: cli.seed,
                count,
                max_length,
                min_margin,
                all_positive: min_margin > 0.0,
            };
            out.record(&summary)?;
            if !summary.all_positive {
                return Err(Failure::Check(format!("minimum margin {min_margin:e} is not positive")));
            }
        }
        Command::Classify { file } => {
            let poly = GeodesicPolygon::from_json(&fs::read_to_string(&file)?)
                .and_then(|p| p.normalize())
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let np = poly.natural_partition();
            let cut = poly.cut_against_ray().map_err(|e| Failure::Check(e.to_string()))?;
            let vertices = poly
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let z = v.value().finite();
                    VertexRow {
                        index: i,
                        re: z.map(|z| z.re),
                        im: z.map(|z| z.im),
                        infinite: z.is_none(),
                        natural: np.natural[i],
                        convexity: poly.is_convex_at(i).ok(),
                    }
                })
                .collect();
            match cli.format {
                Format::Json => out.record(&Classification {
                    length: poly.length(),
                    natural_edge_lengths: np.edges.iter().map(|e| e.length).collect(),
                    vertices,
                    ray_arcs: cut.arcs,
                    ray_contacts: cut.intersections.len(),
                })?,
                Format::Csv => out.rows(&vertices)?,
            }
        }
    }
    out.sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
