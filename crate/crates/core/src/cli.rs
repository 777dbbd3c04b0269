//! Command-line frontend.
//!
//! Every subcommand produces one artifact that can be written as JSON, CSV
//! or plain plot data (a `#` header line followed by whitespace-separated
//! numeric columns). Failures are reported on stderr as
//! `{"code": ..., "message": ..., "context": ...}` with exit status 2 for
//! invalid input and 3 for numerical failures.
//!
//! Multi-valued point options accept plain negative numbers; other values
//! starting with `-` are passed as `--point=-e1`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::domain::DomainSpec;
use crate::envelope;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::extrapolate::Schedule;
use crate::geodesics::{chl_geodesic, disc_grid, geodesic_through, restriction_identity_check};
use crate::green::{normal_derivative_green, DEFAULT_H0, DEFAULT_HALVINGS};
use crate::julia::{
    boundary_image_estimate, condition_equivalence_check, horoball_inclusion_check, jwc_derivative_probes,
    lambda_estimate, MapSpec, SamplingPlan,
};
use crate::kernels::{omega_ball, omega_for_ball_domain, KernelValue};
use crate::linalg::{unit, CVector};
use crate::reproducing::{reproduce, riesz_correction_1d, sphere_quadrature};

#[derive(Debug, Parser)]
#[command(name = "plurikernel", version, about = "Pluricomplex Poisson kernels and boundary behaviour of holomorphic maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate Ω_{D,p} at points (closed form or certified interval).
    Kernel(KernelArgs),
    /// Sandwich bounds, tangent balls and the normal-ray bound ratio.
    Bounds(BoundsArgs),
    /// Complex geodesic with a boundary pole and its restriction identity.
    Geodesic(GeodesicArgs),
    /// Normal derivative of the Green function against the kernel.
    Green(GreenArgs),
    /// Boundary reproducing formula on the sphere.
    Reproduce(ReproduceArgs),
    /// Boundary dilation coefficient, horoball inclusions and derivative probes.
    Julia(JuliaArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plotdata,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Domain as JSON, shorthand (`disc`, `unit_ball:2`, `ellipsoid:1,2`) or a path to a JSON file.
    #[arg(long)]
    pub domain: String,
    /// Boundary pole: `e1`, `-e2`, or comma-separated components.
    #[arg(long, allow_hyphen_values = true)]
    pub pole: String,
    #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
    pub point: Vec<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub domain: String,
    #[arg(long, allow_hyphen_values = true)]
    pub pole: String,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub point: Vec<String>,
    /// Also sample the bound ratio along the inward normal.
    #[arg(long)]
    pub ray: bool,
    /// Finest level k of the schedule h = 2^{-k}.
    #[arg(long, default_value_t = 24)]
    pub levels: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[arg(long)]
    pub domain: String,
    #[arg(long, allow_hyphen_values = true)]
    pub pole: String,
    /// Interior point the geodesic passes through.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "direction")]
    pub through: Option<String>,
    /// Boundary direction v with Re⟨v, ν_p⟩ > 0 (CHL normalization).
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Option<String>,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.95)]
    pub r_max: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    #[arg(long)]
    pub domain: String,
    #[arg(long, allow_hyphen_values = true)]
    pub pole: String,
    /// Poles of the Green function (interior points).
    #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
    pub point: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_H0)]
    pub h0: f64,
    #[arg(long, default_value_t = DEFAULT_HALVINGS)]
    pub halvings: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long)]
    pub domain: String,
    /// Real test function in z1, z2, ... (real part is taken).
    #[arg(long)]
    pub f: String,
    /// Laplacian of f; on the disc adds the area correction for subharmonic f.
    #[arg(long)]
    pub laplacian: Option<String>,
    #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
    pub z: Vec<String>,
    /// Nodes per angular direction of the sphere rule.
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    /// Radial and angular size of the polar grid for the area correction.
    #[arg(long, default_value_t = 200)]
    pub polar: usize,
    /// Rows with |error| above this are flagged.
    #[arg(long, default_value_t = 1e-5)]
    pub tolerance: f64,
    /// Write the quadrature nodes and weights as CSV.
    #[arg(long)]
    pub export_rule: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct JuliaArgs {
    /// Map as JSON, e.g. `{"blaschke":{"a":0.5}}`, or a path to a JSON file.
    #[arg(long)]
    pub map: String,
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    /// Boundary image point; estimated along the normal ray when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Source dimension, when p does not fix it.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Horoball radii for the inclusion check.
    #[arg(long, num_args = 1..)]
    pub radii: Vec<f64>,
    #[arg(long, default_value_t = 500)]
    pub per_radius: usize,
    /// Dilation used for the inclusion check instead of the estimate.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Tilt of the probe approach direction away from the normal.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub aperture: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Kernel(_) => "kernel",
            Command::Bounds(_) => "bounds",
            Command::Geodesic(_) => "geodesic",
            Command::Green(_) => "green",
            Command::Reproduce(_) => "reproduce",
            Command::Julia(_) => "julia",
        }
    }

    fn output(&self) -> &OutputArgs {
        match self {
            Command::Kernel(a) => &a.out,
            Command::Bounds(a) => &a.out,
            Command::Geodesic(a) => &a.out,
            Command::Green(a) => &a.out,
            Command::Reproduce(a) => &a.out,
            Command::Julia(a) => &a.out,
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Reproduce(_) => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// Result of one subcommand in all three renderings.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub json: Value,
    pub csv_header: Vec<String>,
    pub csv_rows: Vec<Vec<String>>,
    pub plot_header: Vec<String>,
    pub plot_rows: Vec<Vec<f64>>,
}

impl Artifact {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = self.csv_header.join(",");
                s.push('\n');
                for row in &self.csv_rows {
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Plotdata => {
                let mut s = format!("# {}\n", self.plot_header.join(" "));
                for row in &self.plot_rows {
                    let cols: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
                    s.push_str(&cols.join(" "));
                    s.push('\n');
                }
                s
            }
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: &'static str,
    message: String,
    exit: i32,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure {
            code: e.code(),
            message: e.to_string(),
            exit: if e.is_numerical() { 3 } else { 2 },
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: "io_error",
        message: format!("{}: {e}", path.display()),
        exit: 2,
    }
}

/// Sets the global rayon pool size from `PLURIKERNEL_THREADS`, if set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("PLURIKERNEL_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses arguments (including the program name) and runs, returning the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let report = json!({"code": "usage", "message": e.to_string().trim_end(), "context": {}});
            let _ = writeln!(err, "{report}");
            return 2;
        }
    };
    let name = cli.command.name();
    match execute(&cli.command).and_then(|a| emit(&cli.command, &a, out)) {
        Ok(()) => 0,
        Err(f) => {
            let report = json!({"code": f.code, "message": f.message, "context": {"subcommand": name}});
            let _ = writeln!(err, "{report}");
            f.exit
        }
    }
}

fn emit(cmd: &Command, artifact: &Artifact, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let o = cmd.output();
    let text = artifact.render(o.format.unwrap_or(cmd.default_format()));
    match &o.output {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| io_failure(Path::new("<stdout>"), e)),
    }
}

/// Runs a parsed command and returns its artifact.
pub fn execute_command(cmd: &Command) -> Result<Artifact> {
    match cmd {
        Command::Kernel(a) => kernel_cmd(a),
        Command::Bounds(a) => bounds_cmd(a),
        Command::Geodesic(a) => geodesic_cmd(a),
        Command::Green(a) => green_cmd(a),
        Command::Reproduce(a) => reproduce_cmd(a),
        Command::Julia(a) => julia_cmd(a),
    }
}

fn execute(cmd: &Command) -> std::result::Result<Artifact, Failure> {
    if let Command::Reproduce(a) = cmd {
        if let Some(path) = &a.export_rule {
            let n = load_domain(&a.domain)?.dim();
            let rule = sphere_quadrature(n, a.resolution)?;
            let file = fs::File::create(path).map_err(|e| io_failure(path, e))?;
            rule.write_csv(std::io::BufWriter::new(file))
                .map_err(|e| io_failure(path, e))?;
        }
    }
    Ok(execute_command(cmd)?)
}

fn read_inline_or_file(text: &str) -> Result<String> {
    let path = Path::new(text);
    if !text.trim_start().starts_with(['{', '"']) && path.is_file() {
        return fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())));
    }
    Ok(text.to_string())
}

pub fn load_domain(text: &str) -> Result<DomainSpec> {
    DomainSpec::parse(&read_inline_or_file(text)?)
}

pub fn load_map(text: &str) -> Result<MapSpec> {
    MapSpec::parse(&read_inline_or_file(text)?)
}

/// Parses `e3`, `-e1`, `0`, or comma-separated constant expressions
/// (`0.3,0`, `1/sqrt(2),i/sqrt(2)`).
pub fn parse_point(text: &str, dim: Option<usize>) -> Result<CVector> {
    let t = text.trim();
    let (sign, rest) = match t.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, t),
    };
    if let Some(k) = rest.strip_prefix('e').and_then(|k| k.parse::<usize>().ok()) {
        let n = dim.unwrap_or(k.max(1));
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!("basis vector {t} out of range for dimension {n}")));
        }
        return Ok(unit(n, k - 1) * Complex64::new(sign, 0.0));
    }
    if t == "0" {
        return Ok(CVector::zeros(dim.unwrap_or(1)));
    }
    let mut comps = Vec::new();
    for part in t.split(',') {
        let e = Expr::parse(part)?;
        if e.dimension() > 0 {
            return Err(Error::Parse(format!("point component {part:?} must be a constant")));
        }
        comps.push(e.eval(&CVector::zeros(0)));
    }
    let v = CVector::from_vec(comps);
    if let Some(n) = dim {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
    }
    Ok(v)
}

fn pairs(z: &CVector) -> Vec<[f64; 2]> {
    z.iter().map(|c| [c.re, c.im]).collect()
}

fn coord_header(n: usize) -> Vec<String> {
    (1..=n).flat_map(|j| [format!("re_z{j}"), format!("im_z{j}")]).collect()
}

fn coord_cells(z: &CVector) -> Vec<String> {
    z.iter().flat_map(|c| [c.re.to_string(), c.im.to_string()]).collect()
}

fn kernel_json(v: &KernelValue) -> Value {
    serde_json::to_value(v).expect("kernel value json")
}

fn kernel_cmd(a: &KernelArgs) -> Result<Artifact> {
    let domain = load_domain(&a.domain)?;
    let n = domain.dim();
    let p = parse_point(&a.pole, Some(n))?;
    let mut entries = Vec::new();
    let mut csv_rows = Vec::new();
    let mut plot_rows = Vec::new();
    for (i, s) in a.point.iter().enumerate() {
        let z = parse_point(s, Some(n))?;
        let v = envelope::kernel(&domain, &p, &z)?;
        let mut row = coord_cells(&z);
        row.extend([v.lower().to_string(), v.upper().to_string(), provenance_name(&v)]);
        csv_rows.push(row);
        plot_rows.push(vec![i as f64, v.lower(), v.upper()]);
        entries.push((z, v));
    }
    let json = if entries.len() == 1 {
        kernel_json(&entries[0].1)
    } else {
        Value::Array(
            entries
                .iter()
                .map(|(z, v)| {
                    let mut o = kernel_json(v);
                    o["point"] = json!(pairs(z));
                    o
                })
                .collect(),
        )
    };
    let mut csv_header = coord_header(n);
    csv_header.extend(["lower", "upper", "provenance"].map(String::from));
    Ok(Artifact {
        json,
        csv_header,
        csv_rows,
        plot_header: ["index", "lower", "upper"].map(String::from).to_vec(),
        plot_rows,
    })
}

fn provenance_name(v: &KernelValue) -> String {
    serde_json::to_value(v.provenance())
        .ok()
        .and_then(|x| x.as_str().map(String::from))
        .unwrap_or_default()
}

fn bounds_cmd(a: &BoundsArgs) -> Result<Artifact> {
    let domain = load_domain(&a.domain)?;
    let n = domain.dim();
    let p = parse_point(&a.pole, Some(n))?;
    let balls = domain.tangent_balls(&p)?;
    let mut points = Vec::new();
    let mut csv_rows = Vec::new();
    let mut index_rows = Vec::new();
    for (i, s) in a.point.iter().enumerate() {
        let z = parse_point(s, Some(n))?;
        let v = envelope::sandwich_bounds(&domain, &p, &z)?;
        let mut o = kernel_json(&v);
        o["point"] = json!(pairs(&z));
        points.push(o);
        let mut row = coord_cells(&z);
        row.extend([v.lower().to_string(), v.upper().to_string(), provenance_name(&v)]);
        csv_rows.push(row);
        index_rows.push(vec![i as f64, v.lower(), v.upper()]);
    }
    let mut json = json!({
        "domain": domain.to_json(),
        "pole": pairs(&p),
        "inner_ball": {"center": pairs(&balls.inner.center), "radius": balls.inner.radius},
        "outer_ball": {"center": pairs(&balls.outer.center), "radius": balls.outer.radius},
        "points": points,
    });
    let (plot_header, plot_rows) = if a.ray {
        let nr = envelope::normal_ratio(&domain, &p, Schedule::new(1, a.levels))?;
        let rows = nr.samples.iter().map(|&(h, r)| vec![h, r]).collect();
        json["normal_ratio"] = serde_json::to_value(&nr).expect("json");
        (vec!["h".to_string(), "upper_over_lower".to_string()], rows)
    } else {
        (["index", "lower", "upper"].map(String::from).to_vec(), index_rows)
    };
    let mut csv_header = coord_header(n);
    csv_header.extend(["lower", "upper", "provenance"].map(String::from));
    Ok(Artifact {
        json,
        csv_header,
        csv_rows,
        plot_header,
        plot_rows,
    })
}

fn geodesic_cmd(a: &GeodesicArgs) -> Result<Artifact> {
    let domain = load_domain(&a.domain)?;
    let n = domain.dim();
    let p = parse_point(&a.pole, Some(n))?;
    let g = match (&a.through, &a.direction) {
        (Some(z), None) => geodesic_through(&domain, &parse_point(z, Some(n))?, &p, true)?,
        (None, Some(v)) => chl_geodesic(&domain, &p, &parse_point(v, Some(n))?)?,
        _ => {
            return Err(Error::InvalidArgument(
                "give exactly one of --through or --direction".into(),
            ))
        }
    };
    if !(a.r_max > 0.0 && a.r_max < 1.0) {
        return Err(Error::InvalidArgument("r-max must lie in (0, 1)".into()));
    }
    let deviation = restriction_identity_check(&domain, &g, &disc_grid(a.grid, a.r_max))?;
    let theta = g.theta_of_derivative();
    let mut csv_rows = Vec::new();
    let mut plot_rows = Vec::new();
    let steps = a.grid.max(2);
    for k in 0..steps {
        let t = -a.r_max + 2.0 * a.r_max * k as f64 / (steps - 1) as f64;
        let w = g.phi(Complex64::new(t, 0.0));
        let omega = omega_for_ball_domain(&domain, &p, &w)?;
        let mut row = vec![t.to_string(), omega.to_string()];
        row.extend(coord_cells(&w));
        csv_rows.push(row);
        plot_rows.push(vec![t, omega]);
    }
    let mut csv_header = vec!["t".to_string(), "omega".to_string()];
    csv_header.extend(coord_header(n));
    Ok(Artifact {
        json: json!({
            "boundary_data": g.boundary_data(),
            "theta_of_derivative": [theta.re, theta.im],
            "restriction_deviation": deviation,
            "grid_points": a.grid,
        }),
        csv_header,
        csv_rows,
        plot_header: vec!["t".into(), "omega".into()],
        plot_rows,
    })
}

fn green_cmd(a: &GreenArgs) -> Result<Artifact> {
    let domain = load_domain(&a.domain)?;
    let n = domain.dim();
    let p = parse_point(&a.pole, Some(n))?;
    let mut entries = Vec::new();
    let mut csv_rows = Vec::new();
    let mut plot_rows = Vec::new();
    for (i, s) in a.point.iter().enumerate() {
        let z = parse_point(s, Some(n))?;
        let nd = normal_derivative_green(&domain, &z, &p, a.h0, a.halvings)?;
        let omega = omega_ball(&p, &z)?;
        let deviation = (nd.value - omega).abs();
        let mut row = coord_cells(&z);
        row.extend([nd.value, nd.error, omega, deviation].map(|v| v.to_string()));
        csv_rows.push(row);
        if i == 0 {
            plot_rows = nd.step_sequence.iter().map(|&(h, q)| vec![h, q]).collect();
        }
        entries.push(json!({
            "point": pairs(&z),
            "normal_derivative": nd,
            "omega": omega,
            "deviation": deviation,
        }));
    }
    let mut csv_header = coord_header(n);
    csv_header.extend(["normal_derivative", "error", "omega", "deviation"].map(String::from));
    Ok(Artifact {
        json: json!({"pole": pairs(&p), "points": entries}),
        csv_header,
        csv_rows,
        plot_header: vec!["h".into(), "quotient".into()],
        plot_rows,
    })
}

fn reproduce_cmd(a: &ReproduceArgs) -> Result<Artifact> {
    let domain = load_domain(&a.domain)?;
    let n = domain.dim();
    if a.resolution < 4 {
        return Err(Error::InvalidArgument("resolution must be at least 4".into()));
    }
    if !(a.tolerance > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let f = Expr::parse(&a.f)?;
    if f.dimension() > n {
        return Err(Error::DimensionMismatch { expected: n, got: f.dimension() });
    }
    let lap = a.laplacian.as_deref().map(Expr::parse).transpose()?;
    if lap.is_some() && n != 1 {
        return Err(Error::Unsupported("the area correction is available on the disc only".into()));
    }
    let rule = sphere_quadrature(n, a.resolution)?;
    let mut rows = Vec::new();
    let mut csv_rows = Vec::new();
    let mut plot_rows = Vec::new();
    for (i, s) in a.z.iter().enumerate() {
        let z = parse_point(s, Some(n))?;
        let exact = f.eval_real(&z);
        let (value, correction) = match &lap {
            Some(l) => {
                let one = |w: Complex64| CVector::from_element(1, w);
                let r = riesz_correction_1d(
                    |w| f.eval_real(&one(w)),
                    |w| l.eval_real(&one(w)),
                    z[0],
                    &rule,
                    a.polar,
                    a.polar,
                )?;
                (r.value, Some(r.correction))
            }
            None => (reproduce(&domain, |xi| f.eval_real(xi), &z, &rule)?, None),
        };
        let error = value - exact;
        let ok = error.abs() <= a.tolerance;
        let mut row = coord_cells(&z);
        row.extend([exact, value, error].map(|v| v.to_string()));
        row.push(ok.to_string());
        csv_rows.push(row);
        plot_rows.push(vec![i as f64, exact, value]);
        rows.push(json!({
            "z": pairs(&z),
            "exact": exact,
            "reproduced": value,
            "error": error,
            "correction": correction,
            "within_tolerance": ok,
        }));
    }
    let mut csv_header = coord_header(n);
    csv_header.extend(["exact", "reproduced", "error", "within_tolerance"].map(String::from));
    Ok(Artifact {
        json: json!({
            "f": a.f,
            "resolution": a.resolution,
            "nodes": rule.len(),
            "mass": rule.mass(),
            "rows": rows,
        }),
        csv_header,
        csv_rows,
        plot_header: vec!["index".into(), "exact".into(), "reproduced".into()],
        plot_rows,
    })
}

fn julia_cmd(a: &JuliaArgs) -> Result<Artifact> {
    let map = load_map(&a.map)?;
    let p = parse_point(&a.p, a.n)?;
    let n = p.len();
    let m = map.validate(n)?;
    let schedule = Schedule::default();
    let q = match &a.q {
        Some(s) => parse_point(s, Some(m))?,
        None => boundary_image_estimate(&map, n, &p, schedule)?,
    };
    let plan = SamplingPlan {
        samples: a.samples,
        seed: a.seed,
        schedule,
    };
    let mut report = lambda_estimate(&map, n, &p, &q, plan)?;
    let z0 = CVector::zeros(n);
    let z0t = CVector::zeros(m);
    let conditions = condition_equivalence_check(&map, n, &p, &q, &z0, &z0t, schedule)?;
    let mut json = json!({"map": map.to_json(), "p": pairs(&p)});
    if !a.radii.is_empty() {
        let lambda = match (a.lambda, report.lambda_estimate.finite()) {
            (Some(l), _) => l,
            (None, Some(l)) => l,
            (None, None) => {
                return Err(Error::InfiniteDilation(
                    "horoball inclusion needs a finite dilation; pass --lambda to test one".into(),
                ))
            }
        };
        let inc = horoball_inclusion_check(&map, n, &p, &q, lambda, &a.radii, a.per_radius, a.seed)?;
        report.inclusion_violations = inc.violations.clone();
        report.undetermined_count = inc.undetermined_count;
        json["inclusion"] = json!({"lambda": inc.lambda, "radii": inc.radii});
    }
    if report.lambda_estimate.is_finite() {
        let probes = jwc_derivative_probes(&map, n, &p, &q, a.aperture, schedule)?;
        json["probes"] = serde_json::to_value(&probes).expect("json");
    }
    json["report"] = serde_json::to_value(&report).expect("json");
    json["conditions"] = serde_json::to_value(&conditions).expect("json");
    let rows: Vec<Vec<f64>> = report.ray.iter().map(|&(h, r)| vec![h, r]).collect();
    Ok(Artifact {
        json,
        csv_header: vec!["h".into(), "ratio".into()],
        csv_rows: rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect(),
        plot_header: vec!["h".into(), "ratio".into()],
        plot_rows: rows,
    })
}
