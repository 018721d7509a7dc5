//! The `toric` command-line tool.
//!
//! Exit codes: `0` success, `2` unreadable or malformed input, `3` input that
//! fails fan validation, `4` input the library does not support, `1`
//! anything else.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::cone::{Cone, IdealGeneration};
use crate::divisor::{class_group, divisor_polytope, format_rational, TWeilDivisor};
use crate::error::Error;
use crate::fan::{resolve_2d, weighted_projective_fan, Fan, FanDocument, PolytopeDocument};
use crate::lattice::{LatticeVector, Primal, Vector};
use crate::moment::{
    classify_contact, contact_divisor, convexity_report_with_tolerance, projectivized_tangent_fan, sample_moment_image,
    INSIDE_TOLERANCE,
};

#[derive(Debug, Parser)]
#[command(name = "toric", version, about = "Exact toric geometry from fans, cones and divisors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of random torus samples for `moment`.
    #[arg(long, global = true, default_value_t = 1000)]
    pub samples: usize,
    /// Write the main artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Containment tolerance for `moment`, within [1e-15, 1e-3].
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a fan and report its invariants.
    Check {
        #[arg(long)]
        fan: PathBuf,
    },
    /// Dual cone.
    Dual {
        #[arg(long)]
        cone: PathBuf,
    },
    /// Hilbert basis of a cone and the binomial relations among it.
    Hilbert {
        #[arg(long)]
        cone: PathBuf,
    },
    /// Normal fan of a lattice polytope.
    PolytopeFan {
        #[arg(long)]
        polytope: PathBuf,
    },
    /// Positivity report and polytope of a divisor.
    Divisor {
        #[arg(long)]
        divisor: PathBuf,
    },
    /// Sample the momentum map; CSV to `--out` (or stdout), report after.
    Moment {
        #[arg(long, conflicts_with = "fan", required_unless_present = "fan")]
        divisor: Option<PathBuf>,
        /// Use `-K/(n+1)` on this fan instead of an explicit divisor.
        #[arg(long)]
        fan: Option<PathBuf>,
    },
    /// Decide whether a smooth complete fan carries a contact structure.
    ClassifyContact {
        #[arg(long)]
        fan: PathBuf,
    },
    /// Minimal resolution of a two-dimensional cone.
    Resolve2d {
        #[arg(long)]
        cone: PathBuf,
    },
    /// Fan of a weighted projective space.
    Wps {
        #[arg(required = true, num_args = 2..)]
        weights: Vec<u64>,
    },
    /// Fan of the projectivized tangent bundle of `(P^1)^m`.
    Ptbundle { m: usize },
    /// Product of two fans.
    Product {
        #[arg(long, required = true, num_args = 1)]
        fan: Vec<PathBuf>,
    },
}

/// Cone document: `rank`, `rays` and optional `lineality` generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeDocument {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lineality: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FanRef {
    Path(PathBuf),
    Inline(FanDocument),
}

/// Divisor document: `fan` (path relative to the document, or inline) and
/// `coeffs`, one per ray in file order.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorDocument {
    pub fan: FanRef,
    pub coeffs: Vec<i64>,
}

#[derive(Serialize)]
struct HilbertDocument {
    rank: usize,
    rays: Vec<Vec<i64>>,
    hilbert_basis: Vec<Vec<i64>>,
    relations: Vec<String>,
    ideal: &'static str,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn parse(msg: impl Into<String>) -> Self {
        Failure { code: 2, message: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidFan(_) => 3,
            Error::Unsupported(_) | Error::NotCartier { .. } | Error::IncompatibleFan { .. } => 4,
            Error::Dimension { .. } | Error::Degenerate(_) => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::parse(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

fn fan_from_document(doc: &FanDocument) -> CliResult<Fan> {
    let fan = doc.to_fan_unchecked().map_err(|e| Failure { code: 3, message: e.to_string() })?;
    let report = fan.validate();
    if !report.is_valid() {
        return Err(Failure { code: 3, message: format!("valid: false\nviolations: {report}") });
    }
    // Re-assemble through the validating constructor so that listed faces
    // of other cones are folded away.
    Ok(Fan::new(fan.rank(), fan.rays().to_vec(), fan.max_cone_indices().to_vec())?)
}

fn load_fan(path: &Path) -> CliResult<Fan> {
    fan_from_document(&read_json::<FanDocument>(path)?)
}

fn load_cone(path: &Path) -> CliResult<Cone<Primal>> {
    let doc: ConeDocument = read_json(path)?;
    let mut gens: Vec<LatticeVector> = doc.rays.iter().map(|r| LatticeVector::from_i64(r)).collect();
    for l in &doc.lineality {
        let v = LatticeVector::from_i64(l);
        gens.push(-&v);
        gens.push(v);
    }
    Ok(Cone::new(doc.rank, gens)?)
}

fn load_divisor(path: &Path) -> CliResult<TWeilDivisor> {
    let doc: DivisorDocument = read_json(path)?;
    let fan = match &doc.fan {
        FanRef::Inline(f) => fan_from_document(f)?,
        FanRef::Path(p) => load_fan(&path.parent().unwrap_or(Path::new(".")).join(p))?,
    };
    TWeilDivisor::from_i64(&fan, &doc.coeffs)
        .map_err(|_| Failure::parse(format!("{}: expected {} coefficients", path.display(), fan.rays().len())))
}

fn to_i64_rows<S: crate::lattice::Side>(vs: &[Vector<S>]) -> CliResult<Vec<Vec<i64>>> {
    vs.iter()
        .map(|v| v.to_i64().ok_or_else(|| Failure { code: 4, message: "coordinate exceeds 64 bits".into() }))
        .collect()
}

fn cone_document<S: crate::lattice::Side>(c: &Cone<S>) -> CliResult<ConeDocument> {
    Ok(ConeDocument { rank: c.rank(), rays: to_i64_rows(c.rays())?, lineality: to_i64_rows(c.lineality())? })
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn fan_json(f: &Fan) -> CliResult<String> {
    Ok(json(&FanDocument::from_fan(f)?))
}

/// Write via a temporary file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure { code: 1, message: format!("{}: {e}", path.display()) };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn check_report(f: &Fan) -> CliResult<String> {
    let mut r = String::new();
    let complete = f.is_complete();
    writeln!(r, "valid: true").unwrap();
    writeln!(r, "rank: {}", f.rank()).unwrap();
    writeln!(r, "rays: {}", f.rays().len()).unwrap();
    writeln!(r, "max_cones: {}", f.max_cone_indices().len()).unwrap();
    writeln!(r, "smooth: {}", yes_no(f.is_smooth())).unwrap();
    writeln!(r, "simplicial: {}", yes_no(f.is_simplicial())).unwrap();
    writeln!(r, "complete: {}", yes_no(complete)).unwrap();
    match f.euler_characteristic() {
        Ok(chi) => writeln!(r, "euler_characteristic: {chi}").unwrap(),
        Err(_) => writeln!(r, "euler_characteristic: undefined (fan not complete)").unwrap(),
    }
    writeln!(r, "fundamental_group: {}", f.fundamental_group()?).unwrap();
    match class_group(f) {
        Ok(g) => writeln!(r, "class_group: {}", g.group()).unwrap(),
        Err(_) => writeln!(r, "class_group: undefined (rays do not span)").unwrap(),
    }
    Ok(r)
}

fn rational_point(v: &[crate::lattice::Rat]) -> String {
    format!("({})", v.iter().map(format_rational).collect::<Vec<_>>().join(", "))
}

pub fn divisor_report(d: &TWeilDivisor) -> CliResult<String> {
    let mut r = String::new();
    let f = d.fan();
    writeln!(r, "divisor: {d}").unwrap();
    if let Ok(g) = class_group(f) {
        writeln!(r, "class: {}", g.class_of(d)?).unwrap();
    }
    match d.to_cartier() {
        Ok(c) => {
            writeln!(r, "cartier: true").unwrap();
            for (cone, u) in f.max_cone_indices().iter().zip(c.local_data()) {
                writeln!(r, "local_data {cone:?}: {u}").unwrap();
            }
            let full = f.max_cones().iter().all(|c| c.is_full_dimensional());
            if full {
                writeln!(r, "basepoint_free: {}", yes_no(c.is_basepoint_free()?)).unwrap();
            } else {
                writeln!(r, "basepoint_free: n/a (maximal cones not full-dimensional)").unwrap();
            }
            if f.is_complete() {
                writeln!(r, "ample: {}", yes_no(c.is_ample()?)).unwrap();
                writeln!(r, "very_ample: {}", yes_no(c.is_very_ample()?)).unwrap();
            } else {
                writeln!(r, "ample: n/a (fan not complete)").unwrap();
                writeln!(r, "very_ample: n/a (fan not complete)").unwrap();
            }
        }
        Err(Error::NotCartier { cone }) => {
            writeln!(r, "cartier: false (cone {cone:?})").unwrap();
            writeln!(r, "basepoint_free: n/a (not Cartier)").unwrap();
            writeln!(r, "ample: n/a (not Cartier)").unwrap();
            writeln!(r, "very_ample: n/a (not Cartier)").unwrap();
        }
        Err(e) => return Err(e.into()),
    }
    let p = divisor_polytope(d)?;
    writeln!(r, "polytope_bounded: {}", yes_no(p.bounded)).unwrap();
    let verts: Vec<String> = p.vertices.iter().map(|v| rational_point(v)).collect();
    writeln!(r, "polytope_vertices: {}", if verts.is_empty() { "none".to_string() } else { verts.join(" ") }).unwrap();
    match &p.lattice_points {
        Some(pts) => writeln!(r, "lattice_point_count: {}", pts.len()).unwrap(),
        None => writeln!(r, "lattice_point_count: unbounded").unwrap(),
    }
    Ok(r)
}

fn moment_run(d: &TWeilDivisor, samples: usize, seed: u64, tol: f64) -> CliResult<(String, String)> {
    let c = d.to_cartier()?;
    let f = d.fan();
    let all = sample_moment_image(f, &c, samples, seed)?;
    let poly = divisor_polytope(d)?;
    let mut csv = String::from("point_id,type");
    for i in 1..=f.rank() {
        write!(csv, ",mu_{i}").unwrap();
    }
    csv.push_str(",inside,chart_cone\n");
    for s in &all {
        write!(csv, "{},{}", s.point_id, s.kind).unwrap();
        for x in &s.mu {
            write!(csv, ",{x:e}").unwrap();
        }
        let inside = poly.min_slack_f64(&s.mu) >= -tol;
        let cone: Vec<String> = s.chart_cone.iter().map(ToString::to_string).collect();
        writeln!(csv, ",{},[{}]", yes_no(inside), cone.join(" ")).unwrap();
    }
    let rep = convexity_report_with_tolerance(&all, &poly, tol);
    Ok((csv, format!("divisor: {d}\n{rep}\n")))
}

/// Run one parsed invocation; returns the text for stdout.
pub fn execute(cli: &Cli) -> CliResult<String> {
    let tol = match cli.tolerance {
        None => INSIDE_TOLERANCE,
        Some(t) if (1e-15..=1e-3).contains(&t) => t,
        Some(t) => return Err(Failure::parse(format!("--tolerance {t} is outside [1e-15, 1e-3]"))),
    };
    let emit = |artifact: String| -> CliResult<String> {
        match &cli.out {
            Some(p) => {
                write_atomic(p, &artifact)?;
                Ok(String::new())
            }
            None => Ok(artifact),
        }
    };
    match &cli.command {
        Command::Check { fan } => {
            let f = match load_fan(fan) {
                Err(e) if e.code == 3 => return Err(e),
                other => other?,
            };
            emit(check_report(&f)?)
        }
        Command::Dual { cone } => emit(json(&cone_document(&load_cone(cone)?.dual())?)),
        Command::Hilbert { cone } => {
            let c = load_cone(cone)?;
            let hb = c.hilbert_basis()?;
            let rel = hb.binomial_relations();
            let doc = HilbertDocument {
                rank: c.rank(),
                rays: to_i64_rows(c.rays())?,
                hilbert_basis: to_i64_rows(&hb.elements)?,
                relations: rel.relations.iter().map(ToString::to_string).collect(),
                ideal: match rel.generation {
                    IdealGeneration::Exact => "exact",
                    IdealGeneration::UpToSaturation => "up to saturation",
                },
            };
            emit(json(&doc))
        }
        Command::PolytopeFan { polytope } => {
            let p = read_json::<PolytopeDocument>(polytope)?.to_polytope()?;
            emit(fan_json(&p.normal_fan()?)?)
        }
        Command::Divisor { divisor } => emit(divisor_report(&load_divisor(divisor)?)?),
        Command::Moment { divisor, fan } => {
            let d = match (divisor, fan) {
                (Some(p), _) => load_divisor(p)?,
                (None, Some(p)) => {
                    let f = load_fan(p)?;
                    contact_divisor(&f)?.ok_or_else(|| Failure {
                        code: 4,
                        message: "no default divisor: the contact index condition fails; pass --divisor".into(),
                    })?
                }
                (None, None) => return Err(Failure::parse("moment needs --divisor or --fan")),
            };
            let (csv, report) = moment_run(&d, cli.samples, cli.seed, tol)?;
            match &cli.out {
                Some(p) => {
                    write_atomic(p, &csv)?;
                    Ok(report)
                }
                None => Ok(csv + &report),
            }
        }
        Command::ClassifyContact { fan } => emit(format!("{}\n", classify_contact(&load_fan(fan)?)?)),
        Command::Resolve2d { cone } => emit(fan_json(&resolve_2d(&load_cone(cone)?)?)?),
        Command::Wps { weights } => emit(fan_json(&weighted_projective_fan(weights)?.fan)?),
        Command::Ptbundle { m } => emit(fan_json(&projectivized_tangent_fan(*m)?)?),
        Command::Product { fan } => {
            let [a, b] = fan.as_slice() else {
                return Err(Failure::parse("product takes exactly two --fan arguments"));
            };
            emit(fan_json(&load_fan(a)?.product(&load_fan(b)?))?)
        }
    }
}

/// Parse `args`, run, and print; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let _ = stdout.write_all(out.as_bytes());
            0
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("toric").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn check_p2() {
        let dir = tempfile::tempdir().unwrap();
        let p =
            write(dir.path(), "p2.json", r#"{"rank":2,"rays":[[1,0],[0,1],[-1,-1]],"max_cones":[[0,1],[1,2],[2,0]]}"#);
        let (code, out, _) = run_args(&["check", "--fan", p.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.contains("smooth: true"));
        assert!(out.contains("complete: true"));
        assert!(out.contains("euler_characteristic: 3"));
        assert!(out.contains("fundamental_group: 0"));
        assert!(out.contains("class_group: Z\n"));
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let bad_json = write(dir.path(), "a.json", r#"{"rank":2,"rays":[[1,0.5]],"max_cones":[]}"#);
        assert_eq!(run_args(&["check", "--fan", bad_json.to_str().unwrap()]).0, 2);
        let invalid =
            write(dir.path(), "b.json", r#"{"rank":2,"rays":[[1,0],[0,1],[1,1],[1,-1]],"max_cones":[[0,1],[2,3]]}"#);
        let (code, _, err) = run_args(&["check", "--fan", invalid.to_str().unwrap()]);
        assert_eq!(code, 3);
        assert!(err.contains("valid: false"));
        let p2 =
            write(dir.path(), "p2.json", r#"{"rank":2,"rays":[[1,0],[0,1],[-1,-1]],"max_cones":[[0,1],[1,2],[2,0]]}"#);
        assert_eq!(run_args(&["classify-contact", "--fan", p2.to_str().unwrap()]).0, 4);
        assert_eq!(run_args(&["wps", "2", "4"]).0, 4);
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(run_args(&["--tolerance", "0.5", "wps", "1", "1"]).0, 2);
        assert_eq!(run_args(&["check", "--fan", "/nonexistent/x.json"]).0, 2);
    }

    #[test]
    fn divisor_with_relative_fan_path() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "p2.json", r#"{"rank":2,"rays":[[1,0],[0,1],[-1,-1]],"max_cones":[[0,1],[1,2],[2,0]]}"#);
        let d = write(dir.path(), "d3.json", r#"{"fan":"p2.json","coeffs":[0,0,1]}"#);
        let (code, out, _) = run_args(&["divisor", "--divisor", d.to_str().unwrap()]);
        assert_eq!(code, 0, "{out}");
        for line in
            ["cartier: true", "basepoint_free: true", "ample: true", "very_ample: true", "lattice_point_count: 3"]
        {
            assert!(out.contains(line), "{line} missing from\n{out}");
        }
        assert!(out.contains("polytope_vertices: (0, 0) (0, 1) (1, 0)"));
    }

    #[test]
    fn moment_without_samples_lists_distinguished_points() {
        let dir = tempfile::tempdir().unwrap();
        let d = write(
            dir.path(),
            "d3.json",
            r#"{"fan":{"rank":2,"rays":[[1,0],[0,1],[-1,-1]],"max_cones":[[0,1],[1,2],[2,0]]},"coeffs":[0,0,1]}"#,
        );
        let csv = dir.path().join("out.csv");
        let (code, report, _) =
            run_args(&["moment", "--divisor", d.to_str().unwrap(), "--samples", "0", "--out", csv.to_str().unwrap()]);
        assert_eq!(code, 0);
        let text = std::fs::read_to_string(&csv).unwrap();
        assert_eq!(text.lines().count(), 8);
        assert!(text.starts_with("point_id,type,mu_1,mu_2,inside,chart_cone\n"));
        assert!(report.contains("vertices_attained: 3/3"));
    }

    #[test]
    fn emitted_fans_round_trip() {
        for args in [vec!["wps", "1", "1", "2"], vec!["ptbundle", "2"]] {
            let (code, out, _) = run_args(&args);
            assert_eq!(code, 0);
            let doc: FanDocument = serde_json::from_str(&out).unwrap();
            let f = fan_from_document(&doc).unwrap();
            assert_eq!(FanDocument::from_fan(&f).unwrap(), doc);
        }
    }
}
