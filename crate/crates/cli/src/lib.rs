//! Command-line front end: one JSON document on stdout per call, logs on
//! stderr. Exit 0 on success, 1 when a verification fails or a collision is
//! found, 2 on invalid input.

mod svg;

pub use svg::{render_svg, Palette, RenderInput, RenderSpec};

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use cyclotomo::construct::{build_regular_upolygon, demo_3d_upolyhedron, embed_instance};
use cyclotomo::crossratio::enumerate_cross_ratio_set;
use cyclotomo::dirsearch::{check_size, magic_number, BoundReport};
use cyclotomo::geometry::{Direction, ElementJson, PointSet, PointSetJson};
use cyclotomo::modelset::{generate_patch, parse_rational, PatchSpec, WindowSpec};
use cyclotomo::tomo::{uniqueness_oracle, xray};
use cyclotomo::{CycNum, FieldTag, Rational};

#[derive(Debug, Parser)]
#[command(name = "cyclotomo", version, about = "Discrete tomography of cyclotomic point sets")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Admissible cross ratios for n.
    CrossRatioSet {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest direction set that can carry a U-polygon.
    Bound {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 300)]
        budget_seconds: u64,
        #[arg(long)]
        allow_large: bool,
    },
    /// Number of directions that always determine convex subsets.
    Magic {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 300)]
        budget_seconds: u64,
    },
    /// Regular U-polygon with its two-colouring.
    Upolygon {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Model-set patch in a disc.
    Patch {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        radius: String,
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        shift: Option<String>,
        #[arg(long)]
        star: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// X-ray of a point set in one direction.
    Xray {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
    },
    /// Search for two convex subsets with equal X-rays.
    VerifyUniqueness {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        directions: PathBuf,
        #[arg(long, default_value_t = 12)]
        max_size: usize,
        #[arg(long, default_value_t = 60)]
        budget_seconds: u64,
    },
    /// Great rhombicosidodecahedron check.
    Demo3d {
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
}

/// Directions file: `{"n": .., "directions": [..]}`. Any document with
/// those two fields works, including `upolygon` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionsJson {
    pub n: u32,
    pub directions: Vec<ElementJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XRayRowJson {
    pub line: ElementJson,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XRayJson {
    pub n: u32,
    pub direction: ElementJson,
    pub total: u64,
    pub rows: Vec<XRayRowJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchSummaryJson {
    pub n: u32,
    pub count: usize,
    pub boundary_hits: usize,
    pub out: String,
}

struct Outcome {
    doc: String,
    code: i32,
}

impl Outcome {
    fn new(doc: impl Serialize, code: i32) -> anyhow::Result<Self> {
        Ok(Outcome {
            doc: to_pretty(&doc)?,
            code,
        })
    }

    fn ok(doc: impl Serialize) -> anyhow::Result<Self> {
        Self::new(doc, 0)
    }
}

/// Run one invocation; `argv[0]` is the program name.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match std::panic::catch_unwind(|| run(cli.verb)) {
        Ok(Ok(out)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.doc.as_bytes()).is_err() {
                return 2;
            }
            out.code
        }
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            2
        }
        Err(_) => {
            eprintln!("error: internal failure");
            2
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("CYCLOTOMO_THREADS") {
        match v.parse::<usize>() {
            Ok(k) if k > 0 => {
                // a second call in the same process keeps the first pool
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => eprintln!("warning: ignoring CYCLOTOMO_THREADS={v}"),
        }
    }
}

fn tag_for(n: u32) -> anyhow::Result<FieldTag> {
    Ok(FieldTag::new(n)?)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn to_pretty(doc: &impl Serialize) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(doc)? + "\n")
}

fn run(verb: Verb) -> anyhow::Result<Outcome> {
    match verb {
        Verb::CrossRatioSet { n, out } => {
            let tag = tag_for(n)?;
            let doc = enumerate_cross_ratio_set(tag).to_json();
            if let Some(p) = out {
                write_file(&p, &to_pretty(&doc)?)?;
            }
            Outcome::ok(doc)
        }
        Verb::Bound {
            n,
            budget_seconds,
            allow_large,
        } => bound_report(n, budget_seconds, allow_large),
        Verb::Magic { n, budget_seconds } => bound_report(n, budget_seconds, false),
        Verb::Upolygon { n, svg, json } => upolygon(n, svg, json),
        Verb::Patch {
            n,
            radius,
            window,
            shift,
            star,
            out,
        } => patch(n, &radius, window, shift, star, &out),
        Verb::Xray { points, direction } => xray_verb(&points, &direction),
        Verb::VerifyUniqueness {
            points,
            directions,
            max_size,
            budget_seconds,
        } => verify_uniqueness(&points, &directions, max_size, budget_seconds),
        Verb::Demo3d { tolerance } => {
            if !(tolerance > 0.0 && tolerance.is_finite()) {
                bail!("tolerance must be positive");
            }
            let report = demo_3d_upolyhedron(tolerance);
            eprintln!("demo3d: {}", report.status);
            Outcome::ok(report)
        }
    }
}

fn bound_report(n: u32, budget_seconds: u64, allow_large: bool) -> anyhow::Result<Outcome> {
    let tag = tag_for(n)?;
    check_size(tag, allow_large)?;
    eprintln!("enumerating cross ratios for n = {n}");
    let set = enumerate_cross_ratio_set(tag);
    eprintln!("{} values; searching", set.len());
    let r = magic_number(&set, Some(Duration::from_secs(budget_seconds)), allow_large)?;
    if !r.exhaustive {
        eprintln!("budget exhausted; result is a lower bound");
    }
    Outcome::ok(BoundReport::from_magic(&r)?)
}

/// Lattice instances are embedded in the lattice so the document carries
/// the interior points as well.
fn upolygon(n: u32, svg: Option<PathBuf>, json: Option<PathBuf>) -> anyhow::Result<Outcome> {
    let tag = tag_for(n)?;
    let mut inst = build_regular_upolygon(tag)?;
    let spec = PatchSpec::new(tag, Rational::from_integer(4.into()), None, None)?;
    if spec.is_lattice() {
        let patch = generate_patch(&spec)?;
        if let Some(e) = embed_instance(&inst, &patch.points, 100_000)? {
            inst = e;
        }
    }
    let doc = inst.to_json()?;
    if let Some(p) = json {
        write_file(&p, &to_pretty(&doc)?)?;
    }
    if let Some(p) = svg {
        let points = inst.points()?;
        let spec = RenderSpec::fit(&points);
        write_file(&p, &render_svg(&RenderInput::Instance(&inst), &spec))?;
    }
    let code = if doc.u_polygon && doc.xrays_equal { 0 } else { 1 };
    Outcome::new(doc, code)
}

fn parse_shift(s: &str) -> anyhow::Result<(Rational, Rational)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| anyhow!("shift must be <q>,<q>"))?;
    Ok((parse_rational(a.trim())?, parse_rational(b.trim())?))
}

fn patch(
    n: u32,
    radius: &str,
    window: Option<String>,
    shift: Option<String>,
    star: Option<u32>,
    out: &Path,
) -> anyhow::Result<Outcome> {
    let tag = tag_for(n)?;
    let radius = parse_rational(radius)?;
    let mut window: Option<WindowSpec> = window.map(|w| w.parse()).transpose()?;
    if let Some((x, y)) = shift.as_deref().map(parse_shift).transpose()? {
        let base = match window.take() {
            Some(w) => w,
            None => PatchSpec::new(tag, radius.clone(), None, star)?
                .window
                .ok_or_else(|| anyhow!("lattice patches take no window shift"))?,
        };
        window = Some(base.with_shift(x, y));
    }
    let spec = PatchSpec::new(tag, radius, window, star)?;
    let p = generate_patch(&spec)?;
    eprintln!("{} points ({} candidates)", p.points.len(), p.candidates);
    write_file(out, &to_pretty(&p.to_json())?)?;
    Outcome::ok(PatchSummaryJson {
        n,
        count: p.points.len(),
        boundary_hits: p.boundary_hits,
        out: out.display().to_string(),
    })
}

fn parse_coeffs(s: &str) -> anyhow::Result<Vec<i64>> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .with_context(|| format!("bad coefficient {c:?}"))
        })
        .collect()
}

fn xray_verb(points: &Path, direction: &str) -> anyhow::Result<Outcome> {
    let doc: PointSetJson = read_json(points)?;
    let set = PointSet::from_json(&doc)?;
    let tag = set.tag;
    let coeffs = parse_coeffs(direction)?;
    let d = Direction::new(CycNum::from_int_coeffs(tag.n, &coeffs)?)?;
    let table = xray(&set, &d);
    Outcome::ok(XRayJson {
        n: tag.n,
        direction: ElementJson::encode(tag, &d.w),
        total: table.total(),
        rows: table
            .rows
            .iter()
            .map(|(k, c)| XRayRowJson {
                line: ElementJson::encode(tag, k),
                count: *c,
            })
            .collect(),
    })
}

fn verify_uniqueness(
    points: &Path,
    directions: &Path,
    max_size: usize,
    budget_seconds: u64,
) -> anyhow::Result<Outcome> {
    let pdoc: PointSetJson = read_json(points)?;
    let patch = PointSet::from_json(&pdoc)?;
    let ddoc: DirectionsJson = read_json(directions)?;
    let tag = patch.tag;
    if ddoc.n != tag.n {
        bail!("direction file is for n = {}, points for n = {}", ddoc.n, tag.n);
    }
    let dirs = ddoc
        .directions
        .iter()
        .map(|e| Ok(Direction::new(e.decode(tag)?)?))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let r = uniqueness_oracle(&patch, &dirs, max_size, Duration::from_secs(budget_seconds))?;
    if !r.exhaustive {
        eprintln!("budget exhausted after {} subsets", r.subsets_examined);
    }
    Outcome::new(r.to_json(tag), if r.found { 1 } else { 0 })
}
