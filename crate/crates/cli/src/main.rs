//! `dimerlab` command-line interface. JSON goes to stdout; SVG and TikZ go to
//! stdout or to `--out`. Exit codes: 0 success, 1 domain error or failed
//! check, 2 usage error.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dimerlab::deformation::{
    build_deformation_data, deform, slope_transform_report, Assignment, DeformOptions, DeformationRequest,
    RemovalSchedule, Side,
};
use dimerlab::dimer::{Dart, DimerModel, Dir};
use dimerlab::drawing::compile_drawing;
use dimerlab::face_mutation::{LabeledModel, Variant};
use dimerlab::io::{parse_dimer_str, write_dimer_string};
use dimerlab::lattice::{edge_normals, LatticePolygon};
use dimerlab::matchings::{enumerate_pms_with, pm_polygon, pm_polygon_fast, PerfectMatching, Strategy};
use dimerlab::polygon_mutation::{make_context, mutate, mutate_via_dual};
use dimerlab::render::{dart_edges, model_svg, model_tikz, polygon_svg, polygon_tikz};
use dimerlab::verify::{verify_theorem, MutationChoice, VerifyRequest};
use dimerlab::zigzag::{
    consistency_report, crossing_count, is_isoradial, proper_order_report, summaries, zigzag_paths,
};

#[derive(Parser)]
#[command(name = "dimerlab", version, about = "Exact dimer models on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Zig,
    Zag,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Black,
    White,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Svg,
    Tikz,
}

/// Deformation choices shared by `deform` and `verify`.
#[derive(clap::Args)]
struct DeformArgs {
    #[arg(long, value_enum)]
    side: SideArg,
    /// Chosen path, numbered from 1 as in `zigzags`.
    #[arg(long)]
    zigzag: usize,
    /// Number of same-slope paths to deform along.
    #[arg(long)]
    r: usize,
    /// Family members, numbered from 1; the first must be `--zigzag`.
    #[arg(long, value_delimiter = ',')]
    family: Option<Vec<usize>>,
    /// `auto`, `by:I,J,..` (member per sub-zigzag, from 1),
    /// `sets:E,E/E/..` (edge names per member, members split by `/`), or a
    /// JSON file `{"by": [..]}` / `{"sets": [[..], ..]}` in the same terms.
    #[arg(long, default_value = "auto")]
    assignment: String,
    /// `auto` or a JSON file `{"pairs": [["e1","e2"], ...]}` with the removal order.
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Use the short pipeline where it applies.
    #[arg(long)]
    shortcut: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model and report the consistency conditions.
    Check { model: PathBuf },
    /// List perfect matchings.
    Pms {
        model: PathBuf,
        #[arg(long)]
        sequential: bool,
    },
    /// The perfect matching polygon.
    PmPolygon {
        model: PathBuf,
        /// Reference matching as comma-separated edge names.
        #[arg(long, value_delimiter = ',')]
        p0: Option<Vec<String>>,
        /// Count matchings per point without listing them.
        #[arg(long)]
        census: bool,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Zigzag paths, crossing counts and consistency predicates.
    Zigzags { model: PathBuf },
    /// Zig or zag deformation.
    Deform {
        model: PathBuf,
        #[command(flatten)]
        args: DeformArgs,
        /// Where to write the deformed model.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Combinatorial mutation of a polygon.
    MutatePolygon {
        #[arg(long)]
        polygon: PathBuf,
        /// Edge index, counterclockwise from the first vertex.
        #[arg(long)]
        edge: usize,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        sign: i64,
        /// Compute through the dual polyhedron instead.
        #[arg(long)]
        via_dual: bool,
    },
    /// Mutation at quadrangle faces, applied in the given order.
    MutateDimer {
        model: PathBuf,
        /// Face label (for `.draw` input) or `EDGE` / `EDGE:wb` naming the
        /// face left of that dart. Repeat to chain mutations.
        #[arg(long, required = true)]
        face: Vec<String>,
        #[arg(long, value_enum, default_value = "black")]
        variant: VariantArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the mutated polygon with the polygon of the deformation.
    Verify {
        model: PathBuf,
        #[command(flatten)]
        args: DeformArgs,
        #[arg(long, value_delimiter = ',')]
        p0: Option<Vec<String>>,
        /// Mutation edge to cross-check against the deformation data.
        #[arg(long)]
        edge: Option<usize>,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        sign: i64,
    },
    /// Draw a model (`.dimer`/`.draw`) or a polygon (`.json`).
    Render {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "svg")]
        format: Format,
        /// Highlight the matching with this index (from 0, enumeration order).
        #[arg(long)]
        pm: Option<usize>,
        /// Highlight this zigzag path (from 1).
        #[arg(long)]
        zigzag: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A model with the face labels of its drawing, if any.
struct Loaded {
    model: DimerModel,
    labels: BTreeMap<String, Dart>,
}

fn load(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "draw") {
        let d = compile_drawing(&text).with_context(|| format!("compiling {}", path.display()))?;
        Ok(Loaded { model: d.model, labels: d.labels })
    } else {
        let model = parse_dimer_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(Loaded { model, labels: BTreeMap::new() })
    }
}

fn edge_id(m: &DimerModel, name: &str) -> Result<usize> {
    m.edge_index(name).ok_or_else(|| anyhow!("no edge named {name}"))
}

fn matching_from_names(m: &DimerModel, names: &[String]) -> Result<PerfectMatching> {
    let pm = PerfectMatching::new(names.iter().map(|n| edge_id(m, n)).collect::<Result<_>>()?);
    if !pm.is_perfect_matching_of(m) {
        bail!("the given edges do not form a perfect matching");
    }
    Ok(pm)
}

fn names(m: &DimerModel, edges: &[usize]) -> Vec<String> {
    edges.iter().map(|&e| m.edge_name(e).to_string()).collect()
}

fn parse_assignment(s: &str) -> Result<Assignment> {
    if s == "auto" {
        return Ok(Assignment::Auto);
    }
    if let Some(rest) = s.strip_prefix("by:") {
        let idx = rest
            .split(',')
            .map(|t| t.trim().parse::<usize>().ok().and_then(|i| i.checked_sub(1)))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| anyhow!("bad member list {rest}"))?;
        return Ok(Assignment::BySubzigzag(idx));
    }
    if let Some(rest) = s.strip_prefix("sets:") {
        return Ok(Assignment::Sets(
            rest.split('/').map(|g| g.split(',').map(|t| t.trim().to_string()).collect()).collect(),
        ));
    }
    if Path::new(s).is_file() {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(s)?).with_context(|| format!("reading {s}"))?;
        if let Some(by) = v.get("by").and_then(Value::as_array) {
            let idx = by
                .iter()
                .map(|x| x.as_u64().and_then(|i| (i as usize).checked_sub(1)))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| anyhow!("\"by\" lists members numbered from 1"))?;
            return Ok(Assignment::BySubzigzag(idx));
        }
        if let Some(sets) = v.get("sets").and_then(Value::as_array) {
            let groups = sets
                .iter()
                .map(|g| {
                    g.as_array().and_then(|a| a.iter().map(|e| e.as_str().map(str::to_string)).collect::<Option<Vec<_>>>())
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| anyhow!("\"sets\" is a list of edge-name lists"))?;
            return Ok(Assignment::Sets(groups));
        }
        bail!("assignment file needs a \"by\" or \"sets\" entry");
    }
    bail!("assignment must be auto, by:.., sets:.. or a JSON file")
}

fn parse_schedule(path: &Path) -> Result<RemovalSchedule> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let pairs = v.get("pairs").and_then(Value::as_array).ok_or_else(|| anyhow!("schedule needs a \"pairs\" array"))?;
    let mut out = Vec::new();
    for p in pairs {
        match p.as_array().map(|a| a.as_slice()) {
            Some([Value::String(a), Value::String(b)]) => out.push((a.clone(), b.clone())),
            _ => bail!("each schedule entry is a pair of edge names"),
        }
    }
    Ok(RemovalSchedule::Explicit(out))
}

fn one_based(k: usize, what: &str) -> Result<usize> {
    k.checked_sub(1).ok_or_else(|| anyhow!("{what} are numbered from 1"))
}

fn deformation_request(a: &DeformArgs) -> Result<(DeformationRequest, DeformOptions)> {
    let side = match a.side {
        SideArg::Zig => Side::Zig,
        SideArg::Zag => Side::Zag,
    };
    let mut req = DeformationRequest::new(one_based(a.zigzag, "zigzag paths")?, a.r, side);
    if let Some(f) = &a.family {
        req.family = Some(f.iter().map(|&k| one_based(k, "zigzag paths")).collect::<Result<_>>()?);
    }
    req.assignment = parse_assignment(&a.assignment)?;
    let schedule = match &a.schedule {
        Some(p) if p.as_os_str() != "auto" => parse_schedule(p)?,
        _ => RemovalSchedule::Auto,
    };
    Ok((req, DeformOptions { schedule, shortcut: a.shortcut }))
}

fn face_dart(l: &Loaded, spec: &str) -> Result<Dart> {
    if let Some(d) = l.labels.get(spec) {
        return Ok(*d);
    }
    let (name, dir) = match spec.split_once(':') {
        Some((n, "wb")) => (n, Dir::WhiteToBlack),
        Some((n, "bw")) => (n, Dir::BlackToWhite),
        Some(_) => bail!("face {spec}: direction must be bw or wb"),
        None => (spec, Dir::BlackToWhite),
    };
    Ok(Dart { edge: edge_id(&l.model, name)?, dir })
}

/// Writes to stdout; a closed pipe is not an error.
fn to_stdout(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => to_stdout(text),
    }
}

fn print_json(v: &Value) -> Result<()> {
    to_stdout(&(serde_json::to_string_pretty(v)? + "\n"))
}

/// Runs a command; `Ok(false)` means a check ran and failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Check { model } => {
            let text = std::fs::read_to_string(&model)?;
            let m = if model.extension().is_some_and(|e| e == "draw") {
                compile_drawing(&text)?.model
            } else {
                dimerlab::io::parse_dimer_unchecked(&text)?
            };
            let report = m.validate();
            let ok = report.errors.is_empty();
            let mut v = json!({ "validation": report });
            if ok {
                let c = consistency_report(&m);
                let p = proper_order_report(&m);
                v["consistent"] = json!(c.ok());
                v["properly_ordered"] = json!(p.ok());
                v["isoradial"] = json!(is_isoradial(&m));
                v["consistency"] = json!(c);
                v["proper_order"] = json!(p);
            }
            print_json(&v)?;
            Ok(ok)
        }
        Command::Pms { model, sequential } => {
            let m = load(&model)?.model;
            let strategy = if sequential { Strategy::Sequential } else { Strategy::Parallel };
            let pms = enumerate_pms_with(&m, strategy);
            let list: Vec<Value> = pms
                .iter()
                .enumerate()
                .map(|(i, p)| json!({ "index": i, "edges": names(&m, &p.edges), "offset_sum": p.offset_sum(&m) }))
                .collect();
            print_json(&json!({ "count": pms.len(), "matchings": list }))?;
            Ok(true)
        }
        Command::PmPolygon { model, p0, census, svg } => {
            let m = load(&model)?.model;
            let poly = if census {
                if p0.is_some() {
                    bail!("--census places the polygon by offset sums; drop --p0");
                }
                let poly = pm_polygon_fast(&m)?;
                let counts: Vec<Value> = dimerlab::matchings::height_census(&m, Default::default())
                    .into_iter()
                    .map(|(p, c)| json!({ "point": p, "count": c }))
                    .collect();
                print_json(&json!({ "polygon": poly, "census": counts }))?;
                poly
            } else {
                let p0 = p0.map(|n| matching_from_names(&m, &n)).transpose()?;
                let res = pm_polygon(&m, p0.as_ref())?;
                let placement: Vec<Value> = res
                    .placement
                    .iter()
                    .zip(&res.classification)
                    .map(|((p, h), c)| json!({ "edges": names(&m, &p.edges), "height": h, "class": c }))
                    .collect();
                print_json(&json!({
                    "polygon": res.polygon,
                    "reference": names(&m, &res.reference.edges),
                    "edge_normals": edge_normals(&res.polygon).ok(),
                    "placement": placement,
                }))?;
                res.polygon
            };
            if let Some(path) = svg {
                std::fs::write(&path, polygon_svg(&poly))?;
            }
            Ok(true)
        }
        Command::Zigzags { model } => {
            let m = load(&model)?.model;
            let paths = zigzag_paths(&m);
            let crossings: Vec<Vec<usize>> =
                paths.iter().map(|z| paths.iter().map(|w| crossing_count(z, w)).collect()).collect();
            print_json(&json!({
                "paths": summaries(&m),
                "crossings": crossings,
                "consistent": consistency_report(&m).ok(),
                "properly_ordered": proper_order_report(&m).ok(),
                "isoradial": is_isoradial(&m),
            }))?;
            Ok(true)
        }
        Command::Deform { model, args, out } => {
            let m = load(&model)?.model;
            let (req, opts) = deformation_request(&args)?;
            let data = build_deformation_data(&m, &req)?;
            let o = deform(&m, &data, &opts)?;
            let slopes = slope_transform_report(&m, &data, &o.result)?;
            let consistency = consistency_report(&o.result);
            print_json(&json!({
                "data": data,
                "shortcut_used": o.shortcut_used,
                "surgery": { "nodes": o.surgery.num_nodes(), "edges": o.surgery.num_edges() },
                "steps": o.steps,
                "result": {
                    "nodes": o.result.num_nodes(),
                    "edges": o.result.num_edges(),
                    "consistent": consistency.ok(),
                    "isoradial": is_isoradial(&o.result),
                    "polygon": pm_polygon_fast(&o.result)?,
                },
                "slope_report": slopes,
            }))?;
            if let Some(p) = out {
                std::fs::write(&p, write_dimer_string(&o.result))?;
            }
            Ok(true)
        }
        Command::MutatePolygon { polygon, edge, sign, via_dual } => {
            let p: LatticePolygon = serde_json::from_str(&std::fs::read_to_string(&polygon)?)
                .with_context(|| format!("reading polygon {}", polygon.display()))?;
            let ctx = make_context(&p, edge, sign)?;
            let q = if via_dual { mutate_via_dual(&ctx)? } else { mutate(&ctx)? };
            print_json(&json!({ "context": ctx, "mutated": q }))?;
            Ok(true)
        }
        Command::MutateDimer { model, face, variant, out } => {
            let l = load(&model)?;
            let variant = match variant {
                VariantArg::Black => Variant::Black,
                VariantArg::White => Variant::White,
            };
            let mut labels = l.labels.clone();
            let mut order = Vec::new();
            for (i, f) in face.iter().enumerate() {
                let key = if l.labels.contains_key(f) { f.clone() } else { format!("#{i}") };
                labels.entry(key.clone()).or_insert(face_dart(&l, f)?);
                order.push(key);
            }
            let mut lm = LabeledModel::new(l.model.clone(), labels);
            for key in &order {
                lm = lm.mutate(key, variant).with_context(|| format!("mutating at face {key}"))?;
            }
            let c = consistency_report(&lm.model);
            print_json(&json!({
                "nodes": lm.model.num_nodes(),
                "edges": lm.model.num_edges(),
                "consistent": c.ok(),
                "polygon": pm_polygon_fast(&lm.model)?,
            }))?;
            if let Some(p) = out {
                std::fs::write(&p, write_dimer_string(&lm.model))?;
            }
            Ok(true)
        }
        Command::Verify { model, args, p0, edge, sign } => {
            let m = load(&model)?.model;
            let (deformation, options) = deformation_request(&args)?;
            let p0 = p0.map(|n| matching_from_names(&m, &n)).transpose()?;
            let req = VerifyRequest { deformation, options, p0, mutation: edge.map(|edge| MutationChoice { edge, sign }) };
            let report = verify_theorem(&m, &req)?;
            print_json(&serde_json::to_value(&report)?)?;
            Ok(report.passed())
        }
        Command::Render { input, format, pm, zigzag, out } => {
            let text = if input.extension().is_some_and(|e| e == "json") {
                let p: LatticePolygon = serde_json::from_str(&std::fs::read_to_string(&input)?)?;
                match format {
                    Format::Svg => polygon_svg(&p),
                    Format::Tikz => polygon_tikz(&p),
                }
            } else {
                let m = load(&input)?.model;
                let mut hl = BTreeSet::new();
                if let Some(k) = pm {
                    let pms = enumerate_pms_with(&m, Strategy::default());
                    let p = pms.get(k).ok_or_else(|| anyhow!("model has {} matchings", pms.len()))?;
                    hl.extend(p.edges.iter().copied());
                }
                if let Some(k) = zigzag {
                    let paths = zigzag_paths(&m);
                    let z = paths.get(one_based(k, "zigzag paths")?).ok_or_else(|| anyhow!("model has {} zigzag paths", paths.len()))?;
                    hl.extend(dart_edges(&z.darts));
                }
                match format {
                    Format::Svg => model_svg(&m, &hl),
                    Format::Tikz => model_tikz(&m, &hl),
                }
            };
            emit(&text, out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
