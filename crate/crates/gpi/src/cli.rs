//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use gpi_core::algebra::{
    build_block_triangular, build_grassmann, build_matrix_algebra, is_g_regular, BlockShape, GradingMap,
    GrassmannSpec,
};
use gpi_core::identities::{
    all_signatures, check_factoring, identities_by_consequences, identities_by_evaluation_guarded,
    identities_by_fast_rows, stabilization_scan, ComponentProvider, EvaluationProvider, FastRowsProvider,
    GrassmannHandle, IdentitySubspace, TIdealPresentation, TruncationPolicy,
};
use gpi_core::linalg::{subspace_cmp, GuardLimits, SubspaceRelation};
use gpi_core::model::{GenericModel, RelFreeBackend};
use gpi_core::relfree::{
    multilinear_basis_count, normal_form, partial_multiplicativity_check, soundness_probe, GradingMode,
    MultiplicativityVerdict,
};
use gpi_core::{CoreError, GroupElement, GroupSpec, MultidegreeSignature, NcPolynomial};
use serde::Serialize;
use serde_json::{json, Value};

use crate::certificate::Certificate;
use crate::descriptor::{
    element_of, group_from_orders, parse_grassmann_grading, parse_kv, parse_orders, parse_residue_list, AlgebraDescriptor,
    GrassmannGradingDesc,
};
use crate::error::CliError;
use crate::triplet::write_triplets;

#[derive(Parser, Debug)]
#[command(name = "gpi", version, about = "Exact computations with graded PI-algebras")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Write the JSON certificate to this path.
    #[arg(long, global = true)]
    pub cert: Option<PathBuf>,
    /// Print the certificate on stdout instead of the report.
    #[arg(long, global = true)]
    pub json: bool,
    /// JSON object of option values; flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest evaluation matrix (rows * columns) the guard allows.
    #[arg(long, global = true)]
    pub max_cells: Option<u128>,
    /// Largest intermediate coefficient, in bits, during elimination.
    #[arg(long, global = true)]
    pub max_coeff_bits: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether an elementary grading map is G-regular.
    Regularity(RegularityArgs),
    /// Multilinear graded identities of an algebra or a presented T-ideal.
    Identities(IdentitiesArgs),
    /// Compare T(UT(d_1..d_m; A)) with the product of the diagonal T-ideals.
    FactorCheck(FactorArgs),
    /// Relatively free algebras of the Grassmann algebra.
    #[command(subcommand)]
    Relfree(RelfreeCommand),
    /// Generic matrix models.
    #[command(subcommand)]
    Model(ModelCommand),
}

#[derive(clap::Args, Debug, Serialize)]
pub struct RegularityArgs {
    #[arg(long, default_value = "2")]
    pub group: String,
    /// Degree of each row index, e.g. `0,1` (use `;` between tuples for non-cyclic groups).
    #[arg(long)]
    pub targets: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Auto,
    Evaluation,
    Consequences,
    Both,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct IdentitiesArgs {
    /// Descriptor file or short form (`grassmann:N=6,deg=natural`, `matrix:targets=0,1`).
    #[arg(long)]
    pub algebra: Option<String>,
    /// Generator file, or generators inline separated by `;`.
    #[arg(long)]
    pub generators: Option<String>,
    #[arg(long)]
    pub group: Option<String>,
    /// Variable degrees, e.g. `0,1,1`.
    #[arg(long)]
    pub sig: Option<String>,
    /// Grassmann truncations to scan, increasing.
    #[arg(long)]
    pub n_list: Option<String>,
    #[arg(long, value_enum, default_value_t = Route::Auto)]
    pub route: Route,
    /// Enumerate all basis tuples instead of the reduced Grassmann rows.
    #[arg(long)]
    pub full: bool,
    /// Print a basis of the identity component.
    #[arg(long)]
    pub basis: bool,
    /// Write the RREF basis as triplets.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct FactorArgs {
    /// Diagonal block sizes, e.g. `1,1`.
    #[arg(long)]
    pub shape: Option<String>,
    /// `field`, `grassmann:deg=<natural|infty|trivial|kstar,k=K>` or `matrix:targets=...`.
    #[arg(long)]
    pub entries: Option<String>,
    #[arg(long)]
    pub sig: Option<String>,
    /// Every signature of total degree 1..=D.
    #[arg(long)]
    pub sweep: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum RelfreeCommand {
    /// Normal form of a polynomial.
    Nf(RelfreeNfArgs),
    /// Sampled partial multiplicativity of the basis.
    Multbasis(RelfreeMultArgs),
    /// Compare f with its normal form under random substitutions into E_N.
    Probe(RelfreeProbeArgs),
    /// Multilinear basis words and the matching identity dimension.
    Count(RelfreeCountArgs),
}

#[derive(clap::Args, Debug, Serialize)]
pub struct RelfreeNfArgs {
    /// `natural`, `infty` or `kstar:K`.
    #[arg(long)]
    pub mode: Option<String>,
    /// Polynomial text or a file holding it.
    #[arg(long)]
    pub poly: Option<String>,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct RelfreeMultArgs {
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub bound: usize,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct RelfreeProbeArgs {
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    /// Truncation; defaults to 2 * degree + k.
    #[arg(long)]
    pub generators: Option<usize>,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct RelfreeCountArgs {
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub sig: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum ModelCommand {
    /// Evaluate a polynomial on generic matrices.
    Eval(ModelEvalArgs),
}

#[derive(clap::Args, Debug, Serialize)]
pub struct ModelEvalArgs {
    #[arg(long)]
    pub shape: Option<String>,
    /// `natural`, `infty` or `kstar:K`.
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub poly: Option<String>,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Ctx {
    guard: GuardLimits,
    seed: u64,
    out: String,
}

/// What a command produced: its certificate, and exit code 2 when the
/// computation is internally inconsistent (the certificate says why).
struct Report {
    cert: Certificate,
    inconsistent: Option<String>,
}

impl Report {
    fn ok(cert: Certificate) -> Self {
        Self { cert, inconsistent: None }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse_with_config(&args) {
        Ok(c) => c,
        Err(ParseFailure::Clap(e)) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 1, stdout: String::new(), stderr: text },
            };
        }
        Err(ParseFailure::Cli(e)) => {
            return Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") }
        }
    };
    let mut guard = GuardLimits::default();
    if let Some(c) = cli.max_cells {
        guard.max_cells = c;
    }
    if let Some(b) = cli.max_coeff_bits {
        guard.max_coeff_bits = b;
    }
    let mut ctx = Ctx { guard, seed: cli.seed, out: String::new() };
    let result = match &cli.command {
        Command::Regularity(a) => cmd_regularity(&mut ctx, a),
        Command::Identities(a) => cmd_identities(&mut ctx, a),
        Command::FactorCheck(a) => cmd_factor_check(&mut ctx, a),
        Command::Relfree(c) => cmd_relfree(&mut ctx, c),
        Command::Model(ModelCommand::Eval(a)) => cmd_model_eval(&mut ctx, a),
    };
    match result {
        Ok(report) => {
            let mut stderr = String::new();
            if let Some(path) = &cli.cert {
                if let Err(e) = report.cert.write_atomic(path) {
                    return Outcome {
                        code: 1,
                        stdout: ctx.out,
                        stderr: format!("error: cannot write {}: {e}\n", path.display()),
                    };
                }
            }
            let code = match &report.inconsistent {
                Some(msg) => {
                    let _ = writeln!(stderr, "error: internal inconsistency: {msg}");
                    2
                }
                None => 0,
            };
            let stdout = if cli.json { report.cert.render() } else { ctx.out };
            Outcome { code, stdout, stderr }
        }
        Err(e) => Outcome { code: e.exit_code(), stdout: ctx.out, stderr: format!("error: {e}\n") },
    }
}

enum ParseFailure {
    Clap(clap::Error),
    Cli(CliError),
}

// Parses once to find the subcommand and the explicitly given flags, then
// appends config-file values for the remaining options and parses again.
fn parse_with_config(args: &[OsString]) -> Result<Cli, ParseFailure> {
    let cmd = Cli::command();
    let matches = cmd.clone().try_get_matches_from(args).map_err(ParseFailure::Clap)?;
    let cmd = {
        let mut c = cmd;
        c.build();
        c
    };
    let Some(path) = matches.get_one::<PathBuf>("config").cloned() else {
        return Cli::from_arg_matches(&matches).map_err(ParseFailure::Clap);
    };
    let text = fs::read_to_string(&path).map_err(|e| ParseFailure::Cli(CliError::Io(e)))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| ParseFailure::Cli(CliError::Usage(format!("config {}: {e}", path.display()))))?;
    let Value::Object(map) = value else {
        return Err(ParseFailure::Cli(CliError::Usage("config must be a JSON object".into())));
    };
    let mut leaf: &ArgMatches = &matches;
    let mut leaf_cmd = &cmd;
    while let Some((name, sub)) = leaf.subcommand() {
        leaf = sub;
        leaf_cmd = leaf_cmd.find_subcommand(name).expect("parsed subcommand exists");
    }
    let mut extra: Vec<OsString> = Vec::new();
    for (key, v) in &map {
        let id = key.replace('-', "_");
        if id == "config" {
            continue;
        }
        let known = leaf_cmd.get_arguments().any(|a| a.get_id().as_str() == id);
        if !known {
            return Err(ParseFailure::Cli(CliError::Usage(format!("config: unknown option '{key}' for this command"))));
        }
        if leaf.value_source(&id) == Some(ValueSource::CommandLine) {
            continue;
        }
        let flag = format!("--{}", id.replace('_', "-"));
        match v {
            Value::Bool(true) => extra.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => {
                extra.push(flag.into());
                extra.push(s.into());
            }
            Value::Number(n) => {
                extra.push(flag.into());
                extra.push(n.to_string().into());
            }
            Value::Array(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|x| match x {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                extra.push(flag.into());
                extra.push(parts.join(",").into());
            }
            Value::Object(_) => {
                return Err(ParseFailure::Cli(CliError::Usage(format!("config: option '{key}' cannot be an object"))))
            }
        }
    }
    let mut all = args.to_vec();
    all.extend(extra);
    let matches = cmd.try_get_matches_from(all).map_err(ParseFailure::Clap)?;
    Cli::from_arg_matches(&matches).map_err(ParseFailure::Clap)
}

fn require<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| CliError::Usage(format!("missing required flag --{flag}")))
}

/// Literal text, or the contents of the file it names.
fn text_or_file(arg: &str) -> Result<String, CliError> {
    let p = Path::new(arg);
    if p.is_file() {
        Ok(fs::read_to_string(p)?)
    } else {
        Ok(arg.to_string())
    }
}

fn group_label(g: &GroupSpec) -> String {
    if g.is_trivial() {
        "trivial".into()
    } else {
        g.cyclic_orders().iter().map(|o| format!("Z{o}")).collect::<Vec<_>>().join("x")
    }
}

/// Group elements from residue tuples; residues must already be reduced.
fn parse_elements(s: &str, group: &GroupSpec) -> Result<Vec<GroupElement>, CliError> {
    parse_residue_list(s, group.rank())?
        .into_iter()
        .map(|r| element_of(group, &r))
        .collect()
}

fn parse_signature(s: &str, group: &GroupSpec) -> Result<MultidegreeSignature, CliError> {
    Ok(MultidegreeSignature::new(parse_elements(s, group)?)?)
}

fn sig_text(sig: &MultidegreeSignature) -> String {
    sig.to_string()
}

fn parse_shape(s: &str) -> Result<BlockShape, CliError> {
    let sizes = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad block size '{x}'"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BlockShape::new(sizes)?)
}

fn parse_n_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad N '{x}'"))))
        .collect()
}

fn poly_text(f: &NcPolynomial) -> String {
    f.to_shorthand()
}

fn cmd_regularity(ctx: &mut Ctx, a: &RegularityArgs) -> Result<Report, CliError> {
    let orders = parse_orders(&a.group)?;
    let group = group_from_orders(&orders)?;
    let targets_text = require(&a.targets, "targets")?;
    let targets = parse_elements(targets_text, &group).map_err(|e| CliError::Usage(format!("malformed grading map: {e}")))?;
    let map = GradingMap::new(targets).map_err(|e| CliError::Usage(format!("malformed grading map: {e}")))?;
    let report = is_g_regular(&map, &group).map_err(|e| CliError::Usage(format!("malformed grading map: {e}")))?;
    let verdict = if report.regular { "regular" } else { "not regular" };
    let _ = writeln!(ctx.out, "grading map ({targets_text}) over {}: {verdict}", group_label(&group));
    if !report.surjective {
        let _ = writeln!(ctx.out, "not surjective");
    }
    let _ = writeln!(ctx.out, "degree\tfiber");
    let mut fibers = Vec::new();
    for (g, c) in &report.fibers {
        let _ = writeln!(ctx.out, "{g}\t{c}");
        fibers.push(json!({"degree": g.to_string(), "size": c}));
    }
    let mut cert = Certificate::new("regularity", serde_json::to_value(a).expect("args serialize"), ctx.seed);
    cert.set("group", orders)
        .set("regular", report.regular)
        .set("surjective", report.surjective)
        .set("fibers", fibers);
    Ok(Report::ok(cert))
}

// Generators from text: one per line or separated by `;`. Over a nontrivial
// group, a generator written with bare `x` variables stands for all of its
// degree assignments.
fn parse_generators(text: &str, group: &GroupSpec) -> Result<Vec<NcPolynomial>, CliError> {
    let mut out = Vec::new();
    for part in text.split(['\n', ';']).map(str::trim).filter(|s| !s.is_empty() && !s.starts_with('#')) {
        let f = NcPolynomial::parse(part)?;
        let bare = f.universe().values().all(|g| g.residues().is_empty());
        if bare && !group.is_trivial() {
            out.extend(TIdealPresentation::degree_variants(&f, group)?);
        } else {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("no generators given".into()));
    }
    Ok(out)
}

fn grassmann_mode(g: &GrassmannGradingDesc) -> Option<Option<GradingMode>> {
    match g {
        GrassmannGradingDesc::Natural => Some(Some(GradingMode::Natural)),
        GrassmannGradingDesc::Infty => Some(Some(GradingMode::Infty)),
        GrassmannGradingDesc::Kstar { k } => Some(Some(GradingMode::KStar(*k))),
        GrassmannGradingDesc::Trivial => Some(None),
        GrassmannGradingDesc::Explicit { .. } => None,
    }
}

struct EvalResult {
    space: IdentitySubspace,
    n_values: Option<Vec<usize>>,
    dims_by_n: Option<Vec<Option<usize>>>,
    stabilized: Option<bool>,
}

fn evaluation_route(
    ctx: &Ctx,
    desc: &AlgebraDescriptor,
    sig: &MultidegreeSignature,
    n_list: Option<&[usize]>,
    full: bool,
) -> Result<EvalResult, CliError> {
    let Some(handle) = desc.grassmann_handle() else {
        let algebra = desc.build()?;
        let space = identities_by_evaluation_guarded(&algebra, sig, ctx.guard)?;
        return Ok(EvalResult { space, n_values: None, dims_by_n: None, stabilized: None });
    };
    let n0 = handle.spec.n_generators;
    let list: Vec<usize> = match n_list {
        Some(l) => l.to_vec(),
        None => vec![n0, n0 + 2],
    };
    let guard = ctx.guard;
    let family = |n: usize| -> Result<IdentitySubspace, CoreError> {
        let h = handle.with_generators(n);
        if full {
            let algebra = build_handle(&h)?;
            identities_by_evaluation_guarded(&algebra, sig, guard)
        } else {
            identities_by_fast_rows(&h, sig, guard)
        }
    };
    let report = stabilization_scan(family, &list)?;
    let space = report.final_space().cloned().ok_or_else(|| {
        CoreError::TruncationTooSmall(format!(
            "E_N with N = {} cannot realize signature {sig}; pass a larger N",
            list.last().copied().unwrap_or(0)
        ))
    })?;
    Ok(EvalResult {
        space,
        n_values: Some(list),
        dims_by_n: Some(report.dims()),
        stabilized: Some(report.stabilized),
    })
}

fn build_handle(h: &GrassmannHandle) -> Result<gpi_core::algebra::StructureConstantAlgebra, CoreError> {
    let e = build_grassmann(&h.spec)?;
    if h.shape.sizes() == [1] {
        Ok(e)
    } else {
        gpi_core::algebra::build_matrix_over(&e, &h.shape)
    }
}

fn cmd_identities(ctx: &mut Ctx, a: &IdentitiesArgs) -> Result<Report, CliError> {
    let sig_str = require(&a.sig, "sig")?;
    if a.algebra.is_none() && a.generators.is_none() {
        return Err(CliError::Usage("give --algebra or --generators".into()));
    }
    let desc = a.algebra.as_deref().map(AlgebraDescriptor::load).transpose()?;
    let group = match (&desc, &a.group) {
        (Some(d), Some(g)) => {
            let explicit = group_from_orders(&parse_orders(g)?)?;
            let from_desc = d.group()?;
            if explicit != from_desc {
                return Err(CliError::Usage(format!(
                    "--group {g} does not match the algebra's group {}",
                    group_label(&from_desc)
                )));
            }
            from_desc
        }
        (Some(d), None) => d.group()?,
        (None, Some(g)) => group_from_orders(&parse_orders(g)?)?,
        (None, None) => GroupSpec::trivial(),
    };
    let sig = parse_signature(sig_str, &group)?;
    let route = match a.route {
        Route::Auto => match (&desc, &a.generators) {
            (Some(_), Some(_)) => Route::Both,
            (Some(_), None) => Route::Evaluation,
            _ => Route::Consequences,
        },
        r => r,
    };
    let wants_eval = matches!(route, Route::Evaluation | Route::Both);
    let wants_cons = matches!(route, Route::Consequences | Route::Both);

    let n_list = a.n_list.as_deref().map(parse_n_list).transpose()?;
    let eval = if wants_eval {
        let d = desc.as_ref().ok_or_else(|| CliError::Usage("the evaluation route needs --algebra".into()))?;
        Some(evaluation_route(ctx, d, &sig, n_list.as_deref(), a.full)?)
    } else {
        None
    };

    let mut generator_text: Option<String> = None;
    let cons = if wants_cons {
        let presentation = match &a.generators {
            Some(g) => {
                let text = text_or_file(g)?;
                let gens = parse_generators(&text, &group)?;
                generator_text = Some(text);
                TIdealPresentation::new(group.clone(), gens)?
            }
            None => {
                let preset = match &desc {
                    Some(AlgebraDescriptor::Grassmann { grading, .. }) => grassmann_mode(grading),
                    _ => None,
                };
                let mode = preset.ok_or_else(|| {
                    CliError::Usage("no known generators for this algebra; pass --generators".into())
                })?;
                TIdealPresentation::grassmann(mode)
            }
        };
        Some(identities_by_consequences(&presentation, &sig, ctx.guard)?)
    } else {
        None
    };

    let mut inconsistent = None;
    let mut agreement = Value::Null;
    if let (Some(e), Some(c)) = (&eval, &cons) {
        let same = subspace_cmp(e.space.space(), c.space())? == SubspaceRelation::Equal;
        agreement = if same { "agree".into() } else { "disagree".into() };
        if !same {
            inconsistent = Some(format!(
                "routes disagree at {sig}: evaluation dim {}, consequences dim {}",
                e.space.dim(),
                c.dim()
            ));
        }
    }
    if let Some(e) = &eval {
        if e.stabilized == Some(false) && e.n_values.as_ref().is_some_and(|l| l.len() >= 2) {
            let dims: Vec<String> =
                e.dims_by_n.iter().flatten().map(|d| d.map_or("-".into(), |x| x.to_string())).collect();
            inconsistent = Some(format!("identities at {sig} not stabilized over N: dims {}", dims.join(", ")));
        }
    }

    let main = eval.as_ref().map(|e| &e.space).or(cons.as_ref()).expect("one route ran");
    let _ = writeln!(ctx.out, "signature {} over {}", sig_text(&sig), group_label(&group));
    if let Some(e) = &eval {
        let _ = write!(ctx.out, "evaluation: dim {} of {}", e.space.dim(), e.space.ambient_dim());
        if let (Some(ns), Some(ds)) = (&e.n_values, &e.dims_by_n) {
            let parts: Vec<String> = ns
                .iter()
                .zip(ds)
                .map(|(n, d)| format!("N={n}: {}", d.map_or("too small".into(), |x| x.to_string())))
                .collect();
            let stab = if e.stabilized == Some(true) { "stabilized" } else { "not stabilized" };
            let _ = write!(ctx.out, " ({}; {stab})", parts.join(", "));
        }
        let _ = writeln!(ctx.out);
    }
    if let Some(c) = &cons {
        let _ = writeln!(ctx.out, "consequences: dim {} of {}", c.dim(), c.ambient_dim());
    }
    let basis: Vec<String> = main.basis_polynomials()?.iter().map(poly_text).collect();
    if a.basis {
        let _ = writeln!(ctx.out, "basis:");
        for b in &basis {
            let _ = writeln!(ctx.out, "  {b}");
        }
    }
    if let Some(path) = &a.matrix_out {
        fs::write(path, write_triplets(main.ambient_dim(), main.space().basis()))?;
    }

    let mut inputs = serde_json::to_value(a).expect("args serialize");
    if let Some(d) = &desc {
        inputs["algebra"] = serde_json::to_value(d).expect("descriptor serializes");
    }
    if let Some(t) = generator_text {
        inputs["generators"] = t.into();
    }
    let mut dims = serde_json::Map::new();
    if let Some(e) = &eval {
        dims.insert("evaluation".into(), e.space.dim().into());
    }
    if let Some(c) = &cons {
        dims.insert("consequences".into(), c.dim().into());
    }
    let mut cert = Certificate::new("identities", inputs, ctx.seed);
    cert.set("group", group.cyclic_orders().to_vec())
        .set("signature", sig_text(&sig))
        .set("ambient_dim", main.ambient_dim())
        .set("dims", Value::Object(dims))
        .set("n_values", eval.as_ref().and_then(|e| e.n_values.clone()).map_or(Value::Null, |v| json!(v)))
        .set("dims_by_n", eval.as_ref().and_then(|e| e.dims_by_n.clone()).map_or(Value::Null, |v| json!(v)))
        .set("stabilized", eval.as_ref().and_then(|e| e.stabilized).map_or(Value::Null, Value::Bool))
        .set("relation", agreement)
        .set("witness", Value::Null)
        .set("basis", if a.basis { json!(basis) } else { Value::Null });
    if let Some(msg) = &inconsistent {
        cert.set("inconsistency", msg.clone());
    }
    Ok(Report { cert, inconsistent })
}

enum Entries {
    Field,
    Grassmann(GrassmannGradingDesc),
    Matrix { orders: Vec<u32>, targets: Vec<Vec<u32>> },
}

fn parse_entries(s: &str) -> Result<Entries, CliError> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    let kv = parse_kv(rest)?;
    match kind {
        "field" => Ok(Entries::Field),
        "grassmann" => {
            if kv.contains_key("N") || kv.contains_key("n") {
                return Err(CliError::Usage(
                    "factor-check picks the Grassmann truncation per signature (2n + k and 2n + k + 2); drop N=".into(),
                ));
            }
            Ok(Entries::Grassmann(parse_grassmann_grading(&kv)?))
        }
        "matrix" => {
            let orders = parse_orders(kv.get("group").map_or("2", String::as_str))?;
            let targets = parse_residue_list(
                kv.get("targets").ok_or_else(|| CliError::Usage("matrix entries need targets=".into()))?,
                orders.len(),
            )?;
            Ok(Entries::Matrix { orders, targets })
        }
        other => Err(CliError::Usage(format!("unknown entry algebra '{other}'"))),
    }
}

fn repeated_grading(group: &GroupSpec, targets: &[Vec<u32>], copies: usize) -> Result<GradingMap, CliError> {
    let mut out = Vec::new();
    for _ in 0..copies {
        for t in targets {
            out.push(element_of(group, t)?);
        }
    }
    Ok(GradingMap::new(out)?)
}

type Providers = (Box<dyn ComponentProvider>, Vec<Box<dyn ComponentProvider>>, GroupSpec, bool);

fn factor_providers(entries: &Entries, shape: &BlockShape, guard: GuardLimits) -> Result<Providers, CliError> {
    let sizes = shape.sizes().to_vec();
    match entries {
        Entries::Field | Entries::Matrix { .. } => {
            let (group, targets) = match entries {
                Entries::Matrix { orders, targets } => (group_from_orders(orders)?, targets.clone()),
                _ => (GroupSpec::trivial(), vec![Vec::new()]),
            };
            let n = targets.len();
            let blocks: Vec<usize> = sizes.iter().map(|d| d * n).collect();
            let mut full_targets = Vec::new();
            for d in &sizes {
                for _ in 0..*d {
                    full_targets.extend(targets.iter().cloned());
                }
            }
            let r_alg =
                build_block_triangular(&BlockShape::new(blocks)?, &repeated_grading(&group, &full_targets, 1)?, &group)?;
            let r: Box<dyn ComponentProvider> = Box::new(EvaluationProvider::new(r_alg, guard, "R"));
            let mut factors: Vec<Box<dyn ComponentProvider>> = Vec::new();
            for (i, d) in sizes.iter().enumerate() {
                let alg = build_matrix_algebra(d * n, &repeated_grading(&group, &targets, *d)?, &group)?;
                factors.push(Box::new(EvaluationProvider::new(alg, guard, format!("A{}", i + 1))));
            }
            Ok((r, factors, group, false))
        }
        Entries::Grassmann(g) => {
            let k = match g {
                GrassmannGradingDesc::Kstar { k } => *k,
                _ => 0,
            };
            let spec = GrassmannSpec::new(k.max(1), g.to_core());
            let group = spec.group();
            let r: Box<dyn ComponentProvider> = Box::new(FastRowsProvider::new(
                GrassmannHandle::matrix(spec.clone(), shape.clone()),
                TruncationPolicy::Confirmed,
                guard,
            ));
            let factors = sizes
                .iter()
                .map(|d| -> Result<Box<dyn ComponentProvider>, CliError> {
                    Ok(Box::new(FastRowsProvider::new(
                        GrassmannHandle::matrix(spec.clone(), BlockShape::single(*d)),
                        TruncationPolicy::Confirmed,
                        guard,
                    )))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((r, factors, group, true))
        }
    }
}

fn cmd_factor_check(ctx: &mut Ctx, a: &FactorArgs) -> Result<Report, CliError> {
    let shape = parse_shape(require(&a.shape, "shape")?)?;
    let entries = parse_entries(require(&a.entries, "entries")?)?;
    let (r, factors, group, grassmann) = factor_providers(&entries, &shape, ctx.guard)?;
    let sigs: Vec<MultidegreeSignature> = match (&a.sig, a.sweep) {
        (Some(s), None) => vec![parse_signature(s, &group)?],
        (None, Some(d)) if d >= 1 => (1..=d).flat_map(|n| all_signatures(&group, n)).collect(),
        (None, Some(_)) => return Err(CliError::Usage("--sweep needs a positive degree".into())),
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --sig or --sweep, not both".into())),
        (None, None) => return Err(CliError::Usage("missing required flag --sig (or --sweep)".into())),
    };
    let factor_refs: Vec<&dyn ComponentProvider> = factors.iter().map(|f| f.as_ref()).collect();
    let _ = writeln!(ctx.out, "signature\tdim_R\tdim_product\trelation\twitness");
    let mut verdicts = Vec::new();
    let mut n_equal = 0;
    let mut first_witness: Option<String> = None;
    for sig in &sigs {
        let v = check_factoring(r.as_ref(), &factor_refs, sig, ctx.guard)?;
        let witness = v.witness.as_ref().map(poly_text);
        if v.relation == gpi_core::identities::FactoringRelation::Equal {
            n_equal += 1;
        }
        if first_witness.is_none() {
            first_witness.clone_from(&witness);
        }
        let _ = writeln!(
            ctx.out,
            "{}\t{}\t{}\t{}\t{}",
            sig_text(sig),
            v.dim_r,
            v.dim_product,
            v.relation.as_str(),
            witness.as_deref().unwrap_or("-")
        );
        let n_values = if grassmann {
            let k = match &entries {
                Entries::Grassmann(GrassmannGradingDesc::Kstar { k }) => *k,
                _ => 0,
            };
            let d = (2 * sig.len() + k).max(1);
            json!([d, d + 2])
        } else {
            Value::Null
        };
        verdicts.push(json!({
            "signature": sig_text(sig),
            "dim_r": v.dim_r,
            "dim_product": v.dim_product,
            "relation": v.relation.as_str(),
            "witness": witness,
            "n_values": n_values,
        }));
    }
    let strict = sigs.len() - n_equal;
    let _ = writeln!(ctx.out, "{} signatures: {n_equal} equal, {strict} product_strictly_inside", sigs.len());
    let overall = if strict == 0 { "equal" } else { "product_strictly_inside" };
    let mut cert = Certificate::new("factor-check", serde_json::to_value(a).expect("args serialize"), ctx.seed);
    cert.set("group", group.cyclic_orders().to_vec())
        .set("signatures", sigs.iter().map(sig_text).collect::<Vec<_>>())
        .set("verdicts", verdicts)
        .set("relation", overall)
        .set("witness", first_witness.map_or(Value::Null, Value::String))
        .set("stabilized", if grassmann { Value::Bool(true) } else { Value::Null })
        .set("scope", "multilinear components at the listed signatures only");
    Ok(Report::ok(cert))
}

fn parse_mode(s: Option<&str>) -> Result<GradingMode, CliError> {
    let s = s.ok_or_else(|| CliError::Usage("missing required flag --mode".into()))?;
    GradingMode::parse(s).map_err(|e| match e {
        CoreError::Parse { msg, .. } => CliError::Usage(msg),
        other => CliError::Core(other),
    })
}

fn cmd_relfree(ctx: &mut Ctx, c: &RelfreeCommand) -> Result<Report, CliError> {
    match c {
        RelfreeCommand::Nf(a) => {
            let mode = parse_mode(a.mode.as_deref())?;
            let text = text_or_file(require(&a.poly, "poly")?)?;
            let f = NcPolynomial::parse(text.trim())?;
            let nf = normal_form(&f, mode)?;
            let _ = writeln!(ctx.out, "{nf}");
            let mut inputs = serde_json::to_value(a).expect("args serialize");
            inputs["poly"] = text.trim().into();
            let mut cert = Certificate::new("relfree nf", inputs, ctx.seed);
            cert.set("mode", mode.to_string()).set("normal_form", nf.to_string()).set("is_zero", nf.is_zero());
            Ok(Report::ok(cert))
        }
        RelfreeCommand::Multbasis(a) => {
            let mode = parse_mode(a.mode.as_deref())?;
            let r = partial_multiplicativity_check(mode, a.bound, a.samples, ctx.seed)?;
            let verdict = match r.verdict {
                MultiplicativityVerdict::HoldsOnSamples => "holds-on-samples",
                MultiplicativityVerdict::Fails => "fails",
            };
            let _ = write!(ctx.out, "{mode}: {verdict} ({} pairs checked)", r.pairs_checked);
            if let Some(w) = &r.witness {
                let _ = write!(ctx.out, ", witness {w}");
            }
            let _ = writeln!(ctx.out);
            let mut cert =
                Certificate::new("relfree multbasis", serde_json::to_value(a).expect("args serialize"), ctx.seed);
            cert.set("mode", mode.to_string())
                .set("verdict", verdict)
                .set("pairs_checked", r.pairs_checked)
                .set("witness", r.witness.map_or(Value::Null, Value::String));
            Ok(Report::ok(cert))
        }
        RelfreeCommand::Probe(a) => {
            let mode = parse_mode(a.mode.as_deref())?;
            let text = text_or_file(require(&a.poly, "poly")?)?;
            let f = NcPolynomial::parse(text.trim())?;
            let k = match mode {
                GradingMode::KStar(k) => k,
                _ => 0,
            };
            let n = a.generators.unwrap_or(2 * f.total_degree() + k);
            let r = soundness_probe(&f, mode, n, a.trials, ctx.seed)?;
            let _ = writeln!(ctx.out, "{mode}, N={n}: {} discrepancies in {} trials", r.discrepancies, r.trials);
            if let Some(w) = &r.witness {
                let _ = writeln!(ctx.out, "first: {w}");
            }
            let mut inputs = serde_json::to_value(a).expect("args serialize");
            inputs["poly"] = text.trim().into();
            let mut cert = Certificate::new("relfree probe", inputs, ctx.seed);
            cert.set("mode", mode.to_string())
                .set("n_values", vec![n])
                .set("trials", r.trials)
                .set("discrepancies", r.discrepancies)
                .set("witness", r.witness.map_or(Value::Null, Value::String));
            let inconsistent = (r.discrepancies > 0).then(|| format!("normal form differs from f on {} substitutions", r.discrepancies));
            Ok(Report { cert, inconsistent })
        }
        RelfreeCommand::Count(a) => {
            let mode = parse_mode(a.mode.as_deref())?;
            let sig = parse_signature(require(&a.sig, "sig")?, &GroupSpec::z2())?;
            let bits: Vec<u32> = sig.degrees().iter().map(|g| g.z2_bit().expect("Z2 signature")).collect();
            let words = multilinear_basis_count(mode, &bits);
            let total = gpi_core::poly::factorial(sig.len());
            let _ = writeln!(ctx.out, "{mode} at {}: {words} basis words, identity dim {}", sig_text(&sig), total - words);
            let mut cert = Certificate::new("relfree count", serde_json::to_value(a).expect("args serialize"), ctx.seed);
            cert.set("mode", mode.to_string())
                .set("signature", sig_text(&sig))
                .set("basis_words", words)
                .set("identity_dim", total - words);
            Ok(Report::ok(cert))
        }
    }
}

fn cmd_model_eval(ctx: &mut Ctx, a: &ModelEvalArgs) -> Result<Report, CliError> {
    let shape = parse_shape(require(&a.shape, "shape")?)?;
    let mode = parse_mode(Some(require(&a.backend, "backend")?))?;
    let text = text_or_file(require(&a.poly, "poly")?)?;
    let f = NcPolynomial::parse(text.trim())?;
    let model = GenericModel::new(shape, RelFreeBackend::new(mode, GroupSpec::z2())?);
    let m = model.model_eval(&f)?;
    let identity = model.is_zero(&m);
    let _ = write!(ctx.out, "{m}");
    let _ = writeln!(ctx.out, "identity: {identity}");
    let rows: Vec<Vec<String>> = m.rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
    let mut inputs = serde_json::to_value(a).expect("args serialize");
    inputs["poly"] = text.trim().into();
    let mut cert = Certificate::new("model eval", inputs, ctx.seed);
    cert.set("group", vec![2u32])
        .set("backend", mode.to_string())
        .set("degree_bound", Value::Null)
        .set("matrix", json!(rows))
        .set("identity", identity);
    Ok(Report::ok(cert))
}
