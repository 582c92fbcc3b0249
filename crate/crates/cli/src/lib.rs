//! Batch front end: parses meshes and space specifications, runs the
//! decomposition pipeline, and prints exact reports.
//!
//! Exit codes: 0 certified, 1 verification failure or obstruction,
//! 2 infeasible, 3 input error.

mod mesh;
mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use geodecomp::decomp::{
    daggers, dual_decomposition, geometric_decomposition, unisolvence_check, DaggerKind,
};
use geodecomp::extension::{extend_family_to_hat, ExtensionFamily};
use geodecomp::funcspace::{synthesize_presheaf, FunctionSpace};
use geodecomp::linalg::{DirectSum, RatMatrix};
use geodecomp::simplicial::{
    check_simpext, homogeneous_extension, instantiate, local_ops_from_simplicial,
    simplex_vanishing_basis, solve_simpext, SimpextSolution, SimplicialComplex, SimplicialSpace,
};
use geodecomp::Verdict;

pub use mesh::{parse_mesh, MeshError, MeshFile};
pub use report::{NamedMatrix, Report, Row, Totals};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// Presheaf generator size limits used by `presheaf:<seed>`.
const PRESHEAF_ELEMENTS: usize = 20;
const PRESHEAF_CARRIER: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Process-level settings read from the environment.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    /// Overrides the seed of `presheaf:<seed>`.
    pub seed: Option<u64>,
}

impl Settings {
    pub fn from_env() -> Self {
        Settings {
            seed: std::env::var("GEODECOMP_SEED").ok().and_then(|s| s.parse().ok()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "geodecomp", version, about = "Exact geometric decompositions of finite element spaces")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DaggerArg {
    Projection,
    Euclidean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DemoArg {
    P0Lagrange,
    P0Forms,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the trace laws of a space on a mesh (reference triangle by default).
    VerifySpace {
        #[arg(long)]
        space: String,
        #[arg(long)]
        mesh: Option<PathBuf>,
    },
    /// Build or search for the simplicial extension operator in one dimension.
    Extension {
        #[arg(long)]
        space: String,
        #[arg(long)]
        dim: usize,
        /// Solve the defining linear system instead of using the built-in operator.
        #[arg(long)]
        solve: bool,
    },
    /// Geometric decomposition of the global space.
    Decompose {
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        space: String,
    },
    /// Degrees of freedom from the dual decomposition.
    Dofs {
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        space: String,
        #[arg(long, value_enum, default_value_t = DaggerArg::Projection)]
        dagger: DaggerArg,
    },
    /// Reproduce one of the obstruction examples.
    Demo {
        #[arg(value_enum)]
        which: DemoArg,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SpaceSpec {
    Simplicial(SimplicialSpace),
    Presheaf(u64),
}

fn parse_space(text: &str, settings: &Settings) -> Result<SpaceSpec, String> {
    if let Some(seed) = text.strip_prefix("presheaf:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| format!("invalid presheaf seed in `{text}`"))?;
        return Ok(SpaceSpec::Presheaf(settings.seed.unwrap_or(seed)));
    }
    SimplicialSpace::parse(text)
        .map(SpaceSpec::Simplicial)
        .ok_or_else(|| {
            format!(
                "unknown space `{text}` (expected lagrange:<r>, plambda:<r>:<k>, whitney:<k> or presheaf:<seed>)"
            )
        })
}

/// Runs one invocation; `args` excludes the program name.
pub fn run_command<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &Settings::from_env())
}

pub fn run_with<I, T>(args: I, settings: &Settings) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let echo = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    let cli = match Cli::try_parse_from(std::iter::once(OsString::from("geodecomp")).chain(args)) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome {
                        code: EXIT_OK,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => input_error(text),
            };
        }
    };
    let result = match &cli.command {
        Command::VerifySpace { space, mesh } => verify_space(echo, space, mesh.as_ref(), settings),
        Command::Extension { space, dim, solve } => extension(echo, space, *dim, *solve, settings),
        Command::Decompose { mesh, space } => {
            decompose(echo, space, mesh.as_ref(), settings).map(|(code, report, _)| (code, report))
        }
        Command::Dofs {
            mesh,
            space,
            dagger,
        } => dofs(echo, space, mesh.as_ref(), *dagger, cli.format, settings),
        Command::Demo { which, k } => demo(echo, *which, *k),
    };
    match result {
        Ok((code, report)) => Outcome {
            code,
            stdout: match cli.format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            },
            stderr: String::new(),
        },
        Err(message) => input_error(message),
    }
}

fn input_error(message: String) -> Outcome {
    let mut stderr = message;
    if !stderr.ends_with('\n') {
        stderr.push('\n');
    }
    Outcome {
        code: EXIT_INPUT,
        stdout: String::new(),
        stderr,
    }
}

type CommandResult = Result<(i32, Report), String>;

/// A space on a complex (simplicial) or a generated presheaf with its family.
struct Loaded {
    space: FunctionSpace,
    complex: Option<SimplicialComplex>,
    simplicial: Option<SimplicialSpace>,
    family: Option<ExtensionFamily>,
}

fn load(spec: SpaceSpec, mesh: Option<&PathBuf>, default_triangle: bool) -> Result<Loaded, String> {
    match spec {
        SpaceSpec::Presheaf(seed) => {
            let (space, family) = synthesize_presheaf(seed, PRESHEAF_ELEMENTS, PRESHEAF_CARRIER);
            Ok(Loaded {
                space,
                complex: None,
                simplicial: None,
                family: Some(family),
            })
        }
        SpaceSpec::Simplicial(s) => {
            let complex = match mesh {
                Some(path) => parse_mesh(path)
                    .and_then(|m| m.complex())
                    .map_err(|e| e.to_string())?,
                None if default_triangle => SimplicialComplex::simplex(2),
                None => return Err("--mesh is required for simplicial spaces".into()),
            };
            Ok(Loaded {
                space: instantiate(s, &complex),
                complex: Some(complex),
                simplicial: Some(s),
                family: None,
            })
        }
    }
}

fn dimension_rows(space: &FunctionSpace) -> Vec<Row> {
    space
        .poset()
        .elements()
        .map(|e| Row {
            face: space.poset().name(e).to_owned(),
            dim: space.dim(e),
            vanishing_dim: space.vanishing_trace(e).dim(),
            block: None,
        })
        .collect()
}

fn verify_space(echo: String, space: &str, mesh: Option<&PathBuf>, settings: &Settings) -> CommandResult {
    let loaded = load(parse_space(space, settings)?, mesh, true)?;
    let mut report = Report::new(echo);
    report.rows = dimension_rows(&loaded.space);
    let verdict = loaded.space.verify().map_err(|e| e.to_string())?;
    let code = match verdict {
        Verdict::Valid => {
            report.status = "Valid".into();
            EXIT_OK
        }
        Verdict::Violations(v) => {
            for violation in &v {
                report.fact("violation", violation);
            }
            report.status = format!("Violations ({})", v.len());
            EXIT_FAILURE
        }
    };
    Ok((code, report))
}

fn extension(echo: String, space: &str, m: usize, solve: bool, settings: &Settings) -> CommandResult {
    let SpaceSpec::Simplicial(s) = parse_space(space, settings)? else {
        return Err("extension operators are defined for simplicial spaces only".into());
    };
    let mut report = Report::new(echo);
    report.fact("space", s);
    report.fact("dim ℱ̊(T^m)", simplex_vanishing_basis(s, m).cols());
    report.fact("dim ℱ(Q^{m+1})", s.dim_on(m + 1));
    if !solve {
        return Ok(match homogeneous_extension(s, m) {
            Ok(em) => {
                report.matrices.push(NamedMatrix::new(format!("E_{m}"), &em));
                report.status = "Certified".into();
                (EXIT_OK, report)
            }
            Err(e) => {
                report.fact("built-in operator", e);
                report.status = "Failure".into();
                (EXIT_FAILURE, report)
            }
        });
    }
    let solution = solve_simpext(s, m).map_err(|e| e.to_string())?;
    Ok(match &solution {
        SimpextSolution::Feasible(em) => {
            report.matrices.push(NamedMatrix::new(format!("E_{m}"), em));
            if check_simpext(s, m, em).is_valid() {
                report.status = "Feasible".into();
                (EXIT_OK, report)
            } else {
                report.status = "Failure".into();
                (EXIT_FAILURE, report)
            }
        }
        SimpextSolution::Infeasible { certificate, .. } => {
            report.fact(
                "certificate y",
                format!(
                    "[{}]",
                    certificate.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
                ),
            );
            report.fact("yᵀM = 0 and yᵀB ≠ 0", solution.certificate_holds());
            report.status = "Infeasible".into();
            (EXIT_INFEASIBLE, report)
        }
    })
}

/// Result of the primal pipeline: the lifted family on the hat space.
struct Pipeline {
    base: FunctionSpace,
    hat_family: ExtensionFamily,
    global_dim: usize,
}

/// Builds the consistent family, or returns the report explaining why none
/// exists.
fn build_family(loaded: Loaded, report: &mut Report) -> Result<Result<Pipeline, i32>, String> {
    let space = loaded.space;
    let verdict = space.verify().map_err(|e| e.to_string())?;
    if let Verdict::Violations(v) = verdict {
        report.status = format!("Violations ({})", v.len());
        return Ok(Err(EXIT_FAILURE));
    }
    let global = space.assemble_global();
    let vanishing_total: usize = report.rows.iter().map(|r| r.vanishing_dim).sum();
    if global.dim() != vanishing_total {
        let cmp = if global.dim() < vanishing_total { '<' } else { '>' };
        report.fact(
            "obstruction",
            format!(
                "no consistent family: dim ℱ(𝒯)={} {cmp} Σ dim ℱ̊(F)={}",
                global.dim(),
                vanishing_total
            ),
        );
        report.status = "Failure".into();
        return Ok(Err(EXIT_FAILURE));
    }
    let family = match (loaded.family, loaded.complex, loaded.simplicial) {
        (Some(f), _, _) => f,
        (None, Some(complex), Some(s)) => {
            let n = complex.dim().unwrap_or(0);
            let mut ems = BTreeMap::new();
            for m in 0..n {
                if simplex_vanishing_basis(s, m).cols() == 0 {
                    continue;
                }
                let em = match homogeneous_extension(s, m) {
                    Ok(em) => em,
                    Err(_) => match solve_simpext(s, m).map_err(|e| e.to_string())? {
                        SimpextSolution::Feasible(em) => em,
                        SimpextSolution::Infeasible { certificate, .. } => {
                            report.fact(
                                "obstruction",
                                format!("no simplicial extension operator in dimension {m}"),
                            );
                            report.fact(
                                "certificate y",
                                format!(
                                    "[{}]",
                                    certificate
                                        .iter()
                                        .map(ToString::to_string)
                                        .collect::<Vec<_>>()
                                        .join(", ")
                                ),
                            );
                            report.status = "Infeasible".into();
                            return Ok(Err(EXIT_INFEASIBLE));
                        }
                    },
                };
                ems.insert(m, em);
            }
            local_ops_from_simplicial(&complex, s, &ems).map_err(|e| e.to_string())?
        }
        _ => unreachable!("a loaded space is either generated or simplicial"),
    };
    if let Verdict::Violations(v) = family.verify().map_err(|e| e.to_string())? {
        for violation in &v {
            report.fact("violation", violation);
        }
        report.status = format!("Violations ({})", v.len());
        return Ok(Err(EXIT_FAILURE));
    }
    let hat = space.with_global_top();
    let hat_family = extend_family_to_hat(&family, &hat).map_err(|e| e.to_string())?;
    Ok(Ok(Pipeline {
        base: space,
        hat_family,
        global_dim: global.dim(),
    }))
}

fn certificate_text(c: &DirectSum) -> String {
    match c {
        DirectSum::Certified(m) => format!("Certified (rank {})", m.cols()),
        DirectSum::Failure(w) => format!(
            "Failure (dependency [{}])",
            w.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn decompose(
    echo: String,
    space: &str,
    mesh: Option<&PathBuf>,
    settings: &Settings,
) -> Result<(i32, Report, Option<Pipeline>), String> {
    let loaded = load(parse_space(space, settings)?, mesh, false)?;
    let mut report = Report::new(echo);
    report.rows = dimension_rows(&loaded.space);
    let pipeline = match build_family(loaded, &mut report)? {
        Ok(p) => p,
        Err(code) => return Ok((code, report, None)),
    };
    let decomposition = geometric_decomposition(&pipeline.hat_family).map_err(|e| e.to_string())?;
    for (e, row) in report.rows.iter_mut().enumerate() {
        row.block = Some(decomposition.block(e).cols());
    }
    let block_total: usize = decomposition.blocks().values().map(RatMatrix::cols).sum();
    report.totals = Some(Totals {
        dim: pipeline.base.dims().iter().sum(),
        vanishing_dim: report.rows.iter().map(|r| r.vanishing_dim).sum(),
        block: Some(block_total),
        global_dim: pipeline.global_dim,
    });
    report.fact("certificate", certificate_text(decomposition.certificate()));
    let ok = decomposition.is_certified() && block_total == pipeline.global_dim;
    report.status = if ok { "Certified" } else { "Failure" }.into();
    Ok((if ok { EXIT_OK } else { EXIT_FAILURE }, report, Some(pipeline)))
}

fn dofs(
    echo: String,
    space: &str,
    mesh: Option<&PathBuf>,
    dagger: DaggerArg,
    format: Format,
    settings: &Settings,
) -> CommandResult {
    let (code, mut report, pipeline) = decompose(echo, space, mesh, settings)?;
    let Some(pipeline) = pipeline else {
        return Ok((code, report));
    };
    let kind = match dagger {
        DaggerArg::Projection => DaggerKind::Projection,
        DaggerArg::Euclidean => DaggerKind::Euclidean,
    };
    let family = &pipeline.hat_family;
    let primal = geometric_decomposition(family).map_err(|e| e.to_string())?;
    let chosen = daggers(family, kind).map_err(|e| e.to_string())?;
    let dual = dual_decomposition(family, &chosen).map_err(|e| e.to_string())?;
    report.block_header = "dofs";
    for (e, row) in report.rows.iter_mut().enumerate() {
        row.block = Some(dual.block(e).cols());
        if format == Format::Json && dual.block(e).cols() > 0 {
            report.matrices.push(NamedMatrix::new(
                format!("dofs {}", row.face),
                &dual.block(e).transpose(),
            ));
        }
    }
    report.facts.clear();
    report.fact("dagger", format!("{dagger:?}").to_lowercase());
    report.fact("dual certificate", certificate_text(dual.certificate()));
    let unisolvent = unisolvence_check(&primal, &dual).map_err(|e| e.to_string())?;
    report.fact(
        "unisolvence",
        if unisolvent.is_certified() { "Certified" } else { "Failure" },
    );
    let ok = code == EXIT_OK && dual.is_certified() && unisolvent.is_certified();
    report.status = if ok { "Certified" } else { "Failure" }.into();
    Ok((if ok { EXIT_OK } else { EXIT_FAILURE }, report))
}

fn demo(echo: String, which: DemoArg, k: usize) -> CommandResult {
    match which {
        DemoArg::P0Lagrange => {
            let complex = SimplicialComplex::build(4, &[vec![0, 1, 2], vec![0, 2, 3]])
                .expect("the square is a valid complex");
            let s = SimplicialSpace::Lagrange { r: 0 };
            let loaded = Loaded {
                space: instantiate(s, &complex),
                complex: Some(complex),
                simplicial: Some(s),
                family: None,
            };
            let mut report = Report::new(echo);
            report.rows = dimension_rows(&loaded.space);
            report.fact("mesh", "two triangles (0,1,2), (0,2,3)");
            report.fact("space", s);
            let code = match build_family(loaded, &mut report)? {
                Ok(_) => EXIT_OK,
                Err(code) => code,
            };
            Ok((code, report))
        }
        DemoArg::P0Forms => {
            let s = SimplicialSpace::PolyForms { r: 0, k };
            extension(echo, &s.to_string(), k, true, &Settings::default())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_grammar() {
        let s = Settings::default();
        assert_eq!(
            parse_space("lagrange:2", &s),
            Ok(SpaceSpec::Simplicial(SimplicialSpace::Lagrange { r: 2 }))
        );
        assert_eq!(parse_space("presheaf:5", &s), Ok(SpaceSpec::Presheaf(5)));
        let seeded = Settings { seed: Some(9) };
        assert_eq!(parse_space("presheaf:5", &seeded), Ok(SpaceSpec::Presheaf(9)));
        assert!(parse_space("bogus:1", &s).is_err());
    }

    #[test]
    fn bad_arguments_are_input_errors() {
        let out = run_with(["decompose"], &Settings::default());
        assert_eq!(out.code, EXIT_INPUT);
        let out = run_with(["decompose", "--space", "lagrange:2"], &Settings::default());
        assert_eq!(out.code, EXIT_INPUT);
    }

    #[test]
    fn verify_default_triangle() {
        let out = run_with(["verify-space", "--space", "lagrange:1"], &Settings::default());
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.contains("status: Valid"));
    }

    #[test]
    fn extension_reports() {
        let out = run_with(["extension", "--space", "lagrange:2", "--dim", "1"], &Settings::default());
        assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
        let out = run_with(
            ["extension", "--space", "p0lambda:1", "--dim", "1", "--solve"],
            &Settings::default(),
        );
        assert_eq!(out.code, EXIT_INFEASIBLE);
        assert!(out.stdout.contains("yᵀM = 0 and yᵀB ≠ 0: true"));
    }

    #[test]
    fn presheaf_pipeline() {
        let out = run_with(["dofs", "--space", "presheaf:3"], &Settings::default());
        assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    }

    #[test]
    fn demos() {
        let out = run_with(["demo", "p0-lagrange"], &Settings::default());
        assert_eq!(out.code, EXIT_FAILURE);
        assert!(out.stdout.contains("dim ℱ(𝒯)=1 < Σ dim ℱ̊(F)=4"));
        let out = run_with(["demo", "p0-forms", "--k", "2"], &Settings::default());
        assert_eq!(out.code, EXIT_INFEASIBLE);
    }
}
