//! Command-line front end. [`run`] takes explicit streams so it can be
//! driven from tests as well as from the binary.

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::closure::{self, ClosureOptions, ClosureVerdict};
use crate::edm::{self, EdmCandidate};
use crate::error::Error;
use crate::generators::{self, RandomSpec};
use crate::io::{self, EnsembleFile, IoError, MatrixFile, PermutationFile, ReasonReport, Report};
use crate::membership::{self, Centering, MembershipOptions, MembershipResult};
use crate::types::{gram_of_ensemble, BranchSpec};

pub const EXIT_YES: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_NO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "coherent-gram",
    version,
    about = "Decide whether a matrix is a Gram matrix of coherent states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide membership and print a witness ensemble if one exists.
    Check(CheckArgs),
    /// Decide whether the matrix is a limit of coherent-state Gram matrices.
    Closure {
        #[command(flatten)]
        check: CheckArgs,
        /// Write the block-sorting permutation here.
        #[arg(long)]
        permutation_out: Option<String>,
    },
    /// Like `check`, but write the witness ensemble to `--out`.
    Reconstruct {
        #[command(flatten)]
        check: CheckArgs,
        #[arg(long)]
        out: String,
    },
    /// Compute the Gram matrix of an ensemble file.
    Gram {
        input: String,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Place ensembles in orthogonal-looking blocks using marker modes.
    Approx {
        #[arg(long, num_args = 1.., required = true)]
        blocks: Vec<String>,
        /// Marker displacement.
        #[arg(long = "A", conflicts_with = "eps", required_unless_present = "eps")]
        a: Option<f64>,
        /// Target entrywise error; the displacement is sqrt(ln(1/eps)).
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Test a real matrix for being a Euclidean distance matrix.
    Edm(EdmArgs),
    /// Build an ensemble whose Gram matrix is the entrywise exponential of a distance matrix.
    EdmExp {
        #[command(flatten)]
        edm: EdmArgs,
        #[arg(long)]
        out: Option<String>,
    },
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CenteringArg {
    E1,
    Mean,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Matrix file, or `-` for stdin.
    input: String,
    #[arg(long, default_value_t = -std::f64::consts::PI, allow_negative_numbers = true)]
    branch_beta: f64,
    #[arg(long)]
    tol_eig: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol_zero: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol_herm: f64,
    #[arg(long, value_enum, default_value = "e1")]
    centering: CenteringArg,
    #[arg(long, default_value_t = membership::DEFAULT_MAX_CANDIDATES)]
    max_candidates: u64,
    #[arg(long)]
    witness_out: Option<String>,
}

impl CheckArgs {
    fn branch(&self) -> BranchSpec {
        BranchSpec {
            beta: self.branch_beta,
            tol_eig: self.tol_eig,
            tol_zero: self.tol_zero,
            tol_herm: self.tol_herm,
        }
    }

    fn options(&self) -> MembershipOptions {
        let centering = match self.centering {
            CenteringArg::E1 => Centering::FirstState,
            CenteringArg::Mean => Centering::Mean,
        };
        MembershipOptions {
            centering,
            max_candidates: self.max_candidates,
        }
    }
}

#[derive(Debug, Args)]
struct EdmArgs {
    /// Real matrix file, or `-` for stdin.
    input: String,
    /// Entries are squared distances `|p_i - p_j|^2` instead of `-1/2 |p_i - p_j|^2`.
    #[arg(long)]
    squared_distances: bool,
    #[arg(long)]
    tol_eig: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Unit diagonal, every off-diagonal entry equal to `r`.
    Equiangular {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Gram matrix of the standard and Fourier bases of C^n.
    Mub {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Seeded random ensemble.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        modes: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Emit the ensemble's Gram matrix instead of the ensemble.
        #[arg(long)]
        gram: bool,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Seeded random distance matrix in the `-1/2 |p_i - p_j|^2` convention.
    Edm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

enum Failure {
    Usage(String),
    Numerical(Box<Report>, Error),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Streams<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut streams = Streams { stdin, stdout };
    match dispatch(cli.command, &mut streams) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Numerical(report, err)) => {
            let _ = writeln!(stderr, "error: {err}");
            let _ = streams.stdout.write_all(io::to_json(&report).as_bytes());
            EXIT_NUMERICAL
        }
    }
}

fn emit(report: &Report, yes: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    io::write_target("-", &io::to_json(report), out)?;
    Ok(if yes { EXIT_YES } else { EXIT_NO })
}

fn error_report(command: &str, branch: &BranchSpec, err: &Error) -> Report {
    let mut r = Report::new(command, "error", branch, branch.tol_eig.unwrap_or(0.0));
    r.reason = Some(ReasonReport::from_error(err));
    if let Error::CandidateBudgetExceeded { count, .. } = err {
        r.candidate_space = *count;
    }
    r
}

fn validated_branch(args: &CheckArgs) -> Result<BranchSpec, Failure> {
    let branch = args.branch();
    branch.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(branch)
}

fn run_check(command: &str, args: &CheckArgs, s: &mut Streams) -> Result<(MembershipResult, BranchSpec), Failure> {
    let branch = validated_branch(args)?;
    let p = io::parse_gram(&io::read_source(&args.input, s.stdin)?)?;
    membership::check_membership(&p, &branch, &args.options())
        .map(|r| (r, branch))
        .map_err(|e| match e {
            Error::InvalidParameter(msg) => Failure::Usage(msg),
            e => Failure::Numerical(Box::new(error_report(command, &branch, &e)), e),
        })
}

fn write_witness(result: &MembershipResult, path: Option<&str>, s: &mut Streams) -> Result<(), Failure> {
    if let (Some(path), Some(w)) = (path, result.witness()) {
        io::write_target(path, &io::to_json(&EnsembleFile::from_ensemble(&w.ensemble)), s.stdout)?;
    }
    Ok(())
}

fn dispatch(command: Command, s: &mut Streams) -> Result<i32, Failure> {
    match command {
        Command::Check(args) => {
            let (result, branch) = run_check("check", &args, s)?;
            write_witness(&result, args.witness_out.as_deref(), s)?;
            emit(
                &Report::from_membership("check", &result, &branch),
                result.is_member(),
                s.stdout,
            )
        }
        Command::Reconstruct { check, out } => {
            let (result, branch) = run_check("reconstruct", &check, s)?;
            write_witness(&result, Some(&out), s)?;
            write_witness(&result, check.witness_out.as_deref(), s)?;
            emit(
                &Report::from_membership("reconstruct", &result, &branch),
                result.is_member(),
                s.stdout,
            )
        }
        Command::Closure { check, permutation_out } => {
            let branch = validated_branch(&check)?;
            let p = io::parse_gram(&io::read_source(&check.input, s.stdin)?)?;
            let opts = ClosureOptions {
                membership: check.options(),
                pattern_tol_zero: None,
            };
            let result = closure::check_closure_membership(&p, &branch, &opts)
                .map_err(|e| Failure::Numerical(Box::new(error_report("closure", &branch, &e)), e))?;
            if let (Some(path), ClosureVerdict::Member { permutation, .. }) = (&permutation_out, &result.verdict) {
                io::write_target(
                    path,
                    &io::to_json(&PermutationFile::from_permutation(permutation)),
                    s.stdout,
                )?;
            }
            emit(
                &Report::from_closure("closure", &result, &branch),
                result.is_member(),
                s.stdout,
            )
        }
        Command::Gram { input, out } => {
            let e = io::parse_ensemble(&io::read_source(&input, s.stdin)?)?;
            io::write_target(
                &out,
                &io::to_json(&MatrixFile::from_complex(gram_of_ensemble(&e).matrix())),
                s.stdout,
            )?;
            Ok(EXIT_YES)
        }
        Command::Approx { blocks, a, eps, out } => {
            let a = match (a, eps) {
                (Some(a), _) => a,
                (None, Some(eps)) => {
                    closure::displacement_for_epsilon(eps).map_err(|e| Failure::Usage(e.to_string()))?
                }
                (None, None) => unreachable!("clap requires one of --A and --eps"),
            };
            let ensembles = blocks
                .iter()
                .map(|path| io::parse_ensemble(&io::read_source(path, s.stdin)?))
                .collect::<Result<Vec<_>, _>>()?;
            let e = closure::approximate_block_diagonal(&ensembles, a).map_err(|e| Failure::Usage(e.to_string()))?;
            io::write_target(&out, &io::to_json(&EnsembleFile::from_ensemble(&e)), s.stdout)?;
            Ok(EXIT_YES)
        }
        Command::Edm(args) => {
            let (d, tol) = read_edm(&args, s)?;
            let lo = edm::centered_min_eigenvalue(&d);
            let yes = lo >= -tol;
            let mut report = Report::new("edm", if yes { "edm" } else { "not-edm" }, &BranchSpec::default(), tol);
            report.marginal = lo.abs() < membership::MARGINAL_FACTOR * tol;
            if !yes {
                report.reason = Some(ReasonReport::from_membership(&membership::NotMemberReason::NotEdm {
                    min_eigenvalue: lo,
                }));
            }
            emit(&report, yes, s.stdout)
        }
        Command::EdmExp { edm: args, out } => {
            let (d, tol) = read_edm(&args, s)?;
            let branch = BranchSpec::default();
            let lo = edm::centered_min_eigenvalue(&d);
            let mut report = Report::new("edm-exp", "edm", &branch, tol);
            report.marginal = lo.abs() < membership::MARGINAL_FACTOR * tol;
            match edm::edm_points_with_tol(&d, tol) {
                Ok(points) => {
                    let e = crate::types::CoherentEnsemble::new(
                        points
                            .column_iter()
                            .map(|c| {
                                crate::types::CoherentState::new(0.0, c.map(|x| num_complex::Complex64::new(x, 0.0)))
                            })
                            .collect(),
                    )
                    .expect("points share a dimension");
                    let file = EnsembleFile::from_ensemble(&e);
                    if let Some(path) = out {
                        io::write_target(&path, &io::to_json(&file), s.stdout)?;
                    }
                    report.witness = Some(file);
                    emit(&report, true, s.stdout)
                }
                Err(Error::NotEdm { min_eigenvalue }) => {
                    report.verdict = "not-edm".into();
                    report.reason = Some(ReasonReport::from_membership(&membership::NotMemberReason::NotEdm {
                        min_eigenvalue,
                    }));
                    emit(&report, false, s.stdout)
                }
                Err(e) => Err(Failure::Numerical(Box::new(error_report("edm-exp", &branch, &e)), e)),
            }
        }
        Command::Gen(g) => generate(g, s),
    }
}

fn read_edm(args: &EdmArgs, s: &mut Streams) -> Result<(EdmCandidate, f64), Failure> {
    let m = io::parse_real_matrix(&io::read_source(&args.input, s.stdin)?)?;
    let d = if args.squared_distances {
        EdmCandidate::from_squared_distances(m)
    } else {
        EdmCandidate::new(m)
    }
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let tol = BranchSpec {
        tol_eig: args.tol_eig,
        ..BranchSpec::default()
    }
    .eig_tol_for_real(d.matrix());
    Ok((d, tol))
}

fn generate(g: GenCommand, s: &mut Streams) -> Result<i32, Failure> {
    let usage = |e: Error| Failure::Usage(e.to_string());
    let (text, out) = match g {
        GenCommand::Equiangular { n, r, out } => (
            io::to_json(&MatrixFile::from_complex(
                generators::equiangular_gram(n, r).map_err(usage)?.matrix(),
            )),
            out,
        ),
        GenCommand::Mub { n, out } => (
            io::to_json(&MatrixFile::from_complex(
                generators::mub_gram(n).map_err(usage)?.matrix(),
            )),
            out,
        ),
        GenCommand::Random {
            n,
            modes,
            seed,
            scale,
            gram,
            out,
        } => {
            let e = generators::random_ensemble(&RandomSpec {
                seed,
                n,
                m: modes,
                scale,
            })
            .map_err(usage)?;
            let text = if gram {
                io::to_json(&MatrixFile::from_complex(gram_of_ensemble(&e).matrix()))
            } else {
                io::to_json(&EnsembleFile::from_ensemble(&e))
            };
            (text, out)
        }
        GenCommand::Edm { n, k, seed, scale, out } => (
            io::to_json(&MatrixFile::from_real(
                generators::random_edm(seed, n, k, scale).map_err(usage)?.matrix(),
            )),
            out,
        ),
    };
    io::write_target(&out, &text, s.stdout)?;
    Ok(EXIT_YES)
}
