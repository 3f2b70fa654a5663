//! Subcommands. Each one builds a report and an exit status: 0 for a
//! positive answer, 1 for an analysis-negative one.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use wignerlab_core::catalog::{self, ENTRY_NAMES};
use wignerlab_core::exact::Rational;
use wignerlab_core::geometry::StateSpace;
use wignerlab_core::symmetry::{
    enumerate_lifted_symmetries, find_permutation_channels, find_symmetry_for_channel, find_transported_channel,
    is_lifted_symmetry, product_generators, solve_covariant, CovariantOutcome, GridMapSearch, Obstruction,
    PermutationChannels, PhasePointMap, SymmetryCheck,
};
use wignerlab_core::theory::{
    are_compatible, are_complementary, effect_span_rank, is_surjective, validate, Bound, Channel, ChannelSearch,
    Compatibility, Observable, Side, Violation,
};
use wignerlab_core::wigner::{
    construct_family, degenerate_rep, faithful_choice_possible, faithful_member, find_positive_member, Anchor,
    Positivity, PositiveSearch, WignerRep,
};

use crate::error::CliError;
use crate::format::{exact_vec, from_json, parse_functional, parse_theory_file, to_json, Exact, FunctionalDoc, MapDoc, Parsed, TheoryFile};
use crate::plot::{render, Plot};
use crate::report::{channel_doc, rep_doc, CertificateDoc, Claim, PhaseMapDoc, ReportDocument, StateDoc};
use crate::verify::{verify_claim, Status};

#[derive(Debug, Parser)]
#[command(name = "wignerlab", version, about = "Exact Wigner representations of finite-dimensional theories")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Pair {
    /// First observable (default: the first in the file).
    #[arg(long)]
    pub a: Option<String>,
    /// Second observable (default: the second in the file).
    #[arg(long)]
    pub b: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check effect ranges and normalisation.
    Validate { file: PathBuf },
    /// Compatibility, info-completeness, complementarity, surjectivity.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        pair: Pair,
    },
    /// Build a Wigner representation and report faithfulness and positivity.
    Wigner {
        file: PathBuf,
        #[command(flatten)]
        pair: Pair,
        /// Free functionals, one per free cell, e.g. "1/2*x - 1/4".
        #[arg(long, num_args = 1.., conflicts_with_all = ["faithful", "degenerate", "positive"])]
        free: Vec<String>,
        /// Choose the free functionals to make the representation faithful.
        #[arg(long, conflicts_with_all = ["degenerate", "positive"])]
        faithful: bool,
        /// All free functionals zero.
        #[arg(long, conflicts_with = "positive")]
        degenerate: bool,
        /// Search the family for a positive member.
        #[arg(long)]
        positive: bool,
        /// Name stored in the written file.
        #[arg(long, default_value = "W")]
        name: String,
        /// Write the theory file with the new grid here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lifted symmetries of the file's grid and their channels.
    Symmetries {
        file: PathBuf,
        /// A channel, as JSON `{"matrix": [[..]], "offset": [..]}`, to test
        /// for a transported symmetry.
        #[arg(long)]
        channel: Option<String>,
    },
    /// Solve for the covariant Wigner representation.
    Covariant {
        file: PathBuf,
        #[command(flatten)]
        pair: Pair,
    },
    /// Draw the image of the state space as SVG.
    Plot {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay the claims of a JSON report against a theory file.
    Verify { file: PathBuf, report: PathBuf },
    /// Export a catalog entry as a theory file.
    Example {
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        /// Representation to include (default: the first one).
        #[arg(long)]
        rep: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// List the catalog.
        #[arg(long)]
        list: bool,
    },
}

/// What a command produced.
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn report(doc: &ReportDocument, format: OutputFormat, code: i32) -> Self {
        let stdout = match format {
            OutputFormat::Text => doc.to_text(),
            OutputFormat::Json => to_json(doc),
        };
        Self { stdout, code }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(&path.display().to_string(), e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(&path.display().to_string(), e))
}

pub fn load_theory(path: &Path) -> Result<Parsed, CliError> {
    parse_theory_file(&read(path)?)?.convert()
}

fn describe_violation(v: &Violation) -> String {
    match v {
        Violation::DimensionMismatch { observable, expected, found } => {
            format!("{observable}: effects have dimension {found}, expected {expected}")
        }
        Violation::EffectRange { observable, outcome, bound, value, point } => {
            let side = match bound {
                Bound::Lower => "below 0",
                Bound::Upper => "above 1",
            };
            let at = point.as_ref().map_or(String::new(), |p| format!(" at {}", show_point(p)));
            format!("{observable}[{outcome}] goes {side}: extreme value {value}{at}")
        }
        Violation::Normalization { observable, point, sum } => {
            format!("{observable}: effects sum to {sum} at {}", show_point(point))
        }
    }
}

fn show_point(p: &[Rational]) -> String {
    format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

/// Commands other than `validate` need a valid theory.
fn load_valid(path: &Path) -> Result<Parsed, CliError> {
    let parsed = load_theory(path)?;
    let violations = validate(&parsed.space, &parsed.observables);
    if let Some(v) = violations.first() {
        return Err(CliError::field("observables", format!("theory is invalid: {}", describe_violation(v))));
    }
    Ok(parsed)
}

fn pair<'a>(parsed: &'a Parsed, pair: &Pair) -> Result<(&'a Observable, &'a Observable), CliError> {
    Ok((parsed.observable(pair.a.as_deref(), 0)?, parsed.observable(pair.b.as_deref(), 1)?))
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let format = cli.format;
    match &cli.command {
        Command::Validate { file } => cmd_validate(file, format),
        Command::Analyze { file, pair: p } => cmd_analyze(file, p, format),
        Command::Wigner { file, pair: p, free, faithful, degenerate, positive, name, out } => {
            let mode = if !free.is_empty() {
                Mode::Free(free)
            } else if *faithful {
                Mode::Faithful
            } else if *positive {
                Mode::Positive
            } else if *degenerate {
                Mode::Degenerate
            } else {
                return Err(CliError::Usage(
                    "choose one of --free, --faithful, --degenerate, --positive".into(),
                ));
            };
            cmd_wigner(file, p, mode, name, out.as_deref(), format)
        }
        Command::Symmetries { file, channel } => cmd_symmetries(file, channel.as_deref(), format),
        Command::Covariant { file, pair: p } => cmd_covariant(file, p, format),
        Command::Plot { file, out } => cmd_plot(file, out),
        Command::Verify { file, report } => cmd_verify(file, report, format),
        Command::Example { name, rep, out, list } => cmd_example(name.as_deref(), rep.as_deref(), out.as_deref(), *list),
    }
}

pub fn cmd_validate(file: &Path, format: OutputFormat) -> Result<Outcome, CliError> {
    let parsed = load_theory(file)?;
    let violations = validate(&parsed.space, &parsed.observables);
    let mut doc = ReportDocument::new("validate");
    if violations.is_empty() {
        doc.claims.push(Claim::Valid);
        Ok(Outcome::report(&doc, format, 0))
    } else {
        doc.claims.push(Claim::Invalid {
            violations: violations.iter().map(describe_violation).collect(),
        });
        Ok(Outcome::report(&doc, format, 1))
    }
}

pub fn analysis_claims(space: &StateSpace, a: &Observable, b: &Observable, doc: &mut ReportDocument) -> Result<(), CliError> {
    let (na, nb) = (a.name().to_string(), b.name().to_string());
    if space.is_ball() {
        doc.notes.push("compatibility is decided on polytopes only".into());
    } else {
        doc.claims.push(match are_compatible(a, b, space)? {
            Compatibility::Compatible { joint } => Claim::Compatible {
                a: na.clone(),
                b: nb.clone(),
                joint: joint.iter().map(FunctionalDoc::from).collect(),
            },
            Compatibility::Incompatible(cert) => Claim::Incompatible {
                a: na.clone(),
                b: nb.clone(),
                certificate: CertificateDoc::from(&cert),
            },
        });
    }
    let rank = effect_span_rank(a, b, space);
    doc.claims.push(Claim::InfoComplete {
        a: na.clone(),
        b: nb.clone(),
        holds: rank == space.dimension() + 1,
        rank,
        dimension: space.dimension(),
    });
    match are_complementary(a, b, space) {
        Ok(None) => doc.claims.push(Claim::Complementary { a: na.clone(), b: nb.clone() }),
        Ok(Some(w)) => doc.claims.push(Claim::NotComplementary {
            a: na.clone(),
            b: nb.clone(),
            certain: match w.certain {
                Side::A => na.clone(),
                Side::B => nb.clone(),
            },
            outcome: w.outcome,
            state: w.point.as_ref().map(|p| StateDoc::new(space, p)),
            other_values: w.other_values.iter().map(|v| v.to_string()).collect(),
        }),
        Err(wignerlab_core::Error::UnsupportedDegenerateFace { observable, outcome }) => doc.notes.push(format!(
            "complementarity undecided: effect {observable}[{outcome}] is identically one"
        )),
        Err(e) => return Err(e.into()),
    }
    for o in [a, b] {
        let s = is_surjective(o, space)?;
        doc.claims.push(Claim::Surjective {
            observable: o.name().to_string(),
            holds: s.is_surjective(),
            witnesses: if s.is_surjective() {
                s.witnesses.iter().map(|w| w.as_ref().map(|p| StateDoc::new(space, p))).collect()
            } else {
                Vec::new()
            },
        });
    }
    let choice = faithful_choice_possible(a, b, space);
    doc.claims.push(Claim::FaithfulChoice {
        a: na,
        b: nb,
        free_slots: choice.free_slots,
        required: choice.required,
        possible: choice.possible,
    });
    Ok(())
}

pub fn cmd_analyze(file: &Path, p: &Pair, format: OutputFormat) -> Result<Outcome, CliError> {
    let parsed = load_valid(file)?;
    let (a, b) = pair(&parsed, p)?;
    let mut doc = ReportDocument::new("analyze");
    analysis_claims(&parsed.space, a, b, &mut doc)?;
    Ok(Outcome::report(&doc, format, 0))
}

pub enum Mode<'a> {
    Free(&'a [String]),
    Faithful,
    Degenerate,
    Positive,
}

/// Faithfulness and positivity claims for a representation.
pub fn rep_claims(name: &str, w: &WignerRep, space: &StateSpace, doc: &mut ReportDocument) -> Result<(), CliError> {
    let rank = w.representation_rank(space);
    doc.claims.push(Claim::Faithful {
        rep: rep_doc(name, w),
        holds: rank == space.dimension() + 1,
        rank,
    });
    doc.claims.push(match w.is_positive(space)? {
        Positivity::Positive => Claim::Positive { rep: rep_doc(name, w) },
        Positivity::Negative(n) => Claim::Negative {
            rep: rep_doc(name, w),
            row: n.row,
            col: n.col,
            minimum: n.minimum.to_string(),
            state: n.point.as_ref().map(|p| StateDoc::new(space, p)),
            value: n.value.map(Exact),
        },
    });
    Ok(())
}

pub fn cmd_wigner(
    file: &Path,
    p: &Pair,
    mode: Mode,
    name: &str,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<Outcome, CliError> {
    let parsed = load_valid(file)?;
    let (a, b) = pair(&parsed, p)?;
    let space = &parsed.space;
    let anchor = Anchor::last(a, b);
    let mut doc = ReportDocument::new("wigner");
    let rep = match mode {
        Mode::Free(texts) => {
            let free = texts
                .iter()
                .map(|t| parse_functional(t, space.ambient_dim()))
                .collect::<Result<Vec<_>, _>>()?;
            construct_family(a, b, anchor, &free)?
        }
        Mode::Degenerate => degenerate_rep(a, b, anchor)?,
        Mode::Faithful => match faithful_member(a, b, space, anchor)? {
            Some(w) => w,
            None => {
                let c = faithful_choice_possible(a, b, space);
                doc.claims.push(Claim::FaithfulChoice {
                    a: a.name().into(),
                    b: b.name().into(),
                    free_slots: c.free_slots,
                    required: c.required,
                    possible: c.possible,
                });
                doc.notes.push("no faithful member exists".into());
                return Ok(Outcome::report(&doc, format, 1));
            }
        },
        Mode::Positive => match find_positive_member(a, b, space, anchor)? {
            PositiveSearch::Found(w) => w,
            PositiveSearch::Infeasible(cert) => {
                doc.claims.push(Claim::NoPositiveMember {
                    a: a.name().into(),
                    b: b.name().into(),
                    certificate: CertificateDoc::from(&cert),
                });
                return Ok(Outcome::report(&doc, format, 1));
            }
        },
    };
    rep_claims(name, &rep, space, &mut doc)?;
    if let Some(path) = out {
        let file = TheoryFile::from_parts(space, &parsed.observables, Some((name, &rep)), &parsed.channels);
        write(path, &to_json(&file))?;
        doc.notes.push(format!("wrote {}", path.display()));
    }
    Ok(Outcome::report(&doc, format, 0))
}

pub fn symmetry_claims(
    name: &str,
    w: &WignerRep,
    space: &StateSpace,
    channel: Option<&Channel>,
    doc: &mut ReportDocument,
) -> Result<(), CliError> {
    let found = enumerate_lifted_symmetries(w, space)?;
    doc.claims.push(Claim::LiftedSymmetries {
        rep: rep_doc(name, w),
        maps: found.iter().map(PhaseMapDoc::from).collect(),
    });
    for phi in found.iter().filter(|m| !m.is_identity()) {
        let lift = phi.lift().to_affine_map();
        doc.claims.push(match find_transported_channel(w, space, &lift)? {
            ChannelSearch::Found(c) => Claim::Transported {
                rep: rep_doc(name, w),
                map: PhaseMapDoc::from(phi),
                channel: MapDoc::from(c.map()),
            },
            ChannelSearch::Infeasible(cert) => Claim::NotTransported {
                rep: rep_doc(name, w),
                map: PhaseMapDoc::from(phi),
                certificate: CertificateDoc::from(&cert),
            },
        });
    }
    // Every swap of two phase points that fails, with its witness.
    let n = w.rows() * w.cols();
    for p in 0..n {
        for q in p + 1..n {
            let swap = PhasePointMap::swap(w.rows(), w.cols(), (p / w.cols(), p % w.cols()), (q / w.cols(), q % w.cols()));
            if found.contains(&swap) {
                continue;
            }
            if let SymmetryCheck::Violated { point, image, certificate, .. } = is_lifted_symmetry(w, space, &swap)? {
                doc.claims.push(Claim::SymmetryViolated {
                    rep: rep_doc(name, w),
                    map: PhaseMapDoc::from(&swap),
                    state: StateDoc::new(space, &point),
                    image: exact_vec(image.entries()),
                    certificate: certificate.as_ref().map(CertificateDoc::from),
                });
            }
        }
    }
    if let Some(c) = channel {
        doc.claims.push(match find_symmetry_for_channel(w, space, c)? {
            GridMapSearch::Found(psi) => Claim::GridMap {
                rep: rep_doc(name, w),
                channel: MapDoc::from(c.map()),
                grid_map: MapDoc::from(&psi),
            },
            GridMapSearch::Collapsed { first, second } => Claim::NoTransportedSymmetry {
                rep: rep_doc(name, w),
                channel: MapDoc::from(c.map()),
                first: exact_vec(&first),
                second: exact_vec(&second),
            },
        });
    }
    Ok(())
}

pub fn cmd_symmetries(file: &Path, channel: Option<&str>, format: OutputFormat) -> Result<Outcome, CliError> {
    let parsed = load_valid(file)?;
    let (name, w) = parsed.require_wigner()?;
    let channel = match channel {
        Some(text) => {
            let map = from_json::<MapDoc>(text)?.to_map("channel")?;
            Some(Channel::new(&parsed.space, map, &parsed.space)?)
        }
        None => None,
    };
    let mut doc = ReportDocument::new("symmetries");
    symmetry_claims(name, w, &parsed.space, channel.as_ref(), &mut doc)?;
    Ok(Outcome::report(&doc, format, 0))
}

/// Claims for the covariant solver; the flag is true when a solution
/// exists.
pub fn covariant_claims(parsed: &Parsed, a: &Observable, b: &Observable, doc: &mut ReportDocument) -> Result<bool, CliError> {
    let space = &parsed.space;
    let report = solve_covariant(a, b, space, &parsed.channels)?;
    let h = &report.hypotheses;
    let (na, nb) = (a.name().to_string(), b.name().to_string());
    doc.claims.push(Claim::Hypotheses {
        a: na.clone(),
        b: nb.clone(),
        jointly_info_complete: h.jointly_info_complete,
        complementary: h.complementary,
        surjective_a: h.surjective_a,
        surjective_b: h.surjective_b,
    });
    let generator_docs = || -> Result<Vec<_>, CliError> {
        let PermutationChannels::Found(all) = find_permutation_channels(a, b, space, &parsed.channels)? else {
            return Ok(Vec::new());
        };
        Ok(product_generators(a.len(), b.len())
            .iter()
            .filter_map(|g| all.iter().find(|(e, _)| e == g))
            .map(|(g, c)| channel_doc(g, c.map()))
            .collect())
    };
    Ok(match report.outcome {
        CovariantOutcome::Unique { rep, symmetric } => {
            doc.claims.push(Claim::CovariantUnique {
                rep: rep_doc("W_cov", &rep),
                channels: generator_docs()?,
                symmetric,
            });
            true
        }
        CovariantOutcome::Family { base, directions } => {
            doc.claims.push(Claim::CovariantFamily {
                base: rep_doc("W_base", &base),
                directions: directions
                    .iter()
                    .map(|d| d.iter().map(FunctionalDoc::from).collect())
                    .collect(),
            });
            true
        }
        CovariantOutcome::None(Obstruction::Channel(o)) => {
            doc.claims.push(Claim::CovariantNoChannel {
                a: na,
                b: nb,
                element_a: o.element.g1.clone(),
                element_b: o.element.g2.clone(),
                certificate: CertificateDoc::from(&o.certificate),
                witness: o.witness.as_ref().map(|(p, q)| (exact_vec(p), exact_vec(q))),
            });
            false
        }
        CovariantOutcome::None(Obstruction::Covariance(cert)) => {
            doc.claims.push(Claim::CovariantInconsistent {
                a: na,
                b: nb,
                channels: generator_docs()?,
                certificate: CertificateDoc::from(&cert),
            });
            false
        }
        CovariantOutcome::HypothesisFailure(reason) => {
            doc.claims.push(Claim::HypothesisFailure { a: na, b: nb, reason });
            false
        }
    })
}

pub fn cmd_covariant(file: &Path, p: &Pair, format: OutputFormat) -> Result<Outcome, CliError> {
    let parsed = load_valid(file)?;
    let (a, b) = pair(&parsed, p)?;
    let mut doc = ReportDocument::new("covariant");
    let solved = covariant_claims(&parsed, a, b, &mut doc)?;
    Ok(Outcome::report(&doc, format, if solved { 0 } else { 1 }))
}

pub fn cmd_plot(file: &Path, out: &Path) -> Result<Outcome, CliError> {
    let parsed = load_valid(file)?;
    let (name, w) = parsed.require_wigner()?;
    match render(w, &parsed.space, name) {
        Plot::Svg(svg) => {
            write(out, &svg)?;
            Ok(Outcome {
                stdout: format!("wrote {}\n", out.display()),
                code: 0,
            })
        }
        Plot::TooManyDimensions(d) => Ok(Outcome {
            stdout: format!("refusing to plot: the image of {name} has dimension {d}, more than 2\n"),
            code: 1,
        }),
    }
}

pub fn cmd_verify(file: &Path, report: &Path, format: OutputFormat) -> Result<Outcome, CliError> {
    let parsed = load_valid(file)?;
    let doc: ReportDocument = from_json(&read(report)?)?;
    let results: Vec<(String, Status)> = doc
        .claims
        .iter()
        .map(|c| {
            let headline = c.describe().lines().next().unwrap_or_default().to_string();
            (headline, verify_claim(&parsed, c))
        })
        .collect();
    let failed = results.iter().any(|(_, s)| matches!(s, Status::Failed(_)));
    let stdout = match format {
        OutputFormat::Text => results.iter().map(|(h, s)| format!("{s}: {h}\n")).collect(),
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = results
                .iter()
                .map(|(h, s)| serde_json::json!({ "claim": h, "status": s.to_string() }))
                .collect();
            to_json(&rows)
        }
    };
    Ok(Outcome {
        stdout,
        code: if failed { 1 } else { 0 },
    })
}

/// A catalog entry as a theory file.
pub fn export_entry(name: &str, rep: Option<&str>) -> Result<TheoryFile, CliError> {
    let entry = catalog::load(name)?;
    let chosen = match rep {
        Some(r) => Some((r, entry.representation(r)?)),
        None => entry.representations.first().map(|(n, w)| (n.as_str(), w)),
    };
    Ok(TheoryFile::from_parts(
        entry.theory.state_space(),
        entry.theory.observables(),
        chosen,
        &entry.channels,
    ))
}

pub fn cmd_example(name: Option<&str>, rep: Option<&str>, out: Option<&Path>, list: bool) -> Result<Outcome, CliError> {
    if list {
        let mut stdout = String::new();
        for n in ENTRY_NAMES {
            let entry = catalog::load(n)?;
            let reps: Vec<&str> = entry.representations.iter().map(|(r, _)| r.as_str()).collect();
            stdout.push_str(&format!("{n}: {} [{}]\n", entry.summary, reps.join(", ")));
        }
        return Ok(Outcome { stdout, code: 0 });
    }
    let name = name.ok_or_else(|| CliError::Usage("example needs a name or --list".into()))?;
    let text = to_json(&export_entry(name, rep)?);
    match out {
        Some(path) => {
            write(path, &text)?;
            Ok(Outcome {
                stdout: format!("wrote {}\n", path.display()),
                code: 0,
            })
        }
        None => Ok(Outcome { stdout: text, code: 0 }),
    }
}
