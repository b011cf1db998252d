//! The `umtk` command-line front end.
//!
//! Exit codes: 0 when a decision is positive or a command succeeds, 1 when a
//! decision is negative, 2 for usage and input errors, 3 when an internal
//! verification fails.

use std::ffi::OsString;
use std::io::{IsTerminal, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ballean::{
    ball_preserving_bijection, enumerate_balls, hasse_diagram, hasse_digraph_iso, verify_ball_preserving,
    verify_digraph_iso,
};
use crate::canon::{canon_code_labeled, canon_code_unlabeled, rooted_tree_iso_map, shape_iso_map};
use crate::check::{run_check, CheckConfig, Trials, SUITES};
use crate::classification::classify_space;
use crate::diametrical::{diametrical_graph, multipartite_parts};
use crate::error::{Error, Result};
use crate::generators::{random_semimetric, random_ultrametric, GenConfig, ShapeClass};
use crate::mapping::PointMap;
use crate::parallel::Exec;
use crate::rational::Rational;
use crate::similarity::{
    decide_isometry, decide_weak_similarity, verify_isometry, verify_weak_similarity, IsometryWitness, WeakSimWitness,
};
use crate::space::SemimetricSpace;
use crate::tree::{build_tree, space_from_tree, RepTree};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "umtk",
    version,
    about = "Decide isometry, weak similarity and ball-preserving bijections of finite semimetric spaces"
)]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a space (or tree) document and print it back in normal form.
    Validate { input: PathBuf },
    /// Spectrum, diameter and ultrametricity of a space.
    Spectrum { input: PathBuf },
    /// Parts of the diametrical graph, or the graph itself with --dot.
    Diametric {
        input: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Representing tree of an ultrametric space.
    Tree {
        input: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Rooted-tree isomorphism of two representing trees.
    TreeIso {
        a: PathBuf,
        b: PathBuf,
        /// Require labels to match as well.
        #[arg(long)]
        labeled: bool,
    },
    /// Decide isometry, or check a given witness.
    Isometric {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_name = "PATH")]
        witness: Option<PathBuf>,
    },
    /// Decide weak similarity, or check a given witness.
    Weaksim {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_name = "PATH")]
        witness: Option<PathBuf>,
    },
    /// Class membership (R, R̃, D, T) of an ultrametric space.
    Classify { input: PathBuf },
    /// All balls of a space.
    Ballean { input: PathBuf },
    /// Hasse diagram of the ballean.
    Hasse {
        input: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Digraph isomorphism of two Hasse diagrams.
    HasseIso { a: PathBuf, b: PathBuf },
    /// Find a ball-preserving bijection, or check a given one.
    Ballpreserving {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_name = "PATH")]
        witness: Option<PathBuf>,
    },
    /// Generate a random space.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        n: usize,
        /// Candidate distances, comma separated (e.g. 1,2,5/2).
        #[arg(long, value_delimiter = ',')]
        pool: Option<Vec<Rational>>,
        /// Required classes of the representing tree; may be repeated.
        #[arg(long, value_enum, value_delimiter = ',')]
        class: Vec<ClassArg>,
        /// Random symmetric matrix without the strong triangle inequality.
        #[arg(long, conflicts_with = "class")]
        semimetric: bool,
    },
    /// Run the property suites.
    Check {
        /// `default` or a trial count applied to every suite.
        #[arg(long, default_value = "default")]
        trials: TrialsArg,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Suites to run, comma separated; all by default.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<u8>,
        /// Run trials on one thread.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    #[value(name = "R")]
    R,
    #[value(name = "Rtilde")]
    RTilde,
    #[value(name = "D")]
    D,
    #[value(name = "T")]
    T,
    #[value(name = "any")]
    Any,
}

#[derive(Debug, Clone, Copy)]
struct TrialsArg(Trials);

impl std::str::FromStr for TrialsArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "default" {
            return Ok(TrialsArg(Trials::Default));
        }
        s.parse()
            .map(|n| TrialsArg(Trials::Count(n)))
            .map_err(|_| format!("expected `default` or a count, got {s:?}"))
    }
}

/// What a command produced: text for stdout, an optional note for stderr,
/// and the exit code.
struct Output {
    stdout: String,
    note: Option<String>,
    code: i32,
}

impl Output {
    fn positive(stdout: String) -> Self {
        Output {
            stdout,
            note: None,
            code: EXIT_POSITIVE,
        }
    }

    fn negative(note: impl Into<String>) -> Self {
        Output {
            stdout: String::new(),
            note: Some(note.into()),
            code: EXIT_NEGATIVE,
        }
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("output serializes");
    s.push('\n');
    s
}

fn read_text(path: &Path) -> Result<String> {
    let mut text = String::new();
    let outcome = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    outcome.map_err(|e| Error::Document(format!("{}: {e}", path.display())))?;
    Ok(text)
}

/// A space document, or a tree document converted to its space.
fn read_space(path: &Path) -> Result<SemimetricSpace> {
    let text = read_text(path)?;
    if is_tree_doc(&text) {
        space_from_tree(&RepTree::from_json(&text)?)
    } else {
        SemimetricSpace::from_json(&text)
    }
}

/// A tree document, or the representing tree of a space document.
fn read_tree(path: &Path) -> Result<RepTree> {
    let text = read_text(path)?;
    if is_tree_doc(&text) {
        RepTree::from_json(&text)
    } else {
        build_tree(&SemimetricSpace::from_json(&text)?)
    }
}

fn is_tree_doc(text: &str) -> bool {
    match serde_json::from_str::<serde_json::Value>(text) {
        Ok(serde_json::Value::Object(map)) => !map.contains_key("points"),
        _ => false,
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::VerificationFailed(_) => EXIT_VERIFICATION,
        _ => EXIT_INPUT,
    }
}

fn use_color(stderr_is_tty: bool) -> bool {
    match std::env::var("UMTK_COLOR").as_deref() {
        Ok("never") => false,
        _ => stderr_is_tty,
    }
}

/// Runs one command line. `args` includes the program name.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let color = use_color(std::io::stderr().is_terminal());
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_POSITIVE
            };
        }
    };
    let result = execute(cli.command, stderr);
    match result {
        Ok(out) => {
            if let Some(note) = &out.note {
                let _ = writeln!(stderr, "{note}");
            }
            if !out.stdout.is_empty() {
                let written = match &cli.out {
                    Some(path) => std::fs::write(path, &out.stdout)
                        .map_err(|e| Error::Document(format!("{}: {e}", path.display()))),
                    None => stdout
                        .write_all(out.stdout.as_bytes())
                        .map_err(|e| Error::Document(e.to_string())),
                };
                if let Err(e) = written {
                    report_error(stderr, &e, color);
                    return EXIT_INPUT;
                }
            }
            out.code
        }
        Err(e) => {
            report_error(stderr, &e, color);
            exit_code(&e)
        }
    }
}

fn report_error(stderr: &mut dyn Write, e: &Error, color: bool) {
    let prefix = if color { "\x1b[1;31merror:\x1b[0m" } else { "error:" };
    let _ = writeln!(stderr, "{prefix} {e}");
}

#[derive(Serialize)]
struct SpectrumReport {
    spectrum: Vec<Rational>,
    diameter: Rational,
    ultrametric: bool,
    /// `[x, y, z]` with `d(x,y) > max(d(x,z), d(z,y))`.
    violation: Option<[String; 3]>,
}

#[derive(Serialize)]
struct TreeIsoReport {
    code: String,
    leaf_map: PointMap,
}

#[derive(Serialize)]
struct HasseDoc {
    balls: Vec<Vec<String>>,
    arcs: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct HasseIsoDoc {
    map: Vec<(Vec<String>, Vec<String>)>,
}

fn execute(command: Command, stderr: &mut dyn Write) -> Result<Output> {
    match command {
        Command::Validate { input } => Ok(Output::positive(read_space(&input)?.to_json())),
        Command::Spectrum { input } => {
            let x = read_space(&input)?;
            let violation = x
                .ultrametric_violation()
                .map(|v| [v.x, v.y, v.z].map(|i| x.point(i).to_string()));
            Ok(Output::positive(json_line(&SpectrumReport {
                spectrum: x.spectrum().values().to_vec(),
                diameter: x.diameter().clone(),
                ultrametric: violation.is_none(),
                violation,
            })))
        }
        Command::Diametric { input, dot } => {
            let x = read_space(&input)?;
            let graph = diametrical_graph(&x)?;
            if dot {
                return Ok(Output::positive(graph.to_dot()));
            }
            Ok(Output::positive(multipartite_parts(&graph)?.to_json(graph.vertices())))
        }
        Command::Tree { input, dot } => {
            let tree = read_tree(&input)?;
            Ok(Output::positive(if dot { tree.to_dot() } else { tree.to_json() }))
        }
        Command::TreeIso { a, b, labeled } => {
            let (ta, tb) = (read_tree(&a)?, read_tree(&b)?);
            let (code_a, code_b) = if labeled {
                (canon_code_labeled(&ta), canon_code_labeled(&tb))
            } else {
                (canon_code_unlabeled(&ta), canon_code_unlabeled(&tb))
            };
            let iso = if labeled {
                rooted_tree_iso_map(&ta, &tb, true)
            } else {
                shape_iso_map(&ta, &tb)
            };
            match iso {
                Some(iso) if code_a == code_b => Ok(Output::positive(json_line(&TreeIsoReport {
                    code: code_a.to_string(),
                    leaf_map: PointMap::new(iso.leaf_pairs(&ta, &tb)),
                }))),
                None if code_a != code_b => Ok(Output::negative(format!(
                    "not isomorphic{}: {code_a} vs {code_b}",
                    if labeled { " as labeled trees" } else { "" }
                ))),
                _ => Err(Error::VerificationFailed(
                    "canonical codes and isomorphism search disagree".into(),
                )),
            }
        }
        Command::Isometric { a, b, witness } => {
            let (x, y) = (read_space(&a)?, read_space(&b)?);
            if let Some(path) = witness {
                let w = IsometryWitness::from_json(&read_text(&path)?)?;
                return Ok(if verify_isometry(&x, &y, &w.phi)? {
                    Output::positive(w.to_json())
                } else {
                    Output::negative("witness does not preserve distances")
                });
            }
            Ok(match decide_isometry(&x, &y)? {
                Some(w) => Output::positive(w.to_json()),
                None => Output::negative("not isometric"),
            })
        }
        Command::Weaksim { a, b, witness } => {
            let (x, y) = (read_space(&a)?, read_space(&b)?);
            if let Some(path) = witness {
                let w = WeakSimWitness::from_json(&read_text(&path)?)?;
                return Ok(if verify_weak_similarity(&x, &y, &w)? {
                    Output::positive(w.to_json())
                } else {
                    Output::negative("witness does not realize a weak similarity")
                });
            }
            Ok(match decide_weak_similarity(&x, &y)? {
                Some(w) => Output::positive(w.to_json()),
                None => Output::negative("not weakly similar"),
            })
        }
        Command::Classify { input } => Ok(Output::positive(classify_space(&read_space(&input)?)?.to_json())),
        Command::Ballean { input } => {
            let x = read_space(&input)?;
            Ok(Output::positive(enumerate_balls(&x).to_json(&x)))
        }
        Command::Hasse { input, dot } => {
            let x = read_space(&input)?;
            let h = hasse_diagram(&enumerate_balls(&x));
            if dot {
                return Ok(Output::positive(h.to_dot(&x)));
            }
            Ok(Output::positive(json_line(&HasseDoc {
                balls: h.balls().iter().map(|b| b.names(&x)).collect(),
                arcs: h.arcs().to_vec(),
            })))
        }
        Command::HasseIso { a, b } => {
            let (x, y) = (read_space(&a)?, read_space(&b)?);
            let (hx, hy) = (hasse_diagram(&enumerate_balls(&x)), hasse_diagram(&enumerate_balls(&y)));
            match hasse_digraph_iso(&hx, &hy) {
                Some(iso) if verify_digraph_iso(&hx, &hy, &iso) => {
                    let map = (0..hx.vertex_count())
                        .map(|v| (hx.balls()[v].names(&x), hy.balls()[iso.map[v]].names(&y)))
                        .collect();
                    Ok(Output::positive(json_line(&HasseIsoDoc { map })))
                }
                Some(_) => Err(Error::VerificationFailed(
                    "Hasse isomorphism does not preserve arcs".into(),
                )),
                None => Ok(Output::negative("Hasse diagrams are not isomorphic")),
            }
        }
        Command::Ballpreserving { a, b, witness } => {
            let (x, y) = (read_space(&a)?, read_space(&b)?);
            if let Some(path) = witness {
                let f: PointMap = serde_json::from_str(&read_text(&path)?)?;
                return Ok(match verify_ball_preserving(&x, &y, &f)? {
                    None => Output::positive(json_line(&f)),
                    Some(v) => Output::negative(format!("not ball-preserving: {}", json_line(&v).trim_end())),
                });
            }
            Ok(match ball_preserving_bijection(&x, &y)? {
                Some(f) => Output::positive(json_line(&f)),
                None => Output::negative("no ball-preserving bijection exists"),
            })
        }
        Command::Gen {
            seed,
            n,
            pool,
            class,
            semimetric,
        } => {
            let has = |c| class.contains(&c);
            let shape = if has(ClassArg::R) {
                ShapeClass::R
            } else if has(ClassArg::RTilde) {
                ShapeClass::RTilde
            } else if has(ClassArg::T) {
                ShapeClass::T
            } else {
                ShapeClass::Any
            };
            let config = GenConfig {
                seed,
                n,
                pool,
                shape,
                injective: has(ClassArg::D),
            };
            let x = if semimetric {
                random_semimetric(&config)?
            } else {
                random_ultrametric(&config)?
            };
            Ok(Output::positive(x.to_json()))
        }
        Command::Check {
            trials,
            max_n,
            seed,
            suite,
            sequential,
        } => {
            let ids: Vec<u8> = if suite.is_empty() {
                SUITES.iter().map(|s| s.id).collect()
            } else {
                suite
            };
            let config = CheckConfig {
                seed,
                trials: trials.0,
                max_n,
                exec: if sequential { Exec::Sequential } else { Exec::Parallel },
            };
            let report = run_check(&config, &ids)?;
            for s in &report.suites {
                let _ = writeln!(
                    stderr,
                    "suite {:>2} {:<28} {:>4}/{:<4} passed ({} skipped, {} positive) {:>8.2?}{}",
                    s.id,
                    s.name,
                    s.passed,
                    s.trials,
                    s.skipped,
                    s.positives,
                    s.elapsed,
                    if s.ok() { "" } else { "  FAILED" }
                );
            }
            let code = if report.passed { EXIT_POSITIVE } else { EXIT_NEGATIVE };
            Ok(Output {
                stdout: report.to_json(),
                note: None,
                code,
            })
        }
    }
}
