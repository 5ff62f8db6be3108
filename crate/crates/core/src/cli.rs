//! Command-line front end and the demo replays.
//!
//! Exit codes: 0 success (or a true verdict), 1 a false verdict or an
//! obstruction, 2 usage, parse, mode or descriptor errors, 3 resource caps.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::cells::cell_label;
use crate::error::{Error, Result};
use crate::formula::{parse, parse_sentence, Formula, TheoryMode};
use crate::models::{EPSet, ModelElement, ModelHandle, Presentation, Realization};
use crate::oracle::{self, generate_corpus, CorpusConfig, Rung};
use crate::qe;
use crate::saturation::{self, BackAndForth};
use crate::sizesets::Card;

#[derive(Parser, Debug)]
#[command(name = "mereology", version, about = "Decision procedure and model workbench for mereology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a sentence; exit 0 when true, 1 when false.
    Decide {
        #[arg(long)]
        mode: TheoryMode,
        formula: String,
    },
    /// Print the quantifier-free normal form as a disjunction of profiles.
    Qe {
        #[arg(long)]
        mode: TheoryMode,
        formula: String,
    },
    /// Decide whether two formulas are equivalent; exit 0 when they are.
    Equiv {
        #[arg(long)]
        mode: TheoryMode,
        f: String,
        g: String,
    },
    /// Print the Venn cell sizes of named elements.
    Type {
        #[arg(long)]
        model: ModelHandle,
        /// JSON object mapping names to element descriptors.
        #[arg(long)]
        elems: PathBuf,
    },
    /// Build an element with prescribed cell sizes over the parameters.
    Realize {
        #[arg(long)]
        model: ModelHandle,
        /// JSON object mapping names to element descriptors.
        #[arg(long)]
        params: PathBuf,
        /// JSON array of `[inside, outside]` sizes, indexed by cell mask.
        #[arg(long)]
        split: PathBuf,
    },
    /// Check the saturation criterion.
    CheckSat {
        #[arg(long)]
        model: ModelHandle,
        #[arg(long, default_value_t = 8)]
        trials: usize,
    },
    /// Run the back-and-forth construction; exit 1 on an obstruction.
    Iso {
        #[arg(long)]
        left: ModelHandle,
        #[arg(long)]
        right: ModelHandle,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Print the largest number of disjoint infinite elements.
    Characteristic {
        #[arg(long)]
        model: ModelHandle,
    },
    /// Compare the decision procedure with the brute-force oracle on a
    /// random corpus; exit 1 on any disagreement.
    OracleCompare {
        #[arg(long)]
        mode: TheoryMode,
        #[arg(long, default_value_t = 100)]
        corpus_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated atom counts (class mode).
        #[arg(long, value_delimiter = ',')]
        window: Option<Vec<u32>>,
        /// Rungs `(C,P,T)`, e.g. `"(2,2,4),(3,2,6),(3,4,8)"` (set mode).
        #[arg(long)]
        rungs: Option<String>,
    },
    /// Replay a named result.
    Demo { id: Demo },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    /// The set theory has no top, the class theory does.
    Unbounded,
    /// Venn figure with an infinite exterior in the column model.
    TypesFigure,
    /// Venn figure with a finite exterior in the saturated algebra.
    ClassTypes,
    /// The saturation criterion across the model zoo.
    SaturationCriterion,
    /// Back and forth between the two saturated set models.
    AllIsomorphic,
    /// The amorphous model is not saturated and not isomorphic to columns.
    AmorphousFails,
    /// The characteristic models and the isomorphism invariant.
    Characteristic,
    /// The model of finite sets agrees with columns but is not saturated.
    Prime,
}

impl Demo {
    pub fn all() -> &'static [Demo] {
        Demo::value_variants()
    }

    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code. Errors go to stderr.
pub fn run(args: &[String], out: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if e.use_stderr() {
                eprint!("{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_resource_cap() {
                3
            } else {
                2
            }
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Invalid(format!("write failed: {e}"))
}

fn verdict_code(v: bool) -> i32 {
    if v {
        0
    } else {
        1
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn read_elements(m: &ModelHandle, path: &Path) -> Result<(Vec<String>, Vec<ModelElement>)> {
    let map: BTreeMap<String, serde_json::Value> =
        serde_json::from_str(&read(path)?).map_err(|e| Error::Descriptor(format!("{}: {e}", path.display())))?;
    let mut names = Vec::new();
    let mut elems = Vec::new();
    for (name, value) in map {
        elems.push(m.element_from_json(&value.to_string())?);
        names.push(name);
    }
    Ok((names, elems))
}

fn read_split(path: &Path) -> Result<Vec<(Card, Card)>> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::MalformedSplit(format!("{}: {e}", path.display())))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Decide { mode, formula } => {
            let v = qe::decide(&parse_sentence(&formula, mode)?, mode)?;
            writeln!(out, "{v}").map_err(io)?;
            Ok(verdict_code(v))
        }
        Command::Qe { mode, formula } => {
            let d = qe::qe_normal_form(&parse(&formula, mode)?, mode)?;
            write!(out, "{}", d.dump()).map_err(io)?;
            Ok(0)
        }
        Command::Equiv { mode, f, g } => {
            let v = qe::equivalent(&parse(&f, mode)?, &parse(&g, mode)?, mode)?;
            writeln!(out, "{v}").map_err(io)?;
            Ok(verdict_code(v))
        }
        Command::Type { model, elems } => {
            let (names, tuple) = read_elements(&model, &elems)?;
            write!(out, "{}", model.named_cell_sizes(&names, &tuple)?.dump()).map_err(io)?;
            Ok(0)
        }
        Command::Realize { model, params, split } => {
            let (names, tuple) = read_elements(&model, &params)?;
            match model.realize_type(&tuple, &read_split(&split)?)? {
                Realization::Realized(x) => writeln!(out, "{}", x.to_json()),
                Realization::Unrealizable { cell } => writeln!(out, "UNREALIZABLE {}", cell_label(&names, cell)),
            }
            .map_err(io)?;
            Ok(0)
        }
        Command::CheckSat { model, trials } => {
            write!(out, "{}", saturation::check_criterion(&model, trials)?).map_err(io)?;
            Ok(0)
        }
        Command::Iso { left, right, steps } => iso(&left, &right, steps, out),
        Command::Characteristic { model } => {
            writeln!(out, "{}", saturation::characteristic(&model)).map_err(io)?;
            Ok(0)
        }
        Command::OracleCompare {
            mode,
            corpus_size,
            seed,
            window,
            rungs,
        } => {
            let window = window.unwrap_or_else(|| oracle::CLASS_WINDOW.to_vec());
            let rungs = match rungs {
                Some(text) => parse_rungs(&text)?,
                None => oracle::SET_RUNGS.to_vec(),
            };
            let summary = oracle_compare(mode, corpus_size, seed, &window, &rungs, out)?;
            Ok(verdict_code(summary.disagree == 0))
        }
        Command::Demo { id } => {
            demo(id, out)?;
            Ok(0)
        }
    }
}

fn iso(left: &ModelHandle, right: &ModelHandle, steps: usize, out: &mut dyn Write) -> Result<i32> {
    match saturation::back_and_forth(left, right, steps)? {
        BackAndForth::Iso(p) => {
            write!(out, "{p}").map_err(io)?;
            Ok(0)
        }
        BackAndForth::Obstruction(o) => {
            writeln!(out, "{o}").map_err(io)?;
            Ok(1)
        }
    }
}

fn parse_rungs(text: &str) -> Result<Vec<Rung>> {
    text.split(')')
        .map(|s| s.trim().trim_start_matches(',').trim())
        .filter(|s| !s.is_empty())
        .map(|s| format!("{s})").parse())
        .collect()
}

/// Totals of an oracle comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CompareSummary {
    pub agree: usize,
    pub disagree: usize,
    pub unstable: usize,
    pub errors: usize,
}

/// Writes one row per corpus sentence (`index, decide, oracle, status,
/// sentence`) and a closing summary line.
pub fn oracle_compare(
    mode: TheoryMode,
    size: usize,
    seed: u64,
    window: &[u32],
    rungs: &[Rung],
    out: &mut dyn Write,
) -> Result<CompareSummary> {
    let corpus = generate_corpus(&CorpusConfig::new(mode, size, seed));
    let mut s = CompareSummary::default();
    for (i, f) in corpus.iter().enumerate() {
        let d = qe::decide(f, mode)?;
        let o = match mode {
            TheoryMode::ClassMereology => oracle::stabilized_decide_class(f, window),
            TheoryMode::SetMereology => oracle::bounded_eval_set(f, &BTreeMap::new(), rungs),
        };
        let (shown, status) = match o {
            Ok(r) => match r.verdict {
                Some(v) if v == d => {
                    s.agree += 1;
                    (r.to_string(), "agree")
                }
                Some(_) => {
                    s.disagree += 1;
                    (r.to_string(), "DISAGREE")
                }
                None => {
                    s.unstable += 1;
                    (r.to_string(), "unstable")
                }
            },
            Err(e) if e.is_resource_cap() => {
                s.errors += 1;
                ("cap".to_string(), "error")
            }
            Err(e) => return Err(e),
        };
        writeln!(out, "{i}\t{d}\t{shown}\t{status}\t{f}").map_err(io)?;
    }
    write!(out, "agree/disagree/unstable: {}/{}/{}", s.agree, s.disagree, s.unstable).map_err(io)?;
    if s.errors > 0 {
        write!(out, " (resource caps: {})", s.errors).map_err(io)?;
    }
    writeln!(out).map_err(io)?;
    Ok(s)
}

/// Joins the cells of a Venn figure: `cells` lists `(mask, key, set)` and
/// element `i` collects every cell whose mask has bit `i`.
fn figure(pres: Presentation, arity: usize, cells: &[(usize, u32, EPSet)]) -> Result<Vec<ModelElement>> {
    (0..arity)
        .map(|i| {
            cells
                .iter()
                .filter(|(m, _, _)| m >> i & 1 == 1)
                .try_fold(ModelElement::bottom(pres), |acc, (_, k, s)| {
                    Ok(acc.join(&ModelElement::from_parts(pres, [(*k, s.clone())])?))
                })
        })
        .collect()
}

/// The figure `(abc, b, a, c, ab, bc, ac) = (5, 2, ∞, 17, 3, ∞, 0)` in the
/// column model: finite cells in column 0, infinite ones in columns 1 and 2.
pub fn types_figure() -> Result<Vec<ModelElement>> {
    figure(
        Presentation::Columns,
        3,
        &[
            (0b111, 0, EPSet::finite(0..5)),
            (0b010, 0, EPSet::finite(5..7)),
            (0b001, 1, EPSet::full()),
            (0b100, 0, EPSet::finite(7..24)),
            (0b011, 0, EPSet::finite(24..27)),
            (0b110, 2, EPSet::full()),
        ],
    )
}

/// The same figure in the saturated algebra with an exterior of 57 atoms:
/// the infinite cells share the tail from 84 on by parity.
pub fn class_types_figure() -> Result<Vec<ModelElement>> {
    figure(
        Presentation::SaturatedBA,
        3,
        &[
            (0b111, 0, EPSet::finite(0..5)),
            (0b010, 0, EPSet::finite(5..7)),
            (0b001, 0, EPSet::progression(84, 0, 2)),
            (0b100, 0, EPSet::finite(7..24)),
            (0b011, 0, EPSet::finite(24..27)),
            (0b110, 0, EPSet::progression(84, 1, 2)),
        ],
    )
}

fn names(n: usize) -> Vec<String> {
    ["a", "b", "c"][..n].iter().map(|s| s.to_string()).collect()
}

fn sentence(text: &str, mode: TheoryMode) -> Formula {
    parse_sentence(text, mode).expect("demo sentences parse")
}

/// Replays one named result. Output depends only on `id`.
pub fn demo(id: Demo, out: &mut dyn Write) -> Result<()> {
    let mut w = |s: String| writeln!(out, "{s}").map_err(io);
    let set = TheoryMode::SetMereology;
    let class = TheoryMode::ClassMereology;
    w(format!("# demo {}", id.name()))?;
    match id {
        Demo::Unbounded => {
            let cases = [
                ("E x. A y. (y <= x)", set),
                ("E x. A y. (y <= x)", class),
                ("A a. E x. (a <= x & ~(x = a))", set),
                ("A a. E x. (a <= x & ~(x = a))", class),
                ("A a. (~|a|=0 -> E x. (x <= a & |x|=1))", set),
                ("E x. (~|x|=0 & ~|x|=1 & A y. (y <= x -> (|y|=0 | y = x)))", set),
            ];
            for (text, mode) in cases {
                let f = sentence(text, mode);
                w(format!("{mode}\t{}\t{f}", qe::decide(&f, mode)?))?;
            }
        }
        Demo::TypesFigure => {
            let m = ModelHandle::COLUMNS;
            let tuple = types_figure()?;
            for (n, e) in names(3).iter().zip(&tuple) {
                w(format!("{n} = {}", e.to_json()))?;
            }
            w(m.named_cell_sizes(&names(3), &tuple)?.dump().trim_end().to_string())?;
        }
        Demo::ClassTypes => {
            let m = ModelHandle::SATURATED_BA;
            let tuple = class_types_figure()?;
            for (n, e) in names(3).iter().zip(&tuple) {
                w(format!("{n} = {}", e.to_json()))?;
            }
            w(m.named_cell_sizes(&names(3), &tuple)?.dump().trim_end().to_string())?;
        }
        Demo::SaturationCriterion => {
            for id in ["columns", "columns-perm", "ba-sat", "prime", "ba6", "amorphous", "char2"] {
                let m: ModelHandle = id.parse()?;
                w(saturation::check_criterion(&m, 3)?.to_string().trim_end().to_string())?;
            }
        }
        Demo::AllIsomorphic => {
            let (l, r) = (ModelHandle::COLUMNS, ModelHandle::COLUMNS_PERM);
            match saturation::back_and_forth(&l, &r, 40)? {
                BackAndForth::Iso(p) => {
                    w(p.to_string().trim_end().to_string())?;
                    saturation::verify_partial_iso(&p)?;
                    w(format!(
                        "verified {} pairs (consumed {} left, {} right)",
                        p.pairs.len(),
                        p.consumed_left,
                        p.consumed_right
                    ))?;
                }
                BackAndForth::Obstruction(o) => w(o.to_string())?,
            }
        }
        Demo::AmorphousFails => {
            w(saturation::check_criterion(&ModelHandle::AMORPHOUS, 3)?.to_string().trim_end().to_string())?;
            match saturation::back_and_forth(&ModelHandle::COLUMNS, &ModelHandle::AMORPHOUS, 200)? {
                BackAndForth::Iso(p) => w(format!("no obstruction within {} pairs", p.pairs.len()))?,
                BackAndForth::Obstruction(o) => w(o.to_string())?,
            }
        }
        Demo::Characteristic => {
            for id in ["char1", "char2", "char3", "char4", "char5", "columns", "amorphous", "ba-sat", "prime"] {
                let m: ModelHandle = id.parse()?;
                w(format!("{id}\t{}", saturation::characteristic(&m)))?;
            }
            let two: ModelHandle = "char2".parse()?;
            let three: ModelHandle = "char3".parse()?;
            match saturation::back_and_forth(&two, &two, 20)? {
                BackAndForth::Iso(p) => {
                    saturation::verify_partial_iso(&p)?;
                    w(format!("char2 ~ char2: verified {} pairs", p.pairs.len()))?;
                }
                BackAndForth::Obstruction(o) => w(format!("char2 ~ char2: {o}"))?,
            }
            match saturation::back_and_forth(&two, &three, 200)? {
                BackAndForth::Iso(p) => w(format!("char2 ~ char3: no obstruction within {} pairs", p.pairs.len()))?,
                BackAndForth::Obstruction(o) => w(format!("char2 ~ char3: {o}"))?,
            }
        }
        Demo::Prime => {
            w(saturation::check_criterion(&ModelHandle::PRIME, 1)?.to_string().trim_end().to_string())?;
            let texts = [
                "A a. E x. (a <= x & ~(x = a))",
                "E x. (x = 0 & A y. (x <= y))",
                "A a. A b. E x. (a <= x & b <= x)",
                "A a. (|a| = 0 | E x. (x <= a & |x| = 1))",
                "E x. (~|x|=0 & ~|x|=1 & ~|x|=2)",
            ];
            for text in texts {
                let f = sentence(text, set);
                let p = ModelHandle::PRIME.eval(&f, &BTreeMap::new())?;
                let c = ModelHandle::COLUMNS.eval(&f, &BTreeMap::new())?;
                w(format!("prime={p}\tcolumns={c}\tdecide={}\t{f}", qe::decide(&f, set)?))?;
            }
            match saturation::back_and_forth(&ModelHandle::COLUMNS, &ModelHandle::PRIME, 50)? {
                BackAndForth::Iso(p) => w(format!("no obstruction within {} pairs", p.pairs.len()))?,
                BackAndForth::Obstruction(o) => w(o.to_string())?,
            }
        }
    }
    Ok(())
}
