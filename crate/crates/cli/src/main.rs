//! `ggslab`: batch computations in GGS groups from the command line.

mod config;

use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ggslab::certificate::{self, Verdict};
use ggslab::harness;
use ggslab::quotient::quotient_group;
use ggslab::reduction::project_to_length1;
use ggslab::subgroup::{
    classify, dichotomy_check, section_subgroup, stab1_generators, Dichotomy, SubgroupPresentation,
    SubgroupType,
};
use ggslab::word_problem::{is_trivial, order_with_cap};
use ggslab::{GgsGroup, Vertex, Word};

use config::Config;

const DEFAULT_SPEC: &str = "p=3; e=1,2";

#[derive(Parser)]
#[command(name = "ggslab", version, about = "Computations in GGS groups")]
struct Cli {
    /// Group spec, `p=<int>; e=<c0>,<c1>,...`.
    #[arg(long, global = true)]
    spec: Option<String>,
    /// TOML config file; defaults to $GGSLAB_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel suites.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Properties of the group.
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Operations on single elements.
    Elem {
        #[command(subcommand)]
        cmd: ElemCmd,
    },
    /// Finitely generated subgroups.
    Sub {
        #[command(subcommand)]
        cmd: SubCmd,
    },
    /// Length reduction down the tree.
    Reduce {
        #[command(subcommand)]
        cmd: ReduceCmd,
    },
    /// Subgroup-induction certificates.
    Sip {
        #[command(subcommand)]
        cmd: SipCmd,
    },
    /// Congruence quotients.
    Quotient {
        #[command(subcommand)]
        cmd: QuotientCmd,
    },
    /// Seeded verification suites.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Prints p, e, and the torsion and branch verdicts.
    Info,
}

#[derive(Args)]
struct WordArgs {
    /// Words; read from stdin, one per line, when absent.
    words: Vec<String>,
}

#[derive(Subcommand)]
enum ElemCmd {
    /// Normal form and lengths.
    Reduce(WordArgs),
    /// Image of a vertex.
    Act {
        #[arg(long)]
        vertex: String,
        #[command(flatten)]
        words: WordArgs,
    },
    /// Section at a vertex.
    Section {
        #[arg(long)]
        vertex: String,
        #[command(flatten)]
        words: WordArgs,
    },
    /// Order of the element.
    Order {
        /// Recursion depth cap.
        #[arg(long)]
        depth_cap: Option<usize>,
        #[command(flatten)]
        words: WordArgs,
    },
    /// Whether the element is the identity.
    Trivial(WordArgs),
}

#[derive(Args)]
struct GensArg {
    /// File with one generator per line (`-` for stdin); falls back to the
    /// config's `gens`.
    #[arg(long)]
    gens: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SubCmd {
    /// Image in the abelianization.
    Classify(GensArg),
    /// Generators of the first-level stabilizer.
    Stab1(GensArg),
    /// Section subgroups at a vertex, or at every first-level vertex.
    Sections {
        #[arg(long)]
        vertex: Option<String>,
        #[command(flatten)]
        gens: GensArg,
    },
    /// Whether the first-level sections are all full or all stabilizing.
    Dichotomy(GensArg),
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// Descends until all sections have generators of b-length at most one.
    Run {
        #[command(flatten)]
        gens: GensArg,
        /// Writes the step trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SipCmd {
    /// Builds a certificate.
    Certify {
        #[command(flatten)]
        gens: GensArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Checks a certificate; exit status 2 on rejection.
    Check { file: PathBuf },
}

#[derive(Subcommand)]
enum QuotientCmd {
    /// Order of the image at a level (of the whole group by default).
    Order {
        #[arg(long)]
        level: usize,
        #[command(flatten)]
        gens: OptionalGens,
    },
    /// Index of the image of the subgroup in the image of the group.
    Index {
        #[arg(long)]
        level: usize,
        #[command(flatten)]
        gens: GensArg,
    },
}

#[derive(Args)]
struct OptionalGens {
    #[arg(long)]
    gens: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Runs a named suite and prints its report.
    Suite {
        name: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Directory for the report file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
    Io(String),
    Reject(String),
    Suite(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Domain(_) => 65,
            Failure::Io(_) => 74,
            Failure::Reject(_) => 2,
            Failure::Suite(_) => 1,
        }
    }
}

impl From<ggslab::Error> for Failure {
    fn from(e: ggslab::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<Output, Failure>;

/// What a command prints: plain text and a JSON rendering of the same data.
struct Output {
    text: String,
    json: Value,
}

struct Ctx {
    group: GgsGroup,
    config: Config,
    json: bool,
}

impl Ctx {
    fn words(&self, args: &WordArgs) -> Result<Vec<Word>, Failure> {
        let lines = if args.words.is_empty() {
            read_lines(Path::new("-"))?
        } else {
            args.words.clone()
        };
        lines
            .iter()
            .map(|t| Ok(self.group.parse_word(t)?))
            .collect()
    }

    fn vertex(&self, text: &str) -> Result<Vertex, Failure> {
        Ok(self.group.parse_vertex(text)?)
    }

    fn subgroup(&self, path: Option<&PathBuf>) -> Result<SubgroupPresentation, Failure> {
        let lines = match (path, &self.config.gens) {
            (Some(p), _) => read_lines(p)?,
            (None, Some(g)) => g.clone(),
            (None, None) => {
                return Err(Failure::Usage(
                    "no generators: pass --gens <file> or set gens in the config".into(),
                ))
            }
        };
        Ok(SubgroupPresentation::parse(
            self.group.clone(),
            lines.iter().map(String::as_str),
        )?)
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }
}

/// Nonblank lines, without `#` comments.
fn read_lines(path: &Path) -> Result<Vec<String>, Failure> {
    Ok(read_text(path)?
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
        .filter(|l| !l.is_empty())
        .collect())
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn canonical(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn spell(words: &[Word]) -> Vec<String> {
    words.iter().map(Word::to_string).collect()
}

fn lines(items: impl IntoIterator<Item = String>) -> String {
    items.into_iter().collect::<Vec<_>>().join("\n")
}

fn group_info(ctx: &Ctx) -> Outcome {
    let g = &ctx.group;
    let e: Vec<String> = g.defining_vector().iter().map(u32::to_string).collect();
    Ok(Output {
        text: format!(
            "p: {}\ne: {}\ntorsion: {}; branch: {}",
            g.p(),
            e.join(","),
            yes_no(g.is_torsion()),
            yes_no(g.is_branch_indicator())
        ),
        json: json!({
            "p": g.p(),
            "e": g.defining_vector(),
            "torsion": g.is_torsion(),
            "branch": g.is_branch_indicator(),
        }),
    })
}

fn elem(ctx: &Ctx, cmd: &ElemCmd) -> Outcome {
    let g = &ctx.group;
    let mut text = Vec::new();
    let mut out = Vec::new();
    match cmd {
        ElemCmd::Reduce(args) => {
            for w in ctx.words(args)? {
                let (alpha, beta) = w.exponent_sums();
                text.push(w.to_string());
                out.push(json!({
                    "word": w.to_string(),
                    "total_length": w.total_length(),
                    "b_length": w.b_length(),
                    "alpha": alpha,
                    "beta": beta,
                }));
            }
        }
        ElemCmd::Act { vertex, words } => {
            let v = ctx.vertex(vertex)?;
            for w in ctx.words(words)? {
                let image = g.act(&w, &v).to_string();
                text.push(image.clone());
                out.push(json!({"word": w.to_string(), "vertex": v.to_string(), "image": image}));
            }
        }
        ElemCmd::Section { vertex, words } => {
            let v = ctx.vertex(vertex)?;
            for w in ctx.words(words)? {
                let s = g.section(&w, &v).to_string();
                text.push(s.clone());
                out.push(json!({"word": w.to_string(), "vertex": v.to_string(), "section": s}));
            }
        }
        ElemCmd::Order { depth_cap, words } => {
            let cap = depth_cap.unwrap_or(ctx.config.depth_cap());
            for w in ctx.words(words)? {
                let n = order_with_cap(g, &w, cap)?.to_string();
                text.push(n.clone());
                out.push(json!({"word": w.to_string(), "order": n}));
            }
        }
        ElemCmd::Trivial(args) => {
            for w in ctx.words(args)? {
                let t = is_trivial(g, &w);
                text.push(t.to_string());
                out.push(json!({"word": w.to_string(), "trivial": t}));
            }
        }
    }
    Ok(Output {
        text: lines(text),
        json: Value::Array(out),
    })
}

fn type_json(t: SubgroupType) -> Value {
    match t {
        SubgroupType::FullGroup => json!({"type": "full"}),
        SubgroupType::TypeII(j) => json!({"type": "II", "j": j}),
        SubgroupType::TypeIII(j) => json!({"type": "III", "j": j}),
    }
}

fn sub(ctx: &Ctx, cmd: &SubCmd) -> Outcome {
    match cmd {
        SubCmd::Classify(a) => {
            let t = classify(&ctx.subgroup(a.gens.as_ref())?);
            Ok(Output {
                text: t.to_string(),
                json: type_json(t),
            })
        }
        SubCmd::Stab1(a) => {
            let h = ctx.subgroup(a.gens.as_ref())?;
            let s = stab1_generators(&h);
            let gens = spell(s.presentation.gens());
            let factors: Option<Vec<Value>> = s
                .factorizations
                .as_ref()
                .map(|fs| fs.iter().map(|f| json!(f.factors())).collect());
            Ok(Output {
                text: lines(gens.iter().map(|w| {
                    if w.is_empty() {
                        "1".to_string()
                    } else {
                        w.clone()
                    }
                })),
                json: json!({"gens": gens, "factorizations": factors, "pivot": s.pivot}),
            })
        }
        SubCmd::Sections { vertex, gens } => {
            let h = ctx.subgroup(gens.gens.as_ref())?;
            let p = ctx.group.p();
            let targets = match vertex {
                Some(v) => vec![ctx.vertex(v)?],
                None => (1..=p).map(|u| Vertex::child_of_root(p, u)).collect(),
            };
            let mut text = Vec::new();
            let mut out = serde_json::Map::new();
            for v in targets {
                let mut s = h.clone();
                for &u in v.letters() {
                    s = section_subgroup(&s, &Vertex::child_of_root(p, u))?;
                }
                text.push(format!("{v}: {s}"));
                out.insert(v.to_string(), json!(spell(s.gens())));
            }
            Ok(Output {
                text: lines(text),
                json: Value::Object(out),
            })
        }
        SubCmd::Dichotomy(a) => {
            let verdict = dichotomy_check(&ctx.subgroup(a.gens.as_ref())?)?;
            let (text, json) = match verdict {
                Dichotomy::AllSectionsFull => (
                    "all sections full".to_string(),
                    json!({"verdict": "all_full"}),
                ),
                Dichotomy::AllSectionsStabilize => (
                    "all sections stabilize the first level".to_string(),
                    json!({"verdict": "all_stabilize"}),
                ),
                Dichotomy::Violation { first, second } => (
                    format!("violation at {first} and {second}"),
                    json!({"verdict": "violation", "first": first.to_string(), "second": second.to_string()}),
                ),
            };
            Ok(Output { text, json })
        }
    }
}

fn reduce(ctx: &Ctx, cmd: &ReduceCmd) -> Outcome {
    let ReduceCmd::Run { gens, trace } = cmd;
    let h = ctx.subgroup(gens.gens.as_ref())?;
    let proj = project_to_length1(&h)?;
    let trace_json = serde_json::to_value(&proj.trace).expect("traces serialize");
    if let Some(path) = trace {
        write_file(path, &canonical(&trace_json))?;
    }
    let report: Vec<String> = proj
        .transversal_report()
        .iter()
        .map(Vertex::to_string)
        .collect();
    let sections = proj.level_sections()?;
    let mut text = vec![
        format!("level: {}", proj.level),
        format!("transversal report: {}", report.join(" ")),
    ];
    let mut map = serde_json::Map::new();
    for (v, s) in &sections {
        text.push(format!("{v}: {s}"));
        map.insert(v.to_string(), json!(spell(s.gens())));
    }
    Ok(Output {
        text: lines(text),
        json: json!({
            "level": proj.level,
            "transversal_report": report,
            "sections": map,
            "trace": trace_json,
        }),
    })
}

fn sip(ctx: &Ctx, cmd: &SipCmd) -> Outcome {
    match cmd {
        SipCmd::Certify { gens, output } => {
            let h = ctx.subgroup(gens.gens.as_ref())?;
            let cert = certificate::certify(&h)?;
            let text = certificate::serialize(&cert);
            let census = cert.root.census();
            let summary = json!({
                "depth": cert.root.depth(),
                "nodes": {
                    "trivial": census[0],
                    "full": census[1],
                    "finite": census[2],
                    "finite_index": census[3],
                    "section": census[4],
                },
            });
            match output {
                Some(path) => {
                    write_file(path, &text)?;
                    Ok(Output {
                        text: format!(
                            "wrote {}: depth {}, {} nodes",
                            path.display(),
                            cert.root.depth(),
                            census.iter().sum::<usize>()
                        ),
                        json: summary,
                    })
                }
                None => Ok(Output {
                    text: text.trim_end().to_string(),
                    json: serde_json::from_str(&text).expect("canonical JSON"),
                }),
            }
        }
        SipCmd::Check { file } => {
            let cert = certificate::deserialize(read_text(file)?.as_bytes())?;
            match certificate::check(&cert) {
                Verdict::Accept => Ok(Output {
                    text: "accept".into(),
                    json: json!({"verdict": "accept"}),
                }),
                Verdict::Reject { path, reason } => {
                    let message = format!("reject at {path}: {reason}");
                    if ctx.json {
                        println!(
                            "{}",
                            json!({"verdict": "reject", "path": path, "reason": reason})
                        );
                    }
                    Err(Failure::Reject(message))
                }
            }
        }
    }
}

fn quotient(ctx: &Ctx, cmd: &QuotientCmd) -> Outcome {
    let g = &ctx.group;
    let bound = ctx.config.max_points();
    let whole = [g.a(), g.b()];
    match cmd {
        QuotientCmd::Order { level, gens } => {
            let words = match &gens.gens {
                Some(path) => ctx.subgroup(Some(path))?.gens().to_vec(),
                None => whole.to_vec(),
            };
            let n = quotient_group(g, &words, *level, bound)?
                .order()
                .to_string();
            Ok(Output {
                text: n.clone(),
                json: json!({"level": level, "order": n}),
            })
        }
        QuotientCmd::Index { level, gens } => {
            let h = ctx.subgroup(gens.gens.as_ref())?;
            let big = quotient_group(g, &whole, *level, bound)?;
            let small = quotient_group(g, h.gens(), *level, bound)?;
            let n = small
                .index_in(&big)
                .expect("subgroup images lie in the group image")
                .to_string();
            Ok(Output {
                text: n.clone(),
                json: json!({"level": level, "index": n}),
            })
        }
    }
}

fn verify(ctx: &Ctx, cmd: &VerifyCmd) -> Outcome {
    let VerifyCmd::Suite {
        name,
        seed,
        samples,
        output,
    } = cmd;
    let seed = seed.or(ctx.config.seed).unwrap_or(0);
    let report = harness::run_suite(name, &ctx.group, *samples, seed).map_err(|e| match e {
        ggslab::Error::UnknownSuite(_) => {
            Failure::Usage(format!("{e}; known suites: {}", harness::SUITES.join(", ")))
        }
        other => other.into(),
    })?;
    let text = report.to_json();
    if let Some(dir) = output.as_ref().or(ctx.config.output_dir.as_ref()) {
        write_file(&dir.join(format!("{name}-{seed}.json")), &text)?;
    }
    if ctx.json {
        print!("{text}");
    } else {
        println!(
            "{name} on {}: {}/{} passed in {:.2?}",
            report.group, report.passed, report.samples, report.duration
        );
        for f in &report.failures {
            println!("  sample {}: {} ({})", f.sample, f.input, f.reason);
        }
    }
    if report.is_success() {
        Ok(Output {
            text: String::new(),
            json: Value::Null,
        })
    } else {
        Err(Failure::Suite(format!(
            "{} of {} samples failed",
            report.failed, report.samples
        )))
    }
}

fn run(cli: Cli) -> Result<(Output, bool), Failure> {
    let config_path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os(config::ENV_VAR).map(PathBuf::from));
    let config = match config_path {
        Some(p) => Config::load(&p).map_err(Failure::Usage)?,
        None => Config::default(),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let spec = cli
        .spec
        .clone()
        .or_else(|| config.group.clone())
        .unwrap_or_else(|| DEFAULT_SPEC.to_string());
    let group: GgsGroup = spec.parse()?;
    let ctx = Ctx {
        group,
        config,
        json: cli.json,
    };
    let out = match &cli.command {
        Command::Group {
            cmd: GroupCmd::Info,
        } => group_info(&ctx),
        Command::Elem { cmd } => elem(&ctx, cmd),
        Command::Sub { cmd } => sub(&ctx, cmd),
        Command::Reduce { cmd } => reduce(&ctx, cmd),
        Command::Sip { cmd } => sip(&ctx, cmd),
        Command::Quotient { cmd } => quotient(&ctx, cmd),
        Command::Verify { cmd } => {
            verify(&ctx, cmd)?;
            return Ok((
                Output {
                    text: String::new(),
                    json: Value::Null,
                },
                false,
            ));
        }
    }?;
    Ok((out, true))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok((out, print)) => {
            if print {
                if json {
                    println!("{}", out.json);
                } else if !out.text.is_empty() {
                    println!("{}", out.text);
                }
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            let message = match &f {
                Failure::Usage(m) => format!("usage error: {m}"),
                Failure::Domain(m) | Failure::Io(m) | Failure::Reject(m) | Failure::Suite(m) => {
                    m.clone()
                }
            };
            eprintln!("ggslab: {message}");
            ExitCode::from(f.code())
        }
    }
}
