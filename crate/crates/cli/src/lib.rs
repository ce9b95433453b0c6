//! Argument parsing and dispatch for the `ssg` binary.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ssg_core::engine::{effective_resistance, resistance_diameter, trace};
use ssg_core::experiments::{
    exp_compat_chain, exp_decomposition, exp_diameter, exp_projection, exp_sg_part, exp_symmetry, fmt_sig,
    ExperimentReport,
};
use ssg_core::functions::FunctionSpec;
use ssg_core::network::{build_ssg, energy, Node, SegmentSample};
use ssg_core::sequence::project;
use ssg_core::topology::{vertex_set, Address, Segment};
use ssg_core::{Error, Sequence};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Subcommand, Debug)]
enum Group {
    /// Networks at a fixed level
    #[command(subcommand)]
    Net(NetCmd),
    /// Scalar quantities of a matching sequence
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Verification experiments; exit code 1 when any row fails
    #[command(subcommand)]
    Exp(ExpCmd),
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Write here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct NetArgs {
    /// Sequence as JSON, e.g. '{"family":"constant","rho":0.25}'
    #[arg(long)]
    seq: String,
    #[arg(long)]
    m: usize,
    /// Pieces per segment
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Subcommand, Debug)]
enum NetCmd {
    /// Edge list
    Build {
        #[command(flatten)]
        net: NetArgs,
    },
    /// Trace onto the vertices of a coarser level
    Trace {
        #[command(flatten)]
        net: NetArgs,
        /// Target level, default m-1 (0 when m = 0)
        #[arg(long)]
        onto: Option<usize>,
    },
    /// Effective resistance between two nodes such as ":1" or "∅:12#1/2"
    Resistance {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    Diameter {
        #[command(flatten)]
        net: NetArgs,
    },
    /// Energy of a function given as JSON
    Energy {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long = "fn")]
        function: String,
    },
    /// Values of a function given as JSON
    Function {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long = "fn")]
        function: String,
    },
}

#[derive(Subcommand, Debug)]
enum SeqCmd {
    /// Per-level scales for levels 1..=m
    Derive {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        m: usize,
    },
    /// Projected sequence, listed explicitly
    Project {
        #[arg(long)]
        seq: String,
        #[arg(long, default_value_t = 30)]
        terms: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct ExpArgs {
    #[arg(long)]
    seq: String,
    /// Override the main tolerance of the experiment
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum ExpCmd {
    Compat {
        #[command(flatten)]
        exp: ExpArgs,
        #[arg(long, default_value_t = 4)]
        mmax: usize,
    },
    Sgpart {
        #[command(flatten)]
        exp: ExpArgs,
        #[arg(long, default_value_t = 6)]
        mmax: usize,
        /// Corner values, comma separated
        #[arg(long, default_value = "1,0,0")]
        boundary: String,
    },
    Decomp {
        #[command(flatten)]
        exp: ExpArgs,
        #[arg(long, default_value_t = 6)]
        m: usize,
    },
    Projection {
        #[command(flatten)]
        exp: ExpArgs,
        #[arg(long, default_value_t = 30)]
        terms: usize,
    },
    Diameter {
        #[command(flatten)]
        exp: ExpArgs,
        #[arg(long, default_value_t = 4)]
        mmax: usize,
    },
    Symmetry {
        #[command(flatten)]
        exp: ExpArgs,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Parser, Debug)]
#[command(name = "ssg", version, about = "Stretched gasket networks and form identities")]
struct Top {
    #[command(flatten)]
    output: Output,
    #[command(subcommand)]
    group: Group,
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn parse_seq(json: &str) -> Result<Sequence, Failure> {
    Sequence::from_json(json).map_err(|e| Failure::Usage(format!("--seq: {e}")))
}

fn parse_node(s: &str) -> Result<Node, Failure> {
    let bad = |e: Error| Failure::Usage(format!("node {s:?}: {e}"));
    if let Some((seg, rest)) = s.split_once('#') {
        let segment: Segment = seg.parse().map_err(bad)?;
        let (k, n) = rest
            .split_once('/')
            .ok_or_else(|| Failure::Usage(format!("node {s:?}: expected w:ij#k/n")))?;
        let parse = |x: &str| {
            x.parse::<usize>()
                .map_err(|e| Failure::Usage(format!("node {s:?}: {e}")))
        };
        return Ok(Node::Sample(SegmentSample {
            segment,
            index: parse(k)?,
            subdiv: parse(n)?,
        }));
    }
    Ok(Node::Vertex(s.parse::<Address>().map_err(bad)?))
}

fn parse_boundary(s: &str) -> Result<[f64; 3], Failure> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Usage(format!("--boundary {s:?}: {e}")))?;
    v.try_into()
        .map_err(|_| Failure::Usage(format!("--boundary {s:?}: need three values")))
}

fn scalar_out(name: &str, value: f64, format: Format, extra: serde_json::Value) -> String {
    match format {
        Format::Csv => format!("{}\n", fmt_sig(value)),
        Format::Json => {
            let mut obj = extra;
            obj[name] = json!(value);
            format!("{}\n", serde_json::to_string_pretty(&obj).expect("json"))
        }
    }
}

fn report_out(rep: &ExperimentReport, format: Format) -> Result<String, Failure> {
    let text = match format {
        Format::Csv => rep.to_csv(),
        Format::Json => rep.to_json() + "\n",
    };
    if rep.passed {
        Ok(text)
    } else {
        Err(Failure::Failed(text))
    }
}

fn net_cmd(cmd: NetCmd, format: Format) -> Result<String, Failure> {
    let build = |a: &NetArgs| -> Result<_, Failure> { Ok(build_ssg(&parse_seq(&a.seq)?, a.m, a.n)?) };
    match cmd {
        NetCmd::Build { net: a } => {
            let net = build(&a)?;
            Ok(match format {
                Format::Csv => net.to_csv(),
                Format::Json => {
                    let edges: Vec<_> = net
                        .edges()
                        .iter()
                        .map(|e| {
                            json!({
                                "u": net.nodes()[e.a].to_string(),
                                "v": net.nodes()[e.b].to_string(),
                                "conductance": e.conductance,
                                "tag": e.tag.to_string(),
                            })
                        })
                        .collect();
                    let nodes: Vec<String> = net.nodes().iter().map(|n| n.to_string()).collect();
                    serde_json::to_string_pretty(&json!({ "nodes": nodes, "edges": edges })).expect("json") + "\n"
                }
            })
        }
        NetCmd::Trace { net: a, onto } => {
            let onto = onto.unwrap_or(a.m.saturating_sub(1));
            if onto > a.m {
                return Err(Failure::Usage(format!("--onto {onto} exceeds --m {}", a.m)));
            }
            let net = build(&a)?;
            let boundary: Vec<Node> = vertex_set(onto)?.into_iter().map(Node::Vertex).collect();
            let t = trace(&net, &boundary)?;
            Ok(match format {
                Format::Csv => t.to_csv(),
                Format::Json => {
                    let names: Vec<String> = t.boundary().iter().map(|n| n.to_string()).collect();
                    let rows: Vec<Vec<f64>> = (0..t.size())
                        .map(|i| (0..t.size()).map(|j| t.entry(i, j)).collect())
                        .collect();
                    serde_json::to_string_pretty(&json!({ "boundary": names, "matrix": rows })).expect("json") + "\n"
                }
            })
        }
        NetCmd::Resistance { net: a, from, to } => {
            let (p, q) = (parse_node(&from)?, parse_node(&to)?);
            let r = effective_resistance(&build(&a)?, &p, &q)?;
            Ok(scalar_out(
                "resistance",
                r,
                format,
                json!({ "from": from, "to": to, "m": a.m, "n": a.n }),
            ))
        }
        NetCmd::Diameter { net: a } => {
            let d = resistance_diameter(&build(&a)?)?;
            Ok(scalar_out("diameter", d, format, json!({ "m": a.m, "n": a.n })))
        }
        NetCmd::Energy { net: a, function } => {
            let f = FunctionSpec::from_json(&function)?.build::<f64>(a.m, a.n)?;
            let e = energy(&build(&a)?, &f)?;
            Ok(scalar_out("energy", e, format, json!({ "m": a.m, "n": a.n })))
        }
        NetCmd::Function { net: a, function } => {
            parse_seq(&a.seq)?;
            let f = FunctionSpec::from_json(&function)?.build::<f64>(a.m, a.n)?;
            Ok(match format {
                Format::Csv => f.to_csv(),
                Format::Json => {
                    let vertices: serde_json::Map<String, serde_json::Value> = f
                        .vertex_values()
                        .iter()
                        .map(|(k, v)| (k.to_string(), json!(v)))
                        .collect();
                    let profiles: serde_json::Map<String, serde_json::Value> =
                        f.profiles().iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
                    serde_json::to_string_pretty(&json!({ "vertices": vertices, "profiles": profiles })).expect("json")
                        + "\n"
                }
            })
        }
    }
}

fn seq_cmd(cmd: SeqCmd, format: Format) -> Result<String, Failure> {
    match cmd {
        SeqCmd::Derive { seq, m } => {
            let seq = parse_seq(&seq)?;
            let mut rows = Vec::with_capacity(m);
            for k in 1..=m {
                let pair = seq.pair(k)?;
                let d = seq.derive(k)?;
                rows.push([k as f64, pair.r, pair.rho, d.delta, d.gamma, d.p, d.eta]);
            }
            Ok(match format {
                Format::Csv => {
                    let mut out = String::from("m,r,rho,delta,gamma,P,eta\n");
                    for r in &rows {
                        let cells: Vec<String> = r.iter().skip(1).map(|&x| fmt_sig(x)).collect();
                        out.push_str(&format!("{},{}\n", r[0], cells.join(",")));
                    }
                    out
                }
                Format::Json => {
                    let list: Vec<_> = rows
                        .iter()
                        .map(|r| {
                            json!({ "m": r[0] as usize, "r": r[1], "rho": r[2], "delta": r[3],
                                    "gamma": r[4], "P": r[5], "eta": r[6] })
                        })
                        .collect();
                    serde_json::to_string_pretty(&list).expect("json") + "\n"
                }
            })
        }
        SeqCmd::Project { seq, terms } => {
            let seq = parse_seq(&seq)?;
            let l = project(&seq, terms)?;
            Ok(match format {
                Format::Csv => {
                    let mut out = String::from("m,rho,sigma\n");
                    for k in 1..=terms {
                        out.push_str(&format!("{k},{},{}\n", fmt_sig(seq.rho(k)?), fmt_sig(l.rho(k)?)));
                    }
                    out
                }
                Format::Json => l.to_json() + "\n",
            })
        }
    }
}

fn exp_cmd(cmd: ExpCmd, format: Format) -> Result<String, Failure> {
    let rep = match cmd {
        ExpCmd::Compat { exp, mmax } => exp_compat_chain(&parse_seq(&exp.seq)?, mmax, exp.tol)?,
        ExpCmd::Sgpart { exp, mmax, boundary } => {
            exp_sg_part(&parse_seq(&exp.seq)?, parse_boundary(&boundary)?, mmax, exp.tol)?
        }
        ExpCmd::Decomp { exp, m } => exp_decomposition(&parse_seq(&exp.seq)?, m, exp.tol)?,
        ExpCmd::Projection { exp, terms } => exp_projection(&parse_seq(&exp.seq)?, terms, exp.tol)?,
        ExpCmd::Diameter { exp, mmax } => exp_diameter(&parse_seq(&exp.seq)?, mmax, exp.tol)?,
        ExpCmd::Symmetry { exp, m, seed } => exp_symmetry(&parse_seq(&exp.seq)?, m, seed, exp.tol)?,
    };
    report_out(&rep, format)
}

fn emit(text: &str, out: &Option<PathBuf>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> bool {
    match out {
        Some(path) => match fs::write(path, text) {
            Ok(()) => true,
            Err(e) => {
                let _ = writeln!(stderr, "error: --out {}: {e}", path.display());
                false
            }
        },
        None => stdout.write_all(text.as_bytes()).is_ok(),
    }
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let top = match Top::try_parse_from(argv) {
        Ok(t) => t,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = match top.group {
        Group::Net(c) => net_cmd(c, top.output.format),
        Group::Seq(c) => seq_cmd(c, top.output.format),
        Group::Exp(c) => exp_cmd(c, top.output.format),
    };
    match result {
        Ok(text) => {
            if emit(&text, &top.output.out, stdout, stderr) {
                EXIT_OK
            } else {
                EXIT_USAGE
            }
        }
        Err(Failure::Failed(text)) => {
            let _ = emit(&text, &top.output.out, stdout, stderr);
            let _ = writeln!(stderr, "experiment failed");
            EXIT_FAILED
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}

pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
