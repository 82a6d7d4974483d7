//! Command-line front end. Exit codes: 0 pass, 1 semantic failure (invalid
//! graph or failed check), 2 usage or I/O error, 3 inconclusive (budget).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::format::{parse_graph, to_json, to_text};
use crate::gaussian::{generate_model, verify_statements, DEFAULT_TOL};
use crate::graph::RegressionGraph;
use crate::graphoid::{closure, derive, Budget, Derivation, RuleSet};
use crate::markov::{format_report, pairwise_statements, statement_report, PairwiseProperty, PropertyRegistry};
use crate::nodeset::{parse_node_list, NodeId, NodeSet};
use crate::ordering::{pair_sets, valid_ordering, valid_ordering_with, ComponentOrdering, TieBreak};
use crate::random::{random_graph, EdgeDensities};
use crate::saturate::saturate;
use crate::separation::{format_path, m_separated, verify_soundness};
use crate::statement::{format_statements, parse_statements, IndependenceStatement};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "regmark", version, about = "Regression graph Markov property toolkit")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    pub format: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Graph file, or `-` for stdin.
    pub graph: String,

    /// Component sequence overriding the default ordering, e.g. `1,2;5;3,4`.
    #[arg(long)]
    pub ordering: Option<String>,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Statement limit for closures (default from REGMARK_BUDGET).
    #[arg(long)]
    pub max_statements: Option<usize>,

    /// Iteration limit.
    #[arg(long)]
    pub max_iterations: Option<usize>,

    /// Largest side kept in derived statements.
    #[arg(long)]
    pub max_side: Option<usize>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        let mut b = Budget::from_env();
        if let Some(n) = self.max_statements {
            b.max_statements = n;
        }
        if let Some(n) = self.max_iterations {
            b.max_iterations = n;
        }
        b.max_side = self.max_side;
        b
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structural constraints of a regression graph.
    Validate {
        /// Graph file, or `-` for stdin.
        graph: String,
    },
    /// List the statements of one pairwise Markov property.
    Pairwise {
        #[command(flatten)]
        input: GraphArgs,
        /// p1, p2, p3, p4 or p4j.
        #[arg(long, default_value = "p1")]
        property: String,
    },
    /// Decide whether A and B are separated given C.
    Separate {
        /// Graph file, or `-` for stdin.
        graph: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "")]
        c: String,
    },
    /// Run equivalence, soundness or Gaussian checks.
    Verify {
        #[command(flatten)]
        input: GraphArgs,
        /// Compare the closures of the four pairwise properties.
        #[arg(long)]
        theorem1: bool,
        /// Check every pairwise statement by separation.
        #[arg(long)]
        soundness: bool,
        /// Check every pairwise statement in a generated Gaussian model.
        #[arg(long)]
        gaussian: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print a valid ordering of the components.
    Order {
        /// Graph file, or `-` for stdin.
        graph: String,
        /// Prefer the component with the largest node among ready ones.
        #[arg(long)]
        largest: bool,
    },
    /// Print par, ant and pst of a node pair.
    Sets {
        #[command(flatten)]
        input: GraphArgs,
        /// Two node ids, e.g. `2,4`.
        #[arg(long)]
        pair: String,
    },
    /// Tabulate the conditioning sets of every uncoupled pair.
    Report {
        #[command(flatten)]
        input: GraphArgs,
    },
    /// Complete the graph without changing its ordering.
    Saturate {
        #[command(flatten)]
        input: GraphArgs,
    },
    /// Generate a random valid regression graph.
    Random {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge density for all three edge types.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
    },
    /// Search for a proof trace of a statement.
    Derive {
        /// Goal statement `A | B | C`.
        #[arg(long)]
        goal: String,
        /// Premise file, one statement per line, or `-` for stdin.
        #[arg(long)]
        premises: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

/// What a command produced.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn new(code: i32, stdout: String) -> Self {
        Output { code, stdout, stderr: String::new() }
    }

    fn error(code: i32, message: impl std::fmt::Display) -> Self {
        Output { code, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

type Outcome = std::result::Result<Output, Output>;

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PartitionConflict { .. } | Error::ComponentCycle(_) | Error::Numerical(_) => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

fn lift(e: Error) -> Output {
    Output::error(exit_code(&e), e)
}

fn usage(message: impl std::fmt::Display) -> Output {
    Output::error(EXIT_USAGE, message)
}

fn to_json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code, stdout: String::new(), stderr: text }
            } else {
                Output::new(code, text)
            };
        }
    };
    let mut ctx = Context { format: cli.format, stdin, stdin_used: false };
    match ctx.dispatch(cli.command) {
        Ok(o) | Err(o) => o,
    }
}

struct Context<'a> {
    format: OutputFormat,
    stdin: &'a mut dyn Read,
    stdin_used: bool,
}

impl Context<'_> {
    fn json(&self) -> bool {
        self.format == OutputFormat::Json
    }

    fn read(&mut self, path: &str) -> std::result::Result<String, Output> {
        if path == "-" {
            if self.stdin_used {
                return Err(usage("stdin can be read only once"));
            }
            self.stdin_used = true;
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| usage(format!("stdin: {e}")))?;
            Ok(s)
        } else {
            std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))
        }
    }

    fn graph(&mut self, path: &str) -> std::result::Result<RegressionGraph, Output> {
        let text = self.read(path)?;
        parse_graph(&text).map_err(|e| usage(format!("{path}: {e}")))
    }

    /// A graph that passes validation, or exit 1 with the violations.
    fn valid_graph(&mut self, path: &str) -> std::result::Result<RegressionGraph, Output> {
        let g = self.graph(path)?;
        let violations = g.validate();
        if violations.is_empty() {
            return Ok(g);
        }
        let mut err = String::from("error: not a valid regression graph\n");
        for v in &violations {
            let _ = writeln!(err, "  {v}");
        }
        Err(Output { code: EXIT_FAIL, stdout: String::new(), stderr: err })
    }

    fn graph_and_ordering(
        &mut self,
        input: &GraphArgs,
    ) -> std::result::Result<(RegressionGraph, ComponentOrdering), Output> {
        let g = self.valid_graph(&input.graph)?;
        let ord = match &input.ordering {
            Some(spec) => ComponentOrdering::new(&g, parse_ordering(spec).map_err(usage)?).map_err(lift)?,
            None => valid_ordering(&g).map_err(lift)?,
        };
        Ok((g, ord))
    }

    fn dispatch(&mut self, command: Command) -> Outcome {
        match command {
            Command::Validate { graph } => self.validate(&graph),
            Command::Pairwise { input, property } => self.pairwise(&input, &property),
            Command::Separate { graph, a, b, c } => self.separate(&graph, &a, &b, &c),
            Command::Verify { input, theorem1, soundness, gaussian, seed, tol, budget } => {
                if !(theorem1 || soundness || gaussian) {
                    return Err(usage("verify needs --theorem1, --soundness or --gaussian"));
                }
                if tol.is_nan() || tol <= 0.0 {
                    return Err(usage("--tol must be positive"));
                }
                self.verify(&input, theorem1, soundness, gaussian, seed, tol, budget.budget())
            }
            Command::Order { graph, largest } => self.order(&graph, largest),
            Command::Sets { input, pair } => self.sets(&input, &pair),
            Command::Report { input } => self.report(&input),
            Command::Saturate { input } => self.saturate(&input),
            Command::Random { nodes, seed, density } => self.random(nodes, seed, density),
            Command::Derive { goal, premises, budget } => self.derive(&goal, &premises, budget.budget()),
        }
    }

    fn validate(&mut self, path: &str) -> Outcome {
        let g = self.graph(path)?;
        let violations = g.validate();
        let code = if violations.is_empty() { EXIT_PASS } else { EXIT_FAIL };
        let out = if self.json() {
            to_json_line(&json!({ "valid": violations.is_empty(), "violations": violations }))
        } else if violations.is_empty() {
            "valid\n".to_string()
        } else {
            violations.iter().map(|v| format!("{v}\n")).collect()
        };
        Ok(Output::new(code, out))
    }

    fn pairwise(&mut self, input: &GraphArgs, property: &str) -> Outcome {
        let registry = PropertyRegistry::with_builtin();
        let strategy = registry.get(property).map_err(lift)?;
        let (g, ord) = self.graph_and_ordering(input)?;
        let stmts = pairwise_statements(&g, &ord, strategy).map_err(lift)?;
        let out = if self.json() { to_json_line(&stmts) } else { format_statements(&stmts) };
        Ok(Output::new(EXIT_PASS, out))
    }

    fn separate(&mut self, path: &str, a: &str, b: &str, c: &str) -> Outcome {
        let sets = |s: &str| parse_node_list(s).map_err(usage);
        let (a, b, c) = (sets(a)?, sets(b)?, sets(c)?);
        let g = self.graph(path)?;
        let r = m_separated(&g, a, b, c).map_err(lift)?;
        let out = if self.json() {
            to_json_line(&r)
        } else if r.separated {
            "separated\n".to_string()
        } else {
            format!("connected\nwitness: {}\n", format_path(&g, r.witness.as_deref().unwrap_or_default()))
        };
        Ok(Output::new(EXIT_PASS, out))
    }

    #[allow(clippy::too_many_arguments)]
    fn verify(
        &mut self,
        input: &GraphArgs,
        theorem1: bool,
        soundness: bool,
        gaussian: bool,
        seed: u64,
        tol: f64,
        budget: Budget,
    ) -> Outcome {
        let (g, ord) = self.graph_and_ordering(input)?;
        let mut text = String::new();
        let mut doc = serde_json::Map::new();
        let mut code = EXIT_PASS;
        // a failure outranks an inconclusive run
        let worsen = |c: i32, code: &mut i32| {
            if c == EXIT_FAIL || (*code == EXIT_PASS && c == EXIT_INCONCLUSIVE) {
                *code = c;
            }
        };

        if theorem1 {
            let orderings = match &input.ordering {
                Some(_) => vec![ord.clone()],
                None => {
                    let mut v = vec![ord.clone()];
                    let other = valid_ordering_with(&g, TieBreak::Largest).map_err(lift)?;
                    if other.components() != ord.components() || other.node_order() != ord.node_order() {
                        v.push(other);
                    }
                    v
                }
            };
            let mut runs = Vec::new();
            for o in &orderings {
                let mut sizes = Vec::new();
                let mut sets = Vec::new();
                let mut saturated = true;
                for p in PairwiseProperty::ALL
                    .iter()
                    .filter(|p| !matches!(p, PairwiseProperty::P4ParentsOfLower { use_par_j: true }))
                {
                    let stmts = pairwise_statements(&g, o, p.strategy()).map_err(lift)?;
                    let c = closure(&stmts, g.nodes(), RuleSet::ALL, budget).map_err(lift)?;
                    saturated &= c.saturated;
                    sizes.push((p.name(), stmts.len(), c.statements.len()));
                    sets.push(c.statements);
                }
                let equal = sets.windows(2).all(|w| w[0] == w[1]);
                let status = if !saturated {
                    EXIT_INCONCLUSIVE
                } else if equal {
                    EXIT_PASS
                } else {
                    EXIT_FAIL
                };
                worsen(status, &mut code);
                let _ = writeln!(text, "ordering {}", format_ordering(o));
                for (name, premises, size) in &sizes {
                    let _ = writeln!(text, "  {name}: {premises} premises, closure {size}");
                }
                let verdict = match status {
                    EXIT_PASS => "closures equal",
                    EXIT_FAIL => "closures differ",
                    _ => "inconclusive: budget exhausted",
                };
                let _ = writeln!(text, "  {verdict}");
                runs.push(json!({
                    "ordering": o.to_sequence(),
                    "closures": sizes.iter().map(|(n, p, s)| json!({"property": n, "premises": p, "size": s})).collect::<Vec<_>>(),
                    "equal": equal,
                    "saturated": saturated,
                }));
            }
            doc.insert("theorem1".into(), json!(runs));
        }

        if soundness {
            let registry = PropertyRegistry::with_builtin();
            let mut reports = Vec::new();
            for p in registry.iter() {
                let r = verify_soundness(&g, &ord, p).map_err(lift)?;
                if !r.passed() {
                    worsen(EXIT_FAIL, &mut code);
                }
                let _ = writeln!(text, "{}: {} statements, {} failures", r.property, r.total, r.failures.len());
                for f in &r.failures {
                    let _ = writeln!(text, "  {} | {} | {}  via {}", f.a, f.b, f.c, format_path(&g, &f.witness));
                }
                reports.push(r);
            }
            doc.insert("soundness".into(), json!(reports));
        }

        if gaussian {
            let model = generate_model(&g, &ord, seed).map_err(lift)?;
            let registry = PropertyRegistry::with_builtin();
            let mut reports = Vec::new();
            for p in registry.iter() {
                let stmts = pairwise_statements(&g, &ord, p).map_err(lift)?;
                let r = verify_statements(&model, &stmts, tol).map_err(lift)?;
                if !r.passed() {
                    worsen(EXIT_FAIL, &mut code);
                }
                let worst = r.checks.iter().map(|c| c.max_abs).fold(0.0, f64::max);
                let _ = writeln!(text, "{}: {}/{} hold (largest {:.3e})", p.name(), r.held, r.total, worst);
                for f in r.failures() {
                    let _ = writeln!(text, "  {}  max_abs {:.3e}", f.statement, f.max_abs);
                }
                reports.push(json!({"property": p.name(), "report": r}));
            }
            doc.insert("gaussian".into(), json!({"seed": seed, "tol": tol, "properties": reports}));
        }

        let out = if self.json() { to_json_line(&doc) } else { text };
        Ok(Output::new(code, out))
    }

    fn order(&mut self, path: &str, largest: bool) -> Outcome {
        let g = self.valid_graph(path)?;
        let tie = if largest { TieBreak::Largest } else { TieBreak::Smallest };
        let ord = valid_ordering_with(&g, tie).map_err(lift)?;
        let out = if self.json() {
            to_json_line(&ord)
        } else {
            let context = g.resolve_partition().map_err(lift)?.context;
            ord.to_sequence()
                .iter()
                .map(|c| {
                    let ids: Vec<String> = c.iter().map(NodeId::to_string).collect();
                    let tag = if c.iter().all(|&n| context.contains(n)) { "  context" } else { "" };
                    format!("{}{tag}\n", ids.join(","))
                })
                .collect()
        };
        Ok(Output::new(EXIT_PASS, out))
    }

    fn sets(&mut self, input: &GraphArgs, pair: &str) -> Outcome {
        let ids = parse_pair(pair).map_err(usage)?;
        let (g, ord) = self.graph_and_ordering(input)?;
        let (i, j) = ids;
        let sets = pair_sets(&g, &ord, i, j).map_err(lift)?;
        let lower = if ord.precedes(i, j) { i } else { j };
        let par_lower = g.parents_of(lower);
        let out = if self.json() {
            to_json_line(&json!({
                "pair": [i, j], "par": sets.par, "ant": sets.ant, "pst": sets.pst,
                "lower": lower, "par_lower": par_lower,
            }))
        } else {
            let show = |s: NodeSet| if s.is_empty() { String::new() } else { s.to_string() };
            format!(
                "par={{{}}} ant={{{}}} pst={{{}}}\npar({lower})={{{}}}\n",
                show(sets.par),
                show(sets.ant),
                show(sets.pst),
                show(par_lower)
            )
        };
        Ok(Output::new(EXIT_PASS, out))
    }

    fn report(&mut self, input: &GraphArgs) -> Outcome {
        let (g, ord) = self.graph_and_ordering(input)?;
        let rows = statement_report(&g, &ord).map_err(lift)?;
        let out = if self.json() { to_json_line(&rows) } else { format_report(&rows) };
        Ok(Output::new(EXIT_PASS, out))
    }

    fn emit_graph(&self, g: &RegressionGraph) -> String {
        if self.json() {
            let mut s = to_json(g);
            s.push('\n');
            s
        } else {
            to_text(g)
        }
    }

    fn saturate(&mut self, input: &GraphArgs) -> Outcome {
        let (g, ord) = self.graph_and_ordering(input)?;
        let sat = saturate(&g, &ord).map_err(lift)?;
        Ok(Output::new(EXIT_PASS, self.emit_graph(&sat)))
    }

    fn random(&mut self, nodes: usize, seed: u64, density: f64) -> Outcome {
        if !(1..=64).contains(&nodes) {
            return Err(usage("--nodes must be in 1..=64"));
        }
        if !(0.0..=1.0).contains(&density) {
            return Err(usage("--density must be in [0, 1]"));
        }
        let g = random_graph(nodes, seed, EdgeDensities::uniform(density));
        Ok(Output::new(EXIT_PASS, self.emit_graph(&g)))
    }

    fn derive(&mut self, goal: &str, premises: &str, budget: Budget) -> Outcome {
        let goal: IndependenceStatement = goal.parse().map_err(|e| usage(format!("--goal: {e}")))?;
        let text = self.read(premises)?;
        let premises = parse_statements(&text).map_err(|e| usage(format!("{premises}: {e}")))?;
        match derive(goal, &premises, RuleSet::ALL, budget) {
            Derivation::Found(trace) => {
                let out = if self.json() { to_json_line(&trace) } else { trace.to_text() };
                Ok(Output::new(EXIT_PASS, out))
            }
            Derivation::NotDerivable => {
                let out =
                    if self.json() { to_json_line(&json!({"derivable": false})) } else { "not derivable\n".into() };
                Ok(Output::new(EXIT_FAIL, out))
            }
            Derivation::Inconclusive => {
                let out =
                    if self.json() { to_json_line(&json!({"inconclusive": true})) } else { "inconclusive\n".into() };
                Ok(Output::new(EXIT_INCONCLUSIVE, out))
            }
        }
    }
}

/// `1,2;5;3,4`: components separated by `;`, nodes by `,`.
pub fn parse_ordering(spec: &str) -> std::result::Result<Vec<Vec<NodeId>>, String> {
    spec.split(';')
        .map(|block| {
            block
                .split(',')
                .map(|t| {
                    let t = t.trim();
                    t.parse::<u32>()
                        .ok()
                        .and_then(NodeId::new)
                        .ok_or_else(|| format!("invalid node id `{t}` in ordering"))
                })
                .collect()
        })
        .collect()
}

fn format_ordering(o: &ComponentOrdering) -> String {
    o.to_sequence()
        .iter()
        .map(|c| c.iter().map(NodeId::to_string).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_pair(s: &str) -> std::result::Result<(NodeId, NodeId), String> {
    let v = parse_node_list(s)?.to_vec();
    match v.as_slice() {
        [i, j] => Ok((*i, *j)),
        _ => Err(format!("--pair needs two distinct nodes, found `{s}`")),
    }
}
