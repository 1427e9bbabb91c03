use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dgl_core::kernel::{check_certificate, AxiomBase, BackendRegistry, CheckResult, ProofCertificate};
use dgl_core::oracle::{eval_formula, Budget, State, TruthValue3};
use dgl_core::statics::{bound_vars, signature, StaticSemantics, SymbolSet, VarSet};
use dgl_core::syntax::{parse, parse_formula, parse_game, Category, Expression};
use dgl_core::usubst::{parse_substitution, ClashError, UniformSubstitution};

#[derive(Parser)]
#[command(name = "dgl", version, about = "Uniform-substitution proof checker for differential game logic")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Cat {
    Term,
    Formula,
    Game,
}

impl From<Cat> for Category {
    fn from(c: Cat) -> Category {
        match c {
            Cat::Term => Category::Term,
            Cat::Formula => Category::Formula,
            Cat::Game => Category::Game,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Ra {
    Ground,
    Smt,
    Assume,
}

impl Ra {
    fn name(self) -> &'static str {
        match self {
            Ra::Ground => "ground",
            Ra::Smt => "smt",
            Ra::Assume => "assume",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse an expression and print it back.
    Parse {
        #[arg(short = 'c', long = "category", value_enum, default_value_t = Cat::Formula)]
        category: Cat,
        expr: String,
    },
    /// Free variables.
    Fv {
        #[arg(short = 'c', long = "category", value_enum, default_value_t = Cat::Formula)]
        category: Cat,
        expr: String,
    },
    /// Bound variables of a game.
    Bv { game: String },
    /// Function, predicate, predicational and game symbols.
    Sig {
        #[arg(short = 'c', long = "category", value_enum, default_value_t = Cat::Formula)]
        category: Cat,
        expr: String,
    },
    /// Apply a uniform substitution.
    Subst {
        /// Substitution file, or inline `{...}`.
        #[arg(short = 's', long = "subst")]
        subst: String,
        #[arg(short = 'c', long = "category", value_enum, default_value_t = Cat::Formula)]
        category: Cat,
        expr: String,
    },
    /// Check a proof certificate.
    Check {
        file: String,
        #[arg(long, value_enum, default_value_t = Ra::Ground)]
        ra: Ra,
        /// Required for `--ra assume`.
        #[arg(long)]
        allow_assume: bool,
    },
    /// Evaluate a formula in a state.
    Eval {
        /// Interpretation file in substitution syntax.
        #[arg(short = 'I', long = "interp")]
        interp: Option<String>,
        /// State file of `var = rational` lines.
        #[arg(short = 'w', long = "state")]
        state: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        formula: String,
    },
    /// List the axioms and rules.
    Axioms,
}

/// A failed command: exit code and payload.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    extra: Value,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, kind: "usage", message: message.into(), extra: json!({}) }
}

fn parse_failure(message: impl ToString) -> Failure {
    Failure { code: 2, kind: "parse", message: message.to_string(), extra: json!({}) }
}

fn clash_failure(c: &ClashError) -> Failure {
    Failure {
        code: 1,
        kind: "clash",
        message: c.to_string(),
        extra: json!({
            "head": c.head,
            "variable": c.variable.as_ref().map(|v| v.to_string()),
            "taboo": varset_json(&c.taboo),
            "position": c.position,
        }),
    }
}

/// Text and JSON renderings of one result.
struct Output {
    code: u8,
    text: String,
    json: Value,
}

fn ok(text: impl Into<String>, json: Value) -> Output {
    Output { code: 0, text: text.into(), json }
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))
}

fn expression(text: &str, cat: Cat) -> Result<Expression, Failure> {
    parse(text, cat.into()).map_err(parse_failure)
}

fn varset_json(v: &VarSet) -> Value {
    match v.finite() {
        Some(vs) => json!({"all": false, "vars": vs.iter().map(|x| x.to_string()).collect::<Vec<_>>()}),
        None => json!({"all": true, "vars": []}),
    }
}

fn symbols_json(s: &SymbolSet) -> Value {
    let arities = |m: &std::collections::BTreeMap<String, usize>| {
        m.iter().map(|(n, a)| json!({"name": n, "arity": a})).collect::<Vec<_>>()
    };
    json!({
        "functions": arities(&s.functions),
        "predicates": arities(&s.predicates),
        "predicationals": s.predicationals.iter().collect::<Vec<_>>(),
        "games": s.games.iter().collect::<Vec<_>>(),
    })
}

fn substitution(source: &str, hint: &SymbolSet) -> Result<UniformSubstitution, Failure> {
    let text = if source.trim_start().starts_with('{') { source.to_string() } else { read(source)? };
    parse_substitution(&text, Some(hint)).map_err(parse_failure)
}

fn check(file: &str, ra: Ra, allow_assume: bool) -> Result<Output, Failure> {
    if matches!(ra, Ra::Assume) && !allow_assume {
        return Err(usage("--ra assume takes arithmetic on trust; pass --allow-assume to confirm"));
    }
    let cert = ProofCertificate::parse(&read(file)?).map_err(parse_failure)?;
    let registry = BackendRegistry::standard();
    let backend = registry.get(ra.name()).ok_or_else(|| usage(format!("no backend {}", ra.name())))?;
    Ok(match check_certificate(&cert, backend) {
        CheckResult::Verified => ok(
            format!("Verified: {}", cert.claim),
            json!({"result": "verified", "claim": cert.claim.to_string(), "obligations": []}),
        ),
        CheckResult::VerifiedModuloArithmetic(obligations) => {
            let mut text = format!("Verified modulo arithmetic: {}\n{} obligation(s):", cert.claim, obligations.len());
            for o in &obligations {
                text.push_str(&format!("\n  {o}"));
            }
            Output {
                code: 3,
                text,
                json: json!({
                    "result": "verified-modulo-arithmetic",
                    "claim": cert.claim.to_string(),
                    "obligations": obligations.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
                }),
            }
        }
        CheckResult::Rejected { label, code, message } => Output {
            code: 1,
            text: format!("Rejected at step {label} ({code}): {message}"),
            json: json!({"result": "rejected", "label": label, "reason": code.as_str(), "message": message}),
        },
    })
}

fn eval(interp: Option<&str>, state: Option<&str>, depth: Option<usize>, formula: &str) -> Result<Output, Failure> {
    let f = parse_formula(formula).map_err(parse_failure)?;
    let interp = match interp {
        Some(path) => parse_substitution(&read(path)?, None).map_err(parse_failure)?,
        None => UniformSubstitution::new(),
    };
    let w = match state {
        Some(path) => State::parse(&read(path)?).map_err(parse_failure)?,
        None => State::new(),
    };
    let budget = depth.map_or_else(Budget::default, Budget::with_depth);
    let value = eval_formula(&interp, &w, &f, &budget)
        .map_err(|e| Failure { code: 2, kind: "eval", message: e.to_string(), extra: json!({}) })?;
    let name = match value {
        TruthValue3::True => "True",
        TruthValue3::False => "False",
        TruthValue3::Unknown => "Unknown",
    };
    Ok(ok(name, json!({"value": name})))
}

fn axioms() -> Output {
    let mut text = String::new();
    for (name, formula) in AxiomBase::axiom_texts() {
        text.push_str(&format!("{name}: {formula}\n"));
    }
    for (name, premises, conclusion) in AxiomBase::rule_texts() {
        text.push_str(&format!("{name}: {} ==> {conclusion}\n", premises.join(" ;; ")));
    }
    let json = json!({
        "axioms": AxiomBase::axiom_texts().map(|(n, f)| json!({"name": n, "formula": f})).collect::<Vec<_>>(),
        "rules": AxiomBase::rule_texts()
            .map(|(n, p, c)| json!({"name": n, "premises": p, "conclusion": c}))
            .collect::<Vec<_>>(),
    });
    ok(text.trim_end(), json)
}

fn run(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Parse { category, expr } => {
            let e = expression(&expr, category)?;
            Ok(ok(e.to_string(), json!({"category": e.category().to_string(), "printed": e.to_string()})))
        }
        Command::Fv { category, expr } => {
            let fv = expression(&expr, category)?.free_vars();
            Ok(ok(fv.to_string(), json!({"free_vars": varset_json(&fv)})))
        }
        Command::Bv { game } => {
            let bv = bound_vars(&parse_game(&game).map_err(parse_failure)?);
            Ok(ok(bv.to_string(), json!({"bound_vars": varset_json(&bv)})))
        }
        Command::Sig { category, expr } => {
            let sig = signature(&expression(&expr, category)?);
            Ok(ok(sig.to_string(), json!({"signature": symbols_json(&sig)})))
        }
        Command::Subst { subst, category, expr } => {
            let e = expression(&expr, category)?;
            let sigma = substitution(&subst, &signature(&e))?;
            let result = sigma.apply(&e).map_err(|c| clash_failure(&c))?;
            Ok(ok(result.to_string(), json!({"result": result.to_string()})))
        }
        Command::Check { file, ra, allow_assume } => check(&file, ra, allow_assume),
        Command::Eval { interp, state, depth, formula } => eval(interp.as_deref(), state.as_deref(), depth, &formula),
        Command::Axioms => Ok(axioms()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli.command) {
        Ok(out) => {
            match format {
                Format::Text => println!("{}", out.text),
                Format::Json => println!("{}", out.json),
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            match format {
                Format::Text => eprintln!("error: {}", f.message),
                Format::Json => {
                    let mut payload = json!({"error": f.kind, "message": f.message});
                    if let (Value::Object(p), Value::Object(extra)) = (&mut payload, f.extra) {
                        p.extend(extra);
                    }
                    println!("{payload}");
                }
            }
            ExitCode::from(f.code)
        }
    }
}
