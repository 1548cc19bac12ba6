use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use skein_core::annulus::{resolve, state_sum, AnnulusDiagram, AnnulusError};
use skein_core::heegaard::{preset, GluingMatrix, HeegaardError, Side, SplittingSpec};
use skein_core::hochschild::{
    boundary, specialized_hh0, torsion_verdict, HochschildChain, HochschildError, LiftMode, Verdict, VerdictOptions,
};
use skein_core::laurent::{LaurentError, LaurentPoly};
use skein_core::polyring::{tor1_from_setup, tor1_setup, MultiPoly, PolyError};
use skein_core::surface::{parse_element, torus_relation, trace_poly, TorusCurve};

#[derive(Parser)]
#[command(name = "skein", version, about = "Skein modules of genus-one Heegaard splittings")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lift {
    Library,
    Solver,
}

#[derive(Args)]
struct Splitting {
    /// Gluing matrix of H1 as "p,q;r,s".
    #[arg(long, conflicts_with = "manifold", allow_hyphen_values = true)]
    gluing: Option<String>,
    /// Preset: lens:p,q, s1xs2, s3 or identity_double.
    #[arg(long)]
    manifold: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve an annulus diagram file to a polynomial in the core.
    Resolve {
        diagram: PathBuf,
        /// Also evaluate the state sum and compare.
        #[arg(long)]
        check: bool,
    },
    /// Trace polynomial of a torus curve.
    Trace {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
    },
    /// Handlebody ideals of both sides.
    Ideals {
        #[command(flatten)]
        split: Splitting,
    },
    /// (J∩K)/(JK + relation) at t = -1.
    Tor1 {
        #[command(flatten)]
        split: Splitting,
        #[arg(long, default_value_t = 8)]
        degree_bound: u32,
    },
    /// Boundary and valuation of the chain φ ⊗ cycle ⊗ φ.
    Delta1 {
        #[command(flatten)]
        split: Splitting,
        #[arg(long, allow_hyphen_values = true)]
        cycle: String,
    },
    /// Torsion verdict.
    Verdict {
        #[command(flatten)]
        split: Splitting,
        #[arg(long, default_value_t = 8)]
        degree_bound: u32,
        #[arg(long, value_enum, default_value_t = Lift::Library)]
        lift: Lift,
    },
    /// Specialized HH0, the quotient by relation + J + K.
    Hh0 {
        #[command(flatten)]
        split: Splitting,
        #[arg(long, default_value_t = 10)]
        degree_bound: u32,
    },
}

#[derive(Debug)]
struct CliError {
    code: &'static str,
    message: String,
}

macro_rules! from_module_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                let code = e.code();
                let message = e.to_string();
                let message = message.strip_prefix(&format!("{code}: ")).unwrap_or(&message).to_string();
                CliError { code, message }
            }
        }
    )*};
}
from_module_error!(AnnulusError, HeegaardError, HochschildError, PolyError, LaurentError);

fn usage(message: impl Into<String>) -> CliError {
    CliError { code: "USAGE", message: message.into() }
}

struct Output {
    json: Value,
    text: String,
    exit: u8,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { json, text, exit: 0 }
    }
}

fn splitting(s: &Splitting) -> Result<SplittingSpec, CliError> {
    match (&s.gluing, &s.manifold) {
        (Some(g), None) => {
            let g: GluingMatrix = g.parse()?;
            Ok(SplittingSpec::new(format!("gluing {g}"), g))
        }
        (None, Some(m)) => Ok(preset(m)?),
        _ => Err(usage("exactly one of --gluing or --manifold is required")),
    }
}

fn parse_curve(src: &str) -> Result<TorusCurve, CliError> {
    let e = parse_element(src)?;
    let mut terms = e.terms();
    match (terms.next(), terms.next()) {
        (Some((w, c)), None) if w.len() == 1 && *c == LaurentPoly::one() => Ok(w.curves()[0]),
        _ => Err(usage(format!("{src:?} is not a single curve"))),
    }
}

fn strings(ps: &[MultiPoly]) -> Vec<String> {
    ps.iter().map(|p| p.to_string()).collect()
}

fn run(cmd: &Command) -> Result<Output, CliError> {
    match cmd {
        Command::Resolve { diagram, check } => {
            let src = std::fs::read_to_string(diagram)
                .map_err(|e| CliError { code: "IO_ERROR", message: format!("{}: {e}", diagram.display()) })?;
            let d = AnnulusDiagram::from_json(&src)?;
            let value = resolve(&d)?;
            let mut json = json!({
                "diagram": diagram.display().to_string(),
                "crossings": d.num_crossings(),
                "value": value.to_string(),
            });
            let mut text = format!("{value}\n");
            if *check {
                let oracle = state_sum(&d)?;
                json["state_sum_agrees"] = json!(oracle == value);
                text.push_str(&format!("state sum agrees: {}\n", oracle == value));
                if oracle != value {
                    return Err(CliError {
                        code: "ORACLE_MISMATCH",
                        message: format!("resolver gave {value}, state sum gave {oracle}"),
                    });
                }
            }
            Ok(Output::ok(json, text))
        }
        Command::Trace { curve } => {
            let c = parse_curve(curve)?;
            let t = trace_poly(c).display_sign_factored();
            Ok(Output::ok(json!({"curve": c.to_string(), "trace": t}), format!("{t}\n")))
        }
        Command::Ideals { split } => {
            let s = splitting(split)?;
            let mut json = json!({"manifold": s.name, "gluing": s.gluing, "relation": torus_relation().to_string()});
            let mut text = format!("relation: {}\n", torus_relation());
            for (side, key) in [(Side::H0, "H0"), (Side::H1, "H1")] {
                let ideal = s.ideal(side);
                let gens = strings(ideal.generators());
                let gb = strings(ideal.groebner_basis());
                text.push_str(&format!(
                    "{key}: kills {}\n  generators: {}\n  groebner basis: {}\n",
                    s.killed(side),
                    gens.join(", "),
                    gb.join(", ")
                ));
                json[key] = json!({"killed": s.killed(side).to_string(), "generators": gens, "groebner_basis": gb});
            }
            let mut notes = Vec::new();
            if s.ideal_unverified() {
                notes.push("H1 generators are not verified to generate the full kernel for this killed curve");
                text.push_str(&format!("note: {}\n", notes[0]));
            }
            json["notes"] = json!(notes);
            Ok(Output::ok(json, text))
        }
        Command::Tor1 { split, degree_bound } => {
            let s = splitting(split)?;
            let setup = tor1_setup(&s.ideal(Side::H0), &s.ideal(Side::H1), &torus_relation())?;
            let r = tor1_from_setup(&setup, *degree_bound)?;
            let json = json!({
                "manifold": s.name,
                "gluing": s.gluing,
                "degree_bound": degree_bound,
                "dimension": r.dimension(),
                "basis": strings(&r.vector_space_basis),
                "module_generators": strings(&r.generators),
                "relations": strings(&r.relations),
            });
            let text = format!(
                "dimension: {}\nbasis: {}\nmodule generators: {}\nrelations: {}\n",
                r.dimension(),
                strings(&r.vector_space_basis).join(", "),
                strings(&r.generators).join(", "),
                strings(&r.relations).join(", ")
            );
            Ok(Output::ok(json, text))
        }
        Command::Delta1 { split, cycle } => {
            let s = splitting(split)?;
            let e = parse_element(cycle)?;
            let chain = HochschildChain::degree_one(&e);
            let b = boundary(&chain, &s)?;
            let v = b.valuation();
            let json = json!({
                "manifold": s.name,
                "gluing": s.gluing,
                "cycle": e.to_string(),
                "chain": chain.to_string(),
                "boundary": b.to_string(),
                "valuation": v,
            });
            let text = format!("chain: {chain}\nboundary: {b}\nvaluation: {v}\n");
            Ok(Output::ok(json, text))
        }
        Command::Verdict { split, degree_bound, lift } => {
            let s = splitting(split)?;
            let opts = VerdictOptions {
                degree_bound: *degree_bound,
                max_degree_bound: (*degree_bound).max(32),
                lift: match lift {
                    Lift::Library => LiftMode::Library,
                    Lift::Solver => LiftMode::Solver,
                },
            };
            let report = torsion_verdict(&s, &opts)?;
            let exit = match report.verdict {
                Verdict::InconclusiveAtLevel(_) => 2,
                _ => 0,
            };
            Ok(Output { json: serde_json::to_value(&report).expect("report serializes"), text: report.to_text(), exit })
        }
        Command::Hh0 { split, degree_bound } => {
            let s = splitting(split)?;
            let q = specialized_hh0(&s, *degree_bound);
            let basis: Vec<String> = q.as_polys().iter().map(|p| p.to_string()).collect();
            let note = "presents the t = -1 skein module only up to its nilradical";
            let json = json!({
                "manifold": s.name,
                "gluing": s.gluing,
                "finite": q.finite,
                "dimension": q.dimension(),
                "degree_bound": q.degree_bound,
                "basis": basis,
                "notes": [note],
            });
            let dim = q
                .dimension()
                .map_or(format!("infinite (basis listed up to degree {})", q.degree_bound), |d| d.to_string());
            let text = format!("dimension: {dim}\nbasis: {}\nnote: {note}\n", basis.join(", "));
            Ok(Output::ok(json, text))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("json output")),
                Format::Text => print!("{}", out.text),
            }
            ExitCode::from(out.exit)
        }
        Err(e) => {
            match cli.format {
                Format::Json => println!("{}", json!({"error": {"code": e.code, "message": e.message}})),
                Format::Text => eprintln!("error[{}]: {}", e.code, e.message),
            }
            ExitCode::from(1)
        }
    }
}
