//! `multinorm`: Ш(L), verdicts and knot groups for `N_{L/Q}(t) = c`.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use multinorm::sha_core::{compute_sha_prime_power, contexts, find_cyclic_pivot, DEFAULT_AMBIENT_LIMIT};
use multinorm::splitting::DEFAULT_MODULUS_LIMIT;
use multinorm::{compute_sha, parse_rational, AbelianFieldQ, Error, Limits, Multinorm, SplittingProfile, Verdict};

const EXIT_ERROR: u8 = 2;
const EXIT_OBSTRUCTED: u8 = 3;
const EXIT_NO_LOCAL: u8 = 4;

#[derive(Parser)]
#[command(name = "multinorm", version, about = "Hasse principle for multinorm equations over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute Ш(L) with generators for each prime component.
    Sha(Problem),
    /// Decide whether N_{L/Q}(t) = c has a rational solution.
    Decide {
        #[command(flatten)]
        problem: Problem,
        /// Right-hand side, as an integer or `num/den`.
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Scan rationals by height for representatives of the knot group.
    Knot {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = 100)]
        bound: u64,
    },
    /// Export splitting profiles, or validate and evaluate a saved one.
    Profile {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        profile_in: Option<PathBuf>,
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Problem {
    /// Factor field spec (`quad:D`, `cyclo:N`, `cyclosub:N:d`, `explicit:N:g1,g2`, `Q`); repeatable.
    #[arg(long = "factor")]
    factors: Vec<String>,
    /// Index of the cyclic factor to use as pivot (defaults to the first cyclic one).
    #[arg(long)]
    pivot: Option<usize>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = DEFAULT_AMBIENT_LIMIT)]
    ambient_limit: u64,
    #[arg(long, default_value_t = DEFAULT_MODULUS_LIMIT)]
    modulus_limit: u64,
}

impl Problem {
    fn fields(&self) -> multinorm::Result<Vec<AbelianFieldQ>> {
        if self.factors.is_empty() {
            return Err(Error::WrongShape("at least one --factor is required".into()));
        }
        self.factors.iter().map(|s| AbelianFieldQ::parse(s)).collect()
    }

    fn limits(&self) -> Limits {
        Limits { modulus_limit: self.modulus_limit, ambient_limit: self.ambient_limit }
    }

    fn pivot_for(&self, fields: &[AbelianFieldQ]) -> multinorm::Result<usize> {
        match self.pivot {
            Some(i) => Ok(i),
            None => find_cyclic_pivot(fields),
        }
    }
}

fn describe_group(factors: &[u64]) -> String {
    if factors.is_empty() {
        "0".into()
    } else {
        factors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" ⊕ ")
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("values serialize"));
}

fn cmd_sha(problem: &Problem) -> multinorm::Result<u8> {
    let fields = problem.fields()?;
    let sha = compute_sha(&fields, problem.pivot_for(&fields)?, &problem.limits())?;
    if problem.json {
        print_json(&sha.to_json());
        return Ok(0);
    }
    println!("Ш(L) ≅ {}", describe_group(&sha.elementary_divisors()));
    println!("pivot: factor {} ({})", sha.pivot, fields[sha.pivot]);
    for c in &sha.components {
        let g = &c.group;
        println!(
            "  p = {}: Ш ≅ {}, |G| = {}, ambient exponents {:?}",
            c.p,
            describe_group(g.invariant_factors()),
            g.g_order(),
            g.ambient_exponents()
        );
        for (gen, d) in g.generators().iter().zip(g.invariant_factors()) {
            println!("    generator of order {d}: {gen:?}");
        }
    }
    Ok(0)
}

fn cmd_decide(problem: &Problem, c: &str) -> multinorm::Result<u8> {
    let fields = problem.fields()?;
    let c = parse_rational(c)?;
    let mn = Multinorm::new(&fields, Some(problem.pivot_for(&fields)?), &problem.limits())?;
    let verdict = mn.decide(&c)?;
    if problem.json {
        let mut out = verdict.to_json();
        out["c"] = serde_json::Value::String(c.to_string());
        if let Verdict::Obstructed(o) = &verdict {
            out["character"] = serde_json::json!(o.character(mn.sha()));
        }
        print_json(&out);
    } else {
        println!("c = {c}: {verdict}");
        if let Verdict::Obstructed(o) = &verdict {
            println!("character on Ш(L): {:?}", o.character(mn.sha()));
        }
    }
    Ok(match verdict {
        Verdict::Solvable => 0,
        Verdict::Obstructed(_) => EXIT_OBSTRUCTED,
        Verdict::NoLocalSolution(_) => EXIT_NO_LOCAL,
    })
}

fn cmd_knot(problem: &Problem, bound: u64) -> multinorm::Result<u8> {
    let fields = problem.fields()?;
    let mn = Multinorm::new(&fields, Some(problem.pivot_for(&fields)?), &problem.limits())?;
    let knot = mn.knot_group(bound)?;
    if problem.json {
        print_json(&serde_json::to_value(&knot).expect("knot group serializes"));
        return Ok(0);
    }
    println!("dual of Ш(L) ≅ {}", describe_group(&knot.moduli));
    for (c, chi) in &knot.representatives {
        println!("  c = {c}: character {chi:?}");
    }
    let coverage = if knot.complete { "complete" } else { "partial: raise --bound" };
    println!("{} rationals scanned, coverage {coverage}", knot.scanned);
    Ok(0)
}

fn read_profiles(path: &PathBuf) -> multinorm::Result<Vec<SplittingProfile>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::MalformedProfile(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::MalformedProfile(format!("invalid JSON: {e}")))?;
    match value {
        serde_json::Value::Array(items) => items.iter().map(SplittingProfile::from_json).collect(),
        other => Ok(vec![SplittingProfile::from_json(&other)?]),
    }
}

fn cmd_profile(problem: &Problem, input: Option<&PathBuf>, output: Option<&PathBuf>) -> multinorm::Result<u8> {
    if let Some(path) = input {
        let profiles = read_profiles(path)?;
        let mut reports = Vec::new();
        for profile in &profiles {
            let group = compute_sha_prime_power(profile, problem.ambient_limit)?;
            if !problem.json {
                println!(
                    "valid profile: p = {}, e = {}, {} classes, {} factors; Ш ≅ {}",
                    profile.p(),
                    profile.e(),
                    profile.classes().len(),
                    profile.factor_count(),
                    describe_group(group.invariant_factors())
                );
            }
            reports.push(group.to_json());
        }
        if problem.json {
            print_json(&serde_json::Value::Array(reports));
        }
        return Ok(0);
    }
    let fields = problem.fields()?;
    let (_, ctxs) = contexts(&fields, problem.pivot_for(&fields)?, &problem.limits())?;
    let profiles: Vec<serde_json::Value> =
        ctxs.iter().map(|c| c.build_profile().map(|p| p.to_json())).collect::<multinorm::Result<_>>()?;
    let text = serde_json::to_string_pretty(&serde_json::Value::Array(profiles)).expect("values serialize");
    match output {
        Some(path) => {
            fs::write(path, text + "\n")
                .map_err(|e| Error::Unsupported(format!("cannot write {}: {e}", path.display())))?;
            if !problem.json {
                println!("wrote {} profile(s) to {}", ctxs.len(), path.display());
            }
        }
        None => println!("{text}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sha(problem) => cmd_sha(problem),
        Command::Decide { problem, c } => cmd_decide(problem, c),
        Command::Knot { problem, bound } => cmd_knot(problem, *bound),
        Command::Profile { problem, profile_in, profile_out } => {
            cmd_profile(problem, profile_in.as_ref(), profile_out.as_ref())
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
