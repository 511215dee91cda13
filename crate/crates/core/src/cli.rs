//! Command-line interface: every subcommand reads JSON and writes JSON.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::disc::{disc_witness_with_budget, slope_disc};
use crate::error::{Error, Result};
use crate::gen::{gen_instance, GenSpec, InstanceClass};
use crate::hn::{hn_filtration_with_budget, verify_hn};
use crate::kempf::{kempf_ops, Convention};
use crate::oracles::{bipartite_disc_oracle, slope_brute};
use crate::quiver::{slope, Instance};
use crate::shrunk::{verify_certificate, ShrunkCertificate, DEFAULT_BUDGET};

/// Number of cone samples in the Kempf-function check.
pub const KEMPF_SAMPLES: usize = 200;

#[derive(Parser, Debug)]
#[command(name = "quiverstab", version, about = "Certified HN filtrations, discrepancy and Kempf subgroups for quiver representations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Instance file, or `-` for standard input.
    #[arg(default_value = "-")]
    pub input: PathBuf,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random points tried per blow-up degree.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConventionArg {
    T0,
    Tinf,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::T0 => Convention::T0,
            ConventionArg::Tinf => Convention::TInf,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassArg {
    General,
    GeneralZeroTheta,
    Bipartite,
}

impl From<ClassArg> for InstanceClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::General => InstanceClass::General,
            ClassArg::GeneralZeroTheta => InstanceClass::GeneralZeroTheta,
            ClassArg::Bipartite => InstanceClass::Bipartite,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Slope semistability and the value G(M).
    Check(Common),
    /// disc(M, Θ) with a witness and a shrunk-subspace certificate.
    Disc {
        #[command(flatten)]
        common: Common,
        /// Use the slope weight θ_d = κ(M)Θ − Θ(M)κ instead of Θ.
        #[arg(long)]
        slope: bool,
    },
    /// Harder-Narasimhan filtration and its verification report.
    Hn(Common),
    /// Maximally destabilizing one-parameter subgroup.
    Kempf {
        #[command(flatten)]
        common: Common,
        /// Direction of the limit.
        #[arg(long, value_enum, default_value = "t0")]
        convention: ConventionArg,
    },
    /// Re-check a shrunk-subspace certificate.
    VerifyCertificate(Common),
    /// Exhaustive oracles for one-layer bipartite instances.
    Oracle(Common),
    /// Emit generated instances.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "general")]
        class: ClassArg,
        /// Index of the first instance in the stream.
        #[arg(long, default_value_t = 0)]
        index: u64,
        /// Number of instances; more than one yields a JSON array.
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
}

fn read_input(path: &PathBuf) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Input(format!("reading standard input: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Input(format!("reading {}: {e}", path.display())))
    }
}

/// Runs a subcommand on the given input text.
pub fn execute(command: &Command, input: &str) -> Result<Value> {
    match command {
        Command::Check(c) => {
            let inst = Instance::from_json(input)?;
            let d = slope_disc(&inst.rep, &inst.theta, &inst.kappa, c.seed, c.budget)?;
            let mu = if inst.rep.is_zero() { None } else { Some(slope(&inst.theta, &inst.kappa, inst.rep.dims())?.to_string()) };
            Ok(json!({ "semistable": d.value == 0, "G": d.value, "slope": mu, "dims": inst.rep.dims() }))
        }
        Command::Disc { common: c, slope } => {
            let inst = Instance::from_json(input)?;
            let d = if *slope {
                slope_disc(&inst.rep, &inst.theta, &inst.kappa, c.seed, c.budget)?
            } else {
                disc_witness_with_budget(&inst.rep, &inst.theta, c.seed, c.budget)?
            };
            Ok(d.to_json_value(&inst.rep))
        }
        Command::Hn(c) => {
            let inst = Instance::from_json(input)?;
            let f = hn_filtration_with_budget(&inst.rep, &inst.theta, &inst.kappa, c.seed, c.budget)?;
            let report = verify_hn(&f, &inst.theta, &inst.kappa, c.seed)?;
            if !report.ok() {
                return Err(Error::Invariant(format!("filtration fails verification: {:?}", report.violations)));
            }
            Ok(json!({
                "filtration": f.to_json_value(),
                "verify": {
                    "slopes_decreasing": report.slopes_decreasing,
                    "quotients_semistable": report.quotients_semistable,
                    "inclusions_proper": report.inclusions_proper,
                },
            }))
        }
        Command::Kempf { common: c, convention } => {
            let inst = Instance::from_json(input)?;
            let f = hn_filtration_with_budget(&inst.rep, &inst.theta, &inst.kappa, c.seed, c.budget)?;
            if f.len() < 2 {
                return Ok(json!({ "semistable": true }));
            }
            let k = kempf_ops(&f, &inst.theta, &inst.kappa)?;
            let mut v = k.to_json_value((*convention).into(), KEMPF_SAMPLES)?;
            v.as_object_mut().expect("object").insert("semistable".into(), json!(false));
            Ok(v)
        }
        Command::VerifyCertificate(_) => {
            let doc: Value = serde_json::from_str(input)?;
            let cert_doc = doc.get("certificate").unwrap_or(&doc);
            let cert = ShrunkCertificate::from_json_value(cert_doc)?;
            let check = verify_certificate(&cert)?;
            let out = json!({
                "valid": check.valid,
                "dim_U": check.dim_u,
                "dim_BU": check.dim_bu,
                "c": cert.c,
                "image_matches": check.image_matches,
                "shrunk_ok": check.shrunk_ok,
                "blowup_degree": cert.blowup_degree,
                "recomputed_rank": check.recomputed_rank,
                "rank_method": check.rank_method,
                "rank_ok": check.rank_ok,
            });
            if !check.valid {
                return Err(Error::Validation(out.to_string()));
            }
            Ok(out)
        }
        Command::Oracle(_) => {
            let inst = Instance::from_json(input)?;
            let disc = if inst.theta.eval(inst.rep.dims()) == 0 { Some(bipartite_disc_oracle(&inst.rep, &inst.theta)?) } else { None };
            let (mu, dims) = slope_brute(&inst.rep, &inst.theta, &inst.kappa)?;
            Ok(json!({ "disc": disc, "max_slope": mu.to_string(), "max_slope_dims": dims }))
        }
        Command::Gen { seed, class, index, count } => {
            let spec = GenSpec::new(*seed, (*class).into());
            let items: Vec<Value> = (*index..*index + *count).map(|i| gen_instance(&spec, i).to_json_value()).collect();
            Ok(if *count == 1 { items.into_iter().next().expect("one item") } else { Value::Array(items) })
        }
    }
}

fn input_path(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Check(c) | Command::Hn(c) | Command::VerifyCertificate(c) | Command::Oracle(c) => Some(&c.input),
        Command::Disc { common, .. } | Command::Kempf { common, .. } => Some(&common.input),
        Command::Gen { .. } => None,
    }
}

/// Runs the parsed command line, printing JSON on success and a diagnostic
/// on failure; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = input_path(&cli.command)
        .map(read_input)
        .transpose()
        .and_then(|text| execute(&cli.command, text.as_deref().unwrap_or("")));
    match result {
        Ok(v) => {
            let text = serde_json::to_string_pretty(&v).expect("values serialize");
            match writeln!(std::io::stdout().lock(), "{text}") {
                Ok(()) => 0,
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
                Err(e) => {
                    eprintln!("quiverstab: writing output: {e}");
                    1
                }
            }
        }
        Err(e) => {
            eprintln!("quiverstab: {e}");
            e.exit_code()
        }
    }
}
