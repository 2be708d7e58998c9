//! Command-line front end.
//!
//! Exit codes: 0 all identities pass, 1 some identity failed, 2 configuration
//! or input error, 3 I/O error.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;

use crate::config::{Format, SuiteConfig};
use crate::geometry::{AmbientStructure, BlockSwap, Sign};
use crate::induction::{induce_at_point, InducedStructure};
use crate::report::{to_csv, to_json, write_atomic};
use crate::submanifold::{Hypersphere, ProductOfSpheres, Submanifold};
use crate::suite::run_full_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "apstruct", version, about = "Induced structures on spheres and products of spheres")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity suite described by a config file.
    Verify(VerifyArgs),
    /// Print the induced structure at one point.
    Induce(InduceArgs),
    /// Print the version.
    Version,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Report destination; stdout when neither this nor the config sets one.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
}

// Fully qualified so clap parses the whole list as one value.
type SignList = ::std::vec::Vec<Sign>;
type Coords = ::std::vec::Vec<f64>;

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("manifold").required(true).args(["sphere", "product"]))]
pub struct InduceArgs {
    #[arg(long)]
    pub sphere: bool,
    #[arg(long)]
    pub product: bool,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: usize,
    /// Signs of the x/y blocks, e.g. `1,-1`; all +1 by default.
    #[arg(long, value_parser = parse_sign_list, allow_hyphen_values = true)]
    pub nu: Option<SignList>,
    /// Signs of the z block; all +1 by default.
    #[arg(long, value_parser = parse_sign_list, allow_hyphen_values = true)]
    pub eps: Option<SignList>,
    #[arg(long = "R", required_if_eq("sphere", "true"))]
    pub big_r: Option<f64>,
    #[arg(long, required_if_eq("product", "true"))]
    pub r: Option<f64>,
    #[arg(long, required_if_eq("product", "true"))]
    pub r3: Option<f64>,
    #[arg(long, value_parser = parse_point_list, allow_hyphen_values = true)]
    pub point: Coords,
}

/// Comma-separated reals, e.g. `1,0,-0.5`.
pub fn parse_point_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .enumerate()
        .map(|(k, item)| {
            let item = item.trim();
            match item.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(format!("coordinate {k}: `{item}` is not a finite number")),
            }
        })
        .collect()
}

/// Comma-separated signs: `1`, `+1`, `-1`, `+` or `-`.
pub fn parse_sign_list(s: &str) -> Result<Vec<Sign>, String> {
    s.split(',')
        .enumerate()
        .map(|(k, item)| match item.trim() {
            "1" | "+1" | "+" => Ok(Sign::Plus),
            "-1" | "-" => Ok(Sign::Minus),
            other => Err(format!("sign {k}: `{other}` is not +1 or -1")),
        })
        .collect()
}

/// Parses arguments (exiting on usage errors) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    run(cli, &mut io::stdout().lock(), &mut io::stderr().lock())
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match cli.command {
        Command::Verify(args) => verify(&args, out, err),
        Command::Induce(args) => induce(&args, out, err),
        Command::Version => {
            let _ = writeln!(out, "apstruct {}", env!("CARGO_PKG_VERSION"));
            EXIT_OK
        }
    }
}

fn verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            let _ = writeln!(err, "error: config file not found: {}", args.config.display());
            return EXIT_INPUT;
        }
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", args.config.display());
            return EXIT_IO;
        }
    };
    let config = match SuiteConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", args.config.display());
            return EXIT_INPUT;
        }
    };
    let report = match run_full_suite(&config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let body = match args.format.unwrap_or(config.format) {
        Format::Json => to_json(&report),
        Format::Csv => to_csv(&report),
    };
    let written = match args.out.as_ref().or(config.output.as_ref()) {
        Some(path) => write_atomic(path, &body).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out.write_all(body.as_bytes()).map_err(|e| format!("cannot write report: {e}")),
    };
    if let Err(msg) = written {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_IO;
    }
    let mut failed = false;
    for (case, rep) in report.failures() {
        failed = true;
        let _ = writeln!(
            err,
            "FAIL case {case} {}: max_residual {:e} > tolerance {:e}",
            rep.identity_id, rep.max_residual, rep.tolerance
        );
    }
    if failed {
        EXIT_FAILED
    } else {
        EXIT_OK
    }
}

/// 15 significant digits, so rounding noise in the last bits does not show; never "-0".
fn num(v: f64) -> String {
    let rounded: f64 = format!("{v:.14e}").parse().expect("formatted float parses");
    format!("{}", rounded + 0.0)
}

fn vector(v: &DVector<f64>) -> String {
    let parts: Vec<String> = v.iter().map(|&x| num(x)).collect();
    format!("({})", parts.join(", "))
}

fn signs(s: &[Sign]) -> String {
    let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn describe(st: &InducedStructure, fields: &mut BTreeMap<String, String>) {
    let a = st.a();
    let rows: Vec<String> = (0..a.nrows())
        .map(|i| {
            let row: Vec<String> = (0..a.ncols()).map(|j| num(a[(i, j)])).collect();
            format!("[{}]", row.join(", "))
        })
        .collect();
    fields.insert("a".into(), format!("[{}]", rows.join(", ")));
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            fields.insert(format!("a{}{}", i + 1, j + 1), num(a[(i, j)]));
        }
    }
    fields.insert("codim".into(), st.codim().to_string());
    for (k, n) in st.frame().iter().enumerate() {
        fields.insert(format!("n{}", k + 1), vector(n));
    }
    for (k, xi) in st.xi().iter().enumerate() {
        fields.insert(format!("xi{}", k + 1), vector(xi));
    }
}

fn induce(args: &InduceArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match induce_fields(args) {
        Ok(fields) => {
            let mut text = String::new();
            for (k, v) in &fields {
                text.push_str(&format!("{k} = {v}\n"));
            }
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_IO;
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn induce_fields(args: &InduceArgs) -> crate::error::Result<BTreeMap<String, String>> {
    let nu = args.nu.clone().unwrap_or_else(|| vec![Sign::Plus; args.p]);
    let eps = args.eps.clone().unwrap_or_else(|| vec![Sign::Plus; args.q]);
    let swap = BlockSwap::new(nu, eps)?;
    let ambient = AmbientStructure::BlockSwap(swap.clone());
    let coords = DVector::from_vec(args.point.clone());
    let mut fields = BTreeMap::new();
    let st = if args.product {
        let (r, r3) = (args.r.unwrap_or_default(), args.r3.unwrap_or_default());
        let prod = ProductOfSpheres::new(args.p, args.q, r, r3)?;
        let pt = prod.point(coords)?;
        fields.insert("manifold".into(), "product".into());
        fields.insert("r".into(), num(r));
        fields.insert("r3".into(), num(r3));
        induce_at_point(&ambient, &prod, &pt)?
    } else {
        let big_r = args.big_r.unwrap_or_default();
        let sph = Hypersphere::new(2 * args.p + args.q, big_r)?;
        let pt = sph.point(coords)?;
        fields.insert("manifold".into(), "sphere".into());
        fields.insert("R".into(), num(big_r));
        induce_at_point(&ambient, &sph, &pt)?
    };
    fields.insert("p".into(), args.p.to_string());
    fields.insert("q".into(), args.q.to_string());
    fields.insert("nu".into(), signs(swap.nu()));
    fields.insert("eps".into(), signs(swap.eps()));
    fields.insert("point".into(), vector(st.base()));
    describe(&st, &mut fields);
    Ok(fields)
}
