//! `hcpoly`: covering export, hyperbolic approximation, evaluation, root
//! isolation and condition bounds over JSON files.

mod bench;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_traits::Zero;
use hcpoly::complex_arith::{c_convert, tau_of, working_precision};
use hcpoly::condition::{condition_numbers, geometric_lower_bound};
use hcpoly::covering::build_covering;
use hcpoly::eval::{eval_extended, multipoint_eval};
use hcpoly::happrox::{hyperbolic_approximation, SCHEMA_VERSION};
use hcpoly::roots::{isolate_roots, real_intervals, IsolateOptions};
use hcpoly::{with_real, Backend, BigFloat, Complex, Error, PolyBig, Real};
use serde_json::{json, Value};

/// Failure with the process exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> CliError {
        CliError { code: 2, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = match e {
            Error::InvalidArgument(_) | Error::Parse(_) => 2,
            Error::NonTermination { .. } => 4,
            _ => 3,
        };
        CliError { code, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "hcpoly", version, about = "Hyperbolic approximation of complex polynomials")]
struct Cli {
    /// Worker threads for the library's parallel loops.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export the N-ring covering of the unit disk.
    Covering {
        #[arg(long)]
        n: u32,
        /// Write SVG instead of JSON.
        #[arg(long)]
        svg: bool,
    },
    /// Build the m-hyperbolic approximation and save it.
    Approx {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate at points in the closed unit disk to absolute error ‖f‖₁2^-m.
    Eval {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        m: u32,
        /// Points outside the disk get f(x)/x^d instead of a domain error.
        #[arg(long)]
        extended: bool,
        /// Print values as exact decimal strings.
        #[arg(long)]
        decimal: bool,
    },
    /// Certified isolating disks for every root, including those outside the unit disk.
    Isolate {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        m_cap: Option<u32>,
    },
    /// Isolating intervals for the real roots of a real polynomial.
    Realroots {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        m_cap: Option<u32>,
    },
    /// Condition numbers at the isolated roots and the geometric lower bound.
    CondBound {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        m_cap: Option<u32>,
    },
    /// Time evaluation of seeded Gaussian polynomials against a Horner oracle.
    Bench {
        /// Comma-separated degrees.
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write each generated polynomial into this directory.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

/// Bits for coefficient parsing when no subcommand-specific need applies.
const DEFAULT_PARSE_BITS: u32 = 256;

fn precision_override() -> Result<Option<u32>, CliError> {
    match std::env::var("HCPOLY_PRECISION") {
        Ok(s) => s
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|&b| b >= 2)
            .map(Some)
            .ok_or_else(|| CliError::usage(format!("HCPOLY_PRECISION: {s:?} is not a bit count"))),
        Err(_) => Ok(None),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn load_poly(path: &Path, bits: u32) -> Result<PolyBig, CliError> {
    io::parse_polynomial(&read(path)?, bits)
}

/// Parse once coarsely to learn `d` and `τ`, then at the working precision
/// for parameter `m` (or the override).
fn load_poly_for(path: &Path, m: u32, over: Option<u32>) -> Result<(PolyBig, u32), CliError> {
    let text = read(path)?;
    let bits = match over {
        Some(b) => b,
        None => {
            let coarse = io::parse_polynomial(&text, 64)?;
            working_precision(coarse.deg() as u64, tau_of(&coarse), m).max(128)
        }
    };
    Ok((io::parse_polynomial(&text, bits.max(64))?, bits))
}

fn require_m(m: u32) -> Result<(), CliError> {
    if m < 1 {
        return Err(CliError::usage("--m must be at least 1"));
    }
    Ok(())
}

fn versioned(mut v: Value) -> Value {
    if let Value::Object(o) = &mut v {
        o.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    v
}

fn ext(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(if x > 0.0 { "inf" } else { "-inf" })
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let over = precision_override()?;
    match cli.command {
        Command::Covering { n, svg } => {
            let c = build_covering(n)?;
            if svg {
                Ok(c.to_svg())
            } else {
                Ok(versioned(c.to_json()).to_string())
            }
        }
        Command::Approx { poly, m, out } => {
            let (f, bits) = load_poly_for(&poly, m, over)?;
            let bits = over.unwrap_or(bits.max(hcpoly::happrox::required_bits(&f, m)));
            let h = with_real!(Backend::for_bits(bits), T => {
                let ft = f.convert::<T>();
                let h = hyperbolic_approximation(&ft, m)?;
                (h.to_json(), h.N(), h.models.len(), h.m_tilde, h.bits)
            });
            std::fs::write(&out, h.0.to_string()).map_err(|e| CliError::usage(format!("{}: {e}", out.display())))?;
            Ok(versioned(json!({
                "out": out.display().to_string(), "m": m, "m_tilde": h.3, "N": h.1, "models": h.2, "bits": h.4,
            }))
            .to_string())
        }
        Command::Eval { poly, points, m, extended, decimal } => {
            require_m(m)?;
            let (f, bits) = load_poly_for(&poly, m + 2, over)?;
            let pts = io::parse_points(&read(&points)?, bits.max(64))?;
            let d = f.deg() as u64;
            let bits = over.unwrap_or(working_precision(d, tau_of(&f), m + 2));
            let values: Vec<Complex<BigFloat>> = with_real!(Backend::for_bits(bits), T => {
                let ft = f.convert::<T>();
                let pt: Vec<Complex<T>> = pts.iter().map(c_convert::<BigFloat, T>).collect();
                let r = if extended { eval_extended(&ft, &pt, m)? } else { multipoint_eval(&ft, &pt, m)? };
                r.values.iter().map(|v| Complex::new(v.re.to_big(), v.im.to_big())).collect()
            });
            let out: Vec<Value> = values
                .iter()
                .map(|v| if decimal { json!([v.re.to_exact_decimal(), v.im.to_exact_decimal()]) } else { json!([v.re.to_f64(), v.im.to_f64()]) })
                .collect();
            Ok(versioned(json!({ "m": m, "bits": bits, "values": out })).to_string())
        }
        Command::Isolate { poly, m_cap } => {
            let f = load_poly(&poly, over.unwrap_or(DEFAULT_PARSE_BITS))?;
            let iso = isolate_roots(&f, IsolateOptions { m_cap, ..Default::default() })?;
            Ok(versioned(serde_json::to_value(&iso).expect("plain data serializes")).to_string())
        }
        Command::Realroots { poly, m_cap } => {
            let f = load_poly(&poly, over.unwrap_or(DEFAULT_PARSE_BITS))?;
            if f.coeffs().iter().any(|c| !c.im.is_zero()) {
                return Err(CliError::usage("realroots needs real coefficients"));
            }
            let iso = isolate_roots(&f, IsolateOptions { m_cap, ..Default::default() })?;
            let intervals: Vec<Value> = real_intervals(&iso).iter().map(|r| json!({ "lo": ext(r.lo), "hi": ext(r.hi) })).collect();
            Ok(versioned(json!({ "intervals": intervals, "m_final": iso.m_final, "iterations": iso.iterations })).to_string())
        }
        Command::CondBound { poly, m_cap } => {
            let bits = over.unwrap_or(DEFAULT_PARSE_BITS);
            let f = load_poly(&poly, bits)?;
            let iso = isolate_roots(&f, IsolateOptions { m_cap, ..Default::default() })?;
            let roots: Vec<Complex<BigFloat>> = iso
                .roots
                .iter()
                .map(|z| {
                    let x0 = Complex::new(BigFloat::from_f64_prec(z.re, bits), BigFloat::from_f64_prec(z.im, bits));
                    hcpoly::certify::newton_refine(&f, &x0, bits / 2, 200).unwrap_or(x0)
                })
                .collect();
            let report = condition_numbers(&f, &roots)?;
            let gb = geometric_lower_bound(f.deg(), &iso.roots)?;
            Ok(versioned(json!({ "condition": report, "geometric_bound": gb })).to_string())
        }
        Command::Bench { degrees, m, seed, dump } => {
            require_m(m)?;
            Ok(versioned(bench::run(&degrees, m, seed, dump.as_deref())?).to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("hcpoly: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hcpoly: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
