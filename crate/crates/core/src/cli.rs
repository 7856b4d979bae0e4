//! Command-line front end. `run` returns the exit code and writes reports to
//! the given sinks so it can be driven from tests.

use crate::ecfp::{curve_from_j, trace_of_frobenius};
use crate::endring::endomorphism_discriminant;
use crate::error::Error;
use crate::ffpoly::Rng;
use crate::hcp::hilbert_class_poly;
use crate::identify::{bounds, identify, IdentifyOutcome, Method};
use crate::modpoly::{default_dir, ModPolyDb};
use crate::polyio::{emit_lines, parse_inline, parse_lines};
use crate::quadforms::{disc_invariants, discriminants_with_class_number};
use crate::zpoly::IntPoly;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub const DEFAULT_SEED: u64 = 0x00c0_ffee;
const MAX_SIEVE: u64 = 100_000_000;

/// Benchmark rows (h, |D|), one discriminant per class number.
pub const BENCH_ROWS: [(u64, i64); 12] = [
    (5, 571),
    (10, 2299),
    (15, 6571),
    (20, 9124),
    (25, 25747),
    (30, 21592),
    (35, 42499),
    (40, 34180),
    (45, 60748),
    (50, 64203),
    (75, 157051),
    (100, 249451),
];

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const DATA: i32 = 3;
    pub const RESOURCE: i32 = 4;
}

#[derive(Parser, Debug)]
#[command(name = "cmident", version, about = "Recognize Hilbert class polynomials")]
pub struct Cli {
    /// Directory holding phi_<l>.txt files (overrides CMHCP_MODPOLY_DIR).
    #[arg(long, global = true)]
    pub modpoly_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Screen,
    RealRoot,
}

impl From<Algorithm> for Method {
    fn from(a: Algorithm) -> Method {
        match a {
            Algorithm::One => Method::Alg1,
            Algorithm::Two => Method::Alg2,
            Algorithm::Screen => Method::Screen,
            Algorithm::RealRoot => Method::RealRootBaseline,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether a polynomial is a Hilbert class polynomial.
    Identify {
        /// Coefficient file, constant term first; `-` reads stdin.
        #[arg(conflicts_with = "coeffs", required_unless_present = "coeffs")]
        file: Option<PathBuf>,
        /// Inline comma-separated coefficients, constant term first.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        #[arg(long, value_enum, default_value = "2")]
        algorithm: Algorithm,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Print H_D.
    Hcp {
        #[arg(short = 'D', allow_hyphen_values = true)]
        d: i64,
    },
    /// Print h(D), h2(D) and w(D) = #units/2.
    Classnum {
        #[arg(short = 'D', allow_hyphen_values = true)]
        d: i64,
    },
    /// List every D with h(D) = h up to the discriminant bound (GRH).
    Discs {
        #[arg(long)]
        class_number: u64,
        /// Search |D| up to this instead of the GRH bound.
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Discriminant of End(E) for an ordinary curve with invariant j over F_p.
    Endring {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        j: u64,
    },
    /// Time HCP computation and identification on reference discriminants.
    Bench {
        #[arg(long, default_value_t = 100)]
        max_h: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceExhausted(_) | Error::PrecisionExhausted(_) | Error::FactorizationTimeout(_) => exit::RESOURCE,
        _ => exit::DATA,
    }
}

fn read_input(file: &Option<PathBuf>, coeffs: &Option<String>) -> Result<IntPoly, Error> {
    if let Some(c) = coeffs {
        return parse_inline(c);
    }
    let path = file.as_ref().expect("clap enforces one input");
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    }
    .map_err(|e| Error::FormatError(format!("{}: {e}", path.display())))?;
    parse_lines(&text)
}

fn outcome_text(o: &IdentifyOutcome) -> String {
    let d = o.discriminant.map_or("-".to_string(), |d| d.to_string());
    format!("is_hcp: {}\ndiscriminant: {d}\nmethod: {:?}\nprimes_tried: {}\n", o.is_hcp, o.method, o.primes_tried)
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    format: Option<Format>,
    db: ModPolyDb,
}

impl Ctx<'_> {
    fn json(&self, default: Format) -> bool {
        self.format.unwrap_or(default) == Format::Json
    }
}

fn run_command(cmd: &Command, cx: &mut Ctx) -> Result<(), Error> {
    let io = |e: std::io::Error| Error::ResourceExhausted(format!("write failed: {e}"));
    match cmd {
        Command::Identify { file, coeffs, algorithm, seed } => {
            let h = read_input(file, coeffs)?;
            let mut rng = Rng::new(*seed);
            let o = identify(&h, (*algorithm).into(), &cx.db, &mut rng)?;
            if cx.json(Format::Json) {
                writeln!(cx.out, "{}", serde_json::to_string(&o).unwrap()).map_err(io)?;
            } else {
                write!(cx.out, "{}", outcome_text(&o)).map_err(io)?;
            }
        }
        Command::Hcp { d } => {
            let h = hilbert_class_poly(*d)?;
            if cx.json(Format::Text) {
                let c: Vec<String> = h.coeffs().iter().map(|x| x.to_string()).collect();
                let v = json!({"discriminant": d, "degree": h.degree(), "polynomial": h.to_string(), "coefficients": c});
                writeln!(cx.out, "{v}").map_err(io)?;
            } else {
                writeln!(cx.out, "{h}").map_err(io)?;
                write!(cx.out, "# coefficients, constant term first\n{}", emit_lines(&h)).map_err(io)?;
            }
        }
        Command::Classnum { d } => {
            let inv = disc_invariants(*d)?;
            if cx.json(Format::Text) {
                let v = json!({"discriminant": d, "h": inv.h, "h2": inv.h2, "w": inv.w});
                writeln!(cx.out, "{v}").map_err(io)?;
            } else {
                writeln!(cx.out, "{}\nh2 {}\nw {}", inv.h, inv.h2, inv.w).map_err(io)?;
            }
        }
        Command::Discs { class_number, bound } => {
            if *class_number == 0 {
                return Err(Error::Precondition("class number must be positive".into()));
            }
            let b = bound.unwrap_or(bounds(*class_number).disc_search_bound);
            if b > MAX_SIEVE {
                return Err(Error::ResourceExhausted(format!("search bound {b} exceeds {MAX_SIEVE}")));
            }
            let ds = discriminants_with_class_number(*class_number, b);
            if cx.json(Format::Text) {
                let v = json!({"class_number": class_number, "bound": b, "grh_conditional": bound.is_none(), "discriminants": ds});
                writeln!(cx.out, "{v}").map_err(io)?;
            } else {
                writeln!(cx.out, "# h = {class_number}, |D| <= {b}, {} found{}", ds.len(), if bound.is_none() { " (GRH)" } else { "" })
                    .map_err(io)?;
                for d in ds {
                    writeln!(cx.out, "{d}").map_err(io)?;
                }
            }
        }
        Command::Endring { p, j } => {
            if !crate::arith::is_prime(*p) {
                return Err(Error::Precondition(format!("{p} is not prime")));
            }
            let e = curve_from_j(*p, *j)?;
            let a_p = trace_of_frobenius(&e).a_p;
            let d = endomorphism_discriminant(&e, &cx.db)?;
            if cx.json(Format::Text) {
                let v = json!({"p": p, "j": j % p, "a_p": a_p, "discriminant": d.d, "d0": d.d0, "conductor": d.f});
                writeln!(cx.out, "{v}").map_err(io)?;
            } else {
                writeln!(cx.out, "{}", d.d).map_err(io)?;
            }
        }
        Command::Bench { max_h, seed } => {
            let json = cx.json(Format::Text);
            if !json {
                writeln!(cx.out, "{:>4} {:>8} {:>10} {:>10} {:>10}", "h", "|D|", "t_HCP", "t_CM", "t_noCM").map_err(io)?;
            }
            for &(h, n) in BENCH_ROWS.iter().filter(|r| r.0 <= *max_h) {
                let d = -n;
                let t = Instant::now();
                let hd = hilbert_class_poly(d)?;
                let t_hcp = t.elapsed().as_secs_f64();
                let mut rng = Rng::new(*seed);
                let t = Instant::now();
                let yes = identify(&hd, Method::Alg2, &cx.db, &mut rng)?;
                let t_cm = t.elapsed().as_secs_f64();
                let t = Instant::now();
                let no = identify(&hd.add(&IntPoly::one()), Method::Alg2, &cx.db, &mut rng)?;
                let t_nocm = t.elapsed().as_secs_f64();
                if yes.discriminant != Some(d) || no.is_hcp || hd.degree() as u64 != h {
                    return Err(Error::InvariantViolation(format!("bench row h = {h}, D = {d} misidentified")));
                }
                if json {
                    let v = json!({"h": h, "abs_d": n, "t_hcp": t_hcp, "t_cm": t_cm, "t_nocm": t_nocm});
                    writeln!(cx.out, "{v}").map_err(io)?;
                } else {
                    writeln!(cx.out, "{h:>4} {n:>8} {t_hcp:>10.3} {t_cm:>10.3} {t_nocm:>10.3}").map_err(io)?;
                }
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let sink: &mut dyn Write = if code == exit::OK { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let dir = cli.modpoly_dir.clone().unwrap_or_else(default_dir);
    if cli.verbose > 0 {
        let _ = writeln!(err, "modular polynomials: {}", dir.display());
    }
    let mut cx = Ctx { out, format: cli.format, db: ModPolyDb::new(dir) };
    match run_command(&cli.command, &mut cx) {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
