use std::fmt;
use std::fs;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::Serialize;
use superpowers::classify::{classify as classify_sum, ParityClass, Verdict};
use superpowers::factor::{factor, omega_rational_bound, sigma0, Budget, OmegaBound, OmegaValue};
use superpowers::numeric::slog;
use superpowers::residue::{eval_integer_sum_mod, factored_modulus};
use superpowers::sequence::SuperpowerSum;
use superpowers::witness::{
    build_certificate, omega_lower_bound, verify_chain, witness_instance, CheckResult, LinkBound,
    WitnessCertificate, WitnessConfig,
};
use superpowers::zsigmondy::{difference, is_exception, primitive_prime_divisors, ZsigmondyQuery};
use superpowers::{Error, Rational};

use crate::output::{self, Format};

pub struct Context {
    pub format: Option<Format>,
    pub budget: Budget,
    pub bit_cap: u64,
}

impl Context {
    fn table_format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    fn document_format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    fn witness_config(&self) -> WitnessConfig {
        WitnessConfig { bit_cap: self.bit_cap, budget: self.budget, ..WitnessConfig::default() }
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
    Usage(String),
    /// Some check failed; the report has already been printed.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Parse(_)) | CliError::Usage(_) => 2,
            CliError::Core(Error::BitCapExceeded { .. }) => 3,
            CliError::Core(Error::DegenerateInstance) => 4,
            CliError::Failed(_) => 5,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) | CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<SuperpowerSum, CliError> {
    Ok(SuperpowerSum::from_json(&read(path)?)?)
}

fn check_range(from: u64, to: u64, least: u64) -> CliResult {
    if from < least {
        return Err(CliError::Usage(format!("--n-from must be at least {least}")));
    }
    if from > to {
        return Err(CliError::Usage(format!("empty range {from}..={to}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct ValueRow {
    n: u64,
    value: String,
}

#[derive(Serialize)]
struct ResidueRow {
    n: u64,
    modulus: String,
    residue: String,
}

fn is_integral(s: &SuperpowerSum) -> bool {
    s.terms().iter().all(|t| t.coeff.is_integer() && t.bases.iter().all(Rational::is_integer))
}

fn mod_nonneg(x: &BigInt, m: &BigInt) -> BigUint {
    (((x % m) + m) % m).to_biguint().expect("nonnegative")
}

/// `x mod m` for a rational `x` whose denominator is a unit mod `m`.
fn reduce_rational(x: &Rational, m: &BigUint) -> Result<BigUint, Error> {
    let m_int = BigInt::from(m.clone());
    let inv = mod_nonneg(x.denom(), &m_int)
        .modinv(m)
        .ok_or_else(|| Error::InvalidArgument(format!("denominator of {x} is not invertible mod {m}")))?;
    Ok(mod_nonneg(x.numer(), &m_int) * inv % m)
}

pub fn eval(ctx: &Context, path: &Path, from: u64, to: u64, moduli: &[BigUint]) -> CliResult {
    check_range(from, to, 1)?;
    let s = load_instance(path)?;
    let format = ctx.table_format();
    if moduli.is_empty() {
        let rows = (from..=to)
            .into_par_iter()
            .map(|n| Ok(ValueRow { n, value: s.eval_with_cap(n, ctx.bit_cap)?.to_string() }))
            .collect::<Result<Vec<_>, Error>>()?;
        return Ok(output::table(&rows, format)?);
    }
    let factored = moduli
        .iter()
        .map(|m| Ok((m, factored_modulus(m)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let integral = is_integral(&s);
    let rows = (from..=to)
        .into_par_iter()
        .map(|n| {
            let exact = if integral { None } else { Some(s.eval_with_cap(n, ctx.bit_cap)?) };
            factored
                .iter()
                .map(|(m, fm)| {
                    let residue = match &exact {
                        None => eval_integer_sum_mod(&s, &BigUint::from(n), fm)?,
                        Some(x) => reduce_rational(x, m)?,
                    };
                    Ok(ResidueRow { n, modulus: m.to_string(), residue: residue.to_string() })
                })
                .collect::<Result<Vec<_>, Error>>()
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let rows: Vec<ResidueRow> = rows.into_iter().flatten().collect();
    Ok(output::table(&rows, format)?)
}

#[derive(Serialize)]
struct ClassRow {
    verdict: Verdict,
    even: &'static str,
    odd: &'static str,
}

fn kind(c: &ParityClass) -> &'static str {
    match c {
        ParityClass::Degenerate { .. } => "degenerate",
        ParityClass::NonDegenerate { .. } => "non_degenerate",
        ParityClass::IdenticallyZero => "identically_zero",
    }
}

pub fn classify(ctx: &Context, path: &Path) -> CliResult {
    let result = classify_sum(&load_instance(path)?);
    match ctx.document_format() {
        Format::Json => output::document(&result)?,
        Format::Csv => {
            let row = ClassRow { verdict: result.verdict, even: kind(&result.even), odd: kind(&result.odd) };
            output::table(&[row], Format::Csv)?
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Report<'a> {
    all_passed: bool,
    links: Vec<LinkSummary>,
    checks: &'a [CheckResult],
}

#[derive(Serialize)]
struct LinkSummary {
    kappa: usize,
    r_digits: usize,
    partial: bool,
    omega_at_least: Option<u64>,
}

#[derive(Serialize)]
struct CheckRow<'a> {
    name: &'a str,
    link: usize,
    passed: bool,
    moduli: String,
    detail: &'a str,
}

fn print_report(cert: &WitnessCertificate, checks: &[CheckResult], format: Format) -> CliResult {
    match format {
        Format::Json => {
            let bounds: Vec<LinkBound> = omega_lower_bound(cert);
            let links = cert
                .chain
                .iter()
                .zip(bounds)
                .map(|(l, b)| LinkSummary {
                    kappa: l.kappa,
                    r_digits: l.r.to_string().len(),
                    partial: l.partial,
                    omega_at_least: b.certified,
                })
                .collect();
            let all_passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
            output::document(&Report { all_passed, links, checks })?;
        }
        Format::Csv => {
            let rows: Vec<CheckRow> = checks
                .iter()
                .map(|c| CheckRow {
                    name: &c.name,
                    link: c.link,
                    passed: c.passed,
                    moduli: c.moduli.join(" "),
                    detail: &c.detail,
                })
                .collect();
            output::table(&rows, Format::Csv)?;
        }
    }
    Ok(())
}

fn failures(checks: &[CheckResult]) -> CliResult {
    let failed: Vec<String> =
        checks.iter().filter(|c| !c.passed).map(|c| format!("{}@{}", c.name, c.link)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("failed checks: {}", failed.join(", "))))
    }
}

pub fn witness(ctx: &Context, path: &Path, kappa_max: usize, out: Option<&Path>) -> CliResult {
    let s = load_instance(path)?;
    let (parity, inst) = witness_instance(&s)?;
    if parity == superpowers::classify::Parity::Odd {
        eprintln!("note: even indices are degenerate; the chain runs on the odd-index transform");
    }
    let cert = build_certificate(&inst, kappa_max, true, &ctx.witness_config())?;
    match out {
        Some(p) => {
            fs::write(p, cert.to_json() + "\n")
                .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            print_report(&cert, &cert.checks, ctx.document_format())?;
        }
        None => output::document(&cert)?,
    }
    failures(&cert.checks)
}

pub fn verify(ctx: &Context, path: &Path) -> CliResult {
    let cert = WitnessCertificate::from_json(&read(path)?)?;
    let checks = verify_chain(&cert, &ctx.witness_config())?;
    let stored: Vec<(&str, usize, bool)> = cert.checks.iter().map(|c| (c.name.as_str(), c.link, c.passed)).collect();
    let fresh: Vec<(&str, usize, bool)> = checks.iter().map(|c| (c.name.as_str(), c.link, c.passed)).collect();
    if !stored.is_empty() && stored != fresh {
        eprintln!("warning: stored check results differ from the replay");
    }
    print_report(&cert, &checks, ctx.document_format())?;
    failures(&checks)
}

#[derive(Serialize)]
struct ScanRow {
    n: u64,
    omega: String,
    omega_exact: bool,
    slog: Option<u64>,
    omega_exceeds_slog: Option<bool>,
    sigma0: u64,
    /// `omega - (sigma0(n) - 2)` when omega is exact and finite.
    divisor_margin: Option<i64>,
}

fn scan_row(ctx: &Context, value: &Rational, base: &Rational, n: u64) -> Result<ScanRow, Error> {
    let omega = omega_rational_bound(value, ctx.budget)?;
    let n_big = BigUint::from(n);
    let level = if n >= 2 { Some(slog(base, &n_big)?) } else { None };
    let d = sigma0(&n_big)?;
    let (exact, exceeds, margin) = match omega {
        OmegaBound::Exact(OmegaValue::Finite(w)) => {
            (true, level.map(|l| w > l), Some(w as i64 - (d as i64 - 2)))
        }
        OmegaBound::Exact(OmegaValue::Infinite) => (true, level.map(|_| true), None),
        OmegaBound::AtLeast(w) => (false, level.and_then(|l| (w > l).then_some(true)), None),
    };
    Ok(ScanRow {
        n,
        omega: omega.to_string(),
        omega_exact: exact,
        slog: level,
        omega_exceeds_slog: exceeds,
        sigma0: d,
        divisor_margin: margin,
    })
}

pub fn scan(ctx: &Context, path: &Path, from: u64, to: u64, base: &Rational) -> CliResult {
    check_range(from, to, 1)?;
    let s = load_instance(path)?;
    // Rejects unusable bases before any factoring starts.
    slog(base, &BigUint::from(2u32))?;
    // Every value is built before any factoring so a bit-cap failure is immediate.
    let values = (from..=to)
        .into_par_iter()
        .map(|n| s.eval_with_cap(n, ctx.bit_cap))
        .collect::<Result<Vec<_>, Error>>()?;
    let rows = values
        .par_iter()
        .enumerate()
        .map(|(i, v)| scan_row(ctx, v, base, from + i as u64))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(output::table(&rows, ctx.table_format())?)
}

#[derive(Serialize)]
struct ZsigmondyRow {
    n: u64,
    value: String,
    omega: u64,
    sigma0: u64,
    divisor_margin: i64,
    primitive: String,
    /// No primitive prime divisor exists.
    exception: bool,
    /// The pair and exponent are on the known exception list.
    listed: bool,
}

fn zsigmondy_row(ctx: &Context, a: u64, b: u64, n: u64) -> Result<ZsigmondyRow, Error> {
    let needed = n.saturating_mul(u64::from(64 - a.leading_zeros()));
    if needed > ctx.bit_cap {
        return Err(Error::BitCapExceeded { needed, cap: ctx.bit_cap });
    }
    let query = ZsigmondyQuery::new(a, b, n)?;
    let g = query.common_factor();
    let reduced = ZsigmondyQuery::new(a / g, b / g, n)?;
    let value = difference(a, b, n)?;
    let omega = factor(&value, ctx.budget)?.complete()?.omega();
    let d = sigma0(&BigUint::from(n))?;
    let primitive = primitive_prime_divisors(&query, ctx.budget)?;
    Ok(ZsigmondyRow {
        n,
        value: value.to_string(),
        omega,
        sigma0: d,
        divisor_margin: omega as i64 - (d as i64 - 2),
        primitive: primitive.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
        exception: primitive.is_empty(),
        listed: is_exception(&reduced),
    })
}

pub fn zsigmondy(ctx: &Context, a: u64, b: u64, from: u64, to: u64) -> CliResult {
    check_range(from, to, 2)?;
    ZsigmondyQuery::new(a, b, from)?;
    let rows = (from..=to)
        .into_par_iter()
        .map(|n| zsigmondy_row(ctx, a, b, n))
        .collect::<Result<Vec<_>, Error>>()?;
    output::table(&rows, ctx.table_format())?;
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.exception != r.listed || r.divisor_margin < 0)
        .map(|r| r.n.to_string())
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("rows disagree with the exception list or the divisor bound: n = {}", bad.join(", "))))
    }
}
