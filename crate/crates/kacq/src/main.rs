//! Command-line front end: computes t-string functions of basic
//! representations by three independent routes, verifies the product
//! identities behind them, and dumps the intermediate objects (partition
//! tables, kernels, theta series, exponent tables).
//!
//! All output is deterministic: series are kept in canonical monomial order,
//! JSON fields are emitted in a fixed order, and CSV uses LF line endings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use kacq::algebras::{build_named, generalized_exponents, AffineAlgebra, AlgebraId, CATALOG_NAMES};
use kacq::identities::{closed_product, compare, two_var_product, VerificationReport};
use kacq::kernels::{
    cherednik_kernel, jacobi_triple_product_check, kernel_truncation, macdonald_kernel_cc,
    string_function_ct, theta_series, MacdonaldParams,
};
use kacq::kostka::{string_function_from_table, t_kostant, PartitionTable};
use kacq::series::{CoeffPoly, Series, TruncationSpec};

const USAGE_EXIT: u8 = 2;
const FAILURE_EXIT: u8 = 1;

#[derive(Parser)]
#[command(
    name = "kacq",
    version,
    about = "t-analogs of weight multiplicities and t-string functions for \
             twisted affine algebras",
    long_about = "Computes the t-string function of the basic representation by \
                  three independent routes and checks the closed product \
                  identities behind them.\n\nAlgebra ids (ASCII): A2~2, A4~2, \
                  A5~2, D3~2, E6~2, D4~3 (twisted) and A1~1, A2~1 (untwisted). \
                  `Xn~r` means the order-r twist of type X_n."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the t-string function of the basic representation.
    StringFunction {
        #[command(flatten)]
        common: Common,
        /// Routes to run, comma separated subset of a,b,c
        /// (a = alternating Weyl sum, b = constant term, c = closed product).
        #[arg(long, default_value = "c")]
        route: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check that the requested routes agree with the closed product, or
    /// `--algebra jacobi` for the rank-one triple product identity.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Routes to verify, comma separated subset of a,b,c.
        #[arg(long, default_value = "a,b,c")]
        route: String,
    },
    /// A single affine Kostka-Foulkes polynomial `K_{L0, L0 - k delta}(t)`.
    Kostka {
        /// Algebra id, e.g. A2~2.
        #[arg(long)]
        algebra: String,
        /// Number of delta steps below the highest weight.
        #[arg(long)]
        k: i64,
        /// Grade norm-1 roots by a second variable s.
        #[arg(long)]
        two_variable: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Directory for cached partition tables (or KACQ_CACHE_DIR).
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Dump a kernel series in canonical JSON.
    Kernel {
        #[command(flatten)]
        common: Common,
        /// Which kernel: the deformed denominator `mu`, the lattice theta
        /// series, or the two-parameter product kernel `delta`.
        #[arg(long, value_enum, default_value_t = KernelKind::Mu)]
        kind: KernelKind,
        /// For `delta`: the exponent k5 in half units (t = q^{k5/2}).
        #[arg(long, default_value_t = 4)]
        k5: i64,
        /// For `delta`: send the fourth parameter pair to its limit.
        #[arg(long)]
        limit: bool,
    },
    /// Dump the affine exponent table as CSV and recompute it from
    /// generalized exponents; any mismatch exits nonzero.
    Exponents {},
    /// Dump the translation-lattice theta series in canonical JSON.
    Theta {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Algebra id, e.g. A2~2.
    #[arg(long)]
    algebra: String,
    /// Truncation order in whole powers of q.
    #[arg(long)]
    order: i64,
    /// Grade norm-1 roots by a second variable s.
    #[arg(long)]
    two_variable: bool,
    /// Directory for cached partition tables (or KACQ_CACHE_DIR).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Extra slack added to the constant-term truncation window.
    #[arg(long, default_value_t = 0)]
    box_padding: i64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelKind {
    Mu,
    Theta,
    Delta,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Route {
    A,
    B,
    C,
}

impl Route {
    fn letter(self) -> &'static str {
        match self {
            Route::A => "a",
            Route::B => "b",
            Route::C => "c",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Route::A => "alternating sum",
            Route::B => "constant term",
            Route::C => "closed product",
        }
    }
}

enum CliError {
    /// Bad invocation: unknown algebra, malformed route list, negative order.
    Usage(String),
    /// The computation ran but a verification failed or a table mismatched.
    Failure(String),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Usage(msg) => {
                eprintln!("error: {}", msg);
                ExitCode::from(USAGE_EXIT)
            }
            CliError::Failure(msg) => {
                eprintln!("error: {}", msg);
                ExitCode::from(FAILURE_EXIT)
            }
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn failure<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Failure(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap itself exits 2 on malformed invocations
    match run(cli) {
        Ok(code) => code,
        Err(e) => e.report(),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.cmd {
        Cmd::StringFunction { common, route, format } => {
            cmd_string_function(&common, &route, format)
        }
        Cmd::Verify { common, route } => cmd_verify(&common, &route),
        Cmd::Kostka {
            algebra,
            k,
            two_variable,
            format,
            cache_dir,
        } => cmd_kostka(&algebra, k, two_variable, format, cache_dir),
        Cmd::Kernel {
            common,
            kind,
            k5,
            limit,
        } => cmd_kernel(&common, kind, k5, limit),
        Cmd::Exponents {} => cmd_exponents(),
        Cmd::Theta { common } => cmd_theta(&common),
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn load_algebra(name: &str) -> Result<AffineAlgebra, CliError> {
    build_named(name).map_err(usage)
}

fn check_order(order: i64) -> Result<(), CliError> {
    if order < 0 {
        return Err(CliError::Usage(format!(
            "--order must be nonnegative, got {}",
            order
        )));
    }
    Ok(())
}

fn parse_routes(spec: &str) -> Result<Vec<Route>, CliError> {
    let mut routes = Vec::new();
    for part in spec.split(',') {
        let r = match part.trim() {
            "a" => Route::A,
            "b" => Route::B,
            "c" => Route::C,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown route `{}` (expected a, b, or c)",
                    other
                )))
            }
        };
        if !routes.contains(&r) {
            routes.push(r);
        }
    }
    if routes.is_empty() {
        return Err(CliError::Usage("--route must name at least one route".into()));
    }
    Ok(routes)
}

fn cache_dir(flag: &Option<PathBuf>) -> Option<PathBuf> {
    flag.clone()
        .or_else(|| std::env::var_os("KACQ_CACHE_DIR").map(PathBuf::from))
}

// Cached partition tables, stored as canonical JSON keyed by the algebra id,
// the delta window in half units, the coordinate box (always 0 for the dense
// affine-coordinate table), and the variable count.
#[derive(Serialize, Deserialize)]
struct TableCache {
    algebra: String,
    #[serde(rename = "maxD2")]
    max_d2: i64,
    #[serde(rename = "box")]
    box_bound: i64,
    #[serde(rename = "twoVariable")]
    two_variable: bool,
    bound: Vec<i64>,
    entries: Vec<TableEntry>,
}

#[derive(Serialize, Deserialize)]
struct TableEntry {
    coords: Vec<i64>,
    coeff: Vec<(u32, u32, String)>,
}

fn cache_path(dir: &Path, algebra: &str, max_d2: i64, two_variable: bool) -> PathBuf {
    dir.join(format!(
        "ptable-{}-d{}-b0-{}.json",
        algebra,
        max_d2,
        if two_variable { "ts" } else { "t" }
    ))
}

fn try_load_table(
    path: &Path,
    g: &AffineAlgebra,
    max_q: i64,
    two_variable: bool,
) -> Option<PartitionTable> {
    let data = std::fs::read_to_string(path).ok()?;
    let parsed: TableCache = match serde_json::from_str(&data) {
        Ok(p) => p,
        Err(e) => {
            eprintln!(
                "warning: cache file {} is corrupt ({}); recomputing",
                path.display(),
                e
            );
            return None;
        }
    };
    let bound: Vec<i64> = g.marks.iter().map(|a| a * max_q).collect();
    if parsed.algebra != g.name
        || parsed.max_d2 != 2 * max_q
        || parsed.box_bound != 0
        || parsed.two_variable != two_variable
        || parsed.bound != bound
    {
        eprintln!(
            "warning: cache file {} has a stale key; recomputing",
            path.display()
        );
        return None;
    }
    let mut entries: Vec<(Vec<i64>, CoeffPoly)> = Vec::with_capacity(parsed.entries.len());
    for e in parsed.entries {
        let mut p = CoeffPoly::zero();
        for (te, se, v) in e.coeff {
            let big: BigInt = match v.parse() {
                Ok(b) => b,
                Err(_) => {
                    eprintln!(
                        "warning: cache file {} holds a malformed coefficient; recomputing",
                        path.display()
                    );
                    return None;
                }
            };
            p.add_assign(&CoeffPoly::monomial(te, se, big));
        }
        entries.push((e.coords, p));
    }
    match PartitionTable::from_entries(bound, two_variable, entries) {
        Some(t) => Some(t),
        None => {
            eprintln!(
                "warning: cache file {} holds out-of-window entries; recomputing",
                path.display()
            );
            None
        }
    }
}

fn store_table(path: &Path, g: &AffineAlgebra, max_q: i64, table: &PartitionTable) {
    let cache = TableCache {
        algebra: g.name.clone(),
        max_d2: 2 * max_q,
        box_bound: 0,
        two_variable: table.two_variable,
        bound: table.bound.clone(),
        entries: table
            .entries()
            .map(|(coords, p)| TableEntry {
                coords,
                coeff: p.terms().map(|((te, se), c)| (*te, *se, c.to_string())).collect(),
            })
            .collect(),
    };
    if let Some(parent) = path.parent() {
        let _ = std::fs::create_dir_all(parent);
    }
    if let Err(e) = std::fs::write(path, serde_json::to_string(&cache).unwrap()) {
        eprintln!("warning: could not write cache file {}: {}", path.display(), e);
    }
}

/// Partition table for route A, going through the cache directory when one is
/// configured. Corrupt or mismatched cache files are recomputed in place.
fn partition_table_cached(
    g: &AffineAlgebra,
    max_q: i64,
    two_variable: bool,
    dir: &Option<PathBuf>,
) -> Result<PartitionTable, CliError> {
    let dir = cache_dir(dir);
    if let Some(dir) = &dir {
        let path = cache_path(dir, &g.name, 2 * max_q, two_variable);
        if let Some(table) = try_load_table(&path, g, max_q, two_variable) {
            return Ok(table);
        }
        let table = t_kostant(g, max_q, two_variable).map_err(failure)?;
        store_table(&path, g, max_q, &table);
        return Ok(table);
    }
    t_kostant(g, max_q, two_variable).map_err(failure)
}

fn route_series(
    route: Route,
    g: &AffineAlgebra,
    common: &Common,
) -> Result<Series, CliError> {
    match route {
        Route::A => {
            let table =
                partition_table_cached(g, common.order, common.two_variable, &common.cache_dir)?;
            string_function_from_table(g, common.order, &table).map_err(failure)
        }
        Route::B => string_function_ct(g, common.order, common.two_variable, common.box_padding)
            .map_err(failure),
        Route::C => {
            if common.two_variable {
                match g.id {
                    AlgebraId::A2Even(l) => two_var_product(l, common.order).map_err(failure),
                    _ => Err(CliError::Usage(format!(
                        "the two-variable closed product only exists for the \
                         A2l~2 family, not {}",
                        g.name
                    ))),
                }
            } else {
                closed_product(g, common.order).map_err(failure)
            }
        }
    }
}

/// Render a pure q-series as a single human-readable line.
fn render_q_series(s: &Series, order: i64) -> String {
    let mut out = String::new();
    for k in 0..=order {
        let c = s.q_coeff(k);
        if c.is_zero() {
            continue;
        }
        if !out.is_empty() {
            out.push_str(" + ");
        }
        match k {
            0 => {
                let _ = write!(out, "{}", c);
            }
            1 => {
                let _ = write!(out, "({})*q", c);
            }
            _ => {
                let _ = write!(out, "({})*q^{}", c, k);
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_string_function(
    common: &Common,
    route_spec: &str,
    format: Format,
) -> Result<ExitCode, CliError> {
    check_order(common.order)?;
    let g = load_algebra(&common.algebra)?;
    let routes = parse_routes(route_spec)?;
    if format == Format::Csv {
        println!("route,q,t,s,coeff");
    }
    for route in routes {
        let series = route_series(route, &g, common)?;
        match format {
            Format::Text => {
                println!(
                    "route {}: {}",
                    route.letter(),
                    render_q_series(&series, common.order)
                );
            }
            Format::Json => {
                let doc = serde_json::json!({
                    "algebra": g.name,
                    "route": route.letter(),
                    "order": common.order,
                    "twoVariable": common.two_variable,
                    "series": series,
                });
                println!("{}", doc);
            }
            Format::Csv => {
                for k in 0..=common.order {
                    for ((te, se), c) in series.q_coeff(k).terms() {
                        println!("{},{},{},{},{}", route.letter(), k, te, se, c);
                    }
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(common: &Common, route_spec: &str) -> Result<ExitCode, CliError> {
    check_order(common.order)?;
    if common.algebra == "jacobi" {
        let report = jacobi_triple_product_check(2 * common.order).map_err(failure)?;
        println!("{}", serde_json::to_string(&report).unwrap());
        return Ok(if report.pass {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(FAILURE_EXIT)
        });
    }
    let g = load_algebra(&common.algebra)?;
    let routes = parse_routes(route_spec)?;
    let reference = route_series(Route::C, &g, common)?;
    let mut all_pass = true;
    for route in routes {
        let report = if route == Route::C {
            VerificationReport::passing(route.label(), Route::C.label(), 2 * common.order)
        } else {
            let series = route_series(route, &g, common)?;
            compare(
                route.label(),
                &series,
                Route::C.label(),
                &reference,
                2 * common.order,
            )
        };
        all_pass &= report.pass;
        println!("{}", serde_json::to_string(&report).unwrap());
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILURE_EXIT)
    })
}

fn cmd_kostka(
    algebra: &str,
    k: i64,
    two_variable: bool,
    format: Format,
    cache_dir_flag: Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    check_order(k)?;
    let g = load_algebra(algebra)?;
    let table = partition_table_cached(&g, k, two_variable, &cache_dir_flag)?;
    let series = string_function_from_table(&g, k, &table).map_err(failure)?;
    let coeff = series.q_coeff(k);
    match format {
        Format::Json => {
            let doc = serde_json::json!({
                "algebra": g.name,
                "k": k,
                "twoVariable": two_variable,
                "coeff": coeff
                    .terms()
                    .map(|((te, se), c)| serde_json::json!([te, se, c.to_string()]))
                    .collect::<Vec<_>>(),
            });
            println!("{}", doc);
        }
        Format::Text => println!("{}", coeff),
        Format::Csv => {
            println!("t,s,coeff");
            for ((te, se), c) in coeff.terms() {
                println!("{},{},{}", te, se, c);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn theta_spec(g: &AffineAlgebra, order: i64, pad: i64) -> TruncationSpec {
    let max_d2 = 2 * order;
    let box_bound = g
        .lattice_ball(max_d2)
        .iter()
        .flat_map(|v| v.iter().map(|c| c.abs()))
        .max()
        .unwrap_or(0)
        + pad;
    TruncationSpec::new(g.rank(), max_d2, box_bound)
}

fn cmd_kernel(common: &Common, kind: KernelKind, k5: i64, limit: bool) -> Result<ExitCode, CliError> {
    check_order(common.order)?;
    let g = load_algebra(&common.algebra)?;
    let series = match kind {
        KernelKind::Mu => {
            let spec = kernel_truncation(&g, common.order, common.box_padding);
            cherednik_kernel(&g, &spec, common.two_variable).map_err(failure)?
        }
        KernelKind::Theta => theta_series(&g, &theta_spec(&g, common.order, common.box_padding)),
        KernelKind::Delta => {
            if k5 <= 0 {
                return Err(CliError::Usage(
                    "--k5 must be a positive number of half units".into(),
                ));
            }
            let spec = TruncationSpec::new(
                g.rank(),
                2 * common.order,
                4 * common.order + 6 + 2 * common.box_padding,
            );
            macdonald_kernel_cc(g.rank(), &MacdonaldParams::specialized(k5, limit), &spec)
                .map_err(failure)?
        }
    };
    println!("{}", serde_json::to_string(&series).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn cmd_theta(common: &Common) -> Result<ExitCode, CliError> {
    check_order(common.order)?;
    let g = load_algebra(&common.algebra)?;
    let series = theta_series(&g, &theta_spec(&g, common.order, common.box_padding));
    println!("{}", serde_json::to_string(&series).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn exponent_list(values: &[i64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_exponents() -> Result<ExitCode, CliError> {
    println!("family,rank,n,catalog,recomputed");
    let mut all_match = true;
    for name in CATALOG_NAMES {
        let g = load_algebra(name)?;
        for n in 1..=g.twist {
            let catalog = g.exponents_at(n);
            let weight: Vec<i64> = if n % g.twist == 0 {
                g.m0.theta_l.clone()
            } else {
                let short = g.m0.theta_s.clone().unwrap_or_else(|| g.m0.theta_l.clone());
                if matches!(g.id, AlgebraId::A2Even(_)) {
                    short.iter().map(|c| 2 * c).collect()
                } else {
                    short
                }
            };
            let recomputed = generalized_exponents(&g.m0, &weight).map_err(failure)?;
            all_match &= catalog == recomputed;
            println!(
                "{},{},{},{},{}",
                g.name,
                g.rank(),
                n,
                exponent_list(&catalog),
                exponent_list(&recomputed)
            );
        }
    }
    Ok(if all_match {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILURE_EXIT)
    })
}
