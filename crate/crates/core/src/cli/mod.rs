//! The `quadclass` command line.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage or input error.

pub mod expected;
pub mod ingest;
pub mod manifest;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::arith::PrimeStarDiscriminant;
use crate::bqf::{class_structure, ClassGroupCache};
use crate::families::{
    classify_fields, compute_k1, crossover_bound, default_dmax, rp_qmax_u3, rp_scan, RpMap,
    RpSource,
};
use crate::multiquad::FamilyRecord;
use crate::sieve::{sieve_rp, SieveConfig};
use crate::{Error, Result};

use expected::{infer_u, parse_rp_table, verify_records, verify_tables, ExpectedData};
use ingest::{compare_with_cache, ingest_csv, IngestTable};
use manifest::RunManifest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default `qmax` for `R` scans when no complete bound is known.
pub const DEFAULT_QMAX: u64 = 40_000;

#[derive(Debug, Parser)]
#[command(name = "quadclass", version, about = "Class groups of imaginary multiquadratic fields of small exponent")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Class group of a fundamental discriminant, as JSON.
    Classgroup {
        #[arg(allow_negative_numbers = true)]
        discriminant: i128,
        /// Compare with an ingested table.
        #[arg(long)]
        ingested: Option<PathBuf>,
    },
    /// Imaginary prime discriminants whose class group has exponent dividing u.
    I1 {
        #[arg(long)]
        u: u64,
        #[arg(long)]
        dmax: Option<u64>,
    },
    /// The set R_{p*} of positive q* with E(Q(sqrt(p* q*))) | 2u.
    Rp(RpArgs),
    /// Full enumeration; writes records.json, counts.csv, maxdisc.csv, rp.csv, manifest.json.
    Families(FamilyArgs),
    /// Checks records.json against the bundled tables or a reference records.json.
    Verify {
        #[arg(long)]
        records: PathBuf,
        /// Fixture directory or reference records.json (default: bundled tables).
        #[arg(long)]
        expected: Option<PathBuf>,
        /// R sets to check (default: rp.csv beside the records).
        #[arg(long)]
        rp: Option<PathBuf>,
        #[arg(long)]
        u: Option<u64>,
    },
    /// Imports a `discriminant,d1;d2;...` CSV and cross-checks it.
    Ingest {
        csv: PathBuf,
        /// Where to store the imported table (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Crossover point of the two discriminant bounds for u = 3.
    Crossover {
        #[arg(long, default_value_t = 3)]
        u: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RpMethod {
    Scan,
    Sieve,
}

#[derive(Debug, Args)]
pub struct SieveArgs {
    /// Stop the sieve by the ERH bound; required for completeness claims.
    #[arg(long)]
    pub assume_erh: bool,
    /// Stop the sieve after this prime instead (partial result).
    #[arg(long)]
    pub l_max: Option<u64>,
    /// Append-only JSONL file of finished l values, for resuming.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RpArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub p_star: i64,
    #[arg(long)]
    pub u: u64,
    #[arg(long, value_enum, default_value_t = RpMethod::Scan)]
    pub method: RpMethod,
    /// Scan bound (default: the complete bound for u = 3, else 40000).
    #[arg(long)]
    pub qmax: Option<u64>,
    #[command(flatten)]
    pub sieve: SieveArgs,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub u: u64,
    #[arg(long)]
    pub dmax: Option<u64>,
    #[arg(long, value_enum, default_value_t = RpMethod::Scan)]
    pub rp_method: RpMethod,
    #[arg(long)]
    pub qmax: Option<u64>,
    #[command(flatten)]
    pub sieve: SieveArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub ingested: Option<PathBuf>,
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("--jobs ignored: {e}");
        }
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Classgroup { discriminant, ingested } => cmd_classgroup(discriminant, ingested.as_deref()),
        Command::I1 { u, dmax } => cmd_i1(u, dmax),
        Command::Rp(a) => cmd_rp(&a),
        Command::Families(a) => cmd_families(&a),
        Command::Verify { records, expected, rp, u } => {
            cmd_verify(&records, expected.as_deref(), rp.as_deref(), u)
        }
        Command::Ingest { csv, out } => cmd_ingest(&csv, out.as_deref()),
        Command::Crossover { u } => {
            let c = crossover_bound(u)?;
            println!("{}", json!({"u": u, "value": c.value, "lower": c.lower, "upper": c.upper}));
            Ok(EXIT_OK)
        }
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value"));
}

fn load_ingested(path: &Path) -> Result<IngestTable> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn cmd_classgroup(d: i128, ingested: Option<&Path>) -> Result<i32> {
    let s = class_structure(d)?;
    let mut out = json!({
        "divisors": s.divisors(),
        "h": s.order() as u64,
        "exponent": s.exponent(),
        "odd_part": s.odd_part().divisors(),
    });
    if let Some(path) = ingested {
        let table = load_ingested(path)?;
        if let Some(want) = table.entries.get(&d) {
            if want.as_slice() != s.divisors() {
                log::warn!("{d}: ingested {want:?}, computed {:?}", s.divisors());
                out["ingested_disagreement"] = json!(want);
            }
        }
    }
    println!("{out}");
    Ok(EXIT_OK)
}

fn cmd_i1(u: u64, dmax: Option<u64>) -> Result<i32> {
    check_u(u)?;
    let dmax = dmax.unwrap_or_else(|| default_dmax(u));
    println!("rank,p_star");
    for r in compute_k1(u, dmax, &ClassGroupCache::new()) {
        println!("{},{}", r.rank(), r.field.values()[0]);
    }
    Ok(EXIT_OK)
}

fn check_u(u: u64) -> Result<()> {
    if u < 3 || u % 2 == 0 {
        return Err(Error::OutOfRange { bound: u, reason: "u must be an odd number >= 3".into() });
    }
    Ok(())
}

fn sieve_config(p: PrimeStarDiscriminant, u: u64, a: &SieveArgs) -> SieveConfig {
    SieveConfig {
        p_star: p,
        u,
        assume_erh: a.assume_erh,
        l_max: a.l_max,
        report_progress: log::log_enabled!(log::Level::Info),
        checkpoint: a.checkpoint.clone(),
    }
}

fn cmd_rp(a: &RpArgs) -> Result<i32> {
    check_u(a.u)?;
    let p = PrimeStarDiscriminant::new(a.p_star)?;
    let out = match a.method {
        RpMethod::Scan => {
            let (qmax, complete) = match (a.qmax, a.u) {
                (Some(q), _) => (q, false),
                (None, 3) => (rp_qmax_u3(p)?, true),
                (None, _) => (DEFAULT_QMAX, false),
            };
            let hits = rp_scan(p, a.u, qmax)?;
            let coverage = if complete && a.sieve.assume_erh {
                format!("complete under ERH (q* <= {qmax})")
            } else {
                format!("partial up to qmax = {qmax}")
            };
            json!({
                "p_star": p.value(), "u": a.u, "method": "scan",
                "hits": hits.iter().map(|h| h.value()).collect::<Vec<_>>(),
                "qmax": qmax, "exhaustive": complete && a.sieve.assume_erh, "coverage": coverage,
            })
        }
        RpMethod::Sieve => {
            let o = sieve_rp(&sieve_config(p, a.u, &a.sieve))?;
            json!({
                "p_star": p.value(), "u": a.u, "method": "sieve",
                "hits": o.hits.iter().map(|h| h.value()).collect::<Vec<_>>(),
                "exhaustive": o.exhaustive, "coverage": o.coverage(),
                "last_l": o.last_l, "stop_l": o.stop_l,
            })
        }
    };
    print_json(&out);
    Ok(EXIT_OK)
}

fn cmd_families(a: &FamilyArgs) -> Result<i32> {
    check_u(a.u)?;
    let dmax = a.dmax.unwrap_or_else(|| default_dmax(a.u));
    let cache = ClassGroupCache::new();
    let mut m = RunManifest::new("families");
    m.u = Some(a.u);
    m.erh_flag = a.sieve.assume_erh;
    m.param("rp_method", format!("{:?}", a.rp_method).to_lowercase());
    m.bound("dmax", dmax);

    let source = match a.rp_method {
        RpMethod::Scan => match (a.qmax, a.u) {
            (None, 3) => {
                m.bound("qmax", "floor(5761140/|p*|)");
                RpSource::ScanU3Bound
            }
            (q, _) => {
                let qmax = q.unwrap_or(DEFAULT_QMAX);
                m.bound("qmax", qmax);
                m.notes.push(format!("R sets scanned up to q* <= {qmax} only"));
                RpSource::Scan { qmax }
            }
        },
        RpMethod::Sieve => {
            let mut rp = RpMap::new();
            let mut exhaustive = true;
            for r in compute_k1(a.u, dmax, &cache) {
                let p = r.field.generators()[0];
                let o = sieve_rp(&sieve_config(p, a.u, &a.sieve))?;
                log::info!("R_{p}: {} ({})", o.hits.len(), o.coverage());
                exhaustive &= o.exhaustive;
                rp.insert(p, o.hits);
            }
            match a.sieve.l_max {
                Some(l) => {
                    m.bound("l_max", l);
                    m.notes.push(format!("R sets partial up to l_max = {l}"));
                }
                None => m.bound("l_stop", "Bach-Sorenson"),
            }
            RpSource::Provided { rp, exhaustive }
        }
    };
    let c = classify_fields(a.u, dmax, source, &cache)?;
    m.exhaustive = c.exhaustive && a.sieve.assume_erh;
    if !a.sieve.assume_erh {
        m.notes.push("--assume-erh not given: lists are not claimed complete".into());
    }
    let records = c.records();
    if let Some(path) = &a.ingested {
        let d = compare_with_cache(&load_ingested(path)?, &cache);
        for x in &d {
            log::warn!("{}: ingested {:?}, computed {:?}", x.discriminant, x.ingested, x.computed);
        }
        m.param("ingested", path.display().to_string());
        m.notes.push(format!("{} disagreements with the ingested table", d.len()));
    }
    let files = [
        ("records.json", report::records_json(&records)),
        ("counts.csv", report::counts_csv(&c)),
        ("maxdisc.csv", report::maxdisc_csv(&records)),
        ("rp.csv", report::rp_csv(&c.rp)),
    ];
    let m = m.write_all(&a.out, &files)?;
    print_json(&json!({
        "u": a.u, "records": records.len(), "exhaustive": m.exhaustive,
        "out": a.out.display().to_string(),
    }));
    Ok(EXIT_OK)
}

fn read_records(path: &Path) -> Result<Vec<FamilyRecord>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn cmd_verify(records: &Path, expected: Option<&Path>, rp: Option<&Path>, u: Option<u64>) -> Result<i32> {
    let recs = read_records(records)?;
    let u = match u.or_else(|| infer_u(&recs)) {
        Some(u) => u,
        None => return Err(Error::Parse("cannot infer u from the records; pass --u".into())),
    };
    let report = match expected {
        Some(p) if p.is_file() => verify_records(&recs, &read_records(p)?, u),
        _ => {
            let data = match expected {
                Some(dir) => ExpectedData::load(dir)?,
                None => ExpectedData::bundled(),
            };
            let rp_path = rp.map(Path::to_path_buf).or_else(|| {
                let p = records.with_file_name("rp.csv");
                p.exists().then_some(p)
            });
            let rp_table = match rp_path {
                Some(p) => Some(parse_rp_table(&std::fs::read_to_string(&p)?)?),
                None => None,
            };
            verify_tables(&recs, rp_table.as_ref(), u, &data)
        }
    };
    print_json(&serde_json::to_value(&report)?);
    Ok(if report.ok() { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_ingest(csv: &Path, out: Option<&Path>) -> Result<i32> {
    let text = std::fs::read_to_string(csv)?;
    let cache = ClassGroupCache::new();
    let (table, summary) = ingest_csv(&text, &cache);
    if let Some(out) = out {
        let mut m = RunManifest::new("ingest");
        m.param("csv", csv.display().to_string());
        m.notes.push(format!(
            "{} rows, {} accepted, {} skipped, {} disagreements",
            summary.rows,
            summary.accepted,
            summary.skipped,
            summary.disagreements.len()
        ));
        let name = out.file_name().and_then(|n| n.to_str()).unwrap_or("ingested.json");
        let dir = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let body = serde_json::to_string_pretty(&table)? + "\n";
        m.write_all(dir, &[(name, body)])?;
    }
    print_json(&serde_json::to_value(&summary)?);
    Ok(EXIT_OK)
}
