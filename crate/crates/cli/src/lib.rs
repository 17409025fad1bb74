//! Command pipelines behind the `arithgeo` binary.
//!
//! Every command produces a data table (CSV, or JSON where offered) and a
//! flat JSON manifest recording the flags, the crate version, the column
//! schema and summary values. Output depends only on the flags.
//!
//! Exit codes: 0 success, 2 usage, 3 internal verification failure,
//! 4 bounds too small.

use std::collections::BTreeSet;

use arithgeo::census::squarefree::{self, CountMode};
use arithgeo::census::{self, PrimePredicate};
use arithgeo::fieldforge::{self, Construction};
use arithgeo::geodesics;
use arithgeo::parse;
use arithgeo::primeforge::{self, DEFAULT_Q_CEILING};
use arithgeo::quadfields::{QuadraticField, SplitType};
use arithgeo::quatalg::{self, QuatAlgK, QuatAlgQ};
use arithgeo::volumes;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "arithgeo", version, about = "Quaternion algebras, prime splitting censuses and orbifold invariants")]
pub struct Cli {
    /// Write the data table here; the manifest goes to `<out>.manifest.json`.
    /// Without it data goes to stdout and the manifest to stderr.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build n relative quadratic extensions of Q(sqrt(delta)) with certificates.
    ConstructFields(ConstructArgs),
    /// Prime density and squarefree counts for the prime set of a construction.
    Census(CensusArgs),
    /// Algebras over Q with prescribed embeddings, coareas and geodesic lengths.
    Theorem2Demo(DemoArgs),
    /// Recover the ramification of an algebra over k from admissible fields.
    Recover(RecoverArgs),
}

fn discriminant(s: &str) -> Result<i64, String> {
    parse::parse_discriminant(s).map_err(|e| e.to_string())
}

fn bound(s: &str) -> Result<u64, String> {
    parse::parse_bound(s).map_err(|e| e.to_string())
}

/// A parsed comma separated list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct List(pub Vec<u64>);

fn checkpoints(s: &str) -> Result<List, String> {
    parse::parse_checkpoints(s).map(List).map_err(|e| e.to_string())
}

fn prime_list(s: &str) -> Result<List, String> {
    parse::parse_prime_list(s).map(List).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = discriminant)]
    pub delta: i64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=64))]
    pub n: u64,
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// The default format.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = discriminant, default_value = "-4")]
    pub delta: i64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=8), default_value = "1")]
    pub n: u64,
    /// Bound on primes and squarefree integers, and on `|disc_f(B)|` for the
    /// algebra census.
    #[arg(long, value_parser = bound, default_value = "1e6")]
    pub x: u64,
    /// Comma separated, increasing; defaults to powers of ten up to `--x`.
    #[arg(long, value_parser = checkpoints)]
    pub checkpoints: Option<List>,
    #[arg(long, default_value = "8")]
    pub shards: usize,
    /// Count by recursive enumeration instead of the sharded sieve.
    #[arg(long)]
    pub enumerate: bool,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=24))]
    pub n: u64,
    /// Bound on `|delta|` for the splitting statistics.
    #[arg(long, value_parser = bound, default_value = "1e5")]
    pub disc_bound: u64,
    /// Add the empirical Linnik ratio of each `p_i`.
    #[arg(long)]
    pub linnik_report: bool,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = discriminant, default_value = "-4")]
    pub delta: i64,
    /// Rational primes split in k whose two primes ramify, e.g. `5,13`.
    #[arg(long, value_parser = prime_list)]
    pub pairs: List,
    #[arg(long, value_parser = bound, default_value = "200")]
    pub d_bound: u64,
    #[arg(long, value_parser = bound, default_value = "100")]
    pub p_bound: u64,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(String),
    Starved(String),
    Io(String),
}

impl std::error::Error for CliError {}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Starved(m) => write!(f, "bounds too small: {m}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Starved(_) => 4,
        }
    }
}

impl From<arithgeo::Error> for CliError {
    fn from(e: arithgeo::Error) -> Self {
        use arithgeo::Error as E;
        match e {
            E::VerificationFailed(_) => CliError::Verification(e.to_string()),
            E::NoAdmissibleField { .. } | E::CapExceeded { .. } | E::CeilingExceeded { .. } => {
                CliError::Starved(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub data: String,
    pub manifest: Map<String, Value>,
}

impl Report {
    pub fn manifest_json(&self) -> String {
        serde_json::to_string(&self.manifest).expect("manifest serializes")
    }
}

/// Twelve significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    if (-5..15).contains(&magnitude) {
        let decimals = (11 - magnitude).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.11e}")
    }
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn manifest(command: &str, columns: &[&str]) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(VERSION));
    m.insert("columns".into(), json!(columns));
    m
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::ConstructFields(a) => construct_fields(a),
        Command::Census(a) => census(a),
        Command::Theorem2Demo(a) => theorem2_demo(a),
        Command::Recover(a) => recover(a),
    }
}

/// Runs the command and writes data and manifest to their destinations.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let report = run(cli)?;
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match &cli.out {
        Some(path) => {
            std::fs::write(path, &report.data).map_err(io)?;
            let mut manifest_path = path.clone().into_os_string();
            manifest_path.push(".manifest.json");
            std::fs::write(manifest_path, report.manifest_json() + "\n").map_err(io)?;
        }
        None => {
            print!("{}", report.data);
            eprintln!("{}", report.manifest_json());
        }
    }
    Ok(())
}

const CONSTRUCT_COLUMNS: [&str; 8] = ["i", "prime", "root", "t", "x", "min_poly", "poly_disc", "disc_bound"];

#[derive(Serialize)]
struct FieldRow {
    i: usize,
    prime: u64,
    root: u64,
    t: u64,
    x: i64,
    min_poly: String,
    poly_disc: String,
    disc_bound: String,
}

fn field_rows(c: &Construction) -> Vec<FieldRow> {
    c.shifts
        .iter()
        .zip(&c.exts)
        .enumerate()
        .map(|(i, (s, e))| FieldRow {
            i: i + 1,
            prime: s.prime,
            root: s.root,
            t: s.t,
            x: s.x,
            min_poly: e.minimal_polynomial().to_string(),
            poly_disc: e.poly_discriminant().to_string(),
            disc_bound: e.disc_upper_bound().to_string(),
        })
        .collect()
}

pub fn construct_fields(a: &ConstructArgs) -> Result<Report, CliError> {
    let c = fieldforge::construct_fields(a.delta, a.n as usize)?;
    let rows = field_rows(&c);
    let cert = &c.certificate;
    let mut m = manifest("construct-fields", &CONSTRUCT_COLUMNS);
    m.insert("flag_delta".into(), json!(a.delta));
    m.insert("flag_n".into(), json!(a.n));
    m.insert("format".into(), json!(if a.json { "json" } else { "csv" }));
    m.insert("certified".into(), json!(cert.passes()));
    m.insert("disc_bound_ratio".into(), json!(fmt_f64(cert.disc_bound_ratio)));
    m.insert("split_prime_growth_ratio".into(), json!(fmt_f64(c.split_primes.growth_ratio)));
    let data = if a.json {
        let doc = json!({
            "delta": c.delta_k,
            "n": a.n,
            "fields": rows,
            "certificate": {
                "passes": cert.passes(),
                "non_galois": cert.non_galois,
                "norm_valuation_one": cert.norm_valuation_one,
                "compositum": cert.compositum,
                "disc_bounds": cert.disc_bounds.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                "disc_bound_ratio": fmt_f64(cert.disc_bound_ratio),
            },
        });
        serde_json::to_string_pretty(&doc).expect("serializes") + "\n"
    } else {
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.i.to_string(),
                    r.prime.to_string(),
                    r.root.to_string(),
                    r.t.to_string(),
                    r.x.to_string(),
                    r.min_poly.clone(),
                    r.poly_disc.clone(),
                    r.disc_bound.clone(),
                ]
            })
            .collect();
        csv_table(&CONSTRUCT_COLUMNS, &table)
    };
    Ok(Report { data, manifest: m })
}

const CENSUS_COLUMNS: [&str; 6] = ["x", "primes", "prime_ratio", "target_ratio", "squarefree", "squarefree_ratio"];

pub fn census(a: &CensusArgs) -> Result<Report, CliError> {
    let n = a.n as usize;
    let checkpoints = a.checkpoints.clone().map(|l| l.0).unwrap_or_else(|| census::decade_checkpoints(a.x));
    if let Some(&bad) = checkpoints.iter().find(|&&c| c > a.x || c < 100) {
        return Err(CliError::Usage(format!("checkpoint {bad} outside [100, {}]", a.x)));
    }
    if checkpoints.is_empty() {
        return Err(CliError::Usage(format!("--x {} leaves no checkpoint of at least 100", a.x)));
    }
    let construction = fieldforge::construct_fields(a.delta, n)?;
    let pred = PrimePredicate::new(a.delta, construction.exts)?;
    log::info!("sieving membership up to {}", a.x);
    let table = pred.membership_table(a.x);
    let density = census::prime_density_report(&table, &checkpoints)?;
    let mode = if a.enumerate { CountMode::Enumerate } else { CountMode::Sieve { shards: a.shards } };
    let counts: Vec<(u64, u64)> = checkpoints
        .iter()
        .map(|&x| {
            log::info!("counting squarefree integers up to {x}");
            (x, squarefree::count_squarefree(&table, x, mode))
        })
        .collect();
    let tau = 0.5f64.powi(2 * n as i32 + 1);
    let sq_ratio = |x: u64, count: u64| {
        let xf = x as f64;
        count as f64 / (xf * xf.ln().powf(tau - 1.0))
    };
    let rows: Vec<Vec<String>> = density
        .iter()
        .zip(&counts)
        .map(|(d, &(x, count))| {
            vec![
                x.to_string(),
                d.count.to_string(),
                fmt_f64(d.ratio),
                fmt_f64(tau),
                count.to_string(),
                fmt_f64(sq_ratio(x, count)),
            ]
        })
        .collect();

    let algebras = census::algebra_census(&pred, a.x as u128)?;
    let mut covolume_constant: f64 = 0.0;
    for b in &algebras.algebras {
        let v = volumes::kleinian_covolume(b, 1e-9)?;
        covolume_constant = covolume_constant.max(v.value / b.discriminant_norm() as f64);
    }

    let mut m = manifest("census", &CENSUS_COLUMNS);
    m.insert("flag_delta".into(), json!(a.delta));
    m.insert("flag_n".into(), json!(a.n));
    m.insert("flag_x".into(), json!(a.x));
    m.insert("flag_shards".into(), json!(a.shards));
    m.insert("count_mode".into(), json!(if a.enumerate { "enumerate" } else { "sieve" }));
    m.insert("checkpoints".into(), json!(checkpoints));
    m.insert("shifts".into(), json!(pred.exts().iter().map(|e| e.x()).collect::<Vec<_>>()));
    m.insert("tau".into(), json!(fmt_f64(tau)));
    m.insert("algebras_disc_below_x".into(), json!(algebras.count));
    m.insert(
        "smallest_algebra_disc".into(),
        json!(algebras.algebras.iter().map(QuatAlgK::discriminant_norm).min().map(|d| d.to_string())),
    );
    m.insert(
        "covolume_constant".into(),
        json!((!algebras.algebras.is_empty()).then(|| fmt_f64(covolume_constant))),
    );
    match census::mean_value_fit(&counts, tau) {
        Ok(fit) => {
            m.insert("fit_c".into(), json!(fmt_f64(fit.c)));
            m.insert("fit_max_successive_drift".into(), json!(fmt_f64(fit.max_successive_drift)));
            m.insert("fit_residuals".into(), json!(fit.residuals.iter().map(|&r| fmt_f64(r)).collect::<Vec<_>>()));
        }
        Err(e) => {
            log::warn!("no mean value fit: {e}");
            m.insert("fit_c".into(), Value::Null);
        }
    }
    Ok(Report { data: csv_table(&CENSUS_COLUMNS, &rows), manifest: m })
}

/// `(n log 2n)^2`.
pub fn length_scale(n: usize) -> f64 {
    let nf = n as f64;
    (nf * (2.0 * nf).ln()).powi(2)
}

pub fn theorem2_demo(a: &DemoArgs) -> Result<Report, CliError> {
    let n = a.n as usize;
    let sel = primeforge::select_q_primes(n, DEFAULT_Q_CEILING)?;
    let shared = sel.q[n];
    let fields: Vec<QuadraticField> = sel.p.iter().map(|&p| QuadraticField::new(p as i64)).collect::<Result<_, _>>()?;
    let matrix = primeforge::verify_splitting_matrix(&sel.p, &sel.q)?;
    if !primeforge::has_selection_pattern(&matrix) {
        return Err(CliError::Verification(format!("splitting pattern of q = {:?} is wrong", sel.q)));
    }

    let mut header: Vec<String> = ["i", "p", "q", "ram"].map(String::from).to_vec();
    header.extend((1..=n).map(|j| format!("embeds_L{j}")));
    header.extend(["coarea_exact", "coarea", "length", "length_ratio"].map(String::from));
    if a.linnik_report {
        header.push("linnik_ratio".into());
    }
    let scale = length_scale(n);
    let mut rows = Vec::with_capacity(n);
    let mut max_length_ratio: f64 = 0.0;
    let mut max_coarea: f64 = 0.0;
    for i in 0..n {
        let b = QuatAlgQ::indefinite([sel.q[i], shared])?;
        let embeds: Vec<bool> = fields.iter().map(|l| b.embeds(l)).collect();
        for (j, &e) in embeds.iter().enumerate() {
            if e != (i == j) {
                return Err(CliError::Verification(format!("embeds(B_{}, Q(sqrt {})) = {e}", i + 1, sel.p[j])));
            }
        }
        let coarea = volumes::fuchsian_coarea(&b)?;
        let length = geodesics::geodesic_length_real_quadratic(sel.p[i])?.length;
        let ratio = length / scale;
        max_length_ratio = max_length_ratio.max(ratio);
        max_coarea = max_coarea.max(coarea.to_f64());
        let mut row = vec![
            (i + 1).to_string(),
            sel.p[i].to_string(),
            sel.q[i].to_string(),
            join(b.ram_finite()),
        ];
        row.extend(embeds.iter().map(bool::to_string));
        row.extend([coarea.to_string(), fmt_f64(coarea.to_f64()), fmt_f64(length), fmt_f64(ratio)]);
        if a.linnik_report {
            let lp = primeforge::nth_prime_in_ap(1, 4, i as u64 + 1)?;
            if lp.prime != sel.p[i] {
                return Err(CliError::Verification(format!("p_{} = {} disagrees with {}", i + 1, sel.p[i], lp.prime)));
            }
            row.push(fmt_f64(lp.linnik_ratio));
        }
        rows.push(row);
    }

    let inert: Vec<u64> = sel.q[..n].to_vec();
    let wood = census::wood_stats(shared, &inert, a.disc_bound)?;
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut m = manifest("theorem2-demo", &header_refs);
    m.insert("flag_n".into(), json!(a.n));
    m.insert("flag_disc_bound".into(), json!(a.disc_bound));
    m.insert("flag_linnik_report".into(), json!(a.linnik_report));
    m.insert("p".into(), json!(sel.p));
    m.insert("q".into(), json!(sel.q));
    m.insert("q_growth_exponent".into(), json!(sel.growth_exponent.map(fmt_f64)));
    m.insert("length_scale".into(), json!(fmt_f64(scale)));
    m.insert("max_length_ratio".into(), json!(fmt_f64(max_length_ratio)));
    m.insert(
        "coarea_growth_exponent".into(),
        json!((n > 1).then(|| fmt_f64(max_coarea.ln() / (n as f64 * (n as f64).ln())))),
    );
    m.insert("wood_split".into(), json!(shared));
    m.insert("wood_inert".into(), json!(inert));
    m.insert("wood_count".into(), json!(wood.count));
    m.insert("wood_predicted".into(), json!(fmt_f64(wood.predicted)));
    m.insert("wood_ratio".into(), json!(wood.ratio.map(fmt_f64)));
    Ok(Report { data: csv_table(&header_refs, &rows), manifest: m })
}

const RECOVER_COLUMNS: [&str; 5] = ["pairing", "recovered", "contains_pairing", "equality", "admissible_fields"];

pub fn recover(a: &RecoverArgs) -> Result<Report, CliError> {
    let k = QuadraticField::new(a.delta)?;
    for &p in &a.pairs.0 {
        if k.splitting(p)? != SplitType::Split {
            return Err(CliError::Usage(format!("{p} does not split in {k}")));
        }
    }
    let b = QuatAlgK::from_split_pairs(a.delta, a.pairs.0.iter().copied())?;
    let rec = quatalg::recover_ramification(&b, a.d_bound, a.p_bound)?;
    let pairing: BTreeSet<u64> = a.pairs.0.iter().copied().collect();
    let contains = pairing.is_subset(&rec.recovered);
    let equality = pairing == rec.recovered;
    let row = vec![
        join(&pairing),
        join(&rec.recovered),
        contains.to_string(),
        equality.to_string(),
        rec.admissible_fields.to_string(),
    ];
    let mut m = manifest("recover", &RECOVER_COLUMNS);
    m.insert("flag_delta".into(), json!(a.delta));
    m.insert("flag_pairs".into(), json!(a.pairs.0));
    m.insert("flag_d_bound".into(), json!(a.d_bound));
    m.insert("flag_p_bound".into(), json!(a.p_bound));
    m.insert("equality".into(), json!(equality));
    Ok(Report { data: csv_table(&RECOVER_COLUMNS, &[row]), manifest: m })
}
