//! Subcommand implementations. Each returns the process exit status.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use operad_core::certify::{certify_with, BoundBasis, PrimeRank};
use operad_core::dual::{annihilator, relation_space};
use operad_core::identity_dsl::preset_names;
use operad_core::{
    gk_defect, parse_identities, parse_identity, poincare, preset, RankCertificate,
    SparseRowMatrix, Verdict,
};
use serde::Serialize;

use crate::engine::{CliError, Ranks, Source};

pub const EXIT_DEFECT: u8 = 2;
pub const EXIT_UNCERTIFIED: u8 = 3;

const UNCERTIFIED: &str = "uncertified (upper bound for char 0)";

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("reports serialize")
    );
}

fn warn_small_prime(source: &Source, prime: u64) {
    if prime == 2 && source.is_preset {
        eprintln!("warning: the built-in operads are meant for characteristic other than 2; results mod 2 may differ");
    }
}

fn dump(matrix: &SparseRowMatrix, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    matrix
        .write_dump(BufWriter::new(file))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct DimRow {
    degree: usize,
    monomial_count: u64,
    row_count: u64,
    rank: u64,
    dim: u64,
    wall_time_ms: u64,
}

#[derive(Serialize)]
struct DimReport {
    operad: String,
    prime: u64,
    status: &'static str,
    results: Vec<DimRow>,
}

pub fn dim(
    ranks: &Ranks,
    source: &Source,
    degrees: &[usize],
    prime: u64,
    dump_to: Option<&Path>,
    json: bool,
) -> Result<u8, CliError> {
    warn_small_prime(source, prime);
    let mut results = Vec::new();
    for &n in degrees {
        let matrix = source.matrix(n)?;
        if let Some(path) = dump_to {
            dump(&matrix, path)?;
        }
        let r = ranks.record(source, &matrix, prime)?;
        results.push(DimRow {
            degree: n,
            monomial_count: r.monomial_count,
            row_count: r.row_count,
            rank: r.rank,
            dim: r.dim,
            wall_time_ms: r.wall_time_ms,
        });
    }
    let report = DimReport {
        operad: source.key.clone(),
        prime,
        status: UNCERTIFIED,
        results,
    };
    if json {
        print_json(&report);
        return Ok(0);
    }
    println!("operad {}, mod {}: {}", report.operad, prime, UNCERTIFIED);
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "n", "monomials", "rows", "rank", "dim", "ms"
    );
    for r in &report.results {
        println!(
            "{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}",
            r.degree, r.monomial_count, r.row_count, r.rank, r.dim, r.wall_time_ms
        );
    }
    Ok(0)
}

#[derive(Serialize)]
struct CertifyReport {
    operad: String,
    degree: usize,
    monomial_count: u64,
    row_count: u64,
    dim: u64,
    bound: BoundBasis,
    certificate: RankCertificate,
}

/// Certificate for one degree; also returns the matrix shape.
fn certificate(
    ranks: &Ranks,
    source: &Source,
    matrix: &SparseRowMatrix,
    bound: BoundBasis,
) -> Result<RankCertificate, CliError> {
    let max = matrix.max_abs_entry();
    if max > 1 {
        return Err(CliError::Usage(format!(
            "matrix entry of absolute value {max}: the bound r^(r/2) only covers entries in {{-1, 0, 1}}"
        )));
    }
    certify_with(matrix.degree(), matrix.n_cols() as u64, bound, |p| {
        ranks.record(source, matrix, p).map(|r| PrimeRank {
            rank: r.rank,
            millis: r.wall_time_ms,
        })
    })
}

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::Certified => "certified for characteristic 0",
        Verdict::LowerBoundOnly => "lower bound only: ranks disagree between primes",
        Verdict::Inconclusive => "inconclusive",
    }
}

pub fn certify(
    ranks: &Ranks,
    source: &Source,
    degree: usize,
    bound: BoundBasis,
    dump_to: Option<&Path>,
    json: bool,
) -> Result<u8, CliError> {
    let matrix = source.matrix(degree)?;
    if let Some(path) = dump_to {
        dump(&matrix, path)?;
    }
    let cert = certificate(ranks, source, &matrix, bound)?;
    let monomial_count = matrix.n_cols() as u64;
    let report = CertifyReport {
        operad: source.key.clone(),
        degree,
        monomial_count,
        row_count: matrix.n_rows() as u64,
        dim: monomial_count - cert.r,
        bound,
        certificate: cert,
    };
    let code = if report.certificate.verdict == Verdict::Certified {
        0
    } else {
        EXIT_UNCERTIFIED
    };
    if json {
        print_json(&report);
        return Ok(code);
    }
    let cert = &report.certificate;
    println!("operad   {}", report.operad);
    println!("degree   {}", report.degree);
    let relation = if cert.verdict == Verdict::Certified {
        "="
    } else {
        "<="
    };
    println!(
        "dim      {relation} {}   (rank {} of {} monomials, {} rows)",
        report.dim, cert.r, monomial_count, report.row_count
    );
    println!(
        "verdict  {} ({} primes, bound {})",
        verdict_text(cert.verdict),
        cert.primes.len(),
        if cert.bound_satisfied {
            "holds"
        } else {
            "fails"
        }
    );
    if !cert.primes.is_empty() {
        println!("{:>20} {:>8} {:>10}", "prime", "rank", "ms");
        for ((p, r), ms) in cert
            .primes
            .iter()
            .zip(&cert.per_prime_ranks)
            .zip(&cert.timings_ms)
        {
            println!("{p:>20} {r:>8} {ms:>10}");
        }
    }
    Ok(code)
}

#[derive(Serialize)]
struct DualReport {
    operad: String,
    relation_dim: usize,
    dual_relation_dim: usize,
    associative: bool,
    identities: Vec<String>,
    presentation: String,
}

pub fn dual(source: &Source, json: bool) -> Result<u8, CliError> {
    let space = relation_space(&source.identities)?;
    let (presentation, _) = source.dual()?;
    let report = DualReport {
        operad: source.key.clone(),
        relation_dim: space.dim(),
        dual_relation_dim: annihilator(&space).dim(),
        associative: presentation.associative,
        identities: presentation
            .identities
            .iter()
            .map(|id| id.to_string())
            .collect(),
        presentation: presentation.to_string(),
    };
    if json {
        print_json(&report);
    } else {
        println!("{}", report.presentation);
        eprintln!(
            "relations: {} of 12, dual relations: {} of 12",
            report.relation_dim, report.dual_relation_dim
        );
    }
    Ok(0)
}

#[derive(Serialize)]
struct Defect {
    degree: usize,
    coefficient: String,
}

#[derive(Serialize)]
struct GkReport {
    operad: String,
    max_degree: usize,
    prime: Option<u64>,
    certified: bool,
    dual: String,
    dims: Vec<u64>,
    dual_dims: Vec<u64>,
    g: String,
    g_dual: String,
    defect: String,
    first_defect: Option<Defect>,
}

/// Dimension in degree `n`, from one prime or certified. `None` when
/// certification fails.
fn dimension(
    ranks: &Ranks,
    source: &Source,
    n: usize,
    prime: u64,
    certify: Option<BoundBasis>,
) -> Result<Option<u64>, CliError> {
    let matrix = source.matrix(n)?;
    if let Some(bound) = certify {
        let cert = certificate(ranks, source, &matrix, bound)?;
        if cert.verdict != Verdict::Certified {
            eprintln!(
                "{} at degree {n}: {}",
                source.key,
                verdict_text(cert.verdict)
            );
            return Ok(None);
        }
        return Ok(Some(matrix.n_cols() as u64 - cert.r));
    }
    Ok(Some(ranks.record(source, &matrix, prime)?.dim))
}

pub fn gk(
    ranks: &Ranks,
    source: &Source,
    max_degree: usize,
    prime: u64,
    certify: Option<BoundBasis>,
    json: bool,
) -> Result<u8, CliError> {
    if certify.is_none() {
        warn_small_prime(source, prime);
    }
    let (presentation, dual_source) = source.dual()?;
    let mut dims = Vec::new();
    let mut dual_dims = Vec::new();
    let mut vanished = false;
    for n in 1..=max_degree {
        let Some(d) = dimension(ranks, source, n, prime, certify)? else {
            return Ok(EXIT_UNCERTIFIED);
        };
        dims.push(d);
        if vanished {
            dual_dims.push(0);
            continue;
        }
        let Some(d) = dimension(ranks, &dual_source, n, prime, certify)? else {
            return Ok(EXIT_UNCERTIFIED);
        };
        // a binary operad vanishing in one degree vanishes in all higher ones
        vanished = d == 0;
        dual_dims.push(d);
    }
    let series_err = |e: operad_core::series::SeriesError| CliError::Usage(e.to_string());
    let g = poincare(&dims, max_degree).map_err(series_err)?;
    let g_dual = poincare(&dual_dims, max_degree).map_err(series_err)?;
    let defect = gk_defect(&g, &g_dual, max_degree).map_err(series_err)?;
    let first_defect = defect.first_nonzero().map(|(degree, c)| Defect {
        degree,
        coefficient: c.to_string(),
    });
    let report = GkReport {
        operad: source.key.clone(),
        max_degree,
        prime: certify.is_none().then_some(prime),
        certified: certify.is_some(),
        dual: presentation.to_string(),
        dims,
        dual_dims,
        g: g.to_string(),
        g_dual: g_dual.to_string(),
        defect: defect.to_string(),
        first_defect,
    };
    let code = if report.first_defect.is_some() {
        EXIT_DEFECT
    } else {
        0
    };
    if json {
        print_json(&report);
        return Ok(code);
    }
    let status = if certify.is_some() {
        "certified for characteristic 0".to_string()
    } else {
        format!("mod {prime}, {UNCERTIFIED}")
    };
    println!("operad {} ({status})", report.operad);
    println!("dual   {}", report.dual);
    println!("{:>4} {:>10} {:>10}", "n", "dim P", "dim P!");
    for (n, (a, b)) in report.dims.iter().zip(&report.dual_dims).enumerate() {
        println!("{:>4} {a:>10} {b:>10}", n + 1);
    }
    println!("g_P(x)            = {} + O(x^{})", report.g, max_degree + 1);
    println!(
        "g_P!(x)           = {} + O(x^{})",
        report.g_dual,
        max_degree + 1
    );
    println!(
        "g_P(g_P!(x)) - x  = {} + O(x^{})",
        report.defect,
        max_degree + 1
    );
    match &report.first_defect {
        Some(d) => println!(
            "defect at degree {}: coefficient {}; the operad is not Koszul",
            d.degree, d.coefficient
        ),
        None => println!("no defect up to degree {max_degree}"),
    }
    Ok(code)
}

#[derive(Serialize)]
struct Linearized {
    input: String,
    linearized: String,
}

pub fn linearize(text: Option<&str>, file: Option<&Path>, json: bool) -> Result<u8, CliError> {
    let ids = match (text, file) {
        (Some(t), None) => vec![parse_identity(t)?],
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            parse_identities(&text)?
        }
        _ => {
            return Err(CliError::Usage(
                "give an identity or --identities, not both".into(),
            ))
        }
    };
    let mut out = Vec::new();
    for id in &ids {
        out.push(Linearized {
            input: id.to_string(),
            linearized: operad_core::linearize(id)?.to_string(),
        });
    }
    if json {
        print_json(&out);
    } else {
        for l in &out {
            println!("{}", l.linearized);
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct PresetEntry {
    name: String,
    identities: Vec<String>,
}

pub fn presets(json: bool) -> Result<u8, CliError> {
    let entries = preset_names()
        .into_iter()
        .map(|name| {
            let p = preset(name)?;
            Ok(PresetEntry {
                name: p.name,
                identities: p.identities.iter().map(|id| id.to_string()).collect(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    if json {
        print_json(&entries);
    } else {
        for e in &entries {
            println!("{}", e.name);
            for id in &e.identities {
                println!("    {id}");
            }
        }
    }
    Ok(0)
}
