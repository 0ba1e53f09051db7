//! Command line frontend for the classification library: enumerate the
//! strata of a datum with their specialization order, print the level-1
//! classification table, classify every matrix of the small-field model
//! by brute force, list automorphism invariants, and run a self test.
//!
//! Output is byte deterministic for fixed inputs.  Exit code 1 reports a
//! validation error (the message names the violated condition), exit
//! code 2 a refused resource guard.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use serde_json::json;

use fzip_core::bt1::{classify_bt1, display_of_fzip, dual_bt1, fzip_of_display, Display1};
use fzip_core::classical::{standard_classical, validate_classical};
use fzip_core::error::ZipError;
use fzip_core::field::{FqField, F};
use fzip_core::fzip::{
    classify_bruteforce, isomorphic_over, FZip, PowerKind, DEFAULT_EXT_BOUND,
};
use fzip_core::linalg::Mat;
use fzip_core::strata::{
    build_poset, enumerate_extended, ext_bruhat_leq, EmitFormat, SpecializationContext,
};
use fzip_core::weyl::word_string;
use fzip_core::zipdatum::{build_zip_datum, CocharacterType, GroupFamily};

#[derive(Parser)]
#[command(
    name = "fzip",
    version,
    about = "Classify filtered Frobenius modules with classical-group structure"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the strata of a datum and their specialization order.
    Strata(DatumArgs),
    /// Table of level-1 classes for a given height and dimension.
    Bt1(Bt1Args),
    /// Assign every invertible matrix over a small field to its stratum.
    Classify(ClassifyArgs),
    /// Automorphism invariants of each stratum of a datum.
    Aut(DatumArgs),
    /// Run the small-rank invariant suite; nonzero exit on any failure.
    Selftest,
}

#[derive(Args)]
struct DatumArgs {
    /// Group family: GL, SL, Sp, CSp, O, CO, U, or CU.
    #[arg(long)]
    family: String,
    /// Graded ranks: either sparse pairs "i:n_i" (negative weights
    /// allowed), or plain multiplicities from weight 0 up, comma separated.
    #[arg(long = "type", value_name = "TYPE", allow_hyphen_values = true)]
    type_vec: String,
    /// Multiplier weight, for the multiplier families when the type does
    /// not determine it.
    #[arg(long, allow_negative_numbers = true)]
    multiplier: Option<i64>,
    /// Output format: dot, json, or tsv.
    #[arg(long, default_value = "tsv")]
    format: String,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Bt1Args {
    /// Height of the classes (module rank).
    #[arg(long)]
    height: usize,
    /// Dimension of the classes (rank of the weight-0 part).
    #[arg(long)]
    dim: usize,
    /// Output format: json or tsv.
    #[arg(long, default_value = "tsv")]
    format: String,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Group family; only GL is supported by the brute-force model.
    #[arg(long, default_value = "GL")]
    family: String,
    /// Graded ranks, as for strata.
    #[arg(long = "type", value_name = "TYPE", allow_hyphen_values = true)]
    type_vec: String,
    /// Field size, a prime power.
    #[arg(long)]
    q: u64,
    /// Largest extension degree searched when matching orbits to strata.
    #[arg(long, default_value_t = DEFAULT_EXT_BOUND)]
    ext_bound: u32,
    /// Output format: json or tsv.
    #[arg(long, default_value = "tsv")]
    format: String,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Cmd::Selftest = cli.cmd {
        let (report, ok) = run_selftest();
        print!("{}", report);
        return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
    }
    let result = match &cli.cmd {
        Cmd::Strata(args) => run_strata(args),
        Cmd::Bt1(args) => run_bt1(args),
        Cmd::Classify(args) => run_classify(args),
        Cmd::Aut(args) => run_aut(args),
        Cmd::Selftest => unreachable!(),
    };
    let (text, out) = match result {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("error: {}", e);
            let code = match e {
                ZipError::Guard(_) => 2,
                _ => 1,
            };
            return ExitCode::from(code);
        }
    };
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("error: cannot write {}: {}", path.display(), e);
                return ExitCode::from(1);
            }
        }
        None => print!("{}", text),
    }
    ExitCode::SUCCESS
}

/// Graded ranks from the command line: sparse "i:n_i" pairs, or plain
/// multiplicities assigned to weights 0, 1, 2, ...
fn parse_type(s: &str) -> Result<Vec<(i64, usize)>, ZipError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(ZipError::Validation(format!(
            "type vector '{}' has an empty entry",
            s
        )));
    }
    let sparse = parts.iter().any(|p| p.contains(':'));
    let mut entries = Vec::new();
    if sparse {
        for p in &parts {
            let (i, c) = p.split_once(':').ok_or_else(|| {
                ZipError::Validation(format!(
                    "type entry '{}' is not of the form i:n_i",
                    p
                ))
            })?;
            let i: i64 = i.trim().parse().map_err(|_| {
                ZipError::Validation(format!("type entry '{}' has a bad weight", p))
            })?;
            let c: usize = c.trim().parse().map_err(|_| {
                ZipError::Validation(format!("type entry '{}' has a bad multiplicity", p))
            })?;
            entries.push((i, c));
        }
    } else {
        for (k, p) in parts.iter().enumerate() {
            let c: usize = p.parse().map_err(|_| {
                ZipError::Validation(format!("type entry '{}' is not a multiplicity", p))
            })?;
            if c > 0 {
                entries.push((k as i64, c));
            }
        }
    }
    if entries.is_empty() {
        return Err(ZipError::Validation("type vector is empty".into()));
    }
    Ok(entries)
}

fn parse_family(name: &str, n: usize) -> Result<GroupFamily, ZipError> {
    Ok(match name {
        "GL" => GroupFamily::Gl(n),
        "SL" => GroupFamily::Sl(n),
        "Sp" => GroupFamily::Sp(n),
        "CSp" => GroupFamily::CSp(n),
        "O" => GroupFamily::O(n),
        "CO" => GroupFamily::CO(n),
        "U" => GroupFamily::U(n),
        "CU" => GroupFamily::CU(n),
        other => {
            return Err(ZipError::Validation(format!(
                "unknown family '{}': expected GL, SL, Sp, CSp, O, CO, U, or CU",
                other
            )))
        }
    })
}

fn parse_datum(args: &DatumArgs) -> Result<fzip_core::zipdatum::ZipDatum, ZipError> {
    let entries = parse_type(&args.type_vec)?;
    let t = match args.multiplier {
        Some(d) => CocharacterType::with_multiplier(&entries, d),
        None => CocharacterType::new(&entries),
    };
    let family = parse_family(&args.family, t.total())?;
    if args.multiplier.is_some() && !family.has_multiplier() {
        return Err(ZipError::Validation(format!(
            "family {} takes no multiplier weight",
            args.family
        )));
    }
    build_zip_datum(family, &t)
}

fn parse_field(q: u64) -> Result<FqField, ZipError> {
    if q < 2 {
        return Err(ZipError::Validation(format!(
            "field size {} is not a prime power",
            q
        )));
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut e = 0u32;
    let mut v = 1u64;
    while v < q {
        v *= p;
        e += 1;
    }
    if v != q {
        return Err(ZipError::Validation(format!(
            "field size {} is not a prime power",
            q
        )));
    }
    FqField::new(p, e)
}

fn run_strata(args: &DatumArgs) -> Result<(String, Option<PathBuf>), ZipError> {
    let format: EmitFormat = args.format.parse()?;
    let datum = parse_datum(args)?;
    let poset = build_poset(&datum)?;
    Ok((poset.emit(format), args.out.clone()))
}

fn run_bt1(args: &Bt1Args) -> Result<(String, Option<PathBuf>), ZipError> {
    let format: EmitFormat = args.format.parse()?;
    if format == EmitFormat::Dot {
        return Err(ZipError::Validation(
            "the level-1 table has no graph form: choose tsv or json".into(),
        ));
    }
    let table = classify_bt1(args.height, args.dim)?;
    let text = match format {
        EmitFormat::Tsv => {
            let mut out = String::from("w\tlength\taut_dim\tcodim\n");
            for c in &table {
                let w = c
                    .w
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\n",
                    w, c.length, c.aut_dim, c.length
                ));
            }
            out
        }
        EmitFormat::Json => {
            let classes: Vec<serde_json::Value> = table
                .iter()
                .map(|c| {
                    json!({
                        "w": c.w,
                        "length": c.length,
                        "aut_dim": c.aut_dim,
                        "codim": c.length,
                    })
                })
                .collect();
            let doc = json!({
                "height": args.height,
                "dim": args.dim,
                "classes": classes,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
            s.push('\n');
            s
        }
        EmitFormat::Dot => unreachable!(),
    };
    Ok((text, args.out.clone()))
}

fn run_classify(args: &ClassifyArgs) -> Result<(String, Option<PathBuf>), ZipError> {
    let format: EmitFormat = args.format.parse()?;
    if format == EmitFormat::Dot {
        return Err(ZipError::Validation(
            "the classification table has no graph form: choose tsv or json".into(),
        ));
    }
    let entries = parse_type(&args.type_vec)?;
    let t = CocharacterType::new(&entries);
    let family = parse_family(&args.family, t.total())?;
    if !matches!(family, GroupFamily::Gl(_)) {
        return Err(ZipError::Validation(
            "brute-force classification covers only the GL family".into(),
        ));
    }
    let field = parse_field(args.q)?;
    let c = classify_bruteforce(&field, &t, args.ext_bound)?;
    let text = match format {
        EmitFormat::Tsv => {
            let mut out = String::from("stratum\tword\tclass_size\n");
            for (i, w) in c.words.iter().enumerate() {
                out.push_str(&format!("{}\t{}\t{}\n", i, w, c.class_sizes[i]));
            }
            out
        }
        EmitFormat::Json => {
            let strata: Vec<serde_json::Value> = c
                .words
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    json!({
                        "stratum": i,
                        "word": w,
                        "class_size": c.class_sizes[i],
                    })
                })
                .collect();
            let doc = json!({
                "q": args.q,
                "lambda": c.lambda,
                "total_elements": c.elements.len(),
                "strata": strata,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
            s.push('\n');
            s
        }
        EmitFormat::Dot => unreachable!(),
    };
    Ok((text, args.out.clone()))
}

fn run_aut(args: &DatumArgs) -> Result<(String, Option<PathBuf>), ZipError> {
    let format: EmitFormat = args.format.parse()?;
    let datum = parse_datum(args)?;
    let poset = build_poset(&datum)?;
    let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
    let levi = |s: &fzip_core::strata::Stratum| -> Vec<usize> {
        s.aut.k_w.indices().iter().map(|&i| i + 1).collect()
    };
    let text = match format {
        EmitFormat::Tsv => {
            let mut out = String::from(
                "word\tomega\tlength\taut_dim\taut_lie_dim\tsmooth\tlevi_type\n",
            );
            for s in &poset.strata {
                let lv = levi(s)
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    word_string(&s.word),
                    s.rep.omega,
                    s.length,
                    opt(s.aut.aut_dim),
                    opt(s.aut.aut_lie_dim),
                    s.aut.smooth.map_or("-".to_string(), |b| b.to_string()),
                    if lv.is_empty() { "-".to_string() } else { lv },
                ));
            }
            out
        }
        EmitFormat::Json => {
            let strata: Vec<serde_json::Value> = poset
                .strata
                .iter()
                .map(|s| {
                    json!({
                        "word": word_string(&s.word),
                        "omega": s.rep.omega,
                        "length": s.length,
                        "aut_dim": s.aut.aut_dim,
                        "aut_lie_dim": s.aut.aut_lie_dim,
                        "smooth": s.aut.smooth,
                        "levi_type": levi(s),
                    })
                })
                .collect();
            let doc = json!({
                "family": datum.family.name(),
                "dim": datum.dim,
                "strata": strata,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
            s.push('\n');
            s
        }
        EmitFormat::Dot => {
            let mut out = String::new();
            out.push_str("digraph aut {\n  rankdir=BT;\n  node [shape=box];\n");
            for (i, s) in poset.strata.iter().enumerate() {
                out.push_str(&format!(
                    "  n{} [label=\"{}\\naut {}\"];\n",
                    i,
                    word_string(&s.word),
                    opt(s.aut.aut_dim)
                ));
            }
            for &(lo, hi) in &poset.hasse {
                out.push_str(&format!("  n{} -> n{};\n", lo, hi));
            }
            out.push_str("}\n");
            out
        }
    };
    Ok((text, args.out.clone()))
}

// ---- self test -------------------------------------------------------

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut num = 1usize;
    for i in 0..k {
        num = num * (n - i) / (i + 1);
    }
    num
}

fn sparse(entries: &[(i64, usize)]) -> CocharacterType {
    CocharacterType::new(entries)
}

fn two_part_type(d: usize, rest: usize) -> CocharacterType {
    let mut entries = Vec::new();
    if d > 0 {
        entries.push((0i64, d));
    }
    if rest > 0 {
        entries.push((1i64, rest));
    }
    sparse(&entries)
}

fn random_invertible(f: &FqField, n: usize, rng: &mut impl rand::Rng) -> Mat {
    loop {
        let mut g = Mat::zero(n, n);
        for r in 0..n {
            for c in 0..n {
                g.set(r, c, rng.gen_range(0..f.q) as F);
            }
        }
        if g.inverse(f).is_some() {
            return g;
        }
    }
}

/// The small catalog the order checks run over: every family, Weyl rank
/// at most 3.
fn selftest_catalog() -> Vec<(GroupFamily, CocharacterType)> {
    vec![
        (GroupFamily::Gl(2), sparse(&[(0, 1), (1, 1)])),
        (GroupFamily::Gl(3), sparse(&[(0, 1), (1, 2)])),
        (GroupFamily::Sl(2), sparse(&[(-1, 1), (1, 1)])),
        (GroupFamily::Sp(2), sparse(&[(-1, 1), (1, 1)])),
        (
            GroupFamily::CSp(4),
            CocharacterType::with_multiplier(&[(0, 2), (1, 2)], 1),
        ),
        (GroupFamily::O(3), sparse(&[(-1, 1), (0, 1), (1, 1)])),
        (GroupFamily::O(4), sparse(&[(-1, 1), (0, 2), (1, 1)])),
        (
            GroupFamily::CO(2),
            CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 1),
        ),
        (GroupFamily::U(3), sparse(&[(0, 2), (1, 1)])),
        (
            GroupFamily::CU(2),
            CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 2),
        ),
    ]
}

fn check_linear_stratum_counts() -> Result<(), String> {
    for n in 1..=4usize {
        for d in 0..=n {
            let t = two_part_type(d, n - d);
            let datum =
                build_zip_datum(GroupFamily::Gl(n), &t).map_err(|e| e.to_string())?;
            let poset = build_poset(&datum).map_err(|e| e.to_string())?;
            let fact = |k: usize| (1..=k).product::<usize>();
            let index = fact(n) / (fact(d) * fact(n - d));
            if poset.strata.len() != binomial(n, d) || index != binomial(n, d) {
                return Err(format!(
                    "GL({}) type ({}, {}): {} strata, coset index {}, expected {}",
                    n,
                    d,
                    n - d,
                    poset.strata.len(),
                    index,
                    binomial(n, d)
                ));
            }
        }
    }
    Ok(())
}

fn check_siegel_counts() -> Result<(), String> {
    for g in 1..=3usize {
        let t = CocharacterType::with_multiplier(&[(0, g), (1, g)], 1);
        let datum =
            build_zip_datum(GroupFamily::CSp(2 * g), &t).map_err(|e| e.to_string())?;
        let poset = build_poset(&datum).map_err(|e| e.to_string())?;
        if poset.strata.len() != 1 << g {
            return Err(format!(
                "CSp({}) Siegel: {} strata, expected {}",
                2 * g,
                poset.strata.len(),
                1 << g
            ));
        }
    }
    Ok(())
}

fn check_order_axioms() -> Result<(), String> {
    for (family, t) in selftest_catalog() {
        let datum = build_zip_datum(family, &t).map_err(|e| e.to_string())?;
        // build_poset re-verifies reflexivity, antisymmetry, transitivity
        // and length monotonicity internally and fails loudly.
        build_poset(&datum).map_err(|e| format!("{}: {}", datum.family.name(), e))?;
    }
    Ok(())
}

fn check_bruhat_implies_order() -> Result<(), String> {
    for (family, t) in selftest_catalog() {
        let datum = build_zip_datum(family, &t).map_err(|e| e.to_string())?;
        let elements = enumerate_extended(&datum).map_err(|e| e.to_string())?;
        let ctx = SpecializationContext::new(&datum).map_err(|e| e.to_string())?;
        for a in &elements {
            for b in &elements {
                if ext_bruhat_leq(&datum, a, b) && !ctx.precedes(a, b) {
                    return Err(format!(
                        "{}: Bruhat-comparable pair is not specialization-comparable",
                        datum.family.name()
                    ));
                }
            }
        }
    }
    Ok(())
}

fn check_split_shortcut() -> Result<(), String> {
    let mut used = 0;
    for (family, t) in selftest_catalog() {
        let datum = build_zip_datum(family, &t).map_err(|e| e.to_string())?;
        let ctx = SpecializationContext::new(&datum).map_err(|e| e.to_string())?;
        if !ctx.split_shortcut_applies() {
            continue;
        }
        used += 1;
        let elements = enumerate_extended(&datum).map_err(|e| e.to_string())?;
        for a in &elements {
            for b in &elements {
                if ctx.precedes(a, b) != ctx.precedes_split_shortcut(a, b) {
                    return Err(format!(
                        "{}: shortcut disagrees with the general order",
                        datum.family.name()
                    ));
                }
            }
        }
    }
    if used == 0 {
        return Err("no catalog datum admits the split shortcut".into());
    }
    Ok(())
}

fn check_tate_laws() -> Result<(), String> {
    for (p, e) in [(2u64, 1u32), (3, 1)] {
        let f = FqField::new(p, e).map_err(|e| e.to_string())?;
        let q = f.q;
        for a in -1..=2i64 {
            let ta = FZip::make_tate(&f, q, a).map_err(|e| e.to_string())?;
            let dual = ta.dual().map_err(|e| e.to_string())?;
            let t_neg = FZip::make_tate(&f, q, -a).map_err(|e| e.to_string())?;
            if isomorphic_over(&dual, &t_neg, 1)
                .map_err(|e| e.to_string())?
                .is_none()
            {
                return Err(format!("dual of the weight-{} unit is off", a));
            }
            for b in -1..=2i64 {
                let tb = FZip::make_tate(&f, q, b).map_err(|e| e.to_string())?;
                let prod = ta.tensor(&tb).map_err(|e| e.to_string())?;
                let t_sum = FZip::make_tate(&f, q, a + b).map_err(|e| e.to_string())?;
                if isomorphic_over(&prod, &t_sum, 1)
                    .map_err(|e| e.to_string())?
                    .is_none()
                {
                    return Err(format!("unit product {} + {} is off", a, b));
                }
            }
        }
    }
    Ok(())
}

fn check_power_ranks() -> Result<(), String> {
    let f = FqField::new(2, 1).map_err(|e| e.to_string())?;
    for n in 1..=3usize {
        let lambda: Vec<i64> = (0..n as i64).collect();
        let m = FZip::from_matrix_model(&f, 2, &lambda, &Mat::identity(n))
            .map_err(|e| e.to_string())?;
        for k in 0..=n + 2 {
            let alt = m
                .power(k, PowerKind::Alternating)
                .map_err(|e| e.to_string())?;
            let sym = m
                .power(k, PowerKind::Symmetric)
                .map_err(|e| e.to_string())?;
            if alt.rank() != binomial(n, k) {
                return Err(format!(
                    "alternating power rank {} at (n, k) = ({}, {})",
                    alt.rank(),
                    n,
                    k
                ));
            }
            if sym.rank() != binomial(n + k - 1, k) {
                return Err(format!(
                    "symmetric power rank {} at (n, k) = ({}, {})",
                    sym.rank(),
                    n,
                    k
                ));
            }
        }
    }
    Ok(())
}

fn check_biduality() -> Result<(), String> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let f = FqField::new(2, 1).map_err(|e| e.to_string())?;
    for _ in 0..10 {
        let n = rng.gen_range(1..=3usize);
        let lambda: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=2i64)).collect();
        let g = random_invertible(&f, n, &mut rng);
        let m = FZip::from_matrix_model(&f, 2, &lambda, &g).map_err(|e| e.to_string())?;
        let dd = m
            .dual()
            .and_then(|d| d.dual())
            .map_err(|e| e.to_string())?;
        if isomorphic_over(&m, &dd, 1)
            .map_err(|e| e.to_string())?
            .is_none()
        {
            return Err("a double dual is not isomorphic to the original".into());
        }
    }
    Ok(())
}

fn check_bt1_table() -> Result<(), String> {
    for n in 0..=6usize {
        for d in 0..=n {
            let table = classify_bt1(n, d).map_err(|e| e.to_string())?;
            if table.len() != binomial(n, d) {
                return Err(format!("table ({}, {}) has {} rows", n, d, table.len()));
            }
        }
    }
    let auts = |n: usize, d: usize| -> Vec<usize> {
        classify_bt1(n, d)
            .unwrap()
            .iter()
            .map(|c| c.aut_dim)
            .collect()
    };
    if auts(2, 1) != vec![1, 0] || auts(3, 1) != vec![2, 1, 0] {
        return Err("hand-checked automorphism dimensions are off".into());
    }
    for n in 1..=4usize {
        for d in 0..=n {
            let t = two_part_type(d, n - d);
            let datum =
                build_zip_datum(GroupFamily::Gl(n), &t).map_err(|e| e.to_string())?;
            let poset = build_poset(&datum).map_err(|e| e.to_string())?;
            let mut a: Vec<usize> = poset.strata.iter().map(|s| s.length).collect();
            let mut b: Vec<usize> = classify_bt1(n, d)
                .unwrap()
                .iter()
                .map(|c| c.length)
                .collect();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return Err(format!("length multisets differ at ({}, {})", n, d));
            }
        }
    }
    Ok(())
}

fn check_display_roundtrip() -> Result<(), String> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
    let f = FqField::new(2, 1).map_err(|e| e.to_string())?;
    for _ in 0..10 {
        let n = rng.gen_range(1..=3usize);
        let d = rng.gen_range(0..=n);
        let phi = random_invertible(&f, n, &mut rng);
        let dsp = Display1::new(f.clone(), n, d, phi).map_err(|e| e.to_string())?;
        let m = fzip_of_display(&dsp).map_err(|e| e.to_string())?;
        let back = display_of_fzip(&m).map_err(|e| e.to_string())?;
        let m2 = fzip_of_display(&back).map_err(|e| e.to_string())?;
        if m2 != m {
            return Err("display round trip changed the module".into());
        }
        if isomorphic_over(&m, &m2, 1)
            .map_err(|e| e.to_string())?
            .is_none()
        {
            return Err("display round trip lost the isomorphism class".into());
        }
        let dual = dual_bt1(&m).map_err(|e| e.to_string())?;
        let tc = m.type_of();
        let dc = dual.type_of();
        let at = |t: &BTreeMap<i64, usize>, i: i64| t.get(&i).copied().unwrap_or(0);
        if at(&tc, 0) != at(&dc, 1) || at(&tc, 1) != at(&dc, 0) {
            return Err("duality does not swap the graded ranks".into());
        }
    }
    Ok(())
}

fn check_classical_standards() -> Result<(), String> {
    let f2 = FqField::new(2, 1).map_err(|e| e.to_string())?;
    let f3 = FqField::new(3, 1).map_err(|e| e.to_string())?;
    let f5 = FqField::new(5, 1).map_err(|e| e.to_string())?;
    let f9 = FqField::new(3, 2).map_err(|e| e.to_string())?;
    let cases: Vec<(GroupFamily, FqField, u64, CocharacterType, usize)> = vec![
        (GroupFamily::Gl(2), f3.clone(), 3, sparse(&[(0, 1), (1, 1)]), 2),
        (GroupFamily::Sl(2), f3.clone(), 3, sparse(&[(-1, 1), (1, 1)]), 2),
        (GroupFamily::Sp(2), f3.clone(), 3, sparse(&[(-1, 1), (1, 1)]), 2),
        (
            GroupFamily::CSp(2),
            f3.clone(),
            3,
            CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 1),
            2,
        ),
        (
            GroupFamily::O(3),
            f3.clone(),
            3,
            sparse(&[(-1, 1), (0, 1), (1, 1)]),
            3,
        ),
        (
            GroupFamily::CO(2),
            f5.clone(),
            5,
            CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 1),
            2,
        ),
        (GroupFamily::U(2), f2.clone(), 2, sparse(&[(-1, 1), (1, 1)]), 4),
        (
            GroupFamily::CU(2),
            f9.clone(),
            3,
            CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 2),
            4,
        ),
    ];
    for (family, field, twist, t, size) in cases {
        let obj = standard_classical(family, &field, twist, &t, &Mat::identity(size))
            .map_err(|e| format!("{}: {}", family.name(), e))?;
        validate_classical(&obj).map_err(|e| format!("{}: {}", family.name(), e))?;
    }
    Ok(())
}

fn check_theta_rule() -> Result<(), String> {
    let cases: Vec<(GroupFamily, CocharacterType, usize)> = vec![
        (GroupFamily::O(2), sparse(&[(-1, 1), (1, 1)]), 1),
        (GroupFamily::O(2), sparse(&[(0, 2)]), 2),
        (GroupFamily::O(3), sparse(&[(-1, 1), (0, 1), (1, 1)]), 2),
        (
            GroupFamily::CO(4),
            CocharacterType::with_multiplier(&[(0, 1), (1, 2), (2, 1)], 2),
            2,
        ),
        (
            GroupFamily::CO(2),
            CocharacterType::with_multiplier(&[(0, 1), (1, 1)], 1),
            1,
        ),
    ];
    for (family, t, expect) in cases {
        let datum = build_zip_datum(family, &t).map_err(|e| e.to_string())?;
        if datum.theta_order != expect {
            return Err(format!(
                "{}: component order {} instead of {}",
                datum.family.name(),
                datum.theta_order,
                expect
            ));
        }
    }
    Ok(())
}

fn check_classify_partition() -> Result<(), String> {
    let f = FqField::new(2, 1).map_err(|e| e.to_string())?;
    for (t, expect_nonempty) in [
        (two_part_type(1, 1), 2usize),
        (two_part_type(1, 2), 3usize),
    ] {
        let c = classify_bruteforce(&f, &t, 4).map_err(|e| e.to_string())?;
        let total: usize = c.class_sizes.iter().sum();
        if total != c.elements.len() {
            return Err("class sizes do not partition the group".into());
        }
        if c.elements.iter().any(|e| e.stratum >= c.words.len()) {
            return Err("an element landed outside the stratum list".into());
        }
        let nonempty = c.class_sizes.iter().filter(|&&s| s > 0).count();
        if nonempty != expect_nonempty {
            return Err(format!(
                "{} nonempty strata instead of {}",
                nonempty, expect_nonempty
            ));
        }
    }
    Ok(())
}

fn run_selftest() -> (String, bool) {
    let checks: Vec<(&str, fn() -> Result<(), String>)> = vec![
        ("linear-stratum-counts", check_linear_stratum_counts),
        ("siegel-stratum-counts", check_siegel_counts),
        ("order-axioms", check_order_axioms),
        ("bruhat-implies-order", check_bruhat_implies_order),
        ("split-shortcut-agreement", check_split_shortcut),
        ("tate-laws", check_tate_laws),
        ("power-ranks", check_power_ranks),
        ("biduality", check_biduality),
        ("bt1-table", check_bt1_table),
        ("display-roundtrip", check_display_roundtrip),
        ("classical-standards", check_classical_standards),
        ("theta-rule", check_theta_rule),
        ("classify-partition", check_classify_partition),
    ];
    let mut out = String::new();
    let mut failed = 0;
    for (name, check) in &checks {
        match check() {
            Ok(()) => out.push_str(&format!("ok   {}\n", name)),
            Err(msg) => {
                failed += 1;
                out.push_str(&format!("FAIL {}: {}\n", name, msg));
            }
        }
    }
    out.push_str(&format!(
        "selftest: {} of {} checks passed\n",
        checks.len() - failed,
        checks.len()
    ));
    (out, failed == 0)
}
