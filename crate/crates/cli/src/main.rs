//! `pnext`: batch front end for pseudonorm extension.
//!
//! Exit status is 0 when every postcondition of the pipeline checks out,
//! 1 on a validation failure and 2 on malformed input.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use pnext::corpus::{
    abelian_groups_up_to, all_subgroups, random_divisible_pair, random_doubly_stochastic,
    random_pseudonorm, random_uniform_pair,
};
use pnext::extend::{
    chain_extend, prime_step_extend, ExtendedNorm, ExtensionProblem, RhoCertificate, DEFAULT_CAP,
};
use pnext::io::{
    to_json, BirkhoffOut, CollectionsFile, GroupFile, HomomorphismFile, Label, LatticeTableFile,
    MatrixFile, NormFile,
};
use pnext::lattice::LatticeCertificate;
use pnext::pseudonorm::pullback_norm;
use pnext::transversal::{birkhoff_decompose, p_fractional_transversal, transversal};
use pnext::winding::{discontinuity_report, sample_triangle};
use pnext::{
    lattice_extend, Error, LatticeBase, Pseudonorm, Rational, Rational64, Subgroup,
    UniformCollection,
};

#[derive(Parser)]
#[command(
    name = "pnext",
    version,
    about = "Exact pseudonorm extension on finite abelian groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the pseudonorm axioms on a norm file, optionally after pulling it
    /// back along a homomorphism.
    Validate {
        #[arg(long)]
        norm: PathBuf,
        /// Homomorphism file whose target carries the norm.
        #[arg(long)]
        homomorphism: Option<PathBuf>,
        /// Where to write the pulled-back norm.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extend a norm on H to G when pG ⊆ H.
    Extend {
        #[command(flatten)]
        input: ExtendInput,
        #[arg(long)]
        prime: u64,
    },
    /// Extend a norm on H to G through a chain of prime steps.
    ChainExtend {
        #[command(flatten)]
        input: ExtendInput,
    },
    /// Extend a norm on Z^n to the window points of (1/m)Z^n.
    LatticeExtend {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        denominator: u64,
        #[arg(long, value_enum)]
        base: BaseKind,
        /// Value table for `--base table`.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Points with every coordinate in [-window, window].
        #[arg(long)]
        window: i64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Transversal of two disjoint collections: uniform (`k`) or, with `--p`,
    /// meeting every set in |C|/p points.
    Transversal {
        #[arg(long)]
        collections: PathBuf,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Birkhoff decomposition of an exact doubly stochastic matrix.
    Birkhoff {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Winding norm table |e_k|, |2e_k| and a sampled triangle check.
    WindingDemo {
        #[arg(long, default_value_t = 20)]
        kmax: u32,
        /// Table CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Triangle summary CSV; defaults to `<out stem>_triangle.csv`.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Samples per k for the triangle check (k <= 5).
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Invariant checks over generated groups, norms, collections and matrices.
    Check {
        #[arg(long, default_value_t = 16)]
        max_order: u64,
        #[arg(long, default_value_t = 2)]
        norms: usize,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct ExtendInput {
    /// Group file; its subgroup generators (if any) must generate the norm's carrier.
    #[arg(long)]
    group: PathBuf,
    /// Which generator list to use when the group file lists several.
    #[arg(long, default_value_t = 0)]
    subgroup_index: usize,
    #[arg(long)]
    norm: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u32,
    #[command(flatten)]
    output: Output,
}

#[derive(clap::Args)]
struct Output {
    /// Norm JSON; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Value table CSV; defaults to `--out` with a `.csv` extension.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseKind {
    AbsSum,
    AbsMax,
    Table,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Display) -> Self {
        Self {
            code: 1,
            message: message.to_string(),
        }
    }

    fn malformed(message: impl Display) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonPositiveOrder
            | Error::GroupTooLarge(_)
            | Error::ElementOutOfRange { .. }
            | Error::MissingValue(_)
            | Error::ImageCount { .. }
            | Error::InvalidArgument(_)
            | Error::Parse(_) => Failure::malformed(e),
            _ => Failure::invalid(e),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::malformed(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome<()> {
    std::fs::write(path, text)
        .map_err(|e| Failure::malformed(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_failure = |e: csv::Error| Failure::malformed(format!("csv: {e}"));
    w.write_record(header).map_err(to_failure)?;
    for r in rows {
        w.write_record(r).map_err(to_failure)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::malformed(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

fn csv_path(output: &Output) -> Option<PathBuf> {
    output
        .csv
        .clone()
        .or_else(|| output.out.as_ref().map(|p| p.with_extension("csv")))
}

fn certificate_text(c: &RhoCertificate) -> String {
    format!(
        "x=u{}+c{:?} 0=v{}+d{:?}",
        c.x_rep.u, c.x_rep.counts, c.zero_rep.u, c.zero_rep.counts
    )
}

fn write_norm(
    norm: &Pseudonorm<Rational>,
    certificates: Option<&[RhoCertificate]>,
    output: &Output,
) -> Outcome<()> {
    emit(output.out.as_deref(), &NormFile::render(norm))?;
    if let Some(path) = csv_path(output) {
        let rows: Vec<Vec<String>> = norm
            .entries()
            .enumerate()
            .map(|(i, (x, v))| {
                vec![
                    x.to_string(),
                    v.to_string(),
                    certificates
                        .map(|c| certificate_text(&c[i]))
                        .unwrap_or_default(),
                ]
            })
            .collect();
        write(
            &path,
            &csv_text(&["element", "value", "certificate"], &rows)?,
        )?;
    }
    Ok(())
}

fn check_norm(norm: &Pseudonorm<Rational>, what: &str) -> Outcome<()> {
    let report = norm.validate();
    if report.is_ok() {
        Ok(())
    } else {
        Err(Failure::invalid(format!(
            "{what} fails validation: {}",
            report.summary()
        )))
    }
}

/// Group, selected subgroup and norm, checked against each other.
fn load_extension_input(input: &ExtendInput) -> Outcome<(Subgroup, Pseudonorm<Rational>)> {
    let group_file = GroupFile::parse(&read(&input.group)?)?;
    let group = group_file.group()?;
    let norm: Pseudonorm<Rational> = NormFile::parse(&read(&input.norm)?)?.pseudonorm()?;
    if norm.group() != &group {
        return Err(Failure::malformed(format!(
            "norm is over Z{:?}, group file describes Z{:?}",
            norm.group().orders(),
            group.orders()
        )));
    }
    if group_file.subgroup_count() > 0 {
        let h = group_file.subgroup(input.subgroup_index)?;
        if &h != norm.carrier() {
            return Err(Failure::invalid(format!(
                "norm is defined on {} elements, selected subgroup has {}",
                norm.carrier().len(),
                h.len()
            )));
        }
    }
    check_norm(&norm, "input norm")?;
    Ok((Subgroup::whole(&group), norm))
}

fn check_extension(ext: &Pseudonorm<Rational>, base: &Pseudonorm<Rational>) -> Outcome<()> {
    check_norm(ext, "extension")?;
    if !ext.agrees_on(base, base.carrier()) {
        return Err(Failure::invalid(
            "extension does not restrict to the input norm",
        ));
    }
    Ok(())
}

fn run_validate(norm: &Path, homomorphism: Option<&Path>, out: Option<&Path>) -> Outcome<()> {
    let norm: Pseudonorm<Rational> = NormFile::parse(&read(norm)?)?.pseudonorm()?;
    let report = norm.validate();
    for (x, y) in report.triangle_violations.iter().take(20) {
        eprintln!("violation: |{x} - {y}| > |{x}| + |{y}|");
    }
    if !report.is_ok() {
        return Err(Failure::invalid(format!(
            "norm fails validation: {}",
            report.summary()
        )));
    }
    let Some(h) = homomorphism else {
        println!("ok: {} elements", norm.carrier().len());
        return Ok(());
    };
    let h = HomomorphismFile::parse(&read(h)?)?.homomorphism()?;
    let pulled = pullback_norm(&h, &norm)?;
    check_norm(&pulled, "pullback")?;
    match out {
        Some(p) => {
            write(p, &NormFile::render(&pulled))?;
            println!("ok: pullback on {} elements", pulled.carrier().len());
        }
        None => print!("{}", NormFile::render(&pulled)),
    }
    Ok(())
}

fn run_extend(input: &ExtendInput, prime: u64) -> Outcome<()> {
    let (whole, base) = load_extension_input(input)?;
    let problem = ExtensionProblem::new(&whole, base.clone(), prime, input.cap)?;
    let ExtendedNorm { norm, certificates } = prime_step_extend(&problem)?;
    check_extension(&norm, &base)?;
    write_norm(&norm, Some(&certificates), &input.output)
}

fn run_chain_extend(input: &ExtendInput) -> Outcome<()> {
    let (whole, base) = load_extension_input(input)?;
    let chain = chain_extend(&whole, &base, input.cap)?;
    let mut previous = base.clone();
    for (i, step) in chain.steps.iter().enumerate() {
        if !step.norm.agrees_on(&previous, previous.carrier()) {
            return Err(Failure::invalid(format!(
                "chain step {i} changes earlier values"
            )));
        }
        previous = step.norm.clone();
    }
    check_extension(&chain.norm, &base)?;
    eprintln!("chain primes: {:?}", chain.plan.primes());
    let certificates = chain.steps.last().map(|s| s.certificates.as_slice());
    write_norm(&chain.norm, certificates, &input.output)
}

fn lattice_certificate_text(c: &LatticeCertificate) -> String {
    format!("x=u{}+c{:?} 0=v{}+d{:?}", c.u, c.counts_x, c.v, c.counts_y)
}

#[derive(Serialize)]
struct LatticeOut {
    dim: usize,
    denominator: u64,
    window: i64,
    values: Vec<(String, String)>,
}

#[allow(clippy::too_many_arguments)]
fn run_lattice_extend(
    dim: usize,
    denominator: u64,
    base: BaseKind,
    table: Option<&Path>,
    window: i64,
    cap: u32,
    output: &Output,
) -> Outcome<()> {
    let base: LatticeBase<Rational> = match (base, table) {
        (BaseKind::AbsSum, _) => LatticeBase::AbsSum,
        (BaseKind::AbsMax, _) => LatticeBase::AbsMax,
        (BaseKind::Table, Some(t)) => {
            let file = LatticeTableFile::parse(&read(t)?)?;
            if file.dim != dim {
                return Err(Failure::malformed("table dimension differs from --dim"));
            }
            file.base()?
        }
        (BaseKind::Table, None) => return Err(Failure::malformed("--base table needs --table")),
    };
    let ext = lattice_extend(dim, denominator, base.clone(), window, Some(cap))?;
    for (x, v, _) in &ext.values {
        if x.is_integral() {
            let ints: Vec<i64> = x.0.iter().map(|c| c.to_integer()).collect();
            if base.value(&ints)? != *v {
                return Err(Failure::invalid(format!("restriction fails at {x}")));
            }
        }
    }
    let json = LatticeOut {
        dim,
        denominator,
        window,
        values: ext
            .values
            .iter()
            .map(|(x, v, _)| (x.to_string(), v.to_string()))
            .collect(),
    };
    emit(output.out.as_deref(), &to_json(&json))?;
    if let Some(path) = csv_path(output) {
        let rows: Vec<Vec<String>> = ext
            .values
            .iter()
            .map(|(x, v, c)| {
                vec![
                    x.to_string(),
                    v.to_string(),
                    c.as_ref().map(lattice_certificate_text).unwrap_or_default(),
                ]
            })
            .collect();
        write(&path, &csv_text(&["point", "value", "certificate"], &rows)?)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TransversalOut {
    mode: &'static str,
    k: usize,
    transversal: Vec<Label>,
}

fn run_transversal(collections: &Path, p: Option<usize>, out: Option<&Path>) -> Outcome<()> {
    let file = CollectionsFile::parse(&read(collections)?)?;
    let (a, b) = (file.a_sets()?, file.b_sets()?);
    let (mode, k, picked) = match (p, file.k) {
        (Some(p), _) => ("fractional", p, p_fractional_transversal(&a, &b, p)?),
        (None, Some(k)) => {
            let ca = UniformCollection::new(k, a.clone())?;
            let cb = UniformCollection::new(k, b.clone())?;
            ("uniform", k, transversal(&ca, &cb)?)
        }
        (None, None) => return Err(Failure::malformed("collections file needs \"k\" or --p")),
    };
    let hits = |c: &BTreeSet<Label>| c.intersection(&picked).count();
    let ok = a.iter().chain(&b).all(|c| match mode {
        "uniform" => hits(c) == 1,
        _ => hits(c) * k == c.len(),
    });
    if !ok {
        return Err(Failure::invalid(
            "transversal misses its intersection counts",
        ));
    }
    let json = TransversalOut {
        mode,
        k,
        transversal: picked.into_iter().collect(),
    };
    emit(out, &to_json(&json))
}

fn run_birkhoff(matrix: &Path, out: Option<&Path>) -> Outcome<()> {
    let m = MatrixFile::parse(&read(matrix)?)?.matrix::<Rational>()?;
    let d = birkhoff_decompose(&m);
    let summary = BirkhoffOut::of(&d, &m);
    let positive = d
        .terms
        .iter()
        .all(|t| t.weight > Rational::from_integer(0.into()));
    if !summary.recomposes || !positive || d.weight_sum() != Rational::from_integer(1.into()) {
        return Err(Failure::invalid(
            "decomposition does not recompose the input",
        ));
    }
    emit(out, &to_json(&summary))
}

fn run_winding_demo(
    kmax: u32,
    out: Option<&Path>,
    summary: Option<&Path>,
    samples: usize,
    seed: u64,
) -> Outcome<()> {
    if kmax == 0 {
        return Err(Failure::malformed("--kmax must be at least 1"));
    }
    let rows: Vec<Vec<String>> = discontinuity_report::<f64>(kmax)
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                r.norm_e.to_string(),
                r.norm_2e.to_string(),
                2f64.powi(-(r.k as i32)).to_string(),
                r.ratio.to_string(),
            ]
        })
        .collect();
    let table = csv_text(
        &["k", "norm_e", "norm_2e", "two_pow_minus_k", "ratio"],
        &rows,
    )?;
    emit(out, &table)?;

    let summary_path = summary.map(Path::to_path_buf).or_else(|| {
        out.map(|p| {
            let stem = p.file_stem().unwrap_or_default().to_string_lossy();
            p.with_file_name(format!("{stem}_triangle.csv"))
        })
    });
    if let Some(path) = summary_path {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut worst = f64::NEG_INFINITY;
        for k in 1..=kmax.min(5) {
            let s = sample_triangle::<f64, _>(k, samples, 8.0, &mut rng);
            worst = worst.max(s.max_excess).max(s.max_identity_error);
            rows.push(vec![
                k.to_string(),
                s.samples.to_string(),
                s.max_excess.to_string(),
                s.max_identity_error.to_string(),
            ]);
        }
        write(
            &path,
            &csv_text(&["k", "samples", "max_excess", "max_identity_error"], &rows)?,
        )?;
        if worst > 1e-12 {
            return Err(Failure::invalid(format!(
                "triangle sample exceeds tolerance: {worst:e}"
            )));
        }
    }
    Ok(())
}

fn run_check(max_order: u64, norms: usize, instances: usize, seed: u64) -> Outcome<()> {
    type Q = Rational64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    let mut line = |name: &str, count: usize, bad: usize| {
        println!("{name}: {count} checked, {bad} failed");
        failures += bad;
    };

    let (mut steps, mut chains, mut bad_steps, mut bad_chains) = (0, 0, 0, 0);
    for g in abelian_groups_up_to(max_order) {
        let whole = Subgroup::whole(&g);
        for h in all_subgroups(&g) {
            for _ in 0..norms {
                let base: Pseudonorm<Q> = random_pseudonorm(&h, &mut rng, 12, 6);
                chains += 1;
                match chain_extend(&whole, &base, DEFAULT_CAP) {
                    Ok(c) if c.norm.validate().is_ok() && c.norm.agrees_on(&base, &h) => {}
                    _ => bad_chains += 1,
                }
                if h.len() == g.order() {
                    continue;
                }
                let p = pnext::group::prime_factors((g.order() / h.len()) as u64)[0];
                let Ok(problem) = ExtensionProblem::new(&whole, base.clone(), p, DEFAULT_CAP)
                else {
                    continue;
                };
                steps += 1;
                match prime_step_extend(&problem) {
                    Ok(e) if e.norm.validate().is_ok() && e.norm.agrees_on(&base, &h) => {}
                    _ => bad_steps += 1,
                }
            }
        }
    }
    line("prime-step extensions", steps, bad_steps);
    line("chain extensions", chains, bad_chains);

    let mut bad = 0;
    for i in 0..instances {
        let k = 1 + i % 4;
        let (a, b) = random_uniform_pair(&mut rng, k, 20);
        let ok = UniformCollection::new(k, a.clone())
            .and_then(|ca| Ok((ca, UniformCollection::new(k, b.clone())?)))
            .and_then(|(ca, cb)| transversal(&ca, &cb))
            .is_ok_and(|t| a.iter().chain(&b).all(|c| c.intersection(&t).count() == 1));
        bad += usize::from(!ok);
    }
    line("uniform transversals", instances, bad);

    let mut bad = 0;
    for i in 0..instances {
        let p = [2, 3, 5][i % 3];
        let (a, b) = random_divisible_pair(&mut rng, p, 20);
        let ok = p_fractional_transversal(&a, &b, p).is_ok_and(|t| {
            a.iter()
                .chain(&b)
                .all(|c| c.intersection(&t).count() * p == c.len())
        });
        bad += usize::from(!ok);
    }
    line("fractional transversals", instances, bad);

    let mut bad = 0;
    for i in 0..instances {
        let m = random_doubly_stochastic::<Q, _>(&mut rng, 1 + i % 8);
        let d = birkhoff_decompose(&m);
        let ok = d.weight_sum() == Q::from_integer(1)
            && d.recompose() == m.entries()
            && d.terms.len() <= m.positive_entries();
        bad += usize::from(!ok);
    }
    line("Birkhoff decompositions", instances, bad);

    let rows = discontinuity_report::<f64>(20);
    let bad = rows
        .iter()
        .filter(|r| (r.norm_2e - 2f64.powi(-(r.k as i32))).abs() > 1e-12 || r.norm_e <= 2.0)
        .count();
    line("winding rows", rows.len(), bad);

    if failures == 0 {
        Ok(())
    } else {
        Err(Failure::invalid(format!("{failures} checks failed")))
    }
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Validate {
            norm,
            homomorphism,
            out,
        } => run_validate(&norm, homomorphism.as_deref(), out.as_deref()),
        Command::Extend { input, prime } => run_extend(&input, prime),
        Command::ChainExtend { input } => run_chain_extend(&input),
        Command::LatticeExtend {
            dim,
            denominator,
            base,
            table,
            window,
            cap,
            output,
        } => run_lattice_extend(
            dim,
            denominator,
            base,
            table.as_deref(),
            window,
            cap,
            &output,
        ),
        Command::Transversal {
            collections,
            p,
            out,
        } => run_transversal(&collections, p, out.as_deref()),
        Command::Birkhoff { matrix, out } => run_birkhoff(&matrix, out.as_deref()),
        Command::WindingDemo {
            kmax,
            out,
            summary,
            samples,
            seed,
        } => run_winding_demo(kmax, out.as_deref(), summary.as_deref(), samples, seed),
        Command::Check {
            max_order,
            norms,
            instances,
            seed,
        } => run_check(max_order, norms, instances, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            for line in f.message.lines() {
                eprintln!("error: {line}");
            }
            ExitCode::from(f.code)
        }
    }
}
