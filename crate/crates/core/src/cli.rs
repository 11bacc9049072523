//! Command-line interface.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algebra::Group;
use crate::catalog::{
    self, build_instance, embedded, ingest, ingest_difference, write_atomic, write_built, write_design,
    write_difference, Availability, Catalog, Embedded, Resolver,
};
use crate::constructors::{construct_t2, construct_t3, construct_t4, construct_t5, Construction};
use crate::criteria::{format_rational, PairNonorthogonality};
use crate::error::{Error, Result};
use crate::generators::{
    dm_from_oa, dm_kronecker, dm_linear, dm_multiplication_table, normalize_dm, prepend_zero_column,
    rao_hamming_oa, search_difference_matrix, search_equidistant, select_distinct_row_columns, DifferenceMatrix,
    EquidistantDesign, SearchBudget, SearchOutcome,
};
use crate::matrix::DesignMatrix;
use crate::verify::{full_report, OptimalityReport};

/// Stdout writes that stop quietly when the reader goes away.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! sayln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "ssd", version, about = "Optimal mixed-level supersaturated designs")]
pub struct Cli {
    /// Seed for every randomised search.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory holding user-supplied source designs.
    #[arg(long, global = true, env = "SSD_SOURCES")]
    sources: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rao-Hamming strength-2 array L_{q^t}(q^{(q^t-1)/(q-1)}).
    Oa {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Difference matrix generators and transforms.
    #[command(subcommand)]
    Dm(DmCommand),
    /// Search for an alias-free equidistant design.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        q: u32,
        /// Defaults to the value forced by balance.
        #[arg(long)]
        lambda: Option<u64>,
        /// Allow repeated alias classes.
        #[arg(long)]
        allow_aliasing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kronecker-sum constructions.
    #[command(subcommand)]
    Construct(ConstructCommand),
    /// Print the optimality report of a design file.
    Verify {
        file: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// The selected-design catalog.
    #[command(subcommand)]
    Catalog(CatalogCommand),
    /// Nonorthogonality of columns i and j (1-based).
    Fnod { file: PathBuf, i: usize, j: usize },
}

#[derive(Debug, Args)]
struct DmOut {
    /// Keep this many columns (first column kept, rows pairwise distinct).
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum DmCommand {
    /// Strength-2 array file to difference matrix, with a zero column prepended.
    FromOa {
        file: PathBuf,
        #[arg(long)]
        group: Option<String>,
        #[command(flatten)]
        out: DmOut,
    },
    /// ND(q, q, q) from the multiplication table of GF(q).
    MultTable {
        #[arg(long)]
        q: u32,
        #[command(flatten)]
        out: DmOut,
    },
    /// ND(q^t, q^t, q) from inner products over GF(q)^t.
    Linear {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        t: u32,
        #[command(flatten)]
        out: DmOut,
    },
    /// Kronecker sum of two difference matrices.
    Kronecker {
        a: String,
        b: String,
        #[command(flatten)]
        out: DmOut,
    },
    /// Subtract the first column from every column.
    Normalize {
        file: String,
        #[command(flatten)]
        out: DmOut,
    },
    /// Seeded search for a normalized difference matrix with distinct rows.
    Search {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value_t = 200)]
        restarts: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ConstructOut {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Inputs are embedded table names (e.g. `table1_f`) or design files.
#[derive(Debug, Subcommand)]
enum ConstructCommand {
    T2 {
        #[arg(long)]
        f: String,
        #[arg(long)]
        d: String,
        #[command(flatten)]
        out: ConstructOut,
    },
    T3 {
        #[arg(long)]
        f1: String,
        #[arg(long)]
        f2: String,
        #[arg(long)]
        d: String,
        #[command(flatten)]
        out: ConstructOut,
    },
    T4 {
        #[arg(long)]
        f1: String,
        #[arg(long)]
        f2: String,
        #[command(flatten)]
        out: ConstructOut,
    },
    T5 {
        #[arg(long)]
        f1: String,
        #[arg(long)]
        f2: String,
        #[arg(long)]
        f3: String,
        #[arg(long)]
        f4: String,
        #[arg(long)]
        d3: String,
        #[arg(long)]
        d4: String,
        #[command(flatten)]
        out: ConstructOut,
    },
}

#[derive(Debug, Subcommand)]
enum CatalogCommand {
    /// List entries with the availability of their sources.
    List,
    /// Build one entry (`B2.01`) or one instance (`B2.01.k2`).
    Build {
        id: String,
        #[arg(long, default_value = "catalog-out")]
        out: PathBuf,
    },
    /// Build every instance whose sources are available.
    BuildAll {
        #[arg(long, default_value = "catalog-out")]
        out: PathBuf,
    },
}

/// Exit status for an error: 1 bad input, 2 failed verification, 3 missing source.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invalid(_) | Error::Parse { .. } | Error::Io { .. } => 1,
        Error::Precondition(_) | Error::Verification(_) | Error::Internal(_) => 2,
        Error::MissingSource { .. } => 3,
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// A source argument that is neither an embedded table nor an existing file.
fn require_file(spec: &str) -> Result<&Path> {
    let path = Path::new(spec);
    if path.exists() {
        Ok(path)
    } else {
        Err(Error::MissingSource {
            what: spec.to_string(),
            reference: "no embedded table or file by that name".to_string(),
        })
    }
}

fn load_design(spec: &str) -> Result<DesignMatrix> {
    match embedded(spec) {
        Ok(e) => e.design(),
        Err(_) => Ok(ingest(require_file(spec)?)?.design),
    }
}

fn load_equidistant(spec: &str) -> Result<EquidistantDesign> {
    let d = load_design(spec)?;
    EquidistantDesign::certify(d).map_err(|e| Error::precondition(format!("{spec}: {e}")))
}

fn load_dm(spec: &str) -> Result<DifferenceMatrix> {
    match embedded(spec) {
        Ok(Embedded::Difference(d)) => Ok(d),
        Ok(Embedded::Design(_)) => Err(Error::invalid(format!("{spec} is not a difference matrix"))),
        Err(_) => ingest_difference(require_file(spec)?),
    }
}

/// Cuts `d` down to `cols` columns with distinct rows when it has more.
fn fit_dm(d: DifferenceMatrix, cols: usize, name: &str) -> Result<DifferenceMatrix> {
    let d = if d.is_normalized() { d } else { normalize_dm(&d) };
    if d.cols() == cols {
        return Ok(d);
    }
    if d.cols() < cols {
        return Err(Error::precondition(format!("{name} has {} columns but {cols} are needed", d.cols())));
    }
    select_distinct_row_columns(&d, cols)
        .ok_or_else(|| Error::precondition(format!("no {cols} columns of {name} give distinct rows")))
}

fn render_report(report: &OptimalityReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Text => report.to_text(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json())
                .map_err(|e| Error::internal(format!("report serialization: {e}")))?;
            s.push('\n');
            s
        }
    })
}

fn emit_design(out: Option<&Path>, design: &DesignMatrix, metadata: &[String]) -> Result<()> {
    match out {
        Some(p) => write_design(p, design, metadata),
        None => {
            say!("{}", catalog::io::design_file(design, metadata).render());
            Ok(())
        }
    }
}

fn emit_dm(out: &DmOut, d: DifferenceMatrix, metadata: &[String]) -> Result<()> {
    let d = match out.cols {
        Some(c) => fit_dm(d, c, "the difference matrix")?,
        None => d,
    };
    match &out.out {
        Some(p) => write_difference(p, &d, metadata),
        None => {
            let mut meta = metadata.to_vec();
            meta.push(format!("declare: difference {}", d.group().name()));
            let file = catalog::DesignFile { matrix: d.matrix().clone(), levels: vec![d.q(); d.cols()], metadata: meta };
            say!("{}", file.render());
            Ok(())
        }
    }
}

fn finish_construction(c: &Construction, out: &ConstructOut, format: Format, inputs: &[&str]) -> Result<u8> {
    let mut meta = vec![format!("method: {}", c.plan.method), format!("shape: {}", c.design.shape())];
    meta.extend(inputs.iter().map(|s| format!("input: {s}")));
    if let Some(p) = &out.out {
        write_design(p, &c.design, &meta)?;
    }
    let text = render_report(&c.report, format)?;
    if let Some(p) = &out.report {
        write_atomic(p, &text)?;
    }
    say!("{text}");
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    let format = cli.format;
    match cli.command {
        Command::Oa { q, t, out } => {
            let oa = rao_hamming_oa(q, t)?;
            emit_design(out.as_deref(), &oa, &[format!("rao-hamming q={q} t={t}"), "declare: strength2".into()])?;
            Ok(0)
        }
        Command::Dm(cmd) => run_dm(cmd, cli.seed),
        Command::Search { n, m, q, lambda, allow_aliasing, out } => {
            if q == 0 || n < 2 || n % q as usize != 0 {
                return Err(Error::invalid(format!("q = {q} must divide n = {n}")));
            }
            let lambda = match lambda {
                Some(l) => l,
                None => {
                    let num = (m * (n / q as usize - 1)) as u64;
                    if num % (n as u64 - 1) != 0 {
                        return Err(Error::invalid(format!("no F({n}, {q}^{m}) can be equidistant")));
                    }
                    num / (n as u64 - 1)
                }
            };
            match search_equidistant(n, m, q, lambda, !allow_aliasing, SearchBudget::default(), cli.seed)? {
                SearchOutcome::Found(e) => {
                    let meta =
                        vec![format!("search seed {} lambda {lambda}", cli.seed), format!("declare: lambda {lambda}")];
                    emit_design(out.as_deref(), e.design(), &meta)?;
                    eprintln!("found {} with lambda {lambda}", e.design().shape());
                    Ok(0)
                }
                SearchOutcome::NotFound(why) => Err(Error::MissingSource {
                    what: format!("F({n}, {q}^{m}) with lambda {lambda}"),
                    reference: why,
                }),
            }
        }
        Command::Construct(cmd) => run_construct(cmd, format),
        Command::Verify { file, report } => {
            let design = ingest(&file)?.design;
            let r = full_report(&design)?;
            let text = render_report(&r, format)?;
            if let Some(p) = report {
                write_atomic(&p, &text)?;
            }
            say!("{text}");
            Ok(0)
        }
        Command::Catalog(cmd) => run_catalog(cmd, cli.sources, cli.seed),
        Command::Fnod { file, i, j } => {
            let design = ingest(&file)?.design;
            if i == 0 || j == 0 || i > design.m() || j > design.m() {
                return Err(Error::invalid(format!("columns are numbered 1..={}", design.m())));
            }
            let p = PairNonorthogonality::new(&design, i - 1, j - 1)?;
            let (qi, qj) = (design.levels()[i - 1], design.levels()[j - 1]);
            sayln!("f_NOD({i}, {j}) = {}", format_rational(&p.fnod));
            for a in 0..qi {
                let row: Vec<String> = (0..qj).map(|b| p.cell(a, b).to_string()).collect();
                sayln!("{}", row.join(" "));
            }
            Ok(0)
        }
    }
}

fn run_dm(cmd: DmCommand, seed: u64) -> Result<u8> {
    match cmd {
        DmCommand::FromOa { file, group, out } => {
            let ing = ingest(&file)?;
            let q = *ing.design.levels().first().ok_or_else(|| Error::invalid("empty array"))?;
            let g = match group {
                Some(name) => Group::parse(&name)?,
                None => Group::for_order(q)?,
            };
            let d = prepend_zero_column(&dm_from_oa(&ing.design, &g)?)?;
            emit_dm(&out, d, &[format!("from strength-2 array {}", file.display())])?;
        }
        DmCommand::MultTable { q, out } => emit_dm(&out, dm_multiplication_table(q)?, &[format!("GF({q}) multiplication table")])?,
        DmCommand::Linear { q, t, out } => emit_dm(&out, dm_linear(q, t)?, &[format!("linear over GF({q})^{t}")])?,
        DmCommand::Kronecker { a, b, out } => {
            let d = dm_kronecker(&load_dm(&a)?, &load_dm(&b)?)?;
            emit_dm(&out, d, &[format!("Kronecker sum of {a} and {b}")])?;
        }
        DmCommand::Normalize { file, out } => {
            let d = normalize_dm(&load_dm(&file)?);
            emit_dm(&out, d, &[format!("normalized {file}")])?;
        }
        DmCommand::Search { rows, cols, q, group, restarts, out } => {
            let g = match group {
                Some(name) => Group::parse(&name)?,
                None => Group::for_order(q)?,
            };
            if g.order() != q {
                return Err(Error::invalid(format!("{} does not have order {q}", g.name())));
            }
            let d = search_difference_matrix(rows, cols, &g, seed, restarts).ok_or_else(|| Error::MissingSource {
                what: format!("ND({rows}, {cols}, {q})"),
                reference: format!("search with seed {seed} and {restarts} restarts found nothing"),
            })?;
            let o = DmOut { cols: None, out };
            emit_dm(&o, d, &[format!("difference search seed {seed}")])?;
        }
    }
    Ok(0)
}

fn run_construct(cmd: ConstructCommand, format: Format) -> Result<u8> {
    match cmd {
        ConstructCommand::T2 { f, d, out } => {
            let c = construct_t2(&load_equidistant(&f)?, &load_dm(&d)?)?;
            finish_construction(&c, &out, format, &[&f, &d])
        }
        ConstructCommand::T3 { f1, f2, d, out } => {
            let e2 = load_equidistant(&f2)?;
            let dm = fit_dm(load_dm(&d)?, e2.n(), &d)?;
            let c = construct_t3(&load_equidistant(&f1)?, &e2, &dm)?;
            finish_construction(&c, &out, format, &[&f1, &f2, &d])
        }
        ConstructCommand::T4 { f1, f2, out } => {
            let c = construct_t4(&load_equidistant(&f1)?, &load_equidistant(&f2)?)?;
            finish_construction(&c, &out, format, &[&f1, &f2])
        }
        ConstructCommand::T5 { f1, f2, f3, f4, d3, d4, out } => {
            let e1 = load_equidistant(&f1)?;
            let e2 = load_equidistant(&f2)?;
            let dm3 = fit_dm(load_dm(&d3)?, e2.n(), &d3)?;
            let dm4 = fit_dm(load_dm(&d4)?, e1.n(), &d4)?;
            let c = construct_t5(&e1, &e2, &load_equidistant(&f3)?, &load_equidistant(&f4)?, &dm3, &dm4)?;
            finish_construction(&c, &out, format, &[&f1, &f2, &f3, &f4, &d3, &d4])
        }
    }
}

/// Requirements of an instance that no resolver route can meet.
fn missing(resolver: &mut Resolver, inst: &catalog::Instance) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for req in inst.requirements() {
        if !resolver.availability(req)?.usable() {
            out.push(req.to_string());
        }
    }
    Ok(out)
}

fn run_catalog(cmd: CatalogCommand, sources: Option<PathBuf>, seed: u64) -> Result<u8> {
    let cat = Catalog::builtin();
    let mut resolver = Resolver::new(sources, seed);
    match cmd {
        CatalogCommand::List => {
            for e in &cat.entry {
                let mut status = Vec::new();
                for inst in e.instances()? {
                    let avail: Vec<Availability> =
                        inst.requirements().into_iter().map(|r| resolver.availability(r)).collect::<Result<_>>()?;
                    let tag = if avail.iter().all(Availability::usable) { "available" } else { "external" };
                    status.push(match inst.k {
                        Some(k) => format!("k{k}:{tag}"),
                        None => tag.to_string(),
                    });
                }
                let flag = if e.erratum.is_some() { " [erratum]" } else { "" };
                sayln!(
                    "{}\t{}\t{}\t{}\t{} {}\t{}{flag}",
                    e.id,
                    e.table,
                    e.method,
                    e.shape,
                    e.criterion(),
                    e.value,
                    status.join(",")
                );
            }
            Ok(0)
        }
        CatalogCommand::Build { id, out } => {
            for inst in cat.select(&id)? {
                let built = build_instance(&inst, &mut resolver)?;
                write_sources(&out, &built)?;
                let path = write_built(&out, &built)?;
                sayln!("{}\t{}\tok\t{}", built.id, built.construction.design.shape(), path.display());
            }
            Ok(0)
        }
        CatalogCommand::BuildAll { out } => {
            let mut summary = String::new();
            let (mut ok, mut unavailable, mut failed) = (0, 0, 0);
            for inst in cat.instances()? {
                let id = inst.id();
                let miss = missing(&mut resolver, &inst)?;
                if !miss.is_empty() {
                    unavailable += 1;
                    let _ = writeln!(summary, "{id}\tunavailable\t{}", miss.join(" "));
                    continue;
                }
                match build_instance(&inst, &mut resolver) {
                    Ok(built) => {
                        ok += 1;
                        write_sources(&out, &built)?;
                        write_built(&out, &built)?;
                        let r = &built.construction.report;
                        let _ = writeln!(summary, "{id}\tbuilt\t{}\t{:016x}", r.shape, r.hash);
                    }
                    Err(Error::MissingSource { what, reference }) => {
                        unavailable += 1;
                        let _ = writeln!(summary, "{id}\tunavailable\t{what}: {reference}");
                    }
                    Err(e) => {
                        failed += 1;
                        let _ = writeln!(summary, "{id}\tFAILED\t{e}");
                    }
                }
            }
            let _ = writeln!(summary, "built {ok}, unavailable {unavailable}, failed {failed}");
            write_atomic(&out.join("summary.txt"), &summary)?;
            say!("{summary}");
            Ok(if failed > 0 { 2 } else { 0 })
        }
    }
}

/// Searched sources are written next to the outputs so builds can be replayed.
fn write_sources(out: &Path, built: &catalog::Built) -> Result<()> {
    for (req, res) in &built.sources {
        if res.availability == Availability::Searchable {
            let name = req.to_string().replace(['(', ')', ',', '^'], "_").replace(' ', "");
            let path = out.join("sources").join(format!("{}.design", name.trim_end_matches('_')));
            write_atomic(&path, &res.to_file().render())?;
        }
    }
    Ok(())
}
