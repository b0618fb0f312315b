//! Command-line surface over the `shuffles` library.
//!
//! Exit codes: 0 on success, 1 when a verification or equality assertion
//! fails, 2 on usage errors, 3 when a resource cap is exceeded.  All output
//! orderings are fixed, so identical invocations produce identical bytes;
//! `--jobs` only changes elapsed time.

use std::collections::BTreeSet;
use std::io::{self, Write};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use shuffles::complex::{Complex, ComplexKind};
use shuffles::path::{
    check_path_caps, count_delannoy, enumerate_delannoy_unbounded, is_schroder, DelannoyPath,
    SchroderKind,
};
use shuffles::poly::{first_difference, MultiPoly};
use shuffles::poset::{
    bub_poset, bub_poset_unbounded, shuf_poset, shuf_poset_unbounded, FinitePoset,
};
use shuffles::triangle::{
    bw_closed_gamma, bw_triangles, char_poly, extended_triangles, f_triangle, h_triangle,
    m_triangle, verify_identity, IdentityName, IdentityReport, Mode,
};
use shuffles::word::{
    cover_label, enumerate_words, enumerate_words_unbounded, in_degrees, interface_residue,
    shuf_rank, Letter, ShuffleWord,
};
use shuffles::{Error, Params};

#[derive(Parser)]
#[command(
    name = "shuffles",
    version,
    about = "Shuffle words, their bubble and shuffle orders, noncrossing complexes, \
             and the triangle polynomials that tie them together"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Shared `--m`/`--n` pair naming a parameter cell.
#[derive(Args)]
struct Cell {
    /// Number of x letters.
    #[arg(long)]
    m: usize,
    /// Number of y letters.
    #[arg(long)]
    n: usize,
}

impl Cell {
    fn params(&self) -> Params {
        Params::new(self.m, self.n)
    }
}

#[derive(Subcommand)]
enum Command {
    /// List every shuffle word with its rank, in-degree split, interface, and residue.
    Enumerate {
        #[command(flatten)]
        cell: Cell,
        /// Emit a JSON array instead of text lines.
        #[arg(long)]
        json: bool,
        /// Ignore the enumeration resource cap (prints a warning).
        #[arg(long)]
        force: bool,
    },
    /// Export the Hasse diagram of the bubble or shuffle order.
    Poset {
        /// Which order to build.
        #[arg(long, value_enum)]
        which: WhichPoset,
        #[command(flatten)]
        cell: Cell,
        /// Output format.
        #[arg(long, value_enum)]
        out: PosetFormat,
        /// Attach the cover labeling to each edge (bubble order only).
        #[arg(long)]
        labels: bool,
        /// Ignore the poset resource cap (prints a warning).
        #[arg(long)]
        force: bool,
    },
    /// Export a noncrossing complex or its f-vector.
    Complex {
        /// Which complex to build.
        #[arg(long, value_enum)]
        which: WhichComplex,
        #[command(flatten)]
        cell: Cell,
        /// Output format.
        #[arg(long, value_enum)]
        out: ComplexFormat,
        /// Ignore the complex resource cap (prints a warning).
        #[arg(long)]
        force: bool,
    },
    /// Print a triangle polynomial at one parameter cell.
    Triangle {
        /// Which polynomial to compute.
        #[arg(long, value_enum)]
        which: WhichTriangle,
        #[command(flatten)]
        cell: Cell,
        /// Use the closed formula.
        #[arg(long, group = "mode")]
        closed: bool,
        /// Use the definitional construction (the default).
        #[arg(long, group = "mode")]
        definitional: bool,
        /// Compute both and insist they agree; exit 1 on a mismatch.
        #[arg(long, group = "mode")]
        both: bool,
    },
    /// Check one identity, or all of them, at one parameter cell.
    Verify {
        /// Identity name, or "all".
        #[arg(long)]
        identity: String,
        #[command(flatten)]
        cell: Cell,
        /// Emit a JSON array of reports instead of text lines.
        #[arg(long)]
        json: bool,
    },
    /// Check identities on every cell with m + n at most the given bound.
    Sweep {
        /// Largest m + n to cover.
        #[arg(long = "max-r")]
        max_r: usize,
        /// Comma-separated identity names, or "all".
        #[arg(long)]
        identities: String,
        /// Worker threads for the cell grid; affects time only, never output.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Count or list colored Delannoy paths, optionally filtered to Schroder families.
    Paths {
        #[command(flatten)]
        cell: Cell,
        /// Number of diagonal step colors.
        #[arg(long)]
        q: usize,
        /// List each path, one per line, instead of printing the count.
        #[arg(long)]
        list: bool,
        /// Keep only large Schroder paths (peaks and diagonal steps weakly below the diagonal).
        #[arg(long, conflicts_with = "little")]
        schroder: bool,
        /// Keep only little Schroder paths (diagonal steps strictly below the diagonal).
        #[arg(long)]
        little: bool,
        /// Ignore the path enumeration caps (prints a warning).
        #[arg(long)]
        force: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichPoset {
    Bub,
    Shuf,
}

impl WhichPoset {
    fn name(self) -> &'static str {
        match self {
            WhichPoset::Bub => "bub",
            WhichPoset::Shuf => "shuf",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PosetFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichComplex {
    /// Noncrossing matchings with loops.
    Gamma,
    /// Loop-maximal faces only.
    #[value(name = "gamma+", alias = "gamma-plus")]
    GammaPlus,
    /// The bipartite variant with boundary sentinels.
    Delta,
    /// Sentinel-maximal faces only.
    #[value(name = "delta+", alias = "delta-plus")]
    DeltaPlus,
    /// Left-leaning loop-maximal faces (square cells only).
    #[value(name = "left", alias = "left-leaning")]
    Left,
}

impl WhichComplex {
    fn kind(self) -> ComplexKind {
        match self {
            WhichComplex::Gamma => ComplexKind::Gamma,
            WhichComplex::GammaPlus => ComplexKind::GammaPlus,
            WhichComplex::Delta => ComplexKind::Delta,
            WhichComplex::DeltaPlus => ComplexKind::DeltaPlus,
            WhichComplex::Left => ComplexKind::LeftLeaning,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ComplexFormat {
    Json,
    Fvector,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhichTriangle {
    H,
    F,
    M,
    Char,
    BwF,
    BwH,
    ExtH,
    ExtF,
}

impl WhichTriangle {
    fn name(self) -> &'static str {
        match self {
            WhichTriangle::H => "h",
            WhichTriangle::F => "f",
            WhichTriangle::M => "m",
            WhichTriangle::Char => "char",
            WhichTriangle::BwF => "bw-f",
            WhichTriangle::BwH => "bw-h",
            WhichTriangle::ExtH => "ext-h",
            WhichTriangle::ExtF => "ext-f",
        }
    }
}

enum CliError {
    Core(Error),
    Io(io::Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> CliError {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::CapExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Enumerate { cell, json, force } => cmd_enumerate(cell.params(), json, force),
        Command::Poset {
            which,
            cell,
            out,
            labels,
            force,
        } => cmd_poset(which, cell.params(), out, labels, force),
        Command::Complex {
            which,
            cell,
            out,
            force,
        } => cmd_complex(which, cell.params(), out, force),
        Command::Triangle {
            which,
            cell,
            closed,
            definitional: _,
            both,
        } => cmd_triangle(which, cell.params(), closed, both),
        Command::Verify {
            identity,
            cell,
            json,
        } => cmd_verify(&identity, cell.params(), json),
        Command::Sweep {
            max_r,
            identities,
            jobs,
        } => cmd_sweep(max_r, &identities, jobs),
        Command::Paths {
            cell,
            q,
            list,
            schroder,
            little,
            force,
        } => cmd_paths(cell.params(), q, list, schroder, little, force),
    }
}

fn warn_force(force: bool) {
    if force {
        eprintln!("warning: resource caps disabled by --force");
    }
}

fn fmt_letter_set(set: &BTreeSet<Letter>) -> String {
    let body: Vec<String> = set.iter().map(Letter::to_string).collect();
    format!("{{{}}}", body.join(", "))
}

fn letter_strings(set: &BTreeSet<Letter>) -> Vec<String> {
    set.iter().map(Letter::to_string).collect()
}

fn emit_json(out: &mut impl Write, value: &Value) -> io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializing an in-memory value");
    writeln!(out, "{text}")
}

fn cmd_enumerate(p: Params, json: bool, force: bool) -> Result<ExitCode, CliError> {
    warn_force(force);
    let words = if force {
        enumerate_words_unbounded(p)
    } else {
        enumerate_words(p)?
    };
    let mut out = io::BufWriter::new(io::stdout().lock());
    if json {
        let rows: Vec<Value> = words
            .iter()
            .map(|w| {
                let (a, b) = in_degrees(w, p);
                let (interface, residue) = interface_residue(w);
                json!({
                    "word": w.to_string(),
                    "rank": shuf_rank(w, p),
                    "in": { "transpositions": a, "right_indels": b },
                    "interface": letter_strings(&interface),
                    "residue": letter_strings(&residue),
                })
            })
            .collect();
        emit_json(&mut out, &Value::Array(rows))?;
    } else {
        for w in &words {
            let (a, b) = in_degrees(w, p);
            let (interface, residue) = interface_residue(w);
            writeln!(
                out,
                "{w}  rank={}  in=({a},{b})  interface={}  residue={}",
                shuf_rank(w, p),
                fmt_letter_set(&interface),
                fmt_letter_set(&residue),
            )?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_poset(
    which: WhichPoset,
    p: Params,
    format: PosetFormat,
    labels: bool,
    force: bool,
) -> Result<ExitCode, CliError> {
    if labels && !matches!(which, WhichPoset::Bub) {
        return Err(CliError::Usage(
            "--labels applies only to the bubble order".into(),
        ));
    }
    warn_force(force);
    let poset: FinitePoset<ShuffleWord> = match (which, force) {
        (WhichPoset::Bub, false) => bub_poset(p)?,
        (WhichPoset::Bub, true) => bub_poset_unbounded(p)?,
        (WhichPoset::Shuf, false) => shuf_poset(p)?,
        (WhichPoset::Shuf, true) => shuf_poset_unbounded(p)?,
    };
    let covers = poset.covers();
    let mut label_of = Vec::new();
    if labels {
        for &(lo, hi) in &covers {
            label_of.push(cover_label(poset.element(lo), poset.element(hi), p)?.to_string());
        }
    }
    let mut out = io::BufWriter::new(io::stdout().lock());
    match format {
        PosetFormat::Dot => {
            writeln!(out, "digraph {{")?;
            writeln!(out, "  rankdir=BT;")?;
            for w in poset.elements() {
                writeln!(out, "  \"{w}\";")?;
            }
            for (k, &(lo, hi)) in covers.iter().enumerate() {
                let (lower, upper) = (poset.element(lo), poset.element(hi));
                if labels {
                    writeln!(
                        out,
                        "  \"{lower}\" -> \"{upper}\" [label=\"{}\"];",
                        label_of[k]
                    )?;
                } else {
                    writeln!(out, "  \"{lower}\" -> \"{upper}\";")?;
                }
            }
            writeln!(out, "}}")?;
        }
        PosetFormat::Json => {
            let elements: Vec<String> = poset
                .elements()
                .iter()
                .map(ShuffleWord::to_string)
                .collect();
            let cover_rows: Vec<Value> = covers.iter().map(|&(lo, hi)| json!([lo, hi])).collect();
            let mut obj = json!({
                "which": which.name(),
                "m": p.m,
                "n": p.n,
                "elements": elements,
                "covers": cover_rows,
            });
            if labels {
                obj["labels"] = Value::from(label_of);
            }
            emit_json(&mut out, &obj)?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_complex(
    which: WhichComplex,
    p: Params,
    format: ComplexFormat,
    force: bool,
) -> Result<ExitCode, CliError> {
    warn_force(force);
    let kind = which.kind();
    let c = if force {
        Complex::build_unbounded(kind, p)?
    } else {
        Complex::build(kind, p)?
    };
    let mut out = io::BufWriter::new(io::stdout().lock());
    match format {
        ComplexFormat::Fvector => {
            let f: Vec<String> = c.f_vector().iter().map(u64::to_string).collect();
            writeln!(out, "{}", f.join(" "))?;
        }
        ComplexFormat::Json => {
            let vertices: Vec<String> = c.vertices().iter().map(|v| v.to_string()).collect();
            let facets: Vec<Value> = c
                .facet_label_sets()
                .into_iter()
                .map(|facet| {
                    Value::from(facet.iter().map(|v| v.to_string()).collect::<Vec<String>>())
                })
                .collect();
            emit_json(
                &mut out,
                &json!({
                    "kind": kind.name(),
                    "m": p.m,
                    "n": p.n,
                    "vertices": vertices,
                    "facets": facets,
                }),
            )?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

/// Computes the requested triangle in one mode.  The extended pair is
/// definitional by nature and reports `Unsupported` in closed mode.
fn triangle_in_mode(which: WhichTriangle, p: Params, mode: Mode) -> Result<MultiPoly, Error> {
    match which {
        WhichTriangle::H => h_triangle(p, mode),
        WhichTriangle::F => f_triangle(p, mode),
        WhichTriangle::M => m_triangle(p, mode),
        WhichTriangle::Char => char_poly(p, mode),
        WhichTriangle::BwF | WhichTriangle::BwH => {
            let (f, h) = match mode {
                Mode::Definitional => bw_triangles(&Complex::build(ComplexKind::Gamma, p)?),
                Mode::Closed => bw_closed_gamma(p)?,
            };
            Ok(if which == WhichTriangle::BwF { f } else { h })
        }
        WhichTriangle::ExtH | WhichTriangle::ExtF => match mode {
            Mode::Definitional => {
                let (f, h) = extended_triangles(p)?;
                Ok(if which == WhichTriangle::ExtF { f } else { h })
            }
            Mode::Closed => Err(Error::Unsupported(
                "the extended triangles have no closed form",
            )),
        },
    }
}

fn cmd_triangle(
    which: WhichTriangle,
    p: Params,
    closed: bool,
    both: bool,
) -> Result<ExitCode, CliError> {
    let mut out = io::BufWriter::new(io::stdout().lock());
    let code = if both {
        let definitional = triangle_in_mode(which, p, Mode::Definitional)?;
        let closed_form = triangle_in_mode(which, p, Mode::Closed)?;
        if definitional == closed_form {
            writeln!(out, "{definitional}")?;
            ExitCode::SUCCESS
        } else {
            let at = first_difference(&definitional, &closed_form)
                .expect("unequal polynomials differ somewhere");
            eprintln!(
                "FAIL: {} {p}: definitional and closed forms disagree at exponents {at:?}: \
                 {} vs {}",
                which.name(),
                definitional.coef(&at),
                closed_form.coef(&at),
            );
            ExitCode::from(1)
        }
    } else {
        let mode = if closed {
            Mode::Closed
        } else {
            Mode::Definitional
        };
        writeln!(out, "{}", triangle_in_mode(which, p, mode)?)?;
        ExitCode::SUCCESS
    };
    out.flush()?;
    Ok(code)
}

/// Splits a `--identity`/`--identities` argument: `all` expands to every
/// known name, otherwise a comma-separated list of names.
fn parse_identity_list(arg: &str) -> Result<Vec<IdentityName>, CliError> {
    if arg.trim() == "all" {
        return Ok(IdentityName::ALL.to_vec());
    }
    let mut names = Vec::new();
    for piece in arg.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        names.push(IdentityName::parse(piece)?);
    }
    if names.is_empty() {
        return Err(CliError::Usage("no identity names given".into()));
    }
    Ok(names)
}

fn report_json(r: &IdentityReport) -> Value {
    json!({
        "identity": r.name.name(),
        "m": r.params.m,
        "n": r.params.n,
        "pass": r.pass,
        "witness": r.witness.as_ref().map(|w| json!({
            "point": w.point,
            "lhs": w.lhs,
            "rhs": w.rhs,
        })),
    })
}

fn cmd_verify(identity: &str, p: Params, json: bool) -> Result<ExitCode, CliError> {
    let names = parse_identity_list(identity)?;
    let mut reports = Vec::with_capacity(names.len());
    for name in names {
        reports.push(verify_identity(name, p)?);
    }
    let all_pass = reports.iter().all(|r| r.pass);
    let mut out = io::BufWriter::new(io::stdout().lock());
    if json {
        let rows: Vec<Value> = reports.iter().map(report_json).collect();
        emit_json(&mut out, &Value::Array(rows))?;
    } else {
        for r in &reports {
            writeln!(out, "{}", r.line())?;
        }
    }
    out.flush()?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_sweep(max_r: usize, identities: &str, jobs: usize) -> Result<ExitCode, CliError> {
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let names = parse_identity_list(identities)?;
    let cells: Vec<Params> = (0..=max_r)
        .flat_map(|r| (0..=r).map(move |m| Params::new(m, r - m)))
        .collect();

    // Workers race over a shared cursor; results land in per-cell slots so
    // the report below comes out in canonical cell order regardless of jobs.
    type CellSlot = Mutex<Option<Result<Vec<IdentityReport>, Error>>>;
    let slots: Vec<CellSlot> = cells.iter().map(|_| Mutex::new(None)).collect();
    let cursor = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(cells.len()).max(1) {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let reports = names
                    .iter()
                    .map(|&nm| verify_identity(nm, cells[i]))
                    .collect();
                *slots[i].lock().expect("no poisoned slots") = Some(reports);
            });
        }
    });

    let mut per_cell = Vec::with_capacity(cells.len());
    for slot in &slots {
        let reports = slot
            .lock()
            .expect("no poisoned slots")
            .take()
            .expect("every slot filled")?;
        per_cell.push(reports);
    }

    let mut out = io::BufWriter::new(io::stdout().lock());
    let mut checks = 0usize;
    let mut failures = 0usize;
    for (cell, reports) in cells.iter().zip(&per_cell) {
        let failing: Vec<&IdentityReport> = reports.iter().filter(|r| !r.pass).collect();
        checks += reports.len();
        failures += failing.len();
        writeln!(
            out,
            "{cell}: {} checks, {} fail",
            reports.len(),
            failing.len()
        )?;
        for r in failing {
            writeln!(out, "  {}", r.line())?;
        }
    }
    writeln!(
        out,
        "sweep: {} cells, {checks} checks, {failures} fail",
        cells.len()
    )?;
    out.flush()?;
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_paths(
    p: Params,
    q: usize,
    list: bool,
    schroder: bool,
    little: bool,
    force: bool,
) -> Result<ExitCode, CliError> {
    let filter = if schroder {
        Some(SchroderKind::Schroder)
    } else if little {
        Some(SchroderKind::LittleSchroder)
    } else {
        None
    };
    warn_force(force);
    let mut out = io::BufWriter::new(io::stdout().lock());
    if filter.is_none() && !list {
        // Pure count: the closed formula needs no enumeration, so no cap.
        writeln!(out, "{}", count_delannoy(p, q))?;
    } else {
        if filter.is_some() && p.m != p.n {
            return Err(Error::SquareOnly("the diagonal path families").into());
        }
        if !force {
            check_path_caps(p, q)?;
        }
        let kept: Vec<DelannoyPath> = enumerate_delannoy_unbounded(p, q)
            .into_iter()
            .filter(|path| match filter {
                None => true,
                Some(kind) => matches!(is_schroder(path, kind), Ok(true)),
            })
            .collect();
        if list {
            for path in &kept {
                writeln!(out, "{path}")?;
            }
        } else {
            writeln!(out, "{}", kept.len())?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
