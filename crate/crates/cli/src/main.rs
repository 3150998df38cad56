use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kuengine_core::ass::{e_infinity, matching_audit};
use kuengine_core::audit::{
    assoc_graded_audit, b_self_duality_audit, einfty_audit, ext_audit, free_part_audit, homology_shift_audit,
    margolis_audit, AuditReport,
};
use kuengine_core::chart::{AbelianPGroup, Chart};
use kuengine_core::k1::{bockstein_audit, family_accounting_audit, k1_dims};
use kuengine_core::ku::{build_a, build_b, build_s, even_part, odd_part, KuCohomology};
use kuengine_core::series::{cohomology_ps, free_part_ps, nonfree_ps, trivial_count};
use kuengine_core::Prime;
use serde::Serialize;

mod doc;
mod draw;

use doc::ChartDocument;
use draw::Drawing;

const PRIMES: [u32; 4] = [2, 3, 5, 7];

#[derive(Parser)]
#[command(name = "kuengine", version, about = "Connective K-theory of K(Z/p, 2): groups, charts, audits")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ku^n (or ku_n) as a sum of cyclic groups, one row per degree.
    Groups(GroupsArgs),
    /// A chart as JSON, SVG or TikZ.
    Chart(ChartArgs),
    /// Run a cross-check and print a JSON report; exit 1 if it fails.
    Audit(AuditArgs),
    /// Coefficients of a Poincaré series.
    Ps(PsArgs),
}

#[derive(Args)]
struct Common {
    /// One of 2, 3, 5, 7.
    #[arg(long, default_value_t = 2)]
    prime: u32,
    /// Write the output here (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long, allow_hyphen_values = true)]
    from: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<i64>,
    /// Degrees a..=b, written a:b.
    #[arg(long, conflicts_with_all = ["from", "to"], allow_hyphen_values = true)]
    window: Option<String>,
}

impl WindowArgs {
    fn resolve(&self, default: (i64, i64)) -> Result<(i64, i64)> {
        let (lo, hi) = match &self.window {
            Some(w) => {
                let (a, b) = w.split_once(':').ok_or_else(|| anyhow!("window must be a:b, got {w:?}"))?;
                (a.trim().parse()?, b.trim().parse()?)
            }
            None => (self.from.unwrap_or(default.0), self.to.unwrap_or(default.1)),
        };
        if lo > hi {
            bail!("empty window {lo}..{hi}");
        }
        Ok((lo, hi))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Svg,
    Tikz,
    Csv,
}

#[derive(Args)]
struct GroupsArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    window: WindowArgs,
    /// ku_n instead of ku^n.
    #[arg(long)]
    homology: bool,
    /// Add the Z/p's coming from the free summands of the cohomology.
    #[arg(long)]
    include_free: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ChartArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    window: WindowArgs,
    /// A:k, B:k, S:k:l, full-even, full-odd, full or einfty.
    #[arg(long, required_unless_present = "input")]
    module: Option<String>,
    /// Draw dots not also in this chart dashed, e.g. `--module A:5 --minus B:5`.
    #[arg(long)]
    minus: Option<String>,
    /// Read a chart JSON document instead of building one.
    #[arg(long, conflicts_with = "module")]
    input: Option<PathBuf>,
    /// Degree bound for full-even, full-odd, full.
    #[arg(long, default_value_t = 60)]
    max_degree: i64,
    /// Filtration bound for einfty.
    #[arg(long, default_value_t = 12)]
    max_s: u32,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Bockstein,
    Matching,
    Einfty,
    Duality,
    /// Kernel/cokernel family accounting of k(1) (odd primes).
    #[value(alias = "theorem61")]
    Families,
    Margolis,
    Ext,
    Ps,
    Assoc,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    which: Which,
    /// Degree bound.
    #[arg(long, visible_alias = "max-degree")]
    max: Option<i64>,
    /// Filtration bound (ext, matching).
    #[arg(long)]
    max_s: Option<u32>,
    /// Largest k for the B_k self-duality checks (default 4 for p <= 3, else 2).
    #[arg(long)]
    k: Option<u32>,
    /// Print only the failing rows.
    #[arg(long)]
    failures_only: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Series {
    Free,
    Cohomology,
    Nonfree,
    K1,
}

#[derive(Args)]
struct PsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "free")]
    series: Series,
    #[arg(long, default_value_t = 100)]
    max: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn prime(p: u32) -> Result<Prime> {
    if !PRIMES.contains(&p) {
        bail!("prime must be one of 2, 3, 5, 7 (got {p})");
    }
    Ok(Prime::new(p)?)
}

/// Writes to a sibling temporary file and renames it over `path`.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
        }
        Some(path) => {
            let name = path.file_name().ok_or_else(|| anyhow!("bad output path {}", path.display()))?;
            let mut tmp_name = std::ffi::OsString::from(".");
            tmp_name.push(name);
            tmp_name.push(format!(".{}.tmp", std::process::id()));
            let tmp = path.with_file_name(tmp_name);
            fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
            fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
        }
    }
    Ok(())
}

fn render_group(g: &AbelianPGroup) -> String {
    if g.is_trivial() {
        return "0".into();
    }
    g.exponents
        .iter()
        .map(|&e| match (g.p as u128).checked_pow(e) {
            Some(o) => format!("Z/{o}"),
            None => format!("Z/{}^{}", g.p, e),
        })
        .collect::<Vec<_>>()
        .join("+")
}

#[derive(Serialize)]
struct GroupRow {
    degree: i64,
    exponents: Vec<u32>,
    trivial: u64,
}

fn cmd_groups(a: &GroupsArgs) -> Result<String> {
    let p = prime(a.common.prime)?;
    let (lo, hi) = a.window.resolve((0, 40))?;
    let shift = if a.homology { p.homology_shift() } else { 0 };
    let ku = KuCohomology::new(p, hi.max(0) + shift)?;
    let mut rows = Vec::new();
    for n in lo..=hi {
        let g = if a.homology { ku.homology_group_at(n)? } else { ku.group_at(n)? };
        // the free summands contribute Z/p's in the top degree of each copy
        let trivial = if a.include_free { trivial_count(p, n + shift)? as u64 } else { 0 };
        rows.push((n, g, trivial));
    }
    Ok(match a.format {
        Format::Text => rows
            .iter()
            .map(|(n, g, t)| match (a.include_free, *t) {
                (true, t) if t > 0 => format!("{n}\t{}\tfree (Z/{})^{t}\n", render_group(g), p.get()),
                _ => format!("{n}\t{}\n", render_group(g)),
            })
            .collect(),
        Format::Json => {
            let json: Vec<GroupRow> = rows
                .into_iter()
                .map(|(degree, g, trivial)| GroupRow { degree, exponents: g.exponents, trivial })
                .collect();
            serde_json::to_string_pretty(&json)? + "\n"
        }
        _ => bail!("groups supports --format text|json"),
    })
}

fn parse_indices(sel: &str, parts: &[&str], n: usize) -> Result<Vec<u32>> {
    if parts.len() != n {
        bail!("selector {sel:?} needs {} index(es)", n);
    }
    parts.iter().map(|x| x.parse::<u32>().with_context(|| format!("bad index in selector {sel:?}"))).collect()
}

fn build_chart(p: Prime, sel: &str, max_degree: i64) -> Result<Chart> {
    let parts: Vec<&str> = sel.split(':').collect();
    Ok(match parts[0] {
        "A" => build_a(p, parse_indices(sel, &parts[1..], 1)?[0])?,
        "B" => build_b(p, parse_indices(sel, &parts[1..], 1)?[0])?,
        "S" => {
            let kl = parse_indices(sel, &parts[1..], 2)?;
            build_s(p, kl[0], kl[1])?
        }
        "full-even" => even_part(p, max_degree)?,
        "full-odd" => odd_part(p, max_degree)?,
        "full" => KuCohomology::new(p, max_degree)?.chart().clone(),
        _ => bail!("unknown module selector {sel:?} (A:k, B:k, S:k:l, full-even, full-odd, full, einfty)"),
    })
}

fn extent(chart: &Chart) -> (i64, i64) {
    (chart.min_degree().unwrap_or(0), chart.max_degree().unwrap_or(0))
}

fn cmd_chart(a: &ChartArgs) -> Result<String> {
    if a.module.as_deref() == Some("einfty") {
        let p = prime(a.common.prime)?;
        let (lo, hi) = a.window.resolve((0, a.max_degree))?;
        let run = e_infinity(p, hi, a.max_s)?;
        let lo = lo.max(run.trusted_n.0);
        let title = format!("E_infinity, p={}", p.get());
        let drawing = Drawing::from_run(&run, &title, [lo, hi], a.max_s.min(run.trusted_s));
        return match a.format {
            Format::Json => Ok(serde_json::to_string_pretty(&EinftyDocument::new(p, drawing))? + "\n"),
            Format::Svg => Ok(drawing.to_svg()),
            Format::Tikz => Ok(drawing.to_tikz()),
            _ => bail!("chart supports --format json|svg|tikz"),
        };
    }
    let (chart, module) = match (&a.input, &a.module) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let doc = ChartDocument::from_json(&text)?;
            (doc.to_chart()?, doc.module)
        }
        (None, Some(sel)) => (build_chart(prime(a.common.prime)?, sel, a.max_degree)?, sel.clone()),
        (None, None) => bail!("one of --module or --input is required"),
    };
    let p = chart.prime();
    let minus = match &a.minus {
        Some(sel) => Some(build_chart(p, sel, a.max_degree)?),
        None => None,
    };
    let (lo, hi) = a.window.resolve(extent(&chart))?;
    let title = format!("{module}, p={}", p.get());
    match a.format {
        Format::Json => ChartDocument::from_chart(&chart, &module).to_json(),
        Format::Svg => Ok(Drawing::from_chart(&chart, &title, [lo, hi], minus.as_ref()).to_svg()),
        Format::Tikz => Ok(Drawing::from_chart(&chart, &title, [lo, hi], minus.as_ref()).to_tikz()),
        _ => bail!("chart supports --format json|svg|tikz"),
    }
}

#[derive(Serialize)]
struct EinftyDocument {
    schema_version: u32,
    prime: u32,
    source: &'static str,
    #[serde(flatten)]
    drawing: Drawing,
}

impl EinftyDocument {
    fn new(p: Prime, drawing: Drawing) -> Self {
        EinftyDocument { schema_version: doc::SCHEMA_VERSION, prime: p.get(), source: "e-infinity-overlay", drawing }
    }
}

#[derive(Serialize)]
struct RowJson<'a> {
    degree: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    at: Option<&'a str>,
    lhs: u64,
    rhs: u64,
    pass: bool,
}

#[derive(Serialize)]
struct AuditJson<'a> {
    which: &'a str,
    prime: u32,
    pass: bool,
    checked: usize,
    failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    matching: Option<MatchingJson>,
    rows: Vec<RowJson<'a>>,
}

#[derive(Serialize)]
struct MatchingJson {
    towers_checked: usize,
    orphans: Vec<String>,
    doubles: Vec<String>,
}

fn which_name(w: Which) -> &'static str {
    match w {
        Which::Bockstein => "bockstein",
        Which::Matching => "matching",
        Which::Einfty => "einfty",
        Which::Duality => "duality",
        Which::Families => "families",
        Which::Margolis => "margolis",
        Which::Ext => "ext",
        Which::Ps => "ps",
        Which::Assoc => "assoc",
    }
}

fn merge(into: &mut AuditReport, from: AuditReport, tag: &str) {
    for mut row in from.rows {
        row.at = Some(match row.at {
            Some(at) => format!("{tag} {at}"),
            None => tag.to_string(),
        });
        into.push(row);
    }
}

/// Filtration bound used for E_infinity and matching: the top filtration of
/// the closed-form chart in range, plus a margin.
fn chart_s_top(p: Prime, n_hi: i64) -> Result<u32> {
    let ku = KuCohomology::new(p, n_hi)?;
    Ok(ku.chart().bidegree_counts(i64::MIN / 4, n_hi).keys().map(|k| k.1).max().unwrap_or(0) + 4)
}

fn cmd_audit(a: &AuditArgs) -> Result<(String, bool)> {
    let p = prime(a.common.prime)?;
    let mut matching = None;
    let report = match a.which {
        Which::Bockstein => bockstein_audit(p, a.max.unwrap_or(200))?,
        Which::Families => family_accounting_audit(p, a.max.unwrap_or(200))?,
        Which::Einfty => einfty_audit(p, a.max.unwrap_or(120))?,
        Which::Matching => {
            let n_hi = a.max.unwrap_or(120);
            let s = match a.max_s {
                Some(s) => s,
                None => chart_s_top(p, n_hi)?,
            };
            let m = matching_audit(p, n_hi, s)?;
            let mut r = AuditReport::new("matching", p.get());
            for e in m.orphans.iter().chain(&m.doubles) {
                let mut row = kuengine_core::audit::AuditRow::compare(0, (e.as_source + e.as_target) as u64, 1);
                row.at = Some(e.label.clone());
                r.push(row);
            }
            matching = Some(MatchingJson {
                towers_checked: m.towers_checked,
                orphans: m.orphans.iter().map(|e| e.label.clone()).collect(),
                doubles: m.doubles.iter().map(|e| e.label.clone()).collect(),
            });
            r
        }
        Which::Duality => {
            let mut r = AuditReport::new("duality", p.get());
            merge(&mut r, homology_shift_audit(p, a.max.unwrap_or(150))?, "homology");
            let k_max = a.k.unwrap_or(if p.get() <= 3 { 4 } else { 2 });
            for k in p.k0()..=k_max {
                merge(&mut r, b_self_duality_audit(p, k)?, &format!("B_{k}"));
            }
            r
        }
        Which::Margolis => margolis_audit(p, a.max.unwrap_or(60)),
        Which::Ext => ext_audit(p, a.max.unwrap_or(56), a.max_s.unwrap_or(10))?,
        Which::Ps => free_part_audit(p, a.max.unwrap_or(120))?,
        Which::Assoc => assoc_graded_audit(p, a.max.unwrap_or(200))?,
    };
    let pass = report.pass() && matching.as_ref().is_none_or(|m| m.orphans.is_empty() && m.doubles.is_empty());
    let rows = report
        .rows
        .iter()
        .filter(|r| !a.failures_only || !r.pass)
        .map(|r| RowJson { degree: r.degree, at: r.at.as_deref(), lhs: r.lhs, rhs: r.rhs, pass: r.pass })
        .collect();
    let json = AuditJson {
        which: which_name(a.which),
        prime: p.get(),
        pass,
        checked: report.rows.len(),
        failures: report.failures().count(),
        matching,
        rows,
    };
    Ok((serde_json::to_string_pretty(&json)? + "\n", pass))
}

fn cmd_ps(a: &PsArgs) -> Result<String> {
    let p = prime(a.common.prime)?;
    let coeffs: Vec<i64> = match a.series {
        Series::Free => free_part_ps(p, a.max)?.coeffs().to_vec(),
        Series::Cohomology => cohomology_ps(p, a.max).coeffs().to_vec(),
        Series::Nonfree => nonfree_ps(p, a.max).coeffs().to_vec(),
        Series::K1 => k1_dims(p, 0, a.max as i64)?.into_iter().map(|d| d as i64).collect(),
    };
    let coeffs = &coeffs[..coeffs.len().min(a.max + 1)];
    Ok(match a.format {
        Format::Csv => coeffs.iter().enumerate().map(|(d, c)| format!("{d},{c}\n")).collect(),
        Format::Json => serde_json::to_string(coeffs)? + "\n",
        _ => bail!("ps supports --format csv|json"),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let (text, out, ok) = match &cli.cmd {
        Command::Groups(a) => (cmd_groups(a)?, &a.common.out, true),
        Command::Chart(a) => (cmd_chart(a)?, &a.common.out, true),
        Command::Audit(a) => {
            let (t, pass) = cmd_audit(a)?;
            (t, &a.common.out, pass)
        }
        Command::Ps(a) => (cmd_ps(a)?, &a.common.out, true),
    };
    emit(out.as_deref(), &text)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kuengine: {e:#}");
            ExitCode::from(2)
        }
    }
}
