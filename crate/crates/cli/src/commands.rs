use std::fmt;
use std::path::{Path, PathBuf};

use covertab::classify::{cyclic_special_table, monodromy_lower_bound, theorem2_scan, ScanOptions};
use covertab::enumerate::enumerate_data;
use covertab::hasse_witt::{
    hw_block_numeric, hw_block_symbolic, is_ordinary_at, ordinarity_scan, HwBlock, PrimeContext, ScanMode,
};
use covertab::{
    classify, spectrum_table, AbelianGroupStructure, Character, ClassificationReport, CoverDatum, EigenspaceRecord,
    EnumerationRecord, Equivalence, SearchSpec,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{meta_lines, say, timestamp, Sink};
use crate::{AnalyzeArgs, CyclicTableArgs, DatumInput, EnumerateArgs, Format, HwArgs, ScanArgs, Span};

#[derive(Debug)]
pub enum CliError {
    Core(covertab::Error),
    Usage(String),
    Io { path: PathBuf, source: std::io::Error },
    Csv(csv::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.name(),
            CliError::Usage(_) => "Usage",
            CliError::Io { .. } => "Io",
            CliError::Csv(_) => "Csv",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(covertab::Error::SpecTooLarge { .. }) => 3,
            CliError::Core(covertab::Error::TermLimitExceeded { .. }) => 4,
            CliError::Core(_) | CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Csv(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Csv(e) => write!(f, "{e}"),
        }
    }
}

impl From<covertab::Error> for CliError {
    fn from(e: covertab::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn load(input: &DatumInput) -> Result<CoverDatum> {
    let text = match (&input.datum, &input.file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?,
        (None, None) => return Err(CliError::Usage("no datum given".into())),
    };
    Ok(text.trim().parse()?)
}

fn tuple(xs: &[u32]) -> String {
    let parts: Vec<String> = xs.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

/// Everything `analyze` reports, in its JSON form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub datum: CoverDatum,
    pub text: String,
    /// Presentation with the common factor of `N` and the entries removed,
    /// when there is one.
    pub reduced: Option<String>,
    pub genus: u64,
    pub degree: u64,
    pub group: AbelianGroupStructure,
    pub rows_independent: bool,
    pub spectrum: Vec<EigenspaceRecord>,
    pub dim_sg: u64,
    pub condition_star: Option<Character>,
    pub monodromy_bound: u64,
    pub report: ClassificationReport,
}

impl Analysis {
    fn of(datum: CoverDatum) -> Result<Self> {
        let table = spectrum_table(&datum)?;
        Ok(Analysis {
            text: datum.to_text(),
            reduced: datum.reducible_modulus().then(|| datum.reduced().to_text()),
            genus: datum.genus()?,
            degree: datum.degree(),
            group: datum.group_structure(),
            rows_independent: datum.rows_independent(),
            dim_sg: table.dim_sg(),
            condition_star: table.condition_star().map(|r| r.character.clone()),
            monodromy_bound: monodromy_lower_bound(&table)?,
            spectrum: table.records,
            report: classify(&datum)?,
            datum,
        })
    }

    fn table(&self) -> String {
        let s = self.datum.branch_points();
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k:<17}{v}\n"));
        line("datum", self.text.clone());
        if let Some(r) = &self.reduced {
            line("reduced", r.clone());
        }
        line("N, m, s", format!("{}, {}, {s}", self.datum.modulus(), self.datum.row_count()));
        line("genus", self.genus.to_string());
        line("group", format!("{} (order {})", self.group, self.group.order));
        line("rows", if self.rows_independent { "independent" } else { "dependent" }.into());
        line("dim S(G)", format!("{} (s - 3 = {})", self.dim_sg, s - 3));
        line("monodromy bound", self.monodromy_bound.to_string());
        line(
            "condition (*)",
            self.condition_star.as_ref().map_or("no".into(), |c| format!("yes, n = {} alpha = {}", tuple(&c.n), tuple(&c.alpha))),
        );
        let rule = self.report.rule.map_or("no rule".into(), |r| r.to_string());
        line("verdict", format!("{} ({rule})", self.report.verdict));
        out.push('\n');
        let rows: Vec<[String; 5]> = self
            .spectrum
            .iter()
            .map(|r| {
                [
                    tuple(&r.character.n),
                    tuple(&r.character.alpha),
                    r.d.to_string(),
                    r.d_dual.to_string(),
                    if r.order2 { "yes".into() } else { String::new() },
                ]
            })
            .collect();
        let header = ["n", "alpha", "d", "d_dual", "order2"].map(String::from);
        let widths: Vec<usize> =
            (0..5).map(|c| rows.iter().chain([&header]).map(|r| r[c].len()).max().unwrap_or(0)).collect();
        for r in [&header].into_iter().chain(&rows) {
            let cells: Vec<String> = r.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

pub fn analyze(args: AnalyzeArgs) -> Result<()> {
    let analysis = Analysis::of(load(&args.input)?)?;
    let json = serde_json::to_string_pretty(&analysis).expect("analysis serializes");
    match args.format {
        Format::Table => say!("{}", analysis.table().trim_end()),
        Format::Json => say!("{json}"),
        Format::Both => say!("{}\n{json}", analysis.table()),
    }
    Ok(())
}

fn usize_range(span: Span) -> std::ops::RangeInclusive<usize> {
    span.lo as usize..=span.hi as usize
}

fn span_text(span: Span) -> String {
    if span.lo == span.hi {
        span.lo.to_string()
    } else {
        format!("{}..{}", span.lo, span.hi)
    }
}

pub fn enumerate(args: EnumerateArgs) -> Result<()> {
    let mut spec = SearchSpec::new(args.moduli.clone(), usize_range(args.m), usize_range(args.s));
    spec.shape = args.shape;
    spec.genus = args.genus.map(|g| g.lo..=g.hi);
    spec.rows_independent = args.independent;
    spec.verdict = args.verdict;
    spec.equivalence = args.equivalence;
    spec.max_raw = args.max_raw;
    let records = enumerate_data(&spec)?;

    let moduli: Vec<String> = args.moduli.iter().map(u32::to_string).collect();
    let mut bounds = format!("N={} m={} s={}", moduli.join(","), span_text(args.m), span_text(args.s));
    if let Some(shape) = args.shape {
        bounds.push_str(&format!(" shape={shape}"));
    }
    if let Some(g) = args.genus {
        bounds.push_str(&format!(" genus={}", span_text(g)));
    }
    let rows = records.iter().map(EnumerationRecord::csv_fields).collect::<covertab::Result<Vec<_>>>()?;
    let mut sink = Sink::open(args.output.as_deref())?;
    sink.comments(&meta_lines(bounds, args.equivalence.to_string(), args.meta.no_meta))?;
    sink.csv(&EnumerationRecord::CSV_HEADER, rows)?;
    sink.finish()?;

    let manifest_path = args.manifest.or_else(|| {
        args.output.as_ref().map(|p| {
            let mut name = p.as_os_str().to_owned();
            name.push(".manifest.json");
            PathBuf::from(name)
        })
    });
    if let Some(path) = manifest_path {
        let mut manifest = json!({
            "generator": "covertab",
            "version": covertab::VERSION,
            "spec": spec,
            "raw_cardinality": spec.raw_cardinality().to_string(),
            "classes": records.len(),
            "equivalence": args.equivalence.to_string(),
            "canonicalization": "row span; rows in any order; column permutations when equivalence is row-span-columns",
        });
        if !args.meta.no_meta {
            manifest["generated"] = json!(timestamp());
        }
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

pub fn cyclic_table(args: CyclicTableArgs) -> Result<()> {
    let table = cyclic_special_table(args.nmax, args.smax as usize);
    let rows = table
        .iter()
        .map(|d| {
            Ok(vec![
                d.modulus().to_string(),
                d.branch_points().to_string(),
                tuple(&d.rows()[0]),
                d.genus()?.to_string(),
                spectrum_table(d)?.dim_sg().to_string(),
                d.canonical_key(Equivalence::RowSpanColumns).to_hex(),
            ])
        })
        .collect::<covertab::Result<Vec<_>>>()?;
    let moduli: std::collections::BTreeSet<u32> = table.iter().map(|d| d.modulus()).collect();
    let listed: Vec<String> = moduli.iter().map(u32::to_string).collect();
    let summary = format!("{} families, {} distinct N: {}", table.len(), moduli.len(), listed.join(","));

    let mut sink = Sink::open(args.output.as_deref())?;
    let bounds = format!("N<={} 4<=s<={}", args.nmax, args.smax);
    sink.comments(&meta_lines(bounds, Equivalence::RowSpanColumns.to_string(), args.meta.no_meta))?;
    sink.csv(&["N", "s", "tuple", "genus", "dim_SG", "key"], rows)?;
    sink.comments(&[("summary".into(), summary.clone())])?;
    sink.finish()?;
    if args.output.is_some() {
        say!("{summary}");
    }
    Ok(())
}

pub fn scan_theorem2(args: ScanArgs) -> Result<()> {
    let options = ScanOptions { require_primitive_rows: !args.all_rows, equivalence: args.equivalence };
    let scan = theorem2_scan(&args.moduli, options)?;
    let moduli: Vec<String> = args.moduli.iter().map(u32::to_string).collect();
    let rows: Vec<Vec<String>> = scan
        .survivors
        .values()
        .flatten()
        .map(|s| {
            vec![
                s.shape.to_string(),
                s.datum.modulus().to_string(),
                s.datum.to_text(),
                s.key.to_hex(),
                s.report.verdict.to_string(),
                s.report.dims.dim_sg.to_string(),
                s.report.dims.monodromy_bound.to_string(),
            ]
        })
        .collect();
    match &args.output {
        Some(path) => {
            let mut sink = Sink::open(Some(path))?;
            let bounds = format!("N={} shapes=I,II,III,IV primitive_rows={}", moduli.join(","), !args.all_rows);
            sink.comments(&meta_lines(bounds, args.equivalence.to_string(), args.meta.no_meta))?;
            sink.csv(&["shape", "N", "matrix", "key", "verdict", "dim_SG", "bound"], rows)?;
            sink.finish()?;
        }
        None => {
            for (shape, survivors) in &scan.survivors {
                for s in survivors {
                    say!("{shape:<4} {:<18} {}", s.datum.to_text(), s.report.verdict);
                }
            }
        }
    }
    say!("{} data examined, {} survivors", scan.examined, scan.len());
    Ok(())
}

fn block_text(block: &HwBlock) -> String {
    let mut out = format!(
        "character n={} alpha={} size {}\n",
        tuple(&block.character.n),
        tuple(&block.character.alpha),
        block.size
    );
    if block.size == 0 {
        out.push_str("(empty)\n");
    } else {
        out.push_str(&block.to_csv());
    }
    out
}

pub fn hw(args: HwArgs) -> Result<()> {
    let datum = load(&args.input)?;
    let ctx = PrimeContext::new(args.p, datum.modulus())?;
    let table = spectrum_table(&datum)?;
    let chars: Vec<Vec<u32>> = match &args.character {
        Some(n) => vec![n.clone()],
        None => table.records.iter().map(|r| r.character.n.clone()).collect(),
    };

    if args.symbolic {
        let mut blocks = Vec::new();
        for n in &chars {
            if covertab::spectrum::eigenspace_dim(&datum, n)? == 0 && args.character.is_none() {
                continue;
            }
            let block = hw_block_symbolic(&datum, n, &ctx, args.term_limit)?;
            let entries = block.symbolic().expect("symbolic block");
            blocks.push(json!({
                "n": block.character.n,
                "alpha": block.character.alpha,
                "size": block.size,
                "entries": entries,
            }));
        }
        say!("{}", json!({ "p": args.p, "blocks": blocks }));
        return Ok(());
    }

    if let Some(points) = &args.points {
        let blocks = chars.iter().map(|n| hw_block_numeric(&datum, n, &ctx, points)).collect::<covertab::Result<Vec<_>>>()?;
        let ordinary = is_ordinary_at(&datum, &ctx, points)?;
        match args.format {
            Format::Json => {
                let out = json!({ "p": args.p, "points": points, "blocks": blocks, "ordinary": ordinary });
                say!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
            }
            _ => {
                for b in &blocks {
                    say!("{}", block_text(b).trim_end());
                }
                say!("ordinary: {ordinary}");
            }
        }
        return Ok(());
    }

    if args.scan {
        let exhaustive = args.exhaustive || (args.p <= 11 && datum.branch_points() <= 5);
        let mode = if exhaustive {
            ScanMode::Exhaustive
        } else {
            ScanMode::Sampled { count: args.samples, seed: args.seed }
        };
        let scan = ordinarity_scan(&datum, &ctx, mode)?;
        match args.format {
            Format::Json => say!("{}", serde_json::to_string_pretty(&scan).expect("serializes")),
            _ => {
                let how = if exhaustive { "exhaustive".to_string() } else { format!("sampled, seed {}", args.seed) };
                say!("p {}, {} tuples ({how})", args.p, scan.tuples);
                say!("ordinary: {} (density {:.4})", scan.ordinary, scan.density());
                say!("ordinary tuple exists: {}", if scan.ordinary > 0 { "yes" } else { "no" });
                if let Some((agree, total)) = scan.oracle {
                    say!("oracle agreement: {agree}/{total}");
                }
            }
        }
        return Ok(());
    }

    Err(CliError::Usage("one of --points, --scan or --symbolic is required".into()))
}
