//! `lrcw`: build, verify and sweep locally repairable codes from the command
//! line. Reports are JSON on stdout with a one-line summary on stderr.
//!
//! Exit status: 0 when every assertion holds, 1 when one fails, 2 for usage
//! or input errors.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use lrc_core::algebra::{Elem, FiniteField, Matrix, Poly};
use lrc_core::bounds::{classify, length_bound, singleton_bound, CodeParams, LengthBoundResult};
use lrc_core::designs::{
    ag_steiner, cyclotomic_packing, johnson_bound, pg_steiner, sg_steiner, verify_design, verify_design_sampled, Design,
};
use lrc_core::erasure::{
    decode_linear, decode_structured, min_distance_with, pattern_admissible, recoverable, ErasurePattern,
};
use lrc_core::fixtures::{run_example1, run_example2, run_example3, FixtureReport};
use lrc_core::goppa::{compare_row_spaces, goppa_code, goppa_distance_check, GoppaParams};
use lrc_core::gsd::{
    array_basic, array_rearranged, array_truncated, claims, gsd_check, gsd_params, ArrayFile, ColumnScope, Family,
    SweepMode,
};
use lrc_core::lrc::{encode, verify_locality, EvaluationLayout, LayoutFile, LinearCode, LrcParams};
use lrc_core::sweep::{default_workers, WORKERS_ENV};

#[derive(Parser)]
#[command(name = "lrcw", version, about = "Locally repairable code workbench")]
struct Cli {
    /// Worker threads for sweeps; reports do not depend on it.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Pretty-print JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and verify combinatorial designs
    #[command(subcommand)]
    Designs(DesignsCmd),
    /// Construct, verify and encode evaluation codes
    #[command(subcommand)]
    Lrc(LrcCmd),
    /// Erasure recovery, decoding and minimum distance
    #[command(subcommand)]
    Erasure(ErasureCmd),
    /// Array codes and column-plus-cell erasure sweeps
    #[command(subcommand)]
    Gsd(GsdCmd),
    /// Goppa-type codes with locality
    #[command(subcommand)]
    Goppa(GoppaCmd),
    /// Singleton-type and length bounds
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Run the bundled regression fixtures
    #[command(subcommand)]
    Fixtures(FixturesCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Ag,
    Pg,
    Sg,
    Cyclotomic,
}

#[derive(Args, Clone)]
struct DesignSpec {
    #[arg(long, value_enum)]
    family: Option<FamilyKind>,
    #[arg(long)]
    q1: Option<u64>,
    #[arg(long)]
    beta: Option<u32>,
    /// Prime powers for cyclotomic packings, comma separated.
    #[arg(long, value_delimiter = ',')]
    prime_powers: Vec<u64>,
    #[arg(long)]
    e: Option<u64>,
    /// Design text file (`-` for stdin) instead of a family.
    #[arg(long, conflicts_with = "family")]
    design: Option<PathBuf>,
}

impl DesignSpec {
    fn build(&self) -> Result<Design> {
        if let Some(path) = &self.design {
            return Ok(Design::from_text(&read_input(path)?)?);
        }
        let family = self.family.ok_or_else(|| anyhow!("either --family or --design is required"))?;
        let need = |v: Option<u64>, name: &str| v.ok_or_else(|| anyhow!("--{name} is required for this family"));
        let beta = || self.beta.ok_or_else(|| anyhow!("--beta is required for this family"));
        Ok(match family {
            FamilyKind::Ag => ag_steiner(need(self.q1, "q1")?, beta()?)?,
            FamilyKind::Pg => pg_steiner(need(self.q1, "q1")?, beta()?)?,
            FamilyKind::Sg => sg_steiner(need(self.q1, "q1")?, beta()?)?,
            FamilyKind::Cyclotomic => cyclotomic_packing(&self.prime_powers, need(self.e, "e")?)?,
        })
    }
}

#[derive(Args, Clone)]
struct CodeSpec {
    /// Field order (a prime power).
    #[arg(long)]
    q: u64,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    delta: usize,
    /// Number of full blocks used; defaults to all blocks but one.
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    v: usize,
    #[arg(long)]
    h: usize,
    /// Global evaluation points; defaults to the last `h` field elements.
    #[arg(long, value_delimiter = ',')]
    globals: Option<Vec<Elem>>,
    #[command(flatten)]
    design: DesignSpec,
}

impl CodeSpec {
    /// The layout together with the untruncated last block.
    fn build(&self) -> Result<(EvaluationLayout, Vec<Elem>)> {
        let field = FiniteField::of_order(self.q)?;
        let design = self.design.build()?;
        let ell = match self.ell {
            Some(l) => l,
            None => design.num_blocks().checked_sub(1).ok_or_else(|| anyhow!("design has no blocks"))?,
        };
        let params = LrcParams::new(self.r, self.delta, ell, self.v, self.h)?;
        let layout = EvaluationLayout::from_design(&field, params, &design, self.globals.clone())?;
        let embed: Vec<Elem> = field.elements().filter(|x| !layout.global_points().contains(x)).collect();
        let full = design.blocks[ell].iter().map(|&p| embed[p]).collect();
        Ok((layout, full))
    }
}

#[derive(Subcommand)]
enum DesignsCmd {
    /// Print a design in text form.
    Gen {
        #[command(flatten)]
        spec: DesignSpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the packing / Steiner / regularity axioms of a design file.
    Verify {
        #[arg(default_value = "-")]
        file: PathBuf,
        /// Sample this many subsets instead of choosing automatically.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum LrcCmd {
    /// Build a layout and write it (JSON), optionally with G and H.
    Construct {
        #[command(flatten)]
        code: CodeSpec,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        generator: Option<PathBuf>,
        #[arg(long)]
        parity_check: Option<PathBuf>,
    },
    /// Check locality, and optionally the exact distance, of a layout.
    Verify {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        distance: bool,
    },
    /// Encode an information vector (comma separated).
    Encode {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long, value_delimiter = ',')]
        info: Vec<Elem>,
    },
}

#[derive(Subcommand)]
enum ErasureCmd {
    /// Admissibility and rank recoverability of a pattern.
    Check {
        #[arg(long)]
        layout: PathBuf,
        /// Pattern JSON `{"sets": [[..], ..], "globals": [..]}`, or use --coords.
        #[arg(long)]
        pattern: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', conflicts_with = "pattern")]
        coords: Option<Vec<usize>>,
    },
    /// Recover a received word (JSON array, `null` for erasures).
    Decode {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        received: PathBuf,
        /// Use the set-structured decoder instead of linear solving.
        #[arg(long)]
        structured: bool,
    },
    /// Exact minimum distance of the code with a text-format parity-check matrix.
    Distance {
        #[arg(long)]
        matrix: PathBuf,
        /// Stop searching above this weight.
        #[arg(long)]
        d_max: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionArg {
    Basic,
    Rearranged,
    Truncated,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Data,
    All,
}

#[derive(Subcommand)]
enum GsdCmd {
    /// Arrange a code into an array and write the array JSON.
    Build {
        #[command(flatten)]
        code: CodeSpec,
        #[arg(long, value_enum, default_value = "basic")]
        construction: ConstructionArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep column-plus-cell erasures of an array.
    Check {
        #[arg(long)]
        array: PathBuf,
        /// Erased columns.
        #[arg(long)]
        y: Option<usize>,
        /// Further erased cells.
        #[arg(long)]
        gamma: Option<usize>,
        /// Sweep every promised `(y, gamma)` pair instead.
        #[arg(long)]
        claims: bool,
        #[arg(long, value_enum)]
        scope: Option<ScopeArg>,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        distance: Option<usize>,
    },
    /// Closed-form parameters and item conditions for a design family.
    Params {
        #[arg(long, value_enum)]
        family: FamilyKind,
        #[arg(long)]
        q1: Option<u64>,
        #[arg(long)]
        beta: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        prime_powers: Vec<u64>,
        #[arg(long)]
        e: Option<u64>,
        #[arg(long)]
        delta: u64,
        #[arg(long)]
        v: u64,
    },
}

#[derive(Args)]
struct GoppaSpec {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    delta: usize,
    /// Coefficients of G1, lowest degree first.
    #[arg(long, value_delimiter = ',')]
    g1: Vec<Elem>,
    /// Coefficients of G2, lowest degree first.
    #[arg(long, value_delimiter = ',')]
    g2: Vec<Elem>,
    /// Local sets, `;`-separated lists of comma-separated elements.
    #[arg(long)]
    sets: String,
    /// The trailing set without locality.
    #[arg(long, value_delimiter = ',')]
    tail: Vec<Elem>,
}

impl GoppaSpec {
    fn build(&self) -> Result<GoppaParams> {
        let f = FiniteField::of_order(self.q)?;
        let sets = self
            .sets
            .split(';')
            .map(|s| s.split(',').map(|x| x.trim().parse::<Elem>().context("bad set element")).collect())
            .collect::<Result<Vec<Vec<Elem>>>>()?;
        let poly = |c: &[Elem]| Poly::from_coeffs(c.to_vec());
        Ok(GoppaParams::new(&f, self.r, self.delta, poly(&self.g1), poly(&self.g2), sets, self.tail.clone())?)
    }
}

#[derive(Subcommand)]
enum GoppaCmd {
    /// Print the parity-check matrix and the code parameters.
    Build {
        #[command(flatten)]
        spec: GoppaSpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hypotheses, exact distance and optimality.
    Check {
        #[command(flatten)]
        spec: GoppaSpec,
        #[arg(long, default_value_t = 1)]
        t: usize,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    Singleton {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        delta: usize,
    },
    Length {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        h: usize,
        #[arg(long, default_value_t = 0)]
        a: usize,
    },
    Classify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        q: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureName {
    Example1,
    Example2,
    Example3,
    All,
}

#[derive(Subcommand)]
enum FixturesCmd {
    /// Run the bundled worked-example regression suite.
    Run {
        #[arg(value_enum)]
        name: FixtureName,
        /// Samples per sweep for the large example.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A finished command: its JSON report, whether its assertions held, and a
/// human summary.
struct Outcome {
    report: Value,
    pass: bool,
    summary: String,
}

impl Outcome {
    fn new(report: impl Serialize, pass: bool, summary: impl Into<String>) -> Result<Self> {
        Ok(Self { report: serde_json::to_value(report)?, pass, summary: summary.into() })
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_layout(path: &Path) -> Result<EvaluationLayout> {
    let file: LayoutFile = serde_json::from_str(&read_input(path)?).context("parsing layout JSON")?;
    Ok(EvaluationLayout::from_file(&file)?)
}

fn designs(cmd: DesignsCmd) -> Result<Outcome> {
    match cmd {
        DesignsCmd::Gen { spec, out } => {
            let d = spec.build()?;
            let text = d.to_text();
            if let Some(path) = out {
                write_output(&path, &text)?;
                Outcome::new(json!({ "blocks": d.num_blocks(), "points": d.n_points }), true, format!("wrote {}", path.display()))
            } else {
                // The design itself is the output, so it can be piped into `verify`.
                print!("{text}");
                Ok(Outcome { report: Value::Null, pass: true, summary: format!("{} blocks", d.num_blocks()) })
            }
        }
        DesignsCmd::Verify { file, samples, seed } => {
            let d = Design::from_text(&read_input(&file)?)?;
            let rep = match samples {
                Some(s) => verify_design_sampled(&d, seed, s),
                None => verify_design(&d),
            };
            let johnson = johnson_bound(d.n_points as u64, d.block_size as u64, d.tau.saturating_sub(1) as u64).ok();
            let within = johnson.is_none_or(|j| d.num_blocks() as u64 <= j);
            let pass = rep.blocks_well_formed && rep.is_packing && within;
            let summary = format!(
                "{} blocks; packing: {}, steiner: {}, johnson bound: {:?}",
                rep.blocks, rep.is_packing, rep.is_steiner, johnson
            );
            Outcome::new(json!({ "report": rep, "johnson_bound": johnson }), pass, summary)
        }
    }
}

fn lrc(cmd: LrcCmd) -> Result<Outcome> {
    match cmd {
        LrcCmd::Construct { code, out, generator, parity_check } => {
            let (layout, _) = code.build()?;
            let file = layout.to_file();
            if let Some(path) = &out {
                write_output(path, &serde_json::to_string_pretty(&file)?)?;
            }
            if generator.is_some() || parity_check.is_some() {
                let c = LinearCode::from_layout(&layout)?;
                if let Some(path) = &generator {
                    write_output(path, &c.generator().to_text())?;
                }
                if let Some(path) = &parity_check {
                    write_output(path, &c.parity_check.to_text())?;
                }
            }
            let summary = format!("[{}, {}] code, max set overlap {}", layout.n(), layout.k(), layout.max_intersection());
            let report = json!({ "n": layout.n(), "k": layout.k(), "max_intersection": layout.max_intersection(), "layout": file });
            Outcome::new(report, true, summary)
        }
        LrcCmd::Verify { layout, distance } => {
            let layout = load_layout(&layout)?;
            let code = LinearCode::from_layout(&layout)?;
            let loc = verify_locality(&code)?;
            let p = layout.params();
            let d_singleton = singleton_bound(code.n, code.k, p.r, p.delta)?;
            let dist = if distance {
                Some(min_distance_with(&code.parity_check, d_singleton.max(1) as usize + 1, workers())?)
            } else {
                None
            };
            let optimal = dist.map(|d| d.exact() == Some(d_singleton as usize));
            let pass = loc.ok && optimal != Some(false);
            let summary = format!("[{}, {}] locality ok: {}, distance {:?}, singleton {}", code.n, code.k, loc.ok, dist, d_singleton);
            let report = json!({ "n": code.n, "k": code.k, "locality": loc, "distance": dist, "d_singleton": d_singleton, "optimal": optimal });
            Outcome::new(report, pass, summary)
        }
        LrcCmd::Encode { layout, info } => {
            let layout = load_layout(&layout)?;
            let word = encode(&layout, &info)?;
            Outcome::new(&word, true, format!("encoded {} symbols", word.len()))
        }
    }
}

fn erasure(cmd: ErasureCmd) -> Result<Outcome> {
    match cmd {
        ErasureCmd::Check { layout, pattern, coords } => {
            let layout = load_layout(&layout)?;
            let pat = match (pattern, coords) {
                (Some(path), _) => serde_json::from_str::<ErasurePattern>(&read_input(&path)?).context("parsing pattern")?,
                (None, Some(c)) => ErasurePattern::from_coordinates(&layout, &c)?,
                (None, None) => bail!("either --pattern or --coords is required"),
            };
            let adm = pattern_admissible(&layout, &pat)?;
            let code = LinearCode::from_layout(&layout)?;
            let rec = recoverable(&code.parity_check, &pat.coordinates(&layout)?);
            // Admissible patterns are promised to be recoverable.
            let pass = !adm.admissible || rec;
            let summary = format!(
                "{} erased coordinates on {} points; admissible: {}, recoverable: {rec}",
                pat.erased_coordinates(),
                pat.distinct_points(),
                adm.admissible
            );
            Outcome::new(json!({ "admissibility": adm, "recoverable": rec }), pass, summary)
        }
        ErasureCmd::Decode { layout, received, structured } => {
            let layout = load_layout(&layout)?;
            let word: Vec<Option<Elem>> = serde_json::from_str(&read_input(&received)?).context("parsing received word")?;
            let erased: Vec<usize> = (0..word.len()).filter(|&i| word[i].is_none()).collect();
            let decoded = if structured {
                let pat = ErasurePattern::from_coordinates(&layout, &erased)?;
                decode_structured(&layout, &word, &pat)?
            } else {
                decode_linear(&LinearCode::from_layout(&layout)?.parity_check, &erased, &word)?
            };
            Outcome::new(&decoded, true, format!("recovered {} erasures", erased.len()))
        }
        ErasureCmd::Distance { matrix, d_max } => {
            let h = Matrix::from_text(&read_input(&matrix)?)?;
            let d = min_distance_with(&h, d_max.unwrap_or(h.rows() + 1), workers())?;
            Outcome::new(d, true, format!("distance {d:?}"))
        }
    }
}

fn gsd(cmd: GsdCmd) -> Result<Outcome> {
    match cmd {
        GsdCmd::Build { code, construction, out } => {
            let (layout, full) = code.build()?;
            let arr = match construction {
                ConstructionArg::Basic => {
                    let truncated = layout.params().v < layout.params().r;
                    array_basic(&layout, truncated.then_some(full.as_slice()))?
                }
                ConstructionArg::Rearranged => array_rearranged(&layout)?,
                ConstructionArg::Truncated => array_truncated(&layout, &full)?,
            };
            let file = arr.to_file();
            if let Some(path) = &out {
                write_output(path, &serde_json::to_string_pretty(&file)?)?;
            }
            let summary = format!("{}x{} array, {} zero-fill cells", arr.rows, arr.cols, file.zero_fill.len());
            Outcome::new(file, true, summary)
        }
        GsdCmd::Check { array, y, gamma, claims: all_claims, scope, exhaustive, samples, seed, distance } => {
            let file: ArrayFile = serde_json::from_str(&read_input(&array)?).context("parsing array JSON")?;
            let arr = file.to_array()?;
            let mode = match (exhaustive, samples) {
                (true, _) => SweepMode::Exhaustive,
                (false, Some(count)) => SweepMode::Sampled { count, seed },
                (false, None) => SweepMode::Auto { seed },
            };
            let scope = match scope {
                Some(ScopeArg::Data) => ColumnScope::Data,
                Some(ScopeArg::All) => ColumnScope::All,
                None if arr.construction == lrc_core::gsd::Construction::Basic => ColumnScope::Data,
                None => ColumnScope::All,
            };
            let pairs: Vec<(usize, usize)> = if all_claims {
                claims(&arr).into_iter().map(|c| (c.y, c.gamma)).collect::<std::collections::BTreeSet<_>>().into_iter().collect()
            } else {
                vec![(y.ok_or_else(|| anyhow!("--y is required"))?, gamma.unwrap_or(0))]
            };
            let reports = pairs
                .iter()
                .map(|&(y, g)| gsd_check(&arr, y, g, scope, mode, distance, workers()))
                .collect::<Result<Vec<_>, _>>()?;
            let pass = reports.iter().all(|r| r.all_recovered());
            let summary = reports
                .iter()
                .map(|r| format!("(y={}, gamma={}): {}/{} recovered", r.y, r.gamma, r.recovered, r.patterns))
                .collect::<Vec<_>>()
                .join("; ");
            Outcome::new(reports, pass, summary)
        }
        GsdCmd::Params { family, q1, beta, prime_powers, e, delta, v } => {
            let need_q1 = || q1.ok_or_else(|| anyhow!("--q1 is required"));
            let need_beta = || beta.ok_or_else(|| anyhow!("--beta is required"));
            let fam = match family {
                FamilyKind::Ag => Family::Ag { q1: need_q1()?, beta: need_beta()? },
                FamilyKind::Pg => Family::Pg { q1: need_q1()?, beta: need_beta()? },
                FamilyKind::Sg => Family::Sg { q1: need_q1()?, beta: need_beta()? },
                FamilyKind::Cyclotomic => {
                    Family::RegularPacking { prime_powers, e: e.ok_or_else(|| anyhow!("--e is required"))? }
                }
            };
            let p = gsd_params(fam, delta, v)?;
            let claimed: Vec<String> =
                p.items.iter().filter(|i| i.claimed).map(|i| format!("{}:({},{})", i.item, i.y, i.gamma)).collect();
            let summary = format!("[{}, {}, {}] over q >= {}, {}x{} array; claims {}", p.n, p.k, p.d, p.q_min, p.rows, p.cols, claimed.join(" "));
            Outcome::new(p, true, summary)
        }
    }
}

fn goppa(cmd: GoppaCmd) -> Result<Outcome> {
    match cmd {
        GoppaCmd::Build { spec, out } => {
            let params = spec.build()?;
            let code = goppa_code(&params)?;
            if let Some(path) = &out {
                write_output(path, &code.parity_check.to_text())?;
            }
            let rows = compare_row_spaces(&params).ok();
            let summary = format!("[{}, {}] code (k >= {})", code.n, code.k, params.k_bound());
            let report = json!({
                "n": code.n,
                "k": code.k,
                "k_bound": params.k_bound(),
                "parity_check": code.parity_check.to_rows(),
                "splitting_field": rows,
            });
            Outcome::new(report, code.k as i64 >= params.k_bound(), summary)
        }
        GoppaCmd::Check { spec, t } => {
            let params = spec.build()?;
            let rep = goppa_distance_check(&params, t)?;
            let summary = format!(
                "[{}, {}] distance {:?}, bound {}, hypotheses hold: {}, optimal: {:?}",
                rep.n, rep.k, rep.distance, rep.distance_bound, rep.hypotheses_hold, rep.optimal
            );
            let pass = rep.ok;
            Outcome::new(rep, pass, summary)
        }
    }
}

fn bounds(cmd: BoundsCmd) -> Result<Outcome> {
    match cmd {
        BoundsCmd::Singleton { n, k, r, delta } => {
            let d = singleton_bound(n, k, r, delta)?;
            Outcome::new(d, true, format!("d <= {d}"))
        }
        BoundsCmd::Length { q, r, delta, h, a } => match length_bound(q, r, delta, h, a)? {
            LengthBoundResult::Bound(b) => {
                let s = b.summary();
                let summary = format!("n <= {} (certified floor {:?})", s.value, s.floor);
                Outcome::new(s, true, summary)
            }
            LengthBoundResult::Inapplicable { a, t } => {
                Outcome::new(json!({ "status": "inapplicable", "a": a, "t": t }), true, format!("inapplicable: T({a}) = {t} < 2"))
            }
        },
        BoundsCmd::Classify { n, k, r, delta, d, h, q } => {
            let rep = classify(&CodeParams { n, k, r, delta, d, h }, q)?;
            let pass = rep.within_length_bound != Some(false) || rep.advisory;
            let summary = format!("optimal: {}, n_max: {:?}", rep.optimal, rep.best_n_max);
            Outcome::new(rep, pass, summary)
        }
    }
}

fn fixtures(cmd: FixturesCmd) -> Result<Outcome> {
    let FixturesCmd::Run { name, samples, seed } = cmd;
    let mut reports: Vec<FixtureReport> = Vec::new();
    if matches!(name, FixtureName::Example1 | FixtureName::All) {
        reports.push(run_example1()?);
    }
    if matches!(name, FixtureName::Example2 | FixtureName::All) {
        reports.push(run_example2()?);
    }
    if matches!(name, FixtureName::Example3 | FixtureName::All) {
        reports.push(run_example3(samples, seed, workers())?);
    }
    let pass = reports.iter().all(|r| r.pass);
    let summary = reports
        .iter()
        .map(|r| format!("{}: {}/{} checks pass", r.fixture, r.checks.iter().filter(|c| c.pass).count(), r.checks.len()))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome::new(reports, pass, summary)
}

static WORKERS: std::sync::OnceLock<usize> = std::sync::OnceLock::new();

fn workers() -> usize {
    *WORKERS.get().unwrap_or(&1)
}

fn run(cli: Cli) -> Result<Outcome> {
    let _ = WORKERS.set(cli.workers.filter(|&w| w > 0).unwrap_or_else(default_workers));
    match cli.command {
        Command::Designs(c) => designs(c),
        Command::Lrc(c) => lrc(c),
        Command::Erasure(c) => erasure(c),
        Command::Gsd(c) => gsd(c),
        Command::Goppa(c) => goppa(c),
        Command::Bounds(c) => bounds(c),
        Command::Fixtures(c) => fixtures(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pretty = cli.pretty;
    match run(cli) {
        Ok(out) => {
            if !out.report.is_null() {
                let text = if pretty { serde_json::to_string_pretty(&out.report) } else { serde_json::to_string(&out.report) };
                println!("{}", text.expect("reports serialize"));
            }
            eprintln!("{} {}", if out.pass { "ok:" } else { "FAILED:" }, out.summary);
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
