//! The `altdiam` command-line front end.
//!
//! [`run`] takes explicit streams so the binary and the tests drive exactly
//! the same code. Exit status is 0 on success, 1 on domain errors (invalid
//! input, failed verification) and 2 on usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::census::{self, CensusReport, LowerBoundReport};
use crate::decompose::{
    decompose_finite_support, decompose_multi, decompose_two, verify_decomposition, verify_multi, MultiDecomposition,
    Order, SparseDecomposition,
};
use crate::format;
use crate::linalg::{self, BlockSplit, LinearDecomposition};
use crate::perm::{AlternationWord, Decomposition, StageKind};
use crate::poset::{self, FinitePoset};

#[derive(Debug, Parser)]
#[command(name = "altdiam", version, about = "Alternating stage factorizations of product permutations")]
pub struct Cli {
    /// Emit machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factor a grid permutation into three alternating stages.
    Decompose {
        /// Grid permutation file, or `-` for standard input.
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, default_value = "rlr", value_parser = parse_order)]
        order: Order,
    },
    /// Factor a permutation of A_1 x ... x A_k into 2k - 1 stages.
    DecomposeMulti {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Factor a finite-support permutation of N x N.
    DecomposeSparse {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, default_value = "rlr", value_parser = parse_order)]
        order: Order,
    },
    /// Factor an invertible matrix into block stages.
    DecomposeLinear {
        #[arg(default_value = "-")]
        input: String,
        /// Block sizes `m,n` of the split.
        #[arg(long, value_parser = parse_split)]
        split: BlockSplit,
        #[arg(long, default_value = "lrl", value_parser = parse_order)]
        order: Order,
    },
    /// Report the stage class and word memberships of a grid permutation.
    Classify {
        #[arg(default_value = "-")]
        input: String,
        /// Additional words over {L, R} to test, e.g. `--word LR --word RLR`.
        #[arg(long = "word")]
        words: Vec<String>,
    },
    /// Check a decomposition against its target; prints OK or the first mismatch.
    Verify { decomposition: String, target: String },
    /// Enumerate word product sets of Sym(m x n) for m n <= 9.
    Census {
        m: usize,
        n: usize,
        /// One `word,size` row per word.
        #[arg(long, conflicts_with = "json")]
        csv: bool,
        /// Worker threads; results do not depend on this value.
        #[arg(long, env = "ALTDIAM_THREADS", default_value_t = 1)]
        threads: usize,
    },
    /// Check whether a stage schedule covers Sym(A_1 x ... x A_k).
    LowerBound {
        /// Factor sizes, e.g. `2,2,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// 1-based axes in application order, e.g. `3,2,1,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        schedule: Vec<usize>,
    },
    /// Automorphisms, stage groups and flip generation for a finite poset.
    Poset {
        /// Poset file (`-` for standard input) unless a built-in is chosen.
        #[arg(conflicts_with_all = ["chain", "antichain", "diamond", "sweep"])]
        input: Option<String>,
        #[arg(long)]
        chain: Option<usize>,
        #[arg(long)]
        antichain: Option<usize>,
        #[arg(long)]
        diamond: bool,
        /// Check flip generation against triviality for all posets up to this size.
        #[arg(long)]
        sweep: Option<usize>,
    },
}

fn parse_order(s: &str) -> Result<Order, String> {
    s.parse()
}

fn parse_split(s: &str) -> Result<BlockSplit, String> {
    let (m, n) = s.split_once(',').ok_or("expected `m,n`")?;
    let m = m.trim().parse().map_err(|_| format!("invalid block size {m:?}"))?;
    let n = n.trim().parse().map_err(|_| format!("invalid block size {n:?}"))?;
    BlockSplit::new(m, n).map_err(|e| e.to_string())
}

/// A failure that ends the command; the code is the process exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure { code: 1, message: e.to_string() }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

struct Io<'a> {
    stdin: Option<&'a mut dyn Read>,
    out: String,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String, Failure> {
        if path == "-" {
            let stdin = self.stdin.take().ok_or_else(|| usage("standard input can only be read once"))?;
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(|e| domain(format!("reading standard input: {e}")))?;
            Ok(s)
        } else {
            std::fs::read_to_string(path).map_err(|e| domain(format!("{path}: {e}")))
        }
    }
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { stdin: Some(stdin), out: String::new() };
    let result = dispatch(&cli, &mut io);
    let _ = stdout.write_all(io.out.as_bytes());
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// Returns the exit code; `Err` carries a message for the diagnostic stream.
fn dispatch(cli: &Cli, io: &mut Io) -> Result<i32, Failure> {
    let json = cli.json;
    match &cli.command {
        Command::Decompose { input, order } => {
            let p = format::read_grid(&io.read(input)?).map_err(domain)?;
            let d = decompose_two(&p, *order);
            io.out += &if json { to_json(&d) } else { render_decomposition(&d) };
        }
        Command::DecomposeMulti { input } => {
            let p = format::read_multi(&io.read(input)?).map_err(domain)?;
            let d = decompose_multi(&p);
            io.out += &if json { to_json(&d) } else { render_multi(&d) };
        }
        Command::DecomposeSparse { input, order } => {
            let p = format::read_sparse(&io.read(input)?).map_err(domain)?;
            let d = decompose_finite_support(&p, *order);
            if json {
                io.out += &to_json(&d);
            } else {
                let _ = writeln!(
                    io.out,
                    "support of {} points, bounding grid {}x{}",
                    p.support().len(),
                    d.grid.m,
                    d.grid.n
                );
                io.out += &render_decomposition(&d.grid);
            }
        }
        Command::DecomposeLinear { input, split, order } => {
            let mat = format::read_matrix(&io.read(input)?).map_err(domain)?;
            let d = linalg::decompose_linear_ordered(&mat, *split, *order).map_err(domain)?;
            io.out += &if json { to_json(&d) } else { render_linear(&d) };
        }
        Command::Classify { input, words } => {
            let p = format::read_grid(&io.read(input)?).map_err(domain)?;
            let mut names: Vec<String> = ["LR", "RL"].map(String::from).to_vec();
            names.extend(words.iter().cloned());
            let mut memberships = Vec::new();
            for w in &names {
                let word: AlternationWord = w.parse().map_err(|e| usage(format!("{e}")))?;
                if memberships.iter().any(|m: &WordMembership| m.word == word.to_string()) {
                    continue;
                }
                memberships.push(WordMembership { word: word.to_string(), member: p.in_word(&word) });
            }
            let report = Classification { m: p.m(), n: p.n(), class: p.stage_kind().to_string(), words: memberships };
            if json {
                io.out += &to_json(&report);
            } else {
                let _ = writeln!(io.out, "{}x{} grid permutation, stage class {}", report.m, report.n, report.class);
                for w in &report.words {
                    let _ = writeln!(io.out, "in G_{}: {}", w.word, if w.member { "yes" } else { "no" });
                }
            }
        }
        Command::Verify { decomposition, target } => {
            if decomposition == "-" && target == "-" {
                return Err(usage("only one of the two inputs can be standard input"));
            }
            let (d, t) = (io.read(decomposition)?, io.read(target)?);
            return verify(&d, &t, json, &mut io.out);
        }
        Command::Census { m, n, csv, threads } => {
            let report = census::census(*m, *n, *threads).map_err(domain)?;
            io.out += &if json {
                to_json(&report)
            } else if *csv {
                render_census_csv(&report)
            } else {
                render_census(&report)
            };
        }
        Command::LowerBound { dims, schedule } => {
            let report = census::lower_bound_check(dims, schedule).map_err(domain)?;
            io.out += &if json { to_json(&report) } else { render_lower_bound(&report) };
        }
        Command::Poset { input, chain, antichain, diamond, sweep } => {
            if let Some(max) = sweep {
                return sweep_posets(*max, json, &mut io.out);
            }
            let builtins = [chain.is_some(), antichain.is_some(), *diamond].iter().filter(|&&b| b).count();
            if builtins > 1 {
                return Err(usage("choose at most one of --chain, --antichain, --diamond"));
            }
            let p = match (chain, antichain, diamond) {
                (Some(n), _, _) | (_, Some(n), _) if *n == 0 => return Err(usage("poset size must be positive")),
                (Some(n), _, _) => FinitePoset::chain(*n),
                (_, Some(n), _) => FinitePoset::antichain(*n),
                (_, _, true) => FinitePoset::diamond(),
                _ => format::read_poset(&io.read(input.as_deref().unwrap_or("-"))?).map_err(domain)?,
            };
            let report = poset::poset_report(&p).map_err(domain)?;
            io.out += &if json { to_json(&report) } else { render_poset(&report) };
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct WordMembership {
    word: String,
    member: bool,
}

#[derive(Serialize)]
struct Classification {
    m: usize,
    n: usize,
    class: String,
    words: Vec<WordMembership>,
}

fn has_key(text: &str, key: &str) -> Result<bool, Failure> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| domain(format!("invalid JSON: {e}")))?;
    Ok(v.get(key).is_some())
}

fn report_verification<F: Serialize + std::fmt::Display>(
    v: &crate::decompose::Verification<F>,
    json: bool,
    out: &mut String,
) -> i32 {
    if json {
        *out += &to_json(v);
    } else {
        match &v.failure {
            None => *out += "OK\n",
            Some(f) => {
                let _ = writeln!(out, "FAIL: {f}");
            }
        }
    }
    i32::from(!v.ok)
}

fn verify(decomposition: &str, target: &str, json: bool, out: &mut String) -> Result<i32, Failure> {
    if !format::looks_like_json(decomposition) {
        return Err(domain("decompositions are read as JSON"));
    }
    if has_key(decomposition, "dims")? {
        let d: MultiDecomposition = serde_json::from_str(decomposition).map_err(domain)?;
        let p = format::read_multi(target).map_err(domain)?;
        let v = verify_multi(&d, &p).map_err(domain)?;
        return Ok(report_verification(&v, json, out));
    }
    if has_key(decomposition, "split")? {
        let d: LinearDecomposition = serde_json::from_str(decomposition).map_err(domain)?;
        let mat = format::read_matrix(target).map_err(domain)?;
        let v = linalg::verify_linear(&d, &mat).map_err(domain)?;
        return Ok(report_verification(&v, json, out));
    }
    let d: Decomposition = serde_json::from_str(decomposition).map_err(domain)?;
    let sparse_target = if format::looks_like_json(target) {
        has_key(target, "support")?
    } else {
        target.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).is_some_and(|l| l.contains("->"))
    };
    let v = if sparse_target {
        let p = format::read_sparse(target).map_err(domain)?;
        SparseDecomposition { grid: d }.verify(&p)
    } else {
        let p = format::read_grid(target).map_err(domain)?;
        verify_decomposition(&d, &p).map_err(domain)?
    };
    Ok(report_verification(&v, json, out))
}

fn sweep_posets(max: usize, json: bool, out: &mut String) -> Result<i32, Failure> {
    if max > 4 {
        return Err(usage("the sweep is limited to posets of size at most 4"));
    }
    let cases = poset::dichotomy_sweep(max).map_err(domain)?;
    let exceptions = cases.iter().filter(|c| !c.holds()).count();
    if json {
        #[derive(Serialize)]
        struct Sweep<'a> {
            max_size: usize,
            cases: &'a [poset::DichotomyCase],
            exceptions: usize,
        }
        *out += &to_json(&Sweep { max_size: max, cases: &cases, exceptions });
    } else {
        let _ = writeln!(out, "{:>4}  {:>7}  {:>5}  relations", "size", "trivial", "flip");
        for c in &cases {
            let rel: Vec<String> = c.relations.iter().map(|(a, b)| format!("{a}<{b}")).collect();
            let line = format!("{:>4}  {:>7}  {:>5}  {}", c.size, c.trivial, c.flip_in_closure, rel.join(" "));
            let _ = writeln!(out, "{}", line.trim_end());
        }
        let _ = writeln!(out, "{} posets, {exceptions} exceptions", cases.len());
    }
    Ok(i32::from(exceptions > 0))
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn render_decomposition(d: &Decomposition) -> String {
    let mut out = format!("order {} on a {}x{} grid (stages in application order)\n", d.order(), d.m, d.n);
    for (i, s) in d.stages.iter().enumerate() {
        let (what, label) = match s.kind {
            StageKind::L => ("column", "col"),
            StageKind::R => ("row", "row"),
        };
        let _ = writeln!(out, "stage {} {}: one permutation per {what}", i + 1, s.kind.letter());
        for (j, p) in s.perms.iter().enumerate() {
            let _ = writeln!(out, "  {label} {j}: {}", join(p));
        }
    }
    out
}

fn render_multi(d: &MultiDecomposition) -> String {
    let sched: Vec<String> = d.schedule().iter().map(usize::to_string).collect();
    let mut out = format!("dims {} schedule ({}) in application order\n", join(&d.dims), sched.join(","));
    for (i, s) in d.stages.iter().enumerate() {
        let _ = writeln!(out, "stage {} axis {}", i + 1, s.axis);
        for (f, p) in s.perms.iter().enumerate() {
            let _ = writeln!(out, "  fiber {f}: {}", join(p));
        }
    }
    out
}

fn render_linear(d: &LinearDecomposition) -> String {
    let order: String = d.stages.iter().map(|s| s.kind.letter()).collect();
    let mut out = format!(
        "{} over F_{} with split {}+{}: product of the stages below, left to right\n",
        order,
        d.stages[0].matrix.field().modulus(),
        d.split.m,
        d.split.n
    );
    for (i, s) in d.stages.iter().enumerate() {
        let _ = writeln!(out, "stage {} {}", i + 1, s.kind.letter());
        for line in s.matrix.to_string().lines() {
            let _ = writeln!(out, "  {line}");
        }
    }
    out
}

fn render_census(r: &CensusReport) -> String {
    let mut out = format!("Sym({}x{}) has {} elements\n", r.m, r.n, r.total);
    let _ = writeln!(out, "{:<10} {:>12}", "word", "size");
    for (w, s) in r.sizes.entries() {
        let _ = writeln!(out, "{w:<10} {s:>12}");
    }
    let _ = writeln!(out, "{:<10} {:>12}", "LR & RL", r.intersection_lr_rl);
    let _ = writeln!(out, "{:<10} {:>12}", "LR | RL", r.union_lr_rl);
    let _ = writeln!(out, "m!^n n!^m = {}", r.lr_formula);
    let _ = writeln!(out, "{:>5} {:>12} {:>12} {:>12} {:>12}", "level", "sigma", "pi", "delta", "union");
    for row in &r.hierarchy.rows {
        let _ = writeln!(out, "{:>5} {:>12} {:>12} {:>12} {:>12}", row.level, row.sigma, row.pi, row.delta, row.union);
    }
    let level = |l: Option<usize>| l.map_or("none".to_string(), |l| l.to_string());
    let _ = writeln!(
        out,
        "collapse level {}, join level {}",
        level(r.hierarchy.collapse_level),
        level(r.hierarchy.join_level)
    );
    out
}

fn render_census_csv(r: &CensusReport) -> String {
    let mut out = String::from("word,size\n");
    for (w, s) in r.sizes.entries() {
        let _ = writeln!(out, "{w},{s}");
    }
    out
}

fn render_lower_bound(r: &LowerBoundReport) -> String {
    let sched: Vec<String> = r.schedule.iter().map(usize::to_string).collect();
    let mut out = format!(
        "dims {} schedule ({}): product has {} of {} elements, {}\n",
        join(&r.dims),
        sched.join(","),
        r.product_size,
        r.total,
        if r.covered { "covered" } else { "not covered" }
    );
    if let Some(w) = &r.witness {
        out += "witness outside the product:\n";
        for line in format::write_multi(w).lines().skip(1) {
            let _ = writeln!(out, "  {line}");
        }
    }
    out
}

fn render_poset(r: &poset::PosetReport) -> String {
    let rel: Vec<String> = r.relations.iter().map(|(a, b)| format!("{a}<{b}")).collect();
    let mut out =
        format!("poset on {} elements: {}\n", r.size, if rel.is_empty() { "trivial".into() } else { rel.join(" ") });
    let _ = writeln!(out, "|Aut(P)| = {}, |Aut(P x P)| = {}", r.automorphisms, r.product_automorphisms);
    let _ =
        writeln!(out, "|G_L| = {}, |G_R| = {}, |G_L'| = {}, |G_R'| = {}", r.left, r.right, r.left_pure, r.right_pure);
    let _ = writeln!(out, "G_L = G_L': {}, G_R = G_R': {}", r.left_is_pure, r.right_is_pure);
    let _ = writeln!(
        out,
        "<G_L, G_R> has {} elements; flip generated: {}",
        r.flip.closure_size,
        if r.flip.flip_in_closure { "yes" } else { "no" }
    );
    out
}
