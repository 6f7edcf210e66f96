use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use freeprod::agraph::{AGraph, Dart};
use freeprod::freegroup::verify_shnc;
use freeprod::instance::{parse_pool, InstanceFile, InstanceSpec};
use freeprod::magnus::embedding;
use freeprod::maxedges::{
    default_budget, find_all_certified, find_one_maximal_edge, is_good_cut,
    verify_edge_count_bound, BoundStatus, MaximalEdgeCertificate,
};
use freeprod::positive::{
    compare, factorize_u1_u2, is_positive, is_strongly_negative, is_strongly_positive,
    strongly_signed_cyclic_permutation, StrongSign,
};
use freeprod::pullback::{pullback, verify_theorem1};
use freeprod::sweep::{sweep, SweepOptions};
use freeprod::word::Word;
use freeprod::Error;

#[derive(Parser)]
#[command(
    name = "freeprod",
    version,
    about = "Subgroups of free products of ordered groups"
)]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced rank and a basis of a subgroup.
    Rank { file: PathBuf, subgroup: String },
    /// Intersections H1 ∩ sH2s⁻¹ over double cosets and the rank bound.
    Intersect {
        file: PathBuf,
        h1: String,
        h2: String,
    },
    #[command(subcommand)]
    Order(OrderCommand),
    #[command(subcommand)]
    Word(WordCommand),
    /// Maximal edges of the pullback of two subgroups.
    Maxedges {
        file: PathBuf,
        h1: String,
        h2: String,
        /// Spine and cycle length bound for the certified search.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Free-group intersection ranks against the embedded product side.
    Shnc {
        file: PathBuf,
        h1: Option<String>,
        h2: Option<String>,
    },
    /// Random sweep over generated instances.
    Verify(VerifyArgs),
    /// Writes a subgroup graph (or `H1*H2` for a pullback) in DOT format.
    ExportDot {
        file: PathBuf,
        graph: String,
        /// Output path, `-` for stdout.
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum OrderCommand {
    /// Compares two words: LT, EQ or GT.
    Cmp {
        file: PathBuf,
        w1: String,
        w2: String,
    },
    /// Prints the power series image of a word, truncated at a degree.
    Embed {
        file: PathBuf,
        w: String,
        #[arg(long)]
        degree: Option<usize>,
    },
}

#[derive(Subcommand)]
enum WordCommand {
    /// Strong sign, the U1·U2⁻¹ factorization and the signed rotation.
    Classify { file: PathBuf, w: String },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    count: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    min_factors: usize,
    #[arg(long, default_value_t = 4)]
    max_factors: usize,
    /// Only Z factors.
    #[arg(long)]
    z_only: bool,
    #[arg(long, default_value_t = 4)]
    max_gens: usize,
    #[arg(long, default_value_t = 2)]
    min_syllables: usize,
    #[arg(long, default_value_t = 8)]
    max_syllables: usize,
    /// Comma-separated exponents, e.g. `-1,1,1/2`.
    #[arg(long, allow_hyphen_values = true)]
    pool: Option<String>,
    #[arg(long, default_value_t = 200)]
    retries: usize,
    /// Draw H2 as a conjugate of a subgroup of H1.
    #[arg(long)]
    overlap: bool,
    /// Also run the certified maximal-edge search and the edge-count chain.
    #[arg(long)]
    edge_count: bool,
    /// Print only the summary line.
    #[arg(long)]
    quiet: bool,
}

enum Failure {
    Lib(Error),
    Input(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::FactorFreeViolation { .. }) => 3,
            Failure::Lib(Error::InternalDegreeBoundViolated(_)) | Failure::Invariant(_) => 4,
            Failure::Lib(_) | Failure::Input(_) => 2,
        }
    }
}

type Outcome = Result<(), Failure>;

fn load(path: &Path) -> Result<InstanceFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(InstanceFile::parse(&text)?)
}

fn emit(json: bool, value: Value, text: impl FnOnce() -> String) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("reports serialize")
        );
    } else {
        print!("{}", text());
    }
}

fn darts(ds: &[Dart]) -> Vec<String> {
    ds.iter().map(Dart::to_string).collect()
}

fn cert_json(e: usize, cert: &MaximalEdgeCertificate) -> Value {
    json!({
        "edge": e,
        "p": { "spine": darts(&cert.p.spine), "cycle": darts(&cert.p.cycle) },
        "q": { "spine": darts(&cert.q.spine), "cycle": darts(&cert.q.cycle) },
    })
}

fn cert_text(e: usize, cert: &MaximalEdgeCertificate) -> String {
    format!(
        "  e{e}: p = [{}]·[{}]^∞, q = [{}]·[{}]^∞\n",
        darts(&cert.p.spine).join(" "),
        darts(&cert.p.cycle).join(" "),
        darts(&cert.q.spine).join(" "),
        darts(&cert.q.cycle).join(" "),
    )
}

fn rank(json: bool, file: &Path, name: &str) -> Outcome {
    let f = load(file)?;
    let g = f.graph(name)?;
    let basis = g.basis();
    emit(
        json,
        json!({
            "subgroup": name,
            "reduced_rank": g.reduced_rank(),
            "euler_characteristic": g.euler_char(),
            "basis": basis.iter().map(Word::to_string).collect::<Vec<_>>(),
        }),
        || {
            let mut s = format!(
                "reduced rank: {}\nbasis size: {}\n",
                g.reduced_rank(),
                basis.len()
            );
            for w in &basis {
                s += &format!("  {w}\n");
            }
            s
        },
    );
    Ok(())
}

fn intersect(json: bool, file: &Path, h1: &str, h2: &str) -> Outcome {
    let f = load(file)?;
    let (g1, g2) = (f.graph(h1)?, f.graph(h2)?);
    let comps = pullback(&g1, &g2).components(&g1, &g2);
    let report = verify_theorem1(&g1, &g2);
    let verdict = if report.holds { "HOLDS" } else { "VIOLATED" };
    emit(
        json,
        json!({
            "components": comps.iter().map(|c| c.summary()).collect::<Vec<_>>(),
            "bound": report,
            "verdict": verdict,
        }),
        || {
            let mut s = format!("components: {}\n", comps.len());
            for (i, c) in comps.iter().enumerate() {
                s += &format!(
                    "  #{i}: rank {} representative {}\n",
                    c.rank, c.representative
                );
            }
            s + &format!(
                "total {} ≤ {}·{}: {verdict}\n",
                report.rank_pair, report.rank1, report.rank2
            )
        },
    );
    if report.holds {
        Ok(())
    } else {
        Err(Failure::Invariant("rank bound violated".into()))
    }
}

fn order_cmp(json: bool, file: &Path, w1: &str, w2: &str) -> Outcome {
    let f = load(file)?;
    let verdict = match compare(&f.word(w1)?, &f.word(w2)?)? {
        Ordering::Less => "LT",
        Ordering::Equal => "EQ",
        Ordering::Greater => "GT",
    };
    emit(json, json!({ "result": verdict }), || {
        format!("{verdict}\n")
    });
    Ok(())
}

fn order_embed(json: bool, file: &Path, w: &str, degree: Option<usize>) -> Outcome {
    let f = load(file)?;
    let w = f.word(w)?;
    let series = embedding(&w, degree.unwrap_or(w.len().max(1)));
    emit(json, json!({ "series": series.to_string() }), || {
        format!("{series}\n")
    });
    Ok(())
}

fn word_classify(json: bool, file: &Path, w: &str) -> Outcome {
    let f = load(file)?;
    let w = f.word(w)?;
    if w.is_empty() {
        return Err(Error::EmptyWord.into());
    }
    let (u1, u2) = factorize_u1_u2(&w)?;
    let rotation = if w.is_cyclically_reduced() {
        let (k, sign) = strongly_signed_cyclic_permutation(&w)?;
        let sign = match sign {
            StrongSign::StronglyPositive => "strongly positive",
            StrongSign::StronglyNegative => "strongly negative",
        };
        Some((k, w.rotate(k), sign))
    } else {
        None
    };
    let (pos, sp, sn) = (
        is_positive(&w)?,
        is_strongly_positive(&w)?,
        is_strongly_negative(&w)?,
    );
    emit(
        json,
        json!({
            "positive": pos,
            "strongly_positive": sp,
            "strongly_negative": sn,
            "u1": u1.to_string(),
            "u2": u2.to_string(),
            "rotation": rotation.as_ref().map(|(k, r, s)| json!({ "shift": k, "word": r.to_string(), "sign": s })),
        }),
        || {
            let mut s = format!(
                "positive: {pos}\nstrongly positive: {sp}\nstrongly negative: {sn}\nfactorization: U1 = {u1}, U2 = {u2}\n"
            );
            match &rotation {
                Some((k, r, sign)) => s += &format!("rotation {k}: {r} is {sign}\n"),
                None => s += "rotation: not cyclically reduced\n",
            }
            s
        },
    );
    Ok(())
}

fn maxedges(json: bool, file: &Path, h1: &str, h2: &str, budget: Option<usize>) -> Outcome {
    let f = load(file)?;
    let (g1, g2) = (f.graph(h1)?, f.graph(h2)?);
    let p = pullback(&g1, &g2);
    let g = &p.graph;
    let one = match find_one_maximal_edge(g) {
        Ok(found) => Some(found),
        Err(Error::ChiNonNegative) => None,
        Err(e) => return Err(e.into()),
    };
    let all = find_all_certified(g, budget.unwrap_or_else(|| default_budget(g)));
    let cut: BTreeSet<usize> = all.edges.keys().copied().collect();
    let good = is_good_cut(g, &cut);
    let chain = verify_edge_count_bound(&p, &g1, &g2, budget);
    let cut_ok = !all.complete || (good && cut.len() as i64 == -g.euler_char());
    emit(
        json,
        json!({
            "euler_characteristic": g.euler_char(),
            "constructed": one.as_ref().map(|(e, c)| cert_json(*e, c)),
            "certified": all.edges.iter().map(|(e, c)| cert_json(*e, c)).collect::<Vec<_>>(),
            "exhausted": all.exhausted,
            "complete": all.complete,
            "good_cut": good,
            "edge_count": chain,
        }),
        || {
            let mut s = format!(
                "pullback: {} edges, χ = {}\n",
                g.edge_count(),
                g.euler_char()
            );
            match &one {
                Some((e, c)) => s += &format!("constructed maximal edge:\n{}", cert_text(*e, c)),
                None => s += "constructed maximal edge: none (χ ≥ 0 on every component)\n",
            }
            s += &format!("certified maximal edges: {}\n", all.edges.len());
            for (e, c) in &all.edges {
                s += &cert_text(*e, c);
            }
            s += &format!(
                "exhausted: {}, complete: {}, good cut: {good}\n",
                all.exhausted, all.complete
            );
            s += &format!(
                "edge count: |D| = {}, |τ1(D)| = {}, |τ2(D)| = {}, |D1| = {}, |D2| = {}: {:?}\n",
                chain.pullback.certified,
                chain.images[0],
                chain.images[1],
                chain.inputs[0].certified,
                chain.inputs[1].certified,
                chain.status
            );
            s
        },
    );
    if !cut_ok || chain.status == BoundStatus::Violation {
        return Err(Failure::Invariant("maximal edge checks failed".into()));
    }
    Ok(())
}

fn shnc(json: bool, file: &Path, h1: Option<&str>, h2: Option<&str>) -> Outcome {
    let f = load(file)?;
    let block = f
        .free_group
        .as_ref()
        .ok_or_else(|| Failure::Input("no free_group block".into()))?;
    let first = block
        .subgroups
        .keys()
        .next()
        .ok_or_else(|| Failure::Input("free_group block has no subgroups".into()))?;
    let n1 = h1.unwrap_or(first);
    let n2 = h2.unwrap_or(n1);
    let r = verify_shnc(&f.free_subgroup(n1)?, &f.free_subgroup(n2)?)?;
    let verdict = if r.holds { "HOLDS" } else { "VIOLATED" };
    emit(json, json!({ "report": r, "verdict": verdict }), || {
        format!("free side A = {}\nproduct side B = {}\nbound r̄·r̄ = {}·{} = {}\n{} ≤ {} ≤ {}: {verdict}\n", r.a, r.b, r.rank1, r.rank2, r.bound, r.a, r.b, r.bound)
    });
    if r.holds {
        Ok(())
    } else {
        Err(Failure::Invariant("free-group chain violated".into()))
    }
}

fn verify(json: bool, a: &VerifyArgs) -> Outcome {
    let spec = InstanceSpec {
        seed: a.seed,
        min_factors: a.min_factors,
        max_factors: a.max_factors,
        z_only: a.z_only,
        max_gens: a.max_gens,
        min_syllables: a.min_syllables,
        max_syllables: a.max_syllables,
        pool: match &a.pool {
            Some(p) => parse_pool(p)?,
            None => freeprod::instance::default_pool(),
        },
        max_retries: a.retries,
        overlap: a.overlap,
    };
    if spec.min_factors > spec.max_factors || spec.min_syllables > spec.max_syllables {
        return Err(Failure::Input("minimum exceeds maximum".into()));
    }
    let out = sweep(
        &spec,
        a.count,
        SweepOptions {
            edge_count: a.edge_count,
        },
    );
    let skipped = out.iter().filter(|o| o.skipped()).count();
    let failed = out.iter().filter(|o| !o.ok()).count();
    let summary = format!(
        "checked {}, skipped {skipped}, failed {failed}\n",
        out.len() - skipped
    );
    emit(
        json,
        json!({ "instances": out, "skipped": skipped, "failed": failed }),
        || {
            let mut s = String::new();
            if !a.quiet {
                for o in &out {
                    s += &format!("#{:04} ", o.index);
                    match o.ranks {
                        None => s += &format!("skipped after {} rejections", o.rejections),
                        Some((r1, r2, r)) => {
                            s += &format!(
                                "r̄ {r1} {r2} pair {r} ≤ {} components {}",
                                r1 * r2,
                                o.components
                            )
                        }
                    }
                    if let Some(status) = o.edge_bound {
                        s += &format!(" edges {status:?}");
                    }
                    if o.ok() {
                        s += " ok\n";
                    } else {
                        s += &format!(" FAIL {}\n", o.failures.join("; "));
                    }
                }
            }
            s + &summary
        },
    );
    if failed > 0 {
        return Err(Failure::Invariant(format!("{failed} instances failed")));
    }
    Ok(())
}

fn export_dot(file: &Path, name: &str, out: &Path) -> Outcome {
    let f = load(file)?;
    let g: AGraph = match name.split_once('*') {
        Some((a, b)) => pullback(&f.graph(a)?, &f.graph(b)?).graph,
        None => f.graph(name)?,
    };
    let dot = g.to_dot(&name.replace('*', "_x_"));
    if out.as_os_str() == "-" {
        print!("{dot}");
    } else {
        std::fs::write(out, dot).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    let json = cli.json;
    match &cli.command {
        Command::Rank { file, subgroup } => rank(json, file, subgroup),
        Command::Intersect { file, h1, h2 } => intersect(json, file, h1, h2),
        Command::Order(OrderCommand::Cmp { file, w1, w2 }) => order_cmp(json, file, w1, w2),
        Command::Order(OrderCommand::Embed { file, w, degree }) => {
            order_embed(json, file, w, *degree)
        }
        Command::Word(WordCommand::Classify { file, w }) => word_classify(json, file, w),
        Command::Maxedges {
            file,
            h1,
            h2,
            budget,
        } => maxedges(json, file, h1, h2, *budget),
        Command::Shnc { file, h1, h2 } => shnc(json, file, h1.as_deref(), h2.as_deref()),
        Command::Verify(args) => verify(json, args),
        Command::ExportDot { file, graph, out } => export_dot(file, graph, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Input(m) | Failure::Invariant(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
