use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;
use topofair::complexes::{
    barycentric_subdivision, cross_polytope_sphere, kuhn_sphere, kuhn_triangulation, Triangulation, TriangulationJson,
};
use topofair::fairdiv::{
    cake_divide, cake_oracle, lazy_solve, rent_divide, rent_oracle, worker_wages, CakeMode, LazyProblem, Schedule,
    Valuation, WageProblem,
};
use topofair::fan::{
    balanced_fan_pairs, colorful_bipartite, consensus_halving, dimension_coloring, fan_search, gale_fan,
    multifan_dual, multilabeled_fan, Graph, HalvingOptions, Z2Complex,
};
use topofair::labelings::{
    random_fan, random_sperner, validate_compatible, validate_fan, validate_sperner, FanLabeling, Labeling,
    SpernerLabeling,
};
use topofair::multisperner::{bapat_signed_count, oriented_sperner_count, solve_distinct_labels, solve_popular_labels};
use topofair::rational::{parse, Rational};
use topofair_service::api::{router, App};
use topofair_service::store::Store;

#[derive(Parser)]
#[command(name = "topofair", version, about = "Sperner and Fan lemma solvers with fair-division front ends")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a triangulation.
    #[command(subcommand)]
    Tri(TriCmd),
    /// Generate or validate labelings.
    #[command(subcommand)]
    Label(LabelCmd),
    /// Multilabeled Sperner solvers and signed counts.
    #[command(subcommand)]
    Sperner(SpernerCmd),
    /// Divide a cake.
    Cake(CakeArgs),
    /// Split rent among roommates.
    Rent(RentArgs),
    /// Set wages for workers at factories with quotas.
    Wages(WagesArgs),
    /// Run an interactive session locally against automated players.
    Lazy(LazyArgs),
    /// Fan-type lemmas on centrally symmetric complexes.
    #[command(subcommand)]
    Fan(FanCmd),
    /// Consensus halving of families of interval measures.
    Halving(HalvingArgs),
    /// Graph solvers.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Start the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Subcommand)]
enum TriCmd {
    /// Kuhn triangulation of the simplex with n vertices, grid 1/k.
    Kuhn {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Boundary of the n-dimensional cross-polytope, subdivided r times.
    Sphere {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        r: usize,
    },
    /// L1-sphere with a Kuhn grid on every orthant facet.
    KuhnSphere {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Barycentric subdivision of a stored triangulation.
    Sd {
        #[arg(long)]
        tri: PathBuf,
    },
}

#[derive(Subcommand)]
enum LabelCmd {
    /// Random Sperner labeling of a simplex triangulation.
    RandomSperner {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random Fan labeling of a symmetric triangulation with labels in ±1..=bound.
    RandomFan {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        bound: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Validate one labeling or a list of labelings; lists of Fan labelings
    /// are also checked for compatibility.
    Validate {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        labelings: PathBuf,
    },
}

#[derive(Subcommand)]
enum SpernerCmd {
    /// Simplex where labeling i shows k_i labels (--k) or label j is used
    /// by l_j labelings (--l).
    Solve {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        labelings: PathBuf,
        #[arg(long, value_delimiter = ',', conflicts_with = "l", required_unless_present = "l")]
        k: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        l: Option<Vec<usize>>,
    },
    /// Oriented count for one labeling, signed count for n labelings.
    Count {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        labelings: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    EnvyFree,
    Survivor,
    Secretive,
}

#[derive(Args)]
struct Refine {
    /// Tolerance, e.g. 1/1000000 or 1e-6.
    #[arg(long, default_value = "1/1000000")]
    eps: String,
    #[arg(long, default_value_t = Schedule::default().start)]
    start: usize,
    #[arg(long, default_value_t = Schedule::default().cap)]
    cap: usize,
}

impl Refine {
    fn eps(&self) -> Result<Rational> {
        rational(&self.eps)
    }

    fn schedule(&self) -> Schedule {
        Schedule { start: self.start, cap: self.cap }
    }
}

#[derive(Args)]
struct CakeArgs {
    /// JSON list of valuations `{"breakpoints": [...], "densities": [...]}`.
    #[arg(long)]
    valuations: PathBuf,
    #[arg(long, value_enum, default_value = "envy-free")]
    mode: Mode,
    /// p (secretive) or q (survivor); defaults to the number of players.
    #[arg(long)]
    param: Option<usize>,
    #[command(flatten)]
    refine: Refine,
}

#[derive(Args)]
struct RentArgs {
    /// JSON matrix `values[player][room]`.
    #[arg(long)]
    values: PathBuf,
    #[arg(long)]
    total: String,
    #[command(flatten)]
    refine: Refine,
}

#[derive(Args)]
struct WagesArgs {
    /// JSON `{"quotas": [...], "budget": B, "utilities": [[w_ij]]}`.
    #[arg(long)]
    problem: PathBuf,
    #[command(flatten)]
    refine: Refine,
}

#[derive(Args)]
struct LazyArgs {
    /// JSON lazy problem, e.g. `{"kind": "cake", "mode": "survivor", "param": 2, "players": 3}`.
    #[arg(long)]
    problem: PathBuf,
    /// Valuations (cake) or a value matrix (rent) answering the queries.
    #[arg(long)]
    preferences: PathBuf,
}

#[derive(Args)]
struct Sym {
    /// Symmetric triangulation (with an involution).
    #[arg(long)]
    tri: PathBuf,
    /// Declared Z2-index; defaults to the dimension of the triangulation.
    #[arg(long)]
    index: Option<usize>,
}

impl Sym {
    fn load(&self) -> Result<(Triangulation, Z2Complex)> {
        let t = load_tri(&self.tri)?;
        let k = Z2Complex::from_triangulation(&t, self.index.unwrap_or(t.dim))?;
        Ok((t, k))
    }
}

#[derive(Subcommand)]
enum FanCmd {
    /// Negative alternating simplex of dimension d.
    Search {
        #[command(flatten)]
        sym: Sym,
        #[arg(long)]
        labeling: PathBuf,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Simplex with a d_i-dimensional alternating face for every labeling.
    Multi {
        #[command(flatten)]
        sym: Sym,
        #[arg(long)]
        labelings: PathBuf,
        #[arg(long, value_delimiter = ',')]
        d: Vec<usize>,
    },
    /// Simplex carrying alternating labels with popularity bounds ell.
    Dual {
        #[command(flatten)]
        sym: Sym,
        #[arg(long)]
        labelings: PathBuf,
        #[arg(long, value_delimiter = ',')]
        ell: Vec<usize>,
    },
    /// Simplex and bijection realizing the sign vector alpha.
    Gale {
        #[command(flatten)]
        sym: Sym,
        #[arg(long)]
        labelings: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<i32>,
    },
    /// Balanced pairs under the dimension coloring.
    Balanced {
        #[command(flatten)]
        sym: Sym,
        #[arg(long)]
        labelings: PathBuf,
    },
}

#[derive(Args)]
struct HalvingArgs {
    /// JSON list of families, each a list of valuations.
    #[arg(long)]
    measures: PathBuf,
    /// Number of intervals.
    #[arg(long)]
    n: usize,
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, default_value = "1/10000")]
    eps: String,
    #[arg(long, default_value_t = HalvingOptions::default().max_simplices)]
    max_simplices: usize,
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Colorful complete bipartite subgraphs, one per coloring.
    Colorful {
        /// JSON `{"vertices": n, "edges": [[u, v], ...]}`, or `K<n>`.
        #[arg(long)]
        graph: String,
        /// JSON list of colorings (colors are positive integers).
        #[arg(long)]
        colorings: PathBuf,
        #[arg(long, value_delimiter = ',')]
        d: Vec<usize>,
        /// Declared index of the Hom complex; n - 2 for K_n.
        #[arg(long)]
        index: usize,
    },
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, env = "STORE_DIR", default_value = "./sessions")]
    store_dir: PathBuf,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
}

fn rational(s: &str) -> Result<Rational> {
    parse(s).map_err(|e| anyhow::anyhow!(e))
}

fn read_json<T: DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_tri(path: &PathBuf) -> Result<Triangulation> {
    Ok(Triangulation::from_json(read_json::<TriangulationJson>(path)?)?)
}

/// A single labeling or a list of them.
fn load_labelings(path: &PathBuf) -> Result<Vec<Labeling>> {
    let v: serde_json::Value = read_json(path)?;
    Ok(match v {
        serde_json::Value::Array(_) => serde_json::from_value(v)?,
        _ => vec![serde_json::from_value(v)?],
    })
}

fn sperner_labelings(path: &PathBuf) -> Result<Vec<SpernerLabeling>> {
    load_labelings(path)?
        .into_iter()
        .map(|l| match l {
            Labeling::Sperner(s) => Ok(s),
            Labeling::Fan(_) => bail!("expected Sperner labelings"),
        })
        .collect()
}

fn fan_labelings(path: &PathBuf) -> Result<Vec<FanLabeling>> {
    load_labelings(path)?
        .into_iter()
        .map(|l| match l {
            Labeling::Fan(f) => Ok(f),
            Labeling::Sperner(_) => bail!("expected Fan labelings"),
        })
        .collect()
}

fn print<T: Serialize>(v: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(v)?) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Tri(c) => {
            let t = match c {
                TriCmd::Kuhn { n, k } => kuhn_triangulation(n, k)?,
                TriCmd::Sphere { n, r } => cross_polytope_sphere(n, r)?,
                TriCmd::KuhnSphere { n, k } => kuhn_sphere(n, k)?,
                TriCmd::Sd { tri } => barycentric_subdivision(&load_tri(&tri)?),
            };
            print(&t.to_json())
        }
        Cmd::Label(c) => match c {
            LabelCmd::RandomSperner { tri, seed } => {
                let t = load_tri(&tri)?;
                print(&Labeling::Sperner(random_sperner(&t, &mut ChaCha8Rng::seed_from_u64(seed))?))
            }
            LabelCmd::RandomFan { tri, bound, seed } => {
                let t = load_tri(&tri)?;
                print(&Labeling::Fan(random_fan(&t, bound, &mut ChaCha8Rng::seed_from_u64(seed))?))
            }
            LabelCmd::Validate { tri, labelings } => {
                let t = load_tri(&tri)?;
                let labs = load_labelings(&labelings)?;
                let mut reports = Vec::new();
                let mut fans = Vec::new();
                for l in &labs {
                    reports.push(match l {
                        Labeling::Sperner(s) => serde_json::to_value(validate_sperner(&t, s)?)?,
                        Labeling::Fan(f) => {
                            fans.push(f.clone());
                            serde_json::to_value(validate_fan(&t, f)?)?
                        }
                    });
                }
                let compatible = if fans.len() > 1 { Some(validate_compatible(&t, &fans)?) } else { None };
                print(&json!({ "violations": reports, "compatible": compatible }))
            }
        },
        Cmd::Sperner(c) => match c {
            SpernerCmd::Solve { tri, labelings, k, l } => {
                let t = load_tri(&tri)?;
                let labs = sperner_labelings(&labelings)?;
                match (k, l) {
                    (Some(k), _) => print(&solve_distinct_labels(&t, &labs, &k)?),
                    (None, Some(l)) => print(&solve_popular_labels(&t, &labs, &l)?),
                    (None, None) => bail!("pass --k or --l"),
                }
            }
            SpernerCmd::Count { tri, labelings } => {
                let t = load_tri(&tri)?;
                let labs = sperner_labelings(&labelings)?;
                let c = if labs.len() == 1 { oriented_sperner_count(&t, &labs[0])? } else { bapat_signed_count(&t, &labs)? };
                print(&json!({ "positive": c.positive, "negative": c.negative, "diff": c.diff() }))
            }
        },
        Cmd::Cake(a) => {
            let vals: Vec<Valuation> = read_json(&a.valuations)?;
            let mode = match a.mode {
                Mode::EnvyFree => CakeMode::EnvyFree,
                Mode::Survivor => CakeMode::Survivor,
                Mode::Secretive => CakeMode::Secretive,
            };
            let param = a.param.unwrap_or(vals.len());
            print(&cake_divide(&vals, mode, param, &a.refine.eps()?, a.refine.schedule())?)
        }
        Cmd::Rent(a) => {
            let values = matrix(read_json(&a.values)?);
            print(&rent_divide(&values, &rational(&a.total)?, &a.refine.eps()?, a.refine.schedule())?)
        }
        Cmd::Wages(a) => {
            let prob: WageProblem = read_json(&a.problem)?;
            print(&worker_wages(&prob, &a.refine.eps()?, a.refine.schedule())?)
        }
        Cmd::Lazy(a) => {
            let problem: LazyProblem = read_json(&a.problem)?;
            let prefs: serde_json::Value = read_json(&a.preferences)?;
            let (outcome, answers) = match &problem.kind {
                topofair::fairdiv::LazyKind::Cake { .. } => {
                    let vals: Vec<Valuation> = serde_json::from_value(prefs)?;
                    lazy_solve(&problem, cake_oracle(&vals))?
                }
                topofair::fairdiv::LazyKind::Rent { .. } => {
                    let values = matrix(serde_json::from_value(prefs)?);
                    lazy_solve(&problem, rent_oracle(&values))?
                }
            };
            print(&json!({ "outcome": outcome, "queries": answers.len(), "answers": answers }))
        }
        Cmd::Fan(c) => match c {
            FanCmd::Search { sym, labeling, d } => {
                let (_, k) = sym.load()?;
                let labs = fan_labelings(&labeling)?;
                let [lab] = labs.as_slice() else { bail!("expected exactly one Fan labeling") };
                print(&fan_search(&k, lab, d.unwrap_or(k.declared_index))?)
            }
            FanCmd::Multi { sym, labelings, d } => {
                let (_, k) = sym.load()?;
                print(&multilabeled_fan(&k, &fan_labelings(&labelings)?, &d)?)
            }
            FanCmd::Dual { sym, labelings, ell } => {
                let (_, k) = sym.load()?;
                print(&multifan_dual(&k, &fan_labelings(&labelings)?, &ell)?)
            }
            FanCmd::Gale { sym, labelings, alpha } => {
                let (_, k) = sym.load()?;
                print(&gale_fan(&k, &fan_labelings(&labelings)?, &alpha)?)
            }
            FanCmd::Balanced { sym, labelings } => {
                let (t, k) = sym.load()?;
                print(&balanced_fan_pairs(&k, &dimension_coloring(&t), &fan_labelings(&labelings)?)?)
            }
        },
        Cmd::Halving(a) => {
            let fams: Vec<Vec<Valuation>> = read_json(&a.measures)?;
            let opts = HalvingOptions { max_simplices: a.max_simplices, ..HalvingOptions::default() };
            print(&consensus_halving(&fams, a.n, &a.k, &rational(&a.eps)?, opts)?)
        }
        Cmd::Graph(GraphCmd::Colorful { graph, colorings, d, index }) => {
            let g = match graph.strip_prefix('K').and_then(|n| n.parse::<usize>().ok()) {
                Some(n) => Graph::complete(n),
                None => read_json(&PathBuf::from(graph))?,
            };
            let cs: Vec<Vec<usize>> = read_json(&colorings)?;
            print(&colorful_bipartite(&g, &cs, &d, index)?)
        }
        Cmd::Serve(a) => serve(a),
    }
}

/// A rational in any accepted wire form.
#[derive(serde::Deserialize)]
#[serde(transparent)]
struct RationalIn(#[serde(with = "topofair::rational::serde_q")] Rational);

fn matrix(rows: Vec<Vec<RationalIn>>) -> Vec<Vec<Rational>> {
    rows.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect()
}

fn serve(a: ServeArgs) -> Result<()> {
    let app = App::open(Store::open(&a.store_dir)?)?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind((a.host.as_str(), a.port)).await?;
        eprintln!("listening on {} (store {})", listener.local_addr()?, a.store_dir.display());
        axum::serve(listener, router(app)).await?;
        Ok(())
    })
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
