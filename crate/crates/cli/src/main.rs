mod laws;
mod output;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geostein::bounds::validity_sweep;
use geostein::models::gsum::{gsum_coupling_report, gsum_dominance, gsum_dominance_nonneg};
use geostein::models::gw::{gw_tv_experiment, OffspringLaw, DEFAULT_TAIL_BUDGET};
use geostein::models::pa::{
    pa_coupling_experiment, pa_fixed_vertex_experiment, pa_mixture_experiment, yule_mixture_check,
};
use geostein::models::ua::ua_experiment;
use geostein::pmf::shift_tv;
use geostein::stein::{default_window, solve};
use geostein::transforms::{equilibrium_nonneg, equilibrium_pos, size_bias, smoothness};
use geostein::{distances, Execution, Pmf, SeededRng, Truncation};
use serde_json::{json, Value};

use laws::parse_law;
use output::{write_artifacts, Format, Manifest, Results, Table};

#[derive(Parser)]
#[command(name = "geostein", version, about = "Geometric approximation experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Master seed for every Monte Carlo stream.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Tail mass at which unbounded laws are cut.
    #[arg(long, global = true, default_value_t = geostein::pmf::DEFAULT_TRUNC_EPS)]
    trunc_eps: f64,
    /// Output directory.
    #[arg(long, global = true, env = "GEOSTEIN_OUT_DIR", default_value = "geostein-out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Monte Carlo replications per coupling estimate (0 skips them).
    #[arg(long, global = true, default_value_t = 100_000)]
    reps: usize,
    /// Independent RNG shards; results depend on this, not on thread count.
    #[arg(long, global = true, env = "GEOSTEIN_SHARDS", default_value_t = 32)]
    shards: usize,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    /// Validate inputs and print the resolved settings without running.
    #[arg(long, global = true)]
    check: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Distances between two laws.
    Dist {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Size-bias, equilibrium transforms or smoothness of a law.
    Transform {
        #[arg(long)]
        law: String,
        #[arg(long, value_enum)]
        kind: TransformKind,
    },
    /// Solve the geometric Stein equation and check its identities.
    SteinCheck {
        /// Target set, e.g. `1,3,4`.
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<i64>,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Geometric sums: exact bound checks and Monte Carlo coupling bounds.
    Gsum {
        /// Summand law; repeat for a periodic non-identical sequence.
        #[arg(long, required = true)]
        law: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.5,0.9")]
        a_grid: Vec<f64>,
        /// Support start of the geometric count and the summands (0 or 1).
        #[arg(long, default_value_t = 1)]
        start: u8,
        /// Label used in the row tags.
        #[arg(long, default_value = "x")]
        name: String,
    },
    /// Critical Galton-Watson conditioned on survival.
    Gw {
        #[arg(long)]
        offspring: String,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_TAIL_BUDGET)]
        budget: f64,
    },
    /// Uniform attachment degree of a uniformly chosen vertex.
    Ua {
        #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,25,50,100,500")]
        n_grid: Vec<usize>,
    },
    /// Preferential attachment degree of a fixed vertex.
    PaFixed {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64,128,200")]
        i_grid: Vec<usize>,
        /// Also run the coupled sampler bound per vertex.
        #[arg(long)]
        coupling: bool,
    },
    /// Preferential attachment degree of a uniformly chosen vertex.
    PaMixture {
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
        n_grid: Vec<usize>,
    },
    /// Yule-Simon law as a geometric mixture, by quadrature.
    YuleCheck {
        #[arg(long, default_value_t = 100)]
        kmax: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Largest accepted pointwise error.
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
    },
    /// Exact bound checks on random laws.
    SweepValidity {
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Largest support length of a random law.
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformKind {
    SizeBias,
    Equilibrium,
    Equilibrium0,
    Smoothness,
}

impl TransformKind {
    fn as_str(self) -> &'static str {
        match self {
            TransformKind::SizeBias => "size-bias",
            TransformKind::Equilibrium => "equilibrium",
            TransformKind::Equilibrium0 => "equilibrium0",
            TransformKind::Smoothness => "smoothness",
        }
    }
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Dist { .. } => "dist",
            Cmd::Transform { .. } => "transform",
            Cmd::SteinCheck { .. } => "stein-check",
            Cmd::Gsum { .. } => "gsum",
            Cmd::Gw { .. } => "gw",
            Cmd::Ua { .. } => "ua",
            Cmd::PaFixed { .. } => "pa-fixed",
            Cmd::PaMixture { .. } => "pa-mixture",
            Cmd::YuleCheck { .. } => "yule-check",
            Cmd::SweepValidity { .. } => "sweep-validity",
        }
    }
}

struct Ctx {
    trunc: Truncation,
    rng: SeededRng,
    reps: usize,
    shards: usize,
    exec: Execution,
    params: BTreeMap<String, Value>,
}

impl Ctx {
    fn param(&mut self, name: &str, v: impl serde::Serialize) {
        self.params
            .insert(name.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }
}

type Run = Box<dyn FnOnce(&Ctx) -> Result<Results, String>>;

fn lib<T>(r: geostein::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn nonempty<T>(grid: &[T], what: &str) -> Result<(), String> {
    require(!grid.is_empty(), || format!("{what} is empty"))
}

/// Validates the verb's inputs and returns the deferred computation.
fn plan(cmd: Cmd, ctx: &mut Ctx) -> Result<Run, String> {
    let trunc = ctx.trunc;
    Ok(match cmd {
        Cmd::Dist { p, q } => {
            ctx.param("p", &p);
            ctx.param("q", &q);
            let (p, q) = (parse_law(&p, trunc)?, parse_law(&q, trunc)?);
            Box::new(move |_| {
                let d = distances(&p, &q);
                let (lo, hi) = d.tv_interval();
                let mut table = Table::new(&["tv", "tv_lower", "tv_upper", "kolmogorov", "local", "truncation_slack"]);
                table.push([d.tv, lo, hi, d.kolmogorov, d.local, d.truncation_slack].map(fmt).to_vec());
                let checks = vec![(format!("tv={:.6e} in [{lo:.6e}, {hi:.6e}]", d.tv), None)];
                Ok(Results::Table { table, checks })
            })
        }
        Cmd::Transform { law, kind } => {
            ctx.param("law", &law);
            ctx.param("kind", kind.as_str());
            let law = parse_law(&law, trunc)?;
            Box::new(move |_| transform(&law, kind))
        }
        Cmd::SteinCheck { target, p, window } => {
            require(p > 0.0 && p <= 1.0, || format!("p must lie in (0, 1], got {p}"))?;
            let target: BTreeSet<i64> = target.into_iter().collect();
            require(target.iter().all(|&k| k >= 1), || {
                "target set must contain positive integers only".into()
            })?;
            let window = window.unwrap_or_else(|| default_window(&target, p));
            ctx.param("target", &target);
            ctx.param("p", p);
            ctx.param("window", window);
            Box::new(move |_| stein_check(&target, p, window))
        }
        Cmd::Gsum { law, a_grid, start, name } => {
            nonempty(&a_grid, "a-grid")?;
            for &a in &a_grid {
                require(a > 0.0 && a <= 1.0, || format!("a must lie in (0, 1], got {a}"))?;
            }
            require(start <= 1, || format!("start must be 0 or 1, got {start}"))?;
            require(start == 1 || law.len() == 1, || {
                "start 0 supports a single summand law only".into()
            })?;
            ctx.param("law", &law);
            ctx.param("a_grid", &a_grid);
            ctx.param("start", start);
            ctx.param("name", &name);
            let laws = law
                .iter()
                .map(|l| parse_law(l, trunc))
                .collect::<Result<Vec<_>, _>>()?;
            for x in &laws {
                require(x.min_support() >= start as i64, || {
                    format!("summand support must start at {start} or above, found {}", x.min_support())
                })?;
            }
            Box::new(move |ctx| {
                let mut rows = Vec::new();
                for (j, &a) in a_grid.iter().enumerate() {
                    if laws.len() == 1 {
                        rows.extend(lib(if start == 1 {
                            gsum_dominance(&name, &laws[0], a)
                        } else {
                            gsum_dominance_nonneg(&name, &laws[0], a)
                        })?);
                    }
                    if start == 1 && ctx.reps > 0 {
                        let rng = ctx.rng.split(j as u64);
                        rows.extend(lib(gsum_coupling_report(
                            &name, &laws, a, &rng, ctx.reps, ctx.shards, ctx.exec,
                        ))?);
                    }
                }
                Ok(Results::Reports(rows))
            })
        }
        Cmd::Gw { offspring, n_grid, budget } => {
            nonempty(&n_grid, "n-grid")?;
            require(budget > 0.0 && budget < 1.0, || format!("budget must lie in (0, 1), got {budget}"))?;
            ctx.param("offspring", &offspring);
            ctx.param("n_grid", &n_grid);
            ctx.param("budget", budget);
            let off = lib(OffspringLaw::new(parse_law(&offspring, trunc)?))?;
            lib(off.require_critical())?;
            Box::new(move |ctx| Ok(Results::Reports(lib(gw_tv_experiment(&off, &n_grid, budget, ctx.trunc))?)))
        }
        Cmd::Ua { n_grid } => {
            nonempty(&n_grid, "n-grid")?;
            require(n_grid.iter().all(|&n| n >= 1), || "n must be at least 1".into())?;
            ctx.param("n_grid", &n_grid);
            Box::new(move |ctx| Ok(Results::Reports(lib(ua_experiment(&n_grid, ctx.trunc))?)))
        }
        Cmd::PaFixed { n, i_grid, coupling } => {
            nonempty(&i_grid, "i-grid")?;
            require(n >= 1, || "n must be at least 1".into())?;
            for &i in &i_grid {
                require((1..=n).contains(&i), || format!("vertex i = {i} outside 1..={n}"))?;
            }
            ctx.param("n", n);
            ctx.param("i_grid", &i_grid);
            ctx.param("coupling", coupling);
            Box::new(move |ctx| {
                let mut rows = lib(pa_fixed_vertex_experiment(n, &i_grid, ctx.trunc, ctx.exec))?;
                if coupling && ctx.reps > 0 {
                    rows.extend(lib(pa_coupling_experiment(
                        n, &i_grid, &ctx.rng, ctx.reps, ctx.shards, ctx.exec,
                    ))?);
                }
                Ok(Results::Reports(rows))
            })
        }
        Cmd::PaMixture { n_grid } => {
            nonempty(&n_grid, "n-grid")?;
            require(n_grid.iter().all(|&n| n >= 2), || "n must be at least 2".into())?;
            ctx.param("n_grid", &n_grid);
            Box::new(move |ctx| Ok(Results::Reports(lib(pa_mixture_experiment(&n_grid, ctx.exec))?)))
        }
        Cmd::YuleCheck { kmax, tol, threshold } => {
            require(kmax >= 1, || "kmax must be at least 1".into())?;
            require(tol > 0.0, || format!("tol must be positive, got {tol}"))?;
            ctx.param("kmax", kmax);
            ctx.param("tol", tol);
            ctx.param("threshold", threshold);
            Box::new(move |_| {
                let err = lib(yule_mixture_check(kmax, tol))?;
                let mut table = Table::new(&["kmax", "max_error"]);
                table.push(vec![kmax.to_string(), fmt(err)]);
                let line = format!("yule mixture kmax={kmax} max_error={err:.3e} threshold={threshold:.1e}");
                Ok(Results::Table { table, checks: vec![(line, Some(err <= threshold))] })
            })
        }
        Cmd::SweepValidity { count, max_len, tol } => {
            require(count >= 1, || "count must be at least 1".into())?;
            require(max_len >= 1, || "max-len must be at least 1".into())?;
            ctx.param("count", count);
            ctx.param("max_len", max_len);
            ctx.param("tol", tol);
            Box::new(move |ctx| Ok(Results::Reports(lib(validity_sweep(&ctx.rng, count, max_len, tol, ctx.exec))?)))
        }
    })
}

fn law_table(p: &Pmf) -> Table {
    let mut table = Table::new(&["k", "p"]);
    for (k, v) in p.iter() {
        table.push(vec![k.to_string(), fmt(v)]);
    }
    table
}

fn transform(law: &Pmf, kind: TransformKind) -> Result<Results, String> {
    let out = match kind {
        TransformKind::SizeBias => lib(size_bias(law))?,
        TransformKind::Equilibrium => lib(equilibrium_pos(law))?,
        TransformKind::Equilibrium0 => lib(equilibrium_nonneg(law))?,
        TransformKind::Smoothness => {
            let s = smoothness(law);
            let mut table = Table::new(&["s1", "s2", "shift_tv"]);
            table.push(vec![fmt(s.s1), fmt(s.s2), fmt(shift_tv(law))]);
            let checks = vec![(format!("s1={:.6e} s2={:.6e}", s.s1, s.s2), None)];
            return Ok(Results::Table { table, checks });
        }
    };
    let checks = vec![
        (format!("{} of law with mean {:.6}", kind.as_str(), lib(law.mean())?), None),
        (format!("support {}..={} tail_mass={:.1e}", out.min_support(), out.max_support(), out.tail_mass()), None),
    ];
    Ok(Results::Table { table: law_table(&out), checks })
}

fn stein_check(target: &BTreeSet<i64>, p: f64, window: usize) -> Result<Results, String> {
    let s = lib(solve(target, p, window))?;
    let mut table = Table::new(&["k", "f"]);
    for (k, v) in s.values().iter().enumerate() {
        table.push(vec![k.to_string(), fmt(*v)]);
    }
    let worst = |r: Vec<f64>| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (res, shifted) = (worst(s.residuals()), worst(s.shifted_residuals()));
    let g = s.gradient_bounds();
    let mut checks = vec![
        (format!("residual max={res:.2e}"), Some(res <= 1e-12)),
        (format!("shifted residual max={shifted:.2e}"), Some(shifted <= 1e-12)),
        (format!("sup |grad f|={:.6}", g.sup_grad), Some(g.sup_grad <= 1.0 + 1e-12)),
    ];
    if let Some(a) = g.sup_abs {
        checks.push((format!("sup |f|={a:.6}"), Some(a <= 1.0 + 1e-12)));
    }
    Ok(Results::Table { table, checks })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    let name = cli.cmd.name();
    match run(cli.cmd, &g, name) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd, g: &Global, name: &str) -> Result<ExitCode, String> {
    require(g.trunc_eps > 0.0 && g.trunc_eps < 1.0, || {
        format!("trunc-eps must lie in (0, 1), got {}", g.trunc_eps)
    })?;
    require(g.shards >= 1, || "shards must be at least 1".into())?;
    let mut ctx = Ctx {
        trunc: Truncation::with_eps(g.trunc_eps),
        rng: SeededRng::new(g.seed),
        reps: g.reps,
        shards: g.shards,
        exec: if g.sequential { Execution::Sequential } else { Execution::Parallel },
        params: BTreeMap::new(),
    };
    let job = plan(cmd, &mut ctx)?;
    let manifest = Manifest {
        tool: "geostein",
        version: env!("CARGO_PKG_VERSION"),
        library_version: geostein::VERSION,
        experiment: name.to_string(),
        seed: g.seed,
        trunc_eps: ctx.trunc.eps,
        support_cap: ctx.trunc.support_cap,
        reps: g.reps,
        shards: g.shards,
        format: g.format,
        params: std::mem::take(&mut ctx.params),
        results_file: String::new(),
        rows: 0,
        hard_failures: 0,
    };
    if g.check {
        let settings = json!({
            "manifest": &manifest,
            "out": g.out.display().to_string(),
            "parallel": ctx.exec.is_parallel(),
        });
        println!("{}", serde_json::to_string_pretty(&settings).map_err(|e| e.to_string())?);
        return Ok(ExitCode::SUCCESS);
    }
    let results = job(&ctx)?;
    write_artifacts(&g.out, name, g.format, &results, manifest)?;
    print!("{}", results.summary());
    Ok(if results.hard_failures() > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}
