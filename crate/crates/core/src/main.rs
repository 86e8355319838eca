use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use smnorm::geometry::DomainShape;
use smnorm::harness::{
    compare_norms, compute_norm, grid_for, refinement_study, reports_to_csv, sweep, whitney_check, write_with_manifest,
    SweepConfig,
};
use smnorm::model::{read_gridfun, sample, validate_params, write_gridfun, CorpusSpec, ExtendedReal, KeyValueConfig, SampledFunction, SmoothnessParams, ValidatedParams};
use smnorm::morrey::RadiusLadder;
use smnorm::report::{BaseTerm, Route};
use smnorm::{Error, Result};

/// Smoothness quasi-norms of sampled functions.
#[derive(Parser)]
#[command(name = "smnorm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One quasi-norm by one route.
    Norm {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "diff")]
        route: Route,
        #[arg(long, default_value = "plain")]
        base: BaseTerm,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two routes on the same function and their ratio.
    Compare {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "lp")]
        route_a: Route,
        #[arg(long, default_value = "osc")]
        route_b: Route,
        #[arg(long, default_value = "plain")]
        base: BaseTerm,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross product of corpus, parameters and grid sizes from a key-value file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Both sides of the Whitney estimate on a convex domain.
    Whitney {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, default_value = "2")]
        v: ExtendedReal,
    },
    /// Totals of one route across grid sizes.
    Refine {
        #[arg(long)]
        func: CorpusSpec,
        #[arg(long, default_value = "torus")]
        domain: DomainShape,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [256usize, 512, 1024])]
        sizes: Vec<usize>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "osc")]
        route: Route,
        #[arg(long, default_value = "plain")]
        base: BaseTerm,
    },
    /// Sample a corpus function to a grid file.
    Gen {
        #[arg(long)]
        spec: CorpusSpec,
        #[arg(long, default_value = "torus")]
        domain: DomainShape,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Corpus function, e.g. `cos:1`, `random:7,8`, `cusp:0.5@0.3`.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    func: Option<CorpusSpec>,
    /// Grid file written by `gen`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "torus")]
    domain: DomainShape,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 256)]
    n: usize,
}

impl InputArgs {
    fn load(&self) -> Result<SampledFunction> {
        match (&self.func, &self.input) {
            (Some(spec), _) => sample(spec, &grid_for(&self.domain, self.d, self.n)?),
            (None, Some(path)) => {
                let f = read_gridfun(path)?;
                self.domain.check_grid(f.grid())?;
                Ok(f)
            }
            (None, None) => Err(Error::param("either --func or --input is required")),
        }
    }

    fn echo(&self, cfg: &mut KeyValueConfig) {
        if let Some(f) = &self.func {
            cfg.set("func", f);
        }
        if let Some(p) = &self.input {
            cfg.set("input", p.display());
        }
        cfg.set("domain", &self.domain);
    }
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 0.7, allow_negative_numbers = true)]
    s: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Defaults to `p`.
    #[arg(long)]
    u: Option<f64>,
    #[arg(long, default_value = "2")]
    q: ExtendedReal,
    #[arg(long, default_value = "2")]
    v: ExtendedReal,
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[arg(long, default_value = "1")]
    t_max: ExtendedReal,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// First level of the dyadic radius ladder.
    #[arg(long, default_value_t = 0)]
    ladder_jmin: u32,
}

impl ParamArgs {
    fn validate(&self, d: usize) -> Result<ValidatedParams> {
        validate_params(SmoothnessParams {
            d,
            s: self.s,
            u: self.u.unwrap_or(self.p),
            p: self.p,
            q: self.q,
            v: self.v,
            order: self.order,
            t_max: self.t_max,
            radius: self.radius,
        })
    }
}

fn manifest(params: &ValidatedParams, extra: impl FnOnce(&mut KeyValueConfig)) -> KeyValueConfig {
    let mut cfg = KeyValueConfig::default();
    extra(&mut cfg);
    for (k, v) in [
        ("d", params.d.to_string()),
        ("s", params.s.to_string()),
        ("p", params.p.to_string()),
        ("u", params.u.to_string()),
        ("q", params.q.to_string()),
        ("v", params.v.to_string()),
        ("order", params.order.to_string()),
        ("t_max", params.t_max.to_string()),
        ("radius", params.radius.to_string()),
        ("lower_bound", params.lower_bound.to_string()),
        ("tau", params.tau.to_string()),
        ("window_ok", params.window_ok.to_string()),
    ] {
        cfg.set(k, v);
    }
    cfg
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Norm { input, params, route, base, out } => {
            let f = input.load()?;
            let vp = params.validate(f.grid().dim())?;
            let ladder = RadiusLadder::starting_at(f.grid(), params.ladder_jmin)?;
            let rep = compute_norm(&f, &input.domain, &vp, route, base, &ladder)?;
            println!("{rep}");
            if let Some(path) = out {
                let m = manifest(&vp, |c| {
                    input.echo(c);
                    c.set("route", route);
                    c.set("base", base);
                });
                write_with_manifest(&path, &reports_to_csv(&[rep])?, &m)?;
            }
        }
        Command::Compare { input, params, route_a, route_b, base, out } => {
            let f = input.load()?;
            let vp = params.validate(f.grid().dim())?;
            let ladder = RadiusLadder::starting_at(f.grid(), params.ladder_jmin)?;
            let c = compare_norms(&f, &input.domain, &vp, route_a, route_b, base, &ladder)?;
            println!("{}\n{}\nratio {route_a}/{route_b} = {} (window_ok={})", c.a, c.b, c.ratio, c.window_ok);
            if let Some(path) = out {
                let m = manifest(&vp, |m| {
                    input.echo(m);
                    m.set("ratio", c.ratio);
                });
                write_with_manifest(&path, &reports_to_csv(&[c.a, c.b])?, &m)?;
            }
        }
        Command::Sweep { config, out } => {
            let cfg = SweepConfig::from_config(&KeyValueConfig::load(&config)?)?;
            let rep = sweep(&cfg)?;
            println!("{rep}");
            if let Some(path) = out {
                rep.write(&path)?;
            }
        }
        Command::Whitney { input, order, v } => {
            let f = input.load()?;
            let r = whitney_check(&f, &input.domain, order, v)?;
            println!("lhs={:.10e} rhs={:.10e} ratio={:.6}", r.lhs, r.rhs, r.ratio);
        }
        Command::Refine { func, domain, d, sizes, params, route, base } => {
            let vp = params.validate(domain.dim().unwrap_or(d))?;
            let rec = refinement_study(&func, &domain, d, route, &vp, base, &sizes, params.ladder_jmin)?;
            for (n, t) in rec.sizes.iter().zip(&rec.totals) {
                println!("n={n} total={t:.10e}");
            }
            for r in &rec.ratios {
                println!("ratio {r}");
            }
            println!("drift_flag={}", rec.drift_flag);
        }
        Command::Gen { spec, domain, d, n, out } => {
            let f = sample(&spec, &grid_for(&domain, d, n)?)?;
            write_gridfun(&f, &out)?;
            println!("wrote {} nodes of {spec} to {}", f.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
