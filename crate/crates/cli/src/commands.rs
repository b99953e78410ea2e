use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use whiplab::analytic;
use whiplab::bench::{cusp_peaks, cusp_scan, env_info, fit_decay, scaling_run, truncation_transition};
use whiplab::lattice::{CycleStyle, Site};
use whiplab::par::Exec;
use whiplab::propagation::TruncationPolicy;
use whiplab::scan::{self, CircuitSpec, Engine, ObservableSpec, ScanConfig};
use whiplab::statevector::run_circuit_with;
use whiplab::verify::{self, Suite};
use whiplab::vqe::{self, Ansatz, VqeResult};
use whiplab::wala::WalaVariant;

use crate::args::{
    AnsatzArg, BenchCmd, CircuitArg, Cli, CountCmd, EngineArg, ModelArg, ScanArgs, StyleArg, VariantArg, VerifyArgs,
    VqeArgs,
};
use crate::output::{emit, write_atomic, Cell, Table};
use crate::CliError;

/// Global settings shared by every subcommand.
pub struct Ctx<'a> {
    pub cli: &'a Cli,
    pub exec: Exec,
}

impl Ctx<'_> {
    fn finish(&self, mut table: Table) -> Result<(), CliError> {
        if self.cli.no_timing {
            table.drop_column("wall_ns");
        }
        emit(&table.render(self.cli.format), self.cli.out.as_deref())?;
        Ok(())
    }

    fn header(&self, table: &mut Table, command: &str) {
        table.meta("whiplab", env!("CARGO_PKG_VERSION"));
        table.meta("command", command);
    }
}

fn circuit_spec(a: &ScanArgs) -> Result<CircuitSpec, CliError> {
    let need_l = || a.l.ok_or_else(|| CliError::Config(format!("--L is required for --circuit {:?}", a.circuit)));
    Ok(match a.circuit {
        CircuitArg::Whip1d => CircuitSpec::Whip { d: 1, l: need_l()? },
        CircuitArg::Whip2d => CircuitSpec::Whip { d: 2, l: need_l()? },
        CircuitArg::Whip3d => CircuitSpec::Whip { d: 3, l: need_l()? },
        CircuitArg::Nopt => CircuitSpec::NoPt { l: need_l()? },
        CircuitArg::Cycle => CircuitSpec::Cycle {
            n: need_l()?,
            style: match a.style {
                StyleArg::UniformHalf => CycleStyle::UniformHalf,
                StyleArg::Bipolar => CycleStyle::Bipolar,
            },
        },
        CircuitArg::Wala => CircuitSpec::Wala {
            variant: match a.variant {
                VariantArg::WithPt => WalaVariant::WithPt,
                VariantArg::WithoutPt => WalaVariant::WithoutPt,
            },
        },
    })
}

fn parse_site(s: &str) -> Result<Site, CliError> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Config(format!("bad site {s:?}")))?;
    Ok(Site::new(coords))
}

/// Parses `zz | energy | order | diag:D | pair:r,c:r,c | plaquette:P | vertex:V`.
pub fn parse_observable(s: &str) -> Result<ObservableSpec, CliError> {
    let bad = || CliError::Config(format!("bad observable {s:?}"));
    let num = |v: &str| v.trim().parse::<usize>().map_err(|_| bad());
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    Ok(match (head, rest) {
        ("zz", "") => ObservableSpec::Zz,
        ("energy", "") => ObservableSpec::Energy,
        ("order", "") => ObservableSpec::Order,
        ("diag", d) => ObservableSpec::Diagonal(num(d)?),
        ("plaquette", p) => ObservableSpec::Plaquette(num(p)?),
        ("vertex", v) => ObservableSpec::Vertex(num(v)?),
        ("pair", r) => {
            let (a, b) = r.split_once(':').ok_or_else(bad)?;
            ObservableSpec::Pair(parse_site(a)?, parse_site(b)?)
        }
        _ => return Err(bad()),
    })
}

fn thetas(cli: &Cli, a: &ScanArgs) -> Result<Vec<f64>, CliError> {
    match (&a.theta, a.random_theta) {
        (Some(spec), _) => Ok(scan::parse_grid(spec)?),
        (None, Some(0)) => Err(CliError::Config("--random-theta needs a positive count".into())),
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            Ok((0..n).map(|_| rng.gen_range(-PI..PI)).collect())
        }
        (None, None) => Err(CliError::Config("give --theta start:stop:count or --random-theta N".into())),
    }
}

fn engine(e: EngineArg) -> Engine {
    match e {
        EngineArg::Naive => Engine::Naive,
        EngineArg::Early => Engine::Early,
        EngineArg::Statevector => Engine::Statevector,
    }
}

pub fn scan(ctx: &Ctx, a: &ScanArgs) -> Result<(), CliError> {
    let thetas = thetas(ctx.cli, a)?;
    let mut cfg = ScanConfig::new(engine(a.engine), circuit_spec(a)?, parse_observable(&a.obs)?);
    let mut policy = TruncationPolicy {
        layer_cutoff: a.layer_cutoff,
        coeff_floor: a.coeff_floor,
        weight_cap: a.weight_cap,
        ..TruncationPolicy::default()
    };
    if let Some(b) = a.term_budget {
        policy.term_budget = b;
    }
    cfg.policy = policy;
    cfg.qubit_cap = a.qubit_cap;
    let (built, _) = scan::prepare(&cfg).map_err(CliError::config)?;

    if let Some(p) = &a.dump_circuit {
        write_atomic(p, built.dump().as_bytes())?;
    }
    if let Some(p) = &a.dump_state {
        let st = run_circuit_with(built.circuit(), thetas[0], ctx.exec, a.qubit_cap).map_err(CliError::config)?;
        let mut bytes = Vec::with_capacity(16 << st.num_qubits());
        st.write_le(&mut bytes)?;
        write_atomic(p, &bytes)?;
    }

    let rows = scan::scan_expectation(&cfg, &thetas, ctx.exec)?;
    let mut t = Table::new(&["theta", "value", "engine", "L", "wall_ns", "error"]);
    ctx.header(&mut t, "scan");
    t.meta("circuit", format!("{:?}", cfg.circuit));
    t.meta("qubits", built.num_qubits());
    t.meta("observable", &a.obs);
    t.meta("engine", cfg.engine.name());
    match (&a.theta, a.random_theta) {
        (Some(g), _) => t.meta("theta", g),
        (None, Some(n)) => t.meta("theta", format!("random {n} seed {}", ctx.cli.seed)),
        _ => {}
    }
    if cfg.engine == Engine::Naive && !cfg.policy.is_exact() {
        t.meta("truncation", format!("{:?}", cfg.policy));
    }
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    for r in rows {
        t.push(vec![
            r.theta.into(),
            r.value.into(),
            r.engine.name().into(),
            r.l.into(),
            Cell::Int(r.wall_ns),
            r.error.into(),
        ]);
    }
    ctx.finish(t)?;
    if failed > 0 {
        return Err(CliError::Engine(format!("{failed} row(s) failed")));
    }
    Ok(())
}

pub fn verify(ctx: &Ctx, a: &VerifyArgs) -> Result<(), CliError> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(&a.suite)?]
    };
    let mut text = String::new();
    let mut failed = 0;
    for s in suites {
        for c in verify::run(s)? {
            failed += usize::from(!c.passed);
            let tag = if c.passed { "PASS" } else { "FAIL" };
            text.push_str(&format!("[{tag}] {}: {}\n", c.name, c.detail));
        }
    }
    emit(&text, ctx.cli.out.as_deref())?;
    if failed > 0 {
        return Err(CliError::Verify(failed));
    }
    Ok(())
}

pub fn count(ctx: &Ctx, what: &CountCmd) -> Result<(), CliError> {
    let n = match *what {
        CountCmd::Lgv { l, w } => analytic::lgv_count(l, w),
        CountCmd::Layer { layer } => analytic::cycle_count_layer(layer),
        CountCmd::Correlation { d, w, l } => analytic::correlation_path_count(d, w, l),
    };
    emit(&format!("{n}\n"), ctx.cli.out.as_deref())?;
    Ok(())
}

pub fn bench(ctx: &Ctx, what: &BenchCmd) -> Result<(), CliError> {
    let env = env_info();
    let mut t;
    match what {
        BenchCmd::Scaling { l, theta, repeats } => {
            let r = scaling_run(l, *theta, *repeats)?;
            t = Table::new(&["L", "theta", "wall_ns", "max_strings", "value"]);
            ctx.header(&mut t, "bench scaling");
            t.meta("repeats", repeats);
            t.meta("time_slope", r.time_slope);
            t.meta("strings_slope", r.strings_slope);
            for s in r.samples {
                t.push(vec![s.l.into(), s.theta.into(), Cell::Int(s.wall_ns), s.max_strings.into(), s.value.into()]);
            }
        }
        BenchCmd::Truncation { theta, cutoffs } => {
            let rows = truncation_transition(theta, cutoffs);
            t = Table::new(&["theta", "cutoff", "error", "model"]);
            ctx.header(&mut t, "bench truncation");
            for &th in theta {
                let f = fit_decay(th, &rows);
                t.meta(
                    &format!("fit theta={th}"),
                    format!(
                        "{:?} power_slope={} power_r2={} exp_rate={} exp_r2={}",
                        f.class, f.power_slope, f.power_r2, f.exp_rate, f.exp_r2
                    ),
                );
            }
            for r in rows {
                t.push(vec![r.theta.into(), Cell::Int(r.cutoff.into()), r.error.into(), r.model.into()]);
            }
        }
        BenchCmd::Cusp { l, center, half_width, step } => {
            let rows = cusp_scan(l, *center, *half_width, *step, Exec::Sequential)?;
            t = Table::new(&["L", "theta", "value", "second_derivative"]);
            ctx.header(&mut t, "bench cusp");
            t.meta("step", step);
            for (size, peak) in cusp_peaks(&rows) {
                t.meta(&format!("peak L={size}"), peak);
            }
            for r in rows {
                t.push(vec![r.l.into(), r.theta.into(), r.value.into(), r.second_derivative.into()]);
            }
        }
    }
    t.meta("threads", 1);
    t.meta("cpu", &env.cpu_model);
    t.meta("logical_cores", env.logical_cores);
    t.meta("parallel_feature", env.parallel_feature);
    ctx.finish(t)
}

pub fn vqe(ctx: &Ctx, a: &VqeArgs) -> Result<(), CliError> {
    if a.x_points == 0 {
        return Err(CliError::Config("--x-points must be positive".into()));
    }
    let xs = vqe::x_grid(a.x_points);
    let ansatze: &[Ansatz] = match a.ansatz {
        AnsatzArg::WithPt => &[Ansatz::WithPt],
        AnsatzArg::WithoutPt => &[Ansatz::WithoutPt],
        AnsatzArg::Both => &[Ansatz::WithoutPt, Ansatz::WithPt],
    };
    let mut t = Table::new(&["x", "theta_star", "e_vqe", "e_exact", "rel_error", "ansatz"]);
    ctx.header(&mut t, &format!("vqe {}", model_name(a.model)));
    if a.model == ModelArg::Tfim {
        t.meta("L", a.l);
    }
    for &ans in ansatze {
        let res: Vec<VqeResult> = match a.model {
            ModelArg::Tfim => vqe::tfim_vqe(a.l, ans, &xs, ctx.exec)?,
            ModelArg::Z2 => vqe::z2_vqe(ans, &xs, ctx.exec)?,
        };
        t.meta(&format!("worst_rel_error {}", ans.name()), vqe::worst_rel_error(&res));
        for r in res {
            t.push(vec![
                r.x.into(),
                r.theta_star.into(),
                r.e_vqe.into(),
                r.e_exact.into(),
                r.rel_error.into(),
                r.ansatz.name().into(),
            ]);
        }
    }
    ctx.finish(t)
}

fn model_name(m: ModelArg) -> &'static str {
    match m {
        ModelArg::Tfim => "tfim",
        ModelArg::Z2 => "z2",
    }
}
