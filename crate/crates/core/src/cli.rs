//! Command-line front end. All output is assembled in memory first so a
//! failing run never leaves a partial file behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::engine::{initial_state, predict, run_cycles, sweep_n, StrokePlan};
use crate::error::Error;
use crate::ladder::{build_ladder, build_rates};
use crate::oracle::{a_cl_bruteforce, c_l1_bruteforce, lowering_matrix_element};
use crate::tfmodel::{measure_rate_scaling, symmetric_matrix_element, Mode, TfSpec};
use crate::tradeoff::{a_classical, c_l1, coherence_factors, evaluate_cycle};
use crate::dynamics::PopulationState;
use crate::units::{load_config, power_to_watts, to_natural, NaturalParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;
pub const EXIT_NOT_APPLICABLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "superabsorb", version, about = "Superabsorption heat engine simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form predictions for a config.
    Predict {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated engine cycles, one CSV row per cycle.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        cycles: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// First-cycle power against N.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        n_step: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Current and power trade-off bounds over one cycle.
    Tradeoff {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Brute-force matrix elements and coherence checks.
    Oracle {
        #[arg(long)]
        n: usize,
    },
    /// Decay-rate scalings of the 2N_d-state model.
    TfModel {
        #[arg(long, default_value_t = 8)]
        nd_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
    NotApplicable(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Runtime(_) => EXIT_RUNTIME,
            Failure::NotApplicable(_) => EXIT_NOT_APPLICABLE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) | Failure::NotApplicable(m) => m,
        }
    }
}

fn runtime(e: Error) -> Failure {
    match e {
        Error::NonpositiveGap { .. } => Failure::NotApplicable(format!("bound not evaluated: negative gaps ({e})")),
        _ => Failure::Runtime(e.to_string()),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Fixed 12-significant-digit scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

fn read_params(path: &Path) -> CliResult<NaturalParams> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
    let cfg = load_config(&text).map_err(|e| Failure::Config(e.to_string()))?;
    Ok(to_natural(&cfg))
}

fn write_file(path: &Path, body: &str) -> CliResult<()> {
    fs::write(path, body).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Runtime(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Runtime(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Runtime(e.to_string()))
}

fn cmd_predict(config: &Path, out: Option<&Path>, stdout: &mut String) -> CliResult<()> {
    let p = read_params(config)?;
    let pr = predict(&p).map_err(runtime)?;
    let rows: Vec<(&str, f64, &str)> = vec![
        ("p_init_minus", pr.p_init_minus, "1"),
        ("eta_carnot", pr.eta_carnot, "1"),
        ("delta_eta_e2ls", pr.delta_eta_e2ls, "1"),
        ("gamma_purcell", pr.gamma_purcell, "rad/s"),
        ("p_one_qubit", pr.p_one_qubit, "rad/s^2"),
        ("p_one_qubit_watts", power_to_watts(pr.p_one_qubit), "W"),
        ("p_e2ls", pr.p_e2ls, "rad/s^2"),
        ("p_e2ls_watts", power_to_watts(pr.p_e2ls), "W"),
        ("p_separable", pr.p_separable, "rad/s^2"),
        ("p_separable_watts", power_to_watts(pr.p_separable), "W"),
        ("chi_conf", pr.chi_conf, "1"),
        ("n_conf", pr.n_conf, "cycles"),
        ("n_conf_closed_form", pr.n_conf_closed_form, "cycles"),
        ("tau_hot", pr.tau_hot, "s"),
        ("tau_cold", pr.tau_cold, "s"),
    ];
    for (k, v, u) in &rows {
        stdout.push_str(&format!("{k:<20} {:>20} {u}\n", fmt_num(*v)));
    }
    if pr.confinement_weak() {
        stdout.push_str(&format!("warning: chi_conf = {} <= 10, confinement to the E2LS is weak\n", fmt_num(pr.chi_conf)));
    }
    if let Some(path) = out {
        let body = csv_text(
            &["quantity", "value", "unit"],
            &rows.iter().map(|(k, v, u)| vec![k.to_string(), fmt_num(*v), u.to_string()]).collect::<Vec<_>>(),
        )?;
        write_file(path, &body)?;
    }
    Ok(())
}

pub const SIMULATE_HEADER: [&str; 11] =
    ["cycle", "q_hot", "q_cold", "w_out", "w_in", "w_ext", "eta", "power_natural", "power_watts", "delta_eta", "leak_mass"];

fn cmd_simulate(config: &Path, cycles: usize, out: &Path, stdout: &mut String) -> CliResult<()> {
    let p = read_params(config)?;
    if cycles == 0 {
        return Err(Failure::Config("--cycles must be at least 1".into()));
    }
    let plan = StrokePlan::new(&p).map_err(runtime)?;
    let start = initial_state(&p).map_err(runtime)?;
    let (_, records) = run_cycles(&start, &plan, cycles).map_err(runtime)?;
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row = vec![r.cycle_index.to_string()];
            row.extend(
                [r.q_hot, r.q_cold, r.w_out, r.w_in, r.w_ext, r.eta, r.power, power_to_watts(r.power), r.delta_eta, r.leak_mass]
                    .iter()
                    .map(|&x| fmt_num(x)),
            );
            row
        })
        .collect();
    write_file(out, &csv_text(&SIMULATE_HEADER, &rows)?)?;
    stdout.push_str(&format!("wrote {} cycles to {}\n", records.len(), out.display()));
    Ok(())
}

pub const SWEEP_HEADER: [&str; 5] = ["n", "p_first_cycle", "p_e2ls", "p_separable", "chi_conf"];

fn sweep_range(n_min: usize, n_max: usize, n_step: usize) -> CliResult<Vec<usize>> {
    if n_min % 2 == 0 || n_max % 2 == 0 {
        return Err(Failure::Config(format!("n-min and n-max must be odd, got {n_min} and {n_max}")));
    }
    if n_step == 0 || n_step % 2 != 0 {
        return Err(Failure::Config(format!("n-step must be a positive even number, got {n_step}")));
    }
    if n_min < 3 || n_max <= n_min {
        return Err(Failure::Config(format!("need 3 <= n-min < n-max, got {n_min}..{n_max}")));
    }
    Ok((n_min..=n_max).step_by(n_step).collect())
}

fn cmd_sweep(config: &Path, n_min: usize, n_max: usize, n_step: usize, out: &Path, stdout: &mut String) -> CliResult<()> {
    let p = read_params(config)?;
    let ns = sweep_range(n_min, n_max, n_step)?;
    let res = sweep_n(&p, &ns).map_err(runtime)?;
    let rows: Vec<Vec<String>> = res
        .rows
        .iter()
        .map(|r| vec![r.n.to_string(), fmt_num(r.p_first_cycle), fmt_num(r.p_e2ls), fmt_num(r.p_separable), fmt_num(r.chi_conf)])
        .collect();
    write_file(out, &csv_text(&SWEEP_HEADER, &rows)?)?;
    stdout.push_str(&format!("slope_simulated {:.6}\n", res.slope_simulated));
    stdout.push_str(&format!("slope_e2ls {:.6}\n", res.slope_e2ls));
    stdout.push_str(&format!("slope_separable {:.6}\n", res.slope_separable));
    Ok(())
}

pub const TRADEOFF_HEADER: [&str; 8] = ["t", "stroke", "j", "sigma_dot", "a_cl", "a_qm", "a_mean", "ratio_ok"];

fn cmd_tradeoff(config: &Path, n: Option<usize>, out: &Path, stdout: &mut String) -> CliResult<()> {
    let mut p = read_params(config)?;
    if let Some(n) = n {
        if n % 2 == 0 || n < 3 {
            return Err(Failure::Config(format!("--n must be odd and at least 3, got {n}")));
        }
        p = p.with_n_qubits(n);
    }
    let plan = StrokePlan::new(&p).map_err(runtime)?;
    if !plan.ladder_hot.all_gaps_positive() || !plan.ladder_cold.all_gaps_positive() {
        return Err(Failure::NotApplicable("bound not evaluated: negative gaps".into()));
    }
    let start = initial_state(&p).map_err(runtime)?;
    let cb = evaluate_cycle(&start, &plan, p.samples_per_stroke).map_err(runtime)?;
    let rows: Vec<Vec<String>> = cb
        .hot
        .iter()
        .chain(&cb.cold)
        .map(|s| {
            vec![
                fmt_num(s.t),
                s.stroke.label().to_string(),
                fmt_num(s.j),
                fmt_num(s.sigma_dot),
                fmt_num(s.a_cl),
                fmt_num(s.a_qm),
                fmt_num(s.a_mean),
                s.ratio_ok.to_string(),
            ]
        })
        .collect();
    write_file(out, &csv_text(&TRADEOFF_HEADER, &rows)?)?;
    let r = &cb.report;
    stdout.push_str(&format!(
        "p_over_delta_eta={} alpha={} a_bar={} bound_value={} satisfied={}\n",
        fmt_num(r.p_over_delta_eta),
        fmt_num(r.alpha),
        fmt_num(r.a_bar),
        fmt_num(r.bound_value),
        r.satisfied
    ));
    Ok(())
}

fn cmd_oracle(n: usize, stdout: &mut String) -> CliResult<()> {
    if n == 0 || n > crate::oracle::MAX_STATE_QUBITS {
        return Err(Failure::Config(format!("--n must lie in 1..=16, got {n}")));
    }
    stdout.push_str("M,element,sqrt_a_M\n");
    let ladder = build_ladder(n, 1.0, 0.0);
    for &m in ladder.levels.iter().take(n) {
        let el = lowering_matrix_element(n, m).map_err(runtime)?;
        stdout.push_str(&format!("{m},{},{}\n", fmt_num(el), fmt_num(ladder.enhancement(m).sqrt())));
    }
    if n % 2 == 1 {
        let el = lowering_matrix_element(n, 0.5).map_err(runtime)?;
        stdout.push_str(&format!("central element {} (N+1)/2 = {}\n", fmt_num(el), fmt_num((n as f64 + 1.0) / 2.0)));
    }
    if n <= crate::oracle::MAX_DENSE_QUBITS {
        let w: Vec<f64> = (0..=n).map(|i| (i + 1) as f64).collect();
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / total).collect();
        let state = PopulationState::new(n, w.clone().into()).map_err(runtime)?;
        let brute = c_l1_bruteforce(n, &w).map_err(runtime)?;
        stdout.push_str(&format!("c_l1 closed_form={} bruteforce={}\n", fmt_num(c_l1(&state)), fmt_num(brute)));
        if n <= crate::oracle::MAX_ACL_QUBITS {
            // positive-gap ladder at unit scale
            let ladder = build_ladder(n, 1.0, 0.01);
            let bath = crate::ladder::BathModel { omega_cavity: 1.0, coupling: 0.01, linewidth: 0.1, beta: 2.0 };
            let rates = build_rates(&ladder, &bath, 1e-12).map_err(runtime)?;
            let f = coherence_factors(&ladder, &rates).map_err(runtime)?;
            let closed = a_classical(&state, &f).map_err(runtime)?;
            let brute = a_cl_bruteforce(&ladder, &rates, &w).map_err(runtime)?;
            stdout.push_str(&format!("a_cl closed_form={} bruteforce={}\n", fmt_num(closed), fmt_num(brute)));
        }
    }
    Ok(())
}

pub const TF_HEADER: [&str; 5] = ["n_d", "mode", "rate", "rate_over_gamma_down", "fitted_slope"];

fn cmd_tf_model(nd_max: usize, out: Option<&Path>, stdout: &mut String) -> CliResult<()> {
    if !(5..=crate::tfmodel::MAX_DEGENERACY).contains(&nd_max) {
        return Err(Failure::Config(format!("--nd-max must lie in 5..=12, got {nd_max}")));
    }
    let base = TfSpec::thermal(1, 1.0, 1e-2, 2.0).map_err(runtime)?;
    let nds: Vec<usize> = (2..=nd_max).collect();
    let mut rows = Vec::new();
    for mode in [Mode::Sd, Mode::Bd] {
        let sc = measure_rate_scaling(&base, &nds, mode).map_err(runtime)?;
        for (nd, rate) in sc.n_degeneracies.iter().zip(&sc.rates) {
            rows.push(vec![nd.to_string(), mode.label().to_string(), fmt_num(*rate), fmt_num(rate / base.gamma_down), fmt_num(sc.slope)]);
        }
        stdout.push_str(&format!("{} slope {:.6}\n", mode.label(), sc.slope));
    }
    for nd in [1, nd_max] {
        let el = symmetric_matrix_element(&TfSpec { n_degeneracy: nd, ..base });
        stdout.push_str(&format!("matrix element N_d={nd}: {}\n", fmt_num(el)));
    }
    let body = csv_text(&TF_HEADER, &rows)?;
    match out {
        Some(path) => write_file(path, &body)?,
        None => stdout.push_str(&body),
    }
    Ok(())
}

fn dispatch(cmd: &Command, stdout: &mut String) -> CliResult<()> {
    match cmd {
        Command::Predict { config, out } => cmd_predict(config, out.as_deref(), stdout),
        Command::Simulate { config, cycles, out } => cmd_simulate(config, *cycles, out, stdout),
        Command::Sweep { config, n_min, n_max, n_step, out } => cmd_sweep(config, *n_min, *n_max, *n_step, out, stdout),
        Command::Tradeoff { config, n, out } => cmd_tradeoff(config, *n, out, stdout),
        Command::Oracle { n } => cmd_oracle(*n, stdout),
        Command::TfModel { nd_max, out } => cmd_tf_model(*nd_max, out.as_deref(), stdout),
    }
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: &Cli, stdout: &mut impl Write, stderr: &mut impl Write) -> i32 {
    let mut buf = String::new();
    match dispatch(&cli.command, &mut buf) {
        Ok(()) => {
            let _ = stdout.write_all(buf.as_bytes());
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = write!(stderr, "{e}");
            code
        }
    }
}
