//! Acceptance suite: one PASS/FAIL line per criterion, process exits non-zero
//! if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ndarray::{array, Array1, Array2};
use num_complex::Complex64;

use superabsorb::dynamics::{
    entropy_production_rate, gibbs_state, propagate, propagator, sample_trajectory, PopulationState, Stroke,
};
use superabsorb::engine::{initial_state, predict, run_cycles, sweep_n, CyclePropagators, StrokePlan};
use superabsorb::engine::loglog_slope;
use superabsorb::ladder::{build_generator, build_ladder, build_rates, enhancement_factor};
use superabsorb::oracle::{
    a_cl_bruteforce, c_l1_bruteforce, full_lindblad_evolve, lowering_matrix_element, DenseDensityMatrix,
};
use superabsorb::tfmodel::{measure_rate_scaling, symmetric_matrix_element, Mode, TfSpec};
use superabsorb::tradeoff::{a_classical, binomial, c_l1, coherence_factors, evaluate_cycle};
use superabsorb::units::{to_natural, EngineConfig, NaturalParams};

const COLD_FREQS: [f64; 3] = [0.7e9, 0.6e9, 0.55e9];

struct Verdict {
    ok: bool,
    detail: String,
}

fn bench(fc: f64) -> NaturalParams {
    to_natural(&EngineConfig::benchmark(fc))
}

/// Benchmark point with a weaker interaction and narrower cavity, so every
/// ladder gap stays positive up to N = 63.
fn positive_gap_config() -> NaturalParams {
    let mut cfg = EngineConfig::benchmark(0.7e9);
    cfg.freq_interaction = 5.0e6;
    cfg.cavity_linewidth = 0.2e6;
    to_natural(&cfg)
}

fn odd(lo: usize, hi: usize) -> Vec<usize> {
    (lo..=hi).step_by(2).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_1() -> Verdict {
    let delta_expect = [0.2, 0.1, 0.05];
    let chi_expect = [399.0, 248.0, 139.0];
    let mut ok = true;
    let mut parts = Vec::new();
    let mut n_conf = 0.0;
    for i in 0..3 {
        let pr = predict(&bench(COLD_FREQS[i])).unwrap();
        let d_err = (pr.delta_eta_e2ls - delta_expect[i]).abs();
        let c_err = rel(pr.chi_conf, chi_expect[i]);
        ok &= d_err <= 1e-12 && c_err <= 0.10;
        parts.push(format!("dη={:.6} chi={:.1}({:+.1}%)", pr.delta_eta_e2ls, pr.chi_conf, 100.0 * (pr.chi_conf / chi_expect[i] - 1.0)));
        n_conf = pr.n_conf_closed_form;
    }
    let n_err = rel(n_conf, 7.69e6);
    ok &= n_err <= 0.01;
    Verdict { ok, detail: format!("{}; n_conf={:.4e} ({:.3}% off)", parts.join(", "), n_conf, 100.0 * n_err) }
}

fn criterion_2() -> Verdict {
    let p = bench(0.55e9);
    let pr = predict(&p).unwrap();
    let plan = StrokePlan::new(&p).unwrap();
    let (_, records) = run_cycles(&initial_state(&p).unwrap(), &plan, 5000).unwrap();
    let d_eta = records.iter().map(|r| rel(r.delta_eta, pr.delta_eta_e2ls)).fold(0.0, f64::max);
    let d_p = records.iter().map(|r| rel(r.power, pr.p_e2ls)).fold(0.0, f64::max);
    Verdict {
        ok: records.len() == 5000 && d_eta <= 0.05 && d_p <= 0.05,
        detail: format!("N=31, 5000 cycles: max |Δη/Δη_E2LS−1|={:.4}, max |P/P_E2LS−1|={:.4}", d_eta, d_p),
    }
}

fn criterion_3() -> Verdict {
    let ns = odd(9, 63);
    let mut ok = true;
    let mut parts = Vec::new();
    let mut curves = Vec::new();
    for fc in COLD_FREQS {
        let res = sweep_n(&bench(fc), &ns).unwrap();
        ok &= (1.9..=2.1).contains(&res.slope_simulated);
        ok &= (res.slope_separable - 1.0).abs() <= 1e-12;
        parts.push(format!("{:.2}GHz slope={:.4} sep={:.12}", fc / 1e9, res.slope_simulated, res.slope_separable));
        curves.push(res.rows.iter().map(|r| r.p_first_cycle).collect::<Vec<_>>());
    }
    // larger Δη_E2LS gives larger power at every N
    let ordered = (0..ns.len()).all(|k| curves[0][k] > curves[1][k] && curves[1][k] > curves[2][k]);
    ok &= ordered;
    Verdict { ok, detail: format!("{}; ordered={ordered}", parts.join(", ")) }
}

fn criterion_4() -> Verdict {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for n in odd(1, 13) {
        let el = lowering_matrix_element(n, 0.5).unwrap();
        let e = (el - (n as f64 + 1.0) / 2.0).abs();
        worst = worst.max(e);
        ok &= e <= 1e-12;
        for k in 0..n {
            let m = n as f64 / 2.0 - k as f64;
            let g = lowering_matrix_element(n, m).unwrap();
            let e = (g - enhancement_factor(n, m).sqrt()).abs();
            worst = worst.max(e);
            ok &= e <= 1e-12;
        }
    }
    let five = lowering_matrix_element(5, 0.5).unwrap();
    ok &= (five - 3.0).abs() <= 1e-12;
    Verdict { ok, detail: format!("odd N≤13, max deviation {worst:.2e}; N=5 central element {five}") }
}

fn criterion_5() -> Verdict {
    let base = TfSpec::thermal(1, 1.0, 1e-2, 2.0).unwrap();
    let nds: Vec<usize> = (2..=8).collect();
    let bd = measure_rate_scaling(&base, &nds, Mode::Bd).unwrap();
    let sd = measure_rate_scaling(&base, &nds, Mode::Sd).unwrap();
    let elements_ok = (1..=8).all(|nd| symmetric_matrix_element(&TfSpec { n_degeneracy: nd, ..base }) == nd as f64);
    Verdict {
        ok: (bd.slope - 2.0).abs() <= 0.05 && (sd.slope - 1.0).abs() <= 0.05 && elements_ok,
        detail: format!("bd slope={:.6}, sd slope={:.6}, ⟨g,+|L|e,+⟩=N_d exact: {elements_ok}", bd.slope, sd.slope),
    }
}

fn criterion_6() -> Verdict {
    let p = positive_gap_config();
    let ns = odd(3, 31);
    let mut ok = true;
    let mut max_current = 0.0f64;
    let mut max_margin = 0.0f64;
    let mut bounds = Vec::new();
    let mut acl_norm = Vec::new();
    for &n in &ns {
        let q = p.with_n_qubits(n);
        let plan = StrokePlan::new(&q).unwrap();
        let start = initial_state(&q).unwrap();
        let cb = evaluate_cycle(&start, &plan, 64).unwrap();
        ok &= cb.all_current_bounds_hold() && cb.report.satisfied;
        let worst = cb.hot.iter().chain(&cb.cold).map(|s| s.ratio() / s.a_mean).fold(0.0, f64::max);
        max_current = max_current.max(worst);
        max_margin = max_margin.max(cb.report.margin);
        bounds.push(cb.report.bound_value);
        let f = coherence_factors(&plan.ladder_hot, &plan.rates_hot).unwrap();
        let a_cl = a_classical(&start, &f).unwrap();
        let k = plan.ladder_hot.link_of(0.5).unwrap();
        let unit = plan.ladder_hot.gaps[k].powi(2) * plan.rates_hot.links[k].down_rate / (n as f64).powi(2);
        acl_norm.push(a_cl * binomial(n, (n - 1) / 2) / (n as f64).powi(2) / unit);
    }
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&xs, &bounds);
    ok &= (1.8..=2.2).contains(&slope);
    let lo = acl_norm.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = acl_norm.iter().cloned().fold(0.0, f64::max);
    ok &= lo > 0.0 && hi / lo <= 10.0;
    Verdict {
        ok,
        detail: format!(
            "N=3..31: max J²/(σ̇A)={max_current:.3e}, max (P/Δη)/(αĀ)={max_margin:.3e}, slope αĀ={slope:.4}, normalised A_cl spread={:.3}",
            hi / lo
        ),
    }
}

fn dense_with_coherences(probs: &[f64]) -> DenseDensityMatrix {
    let d = probs.len();
    let mut m = Array2::<Complex64>::zeros((d, d));
    for i in 0..d {
        m[[i, i]] = Complex64::new(probs[i], 0.0);
    }
    for i in 0..d - 1 {
        // a Hermitian coherence small enough to keep ρ positive
        let c = 0.25 * (probs[i] * probs[i + 1]).sqrt();
        m[[i, i + 1]] = Complex64::new(c, 0.5 * c);
        m[[i + 1, i]] = Complex64::new(c, -0.5 * c);
    }
    DenseDensityMatrix::new(m).unwrap()
}

fn criterion_7() -> Verdict {
    let mut worst_lindblad = 0.0f64;
    for n in 1..=7 {
        for fc in [0.55e9, 0.7e9] {
            let p = bench(fc).with_n_qubits(n);
            let plan = StrokePlan::new(&p).unwrap();
            let probs: Vec<f64> = (0..=n).map(|i| (1.0 + i as f64).recip()).collect();
            let total: f64 = probs.iter().sum();
            let probs: Vec<f64> = probs.iter().map(|x| x / total).collect();
            let rho = dense_with_coherences(&probs);
            let pop = PopulationState::new(n, Array1::from(probs.clone())).unwrap();
            for (ladder, bath, gen, tau) in [
                (&plan.ladder_hot, &plan.bath_hot, &plan.gen_hot, plan.tau_hot),
                (&plan.ladder_cold, &plan.bath_cold, &plan.gen_cold, plan.tau_cold),
            ] {
                for t in [tau, 50.0 * tau] {
                    let full = full_lindblad_evolve(&rho, ladder, bath, t).unwrap().populations();
                    let reduced = propagate(&pop, gen, t).unwrap();
                    let dev = full.iter().zip(reduced.probs.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    worst_lindblad = worst_lindblad.max(dev);
                }
            }
        }
    }

    let mut worst_cl1 = 0.0f64;
    for n in 1..=11 {
        let w: Vec<f64> = (0..=n).map(|i| ((i * 7 + 3) % 5 + 1) as f64).collect();
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / total).collect();
        let s = PopulationState::new(n, Array1::from(w.clone())).unwrap();
        let brute = c_l1_bruteforce(n, &w).unwrap();
        worst_cl1 = worst_cl1.max(rel(c_l1(&s), brute.max(f64::MIN_POSITIVE)).min((c_l1(&s) - brute).abs()));
    }

    let mut worst_acl = 0.0f64;
    let p = positive_gap_config();
    for n in 1..=9 {
        let q = p.with_n_qubits(n);
        let ladder = build_ladder(n, q.omega_a_hot, q.omega_interaction);
        let bath = superabsorb::engine::hot_bath(&q);
        let rates = build_rates(&ladder, &bath, q.gap_floor_abs()).unwrap();
        let f = coherence_factors(&ladder, &rates).unwrap();
        let w: Vec<f64> = (0..=n).map(|i| ((i * 3 + 1) % 4 + 1) as f64).collect();
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / total).collect();
        let s = PopulationState::new(n, Array1::from(w.clone())).unwrap();
        let closed = a_classical(&s, &f).unwrap();
        let brute = a_cl_bruteforce(&ladder, &rates, &w).unwrap();
        worst_acl = worst_acl.max(rel(closed, brute));
    }

    let (a, b) = (2.5e3, 40.0);
    let g = superabsorb::ladder::Generator { matrix: array![[-a, b], [a, -b]] };
    let mut worst_two = 0.0f64;
    for t in [1e-5, 1e-4, 1e-3, 0.1] {
        let s = propagate(&PopulationState::basis(1, 0), &g, t).unwrap();
        let p0 = (b + a * (-(a + b) * t).exp()) / (a + b);
        worst_two = worst_two.max((s.probs[0] - p0).abs()).max((s.probs[1] - (1.0 - p0)).abs());
    }

    Verdict {
        ok: worst_lindblad <= 1e-9 && worst_cl1 <= 1e-9 && worst_acl <= 1e-9 && worst_two <= 1e-10,
        detail: format!(
            "Lindblad N≤7 {worst_lindblad:.2e}, C_l1 N≤11 {worst_cl1:.2e}, A_cl N≤9 {worst_acl:.2e} (rel), two-level {worst_two:.2e}"
        ),
    }
}

fn criterion_8() -> Verdict {
    let p = bench(0.55e9);
    let plan = StrokePlan::new(&p).unwrap();
    let props = CyclePropagators::new(&plan).unwrap();
    let mut s = initial_state(&p).unwrap();
    let mut drift = 0.0f64;
    for k in 0..10_000 {
        let prop = if k % 2 == 0 { &props.hot } else { &props.cold };
        s = PopulationState::new(s.n_qubits, prop.dot(&s.probs)).unwrap();
        drift = drift.max((s.total() - 1.0).abs());
    }

    let (_, records) = run_cycles(&initial_state(&p).unwrap(), &plan, 200).unwrap();
    let balance = records
        .iter()
        .map(|r| r.energy_balance_residual().abs() / r.q_hot.abs().max(r.energy_hot_start.abs()))
        .fold(0.0, f64::max);

    let mut db = 0.0f64;
    for (rates, bath) in [(&plan.rates_hot, &plan.bath_hot), (&plan.rates_cold, &plan.bath_cold)] {
        for l in &rates.links {
            if l.up_rate > 0.0 {
                db = db.max(rel(l.down_rate / l.up_rate, (bath.beta * l.omega).exp()));
            }
        }
    }

    let mut min_sigma = f64::INFINITY;
    let mut sigma_ok = true;
    for n in [3usize, 9, 15] {
        let q = p.with_n_qubits(n);
        let plan = StrokePlan::new(&q).unwrap();
        let start = initial_state(&q).unwrap();
        let traj = sample_trajectory(&start, &plan.gen_hot, 10.0 * plan.tau_hot, 50, Stroke::Hot).unwrap();
        for st in &traj.states {
            match entropy_production_rate(st, &plan.gen_hot, &plan.ladder_hot, plan.bath_hot.beta) {
                Ok(v) => min_sigma = min_sigma.min(v),
                Err(_) => sigma_ok = false,
            }
        }
    }

    let mut tv_worst = 0.0f64;
    for n in [3usize, 5, 7] {
        let q = p.with_n_qubits(n);
        let ladder = build_ladder(n, q.omega_a_hot, q.omega_interaction);
        let bath = superabsorb::engine::hot_bath(&q);
        let rates = build_rates(&ladder, &bath, q.gap_floor_abs()).unwrap();
        let slowest = rates.links.iter().map(|l| l.down_rate + l.up_rate).fold(f64::INFINITY, f64::min);
        let gen = build_generator(&rates);
        let prop = propagator(&gen, 200.0 / slowest).unwrap();
        let target = gibbs_state(&ladder, bath.beta);
        for start in 0..=n {
            let s = PopulationState::new(n, prop.dot(&PopulationState::basis(n, start).probs)).unwrap();
            let tv = 0.5 * s.probs.iter().zip(target.probs.iter()).map(|(a, b)| (a - b).abs()).sum::<f64>();
            tv_worst = tv_worst.max(tv);
        }
    }

    Verdict {
        ok: drift <= 1e-9 && balance <= 1e-9 && db <= 1e-12 && sigma_ok && min_sigma >= 0.0 && tv_worst < 1e-8,
        detail: format!(
            "drift {drift:.2e} over 10⁴ steps, energy balance {balance:.2e}, detailed balance {db:.2e}, min σ̇ {min_sigma:.3e}, Gibbs TV {tv_worst:.2e}"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict, Duration); 8] = [
        ("analytic predictions", criterion_1, Duration::from_secs(1)),
        ("cycle-simulation fidelity", criterion_2, Duration::from_secs(60)),
        ("scaling reproduction", criterion_3, Duration::from_secs(300)),
        ("connectivity oracle", criterion_4, Duration::from_secs(10)),
        ("2N_d-state comparison", criterion_5, Duration::from_secs(30)),
        ("trade-off verification", criterion_6, Duration::from_secs(120)),
        ("oracle equivalence", criterion_7, Duration::from_secs(60)),
        ("conservation and consistency", criterion_8, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let v = run();
        let elapsed = t0.elapsed();
        let ok = v.ok && elapsed <= *limit;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {} {:<30} {} [{:.2}s / {}s] {}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            v.detail
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
