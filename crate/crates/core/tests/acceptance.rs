//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the report is always
//! printed. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use randrank::async_iter::{log_error_slope, simulate_async};
use randrank::consensus::{consensus_matrices, simulate_consensus};
use randrank::dense::{damp, google_dense, mat_vec, max_abs_diff, Dense};
use randrank::dist_simul::{
    ahat_bruteforce, ahat_closed, average_matrix_simul_bruteforce, average_modified_simul, mhat_simul,
    simulate_simul,
};
use randrank::dist_single::{average_matrix_single, average_modified_single, build_ai_dense, mhat_single};
use randrank::ergodicity::{tau, tau_mhat_bounds};
use randrank::harness::{mc_mean_square, reference_pagerank, scaled_experiment, McScheme, ScaledConfig};
use randrank::termination::{equilibrium_tilde, neumann_check, run_algorithm1, TerminationParams};
use randrank::webgraph::{example_web, l1_dist, load_edge_list, random_web};
use randrank::{power_method, LinkMatrix, RankVector, RunConfig, SchemeParams};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn web4() -> LinkMatrix {
    example_web().link_matrix().unwrap()
}

/// Random patched graph with `n` pages and out-degrees in `1..=min(n-1, 6)`.
fn random_graph(n: usize, seed: u64) -> LinkMatrix {
    random_web(n, seed, 0, 1, (n - 1).min(6)).unwrap().link_matrix().unwrap()
}

/// `(I - (1 - m) A) x = (m/n) 1` by dense LU.
fn lu_pagerank(a: &LinkMatrix, m: f64) -> Vec<f64> {
    let n = a.dim();
    let lhs = DMatrix::<f64>::identity(n, n) - a.to_dense() * (1.0 - m);
    let x = lhs.lu().solve(&DVector::from_element(n, m / n as f64)).unwrap();
    x.iter().copied().collect()
}

fn c1_example_pagerank() -> Outcome {
    let start = Instant::now();
    let r = power_method(&web4(), 0.15, &RankVector::uniform(4), 1e-10, 100_000).map_err(e)?;
    let elapsed = start.elapsed();
    let want = [0.119, 0.331, 0.260, 0.289];
    let gap = r.x_star.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    ensure(gap <= 5e-4, || format!("max deviation {gap:.2e} > 5e-4"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("x* = {:.4?}, max deviation {gap:.1e}, {elapsed:?}", &r.x_star[..]))
}

fn c2_exact_matrices() -> Outcome {
    let (t, tt, h, q) = (1.0 / 3.0, 2.0 / 3.0, 0.5, 0.25);
    let dist = [
        [[0.0, 0.0, 0.0, t], [1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, tt]],
        [[0.0, 0.0, 0.0, 0.0], [1.0, 0.0, h, t], [0.0, h, h, 0.0], [0.0, h, 0.0, tt]],
        [[1.0, 0.0, 0.0, 0.0], [0.0, h, h, 0.0], [0.0, h, 0.0, t], [0.0, 0.0, h, tt]],
        [[1.0, 0.0, 0.0, t], [0.0, h, 0.0, t], [0.0, 0.0, h, t], [0.0, h, h, 0.0]],
    ];
    let cons = [
        [[h, 0.0, 0.0, h], [h, h, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]],
        [[1.0, 0.0, 0.0, 0.0], [q, q, q, q], [0.0, h, h, 0.0], [0.0, h, 0.0, h]],
        [[1.0, 0.0, 0.0, 0.0], [0.0, h, h, 0.0], [0.0, t, t, t], [0.0, 0.0, h, h]],
        [[h, 0.0, 0.0, h], [0.0, h, 0.0, h], [0.0, 0.0, h, h], [0.0, t, t, t]],
    ];
    let as_dense = |m: &[[f64; 4]; 4]| Dense::from_fn(4, 4, |r, c| m[r][c]);
    let a = web4();
    let pattern = consensus_matrices(&example_web()).map_err(e)?;
    let mut worst = 0.0f64;
    for i in 0..4 {
        worst = worst.max(max_abs_diff(&build_ai_dense(&a, i), &as_dense(&dist[i])));
        worst = worst.max(max_abs_diff(&pattern.dense(i), &as_dense(&cons[i])));
    }
    ensure(worst <= 1e-15, || format!("max entry deviation {worst:e}"))?;
    Ok(format!("8 matrices, max entry deviation {worst:e}"))
}

fn c3_single_average_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut sizes = Vec::new();
    for seed in 0..20 {
        let n = rng.random_range(2..=50usize);
        sizes.push(n);
        let a = random_graph(n, seed);
        let nf = n as f64;
        let closed = a.to_dense() * (2.0 / nf) + Dense::identity(n, n) * ((nf - 2.0) / nf);
        let avg = average_matrix_single(&a).map_err(e)?;
        worst = worst.max(max_abs_diff(&avg, &closed));
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("20 graphs, n in {sizes:?}, max deviation {worst:.1e}"))
}

fn c4_pattern_enumeration() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 2..=10usize {
        let a = random_graph(n, 100 + n as u64);
        for alpha in [0.1, 0.3, 0.5, 0.9, 1.0] {
            let brute = average_matrix_simul_bruteforce(&a, alpha).map_err(e)?;
            let q = (1.0 - alpha) * (1.0 - alpha);
            let closed = a.to_dense() * (1.0 - q) + Dense::identity(n, n) * q;
            worst = worst.max(max_abs_diff(&brute, &closed));
        }
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-10, || format!("max deviation {worst:e}"))?;
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("n = 2..10 x 5 alphas, max deviation {worst:.1e}, {elapsed:?}"))
}

fn c5_flag_count_sums() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 3..=8usize {
        let a = random_graph(n, 200 + n as u64);
        for l in 0..=n {
            worst = worst.max(max_abs_diff(&ahat_closed(&a, l).map_err(e)?, &ahat_bruteforce(&a, l).map_err(e)?));
            cases += 1;
        }
    }
    ensure(worst <= 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("{cases} (n, l) cases, max deviation {worst:.1e}"))
}

fn c6_modified_average_identities() -> Outcome {
    let m = 0.15;
    let (mut gap, mut fix) = (0.0f64, 0.0f64);
    let mut graphs = vec![web4()];
    graphs.extend([2usize, 5, 12, 30, 50].iter().enumerate().map(|(i, &n)| random_graph(n, 300 + i as u64)));
    for a in &graphs {
        let n = a.dim();
        let x_star = lu_pagerank(a, m);
        let google = google_dense(a, m);
        let id = Dense::identity(n, n);
        let mut check = |mbar: Dense, mhat: f64| {
            let rhs = &google * (mhat / m) + &id * (1.0 - mhat / m);
            gap = gap.max(max_abs_diff(&mbar, &rhs));
            fix = fix.max(l1_dist(&mat_vec(&mbar, &x_star), &x_star));
        };
        check(average_modified_single(a, m).map_err(e)?, mhat_single(m, n));
        for alpha in [0.1, 0.5, 1.0] {
            check(average_modified_simul(a, m, alpha), mhat_simul(m, alpha));
        }
    }
    ensure(gap <= 1e-12, || format!("identity gap {gap:e}"))?;
    ensure(fix <= 1e-9, || format!("fixed-point residual {fix:e}"))?;
    Ok(format!("{} graphs, identity gap {gap:.1e}, residual {fix:.1e}", graphs.len()))
}

fn c7_mean_square_bound() -> Outcome {
    let a = web4();
    let x_star = reference_pagerank(&a, 0.15).map_err(e)?;
    let start = Instant::now();
    let s = mc_mean_square(McScheme::Single, &a, &x_star, &SchemeParams::new(0.15, 1.0, 7), 200, &RunConfig::new(20_000, 100))
        .map_err(e)?;
    let elapsed = start.elapsed();
    let bad = s.bound_violations();
    ensure(bad.is_empty(), || format!("bound exceeded at k = {bad:?}"))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    let ratio = s.mean_sq.iter().zip(&s.ms_bound).map(|(m, b)| m / b).fold(0.0, f64::max);
    Ok(format!("{} sampled k, max MSE/bound {ratio:.3}, {elapsed:?}", s.ks.len()))
}

fn c8_order_one_over_k() -> Outcome {
    let a = web4();
    let x_star = reference_pagerank(&a, 0.15).map_err(e)?;
    let s = mc_mean_square(McScheme::Simul, &a, &x_star, &SchemeParams::new(0.15, 0.5, 8), 200, &RunConfig::new(20_000, 100))
        .map_err(e)?;
    let (early, late) = (s.at(4000).unwrap(), s.at(16_000).unwrap());
    let ratio = late / early;
    ensure(ratio <= 0.7, || format!("MSE(16000)/MSE(4000) = {ratio:.3} > 0.7"))?;
    let bad = s.bound_violations();
    ensure(bad.is_empty(), || format!("bound exceeded at k = {bad:?}"))?;
    Ok(format!("MSE(4000) = {early:.2e}, MSE(16000) = {late:.2e}, ratio {ratio:.3}"))
}

fn c9_full_probability_reduction() -> Outcome {
    let a = web4();
    let x_star = reference_pagerank(&a, 0.15).map_err(e)?;
    let cfg = RunConfig::new(200, 1).keep_states();
    let t = simulate_simul(&a, &x_star, &SchemeParams::new(0.15, 1.0, 9), &cfg).map_err(e)?;
    let google = google_dense(&a, 0.15);
    let mut x = vec![0.25; 4];
    let mut worst = 0.0f64;
    for s in &t.states {
        worst = worst.max(l1_dist(&s.x, &x));
        x = mat_vec(&google, &x);
    }
    ensure(t.states.len() == 201, || format!("{} states recorded", t.states.len()))?;
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("201 steps, max l1 deviation from dense power iteration {worst:.1e}"))
}

fn c10_frozen_block() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut pairs = 0;
    let mut worst_margin = f64::MIN;
    while pairs < 50 {
        let n = rng.random_range(3..=12usize);
        let a = random_graph(n, 1000 + pairs as u64);
        let frozen: Vec<Option<f64>> = (0..n).map(|_| rng.random_bool(0.4).then(|| rng.random::<f64>())).collect();
        let count = frozen.iter().flatten().count();
        if count == 0 || count == n {
            continue;
        }
        let alpha = [0.1, 0.3, 0.5, 0.9, 1.0][pairs % 5];
        let r = neumann_check(&a, 0.15, alpha, &frozen, 60);
        ensure(r.holds(), || format!("pair {pairs}: {r:?}"))?;
        worst_margin = worst_margin.max(r.norm1 - r.limit);
        pairs += 1;
    }
    Ok(format!("50 pairs, max ||Â_NN||_1 - (1 - m̂) = {worst_margin:.2e}, partial sums nonnegative and nondecreasing"))
}

fn c11_equilibrium_error() -> Outcome {
    let a = web4();
    let x_star = lu_pagerank(&a, 0.15);
    let delta = 0.01;
    let mut worst = f64::MIN;
    let mut cases = 0;
    for mask in 1u32..15 {
        for signs in 0u32..16 {
            let frozen: Vec<Option<f64>> = (0..4)
                .map(|i| {
                    let s = if signs >> i & 1 == 1 { 1.0 } else { -1.0 };
                    (mask >> i & 1 == 1).then(|| (1.0 + s * delta) * x_star[i])
                })
                .collect();
            let z = equilibrium_tilde(&a, 0.15, 0.5, &frozen).map_err(e)?;
            let nset: Vec<usize> = (0..4).filter(|&i| frozen[i].is_none()).collect();
            for (&i, &v) in nset.iter().zip(&z) {
                worst = worst.max((v - x_star[i]).abs() - delta * x_star[i]);
            }
            cases += 1;
        }
    }
    ensure(worst <= 1e-9, || format!("|x̃ - x*| exceeds δx* by {worst:e}"))?;
    Ok(format!("{cases} frozen configurations, max |x̃ - x*| - δx* = {worst:.2e}"))
}

fn c12_terminating_runs() -> Outcome {
    let a = web4();
    let x_star = reference_pagerank(&a, 0.15).map_err(e)?;
    let tp = TerminationParams::new(0.01, 200).map_err(e)?;
    let mut worst = 0.0f64;
    let mut latest = 0;
    for seed in 0..10 {
        let t = run_algorithm1(&a, &x_star, &SchemeParams::new(0.15, 0.5, seed), &tp, &RunConfig::new(1_000_000, 1000))
            .map_err(e)?;
        let times = t.term_times.as_ref().unwrap();
        ensure(times.iter().all(Option::is_some), || format!("seed {seed}: not all pages terminated: {times:?}"))?;
        latest = latest.max(t.stopped_at.unwrap());
        for i in 0..4 {
            worst = worst.max((t.final_y[i] - x_star[i]).abs() / x_star[i]);
        }
    }
    ensure(worst <= 0.05, || format!("max relative error {worst:.4} > 0.05"))?;
    Ok(format!("10 seeds all terminated by k = {latest}, max |y - x*|/x* = {worst:.4}"))
}

fn c13_async_convergence() -> Outcome {
    let a = web4();
    let x_star = reference_pagerank(&a, 0.15).map_err(e)?;
    let mut worst_steps = 0;
    let mut max_slope = f64::MIN;
    for seed in 0..10 {
        let t = simulate_async(&a, &x_star, &SchemeParams::new(0.15, 0.5, seed), &RunConfig::new(1_000_000, 1), 1e-8)
            .map_err(e)?;
        let k = t.stopped_at.ok_or_else(|| format!("seed {seed}: tolerance not reached"))?;
        ensure(t.last().err_linf <= 1e-8, || format!("seed {seed}: final error {:e}", t.last().err_linf))?;
        let slope = log_error_slope(&t.samples).ok_or("no slope")?;
        ensure(slope < 0.0, || format!("seed {seed}: slope {slope}"))?;
        worst_steps = worst_steps.max(k);
        max_slope = max_slope.max(slope);
    }
    Ok(format!("10 seeds within 1e-8 (normalized state) by k = {worst_steps}, max log-error slope {max_slope:.3}"))
}

fn c14_consensus() -> Outcome {
    let pattern = consensus_matrices(&example_web()).map_err(e)?;
    let mut latest = 0;
    for seed in 0..10 {
        let run = simulate_consensus(&pattern, &[1.0, 0.0, 0.0, 0.0], seed, 1_000_000, 1, 1e-8).map_err(e)?;
        let k = run.trace.stopped_at.ok_or_else(|| format!("seed {seed}: no agreement"))?;
        ensure(run.range_contracted, || format!("seed {seed}: range grew"))?;
        ensure(run.trace.samples.windows(2).all(|w| w[1].err_linf <= w[0].err_linf + 1e-15), || format!("seed {seed}: spread grew"))?;
        latest = latest.max(k);
    }
    Ok(format!("10 seeds reached spread <= 1e-8 by k = {latest}, range never grew"))
}

fn random_stochastic(n: usize, rng: &mut ChaCha8Rng) -> Dense {
    let mut p = Dense::from_fn(n, n, |_, _| rng.random::<f64>().powi(3));
    for mut c in p.column_iter_mut() {
        let s = c.sum();
        c /= s;
    }
    p
}

fn c15_ergodicity_coefficient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut worst_sub = f64::MIN;
    for _ in 0..100 {
        let n = rng.random_range(2..=8usize);
        let p = random_stochastic(n, &mut rng);
        let q = random_stochastic(n, &mut rng);
        let (tp, tq, tpq) = (tau(&p).map_err(e)?, tau(&q).map_err(e)?, tau(&(&p * &q)).map_err(e)?);
        ensure((0.0..=1.0).contains(&tp) && (0.0..=1.0).contains(&tq), || format!("τ out of range: {tp}, {tq}"))?;
        ensure(tp > 1e-12, || "distinct columns gave τ = 0".into())?;
        worst_sub = worst_sub.max(tpq - tp * tq);
        let v: Vec<f64> = p.column(0).iter().copied().collect();
        let rank_one = Dense::from_fn(n, n, |r, _| v[r]);
        ensure(tau(&rank_one).map_err(e)? <= 1e-12, || "rank-one matrix gave τ > 0".into())?;
    }
    ensure(worst_sub <= 1e-10, || format!("submultiplicativity violated by {worst_sub:e}"))?;
    ensure((tau(&Dense::identity(5, 5)).map_err(e)? - 1.0).abs() < 1e-15, || "τ(I) != 1".into())?;

    let mut graphs = vec![web4(), load_edge_list("0 1\n1 0").unwrap().link_matrix().unwrap()];
    graphs.extend((0..8).map(|s| random_graph(3 + 6 * s as usize, 1500 + s)));
    let mut worst_gap = f64::MIN;
    for a in &graphs {
        let r = tau_mhat_bounds(a, 0.15).map_err(e)?;
        let mhat = mhat_single(0.15, a.dim());
        for i in 0..a.dim() {
            let t = tau(&damp(&build_ai_dense(a, i), mhat)).map_err(e)?;
            worst_gap = worst_gap.max(t - (1.0 - mhat));
        }
        worst_gap = worst_gap.max(r.average - r.limit);
    }
    ensure(worst_gap <= 1e-10, || format!("τ(M_i) exceeds 1 - m̂ by {worst_gap:e}"))?;
    Ok(format!("100 pairs, max τ(PQ) - τ(P)τ(Q) = {worst_sub:.2e}; {} graphs, max τ(M_i) - (1 - m̂) = {worst_gap:.2e}", graphs.len()))
}

fn c16_scaled_run() -> Outcome {
    let start = Instant::now();
    let r = scaled_experiment(2024, &ScaledConfig::default()).map_err(e)?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    ensure((0.95..=1.02).contains(&r.sum_y), || format!("Σy(K) = {:.4} outside [0.95, 1.02]", r.sum_y))?;
    ensure(r.linf_final < r.linf_at_500, || format!("l∞ error {:.3e} at K not below {:.3e} at k = 500", r.linf_final, r.linf_at_500))?;
    Ok(format!(
        "Σy(K) = {:.4}, l∞ {:.3e} at k = 500 -> {:.3e} at K, {} of 1000 pages frozen, {elapsed:?}",
        r.sum_y, r.linf_at_500, r.linf_final, r.terminated
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 16] = [
        ("example PageRank vector", c1_example_pagerank),
        ("exact distributed and consensus matrices", c2_exact_matrices),
        ("single-update average identity", c3_single_average_identity),
        ("pattern enumeration average", c4_pattern_enumeration),
        ("flag-count pattern sums", c5_flag_count_sums),
        ("modified average identities", c6_modified_average_identities),
        ("single-update mean-square bound", c7_mean_square_bound),
        ("simultaneous 1/k trend", c8_order_one_over_k),
        ("full-probability reduction", c9_full_probability_reduction),
        ("frozen-block norm and Neumann sums", c10_frozen_block),
        ("equilibrium keeps relative error", c11_equilibrium_error),
        ("terminating runs end near x*", c12_terminating_runs),
        ("asynchronous convergence", c13_async_convergence),
        ("consensus agreement", c14_consensus),
        ("ergodicity coefficient properties", c15_ergodicity_coefficient),
        ("1000-page terminating run", c16_scaled_run),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{secs:.2}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.2}s]: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
