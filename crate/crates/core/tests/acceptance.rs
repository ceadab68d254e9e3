//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

use nbgrowth::config_sampler::{sample_matching_with, sample_simple, tangle_free_check};
use nbgrowth::degree_model::{realize_sequence, solve_two_point, DegreeSequence};
use nbgrowth::experiments::{cmd_density_search, cmd_emit_subgroup, cmd_sweep_n, ExperimentConfig};
use nbgrowth::graph::{named, Graph, MultiGraph};
use nbgrowth::nb_spectral::{ihara_bass_oracle, power_iterate, prop51_diagnostics, NBOperator, PowerConfig};
use nbgrowth::seed;
use nbgrowth::stallings::{fold_words, immerse, subgroup_basis};
use nbgrowth::ugw_sim::{
    martingale_residuals, q_convergence_study, simulate_many, simulate_q, RootLaw,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lambda1(g: &MultiGraph, max_iter: usize) -> f64 {
    let op = NBOperator::new(g).expect("min degree 2");
    let cfg = PowerConfig { max_iter, ..PowerConfig::default() };
    power_iterate(&op, &cfg, 1).expect("power iteration converges").lambda1
}

/// Random connected simple graph: a Hamiltonian cycle on a shuffled vertex
/// order plus `extra` random chords, keeping degrees at most `max_degree`.
fn random_core_graph<R: Rng>(rng: &mut R, n: usize, extra: usize, max_degree: usize) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (order[i], order[(i + 1) % n])).collect();
    let mut deg = vec![2usize; n];
    for _ in 0..extra * 10 {
        if edges.len() >= n + extra {
            break;
        }
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        let dup = edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u));
        if u != v && !dup && deg[u] < max_degree && deg[v] < max_degree {
            edges.push((u, v));
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    Graph::from_edges(n, &edges).expect("simple by construction")
}

fn c1_regular_exactness() -> Outcome {
    let mut checked = 0;
    for (i, &d) in [3usize, 4, 6].iter().enumerate() {
        for (j, &n) in [50usize, 200, 500].iter().enumerate() {
            let seq = DegreeSequence::from_degrees(vec![d; n]).unwrap();
            let mut s = seed::split(1, (10 * i + j) as u64);
            let g = loop {
                let g = sample_simple(&seq, s, 10_000).map_err(|e| e.to_string())?.graph;
                if g.as_multi().is_connected() {
                    break g;
                }
                s += 1;
            };
            let start = Instant::now();
            let op = NBOperator::new(g.as_multi()).unwrap();
            let lam = power_iterate(&op, &PowerConfig::default(), s).map_err(|e| e.to_string())?.lambda1;
            let secs = start.elapsed().as_secs_f64();
            ensure((lam - (d - 1) as f64).abs() <= 1e-9, || format!("d={d} n={n}: λ₁ = {lam}"))?;
            ensure(secs < 1.0, || format!("d={d} n={n}: {secs:.3} s"))?;
            checked += 1;
        }
    }
    for g in [named::petersen(), named::complete(7), named::circulant(101, &[1, 5])] {
        let d = g.as_multi().degree(0);
        let lam = lambda1(g.as_multi(), 500);
        ensure((lam - (d - 1) as f64).abs() <= 1e-9, || format!("named d={d}: λ₁ = {lam}"))?;
        checked += 1;
    }
    Ok(format!("{checked} regular graphs at d-1 within 1e-9, each under 1 s"))
}

fn c2_oracle_equivalence() -> Outcome {
    let mut rng = seed::rng(2024);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let n = rng.random_range(3..=10);
        let extra = rng.random_range(0..=n);
        let g = random_core_graph(&mut rng, n, extra, n - 1);
        let oracle = ihara_bass_oracle(&g).map_err(|e| format!("graph {k}: {e}"))?;
        let power = lambda1(g.as_multi(), 200_000);
        worst = worst.max((oracle - power).abs());
        ensure((oracle - power).abs() <= 1e-8, || format!("graph {k}: power {power} oracle {oracle}"))?;
    }
    Ok(format!("100 graphs, max |power - oracle| = {worst:.2e}"))
}

fn density_report() -> Result<Value, String> {
    let cfg = ExperimentConfig {
        r: 2,
        alpha: 2.0,
        epsilon: 0.05,
        n: 100_000,
        trials: 20,
        master_seed: 42,
        timing: true,
        ..Default::default()
    };
    Ok(cmd_density_search(&cfg).map_err(|e| e.to_string())?.report)
}

fn c3_density(report: &Value) -> Outcome {
    let p2 = solve_two_point(2, 2.0).unwrap().prob(2);
    ensure((p2 - 2.0 / 3.0).abs() < 1e-12, || format!("P(2) = {p2}"))?;
    let successes = report["successes"].as_u64().unwrap();
    let slowest = report["trials"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["wallclock_ms"].as_f64().unwrap())
        .fold(0.0, f64::max);
    ensure(successes >= 18, || format!("{successes}/20 within 0.05"))?;
    ensure(slowest <= 60_000.0, || format!("slowest trial {slowest:.0} ms"))?;
    Ok(format!("{successes}/20 trials within 0.05, slowest {:.1} s", slowest / 1e3))
}

fn c4_rate_shape() -> Outcome {
    let cfg = ExperimentConfig {
        n_list: vec![1_000, 10_000, 100_000],
        trials: 10,
        master_seed: 42,
        ..Default::default()
    };
    let report = cmd_sweep_n(&cfg).map_err(|e| e.to_string())?.report;
    let medians: Vec<f64> = report["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["median_abs_error"].as_f64().unwrap())
        .collect();
    let inversions = report["inversions"].as_u64().unwrap();
    ensure(inversions <= 1, || format!("medians {medians:?}"))?;
    Ok(format!("medians {medians:.4?}, {inversions} inversion(s)"))
}

fn c5_matching_law() -> Outcome {
    // independent enumeration of perfect matchings of {0,1,2,3}
    fn matchings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
        if items.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for i in 1..items.len() {
            let rest: Vec<usize> = items[1..].iter().copied().filter(|&x| x != items[i]).collect();
            for mut m in matchings(&rest) {
                m.push((items[0], items[i]));
                out.push(m);
            }
        }
        out
    }
    let all = matchings(&[0, 1, 2, 3]);
    ensure(all.len() == 3, || format!("{} matchings enumerated", all.len()))?;
    let seq = DegreeSequence::from_degrees(vec![2, 2]).unwrap();
    let mut rng = seed::rng(5);
    let draws = 100_000;
    let mut counts = [0usize; 3];
    for _ in 0..draws {
        let g = sample_matching_with(&seq, &mut rng).unwrap();
        counts[g.partner(0) - 1] += 1;
    }
    let p = 1.0 / 3.0;
    let se = (draws as f64 * p * (1.0 - p)).sqrt();
    for &c in &counts {
        ensure((c as f64 - draws as f64 * p).abs() <= 3.0 * se, || format!("counts {counts:?}"))?;
    }
    Ok(format!("3 matchings, counts {counts:?} within 3 SE of {:.0}", draws as f64 * p))
}

fn c6_ugw_mean() -> Outcome {
    let dist = solve_two_point(2, 2.0).unwrap();
    let (a, b) = dist.derived_constants();
    let runs = 100_000;
    let trajs = simulate_many(&dist, 8, 6, runs, RootLaw::P).map_err(|e| e.to_string())?;
    for t in 1..=8 {
        let xs: Vec<f64> = trajs.iter().map(|tr| tr.z[t] as f64).collect();
        let mean = xs.iter().sum::<f64>() / runs as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
        let se = (var / runs as f64).sqrt();
        let expected = a.powi(t as i32 - 1) * b;
        ensure((mean - expected).abs() <= 3.0 * se, || {
            format!("t={t}: mean {mean} expected {expected} se {se}")
        })?;
    }
    let stats = martingale_residuals(&trajs, &dist).map_err(|e| e.to_string())?;
    ensure(stats.contains_a, || format!("pooled slope {:?}", stats.pooled))?;
    Ok(format!(
        "E Z_t within 3 SE for t<=8; slope {:.4} in [{:.4}, {:.4}] contains a = {a}",
        stats.pooled.slope, stats.pooled.ci_low, stats.pooled.ci_high
    ))
}

fn c7_q_oracle() -> Outcome {
    let dist = solve_two_point(2, 2.0).unwrap();
    for s in 0..1000u64 {
        for ell in 1..=4 {
            let q = simulate_q(&dist, ell, seed::split(7, s)).map_err(|e| e.to_string())?;
            ensure(q.brute_force == Some(q.q), || {
                format!("seed {s} ell {ell}: {} vs {:?}", q.q, q.brute_force)
            })?;
        }
    }
    let study = q_convergence_study(&dist, 9, 10_000, 7).map_err(|e| e.to_string())?;
    ensure(study.plateau, || format!("relative change {}", study.relative_change))?;
    Ok(format!(
        "4000 decompositions match brute force; ratio change {:.4} between l=8 and l=9",
        study.relative_change
    ))
}

fn c8_tangle_free() -> Outcome {
    let n = 10_000;
    let ell = (0.2 * (n as f64).log2()).floor() as usize;
    let seq = realize_sequence(&solve_two_point(2, 2.0).unwrap(), n).unwrap();
    let free = (0..100u64)
        .filter(|&i| {
            let g = sample_simple(&seq, seed::split(8, i), 1000).unwrap().graph;
            tangle_free_check(g.as_multi(), ell)
        })
        .count();
    ensure(free >= 99, || format!("{free}/100 tangle-free at l={ell}"))?;
    Ok(format!("{free}/100 graphs {ell}-tangle-free"))
}

fn c9_rejection() -> Outcome {
    let seq = realize_sequence(&solve_two_point(2, 2.0).unwrap(), 10_000).unwrap();
    let mut worst = 0;
    let ok = (0..100u64)
        .filter(|&i| match sample_simple(&seq, seed::split(9, i), 200) {
            Ok(s) => {
                worst = worst.max(s.attempts);
                true
            }
            Err(_) => false,
        })
        .count();
    ensure(ok >= 99, || format!("{ok}/100 within 200 attempts"))?;
    Ok(format!("{ok}/100 within 200 attempts, most attempts {worst}"))
}

fn c10_subgroup() -> Outcome {
    let cfg = ExperimentConfig {
        r: 2,
        alpha: 2.0,
        epsilon: 0.1,
        n: 200,
        trials: 20,
        master_seed: 42,
        ..Default::default()
    };
    let report = cmd_emit_subgroup(&cfg).map_err(|e| e.to_string())?.report;
    let (n, m, rank) = (
        report["n"].as_u64().unwrap(),
        report["m"].as_u64().unwrap(),
        report["rank"].as_u64().unwrap(),
    );
    let gap = report["certificate"]["gap"].as_f64().unwrap();
    ensure(report["immersion_verified"] == true, || "immersion not verified".into())?;
    ensure(rank + n == m + 1, || format!("rank {rank}, |E| {m}, |V| {n}"))?;
    ensure(report["words_reduced"] == true, || "unreduced word".into())?;
    ensure(gap <= 0.1, || format!("|rate - λ₁| = {gap}"))?;

    let mut rng = seed::rng(10);
    let mut trips = 0;
    let mut worst: f64 = 0.0;
    while trips < 100 {
        let n = rng.random_range(3..=12);
        let extra = rng.random_range(0..=(20 - n).min(n));
        let g = random_core_graph(&mut rng, n, extra, 4);
        let labeled = immerse(g.as_multi(), 2).map_err(|e| e.to_string())?;
        let basis = subgroup_basis(&labeled, 0).map_err(|e| e.to_string())?;
        let (folded, _) = fold_words(&basis.words, 2).map_err(|e| e.to_string())?;
        let (l0, l1) = (lambda1(g.as_multi(), 200_000), lambda1(&folded.underlying(), 200_000));
        worst = worst.max((l0 - l1).abs());
        ensure((l0 - l1).abs() <= 1e-6, || format!("round trip {l0} -> {l1}"))?;
        trips += 1;
    }
    Ok(format!(
        "rank {rank} = {m} - {n} + 1, certificate gap {gap:.4}; 100 fold round trips within {worst:.1e}"
    ))
}

fn c11_prop51(report: &Value) -> Outcome {
    let w = &report["witness"];
    let ell = w["prop51"]["ell"].as_u64().unwrap() as i32;
    let a = report["a"].as_f64().unwrap();
    let ratio = w["prop51"]["ratio"].as_f64().unwrap() / a.powi(ell);
    let cosine = w["prop51"]["cosine"].as_f64().unwrap();
    ensure((0.01..=100.0).contains(&ratio), || format!("ratio/a^l = {ratio}"))?;
    ensure(cosine >= 0.1, || format!("cosine = {cosine}"))?;
    for g in [named::petersen(), named::complete(5), named::circulant(64, &[1, 3, 9])] {
        let d = g.as_multi().degree(0);
        let op = NBOperator::new(g.as_multi()).unwrap();
        for l in 0..6 {
            let p = prop51_diagnostics(&op, l);
            let exact = ((d - 1) as f64).powi(l as i32);
            ensure((p.ratio / exact - 1.0).abs() < 1e-12 && (p.cosine - 1.0).abs() < 1e-12, || {
                format!("d={d} l={l}: {p:?}")
            })?;
        }
    }
    Ok(format!("witness ratio/a^l = {ratio:.3}, cosine = {cosine:.3} at l={ell}; exact on regular graphs"))
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |id: u32, name: &str, outcome: Outcome| {
        match &outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail}");
            }
        }
    };
    report(1, "regular exactness", c1_regular_exactness());
    report(2, "oracle equivalence", c2_oracle_equivalence());
    let density = density_report();
    report(3, "density at n=1e5", density.as_ref().map_err(Clone::clone).and_then(c3_density));
    report(4, "rate shape", c4_rate_shape());
    report(5, "matching-count law", c5_matching_law());
    report(6, "UGW mean law", c6_ugw_mean());
    report(7, "Q_l oracle and plateau", c7_q_oracle());
    report(8, "tangle-free prevalence", c8_tangle_free());
    report(9, "simple-graph rejection", c9_rejection());
    report(10, "subgroup pipeline", c10_subgroup());
    report(11, "alignment diagnostics", density.as_ref().map_err(Clone::clone).and_then(c11_prop51));
    if failures == 0 {
        println!("acceptance: all 11 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
