//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use twofaced::coder::{bernoulli_decode, bernoulli_encode};
use twofaced::kernel::{cond_symbol, cond_symbol_recursive};
use twofaced::process::{max_abs_deviation_from_uniform, steps_to_uniform};
use twofaced::stats::battery;
use twofaced::*;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn seq(s: &str) -> BitSequence {
    s.parse().unwrap()
}

fn c1_worked_example() -> Outcome {
    let y = transform(2, &seq("10010"), &seq("01")).map_err(|e| e.to_string())?;
    ensure(y == seq("01110"), || format!("got {y}"))?;
    Ok(format!("tau^2(10010, 01) = {y}"))
}

fn c2_recursion_equivalence() -> Outcome {
    let mut checked = 0u64;
    for k in 1..=12 {
        for variant in [Variant::Plain, Variant::Bar] {
            let spec = KernelSpec::new(variant, k, 0.3).unwrap();
            for i in 0..1u64 << k {
                let c = Context::from_index(i, k);
                for b in [false, true] {
                    let rec = cond_symbol_recursive(&spec, b, &c).unwrap();
                    let closed = cond_symbol(&spec, b, &c).unwrap();
                    let (pr, pc) = (
                        cond_prob_recursive(&spec, b, &c).unwrap(),
                        cond_prob(&spec, b, &c).unwrap(),
                    );
                    ensure(rec == closed && pr == pc, || {
                        format!("k={k} {variant:?} u={i:0k$b} b={b}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked} (k, variant, context, bit) cases identical"
    ))
}

fn c3_stationarity() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=8 {
        for pi in [0.1, 0.2, 0.5] {
            for variant in [Variant::Plain, Variant::Bar] {
                let spec = KernelSpec::new(variant, k, pi).unwrap();
                let next = StateDistribution::uniform(k)
                    .unwrap()
                    .propagate(&spec)
                    .unwrap();
                let dev = next.max_abs_deviation_from_uniform();
                worst = worst.max(dev);
                ensure(dev <= 1e-12, || {
                    format!("k={k} pi={pi} {variant:?}: {dev:e}")
                })?;
            }
        }
    }
    Ok(format!("max-norm error {worst:e} <= 1e-12"))
}

fn c4_uniform_marginals() -> Outcome {
    let mut worst = 0.0f64;
    let mut laws = 0;
    for k in 1..=8 {
        let uniform = StateDistribution::uniform(k).unwrap();
        for pi in [0.1, 0.2, 0.5] {
            for variant in [Variant::Plain, Variant::Bar] {
                let spec = KernelSpec::new(variant, k, pi).unwrap();
                for j in 0..=16 {
                    for m in 1..=k {
                        let law = exact_block_distribution(&spec, &uniform, j, m).unwrap();
                        let dev = max_abs_deviation_from_uniform(&law);
                        worst = worst.max(dev);
                        laws += 1;
                        ensure(dev <= 1e-12, || {
                            format!("k={k} pi={pi} j={j} m={m}: {dev:e}")
                        })?;
                    }
                }
            }
        }
    }
    Ok(format!("{laws} block laws, max |P(u) - 2^-m| = {worst:e}"))
}

fn c5_ergodic_convergence() -> Outcome {
    let mut records = Vec::new();
    for k in 1..=6 {
        for pi in [0.1, 0.2] {
            let spec = KernelSpec::plain(k, pi).unwrap();
            let mut worst = 0;
            for s in 0..1usize << k {
                let start = StateDistribution::point(k, s).unwrap();
                let j = steps_to_uniform(&spec, &start, 1e-6, 1_000_000)
                    .unwrap()
                    .ok_or_else(|| {
                        format!("k={k} pi={pi} state {s}: no convergence in 10^6 steps")
                    })?;
                worst = worst.max(j);
            }
            records.push(format!("J({k},{pi})={worst}"));
        }
    }
    Ok(format!(
        "TV < 1e-6 from every point mass; {}",
        records.join(" ")
    ))
}

fn c6_entropy_staircase() -> Outcome {
    let mut worst_exact = 0.0f64;
    let mut worst_emp = 0.0f64;
    for k in 1..=6 {
        for (pi_idx, pi) in [0.1, 0.2, 0.5].into_iter().enumerate() {
            let spec = KernelSpec::plain(k, pi).unwrap();
            let h = binary_entropy(pi);
            let mut exact = Vec::new();
            for m in 1..=k + 1 {
                let hm = exact_conditional_entropy(&spec, m).unwrap();
                let target = if m <= k { 1.0 } else { h };
                worst_exact = worst_exact.max((hm - target).abs());
                ensure((hm - target).abs() <= 1e-12, || {
                    format!("k={k} pi={pi} h_{m}={hm} want {target}")
                })?;
                exact.push(hm);
            }
            let seed = 600 + 10 * k as u64 + pi_idx as u64;
            let mut g = Generator::new(spec, CounterSource::new(seed)).unwrap();
            let sample = g.take_bits(1_000_000).unwrap();
            for m in 1..=k + 1 {
                let est = empirical_conditional_entropy(&sample, m).unwrap().bits;
                let err = (est - exact[m - 1]).abs();
                worst_emp = worst_emp.max(err);
                ensure(err <= 0.01, || {
                    format!("k={k} pi={pi} m={m}: plug-in {est} vs {}", exact[m - 1])
                })?;
            }
        }
    }
    Ok(format!(
        "exact error {worst_exact:e} <= 1e-12, plug-in error {worst_emp:.4} <= 0.01"
    ))
}

fn iid_block_law(k: usize, p_one: f64) -> Vec<f64> {
    (0..1usize << k)
        .map(|w| {
            let ones = w.count_ones() as i32;
            p_one.powi(ones) * (1.0 - p_one).powi(k as i32 - ones)
        })
        .collect()
}

fn c7_xor_convolution() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=4 {
        let n = 1usize << k;
        let mut point = vec![0.0; n];
        point[n - 1 - (n >> 1)] = 1.0;
        let y_laws = [
            ("point", point),
            ("iid-0.9", iid_block_law(k, 0.9)),
            ("uniform", vec![1.0 / n as f64; n]),
        ];
        for pi in [0.1, 0.2] {
            for variant in [Variant::Plain, Variant::Bar] {
                let spec = KernelSpec::new(variant, k, pi).unwrap();
                for j in [0, 3] {
                    let px = exact_block_distribution(
                        &spec,
                        &StateDistribution::uniform(k).unwrap(),
                        j,
                        k,
                    )
                    .unwrap();
                    for (name, py) in &y_laws {
                        let pz = xor_convolve(&px, py).unwrap();
                        let dev = max_abs_deviation_from_uniform(&pz);
                        worst = worst.max(dev);
                        ensure(dev <= 1e-12, || format!("k={k} pi={pi} Y={name}: {dev:e}"))?;
                    }
                }
            }
        }
    }
    Ok(format!("law of X xor Y uniform, max deviation {worst:e}"))
}

/// Exact path law of a kernel over `h` positions by brute-force enumeration:
/// uniform initial word, then products of conditional probabilities.
fn brute_path_law(spec: &KernelSpec, h: usize) -> Vec<f64> {
    let k = spec.order();
    let mut law = vec![0.0; 1 << h];
    for init in 0..1u64 << k {
        let init_bits = BitSequence::from_index(init, k);
        for tail in 0..1u64 << h.saturating_sub(k) {
            let mut path = init_bits.clone();
            path.extend_from(&BitSequence::from_index(tail, h.saturating_sub(k)));
            let mut p = 1.0 / (1u64 << k) as f64;
            for i in k..h {
                let ctx = Context::from_sequence(&path.slice(i - k, i));
                p *= cond_prob(spec, path[i], &ctx).unwrap();
            }
            law[path.slice(0, h).to_index() as usize] += p;
        }
    }
    law
}

fn c8_twice_two_faced() -> Outcome {
    let horizon = 3;
    let cuts = CutSequence::new(vec![1, 2, 3]).unwrap();
    let mut worst = 0.0f64;
    for pi in [0.1, 0.2] {
        let kernels: Vec<KernelSpec> = (1..=3).map(|k| KernelSpec::plain(k, pi).unwrap()).collect();
        // Joint enumeration of all component paths, combined literally per position.
        let paths: Vec<Vec<f64>> = kernels.iter().map(|s| brute_path_law(s, horizon)).collect();
        let mut outcomes = 0u64;
        let mut brute = vec![0.0; 1 << horizon];
        for a in 0..1usize << horizon {
            for b in 0..1usize << horizon {
                for c in 0..1usize << horizon {
                    outcomes += 1;
                    let p = paths[0][a] * paths[1][b] * paths[2][c];
                    let words = [a, b, c];
                    let mut w = 0usize;
                    for i in 1..=horizon {
                        let bit = (0..cuts.components_at(i))
                            .fold(0, |acc, comp| acc ^ (words[comp] >> (horizon - i)) & 1);
                        w = (w << 1) | bit;
                    }
                    brute[w] += p;
                }
            }
        }
        ensure(outcomes <= 1 << 12, || format!("{outcomes} joint outcomes"))?;
        let law = exact_twice_two_faced_law(&kernels, &cuts, horizon).unwrap();
        for (x, y) in law.iter().zip(&brute) {
            ensure((x - y).abs() <= 1e-15, || {
                format!("convolution {x} vs enumeration {y}")
            })?;
        }
        // Every block of length l <= 3 at every offset inside the horizon.
        for len in 1..=horizon {
            for start in 0..=horizon - len {
                let mut block = vec![0.0; 1 << len];
                for (w, &p) in brute.iter().enumerate() {
                    block[(w >> (horizon - start - len)) & ((1 << len) - 1)] += p;
                }
                let dev = max_abs_deviation_from_uniform(&block);
                worst = worst.max(dev);
                ensure(dev <= 1e-12, || {
                    format!("pi={pi} block [{start}, {}) deviation {dev:e}", start + len)
                })?;
            }
        }
    }
    Ok(format!(
        "2^9 joint outcomes, all block laws of length <= 3 uniform (max dev {worst:e})"
    ))
}

fn c9_statistical_signature() -> Outcome {
    // Seed 7 is the seed of the documented gen | analyze pipeline.
    let spec = KernelSpec::plain(8, 0.2).unwrap();
    let mut g = Generator::new(spec, CounterSource::new(7)).unwrap();
    let sample = g.take_bits(1_000_000).unwrap();
    let stats = battery(&sample, 1..=9).unwrap();
    let summary: Vec<String> = stats
        .iter()
        .map(|s| format!("p{}={:.1e}", s.block_len, s.p_value))
        .collect();
    let accept = stats[..8].iter().all(|s| s.p_value > 1e-4);
    let reject = stats[8].p_value < 1e-6;
    ensure(accept && reject, || {
        format!(
            "accept m<=8: {accept}, reject m=9: {reject}; {}",
            summary.join(" ")
        )
    })?;
    Ok(summary.join(" "))
}

fn bernoulli_sample(n: usize, pi: f64, seed: u64) -> BitSequence {
    let mut s = CounterSource::new(seed);
    (0..n).map(|_| s.next_uniform().unwrap() >= pi).collect()
}

fn c10_seed_expander() -> Outcome {
    let mut rates = Vec::new();
    for (i, pi) in [0.01, 0.1, 0.3, 0.5].into_iter().enumerate() {
        for n in [1usize, 10, 1_000, 100_000] {
            let x = bernoulli_sample(n, pi, 1000 + i as u64 * 10 + n as u64);
            let code = bernoulli_encode(&x, pi).unwrap();
            let back = bernoulli_decode(&code, pi, n).unwrap();
            ensure(back == x, || format!("round trip failed for pi={pi} n={n}"))?;
            if n == 100_000 {
                let rate = code.len() as f64 / n as f64;
                let h = binary_entropy(pi);
                ensure(rate >= h - 0.01 && rate <= h + 0.02, || {
                    format!("pi={pi}: rate {rate} vs H {h}")
                })?;
                rates.push(format!("{pi}:{rate:.4}/{h:.4}"));
            }
        }
    }
    let grid = std::iter::once(0.01).chain((1..=10).map(|i| i as f64 / 10.0));
    let mut worst = 0.0f64;
    for h in grid {
        let p = entropy_inverse(h, 1e-12).unwrap();
        let err = (binary_entropy(p) - h).abs();
        worst = worst.max(err);
        ensure(err <= 1e-12, || format!("h={h}: |H(pi) - h| = {err:e}"))?;
    }
    let k = 16;
    let n = 10_000;
    let seed = CounterSource::new(10).next_bits(k + n).unwrap();
    let expanded = expand(&seed, &ExpanderConfig::new(k, n).unwrap()).unwrap();
    let direct = transform(k, &seed.slice(k, k + n), &seed.slice(0, k)).unwrap();
    ensure(expanded == direct, || {
        "full-entropy expansion differs from tau^k of the code bits".into()
    })?;
    Ok(format!(
        "round trips exact; rate/H {}; inverse error {worst:e}; h=1 expansion identical",
        rates.join(" ")
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "worked two-faced conversion example",
            budget: Duration::from_millis(1),
            run: c1_worked_example,
        },
        Criterion {
            id: 2,
            name: "closed form equals recursion",
            budget: Duration::from_secs(5),
            run: c2_recursion_equivalence,
        },
        Criterion {
            id: 3,
            name: "uniform law is stationary",
            budget: Duration::from_secs(5),
            run: c3_stationarity,
        },
        Criterion {
            id: 4,
            name: "uniform block marginals at every offset",
            budget: Duration::from_secs(10),
            run: c4_uniform_marginals,
        },
        Criterion {
            id: 5,
            name: "ergodic convergence from point masses",
            budget: Duration::from_secs(30),
            run: c5_ergodic_convergence,
        },
        Criterion {
            id: 6,
            name: "entropy staircase",
            budget: Duration::from_secs(60),
            run: c6_entropy_staircase,
        },
        Criterion {
            id: 7,
            name: "xor with two-faced law is uniform",
            budget: Duration::from_secs(10),
            run: c7_xor_convolution,
        },
        Criterion {
            id: 8,
            name: "twice-two-faced construction",
            budget: Duration::from_secs(10),
            run: c8_twice_two_faced,
        },
        Criterion {
            id: 9,
            name: "two-faced statistical signature",
            budget: Duration::from_secs(30),
            run: c9_statistical_signature,
        },
        Criterion {
            id: 10,
            name: "seed expander",
            budget: Duration::from_secs(60),
            run: c10_seed_expander,
        },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= c.budget {
                Ok(detail)
            } else {
                Err(format!("took {elapsed:?}, budget {:?}", c.budget))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS  C{:<2} {} [{elapsed:.2?}] {detail}", c.id, c.name),
            Err(why) => {
                println!("FAIL  C{:<2} {} [{elapsed:.2?}] {why}", c.id, c.name);
                failed.push(c.id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
