//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pnext::corpus::{
    abelian_groups_up_to, all_subgroups, random_divisible_pair, random_doubly_stochastic,
    random_pseudonorm, random_uniform_pair,
};
use pnext::extend::{chain_extend, prime_step_extend, ExtensionProblem, RhoEvaluator};
use pnext::transversal::{birkhoff_decompose, p_fractional_transversal, transversal};
use pnext::winding::{pair_distance, winding_norm};
use pnext::{
    lattice_extend, FiniteAbelianGroup, LatticeBase, LatticePoint, Pseudonorm, Rational64 as Q,
    Subgroup, UniformCollection,
};

const NORMS_PER_PAIR: usize = 20;
const FLOAT_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn report(n: u32, title: &str, started: Instant, outcome: &Outcome) {
    println!(
        "criterion {n} [{}] {title}: {} ({:.1}s)",
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.detail,
        started.elapsed().as_secs_f64()
    );
}

/// Every (G, H, p) with |G| <= 64 and G/H of exponent p.
fn prime_exponent_pairs() -> Vec<(FiniteAbelianGroup, Subgroup, u64)> {
    let mut out = Vec::new();
    for g in abelian_groups_up_to(64) {
        let whole = Subgroup::whole(&g);
        for h in all_subgroups(&g) {
            if h.len() == g.order() {
                continue;
            }
            let index = (g.order() / h.len()) as u64;
            let p = pnext::group::prime_factors(index)[0];
            if whole
                .ids()
                .iter()
                .all(|&x| h.contains_id(g.scale_id(p as i64, x)))
            {
                out.push((g.clone(), h, p));
            }
        }
    }
    out
}

struct SweepStats {
    pairs: usize,
    extensions: usize,
    restriction_failures: Vec<String>,
    invalid: Vec<String>,
    exact_mismatches: Vec<String>,
    literal_checked: usize,
    literal_mismatches: Vec<String>,
    extend_time: Duration,
    oracle_time: Duration,
}

/// Criteria 1, 2 and 4 share one corpus.
fn prime_step_sweep() -> SweepStats {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut stats = SweepStats {
        pairs: 0,
        extensions: 0,
        restriction_failures: Vec::new(),
        invalid: Vec::new(),
        exact_mismatches: Vec::new(),
        literal_checked: 0,
        literal_mismatches: Vec::new(),
        extend_time: Duration::ZERO,
        oracle_time: Duration::ZERO,
    };
    for (g, h, p) in prime_exponent_pairs() {
        stats.pairs += 1;
        let whole = Subgroup::whole(&g);
        for i in 0..NORMS_PER_PAIR {
            let base: Pseudonorm<Q> = random_pseudonorm(&h, &mut rng, 12, 6);
            let label = || format!("G=Z{:?} |H|={} p={p} norm#{i}", g.orders(), h.len());
            let clock = Instant::now();
            let problem = ExtensionProblem::new(&whole, base.clone(), p, 1).expect("valid problem");
            let extended = prime_step_extend(&problem);
            stats.extend_time += clock.elapsed();
            let ext = match extended {
                Ok(e) => e,
                Err(e) => {
                    stats.restriction_failures.push(format!("{}: {e}", label()));
                    continue;
                }
            };
            stats.extensions += 1;
            if !ext.norm.agrees_on(&base, &h) {
                stats.restriction_failures.push(label());
            }
            if !ext.norm.validate().is_ok() {
                stats.invalid.push(label());
            }
            let clock = Instant::now();
            let exact = common::exact_extension(&problem);
            if exact != ext.norm.values() {
                stats.exact_mismatches.push(label());
            }
            // literal cap + 1 recomputation on a deterministic slice
            if i == 0 && problem.basis_len() <= 3 {
                stats.literal_checked += 1;
                let wider = prime_step_extend(&problem.with_cap(2)).expect("valid problem");
                if wider.norm.values() != ext.norm.values() {
                    stats.literal_mismatches.push(label());
                }
            }
            stats.oracle_time += clock.elapsed();
        }
    }
    stats
}

fn first(v: &[String]) -> String {
    v.first().cloned().unwrap_or_default()
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let cases: Vec<(FiniteAbelianGroup, Subgroup, u64)> = prime_exponent_pairs()
        .into_iter()
        .filter(|(g, _, _)| g.order() <= 16)
        .collect();
    let mut queries = 0;
    let mut mismatches = Vec::new();
    while queries < 600 {
        let (g, h, p) = &cases[rng.gen_range(0..cases.len())];
        let cap = rng.gen_range(0..=2u32);
        let base: Pseudonorm<Q> = random_pseudonorm(h, &mut rng, 12, 6);
        let problem =
            ExtensionProblem::new(&Subgroup::whole(g), base, *p, cap).expect("valid problem");
        let mut eval = RhoEvaluator::new(&problem);
        for _ in 0..4 {
            let x = g.element(rng.gen_range(0..g.order()));
            let y = g.element(rng.gen_range(0..g.order()));
            let fast = eval.rho(&x, &y).expect("members").value;
            let slow = common::brute_rho(&problem, &x, &y, cap);
            if fast != slow {
                mismatches.push(format!(
                    "G=Z{:?} |H|={} cap={cap} x={x} y={y}: {fast} vs {slow}",
                    g.orders(),
                    h.len()
                ));
            }
            queries += 1;
        }
    }
    Outcome::new(
        mismatches.is_empty(),
        format!(
            "{queries} queries, {} mismatches {}",
            mismatches.len(),
            first(&mismatches)
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut failures = Vec::new();
    let mut cross_checked = 0;
    for t in 0..1000 {
        let k = rng.gen_range(1..=4usize);
        let ground = rng.gen_range(k..=20usize);
        let (a, b) = random_uniform_pair(&mut rng, k, ground);
        let ca = UniformCollection::new(k, a.clone()).expect("uniform");
        let cb = UniformCollection::new(k, b.clone()).expect("uniform");
        match transversal(&ca, &cb) {
            Ok(i) => {
                let all = a.iter().chain(&b);
                if !all.clone().all(|c| c.intersection(&i).count() == 1) {
                    failures.push(format!("instance {t}: |I ∩ C| != 1"));
                }
                if ground <= 12 {
                    cross_checked += 1;
                    let sets: Vec<BTreeSet<u32>> = all.cloned().collect();
                    if !common::transversal_exists(&sets, ground) {
                        failures.push(format!("instance {t}: oracle finds no transversal"));
                    }
                }
            }
            Err(e) => failures.push(format!("instance {t}: {e}")),
        }
    }
    for t in 0..500 {
        let p = [2usize, 3, 5][rng.gen_range(0..3)];
        let ground = rng.gen_range(p..=20usize);
        let (a, b) = random_divisible_pair(&mut rng, p, ground);
        match p_fractional_transversal(&a, &b, p) {
            Ok(i) => {
                if !a
                    .iter()
                    .chain(&b)
                    .all(|c| c.intersection(&i).count() * p == c.len())
                {
                    failures.push(format!("fractional instance {t}: |I ∩ C| != |C|/p"));
                }
            }
            Err(e) => failures.push(format!("fractional instance {t}: {e}")),
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "1000 uniform ({cross_checked} cross-checked) + 500 fractional, {} failures {}",
            failures.len(),
            first(&failures)
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut failures = Vec::new();
    for t in 0..500 {
        let n = rng.gen_range(1..=8usize);
        let m = random_doubly_stochastic::<Q, _>(&mut rng, n);
        let d = birkhoff_decompose(&m);
        let positive = d.terms.iter().all(|t| t.weight > Q::from_integer(0));
        let ok = positive
            && d.weight_sum() == Q::from_integer(1)
            && d.recompose() == m.entries()
            && d.terms.len() <= m.positive_entries();
        if !ok {
            failures.push(format!("matrix {t} (n={n})"));
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "500 matrices, {} failures {}",
            failures.len(),
            first(&failures)
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut pairs = 0;
    let mut failures = Vec::new();
    for g in abelian_groups_up_to(64) {
        let whole = Subgroup::whole(&g);
        for h in all_subgroups(&g) {
            pairs += 1;
            let base: Pseudonorm<Q> = random_pseudonorm(&h, &mut rng, 12, 6);
            let label = format!("G=Z{:?} |H|={}", g.orders(), h.len());
            let chain = match chain_extend(&whole, &base, 1) {
                Ok(c) => c,
                Err(e) => {
                    failures.push(format!("{label}: {e}"));
                    continue;
                }
            };
            let mut previous = base.clone();
            let mut ok = chain.norm.carrier() == &whole;
            for step in &chain.steps {
                ok &= step.norm.agrees_on(&previous, previous.carrier());
                previous = step.norm.clone();
            }
            ok &= chain.norm.agrees_on(&base, &h) && chain.norm.validate().is_ok();
            if !ok {
                failures.push(label);
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "{pairs} (G, H) pairs, {} failures {}",
            failures.len(),
            first(&failures)
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    for k in 1..=20u32 {
        let two = winding_norm(k, 2.0f64);
        if (two - 2f64.powi(-(k as i32))).abs() > FLOAT_TOL {
            failures.push(format!("|2e_{k}| = {two}"));
        }
        let one = winding_norm(k, 1.0f64);
        if one <= 2.0 {
            failures.push(format!("|e_{k}| = {one}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_identity = 0f64;
    for k in 1..=5u32 {
        for _ in 0..100_000 {
            let t: f64 = rng.gen_range(-8.0..=8.0);
            let s: f64 = rng.gen_range(-8.0..=8.0);
            let lhs = winding_norm(k, t - s);
            worst_excess = worst_excess.max(lhs - winding_norm(k, t) - winding_norm(k, s));
            worst_identity = worst_identity.max((pair_distance(k, t, s) - lhs).abs());
        }
    }
    if worst_excess > FLOAT_TOL {
        failures.push(format!("triangle excess {worst_excess:e}"));
    }
    if worst_identity > FLOAT_TOL {
        failures.push(format!("identity error {worst_identity:e}"));
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "k=1..20 checked, 5x10^5 triples, max excess {worst_excess:.3e}, max identity error {worst_identity:.3e} {}",
            first(&failures)
        ),
    )
}

fn criterion_9() -> Outcome {
    let window = 8;
    let ext = match lattice_extend::<Q>(1, 2, LatticeBase::AbsSum, window, None) {
        Ok(e) => e,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let half = LatticePoint(vec![Q::new(1, 2)]);
    let mut failures = Vec::new();
    let oracle = common::lattice_abs_oracle(1, 2, 1);
    if ext.value(&half) != Some(&Q::from_integer(1)) || oracle != Q::from_integer(1) {
        failures.push(format!("|1/2| = {:?}, oracle {oracle}", ext.value(&half)));
    }
    for n in -window..=window {
        let x = LatticePoint(vec![Q::from_integer(n)]);
        if ext.value(&x) != Some(&Q::from_integer(n.abs())) {
            failures.push(format!("|{n}| = {:?}", ext.value(&x)));
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "|1/2| = 1, {} integer points restrict to abs {}",
            2 * window + 1,
            first(&failures)
        ),
    )
}

fn main() {
    let mut all_pass = true;
    let mut record = |n: u32, title: &str, started: Instant, o: Outcome| {
        report(n, title, started, &o);
        all_pass &= o.pass;
    };

    let started = Instant::now();
    let s = prime_step_sweep();
    record(
        1,
        "restriction identity",
        started,
        Outcome::new(
            s.restriction_failures.is_empty() && s.extend_time.as_secs() < 300,
            format!(
                "{} (G, H, p) triples, {} extensions in {:.1}s, {} restriction failures {}",
                s.pairs,
                s.extensions,
                s.extend_time.as_secs_f64(),
                s.restriction_failures.len(),
                first(&s.restriction_failures)
            ),
        ),
    );
    record(
        2,
        "pseudonorm validity",
        started,
        Outcome::new(
            s.invalid.is_empty() && s.extensions > 0,
            format!(
                "{} extensions validated, {} invalid {}",
                s.extensions,
                s.invalid.len(),
                first(&s.invalid)
            ),
        ),
    );
    record(
        4,
        "cap stability",
        started,
        Outcome::new(
            s.exact_mismatches.is_empty() && s.literal_mismatches.is_empty(),
            format!(
                "cap 1 equals the unbounded infimum on {} of {} extensions; literal cap 2 rerun on {} with {} changes; oracles {:.1}s {}{}",
                s.extensions - s.exact_mismatches.len(),
                s.extensions,
                s.literal_checked,
                s.literal_mismatches.len(),
                s.oracle_time.as_secs_f64(),
                first(&s.exact_mismatches),
                first(&s.literal_mismatches)
            ),
        ),
    );

    let started = Instant::now();
    let o = criterion_3();
    let pass = o.pass && started.elapsed().as_secs() < 120;
    record(
        3,
        "oracle equivalence",
        started,
        Outcome::new(pass, o.detail),
    );

    let started = Instant::now();
    record(5, "transversal contract", started, criterion_5());
    let started = Instant::now();
    record(6, "Birkhoff exactness", started, criterion_6());
    let started = Instant::now();
    record(7, "chain extension", started, criterion_7());
    let started = Instant::now();
    record(8, "winding norm claims", started, criterion_8());
    let started = Instant::now();
    record(9, "lattice case", started, criterion_9());

    if !all_pass {
        std::process::exit(1);
    }
}
