//! End-to-end acceptance checks, one PASS/FAIL line per criterion.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use parity_trees::bounds::{check_chain, check_closed_forms, check_ratio, f_recurrence, g_recurrence};
use parity_trees::game::{generate_random_game, ParityGame, Player, Vertex};
use parity_trees::measure::{
    lift_value, strategy_from_measure, transfer_signature, validate_signature, value_iteration, Measure, MeasureValue,
    Policy,
};
use parity_trees::oracle::{play_outcome, solve_bruteforce, strategies};
use parity_trees::pgsolver::{parse_pgsolver, write_pgsolver};
use parity_trees::tree::{
    embed, enumerate_trees, find_minimal_universal, is_universal, make_naive_tree, make_succinct_tree,
    signature_to_tree, LeafId, OrderedTree,
};
use parity_trees::zielonka::{solve_with_signature, solve_zielonka};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Regions from brute force, Zielonka and value iteration over both trees must coincide.
fn four_way(g: &ParityGame) -> Result<(), String> {
    let brute = solve_bruteforce(g).map_err(|e| e.to_string())?;
    let zielonka = solve_zielonka(g);
    let (n, h) = (g.num_vertices(), g.d() / 2);
    let naive = value_iteration(g, &make_naive_tree(n, h).unwrap(), Policy::Fifo).unwrap();
    let succinct = value_iteration(g, &make_succinct_tree(n, h).unwrap(), Policy::Fifo).unwrap();
    let text = || write_pgsolver(g).unwrap_or_default();
    ensure(zielonka == brute, || format!("zielonka differs from brute force on\n{}", text()))?;
    ensure(naive.region == brute, || format!("vi(naive) differs from brute force on\n{}", text()))?;
    ensure(succinct.region == brute, || format!("vi(succinct) differs from brute force on\n{}", text()))
}

fn exhaustive_equivalence() -> Outcome {
    let mut count = 0;
    for n in 1..=3 {
        for g in common::all_games(n, 4, 2) {
            four_way(&g)?;
            count += 1;
        }
    }
    Ok(format!("{count} games"))
}

fn random_equivalence() -> Outcome {
    for i in 0..500 {
        four_way(&common::random_game(i)).map_err(|e| format!("seed {i}: {e}"))?;
    }
    Ok("500 games".into())
}

fn minimal_universal_tree() -> Outcome {
    let (size, witness) = find_minimal_universal(5, 2, 1_000_000).map_err(|e| e.to_string())?;
    ensure(size == 11, || format!("minimal (5,2)-universal size {size}, expected 11"))?;
    ensure(witness.leaf_count() == 11, || "witness has the wrong size".into())?;
    let mut rejected = 0;
    for leaves in 5..=10 {
        for t in enumerate_trees(leaves, 2, 1_000_000).map_err(|e| e.to_string())? {
            let verdict = is_universal(&t, 5, 2, 1_000).map_err(|e| e.to_string())?;
            ensure(!verdict.universal, || format!("a {leaves}-leaf tree is universal"))?;
            rejected += 1;
        }
    }
    ensure(f_recurrence(5, 2) == BigUint::from(11u32), || "f(5,2) != 11".into())?;
    ensure(g_recurrence(5, 2) == BigUint::from(10u32), || "g(5,2) != 10".into())?;
    let naive = make_naive_tree(5, 2).unwrap().leaf_count();
    ensure(naive == 25, || format!("naive(5,2) has {naive} leaves"))?;
    Ok(format!("size 11; all {rejected} trees with 5 to 10 leaves rejected"))
}

fn universality_of_constructions() -> Outcome {
    let mut checked = 0;
    for n in 1..=6 {
        for h in 1..=3 {
            for (name, t) in [("succinct", make_succinct_tree(n, h)), ("naive", make_naive_tree(n, h))] {
                let t = t.map_err(|e| e.to_string())?;
                let verdict = is_universal(&t, n, h, 1_000_000).map_err(|e| e.to_string())?;
                ensure(verdict.universal, || format!("{name}({n},{h}) is not universal"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} trees"))
}

fn bound_grids() -> Outcome {
    for report in [check_chain(64, 8), check_closed_forms(8, 8), check_ratio(64, 8)] {
        ensure(report.is_clean(), || report.violations.join("; "))?;
    }
    for n in 1..=64u64 {
        for h in 1..=8u32 {
            let leaves = make_succinct_tree(n as usize, h as usize).map_err(|e| e.to_string())?.leaf_count();
            ensure(BigUint::from(leaves) == f_recurrence(n, h), || format!("succinct({n},{h}) has {leaves} leaves"))?;
        }
    }
    Ok("n <= 64, h <= 8, p <= 8".into())
}

fn random_value(rng: &mut ChaCha8Rng, t: &OrderedTree) -> MeasureValue {
    let k = rng.gen_range(0..=t.leaf_count());
    if k == t.leaf_count() {
        MeasureValue::Top
    } else {
        MeasureValue::Leaf(LeafId(k as u32))
    }
}

fn lift_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..10_000u64 {
        let g = common::random_game(trial);
        let (n, h) = (g.num_vertices(), g.d() / 2);
        let t = if trial % 2 == 0 { make_naive_tree(n, h) } else { make_succinct_tree(n, h) }.unwrap();
        let mu = Measure::new((0..n).map(|_| random_value(&mut rng, &t)).collect());
        let nu = Measure::new((0..n).map(|v| mu.get(v).max(random_value(&mut rng, &t))).collect());
        for v in g.vertices() {
            let lifted = lift_value(&g, &t, &mu, v);
            ensure(lifted >= mu.get(v), || format!("trial {trial}: lift decreases vertex {v}"))?;
            ensure(lifted <= lift_value(&g, &t, &nu, v), || format!("trial {trial}: lift not monotone at {v}"))?;
        }
    }
    let t = make_naive_tree(2, 1).unwrap();
    let values: Vec<MeasureValue> = t.leaves().map(MeasureValue::Leaf).chain([MeasureValue::Top]).collect();
    let mut tiny = 0;
    for g in common::all_games(2, 2, 2) {
        for &a in &values {
            for &b in &values {
                let mu = Measure::new(vec![a, b]);
                for &c in values.iter().filter(|&&c| c >= a) {
                    for &e in values.iter().filter(|&&e| e >= b) {
                        let nu = Measure::new(vec![c, e]);
                        for v in g.vertices() {
                            let lifted = lift_value(&g, &t, &mu, v);
                            ensure(lifted >= mu.get(v) && lifted <= lift_value(&g, &t, &nu, v), || {
                                format!("tiny case violates the lift laws:\n{}", write_pgsolver(&g).unwrap())
                            })?;
                            tiny += 1;
                        }
                    }
                }
            }
        }
    }
    for i in 0..100 {
        let g = common::random_game(i);
        let t = make_succinct_tree(g.num_vertices(), g.d() / 2).unwrap();
        let base = value_iteration(&g, &t, Policy::Fifo).unwrap().measure;
        for policy in [Policy::RoundRobin, Policy::Random(i)] {
            let other = value_iteration(&g, &t, policy).unwrap().measure;
            ensure(other == base, || format!("seed {i}: {policy} differs from fifo"))?;
        }
    }
    Ok(format!("10000 random trials, {tiny} tiny cases, 100 games x 3 policies"))
}

fn lift_budget() -> Outcome {
    for i in 0..500 {
        let g = common::random_game(i);
        let (n, h) = (g.num_vertices(), g.d() / 2);
        for t in [make_naive_tree(n, h).unwrap(), make_succinct_tree(n, h).unwrap()] {
            for policy in [Policy::Fifo, Policy::RoundRobin, Policy::Random(i)] {
                let r = value_iteration(&g, &t, policy).unwrap();
                ensure(r.stats.total <= (n * t.leaf_count()) as u64, || {
                    format!("seed {i}: {} lifts exceed n|T| = {}", r.stats.total, n * t.leaf_count())
                })?;
            }
        }
    }
    let mut sizes = Vec::new();
    for (n, d) in [(1, 2), (3, 2), (4, 4), (5, 6)] {
        // Vertex 0 is a priority-1 self-loop; the rest are a priority-d cycle.
        let owner = vec![Player::Eve; n];
        let priority: Vec<usize> = (0..n).map(|v| if v == 0 { 1 } else { d }).collect();
        let successors: Vec<Vec<Vertex>> = (0..n).map(|v| if v == 0 { vec![0] } else { vec![1 + v % (n - 1).max(1)] }).collect();
        let g = ParityGame::new(d, owner, priority, successors).unwrap();
        for t in [make_naive_tree(n, d / 2).unwrap(), make_succinct_tree(n, d / 2).unwrap()] {
            let r = value_iteration(&g, &t, Policy::Fifo).unwrap();
            ensure(r.measure.get(0).is_top(), || "self-loop vertex not Top".into())?;
            ensure(r.stats.per_vertex[0] == t.leaf_count() as u64, || {
                format!("self-loop lifted {} times, |T| = {}", r.stats.per_vertex[0], t.leaf_count())
            })?;
            sizes.push(t.leaf_count());
        }
    }
    Ok(format!("3000 runs within n|T|; self-loop lifted exactly |T| times for |T| in {sizes:?}"))
}

fn signature_pipeline() -> Outcome {
    let mut playoffs = 0;
    for i in 0..500 {
        let g = common::random_game(i);
        let (n, d) = (g.num_vertices(), g.d());
        let (region, sig) = solve_with_signature(&g);
        let succinct = make_succinct_tree(n, d / 2).unwrap();
        let induced = signature_to_tree(&sig, n, d).map_err(|e| e.to_string())?;
        if let Some(small) = &induced.tree {
            ensure(embed(small, &succinct).unwrap().is_some(), || format!("seed {i}: signature tree does not embed"))?;
        }
        let mu0 = transfer_signature(&sig, &succinct, n, d)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("seed {i}: no transfer"))?;
        validate_signature(&g, &succinct, &mu0).map_err(|e| format!("seed {i}: extracted signature invalid: {e}"))?;
        ensure(g.vertices().all(|v| mu0.get(v).is_top() == region.adam_wins.contains(v)), || {
            format!("seed {i}: Top set differs from Adam's region")
        })?;

        let r = value_iteration(&g, &succinct, Policy::Fifo).unwrap();
        validate_signature(&g, &succinct, &r.measure).map_err(|e| format!("seed {i}: vi output invalid: {e}"))?;
        let sigma = strategy_from_measure(&g, &succinct, &r.measure).map_err(|e| e.to_string())?;
        let edges: Vec<Vec<Vertex>> = g
            .vertices()
            .map(|v| match (r.region.eve_wins.contains(v), g.owner(v)) {
                (false, _) => Vec::new(),
                (true, Player::Eve) => vec![sigma.choice(v).unwrap()],
                (true, Player::Adam) => g.successors(v).to_vec(),
            })
            .collect();
        ensure(common::all_cycles_even(&g, &edges), || format!("seed {i}: odd cycle under the strategy"))?;
        if n <= 5 {
            for tau in strategies(&g, Player::Adam) {
                for v in r.region.eve_wins.iter() {
                    ensure(play_outcome(&g, &sigma, &tau, v) == Player::Eve, || {
                        format!("seed {i}: Adam beats the strategy from {v}")
                    })?;
                }
            }
            playoffs += 1;
        }
    }
    Ok(format!("500 games, {playoffs} strategy playoffs"))
}

fn parser() -> Outcome {
    for seed in 0..1000u64 {
        let n = 1 + (seed % 8) as usize;
        let g = generate_random_game(n, 2 + 2 * (seed % 3) as usize, (1, n.min(3)), seed)
            .unwrap()
            .with_tight_bound();
        let text = write_pgsolver(&g).unwrap();
        let back = parse_pgsolver(&text).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(back == g, || format!("seed {seed}: round trip changed the game"))?;
    }
    let corpus: [(&str, &str, usize); 7] = [
        ("missing_semicolon", "parity 1;\n0 2 0 1;\n1 1 1 0", 3),
        ("duplicate_vertex", "parity 1;\n0 2 0 1;\n0 1 1 0;", 3),
        ("undeclared_successor", "parity 1;\n0 2 0 1;\n1 1 1 7;", 3),
        ("bad_owner", "parity 1;\n0 2 2 1;\n1 1 1 0;", 2),
        ("no_header", "0 2 0 0;", 1),
        ("not_a_number", "parity 1;\n0 two 0 1;\n1 1 1 0;", 2),
        ("id_beyond_header", "parity 0;\n0 2 0 0;\n1 2 0 0;", 3),
    ];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (name, text, line) in corpus {
        let path = dir.path().join(format!("{name}.gm"));
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        let out = Command::new(env!("CARGO_BIN_EXE_ptree"))
            .args(["solve", "-i"])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?;
        let stderr = String::from_utf8_lossy(&out.stderr);
        ensure(out.status.code() == Some(1), || format!("{name}: exit status {:?}", out.status.code()))?;
        ensure(stderr.contains(&format!("line {line}:")), || format!("{name}: diagnostic `{}` lacks line {line}", stderr.trim()))?;
    }
    Ok("1000 round trips, 7 malformed inputs rejected with line numbers".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, u64, Check); 9] = [
        (1, "solver equivalence, exhaustive n <= 3, d <= 4, out-degree <= 2", 120, exhaustive_equivalence),
        (2, "solver equivalence, 500 random games n <= 6, d <= 6", 120, random_equivalence),
        (3, "minimal (5,2)-universal tree has 11 leaves", 60, minimal_universal_tree),
        (4, "naive and succinct trees are universal for n <= 6, h <= 3", 300, universality_of_constructions),
        (5, "bound grids", 60, bound_grids),
        (6, "lift laws and policy independence", 180, lift_laws),
        (7, "lift budget", 60, lift_budget),
        (8, "signature pipeline", 180, signature_pipeline),
        (9, "parser round trip and diagnostics", 60, parser),
    ];
    let mut failed = 0;
    for (id, title, budget, check) in criteria {
        let clock = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let elapsed = clock.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed > Duration::from_secs(budget) {
                Err(format!("{detail}; took {:.1}s, budget {budget}s", elapsed.as_secs_f64()))
            } else {
                Ok(detail)
            }
        });
        match outcome {
            Ok(detail) => println!("PASS {id}: {title} ({detail}; {:.2}s)", elapsed.as_secs_f64()),
            Err(reason) => {
                failed += 1;
                println!("FAIL {id}: {title}: {reason}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
