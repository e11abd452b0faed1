#![allow(dead_code)]

use parity_trees::game::{classify_cycle, generate_random_game, Cycle, CycleParity, ParityGame, Player, Vertex};
use parity_trees::tree::Shape;

/// Every valid game with exactly `n` vertices, priorities in `0..=max_priority`
/// and out-degree at most `max_degree`. The bound `d` is the tight one.
pub fn all_games(n: usize, max_priority: usize, max_degree: usize) -> impl Iterator<Item = ParityGame> {
    let succ_sets: Vec<Vec<Vertex>> = (1u32..1 << n)
        .filter(|m| m.count_ones() as usize <= max_degree)
        .map(|m| (0..n).filter(|&v| m >> v & 1 == 1).collect())
        .collect();
    let owners = 1usize << n;
    let priorities = (max_priority + 1).pow(n as u32);
    let edges = succ_sets.len().pow(n as u32);
    (0..owners).flat_map(move |o| {
        let succ_sets = succ_sets.clone();
        (0..priorities).flat_map(move |pr| {
            let succ_sets = succ_sets.clone();
            (0..edges).map(move |e| {
                let owner = (0..n).map(|v| if o >> v & 1 == 1 { Player::Adam } else { Player::Eve }).collect();
                let priority: Vec<usize> = digits(pr, max_priority + 1, n);
                let successors = digits(e, succ_sets.len(), n).into_iter().map(|i| succ_sets[i].clone()).collect();
                let d = ParityGame::tight_bound(&priority);
                ParityGame::new(d, owner, priority, successors).expect("enumerated games are valid")
            })
        })
    })
}

fn digits(mut x: usize, base: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let r = x % base;
            x /= base;
            r
        })
        .collect()
}

/// The seeded random suite: sizes cycle through 1..=6 and bounds through 2, 4, 6.
pub fn random_game(i: u64) -> ParityGame {
    let n = 1 + (i % 6) as usize;
    let d = 2 * (1 + (i / 6 % 3) as usize);
    generate_random_game(n, d, (1, n.min(3)), i).expect("feasible parameters")
}

/// All simple cycles of the graph given by `edges`, each listed once,
/// starting from its smallest vertex.
pub fn simple_cycles(edges: &[Vec<Vertex>]) -> Vec<Vec<Vertex>> {
    fn extend(edges: &[Vec<Vertex>], start: Vertex, path: &mut Vec<Vertex>, on_path: &mut [bool], out: &mut Vec<Vec<Vertex>>) {
        let last = *path.last().unwrap();
        for &w in &edges[last] {
            if w == start {
                out.push(path.clone());
            } else if w > start && !on_path[w] {
                on_path[w] = true;
                path.push(w);
                extend(edges, start, path, on_path, out);
                path.pop();
                on_path[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; edges.len()];
    for s in 0..edges.len() {
        on_path[s] = true;
        extend(edges, s, &mut vec![s], &mut on_path, &mut out);
        on_path[s] = false;
    }
    out
}

/// True when every simple cycle of `edges` has an even maximal priority.
pub fn all_cycles_even(game: &ParityGame, edges: &[Vec<Vertex>]) -> bool {
    simple_cycles(edges).into_iter().all(|c| {
        let cycle = Cycle::new(game, c).expect("edges come from the game");
        classify_cycle(game, &cycle) == CycleParity::Even
    })
}

/// Exhaustive embedding search: tries every increasing injection of
/// children at every node.
pub fn brute_embeds(small: &Shape, large: &Shape) -> bool {
    fn injections(k: usize, m: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in from..m {
            cur.push(j);
            injections(k, m, j + 1, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    injections(small.0.len(), large.0.len(), 0, &mut Vec::new(), &mut all);
    all.iter()
        .any(|inj| inj.iter().enumerate().all(|(i, &j)| brute_embeds(&small.0[i], &large.0[j])))
}
