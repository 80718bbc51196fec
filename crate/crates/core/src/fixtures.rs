//! Named games used by tests, examples and the CLI.

use crate::game::{Game, PairSet};
use crate::rng;

/// CHSH: `X = Y = Σ = {0,1}`, all four edges in lexicographic order,
/// `π_(x,y) = {(a,b) : a ⊕ b = x·y}`.
pub fn chsh() -> Game {
    let mut edges = Vec::new();
    let mut constraints = Vec::new();
    for x in 0..2u32 {
        for y in 0..2u32 {
            edges.push((x as usize, y as usize));
            constraints.push(PairSet::from_predicate(2, |a, b| a ^ b == x & y));
        }
    }
    Game::new(2, 2, 2, edges, constraints).expect("valid fixture")
}

/// Complete bipartite `num_x × num_y` with every constraint full or every constraint empty.
pub fn uniform_game(num_x: usize, num_y: usize, q: usize, full: bool) -> Game {
    let edges = complete_edges(num_x, num_y);
    let c = if full { PairSet::full(q) } else { PairSet::empty(q) };
    Game::with_uniform_constraint(num_x, num_y, q, edges, c).expect("valid fixture")
}

pub fn complete_edges(num_x: usize, num_y: usize) -> Vec<(usize, usize)> {
    (0..num_x)
        .flat_map(|x| (0..num_y).map(move |y| (x, y)))
        .collect()
}

pub const PLANT8_SEED: u64 = 17;

/// Side of the planted rectangle `{0,1} × {0,1}` in [`plant8`].
pub const PLANT8_PLANT: [usize; 2] = [0, 1];

/// The 8×8 free game over `Σ = {0,1}` whose `{0,1}×{0,1}` rectangle is
/// unconstrained while every other edge allows exactly one of the four answer
/// pairs, chosen from seed 17. Not fortified by design.
pub fn plant8() -> Game {
    let edges = complete_edges(8, 8);
    let constraints = edges
        .iter()
        .enumerate()
        .map(|(e, &(x, y))| {
            if PLANT8_PLANT.contains(&x) && PLANT8_PLANT.contains(&y) {
                PairSet::full(2)
            } else {
                let mut r = rng::derived_stream(PLANT8_SEED, &[e as u64]);
                let pick = rng::sample_subset(&mut r, 4, 1);
                PairSet::from_pairs(2, pick.iter().map(|&p| ((p / 2) as u32, (p % 2) as u32)))
                    .expect("pairs in range")
            }
        })
        .collect();
    Game::new(8, 8, 2, edges, constraints).expect("valid fixture")
}
