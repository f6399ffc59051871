#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use voi::{Channel, FGenerator, LeakageSpec, LossMatrix, Order, Prior, Problem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

pub fn channel(rng: &mut ChaCha8Rng, nx: usize, na: usize) -> Channel {
    Channel::from_rows((0..nx).map(|_| distribution(rng, na)).collect()).unwrap()
}

/// Losses that favour the matching action, so every instance has a
/// nontrivial curve.
pub fn loss(rng: &mut ChaCha8Rng, nx: usize, na: usize) -> LossMatrix {
    LossMatrix::new(
        (0..nx)
            .map(|x| {
                (0..na)
                    .map(|a| if a == x % na { rng.gen_range(0.0..0.3) } else { rng.gen_range(0.5..1.0) })
                    .collect()
            })
            .collect(),
    )
    .unwrap()
}

pub fn prior(rng: &mut ChaCha8Rng, n: usize) -> Prior {
    Prior::new(distribution(rng, n)).unwrap()
}

pub fn instance(seed: u64, nx: usize, na: usize, spec: LeakageSpec) -> Problem {
    let mut r = rng(seed);
    let p = prior(&mut r, nx);
    let l = loss(&mut r, nx, na);
    Problem::new(p, l, spec).unwrap()
}

pub fn order(a: f64) -> Order {
    Order::new(a).unwrap()
}

/// The measures with a jointly convex functional.
pub fn certified_specs() -> Vec<LeakageSpec> {
    vec![
        LeakageSpec::Shannon,
        LeakageSpec::F(FGenerator::Kl),
        LeakageSpec::F(FGenerator::SquaredHellinger),
        LeakageSpec::F(FGenerator::PearsonChi2),
        LeakageSpec::Arimoto(order(0.5)),
        LeakageSpec::Sibson(order(0.5)),
        LeakageSpec::Csiszar(order(0.5)),
    ]
}

pub fn all_f_kinds() -> Vec<FGenerator> {
    vec![
        FGenerator::Kl,
        FGenerator::ReverseKl,
        FGenerator::SquaredHellinger,
        FGenerator::PearsonChi2,
        FGenerator::NeymanChi2,
        FGenerator::HellingerOrder(2.0),
        FGenerator::AlphaDivergence(0.5),
    ]
}
