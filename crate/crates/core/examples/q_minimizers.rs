//! Checks the closed-form minimizers of the f-leakage functional against a
//! grid search over the action simplex.

use voi::leakage::{g_functional, optimal_q_f};
use voi::oracle::{grid_min_q, GridSpec};
use voi::{Channel, FGenerator, LeakageSpec, Prior};

fn main() -> voi::Result<()> {
    let prior = Prior::new(vec![0.3, 0.3, 0.4])?;
    let ch = Channel::from_rows(vec![vec![0.6, 0.3, 0.1], vec![0.2, 0.5, 0.3], vec![0.1, 0.1, 0.8]])?;
    let grid = GridSpec::new(0.002)?;
    for f in [
        FGenerator::Kl,
        FGenerator::ReverseKl,
        FGenerator::SquaredHellinger,
        FGenerator::PearsonChi2,
        FGenerator::NeymanChi2,
        FGenerator::HellingerOrder(3.0),
        FGenerator::AlphaDivergence(-0.5),
    ] {
        let spec = LeakageSpec::F(f);
        let q = optimal_q_f(&f, &prior, &ch);
        let closed = g_functional(&spec, &prior, &ch, &q)?.value;
        let (_, best) = grid_min_q(&spec, &prior, &ch, &grid)?;
        println!("{:<30} q* = {:.4?}  D = {closed:.8}  grid = {best:.8}", f.name(), q.probs());
    }
    Ok(())
}
