//! Compares solver points against exhaustive search over a channel grid.

use voi::oracle::{ChannelTable, GridSpec};
use voi::{alternate_minimize, LeakageSpec, LossMatrix, Order, Prior, Problem, SolverConfig};

fn main() -> voi::Result<()> {
    let problem = Problem::new(
        Prior::new(vec![0.35, 0.65])?,
        LossMatrix::new(vec![vec![0.1, 0.9], vec![0.6, 0.2]])?,
        LeakageSpec::Csiszar(Order::new(0.5)?),
    )?;
    let grid = GridSpec::new(0.005)?;
    let table = ChannelTable::build(&problem, &grid)?;
    println!("{} grid channels", table.len());
    println!("{:>6} {:>12} {:>12} {:>12}", "beta", "R", "U solver", "U grid");
    for beta in [0.2, 0.5, 1.0, 2.0] {
        let res = alternate_minimize(&problem, &SolverConfig::new(beta))?;
        let grid_u = table.min_loss(res.r_beta)?;
        println!("{beta:>6} {:>12.6} {:>12.6} {:>12.6}", res.r_beta, res.expected_loss, grid_u);
    }
    Ok(())
}
