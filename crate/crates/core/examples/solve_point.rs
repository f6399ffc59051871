//! Solves one point of the curve on a three-action problem and prints the
//! optimal channel with its certificates.

use voi::{alternate_minimize, LeakageSpec, LossMatrix, Order, Prior, Problem, SolverConfig};

fn main() -> voi::Result<()> {
    let problem = Problem::new(
        Prior::new(vec![0.5, 0.3, 0.2])?,
        LossMatrix::new(vec![vec![0.0, 1.0, 0.4], vec![1.0, 0.0, 0.5], vec![0.3, 0.8, 0.0]])?,
        LeakageSpec::Sibson(Order::new(0.5)?),
    )?;
    let res = alternate_minimize(&problem, &SolverConfig::new(0.4))?;
    println!("{} at beta = {}", problem.leakage.name(), res.beta);
    println!("  leakage R = {:.9} nats", res.r_beta);
    println!("  loss    U = {:.9}", res.expected_loss);
    println!("  F       = {:.9} after {} rounds", res.f_final, res.trace.iterations);
    println!("  kkt     = {:.2e} (p), {:.2e} (q)", res.kkt_residual_p, res.kkt_residual_q);
    for (x, row) in res.channel.rows().enumerate() {
        println!("  p(.|{x}) = {row:.6?}");
    }
    println!("  q       = {:.6?}", res.q.probs());
    Ok(())
}
