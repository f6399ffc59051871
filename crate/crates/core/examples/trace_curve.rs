//! Traces the value-of-information curve for several measures on the same
//! decision problem and prints (R, V) pairs.

use voi::{trace_curve, BetaGrid, CurveConfig, FGenerator, LeakageSpec, LossMatrix, Order, Prior, Problem};

fn main() -> voi::Result<()> {
    let prior = Prior::new(vec![0.6, 0.4])?;
    let loss = LossMatrix::new(vec![vec![0.0, 1.0], vec![0.7, 0.1]])?;
    let betas = BetaGrid::log(0.05, 3.0, 10).betas()?;
    for spec in [
        LeakageSpec::Shannon,
        LeakageSpec::F(FGenerator::SquaredHellinger),
        LeakageSpec::Arimoto(Order::new(0.5)?),
    ] {
        let problem = Problem::new(prior.clone(), loss.clone(), spec)?;
        println!("{}", spec.name());
        println!("{:>10} {:>12} {:>12} {:>5}", "beta", "R", "V", "ok");
        for pt in trace_curve(&problem, &betas, &CurveConfig::default())? {
            println!("{:>10.4} {:>12.6} {:>12.6} {:>5}", pt.beta, pt.r, pt.v, pt.converged);
        }
        println!();
    }
    Ok(())
}
