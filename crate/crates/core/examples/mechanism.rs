//! Builds the mechanism that realises a solver point and checks that it
//! attains the promised gain within the leakage budget. Actions 1 and 2
//! have identical losses, so they collapse into one output symbol.

use voi::{
    alternate_minimize, build_mechanism, verify_achievability, LeakageSpec, LossMatrix, Prior, Problem,
    SolverConfig,
};

fn main() -> voi::Result<()> {
    let problem = Problem::new(
        Prior::new(vec![0.4, 0.6])?,
        LossMatrix::new(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.2, 0.2]])?,
        LeakageSpec::Shannon,
    )?;
    let res = alternate_minimize(&problem, &SolverConfig::new(0.5))?;
    let mech = build_mechanism(&res, &problem.prior, 1e-6)?;
    println!("action classes: {:?}", mech.class_of);
    for (x, row) in mech.map.rows().enumerate() {
        println!("p(y|{x}) = {row:.6?}");
    }
    for (y, post) in mech.posteriors.iter().enumerate() {
        println!("posterior given y={y}: {post:.6?}");
    }
    let rep = verify_achievability(&problem, &res, &mech)?;
    println!("gain {:.9} (target {:.9})", rep.gain, rep.target_gain);
    println!("leakage {:.9} (budget {:.9})", rep.leakage, rep.r_beta);
    Ok(())
}
