//! Evaluates every supported leakage measure on one channel, and checks the
//! data-processing inequality after garbling the output.

use voi::{leakage, Channel, FGenerator, LeakageSpec, Order, Prior};

fn main() -> voi::Result<()> {
    let prior = Prior::new(vec![0.2, 0.5, 0.3])?;
    let w = Channel::from_rows(vec![vec![0.8, 0.1, 0.1], vec![0.2, 0.7, 0.1], vec![0.1, 0.2, 0.7]])?;
    let garble = Channel::from_rows(vec![vec![0.9, 0.1], vec![0.3, 0.7], vec![0.5, 0.5]])?;
    let wk = w.compose(&garble)?;
    let specs = [
        LeakageSpec::Shannon,
        LeakageSpec::F(FGenerator::Kl),
        LeakageSpec::F(FGenerator::ReverseKl),
        LeakageSpec::F(FGenerator::SquaredHellinger),
        LeakageSpec::F(FGenerator::PearsonChi2),
        LeakageSpec::F(FGenerator::NeymanChi2),
        LeakageSpec::F(FGenerator::HellingerOrder(2.0)),
        LeakageSpec::F(FGenerator::AlphaDivergence(0.5)),
        LeakageSpec::Arimoto(Order::new(0.5)?),
        LeakageSpec::Arimoto(Order::new(2.0)?),
        LeakageSpec::Sibson(Order::new(0.5)?),
        LeakageSpec::Sibson(Order::new(2.0)?),
        LeakageSpec::Csiszar(Order::new(0.5)?),
        LeakageSpec::Csiszar(Order::new(2.0)?),
    ];
    println!("{:<32} {:>12} {:>12}", "measure", "L(W)", "L(W then K)");
    for spec in specs {
        let a = leakage(&spec, &prior, &w)?;
        let b = leakage(&spec, &prior, &wk)?;
        println!("{:<32} {a:>12.6} {b:>12.6}", spec.name());
    }
    Ok(())
}
