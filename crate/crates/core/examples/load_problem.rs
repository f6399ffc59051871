//! Reads a problem document and sweeps its beta grid, as the CLI does.
//!
//! `cargo run --example load_problem -- examples/problems/sibson_grid.json`

use voi::cli::{parse_problem_file, DEFAULT_GRID};
use voi::{trace_curve, CurveConfig};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/problems/sibson_grid.json").into());
    let doc = match parse_problem_file(path.as_ref()) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let betas = match (doc.beta, &doc.beta_grid) {
        (Some(b), _) => vec![b],
        (None, Some(g)) => g.betas().expect("validated on parse"),
        (None, None) => DEFAULT_GRID.betas().expect("valid default"),
    };
    let cfg = CurveConfig { solver: doc.solver.clone(), ..CurveConfig::default() };
    match trace_curve(&doc.problem, &betas, &cfg) {
        Ok(points) => {
            for p in points {
                println!("beta {:.4}  R {:.6}  U {:.6}  V {:.6}", p.beta, p.r, p.u, p.v);
            }
        }
        Err(e) => eprintln!("{e}"),
    }
}
