//! The kernel vector of the power matrix, normalized.

use qplab::algebra::field::format_rational;
use qplab::p1bundle::vandermonde_normalizer;
use qplab::pencil::PencilOfQuadrics;

fn main() -> qplab::Result<()> {
    for lambdas in [vec!["0", "1", "2", "3", "4", "5"], vec!["-2", "1/2", "1", "3", "7", "8", "10", "11"]] {
        let p = PencilOfQuadrics::parse(&lambdas)?;
        let a = vandermonde_normalizer(&p)?;
        let shown: Vec<String> = a.iter().map(format_rational).collect();
        println!("{p}\n  a = ({})", shown.join(", "));
    }
    Ok(())
}
