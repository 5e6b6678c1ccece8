//! Degenerate members, branch data and the sign group of a pencil.
//!
//! `cargo run --example pencil_info -- 0 1 3 7 12 20`

use qplab::algebra::field::format_rational;
use qplab::pencil::{even_sign_group_elements, sign_group_elements, PencilOfQuadrics};

fn main() -> qplab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let p = if args.is_empty() {
        PencilOfQuadrics::canonical(2)?
    } else {
        PencilOfQuadrics::parse(&args)?
    };
    println!("{p}");
    println!("genus {}, fingerprint {}", p.genus(), p.fingerprint());
    for m in p.degenerate_parameters()? {
        println!(
            "  t = {:>6}: kernel spanned by e_{}",
            format_rational(&m.parameter),
            m.index
        );
    }
    let h = p.hyperelliptic();
    println!("{} branch points over P^1", h.branch_params.len());
    println!(
        "sign group: {} elements, even subgroup: {}",
        sign_group_elements(&p).len(),
        even_sign_group_elements(&p).len()
    );
    Ok(())
}
