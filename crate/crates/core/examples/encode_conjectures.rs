//! Builds the four conjecture formulas for a small cube and writes one as DIMACS.
//!
//! `cargo run --example encode_conjectures -- 5`

use hypercube_sat::cnf::write_dimacs;
use hypercube_sat::encode::{build_conjecture, Conjecture, EncodingConfig};

fn main() -> hypercube_sat::Result<()> {
    let n: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    for k in 1..=4 {
        let target = Conjecture::from_number(k)?;
        let plain = build_conjecture(&EncodingConfig::plain(n, target))?;
        let full = build_conjecture(&EncodingConfig::new(n, target))?;
        println!(
            "{target:<28} plain: {:>7} vars {:>8} clauses | default: {:>7} vars {:>8} clauses ({} lex-leader, {} red-degree)",
            plain.formula.num_vars(),
            plain.formula.num_clauses(),
            full.formula.num_vars(),
            full.formula.num_clauses(),
            full.sb_clauses,
            full.degree_clauses,
        );
    }
    let psi = build_conjecture(&EncodingConfig::new(n, Conjecture::AntipodalGeodesic))?;
    let path = std::env::temp_dir().join(format!("psi{n}.cnf"));
    write_dimacs(&psi.formula, &mut std::fs::File::create(&path)?)?;
    println!("wrote {}", path.display());
    Ok(())
}
