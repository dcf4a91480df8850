//! How many clauses lex-leader symmetry breaking adds as `max_comp` grows.

use hypercube_sat::encode::{build_conjecture, Conjecture, EncodingConfig};
use hypercube_sat::hypercube::{generating_symmetries, SymmetrySet};

fn main() -> hypercube_sat::Result<()> {
    let n = 6;
    for set in [SymmetrySet::TranspositionsWithFlip, SymmetrySet::WithPureFlips] {
        println!("{set:?}: {} generators", generating_symmetries(n, set).len());
    }
    let base = build_conjecture(&EncodingConfig::plain(n, Conjecture::AntipodalPath))?.formula.num_clauses();
    for max_comp in [0, 5, 10, 20, 30, 60] {
        let cfg = EncodingConfig::new(n, Conjecture::AntipodalPath).with_max_comp(max_comp).with_red_degree(false);
        let enc = build_conjecture(&cfg)?;
        println!("max_comp {max_comp:>3}: {:>6} lex-leader clauses, {:>6} total (plain {base})", enc.sb_clauses, enc.formula.num_clauses());
    }
    Ok(())
}
