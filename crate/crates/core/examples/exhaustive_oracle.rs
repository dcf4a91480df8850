//! Exact f, f-hat and mu for tiny cubes, and the change profile of one coloring.

use hypercube_sat::alternating::alternating_coloring;
use hypercube_sat::hypercube::Vertex;
use hypercube_sat::oracle::{coloring_stats, exhaustive_sweep, geodesic_change_profile, SweepOptions};

fn main() -> hypercube_sat::Result<()> {
    for n in 2..=3 {
        let s = exhaustive_sweep(n, SweepOptions::default())?;
        println!("n = {n}: f = {}, f-hat = {}, mu = {} over {} colorings", s.f, s.fhat, s.mu, s.evaluated);
    }

    let c = alternating_coloring(5)?;
    let st = coloring_stats(&c);
    println!("alternating c_5: f-value {}, f-hat value {}, blocking pairs {}", st.f_value(), st.fhat_value(), st.blocking);
    for bits in ["00000", "00011", "01011"] {
        let u = Vertex::parse(bits)?;
        let p = geodesic_change_profile(&c, u)?;
        println!("  u = {u}: min changes {}, ending red {}, ending blue {}", p.s, p.s_last_red, p.s_last_blue);
    }
    Ok(())
}
