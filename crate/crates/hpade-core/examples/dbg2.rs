use hpade_core::rates::{solve_kind};
use hpade_core::equilibrium::RateKind;
use hpade_core::{poly_roots, ModelParams};

fn main() {
    let m = ModelParams::from_f64(2.0, 3.0, 160).unwrap();
    let sol = solve_kind(&m, RateKind::Hp2, 24).unwrap();
    println!("deg {}", sol.denominator().degree());
    match poly_roots(m.ctx(), sol.denominator()) {
        Ok(zs) => println!("ok worst {:.3e} minsep {:.3e}", zs.worst_residual.to_f64(), zs.min_separation().to_f64()),
        Err(e) => println!("ERR {e}"),
    }
    // smaller one that worked
    let sol12 = solve_kind(&m, RateKind::Hp2, 12).unwrap();
    match poly_roots(m.ctx(), sol12.denominator()) {
        Ok(zs) => println!("m=12 ok worst {:.3e} minsep {:.3e}", zs.worst_residual.to_f64(), zs.min_separation().to_f64()),
        Err(e) => println!("m=12 ERR {e}"),
    }
}
