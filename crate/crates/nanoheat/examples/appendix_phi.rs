//! The double-layer comparison function phi(v, y, t, tau) approaches the
//! exterior heat kernel as |y - v| -> 0 at rate O(sqrt(alpha_p) |y - v|).
//!
//! ```bash
//! cargo run --release --example appendix_phi
//! ```

use nanoheat::asymptotics::fit_slope;
use nanoheat::heat::{heat_kernel, varphi_appendix};

fn main() {
    let (xi, z) = ([1.0, 0.0, 0.0], [0.0; 3]);
    let (t, tau, alpha_p, alpha_m) = (2.0, 1.0, 1.0, 1.0);
    let phi_e = heat_kernel(xi, t, z, tau, alpha_m);
    println!("Phi^e(xi, t; z, tau) = {phi_e:.12e}");
    println!("\n{:>10} {:>18} {:>14}", "|y-v|", "phi", "|phi - Phi^e|");
    let mut pts = Vec::new();
    let mut s = 1e-3;
    while s <= 0.1 + 1e-12 {
        let v = varphi_appendix([0.0; 3], [s, 0.0, 0.0], t, tau, alpha_p, xi, z, alpha_m).unwrap();
        println!("{s:>10.1e} {v:>18.12e} {:>14.6e}", (v - phi_e).abs());
        pts.push((s, (v - phi_e).abs()));
        s *= 10.0f64.sqrt();
    }
    let fit = fit_slope(&pts, 1.0, f64::INFINITY).unwrap();
    println!(
        "\nlog-log slope of |phi - Phi^e| vs |y - v|: {:.4}  (proximity bound needs >= 1)",
        fit.slope
    );
}
