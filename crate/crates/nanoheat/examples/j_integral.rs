//! The time integral of the heat kernel and its erfc closed form,
//! `J = alpha/(4 pi d) erfc(sqrt(alpha) d / (2 sqrt(t)))`, checked against
//! adaptive quadrature and the Maclaurin series of erf.
//!
//! ```bash
//! cargo run --release --example j_integral
//! ```

use nanoheat::heat::special::{erf, erf_maclaurin, erfc};
use nanoheat::heat::{time_integral_j, time_integral_j_quadrature};

fn main() {
    println!("erf rational vs Maclaurin series at small arguments:");
    for x in [0.1, 0.4, 0.8] {
        println!(
            "  erf({x}) = {:.16}   series: {:.16}   diff {:.2e}",
            erf(x),
            erf_maclaurin(x, 30),
            (erf(x) - erf_maclaurin(x, 30)).abs()
        );
    }

    println!("\nJ closed form vs adaptive quadrature (alpha, d, t grid):");
    println!("{:>6} {:>6} {:>6} {:>18} {:>12}", "alpha", "d", "t", "J", "rel diff");
    for alpha in [0.1, 1.0, 10.0] {
        for d in [0.05, 0.5, 5.0] {
            for t in [0.1, 1.0, 10.0] {
                let xi = [d, 0.0, 0.0];
                let z = [0.0; 3];
                let closed = time_integral_j(xi, z, t, alpha).unwrap();
                let quad = time_integral_j_quadrature(xi, z, t, alpha, 1e-12).unwrap();
                let rel = if closed > 1e-280 {
                    (closed - quad).abs() / closed
                } else {
                    (closed - quad).abs()
                };
                println!("{alpha:>6} {d:>6} {t:>6} {closed:>18.10e} {rel:>12.2e}");
            }
        }
    }

    let d = 0.37;
    let lim = 1.0 / (4.0 * std::f64::consts::PI * d);
    let j_inf = time_integral_j([d, 0.0, 0.0], [0.0; 3], 1e6 * d * d, 1.0).unwrap();
    println!(
        "\nlong-time limit: J(t = 1e6 d^2) = {:.12e} vs alpha/(4 pi d) = {:.12e} (rel {:.1e})",
        j_inf,
        lim,
        (j_inf - lim).abs() / lim
    );
    let _ = erfc(1.0);
}
