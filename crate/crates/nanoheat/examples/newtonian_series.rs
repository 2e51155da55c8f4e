//! Quasi-static expansion of the Newtonian operator in powers of (ik):
//! geometric convergence of the truncated series to the directly assembled
//! operator while |k| diam(B) < 1.
//!
//! ```bash
//! cargo run --release --example newtonian_series
//! ```

use num_complex::Complex64;

use nanoheat::domain::{voxelize, Shape};
use nanoheat::operators::{assemble_newtonian, expand_newtonian_series, DenseOperator};

fn frob_rel(a: &DenseOperator, b: &DenseOperator, nvox: usize) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for r in 0..nvox {
        for c in 0..nvox {
            let d = a.entry(3 * r, 3 * c) - b.entry(3 * r, 3 * c);
            num += d.norm_sqr();
            den += b.entry(3 * r, 3 * c).norm_sqr();
        }
    }
    (num / den).sqrt()
}

fn main() {
    let dom = voxelize(Shape::Ball, 8).unwrap();
    let kd = Complex64::new(0.05, 0.0);
    let direct = assemble_newtonian(&dom, kd);
    println!("k delta = {kd}, diam(B) = 2 sqrt(3): series parameter |k| diam ~ {:.3}", 0.05 * 2.0 * 3.0f64.sqrt());
    println!("\n{:>4} {:>16}", "J", "rel Frobenius err");
    let mut last = f64::INFINITY;
    for j in 1..=8 {
        let series = expand_newtonian_series(&dom, kd, j).unwrap();
        let e = frob_rel(&series, &direct, dom.voxel_count());
        let ratio = if last.is_finite() { format!("  (x {:.3})", e / last) } else { String::new() };
        println!("{j:>4} {e:>16.3e}{ratio}");
        last = e;
    }
    println!("\nthe k = 0 truncation equals the static operator exactly, and the");
    println!("series is refused outside the quasi-static disc |k| diam(B) >= 1:");
    let refused = expand_newtonian_series(&dom, Complex64::new(0.5, 0.0), 4);
    println!("  expand at k = 0.5 -> {:?}", refused.err().map(|e| e.to_string()));
}
