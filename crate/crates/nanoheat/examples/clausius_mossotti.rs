//! Static dielectric sphere against the Clausius–Mossotti interior field
//! 3/(eps_p + 2) E0, the classical independent oracle for the volume solver.
//!
//! ```bash
//! cargo run --release --example clausius_mossotti
//! ```

use num_complex::Complex64;

use nanoheat::dispersion::{Contrast, MediumParams};
use nanoheat::domain::{voxelize, Particle, Shape};
use nanoheat::maxwell::{solve, IncidentWave, ScatteringProblem, SolveOptions};

fn main() {
    let medium = MediumParams::new(1.0, 1.0).unwrap();
    println!("{:>4} {:>10} {:>16} {:>16}", "n", "eps_p", "interior max rel", "mean-field rel");
    for n in [12, 16, 24] {
        let domain = voxelize(Shape::Ball, n).unwrap();
        for eps_p in [Complex64::new(3.0, 0.0), Complex64::new(5.0, 0.0), Complex64::new(-3.0, 0.5)]
        {
            let problem = ScatteringProblem {
                domain: domain.clone(),
                particle: Particle::new(0.01, [0.0; 3]).unwrap(),
                wave: IncidentWave::new([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 1e-9).unwrap(),
                contrast: Contrast { value: eps_p - 1.0 },
                medium,
            };
            let sol = solve(&problem, None, &SolveOptions::default()).unwrap();
            let exact = 3.0 / (eps_p + 2.0);
            let mut max_rel: f64 = 0.0;
            let mut mean = Complex64::new(0.0, 0.0);
            let mut count = 0usize;
            for (i, c) in domain.centroids.iter().enumerate() {
                let v = sol.field.vector_at(i);
                if c[0] * c[0] + c[1] * c[1] + c[2] * c[2] <= 0.36 {
                    let dev =
                        ((v[0] - exact).norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt();
                    max_rel = max_rel.max(dev / exact.norm());
                }
                mean += v[0];
                count += 1;
            }
            mean /= count as f64;
            println!(
                "{:>4} {:>10} {:>16.5} {:>16.5}",
                n,
                format!("{eps_p}"),
                max_rel,
                (mean - exact).norm() / exact.norm()
            );
        }
    }
    println!("\ninterior = voxels with |x| <= 0.6; the staircase boundary layer");
    println!("carries an O(1) local error that shrinks only in measure, so the");
    println!("oracle compares the interior plateau where the physics lives.");
}
