//! Roots of the truncation polynomial and the series they terminate.

use monopole_qes::heun::{series_coefficients, truncation_kappa_roots};

fn main() {
    let j = 1.5;
    for n in 1..=4u32 {
        let roots = truncation_kappa_roots(n, j, 0.0);
        println!("n = {n}, j = {j}: kappa roots {roots:.6?}");
        for kappa in roots {
            let d = series_coefficients(j, kappa, 0.0, 2.0 * n as f64, n as usize + 3);
            let (a, b) = (d[n as usize + 1], d[n as usize + 2]);
            println!("    kappa {kappa:>10.6}  d_(n+1) = {a:.1e}  d_(n+2) = {b:.1e}");
        }
    }
    println!(
        "closed forms: n=1 -> 2 sqrt(j+1/2) = {:.6}, n=2 -> 4 sqrt(j+3/4) = {:.6}",
        2.0 * (j + 0.5).sqrt(),
        4.0 * (j + 0.75).sqrt()
    );

    // A linear term shifts the roots off the symmetric pattern.
    println!("n = 2, j = {j}, chi = 0.7: {:.6?}", truncation_kappa_roots(2, j, 0.7));
}
