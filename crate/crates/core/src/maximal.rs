//! Hardy–Littlewood maximal function over centered intervals.

use crate::field::Field;

/// `Mf(x) = sup_r (2r)^{-1} ∫_{x-r}^{x+r} |f|`, with the sup taken over
/// dyadic radii `r = Δx, 2Δx, 4Δx, …, L/2` plus the single-cell average
/// `|f(x)|` (the radius → 0 limit, so `Mf ≥ |f|` holds exactly). Intervals
/// wrap around the torus. N·log N total work via prefix sums.
pub fn maximal_function(f: &Field) -> Field {
    let grid = f.grid();
    let n = grid.n();
    let dx = grid.dx();
    let prefix = tiled_prefix_abs(f);
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();

    let mut radii = Vec::new();
    let mut r = 1usize;
    while r <= n / 2 {
        radii.push(r);
        r *= 2;
    }

    let values = (0..n)
        .map(|m| {
            let mut best = abs[m];
            for &ri in &radii {
                best = best.max(window_average(&prefix, &abs, m, ri, n, dx));
            }
            best
        })
        .collect();
    Field::from_values(grid.clone(), values).expect("averages of finite data are finite")
}

/// Average of |f| over `[x_m - r·Δx, x_m + r·Δx]` with trapezoid end weights.
#[inline]
fn window_average(prefix: &[f64], abs: &[f64], m: usize, r: usize, n: usize, dx: f64) -> f64 {
    // prefix is over the tiled array |f| |f| |f|; the center copy starts at n
    let lo = n + m - r;
    let hi = n + m + r;
    let full = prefix[hi + 1] - prefix[lo];
    let trap = full - 0.5 * (abs[(m + n - r) % n] + abs[(m + r) % n]);
    trap * dx / (2.0 * r as f64 * dx)
}

fn tiled_prefix_abs(f: &Field) -> Vec<f64> {
    let n = f.grid().n();
    let mut prefix = Vec::with_capacity(3 * n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for _ in 0..3 {
        for v in f.values() {
            acc += v.abs();
            prefix.push(acc);
        }
    }
    prefix
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    /// Brute-force oracle: sup over every radius 1..=N/2 in grid cells.
    fn maximal_function_all_radii(f: &Field) -> Field {
        let grid = f.grid();
        let n = grid.n();
        let dx = grid.dx();
        let prefix = tiled_prefix_abs(f);
        let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
        let values = (0..n)
            .map(|m| {
                (1..=n / 2)
                    .map(|r| window_average(&prefix, &abs, m, r, n, dx))
                    .fold(abs[m], f64::max)
            })
            .collect();
        Field::from_values(grid.clone(), values).unwrap()
    }

    #[test]
    fn constant_maps_to_its_magnitude() {
        let g = Grid::new(64, 10.0).unwrap();
        let f = Field::from_fn(&g, |_| -2.5).unwrap();
        let m = maximal_function(&f);
        for &v in m.values() {
            assert!((v - 2.5).abs() < 1e-13);
        }
    }

    #[test]
    fn dominates_the_function_pointwise() {
        let g = Grid::new(512, 20.0).unwrap();
        let f = Field::from_fn(&g, |x| (-x * x).exp() * (3.0 * x).cos()).unwrap();
        let m = maximal_function(&f);
        let tol = 1e-6 * f.max_abs();
        for (mf, v) in m.values().iter().zip(f.values()) {
            assert!(mf + tol >= v.abs(), "Mf = {mf} < |f| = {}", v.abs());
        }
    }

    #[test]
    fn spike_decays_like_mass_over_distance() {
        // unit-height spike of width h at the origin: brute-force over all
        // intervals gives Mf(x) ≈ h/(2|x|); dyadic radii stay within 2× of it
        let n = 256;
        let g = Grid::new(n, 16.0).unwrap();
        let mut v = vec![0.0; n];
        v[n / 2] = 1.0; // x = 0
        let f = Field::from_values(g.clone(), v).unwrap();
        let brute = maximal_function_all_radii(&f);
        let dyadic = maximal_function(&f);
        let h = g.dx();
        for (idx, &x) in g.nodes().iter().enumerate() {
            if x.abs() > 1.0 && x.abs() < 6.0 {
                let expected = h / (2.0 * x.abs());
                let got = brute.values()[idx];
                assert!(
                    (got - expected).abs() <= 0.6 * expected,
                    "x = {x}: brute {got:.4e} vs h/2|x| = {expected:.4e}"
                );
            }
            let b = brute.values()[idx];
            let d = dyadic.values()[idx];
            assert!(d <= b + 1e-15 && b <= 2.0 * d + 1e-15);
        }
    }
}
