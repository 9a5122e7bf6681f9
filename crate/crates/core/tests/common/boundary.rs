//! Two independent routes to the `√t` coefficient `b` of the unit-disk
//! Stokes trace `4πt Θ(t) = π + b √t + O(t)`.

use std::f64::consts::PI;

use stokes_core::special_fn::{first_zeros, zero_tables, BesselKind, BesselOrder};

/// Value pinned once both oracles agreed: `-(π^{3/2} + 4√π)`.
pub fn frozen_b() -> f64 {
    -(PI.powf(1.5) + 4.0 * PI.sqrt())
}

/// `(b, relative change of Θ(t_min) over the last cutoff step)`.
///
/// The disk spectrum is `{ j_{ν,k}² : ν ≥ 1 }`, once for `ν = 1` and twice
/// otherwise. `Θ` is summed directly at `t = 1.6e-4, 4e-5, 1e-5` with
/// cutoffs `20/t_min, 30/t_min, 40/t_min`. Then `g = (4πtΘ - π)/√t` is
/// extrapolated in `s = √t` (halving) to remove the `s` and `s²` terms.
pub fn direct_summation_b() -> (f64, f64) {
    let ts: [f64; 3] = [1.6e-4, 4e-5, 1e-5];
    let t_min = ts[2];
    let xmax = (40.0 / t_min).sqrt();
    let tables = zero_tables(BesselKind::Cylindrical, 1..=xmax as u32, xmax).unwrap();
    let theta = |t: f64, cutoff: f64| -> f64 {
        let mut terms: Vec<f64> = Vec::new();
        for table in &tables {
            let mult = if table.order.degree == 1 { 1.0 } else { 2.0 };
            for &z in &table.zeros {
                let v = z * z;
                if v <= cutoff {
                    terms.push(mult * (-v * t).exp());
                }
            }
        }
        terms.sort_by(f64::total_cmp);
        terms.iter().sum()
    };
    let levels = [20.0 / t_min, 30.0 / t_min, 40.0 / t_min];
    let at = |c: f64| theta(t_min, c);
    let (prev, last) = (at(levels[1]), at(levels[2]));
    let change = ((last - prev) / last).abs();
    let g: Vec<f64> = ts
        .iter()
        .map(|&t| (4.0 * PI * t * theta(t, levels[2]) - PI) / t.sqrt())
        .collect();
    // s-halving: remove the O(s) term, then the O(s²) term
    let g1 = [2.0 * g[1] - g[0], 2.0 * g[2] - g[1]];
    ((4.0 * g1[1] - g1[0]) / 3.0, change)
}

/// Zero-counting route. The disk Dirichlet-Laplacian spectrum is
/// `{ j_{ν,k}² : ν ≥ 0 }` (twice for `ν ≥ 1`), so the Stokes trace is the
/// Laplacian trace minus the `J₀` and `J₁` families. With
/// `4πtΘ_D = π - π^{3/2}√t + O(t)` and a family whose zeros have counting
/// slope `σ` contributing `σ√π / (2√t)` to `Θ`,
/// `b = -π^{3/2} - 4π (σ₀ + σ₁) √π / 2`. The slopes are measured from zeros
/// 1000 and 3000 of each family.
pub fn zero_counting_b() -> f64 {
    let slope = |nu: u32| {
        let z = first_zeros(BesselOrder::cylindrical(nu), 3000)
            .unwrap()
            .zeros;
        2000.0 / (z[2999] - z[999])
    };
    let sigma = slope(0) + slope(1);
    -PI.powf(1.5) - 4.0 * PI * sigma * PI.sqrt() / 2.0
}
