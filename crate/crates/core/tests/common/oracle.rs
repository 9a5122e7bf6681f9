//! Reference Bessel values built from a different route than the library:
//! double-double ascending series for x < 20; for x >= 20, Hankel (J) or
//! closed-form (j) seeds, forward double-double recurrence up to the turning
//! point, and a backward recurrence beyond it anchored to the forward values.

use super::dd::Dd;

const SERIES_LIMIT: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Cyl,
    Sph,
}

impl Kind {
    /// `2ν` offset: `ν = k` for `J_k`, `ν = k + 1/2` for `j_k`.
    fn shift(self) -> f64 {
        match self {
            Kind::Cyl => 0.0,
            Kind::Sph => 1.0,
        }
    }

    /// Size of the oscillation envelope, floored at 1 near the origin.
    pub fn envelope(self, x: f64) -> f64 {
        let e = match self {
            Kind::Cyl => (2.0 / (std::f64::consts::PI * x)).sqrt(),
            Kind::Sph => 1.0 / x,
        };
        e.min(1.0)
    }
}

pub fn cyl(n: u32, x: f64) -> f64 {
    eval(Kind::Cyl, n, x)
}

pub fn sph(l: u32, x: f64) -> f64 {
    eval(Kind::Sph, l, x)
}

pub fn eval(kind: Kind, n: u32, x: f64) -> f64 {
    assert!(x >= 0.0);
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x < SERIES_LIMIT {
        return series(kind, n, x).to_f64();
    }
    recurrence(kind, n, x)
}

fn series(kind: Kind, n: u32, x: f64) -> Dd {
    let xd = Dd::new(x);
    let mut lead = Dd::ONE;
    for j in 1..=n {
        lead = match kind {
            Kind::Cyl => lead * (xd / (2.0 * j as f64)),
            Kind::Sph => lead * (xd / (2.0 * j as f64 + 1.0)),
        };
        if lead.hi == 0.0 {
            return Dd::ZERO;
        }
    }
    let q = match kind {
        Kind::Cyl => -(xd * xd) / 4.0,
        Kind::Sph => -(xd * xd) / 2.0,
    };
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for k in 1..2000u32 {
        let k = k as f64;
        let den = match kind {
            Kind::Cyl => k * (n as f64 + k),
            Kind::Sph => k * (2.0 * n as f64 + 2.0 * k + 1.0),
        };
        term = term * q / den;
        sum = sum + term;
        if term.abs().hi < 1e-36 * sum.abs().hi && k > x {
            break;
        }
    }
    lead * sum
}

fn seeds(kind: Kind, x: f64) -> (Dd, Dd) {
    let (s, c) = x.sin_cos();
    match kind {
        Kind::Sph => {
            let j0 = Dd::new(s) / x;
            let j1 = (j0 - Dd::new(c)) / x;
            (j0, j1)
        }
        Kind::Cyl => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            // χ = x - π/4 and x - 3π/4, expanded so that no rounded phase
            // enters the trigonometric calls.
            let (c0, s0) = (Dd::new(c + s) * r, Dd::new(s - c) * r);
            let (c1, s1) = (Dd::new(s - c) * r, -(Dd::new(s + c) * r));
            let amp = Dd::new((2.0 / (std::f64::consts::PI * x)).sqrt());
            let j = |nu: f64, cs: Dd, sn: Dd| {
                let (p, q) = hankel_pq(nu, x);
                amp * (p * cs - q * sn)
            };
            (j(0.0, c0, s0), j(1.0, c1, s1))
        }
    }
}

/// Hankel's P and Q for `J_ν`, summed until the terms stop shrinking.
fn hankel_pq(nu: f64, x: f64) -> (Dd, Dd) {
    let mu = 4.0 * nu * nu;
    let mut p = Dd::ONE;
    let mut q = Dd::ZERO;
    let mut a = Dd::ONE;
    let mut last = f64::INFINITY;
    for k in 1..200u32 {
        let odd = (2 * k - 1) as f64;
        a = a * Dd::new(mu - odd * odd) / (k as f64 * 8.0 * x);
        let mag = a.abs().hi;
        if mag > last || mag < 1e-34 {
            break;
        }
        last = mag;
        match k % 4 {
            1 => q = q + a,
            2 => p = p - a,
            3 => q = q - a,
            _ => p = p + a,
        }
    }
    (p, q)
}

fn recurrence(kind: Kind, n: u32, x: f64) -> f64 {
    let coef = |k: u32| Dd::new(2.0 * k as f64 + kind.shift()) / x;
    let turning = (x - 0.5 * kind.shift()).floor() as u32;
    let (f0, f1) = seeds(kind, x);
    let top = n.min(turning);
    let mut fw = vec![f0, f1];
    for k in 1..top {
        let next = coef(k) * fw[k as usize] - fw[k as usize - 1];
        fw.push(next);
    }
    if n <= turning {
        return fw[n as usize].to_f64();
    }
    let m = turning - 1;
    let (am, am1) = (fw[m as usize], fw[turning as usize]);
    let margin = (10.0 * x.cbrt()).ceil() as u32 + 30;
    let a = backward(kind, n, m, x, n + margin, am, am1);
    let b = backward(kind, n, m, x, n + margin + 60, am, am1);
    assert!(
        (a - b).abs() <= 4e-16 * a.abs() + 1e-300,
        "oracle backward recurrence not converged for n={n} x={x}: {a:e} vs {b:e}"
    );
    a
}

/// Backward recurrence from `start`, scaled so indices `m`, `m+1` match the
/// anchors in the least-squares sense.
fn backward(kind: Kind, n: u32, m: u32, x: f64, start: u32, am: Dd, am1: Dd) -> f64 {
    let coef = |k: u32| Dd::new(2.0 * k as f64 + kind.shift()) / x;
    let mut hi = Dd::ZERO;
    let mut cur = Dd::new(1e-250);
    let mut at_n = Dd::ZERO;
    let mut at_m1 = Dd::ZERO;
    let mut k = start;
    loop {
        if k == n {
            at_n = cur;
        }
        if k == m + 1 {
            at_m1 = cur;
        }
        if k == m {
            break;
        }
        let prev = coef(k) * cur - hi;
        hi = cur;
        cur = prev;
        k -= 1;
        if cur.abs().hi > 1e150 {
            cur = cur.scale(1e-150);
            hi = hi.scale(1e-150);
            at_n = at_n.scale(1e-150);
            at_m1 = at_m1.scale(1e-150);
        }
    }
    let norm = cur.abs().hi.max(at_m1.abs().hi);
    let (gm, at_m1, at_n) = (cur / norm, at_m1 / norm, at_n / norm);
    let scale = (am * gm + am1 * at_m1) / (gm * gm + at_m1 * at_m1);
    (scale * at_n).to_f64()
}
