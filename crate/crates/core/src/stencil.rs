//! Sixth-order finite differences and interpolation on the uniform grid
//! `x_j = jπ/m`, with ghost nodes filled by reflection about each pole.

/// Symmetry of a profile under reflection about a pole.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

pub(crate) const GHOSTS: usize = 3;

const D1: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
const D2_CENTER: f64 = -49.0 / 18.0;
const D2: [f64; 3] = [3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];

/// `f` padded with `GHOSTS` reflected values at each end.
pub(crate) fn extend(f: &[f64], parity: Parity) -> Vec<f64> {
    let m = f.len() - 1;
    let s = parity.sign();
    let mut out = Vec::with_capacity(f.len() + 2 * GHOSTS);
    for k in (1..=GHOSTS).rev() {
        out.push(s * f[k]);
    }
    out.extend_from_slice(f);
    for k in 1..=GHOSTS {
        out.push(s * f[m - k]);
    }
    out
}

pub(crate) fn d1(f: &[f64], parity: Parity, h: f64) -> Vec<f64> {
    let e = extend(f, parity);
    (0..f.len())
        .map(|j| {
            let c = j + GHOSTS;
            let mut s = 0.0;
            for (k, w) in D1.iter().enumerate() {
                s += w * (e[c + k + 1] - e[c - k - 1]);
            }
            s / h
        })
        .collect()
}

pub(crate) fn d2(f: &[f64], parity: Parity, h: f64) -> Vec<f64> {
    let e = extend(f, parity);
    (0..f.len())
        .map(|j| {
            let c = j + GHOSTS;
            let mut s = D2_CENTER * e[c];
            for (k, w) in D2.iter().enumerate() {
                s += w * (e[c + k + 1] + e[c - k - 1]);
            }
            s / (h * h)
        })
        .collect()
}

/// Replaces both pole values by even extrapolation from the three nearest
/// interior nodes.
pub(crate) fn pole_fill(v: &mut [f64]) {
    let m = v.len() - 1;
    v[0] = 1.5 * v[1] - 0.6 * v[2] + 0.1 * v[3];
    v[m] = 1.5 * v[m - 1] - 0.6 * v[m - 2] + 0.1 * v[m - 3];
}

/// Six-point Lagrange interpolation of an extended array at coordinate `x`.
///
/// `ext` must come from [`extend`]; `h` is the grid spacing.
pub(crate) fn interpolate(ext: &[f64], h: f64, x: f64) -> f64 {
    let m = ext.len() - 2 * GHOSTS - 1;
    let u = x / h;
    let j = (u.floor() as isize).clamp(0, m as isize - 1) as usize;
    let local = u - j as f64;
    // nodes j-2 ..= j+3 sit at offsets -2 ..= 3 from the cell start
    let mut sum = 0.0;
    for a in 0..6 {
        let xa = a as f64 - 2.0;
        let mut l = 1.0;
        for b in 0..6 {
            if b != a {
                let xb = b as f64 - 2.0;
                l *= (local - xb) / (xa - xb);
            }
        }
        sum += l * ext[j + GHOSTS + a - 2];
    }
    sum
}
