//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use ocs_core::lp::LpProblem;
use ocs_core::probe::count_transitions;
use ocs_core::{Tristimulus, WeightedCmf};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Largest `c` over curves made of a band of constant level, two free bins
/// chosen among the four bins flanking the band edges, and at most two
/// transitions. Each cell is solved by projecting onto the plane normal to
/// the ray direction.
pub fn projection_oracle(w: &WeightedCmf, target: Tristimulus) -> f64 {
    let n = w.len() as isize;
    let g = w.gray50();
    let d = target - g;
    let dn = d / d.norm();
    // orthonormal basis (e1, e2) of the plane normal to d
    let seed = if dn.x.abs() < 0.9 { Tristimulus::new(1.0, 0.0, 0.0) } else { Tristimulus::new(0.0, 1.0, 0.0) };
    let e1 = seed - dn * seed.dot(dn);
    let e1 = e1 / e1.norm();
    let e2 = Tristimulus::new(
        dn.y * e1.z - dn.z * e1.y,
        dn.z * e1.x - dn.x * e1.z,
        dn.x * e1.y - dn.y * e1.x,
    );
    let mut best = f64::NEG_INFINITY;
    let mut rho = vec![0.0; n as usize];
    for lo in 0..=n {
        for hi in lo..=n {
            let flank: Vec<isize> = [lo - 2, lo - 1, hi, hi + 1]
                .into_iter()
                .filter(|&k| (0..n).contains(&k))
                .collect();
            for (p, &fi) in flank.iter().enumerate() {
                for &fj in &flank[p + 1..] {
                    if fi == fj {
                        continue;
                    }
                    for level in [1.0, 0.0] {
                        for (k, r) in rho.iter_mut().enumerate() {
                            let k = k as isize;
                            *r = if (lo..hi).contains(&k) { level } else { 1.0 - level };
                        }
                        rho[fi as usize] = 0.0;
                        rho[fj as usize] = 0.0;
                        let base = w.tristimulus(&rho);
                        let (ai, aj) = (w.column(fi as usize), w.column(fj as usize));
                        let r = base - g;
                        let m = [[ai.dot(e1), aj.dot(e1)], [ai.dot(e2), aj.dot(e2)]];
                        let rhs = [-r.dot(e1), -r.dot(e2)];
                        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                        if det.abs() < 1e-300 {
                            continue;
                        }
                        let u = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
                        let v = (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det;
                        if !(-1e-10..=1.0 + 1e-10).contains(&u) || !(-1e-10..=1.0 + 1e-10).contains(&v) {
                            continue;
                        }
                        rho[fi as usize] = u;
                        rho[fj as usize] = v;
                        if count_transitions(&rho, 1e-9, 1e-9).count > 2 {
                            continue;
                        }
                        let x = base + ai * u + aj * v;
                        best = best.max((x - g).dot(d) / d.dot(d));
                    }
                }
            }
        }
    }
    best
}

pub struct Dense {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub f: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Dense {
    pub fn problem(&self) -> LpProblem {
        LpProblem::new(self.f.clone(), &self.a, self.b.clone(), self.lo.clone(), self.hi.clone()).unwrap()
    }
}

pub fn random_lp(rng: &mut ChaCha8Rng, m: usize, n: usize, feasible: bool) -> Dense {
    let a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let lo: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..0.0)).collect();
    let hi: Vec<f64> = lo.iter().map(|l| l + rng.random_range(0.2..2.0)).collect();
    let b = if feasible {
        let x0: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| rng.random_range(*l..*h)).collect();
        a.iter().map(|row| row.iter().zip(&x0).map(|(r, x)| r * x).sum()).collect()
    } else {
        (0..m).map(|_| rng.random_range(-1.5..1.5)).collect()
    };
    let f = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    Dense { a, b, f, lo, hi }
}

/// Solves a square system by Gaussian elimination with partial pivoting.
fn gauss(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let k = r.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..k {
            let q = m[row][col] / m[col][col];
            let pivot_row = m[col].clone();
            for (dst, src) in m[row][col..k].iter_mut().zip(&pivot_row[col..k]) {
                *dst -= q * src;
            }
            r[row] -= q * r[col];
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|c| m[row][c] * x[c]).sum();
        x[row] = (r[row] - s) / m[row][row];
    }
    Some(x)
}

/// Minimum objective over all basic feasible solutions, or `None` if no
/// basis is feasible.
pub fn vertex_oracle(p: &Dense) -> Option<f64> {
    let (m, n) = (p.b.len(), p.f.len());
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let basic: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let nonbasic: Vec<usize> = (0..n).filter(|j| mask & (1 << j) == 0).collect();
        for bounds in 0u32..(1 << nonbasic.len()) {
            let mut x = vec![0.0; n];
            for (t, &j) in nonbasic.iter().enumerate() {
                x[j] = if bounds & (1 << t) != 0 { p.hi[j] } else { p.lo[j] };
            }
            let rhs: Vec<f64> = (0..m)
                .map(|i| p.b[i] - nonbasic.iter().map(|&j| p.a[i][j] * x[j]).sum::<f64>())
                .collect();
            let mat: Vec<Vec<f64>> = (0..m).map(|i| basic.iter().map(|&j| p.a[i][j]).collect()).collect();
            let Some(xb) = gauss(mat, rhs) else { continue };
            for (t, &j) in basic.iter().enumerate() {
                x[j] = xb[t];
            }
            if (0..n).any(|j| x[j] < p.lo[j] - 1e-10 || x[j] > p.hi[j] + 1e-10) {
                continue;
            }
            let obj: f64 = p.f.iter().zip(&x).map(|(f, v)| f * v).sum();
            best = Some(best.map_or(obj, |b: f64| b.min(obj)));
        }
    }
    best
}

