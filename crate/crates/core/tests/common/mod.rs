//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

/// Star discrepancy by direct counting at every critical corner, `O(N^{s+1})`.
pub fn naive_star_disc(points: &[Vec<f64>]) -> f64 {
    let s = points[0].len();
    let n = points.len() as f64;
    let axes: Vec<Vec<f64>> = (0..s)
        .map(|a| {
            let mut c: Vec<f64> = points.iter().map(|p| p[a]).collect();
            c.push(1.0);
            c
        })
        .collect();
    let mut idx = vec![0usize; s];
    let mut best = 0f64;
    loop {
        let corner: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| axes[a][i]).collect();
        let vol: f64 = corner.iter().product();
        let open = points
            .iter()
            .filter(|p| p.iter().zip(&corner).all(|(x, w)| x < w))
            .count() as f64;
        let closed = points
            .iter()
            .filter(|p| p.iter().zip(&corner).all(|(x, w)| x <= w))
            .count() as f64;
        best = best.max(vol - open / n).max(closed / n - vol);
        let mut a = 0;
        loop {
            if a == s {
                return best.min(1.0);
            }
            idx[a] += 1;
            if idx[a] < axes[a].len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// One-dimensional star discrepancy from the definition, testing `[0, x)`
/// and `[0, x]` at every point and at 1.
pub fn naive_star_disc_1d(xs: &[f64]) -> f64 {
    naive_star_disc(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>())
}

/// Incidence matrix of `1 -> 12, 2 -> 13, ..., m -> 1`, built from the images.
pub fn incidence(m: usize) -> Vec<Vec<f64>> {
    let mut b = vec![vec![0.0; m]; m];
    for letter in 1..=m {
        let image: Vec<usize> = if letter < m {
            vec![1, letter + 1]
        } else {
            vec![1]
        };
        for a in image {
            b[a - 1][letter - 1] += 1.0;
        }
    }
    b
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
}

/// Right and left Perron eigenvectors (sum-normalized) and the eigenvalue, by power iteration.
pub fn power_iteration(m: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let b = incidence(m);
    let mut u = vec![1.0; m];
    let mut v = vec![1.0; m];
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let mut nu: Vec<f64> = (0..m)
            .map(|i| (0..m).map(|j| b[i][j] * u[j]).sum())
            .collect();
        let mut nv: Vec<f64> = (0..m)
            .map(|j| (0..m).map(|i| v[i] * b[i][j]).sum())
            .collect();
        lambda = nu.iter().sum::<f64>() / u.iter().sum::<f64>();
        normalize(&mut nu);
        normalize(&mut nv);
        u = nu;
        v = nv;
    }
    (u, v, lambda)
}

/// Letters of `sigma^k(1)` by literal substitution.
pub fn iterate_substitution(m: u8, k: usize) -> Vec<u8> {
    let mut w = vec![1u8];
    for _ in 0..k {
        w = w
            .iter()
            .flat_map(|&a| if a < m { vec![1, a + 1] } else { vec![1] })
            .collect();
    }
    w
}

/// Basis `F_k` from the recurrence with the powers of two as initial terms.
pub fn basis(m: usize, len: usize) -> Vec<u64> {
    let mut f: Vec<u64> = Vec::with_capacity(len);
    for k in 0..len {
        let next = if k < m {
            1 << k
        } else {
            f[k - m..k].iter().sum()
        };
        f.push(next);
    }
    f
}

/// Every binary string of length `k` (least significant digit first) without `m` consecutive ones.
pub fn admissible_strings(m: usize, k: usize) -> Vec<Vec<u8>> {
    (0u32..1 << k)
        .map(|bits| (0..k).map(|j| ((bits >> j) & 1) as u8).collect::<Vec<u8>>())
        .filter(|d| {
            let mut run = 0;
            d.iter().all(|&x| {
                run = if x == 1 { run + 1 } else { 0 };
                run < m
            })
        })
        .collect()
}

/// `sum_j eps_j F_j`.
pub fn value(f: &[u64], digits: &[u8]) -> u64 {
    digits.iter().zip(f).map(|(&d, &x)| d as u64 * x).sum()
}
