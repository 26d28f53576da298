//! Shared test support: an independent straight-line-code oracle for the
//! criterion formulas, built on plain `Vec<Vec<f64>>` arithmetic with
//! Gauss-Jordan inversion and Jacobi eigenvalues, deliberately sharing no
//! code with the library's nalgebra-based implementation path.
#![allow(dead_code)]

use lagat_core::{LabeledMatrix, Matrix};
use rand::rngs::StdRng;
use rand::Rng;

pub type M = Vec<Vec<f64>>;

pub fn eye(n: usize) -> M {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn transpose(a: &M) -> M {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

pub fn matmul(a: &M, b: &M) -> M {
    let (r, inner, c) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; c]; r];
    for i in 0..r {
        for k in 0..inner {
            let aik = a[i][k];
            for j in 0..c {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(a: &M, v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn add_scaled_identity(a: &M, s: f64) -> M {
    let mut out = a.clone();
    for i in 0..out.len() {
        out[i][i] += s;
    }
    out
}

pub fn diag(a: &M) -> Vec<f64> {
    (0..a.len()).map(|i| a[i][i]).collect()
}

pub fn trace(a: &M) -> f64 {
    diag(a).iter().sum()
}

/// Gauss-Jordan inverse with partial pivoting. Panics on singular input;
/// oracle test data is kept well conditioned.
pub fn gj_inverse(a: &M) -> M {
    let n = a.len();
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().partial_cmp(&aug[j][col].abs()).unwrap())
            .unwrap();
        assert!(aug[pivot][col].abs() > 1e-300, "singular matrix in oracle");
        aug.swap(col, pivot);
        let p = aug[col][col];
        for j in 0..2 * n {
            aug[col][j] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = aug[i][col];
                if f != 0.0 {
                    for j in 0..2 * n {
                        aug[i][j] -= f * aug[col][j];
                    }
                }
            }
        }
    }
    aug.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(a: &M) -> Vec<f64> {
    let n = a.len();
    let mut a = a.clone();
    for _ in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    1.0 / (theta - (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    diag(&a)
}

pub fn rows_of(p: &M, idx: &[usize]) -> M {
    idx.iter().map(|&i| p[i].clone()).collect()
}

// ---------------------------------------------------------------------
// Naive criterion formulas
// ---------------------------------------------------------------------

/// Design-matrix criteria computed literally from their formulas.
pub fn naive_x_family(
    kind: &str,
    p: &M,
    train: &[usize],
    test: Option<&[usize]>,
    lambda: f64,
    contrast: Option<&M>,
) -> f64 {
    let xt = rows_of(p, train);
    let xtx = matmul(&transpose(&xt), &xt);
    let r = gj_inverse(&add_scaled_identity(&xtx, lambda));

    let info = |g: &M| -> M {
        match contrast {
            Some(c) => matmul(c, &matmul(g, &transpose(c))),
            None => g.clone(),
        }
    };

    match kind {
        "AOPT" => trace(&info(&r)),
        "DOPT" => jacobi_eigenvalues(&info(&r)).iter().map(|e| e.ln()).sum(),
        "EOPT" => jacobi_eigenvalues(&info(&r))
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max),
        _ => {
            let zero: &str = kind;
            let target: M = if zero.ends_with('0') {
                xt.clone()
            } else {
                let test = test.expect("test rows required");
                rows_of(p, test)
            };
            let t = match contrast {
                Some(c) => matmul(c, &target),
                None => target,
            };
            let middle = if kind.ends_with('2') && kind != "GOPTPEV2" {
                matmul(&r, &matmul(&xtx, &r))
            } else {
                r.clone()
            };
            let pev = matmul(&t, &matmul(&middle, &transpose(&t)));
            let num = diag(&pev);
            let vals: Vec<f64> = if kind.starts_with("CD") {
                let den = diag(&matmul(&t, &transpose(&t)));
                num.iter().zip(&den).map(|(n, d)| n / d).collect()
            } else {
                num
            };
            match kind {
                "GOPTPEV" => jacobi_eigenvalues(&pev)
                    .into_iter()
                    .fold(f64::NEG_INFINITY, f64::max),
                "GOPTPEV2" => {
                    let e = jacobi_eigenvalues(&pev);
                    e.iter().sum::<f64>() / e.len() as f64
                }
                k if k.contains("MEAN") => vals.iter().sum::<f64>() / vals.len() as f64,
                _ => vals.into_iter().fold(f64::NEG_INFINITY, f64::max),
            }
        }
    }
}

fn scatter_projector(kinv: &M, w_full: &M, train: &[usize], lambda: f64) -> M {
    let wt = rows_of(w_full, train);
    let wtw = matmul(&transpose(&wt), &wt);
    let proj = matmul(&wt, &matmul(&gj_inverse(&wtw), &transpose(&wt)));
    let n = train.len();
    let mut m = eye(n);
    for i in 0..n {
        for j in 0..n {
            m[i][j] -= proj[i][j];
        }
    }
    let order = kinv.len();
    let mut system = vec![vec![0.0; order]; order];
    for i in 0..order {
        for j in 0..order {
            system[i][j] = lambda * kinv[i][j];
        }
    }
    for (a, &ia) in train.iter().enumerate() {
        for (b, &ib) in train.iter().enumerate() {
            system[ia][ib] += m[a][b];
        }
    }
    system
}

pub fn naive_pevmeanmm(
    kinv: &M,
    w_full: &M,
    train: &[usize],
    test: &[usize],
    lambda: f64,
) -> f64 {
    let h = gj_inverse(&scatter_projector(kinv, w_full, train, lambda));
    let vals: Vec<f64> = test.iter().map(|&t| h[t][t]).collect();
    vals.iter().sum::<f64>() / vals.len() as f64
}

pub fn naive_cdmeanmm(kinv: &M, w_full: &M, train: &[usize], test: &[usize], lambda: f64) -> f64 {
    let k = gj_inverse(kinv);
    let h = gj_inverse(&scatter_projector(kinv, w_full, train, lambda));
    let mut acc = 0.0;
    for &t in test {
        acc += (k[t][t] - lambda * h[t][t]) / k[t][t];
    }
    -(acc / test.len() as f64)
}

pub fn gaussian_kernel_naive(p: &M) -> M {
    let n = p.len();
    let m = p[0].len() as f64;
    let mut k = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let d2: f64 = p[i]
                .iter()
                .zip(&p[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            k[i][j] = (-d2 / m).exp();
        }
    }
    k
}

pub fn naive_gaussmeanmm(p: &M, train: &[usize], test: &[usize], lambda: f64) -> f64 {
    let k = gaussian_kernel_naive(p);
    let pick = |rows: &[usize], cols: &[usize]| -> M {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| k[i][j]).collect())
            .collect()
    };
    let ktt = pick(test, test);
    let ktr = pick(test, train);
    let krr = pick(train, train);
    let inv = gj_inverse(&add_scaled_identity(&krr, lambda));
    let post = matmul(&ktr, &matmul(&inv, &transpose(&ktr)));
    let mut acc = 0.0;
    for i in 0..test.len() {
        acc += ktt[i][i] - post[i][i];
    }
    -(acc / test.len() as f64)
}

// ---------------------------------------------------------------------
// Conversions and generators
// ---------------------------------------------------------------------

pub fn to_labeled(rows: &M, prefix: &str) -> LabeledMatrix {
    let ids: Vec<String> = (1..=rows.len()).map(|i| format!("{prefix}{i}")).collect();
    LabeledMatrix::new(ids, None, Matrix::from_rows(rows).unwrap()).unwrap()
}

pub fn to_m(m: &Matrix) -> M {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

pub fn random_m(rng: &mut StdRng, rows: usize, cols: usize) -> M {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect()
}

/// The quadratic-response grid design of the enumeration benchmark:
/// 25 rows over the {-2..2}^2 grid with columns 1, a, b, a^2, b^2, ab and
/// ids x1..x25.
pub fn grid_design() -> LabeledMatrix {
    let mut rows = Vec::with_capacity(25);
    let mut ids = Vec::with_capacity(25);
    let mut k = 0;
    for i in -2..=2 {
        for j in -2..=2 {
            k += 1;
            let (a, b) = (i as f64, j as f64);
            rows.push(vec![1.0, a, b, a * a, b * b, a * b]);
            ids.push(format!("x{k}"));
        }
    }
    LabeledMatrix::new(ids, None, Matrix::from_rows(&rows).unwrap()).unwrap()
}

/// The known enumerated optimum of the grid benchmark.
pub fn grid_best_solution() -> Vec<String> {
    ["x1", "x2", "x3", "x5", "x6", "x10", "x11", "x13", "x15", "x21", "x22", "x24", "x25"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

pub const GRID_BEST_VALUE: f64 = -21.3096195830339709687;
