//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("Jacobi did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    ConvergenceFailure { sweeps: usize, off_norm: f64 },
    #[error("cannot decompose an empty operator")]
    Empty,
}

/// Raw output: eigenvalues in the order Jacobi leaves them and the
/// matching eigenvectors as rows.
#[derive(Debug)]
pub(crate) struct JacobiResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

fn off_norm_sq(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += a[i * n + j] * a[i * n + j];
        }
    }
    2.0 * sum
}

/// `x` vanishes against `d` at working precision.
fn negligible(x: f64, d: f64) -> bool {
    d.abs() + 100.0 * x.abs() == d.abs()
}

/// Diagonalises the row-major symmetric `matrix` in place.
///
/// Each sweep visits every off-diagonal pair once, in round-robin order:
/// a round applies up to `n/2` disjoint rotations at once, first to rows
/// and then to columns, so the column update runs along contiguous rows.
///
/// Sweeps skip entries below `threshold * ||A||_F / n` until
/// `||off(A)||_F <= threshold * ||A||_F`. One polishing sweep then rotates
/// every entry that is not below roundoff of both diagonal entries: the
/// skipped entries are far below the stopping norm but still perturb small
/// eigenvector components, whose relative accuracy ground-state ratios
/// depend on.
pub(crate) fn jacobi(
    mut a: Vec<f64>,
    n: usize,
    threshold: f64,
    max_sweeps: usize,
) -> Result<JacobiResult, SpectralError> {
    if n == 0 {
        return Err(SpectralError::Empty);
    }
    let frob = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let stop = threshold * frob;
    let coarse = stop / n as f64;
    // vt[p] is the p-th eigenvector (row p of V^T).
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }

    // Tournament schedule over an even number of slots; slot `n` is a bye
    // when `n` is odd.
    let m = n + n % 2;
    let mut slots: Vec<usize> = (0..m).collect();
    let mut round: Vec<Rotation> = Vec::with_capacity(m / 2);

    let mut sweeps = 0;
    let mut polish = false;
    loop {
        if polish {
            break;
        }
        let off = off_norm_sq(&a, n).sqrt();
        if off <= stop {
            polish = true;
        } else if sweeps == max_sweeps {
            return Err(SpectralError::ConvergenceFailure { sweeps, off_norm: off });
        }
        let mut rotated = false;
        for _ in 0..m - 1 {
            round.clear();
            for i in 0..m / 2 {
                let (x, y) = (slots[i], slots[m - 1 - i]);
                if x >= n || y >= n {
                    continue;
                }
                let (p, q) = (x.min(y), x.max(y));
                let apq = a[p * n + q];
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let skip = if polish {
                    negligible(apq, app) && negligible(apq, aqq)
                } else {
                    apq.abs() <= coarse
                };
                if skip {
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                round.push(Rotation {
                    p,
                    q,
                    c,
                    s: t * c,
                    app: app - t * apq,
                    aqq: aqq + t * apq,
                });
            }
            slots[1..].rotate_right(1);
            if round.is_empty() {
                continue;
            }
            rotated = true;
            for r in &round {
                rotate_rows(&mut a, n, r.p, r.q, r.c, r.s);
                rotate_rows(&mut vt, n, r.p, r.q, r.c, r.s);
            }
            for row in a.chunks_exact_mut(n) {
                for r in &round {
                    let (xp, yq) = (row[r.p], row[r.q]);
                    row[r.p] = r.c * xp - r.s * yq;
                    row[r.q] = r.s * xp + r.c * yq;
                }
            }
            for r in &round {
                a[r.p * n + r.p] = r.app;
                a[r.q * n + r.q] = r.aqq;
                a[r.p * n + r.q] = 0.0;
                a[r.q * n + r.p] = 0.0;
            }
        }
        // A polishing pass with nothing left to rotate is not a sweep.
        if rotated || !polish {
            sweeps += 1;
        }
    }

    let values = (0..n).map(|i| a[i * n + i]).collect();
    let vectors = vt.chunks(n).map(<[f64]>::to_vec).collect();
    Ok(JacobiResult {
        values,
        vectors,
        sweeps,
    })
}

struct Rotation {
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    app: f64,
    aqq: f64,
}

/// `row_p <- c row_p - s row_q`, `row_q <- s row_p + c row_q`.
#[inline]
fn rotate_rows(m: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    debug_assert!(p < q);
    let (head, tail) = m.split_at_mut(q * n);
    let rp = &mut head[p * n..(p + 1) * n];
    let rq = &mut tail[..n];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}
